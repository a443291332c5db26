//! Sweep orchestration over (method, omega_p, I_in) grids.

pub mod output;
pub mod presets;

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use output::{emit_outputs, parse_csv, plot_script, write_csv, write_ndjson, OutputFormat, CSV_HEADER};
pub use presets::{preset, preset_names, Preset};

use crate::algebra::TruncationRule;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::lattice::{build_model, drive_from_intensity, LatticeModel, Medium};
use crate::semiclassical::{
    mean_field_steady, mqca_interaction, qca_steady, IntegrationPolicy, MeanFieldOptions, Placement, Status,
};
use crate::thle::{thle_transmission, DEFAULT_MAX_DIM};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "THLE")]
    Thle,
    #[serde(rename = "QCA")]
    Qca,
    #[serde(rename = "MQCA")]
    Mqca,
    #[serde(rename = "MF")]
    Mf,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Thle, Method::Qca, Method::Mqca, Method::Mf];

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "THLE" => Some(Method::Thle),
            "QCA" => Some(Method::Qca),
            "MQCA" => Some(Method::Mqca),
            "MF" | "MEANFIELD" | "MEAN-FIELD" => Some(Method::Mf),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Thle => "THLE",
            Method::Qca => "QCA",
            Method::Mqca => "MQCA",
            Method::Mf => "MF",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A validated sweep request.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub label: String,
    pub model: LatticeModel,
    pub omega_p: Vec<f64>,
    pub i_in: Vec<f64>,
    pub methods: Vec<Method>,
    /// Truncation level; required when THLE is requested.
    pub m: Option<u32>,
    pub placement: Placement,
    /// Evaluate `U_eff` from each site's own parameters.
    pub per_site_ueff: bool,
    pub mean_field: MeanFieldOptions,
    pub policy: IntegrationPolicy,
    pub max_dim: usize,
}

impl SweepPlan {
    /// Validates the configuration; nothing is computed here.
    pub fn from_config(config: &Config) -> Result<Self> {
        let model = build_model(config)?;
        let omega_p = config
            .omega_p_grid
            .as_ref()
            .ok_or_else(|| Error::config("omega_p_grid", "missing"))?
            .values("omega_p_grid")?;
        let i_in = config
            .i_in_grid
            .as_ref()
            .ok_or_else(|| Error::config("i_in_grid", "missing"))?
            .values("i_in_grid")?;
        if i_in[0] < 0.0 {
            return Err(Error::config("i_in_grid", "intensities must be nonnegative"));
        }
        let names = config.methods.as_ref().ok_or_else(|| Error::config("methods", "missing"))?;
        if names.is_empty() {
            return Err(Error::config("methods", "at least one method is required"));
        }
        let mut methods = Vec::with_capacity(names.len());
        for name in names {
            let method =
                Method::parse(name).ok_or_else(|| Error::config("methods", format!("unknown method `{name}`")))?;
            if methods.contains(&method) {
                return Err(Error::config("methods", format!("`{name}` listed twice")));
            }
            methods.push(method);
        }
        if methods.contains(&Method::Mf) && model.medium() != Medium::Direct {
            return Err(Error::config("methods", "MF is only available for the direct medium"));
        }
        let max_dim = config.max_dim.unwrap_or(DEFAULT_MAX_DIM);
        let m = match config.m {
            None if methods.contains(&Method::Thle) => {
                return Err(Error::config("m", "missing (required for THLE)"));
            }
            None => None,
            Some(m) if m < 1 => return Err(Error::config("m", format!("must be at least 1, got {m}"))),
            Some(m) => Some(u32::try_from(m).map_err(|_| Error::config("m", "too large"))?),
        };
        if let (Some(m), true) = (m, methods.contains(&Method::Thle)) {
            let rule = TruncationRule::new(m)?;
            let dim = rule.basis_len(model.n_sites()).unwrap_or(u128::MAX);
            if dim > max_dim as u128 {
                return Err(Error::DimensionOverflow { dim, cap: max_dim });
            }
        }
        let placement = match config.placement.as_deref() {
            Some(p) => {
                Placement::parse(p).ok_or_else(|| Error::config("placement", format!("unknown placement `{p}`")))?
            }
            None => match model.medium() {
                Medium::Direct => Placement::EndsOnly,
                Medium::SideCoupled => Placement::Homogeneous,
            },
        };
        let per_site_ueff = match config.ueff_sites.as_deref() {
            None | Some("first") => false,
            Some("per-site") => true,
            Some(other) => {
                return Err(Error::config("ueff_sites", format!("expected `first` or `per-site`, got `{other}`")));
            }
        };
        let mut mean_field = MeanFieldOptions {
            uncorrected: config.mf_uncorrected.unwrap_or(false),
            ..MeanFieldOptions::default()
        };
        if let Some(r) = config.mf_relaxation {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::config("mf_relaxation", "must lie in (0, 1]"));
            }
            mean_field.relaxation = r;
        }
        Ok(SweepPlan {
            label: config.label.clone().unwrap_or_else(|| "sweep".into()),
            model,
            omega_p,
            i_in,
            methods,
            m,
            placement,
            per_site_ueff,
            mean_field,
            policy: IntegrationPolicy::default(),
            max_dim,
        })
    }

    /// All points in canonical output order: method, then intensity, then
    /// frequency.
    pub fn points(&self) -> Vec<(Method, f64, f64)> {
        let mut pts = Vec::with_capacity(self.len());
        for &method in &self.methods {
            for &i_in in &self.i_in {
                for &w in &self.omega_p {
                    pts.push((method, w, i_in));
                }
            }
        }
        pts
    }

    pub fn len(&self) -> usize {
        self.methods.len() * self.omega_p.len() * self.i_in.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Solver-specific extras carried in NDJSON output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_eff: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One solved point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub method: Method,
    pub n: usize,
    pub m: Option<u32>,
    pub omega_p: f64,
    pub i_in: f64,
    pub transmission: f64,
    pub status: Status,
    pub residual: f64,
    pub wall_time_ms: f64,
    #[serde(default)]
    pub diagnostics: Diagnostics,
}

/// Solves one point. Failures become a `Diverged` record with `NaN`
/// transmission and the error message attached.
pub fn run_point(plan: &SweepPlan, method: Method, omega_p: f64, i_in: f64) -> SweepRecord {
    let start = Instant::now();
    let mut rec = SweepRecord {
        method,
        n: plan.model.n_sites(),
        m: if method == Method::Thle { plan.m } else { None },
        omega_p,
        i_in,
        transmission: f64::NAN,
        status: Status::Diverged,
        residual: f64::NAN,
        wall_time_ms: 0.0,
        diagnostics: Diagnostics::default(),
    };
    if let Err(e) = solve_into(plan, &mut rec) {
        rec.transmission = f64::NAN;
        rec.status = Status::Diverged;
        rec.diagnostics.error = Some(e.to_string());
    }
    rec.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    rec
}

fn solve_into(plan: &SweepPlan, rec: &mut SweepRecord) -> Result<()> {
    let model = &plan.model;
    let drive = drive_from_intensity(model, rec.omega_p, rec.i_in)?;
    match rec.method {
        Method::Thle => {
            let m = plan.m.ok_or_else(|| Error::config("m", "missing (required for THLE)"))?;
            let (t, ss) = thle_transmission(model, &drive, m)?;
            rec.transmission = t;
            rec.status = Status::Converged;
            rec.residual = ss.residual;
            rec.diagnostics.condition = Some(ss.condition);
            rec.diagnostics.warnings = ss.warnings;
        }
        Method::Qca | Method::Mqca => {
            let u = if rec.method == Method::Qca {
                vec![C64::new(model.onsite_u(), 0.0); model.n_sites()]
            } else {
                let u = mqca_interaction(model, &drive, plan.placement, plan.per_site_ueff)?;
                rec.diagnostics.u_eff = Some(u[0]);
                u
            };
            let (t, st) = qca_steady(model, &drive, &u, &plan.policy)?;
            rec.transmission = t;
            rec.status = st.status;
            rec.residual = st.residual;
            rec.diagnostics.period = st.period;
        }
        Method::Mf => {
            let r = mean_field_steady(model, &drive, &plan.mean_field)?;
            rec.transmission = r.transmission;
            rec.status = r.status;
            rec.residual = r.residual;
            rec.diagnostics.iterations = Some(r.iterations);
        }
    }
    Ok(())
}

/// Canonical record order; output bytes never depend on scheduling.
pub fn sort_records(records: &mut [SweepRecord]) {
    records.sort_by(|a, b| {
        a.method
            .cmp(&b.method)
            .then(a.n.cmp(&b.n))
            .then(a.i_in.total_cmp(&b.i_in))
            .then(a.omega_p.total_cmp(&b.omega_p))
    });
}

pub fn run_sweep_sequential(plan: &SweepPlan) -> Vec<SweepRecord> {
    let mut out: Vec<SweepRecord> = plan.points().into_iter().map(|(k, w, i)| run_point(plan, k, w, i)).collect();
    sort_records(&mut out);
    out
}

#[cfg(feature = "parallel")]
pub fn run_sweep_parallel(plan: &SweepPlan) -> Vec<SweepRecord> {
    use rayon::prelude::*;
    let mut out: Vec<SweepRecord> =
        plan.points().into_par_iter().map(|(k, w, i)| run_point(plan, k, w, i)).collect();
    sort_records(&mut out);
    out
}

/// One record per (method, omega_p, I_in). Runs on the rayon pool when the
/// `parallel` feature is enabled.
pub fn run_sweep(plan: &SweepPlan) -> Vec<SweepRecord> {
    #[cfg(feature = "parallel")]
    {
        run_sweep_parallel(plan)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sweep_sequential(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Grid, PerSite};

    fn cfg() -> Config {
        Config {
            medium: Some("direct".into()),
            n: Some(1),
            m: Some(2),
            omega_q: Some(PerSite::Scalar(1.0)),
            u: Some(1.05),
            gamma_l: Some(0.02),
            gamma_r: Some(0.02),
            omega_p_grid: Some(Grid::linspace(0.95, 1.05, 5)),
            i_in_grid: Some(Grid::List(vec![1e-6, 1e-3])),
            methods: Some(vec!["THLE".into(), "QCA".into(), "MQCA".into(), "MF".into()]),
            ..Default::default()
        }
    }

    #[test]
    fn record_count_and_order() {
        let plan = SweepPlan::from_config(&cfg()).unwrap();
        let recs = run_sweep(&plan);
        assert_eq!(recs.len(), 40);
        assert_eq!(recs[0].method, Method::Thle);
        assert_eq!(recs[0].m, Some(2));
        assert_eq!(recs[39].method, Method::Mf);
        assert!(recs.iter().all(|r| r.transmission.is_finite() && r.transmission >= 0.0));
        assert!(recs.iter().filter(|r| r.method != Method::Thle).all(|r| r.m.is_none()));
    }

    #[test]
    fn sequential_matches_parallel() {
        let plan = SweepPlan::from_config(&cfg()).unwrap();
        let a = run_sweep_sequential(&plan);
        let b = run_sweep(&plan);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.method, x.omega_p, x.i_in), (y.method, y.omega_p, y.i_in));
            assert_eq!(x.transmission.to_bits(), y.transmission.to_bits());
        }
    }

    #[test]
    fn invalid_plans_rejected() {
        let mut c = cfg();
        c.m = None;
        assert!(SweepPlan::from_config(&c).unwrap_err().is_config());
        let mut c = cfg();
        c.m = Some(0);
        assert!(SweepPlan::from_config(&c).is_err());
        let mut c = cfg();
        c.methods = Some(vec!["XYZ".into()]);
        assert!(SweepPlan::from_config(&c).is_err());
        let mut c = cfg();
        c.n = Some(4);
        c.jx = Some(0.01);
        c.m = Some(6);
        c.max_dim = Some(10_000);
        assert!(matches!(SweepPlan::from_config(&c), Err(Error::DimensionOverflow { .. })));
        let mut c = cfg();
        c.medium = Some("side".into());
        c.omega_r = Some(PerSite::Scalar(1.0));
        c.g = Some(PerSite::Scalar(0.02));
        assert!(SweepPlan::from_config(&c).is_err());
    }

    #[test]
    fn failure_is_isolated() {
        let plan = SweepPlan::from_config(&cfg()).unwrap();
        let bad = run_point(&plan, Method::Thle, f64::NAN, 1e-3);
        assert_eq!(bad.status, Status::Diverged);
        assert!(bad.transmission.is_nan());
        assert!(bad.diagnostics.error.is_some());
        let good = run_point(&plan, Method::Thle, 1.0, 1e-6);
        assert!((good.transmission - 1.0).abs() < 1e-3);
    }
}
