//! Self-checks runnable from the command line: symbolic algebra against a
//! Fock-matrix oracle, weak-drive closed forms, truncation convergence and
//! low-intensity agreement between methods.

pub mod oracle;

use std::fmt;

use serde::Serialize;

pub use oracle::oracle_max_error;

use crate::error::{Error, Result};
use crate::lattice::{drive_from_intensity, LatticeModel};
use crate::semiclassical::{
    mean_field_steady, mqca_interaction, qca_steady, qca_transmission, IntegrationPolicy, MeanFieldOptions,
    Placement,
};
use crate::thle::{assemble_linear_system, steady_state, thle_transmission, time_evolve};
use crate::ode::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    AlgebraOracle,
    WeakDrive,
    Convergence,
    CrossMethod,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::AlgebraOracle, Suite::WeakDrive, Suite::Convergence, Suite::CrossMethod];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "algebra-oracle" => Some(Suite::AlgebraOracle),
            "weak-drive" => Some(Suite::WeakDrive),
            "convergence" => Some(Suite::Convergence),
            "cross-method" => Some(Suite::CrossMethod),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::AlgebraOracle => "algebra-oracle",
            Suite::WeakDrive => "weak-drive",
            Suite::Convergence => "convergence",
            Suite::CrossMethod => "cross-method",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}/{}: measured {:.3e} (limit {:.1e})",
                if c.passed { "PASS" } else { "FAIL" },
                self.suite,
                c.name,
                c.measured,
                c.tolerance
            )?;
        }
        Ok(())
    }
}

const GAMMA: f64 = 0.02;
const U: f64 = 1.05;

fn single_direct() -> Result<LatticeModel> {
    LatticeModel::direct(vec![1.0], U, 0.0, GAMMA, GAMMA)
}

fn single_side(g: f64) -> Result<LatticeModel> {
    LatticeModel::side_coupled(vec![1.0], vec![1.0], vec![g], U, 0.0, GAMMA, GAMMA)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn run_suite(suite: Suite) -> Result<Report> {
    let checks = match suite {
        Suite::AlgebraOracle => algebra_oracle()?,
        Suite::WeakDrive => weak_drive()?,
        Suite::Convergence => convergence()?,
        Suite::CrossMethod => cross_method()?,
    };
    Ok(Report {
        suite: suite.as_str().to_owned(),
        checks,
    })
}

fn algebra_oracle() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=2usize {
        for m in 1..=2u32 {
            let direct =
                LatticeModel::direct(vec![1.0, 1.02][..n].to_vec(), U, 0.013, GAMMA, 0.03)?;
            let d = drive_from_intensity(&direct, 0.97, 0.01)?;
            out.push(Check::at_most(format!("direct N={n} m={m}"), oracle_max_error(&direct, &d, m)?, 1e-12));
            let side = LatticeModel::side_coupled(
                vec![1.0, 0.98][..n].to_vec(),
                vec![1.0, 1.01][..n].to_vec(),
                vec![0.02, 0.05][..n].to_vec(),
                U,
                0.01,
                GAMMA,
                0.03,
            )?;
            let d = drive_from_intensity(&side, 0.99, 0.034)?;
            out.push(Check::at_most(format!("side N={n} m={m}"), oracle_max_error(&side, &d, m)?, 1e-12));
        }
    }
    Ok(out)
}

fn weak_drive() -> Result<Vec<Check>> {
    let i_in = 1e-8;
    let model = single_direct()?;
    let res = drive_from_intensity(&model, 1.0, i_in)?;
    let (t, _) = thle_transmission(&model, &res, 4)?;
    let mut out = vec![Check::at_most("direct resonant |T-1|", (t - 1.0).abs(), 1e-3)];
    let gamma = 2.0 * GAMMA;
    let mut worst: f64 = 0.0;
    for w in linspace(0.9, 1.1, 41) {
        let d = drive_from_intensity(&model, w, i_in)?;
        let (t, _) = thle_transmission(&model, &d, 4)?;
        let lorentz = 4.0 * GAMMA * GAMMA / ((1.0 - w).powi(2) + gamma * gamma);
        worst = worst.max((t - lorentz).abs());
    }
    out.push(Check::at_most("direct Lorentzian line", worst, 1e-3));
    let side = single_side(0.02)?;
    let d = drive_from_intensity(&side, 1.0, i_in)?;
    let (t, _) = thle_transmission(&side, &d, 4)?;
    out.push(Check::at_most("side T at qubit frequency", t, 1e-3));
    Ok(out)
}

/// Successive truncation differences `|T(m) - T(m+1)|` for `m = 2..=5`.
pub fn truncation_differences(model: &LatticeModel, omega_p: f64, i_in: f64) -> Result<Vec<f64>> {
    let d = drive_from_intensity(model, omega_p, i_in)?;
    let ts: Vec<f64> = (2..=6u32)
        .map(|m| thle_transmission(model, &d, m).map(|r| r.0))
        .collect::<Result<_>>()?;
    Ok(ts.windows(2).map(|w| (w[1] - w[0]).abs()).collect())
}

/// Differences below this are rounding noise and count as converged.
pub const CONVERGED_FLOOR: f64 = 1e-12;

/// Largest growth between successive truncation differences, ignoring
/// differences already below [`CONVERGED_FLOOR`].
pub fn monotone_violation(diffs: &[f64]) -> f64 {
    diffs
        .windows(2)
        .map(|w| if w[1] <= CONVERGED_FLOOR { 0.0 } else { (w[1] - w[0]).max(0.0) })
        .fold(0.0, f64::max)
}

/// Largest per-component gap between the linear steady state and a long
/// time integration from the vacuum.
pub fn steady_vs_evolution(model: &LatticeModel, omega_p: f64, i_in: f64, m: u32) -> Result<f64> {
    let d = drive_from_intensity(model, omega_p, i_in)?;
    let sys = assemble_linear_system(model, &d, m)?;
    let ss = steady_state(&sys)?;
    let t_final = crate::thle::relaxation_time(&sys, model.gamma_total())?;
    let tol = Tolerances {
        rtol: 1e-12,
        atol: 1e-16,
        ..Tolerances::default()
    };
    let traj = time_evolve(&sys, None, t_final, 1, tol)?;
    let last = &traj.last().ok_or_else(|| Error::Numerical("empty trajectory".into()))?.1;
    Ok(last.iter().zip(&ss.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

fn convergence() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let model = single_direct()?;
    for w in [0.97, 1.0, 1.03] {
        let diffs = truncation_differences(&model, w, 1.5e-4)?;
        out.push(Check::at_most(format!("direct w={w} truncation differences nonincreasing"), monotone_violation(&diffs), 0.0));
        out.push(Check::at_most(format!("direct w={w} |T(5)-T(6)|"), diffs[3], 1e-6));
    }
    out.push(Check::at_most(
        "direct steady state vs time evolution",
        steady_vs_evolution(&model, 1.0, 1.5e-4, 3)?,
        1e-8,
    ));
    out.push(Check::at_most(
        "side steady state vs time evolution",
        steady_vs_evolution(&single_side(0.02)?, 0.98, 0.034, 6)?,
        1e-8,
    ));
    Ok(out)
}

/// Largest pairwise transmission gap between THLE, QCA, MQCA (and MF for the
/// direct medium) over `grid`.
pub fn cross_method_gap(model: &LatticeModel, grid: &[f64], i_in: f64, m: u32) -> Result<f64> {
    let policy = IntegrationPolicy::default();
    let mut worst: f64 = 0.0;
    for &w in grid {
        let d = drive_from_intensity(model, w, i_in)?;
        let mut ts = vec![thle_transmission(model, &d, m)?.0, qca_transmission(model, &d, &policy)?.0];
        let u = mqca_interaction(model, &d, Placement::Homogeneous, false)?;
        ts.push(qca_steady(model, &d, &u, &policy)?.0);
        if model.medium() == crate::lattice::Medium::Direct {
            ts.push(mean_field_steady(model, &d, &MeanFieldOptions::default())?.transmission);
        }
        for a in &ts {
            for b in &ts {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok(worst)
}

fn cross_method() -> Result<Vec<Check>> {
    let grid = linspace(0.9, 1.1, 81);
    Ok(vec![
        Check::at_most("direct N=1 at I=1.12e-6", cross_method_gap(&single_direct()?, &grid, 1.12e-6, 3)?, 1e-3),
        Check::at_most("side N=1 at I=1.12e-6", cross_method_gap(&single_side(0.02)?, &grid, 1.12e-6, 3)?, 1e-3),
    ])
}
