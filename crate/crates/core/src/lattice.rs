//! Physical configuration of the two lattice media and the drive.

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Medium {
    /// Qubits with nearest-neighbour hopping, baths on the end qubits.
    Direct,
    /// Hopping resonators, one qubit side-coupled to each, baths on the end
    /// resonators.
    SideCoupled,
}

impl Medium {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "direct" | "direct-coupled" => Some(Medium::Direct),
            "side" | "side-coupled" | "sidecoupled" => Some(Medium::SideCoupled),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Medium::Direct => "direct",
            Medium::SideCoupled => "side",
        }
    }
}

/// Immutable lattice description. Frequencies and rates are in units of the
/// reference qubit frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeModel {
    medium: Medium,
    qubit_freq: Vec<f64>,
    resonator_freq: Vec<f64>,
    onsite_u: f64,
    hop_jx: f64,
    qr_coupling: Vec<f64>,
    gamma_l: f64,
    gamma_r: f64,
}

impl LatticeModel {
    pub fn direct(qubit_freq: Vec<f64>, u: f64, jx: f64, gamma_l: f64, gamma_r: f64) -> Result<Self> {
        let model = LatticeModel {
            medium: Medium::Direct,
            qubit_freq,
            resonator_freq: Vec::new(),
            onsite_u: u,
            hop_jx: jx,
            qr_coupling: Vec::new(),
            gamma_l,
            gamma_r,
        };
        model.validate()?;
        Ok(model)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn side_coupled(
        qubit_freq: Vec<f64>,
        resonator_freq: Vec<f64>,
        g: Vec<f64>,
        u: f64,
        jx: f64,
        gamma_l: f64,
        gamma_r: f64,
    ) -> Result<Self> {
        let model = LatticeModel {
            medium: Medium::SideCoupled,
            qubit_freq,
            resonator_freq,
            onsite_u: u,
            hop_jx: jx,
            qr_coupling: g,
            gamma_l,
            gamma_r,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let n = self.qubit_freq.len();
        if n == 0 {
            return Err(Error::config("n", "lattice needs at least one site"));
        }
        let nonneg = |key: &str, v: f64| -> Result<()> {
            if !v.is_finite() || v < 0.0 {
                Err(Error::config(key, format!("must be finite and nonnegative, got {v}")))
            } else {
                Ok(())
            }
        };
        for &w in &self.qubit_freq {
            nonneg("omega_q", w)?;
        }
        nonneg("u", self.onsite_u)?;
        nonneg("jx", self.hop_jx)?;
        nonneg("gamma_l", self.gamma_l)?;
        nonneg("gamma_r", self.gamma_r)?;
        match self.medium {
            Medium::Direct => {
                if !self.resonator_freq.is_empty() {
                    return Err(Error::config("omega_r", "not allowed for the direct medium"));
                }
                if !self.qr_coupling.is_empty() {
                    return Err(Error::config("g", "not allowed for the direct medium"));
                }
            }
            Medium::SideCoupled => {
                if self.resonator_freq.len() != n {
                    return Err(Error::config("omega_r", format!("expected {n} values")));
                }
                if self.qr_coupling.len() != n {
                    return Err(Error::config("g", format!("expected {n} values")));
                }
                for &w in &self.resonator_freq {
                    nonneg("omega_r", w)?;
                }
                for &g in &self.qr_coupling {
                    nonneg("g", g)?;
                }
            }
        }
        Ok(())
    }

    pub fn medium(&self) -> Medium {
        self.medium
    }

    pub fn n_sites(&self) -> usize {
        self.qubit_freq.len()
    }

    pub fn qubit_freq(&self) -> &[f64] {
        &self.qubit_freq
    }

    /// Empty for the direct medium.
    pub fn resonator_freq(&self) -> &[f64] {
        &self.resonator_freq
    }

    /// Empty for the direct medium.
    pub fn qr_coupling(&self) -> &[f64] {
        &self.qr_coupling
    }

    pub fn onsite_u(&self) -> f64 {
        self.onsite_u
    }

    /// Half the inter-site hopping; the Hamiltonian carries `2 * jx`.
    pub fn hop_jx(&self) -> f64 {
        self.hop_jx
    }

    pub fn gamma_l(&self) -> f64 {
        self.gamma_l
    }

    pub fn gamma_r(&self) -> f64 {
        self.gamma_r
    }

    /// `gamma_l + gamma_r`.
    pub fn gamma_total(&self) -> f64 {
        self.gamma_l + self.gamma_r
    }

    /// Bath coupling rate attached to site `i` (0-based): `gamma_l` on the
    /// first site, `gamma_r` on the last, both on a single site, zero in the
    /// bulk.
    pub fn site_gamma(&self, i: usize) -> f64 {
        let n = self.n_sites();
        let mut g = 0.0;
        if i == 0 {
            g += self.gamma_l;
        }
        if i + 1 == n {
            g += self.gamma_r;
        }
        g
    }

    pub fn detunings(&self, omega_p: f64) -> Detunings {
        let dq: Vec<f64> = self.qubit_freq.iter().map(|w| w - omega_p).collect();
        let dr: Vec<f64> = self.resonator_freq.iter().map(|w| w - omega_p).collect();
        let a = dr
            .iter()
            .enumerate()
            .map(|(i, &d)| C64::new(self.site_gamma(i), d))
            .collect();
        Detunings { dq, dr, a }
    }

    /// Copy with every frequency and rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let s = |v: &[f64]| v.iter().map(|x| x * factor).collect::<Vec<_>>();
        let model = LatticeModel {
            medium: self.medium,
            qubit_freq: s(&self.qubit_freq),
            resonator_freq: s(&self.resonator_freq),
            onsite_u: self.onsite_u * factor,
            hop_jx: self.hop_jx * factor,
            qr_coupling: s(&self.qr_coupling),
            gamma_l: self.gamma_l * factor,
            gamma_r: self.gamma_r * factor,
        };
        model.validate()?;
        Ok(model)
    }

    /// Copy with a different on-site interaction.
    pub fn with_u(&self, u: f64) -> Result<Self> {
        let mut m = self.clone();
        m.onsite_u = u;
        m.validate()?;
        Ok(m)
    }

    /// Copy with different resonator-qubit couplings (side-coupled only).
    pub fn with_coupling(&self, g: Vec<f64>) -> Result<Self> {
        let mut m = self.clone();
        m.qr_coupling = g;
        m.validate()?;
        Ok(m)
    }
}

/// Detunings from the drive frequency and the complex resonator elimination
/// constants `A_i = i dr_i + Gamma_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Detunings {
    pub dq: Vec<f64>,
    pub dr: Vec<f64>,
    pub a: Vec<C64>,
}

/// Coherent drive from the left bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub omega_p: f64,
    pub i_in: f64,
    /// Rabi frequency `sqrt(2 gamma_l i_in)`.
    pub omega_l: f64,
}

pub fn drive_from_intensity(model: &LatticeModel, omega_p: f64, i_in: f64) -> Result<DriveSpec> {
    if !i_in.is_finite() || i_in < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "input intensity must be finite and nonnegative, got {i_in}"
        )));
    }
    if !omega_p.is_finite() {
        return Err(Error::InvalidArgument("drive frequency must be finite".into()));
    }
    Ok(DriveSpec {
        omega_p,
        i_in,
        omega_l: (2.0 * model.gamma_l() * i_in).sqrt(),
    })
}

/// Builds a validated model from the flat configuration.
pub fn build_model(config: &Config) -> Result<LatticeModel> {
    let medium_str = config
        .medium
        .as_deref()
        .ok_or_else(|| Error::config("medium", "missing"))?;
    let medium = Medium::parse(medium_str)
        .ok_or_else(|| Error::config("medium", format!("unknown medium `{medium_str}`")))?;
    let n = config.n.ok_or_else(|| Error::config("n", "missing"))?;
    if n < 1 {
        return Err(Error::config("n", format!("must be at least 1, got {n}")));
    }
    let n = n as usize;
    let omega_q = config
        .omega_q
        .as_ref()
        .ok_or_else(|| Error::config("omega_q", "missing"))?
        .expand("omega_q", n)?;
    let u = config.u.ok_or_else(|| Error::config("u", "missing"))?;
    let gamma_l = config.gamma_l.ok_or_else(|| Error::config("gamma_l", "missing"))?;
    let gamma_r = config.gamma_r.ok_or_else(|| Error::config("gamma_r", "missing"))?;
    let jx = match config.jx {
        Some(j) => j,
        None if n == 1 => 0.0,
        None => return Err(Error::config("jx", "missing (required when n > 1)")),
    };
    match medium {
        Medium::Direct => {
            if config.omega_r.is_some() {
                return Err(Error::config("omega_r", "not allowed for the direct medium"));
            }
            if config.g.is_some() {
                return Err(Error::config("g", "not allowed for the direct medium"));
            }
            LatticeModel::direct(omega_q, u, jx, gamma_l, gamma_r)
        }
        Medium::SideCoupled => {
            let omega_r = config
                .omega_r
                .as_ref()
                .ok_or_else(|| Error::config("omega_r", "missing"))?
                .expand("omega_r", n)?;
            let g = config
                .g
                .as_ref()
                .ok_or_else(|| Error::config("g", "missing"))?
                .expand("g", n)?;
            LatticeModel::side_coupled(omega_q, omega_r, g, u, jx, gamma_l, gamma_r)
        }
    }
}
