//! Quasi-classical (QCA), modified quasi-classical (MQCA) and self-consistent
//! mean-field solvers.

pub mod mean_field;
pub mod qca;
pub mod ueff;

use serde::{Deserialize, Serialize};

pub use mean_field::{mean_field_steady, MeanFieldOptions, MeanFieldResult};
pub use qca::{
    mqca_interaction, qca_rhs, qca_steady, qca_transmission, IntegrationPolicy, SemiclassicalState,
};
pub use ueff::{ueff_direct, ueff_for_site, ueff_side};

use crate::C64;

/// Outcome of a nonlinear steady-state search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Converged,
    Oscillatory,
    Diverged,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::Oscillatory => "oscillatory",
            Status::Diverged => "diverged",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "converged" => Some(Status::Converged),
            "oscillatory" => Some(Status::Oscillatory),
            "diverged" => Some(Status::Diverged),
            _ => None,
        }
    }
}

/// Where the complex interaction is applied along a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Placement {
    /// Every site.
    #[default]
    Homogeneous,
    /// First and last site; the bulk keeps the real part.
    EndsOnly,
}

impl Placement {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "homogeneous" => Some(Placement::Homogeneous),
            "endsonly" | "ends" => Some(Placement::EndsOnly),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Placement::Homogeneous => "homogeneous",
            Placement::EndsOnly => "ends-only",
        }
    }
}

/// Complex on-site interaction and its placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexInteraction {
    pub u_eff: C64,
    pub placement: Placement,
}

impl ComplexInteraction {
    pub fn real(u: f64) -> Self {
        ComplexInteraction {
            u_eff: C64::new(u, 0.0),
            placement: Placement::Homogeneous,
        }
    }

    pub fn with_placement(self, placement: Placement) -> Self {
        ComplexInteraction { placement, ..self }
    }

    /// Interaction seen by each of `n` sites.
    pub fn site_values(&self, n: usize) -> Vec<C64> {
        (0..n)
            .map(|j| match self.placement {
                Placement::EndsOnly if j != 0 && j + 1 != n => C64::new(self.u_eff.re, 0.0),
                _ => self.u_eff,
            })
            .collect()
    }

    /// True when the imaginary part describes loss (or is zero).
    pub fn is_lossy(&self) -> bool {
        self.u_eff.im <= 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ends_only_keeps_real_bulk() {
        let u = ComplexInteraction {
            u_eff: C64::new(1.0, -0.3),
            placement: Placement::EndsOnly,
        };
        let v = u.site_values(4);
        assert_eq!(v[0], C64::new(1.0, -0.3));
        assert_eq!(v[1], C64::new(1.0, 0.0));
        assert_eq!(v[2], C64::new(1.0, 0.0));
        assert_eq!(v[3], C64::new(1.0, -0.3));
        assert_eq!(u.site_values(1), vec![C64::new(1.0, -0.3)]);
        let h = u.with_placement(Placement::Homogeneous).site_values(3);
        assert!(h.iter().all(|x| *x == C64::new(1.0, -0.3)));
    }

    #[test]
    fn parse_names() {
        assert_eq!(Placement::parse("ends-only"), Some(Placement::EndsOnly));
        assert_eq!(Placement::parse("Homogeneous"), Some(Placement::Homogeneous));
        assert_eq!(Status::parse(Status::Oscillatory.as_str()), Some(Status::Oscillatory));
    }
}
