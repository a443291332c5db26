use serde::Serialize;

use super::system::LinearSystem;
use crate::algebra::{NormalMonomial, TruncationRule};
use crate::error::Result;
use crate::linalg::{matrix_norm1, norm_inf, Factorization};
use crate::C64;

/// Relative residual accepted without refinement warnings.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Condition numbers above this attach a warning.
pub const CONDITION_WARN: f64 = 1e12;

/// Steady-state expectation values over the truncated basis.
#[derive(Debug, Clone, Serialize)]
pub struct SteadyState {
    #[serde(skip)]
    trunc: TruncationRule,
    n_sites: usize,
    pub values: Vec<C64>,
    /// `||Z S + Omega||_inf / (||Z||_1 ||S||_inf + ||Omega||_inf)`.
    pub residual: f64,
    /// 1-norm condition estimate of `Z` (zero when not computed).
    pub condition: f64,
    pub warnings: Vec<String>,
}

impl SteadyState {
    pub fn truncation(&self) -> TruncationRule {
        self.trunc
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// `<mono>`; the identity evaluates to one.
    pub fn expectation(&self, mono: &NormalMonomial) -> Option<C64> {
        if mono.n_sites() != self.n_sites {
            return None;
        }
        if mono.is_identity() {
            return Some(C64::new(1.0, 0.0));
        }
        self.trunc.index_of(mono).map(|i| self.values[i])
    }

    /// `<b_i^dag b_i>` (real part).
    pub fn occupation(&self, site: usize) -> f64 {
        self.expectation(&NormalMonomial::site(self.n_sites, site, 1, 1))
            .map(|v| v.re)
            .unwrap_or(0.0)
    }

    /// `<b_i>`.
    pub fn amplitude(&self, site: usize) -> C64 {
        self.expectation(&NormalMonomial::annihilation(self.n_sites, site))
            .unwrap_or_default()
    }
}

fn residual(sys: &LinearSystem, x: &[C64], znorm: f64) -> (Vec<C64>, f64) {
    let mut r = vec![C64::default(); x.len()];
    sys.derivative(x, &mut r);
    let scale = znorm * norm_inf(x) + norm_inf(sys.omega());
    let rel = if scale > 0.0 { norm_inf(&r) / scale } else { norm_inf(&r) };
    (r, rel)
}

/// `S = -Z^{-1} Omega` with one round of iterative refinement when the
/// residual exceeds [`RESIDUAL_TOL`].
pub fn steady_state(sys: &LinearSystem) -> Result<SteadyState> {
    let active = sys.active_indices();
    let n = active.len();
    let trips = sys.active_triplets(&active);
    let znorm = matrix_norm1(n, &trips);
    let fac = Factorization::auto(n, &trips)?;
    let rhs: Vec<C64> = active.iter().map(|&i| -sys.omega()[i]).collect();
    let sol = fac.solve(&rhs)?;
    let mut x = vec![C64::default(); sys.dim()];
    for (&i, v) in active.iter().zip(sol) {
        x[i] = v;
    }
    let (mut r, mut rel) = residual(sys, &x, znorm);
    for _ in 0..2 {
        if rel <= RESIDUAL_TOL {
            break;
        }
        let neg: Vec<C64> = active.iter().map(|&i| -r[i]).collect();
        let dx = fac.solve(&neg)?;
        for (&i, d) in active.iter().zip(dx) {
            x[i] += d;
        }
        (r, rel) = residual(sys, &x, znorm);
    }
    let condition = znorm * fac.inverse_norm1_estimate(n)?;
    let mut warnings = Vec::new();
    if rel > RESIDUAL_TOL {
        warnings.push(format!("relative residual {rel:.3e} above {RESIDUAL_TOL:e}"));
    }
    if condition > CONDITION_WARN {
        warnings.push(format!("condition estimate {condition:.3e} above {CONDITION_WARN:e}"));
    }
    let ss = SteadyState {
        trunc: sys.truncation(),
        n_sites: sys.n_sites(),
        values: x,
        residual: rel,
        condition,
        warnings,
    };
    let mut ss = ss;
    let physical = physicality_warnings(&ss);
    ss.warnings.extend(physical);
    Ok(ss)
}

fn physicality_warnings(ss: &SteadyState) -> Vec<String> {
    let tol = 1e-8;
    let mut out = Vec::new();
    for i in 0..ss.n_sites {
        let n = ss
            .expectation(&NormalMonomial::site(ss.n_sites, i, 1, 1))
            .unwrap_or_default();
        let scale = n.norm().max(1.0);
        if n.im.abs() > tol * scale || n.re < -tol {
            out.push(format!("site {} occupation {n} is not a nonnegative real", i + 1));
        }
        let b = ss.amplitude(i);
        if b.norm_sqr() > n.re + tol * scale {
            out.push(format!("site {}: |<b>|^2 exceeds <b^dag b>", i + 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeModel;
    use crate::thle::assemble_linear_system;
    use crate::drive_from_intensity;

    #[test]
    fn zero_drive_gives_zero_state() {
        let model = LatticeModel::direct(vec![1.0], 1.05, 0.0, 0.02, 0.02).unwrap();
        let drive = drive_from_intensity(&model, 1.0, 0.0).unwrap();
        let ss = steady_state(&assemble_linear_system(&model, &drive, 3).unwrap()).unwrap();
        assert!(ss.values.iter().all(|v| *v == C64::default()));
        assert!(ss.warnings.is_empty());
    }

    #[test]
    fn weak_drive_occupation() {
        let model = LatticeModel::direct(vec![1.0], 1.05, 0.0, 0.02, 0.02).unwrap();
        let drive = drive_from_intensity(&model, 1.0, 1e-8).unwrap();
        let ss = steady_state(&assemble_linear_system(&model, &drive, 2).unwrap()).unwrap();
        let expected = drive.omega_l.powi(2) / 0.04f64.powi(2);
        assert!((ss.occupation(0) - expected).abs() / expected < 1e-6);
        assert!(ss.residual < RESIDUAL_TOL);
    }

    #[test]
    fn conjugate_pairs_are_conjugate() {
        let model = LatticeModel::direct(vec![1.0, 1.01], 1.05, 0.01, 0.02, 0.02).unwrap();
        let drive = drive_from_intensity(&model, 0.99, 0.01).unwrap();
        let sys = assemble_linear_system(&model, &drive, 2).unwrap();
        let ss = steady_state(&sys).unwrap();
        for (i, op) in sys.basis().iter().enumerate() {
            let j = sys.index_of(&op.dagger()).unwrap();
            assert!((ss.values[j] - ss.values[i].conj()).norm() < 1e-10, "{op}");
        }
        assert!(ss.warnings.is_empty(), "{:?}", ss.warnings);
    }
}
