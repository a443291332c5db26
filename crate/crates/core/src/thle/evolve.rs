use super::system::LinearSystem;
use crate::error::{Error, Result};
use crate::linalg::eigenvalues;
use crate::ode::{Dopri5, Tolerances};
use crate::C64;

/// Largest `Z` size for which the dense eigenvalue check is attempted.
pub const EIGEN_LIMIT: usize = 3000;

/// Integrates `dS/dt = Z S + Omega` from `s0` (zero when `None`) and returns
/// `samples + 1` equally spaced snapshots including both ends.
pub fn time_evolve(
    sys: &LinearSystem,
    s0: Option<&[C64]>,
    t_final: f64,
    samples: usize,
    tol: Tolerances,
) -> Result<Vec<(f64, Vec<C64>)>> {
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::InvalidArgument(format!("invalid final time {t_final}")));
    }
    let y0 = match s0 {
        Some(s) if s.len() != sys.dim() => {
            return Err(Error::InvalidArgument("initial state has the wrong dimension".into()))
        }
        Some(s) => s.to_vec(),
        None => vec![C64::default(); sys.dim()],
    };
    let mut ode = Dopri5::new(|_, y: &[C64], dy: &mut [C64]| sys.derivative(y, dy), 0.0, y0, tol)?;
    let samples = samples.max(1);
    let mut out = vec![(0.0, ode.y().to_vec())];
    for k in 1..=samples {
        let t = t_final * k as f64 / samples as f64;
        ode.advance_to(t)?;
        out.push((t, ode.y().to_vec()));
    }
    Ok(out)
}

/// `max Re(lambda)` over the eigenvalues of `Z` on the active subspace.
pub fn spectral_abscissa(sys: &LinearSystem) -> Result<f64> {
    let active = sys.active_indices();
    let n = active.len();
    if n > EIGEN_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "dense eigenvalue check limited to {EIGEN_LIMIT} variables"
        )));
    }
    let mut z = vec![vec![C64::default(); n]; n];
    for (r, c, v) in sys.active_triplets(&active) {
        z[r][c] += v;
    }
    Ok(eigenvalues(&z)?
        .into_iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Integration horizon after which transients have decayed by `e^{-40}` or
/// more: `max(50 / gamma, 40 / |abscissa|)`.
pub fn relaxation_time(sys: &LinearSystem, gamma: f64) -> Result<f64> {
    let a = spectral_abscissa(sys)?;
    if a >= 0.0 {
        return Err(Error::Numerical(format!("Z is not stable (spectral abscissa {a:e})")));
    }
    Ok((50.0 / gamma).max(40.0 / a.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeModel;
    use crate::thle::{assemble_linear_system, steady_state};
    use crate::drive_from_intensity;

    #[test]
    fn undriven_trajectory_stays_zero() {
        let model = LatticeModel::direct(vec![1.0], 1.05, 0.0, 0.02, 0.02).unwrap();
        let drive = drive_from_intensity(&model, 1.0, 0.0).unwrap();
        let sys = assemble_linear_system(&model, &drive, 2).unwrap();
        let traj = time_evolve(&sys, None, 100.0, 4, Tolerances::default()).unwrap();
        assert_eq!(traj.len(), 5);
        assert!(traj.iter().all(|(_, s)| s.iter().all(|v| *v == C64::default())));
    }

    #[test]
    fn long_time_limit_is_the_steady_state() {
        let model = LatticeModel::direct(vec![1.0], 1.05, 0.0, 0.02, 0.02).unwrap();
        let drive = drive_from_intensity(&model, 0.98, 1e-3).unwrap();
        let sys = assemble_linear_system(&model, &drive, 3).unwrap();
        let ss = steady_state(&sys).unwrap();
        let t = relaxation_time(&sys, 0.04).unwrap();
        let traj = time_evolve(&sys, None, t, 1, Tolerances::default()).unwrap();
        let last = &traj[1].1;
        for (a, b) in last.iter().zip(&ss.values) {
            assert!((a - b).norm() < 1e-8);
        }
    }
}
