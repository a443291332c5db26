//! Self-consistent mean-field occupations for the direct chain.

use serde::Serialize;

use super::Status;
use crate::error::{Error, Result};
use crate::lattice::{DriveSpec, LatticeModel, Medium};
use crate::linalg::solve_small;
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct MeanFieldOptions {
    /// Initial under-relaxation factor in `(0, 1]`.
    pub relaxation: f64,
    pub max_iterations: usize,
    /// Relative change in the occupations accepted as converged.
    pub tol: f64,
    /// Use the bare decoupling `U (n - 1)` instead of the corrected `2 U n`.
    pub uncorrected: bool,
}

impl Default for MeanFieldOptions {
    fn default() -> Self {
        MeanFieldOptions {
            relaxation: 0.5,
            max_iterations: 20_000,
            tol: 1e-12,
            uncorrected: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanFieldResult {
    pub occupations: Vec<f64>,
    pub amplitudes: Vec<C64>,
    pub transmission: f64,
    pub status: Status,
    pub iterations: usize,
    /// Largest relative occupation change in the last iteration.
    pub residual: f64,
}

/// Amplitudes for fixed occupations: solves the linear steady state with the
/// occupation-dependent frequency shift.
fn amplitudes(model: &LatticeModel, drive: &DriveSpec, occ: &[f64], uncorrected: bool) -> Result<Vec<C64>> {
    let n = model.n_sites();
    let det = model.detunings(drive.omega_p);
    let u = model.onsite_u();
    let hop = C64::new(0.0, 2.0 * model.hop_jx());
    let mut m = vec![vec![C64::default(); n]; n];
    for j in 0..n {
        let shift = if uncorrected { u * (occ[j] - 1.0) } else { 2.0 * u * occ[j] };
        m[j][j] = C64::new(model.site_gamma(j), det.dq[j] + shift);
        if j + 1 < n {
            m[j][j + 1] = hop;
            m[j + 1][j] = hop;
        }
    }
    let mut rhs = vec![C64::default(); n];
    rhs[0] = C64::new(0.0, -drive.omega_l);
    solve_small(&m, &rhs)
}

/// Fixed-point iteration on the site occupations starting from the empty
/// chain. The relaxation factor is halved whenever the update grows.
pub fn mean_field_steady(model: &LatticeModel, drive: &DriveSpec, opts: &MeanFieldOptions) -> Result<MeanFieldResult> {
    if model.medium() != Medium::Direct {
        return Err(Error::InvalidArgument("mean-field equations are defined for the direct medium".into()));
    }
    if !(opts.relaxation > 0.0 && opts.relaxation <= 1.0) {
        return Err(Error::InvalidArgument("relaxation must lie in (0, 1]".into()));
    }
    let n = model.n_sites();
    let mut occ = vec![0.0; n];
    let mut lambda = opts.relaxation;
    let mut last_change = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut status = Status::Oscillatory;
    let mut amps = vec![C64::default(); n];
    while iterations < opts.max_iterations {
        iterations += 1;
        amps = amplitudes(model, drive, &occ, opts.uncorrected)?;
        let new: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
        if new.iter().any(|v| !v.is_finite()) {
            status = Status::Diverged;
            break;
        }
        let scale = new.iter().chain(&occ).fold(0.0f64, |a, &b| a.max(b));
        let change = occ.iter().zip(&new).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        residual = if scale > 0.0 { change / scale } else { 0.0 };
        if residual <= opts.tol {
            occ = new;
            status = Status::Converged;
            break;
        }
        if change > last_change {
            lambda = (lambda * 0.5).max(1e-4);
        }
        last_change = change;
        for (o, v) in occ.iter_mut().zip(&new) {
            *o += lambda * (v - *o);
        }
    }
    let transmission = if drive.i_in > 0.0 {
        2.0 * model.gamma_r() * occ[n - 1] / drive.i_in
    } else {
        0.0
    };
    Ok(MeanFieldResult {
        occupations: occ,
        amplitudes: amps,
        transmission,
        status,
        iterations,
        residual,
    })
}
