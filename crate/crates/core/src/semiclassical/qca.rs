//! Quasi-classical amplitude equations and their long-time solution.

use serde::Serialize;

use super::{ueff_for_site, ComplexInteraction, Placement, Status};
use crate::error::{Error, Result};
use crate::lattice::{DriveSpec, LatticeModel, Medium};
use crate::linalg::{eigenvalues, norm_inf, solve_small};
use crate::ode::{Dopri5, Tolerances};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Time-integration controls. Times are in units of the inverse reference
/// frequency.
#[derive(Debug, Clone, Copy)]
pub struct IntegrationPolicy {
    /// Integration horizon; `None` picks `5000 / Gamma * max(1, N / 10)`.
    pub t_max: Option<f64>,
    pub tol: Tolerances,
    /// Steady when `||rhs||_inf < steady_tol * max(1, ||x||_inf)` in units of
    /// the drive.
    pub steady_tol: f64,
    /// Derivative level at which a Newton polish is attempted.
    pub newton_trigger: f64,
    /// Number of detected periods averaged for oscillatory solutions.
    pub periods: usize,
    /// Scaled amplitude above which the run is declared divergent.
    pub divergence: f64,
}

impl Default for IntegrationPolicy {
    fn default() -> Self {
        IntegrationPolicy {
            t_max: None,
            tol: Tolerances {
                rtol: 1e-9,
                atol: 1e-12,
                ..Tolerances::default()
            },
            steady_tol: 1e-10,
            newton_trigger: 1e-5,
            periods: 20,
            divergence: 1e10,
        }
    }
}

/// Per-site amplitudes and solver outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SemiclassicalState {
    /// Qubit amplitudes `beta_j`.
    pub beta: Vec<C64>,
    /// Resonator amplitudes `alpha_j`; empty for the direct medium.
    pub alpha: Vec<C64>,
    pub status: Status,
    /// Time-averaged transmission, set for oscillatory solutions.
    pub averaged_t: Option<f64>,
    /// Detected oscillation period.
    pub period: Option<f64>,
    /// Scaled derivative norm at termination.
    pub residual: f64,
    /// Integration time used.
    pub t_end: f64,
}

/// Amplitude equations in units of the drive, `x = state / Omega_L`, so that
/// the inhomogeneity is `-i` on the first (resonator or qubit) site.
struct Scaled {
    n: usize,
    side: bool,
    dq: Vec<f64>,
    dr: Vec<f64>,
    gamma: Vec<f64>,
    hop: f64,
    g: Vec<f64>,
    /// `U_j Omega_L^2`, or `U_j` when unscaled.
    u: Vec<C64>,
    /// Inhomogeneity amplitude: 1 when scaled, `Omega_L` otherwise.
    drive: f64,
}

impl Scaled {
    fn new(model: &LatticeModel, drive: &DriveSpec, u: &[C64]) -> Result<Self> {
        Self::build(model, drive, u, true)
    }

    fn build(model: &LatticeModel, drive: &DriveSpec, u: &[C64], scaled: bool) -> Result<Self> {
        let n = model.n_sites();
        if u.len() != n {
            return Err(Error::InvalidArgument(format!("expected {n} interaction values, got {}", u.len())));
        }
        let det = model.detunings(drive.omega_p);
        let w2 = if scaled { drive.omega_l * drive.omega_l } else { 1.0 };
        Ok(Scaled {
            n,
            side: model.medium() == Medium::SideCoupled,
            dq: det.dq,
            dr: det.dr,
            gamma: (0..n).map(|i| model.site_gamma(i)).collect(),
            hop: 2.0 * model.hop_jx(),
            g: model.qr_coupling().to_vec(),
            u: u.iter().map(|v| v * w2).collect(),
            drive: if scaled { 1.0 } else { drive.omega_l },
        })
    }

    fn dim(&self) -> usize {
        if self.side {
            2 * self.n
        } else {
            self.n
        }
    }

    /// Index of the output amplitude.
    fn output(&self) -> usize {
        self.n - 1
    }

    fn rhs(&self, x: &[C64], out: &mut [C64]) {
        let n = self.n;
        let hop = |v: &[C64], j: usize| {
            let mut s = C64::default();
            if j > 0 {
                s += v[j - 1];
            }
            if j + 1 < n {
                s += v[j + 1];
            }
            s
        };
        if self.side {
            let (a, b) = x.split_at(n);
            let (da, db) = out.split_at_mut(n);
            for j in 0..n {
                da[j] = -C64::new(self.gamma[j], self.dr[j]) * a[j] - I * self.hop * hop(a, j) - I * self.g[j] * b[j];
                db[j] = -I * self.dq[j] * b[j] - 2.0 * I * self.u[j] * b[j].norm_sqr() * b[j] - I * self.g[j] * a[j];
            }
            da[0] -= I * self.drive;
        } else {
            for j in 0..n {
                out[j] = -C64::new(self.gamma[j], self.dq[j]) * x[j]
                    - 2.0 * I * self.u[j] * x[j].norm_sqr() * x[j]
                    - I * self.hop * hop(x, j);
            }
            out[0] -= I * self.drive;
        }
    }

    /// Wirtinger derivatives `(df/dz, df/dz*)` as dense complex matrices.
    fn wirtinger(&self, x: &[C64]) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
        let d = self.dim();
        let n = self.n;
        let mut a = vec![vec![C64::default(); d]; d];
        let mut b = vec![vec![C64::default(); d]; d];
        let off = if self.side { n } else { 0 };
        for j in 0..n {
            let q = off + j;
            let z = x[q];
            a[q][q] = -4.0 * I * self.u[j] * z.norm_sqr();
            b[q][q] = -2.0 * I * self.u[j] * z * z;
            if self.side {
                a[j][j] = -C64::new(self.gamma[j], self.dr[j]);
                a[q][q] += -I * self.dq[j];
                a[j][q] = -I * self.g[j];
                a[q][j] = -I * self.g[j];
            } else {
                a[q][q] += -C64::new(self.gamma[j], self.dq[j]);
            }
            if j + 1 < n {
                a[j][j + 1] = -I * self.hop;
                a[j + 1][j] = -I * self.hop;
            }
        }
        (a, b)
    }

    /// Real `2d x 2d` Jacobian in `(Re z, Im z)` coordinates.
    fn real_jacobian(&self, x: &[C64]) -> Vec<Vec<C64>> {
        let d = self.dim();
        let (a, b) = self.wirtinger(x);
        let mut j = vec![vec![C64::default(); 2 * d]; 2 * d];
        for p in 0..d {
            for q in 0..d {
                let dx = a[p][q] + b[p][q];
                let dy = I * (a[p][q] - b[p][q]);
                j[p][q] = C64::new(dx.re, 0.0);
                j[p][d + q] = C64::new(dy.re, 0.0);
                j[d + p][q] = C64::new(dx.im, 0.0);
                j[d + p][d + q] = C64::new(dy.im, 0.0);
            }
        }
        j
    }

    fn scaled_residual(&self, x: &[C64]) -> f64 {
        let mut f = vec![C64::default(); x.len()];
        self.rhs(x, &mut f);
        norm_inf(&f) / norm_inf(x).max(1.0)
    }

    /// Newton iteration from `x0`; returns the root if it converges.
    fn newton(&self, x0: &[C64], tol: f64) -> Option<Vec<C64>> {
        let d = self.dim();
        let mut x = x0.to_vec();
        let mut f = vec![C64::default(); d];
        for _ in 0..50 {
            self.rhs(&x, &mut f);
            if norm_inf(&f) < tol * norm_inf(&x).max(1.0) {
                return Some(x);
            }
            let jac = self.real_jacobian(&x);
            let rhs: Vec<C64> = f.iter().map(|v| C64::new(-v.re, 0.0)).chain(f.iter().map(|v| C64::new(-v.im, 0.0))).collect();
            let step = solve_small(&jac, &rhs).ok()?;
            for k in 0..d {
                x[k] += C64::new(step[k].re, step[d + k].re);
            }
            if x.iter().any(|v| !v.is_finite()) {
                return None;
            }
        }
        self.rhs(&x, &mut f);
        (norm_inf(&f) < tol * norm_inf(&x).max(1.0)).then_some(x)
    }

    /// Largest real part of the Jacobian spectrum at `x`.
    fn stability(&self, x: &[C64]) -> Option<f64> {
        let ev = eigenvalues(&self.real_jacobian(x)).ok()?;
        Some(ev.into_iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max))
    }

    /// Frequency scale used to choose the sampling step.
    fn frequency_scale(&self, x: &[C64]) -> f64 {
        let off = if self.side { self.n } else { 0 };
        (0..self.n)
            .map(|j| {
                self.dq[j].abs()
                    + self.dr.get(j).map_or(0.0, |d| d.abs())
                    + self.gamma[j]
                    + 2.0 * self.hop
                    + self.g.get(j).copied().unwrap_or(0.0)
                    + 4.0 * self.u[j].norm() * x[off + j].norm_sqr()
            })
            .fold(0.0, f64::max)
    }
}

/// Right-hand side of the amplitude equations in physical units. `state`
/// holds `beta` (direct) or `alpha` followed by `beta` (side-coupled); `u`
/// holds one interaction value per site.
pub fn qca_rhs(state: &[C64], model: &LatticeModel, drive: &DriveSpec, u: &[C64]) -> Result<Vec<C64>> {
    let sys = Scaled::build(model, drive, u, false)?;
    if state.len() != sys.dim() {
        return Err(Error::InvalidArgument(format!("state must have {} entries", sys.dim())));
    }
    let mut out = vec![C64::default(); state.len()];
    sys.rhs(state, &mut out);
    Ok(out)
}

fn transmission_of(model: &LatticeModel, x_out: C64) -> f64 {
    // 2 Gamma_R |Omega x|^2 / I_in with Omega^2 = 2 Gamma_L I_in
    4.0 * model.gamma_l() * model.gamma_r() * x_out.norm_sqr()
}

fn finish(model: &LatticeModel, sys: &Scaled, drive: &DriveSpec, x: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let w = drive.omega_l;
    let scaled: Vec<C64> = x.iter().map(|v| v * w).collect();
    if sys.side {
        let (a, b) = scaled.split_at(model.n_sites());
        (b.to_vec(), a.to_vec())
    } else {
        (scaled, Vec::new())
    }
}

/// Period from mean up-crossings of a uniformly sampled signal, accepted when
/// the crossing intervals agree within 5% and the autocorrelation at that lag
/// exceeds 0.9.
fn detect_period(samples: &[f64], dt: f64) -> Option<f64> {
    let n = samples.len();
    if n < 16 {
        return None;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n as f64;
    if var <= 1e-24 * mean.abs().max(1e-300).powi(2) {
        return None;
    }
    let mut ups = Vec::new();
    for k in 1..n {
        let (a, b) = (samples[k - 1] - mean, samples[k] - mean);
        if a < 0.0 && b >= 0.0 {
            ups.push((k - 1) as f64 + a / (a - b));
        }
    }
    if ups.len() < 4 {
        return None;
    }
    let intervals: Vec<f64> = ups.windows(2).map(|w| w[1] - w[0]).collect();
    let avg = intervals.iter().sum::<f64>() / intervals.len() as f64;
    if intervals.iter().any(|&i| (i - avg).abs() > 0.05 * avg) {
        return None;
    }
    let lag = avg.round() as usize;
    if lag == 0 || lag >= n / 2 {
        return None;
    }
    let ac: f64 = (0..n - lag)
        .map(|k| (samples[k] - mean) * (samples[k + lag] - mean))
        .sum::<f64>()
        / ((n - lag) as f64 * var);
    (ac > 0.9).then_some(avg * dt)
}

/// Integrates from the zero state and returns the long-time transmission with
/// the final state. `u` holds one interaction value per site.
pub fn qca_steady(
    model: &LatticeModel,
    drive: &DriveSpec,
    u: &[C64],
    policy: &IntegrationPolicy,
) -> Result<(f64, SemiclassicalState)> {
    let sys = Scaled::new(model, drive, u)?;
    let d = sys.dim();
    let n = model.n_sites();
    if drive.omega_l == 0.0 {
        let state = SemiclassicalState {
            beta: vec![C64::default(); n],
            alpha: if sys.side { vec![C64::default(); n] } else { Vec::new() },
            status: Status::Converged,
            averaged_t: None,
            period: None,
            residual: 0.0,
            t_end: 0.0,
        };
        return Ok((0.0, state));
    }
    let out_idx = sys.output();
    let gamma = model.gamma_total().max(1e-12);
    let t_max = policy
        .t_max
        .unwrap_or(5000.0 / gamma * (n as f64 / 10.0).max(1.0));
    let mut ode = Dopri5::new(|_, y: &[C64], dy: &mut [C64]| sys.rhs(y, dy), 0.0, vec![C64::default(); d], policy.tol)?;

    let converged = |x: Vec<C64>, t: f64| -> (f64, SemiclassicalState) {
        let res = sys.scaled_residual(&x);
        let tr = transmission_of(model, x[out_idx]);
        let (beta, alpha) = finish(model, &sys, drive, &x);
        (
            tr,
            SemiclassicalState {
                beta,
                alpha,
                status: Status::Converged,
                averaged_t: None,
                period: None,
                residual: res,
                t_end: t,
            },
        )
    };
    let diverged = |x: &[C64], t: f64| -> (f64, SemiclassicalState) {
        let (beta, alpha) = finish(model, &sys, drive, x);
        (
            f64::NAN,
            SemiclassicalState {
                beta,
                alpha,
                status: Status::Diverged,
                averaged_t: None,
                period: None,
                residual: f64::INFINITY,
                t_end: t,
            },
        )
    };

    let mut trigger = policy.newton_trigger;
    // Accepts a polished root only if it is stable and close to the current
    // point of the trajectory, so that a distant branch is never selected.
    let try_polish = |x: &[C64]| -> Option<Vec<C64>> {
        let root = sys.newton(x, policy.steady_tol)?;
        let dist = root.iter().zip(x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if dist > 0.05 * norm_inf(x).max(1.0) {
            return None;
        }
        let lam = sys.stability(&root)?;
        (lam < 1e-12).then_some(root)
    };
    let probe_every = t_max / 200.0;
    let mut next_probe = probe_every;

    // transient
    let t_settle = 0.5 * t_max;
    while ode.t() < t_settle {
        if let Err(e) = ode.step(t_settle) {
            return match e {
                Error::Numerical(_) => Ok(diverged(ode.y(), ode.t())),
                other => Err(other),
            };
        }
        let x = ode.y();
        let xn = norm_inf(x);
        if xn.is_nan() || xn >= policy.divergence {
            return Ok(diverged(x, ode.t()));
        }
        let r = norm_inf(ode.dy()) / xn.max(1.0);
        if r < trigger || ode.t() >= next_probe {
            if let Some(root) = try_polish(x) {
                return Ok(converged(root, ode.t()));
            }
            if r < trigger {
                trigger = r / 10.0;
            }
            next_probe = ode.t() + probe_every;
        }
    }

    // sampling window
    let dt = (0.05 / sys.frequency_scale(ode.y()).max(1e-9)).min(1.0);
    let mut samples = Vec::new();
    let mut t_end = t_max;
    let mut extended = false;
    loop {
        while ode.t() < t_end {
            let target = (ode.t() + dt).min(t_end);
            if let Err(e) = ode.advance_to(target) {
                return match e {
                    Error::Numerical(_) => Ok(diverged(ode.y(), ode.t())),
                    other => Err(other),
                };
            }
            let x = ode.y();
            if norm_inf(x).is_nan() || norm_inf(x) >= policy.divergence {
                return Ok(diverged(x, ode.t()));
            }
            samples.push(transmission_of(model, x[out_idx]));
            let r = norm_inf(ode.dy()) / norm_inf(x).max(1.0);
            if r < trigger {
                if let Some(root) = try_polish(x) {
                    return Ok(converged(root, ode.t()));
                }
                trigger = r / 10.0;
            }
        }
        let period = detect_period(&samples, dt);
        if let Some(p) = period {
            let needed = p * (policy.periods as f64 + 1.0);
            let have = samples.len() as f64 * dt;
            if needed > have && !extended {
                t_end = ode.t() + (needed - have);
                extended = true;
                continue;
            }
        }
        let x = ode.y().to_vec();
        let window = match period {
            Some(p) => ((p * policy.periods as f64 / dt).round() as usize).clamp(1, samples.len()),
            None => samples.len(),
        };
        let avg = samples[samples.len() - window..].iter().sum::<f64>() / window as f64;
        let (beta, alpha) = finish(model, &sys, drive, &x);
        let state = SemiclassicalState {
            beta,
            alpha,
            status: Status::Oscillatory,
            averaged_t: Some(avg),
            period,
            residual: sys.scaled_residual(&x),
            t_end: ode.t(),
        };
        return Ok((avg, state));
    }
}

/// Plain quasi-classical transmission with the real interaction.
pub fn qca_transmission(
    model: &LatticeModel,
    drive: &DriveSpec,
    policy: &IntegrationPolicy,
) -> Result<(f64, SemiclassicalState)> {
    let u = vec![C64::new(model.onsite_u(), 0.0); model.n_sites()];
    qca_steady(model, drive, &u, policy)
}

/// Per-site interaction for the modified equations: the single-site `U_eff`
/// of site 1 (or of every site when `per_site`), distributed by `placement`.
pub fn mqca_interaction(
    model: &LatticeModel,
    drive: &DriveSpec,
    placement: Placement,
    per_site: bool,
) -> Result<Vec<C64>> {
    let n = model.n_sites();
    if per_site {
        let own: Vec<C64> = (0..n).map(|j| ueff_for_site(model, drive, j)).collect::<Result<_>>()?;
        Ok(own
            .iter()
            .enumerate()
            .map(|(j, u)| match placement {
                Placement::EndsOnly if j != 0 && j + 1 != n => C64::new(u.re, 0.0),
                _ => *u,
            })
            .collect())
    } else {
        let u = ueff_for_site(model, drive, 0)?;
        Ok(ComplexInteraction { u_eff: u, placement }.site_values(n))
    }
}
