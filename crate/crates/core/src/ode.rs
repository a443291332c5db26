//! Adaptive Dormand-Prince 5(4) integrator for complex state vectors.

use crate::error::{Error, Result};
use crate::C64;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step size; `f64::INFINITY` for none.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

/// Integrator state for `dy/dt = f(t, y)`.
pub struct Dopri5<F> {
    f: F,
    tol: Tolerances,
    t: f64,
    y: Vec<C64>,
    dy: Vec<C64>,
    h: f64,
    steps: usize,
    k: Vec<Vec<C64>>,
    scratch: Vec<C64>,
}

impl<F: FnMut(f64, &[C64], &mut [C64])> Dopri5<F> {
    pub fn new(mut f: F, t0: f64, y0: Vec<C64>, tol: Tolerances) -> Result<Self> {
        if y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("initial state is not finite".into()));
        }
        let n = y0.len();
        let mut dy = vec![C64::default(); n];
        f(t0, &y0, &mut dy);
        let scale: f64 = y0
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
            .max(tol.atol / tol.rtol.max(1e-300));
        let rate = dy.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let h = if rate > 0.0 { (0.01 * scale / rate).max(1e-6) } else { 1e-2 };
        Ok(Dopri5 {
            f,
            tol,
            t: t0,
            y: y0,
            dy,
            h: h.min(tol.h_max),
            steps: 0,
            k: vec![vec![C64::default(); n]; 7],
            scratch: vec![C64::default(); n],
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[C64] {
        &self.y
    }

    /// Derivative at the current point.
    pub fn dy(&self) -> &[C64] {
        &self.dy
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Takes one accepted step, never passing `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<()> {
        let n = self.y.len();
        loop {
            if self.steps >= self.tol.max_steps {
                return Err(Error::Numerical(format!("step limit reached at t = {}", self.t)));
            }
            let h = self.h.min(t_end - self.t).min(self.tol.h_max);
            if h <= 0.0 {
                return Ok(());
            }
            self.k[0].copy_from_slice(&self.dy);
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = self.y[i];
                    for (j, a) in A[s].iter().enumerate().take(s) {
                        if *a != 0.0 {
                            acc += self.k[j][i] * (h * a);
                        }
                    }
                    self.scratch[i] = acc;
                }
                (self.f)(self.t + C[s] * h, &self.scratch, &mut self.k[s]);
            }
            // scratch now holds the fifth-order solution (FSAL row)
            let mut err2 = 0.0;
            for i in 0..n {
                let mut e = C64::default();
                for (s, ec) in E.iter().enumerate() {
                    e += self.k[s][i] * *ec;
                }
                let sc = self.tol.atol + self.tol.rtol * self.y[i].norm().max(self.scratch[i].norm());
                let r = (e * h).norm() / sc;
                err2 += r * r;
            }
            let err = (err2 / n.max(1) as f64).sqrt();
            self.steps += 1;
            if !err.is_finite() {
                self.h = h * 0.1;
                if self.h < 1e-14 * self.t.abs().max(1.0) {
                    return Err(Error::Numerical(format!("non-finite state at t = {}", self.t)));
                }
                continue;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                self.t += h;
                std::mem::swap(&mut self.y, &mut self.scratch);
                self.dy.copy_from_slice(&self.k[6]);
                self.h = h * fac;
                if self.y.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Numerical(format!("non-finite state at t = {}", self.t)));
                }
                return Ok(());
            }
            self.h = h * fac.min(1.0);
            if self.h < 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::Numerical(format!("step size underflow at t = {}", self.t)));
            }
        }
    }

    /// Integrates up to exactly `t_end`.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        while self.t < t_end {
            self.step(t_end)?;
        }
        Ok(())
    }
}
