//! Markovian elimination of the resonators of the side-coupled medium.

use crate::algebra::{NormalMonomial, OperatorPolynomial};
use crate::error::{Error, Result};
use crate::lattice::{DriveSpec, LatticeModel, Medium};
use crate::linalg::solve_small;
use crate::C64;

/// Long-time relation `f_i = c0[i] + sum_j C[i][j] b_j` between resonator and
/// qubit operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonatorElimination {
    c0: Vec<C64>,
    c: Vec<Vec<C64>>,
}

impl ResonatorElimination {
    pub fn n_sites(&self) -> usize {
        self.c0.len()
    }

    pub fn c0(&self) -> &[C64] {
        &self.c0
    }

    /// Row `i` of the resonator-qubit coupling matrix.
    pub fn c_row(&self, i: usize) -> &[C64] {
        &self.c[i]
    }

    /// `f_i` as an operator polynomial in the qubit operators.
    pub fn field(&self, i: usize) -> OperatorPolynomial {
        let n = self.n_sites();
        let mut p = OperatorPolynomial::zero(n);
        p.add_term(NormalMonomial::identity(n), self.c0[i]);
        for (j, &c) in self.c[i].iter().enumerate() {
            p.add_term(NormalMonomial::annihilation(n, j), c);
        }
        p
    }
}

/// Resonator matrix with `A_i = i dr_i + Gamma_i` on the diagonal and `2 i Jx`
/// between neighbours.
pub fn resonator_matrix(model: &LatticeModel, omega_p: f64) -> Vec<Vec<C64>> {
    let n = model.n_sites();
    let det = model.detunings(omega_p);
    let hop = C64::new(0.0, 2.0 * model.hop_jx());
    let mut m = vec![vec![C64::default(); n]; n];
    for i in 0..n {
        m[i][i] = det.a[i];
        if i + 1 < n {
            m[i][i + 1] = hop;
            m[i + 1][i] = hop;
        }
    }
    m
}

pub fn eliminate_resonators(model: &LatticeModel, drive: &DriveSpec) -> Result<ResonatorElimination> {
    if model.medium() != Medium::SideCoupled {
        return Err(Error::InvalidArgument("resonator elimination needs the side-coupled medium".into()));
    }
    let n = model.n_sites();
    let m = resonator_matrix(model, drive.omega_p);
    let singular = |_| Error::Singular("resonator matrix is singular (no damping at resonance)".into());
    let mut rhs = vec![C64::default(); n];
    rhs[0] = C64::new(0.0, -drive.omega_l);
    let c0 = solve_small(&m, &rhs).map_err(singular)?;
    let mut c = vec![vec![C64::default(); n]; n];
    for (j, &g) in model.qr_coupling().iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        let mut e = vec![C64::default(); n];
        e[j] = C64::new(0.0, -g);
        let col = solve_small(&m, &e).map_err(singular)?;
        for i in 0..n {
            c[i][j] = col[i];
        }
    }
    Ok(ResonatorElimination { c0, c })
}
