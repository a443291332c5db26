use std::fmt::Write as _;

use super::elimination::{eliminate_resonators, ResonatorElimination};
use crate::algebra::{enumerate_basis, Generator, NormalMonomial, TruncationRule};
use crate::error::{Error, Result};
use crate::lattice::{DriveSpec, LatticeModel, Medium};
use crate::C64;

/// Default cap on the number of THLE variables.
pub const DEFAULT_MAX_DIM: usize = 1_000_000;

/// `dS/dt = Z S + Omega` over the truncated basis, with `Z` stored by rows.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    n_sites: usize,
    trunc: TruncationRule,
    basis: Vec<NormalMonomial>,
    rows: Vec<Vec<(usize, C64)>>,
    omega: Vec<C64>,
    elimination: Option<ResonatorElimination>,
    /// Qubits with no coupling to any bath (side-coupled sites with `g = 0`).
    dark: Vec<bool>,
}

impl LinearSystem {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn truncation(&self) -> TruncationRule {
        self.trunc
    }

    pub fn basis(&self) -> &[NormalMonomial] {
        &self.basis
    }

    pub fn index_of(&self, mono: &NormalMonomial) -> Option<usize> {
        if mono.n_sites() != self.n_sites {
            return None;
        }
        self.trunc.index_of(mono)
    }

    /// Nonzero entries of row `i` of `Z`, by column.
    pub fn row(&self, i: usize) -> &[(usize, C64)] {
        &self.rows[i]
    }

    pub fn omega(&self) -> &[C64] {
        &self.omega
    }

    /// Present for the side-coupled medium.
    pub fn elimination(&self) -> Option<&ResonatorElimination> {
        self.elimination.as_ref()
    }

    /// Rows whose monomial involves no dark qubit. The remaining rows form an
    /// undriven invariant subspace that stays zero from the ground state.
    pub fn active_indices(&self) -> Vec<usize> {
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, m)| m.exps().iter().zip(&self.dark).all(|(&(j, k), &d)| !d || (j == 0 && k == 0)))
            .map(|(i, _)| i)
            .collect()
    }

    /// `Z` restricted to the active rows and columns, reindexed.
    pub fn active_triplets(&self, active: &[usize]) -> Vec<(usize, usize, C64)> {
        let mut map = vec![usize::MAX; self.dim()];
        for (k, &i) in active.iter().enumerate() {
            map[i] = k;
        }
        let mut out = Vec::new();
        for (k, &i) in active.iter().enumerate() {
            for &(c, v) in &self.rows[i] {
                if map[c] != usize::MAX {
                    out.push((k, map[c], v));
                }
            }
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `(row, col, value)` entries of `Z`.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
            .collect()
    }

    pub fn dense_z(&self) -> Vec<Vec<C64>> {
        let n = self.dim();
        let mut z = vec![vec![C64::default(); n]; n];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                z[r][c] += v;
            }
        }
        z
    }

    /// `Z x`.
    pub fn apply_z(&self, x: &[C64], out: &mut [C64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(c, v)| v * x[c]).sum();
        }
    }

    /// `Z x + Omega`, the time derivative at `x`.
    pub fn derivative(&self, x: &[C64], out: &mut [C64]) {
        self.apply_z(x, out);
        for (o, w) in out.iter_mut().zip(&self.omega) {
            *o += w;
        }
    }

    /// One `row col re im` line per nonzero of `Z`, then `omega row re im`
    /// lines for the inhomogeneity.
    pub fn dump_triplets(&self) -> String {
        let mut s = String::new();
        for (r, c, v) in self.triplets() {
            let _ = writeln!(s, "{r} {c} {:e} {:e}", v.re, v.im);
        }
        for (r, w) in self.omega.iter().enumerate() {
            if *w != C64::default() {
                let _ = writeln!(s, "omega {r} {:e} {:e}", w.re, w.im);
            }
        }
        s
    }
}

pub fn assemble_linear_system(model: &LatticeModel, drive: &DriveSpec, m: u32) -> Result<LinearSystem> {
    assemble_with_cap(model, drive, m, DEFAULT_MAX_DIM)
}

/// As [`assemble_linear_system`] with an explicit dimension cap. The
/// side-coupled medium has its resonators eliminated first.
pub fn assemble_with_cap(model: &LatticeModel, drive: &DriveSpec, m: u32, max_dim: usize) -> Result<LinearSystem> {
    let trunc = TruncationRule::new(m)?;
    let n = model.n_sites();
    let dim = trunc.basis_len(n).unwrap_or(u128::MAX);
    if dim > max_dim as u128 {
        return Err(Error::DimensionOverflow { dim, cap: max_dim });
    }
    let elimination = match model.medium() {
        Medium::SideCoupled => Some(eliminate_resonators(model, drive)?),
        Medium::Direct => None,
    };
    let dark = match model.medium() {
        Medium::SideCoupled => model.qr_coupling().iter().map(|&g| g == 0.0).collect(),
        Medium::Direct => vec![false; n],
    };
    let gen = Generator::new(model, drive, elimination.as_ref())?;
    let basis = enumerate_basis(n, m)?;
    let mut rows = Vec::with_capacity(basis.len());
    let mut omega = vec![C64::default(); basis.len()];
    for (r, op) in basis.iter().enumerate() {
        let rhs = gen.rhs(op, trunc)?;
        let mut row = Vec::with_capacity(rhs.len());
        for (mono, &c) in rhs.iter() {
            match trunc.index_of(mono) {
                Some(col) => row.push((col, c)),
                None => omega[r] += c,
            }
        }
        rows.push(row);
    }
    Ok(LinearSystem {
        n_sites: n,
        trunc,
        basis,
        rows,
        omega,
        elimination,
        dark,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive_from_intensity;

    fn resonant_qubit_model() -> LatticeModel {
        LatticeModel::direct(vec![1.0], 1.05, 0.0, 0.02, 0.02).unwrap()
    }

    #[test]
    fn single_qubit_inhomogeneity() {
        let model = resonant_qubit_model();
        let drive = drive_from_intensity(&model, 0.95, 1e-3).unwrap();
        let sys = assemble_linear_system(&model, &drive, 2).unwrap();
        assert_eq!(sys.dim(), 8);
        let w = drive.omega_l;
        let expected = [
            C64::new(0.0, -w),
            C64::default(),
            C64::new(0.0, w),
            C64::default(),
            C64::default(),
            C64::default(),
            C64::default(),
            C64::default(),
        ];
        assert_eq!(sys.omega(), &expected);
    }

    #[test]
    fn s01_row() {
        let model = resonant_qubit_model();
        let drive = drive_from_intensity(&model, 0.95, 1e-3).unwrap();
        let sys = assemble_linear_system(&model, &drive, 2).unwrap();
        let z = sys.dense_z();
        assert!((z[0][0] - C64::new(-0.04, -0.05)).norm() < 1e-15);
        assert!((z[0][4] - C64::new(0.0, -2.1)).norm() < 1e-15);
        assert_eq!(sys.row(0).len(), 2);
    }

    #[test]
    fn zero_drive_has_zero_inhomogeneity() {
        let model = resonant_qubit_model();
        let drive = drive_from_intensity(&model, 1.0, 0.0).unwrap();
        let sys = assemble_linear_system(&model, &drive, 3).unwrap();
        assert!(sys.omega().iter().all(|w| *w == C64::default()));
    }

    #[test]
    fn dimension_cap() {
        let model = LatticeModel::direct(vec![1.0; 4], 1.0, 0.01, 0.02, 0.02).unwrap();
        let drive = drive_from_intensity(&model, 1.0, 1e-3).unwrap();
        match assemble_with_cap(&model, &drive, 3, 1000) {
            Err(Error::DimensionOverflow { dim, cap }) => {
                assert_eq!(dim, 65535);
                assert_eq!(cap, 1000);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
