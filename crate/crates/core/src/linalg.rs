//! Thin wrappers over faer for the complex solves used by the solvers.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::sparse::linalg::solvers::Lu as SparseLu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};
use crate::C64;

/// Systems up to this size are factored densely.
pub const DENSE_LIMIT: usize = 600;

/// LU factorization of a square complex matrix.
pub enum Factorization {
    Dense(PartialPivLu<C64>),
    Sparse(SparseLu<usize, C64>),
}

impl Factorization {
    pub fn dense(a: &Mat<C64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        Ok(Factorization::Dense(a.partial_piv_lu()))
    }

    /// `entries` holds `(row, col, value)`; duplicates are summed.
    pub fn sparse(n: usize, entries: &[(usize, usize, C64)]) -> Result<Self> {
        let trip: Vec<Triplet<usize, usize, C64>> =
            entries.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
        let a = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::Numerical(format!("sparse assembly failed: {e:?}")))?;
        let lu = a
            .sp_lu()
            .map_err(|e| Error::Singular(format!("sparse LU failed: {e:?}")))?;
        Ok(Factorization::Sparse(lu))
    }

    /// Dense below [`DENSE_LIMIT`], sparse above.
    pub fn auto(n: usize, entries: &[(usize, usize, C64)]) -> Result<Self> {
        if n <= DENSE_LIMIT {
            let mut a = Mat::<C64>::zeros(n, n);
            for &(r, c, v) in entries {
                a[(r, c)] += v;
            }
            Self::dense(&a)
        } else {
            Self::sparse(n, entries)
        }
    }

    fn apply(&self, b: &[C64], adjoint: bool) -> Vec<C64> {
        let mut x = Mat::<C64>::from_fn(b.len(), 1, |i, _| b[i]);
        match (self, adjoint) {
            (Factorization::Dense(lu), false) => lu.solve_in_place(x.as_mut()),
            (Factorization::Dense(lu), true) => lu.solve_adjoint_in_place(x.as_mut()),
            (Factorization::Sparse(lu), false) => lu.solve_in_place(x.as_mut()),
            (Factorization::Sparse(lu), true) => lu.solve_adjoint_in_place(x.as_mut()),
        }
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    }

    /// `A^{-1} b`; errors if the result is not finite.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let x = self.apply(b, false);
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(Error::Singular("solution is not finite".into()))
        }
    }

    /// `A^{-H} b`.
    pub fn solve_adjoint(&self, b: &[C64]) -> Result<Vec<C64>> {
        let x = self.apply(b, true);
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(Error::Singular("adjoint solution is not finite".into()))
        }
    }

    /// Hager-Higham estimate of `||A^{-1}||_1`.
    pub fn inverse_norm1_estimate(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x)?;
            est = norm1(&y);
            let xi: Vec<C64> = y
                .iter()
                .map(|v| if v.norm() > 0.0 { v / v.norm() } else { C64::new(1.0, 0.0) })
                .collect();
            let z = self.solve_adjoint(&xi)?;
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![C64::default(); n];
            x[j] = C64::new(1.0, 0.0);
        }
        Ok(est)
    }
}

pub fn norm1(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm()).sum()
}

pub fn norm_inf(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Largest column sum of a sparse matrix given as triplets.
pub fn matrix_norm1(n: usize, entries: &[(usize, usize, C64)]) -> f64 {
    let mut col = vec![0.0; n];
    for &(_, c, v) in entries {
        col[c] += v.norm();
    }
    col.into_iter().fold(0.0, f64::max)
}

/// Solves a small dense system given row-major.
pub fn solve_small(a: &[Vec<C64>], b: &[C64]) -> Result<Vec<C64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("dimension mismatch in dense solve".into()));
    }
    let m = Mat::<C64>::from_fn(n, n, |i, j| a[i][j]);
    Factorization::dense(&m)?.solve(b)
}

/// Eigenvalues of a dense matrix given row-major.
pub fn eigenvalues(a: &[Vec<C64>]) -> Result<Vec<C64>> {
    let n = a.len();
    let m = Mat::<C64>::from_fn(n, n, |i, j| a[i][j]);
    m.eigenvalues()
        .map_err(|e| Error::Numerical(format!("eigenvalue solver failed: {e:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dense_and_sparse_agree() {
        let entries = vec![
            (0, 0, c(2.0, 1.0)),
            (0, 1, c(0.5, 0.0)),
            (1, 1, c(1.0, -0.3)),
            (2, 0, c(0.0, 1.0)),
            (2, 2, c(-1.0, 0.2)),
        ];
        let b = vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
        let xd = Factorization::auto(3, &entries).unwrap().solve(&b).unwrap();
        let xs = Factorization::sparse(3, &entries).unwrap().solve(&b).unwrap();
        for (a, b) in xd.iter().zip(&xs) {
            assert!((a - b).norm() < 1e-14);
        }
        let mut r = b.clone();
        for &(i, j, v) in &entries {
            r[i] -= v * xd[j];
        }
        assert!(norm_inf(&r) < 1e-14);
    }

    #[test]
    fn condition_estimate_of_diagonal() {
        let entries = vec![(0, 0, c(1.0, 0.0)), (1, 1, c(0.0, 1e-6)), (2, 2, c(3.0, 0.0))];
        let f = Factorization::auto(3, &entries).unwrap();
        let est = f.inverse_norm1_estimate(3).unwrap() * matrix_norm1(3, &entries);
        assert!((est - 3e6).abs() / 3e6 < 1e-12);
    }

    #[test]
    fn singular_reports_error() {
        let a = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]];
        assert!(solve_small(&a, &[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn eigenvalues_of_triangular() {
        let a = vec![vec![c(-1.0, 2.0), c(5.0, 0.0)], vec![c(0.0, 0.0), c(-0.5, 0.0)]];
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((ev[0] - c(-1.0, 2.0)).norm() < 1e-12);
        assert!((ev[1] - c(-0.5, 0.0)).norm() < 1e-12);
    }
}
