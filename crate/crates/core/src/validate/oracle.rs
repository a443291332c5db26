//! Brute-force reference for the symbolic generator: every operator is a
//! dense matrix on a truncated Fock space, the right-hand side is evaluated
//! by matrix products, and normal-ordered coefficients are read back from
//! low-lying matrix elements.

use std::collections::HashMap;

use faer::{Mat, Scale};

use crate::algebra::{enumerate_basis, Generator, NormalMonomial};
use crate::error::Result;
use crate::lattice::{DriveSpec, LatticeModel, Medium};
use crate::thle::eliminate_resonators;
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// Truncated Fock space of `n` sites with `levels` states each.
struct Fock {
    n: usize,
    levels: usize,
    dim: usize,
}

impl Fock {
    fn new(n: usize, levels: usize) -> Self {
        Fock {
            n,
            levels,
            dim: levels.pow(n as u32),
        }
    }

    fn occupations(&self, mut idx: usize) -> Vec<usize> {
        (0..self.n)
            .map(|_| {
                let o = idx % self.levels;
                idx /= self.levels;
                o
            })
            .collect()
    }

    fn index(&self, occ: &[usize]) -> usize {
        occ.iter().rev().fold(0, |a, &o| a * self.levels + o)
    }

    /// Exact matrix elements of `prod_i b_i^{dag j_i} b_i^{k_i}` between
    /// truncated states.
    fn monomial(&self, mono: &NormalMonomial) -> Mat<C64> {
        let mut out = Mat::<C64>::zeros(self.dim, self.dim);
        for q in 0..self.dim {
            let qo = self.occupations(q);
            let mut po = Vec::with_capacity(self.n);
            let mut amp = 1.0;
            for (&(j, k), &qi) in mono.exps().iter().zip(&qo) {
                let (j, k) = (j as usize, k as usize);
                if qi < k || qi - k + j >= self.levels {
                    amp = 0.0;
                    break;
                }
                let r = qi - k;
                amp *= (factorial(qi) / factorial(r)).sqrt() * (factorial(r + j) / factorial(r)).sqrt();
                po.push(r + j);
            }
            if amp != 0.0 {
                out[(self.index(&po), q)] = C64::new(amp, 0.0);
            }
        }
        out
    }

    fn site(&self, site: usize, j: u8, k: u8) -> Mat<C64> {
        self.monomial(&NormalMonomial::site(self.n, site, j, k))
    }

    fn identity(&self) -> Mat<C64> {
        Mat::<C64>::identity(self.dim, self.dim)
    }

    /// Normal-ordered coefficients of `x` for every monomial with all
    /// exponents at most `max_exp`, by triangular elimination on
    /// `<p|X|q> = sum_r c_{p-r, q-r} prod_i sqrt(p_i! q_i!) / r_i!`.
    fn normal_coefficients(&self, x: &Mat<C64>, max_exp: usize) -> HashMap<Vec<(u8, u8)>, C64> {
        let width = max_exp + 1;
        let mut pairs: Vec<Vec<(usize, usize)>> = Vec::new();
        let total = width.pow(2 * self.n as u32);
        for mut code in 0..total {
            let mut v = Vec::with_capacity(self.n);
            for _ in 0..self.n {
                let p = code % width;
                code /= width;
                let q = code % width;
                code /= width;
                v.push((p, q));
            }
            pairs.push(v);
        }
        pairs.sort_by_key(|v| v.iter().map(|&(p, q)| p + q).sum::<usize>());
        let mut coeffs: HashMap<Vec<(u8, u8)>, C64> = HashMap::new();
        for v in pairs {
            let pidx = self.index(&v.iter().map(|e| e.0).collect::<Vec<_>>());
            let qidx = self.index(&v.iter().map(|e| e.1).collect::<Vec<_>>());
            let norm: f64 = v.iter().map(|&(p, q)| (factorial(p) * factorial(q)).sqrt()).product();
            let mut acc = x[(pidx, qidx)];
            // subtract lower terms: every nonzero shift r <= min(p, q)
            let limits: Vec<usize> = v.iter().map(|&(p, q)| p.min(q)).collect();
            let count: usize = limits.iter().map(|l| l + 1).product();
            for mut code in 1..count {
                let mut lower = Vec::with_capacity(self.n);
                let mut w = norm;
                for (i, &l) in limits.iter().enumerate() {
                    let r = code % (l + 1);
                    code /= l + 1;
                    w /= factorial(r);
                    lower.push(((v[i].0 - r) as u8, (v[i].1 - r) as u8));
                }
                if let Some(c) = coeffs.get(&lower) {
                    acc -= c * w;
                }
            }
            let key: Vec<(u8, u8)> = v.iter().map(|&(p, q)| (p as u8, q as u8)).collect();
            coeffs.insert(key, acc / norm);
        }
        coeffs
    }
}

fn commutator(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    a * b - b * a
}

/// Hamiltonian in the rotating frame, assembled directly from the model
/// parameters (no use of the symbolic generator).
fn hamiltonian(fock: &Fock, model: &LatticeModel, drive: &DriveSpec) -> Mat<C64> {
    let n = model.n_sites();
    let det = model.detunings(drive.omega_p);
    let mut h = Mat::<C64>::zeros(fock.dim, fock.dim);
    for i in 0..n {
        h += fock.site(i, 1, 1) * Scale(C64::new(det.dq[i], 0.0));
        h += fock.site(i, 2, 2) * Scale(C64::new(model.onsite_u(), 0.0));
    }
    if model.medium() == Medium::Direct {
        for i in 0..n.saturating_sub(1) {
            let hop = fock.site(i, 1, 0) * fock.site(i + 1, 0, 1);
            let back = fock.site(i + 1, 1, 0) * fock.site(i, 0, 1);
            h += (hop + back) * Scale(C64::new(2.0 * model.hop_jx(), 0.0));
        }
        h += (fock.site(0, 0, 1) + fock.site(0, 1, 0)) * Scale(C64::new(drive.omega_l, 0.0));
    }
    h
}

/// Largest coefficient mismatch between the symbolic right-hand side and the
/// Fock-matrix evaluation over the whole truncated basis.
pub fn oracle_max_error(model: &LatticeModel, drive: &DriveSpec, m: u32) -> Result<f64> {
    let n = model.n_sites();
    let max_exp = m as usize + 1;
    let fock = Fock::new(n, max_exp + 4);
    let h = hamiltonian(&fock, model, drive);
    let lower: Vec<Mat<C64>> = (0..n).map(|i| fock.site(i, 0, 1)).collect();
    let raise: Vec<Mat<C64>> = (0..n).map(|i| fock.site(i, 1, 0)).collect();

    let (generator, fields) = match model.medium() {
        Medium::Direct => (Generator::new(model, drive, None)?, Vec::new()),
        Medium::SideCoupled => {
            let elim = eliminate_resonators(model, drive)?;
            let fields: Vec<Mat<C64>> = (0..n)
                .map(|i| {
                    let mut f = fock.identity() * Scale(elim.c0()[i]);
                    for (j, c) in elim.c_row(i).iter().enumerate() {
                        f += &lower[j] * Scale(*c);
                    }
                    f
                })
                .collect();
            (Generator::new(model, drive, Some(&elim))?, fields)
        }
    };

    let mut worst: f64 = 0.0;
    for op in enumerate_basis(n, m)? {
        let o = fock.monomial(&op);
        let mut x = commutator(&h, &o) * Scale(I);
        match model.medium() {
            Medium::Direct => {
                for i in 0..n {
                    let gamma = model.site_gamma(i);
                    if gamma == 0.0 {
                        continue;
                    }
                    let nn = &raise[i] * &lower[i];
                    let lind = &raise[i] * &o * &lower[i] * Scale(C64::new(2.0, 0.0)) - &nn * &o - &o * &nn;
                    x += lind * Scale(C64::new(gamma, 0.0));
                }
            }
            Medium::SideCoupled => {
                for i in 0..n {
                    let g = model.qr_coupling()[i];
                    let f = &fields[i];
                    let fdag = f.adjoint().to_owned();
                    let term = &fdag * commutator(&lower[i], &o) + commutator(&raise[i], &o) * f;
                    x += term * Scale(I * g);
                }
            }
        }
        let reference = fock.normal_coefficients(&x, max_exp);
        let symbolic = generator.rhs_full(&op);
        for (mono, c) in symbolic.iter() {
            if mono.max_exponent() as usize > max_exp {
                worst = f64::INFINITY;
                continue;
            }
            let r = reference.get(mono.exps()).copied().unwrap_or_default();
            worst = worst.max((c - r).norm());
        }
        for (key, r) in &reference {
            let mono = NormalMonomial::new(key.clone());
            if symbolic.coefficient(&mono) == C64::default() {
                worst = worst.max(r.norm());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive_from_intensity;

    #[test]
    fn extraction_recovers_a_known_polynomial() {
        let fock = Fock::new(1, 7);
        // 2 b^dag b + 0.5 b^dag2 b2 - i b
        let x = fock.site(0, 1, 1) * Scale(C64::new(2.0, 0.0)) + fock.site(0, 2, 2) * Scale(C64::new(0.5, 0.0))
            - fock.site(0, 0, 1) * Scale(I);
        let c = fock.normal_coefficients(&x, 3);
        assert!((c[&vec![(1, 1)]] - C64::new(2.0, 0.0)).norm() < 1e-14);
        assert!((c[&vec![(2, 2)]] - C64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((c[&vec![(0, 1)]] + I).norm() < 1e-14);
        assert!(c[&vec![(0, 0)]].norm() < 1e-14);
        assert!(c[&vec![(3, 3)]].norm() < 1e-14);
    }

    #[test]
    fn direct_pair_agrees() {
        let model = LatticeModel::direct(vec![1.0, 1.03], 1.05, 0.013, 0.02, 0.03).unwrap();
        let drive = drive_from_intensity(&model, 0.98, 0.01).unwrap();
        assert!(oracle_max_error(&model, &drive, 2).unwrap() < 1e-12);
    }

    #[test]
    fn side_pair_agrees() {
        let model =
            LatticeModel::side_coupled(vec![1.0, 0.97], vec![1.0, 1.01], vec![0.02, 0.05], 1.05, 0.01, 0.02, 0.02)
                .unwrap();
        let drive = drive_from_intensity(&model, 0.99, 0.034).unwrap();
        assert!(oracle_max_error(&model, &drive, 1).unwrap() < 1e-12);
    }
}
