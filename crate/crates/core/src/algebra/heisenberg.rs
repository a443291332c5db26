//! Symbolic right-hand sides of the Heisenberg-Langevin equations for
//! normal-ordered expectation values in the frame rotating at the drive
//! frequency.

use std::fmt::Write as _;

use super::monomial::{NormalMonomial, TruncationRule};
use super::poly::OperatorPolynomial;
use crate::error::{Error, Result};
use crate::lattice::{DriveSpec, LatticeModel, Medium};
use crate::thle::elimination::{eliminate_resonators, ResonatorElimination};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Qubit coupled to an eliminated resonator field `f = c0 + sum_j C_j b_j`.
#[derive(Debug, Clone)]
struct Channel {
    g: f64,
    lower: OperatorPolynomial,
    raise: OperatorPolynomial,
    field: OperatorPolynomial,
    field_dag: OperatorPolynomial,
}

/// Equation generator for one (model, drive) pair.
///
/// The generated right-hand side of `d<O>/dt` is
/// `i[H, O] - sum_i Gamma_i (j_i + k_i) O + sum_i i g_i (f_i^dag [b_i, O] + [b_i^dag, O] f_i)`,
/// where the last sum is present only for the side-coupled medium with the
/// resonator fields `f_i` replaced by their Markovian steady-state expressions.
#[derive(Debug, Clone)]
pub struct Generator {
    n_sites: usize,
    hamiltonian: OperatorPolynomial,
    damping: Vec<f64>,
    channels: Vec<Channel>,
}

impl Generator {
    /// `elimination` is required for the side-coupled medium and ignored for
    /// the direct one.
    pub fn new(
        model: &LatticeModel,
        drive: &DriveSpec,
        elimination: Option<&ResonatorElimination>,
    ) -> Result<Self> {
        let n = model.n_sites();
        let det = model.detunings(drive.omega_p);
        let u = model.onsite_u();
        let mut h = OperatorPolynomial::zero(n);
        for i in 0..n {
            h.add_term(NormalMonomial::site(n, i, 1, 1), C64::new(det.dq[i], 0.0));
            h.add_term(NormalMonomial::site(n, i, 2, 2), C64::new(u, 0.0));
        }
        let (damping, channels) = match model.medium() {
            Medium::Direct => {
                let hop = C64::new(2.0 * model.hop_jx(), 0.0);
                for i in 0..n.saturating_sub(1) {
                    let mut fwd = vec![(0, 0); n];
                    fwd[i] = (1, 0);
                    fwd[i + 1] = (0, 1);
                    let mut bwd = vec![(0, 0); n];
                    bwd[i] = (0, 1);
                    bwd[i + 1] = (1, 0);
                    h.add_term(NormalMonomial::new(fwd), hop);
                    h.add_term(NormalMonomial::new(bwd), hop);
                }
                let omega = C64::new(drive.omega_l, 0.0);
                h.add_term(NormalMonomial::annihilation(n, 0), omega);
                h.add_term(NormalMonomial::creation(n, 0), omega);
                ((0..n).map(|i| model.site_gamma(i)).collect(), Vec::new())
            }
            Medium::SideCoupled => {
                let elim = elimination.ok_or_else(|| {
                    Error::InvalidArgument("side-coupled generator needs a resonator elimination".into())
                })?;
                if elim.n_sites() != n {
                    return Err(Error::InvalidArgument("elimination size does not match the model".into()));
                }
                let channels = (0..n)
                    .filter(|&i| model.qr_coupling()[i] != 0.0)
                    .map(|i| {
                        let field = elim.field(i);
                        Channel {
                            g: model.qr_coupling()[i],
                            lower: OperatorPolynomial::monomial(NormalMonomial::annihilation(n, i), C64::new(1.0, 0.0)),
                            raise: OperatorPolynomial::monomial(NormalMonomial::creation(n, i), C64::new(1.0, 0.0)),
                            field_dag: field.dagger(),
                            field,
                        }
                    })
                    .collect();
                (vec![0.0; n], channels)
            }
        };
        Ok(Generator {
            n_sites: n,
            hamiltonian: h,
            damping,
            channels,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Effective Hamiltonian in the rotating frame (without the eliminated
    /// resonators).
    pub fn hamiltonian(&self) -> &OperatorPolynomial {
        &self.hamiltonian
    }

    /// Untruncated right-hand side of `d<op>/dt`.
    pub fn rhs_full(&self, op: &NormalMonomial) -> OperatorPolynomial {
        let o = OperatorPolynomial::monomial(op.clone(), C64::new(1.0, 0.0));
        let mut out = self.hamiltonian.commutator(&o).scale(I);
        let rate: f64 = (0..self.n_sites)
            .map(|i| self.damping[i] * op.weight(i) as f64)
            .sum();
        if rate != 0.0 {
            out.add_term(op.clone(), C64::new(-rate, 0.0));
        }
        for ch in &self.channels {
            let lower_c = ch.lower.commutator(&o);
            let raise_c = ch.raise.commutator(&o);
            let coupling = ch.field_dag.product(&lower_c) + raise_c.product(&ch.field);
            out += coupling.scale(I * ch.g);
        }
        out.prune(1e-14);
        out
    }

    /// Right-hand side with out-of-basis monomials dropped. The identity term,
    /// when present, is the constant inhomogeneity.
    pub fn rhs(&self, op: &NormalMonomial, trunc: TruncationRule) -> Result<OperatorPolynomial> {
        if op.n_sites() != self.n_sites || !trunc.contains(op) || op.is_identity() {
            return Err(Error::OutOfBasis(op.to_string()));
        }
        let mut p = self.rhs_full(op);
        p.retain(|m| trunc.contains(m));
        Ok(p)
    }

    /// One human-readable equation per basis element.
    pub fn dump(&self, trunc: TruncationRule) -> Result<String> {
        let basis = super::enumerate_basis(self.n_sites, trunc.m() as u32)?;
        let mut s = String::new();
        for op in &basis {
            let _ = writeln!(s, "d{op}/dt = {}", self.rhs(op, trunc)?);
        }
        Ok(s)
    }
}

/// Truncated right-hand side of `d<op>/dt`. For the side-coupled medium the
/// resonators are eliminated first.
pub fn heisenberg_rhs(
    op: &NormalMonomial,
    model: &LatticeModel,
    drive: &DriveSpec,
    trunc: TruncationRule,
) -> Result<OperatorPolynomial> {
    let elim = match model.medium() {
        Medium::SideCoupled => Some(eliminate_resonators(model, drive)?),
        Medium::Direct => None,
    };
    Generator::new(model, drive, elim.as_ref())?.rhs(op, trunc)
}
