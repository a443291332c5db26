use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normal-ordered product `prod_i b_i^{dag j_i} b_i^{k_i}` stored as one
/// `(j_i, k_i)` pair per site. The derived ordering is lexicographic in
/// `(j_1, k_1, ..., j_N, k_N)`, which is the canonical basis order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalMonomial(Vec<(u8, u8)>);

impl NormalMonomial {
    pub fn identity(n_sites: usize) -> Self {
        NormalMonomial(vec![(0, 0); n_sites])
    }

    pub fn new(exps: Vec<(u8, u8)>) -> Self {
        NormalMonomial(exps)
    }

    /// `b_site^{dag j} b_site^k` on an `n_sites` lattice.
    pub fn site(n_sites: usize, site: usize, j: u8, k: u8) -> Self {
        let mut e = vec![(0, 0); n_sites];
        e[site] = (j, k);
        NormalMonomial(e)
    }

    pub fn annihilation(n_sites: usize, site: usize) -> Self {
        Self::site(n_sites, site, 0, 1)
    }

    pub fn creation(n_sites: usize, site: usize) -> Self {
        Self::site(n_sites, site, 1, 0)
    }

    pub fn n_sites(&self) -> usize {
        self.0.len()
    }

    pub fn exps(&self) -> &[(u8, u8)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&(j, k)| j == 0 && k == 0)
    }

    /// Hermitian conjugate: swaps creation and annihilation exponents.
    pub fn dagger(&self) -> Self {
        NormalMonomial(self.0.iter().map(|&(j, k)| (k, j)).collect())
    }

    pub fn max_exponent(&self) -> u8 {
        self.0.iter().map(|&(j, k)| j.max(k)).max().unwrap_or(0)
    }

    /// Total number of ladder operators at `site`, `j + k`.
    pub fn weight(&self, site: usize) -> u32 {
        let (j, k) = self.0[site];
        j as u32 + k as u32
    }
}

impl fmt::Debug for NormalMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Expectation-value notation: `S(j1,k1|j2,k2|...)`.
impl fmt::Display for NormalMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("S(")?;
        for (i, (j, k)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{j},{k}")?;
        }
        f.write_str(")")
    }
}

/// Keeps at most `m` creation and `m` annihilation operators per site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationRule {
    m: u8,
}

/// Largest supported truncation level; keeps product exponents inside `u8`.
pub const MAX_TRUNCATION: u32 = 60;

impl TruncationRule {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyBasis(m));
        }
        if m > MAX_TRUNCATION {
            return Err(Error::InvalidArgument(format!(
                "truncation level {m} exceeds the supported maximum {MAX_TRUNCATION}"
            )));
        }
        Ok(TruncationRule { m: m as u8 })
    }

    pub fn m(self) -> u8 {
        self.m
    }

    pub fn contains(self, mono: &NormalMonomial) -> bool {
        mono.max_exponent() <= self.m
    }

    /// `(m+1)^{2N} - 1`, or `None` on overflow.
    pub fn basis_len(self, n_sites: usize) -> Option<u128> {
        let base = self.m as u128 + 1;
        let e = u32::try_from(2 * n_sites).ok()?;
        base.checked_pow(e).map(|v| v - 1)
    }

    /// Row of `mono` in the canonical basis, `None` for the identity or an
    /// out-of-basis monomial.
    pub fn index_of(self, mono: &NormalMonomial) -> Option<usize> {
        if !self.contains(mono) || mono.is_identity() {
            return None;
        }
        let base = self.m as usize + 1;
        let mut idx = 0usize;
        for &(j, k) in mono.exps() {
            idx = idx * base + j as usize;
            idx = idx * base + k as usize;
        }
        Some(idx - 1)
    }

    /// Inverse of [`TruncationRule::index_of`].
    pub fn monomial_at(self, n_sites: usize, index: usize) -> NormalMonomial {
        let base = self.m as usize + 1;
        let mut rest = index + 1;
        let mut digits = vec![0u8; 2 * n_sites];
        for d in digits.iter_mut().rev() {
            *d = (rest % base) as u8;
            rest /= base;
        }
        NormalMonomial(digits.chunks(2).map(|c| (c[0], c[1])).collect())
    }
}

/// All in-basis monomials except the identity, in canonical order.
pub fn enumerate_basis(n_sites: usize, m: u32) -> Result<Vec<NormalMonomial>> {
    if n_sites == 0 {
        return Err(Error::InvalidArgument("basis needs at least one site".into()));
    }
    let rule = TruncationRule::new(m)?;
    let len = rule
        .basis_len(n_sites)
        .filter(|&l| l <= usize::MAX as u128 / 4)
        .ok_or_else(|| Error::InvalidArgument("basis size overflows".into()))? as usize;
    Ok((0..len).map(|i| rule.monomial_at(n_sites, i)).collect())
}
