use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use super::monomial::NormalMonomial;
use crate::C64;

/// Finite complex-weighted sum of normal-ordered monomials.
#[derive(Clone, PartialEq)]
pub struct OperatorPolynomial {
    n_sites: usize,
    terms: BTreeMap<NormalMonomial, C64>,
}

impl OperatorPolynomial {
    pub fn zero(n_sites: usize) -> Self {
        OperatorPolynomial {
            n_sites,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_sites: usize) -> Self {
        Self::monomial(NormalMonomial::identity(n_sites), C64::new(1.0, 0.0))
    }

    pub fn monomial(mono: NormalMonomial, coeff: C64) -> Self {
        let mut p = Self::zero(mono.n_sites());
        p.add_term(mono, coeff);
        p
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: &NormalMonomial) -> C64 {
        self.terms.get(mono).copied().unwrap_or_default()
    }

    /// Terms in canonical monomial order.
    pub fn iter(&self) -> impl Iterator<Item = (&NormalMonomial, &C64)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, mono: NormalMonomial, coeff: C64) {
        debug_assert_eq!(mono.n_sites(), self.n_sites);
        if coeff == C64::default() {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let c = *o.get() + coeff;
                if c == C64::default() {
                    o.remove();
                } else {
                    *o.get_mut() = c;
                }
            }
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = Self::zero(self.n_sites);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * factor);
        }
        out
    }

    /// Hermitian conjugate.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zero(self.n_sites);
        for (m, c) in &self.terms {
            out.add_term(m.dagger(), c.conj());
        }
        out
    }

    /// Drops terms whose magnitude is below `rel_tol` times the largest one.
    pub fn prune(&mut self, rel_tol: f64) {
        let max = self.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = max * rel_tol;
        self.terms.retain(|_, c| c.norm() > cut);
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&NormalMonomial) -> bool) {
        self.terms.retain(|m, _| keep(m));
    }

    /// `self * other`, normal ordered.
    pub fn product(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n_sites);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let ab = normal_order(a, b);
                let w = ca * cb;
                for (m, c) in ab.terms {
                    out.add_term(m, c * w);
                }
            }
        }
        out
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.product(other) - other.product(self)
    }

    /// Largest coefficient difference against `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for (m, c) in &self.terms {
            d = d.max((c - other.coefficient(m)).norm());
        }
        for (m, c) in &other.terms {
            if !self.terms.contains_key(m) {
                d = d.max(c.norm());
            }
        }
        d
    }
}

impl fmt::Debug for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if m.is_identity() {
                write!(f, "({:+.6e}{:+.6e}i)", c.re, c.im)?;
            } else {
                write!(f, "({:+.6e}{:+.6e}i)*{m}", c.re, c.im)?;
            }
        }
        Ok(())
    }
}

impl Add for OperatorPolynomial {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for OperatorPolynomial {
    fn add_assign(&mut self, rhs: Self) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl Neg for OperatorPolynomial {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Sub for OperatorPolynomial {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for &OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn mul(self, rhs: Self) -> OperatorPolynomial {
        self.product(rhs)
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Single-site `b^{dag a} b^{b} b^{dag c} b^{d}` as `(coefficient, (j, k))`
/// terms, using `b^p b^{dag q} = sum_l C(p,l) C(q,l) l! b^{dag (q-l)} b^{p-l}`.
fn site_product(a: (u8, u8), b: (u8, u8)) -> Vec<(f64, (u8, u8))> {
    let (ja, ka) = (a.0 as u32, a.1 as u32);
    let (jb, kb) = (b.0 as u32, b.1 as u32);
    (0..=ka.min(jb))
        .map(|l| {
            let w = binomial(ka, l) * binomial(jb, l) * factorial(l);
            let j = u8::try_from(ja + jb - l).expect("creation exponent overflow");
            let k = u8::try_from(ka + kb - l).expect("annihilation exponent overflow");
            (w, (j, k))
        })
        .collect()
}

/// Exact normal-ordered expansion of the product `a * b`. Factors on distinct
/// sites commute, so the expansion is the tensor product of per-site ones.
pub fn normal_order(a: &NormalMonomial, b: &NormalMonomial) -> OperatorPolynomial {
    assert_eq!(a.n_sites(), b.n_sites(), "monomials live on different lattices");
    let n = a.n_sites();
    let mut partial: Vec<(f64, Vec<(u8, u8)>)> = vec![(1.0, Vec::with_capacity(n))];
    for (&ea, &eb) in a.exps().iter().zip(b.exps()) {
        let site = site_product(ea, eb);
        if site.len() == 1 {
            let (w, e) = site[0];
            for p in &mut partial {
                p.0 *= w;
                p.1.push(e);
            }
        } else {
            let mut next = Vec::with_capacity(partial.len() * site.len());
            for (pw, pe) in &partial {
                for &(w, e) in &site {
                    let mut v = pe.clone();
                    v.push(e);
                    next.push((pw * w, v));
                }
            }
            partial = next;
        }
    }
    let mut out = OperatorPolynomial::zero(n);
    for (w, e) in partial {
        out.add_term(NormalMonomial::new(e), C64::new(w, 0.0));
    }
    out
}
