//! Polynomials in the commuting matrix entries `b_ij` of a `d × d` matrix.
//!
//! The Hermitian relation `b_ji = conj(b_ij)` is only imposed when a
//! polynomial is evaluated; in the ring the `d²` entries are independent.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use crate::blocks::{BlockPartition, BlockWord, FamilyKind};
use crate::error::{AlgebraError, Result};
use crate::pbw::{add_term, write_coeff_term, Monomial};
use crate::scalar::Scalar;
use crate::span::{SpanMode, SpanRing};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CommPoly {
    d: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

fn var_index(d: usize, i: usize, j: usize) -> Result<usize> {
    if i == 0 || i > d {
        return Err(AlgebraError::IndexOutOfRange { what: "row index", index: i, bound: d });
    }
    if j == 0 || j > d {
        return Err(AlgebraError::IndexOutOfRange { what: "column index", index: j, bound: d });
    }
    Ok((i - 1) * d + (j - 1))
}

impl CommPoly {
    pub fn zero(d: usize) -> Self {
        CommPoly { d, terms: BTreeMap::new() }
    }

    pub fn constant(d: usize, c: Scalar) -> Self {
        let mut p = Self::zero(d);
        add_term(&mut p.terms, Monomial::unit(d * d), c);
        p
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, Scalar::ONE)
    }

    /// The entry `b_ij` (1-based).
    pub fn var(d: usize, i: usize, j: usize) -> Result<Self> {
        let k = var_index(d, i, j)?;
        Ok(CommPoly { d, terms: BTreeMap::from([(Monomial::single(d * d, k), Scalar::ONE)]) })
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Scalar)>>(d: usize, terms: I) -> Self {
        let mut p = Self::zero(d);
        for (m, c) in terms {
            add_term(&mut p.terms, m, c);
        }
        p
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
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

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::from_terms(self.d, self.terms.iter().map(|(m, c)| (m.clone(), c * s)))
    }

    pub fn add_scaled(&mut self, other: &Self, s: &Scalar) {
        for (m, c) in &other.terms {
            add_term(&mut self.terms, m.clone(), c * s);
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(AlgebraError::RankMismatch(self.d, other.d));
        }
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let v = ca * cb;
                match acc.get_mut(&ma.concat(mb)) {
                    Some(x) => *x += &v,
                    None => {
                        acc.insert(ma.concat(mb), v);
                    }
                }
            }
        }
        Ok(Self::from_terms(self.d, acc))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("rank mismatch")
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.d), |acc, _| acc.mul(self))
    }

    /// `∂/∂b_ij`.
    pub fn derivative(&self, i: usize, j: usize) -> Result<Self> {
        let k = var_index(self.d, i, j)?;
        let mut out = Self::zero(self.d);
        for (m, c) in &self.terms {
            let e = m.exponents()[k];
            if e > 0 {
                add_term(&mut out.terms, m.with_decremented(k), c.mul_int(e as i64));
            }
        }
        Ok(out)
    }

    /// Value at a row-major `d × d` complex matrix.
    pub fn eval(&self, m: &[Complex64]) -> Result<Complex64> {
        if m.len() != self.d * self.d {
            return Err(AlgebraError::DimensionMismatch { expected: self.d * self.d, got: m.len() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (mono, c) in &self.terms {
            let mut t = c.to_complex();
            for (k, &e) in mono.exponents().iter().enumerate() {
                if e > 0 {
                    t *= m[k].powu(e as u32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }
}

impl Add for &CommPoly {
    type Output = CommPoly;
    fn add(self, rhs: &CommPoly) -> CommPoly {
        assert_eq!(self.d, rhs.d, "rank mismatch");
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::ONE);
        out
    }
}

impl Sub for &CommPoly {
    type Output = CommPoly;
    fn sub(self, rhs: &CommPoly) -> CommPoly {
        assert_eq!(self.d, rhs.d, "rank mismatch");
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::ONE);
        out
    }
}

impl Neg for &CommPoly {
    type Output = CommPoly;
    fn neg(self) -> CommPoly {
        self.scale(&-Scalar::ONE)
    }
}

impl fmt::Display for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let mut parts = Vec::new();
            for (k, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = format!("b[{},{}]", k / self.d + 1, k % self.d + 1);
                parts.push(if e == 1 { v } else { format!("{v}^{e}") });
            }
            let body = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
            write_coeff_term(f, n == 0, c, &body)?;
        }
        Ok(())
    }
}

impl fmt::Debug for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P(M_{})[{}]", self.d, self)
    }
}

/// The polynomial ring in the entries of a `d × d` matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CommRing {
    d: usize,
}

impl CommRing {
    pub fn new(d: usize) -> Self {
        CommRing { d }
    }
}

impl SpanRing for CommRing {
    type Elem = CommPoly;
    type Key = Monomial;

    fn mode(&self) -> SpanMode {
        SpanMode::Commutative
    }
    fn rank(&self) -> usize {
        self.d
    }
    fn elem_rank(&self, a: &CommPoly) -> usize {
        a.d
    }
    fn one(&self) -> CommPoly {
        CommPoly::one(self.d)
    }
    fn zero(&self) -> CommPoly {
        CommPoly::zero(self.d)
    }
    fn multiply(&self, a: &CommPoly, b: &CommPoly) -> Result<CommPoly> {
        a.checked_mul(b)
    }
    fn degree(&self, a: &CommPoly) -> Option<u32> {
        a.degree()
    }
    fn coordinates<'a>(&self, a: &'a CommPoly) -> Vec<(&'a Monomial, &'a Scalar)> {
        a.terms.iter().collect()
    }
    fn add_scaled(&self, acc: &mut CommPoly, x: &CommPoly, s: &Scalar) {
        acc.add_scaled(x, s);
    }
    fn commutes(&self, _: &CommPoly, _: &CommPoly) -> Result<bool> {
        Ok(true)
    }
}

fn chain_trace(d: usize, allowed: &[Vec<usize>]) -> Result<CommPoly> {
    let q = allowed.len();
    let mut total = CommPoly::zero(d);
    for &start in &allowed[0] {
        let mut state: BTreeMap<usize, CommPoly> = BTreeMap::from([(start, CommPoly::one(d))]);
        #[allow(clippy::needless_range_loop)]
        for k in 1..=q {
            let targets: &[usize] = if k == q { std::slice::from_ref(&start) } else { &allowed[k] };
            let mut next = BTreeMap::new();
            for &j in targets {
                let mut acc = CommPoly::zero(d);
                for (&l, prod) in &state {
                    acc = &acc + &prod.mul(&CommPoly::var(d, l, j)?);
                }
                if !acc.is_zero() {
                    next.insert(j, acc);
                }
            }
            state = next;
        }
        if let Some(v) = state.get(&start) {
            total = &total + v;
        }
    }
    Ok(total)
}

/// `Tr(B_{i1 i2} ⋯ B_{iq i1})` as a polynomial in the entries.
pub fn comm_trace_word(part: &BlockPartition, w: &BlockWord) -> Result<CommPoly> {
    w.validate(part)?;
    let allowed: Vec<Vec<usize>> = w.indices().iter().map(|&b| part.block(b).map(Iterator::collect)).collect::<Result<_>>()?;
    chain_trace(part.d(), &allowed)
}

/// `Tr(C^k)` for the top-left `size × size` corner of `B`.
pub fn comm_corner_trace_power(d: usize, size: usize, k: usize) -> Result<CommPoly> {
    if size == 0 || size > d {
        return Err(AlgebraError::IndexOutOfRange { what: "corner size", index: size, bound: d });
    }
    let range: Vec<usize> = (1..=size).collect();
    chain_trace(d, &vec![range; k.max(1)])
}

#[derive(Clone, Debug)]
pub struct CommFamilyMember {
    pub label: String,
    pub poly: CommPoly,
}

/// Commutative counterpart of [`crate::blocks::named_family`] with the same
/// members and labels.
pub fn comm_named_family(part: &BlockPartition, kind: FamilyKind, kmax: usize) -> Result<Vec<CommFamilyMember>> {
    if kmax == 0 {
        return Err(AlgebraError::InvalidArgument("kmax must be at least 1".into()));
    }
    let (d, p) = (part.d(), part.p());
    let corner = |size: usize, k: usize, name: &str| -> Result<CommFamilyMember> {
        Ok(CommFamilyMember { label: format!("Tr({name}^{k})"), poly: comm_corner_trace_power(d, size, k)? })
    };
    let mut out = Vec::new();
    match kind {
        FamilyKind::Casimir => {
            for k in 1..=kmax {
                out.push(corner(d, k, "B")?);
            }
        }
        FamilyKind::P1 => {
            if p < 1 {
                return Err(AlgebraError::IncompatibleFamily { kind: "p1", p });
            }
            for k in 1..=kmax {
                if k < kmax {
                    out.push(corner(d - p, k, "B_11")?);
                }
                out.push(corner(d, k, "B")?);
            }
        }
        FamilyKind::P2Nested => {
            if p < 2 {
                return Err(AlgebraError::IncompatibleFamily { kind: "p2_nested", p });
            }
            for k in 1..=kmax {
                for size in (d - p)..=d {
                    let name = if size == d { "B".to_string() } else { format!("B[{size}]") };
                    out.push(corner(size, k, &name)?);
                }
            }
        }
        FamilyKind::Klink => {
            for w in BlockWord::all_up_to(part.n_blocks(), kmax) {
                out.push(CommFamilyMember { label: format!("W{w}"), poly: comm_trace_word(part, &w)? });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(d: usize, i: usize, j: usize) -> CommPoly {
        CommPoly::var(d, i, j).unwrap()
    }

    #[test]
    fn trace_word_examples() {
        let part = BlockPartition::new(3, 2).unwrap();
        let w = comm_trace_word(&part, &BlockWord::new(vec![1, 3]).unwrap()).unwrap();
        assert_eq!(w, b(3, 1, 3).mul(&b(3, 3, 1)));
        let part = BlockPartition::new(4, 0).unwrap();
        let tr = comm_trace_word(&part, &BlockWord::new(vec![1]).unwrap()).unwrap();
        assert_eq!(tr, (1..=4).fold(CommPoly::zero(4), |acc, i| &acc + &b(4, i, i)));
        let part = BlockPartition::new(3, 1).unwrap();
        let sq = comm_trace_word(&part, &BlockWord::new(vec![1, 1]).unwrap()).unwrap();
        let mut expect = CommPoly::zero(3);
        for i in 1..=2 {
            for j in 1..=2 {
                expect = &expect + &b(3, i, j).mul(&b(3, j, i));
            }
        }
        assert_eq!(sq, expect);
        assert!(comm_trace_word(&part, &BlockWord::new(vec![3]).unwrap()).is_err());
    }

    #[test]
    fn derivative_and_display() {
        let p = b(2, 1, 2).mul(&b(2, 2, 1)).mul(&b(2, 2, 1));
        assert_eq!(p.to_string(), "b[1,2]*b[2,1]^2");
        assert_eq!(p.derivative(2, 1).unwrap(), b(2, 1, 2).mul(&b(2, 2, 1)).scale(&Scalar::from_int(2)));
        assert!(p.derivative(1, 1).unwrap().is_zero());
        assert!(p.derivative(3, 1).is_err());
    }

    #[test]
    fn evaluation() {
        let p = &b(2, 1, 2).mul(&b(2, 2, 1)) + &CommPoly::constant(2, Scalar::from_int(3));
        let m = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(0.0, -2.0), Complex64::new(5.0, 0.0)];
        assert_eq!(p.eval(&m).unwrap(), Complex64::new(7.0, 0.0));
    }
}
