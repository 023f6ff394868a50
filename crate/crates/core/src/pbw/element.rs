use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{AlgebraError, Result};
use crate::scalar::{Rational, Scalar};

use super::generator::{pbw_index, Generator};
use super::monomial::Monomial;

/// An element of `U(gl_d)` in PBW normal form: a finite map from ordered
/// monomials to nonzero coefficients. Two elements are equal iff their term
/// maps are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UeaElement {
    rank: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

pub(crate) fn add_term<K: Ord>(terms: &mut BTreeMap<K, Scalar>, key: K, coeff: Scalar) {
    if coeff.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match terms.entry(key) {
        Entry::Vacant(v) => {
            v.insert(coeff);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += &coeff;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl UeaElement {
    pub fn zero(rank: usize) -> Self {
        UeaElement { rank, terms: BTreeMap::new() }
    }

    pub fn constant(rank: usize, c: Scalar) -> Self {
        let mut e = Self::zero(rank);
        add_term(&mut e.terms, Monomial::unit(rank * rank), c);
        e
    }

    pub fn one(rank: usize) -> Self {
        Self::constant(rank, Scalar::ONE)
    }

    pub fn generator(rank: usize, g: Generator) -> Result<Self> {
        g.validate(rank)?;
        let mut e = Self::zero(rank);
        e.terms.insert(Monomial::single(rank * rank, pbw_index(rank, g)), Scalar::ONE);
        Ok(e)
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Scalar)>>(rank: usize, terms: I) -> Self {
        let mut e = Self::zero(rank);
        for (m, c) in terms {
            debug_assert_eq!(m.len(), rank * rank);
            add_term(&mut e.terms, m, c);
        }
        e
    }

    /// `e_ii` rewritten as `c/d + Σ_{m≥i} h_m − (1/d) Σ_m m·h_m`.
    pub fn desugar_eii(i: usize, rank: usize) -> Result<Self> {
        if i == 0 || i > rank {
            return Err(AlgebraError::IndexOutOfRange { what: "e[i,i]", index: i, bound: rank });
        }
        let d = rank as i64;
        let n = rank * rank;
        let mut e = Self::zero(rank);
        add_term(&mut e.terms, Monomial::single(n, pbw_index(rank, Generator::Central)), Scalar::ratio(1, d));
        for m in 1..rank {
            let mut coeff = Rational::new(-(m as i64), d);
            if m >= i {
                coeff = &coeff + &Rational::ONE;
            }
            add_term(&mut e.terms, Monomial::single(n, pbw_index(rank, Generator::Cartan(m))), Scalar::real(coeff));
        }
        Ok(e)
    }

    /// The matrix unit `e_ij` as an element, desugaring the diagonal.
    pub fn matrix_unit(i: usize, j: usize, rank: usize) -> Result<Self> {
        if i == j {
            Self::desugar_eii(i, rank)
        } else {
            Self::generator(rank, Generator::OffDiag(i, j))
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Scalar> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximal term degree, `None` for the zero element.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&Monomial::unit(self.rank * self.rank)).cloned().unwrap_or(Scalar::ZERO)
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or(Scalar::ZERO)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return Self::zero(self.rank);
        }
        UeaElement { rank: self.rank, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.rank != other.rank {
            return Err(AlgebraError::RankMismatch(self.rank, other.rank));
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_term(&mut out.terms, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn add_scaled(&mut self, other: &Self, s: &Scalar) {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        for (m, c) in &other.terms {
            add_term(&mut self.terms, m.clone(), c * s);
        }
    }

    pub(crate) fn add_monomial(&mut self, m: Monomial, c: Scalar) {
        add_term(&mut self.terms, m, c);
    }
}

impl Add for &UeaElement {
    type Output = UeaElement;
    /// Panics on rank mismatch; see [`UeaElement::checked_add`].
    fn add(self, rhs: &UeaElement) -> UeaElement {
        self.checked_add(rhs).expect("rank mismatch")
    }
}

impl Sub for &UeaElement {
    type Output = UeaElement;
    fn sub(self, rhs: &UeaElement) -> UeaElement {
        self.checked_sub(rhs).expect("rank mismatch")
    }
}

impl Neg for &UeaElement {
    type Output = UeaElement;
    fn neg(self) -> UeaElement {
        UeaElement { rank: self.rank, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

pub(crate) fn write_coeff_term(f: &mut fmt::Formatter<'_>, first: bool, c: &Scalar, body: &str) -> fmt::Result {
    let is_unit = body == "1";
    if c.is_real() {
        let neg = c.re.signum() < 0;
        let abs = if neg { -&c.re } else { c.re.clone() };
        match (first, neg) {
            (true, true) => write!(f, "-")?,
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
            (true, false) => {}
        }
        if is_unit {
            write!(f, "{abs}")
        } else if abs.is_one() {
            write!(f, "{body}")
        } else {
            write!(f, "{abs}*{body}")
        }
    } else {
        if !first {
            write!(f, " + ")?;
        }
        if is_unit {
            write!(f, "({c})")
        } else {
            write!(f, "({c})*{body}")
        }
    }
}

/// Grammar syntax, re-parseable by the expression parser.
impl fmt::Display for UeaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let body = m.display(self.rank).to_string();
            write_coeff_term(f, n == 0, c, &body)?;
        }
        Ok(())
    }
}

impl fmt::Debug for UeaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U(gl_{})[{}]", self.rank, self)
    }
}
