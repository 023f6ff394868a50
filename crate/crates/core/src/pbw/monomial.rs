use std::fmt;

use smallvec::SmallVec;

use super::generator::{pbw_order, Generator};

/// Exponent vector over the PBW-ordered generator list of a fixed rank.
/// The empty product (all exponents zero) is the unit.
/// Ordered by degree, then by PBW position (earlier generators first).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u8; 16]>);

impl Monomial {
    pub fn unit(n_gens: usize) -> Self {
        Monomial(SmallVec::from_elem(0, n_gens))
    }

    pub fn single(n_gens: usize, index: usize) -> Self {
        let mut m = Self::unit(n_gens);
        m.0[index] = 1;
        m
    }

    pub fn from_exponents(exps: &[u8]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Largest generator index with a nonzero exponent.
    pub fn last_index(&self) -> Option<usize> {
        self.0.iter().rposition(|&e| e != 0)
    }

    pub fn first_index(&self) -> Option<usize> {
        self.0.iter().position(|&e| e != 0)
    }

    pub fn with_incremented(&self, index: usize) -> Self {
        let mut m = self.clone();
        m.0[index] = m.0[index].checked_add(1).expect("exponent overflow");
        m
    }

    pub fn with_decremented(&self, index: usize) -> Self {
        let mut m = self.clone();
        m.0[index] -= 1;
        m
    }

    /// Exponent-wise sum; this is the PBW product only when every generator
    /// of `self` precedes every generator of `other`.
    pub fn concat(&self, other: &Monomial) -> Self {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// Generator indices in order, repeated by multiplicity.
    pub fn word(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
    }

    pub fn display(&self, d: usize) -> MonomialDisplay<'_> {
        MonomialDisplay { mono: self, order: pbw_order(d) }
    }

    /// `(generator, exponent)` pairs with nonzero exponent, in PBW order.
    pub fn factors(&self, d: usize) -> Vec<(Generator, u32)> {
        let order = pbw_order(d);
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (order[i], e as u32))
            .collect()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    order: Vec<Generator>,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.mono.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", self.order[i])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}
