//! Coproduct on `U(gl_d)`, the one-site state `η = tr∘ρ`, and the
//! transition operator `P = (id ⊗ η)∘Δ`.
//!
//! `e_ij` and `h_k` are primitive and `c` is grouplike. Because every leg of
//! `Δ(g^a)` is a power of the single generator `g`, the coproduct of an
//! ordered monomial is a sum of pairs of ordered monomials with binomial
//! coefficients; no reordering is needed.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use dashmap::DashMap;

use crate::error::{AlgebraError, Result};
use crate::pbw::{add_term, Algebra, Generator, Monomial, UeaElement};
use crate::scalar::Scalar;

/// Element of `U(gl_d) ⊗ U(gl_d)` in canonical form (both legs PBW-ordered).
#[derive(Clone, PartialEq, Eq)]
pub struct TensorElement {
    rank: usize,
    terms: BTreeMap<(Monomial, Monomial), Scalar>,
}

/// Three-fold tensor expansion used to compare `(Δ⊗id)Δ` and `(id⊗Δ)Δ`.
pub type Tensor3 = BTreeMap<(Monomial, Monomial, Monomial), Scalar>;

impl TensorElement {
    pub fn zero(rank: usize) -> Self {
        TensorElement { rank, terms: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &BTreeMap<(Monomial, Monomial), Scalar> {
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

    pub fn pure(a: &UeaElement, b: &UeaElement) -> Result<Self> {
        if a.rank() != b.rank() {
            return Err(AlgebraError::RankMismatch(a.rank(), b.rank()));
        }
        let mut t = Self::zero(a.rank());
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                add_term(&mut t.terms, (ma.clone(), mb.clone()), ca * cb);
            }
        }
        Ok(t)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut t = self.clone();
        for (k, c) in &other.terms {
            add_term(&mut t.terms, k.clone(), c.clone());
        }
        t
    }

    /// `(a⊗b)(c⊗d) = ac ⊗ bd`.
    pub fn multiply(&self, alg: &Algebra, other: &Self) -> Result<Self> {
        if self.rank != alg.rank() || other.rank != alg.rank() {
            return Err(AlgebraError::RankMismatch(self.rank, other.rank));
        }
        let d = self.rank;
        let mut out: HashMap<(Monomial, Monomial), Scalar> = HashMap::new();
        for ((a1, a2), ca) in &self.terms {
            for ((b1, b2), cb) in &other.terms {
                let left = alg.mul(&UeaElement::from_terms(d, [(a1.clone(), Scalar::ONE)]), &UeaElement::from_terms(d, [(b1.clone(), Scalar::ONE)]));
                let right = alg.mul(&UeaElement::from_terms(d, [(a2.clone(), Scalar::ONE)]), &UeaElement::from_terms(d, [(b2.clone(), Scalar::ONE)]));
                let coef = ca * cb;
                for (l, cl) in left.terms() {
                    let lc = &coef * cl;
                    for (r, cr) in right.terms() {
                        let v = &lc * cr;
                        out.entry((l.clone(), r.clone())).and_modify(|x| *x += &v).or_insert(v);
                    }
                }
            }
        }
        let mut t = Self::zero(d);
        for (k, c) in out {
            add_term(&mut t.terms, k, c);
        }
        Ok(t)
    }

    /// `(id ⊗ f)` contracting the right leg to a scalar.
    pub fn contract_right(&self, mut f: impl FnMut(&Monomial) -> Scalar) -> UeaElement {
        let mut out = UeaElement::zero(self.rank);
        for ((l, r), c) in &self.terms {
            let v = f(r);
            if !v.is_zero() {
                out.add_monomial(l.clone(), c * &v);
            }
        }
        out
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((l, r), c)) in self.terms.iter().enumerate() {
            let body = format!("({})⊗({})", l.display(self.rank), r.display(self.rank));
            crate::pbw::write_coeff_term(f, n == 0, c, &body)?;
        }
        Ok(())
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// `Δ(m)` for an ordered monomial as `(left, right, integer coefficient)`.
pub fn coproduct_monomial(rank: usize, m: &Monomial) -> Vec<(Monomial, Monomial, i64)> {
    let central = crate::pbw::pbw_index(rank, Generator::Central);
    let exps = m.exponents();
    let mut acc: Vec<(Vec<u8>, Vec<u8>, i64)> = vec![(vec![0; exps.len()], vec![0; exps.len()], 1)];
    for (idx, &a) in exps.iter().enumerate() {
        if a == 0 {
            continue;
        }
        if idx == central {
            for (l, r, _) in acc.iter_mut() {
                l[idx] = a;
                r[idx] = a;
            }
            continue;
        }
        let mut next = Vec::with_capacity(acc.len() * (a as usize + 1));
        for (l, r, k) in &acc {
            for left_exp in 0..=a {
                let mut l2 = l.clone();
                let mut r2 = r.clone();
                l2[idx] = left_exp;
                r2[idx] = a - left_exp;
                next.push((l2, r2, k * binomial(a as u32, left_exp as u32)));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(l, r, k)| (Monomial::from_exponents(&l), Monomial::from_exponents(&r), k))
        .collect()
}

/// Coproduct `Δ(u)`.
pub fn coproduct(u: &UeaElement) -> TensorElement {
    let rank = u.rank();
    let mut t = TensorElement::zero(rank);
    for (m, c) in u.terms() {
        for (l, r, k) in coproduct_monomial(rank, m) {
            add_term(&mut t.terms, (l, r), c.mul_int(k));
        }
    }
    t
}

/// `(Δ⊗id)Δ(u)`.
pub fn coproduct_left_twice(u: &UeaElement) -> Tensor3 {
    let mut out = Tensor3::new();
    for ((l, r), c) in coproduct(u).terms() {
        for (ll, lr, k) in coproduct_monomial(u.rank(), l) {
            add_term(&mut out, (ll, lr, r.clone()), c.mul_int(k));
        }
    }
    out
}

/// `(id⊗Δ)Δ(u)`.
pub fn coproduct_right_twice(u: &UeaElement) -> Tensor3 {
    let mut out = Tensor3::new();
    for ((l, r), c) in coproduct(u).terms() {
        for (rl, rr, k) in coproduct_monomial(u.rank(), r) {
            add_term(&mut out, (l.clone(), rl, rr), c.mul_int(k));
        }
    }
    out
}

/// The one-site state `η(m) = tr ρ(m)` (normalized trace in the defining
/// representation) and the transition operator `P = (id⊗η)∘Δ`, with caches
/// for `η` on monomials and `P` on monomials.
pub struct MarkovOperator<'a> {
    alg: &'a Algebra,
    eta_cache: DashMap<Monomial, Scalar>,
    p_cache: DashMap<Monomial, UeaElement>,
}

impl<'a> MarkovOperator<'a> {
    pub fn new(alg: &'a Algebra) -> Self {
        MarkovOperator { alg, eta_cache: DashMap::new(), p_cache: DashMap::new() }
    }

    pub fn algebra(&self) -> &'a Algebra {
        self.alg
    }

    pub fn eta_monomial(&self, m: &Monomial) -> Scalar {
        if m.is_unit() {
            return Scalar::ONE;
        }
        if let Some(v) = self.eta_cache.get(m) {
            return v.clone();
        }
        let d = self.alg.rank();
        let mut acc = crate::matrix::DenseMatrix::identity(d);
        for g in m.word() {
            acc = &acc * self.alg.generator_matrix(g);
        }
        let v = acc.normalized_trace();
        self.eta_cache.insert(m.clone(), v.clone());
        v
    }

    /// `η(u) = tr(ρ(u))` with `tr` the normalized trace.
    pub fn eta(&self, u: &UeaElement) -> Result<Scalar> {
        if u.rank() != self.alg.rank() {
            return Err(AlgebraError::RankMismatch(self.alg.rank(), u.rank()));
        }
        let mut s = Scalar::ZERO;
        for (m, c) in u.terms() {
            s += &(c * &self.eta_monomial(m));
        }
        Ok(s)
    }

    fn p_monomial(&self, m: &Monomial) -> UeaElement {
        if let Some(v) = self.p_cache.get(m) {
            return v.clone();
        }
        let mut out = UeaElement::zero(self.alg.rank());
        for (l, r, k) in coproduct_monomial(self.alg.rank(), m) {
            let e = self.eta_monomial(&r);
            if !e.is_zero() {
                out.add_monomial(l, e.mul_int(k));
            }
        }
        self.p_cache.insert(m.clone(), out.clone());
        out
    }

    /// `P(u) = Σ u¹ η(u²)`.
    pub fn apply(&self, u: &UeaElement) -> Result<UeaElement> {
        if u.rank() != self.alg.rank() {
            return Err(AlgebraError::RankMismatch(self.alg.rank(), u.rank()));
        }
        let mut out = UeaElement::zero(u.rank());
        for (m, c) in u.terms() {
            out.add_scaled(&self.p_monomial(m), c);
        }
        Ok(out)
    }

    /// `P^k(u)`.
    pub fn apply_iter(&self, u: &UeaElement, k: usize) -> Result<UeaElement> {
        let mut cur = u.clone();
        for _ in 0..k {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }
}

pub fn eta(alg: &Algebra, u: &UeaElement) -> Result<Scalar> {
    MarkovOperator::new(alg).eta(u)
}

pub fn apply_p(alg: &Algebra, u: &UeaElement) -> Result<UeaElement> {
    MarkovOperator::new(alg).apply(u)
}

pub fn apply_p_iter(alg: &Algebra, u: &UeaElement, k: usize) -> Result<UeaElement> {
    MarkovOperator::new(alg).apply_iter(u, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    #[test]
    fn coproduct_examples() {
        let a = Algebra::new(2);
        let h = a.gen(Cartan(1)).unwrap();
        let c = a.gen(Central).unwrap();
        let one = a.one();
        let expected = TensorElement::pure(&h, &one).unwrap().add(&TensorElement::pure(&one, &h).unwrap());
        assert_eq!(coproduct(&h), expected);
        assert_eq!(coproduct(&c), TensorElement::pure(&c, &c).unwrap());
        let h2 = a.mul(&h, &h);
        let two_hh = TensorElement::pure(&h.scale(&Scalar::from_int(2)), &h).unwrap();
        let expected = TensorElement::pure(&h2, &one)
            .unwrap()
            .add(&two_hh)
            .add(&TensorElement::pure(&one, &h2).unwrap());
        assert_eq!(coproduct(&h2), expected);
    }

    #[test]
    fn eta_examples() {
        let a = Algebra::new(2);
        let op = MarkovOperator::new(&a);
        assert!(op.eta(&a.gen(OffDiag(1, 2)).unwrap()).unwrap().is_zero());
        assert_eq!(op.eta(&a.gen(Central).unwrap()).unwrap(), Scalar::ONE);
        // Tr(E²) = Σ e_ij e_ji
        let mut cas = a.zero();
        for i in 1..=2 {
            for j in 1..=2 {
                cas = &cas + &a.mul(&a.unit(i, j).unwrap(), &a.unit(j, i).unwrap());
            }
        }
        assert_eq!(op.eta(&cas).unwrap(), Scalar::from_int(2));
    }

    #[test]
    fn p_examples() {
        let a = Algebra::new(2);
        let op = MarkovOperator::new(&a);
        assert_eq!(op.apply(&a.one()).unwrap(), a.one());
        let h = a.gen(Cartan(1)).unwrap();
        let h2 = a.mul(&h, &h);
        assert_eq!(op.apply(&h2).unwrap(), &h2 + &a.one());
        let e12 = a.gen(OffDiag(1, 2)).unwrap();
        assert_eq!(op.apply(&e12).unwrap(), e12);
        assert_eq!(op.apply_iter(&h2, 0).unwrap(), h2);
        for k in 1..6 {
            assert_eq!(op.apply_iter(&h2, k).unwrap(), &h2 + &a.constant(Scalar::from_int(k as i64)));
        }
        let c = a.gen(Central).unwrap();
        assert_eq!(op.apply_iter(&c, 4).unwrap(), c);
    }

    #[test]
    fn coassociative_on_mixed_monomial() {
        let a = Algebra::new(3);
        let u = a.product([
            &a.gen(OffDiag(1, 3)).unwrap(),
            &a.gen(Cartan(2)).unwrap(),
            &a.gen(Central).unwrap(),
            &a.gen(Central).unwrap(),
            &a.gen(OffDiag(2, 1)).unwrap(),
        ]);
        assert_eq!(coproduct_left_twice(&u), coproduct_right_twice(&u));
    }
}
