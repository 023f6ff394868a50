//! Degree-bounded membership in the subalgebra generated by a finite list of
//! elements.
//!
//! Products of generators are enumerated level by level in total degree,
//! expanded to coordinates, and echelonized with fraction-free elimination
//! over the Gaussian integers. Every echelon row remembers which product
//! words it came from, so a positive answer always comes with an exact
//! certificate.
//!
//! A generator that already lies in the span of products of earlier
//! generators (at its own degree) is dropped before it can multiply into
//! anything. This does not change the span at any bound and keeps the
//! enumeration small for families containing redundant powers.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};
use crate::pbw::{Algebra, Monomial, UeaElement};
use crate::scalar::{clear_denominators, integer_content, GaussInt, Scalar};

/// Default cap on the number of product words in all-words enumeration.
pub const DEFAULT_WORD_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanMode {
    Noncommutative,
    Commutative,
}

/// How products were enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Enumeration {
    /// Generators commute pairwise; only non-decreasing words are used.
    OrderedMonomials,
    AllWords,
}

/// The operations membership needs from an algebra.
pub trait SpanRing {
    type Elem: Clone + PartialEq;
    type Key: Clone + Eq + Hash;

    fn mode(&self) -> SpanMode;
    fn rank(&self) -> usize;
    fn elem_rank(&self, a: &Self::Elem) -> usize;
    fn one(&self) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn degree(&self, a: &Self::Elem) -> Option<u32>;
    fn coordinates<'a>(&self, a: &'a Self::Elem) -> Vec<(&'a Self::Key, &'a Scalar)>;
    fn add_scaled(&self, acc: &mut Self::Elem, x: &Self::Elem, s: &Scalar);

    fn commutes(&self, a: &Self::Elem, b: &Self::Elem) -> Result<bool> {
        Ok(self.multiply(a, b)? == self.multiply(b, a)?)
    }
}

impl SpanRing for Algebra {
    type Elem = UeaElement;
    type Key = Monomial;

    fn mode(&self) -> SpanMode {
        SpanMode::Noncommutative
    }
    fn rank(&self) -> usize {
        Algebra::rank(self)
    }
    fn elem_rank(&self, a: &UeaElement) -> usize {
        a.rank()
    }
    fn one(&self) -> UeaElement {
        Algebra::one(self)
    }
    fn zero(&self) -> UeaElement {
        Algebra::zero(self)
    }
    fn multiply(&self, a: &UeaElement, b: &UeaElement) -> Result<UeaElement> {
        Algebra::multiply(self, a, b)
    }
    fn degree(&self, a: &UeaElement) -> Option<u32> {
        a.degree()
    }
    fn coordinates<'a>(&self, a: &'a UeaElement) -> Vec<(&'a Monomial, &'a Scalar)> {
        a.terms().iter().collect()
    }
    fn add_scaled(&self, acc: &mut UeaElement, x: &UeaElement, s: &Scalar) {
        acc.add_scaled(x, s);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    InSpan,
    /// Not a combination of products of degree at most the bound. Says
    /// nothing about higher bounds.
    NotInSpanUpToBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateTerm {
    /// Indices into the original generator list, in multiplication order.
    pub word: Vec<usize>,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub verdict: Verdict,
    pub certificate: Vec<CertificateTerm>,
    pub bound: u32,
}

impl MembershipResult {
    pub fn in_span(&self) -> bool {
        self.verdict == Verdict::InSpan
    }
}

/// Sparse integer vector, sorted by strictly decreasing index.
type Sparse = Vec<(u32, GaussInt)>;

struct Row {
    vec: Sparse,
    /// `vec = Σ prov[w] · product(w)`.
    prov: Sparse,
}

fn gi_neg(a: &GaussInt) -> GaussInt {
    GaussInt { re: -&a.re, im: -&a.im }
}

fn gi_is_one(a: &GaussInt) -> bool {
    a.re.is_one() && a.im.is_zero()
}

/// `a·x − b·y`, dropping zeros.
fn combine(a: &GaussInt, x: &Sparse, b: &GaussInt, y: &Sparse) -> Sparse {
    let scale = |s: &GaussInt, v: &GaussInt| if gi_is_one(s) { v.clone() } else { s.mul(v) };
    let mut out = Vec::with_capacity(x.len().max(y.len()));
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 > y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 > x[i].0);
        if take_x {
            out.push((x[i].0, scale(a, &x[i].1)));
            i += 1;
        } else if take_y {
            out.push((y[j].0, gi_neg(&scale(b, &y[j].1))));
            j += 1;
        } else {
            let v = scale(a, &x[i].1).sub(&scale(b, &y[j].1));
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn divide_out(v: &mut Sparse, g: &BigInt) {
    for (_, x) in v.iter_mut() {
        *x = x.div_exact_int(g);
    }
}

struct Product<E> {
    word: u32,
    degree: u32,
    /// Position of the last factor in the retained list.
    last: Option<usize>,
    elem: E,
}

/// Echelonized span of all products of generators up to a degree bound.
pub struct SpanBasis<'r, R: SpanRing> {
    ring: &'r R,
    gens: Vec<R::Elem>,
    bound: u32,
    enumeration: Enumeration,
    word_cap: usize,
    retained: Vec<usize>,
    dropped: Vec<usize>,
    words: Vec<Vec<usize>>,
    columns: HashMap<R::Key, u32>,
    rows: Vec<Row>,
    pivots: HashMap<u32, usize>,
}

impl<R: SpanRing> std::fmt::Debug for SpanBasis<'_, R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpanBasis")
            .field("mode", &self.ring.mode())
            .field("bound", &self.bound)
            .field("enumeration", &self.enumeration)
            .field("dimension", &self.rows.len())
            .field("retained", &self.retained)
            .finish()
    }
}

/// Builds the span with the default all-words cap.
pub fn build_span<'r, R: SpanRing>(ring: &'r R, gens: &[R::Elem], bound: u32) -> Result<SpanBasis<'r, R>> {
    build_span_capped(ring, gens, bound, DEFAULT_WORD_CAP)
}

pub fn build_span_capped<'r, R: SpanRing>(
    ring: &'r R,
    gens: &[R::Elem],
    bound: u32,
    word_cap: usize,
) -> Result<SpanBasis<'r, R>> {
    if gens.is_empty() {
        return Err(AlgebraError::EmptyGenerators);
    }
    for g in gens {
        if ring.elem_rank(g) != ring.rank() {
            return Err(AlgebraError::RankMismatch(ring.rank(), ring.elem_rank(g)));
        }
    }
    let min = gens.iter().map(|g| ring.degree(g).unwrap_or(0)).min().unwrap_or(0);
    if bound < min {
        return Err(AlgebraError::BoundTooSmall { bound, min });
    }
    let mut basis = SpanBasis::empty(ring, gens.to_vec(), bound, Enumeration::OrderedMonomials, word_cap);
    if basis.fill()? {
        return Ok(basis);
    }
    let mut basis = SpanBasis::empty(ring, gens.to_vec(), bound, Enumeration::AllWords, word_cap);
    basis.fill()?;
    Ok(basis)
}

impl<'r, R: SpanRing> SpanBasis<'r, R> {
    fn empty(ring: &'r R, gens: Vec<R::Elem>, bound: u32, enumeration: Enumeration, word_cap: usize) -> Self {
        SpanBasis {
            ring,
            gens,
            bound,
            enumeration,
            word_cap,
            retained: Vec::new(),
            dropped: Vec::new(),
            words: Vec::new(),
            columns: HashMap::new(),
            rows: Vec::new(),
            pivots: HashMap::new(),
        }
    }

    pub fn mode(&self) -> SpanMode {
        self.ring.mode()
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn enumeration(&self) -> Enumeration {
        self.enumeration
    }

    /// Dimension of the truncated span, constants included.
    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn generators(&self) -> &[R::Elem] {
        &self.gens
    }

    /// Generators that took part in the enumeration.
    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    /// Generators found redundant at their own degree.
    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    pub fn n_products(&self) -> usize {
        self.words.len()
    }

    /// Runs the enumeration. Returns `false` when ordered-monomial mode
    /// meets a non-commuting pair, in which case the caller restarts with
    /// all words.
    fn fill(&mut self) -> Result<bool> {
        let one = self.ring.one();
        let mut products: Vec<Product<R::Elem>> = Vec::new();
        let w0 = self.push_word(Vec::new())?;
        self.insert_product(w0, &one);
        products.push(Product { word: w0, degree: 0, last: None, elem: one });

        let mut order: Vec<(u32, usize)> = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            match self.ring.degree(g) {
                Some(deg) if deg > 0 && deg <= self.bound => order.push((deg, i)),
                _ => self.dropped.push(i),
            }
        }
        order.sort();
        let mut next_gen = 0;

        for level in 1..=self.bound {
            // Products of already retained generators landing at this degree.
            let mut fresh = Vec::new();
            let retained = self.retained.clone();
            for (pos, &gi) in retained.iter().enumerate() {
                let gdeg = self.ring.degree(&self.gens[gi]).unwrap_or(0);
                if gdeg >= level {
                    continue;
                }
                for p in products.iter().filter(|p| p.degree == level - gdeg && p.degree > 0) {
                    if self.enumeration == Enumeration::OrderedMonomials && p.last.is_some_and(|l| l > pos) {
                        continue;
                    }
                    let mut word = self.words[p.word as usize].clone();
                    word.push(gi);
                    let elem = self.ring.multiply(&p.elem, &self.gens[gi])?;
                    let id = self.push_word(word)?;
                    self.insert_product(id, &elem);
                    fresh.push(Product { word: id, degree: level, last: Some(pos), elem });
                }
            }
            products.extend(fresh);

            // Generators of this degree: drop if redundant, else retain.
            while next_gen < order.len() && order[next_gen].0 == level {
                let gi = order[next_gen].1;
                next_gen += 1;
                let g = self.gens[gi].clone();
                if self.reduce_target(&g).is_some() {
                    self.dropped.push(gi);
                    continue;
                }
                if self.enumeration == Enumeration::OrderedMonomials {
                    for &r in &self.retained {
                        if !self.ring.commutes(&self.gens[r], &g)? {
                            return Ok(false);
                        }
                    }
                }
                let pos = self.retained.len();
                self.retained.push(gi);
                let id = self.push_word(vec![gi])?;
                self.insert_product(id, &g);
                products.push(Product { word: id, degree: level, last: Some(pos), elem: g });
            }
        }
        self.dropped.sort_unstable();
        Ok(true)
    }

    fn push_word(&mut self, word: Vec<usize>) -> Result<u32> {
        if self.words.len() >= self.word_cap {
            return Err(AlgebraError::EnumerationCap(self.word_cap));
        }
        self.words.push(word);
        Ok((self.words.len() - 1) as u32)
    }

    /// Integer coordinates of `x` (scaled by the returned denominator), with
    /// unseen monomials interned when `intern` is set. `None` when `x` has a
    /// monomial that is not a column yet and interning is off.
    fn integer_vector(&mut self, x: &R::Elem, intern: bool) -> Option<(Sparse, BigInt)> {
        let coords = self.ring.coordinates(x);
        let (ints, den) = clear_denominators(coords.iter().map(|(_, c)| *c));
        let mut v = Vec::with_capacity(ints.len());
        for ((k, _), iv) in coords.iter().zip(ints) {
            let col = match self.columns.get(*k) {
                Some(&c) => c,
                None if intern => {
                    let c = self.columns.len() as u32;
                    self.columns.insert((*k).clone(), c);
                    c
                }
                None => return None,
            };
            v.push((col, iv));
        }
        v.sort_unstable_by_key(|x| std::cmp::Reverse(x.0));
        Some((v, den))
    }

    fn insert_product(&mut self, word: u32, elem: &R::Elem) {
        let Some((mut vec, den)) = self.integer_vector(elem, true) else { unreachable!() };
        let mut prov: Sparse = vec![(word, GaussInt { re: den, im: BigInt::zero() })];
        while let Some((lead, b)) = vec.first().cloned() {
            let Some(&r) = self.pivots.get(&lead) else {
                let g = integer_content(vec.iter().chain(prov.iter()).map(|(_, x)| x));
                if !g.is_one() {
                    divide_out(&mut vec, &g);
                    divide_out(&mut prov, &g);
                }
                self.pivots.insert(lead, self.rows.len());
                self.rows.push(Row { vec, prov });
                return;
            };
            let row = &self.rows[r];
            let a = &row.vec[0].1;
            vec = combine(a, &vec, &b, &row.vec);
            prov = combine(a, &prov, &b, &row.prov);
            let g = integer_content(vec.iter().chain(prov.iter()).map(|(_, x)| x));
            if !g.is_one() {
                divide_out(&mut vec, &g);
                divide_out(&mut prov, &g);
            }
        }
    }

    /// Tests whether `target` is a combination of the enumerated products.
    pub fn membership(&self, target: &R::Elem) -> Result<MembershipResult> {
        if self.ring.elem_rank(target) != self.ring.rank() {
            return Err(AlgebraError::RankMismatch(self.ring.rank(), self.ring.elem_rank(target)));
        }
        if let Some(deg) = self.ring.degree(target) {
            if deg > self.bound {
                return Err(AlgebraError::DegreeOverflow { degree: deg, bound: self.bound });
            }
        }
        let reduced = self.reduce_target(target);
        let bound = self.bound;
        let Some((sigma, prov)) = reduced else {
            return Ok(MembershipResult { verdict: Verdict::NotInSpanUpToBound, certificate: Vec::new(), bound });
        };
        let denom = gi_neg(&sigma).to_scalar();
        let mut certificate = Vec::with_capacity(prov.len());
        for (w, c) in prov.iter().rev() {
            let coeff = c.to_scalar().checked_div(&denom)?;
            certificate.push(CertificateTerm { word: self.words[*w as usize].clone(), coeff });
        }
        Ok(MembershipResult { verdict: Verdict::InSpan, certificate, bound })
    }

    /// Reduces `target`; on success returns `(σ, prov)` with
    /// `σ·target + Σ prov[w]·product(w) = 0`. `None` as soon as a leading
    /// coordinate has no pivot.
    fn reduce_target(&self, target: &R::Elem) -> Option<(GaussInt, Sparse)> {
        let coords = self.ring.coordinates(target);
        let (ints, den) = clear_denominators(coords.iter().map(|(_, c)| *c));
        let mut vec: Sparse = Vec::with_capacity(ints.len());
        for ((k, _), iv) in coords.iter().zip(ints) {
            vec.push((*self.columns.get(*k)?, iv));
        }
        vec.sort_unstable_by_key(|x| std::cmp::Reverse(x.0));
        let mut sigma = GaussInt { re: den, im: BigInt::zero() };
        let mut prov: Sparse = Vec::new();
        while let Some((lead, b)) = vec.first().cloned() {
            let &r = self.pivots.get(&lead)?;
            let row = &self.rows[r];
            let a = &row.vec[0].1;
            vec = combine(a, &vec, &b, &row.vec);
            prov = combine(a, &prov, &b, &row.prov);
            sigma = a.mul(&sigma);
            let g = integer_content(vec.iter().chain(prov.iter()).map(|(_, x)| x).chain(std::iter::once(&sigma)));
            if !g.is_one() {
                divide_out(&mut vec, &g);
                divide_out(&mut prov, &g);
                sigma = sigma.div_exact_int(&g);
            }
        }
        Some((sigma, prov))
    }
}

/// Re-expands a certificate: `Σ coeff · Π gens[word]`.
pub fn expand_certificate<R: SpanRing>(ring: &R, gens: &[R::Elem], certificate: &[CertificateTerm]) -> Result<R::Elem> {
    let mut acc = ring.zero();
    for term in certificate {
        let mut prod = ring.one();
        for &i in &term.word {
            let g = gens.get(i).ok_or(AlgebraError::IndexOutOfRange { what: "generator", index: i, bound: gens.len() })?;
            prod = ring.multiply(&prod, g)?;
        }
        ring.add_scaled(&mut acc, &prod, &term.coeff);
    }
    Ok(acc)
}

/// True when the certificate re-expands to exactly `target`.
pub fn verify_certificate<R: SpanRing>(ring: &R, gens: &[R::Elem], target: &R::Elem, certificate: &[CertificateTerm]) -> Result<bool> {
    Ok(expand_certificate(ring, gens, certificate)? == *target)
}
