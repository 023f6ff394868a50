use std::collections::HashMap;
use std::sync::Arc;

use dashmap::DashMap;

use crate::error::{AlgebraError, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

use super::element::UeaElement;
use super::generator::{pbw_index, pbw_order, Generator};
use super::monomial::Monomial;

/// A generator tagged with the rank it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorId {
    pub rank: usize,
    pub gen: Generator,
}

impl GeneratorId {
    pub fn new(rank: usize, gen: Generator) -> Result<Self> {
        gen.validate(rank)?;
        Ok(GeneratorId { rank, gen })
    }
}

/// Sparse integer combination of monomials; the structure constants of
/// `gl_d` in the `{e_ij, h_k, c}` basis are integers, so all rewriting is
/// done over `i64` and only lifted to [`Scalar`] when accumulated.
type IntTerms = Arc<[(Monomial, i64)]>;

/// `U(gl_d)` for a fixed rank: generator table, structure constants and a
/// memo of single-generator insertions into ordered monomials.
///
/// Elements are plain values; this context owns only caches, which are
/// internally synchronized, so one instance can be shared across threads.
pub struct Algebra {
    rank: usize,
    order: Vec<Generator>,
    gen_matrices: Vec<DenseMatrix>,
    /// `bracket[a][b] = [g_a, g_b]` as `(generator index, coefficient)`.
    bracket: Vec<Vec<Vec<(usize, i64)>>>,
    insert_memo: DashMap<(Monomial, u8), IntTerms>,
}

impl std::fmt::Debug for Algebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Algebra").field("rank", &self.rank).finish()
    }
}

fn add_int(acc: &mut HashMap<Monomial, i64>, m: Monomial, k: i64) {
    let e = acc.entry(m).or_insert(0);
    *e = e.checked_add(k).expect("structure-constant overflow in normal ordering");
}

impl Algebra {
    pub fn new(rank: usize) -> Self {
        assert!(rank >= 1, "rank must be positive");
        assert!(rank <= 15, "rank too large for the monomial encoding");
        let order = pbw_order(rank);
        let gen_matrices: Vec<DenseMatrix> = order.iter().map(|g| generator_matrix(rank, *g)).collect();
        let n = order.len();
        let mut bracket = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let ab = &gen_matrices[a] * &gen_matrices[b];
                let ba = &gen_matrices[b] * &gen_matrices[a];
                let lie = lie_coordinates(rank, &(&ab - &ba));
                bracket[a][b] = lie
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(idx, c)| {
                        assert!(c.is_real() && c.re.is_integer(), "non-integer structure constant");
                        (idx, c.re.to_f64() as i64)
                    })
                    .collect();
            }
        }
        Algebra { rank, order, gen_matrices, bracket, insert_memo: DashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n_generators(&self) -> usize {
        self.order.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.order
    }

    pub fn index_of(&self, g: Generator) -> Result<usize> {
        g.validate(self.rank)?;
        Ok(pbw_index(self.rank, g))
    }

    pub fn generator_matrix(&self, index: usize) -> &DenseMatrix {
        &self.gen_matrices[index]
    }

    pub fn gen(&self, g: Generator) -> Result<UeaElement> {
        UeaElement::generator(self.rank, g)
    }

    pub fn one(&self) -> UeaElement {
        UeaElement::one(self.rank)
    }

    pub fn zero(&self) -> UeaElement {
        UeaElement::zero(self.rank)
    }

    pub fn constant(&self, c: Scalar) -> UeaElement {
        UeaElement::constant(self.rank, c)
    }

    /// Matrix unit `e_ij` (1-based), diagonal units desugared.
    pub fn unit(&self, i: usize, j: usize) -> Result<UeaElement> {
        UeaElement::matrix_unit(i, j, self.rank)
    }

    fn check_rank(&self, r: usize) -> Result<()> {
        if r != self.rank {
            return Err(AlgebraError::RankMismatch(self.rank, r));
        }
        Ok(())
    }

    /// Expands a `d×d` matrix as a degree-one element: off-diagonal entries
    /// on `e_ij`, the diagonal through the desugared `e_ii`.
    pub fn lie_from_matrix(&self, m: &DenseMatrix) -> Result<UeaElement> {
        if m.rows() != self.rank || m.cols() != self.rank {
            return Err(AlgebraError::DimensionMismatch { expected: self.rank, got: m.rows() });
        }
        let n = self.n_generators();
        let coords = lie_coordinates(self.rank, m);
        Ok(UeaElement::from_terms(
            self.rank,
            coords.into_iter().enumerate().map(|(i, c)| (Monomial::single(n, i), c)),
        ))
    }

    /// `[g1, g2]` expanded in generators.
    pub fn commutator_basis(&self, g1: GeneratorId, g2: GeneratorId) -> Result<UeaElement> {
        self.check_rank(g1.rank)?;
        self.check_rank(g2.rank)?;
        let a = self.index_of(g1.gen)?;
        let b = self.index_of(g2.gen)?;
        let n = self.n_generators();
        Ok(UeaElement::from_terms(
            self.rank,
            self.bracket[a][b].iter().map(|&(g, k)| (Monomial::single(n, g), Scalar::from_int(k))),
        ))
    }

    /// Inserts generator `g` at the right end of the ordered monomial `m` and
    /// restores PBW order. Moving `g` left past a larger neighbour `x` uses
    /// `x·g = g·x + [x, g]`; results are memoized per `(m, g)`.
    fn insert_right(&self, m: &Monomial, g: usize) -> IntTerms {
        match m.last_index() {
            None => return Arc::from(vec![(m.with_incremented(g), 1)]),
            Some(last) if last <= g => return Arc::from(vec![(m.with_incremented(g), 1)]),
            _ => {}
        }
        let key = (m.clone(), g as u8);
        if let Some(hit) = self.insert_memo.get(&key) {
            return hit.clone();
        }
        let last = m.last_index().unwrap();
        let prefix = m.with_decremented(last);
        let mut acc: HashMap<Monomial, i64> = HashMap::new();
        // (prefix·g)·last
        for (t, k) in self.insert_right(&prefix, g).iter() {
            for (t2, k2) in self.insert_right(t, last).iter() {
                add_int(&mut acc, t2.clone(), k * k2);
            }
        }
        // prefix·[last, g]
        for &(h, kh) in &self.bracket[last][g] {
            for (t, k) in self.insert_right(&prefix, h).iter() {
                add_int(&mut acc, t.clone(), kh * k);
            }
        }
        let out: IntTerms = acc.into_iter().filter(|(_, k)| *k != 0).collect::<Vec<_>>().into();
        self.insert_memo.insert(key, out.clone());
        out
    }

    /// PBW expansion of the product of two ordered monomials.
    fn monomial_product(&self, a: &Monomial, b: &Monomial) -> Vec<(Monomial, i64)> {
        match (a.last_index(), b.first_index()) {
            (None, _) => return vec![(b.clone(), 1)],
            (_, None) => return vec![(a.clone(), 1)],
            (Some(la), Some(fb)) if la <= fb => return vec![(a.concat(b), 1)],
            _ => {}
        }
        let mut cur: HashMap<Monomial, i64> = HashMap::from([(a.clone(), 1)]);
        for g in b.word() {
            let mut next = HashMap::with_capacity(cur.len());
            for (t, k) in cur {
                for (t2, k2) in self.insert_right(&t, g).iter() {
                    add_int(&mut next, t2.clone(), k * k2);
                }
            }
            cur = next;
        }
        cur.into_iter().filter(|(_, k)| *k != 0).collect()
    }

    /// Number of cached single-generator insertions.
    pub fn cache_len(&self) -> usize {
        self.insert_memo.len()
    }

    /// PBW normal form of the product `a·b`.
    pub fn multiply(&self, a: &UeaElement, b: &UeaElement) -> Result<UeaElement> {
        self.check_rank(a.rank())?;
        self.check_rank(b.rank())?;
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        for (mb, cb) in b.terms() {
            for (ma, ca) in a.terms() {
                let coef = ca * cb;
                for (t, k) in self.monomial_product(ma, mb) {
                    let v = coef.mul_int(k);
                    match acc.get_mut(&t) {
                        Some(x) => *x += &v,
                        None => {
                            acc.insert(t, v);
                        }
                    }
                }
            }
        }
        Ok(UeaElement::from_terms(self.rank, acc))
    }

    pub fn mul(&self, a: &UeaElement, b: &UeaElement) -> UeaElement {
        self.multiply(a, b).expect("rank mismatch")
    }

    pub fn pow(&self, a: &UeaElement, k: u32) -> UeaElement {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn product<'a, I: IntoIterator<Item = &'a UeaElement>>(&self, items: I) -> UeaElement {
        items.into_iter().fold(self.one(), |acc, x| self.mul(&acc, x))
    }

    /// `ab − ba`.
    pub fn commutator(&self, a: &UeaElement, b: &UeaElement) -> Result<UeaElement> {
        Ok(&self.multiply(a, b)? - &self.multiply(b, a)?)
    }

    /// Normal form of a linear combination of generator words.
    pub fn normal_order(&self, words: &[(Scalar, Vec<GeneratorId>)]) -> Result<UeaElement> {
        let mut out = self.zero();
        for (coef, word) in words {
            let mut cur: HashMap<Monomial, i64> = HashMap::from([(Monomial::unit(self.n_generators()), 1)]);
            for gid in word {
                self.check_rank(gid.rank)?;
                let g = self.index_of(gid.gen)?;
                let mut next = HashMap::new();
                for (t, k) in cur {
                    for (t2, k2) in self.insert_right(&t, g).iter() {
                        add_int(&mut next, t2.clone(), k * k2);
                    }
                }
                cur = next;
            }
            for (m, k) in cur {
                out.add_monomial(m, coef.mul_int(k));
            }
        }
        Ok(out)
    }

    /// Infinitesimal adjoint action `ad(x)(u) = xu − ux` of a degree-one
    /// element without constant term.
    pub fn ad_action(&self, x: &UeaElement, u: &UeaElement) -> Result<UeaElement> {
        self.check_rank(x.rank())?;
        if x.degree().is_some_and(|d| d > 1) || !x.constant_term().is_zero() {
            return Err(AlgebraError::NotDegreeOne);
        }
        self.commutator(x, u)
    }

    /// Group adjoint action `Ad(g)`, extended multiplicatively from
    /// `Ad(g)x = g x g⁻¹` on `gl_d`.
    pub fn ad_group(&self, g: &DenseMatrix, u: &UeaElement) -> Result<UeaElement> {
        self.check_rank(u.rank())?;
        if g.rows() != self.rank || g.cols() != self.rank {
            return Err(AlgebraError::DimensionMismatch { expected: self.rank, got: g.rows() });
        }
        let ginv = g.inverse()?;
        let images: Vec<UeaElement> = self
            .gen_matrices
            .iter()
            .map(|m| self.lie_from_matrix(&(&(g * m) * &ginv)))
            .collect::<Result<_>>()?;
        let mut out = self.zero();
        for (m, c) in u.terms() {
            let mut term = self.constant(c.clone());
            for idx in m.word() {
                term = self.mul(&term, &images[idx]);
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Invariance under `K = GL_{d−p} × (C*)^p`, tested on the Lie algebra of
    /// `K`: `ad(e_ij)u = 0` for `i, j ≤ d−p` and `ad(e_kk)u = 0` for `k > d−p`.
    pub fn is_invariant(&self, u: &UeaElement, p: usize) -> Result<bool> {
        self.check_rank(u.rank())?;
        let d = self.rank;
        if p >= d {
            return Err(AlgebraError::BlockParameter { d, p });
        }
        let top = d - p;
        let mut probes = Vec::new();
        for i in 1..=top {
            for j in 1..=top {
                probes.push(self.unit(i, j)?);
            }
        }
        for k in (top + 1)..=d {
            probes.push(self.unit(k, k)?);
        }
        for x in probes {
            if !self.ad_action(&x, u)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Matrix of a generator in the defining representation.
pub(crate) fn generator_matrix(d: usize, g: Generator) -> DenseMatrix {
    match g {
        Generator::OffDiag(i, j) => DenseMatrix::unit(d, i - 1, j - 1),
        Generator::Cartan(k) => &DenseMatrix::unit(d, k - 1, k - 1) - &DenseMatrix::unit(d, k, k),
        Generator::Central => DenseMatrix::identity(d),
    }
}

/// Coordinates of a `d×d` matrix in the PBW-ordered generator basis.
pub(crate) fn lie_coordinates(d: usize, m: &DenseMatrix) -> Vec<Scalar> {
    let mut coords = vec![Scalar::ZERO; d * d];
    for i in 1..=d {
        for j in 1..=d {
            let v = m.get(i - 1, j - 1);
            if v.is_zero() {
                continue;
            }
            if i != j {
                coords[pbw_index(d, Generator::OffDiag(i, j))] += v;
            } else {
                let eii = UeaElement::desugar_eii(i, d).expect("index in range");
                for (mono, c) in eii.terms() {
                    let idx = mono.first_index().expect("degree one");
                    coords[idx] += &(c * v);
                }
            }
        }
    }
    coords
}

#[cfg(test)]
mod tests {
    use super::*;
    use Generator::*;

    fn gid(d: usize, g: Generator) -> GeneratorId {
        GeneratorId::new(d, g).unwrap()
    }

    #[test]
    fn commutator_examples() {
        let a2 = Algebra::new(2);
        assert_eq!(a2.commutator_basis(gid(2, OffDiag(1, 2)), gid(2, OffDiag(2, 1))).unwrap(), a2.gen(Cartan(1)).unwrap());
        assert!(a2.commutator_basis(gid(2, Cartan(1)), gid(2, Central)).unwrap().is_zero());
        let a4 = Algebra::new(4);
        assert!(a4.commutator_basis(gid(4, OffDiag(1, 2)), gid(4, OffDiag(3, 4))).unwrap().is_zero());
        assert_eq!(
            a2.commutator_basis(gid(3, OffDiag(1, 2)), gid(2, OffDiag(2, 1))),
            Err(AlgebraError::RankMismatch(2, 3))
        );
    }

    #[test]
    fn normal_order_examples() {
        let a = Algebra::new(2);
        let e12 = a.gen(OffDiag(1, 2)).unwrap();
        let e21 = a.gen(OffDiag(2, 1)).unwrap();
        let h = a.gen(Cartan(1)).unwrap();
        let w = a.normal_order(&[(Scalar::ONE, vec![gid(2, OffDiag(2, 1)), gid(2, OffDiag(1, 2))])]).unwrap();
        assert_eq!(w, &a.mul(&e12, &e21) - &h);
        let w = a.normal_order(&[(Scalar::ONE, vec![gid(2, Cartan(1)), gid(2, OffDiag(1, 2))])]).unwrap();
        assert_eq!(w, &a.mul(&e12, &h) + &e12.scale(&Scalar::from_int(2)));
        assert_eq!(w.to_string(), "2*e[1,2] + e[1,2]*h[1]");
        let ordered = a
            .normal_order(&[(Scalar::ratio(3, 2), vec![gid(2, OffDiag(1, 2)), gid(2, Cartan(1)), gid(2, Central)])])
            .unwrap();
        assert_eq!(ordered.len(), 1);
        assert_eq!(ordered.to_string(), "3/2*e[1,2]*h[1]*c");
    }

    #[test]
    fn ad_examples() {
        let a = Algebra::new(2);
        let e12 = a.gen(OffDiag(1, 2)).unwrap();
        let e21 = a.gen(OffDiag(2, 1)).unwrap();
        let h = a.gen(Cartan(1)).unwrap();
        let c = a.gen(Central).unwrap();
        assert_eq!(a.ad_action(&e12, &e21).unwrap(), h);
        assert_eq!(a.ad_action(&h, &e12).unwrap(), e12.scale(&Scalar::from_int(2)));
        assert!(a.ad_action(&e12, &a.pow(&c, 3)).unwrap().is_zero());
        assert_eq!(a.ad_action(&a.mul(&e12, &e21), &h), Err(AlgebraError::NotDegreeOne));
        assert_eq!(a.ad_action(&a.one(), &h), Err(AlgebraError::NotDegreeOne));
    }

    #[test]
    fn ad_group_examples() {
        let a = Algebra::new(2);
        let e12 = a.gen(OffDiag(1, 2)).unwrap();
        let c = a.gen(Central).unwrap();
        let mut g = DenseMatrix::identity(2);
        g.set(0, 0, Scalar::from_int(2));
        assert_eq!(a.ad_group(&g, &e12).unwrap(), e12.scale(&Scalar::from_int(2)));
        let u = a.mul(&e12, &a.gen(OffDiag(2, 1)).unwrap());
        assert_eq!(a.ad_group(&DenseMatrix::identity(2), &u).unwrap(), u);
        let g = DenseMatrix::from_rows(vec![
            vec![Scalar::from_int(1), Scalar::from_int(3)],
            vec![Scalar::ratio(1, 2), Scalar::I],
        ])
        .unwrap();
        assert_eq!(a.ad_group(&g, &c).unwrap(), c);
        assert_eq!(a.ad_group(&DenseMatrix::zeros(2, 2), &c), Err(AlgebraError::SingularMatrix));
    }

    #[test]
    fn invariance_examples() {
        let a3 = Algebra::new(3);
        let e12 = a3.gen(OffDiag(1, 2)).unwrap();
        assert!(!a3.is_invariant(&e12, 1).unwrap());
        let c = a3.gen(Central).unwrap();
        for p in 0..3 {
            assert!(a3.is_invariant(&c, p).unwrap());
        }
        assert_eq!(a3.is_invariant(&c, 3), Err(AlgebraError::BlockParameter { d: 3, p: 3 }));
    }

    #[test]
    fn lie_coordinates_roundtrip() {
        let a = Algebra::new(3);
        for (idx, m) in a.gen_matrices.iter().enumerate() {
            let back = a.lie_from_matrix(m).unwrap();
            assert_eq!(back, UeaElement::from_terms(3, [(Monomial::single(9, idx), Scalar::ONE)]));
        }
    }
}
