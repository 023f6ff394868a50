//! The standard representation `ρ` and its tensor powers `j_n = ρ^{⊗n}`,
//! walk moments under the tracial state, and the `d = 2` Pauli elements.
//!
//! Tensor images are evaluated column by column: a generator acts on a basis
//! tensor as a sum of single-site operators (`c` acts as the identity), so a
//! moment only ever touches sparse vectors and never a `d^n × d^n` array.

use std::collections::HashMap;

use crate::error::{AlgebraError, Result};
use crate::hopf::{coproduct, MarkovOperator};
use crate::ito::bm_covariance;
use crate::matrix::DenseMatrix;
use crate::pbw::{Algebra, Generator, UeaElement};
use crate::scalar::{Rational, Scalar};

pub const DEFAULT_SIZE_CAP: usize = 4096;
/// Longest index word accepted by [`Representation::scaled_walk_moment`].
pub const MAX_WALK_WORD: usize = 4;

type SparseVec = HashMap<u32, Scalar>;

/// Exact evaluator for `ρ^{⊗n}` with a cap on `d^n`.
pub struct Representation<'a> {
    alg: &'a Algebra,
    size_cap: usize,
}

impl<'a> Representation<'a> {
    pub fn new(alg: &'a Algebra) -> Self {
        Representation { alg, size_cap: DEFAULT_SIZE_CAP }
    }

    pub fn with_size_cap(mut self, cap: usize) -> Self {
        self.size_cap = cap;
        self
    }

    pub fn algebra(&self) -> &'a Algebra {
        self.alg
    }

    fn dim(&self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(AlgebraError::InvalidArgument("tensor power must be at least 1".into()));
        }
        let d = self.alg.rank();
        let mut dim: usize = 1;
        for _ in 0..n {
            dim = dim.checked_mul(d).filter(|&x| x <= self.size_cap).ok_or(AlgebraError::SizeCapExceeded {
                dim: d.saturating_pow(n as u32),
                cap: self.size_cap,
            })?;
        }
        Ok(dim)
    }

    fn check(&self, u: &UeaElement) -> Result<()> {
        if u.rank() != self.alg.rank() {
            return Err(AlgebraError::RankMismatch(self.alg.rank(), u.rank()));
        }
        Ok(())
    }

    /// `ρ(u)` as a `d × d` matrix.
    pub fn rho(&self, u: &UeaElement) -> Result<DenseMatrix> {
        self.rho_tensor(u, 1)
    }

    /// `ρ^{⊗n}(u)` as a dense `d^n × d^n` matrix.
    pub fn rho_tensor(&self, u: &UeaElement, n: usize) -> Result<DenseMatrix> {
        self.check(u)?;
        let dim = self.dim(n)?;
        let mut out = DenseMatrix::zeros(dim, dim);
        for col in 0..dim {
            for (row, v) in self.column(u, n, col as u32) {
                out.set(row as usize, col, v);
            }
        }
        Ok(out)
    }

    /// `ρ^{⊗n}(u)` through `ρ^{⊗n} = (ρ^{⊗(n−1)} ⊗ ρ)∘Δ`. Exponential in `n`;
    /// kept as an independent cross-check of [`Self::rho_tensor`].
    pub fn rho_tensor_recursive(&self, u: &UeaElement, n: usize) -> Result<DenseMatrix> {
        self.check(u)?;
        let dim = self.dim(n)?;
        if n == 1 {
            return self.rho_single(u);
        }
        let d = self.alg.rank();
        let mut out = DenseMatrix::zeros(dim, dim);
        for ((l, r), c) in coproduct(u).terms() {
            let left = self.rho_tensor_recursive(&UeaElement::from_terms(d, [(l.clone(), Scalar::ONE)]), n - 1)?;
            let right = self.rho_single(&UeaElement::from_terms(d, [(r.clone(), Scalar::ONE)]))?;
            out = &out + &left.kron(&right).scale(c);
        }
        Ok(out)
    }

    /// Direct product of generator matrices, independent of the column code.
    fn rho_single(&self, u: &UeaElement) -> Result<DenseMatrix> {
        let d = self.alg.rank();
        let mut out = DenseMatrix::zeros(d, d);
        for (m, c) in u.terms() {
            let mut acc = DenseMatrix::identity(d);
            for g in m.word() {
                acc = acc.checked_mul(self.alg.generator_matrix(g))?;
            }
            out = &out + &acc.scale(c);
        }
        Ok(out)
    }

    /// Column `col` of `ρ^{⊗n}(u)` as a sparse vector. Site 1 is the most
    /// significant base-`d` digit of a basis index.
    fn column(&self, u: &UeaElement, n: usize, col: u32) -> SparseVec {
        let mut out = SparseVec::new();
        for (m, c) in u.terms() {
            let mut v = SparseVec::from([(col, c.clone())]);
            let word: Vec<usize> = m.word().collect();
            for &g in word.iter().rev() {
                v = self.apply_generator(g, n, &v);
                if v.is_empty() {
                    break;
                }
            }
            for (k, x) in v {
                let e = out.entry(k).or_insert(Scalar::ZERO);
                *e += &x;
            }
        }
        out.retain(|_, x| !x.is_zero());
        out
    }

    fn apply_generator(&self, g: usize, n: usize, v: &SparseVec) -> SparseVec {
        if self.alg.generators()[g] == Generator::Central {
            return v.clone();
        }
        let d = self.alg.rank() as u32;
        let mat = self.alg.generator_matrix(g);
        let mut out = SparseVec::with_capacity(v.len() * n);
        let mut place = 1u32;
        for _ in 0..n {
            for (&idx, x) in v {
                let digit = (idx / place) % d;
                let base = idx - digit * place;
                for r in 0..d {
                    let a = mat.get(r as usize, digit as usize);
                    if a.is_zero() {
                        continue;
                    }
                    let e = out.entry(base + r * place).or_insert(Scalar::ZERO);
                    *e += &(a * x);
                }
            }
            place *= d;
        }
        out.retain(|_, x| !x.is_zero());
        out
    }

    /// `ω(j_n(u))`: normalized trace of `ρ^{⊗n}(u)`.
    pub fn omega_moment(&self, u: &UeaElement, n: usize) -> Result<Scalar> {
        self.check(u)?;
        let dim = self.dim(n)?;
        let mut acc = Scalar::ZERO;
        for b in 0..dim as u32 {
            if let Some(x) = self.column(u, n, b).get(&b) {
                acc += x;
            }
        }
        Ok(&acc * &Scalar::ratio(1, dim as i64))
    }

    /// `η(P^{n−1} u)`, the same moment through the Markov operator.
    pub fn moment_via_p(&self, u: &UeaElement, n: usize) -> Result<Scalar> {
        self.check(u)?;
        if n == 0 {
            return Err(AlgebraError::InvalidArgument("tensor power must be at least 1".into()));
        }
        let op = MarkovOperator::new(self.alg);
        op.eta(&op.apply_iter(u, n - 1)?)
    }

    /// Normalized trace of `ρ^{⊗n}(u)·(a_1 ⊗ ⋯ ⊗ a_k ⊗ I ⊗ ⋯ ⊗ I)` for
    /// `k = obs.len() ≤ n`.
    pub fn omega_obs(&self, u: &UeaElement, n: usize, obs: &[DenseMatrix]) -> Result<Scalar> {
        self.check(u)?;
        let dim = self.dim(n)?;
        if obs.len() > n {
            return Err(AlgebraError::DimensionMismatch { expected: n, got: obs.len() });
        }
        let d = self.alg.rank();
        for a in obs {
            if a.rows() != d || a.cols() != d {
                return Err(AlgebraError::DimensionMismatch { expected: d, got: a.rows().max(a.cols()) });
            }
        }
        let digits = |idx: u32| -> Vec<usize> {
            let mut out = vec![0; n];
            let mut x = idx as usize;
            for s in (0..n).rev() {
                out[s] = x % d;
                x /= d;
            }
            out
        };
        // tr(M·A) = Σ_{b',b} M[b,b'] A[b',b]
        let mut acc = Scalar::ZERO;
        for bp in 0..dim as u32 {
            let col = self.column(u, n, bp);
            if col.is_empty() {
                continue;
            }
            let dp = digits(bp);
            for (b, m) in col {
                let db = digits(b);
                if db[obs.len()..] != dp[obs.len()..] {
                    continue;
                }
                let mut w = m;
                for (s, a) in obs.iter().enumerate() {
                    w = &w * a.get(dp[s], db[s]);
                    if w.is_zero() {
                        break;
                    }
                }
                acc += &w;
            }
        }
        Ok(&acc * &Scalar::ratio(1, dim as i64))
    }

    /// Traceless element `x_ij`: `e_ij` off the diagonal, `e_ii − c/d` on it.
    pub fn traceless(&self, i: usize, j: usize) -> Result<UeaElement> {
        traceless_element(self.alg, i, j)
    }

    /// `v = d/(d−1) · tr(ρ(x_11)²)` with the normalized trace.
    pub fn walk_scale(&self) -> Result<Rational> {
        let d = self.alg.rank();
        if d < 2 {
            return Err(AlgebraError::InvalidArgument("walk scale needs d >= 2".into()));
        }
        let x = self.rho(&self.traceless(1, 1)?)?;
        let t = x.checked_mul(&x)?.normalized_trace();
        Ok(&Rational::new(d as i64, d as i64 - 1) * &t.re)
    }

    /// `ω(Π_k j_n(x_{i_k j_k}))` against the Hermitian Brownian limit at
    /// `t = 1` after dividing by `(n·v)^{len/2}`. The raw moment goes through
    /// `η∘P^{n−1}`, so `n` is not limited by the tensor size cap.
    pub fn scaled_walk_moment(&self, word: &[(usize, usize)], n: usize) -> Result<WalkMoment> {
        if word.is_empty() || word.len() > MAX_WALK_WORD {
            return Err(AlgebraError::InvalidArgument(format!("walk word length must be in 1..={MAX_WALK_WORD}")));
        }
        let d = self.alg.rank();
        let mut prod = self.alg.one();
        for &(i, j) in word {
            prod = self.alg.multiply(&prod, &self.traceless(i, j)?)?;
        }
        let raw = self.moment_via_p(&prod, n)?;
        let v = self.walk_scale()?;
        let nv = &Rational::from_int(n as i64) * &v;
        let scaled = if word.len().is_multiple_of(2) {
            let inv = nv.pow(word.len() as u32 / 2).recip().ok_or(AlgebraError::DivisionByZero)?;
            Some(&raw * &Scalar::real(inv))
        } else {
            None
        };
        let scaled_f64 = raw.re.to_f64() / nv.to_f64().powf(word.len() as f64 / 2.0);
        Ok(WalkMoment { raw, normalizer_sq: nv.pow(word.len() as u32), scaled, scaled_f64, limit: wick_limit(d, word) })
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct WalkMoment {
    /// `ω(Π_k j_n(x_{i_k j_k}))`.
    pub raw: Scalar,
    /// `(n·v)^len`, the square of the normalizer.
    pub normalizer_sq: Rational,
    /// Exact scaled moment; present for even word lengths.
    pub scaled: Option<Scalar>,
    /// Real part of the scaled moment in floating point.
    pub scaled_f64: f64,
    pub limit: Scalar,
}

pub fn traceless_element(alg: &Algebra, i: usize, j: usize) -> Result<UeaElement> {
    let e = alg.unit(i, j)?;
    if i != j {
        return Ok(e);
    }
    let c = alg.gen(Generator::Central)?;
    Ok(&e - &c.scale(&Scalar::ratio(1, alg.rank() as i64)))
}

/// `E[Π m_{i_k j_k}(1)]` for traceless Hermitian Brownian motion by Wick
/// pairing.
pub fn wick_limit(d: usize, word: &[(usize, usize)]) -> Scalar {
    fn rec(d: usize, rest: &[(usize, usize)]) -> Rational {
        let Some((&first, tail)) = rest.split_first() else {
            return Rational::ONE;
        };
        let mut acc = Rational::ZERO;
        for k in 0..tail.len() {
            let cov = bm_covariance(d, true, first, tail[k]);
            if cov.is_zero() {
                continue;
            }
            let mut remaining = tail.to_vec();
            remaining.remove(k);
            acc = &acc + &(&cov * &rec(d, &remaining));
        }
        acc
    }
    if word.len() % 2 == 1 {
        return Scalar::ZERO;
    }
    Scalar::real(rec(d, word))
}

/// Pauli elements of `U(gl_2)`: `x = e_12 + e_21`, `y = i·e_21 − i·e_12`,
/// `z = h_1`.
#[derive(Clone, Debug)]
pub struct PauliTriple {
    pub x: UeaElement,
    pub y: UeaElement,
    pub z: UeaElement,
}

impl PauliTriple {
    pub fn new(alg: &Algebra) -> Result<Self> {
        if alg.rank() != 2 {
            return Err(AlgebraError::RankMismatch(2, alg.rank()));
        }
        let e12 = alg.unit(1, 2)?;
        let e21 = alg.unit(2, 1)?;
        Ok(PauliTriple {
            x: &e12 + &e21,
            y: &e21.scale(&Scalar::I) - &e12.scale(&Scalar::I),
            z: alg.gen(Generator::Cartan(1))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn rho_examples() {
        let a = Algebra::new(2);
        let r = Representation::new(&a);
        let e12 = r.rho(&a.unit(1, 2).unwrap()).unwrap();
        assert_eq!(e12, DenseMatrix::unit(2, 0, 1));
        assert_eq!(r.rho(&a.gen(Generator::Central).unwrap()).unwrap(), DenseMatrix::identity(2));
        let p = PauliTriple::new(&a).unwrap();
        assert_eq!(r.rho(&p.x).unwrap().to_rows(), vec![vec![s(0), s(1)], vec![s(1), s(0)]]);
        assert_eq!(r.rho(&p.y).unwrap().to_rows(), vec![vec![s(0), -Scalar::I], vec![Scalar::I, s(0)]]);
        assert_eq!(r.rho(&p.z).unwrap().to_rows(), vec![vec![s(1), s(0)], vec![s(0), s(-1)]]);
    }

    #[test]
    fn pauli_relations_in_algebra() {
        let a = Algebra::new(2);
        let p = PauliTriple::new(&a).unwrap();
        let two_i = Scalar::I.mul_int(2);
        assert_eq!(a.commutator(&p.x, &p.y).unwrap(), p.z.scale(&two_i));
        assert_eq!(a.commutator(&p.y, &p.z).unwrap(), p.x.scale(&two_i));
        assert_eq!(a.commutator(&p.z, &p.x).unwrap(), p.y.scale(&two_i));
    }

    #[test]
    fn tensor_examples() {
        let a = Algebra::new(2);
        let r = Representation::new(&a);
        let h = a.gen(Generator::Cartan(1)).unwrap();
        let rh = r.rho(&h).unwrap();
        let i2 = DenseMatrix::identity(2);
        let expect = &rh.kron(&i2) + &i2.kron(&rh);
        assert_eq!(r.rho_tensor(&h, 2).unwrap(), expect);
        assert_eq!(r.rho_tensor_recursive(&h, 2).unwrap(), expect);
        let c = a.gen(Generator::Central).unwrap();
        assert_eq!(r.rho_tensor(&c, 3).unwrap(), DenseMatrix::identity(8));
        let u = a.mul(&a.unit(1, 2).unwrap(), &h);
        assert_eq!(r.rho_tensor(&u, 1).unwrap(), r.rho(&u).unwrap());
    }

    #[test]
    fn tensor_routes_agree() {
        let a = Algebra::new(3);
        let r = Representation::new(&a);
        let u = &a.mul(&a.unit(1, 2).unwrap(), &a.unit(2, 3).unwrap()) + &a.pow(&a.unit(3, 3).unwrap(), 2);
        for n in 1..=3 {
            assert_eq!(r.rho_tensor(&u, n).unwrap(), r.rho_tensor_recursive(&u, n).unwrap());
        }
    }

    #[test]
    fn size_cap() {
        let a = Algebra::new(2);
        let r = Representation::new(&a).with_size_cap(8);
        assert!(r.rho_tensor(&a.one(), 3).is_ok());
        assert!(matches!(r.rho_tensor(&a.one(), 4), Err(AlgebraError::SizeCapExceeded { dim: 16, cap: 8 })));
    }

    #[test]
    fn moment_examples() {
        let a = Algebra::new(2);
        let r = Representation::new(&a);
        let h = a.gen(Generator::Cartan(1)).unwrap();
        let h2 = a.mul(&h, &h);
        let p = PauliTriple::new(&a).unwrap();
        let casimir = &(&a.mul(&p.x, &p.x) + &a.mul(&p.y, &p.y)) + &h2;
        for n in 1..=5 {
            assert_eq!(r.omega_moment(&h, n).unwrap(), Scalar::ZERO);
            assert_eq!(r.omega_moment(&h2, n).unwrap(), s(n as i64));
            assert_eq!(r.moment_via_p(&h2, n).unwrap(), s(n as i64));
            assert_eq!(r.omega_moment(&casimir, n).unwrap(), s(3 * n as i64));
            assert_eq!(r.moment_via_p(&a.gen(Generator::Central).unwrap(), n).unwrap(), s(1));
            assert_eq!(r.moment_via_p(&a.unit(1, 2).unwrap(), n).unwrap(), Scalar::ZERO);
        }
    }

    #[test]
    fn obs_examples() {
        let a = Algebra::new(2);
        let r = Representation::new(&a);
        let h = a.gen(Generator::Cartan(1)).unwrap();
        let u = &a.mul(&h, &h) + &a.unit(1, 2).unwrap();
        let id = DenseMatrix::identity(2);
        assert_eq!(r.omega_obs(&u, 3, &[id.clone(), id.clone()]).unwrap(), r.omega_moment(&u, 3).unwrap());
        assert_eq!(r.omega_obs(&u, 1, &[]).unwrap(), crate::hopf::eta(&a, &u).unwrap());
        let xi = DenseMatrix::from_fn(2, 2, |i, j| Scalar::ratio(i as i64 + 2 * j as i64 + 1, 3));
        let pu = crate::hopf::apply_p(&a, &u).unwrap();
        assert_eq!(r.omega_obs(&u, 2, std::slice::from_ref(&xi)).unwrap(), r.omega_obs(&pu, 1, &[xi]).unwrap());
        assert!(r.omega_obs(&u, 1, &[id.clone(), id]).is_err());
    }

    #[test]
    fn walk_scale_and_second_moments() {
        for d in 2..=4 {
            let a = Algebra::new(d);
            let r = Representation::new(&a);
            assert_eq!(r.walk_scale().unwrap(), Rational::new(1, d as i64));
            for n in 1..=3 {
                let m = r.scaled_walk_moment(&[(1, 2), (2, 1)], n).unwrap();
                assert_eq!(m.scaled, Some(s(1)));
                assert_eq!(m.limit, s(1));
                let m = r.scaled_walk_moment(&[(1, 1), (1, 1)], n).unwrap();
                assert_eq!(m.scaled, Some(Scalar::ratio(d as i64 - 1, d as i64)));
                assert_eq!(m.limit, m.scaled.clone().unwrap());
                let m = r.scaled_walk_moment(&[(1, 1)], n).unwrap();
                assert_eq!(m.raw, Scalar::ZERO);
                assert_eq!(m.limit, Scalar::ZERO);
            }
        }
    }

    #[test]
    fn walk_moments_match_tensor_route() {
        let a = Algebra::new(2);
        let r = Representation::new(&a);
        let word = [(1, 2), (2, 1), (1, 1), (2, 2)];
        let mut prod = a.one();
        for &(i, j) in &word {
            prod = a.multiply(&prod, &r.traceless(i, j).unwrap()).unwrap();
        }
        for n in 1..=5 {
            assert_eq!(r.scaled_walk_moment(&word, n).unwrap().raw, r.omega_moment(&prod, n).unwrap());
        }
    }
}
