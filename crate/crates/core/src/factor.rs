//! Factorization of block trace words `Tr(M_{i1 i2} ⋯ M_{iq i1})` into
//! products of a small set of elementary invariants.
//!
//! Blocks `2..=p+1` are `1 × 1`, so a cyclic word is a closed walk on the
//! scalar indices. A step `a → b` is either a direct entry `M_ab` or an
//! excursion `M_a1 M_11^n M_1b` through the leading block. Loops are split
//! off first, then the walk is cut at repeated vertices. What remains is a
//! simple cycle, shortened with chords `M_ab` balanced by `(M_ab M_ba)^{-1}`
//! until only listed factors are left.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::blocks::{BlockPartition, BlockWord};
use crate::error::{AlgebraError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Factor {
    /// `Tr(M_11^n)`.
    TraceCorner { n: u32 },
    /// `Tr(M_1i M_i1 M_11^m)`.
    TraceLoop { i: usize, m: u32 },
    /// `Tr(M_1i M_ij M_j1 M_11^n)`.
    TraceTriangle { i: usize, j: usize, n: u32 },
    /// `M_ii`.
    Diagonal { i: usize },
    /// `M_ij M_ji` with `i < j`.
    Pair { i: usize, j: usize },
    /// `(M_ij M_ji)^{-1}` with `i < j`.
    InversePair { i: usize, j: usize },
    /// `M_ij M_jk M_ki`, rotated so that `i` is smallest.
    Triangle { i: usize, j: usize, k: usize },
}

impl Factor {
    fn pair(a: usize, b: usize) -> Self {
        Factor::Pair { i: a.min(b), j: a.max(b) }
    }

    fn inverse_pair(a: usize, b: usize) -> Self {
        Factor::InversePair { i: a.min(b), j: a.max(b) }
    }

    fn triangle(a: usize, b: usize, c: usize) -> Self {
        let m = a.min(b).min(c);
        let (i, j, k) = if m == a {
            (a, b, c)
        } else if m == b {
            (b, c, a)
        } else {
            (c, a, b)
        };
        Factor::Triangle { i, j, k }
    }

    pub fn eval(&self, s: &BlockSample) -> Complex64 {
        match *self {
            Factor::TraceCorner { n } => s.corner_pow(n).trace(),
            Factor::TraceLoop { i, m } => s.excursion(i, i, m),
            Factor::TraceTriangle { i, j, n } => s.scalar(i, j) * s.excursion(j, i, n),
            Factor::Diagonal { i } => s.scalar(i, i),
            Factor::Pair { i, j } => s.scalar(i, j) * s.scalar(j, i),
            Factor::InversePair { i, j } => (s.scalar(i, j) * s.scalar(j, i)).inv(),
            Factor::Triangle { i, j, k } => s.scalar(i, j) * s.scalar(j, k) * s.scalar(k, i),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Factor::TraceCorner { n } => write!(f, "Tr(M_11^{n})"),
            Factor::TraceLoop { i, m } => write!(f, "Tr(M_1{i} M_{i}1 M_11^{m})"),
            Factor::TraceTriangle { i, j, n } => write!(f, "Tr(M_1{i} M_{i}{j} M_{j}1 M_11^{n})"),
            Factor::Diagonal { i } => write!(f, "M_{i}{i}"),
            Factor::Pair { i, j } => write!(f, "M_{i}{j} M_{j}{i}"),
            Factor::InversePair { i, j } => write!(f, "(M_{i}{j} M_{j}{i})^-1"),
            Factor::Triangle { i, j, k } => write!(f, "M_{i}{j} M_{j}{k} M_{k}{i}"),
        }
    }
}

/// A matrix viewed through a block partition.
pub struct BlockSample {
    part: BlockPartition,
    m: DMatrix<Complex64>,
}

impl BlockSample {
    pub fn new(part: BlockPartition, m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != part.d() || m.ncols() != part.d() {
            return Err(AlgebraError::DimensionMismatch { expected: part.d(), got: m.nrows() });
        }
        Ok(BlockSample { part, m })
    }

    fn top(&self) -> usize {
        self.part.d() - self.part.p()
    }

    /// 0-based matrix index of the scalar block `i ≥ 2`.
    fn at(&self, i: usize) -> usize {
        self.top() + i - 2
    }

    fn block(&self, a: usize) -> std::ops::Range<usize> {
        if a == 1 {
            0..self.top()
        } else {
            self.at(a)..self.at(a) + 1
        }
    }

    pub fn block_matrix(&self, a: usize, b: usize) -> DMatrix<Complex64> {
        let (r, c) = (self.block(a), self.block(b));
        self.m.view((r.start, c.start), (r.len(), c.len())).into_owned()
    }

    fn corner_pow(&self, n: u32) -> DMatrix<Complex64> {
        let c = self.block_matrix(1, 1);
        (0..n).fold(DMatrix::identity(c.nrows(), c.ncols()), |acc, _| acc * &c)
    }

    fn scalar(&self, i: usize, j: usize) -> Complex64 {
        self.m[(self.at(i), self.at(j))]
    }

    /// `M_a1 M_11^n M_1b`.
    fn excursion(&self, a: usize, b: usize, n: u32) -> Complex64 {
        let v = self.block_matrix(a, 1) * self.corner_pow(n) * self.block_matrix(1, b);
        v[(0, 0)]
    }

    /// `Tr(M_{i1 i2} ⋯ M_{iq i1})` by direct block multiplication.
    pub fn trace_word(&self, w: &BlockWord) -> Complex64 {
        let idx = w.indices();
        let q = idx.len();
        let mut acc = self.block_matrix(idx[0], idx[1 % q]);
        for k in 1..q {
            acc *= self.block_matrix(idx[k], idx[(k + 1) % q]);
        }
        acc.trace()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Direct { from: usize, to: usize },
    Excursion { from: usize, to: usize, n: u32 },
}

impl Step {
    fn from(&self) -> usize {
        match *self {
            Step::Direct { from, .. } | Step::Excursion { from, .. } => from,
        }
    }

    fn to(&self) -> usize {
        match *self {
            Step::Direct { to, .. } | Step::Excursion { to, .. } => to,
        }
    }
}

/// Closed walk of a cyclic word on the scalar blocks; `None` when every
/// index is `1`.
fn walk(w: &[usize]) -> Option<Vec<Step>> {
    let q = w.len();
    let s = w.iter().position(|&i| i != 1)?;
    let seq: Vec<usize> = (0..q).map(|k| w[(s + k) % q]).collect();
    let mut steps = Vec::new();
    let mut i = 0;
    while i < q {
        let a = seq[i];
        let mut j = i + 1;
        let mut ones = 0u32;
        while j < q && seq[j] == 1 {
            ones += 1;
            j += 1;
        }
        let b = seq[j % q];
        steps.push(if ones == 0 {
            Step::Direct { from: a, to: b }
        } else {
            Step::Excursion { from: a, to: b, n: ones - 1 }
        });
        i = j;
    }
    Some(steps)
}

fn factor_walk(mut steps: Vec<Step>, out: &mut Vec<Factor>) {
    loop {
        if steps.is_empty() {
            return;
        }
        if let Some(k) = steps.iter().position(|s| s.from() == s.to()) {
            out.push(match steps.remove(k) {
                Step::Direct { from, .. } => Factor::Diagonal { i: from },
                Step::Excursion { from, n, .. } => Factor::TraceLoop { i: from, m: n },
            });
            continue;
        }
        let verts: Vec<usize> = steps.iter().map(Step::from).collect();
        if let Some((a, b)) = repeated(&verts) {
            let inner = steps[a..b].to_vec();
            let mut outer = steps[b..].to_vec();
            outer.extend_from_slice(&steps[..a]);
            factor_walk(inner, out);
            steps = outer;
            continue;
        }
        let len = steps.len();
        let excursions: Vec<usize> = (0..len).filter(|&k| matches!(steps[k], Step::Excursion { .. })).collect();
        match (len, excursions.len()) {
            (2, 0) => {
                out.push(Factor::pair(steps[0].from(), steps[0].to()));
                return;
            }
            (2, 1) => {
                let (d, e) = if excursions[0] == 0 { (steps[1], steps[0]) } else { (steps[0], steps[1]) };
                let Step::Excursion { n, .. } = e else { unreachable!() };
                out.push(Factor::TraceTriangle { i: d.from(), j: d.to(), n });
                return;
            }
            (3, 0) => {
                out.push(Factor::triangle(steps[0].from(), steps[1].from(), steps[2].from()));
                return;
            }
            (_, 0) => {
                // chord v2 → v0 closes the triangle v0 v1 v2
                let (v0, v1, v2) = (steps[0].from(), steps[1].from(), steps[2].from());
                out.push(Factor::triangle(v0, v1, v2));
                out.push(Factor::inverse_pair(v0, v2));
                let mut rest = steps[2..].to_vec();
                rest.push(Step::Direct { from: v0, to: v2 });
                steps = rest;
            }
            _ => {
                let k = excursions[0];
                let Step::Excursion { from: a, to: b, n } = steps[k] else { unreachable!() };
                // M_ba · X(a,b,n) = Tr(M_1b M_ba M_a1 M_11^n)
                out.push(Factor::TraceTriangle { i: b, j: a, n });
                out.push(Factor::inverse_pair(a, b));
                steps[k] = Step::Direct { from: a, to: b };
            }
        }
    }
}

/// First `(a, b)` with `a < b` and `verts[a] == verts[b]`, `b` minimal.
fn repeated(verts: &[usize]) -> Option<(usize, usize)> {
    for b in 1..verts.len() {
        if let Some(a) = verts[..b].iter().position(|&v| v == verts[b]) {
            return Some((a, b));
        }
    }
    None
}

/// Removes matching `Pair`/`InversePair` factors.
fn cancel_pairs(factors: Vec<Factor>) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::with_capacity(factors.len());
    for f in factors {
        let partner = match f {
            Factor::Pair { i, j } => Some(Factor::InversePair { i, j }),
            Factor::InversePair { i, j } => Some(Factor::Pair { i, j }),
            _ => None,
        };
        if let Some(pos) = partner.and_then(|p| out.iter().position(|g| *g == p)) {
            out.remove(pos);
        } else {
            out.push(f);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactoredWord {
    pub word: Vec<usize>,
    pub factors: Vec<Factor>,
}

impl FactoredWord {
    pub fn eval(&self, s: &BlockSample) -> Complex64 {
        self.factors.iter().map(|f| f.eval(s)).product()
    }

    fn has_inverse(&self) -> bool {
        self.factors.iter().any(|f| matches!(f, Factor::InversePair { .. }))
    }
}

impl fmt::Display for FactoredWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| format!("[{x}]")).collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" · "))
        }
    }
}

/// Writes the trace word as a product of elementary factors.
pub fn factor_trace_word(part: &BlockPartition, w: &BlockWord) -> Result<FactoredWord> {
    w.validate(part)?;
    let idx = w.indices();
    let mut factors = Vec::new();
    match walk(idx) {
        None => factors.push(Factor::TraceCorner { n: idx.len() as u32 }),
        Some(steps) => factor_walk(steps, &mut factors),
    }
    Ok(FactoredWord { word: idx.to_vec(), factors: cancel_pairs(factors) })
}

/// Standard Gaussian Hermitian matrix with `E|m_ij|² = 1`.
pub fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(d, d);
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        let x: f64 = StandardNormal.sample(rng);
        m[(i, i)] = Complex64::new(x, 0.0);
        for j in i + 1..d {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let z = Complex64::new(re * half, im * half);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorValidation {
    pub samples: usize,
    /// Samples redrawn because an inverted pair was nearly singular.
    pub resampled: usize,
    pub max_rel_error: f64,
}

/// Compares word and product of factors on random Hermitian samples.
/// Relative error is measured against `max(|word|, 1)`.
pub fn validate_factorization(part: &BlockPartition, fw: &FactoredWord, samples: usize, seed: u64) -> Result<FactorValidation> {
    let w = BlockWord::new(fw.word.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = FactorValidation { samples: 0, resampled: 0, max_rel_error: 0.0 };
    while report.samples < samples {
        let s = BlockSample::new(*part, random_hermitian(part.d(), &mut rng))?;
        if fw.has_inverse() {
            let singular = fw.factors.iter().any(|f| match *f {
                Factor::InversePair { i, j } => (s.scalar(i, j) * s.scalar(j, i)).norm() < 1e-2,
                _ => false,
            });
            if singular {
                report.resampled += 1;
                continue;
            }
        }
        let lhs = s.trace_word(&w);
        let rhs = fw.eval(&s);
        let err = (lhs - rhs).norm() / lhs.norm().max(1.0);
        report.max_rel_error = report.max_rel_error.max(err);
        report.samples += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fw(d: usize, p: usize, w: &[usize]) -> FactoredWord {
        factor_trace_word(&BlockPartition::new(d, p).unwrap(), &BlockWord::new(w.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn listed_examples() {
        assert_eq!(fw(4, 2, &[1, 2]).factors, vec![Factor::TraceLoop { i: 2, m: 0 }]);
        assert_eq!(fw(4, 2, &[1, 2, 2, 1]).factors, vec![Factor::Diagonal { i: 2 }, Factor::TraceLoop { i: 2, m: 1 }]);
        assert_eq!(fw(4, 2, &[2, 3]).factors, vec![Factor::Pair { i: 2, j: 3 }]);
        assert_eq!(fw(4, 2, &[1, 1, 1]).factors, vec![Factor::TraceCorner { n: 3 }]);
        assert_eq!(fw(4, 2, &[1, 2, 1, 3]).to_string(), "[Tr(M_13 M_32 M_21 M_11^0)] · [(M_23 M_32)^-1] · [Tr(M_12 M_23 M_31 M_11^0)]");
    }

    #[test]
    fn factorizations_validate() {
        let part = BlockPartition::new(5, 3).unwrap();
        for w in BlockWord::all_up_to(4, 5) {
            let f = factor_trace_word(&part, &w).unwrap();
            let v = validate_factorization(&part, &f, 20, 7).unwrap();
            assert!(v.max_rel_error < 1e-9, "{w} -> {f}: {}", v.max_rel_error);
        }
    }

    #[test]
    fn long_direct_cycle_uses_chords() {
        let f = fw(5, 4, &[2, 3, 4, 5]);
        assert!(f.factors.iter().any(|x| matches!(x, Factor::InversePair { .. })));
        let v = validate_factorization(&BlockPartition::new(5, 4).unwrap(), &f, 50, 1).unwrap();
        assert!(v.max_rel_error < 1e-9);
    }
}
