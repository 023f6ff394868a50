//! Block partitions of the generator matrix `E = (e_ij)`, block trace words
//! `Tr(E_{i1 i2} ⋯ E_{iq i1})`, and the named invariant families built from
//! them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};
use crate::pbw::{Algebra, UeaElement};

/// Partition of `{1..d}` into a leading block of size `d − p` followed by
/// `p` singleton blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockPartition {
    d: usize,
    p: usize,
}

impl BlockPartition {
    pub fn new(d: usize, p: usize) -> Result<Self> {
        if d == 0 || p >= d {
            return Err(AlgebraError::BlockParameter { d, p });
        }
        Ok(BlockPartition { d, p })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_blocks(&self) -> usize {
        self.p + 1
    }

    /// Matrix indices (1-based) of block `b` (1-based).
    pub fn block(&self, b: usize) -> Result<std::ops::RangeInclusive<usize>> {
        if b == 0 || b > self.n_blocks() {
            return Err(AlgebraError::IndexOutOfRange { what: "block index", index: b, bound: self.n_blocks() });
        }
        let top = self.d - self.p;
        Ok(if b == 1 { 1..=top } else { (top + b - 1)..=(top + b - 1) })
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        (1..=self.n_blocks()).map(|b| self.block(b).map(|r| r.count()).unwrap_or(0)).collect()
    }
}

/// A nonempty cyclic sequence of block indices `(i_1, …, i_q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockWord(Vec<usize>);

impl BlockWord {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(AlgebraError::InvalidArgument("block word must be nonempty".into()));
        }
        if let Some(&z) = indices.iter().find(|&&i| i == 0) {
            return Err(AlgebraError::IndexOutOfRange { what: "block index", index: z, bound: 0 });
        }
        Ok(BlockWord(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, part: &BlockPartition) -> Result<()> {
        for &i in &self.0 {
            if i == 0 || i > part.n_blocks() {
                return Err(AlgebraError::IndexOutOfRange { what: "block index", index: i, bound: part.n_blocks() });
            }
        }
        Ok(())
    }

    /// All words of length `1..=max_len` over `{1..n_blocks}`.
    pub fn all_up_to(n_blocks: usize, max_len: usize) -> Vec<BlockWord> {
        let mut out = Vec::new();
        let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * n_blocks);
            for w in &layer {
                for b in 1..=n_blocks {
                    let mut w2 = w.clone();
                    w2.push(b);
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned().map(BlockWord));
            layer = next;
        }
        out
    }
}

impl fmt::Display for BlockWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for BlockWord {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let idx = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| AlgebraError::InvalidLiteral(t.to_string())))
            .collect::<Result<Vec<_>>>()?;
        BlockWord::new(idx)
    }
}

/// Sum over matrix-unit chains: `Σ e_{a1 a2} e_{a2 a3} ⋯ e_{aq a1}` with
/// `a_k` ranging over `allowed[k]`.
fn chain_trace(alg: &Algebra, allowed: &[Vec<usize>]) -> Result<UeaElement> {
    let q = allowed.len();
    let mut total = alg.zero();
    for &start in &allowed[0] {
        // end index -> sum of chain products from `start`
        let mut state: BTreeMap<usize, UeaElement> = BTreeMap::from([(start, alg.one())]);
        #[allow(clippy::needless_range_loop)]
        for k in 1..=q {
            let targets: &[usize] = if k == q { std::slice::from_ref(&start) } else { &allowed[k] };
            let mut next: BTreeMap<usize, UeaElement> = BTreeMap::new();
            for &j in targets {
                let mut acc = alg.zero();
                for (&l, prod) in &state {
                    acc = &acc + &alg.multiply(prod, &alg.unit(l, j)?)?;
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

/// `Tr(E_{i1 i2} ⋯ E_{iq i1})` for the given partition, normal-ordered.
pub fn trace_word(alg: &Algebra, part: &BlockPartition, w: &BlockWord) -> Result<UeaElement> {
    if alg.rank() != part.d() {
        return Err(AlgebraError::RankMismatch(alg.rank(), part.d()));
    }
    w.validate(part)?;
    let allowed: Vec<Vec<usize>> = w.indices().iter().map(|&b| part.block(b).map(Iterator::collect)).collect::<Result<_>>()?;
    chain_trace(alg, &allowed)
}

/// `Tr(C^k)` for the top-left `size × size` corner `C` of `E`.
pub fn corner_trace_power(alg: &Algebra, size: usize, k: usize) -> Result<UeaElement> {
    if size == 0 || size > alg.rank() {
        return Err(AlgebraError::IndexOutOfRange { what: "corner size", index: size, bound: alg.rank() });
    }
    let range: Vec<usize> = (1..=size).collect();
    chain_trace(alg, &vec![range; k.max(1)])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `Tr(E^k)`.
    Casimir,
    /// `Tr(E_11^k)` for `k < kmax` and `Tr(E^k)` for `k ≤ kmax`.
    P1,
    /// `Tr(C^k)` for every nested top-left corner `C` of size `d−p..=d`.
    P2Nested,
    /// Every block trace word of length `≤ kmax`.
    Klink,
}

impl FromStr for FamilyKind {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "casimir" => Ok(FamilyKind::Casimir),
            "p1" => Ok(FamilyKind::P1),
            "p2_nested" | "p2-nested" => Ok(FamilyKind::P2Nested),
            "klink" => Ok(FamilyKind::Klink),
            _ => Err(AlgebraError::InvalidArgument(format!("unknown family `{s}`"))),
        }
    }
}

/// A family member with a human-readable label such as `Tr(E_11^2)`.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub label: String,
    pub element: UeaElement,
}

/// The named generator families, ordered by degree.
pub fn named_family(alg: &Algebra, part: &BlockPartition, kind: FamilyKind, kmax: usize) -> Result<Vec<FamilyMember>> {
    if alg.rank() != part.d() {
        return Err(AlgebraError::RankMismatch(alg.rank(), part.d()));
    }
    if kmax == 0 {
        return Err(AlgebraError::InvalidArgument("kmax must be at least 1".into()));
    }
    let d = part.d();
    let p = part.p();
    let mut out = Vec::new();
    let corner = |size: usize, k: usize, name: &str| -> Result<FamilyMember> {
        Ok(FamilyMember { label: format!("Tr({name}^{k})"), element: corner_trace_power(alg, size, k)? })
    };
    match kind {
        FamilyKind::Casimir => {
            for k in 1..=kmax {
                out.push(corner(d, k, "E")?);
            }
        }
        FamilyKind::P1 => {
            if p < 1 {
                return Err(AlgebraError::IncompatibleFamily { kind: "p1", p });
            }
            for k in 1..=kmax {
                if k < kmax {
                    out.push(corner(d - p, k, "E_11")?);
                }
                out.push(corner(d, k, "E")?);
            }
        }
        FamilyKind::P2Nested => {
            if p < 2 {
                return Err(AlgebraError::IncompatibleFamily { kind: "p2_nested", p });
            }
            for k in 1..=kmax {
                for size in (d - p)..=d {
                    let name = if size == d { "E".to_string() } else { format!("E[{size}]") };
                    out.push(corner(size, k, &name)?);
                }
            }
        }
        FamilyKind::Klink => {
            for w in BlockWord::all_up_to(part.n_blocks(), kmax) {
                out.push(FamilyMember { label: format!("W{w}"), element: trace_word(alg, part, &w)? });
            }
        }
    }
    Ok(out)
}

/// `a = E_21 E_12 (E_31 E_13 + E_32 E_23)²` for the `p = 2` partition.
pub fn counterexample_a(alg: &Algebra) -> Result<UeaElement> {
    let d = alg.rank();
    if d < 3 {
        return Err(AlgebraError::BlockParameter { d, p: 2 });
    }
    let part = BlockPartition::new(d, 2)?;
    let w = |v: Vec<usize>| -> Result<UeaElement> { trace_word(alg, &part, &BlockWord::new(v)?) };
    let left = w(vec![2, 1])?;
    let inner = &w(vec![3, 1])? + &w(vec![3, 2])?;
    let sq = alg.multiply(&inner, &inner)?;
    alg.multiply(&left, &sq)
}

/// Small matrix with entries in `U(gl_d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UeaMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<UeaElement>,
}

impl UeaMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> UeaElement) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        UeaMatrix { rows, cols, entries }
    }

    /// Block `(a, b)` of `E` under the partition (1-based block indices).
    pub fn generator_block(alg: &Algebra, part: &BlockPartition, a: usize, b: usize) -> Result<Self> {
        let ra: Vec<usize> = part.block(a)?.collect();
        let rb: Vec<usize> = part.block(b)?.collect();
        let mut entries = Vec::with_capacity(ra.len() * rb.len());
        for &i in &ra {
            for &j in &rb {
                entries.push(alg.unit(i, j)?);
            }
        }
        Ok(UeaMatrix { rows: ra.len(), cols: rb.len(), entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &UeaElement {
        &self.entries[i * self.cols + j]
    }

    pub fn multiply(&self, alg: &Algebra, rhs: &UeaMatrix) -> Result<UeaMatrix> {
        if self.cols != rhs.rows {
            return Err(AlgebraError::DimensionMismatch { expected: self.cols, got: rhs.rows });
        }
        let mut entries = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = alg.zero();
                for k in 0..self.cols {
                    acc = &acc + &alg.multiply(self.get(i, k), rhs.get(k, j))?;
                }
                entries.push(acc);
            }
        }
        Ok(UeaMatrix { rows: self.rows, cols: rhs.cols, entries })
    }

    pub fn zip(&self, rhs: &UeaMatrix, f: impl Fn(&UeaElement, &UeaElement) -> UeaElement) -> Result<UeaMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(AlgebraError::DimensionMismatch { expected: self.rows * self.cols, got: rhs.rows * rhs.cols });
        }
        Ok(UeaMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn map(&self, f: impl Fn(&UeaElement) -> UeaElement) -> UeaMatrix {
        UeaMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn identity(alg: &Algebra, n: usize) -> UeaMatrix {
        UeaMatrix::from_fn(n, n, |i, j| if i == j { alg.one() } else { alg.zero() })
    }

    /// `Σ m_ii`, defined for square matrices.
    pub fn trace(&self) -> Result<UeaElement> {
        if self.rows != self.cols {
            return Err(AlgebraError::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let mut acc = match self.entries.first() {
            Some(e) => UeaElement::zero(e.rank()),
            None => return Err(AlgebraError::DimensionMismatch { expected: 1, got: 0 }),
        };
        for i in 0..self.rows {
            acc = &acc + self.get(i, i);
        }
        Ok(acc)
    }

    /// Maximal entry degree; `None` when all entries vanish.
    pub fn degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(UeaElement::degree).max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_blocks() {
        let p = BlockPartition::new(5, 2).unwrap();
        assert_eq!(p.block(1).unwrap(), 1..=3);
        assert_eq!(p.block(2).unwrap(), 4..=4);
        assert_eq!(p.block(3).unwrap(), 5..=5);
        assert_eq!(p.block_sizes().iter().sum::<usize>(), 5);
        assert!(p.block(4).is_err());
        assert!(BlockPartition::new(3, 3).is_err());
    }

    #[test]
    fn trace_word_examples() {
        let a = Algebra::new(3);
        let part0 = BlockPartition::new(3, 0).unwrap();
        assert_eq!(trace_word(&a, &part0, &BlockWord::new(vec![1]).unwrap()).unwrap(), a.gen(crate::Generator::Central).unwrap());
        let part2 = BlockPartition::new(3, 2).unwrap();
        let w = trace_word(&a, &part2, &BlockWord::new(vec![1, 2]).unwrap()).unwrap();
        assert_eq!(w, a.mul(&a.unit(1, 2).unwrap(), &a.unit(2, 1).unwrap()));
        let a2 = Algebra::new(2);
        let part = BlockPartition::new(2, 1).unwrap();
        assert_eq!(trace_word(&a2, &part, &BlockWord::new(vec![1]).unwrap()).unwrap(), a2.unit(1, 1).unwrap());
        assert!(trace_word(&a2, &part, &BlockWord::new(vec![3]).unwrap()).is_err());
    }

    #[test]
    fn chain_trace_matches_matrix_power() {
        let a = Algebra::new(3);
        let e = UeaMatrix::from_fn(3, 3, |i, j| a.unit(i + 1, j + 1).unwrap());
        let e3 = e.multiply(&a, &e).unwrap().multiply(&a, &e).unwrap();
        assert_eq!(corner_trace_power(&a, 3, 3).unwrap(), e3.trace().unwrap());
    }

    #[test]
    fn family_shapes() {
        let a2 = Algebra::new(2);
        let fam = named_family(&a2, &BlockPartition::new(2, 1).unwrap(), FamilyKind::P1, 2).unwrap();
        let labels: Vec<_> = fam.iter().map(|m| m.label.as_str()).collect();
        assert_eq!(labels, ["Tr(E_11^1)", "Tr(E^1)", "Tr(E^2)"]);
        let a3 = Algebra::new(3);
        let fam = named_family(&a3, &BlockPartition::new(3, 0).unwrap(), FamilyKind::Casimir, 3).unwrap();
        assert_eq!(fam.len(), 3);
        let fam = named_family(&a3, &BlockPartition::new(3, 2).unwrap(), FamilyKind::Klink, 2).unwrap();
        assert_eq!(fam.len(), 12);
        assert!(named_family(&a3, &BlockPartition::new(3, 0).unwrap(), FamilyKind::P1, 2).is_err());
        assert!(named_family(&a3, &BlockPartition::new(3, 1).unwrap(), FamilyKind::P2Nested, 2).is_err());
    }

    #[test]
    fn counterexample_shape() {
        let a = Algebra::new(3);
        let ce = counterexample_a(&a).unwrap();
        assert_eq!(ce.degree(), Some(6));
        assert!(a.is_invariant(&ce, 2).unwrap());
        assert!(counterexample_a(&Algebra::new(2)).is_err());
    }
}
