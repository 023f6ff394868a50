//! Itô calculus for polynomial functions of Brownian motion on Hermitian
//! matrices, with the entry covariance `⟨db_ij, db_kl⟩ = δ_il δ_jk dt` that
//! comes from the scalar product `⟨M, N⟩ = Tr(MN)`.

use serde::Serialize;

use crate::comm::{CommPoly, CommRing};
use crate::error::Result;
use crate::scalar::{Rational, Scalar};
use crate::span::{build_span, MembershipResult};

/// `E[m_ij(1) m_kl(1)]`; the traceless variant removes the trace direction.
pub fn bm_covariance(d: usize, traceless: bool, (i, j): (usize, usize), (k, l): (usize, usize)) -> Rational {
    let mut v = if i == l && j == k { Rational::ONE } else { Rational::ZERO };
    if traceless && i == j && k == l {
        v = &v - &Rational::new(1, d as i64);
    }
    v
}

/// `½ Σ_{i,j} ∂²f / ∂b_ij ∂b_ji`.
pub fn ito_drift(f: &CommPoly) -> Result<CommPoly> {
    let d = f.rank();
    let mut acc = CommPoly::zero(d);
    for i in 1..=d {
        for j in 1..=d {
            acc = &acc + &f.derivative(i, j)?.derivative(j, i)?;
        }
    }
    Ok(acc.scale(&Scalar::ratio(1, 2)))
}

/// `Σ_{i,j} (∂f/∂b_ij)(∂h/∂b_ji)`.
pub fn ito_covar(f: &CommPoly, h: &CommPoly) -> Result<CommPoly> {
    let d = f.rank();
    let mut acc = CommPoly::zero(d);
    for i in 1..=d {
        for j in 1..=d {
            let a = f.derivative(i, j)?;
            if a.is_zero() {
                continue;
            }
            acc = &acc + &a.checked_mul(&h.derivative(j, i)?)?;
        }
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosureTarget {
    Drift { f: usize },
    Covar { f: usize, h: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureEntry {
    pub target: ClosureTarget,
    pub result: MembershipResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub bound: u32,
    pub dimension: usize,
    pub entries: Vec<ClosureEntry>,
}

impl ClosureReport {
    pub fn all_in_span(&self) -> bool {
        self.entries.iter().all(|e| e.result.in_span())
    }
}

/// Tests every drift `ito_drift(f)` and every covariation `ito_covar(f, h)`
/// (`f ≤ h`; the form is symmetric) for membership in the commutative span
/// of the family.
pub fn closure_check(family: &[CommPoly], bound: u32) -> Result<ClosureReport> {
    let d = family.first().map(CommPoly::rank).unwrap_or(1);
    let ring = CommRing::new(d);
    let basis = build_span(&ring, family, bound)?;
    let mut entries = Vec::new();
    for (a, f) in family.iter().enumerate() {
        let drift = ito_drift(f)?;
        entries.push(ClosureEntry { target: ClosureTarget::Drift { f: a }, result: basis.membership(&drift)? });
        for (b, h) in family.iter().enumerate().skip(a) {
            let covar = ito_covar(f, h)?;
            entries.push(ClosureEntry { target: ClosureTarget::Covar { f: a, h: b }, result: basis.membership(&covar)? });
        }
    }
    Ok(ClosureReport { bound, dimension: basis.dimension(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{BlockPartition, BlockWord, FamilyKind};
    use crate::comm::{comm_named_family, comm_trace_word};
    use crate::span::Verdict;

    fn tr_pow(d: usize, k: usize) -> CommPoly {
        crate::comm::comm_corner_trace_power(d, d, k).unwrap()
    }

    fn konst(d: usize, n: i64) -> CommPoly {
        CommPoly::constant(d, Scalar::from_int(n))
    }

    #[test]
    fn drift_examples() {
        for d in 2..=4 {
            assert!(ito_drift(&tr_pow(d, 1)).unwrap().is_zero());
            assert_eq!(ito_drift(&tr_pow(d, 2)).unwrap(), konst(d, (d * d) as i64));
        }
        let p = CommPoly::var(2, 1, 2).unwrap().mul(&CommPoly::var(2, 2, 1).unwrap());
        assert_eq!(ito_drift(&p).unwrap(), konst(2, 1));
    }

    #[test]
    fn covar_examples() {
        for d in 2..=4 {
            assert_eq!(ito_covar(&tr_pow(d, 1), &tr_pow(d, 1)).unwrap(), konst(d, d as i64));
            let t2 = tr_pow(d, 2);
            assert_eq!(ito_covar(&t2, &t2).unwrap(), t2.scale(&Scalar::from_int(4)));
            assert_eq!(ito_covar(&tr_pow(d, 1), &CommPoly::var(d, 1, 1).unwrap()).unwrap(), konst(d, 1));
        }
    }

    #[test]
    fn covariance_rule() {
        assert_eq!(bm_covariance(3, false, (1, 2), (2, 1)), Rational::ONE);
        assert_eq!(bm_covariance(3, false, (1, 2), (1, 2)), Rational::ZERO);
        assert_eq!(bm_covariance(3, true, (1, 1), (1, 1)), Rational::new(2, 3));
        assert_eq!(bm_covariance(3, true, (1, 1), (2, 2)), Rational::new(-1, 3));
    }

    #[test]
    fn closure_examples() {
        let part = BlockPartition::new(3, 1).unwrap();
        let fam: Vec<_> = comm_named_family(&part, FamilyKind::P1, 3).unwrap().into_iter().map(|m| m.poly).collect();
        let report = closure_check(&fam, 6).unwrap();
        assert!(report.all_in_span());

        let single = closure_check(&[tr_pow(4, 1)], 1).unwrap();
        assert!(single.all_in_span());

        let part = BlockPartition::new(3, 2).unwrap();
        let fam: Vec<_> = comm_named_family(&part, FamilyKind::P2Nested, 3).unwrap().into_iter().map(|m| m.poly).collect();
        let report = closure_check(&fam, 6).unwrap();
        assert!(report.entries.iter().any(|e| e.result.verdict == Verdict::NotInSpanUpToBound));

        let w = comm_trace_word(&part, &BlockWord::new(vec![1, 3]).unwrap()).unwrap();
        let ring = CommRing::new(3);
        let basis = build_span(&ring, &fam, 6).unwrap();
        assert!(!basis.membership(&w).unwrap().in_span());
    }
}
