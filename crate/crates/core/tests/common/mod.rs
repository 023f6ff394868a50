#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ugl_core::blocks::{named_family, BlockPartition, FamilyKind};
use ugl_core::pbw::pbw_order;
use ugl_core::{Algebra, DenseMatrix, Rational, Scalar, UeaElement};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.random_range(-5..=5), rng.random_range(1..=4))
}

/// Small Gaussian rational, real with probability 3/4.
pub fn scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let re = rational(rng);
    if rng.random_bool(0.25) {
        Scalar::new(re, rational(rng))
    } else {
        Scalar::real(re)
    }
}

/// Random element with at most `max_terms` words of length at most `max_deg`.
pub fn element(alg: &Algebra, rng: &mut ChaCha8Rng, max_deg: usize, max_terms: usize) -> UeaElement {
    let gens = pbw_order(alg.rank());
    let mut acc = alg.zero();
    for _ in 0..rng.random_range(1..=max_terms) {
        let mut t = alg.constant(scalar(rng));
        for _ in 0..rng.random_range(0..=max_deg) {
            let g = gens[rng.random_range(0..gens.len())];
            t = alg.multiply(&t, &alg.gen(g).unwrap()).unwrap();
        }
        acc = &acc + &t;
    }
    acc
}

/// Random element of `gl_d` (degree one, no constant term).
pub fn lie_element(alg: &Algebra, rng: &mut ChaCha8Rng) -> UeaElement {
    let gens = pbw_order(alg.rank());
    let mut acc = alg.zero();
    for g in gens {
        if rng.random_bool(0.6) {
            acc = &acc + &alg.gen(g).unwrap().scale(&scalar(rng));
        }
    }
    acc
}

pub fn rational_matrix(d: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(d, d, |_, _| scalar(rng))
}

/// Random invertible matrix with small integer entries.
pub fn invertible(d: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    loop {
        let g = DenseMatrix::from_fn(d, d, |_, _| Scalar::from_int(rng.random_range(-2..=2)));
        if g.inverse().is_ok() {
            return g;
        }
    }
}

/// Random combination of products of block trace words, invariant by
/// construction.
pub fn invariant_element(alg: &Algebra, p: usize, rng: &mut ChaCha8Rng, max_deg: u32) -> UeaElement {
    let part = BlockPartition::new(alg.rank(), p).unwrap();
    let fam = named_family(alg, &part, FamilyKind::Klink, 2).unwrap();
    let mut acc = alg.constant(scalar(rng));
    for _ in 0..rng.random_range(1..=3) {
        let mut t = alg.constant(scalar(rng));
        loop {
            let f = &fam[rng.random_range(0..fam.len())].element;
            if t.degree().unwrap_or(0) + f.degree().unwrap_or(0) > max_deg {
                break;
            }
            t = alg.multiply(&t, f).unwrap();
            if rng.random_bool(0.5) {
                break;
            }
        }
        acc = &acc + &t;
    }
    acc
}
