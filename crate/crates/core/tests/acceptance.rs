//! End-to-end acceptance run. Prints one PASS/FAIL line per check and exits
//! non-zero if any check fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::Rng;
use ugl_core::blocks::{corner_trace_power, counterexample_a, named_family, trace_word, BlockPartition, BlockWord, FamilyKind};
use ugl_core::comm::{comm_corner_trace_power, comm_named_family, comm_trace_word, CommPoly, CommRing};
use ugl_core::hopf::{apply_p, coproduct, coproduct_left_twice, coproduct_right_twice};
use ugl_core::ito::{closure_check, ito_covar, ito_drift};
use ugl_core::mc::{mean_and_se, minor_spectra_tol, sample_hbm};
use ugl_core::rep::{wick_limit, Representation};
use ugl_core::span::{build_span, verify_certificate, Verdict};
use ugl_core::{Algebra, Generator, Scalar, UeaElement};

use common::*;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(limit_s), || format!("took {:.1}s, limit {limit_s}s", elapsed.as_secs_f64()))
}

fn elements(alg: &Algebra, part: &BlockPartition, kind: FamilyKind, kmax: usize) -> Vec<UeaElement> {
    named_family(alg, part, kind, kmax).unwrap().into_iter().map(|m| m.element).collect()
}

fn p2_counterexample() -> Outcome {
    let start = Instant::now();
    let alg = Algebra::new(3);
    let part = BlockPartition::new(3, 2).unwrap();
    let a = counterexample_a(&alg).unwrap();

    let fam6 = elements(&alg, &part, FamilyKind::P2Nested, 6);
    let basis6 = build_span(&alg, &fam6, 6).unwrap();
    let res = basis6.membership(&a).unwrap();
    ensure(res.in_span(), || "a is not in the span at D=6".into())?;
    ensure(verify_certificate(&alg, &fam6, &a, &res.certificate).unwrap(), || "certificate for a does not verify".into())?;

    let pa = apply_p(&alg, &a).unwrap();
    let fam8 = elements(&alg, &part, FamilyKind::P2Nested, 8);
    let basis8 = build_span(&alg, &fam8, 8).unwrap();
    let res = basis8.membership(&pa).unwrap();
    ensure(res.verdict == Verdict::NotInSpanUpToBound, || "P(a) was found in the span at D=8".into())?;

    // The retained generators commute pairwise, so everything in the algebra
    // they generate commutes with each of them. P(a) does not, at any bound.
    let kept: Vec<&UeaElement> = basis8.retained().iter().map(|&i| &fam8[i]).collect();
    for (i, f) in kept.iter().enumerate() {
        for g in &kept[i + 1..] {
            ensure(alg.commutator(f, g).unwrap().is_zero(), || "family is not commutative".into())?;
        }
    }
    let witness = basis8.retained().iter().copied().find(|&i| !alg.commutator(&fam8[i], &pa).unwrap().is_zero());
    ensure(witness.is_some(), || "P(a) commutes with every generator".into())?;
    within(start.elapsed(), 600)?;
    Ok(format!(
        "a in span (D=6, dim {}), P(a) not in span (D=8, dim {}), [g_{}, P(a)] != 0, {:.1}s",
        basis6.dimension(),
        basis8.dimension(),
        witness.unwrap(),
        start.elapsed().as_secs_f64()
    ))
}

fn p1_markov() -> Outcome {
    let start = Instant::now();
    let alg = Algebra::new(3);
    let part = BlockPartition::new(3, 1).unwrap();
    let fam = elements(&alg, &part, FamilyKind::P1, 3);
    let mut checked = 0;
    for (size, label) in [(2, "Tr(E_11^k)"), (3, "Tr(E^k)")] {
        for k in 1..=3 {
            let g = corner_trace_power(&alg, size, k).unwrap();
            let pg = apply_p(&alg, &g).unwrap();
            let bound = g.degree().unwrap();
            let res = build_span(&alg, &fam, bound).unwrap().membership(&pg).unwrap();
            ensure(res.in_span(), || format!("P({label}) with k={k} is not in the span at D={bound}"))?;
            ensure(verify_certificate(&alg, &fam, &pg, &res.certificate).unwrap(), || {
                format!("certificate for P({label}), k={k} does not verify")
            })?;
            checked += 1;
        }
    }
    within(start.elapsed(), 120)?;
    Ok(format!("{checked} targets in span with verified certificates, {:.1}s", start.elapsed().as_secs_f64()))
}

fn p2_trace_word_outside() -> Outcome {
    let alg = Algebra::new(3);
    let part = BlockPartition::new(3, 2).unwrap();
    let w = BlockWord::new(vec![1, 3]).unwrap();
    let target = trace_word(&alg, &part, &w).unwrap();
    ensure(target == alg.multiply(&alg.unit(1, 3).unwrap(), &alg.unit(3, 1).unwrap()).unwrap(), || {
        "trace word is not e13 e31".into()
    })?;
    let ctarget = comm_trace_word(&part, &w).unwrap();
    let ring = CommRing::new(3);
    for bound in [2usize, 4, 6] {
        let fam = elements(&alg, &part, FamilyKind::P2Nested, bound);
        let res = build_span(&alg, &fam, bound as u32).unwrap().membership(&target).unwrap();
        ensure(res.verdict == Verdict::NotInSpanUpToBound, || format!("in span at D={bound}"))?;
        let cfam: Vec<CommPoly> = comm_named_family(&part, FamilyKind::P2Nested, bound).unwrap().into_iter().map(|m| m.poly).collect();
        let res = build_span(&ring, &cfam, bound as u32).unwrap().membership(&ctarget).unwrap();
        ensure(res.verdict == Verdict::NotInSpanUpToBound, || format!("commutative analog in span at D={bound}"))?;
    }
    Ok("not in span at D = 2, 4, 6 in both settings".into())
}

fn quantum_markov() -> Outcome {
    let mut r = rng(0xA4);
    for case in 0..50 {
        let d = 2 + case % 2;
        let alg = Algebra::new(d);
        let rep = Representation::new(&alg);
        let n = r.random_range(2..=4);
        let u = element(&alg, &mut r, 3, 3);
        let legs: Vec<_> = (0..r.random_range(0..n)).map(|_| rational_matrix(d, &mut r)).collect();
        let pu = apply_p(&alg, &u).unwrap();
        let lhs = rep.omega_obs(&u, n, &legs).unwrap();
        let rhs = rep.omega_obs(&pu, n - 1, &legs).unwrap();
        ensure(lhs == rhs, || format!("case {case} (d={d}, n={n}): {lhs} != {rhs}"))?;
    }
    Ok("50 random instances exact".into())
}

fn moment_oracles() -> Outcome {
    let mut r = rng(0xA5);
    for case in 0..100 {
        let d = 2 + case % 2;
        let alg = Algebra::new(d);
        let rep = Representation::new(&alg);
        let n = r.random_range(1..=5);
        let u = element(&alg, &mut r, 3, 3);
        let (a, b) = (rep.omega_moment(&u, n).unwrap(), rep.moment_via_p(&u, n).unwrap());
        ensure(a == b, || format!("case {case} (d={d}, n={n}): {a} != {b}"))?;
    }
    let alg = Algebra::new(2);
    let rep = Representation::new(&alg);
    let h = alg.gen(Generator::Cartan(1)).unwrap();
    let h2 = alg.multiply(&h, &h).unwrap();
    for n in 1..=12 {
        let m = rep.omega_moment(&h2, n).unwrap();
        ensure(m == Scalar::from_int(n as i64), || format!("omega(j_{n}(h1^2)) = {m}"))?;
        ensure(rep.moment_via_p(&h2, n).unwrap() == m, || format!("P route differs at n={n}"))?;
    }
    Ok("100 random instances exact, h1^2 moments equal n for n = 1..12".into())
}

fn invariance() -> Outcome {
    let mut words = 0;
    for d in 2..=4 {
        let alg = Algebra::new(d);
        for p in 0..=2.min(d - 1) {
            let part = BlockPartition::new(d, p).unwrap();
            for w in BlockWord::all_up_to(part.n_blocks(), 4) {
                let u = trace_word(&alg, &part, &w).unwrap();
                ensure(alg.is_invariant(&u, p).unwrap(), || format!("word {:?} at d={d}, p={p}", w.indices()))?;
                words += 1;
            }
        }
    }
    let mut pairs = 0;
    for d in 2..=4 {
        let alg = Algebra::new(d);
        let fam = elements(&alg, &BlockPartition::new(d, 1).unwrap(), FamilyKind::P1, d);
        for (i, f) in fam.iter().enumerate() {
            for g in &fam[i + 1..] {
                ensure(alg.commutator(f, g).unwrap().is_zero(), || format!("p=1 family does not commute at d={d}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{words} trace words invariant, {pairs} commuting pairs"))
}

fn ito_closure() -> Outcome {
    let part = BlockPartition::new(3, 1).unwrap();
    let fam: Vec<CommPoly> = comm_named_family(&part, FamilyKind::P1, 3).unwrap().into_iter().map(|m| m.poly).collect();
    let report = closure_check(&fam, 6).unwrap();
    ensure(report.all_in_span(), || "some drift or covariation is outside the span".into())?;
    for d in 2..=4 {
        let tr = (1..=d).fold(CommPoly::zero(d), |acc, i| &acc + &CommPoly::var(d, i, i).unwrap());
        let covar = ito_covar(&tr, &tr).unwrap();
        ensure(covar == CommPoly::constant(d, Scalar::from_int(d as i64)), || format!("covar(TrB, TrB) = {covar} at d={d}"))?;
        let drift = ito_drift(&comm_corner_trace_power(d, d, 2).unwrap()).unwrap();
        ensure(drift == CommPoly::constant(d, Scalar::from_int((d * d) as i64)), || format!("drift(Tr B^2) = {drift} at d={d}"))?;
    }
    Ok(format!("{} targets in span (dim {}), scalar identities exact for d = 2..4", report.entries.len(), report.dimension))
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let (d, paths, seed) = (4, 10_000, 20_240_601);
    let ens = sample_hbm(d, &[1.0], paths, seed, false).unwrap();
    let traces: Vec<f64> = (0..paths).map(|p| ens.sample(p, 0).trace()).collect();
    let (mean, _) = mean_and_se(&traces);
    let sq: Vec<f64> = traces.iter().map(|x| (x - mean).powi(2)).collect();
    let (var, var_se) = mean_and_se(&sq);
    ensure((var - 4.0).abs() <= 3.0 * var_se, || format!("Var(TrB) = {var:.4} ± {var_se:.4}"))?;

    let cross: Vec<f64> = (0..paths)
        .map(|p| {
            let s = ens.sample(p, 0);
            (s.get(0, 1) * s.get(1, 0)).re
        })
        .collect();
    let (m12, se12) = mean_and_se(&cross);
    ensure((m12 - 1.0).abs() <= 3.0 * se12, || format!("E[b12 b21] = {m12:.4} ± {se12:.4}"))?;

    let sp = minor_spectra_tol(&ens, &[1, 2, 3, 4], 1e-10).unwrap();
    ensure(sp.interlacing.violations == 0, || format!("{} interlacing violations", sp.interlacing.violations))?;

    let again = sample_hbm(d, &[1.0], paths, seed, false).unwrap();
    let same = ens.raw().len() == again.raw().len()
        && ens.raw().iter().zip(again.raw()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    ensure(same, || "rerun differs".into())?;
    within(start.elapsed(), 120)?;
    Ok(format!(
        "Var(TrB) = {var:.3} ± {var_se:.3}, E[b12 b21] = {m12:.3} ± {se12:.3}, interlacing {}/{}, rerun identical, {:.1}s",
        sp.interlacing.checked - sp.interlacing.violations,
        sp.interlacing.checked,
        start.elapsed().as_secs_f64()
    ))
}

fn walk_second_moments() -> Outcome {
    let mut checked = 0;
    for d in 2..=4 {
        let alg = Algebra::new(d);
        let rep = Representation::new(&alg);
        for i in 1..=d {
            for j in 1..=d {
                for k in 1..=d {
                    for l in 1..=d {
                        let word = [(i, j), (k, l)];
                        let limit = wick_limit(d, &word);
                        for n in 1..=8 {
                            let m = rep.scaled_walk_moment(&word, n).unwrap();
                            ensure(m.scaled.as_ref() == Some(&limit), || {
                                format!("d={d}, n={n}, x{i}{j} x{k}{l}: {:?} vs {limit}", m.scaled)
                            })?;
                            checked += 1;
                        }
                    }
                }
            }
        }
        let diag = wick_limit(d, &[(1, 1), (1, 1)]);
        ensure(diag == Scalar::ratio(d as i64 - 1, d as i64), || format!("diagonal limit {diag} at d={d}"))?;
    }
    Ok(format!("{checked} scaled second moments equal the limit covariance"))
}

fn algebraic_suites() -> Outcome {
    const CASES: u64 = 100;
    for seed in 0..CASES {
        let d = 2 + (seed % 2) as usize;
        let alg = Algebra::new(d);
        let mut r = rng(seed);

        let (x, y, z) = (lie_element(&alg, &mut r), lie_element(&alg, &mut r), lie_element(&alg, &mut r));
        let ad = |a: &UeaElement, b: &UeaElement| alg.ad_action(a, b).unwrap();
        let jacobi = &(&ad(&x, &ad(&y, &z)) + &ad(&y, &ad(&z, &x))) + &ad(&z, &ad(&x, &y));
        ensure(jacobi.is_zero(), || format!("Jacobi fails for seed {seed}"))?;

        let (u, v) = (element(&alg, &mut r, 3, 3), element(&alg, &mut r, 2, 3));
        ensure(coproduct_left_twice(&u) == coproduct_right_twice(&u), || format!("coassociativity fails for seed {seed}"))?;
        let uv = alg.multiply(&u, &v).unwrap();
        ensure(coproduct(&uv) == coproduct(&u).multiply(&alg, &coproduct(&v)).unwrap(), || {
            format!("coproduct is not multiplicative for seed {seed}")
        })?;

        let w = element(&alg, &mut r, 3, 2);
        let g = invertible(d, &mut r);
        let lhs = alg.ad_group(&g, &apply_p(&alg, &w).unwrap()).unwrap();
        let rhs = apply_p(&alg, &alg.ad_group(&g, &w).unwrap()).unwrap();
        ensure(lhs == rhs, || format!("P is not Ad-equivariant for seed {seed}"))?;

        let d4 = 2 + (seed % 3) as usize;
        let alg4 = Algebra::new(d4);
        let p = r.random_range(0..d4);
        let inv = invariant_element(&alg4, p, &mut r, 4);
        ensure(alg4.is_invariant(&inv, p).unwrap(), || format!("seed {seed}: constructed element is not invariant"))?;
        ensure(alg4.is_invariant(&apply_p(&alg4, &inv).unwrap(), p).unwrap(), || format!("seed {seed}: P(u) is not invariant"))?;
    }
    Ok(format!("{CASES} instances each of Jacobi, coassociativity, multiplicativity, Ad-equivariance and P-stability"))
}

fn main() {
    let checks: [Check; 10] = [
        ("p=2 counterexample: a in span, P(a) not", p2_counterexample),
        ("p=1 family is closed under P", p1_markov),
        ("Tr(E13 E31) outside the p=2 nested span", p2_trace_word_outside),
        ("quantum Markov property", quantum_markov),
        ("tensor and P moment routes agree", moment_oracles),
        ("trace word invariance and p=1 commutativity", invariance),
        ("Ito closure of the p=1 family", ito_closure),
        ("Hermitian Brownian motion calibration", monte_carlo),
        ("walk second moments match the Wick limit", walk_second_moments),
        ("algebraic property suites", algebraic_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("[{:>2}] PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[{:>2}] FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
