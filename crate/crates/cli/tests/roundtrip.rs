use proptest::prelude::*;
use ugl_cli::expr::{parse_comm, parse_uea};
use ugl_cli::json::{comm_from_json, comm_to_json, uea_from_json, uea_to_json, ElementJson};
use ugl_core::comm::CommPoly;
use ugl_core::pbw::pbw_order;
use ugl_core::{Algebra, Generator, Rational, Scalar, UeaElement};

fn scalar() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=6, -4i64..=4, 1i64..=3)
        .prop_map(|(a, b, c, e)| Scalar::new(Rational::new(a, b), Rational::new(c, e)))
}

fn uea(d: usize) -> impl Strategy<Value = UeaElement> {
    let gens = pbw_order(d);
    let word = prop::collection::vec(0..gens.len(), 0..4);
    prop::collection::vec((word, scalar()), 1..4).prop_map(move |terms| {
        let alg = Algebra::new(d);
        let mut acc = alg.zero();
        for (w, c) in terms {
            let mut m = alg.constant(c);
            for k in w {
                let g: Generator = gens[k];
                m = alg.multiply(&m, &alg.gen(g).unwrap()).unwrap();
            }
            acc = &acc + &m;
        }
        acc
    })
}

fn poly(d: usize) -> impl Strategy<Value = CommPoly> {
    let var = (1..=d, 1..=d);
    prop::collection::vec((prop::collection::vec(var, 0..4), scalar()), 1..4).prop_map(move |terms| {
        let mut acc = CommPoly::zero(d);
        for (vars, c) in terms {
            let mut m = CommPoly::constant(d, c);
            for (i, j) in vars {
                m = m.mul(&CommPoly::var(d, i, j).unwrap());
            }
            acc = &acc + &m;
        }
        acc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn uea_text_round_trip(u in uea(3)) {
        let alg = Algebra::new(3);
        prop_assert_eq!(parse_uea(&u.to_string(), &alg, None).unwrap(), u);
    }

    #[test]
    fn uea_json_round_trip(u in uea(2)) {
        let text = serde_json::to_string(&uea_to_json(&u)).unwrap();
        let back: ElementJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(uea_from_json(&back).unwrap(), u);
    }

    #[test]
    fn comm_round_trips(p in poly(3)) {
        prop_assert_eq!(parse_comm(&p.to_string(), 3, None).unwrap(), p.clone());
        prop_assert_eq!(comm_from_json(&comm_to_json(&p)).unwrap(), p);
    }
}
