//! Stable JSON schema for elements.
//!
//! ```json
//! {"d": 3, "terms": [{"monomial": [[["e",1,2],1], [["h",1],2]], "coeff": ["1/2","0"]}]}
//! ```
//!
//! Generator keys are `["e",i,j]`, `["h",k]`, `["c"]` and, for polynomials in
//! the matrix entries, `["b",i,j]`. Rationals are strings.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use ugl_core::comm::CommPoly;
use ugl_core::hopf::TensorElement;
use ugl_core::pbw::{pbw_index, pbw_order};
use ugl_core::{AlgebraError, Generator, Monomial, Result, Scalar, UeaElement};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub monomial: Vec<(Vec<Value>, u32)>,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub d: usize,
    pub terms: Vec<TermJson>,
}

fn gen_key(g: Generator) -> Vec<Value> {
    match g {
        Generator::OffDiag(i, j) => vec![json!("e"), json!(i), json!(j)],
        Generator::Cartan(k) => vec![json!("h"), json!(k)],
        Generator::Central => vec![json!("c")],
    }
}

fn bad(msg: impl Into<String>) -> AlgebraError {
    AlgebraError::InvalidArgument(msg.into())
}

fn parse_key(key: &[Value]) -> Result<(String, Vec<usize>)> {
    let kind = key.first().and_then(Value::as_str).ok_or_else(|| bad("generator key must start with a kind string"))?;
    let idx = key[1..]
        .iter()
        .map(|v| v.as_u64().map(|x| x as usize).ok_or_else(|| bad("generator indices must be nonnegative integers")))
        .collect::<Result<Vec<_>>>()?;
    Ok((kind.to_string(), idx))
}

fn exponent(e: u32) -> Result<u8> {
    u8::try_from(e).map_err(|_| bad(format!("exponent {e} is too large")))
}

fn monomial_json(d: usize, m: &Monomial) -> Vec<(Vec<Value>, u32)> {
    m.factors(d).into_iter().map(|(g, e)| (gen_key(g), e)).collect()
}

pub fn uea_to_json(u: &UeaElement) -> ElementJson {
    let d = u.rank();
    ElementJson {
        d,
        terms: u.terms().iter().map(|(m, c)| TermJson { monomial: monomial_json(d, m), coeff: c.clone() }).collect(),
    }
}

fn uea_monomial(d: usize, factors: &[(Vec<Value>, u32)]) -> Result<Monomial> {
    let mut exps = vec![0u8; pbw_order(d).len()];
    for (key, e) in factors {
        let g = match parse_key(key)? {
            (k, v) if k == "e" && v.len() == 2 => Generator::OffDiag(v[0], v[1]),
            (k, v) if k == "h" && v.len() == 1 => Generator::Cartan(v[0]),
            (k, v) if k == "c" && v.is_empty() => Generator::Central,
            (k, _) => return Err(bad(format!("unknown generator key `{k}`"))),
        };
        let slot = &mut exps[pbw_index(d, g.validate(d)?)];
        *slot = slot.checked_add(exponent(*e)?).ok_or_else(|| bad("exponent overflow"))?;
    }
    Ok(Monomial::from_exponents(&exps))
}

pub fn uea_from_json(j: &ElementJson) -> Result<UeaElement> {
    let terms = j.terms.iter().map(|t| Ok((uea_monomial(j.d, &t.monomial)?, t.coeff.clone()))).collect::<Result<Vec<_>>>()?;
    Ok(UeaElement::from_terms(j.d, terms))
}

pub fn comm_to_json(p: &CommPoly) -> ElementJson {
    let d = p.rank();
    let terms = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let monomial = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(k, &e)| (vec![json!("b"), json!(k / d + 1), json!(k % d + 1)], e as u32))
                .collect();
            TermJson { monomial, coeff: c.clone() }
        })
        .collect();
    ElementJson { d, terms }
}

pub fn comm_from_json(j: &ElementJson) -> Result<CommPoly> {
    let d = j.d;
    let mut terms = Vec::with_capacity(j.terms.len());
    for t in &j.terms {
        let mut exps = vec![0u8; d * d];
        for (key, e) in &t.monomial {
            let (k, v) = parse_key(key)?;
            if k != "b" || v.len() != 2 {
                return Err(bad(format!("expected a `b` key, found `{k}`")));
            }
            for &x in &v {
                if x == 0 || x > d {
                    return Err(AlgebraError::IndexOutOfRange { what: "b[i,j]", index: x, bound: d });
                }
            }
            let slot = &mut exps[(v[0] - 1) * d + v[1] - 1];
            *slot = slot.checked_add(exponent(*e)?).ok_or_else(|| bad("exponent overflow"))?;
        }
        terms.push((Monomial::from_exponents(&exps), t.coeff.clone()));
    }
    Ok(CommPoly::from_terms(d, terms))
}

/// `{"d", "terms": [{"left", "right", "coeff"}]}` for an element of `U ⊗ U`.
pub fn tensor_to_json(t: &TensorElement) -> Value {
    let d = t.rank();
    let terms: Vec<Value> = t
        .terms()
        .iter()
        .map(|((l, r), c)| json!({"left": monomial_json(d, l), "right": monomial_json(d, r), "coeff": c}))
        .collect();
    json!({"d": d, "terms": terms})
}
