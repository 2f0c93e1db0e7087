//! JSON file formats for fans, monoids and congruences, and JSON renderings of results.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cones::{Cone, Fan};
use crate::finite_monoid::FiniteMonoid;
use crate::lattice::{bigint_to_json, IntMatrix, IntVec, QmodZ, Subgroup};
use crate::scong_toric::{
    classify_affine, classify_torus, congruence_from_generators, height_n, height_t, Classification, FCongruence,
    MonomialTerm, Presentation, Term, ToricContext,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))
}

fn to_vec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn rows_json(rows: &[IntVec]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(bigint_to_json).collect()))
            .collect(),
    )
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    json!({ "rows": rows_json(&m.rows()) })
}

pub fn vectors_to_json(rows: &[IntVec]) -> Value {
    rows_json(rows)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FanFile {
    rank: usize,
    cones: Vec<Vec<Vec<i64>>>,
}

fn cone_from(rank: usize, gens: &[Vec<i64>]) -> Result<Cone, IoError> {
    let g: Vec<IntVec> = gens.iter().map(|x| to_vec(x)).collect();
    Cone::new(rank, &g).map_err(|e| IoError::Validation(e.to_string()))
}

/// Maximal cones as listed, without closing or validating.
pub fn parse_fan_cones(text: &str) -> Result<(usize, Vec<Cone>), IoError> {
    let f: FanFile = parse(text)?;
    if f.rank == 0 {
        return Err(IoError::Validation("rank must be positive".into()));
    }
    let cones = f.cones.iter().map(|c| cone_from(f.rank, c)).collect::<Result<_, _>>()?;
    Ok((f.rank, cones))
}

/// A fan file closed under faces and validated against the fan axioms.
pub fn parse_fan(text: &str) -> Result<Fan, IoError> {
    let (rank, cones) = parse_fan_cones(text)?;
    Fan::from_maximal(rank, cones).map_err(|e| IoError::Validation(e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MonoidFile {
    elements: Vec<String>,
    zero: String,
    one: String,
    mult: Vec<Vec<String>>,
}

pub fn parse_monoid(text: &str) -> Result<FiniteMonoid, IoError> {
    let f: MonoidFile = parse(text)?;
    let idx = |name: &str| {
        f.elements
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| IoError::Validation(format!("unknown element {name:?}")))
    };
    let table = f
        .mult
        .iter()
        .map(|row| row.iter().map(|x| idx(x)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    FiniteMonoid::new(f.elements.clone(), table, idx(&f.zero)?, idx(&f.one)?)
        .map_err(|e| IoError::Validation(e.to_string()))
}

pub fn monoid_to_json(m: &FiniteMonoid) -> Value {
    let l = m.labels();
    json!({
        "elements": l,
        "zero": l[m.zero()],
        "one": l[m.one()],
        "mult": m.table().iter().map(|r| r.iter().map(|&x| l[x].clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairsFile {
    pairs: Vec<(String, String)>,
}

/// Pairs of element names, resolved against a monoid.
pub fn parse_pairs(text: &str, m: &FiniteMonoid) -> Result<Vec<(usize, usize)>, IoError> {
    let f: PairsFile = parse(text)?;
    let idx = |name: &str| {
        m.labels()
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| IoError::Validation(format!("unknown element {name:?}")))
    };
    f.pairs.iter().map(|(a, b)| Ok((idx(a)?, idx(b)?))).collect()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConeSpec {
    Index(usize),
    Inline { rank: usize, generators: Vec<Vec<i64>> },
    Generators(Vec<Vec<i64>>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TermSpec {
    Zero(String),
    Mono { coeff: Option<String>, exp: Vec<i64> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationSpec {
    a: TermSpec,
    b: TermSpec,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FaceSpec {
    Index(usize),
    Generators(Vec<Vec<i64>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CongruenceFile {
    cone: ConeSpec,
    #[serde(default)]
    relations: Option<Vec<RelationSpec>>,
    #[serde(default)]
    tau: Option<FaceSpec>,
    #[serde(default)]
    h: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    chi: Option<Vec<String>>,
}

/// Contents of a congruence file: either relations to classify or a canonical form.
#[derive(Clone, Debug)]
pub enum CongruenceInput {
    Relations(Presentation),
    Canonical(FCongruence),
}

fn parse_angle(s: &str) -> Result<QmodZ, IoError> {
    s.parse().map_err(|_| IoError::Parse(format!("bad angle {s:?}")))
}

fn term(ctx: &ToricContext, t: &TermSpec) -> Result<Term, IoError> {
    match t {
        TermSpec::Zero(s) if s == "zero" => Ok(Term::Zero),
        TermSpec::Zero(s) => Err(IoError::Parse(format!("expected \"zero\" or a monomial, found {s:?}"))),
        TermSpec::Mono { coeff, exp } => {
            if exp.len() != ctx.rank() {
                return Err(IoError::Validation(format!(
                    "exponent {exp:?} has length {}, expected {}",
                    exp.len(),
                    ctx.rank()
                )));
            }
            let coeff = coeff
                .as_deref()
                .map(parse_angle)
                .transpose()?
                .unwrap_or_else(QmodZ::zero);
            Ok(Term::Mono(MonomialTerm::new(coeff, to_vec(exp))))
        }
    }
}

fn context_from(f: &CongruenceFile, fan: Option<&Fan>) -> Result<Arc<ToricContext>, IoError> {
    let sigma = match &f.cone {
        ConeSpec::Index(i) => {
            let fan = fan.ok_or_else(|| IoError::Validation("cone given by index but no fan supplied".into()))?;
            fan.cones()
                .get(*i)
                .cloned()
                .ok_or_else(|| IoError::Validation(format!("fan has no cone {i}")))?
        }
        ConeSpec::Inline { rank, generators } => cone_from(*rank, generators)?,
        ConeSpec::Generators(g) => {
            let rank = g
                .first()
                .map(|v| v.len())
                .ok_or_else(|| IoError::Validation("empty cone needs an explicit rank".into()))?;
            cone_from(rank, g)?
        }
    };
    ToricContext::new(sigma).map_err(|e| IoError::Validation(e.to_string()))
}

/// The context named by the `cone` entry of a congruence file; other entries are ignored.
pub fn parse_context(text: &str, fan: Option<&Fan>) -> Result<Arc<ToricContext>, IoError> {
    let f: CongruenceFile = parse(text)?;
    context_from(&f, fan)
}

/// Parses a congruence file. A cone given by index needs the fan it refers to.
pub fn parse_congruence(text: &str, fan: Option<&Fan>) -> Result<CongruenceInput, IoError> {
    let f: CongruenceFile = parse(text)?;
    let ctx = context_from(&f, fan)?;
    match (&f.relations, &f.tau) {
        (Some(rels), None) => {
            let relations = rels
                .iter()
                .map(|r| Ok((term(&ctx, &r.a)?, term(&ctx, &r.b)?)))
                .collect::<Result<_, IoError>>()?;
            Ok(CongruenceInput::Relations(Presentation {
                context: ctx,
                relations,
            }))
        }
        (None, Some(face)) => {
            let tau = match face {
                FaceSpec::Index(i) => *i,
                FaceSpec::Generators(g) => {
                    let c = if g.is_empty() {
                        Cone::zero(ctx.rank())
                    } else {
                        cone_from(ctx.rank(), g)?
                    };
                    ctx.dual()
                        .face_index(&c)
                        .ok_or_else(|| IoError::Validation("tau is not a face of the dual cone".into()))?
                }
            };
            let gens: Vec<IntVec> = f.h.unwrap_or_default().iter().map(|x| to_vec(x)).collect();
            let vals = f
                .chi
                .unwrap_or_default()
                .iter()
                .map(|s| parse_angle(s))
                .collect::<Result<Vec<_>, _>>()?;
            if gens.len() != vals.len() {
                return Err(IoError::Validation("h and chi must have the same length".into()));
            }
            congruence_from_generators(&ctx, tau, &gens, &vals)
                .map(CongruenceInput::Canonical)
                .map_err(|e| IoError::Validation(e.to_string()))
        }
        _ => Err(IoError::Validation(
            "give exactly one of \"relations\" or \"tau\"".into(),
        )),
    }
}

/// Classifies with the algorithm matching the context.
pub fn classify(p: &Presentation) -> Result<Classification, crate::scong_toric::ScongError> {
    if p.context.is_torus() {
        classify_torus(p)
    } else {
        classify_affine(p)
    }
}

pub fn congruence_to_json(c: &FCongruence) -> Value {
    let ctx = c.context();
    json!({
        "tau": c.tau(),
        "tau_generators": rows_json(&ctx.face_cone(c.tau()).generators()),
        "h": rows_json(&c.h().basis_rows()),
        "chi": c.chi().values().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "height": { "N": height_n(c), "T": height_t(c) },
    })
}

pub fn classification_to_json(c: &Classification) -> Value {
    match c {
        Classification::Strong(f) => json!({ "verdict": "Strong", "canonical": congruence_to_json(f) }),
        Classification::NotPrime { reason, degenerate } => {
            json!({ "verdict": c.verdict(), "reason": reason, "degenerate": degenerate })
        }
        Classification::PrimeNotStrong { reason }
        | Classification::CollapsesF { reason }
        | Classification::ZeroClosureNotPrime { reason } => json!({ "verdict": c.verdict(), "reason": reason }),
    }
}

pub fn subgroup_to_json(h: &Subgroup) -> Value {
    matrix_to_json(h.basis())
}

pub fn context_of(input: &CongruenceInput) -> &Arc<ToricContext> {
    match input {
        CongruenceInput::Relations(p) => &p.context,
        CongruenceInput::Canonical(c) => c.context(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fans_parse_and_validate() {
        let p2 = r#"{"rank": 2, "cones": [[[1,0],[0,1]], [[0,1],[-1,-1]], [[-1,-1],[1,0]]]}"#;
        assert_eq!(parse_fan(p2).unwrap().cones().len(), 7);
        let bad = r#"{"rank": 2, "cones": [[[1,0],[0,1]], [[1,1],[-1,0]]]}"#;
        assert!(matches!(parse_fan(bad), Err(IoError::Validation(m)) if m.contains("intersection")));
        assert!(matches!(parse_fan("{\"rank\": 2"), Err(IoError::Parse(_))));
    }

    #[test]
    fn monoids_round_trip() {
        let text =
            r#"{"elements":["0","1","g"],"zero":"0","one":"1","mult":[["0","0","0"],["0","1","g"],["0","g","1"]]}"#;
        let m = parse_monoid(text).unwrap();
        assert!(m.is_domain());
        assert_eq!(
            parse_monoid(&monoid_to_json(&m).to_string()).unwrap().table(),
            m.table()
        );
        let bad = r#"{"elements":["0","1"],"zero":"0","one":"1","mult":[["0","0"],["0","x"]]}"#;
        assert!(matches!(parse_monoid(bad), Err(IoError::Validation(_))));
    }

    #[test]
    fn congruence_files() {
        let text = r#"{"cone": [[1,0],[0,1]], "relations": [
            {"a": {"exp": [1,0]}, "b": "zero"},
            {"a": {"exp": [0,1]}, "b": {"coeff": "1/3", "exp": [0,0]}}]}"#;
        let CongruenceInput::Relations(p) = parse_congruence(text, None).unwrap() else {
            panic!()
        };
        let c = classify(&p).unwrap();
        let j = classification_to_json(&c);
        assert_eq!(j["canonical"]["height"], json!({"N": 1, "T": 1}));
        assert_eq!(j["canonical"]["chi"], json!(["1/3"]));
        let canon = r#"{"cone": {"rank": 1, "generators": []}, "tau": 0, "h": [[2]], "chi": ["0"]}"#;
        assert!(matches!(parse_congruence(canon, None), Err(IoError::Validation(_))));
        let torus = r#"{"cone": {"rank": 1, "generators": []}, "relations": [{"a": {"exp": [2]}, "b": {"exp": [0]}}]}"#;
        let CongruenceInput::Relations(p) = parse_congruence(torus, None).unwrap() else {
            panic!()
        };
        assert_eq!(classify(&p).unwrap().verdict(), "PrimeNotStrong");
    }
}
