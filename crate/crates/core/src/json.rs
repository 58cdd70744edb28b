//! Canonical JSON encoding of rings, polynomials, matrices, modules,
//! factorizations, filtered modules, exact-sequence claims and certificates.
//! Object keys come out sorted, polynomial terms in the ring's order.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::ball::{BallCertificate, Block, Body, Generator, Mode, RadiusReport, Syzygy};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matfac::{MatrixFactorization, SummandWitness};
use crate::matrix::PolyMatrix;
use crate::module::{ExactSequenceClaim, PresentedModule};
use crate::poly::{Monomial, MonomialOrder, Polynomial, Ring, RingRef, Term};
use crate::star::{FilteredModule, Layer};

fn bad(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field {key:?}")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(format!("{what} must be a non-negative integer")))
}

fn as_bool(v: &Value, what: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| bad(format!("{what} must be a boolean")))
}

pub fn ring_to_json(r: &RingRef) -> Value {
    let field = match r.field {
        Field::Rational => json!("Q"),
        Field::Prime(p) => json!({ "Fp": p }),
    };
    json!({ "vars": r.vars, "field": field, "order": r.order.name() })
}

pub fn ring_from_json(v: &Value) -> Result<RingRef> {
    let vars: Vec<String> = as_array(field(v, "vars")?, "vars")?
        .iter()
        .map(|s| s.as_str().map(str::to_string).ok_or_else(|| bad("variable names must be strings")))
        .collect::<Result<_>>()?;
    let fld = match v.get("field") {
        None => Field::Rational,
        Some(Value::String(s)) if s == "Q" => Field::Rational,
        Some(f) => match f.get("Fp").and_then(Value::as_u64) {
            Some(p) => Field::prime(p)?,
            None => return Err(bad("field must be \"Q\" or {\"Fp\": p}")),
        },
    };
    let order = match v.get("order") {
        None => MonomialOrder::Grevlex,
        Some(o) => MonomialOrder::from_name(o.as_str().ok_or_else(|| bad("order must be a string"))?)?,
    };
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    Ok(Ring::new(&names, fld, order))
}

pub fn poly_to_json(p: &Polynomial) -> Value {
    Value::Array(
        p.terms()
            .iter()
            .map(|t| json!({ "c": p.ring().field.format(&t.coeff), "e": t.mono.0.to_vec() }))
            .collect(),
    )
}

/// Accepts the term list form or a string in the polynomial syntax.
pub fn poly_from_json(r: &RingRef, v: &Value) -> Result<Polynomial> {
    if let Some(s) = v.as_str() {
        return r.parse(s);
    }
    let mut terms = Vec::new();
    for t in as_array(v, "polynomial")? {
        let c = field(t, "c")?;
        let coeff = match c {
            Value::String(s) => r.field.parse(s)?,
            Value::Number(n) => r.field.parse(&n.to_string())?,
            _ => return Err(bad("coefficient must be a string or integer")),
        };
        let e: Vec<u32> = as_array(field(t, "e")?, "exponents")?
            .iter()
            .map(|x| x.as_u64().and_then(|x| u32::try_from(x).ok()).ok_or_else(|| bad("exponents must be small integers")))
            .collect::<Result<_>>()?;
        if e.len() != r.nvars() {
            return Err(bad(format!("exponent vector of length {} in {} variables", e.len(), r.nvars())));
        }
        terms.push(Term { mono: Monomial::from_slice(&e), coeff });
    }
    Ok(Polynomial::from_terms(r, terms))
}

pub fn polys_to_json(ps: &[Polynomial]) -> Value {
    Value::Array(ps.iter().map(poly_to_json).collect())
}

pub fn polys_from_json(r: &RingRef, v: &Value) -> Result<Vec<Polynomial>> {
    as_array(v, "polynomial list")?.iter().map(|p| poly_from_json(r, p)).collect()
}

pub fn matrix_to_json(m: &PolyMatrix) -> Value {
    let entries: Vec<Value> = (0..m.rows()).map(|i| polys_to_json(&m.row(i))).collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": entries })
}

pub fn matrix_from_json(r: &RingRef, v: &Value) -> Result<PolyMatrix> {
    let entries = as_array(field(v, "entries")?, "entries")?;
    let rows = match v.get("rows") {
        Some(x) => as_usize(x, "rows")?,
        None => entries.len(),
    };
    let cols = match v.get("cols") {
        Some(x) => as_usize(x, "cols")?,
        None => entries.first().and_then(Value::as_array).map_or(0, Vec::len),
    };
    if entries.len() != rows {
        return Err(bad(format!("{} rows listed, {rows} declared", entries.len())));
    }
    let mut out = PolyMatrix::zero(r, rows, cols);
    for (i, row) in entries.iter().enumerate() {
        let row = as_array(row, "matrix row")?;
        if row.len() != cols {
            return Err(bad(format!("row {} has {} entries, {cols} declared", i + 1, row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            out.set(i, j, poly_from_json(r, e)?);
        }
    }
    Ok(out)
}

pub fn vector_from_json(r: &RingRef, v: &Value) -> Result<crate::matrix::FreeVector> {
    crate::matrix::FreeVector::new(r, polys_from_json(r, v)?)
}

pub fn module_to_json(m: &PresentedModule) -> Value {
    json!({ "ideal": polys_to_json(m.ideal()), "P": matrix_to_json(m.presentation()) })
}

pub fn module_from_json(r: &RingRef, v: &Value) -> Result<PresentedModule> {
    let ideal = match v.get("ideal") {
        Some(i) => polys_from_json(r, i)?,
        None => Vec::new(),
    };
    PresentedModule::new(ideal, matrix_from_json(r, field(v, "P")?)?)
}

pub fn mf_to_json(mf: &MatrixFactorization) -> Value {
    json!({ "f": poly_to_json(&mf.f), "A": matrix_to_json(&mf.a), "B": matrix_to_json(&mf.b) })
}

pub fn mf_from_json(r: &RingRef, v: &Value) -> Result<MatrixFactorization> {
    MatrixFactorization::new(
        poly_from_json(r, field(v, "f")?)?,
        matrix_from_json(r, field(v, "A")?)?,
        matrix_from_json(r, field(v, "B")?)?,
    )
}

pub fn filtered_to_json(fm: &FilteredModule) -> Value {
    let layers: Vec<Value> = fm
        .layers()
        .iter()
        .map(|l| match l {
            Layer::Mf(mf) => mf_to_json(mf),
            Layer::Rect { a, b_right } => json!({ "A": matrix_to_json(a), "Bright": matrix_to_json(b_right) }),
        })
        .collect();
    let blocks: Map<String, Value> =
        fm.blocks().iter().map(|(&(i, j), b)| (format!("{},{}", i + 1, j + 1), matrix_to_json(b))).collect();
    json!({ "xs": polys_to_json(fm.xs()), "layers": layers, "blocks": blocks })
}

pub fn filtered_from_json(r: &RingRef, v: &Value) -> Result<FilteredModule> {
    let xs = polys_from_json(r, field(v, "xs")?)?;
    let raw = as_array(field(v, "layers")?, "layers")?;
    if raw.len() != xs.len() {
        return Err(bad(format!("{} layers for {} elements", raw.len(), xs.len())));
    }
    let mut layers = Vec::with_capacity(raw.len());
    for (l, x) in raw.iter().zip(&xs) {
        let a = matrix_from_json(r, field(l, "A")?)?;
        if let Some(br) = l.get("Bright") {
            layers.push(Layer::Rect { a, b_right: matrix_from_json(r, br)? });
        } else {
            let f = match l.get("f") {
                Some(f) => poly_from_json(r, f)?,
                None => x.clone(),
            };
            layers.push(Layer::Mf(MatrixFactorization::new(f, a, matrix_from_json(r, field(l, "B")?)?)?));
        }
    }
    let mut blocks = BTreeMap::new();
    if let Some(b) = v.get("blocks") {
        let obj = b.as_object().ok_or_else(|| bad("blocks must be an object keyed by \"i,j\""))?;
        for (key, m) in obj {
            let (i, j) = key.split_once(',').ok_or_else(|| bad(format!("bad block key {key:?}")))?;
            let parse = |s: &str| s.trim().parse::<usize>().ok().filter(|&k| k >= 1).ok_or_else(|| bad(format!("bad block key {key:?}")));
            blocks.insert((parse(i)? - 1, parse(j)? - 1), matrix_from_json(r, m)?);
        }
    }
    FilteredModule::new(xs, layers, blocks)
}

pub fn claim_to_json(c: &ExactSequenceClaim) -> Value {
    json!({
        "modules": c.modules.iter().map(module_to_json).collect::<Vec<_>>(),
        "maps": c.maps.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "injective": c.injective,
        "surjective": c.surjective,
    })
}

pub fn claim_from_json(r: &RingRef, v: &Value) -> Result<ExactSequenceClaim> {
    let modules = as_array(field(v, "modules")?, "modules")?.iter().map(|m| module_from_json(r, m)).collect::<Result<_>>()?;
    let maps = as_array(field(v, "maps")?, "maps")?.iter().map(|m| matrix_from_json(r, m)).collect::<Result<_>>()?;
    let injective = v.get("injective").map(|b| as_bool(b, "injective")).transpose()?.unwrap_or(false);
    let surjective = v.get("surjective").map(|b| as_bool(b, "surjective")).transpose()?.unwrap_or(false);
    ExactSequenceClaim::new(modules, maps, injective, surjective)
}

fn witness_fields(w: &SummandWitness, obj: &mut Map<String, Value>) {
    obj.insert("n".into(), matrix_to_json(&w.n));
    obj.insert("e".into(), matrix_to_json(&w.e));
}

fn witness_from(r: &RingRef, v: &Value) -> Result<SummandWitness> {
    Ok(SummandWitness { n: matrix_from_json(r, field(v, "n")?)?, e: matrix_from_json(r, field(v, "e")?)? })
}

fn block_to_json(b: Block) -> Value {
    match b {
        Block::Generator => json!("G"),
        Block::Ring => json!("R"),
        Block::Omega(i) => json!({ "omega": i }),
    }
}

fn block_from_json(v: &Value) -> Result<Block> {
    match v {
        Value::String(s) if s == "G" => Ok(Block::Generator),
        Value::String(s) if s == "R" => Ok(Block::Ring),
        _ => Ok(Block::Omega(as_usize(field(v, "omega")?, "omega")?)),
    }
}

pub fn generator_to_json(g: &Generator) -> Value {
    let syz: Vec<Value> =
        g.syzygies.iter().map(|s| json!({ "module": module_to_json(&s.module), "inclusion": matrix_to_json(&s.inclusion) })).collect();
    json!({ "module": module_to_json(&g.module), "syzygies": syz })
}

pub fn generator_from_json(r: &RingRef, v: &Value) -> Result<Generator> {
    let module = module_from_json(r, field(v, "module")?)?;
    let mut syzygies = Vec::new();
    if let Some(list) = v.get("syzygies") {
        for s in as_array(list, "syzygies")? {
            syzygies.push(Syzygy { module: module_from_json(r, field(s, "module")?)?, inclusion: matrix_from_json(r, field(s, "inclusion")?)? });
        }
    }
    Ok(Generator { module, syzygies })
}

fn body_to_json(b: &Body) -> Value {
    let mut obj = Map::new();
    match b {
        Body::Summand { blocks, witness } => {
            obj.insert("blocks".into(), Value::Array(blocks.iter().map(|&b| block_to_json(b)).collect()));
            witness_fields(witness, &mut obj);
            json!({ "summand": obj })
        }
        Body::Extension { claim, witness, left, right } => {
            obj.insert("claim".into(), claim_to_json(claim));
            witness_fields(witness, &mut obj);
            obj.insert("left".into(), node_to_json(left));
            obj.insert("right".into(), node_to_json(right));
            json!({ "extension": obj })
        }
    }
}

/// Subtrees omit the data shared with the root.
fn node_to_json(c: &BallCertificate) -> Value {
    json!({ "level": c.level, "target": module_to_json(&c.target), "body": body_to_json(&c.body) })
}

pub fn cert_to_json(c: &BallCertificate) -> Value {
    let mode = match c.mode {
        Mode::Closed => "closed",
        Mode::Additive => "additive",
    };
    let mut v = node_to_json(c);
    let obj = v.as_object_mut().expect("object");
    obj.insert("mode".into(), json!(mode));
    obj.insert("ideal".into(), polys_to_json(&c.ideal));
    obj.insert("generator".into(), generator_to_json(&c.generator));
    v
}

fn node_from_json(r: &RingRef, v: &Value, mode: Mode, ideal: &[Polynomial], generator: &Generator) -> Result<BallCertificate> {
    let level = as_usize(field(v, "level")?, "level")?;
    let target = module_from_json(r, field(v, "target")?)?;
    let body = field(v, "body")?;
    let body = if let Some(s) = body.get("summand") {
        let blocks = as_array(field(s, "blocks")?, "blocks")?.iter().map(block_from_json).collect::<Result<_>>()?;
        Body::Summand { blocks, witness: witness_from(r, s)? }
    } else if let Some(e) = body.get("extension") {
        let claim = claim_from_json(r, field(e, "claim")?)?;
        if claim.modules.len() != 3 {
            return Err(bad("extension claim must have three modules"));
        }
        Body::Extension {
            claim,
            witness: witness_from(r, e)?,
            left: Box::new(node_from_json(r, field(e, "left")?, mode, ideal, generator)?),
            right: Box::new(node_from_json(r, field(e, "right")?, mode, ideal, generator)?),
        }
    } else {
        return Err(bad("body must be {\"summand\": ...} or {\"extension\": ...}"));
    };
    Ok(BallCertificate { mode, ideal: ideal.to_vec(), generator: generator.clone(), level, target, body })
}

pub fn cert_from_json(r: &RingRef, v: &Value) -> Result<BallCertificate> {
    let mode = match field(v, "mode")?.as_str() {
        Some("closed") => Mode::Closed,
        Some("additive") => Mode::Additive,
        _ => return Err(bad("mode must be \"closed\" or \"additive\"")),
    };
    let ideal = polys_from_json(r, field(v, "ideal")?)?;
    let generator = generator_from_json(r, field(v, "generator")?)?;
    node_from_json(r, v, mode, &ideal, &generator)
}

pub fn report_to_json(rep: &RadiusReport) -> Value {
    json!({
        "generator": module_to_json(&rep.generator),
        "level": rep.level,
        "radius_bound": rep.radius_bound,
        "size_bound": rep.size_bound,
        "statement": rep.statement,
        "certificate": cert_to_json(&rep.certificate),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{theorem0_certify, BallCertificate, Generator, Mode};

    #[test]
    fn ring_round_trip() {
        let r = Ring::new(&["x", "y", "z"], Field::prime(101).unwrap(), MonomialOrder::Lex);
        let v = ring_to_json(&r);
        assert_eq!(v, json!({ "field": { "Fp": 101 }, "order": "lex", "vars": ["x", "y", "z"] }));
        assert_eq!(ring_from_json(&v).unwrap(), r);
    }

    #[test]
    fn polynomial_forms() {
        let r = Ring::qxy();
        let p = r.p("3/2*x^2*y - y + 1");
        let v = poly_to_json(&p);
        assert_eq!(poly_from_json(&r, &v).unwrap(), p);
        assert_eq!(poly_from_json(&r, &json!("3/2*x^2*y - y + 1")).unwrap(), p);
        assert_eq!(v[0], json!({ "c": "3/2", "e": [2, 1] }));
        assert!(poly_from_json(&r, &json!([{ "c": "1", "e": [1] }])).is_err());
    }

    #[test]
    fn canonical_text() {
        let r = Ring::qxy();
        let m = PresentedModule::new(vec![r.p("x")], PolyMatrix::lit(&r, &[&["y", "0"]])).unwrap();
        let s = serde_json::to_string(&module_to_json(&m)).unwrap();
        assert_eq!(s, r#"{"P":{"cols":2,"entries":[[[{"c":"1","e":[0,1]}],[]]],"rows":1},"ideal":[[{"c":"1","e":[1,0]}]]}"#);
    }

    #[test]
    fn filtered_and_certificate_round_trip() {
        let r = Ring::qxy();
        let (f1, f2) = (r.p("x"), r.p("y"));
        let (m1, m2) = (MatrixFactorization::trivial(&f1), MatrixFactorization::trivial(&f2));
        let mut blocks = BTreeMap::new();
        blocks.insert((0, 1), PolyMatrix::identity(&r, 1));
        let fm = FilteredModule::new(vec![f1, f2], vec![Layer::Mf(m1.clone()), Layer::Mf(m2.clone())], blocks).unwrap();
        let v = filtered_to_json(&fm);
        assert!(v["blocks"].get("1,2").is_some());
        assert_eq!(filtered_from_json(&r, &v).unwrap(), fm);

        let gen = |mf: &MatrixFactorization| {
            (mf.clone(), 0, BallCertificate::identity(Mode::Closed, vec![mf.f.clone()], Generator::from_mf(mf, 0).unwrap()))
        };
        let rep = theorem0_certify(&fm, &[gen(&m1), gen(&m2)]).unwrap();
        let cv = cert_to_json(&rep.certificate);
        let back = cert_from_json(&r, &cv).unwrap();
        assert_eq!(cert_to_json(&back), cv);
        assert_eq!(back, rep.certificate);
    }
}
