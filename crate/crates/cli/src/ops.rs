use std::path::Path;

use serde_json::{json, Value};

use mfstar::ball::{self, BallCertificate, Generator, Mode};
use mfstar::catalog::{Catalog, Params};
use mfstar::error::{Error, Result};
use mfstar::field::Field;
use mfstar::groebner::{groebner_basis, ideal_basis, lift_solve, module_kernel};
use mfstar::json::*;
use mfstar::matfac::{self, MatrixFactorization};
use mfstar::matrix::{FreeVector, PolyMatrix};
use mfstar::module::{exact_check, iso_check, morphism_check, summand_check, ExactSequenceClaim, ModuleMorphism};
use mfstar::oracle::TruncationOracle;
use mfstar::poly::{MonomialOrder, Ring, RingRef};
use mfstar::star::{self, BlockOp};

/// Global flags shared by every handler.
pub struct Ctx {
    pub field: Option<String>,
    pub order: Option<String>,
    pub oracle: Option<u32>,
}

pub struct Outcome {
    pub ok: bool,
    pub result: Value,
}

pub type Handler = fn(&Ctx, &Value) -> Result<Outcome>;

fn done(result: Value) -> Result<Outcome> {
    Ok(Outcome { ok: true, result })
}

fn verdict(ok: bool, mut extra: Value) -> Result<Outcome> {
    if let Some(obj) = extra.as_object_mut() {
        obj.insert("holds".into(), json!(ok));
    }
    Ok(Outcome { ok, result: extra })
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Malformed(format!("missing field {key:?}")))
}

fn parse_field(s: &str) -> Result<Field> {
    if s == "Q" {
        return Ok(Field::Rational);
    }
    let p = s
        .strip_prefix("Fp:")
        .and_then(|p| p.parse::<u64>().ok())
        .ok_or_else(|| Error::Malformed(format!("field must be Q or Fp:<p>, got {s:?}")))?;
    Field::prime(p)
}

impl Ctx {
    /// The document's ring (default `Q[x, y]`, grevlex) with flag overrides.
    pub fn ring(&self, doc: &Value) -> Result<RingRef> {
        let base = match doc.get("ring") {
            Some(r) => ring_from_json(r)?,
            None => Ring::qxy(),
        };
        let mut ring = (*base).clone();
        if let Some(f) = &self.field {
            ring.field = parse_field(f)?;
        }
        if let Some(o) = &self.order {
            ring.order = MonomialOrder::from_name(o)?;
        }
        Ok(std::sync::Arc::new(ring))
    }

    fn oracle_prime(&self, ring: &RingRef) -> u32 {
        match ring.field {
            Field::Prime(p) => p,
            Field::Rational => 101,
        }
    }

    /// Oracle verdict alongside a Gröbner verdict, when requested.
    fn cross_check(&self, ring: &RingRef, claim: &ExactSequenceClaim, exact: bool) -> Result<(bool, Value)> {
        let Some(d) = self.oracle else {
            return Ok((true, Value::Null));
        };
        let p = self.oracle_prime(ring);
        let verdict = TruncationOracle::new(p, d)?.exact(claim)?;
        Ok((verdict == exact, json!({ "p": p, "degree": d, "exact": verdict, "agrees": verdict == exact })))
    }
}

fn ideal_of(r: &RingRef, doc: &Value) -> Result<Vec<mfstar::poly::Polynomial>> {
    match doc.get("ideal") {
        Some(i) => polys_from_json(r, i),
        None => Ok(Vec::new()),
    }
}

fn vectors(r: &RingRef, v: &Value, rank: usize) -> Result<Vec<FreeVector>> {
    let list = v.as_array().ok_or_else(|| Error::Malformed("generators must be an array".into()))?;
    let out: Vec<FreeVector> = list.iter().map(|g| vector_from_json(r, g)).collect::<Result<_>>()?;
    if let Some(bad) = out.iter().find(|g| g.rank() != rank) {
        return Err(Error::Rank { expected: rank, found: bad.rank() });
    }
    Ok(out)
}

fn vector_to_json(v: &FreeVector) -> Value {
    polys_to_json(v.comps())
}

fn columns_to_json(cols: &[FreeVector]) -> Value {
    Value::Array(cols.iter().map(vector_to_json).collect())
}

pub fn gb(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    match doc.get("rank") {
        None => {
            let gb = ideal_basis(&r, &polys_from_json(&r, get(doc, "gens")?)?)?;
            let polys: Vec<_> = gb.generators().into_iter().map(|v| v.comps()[0].clone()).collect();
            done(json!({ "basis": polys_to_json(&polys) }))
        }
        Some(k) => {
            let rank = k.as_u64().ok_or_else(|| Error::Malformed("rank must be an integer".into()))? as usize;
            let gb = groebner_basis(&r, &vectors(&r, get(doc, "gens")?, rank)?, rank)?;
            done(json!({ "rank": rank, "basis": columns_to_json(&gb.generators()) }))
        }
    }
}

pub fn nf(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    match doc.get("rank") {
        None => {
            let gb = ideal_basis(&r, &polys_from_json(&r, get(doc, "gens")?)?)?;
            let f = poly_from_json(&r, get(doc, "f")?)?;
            done(json!({ "nf": poly_to_json(&gb.reduce_poly(&f)?) }))
        }
        Some(k) => {
            let rank = k.as_u64().ok_or_else(|| Error::Malformed("rank must be an integer".into()))? as usize;
            let gb = groebner_basis(&r, &vectors(&r, get(doc, "gens")?, rank)?, rank)?;
            let f = vector_from_json(&r, get(doc, "f")?)?;
            done(json!({ "nf": vector_to_json(&gb.normal_form(&f)?) }))
        }
    }
}

pub fn ker(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let a = matrix_from_json(&r, get(doc, "A")?)?;
    let k = module_kernel(&a, &ideal_of(&r, doc)?)?;
    done(json!({ "kernel": matrix_to_json(&PolyMatrix::from_columns(&r, a.cols(), &k)?) }))
}

pub fn lift(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let a = matrix_from_json(&r, get(doc, "A")?)?;
    let b = vector_from_json(&r, get(doc, "b")?)?;
    match lift_solve(&a, &b, &ideal_of(&r, doc)?)? {
        Some(x) => verdict(true, json!({ "x": vector_to_json(&x) })),
        None => verdict(false, json!({ "x": null })),
    }
}

fn morphism(r: &RingRef, doc: &Value, src: &str, tgt: &str, map: &str) -> Result<ModuleMorphism> {
    ModuleMorphism::new(
        module_from_json(r, get(doc, src)?)?,
        module_from_json(r, get(doc, tgt)?)?,
        matrix_from_json(r, get(doc, map)?)?,
    )
}

pub fn check_morphism(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    verdict(morphism_check(&morphism(&r, doc, "source", "target", "map")?)?, json!({}))
}

pub fn check_iso(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let f = morphism(&r, doc, "source", "target", "f")?;
    let g = morphism(&r, doc, "target", "source", "g")?;
    verdict(iso_check(&f, &g)?, json!({}))
}

/// `n : small -> big`, `e : big -> small`.
pub fn check_summand(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let n = morphism(&r, doc, "small", "big", "n")?;
    let e = morphism(&r, doc, "big", "small", "e")?;
    verdict(summand_check(&n, &e)?, json!({}))
}

fn claim_of(r: &RingRef, doc: &Value) -> Result<ExactSequenceClaim> {
    claim_from_json(r, doc.get("claim").unwrap_or(doc))
}

pub fn check_exact(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let claim = claim_of(&r, doc)?;
    let exact = exact_check(&claim)?;
    let (agree, oracle) = ctx.cross_check(&r, &claim, exact)?;
    verdict(exact && agree, json!({ "exact": exact, "oracle": oracle }))
}

fn mf_of(r: &RingRef, doc: &Value) -> Result<MatrixFactorization> {
    mf_from_json(r, doc.get("mf").unwrap_or(doc))
}

pub fn mf_verify(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    verdict(matfac::mf_verify(&mf_of(&r, doc)?)?, json!({}))
}

pub fn mf_from_presentation(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let a = matrix_from_json(&r, get(doc, "A")?)?;
    let f = poly_from_json(&r, get(doc, "f")?)?;
    done(json!({ "mf": mf_to_json(&matfac::mf_from_presentation(&a, &f)?) }))
}

pub fn mf_syzygy(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    done(json!({ "mf": mf_to_json(&matfac::mf_syzygy(&mf_of(&r, doc)?)) }))
}

pub fn mf_scale(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let a = matrix_from_json(&r, get(doc, "A")?)?;
    let m = matfac::mf_scale(&a, &poly_from_json(&r, get(doc, "x")?)?, &poly_from_json(&r, get(doc, "y")?)?)?;
    done(json!({ "module": module_to_json(&m) }))
}

pub fn mf_periodicity(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    verdict(matfac::mf_periodicity_check(&mf_of(&r, doc)?)?, json!({}))
}

pub fn mf_sum(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let list = get(doc, "mfs")?.as_array().ok_or_else(|| Error::Malformed("mfs must be an array".into()))?;
    let mfs: Vec<MatrixFactorization> = list.iter().map(|m| mf_from_json(&r, m)).collect::<Result<_>>()?;
    let (first, rest) = mfs.split_first().ok_or_else(|| Error::Malformed("mfs is empty".into()))?;
    let sum = rest.iter().try_fold(first.clone(), |acc, m| matfac::mf_direct_sum(&acc, m))?;
    done(json!({ "mf": mf_to_json(&sum) }))
}

fn filtered_of(r: &RingRef, doc: &Value) -> Result<star::FilteredModule> {
    filtered_from_json(r, doc.get("filtered").unwrap_or(doc))
}

pub fn star_assemble(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let fm = filtered_of(&r, doc)?;
    done(json!({ "presentation": matrix_to_json(&fm.assemble_presentation()), "module": module_to_json(&fm.module()) }))
}

pub fn star_filtrate(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let m = module_from_json(&r, get(doc, "module")?)?;
    let xs = polys_from_json(&r, get(doc, "xs")?)?;
    let out = star::compute_filtration(&m, &xs)?;
    done(json!({ "filtered": filtered_to_json(&out.module), "phi": matrix_to_json(&out.phi), "psi": matrix_to_json(&out.psi) }))
}

pub fn star_build_c(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    done(json!({ "C": matrix_to_json(&star::build_c(&filtered_of(&r, doc)?)?) }))
}

fn op_to_json(op: &BlockOp) -> Value {
    match op {
        BlockOp::AddCol { src, dst, factor } => json!({ "add_col": { "src": src + 1, "dst": dst + 1, "factor": matrix_to_json(factor) } }),
        BlockOp::AddRow { src, dst, factor } => json!({ "add_row": { "src": src + 1, "dst": dst + 1, "factor": matrix_to_json(factor) } }),
        BlockOp::PermuteCols(p) => json!({ "permute_cols": p.iter().map(|k| k + 1).collect::<Vec<_>>() }),
    }
}

pub fn star_reduce_c(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let red = star::reduce_c(&filtered_of(&r, doc)?)?;
    done(json!({
        "C": matrix_to_json(&red.c),
        "U": matrix_to_json(&red.u),
        "V": matrix_to_json(&red.v),
        "U_inv": matrix_to_json(&red.u_inv),
        "reduced": matrix_to_json(&red.reduced),
        "log": red.log.iter().map(op_to_json).collect::<Vec<_>>(),
    }))
}

pub fn star_lemma3(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let out = star::lemma3_sequence(&filtered_of(&r, doc)?)?;
    let (agree, oracle) = ctx.cross_check(&r, &out.claim, true)?;
    Ok(Outcome {
        ok: agree,
        result: json!({ "claim": claim_to_json(&out.claim), "p": out.p, "hypotheses": out.hypotheses, "oracle": oracle }),
    })
}

pub fn star_reassoc(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let fm = filtered_of(&r, doc)?;
    let k = get(doc, "k")?.as_u64().ok_or_else(|| Error::Malformed("k must be an integer".into()))? as usize;
    let out = match doc.get("direction").and_then(Value::as_str).unwrap_or("forward") {
        "forward" => star::star_reassociate(&fm, k)?,
        "back" => star::star_reassociate_back(&fm, k)?,
        d => return Err(Error::Malformed(format!("direction must be forward or back, got {d:?}"))),
    };
    let claims: Vec<Value> = out.claims.iter().map(|(n, c)| json!({ "name": n, "claim": claim_to_json(c) })).collect();
    done(json!({ "k": out.k, "regrouped": filtered_to_json(&out.regrouped), "claims": claims }))
}

fn cert_of(r: &RingRef, doc: &Value) -> Result<BallCertificate> {
    cert_from_json(r, doc.get("certificate").unwrap_or(doc))
}

pub fn cert_verify(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let c = cert_of(&r, doc)?;
    verdict(ball::cert_verify(&c)?, json!({ "level": c.level }))
}

pub fn cert_lemma5(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let c = cert_of(&r, doc)?;
    let mf = mf_from_json(&r, get(doc, "mf")?)?;
    done(json!({ "certificate": cert_to_json(&ball::lemma5_rewrite(&c, &mf)?) }))
}

pub fn cert_scale(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let c = cert_of(&r, doc)?;
    let b = matrix_from_json(&r, get(doc, "B")?)?;
    let x = poly_from_json(&r, get(doc, "x")?)?;
    done(json!({ "certificate": cert_to_json(&ball::lemma4_cert_scale(&c, &b, &x)?) }))
}

/// `gens: [{mf, d, certificate?}]`; a missing certificate is the identity
/// certificate of the generator.
pub fn cert_theorem0(ctx: &Ctx, doc: &Value) -> Result<Outcome> {
    let r = ctx.ring(doc)?;
    let fm = filtered_of(&r, doc)?;
    let list = get(doc, "gens")?.as_array().ok_or_else(|| Error::Malformed("gens must be an array".into()))?;
    let mut gens = Vec::with_capacity(list.len());
    for g in list {
        let mf = mf_from_json(&r, get(g, "mf")?)?;
        let d = g.get("d").and_then(Value::as_u64).unwrap_or(0) as usize;
        let c = match g.get("certificate") {
            Some(c) => cert_from_json(&r, c)?,
            None => BallCertificate::identity(Mode::Closed, vec![mf.f.clone()], Generator::from_mf(&mf, 0)?),
        };
        gens.push((mf, d, c));
    }
    done(report_to_json(&ball::theorem0_certify(&fm, &gens)?))
}

fn catalog(dir: Option<&Path>) -> Result<Catalog> {
    match dir {
        Some(d) => Catalog::with_registry(d),
        None => Ok(Catalog::new()),
    }
}

pub fn catalog_list(_ctx: &Ctx, dir: Option<&Path>) -> Result<Outcome> {
    let entries: Vec<Value> = catalog(dir)?.list().into_iter().map(|(n, p)| json!({ "name": n, "params": p })).collect();
    done(json!({ "entries": entries }))
}

pub fn catalog_get(ctx: &Ctx, dir: Option<&Path>, name: &str, raw: &[String]) -> Result<Outcome> {
    let mut params = Params::new();
    for kv in raw {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Malformed(format!("parameter {kv:?} is not key=value")))?;
        let v: i64 = v.trim().parse().map_err(|_| Error::Malformed(format!("parameter {kv:?} is not an integer")))?;
        params.insert(k.trim().to_string(), v);
    }
    let cat = catalog(dir)?;
    let ring = match cat.user_ring(name) {
        Some(r) => r?,
        None => ctx.ring(&Value::Null)?,
    };
    let entry = cat.get(name, &params, &ring)?;
    done(json!({ "ring": ring_to_json(&ring), "entry": entry.to_json() }))
}

pub fn catalog_register(dir: Option<&Path>, doc: &Value) -> Result<Outcome> {
    let mut cat = catalog(dir)?;
    let entry = cat.register(doc)?;
    done(json!({ "name": entry.name, "factorizations": entry.factorizations.len() }))
}
