//! Named matrix factorizations of the plane curve polynomials
//! `x, y, x^2 + y^{m+1}, x^2 y + y^{n-1}, x^3 + y^4, x^3 + x y^3, x^3 + y^5`
//! and user-registered entries.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::{mf_from_json, mf_to_json, poly_from_json, poly_to_json, ring_from_json, ring_to_json};
use crate::matfac::{mf_periodicity_check, mf_verify, MatrixFactorization};
use crate::matrix::PolyMatrix;
use crate::poly::{Polynomial, RingRef};

const DATA: [(&str, &str); 4] = [
    ("D", include_str!("../data/catalog/D.json")),
    ("E6", include_str!("../data/catalog/E6.json")),
    ("E7", include_str!("../data/catalog/E7.json")),
    ("E8", include_str!("../data/catalog/E8.json")),
];

pub type Params = BTreeMap<String, i64>;

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Params,
    pub f: Polynomial,
    pub factorizations: Vec<MatrixFactorization>,
}

impl CatalogEntry {
    /// Checks every factorization: it factors `f`, multiplies out and is
    /// two-periodic.
    pub fn validate(&self) -> Result<()> {
        for (k, mf) in self.factorizations.iter().enumerate() {
            if mf.f != self.f {
                return Err(Error::InvalidFactorization(format!("{} #{} factors a different polynomial", self.name, k + 1)));
            }
            if !mf_verify(mf)? || !mf_periodicity_check(mf)? {
                return Err(Error::InvalidFactorization(format!("{} #{}", self.name, k + 1)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "params": self.params,
            "f": poly_to_json(&self.f),
            "factorizations": self.factorizations.iter().map(mf_to_json).collect::<Vec<_>>(),
        })
    }
}

/// Built-in shapes with their parameter ranges.
const SHAPES: [(&str, &str); 8] = [
    ("A", "m >= 1, optional 1 <= j <= m"),
    ("D", "n >= 4"),
    ("E6", ""),
    ("E7", ""),
    ("E8", ""),
    ("linear", "alias of linear-x"),
    ("linear-x", ""),
    ("linear-y", ""),
];

/// Registry of built-in shapes and user entries.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    user: BTreeMap<String, (Value, Value)>,
    dir: Option<PathBuf>,
}

fn param(params: &Params, key: &str) -> Result<i64> {
    params.get(key).copied().ok_or_else(|| Error::ParamOutOfRange(format!("missing parameter {key}")))
}

fn no_params(name: &str, params: &Params) -> Result<()> {
    if let Some(k) = params.keys().next() {
        return Err(Error::ParamOutOfRange(format!("{name} takes no parameter {k}")));
    }
    Ok(())
}

fn exponent(v: i64) -> Result<u32> {
    u32::try_from(v).ok().filter(|&e| e <= 4096).ok_or_else(|| Error::ParamOutOfRange(format!("exponent {v}")))
}

/// `x` and `y`: the first two variables of the ring.
fn xy(ring: &RingRef) -> Result<(Polynomial, Polynomial)> {
    if ring.nvars() != 2 {
        return Err(Error::shape(format!("catalog polynomials live in two variables, ring has {}", ring.nvars())));
    }
    Ok((Polynomial::var(ring, 0), Polynomial::var(ring, 1)))
}

fn m2(ring: &RingRef, rows: [[&Polynomial; 2]; 2]) -> PolyMatrix {
    PolyMatrix::from_rows(ring, rows.iter().map(|r| r.iter().map(|p| (*p).clone()).collect()).collect()).expect("square")
}

/// `φ_j = [[x, y^j], [-y^{m+1-j}, x]]` and `ψ_j = [[x, -y^j], [y^{m+1-j}, x]]`.
pub fn a_series(ring: &RingRef, m: u32, j: u32) -> Result<MatrixFactorization> {
    if m < 1 || j < 1 || j > m {
        return Err(Error::ParamOutOfRange(format!("A series needs 1 <= j <= m, got m = {m}, j = {j}")));
    }
    let (x, y) = xy(ring)?;
    let f = &x.pow(2) + &y.pow(m + 1);
    let (yj, yk) = (y.pow(j), y.pow(m + 1 - j));
    let phi = m2(ring, [[&x, &yj], [&-&yk, &x]]);
    let psi = m2(ring, [[&x, &-&yj], [&yk, &x]]);
    MatrixFactorization::new(f, phi, psi)
}

fn product_pair(f: &Polynomial, g: &Polynomial, h: &Polynomial) -> Result<Vec<MatrixFactorization>> {
    let ring = f.ring();
    let one = |p: &Polynomial| PolyMatrix::scalar(ring, 1, p);
    Ok(vec![
        MatrixFactorization::new(f.clone(), one(g), one(h))?,
        MatrixFactorization::new(f.clone(), one(h), one(g))?,
    ])
}

fn data_entries(name: &str, ring: &RingRef, params: &Params) -> Result<Vec<MatrixFactorization>> {
    let Some((_, text)) = DATA.iter().find(|(n, _)| *n == name) else {
        return Ok(Vec::new());
    };
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(format!("catalog data {name}: {e}")))?;
    let mut out = Vec::new();
    for e in v["entries"].as_array().into_iter().flatten() {
        let p: Params = serde_json::from_value(e["params"].clone()).map_err(|e| Error::Malformed(e.to_string()))?;
        if &p == params {
            for mf in e["factorizations"].as_array().into_iter().flatten() {
                out.push(mf_from_json(ring, mf)?);
            }
        }
    }
    Ok(out)
}

fn builtin(name: &str, params: &Params, ring: &RingRef) -> Result<Option<CatalogEntry>> {
    let (x, y) = xy(ring)?;
    let (canon, f, mut extra): (&str, Polynomial, Vec<MatrixFactorization>) = match name {
        "linear" | "linear-x" => {
            no_params(name, params)?;
            ("linear-x", x, Vec::new())
        }
        "linear-y" => {
            no_params(name, params)?;
            ("linear-y", y, Vec::new())
        }
        "A" => {
            let m = param(params, "m")?;
            if m < 1 {
                return Err(Error::ParamOutOfRange(format!("A series needs m >= 1, got {m}")));
            }
            let m = exponent(m)?;
            let f = &x.pow(2) + &y.pow(m + 1);
            if let Some(&j) = params.get("j") {
                let j = exponent(j).map_err(|_| Error::ParamOutOfRange(format!("j = {j}")))?;
                let entry = CatalogEntry { name: "A".into(), params: params.clone(), f, factorizations: vec![a_series(ring, m, j)?] };
                entry.validate()?;
                return Ok(Some(entry));
            }
            let fs = (1..=m).map(|j| a_series(ring, m, j)).collect::<Result<Vec<_>>>()?;
            ("A", f, fs)
        }
        "D" => {
            let n = param(params, "n")?;
            if n < 4 {
                return Err(Error::ParamOutOfRange(format!("D series needs n >= 4, got {n}")));
            }
            let n = exponent(n)?;
            let g = &x.pow(2) + &y.pow(n - 2);
            let f = &y * &g;
            let mut fs = product_pair(&f, &y, &g)?;
            fs.extend(data_entries("D", ring, params)?);
            ("D", f, fs)
        }
        "E6" => {
            no_params(name, params)?;
            ("E6", &x.pow(3) + &y.pow(4), data_entries("E6", ring, params)?)
        }
        "E7" => {
            no_params(name, params)?;
            let g = &x.pow(2) + &y.pow(3);
            let f = &x * &g;
            let mut fs = product_pair(&f, &x, &g)?;
            fs.extend(data_entries("E7", ring, params)?);
            ("E7", f, fs)
        }
        "E8" => {
            no_params(name, params)?;
            ("E8", &x.pow(3) + &y.pow(5), data_entries("E8", ring, params)?)
        }
        _ => return Ok(None),
    };
    let mut factorizations = vec![MatrixFactorization::trivial(&f)];
    factorizations.append(&mut extra);
    let entry = CatalogEntry { name: canon.into(), params: params.clone(), f, factorizations };
    entry.validate()?;
    Ok(Some(entry))
}

impl Catalog {
    pub fn new() -> Self {
        Catalog::default()
    }

    /// Loads user entries stored as `*.json` in `dir`; the directory is
    /// created on registration if absent.
    pub fn with_registry(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        let mut cat = Catalog { user: BTreeMap::new(), dir: Some(dir.clone()) };
        if dir.is_dir() {
            let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| Error::Malformed(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            for p in paths {
                let text = fs::read_to_string(&p).map_err(|e| Error::Malformed(format!("{}: {e}", p.display())))?;
                let v: Value = serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", p.display())))?;
                cat.insert(&v)?;
            }
        }
        Ok(cat)
    }

    fn insert(&mut self, v: &Value) -> Result<CatalogEntry> {
        let name = v["name"].as_str().ok_or_else(|| Error::Malformed("entry needs a string name".into()))?.to_string();
        if SHAPES.iter().any(|(n, _)| *n == name) {
            return Err(Error::Malformed(format!("{name} is a built-in name")));
        }
        let ring = ring_from_json(v.get("ring").ok_or_else(|| Error::Malformed("entry needs a ring".into()))?)?;
        let entry = parse_user(&name, &ring, v)?;
        entry.validate()?;
        self.user.insert(name, (ring_to_json(&ring), v.clone()));
        Ok(entry)
    }

    /// Validates and stores a user entry `{name, ring, f, factorizations}`,
    /// writing it to the registry directory when there is one.
    pub fn register(&mut self, v: &Value) -> Result<CatalogEntry> {
        let entry = self.insert(v)?;
        if let Some(dir) = &self.dir {
            fs::create_dir_all(dir).map_err(|e| Error::Malformed(format!("{}: {e}", dir.display())))?;
            let path = dir.join(format!("{}.json", entry.name));
            let text = serde_json::to_string_pretty(v).expect("serializable");
            fs::write(&path, text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
        }
        Ok(entry)
    }

    /// Sorted names with parameter ranges.
    pub fn list(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = SHAPES.iter().map(|(n, p)| (n.to_string(), p.to_string())).collect();
        out.extend(self.user.keys().map(|n| (n.clone(), "user".to_string())));
        out.sort();
        out
    }

    /// Looks up a built-in shape over `ring` or a user entry (in its own ring).
    pub fn get(&self, name: &str, params: &Params, ring: &RingRef) -> Result<CatalogEntry> {
        if let Some(e) = builtin(name, params, ring)? {
            return Ok(e);
        }
        match self.user.get(name) {
            Some((r, v)) => {
                no_params(name, params)?;
                parse_user(name, &ring_from_json(r)?, v)
            }
            None => Err(Error::UnknownEntry(name.to_string())),
        }
    }

    /// Ring a user entry lives in.
    pub fn user_ring(&self, name: &str) -> Option<Result<RingRef>> {
        self.user.get(name).map(|(r, _)| ring_from_json(r))
    }
}

fn parse_user(name: &str, ring: &RingRef, v: &Value) -> Result<CatalogEntry> {
    let f = poly_from_json(ring, v.get("f").ok_or_else(|| Error::Malformed("entry needs f".into()))?)?;
    let list = v["factorizations"].as_array().ok_or_else(|| Error::Malformed("entry needs a factorizations array".into()))?;
    let factorizations = list.iter().map(|m| mf_from_json(ring, m)).collect::<Result<Vec<_>>>()?;
    Ok(CatalogEntry { name: name.to_string(), params: Params::new(), f, factorizations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;

    fn params(kv: &[(&str, i64)]) -> Params {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn a_series_entry() {
        let r = Ring::qxy();
        let e = Catalog::new().get("A", &params(&[("m", 2), ("j", 1)]), &r).unwrap();
        assert_eq!(e.f, r.p("x^2 + y^3"));
        let mf = &e.factorizations[0];
        assert_eq!(mf.a, PolyMatrix::lit(&r, &[&["x", "y"], &["-y^2", "x"]]));
        assert_eq!(mf.b, PolyMatrix::lit(&r, &[&["x", "-y"], &["y^2", "x"]]));
    }

    #[test]
    fn linear_and_ranges() {
        let r = Ring::qxy();
        let cat = Catalog::new();
        let e = cat.get("linear", &Params::new(), &r).unwrap();
        assert_eq!(e.factorizations, vec![MatrixFactorization::trivial(&r.p("x"))]);
        assert!(matches!(cat.get("D", &params(&[("n", 3)]), &r), Err(Error::ParamOutOfRange(_))));
        assert!(matches!(cat.get("A", &params(&[("m", 2), ("j", 3)]), &r), Err(Error::ParamOutOfRange(_))));
        assert!(matches!(cat.get("Z", &Params::new(), &r), Err(Error::UnknownEntry(_))));
    }

    #[test]
    fn shipped_data_validates() {
        let r = Ring::qxy();
        let cat = Catalog::new();
        for n in 4..=10 {
            let e = cat.get("D", &params(&[("n", n)]), &r).unwrap();
            assert!(e.factorizations.len() >= 3);
        }
        for name in ["E6", "E7", "E8"] {
            let e = cat.get(name, &Params::new(), &r).unwrap();
            assert!(e.factorizations.len() >= 3, "{name}");
        }
        let fp = Ring::new(&["x", "y"], crate::field::Field::prime(7).unwrap(), crate::poly::MonomialOrder::Grevlex);
        assert!(cat.get("E8", &Params::new(), &fp).is_ok());
    }

    #[test]
    fn listing() {
        let names: Vec<String> = Catalog::new().list().into_iter().map(|(n, _)| n).collect();
        for n in ["A", "D", "E6", "E7", "E8", "linear-x", "linear-y"] {
            assert!(names.contains(&n.to_string()));
        }
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn registration() {
        let dir = std::env::temp_dir().join(format!("mfstar-cat-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        let r = Ring::qxy();
        let mf = a_series(&r, 3, 2).unwrap();
        let v = json!({ "name": "mine", "ring": ring_to_json(&r), "f": poly_to_json(&mf.f), "factorizations": [mf_to_json(&mf)] });
        let mut cat = Catalog::with_registry(&dir).unwrap();
        cat.register(&v).unwrap();
        let again = Catalog::with_registry(&dir).unwrap();
        assert!(again.list().iter().any(|(n, _)| n == "mine"));
        assert_eq!(again.get("mine", &Params::new(), &r).unwrap().factorizations, vec![mf.clone()]);
        let mut bad = v.clone();
        bad["factorizations"][0]["B"] = crate::json::matrix_to_json(&mf.a);
        bad["name"] = json!("broken");
        assert!(cat.register(&bad).is_err());
        let _ = fs::remove_dir_all(&dir);
    }
}
