use std::collections::BTreeMap;

use super::FilteredModule;
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::module::{exact_check, ExactSequenceClaim, PresentedModule};

/// Regrouping of `M` on layers `X = 1..k`, `Y = k+1..n-1`, `Z = n` between
/// `(X * Y) * Z` (through `N = X * Y`) and `X * (Y * Z)` (through the
/// pushout `L = Y * Z`).
#[derive(Clone, Debug)]
pub struct Reassociation {
    pub k: usize,
    pub regrouped: FilteredModule,
    pub x: PresentedModule,
    pub y: PresentedModule,
    pub z: PresentedModule,
    pub n: PresentedModule,
    pub l: PresentedModule,
    pub m: PresentedModule,
    /// `0→X→N→Y→0`, `0→N→M→Z→0`, `0→X→M→L→0`, `0→Y→L→Z→0`.
    pub claims: Vec<(String, ExactSequenceClaim)>,
}

/// Joins a lower and an upper filtered module with cross blocks taken from
/// `source` (layer offset `at`).
fn concat(lower: &FilteredModule, upper: &FilteredModule, source: &FilteredModule, at: usize) -> Result<FilteredModule> {
    let a = lower.len();
    let mut xs = lower.xs().to_vec();
    xs.extend(upper.xs().iter().cloned());
    let mut layers = lower.layers().to_vec();
    layers.extend(upper.layers().iter().cloned());
    let mut blocks: BTreeMap<(usize, usize), PolyMatrix> = lower.blocks().clone();
    for (&(i, j), b) in upper.blocks() {
        blocks.insert((i + a, j + a), b.clone());
    }
    for i in 0..a {
        for j in 0..upper.len() {
            let b = source.block(i + at, j + at + a);
            if !b.is_zero() {
                blocks.insert((i, j + a), b);
            }
        }
    }
    FilteredModule::new(xs, layers, blocks)
}

fn inclusion(fm: &FilteredModule, big: usize, small: usize) -> PolyMatrix {
    let mut m = PolyMatrix::zero(fm.ring(), big, small);
    m.set_block(0, 0, &PolyMatrix::identity(fm.ring(), small));
    m
}

fn projection(fm: &FilteredModule, big: usize, small: usize) -> PolyMatrix {
    let mut m = PolyMatrix::zero(fm.ring(), small, big);
    m.set_block(0, big - small, &PolyMatrix::identity(fm.ring(), small));
    m
}

fn rows(fm: &FilteredModule, a: usize, b: usize) -> usize {
    fm.layers()[a..b].iter().map(|l| l.rows()).sum()
}

fn build(fm: &FilteredModule, k: usize, regrouped: FilteredModule) -> Result<Reassociation> {
    let n = fm.len();
    let module_of = |a: usize, b: usize| -> Result<PresentedModule> {
        if a >= b {
            Ok(PresentedModule::zero(fm.ring()))
        } else {
            Ok(fm.sub(a, b)?.module())
        }
    };
    let (x, y, z) = (module_of(0, k)?, module_of(k, n - 1)?, module_of(n - 1, n)?);
    let (nn, l, m) = (module_of(0, n - 1)?, module_of(k, n)?, fm.module());
    let (rx, ry, rz) = (rows(fm, 0, k), rows(fm, k, n - 1), rows(fm, n - 1, n));
    let (rn, rl, rm) = (rx + ry, ry + rz, rx + ry + rz);

    let claims = vec![
        (
            "X -> N -> Y".to_string(),
            ExactSequenceClaim::short(x.clone(), nn.clone(), y.clone(), inclusion(fm, rn, rx), projection(fm, rn, ry))?,
        ),
        (
            "N -> M -> Z".to_string(),
            ExactSequenceClaim::short(nn.clone(), m.clone(), z.clone(), inclusion(fm, rm, rn), projection(fm, rm, rz))?,
        ),
        (
            "X -> M -> L".to_string(),
            ExactSequenceClaim::short(x.clone(), m.clone(), l.clone(), inclusion(fm, rm, rx), projection(fm, rm, rl))?,
        ),
        (
            "Y -> L -> Z".to_string(),
            ExactSequenceClaim::short(y.clone(), l.clone(), z.clone(), inclusion(fm, rl, ry), projection(fm, rl, rz))?,
        ),
    ];
    for (name, c) in &claims {
        if !exact_check(c)? {
            return Err(Error::internal(format!("{name} is not exact")));
        }
    }
    // N -> M -> L agrees with N -> Y -> L
    let via_m = projection(fm, rm, rl).checked_mul(&inclusion(fm, rm, rn))?;
    let via_y = inclusion(fm, rl, ry).checked_mul(&projection(fm, rn, ry))?;
    for col in via_m.checked_sub(&via_y)?.columns() {
        if !l.is_relation(&col)? {
            return Err(Error::internal("pushout square does not commute"));
        }
    }
    if regrouped.assemble_presentation() != fm.assemble_presentation() {
        return Err(Error::internal("regrouping changed the presentation"));
    }
    Ok(Reassociation { k, regrouped, x, y, z, n: nn, l, m, claims })
}

fn check_split(fm: &FilteredModule, k: usize) -> Result<()> {
    if k == 0 || k >= fm.len() {
        return Err(Error::BadSplit { k, n: fm.len() });
    }
    Ok(())
}

/// From `(X * Y) * Z` to `X * (Y * Z)` via the pushout `L`.
pub fn star_reassociate(fm: &FilteredModule, k: usize) -> Result<Reassociation> {
    check_split(fm, k)?;
    let n = fm.len();
    let nn = fm.sub(0, n - 1)?;
    let z = fm.sub(n - 1, n)?;
    let x = nn.sub(0, k)?;
    let l = if k < n - 1 { concat(&nn.sub(k, n - 1)?, &z, fm, k)? } else { z };
    let regrouped = concat(&x, &l, fm, 0)?;
    build(fm, k, regrouped)
}

/// From `X * (Y * Z)` back to `(X * Y) * Z` via the pullback `N`.
pub fn star_reassociate_back(fm: &FilteredModule, k: usize) -> Result<Reassociation> {
    check_split(fm, k)?;
    let n = fm.len();
    let x = fm.sub(0, k)?;
    let l = fm.sub(k, n)?;
    let z = l.sub(n - k - 1, n - k)?;
    let nn = if k < n - 1 { concat(&x, &l.sub(0, n - k - 1)?, fm, 0)? } else { x };
    let regrouped = concat(&nn, &z, fm, 0)?;
    build(fm, k, regrouped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfac::MatrixFactorization;
    use crate::poly::Ring;
    use crate::star::Layer;

    fn three(blk: &str) -> FilteredModule {
        let r = Ring::qxy();
        let xs = ["x", "y", "x + y"].map(|s| r.p(s));
        let layers = xs.iter().map(|x| Layer::Mf(MatrixFactorization::trivial(x))).collect();
        let mut blocks = BTreeMap::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            blocks.insert((i, j), PolyMatrix::lit(&r, &[&[blk]]));
        }
        FilteredModule::new(xs.to_vec(), layers, blocks).unwrap()
    }

    #[test]
    fn both_directions_agree() {
        let fm = three("1");
        for k in 1..3 {
            let fwd = star_reassociate(&fm, k).unwrap();
            let back = star_reassociate_back(&fm, k).unwrap();
            assert_eq!(fwd.regrouped.assemble_presentation(), back.regrouped.assemble_presentation());
            assert_eq!(fwd.regrouped.assemble_presentation(), fm.assemble_presentation());
        }
    }

    #[test]
    fn split_regrouping() {
        let fm = three("0");
        let out = star_reassociate(&fm, 1).unwrap();
        let r = fm.ring();
        let sum = PresentedModule::new(vec![], PolyMatrix::lit(r, &[&["y", "0"], &["0", "x + y"]])).unwrap();
        assert!(out.l.same_module(&sum));
    }

    #[test]
    fn two_layers_and_bad_splits() {
        let r = Ring::qxy();
        let xs = vec![r.p("x"), r.p("y")];
        let layers = xs.iter().map(|x| Layer::Mf(MatrixFactorization::trivial(x))).collect();
        let fm = FilteredModule::new(xs, layers, BTreeMap::new()).unwrap();
        let out = star_reassociate(&fm, 1).unwrap();
        assert_eq!(out.regrouped, fm);
        assert_eq!(star_reassociate(&fm, 0).unwrap_err(), Error::BadSplit { k: 0, n: 2 });
        assert!(star_reassociate(&fm, 2).is_err());
    }
}
