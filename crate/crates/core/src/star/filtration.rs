use std::collections::BTreeMap;

use super::{product, FilteredModule, Layer};
use crate::error::{Error, Result};
use crate::groebner::{groebner_basis, module_kernel, Lifter};
use crate::matfac::mf_from_presentation;
use crate::matrix::{FreeVector, PolyMatrix};
use crate::module::{iso_check, ModuleMorphism, PresentedModule};
use crate::poly::Polynomial;

/// A filtered module together with mutually inverse maps between the
/// assembled module `Cok A` and the input module.
#[derive(Clone, Debug)]
pub struct Filtration {
    pub module: FilteredModule,
    /// `Cok A -> M`, the chosen generators of all layers.
    pub phi: PolyMatrix,
    /// `M -> Cok A`.
    pub psi: PolyMatrix,
}

fn vec_degree(v: &FreeVector) -> u32 {
    v.comps().iter().filter_map(|c| c.degree()).max().unwrap_or(0)
}

/// Drops generators that lie in the span of the others, highest degree first.
fn minimize(ring: &crate::poly::RingRef, rank: usize, mut gens: Vec<FreeVector>) -> Result<Vec<FreeVector>> {
    gens.sort_by_key(|g| std::cmp::Reverse(vec_degree(g)));
    let mut k = 0;
    while k < gens.len() {
        let others: Vec<FreeVector> = gens.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, g)| g.clone()).collect();
        if groebner_basis(ring, &others, rank)?.contains(&gens[k])? {
            gens.remove(k);
        } else {
            k += 1;
        }
    }
    gens.reverse();
    Ok(gens)
}

/// Colon filtration `M_i = (0 :_M x_1 ... x_i)` of a module killed by
/// `x_1 ... x_n`, with every layer presented by a matrix factorization.
pub fn compute_filtration(m: &PresentedModule, xs: &[Polynomial]) -> Result<Filtration> {
    let ring = m.ring().clone();
    let n = xs.len();
    if n == 0 {
        return Err(Error::shape("empty list of elements"));
    }
    for (i, x) in xs.iter().enumerate() {
        if x.is_zero() {
            return Err(Error::ZeroElement(format!("x_{}", i + 1)));
        }
    }
    let total = product(&ring, xs, 0, n);
    if !m.annihilated_by(&total)? {
        return Err(Error::NotAnnihilated("x_1 ... x_n does not kill the module".into()));
    }
    let r = m.rank();
    let rels = m.relations();

    // generators of M_i inside S^r, reduced modulo the relations
    let mut colon: Vec<Vec<FreeVector>> = vec![Vec::new()];
    for i in 1..=n {
        let gens = if i == n {
            (0..r).map(|j| FreeVector::unit(&ring, r, j)).collect()
        } else {
            let mult = PolyMatrix::scalar(&ring, r, &product(&ring, xs, 0, i));
            let mut out = Vec::new();
            for k in Lifter::new(&mult, &rels)?.kernel() {
                let red = m.reduce(&k)?;
                if !red.is_zero() && !out.contains(&red) {
                    out.push(red);
                }
            }
            out
        };
        colon.push(gens);
    }

    let mut chosen: Vec<FreeVector> = Vec::new();
    let mut layers = Vec::with_capacity(n);
    let mut sizes = Vec::with_capacity(n);
    let mut blocks = BTreeMap::new();
    for i in 1..=n {
        let below: Vec<FreeVector> = chosen.iter().cloned().chain(rels.iter().cloned()).collect();
        let mut g_i: Vec<FreeVector> = Vec::new();
        for g in &colon[i] {
            let span: Vec<FreeVector> = below.iter().cloned().chain(g_i.iter().cloned()).collect();
            if !groebner_basis(&ring, &span, r)?.contains(g)? {
                g_i.push(g.clone());
            }
        }
        let p = g_i.len();
        let gmat = PolyMatrix::from_columns(&ring, r, &g_i)?;
        let rel_i = Lifter::new(&gmat, &below)?.kernel();
        let rel_i = minimize(&ring, p, rel_i)?;
        if rel_i.len() != p {
            return Err(Error::LayerNotMf(i));
        }
        let a_i = PolyMatrix::from_columns(&ring, p, &rel_i)?;
        if !module_kernel(&a_i, &[])?.is_empty() {
            return Err(Error::LayerNotMf(i));
        }
        let mf = mf_from_presentation(&a_i, &xs[i - 1]).map_err(|_| Error::LayerNotMf(i))?;

        if i > 1 {
            let prev = PolyMatrix::from_columns(&ring, r, &chosen)?;
            let lifter = Lifter::new(&prev, &rels)?;
            let ga = gmat.checked_mul(&a_i)?;
            let mut cols = Vec::with_capacity(p);
            for c in ga.columns() {
                let h = lifter.lift(&c)?.ok_or_else(|| Error::internal("layer relation does not land in the previous step"))?;
                cols.push(h.neg());
            }
            let h = PolyMatrix::from_columns(&ring, chosen.len(), &cols)?;
            let mut r0 = 0;
            for (j, &pj) in sizes.iter().enumerate() {
                let blk = h.block(r0, 0, pj, p);
                if !blk.is_zero() {
                    blocks.insert((j, i - 1), blk);
                }
                r0 += pj;
            }
        }
        layers.push(Layer::Mf(mf));
        sizes.push(p);
        chosen.extend(g_i);
    }

    let fm = FilteredModule::new(xs.to_vec(), layers, blocks)?;
    let phi = PolyMatrix::from_columns(&ring, r, &chosen)?;
    let lifter = Lifter::new(&phi, &rels)?;
    let mut cols = Vec::with_capacity(r);
    for j in 0..r {
        let c = lifter
            .lift(&FreeVector::unit(&ring, r, j))?
            .ok_or_else(|| Error::internal("chosen generators do not span the module"))?;
        cols.push(c);
    }
    let psi = PolyMatrix::from_columns(&ring, chosen.len(), &cols)?;
    let assembled = fm.module();
    let f = ModuleMorphism::new(assembled.clone(), m.clone(), phi.clone())?;
    let g = ModuleMorphism::new(m.clone(), assembled, psi.clone())?;
    if !iso_check(&f, &g)? {
        return Err(Error::internal("assembled presentation is not isomorphic to the input"));
    }
    Ok(Filtration { module: fm, phi, psi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;

    #[test]
    fn cyclic_product() {
        let r = Ring::qxy();
        let (f1, f2) = (r.p("x^2 + y^3"), r.p("x^2 + y^5"));
        let m = PresentedModule::new(vec![], PolyMatrix::scalar(&r, 1, &(&f1 * &f2))).unwrap();
        let out = compute_filtration(&m, &[f1.clone(), f2.clone()]).unwrap();
        let fm = &out.module;
        assert_eq!(fm.layers()[0].a(), &PolyMatrix::scalar(&r, 1, &f1));
        assert_eq!(fm.layers()[1].a(), &PolyMatrix::scalar(&r, 1, &f2));
        let b = fm.block(0, 1);
        assert!(b == PolyMatrix::identity(&r, 1) || b == PolyMatrix::identity(&r, 1).neg());
    }

    #[test]
    fn split_sum() {
        let r = Ring::qxy();
        let (f1, f2) = (r.p("x"), r.p("y"));
        let m = PresentedModule::new(vec![], PolyMatrix::lit(&r, &[&["x", "0"], &["0", "y"]])).unwrap();
        let out = compute_filtration(&m, &[f1, f2]).unwrap();
        assert!(out.module.blocks().is_empty());
    }

    #[test]
    fn single_layer() {
        let r = Ring::qxy();
        let phi = PolyMatrix::lit(&r, &[&["x", "y"], &["-y^2", "x"]]);
        let m = PresentedModule::new(vec![], phi.clone()).unwrap();
        let out = compute_filtration(&m, &[r.p("x^2 + y^3")]).unwrap();
        assert_eq!(out.module.len(), 1);
        let a = out.module.layers()[0].a();
        assert!(PresentedModule::new(vec![], a.clone()).unwrap().same_module(&m));
    }

    #[test]
    fn not_annihilated() {
        let r = Ring::qxy();
        let m = PresentedModule::new(vec![], PolyMatrix::lit(&r, &[&["x^2"]])).unwrap();
        assert!(matches!(compute_filtration(&m, &[r.p("x")]), Err(Error::NotAnnihilated(_))));
    }
}
