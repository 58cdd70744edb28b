//! Gröbner bases of submodules of free modules `S^r`, normal forms,
//! lifting through matrices and kernels over quotient rings.

mod buchberger;
pub(crate) mod vector;

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::matrix::{FreeVector, PolyMatrix};
use crate::poly::{check_ring, Monomial, Polynomial, RingRef};

use buchberger::{groebner, reduce_full};
use vector::ModVec;

pub use crate::matrix::FreeVector as FreeModuleElement;

/// Reduced Gröbner basis of a submodule of `S^rank`, sorted by increasing
/// leading term. Equal modules give equal bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    ring: RingRef,
    rank: usize,
    elems: Vec<ModVec>,
}

fn check_gens(ring: &RingRef, gens: &[FreeVector], rank: usize) -> Result<()> {
    for g in gens {
        check_ring(ring, g.ring())?;
        if g.rank() != rank {
            return Err(Error::Rank { expected: rank, found: g.rank() });
        }
    }
    Ok(())
}

pub fn groebner_basis(ring: &RingRef, gens: &[FreeVector], rank: usize) -> Result<GroebnerBasis> {
    check_gens(ring, gens, rank)?;
    let mv: Vec<ModVec> = gens.iter().map(|g| ModVec::from_free(g, 0)).collect();
    Ok(GroebnerBasis { ring: ring.clone(), rank, elems: groebner(ring, &mv, rank) })
}

/// Gröbner basis of the ideal generated by `gens`.
pub fn ideal_basis(ring: &RingRef, gens: &[Polynomial]) -> Result<GroebnerBasis> {
    let v: Vec<FreeVector> = gens.iter().map(|p| FreeVector::new(ring, vec![p.clone()])).collect::<Result<_>>()?;
    groebner_basis(ring, &v, 1)
}

pub fn normal_form(v: &FreeVector, gb: &GroebnerBasis) -> Result<FreeVector> {
    gb.normal_form(v)
}

impl GroebnerBasis {
    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn generators(&self) -> Vec<FreeVector> {
        self.elems.iter().map(|e| e.to_free(&self.ring, 0, self.rank)).collect()
    }

    /// Leading positions and monomials of the basis elements.
    pub fn leading_terms(&self) -> Vec<(usize, Monomial)> {
        self.elems.iter().map(|e| (e.terms[0].pos, e.terms[0].mono.clone())).collect()
    }

    fn check(&self, v: &FreeVector) -> Result<()> {
        check_ring(&self.ring, v.ring())?;
        if v.rank() != self.rank {
            return Err(Error::Rank { expected: self.rank, found: v.rank() });
        }
        Ok(())
    }

    pub fn normal_form(&self, v: &FreeVector) -> Result<FreeVector> {
        self.check(v)?;
        let r = reduce_full(&self.ring, &ModVec::from_free(v, 0), &self.elems);
        Ok(r.to_free(&self.ring, 0, self.rank))
    }

    pub fn contains(&self, v: &FreeVector) -> Result<bool> {
        self.check(v)?;
        Ok(reduce_full(&self.ring, &ModVec::from_free(v, 0), &self.elems).is_zero())
    }

    /// Whether the basis generates the whole free module.
    pub fn is_everything(&self) -> bool {
        let mut hit = vec![false; self.rank];
        for e in &self.elems {
            if e.terms[0].mono.is_one() {
                hit[e.terms[0].pos] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }

    /// Normal form of a polynomial in the ideal case.
    pub fn reduce_poly(&self, p: &Polynomial) -> Result<Polynomial> {
        let v = FreeVector::new(&self.ring, vec![p.clone()])?;
        Ok(self.normal_form(&v)?.into_comps().remove(0))
    }
}

/// `modulo`-multiples of the standard basis of `S^m`.
pub fn modulo_relations(ring: &RingRef, modulo: &[Polynomial], m: usize) -> Vec<FreeVector> {
    let mut out = Vec::new();
    for i in 0..m {
        for g in modulo {
            if g.is_zero() {
                continue;
            }
            let mut comps = vec![Polynomial::zero(ring); m];
            comps[i] = g.clone();
            out.push(FreeVector::new(ring, comps).expect("same ring"));
        }
    }
    out
}

/// Gröbner basis of the columns of a matrix `A` (`m x n`) together with a
/// relation submodule of `S^m`, tracking coordinates in `n` extra positions.
/// Serves both lifting through `A` and computing its kernel.
#[derive(Clone, Debug)]
pub struct Lifter {
    ring: RingRef,
    m: usize,
    n: usize,
    relations: Vec<FreeVector>,
    augmented: Vec<ModVec>,
    rel_gb: OnceLock<GroebnerBasis>,
}

impl Lifter {
    pub fn new(a: &PolyMatrix, relations: &[FreeVector]) -> Result<Lifter> {
        let ring = a.ring().clone();
        let (m, n) = a.shape();
        check_gens(&ring, relations, m)?;
        let mut gens: Vec<ModVec> = Vec::with_capacity(n + relations.len());
        for j in 0..n {
            let mut v = ModVec::from_free(&a.column(j), 0);
            v.push_unit(&ring, m + j);
            gens.push(v);
        }
        for r in relations {
            gens.push(ModVec::from_free(r, 0));
        }
        let augmented = groebner(&ring, &gens, m + n);
        Ok(Lifter { ring, m, n, relations: relations.to_vec(), augmented, rel_gb: OnceLock::new() })
    }

    /// Gröbner basis of the relation module alone.
    pub fn relation_basis(&self) -> &GroebnerBasis {
        self.rel_gb.get_or_init(|| groebner_basis(&self.ring, &self.relations, self.m).expect("checked"))
    }

    /// `c` with `A c - b` in the relation module, or `None`.
    pub fn lift(&self, b: &FreeVector) -> Result<Option<FreeVector>> {
        check_ring(&self.ring, b.ring())?;
        if b.rank() != self.m {
            return Err(Error::Rank { expected: self.m, found: b.rank() });
        }
        if self.relation_basis().contains(b)? {
            return Ok(Some(FreeVector::zero(&self.ring, self.n)));
        }
        let r = reduce_full(&self.ring, &ModVec::from_free(b, 0), &self.augmented);
        if r.max_pos_below(self.m) {
            return Ok(None);
        }
        Ok(Some(r.neg(&self.ring).to_free(&self.ring, self.m, self.n)))
    }

    /// Generators of `{c : A c in relations}`.
    pub fn kernel(&self) -> Vec<FreeVector> {
        self.augmented
            .iter()
            .filter(|e| e.terms[0].pos >= self.m)
            .map(|e| e.to_free(&self.ring, self.m, self.n))
            .collect()
    }

    /// Kernel generators reduced modulo `domain` relations, zeros dropped.
    pub fn kernel_modulo(&self, domain: &GroebnerBasis) -> Result<Vec<FreeVector>> {
        let mut out = Vec::new();
        for k in self.kernel() {
            let r = domain.normal_form(&k)?;
            if !r.is_zero() && !out.contains(&r) {
                out.push(r);
            }
        }
        Ok(out)
    }
}

/// Solves `A c = b` over `S/(modulo)`.
pub fn lift_solve(a: &PolyMatrix, b: &FreeVector, modulo: &[Polynomial]) -> Result<Option<FreeVector>> {
    if b.rank() != a.rows() {
        return Err(Error::shape(format!("vector of rank {} against {} rows", b.rank(), a.rows())));
    }
    let rel = modulo_relations(a.ring(), modulo, a.rows());
    Lifter::new(a, &rel)?.lift(b)
}

/// Generators of the kernel of `A` acting on `(S/(modulo))^n`.
pub fn module_kernel(a: &PolyMatrix, modulo: &[Polynomial]) -> Result<Vec<FreeVector>> {
    let ring = a.ring();
    let rel = modulo_relations(ring, modulo, a.rows());
    let lifter = Lifter::new(a, &rel)?;
    let domain = groebner_basis(ring, &modulo_relations(ring, modulo, a.cols()), a.cols())?;
    lifter.kernel_modulo(&domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::poly::{MonomialOrder, Ring};

    fn vecs(ring: &RingRef, ps: &[&str]) -> Vec<FreeVector> {
        ps.iter().map(|p| FreeVector::new(ring, vec![ring.p(p)]).unwrap()).collect()
    }

    fn gens_of(gb: &GroebnerBasis) -> Vec<String> {
        gb.generators().iter().map(|g| g.comps()[0].to_string()).collect()
    }

    #[test]
    fn principal_monomial_ideal() {
        let r = Ring::qxy();
        let gb = groebner_basis(&r, &vecs(&r, &["x"]), 1).unwrap();
        assert_eq!(gens_of(&gb), vec!["x"]);
    }

    #[test]
    fn principal_ideal_is_monic() {
        let r = Ring::qxy();
        let gb = groebner_basis(&r, &vecs(&r, &["3*x^2*y - 6*y^3 + 1"]), 1).unwrap();
        assert_eq!(gens_of(&gb), vec!["x^2*y - 2*y^3 + 1/3"]);
    }

    #[test]
    fn two_generator_ideal() {
        // y(xy - 1) - x(y^2 - 1) = x - y; then y^2 - 1 and x - y generate
        // and xy - 1 = y(x - y) + (y^2 - 1) is redundant.
        let r = Ring::qxy();
        let gb = groebner_basis(&r, &vecs(&r, &["x*y - 1", "y^2 - 1"]), 1).unwrap();
        assert_eq!(gens_of(&gb), vec!["x - y", "y^2 - 1"]);
        assert!(gb.contains(&vecs(&r, &["x*y - 1"])[0]).unwrap());
    }

    #[test]
    fn normal_forms() {
        let r = Ring::new(&["x", "y"], Field::Rational, MonomialOrder::Lex);
        let gb = groebner_basis(&r, &vecs(&r, &["x^2 + y^3"]), 1).unwrap();
        assert_eq!(gb.reduce_poly(&r.p("x^2")).unwrap(), r.p("-y^3"));
        let q = Ring::qxy();
        let gb = groebner_basis(&q, &vecs(&q, &["x^2 + y^3"]), 1).unwrap();
        assert_eq!(gb.reduce_poly(&q.p("y^3")).unwrap(), q.p("-x^2"));
        let r = q;
        assert!(gb.reduce_poly(&r.p("x^4 - y^6")).unwrap().is_zero());
        let zero = groebner_basis(&r, &[], 1).unwrap();
        assert_eq!(zero.reduce_poly(&r.p("x + 1")).unwrap(), r.p("x + 1"));
    }

    #[test]
    fn shuffled_generators_give_same_basis() {
        let r = Ring::new(&["x", "y", "z"], Field::Rational, MonomialOrder::Grevlex);
        let g = vecs(&r, &["x^2 - y*z", "y^2 - x*z", "z^2 - x*y", "x + y + z"]);
        let a = groebner_basis(&r, &g, 1).unwrap();
        let mut h = g.clone();
        h.reverse();
        h.swap(0, 2);
        assert_eq!(a, groebner_basis(&r, &h, 1).unwrap());
    }

    #[test]
    fn lex_elimination() {
        let r = Ring::new(&["x", "y"], Field::Rational, MonomialOrder::Lex);
        let gb = groebner_basis(&r, &vecs(&r, &["x - y^2", "x*y - 1"]), 1).unwrap();
        assert_eq!(gens_of(&gb), vec!["y^3 - 1", "x - y^2"]);
    }

    #[test]
    fn lift_through_a2_factor() {
        let r = Ring::qxy();
        let a = PolyMatrix::lit(&r, &[&["x", "y"], &["-y^2", "x"]]);
        let b = FreeVector::new(&r, vec![r.p("x^2 + y^3"), r.p("0")]).unwrap();
        let c = lift_solve(&a, &b, &[]).unwrap().unwrap();
        assert_eq!(c.comps(), &[r.p("x"), r.p("y^2")]);
    }

    #[test]
    fn lift_column_and_failure() {
        let r = Ring::qxy();
        let a = PolyMatrix::lit(&r, &[&["x", "y + 1"], &["y", "x^2"]]);
        let c = lift_solve(&a, &a.column(1), &[]).unwrap().unwrap();
        assert_eq!(a.mul_vec(&c).unwrap(), a.column(1));
        let y = PolyMatrix::lit(&r, &[&["y"]]);
        let one = FreeVector::new(&r, vec![r.p("1")]).unwrap();
        assert!(lift_solve(&y, &one, &[]).unwrap().is_none());
        assert!(lift_solve(&y, &one, &[r.p("y - 1")]).unwrap().is_some());
    }

    #[test]
    fn kernels() {
        let r = Ring::qxy();
        let k = module_kernel(&PolyMatrix::lit(&r, &[&["x", "y"]]), &[]).unwrap();
        assert_eq!(k.len(), 1);
        let expected = FreeVector::new(&r, vec![r.p("y"), r.p("-x")]).unwrap();
        assert!(k[0] == expected || k[0] == expected.neg());
        assert!(module_kernel(&PolyMatrix::identity(&r, 3), &[]).unwrap().is_empty());
        let phi = PolyMatrix::lit(&r, &[&["x", "y"], &["-y^2", "x"]]);
        assert!(module_kernel(&phi, &[]).unwrap().is_empty());
    }

    #[test]
    fn kernel_over_quotient() {
        // multiplication by x on S/(x^2 + y^3) has kernel 0; on S/(x*y) it is (y)
        let r = Ring::qxy();
        let x = PolyMatrix::lit(&r, &[&["x"]]);
        assert!(module_kernel(&x, &[r.p("x^2 + y^3")]).unwrap().is_empty());
        let k = module_kernel(&x, &[r.p("x*y")]).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].comps()[0], r.p("y"));
    }

    #[test]
    fn rank_mismatch() {
        let r = Ring::qxy();
        let g = FreeVector::new(&r, vec![r.p("x"), r.p("y")]).unwrap();
        assert_eq!(groebner_basis(&r, &[g], 1).unwrap_err(), Error::Rank { expected: 1, found: 2 });
    }

    #[test]
    fn submodule_basis() {
        // columns of the A2 factor span a submodule containing (x^2+y^3) S^2
        let r = Ring::qxy();
        let a = PolyMatrix::lit(&r, &[&["x", "y"], &["-y^2", "x"]]);
        let gb = groebner_basis(&r, &a.columns(), 2).unwrap();
        let f = r.p("x^2 + y^3");
        for i in 0..2 {
            assert!(gb.contains(&FreeVector::unit(&r, 2, i).scale(&f)).unwrap());
        }
        assert!(!gb.contains(&FreeVector::unit(&r, 2, 0)).unwrap());
    }
}
