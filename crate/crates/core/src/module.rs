//! Finitely presented modules `Cok(P)` over `S/I`, morphisms between them
//! and verification of morphism, isomorphism, summand and exactness claims.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::groebner::{groebner_basis, modulo_relations, GroebnerBasis, Lifter};
use crate::matrix::{FreeVector, PolyMatrix};
use crate::poly::{check_ring, Polynomial, RingRef};

/// `Cok(P : (S/I)^n -> (S/I)^m)`. The relation module is `im P + I S^m`.
#[derive(Clone, Debug)]
pub struct PresentedModule {
    ideal: Vec<Polynomial>,
    pres: PolyMatrix,
    rel: OnceLock<GroebnerBasis>,
}

impl PartialEq for PresentedModule {
    fn eq(&self, other: &Self) -> bool {
        self.ideal == other.ideal && self.pres == other.pres
    }
}

impl PresentedModule {
    pub fn new(ideal: Vec<Polynomial>, pres: PolyMatrix) -> Result<Self> {
        for g in &ideal {
            check_ring(pres.ring(), g.ring())?;
        }
        Ok(PresentedModule { ideal, pres, rel: OnceLock::new() })
    }

    /// `(S/I)^m`.
    pub fn free(ring: &RingRef, ideal: Vec<Polynomial>, m: usize) -> Result<Self> {
        Self::new(ideal, PolyMatrix::zero(ring, m, 0))
    }

    pub fn zero(ring: &RingRef) -> Self {
        PresentedModule { ideal: Vec::new(), pres: PolyMatrix::zero(ring, 0, 0), rel: OnceLock::new() }
    }

    pub fn ring(&self) -> &RingRef {
        self.pres.ring()
    }

    /// Number of generators.
    pub fn rank(&self) -> usize {
        self.pres.rows()
    }

    pub fn ideal(&self) -> &[Polynomial] {
        &self.ideal
    }

    pub fn presentation(&self) -> &PolyMatrix {
        &self.pres
    }

    /// Generators of the relation module in `S^m`.
    pub fn relations(&self) -> Vec<FreeVector> {
        let mut out = self.pres.columns();
        out.extend(modulo_relations(self.ring(), &self.ideal, self.rank()));
        out
    }

    /// Presentation over `S`: `[P | I-multiples of the standard basis]`.
    pub fn full_presentation(&self) -> PolyMatrix {
        PolyMatrix::from_columns(self.ring(), self.rank(), &self.relations()).expect("consistent shapes")
    }

    pub fn relation_basis(&self) -> &GroebnerBasis {
        self.rel
            .get_or_init(|| groebner_basis(self.ring(), &self.relations(), self.rank()).expect("consistent shapes"))
    }

    pub fn is_relation(&self, v: &FreeVector) -> Result<bool> {
        self.relation_basis().contains(v)
    }

    /// Reduces an element of `S^m` to its normal form modulo the relations.
    pub fn reduce(&self, v: &FreeVector) -> Result<FreeVector> {
        self.relation_basis().normal_form(v)
    }

    /// Same generator count and same relation module. The relations of
    /// `other` are first reduced against the basis of `self`.
    pub fn same_module(&self, other: &PresentedModule) -> bool {
        self.rank() == other.rank()
            && other.relations().iter().all(|v| self.is_relation(v).unwrap_or(false))
            && self.relation_basis() == other.relation_basis()
    }

    pub fn is_zero_module(&self) -> bool {
        self.relation_basis().is_everything()
    }

    /// Whether `p` kills every generator.
    pub fn annihilated_by(&self, p: &Polynomial) -> Result<bool> {
        for i in 0..self.rank() {
            if !self.is_relation(&FreeVector::unit(self.ring(), self.rank(), i).scale(p))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Direct sum presented by the block diagonal of full presentations.
    pub fn direct_sum(ring: &RingRef, parts: &[&PresentedModule]) -> PresentedModule {
        if parts.iter().all(|p| p.ideal == parts[0].ideal) && !parts.is_empty() {
            let ps: Vec<&PolyMatrix> = parts.iter().map(|p| &p.pres).collect();
            return PresentedModule {
                ideal: parts[0].ideal.clone(),
                pres: PolyMatrix::block_diag(ring, &ps),
                rel: OnceLock::new(),
            };
        }
        let full: Vec<PolyMatrix> = parts.iter().map(|p| p.full_presentation()).collect();
        let refs: Vec<&PolyMatrix> = full.iter().collect();
        PresentedModule { ideal: Vec::new(), pres: PolyMatrix::block_diag(ring, &refs), rel: OnceLock::new() }
    }

    /// Kernel of `F : S^n -> this module`.
    fn kernel_of(&self, f: &PolyMatrix) -> Result<Vec<FreeVector>> {
        Ok(Lifter::new(f, &self.relations())?.kernel())
    }

    /// Whether `v` lies in `im F + relations`.
    fn in_image(&self, f: &PolyMatrix, v: &FreeVector) -> Result<bool> {
        let mut gens = f.columns();
        gens.extend(self.relations());
        groebner_basis(self.ring(), &gens, self.rank())?.contains(v)
    }
}

/// A map of presented modules given on generators by `matrix`
/// (`target.rank x source.rank`).
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleMorphism {
    pub source: PresentedModule,
    pub target: PresentedModule,
    pub matrix: PolyMatrix,
}

impl ModuleMorphism {
    pub fn new(source: PresentedModule, target: PresentedModule, matrix: PolyMatrix) -> Result<Self> {
        check_ring(source.ring(), target.ring())?;
        check_ring(source.ring(), matrix.ring())?;
        if matrix.shape() != (target.rank(), source.rank()) {
            return Err(Error::shape(format!(
                "morphism matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        Ok(ModuleMorphism { source, target, matrix })
    }

    pub fn identity(m: &PresentedModule) -> Self {
        ModuleMorphism { source: m.clone(), target: m.clone(), matrix: PolyMatrix::identity(m.ring(), m.rank()) }
    }

    pub fn zero(source: &PresentedModule, target: &PresentedModule) -> Self {
        ModuleMorphism {
            source: source.clone(),
            target: target.clone(),
            matrix: PolyMatrix::zero(source.ring(), target.rank(), source.rank()),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleMorphism) -> Result<ModuleMorphism> {
        if self.target.rank() != other.source.rank() {
            return Err(Error::shape("composition of mismatched morphisms"));
        }
        ModuleMorphism::new(self.source.clone(), other.target.clone(), other.matrix.checked_mul(&self.matrix)?)
    }

    /// Whether this morphism is the zero map.
    pub fn is_zero_map(&self) -> Result<bool> {
        columns_in(&self.target, &self.matrix)
    }
}

fn columns_in(m: &PresentedModule, f: &PolyMatrix) -> Result<bool> {
    for c in f.columns() {
        if !m.is_relation(&c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every source relation maps into the target relations.
pub fn morphism_check(f: &ModuleMorphism) -> Result<bool> {
    let img = f.matrix.checked_mul(&f.source.full_presentation())?;
    columns_in(&f.target, &img)
}

fn is_identity_on(m: &PresentedModule, composite: &PolyMatrix) -> Result<bool> {
    let d = composite.checked_sub(&PolyMatrix::identity(m.ring(), m.rank()))?;
    columns_in(m, &d)
}

/// `g ∘ f = id` and `f ∘ g = id`, with both maps well defined.
pub fn iso_check(f: &ModuleMorphism, g: &ModuleMorphism) -> Result<bool> {
    if f.source.rank() != g.target.rank() || f.target.rank() != g.source.rank() {
        return Err(Error::shape("iso_check: f and g are not opposite maps"));
    }
    if !morphism_check(f)? || !morphism_check(g)? {
        return Ok(false);
    }
    Ok(is_identity_on(&f.source, &g.matrix.checked_mul(&f.matrix)?)?
        && is_identity_on(&f.target, &f.matrix.checked_mul(&g.matrix)?)?)
}

/// `e ∘ n = id_N` for `n : N -> E`, `e : E -> N`, both well defined.
pub fn summand_check(n: &ModuleMorphism, e: &ModuleMorphism) -> Result<bool> {
    if n.target.rank() != e.source.rank() || n.source.rank() != e.target.rank() {
        return Err(Error::shape("summand_check: maps do not compose to an endomorphism"));
    }
    // the small side is usually the cheaper module to test membership in
    Ok(morphism_check(e)? && is_identity_on(&n.source, &e.matrix.checked_mul(&n.matrix)?)? && morphism_check(n)?)
}

/// `M_0 -> M_1 -> ... -> M_k` with optional injectivity of the first map
/// and surjectivity of the last.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSequenceClaim {
    pub modules: Vec<PresentedModule>,
    pub maps: Vec<PolyMatrix>,
    pub injective: bool,
    pub surjective: bool,
}

impl ExactSequenceClaim {
    pub fn new(modules: Vec<PresentedModule>, maps: Vec<PolyMatrix>, injective: bool, surjective: bool) -> Result<Self> {
        if modules.is_empty() || maps.len() + 1 != modules.len() {
            return Err(Error::malformed("a chain of k+1 modules needs k maps"));
        }
        for (i, f) in maps.iter().enumerate() {
            ModuleMorphism::new(modules[i].clone(), modules[i + 1].clone(), f.clone())?;
        }
        Ok(ExactSequenceClaim { modules, maps, injective, surjective })
    }

    /// `0 -> A -> B -> C -> 0`.
    pub fn short(a: PresentedModule, b: PresentedModule, c: PresentedModule, f: PolyMatrix, g: PolyMatrix) -> Result<Self> {
        Self::new(vec![a, b, c], vec![f, g], true, true)
    }

    pub fn morphisms(&self) -> Vec<ModuleMorphism> {
        self.maps
            .iter()
            .enumerate()
            .map(|(i, f)| ModuleMorphism {
                source: self.modules[i].clone(),
                target: self.modules[i + 1].clone(),
                matrix: f.clone(),
            })
            .collect()
    }
}

/// Exactness at every interior module, plus the flagged ends.
pub fn exact_check(claim: &ExactSequenceClaim) -> Result<bool> {
    for m in claim.morphisms() {
        if !morphism_check(&m)? {
            return Ok(false);
        }
    }
    let mods = &claim.modules;
    let maps = &claim.maps;
    for i in 1..maps.len() {
        let comp = maps[i].checked_mul(&maps[i - 1])?;
        if !columns_in(&mods[i + 1], &comp)? {
            return Ok(false);
        }
        for k in mods[i + 1].kernel_of(&maps[i])? {
            if !mods[i].in_image(&maps[i - 1], &k)? {
                return Ok(false);
            }
        }
    }
    if claim.injective {
        if let Some(f) = maps.first() {
            for k in mods[1].kernel_of(f)? {
                if !mods[0].is_relation(&k)? {
                    return Ok(false);
                }
            }
        }
    }
    if claim.surjective {
        if let Some(f) = maps.last() {
            let last = mods.last().expect("nonempty");
            for j in 0..last.rank() {
                if !last.in_image(f, &FreeVector::unit(last.ring(), last.rank(), j))? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;

    fn cyclic(r: &RingRef, f: &str) -> PresentedModule {
        PresentedModule::new(vec![], PolyMatrix::lit(r, &[&[f]])).unwrap()
    }

    #[test]
    fn identity_and_multiplication() {
        let r = Ring::qxy();
        let m = cyclic(&r, "x");
        assert!(morphism_check(&ModuleMorphism::identity(&m)).unwrap());
        let x = ModuleMorphism::new(m.clone(), m.clone(), PolyMatrix::lit(&r, &[&["x"]])).unwrap();
        assert!(morphism_check(&x).unwrap());
        assert!(x.is_zero_map().unwrap());
        let bad = ModuleMorphism::new(m, cyclic(&r, "x^2"), PolyMatrix::lit(&r, &[&["1"]])).unwrap();
        assert!(!morphism_check(&bad).unwrap());
    }

    #[test]
    fn column_reduction_iso() {
        let r = Ring::qxy();
        let m = PresentedModule::new(vec![], PolyMatrix::lit(&r, &[&["x", "1"], &["0", "y"]])).unwrap();
        let n = cyclic(&r, "x*y");
        // e1 = -y e2 in M, so M is cyclic on e2
        let f = ModuleMorphism::new(m.clone(), n.clone(), PolyMatrix::lit(&r, &[&["-y", "1"]])).unwrap();
        let g = ModuleMorphism::new(n.clone(), m.clone(), PolyMatrix::lit(&r, &[&["0"], &["1"]])).unwrap();
        assert!(iso_check(&f, &g).unwrap());
        let f0 = ModuleMorphism::zero(&m, &n);
        let g0 = ModuleMorphism::zero(&n, &m);
        assert!(!iso_check(&f0, &g0).unwrap());
    }

    #[test]
    fn summands() {
        let r = Ring::qxy();
        let n = cyclic(&r, "x");
        let w = cyclic(&r, "y^2");
        let e = PresentedModule::direct_sum(&r, &[&n, &w]);
        let inc = ModuleMorphism::new(n.clone(), e.clone(), PolyMatrix::lit(&r, &[&["1"], &["0"]])).unwrap();
        let proj = ModuleMorphism::new(e.clone(), n.clone(), PolyMatrix::lit(&r, &[&["1", "0"]])).unwrap();
        assert!(summand_check(&inc, &proj).unwrap());
        assert!(summand_check(&ModuleMorphism::identity(&n), &ModuleMorphism::identity(&n)).unwrap());
        assert!(!summand_check(&ModuleMorphism::zero(&n, &e), &proj).unwrap());
    }

    #[test]
    fn koszul_complex_is_exact() {
        let r = Ring::qxy();
        let s1 = PresentedModule::free(&r, vec![], 1).unwrap();
        let s2 = PresentedModule::free(&r, vec![], 2).unwrap();
        let k = cyclic(&r, "x");
        let k = PresentedModule::new(vec![r.p("y")], k.presentation().clone()).unwrap();
        let claim = ExactSequenceClaim::new(
            vec![s1.clone(), s2, s1, k],
            vec![
                PolyMatrix::lit(&r, &[&["y"], &["-x"]]),
                PolyMatrix::lit(&r, &[&["x", "y"]]),
                PolyMatrix::lit(&r, &[&["1"]]),
            ],
            true,
            true,
        )
        .unwrap();
        assert!(exact_check(&claim).unwrap());
        let mut broken = claim.clone();
        broken.maps[0] = PolyMatrix::lit(&r, &[&["y"], &["x"]]);
        assert!(!exact_check(&broken).unwrap());
    }

    #[test]
    fn short_sequences() {
        let r = Ring::qxy();
        let sx = cyclic(&r, "x");
        let sx2 = cyclic(&r, "x^2");
        let good = ExactSequenceClaim::short(
            sx.clone(),
            sx2.clone(),
            sx.clone(),
            PolyMatrix::lit(&r, &[&["x"]]),
            PolyMatrix::lit(&r, &[&["1"]]),
        )
        .unwrap();
        assert!(exact_check(&good).unwrap());
        let bad = ExactSequenceClaim::short(
            sx.clone(),
            sx2,
            sx.clone(),
            PolyMatrix::lit(&r, &[&["1"]]),
            PolyMatrix::lit(&r, &[&["1"]]),
        )
        .unwrap();
        assert!(!exact_check(&bad).unwrap());
        let z = PresentedModule::zero(&r);
        let triv = ExactSequenceClaim::new(
            vec![z.clone(), sx.clone(), sx.clone(), z],
            vec![PolyMatrix::zero(&r, 1, 0), PolyMatrix::identity(&r, 1), PolyMatrix::zero(&r, 0, 1)],
            false,
            false,
        )
        .unwrap();
        assert!(exact_check(&triv).unwrap());
    }

    #[test]
    fn same_module_compares_relations() {
        let r = Ring::qxy();
        let a = PresentedModule::new(vec![], PolyMatrix::lit(&r, &[&["x", "x + y"]])).unwrap();
        let b = PresentedModule::new(vec![r.p("y")], PolyMatrix::lit(&r, &[&["x"]])).unwrap();
        assert!(a.same_module(&b));
        assert!(!a.same_module(&cyclic(&r, "x")));
        assert!(b.annihilated_by(&r.p("x*y")).unwrap());
        assert!(!b.annihilated_by(&r.p("x + 1")).unwrap());
    }
}
