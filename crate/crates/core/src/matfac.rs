//! Matrix factorizations `AB = BA = fE` and the operations on them:
//! construction from a presentation, syzygies, sums, scaling and the
//! transport of direct-summand witnesses along scaling.

use crate::error::{Error, Result};
use crate::groebner::{module_kernel, Lifter};
use crate::matrix::{FreeVector, PolyMatrix};
use crate::module::{exact_check, summand_check, ExactSequenceClaim, ModuleMorphism, PresentedModule};
use crate::poly::{check_ring, Polynomial, RingRef};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFactorization {
    pub f: Polynomial,
    pub a: PolyMatrix,
    pub b: PolyMatrix,
}

impl MatrixFactorization {
    /// Checks shapes only; see [`mf_verify`] for the factorization identity.
    pub fn new(f: Polynomial, a: PolyMatrix, b: PolyMatrix) -> Result<Self> {
        check_ring(f.ring(), a.ring())?;
        check_ring(f.ring(), b.ring())?;
        for m in [&a, &b] {
            if !m.is_square() {
                return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
            }
        }
        if a.rows() != b.rows() {
            return Err(Error::shape(format!("factors of sizes {} and {}", a.rows(), b.rows())));
        }
        Ok(MatrixFactorization { f, a, b })
    }

    /// `(f, (f), (1))`.
    pub fn trivial(f: &Polynomial) -> Self {
        let r = f.ring();
        MatrixFactorization { f: f.clone(), a: PolyMatrix::scalar(r, 1, f), b: PolyMatrix::identity(r, 1) }
    }

    pub fn ring(&self) -> &RingRef {
        self.f.ring()
    }

    pub fn size(&self) -> usize {
        self.a.rows()
    }

    /// `Cok A` over `S/(f)`.
    pub fn cokernel(&self) -> PresentedModule {
        PresentedModule::new(vec![self.f.clone()], self.a.clone()).expect("same ring")
    }

    pub fn transpose(&self) -> Self {
        MatrixFactorization { f: self.f.clone(), a: self.a.transpose(), b: self.b.transpose() }
    }
}

pub fn mf_verify(mf: &MatrixFactorization) -> Result<bool> {
    if mf.f.is_zero() {
        return Ok(false);
    }
    let fe = PolyMatrix::scalar(mf.ring(), mf.size(), &mf.f);
    Ok(mf.a.checked_mul(&mf.b)? == fe && mf.b.checked_mul(&mf.a)? == fe)
}

fn require_valid(mf: &MatrixFactorization) -> Result<()> {
    if !mf_verify(mf)? {
        return Err(Error::InvalidFactorization("AB = BA = fE fails".into()));
    }
    Ok(())
}

/// Builds the mate `B` of a square presentation `A` with `f Cok A = 0`
/// and `Ker A = 0`, column by column from lifts of `f e_i`.
pub fn mf_from_presentation(a: &PolyMatrix, f: &Polynomial) -> Result<MatrixFactorization> {
    check_ring(a.ring(), f.ring())?;
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if f.is_zero() {
        return Err(Error::ZeroElement("f".into()));
    }
    if !module_kernel(a, &[])?.is_empty() {
        return Err(Error::KernelNonzero);
    }
    let ring = a.ring();
    let n = a.rows();
    let lifter = Lifter::new(a, &[])?;
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let target = FreeVector::unit(ring, n, i).scale(f);
        match lifter.lift(&target)? {
            Some(c) => cols.push(c),
            None => return Err(Error::NotAnnihilated(format!("f e_{} is not in the column module", i + 1))),
        }
    }
    let b = PolyMatrix::from_columns(ring, n, &cols)?;
    let mf = MatrixFactorization { f: f.clone(), a: a.clone(), b };
    if !mf_verify(&mf)? {
        return Err(Error::internal("lifted mate does not satisfy BA = fE"));
    }
    Ok(mf)
}

/// `(f, B, A)`; `Cok B` is the syzygy of `Cok A` over `S/(f)`.
pub fn mf_syzygy(mf: &MatrixFactorization) -> MatrixFactorization {
    MatrixFactorization { f: mf.f.clone(), a: mf.b.clone(), b: mf.a.clone() }
}

/// One period `F -A-> F -B-> F -A-> F` over `S/(f)`.
fn period(mf: &MatrixFactorization) -> Result<ExactSequenceClaim> {
    let free = PresentedModule::free(mf.ring(), vec![mf.f.clone()], mf.size())?;
    ExactSequenceClaim::new(
        vec![free.clone(), free.clone(), free.clone(), free],
        vec![mf.a.clone(), mf.b.clone(), mf.a.clone()],
        false,
        false,
    )
}

/// The 2-periodic complex and its dual are exact, and the double syzygy
/// returns the same presentation.
pub fn mf_periodicity_check(mf: &MatrixFactorization) -> Result<bool> {
    require_valid(mf)?;
    Ok(exact_check(&period(mf)?)?
        && exact_check(&period(&mf.transpose())?)?
        && mf_syzygy(&mf_syzygy(mf)) == *mf)
}

pub fn mf_direct_sum(a: &MatrixFactorization, b: &MatrixFactorization) -> Result<MatrixFactorization> {
    check_ring(a.ring(), b.ring())?;
    if a.f != b.f {
        return Err(Error::InvalidFactorization("direct sum of factorizations of different elements".into()));
    }
    let r = a.ring();
    Ok(MatrixFactorization {
        f: a.f.clone(),
        a: PolyMatrix::block_diag(r, &[&a.a, &b.a]),
        b: PolyMatrix::block_diag(r, &[&a.b, &b.b]),
    })
}

/// `Cok(xA)` as a module over `S/(xy)`, given `y Cok A = 0`.
pub fn mf_scale(a: &PolyMatrix, x: &Polynomial, y: &Polynomial) -> Result<PresentedModule> {
    if x.is_zero() {
        return Err(Error::ZeroElement("x".into()));
    }
    let base = PresentedModule::new(vec![], a.clone())?;
    if !base.annihilated_by(y)? {
        return Err(Error::NotAnnihilated("y does not kill Cok A".into()));
    }
    let xy = x.checked_mul(y)?;
    let scaled = PresentedModule::new(vec![xy.clone()], a.scale(x))?;
    if !scaled.annihilated_by(&xy)? {
        return Err(Error::internal("xy does not kill Cok(xA)"));
    }
    Ok(scaled)
}

/// Maps `n : Cok B -> Cok A` and `e : Cok A -> Cok B` with `e n = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SummandWitness {
    pub n: PolyMatrix,
    pub e: PolyMatrix,
}

impl SummandWitness {
    pub fn identity(ring: &RingRef, m: usize) -> Self {
        SummandWitness { n: PolyMatrix::identity(ring, m), e: PolyMatrix::identity(ring, m) }
    }

    pub fn check(&self, small: &PresentedModule, big: &PresentedModule) -> Result<bool> {
        let n = ModuleMorphism::new(small.clone(), big.clone(), self.n.clone())?;
        let e = ModuleMorphism::new(big.clone(), small.clone(), self.e.clone())?;
        summand_check(&n, &e)
    }
}

/// Result of scaling a summand witness: `Cok(xB)` inside
/// `Cok(xA) ⊕ (S/(x))^k`, presented by `diag(xA, x E_k)`.
#[derive(Clone, Debug)]
pub struct ScaledSummand {
    pub k: usize,
    pub ambient: PresentedModule,
    pub summand: PresentedModule,
    pub witness: SummandWitness,
}

/// Transports a witness of `Cok B` as a summand of `Cok A` to a witness of
/// `Cok(xB)` as a summand of `Cok(xA) ⊕ (S/(x))^k`.
///
/// With the complement `C = [A | n]` one has `Cok A ≅ Cok B'` for
/// `B' = diag(B, C)` via `α = (e; 1)` and `β = (n, 1 - n e)`. The free
/// automorphism `Ψ = [[1, β], [-α, 1 - αβ]]` of `F_0 ⊕ G_0` carries
/// `Im A ⊕ G_0` onto `F_0 ⊕ Im B'`, hence `x(Im A ⊕ G_0)` onto
/// `x(F_0 ⊕ Im B')`, with inverse `[[1 - βα, -β], [α, 1]]`.
pub fn lemma4_summand_scale(
    a: &PolyMatrix,
    b: &PolyMatrix,
    wit: &SummandWitness,
    x: &Polynomial,
) -> Result<ScaledSummand> {
    let ring = a.ring().clone();
    check_ring(&ring, b.ring())?;
    check_ring(&ring, x.ring())?;
    if x.is_zero() {
        return Err(Error::ZeroElement("x".into()));
    }
    let big = PresentedModule::new(vec![], a.clone())?;
    let small = PresentedModule::new(vec![], b.clone())?;
    if !wit.check(&small, &big)? {
        return Err(Error::InvalidWitness("input witness fails summand_check".into()));
    }
    let (m, p) = (a.rows(), b.rows());
    let xa = a.scale(x);
    let xb = b.scale(x);
    let summand = PresentedModule::new(vec![], xb)?;

    if a == b && wit.n == PolyMatrix::identity(&ring, m) && wit.e == wit.n {
        let ambient = PresentedModule::new(vec![], xa)?;
        return Ok(ScaledSummand { k: 0, ambient, summand, witness: SummandWitness::identity(&ring, m) });
    }

    let k = p + m;
    let em = PolyMatrix::identity(&ring, m);
    let ek = PolyMatrix::identity(&ring, k);
    let alpha = PolyMatrix::vstack(&ring, m, &[&wit.e, &em])?;
    let ne = wit.n.checked_mul(&wit.e)?;
    let beta = PolyMatrix::hstack(&ring, m, &[&wit.n, &em.checked_sub(&ne)?])?;

    let ab = alpha.checked_mul(&beta)?;
    let ba = beta.checked_mul(&alpha)?;
    let mut psi = PolyMatrix::zero(&ring, m + k, m + k);
    psi.set_block(0, 0, &em);
    psi.set_block(0, m, &beta);
    psi.set_block(m, 0, &alpha.neg());
    psi.set_block(m, m, &ek.checked_sub(&ab)?);
    let mut psi_inv = PolyMatrix::zero(&ring, m + k, m + k);
    psi_inv.set_block(0, 0, &em.checked_sub(&ba)?);
    psi_inv.set_block(0, m, &beta.neg());
    psi_inv.set_block(m, 0, &alpha);
    psi_inv.set_block(m, m, &ek);

    // Cok(xB) sits in the first p generators of the G_0 part of F_0/x ⊕ Cok(xB')
    let mut inc = PolyMatrix::zero(&ring, m + k, p);
    inc.set_block(m, 0, &PolyMatrix::identity(&ring, p));
    let proj = inc.transpose();
    let witness = SummandWitness { n: psi_inv.checked_mul(&inc)?, e: proj.checked_mul(&psi)? };

    let xek = PolyMatrix::scalar(&ring, k, x);
    let ambient = PresentedModule::new(vec![], PolyMatrix::block_diag(&ring, &[&xa, &xek]))?;
    if !witness.check(&summand, &ambient)? {
        return Err(Error::internal("scaled witness fails summand_check"));
    }
    Ok(ScaledSummand { k, ambient, summand, witness })
}
