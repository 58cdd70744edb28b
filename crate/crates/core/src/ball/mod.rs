//! Ball-membership certificates for `[G]_r` (closed mode) and `|G|_r`
//! (additive mode), their verification and the transformers that rewrite,
//! scale and assemble them.

mod lemma5;
mod scale;
mod theorem;

use crate::error::{Error, Result};
use crate::groebner::ideal_basis;
use crate::matfac::{MatrixFactorization, SummandWitness};
use crate::matrix::PolyMatrix;
use crate::module::{exact_check, ExactSequenceClaim, PresentedModule};
use crate::poly::{Polynomial, RingRef};

pub use lemma5::lemma5_rewrite;
pub use scale::lemma4_cert_scale;
pub use theorem::{theorem0_certify, RadiusReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `[G]`: summands of sums of `R` and syzygies `Ω^i G`.
    Closed,
    /// `|G|`: summands of sums of `G`.
    Additive,
}

/// The syzygy `Ω^i G` given by its inclusion into `(S/I)^r`, where `r` is
/// the number of generators of `Ω^{i-1} G` and the cover is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Syzygy {
    pub module: PresentedModule,
    pub inclusion: PolyMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub module: PresentedModule,
    /// `Ω^1 G, Ω^2 G, ...` as far as needed.
    pub syzygies: Vec<Syzygy>,
}

impl Generator {
    pub fn plain(module: PresentedModule) -> Self {
        Generator { module, syzygies: Vec::new() }
    }

    /// `Cok A` over `S/(f)` with syzygies alternating `Cok B`, `Cok A`.
    pub fn from_mf(mf: &MatrixFactorization, depth: usize) -> Result<Self> {
        let f = vec![mf.f.clone()];
        let ca = PresentedModule::new(f.clone(), mf.a.clone())?;
        let cb = PresentedModule::new(f, mf.b.clone())?;
        let syzygies = (1..=depth)
            .map(|i| {
                if i % 2 == 1 {
                    Syzygy { module: cb.clone(), inclusion: mf.a.clone() }
                } else {
                    Syzygy { module: ca.clone(), inclusion: mf.b.clone() }
                }
            })
            .collect();
        Ok(Generator { module: ca, syzygies })
    }

    /// `Ω^i G` (`i = 0` is `G`).
    pub fn omega(&self, i: usize) -> Result<&PresentedModule> {
        if i == 0 {
            return Ok(&self.module);
        }
        self.syzygies
            .get(i - 1)
            .map(|s| &s.module)
            .ok_or_else(|| Error::malformed(format!("no presentation attached for syzygy {i}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Generator,
    Ring,
    Omega(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    /// The target is a summand of the sum of `blocks`.
    Summand { blocks: Vec<Block>, witness: SummandWitness },
    /// `0 → X → E → Y → 0` with the target a summand of `E`.
    Extension {
        claim: ExactSequenceClaim,
        witness: SummandWitness,
        left: Box<BallCertificate>,
        right: Box<BallCertificate>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallCertificate {
    pub mode: Mode,
    /// Defining ideal `I` of the ring `S/I`.
    pub ideal: Vec<Polynomial>,
    pub generator: Generator,
    pub level: usize,
    pub target: PresentedModule,
    pub body: Body,
}

impl BallCertificate {
    pub fn ring(&self) -> &RingRef {
        self.target.ring()
    }

    /// Level-one certificate of the generator itself.
    pub fn identity(mode: Mode, ideal: Vec<Polynomial>, generator: Generator) -> Self {
        let ring = generator.module.ring().clone();
        let m = generator.module.rank();
        BallCertificate {
            mode,
            ideal,
            target: generator.module.clone(),
            generator,
            level: 1,
            body: Body::Summand { blocks: vec![Block::Generator], witness: SummandWitness::identity(&ring, m) },
        }
    }

    /// Number of extension steps along the left branch plus one.
    pub fn depth(&self) -> usize {
        match &self.body {
            Body::Summand { .. } => 1,
            Body::Extension { left, .. } => left.depth() + 1,
        }
    }

    /// Replaces the target by a module with the same generators and relations.
    pub fn with_target(mut self, target: PresentedModule) -> Result<Self> {
        if !self.target.same_module(&target) {
            return Err(Error::InvalidWitness("replacement target differs".into()));
        }
        self.target = target;
        Ok(self)
    }

    /// The same certificate read at a higher level.
    pub fn promote(mut self, level: usize) -> Self {
        self.level = self.level.max(level);
        self
    }

    /// Every block module used by summand leaves.
    fn leaf_blocks(&self, out: &mut Vec<Block>) {
        match &self.body {
            Body::Summand { blocks, .. } => out.extend(blocks.iter().copied()),
            Body::Extension { left, right, .. } => {
                left.leaf_blocks(out);
                right.leaf_blocks(out);
            }
        }
    }

    pub fn uses_only_generator(&self) -> bool {
        let mut b = Vec::new();
        self.leaf_blocks(&mut b);
        b.iter().all(|b| matches!(b, Block::Generator | Block::Omega(0)))
    }
}

/// `S/I` as a module.
pub(crate) fn ring_module(ring: &RingRef, ideal: &[Polynomial]) -> Result<PresentedModule> {
    PresentedModule::free(ring, ideal.to_vec(), 1)
}

pub(crate) fn block_module(c: &BallCertificate, b: Block) -> Result<PresentedModule> {
    match b {
        Block::Generator => Ok(c.generator.module.clone()),
        Block::Ring => ring_module(c.ring(), &c.ideal),
        Block::Omega(i) => c.generator.omega(i).cloned(),
    }
}

fn killed_by(m: &PresentedModule, ideal: &[Polynomial]) -> Result<bool> {
    for g in ideal {
        if !m.annihilated_by(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn same_ideal(a: &[Polynomial], b: &[Polynomial], ring: &RingRef) -> Result<bool> {
    Ok(ideal_basis(ring, a)? == ideal_basis(ring, b)?)
}

fn check_syzygies(g: &Generator, ideal: &[Polynomial]) -> Result<bool> {
    let ring = g.module.ring();
    let mut prev = &g.module;
    for s in &g.syzygies {
        let free = PresentedModule::free(ring, ideal.to_vec(), prev.rank())?;
        if s.inclusion.shape() != (prev.rank(), s.module.rank()) {
            return Err(Error::malformed("syzygy inclusion has the wrong shape"));
        }
        let claim = ExactSequenceClaim::short(
            s.module.clone(),
            free,
            prev.clone(),
            s.inclusion.clone(),
            PolyMatrix::identity(ring, prev.rank()),
        )?;
        if !killed_by(&s.module, ideal)? || !exact_check(&claim)? {
            return Ok(false);
        }
        prev = &s.module;
    }
    Ok(true)
}

fn verify_node(c: &BallCertificate, top: &BallCertificate) -> Result<bool> {
    if c.level == 0 {
        return Err(Error::malformed("level must be positive"));
    }
    if c.mode != top.mode || c.generator != top.generator || c.ideal != top.ideal {
        return Err(Error::malformed("subcertificate changes mode, generator or ring"));
    }
    if !killed_by(&c.target, &c.ideal)? {
        return Ok(false);
    }
    match &c.body {
        Body::Summand { blocks, witness } => {
            if c.mode == Mode::Additive && blocks.iter().any(|b| !matches!(b, Block::Generator | Block::Omega(0))) {
                return Ok(false);
            }
            let mods = blocks.iter().map(|&b| block_module(c, b)).collect::<Result<Vec<_>>>()?;
            let refs: Vec<&PresentedModule> = mods.iter().collect();
            let ambient = PresentedModule::direct_sum(c.ring(), &refs);
            if witness.n.shape() != (ambient.rank(), c.target.rank()) || witness.e.shape() != (c.target.rank(), ambient.rank()) {
                return Err(Error::malformed("summand witness has the wrong shape"));
            }
            witness.check(&c.target, &ambient)
        }
        Body::Extension { claim, witness, left, right } => {
            if c.level < 2 || left.level + 1 > c.level || right.level != 1 {
                return Err(Error::malformed("extension levels do not decrease"));
            }
            if claim.modules.len() != 3 || !claim.injective || !claim.surjective {
                return Err(Error::malformed("extension needs a short exact sequence"));
            }
            let (x, e, y) = (&claim.modules[0], &claim.modules[1], &claim.modules[2]);
            if witness.n.shape() != (e.rank(), c.target.rank()) || witness.e.shape() != (c.target.rank(), e.rank()) {
                return Err(Error::malformed("summand witness has the wrong shape"));
            }
            if !left.target.same_module(x) || !right.target.same_module(y) {
                return Ok(false);
            }
            Ok(witness.check(&c.target, e)?
                && killed_by(e, &c.ideal)?
                && exact_check(claim)?
                && verify_node(left, top)?
                && verify_node(right, top)?)
        }
    }
}

/// Checks every summand, exactness and syzygy witness and mode conformance.
pub fn cert_verify(c: &BallCertificate) -> Result<bool> {
    if !killed_by(&c.generator.module, &c.ideal)? || !check_syzygies(&c.generator, &c.ideal)? {
        return Ok(false);
    }
    verify_node(c, c)
}

/// Verifies that `c` proves `target ∈ ball_level(generator)` over `S/ideal`
/// in the given mode, rather than some other statement.
pub fn cert_proves(
    c: &BallCertificate,
    mode: Mode,
    ideal: &[Polynomial],
    generator: &PresentedModule,
    target: &PresentedModule,
    level: usize,
) -> Result<bool> {
    if c.mode != mode || c.level > level || c.generator.module != *generator || !target.same_module(&c.target) {
        return Ok(false);
    }
    if !same_ideal(&c.ideal, ideal, c.ring())? {
        return Ok(false);
    }
    cert_verify(c)
}

/// Identity blocks placing source parts into target parts: part `i` of
/// size `src[i]` goes to row offset `place[i]` of a module of rank `rows`.
pub(crate) fn placement(ring: &RingRef, rows: usize, src: &[usize], place: &[usize]) -> PolyMatrix {
    let cols: usize = src.iter().sum();
    let mut j = PolyMatrix::zero(ring, rows, cols);
    let mut c0 = 0;
    for (&s, &r0) in src.iter().zip(place) {
        j.set_block(r0, c0, &PolyMatrix::identity(ring, s));
        c0 += s;
    }
    j
}

/// Composes a witness with an embedding `J` whose transpose is a retraction.
pub(crate) fn push_witness(w: &SummandWitness, j: &PolyMatrix) -> Result<SummandWitness> {
    Ok(SummandWitness { n: j.checked_mul(&w.n)?, e: w.e.checked_mul(&j.transpose())? })
}

fn diag_witness(ring: &RingRef, a: &SummandWitness, b: &SummandWitness) -> SummandWitness {
    SummandWitness { n: PolyMatrix::block_diag(ring, &[&a.n, &b.n]), e: PolyMatrix::block_diag(ring, &[&a.e, &b.e]) }
}

fn sum2(ring: &RingRef, a: &PresentedModule, b: &PresentedModule) -> PresentedModule {
    PresentedModule::direct_sum(ring, &[a, b])
}

/// Certificate of `N_a ⊕ N_b` at the larger of the two levels.
pub fn cert_direct_sum(a: &BallCertificate, b: &BallCertificate) -> Result<BallCertificate> {
    if a.mode != b.mode || a.generator != b.generator || a.ideal != b.ideal {
        return Err(Error::malformed("summands use different generators"));
    }
    let ring = a.ring().clone();
    let target = sum2(&ring, &a.target, &b.target);
    let level = a.level.max(b.level);
    let body = match (&a.body, &b.body) {
        (Body::Summand { blocks: ba, witness: wa }, Body::Summand { blocks: bb, witness: wb }) => {
            Body::Summand { blocks: ba.iter().chain(bb).copied().collect(), witness: diag_witness(&ring, wa, wb) }
        }
        (Body::Extension { claim, witness, left, right }, Body::Summand { .. }) => {
            let (x, e, y) = (&claim.modules[0], &claim.modules[1], &claim.modules[2]);
            let nb = b.target.rank();
            let f = PolyMatrix::vstack(&ring, x.rank(), &[&claim.maps[0], &PolyMatrix::zero(&ring, nb, x.rank())])?;
            let g = PolyMatrix::block_diag(&ring, &[&claim.maps[1], &PolyMatrix::identity(&ring, nb)]);
            let claim = ExactSequenceClaim::short(x.clone(), sum2(&ring, e, &b.target), sum2(&ring, y, &b.target), f, g)?;
            let right = cert_direct_sum(right, &b.clone().with_level(1))?;
            Body::Extension {
                claim,
                witness: diag_witness(&ring, witness, &SummandWitness::identity(&ring, nb)),
                left: left.clone(),
                right: Box::new(right),
            }
        }
        (Body::Summand { .. }, Body::Extension { claim, witness, left, right }) => {
            let (x, e, y) = (&claim.modules[0], &claim.modules[1], &claim.modules[2]);
            let na = a.target.rank();
            let f = PolyMatrix::vstack(&ring, x.rank(), &[&PolyMatrix::zero(&ring, na, x.rank()), &claim.maps[0]])?;
            let g = PolyMatrix::block_diag(&ring, &[&PolyMatrix::identity(&ring, na), &claim.maps[1]]);
            let claim = ExactSequenceClaim::short(x.clone(), sum2(&ring, &a.target, e), sum2(&ring, &a.target, y), f, g)?;
            let right = cert_direct_sum(&a.clone().with_level(1), right)?;
            Body::Extension {
                claim,
                witness: diag_witness(&ring, &SummandWitness::identity(&ring, na), witness),
                left: left.clone(),
                right: Box::new(right),
            }
        }
        (
            Body::Extension { claim: ca, witness: wa, left: la, right: ra },
            Body::Extension { claim: cb, witness: wb, left: lb, right: rb },
        ) => {
            let m = |i: usize| sum2(&ring, &ca.modules[i], &cb.modules[i]);
            let f = PolyMatrix::block_diag(&ring, &[&ca.maps[0], &cb.maps[0]]);
            let g = PolyMatrix::block_diag(&ring, &[&ca.maps[1], &cb.maps[1]]);
            let claim = ExactSequenceClaim::short(m(0), m(1), m(2), f, g)?;
            Body::Extension {
                claim,
                witness: diag_witness(&ring, wa, wb),
                left: Box::new(cert_direct_sum(la, lb)?),
                right: Box::new(cert_direct_sum(ra, rb)?),
            }
        }
    };
    Ok(BallCertificate { mode: a.mode, ideal: a.ideal.clone(), generator: a.generator.clone(), level, target, body })
}

/// Direct sum of a nonempty list.
pub fn cert_direct_sum_all(parts: &[BallCertificate]) -> Result<BallCertificate> {
    let (first, rest) = parts.split_first().ok_or_else(|| Error::malformed("empty direct sum"))?;
    rest.iter().try_fold(first.clone(), |acc, c| cert_direct_sum(&acc, c))
}

impl BallCertificate {
    fn with_level(mut self, level: usize) -> Self {
        self.level = level;
        self
    }
}

/// Moves an additive-mode certificate to a smaller ideal `J ⊆ I` and a
/// generator containing the old one as a summand via `embed`.
pub fn rebase(c: &BallCertificate, ideal: Vec<Polynomial>, generator: Generator, embed: &SummandWitness) -> Result<BallCertificate> {
    if c.mode != Mode::Additive {
        return Err(Error::malformed("only additive certificates can be rebased"));
    }
    let ring = c.ring().clone();
    let body = match &c.body {
        Body::Summand { blocks, witness } => {
            let k = blocks.len();
            let jn: Vec<&PolyMatrix> = std::iter::repeat_n(&embed.n, k).collect();
            let je: Vec<&PolyMatrix> = std::iter::repeat_n(&embed.e, k).collect();
            let jn = PolyMatrix::block_diag(&ring, &jn);
            let je = PolyMatrix::block_diag(&ring, &je);
            Body::Summand {
                blocks: vec![Block::Generator; k],
                witness: SummandWitness { n: jn.checked_mul(&witness.n)?, e: witness.e.checked_mul(&je)? },
            }
        }
        Body::Extension { claim, witness, left, right } => Body::Extension {
            claim: claim.clone(),
            witness: witness.clone(),
            left: Box::new(rebase(left, ideal.clone(), generator.clone(), embed)?),
            right: Box::new(rebase(right, ideal.clone(), generator.clone(), embed)?),
        },
    };
    Ok(BallCertificate { mode: c.mode, ideal, generator, level: c.level, target: c.target.clone(), body })
}

/// Checks that `J ⊆ I`, used before rebasing.
pub(crate) fn ideal_contained(small: &[Polynomial], big: &[Polynomial], ring: &RingRef) -> Result<bool> {
    let gb = ideal_basis(ring, big)?;
    for g in small {
        if !gb.reduce_poly(g)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn check_same_ideal(a: &[Polynomial], b: &[Polynomial], ring: &RingRef) -> Result<()> {
    if !same_ideal(a, b, ring)? {
        return Err(Error::InvalidWitness("certificate lives over a different ring".into()));
    }
    Ok(())
}
