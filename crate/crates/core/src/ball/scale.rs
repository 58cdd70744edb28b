use super::{block_module, cert_direct_sum, placement, push_witness, BallCertificate, Block, Body, Generator, Mode};
use crate::error::{Error, Result};
use crate::groebner::Lifter;
use crate::matfac::{lemma4_summand_scale, SummandWitness};
use crate::matrix::{FreeVector, PolyMatrix};
use crate::module::{exact_check, ExactSequenceClaim, PresentedModule};
use crate::poly::{Polynomial, RingRef};

/// Presentation over `S` of an `S/(y)`-module: its own matrix when that is
/// already killed by `y`, otherwise with `yE` appended.
pub(crate) fn s_presentation(m: &PresentedModule, y: &Polynomial) -> Result<PolyMatrix> {
    let ring = m.ring();
    let own = PresentedModule::new(vec![], m.presentation().clone())?;
    if own.annihilated_by(y)? {
        return Ok(m.presentation().clone());
    }
    PolyMatrix::hstack(ring, m.rank(), &[m.presentation(), &PolyMatrix::scalar(ring, m.rank(), y)])
}

struct Ctx {
    ring: RingRef,
    x: Polynomial,
    y: Polynomial,
    a: PolyMatrix,
    b: PolyMatrix,
    /// `Cok(xA) ⊕ Cok(xB) ⊕ S/(x)` over `S/(xy)`.
    gen: Generator,
    ideal: Vec<Polynomial>,
}

impl Ctx {
    fn scaled(&self, p: &PolyMatrix) -> Result<PresentedModule> {
        PresentedModule::new(self.ideal.clone(), p.scale(&self.x))
    }

    /// Certificate of `(S/(x))^k` through the last component of the generator.
    fn padding(&self, k: usize) -> Result<BallCertificate> {
        let m = self.a.rows();
        let rank = 2 * m + 1;
        let place: Vec<usize> = (0..k).map(|i| i * rank + 2 * m).collect();
        let j = placement(&self.ring, k * rank, &vec![1; k], &place);
        let witness = push_witness(&SummandWitness::identity(&self.ring, k), &j)?;
        Ok(BallCertificate {
            mode: Mode::Closed,
            ideal: self.ideal.clone(),
            generator: self.gen.clone(),
            level: 1,
            target: self.scaled(&PolyMatrix::identity(&self.ring, k))?,
            body: Body::Summand { blocks: vec![Block::Generator; k], witness },
        })
    }

    fn cert(&self, level: usize, target: PresentedModule, body: Body) -> BallCertificate {
        BallCertificate { mode: Mode::Closed, ideal: self.ideal.clone(), generator: self.gen.clone(), level, target, body }
    }

    fn base(&self, c: &BallCertificate, blocks: &[Block], witness: &SummandWitness) -> Result<BallCertificate> {
        let ring = &self.ring;
        let m = self.a.rows();
        let ca = PresentedModule::new(vec![self.y.clone()], self.a.clone())?;
        let cb = PresentedModule::new(vec![self.y.clone()], self.b.clone())?;
        let ymat = PolyMatrix::scalar(ring, 1, &self.y);
        // per block: presentation over S and placement inside the new generator
        let mut pres: Vec<&PolyMatrix> = Vec::new();
        let mut kinds: Vec<(Block, usize)> = Vec::new();
        for &b in blocks {
            let module = block_module(c, b)?;
            let (p, want, kind) = match b {
                Block::Ring => (&ymat, None, (Block::Ring, 0)),
                Block::Generator => (&self.a, Some(&ca), (Block::Generator, 0)),
                Block::Omega(i) if i % 2 == 0 => (&self.a, Some(&ca), (Block::Generator, 0)),
                Block::Omega(_) => (&self.b, Some(&cb), (Block::Generator, m)),
            };
            if let Some(w) = want {
                if !module.same_module(w) {
                    return Err(Error::NotExpressible(format!("{b:?} is not the matching cokernel")));
                }
            }
            pres.push(p);
            kinds.push(kind);
        }
        let d = PolyMatrix::block_diag(ring, &pres);
        let c_full = s_presentation(&c.target, &self.y)?;
        let scaled = lemma4_summand_scale(&d, &c_full, witness, &self.x)?;

        let gen_rank = 2 * m + 1;
        let mut new_blocks = Vec::new();
        let mut sizes = Vec::new();
        let mut place = Vec::new();
        let mut row = 0;
        for (p, (kind, off)) in pres.iter().zip(&kinds) {
            new_blocks.push(*kind);
            sizes.push(p.rows());
            place.push(row + off);
            row += if *kind == Block::Ring { 1 } else { gen_rank };
        }
        for _ in 0..scaled.k {
            new_blocks.push(Block::Generator);
            sizes.push(1);
            place.push(row + 2 * m);
            row += gen_rank;
        }
        let j = placement(ring, row, &sizes, &place);
        let body = Body::Summand { blocks: new_blocks, witness: push_witness(&scaled.witness, &j)? };
        Ok(self.cert(c.level, self.scaled(&c_full)?, body))
    }

    fn step(&self, c: &BallCertificate) -> Result<BallCertificate> {
        match &c.body {
            Body::Summand { blocks, witness } => self.base(c, blocks, witness),
            Body::Extension { claim, witness, left, right } => self.extension(c, claim, witness, left, right),
        }
    }

    fn extension(
        &self,
        c: &BallCertificate,
        claim: &ExactSequenceClaim,
        witness: &SummandWitness,
        left: &BallCertificate,
        right: &BallCertificate,
    ) -> Result<BallCertificate> {
        let ring = &self.ring;
        let (ym, zm) = (&claim.modules[1], &claim.modules[2]);
        let (f, g) = (&claim.maps[0], &claim.maps[1]);
        let d = s_presentation(&left.target, &self.y)?;
        let fz = s_presentation(&right.target, &self.y)?;
        let (a, b) = (d.rows(), fz.rows());
        let y_rels = ym.relations();

        // lifts of the generators of Z to Y
        let g_lift = Lifter::new(g, &zm.relations())?;
        let mut s_cols = Vec::with_capacity(b);
        for j in 0..b {
            let u = FreeVector::unit(ring, b, j);
            s_cols.push(g_lift.lift(&u)?.ok_or_else(|| Error::InvalidWitness("extension is not surjective".into()))?);
        }
        let s = PolyMatrix::from_columns(ring, ym.rank(), &s_cols)?;
        // horseshoe presentation [[D, H], [0, F]] on the generators [f | s]
        let f_lift = Lifter::new(f, &y_rels)?;
        let sf = s.checked_mul(&fz)?;
        let mut h_cols = Vec::with_capacity(fz.cols());
        for col in sf.columns() {
            let h = f_lift.lift(&col)?.ok_or_else(|| Error::InvalidWitness("sequence is not exact in the middle".into()))?;
            h_cols.push(h.neg());
        }
        let h = PolyMatrix::from_columns(ring, a, &h_cols)?;
        let mut gm = PolyMatrix::zero(ring, a + b, d.cols() + fz.cols());
        gm.set_block(0, 0, &d);
        gm.set_block(0, d.cols(), &h);
        gm.set_block(a, d.cols(), &fz);

        // Cok G ≅ Y through T = [f | s]
        let t = PolyMatrix::hstack(ring, ym.rank(), &[f, &s])?;
        let t_lift = Lifter::new(&t, &y_rels)?;
        let mut psi_cols = Vec::with_capacity(ym.rank());
        for j in 0..ym.rank() {
            let u = FreeVector::unit(ring, ym.rank(), j);
            psi_cols.push(t_lift.lift(&u)?.ok_or_else(|| Error::InvalidWitness("horseshoe generators do not span".into()))?);
        }
        let psi = PolyMatrix::from_columns(ring, a + b, &psi_cols)?;
        let wit_g = SummandWitness { n: psi.checked_mul(&witness.n)?, e: witness.e.checked_mul(&t)? };
        let c_full = s_presentation(&c.target, &self.y)?;
        let scaled = lemma4_summand_scale(&gm, &c_full, &wit_g, &self.x)?;
        let k = scaled.k;

        let x_left = self.step(left)?;
        let z_right = self.step(right)?;
        let x_pad = if k == 0 { x_left } else { cert_direct_sum(&x_left, &self.padding(k)?)? };

        let ek = PolyMatrix::identity(ring, k);
        let xe_k = PolyMatrix::scalar(ring, k, &self.x);
        let x_mod = PresentedModule::new(self.ideal.clone(), PolyMatrix::block_diag(ring, &[&d.scale(&self.x), &xe_k]))?;
        let e_mod = PresentedModule::new(self.ideal.clone(), PolyMatrix::block_diag(ring, &[&gm.scale(&self.x), &xe_k]))?;
        let z_mod = self.scaled(&fz)?;
        let mut inc = PolyMatrix::zero(ring, a + b + k, a + k);
        inc.set_block(0, 0, &PolyMatrix::identity(ring, a));
        inc.set_block(a + b, a, &ek);
        let mut proj = PolyMatrix::zero(ring, b, a + b + k);
        proj.set_block(0, a, &PolyMatrix::identity(ring, b));
        let new_claim = ExactSequenceClaim::short(x_mod, e_mod, z_mod, inc, proj)?;
        if !exact_check(&new_claim)? {
            return Err(Error::internal("scaled extension is not exact"));
        }
        let body = Body::Extension { claim: new_claim, witness: scaled.witness, left: Box::new(x_pad), right: Box::new(z_right) };
        Ok(self.cert(c.level, self.scaled(&c_full)?, body))
    }
}

/// Scales a certificate of `Cok C ∈ [Cok A]_r` over `S/(y)` into one of
/// `Cok(xC) ∈ [Cok(xA) ⊕ Cok(xB) ⊕ S/(x)]_r` over `S/(xy)`.
pub fn lemma4_cert_scale(c: &BallCertificate, mate_b: &PolyMatrix, x: &Polynomial) -> Result<BallCertificate> {
    let ring = c.ring().clone();
    if c.mode != Mode::Closed {
        return Err(Error::malformed("scaling expects a closed-mode certificate"));
    }
    if c.ideal.len() != 1 {
        return Err(Error::malformed("scaling expects a principal ideal (y)"));
    }
    let y = c.ideal[0].clone();
    if x.is_zero() || y.is_zero() {
        return Err(Error::ZeroElement("x or y".into()));
    }
    let a = c.generator.module.presentation().clone();
    let m = a.rows();
    let ye = PolyMatrix::scalar(&ring, m, &y);
    if !a.is_square() || a.checked_mul(mate_b)? != ye || mate_b.checked_mul(&a)? != ye {
        return Err(Error::InvalidFactorization("A B = B A = y E fails".into()));
    }
    let ideal = vec![x * &y];
    let gpres = PolyMatrix::block_diag(&ring, &[&a.scale(x), &mate_b.scale(x), &PolyMatrix::scalar(&ring, 1, x)]);
    let gen = Generator::plain(PresentedModule::new(ideal.clone(), gpres)?);
    let ctx = Ctx { ring, x: x.clone(), y, a, b: mate_b.clone(), gen, ideal };
    ctx.step(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::cert_verify;
    use crate::matfac::MatrixFactorization;
    use crate::poly::Ring;

    fn mf() -> MatrixFactorization {
        let r = Ring::qxy();
        MatrixFactorization::new(
            r.p("x^2 + y^3"),
            PolyMatrix::lit(&r, &[&["x", "y"], &["-y^2", "x"]]),
            PolyMatrix::lit(&r, &[&["x", "-y"], &["y^2", "x"]]),
        )
        .unwrap()
    }

    #[test]
    fn level_one_identity() {
        let mf = mf();
        let r = mf.ring().clone();
        let c = BallCertificate::identity(Mode::Closed, vec![mf.f.clone()], Generator::from_mf(&mf, 1).unwrap());
        let x = r.p("x + 1");
        let out = lemma4_cert_scale(&c, &mf.b, &x).unwrap();
        assert_eq!(out.level, 1);
        assert!(out.target.same_module(&PresentedModule::new(vec![&x * &mf.f], mf.a.scale(&x)).unwrap()));
        assert!(cert_verify(&out).unwrap());
    }

    #[test]
    fn level_one_mate() {
        let mf = mf();
        let r = mf.ring().clone();
        let g = Generator::from_mf(&mf, 1).unwrap();
        let c0 = BallCertificate::identity(Mode::Closed, vec![mf.f.clone()], g.clone());
        let c = BallCertificate {
            target: g.syzygies[0].module.clone(),
            body: Body::Summand { blocks: vec![Block::Omega(1)], witness: SummandWitness::identity(&r, 2) },
            ..c0
        };
        assert!(cert_verify(&c).unwrap());
        let out = lemma4_cert_scale(&c, &mf.b, &r.p("y")).unwrap();
        assert!(cert_verify(&out).unwrap());
    }

    #[test]
    fn level_two_extension() {
        // 0 → S/(f) → S/(f) ⊕ S/(f) → S/(f) → 0 over S/(f), scaled by g
        let r = Ring::qxy();
        let (f, g) = (r.p("x^2 + y^3"), r.p("x^2 + y^5"));
        let triv = MatrixFactorization::trivial(&f);
        let gen = Generator::from_mf(&triv, 0).unwrap();
        let leaf = BallCertificate::identity(Mode::Closed, vec![f.clone()], gen.clone());
        let e = PresentedModule::new(vec![f.clone()], PolyMatrix::scalar(&r, 2, &f)).unwrap();
        let claim = ExactSequenceClaim::short(
            leaf.target.clone(),
            e,
            leaf.target.clone(),
            PolyMatrix::lit(&r, &[&["1"], &["0"]]),
            PolyMatrix::lit(&r, &[&["0", "1"]]),
        )
        .unwrap();
        let target = PresentedModule::new(vec![f.clone()], PolyMatrix::scalar(&r, 2, &f)).unwrap();
        let c = BallCertificate {
            mode: Mode::Closed,
            ideal: vec![f.clone()],
            generator: gen,
            level: 2,
            target,
            body: Body::Extension {
                claim,
                witness: SummandWitness::identity(&r, 2),
                left: Box::new(leaf.clone()),
                right: Box::new(leaf),
            },
        };
        assert!(cert_verify(&c).unwrap());
        let out = lemma4_cert_scale(&c, &triv.b, &g).unwrap();
        assert_eq!(out.level, 2);
        assert!(cert_verify(&out).unwrap());
    }

    #[test]
    fn rejects_non_mate() {
        let mf = mf();
        let c = BallCertificate::identity(Mode::Closed, vec![mf.f.clone()], Generator::from_mf(&mf, 0).unwrap());
        assert!(lemma4_cert_scale(&c, &mf.a, &mf.f).is_err());
    }
}
