use super::{block_module, check_same_ideal, placement, push_witness, BallCertificate, Block, Body, Generator, Mode};
use crate::error::{Error, Result};
use crate::matfac::MatrixFactorization;
use crate::matrix::PolyMatrix;
use crate::module::PresentedModule;

/// `K = M ⊕ S/(x) ⊕ ΩM` presented by `diag(A, 1×0, B)` over `S/(x)`.
pub(crate) fn lemma5_generator(mf: &MatrixFactorization) -> Result<PresentedModule> {
    let ring = mf.ring();
    let mid = PolyMatrix::zero(ring, 1, 0);
    PresentedModule::new(vec![mf.f.clone()], PolyMatrix::block_diag(ring, &[&mf.a, &mid, &mf.b]))
}

/// Offset inside `K` of the component a closed-mode block is sent to.
fn offset(c: &BallCertificate, b: Block, mf: &MatrixFactorization, ca: &PresentedModule, cb: &PresentedModule) -> Result<usize> {
    let m = mf.size();
    let module = block_module(c, b)?;
    let (want, off) = match b {
        Block::Ring => return Ok(m),
        Block::Generator => (ca, 0),
        Block::Omega(i) if i % 2 == 0 => (ca, 0),
        Block::Omega(_) => (cb, m + 1),
    };
    if !module.same_module(want) {
        return Err(Error::NotExpressible(format!("{b:?} is not presented as the matching cokernel")));
    }
    Ok(off)
}

fn rewrite(c: &BallCertificate, mf: &MatrixFactorization, gen: &Generator, ca: &PresentedModule, cb: &PresentedModule) -> Result<BallCertificate> {
    let ring = c.ring().clone();
    let k = gen.module.rank();
    let body = match &c.body {
        Body::Summand { blocks, witness } => {
            let mods = blocks.iter().map(|&b| block_module(c, b)).collect::<Result<Vec<_>>>()?;
            let sizes: Vec<usize> = mods.iter().map(|m| m.rank()).collect();
            let mut place = Vec::with_capacity(blocks.len());
            for (i, &b) in blocks.iter().enumerate() {
                place.push(i * k + offset(c, b, mf, ca, cb)?);
            }
            let j = placement(&ring, k * blocks.len(), &sizes, &place);
            Body::Summand { blocks: vec![Block::Generator; blocks.len()], witness: push_witness(witness, &j)? }
        }
        Body::Extension { claim, witness, left, right } => Body::Extension {
            claim: claim.clone(),
            witness: witness.clone(),
            left: Box::new(rewrite(left, mf, gen, ca, cb)?),
            right: Box::new(rewrite(right, mf, gen, ca, cb)?),
        },
    };
    Ok(BallCertificate {
        mode: Mode::Additive,
        ideal: c.ideal.clone(),
        generator: gen.clone(),
        level: c.level,
        target: c.target.clone(),
        body,
    })
}

/// Turns a certificate for `[M]_n` over `S/(x)` into one for
/// `|M ⊕ S/(x) ⊕ ΩM|_n`, sending `Ω^i M` to `M` or `ΩM` by parity.
pub fn lemma5_rewrite(c: &BallCertificate, mf: &MatrixFactorization) -> Result<BallCertificate> {
    let ring = c.ring().clone();
    check_same_ideal(&c.ideal, std::slice::from_ref(&mf.f), &ring)?;
    let ca = PresentedModule::new(vec![mf.f.clone()], mf.a.clone())?;
    let cb = PresentedModule::new(vec![mf.f.clone()], mf.b.clone())?;
    if !c.generator.module.same_module(&ca) {
        return Err(Error::NotExpressible("generator is not the cokernel of the factorization".into()));
    }
    let gen = Generator::plain(lemma5_generator(mf)?);
    rewrite(c, mf, &gen, &ca, &cb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::cert_verify;
    use crate::matfac::SummandWitness;
    use crate::poly::Ring;

    fn setup() -> (MatrixFactorization, Generator) {
        let r = Ring::qxy();
        let mf = MatrixFactorization::new(
            r.p("x^2 + y^3"),
            PolyMatrix::lit(&r, &[&["x", "y"], &["-y^2", "x"]]),
            PolyMatrix::lit(&r, &[&["x", "-y"], &["y^2", "x"]]),
        )
        .unwrap();
        let g = Generator::from_mf(&mf, 3).unwrap();
        (mf, g)
    }

    fn leaf(mf: &MatrixFactorization, g: &Generator, b: Block) -> BallCertificate {
        let c0 = BallCertificate::identity(Mode::Closed, vec![mf.f.clone()], g.clone());
        let target = block_module(&c0, b).unwrap();
        let n = target.rank();
        BallCertificate {
            target,
            body: Body::Summand { blocks: vec![b], witness: SummandWitness::identity(mf.ring(), n) },
            ..c0
        }
    }

    fn single_placement(c: &BallCertificate) -> PolyMatrix {
        match &c.body {
            Body::Summand { witness, .. } => witness.n.clone(),
            _ => panic!(),
        }
    }

    #[test]
    fn leaves() {
        let (mf, g) = setup();
        let r = mf.ring().clone();
        for (b, row) in [(Block::Omega(0), 0), (Block::Omega(3), 3), (Block::Ring, 2), (Block::Omega(2), 0)] {
            let c = leaf(&mf, &g, b);
            assert!(cert_verify(&c).unwrap());
            let out = lemma5_rewrite(&c, &mf).unwrap();
            assert_eq!(out.mode, Mode::Additive);
            assert_eq!(out.level, c.level);
            assert!(cert_verify(&out).unwrap());
            let n = single_placement(&out);
            assert_eq!(n.get(row, 0), &r.p("1"), "{b:?}");
        }
    }

    #[test]
    fn wrong_generator() {
        let (mf, g) = setup();
        let c = leaf(&mf, &g, Block::Omega(1));
        let other = mf.transpose();
        assert!(lemma5_rewrite(&c, &other).is_err());
    }
}
