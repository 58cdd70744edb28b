use super::lemma5::lemma5_generator;
use super::{
    cert_direct_sum_all, cert_verify, ideal_contained, lemma4_cert_scale, lemma5_rewrite, placement, rebase, BallCertificate, Block,
    Body, Generator, Mode,
};
use crate::error::{Error, Result};
use crate::matfac::{MatrixFactorization, SummandWitness};
use crate::matrix::PolyMatrix;
use crate::module::PresentedModule;
use crate::star::{lemma3_sequence, product, FilteredModule};

/// A certificate that the assembled module lies in `|K|_level`, with the
/// bounds it implies on the radius and the size of the extension category.
#[derive(Clone, Debug)]
pub struct RadiusReport {
    pub generator: PresentedModule,
    pub level: usize,
    pub certificate: BallCertificate,
    pub radius_bound: usize,
    pub size_bound: usize,
    pub statement: String,
}

/// Builds `K_i` for each layer and the certificate of `Cok(x_1⋯x_{i-1} A_i)`
/// in `|K_i|_{d_i+1}` over `S/(x_1⋯x_i)`.
fn layer_certificate(
    fm: &FilteredModule,
    i: usize,
    g: &MatrixFactorization,
    c: &BallCertificate,
) -> Result<(PresentedModule, BallCertificate)> {
    let ring = fm.ring().clone();
    let xs = fm.xs();
    if g.f != xs[i] {
        return Err(Error::InvalidFactorization(format!("generator {} factors a different element", i + 1)));
    }
    if !cert_verify(c)? {
        return Err(Error::InvalidWitness(format!("certificate {} does not verify", i + 1)));
    }
    let a_i = PresentedModule::new(vec![xs[i].clone()], fm.layers()[i].a().clone())?;
    let c = c.clone().with_target(a_i)?;
    let xp = product(&ring, xs, 0, i);
    let scaled = lemma4_cert_scale(&c, &g.b, &xp)?;
    // H_i in MF(x' x_i) via diag(x'P, x'Q, x'), diag(Q, P, x_i)
    let one = |p: &crate::poly::Polynomial| PolyMatrix::scalar(&ring, 1, p);
    let h_mf = MatrixFactorization::new(
        &xp * &xs[i],
        PolyMatrix::block_diag(&ring, &[&g.a.scale(&xp), &g.b.scale(&xp), &one(&xp)]),
        PolyMatrix::block_diag(&ring, &[&g.b, &g.a, &one(&xs[i])]),
    )?;
    let out = lemma5_rewrite(&scaled, &h_mf)?;
    Ok((lemma5_generator(&h_mf)?, out))
}

/// Certifies `M ∈ |⊕K_i ⊕ ⊕_{i≥2} S/(x_i⋯x_n)|_{d+2}` for the module of a
/// filtered module, given certificates `Cok A_i ∈ [G_i]_{d_i+1}` over `S/(x_i)`.
pub fn theorem0_certify(fm: &FilteredModule, gens: &[(MatrixFactorization, usize, BallCertificate)]) -> Result<RadiusReport> {
    let ring = fm.ring().clone();
    let n = fm.len();
    if gens.len() != n {
        return Err(Error::shape(format!("{} generators for {} layers", gens.len(), n)));
    }
    let xs = fm.xs();
    let total = fm.annihilator();
    let ideal = vec![total.clone()];
    let mut d = 0;
    let mut ks = Vec::with_capacity(n);
    let mut certs = Vec::with_capacity(n);
    for (i, (g, di, c)) in gens.iter().enumerate() {
        if c.level > di + 1 {
            return Err(Error::InvalidWitness(format!("certificate {} exceeds level {}", i + 1, di + 1)));
        }
        let (k, cert) = layer_certificate(fm, i, g, c)?;
        d = d.max(*di);
        ks.push(k);
        certs.push(cert);
    }
    // free tails S/(x_i⋯x_n), i ≥ 2
    let tails: Vec<PresentedModule> = (1..n)
        .map(|i| PresentedModule::free(&ring, vec![product(&ring, xs, i, n)], 1))
        .collect::<Result<_>>()?;
    let parts: Vec<&PresentedModule> = ks.iter().chain(tails.iter()).collect();
    let full: Vec<PolyMatrix> = parts.iter().map(|p| p.full_presentation()).collect();
    let refs: Vec<&PolyMatrix> = full.iter().collect();
    let k_total = PresentedModule::new(ideal.clone(), PolyMatrix::block_diag(&ring, &refs))?;
    let kt_rank = k_total.rank();
    let generator = Generator::plain(k_total.clone());
    let offsets: Vec<usize> = parts
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.rank();
            Some(o)
        })
        .collect();

    let mut rebased = Vec::with_capacity(n);
    for (i, c) in certs.iter().enumerate() {
        if !ideal_contained(&ideal, &c.ideal, &ring)? {
            return Err(Error::internal("layer ring does not contain the total ring"));
        }
        let j = placement(&ring, kt_rank, &[ks[i].rank()], &[offsets[i]]);
        let embed = SummandWitness { n: j.clone(), e: j.transpose() };
        rebased.push(rebase(c, ideal.clone(), generator.clone(), &embed)?.promote(d + 1));
    }
    let left = cert_direct_sum_all(&rebased)?;

    let l3 = lemma3_sequence(fm)?;
    let m = fm.module();
    let certificate = if n == 1 {
        left.with_target(m)?
    } else {
        let claim = l3.claim;
        let left = left.with_target(claim.modules[0].clone())?;
        let right_mod = claim.modules[2].clone();
        // (S/(x_j⋯x_n))^{p_j} through the tail components of K
        let sizes: Vec<usize> = fm.layers()[1..].iter().map(|l| l.rows()).collect();
        let mut place = Vec::new();
        let mut blocks = 0;
        for (j, &pj) in sizes.iter().enumerate() {
            for _ in 0..pj {
                place.push(blocks * kt_rank + offsets[n + j]);
                blocks += 1;
            }
        }
        let jm = placement(&ring, blocks * kt_rank, &vec![1; blocks], &place);
        let right = BallCertificate {
            mode: Mode::Additive,
            ideal: ideal.clone(),
            generator: generator.clone(),
            level: 1,
            target: right_mod,
            body: Body::Summand { blocks: vec![Block::Generator; blocks], witness: SummandWitness { n: jm.clone(), e: jm.transpose() } },
        };
        let mr = m.rank();
        let inc = PolyMatrix::vstack(&ring, mr, &[&PolyMatrix::identity(&ring, mr), &PolyMatrix::zero(&ring, l3.p, mr)])?;
        let witness = SummandWitness { n: inc.clone(), e: inc.transpose() };
        BallCertificate {
            mode: Mode::Additive,
            ideal: ideal.clone(),
            generator,
            level: d + 2,
            target: m,
            body: Body::Extension { claim, witness, left: Box::new(left), right: Box::new(right) },
        }
    };
    if !cert_verify(&certificate)? {
        return Err(Error::internal("assembled certificate does not verify"));
    }
    let level = certificate.level;
    Ok(RadiusReport {
        generator: k_total,
        level,
        certificate,
        radius_bound: d + 1,
        size_bound: d + 1,
        statement: format!(
            "module lies in |K|_{level}; the extension category has radius at most {} and size at most {}",
            d + 1,
            d + 1
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Ring;
    use std::collections::BTreeMap;

    use crate::star::Layer;

    fn identity_gen(mf: &MatrixFactorization) -> (MatrixFactorization, usize, BallCertificate) {
        let c = BallCertificate::identity(Mode::Closed, vec![mf.f.clone()], Generator::from_mf(mf, 0).unwrap());
        (mf.clone(), 0, c)
    }

    #[test]
    fn one_layer() {
        let r = Ring::qxy();
        let f = r.p("x^2 + y^3");
        let mf = MatrixFactorization::trivial(&f);
        let fm = FilteredModule::new(vec![f.clone()], vec![Layer::Mf(mf.clone())], BTreeMap::new()).unwrap();
        let rep = theorem0_certify(&fm, &[identity_gen(&mf)]).unwrap();
        assert_eq!(rep.level, 1);
        assert_eq!(rep.certificate.mode, Mode::Additive);
    }

    #[test]
    fn two_cyclic_layers() {
        let r = Ring::qxy();
        let (f1, f2) = (r.p("x^2 + y^3"), r.p("x^2 + y^5"));
        let (m1, m2) = (MatrixFactorization::trivial(&f1), MatrixFactorization::trivial(&f2));
        let mut blocks = BTreeMap::new();
        blocks.insert((0, 1), PolyMatrix::identity(&r, 1));
        let fm = FilteredModule::new(vec![f1, f2], vec![Layer::Mf(m1.clone()), Layer::Mf(m2.clone())], blocks).unwrap();
        let rep = theorem0_certify(&fm, &[identity_gen(&m1), identity_gen(&m2)]).unwrap();
        assert_eq!(rep.level, 2);
        assert_eq!(rep.certificate.depth(), 2);
        assert!(cert_verify(&rep.certificate).unwrap());
        assert!(rep.certificate.target.same_module(&fm.module()));
    }

    #[test]
    fn two_rank_two_layers() {
        let r = Ring::qxy();
        let mk = |f: &str, a: &[&[&str]], b: &[&[&str]]| MatrixFactorization::new(r.p(f), PolyMatrix::lit(&r, a), PolyMatrix::lit(&r, b)).unwrap();
        let m1 = mk("x^2 + y^2", &[&["x", "y"], &["-y", "x"]], &[&["x", "-y"], &["y", "x"]]);
        let m2 = mk("x^2 + y^4", &[&["x", "y"], &["-y^3", "x"]], &[&["x", "-y"], &["y^3", "x"]]);
        let mut blocks = BTreeMap::new();
        blocks.insert((0, 1), PolyMatrix::identity(&r, 2));
        let fm = FilteredModule::new(vec![m1.f.clone(), m2.f.clone()], vec![Layer::Mf(m1.clone()), Layer::Mf(m2.clone())], blocks).unwrap();
        let rep = theorem0_certify(&fm, &[identity_gen(&m1), identity_gen(&m2)]).unwrap();
        assert_eq!(rep.level, 2);
        assert_eq!(rep.radius_bound, 1);
    }
}
