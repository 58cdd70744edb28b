use std::collections::BTreeMap;

use proptest::prelude::*;

use mfstar::ball::{cert_verify, lemma4_cert_scale, lemma5_rewrite, theorem0_certify, BallCertificate, Generator, Mode};
use mfstar::catalog::a_series;
use mfstar::field::Field;
use mfstar::groebner::{groebner_basis, ideal_basis, lift_solve, module_kernel};
use mfstar::json::{cert_from_json, cert_to_json, matrix_from_json, matrix_to_json, poly_from_json, poly_to_json};
use mfstar::matfac::{lemma4_summand_scale, mf_from_presentation, mf_syzygy, mf_verify, MatrixFactorization, SummandWitness};
use mfstar::matrix::{FreeVector, PolyMatrix};
use mfstar::module::{exact_check, summand_check, ExactSequenceClaim, ModuleMorphism, PresentedModule};
use mfstar::oracle::{macaulay_quotient_dims, standard_monomial_counts};
use mfstar::poly::{Monomial, MonomialOrder, Polynomial, Ring, RingRef, Term};
use mfstar::star::{lemma3_sequence, reduce_c, star_reassociate, FilteredModule, Layer};

fn qxy() -> RingRef {
    Ring::qxy()
}

fn fp(p: u64) -> RingRef {
    Ring::new(&["x", "y"], Field::prime(p).unwrap(), MonomialOrder::Grevlex)
}

fn build(r: &RingRef, terms: &[(u32, u32, i64)]) -> Polynomial {
    let ts = terms
        .iter()
        .map(|&(i, j, c)| Term { mono: Monomial::from_slice(&[i, j]), coeff: r.field.from_i64(c) })
        .collect();
    Polynomial::from_terms(r, ts)
}

fn terms(max_deg: u32, len: usize) -> impl Strategy<Value = Vec<(u32, u32, i64)>> {
    prop::collection::vec((0..=max_deg, 0..=max_deg, -4i64..=4), 0..=len)
}

fn nonzero_terms(max_deg: u32, len: usize) -> impl Strategy<Value = Vec<(u32, u32, i64)>> {
    terms(max_deg, len).prop_filter("nonzero", |t| !build(&qxy(), t).is_zero())
}

fn homogeneous(deg: u32) -> impl Strategy<Value = Vec<(u32, i64)>> {
    prop::collection::vec((0..=deg, -4i64..=4), 1..=4)
}

fn block(r: &RingRef, t: &[Vec<(u32, u32, i64)>]) -> PolyMatrix {
    PolyMatrix::from_rows(r, vec![vec![build(r, &t[0]), build(r, &t[1])], vec![build(r, &t[2]), build(r, &t[3])]]).unwrap()
}

fn two_a_layers(r: &RingRef, b: PolyMatrix) -> FilteredModule {
    let (m1, m2) = (a_series(r, 2, 1).unwrap(), a_series(r, 4, 1).unwrap());
    let mut blocks = BTreeMap::new();
    blocks.insert((0, 1), b);
    FilteredModule::new(vec![m1.f.clone(), m2.f.clone()], vec![Layer::Mf(m1), Layer::Mf(m2)], blocks).unwrap()
}

fn identity_input(mf: &MatrixFactorization, depth: usize) -> (MatrixFactorization, usize, BallCertificate) {
    let g = Generator::from_mf(mf, depth).unwrap();
    (mf.clone(), depth, BallCertificate::identity(Mode::Closed, vec![mf.f.clone()], g))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn ring_axioms(a in terms(3, 5), b in terms(3, 5), c in terms(3, 5)) {
        let r = qxy();
        let (a, b, c) = (build(&r, &a), build(&r, &b), build(&r, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn canonical_form_is_idempotent(a in terms(4, 8)) {
        let r = qxy();
        let p = build(&r, &a);
        prop_assert!(p.is_canonical());
        prop_assert_eq!(p.normalized(), p.clone());
        prop_assert_eq!(Polynomial::from_terms(&r, p.terms().to_vec()), p);
    }

    #[test]
    fn reduction_mod_p_commutes_with_products(a in terms(3, 5), b in terms(3, 5)) {
        let (q, f) = (qxy(), fp(101));
        let (a, b) = (build(&q, &a), build(&q, &b));
        let lhs = (&a * &b).change_field(&f).unwrap();
        let rhs = &a.change_field(&f).unwrap() * &b.change_field(&f).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_round_trip(a in terms(4, 6), t in prop::collection::vec(terms(2, 3), 4)) {
        let r = qxy();
        let p = build(&r, &a);
        prop_assert_eq!(poly_from_json(&r, &poly_to_json(&p)).unwrap(), p);
        let m = block(&r, &t);
        prop_assert_eq!(matrix_from_json(&r, &matrix_to_json(&m)).unwrap(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn groebner_basis_is_canonical(gens in prop::collection::vec(nonzero_terms(3, 3), 1..=3), rot in 0usize..3) {
        let r = qxy();
        let gens: Vec<Polynomial> = gens.iter().map(|t| build(&r, t)).collect();
        let mut shuffled = gens.clone();
        shuffled.reverse();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        prop_assert_eq!(ideal_basis(&r, &gens).unwrap(), ideal_basis(&r, &shuffled).unwrap());
    }

    #[test]
    fn membership_matches_lifting(cols in prop::collection::vec(prop::collection::vec(terms(2, 3), 2), 1..=3), v in prop::collection::vec(terms(3, 4), 2)) {
        let r = qxy();
        let cols: Vec<FreeVector> = cols.iter().map(|c| FreeVector::new(&r, c.iter().map(|t| build(&r, t)).collect()).unwrap()).collect();
        let a = PolyMatrix::from_columns(&r, 2, &cols).unwrap();
        let v = FreeVector::new(&r, v.iter().map(|t| build(&r, t)).collect()).unwrap();
        let gb = groebner_basis(&r, &cols, 2).unwrap();
        let member = gb.normal_form(&v).unwrap().is_zero();
        let lift = lift_solve(&a, &v, &[]).unwrap();
        prop_assert_eq!(member, lift.is_some());
        if let Some(x) = lift {
            prop_assert_eq!(a.mul_vec(&x).unwrap(), v);
        }
    }

    #[test]
    fn kernel_generators_are_syzygies(t in prop::collection::vec(terms(2, 3), 4), modulo in nonzero_terms(3, 3)) {
        let r = qxy();
        let a = block(&r, &t);
        let m = build(&r, &modulo);
        let gb = groebner_basis(&r, &mfstar::groebner::modulo_relations(&r, std::slice::from_ref(&m), 2), 2).unwrap();
        for g in module_kernel(&a, std::slice::from_ref(&m)).unwrap() {
            prop_assert!(gb.normal_form(&a.mul_vec(&g).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn hilbert_function_matches_macaulay(gens in prop::collection::vec((1u32..=3, homogeneous(3)), 1..=3)) {
        let r = fp(101);
        let polys: Vec<Polynomial> = gens
            .iter()
            .map(|(d, ts)| build(&r, &ts.iter().map(|&(i, c)| (i.min(*d), d - i.min(*d), c)).collect::<Vec<_>>()))
            .filter(|p| !p.is_zero())
            .collect();
        prop_assume!(!polys.is_empty());
        let gb = ideal_basis(&r, &polys).unwrap();
        let leads: Vec<Monomial> = gb.leading_terms().into_iter().map(|(_, m)| m).collect();
        prop_assert_eq!(standard_monomial_counts(&leads, 2, 8), macaulay_quotient_dims(&polys, 2, 101, 8).unwrap());
    }

    #[test]
    fn exactness_survives_change_of_presentation(c in terms(2, 3), d in terms(2, 3)) {
        // 0 -> S/(x) -y-> S/(xy) -> S/(y) -> 0, with presentations twisted by elementary operations
        let r = qxy();
        let (c, d) = (build(&r, &c), build(&r, &d));
        let left = PresentedModule::new(vec![], PolyMatrix::lit(&r, &[&["x"]])).unwrap();
        let mid = PresentedModule::new(vec![], PolyMatrix::lit(&r, &[&["x*y"]])).unwrap();
        let right = PresentedModule::new(vec![], PolyMatrix::lit(&r, &[&["y"]])).unwrap();
        let base = ExactSequenceClaim::short(left, mid, right, PolyMatrix::lit(&r, &[&["y"]]), PolyMatrix::lit(&r, &[&["1"]])).unwrap();
        prop_assert!(exact_check(&base).unwrap());

        // middle: generators (e, e') with e' = c e, relations [xy, e' - c e] and a redundant column d(xy)
        let one = Polynomial::one(&r);
        let zero = Polynomial::zero(&r);
        let p = PolyMatrix::from_rows(&r, vec![
            vec![r.p("x*y"), c.neg(), &d * &r.p("x*y")],
            vec![zero.clone(), one.clone(), zero],
        ]).unwrap();
        let mid2 = PresentedModule::new(vec![], p).unwrap();
        let f = PolyMatrix::from_rows(&r, vec![vec![r.p("y")], vec![Polynomial::zero(&r)]]).unwrap();
        let g = PolyMatrix::from_rows(&r, vec![vec![one, c.clone()]]).unwrap();
        let twisted = ExactSequenceClaim::short(base.modules[0].clone(), mid2, base.modules[2].clone(), f, g).unwrap();
        prop_assert!(exact_check(&twisted).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn a_series_identities(m in 1u32..=8) {
        let r = qxy();
        for j in 1..=m {
            let mf = a_series(&r, m, j).unwrap();
            let f = PolyMatrix::scalar(&r, 2, &mf.f);
            prop_assert_eq!(mf.a.checked_mul(&mf.b).unwrap(), f.clone());
            prop_assert_eq!(mf.b.checked_mul(&mf.a).unwrap(), f);
            prop_assert!(module_kernel(&mf.a, &[]).unwrap().is_empty());
            prop_assert!(module_kernel(&mf.b, &[]).unwrap().is_empty());
            prop_assert_eq!(mf_syzygy(&mf_syzygy(&mf)), mf.clone());
            prop_assert!(mf_verify(&mf.transpose()).unwrap());
            prop_assert_eq!(mf_from_presentation(&mf.a, &mf.f).unwrap().b, mf.b.clone());
        }
    }

    #[test]
    fn scaled_summands_split(m in 1u32..=4, x in nonzero_terms(2, 2)) {
        let r = qxy();
        let x = build(&r, &x);
        let mf = a_series(&r, m, 1).unwrap();
        // Cok A is a summand of Cok(A ⊕ B)
        let big = PolyMatrix::block_diag(&r, &[&mf.a, &mf.b]);
        let mut n = PolyMatrix::zero(&r, 4, 2);
        n.set_block(0, 0, &PolyMatrix::identity(&r, 2));
        let wit = SummandWitness { n: n.clone(), e: n.transpose() };
        let out = lemma4_summand_scale(&big, &mf.a, &wit, &x).unwrap();
        let small = out.summand.clone();
        let nn = ModuleMorphism::new(small.clone(), out.ambient.clone(), out.witness.n.clone()).unwrap();
        let ee = ModuleMorphism::new(out.ambient.clone(), small.clone(), out.witness.e.clone()).unwrap();
        prop_assert!(summand_check(&nn, &ee).unwrap());
        prop_assert_eq!(out.ambient.rank(), 4 + out.k);
        // a split injection is in particular injective
        let claim = ExactSequenceClaim::new(vec![small, out.ambient], vec![out.witness.n], true, false).unwrap();
        prop_assert!(exact_check(&claim).unwrap());
    }

    #[test]
    fn block_reduction_and_sequences(t in prop::collection::vec(terms(2, 2), 4)) {
        let r = qxy();
        let fm = two_a_layers(&r, block(&r, &t));
        let red = reduce_c(&fm).unwrap();
        let gb = ideal_basis(&r, &[fm.annihilator()]).unwrap();
        let ucv = red.u.checked_mul(&red.c).unwrap().checked_mul(&red.v).unwrap();
        prop_assert_eq!(ucv.map_entries(|e| gb.reduce_poly(e)).unwrap(), red.reduced.clone());
        let out = lemma3_sequence(&fm).unwrap();
        prop_assert!(exact_check(&out.claim).unwrap());
        prop_assert_eq!(out.claim.modules[2].rank(), out.p);
    }

    #[test]
    fn reassociation_keeps_the_presentation(t in prop::collection::vec(-3i64..=3, 3)) {
        let r = qxy();
        let xs: Vec<Polynomial> = ["x", "y", "x + y"].iter().map(|s| r.p(s)).collect();
        let layers = xs.iter().map(|x| Layer::Mf(MatrixFactorization::trivial(x))).collect();
        let mut blocks = BTreeMap::new();
        for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            blocks.insert((i, j), PolyMatrix::scalar(&r, 1, &Polynomial::from_i64(&r, t[k])));
        }
        let fm = FilteredModule::new(xs, layers, blocks).unwrap();
        for k in 1..3 {
            prop_assert_eq!(star_reassociate(&fm, k).unwrap().regrouped.assemble_presentation(), fm.assemble_presentation());
        }
    }

    #[test]
    fn certificates_keep_levels_and_modes(t in prop::collection::vec(terms(1, 2), 4), d1 in 0usize..=1, d2 in 0usize..=1) {
        let r = qxy();
        let (m1, m2) = (a_series(&r, 2, 1).unwrap(), a_series(&r, 4, 1).unwrap());
        let fm = two_a_layers(&r, block(&r, &t));
        let rep = theorem0_certify(&fm, &[identity_input(&m1, d1), identity_input(&m2, d2)]).unwrap();
        prop_assert_eq!(rep.level, d1.max(d2) + 2);
        prop_assert!(cert_verify(&rep.certificate).unwrap());
        prop_assert_eq!(cert_from_json(&r, &cert_to_json(&rep.certificate)).unwrap(), rep.certificate.clone());
        // an additive certificate is also a closed one
        let mut closed = rep.certificate.clone();
        fn set_mode(c: &mut BallCertificate) {
            c.mode = Mode::Closed;
            if let mfstar::ball::Body::Extension { left, right, .. } = &mut c.body {
                set_mode(left);
                set_mode(right);
            }
        }
        set_mode(&mut closed);
        prop_assert!(cert_verify(&closed).unwrap());

        // scaling and rewriting keep the level and the target
        let c = identity_input(&m1, d1).2.with_target(PresentedModule::new(vec![m1.f.clone()], m1.a.clone()).unwrap()).unwrap();
        let x = r.p("y");
        let scaled = lemma4_cert_scale(&c, &m1.b, &x).unwrap();
        prop_assert_eq!(scaled.level, c.level);
        prop_assert!(cert_verify(&scaled).unwrap());
        let h = MatrixFactorization::new(
            &x * &m1.f,
            PolyMatrix::block_diag(&r, &[&m1.a.scale(&x), &m1.b.scale(&x), &PolyMatrix::scalar(&r, 1, &x)]),
            PolyMatrix::block_diag(&r, &[&m1.b, &m1.a, &PolyMatrix::scalar(&r, 1, &m1.f)]),
        ).unwrap();
        let rewritten = lemma5_rewrite(&scaled, &h).unwrap();
        prop_assert_eq!(rewritten.level, scaled.level);
        prop_assert!(rewritten.target.same_module(&scaled.target));
        prop_assert!(cert_verify(&rewritten).unwrap());
    }
}
