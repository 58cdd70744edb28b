//! Sparse term lists for elements of free modules, ordered position-over-term.

use std::cmp::Ordering;

use crate::field::Scalar;
use crate::matrix::FreeVector;
use crate::poly::{MonomialOrder, Monomial, Polynomial, RingRef, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct MTerm {
    pub pos: usize,
    pub mono: Monomial,
    pub coeff: Scalar,
}

/// Module element as terms sorted by decreasing module order. Lower
/// positions dominate higher ones; within a position the ring order decides.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub(crate) struct ModVec {
    pub terms: Vec<MTerm>,
}

pub(crate) fn cmp_pos_mono(order: MonomialOrder, pa: usize, ma: &Monomial, pb: usize, mb: &Monomial) -> Ordering {
    match pb.cmp(&pa) {
        Ordering::Equal => order.cmp(ma, mb),
        o => o,
    }
}

impl ModVec {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_free(v: &FreeVector, offset: usize) -> ModVec {
        let mut terms = Vec::new();
        for (i, c) in v.comps().iter().enumerate() {
            for t in c.terms() {
                terms.push(MTerm { pos: offset + i, mono: t.mono.clone(), coeff: t.coeff.clone() });
            }
        }
        // components are visited in increasing position, each already sorted
        ModVec { terms }
    }

    /// Appends a unit term at `pos`, which must be larger than every existing position.
    pub fn push_unit(&mut self, ring: &RingRef, pos: usize) {
        self.terms.push(MTerm { pos, mono: Monomial::one(ring.nvars()), coeff: ring.field.one() });
    }

    /// Components `offset .. offset + rank` as a free vector.
    pub fn to_free(&self, ring: &RingRef, offset: usize, rank: usize) -> FreeVector {
        let mut comps: Vec<Vec<Term>> = vec![Vec::new(); rank];
        for t in &self.terms {
            if t.pos >= offset && t.pos < offset + rank {
                comps[t.pos - offset].push(Term { mono: t.mono.clone(), coeff: t.coeff.clone() });
            }
        }
        FreeVector::new(ring, comps.into_iter().map(|ts| Polynomial::from_sorted(ring, ts)).collect())
            .expect("same ring")
    }

    pub fn max_pos_below(&self, bound: usize) -> bool {
        self.terms.iter().any(|t| t.pos < bound)
    }

    pub fn monic(mut self, ring: &RingRef) -> ModVec {
        if let Some(l) = self.terms.first() {
            let f = &ring.field;
            if !f.is_one(&l.coeff) {
                let inv = f.inv(&l.coeff);
                for t in &mut self.terms {
                    t.coeff = f.mul(&t.coeff, &inv);
                }
            }
        }
        self
    }

    pub fn mul_term(&self, ring: &RingRef, mono: &Monomial, c: &Scalar) -> ModVec {
        let f = &ring.field;
        ModVec {
            terms: self
                .terms
                .iter()
                .map(|t| MTerm { pos: t.pos, mono: t.mono.mul(mono), coeff: f.mul(&t.coeff, c) })
                .collect(),
        }
    }

    pub fn neg(&self, ring: &RingRef) -> ModVec {
        let f = &ring.field;
        ModVec { terms: self.terms.iter().map(|t| MTerm { pos: t.pos, mono: t.mono.clone(), coeff: f.neg(&t.coeff) }).collect() }
    }
}

/// `a - c * mono * b`, with `a` given as a slice of sorted terms.
pub(crate) fn axpy(ring: &RingRef, a: &[MTerm], c: &Scalar, mono: &Monomial, b: &ModVec) -> Vec<MTerm> {
    let f = &ring.field;
    let order = ring.order;
    let mut out = Vec::with_capacity(a.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    let next_b = |j: &mut usize| -> Option<MTerm> {
        let t = b.terms.get(*j)?;
        *j += 1;
        Some(MTerm { pos: t.pos, mono: t.mono.mul(mono), coeff: f.neg(&f.mul(&t.coeff, c)) })
    };
    let mut scaled = next_b(&mut j);
    while i < a.len() {
        let Some(sb) = scaled.as_ref() else { break };
        let ta = &a[i];
        match cmp_pos_mono(order, ta.pos, &ta.mono, sb.pos, &sb.mono) {
            Ordering::Greater => {
                out.push(ta.clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(scaled.take().unwrap());
                scaled = next_b(&mut j);
            }
            Ordering::Equal => {
                let s = f.add(&ta.coeff, &sb.coeff);
                if !f.is_zero(&s) {
                    out.push(MTerm { pos: ta.pos, mono: ta.mono.clone(), coeff: s });
                }
                i += 1;
                scaled = next_b(&mut j);
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    if let Some(s) = scaled {
        out.push(s);
    }
    while let Some(s) = next_b(&mut j) {
        out.push(s);
    }
    out
}
