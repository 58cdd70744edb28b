//! Buchberger's algorithm for submodules of free modules.
//!
//! Pairs are processed by the sugar strategy (smallest sugar degree first,
//! then smallest lcm in the module order, then generator indices). Only
//! Buchberger's two criteria are used: the coprime criterion (ideal case
//! only) and the chain criterion.

use std::cmp::Ordering;
use std::collections::HashSet;

use super::vector::{axpy, cmp_pos_mono, MTerm, ModVec};
use crate::poly::{Monomial, RingRef};

fn find_divisor(basis: &[ModVec], pos: usize, mono: &Monomial) -> Option<usize> {
    basis.iter().position(|b| {
        let l = &b.terms[0];
        l.pos == pos && l.mono.divides(mono)
    })
}

/// Full normal form of `f` with respect to `basis` (all elements nonzero).
pub(crate) fn reduce_full(ring: &RingRef, f: &ModVec, basis: &[ModVec]) -> ModVec {
    let field = &ring.field;
    let mut g: Vec<MTerm> = f.terms.clone();
    let mut start = 0;
    let mut rem: Vec<MTerm> = Vec::new();
    while start < g.len() {
        let lt = &g[start];
        match find_divisor(basis, lt.pos, &lt.mono) {
            Some(k) => {
                let b = &basis[k];
                let lb = &b.terms[0];
                let c = field.div(&lt.coeff, &lb.coeff);
                let t = lb.mono.quotient_of(&lt.mono);
                g = axpy(ring, &g[start..], &c, &t, b);
                start = 0;
            }
            None => {
                rem.push(g[start].clone());
                start += 1;
            }
        }
    }
    ModVec { terms: rem }
}

struct Pair {
    i: usize,
    j: usize,
    pos: usize,
    lcm: Monomial,
    sugar: u32,
}

fn total_degree(v: &ModVec) -> u32 {
    v.terms.iter().map(|t| t.mono.degree()).max().unwrap_or(0)
}

/// Reduced Gröbner basis, sorted by increasing leading term.
pub(crate) fn groebner(ring: &RingRef, gens: &[ModVec], rank: usize) -> Vec<ModVec> {
    let order = ring.order;
    let mut basis: Vec<ModVec> = Vec::new();
    let mut sugars: Vec<u32> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();

    let add = |h: ModVec,
               sugar: u32,
               basis: &mut Vec<ModVec>,
               sugars: &mut Vec<u32>,
               pairs: &mut Vec<Pair>,
               pending: &mut HashSet<(usize, usize)>| {
        let idx = basis.len();
        let lh = h.terms[0].clone();
        for (i, b) in basis.iter().enumerate() {
            let lb = &b.terms[0];
            if lb.pos == lh.pos {
                let lcm = lb.mono.lcm(&lh.mono);
                let d = lcm.degree();
                let sugar = (sugars[i] + d - lb.mono.degree()).max(sugar + d - lh.mono.degree());
                pairs.push(Pair { i, j: idx, pos: lh.pos, lcm, sugar });
                pending.insert((i, idx));
            }
        }
        basis.push(h);
        sugars.push(sugar);
    };

    for g in gens {
        let r = reduce_full(ring, g, &basis);
        if !r.is_zero() {
            let s = total_degree(g).max(total_degree(&r));
            add(r.monic(ring), s, &mut basis, &mut sugars, &mut pairs, &mut pending);
        }
    }

    while !pairs.is_empty() {
        let mut best = 0;
        for k in 1..pairs.len() {
            let (a, b) = (&pairs[k], &pairs[best]);
            let c = a
                .sugar
                .cmp(&b.sugar)
                .then_with(|| cmp_pos_mono(order, a.pos, &a.lcm, b.pos, &b.lcm))
                .then((a.i, a.j).cmp(&(b.i, b.j)));
            if c == Ordering::Less {
                best = k;
            }
        }
        let pair = pairs.swap_remove(best);
        pending.remove(&(pair.i, pair.j));
        let (li, lj) = (&basis[pair.i].terms[0], &basis[pair.j].terms[0]);

        if rank == 1 && li.mono.coprime(&lj.mono) {
            continue;
        }
        let chain = (0..basis.len()).any(|k| {
            if k == pair.i || k == pair.j {
                return false;
            }
            let lk = &basis[k].terms[0];
            lk.pos == pair.pos
                && lk.mono.divides(&pair.lcm)
                && !pending.contains(&(pair.i.min(k), pair.i.max(k)))
                && !pending.contains(&(pair.j.min(k), pair.j.max(k)))
        });
        if chain {
            continue;
        }

        let one = ring.field.one();
        let fi = basis[pair.i].mul_term(ring, &li.mono.quotient_of(&pair.lcm), &one);
        let s = ModVec { terms: axpy(ring, &fi.terms, &one, &lj.mono.quotient_of(&pair.lcm), &basis[pair.j]) };
        let r = reduce_full(ring, &s, &basis);
        if !r.is_zero() {
            add(r.monic(ring), pair.sugar, &mut basis, &mut sugars, &mut pairs, &mut pending);
        }
    }

    interreduce(ring, basis)
}

/// Minimalizes, tail-reduces, normalizes and sorts a Gröbner basis.
pub(crate) fn interreduce(ring: &RingRef, basis: Vec<ModVec>) -> Vec<ModVec> {
    let order = ring.order;
    let n = basis.len();
    let mut keep = vec![true; n];
    for i in 0..n {
        let li = &basis[i].terms[0];
        for j in 0..n {
            if i == j || !keep[j] {
                continue;
            }
            let lj = &basis[j].terms[0];
            if lj.pos == li.pos && lj.mono.divides(&li.mono) && (lj.mono != li.mono || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<ModVec> = basis.into_iter().zip(keep).filter(|(_, k)| *k).map(|(b, _)| b).collect();
    let mut out: Vec<ModVec> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<ModVec> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, b)| b.clone())
            .collect();
        out.push(reduce_full(ring, &minimal[i], &others).monic(ring));
    }
    out.sort_by(|a, b| {
        let (la, lb) = (&a.terms[0], &b.terms[0]);
        cmp_pos_mono(order, la.pos, &la.mono, lb.pos, &lb.mono)
    });
    out
}
