//! Truncated linear algebra over a prime field, used as an independent
//! cross-check of Gröbner-based verdicts.
//!
//! A module `S^m / R` is approximated degree by degree: coordinates are the
//! monomial multiples `t e_i` of degree at most a witness bound `W`, and the
//! relations are spanned by all monomial multiples of relation generators
//! within that bound. Echelon forms put high-degree coordinates first, so
//! rows whose pivot has degree `<= d` span the intersection with `S^m_{<=d}`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{FreeVector, PolyMatrix};
use crate::module::{ExactSequenceClaim, PresentedModule};
use crate::poly::{Monomial, Polynomial};

type Row = Vec<(u32, u32)>;

fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e, m) = (a as u64, p as u64 - 2, p as u64);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u32
}

/// `a - c * b` on sparse rows sorted by column.
fn row_axpy(a: &Row, c: u32, b: &Row, p: u32) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let nc = p - c % p;
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(u32::MAX, |t| t.0);
        let cb = b.get(j).map_or(u32::MAX, |t| t.0);
        if ca < cb {
            out.push(a[i]);
            i += 1;
        } else if cb < ca {
            out.push((cb, mul_mod(b[j].1, nc, p)));
            j += 1;
        } else {
            let v = ((a[i].1 as u64 + mul_mod(b[j].1, nc, p) as u64) % p as u64) as u32;
            if v != 0 {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row echelon form built by insertion; pivot rows have leading entry 1.
#[derive(Default)]
struct Echelon {
    p: u32,
    rows: Vec<Row>,
    pivot: HashMap<u32, usize>,
}

impl Echelon {
    fn new(p: u32) -> Self {
        Echelon { p, rows: Vec::new(), pivot: HashMap::new() }
    }

    fn reduce(&self, mut r: Row) -> Row {
        let mut k = 0;
        while k < r.len() {
            let (c, v) = r[k];
            match self.pivot.get(&c) {
                Some(&idx) => {
                    let head = r[..k].to_vec();
                    let tail = row_axpy(&r[k..].to_vec(), v, &self.rows[idx], self.p);
                    r = head;
                    r.extend(tail);
                }
                None => k += 1,
            }
        }
        r
    }

    /// Reduces only the leading entry until it hits a free column.
    fn insert(&mut self, mut r: Row) -> bool {
        while let Some(&(c, v)) = r.first() {
            match self.pivot.get(&c) {
                Some(&idx) => r = row_axpy(&r, v, &self.rows[idx], self.p),
                None => {
                    let inv = inv_mod(v, self.p);
                    for t in &mut r {
                        t.1 = mul_mod(t.1, inv, self.p);
                    }
                    self.pivot.insert(c, self.rows.len());
                    self.rows.push(r);
                    return true;
                }
            }
        }
        false
    }

    fn contains(&self, r: Row) -> bool {
        self.reduce(r).is_empty()
    }

    fn leads(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows.iter().map(|r| r[0].0)
    }
}

/// Coordinates `t e_i` with `deg t <= bound`, ordered by descending degree,
/// placed after `offset` earlier coordinates.
struct Grid {
    bound: u32,
    offset: u32,
    index: HashMap<(usize, Monomial), u32>,
    degree: Vec<u32>,
}

fn monomials_up_to(nvars: usize, bound: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() == nvars {
            out.push(Monomial::from_slice(cur));
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(nvars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(nvars, bound, &mut Vec::new(), &mut out);
    out
}

impl Grid {
    fn new(nvars: usize, rank: usize, bound: u32, offset: u32) -> Grid {
        let monos = monomials_up_to(nvars, bound);
        let mut coords: Vec<(u32, usize, Monomial)> = Vec::new();
        for i in 0..rank {
            for m in &monos {
                coords.push((m.degree(), i, m.clone()));
            }
        }
        coords.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2 .0.cmp(&b.2 .0)));
        let mut index = HashMap::new();
        let mut degree = Vec::with_capacity(coords.len());
        for (k, (d, i, m)) in coords.into_iter().enumerate() {
            index.insert((i, m), offset + k as u32);
            degree.push(d);
        }
        Grid { bound, offset, index, degree }
    }

    fn len(&self) -> u32 {
        self.degree.len() as u32
    }

    fn degree_of(&self, col: u32) -> u32 {
        self.degree[(col - self.offset) as usize]
    }

    fn contains_col(&self, col: u32) -> bool {
        col >= self.offset && col < self.offset + self.len()
    }

    fn count_upto(&self, d: u32) -> usize {
        self.degree.iter().filter(|&&g| g <= d).count()
    }

    /// Coordinates of `t * v`, or `None` if it leaves the grid.
    fn encode(&self, v: &[Polynomial], t: &Monomial, p: u32) -> Result<Option<Row>> {
        let mut row = Vec::new();
        for (i, c) in v.iter().enumerate() {
            for term in c.terms() {
                let m = term.mono.mul(t);
                let Some(&col) = self.index.get(&(i, m)) else { return Ok(None) };
                let val = match Field::reduce_mod(&term.coeff, p) {
                    Some(crate::field::Scalar::Mod(v)) => v,
                    _ => return Err(Error::Field(format!("coefficient {} has no image mod {p}", term.coeff))),
                };
                if val != 0 {
                    row.push((col, val));
                }
            }
        }
        row.sort_by_key(|e| e.0);
        Ok(Some(row))
    }
}

fn vec_degree(v: &[Polynomial]) -> u32 {
    v.iter().filter_map(|c| c.degree()).max().unwrap_or(0)
}

/// Prime field truncation oracle with degree bound `D` and witness slack.
#[derive(Clone, Debug)]
pub struct TruncationOracle {
    pub p: u32,
    pub degree: u32,
    pub slack: u32,
}

impl TruncationOracle {
    pub fn new(p: u32, degree: u32) -> Result<Self> {
        Field::prime(p as u64)?;
        Ok(TruncationOracle { p, degree, slack: 6 })
    }

    fn witness(&self) -> u32 {
        self.degree + self.slack
    }

    /// Inserts every monomial multiple `t r` within the grid.
    fn add_multiples(&self, ech: &mut Echelon, grid: &Grid, gens: &[Vec<Polynomial>], nvars: usize) -> Result<()> {
        for g in gens {
            let d = vec_degree(g);
            if g.iter().all(|c| c.is_zero()) || d > grid.bound {
                continue;
            }
            for t in monomials_up_to(nvars, grid.bound - d) {
                if let Some(row) = grid.encode(g, &t, self.p)? {
                    ech.insert(row);
                }
            }
        }
        Ok(())
    }

    fn relations(m: &PresentedModule) -> Vec<Vec<Polynomial>> {
        m.relations().into_iter().map(|v| v.into_comps()).collect()
    }

    fn columns(f: &PolyMatrix) -> Vec<Vec<Polynomial>> {
        f.columns().into_iter().map(FreeVector::into_comps).collect()
    }

    /// Echelon of `(F S^n_{<=w} + R) ∩ S^m_{<=bound}` in `grid`.
    fn image_space(&self, f: &PolyMatrix, target: &PresentedModule, grid: &Grid) -> Result<Echelon> {
        let nvars = target.ring().nvars();
        let mut ech = Echelon::new(self.p);
        self.add_multiples(&mut ech, grid, &Self::relations(target), nvars)?;
        self.add_multiples(&mut ech, grid, &Self::columns(f), nvars)?;
        Ok(ech)
    }

    /// Echelon (in `grid` coordinates) of `{b : F b in R_target} + R_source`.
    fn kernel_space(&self, f: &PolyMatrix, source: &PresentedModule, target: &PresentedModule, grid: &Grid) -> Result<Echelon> {
        let nvars = source.ring().nvars();
        let fdeg = f.entries().iter().filter_map(|e| e.degree()).max().unwrap_or(0);
        let tgrid = Grid::new(nvars, target.rank(), grid.bound + fdeg + self.slack, 0);
        let sgrid = Grid::new(nvars, source.rank(), grid.bound, tgrid.len());
        let mut ech = Echelon::new(self.p);
        self.add_multiples(&mut ech, &tgrid, &Self::relations(target), nvars)?;
        for t in monomials_up_to(nvars, grid.bound) {
            for i in 0..source.rank() {
                let e = FreeVector::unit(source.ring(), source.rank(), i);
                let img = f.mul_vec(&e)?.into_comps();
                let Some(mut row) = tgrid.encode(&img, &t, self.p)? else { continue };
                let Some(tail) = sgrid.encode(e.comps(), &t, self.p)? else { continue };
                row.extend(tail);
                ech.insert(row);
            }
        }
        let mut out = Echelon::new(self.p);
        for r in &ech.rows {
            if sgrid.contains_col(r[0].0) {
                let moved: Row = r.iter().map(|&(c, v)| (c - sgrid.offset + grid.offset, v)).collect();
                out.insert(moved);
            }
        }
        self.add_multiples(&mut out, grid, &Self::relations(source), nvars)?;
        Ok(out)
    }

    fn count_upto(ech: &Echelon, grid: &Grid, d: u32) -> usize {
        ech.leads().filter(|&c| grid.degree_of(c) <= d).count()
    }

    /// Truncated verdict for an exact sequence claim, degrees `0..=D`.
    pub fn exact(&self, claim: &ExactSequenceClaim) -> Result<bool> {
        let mods = &claim.modules;
        let maps = &claim.maps;
        let nvars = mods[0].ring().nvars();
        let w = self.witness();
        for (i, f) in maps.iter().enumerate() {
            let fdeg = f.entries().iter().filter_map(|e| e.degree()).max().unwrap_or(0);
            let grid = Grid::new(nvars, mods[i + 1].rank(), w + fdeg, 0);
            let rel = self.image_space(&PolyMatrix::zero(mods[0].ring(), mods[i + 1].rank(), 0), &mods[i + 1], &grid)?;
            for r in Self::relations(&mods[i]) {
                let img = f.mul_vec(&FreeVector::new(mods[0].ring(), r.clone())?)?.into_comps();
                if vec_degree(&r) > self.degree {
                    continue;
                }
                if let Some(row) = grid.encode(&img, &Monomial::one(nvars), self.p)? {
                    if !rel.contains(row) {
                        return Ok(false);
                    }
                }
            }
        }
        for i in 1..maps.len() {
            let grid = Grid::new(nvars, mods[i].rank(), w, 0);
            let z = self.kernel_space(&maps[i], &mods[i], &mods[i + 1], &grid)?;
            let im = self.image_space(&maps[i - 1], &mods[i], &grid)?;
            for r in &im.rows {
                if grid.degree_of(r[0].0) <= self.degree && !z.contains(r.clone()) {
                    return Ok(false);
                }
            }
            for d in 0..=self.degree {
                if Self::count_upto(&z, &grid, d) != Self::count_upto(&im, &grid, d) {
                    return Ok(false);
                }
            }
        }
        if claim.injective && !maps.is_empty() {
            let grid = Grid::new(nvars, mods[0].rank(), w, 0);
            let z = self.kernel_space(&maps[0], &mods[0], &mods[1], &grid)?;
            let rel = self.image_space(&PolyMatrix::zero(mods[0].ring(), mods[0].rank(), 0), &mods[0], &grid)?;
            for d in 0..=self.degree {
                if Self::count_upto(&z, &grid, d) != Self::count_upto(&rel, &grid, d) {
                    return Ok(false);
                }
            }
        }
        if claim.surjective && !maps.is_empty() {
            let last = mods.last().expect("nonempty");
            let grid = Grid::new(nvars, last.rank(), w, 0);
            let im = self.image_space(maps.last().expect("nonempty"), last, &grid)?;
            for d in 0..=self.degree {
                if Self::count_upto(&im, &grid, d) != grid.count_upto(d) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Per-degree dimensions `dim (S/I)_d`, `d = 0..=max_deg`, of a homogeneous
/// ideal via ranks of Macaulay matrices.
pub fn macaulay_quotient_dims(gens: &[Polynomial], nvars: usize, p: u32, max_deg: u32) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for d in 0..=max_deg {
        let grid = Grid::new(nvars, 1, d, 0);
        let mut ech = Echelon::new(p);
        for g in gens {
            let Some(gd) = g.degree() else { continue };
            if gd > d {
                continue;
            }
            for t in monomials_up_to(nvars, d - gd).into_iter().filter(|t| t.degree() == d - gd) {
                if let Some(row) = grid.encode(std::slice::from_ref(g), &t, p)? {
                    ech.insert(row);
                }
            }
        }
        let in_degree = grid.degree.iter().filter(|&&g| g == d).count();
        out.push(in_degree - ech.rows.len());
    }
    Ok(out)
}

/// Per-degree counts of monomials outside a monomial ideal.
pub fn standard_monomial_counts(leads: &[Monomial], nvars: usize, max_deg: u32) -> Vec<usize> {
    (0..=max_deg)
        .map(|d| {
            monomials_up_to(nvars, d)
                .into_iter()
                .filter(|m| m.degree() == d && !leads.iter().any(|l| l.divides(m)))
                .count()
        })
        .collect()
}
