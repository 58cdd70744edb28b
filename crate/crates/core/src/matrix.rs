//! Dense matrices and column vectors of polynomials.

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::{check_ring, same_ring, Polynomial, RingRef};

/// An element of the free module `S^r`, as a column vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeVector {
    ring: RingRef,
    comps: Vec<Polynomial>,
}

impl FreeVector {
    pub fn new(ring: &RingRef, comps: Vec<Polynomial>) -> Result<Self> {
        for c in &comps {
            check_ring(ring, c.ring())?;
        }
        Ok(FreeVector { ring: ring.clone(), comps })
    }

    pub fn zero(ring: &RingRef, rank: usize) -> Self {
        FreeVector { ring: ring.clone(), comps: vec![Polynomial::zero(ring); rank] }
    }

    pub fn unit(ring: &RingRef, rank: usize, i: usize) -> Self {
        let mut v = Self::zero(ring, rank);
        v.comps[i] = Polynomial::one(ring);
        v
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn into_comps(self) -> Vec<Polynomial> {
        self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, p: &Polynomial) -> Self {
        FreeVector { ring: self.ring.clone(), comps: self.comps.iter().map(|c| c * p).collect() }
    }

    pub fn neg(&self) -> Self {
        FreeVector { ring: self.ring.clone(), comps: self.comps.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, other: &FreeVector) -> Self {
        assert_eq!(self.rank(), other.rank());
        FreeVector { ring: self.ring.clone(), comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &FreeVector) -> Self {
        assert_eq!(self.rank(), other.rank());
        FreeVector { ring: self.ring.clone(), comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect() }
    }
}

impl fmt::Debug for FreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.comps.iter()).finish()
    }
}

/// Dense `rows x cols` matrix over a polynomial ring, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyMatrix {
    ring: RingRef,
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn zero(ring: &RingRef, rows: usize, cols: usize) -> Self {
        PolyMatrix { ring: ring.clone(), rows, cols, entries: vec![Polynomial::zero(ring); rows * cols] }
    }

    pub fn identity(ring: &RingRef, n: usize) -> Self {
        Self::scalar(ring, n, &Polynomial::one(ring))
    }

    /// `p * E_n`.
    pub fn scalar(ring: &RingRef, n: usize, p: &Polynomial) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.entries[i * n + i] = p.clone();
        }
        m
    }

    pub fn from_rows(ring: &RingRef, rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::shape("ragged rows"));
            }
            for e in row {
                check_ring(ring, e.ring())?;
                entries.push(e);
            }
        }
        Ok(PolyMatrix { ring: ring.clone(), rows: r, cols: c, entries })
    }

    /// Parses a matrix from string literals, e.g. `&[&["x", "y"], &["-y^2", "x"]]`.
    pub fn parse(ring: &RingRef, rows: &[&[&str]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(ring, rows)
    }

    /// Panicking variant of [`PolyMatrix::parse`] for literals.
    pub fn lit(ring: &RingRef, rows: &[&[&str]]) -> Self {
        Self::parse(ring, rows).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn from_columns(ring: &RingRef, rows: usize, cols: &[FreeVector]) -> Result<Self> {
        let mut m = Self::zero(ring, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.rank() != rows {
                return Err(Error::Rank { expected: rows, found: c.rank() });
            }
            check_ring(ring, c.ring())?;
            for i in 0..rows {
                m.entries[i * cols.len() + j] = c.comps()[i].clone();
            }
        }
        Ok(m)
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn column(&self, j: usize) -> FreeVector {
        FreeVector { ring: self.ring.clone(), comps: (0..self.rows).map(|i| self.get(i, j).clone()).collect() }
    }

    pub fn columns(&self) -> Vec<FreeVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Polynomial> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn checked_mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        check_ring(&self.ring, &other.ring)?;
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = PolyMatrix::zero(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &FreeVector) -> Result<FreeVector> {
        if v.rank() != self.cols {
            return Err(Error::Rank { expected: self.cols, found: v.rank() });
        }
        check_ring(&self.ring, v.ring())?;
        let comps = (0..self.rows)
            .map(|i| {
                let mut acc = Polynomial::zero(&self.ring);
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), &v.comps()[k]);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect();
        Ok(FreeVector { ring: self.ring.clone(), comps })
    }

    fn zip_with(&self, other: &PolyMatrix, f: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> Result<PolyMatrix> {
        check_ring(&self.ring, &other.ring)?;
        if self.shape() != other.shape() {
            return Err(Error::shape(format!("{:?} vs {:?}", self.shape(), other.shape())));
        }
        Ok(PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn checked_add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, p: &Polynomial) -> PolyMatrix {
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * p).collect(),
        }
    }

    pub fn neg(&self) -> PolyMatrix {
        PolyMatrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zero(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn block_diag(ring: &RingRef, blocks: &[&PolyMatrix]) -> PolyMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = PolyMatrix::zero(ring, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn hstack(ring: &RingRef, rows: usize, parts: &[&PolyMatrix]) -> Result<PolyMatrix> {
        let cols = parts.iter().map(|b| b.cols).sum();
        let mut out = PolyMatrix::zero(ring, rows, cols);
        let mut c0 = 0;
        for b in parts {
            if b.rows != rows {
                return Err(Error::shape("hstack row mismatch"));
            }
            out.set_block(0, c0, b);
            c0 += b.cols;
        }
        Ok(out)
    }

    pub fn vstack(ring: &RingRef, cols: usize, parts: &[&PolyMatrix]) -> Result<PolyMatrix> {
        let rows = parts.iter().map(|b| b.rows).sum();
        let mut out = PolyMatrix::zero(ring, rows, cols);
        let mut r0 = 0;
        for b in parts {
            if b.cols != cols {
                return Err(Error::shape("vstack column mismatch"));
            }
            out.set_block(r0, 0, b);
            r0 += b.rows;
        }
        Ok(out)
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &PolyMatrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> PolyMatrix {
        let mut out = PolyMatrix::zero(&self.ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    /// Selects the given columns, in order.
    pub fn select_columns(&self, idx: &[usize]) -> PolyMatrix {
        let mut out = PolyMatrix::zero(&self.ring, self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn map_entries(&self, f: impl Fn(&Polynomial) -> Result<Polynomial>) -> Result<PolyMatrix> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        let ring = entries.first().map(|e| e.ring().clone()).unwrap_or_else(|| self.ring.clone());
        Ok(PolyMatrix { ring, rows: self.rows, cols: self.cols, entries })
    }

    /// Moves all entries to a ring with the same variables (e.g. Q to F_p).
    pub fn change_field(&self, target: &RingRef) -> Result<PolyMatrix> {
        let mut m = self.map_entries(|e| e.change_field(target))?;
        m.ring = target.clone();
        Ok(m)
    }

    pub fn same_ring_as(&self, ring: &RingRef) -> bool {
        same_ring(&self.ring, ring)
    }
}

/// Exact matrix product.
pub fn mat_mul(a: &PolyMatrix, b: &PolyMatrix) -> Result<PolyMatrix> {
    a.checked_mul(b)
}

impl std::ops::Mul for &PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl std::ops::Add for &PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl std::ops::Sub for &PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, rhs: &PolyMatrix) -> PolyMatrix {
        self.checked_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}
