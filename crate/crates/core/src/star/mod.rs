//! Filtered modules: iterated extensions of matrix factorization modules,
//! their horseshoe presentations, the colon filtration, the block matrix
//! reduction producing the four-term exact sequence, and reassociation of
//! iterated extensions.

mod filtration;
mod reassoc;
mod reduce;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matfac::{mf_verify, MatrixFactorization};
use crate::matrix::PolyMatrix;
use crate::module::PresentedModule;
use crate::poly::{check_ring, Polynomial, RingRef};

pub use filtration::{compute_filtration, Filtration};
pub use reassoc::{star_reassociate, star_reassociate_back, Reassociation};
pub use reduce::{build_c, lemma3_sequence, reduce_c, BlockOp, Lemma3Output, Reduction};

/// A layer of a filtration: a matrix factorization of its element, or for
/// the first layer a possibly rectangular presentation with a right mate.
#[derive(Clone, Debug, PartialEq)]
pub enum Layer {
    Mf(MatrixFactorization),
    Rect { a: PolyMatrix, b_right: PolyMatrix },
}

impl Layer {
    pub fn a(&self) -> &PolyMatrix {
        match self {
            Layer::Mf(mf) => &mf.a,
            Layer::Rect { a, .. } => a,
        }
    }

    /// Matrix `B` with `A B = x E`.
    pub fn mate(&self) -> &PolyMatrix {
        match self {
            Layer::Mf(mf) => &mf.b,
            Layer::Rect { b_right, .. } => b_right,
        }
    }

    /// Number of generators.
    pub fn rows(&self) -> usize {
        self.a().rows()
    }

    /// Number of relations.
    pub fn cols(&self) -> usize {
        self.a().cols()
    }
}

/// Layers `A_1, ..., A_n` for elements `x_1, ..., x_n` and extension blocks
/// `A_ij` (`i < j`, zero when absent). Indices are zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredModule {
    xs: Vec<Polynomial>,
    layers: Vec<Layer>,
    blocks: BTreeMap<(usize, usize), PolyMatrix>,
}

/// `x_a x_{a+1} ... x_{b-1}` (one when `a >= b`).
pub(crate) fn product(ring: &RingRef, xs: &[Polynomial], a: usize, b: usize) -> Polynomial {
    let mut p = Polynomial::one(ring);
    for x in xs.iter().take(b).skip(a) {
        p = &p * x;
    }
    p
}

impl FilteredModule {
    pub fn new(xs: Vec<Polynomial>, layers: Vec<Layer>, blocks: BTreeMap<(usize, usize), PolyMatrix>) -> Result<Self> {
        let n = xs.len();
        if n == 0 || layers.len() != n {
            return Err(Error::shape(format!("{} elements for {} layers", n, layers.len())));
        }
        let ring = xs[0].ring().clone();
        for (i, x) in xs.iter().enumerate() {
            check_ring(&ring, x.ring())?;
            if x.is_zero() {
                return Err(Error::ZeroElement(format!("x_{}", i + 1)));
            }
        }
        for (i, layer) in layers.iter().enumerate() {
            match layer {
                Layer::Mf(mf) => {
                    check_ring(&ring, mf.ring())?;
                    if mf.f != xs[i] {
                        return Err(Error::InvalidFactorization(format!("layer {} factors a different element", i + 1)));
                    }
                    if !mf_verify(mf)? {
                        return Err(Error::InvalidFactorization(format!("layer {}", i + 1)));
                    }
                }
                Layer::Rect { a, b_right } => {
                    if i != 0 {
                        return Err(Error::shape(format!("layer {} must be a matrix factorization", i + 1)));
                    }
                    check_ring(&ring, a.ring())?;
                    let prod = a.checked_mul(b_right)?;
                    if prod != PolyMatrix::scalar(&ring, a.rows(), &xs[0]) {
                        return Err(Error::MissingMates("A_1 B_1 = x_1 E fails".into()));
                    }
                }
            }
        }
        for (&(i, j), b) in &blocks {
            if i >= j || j >= n {
                return Err(Error::shape(format!("block ({}, {}) out of range", i + 1, j + 1)));
            }
            check_ring(&ring, b.ring())?;
            if b.shape() != (layers[i].rows(), layers[j].cols()) {
                return Err(Error::shape(format!("block ({}, {}) has shape {:?}", i + 1, j + 1, b.shape())));
            }
        }
        let blocks = blocks.into_iter().filter(|(_, b)| !b.is_zero()).collect();
        Ok(FilteredModule { xs, layers, blocks })
    }

    pub fn ring(&self) -> &RingRef {
        self.xs[0].ring()
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[Polynomial] {
        &self.xs
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), PolyMatrix> {
        &self.blocks
    }

    /// `A_ij`, zero when absent.
    pub fn block(&self, i: usize, j: usize) -> PolyMatrix {
        self.blocks
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| PolyMatrix::zero(self.ring(), self.layers[i].rows(), self.layers[j].cols()))
    }

    /// `x_1 ... x_n`.
    pub fn annihilator(&self) -> Polynomial {
        product(self.ring(), &self.xs, 0, self.len())
    }

    /// Upper block triangular presentation with diagonal `A_i` and blocks `A_ij`.
    pub fn assemble_presentation(&self) -> PolyMatrix {
        self.assemble_range(0, self.len())
    }

    /// Presentation of the subquotient carried by layers `a..b`.
    pub fn assemble_range(&self, a: usize, b: usize) -> PolyMatrix {
        let rows: usize = self.layers[a..b].iter().map(Layer::rows).sum();
        let cols: usize = self.layers[a..b].iter().map(Layer::cols).sum();
        let mut out = PolyMatrix::zero(self.ring(), rows, cols);
        let mut r0 = 0;
        for i in a..b {
            let mut c0 = 0;
            for j in a..b {
                if j == i {
                    out.set_block(r0, c0, self.layers[i].a());
                } else if let Some(blk) = self.blocks.get(&(i, j)) {
                    out.set_block(r0, c0, blk);
                }
                c0 += self.layers[j].cols();
            }
            r0 += self.layers[i].rows();
        }
        out
    }

    /// The subquotient on layers `a..b` as a filtered module.
    pub fn sub(&self, a: usize, b: usize) -> Result<FilteredModule> {
        if a >= b || b > self.len() {
            return Err(Error::BadSplit { k: a, n: self.len() });
        }
        let blocks = self
            .blocks
            .iter()
            .filter(|(&(i, j), _)| i >= a && j < b)
            .map(|(&(i, j), m)| ((i - a, j - a), m.clone()))
            .collect();
        FilteredModule::new(self.xs[a..b].to_vec(), self.layers[a..b].to_vec(), blocks)
    }

    /// `Cok A` over `S/(x_1 ... x_n)`.
    pub fn module(&self) -> PresentedModule {
        PresentedModule::new(vec![self.annihilator()], self.assemble_presentation()).expect("same ring")
    }

    /// Whether `x_1 ... x_n` kills `Cok A` over `S`.
    pub fn is_annihilated(&self) -> Result<bool> {
        PresentedModule::new(vec![], self.assemble_presentation())?.annihilated_by(&self.annihilator())
    }
}
