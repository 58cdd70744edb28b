use super::{product, FilteredModule};
use crate::error::{Error, Result};
use crate::groebner::{ideal_basis, GroebnerBasis};
use crate::matrix::PolyMatrix;
use crate::module::{exact_check, ExactSequenceClaim, PresentedModule};
use crate::poly::{Polynomial, RingRef};

/// An elementary block operation. Block indices are zero-based.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockOp {
    /// Block column `dst` += block column `src` times `factor`.
    AddCol { src: usize, dst: usize, factor: PolyMatrix },
    /// Block row `dst` += `factor` times block row `src`.
    AddRow { src: usize, dst: usize, factor: PolyMatrix },
    /// New block column `k` is old block column `perm[k]`.
    PermuteCols(Vec<usize>),
}

fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    out.push(0);
    for s in sizes {
        acc += s;
        out.push(acc);
    }
    out
}

/// Matrix with a block partition of rows and columns.
struct Blocked {
    m: PolyMatrix,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Blocked {
    fn col_block(&self, k: usize) -> PolyMatrix {
        let c = offsets(&self.cols);
        self.m.block(0, c[k], self.m.rows(), self.cols[k])
    }

    fn row_block(&self, k: usize) -> PolyMatrix {
        let r = offsets(&self.rows);
        self.m.block(r[k], 0, self.rows[k], self.m.cols())
    }

    fn add_col(&mut self, src: usize, dst: usize, factor: &PolyMatrix) -> Result<()> {
        let add = self.col_block(src).checked_mul(factor)?;
        let sum = self.col_block(dst).checked_add(&add)?;
        let c = offsets(&self.cols);
        self.m.set_block(0, c[dst], &sum);
        Ok(())
    }

    fn add_row(&mut self, src: usize, dst: usize, factor: &PolyMatrix) -> Result<()> {
        let add = factor.checked_mul(&self.row_block(src))?;
        let sum = self.row_block(dst).checked_add(&add)?;
        let r = offsets(&self.rows);
        self.m.set_block(r[dst], 0, &sum);
        Ok(())
    }

    fn permute_cols(&mut self, perm: &[usize]) {
        let parts: Vec<PolyMatrix> = perm.iter().map(|&k| self.col_block(k)).collect();
        let refs: Vec<&PolyMatrix> = parts.iter().collect();
        self.m = PolyMatrix::hstack(self.m.ring(), self.m.rows(), &refs).expect("consistent blocks");
        self.cols = perm.iter().map(|&k| self.cols[k]).collect();
    }

    fn apply(&mut self, op: &BlockOp) -> Result<()> {
        match op {
            BlockOp::AddCol { src, dst, factor } => self.add_col(*src, *dst, factor),
            BlockOp::AddRow { src, dst, factor } => self.add_row(*src, *dst, factor),
            BlockOp::PermuteCols(p) => {
                self.permute_cols(p);
                Ok(())
            }
        }
    }
}

fn row_sizes(fm: &FilteredModule) -> Vec<usize> {
    let n = fm.len();
    let mut v: Vec<usize> = fm.layers().iter().map(|l| l.rows()).collect();
    v.extend((1..n).map(|j| fm.layers()[j].rows()));
    v
}

fn col_sizes(fm: &FilteredModule) -> Vec<usize> {
    let n = fm.len();
    let mut v: Vec<usize> = fm.layers().iter().map(|l| l.cols()).collect();
    v.extend((1..n).map(|j| fm.layers()[j].rows()));
    v
}

/// The `(2n-1) x (2n-1)` block matrix with left diagonal blocks
/// `x_1 ... x_{i-1} A_i`, right block column `n+j-1` carrying
/// `A_1j, ..., A_{j-1,j}, A_j`, and bottom diagonal `x_j ... x_n E`.
pub fn build_c(fm: &FilteredModule) -> Result<PolyMatrix> {
    let n = fm.len();
    if n < 2 {
        return Err(Error::shape("the block matrix needs at least two layers"));
    }
    let ring = fm.ring();
    let xs = fm.xs();
    let (rs, cs) = (offsets(&row_sizes(fm)), offsets(&col_sizes(fm)));
    let mut c = PolyMatrix::zero(ring, rs[2 * n - 1], cs[2 * n - 1]);
    for i in 0..n {
        c.set_block(rs[i], cs[i], &fm.layers()[i].a().scale(&product(ring, xs, 0, i)));
    }
    for j in 1..n {
        let col = n + j - 1;
        for (i, &r0) in rs.iter().enumerate().take(j) {
            c.set_block(r0, cs[col], &fm.block(i, j));
        }
        c.set_block(rs[j], cs[col], fm.layers()[j].a());
        let pj = fm.layers()[j].rows();
        c.set_block(rs[col], cs[col], &PolyMatrix::scalar(ring, pj, &product(ring, xs, j, n)));
    }
    Ok(c)
}

/// Record of the reduction `U C V = diag(A, 0)` modulo `x_1 ... x_n`.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub c: PolyMatrix,
    pub u: PolyMatrix,
    pub v: PolyMatrix,
    pub u_inv: PolyMatrix,
    pub log: Vec<BlockOp>,
    /// `U C V` with entries reduced modulo `x_1 ... x_n`.
    pub reduced: PolyMatrix,
}

fn reduce_entries(m: &PolyMatrix, gb: &GroebnerBasis) -> Result<PolyMatrix> {
    m.map_entries(|e| gb.reduce_poly(e))
}

/// Runs the seven block equivalences turning `C` into `diag(A, 0)`.
pub fn reduce_c(fm: &FilteredModule) -> Result<Reduction> {
    let n = fm.len();
    let ring = fm.ring().clone();
    let xs = fm.xs();
    let c = build_c(fm)?;
    let mate = |i: usize| fm.layers()[i].mate().clone();
    let mut log: Vec<BlockOp> = Vec::new();
    let mut push = |op: BlockOp| {
        let zero = match &op {
            BlockOp::AddCol { factor, .. } | BlockOp::AddRow { factor, .. } => factor.is_zero(),
            BlockOp::PermuteCols(_) => false,
        };
        if !zero {
            log.push(op);
        }
    };

    // clear block columns n, n-1, ..., 2 against their partners n+j-1
    for j in (1..n).rev() {
        let pj = fm.layers()[j].rows();
        push(BlockOp::AddCol {
            src: n + j - 1,
            dst: j,
            factor: PolyMatrix::scalar(&ring, pj, &product(&ring, xs, 0, j)).neg(),
        });
        for k in 0..j {
            let factor = mate(k)
                .scale(&product(&ring, xs, k + 1, j))
                .checked_mul(&fm.block(k, j))?;
            push(BlockOp::AddCol { src: k, dst: j, factor });
        }
    }
    // clear the bottom block rows n+i-1 using rows i and n+k-1
    for i in 1..n {
        push(BlockOp::AddRow { src: i, dst: n + i - 1, factor: mate(i).scale(&product(&ring, xs, i + 1, n)).neg() });
        for k in i + 1..n {
            let factor = mate(i).scale(&product(&ring, xs, i + 1, k)).checked_mul(&fm.block(i, k))?;
            push(BlockOp::AddRow { src: n + k - 1, dst: n + i - 1, factor });
        }
    }
    let mut perm = vec![0];
    perm.extend(n..2 * n - 1);
    perm.extend(1..n);
    push(BlockOp::PermuteCols(perm));

    let rsz = row_sizes(fm);
    let csz = col_sizes(fm);
    let mut work = Blocked { m: c.clone(), rows: rsz.clone(), cols: csz.clone() };
    let mut u = Blocked { m: PolyMatrix::identity(&ring, c.rows()), rows: rsz.clone(), cols: rsz.clone() };
    let mut u_inv = Blocked { m: PolyMatrix::identity(&ring, c.rows()), rows: rsz.clone(), cols: rsz };
    let mut v = Blocked { m: PolyMatrix::identity(&ring, c.cols()), rows: csz.clone(), cols: csz };
    for op in &log {
        work.apply(op)?;
        match op {
            BlockOp::AddRow { src, dst, factor } => {
                u.add_row(*src, *dst, factor)?;
                u_inv.add_col(*dst, *src, &factor.neg())?;
            }
            _ => v.apply(op)?,
        }
    }

    let gb = ideal_basis(&ring, &[fm.annihilator()])?;
    let reduced = reduce_entries(&work.m, &gb)?;
    let ucv = u.m.checked_mul(&c)?.checked_mul(&v.m)?;
    if reduce_entries(&ucv, &gb)? != reduced {
        return Err(Error::internal("replayed transformations disagree with the reduction"));
    }
    let a = fm.assemble_presentation();
    let mut target = PolyMatrix::zero(&ring, c.rows(), c.cols());
    target.set_block(0, 0, &reduce_entries(&a, &gb)?);
    if reduced != target {
        return Err(Error::internal("U C V differs from diag(A, 0)"));
    }
    Ok(Reduction { c, u: u.m, v: v.m, u_inv: u_inv.m, log, reduced })
}

/// The exact sequence
/// `0 -> ⊕ Cok(x_1...x_{i-1} A_i) -> M ⊕ (S/(x_1...x_n))^p -> ⊕_{i>=2} (S/(x_i...x_n))^{p_i} -> 0`.
#[derive(Clone, Debug)]
pub struct Lemma3Output {
    pub claim: ExactSequenceClaim,
    pub p: usize,
    pub reduction: Option<Reduction>,
    /// Hypotheses of the construction that actually held on this input.
    pub hypotheses: Vec<String>,
}

fn hypotheses(fm: &FilteredModule) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (i, l) in fm.layers().iter().enumerate() {
        let square = l.a().is_square();
        let kernel_free = crate::groebner::module_kernel(l.a(), &[])?.is_empty();
        out.push(format!(
            "layer {}: {}, kernel {}",
            i + 1,
            if square { "square" } else { "rectangular" },
            if kernel_free { "zero" } else { "nonzero" }
        ));
    }
    Ok(out)
}

fn reduce_matrix(ring: &RingRef, m: &PolyMatrix, modulo: &Polynomial) -> Result<PolyMatrix> {
    reduce_entries(m, &ideal_basis(ring, std::slice::from_ref(modulo))?)
}

pub fn lemma3_sequence(fm: &FilteredModule) -> Result<Lemma3Output> {
    let ring = fm.ring().clone();
    let n = fm.len();
    let xs = fm.xs();
    let total = fm.annihilator();
    let hyp = hypotheses(fm)?;
    if n == 1 {
        let a1 = fm.layers()[0].a().clone();
        let m = fm.module();
        let left = PresentedModule::new(vec![total.clone()], a1)?;
        let claim = ExactSequenceClaim::new(vec![left, m.clone()], vec![PolyMatrix::identity(&ring, m.rank())], true, true)?;
        if !exact_check(&claim)? {
            return Err(Error::internal("trivial sequence is not exact"));
        }
        return Ok(Lemma3Output { claim, p: 0, reduction: None, hypotheses: hyp });
    }

    let red = reduce_c(fm)?;
    let sizes: Vec<usize> = fm.layers().iter().map(|l| l.rows()).collect();
    let top: usize = sizes.iter().sum();
    let p: usize = sizes[1..].iter().sum();

    let d_blocks: Vec<PolyMatrix> = (0..n).map(|i| fm.layers()[i].a().scale(&product(&ring, xs, 0, i))).collect();
    let d_refs: Vec<&PolyMatrix> = d_blocks.iter().collect();
    let d = PolyMatrix::block_diag(&ring, &d_refs);
    let f_blocks: Vec<PolyMatrix> = (1..n).map(|j| PolyMatrix::scalar(&ring, sizes[j], &product(&ring, xs, j, n))).collect();
    let f_refs: Vec<&PolyMatrix> = f_blocks.iter().collect();
    let f = PolyMatrix::block_diag(&ring, &f_refs);

    let a = fm.assemble_presentation();
    let mid_pres = PolyMatrix::block_diag(&ring, &[&a, &PolyMatrix::zero(&ring, p, p)]);
    let left = PresentedModule::new(vec![total.clone()], d)?;
    let mid = PresentedModule::new(vec![total.clone()], mid_pres)?;
    let right = PresentedModule::new(vec![total.clone()], f)?;

    let mut inc = PolyMatrix::zero(&ring, top + p, top);
    inc.set_block(0, 0, &PolyMatrix::identity(&ring, top));
    let mut proj = PolyMatrix::zero(&ring, p, top + p);
    proj.set_block(0, top, &PolyMatrix::identity(&ring, p));
    let g1 = reduce_matrix(&ring, &red.u.checked_mul(&inc)?, &total)?;
    let g2 = reduce_matrix(&ring, &proj.checked_mul(&red.u_inv)?, &total)?;

    let claim = ExactSequenceClaim::short(left, mid, right, g1, g2)?;
    if !exact_check(&claim)? {
        return Err(Error::internal("four-term sequence failed the exactness check"));
    }
    Ok(Lemma3Output { claim, p, reduction: Some(red), hypotheses: hyp })
}
