//! Spectral sequence of a finitely weight-filtered complex over GF(2).
//!
//! Generators carry integer weights and are stored grouped by weight, lowest
//! first. The differential is a sum of components `D_r` (`r >= 0`), each
//! sending weight `w` into weight `w + r`; the filtration is
//! `F_w = span{ generators of weight >= w }`, which every `D_r` preserves.
//!
//! Page `r` at weight `w` is
//!
//! ```text
//! E_r^w = (Z_r^w + F_{w+1}) / (B_{r-1}^w + F_{w+1})
//! Z_r^w     = F_w ∩ D^{-1}(F_{w+r})
//! B_{r-1}^w = F_w ∩ D(F_{w-r+1})
//! ```
//!
//! computed with plain subspace arithmetic. The induced `d_r` is evaluated on
//! chosen lifts in `Z_r^w`; only its rank is meaningful, its entries depend on
//! the lifts.
//!
//! Complexes whose only component is `D_1` take a shortcut: `E_1` is the
//! chain group itself, `E_2` is the homology of the weight blocks, and the
//! sequence stops there.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::f2linalg::{self, F2Matrix, SparseMatrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecSeqError {
    #[error("component D_{r} from weight {weight}: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    BlockShape {
        r: usize,
        weight: i64,
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("component D_{r} from weight {weight} lands outside the weight range")]
    WeightOutOfRange { r: usize, weight: i64 },
    #[error("supplied block raises weight by {0}; higher maps must raise it by at least 2")]
    WeightViolation(usize),
    #[error("supplied block at rows {row0}.., cols {col0}.. does not fit D_{r} from weight {weight}")]
    BlockPlacement { r: usize, weight: i64, row0: usize, col0: usize },
    #[error("grading has {got} entries for {expected} generators")]
    GradingLength { expected: usize, got: usize },
    #[error("component D_{r} from weight {weight} does not preserve the grading")]
    NotHomogeneous { r: usize, weight: i64 },
    #[error("{dim} generators need a dense {dim}x{dim} differential, over the limit of {limit} bytes")]
    TooLarge { dim: usize, limit: usize },
    #[error("D^2 != 0: {0}")]
    DSquared(DSquaredWitness),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// A generator whose image under `D^2` is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DSquaredWitness {
    pub weight: i64,
    /// Position inside the weight block.
    pub generator: usize,
    /// Weight of the offending part of `D^2` applied to it.
    pub image_weight: i64,
}

impl fmt::Display for DSquaredWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "generator {} of weight {} has nonzero D^2 image in weight {}",
            self.generator, self.weight, self.image_weight
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DSquaredCheck {
    Pass,
    Fail(DSquaredWitness),
}

impl DSquaredCheck {
    pub fn passed(&self) -> bool {
        matches!(self, DSquaredCheck::Pass)
    }
}

/// A component block of a [`FilteredComplex`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Dense(F2Matrix),
    Sparse(SparseMatrix),
}

impl Block {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Block::Dense(m) => m.shape(),
            Block::Sparse(m) => m.shape(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Block::Dense(m) => m.is_zero(),
            Block::Sparse(m) => m.is_zero(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Block::Dense(m) => m.rank(),
            Block::Sparse(m) => m.rank(),
        }
    }

    /// Writes the block into `d` with its top left corner at `(r0, c0)`.
    pub fn paste_into(&self, d: &mut F2Matrix, r0: usize, c0: usize) {
        match self {
            Block::Dense(m) => d.paste(r0, c0, m),
            Block::Sparse(m) => {
                for j in 0..m.cols() {
                    for &i in m.column(j) {
                        d.set(r0 + i as usize, c0 + j, true);
                    }
                }
            }
        }
    }

    pub fn to_dense(&self) -> F2Matrix {
        match self {
            Block::Dense(m) => m.clone(),
            Block::Sparse(m) => m.to_dense(),
        }
    }

    pub fn as_dense(&self) -> Option<&F2Matrix> {
        match self {
            Block::Dense(m) => Some(m),
            Block::Sparse(_) => None,
        }
    }
}

/// Largest dense total differential the general page computation and
/// [`load_higher_maps`] will build.
pub const MAX_DENSE_BYTES: usize = 1 << 28;

fn check_dense_size(n: usize) -> Result<(), SpecSeqError> {
    if n * n.div_ceil(64) * 8 > MAX_DENSE_BYTES {
        return Err(SpecSeqError::TooLarge {
            dim: n,
            limit: MAX_DENSE_BYTES,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredComplex {
    min_weight: i64,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    // (r, source weight) -> block of shape dims[w + r] x dims[w]
    components: BTreeMap<(usize, i64), Block>,
    // optional second grading, one entry per generator, preserved by D
    grading: Option<Vec<i64>>,
}

impl FilteredComplex {
    /// Complex with `dims[i]` generators of weight `min_weight + i` and zero differential.
    pub fn new(min_weight: i64, dims: Vec<usize>) -> Result<Self, SpecSeqError> {
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &d in &dims {
            acc += d;
            offsets.push(acc);
        }
        Ok(Self {
            min_weight,
            dims,
            offsets,
            components: BTreeMap::new(),
            grading: None,
        })
    }

    /// Builds a complex from generators listed with arbitrary weights and a
    /// total differential in that generator order (column = source).
    ///
    /// Returns the complex and, for each input generator, its position in
    /// the weight-sorted order.
    pub fn from_total(weights: &[i64], d: &F2Matrix) -> Result<(Self, Vec<usize>), SpecSeqError> {
        let n = weights.len();
        if d.shape() != (n, n) {
            return Err(SpecSeqError::BlockShape {
                r: 0,
                weight: 0,
                expected_rows: n,
                expected_cols: n,
                rows: d.rows(),
                cols: d.cols(),
            });
        }
        if n == 0 {
            return Ok((Self::new(0, vec![])?, vec![]));
        }
        let lo = *weights.iter().min().unwrap();
        let hi = *weights.iter().max().unwrap();
        let mut dims = vec![0usize; (hi - lo + 1) as usize];
        let mut local = vec![0usize; n];
        for (g, &w) in weights.iter().enumerate() {
            let wi = (w - lo) as usize;
            local[g] = dims[wi];
            dims[wi] += 1;
        }
        let mut fc = Self::new(lo, dims)?;
        let mut blocks: BTreeMap<(usize, i64), F2Matrix> = BTreeMap::new();
        for src in 0..n {
            for dst in f2linalg::ones(&d.column(src)) {
                let (ws, wt) = (weights[src], weights[dst]);
                if wt < ws {
                    return Err(SpecSeqError::WeightOutOfRange {
                        r: 0,
                        weight: ws,
                    });
                }
                let r = (wt - ws) as usize;
                let block = blocks
                    .entry((r, ws))
                    .or_insert_with(|| F2Matrix::zeros(fc.dim(wt), fc.dim(ws)));
                block.toggle(local[dst], local[src]);
            }
        }
        for ((r, w), m) in blocks {
            fc.set_component(r, w, m)?;
        }
        let order = (0..n).map(|g| fc.offset(weights[g]) + local[g]).collect();
        Ok((fc, order))
    }

    pub fn min_weight(&self) -> i64 {
        self.min_weight
    }

    pub fn max_weight(&self) -> i64 {
        self.min_weight + self.dims.len() as i64 - 1
    }

    pub fn weight_range(&self) -> (i64, i64) {
        (self.min_weight(), self.max_weight())
    }

    /// Number of distinct weights minus one.
    pub fn spread(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    /// Generators per weight, lowest weight first.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, w: i64) -> usize {
        self.index(w).map_or(0, |i| self.dims[i])
    }

    pub fn total_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn index(&self, w: i64) -> Option<usize> {
        let i = w - self.min_weight;
        (i >= 0 && (i as usize) < self.dims.len()).then_some(i as usize)
    }

    /// Global position of the first generator of weight `w`.
    pub fn offset(&self, w: i64) -> usize {
        let i = (w - self.min_weight).clamp(0, self.dims.len() as i64) as usize;
        self.offsets[i]
    }

    /// Global index range of the weight-`w` generators.
    pub fn range(&self, w: i64) -> std::ops::Range<usize> {
        self.offset(w)..self.offset(w + 1)
    }

    /// Weight of the generator at global position `g`.
    pub fn weight_of(&self, g: usize) -> i64 {
        let i = self.offsets.partition_point(|&o| o <= g) - 1;
        self.min_weight + i as i64
    }

    pub fn set_component(&mut self, r: usize, w: i64, block: F2Matrix) -> Result<(), SpecSeqError> {
        if self.index(w).is_none() || self.index(w + r as i64).is_none() {
            if block.is_zero() {
                return Ok(());
            }
            return Err(SpecSeqError::WeightOutOfRange { r, weight: w });
        }
        let (er, ec) = (self.dim(w + r as i64), self.dim(w));
        if block.shape() != (er, ec) {
            return Err(SpecSeqError::BlockShape {
                r,
                weight: w,
                expected_rows: er,
                expected_cols: ec,
                rows: block.rows(),
                cols: block.cols(),
            });
        }
        if block.is_zero() {
            self.components.remove(&(r, w));
        } else {
            if let Some(g) = &self.grading {
                let (rows, cols) = (&g[self.range(w + r as i64)], &g[self.range(w)]);
                if !is_homogeneous(&block, rows, cols) {
                    self.grading = None;
                }
            }
            self.components.insert((r, w), Block::Dense(block));
        }
        Ok(())
    }

    /// Like [`set_component`](Self::set_component) for a sparse block.
    pub fn set_sparse_component(&mut self, r: usize, w: i64, block: SparseMatrix) -> Result<(), SpecSeqError> {
        if self.index(w).is_none() || self.index(w + r as i64).is_none() {
            if block.is_zero() {
                return Ok(());
            }
            return Err(SpecSeqError::WeightOutOfRange { r, weight: w });
        }
        let (er, ec) = (self.dim(w + r as i64), self.dim(w));
        if block.shape() != (er, ec) {
            return Err(SpecSeqError::BlockShape {
                r,
                weight: w,
                expected_rows: er,
                expected_cols: ec,
                rows: block.rows(),
                cols: block.cols(),
            });
        }
        if block.is_zero() {
            self.components.remove(&(r, w));
            return Ok(());
        }
        let block = Block::Sparse(block);
        if let Some(g) = &self.grading {
            if !block_respects(&block, &g[self.range(w + r as i64)], &g[self.range(w)]) {
                self.grading = None;
            }
        }
        self.components.insert((r, w), block);
        Ok(())
    }

    /// Attaches a second grading (one value per generator, global order)
    /// that every component preserves. Ranks of `d_1` are then computed one
    /// graded piece at a time. Adding a component that breaks the grading
    /// later drops it.
    pub fn set_grading(&mut self, grades: Vec<i64>) -> Result<(), SpecSeqError> {
        if grades.len() != self.total_dim() {
            return Err(SpecSeqError::GradingLength {
                expected: self.total_dim(),
                got: grades.len(),
            });
        }
        for (&(r, w), b) in &self.components {
            if !block_respects(b, &grades[self.range(w + r as i64)], &grades[self.range(w)]) {
                return Err(SpecSeqError::NotHomogeneous { r, weight: w });
            }
        }
        self.grading = Some(grades);
        Ok(())
    }

    pub fn grading(&self) -> Option<&[i64]> {
        self.grading.as_deref()
    }

    /// Rank of the component `D_r` from weight `w`, split by the grading when there is one.
    pub fn component_rank(&self, r: usize, w: i64) -> usize {
        match (self.component(r, w), &self.grading) {
            (None, _) => 0,
            (Some(Block::Dense(m)), Some(g)) => graded_rank(m, &g[self.range(w + r as i64)], &g[self.range(w)]),
            (Some(Block::Sparse(m)), _) => self.sparse_pivots(w, m, &[]).len(),
            (Some(b), _) => b.rank(),
        }
    }

    // pivot rows of a sparse block from weight w, one grade at a time,
    // leaving out the columns flagged in `skip`
    fn sparse_pivots(&self, w: i64, m: &SparseMatrix, skip: &[bool]) -> Vec<u32> {
        let keep = |j: &usize| !skip.get(*j).copied().unwrap_or(false);
        let groups: Vec<Vec<usize>> = match &self.grading {
            Some(g) => {
                let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
                for (j, &gj) in g[self.range(w)].iter().enumerate().filter(|(j, _)| keep(j)) {
                    groups.entry(gj).or_default().push(j);
                }
                groups.into_values().collect()
            }
            None => vec![(0..m.cols()).filter(keep).collect()],
        };
        groups.into_par_iter().flat_map(|c| m.pivot_rows(c)).collect()
    }

    // ranks of all D_1 components, lowest weight first; needs D^2 = 0, under
    // which the columns of D_1^{w+1} at pivot rows of D_1^w reduce to zero
    fn d1_ranks(&self) -> BTreeMap<i64, usize> {
        let mut ranks = BTreeMap::new();
        let mut cleared: Vec<bool> = Vec::new();
        for w in self.min_weight()..=self.max_weight() {
            match self.component(1, w) {
                Some(Block::Sparse(m)) => {
                    let pivots = self.sparse_pivots(w, m, &cleared);
                    cleared = vec![false; m.rows()];
                    for &p in &pivots {
                        cleared[p as usize] = true;
                    }
                    ranks.insert(w, pivots.len());
                }
                Some(Block::Dense(_)) => {
                    ranks.insert(w, self.component_rank(1, w));
                    cleared.clear();
                }
                None => cleared.clear(),
            }
        }
        ranks
    }

    /// Nonzero components as `((r, source weight), block)`.
    pub fn components(&self) -> impl Iterator<Item = ((usize, i64), &Block)> {
        self.components.iter().map(|(&k, m)| (k, m))
    }

    pub fn component(&self, r: usize, w: i64) -> Option<&Block> {
        self.components.get(&(r, w))
    }

    /// Largest `r` with a nonzero `D_r`.
    pub fn max_shift(&self) -> Option<usize> {
        self.components.keys().map(|&(r, _)| r).max()
    }

    pub fn is_d1_only(&self) -> bool {
        self.components.keys().all(|&(r, _)| r == 1)
    }

    /// The whole differential as one square matrix (column = source).
    pub fn total_differential(&self) -> F2Matrix {
        let n = self.total_dim();
        let mut d = F2Matrix::zeros(n, n);
        for (&(r, w), b) in &self.components {
            b.paste_into(&mut d, self.offset(w + r as i64), self.offset(w));
        }
        d
    }

    /// The whole differential in sparse form.
    pub fn total_sparse(&self) -> SparseMatrix {
        let n = self.total_dim();
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (&(r, w), b) in &self.components {
            let (r0, c0) = (self.offset(w + r as i64), self.offset(w));
            match b {
                Block::Sparse(m) => {
                    for (j, col) in cols[c0..c0 + m.cols()].iter_mut().enumerate() {
                        col.extend(m.column(j).iter().map(|&i| (r0 + i as usize) as u32));
                    }
                }
                Block::Dense(m) => {
                    for i in 0..m.rows() {
                        for j in f2linalg::ones(m.row(i)) {
                            cols[c0 + j].push((r0 + i) as u32);
                        }
                    }
                }
            }
        }
        for c in &mut cols {
            c.sort_unstable();
        }
        SparseMatrix::from_columns(n, cols).expect("components do not overlap")
    }

    /// `dim ker D - rank D`, straight from the total differential.
    pub fn total_homology_dim(&self) -> usize {
        let rank: usize = if self.is_d1_only() {
            self.components.keys().map(|&(r, w)| self.component_rank(r, w)).sum()
        } else {
            self.total_differential().rank()
        };
        self.total_dim() - 2 * rank
    }
}

fn is_homogeneous(m: &F2Matrix, row_grades: &[i64], col_grades: &[i64]) -> bool {
    (0..m.rows()).all(|i| f2linalg::ones(m.row(i)).all(|j| col_grades[j] == row_grades[i]))
}

fn block_respects(b: &Block, row_grades: &[i64], col_grades: &[i64]) -> bool {
    match b {
        Block::Dense(m) => is_homogeneous(m, row_grades, col_grades),
        Block::Sparse(m) => (0..m.cols()).all(|j| m.column(j).iter().all(|&i| row_grades[i as usize] == col_grades[j])),
    }
}

/// Sum of the ranks of the pieces of a homogeneous block, one per grade.
fn graded_rank(m: &F2Matrix, row_grades: &[i64], col_grades: &[i64]) -> usize {
    let mut pieces: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    let mut row_pos = vec![0usize; row_grades.len()];
    let mut col_pos = vec![0usize; col_grades.len()];
    for (i, &g) in row_grades.iter().enumerate() {
        let e = pieces.entry(g).or_default();
        row_pos[i] = e.0;
        e.0 += 1;
    }
    for (j, &g) in col_grades.iter().enumerate() {
        let e = pieces.entry(g).or_default();
        col_pos[j] = e.1;
        e.1 += 1;
    }
    let mut blocks: BTreeMap<i64, F2Matrix> = pieces
        .iter()
        .filter(|(_, &(r, c))| r > 0 && c > 0)
        .map(|(&g, &(r, c))| (g, F2Matrix::zeros(r, c)))
        .collect();
    for i in 0..m.rows() {
        let Some(b) = blocks.get_mut(&row_grades[i]) else {
            continue;
        };
        for j in f2linalg::ones(m.row(i)) {
            b.set(row_pos[i], col_pos[j], true);
        }
    }
    blocks.into_values().collect::<Vec<_>>().into_par_iter().map(|b| b.rank()).sum()
}

/// Checks `D^2 = 0` block by block.
pub fn verify_d_squared(fc: &FilteredComplex) -> DSquaredCheck {
    // (D^2) from weight w to weight w + s is the sum over r of D_{s-r}^{w+r} D_r^w
    let mut terms: BTreeMap<(usize, i64), Vec<(&Block, &Block)>> = BTreeMap::new();
    for (&(r1, w), first) in &fc.components {
        let mid = w + r1 as i64;
        for (&(r2, w2), second) in fc.components.range((0, mid)..) {
            if w2 == mid {
                terms.entry((r1 + r2, w)).or_default().push((second, first));
            }
        }
    }
    let mut witnesses: Vec<DSquaredWitness> = terms
        .into_par_iter()
        .filter_map(|((s, w), pairs)| {
            let generator = match pairs.as_slice() {
                [(second, first)] => product_witness(second, first),
                _ => {
                    let sum = pairs
                        .iter()
                        .map(|(b, a)| b.to_dense().matmul(&a.to_dense()).expect("composable blocks"))
                        .reduce(|acc, m| acc.add(&m).expect("same shape"))
                        .expect("at least one term");
                    first_nonzero_column(&sum)
                }
            }?;
            Some(DSquaredWitness {
                weight: w,
                generator,
                image_weight: w + s as i64,
            })
        })
        .collect();
    witnesses.sort_by_key(|x| (x.weight, x.generator, x.image_weight));
    match witnesses.into_iter().next() {
        Some(w) => DSquaredCheck::Fail(w),
        None => DSquaredCheck::Pass,
    }
}

fn first_nonzero_column(m: &F2Matrix) -> Option<usize> {
    (0..m.rows()).filter_map(|i| f2linalg::ones(m.row(i)).next()).min()
}

// smallest source column of `second * first` that is nonzero
fn product_witness(second: &Block, first: &Block) -> Option<usize> {
    match (second, first) {
        (Block::Sparse(b), Block::Sparse(a)) => {
            let mut acc: Vec<u32> = Vec::new();
            (0..a.cols()).find(|&j| {
                acc.clear();
                acc.extend(a.column(j).iter().flat_map(|&k| b.column(k as usize).iter().copied()));
                acc.sort_unstable();
                acc.chunks(2).any(|p| p.len() == 1 || p[0] != p[1])
            })
        }
        _ => {
            let prod = second.to_dense().matmul(&first.to_dense()).expect("composable blocks");
            first_nonzero_column(&prod)
        }
    }
}

/// A block to add into `D_r` from weight `source_weight`, placed at the
/// given row/column offsets inside that component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedBlock {
    pub r: usize,
    pub source_weight: i64,
    pub row_offset: usize,
    pub col_offset: usize,
    pub matrix: F2Matrix,
}

/// Adds externally supplied higher components (`r >= 2`) to `fc`.
///
/// Blocks landing on the same component are summed. The result must still
/// square to zero.
pub fn load_higher_maps(fc: &FilteredComplex, blocks: &[PlacedBlock]) -> Result<FilteredComplex, SpecSeqError> {
    if !blocks.is_empty() {
        check_dense_size(fc.total_dim())?;
    }
    let mut out = fc.clone();
    for b in blocks {
        if b.r < 2 {
            return Err(SpecSeqError::WeightViolation(b.r));
        }
        let tw = b.source_weight + b.r as i64;
        if fc.index(b.source_weight).is_none() || fc.index(tw).is_none() {
            return Err(SpecSeqError::WeightOutOfRange {
                r: b.r,
                weight: b.source_weight,
            });
        }
        let (rows, cols) = (fc.dim(tw), fc.dim(b.source_weight));
        if b.row_offset + b.matrix.rows() > rows || b.col_offset + b.matrix.cols() > cols {
            return Err(SpecSeqError::BlockPlacement {
                r: b.r,
                weight: b.source_weight,
                row0: b.row_offset,
                col0: b.col_offset,
            });
        }
        let mut sum = match out.component(b.r, b.source_weight) {
            Some(cur) => cur.to_dense(),
            None => F2Matrix::zeros(rows, cols),
        };
        for i in 0..b.matrix.rows() {
            for j in f2linalg::ones(b.matrix.row(i)) {
                sum.toggle(b.row_offset + i, b.col_offset + j);
            }
        }
        out.set_component(b.r, b.source_weight, sum)?;
    }
    match verify_d_squared(&out) {
        DSquaredCheck::Pass => Ok(out),
        DSquaredCheck::Fail(w) => Err(SpecSeqError::DSquared(w)),
    }
}

/// The differential `d_r` from weight `source_weight` on page `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageDifferential {
    pub source_weight: i64,
    pub target_weight: i64,
    pub rank: usize,
    /// In the bases of the chosen page representatives (column = source).
    /// Left out for `d_1` blocks with more than [`KEPT_MATRIX_ENTRIES`] entries.
    pub matrix: Option<F2Matrix>,
}

/// Size limit for the `d_1` matrices copied into [`PageDifferential`].
pub const KEPT_MATRIX_ENTRIES: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub r: usize,
    /// `dim E_r^w`, lowest weight first.
    pub dims: Vec<usize>,
    /// Nonzero `d_r` blocks only.
    pub differentials: Vec<PageDifferential>,
}

impl Page {
    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn d_is_zero(&self) -> bool {
        self.differentials.iter().all(|d| d.rank == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralPages {
    pub min_weight: i64,
    /// Pages `E_1, E_2, ...` in order.
    pub pages: Vec<Page>,
    /// Least `r` from which every later page equals `E_r`, when known.
    pub stabilized_at: Option<usize>,
}

impl SpectralPages {
    pub fn page(&self, r: usize) -> Option<&Page> {
        self.pages.get(r.checked_sub(1)?)
    }

    /// The limit page, if the computation reached it.
    pub fn e_infinity(&self) -> Option<&Page> {
        self.stabilized_at.and_then(|r| self.page(r))
    }

    pub fn totals(&self) -> Vec<usize> {
        self.pages.iter().map(Page::total).collect()
    }

    pub fn weights(&self) -> impl Iterator<Item = i64> + '_ {
        let n = self.pages.first().map_or(0, |p| p.dims.len());
        (0..n as i64).map(move |i| self.min_weight + i)
    }
}

/// Pages `E_1 .. E_{r_max}`, or up to the limit page when `r_max` is `None`.
pub fn compute_pages(fc: &FilteredComplex, r_max: Option<usize>) -> Result<SpectralPages, SpecSeqError> {
    if let DSquaredCheck::Fail(w) = verify_d_squared(fc) {
        return Err(SpecSeqError::DSquared(w));
    }
    if r_max == Some(0) {
        return Ok(SpectralPages {
            min_weight: fc.min_weight(),
            pages: vec![],
            stabilized_at: None,
        });
    }
    if fc.is_d1_only() {
        Ok(d1_pages(fc, r_max))
    } else {
        general_pages(fc, r_max)
    }
}

fn d1_pages(fc: &FilteredComplex, r_max: Option<usize>) -> SpectralPages {
    let nw = fc.dims().len();
    let ranks = fc.d1_ranks();
    let differentials: Vec<PageDifferential> = fc
        .components()
        .map(|((_, w), b)| {
            let (rows, cols) = b.shape();
            PageDifferential {
                source_weight: w,
                target_weight: w + 1,
                rank: ranks[&w],
                matrix: (rows * cols <= KEPT_MATRIX_ENTRIES).then(|| b.to_dense()),
            }
        })
        .collect();
    let mut e2 = fc.dims().to_vec();
    for d in &differentials {
        e2[(d.source_weight - fc.min_weight()) as usize] -= d.rank;
        e2[(d.target_weight - fc.min_weight()) as usize] -= d.rank;
    }
    let d1_zero = differentials.iter().all(|d| d.rank == 0);
    let e1 = Page {
        r: 1,
        dims: fc.dims().to_vec(),
        differentials,
    };
    let mut pages = vec![e1];
    if r_max.map_or(true, |r| r >= 2) {
        pages.push(Page {
            r: 2,
            dims: e2,
            differentials: vec![],
        });
    }
    let stabilized_at = if d1_zero {
        Some(1)
    } else if pages.len() >= 2 {
        Some(2)
    } else {
        None
    };
    debug_assert!(nw == 0 || pages.iter().all(|p| p.dims.len() == nw));
    SpectralPages {
        min_weight: fc.min_weight(),
        pages,
        stabilized_at,
    }
}

/// Rows of an echelon form, each tagged with the combination of page
/// representatives it stands for modulo boundaries.
struct TaggedEchelon {
    rows: Vec<(Vec<u64>, Vec<u64>, usize)>,
    tag_words: usize,
}

impl TaggedEchelon {
    fn new(max_tags: usize) -> Self {
        Self {
            rows: Vec::new(),
            tag_words: max_tags.div_ceil(64).max(1),
        }
    }

    /// Reduces `v` in place and returns the accumulated tag.
    fn reduce(&self, v: &mut [u64]) -> Vec<u64> {
        let mut tag = vec![0u64; self.tag_words];
        for (row, t, pivot) in &self.rows {
            if f2linalg::get_bit(v, *pivot) {
                f2linalg::xor_into(v, row);
                f2linalg::xor_into(&mut tag, t);
            }
        }
        tag
    }

    /// Inserts a reduced nonzero vector with its tag.
    fn push(&mut self, v: Vec<u64>, tag: Vec<u64>) {
        let pivot = f2linalg::ones(&v).next().expect("nonzero vector");
        self.rows.push((v, tag, pivot));
    }
}

struct PageAtWeight {
    dim: usize,
    echelon: TaggedEchelon,
    // global lifts in Z_r^w, one per basis element of E_r^w
    reps: Vec<Vec<u64>>,
}

fn project(fc: &FilteredComplex, v: &[u64], w: i64) -> Vec<u64> {
    let range = fc.range(w);
    let mut out = f2linalg::packed_zeros(range.len());
    for (k, g) in range.enumerate() {
        if f2linalg::get_bit(v, g) {
            f2linalg::set_bit(&mut out, k);
        }
    }
    out
}

fn embed(local: &[u64], len: usize, offset: usize, total: usize) -> Vec<u64> {
    let mut out = f2linalg::packed_zeros(total);
    for k in f2linalg::ones(local).take_while(|&k| k < len) {
        f2linalg::set_bit(&mut out, offset + k);
    }
    out
}

fn page_at_weight(fc: &FilteredComplex, d: &F2Matrix, ds: &SparseMatrix, r: usize, w: i64) -> PageAtWeight {
    let n = fc.total_dim();
    let lo = fc.min_weight();
    let fw = fc.offset(w);
    let top = fc.offset(w + r as i64);

    // Z_r^w is the kernel of D from weights [w, w + r) into the same weights,
    // plus F_{w+r}, which vanishes at weight w
    let z: Vec<Vec<u64>> = d
        .submatrix(fw..top, fw..top)
        .kernel_basis()
        .basis_vectors()
        .map(|k| embed(k, top - fw, fw, n))
        .collect();

    // B_{r-1}^w is D(F_w) plus D y for y in weights [w - r + 1, w) with D y
    // vanishing below weight w
    let from = fc.offset((w - r as i64 + 1).max(lo));
    let mut b: Vec<Vec<u64>> = d
        .submatrix(from..fw, from..fw)
        .kernel_basis()
        .basis_vectors()
        .map(|k| ds.apply(&embed(k, fw - from, from, n)))
        .collect();
    b.extend(fc.range(w).map(|g| {
        let mut e = f2linalg::packed_zeros(n);
        f2linalg::set_bit(&mut e, g);
        ds.apply(&e)
    }));

    let width = fc.dim(w);
    let mut echelon = TaggedEchelon::new(width);
    for v in &b {
        let mut p = project(fc, v, w);
        echelon.reduce(&mut p);
        if p.iter().any(|&x| x != 0) {
            echelon.push(p, vec![0; echelon.tag_words]);
        }
    }
    let mut reps = Vec::new();
    for v in z {
        let mut p = project(fc, &v, w);
        let mut tag = echelon.reduce(&mut p);
        if p.iter().any(|&x| x != 0) {
            f2linalg::flip_bit(&mut tag, reps.len());
            echelon.push(p, tag);
            reps.push(v);
        }
    }
    PageAtWeight {
        dim: reps.len(),
        echelon,
        reps,
    }
}

fn general_pages(fc: &FilteredComplex, r_max: Option<usize>) -> Result<SpectralPages, SpecSeqError> {
    check_dense_size(fc.total_dim())?;
    let d = fc.total_differential();
    let ds = fc.total_sparse();
    let weights: Vec<i64> = (fc.min_weight()..=fc.max_weight()).collect();
    let last = fc.spread() + 1;
    let stop = r_max.map_or(last, |m| m.min(last));

    let mut pages: Vec<Page> = Vec::new();
    for r in 1..=stop {
        let per_weight: Vec<PageAtWeight> = weights
            .par_iter()
            .map(|&w| page_at_weight(fc, &d, &ds, r, w))
            .collect();
        let mut differentials = Vec::new();
        for (i, &w) in weights.iter().enumerate() {
            let tw = w + r as i64;
            let Some(ti) = weights.iter().position(|&x| x == tw) else {
                continue;
            };
            let (src, dst) = (&per_weight[i], &per_weight[ti]);
            if src.dim == 0 || dst.dim == 0 {
                continue;
            }
            let mut m = F2Matrix::zeros(dst.dim, src.dim);
            for (j, rep) in src.reps.iter().enumerate() {
                let image = ds.apply(rep);
                let mut p = project(fc, &image, tw);
                let tag = dst.echelon.reduce(&mut p);
                if p.iter().any(|&x| x != 0) {
                    return Err(SpecSeqError::Internal(format!(
                        "d_{r} image of representative {j} at weight {w} is not a page-{r} class"
                    )));
                }
                for t in f2linalg::ones(&tag).take_while(|&t| t < dst.dim) {
                    m.set(t, j, true);
                }
            }
            let rank = m.rank();
            if rank > 0 {
                differentials.push(PageDifferential {
                    source_weight: w,
                    target_weight: tw,
                    rank,
                    matrix: Some(m),
                });
            }
        }
        let page = Page {
            r,
            dims: per_weight.iter().map(|p| p.dim).collect(),
            differentials,
        };
        if let Some(prev) = pages.last() {
            check_page_step(prev, &page, fc.min_weight())?;
        }
        pages.push(page);
    }

    let stabilized_at = if stop == last {
        let mut r_star = pages.len();
        while r_star > 1 && pages[r_star - 2].d_is_zero() {
            r_star -= 1;
        }
        Some(r_star)
    } else {
        None
    };
    Ok(SpectralPages {
        min_weight: fc.min_weight(),
        pages,
        stabilized_at,
    })
}

// dim E_{r+1}^w must equal dim E_r^w minus the ranks of d_r into and out of w
fn check_page_step(prev: &Page, next: &Page, min_weight: i64) -> Result<(), SpecSeqError> {
    let mut expected = prev.dims.clone();
    for d in &prev.differentials {
        expected[(d.source_weight - min_weight) as usize] -= d.rank;
        expected[(d.target_weight - min_weight) as usize] -= d.rank;
    }
    if expected != next.dims {
        return Err(SpecSeqError::Internal(format!(
            "page {} dims {:?} disagree with page {} minus d ranks {:?}",
            next.r, next.dims, prev.r, expected
        )));
    }
    Ok(())
}

/// Upper bounds on the rank of the limit homology read off the pages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    /// `dim E_r` for `r = 1, 2, ...`, nonincreasing.
    pub totals: Vec<usize>,
    /// `dim E_r^w` per page, lowest weight first.
    pub per_weight: Vec<Vec<usize>>,
    /// Bound from the first page: the sum of the vertex homologies.
    pub e1_bound: usize,
    /// Smallest computed page total, the sharpest available bound.
    pub best_bound: usize,
    /// Total of the limit page, when reached.
    pub e_infinity: Option<usize>,
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if let Some(e) = self.e_infinity {
            parts.push(format!("E_inf = {e}"));
        }
        for (i, t) in self.totals.iter().enumerate().rev() {
            parts.push(format!("E_{} = {t}", i + 1));
        }
        f.write_str(&parts.join(" <= "))
    }
}

pub fn rank_bounds(pages: &SpectralPages) -> BoundsReport {
    let totals = pages.totals();
    BoundsReport {
        e1_bound: totals.first().copied().unwrap_or(0),
        best_bound: totals.iter().copied().min().unwrap_or(0),
        per_weight: pages.pages.iter().map(|p| p.dims.clone()).collect(),
        e_infinity: pages.e_infinity().map(Page::total),
        totals,
    }
}

/// Subspaces used by the page formula, exposed for testing and inspection.
pub fn cycles_and_boundaries(fc: &FilteredComplex, r: usize, w: i64) -> (Subspace, Subspace) {
    let d = fc.total_differential();
    let n = fc.total_dim();
    let fw = fc.offset(w);
    let z_sub = d.submatrix(fw..fc.offset(w + r as i64), fw..n);
    let z: Vec<Vec<u64>> = z_sub
        .kernel_basis()
        .basis_vectors()
        .map(|k| embed(k, n - fw, fw, n))
        .collect();
    let from = fc.offset((w - r as i64 + 1).max(fc.min_weight()));
    let b: Vec<Vec<u64>> = d
        .submatrix(0..fw, from..n)
        .kernel_basis()
        .basis_vectors()
        .map(|k| d.apply(&embed(k, n - from, from, n)))
        .collect();
    (Subspace::from_packed(n, &z), Subspace::from_packed(n, &b))
}
