//! Dense, bit-packed linear algebra over the two-element field.
//!
//! Every matrix stores one bit per entry, row-major, 64 columns per `u64`
//! word. Column `j` of a row lives in word `j / 64` at bit `j % 64`. Bits past
//! the last column are always zero, so whole-word comparisons and popcounts
//! are valid without masking.
//!
//! The engine only needs a handful of operations: products, reduced row
//! echelon form, rank, kernel and image bases, and quotient dimensions of
//! nested subspaces. Everything upstream (edge maps, page computations) is
//! expressed in these terms.

use std::fmt;

use thiserror::Error;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("ambient dimensions differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("basis vector {0} of the smaller space is not contained in the larger one")]
    NotSubspace(usize),
    #[error("invalid bitstring {0:?}: expected only '0' and '1'")]
    BadBitstring(String),
    #[error("sparse column {0} is unsorted or has a row index out of range")]
    BadColumn(usize),
    #[error("ragged rows: expected {expected} columns, row {row} has {found}")]
    RaggedRows {
        expected: usize,
        row: usize,
        found: usize,
    },
}

/// A `rows x cols` matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows given as `0`/`1` strings, column 0 first.
    ///
    /// `cols` is required so that an empty row list still has a shape.
    pub fn from_bitstrings<S: AsRef<str>>(cols: usize, rows: &[S]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(LinalgError::RaggedRows {
                    expected: cols,
                    row: i,
                    found: row.len(),
                });
            }
            for (j, ch) in row.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(i, j, true),
                    _ => return Err(LinalgError::BadBitstring(row.to_string())),
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from a nested `bool` grid.
    pub fn from_bools(cols: usize, rows: &[Vec<bool>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged bool rows");
            for (j, &b) in row.iter().enumerate() {
                if b {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Stacks packed row vectors of length `cols` into a matrix.
    pub fn from_packed_rows(cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            debug_assert_eq!(r.len(), m.stride);
            m.row_mut(i).copy_from_slice(r);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Number of `u64` words per row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.data[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / WORD_BITS];
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize, j: usize) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.stride + j / WORD_BITS] ^= 1u64 << (j % WORD_BITS);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Number of nonzero entries.
    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `row[dst] ^= row[src]`.
    #[inline]
    pub fn xor_rows(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..(dst + 1) * s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..(src + 1) * s])
        };
        xor_into(a, b);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in ones(self.row(i)) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Product `self * other`, accumulating rows of `other` word-parallel.
    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * out.stride..(i + 1) * out.stride];
            for k in ones(self.row(i)) {
                xor_into(dst, other.row(k));
            }
        }
        Ok(out)
    }

    /// Entrywise sum (XOR) of two equal-shaped matrices.
    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = self.clone();
        xor_into(&mut out.data, &other.data);
        Ok(out)
    }

    /// Applies the matrix to a packed column vector of length `cols`.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        debug_assert_eq!(v.len(), self.stride);
        let mut out = vec![0u64; words_for(self.rows)];
        for i in 0..self.rows {
            let parity = self
                .row(i)
                .iter()
                .zip(v)
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>()
                & 1;
            if parity == 1 {
                out[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        out
    }

    /// Column `j` as a packed vector of length `rows`.
    pub fn column(&self, j: usize) -> Vec<u64> {
        let mut out = vec![0u64; words_for(self.rows)];
        for i in 0..self.rows {
            if self.get(i, j) {
                out[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        out
    }

    /// Submatrix on the given row and column index ranges.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (oi, i) in rows.enumerate() {
            let src = self.row(i);
            let dst = out.row_mut(oi);
            copy_bits(src, cols.start, cols.len(), dst, 0);
        }
        out
    }

    /// Writes `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            let src = block.row(i).to_vec();
            copy_bits(&src, 0, block.cols, self.row_mut(r0 + i), c0);
        }
    }

    /// Reduced row echelon form with leftmost pivots.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(r, p);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.xor_rows(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            rank: pivots.len(),
            matrix: m,
            pivots,
        }
    }

    /// Rank by forward elimination only.
    ///
    /// Eliminates along the shorter dimension, which is the hot path for the
    /// large, very sparse cube differentials.
    pub fn rank(&self) -> usize {
        if self.rows > self.cols {
            return self.transpose().rank();
        }
        let mut m = self.clone();
        let s = m.stride;
        let mut rank = 0;
        let mut remaining: Vec<usize> = (0..m.rows).filter(|&i| m.row(i).iter().any(|&w| w != 0)).collect();
        while let Some(&first) = remaining.first() {
            // pivot on the lowest set bit of the first nonzero row
            let row = m.row(first);
            let (wi, w) = row.iter().enumerate().find(|(_, &w)| w != 0).unwrap();
            let bit = w & w.wrapping_neg();
            let pivot = m.data[first * s..(first + 1) * s].to_vec();
            rank += 1;
            let mut next = Vec::with_capacity(remaining.len());
            for &i in &remaining[1..] {
                let dst = &mut m.data[i * s..(i + 1) * s];
                if dst[wi] & bit == 0 {
                    next.push(i);
                    continue;
                }
                xor_into(&mut dst[wi..], &pivot[wi..]);
                if dst.iter().any(|&w| w != 0) {
                    next.push(i);
                }
            }
            remaining = next;
        }
        rank
    }

    /// Basis of `{ v : self * v = 0 }`, as a subspace of GF(2)^cols.
    pub fn kernel_basis(&self) -> Subspace {
        let Rref { matrix, pivots, .. } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let stride = words_for(self.cols);
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u64; stride];
            v[f / WORD_BITS] |= 1 << (f % WORD_BITS);
            for (i, &p) in pivots.iter().enumerate() {
                if matrix.get(i, f) {
                    v[p / WORD_BITS] |= 1 << (p % WORD_BITS);
                }
            }
            basis.push(v);
        }
        Subspace::from_packed(self.cols, &basis)
    }

    /// Column space, as a subspace of GF(2)^rows.
    pub fn image_basis(&self) -> Subspace {
        Subspace::from_matrix(&self.transpose())
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", bits_to_string(self.row(i), self.cols))?;
        }
        write!(f, "]")
    }
}

/// Result of [`F2Matrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: F2Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// A linear subspace of GF(2)^ambient stored by its reduced echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: F2Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            basis: F2Matrix::zeros(0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            basis: F2Matrix::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Row span of `m`.
    pub fn from_matrix(m: &F2Matrix) -> Self {
        let Rref { matrix, rank, pivots } = m.rref();
        Self {
            basis: matrix.submatrix(0..rank, 0..m.cols()),
            pivots,
        }
    }

    /// Span of packed vectors of length `ambient`.
    pub fn from_packed(ambient: usize, vectors: &[Vec<u64>]) -> Self {
        Self::from_matrix(&F2Matrix::from_packed_rows(ambient, vectors))
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Echelon basis, one vector per row.
    pub fn basis(&self) -> &F2Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_vectors(&self) -> impl Iterator<Item = &[u64]> {
        (0..self.dim()).map(move |i| self.basis.row(i))
    }

    /// Reduces `v` modulo the subspace; the result is zero iff `v` is a member.
    pub fn reduce(&self, v: &mut [u64]) {
        for (i, &p) in self.pivots.iter().enumerate() {
            if (v[p / WORD_BITS] >> (p % WORD_BITS)) & 1 == 1 {
                xor_into(v, self.basis.row(i));
            }
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient() == other.ambient() && self.basis_vectors().all(|v| other.contains(v))
    }

    /// `self + other`.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        if self.ambient() != other.ambient() {
            return Err(LinalgError::AmbientMismatch(self.ambient(), other.ambient()));
        }
        let vs: Vec<Vec<u64>> = self
            .basis_vectors()
            .chain(other.basis_vectors())
            .map(<[u64]>::to_vec)
            .collect();
        Ok(Subspace::from_packed(self.ambient(), &vs))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) ", self.dim(), self.ambient())?;
        f.debug_list()
            .entries(self.basis_vectors().map(|v| bits_to_string(v, self.ambient())))
            .finish()
    }
}

/// `dim V - dim W` for `W ⊆ V`; containment is checked basis vector by basis vector.
pub fn quotient_dim(v: &Subspace, w: &Subspace) -> Result<usize, LinalgError> {
    if v.ambient() != w.ambient() {
        return Err(LinalgError::AmbientMismatch(v.ambient(), w.ambient()));
    }
    for (i, row) in w.basis_vectors().enumerate() {
        if !v.contains(row) {
            return Err(LinalgError::NotSubspace(i));
        }
    }
    Ok(v.dim() - w.dim())
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Indices of set bits in a packed vector, ascending.
pub fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(wi * WORD_BITS + t)
        })
    })
}

pub(crate) fn packed_zeros(bits: usize) -> Vec<u64> {
    vec![0u64; words_for(bits)]
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
}

#[inline]
pub(crate) fn flip_bit(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
}

fn copy_bits(src: &[u64], src_start: usize, len: usize, dst: &mut [u64], dst_start: usize) {
    for k in 0..len {
        let s = src_start + k;
        let d = dst_start + k;
        let bit = (src[s / WORD_BITS] >> (s % WORD_BITS)) & 1;
        let mask = 1u64 << (d % WORD_BITS);
        if bit == 1 {
            dst[d / WORD_BITS] |= mask;
        } else {
            dst[d / WORD_BITS] &= !mask;
        }
    }
}

/// Renders the first `len` bits as a `0`/`1` string, bit 0 first.
pub fn bits_to_string(words: &[u64], len: usize) -> String {
    (0..len).map(|i| if get_bit(words, i) { '1' } else { '0' }).collect()
}

/// A `rows x cols` matrix over GF(2) stored by columns: column `j` is the
/// strictly increasing run `indices[starts[j]..starts[j + 1]]` of the rows
/// holding a one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    starts: Vec<usize>,
    indices: Vec<u32>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            starts: vec![0; cols + 1],
            indices: Vec::new(),
        }
    }

    /// Validates the layout described on the type.
    pub fn from_parts(rows: usize, starts: Vec<usize>, indices: Vec<u32>) -> Result<Self, LinalgError> {
        if starts.first() != Some(&0) || starts.last() != Some(&indices.len()) {
            return Err(LinalgError::BadColumn(0));
        }
        let m = Self { rows, starts, indices };
        for j in 0..m.cols() {
            if m.starts[j] > m.starts[j + 1] {
                return Err(LinalgError::BadColumn(j));
            }
            let c = m.column(j);
            if !c.windows(2).all(|w| w[0] < w[1]) || c.last().is_some_and(|&i| i as usize >= rows) {
                return Err(LinalgError::BadColumn(j));
            }
        }
        Ok(m)
    }

    pub fn from_columns(rows: usize, columns: Vec<Vec<u32>>) -> Result<Self, LinalgError> {
        let mut starts = Vec::with_capacity(columns.len() + 1);
        starts.push(0);
        let mut indices = Vec::new();
        for c in columns {
            indices.extend(c);
            starts.push(indices.len());
        }
        Self::from_parts(rows, starts, indices)
    }

    pub fn from_dense(m: &F2Matrix) -> Self {
        let t = m.transpose();
        let columns = (0..t.rows()).map(|j| ones(t.row(j)).map(|i| i as u32).collect()).collect();
        Self::from_columns(m.rows(), columns).expect("sorted columns")
    }

    pub fn to_dense(&self) -> F2Matrix {
        let mut m = F2Matrix::zeros(self.rows, self.cols());
        for j in 0..self.cols() {
            for &i in self.column(j) {
                m.set(i as usize, j, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols())
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.indices[self.starts[j]..self.starts[j + 1]]
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_zero(&self) -> bool {
        self.indices.is_empty()
    }

    /// Product with a packed vector of length `cols`.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; words_for(self.rows)];
        for j in ones(v).take_while(|&j| j < self.cols()) {
            for &i in self.column(j) {
                out[i as usize / WORD_BITS] ^= 1 << (i as usize % WORD_BITS);
            }
        }
        out
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols() != other.rows {
            return Err(LinalgError::ShapeMismatch {
                left_rows: self.rows,
                left_cols: self.cols(),
                right_rows: other.rows,
                right_cols: other.cols(),
            });
        }
        let mut starts = vec![0];
        let mut indices = Vec::new();
        let mut acc: Vec<u32> = Vec::new();
        for j in 0..other.cols() {
            acc.clear();
            acc.extend(other.column(j).iter().flat_map(|&k| self.column(k as usize).iter().copied()));
            acc.sort_unstable();
            let mut i = 0;
            while i < acc.len() {
                if i + 1 < acc.len() && acc[i] == acc[i + 1] {
                    i += 2;
                } else {
                    indices.push(acc[i]);
                    i += 1;
                }
            }
            starts.push(indices.len());
        }
        Ok(Self {
            rows: self.rows,
            starts,
            indices,
        })
    }

    pub fn rank(&self) -> usize {
        self.pivot_rows(0..self.cols()).len()
    }

    /// Column reduction of the submatrix made of the listed columns, in the
    /// given order: the rows holding the lowest one of each column that
    /// does not reduce to zero. Their number is the rank.
    pub fn pivot_rows(&self, cols: impl IntoIterator<Item = usize>) -> Vec<u32> {
        // owner[i]: the reduced column whose lowest one is in row i
        let mut owner = vec![u32::MAX; self.rows];
        let mut reduced: Vec<Vec<u32>> = Vec::new();
        let (mut c, mut scratch) = (Vec::new(), Vec::new());
        let mut lows = Vec::new();
        for j in cols {
            c.clear();
            c.extend_from_slice(self.column(j));
            while let Some(&low) = c.last() {
                match owner[low as usize] {
                    u32::MAX => {
                        owner[low as usize] = reduced.len() as u32;
                        reduced.push(c.clone());
                        lows.push(low);
                        break;
                    }
                    k => {
                        symmetric_difference(&c, &reduced[k as usize], &mut scratch);
                        std::mem::swap(&mut c, &mut scratch);
                    }
                }
            }
        }
        lows
    }
}

fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}
