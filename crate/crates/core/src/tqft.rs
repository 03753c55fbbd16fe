//! The two-dimensional Frobenius algebra `A = GF(2)[X]/(X^2)` and the chain
//! complex it assigns to a resolution cube.
//!
//! A vertex with circles `c_1 < ... < c_k` (by label) carries `A^{⊗k}`. Its
//! basis states assign `1` or `X` to every circle; a state is encoded as an
//! integer whose bit `k-1-j` is set when circle `c_j` carries `X`, so the
//! enumeration order is lexicographic in circle order with `1` before `X`.


use rayon::prelude::*;
use thiserror::Error;

use crate::cube::{CircleLabel, Cobordism, CubeError, ResolutionCube, VertexId};
use crate::f2linalg::F2Matrix;
use crate::f2linalg::SparseMatrix;
use crate::specseq::{FilteredComplex, SpecSeqError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TqftError {
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Complex(#[from] SpecSeqError),
    #[error("face {bottom:b} -> {top:b} does not commute on basis state {state} of the bottom vertex")]
    FaceNotCommuting { bottom: VertexId, top: VertexId, state: usize },
}

/// Basis element of `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    One,
    X,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::One, Basis::X];

    fn bit(self) -> u8 {
        match self {
            Basis::One => 0,
            Basis::X => 1,
        }
    }
}

/// Element of `A`, as a bitmask over `{1, X}` (bit 0 for `1`, bit 1 for `X`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AlgElement(pub u8);

impl AlgElement {
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(0b01);
    pub const X: Self = Self(0b10);

    pub fn from_basis(b: Basis) -> Self {
        Self(1 << b.bit())
    }

    pub fn terms(self) -> impl Iterator<Item = Basis> {
        Basis::ALL.into_iter().filter(move |b| self.0 & (1 << b.bit()) != 0)
    }
}

impl std::ops::Add for AlgElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 ^ rhs.0)
    }
}

/// Element of `A ⊗ A`, bitmask over `(1⊗1, 1⊗X, X⊗1, X⊗X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TensorElement(pub u8);

impl TensorElement {
    pub fn pure(a: Basis, b: Basis) -> Self {
        Self(1 << (2 * a.bit() + b.bit()))
    }

    pub fn terms(self) -> impl Iterator<Item = (Basis, Basis)> {
        Basis::ALL
            .into_iter()
            .flat_map(|a| Basis::ALL.into_iter().map(move |b| (a, b)))
            .filter(move |&(a, b)| self.0 & (1 << (2 * a.bit() + b.bit())) != 0)
    }
}

impl std::ops::Add for TensorElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 ^ rhs.0)
    }
}

pub fn multiply(a: Basis, b: Basis) -> AlgElement {
    match (a, b) {
        (Basis::One, Basis::One) => AlgElement::ONE,
        (Basis::One, Basis::X) | (Basis::X, Basis::One) => AlgElement::X,
        (Basis::X, Basis::X) => AlgElement::ZERO,
    }
}

/// `Δ(1) = 1⊗X + X⊗1`, `Δ(X) = X⊗X`, extended linearly.
pub fn comultiply(a: AlgElement) -> TensorElement {
    a.terms()
        .map(|b| match b {
            Basis::One => TensorElement::pure(Basis::One, Basis::X) + TensorElement::pure(Basis::X, Basis::One),
            Basis::X => TensorElement::pure(Basis::X, Basis::X),
        })
        .fold(TensorElement::default(), |acc, t| acc + t)
}

/// Basis of `A^{⊗k}` for the circles of one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSpace {
    circles: Vec<CircleLabel>,
}

impl VertexSpace {
    pub fn new(circles: &[CircleLabel]) -> Self {
        debug_assert!(circles.windows(2).all(|w| w[0] < w[1]));
        Self {
            circles: circles.to_vec(),
        }
    }

    pub fn circles(&self) -> &[CircleLabel] {
        &self.circles
    }

    pub fn dim(&self) -> usize {
        1 << self.circles.len()
    }

    fn shift(&self, label: CircleLabel) -> u32 {
        let j = self.circles.binary_search(&label).expect("circle belongs to vertex");
        (self.circles.len() - 1 - j) as u32
    }

    /// Value on circle `label` in basis state `state`.
    pub fn value(&self, state: usize, label: CircleLabel) -> Basis {
        if state >> self.shift(label) & 1 == 1 {
            Basis::X
        } else {
            Basis::One
        }
    }

    pub fn with_value(&self, state: usize, label: CircleLabel, value: Basis) -> usize {
        let s = self.shift(label);
        (state & !(1 << s)) | ((value.bit() as usize) << s)
    }

    /// Renders a state as e.g. `1⊗X⊗1`.
    pub fn describe(&self, state: usize) -> String {
        self.circles
            .iter()
            .map(|&c| match self.value(state, c) {
                Basis::One => "1",
                Basis::X => "X",
            })
            .collect::<Vec<_>>()
            .join("⊗")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Image {
    len: u8,
    targets: [usize; 2],
}

impl Image {
    fn from_iter(it: impl Iterator<Item = usize>) -> Self {
        let mut out = Self { len: 0, targets: [0; 2] };
        for t in it {
            out.targets[out.len as usize] = t;
            out.len += 1;
        }
        out
    }
}

/// Edge map stored as images of basis states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMap {
    pub from: VertexId,
    pub to: VertexId,
    source_dim: usize,
    target_dim: usize,
    // the target states (at most two) in the image of each source state
    images: Vec<Image>,
}

impl EdgeMap {
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn image(&self, state: usize) -> &[usize] {
        let img = &self.images[state];
        &img.targets[..img.len as usize]
    }

    /// Matrix of shape `target_dim x source_dim`.
    pub fn to_matrix(&self) -> F2Matrix {
        let mut m = F2Matrix::zeros(self.target_dim, self.source_dim);
        for s in 0..self.source_dim {
            for &t in self.image(s) {
                m.toggle(t, s);
            }
        }
        m
    }

    /// Applies the map to a set of states (a GF(2) vector in sparse form).
    pub fn apply_sparse(&self, states: &[usize]) -> Vec<usize> {
        let mut acc: Vec<usize> = states.iter().flat_map(|&s| self.image(s).iter().copied()).collect();
        cancel_pairs(&mut acc);
        acc
    }
}

// sorts and drops every value that occurs an even number of times
fn cancel_pairs(v: &mut Vec<usize>) {
    v.sort_unstable();
    let mut out = 0;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            v[out] = v[i];
            out += 1;
        }
        i = j;
    }
    v.truncate(out);
}

/// Map assigned to the edge `from -> to`: multiplication on a merge,
/// comultiplication on a split, identity on untouched circles.
pub fn edge_map(cube: &ResolutionCube, from: VertexId, to: VertexId) -> Result<EdgeMap, CubeError> {
    let e = cube.adjacent_cobordism(from, to)?;
    let src = VertexSpace::new(cube.vertex(from).circles());
    let dst = VertexSpace::new(cube.vertex(to).circles());
    let moves: Vec<(u32, u32)> = e.spectators.iter().map(|&c| (src.shift(c), dst.shift(c))).collect();
    let bit = |s: usize, shift: u32| if s >> shift & 1 == 1 { Basis::X } else { Basis::One };
    let put = |state: usize, shift: u32, v: Basis| (state & !(1 << shift)) | ((v.bit() as usize) << shift);
    let images = match e.kind {
        Cobordism::Merge { from: [a, b], to: c } => {
            let (sa, sb, sc) = (src.shift(a), src.shift(b), dst.shift(c));
            (0..src.dim())
                .map(|s| {
                    let base = moves.iter().fold(0, |acc, &(x, y)| acc | (s >> x & 1) << y);
                    Image::from_iter(multiply(bit(s, sa), bit(s, sb)).terms().map(|v| put(base, sc, v)))
                })
                .collect()
        }
        Cobordism::Split { from: a, to: [c, d] } => {
            let (sa, sc, sd) = (src.shift(a), dst.shift(c), dst.shift(d));
            (0..src.dim())
                .map(|s| {
                    let base = moves.iter().fold(0, |acc, &(x, y)| acc | (s >> x & 1) << y);
                    Image::from_iter(
                        comultiply(AlgElement::from_basis(bit(s, sa)))
                            .terms()
                            .map(|(u, v)| put(put(base, sc, u), sd, v)),
                    )
                })
                .collect()
        }
    };
    Ok(EdgeMap {
        from,
        to,
        source_dim: src.dim(),
        target_dim: dst.dim(),
        images,
    })
}

/// Dense matrix of the edge map, shape `2^{c(to)} x 2^{c(from)}`.
pub fn edge_map_matrix(cube: &ResolutionCube, from: VertexId, to: VertexId) -> Result<F2Matrix, CubeError> {
    Ok(edge_map(cube, from, to)?.to_matrix())
}

// every edge map of the cube, indexed by `source * dim + direction`
struct EdgeTable {
    dim: usize,
    maps: Vec<Option<EdgeMap>>,
}

impl EdgeTable {
    fn build(cube: &ResolutionCube) -> Result<Self, CubeError> {
        let n = cube.dim();
        let maps = (0..cube.vertex_count() * n)
            .into_par_iter()
            .map(|x| {
                let (v, b) = ((x / n) as VertexId, x % n);
                if v & (1 << b) != 0 {
                    return Ok(None);
                }
                edge_map(cube, v, v | (1 << b)).map(Some)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { dim: n, maps })
    }

    fn get(&self, v: VertexId, b: usize) -> &EdgeMap {
        self.maps[v as usize * self.dim + b].as_ref().expect("edge leaves the vertex")
    }
}

fn check_faces_with(table: &EdgeTable, cube: &ResolutionCube) -> Result<usize, TqftError> {
    let n = cube.dim();
    let faces: Vec<(VertexId, usize, usize)> = (0..cube.vertex_count() as VertexId)
        .flat_map(|i| {
            (0..n).flat_map(move |a| ((a + 1)..n).map(move |b| (i, a, b)))
        })
        .filter(|&(i, a, b)| i & (1 << a) == 0 && i & (1 << b) == 0)
        .collect();
    faces.par_iter().try_for_each(|&(i, a, b)| {
        let (j1, j2) = (i | (1 << a), i | (1 << b));
        let (e1, e1k) = (table.get(i, a), table.get(j1, b));
        let (e2, e2k) = (table.get(i, b), table.get(j2, a));
        // images along both paths, at most four states each, sorted and reduced mod 2
        let path = |first: &EdgeMap, second: &EdgeMap, s: usize| {
            let mut v = [usize::MAX; 4];
            let mut n = 0;
            for &t in first.image(s) {
                for &u in second.image(t) {
                    v[n] = u;
                    n += 1;
                }
            }
            v[..n].sort_unstable();
            let mut out = [usize::MAX; 4];
            let (mut k, mut i) = (0, 0);
            while i < n {
                if i + 1 < n && v[i] == v[i + 1] {
                    i += 2;
                } else {
                    out[k] = v[i];
                    k += 1;
                    i += 1;
                }
            }
            out
        };
        for s in 0..e1.source_dim() {
            if path(e1, e1k, s) != path(e2, e2k, s) {
                return Err(TqftError::FaceNotCommuting { bottom: i, top: j1 | j2, state: s });
            }
        }
        Ok(())
    })?;
    Ok(faces.len())
}

/// Checks every 2-face `I -> J1, J2 -> K` of the cube commutes.
pub fn check_faces(cube: &ResolutionCube) -> Result<usize, TqftError> {
    check_faces_with(&EdgeTable::build(cube)?, cube)
}

/// Generator of the assembled complex: a vertex and a basis state there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Generator {
    pub vertex: VertexId,
    pub state: usize,
}

/// The cube complex over GF(2): vertex spaces grouped by weight plus `d_1`.
#[derive(Debug, Clone)]
pub struct ChainComplexF2 {
    spaces: Vec<VertexSpace>,
    // vertices of each weight, ascending; index = weight - min_weight
    by_weight: Vec<Vec<VertexId>>,
    // offset of each vertex inside its weight block
    offset: Vec<usize>,
    min_weight: i64,
    complex: FilteredComplex,
    faces_checked: usize,
}

impl ChainComplexF2 {
    pub fn filtered(&self) -> &FilteredComplex {
        &self.complex
    }

    pub fn into_filtered(self) -> FilteredComplex {
        self.complex
    }

    pub fn space(&self, v: VertexId) -> &VertexSpace {
        &self.spaces[v as usize]
    }

    pub fn faces_checked(&self) -> usize {
        self.faces_checked
    }

    pub fn total_dim(&self) -> usize {
        self.complex.total_dim()
    }

    /// Vertices of weight `w`, in block order.
    pub fn vertices_of_weight(&self, w: i64) -> &[VertexId] {
        let idx = w - self.min_weight;
        if idx < 0 || idx as usize >= self.by_weight.len() {
            return &[];
        }
        &self.by_weight[idx as usize]
    }

    /// Position of a generator inside its weight block.
    pub fn local_index(&self, g: Generator) -> usize {
        self.offset[g.vertex as usize] + g.state
    }

    /// Generator at position `local` of the weight-`w` block.
    pub fn generator(&self, w: i64, local: usize) -> Option<Generator> {
        let vs = self.vertices_of_weight(w);
        let pos = vs.partition_point(|&v| self.offset[v as usize] <= local);
        let v = *vs.get(pos.checked_sub(1)?)?;
        let state = local - self.offset[v as usize];
        (state < self.spaces[v as usize].dim()).then_some(Generator { vertex: v, state })
    }
}

/// Assembles the cube complex: `d_1` is the sum of all edge maps, vertex
/// differentials are zero, and every face is checked to commute.
pub fn assemble_complex(cube: &ResolutionCube) -> Result<ChainComplexF2, TqftError> {
    let spaces: Vec<VertexSpace> = cube.vertices().map(|(_, v)| VertexSpace::new(v.circles())).collect();
    let min_weight = cube.min_weight();
    let nw = cube.dim() + 1;
    let mut by_weight: Vec<Vec<VertexId>> = vec![Vec::new(); nw];
    for (id, _) in cube.vertices() {
        by_weight[(cube.weight(id) - min_weight) as usize].push(id);
    }
    let mut offset = vec![0usize; cube.vertex_count()];
    let mut dims = Vec::with_capacity(nw);
    for vs in &by_weight {
        let mut acc = 0;
        for &v in vs {
            offset[v as usize] = acc;
            acc += spaces[v as usize].dim();
        }
        dims.push(acc);
    }

    // quantum grading #1 - #X + weight; merge and split both lower #1 - #X by one
    let mut grades: Vec<Vec<i64>> = Vec::with_capacity(nw);
    for (wi, vs) in by_weight.iter().enumerate() {
        let w = min_weight + wi as i64;
        let mut g = Vec::with_capacity(dims[wi]);
        for &v in vs {
            let c = spaces[v as usize].circles().len() as i64;
            g.extend((0..spaces[v as usize].dim() as u64).map(|s| c - 2 * s.count_ones() as i64 + w));
        }
        grades.push(g);
    }
    let table = EdgeTable::build(cube)?;
    let faces_checked = check_faces_with(&table, cube)?;
    let blocks: Vec<SparseMatrix> = (0..nw.saturating_sub(1))
        .into_par_iter()
        .map(|wi| {
            let mut starts = Vec::with_capacity(dims[wi] + 1);
            starts.push(0);
            let mut indices: Vec<u32> = Vec::new();
            for &v in &by_weight[wi] {
                let out: Vec<(usize, &EdgeMap)> = (0..cube.dim())
                    .filter(|b| v & (1 << b) == 0)
                    .map(|b| (offset[(v | (1 << b)) as usize], table.get(v, b)))
                    .collect();
                for s in 0..spaces[v as usize].dim() {
                    let from = indices.len();
                    indices.extend(out.iter().flat_map(|&(off, e)| e.image(s).iter().map(move |&t| (off + t) as u32)));
                    // distinct edges land in distinct vertices, so no entry repeats
                    indices[from..].sort_unstable();
                    starts.push(indices.len());
                }
            }
            SparseMatrix::from_parts(dims[wi + 1], starts, indices).expect("sorted columns")
        })
        .collect();

    let mut complex = FilteredComplex::new(min_weight, dims)?;
    for (wi, b) in blocks.into_iter().enumerate() {
        complex.set_sparse_component(1, min_weight + wi as i64, b)?;
    }
    complex.set_grading(grades.concat())?;
    Ok(ChainComplexF2 {
        spaces,
        by_weight,
        offset,
        min_weight,
        complex,
        faces_checked,
    })
}
