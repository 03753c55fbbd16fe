#![allow(dead_code)]

// Oracles and generators for the integration tests. The oracles (circle
// tracing, brute-force homology, naive elimination, cancellation) share no
// code with the crate's own algorithms.

use rand::Rng;
use twistcube::f2linalg::F2Matrix;
use twistcube::specseq::FilteredComplex;
use twistcube::tangle::{BraidWord, Letter, Sign};

/// Dense GF(2) matrix as rows of bytes.
pub type Dense = Vec<Vec<u8>>;

fn pack(row: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; row.len().div_ceil(64)];
    for (j, &x) in row.iter().enumerate() {
        out[j / 64] |= (x as u64 & 1) << (j % 64);
    }
    out
}

fn bit(v: &[u64], j: usize) -> bool {
    v[j / 64] >> (j % 64) & 1 == 1
}

// Gauss-Jordan on packed rows; returns the reduced rows and their pivot columns
fn eliminate(m: &Dense, cols: usize) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut a: Vec<Vec<u64>> = m.iter().map(|r| pack(r)).collect();
    let rows = a.len();
    let mut pivots = Vec::new();
    for c in 0..cols {
        let r = pivots.len();
        let Some(p) = (r..rows).find(|&i| bit(&a[i], c)) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && bit(row, c) {
                row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
            }
        }
        pivots.push(c);
    }
    a.truncate(pivots.len());
    (a, pivots)
}

pub fn naive_rank(m: &Dense) -> usize {
    eliminate(m, m.first().map_or(0, Vec::len)).1.len()
}

/// Basis of `{ v : m v = 0 }` by back substitution.
pub fn naive_kernel(m: &Dense, cols: usize) -> Vec<Vec<u8>> {
    let (a, pivots) = eliminate(m, cols);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0u8; cols];
            v[free] = 1;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = bit(&a[i], free) as u8;
            }
            v
        })
        .collect()
}

/// Vectors reduced against a growing echelon set, to test independence.
#[derive(Default, Clone)]
pub struct Span {
    rows: Vec<(usize, Vec<u64>)>,
}

impl Span {
    fn reduce(&self, v: &[u8]) -> Vec<u64> {
        let mut x = pack(v);
        for (p, row) in &self.rows {
            if bit(&x, *p) {
                x.iter_mut().zip(row).for_each(|(a, b)| *a ^= b);
            }
        }
        x
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&w| w == 0)
    }

    /// Adds `v`; false if it was already in the span.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        let x = self.reduce(v);
        let Some(p) = (0..v.len()).find(|&j| bit(&x, j)) else {
            return false;
        };
        self.rows.push((p, x));
        true
    }
}

pub fn dot(a: &[u8], b: &[u8]) -> u8 {
    a.iter().zip(b).fold(0, |acc, (x, y)| acc ^ (x & y))
}

pub fn transpose(m: &Dense, cols: usize) -> Dense {
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

pub fn to_dense(m: &F2Matrix) -> Dense {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j) as u8).collect()).collect()
}

pub fn from_dense(m: &Dense, cols: usize) -> F2Matrix {
    let rows: Vec<Vec<bool>> = m.iter().map(|r| r.iter().map(|&x| x == 1).collect()).collect();
    F2Matrix::from_bools(cols, &rows)
}

/// Inverse of an invertible square matrix.
pub fn naive_inverse(m: &Dense) -> Dense {
    let n = m.len();
    let mut a: Dense = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| (i == j) as u8));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| a[i][c] == 1).expect("invertible");
        a.swap(c, p);
        for i in 0..n {
            if i != c && a[i][c] == 1 {
                for j in 0..2 * n {
                    a[i][j] ^= a[c][j];
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn naive_matmul(a: &Dense, b: &Dense, inner: usize, cols: usize) -> Dense {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(0u8, |acc, k| acc ^ (row[k] & b[k][j])))
                .collect()
        })
        .collect()
}

pub fn random_dense(rng: &mut impl Rng, rows: usize, cols: usize, density: f64) -> Dense {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_bool(density) as u8).collect())
        .collect()
}

pub fn random_word(rng: &mut impl Rng, strands: usize, len: usize) -> BraidWord {
    let letters = (0..len)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg };
            Letter::new(rng.gen_range(1..strands), sign)
        })
        .collect();
    BraidWord::new(strands, letters).unwrap()
}

/// Alternating pattern: even generators positive, odd ones negative.
pub fn random_alternating_word(rng: &mut impl Rng, strands: usize, len: usize) -> BraidWord {
    let letters = (0..len)
        .map(|_| {
            let k = rng.gen_range(1..strands);
            Letter::new(k, if k % 2 == 0 { Sign::Pos } else { Sign::Neg })
        })
        .collect();
    BraidWord::new(strands, letters).unwrap()
}

/// Circles of the fully resolved standard plat closure, as node lists.
///
/// Nodes are `(level, position)` flattened; `flat[i]` says whether letter
/// `i` is resolved into a cup-cap pair.
fn resolved_circles(strands: usize, word: &[(usize, i8)], flat: &[bool]) -> Vec<Vec<usize>> {
    let levels = word.len() + 1;
    let node = |t: usize, p: usize| t * strands + p;
    let total = levels * strands;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    let mut link = |a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    for (i, &(k, _)) in word.iter().enumerate() {
        for p in 0..strands {
            let inside = p == k - 1 || p == k;
            if !(flat[i] && inside) {
                link(node(i, p), node(i + 1, p));
            }
        }
        if flat[i] {
            link(node(i, k - 1), node(i, k));
            link(node(i + 1, k - 1), node(i + 1, k));
        }
    }
    for p in (0..strands).step_by(2) {
        link(node(0, p), node(0, p + 1));
        link(node(levels - 1, p), node(levels - 1, p + 1));
    }
    let mut seen = vec![false; total];
    let mut circles = Vec::new();
    for start in 0..total {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut nodes = Vec::new();
        seen[start] = true;
        while let Some(x) = stack.pop() {
            nodes.push(x);
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        nodes.sort_unstable();
        circles.push(nodes);
    }
    circles.sort();
    circles
}

/// Which letters are flat at cube vertex `v`: a positive letter is flat on
/// its 1-resolution, a negative one on its 0-resolution.
fn flat_letters(word: &[(usize, i8)], v: usize) -> Vec<bool> {
    word.iter()
        .enumerate()
        .map(|(i, &(_, s))| {
            let bit = v >> i & 1 == 1;
            if s > 0 { bit } else { !bit }
        })
        .collect()
}

fn letters_of(word: &BraidWord) -> Vec<(usize, i8)> {
    word.letters().iter().map(|l| (l.index, l.sign.as_i8())).collect()
}

/// Circle counts per vertex of the cube for the standard plat closure.
pub fn oracle_circle_counts(word: &BraidWord) -> Vec<usize> {
    let w = letters_of(word);
    (0..1usize << w.len())
        .map(|v| resolved_circles(word.strands(), &w, &flat_letters(&w, v)).len())
        .collect()
}

// label of circle: 0 = "1", 1 = "x"; a state is one bit per circle, circle j at bit j
fn edge_images(from: &[Vec<usize>], to: &[Vec<usize>], nodes: usize, state: usize) -> Vec<usize> {
    let mut owner_to = vec![0usize; nodes];
    for (j, c) in to.iter().enumerate() {
        for &x in c {
            owner_to[x] = j;
        }
    }
    // w-circles touched by each v-circle
    let touched: Vec<Vec<usize>> = from
        .iter()
        .map(|c| {
            let mut t: Vec<usize> = c.iter().map(|&x| owner_to[x]).collect();
            t.sort_unstable();
            t.dedup();
            t
        })
        .collect();
    let mut partial: Vec<usize> = vec![0];
    let mut done = vec![false; to.len()];
    for (i, t) in touched.iter().enumerate() {
        let xi = state >> i & 1;
        if t.len() == 2 {
            // split: 1 -> 1x + x1, x -> xx
            let (c, d) = (t[0], t[1]);
            done[c] = true;
            done[d] = true;
            let terms: Vec<(usize, usize)> = if xi == 0 { vec![(0, 1), (1, 0)] } else { vec![(1, 1)] };
            partial = partial
                .iter()
                .flat_map(|&p| terms.iter().map(move |&(u, v)| p | u << c | v << d))
                .collect();
        } else {
            let c = t[0];
            if done[c] {
                continue;
            }
            done[c] = true;
            let partners: Vec<usize> = (0..from.len()).filter(|&k| touched[k] == [c]).collect();
            if partners.len() == 2 {
                // merge: 11 -> 1, 1x, x1 -> x, xx -> 0
                let (a, b) = (state >> partners[0] & 1, state >> partners[1] & 1);
                if a == 1 && b == 1 {
                    return Vec::new();
                }
                partial = partial.iter().map(|&p| p | (a | b) << c).collect();
            } else {
                partial = partial.iter().map(|&p| p | xi << c).collect();
            }
        }
    }
    partial
}

/// Total dimension of the homology of the cube complex of the standard plat
/// closure of `word`, by brute force.
pub fn oracle_homology_total(word: &BraidWord) -> usize {
    let w = letters_of(word);
    let n = w.len();
    let strands = word.strands();
    let nodes = (n + 1) * strands;
    let circles: Vec<Vec<Vec<usize>>> = (0..1usize << n)
        .map(|v| resolved_circles(strands, &w, &flat_letters(&w, v)))
        .collect();
    let by_height: Vec<Vec<usize>> = (0..=n)
        .map(|h| (0..1usize << n).filter(|v| v.count_ones() as usize == h).collect())
        .collect();
    let mut offset = vec![0usize; 1 << n];
    let mut dims = vec![0usize; n + 1];
    for (h, vs) in by_height.iter().enumerate() {
        for &v in vs {
            offset[v] = dims[h];
            dims[h] += 1 << circles[v].len();
        }
    }
    let mut rank = 0;
    for h in 0..n {
        let mut m: Dense = vec![vec![0u8; dims[h]]; dims[h + 1]];
        for &v in &by_height[h] {
            for b in (0..n).filter(|b| v >> b & 1 == 0) {
                let u = v | 1 << b;
                for s in 0..1usize << circles[v].len() {
                    for t in edge_images(&circles[v], &circles[u], nodes, s) {
                        m[offset[u] + t][offset[v] + s] ^= 1;
                    }
                }
            }
        }
        rank += naive_rank(&m);
    }
    dims.iter().sum::<usize>() - 2 * rank
}

/// Page dimensions per weight by iterated cancellation of the lowest-shift
/// arrows. `d[target][source]`; returns `E_1 .. E_{spread+2}`.
pub fn cancellation_pages(weights: &[i64], d: &Dense) -> Vec<Vec<usize>> {
    let n = weights.len();
    let lo = *weights.iter().min().unwrap_or(&0);
    let hi = *weights.iter().max().unwrap_or(&0);
    let nw = (hi - lo + 1) as usize;
    let mut alive = vec![true; n];
    let mut d = d.clone();
    let count = |alive: &[bool]| {
        let mut dims = vec![0usize; nw];
        for g in (0..n).filter(|&g| alive[g]) {
            dims[(weights[g] - lo) as usize] += 1;
        }
        dims
    };
    let mut pages = vec![];
    for r in 0..=nw {
        loop {
            let arrow = (0..n)
                .filter(|&x| alive[x])
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .find(|&(x, y)| x != y && alive[y] && d[y][x] == 1 && weights[y] - weights[x] == r as i64);
            let Some((x, y)) = arrow else { break };
            let into_y: Vec<usize> = (0..n).filter(|&b| alive[b] && d[y][b] == 1).collect();
            let from_x: Vec<usize> = (0..n).filter(|&a| alive[a] && d[a][x] == 1).collect();
            for &a in &from_x {
                for &b in &into_y {
                    d[a][b] ^= 1;
                }
            }
            alive[x] = false;
            alive[y] = false;
        }
        pages.push(count(&alive));
    }
    pages
}

pub fn weight_block(fc: &FilteredComplex, w: i64) -> Dense {
    match fc.component(1, w) {
        Some(b) => to_dense(&b.to_dense()),
        None => vec![vec![0; fc.dim(w)]; fc.dim(w + 1)],
    }
}

/// Rank-one weight-2 block `y ⊗ φ` that makes `d_2` hit `[y]` from `[z]`.
pub fn killing_block(fc: &FilteredComplex, w: i64) -> Option<F2Matrix> {
    let (lo, hi) = (fc.min_weight(), fc.max_weight());
    let homology_rep = |w: i64| -> Option<(Vec<u8>, Dense)> {
        let dim = fc.dim(w);
        let out = if w < hi { weight_block(fc, w) } else { vec![] };
        let cycles = if w < hi { naive_kernel(&out, dim) } else { (0..dim).map(|i| (0..dim).map(|j| (i == j) as u8).collect()).collect() };
        let bounds: Dense = if w > lo { transpose(&weight_block(fc, w - 1), fc.dim(w - 1)) } else { vec![] };
        let mut span = Span::default();
        for b in &bounds {
            span.insert(b);
        }
        let z = cycles.into_iter().find(|z| !span.contains(z))?;
        Some((z, bounds))
    };
    let (z, bounds) = homology_rep(w)?;
    let (y, _) = homology_rep(w + 2)?;
    let phi = naive_kernel(&bounds, fc.dim(w)).into_iter().find(|f| dot(f, &z) == 1)?;
    let rows: Dense = y.iter().map(|&yi| phi.iter().map(|&f| f & yi).collect()).collect();
    Some(from_dense(&rows, fc.dim(w)))
}

/// Weight-2 blocks `d_1 K` (from `w`) and `K d_1` (from `w - 1`) for a
/// random `K` of shift one supported on weight `w`; adding both keeps `D^2 = 0`.
pub fn conjugation_blocks(rng: &mut impl Rng, fc: &FilteredComplex, w: i64) -> Vec<(i64, F2Matrix)> {
    let k = from_dense(&random_dense(rng, fc.dim(w + 1), fc.dim(w), 0.3), fc.dim(w));
    let mut out = Vec::new();
    if w + 2 <= fc.max_weight() {
        if let Some(d) = fc.component(1, w + 1) {
            out.push((w, d.to_dense().matmul(&k).unwrap()));
        }
    }
    if w > fc.min_weight() {
        if let Some(d) = fc.component(1, w - 1) {
            out.push((w - 1, k.matmul(&d.to_dense()).unwrap()));
        }
    }
    out
}
