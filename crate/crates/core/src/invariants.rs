//! Cross-checks that do not go through the cube: the link determinant from a
//! Goeritz matrix of the plat diagram, and the doubling caused by the two
//! auxiliary strands.
//!
//! Regions of the plat diagram are tracked by gaps between strand
//! positions. Gap `j` (0 to `strands`) lies between strands `j` and `j + 1`;
//! at every level between two letters each gap is a piece of some region.
//! A letter `σ_k` cuts gap `k` and touches gaps `k - 1` and `k + 1`. Gap
//! parity is a checkerboard coloring.

use serde::Serialize;

use crate::tangle::{BraidWord, PlatClosure, Sign, UnionFind};
use crate::Error;

/// Which color class of regions spans the Goeritz matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Shade {
    OddGaps,
    EvenGaps,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoeritzData {
    pub shade: Shade,
    /// Number of shaded regions (the unreduced matrix size).
    pub regions: usize,
    /// Unreduced, symmetric, rows summing to zero.
    pub matrix: Vec<Vec<i64>>,
    /// `|det|` of the matrix with the first row and column removed.
    pub determinant: u64,
    /// The projection of the diagram is disconnected.
    pub split_diagram: bool,
}

fn region_map(word: &BraidWord, plat: &PlatClosure) -> (UnionFind, impl Fn(usize, usize) -> usize) {
    let n = plat.strands();
    let gaps = n + 1;
    let levels = word.len() + 1;
    let outer = levels * gaps;
    let node = move |t: usize, j: usize| t * gaps + j;
    let mut uf = UnionFind::new(outer + 1);

    for (i, l) in word.letters().iter().enumerate() {
        for j in (0..gaps).filter(|&j| j != l.index) {
            uf.union(node(i, j), node(i + 1, j));
        }
    }
    // below the cups and above the caps: a gap belongs to the innermost
    // enclosing pair, or to the unbounded region if none encloses it
    let close = |uf: &mut UnionFind, pairs: &[(usize, usize)], level: usize| {
        for j in 0..gaps {
            let inner = pairs.iter().filter(|&&(a, b)| a <= j && j < b).min_by_key(|&&(a, b)| b - a);
            match inner {
                Some(&(a, _)) => uf.union(node(level, j), node(level, a)),
                None => uf.union(node(level, j), outer),
            }
        }
    };
    close(&mut uf, &plat.cup_pairs(), 0);
    close(&mut uf, &plat.cap_pairs(), levels - 1);
    (uf, node)
}

fn diagram_is_split(word: &BraidWord, plat: &PlatClosure) -> bool {
    let n = plat.strands();
    let levels = word.len() + 1;
    let node = |t: usize, p: usize| t * n + p;
    let mut uf = UnionFind::new(levels * n);
    for (i, l) in word.letters().iter().enumerate() {
        let k = l.index;
        for p in 0..n {
            uf.union(node(i, p), node(i + 1, p));
        }
        // the crossing is a 4-valent vertex joining both strands
        uf.union(node(i, k - 1), node(i, k));
    }
    for (a, b) in plat.cup_pairs() {
        uf.union(node(0, a - 1), node(0, b - 1));
    }
    for (a, b) in plat.cap_pairs() {
        uf.union(node(levels - 1, a - 1), node(levels - 1, b - 1));
    }
    let root = uf.find(0);
    (0..levels * n).any(|x| uf.find(x) != root)
}

/// Goeritz matrix of the plat diagram of `word` for the chosen shading.
pub fn goeritz(word: &BraidWord, plat: &PlatClosure, shade: Shade) -> Result<GoeritzData, Error> {
    if word.strands() != plat.strands() {
        return Err(Error::Input(format!(
            "word has {} strands, plat closure {}",
            word.strands(),
            plat.strands()
        )));
    }
    let gaps = plat.strands() + 1;
    let (mut uf, node) = region_map(word, plat);
    let shaded = |j: usize| match shade {
        Shade::OddGaps => j % 2 == 1,
        Shade::EvenGaps => j % 2 == 0,
    };
    let levels = word.len() + 1;
    let mut roots: Vec<usize> = (0..levels)
        .flat_map(|t| (0..gaps).map(move |j| (t, j)))
        .filter(|&(_, j)| shaded(j))
        .map(|(t, j)| uf.find(node(t, j)))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    let idx = |r: usize| roots.binary_search(&r).expect("shaded region");
    let m = roots.len();
    let mut g = vec![vec![0i64; m]; m];

    for (i, l) in word.letters().iter().enumerate() {
        let k = l.index;
        let (a, b) = if shaded(k) {
            (node(i, k), node(i + 1, k))
        } else {
            (node(i, k - 1), node(i, k + 1))
        };
        let (ra, rb) = (idx(uf.find(a)), idx(uf.find(b)));
        if ra == rb {
            continue;
        }
        // crossing type relative to the shading; flips with the sign and with
        // which pair of opposite regions is shaded
        let mut eta: i64 = if l.sign == Sign::Pos { 1 } else { -1 };
        if k % 2 == 1 {
            eta = -eta;
        }
        if shade == Shade::EvenGaps {
            eta = -eta;
        }
        g[ra][rb] -= eta;
        g[rb][ra] -= eta;
        g[ra][ra] += eta;
        g[rb][rb] += eta;
    }
    let reduced: Vec<Vec<i64>> = g.iter().skip(1).map(|row| row[1..].to_vec()).collect();
    let det = bareiss_det(&reduced).unsigned_abs();
    Ok(GoeritzData {
        shade,
        regions: m,
        matrix: g,
        determinant: det as u64,
        split_diagram: diagram_is_split(word, plat),
    })
}

/// Integer determinant by fraction-free elimination.
pub fn bareiss_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Result of [`determinant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Determinant {
    pub value: u64,
    pub split_diagram: bool,
}

/// `|det|` of the Goeritz matrix of the plat diagram. A split diagram
/// gives 0 and sets the flag.
pub fn determinant(word: &BraidWord, plat: &PlatClosure) -> Result<Determinant, Error> {
    let g = goeritz(word, plat, Shade::OddGaps)?;
    Ok(Determinant {
        value: if g.split_diagram { 0 } else { g.determinant },
        split_diagram: g.split_diagram,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuxDoubling {
    pub without_aux: usize,
    pub with_aux: usize,
    pub passed: bool,
}

/// `E_2` total with the auxiliary strands must be exactly twice the total without.
pub fn aux_doubling_check(word: &BraidWord, plat: &PlatClosure) -> Result<AuxDoubling, Error> {
    let without_aux = crate::e2_total(word, plat, false)?;
    let with_aux = crate::e2_total(word, plat, true)?;
    Ok(AuxDoubling {
        without_aux,
        with_aux,
        passed: with_aux == 2 * without_aux,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangle::parse_braid_word;

    fn det(word: &str, strands: usize) -> Determinant {
        let w = parse_braid_word(word, strands).unwrap();
        determinant(&w, &PlatClosure::standard(strands).unwrap()).unwrap()
    }

    #[test]
    fn bareiss_small() {
        assert_eq!(bareiss_det(&[]), 1);
        assert_eq!(bareiss_det(&[vec![-3]]), -3);
        assert_eq!(bareiss_det(&[vec![2, -1], vec![-1, 2]]), 3);
        assert_eq!(bareiss_det(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(bareiss_det(&[vec![1, 2], vec![2, 4]]), 0);
        assert_eq!(bareiss_det(&[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 2]]), 6);
        assert_eq!(bareiss_det(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]), -1);
    }

    #[test]
    fn unknot_and_unlink() {
        assert_eq!(det("", 2), Determinant { value: 1, split_diagram: false });
        assert_eq!(det("", 4), Determinant { value: 0, split_diagram: true });
    }

    #[test]
    fn trefoil_goeritz_matrix() {
        // odd gaps: the columns over gaps 1 and 3, joined by three crossings
        let w = parse_braid_word("s2 s2 s2", 4).unwrap();
        let g = goeritz(&w, &PlatClosure::standard(4).unwrap(), Shade::OddGaps).unwrap();
        assert_eq!(g.regions, 2);
        assert_eq!(g.matrix[0][1].abs(), 3);
        assert_eq!(g.determinant, 3);
        let even = goeritz(&w, &PlatClosure::standard(4).unwrap(), Shade::EvenGaps).unwrap();
        assert_eq!(even.determinant, 3);
    }

    #[test]
    fn hopf_link() {
        assert_eq!(det("s2 s2", 4).value, 2);
    }

    #[test]
    fn goeritz_matrix_is_symmetric() {
        let w = parse_braid_word("s2 s1^-1 s2 s3^-1 s2", 4).unwrap();
        let g = goeritz(&w, &PlatClosure::standard(4).unwrap(), Shade::OddGaps).unwrap();
        for i in 0..g.regions {
            assert_eq!(g.matrix[i].iter().sum::<i64>(), 0);
            for j in 0..g.regions {
                assert_eq!(g.matrix[i][j], g.matrix[j][i]);
            }
        }
    }
}
