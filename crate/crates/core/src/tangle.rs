//! Braid words, plat closures, and crossingless (Temperley–Lieb) tangles.
//!
//! A [`FlatTangle`] lives in a horizontal strip with `bottom` boundary points
//! on the lower edge and `top` points on the upper edge, numbered left to
//! right. Endpoints are addressed as [`Endpoint::Bottom`]/[`Endpoint::Top`]
//! with 0-based positions; strand and generator indices in braid words are
//! 1-based, as is customary for `σ_k`.
//!
//! Only the boundary matching and the number of closed circles are kept;
//! everything else about the interior is irrelevant to the TQFT.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TangleError {
    #[error("malformed braid token {0:?}: expected s<k> or s<k>^-1")]
    MalformedToken(String),
    #[error("generator index {index} out of range for {strands} strands (need 1 <= k <= {max})", max = .strands.saturating_sub(1))]
    IndexOutOfRange { index: usize, strands: usize },
    #[error("token {token:?}: generator index out of range for {strands} strands (need 1 <= k <= {max})", max = .strands.saturating_sub(1))]
    TokenOutOfRange { token: String, strands: usize },
    #[error("strand count {0} must be a positive even number")]
    OddStrands(usize),
    #[error("boundary mismatch: lower tangle has {lower_top} top points, upper has {upper_bottom} bottom points")]
    BoundaryMismatch { lower_top: usize, upper_bottom: usize },
    #[error("matching is not a perfect pairing of {0} points")]
    NotPerfect(usize),
    #[error("matching is not planar: pairs {0:?} and {1:?} interleave")]
    NotPlanar((usize, usize), (usize, usize)),
    #[error("plat closure is for {plat} strands but the tangle has {tangle}")]
    PlatSizeMismatch { plat: usize, tangle: usize },
    #[error("malformed plat specification {0:?}")]
    MalformedPlat(String),
}

/// Crossing sign of a braid letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

/// One generator `σ_index^{±1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub index: usize,
    pub sign: Sign,
}

impl Letter {
    pub fn new(index: usize, sign: Sign) -> Self {
        Self { index, sign }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Pos => write!(f, "s{}", self.index),
            Sign::Neg => write!(f, "s{}^-1", self.index),
        }
    }
}

/// A braid word on an even number of strands, read left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<Letter>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<Self, TangleError> {
        if strands == 0 || strands % 2 == 1 {
            return Err(TangleError::OddStrands(strands));
        }
        for l in &letters {
            if l.index == 0 || l.index >= strands {
                return Err(TangleError::IndexOutOfRange {
                    index: l.index,
                    strands,
                });
            }
        }
        Ok(Self { strands, letters })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The same word on two more strands, which no letter touches.
    pub fn with_aux_strands(&self) -> Self {
        Self {
            strands: self.strands + 2,
            letters: self.letters.clone(),
        }
    }

    /// Inserts `σ_k σ_k^{-1}` before position `at`.
    pub fn with_cancelling_pair(&self, at: usize, index: usize) -> Result<Self, TangleError> {
        let mut letters = self.letters.clone();
        let at = at.min(letters.len());
        letters.splice(at..at, [Letter::new(index, Sign::Pos), Letter::new(index, Sign::Neg)]);
        Self::new(self.strands, letters)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses whitespace-separated `s<k>` / `s<k>^-1` tokens.
pub fn parse_braid_word(text: &str, strands: usize) -> Result<BraidWord, TangleError> {
    if strands == 0 || strands % 2 == 1 {
        return Err(TangleError::OddStrands(strands));
    }
    let letters = text
        .split_whitespace()
        .map(|tok| {
            let malformed = || TangleError::MalformedToken(tok.to_string());
            let body = tok.strip_prefix('s').ok_or_else(malformed)?;
            let (digits, sign) = match body.strip_suffix("^-1") {
                Some(d) => (d, Sign::Neg),
                None => (body, Sign::Pos),
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed());
            }
            let index: usize = digits.parse().map_err(|_| malformed())?;
            if index == 0 || index >= strands {
                return Err(TangleError::TokenOutOfRange {
                    token: tok.to_string(),
                    strands,
                });
            }
            Ok(Letter::new(index, sign))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BraidWord { strands, letters })
}

/// Reverses the word and inverts every letter.
pub fn mirror(b: &BraidWord) -> BraidWord {
    BraidWord {
        strands: b.strands,
        letters: b
            .letters
            .iter()
            .rev()
            .map(|l| Letter::new(l.index, l.sign.flip()))
            .collect(),
    }
}

/// A boundary point of a flat tangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Bottom(usize),
    Top(usize),
}

/// Crossingless tangle: a planar perfect matching of its boundary points
/// plus a count of closed circles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlatTangle {
    bottom: usize,
    top: usize,
    // partner[e] for e in 0..bottom+top; bottom i -> i, top j -> bottom + j
    partner: Vec<usize>,
    circles: usize,
}

impl FlatTangle {
    /// Validates a matching given as endpoint pairs.
    pub fn new(
        bottom: usize,
        top: usize,
        pairs: &[(Endpoint, Endpoint)],
        circles: usize,
    ) -> Result<Self, TangleError> {
        let n = bottom + top;
        let index = |e: Endpoint| match e {
            Endpoint::Bottom(i) if i < bottom => Some(i),
            Endpoint::Top(j) if j < top => Some(bottom + j),
            _ => None,
        };
        let mut partner = vec![usize::MAX; n];
        for &(a, b) in pairs {
            let (Some(a), Some(b)) = (index(a), index(b)) else {
                return Err(TangleError::NotPerfect(n));
            };
            if a == b || partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(TangleError::NotPerfect(n));
            }
            partner[a] = b;
            partner[b] = a;
        }
        if partner.iter().any(|&p| p == usize::MAX) {
            return Err(TangleError::NotPerfect(n));
        }
        let t = Self {
            bottom,
            top,
            partner,
            circles,
        };
        t.check_planar()?;
        Ok(t)
    }

    /// Closed diagram consisting of `circles` circles and no boundary.
    pub fn closed(circles: usize) -> Self {
        Self {
            bottom: 0,
            top: 0,
            partner: Vec::new(),
            circles,
        }
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn circles(&self) -> usize {
        self.circles
    }

    pub fn is_closed(&self) -> bool {
        self.bottom == 0 && self.top == 0
    }

    fn endpoint(&self, e: usize) -> Endpoint {
        if e < self.bottom {
            Endpoint::Bottom(e)
        } else {
            Endpoint::Top(e - self.bottom)
        }
    }

    pub fn partner(&self, e: Endpoint) -> Endpoint {
        let idx = match e {
            Endpoint::Bottom(i) => i,
            Endpoint::Top(j) => self.bottom + j,
        };
        self.endpoint(self.partner[idx])
    }

    /// Matching as sorted endpoint pairs, each pair ordered.
    pub fn pairs(&self) -> Vec<(Endpoint, Endpoint)> {
        let mut out: Vec<_> = (0..self.partner.len())
            .filter(|&e| e < self.partner[e])
            .map(|e| (self.endpoint(e), self.endpoint(self.partner[e])))
            .collect();
        out.sort();
        out
    }

    // Cyclic order around the strip: bottom left to right, then top right to left.
    fn cyclic_position(&self, e: usize) -> usize {
        if e < self.bottom {
            e
        } else {
            self.bottom + (self.top - 1 - (e - self.bottom))
        }
    }

    fn check_planar(&self) -> Result<(), TangleError> {
        let n = self.partner.len();
        let mut by_pos = vec![0usize; n];
        for e in 0..n {
            by_pos[self.cyclic_position(e)] = e;
        }
        // a perfect matching on a circle is planar iff it is a balanced parenthesization
        let mut stack: Vec<usize> = Vec::new();
        for pos in 0..n {
            let e = by_pos[pos];
            let q = self.cyclic_position(self.partner[e]);
            if q > pos {
                stack.push(pos);
            } else {
                let open = stack.pop().expect("partner seen earlier must be open");
                if open != q {
                    return Err(TangleError::NotPlanar((q, pos), (open, self.cyclic_position(self.partner[by_pos[open]]))));
                }
            }
        }
        Ok(())
    }

    pub fn is_planar(&self) -> bool {
        self.check_planar().is_ok()
    }
}

/// The two crossingless pictures a twist resolves into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementaryKind {
    Identity,
    /// Cup on bottom points `k, k+1` and cap on top points `k, k+1` (1-based).
    CupCap(usize),
}

pub fn elementary_tangle(kind: ElementaryKind, strands: usize) -> Result<FlatTangle, TangleError> {
    let n = strands;
    let mut pairs = Vec::with_capacity(n);
    match kind {
        ElementaryKind::Identity => {
            pairs.extend((0..n).map(|i| (Endpoint::Bottom(i), Endpoint::Top(i))));
        }
        ElementaryKind::CupCap(k) => {
            if k == 0 || k >= n {
                return Err(TangleError::IndexOutOfRange { index: k, strands: n });
            }
            let (a, b) = (k - 1, k);
            pairs.push((Endpoint::Bottom(a), Endpoint::Bottom(b)));
            pairs.push((Endpoint::Top(a), Endpoint::Top(b)));
            pairs.extend(
                (0..n)
                    .filter(|&i| i != a && i != b)
                    .map(|i| (Endpoint::Bottom(i), Endpoint::Top(i))),
            );
        }
    }
    FlatTangle::new(n, n, &pairs, 0)
}

/// Minimal union-find with path halving.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so roots are canonical minima
            if ra < rb {
                self.parent[rb] = ra;
            } else {
                self.parent[ra] = rb;
            }
        }
    }
}

/// Stacks `upper` on top of `lower`.
pub fn compose(lower: &FlatTangle, upper: &FlatTangle) -> Result<FlatTangle, TangleError> {
    if lower.top != upper.bottom {
        return Err(TangleError::BoundaryMismatch {
            lower_top: lower.top,
            upper_bottom: upper.bottom,
        });
    }
    // nodes: lower endpoints, then upper endpoints
    let nl = lower.partner.len();
    let nu = upper.partner.len();
    let mut uf = UnionFind::new(nl + nu);
    for e in 0..nl {
        uf.union(e, lower.partner[e]);
    }
    for e in 0..nu {
        uf.union(nl + e, nl + upper.partner[e]);
    }
    for j in 0..lower.top {
        uf.union(lower.bottom + j, nl + j);
    }

    let outer: Vec<usize> = (0..lower.bottom)
        .chain((0..upper.top).map(|j| nl + upper.bottom + j))
        .collect();
    let mut has_outer = vec![false; nl + nu];
    for &o in &outer {
        let r = uf.find(o);
        has_outer[r] = true;
    }
    let mut loop_roots = Vec::new();
    for j in 0..lower.top {
        let r = uf.find(lower.bottom + j);
        if !has_outer[r] {
            loop_roots.push(r);
        }
    }
    loop_roots.sort_unstable();
    loop_roots.dedup();

    let bottom = lower.bottom;
    let top = upper.top;
    let mut partner = vec![usize::MAX; bottom + top];
    let mut first_in: std::collections::HashMap<usize, usize> = Default::default();
    for (k, &o) in outer.iter().enumerate() {
        let r = uf.find(o);
        if let Some(other) = first_in.remove(&r) {
            partner[k] = other;
            partner[other] = k;
        } else {
            first_in.insert(r, k);
        }
    }
    debug_assert!(first_in.is_empty());
    Ok(FlatTangle {
        bottom,
        top,
        partner,
        circles: lower.circles + upper.circles + loop_roots.len(),
    })
}

/// Cup and cap matchings used to close a braid into a link.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlatClosure {
    strands: usize,
    cups: FlatTangle,
    caps: FlatTangle,
}

impl PlatClosure {
    /// Pairs `2i-1` with `2i` at both ends.
    pub fn standard(strands: usize) -> Result<Self, TangleError> {
        if strands == 0 || strands % 2 == 1 {
            return Err(TangleError::OddStrands(strands));
        }
        let pairs: Vec<(usize, usize)> = (0..strands / 2).map(|i| (2 * i + 1, 2 * i + 2)).collect();
        Self::new(strands, &pairs, &pairs)
    }

    /// Explicit cup and cap pairings, 1-based strand positions.
    pub fn new(strands: usize, cups: &[(usize, usize)], caps: &[(usize, usize)]) -> Result<Self, TangleError> {
        if strands == 0 || strands % 2 == 1 {
            return Err(TangleError::OddStrands(strands));
        }
        let conv = |pairs: &[(usize, usize)], top: bool| -> Result<Vec<(Endpoint, Endpoint)>, TangleError> {
            pairs
                .iter()
                .map(|&(a, b)| {
                    if a == 0 || b == 0 || a > strands || b > strands {
                        return Err(TangleError::NotPerfect(strands));
                    }
                    Ok(if top {
                        (Endpoint::Bottom(a - 1), Endpoint::Bottom(b - 1))
                    } else {
                        (Endpoint::Top(a - 1), Endpoint::Top(b - 1))
                    })
                })
                .collect()
        };
        let cups = FlatTangle::new(0, strands, &conv(cups, false)?, 0)?;
        let caps = FlatTangle::new(strands, 0, &conv(caps, true)?, 0)?;
        Ok(Self { strands, cups, caps })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    /// The cup tangle (`0 -> strands`).
    pub fn cups(&self) -> &FlatTangle {
        &self.cups
    }

    /// The cap tangle (`strands -> 0`).
    pub fn caps(&self) -> &FlatTangle {
        &self.caps
    }

    /// 1-based partner of strand position `p` among the cups.
    pub fn cup_partner(&self, p: usize) -> usize {
        match self.cups.partner(Endpoint::Top(p - 1)) {
            Endpoint::Top(q) => q + 1,
            Endpoint::Bottom(_) => unreachable!("cups have no bottom boundary"),
        }
    }

    /// 1-based partner of strand position `p` among the caps.
    pub fn cap_partner(&self, p: usize) -> usize {
        match self.caps.partner(Endpoint::Bottom(p - 1)) {
            Endpoint::Bottom(q) => q + 1,
            Endpoint::Top(_) => unreachable!("caps have no top boundary"),
        }
    }

    /// Cup pairs as 1-based `(a, b)` with `a < b`, sorted.
    pub fn cup_pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.strands)
            .filter_map(|p| {
                let q = self.cup_partner(p);
                (p < q).then_some((p, q))
            })
            .collect()
    }

    pub fn cap_pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.strands)
            .filter_map(|p| {
                let q = self.cap_partner(p);
                (p < q).then_some((p, q))
            })
            .collect()
    }

    /// Appends one more cup/cap pair on two new rightmost strands.
    pub fn with_aux_pair(&self) -> Self {
        let n = self.strands;
        let mut cups = self.cup_pairs();
        let mut caps = self.cap_pairs();
        cups.push((n + 1, n + 2));
        caps.push((n + 1, n + 2));
        Self::new(n + 2, &cups, &caps).expect("adding a rightmost pair keeps planarity")
    }

    pub fn is_standard(&self) -> bool {
        Self::standard(self.strands).is_ok_and(|s| &s == self)
    }
}

impl fmt::Display for PlatClosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_standard() {
            return f.write_str("standard");
        }
        let show = |pairs: Vec<(usize, usize)>| {
            pairs
                .iter()
                .map(|(a, b)| format!("{a}-{b}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{};{}", show(self.cup_pairs()), show(self.cap_pairs()))
    }
}

/// Parses `standard` or `<cups>;<caps>` with comma-separated `a-b` pairs,
/// e.g. `1-4,2-3;1-2,3-4`.
pub fn parse_plat(text: &str, strands: usize) -> Result<PlatClosure, TangleError> {
    let text = text.trim();
    if text.eq_ignore_ascii_case("standard") {
        return PlatClosure::standard(strands);
    }
    let bad = || TangleError::MalformedPlat(text.to_string());
    let (cups, caps) = text.split_once(';').ok_or_else(bad)?;
    let parse_pairs = |s: &str| -> Result<Vec<(usize, usize)>, TangleError> {
        s.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                let (a, b) = p.trim().split_once('-').ok_or_else(bad)?;
                Ok((
                    usize::from_str(a.trim()).map_err(|_| bad())?,
                    usize::from_str(b.trim()).map_err(|_| bad())?,
                ))
            })
            .collect()
    };
    PlatClosure::new(strands, &parse_pairs(cups)?, &parse_pairs(caps)?)
}

/// Closes `t` with the plat's cups below and caps above.
pub fn close_plat(t: &FlatTangle, plat: &PlatClosure) -> Result<FlatTangle, TangleError> {
    if t.bottom != plat.strands || t.top != plat.strands {
        return Err(TangleError::PlatSizeMismatch {
            plat: plat.strands,
            tangle: t.bottom.max(t.top),
        });
    }
    let lower = compose(&plat.cups, t)?;
    compose(&lower, &plat.caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Endpoint::{Bottom as B, Top as T};

    fn id(n: usize) -> FlatTangle {
        elementary_tangle(ElementaryKind::Identity, n).unwrap()
    }

    fn e(k: usize, n: usize) -> FlatTangle {
        elementary_tangle(ElementaryKind::CupCap(k), n).unwrap()
    }

    #[test]
    fn parse_examples() {
        let w = parse_braid_word("s2 s2 s2", 4).unwrap();
        assert_eq!(w.letters(), &[Letter::new(2, Sign::Pos); 3]);
        let w = parse_braid_word("s1^-1", 4).unwrap();
        assert_eq!(w.letters(), &[Letter::new(1, Sign::Neg)]);
        assert!(parse_braid_word("", 2).unwrap().is_empty());
        assert_eq!(parse_braid_word("  s1\ts3^-1 \n", 4).unwrap().len(), 2);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_braid_word("s1 x2", 4),
            Err(TangleError::MalformedToken("x2".into()))
        );
        assert!(matches!(parse_braid_word("s^-1", 4), Err(TangleError::MalformedToken(_))));
        assert!(matches!(parse_braid_word("s1^2", 4), Err(TangleError::MalformedToken(_))));
        assert!(matches!(parse_braid_word("s+1", 4), Err(TangleError::MalformedToken(_))));
        assert_eq!(
            parse_braid_word("s4", 4),
            Err(TangleError::TokenOutOfRange {
                token: "s4".into(),
                strands: 4
            })
        );
        assert!(matches!(parse_braid_word("s0^-1", 4), Err(TangleError::TokenOutOfRange { .. })));
        assert_eq!(parse_braid_word("s1", 3), Err(TangleError::OddStrands(3)));
        assert_eq!(parse_braid_word("", 0), Err(TangleError::OddStrands(0)));
    }

    #[test]
    fn display_round_trips() {
        let w = parse_braid_word("s1 s3^-1 s2", 4).unwrap();
        assert_eq!(parse_braid_word(&w.to_string(), 4).unwrap(), w);
    }

    #[test]
    fn mirror_examples() {
        let w = BraidWord::new(4, vec![Letter::new(2, Sign::Pos)]).unwrap();
        assert_eq!(mirror(&w).letters(), &[Letter::new(2, Sign::Neg)]);
        let empty = BraidWord::new(4, vec![]).unwrap();
        assert_eq!(mirror(&empty), empty);
        let w = parse_braid_word("s1 s2^-1", 4).unwrap();
        assert_eq!(mirror(&w), parse_braid_word("s2 s1^-1", 4).unwrap());
        assert_eq!(mirror(&mirror(&w)), w);
    }

    #[test]
    fn elementary_examples() {
        assert_eq!(id(2).pairs(), vec![(B(0), T(0)), (B(1), T(1))]);
        assert_eq!(e(1, 2).pairs(), vec![(B(0), B(1)), (T(0), T(1))]);
        let t = e(2, 4);
        assert_eq!(t.partner(B(0)), T(0));
        assert_eq!(t.partner(B(3)), T(3));
        assert_eq!(t.partner(B(1)), B(2));
        assert_eq!(t.partner(T(1)), T(2));
        assert_eq!(t.circles(), 0);
        assert!(matches!(
            elementary_tangle(ElementaryKind::CupCap(4), 4),
            Err(TangleError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn compose_examples() {
        let c = compose(&id(2), &id(2)).unwrap();
        assert_eq!(c, id(2));
        let c = compose(&e(1, 2), &e(1, 2)).unwrap();
        assert_eq!(c.pairs(), e(1, 2).pairs());
        assert_eq!(c.circles(), 1);

        let cup = FlatTangle::new(0, 2, &[(T(0), T(1))], 0).unwrap();
        let cap = FlatTangle::new(2, 0, &[(B(0), B(1))], 0).unwrap();
        let closed = compose(&cup, &cap).unwrap();
        assert!(closed.is_closed());
        assert_eq!(closed.circles(), 1);

        assert!(matches!(compose(&id(2), &id(4)), Err(TangleError::BoundaryMismatch { .. })));
    }

    #[test]
    fn plat_examples() {
        let p2 = PlatClosure::standard(2).unwrap();
        let p4 = PlatClosure::standard(4).unwrap();
        assert_eq!(close_plat(&id(2), &p2).unwrap().circles(), 1);
        assert_eq!(close_plat(&id(4), &p4).unwrap().circles(), 2);
        assert_eq!(close_plat(&e(2, 4), &p4).unwrap().circles(), 1);
        assert!(matches!(close_plat(&id(2), &p4), Err(TangleError::PlatSizeMismatch { .. })));
    }

    // Counts cycles in a 2-regular multigraph given as an arc list by walking it.
    fn trace_circles(arcs: &[(u32, u32)]) -> usize {
        let mut adj: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
        for (i, &(a, b)) in arcs.iter().enumerate() {
            adj.entry(a).or_default().push(i);
            adj.entry(b).or_default().push(i);
        }
        let mut used = vec![false; arcs.len()];
        let mut circles = 0;
        for start in 0..arcs.len() {
            if used[start] {
                continue;
            }
            circles += 1;
            let mut arc = start;
            let mut at = arcs[start].1;
            loop {
                used[arc] = true;
                match adj[&at].iter().find(|&&x| !used[x]) {
                    Some(&next) => {
                        let (a, b) = arcs[next];
                        at = if a == at { b } else { a };
                        arc = next;
                    }
                    None => break,
                }
            }
        }
        circles
    }

    #[test]
    fn cupcap_two_on_four_strands_by_arc_tracing() {
        // points 10+i below the tangle, 20+i above it
        let arcs = [
            (11, 12),
            (13, 14),
            (11, 21),
            (14, 24),
            (12, 13),
            (22, 23),
            (21, 22),
            (23, 24),
        ];
        let expected = trace_circles(&arcs);
        assert_eq!(expected, 1);
        let p4 = PlatClosure::standard(4).unwrap();
        assert_eq!(close_plat(&e(2, 4), &p4).unwrap().circles(), expected);
    }

    #[test]
    fn planarity_detection() {
        // bottom 0-2 and bottom 1-3 interleave
        let r = FlatTangle::new(4, 0, &[(B(0), B(2)), (B(1), B(3))], 0);
        assert!(matches!(r, Err(TangleError::NotPlanar(..))));
        // straight strands crossing: b0-t1, b1-t0
        let r = FlatTangle::new(2, 2, &[(B(0), T(1)), (B(1), T(0))], 0);
        assert!(matches!(r, Err(TangleError::NotPlanar(..))));
        let r = FlatTangle::new(2, 2, &[(B(0), T(0))], 0);
        assert!(matches!(r, Err(TangleError::NotPerfect(4))));
    }

    #[test]
    fn plat_parsing() {
        let p = parse_plat("standard", 4).unwrap();
        assert!(p.is_standard());
        assert_eq!(p.to_string(), "standard");
        let q = parse_plat("1-4,2-3;1-2,3-4", 4).unwrap();
        assert!(!q.is_standard());
        assert_eq!(q.cup_partner(1), 4);
        assert_eq!(q.cap_partner(3), 4);
        assert_eq!(parse_plat(&q.to_string(), 4).unwrap(), q);
        assert!(parse_plat("1-3,2-4;1-2,3-4", 4).is_err());
        assert!(matches!(parse_plat("nonsense", 4), Err(TangleError::MalformedPlat(_))));
        assert_eq!(p.with_aux_pair(), PlatClosure::standard(6).unwrap());
    }
}
