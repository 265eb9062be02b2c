//! Four-ended tangles and the Conway operations on them.
//!
//! A crossing stores the arcs at its four corners in counterclockwise order;
//! slots 0 and 2 are the under-strand, slots 1 and 3 the over-strand. Tangle
//! endpoints are indexed `NW = 0, NE = 1, SE = 2, SW = 3`.
//!
//! Conventions:
//! * the integer tangle `n` is `|n|` horizontal half-twists; `[1]` has its
//!   over-strand running SW to NE;
//! * `reflect` is the planar reflection in the NW-SE diagonal, over/under kept,
//!   so that `[n]` goes to the vertical twist `1/n`;
//! * `a b` is `reflect(a) + b`, `a,b` is `reflect(a) + reflect(b)`, `t+` is
//!   `t + [1]`;
//! * the numerator closure joins NW to NE and SW to SE.

use crate::conway::Tangle;
use crate::error::{Error, Result};

pub const NW: usize = 0;
pub const NE: usize = 1;
pub const SE: usize = 2;
pub const SW: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tangle4 {
    pub crossings: Vec<[usize; 4]>,
    pub ends: [usize; 4],
    pub n_arcs: usize,
    /// Closed components without crossings.
    pub loops: usize,
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Arc bookkeeping shared by tangle gluing and diagram assembly: arcs are
/// merged at junctions, then renumbered; components that lost every
/// occurrence become free loops.
pub(crate) fn compact(
    n_arcs: usize,
    crossings: &[[usize; 4]],
    open_ends: &[usize],
    junctions: &[(usize, usize)],
) -> (Vec<[usize; 4]>, Vec<usize>, usize, usize) {
    let mut uf = UnionFind::new(n_arcs);
    for &(a, b) in junctions {
        uf.union(a, b);
    }
    let mut count = vec![0usize; n_arcs];
    for c in crossings {
        for &a in c {
            count[uf.find(a)] += 1;
        }
    }
    for &a in open_ends {
        count[uf.find(a)] += 1;
    }
    let mut new_id = vec![usize::MAX; n_arcs];
    let mut next = 0;
    let mut loops = 0;
    for a in 0..n_arcs {
        let r = uf.find(a);
        if r == a {
            if count[r] > 0 {
                new_id[r] = next;
                next += 1;
            } else {
                loops += 1;
            }
        }
    }
    let mut map = |a: usize| new_id[uf.find(a)];
    let cr = crossings.iter().map(|c| [map(c[0]), map(c[1]), map(c[2]), map(c[3])]).collect();
    let ends = open_ends.iter().map(|&a| map(a)).collect();
    (cr, ends, next, loops)
}

impl Tangle4 {
    /// The `0` tangle: arcs NW-NE and SW-SE.
    pub fn zero() -> Self {
        Tangle4 {
            crossings: vec![],
            ends: [0, 0, 1, 1],
            n_arcs: 2,
            loops: 0,
        }
    }

    /// Single crossing `[1]` or `[-1]`.
    pub fn unit(positive: bool) -> Self {
        let t = Tangle4 {
            crossings: vec![[NW, SW, SE, NE]],
            ends: [0, 1, 2, 3],
            n_arcs: 4,
            loops: 0,
        };
        if positive {
            t
        } else {
            t.mirror()
        }
    }

    /// Horizontal twist with `|n|` crossings.
    pub fn integer(n: i64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let unit = Self::unit(n > 0);
        let mut t = unit.clone();
        for _ in 1..n.unsigned_abs() {
            t = t.sum(&unit);
        }
        t
    }

    /// Horizontal sum: `self` on the left, `other` on the right.
    pub fn sum(&self, other: &Tangle4) -> Tangle4 {
        let off = self.n_arcs;
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().map(|c| c.map(|a| a + off)));
        let o = other.ends.map(|a| a + off);
        let junctions = [(self.ends[NE], o[NW]), (self.ends[SE], o[SW])];
        let open = [self.ends[NW], o[NE], o[SE], self.ends[SW]];
        let (crossings, ends, n_arcs, loops) = compact(off + other.n_arcs, &crossings, &open, &junctions);
        Tangle4 {
            crossings,
            ends: [ends[0], ends[1], ends[2], ends[3]],
            n_arcs,
            loops: loops + self.loops + other.loops,
        }
    }

    /// Planar reflection in the NW-SE diagonal; crossing types are kept.
    pub fn reflect(&self) -> Tangle4 {
        Tangle4 {
            crossings: self.crossings.iter().map(|c| [c[0], c[3], c[2], c[1]]).collect(),
            ends: [self.ends[NW], self.ends[SW], self.ends[SE], self.ends[NE]],
            n_arcs: self.n_arcs,
            loops: self.loops,
        }
    }

    /// Mirror image: every crossing switched.
    pub fn mirror(&self) -> Tangle4 {
        Tangle4 {
            crossings: self.crossings.iter().map(|c| [c[1], c[2], c[3], c[0]]).collect(),
            ..self.clone()
        }
    }

    /// Counterclockwise quarter turn in the plane.
    pub fn rotate(&self) -> Tangle4 {
        Tangle4 {
            crossings: self.crossings.clone(),
            ends: [self.ends[NE], self.ends[SE], self.ends[SW], self.ends[NW]],
            n_arcs: self.n_arcs,
            loops: self.loops,
        }
    }

    /// Same tangle with arcs renumbered by first appearance.
    pub fn normalized(&self) -> Tangle4 {
        let mut id = vec![usize::MAX; self.n_arcs];
        let mut next = 0;
        let order = self.ends.iter().chain(self.crossings.iter().flatten());
        for &a in order {
            if id[a] == usize::MAX {
                id[a] = next;
                next += 1;
            }
        }
        Tangle4 {
            crossings: self.crossings.iter().map(|c| c.map(|a| id[a])).collect(),
            ends: self.ends.map(|a| id[a]),
            ..self.clone()
        }
    }

    /// Tangle of a Conway expression.
    pub fn from_expr(t: &Tangle) -> Result<Tangle4> {
        Ok(match t {
            Tangle::Chain(n) => Self::integer(*n),
            Tangle::Var { name, .. } => return Err(Error::Unbound(name.clone())),
            Tangle::Product(v) => {
                let mut acc = Self::from_expr(&v[0])?;
                for x in &v[1..] {
                    acc = acc.reflect().sum(&Self::from_expr(x)?);
                }
                acc
            }
            Tangle::Ramification(v) => {
                let mut acc = Self::from_expr(&v[0])?.reflect();
                for x in &v[1..] {
                    acc = acc.sum(&Self::from_expr(x)?.reflect());
                }
                acc
            }
            Tangle::Plus(x, k) => Self::from_expr(x)?.sum(&Self::integer(*k as i64)),
            Tangle::Negated(x) => Self::from_expr(x)?.mirror(),
        })
    }

    /// Which endpoints are joined by the strands (pairs of endpoint indices).
    pub fn connectivity(&self) -> Vec<(usize, usize)> {
        // arc -> list of (crossing, slot)
        let mut at: Vec<Vec<(usize, usize)>> = vec![vec![]; self.n_arcs];
        for (c, cr) in self.crossings.iter().enumerate() {
            for (s, &a) in cr.iter().enumerate() {
                at[a].push((c, s));
            }
        }
        let mut out = vec![];
        let mut used = [false; 4];
        for start in 0..4 {
            if used[start] {
                continue;
            }
            used[start] = true;
            let mut arc = self.ends[start];
            let mut from: Option<(usize, usize)> = None;
            loop {
                if let Some(e) = (0..4).find(|&e| e != start && self.ends[e] == arc) {
                    used[e] = true;
                    out.push((start, e));
                    break;
                }
                let next = at[arc].iter().copied().find(|&p| Some(p) != from).expect("dangling arc");
                let (c, s) = next;
                let exit = (s + 2) % 4;
                from = Some((c, exit));
                arc = self.crossings[c][exit];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conway::parse;
    use crate::conway::Body;

    fn tangle(s: &str) -> Tangle4 {
        match parse(s).unwrap().body {
            Body::Algebraic(t) => Tangle4::from_expr(&t).unwrap(),
            _ => panic!(),
        }
    }

    #[test]
    fn zero_and_integer_connectivity() {
        assert_eq!(Tangle4::zero().connectivity(), vec![(NW, NE), (SE, SW)]);
        let t = Tangle4::integer(2);
        assert_eq!(t.crossings.len(), 2);
        assert_eq!(t.connectivity(), vec![(NW, NE), (SE, SW)]);
        let t = Tangle4::integer(3);
        assert_eq!(t.connectivity(), vec![(NW, SE), (NE, SW)]);
        // vertical twist
        let v = Tangle4::integer(2).reflect();
        assert_eq!(v.connectivity(), vec![(NW, SW), (NE, SE)]);
    }

    #[test]
    fn reflect_fixes_unit() {
        assert_eq!(Tangle4::unit(true).reflect().normalized(), Tangle4::unit(true).normalized());
        assert_ne!(Tangle4::unit(true).rotate(), Tangle4::unit(true));
        assert_eq!(Tangle4::unit(true).rotate().normalized(), Tangle4::unit(false));
    }

    #[test]
    fn negative_is_mirror() {
        assert_eq!(Tangle4::integer(-2), Tangle4::integer(2).mirror());
    }

    #[test]
    fn zero_suffix_reflects() {
        // "t 0" is the reflection of t
        assert_eq!(tangle("3 0").normalized(), Tangle4::integer(3).reflect().normalized());
        assert_eq!(tangle("2,2,2").crossings.len(), 6);
        assert_eq!(tangle("2,2+").crossings.len(), 5);
    }

    #[test]
    fn loops_are_counted() {
        // reflect(0) + 0 closes nothing; 0 0 0 ... still no loops
        assert_eq!(tangle("0 0").loops, 0);
        // (0 0) summed with itself twice creates a loop in the middle
        let inf = Tangle4::zero().reflect();
        assert_eq!(inf.sum(&inf).loops, 1);
    }
}
