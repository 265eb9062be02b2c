//! Planar link diagrams built from Conway symbols.

use serde::{Deserialize, Serialize};

use crate::conway::{Body, ConwaySymbol, PolyStyle, Tangle, VertexFill};
use crate::error::{Error, Result};
use crate::polyhedra::BasicPolyhedron;
use crate::tangle::{compact, Tangle4, UnionFind, NE, NW, SE, SW};

/// A link diagram: crossings with four arc ids in counterclockwise order,
/// under-strand on slots 0 and 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkDiagram {
    pub crossings: Vec<[usize; 4]>,
    pub n_arcs: usize,
    /// Unknotted components that meet no crossing.
    pub free_loops: usize,
}

/// A corner of a crossing, between slots `corner` and `corner + 1`.
pub type Corner = (usize, usize);

/// PD code: crossings start at the incoming under-strand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdCode {
    pub crossings: Vec<[usize; 4]>,
    pub signs: Vec<i8>,
}

/// One traversal of a link component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Visited `(crossing, entry slot)` pairs in order.
    pub passes: Vec<(usize, usize)>,
}

impl LinkDiagram {
    /// Numerator closure of a tangle.
    pub fn close(t: &Tangle4) -> LinkDiagram {
        let junctions = [(t.ends[NW], t.ends[NE]), (t.ends[SW], t.ends[SE])];
        let (crossings, _, n_arcs, loops) = compact(t.n_arcs, &t.crossings, &[], &junctions);
        LinkDiagram {
            crossings,
            n_arcs,
            free_loops: loops + t.loops,
        }
    }

    pub fn from_symbol(symbol: &ConwaySymbol) -> Result<LinkDiagram> {
        match &symbol.body {
            Body::Algebraic(t) => Ok(Self::close(&Tangle4::from_expr(t)?)),
            Body::Polyhedral { basis, style, fills } => polyhedral(basis, *style, fills),
        }
    }

    pub fn parse(text: &str) -> Result<LinkDiagram> {
        Self::from_symbol(&crate::conway::parse(text)?)
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Both `(crossing, slot)` occurrences of every arc.
    pub fn occurrences(&self) -> Vec<Vec<(usize, usize)>> {
        let mut occ = vec![Vec::with_capacity(2); self.n_arcs];
        for (c, cr) in self.crossings.iter().enumerate() {
            for (s, &a) in cr.iter().enumerate() {
                occ[a].push((c, s));
            }
        }
        occ
    }

    /// The other end of the arc leaving crossing `c` at slot `s`.
    fn partner(&self, occ: &[Vec<(usize, usize)>], c: usize, s: usize) -> (usize, usize) {
        let a = self.crossings[c][s];
        let o = &occ[a];
        if o[0] == (c, s) {
            o[1]
        } else {
            o[0]
        }
    }

    /// Components traced by arc-following (free loops not included).
    ///
    /// Each component starts on its lowest arc, entering the crossing with
    /// the higher index; this orientation is unchanged by mirroring.
    pub fn traversals(&self) -> Vec<Component> {
        let occ = self.occurrences();
        let mut arc_seen = vec![false; self.n_arcs];
        let mut out = vec![];
        for a in 0..self.n_arcs {
            if arc_seen[a] {
                continue;
            }
            let o = &occ[a];
            let (mut c, mut s) = if o[1].0 > o[0].0 { o[1] } else { o[0] };
            let mut passes = vec![];
            while !arc_seen[self.crossings[c][s]] {
                arc_seen[self.crossings[c][s]] = true;
                passes.push((c, s));
                (c, s) = self.partner(&occ, c, (s + 2) % 4);
            }
            out.push(Component { passes });
        }
        out
    }

    pub fn components(&self) -> usize {
        self.traversals().len() + self.free_loops
    }

    /// Crossing signs under the orientation given by [`Self::traversals`].
    pub fn signs(&self) -> Vec<i8> {
        let (under, over) = self.entry_slots();
        under.iter().zip(&over).map(|(&u, &o)| if o == (u + 3) % 4 { 1 } else { -1 }).collect()
    }

    fn entry_slots(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.crossings.len();
        let (mut under, mut over) = (vec![0; n], vec![1; n]);
        for comp in self.traversals() {
            for (c, s) in comp.passes {
                if s % 2 == 0 {
                    under[c] = s;
                } else {
                    over[c] = s;
                }
            }
        }
        (under, over)
    }

    pub fn pd(&self) -> PdCode {
        let (under, _) = self.entry_slots();
        let crossings = self
            .crossings
            .iter()
            .zip(&under)
            .map(|(cr, &u)| [cr[u], cr[(u + 1) % 4], cr[(u + 2) % 4], cr[(u + 3) % 4]])
            .collect();
        PdCode {
            crossings,
            signs: self.signs(),
        }
    }

    pub fn mirror(&self) -> LinkDiagram {
        LinkDiagram {
            crossings: self.crossings.iter().map(|c| [c[1], c[2], c[3], c[0]]).collect(),
            ..self.clone()
        }
    }

    /// Faces of the planar graph as cyclic lists of corners.
    pub fn faces(&self) -> Vec<Vec<Corner>> {
        let occ = self.occurrences();
        let mut seen = vec![[false; 4]; self.crossings.len()];
        let mut faces = vec![];
        for c0 in 0..self.crossings.len() {
            for j0 in 0..4 {
                if seen[c0][j0] {
                    continue;
                }
                let mut face = vec![];
                let (mut c, mut j) = (c0, j0);
                while !seen[c][j] {
                    seen[c][j] = true;
                    face.push((c, j));
                    let (c2, s2) = self.partner(&occ, c, j);
                    (c, j) = (c2, (s2 + 3) % 4);
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Number of connected pieces of the crossing graph.
    pub fn connected_pieces(&self) -> usize {
        let n = self.crossings.len();
        let mut uf = UnionFind::new(n);
        for o in self.occurrences() {
            if o.len() == 2 {
                uf.union(o[0].0, o[1].0);
            }
        }
        (0..n).filter(|&c| uf.find(c) == c).count()
    }

    /// Crossings whose four corners do not lie in four distinct faces.
    pub fn nugatory_crossings(&self) -> Vec<usize> {
        let mut face_of = vec![[usize::MAX; 4]; self.crossings.len()];
        for (f, face) in self.faces().iter().enumerate() {
            for &(c, j) in face {
                face_of[c][j] = f;
            }
        }
        (0..self.crossings.len())
            .filter(|&c| {
                let f = face_of[c];
                (0..4).any(|i| (i + 1..4).any(|k| f[i] == f[k]))
            })
            .collect()
    }

    pub fn is_alternating(&self) -> bool {
        self.traversals().iter().all(|comp| {
            let p = &comp.passes;
            (0..p.len()).all(|i| p[i].1 % 2 != p[(i + 1) % p.len()].1 % 2)
        })
    }

    /// Checks arc incidence and planarity; returns one message per problem.
    pub fn validate(&self) -> Vec<String> {
        let mut out = vec![];
        for (a, o) in self.occurrences().iter().enumerate() {
            if o.len() != 2 {
                out.push(format!("arc {a} appears {} times", o.len()));
            }
        }
        if !out.is_empty() {
            return out;
        }
        let v = self.crossings.len() as i64;
        if v > 0 {
            let e = 2 * v;
            let f = self.faces().len() as i64;
            let chi = 2 * self.connected_pieces() as i64;
            if v - e + f != chi {
                out.push(format!("Euler characteristic {} (expected {chi})", v - e + f));
            }
        }
        out
    }
}

/// Braid letter and quarter-turn flag for each field of the abbreviated
/// `.a.b.c` form of 6*. Fields 0 to 2 are pinned by known volumes; the rest
/// keep braid order.
const SIX_DOT_ORDER: [(usize, bool); 6] = [(0, false), (1, false), (3, true), (2, false), (4, false), (5, false)];

/// Tangle placed at a braid letter of a polyhedron.
fn vertex_tangle(fill: &Tangle, positive: bool, turned: bool) -> Result<Tangle4> {
    let t = Tangle4::from_expr(fill)?;
    let t = if turned { t } else { t.reflect() };
    Ok(if positive { t } else { t.mirror() })
}

/// Fills in braid-letter order, each with its quarter-turn flag.
fn placed_fills(basis: &BasicPolyhedron, style: PolyStyle, fills: &[VertexFill]) -> Vec<(Tangle, bool)> {
    let mut out: Vec<(Tangle, bool)> = vec![(Tangle::Chain(1), false); fills.len()];
    for (f, v) in fills.iter().zip(basis.vertex_order()) {
        out[v] = (f.tangle(), false);
    }
    if style == PolyStyle::Dot && basis.name == "6*" && fills.len() == SIX_DOT_ORDER.len() {
        for (f, &(v, turned)) in fills.iter().zip(&SIX_DOT_ORDER) {
            out[v] = (f.tangle(), turned);
        }
    }
    out
}

fn polyhedral(basis: &BasicPolyhedron, style: PolyStyle, fills: &[VertexFill]) -> Result<LinkDiagram> {
    let letters = basis.letters();
    if fills.len() != letters.len() {
        return Err(Error::Diagram(format!(
            "{} has {} vertices but {} fills",
            basis.name,
            letters.len(),
            fills.len()
        )));
    }
    let placed = placed_fills(basis, style, fills);
    let strands = basis.strand_count();
    let mut crossings = vec![];
    let mut n_arcs = strands;
    let mut top: Vec<usize> = (0..strands).collect();
    let mut junctions = vec![];
    let mut loops = 0;
    for (letter, (fill, turned)) in letters.iter().zip(&placed) {
        let t = vertex_tangle(fill, letter.positive, *turned)?;
        let off = n_arcs;
        crossings.extend(t.crossings.iter().map(|c| c.map(|a| a + off)));
        n_arcs += t.n_arcs;
        loops += t.loops;
        let e = t.ends.map(|a| a + off);
        let g = letter.generator;
        junctions.push((top[g], e[SW]));
        junctions.push((top[g + 1], e[SE]));
        top[g] = e[NW];
        top[g + 1] = e[NE];
    }
    for (i, &t) in top.iter().enumerate() {
        junctions.push((t, i));
    }
    let (crossings, _, n_arcs, extra) = compact(n_arcs, &crossings, &[], &junctions);
    Ok(LinkDiagram {
        crossings,
        n_arcs,
        free_loops: loops + extra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> LinkDiagram {
        LinkDiagram::parse(s).unwrap()
    }

    #[test]
    fn small_links() {
        let hopf = LinkDiagram::close(&Tangle4::integer(2));
        assert_eq!((hopf.crossing_count(), hopf.components()), (2, 2));
        let k = d("2 2");
        assert_eq!((k.crossing_count(), k.components()), (4, 1));
        assert_eq!(d("2,2,2").components(), 3);
        assert_eq!(d("2 1 2").components(), 2);
        assert_eq!(d("3").components(), 1);
    }

    #[test]
    fn polyhedra() {
        let b = d("6*");
        assert_eq!((b.crossing_count(), b.components()), (6, 3));
        assert!(b.is_alternating());
        assert_eq!(d("4*").components(), 1);
        assert_eq!(d("8*2 0.2 0").crossing_count(), 10);
        assert_eq!(d("8*2").components(), 2);
        assert_eq!(d("8*2 0").components(), 1);
        for s in ["6*", "8*", "9*", "10**", "11**", "12F", ".2.2", "8*2 0.2 0", "8*(2,-2).2 0"] {
            assert!(d(s).validate().is_empty(), "{s}");
        }
    }

    #[test]
    fn alternation() {
        assert!(d("2 2").is_alternating());
        assert!(d("8*2 0.2 0").is_alternating());
        assert!(!d("8*2 0.-2 0").is_alternating());
    }

    #[test]
    fn mirror_flips_signs() {
        for s in ["2 2", "2 1 2", ".2.2 0", "(2,2) -(2,2)"] {
            let a = d(s);
            let m = a.mirror();
            let sa: Vec<i8> = a.signs().iter().map(|x| -x).collect();
            assert_eq!(m.signs(), sa, "{s}");
            let parsed = LinkDiagram::from_symbol(&crate::conway::mirror(&crate::parse(s).unwrap())).unwrap();
            assert_eq!(parsed.crossings.len(), m.crossings.len());
            for (x, y) in parsed.crossings.iter().zip(&m.crossings) {
                assert!(x == y || *x == [y[2], y[3], y[0], y[1]], "{s}");
            }
        }
    }

    #[test]
    fn figure_eight_signs_cancel() {
        let s: i32 = d("2 2").signs().iter().map(|&x| x as i32).sum();
        assert_eq!(s, 0);
        assert!(d("2 2").nugatory_crossings().is_empty());
        assert_eq!(d("1").nugatory_crossings(), vec![0]);
    }
}
