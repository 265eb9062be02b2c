//! Ideal triangulations of link complements.
//!
//! [`octahedral`] splits the octahedron at each crossing into four tetrahedra
//! with vertices `0 = P+`, `1 = P-`, `2` on the over-strand and `3` on the
//! under-strand. This triangulates the complement of the link together with
//! the two points `P+` and `P-`; [`triangulate`] then removes those two
//! finite vertices by collapsing one edge from each onto a cusp.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::diagram::LinkDiagram;
use crate::error::{Error, Result};
use crate::tangle::UnionFind;

/// Vertex permutation: vertex `i` of one tetrahedron goes to `p[i]` of its neighbour.
pub type Perm = [usize; 4];

pub const IDENTITY: Perm = [0, 1, 2, 3];

/// Edges of a tetrahedron in the order used for edge indices.
pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn edge_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    EDGES.iter().position(|&e| e == (a, b)).expect("distinct vertices")
}

/// Which of `z, z', z''` sits on an edge: opposite edges share a parameter.
pub fn shape_kind(edge: usize) -> usize {
    match edge {
        0 | 5 => 0,
        1 | 4 => 1,
        _ => 2,
    }
}

pub fn compose(a: &Perm, b: &Perm) -> Perm {
    [a[b[0]], a[b[1]], a[b[2]], a[b[3]]]
}

pub fn inverse(p: &Perm) -> Perm {
    let mut q = [0; 4];
    for i in 0..4 {
        q[p[i]] = i;
    }
    q
}

pub fn is_even(p: &Perm) -> bool {
    let mut inv = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 0
}

fn transposition(x: usize, y: usize) -> Perm {
    let mut p = IDENTITY;
    p.swap(x, y);
    p
}

fn is_perm(p: &Perm) -> bool {
    let mut seen = [false; 4];
    p.iter().all(|&x| x < 4 && !std::mem::replace(&mut seen[x], true))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tet {
    pub neighbor: [usize; 4],
    pub perm: [Perm; 4],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    pub tets: Vec<Tet>,
}

/// One step of a curve on a cusp torus: the cusp triangle at `vertex` of
/// `tet`, entered through face `face_in` and left through `face_out`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveStep {
    pub tet: usize,
    pub vertex: usize,
    pub face_in: usize,
    pub face_out: usize,
}

/// Counterclockwise order of the cusp-triangle corners at each vertex.
pub const CUSP_ORDER: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];

impl CurveStep {
    /// Corner cut off by the step and `+1` if it lies to the left, `-1` if right.
    pub fn corner(&self) -> (usize, i32) {
        let w = 6 - self.vertex - self.face_in - self.face_out;
        let o = CUSP_ORDER[self.vertex];
        let k = o.iter().position(|&x| x == w).unwrap();
        if o[(k + 1) % 3] == self.face_in {
            (w, -1)
        } else {
            (w, 1)
        }
    }
}

/// On-disk triangulation format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangulationFile {
    pub tets: usize,
    pub gluings: Vec<(usize, usize, usize, usize, Perm)>,
    #[serde(default)]
    pub cusps: Vec<[usize; 4]>,
    #[serde(default)]
    pub meridians: Vec<Vec<CurveStep>>,
}

const UNSET: usize = usize::MAX;

impl Triangulation {
    fn empty(n: usize) -> Self {
        Triangulation {
            tets: vec![
                Tet {
                    neighbor: [UNSET; 4],
                    perm: [IDENTITY; 4],
                };
                n
            ],
        }
    }

    fn glue(&mut self, t: usize, f: usize, n: usize, p: Perm) -> Result<()> {
        let g = p[f];
        if self.tets[t].neighbor[f] != UNSET || self.tets[n].neighbor[g] != UNSET {
            return Err(Error::Triangulation(format!("face {f} of tet {t} glued twice")));
        }
        if (t, f) == (n, g) {
            return Err(Error::Triangulation(format!("face {f} of tet {t} glued to itself")));
        }
        self.tets[t].neighbor[f] = n;
        self.tets[t].perm[f] = p;
        self.tets[n].neighbor[g] = t;
        self.tets[n].perm[g] = inverse(&p);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tets.is_empty()
    }

    /// Checks that the face pairing is a consistent perfect matching.
    pub fn check_gluings(&self) -> Result<()> {
        for (t, tet) in self.tets.iter().enumerate() {
            for f in 0..4 {
                let n = tet.neighbor[f];
                let p = tet.perm[f];
                if n >= self.tets.len() {
                    return Err(Error::Triangulation(format!("face {f} of tet {t} is unglued")));
                }
                if !is_perm(&p) {
                    return Err(Error::Triangulation(format!("bad permutation on tet {t} face {f}")));
                }
                let g = p[f];
                if (n, g) == (t, f) {
                    return Err(Error::Triangulation(format!("face {f} of tet {t} glued to itself")));
                }
                let back = &self.tets[n];
                if back.neighbor[g] != t || back.perm[g] != inverse(&p) {
                    return Err(Error::Triangulation(format!("inconsistent gluing at tet {t} face {f}")));
                }
            }
        }
        Ok(())
    }

    /// Vertex class of every tetrahedron vertex, and the number of classes.
    pub fn vertex_classes(&self) -> (Vec<[usize; 4]>, usize) {
        let n = self.tets.len();
        let mut uf = UnionFind::new(4 * n);
        for (t, tet) in self.tets.iter().enumerate() {
            for f in 0..4 {
                let (m, p) = (tet.neighbor[f], tet.perm[f]);
                for v in (0..4).filter(|&v| v != f) {
                    uf.union(4 * t + v, 4 * m + p[v]);
                }
            }
        }
        relabel_classes::<4>(&mut uf, n)
    }

    /// Edge class of every tetrahedron edge (indexed by [`EDGES`]).
    pub fn edge_classes(&self) -> (Vec<[usize; 6]>, usize) {
        let n = self.tets.len();
        let mut uf = UnionFind::new(6 * n);
        for (t, tet) in self.tets.iter().enumerate() {
            for f in 0..4 {
                let (m, p) = (tet.neighbor[f], tet.perm[f]);
                for (e, &(a, b)) in EDGES.iter().enumerate() {
                    if a != f && b != f {
                        uf.union(6 * t + e, 6 * m + edge_index(p[a], p[b]));
                    }
                }
            }
        }
        relabel_classes::<6>(&mut uf, n)
    }

    /// Returns an error if some edge is identified with itself reversed.
    pub fn check_edges(&self) -> Result<()> {
        let n = self.tets.len();
        // oriented edges (t, a, b) as 12 per tet
        let idx = |t: usize, a: usize, b: usize| 12 * t + 3 * a + if b > a { b - 1 } else { b };
        let mut uf = UnionFind::new(12 * n);
        for (t, tet) in self.tets.iter().enumerate() {
            for f in 0..4 {
                let (m, p) = (tet.neighbor[f], tet.perm[f]);
                for a in (0..4).filter(|&a| a != f) {
                    for b in (0..4).filter(|&b| b != f && b != a) {
                        uf.union(idx(t, a, b), idx(m, p[a], p[b]));
                    }
                }
            }
        }
        for t in 0..n {
            for &(a, b) in &EDGES {
                if uf.find(idx(t, a, b)) == uf.find(idx(t, b, a)) {
                    return Err(Error::Triangulation(format!("edge {a}{b} of tet {t} is glued to itself reversed")));
                }
            }
        }
        Ok(())
    }

    /// Euler characteristic of the link of every vertex class.
    pub fn vertex_link_euler(&self) -> Vec<i64> {
        let (vc, k) = self.vertex_classes();
        let (ec, ne) = self.edge_classes();
        let mut triangles = vec![0i64; k];
        for v in &vc {
            for &c in v {
                triangles[c] += 1;
            }
        }
        let mut ends = vec![0i64; k];
        let mut done = vec![false; ne];
        for (t, e) in ec.iter().enumerate() {
            for (i, &cls) in e.iter().enumerate() {
                if !std::mem::replace(&mut done[cls], true) {
                    let (a, b) = EDGES[i];
                    ends[vc[t][a]] += 1;
                    ends[vc[t][b]] += 1;
                }
            }
        }
        (0..k).map(|c| ends[c] - triangles[c] / 2).collect()
    }

    /// Full structural check of an ideal triangulation with torus cusps.
    pub fn validate(&self) -> Result<()> {
        self.check_gluings()?;
        self.check_edges()?;
        let chi = self.vertex_link_euler();
        if let Some(c) = chi.iter().position(|&x| x != 0) {
            return Err(Error::Triangulation(format!(
                "vertex {c} has link of Euler characteristic {}",
                chi[c]
            )));
        }
        let (_, ne) = self.edge_classes();
        if ne != self.tets.len() {
            return Err(Error::Triangulation(format!("{ne} edges for {} tetrahedra", self.tets.len())));
        }
        Ok(())
    }

    pub fn cusp_count(&self) -> usize {
        self.vertex_classes().1
    }

    pub fn is_oriented(&self) -> bool {
        self.tets.iter().all(|t| t.perm.iter().all(|p| !is_even(p)))
    }

    /// Relabels vertices so that every gluing reverses the vertex order parity.
    pub fn orient(&mut self) -> Result<()> {
        let n = self.tets.len();
        if n == 0 {
            return Ok(());
        }
        let mut relabel: Vec<Option<Perm>> = vec![None; n];
        relabel[0] = Some(IDENTITY);
        let mut queue = VecDeque::from([0]);
        while let Some(t) = queue.pop_front() {
            let r = relabel[t].unwrap();
            for f in 0..4 {
                let m = self.tets[t].neighbor[f];
                if relabel[m].is_none() {
                    let same = is_even(&self.tets[t].perm[f]) == is_even(&r);
                    relabel[m] = Some(if same { transposition(2, 3) } else { IDENTITY });
                    queue.push_back(m);
                }
            }
        }
        let relabel: Vec<Perm> = relabel.into_iter().map(|r| r.expect("connected")).collect();
        let old = self.tets.clone();
        for (t, tet) in old.iter().enumerate() {
            let r = relabel[t];
            let ri = inverse(&r);
            for f in 0..4 {
                let m = tet.neighbor[f];
                let p = compose(&relabel[m], &compose(&tet.perm[f], &ri));
                self.tets[t].neighbor[r[f]] = m;
                self.tets[t].perm[r[f]] = p;
            }
        }
        if !self.is_oriented() {
            return Err(Error::Triangulation("non-orientable".into()));
        }
        Ok(())
    }

    /// Collapses edge class `class`, removing every tetrahedron around it.
    /// Returns `None` if the collapse is not admissible.
    fn collapse_edge(&self, class: usize) -> Option<Triangulation> {
        let (ec, _) = self.edge_classes();
        let n = self.tets.len();
        let mut crushed: Vec<Option<(usize, usize)>> = vec![None; n];
        for t in 0..n {
            let hits: Vec<usize> = (0..6).filter(|&e| ec[t][e] == class).collect();
            match hits.len() {
                0 => {}
                1 => crushed[t] = Some(EDGES[hits[0]]),
                _ => return None,
            }
        }
        if !self.collapse_merges_are_forests(&ec, &crushed) {
            return None;
        }
        let survivors: Vec<usize> = (0..n).filter(|&t| crushed[t].is_none()).collect();
        if survivors.is_empty() {
            return None;
        }
        let mut new_id = vec![UNSET; n];
        for (i, &t) in survivors.iter().enumerate() {
            new_id[t] = i;
        }
        let mut out = Triangulation::empty(survivors.len());
        for &s in &survivors {
            for f in 0..4 {
                let mut m = self.tets[s].neighbor[f];
                let mut p = self.tets[s].perm[f];
                let mut g = p[f];
                let mut steps = 0;
                while let Some((x, y)) = crushed[m] {
                    let exit = if g == x {
                        y
                    } else if g == y {
                        x
                    } else {
                        return None;
                    };
                    let q = self.tets[m].perm[exit];
                    p = compose(&q, &compose(&transposition(x, y), &p));
                    g = q[exit];
                    m = self.tets[m].neighbor[exit];
                    steps += 1;
                    if steps > n {
                        return None;
                    }
                }
                if (m, g) == (s, f) {
                    return None;
                }
                let (a, b) = (new_id[s], new_id[m]);
                if out.tets[a].neighbor[f] == UNSET {
                    out.glue(a, f, b, p).ok()?;
                } else if out.tets[a].neighbor[f] != b || out.tets[a].perm[f] != p {
                    return None;
                }
            }
        }
        out.check_gluings().ok()?;
        Some(out)
    }

    /// Crushing merges pairs of edges and pairs of faces; the collapse keeps
    /// the topology only if neither merge graph has a cycle.
    fn collapse_merges_are_forests(&self, ec: &[[usize; 6]], crushed: &[Option<(usize, usize)>]) -> bool {
        let n = self.tets.len();
        let face_key = |t: usize, f: usize| {
            let other = (self.tets[t].neighbor[f], self.tets[t].perm[f][f]);
            4 * t.min(other.0) + if t < other.0 || (t == other.0 && f <= other.1) { f } else { other.1 }
        };
        let mut edges = UnionFind::new(6 * n);
        let mut faces = UnionFind::new(4 * n);
        let mut seen_faces = vec![false; 4 * n];
        for (t, c) in crushed.iter().enumerate() {
            let Some((x, y)) = *c else { continue };
            let others: Vec<usize> = (0..4).filter(|&v| v != x && v != y).collect();
            for &a in &others {
                // the face opposite `a` contains the crushed edge
                let key = face_key(t, a);
                if seen_faces[key] {
                    continue;
                }
                seen_faces[key] = true;
                let b = 6 - x - y - a;
                let (e1, e2) = (ec[t][edge_index(x, b)], ec[t][edge_index(y, b)]);
                if edges.find(e1) == edges.find(e2) {
                    return false;
                }
                edges.union(e1, e2);
            }
            let (f1, f2) = (face_key(t, x), face_key(t, y));
            if faces.find(f1) == faces.find(f2) {
                return false;
            }
            faces.union(f1, f2);
        }
        true
    }

    /// Admissible single collapses removing one finite vertex, or `None` if
    /// there is no finite vertex left.
    fn collapse_one(&self) -> Option<Vec<Triangulation>> {
        let chi = self.vertex_link_euler();
        let finite = chi.iter().position(|&x| x == 2)?;
        let (vc, _) = self.vertex_classes();
        let (ec, ne) = self.edge_classes();
        let mut ends: Vec<Option<(usize, usize)>> = vec![None; ne];
        for (t, e) in ec.iter().enumerate() {
            for (i, &cls) in e.iter().enumerate() {
                let (a, b) = EDGES[i];
                ends[cls].get_or_insert((vc[t][a], vc[t][b]));
            }
        }
        let mut out = vec![];
        for (cls, e) in ends.iter().enumerate() {
            let (a, b) = e.unwrap();
            let other = if a == finite { b } else if b == finite { a } else { continue };
            if other == finite || chi[other] != 0 {
                continue;
            }
            if let Some(t) = self.collapse_edge(cls) {
                let chi2 = t.vertex_link_euler();
                if chi2.len() + 1 == chi.len() && t.check_edges().is_ok() && chi2.iter().all(|&x| x == 0 || x == 2) {
                    out.push(t);
                }
            }
        }
        Some(out)
    }

    /// Removes every vertex with spherical link by edge collapses. Different
    /// choices of collapsed edges give up to `limit` distinct results.
    pub fn remove_finite_vertices_variants(&self, limit: usize) -> Vec<Triangulation> {
        let mut out = vec![];
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            if out.len() >= limit {
                break;
            }
            match t.collapse_one() {
                None => out.push(t),
                Some(next) => stack.extend(next.into_iter().rev()),
            }
        }
        out
    }

    pub fn remove_finite_vertices(&self) -> Result<Triangulation> {
        self.remove_finite_vertices_variants(1)
            .pop()
            .ok_or_else(|| Error::Triangulation("no admissible edge collapse".into()))
    }

    /// Generators of the first homology of every cusp torus, as simple
    /// closed curves in the cusp triangulation.
    pub fn peripheral_curves(&self) -> Vec<Vec<Vec<CurveStep>>> {
        let (vc, k) = self.vertex_classes();
        let n = self.tets.len();
        // corner (t, v, w) equivalence classes
        let corner = |t: usize, v: usize, w: usize| 16 * t + 4 * v + w;
        let mut uf = UnionFind::new(16 * n);
        for (t, tet) in self.tets.iter().enumerate() {
            for f in 0..4 {
                let (m, p) = (tet.neighbor[f], tet.perm[f]);
                for v in (0..4).filter(|&v| v != f) {
                    for w in (0..4).filter(|&w| w != f && w != v) {
                        uf.union(corner(t, v, w), corner(m, p[v], p[w]));
                    }
                }
            }
        }
        let mut out = vec![vec![]; k];
        for (cusp, curves) in out.iter_mut().enumerate() {
            let tris: Vec<(usize, usize)> = (0..n)
                .flat_map(|t| (0..4).map(move |v| (t, v)))
                .filter(|&(t, v)| vc[t][v] == cusp)
                .collect();
            let tri_id = |t: usize, v: usize| tris.iter().position(|&x| x == (t, v)).unwrap();
            // sides: (t, v, f); a side and its partner are the same edge
            let mut in_tree = std::collections::HashSet::new();
            let side_key = |t: usize, v: usize, f: usize| -> (usize, usize, usize) {
                let m = self.tets[t].neighbor[f];
                let p = self.tets[t].perm[f];
                (t, v, f).min((m, p[v], p[f]))
            };
            // primal spanning tree over corner classes
            let mut visited = std::collections::HashSet::new();
            let (t0, v0) = tris[0];
            let w0 = (0..4).find(|&w| w != v0).unwrap();
            let root = uf.find(corner(t0, v0, w0));
            visited.insert(root);
            let mut queue = VecDeque::from([root]);
            // primal adjacency: side (t,v,f) joins corners w1, w2 = the two others
            let mut adj: std::collections::HashMap<usize, Vec<((usize, usize, usize), usize)>> = Default::default();
            for &(t, v) in &tris {
                for f in (0..4).filter(|&f| f != v) {
                    let ws: Vec<usize> = (0..4).filter(|&w| w != v && w != f).collect();
                    let a = uf.find(corner(t, v, ws[0]));
                    let b = uf.find(corner(t, v, ws[1]));
                    let key = side_key(t, v, f);
                    adj.entry(a).or_default().push((key, b));
                    adj.entry(b).or_default().push((key, a));
                }
            }
            while let Some(x) = queue.pop_front() {
                for &(key, y) in adj.get(&x).map(|v| v.as_slice()).unwrap_or(&[]) {
                    if visited.insert(y) {
                        in_tree.insert(key);
                        queue.push_back(y);
                    }
                }
            }
            // dual spanning tree over triangles, avoiding primal tree sides
            let mut parent: Vec<Option<(usize, usize)>> = vec![None; tris.len()]; // (parent tri, face in child)
            let mut depth = vec![usize::MAX; tris.len()];
            depth[0] = 0;
            let mut cotree = std::collections::HashSet::new();
            let mut queue = VecDeque::from([0usize]);
            while let Some(i) = queue.pop_front() {
                let (t, v) = tris[i];
                for f in (0..4).filter(|&f| f != v) {
                    let key = side_key(t, v, f);
                    if in_tree.contains(&key) {
                        continue;
                    }
                    let m = self.tets[t].neighbor[f];
                    let p = self.tets[t].perm[f];
                    let j = tri_id(m, p[v]);
                    if depth[j] == usize::MAX {
                        depth[j] = depth[i] + 1;
                        parent[j] = Some((i, p[f]));
                        cotree.insert(key);
                        queue.push_back(j);
                    }
                }
            }
            // leftover sides give the generators
            let mut seen = std::collections::HashSet::new();
            for (i, &(t, v)) in tris.iter().enumerate() {
                for f in (0..4).filter(|&f| f != v) {
                    let key = side_key(t, v, f);
                    if in_tree.contains(&key) || cotree.contains(&key) || !seen.insert(key) {
                        continue;
                    }
                    let m = self.tets[t].neighbor[f];
                    let p = self.tets[t].perm[f];
                    let j = tri_id(m, p[v]);
                    curves.push(self.cycle(&tris, &parent, &depth, i, f, j, p[f]));
                }
            }
        }
        out
    }

    /// Closed curve leaving triangle `i` through face `f` into triangle `j`
    /// (entering through face `g`) and returning to `i` along the dual tree.
    #[allow(clippy::too_many_arguments)]
    fn cycle(
        &self,
        tris: &[(usize, usize)],
        parent: &[Option<(usize, usize)>],
        depth: &[usize],
        i: usize,
        f: usize,
        j: usize,
        g: usize,
    ) -> Vec<CurveStep> {
        // path j -> i through the tree as a list of (triangle, exit face)
        let (mut a, mut b) = (j, i);
        let mut up = vec![]; // from j upward: (tri, exit face to parent)
        let mut down = vec![]; // from i upward, reversed later
        while a != b {
            if depth[a] >= depth[b] {
                let (pa, face) = parent[a].unwrap();
                up.push((a, face));
                a = pa;
            } else {
                let (pb, face) = parent[b].unwrap();
                down.push((b, face));
                b = pb;
            }
        }
        // sequence of (triangle, exit face)
        let mut exits: Vec<(usize, usize)> = up;
        for &(child, face_in_child) in down.iter().rev() {
            let (ct, _) = tris[child];
            let exit = self.tets[ct].perm[face_in_child][face_in_child];
            exits.push((parent[child].unwrap().0, exit));
        }
        exits.push((i, f));
        // exits start at j; the step into j comes through g
        let mut steps = vec![];
        let mut entry = g;
        for &(tri, exit) in &exits {
            let (t, v) = tris[tri];
            steps.push(CurveStep {
                tet: t,
                vertex: v,
                face_in: entry,
                face_out: exit,
            });
            entry = self.tets[t].perm[exit][exit];
        }
        steps
    }

    pub fn to_file(&self) -> TriangulationFile {
        let mut gluings = vec![];
        for (t, tet) in self.tets.iter().enumerate() {
            for f in 0..4 {
                let (m, p) = (tet.neighbor[f], tet.perm[f]);
                if (t, f) < (m, p[f]) {
                    gluings.push((t, f, m, p[f], p));
                }
            }
        }
        let meridians = self
            .peripheral_curves()
            .into_iter()
            .filter_map(|c| c.into_iter().next())
            .collect();
        TriangulationFile {
            tets: self.tets.len(),
            gluings,
            cusps: self.vertex_classes().0,
            meridians,
        }
    }

    pub fn from_file(file: &TriangulationFile) -> Result<Triangulation> {
        let mut tri = Triangulation::empty(file.tets);
        for &(t, f, m, g, p) in &file.gluings {
            if t >= file.tets || m >= file.tets || f > 3 || g > 3 || !is_perm(&p) || p[f] != g {
                return Err(Error::Triangulation(format!("bad gluing {:?}", (t, f, m, g, p))));
            }
            tri.glue(t, f, m, p)?;
        }
        tri.check_gluings()?;
        tri.check_edges()?;
        Ok(tri)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Triangulation> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

fn relabel_classes<const W: usize>(uf: &mut UnionFind, n: usize) -> (Vec<[usize; W]>, usize) {
    let mut id = vec![UNSET; n * W];
    let mut next = 0;
    let mut out = vec![[0; W]; n];
    for t in 0..n {
        for i in 0..W {
            let r = uf.find(W * t + i);
            if id[r] == UNSET {
                id[r] = next;
                next += 1;
            }
            out[t][i] = id[r];
        }
    }
    (out, next)
}

/// Raw octahedral decomposition: four tetrahedra per crossing.
pub fn octahedral(d: &LinkDiagram) -> Result<Triangulation> {
    let c = d.crossing_count();
    if c < 2 {
        return Err(Error::Diagram(format!("{c} crossings; at least 2 are needed")));
    }
    if d.free_loops > 0 || d.connected_pieces() > 1 {
        return Err(Error::Diagram("split diagram".into()));
    }
    let problems = d.validate();
    if !problems.is_empty() {
        return Err(Error::Diagram(problems.join("; ")));
    }
    let nug = d.nugatory_crossings();
    if !nug.is_empty() {
        return Err(Error::Diagram(format!("nugatory crossings {nug:?}")));
    }
    let role = |slot: usize| if slot % 2 == 1 { 2 } else { 3 };
    let mut tri = Triangulation::empty(4 * c);
    for k in 0..c {
        for j in 0..4 {
            let shared = (j + 1) % 4;
            let face = if shared % 2 == 1 { 0 } else { 1 };
            tri.glue(4 * k + j, face, 4 * k + shared, IDENTITY)?;
        }
    }
    for face in d.faces() {
        for i in 0..face.len() {
            let (c1, j1) = face[i];
            let (c2, j2) = face[(i + 1) % face.len()];
            let mut p = IDENTITY;
            p[role(j1)] = role((j2 + 1) % 4);
            p[role((j1 + 1) % 4)] = role(j2);
            tri.glue(4 * c1 + j1, role((j1 + 1) % 4), 4 * c2 + j2, p)?;
        }
    }
    tri.check_gluings()?;
    Ok(tri)
}

/// Ideal triangulation of the complement of the link drawn by `d`.
pub fn triangulate(d: &LinkDiagram) -> Result<Triangulation> {
    triangulate_variants(d, 1)?
        .pop()
        .ok_or_else(|| Error::Triangulation("no admissible edge collapse".into()))
}

/// Up to `limit` triangulations of the complement, differing in the edges
/// collapsed to remove the two finite vertices.
pub fn triangulate_variants(d: &LinkDiagram, limit: usize) -> Result<Vec<Triangulation>> {
    let raw = octahedral(d)?;
    let mut out = vec![];
    for tri in raw.remove_finite_vertices_variants(limit) {
        out.push(finish(d, tri)?);
    }
    Ok(out)
}

fn finish(d: &LinkDiagram, mut tri: Triangulation) -> Result<Triangulation> {
    tri.orient()?;
    tri.validate()?;
    let cusps = tri.cusp_count();
    if cusps != d.components() {
        return Err(Error::Triangulation(format!(
            "{cusps} cusps for {} components",
            d.components()
        )));
    }
    Ok(tri)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(s: &str) -> LinkDiagram {
        LinkDiagram::parse(s).unwrap()
    }

    #[test]
    fn raw_decomposition_counts() {
        for (s, c) in [("2 2", 4), ("6*", 6), ("2 1 2", 5), ("8*2 0.2 0", 10)] {
            let t = octahedral(&diagram(s)).unwrap();
            assert_eq!(t.len(), 4 * c, "{s}");
            let (_, ne) = t.edge_classes();
            assert_eq!(ne, t.len() + 2, "{s}");
            let chi = t.vertex_link_euler();
            assert_eq!(chi.iter().filter(|&&x| x == 2).count(), 2, "{s}");
            assert_eq!(chi.iter().filter(|&&x| x == 0).count(), diagram(s).components(), "{s}");
        }
    }

    #[test]
    fn collapsed_triangulations_are_valid() {
        for s in ["2 2", "6*", "2 1 2", "3 2", "8*2 0.2 0", "2,2,2", ".2.2", "8*2 0.-2 0"] {
            let d = diagram(s);
            let t = triangulate(&d).unwrap();
            assert!(t.is_oriented());
            assert_eq!(t.cusp_count(), d.components(), "{s}");
            assert_eq!(t.edge_classes().1, t.len(), "{s}");
            for curves in t.peripheral_curves() {
                assert_eq!(curves.len(), 2, "{s}");
            }
        }
    }

    #[test]
    fn rejects_bad_diagrams() {
        assert!(triangulate(&diagram("1")).is_err());
        assert!(triangulate(&diagram("2")).is_err() || diagram("2").crossing_count() == 2);
        assert!(triangulate(&diagram("0")).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = triangulate(&diagram("2 2")).unwrap();
        let back = Triangulation::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn face_glued_twice_is_rejected() {
        let f = TriangulationFile {
            tets: 1,
            gluings: vec![(0, 0, 0, 1, [1, 0, 2, 3]), (0, 0, 0, 2, [2, 1, 0, 3])],
            cusps: vec![],
            meridians: vec![],
        };
        assert!(Triangulation::from_file(&f).is_err());
    }
}
