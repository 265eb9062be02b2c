//! Local moves on ideal triangulations: 2-3, 3-2 and 2-0 moves,
//! greedy simplification and randomization.

use std::collections::HashMap;

use rand::Rng;

use crate::triangulation::{compose, edge_index, inverse, Perm, Tet, Triangulation, EDGES, IDENTITY};

/// Tetrahedra around an edge, in cyclic order, each with its local vertices
/// `(a, b, c, d)`: `a b` is the edge, `c` the previous and `d` the next
/// equatorial vertex.
fn edge_star(tri: &Triangulation, t0: usize, a: usize, b: usize) -> Vec<(usize, [usize; 4])> {
    let rest: Vec<usize> = (0..4).filter(|&v| v != a && v != b).collect();
    let start = [a, b, rest[0], rest[1]];
    let mut out = vec![(t0, start)];
    let (mut t, mut q) = (t0, start);
    loop {
        let p = tri.tets[t].perm[q[2]];
        let n = tri.tets[t].neighbor[q[2]];
        let (a2, b2, c2) = (p[q[0]], p[q[1]], p[q[3]]);
        let d2 = 6 - a2 - b2 - c2;
        let next = [a2, b2, c2, d2];
        if n == t0 && next == start {
            return out;
        }
        if out.len() > 4 * tri.len() {
            return vec![];
        }
        out.push((n, next));
        t = n;
        q = next;
    }
}

impl Triangulation {
    /// Replaces tetrahedra `old` (with vertex labels) by tetrahedra `new`
    /// spanned by the same labels. Returns `false`, leaving `self`
    /// untouched, if the labels do not describe a ball retriangulation.
    fn retriangulate(&mut self, old: &[(usize, [usize; 4])], new: &[[usize; 4]]) -> bool {
        let labels: HashMap<usize, [usize; 4]> = old.iter().copied().collect();
        if labels.len() != old.len() {
            return false;
        }
        let key = |l: &[usize; 4], f: usize| {
            let mut s: Vec<usize> = (0..4).filter(|&v| v != f).map(|v| l[v]).collect();
            s.sort();
            s
        };
        // boundary faces of the old ball, keyed by label set
        let mut boundary: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        for &(t, l) in old {
            for f in 0..4 {
                let n = self.tets[t].neighbor[f];
                let p = self.tets[t].perm[f];
                let internal = labels
                    .get(&n)
                    .is_some_and(|ln| (0..4).filter(|&v| v != f).all(|v| ln[p[v]] == l[v]));
                if !internal && boundary.insert(key(&l, f), (t, f)).is_some() {
                    return false;
                }
            }
        }
        // new faces
        let mut inner: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
        let mut outer: HashMap<(usize, usize), (usize, usize)> = HashMap::new(); // old (t,f) -> new (k,F)
        for (k, l) in new.iter().enumerate() {
            for f in 0..4 {
                let s = key(l, f);
                if let Some(&b) = boundary.get(&s) {
                    if outer.insert(b, (k, f)).is_some() {
                        return false;
                    }
                } else {
                    inner.entry(s).or_default().push((k, f));
                }
            }
        }
        if outer.len() != boundary.len() || inner.values().any(|v| v.len() != 2) {
            return false;
        }
        // slots for the new tetrahedra
        let mut slots: Vec<usize> = old.iter().map(|x| x.0).take(new.len()).collect();
        while slots.len() < new.len() {
            self.tets.push(Tet {
                neighbor: [usize::MAX; 4],
                perm: [IDENTITY; 4],
            });
            slots.push(self.tets.len() - 1);
        }
        let pos = |l: &[usize; 4], x: usize| l.iter().position(|&y| y == x).unwrap();
        let mut built = vec![
            Tet {
                neighbor: [usize::MAX; 4],
                perm: [IDENTITY; 4],
            };
            new.len()
        ];
        for pair in inner.values() {
            let ((k1, f1), (k2, f2)) = (pair[0], pair[1]);
            let mut p = [0; 4];
            for v in 0..4 {
                p[v] = if v == f1 { f2 } else { pos(&new[k2], new[k1][v]) };
            }
            built[k1].neighbor[f1] = slots[k2];
            built[k1].perm[f1] = p;
            built[k2].neighbor[f2] = slots[k1];
            built[k2].perm[f2] = inverse(&p);
        }
        // map from new (k,F) local vertices to old (t,f) local vertices
        let phi = |k: usize, f_new: usize, t: usize, f_old: usize| -> Perm {
            let lt = labels[&t];
            let mut m = [0; 4];
            for v in 0..4 {
                m[v] = if v == f_new { f_old } else { pos(&lt, new[k][v]) };
            }
            m
        };
        let mut external = vec![];
        for (&(t, f), &(k, fk)) in &outer {
            let n = self.tets[t].neighbor[f];
            let p = self.tets[t].perm[f];
            let g = p[f];
            let m = phi(k, fk, t, f);
            if let Some(&(k2, fk2)) = outer.get(&(n, g)) {
                let m2 = phi(k2, fk2, n, g);
                built[k].neighbor[fk] = slots[k2];
                built[k].perm[fk] = compose(&inverse(&m2), &compose(&p, &m));
            } else {
                let q = compose(&p, &m);
                built[k].neighbor[fk] = n;
                built[k].perm[fk] = q;
                external.push((n, g, slots[k], inverse(&q)));
            }
        }
        for (k, tet) in built.into_iter().enumerate() {
            self.tets[slots[k]] = tet;
        }
        for (n, g, s, q) in external {
            self.tets[n].neighbor[g] = s;
            self.tets[n].perm[g] = q;
        }
        let dead: Vec<usize> = old.iter().map(|x| x.0).skip(new.len()).collect();
        self.remove_tets(&dead);
        true
    }

    /// Deletes tetrahedra (already disconnected) and renumbers the rest.
    fn remove_tets(&mut self, dead: &[usize]) {
        if dead.is_empty() {
            return;
        }
        let mut map = vec![usize::MAX; self.tets.len()];
        let mut next = 0;
        for (t, m) in map.iter_mut().enumerate() {
            if !dead.contains(&t) {
                *m = next;
                next += 1;
            }
        }
        let old = std::mem::take(&mut self.tets);
        self.tets = old
            .into_iter()
            .enumerate()
            .filter(|(t, _)| !dead.contains(t))
            .map(|(_, mut tet)| {
                for n in tet.neighbor.iter_mut() {
                    *n = map[*n];
                }
                tet
            })
            .collect();
    }

    fn still_valid(&self) -> bool {
        self.check_gluings().is_ok() && self.check_edges().is_ok()
    }

    /// 2-3 move across face `f` of tetrahedron `t`.
    pub fn two_three(&mut self, t: usize, f: usize) -> bool {
        let n = self.tets[t].neighbor[f];
        if n == t {
            return false;
        }
        let p = self.tets[t].perm[f];
        let mut lt = [0; 4];
        let mut ln = [0; 4];
        let mut next = 0;
        for v in (0..4).filter(|&v| v != f) {
            lt[v] = next;
            ln[p[v]] = next;
            next += 1;
        }
        lt[f] = 3;
        ln[p[f]] = 4;
        let new = [[3, 4, 0, 1], [3, 4, 1, 2], [3, 4, 0, 2]];
        let backup = self.clone();
        if self.retriangulate(&[(t, lt), (n, ln)], &new) && self.still_valid() {
            true
        } else {
            *self = backup;
            false
        }
    }

    /// 3-2 move removing the degree-three edge `a b` of tetrahedron `t`.
    pub fn three_two(&mut self, t: usize, a: usize, b: usize) -> bool {
        let star = edge_star(self, t, a, b);
        if star.len() != 3 {
            return false;
        }
        let old: Vec<(usize, [usize; 4])> = star
            .iter()
            .enumerate()
            .map(|(i, &(t, q))| {
                let mut l = [0; 4];
                l[q[0]] = 0;
                l[q[1]] = 1;
                l[q[2]] = 2 + i;
                l[q[3]] = 2 + (i + 1) % 3;
                (t, l)
            })
            .collect();
        let backup = self.clone();
        if self.retriangulate(&old, &[[0, 2, 3, 4], [1, 2, 3, 4]]) && self.still_valid() {
            true
        } else {
            *self = backup;
            false
        }
    }

    /// 2-0 move flattening the two tetrahedra around the degree-two edge `a b` of `t`.
    pub fn two_zero(&mut self, t: usize, a: usize, b: usize) -> bool {
        let star = edge_star(self, t, a, b);
        if star.len() != 2 || star[0].0 == star[1].0 {
            return false;
        }
        let (t0, q0) = star[0];
        let (t1, q1) = star[1];
        // the opposite edges get merged, so they must be distinct
        let (ec, _) = self.edge_classes();
        if ec[t0][edge_index(q0[2], q0[3])] == ec[t1][edge_index(q1[2], q1[3])] {
            return false;
        }
        // vertex correspondence t0 -> t1 across the pillow
        let mut phi = [0; 4];
        phi[q0[0]] = q1[0];
        phi[q0[1]] = q1[1];
        phi[q0[2]] = q1[3];
        phi[q0[3]] = q1[2];
        let backup = self.clone();
        let mut pairs = vec![];
        for &v in &[q0[0], q0[1]] {
            let (n0, p0) = (self.tets[t0].neighbor[v], self.tets[t0].perm[v]);
            let (n1, p1) = (self.tets[t1].neighbor[phi[v]], self.tets[t1].perm[phi[v]]);
            if [n0, n1].iter().any(|&x| x == t0 || x == t1) {
                return false;
            }
            let g0 = p0[v];
            let g1 = p1[phi[v]];
            if (n0, g0) == (n1, g1) {
                return false;
            }
            pairs.push((n0, g0, n1, compose(&p1, &compose(&phi, &inverse(&p0)))));
        }
        for &(n0, g0, n1, q) in &pairs {
            self.tets[n0].neighbor[g0] = n1;
            self.tets[n0].perm[g0] = q;
            self.tets[n1].neighbor[q[g0]] = n0;
            self.tets[n1].perm[q[g0]] = inverse(&q);
        }
        self.remove_tets(&[t0, t1]);
        if self.still_valid() && self.validate().is_ok() {
            true
        } else {
            *self = backup;
            false
        }
    }

    /// Edge classes as `(degree, tetrahedron, a, b)` with one representative.
    fn edge_degrees(&self) -> Vec<(usize, usize, usize, usize)> {
        let (ec, ne) = self.edge_classes();
        let mut out = vec![(0, usize::MAX, 0, 0); ne];
        for (t, e) in ec.iter().enumerate() {
            for (i, &c) in e.iter().enumerate() {
                out[c].0 += 1;
                if out[c].1 == usize::MAX {
                    out[c] = (out[c].0, t, EDGES[i].0, EDGES[i].1);
                }
            }
        }
        out
    }

    /// Greedy 3-2 and 2-0 moves until none applies.
    pub fn simplify(&mut self) {
        'outer: loop {
            let degrees = self.edge_degrees();
            for &(d, t, a, b) in &degrees {
                if d == 3 && self.three_two(t, a, b) {
                    continue 'outer;
                }
            }
            for &(d, t, a, b) in &degrees {
                if d == 2 && self.two_zero(t, a, b) {
                    continue 'outer;
                }
            }
            break;
        }
        self.orient().expect("moves preserve orientability");
    }

    /// Random 2-3 moves, without simplification.
    pub fn scramble<R: Rng>(&mut self, rng: &mut R, moves: usize) {
        for _ in 0..moves {
            let t = rng.gen_range(0..self.len());
            let f = rng.gen_range(0..4);
            self.two_three(t, f);
        }
        self.orient().expect("moves preserve orientability");
    }

    /// Random 2-3 moves followed by simplification.
    pub fn randomize<R: Rng>(&mut self, rng: &mut R) {
        let moves = self.len().max(4);
        self.scramble(rng, moves);
        self.simplify();
    }
}

#[cfg(test)]
mod tests {
    use crate::diagram::LinkDiagram;
    use crate::triangulation::triangulate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_three_then_three_two_round_trip() {
        let mut t = triangulate(&LinkDiagram::parse("2 2").unwrap()).unwrap();
        let n = t.len();
        assert!(t.two_three(0, 0));
        assert_eq!(t.len(), n + 1);
        t.validate().unwrap();
        t.simplify();
        assert!(t.len() <= n);
        t.validate().unwrap();
    }

    #[test]
    fn simplify_keeps_cusps() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in ["2 2", "6*", "4 4", "8*2 0.2 0", "2,2,-3"] {
            let d = LinkDiagram::parse(s).unwrap();
            let mut t = triangulate(&d).unwrap();
            t.simplify();
            t.validate().unwrap();
            assert_eq!(t.cusp_count(), d.components());
            t.randomize(&mut rng);
            t.validate().unwrap();
            assert_eq!(t.cusp_count(), d.components());
        }
    }
}
