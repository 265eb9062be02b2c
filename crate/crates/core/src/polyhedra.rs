//! Registry of basic polyhedra.
//!
//! Every basic polyhedron is stored as a closed braid word. Each letter is one
//! vertex of the polyhedron: lowercase letters are positive generators,
//! uppercase letters are inverse generators, and `a`, `b`, `c`, ... act on
//! strands (1,2), (2,3), (3,4), ...
//!
//! Vertices are numbered by taking the first occurrence of every generator,
//! then the second occurrence of every generator, and so on; a polyhedral
//! Conway symbol fills them in that order. For words whose generators
//! alternate, such as the antiprisms `(aB)^n`, this is plain letter order.

use serde::Serialize;

/// A basic polyhedron together with its braid template.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BasicPolyhedron {
    pub name: String,
    pub braid: String,
}

/// One braid letter: generator index (0 = strands 0/1) and sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BraidLetter {
    pub generator: usize,
    pub positive: bool,
}

impl BasicPolyhedron {
    pub fn vertex_count(&self) -> usize {
        self.braid.chars().count()
    }

    pub fn letters(&self) -> Vec<BraidLetter> {
        self.braid
            .chars()
            .map(|c| BraidLetter {
                generator: (c.to_ascii_lowercase() as u8 - b'a') as usize,
                positive: c.is_ascii_lowercase(),
            })
            .collect()
    }

    /// Braid-letter index of every vertex, in vertex order.
    pub fn vertex_order(&self) -> Vec<usize> {
        let letters = self.letters();
        let mut generators: Vec<usize> = vec![];
        for l in &letters {
            if !generators.contains(&l.generator) {
                generators.push(l.generator);
            }
        }
        let occurrences: Vec<Vec<usize>> = generators
            .iter()
            .map(|&g| (0..letters.len()).filter(|&i| letters[i].generator == g).collect())
            .collect();
        let rounds = occurrences.iter().map(Vec::len).max().unwrap_or(0);
        (0..rounds)
            .flat_map(|k| occurrences.iter().filter_map(move |o| o.get(k).copied()))
            .collect()
    }

    pub fn strand_count(&self) -> usize {
        self.letters().iter().map(|l| l.generator).max().unwrap_or(0) + 2
    }

    /// Antiprismatic polyhedra `(2n)*` are the closures of `(aB)^n`.
    pub fn is_antiprism(&self) -> bool {
        antiprism_half(&self.name).is_some()
    }
}

fn antiprism_half(name: &str) -> Option<usize> {
    let digits = name.strip_suffix('*')?;
    if digits.ends_with('*') {
        return None;
    }
    let v: usize = digits.parse().ok()?;
    if v % 2 == 0 && (4..=48).contains(&v) {
        Some(v / 2)
    } else {
        None
    }
}

const NAMED: &[(&str, &str)] = &[
    ("9*", "AbACbACbC"),
    ("10**", "AbAbCbACbC"),
    ("11**", "AbAbACbACbC"),
    ("12F", "AbAbAbCbACbC"),
];

/// Looks up a basic polyhedron by its Conway name (`6*`, `8*`, `9*`, `10**`, ...).
pub fn lookup(name: &str) -> Option<BasicPolyhedron> {
    if let Some(n) = antiprism_half(name) {
        return Some(BasicPolyhedron {
            name: name.to_string(),
            braid: "aB".repeat(n),
        });
    }
    NAMED.iter().find(|(n, _)| *n == name).map(|(n, b)| BasicPolyhedron {
        name: n.to_string(),
        braid: b.to_string(),
    })
}

/// Antiprism `(2n)*` for `n >= 2`.
pub fn antiprism(n: usize) -> Option<BasicPolyhedron> {
    lookup(&format!("{}*", 2 * n))
}

/// All registered names, antiprisms first.
pub fn names() -> Vec<String> {
    let mut v: Vec<String> = (2..=24).map(|n| format!("{}*", 2 * n)).collect();
    v.extend(NAMED.iter().map(|(n, _)| n.to_string()));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_count_matches_braid_length() {
        for name in names() {
            let p = lookup(&name).unwrap();
            assert_eq!(p.vertex_count(), p.braid.len(), "{name}");
        }
        assert_eq!(lookup("8*").unwrap().braid, "aBaBaBaB");
        assert_eq!(lookup("9*").unwrap().strand_count(), 4);
        assert_eq!(lookup("48*").unwrap().vertex_count(), 48);
    }

    #[test]
    fn vertex_order_interleaves_generators() {
        assert_eq!(lookup("9*").unwrap().vertex_order(), vec![0, 1, 3, 2, 4, 6, 5, 7, 8]);
        assert_eq!(lookup("8*").unwrap().vertex_order(), (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn unknown_names() {
        assert!(lookup("7*").is_none());
        assert!(lookup("50*").is_none());
        assert!(lookup("13F").is_none());
        assert!(lookup("10**").is_some());
    }
}
