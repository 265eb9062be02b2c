//! Conway notation: typed AST, parser and canonical printer.
//!
//! Grammar (whitespace is the tangle product, `,` the ramification):
//!
//! ```text
//! symbol       := named fills | '.' fills | fills-with-separators | ram
//! named        := DIGITS ('*' | '**' | 'F')
//! fills        := field (('.' | ':') field)*
//! field        := ram?
//! ram          := product (',' product)* ('+' | '-')*
//! product      := factor (' ' factor)*
//! factor       := INT | '-' INT | VAR | '-' VAR | '(' ram ')' | '-' '(' ram ')'
//! ```
//!
//! In polyhedral fills `.` advances to the next vertex and `:` skips one vertex
//! (left as the elementary tangle 1). Trailing vertices default to 1. A symbol
//! that starts with `.` or carries top-level separators without a polyhedron
//! name lives on `6*`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyhedra::{self, BasicPolyhedron};

/// A tangle expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Tangle {
    /// Chain of bigons / integer tangle. `0` is a positional placeholder.
    Chain(i64),
    /// Named family parameter (`p`, `-q`, ...); only valid in templates.
    Var { name: String, negative: bool },
    /// Space-separated product, left associative.
    Product(Vec<Tangle>),
    /// Comma-separated ramification.
    Ramification(Vec<Tangle>),
    /// Trailing `+` (positive count) or `-` (negative count) suffix.
    Plus(Box<Tangle>, i32),
    /// Leading `-` on a parenthesized tangle.
    Negated(Box<Tangle>),
}

/// Content of one polyhedron vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VertexFill {
    Filled(Tangle),
    /// An empty field between two separators.
    Empty,
    /// Passed over by a `:` separator.
    Skipped,
    /// Not reached by any field.
    Default,
}

impl VertexFill {
    pub fn tangle(&self) -> Tangle {
        match self {
            VertexFill::Filled(t) => t.clone(),
            _ => Tangle::Chain(1),
        }
    }

    pub fn is_implicit(&self) -> bool {
        !matches!(self, VertexFill::Filled(_))
    }
}

/// How a polyhedral symbol was written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PolyStyle {
    /// `8*2 0.2 0`
    Named,
    /// `.2.2 0` (6* abbreviation)
    Dot,
    /// `2:2:2` (6* abbreviation without leading dot)
    Bare,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Body {
    Algebraic(Tangle),
    Polyhedral {
        basis: BasicPolyhedron,
        style: PolyStyle,
        fills: Vec<VertexFill>,
    },
}

/// A parsed Conway symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ConwaySymbol {
    pub body: Body,
}

/// Index of a chain (or parameter) leaf in pre-order.
pub type ChainPos = usize;

impl Tangle {
    pub fn chain(n: i64) -> Tangle {
        Tangle::Chain(n)
    }

    /// Visit leaves (chains and variables) in pre-order.
    pub fn leaves<'a>(&'a self, out: &mut Vec<&'a Tangle>) {
        match self {
            Tangle::Chain(_) | Tangle::Var { .. } => out.push(self),
            Tangle::Product(v) | Tangle::Ramification(v) => v.iter().for_each(|t| t.leaves(out)),
            Tangle::Plus(t, _) | Tangle::Negated(t) => t.leaves(out),
        }
    }

    /// Rebuild the tree, replacing every leaf by `f(pos, leaf)`.
    pub fn map_leaves(&self, counter: &mut usize, f: &mut dyn FnMut(ChainPos, &Tangle) -> Tangle) -> Tangle {
        match self {
            Tangle::Chain(_) | Tangle::Var { .. } => {
                let pos = *counter;
                *counter += 1;
                f(pos, self)
            }
            Tangle::Product(v) => {
                Tangle::Product(v.iter().map(|t| t.map_leaves(counter, f)).collect())
            }
            Tangle::Ramification(v) => {
                Tangle::Ramification(v.iter().map(|t| t.map_leaves(counter, f)).collect())
            }
            Tangle::Plus(t, k) => Tangle::Plus(Box::new(t.map_leaves(counter, f)), *k),
            Tangle::Negated(t) => Tangle::Negated(Box::new(t.map_leaves(counter, f))),
        }
    }

    fn crossings(&self) -> u64 {
        match self {
            Tangle::Chain(n) => n.unsigned_abs(),
            Tangle::Var { .. } => 2,
            Tangle::Product(v) | Tangle::Ramification(v) => v.iter().map(|t| t.crossings()).sum(),
            Tangle::Plus(t, k) => t.crossings() + k.unsigned_abs() as u64,
            Tangle::Negated(t) => t.crossings(),
        }
    }

    fn mirrored(&self) -> Tangle {
        match self {
            Tangle::Chain(n) => Tangle::Chain(-n),
            Tangle::Var { name, negative } => Tangle::Var {
                name: name.clone(),
                negative: !negative,
            },
            Tangle::Product(v) => Tangle::Product(v.iter().map(Tangle::mirrored).collect()),
            Tangle::Ramification(v) => Tangle::Ramification(v.iter().map(Tangle::mirrored).collect()),
            Tangle::Plus(t, k) => Tangle::Plus(Box::new(t.mirrored()), -k),
            Tangle::Negated(t) => Tangle::Negated(Box::new(t.mirrored())),
        }
    }

    pub fn has_vars(&self) -> bool {
        let mut v = Vec::new();
        self.leaves(&mut v);
        v.iter().any(|t| matches!(t, Tangle::Var { .. }))
    }
}

impl ConwaySymbol {
    pub fn algebraic(t: Tangle) -> Self {
        ConwaySymbol {
            body: Body::Algebraic(t),
        }
    }

    /// All tangles of the symbol in leaf order: the root, or each vertex fill.
    pub fn leaves(&self) -> Vec<&Tangle> {
        let mut out = Vec::new();
        match &self.body {
            Body::Algebraic(t) => t.leaves(&mut out),
            Body::Polyhedral { fills, .. } => {
                for f in fills {
                    if let VertexFill::Filled(t) = f {
                        t.leaves(&mut out);
                    }
                }
            }
        }
        out
    }

    /// Rebuild with every leaf mapped; leaf positions follow [`ConwaySymbol::leaves`].
    pub fn map_leaves(&self, f: &mut dyn FnMut(ChainPos, &Tangle) -> Tangle) -> ConwaySymbol {
        let mut counter = 0;
        let body = match &self.body {
            Body::Algebraic(t) => Body::Algebraic(t.map_leaves(&mut counter, f)),
            Body::Polyhedral { basis, style, fills } => Body::Polyhedral {
                basis: basis.clone(),
                style: *style,
                fills: fills
                    .iter()
                    .map(|v| match v {
                        VertexFill::Filled(t) => VertexFill::Filled(t.map_leaves(&mut counter, f)),
                        other => other.clone(),
                    })
                    .collect(),
            },
        };
        ConwaySymbol { body }
    }

    pub fn has_vars(&self) -> bool {
        self.leaves().iter().any(|t| matches!(t, Tangle::Var { .. }))
    }

    pub fn basis(&self) -> Option<&BasicPolyhedron> {
        match &self.body {
            Body::Polyhedral { basis, .. } => Some(basis),
            Body::Algebraic(_) => None,
        }
    }
}

/// Parse a Conway symbol (templates with parameter letters are accepted).
pub fn parse(text: &str) -> Result<ConwaySymbol> {
    Parser::new(text).symbol()
}

/// Canonical text of a symbol.
pub fn print(symbol: &ConwaySymbol) -> String {
    symbol.to_string()
}

/// Mirror image: every chain negated. Implicit polyhedron vertices become
/// explicit `-1` fills.
pub fn mirror(symbol: &ConwaySymbol) -> ConwaySymbol {
    let body = match &symbol.body {
        Body::Algebraic(t) => Body::Algebraic(t.mirrored()),
        Body::Polyhedral { basis, style, fills } => Body::Polyhedral {
            basis: basis.clone(),
            style: *style,
            fills: fills
                .iter()
                .map(|f| match f {
                    VertexFill::Filled(t) => VertexFill::Filled(t.mirrored()),
                    _ => VertexFill::Filled(Tangle::Chain(-1)),
                })
                .collect(),
        },
    };
    ConwaySymbol { body }
}

/// Number of crossings of the unreduced diagram described by the symbol.
pub fn crossing_count(symbol: &ConwaySymbol) -> u64 {
    match &symbol.body {
        Body::Algebraic(t) => t.crossings(),
        Body::Polyhedral { fills, .. } => fills.iter().map(|f| f.tangle().crossings()).sum(),
    }
}

/// Canonical key used for caching.
pub fn canonical(text: &str) -> Result<String> {
    Ok(parse(text)?.to_string())
}

// ---------------------------------------------------------------- printing

fn write_ram_elem(t: &Tangle, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Tangle::Ramification(_) | Tangle::Plus(..) => write!(f, "({})", t),
        _ => write!(f, "{}", t),
    }
}

fn write_product_elem(t: &Tangle, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Tangle::Ramification(_) | Tangle::Plus(..) | Tangle::Product(_) => write!(f, "({})", t),
        _ => write!(f, "{}", t),
    }
}

impl fmt::Display for Tangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tangle::Chain(n) => write!(f, "{n}"),
            Tangle::Var { name, negative } => {
                if *negative {
                    write!(f, "-")?;
                }
                write!(f, "{name}")
            }
            Tangle::Product(v) => {
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write_product_elem(t, f)?;
                }
                Ok(())
            }
            Tangle::Ramification(v) => {
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write_ram_elem(t, f)?;
                }
                Ok(())
            }
            Tangle::Plus(t, k) => {
                match t.as_ref() {
                    Tangle::Plus(..) => write!(f, "({t})")?,
                    _ => write!(f, "{t}")?,
                }
                let c = if *k > 0 { "+" } else { "-" };
                write!(f, "{}", c.repeat(k.unsigned_abs() as usize))
            }
            Tangle::Negated(t) => write!(f, "-({t})"),
        }
    }
}

impl fmt::Display for ConwaySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            Body::Algebraic(t) => write!(f, "{t}"),
            Body::Polyhedral { basis, style, fills } => {
                match style {
                    PolyStyle::Named => write!(f, "{}", basis.name)?,
                    PolyStyle::Dot => write!(f, ".")?,
                    PolyStyle::Bare => {}
                }
                // last vertex that is printed explicitly
                let last = fills
                    .iter()
                    .rposition(|v| !matches!(v, VertexFill::Default | VertexFill::Skipped));
                let Some(last) = last else {
                    return Ok(());
                };
                let mut i = 0;
                while i <= last {
                    if i > 0 {
                        if fills[i] == VertexFill::Skipped {
                            write!(f, ":")?;
                            i += 1;
                            continue;
                        } else if fills[i - 1] != VertexFill::Skipped {
                            write!(f, ".")?;
                        }
                    }
                    if let VertexFill::Filled(t) = &fills[i] {
                        match t {
                            Tangle::Ramification(_) | Tangle::Plus(..) => write!(f, "({t})")?,
                            _ => write!(f, "{t}")?,
                        }
                    }
                    i += 1;
                }
                Ok(())
            }
        }
    }
}

// ---------------------------------------------------------------- parsing

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            message: message.into(),
            input: self.src.to_string(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn symbol(&mut self) -> Result<ConwaySymbol> {
        self.skip_ws();
        if self.peek().is_none() {
            return self.err("empty symbol");
        }
        while self.chars.last().is_some_and(|c| c.is_whitespace()) {
            self.chars.pop();
        }

        if let Some(name) = self.poly_name() {
            let basis = match polyhedra::lookup(&name) {
                Some(b) => b,
                None => return self.err(format!("unknown basic polyhedron {name}")),
            };
            return self.fills(basis, PolyStyle::Named);
        }
        let six = polyhedra::lookup("6*").expect("6* registered");
        if self.peek() == Some('.') {
            self.pos += 1;
            return self.fills(six, PolyStyle::Dot);
        }
        if self.has_top_level_separator() {
            return self.fills(six, PolyStyle::Bare);
        }
        let t = self.ram()?;
        self.skip_ws();
        if self.peek().is_some() {
            return self.err(format!("unexpected '{}'", self.peek().unwrap()));
        }
        Ok(ConwaySymbol::algebraic(t))
    }

    /// `DIGITS ('*' | '**' | 'F')` at the current position.
    fn poly_name(&mut self) -> Option<String> {
        let start = self.pos;
        let mut i = self.pos;
        while matches!(self.chars.get(i), Some(c) if c.is_ascii_digit()) {
            i += 1;
        }
        if i == start {
            return None;
        }
        let digits: String = self.chars[start..i].iter().collect();
        match self.chars.get(i) {
            Some('*') => {
                i += 1;
                let mut name = format!("{digits}*");
                if self.chars.get(i) == Some(&'*') {
                    i += 1;
                    name.push('*');
                }
                self.pos = i;
                Some(name)
            }
            Some('F') => {
                self.pos = i + 1;
                Some(format!("{digits}F"))
            }
            _ => None,
        }
    }

    fn has_top_level_separator(&self) -> bool {
        let mut depth = 0i32;
        for &c in &self.chars[self.pos..] {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '.' | ':' if depth == 0 => return true,
                _ => {}
            }
        }
        false
    }

    fn fills(&mut self, basis: BasicPolyhedron, style: PolyStyle) -> Result<ConwaySymbol> {
        let n = basis.vertex_count();
        let overflow = format!("vertex overflow: {} has {} vertices", basis.name, n);
        let mut fills = vec![VertexFill::Default; n];
        let mut idx = 0usize;
        let mut first = true;
        loop {
            self.skip_ws();
            let field = match self.peek() {
                None | Some('.') | Some(':') => None,
                _ => Some(self.ram()?),
            };
            self.skip_ws();
            let sep = self.peek();
            match field {
                Some(t) => {
                    if idx >= n {
                        return self.err(overflow);
                    }
                    fills[idx] = VertexFill::Filled(t);
                }
                None if !(first && sep.is_none()) => {
                    if idx >= n {
                        return self.err(overflow);
                    }
                    fills[idx] = VertexFill::Empty;
                }
                None => {}
            }
            first = false;
            match sep {
                None => break,
                Some('.') => idx += 1,
                Some(':') => {
                    if idx + 1 >= n {
                        return self.err(overflow);
                    }
                    fills[idx + 1] = VertexFill::Skipped;
                    idx += 2;
                }
                Some(c) => return self.err(format!("unexpected '{c}'")),
            }
            self.pos += 1;
        }
        Ok(ConwaySymbol {
            body: Body::Polyhedral { basis, style, fills },
        })
    }

    fn ram(&mut self) -> Result<Tangle> {
        let mut items = vec![self.product()?];
        loop {
            self.skip_ws();
            if self.peek() == Some(',') {
                self.pos += 1;
                self.skip_ws();
                items.push(self.product()?);
            } else {
                break;
            }
        }
        let mut t = if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Tangle::Ramification(items)
        };
        let mut count = 0i32;
        loop {
            match self.peek() {
                Some('+') => {
                    count += 1;
                    self.pos += 1;
                }
                Some('-') if !self.starts_factor(1) => {
                    count -= 1;
                    self.pos += 1;
                }
                _ => break,
            }
        }
        if count != 0 {
            t = Tangle::Plus(Box::new(t), count);
        }
        Ok(t)
    }

    fn starts_factor(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Some(c) if c.is_ascii_digit() || c == '(' || c.is_ascii_lowercase())
    }

    fn product(&mut self) -> Result<Tangle> {
        let mut items = vec![self.factor()?];
        loop {
            let save = self.pos;
            let had_ws = matches!(self.peek(), Some(c) if c.is_whitespace());
            self.skip_ws();
            let next_is_factor = match self.peek() {
                Some('-') => self.starts_factor(1),
                Some(c) => c.is_ascii_digit() || c == '(' || c.is_ascii_lowercase(),
                None => false,
            };
            // a factor may directly follow a closing parenthesis: "(2,2)(2,2)"
            let glued = !had_ws && self.pos > 0 && self.chars[self.pos - 1] == ')';
            if next_is_factor && (had_ws || glued) {
                items.push(self.factor()?);
            } else {
                self.pos = save;
                break;
            }
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Tangle::Product(items)
        })
    }

    fn factor(&mut self) -> Result<Tangle> {
        let negative = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                self.skip_ws();
                let inner = self.ram()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(if negative {
                    match inner {
                        Tangle::Chain(n) => Tangle::Chain(-n),
                        Tangle::Var { name, negative } => Tangle::Var {
                            name,
                            negative: !negative,
                        },
                        other => Tangle::Negated(Box::new(other)),
                    }
                } else {
                    inner
                })
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let n: i64 = match s.parse() {
                    Ok(n) => n,
                    Err(_) => return self.err("integer out of range"),
                };
                Ok(Tangle::Chain(if negative { -n } else { n }))
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_lowercase()) {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                Ok(Tangle::Var { name, negative })
            }
            Some(c) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt(s: &str) -> String {
        parse(s).unwrap().to_string()
    }

    #[test]
    fn rational_product() {
        let s = parse("2 2").unwrap();
        assert_eq!(
            s.body,
            Body::Algebraic(Tangle::Product(vec![Tangle::Chain(2), Tangle::Chain(2)]))
        );
        assert_eq!(crossing_count(&s), 4);
    }

    #[test]
    fn ramification_with_negative() {
        let s = parse("2,2,-2").unwrap();
        assert_eq!(
            s.body,
            Body::Algebraic(Tangle::Ramification(vec![
                Tangle::Chain(2),
                Tangle::Chain(2),
                Tangle::Chain(-2)
            ]))
        );
    }

    #[test]
    fn polyhedral_fills() {
        let s = parse("8*2 0.2 0").unwrap();
        match &s.body {
            Body::Polyhedral { basis, fills, style } => {
                assert_eq!(basis.name, "8*");
                assert_eq!(*style, PolyStyle::Named);
                let pr = Tangle::Product(vec![Tangle::Chain(2), Tangle::Chain(0)]);
                assert_eq!(fills[0], VertexFill::Filled(pr.clone()));
                assert_eq!(fills[1], VertexFill::Filled(pr));
                assert!(fills[2..].iter().all(|f| *f == VertexFill::Default));
            }
            _ => panic!(),
        }
        assert_eq!(crossing_count(&s), 10);
    }

    #[test]
    fn colon_skips_a_vertex() {
        let s = parse("10*p 0::.q 0").unwrap();
        let Body::Polyhedral { fills, .. } = &s.body else { panic!() };
        assert!(matches!(fills[0], VertexFill::Filled(_)));
        assert_eq!(fills[1], VertexFill::Skipped);
        assert_eq!(fills[2], VertexFill::Empty);
        assert_eq!(fills[3], VertexFill::Skipped);
        assert_eq!(fills[4], VertexFill::Empty);
        assert!(matches!(fills[5], VertexFill::Filled(_)));
        assert_eq!(s.to_string(), "10*p 0::.q 0");

        let s = parse("9*(2,-2).-1.-1.(2,-2).-1.-1:-1.-1").unwrap();
        let Body::Polyhedral { fills, .. } = &s.body else { panic!() };
        assert_eq!(fills[6], VertexFill::Skipped);
        assert_eq!(fills[8], VertexFill::Filled(Tangle::Chain(-1)));
    }

    #[test]
    fn six_star_abbreviations() {
        let s = parse(".q.-p.2 0:-1").unwrap();
        assert_eq!(s.basis().unwrap().name, "6*");
        assert_eq!(rt("2:2:2"), "2:2:2");
        assert_eq!(rt(".2:2"), ".2:2");
        assert_eq!(rt(".(2,-2)"), ".(2,-2)");
        assert_eq!(crossing_count(&parse("2 0:2 0:2 0").unwrap()), 9);
        assert_eq!(crossing_count(&parse("6*").unwrap()), 6);
        assert!(parse(".2.2.2.2.2.2.2").is_err());
    }

    #[test]
    fn round_trips() {
        for s in [
            "2 2",
            "(2,2) (2,2)",
            "8*(2,-2).(2,-2)",
            "2,2,2+",
            "2,2,2++",
            "(2,2+) (2,2)",
            "(2,2) -(2,2)",
            "2 1,2,2",
            ".-(2,2)",
            "8*-2 0",
            "p,q,-r",
            "(p,q) -(r,s)",
            "-2 0:-2 0:-2 0",
            "2:-2 0:-2 0",
        ] {
            assert_eq!(rt(s), s);
        }
        assert_eq!(rt("(2)  2"), "2 2");
        assert_eq!(rt("(2,2)(2,2)"), "(2,2) (2,2)");
    }

    #[test]
    fn errors() {
        assert!(matches!(parse(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse("7*2"), Err(Error::Syntax { .. })));
        assert!(parse("(2,2").is_err());
        assert!(parse("2,,2").is_err());
        assert!(parse("8*1.1.1.1.1.1.1.1.1").is_err());
    }

    #[test]
    fn mirror_negates() {
        assert_eq!(mirror(&parse("2 2").unwrap()).to_string(), "-2 -2");
        assert_eq!(mirror(&parse("2,2,-2").unwrap()).to_string(), "-2,-2,2");
        assert_eq!(mirror(&parse("2,2,2+").unwrap()).to_string(), "-2,-2,-2-");
        assert_eq!(
            mirror(&parse("8*2 0.-2 0").unwrap()).to_string(),
            "8*-2 0.2 0.-1.-1.-1.-1.-1.-1"
        );
        let x = parse("(2,2) -(2,3)").unwrap();
        assert_eq!(mirror(&mirror(&x)), x);
    }
}
