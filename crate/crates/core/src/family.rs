//! Link families: parameters, instantiation, source and augmented links,
//! twist numbers and (2,2)-reversal.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::conway::{mirror, parse, Body, ChainPos, ConwaySymbol, Tangle, VertexFill};
use crate::error::{Error, Result};

const NAMES: &str = "pqrstuvwxyz";

/// One named parameter of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Parameter {
    pub name: String,
    /// Magnitude of the source-link entry (at least 2).
    pub base: u64,
}

/// A template symbol whose parameter leaves carry names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub template: ConwaySymbol,
    pub parameters: Vec<Parameter>,
}

/// Offsets `k >= 0` per parameter; the value of `a` is `sgn(a)(|a| + k)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ParameterAssignment(pub BTreeMap<String, u64>);

impl ParameterAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, offset: u64) -> Self {
        self.0.insert(name.to_string(), offset);
        self
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.0.get(name).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TwistReport {
    pub t_d: u64,
    pub conjecture1_lower: u64,
}

/// Result of [`complete_augmentation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmented {
    pub symbol: ConwaySymbol,
    /// The input was mirrored first to make every chain positive.
    pub mirrored: bool,
    pub warning: Option<String>,
}

impl FamilySpec {
    /// Parse a template such as `"8*p 0.q 0"`. Every parameter gets base 2.
    pub fn parse(text: &str) -> Result<FamilySpec> {
        FamilySpec::from_template(parse(text)?)
    }

    pub fn from_template(template: ConwaySymbol) -> Result<FamilySpec> {
        let mut parameters: Vec<Parameter> = Vec::new();
        for leaf in template.leaves() {
            if let Tangle::Var { name, .. } = leaf {
                if !parameters.iter().any(|p| &p.name == name) {
                    parameters.push(Parameter {
                        name: name.clone(),
                        base: 2,
                    });
                }
            }
        }
        Ok(FamilySpec { template, parameters })
    }

    /// Turn the chains at `positions` of a concrete symbol into parameters
    /// named `p, q, r, ...` in order.
    pub fn from_symbol(symbol: &ConwaySymbol, positions: &[ChainPos]) -> Result<FamilySpec> {
        let leaves = symbol.leaves();
        let mut parameters = Vec::new();
        let mut names = BTreeMap::new();
        for (i, &pos) in positions.iter().enumerate() {
            let name = NAMES
                .chars()
                .nth(i)
                .ok_or_else(|| Error::Family("too many parameters".into()))?
                .to_string();
            match leaves.get(pos) {
                Some(Tangle::Chain(a)) if a.abs() >= 2 => {
                    parameters.push(Parameter {
                        name: name.clone(),
                        base: a.unsigned_abs(),
                    });
                    names.insert(pos, (name, *a < 0));
                }
                _ => return Err(Error::Family(format!("position {pos} is not a chain of bigons"))),
            }
        }
        let template = symbol.map_leaves(&mut |pos, leaf| match names.get(&pos) {
            Some((name, negative)) => Tangle::Var {
                name: name.clone(),
                negative: *negative,
            },
            None => leaf.clone(),
        });
        Ok(FamilySpec { template, parameters })
    }

    pub fn parameter(&self, name: &str) -> Result<&Parameter> {
        self.parameters
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))
    }

    pub fn set_base(&mut self, name: &str, base: u64) -> Result<()> {
        if base < 2 {
            return Err(Error::Family(format!("base of {name} must be at least 2")));
        }
        let p = self
            .parameters
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
        p.base = base;
        Ok(())
    }

    /// Tie `other` to `keep`: both take the same value.
    pub fn lock(&self, keep: &str, other: &str) -> Result<FamilySpec> {
        self.parameter(keep)?;
        self.parameter(other)?;
        if keep == other {
            return Ok(self.clone());
        }
        let template = self.template.map_leaves(&mut |_, leaf| match leaf {
            Tangle::Var { name, negative } if name == other => Tangle::Var {
                name: keep.to_string(),
                negative: *negative,
            },
            _ => leaf.clone(),
        });
        let parameters = self.parameters.iter().filter(|p| p.name != other).cloned().collect();
        Ok(FamilySpec { template, parameters })
    }

    /// Offsets covering the parameter values `values`.
    pub fn offsets(&self, name: &str, values: RangeInclusive<u64>) -> Result<RangeInclusive<u64>> {
        let base = self.parameter(name)?.base;
        if *values.start() < base {
            return Err(Error::Family(format!("{name} starts at {base}, not {}", values.start())));
        }
        Ok(values.start() - base..=values.end() - base)
    }

    pub fn value(&self, name: &str, offset: u64) -> Result<u64> {
        Ok(self.parameter(name)?.base + offset)
    }

    /// Assign some parameters and keep the others symbolic.
    pub fn partial(&self, asn: &ParameterAssignment) -> Result<FamilySpec> {
        for name in asn.0.keys() {
            self.parameter(name)?;
        }
        let template = self.substitute(asn, false)?;
        let parameters = self
            .parameters
            .iter()
            .filter(|p| asn.get(&p.name).is_none())
            .cloned()
            .collect();
        Ok(FamilySpec { template, parameters })
    }

    fn substitute(&self, asn: &ParameterAssignment, complete: bool) -> Result<ConwaySymbol> {
        let mut missing = None;
        let symbol = self.template.map_leaves(&mut |_, leaf| match leaf {
            Tangle::Var { name, negative } => match (asn.get(name), self.parameter(name)) {
                (Some(k), Ok(p)) => {
                    let v = (p.base + k) as i64;
                    Tangle::Chain(if *negative { -v } else { v })
                }
                _ => {
                    if complete {
                        missing.get_or_insert_with(|| name.clone());
                    }
                    leaf.clone()
                }
            },
            _ => leaf.clone(),
        });
        match missing {
            Some(name) => Err(Error::Unbound(name)),
            None => Ok(symbol),
        }
    }

    pub fn source(&self) -> ConwaySymbol {
        source_link(&self.template)
    }

    pub fn augmented(&self) -> Augmented {
        complete_augmentation(&self.template)
    }
}

impl std::fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.template)
    }
}

/// Positions of chains eligible as parameters (`|a| >= 2`, or already a parameter).
pub fn parameters(symbol: &ConwaySymbol) -> Vec<ChainPos> {
    symbol
        .leaves()
        .iter()
        .enumerate()
        .filter(|(_, t)| is_parameter_leaf(t))
        .map(|(i, _)| i)
        .collect()
}

fn is_parameter_leaf(t: &Tangle) -> bool {
    match t {
        Tangle::Chain(a) => a.abs() >= 2,
        Tangle::Var { .. } => true,
        _ => false,
    }
}

fn is_negative_leaf(t: &Tangle) -> bool {
    match t {
        Tangle::Chain(a) => *a <= -2,
        Tangle::Var { negative, .. } => *negative,
        _ => false,
    }
}

pub fn instantiate(spec: &FamilySpec, asn: &ParameterAssignment) -> Result<ConwaySymbol> {
    spec.substitute(asn, true)
}

/// Every chain `a` with `|a| >= 2` becomes `sgn(a) 2`, and every chain of
/// pluses is shortened to two.
pub fn source_link(symbol: &ConwaySymbol) -> ConwaySymbol {
    let chains = symbol.map_leaves(&mut |_, leaf| match leaf {
        Tangle::Chain(a) if a.abs() >= 2 => Tangle::Chain(2 * a.signum()),
        Tangle::Var { negative, .. } => Tangle::Chain(if *negative { -2 } else { 2 }),
        _ => leaf.clone(),
    });
    map_tangles(&chains, &mut shorten_pluses)
}

fn shorten_pluses(t: &Tangle) -> Tangle {
    match t {
        Tangle::Chain(_) | Tangle::Var { .. } => t.clone(),
        Tangle::Product(v) => Tangle::Product(v.iter().map(shorten_pluses).collect()),
        Tangle::Ramification(v) => Tangle::Ramification(v.iter().map(shorten_pluses).collect()),
        Tangle::Plus(f, k) => Tangle::Plus(Box::new(shorten_pluses(f)), if k.abs() >= 2 { 2 * k.signum() } else { *k }),
        Tangle::Negated(f) => Tangle::Negated(Box::new(shorten_pluses(f))),
    }
}

fn crossing_circle() -> Tangle {
    Tangle::Ramification(vec![Tangle::Chain(2), Tangle::Chain(-2)])
}

fn augmenting_tangle() -> Tangle {
    Tangle::Product(vec![crossing_circle(), Tangle::Chain(0)])
}

/// Targets of an augmentation: chain positions, and whether chains of
/// pluses (`t++`) are augmented too.
struct Targets<'a> {
    chains: &'a BTreeSet<ChainPos>,
    pluses: bool,
}

fn augment_tangle(t: &Tangle, counter: &mut usize, targets: &Targets) -> Tangle {
    match t {
        Tangle::Chain(_) | Tangle::Var { .. } => {
            let pos = *counter;
            *counter += 1;
            if targets.chains.contains(&pos) {
                augmenting_tangle()
            } else {
                t.clone()
            }
        }
        Tangle::Product(v) => {
            // "p 0" with p augmented reads "(2,-2) 0 0", and the two zeros cancel
            if v.len() == 2 && v[1] == Tangle::Chain(0) && targets.chains.contains(counter) && is_parameter_leaf(&v[0]) {
                *counter += 2;
                return crossing_circle();
            }
            let mut out = Vec::with_capacity(v.len() + 1);
            for (i, f) in v.iter().enumerate() {
                let g = augment_tangle(f, counter, targets);
                match g {
                    Tangle::Product(inner) if i == 0 && !matches!(f, Tangle::Product(_)) => out.extend(inner),
                    g => out.push(g),
                }
            }
            Tangle::Product(out)
        }
        Tangle::Ramification(v) => Tangle::Ramification(v.iter().map(|f| augment_tangle(f, counter, targets)).collect()),
        Tangle::Plus(f, k) if targets.pluses && k.abs() >= 2 => {
            // "t++" reads t + ((2,-2) 0), that is (t 0),(2,-2)
            match augment_tangle(f, counter, targets) {
                Tangle::Ramification(mut v) => {
                    v.push(crossing_circle());
                    Tangle::Ramification(v)
                }
                g => Tangle::Ramification(vec![Tangle::Product(vec![g, Tangle::Chain(0)]), crossing_circle()]),
            }
        }
        Tangle::Plus(f, k) => Tangle::Plus(Box::new(augment_tangle(f, counter, targets)), *k),
        Tangle::Negated(f) => Tangle::Negated(Box::new(augment_tangle(f, counter, targets))),
    }
}

fn negative_pluses(t: &Tangle) -> usize {
    match t {
        Tangle::Chain(_) | Tangle::Var { .. } => 0,
        Tangle::Product(v) | Tangle::Ramification(v) => v.iter().map(negative_pluses).sum(),
        Tangle::Plus(f, k) => negative_pluses(f) + usize::from(*k <= -2),
        Tangle::Negated(f) => negative_pluses(f),
    }
}

fn map_tangles(symbol: &ConwaySymbol, f: &mut dyn FnMut(&Tangle) -> Tangle) -> ConwaySymbol {
    let body = match &symbol.body {
        Body::Algebraic(t) => Body::Algebraic(f(t)),
        Body::Polyhedral { basis, style, fills } => Body::Polyhedral {
            basis: basis.clone(),
            style: *style,
            fills: fills
                .iter()
                .map(|x| match x {
                    VertexFill::Filled(t) => VertexFill::Filled(f(t)),
                    other => other.clone(),
                })
                .collect(),
        },
    };
    ConwaySymbol { body }
}

fn augment_positions(symbol: &ConwaySymbol, targets: &Targets) -> ConwaySymbol {
    let mut counter = 0;
    map_tangles(symbol, &mut |t| augment_tangle(t, &mut counter, targets))
}

/// Replace the positive chain at `position` by the tangle `(2,-2) 0`.
pub fn augment(symbol: &ConwaySymbol, position: ChainPos) -> Result<ConwaySymbol> {
    let leaves = symbol.leaves();
    let leaf = leaves
        .get(position)
        .ok_or_else(|| Error::NotAugmentable(position, "no such chain".into()))?;
    if !is_parameter_leaf(leaf) {
        return Err(Error::NotAugmentable(position, format!("entry {leaf} is not a chain of bigons")));
    }
    if is_negative_leaf(leaf) {
        return Err(Error::NotAugmentable(position, format!("entry {leaf} is negative")));
    }
    let chains = BTreeSet::from([position]);
    Ok(augment_positions(symbol, &Targets { chains: &chains, pluses: false }))
}

/// Augment every occurrence of parameter `name`.
pub fn augment_parameter(symbol: &ConwaySymbol, name: &str) -> Result<ConwaySymbol> {
    let targets: BTreeSet<ChainPos> = symbol
        .leaves()
        .iter()
        .enumerate()
        .filter(|(_, t)| matches!(t, Tangle::Var { name: n, .. } if n == name))
        .map(|(i, _)| i)
        .collect();
    if targets.is_empty() {
        return Err(Error::UnknownParameter(name.to_string()));
    }
    Ok(augment_positions(symbol, &Targets { chains: &targets, pluses: false }))
}

/// Augment every chain of bigons, including chains of pluses. Negative chains are removed by mirroring
/// when that makes all chains positive; otherwise they are augmented as they
/// stand and a warning is attached.
pub fn complete_augmentation(symbol: &ConwaySymbol) -> Augmented {
    let negative = |s: &ConwaySymbol| {
        let mut n = s.leaves().iter().filter(|t| is_negative_leaf(t)).count();
        map_tangles(s, &mut |t| {
            n += negative_pluses(t);
            t.clone()
        });
        n
    };
    let (base, mirrored, warning) = if negative(symbol) == 0 {
        (symbol.clone(), false, None)
    } else {
        let m = mirror(symbol);
        if negative(&m) == 0 {
            (m, true, None)
        } else {
            let w = format!("{symbol} has chains of both signs; negative chains augmented directly");
            (symbol.clone(), false, Some(w))
        }
    };
    let chains: BTreeSet<ChainPos> = parameters(&base).into_iter().collect();
    Augmented {
        symbol: augment_positions(&base, &Targets { chains: &chains, pluses: true }),
        mirrored,
        warning,
    }
}

fn tangle_twists(t: &Tangle) -> u64 {
    match t {
        Tangle::Chain(0) => 0,
        Tangle::Chain(_) | Tangle::Var { .. } => 1,
        Tangle::Product(v) | Tangle::Ramification(v) => v.iter().map(tangle_twists).sum(),
        Tangle::Plus(f, k) => tangle_twists(f) + u64::from(*k != 0),
        Tangle::Negated(f) => tangle_twists(f),
    }
}

/// Twist number of the diagram: chains of bigons plus isolated crossings.
pub fn twist_number(symbol: &ConwaySymbol) -> TwistReport {
    let t_d = match &symbol.body {
        Body::Algebraic(t) => tangle_twists(t),
        Body::Polyhedral { fills, .. } => fills
            .iter()
            .map(|f| match f {
                VertexFill::Filled(t) => tangle_twists(t),
                _ => 1,
            })
            .sum(),
    };
    TwistReport {
        t_d,
        conjecture1_lower: t_d / 2 + 1,
    }
}

fn is_reversible(t: &Tangle) -> bool {
    let pair = |t: &Tangle| match t {
        Tangle::Ramification(v) => v.len() == 2 && v.iter().all(|x| matches!(x, Tangle::Chain(a) if a.abs() == 2)),
        _ => false,
    };
    match t {
        Tangle::Negated(inner) => pair(inner),
        t => pair(t),
    }
}

fn toggle(t: &Tangle, counter: &mut usize, target: usize) -> Tangle {
    if is_reversible(t) {
        let idx = *counter;
        *counter += 1;
        return if idx == target {
            Tangle::Product(vec![t.clone(), Tangle::Chain(0)])
        } else {
            t.clone()
        };
    }
    match t {
        Tangle::Product(v) => {
            let mut out = Vec::with_capacity(v.len() + 1);
            let mut rest = &v[..];
            if v.len() >= 2 && is_reversible(&v[0]) && v[1] == Tangle::Chain(0) {
                let idx = *counter;
                *counter += 1;
                if idx == target {
                    out.push(v[0].clone());
                } else {
                    out.extend_from_slice(&v[..2]);
                }
                rest = &v[2..];
            }
            for f in rest {
                let g = toggle(f, counter, target);
                match g {
                    Tangle::Product(inner) if out.is_empty() && is_reversible(f) => out.extend(inner),
                    g => out.push(g),
                }
            }
            if out.len() == 1 {
                out.pop().unwrap()
            } else {
                Tangle::Product(out)
            }
        }
        Tangle::Ramification(v) => Tangle::Ramification(v.iter().map(|f| toggle(f, counter, target)).collect()),
        Tangle::Plus(f, k) => Tangle::Plus(Box::new(toggle(f, counter, target)), *k),
        Tangle::Negated(f) => Tangle::Negated(Box::new(toggle(f, counter, target))),
        _ => t.clone(),
    }
}

fn count_reversible(t: &Tangle) -> usize {
    if is_reversible(t) {
        return 1;
    }
    match t {
        Tangle::Product(v) if v.len() >= 2 && is_reversible(&v[0]) && v[1] == Tangle::Chain(0) => {
            1 + v[2..].iter().map(count_reversible).sum::<usize>()
        }
        Tangle::Product(v) | Tangle::Ramification(v) => v.iter().map(count_reversible).sum(),
        Tangle::Plus(f, _) | Tangle::Negated(f) => count_reversible(f),
        _ => 0,
    }
}

/// Number of subtangles `(2,2)`, `(2,-2)`, `-(2,2)` (with or without `0`).
pub fn reversible_count(symbol: &ConwaySymbol) -> usize {
    match &symbol.body {
        Body::Algebraic(t) => count_reversible(t),
        Body::Polyhedral { fills, .. } => fills
            .iter()
            .map(|f| match f {
                VertexFill::Filled(t) => count_reversible(t),
                _ => 0,
            })
            .sum(),
    }
}

/// (2,2)-reversal: toggle the `0` after the `position`-th reversible subtangle.
pub fn reversal(symbol: &ConwaySymbol, position: usize) -> Result<ConwaySymbol> {
    if position >= reversible_count(symbol) {
        return Err(Error::NotReversible(position));
    }
    let mut counter = 0;
    let body = match &symbol.body {
        Body::Algebraic(t) => Body::Algebraic(toggle(t, &mut counter, position)),
        Body::Polyhedral { basis, style, fills } => Body::Polyhedral {
            basis: basis.clone(),
            style: *style,
            fills: fills
                .iter()
                .map(|f| match f {
                    VertexFill::Filled(t) => VertexFill::Filled(toggle(t, &mut counter, position)),
                    other => other.clone(),
                })
                .collect(),
        },
    };
    Ok(ConwaySymbol { body })
}

/// Lexicographic sweep over offset ranges; parameters without a range stay at offset 0.
pub fn sweep(
    spec: &FamilySpec,
    ranges: &[(String, RangeInclusive<u64>)],
) -> Result<Vec<(ParameterAssignment, ConwaySymbol)>> {
    for (name, _) in ranges {
        spec.parameter(name)?;
    }
    let axes: Vec<(String, Vec<u64>)> = spec
        .parameters
        .iter()
        .map(|p| {
            let values = match ranges.iter().find(|(n, _)| n == &p.name) {
                Some((_, r)) => r.clone().collect(),
                None => vec![0],
            };
            (p.name.clone(), values)
        })
        .collect();
    let mut out = Vec::new();
    if axes.iter().any(|(_, v)| v.is_empty()) {
        return Ok(out);
    }
    let mut idx = vec![0usize; axes.len()];
    loop {
        let mut asn = ParameterAssignment::new();
        for (k, (name, values)) in axes.iter().enumerate() {
            asn.0.insert(name.clone(), values[idx[k]]);
        }
        let symbol = instantiate(spec, &asn)?;
        out.push((asn, symbol));
        let mut k = axes.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].1.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ConwaySymbol {
        parse(s).unwrap()
    }

    #[test]
    fn parameter_positions() {
        assert_eq!(parameters(&p("2 1 2")), vec![0, 2]);
        assert_eq!(parameters(&p("3 1")), vec![0]);
        assert_eq!(parameters(&p("8*2 0.2 0")), vec![0, 2]);
    }

    #[test]
    fn instantiation() {
        let spec = FamilySpec::parse("p q").unwrap();
        let asn = ParameterAssignment::new().with("p", 1).with("q", 1);
        assert_eq!(instantiate(&spec, &asn).unwrap().to_string(), "3 3");
        let zero = ParameterAssignment::new().with("p", 0).with("q", 0);
        assert_eq!(instantiate(&spec, &zero).unwrap().to_string(), "2 2");
        let spec = FamilySpec::parse("8*p 0.-q 0").unwrap();
        let asn = ParameterAssignment::new().with("p", 0).with("q", 1);
        assert_eq!(instantiate(&spec, &asn).unwrap().to_string(), "8*2 0.-3 0");
        assert!(matches!(instantiate(&spec, &ParameterAssignment::new()), Err(Error::Unbound(_))));
    }

    #[test]
    fn from_symbol_keeps_bases() {
        let spec = FamilySpec::from_symbol(&p("3 1 -2"), &[0, 2]).unwrap();
        assert_eq!(spec.to_string(), "p 1 -q");
        assert_eq!(spec.parameter("p").unwrap().base, 3);
        let asn = ParameterAssignment::new().with("p", 0).with("q", 2);
        assert_eq!(instantiate(&spec, &asn).unwrap().to_string(), "3 1 -4");
        assert!(FamilySpec::from_symbol(&p("3 1"), &[1]).is_err());
    }

    #[test]
    fn source_links() {
        assert_eq!(source_link(&p("p q 1 r")).to_string(), "2 2 1 2");
        assert_eq!(source_link(&p("2 2")).to_string(), "2 2");
        assert_eq!(source_link(&p("p,q,-r")).to_string(), "2,2,-2");
        let s = source_link(&p("5 1 -7,3"));
        assert_eq!(source_link(&s), s);
    }

    #[test]
    fn augmentation() {
        let s = p("8*p 0.2 0");
        assert_eq!(augment(&s, 0).unwrap().to_string(), "8*(2,-2).2 0");
        assert_eq!(complete_augmentation(&p("8*p 0.q 0")).symbol.to_string(), "8*(2,-2).(2,-2)");
        assert_eq!(augment(&p("p q"), 0).unwrap().to_string(), "(2,-2) 0 q");
        assert_eq!(augment(&p("p q"), 1).unwrap().to_string(), "p ((2,-2) 0)");
        assert_eq!(complete_augmentation(&p("p q")).symbol.to_string(), "(2,-2) 0 ((2,-2) 0)");
        assert_eq!(complete_augmentation(&p(".p")).symbol.to_string(), ".(2,-2) 0");
        assert!(matches!(augment(&p("2 1 2"), 1), Err(Error::NotAugmentable(1, _))));
        assert!(augment(&p("-3 2"), 0).is_err());
    }

    #[test]
    fn augmentation_of_plus_chains() {
        let a = complete_augmentation(&p("p,q,r++"));
        assert_eq!(a.symbol.to_string(), "(2,-2) 0,(2,-2) 0,(2,-2) 0,(2,-2)");
        assert_eq!(complete_augmentation(&p("p,q,r+")).symbol.to_string(), "(2,-2) 0,(2,-2) 0,(2,-2) 0+");
        assert!(complete_augmentation(&p("-2,-2,-2--")).mirrored);
        assert!(complete_augmentation(&p("p,q,r--")).warning.is_some());
        assert_eq!(source_link(&p("3,4,5+++")).to_string(), "2,2,2++");
        assert_eq!(twist_number(&p("p,q,r++")).t_d, 4);
    }

    #[test]
    fn augmentation_of_negative_chains() {
        let a = complete_augmentation(&p("8*p 0.-q 0"));
        assert!(a.warning.is_some());
        assert_eq!(a.symbol.to_string(), "8*(2,-2).(2,-2)");
        let a = complete_augmentation(&p("-p 0:-q 0:-r 0"));
        assert!(a.mirrored && a.warning.is_none());
    }

    #[test]
    fn twist_numbers() {
        assert_eq!(twist_number(&p("p q")).t_d, 2);
        assert_eq!(twist_number(&p("p 1 q")).t_d, 3);
        assert_eq!(twist_number(&p("6*")).t_d, 6);
        assert_eq!(twist_number(&p("8*p 0.q 0")).t_d, 8);
        assert_eq!(twist_number(&p("p 1 q")).conjecture1_lower, 2);
        let spec = FamilySpec::parse("p 1 q,r+").unwrap();
        let t = twist_number(&spec.template);
        for (_, s) in sweep(&spec, &[("p".into(), 0..=3), ("r".into(), 0..=2)]).unwrap() {
            assert_eq!(twist_number(&s), t);
        }
    }

    #[test]
    fn reversals() {
        assert_eq!(reversal(&p("(2,2) (2,2)"), 1).unwrap().to_string(), "(2,2) ((2,2) 0)");
        assert_eq!(reversal(&p(".(2,-2)"), 0).unwrap().to_string(), ".(2,-2) 0");
        assert_eq!(reversal(&p(".(2,-2) 0"), 0).unwrap().to_string(), ".(2,-2)");
        for s in ["(2,2) (2,2)", ".-(2,2)", "(2,2) 0 (2,-2)", "8*(2,-2).(2,2) 0"] {
            let x = p(s);
            for i in 0..reversible_count(&x) {
                let y = reversal(&reversal(&x, i).unwrap(), i).unwrap();
                assert_eq!(y.to_string(), s);
            }
        }
        assert!(matches!(reversal(&p("2 2"), 0), Err(Error::NotReversible(0))));
    }

    #[test]
    fn sweeps() {
        let spec = FamilySpec::parse("p q").unwrap().lock("p", "q").unwrap();
        let rows = sweep(&spec, &[("p".into(), 0..=22)]).unwrap();
        assert_eq!(rows.len(), 23);
        assert_eq!(rows[0].1.to_string(), "2 2");
        assert_eq!(rows[22].1.to_string(), "24 24");
        let spec = FamilySpec::parse("p q r").unwrap();
        let rows = sweep(&spec, &[("q".into(), 0..=4), ("r".into(), 0..=4)]).unwrap();
        assert_eq!(rows.len(), 25);
        assert_eq!(rows[1].1.to_string(), "2 2 3");
        #[allow(clippy::reversed_empty_ranges)]
        let empty = sweep(&spec, &[("q".into(), 1..=0)]).unwrap();
        assert!(empty.is_empty());
    }
}
