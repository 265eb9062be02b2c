//! Lower and upper volume bounds of link families.
//!
//! The lower bound of a family is the volume of its source link, the upper
//! bound the volume of its complete augmentation. Subfamilies with a single
//! varying parameter are bounded by the link with that parameter augmented.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::conway::{Body, ConwaySymbol};
use crate::error::{Error, Result};
use crate::family::{augment_parameter, instantiate, sweep, FamilySpec, ParameterAssignment};
use crate::solver::classify;
use crate::store::{CachedVolume, Volumes};

/// Absolute tolerance of referential classification and bound grouping.
pub const CLASSIFY_TOLERANCE: f64 = 1e-6;

/// Slack allowed when comparing sampled volumes with their bounds.
pub const SANDWICH_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParameterBound {
    pub parameter: String,
    pub symbol: String,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub family: String,
    pub source_symbol: String,
    pub augmented_symbol: String,
    pub lower: f64,
    pub upper: f64,
    pub lower_expr: Option<String>,
    pub upper_expr: Option<String>,
    pub lower_hyperbolic: bool,
    /// Both endpoint solves converged.
    pub converged: bool,
    /// Upper bounds with one parameter augmented and the others at their base.
    pub per_parameter: Vec<ParameterBound>,
    pub sandwich_verified: Option<bool>,
    pub warnings: Vec<String>,
}

/// Referential expression such as `4V_1` for `v`, or `"0"` for volume 0.
pub fn expression(v: f64) -> Option<String> {
    if v == 0.0 {
        return Some("0".into());
    }
    classify(v, CLASSIFY_TOLERANCE)
}

/// Table cell: the referential expression when there is one, else the value.
pub fn cell(v: f64) -> String {
    expression(v).unwrap_or_else(|| format!("{v:.10}"))
}

fn chain_count(symbol: &ConwaySymbol) -> usize {
    crate::family::parameters(symbol).len()
}

fn scope_warning(spec: &FamilySpec) -> Option<String> {
    let chains = chain_count(&spec.template);
    let polyhedral = matches!(spec.template.body, Body::Polyhedral { .. });
    if chains >= 2 || (polyhedral && chains >= 1) {
        None
    } else {
        Some(format!(
            "{} has {} chain(s) of bigons; the bounds are stated for at least two, or one in a polyhedral link",
            spec.template, chains
        ))
    }
}

fn endpoint(volumes: &Volumes, symbol: &ConwaySymbol, warnings: &mut Vec<String>) -> Result<CachedVolume> {
    let v = volumes.volume(symbol)?;
    if !v.converged {
        warnings.push(format!("solver did not converge for {symbol} (residual {:.1e})", v.residual));
    }
    Ok(v)
}

/// Source-link lower bound, complete-augmentation upper bound and the
/// per-parameter upper bounds of `spec`.
pub fn bounds(spec: &FamilySpec, volumes: &Volumes) -> Result<BoundsReport> {
    let mut warnings: Vec<String> = scope_warning(spec).into_iter().collect();
    let source = spec.source();
    let augmented = spec.augmented();
    warnings.extend(augmented.warning.clone());
    let lo = endpoint(volumes, &source, &mut warnings)?;
    let hi = endpoint(volumes, &augmented.symbol, &mut warnings)?;
    if !lo.hyperbolic {
        warnings.push(format!("source link {source} is not hyperbolic; lower bound 0"));
    }
    let mut per_parameter = Vec::new();
    let base = ParameterAssignment(spec.parameters.iter().map(|p| (p.name.clone(), 0)).collect());
    for p in &spec.parameters {
        let mut others = base.clone();
        others.0.remove(&p.name);
        let symbol = augment_parameter(&spec.template, &p.name).and_then(|template| {
            let rest = FamilySpec {
                template,
                parameters: spec.parameters.iter().filter(|q| q.name != p.name).cloned().collect(),
            };
            instantiate(&rest, &others)
        });
        match symbol {
            Ok(symbol) => {
                let v = endpoint(volumes, &symbol, &mut warnings)?;
                per_parameter.push(ParameterBound {
                    parameter: p.name.clone(),
                    symbol: symbol.to_string(),
                    upper: v.volume,
                });
            }
            Err(Error::NotAugmentable(_, why)) => warnings.push(format!("{} not augmented: {why}", p.name)),
            Err(e) => return Err(e),
        }
    }
    Ok(BoundsReport {
        family: spec.template.to_string(),
        source_symbol: source.to_string(),
        augmented_symbol: augmented.symbol.to_string(),
        lower: lo.volume,
        upper: hi.volume,
        lower_expr: expression(lo.volume),
        upper_expr: expression(hi.volume),
        lower_hyperbolic: lo.hyperbolic,
        converged: lo.converged && hi.converged,
        per_parameter,
        sandwich_verified: None,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubfamilyBound {
    /// The one-parameter subfamily, e.g. `8*p 0.2 0`.
    pub family: String,
    pub lower_symbol: String,
    pub upper_symbol: String,
    pub lower: f64,
    pub upper: f64,
}

/// Bounds of the subfamily of `spec` in which only `varying` changes and the
/// other parameters take the offsets in `fixed`.
pub fn subfamily_bounds(
    spec: &FamilySpec,
    fixed: &ParameterAssignment,
    varying: &str,
    volumes: &Volumes,
) -> Result<SubfamilyBound> {
    spec.parameter(varying)?;
    if fixed.get(varying).is_some() {
        return Err(Error::Family(format!("{varying} is both fixed and varying")));
    }
    let sub = spec.partial(fixed)?;
    if sub.parameters.len() != 1 {
        let free: Vec<&str> = sub.parameters.iter().map(|p| p.name.as_str()).collect();
        return Err(Error::Family(format!("exactly one parameter must vary, free: {free:?}")));
    }
    let lower_symbol = instantiate(&sub, &ParameterAssignment::new().with(varying, 0))?;
    let upper_symbol = augment_parameter(&sub.template, varying)?;
    let lower = volumes.volume(&lower_symbol)?.volume;
    let upper = volumes.volume(&upper_symbol)?.volume;
    Ok(SubfamilyBound {
        family: sub.template.to_string(),
        lower_symbol: lower_symbol.to_string(),
        upper_symbol: upper_symbol.to_string(),
        lower,
        upper,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub values: BTreeMap<String, u64>,
    pub symbol: String,
    pub volume: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub verified: bool,
    pub skipped: Option<String>,
    pub lower: f64,
    pub upper: f64,
    pub samples: Vec<Sample>,
    pub counterexamples: Vec<String>,
}

/// Check `lower <= Vol <= upper` and strict growth in every varied parameter
/// over the offsets in `ranges`. Negative chains are held at their base.
pub fn verify_sandwich(
    spec: &FamilySpec,
    ranges: &[(String, RangeInclusive<u64>)],
    volumes: &Volumes,
) -> Result<SandwichReport> {
    let report = bounds(spec, volumes)?;
    let negative: Vec<String> = spec
        .template
        .leaves()
        .iter()
        .filter_map(|t| match t {
            crate::conway::Tangle::Var { name, negative: true } => Some(name.clone()),
            _ => None,
        })
        .collect();
    let ranges: Vec<(String, RangeInclusive<u64>)> = ranges
        .iter()
        .map(|(n, r)| if negative.contains(n) { (n.clone(), 0..=0) } else { (n.clone(), r.clone()) })
        .collect();
    let mut samples = Vec::new();
    for (asn, symbol) in sweep(spec, &ranges)? {
        let v = volumes.volume(&symbol)?;
        let values = asn
            .0
            .iter()
            .map(|(n, k)| Ok((n.clone(), spec.value(n, *k)?)))
            .collect::<Result<_>>()?;
        samples.push((asn, Sample {
            values,
            symbol: symbol.to_string(),
            volume: v.volume,
        }));
    }
    let mut out = SandwichReport {
        verified: false,
        skipped: None,
        lower: report.lower,
        upper: report.upper,
        samples: vec![],
        counterexamples: vec![],
    };
    if samples.iter().all(|(_, s)| s.volume == 0.0) {
        out.skipped = Some(format!("{} is not hyperbolic on the sampled range", spec.template));
        out.samples = samples.into_iter().map(|s| s.1).collect();
        return Ok(out);
    }
    let index: BTreeMap<&ParameterAssignment, f64> = samples.iter().map(|(a, s)| (a, s.volume)).collect();
    for (asn, s) in &samples {
        if s.volume < report.lower - SANDWICH_SLACK || s.volume > report.upper + SANDWICH_SLACK {
            out.counterexamples
                .push(format!("{} = {:.10} outside [{:.10}, {:.10}]", s.symbol, s.volume, report.lower, report.upper));
        }
        for (name, _) in &ranges {
            let next = asn.clone().with(name, asn.get(name).unwrap_or(0) + 1);
            if let Some(&w) = index.get(&next) {
                if w <= s.volume {
                    out.counterexamples.push(format!("{} does not grow with {name}: {:.10} then {:.10}", s.symbol, s.volume, w));
                }
            }
        }
    }
    out.verified = out.counterexamples.is_empty();
    out.samples = samples.into_iter().map(|s| s.1).collect();
    Ok(out)
}

/// One family of a bounds table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub number: usize,
    pub name: Option<String>,
    pub source: String,
    pub family: String,
    pub lower: f64,
    pub upper: f64,
    pub lower_cell: String,
    pub upper_cell: String,
    /// Rows sharing both bounds with their predecessor share the group.
    pub group: usize,
    pub warnings: Vec<String>,
}

/// Bounds table of `specs`, numbered from 1; `names` holds optional
/// classical names.
pub fn table(specs: &[(Option<String>, FamilySpec)], volumes: &Volumes) -> Result<Vec<TableRow>> {
    let mut rows: Vec<TableRow> = Vec::with_capacity(specs.len());
    for (i, (name, spec)) in specs.iter().enumerate() {
        let b = bounds(spec, volumes)?;
        let group = match rows.last() {
            Some(prev)
                if (prev.lower - b.lower).abs() <= CLASSIFY_TOLERANCE
                    && (prev.upper - b.upper).abs() <= CLASSIFY_TOLERANCE =>
            {
                prev.group
            }
            Some(prev) => prev.group + 1,
            None => 1,
        };
        rows.push(TableRow {
            number: i + 1,
            name: name.clone(),
            source: b.source_symbol,
            family: b.family,
            lower: b.lower,
            upper: b.upper,
            lower_cell: cell(b.lower),
            upper_cell: cell(b.upper),
            group,
            warnings: b.warnings,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolverOptions;

    #[test]
    fn family_bounds() {
        let opts = SolverOptions::default();
        let volumes = Volumes::new(&opts, None);
        let b = bounds(&FamilySpec::parse("p q").unwrap(), &volumes).unwrap();
        assert!((b.lower - 2.0298832128).abs() < 1e-6);
        assert!((b.upper - 7.327724753).abs() < 1e-6);
        assert_eq!(b.lower_expr.as_deref(), Some("2V_0"));
        assert_eq!(b.upper_expr.as_deref(), Some("2V_1"));
        assert_eq!(b.per_parameter.len(), 2);
        let b = bounds(&FamilySpec::parse("p,q,-r").unwrap(), &volumes).unwrap();
        assert_eq!(b.lower, 0.0);
        assert!(!b.lower_hyperbolic);
        assert_eq!(b.upper_expr.as_deref(), Some("4V_1"));
    }

    #[test]
    fn subfamilies() {
        let opts = SolverOptions::default();
        let volumes = Volumes::new(&opts, None);
        let spec = FamilySpec::parse("8*p 0.q 0").unwrap();
        let f2 = subfamily_bounds(&spec, &ParameterAssignment::new().with("q", 0), "p", &volumes).unwrap();
        assert_eq!(f2.family, "8*p 0.2 0");
        assert!((f2.lower - 16.6380380564).abs() < 1e-6);
        assert!((f2.upper - 19.29865114).abs() < 1e-6);
        let spec = FamilySpec::parse("8*p 0.-q 0").unwrap();
        let f2 = subfamily_bounds(&spec, &ParameterAssignment::new().with("q", 0), "p", &volumes).unwrap();
        assert!((f2.lower - 13.2900030686).abs() < 1e-6);
        assert!((f2.upper - 16.69568447).abs() < 1e-6);
        assert!(subfamily_bounds(&spec, &ParameterAssignment::new(), "p", &volumes).is_err());
    }

    #[test]
    fn grouping() {
        let opts = SolverOptions::default();
        let volumes = Volumes::new(&opts, None);
        let specs: Vec<(Option<String>, FamilySpec)> = ["p q r", "p,q,r", "p q"]
            .iter()
            .map(|s| (None, FamilySpec::parse(s).unwrap()))
            .collect();
        let rows = table(&specs, &volumes).unwrap();
        assert_eq!(rows.iter().map(|r| r.group).collect::<Vec<_>>(), vec![1, 1, 2]);
        assert!(table(&[], &volumes).unwrap().is_empty());
    }
}
