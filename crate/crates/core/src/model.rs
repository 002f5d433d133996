//! JSON model files.
//!
//! ```json
//! { "model": "pair",
//!   "bisections": [
//!     { "id": "E01", "tau": { "kind": "flat", "i": 0, "j": 1 } },
//!     { "id": "T1", "tau": { "kind": "affine", "slope": 1, "offset": "1/2" },
//!       "domain": [[-5, 5]] } ],
//!   "algebroid": { "chart": { "name": "R", "vars": ["t"] }, "rank": 1,
//!                  "anchor": [["1"]], "bracket": {} } }
//! ```
//!
//! Heisenberg bisections are group elements `{ "id": "k", "element": [a, b, c] }`.
//! Domains are lists of open intervals with `null` for an infinite end.
//! Bracket keys `"i,j"` use 0-based frame indices; a missing `"j,i"` entry
//! is filled in by antisymmetry.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::coeffs::{Chart, Interval, Region};
use crate::error::{Error, Result};
use crate::groupoid::{Bisection, GroupoidModel, ModelKind, Registry};
use crate::lie_rinehart::LieRinehart;
use crate::number::Q;
use crate::parse::{parse_coeff, parse_rational};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    fn value(&self) -> Result<Q> {
        match self {
            Num::Int(n) => Ok(Q::from_integer((*n).into())),
            Num::Text(s) => parse_rational(s).map_err(|e| Error::Model(format!("bad rational `{s}`: {e}"))),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum TauSpec {
    Flat { i: u32, j: u32 },
    Affine { slope: Num, offset: Num },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BisectionSpec {
    id: String,
    tau: Option<TauSpec>,
    element: Option<Vec<Num>>,
    domain: Option<Vec<(Option<Num>, Option<Num>)>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartSpec {
    name: String,
    vars: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebroidSpec {
    #[serde(default)]
    name: Option<String>,
    chart: ChartSpec,
    rank: usize,
    #[serde(default)]
    basis: Option<Vec<String>>,
    anchor: Vec<Vec<String>>,
    #[serde(default)]
    bracket: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    model: Option<String>,
    bisections: Option<Vec<BisectionSpec>>,
    algebroid: Option<AlgebroidSpec>,
}

/// A parsed model file. Registries are rebuilt on demand so that every
/// consumer starts from the declared bisections only.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub kind: Option<ModelKind>,
    bisections: Option<Vec<BisectionSpec>>,
    pub algebroid: Option<Arc<LieRinehart>>,
}

pub fn parse_kind(s: &str) -> Result<ModelKind> {
    match s {
        "pair" => Ok(ModelKind::Pair),
        "heisenberg" => Ok(ModelKind::Heisenberg),
        "etale" => Ok(ModelKind::Etale),
        _ => Err(Error::Model(format!("unknown model `{s}`"))),
    }
}

fn region(spec: &Option<Vec<(Option<Num>, Option<Num>)>>) -> Result<Region> {
    let Some(ivs) = spec else { return Ok(Region::whole(1)) };
    let mut out = Vec::new();
    for (lo, hi) in ivs {
        let lo = lo.as_ref().map(Num::value).transpose()?;
        let hi = hi.as_ref().map(Num::value).transpose()?;
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a >= b {
                return Err(Error::Model(format!("empty interval ({a}, {b})")));
            }
        }
        out.push(Interval::new(lo, hi));
    }
    Ok(Region::from_intervals(out))
}

fn bisection(kind: ModelKind, b: &BisectionSpec) -> Result<Bisection> {
    let bad = |msg: &str| Error::Model(format!("bisection {}: {msg}", b.id));
    if b.id.is_empty() || b.id.contains(['<', '>', '|', ',', '[', ']', '·']) || b.id.ends_with("^-1") {
        return Err(bad("ids must be plain names"));
    }
    match (kind, &b.tau, &b.element) {
        (ModelKind::Heisenberg, None, Some(k)) => {
            if b.domain.is_some() {
                return Err(bad("group elements have no domain"));
            }
            let k: Vec<Q> = k.iter().map(Num::value).collect::<Result<_>>()?;
            let k: [Q; 3] = k.try_into().map_err(|_| bad("elements have three coordinates"))?;
            Ok(Bisection::group_element(&b.id, k))
        }
        (ModelKind::Pair, Some(TauSpec::Flat { i, j }), None) => {
            if *i > 4 || *j > 4 || b.domain.is_some() {
                return Err(bad("flat graphs take i, j in 0..=4 and no domain"));
            }
            Bisection::pair_kinked(&b.id, *i, *j)
        }
        (ModelKind::Pair, Some(TauSpec::Affine { slope, offset }), None) => {
            Bisection::pair_affine(&b.id, nonzero(slope.value()?, &bad)?, offset.value()?, region(&b.domain)?)
        }
        (ModelKind::Etale, Some(TauSpec::Affine { slope, offset }), None) => {
            Bisection::etale_sheet(&b.id, nonzero(slope.value()?, &bad)?, offset.value()?, region(&b.domain)?)
        }
        _ => Err(bad(&format!("not a bisection of the {kind} model"))),
    }
}

fn nonzero(q: Q, bad: &dyn Fn(&str) -> Error) -> Result<Q> {
    if q == Q::from_integer(0.into()) {
        Err(bad("slope must be nonzero"))
    } else {
        Ok(q)
    }
}

fn algebroid(a: &AlgebroidSpec) -> Result<LieRinehart> {
    let bad = |msg: String| Error::Model(format!("algebroid: {msg}"));
    let basis: Vec<String> = match &a.basis {
        Some(b) if b.len() == a.rank => b.clone(),
        Some(_) => return Err(bad("basis length differs from rank".into())),
        None => (1..=a.rank).map(|i| format!("X{i}")).collect(),
    };
    let vars: Vec<&str> = a.chart.vars.iter().map(String::as_str).collect();
    let basis_refs: Vec<&str> = basis.iter().map(String::as_str).collect();
    let name = a.name.clone().unwrap_or_else(|| "algebroid".into());
    let mut lr = LieRinehart::new(&name, Chart::new(&a.chart.name, &vars), &basis_refs);
    let coeffs = |row: &[String]| -> Result<Vec<crate::coeffs::CoeffFn>> {
        row.iter().map(|s| parse_coeff(s, &a.chart.vars).map_err(|e| bad(format!("`{s}`: {e}")))).collect()
    };
    if a.anchor.len() != a.rank {
        return Err(bad(format!("anchor has {} rows, rank is {}", a.anchor.len(), a.rank)));
    }
    for (i, row) in a.anchor.iter().enumerate() {
        if row.len() != vars.len() {
            return Err(bad(format!("anchor row {i} has {} entries", row.len())));
        }
        lr.anchor[i] = coeffs(row)?;
    }
    let mut given = BTreeMap::new();
    for (key, row) in &a.bracket {
        let ij: Vec<usize> = key
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad(format!("bracket key `{key}`")))?;
        let [i, j] = ij[..] else { return Err(bad(format!("bracket key `{key}`"))) };
        if i >= a.rank || j >= a.rank || row.len() != a.rank {
            return Err(bad(format!("bracket entry `{key}`")));
        }
        given.insert((i, j), coeffs(row)?);
    }
    for ((i, j), v) in &given {
        lr.bracket[*i][*j] = v.clone();
        if !given.contains_key(&(*j, *i)) {
            lr.bracket[*j][*i] = v.iter().map(|c| -c).collect();
        }
    }
    Ok(lr)
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<ModelSpec> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        let kind = file.model.as_deref().map(parse_kind).transpose()?;
        if kind.is_none() && file.bisections.is_some() {
            return Err(Error::Model("bisections need a `model`".into()));
        }
        if kind.is_none() && file.algebroid.is_none() {
            return Err(Error::Model("nothing to load: expected `model` or `algebroid`".into()));
        }
        let algebroid = file.algebroid.as_ref().map(algebroid).transpose()?.map(Arc::new);
        let spec = ModelSpec {
            kind,
            bisections: file.bisections,
            algebroid,
        };
        spec.registry()?;
        Ok(spec)
    }

    /// A fresh registry holding the declared bisections, or the standard
    /// family when none are declared.
    pub fn registry(&self) -> Result<Option<Arc<Registry>>> {
        let Some(kind) = self.kind else { return Ok(None) };
        let reg = match &self.bisections {
            None => Registry::standard(kind),
            Some(list) => {
                let reg = Registry::new(GroupoidModel::of_kind(kind));
                for b in list {
                    if reg.get(&b.id).is_ok() {
                        return Err(Error::Model(format!("duplicate bisection id {}", b.id)));
                    }
                    reg.insert(bisection(kind, b)?)?;
                }
                reg
            }
        };
        Ok(Some(Arc::new(reg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_file() {
        let spec = ModelSpec::from_json(
            r#"{ "model": "pair", "bisections": [
                 { "id": "E01", "tau": { "kind": "flat", "i": 0, "j": 1 } },
                 { "id": "T", "tau": { "kind": "affine", "slope": "1/2", "offset": -1 }, "domain": [[null, 3]] } ] }"#,
        )
        .unwrap();
        let reg = spec.registry().unwrap().unwrap();
        assert_eq!(reg.declared().len(), 3);
        assert!(reg.get("E01").is_ok());
    }

    #[test]
    fn algebroid_file() {
        let spec = ModelSpec::from_json(
            r#"{ "algebroid": { "chart": { "name": "pt", "vars": [] }, "rank": 3,
                 "basis": ["X", "Y", "Z"], "anchor": [[], [], []], "bracket": { "0,1": ["0", "0", "1"] } } }"#,
        )
        .unwrap();
        assert_eq!(**spec.algebroid.as_ref().unwrap(), LieRinehart { name: "algebroid".into(), ..LieRinehart::heisenberg() });
        assert!(spec.registry().unwrap().is_none());
    }

    #[test]
    fn malformed_files() {
        for text in [
            "{",
            r#"{ "model": "torus" }"#,
            r#"{ "model": "etale", "bisections": [ { "id": "E", "tau": { "kind": "flat", "i": 0, "j": 0 } } ] }"#,
            r#"{ "model": "pair", "bisections": [ { "id": "A", "tau": { "kind": "affine", "slope": 0, "offset": 0 } } ] }"#,
            r#"{ "model": "pair", "extra": 1 }"#,
            r#"{ "algebroid": { "chart": { "name": "R", "vars": ["t"] }, "rank": 1, "anchor": [["s"]] } }"#,
        ] {
            assert!(matches!(ModelSpec::from_json(text), Err(Error::Model(_))), "{text}");
        }
    }
}
