//! Problem files: one JSON document holding a space and the named maps,
//! gauges, potentials and Bellman problem that commands refer to.

use std::collections::BTreeMap;
use std::fmt;

use cfp_core::bellman::{Aggregator, AggregatorTable, BellmanProblem};
use cfp_core::gauge::{make_gauge, Formula, Gauge, GaugeKind, GaugeParams, PiecewiseLinear};
use cfp_core::metric::{FiniteMetricSpace, MultiValuedMap, PointSet, SingleValuedMap};
use serde::Deserialize;

/// A parse or validation failure, with the place in the file it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub location: String,
    pub message: String,
}

impl InputError {
    pub fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for InputError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    pub space: Option<RawSpace>,
    #[serde(default)]
    pub maps: BTreeMap<String, RawMap>,
    #[serde(default)]
    pub gauges: BTreeMap<String, RawGauge>,
    #[serde(default)]
    pub potentials: BTreeMap<String, RawPotential>,
    pub bellman: Option<RawBellman>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, untagged)]
pub enum RawSpace {
    Matrix {
        labels: Option<Vec<String>>,
        dist: Vec<Vec<f64>>,
    },
    Line {
        line: Vec<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum RawMap {
    Single(Vec<String>),
    Multi(Vec<Vec<String>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGauge {
    pub kind: GaugeKind,
    pub alpha: Option<f64>,
    pub formula: Option<Formula>,
    pub table: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum RawPotential {
    Point(Vec<f64>),
    Pair(Vec<Vec<f64>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBellman {
    pub states: Vec<String>,
    pub decisions: Vec<String>,
    pub reward: Vec<Vec<f64>>,
    pub transition: Vec<Vec<String>>,
    pub aggregator: RawAggregator,
}

#[derive(Debug, Deserialize)]
#[serde(
    deny_unknown_fields,
    tag = "form",
    content = "params",
    rename_all = "kebab-case"
)]
pub enum RawAggregator {
    Constant { c: Vec<Vec<f64>> },
    Affine { c: Vec<Vec<f64>>, beta: f64 },
    Tabulated { tables: Vec<Vec<RawTable>> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTable {
    pub points: Vec<(f64, f64)>,
    pub lipschitz: f64,
}

#[derive(Debug, Clone)]
pub enum Map {
    Single(SingleValuedMap),
    Multi(MultiValuedMap),
}

#[derive(Debug, Clone)]
pub enum Potential {
    Point(Vec<f64>),
    Pair(Vec<Vec<f64>>),
}

/// A validated problem file.
#[derive(Debug)]
pub struct Problem {
    pub space: Option<FiniteMetricSpace>,
    pub maps: BTreeMap<String, Map>,
    pub gauges: BTreeMap<String, Gauge>,
    pub potentials: BTreeMap<String, Potential>,
    pub bellman: Option<BellmanProblem>,
}

pub fn parse(text: &str) -> Result<Problem, InputError> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| {
        InputError::new(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    resolve(raw)
}

fn resolve(raw: RawProblem) -> Result<Problem, InputError> {
    let space = raw.space.map(resolve_space).transpose()?;

    let mut maps = BTreeMap::new();
    for (name, m) in raw.maps {
        let at = format!("maps.{name}");
        let space = space
            .as_ref()
            .ok_or_else(|| InputError::new(&at, "maps need a space"))?;
        maps.insert(name, resolve_map(space, m, &at)?);
    }

    let mut gauges = BTreeMap::new();
    for (name, g) in raw.gauges {
        let at = format!("gauges.{name}");
        gauges.insert(name, resolve_gauge(g, &at)?);
    }

    let mut potentials = BTreeMap::new();
    for (name, p) in raw.potentials {
        let at = format!("potentials.{name}");
        let space = space
            .as_ref()
            .ok_or_else(|| InputError::new(&at, "potentials need a space"))?;
        potentials.insert(name, resolve_potential(space, p, &at)?);
    }

    let bellman = raw.bellman.map(resolve_bellman).transpose()?;
    Ok(Problem {
        space,
        maps,
        gauges,
        potentials,
        bellman,
    })
}

fn resolve_space(raw: RawSpace) -> Result<FiniteMetricSpace, InputError> {
    let built = match raw {
        RawSpace::Matrix {
            labels: Some(l),
            dist,
        } => FiniteMetricSpace::new(l, dist),
        RawSpace::Matrix { labels: None, dist } => FiniteMetricSpace::from_matrix(dist),
        RawSpace::Line { line } => FiniteMetricSpace::on_line(&line),
    };
    built.map_err(|e| InputError::new("space", e.to_string()))
}

fn lookup(space: &FiniteMetricSpace, label: &str, at: &str) -> Result<usize, InputError> {
    space
        .index_of(label)
        .ok_or_else(|| InputError::new(at, format!("unknown point label {label:?}")))
}

fn resolve_map(space: &FiniteMetricSpace, raw: RawMap, at: &str) -> Result<Map, InputError> {
    let check_len = |len: usize| {
        if len == space.len() {
            Ok(())
        } else {
            Err(InputError::new(
                at,
                format!("{len} images for a {}-point space", space.len()),
            ))
        }
    };
    match raw {
        RawMap::Single(images) => {
            check_len(images.len())?;
            let idx = images
                .iter()
                .enumerate()
                .map(|(i, l)| lookup(space, l, &format!("{at}.single[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let map =
                SingleValuedMap::new(idx, space).map_err(|e| InputError::new(at, e.to_string()))?;
            Ok(Map::Single(map))
        }
        RawMap::Multi(images) => {
            check_len(images.len())?;
            let mut sets = Vec::with_capacity(images.len());
            for (i, labels) in images.iter().enumerate() {
                let here = format!("{at}.multi[{i}]");
                let idx = labels
                    .iter()
                    .map(|l| lookup(space, l, &here))
                    .collect::<Result<Vec<_>, _>>()?;
                sets.push(PointSet::new(idx).map_err(|e| InputError::new(&here, e.to_string()))?);
            }
            let map =
                MultiValuedMap::new(sets, space).map_err(|e| InputError::new(at, e.to_string()))?;
            Ok(Map::Multi(map))
        }
    }
}

fn resolve_gauge(raw: RawGauge, at: &str) -> Result<Gauge, InputError> {
    let params = match (raw.alpha, raw.formula, raw.table) {
        (None, None, None) => GaugeParams::None,
        (Some(a), None, None) => GaugeParams::Alpha(a),
        (None, Some(f), None) => GaugeParams::Formula(f),
        (None, None, Some(t)) => GaugeParams::Table(t),
        _ => {
            return Err(InputError::new(
                at,
                "give at most one of alpha, formula and table",
            ))
        }
    };
    make_gauge(raw.kind, params).map_err(|e| InputError::new(at, e.to_string()))
}

fn resolve_potential(
    space: &FiniteMetricSpace,
    raw: RawPotential,
    at: &str,
) -> Result<Potential, InputError> {
    let n = space.len();
    match raw {
        RawPotential::Point(v) if v.len() == n => Ok(Potential::Point(v)),
        RawPotential::Point(v) => Err(InputError::new(
            at,
            format!("{} values for a {n}-point space", v.len()),
        )),
        RawPotential::Pair(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(InputError::new(
                    at,
                    format!("pair potential must be {n} x {n}"),
                ));
            }
            Ok(Potential::Pair(rows))
        }
    }
}

fn resolve_bellman(raw: RawBellman) -> Result<BellmanProblem, InputError> {
    let index: BTreeMap<&str, usize> = raw
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut transition = Vec::with_capacity(raw.transition.len());
    for (x, row) in raw.transition.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (y, label) in row.iter().enumerate() {
            let &s = index.get(label.as_str()).ok_or_else(|| {
                InputError::new(
                    format!("bellman.transition[{x}][{y}]"),
                    format!("unknown state {label:?}"),
                )
            })?;
            out.push(s);
        }
        transition.push(out);
    }
    let aggregator = match raw.aggregator {
        RawAggregator::Constant { c } => Aggregator::Constant { c },
        RawAggregator::Affine { c, beta } => Aggregator::Affine { c, beta },
        RawAggregator::Tabulated { tables } => {
            let mut rows = Vec::with_capacity(tables.len());
            for (x, row) in tables.into_iter().enumerate() {
                let mut out = Vec::with_capacity(row.len());
                for (y, t) in row.into_iter().enumerate() {
                    let table = PiecewiseLinear::new(t.points).map_err(|e| {
                        InputError::new(
                            format!("bellman.aggregator.params.tables[{x}][{y}]"),
                            e.to_string(),
                        )
                    })?;
                    out.push(AggregatorTable {
                        table,
                        lipschitz: t.lipschitz,
                    });
                }
                rows.push(out);
            }
            Aggregator::Tabulated { tables: rows }
        }
    };
    BellmanProblem::new(
        raw.states,
        raw.decisions,
        raw.reward,
        transition,
        aggregator,
    )
    .map_err(|e| InputError::new("bellman", e.to_string()))
}
