//! Gauge (comparison) functions, their class properties and the reductions
//! between contraction classes.
//!
//! A [`Gauge`] pairs a declared class ([`GaugeKind`]) with an evaluable
//! function. Class membership is never assumed: it is certified on a finite
//! grid by [`check_gauge_properties`], and every reduction that relies on it
//! re-checks the grid it is given.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::FiniteMetricSpace;

/// Relative slack for ratio monotonicity, which compares quotients of
/// evaluated values.
pub const MONOTONE_TOL: f64 = 1e-12;
/// Slack for the sampled lower-semicontinuity probe.
pub const LSC_TOL: f64 = 1e-9;
/// Number of log-spaced points added to the default evaluation grid.
pub const LOG_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeKind {
    /// `t -> alpha * t`, `0 <= alpha < 1`.
    Banach,
    /// `eta(t) < t` and `eta(t)/t` non-decreasing.
    EtaContraction,
    /// `theta(t) > 0` and `theta(t)/t` non-increasing.
    WeakTheta,
    /// Values in `[0, 1)`, non-decreasing.
    MizoguchiTakahashi,
    /// `t^2/2` below 1, `t/2` from 1 on.
    RhoSection3,
    /// Sampled table, no class beyond nonnegativity.
    Tabulated,
}

impl GaugeKind {
    pub fn name(self) -> &'static str {
        match self {
            GaugeKind::Banach => "banach",
            GaugeKind::EtaContraction => "eta-contraction",
            GaugeKind::WeakTheta => "weak-theta",
            GaugeKind::MizoguchiTakahashi => "mizoguchi-takahashi",
            GaugeKind::RhoSection3 => "rho-section3",
            GaugeKind::Tabulated => "tabulated",
        }
    }

    /// Kinds whose values bound post-map distances directly (`d(Tx,Ty) <= g(d)`).
    pub fn is_eta_like(self) -> bool {
        matches!(
            self,
            GaugeKind::Banach
                | GaugeKind::EtaContraction
                | GaugeKind::RhoSection3
                | GaugeKind::Tabulated
        )
    }
}

impl fmt::Display for GaugeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Closed-form building blocks accepted in problem files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// `slope * t`
    Linear { slope: f64 },
    /// `value`
    Constant { value: f64 },
    /// `coeff * t^exponent`
    Power { coeff: f64, exponent: f64 },
    /// `scale * t / (1 + t)`
    Saturating { scale: f64 },
    /// `slope * min(t, cap)`
    Capped { slope: f64, cap: f64 },
}

impl Formula {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Formula::Linear { slope } => slope * t,
            Formula::Constant { value } => value,
            Formula::Power { coeff, exponent } => coeff * t.powf(exponent),
            Formula::Saturating { scale } => scale * t / (1.0 + t),
            Formula::Capped { slope, cap } => slope * t.min(cap),
        }
    }

    fn validate(&self) -> Result<()> {
        let params: &[f64] = match self {
            Formula::Linear { slope } => &[*slope],
            Formula::Constant { value } => &[*value],
            Formula::Power { coeff, exponent } => &[*coeff, *exponent],
            Formula::Saturating { scale } => &[*scale],
            Formula::Capped { slope, cap } => &[*slope, *cap],
        };
        if params.iter().all(|p| p.is_finite()) {
            Ok(())
        } else {
            invalid(format!("non-finite formula parameter in {self:?}"))
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Linear { slope } => write!(f, "{slope}*t"),
            Formula::Constant { value } => write!(f, "{value}"),
            Formula::Power { coeff, exponent } => write!(f, "{coeff}*t^{exponent}"),
            Formula::Saturating { scale } => write!(f, "{scale}*t/(1+t)"),
            Formula::Capped { slope, cap } => write!(f, "{slope}*min(t,{cap})"),
        }
    }
}

/// Piecewise-linear interpolant through strictly increasing abscissae.
///
/// Outside the sampled range the nearest segment is extended linearly; a
/// single sample gives a constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return invalid("table has no samples");
        }
        if let Some((i, _)) = points
            .iter()
            .enumerate()
            .find(|(_, (t, v))| !t.is_finite() || !v.is_finite())
        {
            return invalid(format!("non-finite table entry at row {i}"));
        }
        if let Some(i) = points.windows(2).position(|w| w[1].0 <= w[0].0) {
            return invalid(format!(
                "table abscissae not strictly increasing at row {}",
                i + 1
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, t: f64) -> f64 {
        let p = &self.points;
        if p.len() == 1 {
            return p[0].1;
        }
        // index of the segment [p[i], p[i+1]] used for t
        let i = match p.partition_point(|&(x, _)| x <= t) {
            0 => 0,
            k if k >= p.len() => p.len() - 2,
            k => k - 1,
        };
        let (t0, v0) = p[i];
        let (t1, v1) = p[i + 1];
        if t == t0 {
            return v0;
        }
        if t == t1 {
            return v1;
        }
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Largest absolute segment slope (0 for a single sample).
    pub fn lipschitz(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max)
    }
}

/// The evaluable part of a gauge.
#[derive(Clone)]
pub enum GaugeFn {
    Formula(Formula),
    Rho,
    Table(PiecewiseLinear),
    /// `(g(t) + t) / 2`
    Midpoint(Box<GaugeFn>),
    /// `t - g(t)`
    Complement(Box<GaugeFn>),
    /// `g(t) * t`
    TimesIdentity(Box<GaugeFn>),
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl GaugeFn {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            GaugeFn::Formula(f) => f.eval(t),
            GaugeFn::Rho => rho(t),
            GaugeFn::Table(table) => table.eval(t).max(0.0),
            GaugeFn::Midpoint(g) => (g.eval(t) + t) / 2.0,
            GaugeFn::Complement(g) => t - g.eval(t),
            GaugeFn::TimesIdentity(g) => g.eval(t) * t,
            GaugeFn::Custom { f, .. } => f(t),
        }
    }
}

impl fmt::Debug for GaugeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GaugeFn({self})")
    }
}

impl fmt::Display for GaugeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaugeFn::Formula(x) => write!(f, "{x}"),
            GaugeFn::Rho => f.write_str("rho(t)"),
            GaugeFn::Table(t) => write!(f, "table[{} samples]", t.points.len()),
            GaugeFn::Midpoint(g) => write!(f, "(({g}) + t)/2"),
            GaugeFn::Complement(g) => write!(f, "t - ({g})"),
            GaugeFn::TimesIdentity(g) => write!(f, "({g})*t"),
            GaugeFn::Custom { name, .. } => f.write_str(name),
        }
    }
}

/// Piecewise gauge used by the Bellman contraction condition.
pub fn rho(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t < 1.0 {
        0.5 * t * t
    } else {
        0.5 * t
    }
}

/// Parameters accepted by [`make_gauge`].
#[derive(Debug, Clone)]
pub enum GaugeParams {
    None,
    Alpha(f64),
    Formula(Formula),
    Table(Vec<(f64, f64)>),
}

/// A comparison function together with its declared class.
#[derive(Debug, Clone)]
pub struct Gauge {
    kind: GaugeKind,
    f: GaugeFn,
}

impl Gauge {
    pub fn banach(alpha: f64) -> Result<Self> {
        make_gauge(GaugeKind::Banach, GaugeParams::Alpha(alpha))
    }

    pub fn rho_section3() -> Self {
        Self {
            kind: GaugeKind::RhoSection3,
            f: GaugeFn::Rho,
        }
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        make_gauge(GaugeKind::Tabulated, GaugeParams::Table(points))
    }

    pub fn with_formula(kind: GaugeKind, formula: Formula) -> Result<Self> {
        make_gauge(kind, GaugeParams::Formula(formula))
    }

    /// Wraps an arbitrary function. The class is only as good as the
    /// certificate later issued for it.
    pub fn from_fn(
        kind: GaugeKind,
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            kind,
            f: GaugeFn::Custom {
                name: name.into(),
                f: Arc::new(f),
            },
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.f.eval(t)
    }

    pub fn kind(&self) -> GaugeKind {
        self.kind
    }

    pub fn function(&self) -> &GaugeFn {
        &self.f
    }

    /// The Banach constant, for `banach` gauges only.
    pub fn alpha(&self) -> Option<f64> {
        match (self.kind, &self.f) {
            (GaugeKind::Banach, GaugeFn::Formula(Formula::Linear { slope })) => Some(*slope),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        format!("{}: {}", self.kind, self.f)
    }
}

fn validate_gauge_table(points: Vec<(f64, f64)>) -> Result<PiecewiseLinear> {
    if let Some(i) = points.iter().position(|&(t, v)| t < 0.0 || v < 0.0) {
        return invalid(format!("negative gauge table entry at row {i}"));
    }
    PiecewiseLinear::new(points)
}

/// Builds a gauge of the given kind, validating its parameters.
pub fn make_gauge(kind: GaugeKind, params: GaugeParams) -> Result<Gauge> {
    let f = match (kind, params) {
        (GaugeKind::Banach, GaugeParams::Alpha(alpha)) => {
            if !(0.0..1.0).contains(&alpha) {
                return invalid(format!("banach constant must lie in [0, 1), got {alpha}"));
            }
            GaugeFn::Formula(Formula::Linear { slope: alpha })
        }
        (GaugeKind::Banach, p) => {
            return invalid(format!("banach gauge needs an alpha parameter, got {p:?}"))
        }
        (GaugeKind::RhoSection3, GaugeParams::None) => GaugeFn::Rho,
        (GaugeKind::RhoSection3, p) => {
            return invalid(format!("rho-section3 takes no parameters, got {p:?}"))
        }
        (GaugeKind::Tabulated, GaugeParams::Table(points)) => {
            GaugeFn::Table(validate_gauge_table(points)?)
        }
        (GaugeKind::Tabulated, p) => {
            return invalid(format!("tabulated gauge needs a sample table, got {p:?}"))
        }
        (_, GaugeParams::Table(points)) => GaugeFn::Table(validate_gauge_table(points)?),
        (_, GaugeParams::Formula(formula)) => {
            formula.validate()?;
            GaugeFn::Formula(formula)
        }
        (kind, GaugeParams::Alpha(a)) => {
            // shorthand for a linear gauge of another class
            if !a.is_finite() {
                return invalid(format!("non-finite parameter {a}"));
            }
            let formula = if kind == GaugeKind::MizoguchiTakahashi {
                Formula::Constant { value: a }
            } else {
                Formula::Linear { slope: a }
            };
            GaugeFn::Formula(formula)
        }
        (kind, GaugeParams::None) => {
            return invalid(format!("{kind} gauge needs a formula or table"))
        }
    };
    Ok(Gauge { kind, f })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// finite and `>= 0`
    Nonnegative,
    /// finite and `> 0`
    Positive,
    /// `g(t) < t`
    BelowIdentity,
    /// `g(t) < 1`
    BelowOne,
    RatioNonDecreasing,
    RatioNonIncreasing,
    NonDecreasing,
    LowerSemicontinuous,
    /// `g(t) <= t`
    AtMostIdentity,
    /// `g(0) = 0`
    ZeroAtOrigin,
    RightUpperSemicontinuous,
    /// a window above each distance `s` on which `g <= s`
    LWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeWitness {
    pub t: f64,
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub property: Property,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<GaugeWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeReport {
    pub class: String,
    pub grid_points: usize,
    pub checks: Vec<PropertyCheck>,
}

impl GaugeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn check(&self, property: Property) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.property == property)
    }
}

/// Properties certified for each class.
pub fn class_properties(class: GaugeKind) -> &'static [Property] {
    use Property::*;
    match class {
        GaugeKind::Banach | GaugeKind::EtaContraction | GaugeKind::RhoSection3 => &[
            Nonnegative,
            BelowIdentity,
            RatioNonDecreasing,
            LowerSemicontinuous,
        ],
        GaugeKind::WeakTheta => &[Positive, RatioNonIncreasing, LowerSemicontinuous],
        GaugeKind::MizoguchiTakahashi => &[Nonnegative, BelowOne, NonDecreasing],
        GaugeKind::Tabulated => &[Nonnegative, LowerSemicontinuous],
    }
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return invalid("evaluation grid is empty");
    }
    if let Some(&t) = grid.iter().find(|t| !t.is_finite() || **t <= 0.0) {
        return invalid(format!("grid point {t} is not a positive finite real"));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return invalid(format!(
            "grid not strictly increasing at position {}",
            i + 1
        ));
    }
    Ok(())
}

/// Checks the declared class of `gauge` on `grid`.
pub fn check_gauge_properties(gauge: &Gauge, grid: &[f64]) -> Result<GaugeReport> {
    check_class(gauge, gauge.kind(), grid)
}

/// Checks the properties of `class` for `gauge`, whatever its declared kind.
pub fn check_class(gauge: &Gauge, class: GaugeKind, grid: &[f64]) -> Result<GaugeReport> {
    check_properties(gauge, class.name(), class_properties(class), grid)
}

/// Checks an explicit property list. [`Property::LWindow`] needs the
/// distance set and is evaluated by the certifier instead; it is skipped here.
pub fn check_properties(
    gauge: &Gauge,
    label: &str,
    properties: &[Property],
    grid: &[f64],
) -> Result<GaugeReport> {
    validate_grid(grid)?;
    let values: Vec<f64> = grid.iter().map(|&t| gauge.eval(t)).collect();
    let checks = properties
        .iter()
        .filter(|&&p| p != Property::LWindow)
        .map(|&p| check_property(gauge, p, grid, &values))
        .collect();
    Ok(GaugeReport {
        class: label.to_string(),
        grid_points: grid.len(),
        checks,
    })
}

fn pointwise(
    grid: &[f64],
    values: &[f64],
    ok: impl Fn(f64, f64) -> bool,
    detail: &str,
) -> Option<GaugeWitness> {
    grid.iter()
        .zip(values)
        .find(|(&t, &v)| !ok(t, v))
        .map(|(&t, &v)| GaugeWitness {
            t,
            value: v,
            detail: detail.to_string(),
        })
}

fn monotone(grid: &[f64], seq: &[f64], increasing: bool, what: &str) -> Option<GaugeWitness> {
    for i in 1..seq.len() {
        let (prev, cur) = (seq[i - 1], seq[i]);
        let slack = MONOTONE_TOL * prev.abs().max(1.0);
        let ok = if increasing {
            cur >= prev - slack
        } else {
            cur <= prev + slack
        };
        if !ok || cur.is_nan() {
            return Some(GaugeWitness {
                t: grid[i],
                value: cur,
                detail: format!("{what} was {prev} at t = {}", grid[i - 1]),
            });
        }
    }
    None
}

fn lsc_probe(gauge: &Gauge, grid: &[f64], values: &[f64]) -> Option<GaugeWitness> {
    for (&t, &v) in grid.iter().zip(values) {
        let h = (t * 1e-12).max(f64::MIN_POSITIVE);
        let left = gauge.eval((t - h).max(0.0));
        let right = gauge.eval(t + h);
        let nearby = left.min(right);
        if !(v <= nearby + LSC_TOL * v.abs().max(1.0)) {
            return Some(GaugeWitness {
                t,
                value: v,
                detail: format!("value exceeds nearby value {nearby}"),
            });
        }
    }
    None
}

fn right_usc_probe(gauge: &Gauge, grid: &[f64], values: &[f64]) -> Option<GaugeWitness> {
    for (&t, &v) in grid.iter().zip(values) {
        let right = gauge.eval(t + (t * 1e-12).max(f64::MIN_POSITIVE));
        if !(right <= v + LSC_TOL * v.abs().max(1.0)) {
            return Some(GaugeWitness {
                t,
                value: v,
                detail: format!("right neighbour jumps up to {right}"),
            });
        }
    }
    None
}

fn check_property(gauge: &Gauge, p: Property, grid: &[f64], values: &[f64]) -> PropertyCheck {
    let witness = match p {
        Property::Nonnegative => pointwise(
            grid,
            values,
            |_, v| v >= 0.0 && v.is_finite(),
            "negative or non-finite",
        ),
        Property::Positive => pointwise(
            grid,
            values,
            |_, v| v > 0.0 && v.is_finite(),
            "not strictly positive",
        ),
        Property::BelowIdentity => pointwise(grid, values, |t, v| v < t, "value not below t"),
        Property::BelowOne => pointwise(grid, values, |_, v| v < 1.0, "value not below 1"),
        Property::RatioNonDecreasing | Property::RatioNonIncreasing => {
            let ratios: Vec<f64> = grid.iter().zip(values).map(|(t, v)| v / t).collect();
            monotone(
                grid,
                &ratios,
                p == Property::RatioNonDecreasing,
                "ratio g(t)/t",
            )
        }
        Property::NonDecreasing => monotone(grid, values, true, "value"),
        Property::LowerSemicontinuous => lsc_probe(gauge, grid, values),
        Property::AtMostIdentity => pointwise(grid, values, |t, v| v <= t, "value exceeds t"),
        Property::ZeroAtOrigin => {
            let v = gauge.eval(0.0);
            (v != 0.0).then(|| GaugeWitness {
                t: 0.0,
                value: v,
                detail: "value at the origin is not 0".into(),
            })
        }
        Property::RightUpperSemicontinuous => right_usc_probe(gauge, grid, values),
        Property::LWindow => None,
    };
    PropertyCheck {
        property: p,
        passed: witness.is_none(),
        witness,
    }
}

fn precondition_from(report: &GaugeReport, role: &str) -> Error {
    let failure = report.first_failure().expect("called on failing report");
    let at = failure
        .witness
        .as_ref()
        .map(|w| format!(" at t = {} ({})", w.t, w.detail))
        .unwrap_or_default();
    Error::Precondition(format!(
        "{role} is not certified {}: {:?} fails{at}",
        report.class, failure.property
    ))
}

/// `theta(t) = (eta(t) + t) / 2`, strictly between `eta` and the identity
/// wherever `eta(t) < t`.
pub fn midpoint_gauge(eta: &Gauge) -> Gauge {
    Gauge {
        kind: GaugeKind::EtaContraction,
        f: GaugeFn::Midpoint(Box::new(eta.f.clone())),
    }
}

/// [`midpoint_gauge`] after certifying `eta` as an eta-contraction on `grid`.
pub fn midpoint_gauge_checked(eta: &Gauge, grid: &[f64]) -> Result<Gauge> {
    let report = check_class(eta, GaugeKind::EtaContraction, grid)?;
    if !report.passed() {
        return Err(precondition_from(&report, "eta"));
    }
    Ok(midpoint_gauge(eta))
}

/// `t - g(t)` as a weak-theta gauge; turns a Rhoades-type gauge into the
/// weak-contraction gauge it subtracts (and back, via [`weak_to_gauge`]).
pub fn complement_gauge(g: &Gauge) -> Gauge {
    Gauge {
        kind: GaugeKind::WeakTheta,
        f: GaugeFn::Complement(Box::new(g.f.clone())),
    }
}

/// Reduces a weak contraction `d(Tx,Ty) <= d - theta(d)` to an
/// eta-contraction with `eta(t) = t - theta(t)`.
pub fn weak_to_gauge(theta: &Gauge, grid: &[f64]) -> Result<Gauge> {
    validate_grid(grid)?;
    if let Some(&t) = grid.iter().find(|&&t| theta.eval(t) > t) {
        return Err(Error::Reduction {
            t,
            reason: format!(
                "theta({t}) = {} exceeds t, so t - theta(t) is negative",
                theta.eval(t)
            ),
        });
    }
    let report = check_class(theta, GaugeKind::WeakTheta, grid)?;
    if !report.passed() {
        return Err(precondition_from(&report, "theta"));
    }
    Ok(Gauge {
        kind: GaugeKind::EtaContraction,
        f: GaugeFn::Complement(Box::new(theta.f.clone())),
    })
}

/// Reduces a Mizoguchi-Takahashi gauge to `theta(t) = eta(t) * t`.
pub fn mt_to_gauge(eta_mt: &Gauge, grid: &[f64]) -> Result<Gauge> {
    validate_grid(grid)?;
    if let Some(&t) = grid.iter().find(|&&t| !(eta_mt.eval(t) < 1.0)) {
        return invalid(format!(
            "mizoguchi-takahashi gauge reaches {} >= 1 at t = {t}",
            eta_mt.eval(t)
        ));
    }
    let report = check_class(eta_mt, GaugeKind::MizoguchiTakahashi, grid)?;
    if !report.passed() {
        return Err(precondition_from(&report, "eta_mt"));
    }
    Ok(Gauge {
        kind: GaugeKind::EtaContraction,
        f: GaugeFn::TimesIdentity(Box::new(eta_mt.f.clone())),
    })
}

/// `Phi(d) = d / (1 - theta(d)/d)`, with `Phi(0) = 0`.
pub fn caristi_potential(theta: &Gauge, d: f64) -> Result<f64> {
    if !(d >= 0.0) || !d.is_finite() {
        return invalid(format!(
            "distance must be a finite nonnegative real, got {d}"
        ));
    }
    if d == 0.0 {
        return Ok(0.0);
    }
    let value = theta.eval(d);
    if !(value < d) {
        return Err(Error::PotentialUndefined { distance: d, value });
    }
    Ok(d / (1.0 - value / d))
}

/// All distinct positive distances of `space` merged with a log-spaced grid
/// of [`LOG_GRID_POINTS`] points spanning them.
pub fn default_grid(space: &FiniteMetricSpace) -> Vec<f64> {
    grid_spanning(&space.distinct_distances())
}

/// The default grid built from an explicit list of distances.
pub fn grid_spanning(distances: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = distances
        .iter()
        .copied()
        .filter(|d| *d > 0.0 && d.is_finite())
        .collect();
    if grid.is_empty() {
        return grid;
    }
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(0.0, f64::max);
    if hi > lo {
        let (a, b) = (lo.ln(), hi.ln());
        let last = (LOG_GRID_POINTS - 1) as f64;
        grid.extend((0..LOG_GRID_POINTS).map(|i| (a + (b - a) * i as f64 / last).exp()));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(Gauge::banach(0.5).unwrap().eval(3.0), 1.5);
        let r = Gauge::rho_section3();
        assert_eq!(r.eval(0.5), 0.125);
        assert_eq!(r.eval(1.0), 0.5);
        assert_eq!(r.eval(4.0), 2.0);
        assert_eq!(r.eval(0.0), 0.0);
        let tab = Gauge::tabulated(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)]).unwrap();
        assert_eq!(tab.eval(1.5), 0.75);
        assert_eq!(tab.eval(1.0), 0.5);
    }

    #[test]
    fn make_gauge_rejects_bad_params() {
        assert!(Gauge::banach(1.0).is_err());
        assert!(Gauge::banach(-0.1).is_err());
        assert!(Gauge::tabulated(vec![(1.0, 0.0), (0.5, 0.1)]).is_err());
        assert!(Gauge::tabulated(vec![(0.0, -1.0)]).is_err());
        assert!(make_gauge(GaugeKind::RhoSection3, GaugeParams::Alpha(0.3)).is_err());
        assert!(make_gauge(GaugeKind::EtaContraction, GaugeParams::None).is_err());
    }

    #[test]
    fn table_extrapolates_linearly() {
        let t = PiecewiseLinear::new(vec![(1.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(t.eval(3.0), 5.0);
        assert_eq!(t.eval(0.0), -1.0);
        assert_eq!(t.lipschitz(), 2.0);
        let single = PiecewiseLinear::new(vec![(1.0, 4.0)]).unwrap();
        assert_eq!(single.eval(100.0), 4.0);
    }

    #[test]
    fn banach_passes_eta_properties() {
        let g = Gauge::banach(0.9).unwrap();
        let r = check_gauge_properties(&g, &grid(0.1, 10.0, 100)).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn identity_is_not_strict() {
        let g = Gauge::from_fn(GaugeKind::EtaContraction, "t", |t| t);
        let r = check_gauge_properties(&g, &[0.5, 1.0]).unwrap();
        let c = r.check(Property::BelowIdentity).unwrap();
        assert!(!c.passed);
        assert_eq!(c.witness.as_ref().unwrap().t, 0.5);
    }

    #[test]
    fn sqrt_fails_below_identity_at_quarter() {
        let g = Gauge::with_formula(
            GaugeKind::EtaContraction,
            Formula::Power {
                coeff: 1.0,
                exponent: 0.5,
            },
        )
        .unwrap();
        let r = check_gauge_properties(&g, &[0.25]).unwrap();
        let c = r.check(Property::BelowIdentity).unwrap();
        assert!(!c.passed);
        assert_eq!(c.witness.as_ref().unwrap().value, 0.5);
    }

    #[test]
    fn grid_must_be_valid() {
        let g = Gauge::banach(0.5).unwrap();
        assert!(check_gauge_properties(&g, &[]).is_err());
        assert!(check_gauge_properties(&g, &[1.0, 1.0]).is_err());
        assert!(check_gauge_properties(&g, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn lsc_probe_catches_upward_spike() {
        let g = Gauge::from_fn(GaugeKind::Tabulated, "spike", |t| {
            if t == 1.0 {
                0.9
            } else {
                0.1 * t
            }
        });
        let r = check_gauge_properties(&g, &[0.5, 1.0, 2.0]).unwrap();
        let c = r.check(Property::LowerSemicontinuous).unwrap();
        assert!(!c.passed);
        assert_eq!(c.witness.as_ref().unwrap().t, 1.0);
    }

    #[test]
    fn weak_theta_ratio_must_not_increase() {
        let g = Gauge::with_formula(
            GaugeKind::WeakTheta,
            Formula::Power {
                coeff: 0.1,
                exponent: 2.0,
            },
        )
        .unwrap();
        let r = check_gauge_properties(&g, &[0.5, 1.0]).unwrap();
        assert!(!r.check(Property::RatioNonIncreasing).unwrap().passed);
    }

    #[test]
    fn midpoint_examples() {
        let th = midpoint_gauge(&Gauge::banach(0.5).unwrap());
        assert_eq!(th.eval(2.0), 1.5);
        let zero = midpoint_gauge(&Gauge::banach(0.0).unwrap());
        let half = Gauge::banach(0.5).unwrap();
        for t in grid(0.1, 10.0, 50) {
            assert_eq!(zero.eval(t), half.eval(t));
        }
        let small = midpoint_gauge(&Gauge::rho_section3());
        assert_eq!(small.eval(0.5), 0.3125);
    }

    #[test]
    fn midpoint_checked_rejects_uncertified() {
        let bad = Gauge::from_fn(GaugeKind::EtaContraction, "t", |t| t);
        assert!(matches!(
            midpoint_gauge_checked(&bad, &[1.0]),
            Err(Error::Precondition(_))
        ));
        assert!(midpoint_gauge_checked(&Gauge::rho_section3(), &grid(0.1, 5.0, 30)).is_ok());
    }

    #[test]
    fn weak_reduction_examples() {
        let g = grid(0.1, 10.0, 40);
        let half =
            Gauge::with_formula(GaugeKind::WeakTheta, Formula::Linear { slope: 0.5 }).unwrap();
        let eta = weak_to_gauge(&half, &g).unwrap();
        let b = Gauge::banach(0.5).unwrap();
        for &t in &g {
            assert_eq!(eta.eval(t), b.eval(t));
        }

        let capped = Gauge::with_formula(
            GaugeKind::WeakTheta,
            Formula::Capped {
                slope: 0.5,
                cap: 1.0,
            },
        )
        .unwrap();
        assert_eq!(weak_to_gauge(&capped, &g).unwrap().eval(4.0), 3.5);

        let double =
            Gauge::with_formula(GaugeKind::WeakTheta, Formula::Linear { slope: 2.0 }).unwrap();
        assert!(matches!(
            weak_to_gauge(&double, &[1.0]),
            Err(Error::Reduction { t, .. }) if t == 1.0
        ));
    }

    #[test]
    fn mt_reduction_examples() {
        let g = grid(0.1, 10.0, 40);
        let c = make_gauge(GaugeKind::MizoguchiTakahashi, GaugeParams::Alpha(0.5)).unwrap();
        let th = mt_to_gauge(&c, &g).unwrap();
        for &t in &g {
            assert_eq!(th.eval(t), 0.5 * t);
        }
        let sat = Gauge::with_formula(
            GaugeKind::MizoguchiTakahashi,
            Formula::Saturating { scale: 1.0 },
        )
        .unwrap();
        assert_eq!(mt_to_gauge(&sat, &g).unwrap().eval(1.0), 0.5);
        let zero = make_gauge(GaugeKind::MizoguchiTakahashi, GaugeParams::Alpha(0.0)).unwrap();
        assert!(g
            .iter()
            .all(|&t| mt_to_gauge(&zero, &g).unwrap().eval(t) == 0.0));
        let one = make_gauge(GaugeKind::MizoguchiTakahashi, GaugeParams::Alpha(1.0)).unwrap();
        assert!(matches!(mt_to_gauge(&one, &g), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn potential_examples() {
        let b = Gauge::banach(0.5).unwrap();
        assert_eq!(caristi_potential(&b, 3.0).unwrap(), 6.0);
        assert_eq!(caristi_potential(&b, 0.0).unwrap(), 0.0);
        let id = Gauge::from_fn(GaugeKind::EtaContraction, "t", |t| t);
        assert!(matches!(
            caristi_potential(&id, 1.0),
            Err(Error::PotentialUndefined { .. })
        ));
        assert!(caristi_potential(&b, -1.0).is_err());
        let th = midpoint_gauge(&b);
        assert_eq!(caristi_potential(&th, 2.0).unwrap(), 8.0);
        assert_eq!(caristi_potential(&th, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn default_grid_covers_distances() {
        let g = grid_spanning(&[1.0, 2.0, 3.0]);
        assert!(g.contains(&1.0) && g.contains(&2.0) && g.contains(&3.0));
        assert!(g.len() >= LOG_GRID_POINTS);
        validate_grid(&g).unwrap();
        assert_eq!(grid_spanning(&[2.0]), vec![2.0]);
    }
}
