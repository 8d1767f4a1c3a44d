//! Exhaustive certification of contraction conditions on finite spaces.
//!
//! Every certifier scans all ordered pairs `(x, y)`, `x != y` (all points for
//! the single-point Caristi form), after checking the gauge's class
//! properties on the evaluation grid. A failing certificate always carries a
//! witness that [`recheck_witness`] can re-evaluate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gauge::{
    check_class, check_properties, default_grid, Gauge, GaugeKind, GaugeReport, Property,
    PropertyCheck,
};
use crate::metric::{hausdorff_unchecked, FiniteMetricSpace, MultiValuedMap, SingleValuedMap};

/// Halvings applied to each base window width when searching for `delta`.
const WINDOW_HALVINGS: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// `d(x,Tx) <= phi(x) - phi(Tx)`
    Caristi,
    /// `d(x,y) <= phi(x,y) - phi(Tx,Ty)`
    CaristiTwoVar,
    /// `d(Tx,Ty) <= alpha d(x,y)`
    Banach,
    /// `d(Tx,Ty) <= eta(d(x,y))`
    Eta,
    /// `d(Tx,Ty) <= eta(d(x,y)) d(x,y)`
    MizoguchiTakahashi,
    /// `d(Tx,Ty) <= d(x,y) - eta(d(x,y))`
    Rhoades,
    /// `d(Tx,Ty) <= d(x,y) - theta(d(x,y))`
    Weak,
    /// `d(Tx,Ty) <= phi(d(x,y))`, `phi` right upper semicontinuous
    BoydWong,
    MeirKeeler,
    /// `d(Tx,Ty) < phi(d(x,y))` with `phi` an L-function
    LFunction,
    /// Bellman aggregator bound; see [`crate::bellman::certify_bellman`].
    RhoBellman,
}

impl Condition {
    pub const ALL: [Condition; 11] = [
        Condition::Caristi,
        Condition::CaristiTwoVar,
        Condition::Banach,
        Condition::Eta,
        Condition::MizoguchiTakahashi,
        Condition::Rhoades,
        Condition::Weak,
        Condition::BoydWong,
        Condition::MeirKeeler,
        Condition::LFunction,
        Condition::RhoBellman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Caristi => "caristi",
            Condition::CaristiTwoVar => "caristi-two-var",
            Condition::Banach => "banach",
            Condition::Eta => "eta",
            Condition::MizoguchiTakahashi => "mizoguchi-takahashi",
            Condition::Rhoades => "rhoades",
            Condition::Weak => "weak",
            Condition::BoydWong => "boyd-wong",
            Condition::MeirKeeler => "meir-keeler",
            Condition::LFunction => "l-function",
            Condition::RhoBellman => "rho-bellman",
        }
    }

    fn accepts(self, kind: GaugeKind) -> bool {
        use GaugeKind::*;
        match self {
            Condition::Banach => kind == Banach,
            Condition::Eta | Condition::BoydWong | Condition::LFunction | Condition::MeirKeeler => {
                kind.is_eta_like()
            }
            Condition::MizoguchiTakahashi => matches!(kind, MizoguchiTakahashi | Tabulated),
            Condition::Weak | Condition::Rhoades => matches!(kind, WeakTheta | Tabulated),
            Condition::Caristi | Condition::CaristiTwoVar | Condition::RhoBellman => false,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown condition {s:?}")))
    }
}

#[derive(Debug, Clone, Copy)]
pub enum MapRef<'a> {
    Single(&'a SingleValuedMap),
    Multi(&'a MultiValuedMap),
}

impl<'a> From<&'a SingleValuedMap> for MapRef<'a> {
    fn from(m: &'a SingleValuedMap) -> Self {
        MapRef::Single(m)
    }
}

impl<'a> From<&'a MultiValuedMap> for MapRef<'a> {
    fn from(m: &'a MultiValuedMap) -> Self {
        MapRef::Multi(m)
    }
}

impl MapRef<'_> {
    fn len(&self) -> usize {
        match self {
            MapRef::Single(m) => m.len(),
            MapRef::Multi(m) => m.len(),
        }
    }

    pub fn is_multi(&self) -> bool {
        matches!(self, MapRef::Multi(_))
    }

    /// `d(Tx, Ty)` or `H(Tx, Ty)`.
    pub fn image_distance(&self, space: &FiniteMetricSpace, x: usize, y: usize) -> f64 {
        match self {
            MapRef::Single(m) => space.d(m.apply(x), m.apply(y)),
            MapRef::Multi(m) => hausdorff_unchecked(space, m.image(x), m.image(y)).distance,
        }
    }
}

/// What a condition is checked against.
#[derive(Debug, Clone, Copy)]
pub enum Evidence<'a> {
    None,
    Gauge(&'a Gauge),
    /// `phi(x)`, one value per point.
    PointPotential(&'a [f64]),
    /// `phi(x, y)`, an `n x n` table.
    PairPotential(&'a [Vec<f64>]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Witness {
    /// The pair inequality `lhs <= rhs` (or `lhs < rhs`) fails.
    Pair {
        x: usize,
        y: usize,
        lhs: f64,
        rhs: f64,
        margin: f64,
    },
    /// The single-point Caristi inequality fails at `x`.
    Point {
        x: usize,
        lhs: f64,
        rhs: f64,
        margin: f64,
    },
    /// A gauge class property fails at abscissa `t`.
    Gauge {
        property: Property,
        t: f64,
        value: f64,
        detail: String,
    },
    /// The potential table itself is malformed at `x` (or `(x, y)`).
    Potential {
        x: usize,
        y: Option<usize>,
        value: f64,
    },
}

/// One Meir-Keeler window: `eps <= d(x,y) < eps + delta => d(Tx,Ty) < eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeirKeelerWindow {
    pub epsilon: f64,
    pub delta: f64,
    /// Supremum of admissible widths; `None` when every width works.
    pub delta_sup: Option<f64>,
}

/// An L-function window `[s, s + delta]` on which `phi <= s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LWindow {
    pub s: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub condition: Condition,
    pub multi_valued: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge: Option<String>,
    pub verdict: Verdict,
    pub pairs_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge_report: Option<GaugeReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub meir_keeler: Vec<MeirKeelerWindow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub l_windows: Vec<LWindow>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn new(condition: Condition, map: MapRef<'_>, gauge: Option<&Gauge>) -> Self {
        Self {
            condition,
            multi_valued: map.is_multi(),
            gauge: gauge.map(Gauge::describe),
            verdict: Verdict::Pass,
            pairs_checked: 0,
            witness: None,
            gauge_report: None,
            grid: Vec::new(),
            meir_keeler: Vec::new(),
            l_windows: Vec::new(),
        }
    }

    fn fail(&mut self, witness: Witness) {
        self.verdict = Verdict::Fail;
        self.witness = Some(witness);
    }
}

fn gauge_witness(check: &PropertyCheck) -> Witness {
    let w = check.witness.as_ref();
    Witness::Gauge {
        property: check.property,
        t: w.map_or(f64::NAN, |w| w.t),
        value: w.map_or(f64::NAN, |w| w.value),
        detail: w.map_or_else(String::new, |w| w.detail.clone()),
    }
}

/// Properties each gauge-based condition needs on the grid.
fn required_properties(condition: Condition) -> Option<(&'static str, Vec<Property>)> {
    use Property::*;
    let props = |c: GaugeKind| crate::gauge::class_properties(c).to_vec();
    Some(match condition {
        Condition::Banach => ("banach", props(GaugeKind::Banach)),
        Condition::Eta => ("eta-contraction", props(GaugeKind::EtaContraction)),
        Condition::MizoguchiTakahashi => {
            ("mizoguchi-takahashi", props(GaugeKind::MizoguchiTakahashi))
        }
        Condition::Weak => ("weak-theta", props(GaugeKind::WeakTheta)),
        Condition::Rhoades => {
            let mut p = props(GaugeKind::WeakTheta);
            p.push(AtMostIdentity);
            ("rhoades", p)
        }
        Condition::BoydWong => (
            "boyd-wong",
            vec![
                ZeroAtOrigin,
                Nonnegative,
                BelowIdentity,
                RightUpperSemicontinuous,
            ],
        ),
        Condition::LFunction => ("l-function", vec![ZeroAtOrigin, Positive, LWindow]),
        _ => return None,
    })
}

/// Left- and right-hand sides of the pair inequality, and whether it is
/// strict.
fn pair_terms(
    condition: Condition,
    space: &FiniteMetricSpace,
    map: MapRef<'_>,
    evidence: Evidence<'_>,
    x: usize,
    y: usize,
) -> Option<(f64, f64, bool)> {
    let d = space.d(x, y);
    match (condition, evidence) {
        (Condition::CaristiTwoVar, Evidence::PairPotential(phi)) => {
            let MapRef::Single(m) = map else { return None };
            Some((d, phi[x][y] - phi[m.apply(x)][m.apply(y)], false))
        }
        (_, Evidence::Gauge(g)) => {
            let image = map.image_distance(space, x, y);
            let (rhs, strict) = match condition {
                Condition::Banach | Condition::Eta | Condition::BoydWong => (g.eval(d), false),
                Condition::MizoguchiTakahashi => (g.eval(d) * d, false),
                Condition::Weak | Condition::Rhoades => (d - g.eval(d), false),
                Condition::LFunction => (g.eval(d), true),
                _ => return None,
            };
            Some((image, rhs, strict))
        }
        _ => None,
    }
}

fn violates(lhs: f64, rhs: f64, strict: bool) -> bool {
    if strict {
        !(lhs < rhs)
    } else {
        !(lhs <= rhs)
    }
}

fn caristi_terms(
    space: &FiniteMetricSpace,
    map: &SingleValuedMap,
    phi: &[f64],
    x: usize,
) -> (f64, f64) {
    let tx = map.apply(x);
    (space.d(x, tx), phi[x] - phi[tx])
}

/// Certifies `condition` for `map` on `space`.
///
/// Gauge-based conditions take [`Evidence::Gauge`]; the Caristi forms take a
/// potential table; Meir-Keeler takes either no evidence or an eta-like gauge
/// used as a modulus that every recorded window must respect
/// (`g(eps + delta) < eps`).
pub fn certify_map<'a>(
    space: &FiniteMetricSpace,
    map: impl Into<MapRef<'a>>,
    condition: Condition,
    evidence: Evidence<'_>,
) -> Result<Certificate> {
    let map = map.into();
    if map.len() != space.len() {
        return invalid(format!(
            "map is defined on {} points, space has {}",
            map.len(),
            space.len()
        ));
    }
    match condition {
        Condition::RhoBellman => invalid("rho-bellman applies to Bellman problems, not maps"),
        Condition::Caristi | Condition::CaristiTwoVar => {
            certify_caristi(space, map, condition, evidence)
        }
        Condition::MeirKeeler => {
            let modulus = match evidence {
                Evidence::None => None,
                Evidence::Gauge(g) if condition.accepts(g.kind()) => Some(g),
                other => {
                    return invalid(format!(
                        "meir-keeler takes no evidence or an eta-like gauge, got {other:?}"
                    ))
                }
            };
            Ok(certify_meir_keeler(space, map, modulus))
        }
        _ => {
            let Evidence::Gauge(g) = evidence else {
                return invalid(format!("condition {condition} needs a gauge"));
            };
            if !condition.accepts(g.kind()) {
                return invalid(format!(
                    "gauge kind {} does not match condition {condition}",
                    g.kind()
                ));
            }
            if condition == Condition::Banach && g.alpha().is_none() {
                return invalid("banach condition needs a banach(alpha) gauge");
            }
            certify_gauge_condition(space, map, condition, g)
        }
    }
}

fn certify_gauge_condition(
    space: &FiniteMetricSpace,
    map: MapRef<'_>,
    condition: Condition,
    g: &Gauge,
) -> Result<Certificate> {
    let mut cert = Certificate::new(condition, map, Some(g));
    let grid = default_grid(space);
    let (label, props) = required_properties(condition).expect("gauge condition");

    if !grid.is_empty() {
        let report = check_properties(g, label, &props, &grid)?;
        let mut report = report;
        if props.contains(&Property::LWindow) {
            let (check, windows) = l_window_check(space, g, &grid);
            cert.l_windows = windows;
            report.checks.push(check);
        }
        if let Some(failed) = report.first_failure() {
            cert.fail(gauge_witness(failed));
        }
        cert.gauge_report = Some(report);
        cert.grid = grid;
        if !cert.passed() {
            return Ok(cert);
        }
    }

    let n = space.len();
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            cert.pairs_checked += 1;
            let (lhs, rhs, strict) =
                pair_terms(condition, space, map, Evidence::Gauge(g), x, y).expect("gauge terms");
            if violates(lhs, rhs, strict) {
                cert.fail(Witness::Pair {
                    x,
                    y,
                    lhs,
                    rhs,
                    margin: lhs - rhs,
                });
                return Ok(cert);
            }
        }
    }
    Ok(cert)
}

fn certify_caristi(
    space: &FiniteMetricSpace,
    map: MapRef<'_>,
    condition: Condition,
    evidence: Evidence<'_>,
) -> Result<Certificate> {
    let MapRef::Single(single) = map else {
        return invalid(format!("{condition} applies to single-valued maps only"));
    };
    let n = space.len();
    let mut cert = Certificate::new(condition, map, None);
    match (condition, evidence) {
        (Condition::Caristi, Evidence::PointPotential(phi)) => {
            if phi.len() != n {
                return invalid(format!("potential has {} values for {n} points", phi.len()));
            }
            if let Some(x) = phi.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                cert.fail(Witness::Potential {
                    x,
                    y: None,
                    value: phi[x],
                });
                return Ok(cert);
            }
            for x in 0..n {
                cert.pairs_checked += 1;
                let (lhs, rhs) = caristi_terms(space, single, phi, x);
                if violates(lhs, rhs, false) {
                    cert.fail(Witness::Point {
                        x,
                        lhs,
                        rhs,
                        margin: lhs - rhs,
                    });
                    return Ok(cert);
                }
            }
        }
        (Condition::CaristiTwoVar, Evidence::PairPotential(phi)) => {
            if phi.len() != n || phi.iter().any(|row| row.len() != n) {
                return invalid(format!("pair potential must be a {n} x {n} table"));
            }
            for (x, row) in phi.iter().enumerate() {
                if let Some(y) = row.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                    cert.fail(Witness::Potential {
                        x,
                        y: Some(y),
                        value: row[y],
                    });
                    return Ok(cert);
                }
            }
            for x in 0..n {
                for y in 0..n {
                    if x == y {
                        continue;
                    }
                    cert.pairs_checked += 1;
                    let (lhs, rhs, strict) =
                        pair_terms(condition, space, map, evidence, x, y).expect("pair terms");
                    if violates(lhs, rhs, strict) {
                        cert.fail(Witness::Pair {
                            x,
                            y,
                            lhs,
                            rhs,
                            margin: lhs - rhs,
                        });
                        return Ok(cert);
                    }
                }
            }
        }
        (c, e) => {
            return invalid(format!(
                "condition {c} needs a matching potential table, got {e:?}"
            ))
        }
    }
    Ok(cert)
}

/// Candidate window widths above `eps`, largest first: every halved gap
/// between consecutive distinct distances and `eps / 2`, each repeatedly
/// halved.
fn window_candidates(distances: &[f64], eps: f64) -> Vec<f64> {
    let mut bases: Vec<f64> = distances
        .windows(2)
        .map(|w| (w[1] - w[0]) / 2.0)
        .filter(|g| *g > 0.0)
        .collect();
    bases.push(eps / 2.0);
    let mut out: Vec<f64> = bases
        .iter()
        .flat_map(|&b| (0..=WINDOW_HALVINGS).map(move |k| b / 2f64.powi(k as i32)))
        .filter(|d| *d > 0.0)
        .collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out.dedup();
    out
}

/// On a finite space only the distance values matter as `eps`: any other
/// `eps` has an empty window for small enough `delta`.
fn certify_meir_keeler(
    space: &FiniteMetricSpace,
    map: MapRef<'_>,
    modulus: Option<&Gauge>,
) -> Certificate {
    let mut cert = Certificate::new(Condition::MeirKeeler, map, modulus);
    let n = space.len();
    let pairs: Vec<(usize, usize, f64, f64)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|(x, y)| x != y)
        .map(|(x, y)| (x, y, space.d(x, y), map.image_distance(space, x, y)))
        .collect();
    cert.pairs_checked = pairs.len();
    let distances = space.distinct_distances();

    for &eps in &distances {
        // a pair at distance exactly eps whose image does not shrink below eps
        if let Some(&(x, y, d, image)) = pairs.iter().find(|p| p.2 == eps && !(p.3 < eps)) {
            cert.fail(Witness::Pair {
                x,
                y,
                lhs: image,
                rhs: d,
                margin: image - d,
            });
            return cert;
        }
        let delta_sup = pairs
            .iter()
            .filter(|p| p.2 >= eps && !(p.3 < eps))
            .map(|p| p.2 - eps)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.min(v)))
            });
        let admissible = |delta: f64| {
            delta_sup.is_none_or(|sup| delta <= sup)
                && modulus.is_none_or(|g| g.eval(eps + delta) < eps)
        };
        match window_candidates(&distances, eps)
            .into_iter()
            .find(|&delta| admissible(delta))
        {
            Some(delta) => cert.meir_keeler.push(MeirKeelerWindow {
                epsilon: eps,
                delta,
                delta_sup,
            }),
            None => {
                let g = modulus.expect("without a modulus a small window always passes");
                cert.fail(Witness::Gauge {
                    property: Property::BelowIdentity,
                    t: eps,
                    value: g.eval(eps),
                    detail: "no window width satisfies the modulus bound".into(),
                });
                return cert;
            }
        }
    }
    cert
}

fn l_window_check(
    space: &FiniteMetricSpace,
    g: &Gauge,
    grid: &[f64],
) -> (PropertyCheck, Vec<LWindow>) {
    let distances = space.distinct_distances();
    let mut windows = Vec::with_capacity(distances.len());
    for &s in &distances {
        let fits = |delta: f64| {
            g.eval(s) <= s
                && g.eval(s + delta) <= s
                && grid
                    .iter()
                    .filter(|&&t| t > s && t < s + delta)
                    .all(|&t| g.eval(t) <= s)
        };
        match window_candidates(&distances, s)
            .into_iter()
            .find(|&d| fits(d))
        {
            Some(delta) => windows.push(LWindow { s, delta }),
            None => {
                let check = PropertyCheck {
                    property: Property::LWindow,
                    passed: false,
                    witness: Some(crate::gauge::GaugeWitness {
                        t: s,
                        value: g.eval(s),
                        detail: "no window above s on which the gauge stays <= s".into(),
                    }),
                };
                return (check, windows);
            }
        }
    }
    let check = PropertyCheck {
        property: Property::LWindow,
        passed: true,
        witness: None,
    };
    (check, windows)
}

/// Re-evaluates the inequality cited by a failing certificate's witness.
/// Returns `true` when the violation reproduces.
pub fn recheck_witness(
    space: &FiniteMetricSpace,
    map: MapRef<'_>,
    cert: &Certificate,
    evidence: Evidence<'_>,
) -> bool {
    let Some(witness) = &cert.witness else {
        return false;
    };
    match (witness, evidence) {
        (Witness::Point { x, .. }, Evidence::PointPotential(phi)) => {
            let MapRef::Single(m) = map else { return false };
            let (lhs, rhs) = caristi_terms(space, m, phi, *x);
            violates(lhs, rhs, false)
        }
        (Witness::Pair { x, y, .. }, _) if cert.condition == Condition::MeirKeeler => {
            !(map.image_distance(space, *x, *y) < space.d(*x, *y))
        }
        (Witness::Pair { x, y, .. }, _) => pair_terms(cert.condition, space, map, evidence, *x, *y)
            .is_some_and(|(l, r, s)| violates(l, r, s)),
        (Witness::Gauge { t, value, .. }, Evidence::Gauge(g)) => {
            let v = g.eval(*t);
            v == *value || (v.is_nan() && value.is_nan())
        }
        (Witness::Potential { x, y, value }, Evidence::PointPotential(phi)) => {
            y.is_none() && phi[*x] == *value && !(value.is_finite() && *value >= 0.0)
        }
        (
            Witness::Potential {
                x,
                y: Some(y),
                value,
            },
            Evidence::PairPotential(phi),
        ) => phi[*x][*y] == *value && !(value.is_finite() && *value >= 0.0),
        _ => false,
    }
}

/// Certifies `gauge` against its own declared class on the space's default
/// grid.
pub fn certify_gauge(space: &FiniteMetricSpace, gauge: &Gauge) -> Result<GaugeReport> {
    check_class(gauge, gauge.kind(), &default_grid(space))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{complement_gauge, make_gauge, midpoint_gauge, Formula, GaugeParams};
    use crate::metric::PointSet;

    fn line013() -> FiniteMetricSpace {
        FiniteMetricSpace::on_line(&[0.0, 1.0, 3.0]).unwrap()
    }

    // indices: 0 -> point 0, 1 -> point 1, 2 -> point 3
    fn toward_zero(s: &FiniteMetricSpace) -> SingleValuedMap {
        SingleValuedMap::new(vec![0, 0, 1], s).unwrap()
    }

    #[test]
    fn banach_example_passes_with_exact_ratio() {
        let s = line013();
        let t = toward_zero(&s);
        let g = Gauge::banach(0.5).unwrap();
        let c = certify_map(&s, &t, Condition::Banach, Evidence::Gauge(&g)).unwrap();
        assert!(c.passed(), "{c:?}");
        assert_eq!(c.pairs_checked, 6);
        let tighter = Gauge::banach(0.49).unwrap();
        let c = certify_map(&s, &t, Condition::Banach, Evidence::Gauge(&tighter)).unwrap();
        assert!(!c.passed());
        assert!(recheck_witness(
            &s,
            (&t).into(),
            &c,
            Evidence::Gauge(&tighter)
        ));
    }

    #[test]
    fn identity_fails_banach() {
        let s = line013();
        let id = SingleValuedMap::identity(3);
        let g = Gauge::banach(0.99).unwrap();
        let c = certify_map(&s, &id, Condition::Banach, Evidence::Gauge(&g)).unwrap();
        assert!(!c.passed());
        let Some(Witness::Pair { x, y, margin, .. }) = c.witness else {
            panic!("expected pair witness")
        };
        assert_ne!(x, y);
        assert!(margin > 0.0);
        assert!(recheck_witness(&s, (&id).into(), &c, Evidence::Gauge(&g)));
    }

    #[test]
    fn caristi_point_example() {
        let s = line013();
        let t = toward_zero(&s);
        let phi = [0.0, 2.0, 6.0];
        let c = certify_map(&s, &t, Condition::Caristi, Evidence::PointPotential(&phi)).unwrap();
        assert!(c.passed());
        assert_eq!(c.pairs_checked, 3);

        let low = [0.0, 2.0, 3.0];
        let c = certify_map(&s, &t, Condition::Caristi, Evidence::PointPotential(&low)).unwrap();
        assert!(!c.passed());
        assert!(matches!(c.witness, Some(Witness::Point { x: 2, .. })));
        assert!(recheck_witness(
            &s,
            (&t).into(),
            &c,
            Evidence::PointPotential(&low)
        ));

        let neg = [0.0, -1.0, 3.0];
        let c = certify_map(&s, &t, Condition::Caristi, Evidence::PointPotential(&neg)).unwrap();
        assert!(matches!(c.witness, Some(Witness::Potential { x: 1, .. })));
    }

    #[test]
    fn mismatched_evidence_is_input_error() {
        let s = line013();
        let t = toward_zero(&s);
        let rho = Gauge::rho_section3();
        assert!(certify_map(&s, &t, Condition::Banach, Evidence::Gauge(&rho)).is_err());
        assert!(certify_map(&s, &t, Condition::Caristi, Evidence::None).is_err());
        assert!(certify_map(&s, &t, Condition::Eta, Evidence::None).is_err());
        let weak = make_gauge(GaugeKind::WeakTheta, GaugeParams::Alpha(0.5)).unwrap();
        assert!(certify_map(&s, &t, Condition::Eta, Evidence::Gauge(&weak)).is_err());
        assert!(certify_map(&s, &t, Condition::RhoBellman, Evidence::None).is_err());
        let mv = MultiValuedMap::from(&t);
        assert!(certify_map(
            &s,
            &mv,
            Condition::Caristi,
            Evidence::PointPotential(&[0.0; 3])
        )
        .is_err());
    }

    #[test]
    fn uncertified_gauge_fails_with_abscissa_witness() {
        let s = line013();
        let t = toward_zero(&s);
        let id = Gauge::from_fn(GaugeKind::EtaContraction, "t", |t| t);
        let c = certify_map(&s, &t, Condition::Eta, Evidence::Gauge(&id)).unwrap();
        assert!(!c.passed());
        assert!(matches!(
            c.witness,
            Some(Witness::Gauge {
                property: Property::BelowIdentity,
                ..
            })
        ));
        assert!(recheck_witness(&s, (&t).into(), &c, Evidence::Gauge(&id)));
    }

    #[test]
    fn multi_valued_eta_uses_hausdorff() {
        let s = line013();
        let images = vec![
            PointSet::singleton(0),
            PointSet::new([0, 1]).unwrap(),
            PointSet::singleton(1),
        ];
        let t = MultiValuedMap::new(images, &s).unwrap();
        let g = Gauge::banach(0.5).unwrap();
        // H({0}, {0,1}) = 1 > 0.5 * d(0, 1)
        let c = certify_map(&s, &t, Condition::Eta, Evidence::Gauge(&g)).unwrap();
        assert!(!c.passed());
        assert!(c.multi_valued);
        assert!(recheck_witness(&s, (&t).into(), &c, Evidence::Gauge(&g)));
    }

    #[test]
    fn meir_keeler_windows_respect_banach_bound() {
        let s = line013();
        let t = toward_zero(&s);
        let g = Gauge::banach(0.5).unwrap();
        let c = certify_map(&s, &t, Condition::MeirKeeler, Evidence::Gauge(&g)).unwrap();
        assert!(c.passed());
        assert_eq!(c.meir_keeler.len(), 3);
        for w in &c.meir_keeler {
            assert!(0.5 * (w.epsilon + w.delta) < w.epsilon);
        }
        let free = certify_map(&s, &t, Condition::MeirKeeler, Evidence::None).unwrap();
        assert!(free.passed());
        // halved gap between 1 and 2
        assert_eq!(free.meir_keeler[0].delta, 0.5);

        let id = SingleValuedMap::identity(3);
        let c = certify_map(&s, &id, Condition::MeirKeeler, Evidence::None).unwrap();
        assert!(!c.passed());
        assert!(recheck_witness(&s, (&id).into(), &c, Evidence::None));
    }

    #[test]
    fn l_function_and_boyd_wong() {
        let s = line013();
        let t = toward_zero(&s);
        let g =
            Gauge::with_formula(GaugeKind::EtaContraction, Formula::Linear { slope: 0.6 }).unwrap();
        let c = certify_map(&s, &t, Condition::LFunction, Evidence::Gauge(&g)).unwrap();
        assert!(c.passed(), "{c:?}");
        assert_eq!(c.l_windows.len(), 3);
        let c = certify_map(&s, &t, Condition::BoydWong, Evidence::Gauge(&g)).unwrap();
        assert!(c.passed());

        // strict: 0.5 * 2 = 1 is attained by the pair (3, 1)
        let half = Gauge::banach(0.5).unwrap();
        let c = certify_map(&s, &t, Condition::LFunction, Evidence::Gauge(&half)).unwrap();
        assert!(!c.passed());

        let jump = Gauge::from_fn(GaugeKind::EtaContraction, "jump", |t| {
            if t > 1.0 {
                0.9 * t
            } else {
                0.1 * t
            }
        });
        let c = certify_map(&s, &t, Condition::BoydWong, Evidence::Gauge(&jump)).unwrap();
        assert!(matches!(
            c.witness,
            Some(Witness::Gauge {
                property: Property::RightUpperSemicontinuous,
                ..
            })
        ));
    }

    #[test]
    fn weak_and_rhoades() {
        let s = line013();
        let t = toward_zero(&s);
        let theta = make_gauge(GaugeKind::WeakTheta, GaugeParams::Alpha(0.5)).unwrap();
        assert!(
            certify_map(&s, &t, Condition::Weak, Evidence::Gauge(&theta))
                .unwrap()
                .passed()
        );
        assert!(
            certify_map(&s, &t, Condition::Rhoades, Evidence::Gauge(&theta))
                .unwrap()
                .passed()
        );
        let big = make_gauge(GaugeKind::WeakTheta, GaugeParams::Alpha(1.5)).unwrap();
        let c = certify_map(&s, &t, Condition::Rhoades, Evidence::Gauge(&big)).unwrap();
        assert!(matches!(
            c.witness,
            Some(Witness::Gauge {
                property: Property::AtMostIdentity,
                ..
            })
        ));
    }

    #[test]
    fn two_variable_caristi_from_midpoint_potential() {
        let s = line013();
        let t = toward_zero(&s);
        let theta = midpoint_gauge(&Gauge::banach(0.5).unwrap());
        let phi: Vec<Vec<f64>> = (0..3)
            .map(|x| {
                (0..3)
                    .map(|y| crate::gauge::caristi_potential(&theta, s.d(x, y)).unwrap())
                    .collect()
            })
            .collect();
        let c = certify_map(
            &s,
            &t,
            Condition::CaristiTwoVar,
            Evidence::PairPotential(&phi),
        )
        .unwrap();
        assert!(c.passed());
        let _ = complement_gauge(&theta);
    }

    #[test]
    fn condition_names_round_trip() {
        for c in Condition::ALL {
            assert_eq!(c.name().parse::<Condition>().unwrap(), c);
        }
        assert!("nope".parse::<Condition>().is_err());
    }
}
