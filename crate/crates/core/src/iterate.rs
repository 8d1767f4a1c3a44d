//! Picard iteration, gauge-guided orbits of set-valued maps, and the
//! telescoping potential bound along an orbit.

use std::collections::HashSet;

use serde::Serialize;

use crate::certify::MapRef;
use crate::error::{invalid, Error, Result};
use crate::gauge::{caristi_potential, midpoint_gauge, Gauge};
use crate::metric::{FiniteMetricSpace, MultiValuedMap, SingleValuedMap};

/// Slack allowed when comparing an orbit distance with its telescoping bound.
pub const TELESCOPING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StopRule {
    pub max_iter: usize,
}

impl StopRule {
    pub fn new(max_iter: usize) -> Result<Self> {
        if max_iter == 0 {
            return invalid("max_iter must be at least 1");
        }
        Ok(Self { max_iter })
    }

    /// Strict potential descent forbids revisits, so `n` applications of the
    /// map always suffice on an `n`-point space.
    pub fn for_caristi(space: &FiniteMetricSpace) -> Self {
        Self {
            max_iter: space.len().max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    FixedPoint,
    MaxIter,
    /// The orbit revisited a point that is not fixed.
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    /// `potential[n] = Phi(x_n, x_{n+1})`, built from a gauge.
    Edge,
    /// `potential[n] = phi(x_n)`, read from a table.
    Point,
}

/// Where the potential values recorded along an orbit come from.
#[derive(Debug, Clone, Copy)]
pub enum PotentialSource<'a> {
    None,
    /// An eta gauge; the potential uses its midpoint gauge.
    Eta(&'a Gauge),
    /// A gauge already playing the role of theta.
    Theta(&'a Gauge),
    Table(&'a [f64]),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub points: Vec<usize>,
    pub step_dist: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential_kind: Option<PotentialKind>,
    pub termination: Termination,
    /// Steps whose selection met the theta bound only with equality.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub relaxed_steps: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl IterationTrace {
    pub fn fixed_point(&self) -> Option<usize> {
        (self.termination == Termination::FixedPoint).then(|| *self.points.last().unwrap())
    }

    /// Moves made before the fixed point was reached (the confirming repeat
    /// is not counted).
    pub fn steps(&self) -> usize {
        match self.termination {
            Termination::FixedPoint => self.points.len() - 2,
            _ => self.points.len() - 1,
        }
    }

    pub fn potential_non_increasing(&self) -> Option<bool> {
        self.potential
            .as_ref()
            .map(|p| p.windows(2).all(|w| w[1] <= w[0]))
    }
}

fn step_distances(space: &FiniteMetricSpace, points: &[usize]) -> Vec<f64> {
    points.windows(2).map(|w| space.d(w[0], w[1])).collect()
}

fn attach_potential(trace: &mut IterationTrace, source: PotentialSource<'_>) -> Result<()> {
    let theta = match source {
        PotentialSource::None => return Ok(()),
        PotentialSource::Table(phi) => {
            trace.potential = Some(trace.points.iter().map(|&x| phi[x]).collect());
            trace.potential_kind = Some(PotentialKind::Point);
            return Ok(());
        }
        PotentialSource::Eta(eta) => midpoint_gauge(eta),
        PotentialSource::Theta(theta) => theta.clone(),
    };
    let values: Result<Vec<f64>> = trace
        .step_dist
        .iter()
        .map(|&d| caristi_potential(&theta, d))
        .collect();
    match values {
        Ok(v) => {
            trace.potential = Some(v);
            trace.potential_kind = Some(PotentialKind::Edge);
        }
        Err(e @ Error::PotentialUndefined { .. }) => {
            trace.notes.push(format!("potential omitted: {e}"));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

/// Iterates `x_{n+1} = T(x_n)` from `x0`.
///
/// Stops at the first fixed point, at the first revisit of a non-fixed point
/// (`stalled`), or after `stop.max_iter` applications of `T`.
pub fn picard_iterate(
    space: &FiniteMetricSpace,
    map: &SingleValuedMap,
    x0: usize,
    stop: StopRule,
    potential: PotentialSource<'_>,
) -> Result<IterationTrace> {
    space.check_point(x0)?;
    if map.len() != space.len() {
        return invalid("map and space sizes differ");
    }
    if let PotentialSource::Table(phi) = potential {
        if phi.len() != space.len() {
            return invalid("potential table size differs from the space");
        }
    }
    let mut points = vec![x0];
    let mut seen = HashSet::from([x0]);
    let mut termination = Termination::MaxIter;
    for _ in 0..stop.max_iter {
        let x = *points.last().unwrap();
        let y = map.apply(x);
        points.push(y);
        if y == x {
            termination = Termination::FixedPoint;
            break;
        }
        if !seen.insert(y) {
            termination = Termination::Stalled;
            break;
        }
    }
    let mut trace = IterationTrace {
        step_dist: step_distances(space, &points),
        points,
        potential: None,
        potential_kind: None,
        termination,
        relaxed_steps: Vec::new(),
        notes: Vec::new(),
    };
    attach_potential(&mut trace, potential)?;
    Ok(trace)
}

/// Orbit of a set-valued map with `x_{n+1} in T(x_n)`.
///
/// Each step first tests `x_n in T(x_n)`; otherwise it selects the point of
/// `T(x_n)` nearest to `x_n` (lowest index on ties) and checks it against
/// `d(x_n, x_{n+1}) <= theta(d(x_{n-1}, x_n))`.
pub fn multivalued_orbit(
    space: &FiniteMetricSpace,
    map: &MultiValuedMap,
    x0: usize,
    theta: &Gauge,
    stop: StopRule,
) -> Result<IterationTrace> {
    space.check_point(x0)?;
    if map.len() != space.len() {
        return invalid("map and space sizes differ");
    }
    let mut points = vec![x0];
    let mut seen = HashSet::from([x0]);
    let mut relaxed_steps = Vec::new();
    let mut termination = Termination::MaxIter;
    for step in 0..stop.max_iter {
        let y = *points.last().unwrap();
        let image = map.image(y);
        if image.contains(y) {
            points.push(y);
            termination = Termination::FixedPoint;
            break;
        }
        let mut z = image.members()[0];
        for c in image.iter() {
            if space.d(y, c) < space.d(y, z) {
                z = c;
            }
        }
        if let [.., x, _] = points[..] {
            let bound = theta.eval(space.d(x, y));
            let dz = space.d(y, z);
            if dz > bound {
                return Err(Error::SelectionBound {
                    step,
                    from: y,
                    to: z,
                    step_distance: dz,
                    bound,
                });
            }
            if dz == bound {
                relaxed_steps.push(step);
            }
        }
        points.push(z);
        if !seen.insert(z) {
            termination = Termination::Stalled;
            break;
        }
    }
    let mut trace = IterationTrace {
        step_dist: step_distances(space, &points),
        points,
        potential: None,
        potential_kind: None,
        termination,
        relaxed_steps,
        notes: Vec::new(),
    };
    attach_potential(&mut trace, PotentialSource::Theta(theta))?;
    Ok(trace)
}

/// `potential[n] - potential[m]`, an upper bound for `d(x_n, x_m)` on
/// certified traces.
pub fn telescoping_bound(trace: &IterationTrace, n: usize, m: usize) -> Result<f64> {
    let Some(p) = &trace.potential else {
        return invalid("trace carries no potentials");
    };
    if n > m || m >= p.len() {
        return invalid(format!(
            "need n <= m < {} for the telescoping bound, got n = {n}, m = {m}",
            p.len()
        ));
    }
    Ok(p[n] - p[m])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TelescopingAudit {
    pub pairs_checked: usize,
    pub violations: usize,
    /// `min(bound - d(x_n, x_m))` over all audited pairs.
    pub min_slack: Option<f64>,
}

/// Compares `d(x_n, x_m)` with [`telescoping_bound`] for every `n < m`.
pub fn telescoping_audit(
    space: &FiniteMetricSpace,
    trace: &IterationTrace,
) -> Result<TelescopingAudit> {
    let Some(p) = &trace.potential else {
        return invalid("trace carries no potentials");
    };
    let mut audit = TelescopingAudit {
        pairs_checked: 0,
        violations: 0,
        min_slack: None,
    };
    for n in 0..p.len() {
        for m in (n + 1)..p.len() {
            let slack = telescoping_bound(trace, n, m)? - space.d(trace.points[n], trace.points[m]);
            audit.pairs_checked += 1;
            if slack < -TELESCOPING_TOL {
                audit.violations += 1;
            }
            audit.min_slack = Some(audit.min_slack.map_or(slack, |s: f64| s.min(slack)));
        }
    }
    Ok(audit)
}

/// Every `x` with `T(x) = x` (or `x in T(x)`), by full scan.
pub fn brute_force_fixed_points<'a>(map: impl Into<MapRef<'a>>) -> Vec<usize> {
    match map.into() {
        MapRef::Single(m) => (0..m.len()).filter(|&x| m.apply(x) == x).collect(),
        MapRef::Multi(m) => (0..m.len()).filter(|&x| m.image(x).contains(x)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::PointSet;

    fn line013() -> FiniteMetricSpace {
        FiniteMetricSpace::on_line(&[0.0, 1.0, 3.0]).unwrap()
    }

    fn toward_zero(s: &FiniteMetricSpace) -> SingleValuedMap {
        SingleValuedMap::new(vec![0, 0, 1], s).unwrap()
    }

    #[test]
    fn picard_example_orbit() {
        let s = line013();
        let t = toward_zero(&s);
        let tr =
            picard_iterate(&s, &t, 2, StopRule::new(10).unwrap(), PotentialSource::None).unwrap();
        assert_eq!(tr.points, vec![2, 1, 0, 0]);
        assert_eq!(tr.step_dist, vec![2.0, 1.0, 0.0]);
        assert_eq!(tr.fixed_point(), Some(0));
        assert!(tr.steps() <= 3);
    }

    #[test]
    fn identity_and_constant_maps() {
        let s = line013();
        let id = SingleValuedMap::identity(3);
        let tr =
            picard_iterate(&s, &id, 1, StopRule::new(5).unwrap(), PotentialSource::None).unwrap();
        assert_eq!(tr.fixed_point(), Some(1));
        assert_eq!(tr.steps(), 0);
        let c = SingleValuedMap::constant(3, 2);
        for x0 in 0..3 {
            let tr = picard_iterate(&s, &c, x0, StopRule::new(5).unwrap(), PotentialSource::None)
                .unwrap();
            assert_eq!(tr.fixed_point(), Some(2));
            assert!(tr.steps() <= 1);
        }
    }

    #[test]
    fn swap_stalls_and_max_iter_reported() {
        let s = FiniteMetricSpace::on_line(&[0.0, 1.0]).unwrap();
        let swap = SingleValuedMap::new(vec![1, 0], &s).unwrap();
        let tr = picard_iterate(
            &s,
            &swap,
            0,
            StopRule::new(10).unwrap(),
            PotentialSource::None,
        )
        .unwrap();
        assert_eq!(tr.termination, Termination::Stalled);
        let tr = picard_iterate(
            &s,
            &swap,
            0,
            StopRule::new(1).unwrap(),
            PotentialSource::None,
        )
        .unwrap();
        assert_eq!(tr.termination, Termination::MaxIter);
        assert!(brute_force_fixed_points(&swap).is_empty());
        assert!(StopRule::new(0).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let s = line013();
        assert_eq!(
            brute_force_fixed_points(&SingleValuedMap::identity(3)),
            vec![0, 1, 2]
        );
        assert_eq!(brute_force_fixed_points(&toward_zero(&s)), vec![0]);
    }

    #[test]
    fn telescoping_example() {
        let s = line013();
        let t = toward_zero(&s);
        let eta = Gauge::banach(0.5).unwrap();
        let tr = picard_iterate(
            &s,
            &t,
            2,
            StopRule::new(10).unwrap(),
            PotentialSource::Eta(&eta),
        )
        .unwrap();
        assert_eq!(tr.potential.as_deref(), Some(&[8.0, 4.0, 0.0][..]));
        assert_eq!(telescoping_bound(&tr, 0, 1).unwrap(), 4.0);
        assert_eq!(telescoping_bound(&tr, 1, 1).unwrap(), 0.0);
        assert!(telescoping_bound(&tr, 0, 2).unwrap() >= s.d(2, 0));
        assert!(telescoping_bound(&tr, 2, 1).is_err());
        let audit = telescoping_audit(&s, &tr).unwrap();
        assert_eq!(audit.violations, 0);
        assert_eq!(audit.pairs_checked, 3);

        let bare =
            picard_iterate(&s, &t, 2, StopRule::new(10).unwrap(), PotentialSource::None).unwrap();
        assert!(telescoping_bound(&bare, 0, 1).is_err());
    }

    #[test]
    fn table_potential_along_orbit() {
        let s = line013();
        let t = toward_zero(&s);
        let phi = [0.0, 2.0, 6.0];
        let tr = picard_iterate(
            &s,
            &t,
            2,
            StopRule::for_caristi(&s),
            PotentialSource::Table(&phi),
        )
        .unwrap();
        assert_eq!(tr.potential.as_deref(), Some(&[6.0, 2.0, 0.0, 0.0][..]));
        assert_eq!(tr.potential_kind, Some(PotentialKind::Point));
        assert_eq!(telescoping_audit(&s, &tr).unwrap().violations, 0);
    }

    #[test]
    fn uncertified_gauge_drops_potential() {
        let s = line013();
        let id_gauge = Gauge::from_fn(crate::gauge::GaugeKind::EtaContraction, "t", |t| t);
        let t = toward_zero(&s);
        let tr = picard_iterate(
            &s,
            &t,
            2,
            StopRule::new(10).unwrap(),
            PotentialSource::Eta(&id_gauge),
        )
        .unwrap();
        assert!(tr.potential.is_none());
        assert_eq!(tr.notes.len(), 1);
    }

    #[test]
    fn multivalued_examples() {
        let s = line013();
        let theta = midpoint_gauge(&Gauge::banach(0.5).unwrap());

        let constant = MultiValuedMap::new(vec![PointSet::singleton(1); 3], &s).unwrap();
        let tr = multivalued_orbit(&s, &constant, 2, &theta, StopRule::new(10).unwrap()).unwrap();
        assert_eq!(tr.fixed_point(), Some(1));
        assert!(tr.steps() <= 1);

        let singles = MultiValuedMap::from(&toward_zero(&s));
        let tr = multivalued_orbit(&s, &singles, 2, &theta, StopRule::new(10).unwrap()).unwrap();
        assert_eq!(tr.points, vec![2, 1, 0, 0]);
        assert_eq!(tr.fixed_point(), Some(0));
        assert_eq!(tr.potential_non_increasing(), Some(true));

        let reflexive = MultiValuedMap::new(
            vec![
                PointSet::new([0, 2]).unwrap(),
                PointSet::new([0, 1]).unwrap(),
                PointSet::new([1, 2]).unwrap(),
            ],
            &s,
        )
        .unwrap();
        for x0 in 0..3 {
            let tr =
                multivalued_orbit(&s, &reflexive, x0, &theta, StopRule::new(10).unwrap()).unwrap();
            assert_eq!(tr.points, vec![x0, x0]);
            assert_eq!(tr.fixed_point(), Some(x0));
        }
    }

    #[test]
    fn selection_picks_nearest_lowest_index() {
        // points 0, 1, 2 on a line; T(1) = {0, 2} is equidistant from 1
        let s = FiniteMetricSpace::on_line(&[0.0, 1.0, 2.0]).unwrap();
        let t = MultiValuedMap::new(
            vec![
                PointSet::singleton(0),
                PointSet::new([2, 0]).unwrap(),
                PointSet::singleton(1),
            ],
            &s,
        )
        .unwrap();
        let theta = Gauge::from_fn(crate::gauge::GaugeKind::EtaContraction, "t", |t| t);
        let tr = multivalued_orbit(&s, &t, 1, &theta, StopRule::new(10).unwrap()).unwrap();
        assert_eq!(tr.points, vec![1, 0, 0]);
    }

    #[test]
    fn selection_bound_violation_is_an_error() {
        let s = FiniteMetricSpace::on_line(&[0.0, 1.0, 3.0, 10.0]).unwrap();
        // orbit 10 -> 3 -> 1: the second step (2) exceeds theta(7) = 0.7
        let t = MultiValuedMap::new(
            vec![
                PointSet::singleton(0),
                PointSet::singleton(0),
                PointSet::singleton(1),
                PointSet::singleton(2),
            ],
            &s,
        )
        .unwrap();
        let theta = Gauge::banach(0.1).unwrap();
        let err = multivalued_orbit(&s, &t, 3, &theta, StopRule::new(10).unwrap()).unwrap_err();
        assert!(matches!(err, Error::SelectionBound { from: 2, to: 1, .. }));
    }
}
