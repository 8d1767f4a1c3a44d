//! Randomized falsification sweeps over small instances.
//!
//! Every sweep is driven by a single seed, so a report is reproducible
//! byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bellman::{
    certify_bellman, solve_bellman, Aggregator, BellmanCondition, BellmanProblem, ValueFunction,
};
use crate::certify::{certify_map, Certificate, Condition, Evidence};
use crate::error::{Error, Result};
use crate::gauge::midpoint_gauge;
use crate::gauge::{default_grid, mt_to_gauge, weak_to_gauge, Formula, Gauge, GaugeKind};
use crate::iterate::{
    brute_force_fixed_points, multivalued_orbit, picard_iterate, telescoping_audit, IterationTrace,
    PotentialSource, StopRule, Termination,
};
use crate::metric::{hausdorff_distance, FiniteMetricSpace, PointSet, SingleValuedMap};
use crate::sample::{
    descent_potential, random_affine_problem, random_map, random_multimap, random_potential,
    random_space, random_subset, union_map, MapFamily,
};

pub const DEFAULT_SEED: u64 = 20_240_901;

/// Tolerance for the Hausdorff symmetry and triangle checks.
pub const HAUSDORFF_TOL: f64 = 1e-12;
/// Slack for the geometric decay of value-iteration deltas.
pub const DECAY_TOL: f64 = 1e-12;
pub const RESIDUAL_MAX: f64 = 1e-8;
pub const CLOSED_FORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestConfig {
    pub seed: u64,
    pub spaces: usize,
    pub min_points: usize,
    pub max_points: usize,
    pub maps_per_space: usize,
    pub alpha: f64,
    pub multi_maps: usize,
    pub hausdorff_pairs: usize,
    pub hausdorff_triples: usize,
    pub bellman_problems: usize,
    pub bellman_max_size: usize,
    pub bellman_max_beta: f64,
    pub bellman_tol: f64,
    pub bellman_max_iter: usize,
    pub bellman_samples: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            spaces: 200,
            min_points: 3,
            max_points: 12,
            maps_per_space: 50,
            alpha: 0.9,
            multi_maps: 100,
            hausdorff_pairs: 1000,
            hausdorff_triples: 1000,
            bellman_problems: 50,
            bellman_max_size: 20,
            bellman_max_beta: 0.9,
            bellman_tol: 1e-10,
            bellman_max_iter: 10_000,
            bellman_samples: 64,
        }
    }
}

impl SelftestConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Outcome of one criterion: `checked` counts the individual assertions made,
/// `instances` the certified objects they were made on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    pub checked: usize,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<String>,
}

impl CriterionResult {
    fn new(id: u32, name: &str) -> Self {
        Self {
            id,
            name: name.to_string(),
            passed: true,
            instances: 0,
            checked: 0,
            violations: 0,
            first_violation: None,
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(describe());
            }
        }
    }

    fn tally(&mut self, checks: usize, violations: usize, describe: impl FnOnce() -> String) {
        self.checked += checks;
        self.violations += violations;
        if violations > 0 && self.first_violation.is_none() {
            self.first_violation = Some(describe());
        }
    }

    fn finish(mut self) -> Self {
        // a criterion with nothing to check has not been exercised
        self.passed = self.violations == 0 && self.checked > 0;
        self
    }

    /// `PASS`/`FAIL` summary line.
    pub fn line(&self) -> String {
        format!(
            "criterion {} {}: {} ({} instances, {} checks, {} violations)",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.instances,
            self.checked,
            self.violations
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub config: SelftestConfig,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl SelftestReport {
    pub fn criterion(&self, id: u32) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.id == id)
    }
}

/// Gauges shared by every space in the map sweep.
struct SweepGauges {
    banach: Gauge,
    eta: Gauge,
    weak_theta: Gauge,
    mt: Gauge,
}

impl SweepGauges {
    fn new(alpha: f64) -> Result<Self> {
        Ok(Self {
            banach: Gauge::banach(alpha)?,
            eta: Gauge::with_formula(GaugeKind::EtaContraction, Formula::Linear { slope: alpha })?,
            weak_theta: Gauge::with_formula(
                GaugeKind::WeakTheta,
                Formula::Saturating { scale: 0.1 },
            )?,
            mt: Gauge::with_formula(
                GaugeKind::MizoguchiTakahashi,
                Formula::Saturating { scale: 0.95 },
            )?,
        })
    }
}

struct MapSweep {
    banach: CriterionResult,
    caristi: CriterionResult,
    telescoping: CriterionResult,
    reduction: CriterionResult,
    meir_keeler: CriterionResult,
}

fn describe_trace(space_id: usize, map: &SingleValuedMap, trace: &IterationTrace) -> String {
    format!(
        "space {space_id}, map {:?}, orbit {:?} ({:?})",
        map.images(),
        trace.points,
        trace.termination
    )
}

fn audit_into(
    result: &mut CriterionResult,
    space: &FiniteMetricSpace,
    trace: &IterationTrace,
    context: impl Fn() -> String,
) -> Result<()> {
    if trace.potential.is_none() {
        result.check(false, || format!("{}: no potential recorded", context()));
        return Ok(());
    }
    let audit = telescoping_audit(space, trace)?;
    result.tally(audit.pairs_checked, audit.violations, || {
        format!(
            "{}: {} telescoping violations, min slack {:?}",
            context(),
            audit.violations,
            audit.min_slack
        )
    });
    Ok(())
}

fn map_sweep(cfg: &SelftestConfig, rng: &mut ChaCha8Rng) -> Result<MapSweep> {
    let gauges = SweepGauges::new(cfg.alpha)?;
    let mut out = MapSweep {
        banach: CriterionResult::new(1, "banach oracle equivalence"),
        caristi: CriterionResult::new(2, "caristi finite descent"),
        telescoping: CriterionResult::new(3, "telescoping bound"),
        reduction: CriterionResult::new(5, "reduction consistency"),
        meir_keeler: CriterionResult::new(6, "meir-keeler derived delta"),
    };
    let families = [
        MapFamily::Constant,
        MapFamily::FewValued,
        MapFamily::Uniform,
    ];
    let mut multi_certified = 0usize;

    for space_id in 0..cfg.spaces {
        let n = rng.random_range(cfg.min_points..=cfg.max_points);
        let space = random_space(rng, n);
        let grid = default_grid(&space);
        let mut certified: Vec<SingleValuedMap> = Vec::new();

        for map_id in 0..cfg.maps_per_space {
            let family = families[map_id % families.len()];
            let map = random_map(rng, &space, family);
            let ctx = || format!("space {space_id}, map {:?}", map.images());

            // banach oracle, telescoping and meir-keeler
            let cert = certify_map(
                &space,
                &map,
                Condition::Banach,
                Evidence::Gauge(&gauges.banach),
            )?;
            if cert.passed() {
                out.banach.instances += 1;
                let oracle = brute_force_fixed_points(&map);
                for x0 in 0..n {
                    let trace = picard_iterate(
                        &space,
                        &map,
                        x0,
                        StopRule::new(n)?,
                        PotentialSource::Eta(&gauges.banach),
                    )?;
                    let fp = trace.fixed_point();
                    out.banach
                        .check(fp.is_some() && oracle == vec![fp.unwrap()], || {
                            format!(
                                "{}: oracle {oracle:?}",
                                describe_trace(space_id, &map, &trace)
                            )
                        });
                    out.telescoping.instances += 1;
                    audit_into(&mut out.telescoping, &space, &trace, || {
                        describe_trace(space_id, &map, &trace)
                    })?;
                }
                check_meir_keeler(
                    &mut out.meir_keeler,
                    &space,
                    &map,
                    &gauges.banach,
                    cfg.alpha,
                    &ctx,
                )?;
                certified.push(map.clone());
            }

            // caristi descent with a constructed and a uniform potential
            let mut potentials = vec![random_potential(rng, n, 20.0)];
            if let Some(phi) = descent_potential(rng, &space, &map, 0.5) {
                potentials.push(phi);
            }
            for phi in &potentials {
                let cert = certify_map(
                    &space,
                    &map,
                    Condition::Caristi,
                    Evidence::PointPotential(phi),
                )?;
                if !cert.passed() {
                    continue;
                }
                out.caristi.instances += 1;
                for x0 in 0..n {
                    let trace = picard_iterate(
                        &space,
                        &map,
                        x0,
                        StopRule::for_caristi(&space),
                        PotentialSource::Table(phi),
                    )?;
                    let reached = trace.termination == Termination::FixedPoint && trace.steps() < n;
                    out.caristi
                        .check(reached, || describe_trace(space_id, &map, &trace));
                    for k in 0..trace.steps() {
                        let (a, b) = (trace.points[k], trace.points[k + 1]);
                        out.caristi.check(phi[a] - phi[b] >= space.d(a, b), || {
                            format!(
                                "{}: step {k} drops phi by {} < {}",
                                describe_trace(space_id, &map, &trace),
                                phi[a] - phi[b],
                                space.d(a, b)
                            )
                        });
                    }
                    out.telescoping.instances += 1;
                    audit_into(&mut out.telescoping, &space, &trace, || {
                        describe_trace(space_id, &map, &trace)
                    })?;
                }
            }

            check_reductions(&mut out.reduction, &space, &map, &gauges, &grid, &ctx)?;
        }

        // set-valued maps certified against the eta gauge
        if multi_certified < cfg.multi_maps {
            let candidates = multi_candidates(rng, &space, &certified);
            for mv in candidates {
                if multi_certified >= cfg.multi_maps {
                    break;
                }
                let cert = certify_map(&space, &mv, Condition::Eta, Evidence::Gauge(&gauges.eta))?;
                if !cert.passed() {
                    continue;
                }
                multi_certified += 1;
                let theta = midpoint_gauge(&gauges.eta);
                let oracle = brute_force_fixed_points(&mv);
                for x0 in 0..n {
                    let ctx =
                        || format!("space {space_id}, multimap {:?}, start {x0}", mv.images());
                    match multivalued_orbit(&space, &mv, x0, &theta, StopRule::new(n)?) {
                        Ok(trace) => {
                            out.telescoping.instances += 1;
                            let fp = trace.fixed_point();
                            out.telescoping
                                .check(fp.is_some_and(|p| oracle.contains(&p)), || {
                                    format!(
                                        "{}: orbit {:?} ({:?})",
                                        ctx(),
                                        trace.points,
                                        trace.termination
                                    )
                                });
                            audit_into(&mut out.telescoping, &space, &trace, ctx)?;
                        }
                        Err(e @ Error::SelectionBound { .. }) => {
                            out.telescoping.check(false, || format!("{}: {e}", ctx()));
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    if multi_certified < cfg.multi_maps {
        out.telescoping.check(false, || {
            format!(
                "only {multi_certified} of {} set-valued maps certified",
                cfg.multi_maps
            )
        });
    }
    Ok(out)
}

fn multi_candidates(
    rng: &mut ChaCha8Rng,
    space: &FiniteMetricSpace,
    certified: &[SingleValuedMap],
) -> Vec<crate::metric::MultiValuedMap> {
    let mut out = Vec::new();
    if !certified.is_empty() {
        // unions of contractions contract in the Hausdorff metric
        let f = &certified[rng.random_range(0..certified.len())];
        let g = &certified[rng.random_range(0..certified.len())];
        out.push(union_map(space, f, g));
    }
    out.push(random_multimap(rng, space, 0.5));
    out
}

fn check_meir_keeler(
    result: &mut CriterionResult,
    space: &FiniteMetricSpace,
    map: &SingleValuedMap,
    banach: &Gauge,
    alpha: f64,
    ctx: &dyn Fn() -> String,
) -> Result<()> {
    result.instances += 1;
    let cert = certify_map(space, map, Condition::MeirKeeler, Evidence::Gauge(banach))?;
    result.check(cert.passed(), || {
        format!(
            "{}: meir-keeler certificate failed: {:?}",
            ctx(),
            cert.witness
        )
    });
    for w in &cert.meir_keeler {
        result.check(
            alpha * (w.epsilon + w.delta) < w.epsilon && w.delta > 0.0,
            || {
                format!(
                    "{}: window eps = {}, delta = {} violates alpha (eps + delta) < eps",
                    ctx(),
                    w.epsilon,
                    w.delta
                )
            },
        );
    }
    Ok(())
}

fn check_reductions(
    result: &mut CriterionResult,
    space: &FiniteMetricSpace,
    map: &SingleValuedMap,
    gauges: &SweepGauges,
    grid: &[f64],
    ctx: &dyn Fn() -> String,
) -> Result<()> {
    let implied = |cert: &Certificate| cert.passed();
    let weak = certify_map(
        space,
        map,
        Condition::Weak,
        Evidence::Gauge(&gauges.weak_theta),
    )?;
    if implied(&weak) {
        result.instances += 1;
        let eta = weak_to_gauge(&gauges.weak_theta, grid)?;
        let reduced = certify_map(space, map, Condition::Eta, Evidence::Gauge(&eta))?;
        result.check(reduced.passed(), || {
            format!(
                "{}: weak passes, reduced eta fails: {:?}",
                ctx(),
                reduced.witness
            )
        });
    }
    let mt = certify_map(
        space,
        map,
        Condition::MizoguchiTakahashi,
        Evidence::Gauge(&gauges.mt),
    )?;
    if implied(&mt) {
        result.instances += 1;
        let eta = mt_to_gauge(&gauges.mt, grid)?;
        let reduced = certify_map(space, map, Condition::Eta, Evidence::Gauge(&eta))?;
        result.check(reduced.passed(), || {
            format!(
                "{}: mizoguchi-takahashi passes, reduced eta fails: {:?}",
                ctx(),
                reduced.witness
            )
        });
    }
    Ok(())
}

/// Independent `max(max_a min_b d, max_b min_a d)`.
fn hausdorff_oracle(space: &FiniteMetricSpace, a: &PointSet, b: &PointSet) -> f64 {
    let directed = |p: &PointSet, q: &PointSet| {
        let mut worst = 0.0f64;
        for x in p.iter() {
            let mut best = f64::INFINITY;
            for y in q.iter() {
                best = best.min(space.d(x, y));
            }
            worst = worst.max(best);
        }
        worst
    };
    directed(a, b).max(directed(b, a))
}

fn hausdorff_sweep(cfg: &SelftestConfig, rng: &mut ChaCha8Rng) -> Result<CriterionResult> {
    let mut out = CriterionResult::new(4, "hausdorff oracle");
    for i in 0..cfg.hausdorff_pairs {
        let n = rng.random_range(1..=10);
        let space = random_space(rng, n);
        let density = rng.random_range(0.1..0.9);
        let a = random_subset(rng, n, density);
        let b = random_subset(rng, n, density);
        let h = hausdorff_distance(&space, &a, &b)?;
        let oracle = hausdorff_oracle(&space, &a, &b);
        out.instances += 1;
        out.check(h == oracle, || {
            format!(
                "pair {i}: H({:?}, {:?}) = {h}, oracle {oracle}",
                a.members(),
                b.members()
            )
        });
    }
    for i in 0..cfg.hausdorff_triples {
        let n = rng.random_range(1..=10);
        let space = random_space(rng, n);
        let density = rng.random_range(0.1..0.9);
        let [a, b, c] = [(); 3].map(|_| random_subset(rng, n, density));
        let ab = hausdorff_distance(&space, &a, &b)?;
        let ba = hausdorff_distance(&space, &b, &a)?;
        let bc = hausdorff_distance(&space, &b, &c)?;
        let ac = hausdorff_distance(&space, &a, &c)?;
        out.instances += 1;
        out.check((ab - ba).abs() <= HAUSDORFF_TOL, || {
            format!("triple {i}: H(a,b) = {ab} but H(b,a) = {ba}")
        });
        out.check(ac <= ab + bc + HAUSDORFF_TOL, || {
            format!("triple {i}: H(a,c) = {ac} > H(a,b) + H(b,c) = {}", ab + bc)
        });
    }
    Ok(out.finish())
}

fn single_state_affine(reward: f64, beta: f64) -> Result<BellmanProblem> {
    BellmanProblem::new(
        vec!["s".into()],
        vec!["a".into()],
        vec![vec![reward]],
        vec![vec![0]],
        Aggregator::Affine {
            c: vec![vec![0.0]],
            beta,
        },
    )
}

fn bellman_sweep(cfg: &SelftestConfig, rng: &mut ChaCha8Rng) -> Result<CriterionResult> {
    let mut out = CriterionResult::new(7, "bellman convergence");

    // closed form h* = f / (1 - beta)
    let p = single_state_affine(1.0, 0.5)?;
    let (h, trace) = solve_bellman(
        &p,
        &ValueFunction::zeros(1),
        cfg.bellman_tol,
        cfg.bellman_max_iter,
    )?;
    out.instances += 1;
    out.check(
        trace.converged && (h.values()[0] - 2.0).abs() <= CLOSED_FORM_TOL,
        || {
            format!(
                "single-state problem solved to {:?}, expected [2]",
                h.values()
            )
        },
    );

    let mut solved = 0;
    let mut attempts = 0;
    while solved < cfg.bellman_problems && attempts < 10 * cfg.bellman_problems.max(1) {
        attempts += 1;
        let p = random_affine_problem(
            rng,
            cfg.bellman_max_size,
            cfg.bellman_max_size,
            cfg.bellman_max_beta,
        );
        let cert = certify_bellman(&p, cfg.bellman_samples, rng.random())?;
        if cert.certified != Some(BellmanCondition::BanachBeta) {
            continue;
        }
        solved += 1;
        out.instances += 1;
        let beta = cert.banach_beta.beta.unwrap();
        let h0 = ValueFunction::new(
            (0..p.num_states())
                .map(|_| rng.random_range(-5.0..5.0))
                .collect(),
        )?;
        let (_, trace) = solve_bellman(&p, &h0, cfg.bellman_tol, cfg.bellman_max_iter)?;
        for (k, w) in trace.deltas.windows(2).enumerate() {
            out.check(w[1] <= beta * w[0] + DECAY_TOL, || {
                format!(
                    "problem {solved}: delta[{}] = {} > beta * delta[{k}] = {}",
                    k + 1,
                    w[1],
                    beta * w[0]
                )
            });
        }
        out.check(trace.converged && trace.residual <= RESIDUAL_MAX, || {
            format!(
                "problem {solved}: residual {} after {} iterations",
                trace.residual, trace.iterations
            )
        });
    }
    out.check(solved == cfg.bellman_problems, || {
        format!(
            "only {solved} of {} random problems certified",
            cfg.bellman_problems
        )
    });
    Ok(out.finish())
}

fn degeneracy_check(cfg: &SelftestConfig) -> Result<CriterionResult> {
    let mut out = CriterionResult::new(8, "strict rho degeneracy");
    let p = single_state_affine(1.0, 0.5)?;
    let cert = certify_bellman(&p, cfg.bellman_samples, cfg.seed)?;
    out.instances += 1;
    out.check(!cert.strict_rho.passed, || {
        "strict rho passed for agg(t) = 0.5 t".into()
    });
    let reproducible = cert
        .strict_rho
        .witness
        .as_ref()
        .is_some_and(|w| w.recheck(&p, BellmanCondition::StrictRho, 0.5));
    out.check(reproducible, || {
        "strict rho failure has no reproducible witness".into()
    });
    out.check(cert.banach_beta.passed, || {
        "banach beta failed for agg(t) = 0.5 t".into()
    });
    out.check(cert.certified == Some(BellmanCondition::BanachBeta), || {
        format!("certified condition is {:?}", cert.certified)
    });
    out.check(
        cert == certify_bellman(&p, cfg.bellman_samples, cfg.seed)?,
        || "certificate differs between identical runs".into(),
    );
    Ok(out.finish())
}

/// Runs criteria 1 to 8; the run-to-run determinism criterion needs two
/// reports and is checked by the caller.
pub fn run_selftest(cfg: &SelftestConfig) -> Result<SelftestReport> {
    if cfg.min_points == 0 || cfg.min_points > cfg.max_points {
        return Err(Error::InvalidInput(format!(
            "point range {}..={} is empty",
            cfg.min_points, cfg.max_points
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sweep = map_sweep(cfg, &mut rng)?;
    let hausdorff = hausdorff_sweep(cfg, &mut rng)?;
    let bellman = bellman_sweep(cfg, &mut rng)?;
    let degeneracy = degeneracy_check(cfg)?;
    let criteria = vec![
        sweep.banach.finish(),
        sweep.caristi.finish(),
        sweep.telescoping.finish(),
        hausdorff,
        sweep.reduction.finish(),
        sweep.meir_keeler.finish(),
        bellman,
        degeneracy,
    ];
    Ok(SelftestReport {
        seed: cfg.seed,
        config: cfg.clone(),
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SelftestConfig {
        SelftestConfig {
            seed,
            spaces: 6,
            maps_per_space: 12,
            multi_maps: 3,
            hausdorff_pairs: 30,
            hausdorff_triples: 30,
            bellman_problems: 4,
            bellman_max_size: 5,
            ..SelftestConfig::default()
        }
    }

    #[test]
    fn small_run_passes_and_repeats() {
        let a = run_selftest(&small(11)).unwrap();
        for c in &a.criteria {
            assert!(c.passed, "{}", c.line());
        }
        assert_eq!(a, run_selftest(&small(11)).unwrap());
    }

    #[test]
    fn oracle_agrees_on_a_hand_example() {
        let s = FiniteMetricSpace::on_line(&[0.0, 1.0, 3.0, 4.0]).unwrap();
        let a = PointSet::new([0, 1]).unwrap();
        let b = PointSet::new([2, 3]).unwrap();
        assert_eq!(hausdorff_oracle(&s, &a, &b), 3.0);
        assert_eq!(hausdorff_distance(&s, &a, &b).unwrap(), 3.0);
    }

    #[test]
    fn empty_point_range_is_rejected() {
        let cfg = SelftestConfig {
            min_points: 5,
            max_points: 4,
            ..SelftestConfig::default()
        };
        assert!(run_selftest(&cfg).is_err());
    }
}
