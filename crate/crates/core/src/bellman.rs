//! Value iteration for the dynamic-programming functional equation
//!
//! ```text
//! p(x) = max_{y in D} { f(x, y) + agg(x, y, p(next(x, y))) }
//! ```
//!
//! over finite state and decision sets, with the sup metric on value
//! functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::gauge::{rho, PiecewiseLinear};

/// Slack for the sampled Lipschitz check of tabulated aggregators.
pub const LIPSCHITZ_TOL: f64 = 1e-12;

/// A tabulated aggregator `t -> table(t)` with its declared Lipschitz bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregatorTable {
    pub table: PiecewiseLinear,
    pub lipschitz: f64,
}

/// The aggregator `agg(x, y, t)`, restricted to forms with a checkable
/// Lipschitz structure in `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum Aggregator {
    /// `c[x][y]`
    Constant { c: Vec<Vec<f64>> },
    /// `c[x][y] + beta * t`
    Affine { c: Vec<Vec<f64>>, beta: f64 },
    /// `tables[x][y](t)`
    Tabulated { tables: Vec<Vec<AggregatorTable>> },
}

impl Aggregator {
    #[inline]
    pub fn eval(&self, x: usize, y: usize, t: f64) -> f64 {
        match self {
            Aggregator::Constant { c } => c[x][y],
            Aggregator::Affine { c, beta } => c[x][y] + beta * t,
            Aggregator::Tabulated { tables } => tables[x][y].table.eval(t),
        }
    }

    /// Lipschitz constant in `t` (declared, for tables).
    pub fn lipschitz(&self) -> f64 {
        match self {
            Aggregator::Constant { .. } => 0.0,
            Aggregator::Affine { beta, .. } => beta.abs(),
            Aggregator::Tabulated { tables } => tables
                .iter()
                .flatten()
                .map(|t| t.lipschitz)
                .fold(0.0, f64::max),
        }
    }

    pub fn form(&self) -> &'static str {
        match self {
            Aggregator::Constant { .. } => "constant",
            Aggregator::Affine { .. } => "affine",
            Aggregator::Tabulated { .. } => "tabulated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellmanProblem {
    pub states: Vec<String>,
    pub decisions: Vec<String>,
    pub reward: Vec<Vec<f64>>,
    pub transition: Vec<Vec<usize>>,
    pub aggregator: Aggregator,
}

fn check_table<T>(name: &str, rows: &[Vec<T>], w: usize, d: usize) -> Result<()> {
    if rows.len() != w {
        return invalid(format!(
            "{name} has {} rows, expected {w} (one per state)",
            rows.len()
        ));
    }
    if let Some(x) = rows.iter().position(|r| r.len() != d) {
        return invalid(format!(
            "{name} row {x} has {} entries, expected {d} (one per decision)",
            rows[x].len()
        ));
    }
    Ok(())
}

fn check_finite(name: &str, rows: &[Vec<f64>]) -> Result<()> {
    for (x, row) in rows.iter().enumerate() {
        if let Some(y) = row.iter().position(|v| !v.is_finite()) {
            return invalid(format!("{name}[{x}][{y}] is not finite"));
        }
    }
    Ok(())
}

impl BellmanProblem {
    /// Validates dimensions, finiteness and transition indices. A
    /// non-contractive aggregator (`|beta| >= 1`) is accepted here and
    /// surfaces as a failing certificate instead.
    pub fn new(
        states: Vec<String>,
        decisions: Vec<String>,
        reward: Vec<Vec<f64>>,
        transition: Vec<Vec<usize>>,
        aggregator: Aggregator,
    ) -> Result<Self> {
        let (w, d) = (states.len(), decisions.len());
        if w == 0 || d == 0 {
            return invalid("need at least one state and one decision");
        }
        check_table("reward", &reward, w, d)?;
        check_finite("reward", &reward)?;
        check_table("transition", &transition, w, d)?;
        for (x, row) in transition.iter().enumerate() {
            if let Some(y) = row.iter().position(|&s| s >= w) {
                return invalid(format!(
                    "transition[{x}][{y}] = {} is not a state index (< {w})",
                    row[y]
                ));
            }
        }
        match &aggregator {
            Aggregator::Constant { c } => {
                check_table("aggregator c", c, w, d)?;
                check_finite("aggregator c", c)?;
            }
            Aggregator::Affine { c, beta } => {
                check_table("aggregator c", c, w, d)?;
                check_finite("aggregator c", c)?;
                if !beta.is_finite() {
                    return invalid("aggregator beta is not finite");
                }
            }
            Aggregator::Tabulated { tables } => {
                check_table("aggregator tables", tables, w, d)?;
                for (x, row) in tables.iter().enumerate() {
                    for (y, t) in row.iter().enumerate() {
                        if !(t.lipschitz >= 0.0 && t.lipschitz.is_finite()) {
                            return invalid(format!(
                                "aggregator table ({x}, {y}) has an invalid Lipschitz bound"
                            ));
                        }
                        let actual = t.table.lipschitz();
                        if actual > t.lipschitz + LIPSCHITZ_TOL {
                            return invalid(format!(
                                "aggregator table ({x}, {y}) has slope {actual} above its declared bound {}",
                                t.lipschitz
                            ));
                        }
                    }
                }
            }
        }
        Ok(Self {
            states,
            decisions,
            reward,
            transition,
            aggregator,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_decisions(&self) -> usize {
        self.decisions.len()
    }

    /// The Banach constant of the operator when it is below 1.
    pub fn contraction_modulus(&self) -> Option<f64> {
        let l = self.aggregator.lipschitz();
        (l < 1.0).then_some(l)
    }
}

/// A bounded value function over the states, in state order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ValueFunction(Vec<f64>);

impl ValueFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("value at state {i} is not finite"));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `sup_x |h(x)|`
    pub fn norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `d(h, k) = sup_x |h(x) - k(x)|`
pub fn sup_metric(h: &ValueFunction, k: &ValueFunction) -> Result<f64> {
    if h.len() != k.len() {
        return invalid(format!(
            "value functions have lengths {} and {}",
            h.len(),
            k.len()
        ));
    }
    Ok(h.0
        .iter()
        .zip(&k.0)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// `T(h)(x) = max_y { f(x,y) + agg(x, y, h(next(x,y))) }`.
pub fn bellman_operator(problem: &BellmanProblem, h: &ValueFunction) -> Result<ValueFunction> {
    if h.len() != problem.num_states() {
        return invalid(format!(
            "value function has {} entries for {} states",
            h.len(),
            problem.num_states()
        ));
    }
    let mut out = Vec::with_capacity(h.len());
    for x in 0..problem.num_states() {
        let mut best = f64::NEG_INFINITY;
        for y in 0..problem.num_decisions() {
            let next = problem.transition[x][y];
            let v = problem.reward[x][y] + problem.aggregator.eval(x, y, h.0[next]);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    state: x,
                    decision: y,
                });
            }
            best = best.max(v);
        }
        out.push(best);
    }
    Ok(ValueFunction(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellmanCondition {
    /// `|agg(x,y,h) - agg(x,y,k)| <= rho(d(h,k))`
    StrictRho,
    /// `|agg(x,y,a) - agg(x,y,b)| <= beta |a - b|`, `beta < 1`
    BanachBeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    Sampled,
}

/// A pair of value functions at which an aggregator bound fails, evaluated at
/// `(state, decision)` through the transition target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellmanWitness {
    pub state: usize,
    pub decision: usize,
    pub h: ValueFunction,
    pub k: ValueFunction,
    pub distance: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl BellmanWitness {
    fn lhs_of(
        problem: &BellmanProblem,
        x: usize,
        y: usize,
        h: &ValueFunction,
        k: &ValueFunction,
    ) -> f64 {
        let next = problem.transition[x][y];
        (problem.aggregator.eval(x, y, h.0[next]) - problem.aggregator.eval(x, y, k.0[next])).abs()
    }

    /// Re-evaluates the bound for `condition`; `true` when the violation
    /// reproduces.
    pub fn recheck(
        &self,
        problem: &BellmanProblem,
        condition: BellmanCondition,
        beta: f64,
    ) -> bool {
        let lhs = Self::lhs_of(problem, self.state, self.decision, &self.h, &self.k);
        let rhs = match condition {
            BellmanCondition::StrictRho => rho(sup_metric(&self.h, &self.k).unwrap_or(f64::NAN)),
            BellmanCondition::BanachBeta => {
                let next = problem.transition[self.state][self.decision];
                beta * (self.h.0[next] - self.k.0[next]).abs()
            }
        };
        lhs == self.lhs && !(lhs <= rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionVerdict {
    pub condition: BellmanCondition,
    pub passed: bool,
    pub method: Method,
    pub samples_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BellmanWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellmanCertificate {
    pub aggregator: &'static str,
    pub seed: u64,
    pub strict_rho: ConditionVerdict,
    pub banach_beta: ConditionVerdict,
    /// The strongest condition that passed.
    pub certified: Option<BellmanCondition>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn sample_pairs(
    problem: &BellmanProblem,
    count: usize,
    seed: u64,
) -> Vec<(ValueFunction, ValueFunction)> {
    let w = problem.num_states();
    let mut pairs = Vec::with_capacity(count + 4);
    // constant pairs probe both branches of rho deterministically
    let mut offsets = vec![0.1, 0.5, 2.0];
    if let Aggregator::Affine { beta, .. } = problem.aggregator {
        if beta != 0.0 && beta.abs() < 0.1 {
            offsets.insert(0, beta.abs());
        }
    }
    for eps in offsets {
        pairs.push((ValueFunction::zeros(w), ValueFunction(vec![eps; w])));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let h: Vec<f64> = (0..w).map(|_| rng.random_range(-10.0..10.0)).collect();
        let scale = 10f64.powf(rng.random_range(-3.0..1.0));
        let k: Vec<f64> = h
            .iter()
            .map(|v| v + scale * rng.random_range(-1.0..1.0))
            .collect();
        pairs.push((ValueFunction(h), ValueFunction(k)));
    }
    pairs
}

fn first_violation(
    problem: &BellmanProblem,
    pairs: &[(ValueFunction, ValueFunction)],
    rhs: impl Fn(f64, f64, f64) -> f64,
) -> Option<BellmanWitness> {
    for (h, k) in pairs {
        let dist = sup_metric(h, k).expect("equal lengths");
        for x in 0..problem.num_states() {
            for y in 0..problem.num_decisions() {
                let next = problem.transition[x][y];
                let lhs = BellmanWitness::lhs_of(problem, x, y, h, k);
                let bound = rhs(dist, h.0[next], k.0[next]);
                if !(lhs <= bound) {
                    return Some(BellmanWitness {
                        state: x,
                        decision: y,
                        h: h.clone(),
                        k: k.clone(),
                        distance: dist,
                        lhs,
                        rhs: bound,
                    });
                }
            }
        }
    }
    None
}

/// Checks the aggregator against the strict `rho` bound and against a
/// Banach-style Lipschitz bound, reporting both.
///
/// The strict bound holds for all bounded `h, k` only when the aggregator
/// ignores its last argument; affine and constant forms are decided
/// analytically, tables by sampling. Sampling is seeded and reproducible.
pub fn certify_bellman(
    problem: &BellmanProblem,
    sample_count: usize,
    seed: u64,
) -> Result<BellmanCertificate> {
    if sample_count == 0 {
        return invalid("sample_count must be at least 1");
    }
    let pairs = sample_pairs(problem, sample_count, seed);
    let mut notes = Vec::new();

    let rho_witness = first_violation(problem, &pairs, |dist, _, _| rho(dist));
    let (rho_pass, rho_method) = match problem.aggregator {
        Aggregator::Constant { .. } => (true, Method::Analytic),
        Aggregator::Affine { beta, .. } => {
            if beta != 0.0 {
                notes.push(
                    "strict rho bound forces the aggregator to be constant in t; \
                     an affine form with beta != 0 cannot satisfy it"
                        .to_string(),
                );
            }
            (beta == 0.0, Method::Analytic)
        }
        Aggregator::Tabulated { .. } => (rho_witness.is_none(), Method::Sampled),
    };
    let strict_rho = ConditionVerdict {
        condition: BellmanCondition::StrictRho,
        passed: rho_pass,
        method: rho_method,
        samples_checked: pairs.len(),
        beta: None,
        witness: if rho_pass { None } else { rho_witness },
    };

    let lipschitz = problem.aggregator.lipschitz();
    let contractive = lipschitz < 1.0;
    // a non-contractive modulus is refuted against beta = 1
    let beta_for_check = if contractive { lipschitz } else { 1.0 };
    // rounding in the aggregator scales with the magnitude of its arguments
    let bound = |_: f64, a: f64, b: f64| {
        beta_for_check * (a - b).abs() + LIPSCHITZ_TOL * (1.0 + a.abs() + b.abs())
    };
    let mut beta_witness = first_violation(problem, &pairs, bound);
    if !contractive && beta_witness.is_none() {
        // non-expansive forms attain |a - b| exactly; exhibit that pair
        let w = problem.num_states();
        beta_witness = first_violation(
            problem,
            &[(ValueFunction::zeros(w), ValueFunction(vec![1.0; w]))],
            |_, a, b| (a - b).abs() * (1.0 - f64::EPSILON),
        );
    }
    let method = match problem.aggregator {
        Aggregator::Tabulated { .. } => Method::Sampled,
        _ => Method::Analytic,
    };
    let beta_pass = contractive && beta_witness.is_none();
    let banach_beta = ConditionVerdict {
        condition: BellmanCondition::BanachBeta,
        passed: beta_pass,
        method,
        samples_checked: pairs.len(),
        beta: Some(lipschitz),
        witness: if beta_pass { None } else { beta_witness },
    };

    let certified = if strict_rho.passed {
        Some(BellmanCondition::StrictRho)
    } else if banach_beta.passed {
        Some(BellmanCondition::BanachBeta)
    } else {
        None
    };
    Ok(BellmanCertificate {
        aggregator: problem.aggregator.form(),
        seed,
        strict_rho,
        banach_beta,
        certified,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveTrace {
    /// `d(h_{n+1}, h_n)` per iteration.
    pub deltas: Vec<f64>,
    /// `d(h*, T h*)`, recomputed after the loop.
    pub residual: f64,
    pub residual_bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub beta: f64,
}

/// Value iteration from `h0` until the successive delta is at most `tol` or
/// `max_iter` applications of the operator have been made.
pub fn solve_bellman(
    problem: &BellmanProblem,
    h0: &ValueFunction,
    tol: f64,
    max_iter: usize,
) -> Result<(ValueFunction, SolveTrace)> {
    if !(tol > 0.0) || !tol.is_finite() {
        return invalid(format!(
            "tolerance must be a positive finite real, got {tol}"
        ));
    }
    let Some(beta) = problem.contraction_modulus() else {
        return Err(Error::Precondition(format!(
            "aggregator Lipschitz constant {} is not below 1",
            problem.aggregator.lipschitz()
        )));
    };
    let mut h = h0.clone();
    // validates the length of h0
    let mut next = bellman_operator(problem, &h)?;
    let mut deltas = Vec::new();
    let mut converged = false;
    for _ in 0..max_iter {
        let delta = sup_metric(&next, &h)?;
        deltas.push(delta);
        h = next;
        next = bellman_operator(problem, &h)?;
        if delta <= tol {
            converged = true;
            break;
        }
    }
    let residual = sup_metric(&h, &next)?;
    let trace = SolveTrace {
        iterations: deltas.len(),
        deltas,
        residual,
        residual_bound: tol * (1.0 + beta) / (1.0 - beta),
        converged,
        beta,
    };
    Ok((h, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(reward: f64, agg: Aggregator) -> BellmanProblem {
        BellmanProblem::new(
            vec!["s".into()],
            vec!["a".into()],
            vec![vec![reward]],
            vec![vec![0]],
            agg,
        )
        .unwrap()
    }

    fn affine1(beta: f64) -> Aggregator {
        Aggregator::Affine {
            c: vec![vec![0.0]],
            beta,
        }
    }

    fn vf(v: &[f64]) -> ValueFunction {
        ValueFunction::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sup_metric_examples() {
        assert_eq!(sup_metric(&vf(&[1.0, 2.0]), &vf(&[1.0, 2.0])).unwrap(), 0.0);
        assert_eq!(sup_metric(&vf(&[0.0, 1.0]), &vf(&[0.5, 0.0])).unwrap(), 1.0);
        assert_eq!(sup_metric(&vf(&[3.0]), &vf(&[-1.5])).unwrap(), 4.5);
        assert!(sup_metric(&vf(&[0.0]), &vf(&[0.0, 1.0])).is_err());
        assert!(ValueFunction::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn operator_examples() {
        let p = single(3.0, Aggregator::Constant { c: vec![vec![0.0]] });
        assert_eq!(bellman_operator(&p, &vf(&[42.0])).unwrap().values(), &[3.0]);

        let p = single(1.0, affine1(0.5));
        let h1 = bellman_operator(&p, &vf(&[0.0])).unwrap();
        assert_eq!(h1.values(), &[1.0]);
        assert_eq!(bellman_operator(&p, &h1).unwrap().values(), &[1.5]);

        let p = BellmanProblem::new(
            vec!["s".into()],
            vec!["a".into(), "b".into()],
            vec![vec![2.0, 5.0]],
            vec![vec![0, 0]],
            Aggregator::Constant {
                c: vec![vec![0.0, 0.0]],
            },
        )
        .unwrap();
        assert_eq!(bellman_operator(&p, &vf(&[0.0])).unwrap().values(), &[5.0]);
    }

    #[test]
    fn overflow_is_reported_with_location() {
        let p = single(f64::MAX, affine1(0.5));
        let err = bellman_operator(&p, &vf(&[f64::MAX])).unwrap_err();
        assert_eq!(
            err,
            Error::NonFinite {
                state: 0,
                decision: 0
            }
        );
    }

    #[test]
    fn problem_validation() {
        let bad_tr = BellmanProblem::new(
            vec!["s".into()],
            vec!["a".into()],
            vec![vec![0.0]],
            vec![vec![1]],
            affine1(0.5),
        );
        assert!(bad_tr.is_err());
        let bad_shape = BellmanProblem::new(
            vec!["s".into()],
            vec!["a".into()],
            vec![vec![0.0, 1.0]],
            vec![vec![0]],
            affine1(0.5),
        );
        assert!(bad_shape.is_err());
        let steep = AggregatorTable {
            table: PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 2.0)]).unwrap(),
            lipschitz: 0.5,
        };
        let bad_table = BellmanProblem::new(
            vec!["s".into()],
            vec!["a".into()],
            vec![vec![0.0]],
            vec![vec![0]],
            Aggregator::Tabulated {
                tables: vec![vec![steep]],
            },
        );
        assert!(bad_table.is_err());
    }

    #[test]
    fn constant_aggregator_is_strict_rho() {
        let p = single(1.0, Aggregator::Constant { c: vec![vec![0.3]] });
        let c = certify_bellman(&p, 16, 7).unwrap();
        assert!(c.strict_rho.passed);
        assert_eq!(c.certified, Some(BellmanCondition::StrictRho));
    }

    #[test]
    fn half_affine_fails_strict_passes_banach() {
        let p = single(1.0, affine1(0.5));
        let c = certify_bellman(&p, 16, 7).unwrap();
        assert!(!c.strict_rho.passed);
        let w = c.strict_rho.witness.as_ref().unwrap();
        // constant pair 0 vs 0.1: 0.5 * 0.1 = 0.05 > 0.1^2 / 2 = 0.005
        assert_eq!(w.distance, 0.1);
        assert_eq!(w.rhs, rho(0.1));
        assert!(w.lhs > w.rhs);
        assert!(w.recheck(&p, BellmanCondition::StrictRho, 0.5));
        assert!(c.banach_beta.passed);
        assert_eq!(c.banach_beta.beta, Some(0.5));
        assert_eq!(c.certified, Some(BellmanCondition::BanachBeta));
        assert_eq!(certify_bellman(&p, 16, 7).unwrap(), c);
    }

    #[test]
    fn tiny_beta_still_gets_a_witness() {
        let p = single(1.0, affine1(1e-6));
        let c = certify_bellman(&p, 4, 1).unwrap();
        assert!(!c.strict_rho.passed);
        assert!(c.strict_rho.witness.as_ref().unwrap().recheck(
            &p,
            BellmanCondition::StrictRho,
            0.0
        ));
    }

    #[test]
    fn identity_aggregator_fails_both() {
        let p = single(1.0, affine1(1.0));
        let c = certify_bellman(&p, 16, 7).unwrap();
        assert!(!c.strict_rho.passed);
        assert!(!c.banach_beta.passed);
        assert!(c.banach_beta.witness.is_some());
        assert_eq!(c.certified, None);
        assert!(matches!(
            solve_bellman(&p, &vf(&[0.0]), 1e-6, 10),
            Err(Error::Precondition(_))
        ));
        assert!(certify_bellman(&p, 0, 7).is_err());
    }

    #[test]
    fn solve_examples() {
        let p = single(1.0, affine1(0.5));
        let (h, tr) = solve_bellman(&p, &vf(&[0.0]), 1e-10, 1000).unwrap();
        assert!((h.values()[0] - 2.0).abs() <= 1e-10);
        assert!(tr.converged);
        assert!(tr.residual <= tr.residual_bound);

        let p = BellmanProblem::new(
            vec!["s".into(), "t".into()],
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 4.0], vec![-2.0, -3.0]],
            vec![vec![1, 0], vec![0, 0]],
            Aggregator::Constant {
                c: vec![vec![0.0; 2]; 2],
            },
        )
        .unwrap();
        let (h, tr) = solve_bellman(&p, &vf(&[9.0, 9.0]), 1e-12, 100).unwrap();
        assert_eq!(h.values(), &[4.0, -2.0]);
        assert!(tr.iterations <= 2);

        let p = BellmanProblem::new(
            vec!["s".into(), "t".into()],
            vec!["a".into()],
            vec![vec![0.0], vec![0.0]],
            vec![vec![1], vec![0]],
            Aggregator::Affine {
                c: vec![vec![0.0]; 2],
                beta: 0.5,
            },
        )
        .unwrap();
        let (h, _) = solve_bellman(&p, &vf(&[5.0, -3.0]), 1e-12, 1000).unwrap();
        assert!(h.norm() <= 1e-11);
    }

    #[test]
    fn slow_contraction_does_not_converge_in_ten_steps() {
        let p = single(1.0, affine1(0.999));
        let (_, tr) = solve_bellman(&p, &vf(&[0.0]), 1e-10, 10).unwrap();
        assert!(!tr.converged);
        assert_eq!(tr.iterations, 10);
        assert!(solve_bellman(&p, &vf(&[0.0]), 0.0, 10).is_err());
    }
}
