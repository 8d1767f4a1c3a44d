//! The `cfp` batch tool: every command reads one problem file and writes one
//! JSON report.
//!
//! Exit codes: 0 when the checked property holds, 1 when it fails
//! mathematically, 2 when the input cannot be used.

pub mod input;

use std::path::PathBuf;
use std::time::Instant;

use cfp_core::bellman::{certify_bellman, solve_bellman, BellmanProblem, ValueFunction};
use cfp_core::certify::{certify_map, Certificate, Condition, Evidence, MapRef};
use cfp_core::gauge::{default_grid, midpoint_gauge, mt_to_gauge, weak_to_gauge, Gauge, GaugeKind};
use cfp_core::iterate::{
    brute_force_fixed_points, multivalued_orbit, picard_iterate, telescoping_audit, IterationTrace,
    PotentialSource, StopRule, Termination,
};
use cfp_core::metric::{hausdorff_parts, FiniteMetricSpace, PointSet};
use cfp_core::selftest::{run_selftest, SelftestConfig, DEFAULT_SEED};
use cfp_core::Error;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use input::{InputError, Map, Potential, Problem};

pub const SCHEMA: &str = "cfp-1";
pub const DEFAULT_MAX_ITER: usize = 1000;
pub const DEFAULT_BELLMAN_MAX_ITER: usize = 10_000;
pub const DEFAULT_BELLMAN_TOL: f64 = 1e-10;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "cfp",
    version,
    about = "Fixed-point certificates on finite metric spaces"
)]
pub struct Cli {
    /// Problem file (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter", global = true)]
    pub max_iter: Option<usize>,
    /// Refuse to iterate maps that fail their certificate.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Check a contraction condition for a named map.
    Certify {
        #[arg(long)]
        map: String,
        #[arg(long)]
        condition: String,
        #[arg(long)]
        gauge: Option<String>,
        #[arg(long)]
        potential: Option<String>,
    },
    /// Iterate a named map from a start point.
    Iterate {
        #[arg(long)]
        map: String,
        #[arg(long)]
        start: String,
        #[arg(long)]
        gauge: Option<String>,
        #[arg(long)]
        potential: Option<String>,
    },
    /// Hausdorff distance between two labelled point sets.
    Hausdorff {
        /// Comma-separated labels.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Certify and solve the Bellman problem of the input file.
    Bellman {
        /// Comma-separated starting values, one per state (default zeros).
        #[arg(long)]
        h0: Option<String>,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Run the built-in randomized oracle suites.
    Selftest,
}

/// Result of one invocation: an exit code, the report, and a diagnostic line
/// for input errors.
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Value,
    pub diagnostic: Option<String>,
}

struct Failure {
    code: i32,
    error: InputError,
}

impl From<InputError> for Failure {
    fn from(error: InputError) -> Self {
        Failure {
            code: EXIT_INPUT,
            error,
        }
    }
}

fn input_error(location: &str, e: impl ToString) -> Failure {
    InputError::new(location, e.to_string()).into()
}

/// Errors from the core library: mathematical ones exit 1, the rest 2.
fn core_error(location: &str, e: Error) -> Failure {
    let code = match e {
        Error::SelectionBound { .. } | Error::NonFinite { .. } => EXIT_FAIL,
        _ => EXIT_INPUT,
    };
    Failure {
        code,
        error: InputError::new(location, e.to_string()),
    }
}

type Run = Result<(i32, Value), Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let started = Instant::now();
    let echo = serde_json::to_value(cli).expect("arguments serialize");
    let mut input_digest = Value::Null;

    let result = (|| -> Run {
        if let Command::Selftest = cli.command {
            return selftest(cli);
        }
        let path = cli
            .input
            .as_ref()
            .ok_or_else(|| input_error("arguments", "--input is required for this command"))?;
        let bytes = std::fs::read(path).map_err(|e| input_error(&path.display().to_string(), e))?;
        input_digest = json!({ "sha256": hex::encode(Sha256::digest(&bytes)) });
        let text =
            String::from_utf8(bytes).map_err(|e| input_error(&path.display().to_string(), e))?;
        let problem = input::parse(&text)?;
        dispatch(cli, &problem)
    })();

    let (exit_code, result, diagnostic) = match result {
        Ok((code, value)) => (code, value, None),
        Err(f) => {
            let line = format!("error: {}", f.error);
            let value =
                json!({ "error": { "location": f.error.location, "message": f.error.message } });
            (f.code, value, Some(line))
        }
    };
    let report = json!({
        "schema": SCHEMA,
        "command": echo,
        "input": input_digest,
        "exit_code": exit_code,
        "result": result,
        "timings": { "total_ms": started.elapsed().as_secs_f64() * 1e3 },
    });
    Outcome {
        exit_code,
        report,
        diagnostic,
    }
}

fn dispatch(cli: &Cli, problem: &Problem) -> Run {
    match &cli.command {
        Command::Certify {
            map,
            condition,
            gauge,
            potential,
        } => certify(
            problem,
            map,
            condition,
            gauge.as_deref(),
            potential.as_deref(),
        ),
        Command::Iterate {
            map,
            start,
            gauge,
            potential,
        } => iterate(
            cli,
            problem,
            map,
            start,
            gauge.as_deref(),
            potential.as_deref(),
        ),
        Command::Hausdorff { a, b } => hausdorff(problem, a, b),
        Command::Bellman { h0, samples } => bellman(cli, problem, h0.as_deref(), *samples),
        Command::Selftest => unreachable!("handled before reading input"),
    }
}

fn space_of(problem: &Problem) -> Result<&FiniteMetricSpace, Failure> {
    problem
        .space
        .as_ref()
        .ok_or_else(|| input_error("space", "the input file has no space"))
}

fn named<'a, T>(
    items: &'a std::collections::BTreeMap<String, T>,
    kind: &str,
    name: &str,
) -> Result<&'a T, Failure> {
    items.get(name).ok_or_else(|| {
        let known: Vec<&str> = items.keys().map(String::as_str).collect();
        input_error(
            &format!("--{kind}"),
            format!("no {kind} named {name:?} (known: {known:?})"),
        )
    })
}

fn map_ref(map: &Map) -> MapRef<'_> {
    match map {
        Map::Single(m) => MapRef::Single(m),
        Map::Multi(m) => MapRef::Multi(m),
    }
}

fn evidence<'a>(gauge: Option<&'a Gauge>, potential: Option<&'a Potential>) -> Evidence<'a> {
    match (gauge, potential) {
        (Some(g), _) => Evidence::Gauge(g),
        (None, Some(Potential::Point(p))) => Evidence::PointPotential(p),
        (None, Some(Potential::Pair(p))) => Evidence::PairPotential(p),
        (None, None) => Evidence::None,
    }
}

fn labelled_witness(space: &FiniteMetricSpace, cert: &Certificate) -> Value {
    let mut v = serde_json::to_value(cert).expect("certificate serializes");
    if let Some(w) = v.get_mut("witness").and_then(Value::as_object_mut) {
        for key in ["x", "y"] {
            if let Some(i) = w.get(key).and_then(Value::as_u64) {
                let label = space.label(i as usize).to_string();
                w.insert(format!("{key}_label"), Value::String(label));
            }
        }
    }
    v
}

fn certify(
    problem: &Problem,
    map: &str,
    condition: &str,
    gauge: Option<&str>,
    potential: Option<&str>,
) -> Run {
    let space = space_of(problem)?;
    let m = named(&problem.maps, "map", map)?;
    let condition: Condition = condition
        .parse()
        .map_err(|e: Error| input_error("--condition", e))?;
    if gauge.is_some() && potential.is_some() {
        return Err(input_error(
            "arguments",
            "give either --gauge or --potential, not both",
        ));
    }
    let g = gauge
        .map(|n| named(&problem.gauges, "gauge", n))
        .transpose()?;
    let p = potential
        .map(|n| named(&problem.potentials, "potential", n))
        .transpose()?;
    let cert = certify_map(space, map_ref(m), condition, evidence(g, p))
        .map_err(|e| core_error("certify", e))?;
    let code = if cert.passed() { EXIT_PASS } else { EXIT_FAIL };
    Ok((
        code,
        json!({ "map": map, "certificate": labelled_witness(space, &cert) }),
    ))
}

/// The condition a gauge of this kind is naturally certified against.
fn condition_for(kind: GaugeKind) -> Condition {
    match kind {
        GaugeKind::Banach => Condition::Banach,
        GaugeKind::WeakTheta => Condition::Weak,
        GaugeKind::MizoguchiTakahashi => Condition::MizoguchiTakahashi,
        GaugeKind::EtaContraction | GaugeKind::RhoSection3 | GaugeKind::Tabulated => Condition::Eta,
    }
}

/// The eta-type gauge whose midpoint drives the orbit potential.
fn eta_for(space: &FiniteMetricSpace, g: &Gauge) -> cfp_core::Result<Gauge> {
    let grid = default_grid(space);
    match g.kind() {
        GaugeKind::WeakTheta if !grid.is_empty() => weak_to_gauge(g, &grid),
        GaugeKind::MizoguchiTakahashi if !grid.is_empty() => mt_to_gauge(g, &grid),
        _ => Ok(g.clone()),
    }
}

fn labels(space: &FiniteMetricSpace, points: &[usize]) -> Vec<String> {
    points.iter().map(|&i| space.label(i).to_string()).collect()
}

fn iterate(
    cli: &Cli,
    problem: &Problem,
    map: &str,
    start: &str,
    gauge: Option<&str>,
    potential: Option<&str>,
) -> Run {
    let space = space_of(problem)?;
    let m = named(&problem.maps, "map", map)?;
    let x0 = space
        .index_of(start)
        .ok_or_else(|| input_error("--start", format!("unknown point label {start:?}")))?;
    if gauge.is_some() && potential.is_some() {
        return Err(input_error(
            "arguments",
            "give either --gauge or --potential, not both",
        ));
    }
    let g = gauge
        .map(|n| named(&problem.gauges, "gauge", n))
        .transpose()?;
    let p = potential
        .map(|n| named(&problem.potentials, "potential", n))
        .transpose()?;
    let max_iter = cli.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let mut stop = StopRule::new(max_iter).map_err(|e| core_error("--max-iter", e))?;
    let mut notes = Vec::new();

    let cert = match (g, p) {
        (Some(g), _) => Some(
            certify_map(
                space,
                map_ref(m),
                condition_for(g.kind()),
                Evidence::Gauge(g),
            )
            .map_err(|e| core_error("certify", e))?,
        ),
        (None, Some(pot)) => Some(
            certify_map(
                space,
                map_ref(m),
                Condition::Caristi,
                evidence(None, Some(pot)),
            )
            .map_err(|e| core_error("certify", e))?,
        ),
        (None, None) => None,
    };
    let certified = cert.as_ref().is_some_and(Certificate::passed);
    if cli.strict && !certified {
        let why = match &cert {
            None => "--strict needs a --gauge or --potential to certify against".to_string(),
            Some(c) => format!("map {map:?} fails the {} certificate", c.condition),
        };
        return Err(input_error("--strict", why));
    }
    if certified && p.is_some() && stop.max_iter > space.len() {
        stop = StopRule::for_caristi(space);
        notes.push(format!(
            "caristi-certified: max_iter capped at {}",
            space.len()
        ));
    }

    let eta = match g {
        Some(g) => match eta_for(space, g) {
            Ok(eta) => Some(eta),
            Err(e) if cli.strict => return Err(core_error("--gauge", e)),
            Err(e) => {
                notes.push(format!("no potential: {e}"));
                None
            }
        },
        None => None,
    };

    let trace: IterationTrace = match m {
        Map::Single(single) => {
            let source = match (&eta, p) {
                (Some(eta), _) => PotentialSource::Eta(eta),
                (None, Some(Potential::Point(phi))) => PotentialSource::Table(phi),
                _ => PotentialSource::None,
            };
            picard_iterate(space, single, x0, stop, source).map_err(|e| core_error("iterate", e))?
        }
        Map::Multi(multi) => {
            let Some(eta) = &eta else {
                return Err(input_error(
                    "--gauge",
                    "set-valued iteration needs an eta-type gauge",
                ));
            };
            let theta = midpoint_gauge(eta);
            match multivalued_orbit(space, multi, x0, &theta, stop) {
                Ok(t) => t,
                Err(e @ Error::SelectionBound { .. }) => {
                    let value = json!({
                        "map": map,
                        "start": start,
                        "certificate": cert.as_ref().map(|c| labelled_witness(space, c)),
                        "selection_failure": e.to_string(),
                    });
                    return Ok((EXIT_FAIL, value));
                }
                Err(e) => return Err(core_error("iterate", e)),
            }
        }
    };

    let audit = if trace.potential.is_some() && certified {
        Some(telescoping_audit(space, &trace).map_err(|e| core_error("telescoping", e))?)
    } else {
        None
    };
    if trace.termination == Termination::MaxIter {
        notes.push(format!(
            "no fixed point within {} iterations",
            stop.max_iter
        ));
    }
    let fixed = match m {
        Map::Single(s) => brute_force_fixed_points(s),
        Map::Multi(s) => brute_force_fixed_points(s),
    };
    notes.extend(trace.notes.iter().cloned());
    let value = json!({
        "map": map,
        "start": start,
        "certified": certified,
        "certificate": cert.as_ref().map(|c| labelled_witness(space, c)),
        "trace": trace,
        "point_labels": labels(space, &trace.points),
        "fixed_point": trace.fixed_point().map(|i| space.label(i).to_string()),
        "brute_force_fixed_points": labels(space, &fixed),
        "telescoping": audit,
        "notes": notes,
    });
    let code = if audit.is_some_and(|a| a.violations > 0) {
        EXIT_FAIL
    } else {
        EXIT_PASS
    };
    Ok((code, value))
}

fn parse_set(space: &FiniteMetricSpace, spec: &str, flag: &str) -> Result<PointSet, Failure> {
    let mut members = Vec::new();
    for label in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        members.push(
            space
                .index_of(label)
                .ok_or_else(|| input_error(flag, format!("unknown point label {label:?}")))?,
        );
    }
    PointSet::new(members).map_err(|_| input_error(flag, "point set is empty"))
}

fn hausdorff(problem: &Problem, a: &str, b: &str) -> Run {
    let space = space_of(problem)?;
    let sa = parse_set(space, a, "--a")?;
    let sb = parse_set(space, b, "--b")?;
    let parts = hausdorff_parts(space, &sa, &sb).map_err(|e| core_error("hausdorff", e))?;
    Ok((
        EXIT_PASS,
        json!({
            "a": labels(space, sa.members()),
            "b": labels(space, sb.members()),
            "distance": parts.distance,
            "a_to_b": parts.a_to_b,
            "b_to_a": parts.b_to_a,
        }),
    ))
}

fn parse_h0(problem: &BellmanProblem, spec: Option<&str>) -> Result<ValueFunction, Failure> {
    let Some(spec) = spec else {
        return Ok(ValueFunction::zeros(problem.num_states()));
    };
    let values = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| input_error("--h0", e))?;
    if values.len() != problem.num_states() {
        return Err(input_error(
            "--h0",
            format!(
                "{} values for {} states",
                values.len(),
                problem.num_states()
            ),
        ));
    }
    ValueFunction::new(values).map_err(|e| core_error("--h0", e))
}

fn bellman(cli: &Cli, problem: &Problem, h0: Option<&str>, samples: usize) -> Run {
    let bp = problem
        .bellman
        .as_ref()
        .ok_or_else(|| input_error("bellman", "the input file has no bellman problem"))?;
    let h0 = parse_h0(bp, h0)?;
    let tol = cli.tol.unwrap_or(DEFAULT_BELLMAN_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(input_error(
            "--tol",
            format!("tolerance must be positive, got {tol}"),
        ));
    }
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let cert = certify_bellman(bp, samples, seed).map_err(|e| core_error("--samples", e))?;
    if cert.certified.is_none() {
        return Ok((EXIT_FAIL, json!({ "certificate": cert })));
    }
    let max_iter = cli.max_iter.unwrap_or(DEFAULT_BELLMAN_MAX_ITER);
    let (h, trace) = solve_bellman(bp, &h0, tol, max_iter).map_err(|e| core_error("solve", e))?;
    let solution: serde_json::Map<String, Value> = bp
        .states
        .iter()
        .zip(h.values())
        .map(|(s, v)| (s.clone(), json!(v)))
        .collect();
    let code = if trace.converged {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    Ok((
        code,
        json!({
            "certificate": cert,
            "solution": h,
            "solution_by_state": solution,
            "trace": trace,
        }),
    ))
}

fn selftest(cli: &Cli) -> Run {
    let cfg = SelftestConfig::with_seed(cli.seed.unwrap_or(DEFAULT_SEED));
    let report = run_selftest(&cfg).map_err(|e| core_error("selftest", e))?;
    let code = if report.passed { EXIT_PASS } else { EXIT_FAIL };
    Ok((
        code,
        serde_json::to_value(&report).expect("report serializes"),
    ))
}
