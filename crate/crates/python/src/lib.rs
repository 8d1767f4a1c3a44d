use cfp_core::bellman::{Aggregator, BellmanProblem, ValueFunction};
use cfp_core::certify::{Condition, Evidence, MapRef};
use cfp_core::gauge::{Formula, GaugeKind, GaugeParams};
use cfp_core::iterate::{PotentialSource, StopRule};
use cfp_core::metric::{FiniteMetricSpace, MultiValuedMap, PointSet, SingleValuedMap};
use cfp_core::Error;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

fn err(e: Error) -> PyErr {
    match e {
        Error::SelectionBound { .. }
        | Error::NonFinite { .. }
        | Error::PotentialUndefined { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// A finite metric space with labelled points.
#[pyclass(name = "MetricSpace", module = "cfp", frozen)]
struct PyMetricSpace {
    inner: FiniteMetricSpace,
}

#[pymethods]
impl PyMetricSpace {
    #[new]
    #[pyo3(signature = (dist, labels=None))]
    fn new(dist: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> PyResult<Self> {
        let inner = match labels {
            Some(l) => FiniteMetricSpace::new(l, dist),
            None => FiniteMetricSpace::from_matrix(dist),
        }
        .map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn on_line(coords: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: FiniteMetricSpace::on_line(&coords).map_err(err)?,
        })
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn index(&self, label: &str) -> PyResult<usize> {
        self.inner
            .index_of(label)
            .ok_or_else(|| PyValueError::new_err(format!("unknown label {label:?}")))
    }

    fn distance(&self, i: usize, j: usize) -> PyResult<f64> {
        if i >= self.inner.len() || j >= self.inner.len() {
            return Err(PyValueError::new_err("point index out of range"));
        }
        Ok(self.inner.d(i, j))
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        self.inner.matrix().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("MetricSpace({} points)", self.inner.len())
    }
}

/// A comparison function with its declared class.
#[pyclass(name = "Gauge", module = "cfp", frozen)]
struct PyGauge {
    inner: cfp_core::gauge::Gauge,
}

#[pymethods]
impl PyGauge {
    /// `kind` is a class name such as "banach" or "weak-theta"; give one of
    /// `alpha`, `formula` (JSON such as '{"linear": {"slope": 0.5}}') or
    /// `table` (a list of (t, value) pairs).
    #[new]
    #[pyo3(signature = (kind, alpha=None, formula=None, table=None))]
    fn new(
        kind: &str,
        alpha: Option<f64>,
        formula: Option<&str>,
        table: Option<Vec<(f64, f64)>>,
    ) -> PyResult<Self> {
        let kind: GaugeKind = serde_json::from_value(Value::String(kind.to_string()))
            .map_err(|_| PyValueError::new_err(format!("unknown gauge kind {kind:?}")))?;
        let params = match (alpha, formula, table) {
            (None, None, None) => GaugeParams::None,
            (Some(a), None, None) => GaugeParams::Alpha(a),
            (None, Some(f), None) => GaugeParams::Formula(
                serde_json::from_str::<Formula>(f)
                    .map_err(|e| PyValueError::new_err(e.to_string()))?,
            ),
            (None, None, Some(t)) => GaugeParams::Table(t),
            _ => {
                return Err(PyValueError::new_err(
                    "give at most one of alpha, formula, table",
                ))
            }
        };
        Ok(Self {
            inner: cfp_core::gauge::make_gauge(kind, params).map_err(err)?,
        })
    }

    #[staticmethod]
    fn banach(alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: cfp_core::gauge::Gauge::banach(alpha).map_err(err)?,
        })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().name()
    }

    fn midpoint(&self) -> Self {
        Self {
            inner: cfp_core::gauge::midpoint_gauge(&self.inner),
        }
    }

    fn caristi_potential(&self, d: f64) -> PyResult<f64> {
        cfp_core::gauge::caristi_potential(&self.inner, d).map_err(err)
    }

    fn check<'py>(&self, py: Python<'py>, space: &PyMetricSpace) -> PyResult<Bound<'py, PyAny>> {
        dict(
            py,
            &cfp_core::certify::certify_gauge(&space.inner, &self.inner).map_err(err)?,
        )
    }

    fn __call__(&self, t: f64) -> f64 {
        self.inner.eval(t)
    }

    fn __repr__(&self) -> String {
        format!("Gauge({})", self.inner.describe())
    }
}

enum AnyMap {
    Single(SingleValuedMap),
    Multi(MultiValuedMap),
}

impl AnyMap {
    fn as_ref(&self) -> MapRef<'_> {
        match self {
            AnyMap::Single(m) => MapRef::Single(m),
            AnyMap::Multi(m) => MapRef::Multi(m),
        }
    }
}

/// A list of ints is a single-valued map, a list of lists a set-valued one.
fn read_map(space: &FiniteMetricSpace, images: &Bound<'_, PyAny>) -> PyResult<AnyMap> {
    if let Ok(single) = images.extract::<Vec<usize>>() {
        return Ok(AnyMap::Single(
            SingleValuedMap::new(single, space).map_err(err)?,
        ));
    }
    let sets: Vec<Vec<usize>> = images.extract()?;
    let sets = sets
        .into_iter()
        .map(PointSet::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    Ok(AnyMap::Multi(
        MultiValuedMap::new(sets, space).map_err(err)?,
    ))
}

fn point_set(members: Vec<usize>) -> PyResult<PointSet> {
    PointSet::new(members).map_err(err)
}

#[pyfunction]
fn check_metric_axioms<'py>(py: Python<'py>, dist: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyAny>> {
    dict(
        py,
        &cfp_core::metric::check_metric_axioms(&dist).map_err(err)?,
    )
}

#[pyfunction]
fn repair_triangle(dist: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    cfp_core::metric::repair_triangle(&dist).map_err(err)
}

#[pyfunction]
fn hausdorff_distance(space: &PyMetricSpace, a: Vec<usize>, b: Vec<usize>) -> PyResult<f64> {
    cfp_core::metric::hausdorff_distance(&space.inner, &point_set(a)?, &point_set(b)?).map_err(err)
}

#[pyfunction]
fn point_to_set_distance(space: &PyMetricSpace, x: usize, a: Vec<usize>) -> PyResult<f64> {
    cfp_core::metric::point_to_set_distance(&space.inner, x, &point_set(a)?).map_err(err)
}

/// Certificate for `condition` as a dict; `potential` is a list (one value
/// per point) or a square table.
#[pyfunction]
#[pyo3(signature = (space, images, condition, gauge=None, potential=None))]
fn certify<'py>(
    py: Python<'py>,
    space: &PyMetricSpace,
    images: &Bound<'py, PyAny>,
    condition: &str,
    gauge: Option<&PyGauge>,
    potential: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let map = read_map(&space.inner, images)?;
    let condition: Condition = condition.parse().map_err(err)?;
    let point: Option<Vec<f64>>;
    let pair: Option<Vec<Vec<f64>>>;
    let evidence = match (gauge, potential) {
        (Some(g), None) => Evidence::Gauge(&g.inner),
        (None, Some(p)) => {
            if let Ok(v) = p.extract::<Vec<f64>>() {
                point = Some(v);
                Evidence::PointPotential(point.as_deref().unwrap())
            } else {
                pair = Some(p.extract()?);
                Evidence::PairPotential(pair.as_deref().unwrap())
            }
        }
        (None, None) => Evidence::None,
        _ => return Err(PyValueError::new_err("give either gauge or potential")),
    };
    let cert = cfp_core::certify::certify_map(&space.inner, map.as_ref(), condition, evidence)
        .map_err(err)?;
    dict(py, &cert)
}

/// Picard orbit of a single-valued map; `gauge` (eta-type) or `potential`
/// attaches potentials to the trace.
#[pyfunction]
#[pyo3(signature = (space, images, start, max_iter=1000, gauge=None, potential=None))]
fn picard<'py>(
    py: Python<'py>,
    space: &PyMetricSpace,
    images: Vec<usize>,
    start: usize,
    max_iter: usize,
    gauge: Option<&PyGauge>,
    potential: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let map = SingleValuedMap::new(images, &space.inner).map_err(err)?;
    let source = match (gauge, &potential) {
        (Some(g), _) => PotentialSource::Eta(&g.inner),
        (None, Some(phi)) => PotentialSource::Table(phi),
        (None, None) => PotentialSource::None,
    };
    let stop = StopRule::new(max_iter).map_err(err)?;
    let trace =
        cfp_core::iterate::picard_iterate(&space.inner, &map, start, stop, source).map_err(err)?;
    dict(py, &trace)
}

/// Orbit of a set-valued map guided by `theta`.
#[pyfunction]
#[pyo3(signature = (space, images, start, theta, max_iter=1000))]
fn multivalued_orbit<'py>(
    py: Python<'py>,
    space: &PyMetricSpace,
    images: Vec<Vec<usize>>,
    start: usize,
    theta: &PyGauge,
    max_iter: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let sets = images
        .into_iter()
        .map(PointSet::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let map = MultiValuedMap::new(sets, &space.inner).map_err(err)?;
    let stop = StopRule::new(max_iter).map_err(err)?;
    let trace = cfp_core::iterate::multivalued_orbit(&space.inner, &map, start, &theta.inner, stop)
        .map_err(err)?;
    dict(py, &trace)
}

#[pyfunction]
fn brute_force_fixed_points(
    space: &PyMetricSpace,
    images: &Bound<'_, PyAny>,
) -> PyResult<Vec<usize>> {
    let map = read_map(&space.inner, images)?;
    Ok(cfp_core::iterate::brute_force_fixed_points(map.as_ref()))
}

fn affine_problem(
    reward: Vec<Vec<f64>>,
    transition: Vec<Vec<usize>>,
    beta: f64,
    c: Option<Vec<Vec<f64>>>,
) -> PyResult<BellmanProblem> {
    let w = reward.len();
    let d = reward.first().map_or(0, Vec::len);
    let c = c.unwrap_or_else(|| vec![vec![0.0; d]; w]);
    BellmanProblem::new(
        (0..w).map(|i| format!("w{i}")).collect(),
        (0..d).map(|i| format!("y{i}")).collect(),
        reward,
        transition,
        Aggregator::Affine { c, beta },
    )
    .map_err(err)
}

/// Certificate for the affine aggregator `c + beta * t`.
#[pyfunction]
#[pyo3(signature = (reward, transition, beta, c=None, samples=256, seed=0))]
fn certify_bellman<'py>(
    py: Python<'py>,
    reward: Vec<Vec<f64>>,
    transition: Vec<Vec<usize>>,
    beta: f64,
    c: Option<Vec<Vec<f64>>>,
    samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = affine_problem(reward, transition, beta, c)?;
    dict(
        py,
        &cfp_core::bellman::certify_bellman(&p, samples, seed).map_err(err)?,
    )
}

/// Value iteration for the affine aggregator; returns `(h, trace)`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (reward, transition, beta, c=None, h0=None, tol=1e-10, max_iter=10_000))]
fn solve_bellman<'py>(
    py: Python<'py>,
    reward: Vec<Vec<f64>>,
    transition: Vec<Vec<usize>>,
    beta: f64,
    c: Option<Vec<Vec<f64>>>,
    h0: Option<Vec<f64>>,
    tol: f64,
    max_iter: usize,
) -> PyResult<(Vec<f64>, Bound<'py, PyAny>)> {
    let p = affine_problem(reward, transition, beta, c)?;
    let h0 = match h0 {
        Some(v) => ValueFunction::new(v).map_err(err)?,
        None => ValueFunction::zeros(p.num_states()),
    };
    let (h, trace) = cfp_core::bellman::solve_bellman(&p, &h0, tol, max_iter).map_err(err)?;
    Ok((h.values().to_vec(), dict(py, &trace)?))
}

#[pymodule]
fn cfp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetricSpace>()?;
    m.add_class::<PyGauge>()?;
    m.add_function(wrap_pyfunction!(check_metric_axioms, m)?)?;
    m.add_function(wrap_pyfunction!(repair_triangle, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff_distance, m)?)?;
    m.add_function(wrap_pyfunction!(point_to_set_distance, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(picard, m)?)?;
    m.add_function(wrap_pyfunction!(multivalued_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_fixed_points, m)?)?;
    m.add_function(wrap_pyfunction!(certify_bellman, m)?)?;
    m.add_function(wrap_pyfunction!(solve_bellman, m)?)?;
    Ok(())
}
