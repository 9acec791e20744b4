//! Python bindings. Distributions, events and samples are wrapped as
//! classes; structured results (learned models, summaries, constructions)
//! come back as plain Python objects decoded from their JSON form.

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde::de::DeserializeOwned;
use serde::Serialize;

use halluc_core::adversaries::{entropy_threshold, fano_bound, Construction};
use halluc_core::harness::{complexity_curve, required_n, run_trials, sample_from, write_outputs, ExperimentConfig};
use halluc_core::learners::{learn as core_learn, LearnerSpec};
use halluc_core::measure::{self, InfoMeasure, LogBase};
use halluc_core::{Error, Universe};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn universe(size: usize) -> PyResult<Universe> {
    Universe::new(size).map_err(err)
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Accepts either a JSON string or any JSON-serializable Python object.
fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = if obj.is_instance_of::<PyString>() {
        obj.extract()?
    } else {
        obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?
    };
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse_measure(s: &str) -> PyResult<InfoMeasure> {
    s.parse().map_err(err)
}

/// A subset of the atoms `0..universe_size`.
#[pyclass(name = "EventSet", module = "halluc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyEventSet(measure::EventSet);

#[pymethods]
impl PyEventSet {
    #[new]
    fn new(universe_size: usize, members: Vec<usize>) -> PyResult<Self> {
        Ok(Self(measure::EventSet::new(&universe(universe_size)?, members).map_err(err)?))
    }

    #[getter]
    fn universe_size(&self) -> usize {
        self.0.universe().size()
    }

    #[getter]
    fn members(&self) -> Vec<usize> {
        self.0.members().to_vec()
    }

    fn complement(&self) -> Self {
        Self(self.0.complement())
    }

    fn union(&self, other: &Self) -> PyResult<Self> {
        Ok(Self(self.0.union(&other.0).map_err(err)?))
    }

    fn intersection(&self, other: &Self) -> PyResult<Self> {
        Ok(Self(self.0.intersection(&other.0).map_err(err)?))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __contains__(&self, atom: usize) -> bool {
        self.0.contains(atom)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("EventSet({}, {:?})", self.0.universe().size(), self.0.members())
    }
}

/// A probability distribution over `0..universe_size`.
#[pyclass(name = "Dist", module = "halluc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDist(measure::Dist);

#[pymethods]
impl PyDist {
    /// `weights` maps atoms to probabilities; they must sum to one.
    #[new]
    fn new(universe_size: usize, weights: Vec<(usize, f64)>) -> PyResult<Self> {
        Ok(Self(measure::Dist::new(&universe(universe_size)?, weights).map_err(err)?))
    }

    #[staticmethod]
    fn from_dense(weights: Vec<f64>) -> PyResult<Self> {
        Ok(Self(measure::Dist::from_dense(&universe(weights.len())?, &weights).map_err(err)?))
    }

    #[staticmethod]
    fn uniform(set: &PyEventSet) -> PyResult<Self> {
        Ok(Self(measure::Dist::uniform(&set.0).map_err(err)?))
    }

    #[staticmethod]
    fn from_json(py: Python<'_>, obj: Py<PyAny>) -> PyResult<Self> {
        Ok(Self(from_py(obj.bind(py))?))
    }

    fn to_json(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0)
    }

    #[getter]
    fn universe_size(&self) -> usize {
        self.0.universe().size()
    }

    fn support(&self) -> PyEventSet {
        PyEventSet(self.0.support())
    }

    fn mass(&self, set: &PyEventSet) -> PyResult<f64> {
        self.0.mass(&set.0).map_err(err)
    }

    fn to_dense(&self) -> Vec<f64> {
        self.0.to_dense()
    }

    fn __getitem__(&self, atom: usize) -> PyResult<f64> {
        if atom >= self.0.universe().size() {
            return Err(PyIndexError::new_err(atom));
        }
        Ok(self.0.weight(atom))
    }

    fn __repr__(&self) -> String {
        let body: Vec<String> = self.0.iter().map(|(a, w)| format!("{a}: {w}")).collect();
        format!("Dist({}, {{{}}})", self.0.universe().size(), body.join(", "))
    }
}

/// An ordered training sample; duplicates are allowed.
#[pyclass(name = "Sample", module = "halluc", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySample(measure::Sample);

#[pymethods]
impl PySample {
    #[new]
    #[pyo3(signature = (universe_size, points, seed = 0))]
    fn new(universe_size: usize, points: Vec<usize>, seed: u64) -> PyResult<Self> {
        Ok(Self(measure::Sample::new(&universe(universe_size)?, points, seed).map_err(err)?))
    }

    #[getter]
    fn points(&self) -> Vec<usize> {
        self.0.points().to_vec()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed()
    }

    fn distinct(&self) -> PyEventSet {
        PyEventSet(self.0.distinct())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("Sample({}, {:?}, seed={})", self.0.universe().size(), self.0.points(), self.0.seed())
    }
}

/// Mass `p` puts outside the facts set.
#[pyfunction]
fn hall(p: &PyDist, facts: &PyEventSet) -> PyResult<f64> {
    measure::hall(&p.0, &facts.0).map_err(err)
}

/// Hallucination rate of `p` relative to the data distribution `q`.
#[pyfunction]
fn hall_eps(p: &PyDist, q: &PyDist, eps: f64) -> PyResult<f64> {
    measure::hall_eps(&p.0, &q.0, eps).map_err(err)
}

#[pyfunction]
fn tv(p: &PyDist, q: &PyDist) -> PyResult<f64> {
    measure::tv(&p.0, &q.0).map_err(err)
}

#[pyfunction]
fn kl(p: &PyDist, q: &PyDist) -> PyResult<f64> {
    measure::kl(&p.0, &q.0).map_err(err)
}

/// Evaluates an information measure: `shannon`, `renyi:<alpha>` or
/// `out-of-sample` (which needs a sample).
#[pyfunction]
#[pyo3(signature = (p, measure = "shannon", sample = None))]
fn info(p: &PyDist, measure: &str, sample: Option<&PySample>) -> PyResult<f64> {
    let m = parse_measure(measure)?;
    let s = match sample {
        Some(s) => s.0.clone(),
        None if m == InfoMeasure::OutOfSample => {
            return Err(PyValueError::new_err("out-of-sample mass needs a sample"))
        }
        None => measure::Sample::empty(p.0.universe()),
    };
    measure::info(m, &p.0, &s).map_err(err)
}

/// Draws `n` i.i.d. points from `q`.
#[pyfunction]
#[pyo3(signature = (q, n, seed = 0))]
fn sample(q: &PyDist, n: usize, seed: u64) -> PyResult<PySample> {
    Ok(PySample(sample_from(&q.0, n, seed).map_err(err)?))
}

/// Runs a learner described by its JSON spec (a dict or string with a
/// `kind` field) and returns the learned model as a dict.
#[pyfunction]
fn learn(py: Python<'_>, spec: &Bound<'_, PyAny>, sample: &PySample) -> PyResult<Py<PyAny>> {
    let spec: LearnerSpec = from_py(spec)?;
    to_py(py, &core_learn(&spec, &sample.0).map_err(err)?)
}

/// Draws one seeded instance of a named construction.
#[pyfunction]
#[pyo3(signature = (name, params = None, seed = 0))]
fn adversary(py: Python<'_>, name: &str, params: Option<&Bound<'_, PyAny>>, seed: u64) -> PyResult<Py<PyAny>> {
    let params: serde_json::Value = match params {
        Some(p) => from_py(p)?,
        None => serde_json::Value::Null,
    };
    let mut tagged = serde_json::json!({ "name": name });
    if !params.is_null() {
        tagged["params"] = params;
    }
    let construction: Construction =
        serde_json::from_value(tagged).map_err(|e| PyValueError::new_err(format!("bad construction {name}: {e}")))?;
    let scenario = construction.prepare().map_err(err)?.draw(seed).map_err(err)?;
    to_py(
        py,
        &serde_json::json!({
            "construction": construction,
            "instance": scenario.instance,
            "concepts": scenario.concepts,
            "hypotheses": scenario.hypotheses,
        }),
    )
}

fn config(obj: &Bound<'_, PyAny>) -> PyResult<ExperimentConfig> {
    let cfg: ExperimentConfig = from_py(obj)?;
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

/// Runs the Monte Carlo trials of an experiment config. Returns
/// `{"summary": ..., "records": [...]}`; with `output_dir` set the usual
/// files are written there too.
#[pyfunction]
#[pyo3(signature = (config_json, output_dir = None))]
fn run_experiment(py: Python<'_>, config_json: &Bound<'_, PyAny>, output_dir: Option<std::path::PathBuf>) -> PyResult<Py<PyAny>> {
    let cfg = config(config_json)?;
    let result = py.detach(|| run_trials(&cfg)).map_err(err)?;
    if let Some(dir) = output_dir.or(cfg.output_dir.clone()) {
        write_outputs(&dir, &result).map_err(err)?;
    }
    to_py(py, &serde_json::json!({ "summary": result.summary, "records": result.records }))
}

/// Sample-complexity curve: one row per `n` with Wilson bounds.
#[pyfunction]
fn curve(py: Python<'_>, config_json: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    let cfg = config(config_json)?;
    let (rows, _) = py.detach(|| complexity_curve(&cfg)).map_err(err)?;
    to_py(py, &rows)
}

#[pyfunction]
fn required_sample_size(d: usize, eps: f64, delta: f64) -> PyResult<u64> {
    required_n(d, eps, delta).map_err(err)
}

#[pyfunction]
#[pyo3(name = "fano_bound")]
fn fano(n: u64, class_size: u64, kl_sup: f64) -> PyResult<f64> {
    fano_bound(n, class_size, kl_sup).map_err(err)
}

#[pyfunction]
#[pyo3(name = "entropy_threshold", signature = (base = "nats", tol = 1e-12))]
fn threshold(base: &str, tol: f64) -> PyResult<f64> {
    let base = match base {
        "nats" => LogBase::Nats,
        "bits" => LogBase::Bits,
        other => return Err(PyValueError::new_err(format!("unknown base {other:?}"))),
    };
    entropy_threshold(base, tol).map_err(err)
}

#[pymodule]
fn halluc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEventSet>()?;
    m.add_class::<PyDist>()?;
    m.add_class::<PySample>()?;
    m.add_function(wrap_pyfunction!(hall, m)?)?;
    m.add_function(wrap_pyfunction!(hall_eps, m)?)?;
    m.add_function(wrap_pyfunction!(tv, m)?)?;
    m.add_function(wrap_pyfunction!(kl, m)?)?;
    m.add_function(wrap_pyfunction!(info, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(learn, m)?)?;
    m.add_function(wrap_pyfunction!(adversary, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(curve, m)?)?;
    m.add_function(wrap_pyfunction!(required_sample_size, m)?)?;
    m.add_function(wrap_pyfunction!(fano, m)?)?;
    m.add_function(wrap_pyfunction!(threshold, m)?)?;
    Ok(())
}
