//! Python bindings: the parallel batch-dynamic coloring as a class, plus the
//! harness entry points as functions.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use batchcolor::exec::Exec;
use batchcolor::harness::{self, Algorithm, GenConfig, RunConfig, VerifyMode};
use batchcolor::{BatchUpdater, EdgeUpdate, Error, UpdaterConfig, VertexId};

fn py_err(e: Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<PyObject> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_py(py),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_py(py),
            (None, Some(u)) => u.into_py(py),
            _ => n.as_f64().unwrap_or(f64::NAN).into_py(py),
        },
        Value::String(s) => s.into_py(py),
        Value::Array(items) => {
            let list = PyList::empty_bound(py);
            for x in items {
                list.append(to_py(py, x)?)?;
            }
            list.into_py(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new_bound(py);
            for (k, x) in map {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_py(py)
        }
    })
}

fn serialize<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// Accepts `("+", u, v)` / `("-", u, v)` or `("insert", u, v)` / `("delete", u, v)`.
fn parse_op(op: &str, u: VertexId, v: VertexId) -> PyResult<EdgeUpdate> {
    match op {
        "+" | "insert" => Ok(EdgeUpdate::insert(u, v)),
        "-" | "delete" => Ok(EdgeUpdate::delete(u, v)),
        _ => Err(PyValueError::new_err(format!("unknown edge op `{op}`"))),
    }
}

fn algorithm(name: &str) -> PyResult<Algorithm> {
    match name {
        "parallel" => Ok(Algorithm::Parallel),
        "relaxed-seq" => Ok(Algorithm::RelaxedSeq),
        "folklore-2delta" => Ok(Algorithm::Folklore2Delta),
        _ => Err(PyValueError::new_err(format!("unknown algorithm `{name}`"))),
    }
}

/// A Δ-bounded graph on vertices `0..n` whose (Δ+1)-coloring is maintained
/// under batches of edge insertions and deletions.
#[pyclass(module = "pybatchcolor")]
struct DynamicColoring {
    inner: BatchUpdater,
}

#[pymethods]
impl DynamicColoring {
    #[new]
    #[pyo3(signature = (n, delta, seed = 1, sequential = false, audit = false))]
    fn new(n: usize, delta: u32, seed: u64, sequential: bool, audit: bool) -> PyResult<Self> {
        let exec = if sequential { Exec::Sequential } else { Exec::Parallel };
        let inner = BatchUpdater::new(n, delta, seed, UpdaterConfig { exec, audit }).map_err(py_err)?;
        Ok(DynamicColoring { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.graph().n()
    }

    #[getter]
    fn delta(&self) -> u32 {
        self.inner.graph().delta()
    }

    #[getter]
    fn top_level(&self) -> u8 {
        self.inner.graph().lambda()
    }

    #[getter]
    fn gamma_sixths(&self) -> i64 {
        self.inner.ledger().gamma_sixths()
    }

    /// Applies one batch of `(op, u, v)` triples and returns its metrics.
    fn apply_batch(&mut self, py: Python<'_>, ops: Vec<(String, VertexId, VertexId)>) -> PyResult<PyObject> {
        let batch = ops.iter().map(|(op, u, v)| parse_op(op, *u, *v)).collect::<PyResult<Vec<_>>>()?;
        let m = py.allow_threads(|| self.inner.apply_batch(&batch)).map_err(py_err)?;
        serialize(py, &m)
    }

    fn color(&self, u: VertexId) -> PyResult<Option<u32>> {
        self.inner.graph().check_vertex(u as u64).map_err(py_err)?;
        Ok(self.inner.graph().color(u))
    }

    fn level(&self, u: VertexId) -> PyResult<u8> {
        self.inner.graph().check_vertex(u as u64).map_err(py_err)?;
        Ok(self.inner.graph().level(u))
    }

    fn colors(&self) -> Vec<Option<u32>> {
        self.inner.graph().colors().to_vec()
    }

    fn levels(&self) -> Vec<u8> {
        self.inner.graph().levels()
    }

    fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.inner.graph().edges()
    }

    fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.inner.graph().has_edge(u, v)
    }

    /// Propriety violations found by a full scan; empty when proper.
    fn verify(&self, py: Python<'_>) -> PyResult<PyObject> {
        serialize(py, &harness::verify_proper(self.inner.graph()))
    }

    /// Raises if any internal invariant or the token ledger is off.
    fn check_invariants(&self) -> PyResult<()> {
        let g = self.inner.graph();
        g.check_invariants().map_err(py_err)?;
        self.inner.ledger().check(g).map_err(|(kept, brute)| {
            PyRuntimeError::new_err(format!("ledger holds {kept} sixths, recount gives {brute}"))
        })
    }

    fn __repr__(&self) -> String {
        let g = self.inner.graph();
        format!("DynamicColoring(n={}, delta={}, edges={})", g.n(), g.delta(), g.edge_count())
    }
}

/// Random workload in the text format.
#[pyfunction]
#[pyo3(signature = (n, delta, batches, batch_size, mix = 0.7, seed = 1))]
fn generate_workload(n: usize, delta: u32, batches: usize, batch_size: usize, mix: f64, seed: u64) -> PyResult<String> {
    let w = harness::generate_workload(&GenConfig { n, delta, batches, batch_size, mix, seed }).map_err(py_err)?;
    Ok(harness::emit_workload(&w))
}

/// Parses workload text into `{"n", "delta", "batches"}`.
#[pyfunction]
fn parse_workload(py: Python<'_>, text: &str) -> PyResult<PyObject> {
    serialize(py, &harness::parse_workload(text).map_err(py_err)?)
}

/// Replays workload text and returns the run report.
#[pyfunction]
#[pyo3(signature = (text, algorithm = "parallel", seed = 1, every_batch = false, ledger_check = 0))]
fn run_workload(
    py: Python<'_>,
    text: &str,
    algorithm: &str,
    seed: u64,
    every_batch: bool,
    ledger_check: u64,
) -> PyResult<PyObject> {
    let w = harness::parse_workload(text).map_err(py_err)?;
    let cfg = RunConfig {
        verify: if every_batch { VerifyMode::EveryBatch } else { VerifyMode::End },
        ledger_check,
        ..RunConfig::new(self::algorithm(algorithm)?, seed)
    };
    let out = py.allow_threads(|| harness::run(&w, &cfg)).map_err(py_err)?;
    serialize(py, &out.report)
}

/// First-fit (Δ+1) coloring of a static graph in id order.
#[pyfunction]
fn greedy_static(n: usize, delta: u32, edges: Vec<(VertexId, VertexId)>) -> PyResult<Vec<u32>> {
    batchcolor::baselines::greedy_static(n, delta, &edges).map_err(py_err)
}

#[pymodule]
fn pybatchcolor(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<DynamicColoring>()?;
    m.add_function(wrap_pyfunction!(generate_workload, m)?)?;
    m.add_function(wrap_pyfunction!(parse_workload, m)?)?;
    m.add_function(wrap_pyfunction!(run_workload, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_static, m)?)?;
    Ok(())
}
