//! Python bindings: `import hexpr`.

use std::collections::{BTreeMap, HashMap};

use hexpr_core::builder::{convert_2wiki, convert_musique, MusiqueRecord, TemplateTable, TwoWikiRecord};
use hexpr_core::eval;
use hexpr_core::executor::{self, ExecConfig};
use hexpr_core::hexpr::{self as core, find_placeholders as core_find_placeholders, primitives_in_order};
use hexpr_core::readers::{FactStore, OracleReader};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

create_exception!(hexpr, ParseError, PyValueError, "Malformed H-expression.");

fn parse_err(e: core::ParseError) -> PyErr {
    ParseError::new_err(format!("{e} ({})", e.code()))
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parsed H-expression tree.
#[pyclass(name = "HExpr", module = "hexpr", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyHExpr(core::HExpr);

#[pymethods]
impl PyHExpr {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::parse_hexpression(text).map(PyHExpr).map_err(parse_err)
    }

    fn __str__(&self) -> String {
        core::serialize(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("HExpr({:?})", core::serialize(&self.0))
    }

    /// `"PRIMITIVE"` or the canonical operation name.
    #[getter]
    fn kind(&self) -> &'static str {
        match &self.0 {
            core::HExpr::Primitive(_) => "PRIMITIVE",
            core::HExpr::Operation { kind, .. } => kind.canonical_name(),
        }
    }

    #[getter]
    fn text(&self) -> Option<String> {
        match &self.0 {
            core::HExpr::Primitive(p) => Some(p.text.clone()),
            _ => None,
        }
    }

    #[getter]
    fn left(&self) -> Option<PyHExpr> {
        match &self.0 {
            core::HExpr::Operation { left, .. } => Some(PyHExpr((**left).clone())),
            _ => None,
        }
    }

    #[getter]
    fn right(&self) -> Option<PyHExpr> {
        match &self.0 {
            core::HExpr::Operation { right, .. } => Some(PyHExpr((**right).clone())),
            _ => None,
        }
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    #[getter]
    fn leaf_count(&self) -> usize {
        self.0.leaf_count()
    }

    /// Primitive questions in the order the executor asks them.
    fn execution_order(&self) -> Vec<String> {
        primitives_in_order(&self.0).into_iter().map(|(_, p)| p.text.clone()).collect()
    }

    #[pyo3(signature = (max_depth = None))]
    fn validate<'py>(&self, py: Python<'py>, max_depth: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
        report(py, &self.0, max_depth)
    }
}

#[derive(FromPyObject)]
enum ExprArg<'py> {
    Expr(Bound<'py, PyHExpr>),
    Text(String),
}

impl ExprArg<'_> {
    fn expr(&self) -> PyResult<core::HExpr> {
        match self {
            ExprArg::Expr(e) => Ok(e.get().0.clone()),
            ExprArg::Text(t) => core::parse_hexpression(t).map_err(parse_err),
        }
    }
}

fn report<'py>(py: Python<'py>, expr: &core::HExpr, max_depth: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
    let mut config = core::ValidateConfig::default();
    if let Some(d) = max_depth {
        config.max_depth = d;
    }
    let report = core::validate_with(expr, &config);
    let diagnostics = PyList::empty(py);
    for d in &report.diagnostics {
        let item = PyDict::new(py);
        item.set_item("severity", format!("{:?}", d.severity).to_uppercase())?;
        item.set_item("code", &d.code)?;
        item.set_item("message", &d.message)?;
        item.set_item("node_path", d.node_path.to_string())?;
        diagnostics.append(item)?;
    }
    let out = PyDict::new(py);
    out.set_item("executable", report.executable)?;
    out.set_item("diagnostics", diagnostics)?;
    Ok(out)
}

#[pyfunction]
fn parse(text: &str) -> PyResult<PyHExpr> {
    PyHExpr::parse(text)
}

/// Canonical text of an expression.
#[pyfunction]
fn serialize(expression: ExprArg<'_>) -> PyResult<String> {
    Ok(core::serialize(&expression.expr()?))
}

/// `{"executable": bool, "diagnostics": [...]}`.
#[pyfunction]
#[pyo3(signature = (expression, max_depth = None))]
fn validate<'py>(py: Python<'py>, expression: ExprArg<'py>, max_depth: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
    report(py, &expression.expr()?, max_depth)
}

/// `[(index, surface_form), ...]` in text order.
#[pyfunction]
fn find_placeholders(text: &str) -> Vec<(usize, String)> {
    core_find_placeholders(text).into_iter().map(|p| (p.index, p.surface_form)).collect()
}

#[pyfunction]
fn normalize_answer(text: &str) -> String {
    executor::normalize_answer(text)
}

#[pyfunction]
fn exact_match(predicted: &str, gold: Vec<String>) -> f64 {
    eval::exact_match(predicted, &gold)
}

#[pyfunction]
fn token_f1(predicted: &str, gold: Vec<String>) -> f64 {
    eval::token_f1(predicted, &gold)
}

#[pyfunction]
fn coerce_number(text: &str) -> PyResult<f64> {
    executor::coerce_number(text).map_err(value_err)
}

#[derive(FromPyObject)]
enum Answers {
    One(String),
    Many(Vec<String>),
}

#[derive(FromPyObject)]
enum Candidates<'py> {
    One(ExprArg<'py>),
    Many(Vec<String>),
}

#[pyclass(name = "ExecResult", module = "hexpr", frozen, get_all)]
struct ExecResult {
    /// Rendered final answer; empty when every candidate failed.
    answer: String,
    status: String,
    /// 1-based candidate that produced the answer, if any.
    executed_candidate: Option<usize>,
    memory: BTreeMap<usize, String>,
    trace_json: String,
}

#[pymethods]
impl ExecResult {
    fn __repr__(&self) -> String {
        format!("ExecResult(answer={:?}, status={:?})", self.answer, self.status)
    }
}

/// Executes one expression, or the first viable of several candidate
/// strings, against an oracle built from `facts` (question -> answer or
/// ranked answers).
#[pyfunction]
#[pyo3(signature = (expression, facts, top_k = 5))]
fn execute(py: Python<'_>, expression: Candidates<'_>, facts: HashMap<String, Answers>, top_k: usize) -> PyResult<ExecResult> {
    let mut store = FactStore::new();
    for (question, answers) in facts {
        match answers {
            Answers::One(a) => store.insert(&question, [a]),
            Answers::Many(list) => store.insert(&question, list),
        }
    }
    let reader = OracleReader::new(store);
    let config = ExecConfig {
        top_k: top_k.max(1),
        ..ExecConfig::default()
    };
    let candidates = match expression {
        Candidates::One(e) => vec![core::serialize(&e.expr()?)],
        Candidates::Many(list) => list,
    };
    let outcome = py.detach(|| executor::execute_with_fallback(&candidates, &[], &reader, &config));
    Ok(match outcome {
        Ok(r) => ExecResult {
            answer: r.predicted(),
            status: r.status().to_string(),
            executed_candidate: Some(r.executed_candidate()),
            memory: r.trace.memory.clone(),
            trace_json: r.trace.to_json(),
        },
        Err(failed) => {
            let trace = failed.trace();
            ExecResult {
                answer: String::new(),
                status: failed.status().to_string(),
                executed_candidate: None,
                memory: trace.memory.clone(),
                trace_json: trace.to_json(),
            }
        }
    })
}

/// Gold expression for one dataset record given as a JSON string.
#[pyfunction]
#[pyo3(signature = (dataset, record_json, templates_json = None))]
fn convert(dataset: &str, record_json: &str, templates_json: Option<&str>) -> PyResult<String> {
    let row = match dataset {
        "musique" => {
            let record: MusiqueRecord = serde_json::from_str(record_json).map_err(value_err)?;
            convert_musique(&record).map_err(value_err)?
        }
        "2wiki" => {
            let record: TwoWikiRecord = serde_json::from_str(record_json).map_err(value_err)?;
            let table = match templates_json {
                Some(t) => TemplateTable::from_json_str(t).map_err(value_err)?,
                None => TemplateTable::default(),
            };
            convert_2wiki(&record, &table).map_err(value_err)?
        }
        other => return Err(PyValueError::new_err(format!("unknown dataset {other:?}; use musique or 2wiki"))),
    };
    Ok(row.hexpression)
}

#[pymodule]
fn hexpr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ParseError", m.py().get_type::<ParseError>())?;
    m.add_class::<PyHExpr>()?;
    m.add_class::<ExecResult>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(serialize, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(find_placeholders, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_answer, m)?)?;
    m.add_function(wrap_pyfunction!(exact_match, m)?)?;
    m.add_function(wrap_pyfunction!(token_f1, m)?)?;
    m.add_function(wrap_pyfunction!(coerce_number, m)?)?;
    m.add_function(wrap_pyfunction!(execute, m)?)?;
    m.add_function(wrap_pyfunction!(convert, m)?)?;
    Ok(())
}
