// SPDX-License-Identifier: Apache-2.0

//! Python bindings. Inputs and outputs are the same text formats the CLI
//! reads and writes (template YAML, instance and annotation JSON, IR JSON),
//! so callers can pass file contents straight through.
//!
//! Failures raise `thresh.ValidationError` (a `ValueError`) whose
//! `diagnostics` attribute lists dicts with `severity`, `code`, `path` and
//! `message`.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict, PyList};
use thresh_core::compile::{self, CompileOptions};
use thresh_core::convert::{ConvertFailure, ConverterRegistry};
use thresh_core::data::{
    self as data, check_annotation_set, check_instance_bounds, parse_annotation_sets,
    parse_instances, serialize_collection, Instance,
};
use thresh_core::span;
use thresh_core::typology::{
    self as typology, emit_yaml, parse_template, validate_typology, Boundary,
};
use thresh_core::Diagnostic;

create_exception!(thresh, ValidationError, PyValueError);

fn diag_dict<'py>(py: Python<'py>, d: &Diagnostic) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("severity", if d.is_error() { "error" } else { "warning" })?;
    out.set_item("code", &d.code)?;
    out.set_item("path", &d.path)?;
    out.set_item("message", &d.message)?;
    Ok(out)
}

fn diag_list<'py>(py: Python<'py>, diags: &[Diagnostic]) -> PyResult<Bound<'py, PyList>> {
    PyList::new(
        py,
        diags
            .iter()
            .map(|d| diag_dict(py, d))
            .collect::<PyResult<Vec<_>>>()?,
    )
}

fn fail(py: Python<'_>, message: impl Into<String>, diags: &[Diagnostic]) -> PyErr {
    let err = ValidationError::new_err(message.into());
    match diag_list(py, diags) {
        Ok(list) => match err.value(py).setattr("diagnostics", list) {
            Ok(()) => err,
            Err(e) => e,
        },
        Err(e) => e,
    }
}

fn boundary(name: &str) -> PyResult<Boundary> {
    name.parse()
        .map_err(|_| PyValueError::new_err(format!("unknown boundary `{name}`")))
}

/// A parsed, validated typology template.
#[pyclass(module = "thresh", frozen)]
struct Typology {
    inner: typology::Typology,
    warnings: Vec<Diagnostic>,
}

#[pymethods]
impl Typology {
    #[new]
    fn new(py: Python<'_>, yaml: &str) -> PyResult<Self> {
        let parsed = parse_template(yaml).map_err(|e| fail(py, e.to_string(), &e.diagnostics()))?;
        Ok(Self {
            inner: parsed.typology,
            warnings: parsed.warnings,
        })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn boundary(&self) -> &'static str {
        self.inner.config.boundary.as_str()
    }

    #[getter]
    fn leaf_count(&self) -> usize {
        self.inner.leaf_count()
    }

    /// Category names, parents before their children.
    fn categories(&self) -> Vec<String> {
        self.inner
            .flatten()
            .into_iter()
            .map(|c| c.name.clone())
            .collect()
    }

    fn warnings<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        diag_list(py, &self.warnings)
    }

    /// Re-validate the model; returns every finding, errors and warnings.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        diag_list(py, &validate_typology(&self.inner))
    }

    fn to_yaml(&self) -> String {
        emit_yaml(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Typology(name={:?}, leaves={})",
            self.inner.name,
            self.inner.leaf_count()
        )
    }
}

fn instances(py: Python<'_>, t: &Typology, data: &str) -> PyResult<Vec<Instance>> {
    parse_instances(data, &t.inner.config).map_err(|e| fail(py, e.to_string(), &e.diagnostics()))
}

/// Diagnostics for instance and annotation files against a typology. Never
/// raises for invalid content; only for unparseable instance JSON.
#[pyfunction]
#[pyo3(signature = (typology, data, annotations=Vec::new()))]
fn validate<'py>(
    py: Python<'py>,
    typology: &Typology,
    data: &str,
    annotations: Vec<String>,
) -> PyResult<Bound<'py, PyList>> {
    let insts = instances(py, typology, data)?;
    let mut diags = check_instance_bounds(&typology.inner, &insts);
    for text in &annotations {
        match parse_annotation_sets(text) {
            Ok(sets) => {
                for set in &sets {
                    diags.extend(check_annotation_set(set, &typology.inner, Some(&insts)));
                }
            }
            Err(e) => diags.extend(e.diagnostics()),
        }
    }
    diag_list(py, &diags)
}

/// Compile to the interface description JSON.
#[pyfunction]
#[pyo3(signature = (typology, data, annotations=Vec::new(), locale=None, panes=None))]
fn compile_ir(
    py: Python<'_>,
    typology: &Typology,
    data: &str,
    annotations: Vec<String>,
    locale: Option<String>,
    panes: Option<usize>,
) -> PyResult<String> {
    let insts = instances(py, typology, data)?;
    let mut sets = Vec::new();
    for text in &annotations {
        sets.extend(
            parse_annotation_sets(text).map_err(|e| fail(py, e.to_string(), &e.diagnostics()))?,
        );
    }
    let opts = CompileOptions {
        locale,
        annotations: sets,
        panes,
    };
    let ir = compile::compile(&typology.inner, &insts, &opts)
        .map_err(|e| fail(py, e.to_string(), &e.diagnostics()))?;
    Ok(ir.to_json())
}

/// Parse one annotation file and return its canonical serialization.
#[pyfunction]
fn canonicalize_annotations(
    py: Python<'_>,
    typology: &Typology,
    data: &str,
    annotations: &str,
) -> PyResult<String> {
    let insts = instances(py, typology, data)?;
    let set = data::parse_annotations(annotations, &typology.inner, &insts)
        .map_err(|e| fail(py, e.to_string(), &e.diagnostics()))?;
    Ok(data::serialize_annotations(&set))
}

/// Merge annotation files; returns (collection JSON, diagnostics).
#[pyfunction]
#[pyo3(signature = (typology, files, data=None))]
fn merge<'py>(
    py: Python<'py>,
    typology: &Typology,
    files: Vec<String>,
    data: Option<&str>,
) -> PyResult<(String, Bound<'py, PyList>)> {
    let insts = data.map(|d| instances(py, typology, d)).transpose()?;
    let refs: Vec<&str> = files.iter().map(String::as_str).collect();
    let (collection, diags) = data::merge_annotations(&refs, &typology.inner, insts.as_deref())
        .map_err(|e| fail(py, e.to_string(), &e.diagnostics()))?;
    Ok((serialize_collection(&collection), diag_list(py, &diags)?))
}

#[pyfunction]
fn convert(
    py: Python<'_>,
    typology: &Typology,
    source_format: &str,
    target_format: &str,
    text: &str,
) -> PyResult<String> {
    ConverterRegistry::with_builtins()
        .convert(source_format, target_format, text, &typology.inner)
        .map_err(|e| match e {
            ConvertFailure::Registry(r) => PyValueError::new_err(r.to_string()),
            ConvertFailure::Convert(c) => fail(py, c.to_string(), &c.diagnostics()),
        })
}

/// Registered formats as dicts with `format_name`, `capabilities`, `lossless`.
#[pyfunction]
fn formats(py: Python<'_>) -> PyResult<Vec<Bound<'_, PyDict>>> {
    ConverterRegistry::with_builtins()
        .list()
        .into_iter()
        .map(|d| {
            let out = PyDict::new(py);
            out.set_item("format_name", d.format_name)?;
            out.set_item(
                "capabilities",
                d.capabilities
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>(),
            )?;
            out.set_item("lossless", d.lossless)?;
            Ok(out)
        })
        .collect()
}

#[pyfunction]
#[pyo3(signature = (template, data, annotations=None))]
fn bundle<'py>(
    py: Python<'py>,
    template: &str,
    data: &str,
    annotations: Option<&str>,
) -> PyResult<Bound<'py, PyBytes>> {
    let bytes = compile::bundle(template, data, annotations)
        .map_err(|e| fail(py, e.to_string(), &e.diagnostics()))?;
    Ok(PyBytes::new(py, &bytes))
}

/// Returns (template, instances, annotations or None).
#[pyfunction]
fn unbundle(py: Python<'_>, bundle: &[u8]) -> PyResult<(String, String, Option<String>)> {
    let b = compile::unbundle(bundle).map_err(|e| fail(py, e.to_string(), &e.diagnostics()))?;
    Ok((b.template, b.instances, b.annotations))
}

/// (starts, ends) in character offsets for `char` or `whitespace` mode.
#[pyfunction]
#[pyo3(signature = (text, mode="whitespace"))]
fn boundaries(text: &str, mode: &str) -> PyResult<(Vec<usize>, Vec<usize>)> {
    let b = span::compute_boundaries(text, boundary(mode)?)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((b.starts, b.ends))
}

/// Snap a raw character interval outward to the nearest legal span.
#[pyfunction]
#[pyo3(signature = (text, start, end, mode="whitespace"))]
fn snap(text: &str, start: usize, end: usize, mode: &str) -> PyResult<(usize, usize)> {
    let b = span::compute_boundaries(text, boundary(mode)?)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    span::snap_span(start, end, &b).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn thresh(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ValidationError", m.py().get_type::<ValidationError>())?;
    m.add_class::<Typology>()?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(compile_ir, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize_annotations, m)?)?;
    m.add_function(wrap_pyfunction!(merge, m)?)?;
    m.add_function(wrap_pyfunction!(convert, m)?)?;
    m.add_function(wrap_pyfunction!(formats, m)?)?;
    m.add_function(wrap_pyfunction!(bundle, m)?)?;
    m.add_function(wrap_pyfunction!(unbundle, m)?)?;
    m.add_function(wrap_pyfunction!(boundaries, m)?)?;
    m.add_function(wrap_pyfunction!(snap, m)?)?;
    Ok(())
}
