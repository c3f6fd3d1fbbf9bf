//! Python bindings. Experiments return their JSON report as a string; decode
//! it with `json.loads`.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use rotlab_core::dehn;
use rotlab_core::free_algebra::{Alphabet, FreePoly};
use rotlab_core::lab::{self, LabError, RunOptions, ScanSubset};
use rotlab_core::ncgb::{complete, CompletionOptions, MonomialOrder, Verdict};
use rotlab_core::relation_sets::{build, BuildParams, Tag};
use rotlab_core::symfun::BarPattern;

create_exception!(rotlab, RotlabError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    RotlabError::new_err(e.to_string())
}

fn report(r: Result<lab::ExperimentReport, LabError>) -> PyResult<String> {
    r.map(|r| r.to_json()).map_err(err)
}

#[allow(clippy::too_many_arguments)]
fn params(
    n: Option<u32>,
    bound: Option<u32>,
    bars: Option<Vec<u32>>,
    pattern: Option<String>,
    k: Option<u32>,
    inverses: Option<bool>,
) -> BuildParams {
    BuildParams { n, bound, bars: bars.map(BarPattern::new), pattern, k, inverses, y_truncation: None }
}

/// System tags known to `check` and `export_system`.
#[pyfunction]
fn tags() -> Vec<&'static str> {
    Tag::ALL.iter().map(|t| t.name()).collect()
}

/// Checks a theorem instance and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (tag, n=None, bound=None, bars=None, pattern=None, k=None, inverses=None, certificates=false))]
#[allow(clippy::too_many_arguments)]
fn check(
    py: Python<'_>,
    tag: &str,
    n: Option<u32>,
    bound: Option<u32>,
    bars: Option<Vec<u32>>,
    pattern: Option<String>,
    k: Option<u32>,
    inverses: Option<bool>,
    certificates: bool,
) -> PyResult<String> {
    let tag: Tag = tag.parse().map_err(err)?;
    let p = params(n, bound, bars, pattern, k, inverses);
    let opts = RunOptions {
        stop_at_first_failure: true,
        certificates,
        verify_certificates: certificates,
        ..Default::default()
    };
    py.detach(|| report(lab::cmd_check_theorem(tag, &p, &opts)))
}

/// A relation system as JSON.
#[pyfunction]
#[pyo3(signature = (tag, n=None, bound=None, bars=None, pattern=None, k=None, inverses=None))]
fn export_system(
    tag: &str,
    n: Option<u32>,
    bound: Option<u32>,
    bars: Option<Vec<u32>>,
    pattern: Option<String>,
    k: Option<u32>,
    inverses: Option<bool>,
) -> PyResult<String> {
    let tag: Tag = tag.parse().map_err(err)?;
    build(tag, &params(n, bound, bars, pattern, k, inverses)).map(|s| s.to_json()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (full=false))]
fn scan256(py: Python<'_>, full: bool) -> PyResult<String> {
    let subset = if full { ScanSubset::Full } else { ScanSubset::Stratified16 };
    py.detach(|| report(lab::cmd_scan_256(subset, &RunOptions::default())))
}

#[pyfunction]
fn counterexamples(py: Python<'_>) -> PyResult<String> {
    py.detach(|| report(lab::cmd_counterexamples(&RunOptions::default())))
}

#[pyfunction]
#[pyo3(signature = (k, n=None))]
fn rule_of_k(py: Python<'_>, k: u32, n: Option<u32>) -> PyResult<String> {
    py.detach(|| report(lab::cmd_scan_rule_of_k(k, n, &RunOptions::default())))
}

#[pyfunction]
fn identities() -> PyResult<String> {
    report(lab::cmd_verify_identities(None))
}

/// Validates builtin Dehn diagrams; `figure` picks one ("1", "2:5", ...).
#[pyfunction]
#[pyo3(signature = (figure=None))]
fn dehn_validate(figure: Option<&str>) -> PyResult<String> {
    report(lab::cmd_dehn_validate(figure))
}

/// A builtin figure in the diagram text format.
#[pyfunction]
fn dehn_figure(id: &str) -> PyResult<String> {
    dehn::figure(id).map(|f| f.diagram.to_dsl()).map_err(err)
}

/// Decides whether `query` lies in the two-sided ideal generated by
/// `generators` using a basis truncated at `bound`. Polynomials use the
/// text form, e.g. `"u1.u2 - u2.u1"`. Returns `(verdict, bound)`.
#[pyfunction]
fn membership(py: Python<'_>, generators: Vec<String>, query: &str, bound: u32) -> PyResult<(String, u32)> {
    let mut texts = generators;
    texts.push(query.to_string());
    let inferred: Vec<FreePoly> =
        texts.iter().map(|t| FreePoly::parse_infer(t)).collect::<Result<_, _>>().map_err(err)?;
    let alphabet = Alphabet::new(inferred.iter().flat_map(|p| p.support())).map_err(err)?;
    let mut polys: Vec<FreePoly> =
        texts.iter().map(|t| FreePoly::parse(t, &alphabet)).collect::<Result<_, _>>().map_err(err)?;
    let q = polys.pop().expect("query present");
    py.detach(|| {
        let gb = complete(&polys, &MonomialOrder::deglex(&alphabet), bound, &CompletionOptions::new()).map_err(err)?;
        Ok(match gb.membership(&q).map_err(err)? {
            Verdict::Member(c) => {
                if c.is_available() && !c.verify().map_err(err)? {
                    return Err(RotlabError::new_err("certificate failed to verify"));
                }
                ("Member".to_string(), bound)
            }
            Verdict::NotMemberUpToBound(b) => ("NotMemberUpToBound".to_string(), b),
            Verdict::Inconclusive(b) => ("Inconclusive".to_string(), b),
        })
    })
}

#[pymodule]
pub fn rotlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RotlabError", m.py().get_type::<RotlabError>())?;
    m.add_function(wrap_pyfunction!(tags, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(export_system, m)?)?;
    m.add_function(wrap_pyfunction!(scan256, m)?)?;
    m.add_function(wrap_pyfunction!(counterexamples, m)?)?;
    m.add_function(wrap_pyfunction!(rule_of_k, m)?)?;
    m.add_function(wrap_pyfunction!(identities, m)?)?;
    m.add_function(wrap_pyfunction!(dehn_validate, m)?)?;
    m.add_function(wrap_pyfunction!(dehn_figure, m)?)?;
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    Ok(())
}
