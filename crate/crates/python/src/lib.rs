use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use walshlab_core::lab::{self, ErrorNorm, LemmaReport};
use walshlab_core::ops::TestFunction;
use walshlab_core::rational::fraction_string;
use walshlab_core::{dyadic, kernels, Grid, Rational};

fn value_error(e: walshlab_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((fraction_string(r),))
}

fn grid_values<'py, const D: usize>(py: Python<'py>, g: &Grid<D>) -> PyResult<Vec<Bound<'py, PyAny>>> {
    (0..g.values().len()).map(|i| fraction(py, &g.value(i))).collect()
}

fn rows<'py, const D: usize>(py: Python<'py>, g: &Grid<D>) -> PyResult<Bound<'py, PyList>> {
    let values = grid_values(py, g)?;
    let side = 1usize << g.resolution();
    if D == 1 {
        return PyList::new(py, values);
    }
    let out = PyList::empty(py);
    for row in values.chunks(side) {
        out.append(PyList::new(py, row)?)?;
    }
    Ok(out)
}

fn report_dict<'py>(py: Python<'py>, r: &LemmaReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("lemma", &r.lemma)?;
    let params = PyDict::new(py);
    for (k, v) in &r.params {
        params.set_item(k, v)?;
    }
    d.set_item("params", params)?;
    d.set_item("measured", fraction(py, &r.measured)?)?;
    d.set_item("bound", r.bound.as_ref().map(|b| fraction(py, b)).transpose()?)?;
    d.set_item("verdict", r.verdict.as_str())?;
    d.set_item("truncated", r.truncated)?;
    d.set_item("note", &r.note)?;
    Ok(d)
}

fn report_list<'py>(py: Python<'py>, reports: &[LemmaReport]) -> PyResult<Bound<'py, PyList>> {
    let out = PyList::empty(py);
    for r in reports {
        out.append(report_dict(py, r)?)?;
    }
    Ok(out)
}

fn parse_function(f: &str) -> PyResult<TestFunction> {
    f.parse().map_err(value_error)
}

/// `ω_n` on cell `cell` of resolution `m`.
#[pyfunction]
fn walsh(n: u64, cell: u64, m: u32) -> PyResult<i32> {
    if cell >> m != 0 {
        return Err(PyValueError::new_err(format!("{cell} is not a cell of resolution {m}")));
    }
    let x = dyadic::DyadicPoint::new(m, cell).map_err(value_error)?;
    dyadic::walsh(n.into(), &x).map_err(value_error)
}

/// Cell values of `D_n` at resolution `m`, as fractions.
#[pyfunction]
fn dirichlet(py: Python<'_>, n: u64, m: u32) -> PyResult<Bound<'_, PyList>> {
    rows(py, &kernels::dirichlet(n, m).map_err(value_error)?)
}

/// Cell values of the Fejer kernel `K_n` at resolution `m`.
#[pyfunction]
fn fejer(py: Python<'_>, n: u64, m: u32) -> PyResult<Bound<'_, PyList>> {
    rows(py, &kernels::fejer(n, m).map_err(value_error)?)
}

/// Rows of the triangular Fejer kernel `K_n^△` at resolution `m`.
#[pyfunction]
fn tri_fejer(py: Python<'_>, n: u64, m: u32) -> PyResult<Bound<'_, PyList>> {
    rows(py, &kernels::tri_fejer(n, m).map_err(value_error)?)
}

#[pyfunction]
fn tri_kernel_l1(py: Python<'_>, n: u64) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &lab::tri_kernel_l1(n).map_err(value_error)?)
}

#[pyfunction]
fn delta1(py: Python<'_>, a: u32) -> PyResult<Bound<'_, PyDict>> {
    let d = lab::delta1(a).map_err(value_error)?;
    let out = PyDict::new(py);
    out.set_item("full", fraction(py, &d.full)?)?;
    out.set_item("below", fraction(py, &d.below)?)?;
    out.set_item("special", fraction(py, &d.special)?)?;
    out.set_item("fourth_moment", fraction(py, &d.fourth_moment)?)?;
    Ok(out)
}

#[pyfunction]
fn quadruple_count(py: Python<'_>, a: u32) -> PyResult<u64> {
    py.detach(|| lab::quadruple_count(a)).map_err(value_error)
}

/// `[(n, error)]` of the triangular means of a test function such as
/// `"poly:1,2,1/3"`, in the norm `"l1"`, `"linf"` or `"linf-away"`.
#[pyfunction]
#[pyo3(signature = (f, ns, norm = "linf"))]
fn convergence<'py>(py: Python<'py>, f: &str, ns: Vec<u64>, norm: &str) -> PyResult<Vec<(u64, Bound<'py, PyAny>)>> {
    let f = parse_function(f)?;
    let norm: ErrorNorm = norm.parse().map_err(value_error)?;
    let errors = py
        .detach(|| lab::convergence_experiment(&f.grid, &ns, norm))
        .map_err(value_error)?;
    errors.iter().map(|(n, e)| Ok((*n, fraction(py, e)?))).collect()
}

#[pyfunction]
#[pyo3(signature = (n_max = 32, m = 6))]
fn identities(py: Python<'_>, n_max: u64, m: u32) -> PyResult<Bound<'_, PyList>> {
    let reports = py.detach(|| lab::identities(n_max, m)).map_err(value_error)?;
    report_list(py, &reports)
}

#[pyfunction]
fn l1_table(py: Python<'_>, n_min: u64, n_max: u64) -> PyResult<Bound<'_, PyList>> {
    let reports = py.detach(|| lab::l1_table(n_min..=n_max)).map_err(value_error)?;
    report_list(py, &reports)
}

#[pyfunction]
fn delta1_reports(py: Python<'_>, a_min: u32, a_max: u32) -> PyResult<Bound<'_, PyList>> {
    let reports = py.detach(|| lab::delta1_reports(a_min..=a_max)).map_err(value_error)?;
    report_list(py, &reports)
}

/// The `l1_table` rows as CSV text with the standard header.
#[pyfunction]
fn l1_table_csv(py: Python<'_>, n_min: u64, n_max: u64) -> PyResult<String> {
    let reports = py.detach(|| lab::l1_table(n_min..=n_max)).map_err(value_error)?;
    Ok(lab::to_csv(&reports, false))
}

#[pymodule]
fn walshlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CSV_HEADER", lab::CSV_HEADER)?;
    m.add_function(wrap_pyfunction!(walsh, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet, m)?)?;
    m.add_function(wrap_pyfunction!(fejer, m)?)?;
    m.add_function(wrap_pyfunction!(tri_fejer, m)?)?;
    m.add_function(wrap_pyfunction!(tri_kernel_l1, m)?)?;
    m.add_function(wrap_pyfunction!(delta1, m)?)?;
    m.add_function(wrap_pyfunction!(quadruple_count, m)?)?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    m.add_function(wrap_pyfunction!(identities, m)?)?;
    m.add_function(wrap_pyfunction!(l1_table, m)?)?;
    m.add_function(wrap_pyfunction!(l1_table_csv, m)?)?;
    m.add_function(wrap_pyfunction!(delta1_reports, m)?)?;
    Ok(())
}
