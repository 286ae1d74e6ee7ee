//! Python bindings: `import pyfracmap`.

use std::cell::RefCell;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fracmap as fm;

fn err(e: fm::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = fm::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

/// Wraps a Python callable as `f64 -> f64`; the first Python error is kept
/// and the callback returns NaN from then on.
struct Callback<'py> {
    f: Bound<'py, PyAny>,
    failure: RefCell<Option<PyErr>>,
}

impl<'py> Callback<'py> {
    fn new(f: Bound<'py, PyAny>) -> Self {
        Self {
            f,
            failure: RefCell::new(None),
        }
    }

    fn call(&self, x: f64) -> f64 {
        if self.failure.borrow().is_some() {
            return f64::NAN;
        }
        match self.f.call1((x,)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => v,
            Err(e) => {
                *self.failure.borrow_mut() = Some(e);
                f64::NAN
            }
        }
    }

    fn finish<T>(self, res: fm::Result<T>) -> PyResult<T> {
        if let Some(e) = self.failure.into_inner() {
            return Err(e);
        }
        res.map_err(err)
    }
}

#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid(fm::UniformGrid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(a: f64, b: f64, n: usize) -> PyResult<Self> {
        fm::UniformGrid::new(a, b, n).map(Self).map_err(err)
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.b()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.intervals()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.0.h()
    }

    fn nodes(&self) -> Vec<f64> {
        self.0.nodes().collect()
    }

    fn __repr__(&self) -> String {
        format!("Grid({}, {}, {})", self.0.a(), self.0.b(), self.0.intervals())
    }
}

/// Samples on a uniform grid with an outside behavior: `zero`, `hold`,
/// `mirror` or `unspecified`.
#[pyclass(name = "Function", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFunction(fm::SampledFunction);

#[pymethods]
impl PyFunction {
    #[new]
    #[pyo3(signature = (grid, values, outside = "unspecified"))]
    fn new(grid: &PyGrid, values: Vec<f64>, outside: &str) -> PyResult<Self> {
        fm::SampledFunction::new(grid.0, values, parse(outside)?)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (f, grid, outside = "unspecified"))]
    fn sample(f: Bound<'_, PyAny>, grid: &PyGrid, outside: &str) -> PyResult<Self> {
        let outside = parse(outside)?;
        let cb = Callback::new(f);
        let res = fm::sample(|x| cb.call(x), grid.0);
        cb.finish(res).map(|s| Self(s.with_outside(outside)))
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values().to_vec()
    }

    #[getter]
    fn outside(&self) -> &'static str {
        self.0.outside().as_str()
    }

    fn nodes(&self) -> Vec<f64> {
        self.0.grid().nodes().collect()
    }

    fn with_outside(&self, outside: &str) -> PyResult<Self> {
        Ok(Self(self.0.clone().with_outside(parse(outside)?)))
    }

    /// Continues onto `window`, which must end where the function ends.
    fn extend(&self, kind: &str, window: &PyGrid) -> PyResult<Self> {
        fm::extend(&self.0, parse(kind)?, window.0).map(Self).map_err(err)
    }

    fn restrict(&self, sub: &PyGrid) -> PyResult<Self> {
        fm::restrict(&self.0, sub.0).map(Self).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }

    fn __repr__(&self) -> String {
        let g = self.0.grid();
        format!(
            "Function(Grid({}, {}, {}), outside={})",
            g.a(),
            g.b(),
            g.intervals(),
            self.0.outside().as_str()
        )
    }
}

#[pyfunction]
fn gamma(x: f64) -> PyResult<f64> {
    fm::gamma(x).map_err(err)
}

#[pyfunction]
fn beta(a: f64, b: f64) -> PyResult<f64> {
    fm::beta(a, b).map_err(err)
}

#[pyfunction]
fn gamma_complex(z: Complex64) -> PyResult<Complex64> {
    fm::gamma_complex(z).map_err(err)
}

/// Applies `op` (`rl_integral`, `rl_derivative`, `caputo`, `censored`,
/// `marchaud_plus`, `even_ext_derivative`) of order `alpha`.
#[pyfunction]
#[pyo3(signature = (op, f, alpha, tail = "analytic"))]
fn apply(op: &str, f: &PyFunction, alpha: f64, tail: &str) -> PyResult<PyFunction> {
    let params = fm::FracParams::with_alpha(alpha).map_err(err)?;
    fm::apply(parse(op)?, &f.0, &params, parse(tail)?)
        .map(PyFunction)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, p, weight = "unit"))]
fn lp_norm(f: &PyFunction, p: &str, weight: &str) -> PyResult<f64> {
    fm::lp_norm(&f.0, parse(p)?, parse(weight)?).map_err(err)
}

#[pyfunction]
fn gagliardo_seminorm(f: &PyFunction, p: f64, beta: f64) -> PyResult<f64> {
    fm::gagliardo_seminorm(&f.0, p, beta).map_err(err)
}

#[pyfunction]
fn holder_seminorm(f: &PyFunction, beta: f64) -> PyResult<f64> {
    fm::holder_seminorm(&f.0, beta).map_err(err)
}

/// `W^{p,order}(w)` norm as a dict with `lp_part`, `seminorm_part`, `total`.
#[pyfunction]
#[pyo3(signature = (f, p, order, weight = "unit"))]
fn sobolev_norm<'py>(
    py: Python<'py>,
    f: &PyFunction,
    p: &str,
    order: f64,
    weight: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let r = fm::sobolev_norm_with_order(&f.0, parse(p)?, order, parse(weight)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lp_part", r.lp_part)?;
    d.set_item("seminorm_part", r.seminorm_part)?;
    d.set_item("total", r.total)?;
    Ok(d)
}

#[pyfunction]
fn weight_class_margin<'py>(
    py: Python<'py>,
    weight: &str,
    alpha: f64,
    xs: Vec<f64>,
    radius: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let m = fm::weight_class_margin(parse(weight)?, alpha, &xs, radius).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("value", m.value)?;
    d.set_item("truncated", m.truncated)?;
    d.set_item("growth", m.growth)?;
    d.set_item("trend", m.trend)?;
    d.set_item("converges", m.converges)?;
    Ok(d)
}

#[pyfunction]
fn censor_kernel(r: f64, alpha: f64) -> PyResult<f64> {
    fm::censor_kernel(r, alpha).map_err(err)
}

/// `B(1 - z, α + z)`.
#[pyfunction]
fn kernel_mellin(z: Complex64, alpha: f64) -> PyResult<Complex64> {
    fm::kernel_mellin_closed_form(z, alpha).map_err(err)
}

/// `∫₀^∞ x^{z-1} f(x) dx` over `[eps, R]`.
#[pyfunction]
#[pyo3(signature = (f, z, eps = 1e-14, r = 1e16))]
fn mellin_transform(f: Bound<'_, PyAny>, z: Complex64, eps: f64, r: f64) -> PyResult<Complex64> {
    let cb = Callback::new(f);
    let res = fm::mellin_transform(|x| cb.call(x), z, (eps, r));
    cb.finish(res).map(|m| m.value)
}

#[pyfunction]
fn synthesize_u_from_v(v: Bound<'_, PyAny>, alpha: f64, xs: Vec<f64>) -> PyResult<Vec<f64>> {
    let cb = Callback::new(v);
    let res = fm::synthesize_u_from_v(|y| cb.call(y), alpha, &xs);
    cb.finish(res)
}

/// Recovers `v` from `u` at `xs` with an adaptively chosen contour length.
#[pyfunction]
#[pyo3(signature = (u, alpha, xs, dt = 0.05))]
fn reconstruct_left_extension(u: Bound<'_, PyAny>, alpha: f64, xs: Vec<f64>, dt: f64) -> PyResult<Vec<f64>> {
    let cb = Callback::new(u);
    let res = fm::reconstruct_left_extension_adaptive(|x| Ok(cb.call(x)), alpha, dt, &xs);
    cb.finish(res).map(|r| r.values)
}

fn rows_to_py<'py>(py: Python<'py>, rows: Vec<fm::ReportRow>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    rows.into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("probe", r.probe)?;
            d.set_item("alpha", r.alpha)?;
            d.set_item("s", r.s)?;
            d.set_item("p", r.p.map(|p| p.value()))?;
            d.set_item("beta", r.beta)?;
            d.set_item("gamma", r.gamma)?;
            d.set_item("n", r.n)?;
            d.set_item("discrepancy", r.discrepancy)?;
            d.set_item("tolerance", r.tolerance)?;
            d.set_item("ratio", r.ratio)?;
            d.set_item("pass", r.pass)?;
            Ok(d)
        })
        .collect()
}

/// Operator identities for a family token such as `trig:7:8:1` or `bump:0.8`.
#[pyfunction]
fn identity_suite<'py>(
    py: Python<'py>,
    alpha: f64,
    family: &str,
    resolutions: Vec<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let params = fm::FracParams::with_alpha(alpha).map_err(err)?;
    let fam: fm::TestFunctionFamily = parse(family)?;
    rows_to_py(py, fm::identity_suite(&params, &fam, &resolutions).map_err(err)?)
}

#[pyfunction]
fn power_law_oracle_suite<'py>(
    py: Python<'py>,
    alpha: f64,
    mus: Vec<f64>,
    n: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    rows_to_py(py, fm::power_law_oracle_suite(alpha, &mus, n).map_err(err)?)
}

#[pyfunction]
fn holder_loss_probe<'py>(py: Python<'py>, alpha: f64, beta: f64, n: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let fam = fm::TestFunctionFamily::new(fm::FamilyKind::PowerBump(beta), 1.0).map_err(err)?;
    rows_to_py(py, fm::holder_loss_probe(alpha, beta, &fam, n).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (alpha, s, p, families, resolutions, weight = "unit"))]
fn sobolev_mapping_probe<'py>(
    py: Python<'py>,
    alpha: f64,
    s: f64,
    p: &str,
    families: Vec<String>,
    resolutions: Vec<usize>,
    weight: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let params = fm::FracParams::new(alpha, s, parse(p)?, 1.0).map_err(err)?;
    let fams = families
        .iter()
        .map(|f| parse(f))
        .collect::<PyResult<Vec<fm::TestFunctionFamily>>>()?;
    rows_to_py(
        py,
        fm::sobolev_mapping_probe(&params, parse(weight)?, &fams, &resolutions).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (alpha, gammas, radius = 1000.0))]
fn weight_probe<'py>(py: Python<'py>, alpha: f64, gammas: Vec<f64>, radius: f64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    rows_to_py(py, fm::weight_probe(alpha, &gammas, radius).map_err(err)?)
}

#[pyfunction]
fn mellin_probe<'py>(py: Python<'py>, alpha: f64, xs: Vec<f64>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    rows_to_py(py, fm::mellin_probe(alpha, &xs).map_err(err)?)
}

#[pymodule]
fn pyfracmap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyFunction>()?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_complex, m)?)?;
    m.add_function(wrap_pyfunction!(apply, m)?)?;
    m.add_function(wrap_pyfunction!(lp_norm, m)?)?;
    m.add_function(wrap_pyfunction!(gagliardo_seminorm, m)?)?;
    m.add_function(wrap_pyfunction!(holder_seminorm, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_norm, m)?)?;
    m.add_function(wrap_pyfunction!(weight_class_margin, m)?)?;
    m.add_function(wrap_pyfunction!(censor_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_mellin, m)?)?;
    m.add_function(wrap_pyfunction!(mellin_transform, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_u_from_v, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_left_extension, m)?)?;
    m.add_function(wrap_pyfunction!(identity_suite, m)?)?;
    m.add_function(wrap_pyfunction!(power_law_oracle_suite, m)?)?;
    m.add_function(wrap_pyfunction!(holder_loss_probe, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_mapping_probe, m)?)?;
    m.add_function(wrap_pyfunction!(weight_probe, m)?)?;
    m.add_function(wrap_pyfunction!(mellin_probe, m)?)?;
    Ok(())
}
