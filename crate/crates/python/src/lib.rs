use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qpot_core::bounds;
use qpot_core::covariance;
use qpot_core::figures;
use qpot_core::mixed;
use qpot_core::numerics::{Grid, ScalarField, SymMatrix};
use qpot_core::qpotential;
use qpot_core::states::{self, TestFunction};

fn err(e: qpot_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rows(m: &SymMatrix) -> Vec<Vec<f64>> {
    m.rows()
}

/// Kinetic matrix from a scalar (times identity) or a nested list.
fn kinetic(dim: usize, m: Option<&Bound<'_, PyAny>>) -> PyResult<SymMatrix> {
    let Some(m) = m else {
        return Ok(SymMatrix::from_diagonal(&vec![1.0; dim]));
    };
    if let Ok(x) = m.extract::<f64>() {
        return Ok(SymMatrix::from_diagonal(&vec![x; dim]));
    }
    let r: Vec<Vec<f64>> = m.extract()?;
    SymMatrix::from_rows(&r).map_err(err)
}

/// A sampled pure state `ψ = Ω e^{iS/ħ}` on a grid.
#[pyclass(name = "PolarState", frozen)]
struct PyPolarState {
    inner: states::PolarState,
}

#[pymethods]
impl PyPolarState {
    /// Oscillator eigenstate with ground-state width `dq0` on its recommended box.
    #[staticmethod]
    #[pyo3(signature = (n, dq0=1.0, hbar=1.0, points=513))]
    fn ho(n: u32, dq0: f64, hbar: f64, points: usize) -> PyResult<Self> {
        let b = states::ho_box(n, dq0);
        let grid = Grid::line(-b, b, points).map_err(err)?;
        Ok(PyPolarState { inner: states::ho_eigenstate(n, dq0, &grid, hbar).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (lam, mu, hbar=1.0, points=2049))]
    fn poschl_teller(lam: i64, mu: i64, hbar: f64, points: usize) -> PyResult<Self> {
        let grid = Grid::line(-states::PT_BOX, states::PT_BOX, points).map_err(err)?;
        Ok(PyPolarState { inner: states::poschl_teller_state(lam, mu, &grid, hbar).map_err(err)? })
    }

    /// One-dimensional Gaussian with phase `p0 q + chirp (q - mean)^2 / 2`.
    #[staticmethod]
    #[pyo3(signature = (variance, mean=0.0, momentum=0.0, chirp=0.0, hbar=1.0, half_width=None, points=513))]
    fn gaussian(
        variance: f64,
        mean: f64,
        momentum: f64,
        chirp: f64,
        hbar: f64,
        half_width: Option<f64>,
        points: usize,
    ) -> PyResult<Self> {
        let w = half_width.unwrap_or(8.0 * variance.sqrt() + mean.abs());
        let grid = Grid::line(-w, w, points).map_err(err)?;
        Ok(PyPolarState { inner: mixed::chirped_gaussian(variance, mean, momentum, chirp, &grid, hbar).map_err(err)? })
    }

    /// From samples of Re ψ and Im ψ on the uniform grid `[lower, upper]`.
    #[staticmethod]
    #[pyo3(signature = (lower, upper, re, im, hbar=1.0))]
    fn from_psi(lower: f64, upper: f64, re: Vec<f64>, im: Vec<f64>, hbar: f64) -> PyResult<Self> {
        let grid = Grid::line(lower, upper, re.len()).map_err(err)?;
        let re = ScalarField::new(grid.clone(), re).map_err(err)?;
        let im = ScalarField::new(grid, im).map_err(err)?;
        Ok(PyPolarState { inner: states::polar_decompose(&re, &im, hbar).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.inner.hbar()
    }

    #[getter]
    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Grid coordinates of every node, in storage order.
    fn points(&self) -> Vec<Vec<f64>> {
        let g = self.inner.grid();
        (0..g.len()).map(|i| g.point(i)[..g.dim()].to_vec()).collect()
    }

    fn omega(&self) -> Vec<f64> {
        self.inner.omega().values().to_vec()
    }

    fn phase(&self) -> Vec<f64> {
        self.inner.phase().values().to_vec()
    }

    fn position_cov(&self) -> Vec<Vec<f64>> {
        rows(&self.inner.position_cov())
    }

    #[pyo3(signature = (m=None))]
    fn mvqp(&self, m: Option<&Bound<'_, PyAny>>) -> PyResult<f64> {
        qpotential::mvqp(&self.inner, &kinetic(self.inner.dim(), m)?).map_err(err)
    }

    /// `Q(q)` at every node; `None` in masked cells.
    #[pyo3(signature = (m=None))]
    fn quantum_potential(&self, m: Option<&Bound<'_, PyAny>>) -> PyResult<Vec<Option<f64>>> {
        let f = qpotential::quantum_potential(&self.inner, &kinetic(self.inner.dim(), m)?).map_err(err)?;
        Ok((0..self.inner.grid().len()).map(|i| f.get(i)).collect())
    }

    fn vnc(&self) -> Vec<Vec<f64>> {
        rows(&qpotential::vnc(&self.inner))
    }

    /// `L_Q(T0)` for a test function sampled on the grid.
    #[pyo3(signature = (t0, m=None))]
    fn bound(&self, t0: Vec<f64>, m: Option<&Bound<'_, PyAny>>) -> PyResult<f64> {
        let field = ScalarField::new(self.inner.grid().clone(), t0).map_err(err)?;
        let t = TestFunction::sampled(field, "python");
        bounds::lq_value(&self.inner, &kinetic(self.inner.dim(), m)?, &t).map_err(err)
    }

    /// `(lower, upper)` range of the bound over linear test functions.
    #[pyo3(signature = (m=None))]
    fn linear_bound(&self, m: Option<&Bound<'_, PyAny>>) -> PyResult<(f64, f64)> {
        let lb = bounds::linear_bound(&self.inner, &kinetic(self.inner.dim(), m)?).map_err(err)?;
        Ok((lb.lower, lb.upper))
    }

    #[pyo3(signature = (m=None))]
    fn theorem2_bound(&self, m: Option<&Bound<'_, PyAny>>) -> PyResult<f64> {
        Ok(bounds::theorem2_bound(&self.inner, &kinetic(self.inner.dim(), m)?).map_err(err)?.value)
    }

    /// Position, momentum and split momentum covariances plus the RSUR margin.
    #[pyo3(signature = (m=None))]
    fn covariance<'py>(&self, py: Python<'py>, m: Option<&Bound<'py, PyAny>>) -> PyResult<Bound<'py, PyDict>> {
        let r = covariance::covariance_report(&self.inner, &kinetic(self.inner.dim(), m)?).map_err(err)?;
        let rs = covariance::rsur_check(&r, self.inner.hbar()).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("v", rows(&r.v))?;
        d.set_item("vt", rows(&r.vt))?;
        d.set_item("vc", rows(&r.vc))?;
        d.set_item("vnc", rows(&r.vnc))?;
        d.set_item("pc", r.pc.clone())?;
        d.set_item("rsur_min_eigenvalue", rs.min_eigenvalue)?;
        d.set_item("rsur_pass", rs.pass)?;
        Ok(d)
    }
}

/// Thermal oscillator state; returns `(mvqp, closed_form, K)`.
#[pyfunction]
#[pyo3(signature = (beta_hnu, dq0=1.0, hbar=1.0, points=1025))]
fn thermal_mvqp(beta_hnu: f64, dq0: f64, hbar: f64, points: usize) -> PyResult<(f64, f64, usize)> {
    let k = mixed::thermal_truncation(beta_hnu);
    let b = mixed::thermal_box(k, dq0);
    let grid = Grid::line(-b, b, points).map_err(err)?;
    let ms = mixed::thermal_state(hbar, beta_hnu, dq0, Some(k), &grid).map_err(err)?;
    let q = mixed::mixed_mvqp(&mixed::assemble_density(&ms).map_err(err)?, 1.0).map_err(err)?;
    Ok((q, mixed::thermal_mvqp(beta_hnu, 1.0, dq0, hbar), k))
}

#[pyfunction]
#[pyo3(signature = (mu, n, mass=0.5, hbar=1.0))]
fn pt_bound_tanh_n(mu: i64, n: i64, mass: f64, hbar: f64) -> PyResult<f64> {
    bounds::pt_bound_tanh_n(mu, n, mass, hbar).map_err(err)
}

#[pyfunction]
fn powerlaw_coefficient(k: i64) -> PyResult<f64> {
    bounds::powerlaw_coefficients(k).map_err(err)
}

/// `(mu, n, bound, mvqp)` rows.
#[pyfunction]
fn figure1(mus: Vec<i64>, ns: Vec<i64>) -> PyResult<Vec<(i64, i64, f64, f64)>> {
    Ok(figures::figure1(&mus, &ns).map_err(err)?.into_iter().map(|r| (r.mu, r.n, r.bound, r.mvqp)).collect())
}

/// `(mu, mvqp, linear_bound, difference)` rows.
#[pyfunction]
fn figure2(mus: Vec<i64>) -> PyResult<Vec<(i64, f64, f64, f64)>> {
    Ok(figures::figure2(&mus)
        .map_err(err)?
        .into_iter()
        .map(|r| (r.mu, r.mvqp, r.linear_bound, r.difference))
        .collect())
}

#[pymodule]
fn qpot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolarState>()?;
    m.add_function(wrap_pyfunction!(thermal_mvqp, m)?)?;
    m.add_function(wrap_pyfunction!(pt_bound_tanh_n, m)?)?;
    m.add_function(wrap_pyfunction!(powerlaw_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(figure1, m)?)?;
    m.add_function(wrap_pyfunction!(figure2, m)?)?;
    Ok(())
}
