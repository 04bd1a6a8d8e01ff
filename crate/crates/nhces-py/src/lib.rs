//! Python bindings. Thin wrappers around the core types; every method keeps
//! the Rust name and units, and errors surface as ValueError (bad parameters)
//! or RuntimeError (numerical failure).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nhces::aggregation::AggregateEconomy;
use nhces::closedform::ClosedFormEconomy;
use nhces::distributions::{
    amoroso_cdf, amoroso_moment, amoroso_pdf, amoroso_quantile, amoroso_sample,
    special_case_reduction, AmorosoParams,
};
use nhces::euler::{EulerConfig, PathMode};
use nhces::grid::{quadrature_goods_grid, sample_goods_grid, GoodsGrid};
use nhces::logit::LogitEconomy;
use nhces::params::{NoiseSpec, PreferenceParams};
use nhces::{oracle, verify};

fn err(e: nhces::Error) -> PyErr {
    match e {
        nhces::Error::InvalidParameter(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// A preference block with degenerate disturbances and its closed-form
/// expenditure-utility mapping.
#[pyclass(frozen)]
struct Economy {
    inner: ClosedFormEconomy,
}

#[pymethods]
impl Economy {
    #[new]
    #[pyo3(signature = (rho, alpha, beta=1.0, xi_p=0.0, xi_omega=0.0))]
    fn new(rho: f64, alpha: f64, beta: f64, xi_p: f64, xi_omega: f64) -> PyResult<Self> {
        let params = PreferenceParams::new(rho, alpha, beta, xi_p, xi_omega, NoiseSpec::NONE)
            .map_err(err)?;
        Ok(Economy { inner: ClosedFormEconomy::new(params).map_err(err)? })
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.params().rho()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.params().alpha()
    }

    #[getter]
    fn m_const(&self) -> f64 {
        self.inner.m_const()
    }

    fn log_utility(&self, expenditure: f64) -> PyResult<f64> {
        self.inner.log_utility_of_expenditure(expenditure).map_err(err)
    }

    fn expenditure(&self, log_utility: f64) -> PyResult<f64> {
        self.inner.expenditure_of_log_utility(log_utility).map_err(err)
    }

    fn eps_bar(&self, expenditure: f64) -> f64 {
        self.inner.eps_bar(expenditure)
    }

    fn expenditure_elasticity(&self, eps: f64, expenditure: f64) -> f64 {
        self.inner.expenditure_elasticity(eps, expenditure)
    }

    fn household_share(&self, eps: f64, omega: f64, price: f64, expenditure: f64) -> f64 {
        self.inner.household_share(eps, omega, price, expenditure)
    }

    fn sample_grid(&self, n_goods: usize, seed: u64) -> PyResult<Grid> {
        let grid = sample_goods_grid(self.inner.params(), n_goods, seed).map_err(err)?;
        Ok(Grid { inner: grid })
    }

    fn quadrature_grid(&self, n_nodes: usize) -> PyResult<Grid> {
        let grid = quadrature_goods_grid(self.inner.params(), n_nodes).map_err(err)?;
        Ok(Grid { inner: grid })
    }

    /// Population layer: expenditures Amoroso-distributed with scale `k` and
    /// shape `m`; the power parameter is pinned by (rho, alpha).
    fn aggregate(&self, k: f64, m: f64) -> PyResult<Aggregate> {
        let agg = AggregateEconomy::new(self.inner.clone(), k, m).map_err(err)?;
        Ok(Aggregate { inner: agg })
    }

    /// Solve the whole expenditure path under per-period interest rates.
    #[pyo3(signature = (theta, discount, rates, e0, normalized=true))]
    fn euler_path<'py>(
        &self,
        py: Python<'py>,
        theta: f64,
        discount: f64,
        rates: Vec<f64>,
        e0: f64,
        normalized: bool,
    ) -> PyResult<Bound<'py, PyDict>> {
        let horizon = rates.len();
        let cfg = EulerConfig::new(self.inner.clone(), theta, discount, rates, horizon)
            .map_err(err)?;
        let mode = if normalized { PathMode::Normalized } else { PathMode::Unnormalized };
        let path = cfg.solve_path(e0, mode).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("expenditures", path.expenditures)?;
        out.set_item("log_utilities", path.log_utilities)?;
        out.set_item("growth_factors", path.growth_factors)?;
        out.set_item("residuals", path.residuals)?;
        Ok(out)
    }
}

/// A finite menu of goods.
#[pyclass(frozen)]
struct Grid {
    inner: GoodsGrid,
}

#[pymethods]
impl Grid {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn epsilons(&self) -> Vec<f64> {
        self.inner.goods().iter().map(|g| g.epsilon).collect()
    }

    fn prices(&self) -> Vec<f64> {
        self.inner.goods().iter().map(|g| g.price).collect()
    }

    fn omegas(&self) -> Vec<f64> {
        self.inner.goods().iter().map(|g| g.omega).collect()
    }

    fn weights(&self) -> Vec<f64> {
        self.inner.goods().iter().map(|g| g.weight).collect()
    }

    /// Brute-force demand at one expenditure level: shares, utility, and the
    /// share-weighted mean income-elasticity parameter.
    fn demand<'py>(
        &self,
        py: Python<'py>,
        rho: f64,
        expenditure: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let point = oracle::demand(&self.inner, rho, expenditure).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("shares", point.shares)?;
        out.set_item("quantities", point.quantities)?;
        out.set_item("utility", point.utility)?;
        out.set_item("eps_bar", point.eps_bar)?;
        Ok(out)
    }
}

/// Aggregation of household shares over the expenditure distribution.
#[pyclass(frozen)]
struct Aggregate {
    inner: AggregateEconomy,
}

#[pymethods]
impl Aggregate {
    fn share(&self, eps: f64, omega: f64, price: f64) -> f64 {
        self.inner.aggregate_share(eps, omega, price)
    }

    fn share_mean_form(&self, eps: f64, omega: f64, price: f64) -> PyResult<f64> {
        self.inner.aggregate_share_mean_form(eps, omega, price).map_err(err)
    }

    /// Mean-expenditure approximation and its relative deviation from the
    /// exact aggregate.
    fn share_approx(&self, eps: f64, omega: f64, price: f64) -> PyResult<(f64, f64)> {
        let a = self.inner.aggregate_share_approx(eps, omega, price).map_err(err)?;
        Ok((a.value, a.rel_dev_from_exact))
    }

    /// Monte Carlo estimate (mean, standard error).
    fn share_mc(
        &self,
        eps: f64,
        omega: f64,
        price: f64,
        draws: usize,
        seed: u64,
    ) -> PyResult<(f64, f64)> {
        let mc = self.inner.mc_aggregate_share(eps, omega, price, draws, seed).map_err(err)?;
        Ok((mc.mean, mc.std_error))
    }

    fn mean_expenditure(&self) -> PyResult<f64> {
        self.inner.mean_expenditure().map_err(err)
    }

    fn expenditure_dist(&self) -> Amoroso {
        Amoroso { inner: *self.inner.expenditure_dist() }
    }
}

/// The four-parameter Amoroso family.
#[pyclass(frozen)]
struct Amoroso {
    inner: AmorosoParams,
}

#[pymethods]
impl Amoroso {
    #[new]
    #[pyo3(signature = (k, m, n, l=0.0))]
    fn new(k: f64, m: f64, n: f64, l: f64) -> PyResult<Self> {
        Ok(Amoroso { inner: AmorosoParams::new(l, k, m, n).map_err(err)? })
    }

    #[getter]
    fn l(&self) -> f64 {
        self.inner.l()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.inner.k()
    }

    #[getter]
    fn m(&self) -> f64 {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> f64 {
        self.inner.n()
    }

    fn pdf(&self, x: f64) -> PyResult<f64> {
        amoroso_pdf(&self.inner, x).map_err(err)
    }

    fn cdf(&self, x: f64) -> f64 {
        amoroso_cdf(&self.inner, x)
    }

    fn quantile(&self, prob: f64) -> PyResult<f64> {
        amoroso_quantile(&self.inner, prob).map_err(err)
    }

    fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        amoroso_sample(&self.inner, count, seed)
    }

    fn moment(&self, order: f64) -> PyResult<f64> {
        amoroso_moment(&self.inner, order).map_err(err)
    }

    /// Name of the textbook distribution this parameter point collapses to,
    /// or None.
    fn special_case(&self) -> Option<String> {
        special_case_reduction(&self.inner).map(|c| c.to_string())
    }
}

/// Discrete-choice view of the demand system.
#[pyclass(frozen)]
struct Logit {
    inner: LogitEconomy,
}

#[pymethods]
impl Logit {
    #[new]
    fn new(grid: &Grid, rho: f64, expenditure: f64) -> PyResult<Self> {
        let econ = LogitEconomy::new(grid.inner.clone(), rho, expenditure).map_err(err)?;
        Ok(Logit { inner: econ })
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu()
    }

    fn probabilities(&self) -> Vec<f64> {
        self.inner.choice_probabilities()
    }

    fn simulate(&self, households: usize, seed: u64) -> PyResult<Vec<u64>> {
        self.inner.simulate_choices(households, seed).map_err(err)
    }
}

/// Run the full verification battery; returns (name, passed, detail) rows.
#[pyfunction]
fn run_checks() -> Vec<(String, bool, String)> {
    verify::run_all()
        .into_iter()
        .map(|c| (c.name.to_string(), c.passed, c.detail))
        .collect()
}

#[pymodule]
fn nhces_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Economy>()?;
    m.add_class::<Grid>()?;
    m.add_class::<Aggregate>()?;
    m.add_class::<Amoroso>()?;
    m.add_class::<Logit>()?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
