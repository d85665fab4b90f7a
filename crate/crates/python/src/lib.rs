//! Python bindings: the forward operators, information quantities, data
//! generation, the marginal posterior target, the sampler and the
//! limiting-normal diagnostics.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use heatbvm::{self as core, Diffusivity, SineCoefficients};

fn value_err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn coeffs(v: Vec<f64>) -> PyResult<SineCoefficients> {
    SineCoefficients::new(v).map_err(value_err)
}

fn theta(v: f64) -> PyResult<Diffusivity> {
    Diffusivity::new(v).map_err(value_err)
}

#[pyfunction]
fn apply_k(f: Vec<f64>, theta_: f64, t_final: f64) -> PyResult<Vec<f64>> {
    check_time(t_final)?;
    Ok(core::apply_k(&coeffs(f)?, theta(theta_)?, t_final).into())
}

#[pyfunction]
fn apply_kdot(f: Vec<f64>, theta_: f64, t_final: f64) -> PyResult<Vec<f64>> {
    check_time(t_final)?;
    Ok(core::apply_kdot(&coeffs(f)?, theta(theta_)?, t_final).into())
}

#[pyfunction]
fn heat_solution(f: Vec<f64>, theta_: f64, x: f64, t: f64) -> PyResult<f64> {
    core::heat_solution(&coeffs(f)?, theta(theta_)?, x, t).map_err(value_err)
}

#[pyfunction]
fn least_favourable_direction(theta0: f64, f0: Vec<f64>, t_final: f64) -> PyResult<Vec<f64>> {
    check_time(t_final)?;
    Ok(core::least_favourable_direction(theta(theta0)?, &coeffs(f0)?, t_final).into())
}

#[pyfunction]
fn parametric_fisher(theta0: f64, f0: Vec<f64>, t_final: f64) -> PyResult<f64> {
    check_time(t_final)?;
    Ok(core::parametric_fisher(theta(theta0)?, &coeffs(f0)?, t_final))
}

#[pyfunction]
fn efficient_fisher(theta0: f64, f0: Vec<f64>, t_final: f64) -> PyResult<f64> {
    check_time(t_final)?;
    Ok(core::efficient_fisher(theta(theta0)?, &coeffs(f0)?, t_final))
}

#[pyfunction]
fn sigma_k(alpha: f64, k: usize) -> PyResult<f64> {
    if alpha.is_nan() || alpha <= 0.0 || k == 0 {
        return Err(PyValueError::new_err("need alpha > 0 and k >= 1"));
    }
    Ok(core::sigma_k(alpha, k))
}

#[pyfunction]
fn ground_truth_f0(m: usize) -> PyResult<Vec<f64>> {
    if m == 0 {
        return Err(PyValueError::new_err("m must be at least 1"));
    }
    Ok(core::ground_truth_f0(m).into())
}

#[pyfunction]
fn bvm_zone(alpha: f64, beta: f64) -> bool {
    core::bvm_zone(alpha, beta)
}

#[pyfunction]
fn contraction_rate(alpha: f64, beta: f64, n: f64) -> PyResult<f64> {
    if n.is_nan() || n < 1.0 {
        return Err(PyValueError::new_err("n must be >= 1"));
    }
    Ok(core::contraction_rate(alpha, beta, n))
}

fn check_time(t_final: f64) -> PyResult<()> {
    if t_final.is_finite() && t_final > 0.0 {
        Ok(())
    } else {
        Err(PyValueError::new_err(format!("final time must be > 0, got {t_final}")))
    }
}

/// Noisy coefficient pair `(x1, x2)`.
#[pyclass(name = "Observations", frozen)]
struct PyObservations {
    inner: core::Observations,
}

#[pymethods]
impl PyObservations {
    #[getter]
    fn x1(&self) -> Vec<f64> {
        self.inner.x1().to_vec()
    }

    #[getter]
    fn x2(&self) -> Vec<f64> {
        self.inner.x2().to_vec()
    }

    #[getter]
    fn n(&self) -> f64 {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }
}

#[pyfunction]
#[pyo3(signature = (theta0, f0, t_final, n, seed, noise_scale = 1.0, beta = 1.5))]
fn generate(
    theta0: f64,
    f0: Vec<f64>,
    t_final: f64,
    n: f64,
    seed: u64,
    noise_scale: f64,
    beta: f64,
) -> PyResult<PyObservations> {
    let f0 = coeffs(f0)?;
    let m = f0.m();
    let truth = core::TruthSpec::new(theta(theta0)?, f0, beta).map_err(value_err)?;
    let inner = core::generate(&truth, t_final, n, m, seed, noise_scale).map_err(value_err)?;
    Ok(PyObservations { inner })
}

/// Log marginal posterior of the diffusivity.
#[pyclass(name = "PosteriorTarget", frozen)]
struct PyPosteriorTarget {
    inner: core::PosteriorTarget,
}

#[pymethods]
impl PyPosteriorTarget {
    #[new]
    #[pyo3(signature = (obs, alpha, t_final, theta_lo = 0.001, theta_hi = 0.1, unsquared_decay = false))]
    fn new(
        obs: &PyObservations,
        alpha: f64,
        t_final: f64,
        theta_lo: f64,
        theta_hi: f64,
        unsquared_decay: bool,
    ) -> PyResult<Self> {
        let m = obs.inner.m();
        let model = core::ModelConfig::new(theta_lo, theta_hi, t_final, obs.inner.n(), m)
            .map_err(value_err)?;
        let prior = core::SeriesPrior::new(alpha, m).map_err(value_err)?;
        let form = if unsquared_decay {
            core::MarginalForm::UnsquaredDecay
        } else {
            core::MarginalForm::Derived
        };
        let inner = core::PosteriorTarget::new(obs.inner.clone(), prior, &model)
            .map_err(value_err)?
            .with_form(form);
        Ok(Self { inner })
    }

    fn log_density(&self, theta: f64) -> f64 {
        self.inner.log_density(theta)
    }

    /// Runs random-walk MH; `proposal_sd=None` adapts the step during burn-in.
    #[pyo3(signature = (iterations, burn_in, seed, init, proposal_sd = None))]
    fn sample(
        &self,
        py: Python<'_>,
        iterations: usize,
        burn_in: usize,
        seed: u64,
        init: f64,
        proposal_sd: Option<f64>,
    ) -> PyResult<PyChain> {
        let (lo, hi) = self.inner.bounds();
        let proposal = match proposal_sd {
            Some(sd) => core::ProposalScale::Fixed(sd),
            None => core::ProposalScale::Auto {
                initial: (hi - lo) / 100.0,
            },
        };
        let cfg = core::MhConfig {
            iterations,
            burn_in,
            proposal,
            init,
            seed,
        };
        let target = &self.inner;
        let chain = py
            .detach(|| core::run_mh(&cfg, |th| target.log_density(th)))
            .map_err(value_err)?;
        Ok(PyChain { inner: chain })
    }
}

#[pyclass(name = "Chain", frozen)]
struct PyChain {
    inner: core::Chain,
}

#[pymethods]
impl PyChain {
    #[getter]
    fn samples(&self) -> Vec<f64> {
        self.inner.samples().to_vec()
    }

    #[getter]
    fn burn_in(&self) -> usize {
        self.inner.burn_in()
    }

    #[getter]
    fn proposal_sd(&self) -> f64 {
        self.inner.proposal_sd()
    }

    fn acceptance_rate(&self) -> f64 {
        core::acceptance_rate(&self.inner)
    }

    /// `(posterior_mean, posterior_var, ess)` over post-burn-in samples.
    fn summarize(&self) -> PyResult<(f64, f64, f64)> {
        let s = core::summarize(&self.inner).map_err(value_err)?;
        Ok((s.posterior_mean, s.posterior_var, s.ess))
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }
}

/// `(center, variance)` of the limiting normal.
#[pyfunction]
fn limiting_normal(center: f64, theta0: f64, f0: Vec<f64>, t_final: f64, n: f64) -> PyResult<(f64, f64)> {
    check_time(t_final)?;
    let truth = core::TruthSpec::new(theta(theta0)?, coeffs(f0)?, 1.5).map_err(value_err)?;
    let ln = core::limiting_normal(center, &truth, t_final, n).map_err(value_err)?;
    Ok((ln.center, ln.variance))
}

#[pyfunction]
fn ks_distance(samples: Vec<f64>, center: f64, variance: f64) -> PyResult<f64> {
    let r = core::LimitingNormal::new(center, variance).map_err(value_err)?;
    core::ks_distance(&samples, &r).map_err(value_err)
}

#[pyfunction]
#[pyo3(signature = (samples, center, variance, bins = 50))]
fn tv_distance_histogram(samples: Vec<f64>, center: f64, variance: f64, bins: usize) -> PyResult<f64> {
    let r = core::LimitingNormal::new(center, variance).map_err(value_err)?;
    core::tv_distance_histogram(&samples, &r, bins).map_err(value_err)
}

/// Validates config text; raises with every violation listed.
#[pyfunction]
fn validate_config(text: &str) -> PyResult<String> {
    let cfg = core::experiment::validate_config(text)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(cfg.name)
}

/// Runs a configured experiment and returns the output directory.
#[pyfunction]
fn run_experiment(py: Python<'_>, text: &str, out_dir: &str) -> PyResult<String> {
    let cfg = core::experiment::validate_config(text)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = std::path::PathBuf::from(out_dir);
    py.detach(|| core::experiment::run_experiment(&cfg, &out))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(out_dir.to_string())
}

#[pymodule]
fn pyheatbvm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(apply_k, m)?)?;
    m.add_function(wrap_pyfunction!(apply_kdot, m)?)?;
    m.add_function(wrap_pyfunction!(heat_solution, m)?)?;
    m.add_function(wrap_pyfunction!(least_favourable_direction, m)?)?;
    m.add_function(wrap_pyfunction!(parametric_fisher, m)?)?;
    m.add_function(wrap_pyfunction!(efficient_fisher, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_k, m)?)?;
    m.add_function(wrap_pyfunction!(ground_truth_f0, m)?)?;
    m.add_function(wrap_pyfunction!(bvm_zone, m)?)?;
    m.add_function(wrap_pyfunction!(contraction_rate, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(limiting_normal, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance, m)?)?;
    m.add_function(wrap_pyfunction!(tv_distance_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(validate_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_class::<PyObservations>()?;
    m.add_class::<PyPosteriorTarget>()?;
    m.add_class::<PyChain>()?;
    Ok(())
}
