//! Python bindings: scenario classes with their success probabilities and
//! intervals, the qubit channel, the private-rate terms, and the CLI.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use stochres_core::analysis::{self, NoiseSite};
use stochres_core::cli::{self, Cli, CliError, RunConfig};
use stochres_core::{fock, private, qubit, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain { .. } | Error::NoCriticalPoint { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn site(name: &str) -> PyResult<NoiseSite> {
    match name {
        "sender" => Ok(NoiseSite::Sender),
        "receiver" => Ok(NoiseSite::Receiver),
        other => Err(PyValueError::new_err(format!("site must be 'sender' or 'receiver', got {other:?}"))),
    }
}

fn site_name(s: NoiseSite) -> &'static str {
    match s {
        NoiseSite::Sender => "sender",
        NoiseSite::Receiver => "receiver",
    }
}

/// Thresholds for which added noise cannot raise the success probability.
#[pyclass(frozen, skip_from_py_object, name = "Interval", module = "stochres")]
#[derive(Clone, Copy)]
struct Interval(analysis::ForbiddenInterval);

#[pymethods]
impl Interval {
    #[getter]
    fn lo(&self) -> f64 {
        self.0.lo
    }
    #[getter]
    fn hi(&self) -> f64 {
        self.0.hi
    }
    #[getter]
    fn residual_lo(&self) -> f64 {
        self.0.residual_lo
    }
    #[getter]
    fn residual_hi(&self) -> f64 {
        self.0.residual_hi
    }
    fn contains(&self, theta: f64) -> bool {
        self.0.contains(theta)
    }
    fn width(&self) -> f64 {
        self.0.width()
    }
    fn __repr__(&self) -> String {
        format!("Interval(lo={:?}, hi={:?})", self.0.lo, self.0.hi)
    }
}

/// Binary coherent signalling through a lossy channel, threshold decoding.
#[pyclass(frozen, skip_from_py_object, name = "ClassicalScenario", module = "stochres")]
#[derive(Clone, Copy)]
struct ClassicalScenario(analysis::ClassicalScenario);

#[pymethods]
impl ClassicalScenario {
    #[new]
    #[pyo3(signature = (eta, alpha, r = 0.0, prior = 0.5, site = "receiver"))]
    fn new(eta: f64, alpha: f64, r: f64, prior: f64, site: &str) -> PyResult<Self> {
        let s = analysis::ClassicalScenario::new(eta, alpha, r, prior, self::site(site)?).map_err(py_err)?;
        Ok(Self(s))
    }
    #[getter]
    fn eta(&self) -> f64 {
        self.0.eta
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha_q
    }
    #[getter]
    fn r(&self) -> f64 {
        self.0.r
    }
    #[getter]
    fn prior(&self) -> f64 {
        self.0.prior0
    }
    #[getter]
    fn site(&self) -> &'static str {
        site_name(self.0.noise_site)
    }
    /// `sqrt(eta) * alpha`, the received signal amplitude.
    fn signal_level(&self) -> f64 {
        self.0.signal_level()
    }
    fn total_variance(&self, sigma2: f64) -> PyResult<f64> {
        analysis::classical_total_variance(&self.0, sigma2).map_err(py_err)
    }
    fn success(&self, theta: f64, sigma2: f64) -> PyResult<f64> {
        analysis::success_classical(&self.0, theta, sigma2).map_err(py_err)
    }
    fn critical_sigma2(&self, theta: f64) -> PyResult<f64> {
        analysis::critical_sigma2_classical(&self.0, theta).map_err(py_err)
    }
    fn forbidden_interval(&self) -> PyResult<Interval> {
        analysis::forbidden_interval_classical(&self.0).map(Interval).map_err(py_err)
    }
    fn __repr__(&self) -> String {
        let s = &self.0;
        format!(
            "ClassicalScenario(eta={:?}, alpha={:?}, r={:?}, prior={:?}, site={:?})",
            s.eta,
            s.alpha_q,
            s.r,
            s.prior0,
            site_name(s.noise_site)
        )
    }
}

/// Two-quadrature signalling over an entangled (two-mode squeezed) link.
#[pyclass(frozen, skip_from_py_object, name = "EAScenario", module = "stochres")]
#[derive(Clone, Copy)]
struct EAScenario(analysis::EAScenario);

#[pymethods]
impl EAScenario {
    #[new]
    #[pyo3(signature = (eta, alpha_q, alpha_p, theta_q, theta_p, r = 0.0, prior_q = 0.5, prior_p = 0.5, site = "receiver"))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        eta: f64,
        alpha_q: f64,
        alpha_p: f64,
        theta_q: f64,
        theta_p: f64,
        r: f64,
        prior_q: f64,
        prior_p: f64,
        site: &str,
    ) -> PyResult<Self> {
        let s = analysis::EAScenario {
            eta,
            r,
            prior_q,
            prior_p,
            alpha_q,
            alpha_p,
            theta_q,
            theta_p,
            noise_site: self::site(site)?,
        };
        s.validate().map_err(py_err)?;
        Ok(Self(s))
    }
    /// Joint success of both quadrature bits.
    fn success(&self, sigma2_q: f64, sigma2_p: f64) -> PyResult<f64> {
        analysis::success_ea(&self.0, sigma2_q, sigma2_p).map_err(py_err)
    }
    /// `(q interval, p interval)`.
    fn forbidden_rectangle(&self) -> PyResult<(Interval, Interval)> {
        let r = analysis::forbidden_rectangle(&self.0).map_err(py_err)?;
        Ok((Interval(r.q_interval), Interval(r.p_interval)))
    }
}

/// Deciding between two transmissivities from one probe.
#[pyclass(frozen, skip_from_py_object, name = "DiscriminationScenario", module = "stochres")]
#[derive(Clone, Copy)]
struct DiscriminationScenario(analysis::DiscriminationScenario);

#[pymethods]
impl DiscriminationScenario {
    #[new]
    #[pyo3(signature = (eta0, eta1, alpha, r = 0.0, prior = 0.5, site = "receiver"))]
    fn new(eta0: f64, eta1: f64, alpha: f64, r: f64, prior: f64, site: &str) -> PyResult<Self> {
        let s = analysis::DiscriminationScenario {
            eta0,
            eta1,
            alpha_q: alpha,
            r,
            prior0: prior,
            noise_site: self::site(site)?,
        };
        s.validate().map_err(py_err)?;
        Ok(Self(s))
    }
    fn success(&self, theta: f64, sigma2: f64) -> PyResult<f64> {
        analysis::success_discrimination(&self.0, theta, sigma2).map_err(py_err)
    }
    fn critical_sigma2(&self, theta: f64) -> PyResult<f64> {
        analysis::critical_sigma2_discrimination(&self.0, theta).map_err(py_err)
    }
    fn forbidden_interval(&self) -> PyResult<Interval> {
        analysis::forbidden_interval_discrimination(&self.0).map(Interval).map_err(py_err)
    }
}

/// Private-rate terms for a classical scenario and fixed threshold.
#[pyclass(frozen, skip_from_py_object, name = "PrivateScenario", module = "stochres")]
#[derive(Clone, Copy)]
struct PrivateScenario(private::PrivateScenario);

#[pymethods]
impl PrivateScenario {
    #[new]
    fn new(base: &ClassicalScenario, theta: f64) -> PyResult<Self> {
        private::PrivateScenario::new(base.0, theta).map(Self).map_err(py_err)
    }
    fn bob_information(&self, sigma2: f64) -> PyResult<f64> {
        private::bob_information(&self.0, sigma2).map_err(py_err)
    }
    fn holevo_chi(&self, sigma2: f64) -> PyResult<f64> {
        let e = private::eve_ensemble(&self.0, sigma2).map_err(py_err)?;
        private::holevo_chi(&e).map_err(py_err)
    }
    /// `I(A:B) - chi`, may be negative.
    fn private_rate(&self, sigma2: f64) -> PyResult<f64> {
        private::private_rate(&self.0, sigma2).map_err(py_err)
    }
}

fn qparams(x0: f64, theta: f64, sigma2: f64) -> PyResult<qubit::QuantumCommParams> {
    qubit::QuantumCommParams::new(x0, theta, sigma2).map_err(py_err)
}

/// `(pi_less, pi_greater)` flip probabilities of the qubit channel.
#[pyfunction]
fn pi_probs(x0: f64, theta: f64, sigma2: f64) -> PyResult<(f64, f64)> {
    qubit::pi_probs(&qparams(x0, theta, sigma2)?).map_err(py_err)
}

#[pyfunction]
fn average_fidelity(x0: f64, theta: f64, sigma2: f64) -> PyResult<f64> {
    qubit::average_fidelity(&qparams(x0, theta, sigma2)?).map_err(py_err)
}

#[pyfunction]
fn critical_sigma2_quantum(x0: f64, theta: f64) -> PyResult<f64> {
    qubit::critical_sigma2_quantum(&qparams(x0, theta, 0.0)?).map_err(py_err)
}

/// Logarithmic negativity of the channel's Choi state.
#[pyfunction]
fn log_negativity(x0: f64, theta: f64, sigma2: f64) -> PyResult<f64> {
    let c = qubit::choi_state(&qparams(x0, theta, sigma2)?).map_err(py_err)?;
    qubit::log_negativity(&c).map_err(py_err)
}

fn gaussian(mean: [f64; 2], cov: [[f64; 2]; 2]) -> PyResult<fock::GaussianStateOneMode> {
    fock::GaussianStateOneMode::new(mean, cov).map_err(py_err)
}

/// Entropy in bits of a one-mode Gaussian state from its covariance.
#[pyfunction]
fn gaussian_entropy(mean: [f64; 2], cov: [[f64; 2]; 2]) -> PyResult<f64> {
    fock::gaussian_entropy(&gaussian(mean, cov)?).map_err(py_err)
}

/// The same entropy from a truncated Fock-space density matrix.
/// Returns `(entropy, dim)`.
#[pyfunction]
fn fock_entropy(mean: [f64; 2], cov: [[f64; 2]; 2]) -> PyResult<(f64, usize)> {
    let g = gaussian(mean, cov)?;
    let c = fock::converged_entropy(g.start_dim(), |d| fock::gaussian_to_fock(&g, d)).map_err(py_err)?;
    Ok((c.entropy, c.dim))
}

fn cli_err(e: CliError) -> PyErr {
    match e {
        CliError::Config(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Runs a CLI command (arguments without the program name) and returns
/// the rendered report and the notes instead of writing them.
#[pyfunction]
fn report(args: Vec<String>) -> PyResult<(String, Vec<String>)> {
    use clap::Parser;
    let argv = std::iter::once("stochres".to_string()).chain(args);
    let parsed = Cli::try_parse_from(argv).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let cfg = RunConfig::resolve(parsed.command).map_err(cli_err)?;
    let (rep, notes) = cli::execute(&cfg).map_err(cli_err)?;
    Ok((cli::render(&cfg, &rep).map_err(cli_err)?, notes))
}

/// Runs the CLI exactly as the binary would; returns the exit code.
#[pyfunction]
fn main(args: Vec<String>) -> u8 {
    cli::run(std::iter::once("stochres".to_string()).chain(args))
}

#[pymodule]
fn stochres(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Interval>()?;
    m.add_class::<ClassicalScenario>()?;
    m.add_class::<EAScenario>()?;
    m.add_class::<DiscriminationScenario>()?;
    m.add_class::<PrivateScenario>()?;
    m.add_function(wrap_pyfunction!(pi_probs, m)?)?;
    m.add_function(wrap_pyfunction!(average_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(critical_sigma2_quantum, m)?)?;
    m.add_function(wrap_pyfunction!(log_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(fock_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(main, m)?)?;
    Ok(())
}
