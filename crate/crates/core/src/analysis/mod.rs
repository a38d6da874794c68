//! Success probabilities, critical noise levels and forbidden threshold
//! intervals for the three classical settings: plain communication,
//! entanglement-assisted communication and discrimination of two lossy
//! channels.
//!
//! Noise variances `sigma2` are given in the convention where the added
//! displacement has variance `sigma2 / 2`, i.e. the same unit as the
//! vacuum contribution `1/2`.

mod classical;
mod discrimination;
mod ea;
pub(crate) mod roots;
pub(crate) mod sweep;

pub use classical::{
    classical_total_variance, critical_sigma2_classical, forbidden_interval_classical, success_classical,
    ClassicalScenario,
};
pub use discrimination::{
    critical_sigma2_discrimination, discrimination_spec, forbidden_interval_discrimination,
    success_discrimination, DiscriminationScenario, NO_INTERIOR_MAXIMUM,
};
pub use ea::{
    ea_spec, ea_total_variance, forbidden_rectangle, mc_success_ea, success_ea, success_ea_quadrature, EAScenario,
    Quadrature,
};
pub use sweep::{sweep_success, Scheme, SweepCurve, NONMONOTONIC_MARGIN};

use crate::error::{domain, Result};
use crate::gaussian::{build_channel, success_probability, BinaryThresholdSpec, Orientation};

/// Where the extra Gaussian displacement is injected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseSite {
    /// Added to the input, before the lossy channel.
    Sender,
    /// Added to the output, just before detection.
    Receiver,
}

impl NoiseSite {
    /// Factor by which the noise variance reaches the detector.
    pub fn gain(self, eta: f64) -> f64 {
        match self {
            NoiseSite::Sender => eta,
            NoiseSite::Receiver => 1.0,
        }
    }
}

/// Threshold values for which added noise cannot help.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForbiddenInterval {
    pub lo: f64,
    pub hi: f64,
    /// Residual of the defining equation at `lo`.
    pub residual_lo: f64,
    /// Residual of the defining equation at `hi`.
    pub residual_hi: f64,
}

impl ForbiddenInterval {
    pub fn contains(&self, theta: f64) -> bool {
        self.lo <= theta && theta <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// One interval per quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForbiddenRectangle {
    pub q_interval: ForbiddenInterval,
    pub p_interval: ForbiddenInterval,
}

impl ForbiddenRectangle {
    /// Noise helps as soon as one threshold leaves its interval.
    pub fn admits_resonance(&self, theta_q: f64, theta_p: f64) -> bool {
        !self.q_interval.contains(theta_q) || !self.p_interval.contains(theta_p)
    }
}

pub(crate) fn check_sigma2(operation: &'static str, sigma2: f64) -> Result<()> {
    if !(sigma2 >= 0.0) {
        return domain(operation, format!("noise variance must be non-negative, got {sigma2}"));
    }
    Ok(())
}

/// Success probability of a threshold spec, allowing zero variances by
/// substituting the noiseless step function.
pub(crate) fn success_with_limits(spec: &BinaryThresholdSpec) -> Result<f64> {
    if spec.var0 > 0.0 && spec.var1 > 0.0 {
        let ch = build_channel(spec)?;
        return success_probability(&ch, spec.prior0);
    }
    let cdf = |mean: f64, var: f64| -> Result<f64> {
        if var > 0.0 {
            Ok(1.0 - crate::gaussian::gauss_tail(spec.theta, mean, var)?)
        } else if mean < spec.theta {
            Ok(1.0)
        } else {
            Ok(0.0)
        }
    };
    let below0 = cdf(spec.mean0, spec.var0)?;
    let below1 = cdf(spec.mean1, spec.var1)?;
    let (p00, p11) = match spec.orientation {
        Orientation::OneAbove => (below0, 1.0 - below1),
        Orientation::OneBelow => (1.0 - below0, below1),
    };
    Ok(spec.prior0 * p00 + (1.0 - spec.prior0) * p11)
}

/// Solves the classical-type interval equation
/// `ln(w (t + m) / ((1 - w)(t - m))) = 4 m t / base` on both sides of
/// `[-m, m]`, where `base` is twice the noise variance without added noise.
///
/// The critical noise is `4 m t / ln(...) - base`; its absolute value at
/// each root is reported as the residual. It must not exceed
/// [`ROOT_RESIDUAL_TOL`] unless the critical noise is so steep there that one
/// ulp in `t` moves it further.
pub(crate) fn symmetric_interval(
    operation: &'static str,
    m: f64,
    prior0: f64,
    base: f64,
    amplitude: f64,
) -> Result<ForbiddenInterval> {
    use crate::error::Error;
    if prior0 <= 0.0 || prior0 >= 1.0 {
        return Err(Error::NoCriticalPoint {
            operation,
            reason: format!("degenerate prior {prior0}"),
        });
    }
    if !(m > 0.0) {
        return Err(Error::NoCriticalPoint {
            operation,
            reason: "signal amplitude is zero".into(),
        });
    }
    let log_prior = (prior0 / (1.0 - prior0)).ln();
    // Written as a difference of logs so that the two sides mirror exactly
    // under t -> -t when the prior is balanced.
    let log_ratio = move |t: f64| log_prior + (t + m).abs().ln() - (t - m).abs().ln();
    let mut balance = move |t: f64| log_ratio(t) - 4.0 * m * t / base;
    let critical = move |t: f64| 4.0 * m * t / log_ratio(t) - base;
    let limit = 1e6 * amplitude.max(m);
    let inner = 1e-6 * m.max(1.0);
    let outer = 1e-3 * m.max(1.0);

    let (hi, _) = roots::root_from_edge(operation, &mut balance, m, 1.0, inner, outer, limit, 1.0)?;
    let (lo, _) = roots::root_from_edge(operation, &mut balance, -m, -1.0, inner, outer, limit, -1.0)?;

    let interval = ForbiddenInterval {
        lo,
        hi,
        residual_lo: critical(lo).abs(),
        residual_hi: critical(hi).abs(),
    };
    for (t, res) in [(lo, interval.residual_lo), (hi, interval.residual_hi)] {
        if !(res <= roots::residual_tolerance(critical, t)) {
            return Err(Error::Solver {
                operation,
                reason: format!("root residual above tolerance at {t}"),
                residual: res,
            });
        }
    }
    Ok(interval)
}

/// Accepted residual of the critical-noise equation at interval endpoints.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-10;
