//! Gaussian noise plus threshold detection, reduced to a binary channel.
//!
//! Every scheme in this crate ends the same way: the receiver observes a
//! Gaussian random variable whose mean depends on the transmitted bit and
//! compares it with a threshold. This module turns the two conditional
//! Gaussians and the threshold into the induced binary channel.
//!
//! Variances here are *total* variances of the observed signal. Scheme
//! modules are responsible for composing them from squeezing, loss and
//! added noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};

/// Which side of the threshold decodes to `Y = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `Y = 1` when the signal is at or above the threshold.
    OneAbove,
    /// `Y = 1` when the signal is strictly below the threshold.
    OneBelow,
}

/// Two conditional Gaussians, a threshold and a prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryThresholdSpec {
    pub mean0: f64,
    pub mean1: f64,
    pub var0: f64,
    pub var1: f64,
    pub theta: f64,
    /// Probability of sending `X = 0`.
    pub prior0: f64,
    pub orientation: Orientation,
}

impl BinaryThresholdSpec {
    pub fn validate(&self) -> Result<()> {
        check_prior("BinaryThresholdSpec", self.prior0)?;
        for (name, v) in [("var0", self.var0), ("var1", self.var1)] {
            if !(v > 0.0) || !v.is_finite() {
                return domain("BinaryThresholdSpec", format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !self.mean0.is_finite() || !self.mean1.is_finite() || self.theta.is_nan() {
            return domain("BinaryThresholdSpec", "means must be finite and theta not NaN");
        }
        Ok(())
    }
}

/// The binary channel induced by threshold detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdChannel {
    /// `P(Y=0 | X=0)`.
    pub p00: f64,
    /// `P(Y=1 | X=1)`.
    pub p11: f64,
}

impl ThresholdChannel {
    pub fn new(p00: f64, p11: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p00) || !(0.0..=1.0).contains(&p11) {
            return domain("ThresholdChannel", format!("probabilities out of [0,1]: ({p00}, {p11})"));
        }
        Ok(Self { p00, p11 })
    }
}

/// Result of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Sample mean and standard error of the mean from running sums.
    pub(crate) fn from_sums(sum: f64, sum_sq: f64, n: u64, seed: u64) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            estimate: mean,
            std_error: (var / nf).sqrt(),
            n_samples: n,
            seed,
        }
    }
}

pub(crate) fn check_prior(operation: &'static str, prior0: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&prior0) {
        return domain(operation, format!("prior must lie in [0,1], got {prior0}"));
    }
    Ok(())
}

/// `P(G >= x)` for `G ~ Normal(mean, var)`.
pub fn gauss_tail(x: f64, mean: f64, var: f64) -> Result<f64> {
    if !(var > 0.0) || !var.is_finite() {
        return domain("gauss_tail", format!("variance must be positive, got {var}"));
    }
    Ok(0.5 * libm::erfc((x - mean) / (2.0 * var).sqrt()))
}

/// `P(G < x)` for `G ~ Normal(mean, var)`; `var` must already be checked.
fn gauss_cdf(x: f64, mean: f64, var: f64) -> f64 {
    0.5 * libm::erfc((mean - x) / (2.0 * var).sqrt())
}

pub fn build_channel(spec: &BinaryThresholdSpec) -> Result<ThresholdChannel> {
    spec.validate()?;
    let s = spec;
    let (p00, p11) = match s.orientation {
        Orientation::OneAbove => (
            gauss_cdf(s.theta, s.mean0, s.var0),
            gauss_tail(s.theta, s.mean1, s.var1)?,
        ),
        Orientation::OneBelow => (
            gauss_tail(s.theta, s.mean0, s.var0)?,
            gauss_cdf(s.theta, s.mean1, s.var1),
        ),
    };
    ThresholdChannel::new(p00, p11)
}

pub fn success_probability(ch: &ThresholdChannel, prior0: f64) -> Result<f64> {
    check_prior("success_probability", prior0)?;
    Ok(prior0 * ch.p00 + (1.0 - prior0) * ch.p11)
}

/// Binary entropy in bits with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// `I(X:Y)` in bits for the binary channel under the given prior.
pub fn mutual_information(ch: &ThresholdChannel, prior0: f64) -> Result<f64> {
    check_prior("mutual_information", prior0)?;
    if ch.p00 + ch.p11 == 1.0 {
        return Ok(0.0);
    }
    let py0 = prior0 * ch.p00 + (1.0 - prior0) * (1.0 - ch.p11);
    let h_y = binary_entropy(py0);
    let h_y_x = prior0 * binary_entropy(ch.p00) + (1.0 - prior0) * binary_entropy(ch.p11);
    Ok((h_y - h_y_x).clamp(0.0, 1.0))
}

/// The crate-wide seeded generator: ChaCha20, a counter-based stream cipher
/// whose output depends only on the seed.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn decoded_correctly<R: Rng>(spec: &BinaryThresholdSpec, rng: &mut R) -> bool {
    let x_is_zero = rng.random::<f64>() < spec.prior0;
    let z: f64 = rng.sample(StandardNormal);
    let signal = if x_is_zero {
        spec.mean0 + spec.var0.sqrt() * z
    } else {
        spec.mean1 + spec.var1.sqrt() * z
    };
    let y_is_one = match spec.orientation {
        Orientation::OneAbove => signal >= spec.theta,
        Orientation::OneBelow => signal < spec.theta,
    };
    y_is_one != x_is_zero
}

/// Samples the transmitted bit, the Gaussian noise and the threshold
/// decision `n` times and reports the fraction of correct decodings.
pub fn mc_success_probability(spec: &BinaryThresholdSpec, n: u64, seed: u64) -> Result<McEstimate> {
    mc_joint_success(std::slice::from_ref(spec), n, seed)
}

/// Like [`mc_success_probability`] for several independent bits sent
/// side by side; a trial succeeds when every bit is decoded correctly.
/// Zero variances are allowed here and give noiseless decisions.
pub fn mc_joint_success(specs: &[BinaryThresholdSpec], n: u64, seed: u64) -> Result<McEstimate> {
    if specs.is_empty() {
        return domain("mc_joint_success", "no threshold problems given");
    }
    for spec in specs {
        check_prior("mc_joint_success", spec.prior0)?;
        if !(spec.var0 >= 0.0 && spec.var1 >= 0.0) {
            return domain("mc_joint_success", "variances must be >= 0");
        }
    }
    if n == 0 {
        return domain("mc_joint_success", "need at least one sample");
    }
    let mut rng = seeded_rng(seed);
    let mut hits = 0u64;
    for _ in 0..n {
        // no short-circuit, so every trial draws the same number of values
        let ok = specs.iter().fold(true, |acc, spec| decoded_correctly(spec, &mut rng) & acc);
        if ok {
            hits += 1;
        }
    }
    // Bernoulli samples: sum of squares equals the sum.
    let k = hits as f64;
    Ok(McEstimate::from_sums(k, k, n, seed))
}
