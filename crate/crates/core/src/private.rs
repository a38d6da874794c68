//! Private rate `I(A:B) - I(A:E)` when the eavesdropper holds the
//! reflected output of the lossy beamsplitter.
//!
//! Bob decodes with a threshold, so `I(A:B)` is the mutual information of
//! the binary threshold channel. Eve is granted any measurement, so `I(A:E)`
//! is the Holevo quantity of her two conditional Gaussian states. Their
//! average is not Gaussian and its entropy is computed in a Fock basis.

use rayon::prelude::*;

use crate::analysis::{sweep, ClassicalScenario, NoiseSite};
use crate::error::{domain, Result};
use crate::fock::{converged_entropy, gaussian_entropy, gaussian_to_fock, FockDensity, GaussianStateOneMode};
use crate::gaussian::{build_channel, mutual_information};

/// Gain over the noiseless rate required to call a curve non-monotonic.
pub const PROBE_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivateScenario {
    pub base: ClassicalScenario,
    pub theta: f64,
}

impl PrivateScenario {
    pub fn new(base: ClassicalScenario, theta: f64) -> Result<Self> {
        let s = Self { base, theta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !self.base.r.is_finite() {
            return domain("PrivateScenario", "infinite squeezing leaves the eavesdropper an unbounded state");
        }
        if !self.theta.is_finite() {
            return domain("PrivateScenario", "theta must be finite");
        }
        Ok(())
    }
}

/// Eve's conditional states for `X = 0, 1` with their probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveEnsemble {
    pub states: [GaussianStateOneMode; 2],
    pub probs: [f64; 2],
}

impl EveEnsemble {
    pub fn validate(&self) -> Result<()> {
        for g in &self.states {
            g.validate()?;
        }
        let [p0, p1] = self.probs;
        if !(p0 >= 0.0 && p1 >= 0.0) || (p0 + p1 - 1.0).abs() > 1e-12 {
            return domain("EveEnsemble", format!("probabilities {p0}, {p1} do not form a distribution"));
        }
        if self.states[0].cov != self.states[1].cov {
            return domain("EveEnsemble", "conditional covariances differ");
        }
        Ok(())
    }
}

pub fn eve_ensemble(s: &PrivateScenario, sigma2: f64) -> Result<EveEnsemble> {
    s.validate()?;
    if !(sigma2 >= 0.0) || !sigma2.is_finite() {
        return domain("eve_ensemble", format!("sigma2 must be finite and >= 0, got {sigma2}"));
    }
    let b = &s.base;
    let leak = 1.0 - b.eta;
    let sigma_e2 = match b.noise_site {
        NoiseSite::Sender => sigma2,
        NoiseSite::Receiver => 0.0,
    };
    let qq = 0.5 * (leak * ((-2.0 * b.r).exp() + sigma_e2) + b.eta);
    let pp = 0.5 * (leak * (2.0 * b.r).exp() + b.eta);
    let cov = [[qq, 0.0], [0.0, pp]];
    let m = leak.sqrt() * b.alpha_q;
    Ok(EveEnsemble {
        states: [
            GaussianStateOneMode::new([-m, 0.0], cov)?,
            GaussianStateOneMode::new([m, 0.0], cov)?,
        ],
        probs: [b.prior0, 1.0 - b.prior0],
    })
}

/// Holevo quantity of a two-state ensemble, in bits.
pub fn holevo_chi(e: &EveEnsemble) -> Result<f64> {
    e.validate()?;
    let [g0, g1] = &e.states;
    let [p0, p1] = e.probs;
    if p0 == 0.0 || p1 == 0.0 || g0 == g1 {
        return Ok(0.0);
    }
    // The common symplectic that turns the shared covariance into nu I
    // leaves every entropy unchanged and replaces two displaced squeezed
    // thermal states by two displaced thermal ones, which need a much
    // smaller cutoff.
    let t = g0.normal_form_transform();
    let nu = g0.symplectic_eigenvalue();
    let thermal = |g: &GaussianStateOneMode| -> Result<GaussianStateOneMode> {
        GaussianStateOneMode::new(g.transformed(t)?.mean, [[nu, 0.0], [0.0, nu]])
    };
    let (h0, h1) = (thermal(g0)?, thermal(g1)?);
    let start = h0.start_dim().max(h1.start_dim());
    let avg = converged_entropy(start, |dim| {
        let r0 = gaussian_to_fock(&h0, dim)?;
        let r1 = gaussian_to_fock(&h1, dim)?;
        FockDensity::mixture(&[(p0, &r0), (p1, &r1)])
    })?;
    Ok(avg.entropy - gaussian_entropy(g0)?)
}

/// Mutual information between the sent bit and Bob's threshold decision.
pub fn bob_information(s: &PrivateScenario, sigma2: f64) -> Result<f64> {
    s.validate()?;
    let spec = s.base.threshold_spec(s.theta, sigma2)?;
    mutual_information(&build_channel(&spec)?, spec.prior0)
}

/// `I(A:B) - chi`, unclipped; may be negative.
pub fn private_rate(s: &PrivateScenario, sigma2: f64) -> Result<f64> {
    Ok(bob_information(s, sigma2)? - holevo_chi(&eve_ensemble(s, sigma2)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport {
    pub theta: f64,
    pub nonmonotonic: bool,
    pub argmax_sigma: f64,
    /// `C_P(argmax_sigma) - C_P(0)`.
    pub gain: f64,
    /// The best point is the last grid point, so the curve may still be
    /// rising there.
    pub at_grid_edge: bool,
}

/// Scans the private rate over noise standard deviations for each
/// threshold and reports whether added sender-side noise raises it.
///
/// The grid maximum is refined by golden-section search between its
/// neighbours.
pub fn conjecture_probe(s: &PrivateScenario, theta_list: &[f64], sigma_grid: &[f64]) -> Result<Vec<ProbeReport>> {
    s.validate()?;
    if s.base.noise_site != NoiseSite::Sender {
        return domain("conjecture_probe", "the probe is defined for sender-side noise only");
    }
    if theta_list.is_empty() {
        return domain("conjecture_probe", "empty threshold list");
    }
    sweep::check_grid("conjecture_probe", sigma_grid)?;
    // Eve's information does not depend on theta
    let chi_of = |sigma: f64| holevo_chi(&eve_ensemble(s, sigma * sigma)?);
    let chi_grid = sigma_grid.par_iter().map(|&x| chi_of(x)).collect::<Result<Vec<_>>>()?;
    let chi0 = if sigma_grid[0] == 0.0 { chi_grid[0] } else { chi_of(0.0)? };

    theta_list
        .iter()
        .map(|&theta| {
            let at = PrivateScenario { theta, ..*s };
            let rate = |sigma: f64, chi: f64| -> Result<f64> { Ok(bob_information(&at, sigma * sigma)? - chi) };
            let start = rate(0.0, chi0)?;
            let values = sigma_grid
                .iter()
                .zip(&chi_grid)
                .map(|(&x, &c)| rate(x, c))
                .collect::<Result<Vec<_>>>()?;
            let (imax, mut best) = values
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |b, (i, v)| if v > b.1 { (i, v) } else { b });
            let mut argmax = sigma_grid[imax];
            if imax > 0 && imax + 1 < sigma_grid.len() {
                let f = |x: f64| rate(x, chi_of(x)?);
                let (x, v) = golden_max(f, sigma_grid[imax - 1], sigma_grid[imax + 1], 1e-6)?;
                if v > best {
                    argmax = x;
                    best = v;
                }
            }
            let gain = best - start;
            Ok(ProbeReport {
                theta,
                nonmonotonic: gain > PROBE_MARGIN && argmax > 0.0,
                argmax_sigma: argmax,
                gain,
                at_grid_edge: imax + 1 == sigma_grid.len(),
            })
        })
        .collect()
}

fn golden_max<F>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}
