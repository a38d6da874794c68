use super::{check_sigma2, success_with_limits, symmetric_interval, ForbiddenRectangle, NoiseSite};
use crate::error::{domain, Result};
use crate::gaussian::{check_prior, mc_joint_success, BinaryThresholdSpec, McEstimate, Orientation};

/// Two bits sent on the commuting quadratures `q1 - q2` and `p1 + p2` of a
/// shared two-mode squeezed vacuum, with the sender's mode passing through
/// the lossy channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EAScenario {
    pub eta: f64,
    pub r: f64,
    pub prior_q: f64,
    pub prior_p: f64,
    pub alpha_q: f64,
    pub alpha_p: f64,
    pub theta_q: f64,
    pub theta_p: f64,
    pub noise_site: NoiseSite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Q,
    P,
}

impl EAScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return domain("EAScenario", format!("eta must lie in (0,1], got {}", self.eta));
        }
        if !(self.r >= 0.0) {
            return domain("EAScenario", format!("r must be >= 0, got {}", self.r));
        }
        for a in [self.alpha_q, self.alpha_p] {
            if !(a >= 0.0) || !a.is_finite() {
                return domain("EAScenario", format!("amplitudes must be finite and >= 0, got {a}"));
            }
        }
        check_prior("EAScenario", self.prior_q)?;
        check_prior("EAScenario", self.prior_p)
    }

    /// `1 - eta + (1 + eta) e^{-2r}`: both squeezed modes contribute.
    pub fn base_variance(&self) -> f64 {
        1.0 - self.eta + (1.0 + self.eta) * (-2.0 * self.r).exp()
    }

    fn quadrature(&self, which: Quadrature) -> (f64, f64, f64) {
        match which {
            Quadrature::Q => (self.alpha_q, self.theta_q, self.prior_q),
            Quadrature::P => (self.alpha_p, self.theta_p, self.prior_p),
        }
    }
}

pub fn ea_total_variance(s: &EAScenario, sigma2: f64) -> Result<f64> {
    s.validate()?;
    check_sigma2("ea_total_variance", sigma2)?;
    Ok(0.5 * (s.base_variance() + s.noise_site.gain(s.eta) * sigma2))
}

/// The threshold problem for one quadrature. The variance may be zero for
/// infinite squeezing without loss.
pub fn ea_spec(s: &EAScenario, which: Quadrature, sigma2: f64) -> Result<BinaryThresholdSpec> {
    let var = ea_total_variance(s, sigma2)?;
    let (alpha, theta, prior0) = s.quadrature(which);
    let m = s.eta.sqrt() * alpha;
    Ok(BinaryThresholdSpec {
        mean0: -m,
        mean1: m,
        var0: var,
        var1: var,
        theta,
        prior0,
        orientation: Orientation::OneAbove,
    })
}

/// Success probability of decoding one of the two quadratures.
pub fn success_ea_quadrature(s: &EAScenario, which: Quadrature, sigma2: f64) -> Result<f64> {
    success_with_limits(&ea_spec(s, which, sigma2)?)
}

/// Probability of decoding both bits correctly.
pub fn success_ea(s: &EAScenario, sigma2_q: f64, sigma2_p: f64) -> Result<f64> {
    Ok(success_ea_quadrature(s, Quadrature::Q, sigma2_q)? * success_ea_quadrature(s, Quadrature::P, sigma2_p)?)
}

/// Monte Carlo estimate of [`success_ea`], sampling both bits per trial.
pub fn mc_success_ea(s: &EAScenario, sigma2_q: f64, sigma2_p: f64, n: u64, seed: u64) -> Result<McEstimate> {
    let specs = [ea_spec(s, Quadrature::Q, sigma2_q)?, ea_spec(s, Quadrature::P, sigma2_p)?];
    mc_joint_success(&specs, n, seed)
}

pub fn forbidden_rectangle(s: &EAScenario) -> Result<ForbiddenRectangle> {
    s.validate()?;
    let base = s.base_variance();
    let side = |which| {
        let (alpha, _, prior0) = s.quadrature(which);
        symmetric_interval("forbidden_rectangle", s.eta.sqrt() * alpha, prior0, base, alpha)
    };
    Ok(ForbiddenRectangle {
        q_interval: side(Quadrature::Q)?,
        p_interval: side(Quadrature::P)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric(theta: f64) -> EAScenario {
        EAScenario {
            eta: 0.8,
            r: 0.0,
            prior_q: 0.5,
            prior_p: 0.5,
            alpha_q: 1.0,
            alpha_p: 1.0,
            theta_q: theta,
            theta_p: theta,
            noise_site: NoiseSite::Receiver,
        }
    }

    #[test]
    fn variance_examples() {
        let s = symmetric(0.0);
        assert!((ea_total_variance(&s, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let mut inf = s;
        inf.r = f64::INFINITY;
        assert!((ea_total_variance(&inf, 0.0).unwrap() - 0.1).abs() < 1e-15);
        let mut snd = s;
        snd.noise_site = NoiseSite::Sender;
        assert!((ea_total_variance(&snd, 1.0).unwrap() - 1.4).abs() < 1e-15);
    }

    #[test]
    fn success_examples() {
        let s = symmetric(0.0);
        let q = success_ea_quadrature(&s, Quadrature::Q, 0.0).unwrap();
        assert!((q - 0.814_453_315_238_651_2).abs() < 1e-14);
        assert!((success_ea(&s, 0.0, 0.0).unwrap() - 0.663_334_202_703_229_8).abs() < 1e-14);

        let mut quiet = s;
        quiet.alpha_q = 0.0;
        quiet.alpha_p = 0.0;
        assert_eq!(success_ea(&quiet, 0.3, 0.0).unwrap(), 0.25);

        // a perfect p channel leaves only the q factor
        let mut perfect = s;
        perfect.eta = 1.0;
        perfect.r = f64::INFINITY;
        perfect.alpha_q = 0.3;
        let p_only = success_ea_quadrature(&perfect, Quadrature::P, 0.0).unwrap();
        assert_eq!(p_only, 1.0);
        let q_only = success_ea_quadrature(&perfect, Quadrature::Q, 0.7).unwrap();
        assert_eq!(success_ea(&perfect, 0.7, 0.0).unwrap(), q_only);
    }

    #[test]
    fn monte_carlo_agrees() {
        let mut s = symmetric(0.3);
        s.theta_p = 1.4;
        s.prior_p = 0.35;
        let exact = success_ea(&s, 0.2, 0.6).unwrap();
        let mc = mc_success_ea(&s, 0.2, 0.6, 1_000_000, 9).unwrap();
        assert!((mc.estimate - exact).abs() <= 4.0 * mc.std_error);
    }

    #[test]
    fn rectangle_example() {
        let rect = forbidden_rectangle(&symmetric(0.0)).unwrap();
        for iv in [rect.q_interval, rect.p_interval] {
            assert!((iv.hi - 1.154_281_951_254_402_8).abs() < 1e-12);
            assert_eq!(iv.lo, -iv.hi);
            assert!(iv.residual_hi <= 1e-10 && iv.residual_lo <= 1e-10);
        }
    }

    #[test]
    fn both_inside_peaks_at_origin() {
        let s = symmetric(0.5);
        let rect = forbidden_rectangle(&s).unwrap();
        assert!(!rect.admits_resonance(0.5, 0.5));
        let origin = success_ea(&s, 0.0, 0.0).unwrap();
        for i in 0..=60 {
            for j in 0..=60 {
                let (sq, sp) = (0.05 * i as f64, 0.05 * j as f64);
                assert!(success_ea(&s, sq * sq, sp * sp).unwrap() <= origin);
            }
        }
    }

    #[test]
    fn one_outside_moves_peak() {
        let mut s = symmetric(0.5);
        s.theta_p = 1.6;
        let rect = forbidden_rectangle(&s).unwrap();
        assert!(rect.admits_resonance(s.theta_q, s.theta_p));
        let origin = success_ea(&s, 0.0, 0.0).unwrap();
        let best = (0..=60)
            .map(|j| success_ea(&s, 0.0, (0.05 * j as f64).powi(2)).unwrap())
            .fold(f64::MIN, f64::max);
        assert!(best > origin);
    }
}
