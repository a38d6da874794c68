use super::{check_sigma2, success_with_limits, symmetric_interval, ForbiddenInterval, NoiseSite};
use crate::error::{domain, Error, Result};
use crate::gaussian::{check_prior, BinaryThresholdSpec, Orientation};

/// A bit encoded as a displaced squeezed vacuum `q e^{-r} ∓ alpha_q` and
/// sent through a pure-loss channel of transmissivity `eta`.
///
/// `eta = 1` and `alpha_q = 0` are accepted as limiting cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalScenario {
    pub eta: f64,
    pub alpha_q: f64,
    pub r: f64,
    pub prior0: f64,
    pub noise_site: NoiseSite,
}

impl ClassicalScenario {
    pub fn new(eta: f64, alpha_q: f64, r: f64, prior0: f64, noise_site: NoiseSite) -> Result<Self> {
        let s = Self {
            eta,
            alpha_q,
            r,
            prior0,
            noise_site,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return domain("ClassicalScenario", format!("eta must lie in (0,1], got {}", self.eta));
        }
        if !(self.alpha_q >= 0.0) || !self.alpha_q.is_finite() {
            return domain("ClassicalScenario", format!("alpha_q must be finite and >= 0, got {}", self.alpha_q));
        }
        if !(self.r >= 0.0) {
            return domain("ClassicalScenario", format!("r must be >= 0, got {}", self.r));
        }
        check_prior("ClassicalScenario", self.prior0)
    }

    /// Received signal level `sqrt(eta) alpha_q`.
    pub fn signal_level(&self) -> f64 {
        self.eta.sqrt() * self.alpha_q
    }

    /// `1 - eta + eta e^{-2r}`: twice the noise variance before added noise.
    pub fn base_variance(&self) -> f64 {
        1.0 - self.eta + self.eta * (-2.0 * self.r).exp()
    }

    /// The threshold detection problem at noise level `sigma2`.
    pub fn threshold_spec(&self, theta: f64, sigma2: f64) -> Result<BinaryThresholdSpec> {
        let var = classical_total_variance(self, sigma2)?;
        let m = self.signal_level();
        Ok(BinaryThresholdSpec {
            mean0: -m,
            mean1: m,
            var0: var,
            var1: var,
            theta,
            prior0: self.prior0,
            orientation: Orientation::OneAbove,
        })
    }
}

/// Variance of the received quadrature, `(1 - eta + eta e^{-2r} + g sigma2) / 2`
/// with `g = eta` for sender-side noise and `g = 1` otherwise.
pub fn classical_total_variance(s: &ClassicalScenario, sigma2: f64) -> Result<f64> {
    s.validate()?;
    check_sigma2("classical_total_variance", sigma2)?;
    Ok(0.5 * (s.base_variance() + s.noise_site.gain(s.eta) * sigma2))
}

pub fn success_classical(s: &ClassicalScenario, theta: f64, sigma2: f64) -> Result<f64> {
    success_with_limits(&s.threshold_spec(theta, sigma2)?)
}

/// Noise variance that maximises the success probability.
///
/// A negative value means the success probability decreases monotonically
/// in the noise. Fails when the stationarity condition has no solution at
/// any variance: for thresholds within the signal levels, and with a skewed
/// prior for thresholds so far out that noise helps all the way to the
/// `P_s -> 1/2` limit.
pub fn critical_sigma2_classical(s: &ClassicalScenario, theta: f64) -> Result<f64> {
    const OP: &str = "critical_sigma2_classical";
    s.validate()?;
    let m = s.signal_level();
    let w = s.prior0;
    if w <= 0.0 || w >= 1.0 || m == 0.0 {
        return Err(Error::NoCriticalPoint {
            operation: OP,
            reason: "degenerate prior or zero signal".into(),
        });
    }
    let ratio = w * (theta + m) / ((1.0 - w) * (theta - m));
    if !(ratio > 0.0) || ratio == 1.0 {
        return Err(Error::NoCriticalPoint {
            operation: OP,
            reason: format!("log argument {ratio} at theta = {theta}"),
        });
    }
    // stationary total variance, twice over
    let stationary = 4.0 * m * theta / ratio.ln();
    if !(stationary > 0.0) {
        return Err(Error::NoCriticalPoint {
            operation: OP,
            reason: format!("no stationary noise level at theta = {theta}; the success probability is monotone"),
        });
    }
    Ok((stationary - s.base_variance()) / s.noise_site.gain(s.eta))
}

pub fn forbidden_interval_classical(s: &ClassicalScenario) -> Result<ForbiddenInterval> {
    s.validate()?;
    symmetric_interval(
        "forbidden_interval_classical",
        s.signal_level(),
        s.prior0,
        s.base_variance(),
        s.alpha_q,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ClassicalScenario {
        ClassicalScenario::new(0.8, 1.0, 0.0, 0.5, NoiseSite::Receiver).unwrap()
    }

    fn fd_slope(s: &ClassicalScenario, theta: f64, x: f64, h: f64) -> (f64, f64) {
        let f = |v: f64| success_classical(s, theta, v).unwrap();
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        (d1, d2)
    }

    #[test]
    fn total_variance_examples() {
        assert!((classical_total_variance(&base(), 0.0).unwrap() - 0.5).abs() < 1e-15);
        let mut s = base();
        s.noise_site = NoiseSite::Sender;
        assert!((classical_total_variance(&s, 1.0).unwrap() - 0.9).abs() < 1e-15);
        let lossless = ClassicalScenario::new(1.0, 1.0, f64::INFINITY, 0.5, NoiseSite::Receiver).unwrap();
        assert_eq!(classical_total_variance(&lossless, 0.0).unwrap(), 0.0);
        assert!(classical_total_variance(&s, -1e-3).is_err());
    }

    #[test]
    fn success_examples() {
        let s = base();
        assert!((success_classical(&s, 0.0, 0.0).unwrap() - 0.897_048_394_633_965_8).abs() < 1e-14);
        let star = critical_sigma2_classical(&s, 1.35).unwrap();
        assert!(star > 0.0);
        assert!(success_classical(&s, 1.35, star).unwrap() > success_classical(&s, 1.35, 0.0).unwrap());
        let mut quiet = s;
        quiet.alpha_q = 0.0;
        for v in [0.0, 0.5, 3.0] {
            assert_eq!(success_classical(&quiet, 0.0, v).unwrap(), 0.5);
        }
    }

    #[test]
    fn zero_variance_uses_step_limit() {
        let s = ClassicalScenario::new(1.0, 1.0, f64::INFINITY, 0.5, NoiseSite::Receiver).unwrap();
        assert_eq!(success_classical(&s, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(success_classical(&s, 2.0, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn critical_noise_examples() {
        let s = base();
        let v = critical_sigma2_classical(&s, 1.05).unwrap();
        assert!((v - 0.487_401_417_691_900_5).abs() < 1e-12);
        let (d1, d2) = fd_slope(&s, 1.05, v, 1e-4);
        assert!(d1.abs() < 1e-8, "slope {d1}");
        assert!(d2 < 0.0);
        assert!(critical_sigma2_classical(&s, 0.95).unwrap() < 0.0);
        assert!(matches!(
            critical_sigma2_classical(&s, 0.5),
            Err(Error::NoCriticalPoint { .. })
        ));
    }

    #[test]
    fn grid_search_locates_critical_noise() {
        let s = base();
        let f = |v: f64| success_classical(&s, 1.05, v).unwrap();
        // coarse grid then golden-section refinement, independent of the closed form
        let best = (0..=3000).map(|i| i as f64 * 1e-3).fold((0.0, f64::MIN), |acc, v| {
            let y = f(v);
            if y > acc.1 {
                (v, y)
            } else {
                acc
            }
        });
        let (mut a, mut b) = (best.0 - 2e-3, best.0 + 2e-3);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..60 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let argmax = 0.5 * (a + b);
        assert!((argmax - critical_sigma2_classical(&s, 1.05).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn sender_site_divides_by_eta() {
        let r = base();
        let mut s = r;
        s.noise_site = NoiseSite::Sender;
        let vr = critical_sigma2_classical(&r, 1.2).unwrap();
        let vs = critical_sigma2_classical(&s, 1.2).unwrap();
        assert!((vs - vr / 0.8).abs() < 1e-14);
        for v in [0.0, 0.3, 1.7] {
            let a = success_classical(&s, 1.2, v).unwrap();
            let b = success_classical(&r, 1.2, 0.8 * v).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn base_interval() {
        let fi = forbidden_interval_classical(&base()).unwrap();
        assert!((fi.hi - 0.955_106_149_793_770_7).abs() < 1e-12);
        assert_eq!(fi.lo, -fi.hi);
        assert!(fi.residual_lo <= 1e-10 && fi.residual_hi <= 1e-10);
        let m = 0.8f64.sqrt();
        assert!(fi.lo <= -m && fi.hi >= m);
        let at_root = critical_sigma2_classical(&base(), fi.hi).unwrap();
        assert!(at_root.abs() <= 1e-10);
    }

    #[test]
    fn strong_squeezing_narrows_interval() {
        let s = ClassicalScenario::new(0.8, 1.0, 12.0, 0.5, NoiseSite::Receiver).unwrap();
        let fi = forbidden_interval_classical(&s).unwrap();
        let m = s.signal_level();
        assert!(fi.width() - 2.0 * m < 0.2 * m, "width {}", fi.width());
    }

    #[test]
    fn degenerate_prior_has_no_interval() {
        let mut s = base();
        s.prior0 = 1.0;
        assert!(matches!(forbidden_interval_classical(&s), Err(Error::NoCriticalPoint { .. })));
    }

    #[test]
    fn asymmetric_prior_orders_roots() {
        for w in [0.1, 0.3, 0.7, 0.95] {
            let mut s = base();
            s.prior0 = w;
            let fi = forbidden_interval_classical(&s).unwrap();
            let m = s.signal_level();
            assert!(fi.lo <= -m && m <= fi.hi, "{fi:?}");
            assert!(fi.residual_lo <= 1e-10 && fi.residual_hi <= 1e-10, "{fi:?}");
        }
    }
}
