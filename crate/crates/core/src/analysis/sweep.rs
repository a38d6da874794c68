use rayon::prelude::*;

use super::{success_classical, success_discrimination, success_ea, ClassicalScenario, DiscriminationScenario, EAScenario};
use crate::error::{domain, Result};

/// Margin by which a point at positive noise must beat the zero-noise value
/// for a curve to count as non-monotonic.
pub const NONMONOTONIC_MARGIN: f64 = 1e-12;

/// A scheme together with its threshold(s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Classical { scenario: ClassicalScenario, theta: f64 },
    /// Thresholds live in the scenario. With `sigma_p = None` both
    /// quadratures receive the swept noise; otherwise the `p` noise is held
    /// at the given standard deviation.
    EntanglementAssisted { scenario: EAScenario, sigma_p: Option<f64> },
    Discrimination { scenario: DiscriminationScenario, theta: f64 },
}

impl Scheme {
    /// Success probability at noise standard deviation `sigma`.
    pub fn success(&self, sigma: f64) -> Result<f64> {
        let v = sigma * sigma;
        match *self {
            Scheme::Classical { ref scenario, theta } => success_classical(scenario, theta, v),
            Scheme::EntanglementAssisted { ref scenario, sigma_p } => {
                let vp = sigma_p.map_or(v, |sp| sp * sp);
                success_ea(scenario, v, vp)
            }
            Scheme::Discrimination { ref scenario, theta } => success_discrimination(scenario, theta, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    /// `(sigma, P_s)` pairs in grid order.
    pub points: Vec<(f64, f64)>,
    pub nonmonotonic: bool,
}

impl SweepCurve {
    /// Grid point with the largest success probability.
    pub fn argmax(&self) -> (f64, f64) {
        self.points
            .iter()
            .copied()
            .fold((f64::NAN, f64::NEG_INFINITY), |best, p| if p.1 > best.1 { p } else { best })
    }
}

pub(crate) fn check_grid(operation: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return domain(operation, "empty grid");
    }
    if grid.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return domain(operation, "grid values must be finite and >= 0");
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain(operation, "grid must be strictly increasing");
    }
    Ok(())
}

/// True when some later value beats the first by more than `margin`.
pub(crate) fn rises_above_start(values: impl IntoIterator<Item = f64>, margin: f64) -> bool {
    let mut it = values.into_iter();
    let Some(first) = it.next() else {
        return false;
    };
    it.any(|y| y > first + margin)
}

/// Evaluates the success probability over a grid of noise standard
/// deviations. Grid points are evaluated in parallel; the output keeps grid
/// order.
pub fn sweep_success(scheme: &Scheme, sigma_grid: &[f64]) -> Result<SweepCurve> {
    check_grid("sweep_success", sigma_grid)?;
    let points = sigma_grid
        .par_iter()
        .map(|&sigma| scheme.success(sigma).map(|p| (sigma, p)))
        .collect::<Result<Vec<_>>>()?;
    let nonmonotonic = rises_above_start(points.iter().map(|p| p.1), NONMONOTONIC_MARGIN);
    Ok(SweepCurve { points, nonmonotonic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::NoiseSite;

    fn grid() -> Vec<f64> {
        (0..=60).map(|i| 0.05 * i as f64).collect()
    }

    fn base(theta: f64) -> Scheme {
        Scheme::Classical {
            scenario: ClassicalScenario::new(0.8, 1.0, 0.0, 0.5, NoiseSite::Receiver).unwrap(),
            theta,
        }
    }

    #[test]
    fn base_flags() {
        assert!(sweep_success(&base(1.15), &grid()).unwrap().nonmonotonic);
        assert!(!sweep_success(&base(0.85), &grid()).unwrap().nonmonotonic);
    }

    #[test]
    fn no_signal_is_flat() {
        let scheme = Scheme::Classical {
            scenario: ClassicalScenario::new(0.8, 0.0, 0.0, 0.5, NoiseSite::Receiver).unwrap(),
            theta: 0.0,
        };
        let c = sweep_success(&scheme, &grid()).unwrap();
        assert!(c.points.iter().all(|p| p.1 == 0.5));
        assert!(!c.nonmonotonic);
    }

    #[test]
    fn bad_grids() {
        assert!(sweep_success(&base(1.0), &[]).is_err());
        assert!(sweep_success(&base(1.0), &[0.0, 0.0]).is_err());
        assert!(sweep_success(&base(1.0), &[0.2, 0.1]).is_err());
        assert!(sweep_success(&base(1.0), &[-0.1, 0.1]).is_err());
    }
}
