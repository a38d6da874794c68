//! Random scenarios from the three classical schemes, each scored
//! analytically and by direct sampling.

use rand::Rng;
use rayon::prelude::*;

use crate::analysis::{
    discrimination_spec, mc_success_ea, success_classical, success_discrimination, success_ea, ClassicalScenario,
    DiscriminationScenario, EAScenario, NoiseSite,
};
use crate::error::Result;
use crate::gaussian::{mc_success_probability, seeded_rng, McEstimate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McScenario {
    Classical {
        scenario: ClassicalScenario,
        theta: f64,
        sigma2: f64,
    },
    EntanglementAssisted {
        scenario: EAScenario,
        sigma2_q: f64,
        sigma2_p: f64,
    },
    Discrimination {
        scenario: DiscriminationScenario,
        theta: f64,
        sigma2: f64,
    },
}

impl McScenario {
    /// 0, 1, 2 for classical, EA, discrimination.
    pub fn kind(&self) -> u8 {
        match self {
            McScenario::Classical { .. } => 0,
            McScenario::EntanglementAssisted { .. } => 1,
            McScenario::Discrimination { .. } => 2,
        }
    }

    pub fn analytic(&self) -> Result<f64> {
        match *self {
            McScenario::Classical { scenario, theta, sigma2 } => success_classical(&scenario, theta, sigma2),
            McScenario::EntanglementAssisted {
                scenario,
                sigma2_q,
                sigma2_p,
            } => success_ea(&scenario, sigma2_q, sigma2_p),
            McScenario::Discrimination { scenario, theta, sigma2 } => success_discrimination(&scenario, theta, sigma2),
        }
    }

    pub fn sample(&self, n: u64, seed: u64) -> Result<McEstimate> {
        match *self {
            McScenario::Classical { scenario, theta, sigma2 } => {
                mc_success_probability(&scenario.threshold_spec(theta, sigma2)?, n, seed)
            }
            McScenario::EntanglementAssisted {
                scenario,
                sigma2_q,
                sigma2_p,
            } => mc_success_ea(&scenario, sigma2_q, sigma2_p, n, seed),
            McScenario::Discrimination { scenario, theta, sigma2 } => {
                mc_success_probability(&discrimination_spec(&scenario, theta, sigma2)?, n, seed)
            }
        }
    }

    /// Draws a scenario of the given kind (taken mod 3).
    pub fn random<R: Rng>(kind: usize, rng: &mut R) -> McScenario {
        let site = if rng.random_bool(0.5) {
            NoiseSite::Sender
        } else {
            NoiseSite::Receiver
        };
        let sigma = |rng: &mut R| rng.random_range(0.0..2.0f64).powi(2);
        match kind % 3 {
            0 => McScenario::Classical {
                scenario: ClassicalScenario {
                    eta: rng.random_range(0.2..0.99),
                    alpha_q: rng.random_range(0.2..2.0),
                    r: rng.random_range(0.0..1.5),
                    prior0: rng.random_range(0.1..0.9),
                    noise_site: site,
                },
                theta: rng.random_range(-2.0..2.0),
                sigma2: sigma(rng),
            },
            1 => McScenario::EntanglementAssisted {
                scenario: EAScenario {
                    eta: rng.random_range(0.2..0.99),
                    r: rng.random_range(0.0..1.5),
                    prior_q: rng.random_range(0.1..0.9),
                    prior_p: rng.random_range(0.1..0.9),
                    alpha_q: rng.random_range(0.2..2.0),
                    alpha_p: rng.random_range(0.2..2.0),
                    theta_q: rng.random_range(-2.0..2.0),
                    theta_p: rng.random_range(-2.0..2.0),
                    noise_site: site,
                },
                sigma2_q: sigma(rng),
                sigma2_p: sigma(rng),
            },
            _ => {
                let eta0 = rng.random_range(0.5..0.99);
                McScenario::Discrimination {
                    scenario: DiscriminationScenario {
                        eta0,
                        eta1: rng.random_range(0.05..eta0),
                        alpha_q: rng.random_range(0.5..3.0),
                        r: rng.random_range(0.0..1.0),
                        prior0: rng.random_range(0.1..0.9),
                        noise_site: site,
                    },
                    theta: rng.random_range(0.0..2.5),
                    sigma2: sigma(rng),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McCase {
    pub scenario: McScenario,
    pub analytic: f64,
    pub estimate: McEstimate,
}

impl McCase {
    /// Binomial standard error at the analytic success probability.
    pub fn binomial_se(&self) -> f64 {
        let p = self.analytic;
        (p * (1.0 - p) / self.estimate.n_samples as f64).sqrt()
    }

    pub fn within(&self, k: f64) -> bool {
        (self.estimate.estimate - self.analytic).abs() <= k * self.binomial_se()
    }
}

/// `count` scenarios cycling through the three schemes. Scenario parameters
/// and per-case seeds come from one stream seeded by `seed`; sampling runs
/// in parallel and keeps case order.
pub fn mc_cases(count: usize, n: u64, seed: u64) -> Result<Vec<McCase>> {
    let mut rng = seeded_rng(seed);
    let drawn: Vec<(McScenario, u64)> = (0..count)
        .map(|i| (McScenario::random(i, &mut rng), rng.random::<u64>()))
        .collect();
    drawn
        .par_iter()
        .map(|&(scenario, case_seed)| {
            Ok(McCase {
                scenario,
                analytic: scenario.analytic()?,
                estimate: scenario.sample(n, case_seed)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases_are_reproducible_and_cycle_kinds() {
        let a = mc_cases(6, 2000, 5).unwrap();
        let b = mc_cases(6, 2000, 5).unwrap();
        assert_eq!(a, b);
        let kinds: Vec<u8> = a.iter().map(|c| c.scenario.kind()).collect();
        assert_eq!(kinds, vec![0, 1, 2, 0, 1, 2]);
        assert_ne!(a, mc_cases(6, 2000, 6).unwrap());
    }
}
