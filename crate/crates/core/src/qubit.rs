//! A qubit encoded in a bosonic mode by a conditional quadrature
//! displacement `±x0`, decoded by a threshold at `theta` after Gaussian
//! displacement noise.
//!
//! Here the noise variance `sigma2` is the plain variance of the added
//! displacement, not half of it as in [`crate::analysis`].
//!
//! The channel is
//!
//! ```text
//! rho'_00 = (1 - pl) rho_00 + pg rho_11
//! rho'_11 = pl rho_00 + (1 - pg) rho_11
//! rho'_01 = (1 - pl - pg) rho_01
//! ```
//!
//! with `pl` and `pg` from [`pi_probs`].

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::gaussian::{seeded_rng, McEstimate};

const STATE_TOL: f64 = 1e-12;
const CHOI_PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumCommParams {
    pub x0: f64,
    pub theta: f64,
    pub sigma2: f64,
}

impl QuantumCommParams {
    pub fn new(x0: f64, theta: f64, sigma2: f64) -> Result<Self> {
        let p = Self { x0, theta, sigma2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x0 > 0.0) || !self.x0.is_finite() {
            return domain("QuantumCommParams", format!("x0 must be finite and > 0, got {}", self.x0));
        }
        if !self.theta.is_finite() {
            return domain("QuantumCommParams", "theta must be finite");
        }
        if !(self.sigma2 >= 0.0) {
            return domain("QuantumCommParams", format!("sigma2 must be >= 0, got {}", self.sigma2));
        }
        Ok(())
    }
}

fn hermiticity_defect<const N: usize>(m: &nalgebra::SMatrix<Complex64, N, N>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Density matrix of a qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState(Matrix2<Complex64>);

impl QubitState {
    pub fn from_matrix(m: Matrix2<Complex64>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("QubitState", "non-finite entry");
        }
        if hermiticity_defect(&m) > STATE_TOL {
            return domain("QubitState", "matrix is not Hermitian");
        }
        if (m.trace().re - 1.0).abs() > STATE_TOL {
            return domain("QubitState", format!("trace {} != 1", m.trace().re));
        }
        // smallest eigenvalue of a 2x2 Hermitian matrix
        let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        let min = 0.5 * (a + d) - (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
        if min < -STATE_TOL {
            return domain("QubitState", format!("negative eigenvalue {min}"));
        }
        Ok(Self(m))
    }

    /// `|phi><phi|` for `phi = a|0> + b|1>`, normalised.
    pub fn pure(a: Complex64, b: Complex64) -> Result<Self> {
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return domain("QubitState::pure", "amplitudes must be finite and not both zero");
        }
        let (a, b) = (a / norm, b / norm);
        Ok(Self(Matrix2::new(a * a.conj(), a * b.conj(), b * a.conj(), b * b.conj())))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    /// `<phi|rho|phi>` for a normalised pure state.
    pub fn overlap_pure(&self, a: Complex64, b: Complex64) -> f64 {
        let v = nalgebra::Vector2::new(a, b);
        (v.adjoint() * self.0 * v)[(0, 0)].re
    }
}

/// Two-qubit Choi state of the channel; the channel acts on the first factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiMatrix(Matrix4<Complex64>);

impl ChoiMatrix {
    pub fn from_matrix(m: Matrix4<Complex64>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("ChoiMatrix", "non-finite entry");
        }
        if hermiticity_defect(&m) > STATE_TOL {
            return domain("ChoiMatrix", "matrix is not Hermitian");
        }
        if (m.trace().re - 1.0).abs() > STATE_TOL {
            return domain("ChoiMatrix", format!("trace {} != 1", m.trace().re));
        }
        let min = SymmetricEigen::new(m).eigenvalues.min();
        if min < -CHOI_PSD_TOL {
            return domain("ChoiMatrix", format!("negative eigenvalue {min}"));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    /// Partial transpose over the second factor.
    pub fn partial_transpose(&self) -> Matrix4<Complex64> {
        let mut out = Matrix4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[(2 * i + l, 2 * k + j)] = self.0[(2 * i + j, 2 * k + l)];
                    }
                }
            }
        }
        out
    }
}

fn step(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Flip probabilities `(pi_less, pi_greater)`: the chance that a `|0>`
/// (resp. `|1>`) component is decoded on the wrong side of the threshold.
pub fn pi_probs(p: &QuantumCommParams) -> Result<(f64, f64)> {
    p.validate()?;
    if p.sigma2 == 0.0 {
        return Ok((step(p.theta - p.x0), 1.0 - step(p.theta + p.x0)));
    }
    let s = (2.0 * p.sigma2).sqrt();
    let less = 0.5 + 0.5 * libm::erf((p.theta - p.x0) / s);
    let greater = 0.5 - 0.5 * libm::erf((p.theta + p.x0) / s);
    Ok((less, greater))
}

pub fn apply_channel(rho_in: &QubitState, p: &QuantumCommParams) -> Result<QubitState> {
    let (pl, pg) = pi_probs(p)?;
    let m = rho_in.0;
    let (r00, r11) = (m[(0, 0)], m[(1, 1)]);
    let coh = 1.0 - pl - pg;
    Ok(QubitState(Matrix2::new(
        r00 * (1.0 - pl) + r11 * pg,
        m[(0, 1)] * coh,
        m[(1, 0)] * coh,
        r00 * pl + r11 * (1.0 - pg),
    )))
}

/// Haar-averaged fidelity `1 - (pi_less + pi_greater) / 2`.
pub fn average_fidelity(p: &QuantumCommParams) -> Result<f64> {
    let (pl, pg) = pi_probs(p)?;
    Ok(1.0 - 0.5 * (pl + pg))
}

/// Noise variance maximising the average fidelity. Exists only for
/// `|theta| > x0`.
pub fn critical_sigma2_quantum(p: &QuantumCommParams) -> Result<f64> {
    p.validate()?;
    let (t, x0) = (p.theta, p.x0);
    if t.abs() <= x0 {
        return Err(Error::NoCriticalPoint {
            operation: "critical_sigma2_quantum",
            reason: format!("|theta| = {} lies inside [-x0, x0] with x0 = {x0}", t.abs()),
        });
    }
    Ok(2.0 * t * x0 / ((t + x0) / (t - x0)).ln())
}

pub fn choi_state(p: &QuantumCommParams) -> Result<ChoiMatrix> {
    let (pl, pg) = pi_probs(p)?;
    let c = Complex64::from(0.5 * (1.0 - pl - pg));
    let mut m = Matrix4::zeros();
    m[(0, 0)] = (0.5 * (1.0 - pl)).into();
    m[(1, 1)] = (0.5 * pg).into();
    m[(2, 2)] = (0.5 * pl).into();
    m[(3, 3)] = (0.5 * (1.0 - pg)).into();
    m[(0, 3)] = c;
    m[(3, 0)] = c;
    Ok(ChoiMatrix(m))
}

fn is_x_shaped(m: &Matrix4<Complex64>) -> bool {
    (0..4).all(|i| (0..4).all(|j| i == j || i + j == 3 || m[(i, j)] == Complex64::default()))
}

/// Eigenvalues of the Hermitian block `[[a, b], [conj b, d]]`.
fn block_eigs(a: f64, d: f64, b: Complex64) -> [f64; 2] {
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
    [mean - rad, mean + rad]
}

/// `log2` of the trace norm of the partial transpose.
///
/// X-shaped states (every Choi state of this channel) are handled with two
/// 2x2 blocks; anything else goes through a Hermitian eigensolver.
pub fn log_negativity(c: &ChoiMatrix) -> Result<f64> {
    if hermiticity_defect(&c.0) > STATE_TOL {
        return domain("log_negativity", "matrix is not Hermitian");
    }
    let pt = c.partial_transpose();
    let eigs: Vec<f64> = if is_x_shaped(&pt) {
        let outer = block_eigs(pt[(0, 0)].re, pt[(3, 3)].re, pt[(0, 3)]);
        let inner = block_eigs(pt[(1, 1)].re, pt[(2, 2)].re, pt[(1, 2)]);
        outer.into_iter().chain(inner).collect()
    } else {
        SymmetricEigen::new(pt).eigenvalues.iter().copied().collect()
    };
    let norm: f64 = eigs.iter().map(|e| e.abs()).sum();
    Ok(norm.log2().max(0.0))
}

/// Monte Carlo estimate of the average fidelity over Haar-random pure
/// inputs, going through [`apply_channel`] for every sample.
pub fn haar_fidelity_oracle(p: &QuantumCommParams, n: u64, seed: u64) -> Result<McEstimate> {
    p.validate()?;
    if n == 0 {
        return domain("haar_fidelity_oracle", "need at least one sample");
    }
    let mut rng = seeded_rng(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let a = Complex64::new(g[0], g[1]) / norm;
        let b = Complex64::new(g[2], g[3]) / norm;
        let out = apply_channel(&QubitState::pure(a, b)?, p)?;
        let f = out.overlap_pure(a, b);
        sum += f;
        sum_sq += f * f;
    }
    Ok(McEstimate::from_sums(sum, sum_sq, n, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(sigma2: f64) -> QuantumCommParams {
        QuantumCommParams::new(0.3, 0.31, sigma2).unwrap()
    }

    // trapezoid integral of the N(0, var) density on [lo, hi]
    fn gauss_mass(lo: f64, hi: f64, var: f64) -> f64 {
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        let pdf = |x: f64| (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        h * ((1..n).map(|i| pdf(lo + i as f64 * h)).sum::<f64>() + 0.5 * (pdf(lo) + pdf(hi)))
    }

    #[test]
    fn pi_values() {
        let v = critical_sigma2_quantum(&base(0.0)).unwrap();
        assert!((v - 0.045_245_854_323_337_22).abs() < 1e-15);
        let (pl, pg) = pi_probs(&base(v)).unwrap();
        assert!((pl - 0.518_748_249_185_552_5).abs() < 1e-13);
        assert!((pg - 0.002_067_046_919_917_066).abs() < 1e-14);
        // |0> sits at +x0 and flips when the noise pushes it below theta
        let sd = v.sqrt();
        assert!((pl - gauss_mass(-12.0 * sd, 0.01, v)).abs() < 1e-9);
        assert!((pg - gauss_mass(0.61, 12.0 * sd, v)).abs() < 1e-9);
    }

    #[test]
    fn step_limits() {
        let p = QuantumCommParams::new(0.3, 0.1, 0.0).unwrap();
        assert_eq!(pi_probs(&p).unwrap(), (0.0, 0.0));
        assert_eq!(average_fidelity(&p).unwrap(), 1.0);
        assert_eq!(average_fidelity(&base(0.0)).unwrap(), 0.5);
        assert_eq!(pi_probs(&QuantumCommParams::new(0.3, 0.3, 0.0).unwrap()).unwrap(), (0.5, 0.0));
        let sym = pi_probs(&QuantumCommParams::new(0.3, 0.0, 0.7).unwrap()).unwrap();
        assert_eq!(sym.0, sym.1);
    }

    #[test]
    fn fidelity_at_critical_noise() {
        let p = base(critical_sigma2_quantum(&base(0.0)).unwrap());
        let f = average_fidelity(&p).unwrap();
        assert!((f - 0.739_592_351_947_265_2).abs() < 1e-13);
        assert!(f > 2.0 / 3.0);
    }

    #[test]
    fn critical_noise_matches_grid() {
        for theta in [0.31, -0.31, 0.35, 0.5] {
            let p = QuantumCommParams::new(0.3, theta, 0.0).unwrap();
            let v = critical_sigma2_quantum(&p).unwrap();
            let f = |s2: f64| average_fidelity(&QuantumCommParams { sigma2: s2, ..p }).unwrap();
            let hi = 4.0 * v;
            let n = 40_000;
            let i = (1..=n).max_by(|&a, &b| f(a as f64 * hi / n as f64).total_cmp(&f(b as f64 * hi / n as f64)));
            let grid = i.unwrap() as f64 * hi / n as f64;
            assert!((grid - v).abs() <= hi / n as f64, "theta {theta}");
        }
        assert_eq!(
            critical_sigma2_quantum(&QuantumCommParams::new(0.3, 0.31, 0.0).unwrap()).unwrap(),
            critical_sigma2_quantum(&QuantumCommParams::new(0.3, -0.31, 0.0).unwrap()).unwrap()
        );
        // vanishes only logarithmically as theta -> x0
        let near: Vec<f64> = [1e-2, 1e-4, 1e-8, 1e-12]
            .iter()
            .map(|d| critical_sigma2_quantum(&QuantumCommParams::new(0.3, 0.3 + d, 0.0).unwrap()).unwrap())
            .collect();
        assert!(near.windows(2).all(|w| 0.0 < w[1] && w[1] < w[0]));
        assert!(matches!(
            critical_sigma2_quantum(&QuantumCommParams::new(0.3, 0.3, 0.0).unwrap()),
            Err(Error::NoCriticalPoint { .. })
        ));
    }

    #[test]
    fn channel_examples() {
        let plus = QubitState::pure(1.0.into(), 1.0.into()).unwrap();
        let id = QuantumCommParams::new(0.3, 0.0, 0.0).unwrap();
        assert_eq!(apply_channel(&plus, &id).unwrap(), plus);

        let p = base(0.1);
        let (pl, pg) = pi_probs(&p).unwrap();
        let out = apply_channel(&plus, &p).unwrap();
        assert!((out.matrix()[(0, 1)].re - 0.5 * (1.0 - pl - pg)).abs() < 1e-15);

        let noisy = QuantumCommParams::new(0.3, 0.31, 1e12).unwrap();
        let out = apply_channel(&QubitState::pure(0.6.into(), 0.8.into()).unwrap(), &noisy).unwrap();
        assert!((out.matrix() - Matrix2::identity() * Complex64::from(0.5)).norm() < 1e-6);
    }

    #[test]
    fn rejects_bad_states() {
        let m = Matrix2::new(1.0.into(), 0.0.into(), 0.0.into(), 1.0.into());
        assert!(QubitState::from_matrix(m).is_err());
        let m = Matrix2::new(0.5.into(), 1.0.into(), 1.0.into(), 0.5.into());
        assert!(QubitState::from_matrix(m).is_err());
        let m = Matrix2::new(0.5.into(), Complex64::new(0.0, 0.1), Complex64::new(0.0, 0.1), 0.5.into());
        assert!(QubitState::from_matrix(m).is_err());
        assert!(QuantumCommParams::new(0.0, 0.1, 0.1).is_err());
        assert!(QuantumCommParams::new(0.3, 0.1, -0.1).is_err());
    }

    #[test]
    fn choi_examples() {
        let bell = choi_state(&QuantumCommParams::new(0.3, 0.0, 0.0).unwrap()).unwrap();
        let mut expect = Matrix4::zeros();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            expect[(i, j)] = Complex64::from(0.5);
        }
        assert_eq!(*bell.matrix(), expect);
        assert!((log_negativity(&bell).unwrap() - 1.0).abs() < 1e-15);

        let mixed = choi_state(&QuantumCommParams::new(0.3, 0.0, 1e14).unwrap()).unwrap();
        assert!((mixed.matrix() - Matrix4::identity() * Complex64::from(0.25)).norm() < 1e-6);
        assert_eq!(log_negativity(&mixed).unwrap(), 0.0);

        let diag = ChoiMatrix::from_matrix(Matrix4::from_diagonal(&nalgebra::Vector4::new(
            0.1.into(),
            0.2.into(),
            0.3.into(),
            0.4.into(),
        )))
        .unwrap();
        assert_eq!(log_negativity(&diag).unwrap(), 0.0);
    }

    #[test]
    fn choi_matches_channel_on_bell_state() {
        let p = base(0.07);
        let c = choi_state(&p).unwrap();
        assert!(ChoiMatrix::from_matrix(*c.matrix()).is_ok());
        // apply the channel block by block to |i><j| on the first factor
        for i in 0..2 {
            for j in 0..2 {
                let mut e = Matrix2::zeros();
                e[(i, j)] = Complex64::from(1.0);
                let m = e;
                let (pl, pg) = pi_probs(&p).unwrap();
                let coh = 1.0 - pl - pg;
                let img = Matrix2::new(
                    m[(0, 0)] * (1.0 - pl) + m[(1, 1)] * pg,
                    m[(0, 1)] * coh,
                    m[(1, 0)] * coh,
                    m[(0, 0)] * pl + m[(1, 1)] * (1.0 - pg),
                );
                for a in 0..2 {
                    for b in 0..2 {
                        let got = c.matrix()[(2 * a + i, 2 * b + j)];
                        assert!((got - 0.5 * img[(a, b)]).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn log_negativity_against_eigensolver() {
        let v = critical_sigma2_quantum(&base(0.0)).unwrap();
        let c = choi_state(&base(v)).unwrap();
        let ln = log_negativity(&c).unwrap();
        assert!((ln - 0.360_622_663_617_054_68).abs() < 1e-12);
        let eig = SymmetricEigen::new(c.partial_transpose()).eigenvalues;
        let general = eig.iter().map(|e| e.abs()).sum::<f64>().log2();
        assert!((ln - general).abs() < 1e-12);

        // a non-X state takes the general path
        let psi = nalgebra::Vector4::new(0.5.into(), Complex64::new(0.0, 0.5), 0.5.into(), (-0.5).into());
        let rho = ChoiMatrix::from_matrix(psi * psi.adjoint()).unwrap();
        let ln = log_negativity(&rho).unwrap();
        assert!(ln >= 0.0 && ln <= 1.0 + 1e-12);
    }

    #[test]
    fn log_negativity_has_interior_maximum() {
        let ln = |sigma: f64| log_negativity(&choi_state(&base(sigma * sigma)).unwrap()).unwrap();
        let vals: Vec<f64> = (0..=100).map(|i| ln(0.01 * i as f64)).collect();
        let (imax, max) = vals.iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        assert!(imax > 0 && imax < 100);
        assert!(max > vals[0] && max > vals[100]);
    }

    #[test]
    fn haar_oracle() {
        let p = base(0.05);
        let mc = haar_fidelity_oracle(&p, 100_000, 5).unwrap();
        let exact = average_fidelity(&p).unwrap();
        assert!((mc.estimate - exact).abs() <= 4.0 * mc.std_error);
        assert_eq!(mc, haar_fidelity_oracle(&p, 100_000, 5).unwrap());

        let id = haar_fidelity_oracle(&QuantumCommParams::new(0.3, 0.0, 0.0).unwrap(), 1000, 1).unwrap();
        assert!((id.estimate - 1.0).abs() < 1e-12 && id.std_error < 1e-6);
        assert!(haar_fidelity_oracle(&p, 0, 1).is_err());
    }
}
