//! Single-mode states and operators in a truncated Fock basis.
//!
//! Operators are exponentiated in a padded space of dimension
//! `2 * dim + 20` and cropped, so the retained matrix elements do not see
//! the artificial boundary of the truncated generator.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Largest allowed norm loss of the vacuum column.
pub const UNITARITY_TOL: f64 = 1e-8;
/// Largest allowed trace lost to the cutoff.
pub const TRACE_TOL: f64 = 1e-8;
/// Eigenvalues below this are dropped before taking logarithms.
pub const EIGEN_CLIP: f64 = 1e-14;
/// Entropy change between successive cutoffs accepted as converged.
pub const ENTROPY_TOL: f64 = 1e-6;
/// Hard upper bound for adaptive cutoffs.
pub const MAX_DIM: usize = 1500;

const HERMITIAN_TOL: f64 = 1e-12;
const THERMAL_TAIL_TOL: f64 = 1e-12;

fn padded(dim: usize) -> usize {
    2 * dim + 20
}

fn check_dim(operation: &'static str, dim: usize) -> Result<()> {
    if dim < 2 {
        return domain(operation, format!("dim must be >= 2, got {dim}"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    m: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        check_dim("FockOperator", m.nrows())?;
        if !m.is_square() {
            return domain("FockOperator", "matrix must be square");
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("FockOperator", "non-finite entry");
        }
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    /// `<row|A|col>`.
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    m: DMatrix<Complex64>,
}

impl FockDensity {
    /// Checks hermiticity and the trace bound; eigenvalues are checked by
    /// [`von_neumann_entropy`].
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        let op = FockOperator::from_matrix(m)?;
        if hermiticity_defect(&op.m) > HERMITIAN_TOL {
            return domain("FockDensity", "matrix is not Hermitian");
        }
        let tr = op.m.trace().re;
        if tr > 1.0 + HERMITIAN_TOL {
            return domain("FockDensity", format!("trace {tr} exceeds 1"));
        }
        if tr < 1.0 - TRACE_TOL {
            return Err(Error::Cutoff {
                operation: "FockDensity",
                dim: op.dim(),
                defect: 1.0 - tr,
            });
        }
        Ok(Self { m: op.m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// Convex combination `sum w_i rho_i` of states with equal cutoff.
    pub fn mixture(parts: &[(f64, &FockDensity)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return domain("FockDensity::mixture", "no components");
        };
        let dim = first.dim();
        if parts.iter().any(|(w, r)| !(*w >= 0.0) || r.dim() != dim) {
            return domain("FockDensity::mixture", "weights must be >= 0 and dims equal");
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return domain("FockDensity::mixture", format!("weights sum to {total}"));
        }
        let mut m = DMatrix::zeros(dim, dim);
        for (w, r) in parts {
            m += &r.m * Complex64::from(*w);
        }
        Self::from_matrix(m)
    }

    /// `<psi|rho|psi>`.
    pub fn expectation_pure(&self, psi: &nalgebra::DVector<Complex64>) -> f64 {
        (psi.adjoint() * &self.m * psi)[(0, 0)].re
    }
}

/// A single-mode Gaussian state; the vacuum has covariance `diag(1/2, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianStateOneMode {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl GaussianStateOneMode {
    pub fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        let g = Self { mean, cov };
        g.validate()?;
        Ok(g)
    }

    pub fn vacuum() -> Self {
        Self {
            mean: [0.0, 0.0],
            cov: [[0.5, 0.0], [0.0, 0.5]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.cov;
        if self.mean.iter().chain(c.iter().flatten()).any(|x| !x.is_finite()) {
            return domain("GaussianStateOneMode", "non-finite moment");
        }
        if (c[0][1] - c[1][0]).abs() > HERMITIAN_TOL * c[0][0].abs().max(c[1][1].abs()).max(1.0) {
            return domain("GaussianStateOneMode", "covariance is not symmetric");
        }
        if !(c[0][0] > 0.0) || self.det() < 0.25 - 1e-12 {
            return domain(
                "GaussianStateOneMode",
                format!("covariance violates the uncertainty relation (det {})", self.det()),
            );
        }
        Ok(())
    }

    pub fn det(&self) -> f64 {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    /// Symplectic eigenvalue `sqrt(det cov)`, 1/2 for pure states.
    pub fn symplectic_eigenvalue(&self) -> f64 {
        self.det().max(0.25).sqrt()
    }

    /// Initial cutoff for the adaptive policy.
    pub fn start_dim(&self) -> usize {
        let [q, p] = self.mean;
        (20.0 + 10.0 * (q * q + p * p) + 20.0 * self.symplectic_eigenvalue()).ceil() as usize
    }

    /// Williamson form for one mode: `(nbar, squeeze, angle)` with
    /// `cov = nu R(angle) diag(e^{-2s}, e^{2s}) R(angle)^T` and
    /// `nbar = nu - 1/2`.
    pub fn williamson(&self) -> (f64, f64, f64) {
        let nu = self.symplectic_eigenvalue();
        let c = self.cov;
        let (a, b, d) = (c[0][0] / nu, 0.5 * (c[0][1] + c[1][0]) / nu, c[1][1] / nu);
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d).powi(2) + b * b).sqrt();
        let lmin = (mean - rad).max(f64::MIN_POSITIVE);
        let s = -0.5 * lmin.ln();
        // eigenvector of the smaller eigenvalue
        let angle = if rad == 0.0 { 0.0 } else { 0.5 * (2.0 * b).atan2(a - d) + std::f64::consts::FRAC_PI_2 };
        (nu - 0.5, s, angle)
    }

    /// Symplectic `T` with `T cov T^T = nu I`, built from [`Self::williamson`].
    pub fn normal_form_transform(&self) -> [[f64; 2]; 2] {
        let (_, s, angle) = self.williamson();
        let (sin, cos) = angle.sin_cos();
        let (up, down) = (s.exp(), (-s).exp());
        // diag(e^s, e^-s) R(angle)^T
        [[up * cos, up * sin], [-down * sin, down * cos]]
    }

    /// The state after the symplectic map `t`, i.e. `mean -> t mean` and
    /// `cov -> t cov t^T`.
    pub fn transformed(&self, t: [[f64; 2]; 2]) -> Result<Self> {
        let apply = |v: [f64; 2]| [t[0][0] * v[0] + t[0][1] * v[1], t[1][0] * v[0] + t[1][1] * v[1]];
        let c = self.cov;
        let tc = [apply([c[0][0], c[1][0]]), apply([c[0][1], c[1][1]])];
        // tc[j] is t times column j of cov; multiply by t^T on the right
        let cov = [
            [tc[0][0] * t[0][0] + tc[1][0] * t[0][1], tc[0][0] * t[1][0] + tc[1][0] * t[1][1]],
            [tc[0][1] * t[0][0] + tc[1][1] * t[0][1], tc[0][1] * t[1][0] + tc[1][1] * t[1][1]],
        ];
        let sym = 0.5 * (cov[0][1] + cov[1][0]);
        Self::new(apply(self.mean), [[cov[0][0], sym], [sym, cov[1][1]]])
    }
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn annihilation(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { Complex64::from((j as f64).sqrt()) } else { Complex64::default() })
}

pub fn ladder(dim: usize) -> Result<(FockOperator, FockOperator)> {
    check_dim("ladder", dim)?;
    let a = annihilation(dim);
    let ad = a.adjoint();
    Ok((FockOperator { m: a }, FockOperator { m: ad }))
}

/// `q = (a + a†)/√2` and `p = (a - a†)/(i√2)`.
fn quadratures(dim: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let a = annihilation(dim);
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a + &ad) * Complex64::from(s);
    let p = (&a - &ad) * Complex64::new(0.0, -s);
    (q, p)
}

fn displacement_generator(beta: Complex64, dim: usize) -> DMatrix<Complex64> {
    let a = annihilation(dim);
    &a.adjoint() * beta - a * beta.conj()
}

fn squeeze_generator(r: f64, dim: usize) -> DMatrix<Complex64> {
    let a = annihilation(dim);
    let a2 = &a * &a;
    (&a2 - a2.adjoint()) * Complex64::from(0.5 * r)
}

fn crop(m: &DMatrix<Complex64>, dim: usize) -> DMatrix<Complex64> {
    m.view((0, 0), (dim, dim)).into_owned()
}

/// Norm lost by the image of the vacuum, the column every caller relies
/// on; higher columns spread further and are only as good as the cutoff.
fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    (1.0 - m.column(0).norm_squared()).abs()
}

fn cropped_unitary(operation: &'static str, generator: DMatrix<Complex64>, dim: usize) -> Result<FockOperator> {
    let full = generator.exp();
    let m = crop(&full, dim);
    let defect = unitarity_defect(&m);
    if !(defect <= UNITARITY_TOL) {
        return Err(Error::Cutoff { operation, dim, defect });
    }
    Ok(FockOperator { m })
}

/// `D(beta) = exp(beta a† - conj(beta) a)`.
pub fn displacement_op(beta: Complex64, dim: usize) -> Result<FockOperator> {
    check_dim("displacement_op", dim)?;
    if !beta.re.is_finite() || !beta.im.is_finite() {
        return domain("displacement_op", "beta must be finite");
    }
    cropped_unitary("displacement_op", displacement_generator(beta, padded(dim)), dim)
}

/// `S(r) = exp((r/2)(a² - a†²))`; squeezes `q` for `r > 0`.
pub fn squeeze_op(r: f64, dim: usize) -> Result<FockOperator> {
    check_dim("squeeze_op", dim)?;
    if !r.is_finite() {
        return domain("squeeze_op", "r must be finite");
    }
    cropped_unitary("squeeze_op", squeeze_generator(r, padded(dim)), dim)
}

fn thermal_diagonal(operation: &'static str, nbar: f64, dim: usize) -> Result<Vec<f64>> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return domain(operation, format!("nbar must be finite and >= 0, got {nbar}"));
    }
    let x = nbar / (nbar + 1.0);
    let tail = x.powi(dim as i32);
    if tail > THERMAL_TAIL_TOL {
        return Err(Error::Cutoff {
            operation,
            dim,
            defect: tail,
        });
    }
    let mut w: Vec<f64> = (0..dim).map(|n| (1.0 - x) * x.powi(n as i32)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    Ok(w)
}

pub fn thermal_state(nbar: f64, dim: usize) -> Result<FockDensity> {
    check_dim("thermal_state", dim)?;
    let w = thermal_diagonal("thermal_state", nbar, dim)?;
    let m = DMatrix::from_fn(dim, dim, |i, j| if i == j { Complex64::from(w[i]) } else { Complex64::default() });
    Ok(FockDensity { m })
}

/// Density matrix of `g` truncated to `dim`, from a recurrence on its
/// elements rather than from `D R S rho_th S† R† D†` with matrix
/// exponentials.
///
/// With `N = <Δa†Δa>`, `M = <ΔaΔa>`, `beta = <a>` and
/// `det = (N+1)² - |M|²`, the generating function
/// `sum rho_mn z^m w^n / sqrt(m! n!)` is
/// `t exp(A z²/2 + c z w + conj(A) w²/2 + b z + conj(b) w)` with
/// `A = M/det`, `c = 1 - (N+1)/det`, `b = ((N+1) beta - M conj(beta))/det`,
/// `t = exp(-((N+1)|beta|² - Re(conj(M) beta²))/det) / sqrt(det)`.
/// Differentiating gives
/// `sqrt(n+1) rho[m][n+1] = conj(b) rho[m][n] + c sqrt(m) rho[m-1][n] + conj(A) sqrt(n) rho[m][n-1]`,
/// which reads no row below `m`, so truncation is exact.
pub fn gaussian_to_fock(g: &GaussianStateOneMode, dim: usize) -> Result<FockDensity> {
    g.validate()?;
    check_dim("gaussian_to_fock", dim)?;
    let v = g.cov;
    let n1 = 0.5 * (v[0][0] + v[1][1]) + 0.5;
    let mm = Complex64::new(0.5 * (v[0][0] - v[1][1]), 0.5 * (v[0][1] + v[1][0]));
    let det = n1 * n1 - mm.norm_sqr();
    let beta = Complex64::new(g.mean[0], g.mean[1]) * std::f64::consts::FRAC_1_SQRT_2;
    let a = mm / det;
    let c = 1.0 - n1 / det;
    let b = (beta * n1 - mm * beta.conj()) / det;
    let t = (-(n1 * beta.norm_sqr() - (mm.conj() * beta * beta).re) / det).exp() / det.sqrt();
    let sq: Vec<f64> = (0..=dim).map(|k| (k as f64).sqrt()).collect();

    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    // column 0 from the conjugate relation, then columns left to right
    m[(0, 0)] = Complex64::from(t);
    for k in 0..dim - 1 {
        let mut z = b * m[(k, 0)];
        if k > 0 {
            z += a * sq[k] * m[(k - 1, 0)];
        }
        m[(k + 1, 0)] = z / sq[k + 1];
    }
    let (ac, bc) = (a.conj(), b.conj());
    for n in 0..dim - 1 {
        for k in 0..dim {
            let mut z = bc * m[(k, n)];
            if k > 0 {
                z += c * sq[k] * m[(k - 1, n)];
            }
            if n > 0 {
                z += ac * sq[n] * m[(k, n - 1)];
            }
            m[(k, n + 1)] = z / sq[n + 1];
        }
    }
    symmetrize(&mut m);
    let deficit = 1.0 - m.trace().re;
    if !(deficit <= TRACE_TOL) {
        return Err(Error::Cutoff {
            operation: "gaussian_to_fock",
            dim,
            defect: deficit,
        });
    }
    Ok(FockDensity { m })
}

fn symmetrize(m: &mut DMatrix<Complex64>) {
    let h = (&*m + m.adjoint()) * Complex64::from(0.5);
    *m = h;
}

/// First and second moments of a density matrix, in the same layout as
/// [`GaussianStateOneMode`].
pub fn moments(rho: &FockDensity) -> GaussianStateOneMode {
    let (q, p) = quadratures(rho.dim());
    let ev = |op: &DMatrix<Complex64>| (&rho.m * op).trace().re;
    let (mq, mp) = (ev(&q), ev(&p));
    let qq = ev(&(&q * &q)) - mq * mq;
    let pp = ev(&(&p * &p)) - mp * mp;
    let qp = 0.5 * ev(&(&q * &p + &p * &q)) - mq * mp;
    GaussianStateOneMode {
        mean: [mq, mp],
        cov: [[qq, qp], [qp, pp]],
    }
}

fn entropy_of(eigenvalues: impl IntoIterator<Item = f64>) -> f64 {
    eigenvalues
        .into_iter()
        .filter(|&l| l > EIGEN_CLIP)
        .map(|l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Entropy in bits.
pub fn von_neumann_entropy(rho: &FockDensity) -> Result<f64> {
    if hermiticity_defect(&rho.m) > HERMITIAN_TOL {
        return domain("von_neumann_entropy", "matrix is not Hermitian");
    }
    let eig = SymmetricEigen::new(rho.m.clone()).eigenvalues;
    let min = eig.min();
    if min < -1e-10 {
        return domain("von_neumann_entropy", format!("negative eigenvalue {min}"));
    }
    Ok(entropy_of(eig.iter().copied()))
}

/// Entropy in bits of a Gaussian state from its symplectic eigenvalue.
pub fn gaussian_entropy(g: &GaussianStateOneMode) -> Result<f64> {
    g.validate()?;
    let nu = g.symplectic_eigenvalue();
    let (plus, minus) = (nu + 0.5, nu - 0.5);
    let term = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
    Ok((term(plus) - term(minus)).max(0.0))
}

/// Result of an adaptive-cutoff evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Converged {
    pub entropy: f64,
    pub dim: usize,
    pub trace_deficit: f64,
}

/// Entropy of `build(dim)`, growing the cutoff by 25% from `start` until
/// the entropy changes by at most [`ENTROPY_TOL`]. Builders may return a
/// cutoff error to request a larger dimension.
pub fn converged_entropy<F>(start: usize, mut build: F) -> Result<Converged>
where
    F: FnMut(usize) -> Result<FockDensity>,
{
    let grow = |d: usize| (d as f64 * 1.25).ceil() as usize;
    let mut dim = start.max(2);
    let mut last: Option<f64> = None;
    let mut last_defect = f64::NAN;
    while dim <= MAX_DIM {
        match build(dim) {
            Ok(rho) => {
                let s = von_neumann_entropy(&rho)?;
                let deficit = 1.0 - rho.trace();
                if let Some(prev) = last {
                    if (s - prev).abs() <= ENTROPY_TOL && deficit <= TRACE_TOL {
                        return Ok(Converged {
                            entropy: s,
                            dim,
                            trace_deficit: deficit,
                        });
                    }
                    last_defect = (s - prev).abs();
                }
                last = Some(s);
            }
            Err(Error::Cutoff { defect, .. }) => last_defect = defect,
            Err(e) => return Err(e),
        }
        dim = grow(dim);
    }
    Err(Error::Cutoff {
        operation: "converged_entropy",
        dim: MAX_DIM,
        defect: last_defect,
    })
}
