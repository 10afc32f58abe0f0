//! Channel generation and the observation model y = Hs + w.
//!
//! Every [`ChannelInstance`] carries the eigendecomposition of its Gram
//! matrix H^H H, computed once at construction. All closed-form estimators
//! and MSE formulas evaluate through that basis, so after the one-time
//! decomposition each evaluation is O(n^2).
//!
//! Randomness contract: all generators take an explicit seed and use
//! ChaCha8 streams, so output is bit-identical across runs for a fixed
//! seed. Matrix entries are drawn column-major (column index outer, row
//! index inner), real part before imaginary part; that draw order is part
//! of the reproducibility contract.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::modulation::Modulation;

/// Eigenvalues of a Gram matrix below this are treated as roundoff of zero;
/// anything more negative is a genuine numerical failure.
const EIGENVALUE_ROUNDOFF: f64 = 1e-12;

/// System dimensions and noise level shared by the experiments.
#[derive(Debug, Clone, Copy)]
pub struct SystemConfig {
    /// Transmit antennas (columns of H).
    pub n: usize,
    /// Receive antennas (rows of H).
    pub m: usize,
    /// Per-entry complex noise variance.
    pub sigma2: f64,
    pub modulation: Modulation,
}

impl SystemConfig {
    pub fn new(n: usize, m: usize, sigma2: f64, modulation: Modulation) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidInput(format!(
                "antenna counts must be positive (got n={n}, m={m})"
            )));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidInput(format!(
                "noise variance must be positive and finite (got {sigma2})"
            )));
        }
        Ok(Self { n, m, sigma2, modulation })
    }
}

/// A channel matrix with its cached Gram eigendecomposition.
#[derive(Debug, Clone)]
pub struct ChannelInstance {
    h: DMatrix<Complex64>,
    h_adj: DMatrix<Complex64>,
    /// Gram eigenvalues, sorted descending, clamped at zero.
    lambda: DVector<f64>,
    /// Unitary eigenvector matrix of H^H H, columns matching `lambda`.
    u: DMatrix<Complex64>,
    u_adj: DMatrix<Complex64>,
    kappa: f64,
}

impl ChannelInstance {
    /// Wraps a channel matrix, computing and caching the eigendecomposition
    /// of H^H H. Rejects empty and all-zero matrices.
    pub fn from_matrix(h: DMatrix<Complex64>) -> Result<Self> {
        let (m, n) = h.shape();
        if n == 0 || m == 0 {
            return Err(Error::InvalidInput("channel matrix must be nonempty".into()));
        }
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("channel matrix entry".into()));
        }
        if h.iter().all(|z| *z == Complex64::ZERO) {
            return Err(Error::InvalidInput("channel matrix must be nonzero".into()));
        }

        let h_adj = h.adjoint();
        let gram = &h_adj * &h;
        let eig = gram.symmetric_eigen();

        // Sort modes by eigenvalue, descending, and clamp PSD roundoff.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut lambda = DVector::zeros(n);
        let mut u = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let ev = eig.eigenvalues[src];
            if ev < -EIGENVALUE_ROUNDOFF {
                return Err(Error::NonFinite(format!(
                    "Gram eigenvalue {ev} is negative beyond roundoff"
                )));
            }
            lambda[dst] = ev.max(0.0);
            u.set_column(dst, &eig.eigenvectors.column(src));
        }

        let kappa = if lambda[n - 1] > 0.0 {
            lambda[0] / lambda[n - 1]
        } else {
            f64::INFINITY
        };
        let u_adj = u.adjoint();
        Ok(Self { h, h_adj, lambda, u, u_adj, kappa })
    }

    pub fn n(&self) -> usize {
        self.h.ncols()
    }

    pub fn m(&self) -> usize {
        self.h.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.h
    }

    /// Gram eigenvalues, descending.
    pub fn lambda(&self) -> &DVector<f64> {
        &self.lambda
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda[0]
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda[self.n() - 1]
    }

    /// Gram eigenvectors, columns matching [`lambda`](Self::lambda).
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.u
    }

    /// Condition number of the Gram matrix.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Matched-filter output H^H y.
    pub fn matched_filter(&self, y: &DVector<Complex64>) -> DVector<Complex64> {
        &self.h_adj * y
    }

    /// H^H (H x) via two matrix-vector products; never forms the Gram matrix.
    pub fn gram_mul(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        &self.h_adj * (&self.h * x)
    }

    /// Gradient of the regularized least-squares objective at `x`,
    /// (H^H H + eta I) x - H^H y, given the precomputed matched filter.
    pub fn flow_gradient(
        &self,
        x: &DVector<Complex64>,
        eta: f64,
        matched: &DVector<Complex64>,
    ) -> DVector<Complex64> {
        let mut g = self.gram_mul(x);
        g.axpy(Complex64::new(eta, 0.0), x, Complex64::ONE);
        g -= matched;
        g
    }

    /// Applies U diag(f(lambda_i)) U^H to the matched-filter output H^H y.
    ///
    /// This is the single primitive behind every closed-form estimator.
    pub fn spectral_filter(
        &self,
        y: &DVector<Complex64>,
        f: impl Fn(f64) -> f64,
    ) -> DVector<Complex64> {
        let mut coeffs = &self.u_adj * self.matched_filter(y);
        for (c, &l) in coeffs.iter_mut().zip(self.lambda.iter()) {
            *c *= f(l);
        }
        &self.u * coeffs
    }
}

/// One transmission: symbols, noise realization, and received vector.
#[derive(Debug, Clone)]
pub struct TransmitBlock {
    pub s: DVector<Complex64>,
    pub w: DVector<Complex64>,
    pub y: DVector<Complex64>,
}

impl TransmitBlock {
    /// Builds y = Hs + w from explicit symbol and noise vectors.
    pub fn new(
        channel: &ChannelInstance,
        s: DVector<Complex64>,
        w: DVector<Complex64>,
    ) -> Result<Self> {
        if s.len() != channel.n() {
            return Err(Error::DimensionMismatch(format!(
                "symbol vector has {} entries, channel expects {}",
                s.len(),
                channel.n()
            )));
        }
        if w.len() != channel.m() {
            return Err(Error::DimensionMismatch(format!(
                "noise vector has {} entries, channel expects {}",
                w.len(),
                channel.m()
            )));
        }
        let y = channel.matrix() * &s + &w;
        Ok(Self { s, w, y })
    }
}

fn complex_gaussian_matrix<R: Rng>(
    m: usize,
    n: usize,
    per_element_variance: f64,
    rng: &mut R,
) -> DMatrix<Complex64> {
    let normal = Normal::new(0.0, (per_element_variance / 2.0).sqrt()).expect("valid std dev");
    let mut h = DMatrix::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            h[(i, j)] = Complex64::new(normal.sample(rng), normal.sample(rng));
        }
    }
    h
}

/// Circularly-symmetric complex Gaussian vector with per-entry variance
/// `sigma2` (real and imaginary parts each carry variance sigma2/2).
pub fn draw_noise<R: Rng>(m: usize, sigma2: f64, rng: &mut R) -> DVector<Complex64> {
    let normal = Normal::new(0.0, (sigma2 / 2.0).sqrt()).expect("valid std dev");
    DVector::from_fn(m, |_, _| Complex64::new(normal.sample(rng), normal.sample(rng)))
}

/// i.i.d. CN(0, per_element_variance) channel.
///
/// Use variance 1 for the main experiments; 1/m normalizes the expected
/// column energy to 1 instead.
pub fn gen_iid_channel(
    n: usize,
    m: usize,
    per_element_variance: f64,
    seed: u64,
) -> Result<ChannelInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidInput(format!(
            "antenna counts must be positive (got n={n}, m={m})"
        )));
    }
    if !(per_element_variance > 0.0) || !per_element_variance.is_finite() {
        return Err(Error::InvalidInput(format!(
            "per-element variance must be positive and finite (got {per_element_variance})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ChannelInstance::from_matrix(complex_gaussian_matrix(m, n, per_element_variance, &mut rng))
}

/// Symmetric PSD square root via eigendecomposition.
fn real_sym_sqrt(r: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = r.clone().symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose()
}

fn exponential_correlation(size: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(size, size, |i, j| rho.powi((i as i32 - j as i32).abs()))
}

/// Kronecker channel H = R_R^{1/2} G R_T^{1/2} with exponential correlation
/// rho^|i-j| on both sides and G i.i.d. CN(0, 1).
pub fn gen_kronecker_channel(n: usize, m: usize, rho: f64, seed: u64) -> Result<ChannelInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidInput(format!(
            "antenna counts must be positive (got n={n}, m={m})"
        )));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidInput(format!(
            "correlation coefficient must lie in [0, 1) (got {rho})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = complex_gaussian_matrix(m, n, 1.0, &mut rng);
    let rr_sqrt = real_sym_sqrt(&exponential_correlation(m, rho)).map(|v| Complex64::new(v, 0.0));
    let rt_sqrt = real_sym_sqrt(&exponential_correlation(n, rho)).map(|v| Complex64::new(v, 0.0));
    ChannelInstance::from_matrix(rr_sqrt * g * rt_sqrt)
}

/// Draws noise and forms the received vector for a given symbol vector.
///
/// Consumes 2m normal draws (re, im per entry, in entry order).
pub fn observe(
    channel: &ChannelInstance,
    s: &DVector<Complex64>,
    sigma2: f64,
    seed: u64,
) -> Result<TransmitBlock> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::InvalidInput(format!(
            "noise variance must be positive and finite (got {sigma2})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = draw_noise(channel.m(), sigma2, &mut rng);
    TransmitBlock::new(channel, s.clone(), w)
}
