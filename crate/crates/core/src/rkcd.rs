//! Chebyshev-stabilized multi-stage descent for the regularized flow.
//!
//! Each sweep of `s` stages costs one matrix-vector product per stage, like
//! plain gradient descent, but the Chebyshev recurrence stretches the stable
//! step far beyond the explicit-Euler bound on stiff spectra. The stage
//! index j = mod(k-1, s) + 1 drives the branch: j = 1 opens a sweep with a
//! damped gradient step, later stages run the two-term recurrence. With
//! s = 1 every iteration is a sweep opener, i.e. plain gradient descent.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{draw_noise, ChannelInstance};
use crate::error::{Error, Result};
use crate::modulation::{symbol_detect, Modulation};

/// Chebyshev polynomial of the first kind, T_s(z), by three-term recurrence.
pub fn chebyshev_t(s: usize, z: f64) -> f64 {
    match s {
        0 => 1.0,
        1 => z,
        _ => {
            let mut prev = 1.0;
            let mut cur = z;
            for _ in 2..=s {
                (prev, cur) = (cur, 2.0 * z * cur - prev);
            }
            cur
        }
    }
}

/// Derivative T_s'(z) by the companion recurrence
/// T_{j+1}' = 2 T_j + 2z T_j' - T_{j-1}'.
pub fn chebyshev_t_prime(s: usize, z: f64) -> f64 {
    match s {
        0 => 0.0,
        1 => 1.0,
        _ => {
            let mut t_prev = 1.0;
            let mut t_cur = z;
            let mut d_prev = 0.0;
            let mut d_cur = 1.0;
            for _ in 2..=s {
                (d_prev, d_cur) = (d_cur, 2.0 * t_cur + 2.0 * z * d_cur - d_prev);
                (t_prev, t_cur) = (t_cur, 2.0 * z * t_cur - t_prev);
            }
            d_cur
        }
    }
}

/// Stability parameters of the stabilized iteration.
#[derive(Debug, Clone, Copy)]
pub struct RkcdParams {
    /// Damping constant.
    pub eps_damp: f64,
    /// Stage count per sweep.
    pub s: usize,
    /// Step size.
    pub h: f64,
    pub omega0: f64,
    pub omega1: f64,
    /// Lower bound on the Gram eigenvalues used for the step size.
    pub ell: f64,
    /// Upper bound on the Gram eigenvalues.
    pub upper: f64,
}

/// Derives the stable parameter set from eigenvalue bounds:
/// s = ceil(sqrt((upper/ell - 1) eps / 2)) clamped to at least 1,
/// omega0 = 1 + eps/s^2, omega1 = T_s(omega0)/T_s'(omega0),
/// h = (omega0 - 1) / (omega1 (ell + eta)).
pub fn make_rkcd_params(ell: f64, upper: f64, eps_damp: f64, eta: f64) -> Result<RkcdParams> {
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(Error::InvalidInput(format!(
            "lower eigenvalue bound must be positive (got {ell}); \
             supply lambda_n or a positive estimate"
        )));
    }
    if !(upper >= ell) || !upper.is_finite() {
        return Err(Error::InvalidInput(format!(
            "upper bound {upper} must be >= lower bound {ell}"
        )));
    }
    if !(eps_damp > 0.0) || !eps_damp.is_finite() {
        return Err(Error::InvalidInput(format!(
            "damping constant must be positive (got {eps_damp})"
        )));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidInput(format!(
            "eta must be positive (got {eta})"
        )));
    }
    let s = ((upper / ell - 1.0) * eps_damp / 2.0).sqrt().ceil() as usize;
    let s = s.max(1);
    let omega0 = 1.0 + eps_damp / (s * s) as f64;
    let omega1 = chebyshev_t(s, omega0) / chebyshev_t_prime(s, omega0);
    let h = (omega0 - 1.0) / (omega1 * (ell + eta));
    Ok(RkcdParams { eps_damp, s, h, omega0, omega1, ell, upper })
}

impl RkcdParams {
    /// Overrides the step size while keeping the Chebyshev parameters.
    pub fn with_step(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidInput(format!(
                "step size must be positive (got {h})"
            )));
        }
        self.h = h;
        Ok(self)
    }

    fn mu(&self, j: usize) -> f64 {
        2.0 * self.omega1 * chebyshev_t(j - 1, self.omega0) / chebyshev_t(j, self.omega0)
    }

    fn nu(&self, j: usize) -> f64 {
        2.0 * self.omega0 * chebyshev_t(j - 1, self.omega0) / chebyshev_t(j, self.omega0)
    }
}

/// Starting state of the detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialValue {
    /// x^{[0]} = H^H y. The MSE-vs-time theory assumes this start.
    MatchedFilter,
    /// x^{[0]} = 0.
    Zero,
}

/// Iterates, mapped virtual times, and the final hard decision of one run.
#[derive(Debug, Clone)]
pub struct DetectionRun {
    /// x^{[0]} through x^{[J]}.
    pub estimates: Vec<DVector<Complex64>>,
    /// Virtual flow time of each iterate; times[0] = 0.
    pub times: Vec<f64>,
    /// Hard decision on the final iterate.
    pub detected: DVector<Complex64>,
}

/// Runs `iterations` stages of the stabilized descent on
/// f(x) = ||y - Hx||^2 + eta ||x||^2, recording every iterate.
///
/// Gradients are evaluated with matrix-vector products only; the Gram
/// matrix is never formed.
pub fn rkcd_detect(
    channel: &ChannelInstance,
    y: &DVector<Complex64>,
    eta: f64,
    params: &RkcdParams,
    iterations: usize,
    init: InitialValue,
    modulation: Modulation,
) -> Result<DetectionRun> {
    if iterations == 0 {
        return Err(Error::InvalidInput("at least one iteration is required".into()));
    }
    if y.len() != channel.m() {
        return Err(Error::DimensionMismatch(format!(
            "received vector has {} entries, channel expects {}",
            y.len(),
            channel.m()
        )));
    }
    let matched = channel.matched_filter(y);
    let x0 = match init {
        InitialValue::MatchedFilter => matched.clone(),
        InitialValue::Zero => DVector::from_element(channel.n(), Complex64::ZERO),
    };

    let mut estimates = Vec::with_capacity(iterations + 1);
    let mut prev2 = x0.clone();
    let mut prev = x0.clone();
    estimates.push(x0);

    for k in 1..=iterations {
        let j = (k - 1) % params.s + 1;
        let grad = channel.flow_gradient(&prev, eta, &matched);
        let next = if j == 1 {
            &prev - grad * Complex64::new(params.h * params.omega1 / params.omega0, 0.0)
        } else {
            let (mu, nu) = (params.mu(j), params.nu(j));
            grad * Complex64::new(-params.h * mu, 0.0)
                + &prev * Complex64::new(nu, 0.0)
                - &prev2 * Complex64::new(nu - 1.0, 0.0)
        };
        if !next.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Divergence(format!(
                "non-finite iterate at stage {k}; check the eigenvalue bounds"
            )));
        }
        estimates.push(next.clone());
        prev2 = std::mem::replace(&mut prev, next);
    }

    let times = rkcd_times(params, iterations);
    let detected = symbol_detect(estimates.last().unwrap(), modulation);
    Ok(DetectionRun { estimates, times, detected })
}

/// Virtual flow time of each iterate, T_0 = 0 through T_k_max.
///
/// Within a sweep the offsets from the sweep base follow the same
/// recurrence as the estimates: d_1 = h omega1/omega0 and
/// d_j = nu_j d_{j-1} + (1 - nu_j) d_{j-2} + h mu_j, and the base advances
/// by the completed sweep's offset (exactly h) when mod(k, s) = 0.
pub fn rkcd_times(params: &RkcdParams, k_max: usize) -> Vec<f64> {
    let mut times = Vec::with_capacity(k_max + 1);
    times.push(0.0);
    let mut base = 0.0;
    let mut d_prev = 0.0;
    let mut d_prev2 = 0.0;
    for k in 1..=k_max {
        let j = (k - 1) % params.s + 1;
        let d = if j == 1 {
            params.h * params.omega1 / params.omega0
        } else {
            params.nu(j) * d_prev + (1.0 - params.nu(j)) * d_prev2 + params.h * params.mu(j)
        };
        times.push(base + d);
        if k % params.s == 0 {
            base += d;
        }
        d_prev2 = if j == 1 { 0.0 } else { d_prev };
        d_prev = d;
    }
    times
}

/// Runs the stabilized descent until the relative distance to `target`
/// drops below `tol`. Returns the stage count, or None if the budget ran out.
pub fn rkcd_iterations_to_tolerance(
    channel: &ChannelInstance,
    y: &DVector<Complex64>,
    eta: f64,
    params: &RkcdParams,
    target: &DVector<Complex64>,
    tol: f64,
    max_iters: usize,
) -> Result<Option<usize>> {
    let matched = channel.matched_filter(y);
    let target_norm = target.norm();
    let mut prev2 = matched.clone();
    let mut prev = matched.clone();
    if (&prev - target).norm() <= tol * target_norm {
        return Ok(Some(0));
    }
    for k in 1..=max_iters {
        let j = (k - 1) % params.s + 1;
        let grad = channel.flow_gradient(&prev, eta, &matched);
        let next = if j == 1 {
            &prev - grad * Complex64::new(params.h * params.omega1 / params.omega0, 0.0)
        } else {
            let (mu, nu) = (params.mu(j), params.nu(j));
            grad * Complex64::new(-params.h * mu, 0.0)
                + &prev * Complex64::new(nu, 0.0)
                - &prev2 * Complex64::new(nu - 1.0, 0.0)
        };
        if !next.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Divergence(format!(
                "non-finite iterate at stage {k}; check the eigenvalue bounds"
            )));
        }
        if (&next - target).norm() <= tol * target_norm {
            return Ok(Some(k));
        }
        prev2 = std::mem::replace(&mut prev, next);
    }
    Ok(None)
}

/// Power-iteration estimates of the extreme Gram eigenvalues, for callers
/// that want to avoid the dense eigendecomposition. Uses only matrix-vector
/// products: lambda_max from the Gram operator, lambda_min from the shifted
/// operator lambda_max I - G.
pub fn estimate_eigen_bounds(
    channel: &ChannelInstance,
    iterations: usize,
    seed: u64,
) -> (f64, f64) {
    let n = channel.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let power = |apply: &dyn Fn(&DVector<Complex64>) -> DVector<Complex64>,
                 rng: &mut ChaCha8Rng| {
        let mut v = draw_noise(n, 1.0, rng);
        v /= Complex64::new(v.norm(), 0.0);
        let mut estimate = 0.0;
        for _ in 0..iterations {
            let av = apply(&v);
            let norm = av.norm();
            if norm == 0.0 {
                return 0.0;
            }
            estimate = v.dotc(&av).re;
            v = av / Complex64::new(norm, 0.0);
        }
        estimate
    };

    let top = power(&|v| channel.gram_mul(v), &mut rng);
    let shifted = power(
        &|v| v * Complex64::new(top, 0.0) - channel.gram_mul(v),
        &mut rng,
    );
    (top - shifted, top)
}
