//! Regularization schedules eta(t) with closed-form running integrals.
//!
//! The time-dependent variants decay toward sigma^2, trading early
//! convergence speed against the asymptotic error floor. Only schedules
//! whose integral xi(t) = int_0^t eta(u) du has a closed form are supported;
//! the MSE quadrature leans on xi directly.

use crate::error::{Error, Result};

/// Default softening constant for the inverse-decay schedule.
pub const DEFAULT_EPS_REG: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    /// eta(t) = eta.
    Constant { eta: f64 },
    /// eta(t) = 1/(alpha t + eps) + sigma2.
    InverseDecay { alpha: f64, eps: f64, sigma2: f64 },
    /// eta(t) = beta exp(-gamma t) + sigma2.
    ExpDecay { beta: f64, gamma: f64, sigma2: f64 },
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{name} must be positive and finite (got {value})"
        )))
    }
}

impl Regularizer {
    pub fn constant(eta: f64) -> Result<Self> {
        require_positive("eta", eta)?;
        Ok(Self::Constant { eta })
    }

    pub fn inverse_decay(alpha: f64, sigma2: f64) -> Result<Self> {
        Self::inverse_decay_with_eps(alpha, DEFAULT_EPS_REG, sigma2)
    }

    pub fn inverse_decay_with_eps(alpha: f64, eps: f64, sigma2: f64) -> Result<Self> {
        require_positive("alpha", alpha)?;
        require_positive("eps", eps)?;
        require_positive("sigma2", sigma2)?;
        Ok(Self::InverseDecay { alpha, eps, sigma2 })
    }

    pub fn exp_decay(beta: f64, gamma: f64, sigma2: f64) -> Result<Self> {
        require_positive("beta", beta)?;
        require_positive("gamma", gamma)?;
        require_positive("sigma2", sigma2)?;
        Ok(Self::ExpDecay { beta, gamma, sigma2 })
    }

    /// Instantaneous regularization strength; positive for all t >= 0.
    pub fn eta(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { eta } => eta,
            Self::InverseDecay { alpha, eps, sigma2 } => 1.0 / (alpha * t + eps) + sigma2,
            Self::ExpDecay { beta, gamma, sigma2 } => beta * (-gamma * t).exp() + sigma2,
        }
    }

    /// Running integral xi(t) = int_0^t eta(u) du, in closed form.
    pub fn xi(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { eta } => eta * t,
            Self::InverseDecay { alpha, eps, sigma2 } => {
                ((alpha * t + eps) / eps).ln() / alpha + sigma2 * t
            }
            Self::ExpDecay { beta, gamma, sigma2 } => {
                beta / gamma * (1.0 - (-gamma * t).exp()) + sigma2 * t
            }
        }
    }

    /// The constant value, if this schedule is time-independent.
    pub fn as_constant(&self) -> Option<f64> {
        match *self {
            Self::Constant { eta } => Some(eta),
            _ => None,
        }
    }
}

impl std::fmt::Display for Regularizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Self::Constant { eta } => write!(f, "constant(eta={eta})"),
            Self::InverseDecay { alpha, eps, sigma2 } => {
                write!(f, "inverse-decay(alpha={alpha}, eps={eps}, sigma2={sigma2})")
            }
            Self::ExpDecay { beta, gamma, sigma2 } => {
                write!(f, "exp-decay(beta={beta}, gamma={gamma}, sigma2={sigma2})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_simpson;
    use proptest::prelude::*;

    #[test]
    fn validation() {
        assert!(Regularizer::constant(0.5).is_ok());
        assert!(Regularizer::constant(0.0).is_err());
        assert!(Regularizer::constant(-1.0).is_err());
        assert!(Regularizer::inverse_decay(0.0, 1.0).is_err());
        assert!(Regularizer::exp_decay(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn decaying_schedules_approach_sigma2() {
        let sigma2 = 0.3;
        let inv = Regularizer::inverse_decay(500.0, sigma2).unwrap();
        let exp = Regularizer::exp_decay(2.0, 5.0, sigma2).unwrap();
        for reg in [inv, exp] {
            assert!((reg.eta(1e6) - sigma2).abs() < 1e-5);
        }
    }

    proptest! {
        // xi must be the antiderivative of eta for every variant.
        #[test]
        fn xi_matches_quadrature_of_eta(
            variant in 0usize..3,
            p1 in 0.05f64..20.0,
            p2 in 0.05f64..5.0,
            sigma2 in 0.05f64..4.0,
            t in 0.0f64..3.0,
        ) {
            let reg = match variant {
                0 => Regularizer::constant(p1).unwrap(),
                1 => Regularizer::inverse_decay_with_eps(p1, 1e-3, sigma2).unwrap(),
                _ => Regularizer::exp_decay(p1, p2, sigma2).unwrap(),
            };
            let numeric = adaptive_simpson(|u| reg.eta(u), 0.0, t, 1e-10).unwrap();
            prop_assert!((numeric - reg.xi(t)).abs() < 1e-6 * (1.0 + reg.xi(t).abs()));
        }

        #[test]
        fn eta_stays_positive(
            variant in 0usize..3,
            p1 in 0.05f64..20.0,
            p2 in 0.05f64..5.0,
            sigma2 in 0.05f64..4.0,
            t in 0.0f64..100.0,
        ) {
            let reg = match variant {
                0 => Regularizer::constant(p1).unwrap(),
                1 => Regularizer::inverse_decay(p1, sigma2).unwrap(),
                _ => Regularizer::exp_decay(p1, p2, sigma2).unwrap(),
            };
            prop_assert!(reg.eta(t) > 0.0);
        }
    }
}
