//! Sklar composition `H(x, y) = C_θ(F(x), G(y))`.
//!
//! The composition is the only production path. The `reference` module
//! (behind the `reference-densities` feature) carries independently written
//! closed forms used to cross-check it.

use serde::Serialize;

use crate::copula::{Copula, DependenceParam};
use crate::marginals::{MarginalError, MarginalModel};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BivariateModel<T> {
    pub margin_x: MarginalModel<T>,
    pub margin_y: MarginalModel<T>,
    pub theta: DependenceParam<T>,
}

impl<T: Real> BivariateModel<T> {
    pub fn new(
        margin_x: MarginalModel<T>,
        margin_y: MarginalModel<T>,
        theta: DependenceParam<T>,
    ) -> Self {
        Self {
            margin_x,
            margin_y,
            theta,
        }
    }

    pub fn copula(&self) -> Copula<T> {
        Copula::from_param(self.theta)
    }

    pub fn joint_cdf(&self, x: T, y: T) -> T {
        self.copula()
            .cdf(self.margin_x.cdf(x), self.margin_y.cdf(y))
    }

    /// `c(F(x), G(y))·f(x)·g(y)`; zero outside the support.
    pub fn joint_pdf(&self, x: T, y: T) -> Result<T, MarginalError> {
        let fx = self.margin_x.ln_pdf(x)?;
        let gy = self.margin_y.ln_pdf(y)?;
        let c = self
            .copula()
            .pdf(self.margin_x.cdf(x), self.margin_y.cdf(y));
        if c == T::zero() {
            return Ok(T::zero());
        }
        Ok((c.ln() + fx + gy).exp())
    }

    /// `P(Y ≤ y | X = x)`.
    pub fn cond_cdf_y_given_x(&self, y: T, x: T) -> T {
        self.copula()
            .cond_cdf_v_given_u(self.margin_y.cdf(y), self.margin_x.cdf(x))
    }
}

#[cfg(feature = "reference-densities")]
pub mod reference {
    //! Closed-form joint distributions written directly in the original
    //! variables, without going through the copula.

    use crate::real::Real;
    use crate::special::{gamma_p, gamma_p_inv, ln_gamma};

    /// Joint distribution of the baseline pair: `X` exponential with rate
    /// λ and `Y` with the piecewise power-law margin, `μ = θλ`.
    pub fn baseline_joint_cdf<T: Real>(lambda: T, mu: T, x: T, y: T) -> T {
        let one = T::one();
        if x <= T::zero() || y <= T::zero() {
            return T::zero();
        }
        let total = lambda + mu;
        let k = lambda / (total * y.powf(mu));
        if y <= one {
            if x <= -y.ln() {
                return T::zero();
            }
            y.powf(lambda) - (-lambda * x).exp() + k * ((-total * x).exp() - y.powf(total))
        } else {
            one - (-lambda * x).exp() - k * (one - (-total * x).exp())
        }
    }

    /// Joint density with Weibull margins `1 − e^{−(λᵢ t)^{δᵢ}}`.
    #[allow(clippy::too_many_arguments)]
    pub fn weibull_density<T: Real>(
        rate_x: T,
        shape_x: T,
        rate_y: T,
        shape_y: T,
        theta: T,
        x: T,
        y: T,
    ) -> T {
        let one = T::one();
        if x <= T::zero() || y <= T::zero() {
            return T::zero();
        }
        let sx = (rate_x * x).powf(shape_x);
        let sy = (rate_y * y).powf(shape_y);
        let head = shape_x
            * shape_y
            * rate_x.powf(shape_x)
            * rate_y.powf(shape_y)
            * x.powf(shape_x - one)
            * y.powf(shape_y - one);
        let phi1 = (one + theta).ln().powf(shape_y.recip()) / rate_y;
        if y > phi1 {
            return head * (one + theta) * (-sy).exp() * (-(one + theta) * sx).exp();
        }
        let gy = -(-sy).exp_m1();
        let phi2 = (theta / ((one + theta) * gy)).ln().powf(shape_x.recip()) / rate_x;
        if x > phi2 {
            head * theta.powf(one + theta) / (one + theta).powf(theta)
                * (-sy).exp()
                * ((-sx).exp() / gy).powf(one + theta)
        } else {
            T::zero()
        }
    }

    /// Joint density with Gamma margins of shape αᵢ and rate βᵢ.
    #[allow(clippy::too_many_arguments)]
    pub fn gamma_density<T: Real>(
        shape_x: T,
        rate_x: T,
        shape_y: T,
        rate_y: T,
        theta: T,
        x: T,
        y: T,
    ) -> T {
        let one = T::one();
        if x <= T::zero() || y <= T::zero() {
            return T::zero();
        }
        let a = theta / (one + theta);
        let log_head = shape_x * rate_x.ln()
            + shape_y * rate_y.ln()
            + (shape_x - one) * x.ln()
            + (shape_y - one) * y.ln()
            - (rate_x * x + rate_y * y)
            - ln_gamma(shape_x)
            - ln_gamma(shape_y);
        let px = gamma_p(shape_x, rate_x * x).unwrap_or(T::nan());
        let py = gamma_p(shape_y, rate_y * y).unwrap_or(T::nan());
        let zeta1 = gamma_p_inv(shape_y, a).unwrap_or(T::nan()) / rate_y;
        if y > zeta1 {
            return log_head.exp() * (one + theta) * (one - px).powf(theta);
        }
        let inner = one - py / a;
        let xi1 = if inner > T::zero() {
            gamma_p_inv(shape_x, inner).unwrap_or(T::nan()) / rate_x
        } else {
            T::zero()
        };
        if x > xi1 {
            log_head.exp() * theta.powf(one + theta) / (one + theta).powf(theta)
                * (one - px).powf(theta)
                * py.powf(-(one + theta))
        } else {
            T::zero()
        }
    }
}
