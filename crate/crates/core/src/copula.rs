//! Closed-form evaluation of the negative-dependence copula `C_θ`.
//!
//! With `a = θ/(1+θ)` and `w = 1 − u` the unit square splits into three
//! regions:
//!
//! * `Void`:  `v ≤ a·w`, no mass, `C = 0`;
//! * `Lower`: `a·w < v ≤ a`, `C = v − w + w·r^θ/(1+θ)` with `r = a·w/v`;
//! * `Upper`: `v > a`, `C = u − (1−v)(1 − w^{1+θ})`.
//!
//! Writing the lower branch through the ratio `r ∈ (0, 1)` keeps every
//! power bounded, so the formulas stay finite across the supported range
//! of θ without a separate log-space path.

use serde::Serialize;
use thiserror::Error;

use crate::quadrature::integrate_pieces;
use crate::real::Real;

/// Smallest supported dependence parameter.
pub const THETA_MIN: f64 = 1e-8;
/// Largest supported dependence parameter.
pub const THETA_MAX: f64 = 1e8;

/// Absolute tolerance used when tagging boundary points.
pub const BOUNDARY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CopulaError {
    #[error("dependence parameter {value} is outside the supported range [{THETA_MIN:e}, {THETA_MAX:e}]")]
    ThetaOutOfRange { value: f64 },
    #[error("point ({u}, {v}) lies outside the unit square")]
    OutsideUnitSquare { u: f64, v: f64 },
    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("{measure} = {value} is outside the open interval (-1, 0)")]
    MeasureOutOfRange { measure: &'static str, value: f64 },
}

/// The copula parameter θ.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct DependenceParam<T> {
    theta: T,
}

impl<T: Real> DependenceParam<T> {
    pub fn new(theta: T) -> Result<Self, CopulaError> {
        if theta.is_finite() && theta >= T::lit(THETA_MIN) && theta <= T::lit(THETA_MAX) {
            Ok(Self { theta })
        } else {
            Err(CopulaError::ThetaOutOfRange {
                value: theta.to_f64_lossy(),
            })
        }
    }

    #[inline]
    pub fn value(self) -> T {
        self.theta
    }

    /// Height `θ/(1+θ)` of the line separating the lower and upper pieces.
    #[inline]
    pub fn threshold(self) -> T {
        self.theta / (T::one() + self.theta)
    }
}

/// A point of the closed unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitPoint<T> {
    pub u: T,
    pub v: T,
}

impl<T: Real> UnitPoint<T> {
    pub fn new(u: T, v: T) -> Result<Self, CopulaError> {
        let unit = T::zero()..=T::one();
        if unit.contains(&u) && unit.contains(&v) {
            Ok(Self { u, v })
        } else {
            Err(CopulaError::OutsideUnitSquare {
                u: u.to_f64_lossy(),
                v: v.to_f64_lossy(),
            })
        }
    }
}

/// Which piece of the copula a point falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionTag {
    Void,
    Lower,
    Upper,
    /// On the line `v = θ/(1+θ)`.
    BoundaryLowerUpper,
    /// On the support edge `v = θ(1−u)/(1+θ)`.
    BoundarySupport,
}

/// Spearman's rho and Kendall's tau of a copula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DependenceMeasures<T> {
    pub rho: T,
    pub tau: T,
}

/// The copula `C_θ` for a fixed parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Copula<T> {
    param: DependenceParam<T>,
}

impl<T: Real> Copula<T> {
    pub fn new(theta: T) -> Result<Self, CopulaError> {
        DependenceParam::new(theta).map(Self::from_param)
    }

    pub fn from_param(param: DependenceParam<T>) -> Self {
        Self { param }
    }

    #[inline]
    pub fn param(&self) -> DependenceParam<T> {
        self.param
    }

    #[inline]
    pub fn theta(&self) -> T {
        self.param.theta
    }

    #[inline]
    fn a(&self) -> T {
        self.param.threshold()
    }

    /// Lower edge of the support at `u`: `θ(1−u)/(1+θ)`.
    #[inline]
    pub fn support_edge(&self, u: T) -> T {
        self.a() * (T::one() - u)
    }

    pub fn classify(&self, p: UnitPoint<T>) -> RegionTag {
        let tol = T::lit(BOUNDARY_TOL).max(T::epsilon() * T::lit(4.0));
        let a = self.a();
        let edge = self.support_edge(p.u);
        if (p.v - a).abs() <= tol {
            RegionTag::BoundaryLowerUpper
        } else if (p.v - edge).abs() <= tol {
            RegionTag::BoundarySupport
        } else if p.v > a {
            RegionTag::Upper
        } else if p.v > edge {
            RegionTag::Lower
        } else {
            RegionTag::Void
        }
    }

    /// `1 − w^{1+θ}` computed without cancellation for small `u`.
    #[inline]
    fn one_minus_w_pow(&self, u: T) -> T {
        let log_w = (-u).ln_1p();
        -((T::one() + self.theta()) * log_w).exp_m1()
    }

    /// The copula `C_θ(u, v)`. Arguments are clamped to `[0, 1]`.
    pub fn cdf(&self, u: T, v: T) -> T {
        let (u, v) = (clamp01(u), clamp01(v));
        if u == T::zero() || v == T::zero() {
            return T::zero();
        }
        if v == T::one() {
            return u;
        }
        if u == T::one() {
            return v;
        }
        let theta = self.theta();
        let a = self.a();
        let w = T::one() - u;
        if v > a {
            u - (T::one() - v) * self.one_minus_w_pow(u)
        } else if v > a * w {
            let r = a * w / v;
            let value = v - w + w * r.powf(theta) / (T::one() + theta);
            value.max(T::zero())
        } else {
            T::zero()
        }
    }

    pub fn cdf_at(&self, p: UnitPoint<T>) -> T {
        self.cdf(p.u, p.v)
    }

    /// Survival copula `Ĉ(u, v) = u + v − 1 + C(1−u, 1−v)`.
    pub fn survival(&self, u: T, v: T) -> T {
        let (u, v) = (clamp01(u), clamp01(v));
        (u + v - T::one() + self.cdf(T::one() - u, T::one() - v)).max(T::zero())
    }

    /// Copula density; zero on the void region.
    pub fn pdf(&self, u: T, v: T) -> T {
        if !(u > T::zero() && u < T::one() && v > T::zero() && v < T::one()) {
            return T::zero();
        }
        let theta = self.theta();
        let a = self.a();
        let w = T::one() - u;
        if v > a {
            (T::one() + theta) * w.powf(theta)
        } else if v > a * w {
            theta * (a * w / v).powf(theta) / v
        } else {
            T::zero()
        }
    }

    /// `P(U ≤ u | V = v)`.
    pub fn cond_cdf_u_given_v(&self, u: T, v: T) -> T {
        let (u, v) = (clamp01(u), clamp01(v));
        if u == T::one() {
            return T::one();
        }
        let a = self.a();
        let w = T::one() - u;
        if v > a {
            self.one_minus_w_pow(u)
        } else {
            if v == T::zero() {
                return T::zero();
            }
            let r = a * w / v;
            if r >= T::one() {
                T::zero()
            } else {
                T::one() - r.powf(T::one() + self.theta())
            }
        }
    }

    /// Inverse of [`Self::cond_cdf_u_given_v`] in `u`.
    pub fn cond_quantile_u_given_v(&self, p: T, v: T) -> Result<T, CopulaError> {
        check_probability(p)?;
        let v = clamp01(v);
        let root = (T::one() - p).powf((T::one() + self.theta()).recip());
        let a = self.a();
        let w = if v <= a { v / a * root } else { root };
        Ok(T::one() - w)
    }

    /// `P(V ≤ v | U = u)`.
    pub fn cond_cdf_v_given_u(&self, v: T, u: T) -> T {
        let (u, v) = (clamp01(u), clamp01(v));
        if v == T::one() {
            return T::one();
        }
        let theta = self.theta();
        let a = self.a();
        let w = T::one() - u;
        if v > a {
            T::one() - (T::one() + theta) * (T::one() - v) * w.powf(theta)
        } else if v > a * w {
            T::one() - (a * w / v).powf(theta)
        } else {
            T::zero()
        }
    }

    /// Inverse of [`Self::cond_cdf_v_given_u`] in `v`.
    pub fn cond_quantile_v_given_u(&self, p: T, u: T) -> Result<T, CopulaError> {
        check_probability(p)?;
        let u = clamp01(u);
        let theta = self.theta();
        let w = T::one() - u;
        let w_pow = w.powf(theta);
        let junction = T::one() - w_pow;
        if p < junction {
            Ok(self.a() * w * (T::one() - p).powf(-theta.recip()))
        } else {
            Ok(T::one() - (T::one() - p) / ((T::one() + theta) * w_pow))
        }
    }

    /// `(E[U | V = v], Var[U | V = v])`.
    pub fn cond_mean_var_u_given_v(&self, v: T) -> (T, T) {
        let theta = self.theta();
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        if v <= self.a() {
            let t1 = one + theta;
            let mean = one - t1 * t1 * v / (theta * (theta + two));
            let var = t1 * t1 * t1 * v * v
                / (theta * theta * (theta + two) * (theta + two) * (theta + three));
            (mean, var)
        } else {
            let mean = (theta + two).recip();
            let var = (theta + one) / ((theta + two) * (theta + two) * (theta + three));
            (mean, var)
        }
    }

    /// `E[V | U = u]`, the regression of V on U.
    pub fn cond_mean_v_given_u(&self, u: T) -> T {
        let theta = self.theta();
        if (theta - T::one()).abs() < T::lit(1e-3) {
            return self.cond_moment_v_by_quadrature(u, 1);
        }
        let one = T::one();
        let w = one - clamp01(u);
        w.powf(theta) / (T::lit(2.0) * (one - theta)) - theta * theta * w / (one - theta * theta)
    }

    /// `Var[V | U = u]`.
    pub fn cond_var_v_given_u(&self, u: T) -> T {
        let theta = self.theta();
        let near = |c: f64| (theta - T::lit(c)).abs() < T::lit(1e-3);
        let mean = self.cond_mean_v_given_u(u);
        let second = if near(2.0) {
            self.cond_moment_v_by_quadrature(u, 2)
        } else {
            let one = T::one();
            let w = one - clamp01(u);
            let a = self.a();
            let w_pow = w.powf(theta);
            theta * a * a * (w_pow - w * w) / (T::lit(2.0) - theta)
                + (one + theta) * w_pow * (one - a * a * a) / T::lit(3.0)
        };
        (second - mean * mean).max(T::zero())
    }

    fn cond_moment_v_by_quadrature(&self, u: T, order: i32) -> T {
        let u = clamp01(u);
        let lo = self.support_edge(u);
        integrate_pieces(
            |v| v.powi(order) * self.pdf(u, v),
            lo,
            T::one(),
            &[self.a()],
            T::lit(1e-14),
        )
    }

    pub fn measures(&self) -> DependenceMeasures<T> {
        let theta = self.theta();
        DependenceMeasures {
            rho: rho_of(theta),
            tau: tau_of(theta),
        }
    }
}

#[inline]
fn clamp01<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

fn check_probability<T: Real>(p: T) -> Result<(), CopulaError> {
    if p > T::zero() && p < T::one() {
        Ok(())
    } else {
        Err(CopulaError::ProbabilityOutOfRange(p.to_f64_lossy()))
    }
}

#[inline]
fn rho_of<T: Real>(theta: T) -> T {
    let one = T::one();
    -theta * (T::lit(3.0) + theta) / ((one + theta) * (T::lit(2.0) + theta))
}

#[inline]
fn tau_of<T: Real>(theta: T) -> T {
    -theta / (T::one() + theta)
}

/// Spearman's rho `−θ(3+θ)/((1+θ)(2+θ))`.
pub fn spearman_rho<T: Real>(theta: T) -> Result<T, CopulaError> {
    DependenceParam::new(theta).map(|p| rho_of(p.value()))
}

/// Kendall's tau `−θ/(1+θ)`.
pub fn kendall_tau<T: Real>(theta: T) -> Result<T, CopulaError> {
    DependenceParam::new(theta).map(|p| tau_of(p.value()))
}

/// The θ whose Spearman's rho equals `rho`.
///
/// Positive root of `(1+ρ)θ² + 3(1+ρ)θ + 2ρ = 0`, in the rationalized form
/// that avoids cancellation as ρ → 0.
pub fn theta_from_rho<T: Real>(rho: T) -> Result<DependenceParam<T>, CopulaError> {
    if !(rho > -T::one() && rho < T::zero()) {
        return Err(CopulaError::MeasureOutOfRange {
            measure: "spearman rho",
            value: rho.to_f64_lossy(),
        });
    }
    let s = T::one() + rho;
    let disc = (s * (T::lit(9.0) + rho)).sqrt();
    DependenceParam::new(T::lit(-4.0) * rho / (T::lit(3.0) * s + disc))
}

/// The θ whose Kendall's tau equals `tau`.
pub fn theta_from_tau<T: Real>(tau: T) -> Result<DependenceParam<T>, CopulaError> {
    if !(tau > -T::one() && tau < T::zero()) {
        return Err(CopulaError::MeasureOutOfRange {
            measure: "kendall tau",
            value: tau.to_f64_lossy(),
        });
    }
    DependenceParam::new(-tau / (T::one() + tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cop(theta: f64) -> Copula<f64> {
        Copula::new(theta).unwrap()
    }

    fn pt(u: f64, v: f64) -> UnitPoint<f64> {
        UnitPoint::new(u, v).unwrap()
    }

    #[test]
    fn region_classification() {
        let c = cop(1.0);
        assert_eq!(c.classify(pt(0.4, 0.25)), RegionTag::Void);
        assert_eq!(c.classify(pt(0.6, 0.25)), RegionTag::Lower);
        assert_eq!(c.classify(pt(0.5, 0.75)), RegionTag::Upper);
        assert_eq!(c.classify(pt(0.3, 0.5)), RegionTag::BoundaryLowerUpper);
        assert_eq!(c.classify(pt(0.5, 0.25)), RegionTag::BoundarySupport);
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(cop(3.7).cdf(0.5, 1.0), 0.5);
        assert!((cop(1.0).cdf(0.5, 0.75) - 0.3125).abs() < 1e-15);
        assert!((cop(1.0).cdf(0.6, 0.25) - 0.01).abs() < 1e-15);
        assert_eq!(cop(1.0).cdf(0.4, 0.25), 0.0);
    }

    #[test]
    fn survival_examples() {
        assert!((cop(2.0).survival(1.0, 0.3) - 0.3).abs() < 1e-15);
        assert!((cop(1.0).survival(0.5, 0.25) - 0.0625).abs() < 1e-15);
        assert!((cop(1.0).survival(0.5, 0.75) - 0.25).abs() < 1e-15);
        // Branch formula v·u^{1+θ} on the upper piece of Ĉ.
        let c = cop(2.5);
        let (u, v) = (0.35, 0.2);
        assert!((c.survival(u, v) - v * u.powf(3.5)).abs() < 1e-14);
    }

    #[test]
    fn pdf_examples() {
        assert!((cop(1.0).pdf(0.5, 0.75) - 1.0).abs() < 1e-15);
        assert!((cop(1.0).pdf(0.6, 0.25) - 3.2).abs() < 1e-13);
        assert_eq!(cop(1.0).pdf(0.4, 0.25), 0.0);
    }

    #[test]
    fn conditional_u_given_v_examples() {
        let c = cop(1.0);
        assert!((c.cond_cdf_u_given_v(0.6, 0.25) - 0.36).abs() < 1e-15);
        assert!((c.cond_cdf_u_given_v(0.5, 0.75) - 0.75).abs() < 1e-15);
        assert_eq!(c.cond_cdf_u_given_v(0.5, 0.25), 0.0);
        assert!((c.cond_quantile_u_given_v(0.36, 0.25).unwrap() - 0.6).abs() < 1e-15);
        assert!((c.cond_quantile_u_given_v(0.75, 0.75).unwrap() - 0.5).abs() < 1e-15);
        assert!(c.cond_quantile_u_given_v(1e-300, 0.75).unwrap() < 1e-15);
        assert!(c.cond_quantile_u_given_v(0.0, 0.5).is_err());
        assert!(c.cond_quantile_u_given_v(1.0, 0.5).is_err());
    }

    #[test]
    fn conditional_v_given_u_examples() {
        let c = cop(1.0);
        assert!((c.cond_cdf_v_given_u(0.5, 0.5) - 0.5).abs() < 1e-15);
        assert!((c.cond_cdf_v_given_u(0.75, 0.5) - 0.75).abs() < 1e-15);
        assert_eq!(c.cond_cdf_v_given_u(0.25, 0.5), 0.0);
        assert!((c.cond_quantile_v_given_u(0.2, 0.5).unwrap() - 0.3125).abs() < 1e-15);
        assert!((c.cond_cdf_v_given_u(0.3125, 0.5) - 0.2).abs() < 1e-15);
        assert!((c.cond_quantile_v_given_u(0.75, 0.5).unwrap() - 0.75).abs() < 1e-15);
        assert!((c.cond_quantile_v_given_u(0.5, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(c.cond_quantile_v_given_u(-0.1, 0.5).is_err());
    }

    #[test]
    fn conditional_moment_examples() {
        let c = cop(1.0);
        let (m, var) = c.cond_mean_var_u_given_v(0.25);
        assert!((m - 2.0 / 3.0).abs() < 1e-15);
        assert!((var - 8.0 * 0.0625 / 36.0).abs() < 1e-15);
        let (m, var) = c.cond_mean_var_u_given_v(0.75);
        assert!((m - 1.0 / 3.0).abs() < 1e-15);
        assert!((var - 1.0 / 18.0).abs() < 1e-15);
        // Continuity at v = θ/(1+θ).
        let c = cop(2.3);
        let a = c.param().threshold();
        let below = c.cond_mean_var_u_given_v(a);
        let above = c.cond_mean_var_u_given_v(a + 1e-15);
        assert!((below.0 - above.0).abs() < 1e-13 && (below.1 - above.1).abs() < 1e-13);
    }

    #[test]
    fn regression_of_v_on_u() {
        assert!((cop(2.0).cond_mean_v_given_u(0.5) - 13.0 / 24.0).abs() < 1e-13);
        assert!((cop(1e-6).cond_mean_v_given_u(0.3) - 0.5).abs() < 1e-5);
        assert!(cop(2.0).cond_mean_v_given_u(1.0 - 1e-12).abs() < 1e-10);
        // Quadrature fallback at θ = 1 stays on the same curve.
        let m1 = cop(1.0).cond_mean_v_given_u(0.4);
        let m_near = cop(1.0 + 2e-3).cond_mean_v_given_u(0.4);
        assert!((m1 - m_near).abs() < 1e-3);
    }

    #[test]
    fn measures_examples() {
        assert!((spearman_rho::<f64>(1.0).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        assert!((spearman_rho::<f64>(0.765).unwrap() + 0.590).abs() < 5e-4);
        assert!(spearman_rho::<f64>(1e-8).unwrap().abs() < 1e-7);
        assert!((spearman_rho::<f64>(1e8).unwrap() + 1.0).abs() < 1e-7);
        assert_eq!(kendall_tau::<f64>(1.0).unwrap(), -0.5);
        assert!((kendall_tau::<f64>(0.765).unwrap() + 0.4334).abs() < 1e-4);
        assert!((kendall_tau::<f64>(9.0).unwrap() + 0.9).abs() < 1e-15);
        assert!(spearman_rho::<f64>(0.0).is_err());
        assert!(kendall_tau::<f64>(-1.0).is_err());
    }

    #[test]
    fn inversions() {
        assert!((theta_from_rho::<f64>(-0.59).unwrap().value() - 0.765).abs() < 5e-4);
        assert!((theta_from_rho::<f64>(-2.0 / 3.0).unwrap().value() - 1.0).abs() < 1e-14);
        assert!(theta_from_rho::<f64>(-1e-7).unwrap().value() < 1e-6);
        assert!(theta_from_rho::<f64>(0.1).is_err());
        assert!(theta_from_rho::<f64>(-1.0).is_err());
        assert_eq!(theta_from_tau::<f64>(-0.5).unwrap().value(), 1.0);
        assert!((theta_from_tau::<f64>(-0.9).unwrap().value() - 9.0).abs() < 1e-13);
        assert!(
            (theta_from_tau::<f64>(-0.43).unwrap().value() - 0.754_385_964_912_280_7).abs() < 1e-14
        );
        assert!(theta_from_tau::<f64>(0.0).is_err());
    }

    #[test]
    fn theta_guard() {
        assert!(Copula::new(0.0_f64).is_err());
        assert!(Copula::new(f64::NAN).is_err());
        assert!(Copula::new(1e9_f64).is_err());
        assert!(Copula::new(1e8_f64).is_ok());
    }

    #[test]
    fn extreme_theta_stays_finite() {
        for &theta in &[1e-8, 1e8] {
            let c = cop(theta);
            for &(u, v) in &[(0.3, 0.9), (0.999, 0.4), (0.5, 0.5), (0.01, 0.99)] {
                let value = c.cdf(u, v);
                assert!(value.is_finite() && value >= 0.0 && value <= u.min(v) + 1e-15);
                assert!(c.pdf(u, v).is_finite());
            }
        }
    }

    #[test]
    fn single_precision_copula() {
        let c = Copula::new(1.0_f32).unwrap();
        assert!((c.cdf(0.5, 0.75) - 0.3125).abs() < 1e-6);
        assert!((c.pdf(0.6, 0.25) - 3.2).abs() < 1e-5);
        let u = c.cond_quantile_u_given_v(0.36, 0.25).unwrap();
        assert!((u - 0.6).abs() < 1e-6);
    }
}
