//! A one-parameter bivariate copula for negative dependence.
//!
//! The copula `C_θ` places all of its mass above the line
//! `v = θ(1−u)/(1+θ)` and covers the whole negative range of Spearman's rho
//! and Kendall's tau as θ runs over `(0, ∞)`. This crate provides
//!
//! * closed-form evaluation of the copula, its density, survival copula,
//!   conditional distributions and rank measures ([`copula`]),
//! * seedable conditional-inversion sampling ([`sampler`]),
//! * univariate marginal families with maximum-likelihood fitting
//!   ([`marginals`]) and Sklar composition ([`bivariate`]),
//! * numerical certification of the dependence properties ([`audit`]),
//! * the rank-inversion fitting pipeline with a parametric bootstrap
//!   Kolmogorov–Smirnov check ([`estimation`]).
//!
//! The analytic core is generic over the scalar type through [`Real`];
//! the aliases below fix it to `f64`, which is what the sampling and
//! estimation layers use.

pub mod audit;
pub mod bivariate;
pub mod copula;
pub mod estimation;
pub mod marginals;
pub mod quadrature;
pub mod real;
pub mod sampler;
pub mod special;

pub use copula::{Copula, CopulaError, DependenceMeasures, DependenceParam, RegionTag, UnitPoint};
pub use real::Real;

/// Copula over `f64`.
pub type Copula64 = copula::Copula<f64>;
/// Copula over `f32`.
pub type Copula32 = copula::Copula<f32>;
/// Dependence parameter over `f64`.
pub type Theta = copula::DependenceParam<f64>;
/// Point of the unit square over `f64`.
pub type Point = copula::UnitPoint<f64>;
/// Marginal distribution over `f64`.
pub type Marginal = marginals::MarginalModel<f64>;
/// Bivariate model over `f64`.
pub type Bivariate = bivariate::BivariateModel<f64>;
