//! Rank-based fitting: pseudo-observations, empirical rank measures,
//! θ by rank inversion, marginal selection and a parametric bootstrap
//! Kolmogorov–Smirnov check.
//!
//! θ is not estimated by maximizing the bivariate likelihood. The copula
//! has no mass below the line `v = θ(1−u)/(1+θ)`, so any observation below
//! it sends the likelihood to −∞; inverting a rank correlation avoids that
//! and is what this module implements.

mod data;
mod ks;
mod pipeline;
mod ranks;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::copula::{theta_from_rho, theta_from_tau, CopulaError, DependenceParam, UnitPoint};
use crate::marginals::MarginalError;

pub use data::{DataError, PairedData};
pub use ks::{ks_statistic, ks_test_bootstrap, KsResult, MAX_DROP_FRACTION, MIN_BOOTSTRAP};
pub use pipeline::{fit_pipeline, ConditionalCurve, FitConfig, FitReport};
pub use ranks::{average_ranks, kendall_tau_b, pearson, spearman};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("need at least 3 complete observations, got {0}")]
    TooFewObservations(usize),
    #[error("column {0} has zero rank variance")]
    ConstantColumn(&'static str),
    #[error("empirical {measure} = {value} is not negative; the copula only represents negative dependence")]
    PositiveDependence { measure: &'static str, value: f64 },
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error("{margin} margin: {source}")]
    Marginal {
        margin: &'static str,
        #[source]
        source: MarginalError,
    },
    #[error("bootstrap needs at least {MIN_BOOTSTRAP} replicates, got {0}")]
    BootstrapTooSmall(usize),
    #[error("{dropped} of {total} bootstrap refits failed (more than 1%)")]
    BootstrapDrops { dropped: usize, total: usize },
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Which rank correlation is matched to its theoretical value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMethod {
    #[default]
    RhoInversion,
    TauInversion,
}

/// `(rank(xᵢ)/(n+1), rank(yᵢ)/(n+1))` with average ranks for ties.
pub fn pseudo_observations(data: &PairedData) -> Vec<UnitPoint<f64>> {
    let scale = (data.n() + 1) as f64;
    let rx = average_ranks(data.x());
    let ry = average_ranks(data.y());
    rx.iter()
        .zip(&ry)
        .map(|(&a, &b)| UnitPoint {
            u: a / scale,
            v: b / scale,
        })
        .collect()
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn empirical_rho(data: &PairedData) -> Result<f64, EstimationError> {
    spearman(data.x(), data.y())
}

/// Kendall's tau-b.
pub fn empirical_tau(data: &PairedData) -> Result<f64, EstimationError> {
    kendall_tau_b(data.x(), data.y())
}

pub fn estimate_theta(
    data: &PairedData,
    method: ThetaMethod,
) -> Result<DependenceParam<f64>, EstimationError> {
    let (measure, value) = match method {
        ThetaMethod::RhoInversion => ("spearman rho", empirical_rho(data)?),
        ThetaMethod::TauInversion => ("kendall tau", empirical_tau(data)?),
    };
    theta_from_measure(method, measure, value)
}

pub(crate) fn theta_from_measure(
    method: ThetaMethod,
    measure: &'static str,
    value: f64,
) -> Result<DependenceParam<f64>, EstimationError> {
    if value >= 0.0 {
        return Err(EstimationError::PositiveDependence { measure, value });
    }
    Ok(match method {
        ThetaMethod::RhoInversion => theta_from_rho(value)?,
        ThetaMethod::TauInversion => theta_from_tau(value)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(x: &[f64], y: &[f64]) -> PairedData {
        PairedData::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn pseudo_observation_examples() {
        let d = pd(&[3.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        let u: Vec<f64> = pseudo_observations(&d).iter().map(|p| p.u).collect();
        assert_eq!(u, vec![0.75, 0.25, 0.5]);
        let d = pd(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        let u: Vec<f64> = pseudo_observations(&d).iter().map(|p| p.u).collect();
        assert_eq!(u, vec![0.375, 0.375, 0.75]);
        for p in pseudo_observations(&pd(&[5.0, 5.0, 5.0, 1.0], &[1.0, 2.0, 3.0, 4.0])) {
            assert!(p.u > 0.0 && p.u < 1.0 && p.v > 0.0 && p.v < 1.0);
        }
    }

    #[test]
    fn countermonotone_data() {
        let x: Vec<f64> = (1..=20).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 100.0 / v).collect();
        let d = pd(&x, &y);
        assert!((empirical_rho(&d).unwrap() + 1.0).abs() < 1e-15);
        assert!((empirical_tau(&d).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_column_is_rejected() {
        let d = pd(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]);
        assert_eq!(empirical_rho(&d), Err(EstimationError::ConstantColumn("x")));
        assert_eq!(empirical_tau(&d), Err(EstimationError::ConstantColumn("x")));
    }

    #[test]
    fn inversion_from_measure() {
        let t = theta_from_measure(ThetaMethod::RhoInversion, "spearman rho", -2.0 / 3.0).unwrap();
        assert!((t.value() - 1.0).abs() < 1e-14);
        assert!(matches!(
            theta_from_measure(ThetaMethod::RhoInversion, "spearman rho", 0.2),
            Err(EstimationError::PositiveDependence { .. })
        ));
    }

    #[test]
    fn positive_dependence_is_reported() {
        let d = pd(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]);
        assert!(matches!(
            estimate_theta(&d, ThetaMethod::RhoInversion),
            Err(EstimationError::PositiveDependence { .. })
        ));
    }
}
