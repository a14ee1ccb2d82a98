use serde::Serialize;

use super::{
    empirical_rho, empirical_tau, ks_test_bootstrap, theta_from_measure, EstimationError, KsResult,
    PairedData, ThetaMethod,
};
use crate::bivariate::BivariateModel;
use crate::copula::DependenceParam;
use crate::marginals::{select_by_aic, AicSelection, Family};
use crate::sampler::RNG_ALGORITHM;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitConfig {
    pub families: Vec<Family>,
    pub method: ThetaMethod,
    pub bootstrap: usize,
    pub seed: u64,
    /// Conditioning `x` values for curves of `P(Y ≤ y | X = x)`.
    pub conditional_at: Vec<f64>,
    pub curve_points: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            families: vec![
                Family::Exponential,
                Family::Weibull,
                Family::Gamma,
                Family::Lognormal,
            ],
            method: ThetaMethod::RhoInversion,
            bootstrap: 10_000,
            seed: 42,
            conditional_at: Vec::new(),
            curve_points: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalCurve {
    pub conditioning_x: f64,
    pub y: Vec<f64>,
    pub cdf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub n: usize,
    pub dropped_rows: usize,
    pub marginal_x: AicSelection<f64>,
    pub marginal_y: AicSelection<f64>,
    pub rho_emp: f64,
    pub tau_emp: f64,
    pub method: ThetaMethod,
    pub theta_hat: DependenceParam<f64>,
    pub ks_x: KsResult,
    pub ks_y: KsResult,
    pub conditional_curves: Vec<ConditionalCurve>,
    pub rng_algorithm: &'static str,
}

impl FitReport {
    pub fn model(&self) -> BivariateModel<f64> {
        BivariateModel::new(
            self.marginal_x.best.model,
            self.marginal_y.best.model,
            self.theta_hat,
        )
    }
}

/// Margins by AIC, θ by rank inversion, KS bootstrap per margin.
pub fn fit_pipeline(data: &PairedData, config: &FitConfig) -> Result<FitReport, EstimationError> {
    let marginal_x =
        select_by_aic(data.x(), &config.families).map_err(|source| EstimationError::Marginal {
            margin: "x",
            source,
        })?;
    let marginal_y =
        select_by_aic(data.y(), &config.families).map_err(|source| EstimationError::Marginal {
            margin: "y",
            source,
        })?;
    let rho_emp = empirical_rho(data)?;
    let tau_emp = empirical_tau(data)?;
    let theta_hat = match config.method {
        ThetaMethod::RhoInversion => theta_from_measure(config.method, "spearman rho", rho_emp)?,
        ThetaMethod::TauInversion => theta_from_measure(config.method, "kendall tau", tau_emp)?,
    };
    // Distinct seeds per margin keep the two bootstraps independent.
    let ks_x = ks_test_bootstrap(
        data.x(),
        &marginal_x.best.model,
        config.bootstrap,
        config.seed,
    )?;
    let ks_y = ks_test_bootstrap(
        data.y(),
        &marginal_y.best.model,
        config.bootstrap,
        config.seed.wrapping_add(1),
    )?;
    let model = BivariateModel::new(marginal_x.best.model, marginal_y.best.model, theta_hat);
    let conditional_curves =
        conditional_curves(&model, &config.conditional_at, config.curve_points, data)?;
    Ok(FitReport {
        n: data.n(),
        dropped_rows: data.dropped(),
        marginal_x,
        marginal_y,
        rho_emp,
        tau_emp,
        method: config.method,
        theta_hat,
        ks_x,
        ks_y,
        conditional_curves,
        rng_algorithm: RNG_ALGORITHM,
    })
}

/// Curves on an evenly spaced `y` grid from 0 to the larger of the
/// observed maximum and the fitted 0.999 quantile.
pub(crate) fn conditional_curves(
    model: &BivariateModel<f64>,
    at: &[f64],
    points: usize,
    data: &PairedData,
) -> Result<Vec<ConditionalCurve>, EstimationError> {
    if at.is_empty() {
        return Ok(Vec::new());
    }
    let upper = model
        .margin_y
        .quantile(0.999)
        .map_err(|source| EstimationError::Marginal {
            margin: "y",
            source,
        })?
        .max(data.y().iter().copied().fold(0.0, f64::max));
    let points = points.max(2);
    let y: Vec<f64> = (0..points)
        .map(|i| upper * i as f64 / (points - 1) as f64)
        .collect();
    Ok(at
        .iter()
        .map(|&x| ConditionalCurve {
            conditioning_x: x,
            cdf: y
                .iter()
                .map(|&yy| model.cond_cdf_y_given_x(yy, x))
                .collect(),
            y: y.clone(),
        })
        .collect())
}
