use rayon::prelude::*;
use serde::Serialize;

use super::EstimationError;
use crate::marginals::{mle_fit, MarginalModel};
use crate::sampler::{rng_for, sample_marginal};

pub const MIN_BOOTSTRAP: usize = 100;
/// Largest tolerated share of failed bootstrap refits.
pub const MAX_DROP_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Replicates requested.
    #[serde(rename = "B")]
    pub n_bootstrap: usize,
    /// Replicates whose refit failed and were excluded.
    pub dropped: usize,
    pub seed: u64,
}

/// `sup |F_n − F|` for the empirical distribution of `data`.
pub fn ks_statistic(data: &[f64], model: &MarginalModel<f64>) -> f64 {
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite data"));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = model.cdf(x);
            (((i + 1) as f64 / n) - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Parametric bootstrap KS test with re-estimation on every replicate.
///
/// Replicate `b` draws from stream `b` of `seed`, so the result does not
/// depend on the number of worker threads.
pub fn ks_test_bootstrap(
    column: &[f64],
    fitted: &MarginalModel<f64>,
    b: usize,
    seed: u64,
) -> Result<KsResult, EstimationError> {
    if b < MIN_BOOTSTRAP {
        return Err(EstimationError::BootstrapTooSmall(b));
    }
    let statistic = ks_statistic(column, fitted);
    let family = fitted.family();
    let n = column.len();
    let replicate = |index: usize| -> Option<f64> {
        let mut rng = rng_for(seed, index as u64);
        let sample = sample_marginal(fitted, n, &mut rng).ok()?;
        let refit = mle_fit(family, &sample).ok()?;
        Some(ks_statistic(&sample, &refit.model))
    };
    let stats: Vec<Option<f64>> = (0..b).into_par_iter().map(replicate).collect();
    let dropped = stats.iter().filter(|s| s.is_none()).count();
    if dropped as f64 > MAX_DROP_FRACTION * b as f64 {
        return Err(EstimationError::BootstrapDrops { dropped, total: b });
    }
    let kept = b - dropped;
    let exceed = stats.iter().flatten().filter(|&&d| d >= statistic).count();
    Ok(KsResult {
        statistic,
        p_value: exceed as f64 / kept as f64,
        n_bootstrap: b,
        dropped,
        seed,
    })
}
