//! Univariate marginal families, their maximum-likelihood fits and AIC
//! model selection.
//!
//! Parameterizations:
//!
//! | family       | parameters        | cdf                                   |
//! |--------------|-------------------|---------------------------------------|
//! | Exponential  | rate λ            | `1 − e^{−λx}`                         |
//! | Weibull      | rate λ, shape δ   | `1 − e^{−(λx)^δ}`                     |
//! | Gamma        | shape α, scale s  | `P(α, x/s)`                           |
//! | Lognormal    | log-mean, log-sd  | `Φ((ln x − m)/σ)`                     |
//! | BaselineY    | λ, μ              | `μ y^λ/(λ+μ)` on `(0,1]`, `1 − λ/((λ+μ)y^μ)` above |

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::Real;
use crate::special::{self, digamma, ln_gamma, normal_cdf, normal_quantile, trigamma};

const MAX_NEWTON: usize = 100;
const NEWTON_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarginalError {
    #[error("invalid {family} parameter {name} = {value}")]
    InvalidParameter {
        family: Family,
        name: &'static str,
        value: f64,
    },
    #[error("{0} is outside the support")]
    Domain(f64),
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("observation {index} = {value} is not strictly positive and finite")]
    NonPositiveData { index: usize, value: f64 },
    #[error("data are constant; {0} likelihood has no interior maximum")]
    DegenerateData(Family),
    #[error("{family} fit did not converge: last iterate {last_iterate}, gradient norm {gradient_norm:e}")]
    FailedConvergence {
        family: Family,
        last_iterate: f64,
        gradient_norm: f64,
    },
    #[error("maximum-likelihood fitting is not provided for {0}")]
    Unsupported(Family),
    #[error("AIC selection needs at least two candidate families")]
    TooFewFamilies,
    #[error("special function failure: {0}")]
    Special(#[from] special::SpecialError),
    #[error("unrecognized marginal specification `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Exponential,
    Weibull,
    Gamma,
    Lognormal,
    #[serde(rename = "baseline_y")]
    BaselineY,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Weibull => "weibull",
            Family::Gamma => "gamma",
            Family::Lognormal => "lognormal",
            Family::BaselineY => "baseline_y",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Exponential => &["rate"],
            Family::Weibull => &["rate", "shape"],
            Family::Gamma => &["shape", "scale"],
            Family::Lognormal => &["meanlog", "sdlog"],
            Family::BaselineY => &["lambda", "mu"],
        }
    }

    pub fn param_count(self) -> usize {
        self.param_names().len()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = MarginalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exponential" | "exp" => Ok(Family::Exponential),
            "weibull" => Ok(Family::Weibull),
            "gamma" => Ok(Family::Gamma),
            "lognormal" | "lnorm" => Ok(Family::Lognormal),
            "baseline_y" | "baseliney" => Ok(Family::BaselineY),
            other => Err(MarginalError::Parse(other.to_string())),
        }
    }
}

/// A fully parameterized marginal distribution on the positive half-line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum MarginalModel<T> {
    Exponential {
        rate: T,
    },
    Weibull {
        rate: T,
        shape: T,
    },
    Gamma {
        shape: T,
        scale: T,
    },
    Lognormal {
        meanlog: T,
        sdlog: T,
    },
    #[serde(rename = "baseline_y")]
    BaselineY {
        lambda: T,
        mu: T,
    },
}

fn positive<T: Real>(family: Family, name: &'static str, value: T) -> Result<T, MarginalError> {
    if value > T::zero() && value.is_finite() {
        Ok(value)
    } else {
        Err(MarginalError::InvalidParameter {
            family,
            name,
            value: value.to_f64_lossy(),
        })
    }
}

impl<T: Real> MarginalModel<T> {
    pub fn exponential(rate: T) -> Result<Self, MarginalError> {
        Ok(Self::Exponential {
            rate: positive(Family::Exponential, "rate", rate)?,
        })
    }

    pub fn weibull(rate: T, shape: T) -> Result<Self, MarginalError> {
        Ok(Self::Weibull {
            rate: positive(Family::Weibull, "rate", rate)?,
            shape: positive(Family::Weibull, "shape", shape)?,
        })
    }

    pub fn gamma(shape: T, scale: T) -> Result<Self, MarginalError> {
        Ok(Self::Gamma {
            shape: positive(Family::Gamma, "shape", shape)?,
            scale: positive(Family::Gamma, "scale", scale)?,
        })
    }

    pub fn lognormal(meanlog: T, sdlog: T) -> Result<Self, MarginalError> {
        if !meanlog.is_finite() {
            return Err(MarginalError::InvalidParameter {
                family: Family::Lognormal,
                name: "meanlog",
                value: meanlog.to_f64_lossy(),
            });
        }
        Ok(Self::Lognormal {
            meanlog,
            sdlog: positive(Family::Lognormal, "sdlog", sdlog)?,
        })
    }

    pub fn baseline_y(lambda: T, mu: T) -> Result<Self, MarginalError> {
        Ok(Self::BaselineY {
            lambda: positive(Family::BaselineY, "lambda", lambda)?,
            mu: positive(Family::BaselineY, "mu", mu)?,
        })
    }

    /// Builds a model from a family and its parameters in
    /// [`Family::param_names`] order.
    pub fn from_params(family: Family, params: &[T]) -> Result<Self, MarginalError> {
        if params.len() != family.param_count() {
            return Err(MarginalError::Parse(format!(
                "{family} takes {} parameters, got {}",
                family.param_count(),
                params.len()
            )));
        }
        match family {
            Family::Exponential => Self::exponential(params[0]),
            Family::Weibull => Self::weibull(params[0], params[1]),
            Family::Gamma => Self::gamma(params[0], params[1]),
            Family::Lognormal => Self::lognormal(params[0], params[1]),
            Family::BaselineY => Self::baseline_y(params[0], params[1]),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Exponential { .. } => Family::Exponential,
            Self::Weibull { .. } => Family::Weibull,
            Self::Gamma { .. } => Family::Gamma,
            Self::Lognormal { .. } => Family::Lognormal,
            Self::BaselineY { .. } => Family::BaselineY,
        }
    }

    pub fn params(&self) -> Vec<T> {
        match *self {
            Self::Exponential { rate } => vec![rate],
            Self::Weibull { rate, shape } => vec![rate, shape],
            Self::Gamma { shape, scale } => vec![shape, scale],
            Self::Lognormal { meanlog, sdlog } => vec![meanlog, sdlog],
            Self::BaselineY { lambda, mu } => vec![lambda, mu],
        }
    }

    /// Distribution function; 0 at and below the origin.
    pub fn cdf(&self, x: T) -> T {
        if x.is_nan() {
            return T::nan();
        }
        if x <= T::zero() {
            return T::zero();
        }
        if x.is_infinite() {
            return T::one();
        }
        match *self {
            Self::Exponential { rate } => -(-rate * x).exp_m1(),
            Self::Weibull { rate, shape } => -(-(rate * x).powf(shape)).exp_m1(),
            Self::Gamma { shape, scale } => special::gamma_p(shape, x / scale).unwrap_or(T::nan()),
            Self::Lognormal { meanlog, sdlog } => normal_cdf((x.ln() - meanlog) / sdlog),
            Self::BaselineY { lambda, mu } => {
                let total = lambda + mu;
                if x <= T::one() {
                    mu / total * x.powf(lambda)
                } else {
                    T::one() - lambda / (total * x.powf(mu))
                }
            }
        }
    }

    /// Density; 0 outside the support.
    pub fn pdf(&self, x: T) -> T {
        self.ln_pdf(x).map(T::exp).unwrap_or(T::zero())
    }

    pub fn ln_pdf(&self, x: T) -> Result<T, MarginalError> {
        if !(x > T::zero() && x.is_finite()) {
            return Err(MarginalError::Domain(x.to_f64_lossy()));
        }
        let lx = x.ln();
        Ok(match *self {
            Self::Exponential { rate } => rate.ln() - rate * x,
            Self::Weibull { rate, shape } => {
                shape.ln() + shape * rate.ln() + (shape - T::one()) * lx - (rate * x).powf(shape)
            }
            Self::Gamma { shape, scale } => {
                -ln_gamma(shape) - shape * scale.ln() + (shape - T::one()) * lx - x / scale
            }
            Self::Lognormal { meanlog, sdlog } => {
                let z = (lx - meanlog) / sdlog;
                -lx - sdlog.ln() - T::lit(0.5) * (T::lit(2.0) * T::PI()).ln() - T::lit(0.5) * z * z
            }
            Self::BaselineY { lambda, mu } => {
                let head = (lambda * mu / (lambda + mu)).ln();
                if x <= T::one() {
                    head + (lambda - T::one()) * lx
                } else {
                    head - (mu + T::one()) * lx
                }
            }
        })
    }

    /// Quantile function; `quantile(0) = 0`, `quantile(1) = ∞`.
    pub fn quantile(&self, p: T) -> Result<T, MarginalError> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(MarginalError::Probability(p.to_f64_lossy()));
        }
        if p == T::zero() {
            return Ok(T::zero());
        }
        if p == T::one() {
            return Ok(T::infinity());
        }
        Ok(match *self {
            Self::Exponential { rate } => -(-p).ln_1p() / rate,
            Self::Weibull { rate, shape } => (-(-p).ln_1p()).powf(shape.recip()) / rate,
            Self::Gamma { shape, scale } => scale * special::gamma_p_inv(shape, p)?,
            Self::Lognormal { meanlog, sdlog } => (meanlog + sdlog * normal_quantile(p)?).exp(),
            Self::BaselineY { lambda, mu } => {
                let total = lambda + mu;
                if p <= mu / total {
                    (p * total / mu).powf(lambda.recip())
                } else {
                    (lambda / (total * (T::one() - p))).powf(mu.recip())
                }
            }
        })
    }

    pub fn mean(&self) -> T {
        match *self {
            Self::Exponential { rate } => rate.recip(),
            Self::Weibull { rate, shape } => (ln_gamma(T::one() + shape.recip())).exp() / rate,
            Self::Gamma { shape, scale } => shape * scale,
            Self::Lognormal { meanlog, sdlog } => (meanlog + T::lit(0.5) * sdlog * sdlog).exp(),
            Self::BaselineY { lambda, mu } => {
                if mu <= T::one() {
                    T::infinity()
                } else {
                    let total = lambda + mu;
                    mu / total * lambda / (lambda + T::one())
                        + lambda / total * mu / (mu - T::one())
                }
            }
        }
    }

    pub fn log_likelihood(&self, data: &[T]) -> Result<T, MarginalError> {
        data.iter()
            .try_fold(T::zero(), |acc, &x| self.ln_pdf(x).map(|l| acc + l))
    }
}

impl<T: Real> fmt::Display for MarginalModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family())?;
        let params = self.params();
        for (i, p) in params.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Parses `family:p1,p2` with parameters in [`Family::param_names`] order,
/// e.g. `gamma:7.171,1.375`.
impl FromStr for MarginalModel<f64> {
    type Err = MarginalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (family, rest) = s
            .split_once(':')
            .ok_or_else(|| MarginalError::Parse(s.to_string()))?;
        let family: Family = family.parse()?;
        let params = rest
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| MarginalError::Parse(s.to_string()))?;
        Self::from_params(family, &params)
    }
}

/// A maximum-likelihood fit of one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult<T> {
    pub model: MarginalModel<T>,
    pub log_likelihood: T,
    /// `2k − 2·log_likelihood`.
    pub aic: T,
    pub n: usize,
    pub iterations: usize,
}

impl<T: Real> FitResult<T> {
    fn new(model: MarginalModel<T>, data: &[T], iterations: usize) -> Result<Self, MarginalError> {
        let log_likelihood = model.log_likelihood(data)?;
        let k = T::lit(model.family().param_count() as f64);
        Ok(Self {
            model,
            log_likelihood,
            aic: T::lit(2.0) * k - T::lit(2.0) * log_likelihood,
            n: data.len(),
            iterations,
        })
    }
}

struct Summary<T> {
    n: T,
    mean: T,
    variance: T,
    mean_log: T,
}

fn summarize<T: Real>(data: &[T]) -> Result<Summary<T>, MarginalError> {
    if data.len() < 2 {
        return Err(MarginalError::InsufficientData {
            needed: 2,
            got: data.len(),
        });
    }
    if let Some((index, &value)) = data
        .iter()
        .enumerate()
        .find(|(_, &x)| !(x > T::zero() && x.is_finite()))
    {
        return Err(MarginalError::NonPositiveData {
            index,
            value: value.to_f64_lossy(),
        });
    }
    let n = T::lit(data.len() as f64);
    let mean = data.iter().fold(T::zero(), |a, &x| a + x) / n;
    let variance = data
        .iter()
        .fold(T::zero(), |a, &x| a + (x - mean) * (x - mean))
        / n;
    let mean_log = data.iter().fold(T::zero(), |a, &x| a + x.ln()) / n;
    Ok(Summary {
        n,
        mean,
        variance,
        mean_log,
    })
}

/// Method-of-moments starting point used by the iterative fits.
pub fn moment_initializer<T: Real>(
    family: Family,
    data: &[T],
) -> Result<MarginalModel<T>, MarginalError> {
    let s = summarize(data)?;
    if !(s.variance > T::zero()) {
        return Err(MarginalError::DegenerateData(family));
    }
    match family {
        Family::Exponential => MarginalModel::exponential(s.mean.recip()),
        Family::Gamma => {
            let shape = s.mean * s.mean / s.variance;
            MarginalModel::gamma(shape, s.mean / shape)
        }
        Family::Weibull => {
            // Justus' approximation for the shape from the coefficient of variation.
            let cv = s.variance.sqrt() / s.mean;
            let shape = cv.powf(T::lit(-1.086));
            let rate = ln_gamma(T::one() + shape.recip()).exp() / s.mean;
            MarginalModel::weibull(rate, shape)
        }
        Family::Lognormal => {
            let sigma2 = (T::one() + s.variance / (s.mean * s.mean)).ln();
            MarginalModel::lognormal(s.mean.ln() - T::lit(0.5) * sigma2, sigma2.sqrt())
        }
        Family::BaselineY => Err(MarginalError::Unsupported(family)),
    }
}

/// Maximum-likelihood fit of `family` to strictly positive data.
pub fn mle_fit<T: Real>(family: Family, data: &[T]) -> Result<FitResult<T>, MarginalError> {
    let s = summarize(data)?;
    match family {
        Family::Exponential => FitResult::new(MarginalModel::exponential(s.mean.recip())?, data, 0),
        Family::Lognormal => {
            let var = data.iter().fold(T::zero(), |a, &x| {
                let d = x.ln() - s.mean_log;
                a + d * d
            }) / s.n;
            if !(var > T::zero()) {
                return Err(MarginalError::DegenerateData(family));
            }
            FitResult::new(MarginalModel::lognormal(s.mean_log, var.sqrt())?, data, 0)
        }
        Family::Gamma => fit_gamma(data, &s),
        Family::Weibull => fit_weibull(data, &s),
        Family::BaselineY => Err(MarginalError::Unsupported(family)),
    }
}

/// Score of the Gamma log-likelihood `(∂ℓ/∂shape, ∂ℓ/∂scale)`.
pub fn gamma_score<T: Real>(shape: T, scale: T, data: &[T]) -> Result<(T, T), MarginalError> {
    let n = T::lit(data.len() as f64);
    let sum = data.iter().fold(T::zero(), |a, &x| a + x);
    let sum_log = data.iter().fold(T::zero(), |a, &x| a + x.ln());
    let d_shape = sum_log - n * scale.ln() - n * digamma(shape)?;
    let d_scale = -n * shape / scale + sum / (scale * scale);
    Ok((d_shape, d_scale))
}

// Profile equation ln α − ψ(α) = ln(mean) − mean(ln x), solved by Newton
// in ln α inside a bisection bracket. The left side decreases in α.
fn fit_gamma<T: Real>(data: &[T], s: &Summary<T>) -> Result<FitResult<T>, MarginalError> {
    let target = s.mean.ln() - s.mean_log;
    if !(target > T::zero()) || !(s.variance > T::zero()) {
        return Err(MarginalError::DegenerateData(Family::Gamma));
    }
    let profile =
        |alpha: T| -> Result<T, MarginalError> { Ok(alpha.ln() - digamma(alpha)? - target) };
    let mut alpha = s.mean * s.mean / s.variance;
    let (mut lo, mut hi) = (T::zero(), T::infinity());
    let tol = T::lit(NEWTON_TOL);
    for iter in 1..=MAX_NEWTON {
        let g = profile(alpha)?;
        if g > T::zero() {
            lo = lo.max(alpha);
        } else {
            hi = hi.min(alpha);
        }
        let slope = T::one() - alpha * trigamma(alpha)?;
        let mut next = alpha * (-g / slope).exp();
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() && lo > T::zero() {
                (lo * hi).sqrt()
            } else if hi.is_finite() {
                hi * T::lit(0.5)
            } else {
                lo * T::lit(2.0)
            };
        }
        let step = (next - alpha).abs();
        alpha = next;
        if step <= tol * alpha.max(T::one()) {
            let model = MarginalModel::gamma(alpha, s.mean / alpha)?;
            return FitResult::new(model, data, iter);
        }
    }
    let (ds, dc) = gamma_score(alpha, s.mean / alpha, data)?;
    Err(MarginalError::FailedConvergence {
        family: Family::Gamma,
        last_iterate: alpha.to_f64_lossy(),
        gradient_norm: (ds * ds + dc * dc).sqrt().to_f64_lossy(),
    })
}

// Profile equation in the shape δ on log-data centred at their mean:
//   h(δ) = Σ y e^{δy} / Σ e^{δy} − 1/δ = 0,  y = ln x − mean(ln x),
// which is increasing in δ.
fn fit_weibull<T: Real>(data: &[T], s: &Summary<T>) -> Result<FitResult<T>, MarginalError> {
    if !(s.variance > T::zero()) {
        return Err(MarginalError::DegenerateData(Family::Weibull));
    }
    let centred: Vec<T> = data.iter().map(|&x| x.ln() - s.mean_log).collect();
    let y_max = centred.iter().fold(T::neg_infinity(), |m, &y| m.max(y));
    // (ln Σ e^{δy}, weighted mean of y, weighted variance of y)
    let moments = |delta: T| {
        let mut sw = T::zero();
        let mut swy = T::zero();
        let mut swyy = T::zero();
        for &y in &centred {
            let w = (delta * (y - y_max)).exp();
            sw = sw + w;
            swy = swy + w * y;
            swyy = swyy + w * y * y;
        }
        let m1 = swy / sw;
        (delta * y_max + sw.ln(), m1, swyy / sw - m1 * m1)
    };
    let initial = moment_initializer(Family::Weibull, data)?;
    let mut delta = match initial {
        MarginalModel::Weibull { shape, .. } => shape,
        _ => unreachable!("weibull initializer"),
    };
    let (mut lo, mut hi) = (T::zero(), T::infinity());
    let tol = T::lit(NEWTON_TOL);
    let mut last_gradient = T::nan();
    for iter in 1..=MAX_NEWTON {
        let (_, m1, var) = moments(delta);
        let h = m1 - delta.recip();
        last_gradient = h;
        if h < T::zero() {
            lo = lo.max(delta);
        } else {
            hi = hi.min(delta);
        }
        let slope = var + (delta * delta).recip();
        let mut next = delta - h / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if hi.is_finite() {
                T::lit(0.5) * (lo + hi)
            } else {
                delta * T::lit(2.0)
            };
        }
        let step = (next - delta).abs();
        delta = next;
        if step <= tol * delta.max(T::one()) {
            let (log_sum, _, _) = moments(delta);
            let n = s.n;
            // λ = (n / Σ x^δ)^{1/δ}
            let log_rate = -(log_sum - n.ln()) / delta - s.mean_log;
            let model = MarginalModel::weibull(log_rate.exp(), delta)?;
            return FitResult::new(model, data, iter);
        }
    }
    Err(MarginalError::FailedConvergence {
        family: Family::Weibull,
        last_iterate: delta.to_f64_lossy(),
        gradient_norm: last_gradient.abs().to_f64_lossy(),
    })
}

/// One row of an AIC comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AicRow<T> {
    pub family: Family,
    pub aic: Option<T>,
    pub log_likelihood: Option<T>,
    pub params: Option<Vec<T>>,
    /// Set when the family was excluded because its fit failed.
    pub warning: Option<String>,
}

/// Minimum-AIC fit together with the full comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AicSelection<T> {
    pub best: FitResult<T>,
    pub table: Vec<AicRow<T>>,
}

pub fn select_by_aic<T: Real>(
    data: &[T],
    families: &[Family],
) -> Result<AicSelection<T>, MarginalError> {
    if families.len() < 2 {
        return Err(MarginalError::TooFewFamilies);
    }
    let mut best: Option<FitResult<T>> = None;
    let mut first_error = None;
    let mut table = Vec::with_capacity(families.len());
    for &family in families {
        match mle_fit(family, data) {
            Ok(fit) => {
                table.push(AicRow {
                    family,
                    aic: Some(fit.aic),
                    log_likelihood: Some(fit.log_likelihood),
                    params: Some(fit.model.params()),
                    warning: None,
                });
                if best.as_ref().is_none_or(|b| fit.aic < b.aic) {
                    best = Some(fit);
                }
            }
            Err(err) => {
                table.push(AicRow {
                    family,
                    aic: None,
                    log_likelihood: None,
                    params: None,
                    warning: Some(err.to_string()),
                });
                first_error.get_or_insert(err);
            }
        }
    }
    match best {
        Some(best) => Ok(AicSelection { best, table }),
        None => Err(first_error.expect("at least one family attempted")),
    }
}
