//! Seedable conditional-inversion sampling.
//!
//! Each pair is produced by drawing `v` and `p` independently from the open
//! unit interval and setting `u = C⁻¹(p | v)`. All randomness comes from
//! ChaCha20 streams: one stream per `(seed, stream index)`, so a batch is a
//! pure function of its inputs and parallel consumers can derive disjoint
//! streams from a replicate index.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bivariate::BivariateModel;
use crate::copula::{Copula, DependenceParam, UnitPoint};
use crate::marginals::{MarginalError, MarginalModel};
use crate::real::Real;

/// Identifier of the generator recorded alongside every reproducible output.
pub const RNG_ALGORITHM: &str = "chacha20/rand_chacha-0.3.1/seed_from_u64+stream";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error(transparent)]
    Marginal(#[from] MarginalError),
}

/// Generator for stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw from the open interval (0, 1).
#[inline]
pub fn open_unit<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(Open01))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch<T> {
    pub pairs: Vec<UnitPoint<T>>,
    pub seed: u64,
    pub theta: DependenceParam<T>,
}

impl<T: Real> Copula<T> {
    /// One draw from the copula.
    ///
    /// Draws whose rounded coordinates land on the edge of the support are
    /// redrawn, so every returned pair lies strictly inside the square and
    /// strictly above the support edge.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> UnitPoint<T> {
        loop {
            let v: T = open_unit(rng);
            let p: T = open_unit(rng);
            let u = self
                .cond_quantile_u_given_v(p, v)
                .expect("open-interval draw is a valid probability");
            if u > T::zero() && u < T::one() && v > self.support_edge(u) {
                return UnitPoint { u, v };
            }
        }
    }

    pub fn draw_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<UnitPoint<T>> {
        (0..n).map(|_| self.draw(rng)).collect()
    }
}

/// `n` pairs from `C_θ` using stream 0 of `seed`.
pub fn sample_copula<T: Real>(
    n: usize,
    theta: DependenceParam<T>,
    seed: u64,
) -> Result<SampleBatch<T>, SampleError> {
    if n == 0 {
        return Err(SampleError::EmptySample);
    }
    let mut rng = rng_for(seed, 0);
    let pairs = Copula::from_param(theta).draw_n(n, &mut rng);
    Ok(SampleBatch { pairs, seed, theta })
}

/// `n` pairs `(F⁻¹(u), G⁻¹(v))` from a composed bivariate model.
pub fn sample_bivariate<T: Real>(
    n: usize,
    model: &BivariateModel<T>,
    seed: u64,
) -> Result<Vec<(T, T)>, SampleError> {
    let batch = sample_copula(n, model.theta, seed)?;
    batch
        .pairs
        .iter()
        .map(|p| Ok((model.margin_x.quantile(p.u)?, model.margin_y.quantile(p.v)?)))
        .collect()
}

/// `n` independent draws from a marginal by inversion.
pub fn sample_marginal<T: Real, R: Rng + ?Sized>(
    model: &MarginalModel<T>,
    n: usize,
    rng: &mut R,
) -> Result<Vec<T>, MarginalError> {
    (0..n).map(|_| model.quantile(open_unit(rng))).collect()
}
