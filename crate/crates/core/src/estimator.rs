//! Monte Carlo estimator of the Gaussian-smoothed sliced divergence.
//!
//! Projection `l` draws its direction from stream `("proj", l)` and its
//! smoothing noise from `("noisex", l)` / `("noisey", l)`, always attached to
//! the first / second argument. Projections are evaluated with rayon on the
//! current thread pool; values are collected by index and reduced with a
//! fixed pairwise tree, so the result does not depend on the pool size.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::{smoothed_wasserstein_oracle, DivergenceKind, DivergenceSpec, Evaluation, MIN_ORACLE_GRID};
use crate::error::{Error, Result};
use crate::real::{mean, sample_std, Real};
use crate::rng::RngRoot;
use crate::sampling::{check_sigma, project_into, sample_direction, smooth_in_place, Direction, SampleSet};

pub const PROJ_LABEL: &str = "proj";
pub const NOISE_X_LABEL: &str = "noisex";
pub const NOISE_Y_LABEL: &str = "noisey";

/// How each slice divergence is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMode {
    /// Add one Gaussian draw per projected sample, then compare samples.
    DoubleEmpirical,
    /// Compare the Gaussian mixtures centred at the projected samples
    /// exactly (Wasserstein only, `sigma > 0`).
    MixtureOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GssdConfig<T> {
    pub sigma: T,
    pub num_projections: usize,
    pub divergence: DivergenceSpec<T>,
    pub seed: RngRoot,
    pub mode: EstimatorMode,
    /// Quantile levels used by [`EstimatorMode::MixtureOracle`].
    pub oracle_grid: usize,
}

impl<T: Real> GssdConfig<T> {
    pub fn new(divergence: DivergenceSpec<T>, sigma: T, num_projections: usize, seed: u64) -> Self {
        Self {
            sigma,
            num_projections,
            divergence,
            seed: RngRoot::new(seed),
            mode: EstimatorMode::DoubleEmpirical,
            oracle_grid: MIN_ORACLE_GRID,
        }
    }

    pub fn with_mode(mut self, mode: EstimatorMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_sigma(mut self, sigma: T) -> Self {
        self.sigma = sigma;
        self
    }

    /// Order `p` of the base divergence.
    pub fn order(&self) -> T {
        self.divergence.p
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_projections == 0 {
            return Err(Error::invalid("num_projections", "need at least one projection"));
        }
        check_sigma(self.sigma)?;
        self.divergence.validate()?;
        if self.mode == EstimatorMode::MixtureOracle {
            if self.divergence.kind != DivergenceKind::Wasserstein {
                return Err(Error::invalid("mode", "mixture oracle supports the Wasserstein base only"));
            }
            if !(self.sigma > T::zero()) {
                return Err(Error::invalid("mode", "mixture oracle needs sigma > 0"));
            }
            if self.oracle_grid < MIN_ORACLE_GRID {
                return Err(Error::invalid("oracle_grid", format!("must be >= {MIN_ORACLE_GRID}")));
            }
        }
        Ok(())
    }
}

/// Result of one Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GssdEstimate<T> {
    /// Estimate of the smoothed sliced divergence to the power `p`.
    pub mean_pow: T,
    /// `max(mean_pow, 0)^(1/p)`.
    pub root: T,
    /// `D^p` on each slice, in projection order.
    pub per_projection: Vec<T>,
    pub sample_std: T,
    /// `sample_std / sqrt(L)`.
    pub std_error: T,
    /// False if any Sinkhorn solve hit its iteration cap.
    pub converged: bool,
    pub config: GssdConfig<T>,
}

impl<T: Real> GssdEstimate<T> {
    pub fn from_per_projection(per_projection: Vec<T>, converged: bool, config: GssdConfig<T>) -> Self {
        let mean_pow = mean(&per_projection);
        let sample_std = sample_std(&per_projection);
        let std_error = sample_std / T::of_usize(per_projection.len()).sqrt();
        let root = mean_pow.max(T::zero()).powf(T::one() / config.order());
        Self {
            mean_pow,
            root,
            per_projection,
            sample_std,
            std_error,
            converged,
            config,
        }
    }

    /// The estimate that `L` projections of the same seed would have given.
    /// Bit-identical to calling [`estimate`] with `num_projections = l`.
    pub fn truncated(&self, l: usize) -> Result<Self> {
        if l == 0 || l > self.per_projection.len() {
            return Err(Error::invalid(
                "num_projections",
                format!("prefix length {l} outside 1..={}", self.per_projection.len()),
            ));
        }
        let mut config = self.config;
        config.num_projections = l;
        Ok(Self::from_per_projection(self.per_projection[..l].to_vec(), self.converged, config))
    }
}

fn check_dims<T: Real>(x: &SampleSet<T>, y: &SampleSet<T>) -> Result<()> {
    if x.d() != y.d() {
        return Err(Error::DimensionMismatch {
            expected: x.d(),
            got: y.d(),
        });
    }
    Ok(())
}

/// Per-projection work shared by [`estimate`] and [`sweep_sigma`].
fn slice_values<T: Real>(
    x: &SampleSet<T>,
    y: &SampleSet<T>,
    sigmas: &[T],
    cfg: &GssdConfig<T>,
    l: usize,
) -> Result<Vec<Evaluation<T>>> {
    let index = l as u64;
    let u: Direction<T> = sample_direction(x.d(), &mut cfg.seed.stream(PROJ_LABEL, index))?;
    let mut px = Vec::with_capacity(x.n());
    let mut py = Vec::with_capacity(y.n());
    project_into(x, &u, &mut px)?;
    project_into(y, &u, &mut py)?;

    let mut out = Vec::with_capacity(sigmas.len());
    let mut tx = Vec::with_capacity(x.n());
    let mut ty = Vec::with_capacity(y.n());
    for &sigma in sigmas {
        let eval = match cfg.mode {
            EstimatorMode::DoubleEmpirical => {
                tx.clear();
                tx.extend_from_slice(&px);
                ty.clear();
                ty.extend_from_slice(&py);
                smooth_in_place(&mut tx, sigma, &mut cfg.seed.stream(NOISE_X_LABEL, index))?;
                smooth_in_place(&mut ty, sigma, &mut cfg.seed.stream(NOISE_Y_LABEL, index))?;
                cfg.divergence.evaluate(&tx, &ty)?
            }
            EstimatorMode::MixtureOracle => Evaluation {
                value: smoothed_wasserstein_oracle(&px, &py, sigma, cfg.divergence.p, cfg.oracle_grid)?,
                converged: true,
            },
        };
        out.push(eval);
    }
    Ok(out)
}

/// Monte Carlo estimate over `cfg.num_projections` random slices.
pub fn estimate<T: Real>(x: &SampleSet<T>, y: &SampleSet<T>, cfg: &GssdConfig<T>) -> Result<GssdEstimate<T>> {
    let mut all = sweep_sigma(x, y, &[cfg.sigma], cfg)?;
    Ok(all.pop().expect("one sigma yields one estimate"))
}

/// One estimate per noise level, all sharing direction and noise streams.
///
/// Noise draws are standard normals scaled by `sigma`, so every level sees
/// the same underlying random numbers (`cfg.sigma` is ignored).
pub fn sweep_sigma<T: Real>(
    x: &SampleSet<T>,
    y: &SampleSet<T>,
    sigmas: &[T],
    cfg: &GssdConfig<T>,
) -> Result<Vec<GssdEstimate<T>>> {
    if sigmas.is_empty() {
        return Err(Error::invalid("sigmas", "need at least one noise level"));
    }
    check_dims(x, y)?;
    for &s in sigmas {
        cfg.with_sigma(s).validate()?;
    }

    let per_l: Vec<Vec<Evaluation<T>>> = (0..cfg.num_projections)
        .into_par_iter()
        .map(|l| slice_values(x, y, sigmas, cfg, l))
        .collect::<Result<_>>()?;

    Ok(sigmas
        .iter()
        .enumerate()
        .map(|(k, &sigma)| {
            let values: Vec<T> = per_l.iter().map(|evals| evals[k].value).collect();
            let converged = per_l.iter().all(|evals| evals[k].converged);
            GssdEstimate::from_per_projection(values, converged, cfg.with_sigma(sigma))
        })
        .collect())
}

/// Both sides of `GSSW_{s1}^p <= 2^{p-1} GSSW_{s2}^p + 2^{5p/2} (s2^2 - s1^2)^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSigmaReport<T> {
    pub lhs: T,
    pub rhs: T,
    /// The additive term `2^{5p/2} (s2^2 - s1^2)^p`.
    pub gap: T,
    /// `3 * (se_1 + 2^{p-1} se_2)`.
    pub slack: T,
    pub holds: bool,
}

/// Additive term of the two-noise-level inequality.
pub fn two_sigma_gap<T: Real>(p: T, sigma1: T, sigma2: T) -> T {
    T::of(2.0).powf(T::of(2.5) * p) * (sigma2 * sigma2 - sigma1 * sigma1).powf(p)
}

/// Checks the two-noise-level inequality with common random numbers.
pub fn two_sigma_check<T: Real>(
    x: &SampleSet<T>,
    y: &SampleSet<T>,
    sigma1: T,
    sigma2: T,
    cfg: &GssdConfig<T>,
) -> Result<TwoSigmaReport<T>> {
    if cfg.divergence.kind != DivergenceKind::Wasserstein {
        return Err(Error::invalid("divergence", "two-sigma inequality holds for Wasserstein only"));
    }
    check_sigma(sigma1)?;
    if sigma1 > sigma2 {
        return Err(Error::invalid("sigma1", format!("need sigma1 <= sigma2, got {sigma1} > {sigma2}")));
    }
    let est = sweep_sigma(x, y, &[sigma1, sigma2], cfg)?;
    let p = cfg.order();
    let factor = T::of(2.0).powf(p - T::one());
    let gap = two_sigma_gap(p, sigma1, sigma2);
    let lhs = est[0].mean_pow;
    let rhs = factor * est[1].mean_pow + gap;
    let slack = T::of(3.0) * (est[0].std_error + factor * est[1].std_error);
    Ok(TwoSigmaReport {
        lhs,
        rhs,
        gap,
        slack,
        holds: lhs <= rhs + slack,
    })
}
