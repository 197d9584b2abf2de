//! # gssd
//!
//! Gaussian-smoothed sliced divergences between empirical distributions.
//!
//! Both measures are projected on random directions of the unit sphere; each
//! projected sample receives one independent `N(0, sigma^2)` draw and a 1D
//! base divergence (Wasserstein, squared MMD or Sinkhorn) compares the two
//! smoothed slices. Averaging `D^p` over `L` directions gives the Monte Carlo
//! estimate.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`rng`] | counter-based `(seed, label, index)` streams |
//! | [`sampling`] | sample sets, directions, projection, smoothing |
//! | [`divergence`] | 1D `W_p^p`, MMD², Sinkhorn, Gaussian-mixture oracle |
//! | [`estimator`] | the sliced estimator, sigma sweeps, two-noise-level check |
//! | [`theory`] | Gaussian moments, `1F1`, sample/projection bound constants |
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.
//!
//! ```
//! use gssd::{estimate, DivergenceSpec, GssdConfig, RngRoot, SampleSet};
//!
//! let mut s = RngRoot::new(7).stream("data", 0);
//! let x = SampleSet::gaussian(200, &[0.0; 5], 1.0, &mut s).unwrap();
//! let y = SampleSet::gaussian(200, &[0.5; 5], 1.0, &mut s).unwrap();
//! let cfg = GssdConfig::new(DivergenceSpec::wasserstein(2.0), 1.0, 50, 42);
//! let est = estimate(&x, &y, &cfg).unwrap();
//! assert!(est.mean_pow > 0.0);
//! ```

pub mod divergence;
pub mod error;
pub mod estimator;
pub mod real;
pub mod rng;
pub mod sampling;
pub mod theory;

pub use divergence::{
    bandwidth_mean_pairwise, mmd_sq, sinkhorn_div, smoothed_wasserstein_oracle, wasserstein_pp,
    BandwidthPolicy, DivergenceKind, DivergenceSpec, SinkhornOutcome, SinkhornParams,
};
pub use error::{Error, Result};
pub use estimator::{estimate, sweep_sigma, two_sigma_check, EstimatorMode, GssdConfig, GssdEstimate, TwoSigmaReport};
pub use real::Real;
pub use rng::{derive_stream, draw_standard_normal, RngRoot, RngStream};
pub use sampling::{mixture_pdf, project, sample_direction, smooth_double, Direction, SampleSet, SmoothedSlice};
pub use theory::{
    gaussian_abs_moment, kummer_1f1, mc_error_bound, pochhammer, sample_bound, upsilon_constant, xi_constant,
    TailModel, TheoryBound,
};

pub type SampleSet64 = SampleSet<f64>;
pub type SampleSet32 = SampleSet<f32>;
pub type Direction64 = Direction<f64>;
pub type DivergenceSpec64 = DivergenceSpec<f64>;
pub type GssdConfig64 = GssdConfig<f64>;
pub type GssdConfig32 = GssdConfig<f32>;
pub type GssdEstimate64 = GssdEstimate<f64>;
pub type GssdEstimate32 = GssdEstimate<f32>;
pub type TheoryBound64 = TheoryBound<f64>;
