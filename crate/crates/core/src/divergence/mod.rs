//! One-dimensional base divergences between empirical measures.

mod mixture;
mod mmd;
mod sinkhorn;
mod wasserstein;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

pub use mixture::{smoothed_wasserstein_oracle, MIN_ORACLE_GRID};
pub use mmd::{bandwidth_mean_pairwise, mmd_sq};
pub use sinkhorn::{entropic_ot, sinkhorn_div, SinkhornOutcome, SinkhornParams};
pub use wasserstein::{wasserstein_pp, wasserstein_pp_sorted};

/// Which 1D base divergence is sliced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceKind {
    Wasserstein,
    MmdSquared,
    Sinkhorn,
}

impl DivergenceKind {
    pub const ALL: [DivergenceKind; 3] = [
        DivergenceKind::Wasserstein,
        DivergenceKind::MmdSquared,
        DivergenceKind::Sinkhorn,
    ];

    /// Short name used on the command line and in result files.
    pub fn short_name(self) -> &'static str {
        match self {
            DivergenceKind::Wasserstein => "swd",
            DivergenceKind::MmdSquared => "mmd",
            DivergenceKind::Sinkhorn => "skd",
        }
    }
}

impl fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for DivergenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "swd" | "wasserstein" | "w" => Ok(DivergenceKind::Wasserstein),
            "mmd" | "mmd2" | "mmd_squared" => Ok(DivergenceKind::MmdSquared),
            "skd" | "sinkhorn" => Ok(DivergenceKind::Sinkhorn),
            other => Err(Error::invalid(
                "divergence",
                format!("unknown divergence `{other}` (expected swd, mmd or skd)"),
            )),
        }
    }
}

/// Kernel bandwidth rule for MMD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthPolicy<T> {
    /// Mean pairwise distance of the pooled, smoothed 1D values of each slice.
    MeanPairwise,
    Fixed(T),
}

/// A base divergence with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceSpec<T> {
    pub kind: DivergenceKind,
    /// Order `p`; also the exponent of the Sinkhorn ground cost `|s - t|^p`.
    pub p: T,
    pub epsilon: T,
    pub bandwidth: BandwidthPolicy<T>,
    pub sinkhorn_tol: T,
    pub sinkhorn_max_iter: usize,
}

impl<T: Real> DivergenceSpec<T> {
    pub fn new(kind: DivergenceKind, p: T) -> Self {
        Self {
            kind,
            p,
            epsilon: T::of(0.1),
            bandwidth: BandwidthPolicy::MeanPairwise,
            sinkhorn_tol: T::of(1e-9),
            sinkhorn_max_iter: 1000,
        }
    }

    pub fn wasserstein(p: T) -> Self {
        Self::new(DivergenceKind::Wasserstein, p)
    }

    pub fn mmd(p: T) -> Self {
        Self::new(DivergenceKind::MmdSquared, p)
    }

    pub fn sinkhorn(p: T, epsilon: T) -> Self {
        Self {
            epsilon,
            ..Self::new(DivergenceKind::Sinkhorn, p)
        }
    }

    pub fn validate(&self) -> Result<()> {
        wasserstein::check_order(self.p)?;
        if self.kind == DivergenceKind::Sinkhorn {
            self.sinkhorn_params().validate()?;
        }
        if let BandwidthPolicy::Fixed(h) = self.bandwidth {
            if !(h > T::zero()) || !h.is_finite() {
                return Err(Error::invalid("bandwidth", format!("must be finite and > 0, got {h}")));
            }
        }
        Ok(())
    }

    pub fn sinkhorn_params(&self) -> SinkhornParams<T> {
        SinkhornParams {
            p: self.p,
            epsilon: self.epsilon,
            tol: self.sinkhorn_tol,
            max_iter: self.sinkhorn_max_iter,
        }
    }

    /// `D^p` between two 1D samples.
    ///
    /// Wasserstein returns `W_p^p`; Sinkhorn returns `S_eps` with cost
    /// `|s - t|^p`, already on the `W_p^p` scale; MMD returns
    /// `(MMD^2)^{p/2}`, which is the raw V-statistic for `p = 2`.
    pub fn evaluate(&self, x: &[T], y: &[T]) -> Result<Evaluation<T>> {
        match self.kind {
            DivergenceKind::Wasserstein => Ok(Evaluation::exact(wasserstein_pp(x, y, self.p)?)),
            DivergenceKind::MmdSquared => {
                let h = match self.bandwidth {
                    BandwidthPolicy::MeanPairwise => bandwidth_mean_pairwise(x, y)?,
                    BandwidthPolicy::Fixed(h) => h,
                };
                let sq = mmd_sq(x, y, h)?;
                let two = T::of(2.0);
                let value = if self.p == two {
                    sq
                } else {
                    sq.max(T::zero()).powf(self.p / two)
                };
                Ok(Evaluation::exact(value))
            }
            DivergenceKind::Sinkhorn => {
                let out = sinkhorn_div(x, y, &self.sinkhorn_params())?;
                Ok(Evaluation {
                    value: out.value,
                    converged: out.converged,
                })
            }
        }
    }
}

/// A single `D^p` value and whether its iterative solver converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    pub converged: bool,
}

impl<T> Evaluation<T> {
    fn exact(value: T) -> Self {
        Self {
            value,
            converged: true,
        }
    }
}
