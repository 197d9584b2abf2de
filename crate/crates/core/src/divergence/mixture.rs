//! `W_p^p` between two equal-variance Gaussian mixtures by quantile inversion.

use libm::erfc;

use crate::divergence::wasserstein::{check_order, check_values, sort_finite};
use crate::error::{Error, Result};
use crate::real::Real;

/// Smallest admissible quantile grid.
pub const MIN_ORACLE_GRID: usize = 1000;

/// Components further than this many standard deviations from `t` are
/// counted as fully below or above it (`Phi(-12) < 2e-33`).
const CUTOFF_SIGMAS: f64 = 12.0;

/// `W_p^p` between `(1/n) sum N(vx_i, sigma^2)` and `(1/m) sum N(vy_j, sigma^2)`.
///
/// The quantile integral is evaluated with the midpoint rule on `grid`
/// equally spaced levels; each quantile is found by safeguarded Newton
/// iteration on the mixture CDF. Computation runs in `f64`.
pub fn smoothed_wasserstein_oracle<T: Real>(
    vx: &[T],
    vy: &[T],
    sigma: T,
    p: T,
    grid: usize,
) -> Result<T> {
    check_order(p)?;
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::invalid("sigma", "mixture oracle needs finite sigma > 0"));
    }
    if grid < MIN_ORACLE_GRID {
        return Err(Error::invalid(
            "grid",
            format!("need at least {MIN_ORACLE_GRID} quantile levels, got {grid}"),
        ));
    }
    check_values(vx, "vx")?;
    check_values(vy, "vy")?;

    let mx = Mixture::new(vx, sigma.as_f64());
    let my = Mixture::new(vy, sigma.as_f64());
    let qx = mx.quantiles(grid);
    let qy = my.quantiles(grid);
    let p = p.as_f64();
    let total: f64 = qx
        .iter()
        .zip(&qy)
        .map(|(a, b)| {
            let d = (a - b).abs();
            if p == 1.0 {
                d
            } else if p == 2.0 {
                d * d
            } else {
                d.powf(p)
            }
        })
        .sum();
    Ok(T::of(total / grid as f64))
}

struct Mixture {
    centers: Vec<f64>,
    sigma: f64,
}

impl Mixture {
    fn new<T: Real>(centers: &[T], sigma: f64) -> Self {
        let mut centers: Vec<f64> = centers.iter().map(|c| c.as_f64()).collect();
        sort_finite(&mut centers);
        Self { centers, sigma }
    }

    /// CDF and density at `t`.
    fn cdf_pdf(&self, t: f64) -> (f64, f64) {
        let reach = CUTOFF_SIGMAS * self.sigma;
        let lo = self.centers.partition_point(|&c| c < t - reach);
        let hi = self.centers.partition_point(|&c| c <= t + reach);
        let mut cdf = lo as f64;
        let mut pdf = 0.0;
        for &c in &self.centers[lo..hi] {
            let z = (t - c) / self.sigma;
            cdf += 0.5 * erfc(-z * std::f64::consts::FRAC_1_SQRT_2);
            pdf += (-0.5 * z * z).exp();
        }
        let n = self.centers.len() as f64;
        (
            cdf / n,
            pdf / (n * self.sigma * (2.0 * std::f64::consts::PI).sqrt()),
        )
    }

    /// Quantiles at levels `(k + 1/2) / grid`, `k = 0..grid`.
    fn quantiles(&self, grid: usize) -> Vec<f64> {
        let lo_all = self.centers[0] - CUTOFF_SIGMAS * self.sigma;
        let hi_all = self.centers[self.centers.len() - 1] + CUTOFF_SIGMAS * self.sigma;
        let mut out = Vec::with_capacity(grid);
        let mut prev = None;
        for k in 0..grid {
            let level = (k as f64 + 0.5) / grid as f64;
            let (lo, guess) = match prev {
                // First-order step from the previous quantile.
                Some((q, f, dens)) if dens > 0.0 => (q, q + (level - f) / dens),
                Some((q, _, _)) => (q, q),
                None => (lo_all, self.centers[(self.centers.len() - 1) / 2]),
            };
            let (q, f, dens) = self.invert(level, lo, hi_all, guess);
            out.push(q);
            prev = Some((q, f, dens));
        }
        out
    }

    /// Safeguarded Newton from `guess` on the bracket `[lo, hi]`. Returns the
    /// root with its CDF and density.
    fn invert(&self, level: f64, mut lo: f64, mut hi: f64, guess: f64) -> (f64, f64, f64) {
        let scale = self.sigma.max(hi.abs()).max(lo.abs());
        let mut t = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
        let (mut f, mut dens) = self.cdf_pdf(t);
        for _ in 0..200 {
            let resid = f - level;
            if resid == 0.0 {
                break;
            }
            if resid < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let newton = if dens > 0.0 { t - resid / dens } else { f64::NAN };
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let step = (next - t).abs();
            t = next;
            (f, dens) = self.cdf_pdf(t);
            if step <= 1e-13 * scale || hi - lo <= 1e-14 * scale {
                break;
            }
        }
        (t, f, dens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_mixtures_are_at_distance_zero() {
        let v = [0.0f64, 1.5, -2.0];
        let w = smoothed_wasserstein_oracle(&v, &v, 0.7, 2.0, 1000).unwrap();
        assert!(w.abs() < 1e-20);
    }

    #[test]
    fn translated_gaussians() {
        for p in [1.0f64, 2.0, 3.0] {
            let w = smoothed_wasserstein_oracle(&[0.25], &[-1.5], 1.3, p, 1000).unwrap();
            let exact = 1.75f64.powf(p);
            assert!((w - exact).abs() <= 1e-4 * exact, "p {p}: {w} vs {exact}");
        }
    }

    #[test]
    fn quantiles_invert_the_cdf() {
        let m = Mixture::new(&[0.0f64, 2.0, 2.5], 0.4);
        for (k, q) in m.quantiles(1000).into_iter().enumerate() {
            let level = (k as f64 + 0.5) / 1000.0;
            assert!((m.cdf_pdf(q).0 - level).abs() < 1e-12);
        }
    }

    #[test]
    fn argument_validation() {
        assert!(smoothed_wasserstein_oracle(&[0.0f64], &[1.0], 0.0, 2.0, 1000).is_err());
        assert!(smoothed_wasserstein_oracle(&[0.0f64], &[1.0], 1.0, 2.0, 999).is_err());
        assert!(smoothed_wasserstein_oracle(&[0.0f64], &[1.0], 1.0, 0.9, 1000).is_err());
        assert!(smoothed_wasserstein_oracle::<f64>(&[], &[1.0], 1.0, 2.0, 1000).is_err());
    }
}
