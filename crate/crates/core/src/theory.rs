//! Analytic constants for the sample- and projection-complexity bounds.
//!
//! Everything here is evaluated in `f64` and converted at the boundary.
//! `c_p`, the unspecified constant of the empirical-measure rate, is a
//! caller-supplied calibration knob (default 1).

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::real::{sample_std, Real};

/// `E|N(0, s^2)|^q = s^q 2^{q/2} Gamma((q+1)/2) / sqrt(pi)`.
pub fn gaussian_abs_moment<T: Real>(q: T, s: T) -> Result<T> {
    let (q, s) = (q.as_f64(), s.as_f64());
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::invalid("q", format!("moment order must be >= 0, got {q}")));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::invalid("s", format!("scale must be > 0, got {s}")));
    }
    let log = q * s.ln() + 0.5 * q * 2f64.ln() + ln_gamma(0.5 * (q + 1.0)) - 0.5 * PI.ln();
    Ok(T::of(log.exp()))
}

/// Rising factorial `(alpha)_k = alpha (alpha + 1) ... (alpha + k - 1)`.
pub fn pochhammer<T: Real>(alpha: T, k: usize) -> T {
    (0..k).fold(T::one(), |acc, i| acc * (alpha + T::of_usize(i)))
}

const KUMMER_REL_TOL: f64 = 1e-12;
const KUMMER_MAX_TERMS: usize = 10_000;

fn non_positive_integer(x: f64) -> Option<usize> {
    (x <= 0.0 && x.fract() == 0.0).then(|| (-x) as usize)
}

/// Confluent hypergeometric `1F1(a; gamma; z) = sum_k (a)_k / (gamma)_k z^k / k!`.
///
/// Terminates exactly when `a` is a non-positive integer; otherwise stops
/// once a term is below `1e-12` of the partial sum.
pub fn kummer_1f1<T: Real>(a: T, gamma_param: T, z: T) -> Result<T> {
    let (a, c, z) = (a.as_f64(), gamma_param.as_f64(), z.as_f64());
    if non_positive_integer(c).is_some() {
        return Err(Error::invalid("gamma", format!("{c} is a non-positive integer")));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    if let Some(last) = non_positive_integer(a) {
        for k in 0..last {
            let k = k as f64;
            term *= (a + k) / (c + k) * z / (k + 1.0);
            sum += term;
        }
        return Ok(T::of(sum));
    }
    for k in 0..KUMMER_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) / (c + kf) * z / (kf + 1.0);
        sum += term;
        if term == 0.0 || term.abs() < KUMMER_REL_TOL * sum.abs() {
            return Ok(T::of(sum));
        }
    }
    Err(Error::SeriesNotConverged {
        terms: KUMMER_MAX_TERMS,
        partial: sum,
    })
}

/// Tail probability `xi -> P[|X| > xi]` of the data distribution.
#[derive(Clone)]
pub enum TailModel {
    /// `X = 0` almost surely.
    PointMass,
    /// `|X| <= radius` almost surely; the tail is bounded by 1 below the radius.
    BoundedSupport { radius: f64 },
    /// `X ~ N(0, scale^2 I_dim)`.
    SphericalGaussian { dim: usize, scale: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for TailModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailModel::PointMass => f.write_str("PointMass"),
            TailModel::BoundedSupport { radius } => {
                f.debug_struct("BoundedSupport").field("radius", radius).finish()
            }
            TailModel::SphericalGaussian { dim, scale } => f
                .debug_struct("SphericalGaussian")
                .field("dim", dim)
                .field("scale", scale)
                .finish(),
            TailModel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl TailModel {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        TailModel::Custom(Arc::new(f))
    }

    pub fn probability(&self, xi: f64) -> f64 {
        match self {
            TailModel::PointMass => {
                if xi < 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            TailModel::BoundedSupport { radius } => {
                if xi < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            TailModel::SphericalGaussian { dim, scale } => {
                if xi <= 0.0 {
                    1.0
                } else {
                    // |X|^2 / scale^2 is chi-square with `dim` degrees of freedom.
                    gamma_ur(*dim as f64 / 2.0, xi * xi / (2.0 * scale * scale))
                }
            }
            TailModel::Custom(f) => f(xi),
        }
    }

    /// Point beyond which the tail is identically zero, if any.
    fn support_end(&self) -> Option<f64> {
        match self {
            TailModel::PointMass => Some(0.0),
            TailModel::BoundedSupport { radius } => Some(*radius),
            _ => None,
        }
    }
}

/// Even moments `M_{2k} = E|X|^{2k}` of `N(0, scale^2 I_d)`:
/// `scale^{2k} 2^k Gamma(d/2 + k) / Gamma(d/2)`.
pub fn spherical_gaussian_moment(dim: usize, scale: f64, k: usize) -> f64 {
    let half = dim as f64 / 2.0;
    let k = k as f64;
    (2.0 * k * scale.ln() + k * 2f64.ln() + ln_gamma(half + k) - ln_gamma(half)).exp()
}

const TAIL_CUTOFF: f64 = 1e-14;
/// Largest exponent `2 xi^2 / (sigma vartheta)^2` the integrand may reach.
const MAX_EXPONENT: f64 = 700.0;

/// `int_0^inf exp(2 xi^2 / (sigma^2 vartheta^2)) P[|X| > xi] d xi`.
///
/// The integration range is cut where the integrand falls below `1e-14`;
/// if it is still non-negligible where the exponential factor would overflow,
/// the integral is reported as divergent.
pub fn tail_integral(sigma: f64, vartheta: f64, tail: &TailModel) -> Result<f64> {
    let width = sigma * vartheta;
    let integrand = |xi: f64| -> f64 {
        let prob = tail.probability(xi);
        if prob <= 0.0 {
            0.0
        } else {
            (2.0 * xi * xi / (width * width) + prob.ln()).exp()
        }
    };

    let step = width / 8.0;
    let xi_max = width * (MAX_EXPONENT / 2.0).sqrt();
    let hard_end = tail.support_end().map_or(xi_max, |r| r.min(xi_max));
    let mut total = 0.0;
    let mut lo = 0.0;
    loop {
        let hi = (lo + step).min(hard_end);
        if hi > lo {
            let out = quadrature::double_exponential::integrate(integrand, lo, hi, 1e-15);
            if !out.integral.is_finite() {
                return Err(Error::DivergentIntegral(format!("non-finite integral on [{lo}, {hi}]")));
            }
            total += out.integral;
        }
        if hi >= hard_end {
            if tail.support_end().is_some_and(|r| r <= xi_max) {
                return Ok(total);
            }
            break;
        }
        let h = integrand(hi);
        if h < TAIL_CUTOFF && hi > width {
            return Ok(total);
        }
        lo = hi;
    }
    Err(Error::DivergentIntegral(format!(
        "integrand has not decayed below {TAIL_CUTOFF:e} by xi = {xi_max:.3}"
    )))
}

fn check_vartheta(vartheta: f64) -> Result<()> {
    if vartheta > SQRT_2 && vartheta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("vartheta", format!("need vartheta > sqrt(2), got {vartheta}")))
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

/// The `1/sqrt(n)` constant
/// `2^{5p/2 - 5/4} / sqrt(pi) sigma^{p - 1/4} vartheta^{p+1} sqrt(Gamma(p + 1/2))
///  * (sqrt(4 pi sigma^2 vartheta^2 / (vartheta^2 - 2)) + 4 I)^{1/2}`
/// with `I` the [`tail_integral`].
pub fn xi_constant<T: Real>(p: T, sigma: T, vartheta: T, tail: &TailModel) -> Result<T> {
    let (p, sigma, vartheta) = (p.as_f64(), sigma.as_f64(), vartheta.as_f64());
    check_vartheta(vartheta)?;
    check_positive("sigma", sigma)?;
    if !(p >= 1.0) {
        return Err(Error::invalid("p", format!("order must be >= 1, got {p}")));
    }
    let integral = tail_integral(sigma, vartheta, tail)?;
    Ok(T::of(xi_from_tail(p, sigma, vartheta, integral)))
}

fn xi_from_tail(p: f64, sigma: f64, vartheta: f64, integral: f64) -> f64 {
    let v2 = vartheta * vartheta;
    let gaussian_part = (4.0 * PI * sigma * sigma * v2 / (v2 - 2.0)).sqrt();
    2f64.powf(2.5 * p - 1.25) / PI.sqrt()
        * sigma.powf(p - 0.25)
        * vartheta.powf(p + 1.0)
        * gamma(p + 0.5).sqrt()
        * (gaussian_part + 4.0 * integral).sqrt()
}

/// The `log(n)/n` constant
/// `2^{2p-1} c_p / sqrt(pi) sigma^{2p} Gamma(p + 1/2)
///  * sum_{k=0}^{p} (-p)_k / (1/2)_k (-1)^k / ((2 sigma^2)^k k!) M_{2k}`,
/// where `moments(k)` returns `M_{2k}` of the data distribution.
pub fn upsilon_constant<T: Real>(p: T, sigma: T, moments: impl Fn(usize) -> T, c_p: T) -> Result<T> {
    let (pf, sigma, c_p) = (p.as_f64(), sigma.as_f64(), c_p.as_f64());
    if !(pf >= 1.0) || pf.fract() != 0.0 {
        return Err(Error::invalid("p", format!("series needs a positive integer order, got {pf}")));
    }
    check_positive("sigma", sigma)?;
    let order = pf as usize;
    let two_s2 = 2.0 * sigma * sigma;
    let mut series = 0.0;
    for k in 0..=order {
        let ratio = pochhammer(-pf, k) / pochhammer(0.5, k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let denom = two_s2.powi(k as i32) * gamma(k as f64 + 1.0);
        series += ratio * sign / denom * moments(k).as_f64();
    }
    let prefactor = 2f64.powf(2.0 * pf - 1.0) * c_p / PI.sqrt() * sigma.powf(2.0 * pf) * gamma(pf + 0.5);
    Ok(T::of(prefactor * series))
}

/// `xi / sqrt(n) + upsilon log(n) / n`.
pub fn sample_bound<T: Real>(n: usize, xi: T, upsilon: T) -> Result<T> {
    if n == 0 {
        return Err(Error::invalid("n", "sample size must be >= 1"));
    }
    let nf = T::of_usize(n);
    Ok(xi / nf.sqrt() + upsilon * nf.ln() / nf)
}

/// Empirical projection-error bound: sample std of the slice values over
/// `sqrt(L)`.
pub fn mc_error_bound<T: Real>(per_projection: &[T]) -> Result<T> {
    if per_projection.len() < 2 {
        return Err(Error::invalid("per_projection", "need at least 2 slice values"));
    }
    Ok(sample_std(per_projection) / T::of_usize(per_projection.len()).sqrt())
}

/// Evaluated constants of the sample-complexity bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryBound<T> {
    pub p: T,
    pub sigma: T,
    pub vartheta: T,
    pub xi: T,
    pub upsilon: T,
    pub c_p: T,
    pub tail_integral: T,
}

impl<T: Real> TheoryBound<T> {
    /// Evaluates both constants; `p` must be a positive integer.
    pub fn new(
        p: T,
        sigma: T,
        vartheta: T,
        c_p: T,
        tail: &TailModel,
        moments: impl Fn(usize) -> T,
    ) -> Result<Self> {
        check_vartheta(vartheta.as_f64())?;
        check_positive("sigma", sigma.as_f64())?;
        let integral = tail_integral(sigma.as_f64(), vartheta.as_f64(), tail)?;
        let xi = T::of(xi_from_tail(p.as_f64(), sigma.as_f64(), vartheta.as_f64(), integral));
        let upsilon = upsilon_constant(p, sigma, moments, c_p)?;
        Ok(Self {
            p,
            sigma,
            vartheta,
            xi,
            upsilon,
            c_p,
            tail_integral: T::of(integral),
        })
    }

    /// Constants for `N(0, scale^2 I_dim)` data.
    pub fn spherical_gaussian(p: T, sigma: T, vartheta: T, c_p: T, dim: usize, scale: f64) -> Result<Self> {
        Self::new(
            p,
            sigma,
            vartheta,
            c_p,
            &TailModel::SphericalGaussian { dim, scale },
            |k| T::of(spherical_gaussian_moment(dim, scale, k)),
        )
    }

    pub fn at(&self, n: usize) -> Result<T> {
        sample_bound(n, self.xi, self.upsilon)
    }
}
