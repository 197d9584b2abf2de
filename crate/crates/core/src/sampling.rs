//! Sample sets, random directions, Radon slices and Gaussian smoothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng::RngStream;

/// An `n x d` matrix of observations, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet<T> {
    data: Vec<T>,
    n: usize,
    d: usize,
}

impl<T: Real> SampleSet<T> {
    /// Builds a sample set from a row-major buffer of length `n * d`.
    pub fn from_flat(n: usize, d: usize, data: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("sample set has no rows"));
        }
        if d == 0 {
            return Err(Error::Empty("sample set has zero dimension"));
        }
        if data.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / d,
                col: pos % d,
            });
        }
        Ok(Self { data, n, d })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(rows.len(), d, data)
    }

    /// `n` i.i.d. draws from `N(mean, scale^2 I_d)`; `mean` has length `d`.
    pub fn gaussian(n: usize, mean: &[T], scale: T, stream: &mut RngStream) -> Result<Self> {
        let d = mean.len();
        let mut data = Vec::with_capacity(n * d);
        for _ in 0..n {
            for &m in mean {
                data.push(m + scale * T::of(stream.standard_normal()));
            }
        }
        Self::from_flat(n, d, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn as_flat(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.d)
    }

    /// Rows `range` as a new sample set.
    pub fn slice_rows(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.end > self.n || range.start >= range.end {
            return Err(Error::invalid(
                "range",
                format!("{range:?} is not a non-empty subrange of 0..{}", self.n),
            ));
        }
        Self::from_flat(
            range.len(),
            self.d,
            self.data[range.start * self.d..range.end * self.d].to_vec(),
        )
    }
}

/// A unit vector in `R^d` defining one slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction<T> {
    coords: Vec<T>,
}

impl<T: Real> Direction<T> {
    /// Normalizes `coords`; fails on the zero vector.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        let norm = coords.iter().map(|&c| c * c).sum::<T>().sqrt();
        if norm == T::zero() || !norm.is_finite() {
            return Err(Error::invalid("coords", "cannot normalize a zero or non-finite vector"));
        }
        Ok(Self {
            coords: coords.into_iter().map(|c| c / norm).collect(),
        })
    }

    /// The `i`-th canonical basis vector of `R^d`.
    pub fn axis(d: usize, i: usize) -> Self {
        let mut coords = vec![T::zero(); d];
        coords[i] = T::one();
        Self { coords }
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Smoothed values `t_i = u^T X_i + Z_i` of one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedSlice<T> {
    pub values: Vec<T>,
    pub sigma: T,
    pub direction: Option<Direction<T>>,
}

const MAX_DIRECTION_RETRIES: usize = 16;

/// Uniform direction on the sphere `S^{d-1}`: a normalized standard Gaussian.
pub fn sample_direction<T: Real>(d: usize, stream: &mut RngStream) -> Result<Direction<T>> {
    if d == 0 {
        return Err(Error::invalid("d", "dimension must be at least 1"));
    }
    let mut buf = vec![0.0f64; d];
    for _ in 0..MAX_DIRECTION_RETRIES {
        stream.fill_standard_normal(&mut buf);
        let norm = buf.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return Ok(Direction {
                coords: buf.iter().map(|&x| T::of(x / norm)).collect(),
            });
        }
    }
    Err(Error::DegenerateDirection(MAX_DIRECTION_RETRIES))
}

/// Radon slice: entry `i` is `u^T X_i`.
pub fn project<T: Real>(samples: &SampleSet<T>, u: &Direction<T>) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(samples.n());
    project_into(samples, u, &mut out)?;
    Ok(out)
}

pub(crate) fn project_into<T: Real>(
    samples: &SampleSet<T>,
    u: &Direction<T>,
    out: &mut Vec<T>,
) -> Result<()> {
    if u.dim() != samples.d() {
        return Err(Error::DimensionMismatch {
            expected: samples.d(),
            got: u.dim(),
        });
    }
    out.clear();
    out.extend(samples.rows().map(|row| {
        row.iter()
            .zip(u.coords())
            .fold(T::zero(), |acc, (&x, &c)| acc + x * c)
    }));
    Ok(())
}

/// Adds one `N(0, sigma^2)` draw to every value. `sigma = 0` returns the
/// input unchanged and consumes nothing from the stream.
pub fn smooth_double<T: Real>(
    values: &[T],
    sigma: T,
    stream: &mut RngStream,
) -> Result<SmoothedSlice<T>> {
    let mut out = values.to_vec();
    smooth_in_place(&mut out, sigma, stream)?;
    Ok(SmoothedSlice {
        values: out,
        sigma,
        direction: None,
    })
}

pub(crate) fn smooth_in_place<T: Real>(
    values: &mut [T],
    sigma: T,
    stream: &mut RngStream,
) -> Result<()> {
    check_sigma(sigma)?;
    if sigma == T::zero() {
        return Ok(());
    }
    for v in values.iter_mut() {
        *v = *v + sigma * T::of(stream.standard_normal());
    }
    Ok(())
}

/// Projects `samples` on `u` and smooths the result.
pub fn smooth_projection<T: Real>(
    samples: &SampleSet<T>,
    u: &Direction<T>,
    sigma: T,
    stream: &mut RngStream,
) -> Result<SmoothedSlice<T>> {
    let mut slice = smooth_double(&project(samples, u)?, sigma, stream)?;
    slice.direction = Some(u.clone());
    Ok(slice)
}

/// Density at `t` of the mixture `(1/n) sum_i N(values_i, sigma^2)`.
pub fn mixture_pdf<T: Real>(values: &[T], sigma: T, t: T) -> Result<T> {
    if !(sigma > T::zero()) {
        return Err(Error::invalid("sigma", "mixture density needs sigma > 0"));
    }
    if values.is_empty() {
        return Err(Error::Empty("mixture has no components"));
    }
    let norm = T::one() / (sigma * T::of((2.0 * std::f64::consts::PI).sqrt()));
    let half = T::of(0.5);
    let total: T = values
        .iter()
        .map(|&v| {
            let z = (t - v) / sigma;
            (-half * z * z).exp()
        })
        .sum();
    Ok(norm * total / T::of_usize(values.len()))
}

pub(crate) fn check_sigma<T: Real>(sigma: T) -> Result<()> {
    if sigma >= T::zero() && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("sigma", format!("must be finite and >= 0, got {sigma}")))
    }
}
