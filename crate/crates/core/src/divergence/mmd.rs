use crate::divergence::wasserstein::{check_values, sort_finite};
use crate::error::{Error, Result};
use crate::real::Real;

/// Biased (V-statistic) squared MMD with Gaussian kernel
/// `k(s, t) = exp(-(s - t)^2 / (2 h^2))`.
pub fn mmd_sq<T: Real>(x: &[T], y: &[T], bandwidth: T) -> Result<T> {
    if !(bandwidth > T::zero()) || !bandwidth.is_finite() {
        return Err(Error::invalid(
            "bandwidth",
            format!("must be finite and > 0, got {bandwidth}"),
        ));
    }
    check_values(x, "x")?;
    check_values(y, "y")?;
    let gamma = T::one() / (T::of(2.0) * bandwidth * bandwidth);
    let (n, m) = (T::of_usize(x.len()), T::of_usize(y.len()));
    let kxx = self_kernel_sum(x, gamma);
    let kyy = self_kernel_sum(y, gamma);
    let kxy = cross_kernel_sum(x, y, gamma);
    Ok(kxx / (n * n) - T::of(2.0) * kxy / (n * m) + kyy / (m * m))
}

fn self_kernel_sum<T: Real>(x: &[T], gamma: T) -> T {
    let mut off = T::zero();
    for (i, &a) in x.iter().enumerate() {
        let mut row = T::zero();
        for &b in &x[i + 1..] {
            let d = a - b;
            row = row + (-gamma * d * d).exp();
        }
        off = off + row;
    }
    T::of_usize(x.len()) + T::of(2.0) * off
}

fn cross_kernel_sum<T: Real>(x: &[T], y: &[T], gamma: T) -> T {
    x.iter().fold(T::zero(), |acc, &a| {
        acc + y.iter().fold(T::zero(), |row, &b| {
            let d = a - b;
            row + (-gamma * d * d).exp()
        })
    })
}

/// Mean of `|s_i - s_j|` over all unordered pairs of the pooled sample.
///
/// Falls back to `1.0` when every pooled point coincides.
pub fn bandwidth_mean_pairwise<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    let total = x.len() + y.len();
    if total < 2 {
        return Err(Error::invalid(
            "samples",
            format!("mean pairwise distance needs at least 2 pooled points, got {total}"),
        ));
    }
    let mut pooled: Vec<T> = x.iter().chain(y).copied().collect();
    if let Some(row) = pooled.iter().position(|t| !t.is_finite()) {
        return Err(Error::NonFinite { row, col: 0 });
    }
    sort_finite(&mut pooled);
    // sum_{i<j} (s_j - s_i) = sum_k s_(k) (2k - N + 1) over the sorted order.
    let big_n = T::of_usize(total);
    let sum = pooled.iter().enumerate().fold(T::zero(), |acc, (k, &s)| {
        acc + s * (T::of_usize(2 * k) - big_n + T::one())
    });
    let pairs = big_n * (big_n - T::one()) / T::of(2.0);
    let mean = sum / pairs;
    if mean > T::zero() {
        Ok(mean)
    } else {
        Ok(T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_sets_give_zero() {
        let x = [0.3f64, -1.2, 4.0, 2.2, 0.0];
        assert!(mmd_sq(&x, &x, 0.7).unwrap().abs() < 1e-12);
    }

    #[test]
    fn two_atoms_hand_value() {
        let v = mmd_sq(&[0.0f64], &[1.0], 1.0).unwrap();
        let expected = 2.0 * (1.0 - (-0.5f64).exp());
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 0.786_939).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_bandwidth_and_empty_sets() {
        assert!(mmd_sq(&[0.0f64], &[1.0], 0.0).is_err());
        assert!(mmd_sq(&[0.0f64], &[1.0], -1.0).is_err());
        assert!(mmd_sq::<f64>(&[], &[1.0], 1.0).is_err());
    }

    #[test]
    fn bandwidth_cases() {
        assert_eq!(bandwidth_mean_pairwise(&[0.0f64], &[1.0]).unwrap(), 1.0);
        assert_eq!(bandwidth_mean_pairwise(&[2.0f64, 2.0], &[2.0]).unwrap(), 1.0);
        assert!(bandwidth_mean_pairwise::<f64>(&[1.0], &[]).is_err());
        // pairs of {0, 1, 3}: 1, 3, 2
        assert!((bandwidth_mean_pairwise(&[0.0f64, 3.0], &[1.0]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bandwidth_is_positively_homogeneous() {
        let x = [0.5f64, -2.0, 1.25];
        let y = [3.0f64, 0.0];
        let base = bandwidth_mean_pairwise(&x, &y).unwrap();
        let a = 3.5;
        let xs: Vec<f64> = x.iter().map(|v| a * v).collect();
        let ys: Vec<f64> = y.iter().map(|v| a * v).collect();
        assert!((bandwidth_mean_pairwise(&xs, &ys).unwrap() - a * base).abs() < 1e-12);
    }

    #[test]
    fn bandwidth_matches_brute_force_pairs() {
        let x = [0.1f64, 4.0, -2.0, 0.7];
        let y = [1.1f64, -0.4, 2.5];
        let pooled: Vec<f64> = x.iter().chain(&y).copied().collect();
        let mut sum = 0.0;
        let mut count = 0;
        for i in 0..pooled.len() {
            for j in i + 1..pooled.len() {
                sum += (pooled[i] - pooled[j]).abs();
                count += 1;
            }
        }
        let brute = sum / count as f64;
        assert!((bandwidth_mean_pairwise(&x, &y).unwrap() - brute).abs() < 1e-14);
    }
}
