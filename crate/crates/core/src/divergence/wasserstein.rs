use crate::error::{Error, Result};
use crate::real::Real;

/// `W_p^p` between the uniform empirical measures on `x` and `y`.
///
/// Equal sizes pair order statistics. Unequal sizes integrate
/// `|F_x^{-1}(t) - F_y^{-1}(t)|^p` over the merged quantile breakpoints; the
/// breakpoints are tracked in integer units of `1 / (n m)` so no mass is lost
/// to rounding.
pub fn wasserstein_pp<T: Real>(x: &[T], y: &[T], p: T) -> Result<T> {
    check_order(p)?;
    let xs = sorted(x, "x")?;
    let ys = sorted(y, "y")?;
    Ok(wasserstein_pp_sorted(&xs, &ys, p))
}

/// [`wasserstein_pp`] for inputs already sorted ascending. Inputs must be
/// non-empty.
pub fn wasserstein_pp_sorted<T: Real>(xs: &[T], ys: &[T], p: T) -> T {
    let cost = CostFn::new(p);
    let (n, m) = (xs.len(), ys.len());
    if n == m {
        let total = xs
            .iter()
            .zip(ys)
            .fold(T::zero(), |acc, (&a, &b)| acc + cost.eval(a - b));
        return total / T::of_usize(n);
    }

    // Each x atom carries m units and each y atom n units; total n * m.
    let (mut i, mut j) = (0usize, 0usize);
    let (mut left_x, mut left_y) = (m, n);
    let mut total = T::zero();
    while i < n && j < m {
        let step = left_x.min(left_y);
        total = total + T::of_usize(step) * cost.eval(xs[i] - ys[j]);
        left_x -= step;
        left_y -= step;
        if left_x == 0 {
            i += 1;
            left_x = m;
        }
        if left_y == 0 {
            j += 1;
            left_y = n;
        }
    }
    total / (T::of_usize(n) * T::of_usize(m))
}

/// `|t|^p` with fast paths for the common integer orders.
#[derive(Debug, Clone, Copy)]
pub(crate) enum CostFn<T> {
    Abs,
    Square,
    Pow(T),
}

impl<T: Real> CostFn<T> {
    pub(crate) fn new(p: T) -> Self {
        if p == T::one() {
            CostFn::Abs
        } else if p == T::of(2.0) {
            CostFn::Square
        } else {
            CostFn::Pow(p)
        }
    }

    #[inline]
    pub(crate) fn eval(self, t: T) -> T {
        match self {
            CostFn::Abs => t.abs(),
            CostFn::Square => t * t,
            CostFn::Pow(p) => t.abs().powf(p),
        }
    }
}

pub(crate) fn check_order<T: Real>(p: T) -> Result<()> {
    if p >= T::one() && p.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("p", format!("order must be finite and >= 1, got {p}")))
    }
}

pub(crate) fn check_values<T: Real>(v: &[T], what: &'static str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Empty(what));
    }
    if let Some(row) = v.iter().position(|t| !t.is_finite()) {
        return Err(Error::NonFinite { row, col: 0 });
    }
    Ok(())
}

pub(crate) fn sorted<T: Real>(v: &[T], what: &'static str) -> Result<Vec<T>> {
    check_values(v, what)?;
    let mut out = v.to_vec();
    sort_finite(&mut out);
    Ok(out)
}

pub(crate) fn sort_finite<T: Real>(v: &mut [T]) {
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values are totally ordered"));
}
