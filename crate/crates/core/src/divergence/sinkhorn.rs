//! Debiased entropic optimal transport between uniform 1D empirical measures.
//!
//! The fixed point of
//!
//! ```text
//! f_i = -eps * LSE_j( log b_j + (g_j - C_ij) / eps )
//! g_j = -eps * LSE_i( log a_i + (f_i - C_ij) / eps )
//! ```
//!
//! with `C_ij = |x_i - y_j|^p` is found with stabilized scaling iterations:
//! multiplicative scalings on a kernel built from the current potentials,
//! absorbed back into the potentials when they grow large. Problems too big
//! for a dense kernel run the same updates directly in the log domain. The entropic cost is regularized by
//! `KL(P | a x b)`, so at the fixed point `OT_eps = <a, f> + <b, g>`.
//! Iteration stops once the largest row-marginal violation of the current plan
//! drops below the tolerance (column marginals are exact right after the `g`
//! update).

use serde::{Deserialize, Serialize};

use crate::divergence::wasserstein::{check_order, check_values, CostFn};
use crate::error::{Error, Result};
use crate::real::Real;

/// Value of an iterative solve together with its convergence status.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinkhornOutcome<T> {
    pub value: T,
    pub converged: bool,
    /// Largest iteration count among the sub-problems.
    pub iterations: usize,
}

/// Solver parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornParams<T> {
    pub p: T,
    pub epsilon: T,
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> SinkhornParams<T> {
    pub fn validate(&self) -> Result<()> {
        check_order(self.p)?;
        if !(self.epsilon > T::zero()) || !self.epsilon.is_finite() {
            return Err(Error::invalid(
                "epsilon",
                format!("must be finite and > 0, got {}", self.epsilon),
            ));
        }
        if !(self.tol > T::zero()) {
            return Err(Error::invalid("sinkhorn_tol", "must be > 0"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("sinkhorn_max_iter", "must be >= 1"));
        }
        Ok(())
    }
}

/// Sinkhorn divergence `OT(x, y) - OT(x, x) / 2 - OT(y, y) / 2`.
///
/// Non-convergence is reported through [`SinkhornOutcome::converged`]; the
/// value from the last iterate is still returned.
pub fn sinkhorn_div<T: Real>(x: &[T], y: &[T], params: &SinkhornParams<T>) -> Result<SinkhornOutcome<T>> {
    params.validate()?;
    check_values(x, "x")?;
    check_values(y, "y")?;
    let xy = solve_pair(x, y, params);
    let xx = solve_self(x, params);
    let yy = solve_self(y, params);
    let half = T::of(0.5);
    Ok(SinkhornOutcome {
        value: xy.value - half * xx.value - half * yy.value,
        converged: xy.converged && xx.converged && yy.converged,
        iterations: xy.iterations.max(xx.iterations).max(yy.iterations),
    })
}

/// Entropic transport cost `OT_eps(x, y)` (not debiased).
pub fn entropic_ot<T: Real>(x: &[T], y: &[T], params: &SinkhornParams<T>) -> Result<SinkhornOutcome<T>> {
    params.validate()?;
    check_values(x, "x")?;
    check_values(y, "y")?;
    Ok(solve_pair(x, y, params))
}

/// Numerically stable `log sum_k exp(v_k)` over a non-empty buffer.
fn log_sum_exp<T: Real>(v: &[T]) -> T {
    let max = v.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    let s = v.iter().fold(T::zero(), |acc, &t| acc + (t - max).exp());
    max + s.ln()
}

/// Dense kernels are cached up to this many entries; larger problems run
/// the exp-per-entry log-domain iteration directly.
const DENSE_LIMIT: usize = 1 << 24;

/// Scalings beyond `exp(ABSORB_LOG)` are folded back into the potentials.
const ABSORB_LOG: f64 = 30.0;

/// Over-relaxation factor of the pair solver; values in `(1, 2)` keep local
/// convergence and cut the iteration count several times at small `eps`.
const OVER_RELAXATION: f64 = 1.9;

struct Scratch<T> {
    eps: T,
    cost: Vec<T>,
    m: usize,
}

impl<T: Real> Scratch<T> {
    fn new(x: &[T], y: &[T], params: &SinkhornParams<T>) -> Self {
        let cost_fn = CostFn::new(params.p);
        let mut cost = Vec::with_capacity(x.len() * y.len());
        for &a in x {
            cost.extend(y.iter().map(|&b| cost_fn.eval(a - b)));
        }
        Self {
            eps: params.epsilon,
            cost,
            m: y.len(),
        }
    }

    fn c(&self, i: usize, j: usize) -> T {
        self.cost[i * self.m + j]
    }

    /// `exp((f_i + g_j - C_ij) / eps)`, row-major.
    fn kernel(&self, f: &[T], g: &[T]) -> Vec<T> {
        let mut k = Vec::with_capacity(self.cost.len());
        for (i, &fi) in f.iter().enumerate() {
            k.extend(g.iter().enumerate().map(|(j, &gj)| ((fi + gj - self.c(i, j)) / self.eps).exp()));
        }
        k
    }
}

fn exceeds_absorb<T: Real>(scalings: &[T]) -> bool {
    let limit = T::of(ABSORB_LOG);
    scalings.iter().any(|s| s.ln().abs() > limit)
}

fn healthy<T: Real>(scalings: &[T]) -> bool {
    scalings.iter().all(|s| s.is_finite() && *s > T::zero())
}

/// One exact log-domain sweep: `g` update, then `f` update. Returns the row
/// violation of the plan between the two.
fn log_sweep_pair<T: Real>(s: &Scratch<T>, f: &mut [T], g: &mut [T]) -> T {
    let (n, m) = (f.len(), g.len());
    let (log_a, log_b) = (-T::of_usize(n).ln(), -T::of_usize(m).ln());
    let a = T::one() / T::of_usize(n);
    let mut col = vec![T::zero(); n];
    for (j, gj) in g.iter_mut().enumerate() {
        for (i, slot) in col.iter_mut().enumerate() {
            *slot = log_a + (f[i] - s.c(i, j)) / s.eps;
        }
        *gj = -s.eps * log_sum_exp(&col);
    }
    let mut row = vec![T::zero(); m];
    let mut violation = T::zero();
    for (i, fi) in f.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = log_b + (g[j] - s.c(i, j)) / s.eps;
        }
        let lse = log_sum_exp(&row);
        violation = violation.max(a * ((*fi / s.eps + lse).exp() - T::one()).abs());
        *fi = -s.eps * lse;
    }
    violation
}

/// Alternating updates on the plan `P_ij = a_i b_j u_i v_j K_ij` with
/// `K_ij = exp((f_i + g_j - C_ij) / eps)`. The scalings `u, v` are absorbed
/// into `f, g` whenever they leave `[e^-30, e^30]`.
///
/// Each update is over-relaxed, `u <- u * (1 / (u t))^omega`. If the
/// scalings ever overflow the solver restarts from the log potentials with
/// `omega = 1`.
fn solve_pair<T: Real>(x: &[T], y: &[T], params: &SinkhornParams<T>) -> SinkhornOutcome<T> {
    if x.len() * y.len() > DENSE_LIMIT {
        return solve_pair_log(x, y, params);
    }
    let s = Scratch::new(x, y, params);
    let (n, m) = (x.len(), y.len());
    let (a, b) = (T::one() / T::of_usize(n), T::one() / T::of_usize(m));
    let eps = params.epsilon;

    let mut f = vec![T::zero(); n];
    let mut g = vec![T::zero(); m];
    let mut iterations = 1;
    let mut converged = log_sweep_pair(&s, &mut f, &mut g) < params.tol;
    let mut kern = s.kernel(&f, &g);
    let mut u = vec![T::one(); n];
    let mut v = vec![T::one(); m];
    let mut col = vec![T::zero(); m];
    let mut omega = T::of(OVER_RELAXATION);

    while !converged && iterations < params.max_iter {
        iterations += 1;
        col.iter_mut().for_each(|c| *c = T::zero());
        for (i, krow) in kern.chunks_exact(m).enumerate() {
            let w = a * u[i];
            for (c, &k) in col.iter_mut().zip(krow) {
                *c = *c + w * k;
            }
        }
        for (vj, &c) in v.iter_mut().zip(&col) {
            *vj = *vj * (T::one() / (*vj * c)).powf(omega);
        }
        let mut violation = T::zero();
        for (ui, krow) in u.iter_mut().zip(kern.chunks_exact(m)) {
            let t = krow.iter().zip(&v).fold(T::zero(), |acc, (&k, &vj)| acc + k * vj) * b;
            violation = violation.max(a * (*ui * t - T::one()).abs());
            *ui = *ui * (T::one() / (*ui * t)).powf(omega);
        }

        if !healthy(&u) || !healthy(&v) {
            u.iter_mut().for_each(|x| *x = T::one());
            v.iter_mut().for_each(|x| *x = T::one());
            omega = T::one();
            converged = log_sweep_pair(&s, &mut f, &mut g) < params.tol;
            kern = s.kernel(&f, &g);
            continue;
        }
        if violation < params.tol {
            converged = true;
        } else if exceeds_absorb(&u) || exceeds_absorb(&v) {
            absorb(&mut f, &mut u, eps);
            absorb(&mut g, &mut v, eps);
            kern = s.kernel(&f, &g);
        }
    }
    absorb(&mut f, &mut u, eps);
    absorb(&mut g, &mut v, eps);
    SinkhornOutcome {
        value: f.iter().copied().sum::<T>() * a + g.iter().copied().sum::<T>() * b,
        converged,
        iterations,
    }
}

fn absorb<T: Real>(potential: &mut [T], scaling: &mut [T], eps: T) {
    for (p, s) in potential.iter_mut().zip(scaling.iter_mut()) {
        *p = *p + eps * s.ln();
        *s = T::one();
    }
}

/// One averaged log-domain step `f <- (f + T(f)) / 2`; returns the row
/// violation of the plan before the step.
fn log_sweep_self<T: Real>(s: &Scratch<T>, f: &mut [T]) -> T {
    let n = f.len();
    let log_a = -T::of_usize(n).ln();
    let a = T::one() / T::of_usize(n);
    let half = T::of(0.5);
    let mut buf = vec![T::zero(); n];
    let mut next = vec![T::zero(); n];
    let mut violation = T::zero();
    for i in 0..n {
        for (j, slot) in buf.iter_mut().enumerate() {
            *slot = log_a + (f[j] - s.c(i, j)) / s.eps;
        }
        let lse = log_sum_exp(&buf);
        violation = violation.max(a * ((f[i] / s.eps + lse).exp() - T::one()).abs());
        next[i] = half * (f[i] - s.eps * lse);
    }
    f.copy_from_slice(&next);
    violation
}

/// Symmetric problem `OT_eps(x, x)` with the averaged fixed-point update
/// `f <- (f + T(f)) / 2`, which converges much faster than alternating steps.
/// In scaling form the step reads `u_i <- sqrt(u_i / (K a u)_i)`.
fn solve_self<T: Real>(x: &[T], params: &SinkhornParams<T>) -> SinkhornOutcome<T> {
    if x.len() * x.len() > DENSE_LIMIT {
        return solve_self_log(x, params);
    }
    let s = Scratch::new(x, x, params);
    let n = x.len();
    let a = T::one() / T::of_usize(n);
    let eps = params.epsilon;

    let mut f = vec![T::zero(); n];
    let mut iterations = 1;
    let mut converged = log_sweep_self(&s, &mut f) < params.tol;
    let mut kern = s.kernel(&f, &f);
    let mut u = vec![T::one(); n];
    let mut next = vec![T::one(); n];

    while !converged && iterations < params.max_iter {
        iterations += 1;
        let mut violation = T::zero();
        for (i, krow) in kern.chunks_exact(n).enumerate() {
            let t = krow.iter().zip(&u).fold(T::zero(), |acc, (&k, &uj)| acc + k * uj) * a;
            violation = violation.max(a * (u[i] * t - T::one()).abs());
            next[i] = (u[i] / t).sqrt();
        }
        if violation < params.tol {
            converged = true;
            break;
        }
        std::mem::swap(&mut u, &mut next);
        if !healthy(&u) {
            u.iter_mut().for_each(|x| *x = T::one());
            converged = log_sweep_self(&s, &mut f) < params.tol;
            kern = s.kernel(&f, &f);
        } else if exceeds_absorb(&u) {
            absorb(&mut f, &mut u, eps);
            kern = s.kernel(&f, &f);
        }
    }
    absorb(&mut f, &mut u, eps);
    SinkhornOutcome {
        value: T::of(2.0) * f.iter().copied().sum::<T>() * a,
        converged,
        iterations,
    }
}

fn solve_pair_log<T: Real>(x: &[T], y: &[T], params: &SinkhornParams<T>) -> SinkhornOutcome<T> {
    let cost = CostFn::new(params.p);
    let eps = params.epsilon;
    let (n, m) = (x.len(), y.len());
    let log_a = -T::of_usize(n).ln();
    let log_b = -T::of_usize(m).ln();
    let a = T::one() / T::of_usize(n);

    let mut f = vec![T::zero(); n];
    let mut g = vec![T::zero(); m];
    let mut col_buf = vec![T::zero(); n];
    let mut row_buf = vec![T::zero(); m];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < params.max_iter {
        iterations += 1;
        for (j, gj) in g.iter_mut().enumerate() {
            for (i, slot) in col_buf.iter_mut().enumerate() {
                *slot = log_a + (f[i] - cost.eval(x[i] - y[j])) / eps;
            }
            *gj = -eps * log_sum_exp(&col_buf);
        }
        let mut violation = T::zero();
        for (i, fi) in f.iter_mut().enumerate() {
            for (j, slot) in row_buf.iter_mut().enumerate() {
                *slot = log_b + (g[j] - cost.eval(x[i] - y[j])) / eps;
            }
            let lse = log_sum_exp(&row_buf);
            violation = violation.max(a * ((*fi / eps + lse).exp() - T::one()).abs());
            *fi = -eps * lse;
        }
        if violation < params.tol {
            converged = true;
            break;
        }
    }

    let value = f.iter().copied().sum::<T>() / T::of_usize(n) + g.iter().copied().sum::<T>() / T::of_usize(m);
    SinkhornOutcome {
        value,
        converged,
        iterations,
    }
}

fn solve_self_log<T: Real>(x: &[T], params: &SinkhornParams<T>) -> SinkhornOutcome<T> {
    let cost = CostFn::new(params.p);
    let eps = params.epsilon;
    let n = x.len();
    let log_a = -T::of_usize(n).ln();
    let a = T::one() / T::of_usize(n);
    let half = T::of(0.5);

    let mut f = vec![T::zero(); n];
    let mut next = vec![T::zero(); n];
    let mut buf = vec![T::zero(); n];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < params.max_iter {
        iterations += 1;
        let mut violation = T::zero();
        for i in 0..n {
            for (j, slot) in buf.iter_mut().enumerate() {
                *slot = log_a + (f[j] - cost.eval(x[i] - x[j])) / eps;
            }
            let lse = log_sum_exp(&buf);
            violation = violation.max(a * ((f[i] / eps + lse).exp() - T::one()).abs());
            next[i] = half * (f[i] - eps * lse);
        }
        if violation < params.tol {
            converged = true;
            break;
        }
        std::mem::swap(&mut f, &mut next);
    }

    SinkhornOutcome {
        value: T::of(2.0) * f.iter().copied().sum::<T>() / T::of_usize(n),
        converged,
        iterations,
    }
}
