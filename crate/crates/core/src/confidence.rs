//! Concentration radii and the simplex subproblems behind the elimination tests.
//!
//! Logarithms are natural throughout.

use thiserror::Error;

use crate::scalar::{argmax_first, dot, norm2, sorted_desc, Real};

#[derive(Debug, Error, PartialEq)]
pub enum ConfidenceError {
    #[error("confidence level must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("sample count must be at least 1")]
    ZeroCount,
    #[error("no simplex pair separates the two mean vectors")]
    NoSeparation,
    #[error("simplex weights must be non-negative and sum to 1")]
    NotOnSimplex,
}

/// Half-width of a confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Radius<T>(pub T);

impl<T: Real> Radius<T> {
    pub fn value(self) -> T {
        self.0
    }
}

fn check<T: Real>(n: usize, delta: T) -> Result<(), ConfidenceError> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(ConfidenceError::InvalidDelta(delta.as_f64()));
    }
    if n == 0 {
        return Err(ConfidenceError::ZeroCount);
    }
    Ok(())
}

/// `sqrt(2 log(1/delta) / n)`.
pub fn hoeffding_radius<T: Real>(n: usize, delta: T) -> Result<Radius<T>, ConfidenceError> {
    check(n, delta)?;
    Ok(Radius((T::lit(2.0) * (-delta.ln()) / T::from_count(n)).sqrt()))
}

/// `sqrt((2/p) (K log 2 + log(1/delta)))`, uniform over directions for a
/// `K`-dimensional mean vector estimated from `p` pulls per coordinate.
pub fn beta<T: Real>(p: usize, delta: T, k: usize) -> Result<Radius<T>, ConfidenceError> {
    check(p, delta)?;
    let inner = T::from_count(k) * T::lit(std::f64::consts::LN_2) - delta.ln();
    Ok(Radius((T::lit(2.0) / T::from_count(p) * inner).sqrt()))
}

/// `(sqrt(K log(1/delta)) + sqrt(1 + (K+1) log K)) / sqrt(2p)`, the radius of
/// the sorted empirical mean vector around the sorted truth.
pub fn gamma<T: Real>(p: usize, delta: T, k: usize) -> Result<Radius<T>, ConfidenceError> {
    check(p, delta)?;
    let kf = T::from_count(k);
    let a = (kf * (-delta.ln())).sqrt();
    let b = (T::one() + (kf + T::one()) * kf.ln()).sqrt();
    Ok(Radius((a + b) / (T::lit(2.0) * T::from_count(p)).sqrt()))
}

/// `2 sqrt(log n / n)`; 0 at `n = 1` and infinite for an unpulled arm.
pub fn sparse_activation_threshold<T: Real>(n: usize) -> Radius<T> {
    if n == 0 {
        return Radius(T::infinity());
    }
    let nf = T::from_count(n);
    Radius(T::lit(2.0) * (nf.ln() / nf).sqrt())
}

/// Point of the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint<T> {
    weights: Vec<T>,
}

impl<T: Real> SimplexPoint<T> {
    /// Clips entries in `[-1e-12, 0)` to 0 and checks `|sum - 1| <= 1e-9`.
    pub fn new(mut weights: Vec<T>) -> Result<Self, ConfidenceError> {
        for w in &mut weights {
            if *w < T::zero() {
                if *w >= T::lit(-1e-12) {
                    *w = T::zero();
                } else {
                    return Err(ConfidenceError::NotOnSimplex);
                }
            }
        }
        let s: T = weights.iter().copied().sum();
        if weights.is_empty() || (s - T::one()).abs() > T::lit(1e-9).max(T::epsilon() * T::lit(16.0)) {
            return Err(ConfidenceError::NotOnSimplex);
        }
        Ok(Self { weights })
    }

    pub fn vertex(k: usize, i: usize) -> Self {
        let mut weights = vec![T::zero(); k];
        weights[i] = T::one();
        Self { weights }
    }

    pub fn uniform(k: usize) -> Self {
        Self { weights: vec![T::one() / T::from_count(k); k] }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

/// Optimal value and an optimiser of a simplex subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSolution<T> {
    pub value: T,
    pub point: SimplexPoint<T>,
}

/// Iteration cap of the Frank-Wolfe solver.
pub const FW_MAX_ITERS: usize = 2000;
/// Duality-gap stopping threshold of the Frank-Wolfe solver.
pub const FW_GAP_TOL: f64 = 1e-8;

/// `max_{x in simplex} <x, v> - c ||x||_2`.
///
/// Frank-Wolfe with away steps and exact line search, started at the uniform
/// point. The objective is concave, the linear oracle is a vertex pick, and
/// the reported value is that of a feasible point, so it never overshoots the
/// true maximum.
pub fn max_linear_minus_norm<T: Real>(v: &[T], c: T) -> SimplexSolution<T> {
    let k = v.len();
    assert!(k > 0, "empty vector");
    let c = c.max(T::zero());
    let objective = |x: &[T]| dot(x, v) - c * norm2(x);

    let mut x = vec![T::one() / T::from_count(k); k];
    let gap_tol = T::lit(FW_GAP_TOL);
    let mut grad = vec![T::zero(); k];
    let mut dir = vec![T::zero(); k];

    for _ in 0..FW_MAX_ITERS {
        let nx = norm2(&x);
        for i in 0..k {
            grad[i] = v[i] - c * x[i] / nx;
        }
        let gx = dot(&grad, &x);
        let s = argmax_first(&grad);
        let fw_gap = grad[s] - gx;
        if fw_gap <= gap_tol {
            break;
        }
        // Away vertex: worst gradient entry on the support.
        let mut away = s;
        let mut worst = T::infinity();
        for i in 0..k {
            if x[i] > T::zero() && grad[i] < worst {
                worst = grad[i];
                away = i;
            }
        }
        let away_gap = gx - worst;
        let max_step = if fw_gap >= away_gap || x[away] >= T::one() {
            for i in 0..k {
                dir[i] = -x[i];
            }
            dir[s] = dir[s] + T::one();
            T::one()
        } else {
            dir.copy_from_slice(&x);
            dir[away] = dir[away] - T::one();
            x[away] / (T::one() - x[away])
        };
        let step = line_search(&x, &dir, v, c, max_step);
        if step <= T::zero() {
            break;
        }
        for i in 0..k {
            x[i] = (x[i] + step * dir[i]).max(T::zero());
        }
        if step == max_step && max_step < T::one() {
            x[away] = T::zero();
        }
        let total: T = x.iter().copied().sum();
        x.iter_mut().for_each(|w| *w = *w / total);
    }

    SimplexSolution { value: objective(&x), point: SimplexPoint { weights: x } }
}

/// Maximises the concave `phi(g) = <x + g d, v> - c ||x + g d||` on `[0, max_step]`
/// by bisection on the (non-increasing) derivative.
fn line_search<T: Real>(x: &[T], d: &[T], v: &[T], c: T, max_step: T) -> T {
    let dv = dot(d, v);
    let deriv = |g: T| {
        let z: Vec<T> = x.iter().zip(d).map(|(&a, &b)| a + g * b).collect();
        let nz = norm2(&z);
        if nz <= T::zero() {
            return dv;
        }
        dv - c * dot(&z, d) / nz
    };
    if deriv(T::zero()) <= T::zero() {
        return T::zero();
    }
    if deriv(max_step) >= T::zero() {
        return max_step;
    }
    let (mut lo, mut hi) = (T::zero(), max_step);
    for _ in 0..100 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if deriv(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// Same maximum as [`max_linear_minus_norm`], solved exactly: the optimum is
/// `x ∝ (v - lambda)_+` with `lambda` the root of `||(v - lambda)_+||_2 = c`.
pub fn max_linear_minus_norm_exact<T: Real>(v: &[T], c: T) -> SimplexSolution<T> {
    let k = v.len();
    assert!(k > 0, "empty vector");
    let c = c.max(T::zero());
    if c <= T::zero() {
        let best = argmax_first(v);
        return SimplexSolution { value: v[best], point: SimplexPoint::vertex(k, best) };
    }
    let sorted = sorted_desc(v);
    let (mut s1, mut s2) = (T::zero(), T::zero());
    let mut lambda = sorted[0] - c;
    for j in 1..=k {
        let vj = sorted[j - 1];
        s1 = s1 + vj;
        s2 = s2 + vj * vj;
        let n = T::from_count(j);
        let disc = (s1 * s1 - n * (s2 - c * c)).max(T::zero());
        let root = (s1 - disc.sqrt()) / n;
        if j == k || root >= sorted[j] {
            lambda = root.min(vj);
            break;
        }
    }
    let pos: Vec<T> = v.iter().map(|&x| (x - lambda).max(T::zero())).collect();
    let l1: T = pos.iter().copied().sum();
    let x: Vec<T> = if l1 > T::zero() {
        pos.iter().map(|&w| w / l1).collect()
    } else {
        SimplexPoint::vertex(k, argmax_first(v)).weights
    };
    SimplexSolution { value: dot(&x, v) - c * norm2(&x), point: SimplexPoint { weights: x } }
}

/// `min_{y in simplex} <y, v> + c ||y||_2` through the exact solver.
pub fn min_linear_plus_norm_exact<T: Real>(v: &[T], c: T) -> SimplexSolution<T> {
    let neg: Vec<T> = v.iter().map(|&x| -x).collect();
    let sol = max_linear_minus_norm_exact(&neg, c);
    SimplexSolution { value: -sol.value, point: sol.point }
}

/// `min_{y in simplex} <y, v> + c ||y||_2`, as `-max(<y, -v> - c ||y||)`.
pub fn min_linear_plus_norm<T: Real>(v: &[T], c: T) -> SimplexSolution<T> {
    let neg: Vec<T> = v.iter().map(|&x| -x).collect();
    let sol = max_linear_minus_norm(&neg, c);
    SimplexSolution { value: -sol.value, point: sol.point }
}

/// `max_{x in simplex} <x, d> / ||x||_2`.
///
/// If some `d_k >= 0` the maximum is `||d_+||_2`, reached at `x` proportional to
/// the positive part; otherwise it is `max_k d_k`, reached at a vertex.
pub fn ratio_max<T: Real>(d: &[T]) -> SimplexSolution<T> {
    let k = d.len();
    assert!(k > 0, "empty vector");
    let best = argmax_first(d);
    if d[best] > T::zero() {
        let pos: Vec<T> = d.iter().map(|&x| x.max(T::zero())).collect();
        let l1: T = pos.iter().copied().sum();
        return SimplexSolution {
            value: norm2(&pos),
            point: SimplexPoint { weights: pos.iter().map(|&x| x / l1).collect() },
        };
    }
    SimplexSolution { value: d[best], point: SimplexPoint::vertex(k, best) }
}

/// Integer lattice `{x : x_i = n_i / n, sum n_i = n}` of the `k`-simplex.
pub fn simplex_lattice<T: Real>(k: usize, n: usize) -> Vec<Vec<T>> {
    fn rec(k: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for i in 0..=left {
            prefix.push(i);
            rec(k - 1, left - i, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    rec(k, n, &mut Vec::with_capacity(k), &mut raw);
    let nf = T::from_count(n.max(1));
    raw.into_iter()
        .map(|p| p.into_iter().map(|i| T::from_count(i) / nf).collect())
        .collect()
}

/// Finest lattice resolution whose point count stays within `budget`.
pub fn lattice_resolution(k: usize, budget: usize) -> usize {
    let count = |n: usize| -> usize {
        // C(n + k - 1, k - 1) with early exit on overflow of the budget.
        let mut c: u128 = 1;
        for i in 1..k {
            c = c * (n + i) as u128 / i as u128;
            if c > budget as u128 {
                return usize::MAX;
            }
        }
        c as usize
    };
    let mut n = 1;
    while n < 400 && count(n + 1) <= budget {
        n += 1;
    }
    n
}

/// `8 (K log 2 + log(1/delta)) * min_{x,y} ((||x|| + ||y||) / (<x, a> - <y, b>))^2`,
/// minimised over a simplex lattice on each side (vertices included). Predicts
/// how many rounds strong elimination of `b` by `a` needs on the clean event.
/// Fails unless `a` strongly dominates `b` with some separating pair.
pub fn elimination_round_bound<T: Real>(
    mu_a: &[T],
    mu_b: &[T],
    delta: T,
    k: usize,
) -> Result<T, ConfidenceError> {
    check(1, delta)?;
    if !crate::dominance::strongly_dominates(mu_a, mu_b) {
        return Err(ConfidenceError::NoSeparation);
    }
    let side = |dim: usize, mu: &[T]| -> Vec<(T, T)> {
        simplex_lattice::<T>(dim, lattice_resolution(dim, 400))
            .iter()
            .map(|x| (dot(x, mu), norm2(x)))
            .collect()
    };
    let xs = side(mu_a.len(), mu_a);
    let ys = side(mu_b.len(), mu_b);
    let mut best = T::infinity();
    for &(xa, nx) in &xs {
        for &(yb, ny) in &ys {
            let sep = xa - yb;
            if sep > T::zero() {
                let r = (nx + ny) / sep;
                best = best.min(r * r);
            }
        }
    }
    if !best.is_finite() {
        return Err(ConfidenceError::NoSeparation);
    }
    let lead = T::from_count(k) * T::lit(std::f64::consts::LN_2) - delta.ln();
    Ok(T::lit(8.0) * lead * best)
}
