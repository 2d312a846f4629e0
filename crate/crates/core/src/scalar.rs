//! Scalar abstraction shared by every numeric module.
//!
//! All math in the crate is written against [`Real`], which is implemented for
//! `f32` and `f64`. The CLI and the harness run in `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// One draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from the open interval (0, 1).
    fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Converts an `f64` literal. Panics only if the target cannot hold it.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Open01.sample(rng)
    }
}

impl Real for f32 {
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Open01.sample(rng)
    }
}

/// Relative tolerance used on dominance boundaries.
pub const DOMINANCE_RTOL: f64 = 1e-12;

/// `x >= y` up to a relative tolerance of [`DOMINANCE_RTOL`].
#[inline]
pub fn approx_ge<T: Real>(x: T, y: T) -> bool {
    x >= y - tol_scale(x, y)
}

/// `x > y` by more than the relative tolerance.
#[inline]
pub fn strictly_gt<T: Real>(x: T, y: T) -> bool {
    x > y + tol_scale(x, y)
}

#[inline]
fn tol_scale<T: Real>(x: T, y: T) -> T {
    T::lit(DOMINANCE_RTOL) * T::one().max(x.abs()).max(y.abs())
}

/// Euclidean norm.
pub fn norm2<T: Real>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Copy of `v` sorted in non-increasing order (NaN-free input assumed).
pub fn sorted_desc<T: Real>(v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// Index of the first maximal element. Returns 0 for an empty slice.
pub fn argmax_first<T: Real>(v: &[T]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_comparisons() {
        assert!(approx_ge(1.0_f64, 1.0));
        assert!(approx_ge(1.0_f64, 1.0 + 1e-14));
        assert!(!approx_ge(1.0_f64, 1.0 + 1e-9));
        assert!(!strictly_gt(1.0_f64, 1.0));
        assert!(strictly_gt(1.0_f64 + 1e-9, 1.0));
        assert!(approx_ge(1.0_f32, 1.0));
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax_first(&[1.0, 3.0, 3.0, 2.0]), 1);
        assert_eq!(argmax_first::<f64>(&[]), 0);
    }
}
