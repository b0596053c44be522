//! Floating-point abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar type the library is generic over: `f32` or `f64`.
///
/// Special functions (Gamma, erf) are evaluated in double precision and cast
/// back, so `f32` instances carry `f64`-accurate constants.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Serialize + DeserializeOwned + Send + Sync + 'static
{
    /// Literal conversion from `f64`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::lit(n as f64)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon of the concrete type.
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Gamma function.
pub fn gamma<T: Real>(x: T) -> T {
    T::lit(libm::tgamma(x.as_f64()))
}

/// Natural log of the Gamma function.
pub fn ln_gamma<T: Real>(x: T) -> T {
    T::lit(libm::lgamma(x.as_f64()))
}

/// Error function.
pub fn erf<T: Real>(x: T) -> T {
    T::lit(libm::erf(x.as_f64()))
}

/// Euclidean norm of a point.
#[inline]
pub fn norm<T: Real>(x: &[T]) -> T {
    norm_sq(x).sqrt()
}

#[inline]
pub fn norm_sq<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v * v)
}

#[inline]
pub fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

#[inline]
pub fn dist<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b)).sqrt()
}

/// Logarithmically spaced grid of `n` points from `a` to `b` (both included).
pub fn log_grid<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            let step = (lb - la) / T::from_usize_lossy(n - 1);
            (0..n).map(|i| (la + step * T::from_usize_lossy(i)).exp()).collect()
        }
    }
}

/// Uniformly spaced grid of `n` points from `a` to `b` (both included).
pub fn lin_grid<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / T::from_usize_lossy(n - 1);
            (0..n).map(|i| a + step * T::from_usize_lossy(i)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_functions_in_both_precisions() {
        assert!((gamma(0.5f64) - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((gamma(0.5f32) - std::f32::consts::PI.sqrt()).abs() < 1e-6);
        let e1 = erf(1.0f64);
        assert!((e1 - 0.842_700_792_949_714_8).abs() < 1e-15, "{e1}");
        assert!((ln_gamma(5.0f64) - 24f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn grids_hit_endpoints() {
        let g = log_grid(1e-3, 10.0, 50);
        assert_eq!(g.len(), 50);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!((g[49] - 10.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let l = lin_grid(-1.0f32, 1.0, 3);
        assert_eq!(l, vec![-1.0, 0.0, 1.0]);
    }
}
