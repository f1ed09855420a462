//! Scalar abstraction shared by the numeric modules.
//!
//! Everything that is pure arithmetic (losses, the Gaussian process,
//! solar geometry, divergences, the utility model) is written against
//! [`Scalar`] so it runs in `f32` or `f64`. The crate root exports `f64`
//! aliases for the pipeline.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar usable by every numeric routine in the crate.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into `T`.
#[inline]
pub fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// Standard normal density.
pub fn normal_pdf<T: Scalar>(z: T) -> T {
    let inv_sqrt_2pi: T = lit(0.398_942_280_401_432_7);
    inv_sqrt_2pi * (-(z * z) / lit(2.0)).exp()
}

/// Standard normal cumulative distribution, via `erfc` for accuracy in the tails.
pub fn normal_cdf<T: Scalar>(z: T) -> T {
    let z = z.to_f64().unwrap_or(f64::NAN);
    lit(0.5 * libm::erfc(-z / std::f64::consts::SQRT_2))
}

/// Arithmetic mean; `None` for an empty slice.
pub fn mean<T: Scalar>(xs: &[T]) -> Option<T> {
    if xs.is_empty() {
        return None;
    }
    Some(xs.iter().copied().sum::<T>() / count(xs.len()))
}

/// Standard deviation with `ddof` degrees of freedom removed (0 = population).
pub fn std_dev<T: Scalar>(xs: &[T], ddof: usize) -> Option<T> {
    if xs.len() <= ddof {
        return None;
    }
    let m = mean(xs)?;
    let ss: T = xs.iter().map(|&x| (x - m) * (x - m)).sum();
    Some((ss / count(xs.len() - ddof)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_reference_values() {
        assert!((normal_pdf(0.0f64) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((normal_cdf(0.0f64) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.959_963_984_540_054f64) - 0.975).abs() < 1e-12);
        assert!((normal_cdf(-1.0f32) - 0.158_655_25).abs() < 1e-6);
    }

    #[test]
    fn std_population_and_sample() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        assert_eq!(std_dev(&xs, 0), Some(2.0));
        assert!(std_dev::<f64>(&[1.0], 1).is_none());
        assert!(mean::<f64>(&[]).is_none());
    }
}
