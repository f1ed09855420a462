//! Weighted binary log loss and its logit derivatives.

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Scalar};

/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` before taking logs.
pub const PROB_EPS: f64 = 1e-12;

/// Negative-class weight `beta` and decision threshold `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    pub beta: f64,
    pub tau: f64,
}

impl LossParams {
    pub fn new(beta: f64, tau: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::Config(format!("beta must be finite and >= 0, got {beta}")));
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::Config(format!("tau must lie in (0, 1), got {tau}")));
        }
        Ok(LossParams { beta, tau })
    }
}

/// `1 / (1 + e^-x)`
pub fn sigmoid<T: Scalar>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// `-(1/T) Σ [y ln p + β (1 - y) ln(1 - p)]`, with `p` clamped by [`PROB_EPS`].
pub fn weighted_log_loss<T: Scalar>(y: &[usize], p: &[T], beta: T) -> Result<T> {
    if y.len() != p.len() {
        return Err(Error::InvalidInput(format!(
            "{} labels but {} probabilities",
            y.len(),
            p.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::InvalidInput("empty input".into()));
    }
    let eps: T = lit(PROB_EPS);
    let mut total = T::zero();
    for (&yi, &pi) in y.iter().zip(p) {
        if yi > 1 {
            return Err(Error::InvalidInput(format!("label {yi} is not binary")));
        }
        let pi = pi.max(eps).min(T::one() - eps);
        total += if yi == 1 { pi.ln() } else { beta * (T::one() - pi).ln() };
    }
    Ok(-total / count(y.len()))
}

/// Gradient and hessian of the per-sample weighted log loss with respect to the logit.
///
/// With `w = y + β (1 - y)`: `grad = p w - y`, `hess = p (1 - p) w`.
pub fn loss_grad_hess<T: Scalar>(y: usize, p: T, beta: T) -> (T, T) {
    let yt = if y == 1 { T::one() } else { T::zero() };
    let w = yt + beta * (T::one() - yt);
    (p * w - yt, p * (T::one() - p) * w)
}

/// Boosting objective over binary labels.
pub trait Objective<T: Scalar>: Sync {
    fn grad_hess(&self, y: usize, p: T) -> (T, T);
    fn loss(&self, y: &[usize], p: &[T]) -> Result<T>;
}

/// Plain logistic loss: `(p - y, p (1 - p))`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Logistic;

impl<T: Scalar> Objective<T> for Logistic {
    fn grad_hess(&self, y: usize, p: T) -> (T, T) {
        let yt = if y == 1 { T::one() } else { T::zero() };
        (p - yt, p * (T::one() - p))
    }

    fn loss(&self, y: &[usize], p: &[T]) -> Result<T> {
        weighted_log_loss(y, p, T::one())
    }
}

/// Weighted log loss with negative-class weight `beta`.
#[derive(Debug, Clone, Copy)]
pub struct WeightedLogLoss<T> {
    pub beta: T,
}

impl<T: Scalar> Objective<T> for WeightedLogLoss<T> {
    fn grad_hess(&self, y: usize, p: T) -> (T, T) {
        loss_grad_hess(y, p, self.beta)
    }

    fn loss(&self, y: &[usize], p: &[T]) -> Result<T> {
        weighted_log_loss(y, p, self.beta)
    }
}

/// Decision rule: positive iff `p >= tau`.
pub fn apply_threshold<T: Scalar>(p: T, tau: T) -> bool {
    p >= tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_values() {
        let l = weighted_log_loss(&[0], &[0.5f64], 2.0).unwrap();
        assert!((l - 1.386_294_361_119_890_6).abs() < 1e-12);
        let l = weighted_log_loss(&[1], &[1.0 - 1e-15f64], 3.0).unwrap();
        assert!(l < 1e-11);
        // clamped: p = 0 for a positive is finite
        assert!(weighted_log_loss(&[1], &[0.0f64], 1.0).unwrap().is_finite());
        assert!(weighted_log_loss(&[1, 0], &[0.5f64], 1.0).is_err());
        assert!(weighted_log_loss(&[2], &[0.5f64], 1.0).is_err());
    }

    #[test]
    fn grad_hess_reference() {
        assert_eq!(loss_grad_hess(0, 0.5f64, 2.0), (1.0, 0.5));
        for p in [0.1, 0.5, 0.93] {
            assert_eq!(loss_grad_hess(1, p, 7.0f64).0, p - 1.0);
            let (g, h) = loss_grad_hess(0, p, 1.0f64);
            assert_eq!((g, h), <Logistic as Objective<f64>>::grad_hess(&Logistic, 0, p));
        }
    }

    #[test]
    fn threshold_rule() {
        assert!(apply_threshold(0.6, 0.5));
        assert!(apply_threshold(0.5, 0.5));
        assert!(!apply_threshold(0.3, 0.95));
    }

    #[test]
    fn loss_params_validation() {
        assert!(LossParams::new(1.0, 0.5).is_ok());
        assert!(LossParams::new(-0.1, 0.5).is_err());
        assert!(LossParams::new(1.0, 1.0).is_err());
        assert!(LossParams::new(f64::NAN, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn beta_one_is_cross_entropy(ps in proptest::collection::vec(0.001f64..0.999, 1..30), bits in any::<u32>()) {
            let y: Vec<usize> = (0..ps.len()).map(|i| ((bits >> (i % 32)) & 1) as usize).collect();
            let ce = -y.iter().zip(&ps).map(|(&y, &p)| if y == 1 { p.ln() } else { (1.0 - p).ln() }).sum::<f64>() / ps.len() as f64;
            prop_assert!((weighted_log_loss(&y, &ps, 1.0).unwrap() - ce).abs() < 1e-12);
        }

        #[test]
        fn hessian_non_negative(y in 0usize..2, p in 0.0f64..=1.0, beta in 0.0f64..5.0) {
            prop_assert!(loss_grad_hess(y, p, beta).1 >= 0.0);
        }

        #[test]
        fn threshold_monotone(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, t1 in 0.01f64..0.99, t2 in 0.01f64..0.99) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            prop_assert!(apply_threshold(lo, t1) <= apply_threshold(hi, t1));
            let (tl, th) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(apply_threshold(p1, th) <= apply_threshold(p1, tl));
        }
    }
}
