//! Gaussian-process regression with a fixed squared-exponential kernel.

use crate::error::{Error, Result};
use crate::scalar::{lit, normal_cdf, normal_pdf, Scalar};

/// `k(a, b) = signal_var * exp(-½ Σ ((a_d - b_d) / length_d)²)`, plus
/// `noise_var` on the diagonal of the training covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpKernel<T, const D: usize> {
    pub signal_var: T,
    pub length_scales: [T; D],
    pub noise_var: T,
}

impl<T: Scalar, const D: usize> GpKernel<T, D> {
    pub fn eval(&self, a: &[T; D], b: &[T; D]) -> T {
        let mut r2 = T::zero();
        for d in 0..D {
            let z = (a[d] - b[d]) / self.length_scales[d];
            r2 += z * z;
        }
        self.signal_var * (lit::<T>(-0.5) * r2).exp()
    }

    fn validate(&self) -> Result<()> {
        let ok = self.signal_var > T::zero()
            && self.signal_var.is_finite()
            && self.noise_var >= T::zero()
            && self.length_scales.iter().all(|&l| l > T::zero() && l.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid kernel hyperparameters {self:?}")))
        }
    }
}

/// Fitted posterior. The prior mean is the mean of the observed values.
#[derive(Debug, Clone)]
pub struct GpModel<T, const D: usize> {
    pub points: Vec<[T; D]>,
    pub values: Vec<T>,
    pub kernel: GpKernel<T, D>,
    pub prior_mean: T,
    /// Jitter that was added to the diagonal to make the factorization succeed.
    pub jitter: T,
    chol: Vec<T>,
    alpha: Vec<T>,
}

/// In-place lower Cholesky factor of a row-major `n × n` matrix. Pivots at or
/// below `floor` count as failure.
fn cholesky<T: Scalar>(a: &mut [T], n: usize, floor: T) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > floor) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
        for k in j + 1..n {
            a[j * n + k] = T::zero();
        }
    }
    true
}

fn forward<T: Scalar>(l: &[T], n: usize, b: &mut [T]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

fn backward<T: Scalar>(l: &[T], n: usize, b: &mut [T]) {
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

pub fn gp_fit<T: Scalar, const D: usize>(
    points: &[[T; D]],
    values: &[T],
    kernel: GpKernel<T, D>,
) -> Result<GpModel<T, D>> {
    kernel.validate()?;
    if points.is_empty() || points.len() != values.len() {
        return Err(Error::InvalidInput(format!(
            "need >= 1 observation with matching values, got {} points and {} values",
            points.len(),
            values.len()
        )));
    }
    let n = points.len();
    let prior_mean = values.iter().copied().sum::<T>() / lit(n as f64);
    let mut base = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let k = kernel.eval(&points[i], &points[j]);
            base[i * n + j] = k;
            base[j * n + i] = k;
        }
        base[i * n + i] += kernel.noise_var;
    }
    let mut jitter = T::zero();
    let mut step = kernel.signal_var * lit(1e-12);
    let max_jitter = kernel.signal_var * lit(1e-2);
    let floor = kernel.signal_var * lit(1e-13);
    let chol = loop {
        let mut a = base.clone();
        for i in 0..n {
            a[i * n + i] += jitter;
        }
        if cholesky(&mut a, n, floor) {
            break a;
        }
        if jitter >= max_jitter {
            return Err(Error::Numerical(format!(
                "kernel matrix not positive definite after jitter {jitter:?}"
            )));
        }
        jitter = step;
        step *= lit(10.0);
    };
    let mut alpha: Vec<T> = values.iter().map(|&v| v - prior_mean).collect();
    forward(&chol, n, &mut alpha);
    backward(&chol, n, &mut alpha);
    Ok(GpModel {
        points: points.to_vec(),
        values: values.to_vec(),
        kernel,
        prior_mean,
        jitter,
        chol,
        alpha,
    })
}

/// Posterior mean and standard deviation at `x`.
pub fn gp_predict<T: Scalar, const D: usize>(gp: &GpModel<T, D>, x: &[T; D]) -> (T, T) {
    let n = gp.points.len();
    let mut k: Vec<T> = gp.points.iter().map(|p| gp.kernel.eval(p, x)).collect();
    let mu = gp.prior_mean + k.iter().zip(&gp.alpha).map(|(&a, &b)| a * b).sum::<T>();
    forward(&gp.chol, n, &mut k);
    let var = gp.kernel.signal_var - k.iter().map(|&v| v * v).sum::<T>();
    // cancellation leaves O(eps) residue at training points
    let var = if var <= gp.kernel.signal_var * lit(1e-12) {
        T::zero()
    } else {
        var
    };
    (mu, var.sqrt())
}

/// Expected improvement below `f_min` for a Gaussian with mean `mu` and std `sigma`.
pub fn expected_improvement<T: Scalar>(mu: T, sigma: T, f_min: T) -> T {
    let gap = f_min - mu;
    if !(sigma > T::zero()) {
        return gap.max(T::zero());
    }
    let z = gap / sigma;
    (gap * normal_cdf(z) + sigma * normal_pdf(z)).max(T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(noise: f64) -> GpKernel<f64, 2> {
        GpKernel {
            signal_var: 2.0,
            length_scales: [0.5, 0.2],
            noise_var: noise,
        }
    }

    #[test]
    fn single_point_interpolates() {
        let gp = gp_fit(&[[1.0, 0.5]], &[3.25], kernel(0.0)).unwrap();
        let (mu, sd) = gp_predict(&gp, &[1.0, 0.5]);
        assert!((mu - 3.25).abs() < 1e-9);
        assert!(sd < 1e-9);
    }

    #[test]
    fn reverts_to_prior_far_away() {
        let gp = gp_fit(&[[0.0, 0.0], [0.1, 0.1]], &[1.0, 3.0], kernel(1e-6)).unwrap();
        let (mu, sd) = gp_predict(&gp, &[100.0, 100.0]);
        assert!((mu - 2.0).abs() < 1e-12);
        assert!((sd * sd - 2.0).abs() < 1e-12);
    }

    #[test]
    fn duplicate_points_need_jitter() {
        let gp = gp_fit(&[[0.3, 0.3], [0.3, 0.3]], &[1.0, 2.0], kernel(0.0)).unwrap();
        assert!(gp.jitter > 0.0);
        let (mu, sd) = gp_predict(&gp, &[0.3, 0.3]);
        assert!(mu.is_finite() && sd.is_finite());
    }

    #[test]
    fn isotropic_symmetry() {
        let k = GpKernel {
            signal_var: 1.0,
            length_scales: [0.3, 0.3],
            noise_var: 1e-6,
        };
        let gp = gp_fit(&[[0.0, 0.0]], &[1.0], k).unwrap();
        let a: f64 = gp_predict(&gp, &[0.2, 0.0]).1;
        let b = gp_predict(&gp, &[0.0, -0.2]).1;
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn invalid_inputs() {
        assert!(gp_fit::<f64, 2>(&[], &[], kernel(0.0)).is_err());
        assert!(gp_fit(&[[0.0, 0.0]], &[1.0, 2.0], kernel(0.0)).is_err());
        let mut k = kernel(0.0);
        k.length_scales[1] = 0.0;
        assert!(gp_fit(&[[0.0, 0.0]], &[1.0], k).is_err());
    }

    #[test]
    fn ei_reference_values() {
        assert!((expected_improvement(1.0f64, 1.0, 1.0) - 0.398_942_280_401_432_7).abs() < 1e-9);
        assert_eq!(expected_improvement(2.0f64, 0.0, 1.0), 0.0);
        assert_eq!(expected_improvement(1.0f64, 0.0, 1.0), 0.0);
        assert_eq!(expected_improvement(-1.0f64, 0.0, 1.0), 2.0);
    }
}
