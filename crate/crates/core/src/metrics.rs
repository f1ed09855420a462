//! Distribution distances and load-shape correlations used for validation.

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};
use crate::scalar::{count, lit, std_dev, Scalar};

pub const DEFAULT_BINS: usize = 50;
pub const DEFAULT_KDE_GRID: usize = 512;

/// Binned probability mass over ascending edges.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution<T> {
    pub bin_edges: Vec<T>,
    pub mass: Vec<T>,
}

impl<T: Scalar> DiscreteDistribution<T> {
    pub fn new(bin_edges: Vec<T>, mass: Vec<T>) -> Result<Self> {
        if bin_edges.len() != mass.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} edges for {} bins",
                bin_edges.len(),
                mass.len()
            )));
        }
        if bin_edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("bin edges must be strictly ascending".into()));
        }
        if mass.iter().any(|&m| !(m >= T::zero())) {
            return Err(Error::InvalidInput("negative or NaN mass".into()));
        }
        let total: T = mass.iter().copied().sum();
        if (total - T::one()).abs() > lit(1e-9) {
            return Err(Error::InvalidInput(format!("mass sums to {total}")));
        }
        Ok(DiscreteDistribution { bin_edges, mass })
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(bin_edges: Vec<T>, weights: &[T]) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::InvalidInput("weights sum to zero".into()));
        }
        Self::new(bin_edges, weights.iter().map(|&w| w / total).collect())
    }

    /// Equal-width histogram over `[lo, hi]`; the last bin is closed.
    pub fn histogram(samples: &[T], lo: T, hi: T, bins: usize) -> Result<Self> {
        if samples.is_empty() || bins == 0 || !(lo < hi) {
            return Err(Error::InvalidInput(
                "histogram needs samples, bins >= 1 and lo < hi".into(),
            ));
        }
        let width = (hi - lo) / count(bins);
        let edges: Vec<T> = (0..=bins).map(|i| lo + width * count(i)).collect();
        let mut counts = vec![T::zero(); bins];
        for &x in samples {
            if x < lo || x > hi {
                return Err(Error::InvalidInput(format!("sample {x} outside [{lo}, {hi}]")));
            }
            let b = ((x - lo) / width).floor().to_usize().unwrap_or(0).min(bins - 1);
            counts[b] += T::one();
        }
        Self::from_weights(edges, &counts)
    }

    fn same_edges(&self, other: &Self) -> Result<()> {
        if self.bin_edges != other.bin_edges {
            return Err(Error::InvalidInput("distributions have different bin edges".into()));
        }
        Ok(())
    }
}

fn kld_unchecked<T: Scalar>(p: &[T], q: &[T]) -> T {
    let mut total = T::zero();
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > T::zero() {
            if qi <= T::zero() {
                return T::infinity();
            }
            total += pi * (pi / qi).log2();
        }
    }
    total.max(T::zero())
}

/// Kullback-Leibler divergence in bits; `+inf` when `q` misses part of `p`'s support.
pub fn kld<T: Scalar>(p: &DiscreteDistribution<T>, q: &DiscreteDistribution<T>) -> Result<T> {
    p.same_edges(q)?;
    Ok(kld_unchecked(&p.mass, &q.mass))
}

/// Jensen-Shannon divergence in bits, within `[0, 1]`.
pub fn jsd<T: Scalar>(p: &DiscreteDistribution<T>, q: &DiscreteDistribution<T>) -> Result<T> {
    p.same_edges(q)?;
    Ok(jsd_mass(&p.mass, &q.mass))
}

fn jsd_mass<T: Scalar>(p: &[T], q: &[T]) -> T {
    let half: T = lit(0.5);
    let m: Vec<T> = p.iter().zip(q).map(|(&a, &b)| half * (a + b)).collect();
    (half * kld_unchecked(p, &m) + half * kld_unchecked(q, &m))
        .max(T::zero())
        .min(T::one())
}

fn range<T: Scalar>(xs: &[T]) -> (T, T) {
    xs.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

/// JSD of equal-width histograms over the combined sample range.
pub fn jsd_histogram<T: Scalar>(a: &[T], b: &[T], bins: usize) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("jsd_histogram needs non-empty samples".into()));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample".into()));
    }
    let (lo_a, hi_a) = range(a);
    let (lo_b, hi_b) = range(b);
    let (lo, hi) = (lo_a.min(lo_b), hi_a.max(hi_b));
    if lo == hi {
        return Ok(T::zero());
    }
    let p = DiscreteDistribution::histogram(a, lo, hi, bins)?;
    let q = DiscreteDistribution::histogram(b, lo, hi, bins)?;
    jsd(&p, &q)
}

/// Scott's factor `n^(-1/5)`.
pub fn scott_factor<T: Scalar>(n: usize) -> T {
    T::one() / count::<T>(n).powf(lit(0.2))
}

/// Scott's bandwidth: the factor times the sample standard deviation.
pub fn scott_bandwidth<T: Scalar>(xs: &[T]) -> Result<T> {
    if xs.len() < 2 {
        return Err(Error::InvalidInput("bandwidth needs at least two samples".into()));
    }
    let sd = std_dev(xs, 1).unwrap_or(T::zero());
    if !(sd > T::zero()) {
        return Err(Error::InvalidInput(
            "zero-variance samples have no kernel bandwidth; use the histogram variant".into(),
        ));
    }
    Ok(scott_factor::<T>(xs.len()) * sd)
}

/// JSD of Gaussian kernel density estimates on a shared grid.
///
/// Side `b` always uses Scott's bandwidth. Side `a` uses the per-point
/// bandwidths when given (non-positive entries fall back to Scott's), else
/// Scott's. The grid spans both samples padded by three of the widest bandwidth.
pub fn jsd_kde<T: Scalar>(a: &[T], b: &[T], bandwidth_a: Option<&[T]>, grid: usize) -> Result<T> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidInput(
            "jsd_kde needs at least two samples per side".into(),
        ));
    }
    if grid < 2 {
        return Err(Error::InvalidInput("kde grid needs at least two points".into()));
    }
    let hb = scott_bandwidth(b)?;
    let ha: Vec<T> = match bandwidth_a {
        Some(bw) => {
            if bw.len() != a.len() {
                return Err(Error::InvalidInput(format!(
                    "{} bandwidths for {} samples",
                    bw.len(),
                    a.len()
                )));
            }
            let mut scott = None;
            bw.iter()
                .map(|&h| {
                    if h > T::zero() {
                        Ok(h)
                    } else {
                        if scott.is_none() {
                            scott = Some(scott_bandwidth(a)?);
                        }
                        Ok(scott.unwrap_or(h))
                    }
                })
                .collect::<Result<_>>()?
        }
        None => vec![scott_bandwidth(a)?; a.len()],
    };
    let hmax = ha.iter().copied().fold(hb, T::max);
    let (lo_a, hi_a) = range(a);
    let (lo_b, hi_b) = range(b);
    let pad = hmax * lit(3.0);
    let lo = lo_a.min(lo_b) - pad;
    let hi = hi_a.max(hi_b) + pad;
    let step = (hi - lo) / count(grid - 1);
    let xs: Vec<T> = (0..grid).map(|i| lo + step * count(i)).collect();
    let density = |samples: &[T], h: &dyn Fn(usize) -> T| -> Vec<T> {
        xs.iter()
            .map(|&x| {
                samples
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| {
                        let hi = h(i);
                        let z = (x - s) / hi;
                        (lit::<T>(-0.5) * z * z).exp() / hi
                    })
                    .sum()
            })
            .collect()
    };
    let da = density(a, &|i| ha[i]);
    let db = density(b, &|_| hb);
    let norm = |d: Vec<T>| -> Result<Vec<T>> {
        let total: T = d.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::Numerical("kernel density vanished on the grid".into()));
        }
        Ok(d.into_iter().map(|v| v / total).collect())
    };
    Ok(jsd_mass(&norm(da)?, &norm(db)?))
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson<T: Scalar>(a: &[T], b: &[T]) -> Result<Option<T>> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "pearson needs equal lengths >= 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n: T = count(a.len());
    let ma = a.iter().copied().sum::<T>() / n;
    let mb = b.iter().copied().sum::<T>() / n;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if !(saa > T::zero() && sbb > T::zero()) {
        return Ok(None);
    }
    Ok(Some((sab / (saa.sqrt() * sbb.sqrt())).max(-T::one()).min(T::one())))
}

/// Mean value per hour of day for each calendar month (1..=12).
pub fn aggregate_monthly<T: Scalar>(rows: &[(NaiveDate, u32, T)]) -> Result<BTreeMap<u32, [T; 24]>> {
    let mut sums: BTreeMap<u32, ([T; 24], [usize; 24])> = BTreeMap::new();
    for &(date, hour, v) in rows {
        if hour >= 24 {
            return Err(Error::InvalidInput(format!("hour {hour} out of range")));
        }
        let e = sums.entry(date.month()).or_insert(([T::zero(); 24], [0; 24]));
        e.0[hour as usize] += v;
        e.1[hour as usize] += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(m, (s, c))| {
            let mut out = [T::zero(); 24];
            for h in 0..24 {
                if c[h] > 0 {
                    out[h] = s[h] / count(c[h]);
                }
            }
            (m, out)
        })
        .collect())
}

/// Per-month correlation of the 24 aggregated hourly values.
pub fn pearson_monthly<T: Scalar>(
    a: &BTreeMap<u32, [T; 24]>,
    b: &BTreeMap<u32, [T; 24]>,
) -> Result<BTreeMap<u32, Option<T>>> {
    if !a.keys().eq(b.keys()) {
        return Err(Error::InvalidInput("series cover different months".into()));
    }
    a.iter().map(|(m, sa)| Ok((*m, pearson(sa, &b[m])?))).collect()
}

/// Average of the defined per-month correlations over many series pairs.
pub fn mean_monthly_correlation<T: Scalar>(per_pair: &[BTreeMap<u32, Option<T>>]) -> BTreeMap<u32, Option<T>> {
    let mut acc: BTreeMap<u32, (T, usize)> = BTreeMap::new();
    for pair in per_pair {
        for (&m, v) in pair {
            let e = acc.entry(m).or_insert((T::zero(), 0));
            if let Some(v) = v {
                e.0 += *v;
                e.1 += 1;
            }
        }
    }
    acc.into_iter()
        .map(|(m, (s, c))| (m, (c > 0).then(|| s / count(c))))
        .collect()
}

/// `100 |synth - real| / real`.
pub fn relative_pct_diff<T: Scalar>(real: T, synth: T) -> Result<T> {
    if !(real > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "relative difference undefined for real count {real}"
        )));
    }
    Ok(lit::<T>(100.0) * (synth - real).abs() / real)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(p: [f64; 2]) -> DiscreteDistribution<f64> {
        DiscreteDistribution::new(vec![0.0, 1.0, 2.0], p.to_vec()).unwrap()
    }

    #[test]
    fn kld_examples() {
        assert_eq!(kld(&two([0.3, 0.7]), &two([0.3, 0.7])).unwrap(), 0.0);
        assert!((kld(&two([1.0, 0.0]), &two([0.5, 0.5])).unwrap() - 1.0).abs() < 1e-15);
        assert!(kld(&two([0.5, 0.5]), &two([1.0, 0.0])).unwrap().is_infinite());
        let three = DiscreteDistribution::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.2, 0.3, 0.5]).unwrap();
        assert!(kld(&two([0.5, 0.5]), &three).is_err());
    }

    #[test]
    fn jsd_examples() {
        assert_eq!(jsd(&two([0.3, 0.7]), &two([0.3, 0.7])).unwrap(), 0.0);
        assert!((jsd(&two([1.0, 0.0]), &two([0.0, 1.0])).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distribution_validation() {
        assert!(DiscreteDistribution::new(vec![0.0, 1.0], vec![0.9]).is_err());
        assert!(DiscreteDistribution::new(vec![1.0, 0.0], vec![1.0]).is_err());
        assert!(DiscreteDistribution::new(vec![0.0, 1.0, 2.0], vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn histogram_variant() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(jsd_histogram(&a, &a, 10).unwrap(), 0.0);
        let b = [11.0, 12.0, 13.0];
        assert!((jsd_histogram(&a, &b, 10).unwrap() - 1.0f64).abs() < 1e-12);
        let rev = [4.0, 3.0, 1.0, 2.0];
        assert_eq!(jsd_histogram(&a, &b, 7).unwrap(), jsd_histogram(&rev, &b, 7).unwrap());
        assert_eq!(jsd_histogram(&[5.0], &[5.0], 7).unwrap(), 0.0);
    }

    #[test]
    fn scott() {
        assert_eq!(scott_factor::<f64>(32), 0.5);
        assert_eq!(scott_factor::<f64>(1), 1.0);
        assert!(scott_bandwidth(&[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn kde_variant() {
        let a: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        assert!(jsd_kde(&a, &a, None, 512).unwrap().abs() < 1e-9);
        let err = jsd_kde(&[2.0, 2.0], &a, None, 64).unwrap_err();
        assert!(err.to_string().contains("histogram"));
        let far: Vec<f64> = a.iter().map(|x| x + 1000.0).collect();
        assert!(jsd_kde(&a, &far, None, 512).unwrap() > 0.99);
        let bw = vec![0.0; a.len()];
        assert!(jsd_kde(&a, &a, Some(&bw), 512).unwrap().abs() < 1e-9);
    }

    #[test]
    fn pearson_cases() {
        let a: Vec<f64> = (0..24).map(|h| ((h as f64 - 12.0) / 4.0).powi(2)).collect();
        let up: Vec<f64> = a.iter().map(|x| 2.0 * x + 3.0).collect();
        let down: Vec<f64> = a.iter().map(|x| 5.0 - x).collect();
        assert!((pearson(&a, &up).unwrap().unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&a, &down).unwrap().unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&a, &[1.0; 24]).unwrap(), None);
    }

    #[test]
    fn monthly_aggregation() {
        let d = |m, day| NaiveDate::from_ymd_opt(2020, m, day).unwrap();
        let rows = vec![(d(1, 1), 12, 2.0), (d(1, 2), 12, 4.0), (d(2, 1), 3, 1.0)];
        let agg = aggregate_monthly(&rows).unwrap();
        assert_eq!(agg[&1][12], 3.0);
        assert_eq!(agg[&2][3], 1.0);
        assert_eq!(agg[&2][4], 0.0);
        let only_jan: BTreeMap<u32, [f64; 24]> = agg.iter().take(1).map(|(k, v)| (*k, *v)).collect();
        assert!(pearson_monthly(&agg, &only_jan).is_err());
        let r = pearson_monthly(&agg, &agg).unwrap();
        assert!((r[&1].unwrap() - 1.0).abs() < 1e-12);
        let mean = mean_monthly_correlation(&[r.clone(), r]);
        assert!((mean[&2].unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relative_difference() {
        assert!((relative_pct_diff(62.0, 338.0).unwrap() - 445.161_290_322_580_6f64).abs() < 1e-9);
        assert_eq!(relative_pct_diff(100.0, 85.0).unwrap(), 15.0);
        assert_eq!(relative_pct_diff(7.0, 7.0).unwrap(), 0.0);
        assert!(relative_pct_diff(0.0, 3.0).is_err());
    }
}
