//! Square-footage point estimates from a predicted class range.
//!
//! Each class range is cut into `k` equal-width sub-classes weighted by how
//! often survey dwellings fall into them. An estimate draws `M` sub-classes
//! by weight, `L` uniform values inside each, and averages all `M * L` values.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};
use crate::scalar::{count, lit, Scalar};

/// Class boundaries in ft². `bounds[c]..bounds[c + 1]` is class `c`.
///
/// The first bound is the floor of the smallest class and the last bound caps
/// the open-ended top class so it can be sampled uniformly.
#[derive(Debug, Clone, PartialEq)]
pub struct SqftClasses {
    pub bounds: Vec<f64>,
}

impl Default for SqftClasses {
    fn default() -> Self {
        SqftClasses {
            bounds: vec![100.0, 600.0, 1000.0, 1500.0, 2000.0, 2500.0, 3000.0, 4000.0, 8000.0],
        }
    }
}

impl SqftClasses {
    pub fn new(bounds: Vec<f64>) -> Result<Self> {
        if bounds.len() < 2 || bounds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("sqft class bounds must be strictly ascending".into()));
        }
        Ok(SqftClasses { bounds })
    }

    /// Replaces the cap of the open-ended top class.
    pub fn with_cap(mut self, cap: f64) -> Result<Self> {
        let n = self.bounds.len();
        self.bounds[n - 1] = cap;
        SqftClasses::new(self.bounds)
    }

    pub fn n_classes(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn range(&self, class: usize) -> (f64, f64) {
        (self.bounds[class], self.bounds[class + 1])
    }

    /// Class containing `value`; values beyond the ends land in the end classes.
    pub fn classify(&self, value: f64) -> usize {
        let n = self.n_classes();
        (1..n).take_while(|&c| value >= self.bounds[c]).count()
    }
}

/// Sub-class weights over an equal-width tiling of `[low, high)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubclassWeights<T> {
    pub low: T,
    pub high: T,
    pub weights: Vec<T>,
}

impl<T: Scalar> SubclassWeights<T> {
    pub fn new(low: T, high: T, weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() || !(low <= high) {
            return Err(Error::InvalidInput("need k >= 1 and low <= high".into()));
        }
        if weights.iter().any(|w| !(*w >= T::zero())) {
            return Err(Error::InvalidInput("sub-class weights must be >= 0".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > lit(1e-9) {
            return Err(Error::InvalidInput(format!("sub-class weights sum to {total}, not 1")));
        }
        Ok(SubclassWeights { low, high, weights })
    }

    /// Equal weights over `k` sub-classes.
    pub fn uniform(low: T, high: T, k: usize) -> Result<Self> {
        let w = T::one() / count(k.max(1));
        SubclassWeights::new(low, high, vec![w; k])
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn width(&self) -> T {
        (self.high - self.low) / count(self.k())
    }

    /// Bounds of sub-class `j`.
    pub fn subclass(&self, j: usize) -> (T, T) {
        let w = self.width();
        (self.low + count::<T>(j) * w, self.low + count::<T>(j + 1) * w)
    }

    /// Shifts every sub-interval by `c`.
    pub fn translated(&self, c: T) -> Self {
        SubclassWeights {
            low: self.low + c,
            high: self.high + c,
            weights: self.weights.clone(),
        }
    }
}

/// Frequency weights of `survey` values over `k` equal-width sub-classes of `range`.
pub fn subclass_weights<T: Scalar>(survey: &[T], range: (T, T), k: usize) -> Result<SubclassWeights<T>> {
    let (low, high) = range;
    if k == 0 || !(low < high) {
        return Err(Error::InvalidInput("need k >= 1 and low < high".into()));
    }
    let width = (high - low) / count(k);
    let mut counts = vec![0usize; k];
    for &v in survey {
        if v >= low && v < high {
            let j = ((v - low) / width).floor().to_usize().unwrap_or(0).min(k - 1);
            counts[j] += 1;
        }
    }
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::InvalidInput(format!(
            "no survey values in [{low}, {high}); enable the uniform fallback"
        )));
    }
    let weights = counts.iter().map(|&c| count::<T>(c) / count(total)).collect();
    SubclassWeights::new(low, high, weights)
}

fn pick_weighted<T: Scalar, R: Rng + ?Sized>(weights: &[T], rng: &mut R) -> usize {
    let total: T = weights.iter().copied().sum();
    let u: T = lit::<T>(rng.random::<f64>()) * total;
    let mut acc = T::zero();
    for (j, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return j;
        }
    }
    // rounding left u at the very top; return the last positive weight
    weights
        .iter()
        .rposition(|w| *w > T::zero())
        .unwrap_or(weights.len() - 1)
}

/// Mean of `m * l` draws: `m` weighted sub-classes, `l` uniform values in each.
pub fn estimate_sqft<T: Scalar, R: Rng + ?Sized>(w: &SubclassWeights<T>, m: usize, l: usize, rng: &mut R) -> T {
    let m = m.max(1);
    let l = l.max(1);
    let width = w.width();
    // Accumulate offsets from `low` so a translated range gives a translated estimate.
    let mut sum = T::zero();
    for _ in 0..m {
        let j = pick_weighted(&w.weights, rng);
        let base = count::<T>(j) * width;
        for _ in 0..l {
            sum += base + lit::<T>(rng.random::<f64>()) * width;
        }
    }
    let est = w.low + sum / count(m * l);
    est.max(w.low).min(w.high)
}

/// Per-class weights built once from survey data, applied per household.
#[derive(Debug, Clone)]
pub struct SqftEstimator {
    pub classes: SqftClasses,
    pub per_class: Vec<SubclassWeights<f64>>,
    pub draws_m: usize,
    pub draws_l: usize,
}

impl SqftEstimator {
    /// Builds sub-class weights for every class from survey ft² values.
    ///
    /// A class with no survey values is an error unless `uniform_fallback` is set.
    pub fn from_survey(
        classes: SqftClasses,
        survey: &[f64],
        k: usize,
        draws_m: usize,
        draws_l: usize,
        uniform_fallback: bool,
    ) -> Result<Self> {
        let per_class = (0..classes.n_classes())
            .map(|c| {
                let range = classes.range(c);
                match subclass_weights(survey, range, k) {
                    Ok(w) => Ok(w),
                    Err(_) if uniform_fallback => SubclassWeights::uniform(range.0, range.1, k),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SqftEstimator {
            classes,
            per_class,
            draws_m,
            draws_l,
        })
    }

    /// Estimate for household `id` of class `class`, seeded by `(seed, id)`.
    pub fn estimate(&self, class: usize, seed: u64, id: u64) -> Result<f64> {
        let w = self
            .per_class
            .get(class)
            .ok_or_else(|| Error::InvalidInput(format!("sqft class {class} out of range")))?;
        let mut rng = stream(seed, Purpose::SqftEstimate, id);
        Ok(estimate_sqft(w, self.draws_m, self.draws_l, &mut rng))
    }
}
