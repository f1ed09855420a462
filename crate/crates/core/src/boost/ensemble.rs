//! Multi-class members and hard/soft voting.

use crate::boost::loss::Objective;
use crate::boost::tree::{train_gbt, GbtModel, GbtParams};
use crate::error::{Error, Result};
use crate::preprocess::LabeledDataset;
use crate::scalar::Scalar;

/// A classifier that yields a probability per class.
pub trait ProbabilisticClassifier: Send + Sync {
    fn n_classes(&self) -> usize;

    /// Probability vector summing to 1.
    fn predict_proba(&self, x: &[u8]) -> Result<Vec<f64>>;

    /// Most probable class, lowest index on ties.
    fn predict(&self, x: &[u8]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(x)?))
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// One-vs-rest boosted models. A class absent from training gets probability 0.
#[derive(Debug, Clone)]
pub struct OneVsRest<T> {
    pub models: Vec<Option<GbtModel<T>>>,
}

impl<T: Scalar> OneVsRest<T> {
    pub fn train<O: Objective<T>>(
        data: &LabeledDataset,
        n_classes: usize,
        params: &GbtParams,
        objective: &O,
    ) -> Result<Self> {
        if let Some(&bad) = data.labels.iter().find(|&&y| y >= n_classes) {
            return Err(Error::InvalidInput(format!("label {bad} >= {n_classes} classes")));
        }
        let models = (0..n_classes)
            .map(|c| {
                let positives = data.labels.iter().filter(|&&y| y == c).count();
                if positives == 0 || positives == data.len() {
                    return Ok(None);
                }
                let binary = LabeledDataset {
                    rows: data.rows.clone(),
                    labels: data.labels.iter().map(|&y| usize::from(y == c)).collect(),
                    feature_domains: data.feature_domains.clone(),
                };
                train_gbt(&binary, params, objective).map(Some)
            })
            .collect::<Result<Vec<_>>>()?;
        if models.iter().all(Option::is_none) {
            return Err(Error::InvalidInput(
                "one-vs-rest training needs at least two classes".into(),
            ));
        }
        Ok(OneVsRest { models })
    }

    /// Raw per-class positive probabilities (not normalized).
    pub fn class_scores(&self, x: &[u8]) -> Result<Vec<f64>> {
        self.models
            .iter()
            .map(|m| match m {
                Some(m) => m.predict_proba(x).map(|p| p.to_f64().unwrap_or(0.0)),
                None => Ok(0.0),
            })
            .collect()
    }
}

impl<T: Scalar> ProbabilisticClassifier for OneVsRest<T> {
    fn n_classes(&self) -> usize {
        self.models.len()
    }

    fn predict_proba(&self, x: &[u8]) -> Result<Vec<f64>> {
        let s = self.class_scores(x)?;
        let total: f64 = s.iter().sum();
        if total > 0.0 {
            Ok(s.iter().map(|v| v / total).collect())
        } else {
            Ok(vec![1.0 / s.len() as f64; s.len()])
        }
    }

    /// Argmax of the raw one-vs-rest scores.
    fn predict(&self, x: &[u8]) -> Result<usize> {
        Ok(argmax(&self.class_scores(x)?))
    }
}

/// Predicts training class frequencies for every input.
#[derive(Debug, Clone)]
pub struct MajorityBaseline {
    pub priors: Vec<f64>,
}

impl MajorityBaseline {
    pub fn train(data: &LabeledDataset, n_classes: usize) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidInput("empty training data".into()));
        }
        let mut priors = vec![0.0; n_classes];
        for &y in &data.labels {
            *priors
                .get_mut(y)
                .ok_or_else(|| Error::InvalidInput(format!("label {y} >= {n_classes} classes")))? += 1.0;
        }
        let n = data.len() as f64;
        priors.iter_mut().for_each(|p| *p /= n);
        Ok(MajorityBaseline { priors })
    }
}

impl ProbabilisticClassifier for MajorityBaseline {
    fn n_classes(&self) -> usize {
        self.priors.len()
    }

    fn predict_proba(&self, _x: &[u8]) -> Result<Vec<f64>> {
        Ok(self.priors.clone())
    }
}

/// Combines member predictions.
///
/// A class backed by at least two members wins outright (plurality). When the
/// top vote count is shared, the summed probabilities decide among the tied
/// classes; when every member disagrees, they decide among all classes.
/// Remaining ties go to the lowest class index.
pub fn ensemble_vote(class_preds: &[usize], class_probs: &[Vec<f64>]) -> Result<usize> {
    if class_preds.len() < 2 || class_preds.len() != class_probs.len() {
        return Err(Error::InvalidInput(
            "voting needs >= 2 members with one prediction and one probability vector each".into(),
        ));
    }
    let k = class_probs[0].len();
    for p in class_probs {
        if p.len() != k {
            return Err(Error::InvalidInput("members disagree on the class set".into()));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("probability vector sums to {s}")));
        }
    }
    let mut votes = vec![0usize; k];
    for &c in class_preds {
        *votes
            .get_mut(c)
            .ok_or_else(|| Error::InvalidInput(format!("predicted class {c} >= {k}")))? += 1;
    }
    let top = votes.iter().copied().max().unwrap_or(0);
    let candidates: Vec<usize> = if top >= 2 {
        (0..k).filter(|&c| votes[c] == top).collect()
    } else {
        (0..k).collect()
    };
    if candidates.len() == 1 {
        return Ok(candidates[0]);
    }
    let summed: Vec<f64> = (0..k).map(|c| class_probs.iter().map(|p| p[c]).sum()).collect();
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        if summed[c] > summed[best] {
            best = c;
        }
    }
    Ok(best)
}

/// Voting ensemble over pluggable members sharing a class set.
pub struct VotingEnsemble {
    pub members: Vec<Box<dyn ProbabilisticClassifier>>,
}

impl VotingEnsemble {
    pub fn new(members: Vec<Box<dyn ProbabilisticClassifier>>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::InvalidInput("an ensemble needs at least two members".into()));
        }
        let k = members[0].n_classes();
        if members.iter().any(|m| m.n_classes() != k) {
            return Err(Error::InvalidInput("ensemble members disagree on the class set".into()));
        }
        Ok(VotingEnsemble { members })
    }

    pub fn predict(&self, x: &[u8]) -> Result<usize> {
        let mut preds = Vec::with_capacity(self.members.len());
        let mut probs = Vec::with_capacity(self.members.len());
        for m in &self.members {
            preds.push(m.predict(x)?);
            probs.push(m.predict_proba(x)?);
        }
        ensemble_vote(&preds, &probs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boost::loss::Logistic;

    #[test]
    fn hard_vote_majority() {
        let p = vec![vec![0.4, 0.3, 0.3], vec![0.5, 0.25, 0.25], vec![0.1, 0.8, 0.1]];
        assert_eq!(ensemble_vote(&[0, 0, 1], &p).unwrap(), 0);
        assert_eq!(ensemble_vote(&[0, 0], &p[..2]).unwrap(), 0);
    }

    #[test]
    fn soft_vote_when_all_disagree() {
        // summed: A 0.9, B 1.0, C 1.1
        let p = vec![vec![0.5, 0.2, 0.3], vec![0.2, 0.5, 0.3], vec![0.2, 0.3, 0.5]];
        assert_eq!(ensemble_vote(&[0, 1, 2], &p).unwrap(), 2);
        // exact ties break to the lowest index
        let p = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        assert_eq!(ensemble_vote(&[1, 0], &p).unwrap(), 0);
    }

    #[test]
    fn tied_plurality_uses_probabilities_of_tied_classes() {
        let p = vec![
            vec![0.6, 0.4, 0.0],
            vec![0.6, 0.4, 0.0],
            vec![0.0, 0.7, 0.3],
            vec![0.0, 0.7, 0.3],
        ];
        assert_eq!(ensemble_vote(&[0, 0, 1, 1], &p).unwrap(), 1);
    }

    #[test]
    fn vote_input_validation() {
        assert!(ensemble_vote(&[0], &[vec![1.0]]).is_err());
        assert!(ensemble_vote(&[0, 1], &[vec![0.5, 0.4], vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn ensemble_with_baseline() {
        let rows: Vec<Vec<u8>> = (0..30).map(|i| vec![(i % 3) as u8]).collect();
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let d = LabeledDataset::new(rows, labels, vec![3]).unwrap();
        let params = GbtParams {
            rounds: 20,
            ..GbtParams::default()
        };
        let a = OneVsRest::<f64>::train(&d, 3, &params, &Logistic).unwrap();
        let b = OneVsRest::<f64>::train(&d, 3, &GbtParams { max_depth: 1, ..params }, &Logistic).unwrap();
        let base = MajorityBaseline::train(&d, 3).unwrap();
        let e = VotingEnsemble::new(vec![Box::new(a), Box::new(b), Box::new(base)]).unwrap();
        for c in 0..3u8 {
            assert_eq!(e.predict(&[c]).unwrap(), c as usize);
        }
        assert!(VotingEnsemble::new(vec![Box::new(MajorityBaseline { priors: vec![1.0] })]).is_err());
    }
}
