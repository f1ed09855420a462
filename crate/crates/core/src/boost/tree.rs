//! Newton-boosted regression trees over ordinal categorical codes.
//!
//! Splits test `x[feature] <= code`. Leaf weights are `-G / (H + λ)` scaled by
//! the learning rate; split gain is the usual second-order gain
//! `½ [G_L²/(H_L+λ) + G_R²/(H_R+λ) - G²/(H+λ)] - γ`. Split search is exact
//! over every code boundary, features scanned in order, first best kept.

use crate::boost::loss::{sigmoid, Objective};
use crate::error::{Error, Result};
use crate::preprocess::LabeledDataset;
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum Node<T> {
    /// `x[feature] <= code` goes left.
    Split {
        feature: usize,
        code: u8,
        left: usize,
        right: usize,
    },
    Leaf {
        value: T,
    },
}

/// Tree stored as a node arena with the root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree<T> {
    pub nodes: Vec<Node<T>>,
}

impl<T: Scalar> Tree<T> {
    pub fn leaf_value(&self, x: &[u8]) -> T {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    code,
                    left,
                    right,
                } => i = if x[*feature] <= *code { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go<T>(nodes: &[Node<T>], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbtParams {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// L2 penalty on leaf weights.
    pub lambda: f64,
    /// Minimum hessian sum per child.
    pub min_child_weight: f64,
    /// Minimum gain to split.
    pub gamma: f64,
    /// Initial logit.
    pub base_score: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            rounds: 100,
            max_depth: 3,
            learning_rate: 0.3,
            lambda: 1.0,
            min_child_weight: 1.0,
            gamma: 0.0,
            base_score: 0.0,
        }
    }
}

impl GbtParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0)
            || !(self.lambda >= 0.0)
            || !(self.min_child_weight >= 0.0)
            || !(self.gamma >= 0.0)
        {
            return Err(Error::Config(
                "learning_rate must be > 0; lambda, min_child_weight, gamma >= 0".into(),
            ));
        }
        if !self.base_score.is_finite() {
            return Err(Error::Config("base_score must be finite".into()));
        }
        Ok(())
    }
}

/// Binary boosted model producing a positive-class probability.
#[derive(Debug, Clone, PartialEq)]
pub struct GbtModel<T> {
    pub trees: Vec<Tree<T>>,
    pub learning_rate: T,
    pub base_score: T,
    pub feature_domains: Vec<usize>,
}

impl<T: Scalar> GbtModel<T> {
    fn check(&self, x: &[u8]) -> Result<()> {
        if x.len() != self.feature_domains.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} features, got {}",
                self.feature_domains.len(),
                x.len()
            )));
        }
        for (f, (&code, &domain)) in x.iter().zip(&self.feature_domains).enumerate() {
            if code as usize >= domain {
                return Err(Error::OutOfDomain {
                    feature: f,
                    code,
                    domain,
                });
            }
        }
        Ok(())
    }

    /// Summed logit of the first `rounds` trees.
    pub fn logit_at(&self, x: &[u8], rounds: usize) -> T {
        self.base_score + self.trees.iter().take(rounds).map(|t| t.leaf_value(x)).sum::<T>()
    }

    pub fn predict_logit(&self, x: &[u8]) -> Result<T> {
        self.check(x)?;
        Ok(self.logit_at(x, self.trees.len()))
    }

    pub fn predict_proba(&self, x: &[u8]) -> Result<T> {
        self.predict_logit(x).map(sigmoid)
    }

    /// Probabilities for every row; rows must already be validated in-domain.
    pub fn predict_all(&self, rows: &[Vec<u8>]) -> Result<Vec<T>> {
        rows.iter().map(|r| self.predict_proba(r)).collect()
    }
}

struct Split<T> {
    feature: usize,
    code: u8,
    gain: T,
}

struct Builder<'a, T> {
    rows: &'a [Vec<u8>],
    domains: &'a [usize],
    grad: &'a [T],
    hess: &'a [T],
    lambda: T,
    min_child_weight: T,
    gamma: T,
    learning_rate: T,
    max_depth: usize,
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> Builder<'_, T> {
    fn score(&self, g: T, h: T) -> T {
        g * g / (h + self.lambda)
    }

    fn best_split(&self, idx: &[usize], g_tot: T, h_tot: T) -> Option<Split<T>> {
        let half: T = lit(0.5);
        let parent = self.score(g_tot, h_tot);
        let mut best: Option<Split<T>> = None;
        for (f, &domain) in self.domains.iter().enumerate() {
            let mut gs = vec![T::zero(); domain];
            let mut hs = vec![T::zero(); domain];
            let mut ns = vec![0usize; domain];
            for &i in idx {
                let c = self.rows[i][f] as usize;
                gs[c] += self.grad[i];
                hs[c] += self.hess[i];
                ns[c] += 1;
            }
            let (mut gl, mut hl, mut nl) = (T::zero(), T::zero(), 0usize);
            for c in 0..domain.saturating_sub(1) {
                gl += gs[c];
                hl += hs[c];
                nl += ns[c];
                if ns[c] == 0 {
                    continue;
                }
                let (gr, hr, nr) = (g_tot - gl, h_tot - hl, idx.len() - nl);
                if nl == 0 || nr == 0 || hl < self.min_child_weight || hr < self.min_child_weight {
                    continue;
                }
                let gain = half * (self.score(gl, hl) + self.score(gr, hr) - parent) - self.gamma;
                if gain > T::zero() && best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(Split {
                        feature: f,
                        code: c as u8,
                        gain,
                    });
                }
            }
        }
        best
    }

    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let g: T = idx.iter().map(|&i| self.grad[i]).sum();
        let h: T = idx.iter().map(|&i| self.hess[i]).sum();
        let at = self.nodes.len();
        let split = if depth < self.max_depth {
            self.best_split(&idx, g, h)
        } else {
            None
        };
        match split {
            None => {
                let value = -g / (h + self.lambda) * self.learning_rate;
                self.nodes.push(Node::Leaf { value });
            }
            Some(s) => {
                self.nodes.push(Node::Leaf { value: T::zero() });
                let (l, r): (Vec<usize>, Vec<usize>) =
                    idx.into_iter().partition(|&i| self.rows[i][s.feature] <= s.code);
                let left = self.build(l, depth + 1);
                let right = self.build(r, depth + 1);
                self.nodes[at] = Node::Split {
                    feature: s.feature,
                    code: s.code,
                    left,
                    right,
                };
            }
        }
        at
    }
}

/// Trains a binary boosted model on labels `{0, 1}`.
///
/// Training is deterministic: no row or column subsampling is performed.
pub fn train_gbt<T: Scalar, O: Objective<T>>(
    data: &LabeledDataset,
    params: &GbtParams,
    objective: &O,
) -> Result<GbtModel<T>> {
    params.validate()?;
    if let Some(&bad) = data.labels.iter().find(|&&y| y > 1) {
        return Err(Error::InvalidInput(format!("binary training got label {bad}")));
    }
    let positives = data.labels.iter().filter(|&&y| y == 1).count();
    if positives == 0 || positives == data.len() {
        return Err(Error::InvalidInput("training data must contain both classes".into()));
    }
    let n = data.len();
    let mut logits = vec![lit::<T>(params.base_score); n];
    let mut grad = vec![T::zero(); n];
    let mut hess = vec![T::zero(); n];
    let mut trees = Vec::with_capacity(params.rounds);
    for _ in 0..params.rounds {
        for i in 0..n {
            let (g, h) = objective.grad_hess(data.labels[i], sigmoid(logits[i]));
            grad[i] = g;
            hess[i] = h;
        }
        let mut b = Builder {
            rows: &data.rows,
            domains: &data.feature_domains,
            grad: &grad,
            hess: &hess,
            lambda: lit(params.lambda),
            min_child_weight: lit(params.min_child_weight),
            gamma: lit(params.gamma),
            learning_rate: lit(params.learning_rate),
            max_depth: params.max_depth,
            nodes: Vec::new(),
        };
        b.build((0..n).collect(), 0);
        let tree = Tree { nodes: b.nodes };
        for (l, row) in logits.iter_mut().zip(&data.rows) {
            *l += tree.leaf_value(row);
        }
        trees.push(tree);
    }
    Ok(GbtModel {
        trees,
        learning_rate: lit(params.learning_rate),
        base_score: lit(params.base_score),
        feature_domains: data.feature_domains.clone(),
    })
}

/// Training-set loss after each prefix of `0..=rounds` trees.
pub fn loss_history<T: Scalar, O: Objective<T>>(
    model: &GbtModel<T>,
    data: &LabeledDataset,
    objective: &O,
) -> Result<Vec<T>> {
    (0..=model.trees.len())
        .map(|r| {
            let p: Vec<T> = data.rows.iter().map(|x| sigmoid(model.logit_at(x, r))).collect();
            objective.loss(&data.labels, &p)
        })
        .collect()
}
