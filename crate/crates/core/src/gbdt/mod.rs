//! Second-order gradient-boosted decision trees for binary classification.
//!
//! Training minimises logistic loss with Newton steps: every round fits one
//! regression tree to the per-sample gradients `p - y` and hessians
//! `p (1 - p)` by exact greedy search over midpoints between consecutive
//! distinct feature values. Leaves hold `-G / (H + lambda)`, scaled by the
//! learning rate when added to the raw score. Training is deterministic.

mod io;
mod tree;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use io::FORMAT_VERSION;
pub use tree::{Node, Tree};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub learning_rate: f64,
    /// L2 penalty on leaf values.
    pub lambda: f64,
    /// Minimum loss reduction for a split.
    pub gamma: f64,
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be positive");
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad("gamma must be non-negative");
        }
        Ok(())
    }
}

impl Default for Hyperparams {
    fn default() -> Self {
        Preset::A.hyperparams()
    }
}

/// Named training configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// 400 trees of depth 6, learning rate 0.1.
    A,
    /// 200 trees of depth 4, learning rate 0.3.
    B,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::A, Preset::B];

    pub fn hyperparams(self) -> Hyperparams {
        match self {
            Preset::A => Hyperparams {
                n_trees: 400,
                max_depth: 6,
                min_samples_leaf: 1,
                learning_rate: 0.1,
                lambda: 1.0,
                gamma: 0.0,
            },
            Preset::B => Hyperparams {
                n_trees: 200,
                max_depth: 4,
                min_samples_leaf: 1,
                learning_rate: 0.3,
                lambda: 1.0,
                gamma: 0.0,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::A => "preset-a",
            Preset::B => "preset-b",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" | "preset-a" => Some(Preset::A),
            "b" | "preset-b" => Some(Preset::B),
            _ => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean logistic loss of raw scores against 0/1 labels.
pub fn logistic_loss(raw: &[f64], y: &[u8]) -> f64 {
    // log(1 + e^z) - y z, written to avoid overflow.
    let total: f64 = raw
        .iter()
        .zip(y)
        .map(|(&z, &label)| z.max(0.0) + (-z.abs()).exp().ln_1p() - label as f64 * z)
        .sum();
    total / raw.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbdtModel {
    pub trees: Vec<Tree>,
    /// Prior log-odds.
    pub base_score: f64,
    pub params: Hyperparams,
    pub feature_names: Vec<String>,
    /// Free-form provenance recorded alongside the model.
    pub metadata: BTreeMap<String, String>,
}

fn check_training_data(x: &[Vec<f64>], y: &[u8]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: x.len() });
    }
    if let Some(&bad) = y.iter().find(|&&l| l > 1) {
        return Err(Error::InvalidLabel(bad));
    }
    let width = x[0].len();
    if let Some(row) = x.iter().find(|r| r.len() != width) {
        return Err(Error::DimensionMismatch {
            expected: width,
            got: row.len(),
        });
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let positives = y.iter().filter(|&&l| l == 1).count();
    if positives == 0 || positives == y.len() {
        return Err(Error::SingleClass);
    }
    Ok(width)
}

impl GbdtModel {
    /// Trains on row-major `x` with 0/1 labels `y`. Feature names default to
    /// `f0, f1, ..`.
    pub fn fit(x: &[Vec<f64>], y: &[u8], params: &Hyperparams) -> Result<Self> {
        params.validate()?;
        let width = check_training_data(x, y)?;
        let prior = (y.iter().map(|&l| l as f64).sum::<f64>() / y.len() as f64).clamp(1e-6, 1.0 - 1e-6);
        let base_score = (prior / (1.0 - prior)).ln();

        let learner = tree::TreeLearner::new(x, width, params);
        let mut raw = vec![base_score; x.len()];
        let mut grad = vec![0.0; x.len()];
        let mut hess = vec![0.0; x.len()];
        let mut trees = Vec::with_capacity(params.n_trees);
        for _ in 0..params.n_trees {
            for i in 0..x.len() {
                let p = sigmoid(raw[i]);
                grad[i] = p - y[i] as f64;
                hess[i] = p * (1.0 - p);
            }
            let tree = learner.fit(&grad, &hess);
            for (r, row) in raw.iter_mut().zip(x) {
                *r += params.learning_rate * tree.predict(row);
            }
            trees.push(tree);
        }
        Ok(GbdtModel {
            trees,
            base_score,
            params: *params,
            feature_names: (0..width).map(|j| format!("f{j}")).collect(),
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.feature_names.len(), "one name per feature");
        self.feature_names = names;
        self
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn learning_rate(&self) -> f64 {
        self.params.learning_rate
    }

    /// The same model restricted to its first `n` trees.
    pub fn truncated(&self, n: usize) -> GbdtModel {
        GbdtModel {
            trees: self.trees[..n.min(self.trees.len())].to_vec(),
            ..self.clone()
        }
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(())
    }

    /// `base_score + learning_rate * sum of tree outputs`.
    pub fn raw_score(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(self.raw_score_unchecked(x))
    }

    fn raw_score_unchecked(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        self.base_score + self.params.learning_rate * sum
    }

    /// Probability of the positive (fake) class.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        self.raw_score(x).map(sigmoid)
    }

    /// 1 iff the probability is at least `threshold`.
    pub fn predict_label(&self, x: &[f64], threshold: f64) -> Result<u8> {
        assert!(threshold > 0.0 && threshold < 1.0, "threshold must lie in (0, 1)");
        Ok(u8::from(self.predict_proba(x)? >= threshold))
    }

    pub fn predict_proba_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.iter().map(|r| self.predict_proba(r)).collect()
    }

    /// Total split gain per feature over all trees.
    pub fn feature_importance(&self) -> Vec<f64> {
        let mut importance = vec![0.0; self.n_features()];
        for tree in &self.trees {
            for node in &tree.nodes {
                if let Node::Split { feature, gain, .. } = node {
                    importance[*feature] += gain;
                }
            }
        }
        importance
    }
}
