//! Confusion scores, ROC curves and AUC with `fake` (label 1) as positive.
//!
//! Every 0/0 ratio is defined as 0.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::util::format_real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

fn check_labels(labels: &[u8]) -> Result<()> {
    match labels.iter().find(|&&l| l > 1) {
        Some(&l) => Err(Error::InvalidLabel(l)),
        None => Ok(()),
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    if a == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    check_lengths(y_true.len(), y_pred.len())?;
    check_labels(y_true)?;
    check_labels(y_pred)?;
    let mut m = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => m.tp += 1,
            (0, 1) => m.fp += 1,
            (0, 0) => m.tn += 1,
            _ => m.fn_ += 1,
        }
    }
    Ok(m)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassScores {
    pub scores: Scores,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub real: ClassScores,
    pub fake: ClassScores,
    pub accuracy: f64,
    pub macro_avg: Scores,
    pub weighted_avg: Scores,
    pub model_id: String,
    pub threshold: f64,
    /// Extra provenance lines (selection mode, split seed, ..).
    pub context: BTreeMap<String, String>,
}

fn class_scores(tp: usize, fp: usize, fn_: usize) -> ClassScores {
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    ClassScores {
        scores: Scores {
            precision,
            recall,
            f1: f1(precision, recall),
        },
        support: tp + fn_,
    }
}

/// Per-class precision/recall/F1, accuracy and their macro and
/// support-weighted averages.
pub fn evaluate(y_true: &[u8], y_pred: &[u8]) -> Result<EvalReport> {
    let m = confusion(y_true, y_pred)?;
    let fake = class_scores(m.tp, m.fp, m.fn_);
    let real = class_scores(m.tn, m.fn_, m.fp);
    let total = m.total() as f64;
    let avg = |w_real: f64, w_fake: f64| Scores {
        precision: w_real * real.scores.precision + w_fake * fake.scores.precision,
        recall: w_real * real.scores.recall + w_fake * fake.scores.recall,
        f1: w_real * real.scores.f1 + w_fake * fake.scores.f1,
    };
    let mut weighted_avg = avg(real.support as f64 / total, fake.support as f64 / total);
    // Support-weighted recall reduces to (tp + tn) / n; computing it that way
    // keeps it bit-identical to accuracy.
    weighted_avg.recall = ratio(m.tp + m.tn, m.total());
    Ok(EvalReport {
        accuracy: ratio(m.tp + m.tn, m.total()),
        macro_avg: avg(0.5, 0.5),
        weighted_avg,
        real,
        fake,
        model_id: String::new(),
        threshold: 0.5,
        context: BTreeMap::new(),
    })
}

impl EvalReport {
    pub fn with_model(mut self, model_id: impl Into<String>, threshold: f64) -> Self {
        self.model_id = model_id.into();
        self.threshold = threshold;
        self
    }

    pub fn total_support(&self) -> usize {
        self.real.support + self.fake.support
    }

    /// Aligned table with rows Real, Fake, Accuracy, Macro avg. and
    /// Weighted avg.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model: {}", self.model_id);
        let _ = writeln!(out, "threshold: {}", self.threshold);
        for (k, v) in &self.context {
            let _ = writeln!(out, "{k}: {v}");
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:>13} {:>9} {:>9} {:>9} {:>9}",
            "", "precision", "recall", "f1-score", "support"
        );
        let _ = writeln!(out);
        let row = |out: &mut String, name: &str, s: &Scores, support: usize| {
            let _ = writeln!(
                out,
                "{name:>13} {:>9.4} {:>9.4} {:>9.4} {support:>9}",
                s.precision, s.recall, s.f1
            );
        };
        row(&mut out, "Real", &self.real.scores, self.real.support);
        row(&mut out, "Fake", &self.fake.scores, self.fake.support);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:>13} {:>9} {:>9} {:>9.4} {:>9}",
            "Accuracy",
            "",
            "",
            self.accuracy,
            self.total_support()
        );
        row(&mut out, "Macro avg.", &self.macro_avg, self.total_support());
        row(&mut out, "Weighted avg.", &self.weighted_avg, self.total_support());
        out
    }

    /// One `key = value` per line; reals carry 17 significant digits.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model_id = {}", self.model_id);
        let _ = writeln!(out, "threshold = {}", format_real(self.threshold));
        let _ = writeln!(out, "accuracy = {}", format_real(self.accuracy));
        for (prefix, c) in [("real", &self.real), ("fake", &self.fake)] {
            write_scores(&mut out, prefix, &c.scores);
            let _ = writeln!(out, "{prefix}.support = {}", c.support);
        }
        write_scores(&mut out, "macro", &self.macro_avg);
        write_scores(&mut out, "weighted", &self.weighted_avg);
        for (k, v) in &self.context {
            let _ = writeln!(out, "context.{k} = {v}");
        }
        out
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let bad = |m: String| Error::CorruptReport(m);
        let mut map = BTreeMap::new();
        let mut context = BTreeMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| bad(format!("bad line {line:?}")))?;
            match k.strip_prefix("context.") {
                Some(ck) => context.insert(ck.to_string(), v.to_string()),
                None => map.insert(k.to_string(), v.to_string()),
            };
        }
        let text_of = |k: &str| map.get(k).cloned().ok_or_else(|| bad(format!("missing {k}")));
        let real = |k: &str| -> Result<f64> {
            text_of(k)?.parse().map_err(|_| bad(format!("bad value for {k}")))
        };
        let count = |k: &str| -> Result<usize> {
            text_of(k)?.parse().map_err(|_| bad(format!("bad value for {k}")))
        };
        let scores = |p: &str| -> Result<Scores> {
            Ok(Scores {
                precision: real(&format!("{p}.precision"))?,
                recall: real(&format!("{p}.recall"))?,
                f1: real(&format!("{p}.f1"))?,
            })
        };
        Ok(EvalReport {
            real: ClassScores {
                scores: scores("real")?,
                support: count("real.support")?,
            },
            fake: ClassScores {
                scores: scores("fake")?,
                support: count("fake.support")?,
            },
            accuracy: real("accuracy")?,
            macro_avg: scores("macro")?,
            weighted_avg: scores("weighted")?,
            model_id: text_of("model_id")?,
            threshold: real("threshold")?,
            context,
        })
    }
}

fn write_scores(out: &mut String, prefix: &str, s: &Scores) {
    let _ = writeln!(out, "{prefix}.precision = {}", format_real(s.precision));
    let _ = writeln!(out, "{prefix}.recall = {}", format_real(s.recall));
    let _ = writeln!(out, "{prefix}.f1 = {}", format_real(s.f1));
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// `(fpr, tpr)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    /// Score threshold of each point; the first is `+inf`.
    pub thresholds: Vec<f64>,
    pub auc: f64,
}

fn check_scores(scores: &[f64], y_true: &[u8]) -> Result<(usize, usize)> {
    check_lengths(scores.len(), y_true.len())?;
    check_labels(y_true)?;
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let positives = y_true.iter().filter(|&&l| l == 1).count();
    let negatives = y_true.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::OneClassOnly);
    }
    Ok((positives, negatives))
}

/// ROC curve over the distinct observed scores (higher = more fake), with
/// AUC by trapezoidal integration.
pub fn roc(scores: &[f64], y_true: &[u8]) -> Result<RocCurve> {
    let (positives, negatives) = check_scores(scores, y_true)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = vec![f64::INFINITY];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if y_true[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
        thresholds.push(threshold);
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum();
    Ok(RocCurve {
        points,
        thresholds,
        auc,
    })
}

/// AUC as the fraction of positive/negative pairs ranked correctly, ties
/// counting one half. Quadratic; used to cross-check [`roc`].
pub fn auc_concordance(scores: &[f64], y_true: &[u8]) -> Result<f64> {
    let (positives, negatives) = check_scores(scores, y_true)?;
    let mut credit = 0.0;
    for (i, &sp) in scores.iter().enumerate().filter(|&(i, _)| y_true[i] == 1) {
        let _ = i;
        for (_, &sn) in scores.iter().enumerate().filter(|&(j, _)| y_true[j] == 0) {
            credit += if sp > sn {
                1.0
            } else if sp == sn {
                0.5
            } else {
                0.0
            };
        }
    }
    Ok(credit / (positives as f64 * negatives as f64))
}

impl RocCurve {
    /// `threshold,fpr,tpr` rows followed by a `# auc=` line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,fpr,tpr\n");
        for (t, (fpr, tpr)) in self.thresholds.iter().zip(&self.points) {
            let _ = writeln!(out, "{},{},{}", format_real(*t), format_real(*fpr), format_real(*tpr));
        }
        let _ = writeln!(out, "# auc={}", format_real(self.auc));
        out
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}
