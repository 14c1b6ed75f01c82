//! Recursive feature elimination driven by boosted-tree split gain.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::SelectionMode;
use crate::dataset::FeatureTable;
use crate::gbdt::{GbdtModel, Hyperparams};
use crate::{Error, Result};

/// Importances observed in one elimination round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundLog {
    pub round: usize,
    /// Original indices of the features trained on, ascending.
    pub surviving: Vec<usize>,
    /// Importance of each surviving feature, aligned with `surviving`.
    pub importances: Vec<f64>,
    /// Original indices eliminated after this round, in elimination order.
    pub eliminated: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    /// Retained original feature indices, ascending.
    pub selected: Vec<usize>,
    /// All features: survivors (ascending) first, then eliminated features
    /// from the latest elimination to the earliest.
    pub ranking: Vec<usize>,
    pub per_round: Vec<RoundLog>,
    pub target_k: usize,
    /// Names of all features of the table the selection was run on.
    pub feature_names: Vec<String>,
    pub mode: SelectionMode,
}

/// Repeatedly trains on the surviving columns and removes the
/// `min(step, surviving - target_k)` features with the lowest total split
/// gain, until `target_k` remain. Among equal importances the higher
/// original index goes first.
pub fn rfe(table: &FeatureTable, target_k: usize, step: usize, params: &Hyperparams) -> Result<SelectionResult> {
    let width = table.width();
    if target_k == 0 || target_k > width {
        return Err(Error::BadK { k: target_k, max: width });
    }
    if step == 0 {
        return Err(Error::InvalidParams("rfe step must be at least 1".into()));
    }
    let mut surviving: Vec<usize> = (0..width).collect();
    let mut eliminated_order = Vec::new();
    let mut per_round = Vec::new();

    while surviving.len() > target_k {
        let sub = table.select_columns(&surviving)?;
        let model = GbdtModel::fit(&sub.rows, &sub.labels, params)?;
        let importances = model.feature_importance();

        let mut order: Vec<usize> = (0..surviving.len()).collect();
        order.sort_by(|&a, &b| {
            importances[a]
                .total_cmp(&importances[b])
                .then(surviving[b].cmp(&surviving[a]))
        });
        let n_drop = step.min(surviving.len() - target_k);
        let eliminated: Vec<usize> = order[..n_drop].iter().map(|&i| surviving[i]).collect();
        log::debug!(
            "rfe round {}: {} features, dropping {:?}",
            per_round.len(),
            surviving.len(),
            eliminated
        );

        per_round.push(RoundLog {
            round: per_round.len(),
            surviving: surviving.clone(),
            importances,
            eliminated: eliminated.clone(),
        });
        surviving.retain(|f| !eliminated.contains(f));
        eliminated_order.extend(eliminated);
    }

    let mut ranking = surviving.clone();
    ranking.extend(eliminated_order.iter().rev());
    Ok(SelectionResult {
        selected: surviving,
        ranking,
        per_round,
        target_k,
        feature_names: table.feature_names.clone(),
        mode: SelectionMode::PaperOrder,
    })
}

/// Restricts the table to the selected columns.
pub fn apply_selection(table: &FeatureTable, result: &SelectionResult) -> Result<FeatureTable> {
    table.select_columns(&result.selected)
}

impl SelectionResult {
    pub fn selected_names(&self) -> Vec<&str> {
        self.selected.iter().map(|&i| self.feature_names[i].as_str()).collect()
    }

    /// Text form:
    ///
    /// ```text
    /// feature-selection
    /// target_k 2
    /// mode paper-order
    /// selected 0 2
    /// ranking 0 2 1
    /// feature 0 pitch_mean
    /// feature 1 pitch_std
    /// feature 2 jitter_mean
    /// ```
    ///
    /// The per-round log is not persisted.
    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = String::from("feature-selection\n");
        let _ = writeln!(out, "target_k {}", self.target_k);
        let _ = writeln!(out, "mode {}", self.mode.as_str());
        let _ = writeln!(out, "selected {}", join(&self.selected));
        let _ = writeln!(out, "ranking {}", join(&self.ranking));
        for (i, name) in self.feature_names.iter().enumerate() {
            let _ = writeln!(out, "feature {i} {name}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: String| Error::CorruptSelection(m);
        let mut lines = text.lines();
        if lines.next() != Some("feature-selection") {
            return Err(bad("missing feature-selection header".into()));
        }
        let mut field = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(format!("missing {key}")))?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok(v.to_string()),
                None if line == key => Ok(String::new()),
                _ => Err(bad(format!("expected {key}, found {line:?}"))),
            }
        };
        let parse_list = |s: &str| -> Result<Vec<usize>> {
            s.split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(format!("bad index {t:?}"))))
                .collect()
        };
        let target_k: usize = field("target_k")?
            .parse()
            .map_err(|_| bad("bad target_k".into()))?;
        let mode_text = field("mode")?;
        let mode = SelectionMode::parse(&mode_text).ok_or_else(|| bad(format!("unknown mode {mode_text:?}")))?;
        let selected = parse_list(&field("selected")?)?;
        let ranking = parse_list(&field("ranking")?)?;
        let mut feature_names = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let rest = line
                .strip_prefix("feature ")
                .ok_or_else(|| bad(format!("unexpected line {line:?}")))?;
            let (idx, name) = rest.split_once(' ').ok_or_else(|| bad(format!("bad feature line {line:?}")))?;
            if idx.parse::<usize>().ok() != Some(feature_names.len()) {
                return Err(bad(format!("feature lines out of order at {line:?}")));
            }
            feature_names.push(name.to_string());
        }

        let width = feature_names.len();
        let mut seen = vec![false; width];
        for &r in &ranking {
            if r >= width || std::mem::replace(&mut seen[r], true) {
                return Err(bad("ranking is not a permutation of the features".into()));
            }
        }
        if ranking.len() != width
            || selected.len() != target_k
            || selected.windows(2).any(|w| w[0] >= w[1])
            || selected.iter().any(|&s| s >= width)
        {
            return Err(bad("selected indices inconsistent with target_k or ranking".into()));
        }
        Ok(SelectionResult {
            selected,
            ranking,
            per_round: Vec::new(),
            target_k,
            feature_names,
            mode,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::Preset;

    fn tiny_table() -> FeatureTable {
        // Column 1 separates the classes; columns 0 and 2 are constant.
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![1.0, i as f64, 2.0]).collect();
        let labels = (0..20).map(|i| u8::from(i >= 10)).collect();
        FeatureTable {
            rows,
            labels,
            feature_names: vec!["a".into(), "b".into(), "c".into()],
            source_paths: (0..20).map(|i| i.to_string()).collect(),
        }
    }

    fn quick() -> Hyperparams {
        Hyperparams {
            n_trees: 5,
            ..Preset::B.hyperparams()
        }
    }

    #[test]
    fn full_k_is_identity() {
        let t = tiny_table();
        let r = rfe(&t, 3, 1, &quick()).unwrap();
        assert_eq!(r.selected, vec![0, 1, 2]);
        assert!(r.per_round.is_empty());
        assert_eq!(apply_selection(&t, &r).unwrap(), t);
    }

    #[test]
    fn bad_k() {
        let t = tiny_table();
        assert!(matches!(rfe(&t, 4, 1, &quick()), Err(Error::BadK { k: 4, max: 3 })));
        assert!(matches!(rfe(&t, 0, 1, &quick()), Err(Error::BadK { .. })));
    }

    #[test]
    fn zero_importance_ties_drop_higher_index_first() {
        let r = rfe(&tiny_table(), 1, 1, &quick()).unwrap();
        assert_eq!(r.selected, vec![1]);
        assert_eq!(r.per_round[0].eliminated, vec![2]);
        assert_eq!(r.per_round[1].eliminated, vec![0]);
        assert_eq!(r.ranking, vec![1, 0, 2]);
    }

    #[test]
    fn step_larger_than_needed_is_capped() {
        let r = rfe(&tiny_table(), 2, 5, &quick()).unwrap();
        assert_eq!(r.selected, vec![0, 1]);
        assert_eq!(r.per_round.len(), 1);
    }

    #[test]
    fn apply_single_column() {
        let t = tiny_table();
        let mut r = rfe(&t, 3, 1, &quick()).unwrap();
        r.selected = vec![0];
        let s = apply_selection(&t, &r).unwrap();
        assert_eq!(s.width(), 1);
        assert!(s.rows.iter().all(|row| row == &vec![1.0]));
        r.selected = vec![5];
        assert!(matches!(apply_selection(&t, &r), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn text_round_trip() {
        let mut r = rfe(&tiny_table(), 2, 1, &quick()).unwrap();
        r.mode = SelectionMode::TrainOnly;
        let text = r.to_text();
        let back = SelectionResult::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.selected, r.selected);
        assert_eq!(back.mode, SelectionMode::TrainOnly);
        let ranking_line = format!("ranking {} {} {}", r.ranking[0], r.ranking[1], r.ranking[2]);
        assert!(text.contains(&ranking_line));
        let duplicated = format!("ranking {0} {0} {1}", r.ranking[0], r.ranking[2]);
        assert!(SelectionResult::from_text(&text.replace(&ranking_line, &duplicated)).is_err());
    }
}
