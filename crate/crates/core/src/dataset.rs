//! Labelled manifests, feature tables and stratified splits.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs::File;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::features::{extract_file, feature_names, FeatureConfig, FEATURE_NAMES};
use crate::util::{format_real, mean_std};
use crate::{Error, Result};

/// Class label; `Fake` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Real = 0,
    Fake = 1,
}

impl Label {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "real" => Some(Label::Real),
            "fake" => Some(Label::Fake),
            _ => None,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Label::Real),
            1 => Some(Label::Fake),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Real => "real",
            Label::Fake => "fake",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path as written in the manifest.
    pub path: String,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    /// Relative entry paths are resolved against this directory.
    pub base_dir: PathBuf,
}

impl Manifest {
    /// Reads a `path,label` CSV. Labels are `real` or `fake` in any case.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_reader(file, base_dir).map_err(|e| match e {
            Error::Csv { source, .. } => Error::csv(path, source),
            other => other,
        })
    }

    pub fn from_reader(reader: impl std::io::Read, base_dir: PathBuf) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = csv.headers().map_err(|e| Error::csv("<manifest>", e))?.clone();
        if headers.len() != 2 || &headers[0] != "path" || &headers[1] != "label" {
            return Err(Error::SchemaMismatch(format!(
                "manifest header must be `path,label`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for (i, record) in csv.records().enumerate() {
            let record = record.map_err(|e| Error::csv("<manifest>", e))?;
            // Row numbers count the header as row 1.
            let row = i + 2;
            let label = Label::parse(&record[1]).ok_or_else(|| Error::BadLabel {
                row,
                label: record[1].to_string(),
            })?;
            entries.push(ManifestEntry {
                path: record[0].to_string(),
                label,
            });
        }
        if entries.is_empty() {
            return Err(Error::EmptyManifest);
        }
        Ok(Manifest { entries, base_dir })
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        let p = Path::new(&entry.path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Paths listed more than once, with their counts.
    pub fn duplicates(&self) -> Vec<(String, usize)> {
        duplicate_paths(self.entries.iter().map(|e| e.path.as_str()))
    }
}

fn duplicate_paths<'a>(paths: impl Iterator<Item = &'a str>) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for p in paths {
        *counts.entry(p).or_default() += 1;
    }
    counts
        .into_iter()
        .filter(|&(_, c)| c > 1)
        .map(|(p, c)| (p.to_string(), c))
        .collect()
}

/// Labelled feature rows. Labels are 0 (real) or 1 (fake).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
    pub source_paths: Vec<String>,
}

impl FeatureTable {
    pub fn empty(feature_names: Vec<String>) -> Self {
        FeatureTable {
            rows: Vec::new(),
            labels: Vec::new(),
            feature_names,
            source_paths: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let fake = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - fake, fake]
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> FeatureTable {
        FeatureTable {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            source_paths: indices.iter().map(|&i| self.source_paths[i].clone()).collect(),
        }
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<FeatureTable> {
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.width()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                width: self.width(),
            });
        }
        Ok(FeatureTable {
            rows: self.rows.iter().map(|r| columns.iter().map(|&c| r[c]).collect()).collect(),
            labels: self.labels.clone(),
            feature_names: columns.iter().map(|&c| self.feature_names[c].clone()).collect(),
            source_paths: self.source_paths.clone(),
        })
    }

    /// Drops rows holding any non-finite value. Returns the cleaned table and
    /// the source paths of the dropped rows.
    pub fn clean(&self) -> Result<(FeatureTable, Vec<String>)> {
        let (keep, drop): (Vec<usize>, Vec<usize>) =
            (0..self.len()).partition(|&i| self.rows[i].iter().all(|v| v.is_finite()));
        if keep.is_empty() && !drop.is_empty() {
            return Err(Error::AllRowsDropped { dropped: drop.len() });
        }
        let dropped = drop.iter().map(|&i| self.source_paths[i].clone()).collect();
        Ok((self.subset(&keep), dropped))
    }

    pub fn explore(&self) -> ExplorationReport {
        let features = (0..self.width())
            .map(|j| {
                let column: Vec<f64> = self.rows.iter().map(|r| r[j]).collect();
                let (mean, std) = mean_std(&column);
                FeatureSummary {
                    name: self.feature_names[j].clone(),
                    min: column.iter().copied().fold(f64::INFINITY, f64::min),
                    max: column.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    mean,
                    std,
                }
            })
            .collect();
        ExplorationReport {
            n_rows: self.len(),
            class_counts: self.class_counts(),
            features,
            duplicates: duplicate_paths(self.source_paths.iter().map(String::as_str)),
            dropped: Vec::new(),
        }
    }

    /// Stratified split. Per class (real first, then fake) the row indices
    /// are shuffled with a ChaCha8 generator seeded by `seed` (one stream for
    /// both classes, Fisher-Yates via `rand::seq::SliceRandom::shuffle`) and
    /// the first `round(count * test_fraction)` become test rows. Both
    /// partitions keep ascending original order.
    pub fn split(&self, test_fraction: f64, seed: u64) -> Result<SplitResult> {
        if !(0.0..1.0).contains(&test_fraction) {
            return Err(Error::Config(format!("test_fraction {test_fraction} outside [0, 1)")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in [0u8, 1] {
            let mut idx: Vec<usize> = (0..self.len()).filter(|&i| self.labels[i] == class).collect();
            let label = Label::from_code(class).expect("binary label");
            if test_fraction > 0.0 && idx.is_empty() {
                return Err(Error::DegenerateSplit(format!("no {label} rows to stratify")));
            }
            let n_test = (idx.len() as f64 * test_fraction).round() as usize;
            if n_test == idx.len() && !idx.is_empty() {
                return Err(Error::DegenerateSplit(format!(
                    "all {} {label} rows would go to the test partition",
                    idx.len()
                )));
            }
            idx.shuffle(&mut rng);
            test.extend_from_slice(&idx[..n_test]);
            train.extend_from_slice(&idx[n_test..]);
        }
        train.sort_unstable();
        test.sort_unstable();
        Ok(SplitResult {
            train: self.subset(&train),
            test: self.subset(&test),
            train_indices: train,
            test_indices: test,
            seed,
            test_fraction,
        })
    }

    /// Writes `path,label,<features..>` with 17 significant digits per value.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        let mut header = vec!["path".to_string(), "label".to_string()];
        header.extend(self.feature_names.iter().cloned());
        w.write_record(&header).map_err(|e| Error::csv(path, e))?;
        for ((row, &label), src) in self.rows.iter().zip(&self.labels).zip(&self.source_paths) {
            let label = Label::from_code(label).ok_or(Error::InvalidLabel(label))?;
            let mut record = vec![src.clone(), label.as_str().to_string()];
            record.extend(row.iter().map(|&v| format_real(v)));
            w.write_record(&record).map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads a table written by [`FeatureTable::save`]. The header must list
    /// the canonical feature names in order.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        let header = r.headers().map_err(|e| Error::csv(path, e))?.clone();
        let expected: Vec<&str> = ["path", "label"].into_iter().chain(FEATURE_NAMES).collect();
        if header.iter().collect::<Vec<_>>() != expected {
            let missing: Vec<&str> = expected
                .iter()
                .filter(|name| !header.iter().any(|h| h == **name))
                .copied()
                .collect();
            return Err(Error::SchemaMismatch(if missing.is_empty() {
                "feature columns are not in canonical order".to_string()
            } else {
                format!("missing columns: {}", missing.join(", "))
            }));
        }
        let mut table = FeatureTable::empty(feature_names());
        for (i, record) in r.records().enumerate() {
            let record = record.map_err(|e| Error::csv(path, e))?;
            let row_no = i + 2;
            let label = Label::parse(&record[1])
                .or_else(|| record[1].trim().parse().ok().and_then(Label::from_code))
                .ok_or_else(|| Error::BadLabel {
                    row: row_no,
                    label: record[1].to_string(),
                })?;
            let values = record
                .iter()
                .skip(2)
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::SchemaMismatch(format!("row {row_no}: {e}")))?;
            table.source_paths.push(record[0].to_string());
            table.labels.push(label.code());
            table.rows.push(values);
        }
        Ok(table)
    }
}

/// Extracts one feature row per manifest entry, in manifest order.
///
/// Every entry is checked for readability first; all unreadable paths are
/// reported together. Extraction runs in parallel.
pub fn build_table(manifest: &Manifest, config: &FeatureConfig) -> Result<FeatureTable> {
    config.validate()?;
    let resolved: Vec<PathBuf> = manifest.entries.iter().map(|e| manifest.resolve(e)).collect();
    let unreadable: Vec<PathBuf> = resolved.iter().filter(|p| File::open(p).is_err()).cloned().collect();
    if !unreadable.is_empty() {
        return Err(Error::FileError { paths: unreadable });
    }
    let rows = resolved
        .par_iter()
        .map(|p| extract_file(p, config).map(|v| v.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureTable {
        rows,
        labels: manifest.entries.iter().map(|e| e.label.code()).collect(),
        feature_names: feature_names(),
        source_paths: manifest.entries.iter().map(|e| e.path.clone()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub train: FeatureTable,
    pub test: FeatureTable,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
    pub test_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSummary {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationReport {
    pub n_rows: usize,
    /// Row counts for real and fake.
    pub class_counts: [usize; 2],
    pub features: Vec<FeatureSummary>,
    pub duplicates: Vec<(String, usize)>,
    /// Source paths removed by cleaning.
    pub dropped: Vec<String>,
}

impl ExplorationReport {
    pub fn with_dropped(mut self, dropped: Vec<String>) -> Self {
        self.dropped = dropped;
        self
    }

    /// Fraction of rows in each class; zeros for an empty table.
    pub fn balance(&self) -> [f64; 2] {
        if self.n_rows == 0 {
            return [0.0, 0.0];
        }
        let n = self.n_rows as f64;
        [self.class_counts[0] as f64 / n, self.class_counts[1] as f64 / n]
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let balance = self.balance();
        let _ = writeln!(out, "rows: {}", self.n_rows);
        let _ = writeln!(out, "real: {} ({:.4})", self.class_counts[0], balance[0]);
        let _ = writeln!(out, "fake: {} ({:.4})", self.class_counts[1], balance[1]);
        let _ = writeln!(out, "dropped: {}", self.dropped.len());
        for p in &self.dropped {
            let _ = writeln!(out, "  dropped {p}");
        }
        if self.duplicates.is_empty() {
            let _ = writeln!(out, "duplicate paths: none");
        } else {
            for (p, c) in &self.duplicates {
                let _ = writeln!(out, "warning: duplicate path {p} ({c} rows)");
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<16} {:>24} {:>24} {:>24} {:>24}",
            "feature", "min", "max", "mean", "std"
        );
        for f in &self.features {
            let _ = writeln!(
                out,
                "{:<16} {:>24} {:>24} {:>24} {:>24}",
                f.name,
                format_real(f.min),
                format_real(f.max),
                format_real(f.mean),
                format_real(f.std)
            );
        }
        out
    }
}
