//! Text serialisation of [`GbdtModel`].
//!
//! ```text
//! gbdt-model
//! format_version 1
//! n_trees 2
//! max_depth 1
//! min_samples_leaf 1
//! learning_rate 2.9999999999999999e-1
//! lambda 1.0000000000000000e0
//! gamma 0.0000000000000000e0
//! base_score 0.0000000000000000e0
//! n_features 1
//! feature pitch_mean
//! meta preset preset-b
//! tree 3
//! split 0 1.5000000000000000e0 1 2 2.5000000000000000e-1
//! leaf -5.0000000000000000e-1
//! leaf 5.0000000000000000e-1
//! tree 1
//! leaf 0.0000000000000000e0
//! end
//! ```
//!
//! `n_trees` is the configured tree budget; the number of `tree` blocks is
//! the number actually trained. Reals carry 17 significant digits, so
//! loading and re-saving is byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{GbdtModel, Hyperparams, Node, Tree};
use crate::util::format_real;
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "gbdt-model";

impl GbdtModel {
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "format_version {FORMAT_VERSION}");
        let _ = writeln!(out, "n_trees {}", p.n_trees);
        let _ = writeln!(out, "max_depth {}", p.max_depth);
        let _ = writeln!(out, "min_samples_leaf {}", p.min_samples_leaf);
        let _ = writeln!(out, "learning_rate {}", format_real(p.learning_rate));
        let _ = writeln!(out, "lambda {}", format_real(p.lambda));
        let _ = writeln!(out, "gamma {}", format_real(p.gamma));
        let _ = writeln!(out, "base_score {}", format_real(self.base_score));
        let _ = writeln!(out, "n_features {}", self.feature_names.len());
        for name in &self.feature_names {
            let _ = writeln!(out, "feature {name}");
        }
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "meta {k} {v}");
        }
        for tree in &self.trees {
            let _ = writeln!(out, "tree {}", tree.nodes.len());
            for node in &tree.nodes {
                match node {
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                        gain,
                    } => {
                        let _ = writeln!(
                            out,
                            "split {feature} {} {left} {right} {}",
                            format_real(*threshold),
                            format_real(*gain)
                        );
                    }
                    Node::Leaf { value } => {
                        let _ = writeln!(out, "leaf {}", format_real(*value));
                    }
                }
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Parser::new(text).model()
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

struct Parser<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptModel(msg.into())
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            lines: text.lines().enumerate(),
        }
    }

    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        self.lines
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| corrupt("unexpected end of file"))
    }

    /// Next line, which must start with `key`; returns the remainder.
    fn field(&mut self, key: &str) -> Result<&'a str> {
        let (n, line) = self.next_line()?;
        match line.split_once(' ') {
            Some((k, rest)) if k == key => Ok(rest),
            _ => Err(corrupt(format!("line {n}: expected {key}"))),
        }
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let raw = self.field(key)?;
        raw.trim()
            .parse()
            .map_err(|_| corrupt(format!("bad value {raw:?} for {key}")))
    }

    fn model(mut self) -> Result<GbdtModel> {
        let (_, magic) = self.next_line()?;
        if magic != MAGIC {
            return Err(corrupt("missing gbdt-model header"));
        }
        let version: u32 = self.parse("format_version")?;
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let params = Hyperparams {
            n_trees: self.parse("n_trees")?,
            max_depth: self.parse("max_depth")?,
            min_samples_leaf: self.parse("min_samples_leaf")?,
            learning_rate: self.parse("learning_rate")?,
            lambda: self.parse("lambda")?,
            gamma: self.parse("gamma")?,
        };
        params
            .validate()
            .map_err(|e| corrupt(format!("invalid hyperparameters: {e}")))?;
        let base_score: f64 = self.parse("base_score")?;
        if !base_score.is_finite() {
            return Err(corrupt("base_score is not finite"));
        }
        let n_features: usize = self.parse("n_features")?;
        let feature_names = (0..n_features)
            .map(|_| self.field("feature").map(str::to_string))
            .collect::<Result<Vec<_>>>()?;

        let mut metadata = BTreeMap::new();
        let mut trees = Vec::new();
        loop {
            let (n, line) = self.next_line()?;
            if line == "end" {
                break;
            }
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "meta" if trees.is_empty() => {
                    let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                    metadata.insert(k.to_string(), v.to_string());
                }
                "tree" => {
                    let count: usize = rest.parse().map_err(|_| corrupt(format!("line {n}: bad node count")))?;
                    let nodes = (0..count).map(|_| self.node()).collect::<Result<Vec<_>>>()?;
                    let tree = Tree { nodes };
                    tree.check(n_features)
                        .map_err(|e| corrupt(format!("tree {}: {e}", trees.len())))?;
                    trees.push(tree);
                }
                _ => return Err(corrupt(format!("line {n}: unexpected {key:?}"))),
            }
        }
        if trees.len() > params.n_trees {
            return Err(corrupt("more trees than the configured budget"));
        }
        if let Some((n, _)) = self.lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(corrupt(format!("line {}: content after end", n + 1)));
        }
        Ok(GbdtModel {
            trees,
            base_score,
            params,
            feature_names,
            metadata,
        })
    }

    fn node(&mut self) -> Result<Node> {
        let (n, line) = self.next_line()?;
        let parts: Vec<&str> = line.split(' ').collect();
        let bad = || corrupt(format!("line {n}: malformed node"));
        match parts.as_slice() {
            ["leaf", v] => Ok(Node::Leaf {
                value: v.parse().map_err(|_| bad())?,
            }),
            ["split", f, t, l, r, g] => Ok(Node::Split {
                feature: f.parse().map_err(|_| bad())?,
                threshold: t.parse().map_err(|_| bad())?,
                left: l.parse().map_err(|_| bad())?,
                right: r.parse().map_err(|_| bad())?,
                gain: g.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}
