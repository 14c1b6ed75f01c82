//! The examples in docs/FORMATS.md are produced or accepted verbatim.

use spoofscan_core::config::RunConfig;
use spoofscan_core::metrics::{evaluate, roc};
use spoofscan_core::{EvalReport, GbdtModel, Manifest, SelectionResult};

const DOC: &str = include_str!("../../../docs/FORMATS.md");

/// Body of the `n`-th ```text block after the heading `## {section}`.
fn nth_example(section: &str, n: usize) -> String {
    let start = DOC
        .find(&format!("## {section}\n"))
        .unwrap_or_else(|| panic!("no section {section}"));
    let block = DOC[start..].split("```text\n").nth(n + 1).expect("text block");
    block[..block.find("```").expect("closing fence")].to_string()
}

fn example(section: &str) -> String {
    nth_example(section, 0)
}

#[test]
fn manifest_example_parses() {
    let m = Manifest::from_reader(example("Manifest").as_bytes(), ".".into()).unwrap();
    assert_eq!(m.entries.len(), 2);
}

#[test]
fn config_example_is_the_default() {
    let text = example("Run configuration");
    assert_eq!(text, RunConfig::default().to_toml());
    assert_eq!(RunConfig::from_toml(&text).unwrap(), RunConfig::default());
}

#[test]
fn selection_example_round_trips() {
    let text = example("Selection file");
    assert_eq!(SelectionResult::from_text(&text).unwrap().to_text(), text);
}

#[test]
fn model_example_round_trips() {
    let text = example("Model file");
    assert_eq!(GbdtModel::from_text(&text).unwrap().to_text(), text);
}

#[test]
fn report_examples_match_the_fixture() {
    let mut report = evaluate(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap().with_model("preset-a", 0.5);
    assert_eq!(report.to_text(), example("Evaluation report"));
    report.context.insert("selection_mode".into(), "paper-order".into());
    let kv = nth_example("Evaluation report", 1);
    assert_eq!(report.to_kv(), kv);
    assert_eq!(EvalReport::from_kv(&kv).unwrap(), report);
}

#[test]
fn roc_example_matches_the_fixture() {
    let curve = roc(&[0.9, 0.6, 0.4, 0.2], &[1, 0, 1, 0]).unwrap();
    assert_eq!(curve.to_csv(), example("ROC curve"));
}
