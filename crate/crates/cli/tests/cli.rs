use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spoofscan_core::{FeatureTable, FEATURE_NAMES};

fn spoofscan(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spoofscan"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = spoofscan(args, cwd);
    assert!(
        out.status.success(),
        "spoofscan {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str], cwd: &Path) -> String {
    let out = spoofscan(args, cwd);
    assert!(!out.status.success(), "spoofscan {args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

/// A four-second corpus of 6 + 6 short clips, extracted to `feats.csv`.
fn small_corpus(dir: &Path) -> PathBuf {
    ok(
        &["synth-corpus", "corpus", "--n-real", "6", "--n-fake", "6", "--duration", "0.5"],
        dir,
    );
    ok(&["extract", "corpus/manifest.csv", "feats.csv"], dir);
    dir.join("feats.csv")
}

fn table_with(rows: Vec<Vec<f64>>, labels: Vec<u8>) -> FeatureTable {
    FeatureTable {
        source_paths: (0..rows.len()).map(|i| format!("clip{i}.wav")).collect(),
        rows,
        labels,
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
    }
}

#[test]
fn extract_writes_table_and_exploration_report() {
    let dir = tempfile::tempdir().unwrap();
    let feats = small_corpus(dir.path());
    let text = std::fs::read_to_string(&feats).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert!(text.starts_with("path,label,pitch_mean,"));
    let report = std::fs::read_to_string(dir.path().join("feats.explore.txt")).unwrap();
    assert!(report.starts_with("rows: 12\nreal: 6 (0.5000)\nfake: 6 (0.5000)\n"));

    ok(&["extract", "corpus/manifest.csv", "again.csv"], dir.path());
    assert_eq!(std::fs::read(&feats).unwrap(), std::fs::read(dir.path().join("again.csv")).unwrap());
}

#[test]
fn bad_label_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), "path,label\na.wav,real\nb.wav,human\n").unwrap();
    let err = fails(&["extract", "m.csv", "out.csv"], dir.path());
    assert!(err.contains("row 3"), "{err}");
    assert!(err.contains("human"), "{err}");
}

#[test]
fn missing_files_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("m.csv"), "path,label\nnope.wav,real\n").unwrap();
    let err = fails(&["extract", "m.csv", "out.csv"], dir.path());
    assert!(err.contains("nope.wav"), "{err}");
}

#[test]
fn select_requires_an_existing_table() {
    let dir = tempfile::tempdir().unwrap();
    fails(&["select", "absent.csv", "sel.txt"], dir.path());
}

#[test]
fn select_all_features_lists_every_name() {
    let dir = tempfile::tempdir().unwrap();
    small_corpus(dir.path());
    let out = ok(&["select", "feats.csv", "sel.txt", "--k", "48"], dir.path());
    assert_eq!(out.lines().collect::<Vec<_>>(), FEATURE_NAMES.to_vec());
    let err = fails(&["select", "feats.csv", "sel.txt", "--k", "49"], dir.path());
    assert!(err.contains("49"), "{err}");
}

#[test]
fn train_rejects_a_single_class() {
    let dir = tempfile::tempdir().unwrap();
    table_with(vec![vec![1.0; 48]; 4], vec![0; 4])
        .save(dir.path().join("t.csv"))
        .unwrap();
    let err = fails(&["train", "t.csv", "m.txt"], dir.path());
    assert!(err.to_lowercase().contains("class"), "{err}");
}

#[test]
fn train_on_separable_table_fits_exactly_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<Vec<f64>> = (0..40)
        .map(|i| (0..48).map(|j| if j == 7 { i as f64 } else { ((i * 31 + j * 17) % 13) as f64 }).collect())
        .collect();
    let labels = (0..40).map(|i| u8::from(i >= 20)).collect();
    table_with(rows, labels).save(dir.path().join("t.csv")).unwrap();
    let out = ok(&["train", "t.csv", "m1.txt"], dir.path());
    for preset in ["preset-a", "preset-b"] {
        let line = out.lines().find(|l| l.starts_with(preset)).unwrap();
        assert_eq!(line.split_whitespace().nth(3), Some("1.0000"), "{line}");
    }
    assert!(out.contains("deep tabular") && out.contains("not implemented"));
    ok(&["train", "t.csv", "m2.txt"], dir.path());
    assert_eq!(
        std::fs::read(dir.path().join("m1.txt")).unwrap(),
        std::fs::read(dir.path().join("m2.txt")).unwrap()
    );
}

#[test]
fn eval_report_and_roc_agree() {
    let dir = tempfile::tempdir().unwrap();
    small_corpus(dir.path());
    ok(&["--preset", "b", "train", "feats.csv", "model.txt"], dir.path());
    let out = ok(&["--all-rows", "eval", "model.txt", "feats.csv", "report.txt", "roc.csv"], dir.path());
    let names: Vec<&str> = out
        .lines()
        .filter_map(|l| {
            ["Real", "Fake", "Accuracy", "Macro avg.", "Weighted avg."]
                .into_iter()
                .find(|n| l.trim_start().starts_with(n))
        })
        .collect();
    assert_eq!(names, ["Real", "Fake", "Accuracy", "Macro avg.", "Weighted avg."]);
    assert!(out.contains("preset: preset-b"));
    let printed = out.lines().find_map(|l| l.strip_prefix("auc=")).unwrap();
    let roc = std::fs::read_to_string(dir.path().join("roc.csv")).unwrap();
    assert_eq!(roc.lines().last().unwrap(), format!("# auc={printed}"));
    assert!(roc.lines().nth(1).unwrap().starts_with("inf,"));
    let kv = std::fs::read_to_string(dir.path().join("report.txt.kv")).unwrap();
    assert!(kv.contains("context.rows = all"));
}

#[test]
fn eval_rejects_a_model_from_a_newer_format() {
    let dir = tempfile::tempdir().unwrap();
    small_corpus(dir.path());
    ok(&["--preset", "b", "train", "feats.csv", "model.txt"], dir.path());
    let text = std::fs::read_to_string(dir.path().join("model.txt")).unwrap();
    std::fs::write(dir.path().join("model.txt"), text.replacen("format_version 1", "format_version 9", 1)).unwrap();
    let err = fails(&["eval", "model.txt", "feats.csv", "r.txt", "roc.csv"], dir.path());
    assert!(err.contains('9'), "{err}");
}

#[test]
fn infer_prints_a_label_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    small_corpus(dir.path());
    ok(&["--preset", "b", "train", "feats.csv", "model.txt"], dir.path());
    let a = ok(&["infer", "model.txt", "corpus/fake_0000.wav"], dir.path());
    let b = ok(&["infer", "model.txt", "corpus/fake_0000.wav"], dir.path());
    assert_eq!(a, b);
    assert!(a.starts_with("label=fake proba_fake=") || a.starts_with("label=real proba_fake="), "{a}");
    let proba: f64 = a.trim().rsplit('=').next().unwrap().parse().unwrap();
    assert_eq!(a.starts_with("label=fake"), proba >= 0.5);

    std::fs::write(dir.path().join("bad.wav"), b"RIFF\x10\x00\x00\x00WAVEjunk").unwrap();
    let err = fails(&["infer", "model.txt", "bad.wav"], dir.path());
    assert!(err.contains("bad.wav"), "{err}");
}

#[test]
fn train_only_selection_is_recorded_in_the_report() {
    let dir = tempfile::tempdir().unwrap();
    small_corpus(dir.path());
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "test_fraction = 0.34\nrfe_step = 8\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    ok(&["--config", cfg, "--select-on-train-only", "select", "feats.csv", "sel.txt", "--k", "8"], dir.path());
    ok(&["--config", cfg, "--preset", "b", "train", "feats.csv", "model.txt", "--selection", "sel.txt"], dir.path());
    let out = ok(
        &["--config", cfg, "eval", "model.txt", "feats.csv", "r.txt", "roc.csv", "--selection", "sel.txt"],
        dir.path(),
    );
    assert!(out.contains("selection_mode: train-only"), "{out}");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "sed = 4\n").unwrap();
    let err = fails(&["--config", "c.toml", "synth-corpus", "x"], dir.path());
    assert!(err.contains("sed"), "{err}");
}
