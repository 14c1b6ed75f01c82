use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{info, warn};
use spoofscan_core::config::{RunConfig, SelectionMode};
use spoofscan_core::dataset::build_table;
use spoofscan_core::features::extract_file;
use spoofscan_core::metrics::{evaluate, roc};
use spoofscan_core::selection::{apply_selection, rfe};
use spoofscan_core::synth::{write_corpus, CorpusSpec};
use spoofscan_core::{
    format_real, Error, FeatureTable, GbdtModel, Label, Manifest, Preset, SelectionResult, FEATURE_NAMES,
};

use crate::GlobalArgs;

pub fn load_config(global: &GlobalArgs) -> Result<RunConfig> {
    let mut config = match &global.config {
        Some(path) => RunConfig::load(path).with_context(|| format!("loading config {}", path.display()))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if let Some(preset) = global.preset {
        config.preset = preset.into();
    }
    if global.select_on_train_only {
        config.selection_mode = SelectionMode::TrainOnly;
    }
    if let Some(t) = global.threshold {
        config.threshold = t;
    }
    config.validate()?;
    Ok(config)
}

/// `<out>.explore.txt` next to the feature table.
pub fn exploration_path(out_table: &Path) -> PathBuf {
    let mut name = out_table.file_stem().unwrap_or_default().to_os_string();
    name.push(".explore.txt");
    out_table.with_file_name(name)
}

/// `<report>.kv` next to the text report.
pub fn structured_report_path(out_report: &Path) -> PathBuf {
    let mut name = out_report.as_os_str().to_os_string();
    name.push(".kv");
    PathBuf::from(name)
}

pub fn extract(manifest_path: &Path, out_table: &Path, config: &RunConfig) -> Result<()> {
    let manifest = Manifest::load(manifest_path)?;
    let table = build_table(&manifest, &config.features)?;
    let (table, dropped) = table.clean()?;
    let report = table.explore().with_dropped(dropped.clone());
    for (path, count) in &report.duplicates {
        warn!("{path} is listed {count} times");
    }
    table.save(out_table)?;
    let explore_path = exploration_path(out_table);
    std::fs::write(&explore_path, report.to_text()).map_err(|e| Error::Io {
        path: explore_path.clone(),
        source: e,
    })?;
    println!("rows={} dropped={}", table.len(), dropped.len());
    Ok(())
}

pub fn select(table_path: &Path, out: &Path, k: Option<usize>, config: &RunConfig) -> Result<()> {
    let table = FeatureTable::load(table_path)?;
    require_both_classes(&table)?;
    let target_k = k.unwrap_or(config.target_k);
    let fit_rows = match config.selection_mode {
        SelectionMode::PaperOrder => table,
        SelectionMode::TrainOnly => table.split(config.test_fraction, config.seed)?.train,
    };
    let mut result = rfe(&fit_rows, target_k, config.rfe_step, &config.rfe_preset.hyperparams())?;
    result.mode = config.selection_mode;
    result.save(out)?;
    for name in result.selected_names() {
        println!("{name}");
    }
    Ok(())
}

fn load_selection(path: &Path, table: &FeatureTable) -> Result<SelectionResult> {
    let selection = SelectionResult::load(path)?;
    if selection.feature_names != table.feature_names {
        return Err(Error::SchemaMismatch(format!(
            "selection {} was computed over different feature columns",
            path.display()
        ))
        .into());
    }
    Ok(selection)
}

fn require_both_classes(table: &FeatureTable) -> Result<()> {
    if table.class_counts().contains(&0) {
        return Err(Error::SingleClass.into());
    }
    Ok(())
}

fn accuracy(model: &GbdtModel, table: &FeatureTable, threshold: f64) -> Result<Option<f64>> {
    if table.is_empty() {
        return Ok(None);
    }
    let mut correct = 0;
    for (row, &label) in table.rows.iter().zip(&table.labels) {
        if model.predict_label(row, threshold)? == label {
            correct += 1;
        }
    }
    Ok(Some(correct as f64 / table.len() as f64))
}

pub fn train(table_path: &Path, selection_path: Option<&Path>, out_model: &Path, config: &RunConfig) -> Result<()> {
    let table = FeatureTable::load(table_path)?;
    require_both_classes(&table)?;
    let (table, mode) = match selection_path {
        Some(path) => {
            let selection = load_selection(path, &table)?;
            (apply_selection(&table, &selection)?, Some(selection.mode))
        }
        None => (table, None),
    };
    let split = table.split(config.test_fraction, config.seed)?;

    println!("{:<24} {:>10} {:>10}", "model", "train_acc", "test_acc");
    let mut chosen = None;
    for preset in Preset::ALL {
        let model = GbdtModel::fit(&split.train.rows, &split.train.labels, &preset.hyperparams())?
            .with_feature_names(table.feature_names.clone());
        let train_acc = accuracy(&model, &split.train, config.threshold)?;
        let test_acc = accuracy(&model, &split.test, config.threshold)?;
        let show = |a: Option<f64>| a.map_or_else(|| "n/a".to_string(), |a| format!("{a:.4}"));
        println!(
            "{:<24} {:>10} {:>10}",
            format!("{preset} (boosted trees)"),
            show(train_acc),
            show(test_acc)
        );
        if preset == config.preset {
            chosen = Some(model);
        }
    }
    println!("{:<24} {:>21}", "deep tabular", "not implemented");

    let mut model = chosen.expect("configured preset is one of Preset::ALL");
    let meta = [
        ("preset", config.preset.name().to_string()),
        ("seed", config.seed.to_string()),
        ("test_fraction", format_real(config.test_fraction)),
        ("selection_mode", mode.map_or("none", SelectionMode::as_str).to_string()),
    ];
    for (k, v) in meta {
        model.metadata.insert(k.to_string(), v);
    }
    model.save(out_model)?;
    info!("saved {} to {}", config.preset, out_model.display());
    Ok(())
}

/// Table column of every model feature, by name.
fn model_columns(model: &GbdtModel, names: &[String]) -> Result<Vec<usize>> {
    model
        .feature_names
        .iter()
        .map(|f| {
            names
                .iter()
                .position(|n| n == f)
                .ok_or_else(|| Error::SchemaMismatch(format!("model feature {f} is not a table column")).into())
        })
        .collect()
}

fn check_selection_matches(selection_path: &Path, model: &GbdtModel) -> Result<()> {
    let selection = SelectionResult::load(selection_path)?;
    if selection.selected_names() != model.feature_names.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(Error::SchemaMismatch(format!(
            "model features differ from selection {}",
            selection_path.display()
        ))
        .into());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn eval(
    model_path: &Path,
    table_path: &Path,
    selection_path: Option<&Path>,
    out_report: &Path,
    out_roc: &Path,
    all_rows: bool,
    config: &RunConfig,
) -> Result<()> {
    let model = GbdtModel::load(model_path)?;
    let table = FeatureTable::load(table_path)?;
    if let Some(path) = selection_path {
        check_selection_matches(path, &model)?;
    }
    let table = table.select_columns(&model_columns(&model, &table.feature_names)?)?;
    let rows = if all_rows {
        table
    } else {
        if model.metadata.get("seed") != Some(&config.seed.to_string()) {
            warn!("model was trained with a different split seed; test rows may overlap its training rows");
        }
        table.split(config.test_fraction, config.seed)?.test
    };
    if rows.is_empty() {
        bail!(Error::EmptyInput);
    }
    let scores = model.predict_proba_batch(&rows.rows)?;
    let predicted: Vec<u8> = scores.iter().map(|&p| u8::from(p >= config.threshold)).collect();
    let model_id = model
        .metadata
        .get("preset")
        .cloned()
        .unwrap_or_else(|| model_path.display().to_string());
    let mut report = evaluate(&rows.labels, &predicted)?.with_model(model_id, config.threshold);
    report.context = model.metadata.clone();
    report
        .context
        .insert("rows".into(), if all_rows { "all" } else { "test" }.into());
    let curve = roc(&scores, &rows.labels)?;

    let write = |path: &Path, text: String| -> Result<()> {
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    };
    write(out_report, report.to_text())?;
    write(&structured_report_path(out_report), report.to_kv())?;
    curve.save_csv(out_roc)?;
    print!("{}", report.to_text());
    println!("auc={}", format_real(curve.auc));
    Ok(())
}

pub fn infer(model_path: &Path, audio: &Path, selection_path: Option<&Path>, config: &RunConfig) -> Result<()> {
    let model = GbdtModel::load(model_path)?;
    if let Some(path) = selection_path {
        check_selection_matches(path, &model)?;
    }
    let features = extract_file(audio, &config.features)?;
    let names: Vec<String> = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    let row: Vec<f64> = model_columns(&model, &names)?
        .into_iter()
        .map(|c| features.0[c])
        .collect();
    let proba = model.predict_proba(&row)?;
    let label = if proba >= config.threshold { Label::Fake } else { Label::Real };
    println!("label={} proba_fake={proba}", label.as_str());
    Ok(())
}

pub fn synth_corpus(
    dir: &Path,
    n_real: usize,
    n_fake: usize,
    duration: f64,
    sample_rate: u32,
    config: &RunConfig,
) -> Result<()> {
    let spec = CorpusSpec {
        n_real,
        n_fake,
        duration,
        sample_rate,
        seed: config.seed,
    };
    let manifest = write_corpus(dir, &spec)?;
    println!("{}", manifest.display());
    Ok(())
}
