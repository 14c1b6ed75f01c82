mod common;

use proptest::prelude::*;
use spoofscan_core::selection::rfe;
use spoofscan_core::{FeatureTable, Preset};

fn table(x: Vec<Vec<f64>>, y: Vec<u8>) -> FeatureTable {
    let width = x[0].len();
    FeatureTable {
        source_paths: (0..x.len()).map(|i| format!("row{i}")).collect(),
        rows: x,
        labels: y,
        feature_names: (0..width).map(|j| format!("x{j}")).collect(),
    }
}

#[test]
fn planted_features_are_recovered() {
    let (x, y, informative) = common::planted_table(7, 400, 48);
    let result = rfe(&table(x, y), 3, 1, &Preset::B.hyperparams()).unwrap();
    assert_eq!(result.selected, informative);
    assert_eq!(result.per_round.len(), 45);
}

#[test]
fn larger_step_still_recovers_planted_features() {
    let (x, y, informative) = common::planted_table(11, 400, 48);
    let result = rfe(&table(x, y), 3, 5, &Preset::B.hyperparams()).unwrap();
    assert_eq!(result.selected, informative);
}

#[test]
fn smaller_k_selections_are_nested() {
    let (x, y, _) = common::planted_table(3, 200, 12);
    let t = table(x, y);
    let params = Preset::B.hyperparams();
    let mut previous: Option<Vec<usize>> = None;
    for k in (1..=12).rev() {
        let selected = rfe(&t, k, 1, &params).unwrap().selected;
        if let Some(prev) = &previous {
            assert!(selected.iter().all(|s| prev.contains(s)), "k={k}: {selected:?} not in {prev:?}");
        }
        previous = Some(selected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn selection_has_k_entries_and_ranking_is_a_permutation(
        seed in 0u64..1000,
        width in 2usize..8,
        k_frac in 0.0f64..1.0,
        step in 1usize..4,
    ) {
        let (x, y, _) = common::planted_table(seed, 40, width.max(3));
        let t = table(x, y);
        let k = 1 + ((t.width() - 1) as f64 * k_frac) as usize;
        let params = spoofscan_core::Hyperparams { n_trees: 5, ..Preset::B.hyperparams() };
        let result = rfe(&t, k, step, &params).unwrap();
        prop_assert_eq!(result.selected.len(), k);
        prop_assert!(result.selected.windows(2).all(|w| w[0] < w[1]));
        let mut ranking = result.ranking.clone();
        ranking.sort_unstable();
        prop_assert_eq!(ranking, (0..t.width()).collect::<Vec<_>>());
        let mut top: Vec<usize> = result.ranking[..k].to_vec();
        top.sort_unstable();
        prop_assert_eq!(top, result.selected);
    }
}
