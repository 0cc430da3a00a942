//! The t x k base-model matrix (one binary tree per meta-feature combination
//! and candidate algorithm), its accuracy/diversity filter, the weighted
//! voting combination of the flagged models, and ranked recommendations.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{train_tree, DecisionTree, TreeParams};
use crate::metadata::{assemble_meta_dataset, assemble_row, br_transform, FamilyCombo};
use crate::metafeatures::MetaFeatureGroupSet;
use crate::metatarget::MetaTarget;
use crate::stats::{build_contingency, diversity_verdict, ranks_descending};
use crate::tabular::{TabularDataset, Value};

/// Which of the two filters of the model-selection procedure apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMode {
    All,
    Accurate,
    Diverse,
    AccurateAndDiverse,
}

impl FilterMode {
    pub const ALL_MODES: [FilterMode; 4] = [
        FilterMode::All,
        FilterMode::Accurate,
        FilterMode::Diverse,
        FilterMode::AccurateAndDiverse,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FilterMode::All => "all",
            FilterMode::Accurate => "accurate",
            FilterMode::Diverse => "diverse",
            FilterMode::AccurateAndDiverse => "accurate-and-diverse",
        }
    }
}

impl FromStr for FilterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<FilterMode> {
        match s {
            "all" => Ok(FilterMode::All),
            "accurate" => Ok(FilterMode::Accurate),
            "diverse" => Ok(FilterMode::Diverse),
            "accurate-and-diverse" => Ok(FilterMode::AccurateAndDiverse),
            other => Err(Error::Config(format!(
                "unknown filter mode {other}; expected all|accurate|diverse|accurate-and-diverse"
            ))),
        }
    }
}

impl std::fmt::Display for FilterMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Grid of t x k binary trees; model (i, j) is trained on the Binary
/// Relevance dataset of algorithm j under feature combination i.
#[derive(Debug, Clone)]
pub struct ModelMatrix {
    pub combos: Vec<FamilyCombo>,
    pub algorithm_names: Vec<String>,
    /// models[i][j]: combination i, algorithm j.
    pub models: Vec<Vec<DecisionTree>>,
}

impl ModelMatrix {
    pub fn t(&self) -> usize {
        self.combos.len()
    }

    pub fn k(&self) -> usize {
        self.algorithm_names.len()
    }

    /// Probability matrix P for one problem: entry (i, j) is model (i, j)'s
    /// predicted probability that algorithm j is appropriate.
    pub fn probability_matrix(&self, features: &MetaFeatureGroupSet) -> Result<Vec<Vec<f64>>> {
        self.combos
            .iter()
            .zip(&self.models)
            .map(|(combo, row)| {
                let x = numeric_row(&assemble_row(features, combo));
                row.iter()
                    .map(|tree| Ok(tree.predict_proba(&x)?[1]))
                    .collect()
            })
            .collect()
    }
}

fn numeric_row(values: &[f64]) -> Vec<Value> {
    values.iter().map(|&v| Value::Num(v)).collect()
}

/// Trains the full model matrix; combinations train in parallel and land in
/// combo order, so the result is deterministic.
pub fn train_model_matrix(
    features: &[MetaFeatureGroupSet],
    targets: &[MetaTarget],
    combos: &[FamilyCombo],
    params: &TreeParams,
    algorithm_names: &[String],
) -> Result<ModelMatrix> {
    if combos.is_empty() {
        return Err(Error::Config("no feature combinations".into()));
    }
    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let models: Vec<Vec<DecisionTree>> = combos
        .par_iter()
        .map(|combo| {
            let meta = assemble_meta_dataset(features, targets, combo)?;
            br_transform(&meta)
                .iter()
                .map(|binary| {
                    let d = TabularDataset::from_numeric(
                        format!("combo{}_alg{}", combo.combo_id, binary.algorithm_index),
                        &meta.feature_names,
                        binary.rows,
                        binary.bits.iter().map(|&b| b as u32).collect(),
                        2,
                    )?;
                    train_tree(&d, params)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelMatrix {
        combos: combos.to_vec(),
        algorithm_names: algorithm_names.to_vec(),
        models,
    })
}

/// Validation behavior of one base model: 0/1 accuracy plus the per-row
/// (predicted label, true label) outputs the diversity filter consumes.
#[derive(Debug, Clone)]
pub struct ValidationRecord {
    pub accuracy: f64,
    pub outputs: Vec<(u32, u32)>,
}

/// Evaluates every model of the matrix on validation meta-instances.
/// Returned grid is t x k.
pub fn validate_matrix(
    matrix: &ModelMatrix,
    features: &[MetaFeatureGroupSet],
    targets: &[MetaTarget],
) -> Result<Vec<Vec<ValidationRecord>>> {
    if features.len() != targets.len() {
        return Err(Error::LengthMismatch(format!(
            "{} validation feature sets vs {} targets",
            features.len(),
            targets.len()
        )));
    }
    if features.is_empty() {
        return Err(Error::EmptyDataset);
    }
    matrix
        .combos
        .iter()
        .zip(&matrix.models)
        .map(|(combo, row)| {
            let xs: Vec<Vec<Value>> = features
                .iter()
                .map(|set| numeric_row(&assemble_row(set, combo)))
                .collect();
            row.iter()
                .enumerate()
                .map(|(j, tree)| {
                    let mut outputs = Vec::with_capacity(xs.len());
                    let mut correct = 0usize;
                    for (x, target) in xs.iter().zip(targets) {
                        let predicted = tree.predict_label(x)?;
                        let truth = target.bits[j] as u32;
                        if predicted == truth {
                            correct += 1;
                        }
                        outputs.push((predicted, truth));
                    }
                    Ok(ValidationRecord {
                        accuracy: correct as f64 / xs.len() as f64,
                        outputs,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// t x k selection flags; per column at least one flag is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagMatrix {
    pub flags: Vec<Vec<u8>>,
}

impl FlagMatrix {
    pub fn kept_in_column(&self, j: usize) -> usize {
        self.flags.iter().filter(|row| row[j] == 1).count()
    }
}

/// Filters one column of base models. The accuracy filter drops models
/// below 0.5 (ties at exactly 0.5 stay). The diversity filter scans models
/// in descending validation accuracy and drops every lower-ranked survivor
/// whose error behavior is not diverse from a kept model. If everything is
/// dropped, the single best-accuracy model is restored so the ensemble
/// denominator never vanishes.
pub fn model_filter(
    accs: &[f64],
    outs: &[Vec<(u32, u32)>],
    alpha: f64,
    mode: FilterMode,
) -> Result<Vec<u8>> {
    let t = accs.len();
    if t == 0 || outs.len() != t {
        return Err(Error::LengthMismatch(format!(
            "{} accuracies vs {} output sequences",
            t,
            outs.len()
        )));
    }
    let rows = outs[0].len();
    if outs.iter().any(|o| o.len() != rows) {
        return Err(Error::LengthMismatch(
            "validation outputs must share one validation set".into(),
        ));
    }
    let mut flags = vec![1u8; t];

    if matches!(mode, FilterMode::Accurate | FilterMode::AccurateAndDiverse) {
        for (flag, &acc) in flags.iter_mut().zip(accs) {
            if acc < 0.5 {
                *flag = 0;
            }
        }
    }

    if matches!(mode, FilterMode::Diverse | FilterMode::AccurateAndDiverse) {
        // descending accuracy; equal accuracies keep combo order
        let mut order: Vec<usize> = (0..t).collect();
        order.sort_by(|&a, &b| accs[b].partial_cmp(&accs[a]).unwrap().then(a.cmp(&b)));
        for i in 0..t {
            let kept = order[i];
            if flags[kept] == 0 {
                continue;
            }
            for &lower in &order[i + 1..] {
                if flags[lower] == 0 {
                    continue;
                }
                let pred_kept: Vec<u32> = outs[kept].iter().map(|&(p, _)| p).collect();
                let pred_lower: Vec<u32> = outs[lower].iter().map(|&(p, _)| p).collect();
                let truth: Vec<u32> = outs[kept].iter().map(|&(_, t)| t).collect();
                let table = build_contingency(&pred_kept, &pred_lower, &truth, 2)?;
                if !diversity_verdict(&table, alpha).diverse {
                    flags[lower] = 0;
                }
            }
        }
    }

    if flags.iter().all(|&f| f == 0) {
        let mut best = 0;
        for (i, &acc) in accs.iter().enumerate() {
            if acc > accs[best] {
                best = i;
            }
        }
        flags[best] = 1;
    }
    Ok(flags)
}

/// Applies the filter to every column of the validation grid.
pub fn filter_matrix(
    records: &[Vec<ValidationRecord>],
    alpha: f64,
    mode: FilterMode,
) -> Result<FlagMatrix> {
    let t = records.len();
    if t == 0 {
        return Err(Error::EmptyDataset);
    }
    let k = records[0].len();
    let mut flags = vec![vec![0u8; k]; t];
    for j in 0..k {
        let accs: Vec<f64> = records.iter().map(|row| row[j].accuracy).collect();
        let outs: Vec<Vec<(u32, u32)>> = records.iter().map(|row| row[j].outputs.clone()).collect();
        let column = model_filter(&accs, &outs, alpha, mode)?;
        for (i, &f) in column.iter().enumerate() {
            flags[i][j] = f;
        }
    }
    Ok(FlagMatrix { flags })
}

/// Weighted-voting combination: the flagged models' probabilities in each
/// column are averaged, so the output stays inside their convex hull.
pub fn ensemble_predict(
    matrix: &ModelMatrix,
    flags: &FlagMatrix,
    features: &MetaFeatureGroupSet,
) -> Result<Vec<f64>> {
    let probabilities = matrix.probability_matrix(features)?;
    Ok(combine_columns(&probabilities, &flags.flags))
}

/// The same combination applied to a precomputed probability matrix.
pub fn combine_columns(probabilities: &[Vec<f64>], flags: &[Vec<u8>]) -> Vec<f64> {
    let k = probabilities.first().map(|r| r.len()).unwrap_or(0);
    (0..k)
        .map(|j| {
            let mut sum = 0.0;
            let mut count = 0.0;
            for (p_row, f_row) in probabilities.iter().zip(flags) {
                if f_row[j] == 1 {
                    sum += p_row[j];
                    count += 1.0;
                }
            }
            if count > 0.0 {
                sum / count
            } else {
                0.0
            }
        })
        .collect()
}

/// Descending-probability ranking with tie-averaged ranks.
pub fn rank_algorithms(probs: &[f64]) -> Vec<f64> {
    ranks_descending(probs)
}

/// Full recommendation surface: probabilities, threshold picks, and ranks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Recommendation {
    pub probabilities: Vec<f64>,
    pub picks: Vec<u8>,
    pub ranks: Vec<f64>,
}

pub fn recommend(probs: &[f64], pick_threshold: f64) -> Recommendation {
    Recommendation {
        probabilities: probs.to_vec(),
        picks: probs
            .iter()
            .map(|&p| u8::from(p > pick_threshold))
            .collect(),
        ranks: rank_algorithms(probs),
    }
}

/// Writes a recommendation as CSV: algorithm, probability, pick, rank.
pub fn write_recommendation_csv(
    rec: &Recommendation,
    algorithm_names: &[String],
    path: &Path,
) -> Result<()> {
    let mut out = String::from("algorithm,probability,pick,rank\n");
    for (j, name) in algorithm_names.iter().enumerate() {
        out.push_str(&format!(
            "{name},{},{},{}\n",
            rec.probabilities[j], rec.picks[j], rec.ranks[j]
        ));
    }
    crate::metafeatures::write_atomic(path, &out)
}

/// Persisted ensemble: manifest, flags CSV, and one model JSON per grid
/// cell, written to a staging directory and renamed into place.
pub struct EnsembleBundle {
    pub matrix: ModelMatrix,
    pub flags: FlagMatrix,
    pub manifest: BundleManifest,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleManifest {
    pub algorithm_names: Vec<String>,
    pub combos: Vec<FamilyCombo>,
    pub alpha: f64,
    pub mode: FilterMode,
    pub pick_threshold: f64,
    pub tree_params: TreeParams,
    pub seed: u64,
}

impl EnsembleBundle {
    pub fn recommend_for(&self, features: &MetaFeatureGroupSet) -> Result<Recommendation> {
        let probs = ensemble_predict(&self.matrix, &self.flags, features)?;
        Ok(recommend(&probs, self.manifest.pick_threshold))
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let staging = dir.with_extension("staging");
        if staging.exists() {
            fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
        }
        fs::create_dir_all(staging.join("models")).map_err(|e| Error::io(&staging, e))?;

        let manifest = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| Error::Serde {
                path: staging.join("manifest.json"),
                message: e.to_string(),
            })?;
        fs::write(staging.join("manifest.json"), manifest)
            .map_err(|e| Error::io(staging.join("manifest.json"), e))?;

        let mut flags_csv = String::from("combo_id");
        for name in &self.matrix.algorithm_names {
            flags_csv.push(',');
            flags_csv.push_str(name);
        }
        flags_csv.push('\n');
        for (combo, row) in self.matrix.combos.iter().zip(&self.flags.flags) {
            flags_csv.push_str(&combo.combo_id.to_string());
            for &f in row {
                flags_csv.push(',');
                flags_csv.push_str(if f == 1 { "1" } else { "0" });
            }
            flags_csv.push('\n');
        }
        fs::write(staging.join("flags.csv"), flags_csv)
            .map_err(|e| Error::io(staging.join("flags.csv"), e))?;

        for (combo, row) in self.matrix.combos.iter().zip(&self.matrix.models) {
            for (j, tree) in row.iter().enumerate() {
                let name = format!("models/m{:02}_{:02}.json", combo.combo_id, j);
                let json = serde_json::to_string(tree).map_err(|e| Error::Serde {
                    path: staging.join(&name),
                    message: e.to_string(),
                })?;
                fs::write(staging.join(&name), json)
                    .map_err(|e| Error::io(staging.join(&name), e))?;
            }
        }

        if dir.exists() {
            fs::remove_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::rename(&staging, dir).map_err(|e| Error::io(dir, e))
    }

    pub fn load(dir: &Path) -> Result<EnsembleBundle> {
        let manifest_path = dir.join("manifest.json");
        let manifest_text =
            fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
        let manifest: BundleManifest =
            serde_json::from_str(&manifest_text).map_err(|e| Error::Serde {
                path: manifest_path.clone(),
                message: e.to_string(),
            })?;

        let flags_path = dir.join("flags.csv");
        let flags_text = fs::read_to_string(&flags_path).map_err(|e| Error::io(&flags_path, e))?;
        let mut flags = Vec::new();
        for line in flags_text.lines().skip(1) {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != manifest.algorithm_names.len() + 1 {
                return Err(Error::MalformedInput(format!(
                    "{}: bad flag row {line}",
                    flags_path.display()
                )));
            }
            flags.push(
                cells[1..]
                    .iter()
                    .map(|c| if *c == "1" { 1u8 } else { 0u8 })
                    .collect::<Vec<u8>>(),
            );
        }
        if flags.len() != manifest.combos.len() {
            return Err(Error::MalformedInput(format!(
                "{}: {} flag rows for {} combos",
                flags_path.display(),
                flags.len(),
                manifest.combos.len()
            )));
        }

        let mut models = Vec::with_capacity(manifest.combos.len());
        for combo in &manifest.combos {
            let mut row = Vec::with_capacity(manifest.algorithm_names.len());
            for j in 0..manifest.algorithm_names.len() {
                let path = dir.join(format!("models/m{:02}_{:02}.json", combo.combo_id, j));
                let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let tree: DecisionTree = serde_json::from_str(&text).map_err(|e| Error::Serde {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                row.push(tree);
            }
            models.push(row);
        }
        Ok(EnsembleBundle {
            matrix: ModelMatrix {
                combos: manifest.combos.clone(),
                algorithm_names: manifest.algorithm_names.clone(),
                models,
            },
            flags: FlagMatrix { flags },
            manifest,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadata::feature_combinations;
    use crate::metafeatures::extract_all;
    use crate::synth;
    use approx::assert_abs_diff_eq;

    fn small_corpus(n: usize) -> (Vec<MetaFeatureGroupSet>, Vec<MetaTarget>) {
        let features: Vec<_> = (0..n as u64)
            .map(|i| extract_all(&synth::generate_problem(i, 21), 4).unwrap())
            .collect();
        let targets: Vec<_> = (0..n)
            .map(|i| MetaTarget {
                bits: vec![1, (i % 2) as u8, ((i / 2) % 2) as u8],
            })
            .collect();
        (features, targets)
    }

    #[test]
    fn matrix_shape_is_combos_by_algorithms() {
        let (features, targets) = small_corpus(12);
        let combos = feature_combinations(5).unwrap();
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let matrix =
            train_model_matrix(&features, &targets, &combos, &TreeParams::default(), &names)
                .unwrap();
        assert_eq!(matrix.t(), 31);
        assert_eq!(matrix.k(), 3);
        assert_eq!(matrix.models.len(), 31);
        assert!(matrix.models.iter().all(|row| row.len() == 3));
    }

    #[test]
    fn filter_modes_nest() {
        let (features, targets) = small_corpus(16);
        let combos = feature_combinations(3).unwrap();
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let matrix =
            train_model_matrix(&features, &targets, &combos, &TreeParams::default(), &names)
                .unwrap();
        let records = validate_matrix(&matrix, &features, &targets).unwrap();
        let all = filter_matrix(&records, 0.05, FilterMode::All).unwrap();
        let accurate = filter_matrix(&records, 0.05, FilterMode::Accurate).unwrap();
        let diverse = filter_matrix(&records, 0.05, FilterMode::Diverse).unwrap();
        let both = filter_matrix(&records, 0.05, FilterMode::AccurateAndDiverse).unwrap();
        for i in 0..matrix.t() {
            for j in 0..matrix.k() {
                assert!(both.flags[i][j] <= accurate.flags[i][j]);
                assert!(both.flags[i][j] <= diverse.flags[i][j]);
                assert!(accurate.flags[i][j] <= all.flags[i][j]);
                assert!(diverse.flags[i][j] <= all.flags[i][j]);
            }
        }
        // every column keeps at least one model under every mode
        for mode_flags in [&all, &accurate, &diverse, &both] {
            for j in 0..matrix.k() {
                assert!(mode_flags.kept_in_column(j) >= 1);
            }
        }
    }

    #[test]
    fn kept_set_under_diverse_is_pairwise_diverse() {
        let (features, targets) = small_corpus(16);
        let combos = feature_combinations(3).unwrap();
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let matrix =
            train_model_matrix(&features, &targets, &combos, &TreeParams::default(), &names)
                .unwrap();
        let records = validate_matrix(&matrix, &features, &targets).unwrap();
        let flags = filter_matrix(&records, 0.05, FilterMode::Diverse).unwrap();
        for j in 0..matrix.k() {
            let kept: Vec<usize> = (0..matrix.t()).filter(|&i| flags.flags[i][j] == 1).collect();
            for a in 0..kept.len() {
                for b in a + 1..kept.len() {
                    let oa = &records[kept[a]][j].outputs;
                    let ob = &records[kept[b]][j].outputs;
                    let p1: Vec<u32> = oa.iter().map(|&(p, _)| p).collect();
                    let p2: Vec<u32> = ob.iter().map(|&(p, _)| p).collect();
                    let truth: Vec<u32> = oa.iter().map(|&(_, t)| t).collect();
                    let table = build_contingency(&p1, &p2, &truth, 2).unwrap();
                    assert!(
                        diversity_verdict(&table, 0.05).diverse,
                        "kept pair ({}, {}) in column {j} is not diverse",
                        kept[a],
                        kept[b]
                    );
                }
            }
        }
    }

    #[test]
    fn filter_hand_traced_greedy_scan() {
        // three models: 1 and 2 always agree (dependent), 3 independent
        let n = 60;
        let truth: Vec<u32> = (0..n).map(|i| (i % 2) as u32).collect();
        // model 1: wrong on every 10th instance
        let out1: Vec<(u32, u32)> = truth
            .iter()
            .enumerate()
            .map(|(i, &t)| (if i % 10 == 0 { 1 - t } else { t }, t))
            .collect();
        // model 2: identical error pattern
        let out2 = out1.clone();
        // model 3: wrong on a disjoint, scattered set
        let out3: Vec<(u32, u32)> = truth
            .iter()
            .enumerate()
            .map(|(i, &t)| (if i % 7 == 3 { 1 - t } else { t }, t))
            .collect();
        let accs = vec![0.9, 0.8, 0.7];
        let flags = model_filter(
            &accs,
            &[out1, out2, out3],
            0.05,
            FilterMode::Diverse,
        )
        .unwrap();
        assert_eq!(flags, vec![1, 0, 1]);
    }

    #[test]
    fn all_inaccurate_falls_back_to_single_best() {
        let outs: Vec<Vec<(u32, u32)>> = (0..3)
            .map(|m| (0..20).map(|i| ((((i + m) % 2)) as u32, ((i + 1) % 2) as u32)).collect())
            .collect();
        let flags = model_filter(
            &[0.4, 0.3, 0.2],
            &outs,
            0.05,
            FilterMode::AccurateAndDiverse,
        )
        .unwrap();
        assert_eq!(flags, vec![1, 0, 0]);
    }

    #[test]
    fn identical_models_lose_the_weaker_copy() {
        let outs: Vec<(u32, u32)> = (0..30)
            .map(|i| (if i % 3 == 0 { 1 } else { 0 }, 0))
            .collect();
        let flags = model_filter(
            &[0.9, 0.8],
            &[outs.clone(), outs],
            0.05,
            FilterMode::Diverse,
        )
        .unwrap();
        assert_eq!(flags, vec![1, 0]);
    }

    #[test]
    fn combination_is_convex_and_exact_for_known_inputs() {
        // two flagged models at 0.6 and 0.8 average to 0.7
        let probabilities = vec![vec![0.6], vec![0.8], vec![0.1]];
        let flags = vec![vec![1], vec![1], vec![0]];
        let combined = combine_columns(&probabilities, &flags);
        assert_abs_diff_eq!(combined[0], 0.7, epsilon = 1e-12);

        // single flagged model passes through unchanged
        let flags = vec![vec![0], vec![1], vec![0]];
        let combined = combine_columns(&probabilities, &flags);
        assert_abs_diff_eq!(combined[0], 0.8, epsilon = 1e-12);
    }

    #[test]
    fn ranks_reproduce_published_example() {
        assert_eq!(
            rank_algorithms(&[0.7, 0.4, 0.8, 0.5, 0.7]),
            vec![2.5, 5.0, 1.0, 4.0, 2.5]
        );
    }

    #[test]
    fn picks_use_strict_threshold() {
        let rec = recommend(&[0.7, 0.4, 0.8, 0.5, 0.7], 0.5);
        assert_eq!(rec.picks, vec![1, 0, 1, 0, 1]);
        let all_half = recommend(&[0.5, 0.5], 0.5);
        assert_eq!(all_half.picks, vec![0, 0]);
        let zero_threshold = recommend(&[0.5, 0.0], 0.0);
        assert_eq!(zero_threshold.picks, vec![1, 0]);
    }

    #[test]
    fn bundle_round_trip_preserves_predictions() {
        let (features, targets) = small_corpus(12);
        let combos = feature_combinations(3).unwrap();
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let matrix =
            train_model_matrix(&features, &targets, &combos, &TreeParams::default(), &names)
                .unwrap();
        let records = validate_matrix(&matrix, &features, &targets).unwrap();
        let flags = filter_matrix(&records, 0.05, FilterMode::AccurateAndDiverse).unwrap();
        let bundle = EnsembleBundle {
            manifest: BundleManifest {
                algorithm_names: names,
                combos: matrix.combos.clone(),
                alpha: 0.05,
                mode: FilterMode::AccurateAndDiverse,
                pick_threshold: 0.5,
                tree_params: TreeParams::default(),
                seed: 4,
            },
            matrix,
            flags,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bundle");
        bundle.save(&path).unwrap();
        let loaded = EnsembleBundle::load(&path).unwrap();
        for set in &features {
            let a = bundle.recommend_for(set).unwrap();
            let b = loaded.recommend_for(set).unwrap();
            assert_eq!(a.probabilities, b.probabilities);
            assert_eq!(a.ranks, b.ranks);
        }
    }
}
