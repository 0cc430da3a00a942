//! Recommendation-quality metrics (Ranking Loss, Precision@m, Average
//! Precision), the 5 x 10 cross-validation protocol that trains, filters,
//! and scores the ensemble against its 31 per-combination base models, and
//! the cross-family correlation analysis.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{
    combine_columns, filter_matrix, rank_algorithms, train_model_matrix, validate_matrix,
    FilterMode,
};
use crate::error::{Error, Result};
use crate::learners::TreeParams;
use crate::metadata::feature_combinations;
use crate::metafeatures::{write_atomic, FamilyId, MetaFeatureGroupSet};
use crate::metatarget::MetaTarget;
use crate::rng::rng_for;

/// Indices ordered best-rank first; tied ranks break by ascending index, the
/// cut-off rule used for top-m sets.
fn tie_broken_order(ranks: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ranks.len()).collect();
    order.sort_by(|&a, &b| {
        ranks[a]
            .partial_cmp(&ranks[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

fn split_truth(truth: &[u8]) -> (Vec<usize>, Vec<usize>) {
    let appropriate = (0..truth.len()).filter(|&i| truth[i] == 1).collect();
    let inappropriate = (0..truth.len()).filter(|&i| truth[i] == 0).collect();
    (appropriate, inappropriate)
}

/// Fraction of (appropriate, inappropriate) pairs ranked in the wrong
/// order; only strictly greater ranks count, so ties cost nothing.
pub fn ranking_loss(ranks: &[f64], truth: &[u8]) -> Result<f64> {
    if ranks.len() != truth.len() {
        return Err(Error::LengthMismatch(format!(
            "{} ranks vs {} truth bits",
            ranks.len(),
            truth.len()
        )));
    }
    let (appropriate, inappropriate) = split_truth(truth);
    if appropriate.is_empty() || inappropriate.is_empty() {
        return Err(Error::DegenerateTarget(
            "ranking loss needs both appropriate and inappropriate algorithms".into(),
        ));
    }
    let mut bad_pairs = 0usize;
    for &a in &appropriate {
        for &b in &inappropriate {
            if ranks[a] > ranks[b] {
                bad_pairs += 1;
            }
        }
    }
    Ok(bad_pairs as f64 / (appropriate.len() * inappropriate.len()) as f64)
}

/// Fraction of truly appropriate algorithms within the m best-ranked.
pub fn precision_at(ranks: &[f64], truth: &[u8], m: usize) -> Result<f64> {
    let k = ranks.len();
    if k != truth.len() {
        return Err(Error::LengthMismatch(format!(
            "{k} ranks vs {} truth bits",
            truth.len()
        )));
    }
    if m < 1 || m > k {
        return Err(Error::DomainError(format!(
            "precision cut {m} outside 1..={k}"
        )));
    }
    let (appropriate, inappropriate) = split_truth(truth);
    if appropriate.is_empty() || inappropriate.is_empty() {
        return Err(Error::DegenerateTarget(
            "precision needs both appropriate and inappropriate algorithms".into(),
        ));
    }
    let order = tie_broken_order(ranks);
    let hits = order[..m].iter().filter(|&&i| truth[i] == 1).count();
    Ok(hits as f64 / m as f64)
}

/// Mean of Precision(m) over the rank positions holding truly appropriate
/// algorithms, in the tie-broken order.
pub fn average_precision(ranks: &[f64], truth: &[u8]) -> Result<f64> {
    let k = ranks.len();
    if k != truth.len() {
        return Err(Error::LengthMismatch(format!(
            "{k} ranks vs {} truth bits",
            truth.len()
        )));
    }
    let n_appropriate = truth.iter().filter(|&&b| b == 1).count();
    if n_appropriate == 0 {
        return Err(Error::DegenerateTarget(
            "average precision needs at least one appropriate algorithm".into(),
        ));
    }
    let order = tie_broken_order(ranks);
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (pos, &idx) in order.iter().enumerate() {
        if truth[idx] == 1 {
            hits += 1;
            sum += hits as f64 / (pos + 1) as f64;
        }
    }
    Ok(sum / n_appropriate as f64)
}

/// Protocol configuration; defaults follow the published setup.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XvalConfig {
    pub alpha: f64,
    pub pick_threshold: f64,
    pub tree_params: TreeParams,
    pub mode: FilterMode,
    pub seed: u64,
    pub repetitions: usize,
    pub folds: usize,
}

impl Default for XvalConfig {
    fn default() -> Self {
        XvalConfig {
            alpha: 0.05,
            pick_threshold: 0.5,
            tree_params: TreeParams::default(),
            mode: FilterMode::AccurateAndDiverse,
            seed: 0,
            repetitions: 5,
            folds: 10,
        }
    }
}

/// Per-variant summary within one evaluation cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellVariantSummary {
    pub variant: String,
    pub mean_ranking_loss: f64,
    pub mean_average_precision: f64,
    pub mean_precision_at_1: f64,
    pub evaluated: usize,
    pub skipped_degenerate: usize,
}

/// One (repetition, fold) evaluation cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellReport {
    pub repetition: usize,
    pub fold: usize,
    /// Models kept per algorithm column after filtering.
    pub kept_per_column: Vec<usize>,
    pub variants: Vec<CellVariantSummary>,
}

/// Pooled per-variant aggregate over every (cell, test problem) evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariantAggregate {
    pub variant: String,
    pub mean_ranking_loss: f64,
    pub median_ranking_loss: f64,
    pub mean_average_precision: f64,
    pub median_average_precision: f64,
    pub mean_precision_at_1: f64,
    pub median_precision_at_1: f64,
    pub evaluated: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvReport {
    pub config: XvalConfig,
    pub algorithm_names: Vec<String>,
    pub n_meta_instances: usize,
    pub n_combos: usize,
    pub cells: Vec<CellReport>,
    pub aggregates: Vec<VariantAggregate>,
    pub mean_kept_per_column: f64,
    pub skipped_degenerate_total: usize,
}

impl CvReport {
    pub fn aggregate(&self, variant: &str) -> Option<&VariantAggregate> {
        self.aggregates.iter().find(|a| a.variant == variant)
    }
}

struct CellOutcome {
    report: CellReport,
    // per variant: (ranking loss, average precision, precision@1) triples
    samples: Vec<Vec<(f64, f64, f64)>>,
}

/// The validation protocol: per repetition the meta-instances are
/// reshuffled and cut into `folds` test folds; for each fold the remaining
/// instances split 50/50 into training and validation halves (stratified by
/// label pattern), the model matrix is trained and filtered, and the
/// ensemble plus every per-combination base model is scored on the held-out
/// fold. Cells run in parallel and assemble in deterministic order.
pub fn run_cross_validation(
    features: &[MetaFeatureGroupSet],
    targets: &[MetaTarget],
    algorithm_names: &[String],
    config: &XvalConfig,
) -> Result<CvReport> {
    let n = features.len();
    if n != targets.len() {
        return Err(Error::LengthMismatch(format!(
            "{n} feature sets vs {} targets",
            targets.len()
        )));
    }
    if n < 20 {
        return Err(Error::TooFewInstances(format!(
            "cross-validation needs >= 20 meta-instances, got {n}"
        )));
    }
    if config.folds < 2 || config.repetitions < 1 {
        return Err(Error::Config("need folds >= 2 and repetitions >= 1".into()));
    }
    let k = targets[0].k();
    if targets.iter().any(|t| t.k() != k) {
        return Err(Error::ArityMismatch("inconsistent target width".into()));
    }
    if algorithm_names.len() != k {
        return Err(Error::LengthMismatch(format!(
            "{} algorithm names vs k = {k}",
            algorithm_names.len()
        )));
    }
    let combos = feature_combinations(5)?;
    let t = combos.len();

    let cell_ids: Vec<(usize, usize)> = (0..config.repetitions)
        .flat_map(|rep| (0..config.folds).map(move |fold| (rep, fold)))
        .collect();
    let outcomes: Vec<CellOutcome> = cell_ids
        .par_iter()
        .map(|&(rep, fold)| run_cell(features, targets, &combos, algorithm_names, config, rep, fold))
        .collect::<Result<Vec<_>>>()?;

    // pooled aggregates in variant order: combos 1..t, then the ensemble
    let mut pooled: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); t + 1];
    let mut cells = Vec::with_capacity(outcomes.len());
    let mut kept_sum = 0usize;
    let mut kept_count = 0usize;
    let mut skipped_total = 0usize;
    for outcome in outcomes {
        for (v, samples) in outcome.samples.iter().enumerate() {
            pooled[v].extend_from_slice(samples);
        }
        kept_sum += outcome.report.kept_per_column.iter().sum::<usize>();
        kept_count += outcome.report.kept_per_column.len();
        skipped_total += outcome
            .report
            .variants
            .first()
            .map(|v| v.skipped_degenerate)
            .unwrap_or(0);
        cells.push(outcome.report);
    }
    let aggregates = pooled
        .iter()
        .enumerate()
        .map(|(v, samples)| {
            let rl: Vec<f64> = samples.iter().map(|s| s.0).collect();
            let ap: Vec<f64> = samples.iter().map(|s| s.1).collect();
            let p1: Vec<f64> = samples.iter().map(|s| s.2).collect();
            VariantAggregate {
                variant: variant_name(v, t),
                mean_ranking_loss: mean_or_nan(&rl),
                median_ranking_loss: median(&rl),
                mean_average_precision: mean_or_nan(&ap),
                median_average_precision: median(&ap),
                mean_precision_at_1: mean_or_nan(&p1),
                median_precision_at_1: median(&p1),
                evaluated: samples.len(),
            }
        })
        .collect();
    Ok(CvReport {
        config: config.clone(),
        algorithm_names: algorithm_names.to_vec(),
        n_meta_instances: n,
        n_combos: t,
        cells,
        aggregates,
        mean_kept_per_column: kept_sum as f64 / kept_count as f64,
        skipped_degenerate_total: skipped_total,
    })
}

fn variant_name(v: usize, t: usize) -> String {
    if v < t {
        (v + 1).to_string()
    } else {
        "En".to_string()
    }
}

fn run_cell(
    features: &[MetaFeatureGroupSet],
    targets: &[MetaTarget],
    combos: &[crate::metadata::FamilyCombo],
    algorithm_names: &[String],
    config: &XvalConfig,
    rep: usize,
    fold: usize,
) -> Result<CellOutcome> {
    let n = features.len();
    let t = combos.len();

    // repetition-level shuffle, then contiguous fold chunks
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng_for(config.seed, &[0x7265_70, rep as u64]));
    let base = n / config.folds;
    let extra = n % config.folds;
    let mut bounds = Vec::with_capacity(config.folds + 1);
    let mut acc = 0;
    bounds.push(0);
    for f in 0..config.folds {
        acc += base + usize::from(f < extra);
        bounds.push(acc);
    }
    let test_idx: Vec<usize> = perm[bounds[fold]..bounds[fold + 1]].to_vec();
    let rest: Vec<usize> = perm[..bounds[fold]]
        .iter()
        .chain(&perm[bounds[fold + 1]..])
        .copied()
        .collect();

    let (train_idx, valid_idx) = split_half_stratified(
        &rest,
        targets,
        rng_for(config.seed, &[0x7370_6c, rep as u64, fold as u64]),
    );

    let gather_f = |idx: &[usize]| -> Vec<MetaFeatureGroupSet> {
        idx.iter().map(|&i| features[i].clone()).collect()
    };
    let gather_t =
        |idx: &[usize]| -> Vec<MetaTarget> { idx.iter().map(|&i| targets[i].clone()).collect() };

    let matrix = train_model_matrix(
        &gather_f(&train_idx),
        &gather_t(&train_idx),
        combos,
        &config.tree_params,
        algorithm_names,
    )?;
    let records = validate_matrix(&matrix, &gather_f(&valid_idx), &gather_t(&valid_idx))?;
    let flags = filter_matrix(&records, config.alpha, config.mode)?;

    let kept_per_column: Vec<usize> = (0..matrix.k()).map(|j| flags.kept_in_column(j)).collect();

    let mut samples: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); t + 1];
    let mut skipped = 0usize;
    for &i in &test_idx {
        let truth = &targets[i].bits;
        if truth.iter().all(|&b| b == 1) || truth.iter().all(|&b| b == 0) {
            skipped += 1;
            continue;
        }
        let p = matrix.probability_matrix(&features[i])?;
        for (v, probs_row) in p.iter().enumerate() {
            samples[v].push(score(probs_row, truth)?);
        }
        let en = combine_columns(&p, &flags.flags);
        samples[t].push(score(&en, truth)?);
    }

    let variants = samples
        .iter()
        .enumerate()
        .map(|(v, list)| {
            let rl: Vec<f64> = list.iter().map(|s| s.0).collect();
            let ap: Vec<f64> = list.iter().map(|s| s.1).collect();
            let p1: Vec<f64> = list.iter().map(|s| s.2).collect();
            CellVariantSummary {
                variant: variant_name(v, t),
                mean_ranking_loss: mean_or_nan(&rl),
                mean_average_precision: mean_or_nan(&ap),
                mean_precision_at_1: mean_or_nan(&p1),
                evaluated: list.len(),
                skipped_degenerate: skipped,
            }
        })
        .collect();
    Ok(CellOutcome {
        report: CellReport {
            repetition: rep,
            fold,
            kept_per_column,
            variants,
        },
        samples,
    })
}

fn score(probs: &[f64], truth: &[u8]) -> Result<(f64, f64, f64)> {
    let ranks = rank_algorithms(probs);
    Ok((
        ranking_loss(&ranks, truth)?,
        average_precision(&ranks, truth)?,
        precision_at(&ranks, truth, 1)?,
    ))
}

/// Splits instances into two equal halves, stratified by full label
/// pattern: each pattern group is shuffled and its members alternate sides,
/// always starting with the currently smaller half.
pub(crate) fn split_half_stratified(
    rest: &[usize],
    targets: &[MetaTarget],
    mut rng: rand_chacha::ChaCha8Rng,
) -> (Vec<usize>, Vec<usize>) {
    let mut groups: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
    for &i in rest {
        groups.entry(targets[i].bits.clone()).or_default().push(i);
    }
    let mut train = Vec::with_capacity(rest.len() / 2 + 1);
    let mut valid = Vec::with_capacity(rest.len() / 2 + 1);
    for (_, mut members) in groups {
        members.shuffle(&mut rng);
        for idx in members {
            if train.len() <= valid.len() {
                train.push(idx);
            } else {
                valid.push(idx);
            }
        }
    }
    (train, valid)
}

fn mean_or_nan(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

/// Writes report.json plus one CSV per metric (variant, mean, median) and a
/// per-cell kept-model table.
pub fn write_cv_report(report: &CvReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Serde {
        path: dir.join("report.json"),
        message: e.to_string(),
    })?;
    write_atomic(&dir.join("report.json"), &json)?;

    let metric_csv = |pick: &dyn Fn(&VariantAggregate) -> (f64, f64)| -> String {
        let mut out = String::from("variant,mean,median\n");
        for agg in &report.aggregates {
            let (mean, median) = pick(agg);
            out.push_str(&format!("{},{},{}\n", agg.variant, mean, median));
        }
        out
    };
    write_atomic(
        &dir.join("ranking_loss.csv"),
        &metric_csv(&|a| (a.mean_ranking_loss, a.median_ranking_loss)),
    )?;
    write_atomic(
        &dir.join("average_precision.csv"),
        &metric_csv(&|a| (a.mean_average_precision, a.median_average_precision)),
    )?;
    write_atomic(
        &dir.join("precision_at_1.csv"),
        &metric_csv(&|a| (a.mean_precision_at_1, a.median_precision_at_1)),
    )?;

    let mut kept = String::from("repetition,fold,algorithm,kept\n");
    for cell in &report.cells {
        for (j, &count) in cell.kept_per_column.iter().enumerate() {
            kept.push_str(&format!(
                "{},{},{},{}\n",
                cell.repetition, cell.fold, report.algorithm_names[j], count
            ));
        }
    }
    write_atomic(&dir.join("kept_models.csv"), &kept)
}

/// 5 x 5 matrix of mean absolute Pearson correlation between measures of
/// each family pair across problems; constant measures are skipped.
pub fn family_correlation(features: &[MetaFeatureGroupSet]) -> Result<Vec<Vec<f64>>> {
    if features.len() < 3 {
        return Err(Error::TooFewInstances(format!(
            "correlation analysis needs >= 3 problems, got {}",
            features.len()
        )));
    }
    // per family: measure columns across problems, constants dropped
    let columns: Vec<Vec<Vec<f64>>> = FamilyId::ALL
        .iter()
        .map(|&family| {
            (0..family.arity())
                .map(|m| {
                    features
                        .iter()
                        .map(|set| set.vector(family).values[m])
                        .collect::<Vec<f64>>()
                })
                .filter(|col| col.iter().any(|&v| v != col[0]))
                .collect()
        })
        .collect();

    let mut out = vec![vec![f64::NAN; 5]; 5];
    for a in 0..5 {
        for b in 0..5 {
            let mut sum = 0.0;
            let mut count = 0usize;
            for col_a in &columns[a] {
                for col_b in &columns[b] {
                    let r = crate::metafeatures::pearson(col_a, col_b);
                    if r.is_finite() {
                        sum += r.abs();
                        count += 1;
                    }
                }
            }
            if count > 0 {
                out[a][b] = sum / count as f64;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ranking_loss_examples() {
        // perfect ranking: appropriate above inappropriate
        assert_abs_diff_eq!(
            ranking_loss(&[1.0, 2.0, 3.0], &[1, 1, 0]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        // truth (1,0,0) with ranks (3,1,2): both pairs inverted
        assert_abs_diff_eq!(
            ranking_loss(&[3.0, 1.0, 2.0], &[1, 0, 0]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // ranks (2,1,3): one of two pairs inverted
        assert_abs_diff_eq!(
            ranking_loss(&[2.0, 1.0, 3.0], &[1, 0, 0]).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        // tied ranks cost nothing
        assert_abs_diff_eq!(
            ranking_loss(&[1.5, 1.5, 3.0], &[1, 0, 0]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            ranking_loss(&[1.0, 2.0], &[1, 1]),
            Err(Error::DegenerateTarget(_))
        ));
    }

    #[test]
    fn precision_examples() {
        // top-1 appropriate
        assert_abs_diff_eq!(
            precision_at(&[1.0, 2.0], &[1, 0], 1).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // truth (0,1), ranks (1,2), m=2
        assert_abs_diff_eq!(
            precision_at(&[1.0, 2.0], &[0, 1], 2).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        // published ranks with ties: top-2 = {A3, A1} by the index cut-off
        let ranks = [2.5, 5.0, 1.0, 4.0, 2.5];
        assert_abs_diff_eq!(
            precision_at(&ranks, &[1, 0, 1, 0, 0], 2).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // Precision(k) = |Y|/k
        assert_abs_diff_eq!(
            precision_at(&ranks, &[1, 0, 1, 0, 0], 5).unwrap(),
            0.4,
            epsilon = 1e-12
        );
    }

    #[test]
    fn average_precision_examples() {
        // perfect ranking
        assert_abs_diff_eq!(
            average_precision(&[1.0, 2.0, 3.0], &[1, 1, 0]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // single appropriate ranked last of five
        assert_abs_diff_eq!(
            average_precision(&[5.0, 1.0, 2.0, 3.0, 4.0], &[1, 0, 0, 0, 0]).unwrap(),
            0.2,
            epsilon = 1e-12
        );
        // published ranks, truth (1,0,1,0,0)
        assert_abs_diff_eq!(
            average_precision(&[2.5, 5.0, 1.0, 4.0, 2.5], &[1, 0, 1, 0, 0]).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    fn tiny_corpus(n: usize) -> (Vec<MetaFeatureGroupSet>, Vec<MetaTarget>, Vec<String>) {
        let corpus =
            synth::build_meta_corpus(n, &crate::metatarget::LearnerSpec::demo_set(), 0.05, 17)
                .unwrap();
        (corpus.features, corpus.targets, corpus.algorithm_names)
    }

    #[test]
    fn protocol_produces_expected_cells_and_partitions() {
        let (features, targets, names) = tiny_corpus(24);
        let config = XvalConfig {
            repetitions: 2,
            folds: 4,
            seed: 5,
            ..XvalConfig::default()
        };
        let report = run_cross_validation(&features, &targets, &names, &config).unwrap();
        assert_eq!(report.cells.len(), 8);
        assert_eq!(report.aggregates.len(), 32);
        assert_eq!(report.aggregates[31].variant, "En");
        // mode all keeps the full column everywhere
        let all_report = run_cross_validation(
            &features,
            &targets,
            &names,
            &XvalConfig {
                mode: FilterMode::All,
                repetitions: 1,
                folds: 4,
                seed: 5,
                ..XvalConfig::default()
            },
        )
        .unwrap();
        for cell in &all_report.cells {
            assert!(cell.kept_per_column.iter().all(|&c| c == 31));
        }
    }

    #[test]
    fn protocol_is_deterministic() {
        let (features, targets, names) = tiny_corpus(22);
        let config = XvalConfig {
            repetitions: 1,
            folds: 4,
            seed: 9,
            ..XvalConfig::default()
        };
        let a = run_cross_validation(&features, &targets, &names, &config).unwrap();
        let b = run_cross_validation(&features, &targets, &names, &config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn test_folds_partition_the_corpus() {
        // per repetition, test folds are disjoint and cover all instances
        let n = 23;
        let config = XvalConfig {
            folds: 10,
            ..XvalConfig::default()
        };
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng_for(config.seed, &[0x7265_70, 0]));
        let base = n / config.folds;
        let extra = n % config.folds;
        let mut seen = vec![false; n];
        let mut acc = 0;
        for f in 0..config.folds {
            let size = base + usize::from(f < extra);
            for &i in &perm[acc..acc + size] {
                assert!(!seen[i]);
                seen[i] = true;
            }
            acc += size;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn too_few_meta_instances_rejected() {
        let (features, targets, names) = tiny_corpus(10);
        assert!(matches!(
            run_cross_validation(&features, &targets, &names, &XvalConfig::default()),
            Err(Error::TooFewInstances(_))
        ));
    }

    #[test]
    fn family_correlation_shape_and_bounds() {
        let features: Vec<MetaFeatureGroupSet> = (0..20)
            .map(|i| crate::metafeatures::extract_all(&synth::generate_problem(i, 31), 2).unwrap())
            .collect();
        let matrix = family_correlation(&features).unwrap();
        for row in &matrix {
            for &v in row {
                assert!(v.is_nan() || (0.0..=1.0 + 1e-9).contains(&v));
            }
        }
        // symmetric by construction
        for a in 0..5 {
            for b in 0..5 {
                if matrix[a][b].is_finite() {
                    assert_abs_diff_eq!(matrix[a][b], matrix[b][a], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn duplicated_family_correlates_perfectly() {
        // families 1 and 2 carry the same per-problem signal in every
        // measure, so each cross pair has |r| = 1 and the entry is exactly 1
        let mut features: Vec<MetaFeatureGroupSet> = (0..6)
            .map(|i| crate::metafeatures::extract_all(&synth::generate_problem(i, 33), 2).unwrap())
            .collect();
        for (i, set) in features.iter_mut().enumerate() {
            let signal = (i * i) as f64 + 1.0;
            for family in [FamilyId::new(1).unwrap(), FamilyId::new(2).unwrap()] {
                for slot in set.vector_mut(family).values.iter_mut() {
                    *slot = signal;
                }
            }
        }
        let matrix = family_correlation(&features).unwrap();
        assert_abs_diff_eq!(matrix[0][1], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(matrix[0][0], 1.0, epsilon = 1e-9);
    }
}
