//! Meta-target production: estimate candidate accuracy matrices with
//! internal demo learners (or ingest external ones) and derive the binary
//! appropriateness vector via Friedman + Holm.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::learners::{
    train_tree, DecisionTree, NaiveBayesModel, NearestNeighborModel, TreeParams,
};
use crate::rng::derive_seed;
use crate::stats;
use crate::tabular::{stratified_folds, TabularDataset, Value};

/// k candidate algorithms by r accuracy runs, all values in [0, 1].
#[derive(Debug, Clone)]
pub struct AccuracyMatrix {
    names: Vec<String>,
    /// One row per algorithm, `runs` accuracies each.
    rows: Vec<Vec<f64>>,
}

impl AccuracyMatrix {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != rows.len() || names.is_empty() {
            return Err(Error::LengthMismatch(format!(
                "{} names vs {} accuracy rows",
                names.len(),
                rows.len()
            )));
        }
        let r = rows[0].len();
        if r == 0 {
            return Err(Error::MalformedInput("no accuracy runs".into()));
        }
        for row in &rows {
            if row.len() != r {
                return Err(Error::MalformedInput("ragged accuracy rows".into()));
            }
            for &v in row {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::OutOfRangeAccuracy(v));
                }
            }
        }
        Ok(AccuracyMatrix { names, rows })
    }

    pub fn k(&self) -> usize {
        self.names.len()
    }

    pub fn runs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn value(&self, algorithm: usize, run: usize) -> f64 {
        self.rows[algorithm][run]
    }

    pub fn row(&self, algorithm: usize) -> &[f64] {
        &self.rows[algorithm]
    }

    pub fn means(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().sum::<f64>() / row.len() as f64)
            .collect()
    }
}

/// Binary appropriateness vector over the candidate algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaTarget {
    pub bits: Vec<u8>,
}

impl MetaTarget {
    pub fn k(&self) -> usize {
        self.bits.len()
    }
}

/// Internal demo candidate learners for end-to-end runs without external
/// accuracy files. The paper-scale candidate algorithms stay opaque
/// identifiers whose matrices are loaded from CSV instead.
#[derive(Debug, Clone, PartialEq)]
pub enum LearnerSpec {
    Tree(TreeParams),
    NaiveBayes,
    OneNearestNeighbor,
    DecisionStump,
    MajorityClass,
}

impl LearnerSpec {
    /// The default five-candidate demo set.
    pub fn demo_set() -> Vec<LearnerSpec> {
        vec![
            LearnerSpec::Tree(TreeParams::default()),
            LearnerSpec::Tree(TreeParams {
                min_leaf: 16,
                max_depth: None,
            }),
            LearnerSpec::NaiveBayes,
            LearnerSpec::OneNearestNeighbor,
            LearnerSpec::DecisionStump,
        ]
    }

    /// Parses specs like "tree", "tree:min_leaf=16", "nb", "1nn", "stump",
    /// "majority".
    pub fn parse(s: &str) -> Result<LearnerSpec> {
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match head {
            "tree" => {
                let mut params = TreeParams::default();
                if let Some(args) = args {
                    for kv in args.split(',') {
                        match kv.split_once('=') {
                            Some(("min_leaf", v)) => {
                                params.min_leaf = v
                                    .parse()
                                    .map_err(|_| Error::Config(format!("bad min_leaf {v}")))?;
                            }
                            Some(("max_depth", v)) => {
                                params.max_depth = Some(
                                    v.parse()
                                        .map_err(|_| Error::Config(format!("bad max_depth {v}")))?,
                                );
                            }
                            _ => return Err(Error::Config(format!("unknown tree option {kv}"))),
                        }
                    }
                }
                Ok(LearnerSpec::Tree(params))
            }
            "nb" => Ok(LearnerSpec::NaiveBayes),
            "1nn" => Ok(LearnerSpec::OneNearestNeighbor),
            "stump" => Ok(LearnerSpec::DecisionStump),
            "majority" => Ok(LearnerSpec::MajorityClass),
            other => Err(Error::Config(format!("unknown learner spec {other}"))),
        }
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerSpec::Tree(p) => match p.max_depth {
                Some(d) => write!(f, "tree:min_leaf={},max_depth={}", p.min_leaf, d),
                None => write!(f, "tree:min_leaf={}", p.min_leaf),
            },
            LearnerSpec::NaiveBayes => write!(f, "nb"),
            LearnerSpec::OneNearestNeighbor => write!(f, "1nn"),
            LearnerSpec::DecisionStump => write!(f, "stump"),
            LearnerSpec::MajorityClass => write!(f, "majority"),
        }
    }
}

enum CandidateModel {
    Tree(DecisionTree),
    NaiveBayes(NaiveBayesModel),
    NearestNeighbor(NearestNeighborModel),
    Majority(u32),
}

impl CandidateModel {
    fn train(spec: &LearnerSpec, d: &TabularDataset) -> Result<CandidateModel> {
        Ok(match spec {
            LearnerSpec::Tree(params) => CandidateModel::Tree(train_tree(d, params)?),
            LearnerSpec::NaiveBayes => CandidateModel::NaiveBayes(NaiveBayesModel::train(d)),
            LearnerSpec::OneNearestNeighbor => {
                CandidateModel::NearestNeighbor(NearestNeighborModel::train(d, None))
            }
            LearnerSpec::DecisionStump => {
                let gains = crate::learners::attribute_gains(d);
                let mut best = 0;
                for (a, &g) in gains.iter().enumerate() {
                    if g > gains[best] {
                        best = a;
                    }
                }
                CandidateModel::Tree(crate::learners::stump_on_attribute(d, best))
            }
            LearnerSpec::MajorityClass => {
                let counts = d.class_counts();
                let mut best = 0;
                for (c, &n) in counts.iter().enumerate() {
                    if n > counts[best] {
                        best = c;
                    }
                }
                CandidateModel::Majority(best as u32)
            }
        })
    }

    fn predict(&self, row: &[Value]) -> Result<u32> {
        match self {
            CandidateModel::Tree(t) => t.predict_label(row),
            CandidateModel::NaiveBayes(m) => m.predict(row),
            CandidateModel::NearestNeighbor(m) => m.predict(row),
            CandidateModel::Majority(c) => Ok(*c),
        }
    }
}

/// 5 x 10-fold stratified cross-validation accuracy estimation: five seeded
/// fold plans, each candidate trained on nine folds and scored on the held
/// out one. The 50 accuracies per candidate are ordered repeat-major,
/// fold-minor.
pub fn estimate_accuracy_matrix(
    d: &TabularDataset,
    candidates: &[LearnerSpec],
    seed: u64,
) -> Result<AccuracyMatrix> {
    const REPEATS: u64 = 5;
    const FOLDS: usize = 10;
    if candidates.is_empty() {
        return Err(Error::Config("no candidate learners".into()));
    }
    let mut rows = vec![Vec::with_capacity(REPEATS as usize * FOLDS); candidates.len()];
    for repeat in 0..REPEATS {
        let plan = stratified_folds(d, FOLDS, derive_seed(seed, &[0xacc0, repeat]))?;
        for fold in 0..FOLDS as u32 {
            let train_idx = plan.train_indices(fold);
            let test_idx = plan.test_indices(fold);
            let train = d.subset(&train_idx);
            for (c, spec) in candidates.iter().enumerate() {
                let model = CandidateModel::train(spec, &train)?;
                let correct = test_idx
                    .iter()
                    .filter(|&&i| {
                        model
                            .predict(d.row(i))
                            .map(|p| p == d.label_of(i))
                            .unwrap_or(false)
                    })
                    .count();
                rows[c].push(correct as f64 / test_idx.len() as f64);
            }
        }
    }
    AccuracyMatrix::new(candidates.iter().map(|s| s.to_string()).collect(), rows)
}

/// Reads an accuracy matrix CSV: header of algorithm names, one row per run.
pub fn load_accuracy_matrix(path: &Path) -> Result<AccuracyMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))?;
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedInput(e.to_string()))?;
        records.push(record.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    }
    if records.len() < 2 {
        return Err(Error::MalformedInput(format!(
            "{}: need a header and at least one run row",
            path.display()
        )));
    }
    let names = records.remove(0);
    if names.len() < 2 {
        return Err(Error::MalformedInput(
            "accuracy matrix needs at least 2 algorithm columns".into(),
        ));
    }
    let mut rows = vec![Vec::with_capacity(records.len()); names.len()];
    for (r, record) in records.iter().enumerate() {
        if record.len() != names.len() {
            return Err(Error::MalformedInput(format!(
                "run row {} has {} cells, expected {}",
                r + 1,
                record.len(),
                names.len()
            )));
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::MalformedInput(format!("run row {}: bad accuracy {cell}", r + 1))
            })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRangeAccuracy(v));
            }
            rows[c].push(v);
        }
    }
    AccuracyMatrix::new(names, rows)
}

/// Writes meta-targets as CSV: header `problem,<algorithm names>`, one bit
/// row per problem.
pub fn write_meta_targets(
    rows: &[(String, MetaTarget)],
    algorithm_names: &[String],
    path: &Path,
) -> Result<()> {
    let mut out = String::from("problem");
    for name in algorithm_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (problem, target) in rows {
        out.push_str(problem);
        for &b in &target.bits {
            out.push(',');
            out.push(if b == 1 { '1' } else { '0' });
        }
        out.push('\n');
    }
    crate::metafeatures::write_atomic(path, &out)
}

/// Reads a meta-target CSV back into (problem, bits) rows.
pub fn read_meta_targets(path: &Path) -> Result<(Vec<String>, Vec<(String, MetaTarget)>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))?;
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedInput(e.to_string()))?;
        records.push(record.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    }
    if records.is_empty() {
        return Err(Error::MalformedInput(format!(
            "{}: empty meta-target table",
            path.display()
        )));
    }
    let header = records.remove(0);
    if header.len() < 3 || header[0] != "problem" {
        return Err(Error::MalformedInput(format!(
            "{}: expected header problem,<k algorithm names>",
            path.display()
        )));
    }
    let names = header[1..].to_vec();
    let mut rows = Vec::with_capacity(records.len());
    for (r, record) in records.iter().enumerate() {
        if record.len() != header.len() {
            return Err(Error::MalformedInput(format!(
                "{}: row {} has {} cells, expected {}",
                path.display(),
                r + 1,
                record.len(),
                header.len()
            )));
        }
        let bits = record[1..]
            .iter()
            .map(|c| match c.trim() {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(Error::MalformedInput(format!(
                    "row {}: bit cell {other}",
                    r + 1
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        rows.push((record[0].clone(), MetaTarget { bits }));
    }
    Ok((names, rows))
}

/// Outcome of meta-target derivation, including which statistical route ran.
#[derive(Debug, Clone)]
pub struct DerivedTarget {
    pub target: MetaTarget,
    /// Friedman test outcome; `None` when the k = 2 Wilcoxon fallback ran.
    pub friedman: Option<stats::ComparisonResult>,
    pub used_wilcoxon_fallback: bool,
}

/// Derives the appropriateness bits: if the Friedman test accepts the null,
/// everything is appropriate; otherwise Holm's procedure against the best
/// mean-accuracy reference decides. With only two candidates a paired
/// two-sided Wilcoxon signed-rank test substitutes for Friedman.
pub fn derive_meta_target(acc: &AccuracyMatrix, alpha: f64) -> Result<DerivedTarget> {
    if acc.k() < 2 {
        return Err(Error::DomainError(format!(
            "meta-target needs k >= 2 algorithms, got {}",
            acc.k()
        )));
    }
    if acc.runs() < 2 {
        return Err(Error::DomainError(format!(
            "meta-target needs r >= 2 runs, got {}",
            acc.runs()
        )));
    }
    if acc.k() == 2 {
        let outcome = stats::wilcoxon_signed_rank(acc.row(0), acc.row(1), alpha)?;
        let bits = if outcome.reject {
            let reference = stats::reference_index(acc);
            let mut bits = vec![0u8; 2];
            bits[reference] = 1;
            bits
        } else {
            vec![1, 1]
        };
        return Ok(DerivedTarget {
            target: MetaTarget { bits },
            friedman: None,
            used_wilcoxon_fallback: true,
        });
    }
    let friedman = stats::friedman_test(acc, alpha)?;
    let bits = if friedman.reject {
        stats::holm_procedure(acc, alpha)?
    } else {
        vec![1u8; acc.k()]
    };
    Ok(DerivedTarget {
        target: MetaTarget { bits },
        friedman: Some(friedman),
        used_wilcoxon_fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::Attribute;

    fn skewed_dataset(n: usize) -> TabularDataset {
        // ~90/10 class balance, single informative numeric attribute
        let attributes = vec![Attribute::numeric("x")];
        let target = Attribute::nominal("cls", vec!["major".into(), "minor".into()]);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let minor = i % 10 == 0;
            rows.push(vec![Value::Num(if minor { 100.0 } else { i as f64 * 0.1 })]);
            labels.push(u32::from(minor));
        }
        TabularDataset::new("skew", attributes, target, rows, labels).unwrap()
    }

    #[test]
    fn estimate_shape_is_candidates_by_fifty() {
        let d = skewed_dataset(60);
        let acc =
            estimate_accuracy_matrix(&d, &[LearnerSpec::MajorityClass], 3).unwrap();
        assert_eq!(acc.k(), 1);
        assert_eq!(acc.runs(), 50);
    }

    #[test]
    fn majority_stub_tracks_class_prior() {
        let d = skewed_dataset(100);
        let acc = estimate_accuracy_matrix(&d, &[LearnerSpec::MajorityClass], 3).unwrap();
        for run in 0..acc.runs() {
            // each fold holds 9 majors and 1 minor
            assert!((acc.value(0, run) - 0.9).abs() < 1e-9);
        }
    }

    #[test]
    fn estimation_is_deterministic() {
        let d = skewed_dataset(60);
        let specs = [LearnerSpec::Tree(TreeParams::default()), LearnerSpec::NaiveBayes];
        let a = estimate_accuracy_matrix(&d, &specs, 11).unwrap();
        let b = estimate_accuracy_matrix(&d, &specs, 11).unwrap();
        for j in 0..a.k() {
            assert_eq!(a.row(j), b.row(j));
        }
    }

    #[test]
    fn identical_columns_keep_everything() {
        let acc = AccuracyMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0.8; 50], vec![0.8; 50], vec![0.8; 50]],
        )
        .unwrap();
        let derived = derive_meta_target(&acc, 0.05).unwrap();
        assert_eq!(derived.target.bits, vec![1, 1, 1]);
        assert!(!derived.used_wilcoxon_fallback);
    }

    #[test]
    fn dominated_candidate_loses_its_bit() {
        let mut best = Vec::new();
        let mut mid = Vec::new();
        let mut dominated = Vec::new();
        for i in 0..50 {
            let jitter = (i % 7) as f64 * 1e-3;
            best.push(0.90 + jitter);
            mid.push(0.90 - jitter - 1e-4);
            dominated.push(0.65 + jitter);
        }
        let acc = AccuracyMatrix::new(
            vec!["best".into(), "mid".into(), "weak".into()],
            vec![best, mid, dominated],
        )
        .unwrap();
        let derived = derive_meta_target(&acc, 0.05).unwrap();
        assert_eq!(derived.target.bits[0], 1);
        assert_eq!(derived.target.bits[2], 0);
    }

    #[test]
    fn reference_bit_is_always_one() {
        let acc = AccuracyMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                (0..50).map(|i| 0.5 + (i % 2) as f64 * 0.01).collect(),
                (0..50).map(|i| 0.95 - (i % 3) as f64 * 0.01).collect(),
                (0..50).map(|i| 0.5 + (i % 5) as f64 * 0.01).collect(),
            ],
        )
        .unwrap();
        let derived = derive_meta_target(&acc, 0.05).unwrap();
        let reference = stats::reference_index(&acc);
        assert_eq!(reference, 1);
        assert_eq!(derived.target.bits[reference], 1);
    }

    #[test]
    fn two_candidates_use_wilcoxon() {
        let acc = AccuracyMatrix::new(
            vec!["good".into(), "bad".into()],
            vec![
                (0..50).map(|i| 0.9 + (i % 3) as f64 * 1e-3).collect(),
                (0..50).map(|i| 0.5 + (i % 3) as f64 * 1e-3).collect(),
            ],
        )
        .unwrap();
        let derived = derive_meta_target(&acc, 0.05).unwrap();
        assert!(derived.used_wilcoxon_fallback);
        assert_eq!(derived.target.bits, vec![1, 0]);

        let tied = AccuracyMatrix::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.7; 50], vec![0.7; 50]],
        )
        .unwrap();
        let derived = derive_meta_target(&tied, 0.05).unwrap();
        assert_eq!(derived.target.bits, vec![1, 1]);
    }

    #[test]
    fn permutation_equivariance_and_shift_invariance() {
        let rows: Vec<Vec<f64>> = vec![
            (0..40).map(|i| 0.9 - (i % 4) as f64 * 0.01).collect(),
            (0..40).map(|i| 0.6 + (i % 3) as f64 * 0.01).collect(),
            (0..40).map(|i| 0.7 + (i % 5) as f64 * 0.005).collect(),
        ];
        let names = vec!["a".into(), "b".into(), "c".into()];
        let acc = AccuracyMatrix::new(names.clone(), rows.clone()).unwrap();
        let bits = derive_meta_target(&acc, 0.05).unwrap().target.bits;

        // permute columns 0 and 2
        let permuted = AccuracyMatrix::new(
            vec!["c".into(), "b".into(), "a".into()],
            vec![rows[2].clone(), rows[1].clone(), rows[0].clone()],
        )
        .unwrap();
        let permuted_bits = derive_meta_target(&permuted, 0.05).unwrap().target.bits;
        assert_eq!(permuted_bits, vec![bits[2], bits[1], bits[0]]);

        // constant shift leaves the rank pipeline unchanged
        let shifted = AccuracyMatrix::new(
            names,
            rows.iter()
                .map(|row| row.iter().map(|v| v + 0.05).collect())
                .collect(),
        )
        .unwrap();
        assert_eq!(derive_meta_target(&shifted, 0.05).unwrap().target.bits, bits);
    }

    #[test]
    fn out_of_range_accuracy_rejected() {
        assert!(matches!(
            AccuracyMatrix::new(vec!["a".into(), "b".into()], vec![vec![1.2], vec![0.5]]),
            Err(Error::OutOfRangeAccuracy(_))
        ));
    }
}
