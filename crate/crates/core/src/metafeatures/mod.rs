//! The five meta-feature families characterizing a classification problem:
//! statistical/information-theoretic, decision-tree structure, landmarking,
//! problem complexity, and structural information. Family arities are fixed
//! (31, 15, 6, 7, 18) so combined vectors align across problems; undefined
//! measures are imputed as 0 with a per-measure flag.

mod complexity;
mod landmarking;
mod statistical;
mod structural;
mod structure;
mod table;

pub use complexity::extract_complexity;
pub use landmarking::extract_landmarking;
pub use statistical::extract_statistical;
pub use structural::extract_structural;
pub use structure::extract_model_structure;
pub use table::{read_feature_table, write_feature_table, write_imputation_flags};

pub(crate) use statistical::pearson;
pub(crate) use table::write_atomic;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::TreeParams;
use crate::rng::derive_seed;
use crate::tabular::TabularDataset;

/// One of the five meta-feature families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilyId(u8);

pub const FAMILY_COUNT: usize = 5;

pub const STATISTICAL_NAMES: [&str; 31] = [
    "ins_num",
    "attr_num",
    "target_num",
    "target_min",
    "target_max",
    "prop_binary",
    "prop_nominal",
    "prop_numeric",
    "prop_missing_inst",
    "prop_missing_values",
    "mean_geometric",
    "mean_harmonic",
    "mean_trimmed",
    "mad",
    "variance",
    "std_dev",
    "percentile_75",
    "iqr",
    "prop_attr_outliers",
    "skewness",
    "kurtosis",
    "max_eigenvalue",
    "min_eigenvalue",
    "canonical_corr",
    "gravity_center",
    "mean_abs_corr",
    "class_entropy",
    "mean_attr_entropy",
    "mean_mutual_info",
    "equiv_attr_num",
    "noise_signal_ratio",
];

pub const STRUCTURE_NAMES: [&str; 15] = [
    "tree_height",
    "tree_width",
    "node_count",
    "leaf_count",
    "level_max",
    "level_mean",
    "level_std",
    "branch_longest",
    "branch_shortest",
    "branch_mean",
    "branch_std",
    "attr_occ_min",
    "attr_occ_max",
    "attr_occ_mean",
    "attr_occ_std",
];

pub const LANDMARKING_NAMES: [&str; 6] = [
    "naive_bayes",
    "one_nn",
    "elite_one_nn",
    "decision_node",
    "random_node",
    "worst_node",
];

pub const COMPLEXITY_NAMES: [&str; 7] = [
    "boundary_fraction",
    "adherence_retained",
    "intra_inter_ratio",
    "nn_nonlinearity",
    "linear_nonlinearity",
    "fisher_ratio",
    "inst_per_attr",
];

pub const STRUCTURAL_NAMES: [&str; 18] = [
    "one_item_min",
    "one_item_q1",
    "one_item_q2",
    "one_item_q3",
    "one_item_q4",
    "one_item_q5",
    "one_item_q6",
    "one_item_q7",
    "one_item_max",
    "two_item_min",
    "two_item_q1",
    "two_item_q2",
    "two_item_q3",
    "two_item_q4",
    "two_item_q5",
    "two_item_q6",
    "two_item_q7",
    "two_item_max",
];

impl FamilyId {
    pub const ALL: [FamilyId; FAMILY_COUNT] = [
        FamilyId(1),
        FamilyId(2),
        FamilyId(3),
        FamilyId(4),
        FamilyId(5),
    ];

    pub fn new(id: u8) -> Result<FamilyId> {
        if (1..=5).contains(&id) {
            Ok(FamilyId(id))
        } else {
            Err(Error::DomainError(format!("family id {id} outside 1..=5")))
        }
    }

    pub fn id(&self) -> u8 {
        self.0
    }

    /// Number of measures this family always emits.
    pub fn arity(&self) -> usize {
        self.measure_names().len()
    }

    pub fn measure_names(&self) -> &'static [&'static str] {
        match self.0 {
            1 => &STATISTICAL_NAMES,
            2 => &STRUCTURE_NAMES,
            3 => &LANDMARKING_NAMES,
            4 => &COMPLEXITY_NAMES,
            5 => &STRUCTURAL_NAMES,
            _ => unreachable!("validated on construction"),
        }
    }
}

impl std::fmt::Display for FamilyId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Fixed-arity measure vector for one family of one problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetaFeatureVector {
    pub family: FamilyId,
    pub values: Vec<f64>,
    /// True where the raw measure was non-finite and replaced by 0.
    pub imputed: Vec<bool>,
}

impl MetaFeatureVector {
    /// Applies the sentinel policy: non-finite raw measures become 0 and are
    /// flagged as imputed.
    pub(crate) fn sentinelized(family: FamilyId, raw: Vec<f64>) -> MetaFeatureVector {
        debug_assert_eq!(raw.len(), family.arity());
        let imputed: Vec<bool> = raw.iter().map(|v| !v.is_finite()).collect();
        let values = raw
            .into_iter()
            .map(|v| if v.is_finite() { v } else { 0.0 })
            .collect();
        MetaFeatureVector {
            family,
            values,
            imputed,
        }
    }

    pub fn names(&self) -> &'static [&'static str] {
        self.family.measure_names()
    }
}

/// All five family vectors for one problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetaFeatureGroupSet {
    pub problem: String,
    vectors: Vec<MetaFeatureVector>,
}

impl MetaFeatureGroupSet {
    pub fn new(problem: impl Into<String>, vectors: Vec<MetaFeatureVector>) -> Result<Self> {
        if vectors.len() != FAMILY_COUNT {
            return Err(Error::ArityMismatch(format!(
                "expected {FAMILY_COUNT} family vectors, got {}",
                vectors.len()
            )));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.family.id() as usize != i + 1 {
                return Err(Error::ArityMismatch(format!(
                    "vector {i} belongs to family {}",
                    v.family
                )));
            }
            if v.values.len() != v.family.arity() {
                return Err(Error::ArityMismatch(format!(
                    "family {} has {} values, expected {}",
                    v.family,
                    v.values.len(),
                    v.family.arity()
                )));
            }
        }
        Ok(MetaFeatureGroupSet {
            problem: problem.into(),
            vectors,
        })
    }

    pub fn vector(&self, family: FamilyId) -> &MetaFeatureVector {
        &self.vectors[family.id() as usize - 1]
    }

    pub fn vector_mut(&mut self, family: FamilyId) -> &mut MetaFeatureVector {
        &mut self.vectors[family.id() as usize - 1]
    }

    pub fn vectors(&self) -> &[MetaFeatureVector] {
        &self.vectors
    }
}

/// Runs all five extractors; deterministic given (dataset, seed).
pub fn extract_all(d: &TabularDataset, seed: u64) -> Result<MetaFeatureGroupSet> {
    let vectors = vec![
        extract_statistical(d)?,
        extract_model_structure(d, &TreeParams::default())?,
        extract_landmarking(d, derive_seed(seed, &[3]))?,
        extract_complexity(d, derive_seed(seed, &[4]))?,
        extract_structural(d)?,
    ];
    MetaFeatureGroupSet::new(d.name(), vectors)
}

// shared numeric helpers for the extractors

/// Type-7 quantile (linear interpolation) over an already sorted slice.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
pub(crate) fn pop_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Mean of the finite entries; NaN when none are finite.
pub(crate) fn mean_finite(values: &[f64]) -> f64 {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    mean(&finite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn arities_are_fixed() {
        let expected = [31, 15, 6, 7, 18];
        for (family, &arity) in FamilyId::ALL.iter().zip(&expected) {
            assert_eq!(family.arity(), arity);
            assert_eq!(family.measure_names().len(), arity);
        }
    }

    #[test]
    fn extract_all_yields_five_families_deterministically() {
        let d = synth::generate_problem(7, 42);
        let a = extract_all(&d, 5).unwrap();
        let b = extract_all(&d, 5).unwrap();
        assert_eq!(a.vectors().len(), 5);
        for (va, vb) in a.vectors().iter().zip(b.vectors()) {
            assert_eq!(va.values, vb.values);
            assert_eq!(va.values.len(), va.family.arity());
        }
    }

    #[test]
    fn all_emitted_values_are_finite() {
        for id in 0..12 {
            let d = synth::generate_problem(id, 99);
            let set = extract_all(&d, 1).unwrap();
            for v in set.vectors() {
                for (value, name) in v.values.iter().zip(v.names()) {
                    assert!(
                        value.is_finite(),
                        "problem {id}, family {}, measure {name} = {value}",
                        v.family
                    );
                }
            }
        }
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert_eq!(quantile_sorted(&v, 0.5), 2.5);
    }
}
