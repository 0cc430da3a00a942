//! Meta-dataset construction: enumerate the 2^q - 1 meta-feature family
//! combinations, assemble multi-label meta-data by concatenating the chosen
//! family vectors, and apply the Binary Relevance transformation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metafeatures::{FamilyId, MetaFeatureGroupSet};
use crate::metatarget::MetaTarget;

/// A non-empty subset of the five families. Combo ids 1..=2^q-1 follow the
/// size-then-lexicographic enumeration, so id 31 is {1,2,3,4,5} when q = 5.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCombo {
    pub combo_id: usize,
    pub members: Vec<FamilyId>,
}

impl FamilyCombo {
    /// Total feature arity of the concatenated member families.
    pub fn arity(&self) -> usize {
        self.members.iter().map(|f| f.arity()).sum()
    }

    pub fn label(&self) -> String {
        let ids: Vec<String> = self.members.iter().map(|f| f.to_string()).collect();
        format!("{{{}}}", ids.join(","))
    }
}

/// All non-empty family subsets, ordered by size then lexicographically.
pub fn feature_combinations(q: usize) -> Result<Vec<FamilyCombo>> {
    if q == 0 || q > 5 {
        return Err(Error::DomainError(format!(
            "family count {q} outside 1..=5"
        )));
    }
    let mut subsets: Vec<Vec<u8>> = (1u32..(1 << q))
        .map(|mask| (1..=q as u8).filter(|f| mask >> (f - 1) & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
        .into_iter()
        .enumerate()
        .map(|(i, ids)| {
            Ok(FamilyCombo {
                combo_id: i + 1,
                members: ids
                    .into_iter()
                    .map(FamilyId::new)
                    .collect::<Result<Vec<_>>>()?,
            })
        })
        .collect()
}

/// Multi-label meta-data for one family combination: per problem, the
/// concatenated feature vector and the k target bits.
#[derive(Debug, Clone)]
pub struct MetaDataset {
    pub combo: FamilyCombo,
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub targets: Vec<Vec<u8>>,
}

impl MetaDataset {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn k(&self) -> usize {
        self.targets.first().map(|t| t.len()).unwrap_or(0)
    }

    pub fn arity(&self) -> usize {
        self.feature_names.len()
    }
}

/// Concatenates the combo's family vectors in ascending family order and
/// attaches the target bits, problem by problem.
pub fn assemble_meta_dataset(
    features: &[MetaFeatureGroupSet],
    targets: &[MetaTarget],
    combo: &FamilyCombo,
) -> Result<MetaDataset> {
    if features.len() != targets.len() {
        return Err(Error::LengthMismatch(format!(
            "{} feature sets vs {} targets",
            features.len(),
            targets.len()
        )));
    }
    let k = targets.first().map(|t| t.k()).unwrap_or(0);
    if targets.iter().any(|t| t.k() != k) {
        return Err(Error::ArityMismatch(
            "target bit vectors have inconsistent length".into(),
        ));
    }
    let mut feature_names = Vec::with_capacity(combo.arity());
    for family in &combo.members {
        for name in family.measure_names() {
            feature_names.push(format!("f{family}.{name}"));
        }
    }
    let rows = features
        .iter()
        .map(|set| assemble_row(set, combo))
        .collect();
    Ok(MetaDataset {
        combo: combo.clone(),
        feature_names,
        rows,
        targets: targets.iter().map(|t| t.bits.clone()).collect(),
    })
}

/// The combo's concatenated feature vector for a single problem.
pub fn assemble_row(set: &MetaFeatureGroupSet, combo: &FamilyCombo) -> Vec<f64> {
    let mut row = Vec::with_capacity(combo.arity());
    for family in &combo.members {
        row.extend_from_slice(&set.vector(*family).values);
    }
    row
}

/// Single-label view of one algorithm's bit column.
#[derive(Debug, Clone)]
pub struct BinaryMetaDataset<'a> {
    pub algorithm_index: usize,
    pub rows: &'a [Vec<f64>],
    pub bits: Vec<u8>,
}

/// Binary Relevance: dataset j pairs every row with its j-th label bit,
/// preserving row order.
pub fn br_transform(m: &MetaDataset) -> Vec<BinaryMetaDataset<'_>> {
    (0..m.k())
        .map(|j| BinaryMetaDataset {
            algorithm_index: j,
            rows: &m.rows,
            bits: m.targets.iter().map(|t| t[j]).collect(),
        })
        .collect()
}
