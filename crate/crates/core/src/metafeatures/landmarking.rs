//! Family 3: stratified 10-fold CV accuracy of the six landmark learners,
//! in the fixed order naive Bayes, 1-NN, elite 1-NN, decision node, random
//! node, worst node.

use super::{FamilyId, MetaFeatureVector};
use crate::error::{Error, Result};
use crate::learners::{train_landmarker, LandmarkKind};
use crate::rng::derive_seed;
use crate::tabular::{stratified_folds, TabularDataset};

const FOLDS: usize = 10;

pub fn extract_landmarking(d: &TabularDataset, seed: u64) -> Result<MetaFeatureVector> {
    if d.n_instances() < FOLDS {
        return Err(Error::TooFewInstances(format!(
            "landmarking needs >= {FOLDS} instances, got {}",
            d.n_instances()
        )));
    }
    if d.observed_class_count() < 2 {
        return Err(Error::TooFewInstances(
            "landmarking needs >= 2 observed classes".into(),
        ));
    }
    let plan = stratified_folds(d, FOLDS, derive_seed(seed, &[0x6c6d]))?;
    let mut correct = [0usize; 6];
    for fold in 0..FOLDS as u32 {
        let train = d.subset(&plan.train_indices(fold));
        let test_idx = plan.test_indices(fold);
        for (slot, kind) in LandmarkKind::ALL.iter().enumerate() {
            let model = train_landmarker(&train, *kind, derive_seed(seed, &[slot as u64, fold as u64]))?;
            correct[slot] += test_idx
                .iter()
                .filter(|&&i| model.predict(d.row(i)).map(|p| p == d.label_of(i)).unwrap_or(false))
                .count();
        }
    }
    let n = d.n_instances() as f64;
    let raw = correct.iter().map(|&c| c as f64 / n).collect();
    Ok(MetaFeatureVector::sentinelized(
        FamilyId::new(3).unwrap(),
        raw,
    ))
}
