//! Landmark learners: naive Bayes, 1-NN under a mixed distance, elite 1-NN
//! on the top-gain attribute, and one-level decision/random/worst node trees.

use rand::Rng;

use super::tree::{argmax, attribute_gains, stump_on_attribute, DecisionTree};
use crate::error::{Error, Result};
use crate::rng::rng_for;
use crate::tabular::{AttributeKind, TabularDataset, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandmarkKind {
    NaiveBayes,
    OneNn,
    EliteOneNn,
    DecisionNode,
    RandomNode,
    WorstNode,
}

impl LandmarkKind {
    pub const ALL: [LandmarkKind; 6] = [
        LandmarkKind::NaiveBayes,
        LandmarkKind::OneNn,
        LandmarkKind::EliteOneNn,
        LandmarkKind::DecisionNode,
        LandmarkKind::RandomNode,
        LandmarkKind::WorstNode,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LandmarkKind::NaiveBayes => "naive_bayes",
            LandmarkKind::OneNn => "one_nn",
            LandmarkKind::EliteOneNn => "elite_one_nn",
            LandmarkKind::DecisionNode => "decision_node",
            LandmarkKind::RandomNode => "random_node",
            LandmarkKind::WorstNode => "worst_node",
        }
    }
}

#[derive(Debug, Clone)]
pub enum LandmarkModel {
    NaiveBayes(NaiveBayesModel),
    NearestNeighbor(NearestNeighborModel),
    Stump(DecisionTree),
}

impl LandmarkModel {
    pub fn predict(&self, row: &[Value]) -> Result<u32> {
        match self {
            LandmarkModel::NaiveBayes(m) => m.predict(row),
            LandmarkModel::NearestNeighbor(m) => m.predict(row),
            LandmarkModel::Stump(t) => t.predict_label(row),
        }
    }
}

pub fn train_landmarker(d: &TabularDataset, kind: LandmarkKind, seed: u64) -> Result<LandmarkModel> {
    if d.n_instances() == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(match kind {
        LandmarkKind::NaiveBayes => LandmarkModel::NaiveBayes(NaiveBayesModel::train(d)),
        LandmarkKind::OneNn => LandmarkModel::NearestNeighbor(NearestNeighborModel::train(d, None)),
        LandmarkKind::EliteOneNn => {
            let gains = attribute_gains(d);
            let elite = argmax(&gains);
            LandmarkModel::NearestNeighbor(NearestNeighborModel::train(d, Some(elite)))
        }
        LandmarkKind::DecisionNode => {
            let gains = attribute_gains(d);
            LandmarkModel::Stump(stump_on_attribute(d, argmax(&gains)))
        }
        LandmarkKind::RandomNode => {
            let mut rng = rng_for(seed, &[0x7261_6e64]);
            let attribute = rng.gen_range(0..d.n_attributes());
            LandmarkModel::Stump(stump_on_attribute(d, attribute))
        }
        LandmarkKind::WorstNode => {
            let gains = attribute_gains(d);
            let mut worst = 0;
            for (a, &g) in gains.iter().enumerate() {
                if g < gains[worst] {
                    worst = a;
                }
            }
            LandmarkModel::Stump(stump_on_attribute(d, worst))
        }
    })
}

/// Gaussian likelihoods on numeric attributes, Laplace-smoothed frequencies
/// on nominal ones; missing values skip the attribute.
#[derive(Debug, Clone)]
pub struct NaiveBayesModel {
    log_priors: Vec<f64>,
    numeric: Vec<Option<Vec<(f64, f64)>>>,
    nominal: Vec<Option<Vec<Vec<f64>>>>,
    n_attributes: usize,
}

const VAR_FLOOR: f64 = 1e-9;

impl NaiveBayesModel {
    pub fn train(d: &TabularDataset) -> Self {
        let k = d.n_classes();
        let n = d.n_instances();
        let counts = d.class_counts();
        let log_priors = counts
            .iter()
            .map(|&c| ((c as f64 + 1.0) / ((n + k) as f64)).ln())
            .collect();

        let mut numeric = vec![None; d.n_attributes()];
        let mut nominal = vec![None; d.n_attributes()];
        for (a, attr) in d.attributes().iter().enumerate() {
            match attr.kind {
                AttributeKind::Numeric => {
                    let mut per_class: Vec<Vec<f64>> = vec![Vec::new(); k];
                    let mut all = Vec::new();
                    for i in 0..n {
                        if let Value::Num(v) = d.row(i)[a] {
                            per_class[d.label_of(i) as usize].push(v);
                            all.push(v);
                        }
                    }
                    let global = gaussian_params(&all);
                    let params = per_class
                        .iter()
                        .map(|vals| {
                            if vals.is_empty() {
                                global
                            } else {
                                gaussian_params(vals)
                            }
                        })
                        .collect();
                    numeric[a] = Some(params);
                }
                AttributeKind::Nominal => {
                    let m = attr.categories.len();
                    let mut joint = vec![vec![0u64; m]; k];
                    let mut present = vec![0u64; k];
                    for i in 0..n {
                        if let Value::Cat(c) = d.row(i)[a] {
                            let cl = d.label_of(i) as usize;
                            joint[cl][c as usize] += 1;
                            present[cl] += 1;
                        }
                    }
                    let log_probs = joint
                        .iter()
                        .zip(&present)
                        .map(|(row, &tot)| {
                            row.iter()
                                .map(|&c| {
                                    ((c as f64 + 1.0) / ((tot as usize + m) as f64)).ln()
                                })
                                .collect()
                        })
                        .collect();
                    nominal[a] = Some(log_probs);
                }
            }
        }
        NaiveBayesModel {
            log_priors,
            numeric,
            nominal,
            n_attributes: d.n_attributes(),
        }
    }

    pub fn predict(&self, row: &[Value]) -> Result<u32> {
        if row.len() != self.n_attributes {
            return Err(Error::SchemaMismatch(format!(
                "instance has {} values, model expects {}",
                row.len(),
                self.n_attributes
            )));
        }
        let k = self.log_priors.len();
        let mut scores = self.log_priors.clone();
        for (a, value) in row.iter().enumerate() {
            match value {
                Value::Num(v) => {
                    if let Some(params) = &self.numeric[a] {
                        for (class, score) in scores.iter_mut().enumerate().take(k) {
                            let (mean, var) = params[class];
                            *score += log_gaussian(*v, mean, var);
                        }
                    }
                }
                Value::Cat(c) => {
                    if let Some(log_probs) = &self.nominal[a] {
                        for (class, score) in scores.iter_mut().enumerate().take(k) {
                            let row = &log_probs[class];
                            let idx = *c as usize;
                            if idx >= row.len() {
                                return Err(Error::SchemaMismatch(format!(
                                    "category {c} out of range for attribute {a}"
                                )));
                            }
                            *score += row[idx];
                        }
                    }
                }
                Value::Missing => {}
            }
        }
        Ok(argmax(&scores) as u32)
    }
}

fn gaussian_params(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 1.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.max(VAR_FLOOR))
}

fn log_gaussian(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * ((x - mean).powi(2) / var + var.ln() + (2.0 * std::f64::consts::PI).ln())
}

/// Per-attribute normalization for the mixed distance.
#[derive(Debug, Clone)]
pub struct DistanceContext {
    kinds: Vec<AttributeKind>,
    ranges: Vec<(f64, f64)>,
}

impl DistanceContext {
    /// Maps a numeric value into [0, 1] by the training range of the
    /// attribute; a degenerate range maps everything to 0.5.
    pub fn normalize(&self, attr: usize, v: f64) -> f64 {
        let (lo, hi) = self.ranges[attr];
        let range = hi - lo;
        if range <= 0.0 {
            0.5
        } else {
            ((v - lo) / range).clamp(0.0, 1.0)
        }
    }

    pub fn fit(d: &TabularDataset) -> Self {
        let kinds = d.attributes().iter().map(|a| a.kind).collect();
        let ranges = (0..d.n_attributes())
            .map(|a| {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for row in d.rows() {
                    if let Value::Num(v) = row[a] {
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                if lo.is_finite() {
                    (lo, hi)
                } else {
                    (0.0, 0.0)
                }
            })
            .collect();
        DistanceContext { kinds, ranges }
    }
}

/// Mixed distance: numeric attributes contribute the range-normalized
/// absolute difference (clamped to 1), nominal ones 0/1 overlap, and any
/// missing side contributes 1. `restrict` limits the sum to one attribute.
pub(crate) fn mixed_distance(
    ctx: &DistanceContext,
    a: &[Value],
    b: &[Value],
    restrict: Option<usize>,
) -> f64 {
    let attrs: Box<dyn Iterator<Item = usize>> = match restrict {
        Some(only) => Box::new(std::iter::once(only)),
        None => Box::new(0..ctx.kinds.len()),
    };
    let mut total = 0.0;
    for i in attrs {
        total += match (&a[i], &b[i]) {
            (Value::Missing, _) | (_, Value::Missing) => 1.0,
            (Value::Num(x), Value::Num(y)) => {
                let (lo, hi) = ctx.ranges[i];
                let range = hi - lo;
                if range <= 0.0 {
                    if x == y {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    ((x - y).abs() / range).min(1.0)
                }
            }
            (Value::Cat(x), Value::Cat(y)) => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
            _ => 1.0,
        };
    }
    total
}

/// 1-NN under the mixed distance; ties break to the lowest training index.
#[derive(Debug, Clone)]
pub struct NearestNeighborModel {
    rows: Vec<Vec<Value>>,
    labels: Vec<u32>,
    context: DistanceContext,
    restrict: Option<usize>,
}

impl NearestNeighborModel {
    pub fn train(d: &TabularDataset, restrict: Option<usize>) -> Self {
        NearestNeighborModel {
            rows: d.rows().to_vec(),
            labels: d.labels().to_vec(),
            context: DistanceContext::fit(d),
            restrict,
        }
    }

    pub fn predict(&self, row: &[Value]) -> Result<u32> {
        if row.len() != self.context.kinds.len() {
            return Err(Error::SchemaMismatch(format!(
                "instance has {} values, model expects {}",
                row.len(),
                self.context.kinds.len()
            )));
        }
        let mut best = 0usize;
        let mut best_dist = f64::INFINITY;
        for (i, train_row) in self.rows.iter().enumerate() {
            let dist = mixed_distance(&self.context, row, train_row, self.restrict);
            if dist < best_dist {
                best_dist = dist;
                best = i;
            }
        }
        Ok(self.labels[best])
    }
}
