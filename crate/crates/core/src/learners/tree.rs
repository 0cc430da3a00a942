//! Top-down induction of a C4.5-style decision tree: gain-ratio splits,
//! per-category branching on nominal attributes, best binary threshold on
//! numeric ones, Laplace-smoothed leaf distributions, and deterministic
//! missing-value routing to the heaviest child.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tabular::{AttributeKind, TabularDataset, Value};

const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Minimum instances required in at least two children of a split.
    pub min_leaf: usize,
    /// Maximum number of levels; `None` = unlimited. A single leaf is depth 1.
    pub max_depth: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_leaf: 2,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        /// Laplace-smoothed class distribution; sums to 1.
        distribution: Vec<f64>,
    },
    NumericSplit {
        attribute: usize,
        threshold: f64,
        /// Child index that receives instances with a missing value.
        heavy: usize,
        /// children[0]: value <= threshold, children[1]: value > threshold.
        children: Vec<TreeNode>,
    },
    NominalSplit {
        attribute: usize,
        /// Child index (= category index) that receives missing values.
        heavy: usize,
        /// One child per declared category of the attribute.
        children: Vec<TreeNode>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
    pub class_labels: Vec<String>,
    pub params: TreeParams,
    n_attributes: usize,
}

impl DecisionTree {
    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.n_attributes
    }

    /// Routes the instance to a leaf and returns its class distribution.
    /// Missing values follow the heaviest child at each split.
    pub fn predict_proba(&self, row: &[Value]) -> Result<Vec<f64>> {
        if row.len() != self.n_attributes {
            return Err(Error::SchemaMismatch(format!(
                "instance has {} values, tree expects {}",
                row.len(),
                self.n_attributes
            )));
        }
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { distribution } => return Ok(distribution.clone()),
                TreeNode::NumericSplit {
                    attribute,
                    threshold,
                    heavy,
                    children,
                } => {
                    node = match row[*attribute] {
                        Value::Num(v) => {
                            if v <= *threshold {
                                &children[0]
                            } else {
                                &children[1]
                            }
                        }
                        Value::Missing => &children[*heavy],
                        Value::Cat(_) => {
                            return Err(Error::SchemaMismatch(format!(
                                "attribute {attribute} is numeric in the tree"
                            )))
                        }
                    };
                }
                TreeNode::NominalSplit {
                    attribute,
                    heavy,
                    children,
                } => {
                    node = match row[*attribute] {
                        Value::Cat(c) => children.get(c as usize).ok_or_else(|| {
                            Error::SchemaMismatch(format!(
                                "category {c} out of range for attribute {attribute}"
                            ))
                        })?,
                        Value::Missing => &children[*heavy],
                        Value::Num(_) => {
                            return Err(Error::SchemaMismatch(format!(
                                "attribute {attribute} is nominal in the tree"
                            )))
                        }
                    };
                }
            }
        }
    }

    /// Class index with the highest predicted probability; ties break to the
    /// lowest index.
    pub fn predict_label(&self, row: &[Value]) -> Result<u32> {
        let probs = self.predict_proba(row)?;
        Ok(argmax(&probs) as u32)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    best
}

/// Greedy top-down induction. Stops on purity, depth, fewer than
/// 2 * min_leaf instances, or when no admissible split has positive gain.
pub fn train_tree(d: &TabularDataset, params: &TreeParams) -> Result<DecisionTree> {
    if d.n_instances() == 0 {
        return Err(Error::EmptyDataset);
    }
    if params.min_leaf == 0 {
        return Err(Error::Config("min_leaf must be >= 1".into()));
    }
    let indices: Vec<usize> = (0..d.n_instances()).collect();
    let root = build_node(d, indices, 1, params);
    Ok(DecisionTree {
        root,
        class_labels: d.target().categories.clone(),
        params: *params,
        n_attributes: d.n_attributes(),
    })
}

fn class_counts(d: &TabularDataset, idx: &[usize]) -> Vec<u64> {
    let mut counts = vec![0u64; d.n_classes()];
    for &i in idx {
        counts[d.label_of(i) as usize] += 1;
    }
    counts
}

/// Laplace-smoothed distribution (n_c + 1) / (n + K).
fn laplace(counts: &[u64], n: usize) -> Vec<f64> {
    let denom = (n + counts.len()) as f64;
    counts.iter().map(|&c| (c as f64 + 1.0) / denom).collect()
}

fn entropy_of_counts(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / nf;
            -p * p.log2()
        })
        .sum()
}

#[derive(Debug, Clone, Copy)]
struct SplitChoice {
    attribute: usize,
    threshold: Option<f64>,
    gain_ratio: f64,
}

fn build_node(d: &TabularDataset, idx: Vec<usize>, depth: usize, params: &TreeParams) -> TreeNode {
    let counts = class_counts(d, &idx);
    let distribution = laplace(&counts, idx.len());
    let observed = counts.iter().filter(|&&c| c > 0).count();

    let at_depth_limit = params.max_depth.is_some_and(|m| depth >= m);
    if observed <= 1 || at_depth_limit || idx.len() < 2 * params.min_leaf {
        return TreeNode::Leaf { distribution };
    }

    let mut best: Option<SplitChoice> = None;
    for attribute in 0..d.n_attributes() {
        let candidate = match d.attributes()[attribute].kind {
            AttributeKind::Numeric => evaluate_numeric(d, &idx, attribute, params.min_leaf),
            AttributeKind::Nominal => evaluate_nominal(d, &idx, attribute, params.min_leaf),
        };
        if let Some(c) = candidate {
            // strict improvement required, so earlier attributes and lower
            // thresholds win ties
            if best.is_none() || c.gain_ratio > best.unwrap().gain_ratio {
                best = Some(c);
            }
        }
    }
    let Some(choice) = best else {
        return TreeNode::Leaf { distribution };
    };

    match choice.threshold {
        Some(threshold) => {
            let attribute = choice.attribute;
            let mut left = Vec::new();
            let mut right = Vec::new();
            let mut missing = Vec::new();
            for &i in &idx {
                match d.row(i)[attribute] {
                    Value::Num(v) if v <= threshold => left.push(i),
                    Value::Num(_) => right.push(i),
                    _ => missing.push(i),
                }
            }
            let heavy = usize::from(right.len() > left.len());
            if heavy == 0 {
                left.extend(missing);
            } else {
                right.extend(missing);
            }
            let children = vec![
                build_node(d, left, depth + 1, params),
                build_node(d, right, depth + 1, params),
            ];
            TreeNode::NumericSplit {
                attribute,
                threshold,
                heavy,
                children,
            }
        }
        None => {
            let attribute = choice.attribute;
            let n_categories = d.attributes()[attribute].categories.len();
            let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n_categories];
            let mut missing = Vec::new();
            for &i in &idx {
                match d.row(i)[attribute] {
                    Value::Cat(c) => buckets[c as usize].push(i),
                    _ => missing.push(i),
                }
            }
            let mut heavy = 0;
            for (c, bucket) in buckets.iter().enumerate() {
                if bucket.len() > buckets[heavy].len() {
                    heavy = c;
                }
            }
            buckets[heavy].extend(missing);
            let children = buckets
                .into_iter()
                .map(|bucket| {
                    if bucket.is_empty() {
                        TreeNode::Leaf {
                            distribution: distribution.clone(),
                        }
                    } else {
                        build_node(d, bucket, depth + 1, params)
                    }
                })
                .collect();
            TreeNode::NominalSplit {
                attribute,
                heavy,
                children,
            }
        }
    }
}

/// Best binary threshold at midpoints between consecutive distinct values,
/// evaluated on the non-missing subset. Admissible when both sides hold at
/// least `min_leaf` instances and the gain is positive.
fn evaluate_numeric(
    d: &TabularDataset,
    idx: &[usize],
    attribute: usize,
    min_leaf: usize,
) -> Option<SplitChoice> {
    let mut pairs: Vec<(f64, u32)> = idx
        .iter()
        .filter_map(|&i| d.row(i)[attribute].as_num().map(|v| (v, d.label_of(i))))
        .collect();
    if pairs.len() < 2 * min_leaf {
        return None;
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let n = pairs.len();
    let k = d.n_classes();
    let mut total = vec![0u64; k];
    for &(_, label) in &pairs {
        total[label as usize] += 1;
    }
    let base_entropy = entropy_of_counts(&total);

    let mut left = vec![0u64; k];
    let mut best: Option<SplitChoice> = None;
    for i in 0..n - 1 {
        left[pairs[i].1 as usize] += 1;
        if pairs[i].0 == pairs[i + 1].0 {
            continue;
        }
        let n_left = i + 1;
        let n_right = n - n_left;
        if n_left < min_leaf || n_right < min_leaf {
            continue;
        }
        let right: Vec<u64> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        let wl = n_left as f64 / n as f64;
        let wr = n_right as f64 / n as f64;
        let gain = base_entropy - wl * entropy_of_counts(&left) - wr * entropy_of_counts(&right);
        if gain <= GAIN_EPS {
            continue;
        }
        let split_info = -(wl * wl.log2() + wr * wr.log2());
        let gain_ratio = gain / split_info;
        if best.is_none() || gain_ratio > best.unwrap().gain_ratio {
            best = Some(SplitChoice {
                attribute,
                threshold: Some((pairs[i].0 + pairs[i + 1].0) / 2.0),
                gain_ratio,
            });
        }
    }
    best
}

/// Per-category branching, evaluated on the non-missing subset. Admissible
/// when at least two categories hold `min_leaf` instances and the gain is
/// positive.
fn evaluate_nominal(
    d: &TabularDataset,
    idx: &[usize],
    attribute: usize,
    min_leaf: usize,
) -> Option<SplitChoice> {
    let n_categories = d.attributes()[attribute].categories.len();
    let k = d.n_classes();
    let mut joint = vec![vec![0u64; k]; n_categories];
    let mut n = 0usize;
    for &i in idx {
        if let Value::Cat(c) = d.row(i)[attribute] {
            joint[c as usize][d.label_of(i) as usize] += 1;
            n += 1;
        }
    }
    if n == 0 {
        return None;
    }
    let sizes: Vec<u64> = joint.iter().map(|row| row.iter().sum()).collect();
    if sizes.iter().filter(|&&s| s as usize >= min_leaf).count() < 2 {
        return None;
    }
    let mut total = vec![0u64; k];
    for row in &joint {
        for (t, &c) in total.iter_mut().zip(row) {
            *t += c;
        }
    }
    let base_entropy = entropy_of_counts(&total);
    let nf = n as f64;
    let mut children_entropy = 0.0;
    let mut split_info = 0.0;
    for (row, &size) in joint.iter().zip(&sizes) {
        if size == 0 {
            continue;
        }
        let w = size as f64 / nf;
        children_entropy += w * entropy_of_counts(row);
        split_info -= w * w.log2();
    }
    let gain = base_entropy - children_entropy;
    if gain <= GAIN_EPS || split_info <= 0.0 {
        return None;
    }
    Some(SplitChoice {
        attribute,
        threshold: None,
        gain_ratio: gain / split_info,
    })
}

/// Best-single-split information gain of each attribute over the whole
/// dataset (0 when no admissible split exists). Drives the elite 1-NN and
/// the decision/worst-node landmarkers.
pub(crate) fn attribute_gains(d: &TabularDataset) -> Vec<f64> {
    let idx: Vec<usize> = (0..d.n_instances()).collect();
    (0..d.n_attributes())
        .map(|a| match d.attributes()[a].kind {
            AttributeKind::Numeric => best_numeric_gain(d, &idx, a),
            AttributeKind::Nominal => nominal_gain(d, &idx, a),
        })
        .collect()
}

fn best_numeric_gain(d: &TabularDataset, idx: &[usize], attribute: usize) -> f64 {
    let mut pairs: Vec<(f64, u32)> = idx
        .iter()
        .filter_map(|&i| d.row(i)[attribute].as_num().map(|v| (v, d.label_of(i))))
        .collect();
    if pairs.len() < 2 {
        return 0.0;
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let n = pairs.len();
    let k = d.n_classes();
    let mut total = vec![0u64; k];
    for &(_, label) in &pairs {
        total[label as usize] += 1;
    }
    let base = entropy_of_counts(&total);
    let mut left = vec![0u64; k];
    let mut best = 0.0f64;
    for i in 0..n - 1 {
        left[pairs[i].1 as usize] += 1;
        if pairs[i].0 == pairs[i + 1].0 {
            continue;
        }
        let right: Vec<u64> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        let wl = (i + 1) as f64 / n as f64;
        let gain =
            base - wl * entropy_of_counts(&left) - (1.0 - wl) * entropy_of_counts(&right);
        best = best.max(gain);
    }
    best
}

fn nominal_gain(d: &TabularDataset, idx: &[usize], attribute: usize) -> f64 {
    let n_categories = d.attributes()[attribute].categories.len();
    let k = d.n_classes();
    let mut joint = vec![vec![0u64; k]; n_categories];
    let mut n = 0usize;
    for &i in idx {
        if let Value::Cat(c) = d.row(i)[attribute] {
            joint[c as usize][d.label_of(i) as usize] += 1;
            n += 1;
        }
    }
    if n == 0 {
        return 0.0;
    }
    let mut total = vec![0u64; k];
    for row in &joint {
        for (t, &c) in total.iter_mut().zip(row) {
            *t += c;
        }
    }
    let base = entropy_of_counts(&total);
    let nf = n as f64;
    let children: f64 = joint
        .iter()
        .map(|row| {
            let size: u64 = row.iter().sum();
            if size == 0 {
                0.0
            } else {
                size as f64 / nf * entropy_of_counts(row)
            }
        })
        .sum();
    (base - children).max(0.0)
}

/// One-level tree on a fixed attribute: a single split with Laplace leaves,
/// or a plain prior leaf when the attribute cannot split the data.
pub(crate) fn stump_on_attribute(d: &TabularDataset, attribute: usize) -> DecisionTree {
    let idx: Vec<usize> = (0..d.n_instances()).collect();
    let counts = class_counts(d, &idx);
    let prior = laplace(&counts, idx.len());

    let root = match d.attributes()[attribute].kind {
        AttributeKind::Numeric => {
            let split = evaluate_numeric(d, &idx, attribute, 1);
            match split {
                Some(SplitChoice {
                    threshold: Some(threshold),
                    ..
                }) => {
                    let mut left = Vec::new();
                    let mut right = Vec::new();
                    for &i in &idx {
                        match d.row(i)[attribute] {
                            Value::Num(v) if v <= threshold => left.push(i),
                            Value::Num(_) => right.push(i),
                            _ => {}
                        }
                    }
                    let heavy = usize::from(right.len() > left.len());
                    let children = vec![leaf_for(d, &left, &prior), leaf_for(d, &right, &prior)];
                    TreeNode::NumericSplit {
                        attribute,
                        threshold,
                        heavy,
                        children,
                    }
                }
                _ => TreeNode::Leaf {
                    distribution: prior.clone(),
                },
            }
        }
        AttributeKind::Nominal => {
            let n_categories = d.attributes()[attribute].categories.len();
            let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n_categories];
            for &i in &idx {
                if let Value::Cat(c) = d.row(i)[attribute] {
                    buckets[c as usize].push(i);
                }
            }
            if buckets.iter().filter(|b| !b.is_empty()).count() < 2 {
                TreeNode::Leaf {
                    distribution: prior.clone(),
                }
            } else {
                let mut heavy = 0;
                for (c, bucket) in buckets.iter().enumerate() {
                    if bucket.len() > buckets[heavy].len() {
                        heavy = c;
                    }
                }
                let children = buckets
                    .iter()
                    .map(|bucket| leaf_for(d, bucket, &prior))
                    .collect();
                TreeNode::NominalSplit {
                    attribute,
                    heavy,
                    children,
                }
            }
        }
    };
    DecisionTree {
        root,
        class_labels: d.target().categories.clone(),
        params: TreeParams {
            min_leaf: 1,
            max_depth: Some(2),
        },
        n_attributes: d.n_attributes(),
    }
}

fn leaf_for(d: &TabularDataset, idx: &[usize], fallback: &[f64]) -> TreeNode {
    if idx.is_empty() {
        TreeNode::Leaf {
            distribution: fallback.to_vec(),
        }
    } else {
        TreeNode::Leaf {
            distribution: laplace(&class_counts(d, idx), idx.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::Attribute;
    use approx::assert_abs_diff_eq;

    fn nominal_dataset(data: &[(&str, &str, &str)]) -> TabularDataset {
        let cats = |vals: Vec<&str>| -> Vec<String> {
            let mut out: Vec<String> = Vec::new();
            for v in vals {
                if !out.iter().any(|o| o == v) {
                    out.push(v.to_string());
                }
            }
            out
        };
        let a_cats = cats(data.iter().map(|t| t.0).collect());
        let b_cats = cats(data.iter().map(|t| t.1).collect());
        let c_cats = cats(data.iter().map(|t| t.2).collect());
        let attributes = vec![
            Attribute::nominal("a", a_cats.clone()),
            Attribute::nominal("b", b_cats.clone()),
        ];
        let target = Attribute::nominal("cls", c_cats.clone());
        let rows = data
            .iter()
            .map(|(a, b, _)| {
                vec![
                    Value::Cat(a_cats.iter().position(|x| x == a).unwrap() as u32),
                    Value::Cat(b_cats.iter().position(|x| x == b).unwrap() as u32),
                ]
            })
            .collect();
        let labels = data
            .iter()
            .map(|(_, _, c)| c_cats.iter().position(|x| x == c).unwrap() as u32)
            .collect();
        TabularDataset::new("t", attributes, target, rows, labels).unwrap()
    }

    #[test]
    fn single_class_becomes_one_leaf() {
        let d = nominal_dataset(&[("x", "u", "p"), ("y", "v", "p"), ("x", "v", "p")]);
        let tree = train_tree(&d, &TreeParams::default()).unwrap();
        assert!(matches!(tree.root, TreeNode::Leaf { .. }));
        let probs = tree.predict_proba(d.row(0)).unwrap();
        assert_eq!(argmax(&probs), 0);
    }

    #[test]
    fn xor_pattern_reaches_full_training_accuracy() {
        // class = a XOR b, with unbalanced group sizes so marginal gains are
        // positive and the greedy splitter can get started
        let mut data = Vec::new();
        for _ in 0..3 {
            data.push(("0", "0", "n"));
            data.push(("1", "0", "y"));
        }
        for _ in 0..2 {
            data.push(("0", "1", "y"));
            data.push(("1", "1", "n"));
        }
        let d = nominal_dataset(&data);
        let tree = train_tree(
            &d,
            &TreeParams {
                min_leaf: 1,
                max_depth: None,
            },
        )
        .unwrap();
        for i in 0..d.n_instances() {
            assert_eq!(tree.predict_label(d.row(i)).unwrap(), d.label_of(i));
        }
    }

    #[test]
    fn min_leaf_at_instance_count_gives_prior_leaf() {
        let d = nominal_dataset(&[("x", "u", "p"), ("y", "v", "n"), ("x", "v", "p")]);
        let tree = train_tree(
            &d,
            &TreeParams {
                min_leaf: d.n_instances(),
                max_depth: None,
            },
        )
        .unwrap();
        assert!(matches!(tree.root, TreeNode::Leaf { .. }));
        // Laplace prior: (2+1)/(3+2), (1+1)/(3+2)
        let probs = tree.predict_proba(d.row(1)).unwrap();
        assert_abs_diff_eq!(probs[0], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[1], 0.4, epsilon = 1e-12);
    }

    #[test]
    fn numeric_threshold_at_midpoint() {
        let attributes = vec![Attribute::numeric("x")];
        let target = Attribute::nominal("cls", vec!["lo".into(), "hi".into()]);
        let rows: Vec<_> = [1.0, 2.0, 3.0, 10.0, 11.0, 12.0]
            .iter()
            .map(|&v| vec![Value::Num(v)])
            .collect();
        let d =
            TabularDataset::new("num", attributes, target, rows, vec![0, 0, 0, 1, 1, 1]).unwrap();
        let tree = train_tree(&d, &TreeParams::default()).unwrap();
        match &tree.root {
            TreeNode::NumericSplit { threshold, .. } => {
                assert_abs_diff_eq!(*threshold, 6.5, epsilon = 1e-12);
            }
            other => panic!("expected numeric split, got {other:?}"),
        }
    }

    #[test]
    fn probabilities_sum_to_one_and_never_hit_bounds() {
        let d = nominal_dataset(&[
            ("x", "u", "p"),
            ("y", "v", "n"),
            ("x", "v", "p"),
            ("y", "u", "n"),
            ("x", "u", "n"),
        ]);
        let tree = train_tree(&d, &TreeParams::default()).unwrap();
        for i in 0..d.n_instances() {
            let probs = tree.predict_proba(d.row(i)).unwrap();
            let sum: f64 = probs.iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
            for &p in &probs {
                assert!(p > 0.0 && p < 1.0, "Laplace smoothing violated: {p}");
            }
        }
    }

    #[test]
    fn missing_routes_to_heaviest_child() {
        let attributes = vec![Attribute::numeric("x")];
        let target = Attribute::nominal("cls", vec!["lo".into(), "hi".into()]);
        // 2 low instances, 4 high: the heavy child is the right one
        let rows: Vec<_> = [1.0, 2.0, 10.0, 11.0, 12.0, 13.0]
            .iter()
            .map(|&v| vec![Value::Num(v)])
            .collect();
        let d = TabularDataset::new("num", attributes, target, rows, vec![0, 0, 1, 1, 1, 1])
            .unwrap();
        let tree = train_tree(&d, &TreeParams::default()).unwrap();
        let label = tree.predict_label(&[Value::Missing]).unwrap();
        assert_eq!(label, 1);
    }

    #[test]
    fn gain_ratio_split_beats_alternatives_on_rescan() {
        // the chosen root split must have the best gain ratio among all
        // admissible candidates, re-derived independently
        let d = nominal_dataset(&[
            ("x", "u", "p"),
            ("x", "v", "p"),
            ("y", "u", "n"),
            ("y", "v", "n"),
            ("x", "u", "p"),
            ("y", "v", "n"),
        ]);
        let tree = train_tree(&d, &TreeParams { min_leaf: 1, max_depth: None }).unwrap();
        let chosen = match &tree.root {
            TreeNode::NominalSplit { attribute, .. } => *attribute,
            other => panic!("expected nominal split, got {other:?}"),
        };
        let idx: Vec<usize> = (0..d.n_instances()).collect();
        let ratios: Vec<f64> = (0..d.n_attributes())
            .map(|a| {
                evaluate_nominal(&d, &idx, a, 1)
                    .map(|c| c.gain_ratio)
                    .unwrap_or(0.0)
            })
            .collect();
        for (a, &ratio) in ratios.iter().enumerate() {
            assert!(
                ratios[chosen] >= ratio,
                "attribute {a} has better ratio than chosen {chosen}"
            );
        }
    }

    #[test]
    fn serializes_to_json_and_back() {
        let d = nominal_dataset(&[("x", "u", "p"), ("y", "v", "n"), ("x", "v", "p")]);
        let tree = train_tree(&d, &TreeParams { min_leaf: 1, max_depth: None }).unwrap();
        let json = serde_json::to_string(&tree).unwrap();
        let back: DecisionTree = serde_json::from_str(&json).unwrap();
        for i in 0..d.n_instances() {
            assert_eq!(
                tree.predict_proba(d.row(i)).unwrap(),
                back.predict_proba(d.row(i)).unwrap()
            );
        }
    }

    #[test]
    fn empty_dataset_rejected() {
        let d = TabularDataset::new(
            "empty",
            vec![Attribute::numeric("x")],
            Attribute::nominal("cls", vec!["a".into(), "b".into()]),
            vec![],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            train_tree(&d, &TreeParams::default()),
            Err(Error::EmptyDataset)
        ));
    }
}
