//! Family 2: geometry of a decision tree induced on the problem — height,
//! width, node and leaf counts, per-level and per-branch statistics, and
//! attribute occurrence counts. A lone leaf has height 1; branch lengths
//! count nodes from root to leaf inclusive.

use super::{mean, pop_std, FamilyId, MetaFeatureVector};
use crate::error::Result;
use crate::learners::{train_tree, TreeNode, TreeParams};
use crate::tabular::TabularDataset;

pub fn extract_model_structure(
    d: &TabularDataset,
    params: &TreeParams,
) -> Result<MetaFeatureVector> {
    let tree = train_tree(d, params)?;
    let mut geometry = Geometry {
        level_counts: Vec::new(),
        branch_lengths: Vec::new(),
        attr_occurrences: vec![0usize; d.n_attributes()],
        node_count: 0,
        leaf_count: 0,
    };
    walk(&tree.root, 1, &mut geometry);

    let levels: Vec<f64> = geometry.level_counts.iter().map(|&c| c as f64).collect();
    let branches: Vec<f64> = geometry.branch_lengths.iter().map(|&c| c as f64).collect();
    let occurrences: Vec<f64> = geometry.attr_occurrences.iter().map(|&c| c as f64).collect();
    let width = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let raw = vec![
        levels.len() as f64,
        width,
        geometry.node_count as f64,
        geometry.leaf_count as f64,
        width, // level_max: same quantity as tree width
        mean(&levels),
        pop_std(&levels),
        branches.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        branches.iter().copied().fold(f64::INFINITY, f64::min),
        mean(&branches),
        pop_std(&branches),
        occurrences.iter().copied().fold(f64::INFINITY, f64::min),
        occurrences.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean(&occurrences),
        pop_std(&occurrences),
    ];
    Ok(MetaFeatureVector::sentinelized(
        FamilyId::new(2).unwrap(),
        raw,
    ))
}

struct Geometry {
    level_counts: Vec<usize>,
    branch_lengths: Vec<usize>,
    attr_occurrences: Vec<usize>,
    node_count: usize,
    leaf_count: usize,
}

fn walk(node: &TreeNode, depth: usize, g: &mut Geometry) {
    if g.level_counts.len() < depth {
        g.level_counts.resize(depth, 0);
    }
    g.level_counts[depth - 1] += 1;
    g.node_count += 1;
    match node {
        TreeNode::Leaf { .. } => {
            g.leaf_count += 1;
            g.branch_lengths.push(depth);
        }
        TreeNode::NumericSplit {
            attribute, children, ..
        } => {
            g.attr_occurrences[*attribute] += 1;
            for child in children {
                walk(child, depth + 1, g);
            }
        }
        TreeNode::NominalSplit {
            attribute, children, ..
        } => {
            g.attr_occurrences[*attribute] += 1;
            for child in children {
                walk(child, depth + 1, g);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{Attribute, Value};

    fn measure(v: &MetaFeatureVector, name: &str) -> f64 {
        let idx = v.names().iter().position(|n| *n == name).unwrap();
        v.values[idx]
    }

    #[test]
    fn single_leaf_conventions() {
        // pure target: the tree is one leaf
        let attributes = vec![Attribute::numeric("x")];
        let target = Attribute::nominal("c", vec!["a".into(), "b".into()]);
        let rows: Vec<_> = (0..5).map(|i| vec![Value::Num(i as f64)]).collect();
        let d = TabularDataset::new("pure", attributes, target, rows, vec![0; 5]).unwrap();
        let v = extract_model_structure(&d, &TreeParams::default()).unwrap();
        assert_eq!(measure(&v, "tree_height"), 1.0);
        assert_eq!(measure(&v, "tree_width"), 1.0);
        assert_eq!(measure(&v, "node_count"), 1.0);
        assert_eq!(measure(&v, "leaf_count"), 1.0);
        assert_eq!(measure(&v, "attr_occ_max"), 0.0);
        assert_eq!(measure(&v, "attr_occ_min"), 0.0);
    }

    #[test]
    fn three_way_stump_geometry() {
        let attributes = vec![Attribute::nominal(
            "color",
            vec!["r".into(), "g".into(), "b".into()],
        )];
        let target = Attribute::nominal("c", vec!["x".into(), "y".into(), "z".into()]);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..9 {
            let c = (i % 3) as u32;
            rows.push(vec![Value::Cat(c)]);
            labels.push(c);
        }
        let d = TabularDataset::new("tri", attributes, target, rows, labels).unwrap();
        let v = extract_model_structure(&d, &TreeParams::default()).unwrap();
        assert_eq!(measure(&v, "leaf_count"), 3.0);
        assert_eq!(measure(&v, "tree_height"), 2.0);
        assert_eq!(measure(&v, "branch_longest"), 2.0);
        assert_eq!(measure(&v, "branch_shortest"), 2.0);
        assert_eq!(measure(&v, "node_count"), 4.0);
        assert_eq!(measure(&v, "level_max"), 3.0);
        assert_eq!(measure(&v, "level_mean"), 2.0);
        assert_eq!(measure(&v, "level_std"), 1.0);
        assert_eq!(measure(&v, "attr_occ_mean"), 1.0);
    }

    #[test]
    fn branch_order_statistics_hold() {
        let d = crate::synth::generate_problem(3, 0);
        let v = extract_model_structure(&d, &TreeParams::default()).unwrap();
        let short = measure(&v, "branch_shortest");
        let mean_len = measure(&v, "branch_mean");
        let long = measure(&v, "branch_longest");
        assert!(short <= mean_len && mean_len <= long);
    }
}
