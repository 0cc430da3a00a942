//! Family 5: structural-information measures. Instances become itemsets —
//! one (attribute, category-or-bin) item per present attribute, numeric
//! attributes discretized into 10 equal-frequency bins — and the supports of
//! the observed one-item and cross-attribute two-item sets are summarized by
//! nine quantiles each.

use std::collections::BTreeMap;

use super::{quantile_sorted, FamilyId, MetaFeatureVector};
use crate::error::{Error, Result};
use crate::tabular::{AttributeKind, TabularDataset, Value};

const BINS: usize = 10;

pub fn extract_structural(d: &TabularDataset) -> Result<MetaFeatureVector> {
    if d.n_instances() == 0 {
        return Err(Error::EmptyDataset);
    }
    let n = d.n_instances();
    let m = d.n_attributes();

    // per-attribute decile edges for numeric discretization
    let edges: Vec<Option<Vec<f64>>> = (0..m)
        .map(|a| match d.attributes()[a].kind {
            AttributeKind::Nominal => None,
            AttributeKind::Numeric => {
                let mut values: Vec<f64> =
                    d.rows().iter().filter_map(|row| row[a].as_num()).collect();
                values.sort_by(|x, y| x.partial_cmp(y).unwrap());
                Some(
                    (1..BINS)
                        .map(|k| quantile_sorted(&values, k as f64 / BINS as f64))
                        .collect(),
                )
            }
        })
        .collect();

    // itemize each instance: one (attribute, code) item per present value
    let item_rows: Vec<Vec<(usize, u32)>> = d
        .rows()
        .iter()
        .map(|row| {
            (0..m)
                .filter_map(|a| match row[a] {
                    Value::Cat(c) => Some((a, c)),
                    Value::Num(v) => {
                        let bin = edges[a]
                            .as_ref()
                            .map(|e| e.iter().filter(|&&edge| v > edge).count() as u32)
                            .unwrap_or(0);
                        Some((a, bin))
                    }
                    Value::Missing => None,
                })
                .collect()
        })
        .collect();

    let mut one_counts: BTreeMap<(usize, u32), usize> = BTreeMap::new();
    let mut two_counts: BTreeMap<((usize, u32), (usize, u32)), usize> = BTreeMap::new();
    for items in &item_rows {
        for &item in items {
            *one_counts.entry(item).or_default() += 1;
        }
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                *two_counts.entry((items[i], items[j])).or_default() += 1;
            }
        }
    }
    let nf = n as f64;
    let mut one_supports: Vec<f64> = one_counts.values().map(|&c| c as f64 / nf).collect();
    let mut two_supports: Vec<f64> = two_counts.values().map(|&c| c as f64 / nf).collect();
    one_supports.sort_by(|a, b| a.partial_cmp(b).unwrap());
    two_supports.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut raw = Vec::with_capacity(18);
    for supports in [&one_supports, &two_supports] {
        for k in 0..=8 {
            raw.push(quantile_sorted(supports, k as f64 / 8.0));
        }
    }
    Ok(MetaFeatureVector::sentinelized(
        FamilyId::new(5).unwrap(),
        raw,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::Attribute;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quantile_blocks_are_nondecreasing() {
        let d = crate::synth::generate_problem(5, 1);
        let v = extract_structural(&d).unwrap();
        for block in [&v.values[0..9], &v.values[9..18]] {
            for w in block.windows(2) {
                assert!(w[0] <= w[1], "quantiles must be sorted: {block:?}");
            }
        }
    }

    #[test]
    fn single_valued_attribute_has_unit_support() {
        let attributes = vec![Attribute::nominal("only", vec!["v".into()])];
        let target = Attribute::nominal("c", vec!["a".into(), "b".into()]);
        let rows: Vec<_> = (0..8).map(|_| vec![Value::Cat(0)]).collect();
        let labels: Vec<u32> = (0..8).map(|i| (i % 2) as u32).collect();
        let d = TabularDataset::new("unit", attributes, target, rows, labels).unwrap();
        let v = extract_structural(&d).unwrap();
        // all 9 one-item quantiles are 1.0; the two-item block is imputed
        for k in 0..9 {
            assert_abs_diff_eq!(v.values[k], 1.0, epsilon = 1e-12);
        }
        for k in 9..18 {
            assert!(v.imputed[k]);
        }
    }

    #[test]
    fn independent_binary_attributes_pair_near_quarter() {
        // two binary attributes, all four combinations equally frequent
        let attributes = vec![
            Attribute::nominal("a", vec!["0".into(), "1".into()]),
            Attribute::nominal("b", vec!["0".into(), "1".into()]),
        ];
        let target = Attribute::nominal("c", vec!["x".into(), "y".into()]);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..40 {
            rows.push(vec![Value::Cat((i % 2) as u32), Value::Cat(((i / 2) % 2) as u32)]);
            labels.push(((i / 4) % 2) as u32);
        }
        let d = TabularDataset::new("uniform", attributes, target, rows, labels).unwrap();
        let v = extract_structural(&d).unwrap();
        for k in 9..18 {
            assert_abs_diff_eq!(v.values[k], 0.25, epsilon = 1e-9);
        }
    }

    #[test]
    fn numeric_binning_is_equal_frequency() {
        let attributes = vec![Attribute::numeric("x")];
        let target = Attribute::nominal("c", vec!["a".into(), "b".into()]);
        let rows: Vec<_> = (0..100).map(|i| vec![Value::Num(i as f64)]).collect();
        let labels: Vec<u32> = (0..100).map(|i| (i % 2) as u32).collect();
        let d = TabularDataset::new("uniform_num", attributes, target, rows, labels).unwrap();
        let v = extract_structural(&d).unwrap();
        // ten bins of ten values each: every one-item support is 0.1
        for k in 0..9 {
            assert_abs_diff_eq!(v.values[k], 0.1, epsilon = 0.02);
        }
    }
}
