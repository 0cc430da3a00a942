//! Family 4: geometric problem-complexity measures under the mixed distance
//! of the learners module — class-boundary MST fraction, retained adherence
//! balls, intra/inter nearest-neighbor ratio, nonlinearity of a 1-NN and of
//! a least-squares linear discriminant on interpolated points, the maximum
//! Fisher discriminant ratio, and the instances-per-attribute ratio.

use nalgebra::DMatrix;
use rand::Rng;

use super::{FamilyId, MetaFeatureVector};
use crate::error::{Error, Result};
use crate::learners::{mixed_distance, DistanceContext, NearestNeighborModel};
use crate::rng::rng_for;
use crate::tabular::{AttributeKind, TabularDataset, Value};

pub fn extract_complexity(d: &TabularDataset, seed: u64) -> Result<MetaFeatureVector> {
    if d.observed_class_count() < 2 {
        return Err(Error::TooFewInstances(
            "complexity measures need >= 2 observed classes".into(),
        ));
    }
    let n = d.n_instances();
    if n < 2 {
        return Err(Error::TooFewInstances(format!(
            "complexity measures need >= 2 instances, got {n}"
        )));
    }
    let ctx = DistanceContext::fit(d);

    let boundary_fraction = boundary_fraction(d, &ctx);
    let adherence = adherence_retained(d, &ctx);
    let intra_inter = intra_inter_ratio(d, &ctx);
    let (nn_nonlin, linear_nonlin) = nonlinearity(d, &ctx, seed);
    let fisher = fisher_ratio(d);
    let inst_per_attr = if d.n_attributes() > 0 {
        n as f64 / d.n_attributes() as f64
    } else {
        f64::NAN
    };

    Ok(MetaFeatureVector::sentinelized(
        FamilyId::new(4).unwrap(),
        vec![
            boundary_fraction,
            adherence,
            intra_inter,
            nn_nonlin,
            linear_nonlin,
            fisher,
            inst_per_attr,
        ],
    ))
}

/// Fraction of minimum-spanning-tree edges joining opposite-class points
/// (Prim over the complete mixed-distance graph).
fn boundary_fraction(d: &TabularDataset, ctx: &DistanceContext) -> f64 {
    let n = d.n_instances();
    let mut in_tree = vec![false; n];
    let mut best_dist = vec![f64::INFINITY; n];
    let mut best_from = vec![0usize; n];
    in_tree[0] = true;
    for i in 1..n {
        best_dist[i] = mixed_distance(ctx, d.row(0), d.row(i), None);
    }
    let mut boundary_edges = 0usize;
    for _ in 1..n {
        let mut next = usize::MAX;
        for i in 0..n {
            if !in_tree[i] && (next == usize::MAX || best_dist[i] < best_dist[next]) {
                next = i;
            }
        }
        in_tree[next] = true;
        if d.label_of(next) != d.label_of(best_from[next]) {
            boundary_edges += 1;
        }
        for i in 0..n {
            if !in_tree[i] {
                let dist = mixed_distance(ctx, d.row(next), d.row(i), None);
                if dist < best_dist[i] {
                    best_dist[i] = dist;
                    best_from[i] = next;
                }
            }
        }
    }
    boundary_edges as f64 / (n - 1) as f64
}

/// Each instance grows a ball reaching to its nearest enemy; balls fully
/// contained in another ball are discarded and the retained fraction is
/// reported.
fn adherence_retained(d: &TabularDataset, ctx: &DistanceContext) -> f64 {
    let n = d.n_instances();
    let radii: Vec<f64> = (0..n)
        .map(|i| {
            let mut r = f64::INFINITY;
            for j in 0..n {
                if d.label_of(j) != d.label_of(i) {
                    r = r.min(mixed_distance(ctx, d.row(i), d.row(j), None));
                }
            }
            r
        })
        .collect();
    let mut retained = 0usize;
    'outer: for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dist = mixed_distance(ctx, d.row(i), d.row(j), None);
            let contained = dist + radii[i] < radii[j]
                || (dist + radii[i] == radii[j] && radii[i] < radii[j])
                || (dist == 0.0 && radii[i] == radii[j] && j < i);
            if contained {
                continue 'outer;
            }
        }
        retained += 1;
    }
    retained as f64 / n as f64
}

/// Mean same-class nearest-neighbor distance over mean other-class
/// nearest-neighbor distance.
fn intra_inter_ratio(d: &TabularDataset, ctx: &DistanceContext) -> f64 {
    let n = d.n_instances();
    let mut intra = Vec::new();
    let mut inter = Vec::new();
    for i in 0..n {
        let mut same = f64::INFINITY;
        let mut other = f64::INFINITY;
        for j in 0..n {
            if i == j {
                continue;
            }
            let dist = mixed_distance(ctx, d.row(i), d.row(j), None);
            if d.label_of(i) == d.label_of(j) {
                same = same.min(dist);
            } else {
                other = other.min(dist);
            }
        }
        if same.is_finite() {
            intra.push(same);
        }
        if other.is_finite() {
            inter.push(other);
        }
    }
    if intra.is_empty() || inter.is_empty() {
        return f64::NAN;
    }
    let intra_mean = intra.iter().sum::<f64>() / intra.len() as f64;
    let inter_mean = inter.iter().sum::<f64>() / inter.len() as f64;
    if inter_mean <= 0.0 {
        return f64::NAN;
    }
    intra_mean / inter_mean
}

/// Error rates of a 1-NN and of a least-squares one-vs-rest linear
/// discriminant on 2N synthetic points interpolated between seeded random
/// same-class pairs.
fn nonlinearity(d: &TabularDataset, ctx: &DistanceContext, seed: u64) -> (f64, f64) {
    let n = d.n_instances();
    let mut rng = rng_for(seed, &[0x6e6c]);
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); d.n_classes()];
    for i in 0..n {
        per_class[d.label_of(i) as usize].push(i);
    }

    let mut synth_rows = Vec::with_capacity(2 * n);
    let mut synth_labels = Vec::with_capacity(2 * n);
    for _ in 0..2 * n {
        let a = rng.gen_range(0..n);
        let class = d.label_of(a);
        let members = &per_class[class as usize];
        let b = members[rng.gen_range(0..members.len())];
        let t: f64 = rng.gen();
        let row: Vec<Value> = (0..d.n_attributes())
            .map(|attr| match d.attributes()[attr].kind {
                AttributeKind::Numeric => match (d.row(a)[attr], d.row(b)[attr]) {
                    (Value::Num(x), Value::Num(y)) => Value::Num((1.0 - t) * x + t * y),
                    (Value::Num(x), Value::Missing) => Value::Num(x),
                    (Value::Missing, Value::Num(y)) => Value::Num(y),
                    _ => Value::Missing,
                },
                AttributeKind::Nominal => {
                    let pick_a = rng.gen::<f64>() < 0.5;
                    match (d.row(a)[attr], d.row(b)[attr]) {
                        (Value::Cat(x), Value::Cat(y)) => Value::Cat(if pick_a { x } else { y }),
                        (Value::Cat(x), Value::Missing) => Value::Cat(x),
                        (Value::Missing, Value::Cat(y)) => Value::Cat(y),
                        _ => Value::Missing,
                    }
                }
            })
            .collect();
        synth_rows.push(row);
        synth_labels.push(class);
    }

    let nn = NearestNeighborModel::train(d, None);
    let nn_errors = synth_rows
        .iter()
        .zip(&synth_labels)
        .filter(|(row, &label)| nn.predict(row).map(|p| p != label).unwrap_or(true))
        .count();
    let nn_nonlin = nn_errors as f64 / synth_rows.len() as f64;

    let linear_nonlin = match LinearDiscriminant::fit(d, ctx) {
        Some(model) => {
            let errors = synth_rows
                .iter()
                .zip(&synth_labels)
                .filter(|(row, &label)| model.predict(d, ctx, row) != label)
                .count();
            errors as f64 / synth_rows.len() as f64
        }
        None => f64::NAN,
    };
    (nn_nonlin, linear_nonlin)
}

/// One-vs-rest least squares on range-normalized numeric values and one-hot
/// nominal values; missing numeric cells sit at the 0.5 midpoint and missing
/// nominal cells contribute an all-zero block.
struct LinearDiscriminant {
    weights: DMatrix<f64>,
}

impl LinearDiscriminant {
    fn fit(d: &TabularDataset, ctx: &DistanceContext) -> Option<LinearDiscriminant> {
        let n = d.n_instances();
        let k = d.n_classes();
        let dim = encoded_dim(d);
        let mut x = DMatrix::<f64>::zeros(n, dim);
        let mut buffer = vec![0.0; dim];
        for i in 0..n {
            encode_row(d, ctx, d.row(i), &mut buffer);
            for (j, &v) in buffer.iter().enumerate() {
                x[(i, j)] = v;
            }
        }
        let mut y = DMatrix::<f64>::zeros(n, k);
        for i in 0..n {
            y[(i, d.label_of(i) as usize)] = 1.0;
        }
        let xtx = x.transpose() * &x + DMatrix::identity(dim, dim) * 1e-6;
        let xty = x.transpose() * y;
        let weights = xtx.lu().solve(&xty)?;
        Some(LinearDiscriminant { weights })
    }

    fn predict(&self, d: &TabularDataset, ctx: &DistanceContext, row: &[Value]) -> u32 {
        let mut encoded = vec![0.0; self.weights.nrows()];
        encode_row(d, ctx, row, &mut encoded);
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for class in 0..self.weights.ncols() {
            let score: f64 = (0..self.weights.nrows())
                .map(|j| encoded[j] * self.weights[(j, class)])
                .sum();
            if score > best_score {
                best_score = score;
                best = class;
            }
        }
        best as u32
    }
}

fn encoded_dim(d: &TabularDataset) -> usize {
    1 + d
        .attributes()
        .iter()
        .map(|a| match a.kind {
            AttributeKind::Numeric => 1,
            AttributeKind::Nominal => a.categories.len(),
        })
        .sum::<usize>()
}

fn encode_row(d: &TabularDataset, ctx: &DistanceContext, row: &[Value], out: &mut [f64]) {
    let mut pos = 0;
    out[pos] = 1.0; // bias
    pos += 1;
    for (a, attr) in d.attributes().iter().enumerate() {
        match attr.kind {
            AttributeKind::Numeric => {
                out[pos] = match row[a] {
                    Value::Num(v) => ctx.normalize(a, v),
                    _ => 0.5,
                };
                pos += 1;
            }
            AttributeKind::Nominal => {
                for slot in 0..attr.categories.len() {
                    out[pos + slot] = 0.0;
                }
                if let Value::Cat(c) = row[a] {
                    out[pos + c as usize] = 1.0;
                }
                pos += attr.categories.len();
            }
        }
    }
}

/// Maximum over numeric attributes and observed class pairs of
/// (mu_a - mu_b)^2 / (var_a + var_b); pairs with zero variance sum are
/// skipped.
fn fisher_ratio(d: &TabularDataset) -> f64 {
    let k = d.n_classes();
    let mut best = f64::NAN;
    for a in 0..d.n_attributes() {
        if !d.attributes()[a].is_numeric() {
            continue;
        }
        let mut per_class: Vec<Vec<f64>> = vec![Vec::new(); k];
        for (row, &label) in d.rows().iter().zip(d.labels()) {
            if let Value::Num(v) = row[a] {
                per_class[label as usize].push(v);
            }
        }
        let stats: Vec<Option<(f64, f64)>> = per_class
            .iter()
            .map(|vals| {
                if vals.is_empty() {
                    None
                } else {
                    let m = vals.iter().sum::<f64>() / vals.len() as f64;
                    let var =
                        vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / vals.len() as f64;
                    Some((m, var))
                }
            })
            .collect();
        for c1 in 0..k {
            for c2 in c1 + 1..k {
                if let (Some((m1, v1)), Some((m2, v2))) = (stats[c1], stats[c2]) {
                    let denom = v1 + v2;
                    if denom > 0.0 {
                        let ratio = (m1 - m2).powi(2) / denom;
                        if best.is_nan() || ratio > best {
                            best = ratio;
                        }
                    } else if m1 == m2 && (best.is_nan() || best < 0.0) {
                        best = 0.0;
                    }
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::Attribute;
    use approx::assert_abs_diff_eq;

    fn measure(v: &MetaFeatureVector, name: &str) -> f64 {
        let idx = v.names().iter().position(|n| *n == name).unwrap();
        v.values[idx]
    }

    fn far_blobs(n: usize) -> TabularDataset {
        let attributes = vec![Attribute::numeric("x"), Attribute::numeric("y")];
        let target = Attribute::nominal("c", vec!["a".into(), "b".into()]);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let c = (i % 2) as u32;
            let base = if c == 0 { 0.0 } else { 100.0 };
            rows.push(vec![
                Value::Num(base + (i % 5) as f64 * 0.1),
                Value::Num(base + (i % 3) as f64 * 0.1),
            ]);
            labels.push(c);
        }
        TabularDataset::new("far", attributes, target, rows, labels).unwrap()
    }

    #[test]
    fn instance_attribute_ratio() {
        let v = extract_complexity(&far_blobs(100), 0).unwrap();
        assert_abs_diff_eq!(measure(&v, "inst_per_attr"), 50.0, epsilon = 1e-12);
    }

    #[test]
    fn separated_blobs_have_short_boundary() {
        // brute-force check of the same MST confirms the fraction is tiny
        let v = extract_complexity(&far_blobs(40), 0).unwrap();
        assert!(measure(&v, "boundary_fraction") <= 0.1);
        assert!(measure(&v, "nn_nonlinearity") <= 0.1);
        assert!(measure(&v, "linear_nonlinearity") <= 0.1);
    }

    #[test]
    fn identical_class_distributions_have_no_fisher_gap() {
        let attributes = vec![Attribute::numeric("x")];
        let target = Attribute::nominal("c", vec!["a".into(), "b".into()]);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        // both classes see exactly the values 0..5
        for i in 0..12 {
            rows.push(vec![Value::Num((i % 6) as f64)]);
            labels.push((i / 6) as u32);
        }
        let d = TabularDataset::new("same", attributes, target, rows, labels).unwrap();
        let v = extract_complexity(&d, 0).unwrap();
        assert_abs_diff_eq!(measure(&v, "fisher_ratio"), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn single_class_rejected() {
        let attributes = vec![Attribute::numeric("x")];
        let target = Attribute::nominal("c", vec!["a".into(), "b".into()]);
        let rows: Vec<_> = (0..5).map(|i| vec![Value::Num(i as f64)]).collect();
        let d = TabularDataset::new("one", attributes, target, rows, vec![0; 5]).unwrap();
        assert!(matches!(
            extract_complexity(&d, 0),
            Err(Error::TooFewInstances(_))
        ));
    }
}
