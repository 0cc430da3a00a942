//! Seeded synthetic classification problems and the desk-scale meta-corpus
//! built from them. Three problem flavors keep the candidate learners
//! honestly differentiated: separated Gaussian blobs (easy for distance and
//! density learners), nominal rule data (easy for trees), and noisy
//! mixtures (where the class prior is hard to beat).

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::Result;
use crate::metafeatures::{extract_all, MetaFeatureGroupSet};
use crate::metatarget::{estimate_accuracy_matrix, derive_meta_target, LearnerSpec, MetaTarget};
use crate::rng::{derive_seed, rng_for};
use crate::tabular::{Attribute, TabularDataset, Value};

/// One deterministic synthetic problem per (id, seed) pair.
pub fn generate_problem(id: u64, seed: u64) -> TabularDataset {
    let mut rng = rng_for(seed, &[0x7072_6f62, id]);
    match rng.gen_range(0..3) {
        0 => gaussian_blobs(id, &mut rng),
        1 => nominal_rules(id, &mut rng),
        _ => noisy_mixture(id, &mut rng),
    }
}

pub fn generate_corpus(n_problems: usize, seed: u64) -> Vec<TabularDataset> {
    (0..n_problems as u64)
        .map(|id| generate_problem(id, seed))
        .collect()
}

fn gaussian_blobs(id: u64, rng: &mut impl Rng) -> TabularDataset {
    let n = rng.gen_range(60..=120);
    let n_classes = rng.gen_range(2..=3usize);
    let n_attrs = rng.gen_range(2..=4usize);
    let separation = rng.gen_range(0.8..4.0);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let centers: Vec<Vec<f64>> = (0..n_classes)
        .map(|_| (0..n_attrs).map(|_| rng.gen_range(-1.0..1.0) * separation).collect())
        .collect();
    let missing_rate = if rng.gen_bool(0.3) { 0.03 } else { 0.0 };

    let attributes: Vec<Attribute> = (0..n_attrs)
        .map(|a| Attribute::numeric(format!("x{a}")))
        .collect();
    let target = class_target(n_classes);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % n_classes;
        let row = (0..n_attrs)
            .map(|a| {
                if missing_rate > 0.0 && rng.gen_bool(missing_rate) {
                    Value::Missing
                } else {
                    Value::Num(centers[c][a] + noise.sample(rng))
                }
            })
            .collect();
        rows.push(row);
        labels.push(c as u32);
    }
    TabularDataset::new(format!("blobs_{id}"), attributes, target, rows, labels)
        .expect("generated blobs are structurally valid")
}

fn nominal_rules(id: u64, rng: &mut impl Rng) -> TabularDataset {
    let n = rng.gen_range(60..=120);
    let n_classes = rng.gen_range(2..=3usize);
    let n_attrs = rng.gen_range(2..=4usize);
    let cats_per_attr: Vec<usize> = (0..n_attrs).map(|_| rng.gen_range(2..=3usize)).collect();
    let flip_rate = rng.gen_range(0.05..0.25);

    let attributes: Vec<Attribute> = (0..n_attrs)
        .map(|a| {
            Attribute::nominal(
                format!("g{a}"),
                (0..cats_per_attr[a]).map(|c| format!("c{c}")).collect(),
            )
        })
        .collect();
    let target = class_target(n_classes);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let cats: Vec<u32> = (0..n_attrs)
            .map(|a| rng.gen_range(0..cats_per_attr[a]) as u32)
            .collect();
        // class determined by the first two attributes, with label noise
        let rule = (cats[0] as usize + 2 * cats.get(1).copied().unwrap_or(0) as usize) % n_classes;
        let label = if rng.gen_bool(flip_rate) {
            rng.gen_range(0..n_classes)
        } else {
            rule
        };
        // guarantee both classes appear
        let label = if i < n_classes { i % n_classes } else { label };
        rows.push(cats.into_iter().map(Value::Cat).collect());
        labels.push(label as u32);
    }
    TabularDataset::new(format!("rules_{id}"), attributes, target, rows, labels)
        .expect("generated rules are structurally valid")
}

fn noisy_mixture(id: u64, rng: &mut impl Rng) -> TabularDataset {
    let n = rng.gen_range(60..=120);
    let majority = rng.gen_range(0.55..0.85);
    let signal = rng.gen_range(0.0..1.5);
    let noise = Normal::new(0.0, 1.0).unwrap();

    let attributes = vec![
        Attribute::numeric("u"),
        Attribute::numeric("v"),
        Attribute::nominal("flag", vec!["off".into(), "on".into()]),
    ];
    let target = class_target(2);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = if i < 2 {
            i as u32
        } else {
            u32::from(!rng.gen_bool(majority))
        };
        let shift = if label == 1 { signal } else { 0.0 };
        rows.push(vec![
            Value::Num(noise.sample(rng) + shift),
            Value::Num(noise.sample(rng)),
            Value::Cat(rng.gen_range(0..2)),
        ]);
        labels.push(label);
    }
    TabularDataset::new(format!("noisy_{id}"), attributes, target, rows, labels)
        .expect("generated mixture is structurally valid")
}

fn class_target(n_classes: usize) -> Attribute {
    Attribute::nominal(
        "class",
        (0..n_classes).map(|c| format!("k{c}")).collect(),
    )
}

/// Meta-level training corpus: per problem, the five meta-feature vectors
/// and the appropriateness bits of the candidate learners.
pub struct MetaCorpus {
    pub features: Vec<MetaFeatureGroupSet>,
    pub targets: Vec<MetaTarget>,
    pub algorithm_names: Vec<String>,
}

/// Builds a meta-corpus end to end: generates problems, extracts all five
/// families, estimates candidate accuracy matrices with the 5x10-fold
/// protocol, and derives Friedman/Holm meta-targets. Problems are processed
/// in parallel; output order is by problem id, so the result is
/// deterministic.
pub fn build_meta_corpus(
    n_problems: usize,
    candidates: &[LearnerSpec],
    alpha: f64,
    seed: u64,
) -> Result<MetaCorpus> {
    let per_problem: Vec<(MetaFeatureGroupSet, MetaTarget)> = (0..n_problems as u64)
        .into_par_iter()
        .map(|id| {
            let d = generate_problem(id, seed);
            let features = extract_all(&d, derive_seed(seed, &[0xfeed, id]))?;
            let acc = estimate_accuracy_matrix(&d, candidates, derive_seed(seed, &[0xacc, id]))?;
            let target = derive_meta_target(&acc, alpha)?.target;
            Ok((features, target))
        })
        .collect::<Result<Vec<_>>>()?;
    let (features, targets): (Vec<_>, Vec<_>) = per_problem.into_iter().unzip();
    Ok(MetaCorpus {
        features,
        targets,
        algorithm_names: candidates.iter().map(|c| c.to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problems_are_deterministic_and_valid() {
        for id in 0..10 {
            let a = generate_problem(id, 3);
            let b = generate_problem(id, 3);
            assert_eq!(a.n_instances(), b.n_instances());
            assert_eq!(a.rows(), b.rows());
            assert!(a.observed_class_count() >= 2, "problem {id}");
            assert!(a.n_instances() >= 60);
        }
    }

    #[test]
    fn corpus_has_varied_targets() {
        let corpus = build_meta_corpus(12, &LearnerSpec::demo_set(), 0.05, 9).unwrap();
        assert_eq!(corpus.features.len(), 12);
        assert_eq!(corpus.targets.len(), 12);
        for t in &corpus.targets {
            assert_eq!(t.k(), 5);
            assert!(t.bits.iter().any(|&b| b == 1), "reference is always kept");
        }
        // not every problem should have the identical target pattern
        let first = &corpus.targets[0].bits;
        assert!(
            corpus.targets.iter().any(|t| &t.bits != first),
            "all 12 targets identical: {first:?}"
        );
    }
}
