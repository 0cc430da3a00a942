//! Base-level tabular classification datasets: loading, validation,
//! datasetoid generation, and stratified folding.

mod io;

pub use io::{load_dataset, load_dataset_with_target, save_csv, DataFormat};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeKind {
    Numeric,
    Nominal,
}

/// Schema of one column: numeric, or nominal with an ordered category list.
#[derive(Debug, Clone)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
    pub categories: Vec<String>,
}

impl Attribute {
    pub fn numeric(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Numeric,
            categories: Vec::new(),
        }
    }

    pub fn nominal(name: impl Into<String>, categories: Vec<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Nominal,
            categories,
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.kind == AttributeKind::Numeric
    }

    pub fn is_nominal(&self) -> bool {
        self.kind == AttributeKind::Nominal
    }
}

/// One cell of a dataset row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(u32),
    Missing,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_cat(&self) -> Option<u32> {
        match self {
            Value::Cat(c) => Some(*c),
            _ => None,
        }
    }
}

/// An immutable classification problem: attribute columns plus a nominal
/// target. Rows hold attribute values only; class labels live in a parallel
/// vector of category indices into the target attribute.
#[derive(Debug, Clone)]
pub struct TabularDataset {
    name: String,
    attributes: Vec<Attribute>,
    target: Attribute,
    rows: Vec<Vec<Value>>,
    labels: Vec<u32>,
}

impl TabularDataset {
    /// Validates structure: unique names, nominal target, consistent row
    /// widths, and in-range category indices. A target observed in a single
    /// class is allowed here (datasetoid generation can produce one); loaders
    /// and operations that need ≥2 classes enforce that themselves.
    pub fn new(
        name: impl Into<String>,
        attributes: Vec<Attribute>,
        target: Attribute,
        rows: Vec<Vec<Value>>,
        labels: Vec<u32>,
    ) -> Result<Self> {
        if !target.is_nominal() {
            return Err(Error::NonNominalTarget(target.name.clone()));
        }
        let mut names: Vec<&str> = attributes.iter().map(|a| a.name.as_str()).collect();
        names.push(&target.name);
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedInput("duplicate attribute name".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch(format!(
                "{} rows vs {} labels",
                rows.len(),
                labels.len()
            )));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != attributes.len() {
                return Err(Error::MalformedInput(format!(
                    "row {} has {} values, expected {}",
                    r,
                    row.len(),
                    attributes.len()
                )));
            }
            for (a, value) in row.iter().enumerate() {
                match (value, attributes[a].kind) {
                    (Value::Cat(c), AttributeKind::Nominal) => {
                        if *c as usize >= attributes[a].categories.len() {
                            return Err(Error::MalformedInput(format!(
                                "row {r}: category index {c} out of range for {}",
                                attributes[a].name
                            )));
                        }
                    }
                    (Value::Cat(_), AttributeKind::Numeric)
                    | (Value::Num(_), AttributeKind::Nominal) => {
                        return Err(Error::MalformedInput(format!(
                            "row {r}: value kind mismatch for {}",
                            attributes[a].name
                        )));
                    }
                    _ => {}
                }
            }
        }
        if let Some(&bad) = labels
            .iter()
            .find(|&&c| c as usize >= target.categories.len())
        {
            return Err(Error::MalformedInput(format!(
                "label index {bad} out of range for target {}",
                target.name
            )));
        }
        Ok(TabularDataset {
            name: name.into(),
            attributes,
            target,
            rows,
            labels,
        })
    }

    /// Builds an all-numeric dataset from plain feature vectors, with target
    /// categories named "0".."K-1". Non-finite feature values become missing.
    pub fn from_numeric(
        name: impl Into<String>,
        feature_names: &[String],
        features: &[Vec<f64>],
        labels: Vec<u32>,
        n_classes: usize,
    ) -> Result<Self> {
        let attributes = feature_names
            .iter()
            .map(|n| Attribute::numeric(n.clone()))
            .collect();
        let target = Attribute::nominal("class", (0..n_classes).map(|c| c.to_string()).collect());
        let rows = features
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| {
                        if v.is_finite() {
                            Value::Num(v)
                        } else {
                            Value::Missing
                        }
                    })
                    .collect()
            })
            .collect();
        TabularDataset::new(name, attributes, target, rows, labels)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn target(&self) -> &Attribute {
        &self.target
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn n_instances(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Value] {
        &self.rows[i]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label_of(&self, i: usize) -> u32 {
        self.labels[i]
    }

    /// Number of declared target categories.
    pub fn n_classes(&self) -> usize {
        self.target.categories.len()
    }

    /// Instance count per declared class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes()];
        for &c in &self.labels {
            counts[c as usize] += 1;
        }
        counts
    }

    pub fn observed_class_count(&self) -> usize {
        self.class_counts().iter().filter(|&&c| c > 0).count()
    }

    /// New dataset restricted to the given instance indices (in order).
    pub fn subset(&self, indices: &[usize]) -> TabularDataset {
        TabularDataset {
            name: self.name.clone(),
            attributes: self.attributes.clone(),
            target: self.target.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Assignment of every instance to one of `k` folds, stratified by class.
#[derive(Debug, Clone)]
pub struct FoldPlan {
    fold_of: Vec<u32>,
    k: usize,
    seed: u64,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fold_of(&self, instance: usize) -> u32 {
        self.fold_of[instance]
    }

    pub fn assignments(&self) -> &[u32] {
        &self.fold_of
    }

    pub fn test_indices(&self, fold: u32) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: u32) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }
}

/// Stratified k-fold assignment: per class, instances are shuffled with a
/// class-derived seed and dealt round-robin, continuing the fold counter
/// across classes so total fold sizes stay balanced too. Per-class fold
/// counts differ by at most one.
pub fn stratified_folds(d: &TabularDataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::DomainError(format!("fold count {k} < 2")));
    }
    let n = d.n_instances();
    if n < k {
        return Err(Error::TooFewInstances(format!(
            "{n} instances cannot fill {k} folds"
        )));
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); d.n_classes()];
    for i in 0..n {
        groups[d.label_of(i) as usize].push(i);
    }
    let mut fold_of = vec![0u32; n];
    let mut next = 0usize;
    for (class, group) in groups.iter_mut().enumerate() {
        group.shuffle(&mut rng_for(seed, &[0x666f_6c64, class as u64]));
        for &i in group.iter() {
            fold_of[i] = (next % k) as u32;
            next += 1;
        }
    }
    Ok(FoldPlan { fold_of, k, seed })
}

/// One datasetoid per nominal non-target attribute: that attribute becomes
/// the target and the former target takes its column slot as an ordinary
/// nominal attribute. Rows whose new target value is missing are dropped.
pub fn generate_datasetoids(d: &TabularDataset) -> Vec<TabularDataset> {
    let mut out = Vec::new();
    for (a_idx, attr) in d.attributes.iter().enumerate() {
        if !attr.is_nominal() {
            continue;
        }
        let mut attributes = d.attributes.clone();
        attributes[a_idx] = d.target.clone();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (row, &label) in d.rows.iter().zip(&d.labels) {
            let new_label = match row[a_idx] {
                Value::Cat(c) => c,
                _ => continue,
            };
            let mut new_row = row.clone();
            new_row[a_idx] = Value::Cat(label);
            rows.push(new_row);
            labels.push(new_label);
        }
        let oid = TabularDataset::new(
            format!("{}.oid.{}", d.name, attr.name),
            attributes,
            attr.clone(),
            rows,
            labels,
        )
        .expect("role exchange preserves dataset structure");
        out.push(oid);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> TabularDataset {
        // color/shape nominal, size numeric, class {p,n}
        let attributes = vec![
            Attribute::nominal("color", vec!["r".into(), "g".into()]),
            Attribute::numeric("size"),
            Attribute::nominal("shape", vec!["o".into(), "x".into()]),
        ];
        let target = Attribute::nominal("cls", vec!["p".into(), "n".into()]);
        let rows = vec![
            vec![Value::Cat(0), Value::Num(1.0), Value::Cat(0)],
            vec![Value::Cat(1), Value::Num(2.0), Value::Cat(1)],
            vec![Value::Missing, Value::Num(3.0), Value::Cat(0)],
            vec![Value::Cat(0), Value::Missing, Value::Cat(1)],
        ];
        TabularDataset::new("toy", attributes, target, rows, vec![0, 1, 0, 1]).unwrap()
    }

    #[test]
    fn datasetoid_per_nominal_attribute() {
        let d = toy();
        let oids = generate_datasetoids(&d);
        assert_eq!(oids.len(), 2);
        // the color datasetoid drops the row with missing color
        let color = &oids[0];
        assert_eq!(color.target().name, "color");
        assert_eq!(color.n_instances(), 3);
        // the former target appears as an ordinary nominal attribute
        assert!(color.attributes().iter().any(|a| a.name == "cls"));
        assert_eq!(color.labels(), &[0, 1, 0]);
        // role exchange: first row's cls column holds the old label p
        let cls_idx = color
            .attributes()
            .iter()
            .position(|a| a.name == "cls")
            .unwrap();
        assert_eq!(color.row(0)[cls_idx], Value::Cat(0));
    }

    #[test]
    fn datasetoids_empty_without_nominals() {
        let attributes = vec![Attribute::numeric("x"), Attribute::numeric("y")];
        let target = Attribute::nominal("cls", vec!["a".into(), "b".into()]);
        let rows = vec![
            vec![Value::Num(0.0), Value::Num(1.0)],
            vec![Value::Num(1.0), Value::Num(0.0)],
        ];
        let d = TabularDataset::new("num", attributes, target, rows, vec![0, 1]).unwrap();
        assert!(generate_datasetoids(&d).is_empty());
    }

    #[test]
    fn fold_plan_is_stratified_and_deterministic() {
        let attributes = vec![Attribute::numeric("x")];
        let target = Attribute::nominal("cls", vec!["a".into(), "b".into()]);
        let rows: Vec<_> = (0..100).map(|i| vec![Value::Num(i as f64)]).collect();
        let labels: Vec<u32> = (0..100).map(|i| (i % 2) as u32).collect();
        let d = TabularDataset::new("even", attributes, target, rows, labels).unwrap();

        let plan = stratified_folds(&d, 10, 7).unwrap();
        let again = stratified_folds(&d, 10, 7).unwrap();
        assert_eq!(plan.assignments(), again.assignments());

        for fold in 0..10 {
            let test = plan.test_indices(fold);
            assert_eq!(test.len(), 10);
            let a = test.iter().filter(|&&i| d.label_of(i) == 0).count();
            assert_eq!(a, 5, "fold {fold} not stratified");
        }
    }

    #[test]
    fn folds_reject_too_few_instances() {
        let d = toy();
        assert!(matches!(
            stratified_folds(&d, 10, 0),
            Err(Error::TooFewInstances(_))
        ));
    }

    #[test]
    fn per_class_fold_counts_differ_by_at_most_one() {
        let attributes = vec![Attribute::numeric("x")];
        let target = Attribute::nominal("cls", vec!["a".into(), "b".into(), "c".into()]);
        let rows: Vec<_> = (0..47).map(|i| vec![Value::Num(i as f64)]).collect();
        let labels: Vec<u32> = (0..47).map(|i| (i % 3) as u32).collect();
        let d = TabularDataset::new("odd", attributes, target, rows, labels).unwrap();
        let plan = stratified_folds(&d, 5, 3).unwrap();
        for class in 0..3u32 {
            let per_fold: Vec<usize> = (0..5)
                .map(|f| {
                    plan.test_indices(f)
                        .iter()
                        .filter(|&&i| d.label_of(i) == class)
                        .count()
                })
                .collect();
            let lo = per_fold.iter().min().unwrap();
            let hi = per_fold.iter().max().unwrap();
            assert!(hi - lo <= 1, "class {class}: {per_fold:?}");
        }
    }

    #[test]
    fn rejects_numeric_target() {
        let err = TabularDataset::new(
            "bad",
            vec![Attribute::numeric("x")],
            Attribute::numeric("y"),
            vec![vec![Value::Num(0.0)]],
            vec![0],
        );
        assert!(matches!(err, Err(Error::NonNominalTarget(_))));
    }
}
