//! CSV import/export of meta-feature tables: one row per problem, columns
//! named `f<family>.<measure>`, plus an imputation-flag sidecar of the same
//! shape.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{FamilyId, MetaFeatureGroupSet, MetaFeatureVector};
use crate::error::{Error, Result};

fn header_columns() -> Vec<String> {
    let mut cols = vec!["problem".to_string()];
    for family in FamilyId::ALL {
        for name in family.measure_names() {
            cols.push(format!("f{family}.{name}"));
        }
    }
    cols
}

pub fn write_feature_table(sets: &[MetaFeatureGroupSet], path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header_columns().join(","));
    out.push('\n');
    for set in sets {
        out.push_str(&escape(&set.problem));
        for vector in set.vectors() {
            for v in &vector.values {
                out.push(',');
                out.push_str(&format!("{v}"));
            }
        }
        out.push('\n');
    }
    write_atomic(path, &out)
}

/// Sidecar with a 0/1 flag per measure marking sentinel-imputed cells.
pub fn write_imputation_flags(sets: &[MetaFeatureGroupSet], path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header_columns().join(","));
    out.push('\n');
    for set in sets {
        out.push_str(&escape(&set.problem));
        for vector in set.vectors() {
            for &flag in &vector.imputed {
                out.push(',');
                out.push(if flag { '1' } else { '0' });
            }
        }
        out.push('\n');
    }
    write_atomic(path, &out)
}

pub fn read_feature_table(path: &Path) -> Result<Vec<MetaFeatureGroupSet>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))?;
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedInput(e.to_string()))?;
        records.push(record.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    }
    if records.is_empty() {
        return Err(Error::MalformedInput(format!(
            "{}: empty feature table",
            path.display()
        )));
    }
    let expected = header_columns();
    let header = records.remove(0);
    if header != expected {
        return Err(Error::MalformedInput(format!(
            "{}: header does not match the five-family layout",
            path.display()
        )));
    }
    let mut sets = Vec::with_capacity(records.len());
    for (r, record) in records.iter().enumerate() {
        if record.len() != expected.len() {
            return Err(Error::MalformedInput(format!(
                "{}: row {} has {} cells, expected {}",
                path.display(),
                r + 1,
                record.len(),
                expected.len()
            )));
        }
        let problem = record[0].clone();
        let mut cursor = 1usize;
        let mut vectors = Vec::with_capacity(5);
        for family in FamilyId::ALL {
            let arity = family.arity();
            let mut values = Vec::with_capacity(arity);
            for cell in &record[cursor..cursor + arity] {
                let v: f64 = cell.trim().parse().map_err(|_| {
                    Error::MalformedInput(format!("row {}: bad value {cell}", r + 1))
                })?;
                values.push(v);
            }
            cursor += arity;
            vectors.push(MetaFeatureVector {
                family,
                imputed: vec![false; arity],
                values,
            });
        }
        sets.push(MetaFeatureGroupSet::new(problem, vectors)?);
    }
    Ok(sets)
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Write to a sibling temp file, then rename into place.
pub(crate) fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        file.write_all(content.as_bytes())
            .map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metafeatures::extract_all;
    use crate::synth;

    #[test]
    fn table_round_trip() {
        let sets: Vec<MetaFeatureGroupSet> = (0..3)
            .map(|i| extract_all(&synth::generate_problem(i, 7), 1).unwrap())
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        write_feature_table(&sets, &path).unwrap();
        let back = read_feature_table(&path).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in sets.iter().zip(&back) {
            assert_eq!(a.problem, b.problem);
            for (va, vb) in a.vectors().iter().zip(b.vectors()) {
                assert_eq!(va.values, vb.values);
            }
        }
    }

    #[test]
    fn flags_sidecar_has_same_shape() {
        let sets = vec![extract_all(&synth::generate_problem(0, 7), 1).unwrap()];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("flags.csv");
        write_imputation_flags(&sets, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0].split(',').count(),
            1 + 31 + 15 + 6 + 7 + 18
        );
    }
}
