//! CSV (RFC-4180, header row, "?" missing) and minimal ARFF readers plus a
//! CSV writer for round-tripping.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{Attribute, AttributeKind, TabularDataset, Value};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Arff,
}

impl DataFormat {
    /// Picks a format from the file extension; defaults to CSV.
    pub fn from_path(path: &Path) -> DataFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("arff") => DataFormat::Arff,
            _ => DataFormat::Csv,
        }
    }
}

const MISSING: &str = "?";

/// Loads a dataset with the last column as target.
pub fn load_dataset(path: &Path, format: DataFormat) -> Result<TabularDataset> {
    load_dataset_with_target(path, format, None)
}

/// Loads a dataset, optionally overriding which column is the target.
pub fn load_dataset_with_target(
    path: &Path,
    format: DataFormat,
    target: Option<&str>,
) -> Result<TabularDataset> {
    let (name, header, records) = match format {
        DataFormat::Csv => read_csv(path)?,
        DataFormat::Arff => return load_arff(path, target),
    };
    build_from_inferred(name, header, records, target)
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string()
}

fn read_csv(path: &Path) -> Result<(String, Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
            _ => Error::MalformedInput(e.to_string()),
        })?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedInput(e.to_string()))?;
        rows.push(record.iter().map(|s| s.to_string()).collect());
    }
    if rows.is_empty() {
        return Err(Error::MalformedInput(format!(
            "{}: no header row",
            path.display()
        )));
    }
    let header = rows.remove(0);
    Ok((dataset_name(path), header, rows))
}

/// Column typing for CSV: numeric iff every non-missing value parses as a
/// number; all-missing columns default to nominal. Nominal categories keep
/// first-appearance order.
fn build_from_inferred(
    name: String,
    header: Vec<String>,
    records: Vec<Vec<String>>,
    target: Option<&str>,
) -> Result<TabularDataset> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n_cols = header.len();
    for (r, row) in records.iter().enumerate() {
        if row.len() != n_cols {
            return Err(Error::MalformedInput(format!(
                "row {} has {} fields, expected {}",
                r + 1,
                row.len(),
                n_cols
            )));
        }
    }
    let target_col = match target {
        Some(t) => header
            .iter()
            .position(|h| h == t)
            .ok_or_else(|| Error::Config(format!("no column named {t}")))?,
        None => n_cols - 1,
    };

    let mut columns = Vec::with_capacity(n_cols);
    for c in 0..n_cols {
        let numeric = records
            .iter()
            .map(|row| row[c].as_str())
            .filter(|v| *v != MISSING)
            .all(|v| v.trim().parse::<f64>().is_ok());
        let any_present = records.iter().any(|row| row[c] != MISSING);
        if numeric && any_present {
            columns.push(Attribute::numeric(header[c].clone()));
        } else {
            let mut categories: Vec<String> = Vec::new();
            for row in &records {
                let v = &row[c];
                if v != MISSING && !categories.contains(v) {
                    categories.push(v.clone());
                }
            }
            columns.push(Attribute::nominal(header[c].clone(), categories));
        }
    }
    if columns[target_col].is_numeric() {
        return Err(Error::NonNominalTarget(header[target_col].clone()));
    }

    let mut attributes = columns.clone();
    let target_attr = attributes.remove(target_col);
    let mut rows = Vec::with_capacity(records.len());
    let mut labels = Vec::with_capacity(records.len());
    for (r, record) in records.iter().enumerate() {
        let mut row = Vec::with_capacity(n_cols - 1);
        for (c, raw) in record.iter().enumerate() {
            let value = parse_value(raw, &columns[c]);
            if c == target_col {
                match value {
                    Value::Cat(idx) => labels.push(idx),
                    _ => {
                        return Err(Error::MalformedInput(format!(
                            "row {}: missing target value",
                            r + 1
                        )))
                    }
                }
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }

    let d = TabularDataset::new(name, attributes, target_attr, rows, labels)?;
    if d.observed_class_count() < 2 {
        return Err(Error::DegenerateTarget(format!(
            "target {} observed in fewer than 2 classes",
            d.target().name
        )));
    }
    Ok(d)
}

fn parse_value(raw: &str, attr: &Attribute) -> Value {
    if raw == MISSING {
        return Value::Missing;
    }
    match attr.kind {
        AttributeKind::Numeric => Value::Num(raw.trim().parse::<f64>().expect("typed numeric")),
        AttributeKind::Nominal => {
            let idx = attr
                .categories
                .iter()
                .position(|c| c == raw)
                .expect("category collected during inference");
            Value::Cat(idx as u32)
        }
    }
}

fn load_arff(path: &Path, target: Option<&str>) -> Result<TabularDataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut name = dataset_name(path);
    let mut declared: Vec<Attribute> = Vec::new();
    let mut in_data = false;
    let mut data_rows: Vec<Vec<String>> = Vec::new();

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = line.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                name = unquote(line[9..].trim()).to_string();
            } else if lower.starts_with("@attribute") {
                declared.push(parse_arff_attribute(line[10..].trim(), lineno + 1)?);
            } else if lower == "@data" {
                if declared.is_empty() {
                    return Err(Error::MalformedInput("@data before any @attribute".into()));
                }
                in_data = true;
            } else {
                return Err(Error::MalformedInput(format!(
                    "line {}: unsupported directive {line}",
                    lineno + 1
                )));
            }
        } else {
            if line.starts_with('{') {
                return Err(Error::MalformedInput(format!(
                    "line {}: sparse ARFF rows are unsupported",
                    lineno + 1
                )));
            }
            let fields: Vec<String> = line
                .split(',')
                .map(|f| unquote(f.trim()).to_string())
                .collect();
            if fields.len() != declared.len() {
                return Err(Error::MalformedInput(format!(
                    "line {}: {} fields, expected {}",
                    lineno + 1,
                    fields.len(),
                    declared.len()
                )));
            }
            data_rows.push(fields);
        }
    }
    if !in_data {
        return Err(Error::MalformedInput("no @data section".into()));
    }
    if data_rows.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let target_col = match target {
        Some(t) => declared
            .iter()
            .position(|a| a.name == t)
            .ok_or_else(|| Error::Config(format!("no attribute named {t}")))?,
        None => declared.len() - 1,
    };
    if declared[target_col].is_numeric() {
        return Err(Error::NonNominalTarget(declared[target_col].name.clone()));
    }

    let mut attributes = declared.clone();
    let target_attr = attributes.remove(target_col);
    let mut rows = Vec::with_capacity(data_rows.len());
    let mut labels = Vec::with_capacity(data_rows.len());
    for (r, record) in data_rows.iter().enumerate() {
        let mut row = Vec::with_capacity(declared.len() - 1);
        for (c, raw) in record.iter().enumerate() {
            let value = parse_arff_value(raw, &declared[c], r + 1)?;
            if c == target_col {
                match value {
                    Value::Cat(idx) => labels.push(idx),
                    _ => {
                        return Err(Error::MalformedInput(format!(
                            "data row {}: missing target value",
                            r + 1
                        )))
                    }
                }
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }

    let d = TabularDataset::new(name, attributes, target_attr, rows, labels)?;
    if d.observed_class_count() < 2 {
        return Err(Error::DegenerateTarget(format!(
            "target {} observed in fewer than 2 classes",
            d.target().name
        )));
    }
    Ok(d)
}

fn parse_arff_attribute(rest: &str, lineno: usize) -> Result<Attribute> {
    let rest = rest.trim();
    let (name, type_part) = if let Some(stripped) = rest.strip_prefix('\'') {
        let end = stripped
            .find('\'')
            .ok_or_else(|| Error::MalformedInput(format!("line {lineno}: unterminated quote")))?;
        (&stripped[..end], stripped[end + 1..].trim())
    } else {
        let split = rest.find(char::is_whitespace).ok_or_else(|| {
            Error::MalformedInput(format!("line {lineno}: @attribute needs a type"))
        })?;
        (&rest[..split], rest[split..].trim())
    };
    if type_part.starts_with('{') {
        let inner = type_part
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| {
                Error::MalformedInput(format!("line {lineno}: malformed nominal spec"))
            })?;
        let categories: Vec<String> = inner
            .split(',')
            .map(|c| unquote(c.trim()).to_string())
            .collect();
        if categories.is_empty() || categories.iter().any(|c| c.is_empty()) {
            return Err(Error::MalformedInput(format!(
                "line {lineno}: nominal attribute needs at least one category"
            )));
        }
        Ok(Attribute::nominal(name, categories))
    } else {
        match type_part.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => Ok(Attribute::numeric(name)),
            other => Err(Error::MalformedInput(format!(
                "line {lineno}: unsupported attribute type {other}"
            ))),
        }
    }
}

fn parse_arff_value(raw: &str, attr: &Attribute, row: usize) -> Result<Value> {
    if raw == MISSING {
        return Ok(Value::Missing);
    }
    match attr.kind {
        AttributeKind::Numeric => raw
            .parse::<f64>()
            .map(Value::Num)
            .map_err(|_| Error::MalformedInput(format!("data row {row}: bad number {raw}"))),
        AttributeKind::Nominal => attr
            .categories
            .iter()
            .position(|c| c == raw)
            .map(|i| Value::Cat(i as u32))
            .ok_or_else(|| {
                Error::MalformedInput(format!(
                    "data row {row}: {raw} is not a declared category of {}",
                    attr.name
                ))
            }),
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    if s.len() >= 2 {
        let bytes = s.as_bytes();
        if (bytes[0] == b'\'' && bytes[s.len() - 1] == b'\'')
            || (bytes[0] == b'"' && bytes[s.len() - 1] == b'"')
        {
            return &s[1..s.len() - 1];
        }
    }
    s
}

/// Writes the dataset as CSV with the target as last column; missing cells
/// become "?". Numeric values use the shortest round-trip representation.
pub fn save_csv(d: &TabularDataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    let mut header: Vec<&str> = d.attributes().iter().map(|a| a.name.as_str()).collect();
    header.push(&d.target().name);
    push_csv_row(&mut out, &header);
    for (row, &label) in d.rows().iter().zip(d.labels()) {
        let mut fields: Vec<String> = Vec::with_capacity(row.len() + 1);
        for (value, attr) in row.iter().zip(d.attributes()) {
            fields.push(match value {
                Value::Num(v) => format!("{v}"),
                Value::Cat(c) => attr.categories[*c as usize].clone(),
                Value::Missing => MISSING.to_string(),
            });
        }
        fields.push(d.target().categories[label as usize].clone());
        let refs: Vec<&str> = fields.iter().map(|s| s.as_str()).collect();
        push_csv_row(&mut out, &refs);
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

fn push_csv_row(out: &mut String, fields: &[&str]) {
    for (i, field) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        if field.contains([',', '"', '\n', '\r']) {
            out.push('"');
            out.push_str(&field.replace('"', "\"\""));
            out.push('"');
        } else {
            out.push_str(field);
        }
    }
    out.push('\n');
}
