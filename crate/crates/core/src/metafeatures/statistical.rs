//! Family 1: statistical and information-theoretic measures — simple counts
//! and proportions, per-numeric-attribute statistics averaged over
//! attributes, correlation-structure spectra, and nominal-attribute
//! entropies.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{mean, mean_finite, quantile_sorted, FamilyId, MetaFeatureVector};
use crate::error::{Error, Result};
use crate::tabular::{TabularDataset, Value};

pub fn extract_statistical(d: &TabularDataset) -> Result<MetaFeatureVector> {
    if d.n_instances() == 0 {
        return Err(Error::EmptyDataset);
    }
    let n = d.n_instances();
    let m = d.n_attributes();
    let nf = n as f64;
    let mf = m as f64;

    let mut raw = Vec::with_capacity(31);

    // counts and proportions
    raw.push(nf);
    raw.push(mf);
    raw.push(d.n_classes() as f64);
    let class_counts = d.class_counts();
    let observed: Vec<f64> = class_counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 / nf)
        .collect();
    raw.push(observed.iter().copied().fold(f64::INFINITY, f64::min));
    raw.push(observed.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let n_binary = d
        .attributes()
        .iter()
        .filter(|a| a.is_nominal() && a.categories.len() == 2)
        .count();
    let n_nominal = d.attributes().iter().filter(|a| a.is_nominal()).count();
    let n_numeric = m - n_nominal;
    raw.push(n_binary as f64 / mf);
    raw.push(n_nominal as f64 / mf);
    raw.push(n_numeric as f64 / mf);
    let rows_with_missing = d
        .rows()
        .iter()
        .filter(|row| row.iter().any(Value::is_missing))
        .count();
    raw.push(rows_with_missing as f64 / nf);
    let missing_cells: usize = d
        .rows()
        .iter()
        .map(|row| row.iter().filter(|v| v.is_missing()).count())
        .sum();
    raw.push(missing_cells as f64 / (nf * mf));

    // per-numeric-attribute statistics, aggregated by mean over attributes
    let numeric_columns: Vec<Vec<f64>> = (0..m)
        .filter(|&a| d.attributes()[a].is_numeric())
        .map(|a| {
            d.rows()
                .iter()
                .filter_map(|row| row[a].as_num())
                .collect::<Vec<f64>>()
        })
        .collect();
    let per_attr = |f: &dyn Fn(&[f64]) -> f64| -> f64 {
        let stats: Vec<f64> = numeric_columns
            .iter()
            .filter(|col| !col.is_empty())
            .map(|col| f(col))
            .collect();
        mean_finite(&stats)
    };
    raw.push(per_attr(&geometric_mean));
    raw.push(per_attr(&harmonic_mean));
    raw.push(per_attr(&trimmed_mean));
    raw.push(per_attr(&mean_absolute_deviation));
    raw.push(per_attr(&sample_variance));
    raw.push(per_attr(&|v| sample_variance(v).sqrt()));
    raw.push(per_attr(&|v| {
        let mut s = v.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        quantile_sorted(&s, 0.75)
    }));
    raw.push(per_attr(&interquartile_range));
    // proportion of numeric attributes with any value outside median +- 3*IQR
    let with_outliers = numeric_columns
        .iter()
        .filter(|col| !col.is_empty() && has_outliers(col))
        .count();
    raw.push(if numeric_columns.is_empty() {
        f64::NAN
    } else {
        with_outliers as f64 / numeric_columns.len() as f64
    });
    raw.push(per_attr(&skewness));
    raw.push(per_attr(&kurtosis));

    // correlation-structure measures on mean-imputed numeric attributes
    let spectrum = correlation_spectrum(d);
    raw.push(spectrum.max_eigenvalue);
    raw.push(spectrum.min_eigenvalue);
    raw.push(canonical_correlation(d));
    raw.push(gravity_center(d, &class_counts));
    raw.push(spectrum.mean_abs_corr);

    // entropy measures on the target and the nominal attributes
    let h_c = entropy(&class_counts);
    let nominal_attrs: Vec<usize> = (0..m)
        .filter(|&a| d.attributes()[a].is_nominal())
        .collect();
    let h_x = mean(
        &nominal_attrs
            .iter()
            .map(|&a| attribute_entropy(d, a))
            .collect::<Vec<f64>>(),
    );
    let mi = mean(
        &nominal_attrs
            .iter()
            .map(|&a| mutual_information(d, a))
            .collect::<Vec<f64>>(),
    );
    raw.push(h_c);
    raw.push(h_x);
    raw.push(mi);
    raw.push(if mi > 0.0 { h_c / mi } else { f64::NAN });
    raw.push(if mi > 0.0 { h_x / mi - 1.0 } else { f64::NAN });

    Ok(MetaFeatureVector::sentinelized(
        FamilyId::new(1).unwrap(),
        raw,
    ))
}

/// Shifted to |v| + 1 when nonpositive values occur, so the mean is defined
/// for arbitrary numeric columns.
fn geometric_mean(values: &[f64]) -> f64 {
    let shifted = shift_if_nonpositive(values);
    (shifted.iter().map(|v| v.ln()).sum::<f64>() / shifted.len() as f64).exp()
}

fn harmonic_mean(values: &[f64]) -> f64 {
    let shifted = shift_if_nonpositive(values);
    shifted.len() as f64 / shifted.iter().map(|v| 1.0 / v).sum::<f64>()
}

fn shift_if_nonpositive(values: &[f64]) -> Vec<f64> {
    if values.iter().any(|&v| v <= 0.0) {
        values.iter().map(|&v| v.abs() + 1.0).collect()
    } else {
        values.to_vec()
    }
}

/// Mean after dropping the highest and lowest 5% of values.
fn trimmed_mean(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cut = (0.05 * sorted.len() as f64).floor() as usize;
    mean(&sorted[cut..sorted.len() - cut])
}

fn mean_absolute_deviation(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).abs()).sum::<f64>() / values.len() as f64
}

fn sample_variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64
}

fn interquartile_range(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25)
}

fn has_outliers(values: &[f64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = quantile_sorted(&sorted, 0.5);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let lo = median - 3.0 * iqr;
    let hi = median + 3.0 * iqr;
    values.iter().any(|&v| v < lo || v > hi)
}

fn central_moment(values: &[f64], order: i32) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(order)).sum::<f64>() / values.len() as f64
}

fn skewness(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let m2 = central_moment(values, 2);
    if m2 <= 0.0 {
        return f64::NAN;
    }
    central_moment(values, 3) / m2.powf(1.5)
}

/// Pearson (non-excess) kurtosis: 3 for a normal distribution.
fn kurtosis(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::NAN;
    }
    let m2 = central_moment(values, 2);
    if m2 <= 0.0 {
        return f64::NAN;
    }
    central_moment(values, 4) / (m2 * m2)
}

/// Numeric attributes as a mean-imputed column-major matrix.
fn numeric_matrix(d: &TabularDataset) -> Vec<Vec<f64>> {
    let n = d.n_instances();
    (0..d.n_attributes())
        .filter(|&a| d.attributes()[a].is_numeric())
        .map(|a| {
            let present: Vec<f64> = d.rows().iter().filter_map(|row| row[a].as_num()).collect();
            let fill = if present.is_empty() {
                0.0
            } else {
                mean(&present)
            };
            (0..n)
                .map(|i| d.row(i)[a].as_num().unwrap_or(fill))
                .collect()
        })
        .collect()
}

struct CorrelationSpectrum {
    max_eigenvalue: f64,
    min_eigenvalue: f64,
    mean_abs_corr: f64,
}

pub(crate) fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let ma = mean(a);
    let mb = mean(b);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    if va <= 0.0 || vb <= 0.0 {
        return f64::NAN;
    }
    cov / (va.sqrt() * vb.sqrt())
}

fn correlation_spectrum(d: &TabularDataset) -> CorrelationSpectrum {
    let cols = numeric_matrix(d);
    let p = cols.len();
    if p == 0 {
        return CorrelationSpectrum {
            max_eigenvalue: f64::NAN,
            min_eigenvalue: f64::NAN,
            mean_abs_corr: f64::NAN,
        };
    }
    let mut corr = DMatrix::<f64>::identity(p, p);
    let mut abs_sum = 0.0;
    let mut abs_count = 0usize;
    for i in 0..p {
        for j in i + 1..p {
            let r = pearson(&cols[i], &cols[j]);
            let r = if r.is_finite() { r } else { 0.0 };
            corr[(i, j)] = r;
            corr[(j, i)] = r;
            if pearson(&cols[i], &cols[j]).is_finite() {
                abs_sum += r.abs();
                abs_count += 1;
            }
        }
    }
    let eigen = SymmetricEigen::new(corr);
    let max_eigenvalue = eigen.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_eigenvalue = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let mean_abs_corr = if abs_count > 0 {
        abs_sum / abs_count as f64
    } else {
        f64::NAN
    };
    CorrelationSpectrum {
        max_eigenvalue,
        min_eigenvalue,
        mean_abs_corr,
    }
}

/// First canonical correlation between the numeric-attribute block and the
/// one-hot target block; tiny ridge terms keep the scatter matrices
/// invertible.
fn canonical_correlation(d: &TabularDataset) -> f64 {
    let cols = numeric_matrix(d);
    let p = cols.len();
    let n = d.n_instances();
    let k = d.n_classes();
    if p == 0 || n < 3 || k < 2 {
        return f64::NAN;
    }
    let mut x = DMatrix::<f64>::zeros(n, p);
    for (j, col) in cols.iter().enumerate() {
        let mu = mean(col);
        for i in 0..n {
            x[(i, j)] = col[i] - mu;
        }
    }
    let mut y = DMatrix::<f64>::zeros(n, k);
    let counts = d.class_counts();
    for i in 0..n {
        let c = d.label_of(i) as usize;
        for j in 0..k {
            let indicator = if j == c { 1.0 } else { 0.0 };
            y[(i, j)] = indicator - counts[j] as f64 / n as f64;
        }
    }
    let nf = n as f64;
    let ridge = 1e-9;
    let sxx = x.transpose() * &x / nf + DMatrix::identity(p, p) * ridge;
    let syy = y.transpose() * &y / nf + DMatrix::identity(k, k) * ridge;
    let sxy = x.transpose() * &y / nf;

    let sxx_inv_sqrt = match inverse_sqrt(&sxx) {
        Some(m) => m,
        None => return f64::NAN,
    };
    let syy_inv = match syy.try_inverse() {
        Some(m) => m,
        None => return f64::NAN,
    };
    let core = &sxx_inv_sqrt * &sxy * &syy_inv * sxy.transpose() * &sxx_inv_sqrt;
    // symmetrize against round-off before the eigensolve
    let sym = (&core + core.transpose()) * 0.5;
    let eigen = SymmetricEigen::new(sym);
    let lambda = eigen.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lambda.clamp(0.0, 1.0).sqrt()
}

fn inverse_sqrt(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let eigen = SymmetricEigen::new(m.clone());
    let mut diag = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, &ev) in eigen.eigenvalues.iter().enumerate() {
        if ev <= 0.0 {
            return None;
        }
        diag[(i, i)] = 1.0 / ev.sqrt();
    }
    Some(&eigen.eigenvectors * diag * eigen.eigenvectors.transpose())
}

/// Euclidean distance between the numeric centroids of the majority and
/// minority classes.
fn gravity_center(d: &TabularDataset, class_counts: &[usize]) -> f64 {
    let cols = numeric_matrix(d);
    if cols.is_empty() {
        return f64::NAN;
    }
    let observed: Vec<usize> = (0..class_counts.len())
        .filter(|&c| class_counts[c] > 0)
        .collect();
    if observed.len() < 2 {
        return f64::NAN;
    }
    let majority = *observed
        .iter()
        .max_by_key(|&&c| (class_counts[c], std::cmp::Reverse(c)))
        .unwrap();
    let minority = *observed.iter().min_by_key(|&&c| (class_counts[c], c)).unwrap();
    let centroid = |class: usize| -> Vec<f64> {
        cols.iter()
            .map(|col| {
                let values: Vec<f64> = (0..d.n_instances())
                    .filter(|&i| d.label_of(i) as usize == class)
                    .map(|i| col[i])
                    .collect();
                mean(&values)
            })
            .collect()
    };
    let a = centroid(majority);
    let b = centroid(minority);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Shannon entropy in bits from raw counts.
pub(crate) fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return f64::NAN;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}

fn attribute_entropy(d: &TabularDataset, attr: usize) -> f64 {
    let m = d.attributes()[attr].categories.len();
    let mut counts = vec![0usize; m];
    for row in d.rows() {
        if let Value::Cat(c) = row[attr] {
            counts[c as usize] += 1;
        }
    }
    entropy(&counts)
}

/// Mutual information I(C; X) in bits for one nominal attribute, computed on
/// the rows where the attribute is present.
fn mutual_information(d: &TabularDataset, attr: usize) -> f64 {
    let m = d.attributes()[attr].categories.len();
    let k = d.n_classes();
    let mut joint = vec![vec![0usize; m]; k];
    let mut total = 0usize;
    for (row, &label) in d.rows().iter().zip(d.labels()) {
        if let Value::Cat(c) = row[attr] {
            joint[label as usize][c as usize] += 1;
            total += 1;
        }
    }
    if total == 0 {
        return f64::NAN;
    }
    let class_totals: Vec<usize> = joint.iter().map(|row| row.iter().sum()).collect();
    let cat_totals: Vec<usize> = (0..m).map(|c| joint.iter().map(|row| row[c]).sum()).collect();
    let nf = total as f64;
    let mut mi = 0.0;
    for (cl, row) in joint.iter().enumerate() {
        for (cat, &count) in row.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let pxy = count as f64 / nf;
            let px = class_totals[cl] as f64 / nf;
            let py = cat_totals[cat] as f64 / nf;
            mi += pxy * (pxy / (px * py)).log2();
        }
    }
    mi.max(0.0)
}
