//! Diversity and multiple-comparison statistics: the error contingency
//! table, the kappa association measure with its t-derived threshold, the
//! Friedman omnibus test, Holm's step-down post-hoc, and a paired Wilcoxon
//! fallback for two candidates.

use statrs::distribution::{ChiSquared, Continuous, ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::metatarget::AccuracyMatrix;

/// K×K table over the instances mispredicted by at least one of two models.
/// Cell (i, j) counts instances the first model labeled C_i and the second
/// labeled C_j; one of the two indices may equal the true class when only
/// the other model erred.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    k: usize,
    counts: Vec<u64>,
    n: u64,
}

impl ContingencyTable {
    pub fn from_counts(counts: &[Vec<u64>]) -> Result<Self> {
        let k = counts.len();
        if k == 0 || counts.iter().any(|row| row.len() != k) {
            return Err(Error::LengthMismatch("contingency table must be square".into()));
        }
        let flat: Vec<u64> = counts.iter().flatten().copied().collect();
        let n = flat.iter().sum();
        Ok(ContingencyTable { k, counts: flat, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Total number of included (mispredicted-by-either) instances.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.k + j]
    }

    pub fn row_total(&self, i: usize) -> u64 {
        (0..self.k).map(|j| self.count(i, j)).sum()
    }

    pub fn col_total(&self, j: usize) -> u64 {
        (0..self.k).map(|i| self.count(i, j)).sum()
    }
}

/// Builds the contingency table from two prediction sequences and the truth.
/// Only instances where at least one prediction is wrong are included.
pub fn build_contingency(
    pred1: &[u32],
    pred2: &[u32],
    truth: &[u32],
    k: usize,
) -> Result<ContingencyTable> {
    if pred1.len() != pred2.len() || pred1.len() != truth.len() {
        return Err(Error::LengthMismatch(format!(
            "pred1 {} / pred2 {} / truth {}",
            pred1.len(),
            pred2.len(),
            truth.len()
        )));
    }
    if k == 0 {
        return Err(Error::DomainError("class count must be positive".into()));
    }
    let mut counts = vec![0u64; k * k];
    let mut n = 0u64;
    for ((&p1, &p2), &t) in pred1.iter().zip(pred2).zip(truth) {
        if p1 as usize >= k || p2 as usize >= k || t as usize >= k {
            return Err(Error::DomainError(format!("label out of range [0,{k})")));
        }
        if p1 != t || p2 != t {
            counts[p1 as usize * k + p2 as usize] += 1;
            n += 1;
        }
    }
    Ok(ContingencyTable { k, counts, n })
}

/// Kappa association between two models' error behavior:
/// (Theta1 - Theta2) / (1 - Theta2), with Theta1 the diagonal mass and
/// Theta2 the chance-agreement term from the marginals.
pub fn kappa(t: &ContingencyTable) -> Result<f64> {
    if t.n == 0 {
        return Err(Error::UndefinedKappa("empty table (N = 0)".into()));
    }
    let n = t.n as f64;
    let mut theta1 = 0.0;
    let mut theta2 = 0.0;
    for i in 0..t.k {
        theta1 += t.count(i, i) as f64 / n;
        theta2 += (t.row_total(i) as f64 / n) * (t.col_total(i) as f64 / n);
    }
    if (1.0 - theta2).abs() < 1e-15 {
        return Err(Error::UndefinedKappa("chance agreement Theta2 = 1".into()));
    }
    Ok((theta1 - theta2) / (1.0 - theta2))
}

/// Student-t quantile. statrs supplies the bracketing inverse; a few Newton
/// steps on the exact CDF polish it below 1e-6 absolute error even for
/// extreme degrees of freedom.
pub fn t_quantile(df: u64, p: f64) -> Result<f64> {
    if df == 0 {
        return Err(Error::DomainError("t quantile needs df >= 1".into()));
    }
    if !(0.0 < p && p < 1.0) {
        return Err(Error::DomainError(format!("quantile level {p} outside (0,1)")));
    }
    let dist = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| Error::DomainError(e.to_string()))?;
    let mut q = dist.inverse_cdf(p);
    for _ in 0..4 {
        let err = dist.cdf(q) - p;
        let slope = dist.pdf(q);
        if slope <= 0.0 || !err.is_finite() {
            break;
        }
        let step = err / slope;
        q -= step;
        if step.abs() < 1e-14 * (1.0 + q.abs()) {
            break;
        }
    }
    Ok(q)
}

/// Adaptive diversity threshold: delta = t_c / sqrt(N - 2 + t_c^2) where
/// t_c is the two-sided critical t value with N - 2 degrees of freedom.
pub fn diversity_threshold(n: u64, alpha: f64) -> Result<f64> {
    if n <= 2 {
        return Err(Error::DomainError(format!(
            "threshold needs N >= 3, got {n}"
        )));
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::DomainError(format!("alpha {alpha} outside (0,1)")));
    }
    let tc = t_quantile(n - 2, 1.0 - alpha / 2.0)?;
    Ok(tc / ((n as f64 - 2.0) + tc * tc).sqrt())
}

/// Outcome of the diversity test between two models.
#[derive(Debug, Clone, Copy)]
pub struct DiversityVerdict {
    /// Kappa, when defined.
    pub kappa: Option<f64>,
    /// Threshold delta, when the test is defined.
    pub delta: Option<f64>,
    pub diverse: bool,
    pub n: u64,
}

/// Diverse iff |kappa| < delta. Degenerate evidence (N <= 2, undefined
/// kappa, or |kappa| = 1) yields "not diverse": with no or identical error
/// behavior there is no demonstrated complementarity, so the filter drops
/// the weaker duplicate.
pub fn diversity_verdict(t: &ContingencyTable, alpha: f64) -> DiversityVerdict {
    let n = t.n();
    if n <= 2 {
        return DiversityVerdict {
            kappa: kappa(t).ok(),
            delta: None,
            diverse: false,
            n,
        };
    }
    let k = match kappa(t) {
        Ok(k) => k,
        Err(_) => {
            return DiversityVerdict {
                kappa: None,
                delta: None,
                diverse: false,
                n,
            }
        }
    };
    if (k.abs() - 1.0).abs() < 1e-12 {
        return DiversityVerdict {
            kappa: Some(k),
            delta: None,
            diverse: false,
            n,
        };
    }
    let delta = diversity_threshold(n, alpha).expect("n > 2 and alpha checked by caller");
    DiversityVerdict {
        kappa: Some(k),
        delta: Some(delta),
        diverse: k.abs() < delta,
        n,
    }
}

/// Ranks with 1 for the largest value; tied values share the average of the
/// rank positions they span.
pub fn ranks_descending(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut ranks = vec![0.0; n];
    let mut pos = 0;
    while pos < n {
        let mut end = pos + 1;
        while end < n && values[order[end]] == values[order[pos]] {
            end += 1;
        }
        // positions pos..end (0-based) share ranks pos+1 ..= end
        let avg = (pos + 1 + end) as f64 / 2.0;
        for &idx in &order[pos..end] {
            ranks[idx] = avg;
        }
        pos = end;
    }
    ranks
}

/// Result of an omnibus or pairwise comparison.
#[derive(Debug, Clone)]
pub struct ComparisonResult {
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    /// Appropriateness bits, when the procedure derives them.
    pub appropriate: Option<Vec<u8>>,
}

/// Friedman test over k algorithms and r runs. Within each run the
/// accuracies are ranked descending with average ties; the chi-square
/// statistic with k - 1 degrees of freedom decides the null of no
/// difference.
pub fn friedman_test(acc: &AccuracyMatrix, alpha: f64) -> Result<ComparisonResult> {
    let k = acc.k();
    let r = acc.runs();
    if k < 3 {
        return Err(Error::DomainError(format!(
            "Friedman test needs k >= 3 algorithms, got {k}"
        )));
    }
    if r < 2 {
        return Err(Error::DomainError(format!(
            "Friedman test needs r >= 2 runs, got {r}"
        )));
    }
    let mean_ranks = mean_ranks(acc);
    let kf = k as f64;
    let rf = r as f64;
    let center = (kf + 1.0) / 2.0;
    let spread: f64 = mean_ranks.iter().map(|&m| (m - center).powi(2)).sum();
    let statistic = 12.0 * rf / (kf * (kf + 1.0)) * spread;
    let dist = ChiSquared::new(kf - 1.0).map_err(|e| Error::DomainError(e.to_string()))?;
    let p_value = 1.0 - dist.cdf(statistic);
    Ok(ComparisonResult {
        statistic,
        p_value,
        reject: p_value < alpha,
        appropriate: None,
    })
}

/// Average rank of each algorithm across runs (rank 1 = most accurate).
pub fn mean_ranks(acc: &AccuracyMatrix) -> Vec<f64> {
    let k = acc.k();
    let r = acc.runs();
    let mut sums = vec![0.0; k];
    for run in 0..r {
        let row: Vec<f64> = (0..k).map(|j| acc.value(j, run)).collect();
        for (j, rank) in ranks_descending(&row).into_iter().enumerate() {
            sums[j] += rank;
        }
    }
    sums.iter().map(|s| s / r as f64).collect()
}

/// Holm's step-down procedure against the best-mean-accuracy reference.
/// Pairwise z statistics come from average-rank differences with the
/// standard Friedman post-hoc standard error sqrt(k(k+1)/(6r)). Returns one
/// bit per algorithm: 1 for the reference and everything not significantly
/// different from it.
pub fn holm_procedure(acc: &AccuracyMatrix, alpha: f64) -> Result<Vec<u8>> {
    let k = acc.k();
    let r = acc.runs();
    if k < 2 || r < 2 {
        return Err(Error::DomainError(format!(
            "Holm procedure needs k >= 2 and r >= 2, got k={k} r={r}"
        )));
    }
    let reference = reference_index(acc);
    let mean_ranks = mean_ranks(acc);
    let se = ((k * (k + 1)) as f64 / (6.0 * r as f64)).sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");

    let mut comparisons: Vec<(usize, f64)> = (0..k)
        .filter(|&j| j != reference)
        .map(|j| {
            let z = (mean_ranks[j] - mean_ranks[reference]) / se;
            let p = 2.0 * (1.0 - normal.cdf(z.abs()));
            (j, p)
        })
        .collect();
    comparisons.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));

    let mut bits = vec![1u8; k];
    let m = comparisons.len();
    for (i, &(j, p)) in comparisons.iter().enumerate() {
        if p < alpha / (m - i) as f64 {
            bits[j] = 0;
        } else {
            break; // step-down: retain this and all larger p-values
        }
    }
    Ok(bits)
}

/// Index of the algorithm with the highest mean accuracy; ties break to the
/// lowest column index.
pub fn reference_index(acc: &AccuracyMatrix) -> usize {
    let means = acc.means();
    let mut best = 0;
    for j in 1..means.len() {
        if means[j] > means[best] {
            best = j;
        }
    }
    best
}

/// Two-sided paired Wilcoxon signed-rank test with normal approximation and
/// tie correction. Zero differences are dropped; if none remain the null is
/// accepted outright.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alpha: f64) -> Result<ComparisonResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(format!(
            "paired samples of {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(ComparisonResult {
            statistic: 0.0,
            p_value: 1.0,
            reject: false,
            appropriate: None,
        });
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    // ranks ascending by |d|: reuse the descending ranker on negated values
    let neg: Vec<f64> = abs.iter().map(|v| -v).collect();
    let ranks = ranks_descending(&neg);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0;
    // tie correction over groups of equal |d|
    let mut sorted = abs.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        var -= t * (t * t - 1.0) / 48.0;
        i = j;
    }
    if var <= 0.0 {
        return Ok(ComparisonResult {
            statistic: w_plus,
            p_value: 1.0,
            reject: false,
            appropriate: None,
        });
    }
    let z = (w_plus - mean) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let p_value = 2.0 * (1.0 - normal.cdf(z.abs()));
    Ok(ComparisonResult {
        statistic: z,
        p_value,
        reject: p_value < alpha,
        appropriate: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn table(counts: &[&[u64]]) -> ContingencyTable {
        let rows: Vec<Vec<u64>> = counts.iter().map(|r| r.to_vec()).collect();
        ContingencyTable::from_counts(&rows).unwrap()
    }

    #[test]
    fn contingency_includes_only_errors() {
        // both models always correct: nothing to include
        let t = build_contingency(&[0, 1], &[0, 1], &[0, 1], 2).unwrap();
        assert_eq!(t.n(), 0);

        // identical and always wrong: all mass on the diagonal
        let t = build_contingency(&[1, 1, 1], &[1, 1, 1], &[0, 0, 0], 2).unwrap();
        assert_eq!(t.n(), 3);
        assert_eq!(t.count(1, 1), 3);
    }

    #[test]
    fn contingency_hand_trace() {
        // enumerated by hand: every instance has at least one error
        let t = build_contingency(&[1, 1, 0, 0], &[1, 0, 1, 0], &[0, 0, 0, 1], 2).unwrap();
        assert_eq!(t.n(), 4);
        assert_eq!(t.count(1, 1), 1);
        assert_eq!(t.count(1, 0), 1);
        assert_eq!(t.count(0, 1), 1);
        assert_eq!(t.count(0, 0), 1);
    }

    #[test]
    fn kappa_oracle_values() {
        // Theta1 = 0.75, Theta2 = 0.5 -> kappa = 0.5
        assert_abs_diff_eq!(
            kappa(&table(&[&[3, 1], &[1, 3]])).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        // all mass diagonal -> 1
        assert_abs_diff_eq!(
            kappa(&table(&[&[4, 0], &[0, 4]])).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        // maximal negative association -> -1
        assert_abs_diff_eq!(
            kappa(&table(&[&[0, 4], &[4, 0]])).unwrap(),
            -1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn kappa_undefined_cases() {
        assert!(matches!(
            kappa(&table(&[&[0, 0], &[0, 0]])),
            Err(Error::UndefinedKappa(_))
        ));
        // single row occupied: Theta2 = 1
        assert!(matches!(
            kappa(&table(&[&[5, 0], &[0, 0]])),
            Err(Error::UndefinedKappa(_))
        ));
    }

    #[test]
    fn t_quantile_oracle() {
        // standard-table values
        assert_abs_diff_eq!(t_quantile(1, 0.975).unwrap(), 12.7062, epsilon = 1e-3);
        assert_abs_diff_eq!(t_quantile(6, 0.975).unwrap(), 2.446912, epsilon = 1e-5);
        assert_abs_diff_eq!(t_quantile(50, 0.975).unwrap(), 2.008559, epsilon = 1e-5);
        // normal limit
        assert_abs_diff_eq!(t_quantile(1_000_000, 0.975).unwrap(), 1.95996, epsilon = 1e-3);
        // symmetry
        assert_abs_diff_eq!(t_quantile(7, 0.5).unwrap(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(
            t_quantile(7, 0.9).unwrap(),
            -t_quantile(7, 0.1).unwrap(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn threshold_oracle_and_monotonicity() {
        // t_c(50, .975) = 2.0086 -> delta = 0.2732
        assert_abs_diff_eq!(diversity_threshold(52, 0.05).unwrap(), 0.2732, epsilon = 2e-3);
        let d52 = diversity_threshold(52, 0.05).unwrap();
        let d102 = diversity_threshold(102, 0.05).unwrap();
        assert!(d102 < d52);
        // smaller alpha -> wider interval
        let d_tight = diversity_threshold(52, 0.01).unwrap();
        assert!(d_tight > d52);
        assert!(matches!(
            diversity_threshold(2, 0.05),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn verdict_conventions() {
        // N = 0: not diverse by convention
        let v = diversity_verdict(&table(&[&[0, 0], &[0, 0]]), 0.05);
        assert!(!v.diverse);
        // kappa = 0.5 with N = 8: delta(8) = t_c(6)/sqrt(6 + t_c^2) ~ 0.707
        let v = diversity_verdict(&table(&[&[3, 1], &[1, 3]]), 0.05);
        assert!(v.diverse);
        assert_abs_diff_eq!(v.delta.unwrap(), 0.7071, epsilon = 2e-3);
        // |kappa| = 1: dependent
        let v = diversity_verdict(&table(&[&[5, 0], &[0, 5]]), 0.05);
        assert!(!v.diverse);
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(ranks_descending(&[0.7, 0.4, 0.7]), vec![1.5, 3.0, 1.5]);
        assert_eq!(
            ranks_descending(&[0.7, 0.4, 0.8, 0.5, 0.7]),
            vec![2.5, 5.0, 1.0, 4.0, 2.5]
        );
        assert_eq!(ranks_descending(&[0.9, 0.5, 0.1]), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn friedman_identical_accepts() {
        let acc = AccuracyMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0.5; 10], vec![0.5; 10], vec![0.5; 10]],
        )
        .unwrap();
        let res = friedman_test(&acc, 0.05).unwrap();
        assert_abs_diff_eq!(res.statistic, 0.0, epsilon = 1e-12);
        assert!(!res.reject);
    }

    #[test]
    fn friedman_detects_dominance() {
        // one algorithm strictly best in all runs, others tied
        let r = 30;
        let acc = AccuracyMatrix::new(
            vec!["best".into(), "b".into(), "c".into()],
            vec![vec![0.9; r], vec![0.6; r], vec![0.6; r]],
        )
        .unwrap();
        let res = friedman_test(&acc, 0.05).unwrap();
        assert!(res.reject, "p = {}", res.p_value);
    }

    #[test]
    fn friedman_is_rank_based() {
        let base = AccuracyMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.9, 0.7, 0.8, 0.6],
                vec![0.5, 0.6, 0.7, 0.4],
                vec![0.6, 0.5, 0.9, 0.5],
            ],
        )
        .unwrap();
        // strictly monotone transform: x -> x^3 + 0.1 x
        let transformed = AccuracyMatrix::new(
            base.names().to_vec(),
            (0..3)
                .map(|j| {
                    (0..4)
                        .map(|r| {
                            let x = base.value(j, r);
                            x * x * x + 0.1 * x
                        })
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        let s1 = friedman_test(&base, 0.05).unwrap().statistic;
        let s2 = friedman_test(&transformed, 0.05).unwrap().statistic;
        assert_abs_diff_eq!(s1, s2, epsilon = 1e-12);
    }

    #[test]
    fn holm_keeps_reference_and_drops_dominated() {
        let r = 50;
        let mut best = Vec::with_capacity(r);
        let mut mid = Vec::with_capacity(r);
        let bad = vec![0.3; r];
        for i in 0..r {
            let jitter = (i % 5) as f64 * 1e-3;
            best.push(0.90 + jitter);
            mid.push(0.89 - jitter);
        }
        let acc = AccuracyMatrix::new(
            vec!["best".into(), "mid".into(), "bad".into()],
            vec![best, mid, bad],
        )
        .unwrap();
        let bits = holm_procedure(&acc, 0.05).unwrap();
        assert_eq!(bits[0], 1); // reference always appropriate
        assert_eq!(bits[2], 0); // large rank gap at r = 50
    }

    #[test]
    fn holm_all_equal_keeps_everything() {
        let acc = AccuracyMatrix::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0.7; 20], vec![0.7; 20], vec![0.7; 20]],
        )
        .unwrap();
        assert_eq!(holm_procedure(&acc, 0.05).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn holm_monotone_in_alpha() {
        // anything flagged 0 at alpha = 0.05 is flagged 0 at alpha = 0.10
        let acc = AccuracyMatrix::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                (0..30).map(|i| 0.9 + (i % 3) as f64 * 1e-3).collect(),
                (0..30).map(|i| 0.85 - (i % 4) as f64 * 1e-3).collect(),
                (0..30).map(|i| 0.7 + (i % 2) as f64 * 1e-3).collect(),
                vec![0.4; 30],
            ],
        )
        .unwrap();
        let tight = holm_procedure(&acc, 0.05).unwrap();
        let loose = holm_procedure(&acc, 0.10).unwrap();
        for j in 0..4 {
            if tight[j] == 0 {
                assert_eq!(loose[j], 0, "algorithm {j}");
            }
        }
    }

    #[test]
    fn wilcoxon_paired() {
        let a = vec![0.9; 30];
        let b: Vec<f64> = (0..30).map(|i| 0.6 + (i % 3) as f64 * 1e-3).collect();
        let res = wilcoxon_signed_rank(&a, &b, 0.05).unwrap();
        assert!(res.reject);

        let res = wilcoxon_signed_rank(&a, &a, 0.05).unwrap();
        assert!(!res.reject);
        assert_eq!(res.p_value, 1.0);
    }
}
