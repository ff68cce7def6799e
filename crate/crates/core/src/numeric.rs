//! Summation helpers shared by the estimators.

const LEAF: usize = 8;

/// Pairwise (tree) summation. The grouping depends only on the slice length,
/// so the result is reproducible regardless of how the values were produced.
pub fn tree_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    tree_sum(&values[..mid]) + tree_sum(&values[mid..])
}

/// Arithmetic mean via [`tree_sum`]; `NaN` for an empty slice.
pub fn tree_mean(values: &[f64]) -> f64 {
    tree_sum(values) / values.len() as f64
}

/// Median; the two central order statistics are averaged for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let len = sorted.len();
    if len == 0 {
        return f64::NAN;
    }
    if len % 2 == 1 {
        sorted[len / 2]
    } else {
        0.5 * (sorted[len / 2 - 1] + sorted[len / 2])
    }
}

/// Ceiling that ignores floating-point noise just above an integer, so
/// `ceil(448 / 0.1^2)` yields 44800 rather than 44801.
pub(crate) fn robust_ceil(x: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest
    } else {
        x.ceil()
    }
}
