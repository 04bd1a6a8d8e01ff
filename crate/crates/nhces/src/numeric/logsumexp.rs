/// ln Σ exp(xᵢ) with the max shifted out, so the result is finite whenever the
/// true value is representable even if individual exp(xᵢ) would overflow.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        // Empty input or all -inf gives -inf; any +inf dominates.
        return max;
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}
