//! Shared numerical building blocks: stable sums, quadrature, root finding,
//! adaptive integration, and goodness-of-fit statistics.

mod integrate;
mod ks;
mod logsumexp;
mod quadrature;
mod rootfind;

pub use integrate::adaptive_simpson;
pub use ks::{ks_critical_1pct, ks_statistic};
pub use logsumexp::log_sum_exp;
pub use quadrature::GaussLegendre;
pub use rootfind::{bracket_monotone, newton_bisect, Bracket, RootResult};

/// Compensated (Neumaier) summation. Error stays at a few ulps regardless of
/// the number of terms.
pub fn neumaier_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and standard error of the mean.
pub fn mean_and_standard_error(xs: &[f64]) -> (f64, f64) {
    assert!(xs.len() >= 2, "need at least two observations");
    let n = xs.len() as f64;
    let mean = neumaier_sum(xs.iter().copied()) / n;
    let ss = neumaier_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    let var = ss / (n - 1.0);
    (mean, (var / n).sqrt())
}
