//! The four-parameter Amoroso (generalized gamma) family: density, CDF,
//! quantiles, sampling, raw moments, and the named special cases. If X is
//! Gamma(m, 1) then l + k * X^{1/n} is Amoroso(l, k, m, n), which is how both
//! the sampler and the CDF are implemented.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma as GammaDraw};
use statrs::distribution::{ContinuousCDF, Gamma as GammaDist};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};

/// Amoroso parameters: location `l`, scale `k > 0`, shape `m > 0`, and power
/// `n != 0`. Support is x >= l (k > 0 throughout; mirrored supports are not
/// used here).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "AmorosoParamsRaw")]
pub struct AmorosoParams {
    l: f64,
    k: f64,
    m: f64,
    n: f64,
}

#[derive(serde::Deserialize)]
struct AmorosoParamsRaw {
    #[serde(default)]
    l: f64,
    k: f64,
    m: f64,
    n: f64,
}

impl TryFrom<AmorosoParamsRaw> for AmorosoParams {
    type Error = Error;

    fn try_from(raw: AmorosoParamsRaw) -> Result<Self> {
        AmorosoParams::new(raw.l, raw.k, raw.m, raw.n)
    }
}

impl AmorosoParams {
    pub fn new(l: f64, k: f64, m: f64, n: f64) -> Result<Self> {
        let ok = l.is_finite()
            && k.is_finite()
            && k > 0.0
            && m.is_finite()
            && m > 0.0
            && n.is_finite()
            && n != 0.0;
        if ok {
            Ok(AmorosoParams { l, k, m, n })
        } else {
            Err(Error::InvalidParameter(format!(
                "Amoroso requires k > 0, m > 0, n != 0; got l={l}, k={k}, m={m}, n={n}"
            )))
        }
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn n(&self) -> f64 {
        self.n
    }
}

/// Named reductions of the family at l = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialCase {
    Exponential,
    Gamma,
    Weibull,
    Frechet,
}

impl fmt::Display for SpecialCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SpecialCase::Exponential => "exponential",
            SpecialCase::Gamma => "gamma",
            SpecialCase::Weibull => "weibull",
            SpecialCase::Frechet => "frechet",
        };
        f.write_str(name)
    }
}

/// Density at x. At the boundary x = l the density is the continuous limit
/// when one exists; a diverging boundary (n > 0 with m n < 1) is an error.
pub fn amoroso_pdf(p: &AmorosoParams, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("x must be finite, got {x}")));
    }
    if x < p.l {
        return Ok(0.0);
    }
    let mn = p.m * p.n;
    if x == p.l {
        if p.n < 0.0 {
            // z^{mn-1} exp(-z^{n}) with z -> 0 and n < 0: the essential
            // exponential zero wins.
            return Ok(0.0);
        }
        return match mn.partial_cmp(&1.0).expect("mn is finite") {
            std::cmp::Ordering::Greater => Ok(0.0),
            std::cmp::Ordering::Equal => Ok((p.n / p.k).abs() / ln_gamma(p.m).exp()),
            std::cmp::Ordering::Less => Err(Error::InvalidParameter(
                "density diverges at the support boundary".into(),
            )),
        };
    }
    let z = (x - p.l) / p.k;
    let ln_pdf = (p.n / p.k).abs().ln() - ln_gamma(p.m) + (mn - 1.0) * z.ln() - z.powf(p.n);
    Ok(ln_pdf.exp())
}

/// CDF via the regularized incomplete gamma: with y = ((x-l)/k)^n, the value
/// is P(m, y) for n > 0 and 1 - P(m, y) for n < 0.
pub fn amoroso_cdf(p: &AmorosoParams, x: f64) -> f64 {
    if x <= p.l {
        return 0.0;
    }
    let y = ((x - p.l) / p.k).powf(p.n);
    if p.n > 0.0 {
        gamma_lr(p.m, y)
    } else {
        1.0 - gamma_lr(p.m, y)
    }
}

/// Quantile function, inverted through the Gamma(m, 1) quantile.
pub fn amoroso_quantile(p: &AmorosoParams, prob: f64) -> Result<f64> {
    if !(0.0 < prob && prob < 1.0) {
        return Err(Error::InvalidParameter(format!("probability must be in (0,1), got {prob}")));
    }
    let gamma = GammaDist::new(p.m, 1.0).expect("m > 0 validated");
    let q = if p.n > 0.0 { prob } else { 1.0 - prob };
    let y = gamma.inverse_cdf(q);
    Ok(p.l + p.k * y.powf(1.0 / p.n))
}

/// Draws via the gamma representation: X ~ Gamma(m, 1), x = l + k X^{1/n}.
pub fn amoroso_sample(p: &AmorosoParams, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = GammaDraw::new(p.m, 1.0).expect("m > 0 validated");
    (0..count).map(|_| p.l + p.k * gamma.sample(&mut rng).powf(1.0 / p.n)).collect()
}

/// Raw moment of (x - l) about the location: k^s Gamma(m + s/n) / Gamma(m),
/// defined iff m + s/n > 0.
pub fn amoroso_moment(p: &AmorosoParams, order: f64) -> Result<f64> {
    if !order.is_finite() {
        return Err(Error::InvalidParameter(format!("order must be finite, got {order}")));
    }
    let shifted = p.m + order / p.n;
    if shifted <= 0.0 {
        return Err(Error::MomentDoesNotExist);
    }
    Ok((order * p.k.ln() + ln_gamma(shifted) - ln_gamma(p.m)).exp())
}

/// Which textbook distribution the parameters collapse to, if any. Checked at
/// l = 0 only; exponential takes precedence over its parents.
pub fn special_case_reduction(p: &AmorosoParams) -> Option<SpecialCase> {
    if p.l != 0.0 {
        return None;
    }
    match (p.m == 1.0, p.n) {
        (true, n) if n == 1.0 => Some(SpecialCase::Exponential),
        (_, n) if n == 1.0 => Some(SpecialCase::Gamma),
        (true, n) if n > 0.0 => Some(SpecialCase::Weibull),
        (true, n) if n < 0.0 => Some(SpecialCase::Frechet),
        _ => None,
    }
}

/// Gamma ratio Gamma(m+s)/Gamma(m) next to its large-m Stirling surrogate
/// m^s. Returns (exact, approx).
pub fn gamma_ratio_approx(m: f64, s: f64) -> Result<(f64, f64)> {
    if !(m.is_finite() && m > 0.0 && s.is_finite() && m + s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need m > 0 and m + s > 0, got m={m}, s={s}"
        )));
    }
    Ok(((ln_gamma(m + s) - ln_gamma(m)).exp(), m.powf(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{adaptive_simpson, ks_critical_1pct, ks_statistic, mean_and_standard_error};

    #[test]
    fn exponential_density_values() {
        // (l, k, m, n) = (0, 1, 1, 1) is Exp(1).
        let p = AmorosoParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
        assert!((amoroso_pdf(&p, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((amoroso_pdf(&p, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(amoroso_pdf(&p, -0.5).unwrap(), 0.0);
    }

    #[test]
    fn gamma_reduction_matches_reference_pdf() {
        // (0, k, m, 1) is Gamma(shape m, scale k); statrs uses a rate.
        let p = AmorosoParams::new(0.0, 2.0, 3.0, 1.0).unwrap();
        let reference = GammaDist::new(3.0, 0.5).unwrap();
        use statrs::distribution::Continuous;
        for i in 1..=100 {
            let x = 0.2 * i as f64;
            let mine = amoroso_pdf(&p, x).unwrap();
            let theirs = reference.pdf(x);
            assert!(
                (mine - theirs).abs() <= 1e-12 * theirs.max(1.0),
                "x={x}: {mine} vs {theirs}"
            );
        }
    }

    #[test]
    fn weibull_case_has_closed_cdf() {
        // (0, k, 1, n > 0): CDF is 1 - exp(-(x/k)^n).
        let p = AmorosoParams::new(0.0, 2.0, 1.0, 1.5).unwrap();
        for x in [0.1, 1.0, 3.0] {
            let want = 1.0 - (-(x / 2.0f64).powf(1.5)).exp();
            assert!((amoroso_cdf(&p, x) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn frechet_case_has_closed_cdf() {
        // (0, k, 1, n < 0): CDF is exp(-(x/k)^n).
        let p = AmorosoParams::new(0.0, 1.0, 1.0, -2.0).unwrap();
        for x in [0.5f64, 1.0, 4.0] {
            let want = (-(x).powf(-2.0)).exp();
            assert!((amoroso_cdf(&p, x) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        let cases = [
            (0.0, 1.0, 1.0, 1.0),
            (0.0, 2.0, 2.0, 1.0),
            (0.0, 1.0, 0.5, 2.0),
            (0.0, 1.5, 3.0, 0.5),
            (0.0, 1.0, 2.0, -0.5),
            (0.0, 2.0, 1.5, -1.5),
        ];
        for (l, k, m, n) in cases {
            let p = AmorosoParams::new(l, k, m, n).unwrap();
            let hi = amoroso_quantile(&p, 1.0 - 1e-9).unwrap();
            // For n > 0 the boundary density is finite here, so the exact
            // support edge is the lower limit. For n < 0 the upper tail is a
            // power law spanning many decades; substituting x = l + e^v
            // keeps the integrand resolvable.
            let mass = if n > 0.0 {
                adaptive_simpson(&|x| amoroso_pdf(&p, x).unwrap(), l, hi, 1e-10, 48)
            } else {
                let lo = amoroso_quantile(&p, 1e-9).unwrap();
                let g = |v: f64| {
                    let x = l + v.exp();
                    amoroso_pdf(&p, x).unwrap() * v.exp()
                };
                adaptive_simpson(&g, (lo - l).ln(), (hi - l).ln(), 1e-10, 48)
            };
            assert!((mass - 1.0).abs() < 1e-6, "({l},{k},{m},{n}): {mass}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let p = AmorosoParams::new(0.0, 1.3, 2.5, -0.8).unwrap();
        for x in [0.5, 1.0, 2.0, 5.0, 20.0] {
            let prob = amoroso_cdf(&p, x);
            let back = amoroso_quantile(&p, prob).unwrap();
            assert!((back - x).abs() < 1e-8 * x.max(1.0), "x={x}: {back}");
        }
    }

    #[test]
    fn gamma_case_sample_mean() {
        // n = 1: mean is k m. 4 standard errors at one million draws.
        let p = AmorosoParams::new(0.0, 2.0, 3.0, 1.0).unwrap();
        let draws = amoroso_sample(&p, 1_000_000, 17);
        let (mean, se) = mean_and_standard_error(&draws);
        assert!((mean - 6.0).abs() < 4.0 * se, "mean={mean}, se={se}");
    }

    #[test]
    fn sampler_matches_cdf_by_ks() {
        let p = AmorosoParams::new(0.0, 1.0, 2.0, -0.5).unwrap();
        let mut draws = amoroso_sample(&p, 100_000, 29);
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = ks_statistic(&draws, |x| amoroso_cdf(&p, x));
        assert!(d < ks_critical_1pct(draws.len()), "D={d}");
    }

    #[test]
    fn moments_match_monte_carlo() {
        let p = AmorosoParams::new(0.0, 2.0, 3.0, 0.5).unwrap();
        let draws = amoroso_sample(&p, 1_000_000, 31);
        for order in [1.0, 2.0] {
            let analytic = amoroso_moment(&p, order).unwrap();
            let powered: Vec<f64> = draws.iter().map(|x| x.powf(order)).collect();
            let (mean, se) = mean_and_standard_error(&powered);
            assert!(
                (analytic - mean).abs() < 4.0 * se,
                "order {order}: {analytic} vs {mean} (se {se})"
            );
        }
    }

    #[test]
    fn moment_existence_boundary() {
        // m + s/n must stay positive: heavy Frechet-like tails lose moments.
        let p = AmorosoParams::new(0.0, 1.0, 2.0, -0.5).unwrap();
        assert!(matches!(amoroso_moment(&p, 1.0), Err(Error::MomentDoesNotExist)));
        let q = AmorosoParams::new(0.0, 1.0, 3.0, -2.0).unwrap();
        assert!(amoroso_moment(&q, 1.0).is_ok());
        assert!(matches!(amoroso_moment(&q, 6.0), Err(Error::MomentDoesNotExist)));
    }

    #[test]
    fn gamma_moment_value() {
        // Gamma(m, k): first moment k m.
        let p = AmorosoParams::new(0.0, 2.0, 3.0, 1.0).unwrap();
        assert!((amoroso_moment(&p, 1.0).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn reductions_are_named_with_precedence() {
        let cases = [
            ((0.0, 1.0, 1.0, 1.0), Some(SpecialCase::Exponential)),
            ((0.0, 2.0, 3.0, 1.0), Some(SpecialCase::Gamma)),
            ((0.0, 1.0, 1.0, 2.0), Some(SpecialCase::Weibull)),
            ((0.0, 1.0, 1.0, -1.0), Some(SpecialCase::Frechet)),
            ((0.0, 1.0, 2.0, -1.5), None),
            ((0.5, 1.0, 1.0, 1.0), None),
        ];
        for ((l, k, m, n), want) in cases {
            let p = AmorosoParams::new(l, k, m, n).unwrap();
            assert_eq!(special_case_reduction(&p), want, "({l},{k},{m},{n})");
        }
    }

    #[test]
    fn gamma_ratio_surrogate_quality() {
        // s = 0 and s = 1 are exact; at m = 10, s = 0.5 the error is ~1.3%.
        let (exact, approx) = gamma_ratio_approx(5.0, 0.0).unwrap();
        assert!((exact - 1.0).abs() < 1e-14 && approx == 1.0);
        let (exact, approx) = gamma_ratio_approx(5.0, 1.0).unwrap();
        assert!((exact - 5.0).abs() < 1e-12 && approx == 5.0);
        let (exact, approx) = gamma_ratio_approx(10.0, 0.5).unwrap();
        // Independent route: Gamma(10.5)/Gamma(10) by the half-integer
        // product formula, Gamma(10.5) = 9.5 * 8.5 * ... * 0.5 * sqrt(pi).
        let mut product = std::f64::consts::PI.sqrt();
        let mut half = 0.5;
        while half < 10.0 {
            product *= half;
            half += 1.0;
        }
        let gamma_10 = 362880.0;
        let reference = product / gamma_10;
        assert!((exact - reference).abs() < 1e-10 * reference, "{exact} vs {reference}");
        let rel_err = (approx - exact).abs() / exact;
        assert!(rel_err < 0.02, "rel err {rel_err}");
        assert!(rel_err > 0.01, "the surrogate should be visibly off at m=10");
    }

    #[test]
    fn parameter_validation() {
        assert!(AmorosoParams::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(AmorosoParams::new(0.0, 1.0, -1.0, 1.0).is_err());
        assert!(AmorosoParams::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(AmorosoParams::new(f64::NAN, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn boundary_density_cases() {
        // mn = 1 at the boundary: finite positive limit.
        let p = AmorosoParams::new(0.0, 1.0, 0.5, 2.0).unwrap();
        let at_zero = amoroso_pdf(&p, 0.0).unwrap();
        assert!((at_zero - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
        // mn < 1 with n > 0 diverges.
        let q = AmorosoParams::new(0.0, 1.0, 0.5, 1.0).unwrap();
        assert!(amoroso_pdf(&q, 0.0).is_err());
        // Negative n pins the boundary to zero.
        let r = AmorosoParams::new(0.0, 1.0, 2.0, -0.5).unwrap();
        assert_eq!(amoroso_pdf(&r, 0.0).unwrap(), 0.0);
    }
}
