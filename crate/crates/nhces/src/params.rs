use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::neumaier_sum;

/// Joint distribution of the log price / log quality disturbances (nu_p,
/// nu_omega) attached to each good.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum NoiseSpec {
    /// Point mass at (nu_p, nu_omega).
    Degenerate { nu_p: f64, nu_omega: f64 },
    /// Independent normals.
    IndependentNormal { mu_p: f64, sigma_p: f64, mu_omega: f64, sigma_omega: f64 },
    /// Finite list of (nu_p, nu_omega) pairs with equal mass.
    Empirical { pairs: Vec<(f64, f64)> },
}

impl NoiseSpec {
    /// Point mass at the origin: no disturbances at all.
    pub const NONE: NoiseSpec = NoiseSpec::Degenerate { nu_p: 0.0, nu_omega: 0.0 };

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            NoiseSpec::Degenerate { nu_p, nu_omega } => nu_p.is_finite() && nu_omega.is_finite(),
            NoiseSpec::IndependentNormal { mu_p, sigma_p, mu_omega, sigma_omega } => {
                mu_p.is_finite()
                    && mu_omega.is_finite()
                    && sigma_p.is_finite()
                    && sigma_omega.is_finite()
                    && *sigma_p >= 0.0
                    && *sigma_omega >= 0.0
            }
            NoiseSpec::Empirical { pairs } => {
                !pairs.is_empty() && pairs.iter().all(|(p, w)| p.is_finite() && w.is_finite())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid noise specification: {self:?}")))
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, NoiseSpec::Degenerate { .. })
    }
}

#[derive(Deserialize)]
struct PreferenceParamsRaw {
    rho: f64,
    alpha: f64,
    #[serde(default = "one")]
    beta: f64,
    #[serde(default)]
    xi_p: f64,
    #[serde(default)]
    xi_omega: f64,
    #[serde(default = "no_noise")]
    noise: NoiseSpec,
}

fn one() -> f64 {
    1.0
}

fn no_noise() -> NoiseSpec {
    NoiseSpec::NONE
}

/// Primitives of the demand system: elasticity of substitution `rho`, gamma
/// shape `alpha` and scale `beta` for the distribution of income-elasticity
/// parameters across goods, loadings `xi_p` and `xi_omega` of log price and
/// log quality on that parameter, and the disturbance law.
///
/// Invariants enforced at construction: rho > 0 and rho != 1, alpha > 0,
/// beta > 0, finite loadings, valid noise.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PreferenceParamsRaw")]
pub struct PreferenceParams {
    rho: f64,
    alpha: f64,
    beta: f64,
    xi_p: f64,
    xi_omega: f64,
    noise: NoiseSpec,
}

impl TryFrom<PreferenceParamsRaw> for PreferenceParams {
    type Error = Error;

    fn try_from(raw: PreferenceParamsRaw) -> Result<Self> {
        PreferenceParams::new(raw.rho, raw.alpha, raw.beta, raw.xi_p, raw.xi_omega, raw.noise)
    }
}

impl PreferenceParams {
    pub fn new(
        rho: f64,
        alpha: f64,
        beta: f64,
        xi_p: f64,
        xi_omega: f64,
        noise: NoiseSpec,
    ) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) || rho == 1.0 {
            return Err(Error::InvalidParameter(format!(
                "rho must be positive and different from 1, got {rho}"
            )));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        if !xi_p.is_finite() || !xi_omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "loadings must be finite, got xi_p={xi_p}, xi_omega={xi_omega}"
            )));
        }
        noise.validate()?;
        Ok(PreferenceParams { rho, alpha, beta, xi_p, xi_omega, noise })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn xi_p(&self) -> f64 {
        self.xi_p
    }

    pub fn xi_omega(&self) -> f64 {
        self.xi_omega
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    /// The reparametrization (beta, xi) -> (c*beta, xi/c) that rescales the
    /// income-elasticity axis without changing demand.
    pub fn with_scaled_beta(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {c}")));
        }
        PreferenceParams::new(
            self.rho,
            self.alpha,
            self.beta * c,
            self.xi_p / c,
            self.xi_omega / c,
            self.noise.clone(),
        )
    }
}

/// E[(e^{nu_p} / e^{nu_omega})^{1-rho}], the noise moment entering the
/// closed-form expenditure mapping. Infinite or non-positive results are
/// rejected.
pub fn compute_m(noise: &NoiseSpec, rho: f64) -> Result<f64> {
    noise.validate()?;
    let s = 1.0 - rho;
    let m = match noise {
        NoiseSpec::Degenerate { nu_p, nu_omega } => (s * (nu_p - nu_omega)).exp(),
        NoiseSpec::IndependentNormal { mu_p, sigma_p, mu_omega, sigma_omega } => {
            // Lognormal moment: exp(s*mu + s^2 sigma^2 / 2) for each factor.
            (s * (mu_p - mu_omega) + 0.5 * s * s * (sigma_p * sigma_p + sigma_omega * sigma_omega))
                .exp()
        }
        NoiseSpec::Empirical { pairs } => {
            let total = neumaier_sum(pairs.iter().map(|&(p, w)| (s * (p - w)).exp()));
            total / pairs.len() as f64
        }
    };
    if m.is_finite() && m > 0.0 {
        Ok(m)
    } else {
        Err(Error::MDiverges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn zero_noise_gives_unit_moment() {
        assert_eq!(compute_m(&NoiseSpec::NONE, 0.5).unwrap(), 1.0);
        assert_eq!(compute_m(&NoiseSpec::NONE, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn independent_standard_normals_at_rho_half() {
        let noise = NoiseSpec::IndependentNormal {
            mu_p: 0.0,
            sigma_p: 1.0,
            mu_omega: 0.0,
            sigma_omega: 1.0,
        };
        let m = compute_m(&noise, 0.5).unwrap();
        assert!((m - 0.25f64.exp()).abs() < 1e-15);
        assert!((m - 1.2840254166877414).abs() < 1e-12);
    }

    #[test]
    fn empirical_moment_approaches_normal_moment() {
        // Draw pairs from the same independent standard normals and compare
        // the empirical moment to the analytic one within sampling error.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let rho = 0.5;
        let s = 1.0 - rho;
        let n = 1_000_000;
        let pairs: Vec<(f64, f64)> =
            (0..n).map(|_| (normal.sample(&mut rng), normal.sample(&mut rng))).collect();
        let draws: Vec<f64> = pairs.iter().map(|&(p, w)| (s * (p - w)).exp()).collect();
        let (_, se) = crate::numeric::mean_and_standard_error(&draws);
        let m = compute_m(&NoiseSpec::Empirical { pairs }, rho).unwrap();
        assert!((m - 0.25f64.exp()).abs() < 3.0 * se, "m={m}, se={se}");
    }

    #[test]
    fn rejects_unit_rho_and_bad_shapes() {
        assert!(PreferenceParams::new(1.0, 2.0, 1.0, 0.0, 0.0, NoiseSpec::NONE).is_err());
        assert!(PreferenceParams::new(0.5, 0.0, 1.0, 0.0, 0.0, NoiseSpec::NONE).is_err());
        assert!(PreferenceParams::new(0.5, 2.0, -1.0, 0.0, 0.0, NoiseSpec::NONE).is_err());
        assert!(PreferenceParams::new(-0.5, 2.0, 1.0, 0.0, 0.0, NoiseSpec::NONE).is_err());
    }

    #[test]
    fn rejects_invalid_noise() {
        let bad = NoiseSpec::IndependentNormal {
            mu_p: 0.0,
            sigma_p: -1.0,
            mu_omega: 0.0,
            sigma_omega: 1.0,
        };
        assert!(bad.validate().is_err());
        assert!(NoiseSpec::Empirical { pairs: vec![] }.validate().is_err());
    }

    #[test]
    fn config_round_trip_applies_defaults() {
        let p: PreferenceParams = serde_json::from_str(r#"{"rho": 0.5, "alpha": 2.0}"#).unwrap();
        assert_eq!(p.beta(), 1.0);
        assert_eq!(p.xi_p(), 0.0);
        assert!(p.noise().is_degenerate());
        let text = serde_json::to_string(&p).unwrap();
        let back: PreferenceParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back.rho(), 0.5);
    }

    #[test]
    fn config_rejects_unit_rho() {
        let r: std::result::Result<PreferenceParams, _> =
            serde_json::from_str(r#"{"rho": 1.0, "alpha": 2.0}"#);
        assert!(r.is_err());
    }

    #[test]
    fn beta_rescaling_composes() {
        let p = PreferenceParams::new(0.5, 2.0, 1.0, 0.3, 0.1, NoiseSpec::NONE).unwrap();
        let q = p.with_scaled_beta(3.0).unwrap();
        assert_eq!(q.beta(), 3.0);
        assert!((q.xi_p() - 0.1).abs() < 1e-16);
        assert!(p.with_scaled_beta(0.0).is_err());
    }
}
