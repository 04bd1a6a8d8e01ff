//! Intertemporal expenditure dynamics. The consumption Euler equation under
//! these preferences replaces the usual curvature parameter `theta` with the
//! effective exponent theta + (1-rho)/alpha, and a cross-section of
//! households sharing one interest-rate path drifts by a common growth
//! factor, which keeps an Amoroso expenditure law inside the family.
//!
//! Symbol note: `discount` here is the intertemporal discount factor. The
//! scale parameter of the gamma distribution of income-elasticity parameters
//! is `PreferenceParams::beta` and plays no role in this module beyond its
//! effect on the reduced constants.

use crate::closedform::ClosedFormEconomy;
use crate::distributions::{amoroso_cdf, amoroso_quantile, amoroso_sample, AmorosoParams};
use crate::error::{Error, Result};
use crate::numeric::{bracket_monotone, ks_critical_1pct, ks_statistic, newton_bisect};

/// Which governing equation the path solver steps and reports residuals for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMode {
    /// Expenditure normalized by the ideal price index; closed-form steps.
    Normalized,
    /// Raw expenditure with the utility-dependent correction term; each step
    /// is a bracketed root solve.
    Unnormalized,
}

/// A dated economy: preferences, curvature `theta`, discount factor, and an
/// interest-rate sequence covering the horizon.
#[derive(Clone, Debug)]
pub struct EulerConfig {
    econ: ClosedFormEconomy,
    theta: f64,
    discount: f64,
    rates: Vec<f64>,
    horizon: usize,
}

/// A solved expenditure path. `expenditures` and `log_utilities` have
/// horizon + 1 entries; `growth_factors` and `residuals` one per step.
#[derive(Clone, Debug)]
pub struct EulerPath {
    pub expenditures: Vec<f64>,
    pub log_utilities: Vec<f64>,
    pub growth_factors: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// One-period evolution of an expenditure cross-section, predicted in closed
/// form and replayed household by household.
#[derive(Clone, Debug)]
pub struct PanelEvolution {
    pub predicted: AmorosoParams,
    pub growth_factor: f64,
    /// Largest deviation of any household's realized growth factor from the
    /// common one.
    pub max_growth_dev: f64,
    pub ks_distance: f64,
    pub ks_critical_1pct: f64,
    /// (probability, predicted quantile, simulated quantile) rows.
    pub quantiles: Vec<(f64, f64, f64)>,
}

/// Residual of the general Euler equation in real terms:
/// (e'/e)^theta - discount (1+r) (epsbar'/epsbar)^{-1} (P'/P)^{theta-1}.
pub fn euler_residual_general(
    cfg: &EulerConfig,
    e_t: f64,
    e_next: f64,
    r: f64,
    p_t: f64,
    p_next: f64,
    epsbar_t: f64,
    epsbar_next: f64,
) -> f64 {
    (e_next / e_t).powf(cfg.theta)
        - cfg.discount * (1.0 + r) * (epsbar_t / epsbar_next) * (p_next / p_t).powf(cfg.theta - 1.0)
}

impl EulerConfig {
    pub fn new(
        econ: ClosedFormEconomy,
        theta: f64,
        discount: f64,
        rates: Vec<f64>,
        horizon: usize,
    ) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
        }
        if !(discount.is_finite() && discount > 0.0 && discount <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "discount must be in (0, 1], got {discount}"
            )));
        }
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be at least one period".into()));
        }
        if rates.len() < horizon {
            return Err(Error::InvalidParameter(format!(
                "need {horizon} interest rates, got {}",
                rates.len()
            )));
        }
        if rates.iter().any(|r| !r.is_finite() || *r <= -1.0) {
            return Err(Error::InvalidParameter("interest rates must be finite and above -1".into()));
        }
        let cfg = EulerConfig { econ, theta, discount, rates, horizon };
        if cfg.euler_exponent() < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "effective curvature theta + (1-rho)/alpha must be nonnegative, got {}",
                cfg.euler_exponent()
            )));
        }
        Ok(cfg)
    }

    pub fn econ(&self) -> &ClosedFormEconomy {
        &self.econ
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Effective curvature theta + (1-rho)/alpha governing normalized
    /// expenditure growth. Exceeds theta exactly when rho < 1.
    pub fn euler_exponent(&self) -> f64 {
        let p = self.econ.params();
        self.theta + (1.0 - p.rho()) / p.alpha()
    }

    /// One step of the normalized Euler equation:
    /// e' = e [discount (1+r)]^{1/(theta + (1-rho)/alpha)}.
    pub fn euler_step_normalized(&self, e_t: f64, r: f64) -> Result<f64> {
        check_state(e_t, r)?;
        let ex = self.euler_exponent();
        if ex == 0.0 {
            return Err(Error::DegenerateEulerExponent);
        }
        Ok(e_t * (self.discount * (1.0 + r)).powf(1.0 / ex))
    }

    /// One step of the unnormalized equation
    /// (E'/E)^{1+(1-rho)/alpha} = discount (1+r)
    ///     exp[((theta-1) psi / (1-rho)) (E^{-(1-rho)/alpha} - E'^{-(1-rho)/alpha})],
    /// solved as a bracketed root in x = ln(E'/E) on the monotone branch
    /// through the theta = 1 closed form.
    pub fn euler_step_unnormalized(&self, e_t: f64, r: f64) -> Result<f64> {
        check_state(e_t, r)?;
        let p = self.econ.params();
        let gamma = (1.0 - p.rho()) / p.alpha();
        let base = 1.0 + gamma;
        if base <= 0.0 {
            return Err(Error::DegenerateEulerExponent);
        }
        let ln_r = (self.discount * (1.0 + r)).ln();
        let c0 = (self.theta - 1.0) * self.econ.psi() * e_t.powf(-gamma) / (1.0 - p.rho());
        let g = |x: f64| base * x - ln_r - c0 * (1.0 - (-gamma * x).exp());
        let dg = |x: f64| base - c0 * gamma * (-gamma * x).exp();
        let x0 = ln_r / base;
        if dg(x0) <= 0.0 {
            return Err(Error::EulerBracketFailure(format!(
                "equation is decreasing at the starting guess x0={x0:e} \
                 (g={:e}, g'={:e}; theta={}, rho={}, alpha={}, e_t={e_t}, r={r})",
                g(x0),
                dg(x0),
                self.theta,
                p.rho(),
                p.alpha()
            )));
        }
        let bracket = bracket_monotone(g, x0, 0.25, 200).ok_or_else(|| {
            Error::EulerBracketFailure(format!(
                "no sign change around x0={x0:e} (g(x0)={:e}; theta={}, rho={}, alpha={}, \
                 e_t={e_t}, r={r})",
                g(x0),
                self.theta,
                p.rho(),
                p.alpha()
            ))
        })?;
        let root = newton_bisect(|x| (g(x), dg(x)), bracket, 1e-14, 200)
            .map_err(Error::Numerical)?;
        Ok(e_t * root.x.exp())
    }

    /// Residual of the unnormalized governing equation in levels.
    pub fn unnormalized_residual(&self, e_t: f64, e_next: f64, r: f64) -> f64 {
        let p = self.econ.params();
        let gamma = (1.0 - p.rho()) / p.alpha();
        let c = (self.theta - 1.0) * self.econ.psi() / (1.0 - p.rho());
        (e_next / e_t).powf(1.0 + gamma)
            - self.discount
                * (1.0 + r)
                * (c * (e_t.powf(-gamma) - e_next.powf(-gamma))).exp()
    }

    /// Rolls a path forward from `e0` under the configured rates, verifying
    /// the governing residual at every step.
    pub fn solve_path(&self, e0: f64, mode: PathMode) -> Result<EulerPath> {
        if !(e0.is_finite() && e0 > 0.0) {
            return Err(Error::InvalidParameter(format!("e0 must be positive, got {e0}")));
        }
        let mut expenditures = Vec::with_capacity(self.horizon + 1);
        let mut growth_factors = Vec::with_capacity(self.horizon);
        let mut residuals = Vec::with_capacity(self.horizon);
        expenditures.push(e0);
        for t in 0..self.horizon {
            let e_t = expenditures[t];
            let r = self.rates[t];
            let e_next = match mode {
                PathMode::Normalized => self.euler_step_normalized(e_t, r)?,
                PathMode::Unnormalized => self.euler_step_unnormalized(e_t, r)?,
            };
            let residual = match mode {
                PathMode::Normalized => euler_residual_general(
                    self,
                    e_t,
                    e_next,
                    r,
                    1.0,
                    1.0,
                    self.econ.eps_bar(e_t),
                    self.econ.eps_bar(e_next),
                ),
                PathMode::Unnormalized => self.unnormalized_residual(e_t, e_next, r),
            };
            if residual.abs() > 1e-10 {
                return Err(Error::Numerical(format!(
                    "step {t} residual {residual:e} exceeds 1e-10"
                )));
            }
            growth_factors.push(e_next / e_t);
            residuals.push(residual);
            expenditures.push(e_next);
        }
        let log_utilities = expenditures
            .iter()
            .map(|&e| self.econ.log_utility_of_expenditure(e))
            .collect::<Result<Vec<f64>>>()?;
        Ok(EulerPath { expenditures, log_utilities, growth_factors, residuals })
    }

    /// Closed-form one-period evolution of an Amoroso expenditure
    /// cross-section: only the scale moves, by
    /// A = [discount (1+r)]^{alpha/(alpha theta + 1 - rho)}.
    pub fn evolve_panel(&self, dist: &AmorosoParams, r: f64) -> Result<AmorosoParams> {
        if dist.l() != 0.0 {
            return Err(Error::InvalidParameter(
                "panel evolution requires a zero location parameter".into(),
            ));
        }
        let p = self.econ.params();
        let denom = p.alpha() * self.theta + 1.0 - p.rho();
        if denom <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha theta + 1 - rho must be positive, got {denom}"
            )));
        }
        let a = (self.discount * (1.0 + r)).powf(p.alpha() / denom);
        AmorosoParams::new(0.0, a * dist.k(), dist.m(), dist.n())
    }

    /// Simulates the same evolution household by household and compares it to
    /// the closed-form prediction: common growth factor, KS distance of the
    /// evolved sample against the predicted law, and quantile rows.
    pub fn evolve_panel_simulated(
        &self,
        dist: &AmorosoParams,
        r: f64,
        households: usize,
        seed: u64,
    ) -> Result<PanelEvolution> {
        if households < 100 {
            return Err(Error::InvalidParameter("need at least 100 households".into()));
        }
        let predicted = self.evolve_panel(dist, r)?;
        let p = self.econ.params();
        let denom = p.alpha() * self.theta + 1.0 - p.rho();
        let growth_factor = (self.discount * (1.0 + r)).powf(p.alpha() / denom);
        let start = amoroso_sample(dist, households, seed);
        let mut max_growth_dev: f64 = 0.0;
        let mut evolved = Vec::with_capacity(households);
        for &e in &start {
            let e_next = self.euler_step_normalized(e, r)?;
            max_growth_dev = max_growth_dev.max((e_next / e - growth_factor).abs());
            evolved.push(e_next);
        }
        evolved.sort_by(|a, b| a.partial_cmp(b).expect("sampled expenditures are finite"));
        let ks_distance = ks_statistic(&evolved, |x| amoroso_cdf(&predicted, x));
        let quantiles = [0.1, 0.25, 0.5, 0.75, 0.9]
            .into_iter()
            .map(|prob| {
                let simulated = evolved[((prob * households as f64) as usize).min(households - 1)];
                Ok((prob, amoroso_quantile(&predicted, prob)?, simulated))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PanelEvolution {
            predicted,
            growth_factor,
            max_growth_dev,
            ks_distance,
            ks_critical_1pct: ks_critical_1pct(households),
            quantiles,
        })
    }
}

fn check_state(e_t: f64, r: f64) -> Result<()> {
    if !(e_t.is_finite() && e_t > 0.0) {
        return Err(Error::InvalidParameter(format!("expenditure must be positive, got {e_t}")));
    }
    if !(r.is_finite() && r > -1.0) {
        return Err(Error::InvalidParameter(format!("interest rate must exceed -1, got {r}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{NoiseSpec, PreferenceParams};

    fn config(rho: f64, alpha: f64, theta: f64, discount: f64, rate: f64) -> EulerConfig {
        let p = PreferenceParams::new(rho, alpha, 1.0, 0.0, 0.0, NoiseSpec::NONE).unwrap();
        let econ = ClosedFormEconomy::new(p).unwrap();
        EulerConfig::new(econ, theta, discount, vec![rate; 64], 64).unwrap()
    }

    #[test]
    fn effective_curvature_examples() {
        let c = config(0.5, 2.0, 1.0, 0.9, 0.02);
        assert!((c.euler_exponent() - 1.25).abs() < 1e-15);
        // Exceeds theta iff rho < 1.
        assert!(c.euler_exponent() > c.theta());
        let d = config(2.0, 2.0, 1.0, 0.9, 0.02);
        assert!(d.euler_exponent() < d.theta());
    }

    #[test]
    fn fixed_point_when_discount_offsets_interest() {
        // 0.8 * 1.25 is exactly 1 in binary floating point.
        let c = config(0.5, 2.0, 2.0, 0.8, 0.25);
        let e = c.euler_step_normalized(1.7, 0.25).unwrap();
        assert!((e - 1.7).abs() < 1e-15);
        let path = c.solve_path(1.7, PathMode::Normalized).unwrap();
        for e_t in path.expenditures {
            assert!((e_t - 1.7).abs() < 1e-12);
        }
    }

    #[test]
    fn doubling_return_grows_expenditure_by_two_to_the_0_8() {
        let c = config(0.5, 2.0, 1.0, 1.0, 1.0);
        let e = c.euler_step_normalized(1.0, 1.0).unwrap();
        assert!((e - 2.0f64.powf(0.8)).abs() < 1e-12);
        assert!((e - 1.7411011265922482).abs() < 1e-12);
    }

    #[test]
    fn log_expenditure_path_is_affine_under_constant_rates() {
        let c = config(0.5, 2.0, 1.0, 1.0, 1.0);
        let path = c.solve_path(0.5, PathMode::Normalized).unwrap();
        let slope = 2.0f64.ln() * 0.8;
        for w in path.expenditures.windows(2) {
            assert!(((w[1].ln() - w[0].ln()) - slope).abs() < 1e-12);
        }
        for res in path.residuals {
            assert!(res.abs() < 1e-10);
        }
    }

    #[test]
    fn zero_effective_curvature_is_rejected_at_the_step() {
        // rho = 2, alpha = 1, theta = 1: exponent is exactly zero. The
        // config is representable; stepping it is not.
        let c = config(2.0, 1.0, 1.0, 0.9, 0.02);
        assert_eq!(c.euler_exponent(), 0.0);
        assert!(matches!(
            c.euler_step_normalized(1.0, 0.02),
            Err(Error::DegenerateEulerExponent)
        ));
        let bad = PreferenceParams::new(3.0, 1.0, 1.0, 0.0, 0.0, NoiseSpec::NONE).unwrap();
        let econ = ClosedFormEconomy::new(bad).unwrap();
        assert!(EulerConfig::new(econ, 1.0, 0.9, vec![0.02], 1).is_err());
    }

    #[test]
    fn unnormalized_collapses_to_normalized_at_unit_theta() {
        let c = config(0.5, 2.0, 1.0, 1.0, 0.1);
        let a = c.euler_step_normalized(1.3, 0.1).unwrap();
        let b = c.euler_step_unnormalized(1.3, 0.1).unwrap();
        assert!((a - b).abs() < 1e-12 * a, "{a} vs {b}");
    }

    #[test]
    fn unnormalized_fixed_point() {
        let c = config(0.5, 2.0, 2.0, 0.8, 0.25);
        let e = c.euler_step_unnormalized(1.0, 0.25).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_step_matches_standalone_bisection() {
        // theta = 2, rho = 0.5, alpha = 2, psi = 1, e_t = 1, R = 1.1.
        // Reference: bisect the level equation
        // E^1.25 = 1.1 exp[2 (1 - E^{-0.25})] directly.
        let c = config(0.5, 2.0, 2.0, 1.0, 0.1);
        let f = |e: f64| e.powf(1.25) - 1.1 * (2.0 * (1.0 - e.powf(-0.25))).exp();
        let (mut lo, mut hi) = (1.0, 1.2);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let reference = 0.5 * (lo + hi);
        let e = c.euler_step_unnormalized(1.0, 0.1).unwrap();
        assert!((e - reference).abs() < 1e-10, "{e} vs {reference}");
        assert!(c.unnormalized_residual(1.0, e, 0.1).abs() < 1e-10);
    }

    #[test]
    fn unnormalized_path_keeps_residuals_small() {
        let c = config(0.5, 2.0, 2.0, 1.0, 0.1);
        let path = c.solve_path(1.0, PathMode::Unnormalized).unwrap();
        assert_eq!(path.expenditures.len(), 65);
        for res in path.residuals {
            assert!(res.abs() < 1e-10);
        }
        // Positive return with unit discount keeps expenditure growing.
        for w in path.expenditures.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn general_residual_vanishes_on_normalized_paths() {
        let c = config(0.5, 2.0, 1.5, 0.97, 0.03);
        let path = c.solve_path(2.0, PathMode::Normalized).unwrap();
        for t in 0..c.horizon() {
            let res = euler_residual_general(
                &c,
                path.expenditures[t],
                path.expenditures[t + 1],
                0.03,
                1.0,
                1.0,
                c.econ().eps_bar(path.expenditures[t]),
                c.econ().eps_bar(path.expenditures[t + 1]),
            );
            assert!(res.abs() < 1e-10);
        }
    }

    #[test]
    fn panel_scale_moves_by_the_common_growth_factor() {
        let c = config(0.5, 2.0, 1.0, 1.0, 1.0);
        let dist = AmorosoParams::new(0.0, 1.0, 2.0, -0.25).unwrap();
        let next = c.evolve_panel(&dist, 1.0).unwrap();
        assert!((next.k() - 2.0f64.powf(0.8)).abs() < 1e-12);
        assert_eq!(next.m(), 2.0);
        assert_eq!(next.n(), -0.25);
    }

    #[test]
    fn simulated_panel_matches_the_prediction() {
        let c = config(0.5, 2.0, 1.0, 1.0, 1.0);
        let dist = AmorosoParams::new(0.0, 1.0, 2.0, -0.25).unwrap();
        let panel = c.evolve_panel_simulated(&dist, 1.0, 20_000, 61).unwrap();
        assert!(panel.max_growth_dev < 1e-12, "{}", panel.max_growth_dev);
        assert!(
            panel.ks_distance < panel.ks_critical_1pct,
            "D={} crit={}",
            panel.ks_distance,
            panel.ks_critical_1pct
        );
        for (prob, predicted, simulated) in panel.quantiles {
            let rel = (simulated / predicted - 1.0).abs();
            assert!(rel < 0.1, "quantile {prob}: {simulated} vs {predicted}");
        }
    }

    #[test]
    fn configuration_validation() {
        let p = PreferenceParams::new(0.5, 2.0, 1.0, 0.0, 0.0, NoiseSpec::NONE).unwrap();
        let econ = ClosedFormEconomy::new(p).unwrap();
        assert!(EulerConfig::new(econ.clone(), 1.0, 0.9, vec![0.02; 3], 5).is_err());
        assert!(EulerConfig::new(econ.clone(), 1.0, 1.5, vec![0.02; 5], 5).is_err());
        assert!(EulerConfig::new(econ.clone(), -1.0, 0.9, vec![0.02; 5], 5).is_err());
        assert!(EulerConfig::new(econ.clone(), 1.0, 0.9, vec![-2.0; 5], 5).is_err());
        assert!(EulerConfig::new(econ, 1.0, 0.9, vec![0.02; 5], 5).is_ok());
    }
}
