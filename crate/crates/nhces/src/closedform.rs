//! Exact expenditure/utility mapping for gamma-distributed income-elasticity
//! parameters with log-linear price and quality loadings. Everything here is
//! a smooth function of two reduced constants: an intercept `upsilon` and a
//! slope `psi` multiplying a power of expenditure.

use crate::error::{Error, Result};
use crate::grid::sample_goods_grid;
use crate::oracle;
use crate::params::{compute_m, PreferenceParams};

/// The reduced-form economy: preferences plus the two constants of the
/// mapping ln U = [upsilon - psi * E^{-(1-rho)/alpha}] / (1 - rho), where
/// upsilon = 1/beta - (1-rho)(xi_p - xi_omega) and psi = M^{1/alpha} / beta.
#[derive(Clone, Debug)]
pub struct ClosedFormEconomy {
    params: PreferenceParams,
    m_const: f64,
    upsilon: f64,
    psi: f64,
}

impl ClosedFormEconomy {
    pub fn new(params: PreferenceParams) -> Result<Self> {
        let m_const = compute_m(params.noise(), params.rho())?;
        let upsilon = 1.0 / params.beta()
            - (1.0 - params.rho()) * (params.xi_p() - params.xi_omega());
        let psi = m_const.powf(1.0 / params.alpha()) / params.beta();
        if !(upsilon.is_finite() && psi.is_finite() && psi > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "reduced constants are not finite: upsilon={upsilon}, psi={psi}"
            )));
        }
        Ok(ClosedFormEconomy { params, m_const, upsilon, psi })
    }

    pub fn params(&self) -> &PreferenceParams {
        &self.params
    }

    pub fn m_const(&self) -> f64 {
        self.m_const
    }

    pub fn upsilon(&self) -> f64 {
        self.upsilon
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    /// ln U(E). Defined for every positive expenditure.
    pub fn log_utility_of_expenditure(&self, e: f64) -> Result<f64> {
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::InvalidParameter(format!("expenditure must be positive, got {e}")));
        }
        let rho = self.params.rho();
        let tail = self.psi * e.powf(-(1.0 - rho) / self.params.alpha());
        Ok((self.upsilon - tail) / (1.0 - rho))
    }

    /// E(ln U), the inverse mapping. Only log utilities with
    /// upsilon - (1-rho) ln U > 0 are attainable.
    pub fn expenditure_of_log_utility(&self, ln_u: f64) -> Result<f64> {
        if !ln_u.is_finite() {
            return Err(Error::InvalidParameter(format!("ln U must be finite, got {ln_u}")));
        }
        let rho = self.params.rho();
        let slack = self.upsilon - (1.0 - rho) * ln_u;
        if slack <= 0.0 {
            return Err(Error::UtilityOutsideAttainableRange);
        }
        let e = (slack / self.psi).powf(-self.params.alpha() / (1.0 - rho));
        if e.is_finite() && e > 0.0 {
            Ok(e)
        } else {
            Err(Error::ExpenditureOverflow)
        }
    }

    pub fn utility_of_expenditure(&self, e: f64) -> Result<f64> {
        Ok(self.log_utility_of_expenditure(e)?.exp())
    }

    pub fn expenditure_of_utility(&self, u: f64) -> Result<f64> {
        if !(u.is_finite() && u > 0.0) {
            return Err(Error::InvalidParameter(format!("utility must be positive, got {u}")));
        }
        self.expenditure_of_log_utility(u.ln())
    }

    /// Share-weighted mean income elasticity parameter at expenditure `e`:
    /// eps_bar = (alpha/psi) E^{(1-rho)/alpha}. Also the inverse slope
    /// d ln E / d ln U of the mapping.
    pub fn eps_bar(&self, e: f64) -> f64 {
        let rho = self.params.rho();
        (self.params.alpha() / self.psi) * e.powf((1.0 - rho) / self.params.alpha())
    }

    /// Expenditure elasticity of demand for a good with parameter `eps_i`:
    /// eta = rho + (1 - rho) eps_i / eps_bar(E). Equals one exactly at
    /// eps_i = eps_bar, so Engel aggregation holds by construction.
    pub fn expenditure_elasticity(&self, eps_i: f64, e: f64) -> f64 {
        let rho = self.params.rho();
        rho + (1.0 - rho) * eps_i / self.eps_bar(e)
    }

    /// Expenditure level at which a good's elasticity changes sign. Exists
    /// only in the substitutes case rho > 1; requires eps_i > 0.
    pub fn elasticity_sign_threshold(&self, eps_i: f64) -> Option<f64> {
        let rho = self.params.rho();
        if rho < 1.0 {
            return None;
        }
        assert!(eps_i > 0.0, "threshold is defined for eps_i > 0");
        let base = ((rho - 1.0) / rho) * (self.psi / self.params.alpha()) * eps_i;
        Some(base.powf(self.params.alpha() / (1.0 - rho)))
    }

    /// Budget-share density of a good (eps_i, omega_i, p_i) at expenditure
    /// `e`, per unit of replication mass:
    /// s = exp(eps_i upsilon) (omega_i/p_i)^{rho-1} e^{rho-1}
    ///     exp(-eps_i psi e^{(rho-1)/alpha}).
    pub fn household_share(&self, eps_i: f64, omega_i: f64, p_i: f64, e: f64) -> f64 {
        let rho = self.params.rho();
        let ln_s = eps_i * self.upsilon + (rho - 1.0) * (omega_i.ln() - p_i.ln() + e.ln())
            - eps_i * self.psi * e.powf((rho - 1.0) / self.params.alpha());
        ln_s.exp()
    }
}

/// Quantifies that rescaling (beta, xi) -> (c beta, xi/c) relabels the
/// income-elasticity axis without changing observable demand. Draws a menu,
/// applies the relabeling eps -> c eps to the same draws, and compares
/// quantities, shares, and closed-form elasticities at every requested
/// expenditure.
#[derive(Clone, Debug)]
pub struct BetaInvarianceReport {
    pub scale: f64,
    pub expenditures: Vec<f64>,
    pub max_quantity_dev: f64,
    pub max_share_dev: f64,
    pub max_elasticity_dev: f64,
}

impl BetaInvarianceReport {
    pub fn within(&self, demand_tol: f64, elasticity_tol: f64) -> bool {
        self.max_quantity_dev <= demand_tol
            && self.max_share_dev <= demand_tol
            && self.max_elasticity_dev <= elasticity_tol
    }
}

pub fn beta_invariance_check(
    params: &PreferenceParams,
    scale: f64,
    grid_seed: u64,
    n_goods: usize,
    expenditures: &[f64],
) -> Result<BetaInvarianceReport> {
    let scaled = params.with_scaled_beta(scale)?;
    let grid_a = sample_goods_grid(params, n_goods, grid_seed)?;
    // The same menu under the relabeled parametrization: eps multiplies by
    // the scale, prices and qualities are unchanged by construction.
    let grid_b = crate::grid::GoodsGrid::new(
        grid_a
            .goods()
            .iter()
            .map(|g| crate::grid::Good { epsilon: g.epsilon * scale, ..*g })
            .collect(),
    )?;
    let econ_a = ClosedFormEconomy::new(params.clone())?;
    let econ_b = ClosedFormEconomy::new(scaled)?;
    let rho = params.rho();
    let mut max_quantity_dev: f64 = 0.0;
    let mut max_share_dev: f64 = 0.0;
    let mut max_elasticity_dev: f64 = 0.0;
    for &e in expenditures {
        let a = oracle::demand(&grid_a, rho, e)?;
        let b = oracle::demand(&grid_b, rho, e)?;
        for (qa, qb) in a.quantities.iter().zip(&b.quantities) {
            max_quantity_dev = max_quantity_dev.max((qb / qa - 1.0).abs());
        }
        for (sa, sb) in a.shares.iter().zip(&b.shares) {
            max_share_dev = max_share_dev.max((sb / sa - 1.0).abs());
        }
        for g in grid_a.goods().iter().take(16) {
            let eta_a = econ_a.expenditure_elasticity(g.epsilon, e);
            let eta_b = econ_b.expenditure_elasticity(g.epsilon * scale, e);
            max_elasticity_dev = max_elasticity_dev.max((eta_b - eta_a).abs());
        }
    }
    Ok(BetaInvarianceReport {
        scale,
        expenditures: expenditures.to_vec(),
        max_quantity_dev,
        max_share_dev,
        max_elasticity_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::quadrature_goods_grid;
    use crate::params::NoiseSpec;
    use proptest::prelude::*;

    fn econ(rho: f64, alpha: f64, xi_p: f64, xi_omega: f64) -> ClosedFormEconomy {
        let p = PreferenceParams::new(rho, alpha, 1.0, xi_p, xi_omega, NoiseSpec::NONE).unwrap();
        ClosedFormEconomy::new(p).unwrap()
    }

    #[test]
    fn reduced_constants_without_loadings() {
        let c = econ(0.5, 2.0, 0.0, 0.0);
        assert_eq!(c.m_const(), 1.0);
        assert_eq!(c.upsilon(), 1.0);
        assert_eq!(c.psi(), 1.0);
        // With upsilon = psi = 1 the mapping pins ln U(1) = 0.
        assert_eq!(c.log_utility_of_expenditure(1.0).unwrap(), 0.0);
    }

    #[test]
    fn utility_saturates_in_the_complements_case() {
        let c = econ(0.5, 2.0, 0.0, 0.0);
        let limit = c.upsilon() / (1.0 - 0.5);
        let mid = c.log_utility_of_expenditure(1e6).unwrap();
        let far = c.log_utility_of_expenditure(1e12).unwrap();
        assert!(mid < far && far < limit);
        assert!(limit - far < 1e-2);
    }

    #[test]
    fn mapping_round_trips() {
        for (rho, alpha) in [(0.5, 2.0), (2.0, 1.0), (0.25, 0.7), (3.0, 2.5)] {
            let c = econ(rho, alpha, 0.3, 0.1);
            for e in [0.1, 0.5, 1.0, 2.0, 10.0] {
                let ln_u = c.log_utility_of_expenditure(e).unwrap();
                let back = c.expenditure_of_log_utility(ln_u).unwrap();
                assert!(
                    (back - e).abs() < 1e-12 * e,
                    "rho={rho}, alpha={alpha}, e={e}: {back}"
                );
            }
        }
    }

    #[test]
    fn unattainable_utilities_are_rejected() {
        let c = econ(0.5, 2.0, 0.0, 0.0);
        let limit = c.upsilon() / (1.0 - 0.5);
        assert!(matches!(
            c.expenditure_of_log_utility(limit + 0.1),
            Err(Error::UtilityOutsideAttainableRange)
        ));
        // Substitutes case: utilities at or below -upsilon/(rho-1) are
        // unattainable instead.
        let d = econ(2.0, 1.0, 0.0, 0.0);
        assert!(matches!(
            d.expenditure_of_log_utility(-d.upsilon() - 0.1),
            Err(Error::UtilityOutsideAttainableRange)
        ));
        assert!(d.expenditure_of_log_utility(-d.upsilon() + 0.1).is_ok());
    }

    #[test]
    fn matches_oracle_on_quadrature_grids() {
        for (rho, alpha) in [(0.5, 2.0), (2.0, 1.0)] {
            let p = PreferenceParams::new(rho, alpha, 1.0, 0.3, 0.1, NoiseSpec::NONE).unwrap();
            let grid = quadrature_goods_grid(&p, 2000).unwrap();
            let c = ClosedFormEconomy::new(p).unwrap();
            for e in [0.25, 1.0, 4.0] {
                let ln_u_oracle = crate::oracle::utility_of_expenditure(&grid, rho, e)
                    .unwrap()
                    .ln();
                let ln_u_closed = c.log_utility_of_expenditure(e).unwrap();
                assert!(
                    (ln_u_oracle - ln_u_closed).abs() < 1e-6,
                    "rho={rho}, alpha={alpha}, e={e}: {ln_u_oracle} vs {ln_u_closed}"
                );
            }
        }
    }

    #[test]
    fn eps_bar_level_and_slope_agree() {
        let c = econ(0.5, 1.0, 0.0, 0.0);
        // psi = 1, alpha = 1, rho = 0.5: eps_bar(4) = 4^{1/2} = 2.
        assert!((c.eps_bar(4.0) - 2.0).abs() < 1e-14);
        // eps_bar is also d ln E / d ln U; check by differencing.
        let h = 1e-6;
        let e = 4.0;
        let ln_u = c.log_utility_of_expenditure(e).unwrap();
        let e_up = c.expenditure_of_log_utility(ln_u + h).unwrap();
        let e_dn = c.expenditure_of_log_utility(ln_u - h).unwrap();
        let slope = (e_up.ln() - e_dn.ln()) / (2.0 * h);
        assert!((slope - c.eps_bar(e)).abs() < 1e-6, "{slope}");
    }

    #[test]
    fn elasticity_special_values() {
        let c = econ(0.5, 2.0, 0.3, 0.1);
        for e in [0.5, 1.0, 2.0] {
            let eb = c.eps_bar(e);
            assert!((c.expenditure_elasticity(eb, e) - 1.0).abs() < 1e-14);
            assert!((c.expenditure_elasticity(0.0, e) - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn sign_threshold_in_the_substitutes_case() {
        let c = econ(2.0, 1.0, 0.0, 0.0);
        // rho = 2, alpha = 1, psi = 1, eps = 1: threshold at E = 2.
        let e_star = c.elasticity_sign_threshold(1.0).unwrap();
        assert!((e_star - 2.0).abs() < 1e-12);
        assert!(c.expenditure_elasticity(1.0, e_star).abs() < 1e-12);
        assert!(c.expenditure_elasticity(1.0, 0.9 * e_star) > 0.0);
        assert!(c.expenditure_elasticity(1.0, 1.1 * e_star) < 0.0);
    }

    #[test]
    fn no_sign_threshold_in_the_complements_case() {
        let c = econ(0.5, 2.0, 0.0, 0.0);
        assert!(c.elasticity_sign_threshold(1.0).is_none());
    }

    #[test]
    fn household_share_unit_case() {
        // upsilon = psi = 1, rho = 0.5, alpha = 1, eps = omega = p = e = 1:
        // the exp(eps*upsilon) factor exactly cancels the tilt exp(-1).
        let c = econ(0.5, 1.0, 0.0, 0.0);
        assert!((c.household_share(1.0, 1.0, 1.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn household_shares_integrate_to_one_on_a_grid() {
        let p = PreferenceParams::new(0.5, 2.0, 1.0, 0.3, 0.1, NoiseSpec::NONE).unwrap();
        let grid = quadrature_goods_grid(&p, 2000).unwrap();
        let c = ClosedFormEconomy::new(p).unwrap();
        for e in [0.5, 1.0, 2.0] {
            let total = grid.weighted_mean(|g| c.household_share(g.epsilon, g.omega, g.price, e));
            assert!((total - 1.0).abs() < 1e-5, "e={e}: {total}");
        }
    }

    #[test]
    fn identity_rescaling_changes_nothing() {
        let p = PreferenceParams::new(0.5, 2.0, 1.0, 0.3, 0.1, NoiseSpec::NONE).unwrap();
        let r = beta_invariance_check(&p, 1.0, 7, 100, &[0.5, 2.0]).unwrap();
        assert_eq!(r.max_quantity_dev, 0.0);
        assert_eq!(r.max_share_dev, 0.0);
        assert_eq!(r.max_elasticity_dev, 0.0);
    }

    #[test]
    fn beta_rescaling_is_invisible_in_demand() {
        let p = PreferenceParams::new(0.5, 2.0, 1.0, 0.3, 0.1, NoiseSpec::NONE).unwrap();
        let r = beta_invariance_check(&p, 3.0, 7, 400, &[0.5, 2.0]).unwrap();
        assert!(r.within(1e-9, 1e-12), "{r:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn round_trip_everywhere(
            rho in prop_oneof![0.2f64..0.9, 1.1f64..4.0],
            alpha in 0.3f64..3.0,
            xi in -0.3f64..0.5,
            e in 0.01f64..100.0,
        ) {
            let c = econ(rho, alpha, xi, 0.0);
            let ln_u = c.log_utility_of_expenditure(e).unwrap();
            let back = c.expenditure_of_log_utility(ln_u).unwrap();
            prop_assert!((back - e).abs() < 1e-11 * e);
            // The forward image always satisfies the validity condition.
            prop_assert!(c.upsilon() - (1.0 - rho) * ln_u > 0.0);
        }
    }
}
