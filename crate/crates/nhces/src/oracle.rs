//! Brute-force evaluation of the implicit demand system on a finite goods
//! menu. No distributional assumptions: everything is a weighted sum over the
//! menu, and the expenditure-to-utility inversion is a safeguarded Newton
//! iteration in log space. This module is the reference the analytic layers
//! are tested against.

use crate::error::{Error, Result};
use crate::grid::GoodsGrid;
use crate::numeric::{bracket_monotone, log_sum_exp, neumaier_sum, newton_bisect};

/// A solved demand point. `shares` include the replication mass (they sum to
/// one); `quantities` are per unit mass.
#[derive(Clone, Debug)]
pub struct DemandPoint {
    pub expenditure: f64,
    pub utility: f64,
    pub shares: Vec<f64>,
    pub quantities: Vec<f64>,
    /// Share-weighted mean of the income-elasticity parameters.
    pub eps_bar: f64,
}

/// Log of each good's contribution to E^{1-rho}: ln w + (1-rho)(ln p - ln
/// Omega + eps * ln u).
fn log_terms(grid: &GoodsGrid, rho: f64, ln_u: f64) -> Vec<f64> {
    let s = 1.0 - rho;
    grid.goods()
        .iter()
        .map(|g| g.weight.ln() + s * (g.price.ln() - g.omega.ln() + g.epsilon * ln_u))
        .collect()
}

/// ln E(u) from the expenditure function, evaluated with a max-shifted
/// log-sum-exp so large eps * ln u cannot overflow prematurely.
pub fn log_expenditure_of_log_utility(grid: &GoodsGrid, rho: f64, ln_u: f64) -> f64 {
    log_sum_exp(&log_terms(grid, rho, ln_u)) / (1.0 - rho)
}

/// Minimal expenditure reaching utility `u` at the menu's prices.
pub fn expenditure_of_utility(grid: &GoodsGrid, rho: f64, u: f64) -> Result<f64> {
    check_rho(rho)?;
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::InvalidParameter(format!("utility must be positive, got {u}")));
    }
    let e = log_expenditure_of_log_utility(grid, rho, u.ln()).exp();
    if e.is_finite() && e > 0.0 {
        Ok(e)
    } else {
        Err(Error::ExpenditureOverflow)
    }
}

/// Shares and their eps-average at a candidate log utility. The shares are
/// the softmax of the log terms: s_i = exp(t_i) / sum_j exp(t_j).
fn shares_at(grid: &GoodsGrid, rho: f64, ln_u: f64) -> (Vec<f64>, f64) {
    let terms = log_terms(grid, rho, ln_u);
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let unnorm: Vec<f64> = terms.iter().map(|t| (t - max).exp()).collect();
    let total = neumaier_sum(unnorm.iter().copied());
    let shares: Vec<f64> = unnorm.iter().map(|x| x / total).collect();
    let eps_bar = neumaier_sum(
        shares.iter().zip(grid.goods()).map(|(s, g)| s * g.epsilon),
    );
    (shares, eps_bar)
}

/// Inverts the expenditure function: finds u with E(u) = e. Newton in ln u
/// (the derivative of ln E with respect to ln u is the share-weighted mean of
/// eps), safeguarded by a bisection bracket, converged to |ln E - ln e| <=
/// 1e-13.
pub fn utility_of_expenditure(grid: &GoodsGrid, rho: f64, e: f64) -> Result<f64> {
    check_rho(rho)?;
    if !(e.is_finite() && e > 0.0) {
        return Err(Error::InvalidParameter(format!("expenditure must be positive, got {e}")));
    }
    let target = e.ln();
    let f = |x: f64| log_expenditure_of_log_utility(grid, rho, x) - target;
    let bracket =
        bracket_monotone(f, 0.0, 1.0, 200).ok_or(Error::InversionBracketFailure)?;
    let fd = |x: f64| {
        let terms = log_terms(grid, rho, x);
        let ln_e = log_sum_exp(&terms) / (1.0 - rho);
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let unnorm: Vec<f64> = terms.iter().map(|t| (t - max).exp()).collect();
        let total = neumaier_sum(unnorm.iter().copied());
        let eps_bar = neumaier_sum(
            unnorm.iter().zip(grid.goods()).map(|(s, g)| s * g.epsilon),
        ) / total;
        (ln_e - target, eps_bar)
    };
    let root = newton_bisect(fd, bracket, 1e-13, 200).map_err(Error::Numerical)?;
    Ok(root.x.exp())
}

/// Full demand at expenditure `e`: utility, quantities, weighted shares, and
/// the share-weighted mean income elasticity.
pub fn demand(grid: &GoodsGrid, rho: f64, e: f64) -> Result<DemandPoint> {
    let u = utility_of_expenditure(grid, rho, e)?;
    let ln_u = u.ln();
    let ln_e = e.ln();
    let quantities: Vec<f64> = grid
        .goods()
        .iter()
        .map(|g| {
            (-rho * (g.price.ln() - ln_e) + (rho - 1.0) * (g.omega.ln() - g.epsilon * ln_u)).exp()
        })
        .collect();
    let (shares, eps_bar) = shares_at(grid, rho, ln_u);
    Ok(DemandPoint { expenditure: e, utility: u, shares, quantities, eps_bar })
}

/// Expenditure elasticities of quantity by central differences in ln e.
pub fn expenditure_elasticity_fd(
    grid: &GoodsGrid,
    rho: f64,
    e: f64,
    rel_step: f64,
) -> Result<Vec<f64>> {
    if !(rel_step > 0.0 && rel_step < 1e-2) {
        return Err(Error::InvalidParameter(format!(
            "relative step must be in (0, 1e-2), got {rel_step}"
        )));
    }
    let up = demand(grid, rho, e * (1.0 + rel_step))?;
    let down = demand(grid, rho, e * (1.0 - rel_step))?;
    let dln = (1.0 + rel_step).ln() - (1.0 - rel_step).ln();
    Ok(up
        .quantities
        .iter()
        .zip(&down.quantities)
        .map(|(cu, cd)| (cu.ln() - cd.ln()) / dln)
        .collect())
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 && rho != 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "rho must be positive and different from 1, got {rho}"
        )))
    }
}
