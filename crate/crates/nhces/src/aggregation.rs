//! Sectoral expenditure shares aggregated over a continuum of households
//! whose total expenditure follows an Amoroso law whose power parameter is
//! tied to preferences by n = (rho - 1) / alpha. Under that coupling the
//! cross-household integral of each good's share is a gamma ratio times a
//! power of (1 + tilt), evaluated here in log space.

use statrs::function::gamma::ln_gamma;

use crate::closedform::ClosedFormEconomy;
use crate::distributions::{amoroso_moment, amoroso_sample, AmorosoParams};
use crate::error::{Error, Result};
use crate::numeric::{mean_and_standard_error, neumaier_sum, GaussLegendre};

/// A closed-form economy plus the cross-sectional expenditure distribution
/// Amoroso(0, k, m, (rho-1)/alpha).
#[derive(Clone, Debug)]
pub struct AggregateEconomy {
    econ: ClosedFormEconomy,
    dist: AmorosoParams,
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// The mean-expenditure approximation next to its relative deviation from the
/// exact aggregate.
#[derive(Clone, Copy, Debug)]
pub struct ApproxShare {
    pub value: f64,
    pub rel_dev_from_exact: f64,
}

impl AggregateEconomy {
    /// The power parameter of the expenditure distribution is forced to
    /// n = (rho - 1) / alpha; only scale `k` and shape `m` are free.
    pub fn new(econ: ClosedFormEconomy, k: f64, m: f64) -> Result<Self> {
        let n = (econ.params().rho() - 1.0) / econ.params().alpha();
        let dist = AmorosoParams::new(0.0, k, m, n)?;
        Ok(AggregateEconomy { econ, dist })
    }

    pub fn econ(&self) -> &ClosedFormEconomy {
        &self.econ
    }

    pub fn expenditure_dist(&self) -> &AmorosoParams {
        &self.dist
    }

    /// Tilt of the share integrand: eps * psi * k^{(rho-1)/alpha}.
    fn tilt(&self, eps_i: f64) -> f64 {
        eps_i * self.econ.psi() * self.dist.k().powf(self.dist.n())
    }

    fn log_quality_price_factor(&self, eps_i: f64, omega_i: f64, p_i: f64) -> f64 {
        let rho = self.econ.params().rho();
        eps_i * self.econ.upsilon() + (rho - 1.0) * (omega_i.ln() - p_i.ln())
    }

    /// Exact aggregate share of a good, per unit of replication mass:
    /// exp(eps Ups) (Om/p)^{rho-1} [Gamma(m+alpha)/Gamma(m)] k^{rho-1}
    /// (1 + tilt)^{-(m+alpha)}.
    pub fn aggregate_share(&self, eps_i: f64, omega_i: f64, p_i: f64) -> f64 {
        let rho = self.econ.params().rho();
        let alpha = self.econ.params().alpha();
        let m = self.dist.m();
        let ln_s = self.log_quality_price_factor(eps_i, omega_i, p_i)
            + ln_gamma(m + alpha)
            - ln_gamma(m)
            + (rho - 1.0) * self.dist.k().ln()
            - (m + alpha) * self.tilt(eps_i).ln_1p();
        ln_s.exp()
    }

    /// Mean expenditure of the cross-section; exists iff m + alpha/(rho-1)
    /// is positive.
    pub fn mean_expenditure(&self) -> Result<f64> {
        amoroso_moment(&self.dist, 1.0)
    }

    /// Same aggregate share, rewritten around the cross-sectional mean
    /// expenditure. Algebraically identical to `aggregate_share`; requires
    /// the mean to exist.
    pub fn aggregate_share_mean_form(&self, eps_i: f64, omega_i: f64, p_i: f64) -> Result<f64> {
        let rho = self.econ.params().rho();
        let alpha = self.econ.params().alpha();
        let m = self.dist.m();
        let mean = self.mean_expenditure()?;
        let ln_s = self.log_quality_price_factor(eps_i, omega_i, p_i)
            + ln_gamma(m + alpha)
            - ln_gamma(m + alpha / (rho - 1.0))
            + (rho - 2.0) * self.dist.k().ln()
            + mean.ln()
            - (m + alpha) * self.tilt(eps_i).ln_1p();
        Ok(ln_s.exp())
    }

    /// Representative-agent shortcut: the gamma ratio times k^{rho-1} is
    /// replaced by mean^{rho-1}. Reported together with its relative
    /// deviation from the exact value.
    pub fn aggregate_share_approx(&self, eps_i: f64, omega_i: f64, p_i: f64) -> Result<ApproxShare> {
        let rho = self.econ.params().rho();
        let alpha = self.econ.params().alpha();
        let m = self.dist.m();
        let mean = self.mean_expenditure()?;
        let ln_s = self.log_quality_price_factor(eps_i, omega_i, p_i)
            + (rho - 1.0) * mean.ln()
            - (m + alpha) * self.tilt(eps_i).ln_1p();
        let value = ln_s.exp();
        let exact = self.aggregate_share(eps_i, omega_i, p_i);
        Ok(ApproxShare { value, rel_dev_from_exact: (value - exact).abs() / exact })
    }

    /// Monte Carlo aggregate: household shares averaged over expenditure
    /// draws from the cross-sectional law.
    pub fn mc_aggregate_share(
        &self,
        eps_i: f64,
        omega_i: f64,
        p_i: f64,
        draws: usize,
        seed: u64,
    ) -> Result<McEstimate> {
        if draws < 2 {
            return Err(Error::InvalidParameter("need at least two draws".into()));
        }
        let expenditures = amoroso_sample(&self.dist, draws, seed);
        let shares: Vec<f64> = expenditures
            .iter()
            .map(|&e| self.econ.household_share(eps_i, omega_i, p_i, e))
            .collect();
        let (mean, std_error) = mean_and_standard_error(&shares);
        Ok(McEstimate { mean, std_error })
    }

    /// Diagnostic only: the expenditure-weighted average share
    /// sum(s_h E_h) / sum(E_h), which deliberately differs from the
    /// equally-weighted aggregate above.
    pub fn mc_expenditure_weighted_share(
        &self,
        eps_i: f64,
        omega_i: f64,
        p_i: f64,
        draws: usize,
        seed: u64,
    ) -> f64 {
        let expenditures = amoroso_sample(&self.dist, draws, seed);
        let weighted = neumaier_sum(
            expenditures.iter().map(|&e| self.econ.household_share(eps_i, omega_i, p_i, e) * e),
        );
        weighted / neumaier_sum(expenditures.iter().copied())
    }

    /// Quadrature oracle: integrates the household share against the
    /// expenditure density in the gamma variable y = (E/k)^n, where the
    /// density is Gamma(m, 1) and the integrand is smooth for either sign of
    /// n. Used to validate the closed form, so it deliberately goes through
    /// `household_share` pointwise instead of any of the share formulas.
    pub fn quadrature_aggregate_share(
        &self,
        eps_i: f64,
        omega_i: f64,
        p_i: f64,
        n_nodes: usize,
    ) -> f64 {
        let m = self.dist.m();
        let k = self.dist.k();
        let n = self.dist.n();
        // Additive margin past the quantile keeps the omitted gamma tail
        // below the 1e-8 comparison tolerance even with the polynomial
        // factor y^alpha in the integrand.
        let upper = {
            use statrs::distribution::ContinuousCDF;
            let gamma = statrs::distribution::Gamma::new(m, 1.0).expect("m > 0 validated");
            gamma.inverse_cdf(1.0 - 1e-12) + 30.0
        };
        let rule = GaussLegendre::new(n_nodes);
        let ln_norm = ln_gamma(m);
        rule.integrate(0.0, upper, |y| {
            let ln_density = (m - 1.0) * y.ln() - y - ln_norm;
            let e_h = k * y.powf(1.0 / n);
            ln_density.exp() * self.econ.household_share(eps_i, omega_i, p_i, e_h)
        })
    }
}
