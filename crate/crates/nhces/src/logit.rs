//! Discrete-choice representation of the demand system: with scale parameter
//! mu = -1/(1-rho) and systematic utilities built from log quality, the log
//! price relative to the ideal index, and real expenditure, multinomial logit
//! choice probabilities coincide with the budget shares. In the substitutes
//! case mu > 0 the probabilities can also be simulated with Gumbel taste
//! shocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Open01;

use crate::error::{Error, Result};
use crate::grid::GoodsGrid;
use crate::numeric::neumaier_sum;
use crate::oracle;

/// A goods menu frozen at one expenditure level, with the ideal price index
/// solved from the oracle.
#[derive(Clone, Debug)]
pub struct LogitEconomy {
    goods: GoodsGrid,
    rho: f64,
    expenditure: f64,
    price_index: f64,
}

/// Budget shares computed three ways: softmax of the discrete-choice scores,
/// the direct share formula in the price index, and the brute-force oracle.
#[derive(Clone, Debug)]
pub struct ShareEquivalenceReport {
    pub choice_probabilities: Vec<f64>,
    pub formula_shares: Vec<f64>,
    pub oracle_shares: Vec<f64>,
    pub max_dev_probabilities_vs_formula: f64,
    pub max_dev_formula_vs_oracle: f64,
}

/// Expenditure per util at utility `u`: E(u)/u.
pub fn ideal_price_index(grid: &GoodsGrid, rho: f64, u: f64) -> Result<f64> {
    Ok(oracle::expenditure_of_utility(grid, rho, u)? / u)
}

/// Standard Gumbel draws via the inverse CDF -ln(-ln U), U uniform on (0,1).
pub fn sample_standard_gumbel(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u: f64 = rng.sample(Open01);
            -(-u.ln()).ln()
        })
        .collect()
}

impl LogitEconomy {
    /// Solves the menu at expenditure `e` and freezes the implied price
    /// index.
    pub fn new(goods: GoodsGrid, rho: f64, expenditure: f64) -> Result<Self> {
        let u = oracle::utility_of_expenditure(&goods, rho, expenditure)?;
        let price_index = expenditure / u;
        LogitEconomy::with_price_index(goods, rho, expenditure, price_index)
    }

    /// Same structure with an externally supplied price index. The
    /// equivalence with oracle shares only holds for the solved index; this
    /// constructor exists for comparative statics on the score structure.
    pub fn with_price_index(
        goods: GoodsGrid,
        rho: f64,
        expenditure: f64,
        price_index: f64,
    ) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) || rho == 1.0 {
            return Err(Error::InvalidParameter(format!(
                "rho must be positive and different from 1, got {rho}"
            )));
        }
        if !(expenditure.is_finite() && expenditure > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "expenditure must be positive, got {expenditure}"
            )));
        }
        if !(price_index.is_finite() && price_index > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "price index must be positive, got {price_index}"
            )));
        }
        Ok(LogitEconomy { goods, rho, expenditure, price_index })
    }

    pub fn goods(&self) -> &GoodsGrid {
        &self.goods
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn expenditure(&self) -> f64 {
        self.expenditure
    }

    pub fn price_index(&self) -> f64 {
        self.price_index
    }

    /// Logit scale mu = -1/(1-rho); positive exactly in the substitutes
    /// case.
    pub fn mu(&self) -> f64 {
        -1.0 / (1.0 - self.rho)
    }

    /// Implied utility level E/p.
    pub fn utility(&self) -> f64 {
        self.expenditure / self.price_index
    }

    /// Discrete-choice scores ln w_i + V_i / mu, where the systematic
    /// utility is V_i = ln Omega_i + (1 - eps_i) ln(E/p) - ln(p_i/p).
    /// Replication mass enters as a log offset on the logit scale.
    fn scores(&self) -> Vec<f64> {
        let mu = self.mu();
        let ln_real = (self.expenditure / self.price_index).ln();
        self.goods
            .goods()
            .iter()
            .map(|g| {
                let v = g.omega.ln() + (1.0 - g.epsilon) * ln_real
                    - (g.price.ln() - self.price_index.ln());
                g.weight.ln() + v / mu
            })
            .collect()
    }

    /// Softmax of the scores: the probability that a household picks each
    /// good. Sums to one after normalization.
    pub fn choice_probabilities(&self) -> Vec<f64> {
        let scores = self.scores();
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let unnorm: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let total = neumaier_sum(unnorm.iter().copied());
        unnorm.into_iter().map(|x| x / total).collect()
    }

    /// The share formula in the price index, without softmax normalization:
    /// w_i (Omega_i^{-1} p_i / p)^{1-rho} (E/p)^{(eps_i - 1)(1-rho)}.
    pub fn shares_from_price_index(&self) -> Vec<f64> {
        let s = 1.0 - self.rho;
        let ln_real = (self.expenditure / self.price_index).ln();
        self.goods
            .goods()
            .iter()
            .map(|g| {
                let ln_share = g.weight.ln()
                    + s * (g.price.ln() - g.omega.ln() - self.price_index.ln())
                    + (g.epsilon - 1.0) * s * ln_real;
                ln_share.exp()
            })
            .collect()
    }

    /// Simulates `households` independent choices by adding standard Gumbel
    /// shocks to the scores and taking the argmax. Requires mu > 0.
    pub fn simulate_choices(&self, households: usize, seed: u64) -> Result<Vec<u64>> {
        if self.mu() <= 0.0 {
            return Err(Error::SimulationRequiresSubstitutes);
        }
        if households == 0 {
            return Err(Error::InvalidParameter("need at least one household".into()));
        }
        let scores = self.scores();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0u64; scores.len()];
        for _ in 0..households {
            let mut best = f64::NEG_INFINITY;
            let mut pick = 0;
            for (i, &b) in scores.iter().enumerate() {
                let u: f64 = rng.sample(Open01);
                let gumbel = -(-u.ln()).ln();
                let total = b + gumbel;
                if total > best {
                    best = total;
                    pick = i;
                }
            }
            counts[pick] += 1;
        }
        Ok(counts)
    }

    /// All three share routes side by side with their maximum pairwise
    /// deviations.
    pub fn share_equivalence_report(&self) -> Result<ShareEquivalenceReport> {
        let choice_probabilities = self.choice_probabilities();
        let formula_shares = self.shares_from_price_index();
        let oracle_shares = oracle::demand(&self.goods, self.rho, self.expenditure)?.shares;
        let max_dev_probabilities_vs_formula = choice_probabilities
            .iter()
            .zip(&formula_shares)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let max_dev_formula_vs_oracle = formula_shares
            .iter()
            .zip(&oracle_shares)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok(ShareEquivalenceReport {
            choice_probabilities,
            formula_shares,
            oracle_shares,
            max_dev_probabilities_vs_formula,
            max_dev_formula_vs_oracle,
        })
    }
}
