use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma as GammaDraw, Normal};
use statrs::distribution::{ContinuousCDF, Gamma as GammaDist};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numeric::{neumaier_sum, GaussLegendre};
use crate::params::{NoiseSpec, PreferenceParams};

/// One good: income-elasticity parameter, quality shifter, price, and
/// replication mass.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Good {
    pub epsilon: f64,
    pub omega: f64,
    pub price: f64,
    pub weight: f64,
}

/// A finite menu of goods whose weights sum to one.
#[derive(Clone, Debug)]
pub struct GoodsGrid {
    goods: Vec<Good>,
}

impl GoodsGrid {
    pub fn new(goods: Vec<Good>) -> Result<Self> {
        if goods.is_empty() {
            return Err(Error::InvalidParameter("grid needs at least one good".into()));
        }
        for (i, g) in goods.iter().enumerate() {
            let ok = g.epsilon.is_finite()
                && g.epsilon >= 0.0
                && g.omega.is_finite()
                && g.omega > 0.0
                && g.price.is_finite()
                && g.price > 0.0
                && g.weight.is_finite()
                && g.weight > 0.0;
            if !ok {
                return Err(Error::InvalidParameter(format!("good {i} is invalid: {g:?}")));
            }
        }
        let total = neumaier_sum(goods.iter().map(|g| g.weight));
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}, expected 1")));
        }
        Ok(GoodsGrid { goods })
    }

    pub fn goods(&self) -> &[Good] {
        &self.goods
    }

    pub fn len(&self) -> usize {
        self.goods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goods.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        neumaier_sum(self.goods.iter().map(|g| g.weight))
    }

    /// Weighted mean of an arbitrary per-good statistic.
    pub fn weighted_mean<F: FnMut(&Good) -> f64>(&self, mut f: F) -> f64 {
        neumaier_sum(self.goods.iter().map(|g| g.weight * f(g)))
    }

    /// Same menu with every quality shifter multiplied by `c`.
    pub fn scale_omegas(&self, c: f64) -> Result<GoodsGrid> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {c}")));
        }
        GoodsGrid::new(
            self.goods.iter().map(|g| Good { omega: g.omega * c, ..*g }).collect(),
        )
    }
}

/// Draws an i.i.d. menu: epsilon from Gamma(alpha, beta), disturbances from
/// the noise law, prices and qualities from the loadings. Per good the draw
/// order is epsilon, then (nu_p, nu_omega). Equal weights 1/n.
pub fn sample_goods_grid(params: &PreferenceParams, n_goods: usize, seed: u64) -> Result<GoodsGrid> {
    if n_goods == 0 {
        return Err(Error::InvalidParameter("n_goods must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = GammaDraw::new(params.alpha(), params.beta())
        .map_err(|e| Error::InvalidParameter(format!("gamma draw setup failed: {e}")))?;
    let normals = match params.noise() {
        NoiseSpec::IndependentNormal { mu_p, sigma_p, mu_omega, sigma_omega } => Some((
            Normal::new(*mu_p, *sigma_p)
                .map_err(|e| Error::InvalidParameter(format!("normal setup failed: {e}")))?,
            Normal::new(*mu_omega, *sigma_omega)
                .map_err(|e| Error::InvalidParameter(format!("normal setup failed: {e}")))?,
        )),
        _ => None,
    };
    let weight = 1.0 / n_goods as f64;
    let mut goods = Vec::with_capacity(n_goods);
    for _ in 0..n_goods {
        let eps = gamma.sample(&mut rng);
        let (nu_p, nu_omega) = match params.noise() {
            NoiseSpec::Degenerate { nu_p, nu_omega } => (*nu_p, *nu_omega),
            NoiseSpec::IndependentNormal { .. } => {
                let (np, nw) = normals.as_ref().expect("normals prepared above");
                (np.sample(&mut rng), nw.sample(&mut rng))
            }
            NoiseSpec::Empirical { pairs } => pairs[rng.random_range(0..pairs.len())],
        };
        goods.push(Good {
            epsilon: eps,
            omega: (params.xi_omega() * eps + nu_omega).exp(),
            price: (params.xi_p() * eps + nu_p).exp(),
            weight,
        });
    }
    GoodsGrid::new(goods)
}

/// Deterministic Gauss-Legendre discretization of the Gamma(alpha, beta) law
/// of epsilon, for degenerate noise only. Weights are the quadrature weights
/// times the gamma density, renormalized to sum to one.
///
/// The grid exists to integrate gamma-weighted integrands carrying an
/// exponential tilt in epsilon (expenditure aggregates at large utility tilt
/// hardest). Truncating at a quantile of the tilted envelope Gamma(alpha,
/// 3*beta) rather than of Gamma(alpha, beta) itself keeps the omitted tail
/// below discretization error for every tilt the validity region admits.
pub fn quadrature_goods_grid(params: &PreferenceParams, n_nodes: usize) -> Result<GoodsGrid> {
    if n_nodes < 2 {
        return Err(Error::InvalidParameter("need at least two quadrature nodes".into()));
    }
    let (nu_p, nu_omega) = match params.noise() {
        NoiseSpec::Degenerate { nu_p, nu_omega } => (*nu_p, *nu_omega),
        _ => return Err(Error::QuadratureRequiresDegenerateNoise),
    };
    let alpha = params.alpha();
    let beta = params.beta();
    let envelope = GammaDist::new(alpha, 1.0 / (3.0 * beta))
        .map_err(|e| Error::InvalidParameter(format!("gamma setup failed: {e}")))?;
    let upper = envelope.inverse_cdf(1.0 - 1e-10);
    let rule = GaussLegendre::new(n_nodes);
    let ln_norm = ln_gamma(alpha) + alpha * beta.ln();
    let points = rule.mapped(0.0, upper);
    let raw: Vec<(f64, f64)> = points
        .iter()
        .map(|&(eps, w)| {
            let ln_pdf = (alpha - 1.0) * eps.ln() - eps / beta - ln_norm;
            (eps, w * ln_pdf.exp())
        })
        .collect();
    let total = neumaier_sum(raw.iter().map(|&(_, w)| w));
    let goods = raw
        .into_iter()
        .map(|(eps, w)| Good {
            epsilon: eps,
            omega: (params.xi_omega() * eps + nu_omega).exp(),
            price: (params.xi_p() * eps + nu_p).exp(),
            weight: w / total,
        })
        .collect();
    GoodsGrid::new(goods)
}
