//! The run configuration: one JSON document with a section per module.
//! Sections not needed by the requested subcommand may be omitted;
//! `--dump-config` re-emits the parsed document with defaults filled.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use nhces::closedform::ClosedFormEconomy;
use nhces::distributions::AmorosoParams;
use nhces::euler::EulerConfig;
use nhces::grid::{quadrature_goods_grid, sample_goods_grid};
use nhces::{GoodsGrid, NoiseSpec, PreferenceParams};

use crate::CmdError;

fn config_err(e: impl std::fmt::Display) -> CmdError {
    CmdError::Config(e.to_string())
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preference: PreferenceSection,
    #[serde(default = "default_noise")]
    pub noise: NoiseSpec,
    pub grid: GridSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amoroso: Option<AmorosoSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<EulerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logit: Option<LogitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fig: Option<FigSection>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_expenditures")]
    pub expenditures: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceSection {
    pub rho: f64,
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default)]
    pub xi_p: f64,
    #[serde(default)]
    pub xi_omega: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    Sample,
    Quadrature,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub mode: GridMode,
    pub size: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AmorosoSection {
    pub k: f64,
    pub m: f64,
    /// Tied to (rho - 1) / alpha; may be stated for documentation but must
    /// then match.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    /// Monte Carlo draws per good in the aggregate table.
    #[serde(default = "default_draws")]
    pub draws: usize,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EulerMode {
    #[default]
    Normalized,
    Unnormalized,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EulerSection {
    pub theta: f64,
    pub discount: f64,
    /// Flat interest rate, or `rates` for a full sequence; exactly one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    pub horizon: usize,
    #[serde(default = "one")]
    pub e0: f64,
    #[serde(default)]
    pub mode: EulerMode,
    #[serde(default = "default_panel_households")]
    pub panel_households: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LogitSection {
    pub goods: usize,
    pub households: usize,
    pub expenditure: f64,
    /// Overrides the preference rho for the choice model; simulation needs
    /// a substitutes-case value here when the preference side has rho < 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FigSection {
    #[serde(default = "default_curves")]
    pub curves: Vec<AmorosoParams>,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn one() -> f64 {
    1.0
}

fn default_noise() -> NoiseSpec {
    NoiseSpec::NONE
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_seed() -> u64 {
    170123
}

fn default_expenditures() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_draws() -> usize {
    200_000
}

fn default_panel_households() -> usize {
    100_000
}

fn default_points() -> usize {
    200
}

fn default_curves() -> Vec<AmorosoParams> {
    [0.5, 1.0, 2.0, 4.0]
        .into_iter()
        .map(|m| AmorosoParams::new(0.0, 1.0, m, 1.0).expect("fixed shapes are valid"))
        .collect()
}

impl Default for FigSection {
    fn default() -> Self {
        FigSection { curves: default_curves(), points: default_points() }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CmdError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CmdError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CmdError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply_overrides(
        &mut self,
        seed: Option<u64>,
        out: Option<&Path>,
        expenditures: Option<&[f64]>,
    ) {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(dir) = out {
            self.output_dir = dir.to_path_buf();
        }
        if let Some(list) = expenditures {
            self.expenditures = list.to_vec();
        }
    }

    pub fn validate(&self) -> Result<(), CmdError> {
        self.preference_params()?;
        if self.grid.size == 0 {
            return Err(CmdError::Config("grid size must be positive".into()));
        }
        if self.expenditures.is_empty() {
            return Err(CmdError::Config("need at least one expenditure level".into()));
        }
        if self.expenditures.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(CmdError::Config("expenditure levels must be positive".into()));
        }
        if let Some(am) = &self.amoroso {
            self.expenditure_law(am)?;
            if am.draws < 2 {
                return Err(CmdError::Config("amoroso draws must be at least 2".into()));
            }
        }
        if let Some(eu) = &self.euler {
            match (&eu.rate, &eu.rates) {
                (Some(_), Some(_)) => {
                    return Err(CmdError::Config(
                        "give either a flat `rate` or a `rates` sequence, not both".into(),
                    ))
                }
                (None, None) => {
                    return Err(CmdError::Config(
                        "the euler section needs a `rate` or a `rates` sequence".into(),
                    ))
                }
                _ => {}
            }
        }
        if let Some(fig) = &self.fig {
            if fig.curves.is_empty() {
                return Err(CmdError::Config("fig needs at least one curve".into()));
            }
            if fig.points < 2 {
                return Err(CmdError::Config("fig needs at least two grid points".into()));
            }
        }
        Ok(())
    }

    pub fn preference_params(&self) -> Result<PreferenceParams, CmdError> {
        PreferenceParams::new(
            self.preference.rho,
            self.preference.alpha,
            self.preference.beta,
            self.preference.xi_p,
            self.preference.xi_omega,
            self.noise.clone(),
        )
        .map_err(config_err)
    }

    pub fn build_grid(&self, params: &PreferenceParams) -> Result<GoodsGrid, CmdError> {
        match self.grid.mode {
            GridMode::Sample => sample_goods_grid(params, self.grid.size, self.seed),
            GridMode::Quadrature => quadrature_goods_grid(params, self.grid.size),
        }
        .map_err(config_err)
    }

    pub fn closed_form(&self) -> Result<ClosedFormEconomy, CmdError> {
        ClosedFormEconomy::new(self.preference_params()?).map_err(config_err)
    }

    pub fn amoroso_section(&self) -> Result<&AmorosoSection, CmdError> {
        self.amoroso
            .as_ref()
            .ok_or_else(|| CmdError::Config("this subcommand needs an `amoroso` section".into()))
    }

    /// The cross-sectional expenditure law with its power parameter tied to
    /// the preference side.
    pub fn expenditure_distribution(&self) -> Result<AmorosoParams, CmdError> {
        self.expenditure_law(self.amoroso_section()?)
    }

    fn expenditure_law(&self, section: &AmorosoSection) -> Result<AmorosoParams, CmdError> {
        let n = (self.preference.rho - 1.0) / self.preference.alpha;
        if let Some(given) = section.n {
            if (given - n).abs() > 1e-12 {
                return Err(CmdError::Config(format!(
                    "amoroso n is tied to (rho - 1) / alpha = {n}; got {given}"
                )));
            }
        }
        AmorosoParams::new(0.0, section.k, section.m, n).map_err(config_err)
    }

    pub fn euler_section(&self) -> Result<&EulerSection, CmdError> {
        self.euler
            .as_ref()
            .ok_or_else(|| CmdError::Config("this subcommand needs an `euler` section".into()))
    }

    pub fn euler_config(
        &self,
        econ: ClosedFormEconomy,
    ) -> Result<(EulerConfig, &EulerSection), CmdError> {
        let section = self.euler_section()?;
        let rates = match (&section.rate, &section.rates) {
            (Some(r), None) => vec![*r; section.horizon],
            (None, Some(rs)) => rs.clone(),
            _ => unreachable!("validated on load"),
        };
        EulerConfig::new(econ, section.theta, section.discount, rates, section.horizon)
            .map(|cfg| (cfg, section))
            .map_err(config_err)
    }

    pub fn logit_section(&self) -> Result<&LogitSection, CmdError> {
        self.logit
            .as_ref()
            .ok_or_else(|| CmdError::Config("this subcommand needs a `logit` section".into()))
    }

    pub fn fig_section(&self) -> FigSection {
        self.fig.clone().unwrap_or_default()
    }
}
