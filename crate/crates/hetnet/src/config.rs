//! TOML run configuration.
//!
//! ```toml
//! schema_version = 1
//! mode = "both"                 # simulate | analytic | both
//! schemes = ["SA", "DA"]        # SA, DA, KPLUS1(k)
//! closed_form = "auto"          # auto | require | off
//! out = "results.csv"
//!
//! [params]
//! lambda_mbs = 0.01
//! lambda_sbs = 0.02
//! alpha = 4.0
//! epsilon = 0.5
//! p_default_dbm = 30.0
//! p_max_dbm = 50.0
//! beta_db = 0.0
//! fpc_anchor = "mbs"            # mbs | serving
//!
//! [sweep]
//! axis = "lambda_sbs"           # epsilon | lambda_sbs | k | beta
//! values = [0.02, 0.035, 0.05]
//!
//! [simulation]
//! n_realizations = 2000
//! seed = 1
//! window_side = 100.0
//!
//! [analytic]
//! rel_tol = 1e-6
//! abs_tol = 1e-9
//! truncation = 1e-12
//! kernel_step = 0.02
//! ```
//!
//! Every key is optional except `schema_version`; unknown keys are errors.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hetnet_core::{AnalyticParams, Scheme, SimConfig, SweepAxis, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Which sources produce rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Simulate,
    Analytic,
    Both,
}

impl Mode {
    pub fn simulates(self) -> bool {
        matches!(self, Mode::Simulate | Mode::Both)
    }

    pub fn evaluates(self) -> bool {
        matches!(self, Mode::Analytic | Mode::Both)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Simulate => "simulate",
            Mode::Analytic => "analytic",
            Mode::Both => "both",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simulate" => Ok(Mode::Simulate),
            "analytic" => Ok(Mode::Analytic),
            "both" => Ok(Mode::Both),
            other => Err(format!(
                "unknown mode `{other}`; expected simulate, analytic or both"
            )),
        }
    }
}

/// Policy for closed-form rows, which only exist for `alpha = 4` without
/// power control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedForm {
    /// Emitted in analytic mode wherever the formula applies.
    #[default]
    Auto,
    /// Emitted whenever analytic rows are; a point outside the formula's
    /// domain is a configuration error.
    Require,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub n_realizations: usize,
    pub seed: u64,
    pub window_side: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let d = SimConfig::default();
        SimulationSection {
            n_realizations: d.n_realizations,
            seed: d.seed,
            window_side: d.window_side,
        }
    }
}

impl SimulationSection {
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            window_side: self.window_side,
            n_realizations: self.n_realizations,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub truncation: f64,
    pub kernel_step: f64,
}

impl Default for AnalyticSection {
    fn default() -> Self {
        AnalyticSection {
            rel_tol: AnalyticParams::DEFAULT_REL_TOL,
            abs_tol: AnalyticParams::DEFAULT_ABS_TOL,
            truncation: AnalyticParams::DEFAULT_TRUNCATION,
            kernel_step: AnalyticParams::DEFAULT_KERNEL_STEP,
        }
    }
}

impl AnalyticSection {
    pub fn params_for(&self, p: &SystemParams) -> AnalyticParams {
        AnalyticParams {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            truncation: self.truncation,
            kernel_step: self.kernel_step,
            ..AnalyticParams::from_system(p)
        }
    }
}

fn default_schemes() -> Vec<Scheme> {
    vec![Scheme::Double]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub closed_form: ClosedForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub params: SystemParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub analytic: AnalyticSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            mode: None,
            schemes: default_schemes(),
            closed_form: ClosedForm::Auto,
            out: None,
            params: SystemParams::default(),
            sweep: None,
            simulation: SimulationSection::default(),
            analytic: AnalyticSection::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub window_side: Option<f64>,
    pub out: Option<PathBuf>,
    pub mode: Option<Mode>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.simulation.seed = s;
        }
        if let Some(n) = o.trials {
            self.simulation.n_realizations = n;
        }
        if let Some(w) = o.window_side {
            self.simulation.window_side = w;
        }
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
        if let Some(m) = o.mode {
            self.mode = Some(m);
        }
    }

    /// Sweep to run; a single point at the configured threshold when absent.
    pub fn sweep_spec(&self) -> SweepSpec {
        self.sweep.clone().unwrap_or(SweepSpec {
            axis: SweepAxis::Beta,
            values: vec![self.params.beta_db],
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {}",
                self.schema_version
            )));
        }
        self.params
            .validate()
            .map_err(|e| field_error("params", e))?;
        if self.schemes.is_empty() {
            return Err(CliError::config("schemes: at least one scheme is required"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(CliError::config(format!("schemes: {s} is listed twice")));
            }
        }
        let sweep = self.sweep_spec();
        if sweep.values.is_empty() {
            return Err(CliError::config(
                "sweep.values: at least one value is required",
            ));
        }
        for (i, &v) in sweep.values.iter().enumerate() {
            sweep.axis.apply(&self.params, v).map_err(|e| {
                CliError::config(format!(
                    "sweep.values: entry {i} ({v}) is invalid for axis {}: {e}",
                    sweep.axis
                ))
            })?;
        }
        self.simulation
            .sim_config()
            .validate()
            .map_err(|e| field_error("simulation", e))?;
        let a = &self.analytic;
        if !(a.rel_tol > 0.0 && a.abs_tol >= 0.0 && a.truncation > 0.0 && a.truncation < 1.0) {
            return Err(CliError::config(
                "analytic: rel_tol must be positive, abs_tol non-negative and truncation in (0, 1)",
            ));
        }
        if !(a.kernel_step > 0.0 && a.kernel_step <= 0.5) {
            return Err(CliError::config(
                "analytic.kernel_step: must lie in (0, 0.5]",
            ));
        }
        Ok(())
    }
}

/// `section.field: reason` for parameter errors from the model crate.
fn field_error(section: &str, e: hetnet_core::Error) -> CliError {
    match e {
        hetnet_core::Error::Parameter { name, reason } => {
            CliError::config(format!("{section}.{name}: {reason}"))
        }
        other => CliError::Model(other),
    }
}
