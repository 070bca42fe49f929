//! Named experiment presets.

use hetnet_core::{Scheme, SweepAxis, SystemParams};

use crate::config::{Mode, RunConfig, SweepSpec};
use crate::error::CliError;

pub const FIGURES: [&str; 4] = ["fig2", "fig3", "fig4", "fig5"];

/// A named experiment: one or more sweeps written to a single CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub mode: Mode,
    pub runs: Vec<RunConfig>,
}

/// Power-control factor for presets that do not sweep it.
pub const DEFAULT_EPSILON: f64 = 0.5;

fn small_cell_densities() -> Vec<f64> {
    (0..=6).map(|i| (20.0 + 5.0 * i as f64) / 1000.0).collect()
}

fn run(params: SystemParams, schemes: Vec<Scheme>, axis: SweepAxis, values: Vec<f64>) -> RunConfig {
    RunConfig {
        params,
        schemes,
        sweep: Some(SweepSpec { axis, values }),
        ..RunConfig::default()
    }
}

pub fn preset(name: &str) -> Result<Preset, CliError> {
    let base = SystemParams {
        lambda_mbs: 0.01,
        lambda_sbs: 0.02,
        alpha: 4.0,
        epsilon: DEFAULT_EPSILON,
        p_default_dbm: 30.0,
        p_max_dbm: 50.0,
        beta_db: 0.0,
        ..SystemParams::default()
    };
    let both = vec![Scheme::Single, Scheme::Double];
    match name {
        "fig2" => {
            let mut runs = Vec::new();
            for beta_db in [0.0, 5.0] {
                for p_max_dbm in [40.0, 60.0] {
                    runs.push(run(
                        SystemParams { beta_db, p_max_dbm, ..base },
                        both.clone(),
                        SweepAxis::Epsilon,
                        vec![0.0, 0.25, 0.5, 0.75, 1.0],
                    ));
                }
            }
            Ok(Preset {
                name: "fig2",
                description: "success probability against the power-control factor",
                mode: Mode::Simulate,
                runs,
            })
        }
        "fig3" | "fig4" => Ok(Preset {
            name: if name == "fig3" { "fig3" } else { "fig4" },
            description: if name == "fig3" {
                "success probability against small-cell density"
            } else {
                "area spectral efficiency against small-cell density"
            },
            mode: Mode::Both,
            runs: vec![run(base, both, SweepAxis::LambdaSbs, small_cell_densities())],
        }),
        "fig5" => Ok(Preset {
            name: "fig5",
            description: "success probability and area spectral efficiency against the number of associations",
            mode: Mode::Simulate,
            runs: [0.0, 5.0]
                .into_iter()
                .map(|beta_db| {
                    run(
                        SystemParams { beta_db, ..base },
                        vec![Scheme::Double],
                        SweepAxis::K,
                        vec![0.0, 1.0, 2.0, 3.0, 4.0],
                    )
                })
                .collect(),
        }),
        other => Err(CliError::config(format!(
            "unknown figure `{other}`; valid presets are {}",
            FIGURES.join(", ")
        ))),
    }
}
