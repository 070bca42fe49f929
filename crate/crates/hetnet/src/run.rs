use hetnet_core::analytic::AnalyticModel;
use hetnet_core::simulator::ase_factor;
use hetnet_core::{
    closed_form_da, sweep, CurvePoint, QuadratureResult, Scheme, Source, SweepAxis, SystemParams,
};
use rayon::prelude::*;

use crate::config::{ClosedForm, Mode, RunConfig};
use crate::error::CliError;
use crate::parallel::Rayon;
use crate::table::ResultTable;

/// Quantity the analytic model provides for `scheme`, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Analytic {
    MacroOnly,
    Double,
}

fn analytic_kind(scheme: Scheme) -> Option<Analytic> {
    match scheme {
        Scheme::Double | Scheme::KPlusOne(1) => Some(Analytic::Double),
        Scheme::KPlusOne(0) => Some(Analytic::MacroOnly),
        Scheme::Single | Scheme::KPlusOne(_) => None,
    }
}

fn closed_form_applies(p: &SystemParams) -> bool {
    p.alpha == 4.0 && p.epsilon == 0.0
}

/// Parameters and schemes evaluated at one sweep value.
struct SweepPoint {
    value: f64,
    params: SystemParams,
    schemes: Vec<Scheme>,
}

fn sweep_points(cfg: &RunConfig) -> Result<Vec<SweepPoint>, CliError> {
    let spec = cfg.sweep_spec();
    spec.values
        .iter()
        .map(|&value| {
            let (params, schemes) = if spec.axis == SweepAxis::K {
                (cfg.params, vec![Scheme::KPlusOne(spec.axis.k_of(value)?)])
            } else {
                (spec.axis.apply(&cfg.params, value)?, cfg.schemes.clone())
            };
            Ok(SweepPoint {
                value,
                params,
                schemes,
            })
        })
        .collect()
}

fn analytic_row(
    scheme: Scheme,
    axis: SweepAxis,
    pt: &SweepPoint,
    source: Source,
    q: QuadratureResult,
) -> CurvePoint {
    CurvePoint {
        scheme,
        axis_name: axis,
        axis_value: pt.value,
        beta_db: pt.params.beta_db,
        epsilon: pt.params.epsilon,
        lambda_sbs: pt.params.lambda_sbs,
        p_max_dbm: pt.params.p_max_dbm,
        source,
        p_success: q.value,
        ci_half_width: q.estimated_error,
        ase: q.value * ase_factor(&pt.params),
        n_realizations: 0,
        seed: 0,
    }
}

fn analytic_rows(
    cfg: &RunConfig,
    axis: SweepAxis,
    pt: &SweepPoint,
    closed_form: bool,
) -> Result<Vec<CurvePoint>, CliError> {
    let wanted: Vec<(Scheme, Analytic)> = pt
        .schemes
        .iter()
        .filter_map(|&s| analytic_kind(s).map(|k| (s, k)))
        .collect();
    if wanted.is_empty() {
        return Ok(Vec::new());
    }
    let model = AnalyticModel::new(cfg.analytic.params_for(&pt.params))?;
    let mut rows = Vec::new();
    for (scheme, kind) in wanted {
        let q = match kind {
            Analytic::MacroOnly => model.prob_mbs_success()?,
            Analytic::Double => model.prob_da_success()?,
        };
        rows.push(analytic_row(scheme, axis, pt, Source::Analytic, q));
        if closed_form && kind == Analytic::Double && closed_form_applies(&pt.params) {
            let p = &pt.params;
            let exact = QuadratureResult {
                value: closed_form_da(p.beta_linear(), p.lambda_mbs, p.lambda_sbs),
                estimated_error: 0.0,
                evaluations: 0,
            };
            rows.push(analytic_row(scheme, axis, pt, Source::ClosedForm, exact));
        }
    }
    Ok(rows)
}

/// Mode used when neither the command line nor the file sets one.
pub fn resolve_mode(cfg: &RunConfig, default: Mode) -> Mode {
    cfg.mode.unwrap_or(default)
}

/// Runs a validated configuration. Rows are grouped by sweep value, with
/// simulated rows ahead of model rows.
pub fn execute(cfg: &RunConfig, mode: Mode) -> Result<ResultTable, CliError> {
    cfg.validate()?;
    let spec = cfg.sweep_spec();
    let points = sweep_points(cfg)?;

    let closed_form = mode.evaluates()
        && match cfg.closed_form {
            ClosedForm::Off => false,
            ClosedForm::Auto => mode == Mode::Analytic,
            ClosedForm::Require => true,
        };
    if closed_form && cfg.closed_form == ClosedForm::Require {
        if let Some(pt) = points.iter().find(|pt| !closed_form_applies(&pt.params)) {
            return Err(CliError::config(format!(
                "closed_form = \"require\": the closed form only holds for alpha = 4 without power control, \
                 but the point {} = {} has alpha = {} and epsilon = {}",
                spec.axis, pt.value, pt.params.alpha, pt.params.epsilon
            )));
        }
        if !points.iter().any(|pt| {
            pt.schemes
                .iter()
                .any(|&s| analytic_kind(s) == Some(Analytic::Double))
        }) {
            return Err(CliError::config(
                "closed_form = \"require\": the closed form covers double association; add DA to schemes",
            ));
        }
    }

    let simulated = if mode.simulates() {
        let sim_cfg = cfg.simulation.sim_config();
        sweep(
            &cfg.params,
            spec.axis,
            &spec.values,
            &cfg.schemes,
            &sim_cfg,
            &Rayon,
        )?
    } else {
        Vec::new()
    };

    let analytic: Vec<Vec<CurvePoint>> = if mode.evaluates() {
        points
            .par_iter()
            .map(|pt| analytic_rows(cfg, spec.axis, pt, closed_form))
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    if mode == Mode::Analytic && analytic.iter().all(|r| r.is_empty()) {
        return Err(CliError::config(
            "schemes: no analytic expression exists for the requested schemes; \
             analytic rows cover DA, KPLUS1(1) and KPLUS1(0)",
        ));
    }

    let mut rows =
        Vec::with_capacity(simulated.len() + analytic.iter().map(Vec::len).sum::<usize>());
    let mut sim_iter = simulated.into_iter();
    for (i, pt) in points.iter().enumerate() {
        if mode.simulates() {
            rows.extend(sim_iter.by_ref().take(pt.schemes.len()));
        }
        if let Some(a) = analytic.get(i) {
            rows.extend(a.iter().cloned());
        }
    }
    Ok(ResultTable::new(rows))
}
