//! Laplace-functional evaluation of uplink success probabilities.
//!
//! Users are approximated by a Poisson process of the MBS density whose
//! transmit powers are independent, each driven by a Rayleigh-distributed
//! distance `x` to its own MBS. Every Laplace exponent then reduces to the
//! same one-dimensional average over `x`,
//!
//! ```text
//! kernel(t) = E_x[ t*pow(x) / (1 + t*pow(x)) ],  pow(x) = min(x^(alpha*eps), P_hat)
//! ```
//!
//! where powers are in units of the default power. With `q` the serving
//! user's power and `c = beta / q`:
//!
//! ```text
//! MBS:  L(r)    = exp(-2 pi lambda * int_r^inf kernel(c r^a v^-a) v dv)
//! SBS:  L(y, r) = exp(-2 pi lambda * int_0^inf kernel(c y^a u^-a) u du)
//! ```
//!
//! The MBS exponent starts at the serving distance because no other user of
//! the macro tier is closer to the typical MBS than its own user; the SBS
//! exponent starts at zero. Serving distances are Rayleigh with the MBS
//! density (`r`) and with the SBS density (`y`).
//!
//! The kernel is tabulated once per parameter set on a logarithmic grid in
//! `t` with cubic Hermite interpolation using exact slopes. The outer
//! Rayleigh integrals are truncated where the weight drops below
//! `truncation`; the remainder is added to the reported error.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::f64::consts::PI;

use crate::channel::SystemParams;
use crate::error::{Error, Result};
use crate::math;
use crate::quadrature::{try_integrate, try_integrate_points, QuadratureResult, Tolerance};

/// Inputs of the analytic evaluation plus quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnalyticParams {
    pub lambda_mbs: f64,
    pub lambda_sbs: f64,
    pub alpha: f64,
    pub epsilon: f64,
    /// Power cap over default power.
    pub p_hat: f64,
    pub beta: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Relative weight below which Rayleigh tails are cut.
    pub truncation: f64,
    /// Kernel table spacing in `ln t`.
    pub kernel_step: f64,
}

impl AnalyticParams {
    pub const DEFAULT_REL_TOL: f64 = 1e-6;
    pub const DEFAULT_ABS_TOL: f64 = 1e-9;
    pub const DEFAULT_TRUNCATION: f64 = 1e-12;
    pub const DEFAULT_KERNEL_STEP: f64 = 0.02;

    pub fn from_system(p: &SystemParams) -> Self {
        AnalyticParams {
            lambda_mbs: p.lambda_mbs,
            lambda_sbs: p.lambda_sbs,
            alpha: p.alpha,
            epsilon: p.epsilon,
            p_hat: p.p_hat(),
            beta: p.beta_linear(),
            rel_tol: Self::DEFAULT_REL_TOL,
            abs_tol: Self::DEFAULT_ABS_TOL,
            truncation: Self::DEFAULT_TRUNCATION,
            kernel_step: Self::DEFAULT_KERNEL_STEP,
        }
    }

    /// Tighter copy for cross-checking: tolerances and table spacing divided
    /// by `factor`.
    pub fn refined(&self, factor: f64) -> Self {
        AnalyticParams {
            rel_tol: self.rel_tol / factor,
            abs_tol: self.abs_tol / factor,
            kernel_step: self.kernel_step / factor,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_mbs.is_finite() && self.lambda_mbs > 0.0) {
            return Err(Error::param("lambda_mbs", "must be positive and finite"));
        }
        if !(self.lambda_sbs.is_finite() && self.lambda_sbs >= 0.0) {
            return Err(Error::param(
                "lambda_sbs",
                "must be non-negative and finite",
            ));
        }
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(Error::param("alpha", "path-loss exponent must exceed 2"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::param(
                "epsilon",
                "power-control factor must lie in [0, 1]",
            ));
        }
        if !(self.p_hat >= 1.0 && self.p_hat.is_finite()) {
            return Err(Error::param("p_hat", "power cap ratio must be at least 1"));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::param("beta", "threshold must be positive"));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol >= 0.0) {
            return Err(Error::param("rel_tol", "tolerances must be positive"));
        }
        if !(self.truncation > 0.0 && self.truncation < 1.0) {
            return Err(Error::param("truncation", "must lie in (0, 1)"));
        }
        if !(self.kernel_step > 0.0 && self.kernel_step <= 0.5) {
            return Err(Error::param("kernel_step", "must lie in (0, 0.5]"));
        }
        Ok(())
    }

    /// Serving distance beyond which power control hits the cap;
    /// infinite without power control.
    pub fn rho(&self) -> f64 {
        if self.epsilon == 0.0 {
            f64::INFINITY
        } else {
            math::powf(self.p_hat, 1.0 / (self.alpha * self.epsilon))
        }
    }
}

/// Which serving-power regime a Laplace functional is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Serving user below the cap, power `r^(alpha*eps)`.
    Uncapped,
    /// Serving user at the cap `P_hat`; only exists with power control.
    Capped,
}

/// Tail of `exp(-z)` ignored when integrating over an interferer's own-cell
/// distance, in the variable `z = pi lambda x^2`.
const KERNEL_Z_MAX: f64 = 40.0;

fn saturate(a: f64) -> f64 {
    a / (1.0 + a)
}

#[derive(Debug, Clone)]
struct KernelTable {
    ln_t0: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl KernelTable {
    fn upper(&self) -> f64 {
        self.ln_t0 + self.step * (self.values.len() - 1) as f64
    }

    fn eval(&self, ln_t: f64) -> f64 {
        let pos = (ln_t - self.ln_t0) / self.step;
        let i = (math::floor(pos) as usize).min(self.values.len() - 2);
        let s = pos - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (mut d0, mut d1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let secant = y1 - y0;
        if secant == 0.0 {
            d0 = 0.0;
            d1 = 0.0;
        } else {
            // Fritsch–Carlson: keep the cubic monotone on this interval
            let a = d0 / secant;
            let b = d1 / secant;
            let m = a * a + b * b;
            if m > 9.0 {
                let tau = 3.0 / math::sqrt(m);
                d0 *= tau;
                d1 *= tau;
            }
        }
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1
    }
}

/// The averaged interferer term `E_x[t pow(x) / (1 + t pow(x))]`.
#[derive(Debug, Clone)]
pub struct InterfererKernel {
    gamma: f64,
    scale: f64,
    p_hat: f64,
    z_upper: f64,
    atom: f64,
    truncated: f64,
    m1: f64,
    m2: f64,
    t_low: f64,
    table: Option<KernelTable>,
    table_rel_error: f64,
}

impl InterfererKernel {
    pub fn new(p: &AnalyticParams) -> Result<Self> {
        p.validate()?;
        let gamma = p.alpha * p.epsilon / 2.0;
        let scale = math::powf(PI * p.lambda_mbs, -gamma);
        let rho = p.rho();
        let z_rho = PI * p.lambda_mbs * rho * rho;
        let z_upper = z_rho.min(KERNEL_Z_MAX);
        let atom = if p.epsilon == 0.0 {
            0.0
        } else {
            math::exp(-z_rho)
        };
        let truncated = if z_rho > KERNEL_Z_MAX {
            math::exp(-KERNEL_Z_MAX)
        } else {
            0.0
        };
        let mut k = InterfererKernel {
            gamma,
            scale,
            p_hat: p.p_hat,
            z_upper,
            atom,
            truncated,
            m1: 1.0,
            m2: 1.0,
            t_low: 0.0,
            table: None,
            table_rel_error: 0.0,
        };
        if gamma == 0.0 {
            return Ok(k);
        }
        k.m1 = k.moment(1)?;
        k.m2 = k.moment(2)?;
        // below t_low the two-term expansion is accurate to (t P_hat)^2 relative
        k.t_low = 1e-6 / p.p_hat;
        let ln_lo = math::ln(k.t_low);
        let ln_hi = 40.0;
        let n = (math::floor((ln_hi - ln_lo) / p.kernel_step) as usize) + 2;
        let step = (ln_hi - ln_lo) / (n - 1) as f64;
        let mut values = Vec::with_capacity(n);
        let mut slopes = Vec::with_capacity(n);
        for i in 0..n {
            let t = math::exp(ln_lo + step * i as f64);
            values.push(k.direct(t)?.value);
            slopes.push(k.direct_log_slope(t)?);
        }
        let table = KernelTable {
            ln_t0: ln_lo,
            step,
            values,
            slopes,
        };
        // spot-check interpolation at interval midpoints
        let mut worst: f64 = 0.0;
        for i in (0..n - 1).step_by(7) {
            let ln_t = ln_lo + step * (i as f64 + 0.5);
            let exact = k.direct(math::exp(ln_t))?.value;
            let approx = table.eval(ln_t);
            worst = worst.max((approx - exact).abs() / exact);
        }
        k.table_rel_error = 4.0 * worst + 1e-12;
        k.table = Some(table);
        Ok(k)
    }

    fn pow_at(&self, z: f64) -> f64 {
        self.scale * math::powf(z, self.gamma)
    }

    fn tolerance() -> Tolerance {
        Tolerance {
            rel: 1e-12,
            abs: 1e-15,
            max_intervals: 4000,
        }
    }

    fn z_points(&self, t: f64) -> Vec<f64> {
        let mut pts = alloc::vec![0.0];
        if self.z_upper > 0.0 {
            let knee = math::powf(1.0 / (t * self.scale), 1.0 / self.gamma);
            if knee > 0.0 && knee < self.z_upper {
                pts.push(knee);
            }
            pts.push(self.z_upper);
        }
        pts
    }

    fn moment(&self, order: i32) -> Result<f64> {
        let q = try_integrate::<_, Error>(
            |z| Ok(math::powi(self.pow_at(z), order) * math::exp(-z)),
            0.0,
            self.z_upper,
            &Self::tolerance(),
        )?;
        Ok(q.value + self.atom * math::powi(self.p_hat, order))
    }

    /// Kernel by quadrature over the interferer distance.
    pub fn direct(&self, t: f64) -> Result<QuadratureResult> {
        if self.gamma == 0.0 {
            return Ok(QuadratureResult {
                value: saturate(t),
                estimated_error: 0.0,
                evaluations: 0,
            });
        }
        let pts = self.z_points(t);
        let mut q = if pts.len() > 1 {
            try_integrate_points::<_, Error>(
                |z| Ok(saturate(t * self.pow_at(z)) * math::exp(-z)),
                &pts,
                &Self::tolerance(),
            )?
        } else {
            QuadratureResult::zero()
        };
        q.value += self.atom * saturate(t * self.p_hat);
        q.estimated_error += self.truncated;
        Ok(q)
    }

    /// `d kernel / d ln t`.
    fn direct_log_slope(&self, t: f64) -> Result<f64> {
        let f = |a: f64| a / ((1.0 + a) * (1.0 + a));
        let pts = self.z_points(t);
        let body = if pts.len() > 1 {
            try_integrate_points::<_, Error>(
                |z| Ok(f(t * self.pow_at(z)) * math::exp(-z)),
                &pts,
                &Self::tolerance(),
            )?
            .value
        } else {
            0.0
        };
        Ok(body + self.atom * f(t * self.p_hat))
    }

    /// Kernel value, tabulated where possible.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return if t == 0.0 {
                Ok(0.0)
            } else {
                Err(Error::param("t", "kernel argument must be non-negative"))
            };
        }
        let Some(table) = &self.table else {
            return Ok(saturate(t));
        };
        if t <= self.t_low {
            return Ok(t * self.m1 - t * t * self.m2);
        }
        let ln_t = math::ln(t);
        if ln_t >= table.upper() {
            return Ok(self.direct(t)?.value);
        }
        Ok(table.eval(ln_t))
    }

    /// `kernel(t) / t`, accurate as `t -> 0`.
    fn eval_over_t(&self, t: f64) -> Result<f64> {
        if self.table.is_none() {
            return Ok(1.0 / (1.0 + t));
        }
        if t <= self.t_low {
            return Ok(self.m1 - t * self.m2);
        }
        Ok(self.eval(t)? / t)
    }

    /// Bound on the relative error of [`InterfererKernel::eval`].
    pub fn relative_error(&self) -> f64 {
        self.table_rel_error
    }

    /// Mean interferer power in units of the default power.
    pub fn mean_power(&self) -> f64 {
        self.m1
    }
}

/// Analytic evaluator bound to one parameter set.
#[derive(Debug, Clone)]
pub struct AnalyticModel {
    params: AnalyticParams,
    kernel: InterfererKernel,
    exponents: RefCell<BTreeMap<(u64, bool), QuadratureResult>>,
}

struct Exponent {
    value: f64,
    error: f64,
    evaluations: usize,
}

impl AnalyticModel {
    pub fn new(params: AnalyticParams) -> Result<Self> {
        let kernel = InterfererKernel::new(&params)?;
        Ok(AnalyticModel {
            params,
            kernel,
            exponents: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn from_system(p: &SystemParams) -> Result<Self> {
        Self::new(AnalyticParams::from_system(p))
    }

    pub fn params(&self) -> &AnalyticParams {
        &self.params
    }

    pub fn kernel(&self) -> &InterfererKernel {
        &self.kernel
    }

    fn inner_tolerance(&self) -> Tolerance {
        Tolerance {
            rel: self.params.rel_tol * 1e-3,
            abs: self.params.abs_tol * 1e-3,
            max_intervals: 4000,
        }
    }

    /// Serving power in units of the default power.
    fn serving_power(&self, branch: Branch, r: f64) -> Result<f64> {
        let p = &self.params;
        match branch {
            Branch::Uncapped if p.epsilon == 0.0 => Ok(1.0),
            Branch::Uncapped => Ok(math::powf(r, p.alpha * p.epsilon)),
            Branch::Capped if p.epsilon == 0.0 => Err(Error::param(
                "branch",
                "the capped branch only exists with power control (epsilon > 0)",
            )),
            Branch::Capped => Ok(p.p_hat),
        }
    }

    /// `int_1^inf kernel(c w^-a) w dw` via `w = tau^(-1/(a-2))`, which
    /// turns it into `1/(a-2) int_0^1 kernel(c tau^p) tau^-p dtau` with
    /// `p = a/(a-2)` and a bounded integrand.
    fn outer_shell(&self, c: f64) -> Result<QuadratureResult> {
        let a = self.params.alpha;
        let p = a / (a - 2.0);
        let mut q = try_integrate::<_, Error>(
            |tau| {
                let tp = math::powf(tau, p);
                Ok(c * self.kernel.eval_over_t(c * tp)?)
            },
            0.0,
            1.0,
            &self.inner_tolerance(),
        )?;
        q.value /= a - 2.0;
        q.estimated_error /= a - 2.0;
        Ok(q)
    }

    /// `int_0^1 kernel(c w^-a) w dw`.
    fn inner_disc(&self, c: f64) -> Result<QuadratureResult> {
        let a = self.params.alpha;
        try_integrate::<_, Error>(
            |w| Ok(self.kernel.eval(c * math::path_loss(w, a))? * w),
            0.0,
            1.0,
            &self.inner_tolerance(),
        )
    }

    /// Normalised exponent integral, memoised on `c` since the outer
    /// quadratures revisit the same nodes.
    fn shape(&self, c: f64, from_zero: bool) -> Result<QuadratureResult> {
        let key = (c.to_bits(), from_zero);
        if let Some(q) = self.exponents.borrow().get(&key) {
            return Ok(*q);
        }
        let mut q = self.outer_shell(c)?;
        if from_zero {
            let d = self.inner_disc(c)?;
            q.value += d.value;
            q.estimated_error += d.estimated_error;
            q.evaluations += d.evaluations;
        }
        self.exponents.borrow_mut().insert(key, q);
        Ok(q)
    }

    fn laplace(&self, exponent: Exponent) -> QuadratureResult {
        let k = 2.0 * PI * self.params.lambda_mbs;
        let value = math::exp(-k * exponent.value);
        let err = k * (exponent.error + self.kernel.relative_error() * exponent.value) * value;
        QuadratureResult {
            value,
            estimated_error: err,
            evaluations: exponent.evaluations,
        }
    }

    /// Laplace functional of the interference at the typical MBS whose user
    /// sits at distance `r`.
    pub fn laplace_i_m(&self, branch: Branch, r: f64) -> Result<QuadratureResult> {
        if !(r > 0.0) {
            return Err(Error::param("r", "serving distance must be positive"));
        }
        let c = self.params.beta / self.serving_power(branch, r)?;
        let s = self.shape(c, false)?;
        Ok(self.laplace(Exponent {
            value: r * r * s.value,
            error: r * r * s.estimated_error,
            evaluations: s.evaluations,
        }))
    }

    /// Laplace functional of the interference at the typical SBS at distance
    /// `y` from a user that is `r` from its own MBS.
    pub fn laplace_i_s(&self, branch: Branch, y: f64, r: f64) -> Result<QuadratureResult> {
        if !(y > 0.0) || !(r > 0.0) {
            return Err(Error::param("y", "distances must be positive"));
        }
        let c = self.params.beta / self.serving_power(branch, r)?;
        let s = self.shape(c, true)?;
        Ok(self.laplace(Exponent {
            value: y * y * s.value,
            error: y * y * s.estimated_error,
            evaluations: s.evaluations,
        }))
    }

    fn rayleigh_cut(&self, lambda: f64) -> f64 {
        math::sqrt(math::ln(1.0 / self.params.truncation) / (PI * lambda))
    }

    fn outer_tolerance(&self) -> Tolerance {
        Tolerance::new(self.params.rel_tol, self.params.abs_tol)
    }

    fn finish(&self, mut q: QuadratureResult) -> Result<QuadratureResult> {
        let allowed = self.params.rel_tol * q.value.abs() + self.params.abs_tol;
        if q.estimated_error > allowed {
            return Err(Error::NonConvergence {
                achieved: q.estimated_error,
                requested: allowed,
            });
        }
        q.value = q.value.clamp(0.0, 1.0);
        Ok(q)
    }

    /// Lower bound on the probability that the typical MBS decodes its user.
    pub fn prob_mbs_success(&self) -> Result<QuadratureResult> {
        let p = &self.params;
        let lambda = p.lambda_mbs;
        let r_max = self.rayleigh_cut(lambda);
        let rho = p.rho();
        let inner_err = RefCell::new(0.0f64);
        let mut evals = 0usize;
        let mut integrate_branch = |branch: Branch, a: f64, b: f64| -> Result<QuadratureResult> {
            let q = try_integrate::<_, Error>(
                |r| {
                    let l = self.laplace_i_m(branch, r)?;
                    evals += l.evaluations;
                    let mut e = inner_err.borrow_mut();
                    *e = e.max(l.estimated_error);
                    Ok(l.value * rayleigh_pdf(r, lambda))
                },
                a,
                b,
                &self.outer_tolerance(),
            )?;
            Ok(q)
        };
        let mut total = integrate_branch(Branch::Uncapped, 0.0, rho.min(r_max))?;
        if rho < r_max {
            let capped = integrate_branch(Branch::Capped, rho, r_max)?;
            total.value += capped.value;
            total.estimated_error += capped.estimated_error;
            total.evaluations += capped.evaluations;
        }
        total.estimated_error += inner_err.into_inner() + p.truncation;
        total.evaluations += evals;
        self.finish(total)
    }

    /// Probability that the nearest SBS decodes the user.
    pub fn prob_sbs_success(&self) -> Result<QuadratureResult> {
        let p = &self.params;
        if p.lambda_sbs == 0.0 {
            return Ok(QuadratureResult::zero());
        }
        let lambda = p.lambda_mbs;
        let r_max = self.rayleigh_cut(lambda);
        let y_max = self.rayleigh_cut(p.lambda_sbs);
        let rho = p.rho();
        let atom = if p.epsilon == 0.0 {
            0.0
        } else {
            math::exp(-PI * lambda * rho * rho)
        };
        let inner_err = RefCell::new(0.0f64);
        let evals = RefCell::new(0usize);
        let conditional = |y: f64| -> Result<f64> {
            let q = try_integrate::<_, Error>(
                |r| {
                    let l = self.laplace_i_s(Branch::Uncapped, y, r)?;
                    *evals.borrow_mut() += l.evaluations;
                    let mut e = inner_err.borrow_mut();
                    *e = e.max(l.estimated_error);
                    Ok(l.value * rayleigh_pdf(r, lambda))
                },
                0.0,
                rho.min(r_max),
                &self.inner_tolerance(),
            )?;
            let mut v = q.value;
            {
                let mut e = inner_err.borrow_mut();
                *e = e.max(q.estimated_error);
            }
            if atom > 0.0 {
                let l =
                    self.laplace_i_s(Branch::Capped, y, r_max.min(rho).max(f64::MIN_POSITIVE))?;
                v += atom * l.value;
            }
            Ok(v)
        };
        let mut total = try_integrate::<_, Error>(
            |y| Ok(conditional(y)? * rayleigh_pdf(y, p.lambda_sbs)),
            0.0,
            y_max,
            &self.outer_tolerance(),
        )?;
        // r beyond r_max but below rho, and y beyond y_max
        let r_tail = if rho > r_max { p.truncation } else { 0.0 };
        total.estimated_error += inner_err.into_inner() + r_tail + p.truncation;
        total.evaluations += evals.into_inner();
        self.finish(total)
    }

    /// Double-association success: either receiver decodes, the two
    /// marginals treated as independent.
    pub fn prob_da_success(&self) -> Result<QuadratureResult> {
        let m = self.prob_mbs_success()?;
        let s = self.prob_sbs_success()?;
        Ok(QuadratureResult {
            value: 1.0 - (1.0 - m.value) * (1.0 - s.value),
            estimated_error: (1.0 - s.value) * m.estimated_error
                + (1.0 - m.value) * s.estimated_error,
            evaluations: m.evaluations + s.evaluations,
        })
    }
}

fn rayleigh_pdf(r: f64, lambda: f64) -> f64 {
    2.0 * PI * lambda * r * math::exp(-PI * lambda * r * r)
}

/// Kernel value at `t` by direct quadrature.
pub fn interferer_power_kernel(t: f64, params: &AnalyticParams) -> Result<QuadratureResult> {
    if !(t > 0.0) {
        return Err(Error::param("t", "kernel argument must be positive"));
    }
    InterfererKernel::new(params)?.direct(t)
}

pub fn laplace_i_m(branch: Branch, r: f64, params: &AnalyticParams) -> Result<QuadratureResult> {
    AnalyticModel::new(*params)?.laplace_i_m(branch, r)
}

pub fn laplace_i_s(
    branch: Branch,
    y: f64,
    r: f64,
    params: &AnalyticParams,
) -> Result<QuadratureResult> {
    AnalyticModel::new(*params)?.laplace_i_s(branch, y, r)
}

pub fn prob_mbs_success(params: &AnalyticParams) -> Result<QuadratureResult> {
    AnalyticModel::new(*params)?.prob_mbs_success()
}

pub fn prob_sbs_success(params: &AnalyticParams) -> Result<QuadratureResult> {
    AnalyticModel::new(*params)?.prob_sbs_success()
}

pub fn prob_da_success(params: &AnalyticParams) -> Result<QuadratureResult> {
    AnalyticModel::new(*params)?.prob_da_success()
}

/// Closed-form double-association lower bound for `alpha = 4` without power
/// control:
/// `1 - (1 - 1/(1 + sqrt(b) atan(sqrt(b)))) (1 - 2 ls / (pi sqrt(b) l + 2 ls))`.
pub fn closed_form_da(beta_linear: f64, lambda_mbs: f64, lambda_sbs: f64) -> f64 {
    1.0 - (1.0 - closed_form_mbs(beta_linear))
        * (1.0 - closed_form_sbs(beta_linear, lambda_mbs, lambda_sbs))
}

/// MBS factor of [`closed_form_da`].
pub fn closed_form_mbs(beta_linear: f64) -> f64 {
    let sb = math::sqrt(beta_linear);
    1.0 / (1.0 + sb * math::atan(sb))
}

/// SBS factor of [`closed_form_da`].
pub fn closed_form_sbs(beta_linear: f64, lambda_mbs: f64, lambda_sbs: f64) -> f64 {
    let sb = math::sqrt(beta_linear);
    2.0 * lambda_sbs / (PI * sb * lambda_mbs + 2.0 * lambda_sbs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(epsilon: f64, p_hat: f64, beta: f64, lambda_sbs: f64) -> AnalyticParams {
        AnalyticParams {
            lambda_mbs: 0.01,
            lambda_sbs,
            alpha: 4.0,
            epsilon,
            p_hat,
            beta,
            ..AnalyticParams::from_system(&SystemParams::default())
        }
    }

    #[test]
    fn closed_form_reference_values() {
        assert!((closed_form_da(1.0, 0.01, 0.02) - 0.8064872452587516).abs() < 1e-14);
        assert!((closed_form_mbs(1.0) - 0.5600991535).abs() < 1e-10);
    }

    #[test]
    fn kernel_without_power_control_is_saturation() {
        let k = InterfererKernel::new(&params(0.0, 100.0, 1.0, 0.02)).unwrap();
        for t in [1e-9, 0.3, 1.0, 7.0, 1e6] {
            assert_eq!(k.eval(t).unwrap(), t / (1.0 + t));
        }
    }

    #[test]
    fn kernel_reference_value() {
        let q = interferer_power_kernel(1.0, &params(0.5, 10.0, 1.0, 0.02)).unwrap();
        assert!((q.value - 0.8651578825300885).abs() < 1e-10, "{}", q.value);
    }

    #[test]
    fn table_matches_direct_quadrature() {
        let k = InterfererKernel::new(&params(0.5, 100.0, 1.0, 0.02)).unwrap();
        assert!(k.relative_error() < 1e-7, "{}", k.relative_error());
        let mut t = 1e-9;
        while t < 1e20 {
            let exact = k.direct(t).unwrap().value;
            let approx = k.eval(t).unwrap();
            assert!(
                (approx - exact).abs() <= 1e-7 * exact,
                "t={t} {approx} {exact}"
            );
            t *= 3.7;
        }
    }

    #[test]
    fn matches_closed_form_without_power_control() {
        for (beta, ls) in [(1.0, 0.02), (0.5, 0.05), (10f64.sqrt(), 0.02)] {
            let m = AnalyticModel::new(params(0.0, 100.0, beta, ls)).unwrap();
            let da = m.prob_da_success().unwrap();
            let cf = closed_form_da(beta, 0.01, ls);
            assert!(
                (da.value - cf).abs() < 1e-6,
                "beta={beta} {} {cf}",
                da.value
            );
        }
    }

    #[test]
    fn matches_reference_with_power_control() {
        let m = AnalyticModel::new(params(0.5, 100.0, 1.0, 0.02)).unwrap();
        let pm = m.prob_mbs_success().unwrap().value;
        let ps = m.prob_sbs_success().unwrap().value;
        assert!((pm - 0.5523502512355273).abs() < 1e-6, "{pm}");
        assert!((ps - 0.5226934770542385).abs() < 1e-6, "{ps}");
    }

    #[test]
    fn capped_branch_needs_power_control() {
        let m = AnalyticModel::new(params(0.0, 100.0, 1.0, 0.02)).unwrap();
        assert!(m.laplace_i_m(Branch::Capped, 10.0).is_err());
        assert!(m.laplace_i_s(Branch::Uncapped, 0.0, 1.0).is_err());
    }

    #[test]
    fn no_small_cells_means_no_sbs_success() {
        let m = AnalyticModel::new(params(0.5, 100.0, 1.0, 0.0)).unwrap();
        assert_eq!(m.prob_sbs_success().unwrap().value, 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(AnalyticModel::new(params(1.5, 100.0, 1.0, 0.02)).is_err());
        assert!(AnalyticModel::new(AnalyticParams {
            alpha: 2.0,
            ..params(0.5, 100.0, 1.0, 0.02)
        })
        .is_err());
    }
}
