use std::f64::consts::PI;

use hetnet_core::analytic::{closed_form_mbs, interferer_power_kernel, InterfererKernel};
use hetnet_core::{closed_form_da, AnalyticModel, AnalyticParams, Branch, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

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

/// Composite Simpson for `int_0^b f(z) dz` split at `breaks`, in the
/// variable `s = z^(1/4)` so that power laws at `z = 0` become smooth.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], n: usize) -> f64 {
    assert_eq!(a, 0.0);
    let g = |s: f64| 4.0 * s * s * s * f(s.powi(4));
    let mut edges = vec![0.0];
    edges.extend(
        breaks
            .iter()
            .copied()
            .filter(|&x| x > a && x < b)
            .map(|x| x.powf(0.25)),
    );
    edges.push(b.powf(0.25));
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = (hi - lo) / n as f64;
        let mut s = g(lo) + g(hi);
        for i in 1..n {
            s += g(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        total += s * h / 3.0;
    }
    total
}

/// Transmit power of a user whose own-cell distance is `sqrt(z / (pi lambda))`.
fn power_at(z: f64, p: &AnalyticParams) -> f64 {
    let x = (z / (PI * p.lambda_mbs)).sqrt();
    x.powf(p.alpha * p.epsilon).min(p.p_hat)
}

fn z_cap(p: &AnalyticParams) -> f64 {
    PI * p.lambda_mbs * p.rho().powi(2)
}

/// MBS success for alpha = 4 through `int_0^a v^-1/2 / (1+v) dv = 2 atan(sqrt a)`.
fn mbs_oracle(p: &AnalyticParams) -> f64 {
    assert_eq!(p.alpha, 4.0);
    let zc = z_cap(p);
    let exponent = |c: f64| {
        simpson(
            |z| power_at(z, p).sqrt() * 2.0 * (c * power_at(z, p)).sqrt().atan() * (-z).exp(),
            0.0,
            45.0,
            &[zc],
            400,
        )
    };
    simpson(
        |z| {
            if z == 0.0 {
                return 1.0;
            }
            let r2 = z / (PI * p.lambda_mbs);
            let c = p.beta / power_at(z, p);
            let j = r2 * c.sqrt() / 4.0 * exponent(c);
            (-2.0 * PI * p.lambda_mbs * j).exp() * (-z).exp()
        },
        0.0,
        30.0,
        &[zc],
        400,
    )
}

/// SBS success through the scaling route:
/// `E_r[ls / (ls + 2 lambda (beta/q)^(1/2) K / 4)]`, `K = pi E[pow^(1/2)]`.
fn sbs_oracle(p: &AnalyticParams) -> f64 {
    assert_eq!(p.alpha, 4.0);
    let zc = z_cap(p);
    let k = PI
        * simpson(
            |z| power_at(z, p).sqrt() * (-z).exp(),
            0.0,
            45.0,
            &[zc],
            20_000,
        );
    simpson(
        |z| {
            let c = p.beta / power_at(z, p);
            p.lambda_sbs / (p.lambda_sbs + 2.0 * p.lambda_mbs * c.sqrt() * k / 4.0) * (-z).exp()
        },
        0.0,
        45.0,
        &[zc],
        20_000,
    )
}

#[test]
fn closed_form_reference_points() {
    assert!((closed_form_da(1.0, 0.01, 0.02) - 0.806488).abs() < 1e-6);
    assert!((closed_form_da(10f64.powf(0.5), 0.01, 0.02) - 0.61945).abs() < 1e-4);
    assert!((closed_form_mbs(1.0) - 1.0 / (1.0 + PI / 4.0)).abs() < 1e-15);
}

#[test]
fn quadrature_pipeline_matches_closed_form_on_grid() {
    for beta in [0.5, 1.0, 3.1623] {
        for ls in [0.02, 0.05] {
            let q = AnalyticModel::new(params(0.0, 100.0, beta, ls))
                .unwrap()
                .prob_da_success()
                .unwrap();
            let cf = closed_form_da(beta, 0.01, ls);
            assert!(
                (q.value - cf).abs() <= 1e-4,
                "beta={beta} ls={ls}: {} vs {cf}",
                q.value
            );
            assert!((q.value - cf).abs() <= 1e-6);
        }
    }
}

#[test]
fn power_control_matches_independent_oracles() {
    for (p_hat, beta, ls) in [
        (100.0, 1.0, 0.02),
        (100.0, 10f64.sqrt(), 0.02),
        (10.0, 1.0, 0.02),
        (10.0, 10f64.sqrt(), 0.05),
    ] {
        for epsilon in [0.25, 0.5, 1.0] {
            let p = params(epsilon, p_hat, beta, ls);
            let m = AnalyticModel::new(p).unwrap();
            let pm = m.prob_mbs_success().unwrap().value;
            let ps = m.prob_sbs_success().unwrap().value;
            let (om, os) = (mbs_oracle(&p), sbs_oracle(&p));
            assert!(
                (pm - om).abs() < 2e-6,
                "eps={epsilon} P={p_hat} b={beta}: mbs {pm} vs {om}"
            );
            assert!(
                (ps - os).abs() < 2e-6,
                "eps={epsilon} P={p_hat} b={beta}: sbs {ps} vs {os}"
            );
        }
    }
}

#[test]
fn frozen_reference_values_with_power_control() {
    let cases = [
        (
            100.0,
            1.0,
            0.02,
            0.5523502512355273,
            0.5226934770542385,
            0.7863338549196859,
        ),
        (
            100.0,
            10f64.sqrt(),
            0.02,
            0.27942754143263177,
            0.391331034544198,
            0.5614099071078562,
        ),
        (
            10.0,
            1.0,
            0.02,
            0.5785918450776344,
            0.5502457091299828,
            0.8104698741160491,
        ),
        (
            10.0,
            10f64.sqrt(),
            0.02,
            0.3501966101022653,
            0.41083428596586136,
            0.6171581218090973,
        ),
        (
            100.0,
            1.0,
            0.035,
            0.5523502512355273,
            0.6466109227331366,
            0.8418054683453797,
        ),
        (
            100.0,
            1.0,
            0.05,
            0.5523502512355273,
            0.7172515786494729,
            0.8734277402188853,
        ),
    ];
    for (p_hat, beta, ls, pm, ps, da) in cases {
        let m = AnalyticModel::new(params(0.5, p_hat, beta, ls)).unwrap();
        assert!((m.prob_mbs_success().unwrap().value - pm).abs() < 1e-6);
        assert!((m.prob_sbs_success().unwrap().value - ps).abs() < 1e-6);
        assert!((m.prob_da_success().unwrap().value - da).abs() < 1e-6);
    }
}

#[test]
fn kernel_matches_monte_carlo() {
    let p = params(0.5, 10.0, 1.0, 0.02);
    let kernel = InterfererKernel::new(&p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let n = 10_000_000;
    let ts = [0.01, 0.3, 1.0, 4.0];
    let mut sums = [0.0f64; 4];
    let mut squares = [0.0f64; 4];
    for _ in 0..n {
        let u: f64 = rng.random();
        let z = -(1.0 - u).ln();
        let pow = power_at(z, &p);
        for (i, &t) in ts.iter().enumerate() {
            let v = t * pow / (1.0 + t * pow);
            sums[i] += v;
            squares[i] += v * v;
        }
    }
    for (i, &t) in ts.iter().enumerate() {
        let mean = sums[i] / n as f64;
        let se = ((squares[i] / n as f64 - mean * mean) / n as f64).sqrt();
        let k = kernel.eval(t).unwrap();
        assert!((k - mean).abs() < 3.0 * se, "t={t}: {k} vs {mean} +- {se}");
    }
    let direct = interferer_power_kernel(1.0, &p).unwrap();
    assert!((direct.value - 0.8651578825300885).abs() < 1e-10);
}

#[test]
fn small_power_control_factor_approaches_fixed_power() {
    let flat = AnalyticModel::new(params(0.0, 100.0, 1.0, 0.02))
        .unwrap()
        .prob_da_success()
        .unwrap()
        .value;
    let mut last = f64::INFINITY;
    for epsilon in [1e-2, 1e-3, 1e-4] {
        let v = AnalyticModel::new(params(epsilon, 100.0, 1.0, 0.02))
            .unwrap()
            .prob_da_success()
            .unwrap()
            .value;
        let d = (v - flat).abs();
        assert!(d < last);
        last = d;
    }
    assert!(last < 1e-3, "{last}");
}

#[test]
fn success_falls_with_threshold_and_rises_with_density() {
    for epsilon in [0.0, 0.5, 1.0] {
        let mut prev = 1.0;
        for beta in [0.1, 0.5, 1.0, 3.0, 10.0] {
            let v = AnalyticModel::new(params(epsilon, 100.0, beta, 0.02))
                .unwrap()
                .prob_da_success()
                .unwrap()
                .value;
            assert!(v < prev);
            prev = v;
        }
        let mut prev = 0.0;
        for ls in [0.01, 0.02, 0.05, 0.1] {
            let m = AnalyticModel::new(params(epsilon, 100.0, 1.0, ls)).unwrap();
            let v = m.prob_sbs_success().unwrap().value;
            assert!(v > prev);
            prev = v;
        }
    }
}

#[test]
fn reported_error_covers_refinement() {
    for epsilon in [0.0, 0.5, 1.0] {
        let coarse = params(epsilon, 100.0, 1.0, 0.02);
        let a = AnalyticModel::new(coarse).unwrap();
        let b = AnalyticModel::new(coarse.refined(4.0)).unwrap();
        for (qa, qb) in [
            (a.prob_mbs_success().unwrap(), b.prob_mbs_success().unwrap()),
            (a.prob_sbs_success().unwrap(), b.prob_sbs_success().unwrap()),
        ] {
            assert!(qa.estimated_error > 0.0);
            assert!(qa.estimated_error <= 1e-6 * qa.value + 1e-9);
            assert!((qa.value - qb.value).abs() <= qa.estimated_error + qb.estimated_error);
        }
    }
}

#[test]
fn laplace_functionals_are_valid_and_monotone() {
    let m = AnalyticModel::new(params(0.5, 100.0, 1.0, 0.02)).unwrap();
    let mut prev_m = 1.0;
    let mut prev_s = 1.0;
    for r in [0.5, 1.0, 2.0, 5.0, 9.0] {
        let lm = m.laplace_i_m(Branch::Capped, r).unwrap().value;
        let ls = m.laplace_i_s(Branch::Capped, r, 3.0).unwrap().value;
        assert!(lm > 0.0 && lm <= prev_m);
        assert!(ls > 0.0 && ls <= prev_s);
        prev_m = lm;
        prev_s = ls;
    }
    // the two branches agree at the cap radius
    let rho = m.params().rho();
    let s1 = m.laplace_i_m(Branch::Uncapped, rho).unwrap().value;
    let s2 = m.laplace_i_m(Branch::Capped, rho).unwrap().value;
    assert!((s1 - s2).abs() < 1e-12);
}
