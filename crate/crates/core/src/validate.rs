//! Self-check suite run by `isac validate`.
//!
//! The model-level checks take the function under test as an argument so
//! they can be pointed at deliberately broken variants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{g_static, predicted_pcrb};
use crate::ekf::{predict, update, FilterState};
use crate::linalg::{Jacobian32, Mat2};
use crate::motion::process_noise_cov;
use crate::optimize::{objective_f, qos_radius, solve_sp1, P1Instance};
use crate::params::SystemParams;
use crate::sensing::{
    achievable_rate, jacobian, measure_mean, noise_cov_predicted, Measurement, RelativeState,
};
use crate::sim::{run_scenario, ScenarioConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn verdict(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name,
        passed,
        detail,
    }
}

fn failed(name: &'static str, e: crate::Error) -> CheckResult {
    verdict(name, false, format!("error: {e}"))
}

/// Analytic Jacobian against central differences of the measurement mean.
pub fn check_jacobian(
    jac: impl Fn(RelativeState, &SystemParams) -> Jacobian32,
    p: &SystemParams,
) -> CheckResult {
    let mut worst = 0.0f64;
    for i in 0..20 {
        for j in 0..20 {
            let x = -95.0 + 10.0 * i as f64;
            let v = -19.0 + 2.0 * j as f64;
            let s = RelativeState::new(x, v);
            let a = jac(s, p).0;
            let hx = 1e-6 * x.abs().max(1.0);
            let hv = 1e-6 * v.abs().max(1.0);
            let dx = |k: usize| {
                (measure_mean(RelativeState::new(x + hx, v), p)[k]
                    - measure_mean(RelativeState::new(x - hx, v), p)[k])
                    / (2.0 * hx)
            };
            let dv = |k: usize| {
                (measure_mean(RelativeState::new(x, v + hv), p)[k]
                    - measure_mean(RelativeState::new(x, v - hv), p)[k])
                    / (2.0 * hv)
            };
            for (k, row) in a.iter().enumerate() {
                let fd = [dx(k), dv(k)];
                let scale = fd[0].abs().max(fd[1].abs()).max(f64::MIN_POSITIVE);
                for c in 0..2 {
                    worst = worst.max((row[c] - fd[c]).abs() / scale);
                }
            }
        }
    }
    verdict(
        "jacobian_finite_difference",
        worst <= 1e-5,
        format!("max rel err {worst:.2e} (tol 1e-5)"),
    )
}

/// Q_s symmetric and positive semidefinite across a range of slot lengths and intensities.
pub fn check_process_noise(q_fn: impl Fn(f64, f64) -> Mat2) -> CheckResult {
    for dt in [0.01, 0.2, 1.0, 5.0] {
        for q in [0.1, 1.0, 5.0] {
            let m = q_fn(dt, q);
            if !m.is_covariance() {
                return verdict(
                    "process_noise_psd",
                    false,
                    format!("not a covariance at dt={dt}, q={q}: {m:?}"),
                );
            }
        }
    }
    verdict("process_noise_psd", true, "12 cases symmetric PSD".into())
}

/// Closed-form predicted PCRBs against inverting the assembled information matrix.
pub fn check_pcrb_closed_form(p: &SystemParams) -> CheckResult {
    let name = "pcrb_closed_form";
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let x = rng.random_range(-120.0..120.0);
        let v = rng.random_range(-20.0..20.0);
        let a: f64 = rng.random_range(0.05..3.0);
        let d = rng.random_range(0.05..3.0);
        let b = rng.random_range(-0.9..0.9) * (a * d).sqrt();
        let mp = Mat2::new(a, b, b, d);
        let pair = match predicted_pcrb(x, v, &mp, p) {
            Ok(pair) => pair,
            Err(e) => return failed(name, e),
        };
        let w = noise_cov_predicted(x, p).0.map(|s| 1.0 / s);
        let info = match mp.inverse() {
            Ok(inv) => inv + jacobian(RelativeState::new(x, v), p).weighted_gram(w),
            Err(e) => return failed(name, e),
        };
        let crb = match info.inverse() {
            Ok(c) => c,
            Err(e) => return failed(name, e),
        };
        worst = worst
            .max((pair.pcrb_x - crb.get(0, 0)).abs() / crb.get(0, 0))
            .max((pair.pcrb_v - crb.get(1, 1)).abs() / crb.get(1, 1));
    }
    verdict(
        name,
        worst <= 1e-8,
        format!("max rel err {worst:.2e} over 200 cases (tol 1e-8)"),
    )
}

pub fn check_magic_angle(p: &SystemParams) -> CheckResult {
    let name = "sp1_alpha0_angle";
    let target = 2f64.sqrt().atan().to_degrees();
    let mut worst = 0.0f64;
    for k in 1..=10 {
        match solve_sp1(&p.with_alpha(0.0).with_altitude(10.0 * k as f64)) {
            Ok(r) => worst = worst.max((r.phi_star.to_degrees() - target).abs()),
            Err(e) => return failed(name, e),
        }
    }
    verdict(
        name,
        worst <= 1e-3,
        format!("max |phi* - 54.7356 deg| = {worst:.2e}"),
    )
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Static optimum against a dense grid with golden-section refinement.
pub fn check_sp1_grid(p: &SystemParams) -> CheckResult {
    let name = "sp1_grid_oracle";
    let solved = match solve_sp1(p) {
        Ok(r) => r.x_star,
        Err(e) => return failed(name, e),
    };
    let g = |x: f64| g_static(x, p);
    let hi = 2.0 * p.h_alt;
    let n = 100_000;
    let step = hi / n as f64;
    let best = (1..=n)
        .map(|i| i as f64 * step)
        .min_by(|a, b| g(*a).total_cmp(&g(*b)))
        .unwrap_or(step);
    let oracle = golden_min(g, (best - step).max(1e-9), best + step);
    let err = (solved - oracle).abs();
    verdict(
        name,
        err <= 1e-4,
        format!("x*={solved:.6} oracle={oracle:.6} err={err:.1e}"),
    )
}

pub fn check_qos_boundary(p: &SystemParams) -> CheckResult {
    let name = "qos_boundary_rate";
    match qos_radius(p) {
        Ok(x_c) => {
            let rel = (achievable_rate(x_c, p) - p.gamma_c).abs() / p.gamma_c;
            verdict(
                name,
                rel <= 1e-9,
                format!("x_c={x_c:.4} m, rel err {rel:.1e}"),
            )
        }
        Err(e) => failed(name, e),
    }
}

/// Dual-number derivatives of the per-slot objective against central differences.
pub fn check_objective_derivatives(p: &SystemParams) -> CheckResult {
    let name = "objective_derivatives";
    let inst = match P1Instance::new(40.0, 38.0, Mat2::new(1.0, 0.3, 0.3, 2.0), *p) {
        Ok(i) => i,
        Err(e) => return failed(name, e),
    };
    let (mut e1, mut e2) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let x = 5.0 + 0.9 * i as f64;
        let h = 1e-4 * x;
        let (f0, d1, d2) = objective_f(x, &inst);
        let fp = objective_f(x + h, &inst).0;
        let fm = objective_f(x - h, &inst).0;
        let fd1 = (fp - fm) / (2.0 * h);
        let fd2 = (fp - 2.0 * f0 + fm) / (h * h);
        e1 = e1.max((d1 - fd1).abs() / d1.abs().max(1e-12 * f0));
        e2 = e2.max((d2 - fd2).abs() / d2.abs().max(1e-9 * f0));
    }
    verdict(
        name,
        e1 <= 1e-5 && e2 <= 1e-3,
        format!("f' rel {e1:.1e}, f'' rel {e2:.1e}"),
    )
}

pub fn check_ekf_update(p: &SystemParams) -> CheckResult {
    let name = "ekf_update_covariance";
    let prev = FilterState {
        est: RelativeState::new(30.0, 1.0),
        mse: Mat2::diag(1.0, 0.25),
    };
    let pred = predict(&prev, [0.0, 0.0], p);
    let [phi, tau, mu] = measure_mean(pred.pred, p);
    let y = Measurement {
        phi,
        tau,
        mu,
        noise_cov: noise_cov_predicted(pred.pred.x, p),
    };
    match update(&pred, &y, p) {
        Ok(post) => {
            let ok = post.mse.is_positive_definite() && post.mse.trace() <= pred.mse_pred.trace();
            verdict(
                name,
                ok,
                format!(
                    "tr M_p={:.3e} -> tr M={:.3e}",
                    pred.mse_pred.trace(),
                    post.mse.trace()
                ),
            )
        }
        Err(e) => failed(name, e),
    }
}

pub fn check_tracking_regime(p: &SystemParams) -> CheckResult {
    let name = "measurement_dominant_regime";
    match run_scenario(&ScenarioConfig::default(), p) {
        Ok(recs) => {
            let last = recs[recs.len() - 1];
            let ratio = last.tr_mp / last.tr_mm;
            verdict(name, ratio >= 1e2, format!("tr M_p / tr M_m = {ratio:.3e}"))
        }
        Err(e) => failed(name, e),
    }
}

pub fn check_determinism(p: &SystemParams) -> CheckResult {
    let name = "scenario_determinism";
    let cfg = ScenarioConfig {
        n_slots: 30,
        ..Default::default()
    };
    match (run_scenario(&cfg, p), run_scenario(&cfg, p)) {
        (Ok(a), Ok(b)) => verdict(name, a == b, "two runs with one seed compared".into()),
        (Err(e), _) | (_, Err(e)) => failed(name, e),
    }
}

pub fn run_suite(p: &SystemParams) -> Vec<CheckResult> {
    vec![
        check_jacobian(jacobian, p),
        check_process_noise(process_noise_cov),
        check_pcrb_closed_form(p),
        check_magic_angle(p),
        check_sp1_grid(p),
        check_qos_boundary(p),
        check_objective_derivatives(p),
        check_ekf_update(p),
        check_tracking_regime(p),
        check_determinism(p),
    ]
}

pub fn render_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status}  {:width$}  {}\n", r.name, r.detail));
    }
    let passed = results.iter().filter(|r| r.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", results.len()));
    out
}
