//! Weighted predicted-PCRB minimization for the next slot.
//!
//! The velocity coupling v̆ = (x̆ − x̂ₙ₋₁)/ΔT reduces the problem to one
//! variable over an interval set by the rate threshold and the UAV speed
//! limit. Each SCA step minimizes the quadratic surrogate
//! `|f″(x̃)|(x − x̃)²/2 + f′(x̃)(x − x̃)` over that interval.

use crate::autodiff::{second_derivative, Scalar};
use crate::bounds::{pcrb_from_info, weighted_sum};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::params::SystemParams;

/// x_c: the largest |x̆| whose predicted rate still meets γ_C.
pub fn qos_radius(p: &SystemParams) -> Result<f64> {
    let pi2 = std::f64::consts::PI.powi(2);
    let d2_max = p.p_a * p.wavelength * p.wavelength * p.n_t
        / (16.0 * pi2 * p.sigma_c2 * (2f64.powf(p.gamma_c) - 1.0));
    let radicand = d2_max - p.h_alt * p.h_alt;
    if !(radicand > 0.0) {
        return Err(Error::InfeasibleQos { radicand });
    }
    Ok(radicand.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P1Instance {
    /// η = x̂ + v̂ΔT + v_A,n−1ΔT, where the object would be if the UAV stopped.
    pub eta_prev: f64,
    pub x_hat_prev: f64,
    pub mse_pred: Mat2,
    pub params: SystemParams,
    prior_info: Mat2,
}

impl P1Instance {
    pub fn new(
        eta_prev: f64,
        x_hat_prev: f64,
        mse_pred: Mat2,
        params: SystemParams,
    ) -> Result<Self> {
        if !mse_pred.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self {
            eta_prev,
            x_hat_prev,
            mse_pred,
            params,
            prior_info: mse_pred.inverse()?,
        })
    }

    pub fn prior_info(&self) -> &Mat2 {
        &self.prior_info
    }

    /// [max(−x_c, η − v_maxΔT), min(x_c, η + v_maxΔT)].
    pub fn feasible_interval(&self) -> Result<(f64, f64)> {
        let x_c = qos_radius(&self.params)?;
        let step = self.params.max_step();
        let lo = (-x_c).max(self.eta_prev - step);
        let hi = x_c.min(self.eta_prev + step);
        if lo > hi {
            return Err(Error::EmptyInterval { lo, hi });
        }
        Ok((lo, hi))
    }

    pub fn velocity_of(&self, x_breve: f64) -> f64 {
        (x_breve - self.x_hat_prev) / self.params.dt
    }
}

/// f(x̆) = α·PCRB_x + (1 − α)·PCRB_v at v̆ = (x̆ − x̂ₙ₋₁)/ΔT.
pub fn objective<T: Scalar>(x_breve: T, inst: &P1Instance) -> T {
    let p = &inst.params;
    let v = (x_breve - inst.x_hat_prev) / p.dt;
    let (px, pv) = pcrb_from_info(x_breve, v, &inst.prior_info, p);
    weighted_sum(p.alpha, px, pv)
}

/// (f, f′, f″) at x̆ by hyper-dual propagation.
pub fn objective_f(x_breve: f64, inst: &P1Instance) -> (f64, f64, f64) {
    second_derivative(|x| objective(x, inst), x_breve)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaResult {
    pub x_breve_opt: f64,
    pub v_breve_opt: f64,
    pub objective: f64,
    pub iterations: usize,
    /// (x̃_k, f(x̃_k)) per iteration, starting with the initial point.
    pub trace: Vec<(f64, f64)>,
}

const SCA_MAX_ITER: usize = 100;
const SCA_TOL: f64 = 1e-6;
const MAX_HALVINGS: usize = 40;
const FLAT_CURVATURE: f64 = 1e-18;
const SCAN_POINTS: usize = 32;

/// Minimizer of the surrogate `c(x − x0)²/2 + g(x − x0)` over [lo, hi].
fn surrogate_step(x0: f64, grad: f64, curvature: f64, lo: f64, hi: f64, trust: f64) -> f64 {
    let raw = if curvature < FLAT_CURVATURE {
        x0 - grad.signum() * trust
    } else {
        x0 - grad / curvature
    };
    raw.clamp(lo, hi)
}

fn sca_from(inst: &P1Instance, x0: f64, lo: f64, hi: f64) -> ScaResult {
    let trust = 0.1 * inst.params.max_step();
    let f = |x: f64| objective(x, inst);

    let mut x = x0.clamp(lo, hi);
    let mut fx = f(x);
    let mut trace = vec![(x, fx)];
    let mut iterations = 0;
    while iterations < SCA_MAX_ITER {
        iterations += 1;
        let (_, d1, d2) = objective_f(x, inst);
        let mut cand = surrogate_step(x, d1, d2.abs(), lo, hi, trust);
        let mut fc = f(cand);
        let mut halvings = 0;
        while !(fc <= fx) && halvings < MAX_HALVINGS {
            cand = 0.5 * (cand + x);
            fc = f(cand);
            halvings += 1;
        }
        if !(fc <= fx) {
            // no descent along the surrogate direction
            break;
        }
        let moved = (cand - x).abs();
        x = cand;
        fx = fc;
        trace.push((x, fx));
        if moved < SCA_TOL {
            break;
        }
    }
    ScaResult {
        x_breve_opt: x,
        v_breve_opt: inst.velocity_of(x),
        objective: fx,
        iterations,
        trace,
    }
}

/// Local minima of the objective on an evenly spaced scan of [lo, hi], endpoints included.
fn scan_starts(inst: &P1Instance, lo: f64, hi: f64) -> Vec<f64> {
    let xs: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / SCAN_POINTS as f64)
        .collect();
    let fs: Vec<f64> = xs.iter().map(|x| objective(*x, inst)).collect();
    (0..xs.len())
        .filter(|&i| {
            let left = i == 0 || fs[i] <= fs[i - 1];
            let right = i + 1 == xs.len() || fs[i] <= fs[i + 1];
            left && right
        })
        .map(|i| xs[i])
        .collect()
}

/// SCA from `x0` (clamped onto the feasible interval), restarted from every
/// basin seen on a coarse scan of the interval. The objective is not convex
/// near overhead, so a single start can stall in the wrong basin. Returns the
/// best run; ties go to the run from `x0`.
pub fn solve_p1_sca(inst: &P1Instance, x0: f64) -> Result<ScaResult> {
    let (lo, hi) = inst.feasible_interval()?;
    let mut best = sca_from(inst, x0, lo, hi);
    for start in scan_starts(inst, lo, hi) {
        let run = sca_from(inst, start, lo, hi);
        if run.objective < best.objective {
            best = run;
        }
    }
    Ok(best)
}

/// UAV position and velocity that realize the predicted relative position x̆:
/// x_A,n = η + x_A,n−1 − x̆ and v_A,n = (x_A,n − x_A,n−1)/ΔT.
pub fn design_trajectory(
    x_breve: f64,
    eta_prev: f64,
    uav_prev: (f64, f64),
    p: &SystemParams,
) -> Result<(f64, f64)> {
    let displacement = eta_prev - x_breve;
    let limit = p.max_step();
    if displacement.abs() > limit + 1e-9 {
        return Err(Error::VelocityBound {
            displacement,
            limit,
        });
    }
    let x_a = eta_prev + uav_prev.0 - x_breve;
    Ok((x_a, (x_a - uav_prev.0) / p.dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::weighted_g;
    use crate::sensing::achievable_rate;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn instance(eta: f64, x_hat: f64) -> P1Instance {
        P1Instance::new(
            eta,
            x_hat,
            Mat2::new(0.05, 0.1, 0.1, 1.1),
            SystemParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn qos_radius_reference() {
        let p = SystemParams::default();
        let x_c = qos_radius(&p).unwrap();
        assert_relative_eq!(x_c, 86.02, epsilon = 5e-3);
        assert_relative_eq!(achievable_rate(x_c, &p), p.gamma_c, max_relative = 1e-9);

        let mut last = x_c;
        for gamma in [10.0, 8.0, 4.0, 1.0, 0.1, 1e-3] {
            let mut q = p;
            q.gamma_c = gamma;
            let r = qos_radius(&q).unwrap();
            assert!(r > last);
            last = r;
        }
        let mut hard = p;
        hard.gamma_c = 16.0;
        assert!(matches!(
            qos_radius(&hard),
            Err(Error::InfeasibleQos { .. })
        ));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let inst = instance(30.0, 29.0);
        for x in [-60.0, -5.0, 3.0, 20.0, 31.0, 45.0, 80.0] {
            let (f, d1, d2) = objective_f(x, &inst);
            let h = 1e-4 * f64::max(1.0, x.abs());
            let fp = objective(x + h, &inst);
            let fm = objective(x - h, &inst);
            assert_relative_eq!(f, objective(x, &inst), max_relative = 1e-12);
            assert_relative_eq!(d1, (fp - fm) / (2.0 * h), max_relative = 1e-5);
            assert_relative_eq!(d2, (fp - 2.0 * f + fm) / (h * h), max_relative = 1e-3);
        }
    }

    #[test]
    fn reduces_to_measurement_bound_without_prior() {
        let mut inst = instance(30.0, 30.0);
        inst.prior_info = Mat2::ZERO;
        for x in [5.0, 30.0, 70.0] {
            inst.x_hat_prev = x;
            assert_relative_eq!(
                objective(x, &inst),
                weighted_g(x, 0.0, &inst.params),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn stationary_start_is_kept() {
        let inst = instance(30.0, 29.5);
        let first = solve_p1_sca(&inst, 30.0).unwrap();
        let again = solve_p1_sca(&inst, first.x_breve_opt).unwrap();
        assert_eq!(again.iterations, 1);
        assert!((again.x_breve_opt - first.x_breve_opt).abs() < 1e-6);
    }

    #[test]
    fn trace_is_monotone_and_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let eta = rng.random_range(-90.0..90.0);
            let inst = instance(eta, eta - rng.random_range(-3.0..3.0));
            let Ok((lo, hi)) = inst.feasible_interval() else {
                continue;
            };
            let r = solve_p1_sca(&inst, eta).unwrap();
            assert!(r.trace.windows(2).all(|w| w[1].1 <= w[0].1));
            assert!(r.x_breve_opt >= lo - 1e-9 && r.x_breve_opt <= hi + 1e-9);
            assert_eq!(
                r.v_breve_opt,
                (r.x_breve_opt - inst.x_hat_prev) / inst.params.dt
            );
        }
    }

    #[test]
    fn empty_interval_is_an_error() {
        let inst = instance(200.0, 199.0);
        assert!(matches!(
            solve_p1_sca(&inst, 200.0),
            Err(Error::EmptyInterval { .. })
        ));
    }

    #[test]
    fn trajectory_design() {
        let p = SystemParams::default();
        assert_eq!(
            design_trajectory(30.0, 30.0, (12.0, 4.0), &p).unwrap(),
            (12.0, 0.0)
        );
        let (x_a, v_a) = design_trajectory(28.0, 31.0, (12.0, 4.0), &p).unwrap();
        assert_eq!(x_a, 15.0);
        assert_relative_eq!(v_a, 15.0, max_relative = 1e-14);
        // object lands where it was predicted relative to the new UAV position
        assert_eq!(31.0 + 12.0 - x_a, 28.0);
        assert!(matches!(
            design_trajectory(20.0, 30.0, (0.0, 0.0), &p),
            Err(Error::VelocityBound { .. })
        ));
        let (_, v) = design_trajectory(24.0, 30.0, (0.0, 0.0), &p).unwrap();
        assert!(v.abs() <= p.v_a_max + 1e-9);
    }
}
