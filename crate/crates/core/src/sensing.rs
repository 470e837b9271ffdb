//! Radar and communication link models: channel gains, the measurement map
//! h(x, v) = (φ, τ, μ), its Jacobian and the measurement noise variances.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::autodiff::Scalar;
use crate::linalg::{DiagMat3, Jacobian32};
use crate::params::SystemParams;

/// Object state relative to the UAV.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RelativeState {
    /// Relative position (m).
    pub x: f64,
    /// Relative velocity (m/s).
    pub v: f64,
}

impl RelativeState {
    pub fn new(x: f64, v: f64) -> Self {
        Self { x, v }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.x, self.v]
    }

    pub fn from_array([x, v]: [f64; 2]) -> Self {
        Self { x, v }
    }
}

/// One radar observation: elevation angle (rad), round-trip delay (s),
/// Doppler shift (Hz) and the noise covariance it was drawn with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub phi: f64,
    pub tau: f64,
    pub mu: f64,
    pub noise_cov: DiagMat3,
}

impl Measurement {
    pub fn as_array(&self) -> [f64; 3] {
        [self.phi, self.tau, self.mu]
    }
}

fn range(x: f64, p: &SystemParams) -> f64 {
    x.hypot(p.h_alt)
}

/// Large-scale radar gain G_r = β_r / d⁴.
pub fn radar_gain(x: f64, p: &SystemParams) -> f64 {
    let d2 = x * x + p.h_alt * p.h_alt;
    p.beta_r() / (d2 * d2)
}

/// Large-scale communication gain G_c = λ² / (16π²d²).
pub fn comm_gain(x: f64, p: &SystemParams) -> f64 {
    let d2 = x * x + p.h_alt * p.h_alt;
    p.wavelength * p.wavelength / (16.0 * PI * PI * d2)
}

/// Achievable rate log₂(1 + P_A·N_t·G_c/σ_C²) in bps/Hz.
pub fn achievable_rate(x: f64, p: &SystemParams) -> f64 {
    (1.0 + p.p_a * p.n_t * comm_gain(x, p) / p.sigma_c2).log2()
}

/// Elevation angle in (0, π); π/2 when the UAV is overhead.
pub fn elevation(x: f64, p: &SystemParams) -> f64 {
    if x == 0.0 {
        FRAC_PI_2
    } else {
        p.h_alt.atan2(x)
    }
}

/// Noise-free measurement h(x, v) = (φ, τ, μ).
pub fn measure_mean(s: RelativeState, p: &SystemParams) -> [f64; 3] {
    let d = range(s.x, p);
    [
        elevation(s.x, p),
        2.0 * d / p.c,
        -2.0 * p.f_c * s.v * s.x / (p.c * d),
    ]
}

/// Measurement noise variances at the true state.
pub fn noise_cov_actual(s: RelativeState, p: &SystemParams) -> DiagMat3 {
    let gain = radar_gain(s.x, p);
    let sin_phi = p.h_alt / range(s.x, p);
    let base = p.sigma2 / (p.p_a * p.n_sym * p.n_t * p.n_r * gain);
    DiagMat3([
        p.a1 * p.a1 * base / (sin_phi * sin_phi),
        p.a2 * p.a2 * base,
        p.a3 * p.a3 * base,
    ])
}

/// Measurement noise variances written directly in the predicted position.
pub fn predicted_variances<T: Scalar>(x: T, p: &SystemParams) -> [T; 3] {
    let h2 = p.h_alt * p.h_alt;
    let d2 = x.square() + h2;
    let scale = p.sigma2 / p.radar_budget();
    let d4 = d2.square();
    [
        d4 * d2 * (p.a1 * p.a1 * scale / h2),
        d4 * (p.a2 * p.a2 * scale),
        d4 * (p.a3 * p.a3 * scale),
    ]
}

pub fn noise_cov_predicted(x_breve: f64, p: &SystemParams) -> DiagMat3 {
    DiagMat3(predicted_variances(x_breve, p))
}

/// Nonzero Jacobian entries of h: ∂φ/∂x, ∂τ/∂x, ∂μ/∂x and ∂μ/∂v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianTerms<T> {
    pub iota: T,
    pub kappa: T,
    pub zeta: T,
    pub nu: T,
}

/// `iota` carries the sign of the analytic derivative of φ = atan2(H, x),
/// i.e. −H/(H² + x²). Only ι² enters any bound.
pub fn jacobian_terms<T: Scalar>(x: T, v: T, p: &SystemParams) -> JacobianTerms<T> {
    let h = p.h_alt;
    let d2 = x.square() + h * h;
    let d = d2.sqrt();
    let two_fc_over_c = 2.0 * p.f_c / p.c;
    JacobianTerms {
        iota: -(d2.recip() * h),
        kappa: x / d * (2.0 / p.c),
        zeta: -(v / (d2 * d)) * (two_fc_over_c * h * h),
        nu: -(x / d) * two_fc_over_c,
    }
}

pub fn jacobian(s: RelativeState, p: &SystemParams) -> Jacobian32 {
    let t = jacobian_terms(s.x, s.v, p);
    Jacobian32([[t.iota, 0.0], [t.kappa, 0.0], [t.zeta, t.nu]])
}

/// Mean plus independent Gaussian noise with the given variances.
pub fn sample_with_cov<R: Rng + ?Sized>(
    s: RelativeState,
    cov: DiagMat3,
    p: &SystemParams,
    rng: &mut R,
) -> Measurement {
    let mean = measure_mean(s, p);
    let mut draw = |i: usize| {
        let z: f64 = rng.sample(StandardNormal);
        mean[i] + cov.0[i].sqrt() * z
    };
    let (phi, tau, mu) = (draw(0), draw(1), draw(2));
    Measurement {
        phi,
        tau,
        mu,
        noise_cov: cov,
    }
}

/// Draws y = h(x) + z with z ~ N(0, Q_m(x)).
pub fn sample_measurement<R: Rng + ?Sized>(
    s: RelativeState,
    p: &SystemParams,
    rng: &mut R,
) -> Measurement {
    sample_with_cov(s, noise_cov_actual(s, p), p, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn defaults() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn radar_gain_reference() {
        let p = defaults();
        // λ²ε/(64π³) = 0.01 / (64 · 31.00627668) = 5.03930e-6
        assert_relative_eq!(p.beta_r(), 5.039302255187421e-6, max_relative = 1e-12);
        assert_relative_eq!(
            radar_gain(50.0, &p),
            p.beta_r() / 2.5e7,
            max_relative = 1e-14
        );
        assert_relative_eq!(radar_gain(50.0, &p), 2.0157e-13, max_relative = 1e-4);
        let mut last = radar_gain(0.0, &p);
        for x in [1.0, 10.0, 100.0, 1e3, 1e5] {
            let g = radar_gain(x, &p);
            assert!(g < last);
            last = g;
        }
    }

    #[test]
    fn rate_reference() {
        let p = defaults();
        // SNR = 10·32·1e-4/(16π²·5000)/1e-11 = 4.0528e3
        let snr = 10.0 * 32.0 * 1e-4 / (16.0 * PI * PI * 5000.0) / 1e-11;
        assert_relative_eq!(
            achievable_rate(50.0, &p),
            (1.0 + snr).log2(),
            max_relative = 1e-14
        );
        assert_relative_eq!(achievable_rate(50.0, &p), 11.985, max_relative = 1e-4);
        let r0 = achievable_rate(0.0, &p);
        for x in [-200.0, -3.0, 0.5, 1.0, 40.0, 150.0] {
            assert!(achievable_rate(x, &p) < r0);
        }
        assert!(achievable_rate(30.0, &p) > achievable_rate(31.0, &p));
    }

    #[test]
    fn measurement_geometry() {
        let p = defaults();
        let [phi, tau, mu] = measure_mean(RelativeState::new(0.0, 7.0), &p);
        assert_eq!(phi, FRAC_PI_2);
        assert_relative_eq!(tau, 2.0 * 50.0 / p.c, max_relative = 1e-15);
        assert_eq!(mu, 0.0);

        let [phi, tau, mu] = measure_mean(RelativeState::new(50.0, 0.0), &p);
        assert_relative_eq!(phi, PI / 4.0, max_relative = 1e-15);
        assert_relative_eq!(tau, 4.717347351056056e-7, max_relative = 1e-12);
        assert_eq!(mu, 0.0);

        // μ at x = H, v = 1: −2 f_c v x/(c d) = −√2 f_c / c
        let [_, _, mu] = measure_mean(RelativeState::new(50.0, 1.0), &p);
        assert_relative_eq!(mu, -2f64.sqrt() * p.f_c / p.c, max_relative = 1e-14);
    }

    #[test]
    fn measurement_symmetries() {
        let p = defaults();
        for &(x, v) in &[(3.0, 2.0), (31.0, -4.5), (120.0, 30.0)] {
            let a = measure_mean(RelativeState::new(x, v), &p);
            let b = measure_mean(RelativeState::new(-x, v), &p);
            let c = measure_mean(RelativeState::new(x, -v), &p);
            assert_relative_eq!(a[0] + b[0], PI, max_relative = 1e-15);
            assert_eq!(a[1], b[1]);
            assert_eq!(a[2], -c[2]);
        }
    }

    #[test]
    fn actual_noise_reference() {
        let p = defaults();
        let q = noise_cov_actual(RelativeState::new(50.0, 0.0), &p);
        // a₁²σ²/(P_A N_sym N_t N_r G_r sin²φ) with G_r = β_r/2.5e7, sin²φ = 1/2
        let want = 1e-11 / (10.0 * 1e4 * 1024.0 * p.beta_r() / 2.5e7 * 0.5);
        assert_relative_eq!(q.0[0], want, max_relative = 1e-13);
        assert_relative_eq!(q.0[0], 9.69e-7, max_relative = 1e-3);
        assert_relative_eq!(q.0[1] / q.0[2], (p.a2 / p.a3).powi(2), max_relative = 1e-14);

        let mut louder = p;
        louder.p_a *= 2.0;
        let q2 = noise_cov_actual(RelativeState::new(50.0, 0.0), &louder);
        for i in 0..3 {
            assert_relative_eq!(q2.0[i], q.0[i] / 2.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn predicted_noise_matches_actual() {
        let p = defaults();
        for i in 0..=80 {
            let x = -200.0 + 5.0 * i as f64;
            let a = noise_cov_actual(RelativeState::new(x, 3.0), &p);
            let b = noise_cov_predicted(x, &p);
            for k in 0..3 {
                assert_relative_eq!(a.0[k], b.0[k], max_relative = 1e-12);
            }
        }
        let at0 = noise_cov_predicted(0.0, &p);
        assert_relative_eq!(
            at0.0[0],
            50f64.powi(4) * 1e-11 / p.radar_budget(),
            max_relative = 1e-13
        );
        let at_h = noise_cov_predicted(50.0, &p);
        assert_relative_eq!(at_h.0[0] / at0.0[0], 8.0, max_relative = 1e-13);
    }

    #[test]
    fn jacobian_reference() {
        let p = defaults();
        let j = jacobian(RelativeState::new(50.0, 0.0), &p);
        assert_relative_eq!(j.0[0][0].abs(), 0.01, max_relative = 1e-14);
        assert_relative_eq!(j.0[1][0], 4.717347351056056e-9, max_relative = 1e-12);
        assert_eq!(j.0[2][0], 0.0);
        // −2f_c x/(c d) with c = 2.9979e8
        assert_relative_eq!(j.0[2][1], -141.52042053168168, max_relative = 1e-12);
        assert_eq!(j.0[0][1], 0.0);
        assert_eq!(j.0[1][1], 0.0);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = defaults();
        for i in 0..20 {
            for k in 0..20 {
                let x = -150.0 + 300.0 * (i as f64 + 0.5) / 20.0;
                let v = -30.0 + 60.0 * (k as f64 + 0.5) / 20.0;
                let s = RelativeState::new(x, v);
                let j = jacobian(s, &p);
                let hx = 1e-4 * x.abs().max(1.0);
                let hv = 1e-4 * v.abs().max(1.0);
                let fwd = measure_mean(RelativeState::new(x + hx, v), &p);
                let bwd = measure_mean(RelativeState::new(x - hx, v), &p);
                let up = measure_mean(RelativeState::new(x, v + hv), &p);
                let dn = measure_mean(RelativeState::new(x, v - hv), &p);
                for r in 0..3 {
                    let dx = (fwd[r] - bwd[r]) / (2.0 * hx);
                    let dv = (up[r] - dn[r]) / (2.0 * hv);
                    let scale = j.0[r][0].abs().max(1e-300);
                    assert!(
                        (dx - j.0[r][0]).abs() <= 1e-6 * scale,
                        "d{r}/dx at ({x},{v})"
                    );
                    assert!((dv - j.0[r][1]).abs() <= 1e-6 * j.0[r][1].abs().max(1e-12));
                }
            }
        }
    }

    #[test]
    fn degenerate_noise_returns_mean() {
        let p = defaults();
        let s = RelativeState::new(20.0, -2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = sample_with_cov(s, DiagMat3([0.0; 3]), &p, &mut rng);
        assert_eq!(y.as_array(), measure_mean(s, &p));
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = defaults();
        let s = RelativeState::new(20.0, -2.0);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..16)
                .map(|_| sample_measurement(s, &p, &mut rng).as_array())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }
}
