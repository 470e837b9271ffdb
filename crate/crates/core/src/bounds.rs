//! Cramér-Rao machinery: predicted PCRBs combining the prediction prior with
//! predicted measurement information, and the measurement-only CRBs.

use crate::autodiff::Scalar;
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::params::SystemParams;
use crate::sensing::{jacobian_terms, predicted_variances};

/// Predicted PCRBs for relative position (m²) and velocity (m²/s²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcrbPair {
    pub pcrb_x: f64,
    pub pcrb_v: f64,
    pub weighted: f64,
}

impl PcrbPair {
    pub fn new(pcrb_x: f64, pcrb_v: f64, alpha: f64) -> Self {
        Self {
            pcrb_x,
            pcrb_v,
            weighted: weighted_sum(alpha, pcrb_x, pcrb_v),
        }
    }
}

/// α·a + (1 − α)·b with 0·∞ treated as 0.
pub fn weighted_sum<T: Scalar>(alpha: f64, a: T, b: T) -> T {
    if alpha == 1.0 {
        a
    } else if alpha == 0.0 {
        b
    } else {
        a * alpha + b * (1.0 - alpha)
    }
}

/// Closed-form PCRBs from the prior information r = M_p⁻¹.
///
/// The information matrix is
/// `[M̆⁻¹]₁₁ = r₁₁ + ι²/σ̆₁² + κ²/σ̆₂² + ζ²/σ̆₃²`, `[M̆⁻¹]₂₂ = r₂₂ + ν²/σ̆₃²`
/// with off-diagonal `νζ/σ̆₃² + r₁₂`, and the bounds are its inverse's diagonal.
pub fn pcrb_from_info<T: Scalar>(x: T, v: T, prior_info: &Mat2, p: &SystemParams) -> (T, T) {
    let t = jacobian_terms(x, v, p);
    let [s1, s2, s3] = predicted_variances(x, p);
    let r = &prior_info.0;
    let j22 = t.nu.square() / s3 + r[1][1];
    let j11 = t.iota.square() / s1 + t.kappa.square() / s2 + t.zeta.square() / s3 + r[0][0];
    // det = j22·j11 − (νζ/σ̆₃² + r₁₂)(νζ/σ̆₃² + r₂₁), expanded so the ν²ζ²/σ̆₃⁴
    // terms cancel symbolically instead of in floating point.
    let base = t.iota.square() / s1 + t.kappa.square() / s2 + r[0][0];
    let zeta_s3 = t.zeta / s3;
    let det = base * j22 + zeta_s3 * t.zeta * r[1][1]
        - zeta_s3 * t.nu * (r[0][1] + r[1][0])
        - T::cst(r[0][1] * r[1][0]);
    (j22 / det, j11 / det)
}

pub fn predicted_pcrb_info(
    x_breve: f64,
    v_breve: f64,
    prior_info: &Mat2,
    p: &SystemParams,
) -> PcrbPair {
    let (px, pv) = pcrb_from_info(x_breve, v_breve, prior_info, p);
    PcrbPair::new(px, pv, p.alpha)
}

/// Predicted PCRBs at (x̆, v̆) given the state-prediction MSE matrix.
pub fn predicted_pcrb(
    x_breve: f64,
    v_breve: f64,
    mse_pred: &Mat2,
    p: &SystemParams,
) -> Result<PcrbPair> {
    if !mse_pred.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let info = mse_pred.inverse()?;
    Ok(predicted_pcrb_info(x_breve, v_breve, &info, p))
}

/// CRB_x = (ι²/σ₁² + κ²/σ₂²)⁻¹ and the velocity information ν²/σ₃².
fn measurement_parts<T: Scalar>(x: T, v: T, p: &SystemParams) -> (T, T, T) {
    let t = jacobian_terms(x, v, p);
    let [s1, s2, s3] = predicted_variances(x, p);
    let crb_x = (t.iota.square() / s1 + t.kappa.square() / s2).recip();
    (crb_x, t.nu.square() / s3, t.zeta.square() / t.nu.square())
}

/// Measurement-only position bound, finite everywhere.
pub fn crb_x<T: Scalar>(x: T, p: &SystemParams) -> T {
    measurement_parts(x, T::cst(0.0), p).0
}

/// Measurement-only velocity bound `σ₃²/ν² + (ζ²/ν²)·CRB_x` for x ≠ 0.
pub fn crb_v<T: Scalar>(x: T, v: T, p: &SystemParams) -> T {
    let (cx, nu_info, ratio) = measurement_parts(x, v, p);
    nu_info.recip() + ratio * cx
}

/// (CRB_x, CRB_v) at (x, v). CRB_v is +∞ at x = 0 where Doppler carries no
/// velocity information.
pub fn crb_measurement(x: f64, v: f64, p: &SystemParams) -> (f64, f64) {
    let cx = crb_x(x, p);
    if x == 0.0 {
        return (cx, f64::INFINITY);
    }
    (cx, crb_v(x, v, p))
}

/// g(x, v) = α·CRB_x + (1 − α)·CRB_v.
pub fn weighted_g(x: f64, v: f64, p: &SystemParams) -> f64 {
    let (cx, cv) = crb_measurement(x, v, p);
    weighted_sum(p.alpha, cx, cv)
}

/// g(x, 0) on any scalar; callers keep x away from 0 unless α = 1.
pub fn g_static<T: Scalar>(x: T, p: &SystemParams) -> T {
    if p.alpha == 1.0 {
        return crb_x(x, p);
    }
    weighted_sum(p.alpha, crb_x(x, p), crb_v(x, T::cst(0.0), p))
}

/// Trace of the predicted measurement MSE matrix (Hᵀ Q̆⁻¹ H)⁻¹.
pub fn measurement_mse_trace(x: f64, v: f64, p: &SystemParams) -> f64 {
    let (cx, cv) = crb_measurement(x, v, p);
    cx + cv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{jacobian, noise_cov_predicted, RelativeState};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_prior(rng: &mut ChaCha8Rng) -> Mat2 {
        let s1 = 10f64.powf(rng.random_range(-3.0..1.0));
        let s2 = 10f64.powf(rng.random_range(-3.0..1.0));
        let rho = rng.random_range(-0.95..0.95);
        let off = rho * (s1 * s2).sqrt();
        Mat2::new(s1, off, off, s2)
    }

    fn generic_route(x: f64, v: f64, mse_pred: &Mat2, p: &SystemParams) -> Mat2 {
        let h = jacobian(RelativeState::new(x, v), p);
        let w = noise_cov_predicted(x, p).0.map(|s| 1.0 / s);
        (h.weighted_gram(w) + mse_pred.inverse().unwrap())
            .inverse()
            .unwrap()
    }

    #[test]
    fn closed_form_matches_matrix_inverse() {
        let p = SystemParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let x = rng.random_range(-150.0..150.0);
            let v = rng.random_range(-30.0..30.0);
            let mp = random_prior(&mut rng);
            let b = predicted_pcrb(x, v, &mp, &p).unwrap();
            let m = generic_route(x, v, &mp, &p);
            assert_relative_eq!(b.pcrb_x, m.get(0, 0), max_relative = 1e-10);
            assert_relative_eq!(b.pcrb_v, m.get(1, 1), max_relative = 1e-10);
            // never worse than the prior alone
            assert!(b.pcrb_x <= mp.get(0, 0) * (1.0 + 1e-12));
            assert!(b.pcrb_v <= mp.get(1, 1) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn more_noise_never_helps() {
        let p = SystemParams::default();
        let mp = Mat2::new(0.5, 0.05, 0.05, 1.0);
        let base = predicted_pcrb(25.0, 1.5, &mp, &p).unwrap();
        for t in [1.0, 2.0, 10.0, 1e3] {
            let mut noisy = p;
            noisy.sigma2 *= t;
            let b = predicted_pcrb(25.0, 1.5, &mp, &noisy).unwrap();
            assert!(b.pcrb_x >= base.pcrb_x * (1.0 - 1e-12));
            assert!(b.pcrb_v >= base.pcrb_v * (1.0 - 1e-12));
        }
    }

    #[test]
    fn rejects_indefinite_prior() {
        let p = SystemParams::default();
        let bad = Mat2::new(1.0, 2.0, 2.0, 1.0);
        assert_eq!(
            predicted_pcrb(10.0, 0.0, &bad, &p),
            Err(Error::NotPositiveDefinite)
        );
    }

    #[test]
    fn zero_prior_information_gives_measurement_crb() {
        let p = SystemParams::default();
        for &(x, v) in &[(5.0, 0.0), (-31.0, 2.0), (80.0, -12.0)] {
            let b = predicted_pcrb_info(x, v, &Mat2::ZERO, &p);
            let (cx, cv) = crb_measurement(x, v, &p);
            assert_relative_eq!(b.pcrb_x, cx, max_relative = 1e-9);
            assert_relative_eq!(b.pcrb_v, cv, max_relative = 1e-9);
        }
    }

    #[test]
    fn crb_cases() {
        let p = SystemParams::default();
        let (cx, cv) = crb_measurement(30.0, 0.0, &p);
        let t = jacobian_terms(30.0, 0.0, &p);
        let s3 = noise_cov_predicted(30.0, &p).0[2];
        assert_relative_eq!(cv, s3 / (t.nu * t.nu), max_relative = 1e-14);
        assert!(cx.is_finite());

        let (cx0, cv0) = crb_measurement(0.0, 0.0, &p);
        assert!(cx0.is_finite());
        assert_eq!(cv0, f64::INFINITY);
        let near: Vec<f64> = [1.0, 0.1, 0.01]
            .iter()
            .map(|&x| crb_measurement(x, 0.0, &p).1)
            .collect();
        assert!(near[0] < near[1] && near[1] < near[2]);

        // matrix route (Hᵀ Q⁻¹ H)⁻¹
        for &(x, v) in &[(12.0, 3.0), (-40.0, -7.0), (100.0, 25.0)] {
            let h = jacobian(RelativeState::new(x, v), &p);
            let w = noise_cov_predicted(x, &p).0.map(|s| 1.0 / s);
            let m = h.weighted_gram(w).inverse().unwrap();
            let (cx, cv) = crb_measurement(x, v, &p);
            assert_relative_eq!(cx, m.get(0, 0), max_relative = 1e-10);
            assert_relative_eq!(cv, m.get(1, 1), max_relative = 1e-10);
        }
    }

    #[test]
    fn weighted_g_properties() {
        let p = SystemParams::default();
        let p1 = p.with_alpha(1.0);
        assert_eq!(weighted_g(20.0, 4.0, &p1), crb_measurement(20.0, 4.0, &p).0);
        assert_eq!(weighted_g(0.0, 0.0, &p1), crb_measurement(0.0, 0.0, &p).0);
        assert_eq!(weighted_g(0.0, 0.0, &p), f64::INFINITY);
        for i in 1..=40 {
            let x = 5.0 * i as f64;
            let g0 = weighted_g(x, 0.0, &p);
            assert_relative_eq!(g0, weighted_g(-x, 0.0, &p), max_relative = 1e-14);
            for v in [-30.0, -1.0, 0.5, 12.0] {
                assert!(weighted_g(x, v, &p) >= g0);
            }
        }
    }
}
