//! Measurement-MSE-only optimum.
//!
//! With the prediction prior dropped, the bound g(x, v) is minimized at v = 0
//! and a unique x* in [x_l, x_u], giving a constant elevation angle
//! φ* = atan(H/x*).

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::autodiff::{second_derivative, Scalar};
use crate::bounds::{crb_v, crb_x, g_static, weighted_g};
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// ξ(H) = 4a₁²H² − 5c²a₂². Its sign decides whether CRB_x has its minimum overhead.
pub fn xi_of_h(p: &SystemParams) -> f64 {
    4.0 * p.a1 * p.a1 * p.h_alt * p.h_alt - 5.0 * p.c * p.c * p.a2 * p.a2
}

/// χ̄ = 2(1 + 5c²a₂²/ξ)^{1/2}, defined for ξ > 0.
pub fn chi_bar(p: &SystemParams) -> Option<f64> {
    let xi = xi_of_h(p);
    (xi > 0.0).then(|| 2.0 * (1.0 + 5.0 * p.c * p.c * p.a2 * p.a2 / xi).sqrt())
}

/// x_l: g(x, 0) is convex on [x_l, ∞).
pub fn convexity_lower_bound(p: &SystemParams) -> f64 {
    match chi_bar(p) {
        Some(chi) => p.h_alt / chi.sqrt(),
        None => 0.0,
    }
}

/// x_u = H/√2, the minimizer of the velocity bound.
pub fn upper_anchor(p: &SystemParams) -> f64 {
    p.h_alt / std::f64::consts::SQRT_2
}

/// d²CRB_x/dχ² written in χ = (H/x)².
///
/// `B(χ+1)³ Σ_{j=0}^{7} ρ_j χ^j / (χ⁴ (a₂²c²χ³ + 4a₁²H²(χ+1)²)³)` with
/// ρ₀' = 48ρ₀, ρ₁ = 192ρ₀, ρ₂ = 288ρ₀, ρ₃ = ρ₁ + 3ρ₅/2, ρ₄ = 48ρ₀ + 17ρ₅/6,
/// ρ₅ = 24a₂²c²√ρ₀, ρ₆ = −3a₂²c²ξ(H), ρ₇ = −a₂²c²ξ(H), where ρ₀ = a₁⁴H⁴.
pub fn crbx_curvature_certificate(chi: f64, p: &SystemParams) -> f64 {
    let coeffs = certificate_coefficients(p);
    let poly = coeffs.iter().rev().fold(0.0, |acc, r| acc * chi + r);
    let (a1, a2, c, h) = (p.a1, p.a2, p.c, p.h_alt);
    let b = 2.0 * a1 * a1 * a2 * a2 * c * c * h.powi(6) * p.sigma2 / p.radar_budget();
    let inner = a2 * a2 * c * c * chi.powi(3) + 4.0 * a1 * a1 * h * h * (chi + 1.0).powi(2);
    b * (chi + 1.0).powi(3) * poly / (chi.powi(4) * inner.powi(3))
}

/// Coefficients of χ⁰ … χ⁷ in the certificate numerator.
pub fn certificate_coefficients(p: &SystemParams) -> [f64; 8] {
    let rho0 = (p.a1 * p.h_alt).powi(4);
    let rho5 = 24.0 * p.a2 * p.a2 * p.c * p.c * rho0.sqrt();
    let rho1 = 192.0 * rho0;
    let rho7 = -p.a2 * p.a2 * p.c * p.c * xi_of_h(p);
    [
        48.0 * rho0,
        rho1,
        1.5 * rho1,
        rho1 + 1.5 * rho5,
        48.0 * rho0 + 17.0 * rho5 / 6.0,
        rho5,
        3.0 * rho7,
        rho7,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sp1Branch {
    Alpha0,
    Alpha1XiNonpos,
    Alpha1XiPos,
    InteriorNewton,
}

impl Sp1Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sp1Branch::Alpha0 => "alpha0",
            Sp1Branch::Alpha1XiNonpos => "alpha1_xi_nonpos",
            Sp1Branch::Alpha1XiPos => "alpha1_xi_pos",
            Sp1Branch::InteriorNewton => "interior_newton",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sp1Result {
    pub x_star: f64,
    pub v_star: f64,
    pub phi_star: f64,
    pub g_star: f64,
    pub x_l: f64,
    pub x_u: f64,
    pub branch: Sp1Branch,
    pub iterations: usize,
}

/// (g, g′, g″) of g(x, 0).
pub fn g_static_derivatives(x: f64, p: &SystemParams) -> (f64, f64, f64) {
    second_derivative(|t| g_static(t, p), x)
}

const NEWTON_MAX_ITER: usize = 200;

pub fn solve_sp1(p: &SystemParams) -> Result<Sp1Result> {
    let x_l = convexity_lower_bound(p);
    let x_u = upper_anchor(p);
    let finish = |x_star: f64, branch, iterations| {
        let phi_star = if x_star == 0.0 {
            FRAC_PI_2
        } else {
            p.h_alt.atan2(x_star)
        };
        Sp1Result {
            x_star,
            v_star: 0.0,
            phi_star,
            g_star: weighted_g(x_star, 0.0, p),
            x_l,
            x_u,
            branch,
            iterations,
        }
    };

    if p.alpha == 0.0 {
        return Ok(finish(x_u, Sp1Branch::Alpha0, 0));
    }
    if p.alpha == 1.0 {
        let xi = xi_of_h(p);
        if xi <= 0.0 {
            return Ok(finish(0.0, Sp1Branch::Alpha1XiNonpos, 0));
        }
        let chi_bar = chi_bar(p).expect("xi > 0");
        let angle = (5f64.sqrt() * p.c * p.a2 / xi.sqrt()).atan() / 3.0;
        let chi_1 = chi_bar * angle.cos();
        return Ok(finish(p.h_alt / chi_1.sqrt(), Sp1Branch::Alpha1XiPos, 0));
    }

    // CRB_v blows up at x = 0, so a tiny positive x stands in for x_l = 0.
    let mut lo = if x_l > 0.0 { x_l } else { 1e-6 * p.h_alt };
    let mut hi = x_u;
    let (_, d_lo, _) = g_static_derivatives(lo, p);
    let (_, d_hi, _) = g_static_derivatives(hi, p);
    if d_lo == 0.0 {
        return Ok(finish(lo, Sp1Branch::InteriorNewton, 0));
    }
    if d_hi == 0.0 {
        return Ok(finish(hi, Sp1Branch::InteriorNewton, 0));
    }
    if !(d_lo < 0.0 && d_hi > 0.0) {
        return Err(Error::Bracket {
            x_l: lo,
            x_u: hi,
            d_lo,
            d_hi,
        });
    }

    let tol = 1e-9 * p.h_alt;
    let mut x = 0.5 * (lo + hi);
    for iter in 1..=NEWTON_MAX_ITER {
        let (_, d1, d2) = g_static_derivatives(x, p);
        if d1 == 0.0 {
            return Ok(finish(x, Sp1Branch::InteriorNewton, iter));
        }
        if d1 < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - d1 / d2;
        let next = if d2 > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() < tol || hi - lo < tol {
            return Ok(finish(next, Sp1Branch::InteriorNewton, iter));
        }
        x = next;
    }
    Ok(finish(x, Sp1Branch::InteriorNewton, NEWTON_MAX_ITER))
}

/// CRB_x and CRB_v(·, 0) derivative in x, used by checks of the bracket.
pub fn component_slopes(x: f64, p: &SystemParams) -> (f64, f64) {
    let (_, dx, _) = second_derivative(|t| crb_x(t, p), x);
    let (_, dv, _) = second_derivative(|t| crb_v(t, Scalar::cst(0.0), p), x);
    (dx, dv)
}
