//! Per-slot trajectory optimization.
//!
//! [`p1`] minimizes the weighted predicted PCRB over the next predicted
//! relative position by successive convex approximation; [`sp1`] solves the
//! measurement-only limit in closed form or by safeguarded Newton.

pub mod p1;
pub mod sp1;

pub use p1::{design_trajectory, objective_f, qos_radius, solve_p1_sca, P1Instance, ScaResult};
pub use sp1::{
    convexity_lower_bound, crbx_curvature_certificate, solve_sp1, upper_anchor, xi_of_h, Sp1Branch,
    Sp1Result,
};
