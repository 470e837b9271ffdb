//! Constant-velocity state model over (relative position, relative velocity).

use crate::linalg::Mat2;

/// G = [[1, ΔT], [0, 1]].
pub fn state_transition(dt: f64) -> Mat2 {
    Mat2::new(1.0, dt, 0.0, 1.0)
}

/// Q_s = q̃ · [[ΔT³/3, ΔT²/2], [ΔT²/2, ΔT]].
pub fn process_noise_cov(dt: f64, q_tilde: f64) -> Mat2 {
    let dt2 = dt * dt;
    Mat2::new(dt2 * dt / 3.0, dt2 / 2.0, dt2 / 2.0, dt).scale(q_tilde)
}

/// Increment u_A = [(v_A,n − v_A,n−1)·ΔT, v_A,n − v_A,n−1] caused by a UAV velocity change.
pub fn uav_increment(v_prev: f64, v_next: f64, dt: f64) -> [f64; 2] {
    let dv = v_next - v_prev;
    [dv * dt, dv]
}
