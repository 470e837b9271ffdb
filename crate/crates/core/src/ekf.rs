//! Extended Kalman filter over the relative (position, velocity) state.

use crate::error::Result;
use crate::linalg::{Mat2, Sym3};
use crate::motion::{process_noise_cov, state_transition};
use crate::params::SystemParams;
use crate::sensing::{jacobian, measure_mean, Measurement, RelativeState};

/// Posterior estimate x̂ₙ with its MSE matrix Mₙ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterState {
    pub est: RelativeState,
    pub mse: Mat2,
}

/// Prior x̆ₙ with the state-prediction MSE matrix M_p,n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub pred: RelativeState,
    pub mse_pred: Mat2,
}

/// M_p = G·M·Gᵀ + Q_s. Does not depend on the UAV command.
pub fn predicted_mse(mse: &Mat2, p: &SystemParams) -> Mat2 {
    (mse.congruence(&state_transition(p.dt)) + process_noise_cov(p.dt, p.q_tilde)).symmetrize()
}

/// x̆ = G·x̂ − u_A, M_p = G·M·Gᵀ + Q_s.
pub fn predict(prev: &FilterState, uav_increment: [f64; 2], p: &SystemParams) -> Prediction {
    let g = state_transition(p.dt);
    let [x, v] = g.mul_vec(prev.est.as_array());
    Prediction {
        pred: RelativeState::new(x - uav_increment[0], v - uav_increment[1]),
        mse_pred: predicted_mse(&prev.mse, p),
    }
}

/// Kalman update with the Jacobian taken at the prediction and Q_m taken
/// from the measurement.
pub fn update(pred: &Prediction, y: &Measurement, p: &SystemParams) -> Result<FilterState> {
    let h = jacobian(pred.pred, p).0;
    let m = pred.mse_pred.0;
    let q = y.noise_cov.0;

    // P Hᵀ, 2×3
    let mut pht = [[0.0f64; 3]; 2];
    for (i, row) in pht.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            *cell = m[i][0] * h[k][0] + m[i][1] * h[k][1];
        }
    }
    // S = Q_m + H P Hᵀ
    let mut s = [[0.0f64; 3]; 3];
    for (a, row) in s.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = h[a][0] * pht[0][b] + h[a][1] * pht[1][b];
        }
        row[a] += q[a];
    }
    for a in 0..3 {
        for b in 0..a {
            let avg = 0.5 * (s[a][b] + s[b][a]);
            s[a][b] = avg;
            s[b][a] = avg;
        }
    }
    let s_inv = Sym3(s).inverse_pd()?.0;

    // K = P Hᵀ S⁻¹
    let mut k = [[0.0f64; 3]; 2];
    for i in 0..2 {
        for b in 0..3 {
            k[i][b] = (0..3).map(|a| pht[i][a] * s_inv[a][b]).sum();
        }
    }

    let predicted = measure_mean(pred.pred, p);
    let innov = [
        y.phi - predicted[0],
        y.tau - predicted[1],
        y.mu - predicted[2],
    ];
    let x0 = pred.pred.as_array();
    let est = [
        x0[0] + (0..3).map(|b| k[0][b] * innov[b]).sum::<f64>(),
        x0[1] + (0..3).map(|b| k[1][b] * innov[b]).sum::<f64>(),
    ];

    // Joseph form (I − KH) P (I − KH)ᵀ + K Q Kᵀ; equals (I − KH) P for this K
    // but is only second-order sensitive to rounding in K.
    let mut ikh = Mat2::IDENTITY.0;
    for (i, row) in ikh.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell -= (0..3).map(|b| k[i][b] * h[b][j]).sum::<f64>();
        }
    }
    let mut kqk = [[0.0f64; 2]; 2];
    for (i, row) in kqk.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|b| k[i][b] * q[b] * k[j][b]).sum();
        }
    }
    let mse = (pred.mse_pred.congruence(&Mat2(ikh)) + Mat2(kqk)).symmetrize();

    Ok(FilterState {
        est: RelativeState::from_array(est),
        mse,
    })
}
