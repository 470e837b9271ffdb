//! Ground truth, UAV controllers and the per-slot tracking loop.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::{measurement_mse_trace, predicted_pcrb, PcrbPair};
use crate::ekf::{predict, predicted_mse, update, FilterState};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::motion::{process_noise_cov, uav_increment};
use crate::optimize::{design_trajectory, qos_radius, solve_p1_sca, P1Instance};
use crate::params::SystemParams;
use crate::sensing::{achievable_rate, sample_measurement, RelativeState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Proposed,
    RightAbove,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::RightAbove => "right-above",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Scheme::Proposed),
            "right-above" | "right_above" => Ok(Scheme::RightAbove),
            other => Err(Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Absolute positions and velocities along the flight axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorldState {
    pub obj_pos: f64,
    pub obj_vel: f64,
    pub uav_pos: f64,
    pub uav_vel: f64,
    pub slot: usize,
}

impl WorldState {
    pub fn relative(&self) -> RelativeState {
        RelativeState::new(self.obj_pos - self.uav_pos, self.obj_vel - self.uav_vel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub n_slots: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub init_obj_pos: f64,
    pub init_obj_vel: f64,
    pub init_uav_pos: f64,
    pub init_uav_vel: f64,
    /// Standard deviations of the initial (position, velocity) estimate error.
    pub init_est_std: (f64, f64),
    /// Diagonal of the initial estimation MSE matrix.
    pub init_mse: (f64, f64),
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_slots: 100,
            seed: 1,
            scheme: Scheme::Proposed,
            init_obj_pos: 80.0,
            init_obj_vel: 5.0,
            init_uav_pos: 0.0,
            init_uav_vel: 0.0,
            init_est_std: (1.0, 0.5),
            init_mse: (1.0, 0.25),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_slots < 2 {
            return Err(Error::Config(format!(
                "n_slots must be >= 2, got {}",
                self.n_slots
            )));
        }
        let entries = [
            self.init_est_std.0,
            self.init_est_std.1,
            self.init_mse.0,
            self.init_mse.1,
        ];
        if entries.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config(
                "initial std/mse entries must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }
}

/// Generator for trial `trial` of master seed `seed`. Trial 0 is the plain scenario run.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn process_noise_factor(p: &SystemParams) -> [f64; 3] {
    let q = process_noise_cov(p.dt, p.q_tilde);
    if q.get(0, 0) <= 0.0 {
        return [0.0; 3];
    }
    let l11 = q.get(0, 0).sqrt();
    let l21 = q.get(1, 0) / l11;
    let l22 = (q.get(1, 1) - l21 * l21).max(0.0).sqrt();
    [l11, l21, l22]
}

/// Advances the object one slot under the constant-velocity model with
/// process noise of covariance Q_s. The UAV is left where it is.
pub fn step_ground_truth<R: Rng + ?Sized>(
    w: &WorldState,
    p: &SystemParams,
    rng: &mut R,
) -> WorldState {
    let [l11, l21, l22] = process_noise_factor(p);
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    WorldState {
        obj_pos: w.obj_pos + w.obj_vel * p.dt + l11 * z1,
        obj_vel: w.obj_vel + l21 * z1 + l22 * z2,
        slot: w.slot + 1,
        ..*w
    }
}

/// Target predicted relative position and the UAV motion that realizes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub x_breve: f64,
    pub uav_pos: f64,
    pub uav_vel: f64,
    /// Set when the rate threshold could not be met within the speed limit.
    pub flagged: bool,
}

fn eta(filter: &FilterState, w: &WorldState, p: &SystemParams) -> f64 {
    filter.est.x + filter.est.v * p.dt + w.uav_vel * p.dt
}

fn command_for(
    x_breve: f64,
    eta: f64,
    w: &WorldState,
    p: &SystemParams,
    flagged: bool,
) -> Result<Command> {
    let (uav_pos, uav_vel) = design_trajectory(x_breve, eta, (w.uav_pos, w.uav_vel), p)?;
    Ok(Command {
        x_breve,
        uav_pos,
        uav_vel,
        flagged,
    })
}

/// SCA solution of the per-slot weighted predicted-PCRB problem.
pub fn controller_proposed(
    filter: &FilterState,
    w: &WorldState,
    p: &SystemParams,
) -> Result<Command> {
    let eta = eta(filter, w, p);
    let inst = P1Instance::new(eta, filter.est.x, predicted_mse(&filter.mse, p), *p)?;
    match solve_p1_sca(&inst, eta) {
        Ok(r) => command_for(r.x_breve_opt, eta, w, p, false),
        Err(Error::EmptyInterval { .. }) => {
            // closest velocity-feasible point to the QoS disc
            let x_c = qos_radius(p)?;
            let step = p.max_step();
            let target = if eta > 0.0 {
                (eta - step).max(x_c)
            } else {
                (eta + step).min(-x_c)
            };
            command_for(target, eta, w, p, true)
        }
        Err(e) => Err(e),
    }
}

/// Fly over the predicted object position, or as close as the speed limit allows.
pub fn controller_right_above(
    filter: &FilterState,
    w: &WorldState,
    p: &SystemParams,
) -> Result<Command> {
    let eta = eta(filter, w, p);
    let step = p.max_step();
    let x_breve = if eta.abs() <= step {
        0.0
    } else {
        eta - eta.signum() * step
    };
    command_for(x_breve, eta, w, p, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotRecord {
    pub slot: usize,
    pub time: f64,
    pub obj_pos: f64,
    pub obj_vel: f64,
    pub truth: RelativeStateRecord,
    pub predicted: RelativeStateRecord,
    pub estimate: RelativeStateRecord,
    pub uav_pos: f64,
    pub uav_vel: f64,
    pub pcrb_pred: PcrbRecord,
    /// Predicted-PCRB formula at the true relative state with the slot's M_p.
    pub pcrb_actual: PcrbRecord,
    /// Same, at the posterior estimate.
    pub pcrb_at_estimate: PcrbRecord,
    /// Achievable rate at the true relative position.
    pub rate: f64,
    /// Predicted rate at x̆.
    pub rate_pred: f64,
    pub tr_mp: f64,
    pub tr_mm: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeStateRecord {
    pub x: f64,
    pub v: f64,
}

impl From<RelativeState> for RelativeStateRecord {
    fn from(s: RelativeState) -> Self {
        Self { x: s.x, v: s.v }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PcrbRecord {
    pub x: f64,
    pub v: f64,
    pub weighted: f64,
}

impl From<PcrbPair> for PcrbRecord {
    fn from(b: PcrbPair) -> Self {
        Self {
            x: b.pcrb_x,
            v: b.pcrb_v,
            weighted: b.weighted,
        }
    }
}

pub fn initial_world(cfg: &ScenarioConfig) -> WorldState {
    WorldState {
        obj_pos: cfg.init_obj_pos,
        obj_vel: cfg.init_obj_vel,
        uav_pos: cfg.init_uav_pos,
        uav_vel: cfg.init_uav_vel,
        slot: 0,
    }
}

/// Runs one scenario on an explicit generator.
pub fn run_with_rng<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    p: &SystemParams,
    rng: &mut R,
) -> Result<Vec<SlotRecord>> {
    cfg.validate()?;
    p.validate()?;
    let mut world = initial_world(cfg);
    let truth0 = world.relative();
    let e1: f64 = rng.sample(StandardNormal);
    let e2: f64 = rng.sample(StandardNormal);
    let mut filter = FilterState {
        est: RelativeState::new(
            truth0.x + cfg.init_est_std.0 * e1,
            truth0.v + cfg.init_est_std.1 * e2,
        ),
        mse: Mat2::diag(cfg.init_mse.0, cfg.init_mse.1),
    };

    let mut records = Vec::with_capacity(cfg.n_slots);
    for slot in 1..=cfg.n_slots {
        let mut step = || -> Result<SlotRecord> {
            let cmd = match cfg.scheme {
                Scheme::Proposed => controller_proposed(&filter, &world, p)?,
                Scheme::RightAbove => controller_right_above(&filter, &world, p)?,
            };
            let u = uav_increment(world.uav_vel, cmd.uav_vel, p.dt);
            let prediction = predict(&filter, u, p);

            let mut next = step_ground_truth(&world, p, rng);
            next.uav_pos = cmd.uav_pos;
            next.uav_vel = cmd.uav_vel;
            let truth = next.relative();

            let y = sample_measurement(truth, p, rng);
            let posterior = update(&prediction, &y, p)?;

            let mp = prediction.mse_pred;
            let pred = prediction.pred;
            let record = SlotRecord {
                slot,
                time: slot as f64 * p.dt,
                obj_pos: next.obj_pos,
                obj_vel: next.obj_vel,
                truth: truth.into(),
                predicted: pred.into(),
                estimate: posterior.est.into(),
                uav_pos: next.uav_pos,
                uav_vel: next.uav_vel,
                pcrb_pred: predicted_pcrb(pred.x, pred.v, &mp, p)?.into(),
                pcrb_actual: predicted_pcrb(truth.x, truth.v, &mp, p)?.into(),
                pcrb_at_estimate: predicted_pcrb(posterior.est.x, posterior.est.v, &mp, p)?.into(),
                rate: achievable_rate(truth.x, p),
                rate_pred: achievable_rate(pred.x, p),
                tr_mp: mp.trace(),
                tr_mm: measurement_mse_trace(pred.x, pred.v, p),
                flagged: cmd.flagged,
            };
            world = next;
            filter = posterior;
            Ok(record)
        };
        records.push(step().map_err(|e| e.at_slot(slot))?);
    }
    Ok(records)
}

/// Runs `cfg` with the generator of `cfg.seed`, trial 0.
pub fn run_scenario(cfg: &ScenarioConfig, p: &SystemParams) -> Result<Vec<SlotRecord>> {
    run_with_rng(cfg, p, &mut trial_rng(cfg.seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::solve_sp1;
    use approx::assert_relative_eq;

    #[test]
    fn noiseless_object_moves_at_constant_velocity() {
        let mut p = SystemParams::default();
        p.q_tilde = 0.0;
        let mut rng = trial_rng(3, 0);
        let w = initial_world(&ScenarioConfig::default());
        let next = step_ground_truth(&w, &p, &mut rng);
        assert_eq!(next.obj_pos, w.obj_pos + w.obj_vel * p.dt);
        assert_eq!(next.obj_vel, w.obj_vel);
        assert_eq!(next.uav_pos, w.uav_pos);
        assert_eq!(next.slot, 1);
    }

    #[test]
    fn process_noise_covariance() {
        let p = SystemParams::default();
        let mut rng = trial_rng(4, 0);
        let w = WorldState {
            obj_pos: 0.0,
            obj_vel: 0.0,
            uav_pos: 0.0,
            uav_vel: 0.0,
            slot: 0,
        };
        let n = 10_000;
        let samples: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let s = step_ground_truth(&w, &p, &mut rng);
                (s.obj_pos, s.obj_vel)
            })
            .collect();
        let m = |f: &dyn Fn(&(f64, f64)) -> f64| samples.iter().map(f).sum::<f64>() / n as f64;
        let q = process_noise_cov(p.dt, p.q_tilde);
        assert_relative_eq!(m(&|s| s.0 * s.0), q.get(0, 0), max_relative = 0.05);
        assert_relative_eq!(m(&|s| s.0 * s.1), q.get(0, 1), max_relative = 0.05);
        assert_relative_eq!(m(&|s| s.1 * s.1), q.get(1, 1), max_relative = 0.05);
    }

    #[test]
    fn right_above_clamps() {
        let p = SystemParams::default();
        let step = p.max_step();
        let w = WorldState {
            obj_pos: 0.0,
            obj_vel: 0.0,
            uav_pos: 0.0,
            uav_vel: 0.0,
            slot: 0,
        };
        let f = |x: f64| FilterState {
            est: RelativeState::new(x, 0.0),
            mse: Mat2::diag(1.0, 1.0),
        };
        assert_eq!(
            controller_right_above(&f(0.0), &w, &p).unwrap().x_breve,
            0.0
        );
        let c = controller_right_above(&f(2.0 * step), &w, &p).unwrap();
        assert_relative_eq!(c.x_breve, step, max_relative = 1e-14);
        assert_relative_eq!(c.uav_vel, p.v_a_max, max_relative = 1e-12);
        let c = controller_right_above(&f(-5.0 * step), &w, &p).unwrap();
        assert_relative_eq!(c.uav_vel, -p.v_a_max, max_relative = 1e-12);
    }

    #[test]
    fn proposed_controller_holds_the_optimum() {
        // near-noiseless radar: the P1 optimum sits on the measurement-only optimum
        let mut p = SystemParams::default();
        p.sigma2 *= 1e-6;
        let x_star = solve_sp1(&p).unwrap().x_star;
        let w = WorldState {
            obj_pos: x_star,
            obj_vel: 0.0,
            uav_pos: 0.0,
            uav_vel: 0.0,
            slot: 0,
        };
        let f = FilterState {
            est: RelativeState::new(x_star, 0.0),
            mse: Mat2::diag(1.0, 1.0),
        };
        let c = controller_proposed(&f, &w, &p).unwrap();
        assert!(!c.flagged);
        assert!(
            (c.x_breve - x_star).abs() < 1e-6,
            "{} vs {x_star}",
            c.x_breve
        );
        assert!(c.uav_pos.abs() < 1e-6);
    }

    #[test]
    fn proposed_controller_flags_unreachable_qos() {
        let p = SystemParams::default();
        let w = WorldState {
            obj_pos: 0.0,
            obj_vel: 0.0,
            uav_pos: 0.0,
            uav_vel: 0.0,
            slot: 0,
        };
        let f = FilterState {
            est: RelativeState::new(120.0, 0.0),
            mse: Mat2::diag(1.0, 1.0),
        };
        let c = controller_proposed(&f, &w, &p).unwrap();
        assert!(c.flagged);
        assert_relative_eq!(c.x_breve, 120.0 - p.max_step(), max_relative = 1e-14);
    }

    #[test]
    fn scenario_is_deterministic_and_consistent() {
        let p = SystemParams::default();
        let cfg = ScenarioConfig::default();
        let a = run_scenario(&cfg, &p).unwrap();
        let b = run_scenario(&cfg, &p).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), cfg.n_slots);
        let max_step = p.max_step();
        let mut prev_uav = cfg.init_uav_pos;
        for r in &a {
            assert_eq!(r.truth.x, r.obj_pos - r.uav_pos);
            assert!((r.uav_pos - prev_uav).abs() <= max_step + 1e-9);
            assert!(r.uav_vel.abs() <= p.v_a_max + 1e-9);
            if !r.flagged {
                assert!(r.rate_pred >= p.gamma_c - 1e-9);
            }
            prev_uav = r.uav_pos;
        }
        let other = run_scenario(&ScenarioConfig { seed: 2, ..cfg }, &p).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn near_noiseless_estimates_track_truth() {
        let mut p = SystemParams::default();
        p.sigma2 *= 1e-6;
        let recs = run_scenario(&ScenarioConfig::default(), &p).unwrap();
        for r in recs.iter().skip(5) {
            assert!((r.estimate.x - r.truth.x).abs() < 1e-2, "slot {}", r.slot);
        }
    }

    #[test]
    fn rejects_short_scenarios() {
        let cfg = ScenarioConfig {
            n_slots: 1,
            ..Default::default()
        };
        assert!(matches!(
            run_scenario(&cfg, &SystemParams::default()),
            Err(Error::Config(_))
        ));
    }
}
