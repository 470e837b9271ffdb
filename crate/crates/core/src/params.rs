//! System constants and their on-disk configuration form.
//!
//! Powers are given in dBm in config files and converted to watts on load;
//! everything inside [`SystemParams`] is linear SI.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light used throughout (m/s).
pub const SPEED_OF_LIGHT: f64 = 2.9979e8;

pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf((p_dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(p_w: f64) -> f64 {
    10.0 * p_w.log10() + 30.0
}

/// Physical and system constants, linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Transmit power P_A (W).
    pub p_a: f64,
    /// Symbols per slot.
    pub n_sym: f64,
    /// Slot length ΔT (s).
    pub dt: f64,
    /// Carrier wavelength λ (m).
    pub wavelength: f64,
    /// Carrier frequency (Hz).
    pub f_c: f64,
    /// Radar receiver noise power σ² (W).
    pub sigma2: f64,
    /// Device receiver noise power σ_C² (W).
    pub sigma_c2: f64,
    /// Rate threshold γ_C (bps/Hz).
    pub gamma_c: f64,
    /// Process-noise intensity.
    pub q_tilde: f64,
    /// Radar cross section (m²).
    pub epsilon: f64,
    pub n_t: f64,
    pub n_r: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// UAV altitude H (m).
    pub h_alt: f64,
    /// Maximum UAV speed (m/s).
    pub v_a_max: f64,
    /// Position/velocity weighting α ∈ [0, 1].
    pub alpha: f64,
    /// Speed of light (m/s).
    pub c: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        ParamsFile::default()
            .into_params()
            .expect("default parameters are valid")
    }
}

impl SystemParams {
    /// β_r = λ²ε / (64π³), the radar path-loss coefficient (m⁴).
    pub fn beta_r(&self) -> f64 {
        self.wavelength * self.wavelength * self.epsilon / (64.0 * std::f64::consts::PI.powi(3))
    }

    /// P_A · N_sym · N_t · N_r · β_r, the common denominator of all measurement variances.
    pub fn radar_budget(&self) -> f64 {
        self.p_a * self.n_sym * self.n_t * self.n_r * self.beta_r()
    }

    /// Largest per-slot UAV displacement v_A,max · ΔT (m).
    pub fn max_step(&self) -> f64 {
        self.v_a_max * self.dt
    }

    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 14] = [
            ("p_a_dbm", self.p_a),
            ("n_sym", self.n_sym),
            ("dt", self.dt),
            ("wavelength", self.wavelength),
            ("f_c", self.f_c),
            ("sigma2_dbm", self.sigma2),
            ("sigma_c2_dbm", self.sigma_c2),
            ("gamma_c", self.gamma_c),
            ("q_tilde", self.q_tilde),
            ("epsilon", self.epsilon),
            ("n_t", self.n_t),
            ("n_r", self.n_r),
            ("h_alt", self.h_alt),
            ("c", self.c),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParam {
                    name,
                    reason: format!("must be finite and > 0, got {value}"),
                });
            }
        }
        for (name, value) in [("a1", self.a1), ("a2", self.a2), ("a3", self.a3)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParam {
                    name,
                    reason: format!("must be finite and > 0, got {value}"),
                });
            }
        }
        if !(self.v_a_max.is_finite() && self.v_a_max >= 0.0) {
            return Err(Error::InvalidParam {
                name: "v_a_max",
                reason: format!("must be finite and >= 0, got {}", self.v_a_max),
            });
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParam {
                name: "alpha",
                reason: format!("must lie in [0, 1], got {}", self.alpha),
            });
        }
        Ok(())
    }

    /// Non-fatal inconsistencies, e.g. λ·f_c that disagrees with c by more than 1%.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let ratio = self.wavelength * self.f_c / self.c;
        if (ratio - 1.0).abs() > 0.01 {
            out.push(format!(
                "wavelength * f_c = {:.6e} m/s differs from c = {:.6e} m/s by {:.2}%",
                self.wavelength * self.f_c,
                self.c,
                (ratio - 1.0) * 100.0
            ));
        }
        out
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_altitude(mut self, h_alt: f64) -> Self {
        self.h_alt = h_alt;
        self
    }

    pub fn to_file(&self) -> ParamsFile {
        ParamsFile {
            p_a_dbm: watts_to_dbm(self.p_a),
            n_sym: self.n_sym,
            dt: self.dt,
            wavelength: self.wavelength,
            f_c: self.f_c,
            sigma2_dbm: watts_to_dbm(self.sigma2),
            sigma_c2_dbm: watts_to_dbm(self.sigma_c2),
            gamma_c: self.gamma_c,
            q_tilde: self.q_tilde,
            epsilon: self.epsilon,
            n_t: self.n_t,
            n_r: self.n_r,
            a1: self.a1,
            a2: self.a2,
            a3: self.a3,
            h_alt: self.h_alt,
            v_a_max: self.v_a_max,
            alpha: self.alpha,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        ParamsFile::from_toml_str(text)?.into_params()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        ParamsFile::load(path)?.into_params()
    }
}

/// Flat `key = value` config file. Missing keys take the default value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsFile {
    pub p_a_dbm: f64,
    pub n_sym: f64,
    pub dt: f64,
    pub wavelength: f64,
    pub f_c: f64,
    pub sigma2_dbm: f64,
    pub sigma_c2_dbm: f64,
    pub gamma_c: f64,
    pub q_tilde: f64,
    pub epsilon: f64,
    pub n_t: f64,
    pub n_r: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub h_alt: f64,
    pub v_a_max: f64,
    pub alpha: f64,
}

impl Default for ParamsFile {
    fn default() -> Self {
        Self {
            p_a_dbm: 40.0,
            n_sym: 1e4,
            dt: 0.2,
            wavelength: 0.01,
            f_c: 3e10,
            sigma2_dbm: -80.0,
            sigma_c2_dbm: -80.0,
            gamma_c: 11.0,
            q_tilde: 5.0,
            epsilon: 100.0,
            n_t: 32.0,
            n_r: 32.0,
            a1: 1.0,
            a2: 1.2e-7,
            a3: 600.0,
            h_alt: 50.0,
            v_a_max: 30.0,
            alpha: 0.5,
        }
    }
}

impl ParamsFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn into_params(self) -> Result<SystemParams> {
        for (name, value) in [
            ("p_a_dbm", self.p_a_dbm),
            ("sigma2_dbm", self.sigma2_dbm),
            ("sigma_c2_dbm", self.sigma_c2_dbm),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidParam {
                    name,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        let params = SystemParams {
            p_a: dbm_to_watts(self.p_a_dbm),
            n_sym: self.n_sym,
            dt: self.dt,
            wavelength: self.wavelength,
            f_c: self.f_c,
            sigma2: dbm_to_watts(self.sigma2_dbm),
            sigma_c2: dbm_to_watts(self.sigma_c2_dbm),
            gamma_c: self.gamma_c,
            q_tilde: self.q_tilde,
            epsilon: self.epsilon,
            n_t: self.n_t,
            n_r: self.n_r,
            a1: self.a1,
            a2: self.a2,
            a3: self.a3,
            h_alt: self.h_alt,
            v_a_max: self.v_a_max,
            alpha: self.alpha,
            c: SPEED_OF_LIGHT,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat table of floats always serializes")
    }
}
