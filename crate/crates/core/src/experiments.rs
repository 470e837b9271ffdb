//! Experiment drivers behind the `isac` subcommands: CSV tables and run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bounds::g_static;
use crate::error::{Error, Result};
use crate::optimize::{solve_sp1, Sp1Result};
use crate::params::{ParamsFile, SystemParams};
use crate::sensing::achievable_rate;
use crate::sim::{ScenarioConfig, SlotRecord};

pub const TRACK_HEADER: [&str; 18] = [
    "n",
    "t_s",
    "x_true_m",
    "v_true_mps",
    "x_hat_m",
    "v_hat_mps",
    "x_breve_m",
    "v_breve_mps",
    "x_uav_m",
    "v_uav_mps",
    "pcrb_x_pred",
    "pcrb_v_pred",
    "pcrb_x_actual",
    "pcrb_v_actual",
    "weighted_actual",
    "rate_bpshz",
    "tr_mp",
    "tr_mm",
];

pub const SWEEP_HEADER: [&str; 5] = ["alpha", "H_m", "x_star_m", "phi_star_deg", "branch"];

pub const TRADEOFF_HEADER: [&str; 4] = ["alpha", "x_m", "rate_bpshz", "sensing_perf"];

/// 17 significant digits, enough to round-trip an f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Writes every `every`-th slot (slot index divisible by `every`).
pub fn write_track_csv<W: Write>(out: W, records: &[SlotRecord], every: usize) -> Result<()> {
    if every == 0 {
        return Err(Error::Config("--every must be >= 1".into()));
    }
    let mut w = csv_writer(out);
    w.write_record(TRACK_HEADER)?;
    for r in records.iter().filter(|r| r.slot % every == 0) {
        let mut row = vec![r.slot.to_string()];
        row.extend(
            [
                r.time,
                r.truth.x,
                r.truth.v,
                r.estimate.x,
                r.estimate.v,
                r.predicted.x,
                r.predicted.v,
                r.uav_pos,
                r.uav_vel,
                r.pcrb_pred.x,
                r.pcrb_pred.v,
                r.pcrb_actual.x,
                r.pcrb_actual.v,
                r.pcrb_actual.weighted,
                r.rate,
                r.tr_mp,
                r.tr_mm,
            ]
            .map(fmt_f64),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Evenly spaced grid from `lo` to `hi` inclusive, computed by index.
pub fn linear_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(Error::Config(format!("bad grid {lo}:{hi}:{step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// Parses `lo:hi:step`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(format!("grid `{text}`: {e}")))?;
    match parts[..] {
        [lo, hi, step] => linear_grid(lo, hi, step),
        _ => Err(Error::Config(format!("grid `{text}` must be lo:hi:step"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub h: f64,
    /// `Err` carries the solver diagnostic for the cell.
    pub solution: std::result::Result<Sp1Result, String>,
}

impl SweepRow {
    pub fn phi_star_deg(&self) -> Option<f64> {
        self.solution.as_ref().ok().map(|s| s.phi_star.to_degrees())
    }
}

pub fn sweep_angle(p: &SystemParams, alphas: &[f64], heights: &[f64]) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(alphas.len() * heights.len());
    for &alpha in alphas {
        for &h in heights {
            let cell = p.with_alpha(alpha).with_altitude(h);
            let solution = cell
                .validate()
                .and_then(|_| solve_sp1(&cell))
                .map_err(|e| e.to_string());
            rows.push(SweepRow { alpha, h, solution });
        }
    }
    rows
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        let (x, phi, branch) = match &r.solution {
            Ok(s) => (
                fmt_f64(s.x_star),
                fmt_f64(s.phi_star.to_degrees()),
                s.branch.as_str().to_string(),
            ),
            Err(e) => ("NaN".into(), "NaN".into(), format!("error: {e}")),
        };
        w.write_record([fmt_f64(r.alpha), fmt_f64(r.h), x, phi, branch])?;
    }
    w.flush()?;
    Ok(())
}

/// `(H, φ*)` in degrees for one α, skipping failed cells.
pub fn angle_curve(rows: &[SweepRow], alpha: f64) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| r.alpha == alpha)
        .filter_map(|r| r.phi_star_deg().map(|phi| (r.h, phi)))
        .collect()
}

/// Largest altitude still attaining the maximum elevation angle of the curve.
pub fn knee_altitude(curve: &[(f64, f64)]) -> Option<f64> {
    let max = curve.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    curve
        .iter()
        .filter(|c| c.1 >= max - 1e-12)
        .map(|c| c.0)
        .reduce(f64::max)
}

/// Number of local maxima, flat runs counted once. Steps no larger than
/// `flat_tol` count as flat.
pub fn count_local_maxima(values: &[f64], flat_tol: f64) -> usize {
    let diffs: Vec<f64> = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| d.abs() > flat_tol)
        .collect();
    let rises_at_start = diffs.first().is_some_and(|d| *d < 0.0);
    let peaks = diffs
        .windows(2)
        .filter(|w| w[0] > 0.0 && w[1] < 0.0)
        .count();
    peaks + usize::from(rises_at_start)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffPoint {
    pub alpha: f64,
    pub x: f64,
    pub rate: f64,
    /// `1/g(x, 0)`; zero where the measurement bound is infinite.
    pub sensing_perf: f64,
}

/// Non-dominated (rate, sensing) pairs over a non-negative x grid, per α.
pub fn tradeoff(
    p: &SystemParams,
    alphas: &[f64],
    a1: f64,
    xs: &[f64],
) -> Result<Vec<TradeoffPoint>> {
    if xs.iter().any(|x| *x < 0.0) {
        return Err(Error::Config("tradeoff grid must be non-negative".into()));
    }
    let mut xs = xs.to_vec();
    xs.sort_by(f64::total_cmp);
    let mut frontier = Vec::new();
    for &alpha in alphas {
        let mut q = p.with_alpha(alpha);
        q.a1 = a1;
        q.validate()?;
        // rate falls with |x|, so a point survives iff it beats every closer one on sensing
        let mut best = f64::NEG_INFINITY;
        for &x in &xs {
            let g = g_static(x, &q);
            let sensing_perf = if g.is_finite() { 1.0 / g } else { 0.0 };
            if sensing_perf > best {
                best = sensing_perf;
                frontier.push(TradeoffPoint {
                    alpha,
                    x,
                    rate: achievable_rate(x, &q),
                    sensing_perf,
                });
            }
        }
    }
    Ok(frontier)
}

pub fn write_tradeoff_csv<W: Write>(out: W, points: &[TradeoffPoint]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(TRADEOFF_HEADER)?;
    for t in points {
        w.write_record([t.alpha, t.x, t.rate, t.sensing_perf].map(fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

pub fn sp1_report(r: &Sp1Result, p: &SystemParams) -> String {
    format!(
        "alpha = {}\nH_m = {}\nx_star_m = {}\nv_star_mps = {}\nphi_star_rad = {}\nphi_star_deg = {}\n\
         g_star = {}\nx_l_m = {}\nx_u_m = {}\nbranch = {}\niterations = {}\n",
        p.alpha,
        p.h_alt,
        fmt_f64(r.x_star),
        fmt_f64(r.v_star),
        fmt_f64(r.phi_star),
        fmt_f64(r.phi_star.to_degrees()),
        fmt_f64(r.g_star),
        fmt_f64(r.x_l),
        fmt_f64(r.x_u),
        r.branch.as_str(),
        r.iterations,
    )
}

/// Everything needed to regenerate an output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub args: Vec<String>,
    pub params: ParamsFile,
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(subcommand: &str, args: Vec<String>, params: ParamsFile) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            args,
            params,
            seeds: Vec::new(),
            scenario: None,
            outputs: Vec::new(),
        }
    }

    /// `out.csv` -> `out.csv.manifest.json`
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn write_next_to(&self, output: &Path) -> Result<PathBuf> {
        let path = Self::path_for(output);
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }
}
