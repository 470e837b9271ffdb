// Optimal elevation angle versus UAV altitude for several PCRB weights.
//
// At α = 0 the angle never moves off arctan√2. At α = 1 the UAV sits directly
// overhead until a knee altitude, after which the angle drops.

use isac_track::experiments::{
    angle_curve, count_local_maxima, knee_altitude, linear_grid, sweep_angle,
};
use isac_track::SystemParams;

pub fn run_example() -> isac_track::Result<()> {
    let params = SystemParams::default();
    let alphas = [0.0, 0.3, 0.5, 0.7, 1.0];
    let heights = linear_grid(10.0, 100.0, 0.25)?;
    let rows = sweep_angle(&params, &alphas, &heights);

    for alpha in alphas {
        let curve = angle_curve(&rows, alpha);
        let phis: Vec<f64> = curve.iter().map(|c| c.1).collect();
        let (lo, hi) = phis
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(*p), b.max(*p))
            });
        println!(
            "alpha {alpha:.1}: phi* in [{lo:.4}, {hi:.4}] deg, peak at H = {:.2} m, {} local max",
            knee_altitude(&curve).unwrap_or(f64::NAN),
            count_local_maxima(&phis, 1e-9)
        );
    }
    Ok(())
}

fn main() {
    run_example().expect("sweep failed");
}
