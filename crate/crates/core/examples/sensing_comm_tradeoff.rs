// Rate against sensing performance as the UAV moves away from overhead.

use isac_track::experiments::{linear_grid, tradeoff};
use isac_track::optimize::solve_sp1;
use isac_track::SystemParams;

pub fn run_example() -> isac_track::Result<()> {
    let params = SystemParams::default();
    let a1 = 0.15;
    let xs = linear_grid(0.0, 100.0, 0.05)?;
    let frontier = tradeoff(&params, &[0.0, 0.5, 0.9, 1.0], a1, &xs)?;

    for alpha in [0.0, 0.5, 0.9, 1.0] {
        let pts: Vec<_> = frontier.iter().filter(|t| t.alpha == alpha).collect();
        let first = pts[0];
        let best = pts[pts.len() - 1];
        let mut q = params.with_alpha(alpha);
        q.a1 = a1;
        println!(
            "alpha {alpha:.1}: max rate {:.3} bps/Hz (sensing {:.3e}), best sensing {:.3e} at x = {:.2} m (SP1 x* = {:.3} m)",
            first.rate,
            first.sensing_perf,
            best.sensing_perf,
            best.x,
            solve_sp1(&q)?.x_star
        );
    }
    Ok(())
}

fn main() {
    run_example().expect("tradeoff failed");
}
