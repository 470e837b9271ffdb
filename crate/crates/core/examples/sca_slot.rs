// Solve a single slot's trajectory problem by successive convex
// approximation and turn the result into a UAV command.

use isac_track::linalg::Mat2;
use isac_track::optimize::{design_trajectory, solve_p1_sca, P1Instance};
use isac_track::SystemParams;

pub fn run_example() -> isac_track::Result<()> {
    let params = SystemParams::default();
    let eta = 55.0;
    let inst = P1Instance::new(eta, 53.0, Mat2::new(1.2, 0.4, 0.4, 1.1), params)?;
    let (lo, hi) = inst.feasible_interval()?;
    println!("feasible x in [{lo:.3}, {hi:.3}] m");

    let r = solve_p1_sca(&inst, eta)?;
    for (k, (x, f)) in r.trace.iter().enumerate() {
        println!("iter {k:>2}: x = {x:.6} m, objective = {f:.6e}");
    }
    let (x_a, v_a) = design_trajectory(r.x_breve_opt, eta, (0.0, 0.0), &params)?;
    println!(
        "x_breve = {:.4} m after {} iterations, UAV -> {x_a:.3} m at {v_a:.2} m/s",
        r.x_breve_opt, r.iterations
    );
    Ok(())
}

fn main() {
    run_example().expect("sca failed");
}
