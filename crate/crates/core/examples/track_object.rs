// Follow a moving object for 100 slots with the proposed controller and
// print a decimated view of the run.
//
// ```bash
// cargo run --example track_object
// ```

use isac_track::optimize::solve_sp1;
use isac_track::sim::{run_scenario, ScenarioConfig};
use isac_track::SystemParams;

pub fn run_example() -> isac_track::Result<()> {
    let params = SystemParams::default();
    let cfg = ScenarioConfig::default();
    let records = run_scenario(&cfg, &params)?;
    let x_star = solve_sp1(&params)?.x_star;

    println!("static optimum x* = {x_star:.3} m");
    println!(
        "{:>4} {:>9} {:>9} {:>9} {:>11} {:>7}",
        "n", "x_true", "x_hat", "x_uav", "weighted", "rate"
    );
    for r in records.iter().filter(|r| r.slot % 10 == 0) {
        println!(
            "{:>4} {:>9.3} {:>9.3} {:>9.2} {:>11.4e} {:>7.3}",
            r.slot, r.truth.x, r.estimate.x, r.uav_pos, r.pcrb_actual.weighted, r.rate
        );
    }
    let last = records.last().expect("n_slots >= 2");
    println!(
        "final Tr(M_p) = {:.4}, Tr(M_m) = {:.3e}, ratio = {:.0}",
        last.tr_mp,
        last.tr_mm,
        last.tr_mp / last.tr_mm
    );
    Ok(())
}

fn main() {
    run_example().expect("tracking run failed");
}
