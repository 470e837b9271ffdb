// Load parameters from a flat config string, then see how altitude shifts
// the static optimum and the tracking regime.

use isac_track::optimize::{qos_radius, solve_sp1};
use isac_track::sim::{run_scenario, ScenarioConfig};
use isac_track::SystemParams;

const CONFIG: &str = "
alpha = 0.7
q_tilde = 2.0
v_a_max = 25.0
";

pub fn run_example() -> isac_track::Result<()> {
    let base = SystemParams::from_toml_str(CONFIG)?;
    for h in [30.0, 50.0, 70.0] {
        let p = base.with_altitude(h);
        let sp1 = solve_sp1(&p)?;
        let recs = run_scenario(&ScenarioConfig::default(), &p)?;
        let last = recs.last().expect("n_slots >= 2");
        println!(
            "H = {h:>4.0} m: x* = {:6.3} m, phi* = {:6.3} deg, x_c = {:6.2} m, final |x - x*| = {:.3} m",
            sp1.x_star,
            sp1.phi_star.to_degrees(),
            qos_radius(&p)?,
            (last.truth.x - sp1.x_star).abs()
        );
    }
    Ok(())
}

fn main() {
    run_example().expect("custom config failed");
}
