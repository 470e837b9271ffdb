// Proposed controller against flying right above the object, over seeded trials.

use isac_track::monte_carlo::compare_schemes;
use isac_track::sim::ScenarioConfig;
use isac_track::SystemParams;

pub fn run_example() -> isac_track::Result<()> {
    let params = SystemParams::default();
    let n_trials = std::env::var("TRIALS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(50);
    let (proposed, right_above) = compare_schemes(&ScenarioConfig::default(), &params, n_trials)?;

    println!("{n_trials} trials, steady state = slots after 30");
    for s in [&proposed, &right_above] {
        let tail = &s.per_slot[s.per_slot.len() - 1];
        println!(
            "{:>12}: mean weighted PCRB {:.4e}, last slot rate {:.3} +/- {:.3} bps/Hz",
            s.scheme.as_str(),
            s.steady_state_weighted(30),
            tail.mean_rate,
            tail.std_rate
        );
    }
    Ok(())
}

fn main() {
    run_example().expect("monte carlo failed");
}
