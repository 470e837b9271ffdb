// One EKF cycle by hand: predict, measure, update, and compare the posterior
// MSE with the predicted PCRB at the same point.

use isac_track::bounds::predicted_pcrb;
use isac_track::ekf::{predict, update, FilterState};
use isac_track::linalg::Mat2;
use isac_track::sensing::{jacobian, noise_cov_predicted, sample_measurement, RelativeState};
use isac_track::sim::trial_rng;
use isac_track::SystemParams;

pub fn run_example() -> isac_track::Result<()> {
    let params = SystemParams::default();
    let mut rng = trial_rng(7, 0);

    let prev = FilterState {
        est: RelativeState::new(30.0, -1.0),
        mse: Mat2::diag(1.0, 0.25),
    };
    let pred = predict(&prev, [0.0, 0.0], &params);
    let truth = RelativeState::new(pred.pred.x + 0.3, pred.pred.v - 0.2);
    let y = sample_measurement(truth, &params, &mut rng);
    let post = update(&pred, &y, &params)?;

    let bound = predicted_pcrb(pred.pred.x, pred.pred.v, &pred.mse_pred, &params)?;
    println!("prediction  x = {:.4}  v = {:.4}", pred.pred.x, pred.pred.v);
    println!("truth       x = {:.4}  v = {:.4}", truth.x, truth.v);
    println!("estimate    x = {:.4}  v = {:.4}", post.est.x, post.est.v);
    println!(
        "posterior MSE diag = ({:.4e}, {:.4e})",
        post.mse.get(0, 0),
        post.mse.get(1, 1)
    );
    println!(
        "predicted PCRB     = ({:.4e}, {:.4e})",
        bound.pcrb_x, bound.pcrb_v
    );

    let h = jacobian(pred.pred, &params);
    let noise = noise_cov_predicted(pred.pred.x, &params);
    println!("jacobian rows: {:?}", h.0);
    println!("predicted noise variances: {:?}", noise.0);
    Ok(())
}

fn main() {
    run_example().expect("ekf step failed");
}
