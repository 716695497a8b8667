//! Random net on the 2-torus and its measured parameters.
use twd::torus::{estimate_net_params, generate_net, PrecisionConfig, WitnessGrid};

fn main() -> twd::Result<()> {
    let cfg = PrecisionConfig::new(2, 20)?;
    let ls = generate_net(cfg, 0.08, 0.8, 7)?;
    let grid = WitnessGrid::for_epsilon(cfg, 0.08 / 64.0)?;
    let est = estimate_net_params(&ls, &grid)?;
    println!("{} landmarks, requested lambda=0.08 mu_bar=0.8", ls.len());
    println!(
        "measured lambda_hat={:.5} mu_bar_hat={:.4} min distance={:.5} valid={}",
        est.lambda_hat, est.mu_bar_hat, est.min_distance, est.valid
    );
    Ok(())
}
