//! Relaxed-Delaunay perturbation with a protection target; prints the guaranteed protection.
use twd::lll::EngineConfig;
use twd::oracle::{brute_force_delaunay, quality_report};
use twd::rdc::{run_algorithm2, RdcConfig};
use twd::torus::{generate_net, PrecisionConfig, WitnessGrid};

fn main() -> twd::Result<()> {
    let (lambda, mu_bar) = (0.08, 0.8);
    let cfg = PrecisionConfig::new(2, 28)?;
    let ls = generate_net(cfg, lambda, mu_bar, 1)?;
    let grid = WitnessGrid::for_epsilon(cfg, lambda / 131072.0)?;
    let engine = EngineConfig::practical(&ls, mu_bar * lambda / 8.0, 5);
    let rc = RdcConfig { engine, delta: Some(0.02 * lambda), theta_0: Some(0.1) };
    let (out, k, delta_star, rep) = run_algorithm2(&ls, &grid, &rc)?;
    let q = quality_report(&out, &k);
    println!("|L|={} rounds={} terminated={} time={:.2}s", rep.n, rep.rounds, rep.terminated, rep.wall_time);
    println!("delta*={delta_star:.3e} measured min protection={:.3e} min thickness={:.3}", q.min_protection, q.min_theta);
    println!("equals brute-force Delaunay: {}", k == brute_force_delaunay(&out).complex);
    Ok(())
}
