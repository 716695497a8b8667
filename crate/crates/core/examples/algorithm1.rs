//! Perturb a net until its witness complex is the Delaunay triangulation.
use twd::lll::{run_algorithm1, EngineConfig};
use twd::oracle::brute_force_delaunay;
use twd::torus::{generate_net, PrecisionConfig, WitnessGrid};

fn main() -> twd::Result<()> {
    let cfg = PrecisionConfig::new(2, 20)?;
    let ls = generate_net(cfg, 0.08, 0.8, 3)?;
    let grid = WitnessGrid::for_epsilon(cfg, 0.08 / 16.0)?;
    let rho = ls.mu_bar * ls.lambda / 8.0;
    let config = EngineConfig::practical(&ls, rho, 42);
    let (out, k, rep) = run_algorithm1(&ls, &grid, &config)?;
    println!(
        "|L|={} rounds={} resampled={} terminated={} time={:.2}s",
        rep.n, rep.rounds, rep.points_resampled, rep.terminated, rep.wall_time
    );
    println!("equals brute-force Delaunay: {}", k == brute_force_delaunay(&out).complex);
    println!("euler characteristic {}", k.euler_characteristic());
    Ok(())
}
