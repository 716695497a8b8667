//! Witness complex of an unperturbed net, compared with the brute-force Delaunay complex.
use twd::oracle::{brute_force_delaunay, wit_subset_violations};
use twd::torus::{generate_net, PrecisionConfig, WitnessGrid};
use twd::witness::build_witness_complex;

fn main() -> twd::Result<()> {
    let cfg = PrecisionConfig::new(2, 20)?;
    let ls = generate_net(cfg, 0.08, 0.8, 11)?;
    let grid = WitnessGrid::for_epsilon(cfg, 0.08 / 256.0)?;
    let wit = build_witness_complex(&ls, &grid, 2)?;
    let del = brute_force_delaunay(&ls).complex;
    let good = (0..ls.len()).filter(|&p| wit.has_good_link(p, 2)).count();
    println!("|L|={} grid level {}", ls.len(), grid.level);
    println!("witness triangles {} / delaunay triangles {}", wit.count_dim(2), del.count_dim(2));
    println!("good links {good}/{}", ls.len());
    println!("simplices outside del: {}", wit_subset_violations(&wit, &del).len());
    Ok(())
}
