//! Full cells of the dyadic pyramid over one Delaunay triangle.
use twd::oracle::{brute_force_delaunay, measure_thickness};
use twd::params::full_cell_caps;
use twd::rdc::{enclosing_box, pyramid_full_cells};
use twd::torus::{generate_net, PrecisionConfig, WitnessGrid};

fn main() -> twd::Result<()> {
    let cfg = PrecisionConfig::new(2, 24)?;
    let ls = generate_net(cfg, 0.1, 0.8, 4)?;
    let del = brute_force_delaunay(&ls).complex;
    for level in [10, 13, 16] {
        let grid = WitnessGrid::with_level(cfg, level)?;
        let eps = grid.epsilon();
        for s in del.of_dim(2).take(3) {
            let pyr = enclosing_box(s, &ls, &grid, 2.0 * eps)?;
            let r = pyramid_full_cells(&pyr, &ls, u64::MAX)?;
            let theta = measure_thickness(s, &ls).theta;
            let (bound, _) = full_cell_caps(theta, ls.mu_bar, ls.lambda, eps, 2);
            println!(
                "level {level} {s}: depth {} visited {} full leaves {} bound {:.0}",
                pyr.depth,
                r.cells_visited,
                r.full_leaf_points.len(),
                bound
            );
        }
    }
    Ok(())
}
