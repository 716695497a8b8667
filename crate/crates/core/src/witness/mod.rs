//! Witness complexes built from exact distance comparisons only.

mod builder;
mod record;
mod search;

pub use builder::{build_witness_complex, update_witness_complex, WitnessBuilder};
pub use record::{witness_complex_from_points, witnessed_simplices, WitnessRecord};
pub use search::SearchStats;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_force_delaunay, wit_subset_violations};
    use crate::torus::{generate_net, sample_in_ball, PrecisionConfig, TorusPoint, WitnessGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn search_agrees_with_scan_on_small_grids() {
        for (d, lambda, mu, level, seed) in [(2, 0.1, 0.8, 7, 1u64), (2, 0.12, 0.7, 6, 2), (3, 0.25, 0.84, 5, 3)] {
            let cfg = PrecisionConfig::new(d, 16).unwrap();
            let ls = generate_net(cfg, lambda, mu, seed).unwrap();
            let grid = WitnessGrid::with_level(cfg, level).unwrap();
            let fast = build_witness_complex(&ls, &grid, d).unwrap();
            let pts = grid.points().unwrap();
            let slow = witness_complex_from_points(&ls, &pts, d);
            assert_eq!(fast, slow, "d={d} level={level}");
        }
    }

    #[test]
    fn witness_complex_is_delaunay() {
        let cfg = PrecisionConfig::new(2, 20).unwrap();
        let ls = generate_net(cfg, 0.1, 0.8, 4).unwrap();
        let grid = WitnessGrid::for_epsilon(cfg, 0.1 / 256.0).unwrap();
        let wit = build_witness_complex(&ls, &grid, 2).unwrap();
        let del = brute_force_delaunay(&ls);
        assert!(wit_subset_violations(&wit, &del.complex).is_empty());
        assert!(wit.count_dim(2) > del.complex.count_dim(2) * 9 / 10);
    }

    #[test]
    fn empty_grid_side_effects_are_nil_for_no_moves() {
        let cfg = PrecisionConfig::new(2, 16).unwrap();
        let ls = generate_net(cfg, 0.1, 0.8, 5).unwrap().with_rho(0.005).unwrap();
        let grid = WitnessGrid::with_level(cfg, 8).unwrap();
        let mut b = WitnessBuilder::new(&ls, grid, 2).unwrap();
        let k0 = b.build(&ls).unwrap().clone();
        assert_eq!(update_witness_complex(&mut b, &ls, &[]).unwrap(), k0);
        assert_eq!(update_witness_complex(&mut b, &ls, &[3]).unwrap(), k0);
    }

    #[test]
    fn incremental_updates_match_rebuilds() {
        let cfg = PrecisionConfig::new(2, 16).unwrap();
        let mut ls = generate_net(cfg, 0.1, 0.8, 6).unwrap().with_rho(0.01).unwrap();
        let grid = WitnessGrid::with_level(cfg, 8).unwrap();
        let mut b = WitnessBuilder::new(&ls, grid, 2).unwrap();
        b.build(&ls).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..15 {
            let k = rng.gen_range(1..4);
            let moved: Vec<usize> = (0..k).map(|_| rng.gen_range(0..ls.len())).collect();
            for &m in &moved {
                let p: TorusPoint = sample_in_ball(&cfg, ls.anchor(m), ls.rho, &mut rng).unwrap();
                ls.set_current(m, p).unwrap();
            }
            let inc = update_witness_complex(&mut b, &ls, &moved).unwrap();
            let full = build_witness_complex(&ls, &grid, 2).unwrap();
            assert_eq!(inc, full);
        }
    }
}
