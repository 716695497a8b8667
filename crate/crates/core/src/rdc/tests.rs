use super::*;
use crate::complex::Simplex;
use crate::lll::EngineConfig;
use crate::torus::predicates::{cmp_norm_offset, sq_dist_raw};
use crate::torus::{generate_net, FixedOffset, LandmarkSet, PrecisionConfig, TorusPoint, WitnessGrid};

fn setup(level: u32) -> (LandmarkSet, WitnessGrid) {
    let cfg = PrecisionConfig::new(2, 20).unwrap();
    let ls = generate_net(cfg, 0.1, 0.8, 5).unwrap().with_rho(0.01).unwrap();
    (ls, WitnessGrid::with_level(cfg, level).unwrap())
}

fn some_triangles(ls: &LandmarkSet, grid: &WitnessGrid) -> Vec<Simplex> {
    let p = RdcParams::new(ls, grid, 0.0, 0.05).unwrap();
    let b = RelaxedBuilder::new(ls, *grid, p).unwrap();
    b.candidates(ls).into_iter().step_by(7).take(25).collect()
}

#[test]
fn pyramid_leaves_match_exhaustive_scan() {
    let (ls, g) = setup(7);
    for s in some_triangles(&ls, &g) {
        let pyr = enclosing_box(&s, &ls, &g, 2.0 * g.epsilon()).unwrap();
        let r = pyramid_full_cells(&pyr, &ls, u64::MAX).unwrap();
        assert!(!r.aborted);
        assert_eq!(r.full_leaf_points, scan_full_leaves(&pyr, &ls), "{s}");
    }
}

#[test]
fn cap_of_one_aborts() {
    let (ls, g) = setup(8);
    let s = &some_triangles(&ls, &g)[0];
    let pyr = enclosing_box(s, &ls, &g, 2.0 * g.epsilon()).unwrap();
    let r = pyramid_full_cells(&pyr, &ls, 1).unwrap();
    assert!(r.aborted && r.cells_visited > 1);
    assert!(pyramid_full_cells(&pyr, &ls, 0).is_err());
}

#[test]
fn root_is_grid_aligned() {
    let (ls, g) = setup(9);
    let h = g.side_units();
    for s in some_triangles(&ls, &g) {
        let pyr = enclosing_box(&s, &ls, &g, 0.0).unwrap();
        assert!(pyr.root.lo.iter().all(|l| l.rem_euclid(h) == 0));
        assert!(((pyr.root.side / h) as u64).is_power_of_two());
        assert_eq!(pyr.root.side >> pyr.depth, h);
    }
}

#[test]
fn full_cells_agree_with_lifted_corner_signs() {
    let (ls, g) = setup(6);
    let mut compared = 0;
    for s in some_triangles(&ls, &g) {
        let pyr = enclosing_box(&s, &ls, &g, 0.0).unwrap();
        for level in 0..=pyr.depth.min(4) {
            let n = 1i64 << level;
            for i in 0..n {
                for j in 0..n {
                    let c = PyramidCell { level, index: vec![i, j] };
                    let bx = pyr.cell_box(&c);
                    let corners = bx.corners();
                    let half = ls.cfg.half();
                    let kink_free = corners
                        .iter()
                        .all(|x| pyr.lifted.iter().all(|v| (0..2).all(|k| (x[k] - v[k]).abs() < half)));
                    if !kink_free {
                        continue;
                    }
                    let sides = |a: &[i64], b: &[i64]| -> (bool, bool) {
                        let v: Vec<i128> = corners
                            .iter()
                            .map(|x| {
                                (0..2)
                                    .map(|k| {
                                        let (da, db) = ((x[k] - a[k]) as i128, (x[k] - b[k]) as i128);
                                        da * da - db * db
                                    })
                                    .sum()
                            })
                            .collect();
                        (v.iter().all(|&t| t > 0), v.iter().all(|&t| t < 0))
                    };
                    let mut full = true;
                    for a in 0..3 {
                        for b in a + 1..3 {
                            let (pos, neg) = sides(&pyr.lifted[a], &pyr.lifted[b]);
                            full &= !pos && !neg;
                        }
                    }
                    assert_eq!(is_full_cell(&c, &pyr, &ls), full, "{s} {c:?}");
                    compared += 1;
                }
            }
        }
    }
    assert!(compared > 500, "{compared}");
}

fn brute_alpha(w: &TorusPoint, s: &Simplex, ls: &LandmarkSet, a: i64) -> bool {
    let cfg = ls.cfg;
    s.vertices().iter().all(|&p| {
        (0..ls.len()).filter(|q| !s.contains(*q)).all(|q| {
            cmp_norm_offset(
                sq_dist_raw(&w.coords, &ls.point(p).coords, &cfg),
                sq_dist_raw(&w.coords, &ls.point(q).coords, &cfg),
                a,
            )
            .is_le()
        })
    })
}

#[test]
fn alpha_witness_matches_full_scan() {
    let (ls, g) = setup(6);
    let cfg = ls.cfg;
    let tris = some_triangles(&ls, &g);
    let pts = g.points().unwrap();
    for (k, w) in pts.iter().enumerate().step_by(3) {
        let s = &tris[k % tris.len()];
        for alpha in [0.0, 0.004, 0.03] {
            let a = FixedOffset::floor(&cfg, alpha).units();
            assert_eq!(is_alpha_witness(w, s, &ls, alpha), brute_alpha(w, s, &ls, a));
        }
        assert!(is_alpha_witness(w, s, &ls, 2.0));
    }
}

#[test]
fn capped_build_equals_filtered_capless_build() {
    let (ls, g) = setup(9);
    let pc = RdcParams::new(&ls, &g, 0.0, 0.3).unwrap();
    let mut pf = pc.clone();
    pf.cap = u64::MAX;
    let capped = build_rdc0(&ls, &g, &pc).unwrap();
    let mut free = RelaxedBuilder::new(&ls, g, pf).unwrap();
    free.build(&ls).unwrap();
    let mut kept = Vec::new();
    for s in free.complex().of_dim(2).cloned().collect::<Vec<_>>() {
        let pyr = enclosing_box(&s, &ls, &g, pc.alpha).unwrap();
        if pyramid_full_cells(&pyr, &ls, u64::MAX).unwrap().cells_visited <= pc.cap {
            kept.push(s);
        }
    }
    assert_eq!(capped, crate::complex::SimplicialComplex::from_simplices(kept));
    assert!(free.complex().count_dim(2) > 0);
}

#[test]
fn huge_theta_0_gives_empty_complex() {
    let (ls, g) = setup(9);
    let mut p = RdcParams::new(&ls, &g, 0.0, 1e6).unwrap();
    p.cap = p.cap.min(3);
    assert!(build_rdc0(&ls, &g, &p).unwrap().is_empty());
}

#[test]
fn zero_offset_check_accepts_every_witnessed_star() {
    let (ls, g) = setup(10);
    let p = RdcParams::new(&ls, &g, 0.0, 0.05).unwrap();
    let mut b = RelaxedBuilder::new(&ls, g, p).unwrap();
    b.build(&ls).unwrap();
    let mut passed = 0;
    for v in 0..ls.len() {
        if b.complex().has_good_link(v, 2) {
            passed += b.check_vertex(&ls, v).unwrap() as usize;
        }
    }
    assert!(passed * 10 >= ls.len() * 9, "{passed} of {}", ls.len());
}

#[test]
fn incremental_updates_match_rebuilds() {
    use rand::SeedableRng;
    let (ls, g) = setup(10);
    let p = RdcParams::new(&ls, &g, 0.002, 0.05).unwrap();
    let mut b = RelaxedBuilder::new(&ls, g, p.clone()).unwrap();
    b.build(&ls).unwrap();
    let mut cur = ls.clone();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    for step in 0..6 {
        let idx: Vec<usize> = vec![step * 5 % cur.len(), (step * 11 + 3) % cur.len()];
        crate::lll::resample_indices(&mut cur, &idx, &mut rng).unwrap();
        b.update(&cur, &idx).unwrap();
        assert_eq!(b.complex(), &build_rdc0(&cur, &g, &p).unwrap());
        for v in 0..cur.len() {
            assert_eq!(b.check_vertex(&cur, v).unwrap(), check_vertex(v, b.complex(), &cur, &g, &p).unwrap());
        }
    }
}

#[test]
fn algorithm2_reaches_good_links() {
    let (ls, g) = setup(19);
    let mut ec = EngineConfig::practical(&ls, 0.01, 2);
    ec.max_rounds = 500;
    let rc = RdcConfig { engine: ec, delta: Some(0.004), theta_0: Some(0.2) };
    let (lp, k, ds, rep) = run_algorithm2(&ls, &g, &rc).unwrap();
    assert!(rep.terminated);
    assert!(ds > 0.0);
    assert_eq!(rep.delta_star, Some(ds));
    for v in 0..lp.len() {
        assert!(k.has_good_link(v, 2));
    }
    assert_eq!(k.euler_characteristic(), 0);
}
