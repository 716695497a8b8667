//! Brute-force Delaunay complex of the current landmark positions.

use std::cmp::Ordering;

use serde::Serialize;

use super::geometry::{circumsphere, insphere_sign_exact, lift_simplex, volume, Sphere};
use crate::complex::{Simplex, SimplicialComplex};
use crate::torus::LandmarkSet;

#[derive(Clone, Debug)]
pub struct DelaunayResult {
    pub complex: SimplicialComplex,
    /// False when some empty circumsphere carries an extra landmark on its boundary.
    pub generic: bool,
    /// Total volume of the top simplices; 1 for a complete triangulation of a generic set.
    pub volume_sum: f64,
    pub stats: DelaunayStats,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DelaunayStats {
    pub candidates: usize,
    pub exact_escalations: usize,
    pub degenerate: usize,
    pub ties: usize,
}

/// Wraps a real coordinate difference (in units) into `[-M/2, M/2)`.
pub(crate) fn wrap_f(x: f64, m: f64) -> f64 {
    x - m * ((x + m / 2.0) / m).floor()
}

/// Squared torus distance between a real center and a lattice point, in units.
pub(crate) fn sq_to(center: &[f64], q: &[i64], m: f64) -> f64 {
    center
        .iter()
        .zip(q)
        .map(|(&c, &x)| {
            let w = wrap_f(x as f64 - c, m);
            w * w
        })
        .sum()
}

/// Image of `q` in the chart of `base`.
pub(crate) fn lift_near(q: &[i64], base: &[i64], ls: &LandmarkSet) -> Vec<i64> {
    q.iter()
        .zip(base)
        .map(|(&a, &b)| b + crate::torus::predicates::wrap(a - b, &ls.cfg))
        .collect()
}

enum Emptiness {
    Empty,
    Tie,
    Occupied,
}

pub(crate) const ESCALATION: f64 = 1e-9;

fn emptiness(ls: &LandmarkSet, s: &Simplex, lifted: &[Vec<i64>], sphere: &Sphere, stats: &mut DelaunayStats) -> Emptiness {
    let m = ls.cfg.modulus() as f64;
    let center: Vec<i64> = sphere.center.iter().map(|&c| (c.round() as i64).rem_euclid(ls.cfg.modulus())).collect();
    let slack = (ls.cfg.dim as f64).sqrt() + 1.0;
    let rq = sphere.r2.sqrt() * (1.0 + 1e-6) + slack;
    let mut result = Emptiness::Empty;
    let mut hits = Vec::new();
    ls.for_each_within_sq(&center, (rq * rq).ceil() as i64, |q, _| hits.push(q));
    for q in hits {
        if s.contains(q) {
            continue;
        }
        let qc = &ls.point(q).coords;
        let dq = sq_to(&sphere.center, qc, m);
        let margin = dq - sphere.r2;
        let ord = if margin.abs() <= ESCALATION * sphere.r2 {
            stats.exact_escalations += 1;
            let ql = lift_near(qc, &lifted[0], ls);
            match insphere_sign_exact(lifted, &ql) {
                Some(o) => o,
                None => Ordering::Greater,
            }
        } else if margin > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        };
        match ord {
            Ordering::Less => return Emptiness::Occupied,
            Ordering::Equal => result = Emptiness::Tie,
            Ordering::Greater => {}
        }
    }
    result
}

/// Every `d`-simplex with an empty circumball (boundary ties allowed), closed under faces.
///
/// Candidates are restricted to circumradius below `min(1/4, lambda + rho)`, which holds
/// for every Delaunay simplex of a net; the volume sum exposes a bad radius bound.
pub fn brute_force_delaunay(ls: &LandmarkSet) -> DelaunayResult {
    let r_max = ls.covering_bound().min(0.25);
    let r = brute_force_with_radius(ls, r_max);
    if (r.volume_sum - 1.0).abs() > 1e-6 && r.generic && r_max < 0.25 {
        return brute_force_with_radius(ls, 0.25);
    }
    r
}

pub fn brute_force_with_radius(ls: &LandmarkSet, r_max: f64) -> DelaunayResult {
    let n = ls.len();
    let d = ls.dim();
    let m = ls.cfg.modulus() as f64;
    let r_units = r_max * m;
    let pair_r2 = ((2.0 * r_units).powi(2)).ceil() as i64;
    // Forward neighbor lists within the pair bound.
    let nbrs: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            ls.within_sq(&ls.point(i).coords, pair_r2)
                .into_iter()
                .filter(|&j| j > i)
                .collect()
        })
        .collect();
    let mut stats = DelaunayStats::default();
    let mut complex = SimplicialComplex::new();
    for i in 0..n {
        complex.insert_with_closure(&Simplex::vertex(i));
    }
    let mut generic = true;
    let mut volume_sum = 0.0;
    let mut stack: Vec<usize> = Vec::with_capacity(d + 1);
    for i in 0..n {
        stack.clear();
        stack.push(i);
        extend(ls, &nbrs, &mut stack, d + 1, pair_r2, &mut |verts| {
            stats.candidates += 1;
            let s = Simplex::from_sorted(verts);
            let Some(lifted) = lift_simplex(ls, &s) else { return };
            let Some(sphere) = circumsphere(&lifted) else {
                stats.degenerate += 1;
                return;
            };
            if sphere.r2 >= r_units * r_units {
                return;
            }
            match emptiness(ls, &s, &lifted, &sphere, &mut stats) {
                Emptiness::Occupied => {}
                e => {
                    if matches!(e, Emptiness::Tie) {
                        generic = false;
                        stats.ties += 1;
                    }
                    volume_sum += volume(&lifted) / m.powi(d as i32);
                    complex.insert_with_closure(&s);
                }
            }
        });
    }
    DelaunayResult { complex, generic, volume_sum, stats }
}

fn extend(
    ls: &LandmarkSet,
    nbrs: &[Vec<usize>],
    stack: &mut Vec<usize>,
    size: usize,
    pair_r2: i64,
    f: &mut dyn FnMut(&[usize]),
) {
    if stack.len() == size {
        f(stack);
        return;
    }
    let first = stack[0];
    let last = *stack.last().unwrap();
    for &c in &nbrs[first] {
        if c <= last {
            continue;
        }
        let ok = stack[1..]
            .iter()
            .all(|&v| crate::torus::sq_dist(ls.point(v), ls.point(c), &ls.cfg) <= pair_r2);
        if ok {
            stack.push(c);
            extend(ls, nbrs, stack, size, pair_r2, f);
            stack.pop();
        }
    }
}
