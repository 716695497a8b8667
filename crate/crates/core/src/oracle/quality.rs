//! Protection and thickness measurements. All returned lengths are real (torus) units.

use serde::Serialize;

use super::delaunay::sq_to;
use super::geometry::{circumsphere, dist_to_hull, lift_simplex};
use crate::complex::{Simplex, SimplicialComplex};
use crate::torus::LandmarkSet;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Protection {
    /// Smallest gap between the ball and a non-vertex: `min |c - q| - r`.
    pub delta: f64,
    /// Smallest power margin: `min |c - q|^2 - r^2`.
    pub power: f64,
    pub radius: f64,
}

/// Protection of the ball `B(center, sqrt(r2))` against landmarks outside `s`.
///
/// `center` and `r2` are in units; the center may lie in any chart.
pub fn protection_at(ls: &LandmarkSet, s: &Simplex, center: &[f64], r2: f64) -> Protection {
    let m = ls.cfg.modulus() as f64;
    let c: Vec<i64> = center.iter().map(|&x| (x.round() as i64).rem_euclid(ls.cfg.modulus())).collect();
    let slack = (ls.cfg.dim as f64).sqrt() + 1.0;
    let mut reach = r2.sqrt() + slack + m / 64.0;
    let diam = (ls.cfg.dim as f64).sqrt() * m / 2.0;
    loop {
        let q2 = (reach * reach).ceil() as i64;
        let mut best = f64::INFINITY;
        ls.for_each_within_sq(&c, q2, |q, _| {
            if !s.contains(q) {
                best = best.min(sq_to(center, &ls.point(q).coords, m));
            }
        });
        // The nearest candidate is certain once it lies well within the searched disk.
        if best.is_finite() && best.sqrt() + slack <= reach || reach >= diam + slack {
            let delta = (best.sqrt() - r2.sqrt()) / m;
            let power = (best - r2) / (m * m);
            return Protection { delta, power, radius: r2.sqrt() / m };
        }
        reach *= 2.0;
    }
}

/// Protection of the circumball of `s` (in its affine hull when `s` is not top-dimensional).
pub fn measure_protection(s: &Simplex, ls: &LandmarkSet) -> Option<Protection> {
    let lifted = lift_simplex(ls, s)?;
    let sphere = circumsphere(&lifted)?;
    Some(protection_at(ls, s, &sphere.center, sphere.r2))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Thickness {
    pub theta: f64,
    pub altitude: f64,
    pub diameter: f64,
}

/// Smallest altitude over `j` times the longest edge; 1 for a vertex, 0 when degenerate.
pub fn measure_thickness(s: &Simplex, ls: &LandmarkSet) -> Thickness {
    let j = s.dim();
    if j == 0 {
        return Thickness { theta: 1.0, altitude: 0.0, diameter: 0.0 };
    }
    let m = ls.cfg.modulus() as f64;
    let Some(lifted) = lift_simplex(ls, s) else {
        return Thickness { theta: 0.0, altitude: 0.0, diameter: 0.0 };
    };
    let mut diameter = 0.0f64;
    for a in 0..lifted.len() {
        for b in a + 1..lifted.len() {
            let e: f64 = lifted[a]
                .iter()
                .zip(&lifted[b])
                .map(|(&x, &y)| ((x - y) as f64).powi(2))
                .sum();
            diameter = diameter.max(e.sqrt());
        }
    }
    let mut altitude = f64::INFINITY;
    for i in 0..lifted.len() {
        let others: Vec<Vec<i64>> = lifted
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, v)| v.clone())
            .collect();
        altitude = altitude.min(dist_to_hull(&lifted[i], &others));
    }
    let theta = if diameter > 0.0 { altitude / (j as f64 * diameter) } else { 0.0 };
    Thickness { theta, altitude: altitude / m, diameter: diameter / m }
}

#[derive(Clone, Debug, Serialize)]
pub struct QualityReport {
    pub top_simplices: usize,
    pub min_theta: f64,
    pub mean_theta: f64,
    pub min_protection: f64,
    pub min_power_protection: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    pub degenerate: usize,
}

/// Thickness and protection statistics over the top-dimensional simplices of `k`.
pub fn quality_report(ls: &LandmarkSet, k: &SimplicialComplex) -> QualityReport {
    let d = ls.dim();
    let mut r = QualityReport {
        top_simplices: 0,
        min_theta: f64::INFINITY,
        mean_theta: 0.0,
        min_protection: f64::INFINITY,
        min_power_protection: f64::INFINITY,
        min_radius: f64::INFINITY,
        max_radius: 0.0,
        degenerate: 0,
    };
    for s in k.of_dim(d) {
        r.top_simplices += 1;
        let t = measure_thickness(s, ls);
        r.min_theta = r.min_theta.min(t.theta);
        r.mean_theta += t.theta;
        match measure_protection(s, ls) {
            Some(p) => {
                r.min_protection = r.min_protection.min(p.delta);
                r.min_power_protection = r.min_power_protection.min(p.power);
                r.min_radius = r.min_radius.min(p.radius);
                r.max_radius = r.max_radius.max(p.radius);
            }
            None => r.degenerate += 1,
        }
    }
    if r.top_simplices > 0 {
        r.mean_theta /= r.top_simplices as f64;
    }
    r
}
