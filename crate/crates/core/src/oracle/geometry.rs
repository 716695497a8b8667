//! Circumspheres, altitudes and exact in-sphere signs on lifted simplices.
//!
//! Lengths are in fixed-point units of the landmark set; callers convert.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::linalg::{big, det_exact, solve, solve_exact};
use crate::complex::Simplex;
use crate::torus::cell::lift;
use crate::torus::LandmarkSet;

/// Vertices of a simplex in one chart: the first keeps its coordinates, the others
/// take their images nearest to it.
pub fn lift_simplex(ls: &LandmarkSet, s: &Simplex) -> Option<Vec<Vec<i64>>> {
    let pts: Vec<&[i64]> = s.vertices().iter().map(|&v| ls.point(v).coords.as_slice()).collect();
    lift(&ls.cfg, &pts)
}

#[derive(Clone, Debug)]
pub struct Sphere {
    /// Center in the chart of the lift.
    pub center: Vec<f64>,
    /// Squared radius in squared units.
    pub r2: f64,
}

fn rel(pts: &[Vec<i64>]) -> Vec<Vec<i64>> {
    pts[1..]
        .iter()
        .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Circumsphere within the affine hull; `None` for affinely dependent vertices.
pub fn circumsphere(pts: &[Vec<i64>]) -> Option<Sphere> {
    let k = pts.len() - 1;
    let d = pts[0].len();
    if k == 0 {
        return Some(Sphere { center: pts[0].iter().map(|&v| v as f64).collect(), r2: 0.0 });
    }
    let v = rel(pts);
    let g: Vec<Vec<i128>> = (0..k).map(|i| (0..k).map(|j| dot(&v[i], &v[j])).collect()).collect();
    let gf: Vec<Vec<f64>> = g.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let b: Vec<f64> = (0..k).map(|i| g[i][i] as f64 / 2.0).collect();
    let t = match solve(gf, b, 1e-10) {
        Some(t) => t,
        None => {
            let ge: Vec<Vec<BigInt>> = g.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let be: Vec<BigInt> = (0..k).map(|i| BigInt::from(g[i][i])).collect();
            // Solves G t = diag(G) exactly, then halves.
            solve_exact(&ge, &be)?.into_iter().map(|x| x / 2.0).collect()
        }
    };
    let mut off = vec![0.0; d];
    for (j, tj) in t.iter().enumerate() {
        for a in 0..d {
            off[a] += tj * v[j][a] as f64;
        }
    }
    let r2 = off.iter().map(|x| x * x).sum();
    Some(Sphere {
        center: (0..d).map(|a| pts[0][a] as f64 + off[a]).collect(),
        r2,
    })
}

/// Exact sign of `|c - q|^2 - r^2` for the circumsphere of a full-dimensional simplex.
///
/// `q` must be lifted into the same chart. `None` for a degenerate simplex.
pub fn insphere_sign_exact(pts: &[Vec<i64>], q: &[i64]) -> Option<Ordering> {
    let d = pts[0].len();
    assert_eq!(pts.len(), d + 1);
    let v = rel(pts);
    let qv: Vec<i64> = q.iter().zip(&pts[0]).map(|(a, b)| a - b).collect();
    // 2 V c = |v_i|^2 with c relative to the first vertex.
    let a: Vec<Vec<BigInt>> = v.iter().map(|r| r.iter().map(|&x| big(2 * x)).collect()).collect();
    let b: Vec<BigInt> = v.iter().map(|r| BigInt::from(dot(r, r))).collect();
    let det = det_exact(&a);
    if det.is_zero() {
        return None;
    }
    // sign(|q|^2 - 2 q.c) with c_j = det(A_j) / det.
    let mut s = BigInt::from(dot(&qv, &qv)) * &det;
    for j in 0..d {
        let mut aj = a.clone();
        for i in 0..d {
            aj[i][j] = b[i].clone();
        }
        s -= BigInt::from(2 * qv[j]) * det_exact(&aj);
    }
    let sign = if det.is_negative() { -s } else { s };
    Some(if sign.is_zero() {
        Ordering::Equal
    } else if sign.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    })
}

/// Exact test for affine dependence of a lifted vertex set.
pub fn is_degenerate_exact(pts: &[Vec<i64>]) -> bool {
    let k = pts.len() - 1;
    if k == 0 {
        return false;
    }
    let v = rel(pts);
    let g: Vec<Vec<BigInt>> = (0..k)
        .map(|i| (0..k).map(|j| BigInt::from(dot(&v[i], &v[j]))).collect())
        .collect();
    det_exact(&g).is_zero()
}

/// Distance from `p` to the affine hull of `others`, in units.
pub fn dist_to_hull(p: &[i64], others: &[Vec<i64>]) -> f64 {
    let base = &others[0];
    let v = rel(others);
    let w: Vec<f64> = p.iter().zip(base).map(|(&a, &b)| (a - b) as f64).collect();
    let k = v.len();
    if k == 0 {
        return w.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    let g: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| dot(&v[i], &v[j]) as f64).collect()).collect();
    let rhs: Vec<f64> = (0..k)
        .map(|i| v[i].iter().zip(&w).map(|(&a, &b)| a as f64 * b).sum())
        .collect();
    let t = match solve(g, rhs, 1e-13) {
        Some(t) => t,
        None => return 0.0,
    };
    let mut res = w.clone();
    for (j, tj) in t.iter().enumerate() {
        for a in 0..res.len() {
            res[a] -= tj * v[j][a] as f64;
        }
    }
    res.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Volume of a full-dimensional lifted simplex, in units^d.
pub fn volume(pts: &[Vec<i64>]) -> f64 {
    let d = pts[0].len();
    let v = rel(pts);
    let m: Vec<Vec<BigInt>> = v.iter().map(|r| r.iter().map(|&x| big(x)).collect()).collect();
    let det = super::linalg::ratio(&det_exact(&m), &BigInt::from(1));
    let fact: f64 = (1..=d).map(|i| i as f64).product();
    det.abs() / fact
}
