//! Exact distance predicates. Every decision reduces to integer comparisons of
//! polynomials of degree at most two in the input coordinates.

use std::cmp::Ordering;

use super::point::{FixedOffset, PrecisionConfig, TorusPoint};

/// Wraps a coordinate difference into `[-2^(q-1), 2^(q-1))`.
#[inline]
pub fn wrap(diff: i64, cfg: &PrecisionConfig) -> i64 {
    let h = cfg.half();
    (diff + h).rem_euclid(cfg.modulus()) - h
}

/// Per-coordinate shortest displacement from `q` to `p`.
pub fn torus_diff(p: &TorusPoint, q: &TorusPoint, cfg: &PrecisionConfig) -> Vec<i64> {
    p.coords
        .iter()
        .zip(&q.coords)
        .map(|(&a, &b)| wrap(a - b, cfg))
        .collect()
}

/// Exact squared torus distance in squared fixed-point units.
#[inline]
pub fn sq_dist(p: &TorusPoint, q: &TorusPoint, cfg: &PrecisionConfig) -> i64 {
    sq_dist_raw(&p.coords, &q.coords, cfg)
}

#[inline]
pub fn sq_dist_raw(p: &[i64], q: &[i64], cfg: &PrecisionConfig) -> i64 {
    let mut s = 0i64;
    for (&a, &b) in p.iter().zip(q) {
        let w = wrap(a - b, cfg);
        s += w * w;
    }
    s
}

/// Orders `||x-p||` against `||x-q||`.
#[inline]
pub fn cmp_dist(x: &TorusPoint, p: &TorusPoint, q: &TorusPoint, cfg: &PrecisionConfig) -> Ordering {
    sq_dist(x, p, cfg).cmp(&sq_dist(x, q, cfg))
}

/// Orders `a` against `b + off` for nonnegative `a`, `b` given by their squares.
///
/// With `D = a_sq - b_sq - off^2` the comparison is `D` against `2 off b`,
/// decided by sign and then by `D^2` against `4 off^2 b_sq` in 128-bit integers.
#[inline]
pub fn cmp_norm_offset(a_sq: i64, b_sq: i64, off: i64) -> Ordering {
    debug_assert!(a_sq >= 0 && b_sq >= 0 && off >= 0);
    let off2 = (off as i128) * (off as i128);
    let d = a_sq as i128 - b_sq as i128 - off2;
    if d < 0 {
        return Ordering::Less;
    }
    if d == 0 {
        return if off == 0 || b_sq == 0 {
            Ordering::Equal
        } else {
            Ordering::Less
        };
    }
    if off == 0 {
        return Ordering::Greater;
    }
    let lhs = d * d;
    let rhs = 4 * off2 * b_sq as i128;
    lhs.cmp(&rhs)
}

/// Orders `||x-p||` against `||x-q|| + a`.
pub fn cmp_dist_offset(
    x: &TorusPoint,
    p: &TorusPoint,
    q: &TorusPoint,
    a: FixedOffset,
    cfg: &PrecisionConfig,
) -> Ordering {
    cmp_norm_offset(sq_dist(x, p, cfg), sq_dist(x, q, cfg), a.units())
}
