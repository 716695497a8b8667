//! Boxes of the witness pyramid and exact extremes of bisector functions over them.

use super::point::PrecisionConfig;
use super::predicates::wrap;
use crate::error::{Result, TwdError};

/// Closed axis-aligned box `[lo, lo + side]^d` in lifted fixed-point coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridBox {
    pub lo: Vec<i64>,
    pub side: i64,
}

impl GridBox {
    pub fn center(&self) -> Vec<i64> {
        self.lo.iter().map(|&l| l + self.side / 2).collect()
    }

    /// The `2^d` dyadic children in a fixed order.
    pub fn children(&self) -> Vec<GridBox> {
        let d = self.lo.len();
        let half = self.side / 2;
        (0..1usize << d)
            .map(|mask| GridBox {
                lo: (0..d)
                    .map(|k| self.lo[k] + if mask >> k & 1 == 1 { half } else { 0 })
                    .collect(),
                side: half,
            })
            .collect()
    }

    pub fn corners(&self) -> Vec<Vec<i64>> {
        let d = self.lo.len();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|k| self.lo[k] + if mask >> k & 1 == 1 { self.side } else { 0 })
                    .collect()
            })
            .collect()
    }
}

#[inline]
fn axis_term(x: i64, p: i64, q: i64, cfg: &PrecisionConfig) -> i64 {
    let a = wrap(x - q, cfg);
    let b = wrap(x - p, cfg);
    a * a - b * b
}

/// Exact minimum and maximum of `|x-q|^2 - |x-p|^2` over a closed box.
///
/// The function is a sum of one-dimensional continuous piecewise linear terms whose
/// kinks sit at the antipodes of `p` and `q`, so each axis is settled by its
/// endpoints and the kinks inside.
pub fn bisector_range(
    cfg: &PrecisionConfig,
    lo: &[i64],
    side: i64,
    p: &[i64],
    q: &[i64],
) -> (i64, i64) {
    let m = cfg.modulus();
    let h = cfg.half();
    let mut mn = 0i64;
    let mut mx = 0i64;
    for k in 0..lo.len() {
        let (a, b) = (lo[k], lo[k] + side);
        let mut lo_v = axis_term(a, p[k], q[k], cfg);
        let mut hi_v = lo_v;
        let v = axis_term(b, p[k], q[k], cfg);
        lo_v = lo_v.min(v);
        hi_v = hi_v.max(v);
        for c in [p[k], q[k]] {
            let mut t = a + (c + h - a).rem_euclid(m);
            while t <= b {
                let v = axis_term(t, p[k], q[k], cfg);
                lo_v = lo_v.min(v);
                hi_v = hi_v.max(v);
                t += m;
            }
        }
        mn += lo_v;
        mx += hi_v;
    }
    (mn, mx)
}

/// Whether every bisector of two vertices of `verts` meets the closed box.
pub fn is_full_box(cfg: &PrecisionConfig, bx: &GridBox, verts: &[&[i64]]) -> bool {
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            let (mn, mx) = bisector_range(cfg, &bx.lo, bx.side, verts[i], verts[j]);
            if mn > 0 || mx < 0 {
                return false;
            }
        }
    }
    true
}

/// Lifts points to a common chart anchored at the first one.
///
/// Fails when some axis spread reaches half the torus, where the chart is ambiguous.
pub fn lift(cfg: &PrecisionConfig, pts: &[&[i64]]) -> Option<Vec<Vec<i64>>> {
    let base = pts.first()?;
    let lifted: Vec<Vec<i64>> = pts
        .iter()
        .map(|p| {
            base.iter()
                .zip(p.iter())
                .map(|(&b, &c)| b + wrap(c - b, cfg))
                .collect()
        })
        .collect();
    for k in 0..cfg.dim {
        let mn = lifted.iter().map(|v| v[k]).min().unwrap();
        let mx = lifted.iter().map(|v| v[k]).max().unwrap();
        if mx - mn >= cfg.half() {
            return None;
        }
    }
    Some(lifted)
}

/// Smallest grid-aligned box of side `h 2^m` that contains the bounding box of
/// `lifted` grown by `margin` on every side, with at least one spare cell per side.
pub fn aligned_root_box(lifted: &[Vec<i64>], margin: i64, h: i64) -> GridBox {
    let d = lifted[0].len();
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for k in 0..d {
        lo[k] = lifted.iter().map(|v| v[k]).min().unwrap() - margin;
        hi[k] = lifted.iter().map(|v| v[k]).max().unwrap() + margin;
    }
    let extent = (0..d).map(|k| hi[k] - lo[k]).max().unwrap();
    let mut side = h;
    while side < extent + 2 * h {
        side *= 2;
    }
    let lo = (0..d)
        .map(|k| {
            let c2 = lo[k] + hi[k];
            // floor((c - side/2) / h) * h with c = c2 / 2
            let start = (c2 - side).div_euclid(2);
            start.div_euclid(h) * h
        })
        .collect();
    GridBox { lo, side }
}

/// Lift plus root box, with the lift failure reported as an error.
pub fn root_box_for(
    cfg: &PrecisionConfig,
    ids: &[usize],
    pts: &[&[i64]],
    margin: i64,
    h: i64,
) -> Result<(Vec<Vec<i64>>, GridBox)> {
    let lifted = lift(cfg, pts).ok_or_else(|| TwdError::Lift(ids.to_vec()))?;
    let bx = aligned_root_box(&lifted, margin, h);
    Ok((lifted, bx))
}
