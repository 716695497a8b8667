//! Pyramid search for a grid witness of one simplex.
//!
//! Boxes are discarded once some non-vertex is strictly nearer than some vertex on the
//! whole box; surviving leaves are checked exactly at their centers.

use crate::complex::Simplex;
use crate::error::Result;
use crate::torus::cell::{bisector_range, root_box_for, GridBox};
use crate::torus::predicates::sq_dist_raw;
use crate::torus::LandmarkSet;

/// Outcome of a search, kept as a certificate for later reuse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Cert {
    /// `w` witnesses the simplex; `r2` is its squared distance to the farthest vertex.
    /// `strict` when every non-vertex is strictly farther than `r2`.
    Witnessed { w: Vec<i64>, r2: i64, strict: bool },
    /// No witness; every discarded box or leaf was blamed on one of `blockers`.
    Absent { blockers: Vec<usize> },
}

impl Cert {
    pub fn witnessed(&self) -> bool {
        matches!(self, Cert::Witnessed { .. })
    }

    /// Whether the certificate still holds after the landmarks in `moved` changed.
    pub fn survives(&self, s: &Simplex, ls: &LandmarkSet, moved: &[usize]) -> bool {
        if moved.iter().any(|&m| s.contains(m)) {
            return false;
        }
        match self {
            Cert::Witnessed { w, r2, strict } => {
                *strict
                    && moved
                        .iter()
                        .all(|&m| sq_dist_raw(w, &ls.point(m).coords, &ls.cfg) > *r2)
            }
            Cert::Absent { blockers } => !moved.iter().any(|m| blockers.binary_search(m).is_ok()),
        }
    }
}

/// Search statistics, summed over a build.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchStats {
    pub searches: usize,
    pub boxes: usize,
    pub leaves: usize,
}

/// Finds a witness among the grid centers of cell side `h` (units) within `margin`
/// of the bounding box of `s`, preferring strict witnesses.
pub(crate) fn search_witness(
    ls: &LandmarkSet,
    s: &Simplex,
    h: i64,
    margin: i64,
    stats: &mut SearchStats,
) -> Result<Cert> {
    let cfg = ls.cfg;
    let d = cfg.dim;
    let m = cfg.modulus();
    stats.searches += 1;
    let verts: Vec<&[i64]> = s.vertices().iter().map(|&v| ls.point(v).coords.as_slice()).collect();
    let root = match root_box_for(&cfg, s.vertices(), &verts, margin, h) {
        Ok((_, r)) => r,
        // Witnessed simplices sit in a ball of radius below the covering bound, so an
        // axis spread of half the torus rules the simplex out when that bound is <= 1/4.
        Err(_) if ls.covering_bound() <= 0.25 => return Ok(Cert::Absent { blockers: Vec::new() }),
        Err(e) => return Err(e),
    };
    let center: Vec<i64> = root.center().iter().map(|c| c.rem_euclid(m)).collect();
    let half = root.side / 2;
    let far = verts.iter().map(|p| sq_dist_raw(&center, p, &cfg)).max().unwrap_or(0);
    let reach = 2 * (d as i64) * half * half + 2 * far;
    let comps: Vec<usize> = ls
        .within_sq(&center, reach)
        .into_iter()
        .filter(|&q| !s.contains(q))
        .collect();
    let nv = verts.len();
    let all_pairs: Vec<(u8, u32)> = (0..nv)
        .flat_map(|p| (0..comps.len()).map(move |q| (p as u8, q as u32)))
        .collect();
    let mut blockers: Vec<usize> = Vec::new();
    let mut tie: Option<(Vec<i64>, i64)> = None;
    let mut stack: Vec<(GridBox, Vec<(u8, u32)>)> = vec![(root, all_pairs)];
    while let Some((bx, pairs)) = stack.pop() {
        stats.boxes += 1;
        if bx.side == h {
            stats.leaves += 1;
            let w: Vec<i64> = bx.lo.iter().map(|&l| (l + h / 2).rem_euclid(m)).collect();
            let r2 = verts.iter().map(|p| sq_dist_raw(&w, p, &cfg)).max().unwrap();
            let mut blocked = None;
            let mut tied = false;
            ls.for_each_within_sq(&w, r2, |q, sq| {
                if blocked.is_none() && !s.contains(q) {
                    if sq < r2 {
                        blocked = Some(q);
                    } else {
                        tied = true;
                    }
                }
            });
            match blocked {
                Some(q) => blockers.push(q),
                None if tied => {
                    if tie.is_none() {
                        tie = Some((w, r2));
                    }
                }
                None => return Ok(Cert::Witnessed { w, r2, strict: true }),
            }
            continue;
        }
        let mut active = Vec::with_capacity(pairs.len());
        let mut pruned = None;
        for &(pi, qi) in &pairs {
            let q = ls.point(comps[qi as usize]).coords.as_slice();
            let (mn, mx) = bisector_range(&cfg, &bx.lo, bx.side, verts[pi as usize], q);
            if mx < 0 {
                pruned = Some(comps[qi as usize]);
                break;
            }
            if mn < 0 {
                active.push((pi, qi));
            }
        }
        if let Some(q) = pruned {
            blockers.push(q);
            continue;
        }
        let mut qs: Vec<u32> = active.iter().map(|p| p.1).collect();
        qs.sort_unstable();
        qs.dedup();
        let mut kids: Vec<(i64, GridBox)> = bx
            .children()
            .into_iter()
            .map(|c| {
                let cc: Vec<i64> = c.center();
                let maxp = verts.iter().map(|p| sq_dist_raw(&cc, p, &cfg)).max().unwrap();
                let minq = qs
                    .iter()
                    .map(|&q| sq_dist_raw(&cc, &ls.point(comps[q as usize]).coords, &cfg))
                    .min()
                    .unwrap_or(i64::MAX / 4);
                (maxp - minq, c)
            })
            .collect();
        // Most promising child popped first.
        kids.sort_by_key(|k| std::cmp::Reverse(k.0));
        for (_, c) in kids {
            stack.push((c, active.clone()));
        }
    }
    if let Some((w, r2)) = tie {
        return Ok(Cert::Witnessed { w, r2, strict: false });
    }
    blockers.sort_unstable();
    blockers.dedup();
    Ok(Cert::Absent { blockers })
}
