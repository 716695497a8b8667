//! Dyadic pyramid over the box that must hold every relaxed Delaunay center of a simplex.

use serde::Serialize;

use crate::complex::Simplex;
use crate::error::{Result, TwdError};
use crate::torus::cell::{aligned_root_box, is_full_box, lift, GridBox};
use crate::torus::predicates::sq_dist_raw;
use crate::torus::{LandmarkSet, TorusPoint, WitnessGrid};

/// A cell of a simplex's pyramid: `level` 0 is the root, `index` counts cells of the
/// level's side from the root corner.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PyramidCell {
    pub level: u32,
    pub index: Vec<i64>,
}

/// Root box and vertex coordinates of one simplex, lifted to a common chart.
#[derive(Clone, Debug)]
pub struct Pyramid {
    pub simplex: Simplex,
    pub root: GridBox,
    pub leaf_side: i64,
    pub depth: u32,
    pub lifted: Vec<Vec<i64>>,
}

impl Pyramid {
    /// Box of the cell, in lifted units.
    pub fn cell_box(&self, c: &PyramidCell) -> GridBox {
        let side = self.root.side >> c.level;
        GridBox {
            lo: self.root.lo.iter().zip(&c.index).map(|(l, i)| l + i * side).collect(),
            side,
        }
    }

    pub fn leaf_center(&self, bx: &GridBox, m: i64) -> TorusPoint {
        TorusPoint {
            coords: bx.lo.iter().map(|&l| (l + self.leaf_side / 2).rem_euclid(m)).collect(),
        }
    }

    fn verts(&self) -> Vec<&[i64]> {
        self.lifted.iter().map(|v| v.as_slice()).collect()
    }
}

/// Grid-aligned box of power-of-two side containing every point within `reach` of the
/// lifted simplex's bounding box.
///
/// Relaxed Delaunay centers with slack `alpha` are within `lambda' + alpha` of every
/// vertex, so `reach = lambda' + alpha` makes the root hold all of them.
pub fn enclosing_box(sigma: &Simplex, ls: &LandmarkSet, grid: &WitnessGrid, alpha: f64) -> Result<Pyramid> {
    let cfg = ls.cfg;
    let pts: Vec<&[i64]> = sigma.vertices().iter().map(|&v| ls.point(v).coords.as_slice()).collect();
    let lifted = lift(&cfg, &pts).ok_or_else(|| TwdError::Lift(sigma.vertices().to_vec()))?;
    let h = grid.side_units();
    let reach = cfg.to_units_ceil(ls.covering_bound() + alpha);
    let root = aligned_root_box(&lifted, reach, h);
    let depth = (root.side / h).trailing_zeros();
    Ok(Pyramid { simplex: sigma.clone(), root, leaf_side: h, depth, lifted })
}

/// Full when every bisector of two vertices meets the closed cell.
pub fn is_full_cell(cell: &PyramidCell, pyr: &Pyramid, ls: &LandmarkSet) -> bool {
    is_full_box(&ls.cfg, &pyr.cell_box(cell), &pyr.verts())
}

#[derive(Clone, Debug, Serialize)]
pub struct FullCellResult {
    pub full_leaf_points: Vec<TorusPoint>,
    /// Full cells met over all levels, root included.
    pub cells_visited: u64,
    pub aborted: bool,
    /// Largest squared distance between two full-leaf points, in units.
    pub leaf_diameter_sq: i64,
}

impl FullCellResult {
    pub fn leaf_diameter(&self, ls: &LandmarkSet) -> f64 {
        ls.cfg.sq_units_to_len(self.leaf_diameter_sq)
    }
}

/// Depth-first walk over full cells, stopping once more than `cap` have been met.
pub fn pyramid_full_cells(pyr: &Pyramid, ls: &LandmarkSet, cap: u64) -> Result<FullCellResult> {
    if cap == 0 {
        return Err(TwdError::Config("full-cell cap must be at least 1".into()));
    }
    let cfg = ls.cfg;
    let m = cfg.modulus();
    let verts = pyr.verts();
    let mut out = FullCellResult {
        full_leaf_points: Vec::new(),
        cells_visited: 0,
        aborted: false,
        leaf_diameter_sq: 0,
    };
    let mut stack = vec![pyr.root.clone()];
    while let Some(bx) = stack.pop() {
        if !is_full_box(&cfg, &bx, &verts) {
            continue;
        }
        out.cells_visited += 1;
        if out.cells_visited > cap {
            out.aborted = true;
            break;
        }
        if bx.side == pyr.leaf_side {
            out.full_leaf_points.push(pyr.leaf_center(&bx, m));
        } else {
            stack.extend(bx.children().into_iter().rev());
        }
    }
    out.full_leaf_points.sort_by(|a, b| a.coords.cmp(&b.coords));
    let pts = &out.full_leaf_points;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            out.leaf_diameter_sq = out.leaf_diameter_sq.max(sq_dist_raw(&pts[i].coords, &pts[j].coords, &cfg));
        }
    }
    Ok(out)
}

/// Every full leaf by scanning all leaf cells of the root, sorted like the pyramid's output.
pub fn scan_full_leaves(pyr: &Pyramid, ls: &LandmarkSet) -> Vec<TorusPoint> {
    let d = ls.dim();
    let n = 1i64 << pyr.depth;
    let m = ls.cfg.modulus();
    let mut out = Vec::new();
    let mut idx = vec![0i64; d];
    loop {
        let c = PyramidCell { level: pyr.depth, index: idx.clone() };
        if is_full_cell(&c, pyr, ls) {
            out.push(pyr.leaf_center(&pyr.cell_box(&c), m));
        }
        let mut k = 0;
        while k < d {
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    out.sort_by(|a, b| a.coords.cmp(&b.coords));
    out
}
