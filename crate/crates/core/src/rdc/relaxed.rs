//! Relaxed Delaunay complex restricted to thick-looking simplices, and its `check` test.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::pyramid::{enclosing_box, pyramid_full_cells, FullCellResult, Pyramid};
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Result, TwdError};
use crate::params::{delta_star, full_cell_caps, leaf_diameter_bound, perturbed_net_params};
use crate::torus::cell::{bisector_range, is_full_box, GridBox};
use crate::torus::predicates::{cmp_norm_offset, sq_dist_raw};
use crate::torus::{FixedOffset, LandmarkSet, TorusPoint, WitnessGrid};

/// Whether `||w - p|| <= ||w - q|| + alpha` for every vertex `p` and every other landmark `q`.
pub fn is_alpha_witness(w: &TorusPoint, sigma: &Simplex, ls: &LandmarkSet, alpha: f64) -> bool {
    alpha_witness_units(w, sigma, ls, FixedOffset::floor(&ls.cfg, alpha).units())
}

fn far_sq(w: &[i64], sigma: &Simplex, ls: &LandmarkSet) -> i64 {
    sigma
        .vertices()
        .iter()
        .map(|&v| sq_dist_raw(w, &ls.point(v).coords, &ls.cfg))
        .max()
        .unwrap_or(0)
}

fn alpha_witness_units(w: &TorusPoint, sigma: &Simplex, ls: &LandmarkSet, a: i64) -> bool {
    // A violating q is nearer than the farthest vertex.
    let r2 = far_sq(&w.coords, sigma, ls);
    let mut ok = true;
    ls.for_each_within_sq(&w.coords, r2, |q, sq| {
        if ok && !sigma.contains(q) {
            ok = sigma
                .vertices()
                .iter()
                .all(|&p| cmp_norm_offset(sq_dist_raw(&w.coords, &ls.point(p).coords, &ls.cfg), sq, a).is_le());
        }
    });
    ok
}

/// Whether every other landmark is farther from `w` than the farthest vertex by more than `b` units.
pub fn is_protected_point(w: &TorusPoint, sigma: &Simplex, ls: &LandmarkSet, b: i64) -> bool {
    let r2 = far_sq(&w.coords, sigma, ls);
    let reach = 2 * r2 + 2 * b * b;
    let mut ok = true;
    ls.for_each_within_sq(&w.coords, reach, |q, sq| {
        if ok && !sigma.contains(q) && !cmp_norm_offset(sq, r2, b).is_gt() {
            ok = false;
        }
    });
    ok
}

/// Derived quantities shared by the construction and `check`.
#[derive(Clone, Debug, Serialize)]
pub struct RdcParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub theta_0: f64,
    pub delta: f64,
    pub lambda_prime: f64,
    pub mu_bar_prime: f64,
    /// Full-cell cap `ceil(n_0(epsilon))`.
    pub cap: u64,
    pub leaf_diameter_bound: f64,
    pub delta_star: f64,
    alpha_units: i64,
    beta_units: i64,
    diam_sq: i64,
    nbhd_sq: i64,
}

impl RdcParams {
    /// `ls` must carry its picking radius; `epsilon` is the grid's resolution.
    pub fn new(ls: &LandmarkSet, grid: &WitnessGrid, delta: f64, theta_0: f64) -> Result<Self> {
        if !(theta_0 > 0.0) || !(delta >= 0.0) {
            return Err(TwdError::Config(format!("need theta_0 > 0 and delta >= 0, got {theta_0}, {delta}")));
        }
        let cfg = ls.cfg;
        let d = ls.dim();
        let epsilon = grid.epsilon();
        let alpha = 2.0 * epsilon;
        let (lambda_prime, mu_bar_prime) = perturbed_net_params(ls.lambda, ls.mu_bar, ls.rho / ls.lambda)?;
        let (_, cap) = full_cell_caps(theta_0, mu_bar_prime, lambda_prime, epsilon, d);
        let lb = leaf_diameter_bound(epsilon, theta_0, mu_bar_prime, d);
        Ok(Self {
            epsilon,
            alpha,
            theta_0,
            delta,
            lambda_prime,
            mu_bar_prime,
            cap: cap.max(1),
            leaf_diameter_bound: lb,
            delta_star: delta_star(delta, theta_0, mu_bar_prime, epsilon, d),
            alpha_units: FixedOffset::floor(&cfg, alpha).units(),
            beta_units: FixedOffset::ceil(&cfg, delta - alpha).units(),
            diam_sq: cfg.sq_units_floor(lb.min(1.0)),
            nbhd_sq: cfg.sq_units_ceil(2.0 * lambda_prime + 2.0 * alpha),
        })
    }
}

/// Squared radius about `center` outside which no landmark affects a relaxed witness or
/// protection test at a point of `bx`.
fn reach_sq(ls: &LandmarkSet, center: &[i64], bx: &GridBox, sigma: &Simplex, off: i64) -> i64 {
    let d = ls.dim() as i128;
    let half = (bx.side / 2) as i128;
    let s2 = d * half * half;
    let p2 = far_sq(center, sigma, ls) as i128;
    let o = off as i128;
    (3 * (4 * s2 + p2 + o * o)).min(i64::MAX as i128 / 2) as i64
}

/// Searches the full leaves of `pyr` for an `a`-witness (units), pruning boxes on which
/// some landmark beats some vertex by more than `a` everywhere.
fn find_relaxed_center(pyr: &Pyramid, ls: &LandmarkSet, a: i64, comps: &[usize]) -> Option<TorusPoint> {
    let cfg = ls.cfg;
    let m = cfg.modulus();
    let d = cfg.dim as i128;
    let verts: Vec<&[i64]> = pyr.lifted.iter().map(|v| v.as_slice()).collect();
    let a2 = (a as i128) * (a as i128);
    let pairs: Vec<(u8, u32)> =
        (0..verts.len()).flat_map(|p| (0..comps.len()).map(move |q| (p as u8, q as u32))).collect();
    let mut stack = vec![(pyr.root.clone(), pairs)];
    while let Some((bx, pairs)) = stack.pop() {
        if !is_full_box(&cfg, &bx, &verts) {
            continue;
        }
        if bx.side == pyr.leaf_side {
            let w = pyr.leaf_center(&bx, m);
            if alpha_witness_units(&w, &pyr.simplex, ls, a) {
                return Some(w);
            }
            continue;
        }
        let c: Vec<i64> = bx.center();
        let half = (bx.side / 2) as i128;
        let mut active = Vec::with_capacity(pairs.len());
        let mut dead = false;
        for &(pi, qi) in &pairs {
            let q = &ls.point(comps[qi as usize]).coords;
            // (mn, mx) bound |x-q|^2 - |x-p|^2 on the box.
            let (mn, mx) = bisector_range(&cfg, &bx.lo, bx.side, verts[pi as usize], q);
            let dmin = -(mx as i128) - a2;
            if dmin > 0 {
                let s = 2 * sq_dist_raw(&c, q, &cfg) as i128 + 2 * d * half * half;
                if dmin * dmin > 4 * a2 * s {
                    dead = true;
                    break;
                }
            }
            if -(mn as i128) > a2 {
                active.push((pi, qi));
            }
        }
        if dead {
            continue;
        }
        for ch in bx.children().into_iter().rev() {
            stack.push((ch, active.clone()));
        }
    }
    None
}

#[derive(Clone, Debug)]
struct Eval {
    center: Vec<i64>,
    reach2: i64,
    relaxed_center: Option<TorusPoint>,
    protected: Option<bool>,
}

#[derive(Clone, Debug)]
enum Geometry {
    /// The vertices do not fit in one chart, so no relaxed center exists.
    Unliftable,
    Ok(Box<Pyramid>, Option<FullCellResult>),
}

/// Counters summed over the life of a builder.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct RdcStats {
    pub candidates: usize,
    pub center_searches: usize,
    pub pyramid_walks: usize,
    pub aborted: usize,
}

/// The restricted relaxed Delaunay complex, kept up to date as landmarks move.
///
/// Pyramid results depend only on the simplex's vertices; witness and protection results
/// are dropped when a moved landmark enters or leaves their reach.
#[derive(Clone, Debug)]
pub struct RelaxedBuilder {
    pub grid: WitnessGrid,
    pub params: RdcParams,
    geom: HashMap<Simplex, Geometry>,
    evals: HashMap<Simplex, Eval>,
    positions: Vec<TorusPoint>,
    complex: SimplicialComplex,
    pub stats: RdcStats,
}

impl RelaxedBuilder {
    pub fn new(ls: &LandmarkSet, grid: WitnessGrid, params: RdcParams) -> Result<Self> {
        if grid.cfg != ls.cfg {
            return Err(TwdError::Config("grid and landmarks use different precision".into()));
        }
        if ls.dim() < 2 {
            return Err(TwdError::Config("the relaxed complex needs d >= 2".into()));
        }
        Ok(Self {
            grid,
            params,
            geom: HashMap::new(),
            evals: HashMap::new(),
            positions: ls.points().to_vec(),
            complex: SimplicialComplex::new(),
            stats: RdcStats::default(),
        })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn build(&mut self, ls: &LandmarkSet) -> Result<&SimplicialComplex> {
        self.geom.clear();
        self.evals.clear();
        self.positions = ls.points().to_vec();
        self.assemble(ls)
    }

    pub fn update(&mut self, ls: &LandmarkSet, moved: &[usize]) -> Result<&SimplicialComplex> {
        let cfg = ls.cfg;
        let old: Vec<&TorusPoint> = moved.iter().map(|&m| &self.positions[m]).collect();
        self.geom.retain(|s, _| !moved.iter().any(|&m| s.contains(m)));
        self.evals.retain(|s, e| {
            !moved.iter().zip(&old).any(|(&m, o)| {
                s.contains(m)
                    || sq_dist_raw(&e.center, &o.coords, &cfg) <= e.reach2
                    || sq_dist_raw(&e.center, &ls.point(m).coords, &cfg) <= e.reach2
            })
        });
        for &m in moved {
            self.positions[m] = ls.point(m).clone();
        }
        self.assemble(ls)
    }

    /// Candidate `d`-simplices: cliques of landmarks pairwise within `2 lambda' + 4 epsilon`.
    pub fn candidates(&self, ls: &LandmarkSet) -> Vec<Simplex> {
        candidate_simplices(ls, self.params.nbhd_sq)
    }

    fn geometry(&mut self, ls: &LandmarkSet, s: &Simplex) -> Result<&mut Geometry> {
        if !self.geom.contains_key(s) {
            let g = match enclosing_box(s, ls, &self.grid, self.params.alpha) {
                Ok(p) => Geometry::Ok(Box::new(p), None),
                Err(TwdError::Lift(_)) if self.params.lambda_prime + self.params.alpha <= 0.25 => Geometry::Unliftable,
                Err(e) => return Err(e),
            };
            self.geom.insert(s.clone(), g);
        }
        Ok(self.geom.get_mut(s).unwrap())
    }

    fn eval(&mut self, ls: &LandmarkSet, s: &Simplex) -> Result<Option<&mut Eval>> {
        if !self.evals.contains_key(s) {
            let a = self.params.alpha_units;
            let off = a.max(self.params.beta_units);
            self.stats.center_searches += 1;
            let Geometry::Ok(pyr, _) = self.geometry(ls, s)? else { return Ok(None) };
            let m = ls.cfg.modulus();
            let center: Vec<i64> = pyr.root.center().iter().map(|c| c.rem_euclid(m)).collect();
            let reach2 = reach_sq(ls, &center, &pyr.root, s, off);
            let pyr = pyr.clone();
            let comps: Vec<usize> = ls.within_sq(&center, reach2).into_iter().filter(|&q| !s.contains(q)).collect();
            let relaxed_center = find_relaxed_center(&pyr, ls, a, &comps);
            self.evals.insert(s.clone(), Eval { center, reach2, relaxed_center, protected: None });
        }
        Ok(self.evals.get_mut(s))
    }

    fn full_cells(&mut self, ls: &LandmarkSet, s: &Simplex) -> Result<Option<&FullCellResult>> {
        let cap = self.params.cap;
        let mut walked = false;
        let Geometry::Ok(pyr, res) = self.geometry(ls, s)? else { return Ok(None) };
        if res.is_none() {
            *res = Some(pyramid_full_cells(pyr, ls, cap)?);
            walked = true;
        }
        let aborted = res.as_ref().unwrap().aborted;
        if walked {
            self.stats.pyramid_walks += 1;
            self.stats.aborted += aborted as usize;
        }
        let Some(Geometry::Ok(_, Some(r))) = self.geom.get(s) else { unreachable!() };
        Ok(Some(r))
    }

    /// Whether `s` belongs to the restricted relaxed complex.
    pub fn accepts(&mut self, ls: &LandmarkSet, s: &Simplex) -> Result<bool> {
        let has = match self.eval(ls, s)? {
            Some(e) => e.relaxed_center.is_some(),
            None => false,
        };
        if !has {
            return Ok(false);
        }
        Ok(self.full_cells(ls, s)?.is_some_and(|r| !r.aborted))
    }

    fn assemble(&mut self, ls: &LandmarkSet) -> Result<&SimplicialComplex> {
        let cands = self.candidates(ls);
        self.stats.candidates += cands.len();
        let mut kept = Vec::new();
        for s in cands {
            if self.accepts(ls, &s)? {
                kept.push(s);
            }
        }
        self.complex = SimplicialComplex::from_simplices(kept);
        Ok(&self.complex)
    }

    /// Both `check` conditions for one `d`-simplex of the complex.
    pub fn simplex_passes(&mut self, ls: &LandmarkSet, s: &Simplex) -> Result<bool> {
        let diam = self.params.diam_sq;
        let b = self.params.beta_units;
        let Some(fc) = self.full_cells(ls, s)? else { return Ok(false) };
        if fc.aborted || fc.leaf_diameter_sq > diam {
            return Ok(false);
        }
        let leaves = fc.full_leaf_points.clone();
        let Some(e) = self.eval(ls, s)? else { return Ok(false) };
        if let Some(p) = e.protected {
            return Ok(p);
        }
        let p = leaves.iter().any(|w| is_protected_point(w, s, ls, b));
        e.protected = Some(p);
        Ok(p)
    }

    /// `check(p)`: every `d`-simplex of the star of `p` passes both conditions.
    pub fn check_vertex(&mut self, ls: &LandmarkSet, p: usize) -> Result<bool> {
        let d = ls.dim();
        let star: Vec<Simplex> = self.complex.cofaces_of_vertex(p).filter(|s| s.dim() == d).cloned().collect();
        for s in star {
            if !self.simplex_passes(ls, &s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Sorted `d`-cliques of landmarks (current positions) pairwise within `r2` units.
pub(crate) fn candidate_simplices(ls: &LandmarkSet, r2: i64) -> Vec<Simplex> {
    let d = ls.dim();
    let n = ls.len();
    let nb: Vec<BTreeSet<usize>> = (0..n)
        .map(|p| ls.within_sq(&ls.point(p).coords, r2).into_iter().filter(|&q| q > p).collect())
        .collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d + 1);
    fn rec(nb: &[BTreeSet<usize>], cur: &mut Vec<usize>, cands: Vec<usize>, need: usize, out: &mut Vec<Simplex>) {
        if need == 0 {
            out.push(Simplex::from_sorted(cur));
            return;
        }
        for (i, &u) in cands.iter().enumerate() {
            let next: Vec<usize> = cands[i + 1..].iter().copied().filter(|v| nb[u].contains(v)).collect();
            if next.len() + 1 < need {
                continue;
            }
            cur.push(u);
            rec(nb, cur, next, need - 1, out);
            cur.pop();
        }
    }
    for p in 0..n {
        cur.push(p);
        rec(&nb, &mut cur, nb[p].iter().copied().collect(), d, &mut out);
        cur.pop();
    }
    out
}

/// Restricted relaxed Delaunay complex of the current positions, built from scratch.
pub fn build_rdc0(ls: &LandmarkSet, grid: &WitnessGrid, params: &RdcParams) -> Result<SimplicialComplex> {
    let mut b = RelaxedBuilder::new(ls, *grid, params.clone())?;
    b.build(ls)?;
    Ok(b.complex)
}

/// `check(p)` against a given complex, computed from scratch.
pub fn check_vertex(
    p: usize,
    k0: &SimplicialComplex,
    ls: &LandmarkSet,
    grid: &WitnessGrid,
    params: &RdcParams,
) -> Result<bool> {
    let mut b = RelaxedBuilder::new(ls, *grid, params.clone())?;
    b.complex = k0.clone();
    b.check_vertex(ls, p)
}
