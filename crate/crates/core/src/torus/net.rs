use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bucket::BucketGrid;
use super::grid::WitnessGrid;
use super::point::{PrecisionConfig, TorusPoint};
use super::predicates::{sq_dist, sq_dist_raw};
use crate::error::{Result, TwdError};

/// Landmarks with their anchor positions, current (perturbed) positions and net parameters.
#[derive(Clone, Debug)]
pub struct LandmarkSet {
    pub cfg: PrecisionConfig,
    anchors: Vec<TorusPoint>,
    current: Vec<TorusPoint>,
    pub lambda: f64,
    pub mu_bar: f64,
    pub rho: f64,
    index: BucketGrid,
}

impl LandmarkSet {
    /// Validates `anchors` as a net with sampling radius `lambda` and sparsity ratio `mu_bar`.
    pub fn new(cfg: PrecisionConfig, anchors: Vec<TorusPoint>, lambda: f64, mu_bar: f64) -> Result<Self> {
        if anchors.is_empty() {
            return Err(TwdError::Config("landmark set is empty".into()));
        }
        if !(lambda > 0.0 && lambda <= 0.25) {
            return Err(TwdError::Config(format!("lambda={lambda} outside (0, 1/4]")));
        }
        if !(mu_bar > 0.0 && mu_bar <= 2.0) {
            return Err(TwdError::Config(format!("mu_bar={mu_bar} outside (0, 2]")));
        }
        if let Some(p) = anchors.iter().find(|p| p.dim() != cfg.dim) {
            return Err(TwdError::Format(format!("point {:?} has wrong dimension", p.coords)));
        }
        let index = BucketGrid::new(cfg, &anchors, mu_bar * lambda);
        let min_sq = (mu_bar * lambda * cfg.modulus() as f64).powi(2).ceil() as i64;
        for (i, p) in anchors.iter().enumerate() {
            let mut bad = None;
            index.for_each_within(&p.coords, min_sq - 1, |j, _| {
                if j != i {
                    bad = Some(j);
                }
            });
            if let Some(j) = bad {
                return Err(TwdError::Infeasible(format!(
                    "landmarks {i} and {j} are closer than mu_bar * lambda"
                )));
            }
        }
        Ok(Self {
            cfg,
            current: anchors.clone(),
            anchors,
            lambda,
            mu_bar,
            rho: 0.0,
            index,
        })
    }

    /// Estimates the net parameters of arbitrary points, then builds the set.
    ///
    /// The sampling radius is the certified grid estimate; the sparsity is the
    /// measured minimum distance over it.
    pub fn from_points(cfg: PrecisionConfig, points: Vec<TorusPoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(TwdError::Config("need at least two landmarks".into()));
        }
        let est = estimate_points(&cfg, &points, None)?;
        if !est.valid {
            return Err(TwdError::Infeasible(est.violations.join("; ")));
        }
        let mu = (est.min_distance / est.lambda_hat).min(2.0) * (1.0 - 1e-12);
        Self::new(cfg, points, est.lambda_hat, mu)
    }

    /// Sets the perturbation radius; requires `4 rho <= mu_bar lambda`.
    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if !(rho >= 0.0) || 4.0 * rho > self.mu_bar * self.lambda {
            return Err(TwdError::Infeasible(format!(
                "rho={rho} exceeds mu_bar * lambda / 4 = {}",
                self.mu_bar * self.lambda / 4.0
            )));
        }
        self.rho = rho;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.cfg.dim
    }

    pub fn anchor(&self, i: usize) -> &TorusPoint {
        &self.anchors[i]
    }

    pub fn anchors(&self) -> &[TorusPoint] {
        &self.anchors
    }

    pub fn point(&self, i: usize) -> &TorusPoint {
        &self.current[i]
    }

    pub fn points(&self) -> &[TorusPoint] {
        &self.current
    }

    /// Moves landmark `i`; the new position must stay within `rho` of its anchor.
    pub fn set_current(&mut self, i: usize, p: TorusPoint) -> Result<()> {
        let lim = self.cfg.sq_units_ceil(self.rho);
        if sq_dist(&self.anchors[i], &p, &self.cfg) > lim {
            return Err(TwdError::Internal(format!(
                "landmark {i} moved farther than rho from its anchor"
            )));
        }
        self.index.update(i, &p);
        self.current[i] = p;
        Ok(())
    }

    /// Current positions replaced wholesale; used when restoring snapshots.
    pub fn reset_to(&mut self, positions: &[TorusPoint]) -> Result<()> {
        for (i, p) in positions.iter().enumerate() {
            if *p != self.current[i] {
                self.set_current(i, p.clone())?;
            }
        }
        Ok(())
    }

    /// Sorted indices of current points with squared distance at most `r2` units.
    pub fn within_sq(&self, center: &[i64], r2: i64) -> Vec<usize> {
        self.index.within(center, r2)
    }

    pub fn for_each_within_sq(&self, center: &[i64], r2: i64, f: impl FnMut(usize, i64)) {
        self.index.for_each_within(center, r2, f)
    }

    /// Sorted indices of current points within real distance `r` (closed ball).
    pub fn range_query(&self, center: &TorusPoint, r: f64) -> Vec<usize> {
        self.index.within(&center.coords, self.cfg.sq_units_floor(r))
    }

    pub fn nearest_with_ties(&self, center: &[i64], k: usize) -> Vec<(i64, usize)> {
        self.index.nearest_with_ties(center, k)
    }

    /// Upper bound on the sampling radius of the current positions: `lambda + rho`.
    pub fn covering_bound(&self) -> f64 {
        self.lambda + self.rho
    }
}

/// Net parameters measured on a point set.
#[derive(Clone, Debug, Serialize)]
pub struct NetEstimate {
    pub lambda_hat: f64,
    pub mu_bar_hat: f64,
    pub min_distance: f64,
    pub valid: bool,
    pub violations: Vec<String>,
}

/// `lambda_hat` is the largest nearest-landmark distance over the grid points plus
/// half the grid diameter, an upper bound on the true sampling radius.
pub fn estimate_net_params(ls: &LandmarkSet, grid: &WitnessGrid) -> Result<NetEstimate> {
    estimate_points(&ls.cfg, ls.points(), Some(grid))
}

fn estimate_points(cfg: &PrecisionConfig, pts: &[TorusPoint], grid: Option<&WitnessGrid>) -> Result<NetEstimate> {
    if pts.len() < 2 {
        return Err(TwdError::Config("need at least two landmarks".into()));
    }
    let index = BucketGrid::new(*cfg, pts, 0.0);
    let mut min_sq = i64::MAX;
    for p in pts {
        let near = index.nearest_with_ties(&p.coords, 2);
        min_sq = min_sq.min(near[1].0);
    }
    let min_distance = cfg.sq_units_to_len(min_sq);
    let grid = match grid {
        Some(g) => *g,
        None => {
            let target = min_distance / 64.0;
            let level = ((cfg.dim as f64).sqrt() / target).log2().ceil().clamp(1.0, cfg.q as f64 - 1.0) as u32;
            WitnessGrid::with_level(*cfg, level)?
        }
    };
    let lambda_hat = max_grid_nn(cfg, &index, &grid) + grid.epsilon() / 2.0;
    let mu_bar_hat = min_distance / lambda_hat;
    let mut violations = Vec::new();
    if lambda_hat > 0.25 {
        violations.push(format!("sampling radius {lambda_hat:.4} exceeds 1/4"));
    }
    if min_distance > 2.0 * lambda_hat {
        violations.push(format!(
            "minimum distance {min_distance:.4} exceeds twice the sampling radius"
        ));
    }
    Ok(NetEstimate {
        lambda_hat,
        mu_bar_hat,
        min_distance,
        valid: violations.is_empty(),
        violations,
    })
}

#[derive(PartialEq)]
struct Node {
    ub: f64,
    lo: Vec<i64>,
    side: i64,
}

impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.ub.total_cmp(&o.ub)
    }
}

/// Exact maximum over grid centers of the nearest-point distance, by branch and bound
/// over dyadic blocks of grid cells.
fn max_grid_nn(cfg: &PrecisionConfig, index: &BucketGrid, grid: &WitnessGrid) -> f64 {
    let d = cfg.dim;
    let m = cfg.modulus();
    let h = grid.side_units();
    let nn = |c: &[i64]| -> f64 {
        let (s, _) = index.nearest(c).expect("nonempty");
        cfg.sq_units_to_len(s)
    };
    // Start from blocks of side <= 1/8 so bounds are meaningful.
    let start_side = (m / 8).max(h);
    let per = m / start_side;
    let mut heap = BinaryHeap::new();
    let mut best = 0.0f64;
    let mut idx = vec![0i64; d];
    let bound = |lo: &[i64], side: i64| -> f64 {
        // Grid centers of the block span [lo + h/2, lo + side - h/2].
        let c: Vec<i64> = lo.iter().map(|&l| l + side / 2).collect();
        let half_span = (side - h) as f64 / 2.0 / m as f64;
        nn(&c) + half_span * (d as f64).sqrt() + 1e-12
    };
    loop {
        let lo: Vec<i64> = idx.iter().map(|&i| i * start_side).collect();
        heap.push(Node { ub: bound(&lo, start_side), lo, side: start_side });
        let mut k = 0;
        while k < d {
            idx[k] += 1;
            if idx[k] < per {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    while let Some(node) = heap.pop() {
        if node.ub <= best {
            break;
        }
        if node.side == h {
            let c: Vec<i64> = node.lo.iter().map(|&l| l + h / 2).collect();
            best = best.max(nn(&c));
            continue;
        }
        let half = node.side / 2;
        for mask in 0..1usize << d {
            let lo: Vec<i64> = (0..d)
                .map(|k| node.lo[k] + if mask >> k & 1 == 1 { half } else { 0 })
                .collect();
            let ub = if half == h {
                let c: Vec<i64> = lo.iter().map(|&l| l + h / 2).collect();
                nn(&c)
            } else {
                bound(&lo, half)
            };
            if ub > best {
                heap.push(Node { ub, lo, side: half });
            }
        }
    }
    best
}

/// Generates a net by random sequential packing at spacing `mu_bar * lambda`, followed by a
/// fill pass over a fine candidate grid, then certifies the sampling radius.
pub fn generate_net(cfg: PrecisionConfig, lambda: f64, mu_bar: f64, seed: u64) -> Result<LandmarkSet> {
    if !(lambda > 0.0 && lambda <= 0.25) {
        return Err(TwdError::Config(format!("lambda={lambda} outside (0, 1/4]")));
    }
    if !(mu_bar > 0.0 && mu_bar <= 2.0) {
        return Err(TwdError::Config(format!("mu_bar={mu_bar} outside (0, 2]")));
    }
    let s = mu_bar * lambda;
    if s > (cfg.dim as f64).sqrt() / 2.0 {
        return Err(TwdError::Infeasible(format!(
            "spacing {s} exceeds the torus diameter"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = cfg.modulus();
    let min_sq = (s * m as f64).powi(2).ceil() as i64;
    let mut packer = Packer::new(cfg, s);
    let mut misses = 0;
    while misses < 2000 {
        let c: Vec<i64> = (0..cfg.dim).map(|_| rng.gen_range(0..m)).collect();
        if packer.try_insert(c, min_sq) {
            misses = 0;
        } else {
            misses += 1;
        }
    }
    let fill = WitnessGrid::with_level(cfg, ((4.0 / s).log2().ceil() as u32).clamp(1, cfg.q - 1))?;
    let mut cand = fill.points()?;
    cand.shuffle(&mut rng);
    for c in cand {
        packer.try_insert(c.coords, min_sq);
    }
    let pts: Vec<TorusPoint> = packer.points.into_iter().map(|c| TorusPoint { coords: c }).collect();
    let est = estimate_points(&cfg, &pts, None)?;
    if est.lambda_hat > lambda {
        return Err(TwdError::Infeasible(format!(
            "packing at spacing {s} only certifies sampling radius {:.5} > {lambda}",
            est.lambda_hat
        )));
    }
    LandmarkSet::new(cfg, pts, lambda, mu_bar)
}

struct Packer {
    cfg: PrecisionConfig,
    per_axis: i64,
    cells: Vec<Vec<usize>>,
    points: Vec<Vec<i64>>,
}

impl Packer {
    fn new(cfg: PrecisionConfig, s: f64) -> Self {
        let per_axis = ((1.0 / s).floor() as i64).clamp(1, 1 << (20 / cfg.dim as u32));
        Self {
            cfg,
            per_axis,
            cells: vec![Vec::new(); (per_axis as usize).pow(cfg.dim as u32)],
            points: Vec::new(),
        }
    }

    fn cell(&self, c: &[i64]) -> Vec<i64> {
        c.iter()
            .map(|&x| ((x as i128 * self.per_axis as i128) >> self.cfg.q) as i64)
            .collect()
    }

    fn flat(&self, idx: &[i64]) -> usize {
        idx.iter()
            .rev()
            .fold(0usize, |b, &i| b * self.per_axis as usize + i.rem_euclid(self.per_axis) as usize)
    }

    fn try_insert(&mut self, c: Vec<i64>, min_sq: i64) -> bool {
        let d = self.cfg.dim;
        if self.per_axis < 3 {
            if self.points.iter().any(|p| sq_dist_raw(p, &c, &self.cfg) < min_sq) {
                return false;
            }
        } else {
            let base = self.cell(&c);
            let mut off = vec![-1i64; d];
            loop {
                let idx: Vec<i64> = (0..d).map(|k| base[k] + off[k]).collect();
                let f = self.flat(&idx);
                if self.cells[f].iter().any(|&j| sq_dist_raw(&self.points[j], &c, &self.cfg) < min_sq) {
                    return false;
                }
                let mut k = 0;
                while k < d {
                    off[k] += 1;
                    if off[k] <= 1 {
                        break;
                    }
                    off[k] = -1;
                    k += 1;
                }
                if k == d {
                    break;
                }
            }
        }
        let f = self.flat(&self.cell(&c));
        self.cells[f].push(self.points.len());
        self.points.push(c);
        true
    }
}

/// Uniform sample from the lattice points of the closed ball of radius `rho` about `center`.
pub fn sample_in_ball<R: Rng + ?Sized>(
    cfg: &PrecisionConfig,
    center: &TorusPoint,
    rho: f64,
    rng: &mut R,
) -> Result<TorusPoint> {
    if !(0.0..0.25).contains(&rho) {
        return Err(TwdError::Config(format!("rho={rho} outside [0, 1/4)")));
    }
    let r = cfg.to_units_floor(rho);
    let r2 = cfg.sq_units_floor(rho);
    for _ in 0..1_000_000 {
        let off: Vec<i64> = (0..cfg.dim).map(|_| rng.gen_range(-r..=r)).collect();
        if off.iter().map(|v| v * v).sum::<i64>() <= r2 {
            return Ok(TorusPoint::new(
                cfg,
                center.coords.iter().zip(&off).map(|(c, o)| c + o).collect(),
            ));
        }
    }
    Err(TwdError::Internal("ball sampling exceeded its attempt cap".into()))
}
