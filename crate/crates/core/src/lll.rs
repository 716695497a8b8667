//! Moser–Tardos resampling of landmark positions until every vertex link is good.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Result, TwdError};
use crate::params::{feasibility, Mode};
use crate::torus::{sample_in_ball, sq_dist, LandmarkSet, WitnessGrid};
use crate::witness::WitnessBuilder;

/// Which landmarks are redrawn together with a bad vertex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "radius")]
pub enum Neighborhood {
    /// Anchors within `5 lambda + 3 mu_bar lambda / 2` of the event anchor.
    Theory,
    /// Anchors within the given distance of the event anchor.
    Radius(f64),
}

impl Neighborhood {
    pub fn radius(&self, ls: &LandmarkSet) -> f64 {
        match *self {
            Neighborhood::Theory => theory_radius(ls),
            Neighborhood::Radius(r) => r,
        }
    }
}

fn theory_radius(ls: &LandmarkSet) -> f64 {
    5.0 * ls.lambda + 1.5 * ls.mu_bar * ls.lambda
}

#[derive(Clone, Debug, Serialize)]
pub struct EngineConfig {
    pub rho: f64,
    pub max_rounds: usize,
    pub rng_seed: u64,
    /// Protection target, only reported.
    pub delta: Option<f64>,
    /// Skips the feasibility check.
    pub practical_mode: bool,
    pub neighborhood: Neighborhood,
}

impl EngineConfig {
    /// Theory settings: `max_rounds = 50 |L|` and the full dependency neighborhood.
    pub fn new(ls: &LandmarkSet, rho: f64, seed: u64) -> Self {
        Self {
            rho,
            max_rounds: 50 * ls.len().max(1),
            rng_seed: seed,
            delta: None,
            practical_mode: false,
            neighborhood: Neighborhood::Theory,
        }
    }

    /// Desk-scale settings: no feasibility check, neighborhood of radius `2 lambda`.
    pub fn practical(ls: &LandmarkSet, rho: f64, seed: u64) -> Self {
        Self {
            practical_mode: true,
            neighborhood: Neighborhood::Radius(PRACTICAL_RADIUS * ls.lambda),
            ..Self::new(ls, rho, seed)
        }
    }

    fn validate(&self, ls: &LandmarkSet) -> Result<()> {
        if self.max_rounds == 0 {
            return Err(TwdError::Config("max_rounds must be at least 1".into()));
        }
        if !(self.rho >= 0.0) || 4.0 * self.rho >= ls.mu_bar * ls.lambda {
            return Err(TwdError::Config(format!(
                "rho={} must satisfy 0 <= 4 rho < mu_bar lambda",
                self.rho
            )));
        }
        if let Neighborhood::Radius(r) = self.neighborhood {
            if !(r >= 0.0) {
                return Err(TwdError::Config(format!("neighborhood radius {r} is negative")));
            }
        }
        Ok(())
    }
}

/// Practical neighborhood radius, in multiples of lambda.
pub const PRACTICAL_RADIUS: f64 = 2.0;

#[derive(Clone, Debug, Default, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub rounds: usize,
    pub points_resampled: usize,
    /// `(round, vertex)` for each event.
    pub bad_link_history: Vec<(usize, usize)>,
    pub terminated: bool,
    pub wall_time: f64,
    pub practical_mode: bool,
    pub neighborhood_radius: f64,
    pub max_neighborhood: usize,
    /// Events forced by simplices witnessed only through a distance tie.
    pub tie_events: usize,
    pub delta: Option<f64>,
    pub delta_star: Option<f64>,
}

/// Anchor indices within the theory dependency radius of anchor `p`, `p` included.
pub fn neighborhood_i(p: usize, ls: &LandmarkSet) -> Vec<usize> {
    anchors_within(ls, p, theory_radius(ls))
}

/// Anchor indices within distance `r` of anchor `p`, `p` included.
pub fn anchors_within(ls: &LandmarkSet, p: usize, r: f64) -> Vec<usize> {
    let cfg = ls.cfg;
    if r * r >= cfg.dim as f64 / 4.0 {
        return (0..ls.len()).collect();
    }
    let r2 = cfg.sq_units_floor(r);
    let a = ls.anchor(p);
    (0..ls.len())
        .filter(|&q| q == p || sq_dist(a, ls.anchor(q), &cfg) <= r2)
        .collect()
}

/// Redraws the positions of `idx` uniformly in their picking balls, in order.
pub fn resample_indices(ls: &mut LandmarkSet, idx: &[usize], rng: &mut ChaCha8Rng) -> Result<()> {
    for &q in idx {
        let p = sample_in_ball(&ls.cfg, ls.anchor(q), ls.rho, rng)?;
        ls.set_current(q, p)?;
    }
    Ok(())
}

/// Copy of `ls` with `p` and its theory neighborhood redrawn.
pub fn resample_event(p: usize, ls: &LandmarkSet, rng: &mut ChaCha8Rng) -> Result<LandmarkSet> {
    if p >= ls.len() {
        return Err(TwdError::UnknownVertex(p));
    }
    let mut out = ls.clone();
    resample_indices(&mut out, &neighborhood_i(p, ls), rng)?;
    Ok(out)
}

/// The bad-event structure driven by the resampling loop.
pub trait EventSystem {
    /// Recomputes state after the landmarks in `moved` changed; `moved` is empty on the first call.
    fn refresh(&mut self, ls: &LandmarkSet, moved: &[usize]) -> Result<()>;
    /// Lowest-index vertex whose event is active, and whether it was forced by a tie.
    fn bad_vertex(&mut self, ls: &LandmarkSet) -> Result<Option<(usize, bool)>>;
}

/// Vertices whose star differs between two complexes.
pub fn changed_vertices(old: &SimplicialComplex, new: &SimplicialComplex) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let a: BTreeSet<&Simplex> = old.iter().collect();
    let b: BTreeSet<&Simplex> = new.iter().collect();
    for s in a.symmetric_difference(&b) {
        out.extend(s.vertices().iter().copied());
    }
    out
}

/// Runs the resampling loop over `system` until no event is active or the round cap is hit.
pub fn run_resampling<S: EventSystem>(
    ls: &LandmarkSet,
    config: &EngineConfig,
    system: &mut S,
) -> Result<(LandmarkSet, RunReport)> {
    config.validate(ls)?;
    let t0 = Instant::now();
    let mut ls = ls.clone().with_rho(config.rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let radius = config.neighborhood.radius(&ls);
    let mut nbhd: Vec<Option<Vec<usize>>> = vec![None; ls.len()];
    let mut rep = RunReport {
        n: ls.len(),
        practical_mode: config.practical_mode,
        neighborhood_radius: radius,
        delta: config.delta,
        ..Default::default()
    };
    system.refresh(&ls, &[])?;
    loop {
        let Some((p, tie)) = system.bad_vertex(&ls)? else {
            rep.terminated = true;
            break;
        };
        if rep.rounds >= config.max_rounds {
            break;
        }
        rep.rounds += 1;
        rep.bad_link_history.push((rep.rounds, p));
        rep.tie_events += tie as usize;
        let idx = nbhd[p].get_or_insert_with(|| anchors_within(&ls, p, radius)).clone();
        rep.max_neighborhood = rep.max_neighborhood.max(idx.len());
        resample_indices(&mut ls, &idx, &mut rng)?;
        rep.points_resampled += idx.len();
        system.refresh(&ls, &idx)?;
    }
    rep.wall_time = t0.elapsed().as_secs_f64();
    Ok((ls, rep))
}

/// Witness complex events: a vertex is bad when its link is not a `(d-1)`-pseudomanifold,
/// or when it is the lowest vertex of a simplex witnessed only through a tie.
pub struct WitnessEvents {
    pub builder: WitnessBuilder,
    status: Vec<Option<bool>>,
}

impl WitnessEvents {
    pub fn new(ls: &LandmarkSet, grid: WitnessGrid) -> Result<Self> {
        Ok(Self {
            builder: WitnessBuilder::new(ls, grid, ls.dim())?,
            status: vec![None; ls.len()],
        })
    }
}

impl EventSystem for WitnessEvents {
    fn refresh(&mut self, ls: &LandmarkSet, moved: &[usize]) -> Result<()> {
        let old = self.builder.complex().clone();
        let new = if old.is_empty() { self.builder.build(ls)? } else { self.builder.update(ls, moved)? };
        if old.is_empty() {
            self.status.iter_mut().for_each(|s| *s = None);
        } else {
            for v in changed_vertices(&old, new) {
                self.status[v] = None;
            }
        }
        Ok(())
    }

    fn bad_vertex(&mut self, ls: &LandmarkSet) -> Result<Option<(usize, bool)>> {
        let d = ls.dim();
        let k = self.builder.complex();
        let mut best = None;
        for p in 0..ls.len() {
            if best.is_some_and(|(b, _)| b <= p) {
                break;
            }
            let good = *self.status[p].get_or_insert_with(|| k.has_good_link(p, d));
            if !good {
                best = Some((p, false));
            }
        }
        for s in self.builder.tie_only() {
            let v = s.vertices()[0];
            if best.is_none_or(|(b, _)| v < b) {
                best = Some((v, true));
            }
        }
        Ok(best)
    }
}

/// Perturbs `ls` until the witness complex over `grid` has only good links.
///
/// Returns the final positions, the witness complex at those positions and the run record.
/// Hitting `max_rounds` is not an error; the report then has `terminated == false`.
pub fn run_algorithm1(
    ls: &LandmarkSet,
    grid: &WitnessGrid,
    config: &EngineConfig,
) -> Result<(LandmarkSet, SimplicialComplex, RunReport)> {
    if !config.practical_mode {
        let f = feasibility(ls.lambda, ls.mu_bar, grid.epsilon(), config.rho, Mode::Witness, ls.dim(), None)?;
        if !f.feasible {
            let failed: Vec<_> = f.inequalities.iter().filter(|i| !i.satisfied).map(|i| i.name).collect();
            return Err(TwdError::Infeasible(format!("failed conditions: {}", failed.join("; "))));
        }
    }
    let mut sys = WitnessEvents::new(ls, *grid)?;
    let (out, rep) = run_resampling(ls, config, &mut sys)?;
    Ok((out, sys.builder.complex().clone(), rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{generate_net, PrecisionConfig};

    fn net() -> (LandmarkSet, WitnessGrid) {
        let cfg = PrecisionConfig::new(2, 20).unwrap();
        let ls = generate_net(cfg, 0.1, 0.8, 3).unwrap();
        let g = WitnessGrid::for_epsilon(cfg, 0.1 / 256.0).unwrap();
        (ls, g)
    }

    #[test]
    fn neighborhoods() {
        let (ls, _) = net();
        let cfg = ls.cfg;
        let one = LandmarkSet::new(cfg, vec![ls.anchor(0).clone()], 0.25, 0.5).unwrap();
        assert_eq!(neighborhood_i(0, &one), vec![0]);
        assert_eq!(anchors_within(&ls, 4, 1.0).len(), ls.len());
        let i = neighborhood_i(4, &ls);
        assert!(i.contains(&4));
        let bound = (14.0 / ls.mu_bar).powi(2);
        assert!((i.len() as f64) <= bound);
        let small = anchors_within(&ls, 4, 0.0);
        assert_eq!(small, vec![4]);
    }

    #[test]
    fn resample_stays_in_balls() {
        let (ls, _) = net();
        let ls = ls.with_rho(0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = resample_event(2, &ls, &mut rng).unwrap();
        let b = resample_event(2, &ls, &mut rng).unwrap();
        assert_ne!(a.points(), b.points());
        let r2 = ls.cfg.sq_units_floor(0.01);
        let nb = neighborhood_i(2, &ls);
        for i in 0..ls.len() {
            assert!(sq_dist(a.point(i), a.anchor(i), &ls.cfg) <= r2);
            if !nb.contains(&i) {
                assert_eq!(a.point(i), ls.point(i));
            }
        }
        let z = ls.clone().with_rho(0.0).unwrap();
        let c = resample_event(2, &z, &mut rng).unwrap();
        assert_eq!(c.points(), z.anchors());
    }

    #[test]
    fn practical_run_is_reproducible() {
        let (ls, g) = net();
        let cfg = EngineConfig::practical(&ls, ls.mu_bar * ls.lambda / 8.0, 11);
        let (a, ka, ra) = run_algorithm1(&ls, &g, &cfg).unwrap();
        let (b, kb, rb) = run_algorithm1(&ls, &g, &cfg).unwrap();
        assert!(ra.terminated);
        assert_eq!(a.points(), b.points());
        assert_eq!(ka, kb);
        assert_eq!(ra.bad_link_history, rb.bad_link_history);
        for p in 0..ls.len() {
            assert!(ka.has_good_link(p, 2));
        }
        assert!(ra.points_resampled <= ra.rounds * (ra.max_neighborhood.max(1)));
    }

    #[test]
    fn theory_mode_rejects_desk_parameters() {
        let (ls, g) = net();
        let cfg = EngineConfig::new(&ls, 0.01, 0);
        assert!(matches!(run_algorithm1(&ls, &g, &cfg), Err(TwdError::Infeasible(_))));
        let mut bad = EngineConfig::practical(&ls, 0.05, 0);
        assert!(matches!(run_algorithm1(&ls, &g, &bad), Err(TwdError::Config(_))));
        bad.rho = 0.0;
        bad.max_rounds = 0;
        assert!(run_algorithm1(&ls, &g, &bad).is_err());
    }
}
