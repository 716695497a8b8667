use serde::Serialize;

use super::relaxed::{RdcParams, RelaxedBuilder};
use crate::complex::SimplicialComplex;
use crate::error::{Result, TwdError};
use crate::lll::{changed_vertices, run_resampling, EngineConfig, EventSystem, RunReport};
use crate::params::{feasibility, lll_constants, perturbed_net_params, theta_0, Mode};
use crate::torus::{LandmarkSet, WitnessGrid};

#[derive(Clone, Debug, Serialize)]
pub struct RdcConfig {
    pub engine: EngineConfig,
    /// Protection target; defaults to `J rho` outside practical mode.
    pub delta: Option<f64>,
    pub theta_0: Option<f64>,
}

/// Bad when the link is not a pseudomanifold or `check` fails.
pub struct RdcEvents {
    pub builder: RelaxedBuilder,
    link_ok: Vec<Option<bool>>,
}

impl RdcEvents {
    pub fn new(ls: &LandmarkSet, grid: WitnessGrid, params: RdcParams) -> Result<Self> {
        Ok(Self { builder: RelaxedBuilder::new(ls, grid, params)?, link_ok: vec![None; ls.len()] })
    }
}

impl EventSystem for RdcEvents {
    fn refresh(&mut self, ls: &LandmarkSet, moved: &[usize]) -> Result<()> {
        let old = self.builder.complex().clone();
        let new = if moved.is_empty() { self.builder.build(ls)? } else { self.builder.update(ls, moved)? };
        if moved.is_empty() {
            self.link_ok.iter_mut().for_each(|s| *s = None);
        } else {
            for v in changed_vertices(&old, new) {
                self.link_ok[v] = None;
            }
        }
        Ok(())
    }

    fn bad_vertex(&mut self, ls: &LandmarkSet) -> Result<Option<(usize, bool)>> {
        let d = ls.dim();
        for p in 0..ls.len() {
            let k = self.builder.complex();
            let good = *self.link_ok[p].get_or_insert_with(|| k.has_good_link(p, d));
            if !good || !self.builder.check_vertex(ls, p)? {
                return Ok(Some((p, false)));
            }
        }
        Ok(None)
    }
}

/// Resolves `delta` and `Theta_0`: supplied values, else the theory choices `delta = J rho`
/// and `Theta_0 = delta_bar mu_bar / (24 d)`.
pub fn resolve_targets(ls: &LandmarkSet, grid: &WitnessGrid, config: &RdcConfig) -> Result<(f64, f64)> {
    let d = ls.dim();
    let rho = config.engine.rho;
    let rho_bar = rho / ls.lambda;
    let (lp, _) = perturbed_net_params(ls.lambda, ls.mu_bar, rho_bar)?;
    if !config.engine.practical_mode {
        let f = feasibility(ls.lambda, ls.mu_bar, grid.epsilon(), rho, Mode::Rdc, d, None)?;
        if !f.feasible {
            let failed: Vec<_> = f.inequalities.iter().filter(|i| !i.satisfied).map(|i| i.name).collect();
            return Err(TwdError::Infeasible(format!("failed conditions: {}", failed.join("; "))));
        }
    }
    let delta = match config.delta {
        Some(v) => v,
        None => lll_constants(ls.mu_bar, d)?.j() * rho,
    };
    let th0 = config.theta_0.unwrap_or_else(|| theta_0(delta, lp, ls.mu_bar, d));
    Ok((delta, th0))
}

/// Perturbs `ls` until the restricted relaxed complex has good links and passes `check`
/// at every vertex. Returns the positions, the complex, `delta*` and the run record.
pub fn run_algorithm2(
    ls: &LandmarkSet,
    grid: &WitnessGrid,
    config: &RdcConfig,
) -> Result<(LandmarkSet, SimplicialComplex, f64, RunReport)> {
    let (delta, th0) = resolve_targets(ls, grid, config)?;
    let start = ls.clone().with_rho(config.engine.rho)?;
    let params = RdcParams::new(&start, grid, delta, th0)?;
    if params.delta_star <= 0.0 {
        return Err(TwdError::Infeasible(format!(
            "delta*={} is not positive for delta={delta}, Theta_0={th0}",
            params.delta_star
        )));
    }
    if 4.0 * params.alpha + delta > params.lambda_prime {
        if config.engine.practical_mode {
            eprintln!("warning: 4 alpha + delta exceeds lambda'");
        } else {
            return Err(TwdError::Infeasible("4 alpha + delta exceeds lambda'".into()));
        }
    }
    let ds = params.delta_star;
    let mut engine = config.engine.clone();
    engine.delta = Some(delta);
    let mut sys = RdcEvents::new(&start, *grid, params)?;
    let (out, mut rep) = run_resampling(&start, &engine, &mut sys)?;
    rep.delta_star = Some(ds);
    Ok((out, sys.builder.complex().clone(), ds, rep))
}
