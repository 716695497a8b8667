//! Constants and feasibility conditions of the analysis.
//!
//! `J` is astronomically small, so it is carried as `log J` (natural log) throughout.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Result, TwdError};

/// Volume of the unit `d`-ball, `pi^(d/2) / Gamma(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half_plus_one(d)
}

/// `Gamma(d/2 + 1)` for integer `d`, through its closed forms at integers and half integers.
fn gamma_half_plus_one(d: usize) -> f64 {
    if d % 2 == 0 {
        (1..=d / 2).map(|i| i as f64).product()
    } else {
        // Gamma(n + 3/2) = sqrt(pi) * prod_{i=0..=n} (i + 1/2)
        let n = d / 2;
        PI.sqrt() * (0..=n).map(|i| i as f64 + 0.5).product::<f64>()
    }
}

/// Net parameters after perturbing every point by at most `rho_bar * lambda`.
pub fn perturbed_net_params(lambda: f64, mu_bar: f64, rho_bar: f64) -> Result<(f64, f64)> {
    if !(rho_bar >= 0.0) || 4.0 * rho_bar >= mu_bar {
        return Err(TwdError::Infeasible(format!(
            "perturbation rho_bar={rho_bar} needs 4 rho_bar < mu_bar={mu_bar}"
        )));
    }
    let lp = lambda * (1.0 + rho_bar);
    let mp = (mu_bar - 2.0 * rho_bar) / (1.0 + rho_bar);
    debug_assert!(mp >= mu_bar / 3.0 - 1e-12);
    Ok((lp, mp))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LllConstants {
    /// Bound on the number of landmarks in a resampling neighborhood.
    pub i: f64,
    /// Bound on the number of candidate simplices per neighborhood.
    pub k: f64,
    /// Bound on the witness-set size.
    pub gamma: f64,
    pub log_j: f64,
}

impl LllConstants {
    /// `J` itself; underflows to 0 for large `d`.
    pub fn j(&self) -> f64 {
        self.log_j.exp()
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// `I = (14/mu)^d`, `K = I^(d+1)/(d+1)!`, `Gamma = (27/mu)^d`, `1/J = 2 e pi^(d-1) I K (Gamma+1)`.
pub fn lll_constants(mu_bar: f64, d: usize) -> Result<LllConstants> {
    if !(mu_bar > 0.0 && mu_bar <= 2.0) {
        return Err(TwdError::Config(format!("mu_bar={mu_bar} outside (0, 2]")));
    }
    let ln_i = d as f64 * (14.0 / mu_bar).ln();
    let ln_k = (d as f64 + 1.0) * ln_i - ln_factorial(d + 1);
    let ln_gamma = d as f64 * (27.0 / mu_bar).ln();
    let ln_gamma1 = ln_gamma + (-ln_gamma).exp().ln_1p();
    let log_inv_j = 2f64.ln() + 1.0 + (d as f64 - 1.0) * PI.ln() + ln_i + ln_k + ln_gamma1;
    Ok(LllConstants {
        i: ln_i.exp(),
        k: ln_k.exp(),
        gamma: ln_gamma.exp(),
        log_j: -log_inv_j,
    })
}

/// `U_{d-1} (pi rho / 2)^(d-1) delta`, bounding the part of a shell of width `delta`
/// inside a ball of radius `rho`.
pub fn shell_cap_volume_bound(rho: f64, delta: f64, d: usize) -> f64 {
    unit_ball_volume(d - 1) * (PI * rho / 2.0).powi(d as i32 - 1) * delta
}

/// `2 pi^(d-1) delta / rho`.
pub fn varpi3_bound(delta: f64, rho: f64, d: usize) -> f64 {
    2.0 * PI.powi(d as i32 - 1) * delta / rho
}

/// Full-cell bound `U_d (4d)^d / (theta mu')^d * log2(5 sqrt(d) lambda' / epsilon)` and
/// its integer ceiling used as the search cap.
pub fn full_cell_caps(theta: f64, mu_bar_prime: f64, lambda_prime: f64, epsilon: f64, d: usize) -> (f64, u64) {
    let levels = (5.0 * (d as f64).sqrt() * lambda_prime / epsilon).log2().max(0.0);
    let n = unit_ball_volume(d) * (4.0 * d as f64 / (theta * mu_bar_prime)).powi(d as i32) * levels;
    let cap = if n.is_finite() && n < u64::MAX as f64 { n.ceil() as u64 } else { u64::MAX };
    (n, cap)
}

/// `Theta_0 = delta_bar mu_bar / (24 d)` with `delta_bar = delta / lambda'`.
pub fn theta_0(delta: f64, lambda_prime: f64, mu_bar: f64, d: usize) -> f64 {
    delta / lambda_prime * mu_bar / (24.0 * d as f64)
}

/// `delta* = delta - 34 sqrt(d) epsilon / (Theta_0 mu')`.
pub fn delta_star(delta: f64, theta_0: f64, mu_bar_prime: f64, epsilon: f64, d: usize) -> f64 {
    delta - 34.0 * (d as f64).sqrt() * epsilon / (theta_0 * mu_bar_prime)
}

/// Largest admissible diameter of a simplex's full leaves, `16 sqrt(d) epsilon / (Theta_0 mu')`.
pub fn leaf_diameter_bound(epsilon: f64, theta_0: f64, mu_bar_prime: f64, d: usize) -> f64 {
    16.0 * (d as f64).sqrt() * epsilon / (theta_0 * mu_bar_prime)
}

/// `Theta* = delta_bar* (mu_bar / 3 + delta_bar*) / (8 d)` with `delta_bar* = delta* / lambda'`.
pub fn theta_star(delta_star: f64, lambda_prime: f64, mu_bar: f64, d: usize) -> f64 {
    let db = delta_star / lambda_prime;
    db * (mu_bar / 3.0 + db) / (8.0 * d as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Witness,
    Rdc,
}

#[derive(Clone, Debug, Serialize)]
pub struct Inequality {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// `ln(rhs) - ln(lhs)` for a condition `lhs <= rhs`; nonnegative when satisfied.
    pub log_margin: f64,
    pub satisfied: bool,
}

fn ineq(name: &'static str, ln_lhs: f64, ln_rhs: f64, strict: bool) -> Inequality {
    let m = ln_rhs - ln_lhs;
    Inequality {
        name,
        lhs: ln_lhs.exp(),
        rhs: ln_rhs.exp(),
        log_margin: m,
        satisfied: if strict { m > 0.0 } else { m >= -1e-12 },
    }
}

/// Values used in place of the theoretical `delta` and `Theta_0`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Overrides {
    pub delta: f64,
    pub theta_0: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PracticalValues {
    pub delta: f64,
    pub theta_0: f64,
    pub delta_star: f64,
    pub theta_star: f64,
    pub n0: f64,
    pub inequalities: Vec<Inequality>,
    pub feasible: bool,
    /// Whether the values were supplied (true) or suggested (false).
    pub supplied: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityReport {
    pub mode: Mode,
    pub d: usize,
    pub lambda: f64,
    pub mu_bar: f64,
    pub epsilon: f64,
    pub rho: f64,
    pub rho_bar: f64,
    pub lambda_prime: f64,
    pub mu_bar_prime: f64,
    pub lll: LllConstants,
    pub log_delta: f64,
    pub delta: f64,
    pub alpha: f64,
    pub theta_0: f64,
    pub delta_star: f64,
    pub n0: f64,
    pub inequalities: Vec<Inequality>,
    pub feasible: bool,
    pub practical: Option<PracticalValues>,
}

fn practical_checks(
    mode: Mode,
    d: usize,
    lambda: f64,
    mu_bar: f64,
    epsilon: f64,
    rho: f64,
    lp: f64,
    mp: f64,
    delta: f64,
    th0: f64,
) -> (Vec<Inequality>, f64, f64, f64) {
    let df = d as f64;
    let mut v = vec![
        ineq("8 d eps / mu' <= delta", (8.0 * df * epsilon / mp).ln(), delta.ln(), false),
        ineq("rho <= mu / 4", rho.ln(), (mu_bar * lambda / 4.0).ln(), false),
    ];
    let ds = delta_star(delta, th0, mp, epsilon, d);
    let ts = theta_star(ds, lp, mu_bar, d);
    let (n0, _) = full_cell_caps(th0, mp, lp, epsilon, d);
    if mode == Mode::Rdc {
        v.push(ineq("4 alpha + delta <= lambda'", (8.0 * epsilon + delta).ln(), lp.ln(), false));
        v.push(Inequality {
            name: "delta* > 0",
            lhs: 0.0,
            rhs: ds,
            log_margin: if ds > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
            satisfied: ds > 0.0,
        });
    }
    (v, ds, ts, n0)
}

/// Evaluates every feasibility condition; failures are reported, not raised.
pub fn feasibility(
    lambda: f64,
    mu_bar: f64,
    epsilon: f64,
    rho: f64,
    mode: Mode,
    d: usize,
    overrides: Option<Overrides>,
) -> Result<FeasibilityReport> {
    if !(lambda > 0.0 && epsilon > 0.0 && rho > 0.0 && mu_bar > 0.0) {
        return Err(TwdError::Config("parameters must be positive".into()));
    }
    let df = d as f64;
    let lll = lll_constants(mu_bar, d)?;
    let rho_bar = rho / lambda;
    let mut inequalities = vec![ineq("4 rho_bar < mu_bar", (4.0 * rho_bar).ln(), mu_bar.ln(), true)];
    let (lp, mp) = perturbed_net_params(lambda, mu_bar, rho_bar)
        .unwrap_or((lambda * (1.0 + rho_bar), ((mu_bar - 2.0 * rho_bar) / (1.0 + rho_bar)).max(f64::MIN_POSITIVE)));
    let log_delta = lll.log_j + rho.ln();
    let delta = log_delta.exp();
    inequalities.push(ineq("8 d eps / mu' <= J rho", (8.0 * df * epsilon / mp).ln(), log_delta, false));
    inequalities.push(ineq("rho <= mu / 4", rho.ln(), (mu_bar * lambda / 4.0).ln(), false));
    inequalities.push(ineq("24 d eps / (mu_bar J) <= rho", (24.0 * df * epsilon / mu_bar).ln() - lll.log_j, rho.ln(), false));
    let th0 = theta_0(delta, lp, mu_bar, d);
    let ds = delta_star(delta, th0, mp, epsilon, d);
    let (n0, _) = full_cell_caps(th0, mp, lp, epsilon, d);
    if mode == Mode::Rdc {
        let ln_dbar = log_delta - lp.ln();
        let ln_req = (50.0 * df.powf(0.75) / mu_bar).ln() + 0.5 * (epsilon / lambda).ln();
        inequalities.push(ineq("delta_bar >= 50 d^(3/4) / mu_bar sqrt(eps / lambda)", ln_req, ln_dbar, false));
        inequalities.push(ineq("4 alpha + delta <= lambda'", (8.0 * epsilon + delta).ln(), lp.ln(), false));
        inequalities.push(Inequality {
            name: "delta* > 0",
            lhs: 0.0,
            rhs: ds,
            log_margin: if ds > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
            satisfied: ds > 0.0,
        });
    }
    let feasible = inequalities.iter().all(|i| i.satisfied);
    let practical = match overrides {
        Some(o) => {
            let (v, ds, ts, n0) = practical_checks(mode, d, lambda, mu_bar, epsilon, rho, lp, mp, o.delta, o.theta_0);
            Some(PracticalValues {
                delta: o.delta,
                theta_0: o.theta_0,
                delta_star: ds,
                theta_star: ts,
                n0,
                feasible: v.iter().all(|i| i.satisfied),
                inequalities: v,
                supplied: true,
            })
        }
        None if !feasible => {
            // Smallest delta meeting the witness bound and keeping delta* positive with
            // Theta_0 tied to delta as in the theory, doubled for slack.
            let a = 8.0 * df * epsilon / mp;
            let b = (816.0 * df.powf(1.5) * lp * epsilon / (mu_bar * mp)).sqrt();
            let dpr = 2.0 * a.max(b);
            let tpr = theta_0(dpr, lp, mu_bar, d);
            let (v, ds, ts, n0) = practical_checks(mode, d, lambda, mu_bar, epsilon, rho, lp, mp, dpr, tpr);
            Some(PracticalValues {
                delta: dpr,
                theta_0: tpr,
                delta_star: ds,
                theta_star: ts,
                n0,
                feasible: v.iter().all(|i| i.satisfied),
                inequalities: v,
                supplied: false,
            })
        }
        None => None,
    };
    Ok(FeasibilityReport {
        mode,
        d,
        lambda,
        mu_bar,
        epsilon,
        rho,
        rho_bar,
        lambda_prime: lp,
        mu_bar_prime: mp,
        lll,
        log_delta,
        delta,
        alpha: 2.0 * epsilon,
        theta_0: th0,
        delta_star: ds,
        n0,
        inequalities,
        feasible,
        practical,
    })
}

/// The record printed by the `params` command.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisConstants {
    pub d: usize,
    pub lambda: f64,
    pub mu_bar: f64,
    pub rho: f64,
    pub epsilon: f64,
    pub lambda_prime: f64,
    pub mu_bar_prime: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    #[serde(rename = "logJ")]
    pub log_j: f64,
    pub alpha: f64,
    pub delta: f64,
    pub theta_0: f64,
    pub delta_star: f64,
    pub n0: f64,
    pub feasible_witness: bool,
    pub feasible_rdc: bool,
    #[serde(skip)]
    pub u_d: f64,
    #[serde(skip)]
    pub u_dm1: f64,
    #[serde(skip)]
    pub practice_mode: bool,
}

impl AnalysisConstants {
    /// Theoretical constants, or the supplied `delta` and `Theta_0` in practice mode.
    pub fn compute(d: usize, lambda: f64, mu_bar: f64, rho: f64, epsilon: f64, overrides: Option<Overrides>) -> Result<Self> {
        let w = feasibility(lambda, mu_bar, epsilon, rho, Mode::Witness, d, overrides)?;
        let r = feasibility(lambda, mu_bar, epsilon, rho, Mode::Rdc, d, overrides)?;
        let (delta, theta0, ds, n0, fw, fr) = match (overrides, &w.practical, &r.practical) {
            (Some(o), Some(pw), Some(pr)) => (o.delta, o.theta_0, pr.delta_star, pr.n0, pw.feasible, pr.feasible),
            _ => (r.delta, r.theta_0, r.delta_star, r.n0, w.feasible, r.feasible),
        };
        Ok(Self {
            d,
            lambda,
            mu_bar,
            rho,
            epsilon,
            lambda_prime: r.lambda_prime,
            mu_bar_prime: r.mu_bar_prime,
            i: r.lll.i,
            k: r.lll.k,
            gamma: r.lll.gamma,
            log_j: r.lll.log_j,
            alpha: 2.0 * epsilon,
            delta,
            theta_0: theta0,
            delta_star: ds,
            n0,
            feasible_witness: fw,
            feasible_rdc: fr,
            u_d: unit_ball_volume(d),
            u_dm1: unit_ball_volume(d - 1),
            practice_mode: overrides.is_some(),
        })
    }
}
