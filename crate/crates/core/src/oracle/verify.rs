//! Numerical checks of the structural properties against brute-force ground truth.

use serde::Serialize;

use super::delaunay::{sq_to, wrap_f};
use super::geometry::{circumsphere, lift_simplex};
use super::quality::{measure_protection, measure_thickness, protection_at, Protection};
use crate::complex::{Simplex, SimplicialComplex};
use crate::torus::LandmarkSet;

/// Numerical slack allowed on verifier margins, in real units.
pub const TOLERANCE: f64 = 1e-12;

/// Sampling radius and sparsity ratio of the current positions.
pub fn effective_net(ls: &LandmarkSet) -> (f64, f64) {
    let lambda = ls.lambda + ls.rho;
    let mu = (ls.mu_bar * ls.lambda - 2.0 * ls.rho) / lambda;
    (lambda, mu)
}

/// Simplices of `wit` missing from `del`.
pub fn wit_subset_violations(wit: &SimplicialComplex, del: &SimplicialComplex) -> Vec<Simplex> {
    wit.iter().filter(|s| !del.contains(s)).cloned().collect()
}

fn top_cofaces<'a>(k: &'a SimplicialComplex, s: &'a Simplex, d: usize) -> impl Iterator<Item = &'a Simplex> + 'a {
    k.cofaces_of_vertex(s.vertices()[0])
        .filter(move |t| t.dim() == d && s.is_face_of(t))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DimMargins {
    pub k: usize,
    pub checked: usize,
    pub vacuous: usize,
    /// Measured protection at `c*` minus the inheritance bound.
    pub worst_margin: f64,
    /// Measured power protection at `c*` minus the power inheritance bound.
    pub worst_power_margin: f64,
    /// Measured protection minus the uniform bound `mu_bar delta / (4 d)`.
    pub worst_uniform_margin: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct InheritanceReport {
    pub by_dim: Vec<DimMargins>,
    pub violations: Vec<String>,
    pub worst_margin: f64,
    pub worst_power_margin: f64,
}

impl InheritanceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Circumcenter of a top simplex moved into the chart of `anchor`.
fn center_in_chart(ls: &LandmarkSet, s: &Simplex, anchor: &[i64]) -> Option<Vec<f64>> {
    let lifted = lift_simplex(ls, s)?;
    let sp = circumsphere(&lifted)?;
    let m = ls.cfg.modulus() as f64;
    Some(
        sp.center
            .iter()
            .zip(anchor)
            .map(|(&c, &a)| a as f64 + wrap_f(c - a as f64, m))
            .collect(),
    )
}

/// For every lower simplex of a generic Delaunay complex, checks protection at the
/// barycenter `c*` of the circumcenters of `d - k + 1` top cofaces meeting exactly in it.
pub fn verify_inheritance(ls: &LandmarkSet, del: &SimplicialComplex) -> InheritanceReport {
    let d = ls.dim();
    let (lambda, mu) = effective_net(ls);
    let mut rep = InheritanceReport {
        worst_margin: f64::INFINITY,
        worst_power_margin: f64::INFINITY,
        ..Default::default()
    };
    let mut prot_cache = std::collections::BTreeMap::<Simplex, Protection>::new();
    let mut prot = |s: &Simplex| -> Option<Protection> {
        if let Some(p) = prot_cache.get(s) {
            return Some(*p);
        }
        let p = measure_protection(s, ls)?;
        prot_cache.insert(s.clone(), p);
        Some(p)
    };
    for k in 0..d {
        let mut dm = DimMargins {
            k,
            worst_margin: f64::INFINITY,
            worst_power_margin: f64::INFINITY,
            worst_uniform_margin: f64::INFINITY,
            ..Default::default()
        };
        let taus: Vec<Simplex> = del.of_dim(k).cloned().collect();
        for tau in &taus {
            let cof: Vec<Simplex> = top_cofaces(del, tau, d).cloned().collect();
            if cof.is_empty() {
                rep.violations.push(format!("{tau} has no top coface"));
                continue;
            }
            let mut delta = f64::INFINITY;
            let mut power = f64::INFINITY;
            let mut min_radius = f64::INFINITY;
            for s in &cof {
                match prot(s) {
                    Some(p) => {
                        delta = delta.min(p.delta);
                        power = power.min(p.power);
                        min_radius = min_radius.min(p.radius);
                    }
                    None => rep.violations.push(format!("top simplex {s} is degenerate")),
                }
            }
            let dbar = delta / lambda;
            let hyp = delta > 0.0 && dbar <= mu && mu <= 2.0 && min_radius >= mu * lambda / 2.0;
            if !hyp {
                dm.vacuous += 1;
                continue;
            }
            dm.checked += 1;
            let j = (d - k) as f64;
            let bound = (mu + dbar) * delta / (4.0 * (j + 1.0));
            let uniform = mu * delta / (4.0 * d as f64);
            let measured = if k == 0 {
                let p = protection_at(
                    ls,
                    tau,
                    &ls.point(tau.vertices()[0]).coords.iter().map(|&x| x as f64).collect::<Vec<_>>(),
                    0.0,
                );
                // The trivial ball of a vertex inherits the full protection.
                let m = p.delta - delta;
                dm.worst_margin = dm.worst_margin.min(m);
                dm.worst_uniform_margin = dm.worst_uniform_margin.min(p.delta - uniform);
                if m < -TOLERANCE {
                    rep.violations.push(format!("vertex {tau}: protection {} below {delta}", p.delta));
                }
                continue;
            } else {
                let s0 = &cof[0];
                let mut chosen = vec![s0.clone()];
                for &v in s0.vertices().iter().filter(|&&v| !tau.contains(v)) {
                    let facet = s0.without(v).expect("facet of a top simplex");
                    let across: Vec<&Simplex> = top_cofaces(del, &facet, d).filter(|t| *t != s0).collect();
                    if across.len() != 1 {
                        rep.violations.push(format!("facet {facet} has {} neighbours across", across.len()));
                        continue;
                    }
                    chosen.push(across[0].clone());
                }
                if chosen.len() != d - k + 1 {
                    continue;
                }
                let inter = chosen
                    .iter()
                    .skip(1)
                    .fold(chosen[0].vertices().to_vec(), |acc, t| {
                        acc.into_iter().filter(|&v| t.contains(v)).collect()
                    });
                if inter != tau.vertices() {
                    rep.violations.push(format!("chosen cofaces of {tau} meet in {inter:?}"));
                    continue;
                }
                let anchor = ls.point(tau.vertices()[0]).coords.clone();
                let centers: Option<Vec<Vec<f64>>> =
                    chosen.iter().map(|s| center_in_chart(ls, s, &anchor)).collect();
                let Some(centers) = centers else { continue };
                let cstar: Vec<f64> = (0..d)
                    .map(|a| centers.iter().map(|c| c[a]).sum::<f64>() / centers.len() as f64)
                    .collect();
                let m = ls.cfg.modulus() as f64;
                let r2 = sq_to(&cstar, &anchor, m);
                if r2.sqrt() / m >= lambda {
                    dm.checked -= 1;
                    dm.vacuous += 1;
                    continue;
                }
                protection_at(ls, tau, &cstar, r2)
            };
            let margin = measured.delta - bound;
            let pmargin = measured.power - power / (j + 1.0);
            dm.worst_margin = dm.worst_margin.min(margin);
            dm.worst_power_margin = dm.worst_power_margin.min(pmargin);
            dm.worst_uniform_margin = dm.worst_uniform_margin.min(measured.delta - uniform);
            if margin < -TOLERANCE {
                rep.violations.push(format!("{tau}: protection {} below {bound}", measured.delta));
            }
            if pmargin < -TOLERANCE {
                rep.violations.push(format!("{tau}: power protection {} below {}", measured.power, power / (j + 1.0)));
            }
        }
        rep.worst_margin = rep.worst_margin.min(dm.worst_margin);
        rep.worst_power_margin = rep.worst_power_margin.min(dm.worst_power_margin);
        rep.by_dim.push(dm);
    }
    rep
}

/// Power protection implied by protection `delta` of a ball of radius at least
/// `mu_bar lambda / 2`.
pub fn protection_to_power_bound(delta: f64, lambda: f64, mu_bar: f64) -> f64 {
    let dbar = delta / lambda;
    (mu_bar * dbar + dbar * dbar) * lambda * lambda
}

/// Protection implied by power protection `power` of a ball of radius below `lambda`.
pub fn power_to_protection_bound(power: f64, lambda: f64) -> f64 {
    power / (4.0 * lambda)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConversionReport {
    pub measured: usize,
    pub prot_to_power_applicable: usize,
    pub power_to_prot_applicable: usize,
    pub worst_prot_to_power_margin: f64,
    pub worst_power_to_prot_margin: f64,
    pub violations: Vec<String>,
}

impl ConversionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Both conversion inequalities on every top simplex, with measured values as hypotheses.
pub fn verify_conversions(ls: &LandmarkSet, k: &SimplicialComplex) -> ConversionReport {
    let d = ls.dim();
    let (lambda, mu) = effective_net(ls);
    let mut rep = ConversionReport {
        worst_prot_to_power_margin: f64::INFINITY,
        worst_power_to_prot_margin: f64::INFINITY,
        ..Default::default()
    };
    for s in k.of_dim(d) {
        let Some(p) = measure_protection(s, ls) else { continue };
        rep.measured += 1;
        if p.delta > 0.0 && p.radius >= mu * lambda / 2.0 {
            rep.prot_to_power_applicable += 1;
            let m = p.power - protection_to_power_bound(p.delta, lambda, mu);
            rep.worst_prot_to_power_margin = rep.worst_prot_to_power_margin.min(m);
            if m < -TOLERANCE {
                rep.violations.push(format!("{s}: power {} below protection bound", p.power));
            }
        }
        if p.power > 0.0 && p.radius < lambda && p.power <= 8.0 * lambda * lambda {
            rep.power_to_prot_applicable += 1;
            let m = p.delta - power_to_protection_bound(p.power, lambda);
            rep.worst_power_to_prot_margin = rep.worst_power_to_prot_margin.min(m);
            if m < -TOLERANCE {
                rep.violations.push(format!("{s}: protection {} below power bound", p.delta));
            }
        }
    }
    rep
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct IdentityReport {
    pub vertices: usize,
    pub applicable: usize,
    pub violations: Vec<usize>,
}

/// `star(p; wit) = star(p; del)` wherever every top simplex of `star^2(p; del)` is
/// protected by at least `8 d epsilon / mu_bar`.
pub fn verify_identity_from_protection(
    ls: &LandmarkSet,
    wit: &SimplicialComplex,
    del: &SimplicialComplex,
    epsilon: f64,
) -> IdentityReport {
    let d = ls.dim();
    let (_, mu) = effective_net(ls);
    let need = 8.0 * d as f64 * epsilon / mu;
    let mut prot = std::collections::BTreeMap::<Simplex, f64>::new();
    for s in del.of_dim(d) {
        prot.insert(s.clone(), measure_protection(s, ls).map(|p| p.delta).unwrap_or(0.0));
    }
    let mut rep = IdentityReport::default();
    for p in del.vertices() {
        rep.vertices += 1;
        let s2 = del.star2(p).expect("vertex of del");
        let ok = s2.of_dim(d).all(|s| prot.get(s).copied().unwrap_or(0.0) >= need);
        if !ok {
            continue;
        }
        rep.applicable += 1;
        let sd = del.star(p).expect("vertex of del");
        let same = match wit.star(p) {
            Ok(sw) => sw == sd,
            Err(_) => false,
        };
        if !same {
            rep.violations.push(p);
        }
    }
    rep
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ThicknessReport {
    pub checked: usize,
    pub worst_margin: f64,
    pub violations: Vec<String>,
}

/// Thickness of each top simplex against the bound from the protection of its
/// facet neighbours.
pub fn verify_thickness_from_protection(ls: &LandmarkSet, del: &SimplicialComplex) -> ThicknessReport {
    let d = ls.dim();
    let (lambda, mu) = effective_net(ls);
    let mut prot = std::collections::BTreeMap::<Simplex, f64>::new();
    for s in del.of_dim(d) {
        prot.insert(s.clone(), measure_protection(s, ls).map(|p| p.delta).unwrap_or(0.0));
    }
    let mut rep = ThicknessReport { worst_margin: f64::INFINITY, ..Default::default() };
    for s in del.of_dim(d) {
        let mut delta = prot[s];
        for f in s.facets() {
            for t in top_cofaces(del, &f, d) {
                delta = delta.min(prot[t]);
            }
        }
        if delta <= 0.0 {
            continue;
        }
        rep.checked += 1;
        let dbar = delta / lambda;
        let bound = dbar * (mu + dbar) / (8.0 * d as f64);
        let m = measure_thickness(s, ls).theta - bound;
        rep.worst_margin = rep.worst_margin.min(m);
        if m < -TOLERANCE {
            rep.violations.push(format!("{s}: thickness below {bound}"));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_bounds_on_synthetic_ball() {
        assert!((power_to_protection_bound(0.004, 0.1) - 0.01).abs() < 1e-15);
        // A ball of radius r with gap delta has power (2r + delta) delta.
        let (r, delta, lambda, mu) = (0.05, 0.01, 0.1, 1.0);
        let power = (2.0 * r + delta) * delta;
        assert!(power >= protection_to_power_bound(delta, lambda, mu));
        assert_eq!(protection_to_power_bound(0.0, lambda, mu), 0.0);
    }
}
