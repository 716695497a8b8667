//! Theoretical constants next to a practical override.
use twd::params::{feasibility, AnalysisConstants, Mode, Overrides};

fn main() -> twd::Result<()> {
    let (d, lambda, mu_bar, eps) = (2, 0.08, 0.8, 0.08 / 256.0);
    let rho = mu_bar * lambda / 8.0;
    let theory = AnalysisConstants::compute(d, lambda, mu_bar, rho, eps, None)?;
    println!("theory: logJ={:.2} delta={:.2e} feasible(witness)={}", theory.log_j, theory.delta, theory.feasible_witness);
    let ov = Overrides { delta: 0.02 * lambda, theta_0: 0.1 };
    let f = feasibility(lambda, mu_bar, 0.08 / 131072.0, rho, Mode::Rdc, d, Some(ov))?;
    for i in &f.practical.as_ref().expect("overrides given").inequalities {
        println!("  {:<28} {:>10.3e} <= {:<10.3e} {}", i.name, i.lhs, i.rhs, if i.satisfied { "ok" } else { "FAILS" });
    }
    if let Some(p) = &f.practical {
        println!("practical delta*={:.3e} theta*={:.3e}", p.delta_star, p.theta_star);
    }
    Ok(())
}
