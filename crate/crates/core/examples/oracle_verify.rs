//! Quality measures and structural checks of a Delaunay complex.
use twd::oracle::{
    brute_force_delaunay, quality_report, verify_conversions, verify_inheritance, verify_thickness_from_protection,
};
use twd::torus::{generate_net, PrecisionConfig};

fn main() -> twd::Result<()> {
    let cfg = PrecisionConfig::new(2, 20)?;
    let ls = generate_net(cfg, 0.1, 0.8, 2)?.with_rho(0.01)?;
    let del = brute_force_delaunay(&ls);
    println!("generic={} volume sum={:.12}", del.generic, del.volume_sum);
    let q = quality_report(&ls, &del.complex);
    println!(
        "{} triangles, min theta {:.3}, min protection {:.2e}, radii [{:.4}, {:.4}]",
        q.top_simplices, q.min_theta, q.min_protection, q.min_radius, q.max_radius
    );
    let inh = verify_inheritance(&ls, &del.complex);
    println!("protection inheritance: pass={} worst margin {:.2e}", inh.passed(), inh.worst_margin);
    let th = verify_thickness_from_protection(&ls, &del.complex);
    println!("thickness from protection: checked {} violations {}", th.checked, th.violations.len());
    let cv = verify_conversions(&ls, &del.complex);
    println!("protection/power conversions: pass={} over {} simplices", cv.passed(), cv.measured);
    Ok(())
}
