//! Scale planar points into the unit torus, triangulate and draw the result.
use twd::cli::{export, ingest, plot_svg};
use twd::lll::{run_algorithm1, EngineConfig};
use twd::torus::{LandmarkSet, WitnessGrid};

fn main() -> twd::Result<()> {
    // A jittered 12x12 lattice in [0, 30]^2.
    let pts: Vec<Vec<f64>> = (0..144)
        .map(|i| {
            let (x, y) = ((i % 12) as f64, (i / 12) as f64);
            vec![2.5 * x + 0.3 * (i as f64 * 0.7).sin(), 2.5 * y + 0.3 * (i as f64 * 1.3).cos()]
        })
        .collect();
    let file = ingest(&pts, 0.02, 20)?;
    let back = export(&file);
    let err = pts.iter().zip(&back).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs())).fold(0.0, f64::max);
    println!("round-trip error {err:.2e}");
    let ls = LandmarkSet::from_points(file.cfg, file.points.clone())?;
    let grid = WitnessGrid::for_epsilon(file.cfg, ls.lambda / 64.0)?;
    let (out, k, rep) = run_algorithm1(&ls, &grid, &EngineConfig::practical(&ls, ls.mu_bar * ls.lambda / 8.0, 0))?;
    println!("lambda={:.4} mu_bar={:.3} rounds={}", ls.lambda, ls.mu_bar, rep.rounds);
    let drawn = twd::torus::io::PointsFile { points: out.points().to_vec(), ..file };
    let path = std::env::temp_dir().join("twd_ingest_plot.svg");
    std::fs::write(&path, plot_svg(&drawn, &k)?)?;
    println!("wrote {}", path.display());
    Ok(())
}
