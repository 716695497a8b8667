//! Command-line surface: point ingestion, SVG output and the `twd` subcommands.

mod commands;

use std::fmt::Write as _;
use std::io::BufRead;

use crate::complex::SimplicialComplex;
use crate::error::{Result, TwdError};
use crate::torus::io::{AffineMap, PointsFile};
use crate::torus::predicates::wrap;
use crate::torus::{PrecisionConfig, TorusPoint};

pub use commands::{main_with_args, run, thread_cap, Cli, Command};

/// Reads whitespace-separated real points, one per line; `#` starts a comment.
pub fn read_real_points<R: BufRead>(r: R) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v = body
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| TwdError::Format(format!("line {}: {e}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = out.first() {
            if first.len() != v.len() {
                return Err(TwdError::Format(format!("line {}: expected {} coordinates", i + 1, first.len())));
            }
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(TwdError::Format(format!("line {}: non-finite coordinate", i + 1)));
        }
        out.push(v);
    }
    Ok(out)
}

/// Maps real points into `[margin, 1 - margin]^d` by one uniform scale and a translation,
/// then quantizes. Points already inside that box are only quantized.
pub fn ingest(points: &[Vec<f64>], margin: f64, q: u32) -> Result<PointsFile> {
    let d = points.first().map(|p| p.len()).ok_or_else(|| TwdError::Format("no points".into()))?;
    if points.len() < d + 1 {
        return Err(TwdError::Config(format!("need at least {} points in dimension {d}", d + 1)));
    }
    if !(0.0..0.5).contains(&margin) {
        return Err(TwdError::Config(format!("margin={margin} outside [0, 1/2)")));
    }
    let cfg = PrecisionConfig::new(d, q)?;
    let lo: Vec<f64> = (0..d).map(|k| points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..d).map(|k| points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let extent = (0..d).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
    if extent <= 0.0 {
        return Err(TwdError::Config("all points coincide".into()));
    }
    let fits = (0..d).all(|k| lo[k] >= margin && hi[k] <= 1.0 - margin && hi[k] < 1.0);
    let map = if fits {
        AffineMap { scale: 1.0, offset: vec![0.0; d] }
    } else {
        let scale = (1.0 - 2.0 * margin) / extent;
        AffineMap { scale, offset: lo.iter().map(|l| margin - scale * l).collect() }
    };
    let pts = points
        .iter()
        .map(|p| {
            let x: Vec<f64> = p.iter().zip(&map.offset).map(|(v, o)| map.scale * v + o).collect();
            TorusPoint::from_reals(&cfg, &x)
        })
        .collect();
    Ok(PointsFile { cfg, points: pts, map: Some(map) })
}

/// Inverse of [`ingest`]: real coordinates of the stored points.
pub fn export(file: &PointsFile) -> Vec<Vec<f64>> {
    let id = AffineMap { scale: 1.0, offset: vec![0.0; file.cfg.dim] };
    let map = file.map.as_ref().unwrap_or(&id);
    file.points
        .iter()
        .map(|p| {
            p.to_reals(&file.cfg)
                .iter()
                .zip(&map.offset)
                .map(|(t, o)| (t - o) / map.scale)
                .collect()
        })
        .collect()
}

const SVG_SIZE: f64 = 800.0;

/// SVG of a complex on the unit square; an edge crossing the seam is drawn once from each
/// endpoint so both halves appear.
pub fn plot_svg(file: &PointsFile, k: &SimplicialComplex) -> Result<String> {
    let cfg = file.cfg;
    if cfg.dim != 2 {
        return Err(TwdError::Config(format!("plotting needs d = 2, got {}", cfg.dim)));
    }
    if let Some(&v) = k.vertices().iter().find(|&&v| v >= file.points.len()) {
        return Err(TwdError::UnknownVertex(v));
    }
    let m = cfg.modulus() as f64;
    let px = |u: i64| u as f64 / m * SVG_SIZE;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_SIZE}\" height=\"{SVG_SIZE}\" viewBox=\"0 0 {SVG_SIZE} {SVG_SIZE}\">"
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{SVG_SIZE}\" height=\"{SVG_SIZE}\" fill=\"white\" stroke=\"black\"/>");
    let line = |s: &mut String, a: &[i64], b: &[i64]| {
        let _ = writeln!(
            s,
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"steelblue\" stroke-width=\"1\"/>",
            px(a[0]),
            SVG_SIZE - px(a[1]),
            px(b[0]),
            SVG_SIZE - px(b[1])
        );
    };
    let mm = cfg.modulus();
    for e in k.of_dim(1) {
        let a = &file.points[e.vertices()[0]].coords;
        let b = &file.points[e.vertices()[1]].coords;
        let b2: Vec<i64> = (0..2).map(|i| a[i] + wrap(b[i] - a[i], &cfg)).collect();
        line(&mut s, a, &b2);
        if b2.iter().any(|&c| c < 0 || c >= mm) {
            let a2: Vec<i64> = (0..2).map(|i| b[i] + wrap(a[i] - b[i], &cfg)).collect();
            line(&mut s, &a2, b);
        }
    }
    for p in &file.points {
        let _ = writeln!(
            s,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"2\" fill=\"black\"/>",
            px(p.coords[0]),
            SVG_SIZE - px(p.coords[1])
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
