use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::complex::{read_complex_path, write_complex_path, SimplicialComplex};
use crate::error::{Result, TwdError};
use crate::lll::{run_algorithm1, EngineConfig, Neighborhood};
use crate::oracle::{
    brute_force_delaunay, quality_report, verify_conversions, verify_identity_from_protection, verify_inheritance,
    verify_thickness_from_protection, wit_subset_violations,
};
use crate::params::{AnalysisConstants, Overrides};
use crate::rdc::{run_algorithm2, RdcConfig};
use crate::torus::io::{read_points_path, write_points_path, PointsFile};
use crate::torus::{generate_net, LandmarkSet, PrecisionConfig, WitnessGrid};
use crate::witness::build_witness_complex;

/// Largest grid `gen-grid` writes out point by point.
const MAX_GRID_POINTS: u128 = 1 << 24;

#[derive(Debug, Parser)]
#[command(name = "twd", version, about = "Delaunay triangulations on the flat torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random (lambda, mu_bar)-net.
    GenNet(GenNetArgs),
    /// Describe (and optionally write) the dyadic witness grid for an epsilon.
    GenGrid(GenGridArgs),
    /// Witness complex of a landmark file.
    Witness(WitnessArgs),
    /// Perturb landmarks until the witness complex is a triangulation.
    Algo1(Algo1Args),
    /// Perturb landmarks until the relaxed complex has good, protected links.
    Algo2(Algo2Args),
    /// Compare a complex with the brute-force Delaunay complex and measure quality.
    Verify(VerifyArgs),
    /// Analysis constants and feasibility for a parameter set.
    Params(ParamsArgs),
    /// Scale real points into the unit box and quantize them.
    Ingest(IngestArgs),
    /// SVG drawing of a planar complex.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct GenNetArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub mu_bar: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = PrecisionConfig::DEFAULT_Q)]
    pub q: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct GridArgs {
    /// Grid cells have diameter at most this.
    #[arg(long, conflicts_with = "grid_level", required_unless_present = "grid_level")]
    pub epsilon: Option<f64>,
    /// Explicit level: cell side 2^-level.
    #[arg(long)]
    pub grid_level: Option<u32>,
}

impl GridArgs {
    fn grid(&self, cfg: PrecisionConfig) -> Result<WitnessGrid> {
        match (self.epsilon, self.grid_level) {
            (_, Some(l)) => WitnessGrid::with_level(cfg, l),
            (Some(e), None) => WitnessGrid::for_epsilon(cfg, e),
            (None, None) => Err(TwdError::Config("--epsilon or --grid-level required".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenGridArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = PrecisionConfig::DEFAULT_Q)]
    pub q: u32,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct NetArgs {
    #[arg(long)]
    pub landmarks: PathBuf,
    /// Sampling radius; estimated from the points when omitted.
    #[arg(long, requires = "mu_bar")]
    pub lambda: Option<f64>,
    #[arg(long, requires = "lambda")]
    pub mu_bar: Option<f64>,
}

impl NetArgs {
    fn load(&self) -> Result<(PointsFile, LandmarkSet)> {
        let f = read_points_path(&self.landmarks)?;
        let ls = load_set(&f, self.lambda, self.mu_bar)?;
        Ok((f, ls))
    }
}

fn load_set(f: &PointsFile, lambda: Option<f64>, mu_bar: Option<f64>) -> Result<LandmarkSet> {
    match (lambda, mu_bar) {
        (Some(l), Some(m)) => LandmarkSet::new(f.cfg, f.points.clone(), l, m),
        _ => LandmarkSet::from_points(f.cfg, f.points.clone()),
    }
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Largest simplex dimension recorded; defaults to d.
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub out_complex: PathBuf,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Perturbation radius; defaults to mu_bar lambda / 8.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to 50 |L|.
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// Skip the feasibility check and resample a local neighborhood.
    #[arg(long)]
    pub practical: bool,
    /// Practical-mode neighborhood radius in multiples of lambda.
    #[arg(long, requires = "practical")]
    pub neighborhood: Option<f64>,
    #[arg(long)]
    pub out_points: Option<PathBuf>,
    #[arg(long)]
    pub out_complex: Option<PathBuf>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl EngineArgs {
    fn engine(&self, ls: &LandmarkSet) -> EngineConfig {
        let rho = self.rho.unwrap_or(ls.mu_bar * ls.lambda / 8.0);
        let mut c = if self.practical {
            EngineConfig::practical(ls, rho, self.seed)
        } else {
            EngineConfig::new(ls, rho, self.seed)
        };
        if let Some(m) = self.max_rounds {
            c.max_rounds = m;
        }
        if let Some(r) = self.neighborhood {
            c.neighborhood = Neighborhood::Radius(r * ls.lambda);
        }
        c
    }

    fn finish<R: Serialize>(
        &self,
        src: &PointsFile,
        out: &LandmarkSet,
        k: &SimplicialComplex,
        report: &R,
        terminated: bool,
        rounds: usize,
    ) -> Result<()> {
        if let Some(p) = &self.out_points {
            let f = PointsFile { cfg: src.cfg, points: out.points().to_vec(), map: src.map.clone() };
            write_points_path(p, &f)?;
        }
        if let Some(p) = &self.out_complex {
            write_complex_path(p, k)?;
        }
        emit(self.report.as_deref(), report)?;
        if terminated {
            Ok(())
        } else {
            Err(TwdError::NonTermination(rounds))
        }
    }
}

#[derive(Debug, Args)]
pub struct Algo1Args {
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct Algo2Args {
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Protection target of the check step.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Thickness parameter bounding the full-cell count.
    #[arg(long)]
    pub theta0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub complex: PathBuf,
    #[arg(long, requires = "mu_bar")]
    pub lambda: Option<f64>,
    #[arg(long, requires = "lambda")]
    pub mu_bar: Option<f64>,
    /// Also rebuild the witness complex on this grid and check it against the oracle.
    #[command(flatten)]
    pub grid: OptGridArgs,
}

#[derive(Debug, Args, Clone)]
pub struct OptGridArgs {
    #[arg(long, conflicts_with = "grid_level")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub grid_level: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub mu_bar: f64,
    /// Defaults to mu_bar lambda / 8.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub epsilon: f64,
    /// Practical delta; requires --theta0.
    #[arg(long, requires = "theta0")]
    pub delta: Option<f64>,
    #[arg(long, requires = "delta")]
    pub theta0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Whitespace-separated real coordinates, one point per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub margin: f64,
    #[arg(long, default_value_t = PrecisionConfig::DEFAULT_Q)]
    pub q: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub complex: PathBuf,
    /// SVG destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit<T: Serialize>(path: Option<&Path>, v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| TwdError::Internal(e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, s + "\n")?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{s}")?;
        }
    }
    Ok(())
}

/// Worker cap from `TWD_THREADS`; the current build runs every kernel on one thread.
pub fn thread_cap(var: Option<OsString>) -> Result<usize> {
    match var {
        None => Ok(1),
        Some(v) => v
            .to_str()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .ok_or_else(|| TwdError::Config(format!("TWD_THREADS={v:?} is not a positive integer"))),
    }
}

fn dim_counts(k: &SimplicialComplex) -> Vec<usize> {
    (0..=k.dim().unwrap_or(0)).map(|i| k.count_dim(i)).collect()
}

/// Runs one parsed command.
pub fn run(cli: Cli) -> Result<()> {
    thread_cap(std::env::var_os("TWD_THREADS"))?;
    match cli.command {
        Command::GenNet(a) => {
            let cfg = PrecisionConfig::new(a.dim, a.q)?;
            let ls = generate_net(cfg, a.lambda, a.mu_bar, a.seed)?;
            write_points_path(&a.out, &PointsFile { cfg, points: ls.points().to_vec(), map: None })?;
            emit(None, &json!({ "n": ls.len(), "lambda": ls.lambda, "mu_bar": ls.mu_bar, "seed": a.seed }))
        }
        Command::GenGrid(a) => {
            let cfg = PrecisionConfig::new(a.dim, a.q)?;
            let g = a.grid.grid(cfg)?;
            if let Some(p) = &a.out {
                if g.len() > MAX_GRID_POINTS {
                    return Err(TwdError::Config(format!("grid has {} points, limit {MAX_GRID_POINTS}", g.len())));
                }
                write_points_path(p, &PointsFile { cfg, points: g.points()?, map: None })?;
            }
            emit(
                None,
                &json!({ "level": g.level, "side": g.side(), "epsilon": g.epsilon(), "points": g.len() as f64 }),
            )
        }
        Command::Witness(a) => {
            let (_, ls) = a.net.load()?;
            let g = a.grid.grid(ls.cfg)?;
            let k = build_witness_complex(&ls, &g, a.k_max.unwrap_or(ls.dim()))?;
            write_complex_path(&a.out_complex, &k)?;
            let good = (0..ls.len()).filter(|&p| k.has_good_link(p, ls.dim())).count();
            emit(
                None,
                &json!({
                    "n": ls.len(),
                    "epsilon": g.epsilon(),
                    "simplices_by_dim": dim_counts(&k),
                    "good_links": good,
                    "euler_characteristic": k.euler_characteristic(),
                }),
            )
        }
        Command::Algo1(a) => {
            let e = &a.engine;
            let (src, ls) = e.net.load()?;
            let g = e.grid.grid(ls.cfg)?;
            let cfg = e.engine(&ls);
            let (out, k, rep) = run_algorithm1(&ls, &g, &cfg)?;
            e.finish(&src, &out, &k, &rep, rep.terminated, rep.rounds)
        }
        Command::Algo2(a) => {
            let e = &a.engine;
            let (src, ls) = e.net.load()?;
            let g = e.grid.grid(ls.cfg)?;
            let rc = RdcConfig { engine: e.engine(&ls), delta: a.delta, theta_0: a.theta0 };
            let (out, k, _, rep) = run_algorithm2(&ls, &g, &rc)?;
            e.finish(&src, &out, &k, &rep, rep.terminated, rep.rounds)
        }
        Command::Verify(a) => verify(&a),
        Command::Params(a) => {
            let rho = a.rho.unwrap_or(a.mu_bar * a.lambda / 8.0);
            let ov = a.delta.zip(a.theta0).map(|(delta, theta_0)| Overrides { delta, theta_0 });
            let c = AnalysisConstants::compute(a.dim, a.lambda, a.mu_bar, rho, a.epsilon, ov)?;
            emit(None, &c)
        }
        Command::Ingest(a) => {
            let f = std::fs::File::open(&a.input)?;
            let pts = super::read_real_points(std::io::BufReader::new(f))?;
            let out = super::ingest(&pts, a.margin, a.q)?;
            write_points_path(&a.out, &out)?;
            eprintln!("warning: simplices near the box boundary are Delaunay only for the periodic extension");
            let m = out.map.as_ref().expect("ingest records its map");
            emit(None, &json!({ "n": out.points.len(), "d": out.cfg.dim, "scale": m.scale, "offset": m.offset }))
        }
        Command::Plot(a) => {
            let f = read_points_path(&a.points)?;
            let k = read_complex_path(&a.complex)?;
            let svg = super::plot_svg(&f, &k)?;
            match &a.out {
                Some(p) => std::fs::write(p, svg)?,
                None => std::io::stdout().lock().write_all(svg.as_bytes())?,
            }
            Ok(())
        }
    }
}

fn verify(a: &VerifyArgs) -> Result<()> {
    let f = read_points_path(&a.points)?;
    let ls = load_set(&f, a.lambda, a.mu_bar)?;
    let k = read_complex_path(&a.complex)?;
    if let Some(&v) = k.vertices().iter().find(|&&v| v >= ls.len()) {
        return Err(TwdError::UnknownVertex(v));
    }
    let d = ls.dim();
    let del = brute_force_delaunay(&ls);
    let quality = quality_report(&ls, &k);
    let inheritance = verify_inheritance(&ls, &del.complex);
    let thickness = verify_thickness_from_protection(&ls, &del.complex);
    let conversions = verify_conversions(&ls, &del.complex);
    let good = (0..ls.len()).filter(|&p| k.has_good_link(p, d)).count();
    let mut out = json!({
        "n": ls.len(),
        "d": d,
        "lambda": ls.lambda,
        "mu_bar": ls.mu_bar,
        "quality": quality,
        "equals_delaunay": { "pass": k == del.complex, "oracle_generic": del.generic,
            "oracle_volume_sum": del.volume_sum, "simplices_by_dim": dim_counts(&k),
            "delaunay_simplices_by_dim": dim_counts(&del.complex) },
        "good_links": { "pass": good == ls.len(), "count": good },
        "euler_characteristic": k.euler_characteristic(),
        "inheritance": { "pass": inheritance.passed(), "report": inheritance },
        "thickness_from_protection": { "pass": thickness.violations.is_empty(), "report": thickness },
        "conversions": { "pass": conversions.passed(), "report": conversions },
    });
    let og = &a.grid;
    if og.epsilon.is_some() || og.grid_level.is_some() {
        let g = GridArgs { epsilon: og.epsilon, grid_level: og.grid_level }.grid(ls.cfg)?;
        let wit = build_witness_complex(&ls, &g, d)?;
        let v = wit_subset_violations(&wit, &del.complex);
        let id = verify_identity_from_protection(&ls, &wit, &del.complex, g.epsilon());
        out["witness_in_delaunay"] = json!({ "pass": v.is_empty(), "violations": v.len() });
        out["identity_from_protection"] = json!({ "pass": id.violations.is_empty(), "report": id });
    }
    emit(None, &out)
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("twd: {e}");
            e.exit_code()
        }
    }
}
