use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cantorval::config::Config;
use cantorval::geometry::{control_points_capped, cut_and_project, ControlPoints, Interval, PatchSeed};
use cantorval::ifs::render::{render, RenderStyle};
use cantorval::ifs::{exact_hull, solve_interval_fixed_point, WindowSolution};
use cantorval::pipeline::{admit, analyze, boundary_graph, dimension_report, sample, window_system};
use cantorval::subst::{parse_substitution, Substitution, DEFAULT_WORD_CAP};
use cantorval::{Error, ErrorClass, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

/// Window geometry of binary Pisot substitutions: exact interval windows,
/// chaos-game images, and the Hausdorff dimension of Cantorval boundaries.
///
/// Exit status: 0 success, 1 internal error, 2 rejected input or usage error,
/// 3 resource limit.
#[derive(Debug, Parser)]
#[command(name = "cantorval", version)]
struct Cli {
    /// Flat TOML file with tolerances and sampling defaults; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full report: matrix, eigendata, windows, invertibility, boundary dimension, classification.
    Analyze {
        /// Substitution, as `(ab,a)` or `a -> ab; b -> a`.
        subst: String,
        #[command(flatten)]
        common: Common,
        /// Write the JSON report here instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Chaos-game image of the two windows: PPM, or SVG when the path ends in .svg.
    Render {
        subst: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH", default_value = "windows.ppm")]
        out: PathBuf,
        /// Also write the samples as `window,position` CSV.
        #[arg(long, value_name = "PATH")]
        cloud: Option<PathBuf>,
        #[arg(long, default_value_t = 800, value_parser = clap::value_parser!(u32).range(1..=20_000))]
        width: u32,
        #[arg(long, default_value_t = 120, value_parser = clap::value_parser!(u32).range(2..=20_000))]
        height: u32,
    },
    /// Boundary dimension as JSON, with the spectral radius at bounds B and B+1.
    Dimension {
        subst: String,
        #[command(flatten)]
        common: Common,
        /// Also write the boundary graph in DOT format.
        #[arg(long, value_name = "PATH")]
        export_graph: Option<PathBuf>,
    },
    /// Control points as `type,m,n,approx` CSV, from a patch or from the windows.
    Points {
        subst: String,
        /// Inflate the legal seed pair this many times.
        #[arg(long, conflicts_with = "radius", required_unless_present = "radius")]
        level: Option<usize>,
        /// Points in [-R, R]; from the smallest covering patch unless --via-window.
        #[arg(long, value_name = "R", value_parser = parse_radius)]
        radius: Option<BigRational>,
        /// Select points by cut and project with the exact interval windows.
        #[arg(long, requires = "radius")]
        via_window: bool,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// The pruned boundary graph as DOT or JSON.
    ExportGraph {
        subst: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Coefficient bound B for seeding boundary-graph nodes.
    #[arg(long, value_parser = clap::value_parser!(i64).range(0..=64))]
    bound: Option<i64>,
    /// Chaos-game steps, burn-in included.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    burn_in: Option<usize>,
}

fn parse_radius(s: &str) -> std::result::Result<BigRational, String> {
    cantorval::geometry::parse_radius(s).map_err(|e| e.to_string())
}

fn load_config(path: Option<&Path>, common: &Common) -> Result<Config> {
    let mut cfg = match path {
        Some(p) => Config::parse(&fs::read_to_string(p)?)?,
        None => Config::default(),
    };
    if let Some(b) = common.bound {
        cfg.bound = b;
    }
    if let Some(n) = common.samples {
        cfg.samples = n as usize;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(b) = common.burn_in {
        cfg.burn_in = b;
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Smallest patch around the seed whose support covers `[-r, r]`.
fn covering_patch(s: &Substitution, r: &BigRational) -> Result<ControlPoints> {
    let inf = admit(s)?;
    let seed = PatchSeed::from(s.seed_cycle()?);
    let f = inf.field;
    let zero = BigRational::from_integer(0.into());
    let region = Interval::new(f.num(-r.clone(), zero.clone()), f.num(r.clone(), zero));
    for level in 0.. {
        let cp = control_points_capped(s, &inf.lengths, level, seed, DEFAULT_WORD_CAP)?;
        if cp.support.lo <= region.lo && cp.support.hi >= region.hi {
            return Ok(cp.restrict(&region));
        }
    }
    unreachable!()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { subst, common, out } => {
            let cfg = load_config(cli.config.as_deref(), &common)?;
            let report = analyze(&parse_substitution(&subst)?, &cfg)?;
            emit(out.as_deref(), &json(&report))
        }
        Command::Render {
            subst,
            common,
            out,
            cloud,
            width,
            height,
        } => {
            let cfg = load_config(cli.config.as_deref(), &common)?;
            let inf = admit(&parse_substitution(&subst)?)?;
            let pts = sample(&window_system(&inf)?, &cfg)?;
            render(&pts, &out, width, height, &RenderStyle::default())?;
            if let Some(path) = cloud {
                fs::write(path, pts.to_csv())?;
            }
            Ok(())
        }
        Command::Dimension {
            subst,
            common,
            export_graph,
        } => {
            let cfg = load_config(cli.config.as_deref(), &common)?;
            let inf = admit(&parse_substitution(&subst)?)?;
            let sys = window_system(&inf)?;
            let hulls = exact_hull(&sys)?;
            let cloud = if solve_interval_fixed_point(&sys)?.is_intervals() {
                None
            } else {
                Some(sample(&sys, &cfg)?)
            };
            let (report, graph) = dimension_report(&inf, &hulls, &cfg, cloud.as_ref())?;
            if let Some(p) = export_graph {
                fs::write(p, graph.to_dot())?;
            }
            emit(None, &json(&report))
        }
        Command::Points {
            subst,
            level,
            radius,
            via_window,
            out,
        } => {
            let s = parse_substitution(&subst)?;
            let inf = admit(&s)?;
            let cp = match (level, radius) {
                (Some(n), _) => {
                    let seed = PatchSeed::from(s.seed_cycle()?);
                    control_points_capped(&s, &inf.lengths, n, seed, DEFAULT_WORD_CAP)?
                }
                (None, Some(r)) if via_window => {
                    let sys = window_system(&inf)?;
                    match solve_interval_fixed_point(&sys)? {
                        WindowSolution::Intervals { a, b } => cut_and_project(inf.field, inf.beta(), Some(&a), Some(&b), &r)?,
                        WindowSolution::NotIntervals { .. } => return Err(Error::NonIntervalWindow),
                    }
                }
                (None, Some(r)) => covering_patch(&s, &r)?,
                (None, None) => return Err(Error::InvalidArgument("one of --level or --radius is required".into())),
            };
            emit(out.as_deref(), &cp.to_csv(inf.beta()))
        }
        Command::ExportGraph {
            subst,
            common,
            format,
            out,
        } => {
            let cfg = load_config(cli.config.as_deref(), &common)?;
            let inf = admit(&parse_substitution(&subst)?)?;
            let hulls = exact_hull(&window_system(&inf)?)?;
            let g = boundary_graph(&inf, &hulls, cfg.bound, &cfg)?;
            let body = match format {
                GraphFormat::Dot => g.to_dot(),
                GraphFormat::Json => json(&g.to_json()),
            };
            emit(out.as_deref(), &body)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Internal => 1,
        ErrorClass::Rejected => 2,
        ErrorClass::Resource => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut body = serde_json::json!({
                "error": e.code(),
                "message": e.to_string(),
            });
            if let Error::NotUnimodular { det } = e {
                body["det"] = det.into();
            }
            eprintln!("{body}");
            ExitCode::from(exit_code(&e))
        }
    }
}
