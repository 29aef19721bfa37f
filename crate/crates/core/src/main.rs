use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use bc_core::clark::clark_measure;
use bc_core::density::{default_r_ladder, quasi_separation_count, separation_constant, uniform_upper_density};
use bc_core::diagnostics::{descent_chain, image_diameter};
use bc_core::grid::dyadic_centers;
use bc_core::report::{emit_grids, emit_report, parse_zeros_file, report_json, run_battery, AnalysisConfig};
use bc_core::{BoundaryPoint, DiskPoint, Error};

#[derive(Parser)]
#[command(name = "bcmap", version, about = "Diagnostics for finite Blaschke products on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON analysis configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV of zeros, one `re,im` per line.
    #[arg(long)]
    zeros: Option<PathBuf>,
    /// Clark parameter angle (replaces the configured list).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Largest grid radius.
    #[arg(long)]
    rmax: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full condition battery.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Directory for the grid CSV files.
        #[arg(long)]
        grids: Option<PathBuf>,
    },
    /// Clark measure for each configured α.
    Clark {
        #[command(flatten)]
        common: Common,
    },
    /// Separation, quasi-separation and upper density of the critical set or the zeros.
    Density {
        #[command(flatten)]
        common: Common,
        /// Analyze the zeros instead of the critical points.
        #[arg(long)]
        of_zeros: bool,
    },
    /// Descent chain from a point.
    Descent {
        #[command(flatten)]
        common: Common,
        /// Starting point `re,im`.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 10)]
        length: usize,
    },
    /// Hyperbolic diameter of the image of a ball.
    Diameter {
        #[command(flatten)]
        common: Common,
        /// Ball center `re,im`.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        point: String,
        /// Hyperbolic radius (defaults to the configured radius).
        #[arg(long)]
        radius: Option<f64>,
    },
}

/// Input problems exit with 1, numerical failures with 2.
enum Failure {
    Input(Error),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e)
        }
    }
}

fn load_config(common: &Common) -> Result<AnalysisConfig, Error> {
    let mut config = match &common.config {
        Some(path) => AnalysisConfig::from_file(path)?,
        None => AnalysisConfig::default(),
    };
    if let Some(path) = &common.zeros {
        config.set_zeros(&parse_zeros_file(path)?);
    }
    if let Some(alpha) = common.alpha {
        config.alphas = vec![alpha];
    }
    if let Some(r) = common.rmax {
        config.grid.r_max = r;
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.output.report = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn parse_point(text: &str) -> Result<DiskPoint, Error> {
    let bad = || Error::InvalidArgument(format!("expected a point `re,im`, got `{text}`"));
    let (re, im) = text.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    DiskPoint::from_re_im(re, im)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| Error::Io { path: p.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(path: Option<&Path>, value: &Value) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_output(path, &text)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { common, grids } => {
            let config = load_config(&common)?;
            let report = run_battery(&config)?;
            match &config.output.report {
                Some(path) => emit_report(&report, path)?,
                None => write_output(None, &report_json(&report)?)?,
            }
            if let Some(dir) = grids.as_ref().or(config.output.grids_dir.as_ref()) {
                emit_grids(&report, dir)?;
            }
            if report.has_failures() {
                return Err(Failure::Numerical(format!("failed sections: {}", report.failed_sections().join(", "))));
            }
            Ok(())
        }
        Command::Clark { common } => {
            let config = load_config(&common)?;
            let f = config.blaschke()?;
            let mut measures = Vec::new();
            for &alpha in &config.alphas {
                let mu = clark_measure(&f, BoundaryPoint::new(alpha))?;
                measures.push(json!({
                    "alpha": alpha,
                    "total_mass": mu.total_mass(),
                    "herglotz_constant": mu.herglotz_constant,
                    "atoms": mu.atoms,
                }));
            }
            emit_json(common.out.as_deref(), &json!({ "degree": f.degree(), "measures": measures }))?;
            Ok(())
        }
        Command::Density { common, of_zeros } => {
            let config = load_config(&common)?;
            let f = config.blaschke()?;
            let points = if of_zeros { f.zeros().to_vec() } else { f.critical_points()?.points };
            let d = &config.density;
            let est = uniform_upper_density(
                &points,
                &dyadic_centers(3, d.a_level, true)?,
                &default_r_ladder(d.r_max, d.rungs)?,
            )?;
            let qs = quasi_separation_count(&points, 1.0)?;
            let sep = separation_constant(&points);
            emit_json(
                common.out.as_deref(),
                &json!({
                    "set": if of_zeros { "zeros" } else { "critical_points" },
                    "points": points.len(),
                    "separation": if sep.is_finite() { json!(sep) } else { json!(null) },
                    "quasi_separation": qs,
                    "d_plus": est.d_plus,
                    "witness": est.witness,
                    "r_ladder": est.r_ladder,
                }),
            )?;
            Ok(())
        }
        Command::Descent { common, point, eps, length } => {
            let config = load_config(&common)?;
            let f = config.blaschke()?;
            let z = parse_point(&point)?;
            let chain = descent_chain(&f, z, eps, length, config.grid.search_depth)?;
            emit_json(common.out.as_deref(), &json!({
                "complete": chain.complete,
                "xi": chain.xi.angle(),
                "squares": chain.squares.iter().map(|q| q.key()).collect::<Vec<_>>(),
                "witnesses": chain.witnesses,
            }))?;
            Ok(())
        }
        Command::Diameter { common, point, radius } => {
            let config = load_config(&common)?;
            let f = config.blaschke()?;
            let z = parse_point(&point)?;
            let radius = radius.unwrap_or(config.grid.radius);
            let d = image_diameter(&f, z, radius, config.grid.boundary_samples)?;
            emit_json(common.out.as_deref(), &json!({
                "z": [z.value().re, z.value().im],
                "radius": radius,
                "n_boundary": config.grid.boundary_samples,
                "diameter": d,
            }))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
