//! Command-line interface.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use holonomy_core::construction::{build, ConstructionConfig, ScheduleMode};
use holonomy_core::ColorAdjacency;
use holonomy_core::typespace::dihedral_report;
use serde::Serialize;

use crate::io;
use crate::par::RayonExecutor;
use crate::report::{run_report, ReportOptions};
use crate::verify::{verify_file, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "holonomy", version, about = "Build, verify and measure staged four-colored Schreier graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the construction and write the graph and its log.
    Build(BuildArgs),
    /// Check every invariant of a build; exits 3 on any failure.
    Verify(VerifyArgs),
    /// Measures on the even and odd stages, the gap, and type-space exports.
    Report(ReportArgs),
    /// Contrasting examples.
    Demo {
        #[command(subcommand)]
        demo: Demo,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Schedule {
    Paper,
    Desk,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// JSON file with construction settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub levels: Option<u32>,
    #[arg(long, value_enum)]
    pub schedule: Option<Schedule>,
    /// Also require s_i >= 10^(i+1).
    #[arg(long)]
    pub net_floor: bool,
    #[arg(long)]
    pub diam_mult: Option<u64>,
    #[arg(long)]
    pub girth: Option<u32>,
    #[arg(long)]
    pub chord: Option<u32>,
    #[arg(long)]
    pub seed: u64,
    /// Freeness radius the girth must support.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub max_vertices: Option<u64>,
    #[arg(long, default_value = "graph.json")]
    pub out: PathBuf,
    #[arg(long, default_value = "build.json")]
    pub log: PathBuf,
}

#[derive(Args, Debug)]
pub struct InputArgs {
    #[arg(long, default_value = "graph.json")]
    pub graph: PathBuf,
    #[arg(long, default_value = "build.json")]
    pub log: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Largest radius for the pushforward defects.
    #[arg(long, default_value_t = 4)]
    pub r_max: u32,
    /// Also write the results as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    #[arg(long, default_value_t = 5)]
    pub k: u32,
    #[arg(long, default_value_t = 6)]
    pub type_radius: u32,
    #[arg(long, default_value_t = 2)]
    pub holonomy_radius: u32,
    /// Stage whose stable region is typed (default max(N-2, 1)).
    #[arg(long)]
    pub stage: Option<u32>,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    #[arg(long)]
    pub types_csv: Option<PathBuf>,
    #[arg(long)]
    pub holonomy_csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Demo {
    /// Truncated dihedral action at sizes n/2 and n.
    Dihedral {
        #[arg(long, default_value_t = 100)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 10)]
        budget: u32,
    },
}

/// Base settings (defaults or a config file) with flags applied.
pub fn resolve_config(args: &BuildArgs) -> Result<ConstructionConfig> {
    let mut c = match &args.config {
        Some(path) => {
            let mut base = serde_json::to_value(ConstructionConfig::default())?;
            let overlay: serde_json::Value = io::read_json(path)?;
            let obj = overlay.as_object().context("config file must hold a JSON object")?;
            for (key, value) in obj {
                base[key] = value.clone();
            }
            serde_json::from_value(base).context("invalid config file")?
        }
        None => ConstructionConfig::default(),
    };
    c.seed = args.seed;
    c.net_floor |= args.net_floor;
    if let Some(v) = args.m {
        c.m = v;
    }
    if let Some(v) = args.levels {
        c.levels = v;
    }
    if let Some(s) = args.schedule {
        c.schedule = match s {
            Schedule::Paper => ScheduleMode::Paper,
            Schedule::Desk => ScheduleMode::Desk,
        };
    }
    if let Some(v) = args.diam_mult {
        c.diam_multiplier = v;
    }
    if let Some(v) = args.girth {
        c.girth = v;
    }
    if let Some(v) = args.chord {
        c.chord_span = v;
    }
    if let Some(v) = args.k {
        c.free_radius = v;
    }
    if let Some(v) = args.max_vertices {
        c.max_vertices = v;
    }
    Ok(c)
}

/// Exit code for an error, by its core cause.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use holonomy_core::Error as E;
    match err.chain().find_map(|e| e.downcast_ref::<E>()) {
        Some(E::Budget { .. } | E::Infeasible { .. }) => EXIT_BUDGET,
        Some(E::Config(_) | E::Schedule(_) | E::TooSmall(_) | E::InsufficientLevels { .. } | E::RadiusMismatch(..) | E::OutOfUnitRange(_)) => EXIT_CONFIG,
        Some(_) => EXIT_INVARIANT,
        None => EXIT_CONFIG,
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn cmd_build(args: &BuildArgs) -> Result<i32> {
    let config = resolve_config(args)?;
    let (g, log) = build(&config)?;
    io::write_graph(&args.out, &g)?;
    io::write_log(&args.log, &log)?;
    eprintln!("built {} vertices over {} stages, scales {:?}", g.vertex_count(), log.levels(), log.scales);
    Ok(EXIT_OK)
}

fn load(input: &InputArgs) -> Result<(io::GraphFile, holonomy_core::construction::BuildLog)> {
    Ok((io::read_graph_file(&input.graph)?, io::read_log(&input.log)?))
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let (file, log) = load(&args.input)?;
    let exec = RayonExecutor::from_env();
    let report = verify_file(&file, &log, &VerifyOptions { defect_radius: args.r_max }, &exec);
    for c in &report.checks {
        println!("{}", c.line());
    }
    if let Some(path) = &args.json {
        io::write_json_pretty(path, &report)?;
    }
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_INVARIANT })
}

fn cmd_report(args: &ReportArgs) -> Result<i32> {
    let (file, log) = load(&args.input)?;
    let g = file.to_graph()?;
    let exec = RayonExecutor::from_env();
    let opts = ReportOptions { r: args.r, k: args.k, type_radius: args.type_radius, holonomy_radius: args.holonomy_radius, stage: args.stage };
    let out = run_report(&g, &log, &opts, &exec)?;
    io::write_json_pretty(&args.out, &out.report)?;
    if let Some(path) = &args.types_csv {
        io::write_type_table(path, &out.table)?;
    }
    if let Some(path) = &args.holonomy_csv {
        io::write_holonomy(path, &out.holonomy)?;
    }
    let c = &out.report.cost;
    println!(
        "e(mu1) = {:.4}  free(mu2) = {:.4}  cost(mu2) = {:.4}  gap = {:.4}  tv = {:.4}",
        c.edge_measure_mu1, c.free_fraction_mu2, c.cost_estimate_mu2, c.gap, c.tv_distance
    );
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct DihedralOutput {
    reports: Vec<holonomy_core::typespace::DihedralReport>,
    holonomy_ratio: f64,
}

fn cmd_dihedral(n: u32, r: u32, budget: u32) -> Result<i32> {
    let exec = RayonExecutor::from_env();
    let small = dihedral_report(n / 2, r, budget, &exec)?;
    let large = dihedral_report(n, r, budget, &exec)?;
    let ratio = f64::from(large.holonomy_radius) / f64::from(small.holonomy_radius.max(1));
    print_json(&DihedralOutput { reports: vec![small, large], holonomy_ratio: ratio })?;
    Ok(EXIT_OK)
}

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Report(args) => cmd_report(args),
        Command::Demo { demo: Demo::Dihedral { n, r, budget } } => cmd_dihedral(*n, *r, *budget),
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

