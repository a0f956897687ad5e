use biscroll::biell::FamilyConfig;
use biscroll::cli::{
    self, FamilyOptions, HeisenbergOptions, LatticeOptions, RunError, ScrollOptions, UnionOptions,
};
use biscroll::report::Report;
use biscroll::scrollgeo::PointCloud;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::time::Instant;

/// Verification runs for elliptic scrolls, scroll unions, and their
/// bielliptic smoothings. Every command writes `report.json` (and point
/// clouds as CSV with JSON sidecars) into the output directory and exits
/// 0 on a fully green report, 1 on a failed check, 2 on a configuration
/// error, 3 on a numerical-stability error.
#[derive(Parser)]
#[command(name = "biscroll", version, about)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
    /// Output directory for report.json and artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Exact lattice suite: intersection numbers, Riemann-Roch values,
    /// bundle identities, bielliptic polarization numbers.
    VerifyLattice(VerifyLatticeArgs),
    /// Exact commutators of 2-torsion lifts in the level-n Heisenberg group.
    VerifyHeisenberg(VerifyHeisenbergArgs),
    /// Sample a translation scroll and verify its degree by rank counting.
    Scrolls(ScrollArgs),
    /// Sample the union of two scrolls, verify degree 2n and the double curve.
    Union(UnionArgs),
    /// Build the smoothing family, verify invariant sections and the
    /// degeneration toward the union.
    SmoothFamily(SmoothFamilyArgs),
}

#[derive(Args)]
struct VerifyLatticeArgs {
    #[arg(long, default_value_t = 5)]
    n_min: i64,
    #[arg(long, default_value_t = 16)]
    n_max: i64,
    /// Seed for the random moduli of the formula suite.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct VerifyHeisenbergArgs {
    #[arg(long, default_value_t = 6)]
    n_min: i64,
    #[arg(long, default_value_t = 16)]
    n_max: i64,
}

#[derive(Args)]
struct CommonGeomArgs {
    /// Degree of the elliptic normal curve.
    #[arg(long)]
    n: usize,
    /// Modulus of E as two reals RE IM.
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], default_values_t = [0.0, 1.0])]
    tau_e: Vec<f64>,
    /// Sample count (0 = derive from the monomial budget).
    #[arg(long, default_value_t = 0)]
    samples: usize,
    /// Relative singular-value threshold for rank decisions.
    #[arg(long, default_value_t = 1e-8)]
    rank_tol: f64,
    /// Seed for all sampling in this run.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct ScrollArgs {
    #[command(flatten)]
    common: CommonGeomArgs,
    /// Index (1..=3) of the 2-torsion translation point.
    #[arg(long, default_value_t = 1)]
    pi: usize,
    /// Non-2-torsion translation point "a/b,c/d" in the tau basis; switches
    /// to the singular degree-2n translation scroll.
    #[arg(long)]
    generic_point: Option<String>,
}

#[derive(Args)]
struct UnionArgs {
    #[command(flatten)]
    common: CommonGeomArgs,
    #[arg(long, default_value_t = 1)]
    pi: usize,
    #[arg(long, default_value_t = 2)]
    pj: usize,
}

#[derive(Args)]
struct SmoothFamilyArgs {
    #[command(flatten)]
    common: CommonGeomArgs,
    #[arg(long, default_value_t = 1)]
    pi: usize,
    #[arg(long, default_value_t = 2)]
    pj: usize,
    /// Family parameter t as "RE,IM" or "RE"; repeatable, |t| in (0,1).
    #[arg(long = "t", value_parser = parse_complex)]
    t_values: Vec<(f64, f64)>,
}

fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.len() {
        1 => Ok((parts[0].trim().parse().map_err(|e| format!("{e}"))?, 0.0)),
        2 => Ok((
            parts[0].trim().parse().map_err(|e| format!("{e}"))?,
            parts[1].trim().parse().map_err(|e| format!("{e}"))?,
        )),
        _ => Err(format!("expected RE or RE,IM, got '{s}'")),
    }
}

fn run(args: &CliArgs) -> Result<(Report, Vec<PointCloud>), RunError> {
    match &args.command {
        Command::VerifyLattice(a) => {
            let report = cli::cmd_verify_lattice(&LatticeOptions {
                n_min: a.n_min,
                n_max: a.n_max,
                seed: a.seed,
            })?;
            Ok((report, Vec::new()))
        }
        Command::VerifyHeisenberg(a) => {
            let report = cli::cmd_verify_heisenberg(&HeisenbergOptions {
                n_min: a.n_min,
                n_max: a.n_max,
            })?;
            Ok((report, Vec::new()))
        }
        Command::Scrolls(a) => cli::cmd_scrolls(&ScrollOptions {
            n: a.common.n,
            tau_e: [a.common.tau_e[0], a.common.tau_e[1]],
            pi: a.pi,
            generic_point: a.generic_point.clone(),
            samples: a.common.samples,
            rank_tol: a.common.rank_tol,
            seed: a.common.seed,
            out: Some(args.out.clone()),
        }),
        Command::Union(a) => cli::cmd_union(&UnionOptions {
            n: a.common.n,
            tau_e: [a.common.tau_e[0], a.common.tau_e[1]],
            pi: a.pi,
            pj: a.pj,
            samples: a.common.samples,
            rank_tol: a.common.rank_tol,
            seed: a.common.seed,
            out: Some(args.out.clone()),
        }),
        Command::SmoothFamily(a) => {
            let mut cfg = FamilyConfig::new(
                a.common.n,
                num_complex::Complex64::new(a.common.tau_e[0], a.common.tau_e[1]),
                a.common.seed,
            )
            .map_err(|e| RunError::Config(e.to_string()))?;
            cfg.pi = a.pi;
            cfg.pj = a.pj;
            if !a.t_values.is_empty() {
                cfg.t_values = a.t_values.iter().map(|&(re, im)| [re, im]).collect();
            }
            cfg.cloud_count = a.common.samples;
            cfg.rank_tol = a.common.rank_tol;
            cli::cmd_smooth_family(&FamilyOptions {
                cfg,
                out: Some(args.out.clone()),
            })
        }
    }
}

fn main() {
    let args = CliArgs::parse();
    let start = Instant::now();
    match run(&args) {
        Ok((mut report, clouds)) => {
            let wall = start.elapsed().as_millis() as u64;
            if let Err(e) = cli::write_artifacts(&args.out, &mut report, &clouds, wall) {
                eprintln!("error: {e}");
                std::process::exit(e.exit_code());
            }
            for check in &report.checks {
                let status = if check.pass { "PASS" } else { "FAIL" };
                println!("[{status}] {}: expected {}, observed {}", check.name, check.expected, check.observed);
            }
            println!(
                "{}: {} checks, {} failed, {} ms -> {}",
                report.command,
                report.checks.len(),
                report.checks.iter().filter(|c| !c.pass).count(),
                wall,
                args.out.join("report.json").display(),
            );
            std::process::exit(if report.pass { 0 } else { 1 });
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
