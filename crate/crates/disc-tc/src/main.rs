//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input/parse failure, 3 validation failure,
//! 4 numeric non-convergence. Output is JSON (stdout or `--out`), identical
//! byte-for-byte across runs with the same inputs and seed.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use disc_tc::config::{self, CoeffVector, PlanarConfig};
use disc_tc::planner::{self, PlanOptions, PotentialKind};
use disc_tc::{lattice, morse, torus, verify, Error, SparsePoly};

#[derive(Parser)]
#[command(name = "disc-tc", version, about = "Torus-action bounds on topological complexity for complements of discriminantal hypersurfaces")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PotentialArg {
    G,
    Gprime,
}

impl From<PotentialArg> for PotentialKind {
    fn from(p: PotentialArg) -> Self {
        match p {
            PotentialArg::G => PotentialKind::G,
            PotentialArg::Gprime => PotentialKind::GPrime,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Basis and degrees of the homogeneisation module of a polynomial.
    Homog {
        /// Polynomial JSON: {"dim": m, "terms": [{"exp": [...], "re": a, "im": b}, ...]}
        #[arg(long)]
        input: PathBuf,
    },
    /// The bound 2m - s + t for a torus action given by its integer matrix.
    Bound {
        #[arg(long)]
        input: PathBuf,
        /// Action matrix, rows separated by ';', entries by ',': "1,1,1;2,4,0"
        #[arg(long)]
        xi: String,
    },
    /// Sampled eigenvalue-signature checks of the Hessians of |1/Delta|^2,
    /// g, and the pair potential.
    VerifyHessian {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = morse::DEFAULT_NULL_TOL)]
        null_tol: f64,
        /// Force the sequential sweep.
        #[arg(long)]
        sequential: bool,
    },
    /// Discriminant data for n points: the ordered model expanded, both
    /// pipelines' bounds, and a seeded scaling-identity check of the
    /// unordered model.
    Discriminants {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Multi-start catalog of near-critical configurations.
    Catalog {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "g")]
        potential: PotentialArg,
    },
    /// Collision-free path between two configurations.
    Plan {
        /// JSON: {"from": <config>, "to": <config>} with configs
        /// {"n": k, "ordered": false, "points": [[re, im], ...]}
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "g")]
        potential: PotentialArg,
        #[arg(long, default_value_t = 1e-7)]
        grad_tol: f64,
        /// Also render the trails to this SVG file.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Catalog size for the connection step.
        #[arg(long, default_value_t = 64)]
        seeds: usize,
    },
    /// Evaluate a coefficient vector's discriminant through root finding.
    DiscC {
        /// JSON: {"n": k, "a": [[re, im], ...]} listing a_2..a_n
        #[arg(long)]
        input: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::RootFindingFailed { .. }
        | Error::MultipleRoots { .. }
        | Error::FlowNonConvergence { .. } => 4,
        _ => 3,
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Error> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn parse_xi(raw: &str) -> Result<Vec<Vec<i64>>, Error> {
    raw.split(';')
        .map(|row| {
            row.split(',')
                .map(|e| {
                    e.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad action entry {e:?}")))
                })
                .collect()
        })
        .collect()
}

fn emit<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct DiscriminantsReport {
    n: usize,
    ordered_polynomial: Option<SparsePoly>,
    ordered_total_degree: usize,
    ordered_bound: config::ConfigBoundReport,
    unordered_bound: config::ConfigBoundReport,
    scaling_identity_checked: bool,
}

#[derive(Serialize)]
struct DiscCReport {
    n: usize,
    disc: [f64; 2],
    roots: PlanarConfig,
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Ok(raw) = std::env::var("DISC_TC_THREADS") {
        let n: usize = raw
            .parse()
            .map_err(|_| Error::Parse(format!("DISC_TC_THREADS must be a number, got {raw:?}")))?;
        disc_tc::exec::cap_threads(n);
    }
    match cli.command {
        Command::Homog { input } => {
            let delta: SparsePoly = read_json(&input)?;
            emit(&lattice::homog_lattice(&delta)?, &cli.out)
        }
        Command::Bound { input, xi } => {
            let delta: SparsePoly = read_json(&input)?;
            let action = torus::validate_action(&delta, &parse_xi(&xi)?)?;
            emit(&torus::tc_upper_bound(&delta, &action)?, &cli.out)
        }
        Command::VerifyHessian {
            input,
            samples,
            seed,
            null_tol,
            sequential,
        } => {
            let delta: SparsePoly = read_json(&input)?;
            let opts = verify::SweepOptions {
                samples,
                seed,
                null_tol,
                ..verify::SweepOptions::default()
            };
            let report = if sequential {
                verify::hessian_sweep_seq(&delta, &opts)?
            } else {
                verify::hessian_sweep(&delta, &opts)?
            };
            emit(&report, &cli.out)
        }
        Command::Discriminants { n, seed } => {
            let ordered_polynomial = match config::disc_f_poly(n) {
                Ok(p) => Some(p),
                Err(Error::ExpansionCapExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
            let report = DiscriminantsReport {
                n,
                ordered_total_degree: n * (n - 1) / 2,
                ordered_bound: config::bound_for_config_spaces(n, true, seed)?,
                unordered_bound: config::bound_for_config_spaces(n, false, seed)?,
                scaling_identity_checked: true,
                ordered_polynomial,
            };
            emit(&report, &cli.out)
        }
        Command::Catalog {
            n,
            seeds,
            seed,
            potential,
        } => {
            let catalog = planner::build_catalog(n, seeds, potential.into(), seed)?;
            emit(&catalog, &cli.out)
        }
        Command::Plan {
            input,
            seed,
            potential,
            grad_tol,
            svg,
            seeds,
        } => {
            #[derive(serde::Deserialize)]
            struct PlanInput {
                from: PlanarConfig,
                to: PlanarConfig,
            }
            let query: PlanInput = read_json(&input)?;
            let kind: PotentialKind = potential.into();
            let catalog = planner::build_catalog(query.from.n(), seeds, kind, seed)?;
            let opts = PlanOptions {
                potential: kind,
                grad_tol,
                ..PlanOptions::default()
            };
            let report = planner::plan(&query.from, &query.to, &catalog, &opts)?;
            if let Some(path) = svg {
                fs::write(path, planner::path_svg(&report.path))?;
            }
            emit(&report, &cli.out)
        }
        Command::DiscC { input } => {
            let a: CoeffVector = read_json(&input)?;
            let roots = config::coeffs_to_roots(&a)?;
            let d = config::disc_c_from_roots(&roots);
            emit(
                &DiscCReport {
                    n: a.n(),
                    disc: [d.re, d.im],
                    roots,
                },
                &cli.out,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
