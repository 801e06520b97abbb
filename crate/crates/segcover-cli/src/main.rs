//! Command-line front end: reductions, solvers, generators, verification,
//! and SVG rendering over JSON and DIMACS files.
//!
//! Exit codes: 0 ok, 1 negative verdict (UNCOVERABLE, r' > r, verify FAIL),
//! 2 input error, 3 limit exceeded.

mod svg;
mod verify;

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use segcover::allequal::{bcu_from_allequal, bcu_solve, reduce_djpsy_to_allequal};
use segcover::approx::gap::gap_instance_from_e3sat;
use segcover::approx::{
    amplify, approx_max_sc, sc_to_weighted_maxsat, write_wdimacs, AmplifyError,
};
use segcover::cnf::CnfFormula;
use segcover::dimacs::{parse_dimacs, write_dimacs};
use segcover::equivalence::{contiguous_sat_to_sc, sc_to_contiguous_sat};
use segcover::gen;
use segcover::instance::ScInstance;
use segcover::rational::Rational;
use segcover::reduce3sat::reduce_3sat_to_sc;
use segcover::solver::{
    count_covers_with_limit, solve_brute_with_limit, solve_dpll, SolverError,
};
use segcover::visibility::{project_scene, Scene};

const DEFAULT_SOLVE_LIMIT: usize = 24;
const BCU_REGION_LIMIT: usize = 30;

#[derive(Parser)]
#[command(
    name = "segcover",
    version,
    about = "Uncertain segment cover: reductions, solvers, and generators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IoArgs {
    /// Input file
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Translate between formulas and instances
    Reduce {
        #[arg(value_enum)]
        kind: ReduceKind,
        #[command(flatten)]
        io: IoArgs,
        /// Where to write the construction certificate (3sat, allequal, gap)
        #[arg(long, value_name = "PATH")]
        cert: Option<PathBuf>,
        /// Rational parameter for gap (default 1/1000) and amplify (required)
        #[arg(long, value_name = "P/Q")]
        epsilon: Option<String>,
    },
    /// Decide coverability of an instance
    Solve {
        #[arg(value_enum)]
        engine: Engine,
        #[command(flatten)]
        io: IoArgs,
        /// Maximum segments for exact solving (default 24)
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Greedy approximation of the maximum coverable length
    Approx {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Run the equivalence property suites
    Verify {
        /// Optional DIMACS formula to check alongside the built-in suites
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Deliberately break the clause gadget (the suite must catch it)
        #[arg(long)]
        mutate: bool,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Emit seeded test material
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Segment count for random-sc
        #[arg(long, default_value_t = 8)]
        segments: usize,
        /// Variable count for random-3cnf and djpsy-3cnf
        #[arg(long, default_value_t = 5)]
        vars: usize,
        /// Clause count for random-3cnf
        #[arg(long, default_value_t = 6)]
        clauses: usize,
        /// Endpoint grid resolution for random-sc
        #[arg(long, default_value_t = 12)]
        grid: u32,
    },
    /// Render an instance as a deterministic SVG
    Viz {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Ball-cover form of an equal-length instance: report r and r'
    Bcu {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Project a 2-D scene and decide whether the view can be fully blocked
    Project {
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceKind {
    /// 3-CNF formula (DIMACS) to instance
    #[value(name = "3sat")]
    ThreeSat,
    /// Bounded-occurrence 3-CNF (DIMACS) to equal-length instance
    Allequal,
    /// Contiguous formula (DIMACS) to instance
    Csat2sc,
    /// Instance to contiguous formula (DIMACS)
    Sc2csat,
    /// Instance to weighted clauses (WDIMACS)
    Sc2wmaxsat,
    /// Equal-length instance to ball-cover form
    Bcu,
    /// Exactly-3-CNF to gap instance
    Gap,
    /// Stretch an instance to sharpen the approximation gap
    Amplify,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Brute,
    Dpll,
    Count,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    #[value(name = "random-sc")]
    RandomSc,
    #[value(name = "random-3cnf")]
    Random3Cnf,
    #[value(name = "djpsy-3cnf")]
    Djpsy3Cnf,
}

struct Failure {
    code: u8,
    message: String,
}

type Cmd = Result<u8, Failure>;

fn input_err(e: impl Display) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

fn limit_err(e: impl Display) -> Failure {
    Failure {
        code: 3,
        message: e.to_string(),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

/// Payload sink: the named file, or stdout when no path was given.
fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn read_instance(path: &Path) -> Result<ScInstance, Failure> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn read_formula(path: &Path) -> Result<CnfFormula, Failure> {
    parse_dimacs(&read_text(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn parse_epsilon(epsilon: &Option<String>, default: Option<&str>) -> Result<Rational, Failure> {
    let text = match (epsilon, default) {
        (Some(s), _) => s.as_str(),
        (None, Some(d)) => d,
        (None, None) => return Err(input_err("--epsilon is required for this reduction")),
    };
    Rational::from_str(text).map_err(|e| input_err(format!("--epsilon {text:?}: {e}")))
}

fn cmd_reduce(
    kind: ReduceKind,
    io: &IoArgs,
    cert: &Option<PathBuf>,
    epsilon: &Option<String>,
) -> Cmd {
    match kind {
        ReduceKind::ThreeSat => {
            let formula = read_formula(&io.input)?;
            let (instance, certificate) = reduce_3sat_to_sc(&formula).map_err(input_err)?;
            emit(&io.out, &json(&instance))?;
            if let Some(path) = cert {
                write_text(path, &json(&certificate))?;
            }
            Ok(0)
        }
        ReduceKind::Allequal => {
            let formula = read_formula(&io.input)?;
            let (instance, certificate) = reduce_djpsy_to_allequal(&formula).map_err(input_err)?;
            emit(&io.out, &json(&instance))?;
            if let Some(path) = cert {
                write_text(path, &json(&certificate))?;
            }
            Ok(0)
        }
        ReduceKind::Csat2sc => {
            let formula = read_formula(&io.input)?;
            let (instance, _map) = contiguous_sat_to_sc(&formula).map_err(input_err)?;
            emit(&io.out, &json(&instance))?;
            Ok(0)
        }
        ReduceKind::Sc2csat => {
            let instance = read_instance(&io.input)?;
            let (formula, _map) = sc_to_contiguous_sat(&instance);
            emit(&io.out, &write_dimacs(&formula))?;
            Ok(0)
        }
        ReduceKind::Sc2wmaxsat => {
            let instance = read_instance(&io.input)?;
            let (wcnf, _map) = sc_to_weighted_maxsat(&instance);
            emit(&io.out, &write_wdimacs(&wcnf))?;
            Ok(0)
        }
        ReduceKind::Bcu => {
            let instance = read_instance(&io.input)?;
            let bcu = bcu_from_allequal(&instance).map_err(input_err)?;
            emit(&io.out, &json(&bcu))?;
            Ok(0)
        }
        ReduceKind::Gap => {
            let formula = read_formula(&io.input)?;
            let eps = parse_epsilon(epsilon, Some("1/1000"))?;
            let gap = gap_instance_from_e3sat(&formula, &eps).map_err(input_err)?;
            emit(&io.out, &json(&gap.instance))?;
            if let Some(path) = cert {
                write_text(path, &json(&gap))?;
            }
            Ok(0)
        }
        ReduceKind::Amplify => {
            let instance = read_instance(&io.input)?;
            let eps = parse_epsilon(epsilon, None)?;
            let amplified = amplify(&instance, &eps).map_err(|e| match e {
                AmplifyError::TooManyCopies { .. } => limit_err(e),
                _ => input_err(e),
            })?;
            emit(&io.out, &json(&amplified))?;
            Ok(0)
        }
    }
}

fn cmd_solve(engine: Engine, io: &IoArgs, limit: Option<usize>) -> Cmd {
    let instance = read_instance(&io.input)?;
    let cap = limit.unwrap_or(DEFAULT_SOLVE_LIMIT);
    match engine {
        Engine::Brute => {
            let result = solve_brute_with_limit(&instance, cap).map_err(limit_err)?;
            println!("{}", verdict_word(result.is_coverable()));
            if let Some(path) = &io.out {
                write_text(path, &json(&result))?;
            }
            Ok(if result.is_coverable() { 0 } else { 1 })
        }
        Engine::Dpll => {
            if let Some(cap) = limit {
                if instance.num_segments() > cap {
                    return Err(limit_err(SolverError::LimitExceeded {
                        segments: instance.num_segments(),
                        limit: cap,
                    }));
                }
            }
            let result = solve_dpll(&instance);
            println!("{}", verdict_word(result.is_coverable()));
            if let Some(path) = &io.out {
                write_text(path, &json(&result))?;
            }
            Ok(if result.is_coverable() { 0 } else { 1 })
        }
        Engine::Count => {
            let covers = count_covers_with_limit(&instance, cap).map_err(limit_err)?;
            println!("{covers}");
            if let Some(path) = &io.out {
                write_text(
                    path,
                    &json(&serde_json::json!({ "covers": covers.to_string() })),
                )?;
            }
            Ok(if covers > 0 { 0 } else { 1 })
        }
    }
}

fn verdict_word(coverable: bool) -> &'static str {
    if coverable {
        "COVERABLE"
    } else {
        "UNCOVERABLE"
    }
}

fn cmd_approx(io: &IoArgs) -> Cmd {
    let instance = read_instance(&io.input)?;
    let (choice, value) = approx_max_sc(&instance);
    println!("value {value}");
    if let Some(path) = &io.out {
        let report = serde_json::json!({
            "value": value.to_string(),
            "picks": choice.picks(),
        });
        write_text(path, &json(&report))?;
    }
    Ok(0)
}

fn cmd_verify(
    input: &Option<PathBuf>,
    trials: usize,
    seed: u64,
    mutate: bool,
    out: &Option<PathBuf>,
) -> Cmd {
    let formula = match input {
        Some(path) => Some(read_formula(path)?),
        None => None,
    };
    let outcome = verify::run(&verify::VerifyConfig {
        formula,
        trials,
        seed,
        mutate,
    });
    emit(out, &outcome.report)?;
    Ok(if outcome.pass { 0 } else { 1 })
}

fn cmd_gen(
    kind: GenKind,
    seed: u64,
    out: &Option<PathBuf>,
    segments: usize,
    vars: usize,
    clauses: usize,
    grid: u32,
) -> Cmd {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GenKind::RandomSc => {
            if grid < 1 {
                return Err(input_err("--grid must be at least 1"));
            }
            let instance = gen::random_sc_instance(&mut rng, segments, grid);
            emit(out, &json(&instance))?;
        }
        GenKind::Random3Cnf => {
            if vars < 3 {
                return Err(input_err("--vars must be at least 3"));
            }
            let formula = gen::random_3cnf(&mut rng, vars, clauses);
            emit(out, &write_dimacs(&formula))?;
        }
        GenKind::Djpsy3Cnf => {
            if vars < 3 {
                return Err(input_err("--vars must be at least 3"));
            }
            let formula = gen::random_djpsy_3cnf(&mut rng, vars);
            emit(out, &write_dimacs(&formula))?;
        }
    }
    Ok(0)
}

fn cmd_viz(io: &IoArgs) -> Cmd {
    let instance = read_instance(&io.input)?;
    emit(&io.out, &svg::render(&instance))?;
    Ok(0)
}

fn cmd_bcu(io: &IoArgs) -> Cmd {
    let instance = read_instance(&io.input)?;
    let bcu = bcu_from_allequal(&instance).map_err(input_err)?;
    if bcu.regions.len() > BCU_REGION_LIMIT {
        return Err(limit_err(format!(
            "instance yields {} regions, above the exhaustive limit {}",
            bcu.regions.len(),
            BCU_REGION_LIMIT
        )));
    }
    let solution = bcu_solve(&bcu);
    println!("r  {}", bcu.r);
    println!("r' {}", solution.r_prime);
    if let Some(path) = &io.out {
        let report = serde_json::json!({
            "r": bcu.r.to_string(),
            "r_prime": solution.r_prime.to_string(),
            "selection": solution.selection,
        });
        write_text(path, &json(&report))?;
    }
    Ok(if solution.r_prime == bcu.r { 0 } else { 1 })
}

fn cmd_project(io: &IoArgs) -> Cmd {
    let scene: Scene = serde_json::from_str(&read_text(&io.input)?)
        .map_err(|e| input_err(format!("{}: {e}", io.input.display())))?;
    let instance = project_scene(&scene.viewpoint, &scene.viewed, &scene.obstacles)
        .map_err(input_err)?;
    if let Some(path) = &io.out {
        write_text(path, &json(&instance))?;
    }
    let result = solve_dpll(&instance);
    println!("{}", verdict_word(result.is_coverable()));
    Ok(if result.is_coverable() { 0 } else { 1 })
}

fn run(command: &Command) -> Cmd {
    match command {
        Command::Reduce {
            kind,
            io,
            cert,
            epsilon,
        } => cmd_reduce(*kind, io, cert, epsilon),
        Command::Solve { engine, io, limit } => cmd_solve(*engine, io, *limit),
        Command::Approx { io } => cmd_approx(io),
        Command::Verify {
            input,
            trials,
            seed,
            mutate,
            out,
        } => cmd_verify(input, *trials, *seed, *mutate, out),
        Command::Gen {
            kind,
            seed,
            out,
            segments,
            vars,
            clauses,
            grid,
        } => cmd_gen(*kind, *seed, out, *segments, *vars, *clauses, *grid),
        Command::Viz { io } => cmd_viz(io),
        Command::Bcu { io } => cmd_bcu(io),
        Command::Project { io } => cmd_project(io),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
