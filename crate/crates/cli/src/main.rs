//! `slope-lab`: command-line front end for exact slopes, filtrations,
//! tensor semistability and verification campaigns.
//!
//! Exit codes: 0 on success, 1 when the mathematics contradicts an expected
//! statement (a counterexample file is written), 2 on usage or input errors.

mod request;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use slope_lab::exactnum::{parse_rational, Rational};
use slope_lab::filtration::Filtration;
use slope_lab::gitstab::{LineBundle, TensorPoint};
use slope_lab::harness::{Check, TrialConfig};
use slope_lab::invariants::{SumPoint, DEFAULT_TERM_BUDGET};
use slope_lab::lattice::Lattice;

use request::Request;

#[derive(Parser)]
#[command(name = "slope-lab", version, about = "Exact Arakelov slopes of lattices and GIT semistability of tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Also write the JSON artifact (request and result) to this file.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Print JSON on stdout (the default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,

    /// Print a CSV report on stdout (verify only).
    #[arg(long, global = true)]
    csv: bool,

    /// Where to write the counterexample on a mathematical failure.
    #[arg(long, global = true, value_name = "PATH")]
    counterexample: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Euclidean lattices given by Gram matrices.
    #[command(subcommand)]
    Lat(LatVerb),
    /// Rational filtrations of vector spaces.
    #[command(subcommand)]
    Fil(FilVerb),
    /// Semistability of tensors under products of general linear groups.
    #[command(subcommand)]
    Git(GitVerb),
    /// Invariants and degree bounds.
    #[command(subcommand)]
    Inv(InvVerb),
    /// Run a randomized verification campaign.
    Verify(VerifyArgs),
    /// Recompute an artifact written with --out and compare the results.
    Check(InputArg),
}

#[derive(Args)]
struct InputArg {
    /// Input JSON file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
struct InputsArg {
    /// Input JSON files, in order.
    #[arg(long = "in", value_name = "FILE", required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum LatVerb {
    /// Rank, determinant, degree and slope.
    Info(InputArg),
    /// Dual lattice.
    Dual(InputArg),
    /// Orthogonal direct sum of all inputs.
    Sum(InputsArg),
    /// Tensor product of all inputs.
    Tensor(InputsArg),
    /// Exterior power.
    Ext {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        k: usize,
    },
    /// Harder-Narasimhan filtration.
    Hn(InputArg),
    /// Maximal slope with a witness sublattice.
    Mumax(InputArg),
    /// Maximal degree of a rank-one sublattice.
    Udeg(InputArg),
}

#[derive(Subcommand)]
enum FilVerb {
    /// Level λ(v) of a vector.
    Eval {
        #[command(flatten)]
        input: InputArg,
        /// Comma-separated rationals.
        #[arg(long, value_name = "V")]
        vector: String,
    },
    /// Tensor product of all inputs.
    Tensor(InputsArg),
    /// Scalar product of two filtrations.
    Scalar(InputsArg),
    /// Dilation by a positive rational.
    Dilate {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_name = "Q")]
        by: String,
    },
}

#[derive(Args)]
struct PointTuple {
    /// Tensor point JSON file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// JSON array of filtrations, one per factor.
    #[arg(long, value_name = "FILE")]
    tuple: PathBuf,
}

#[derive(Args)]
struct SeededPoint {
    #[command(flatten)]
    input: InputArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum GitVerb {
    /// Tensor level and normalized functional of a tuple of filtrations.
    Lambda(PointTuple),
    /// Hilbert-Mumford invariant of a tuple with integer jumps.
    Mu {
        #[command(flatten)]
        args: PointTuple,
        #[arg(long, default_value_t = 2)]
        m: i64,
        /// Comma-separated determinant twists; defaults to m for each factor.
        #[arg(long)]
        twists: Option<String>,
    },
    /// Kempf minimizer of the normalized functional.
    Minimize(SeededPoint),
    /// Semistability verdict with a destabilizer when unstable.
    Check(SeededPoint),
    /// Associated graded point of an unstable point.
    Reduce(SeededPoint),
}

#[derive(Subcommand)]
enum InvVerb {
    /// Determinant tensor of degree d and its norm.
    Detnorm {
        #[arg(long)]
        d: usize,
    },
    /// Search for a nonvanishing invariant.
    Witness {
        #[command(flatten)]
        input: InputArg,
        /// Comma-separated twist vector.
        #[arg(long)]
        b: String,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        d_max: u32,
        #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
        budget: u64,
    },
    /// Degree bound for line subbundles of a tensor product.
    Bound {
        #[command(flatten)]
        inputs: InputsArg,
        /// Comma-separated twists; defaults to m for each factor.
        #[arg(long)]
        b: Option<String>,
        #[arg(long, default_value_t = 1)]
        m: i64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// main, bk, bogomolov, slopes or reduction.
    #[arg(value_parser = parse_check)]
    check: Check,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Comma-separated ranks.
    #[arg(long, default_value = "2,2")]
    ranks: String,
    /// Bound on the entries of random bases.
    #[arg(long, default_value_t = 3)]
    bound: i64,
    #[arg(long, default_value_t = 64)]
    tolerance_bits: u32,
}

fn parse_check(s: &str) -> Result<Check, String> {
    s.parse().map_err(|_| "expected one of: main, bk, bogomolov, slopes, reduction".to_string())
}

/// Contents of an artifact.
#[derive(Serialize, Deserialize)]
struct Artifact {
    request: Request,
    result: Value,
}

enum Failure {
    Usage(String),
    Math { message: String, counterexample: Value },
}

impl From<slope_lab::Error> for Failure {
    fn from(e: slope_lab::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, Failure> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Failure::Usage(format!("{origin}: invalid input at field `{}`: {}", e.path(), e.inner())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    parse_json(&text, &path.display().to_string())
}

fn read_all<T: DeserializeOwned>(paths: &[PathBuf]) -> Result<Vec<T>, Failure> {
    paths.iter().map(|p| read_json(p)).collect()
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Failure::Usage(format!("{what}: cannot parse {t:?}"))))
        .collect()
}

fn parse_rationals(s: &str, what: &str) -> Result<Vec<Rational>, Failure> {
    s.split(',')
        .map(|t| parse_rational(t.trim()).map_err(|e| Failure::Usage(format!("{what}: {e}"))))
        .collect()
}

/// Sum points are recognized by their `components` field; anything else
/// is read as a tensor point.
fn read_sum_point(path: &Path) -> Result<SumPoint, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let origin = path.display().to_string();
    let raw: Value = parse_json(&text, &origin)?;
    if raw.get("components").is_some() {
        parse_json(&text, &origin)
    } else {
        Ok(SumPoint::from_tensor(&parse_json::<TensorPoint>(&text, &origin)?))
    }
}

fn pair(mut v: Vec<Filtration>) -> Result<(Filtration, Filtration), Failure> {
    if v.len() != 2 {
        return Err(Failure::Usage(format!("expected two filtrations, got {}", v.len())));
    }
    let right = v.pop().unwrap();
    Ok((v.pop().unwrap(), right))
}

fn build(command: Command) -> Result<Request, Failure> {
    Ok(match command {
        Command::Lat(verb) => match verb {
            LatVerb::Info(a) => Request::LatInfo { lattice: read_json(&a.input)? },
            LatVerb::Dual(a) => Request::LatDual { lattice: read_json(&a.input)? },
            LatVerb::Sum(a) => Request::LatSum { lattices: read_all(&a.inputs)? },
            LatVerb::Tensor(a) => Request::LatTensor { lattices: read_all(&a.inputs)? },
            LatVerb::Ext { input, k } => Request::LatExt {
                lattice: read_json(&input.input)?,
                k,
            },
            LatVerb::Hn(a) => Request::LatHn { lattice: read_json(&a.input)? },
            LatVerb::Mumax(a) => Request::LatMumax { lattice: read_json(&a.input)? },
            LatVerb::Udeg(a) => Request::LatUdeg { lattice: read_json(&a.input)? },
        },
        Command::Fil(verb) => match verb {
            FilVerb::Eval { input, vector } => Request::FilEval {
                filtration: read_json(&input.input)?,
                vector: parse_rationals(&vector, "--vector")?,
            },
            FilVerb::Tensor(a) => Request::FilTensor {
                filtrations: read_all(&a.inputs)?,
            },
            FilVerb::Scalar(a) => {
                let (left, right) = pair(read_all(&a.inputs)?)?;
                Request::FilScalar { left, right }
            }
            FilVerb::Dilate { input, by } => Request::FilDilate {
                filtration: read_json(&input.input)?,
                factor: parse_rational(&by).map_err(|e| Failure::Usage(format!("--by: {e}")))?,
            },
        },
        Command::Git(verb) => match verb {
            GitVerb::Lambda(a) => Request::GitLambda {
                point: read_json(&a.input)?,
                tuple: read_json(&a.tuple)?,
            },
            GitVerb::Mu { args, m, twists } => {
                let point: TensorPoint = read_json(&args.input)?;
                let twists = match twists {
                    Some(t) => parse_list(&t, "--twists")?,
                    None => vec![m; point.arity()],
                };
                Request::GitMu {
                    tuple: read_json(&args.tuple)?,
                    point,
                    bundle: LineBundle { m, twists },
                }
            }
            GitVerb::Minimize(a) => Request::GitMinimize {
                point: read_json(&a.input.input)?,
                seed: a.seed,
            },
            GitVerb::Check(a) => Request::GitCheck {
                point: read_json(&a.input.input)?,
                seed: a.seed,
            },
            GitVerb::Reduce(a) => Request::GitReduce {
                point: read_json(&a.input.input)?,
                seed: a.seed,
            },
        },
        Command::Inv(verb) => match verb {
            InvVerb::Detnorm { d } => Request::InvDetnorm { d },
            InvVerb::Witness {
                input,
                b,
                m,
                d_max,
                budget,
            } => Request::InvWitness {
                point: read_sum_point(&input.input)?,
                b: parse_list(&b, "--b")?,
                m,
                d_max,
                budget,
            },
            InvVerb::Bound { inputs, b, m } => {
                let lattices: Vec<Lattice> = read_all(&inputs.inputs)?;
                let b = match b {
                    Some(b) => parse_list(&b, "--b")?,
                    None => vec![m; lattices.len()],
                };
                Request::InvBound { lattices, b, m }
            }
        },
        Command::Verify(a) => {
            let config = TrialConfig {
                seed: a.seed,
                ranks: parse_list(&a.ranks, "--ranks")?,
                entry_bound: a.bound,
                trials: a.trials,
                tolerance_bits: a.tolerance_bits,
            };
            config.validate()?;
            Request::Verify { check: a.check, config }
        }
        Command::Check(_) => unreachable!("handled by recheck"),
    })
}

fn pretty(v: &impl Serialize) -> Result<String, Failure> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Usage(format!("serialization: {e}")))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Recomputes an artifact; any difference from the stored result is a
/// counterexample.
fn recheck(path: &Path) -> Result<String, Failure> {
    let artifact: Artifact = read_json(path)?;
    let outcome = artifact.request.execute()?;
    if let Some(counterexample) = outcome.counterexample {
        return Err(Failure::Math {
            message: format!("{}: recomputation reports a failure", artifact.request.name()),
            counterexample,
        });
    }
    if outcome.result != artifact.result {
        return Err(Failure::Math {
            message: format!("{}: stored result differs from the recomputation", artifact.request.name()),
            counterexample: json!({
                "request": artifact.request,
                "stored": artifact.result,
                "recomputed": outcome.result,
            }),
        });
    }
    pretty(&json!({ "command": artifact.request.name(), "reproduced": true }))
}

fn run(cli: Cli) -> Result<String, Failure> {
    if let Command::Check(a) = &cli.command {
        return recheck(&a.input);
    }
    let request = build(cli.command)?;
    if cli.csv && !matches!(request, Request::Verify { .. }) {
        return Err(Failure::Usage("--csv is only available for verify".into()));
    }
    let outcome = request.execute()?;
    let csv = match (&request, cli.csv) {
        (Request::Verify { .. }, true) => {
            let report: slope_lab::harness::TrialReport = serde_json::from_value(outcome.result.clone())
                .map_err(|e| Failure::Usage(format!("report: {e}")))?;
            Some(report.to_csv()?)
        }
        _ => None,
    };
    let artifact = Artifact {
        request,
        result: outcome.result,
    };
    let json = pretty(&artifact)?;
    if let Some(path) = &cli.out {
        write(path, &json)?;
    }
    if let Some(counterexample) = outcome.counterexample {
        return Err(Failure::Math {
            message: format!("{}: mathematical failure", artifact.request.name()),
            counterexample,
        });
    }
    Ok(csv.unwrap_or(json))
}

fn counterexample_path(cli_path: Option<PathBuf>, out: Option<&Path>) -> PathBuf {
    cli_path.unwrap_or_else(|| match out {
        Some(o) => {
            let mut name = o.as_os_str().to_owned();
            name.push(".counterexample.json");
            PathBuf::from(name)
        }
        None => PathBuf::from("slope-lab-counterexample.json"),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cex_path = counterexample_path(cli.counterexample.clone(), cli.out.as_deref());
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Math { message, counterexample }) => {
            let written = pretty(&counterexample).and_then(|t| write(&cex_path, &t));
            match written {
                Ok(()) => eprintln!("failure: {message}; counterexample written to {}", cex_path.display()),
                Err(Failure::Usage(e)) | Err(Failure::Math { message: e, .. }) => {
                    eprintln!("failure: {message}; could not write the counterexample: {e}")
                }
            }
            ExitCode::from(1)
        }
    }
}
