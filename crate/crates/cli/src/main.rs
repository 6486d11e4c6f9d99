//! `abplab` command-line front end. Every subcommand reads and writes the JSON
//! wire formats of the library; exit code 0 means success, 2 a falsified check,
//! 1 a usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abplab::concise::is_concise;
use abplab::deborder::deborder_traced;
use abplab::dot::{abp_to_dot, identified_graph_to_dot};
use abplab::family::{f0, f_com, f_eps, gamma_com, gamma_prime};
use abplab::flow::{spanning_tree_tau, verify_dim_theorems, IdentifiedGraph};
use abplab::json::{
    abp_from_json, abp_to_json, certificate_to_json, concise_to_json, deborder_trace_to_json, dim_report_to_json,
    minimize_transcript_to_json, parse, tensor_from_json, tensor_to_json, tangent_dims_to_json, to_canonical_string,
};
use abplab::nisan::minimize_verified;
use abplab::random::{random_deborder_instance, random_singular_tuple, random_tensor, seeded, EpsAbpParams};
use abplab::tangent::{certify_separation, tangent_dim};
use abplab::{Abp, Error, Format, RationalTensor};
use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::{json, Value};

const SIZE_VAR: &str = "ABPLAB_MAX_FORMAT_SIZE";
const DEFAULT_MAX_SIZE: u128 = 1_000_000;

#[derive(Parser)]
#[command(name = "abplab", version, about = "Exact computations on algebraic branching programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an ABP to its homogeneous polynomial (tensor JSON)
    Eval {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a single-(source,sink) ABP of minimal layer sizes for a tensor
    Minimize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Remove ε from a monotone single-(source,sink) ABP without changing its format
    Deborder {
        #[arg(long = "in")]
        input: PathBuf,
        /// Debordered ABP; without it ABP and trace are printed together
        #[arg(long)]
        out: Option<PathBuf>,
        /// Step-by-step trace with evaluation checksums
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Generate one of the explicit family objects for a format
    GenFamily {
        #[arg(long)]
        format: String,
        #[arg(long, value_enum)]
        object: Object,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Graphviz drawing (ABP objects only)
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Mode ranks and conciseness of a tensor
    ConciseCheck {
        #[command(flatten)]
        source: TensorSource,
        /// Exit with 2 unless the verdict matches
        #[arg(long)]
        expect: Option<bool>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tangent-space piece dimensions of a tensor over edge alphabets
    TangentDims {
        #[command(flatten)]
        source: TensorSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the path-tensor and flow-space dimension identities for a format
    FlowVerify {
        #[arg(long)]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Graphviz drawing of the identified graph with the spanning tree
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Certificate that the parity polynomial has no ABP of the given format
    CertifySeparation {
        #[arg(long)]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized deborder / minimize / singular-action suites
    RandomSuite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Object {
    GammaCom,
    FCom,
    F0,
    FEps,
    GammaPrime,
}

#[derive(Clone, Copy, ValueEnum)]
enum TensorObject {
    FCom,
    F0,
}

#[derive(clap::Args)]
struct TensorSource {
    /// Tensor JSON file
    #[arg(long = "in", conflicts_with = "object")]
    input: Option<PathBuf>,
    /// Format, comma-separated widths
    #[arg(long)]
    format: Option<String>,
    #[arg(long, value_enum, requires = "format")]
    object: Option<TensorObject>,
}

/// Error class deciding the exit code.
#[derive(Debug)]
struct Falsified(String);

impl std::fmt::Display for Falsified {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Falsified {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let falsified = e.downcast_ref::<Falsified>().is_some()
                || matches!(e.downcast_ref::<Error>(), Some(Error::SinkReachable));
            ExitCode::from(if falsified { 2 } else { 1 })
        }
    }
}

fn max_size() -> anyhow::Result<u128> {
    match std::env::var(SIZE_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| anyhow!("{SIZE_VAR}={v:?} is not a nonnegative integer")),
        Err(_) => Ok(DEFAULT_MAX_SIZE),
    }
}

/// Rejects formats whose number of valid paths exceeds the configured limit.
fn guard(format: &Format) -> anyhow::Result<()> {
    let paths: u128 = format.widths().iter().map(|&w| w as u128).product();
    let limit = max_size()?;
    if paths > limit {
        bail!("format {format} has {paths} valid paths, above the limit {limit}; raise {SIZE_VAR} to allow it");
    }
    Ok(())
}

fn parse_format(s: &str) -> anyhow::Result<Format> {
    let f = Format::parse(s).with_context(|| format!("--format {s:?}: expected comma-separated positive widths"))?;
    guard(&f)?;
    Ok(f)
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_text(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(path: Option<&Path>, v: &Value) -> anyhow::Result<()> {
    write_text(path, &to_canonical_string(v))
}

fn read_abp(path: &Path) -> anyhow::Result<Abp> {
    let abp = abp_from_json(&read_json(path)?).with_context(|| format!("ABP in {}", path.display()))?;
    guard(&abp.format)?;
    Ok(abp)
}

fn read_tensor(path: &Path) -> anyhow::Result<RationalTensor> {
    let t = tensor_from_json(&read_json(path)?).with_context(|| format!("tensor in {}", path.display()))?;
    let size: u128 = t.alphabet_sizes().iter().map(|&n| n as u128).product();
    let limit = max_size()?;
    if size > limit {
        bail!("tensor has {size} coordinates, above the limit {limit}; raise {SIZE_VAR} to allow it");
    }
    Ok(t)
}

fn family_tensor(format: &Format, object: TensorObject) -> anyhow::Result<RationalTensor> {
    Ok(match object {
        TensorObject::FCom => f_com(format),
        TensorObject::F0 => f0(format)?,
    })
}

/// The tensor named by `--in` or by `--format/--object`, with its format when known.
fn load_source(src: &TensorSource) -> anyhow::Result<(RationalTensor, Option<Format>)> {
    let format = src.format.as_deref().map(parse_format).transpose()?;
    match (&src.input, src.object) {
        (Some(p), None) => Ok((read_tensor(p)?, format)),
        (None, Some(o)) => {
            let f = format.expect("clap requires --format with --object");
            Ok((family_tensor(&f, o)?, Some(f)))
        }
        _ => bail!("give either --in TENSOR.json or --format W --object {{f-com|f0}}"),
    }
}

fn run(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Eval { input, out } => {
            let abp = read_abp(&input)?;
            emit(out.as_deref(), &tensor_to_json(&abp.evaluate()?))
        }
        Command::Minimize { input, out } => {
            let t = minimize_verified(&read_tensor(&input)?)?;
            emit(out.as_deref(), &minimize_transcript_to_json(&t))?;
            if !t.verified {
                return Err(Falsified("minimized ABP does not evaluate to the input".into()).into());
            }
            Ok(())
        }
        Command::Deborder { input, out, trace } => {
            let abp = read_abp(&input)?;
            let (mono, tr) = deborder_traced(&abp)?;
            let (a, t) = (abp_to_json(&mono), deborder_trace_to_json(&tr));
            match (&out, &trace) {
                (None, None) => emit(None, &json!({ "abp": a, "trace": t })),
                _ => {
                    emit(out.as_deref(), &a)?;
                    emit(trace.as_deref(), &t)
                }
            }
        }
        Command::GenFamily {
            format,
            object,
            out,
            dot,
        } => {
            let f = parse_format(&format)?;
            let abp = match object {
                Object::GammaCom => Some(gamma_com(&f)),
                Object::GammaPrime => {
                    let m = f.width(0);
                    if f.widths().iter().any(|&w| w != m) {
                        bail!("gamma-prime takes a uniform format (m,…,m); got {f}");
                    }
                    Some(gamma_prime(m, f.degree())?)
                }
                _ => None,
            };
            if dot.is_some() && abp.is_none() {
                bail!("--dot is only available for gamma-com and gamma-prime");
            }
            let v = match (&abp, object) {
                (Some(a), _) => abp_to_json(a),
                (None, Object::FCom) => tensor_to_json(&f_com(&f)),
                (None, Object::F0) => tensor_to_json(&f0(&f)?),
                (None, Object::FEps) => tensor_to_json(&f_eps(&f)?),
                _ => unreachable!(),
            };
            if let (Some(p), Some(a)) = (&dot, &abp) {
                write_text(Some(p), &abp_to_dot(a, true))?;
            }
            emit(out.as_deref(), &v)
        }
        Command::ConciseCheck { source, expect, out } => {
            let (t, _) = load_source(&source)?;
            let r = is_concise(&t);
            let mut v = concise_to_json(&r);
            v["witness_mode"] = json!(r.witness_mode(t.alphabet_sizes()).map(|j| j + 1));
            emit(out.as_deref(), &v)?;
            match expect {
                Some(want) if want != r.concise => {
                    Err(Falsified(format!("expected concise = {want}, computed {}", r.concise)).into())
                }
                _ => Ok(()),
            }
        }
        Command::TangentDims { source, out } => {
            let (t, format) = load_source(&source)?;
            let format = format.ok_or_else(|| anyhow!("--format is required to identify the edge alphabets"))?;
            let dims = tangent_dim(&t, &format)?;
            emit(out.as_deref(), &tangent_dims_to_json(&dims))
        }
        Command::FlowVerify { format, out, dot } => {
            let f = parse_format(&format)?;
            let rep = verify_dim_theorems(&f)?;
            emit(out.as_deref(), &dim_report_to_json(&rep))?;
            if let Some(p) = &dot {
                write_text(Some(p), &identified_graph_to_dot(&IdentifiedGraph::complete(&f), &spanning_tree_tau(&f)))?;
            }
            if !rep.passed() {
                return Err(Falsified(format!("dimension identities fail for {f}")).into());
            }
            Ok(())
        }
        Command::CertifySeparation { format, out } => {
            let f = parse_format(&format)?;
            let cert = certify_separation(&f)?;
            emit(out.as_deref(), &certificate_to_json(&cert))?;
            if !cert.separated {
                let failed: Vec<&str> = cert.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                return Err(Falsified(format!("certificate checks failed: {}", failed.join(", "))).into());
            }
            Ok(())
        }
        Command::RandomSuite { seed, count, out } => {
            let v = random_suite(seed, count)?;
            emit(out.as_deref(), &v)?;
            if v["failures"].as_u64() != Some(0) {
                return Err(Falsified("randomized suite reported failures".into()).into());
            }
            Ok(())
        }
    }
}

/// Runs `count` instances of each randomized check.
fn random_suite(seed: u64, count: usize) -> anyhow::Result<Value> {
    let mut rng = seeded(seed);
    let shapes: [&[usize]; 4] = [&[1, 2, 2], &[1, 3, 3], &[1, 4, 4], &[1, 3, 2, 2]];
    let mut failures = 0u64;

    let mut deb = 0;
    for k in 0..count {
        let p = EpsAbpParams {
            widths: shapes[k % shapes.len()].to_vec(),
            nvars: 2,
            min_exp: -3,
            max_exp: 3,
            density: 0.85,
            affine: false,
        };
        let abp = random_deborder_instance(&mut rng, &p, 500)
            .ok_or_else(|| anyhow!("no admissible ε-ABP found for widths {:?}", p.widths))?;
        let limit = abp.evaluate()?.eval_at_zero()?;
        let (mono, _) = deborder_traced(&abp)?;
        let ok = mono.format == abp.format
            && mono.is_monotone_strict()
            && mono.evaluate()?.to_rational().is_some_and(|t| t == limit);
        deb += usize::from(ok);
        failures += u64::from(!ok);
    }

    let mut min = 0;
    for _ in 0..count {
        let d = rng.gen_range(1..=4);
        let sizes: Vec<usize> = (0..d).map(|_| rng.gen_range(1..=3)).collect();
        let t = minimize_verified(&random_tensor(&mut rng, &sizes, 8))?;
        let ok = t.verified && t.abp.layer_sizes() == t.profile.ranks;
        min += usize::from(ok);
        failures += u64::from(!ok);
    }

    let fc = f_com(&Format::new(vec![2, 2, 2])?);
    let mut sing = 0;
    for _ in 0..count {
        let (g, _) = random_singular_tuple(&mut rng, fc.alphabet_sizes());
        let ok = !is_concise(&abplab::concise::apply_end(&fc, &g)?).concise;
        sing += usize::from(ok);
        failures += u64::from(!ok);
    }

    Ok(json!({
        "seed": seed,
        "count": count,
        "deborder_passed": deb,
        "minimize_passed": min,
        "singular_end_passed": sing,
        "failures": failures,
    }))
}
