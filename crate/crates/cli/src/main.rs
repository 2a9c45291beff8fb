//! `wdscheck`: positivity of integral homogeneous forms on the standard
//! simplex, with exact certificates and counterexamples.
//!
//! Exit codes: 0 determinate verdict (positive definite, positive
//! semidefinite, or refuted), 2 undetermined (depth or node budget
//! exhausted), 3 input error, 4 internal or budget error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use wds_core::bounds::{self, BoundsError};
use wds_core::form::{Form, FormError};
use wds_core::oracle;
use wds_core::search::{
    classify, expand_to_depth, SearchConfig, SearchError, Verdict, VerdictKind,
    DEFAULT_NODE_BUDGET,
};
use wds_core::util::{approx_decimal, ratio_from_string, ratio_to_string};

const EXIT_OK: u8 = 0;
const EXIT_UNDETERMINED: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "wdscheck",
    version,
    about = "Exact positivity checks for integral forms on the standard simplex"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide positive definite / semidefinite / refuted, with a certificate
    Check(CheckArgs),
    /// Exact lower bounds and substitution step-count bounds for (M, n, d)
    Bounds(BoundsArgs),
    /// List every substituted form at the given depth
    Expand(ExpandArgs),
    /// Evaluate a form exactly at a rational point
    Eval(EvalArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Polynomial text, form JSON, or a path to a file holding either
    #[arg(long)]
    input: String,
    /// Ambient variable count (default: the largest index mentioned)
    #[arg(short = 'n', long = "vars")]
    vars: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Chase a strictly positive cover, subdividing nonnegative cells too
    Pd,
    /// Settle for a nonnegative cover
    Psd,
    /// Report the strongest statement the cover supports
    Auto,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 8)]
    max_depth: u32,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
    /// Cross-check the verdict against the exact grid minimum at this
    /// denominator
    #[arg(long, value_name = "N")]
    oracle: Option<u64>,
    /// Write the certificate JSON to this path
    #[arg(long, value_name = "PATH")]
    certificate: Option<PathBuf>,
    /// Worker threads (0 = deterministic sequential search)
    #[arg(long, default_value_t = 0, value_name = "K")]
    parallel: usize,
    /// Share identical subtrees in the certificate
    #[arg(long)]
    dedupe: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BoundsArgs {
    /// Coefficient bound M >= 1 (arbitrary precision)
    #[arg(short = 'M', value_name = "INT")]
    coefficient_bound: String,
    /// Variable count
    #[arg(short = 'n', value_name = "INT")]
    n: u32,
    /// Degree
    #[arg(short = 'd', value_name = "INT")]
    d: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    depth: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated exact rationals, e.g. "1/3,2/3"
    #[arg(long)]
    point: String,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Input(String),
    Budget(String),
    Internal(String),
}

impl Failure {
    fn exit(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Budget(_) | Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Budget(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<FormError> for Failure {
    fn from(e: FormError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::DigitBudgetExceeded { .. } | BoundsError::TieUnresolved => {
                Failure::Budget(e.to_string())
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        Failure::Budget(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version print to stdout and succeed; anything else
            // is a usage error.
            return if e.use_stderr() {
                eprint!("{e}");
                ExitCode::from(EXIT_INPUT)
            } else {
                print!("{e}");
                ExitCode::from(EXIT_OK)
            };
        }
    };
    let result = match cli.command {
        Command::Check(args) => run_check(args),
        Command::Bounds(args) => run_bounds(args),
        Command::Expand(args) => run_expand(args),
        Command::Eval(args) => run_eval(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit())
        }
    }
}

/// Resolves `--input`: an existing path is read as a file; content starting
/// with `{` is form JSON; anything else is polynomial text.
fn load_form(input: &InputArgs) -> Result<Form, Failure> {
    let raw = if Path::new(&input.input).is_file() {
        std::fs::read_to_string(&input.input)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", input.input)))?
    } else {
        input.input.clone()
    };
    let raw = raw.trim();
    if raw.starts_with('{') {
        let f: Form = serde_json::from_str(raw)
            .map_err(|e| Failure::Input(format!("invalid form JSON: {e}")))?;
        match input.vars {
            Some(n) if n != f.n() => Err(Failure::Input(format!(
                "variable count {} requested but the JSON declares {}",
                n,
                f.n()
            ))),
            _ => Ok(f),
        }
    } else {
        match input.vars {
            Some(n) => Ok(Form::parse_with_vars(raw, n)?),
            None => Ok(Form::parse(raw)?),
        }
    }
}

fn node_budget_from_env() -> Result<usize, Failure> {
    match std::env::var("WDS_NODE_BUDGET") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure::Input(format!("invalid WDS_NODE_BUDGET value `{v}`"))),
        Err(_) => Ok(DEFAULT_NODE_BUDGET),
    }
}

fn ratio_with_approx(r: &BigRational) -> String {
    format!("{} (~ {})", ratio_to_string(r), approx_decimal(r, 5))
}

fn path_string(path: &[wds_core::wds::Permutation]) -> String {
    if path.is_empty() {
        return "[]".into();
    }
    let parts: Vec<String> = path.iter().map(|p| p.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn run_check(args: CheckArgs) -> Result<u8, Failure> {
    let f = load_form(&args.input)?;
    let cfg = SearchConfig {
        max_depth: args.max_depth,
        dedupe: args.dedupe,
        parallel_workers: args.parallel,
        collect_zeros: true,
        node_budget: node_budget_from_env()?,
        expand_nonneg: args.mode == Mode::Pd,
        ..SearchConfig::default()
    };
    let verdict = classify(&f, &cfg);

    // Optional independent cross-check against the grid oracle.
    let oracle_doc = match args.oracle {
        Some(denominator) => {
            let (min, argmin) = oracle::grid_min(&f, denominator)
                .map_err(|e| Failure::Budget(e.to_string()))?;
            let agrees = match verdict.kind() {
                VerdictKind::PositiveDefinite => min.is_positive(),
                VerdictKind::PositiveSemidefinite => !min.is_negative(),
                VerdictKind::NotPsd | VerdictKind::Undetermined => true,
            };
            if !agrees {
                return Err(Failure::Internal(format!(
                    "verdict {} contradicts the grid minimum {} at {}",
                    verdict.kind(),
                    ratio_to_string(&min),
                    argmin
                )));
            }
            Some(json!({
                "denominator": denominator.to_string(),
                "min": ratio_to_string(&min),
                "argmin": serde_json::to_value(&argmin).expect("serializable"),
                "agrees": true,
            }))
        }
        None => None,
    };

    // The step-count bounds give the depth at which the answer is
    // guaranteed; report them alongside an undetermined verdict.
    let bounds_doc = if verdict.kind() == VerdictKind::Undetermined && f.n() >= 2 {
        bounds::bound_report(
            &f.coefficient_bound(),
            f.n() as u32,
            f.degree().max(1),
            bounds::DEFAULT_DIGIT_BUDGET,
        )
        .ok()
        .map(|r| serde_json::to_value(&r).expect("serializable"))
    } else {
        None
    };

    let certificate = verdict.certificate();
    if let Some(path) = &args.certificate {
        let body = serde_json::to_string_pretty(certificate).expect("serializable");
        std::fs::write(path, body)
            .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))?;
        eprintln!("certificate written to {}", path.display());
    }

    let exit = match verdict.kind() {
        VerdictKind::Undetermined => EXIT_UNDETERMINED,
        _ => EXIT_OK,
    };

    if args.json {
        let mut doc = json!({
            "form": serde_json::to_value(&f).expect("serializable"),
            "digest": certificate.digest,
            "verdict": verdict.kind().to_string(),
            "nodes": certificate.nodes.len(),
            "budget_exhausted": certificate.budget_exhausted,
        });
        let obj = doc.as_object_mut().expect("object");
        match &verdict {
            Verdict::PositiveSemidefinite { zeros, definitely_not_pd, .. } => {
                obj.insert("zeros".into(), serde_json::to_value(zeros).expect("serializable"));
                obj.insert("definitely_not_pd".into(), json!(definitely_not_pd));
            }
            Verdict::NotPsd { witness, .. } => {
                obj.insert("witness".into(), serde_json::to_value(witness).expect("serializable"));
            }
            Verdict::Undetermined { frontier, depth_reached, .. } => {
                obj.insert("frontier".into(), json!(frontier));
                obj.insert("depth_reached".into(), json!(depth_reached));
            }
            Verdict::PositiveDefinite { .. } => {}
        }
        if let Some(o) = oracle_doc {
            obj.insert("oracle".into(), o);
        }
        if let Some(b) = bounds_doc {
            obj.insert("bounds".into(), b);
        }
        match &args.certificate {
            Some(path) => {
                obj.insert("certificate_path".into(), json!(path.display().to_string()));
            }
            None => {
                obj.insert(
                    "certificate".into(),
                    serde_json::to_value(certificate).expect("serializable"),
                );
            }
        }
        println!("{}", serde_json::to_string(&doc).expect("serializable"));
        return Ok(exit);
    }

    println!(
        "form: {f}  (n = {}, degree = {}, M = {})",
        f.n(),
        f.degree(),
        f.coefficient_bound()
    );
    match &verdict {
        Verdict::PositiveDefinite { certificate } => {
            println!("verdict: positive definite on the simplex");
            println!(
                "cover: {} strictly positive cells ({} nodes)",
                certificate
                    .nodes
                    .iter()
                    .filter(|r| r.status == wds_core::search::NodeStatus::PosComplete)
                    .count(),
                certificate.nodes.len()
            );
        }
        Verdict::PositiveSemidefinite { certificate, zeros, definitely_not_pd } => {
            println!("verdict: positive semidefinite on the simplex");
            println!(
                "cover: nonnegative over {} nodes; definitely not positive definite: {}",
                certificate.nodes.len(),
                definitely_not_pd
            );
            for z in zeros {
                println!("exact zero at {} (path {})", z.point, path_string(&z.path));
            }
        }
        Verdict::NotPsd { witness, .. } => {
            println!("verdict: not positive semidefinite");
            println!(
                "witness: f{} = {}  (path {})",
                witness.point,
                ratio_with_approx(&witness.value),
                path_string(&witness.path)
            );
        }
        Verdict::Undetermined { frontier, depth_reached, budget_exhausted, .. } => {
            println!("verdict: undetermined at depth {depth_reached}");
            println!("frontier: {frontier} mixed-sign cells; budget exhausted: {budget_exhausted}");
            if let Some(serde_json::Value::Object(b)) = &bounds_doc {
                if let (Some(cp), Some(cnps)) = (b.get("cp"), b.get("cnps")) {
                    println!(
                        "a decision is guaranteed within {} steps (positive definite) or {} steps (refutation)",
                        cp.as_str().unwrap_or("?"),
                        cnps.as_str().unwrap_or("?")
                    );
                }
            }
        }
    }
    if let Some(serde_json::Value::Object(o)) = &oracle_doc {
        println!(
            "oracle: grid minimum {} at denominator {} agrees",
            o.get("min").and_then(|v| v.as_str()).unwrap_or("?"),
            args.oracle.unwrap_or(0)
        );
    }
    Ok(exit)
}

fn run_bounds(args: BoundsArgs) -> Result<u8, Failure> {
    let m = BigUint::from_str(args.coefficient_bound.trim())
        .map_err(|_| Failure::Input(format!("invalid M `{}`", args.coefficient_bound)))?;
    let budget = bounds::DEFAULT_DIGIT_BUDGET;
    if args.n == 1 {
        // The step counts are undefined at n = 1; positivity of a single-
        // variable form is the sign of its one coefficient.
        let c1 = bounds::c1_lower_bound_with_budget(&m, 1, args.d, budget)?;
        let jp = bounds::jp_simplex_bound_with_budget(&m, 1, args.d, budget)?;
        if args.json {
            let doc = json!({
                "M": m.to_string(),
                "n": 1,
                "d": args.d,
                "c1": ratio_to_string(&c1),
                "jp": ratio_to_string(&jp),
                "cp": serde_json::Value::Null,
                "cnps": serde_json::Value::Null,
            });
            println!("{doc}");
        } else {
            println!("inputs: M = {m}, n = 1, d = {}", args.d);
            println!("C_1  = {}", ratio_with_approx(&c1));
            println!("JP   = {}", ratio_with_approx(&jp));
            println!("step counts: undefined at n = 1 (decide by the coefficient sign)");
        }
        return Ok(EXIT_OK);
    }
    let report = bounds::bound_report(&m, args.n, args.d, budget)?;
    if args.json {
        println!("{}", serde_json::to_string(&report).expect("serializable"));
        return Ok(EXIT_OK);
    }
    println!("inputs: M = {m}, n = {}, d = {}", args.n, args.d);
    match &report.c1.exact {
        Some(v) => println!("C_1   = {}", ratio_with_approx(v)),
        None => println!(
            "C_1   = 1 / ({})  (~ {}, not materialized)",
            report.c1.denominator_factored, report.c1.approx
        ),
    }
    match &report.jp.exact {
        Some(v) => println!("JP    = {}", ratio_with_approx(v)),
        None => println!(
            "JP    = 1 / ({})  (~ {}, not materialized)",
            report.jp.denominator_factored, report.jp.approx
        ),
    }
    println!("C_p   = {}", report.cp);
    println!("C_nps = {}", report.cnps);
    println!("X_p   = {}  [bracket: {}]", report.xp, report.bracket);
    Ok(EXIT_OK)
}

fn run_expand(args: ExpandArgs) -> Result<u8, Failure> {
    let f = load_form(&args.input)?;
    let budget = node_budget_from_env()?;
    let children = expand_to_depth(&f, args.depth, budget)?;
    if args.json {
        let doc = json!({
            "depth": args.depth,
            "count": children.len(),
            "children": children
                .iter()
                .map(|(path, form)| json!({
                    "path": serde_json::to_value(path).expect("serializable"),
                    "form": serde_json::to_value(form).expect("serializable"),
                }))
                .collect::<Vec<_>>(),
        });
        println!("{doc}");
    } else {
        for (path, form) in &children {
            println!("{} {}", path_string(path), form);
        }
        eprintln!("{} forms at depth {}", children.len(), args.depth);
    }
    Ok(EXIT_OK)
}

fn run_eval(args: EvalArgs) -> Result<u8, Failure> {
    let f = load_form(&args.input)?;
    let coords = args
        .point
        .split(',')
        .map(|part| ratio_from_string(part).map_err(Failure::Input))
        .collect::<Result<Vec<_>, _>>()?;
    let value = f.evaluate(&coords)?;
    if args.json {
        let doc = json!({
            "value": ratio_to_string(&value),
            "approx": approx_decimal(&value, 6),
        });
        println!("{doc}");
    } else {
        let parts: Vec<String> = coords.iter().map(ratio_to_string).collect();
        println!("f({}) = {}", parts.join(", "), ratio_with_approx(&value));
    }
    Ok(EXIT_OK)
}
