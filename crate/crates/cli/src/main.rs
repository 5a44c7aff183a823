//! `darboux`: command-line front end for darboux-core.
//!
//! Every verb wraps one library call and prints its result as JSON on
//! standard output. Exit status: 0 on success, 1 on mathematical failure,
//! 2 on input errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use darboux_core::darboux::{self, DarbouxError, FirstOrderM, HyperbolicL};
use darboux_core::expr::ParseError;
use darboux_core::invariants::{self, GaugeInvariants, InvariantError};
use darboux_core::verify;
use darboux_core::{Expr, ExprError, Lpdo, LpdoError};

#[derive(Parser)]
#[command(name = "darboux", version, about = "Darboux transformations of DxDy + a*Dx + b*Dy + c")]
struct Cli {
    #[command(flatten)]
    format: Format,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Format {
    /// Compact JSON (default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON.
    #[arg(long, global = true)]
    pretty: bool,
}

/// Arguments accept `@path` to read the text from a file.
#[derive(Subcommand)]
enum Verb {
    /// Compose two operators, A∘B.
    Compose {
        #[arg(long = "A", allow_hyphen_values = true)]
        a: String,
        #[arg(long = "B", allow_hyphen_values = true)]
        b: String,
    },
    /// First-order M from two kernel elements of L.
    Darboux11 {
        #[arg(long = "L", allow_hyphen_values = true)]
        l: String,
        #[arg(long, allow_hyphen_values = true)]
        psi1: String,
        #[arg(long, allow_hyphen_values = true)]
        psi2: String,
    },
    /// Wronskian operator W_{m,n} built from m+n kernel elements of L.
    Wronskian {
        #[arg(long = "L", allow_hyphen_values = true)]
        l: String,
        /// Kernel element; repeat once per solution.
        #[arg(long = "psi", required = true, allow_hyphen_values = true)]
        psi: Vec<String>,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Existence conditions for a transformation of L with first-order M.
    Check {
        #[arg(long = "L", allow_hyphen_values = true)]
        l: String,
        #[arg(long = "M", allow_hyphen_values = true)]
        m: String,
        /// Exit with status 1 when a condition does not vanish.
        #[arg(long)]
        strict: bool,
    },
    /// Gauge invariants (q, m, h, R), or (q, I2, I3) with --evolution.
    Invariants {
        #[arg(long = "L", allow_hyphen_values = true)]
        l: String,
        #[arg(long = "M", allow_hyphen_values = true)]
        m: String,
        #[arg(long)]
        evolution: bool,
    },
    /// Gauge the pair by exp(alpha), then replace L by L + beta*M.
    Evolve {
        #[arg(long = "L", allow_hyphen_values = true)]
        l: String,
        #[arg(long = "M", allow_hyphen_values = true)]
        m: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        beta: String,
    },
    /// Build a pair with prescribed gauge invariants from z and z1.
    Reconstruct {
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long = "R", allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Must be non-constant.
        #[arg(long, allow_hyphen_values = true)]
        z1: String,
    },
    /// Run a verification suite.
    Verify {
        /// Suite id.
        id: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    /// Malformed input: exit 2.
    Input(Value),
    /// Well-formed input for which the mathematics fails: exit 1.
    Math(Value),
}

type Outcome = Result<Value, Failure>;

fn parse_error(arg: &str, text: &str, e: &ParseError) -> Failure {
    Failure::Input(json!({"error": {
        "kind": "parse",
        "argument": arg,
        "input": text,
        "position": e.position,
        "message": e.message,
    }}))
}

fn input_error(arg: &str, message: String) -> Failure {
    Failure::Input(json!({"error": {"kind": "input", "argument": arg, "message": message}}))
}

fn math_error(message: String) -> Failure {
    Failure::Math(json!({"error": {"kind": "math", "message": message}}))
}

/// Resolves `@path` to the trimmed file contents.
fn text(arg: &str, raw: &str) -> Result<String, Failure> {
    match raw.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map(|s| s.trim().to_string())
            .map_err(|e| input_error(arg, format!("cannot read {path}: {e}"))),
        None => Ok(raw.to_string()),
    }
}

fn expr_parse_error(e: &ExprError) -> Option<&ParseError> {
    match e {
        ExprError::Parse(p) => Some(p),
        _ => None,
    }
}

fn lpdo_parse_error(e: &LpdoError) -> Option<&ParseError> {
    match e {
        LpdoError::Expr(x) => expr_parse_error(x),
        _ => None,
    }
}

fn expr(arg: &str, raw: &str) -> Result<Expr, Failure> {
    let t = text(arg, raw)?;
    t.parse::<Expr>().map_err(|e| match expr_parse_error(&e) {
        Some(p) => parse_error(arg, &t, p),
        None => input_error(arg, e.to_string()),
    })
}

fn operator(arg: &str, raw: &str) -> Result<Lpdo, Failure> {
    let t = text(arg, raw)?;
    Lpdo::parse(&t).map_err(|e| match lpdo_parse_error(&e) {
        Some(p) => parse_error(arg, &t, p),
        None => input_error(arg, e.to_string()),
    })
}

fn hyperbolic(raw: &str) -> Result<HyperbolicL, Failure> {
    HyperbolicL::from_lpdo(&operator("L", raw)?).map_err(|e| input_error("L", e.to_string()))
}

fn first_order(raw: &str) -> Result<FirstOrderM, Failure> {
    FirstOrderM::from_lpdo(&operator("M", raw)?).map_err(|e| input_error("M", e.to_string()))
}

fn darboux_failure(e: DarbouxError) -> Failure {
    match e {
        DarbouxError::NotHyperbolic(_) | DarbouxError::NotFirstOrder(_) => {
            input_error("operator", e.to_string())
        }
        DarbouxError::SolutionCount { .. } => input_error("psi", e.to_string()),
        _ => math_error(e.to_string()),
    }
}

fn invariant_failure(e: InvariantError) -> Failure {
    match e {
        InvariantError::Darboux(d) => darboux_failure(d),
        _ => math_error(e.to_string()),
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn operator_value(op: &Lpdo) -> Value {
    json!({"operator": op.to_string(), "terms": to_value(&op.to_json_terms())})
}

fn run(verb: Verb) -> Outcome {
    match verb {
        Verb::Compose { a, b } => {
            let (a, b) = (operator("A", &a)?, operator("B", &b)?);
            Ok(operator_value(&a.compose(&b)))
        }
        Verb::Darboux11 { l, psi1, psi2 } => {
            let l = hyperbolic(&l)?;
            let (p1, p2) = (expr("psi1", &psi1)?, expr("psi2", &psi2)?);
            let m = darboux::darboux11(&l, &p1, &p2).map_err(darboux_failure)?;
            let mut out = to_value(&m);
            out["M"] = m.to_lpdo().to_string().into();
            Ok(out)
        }
        Verb::Wronskian { l, psi, m, n } => {
            let l = hyperbolic(&l)?;
            let sols = psi
                .iter()
                .map(|p| expr("psi", p))
                .collect::<Result<Vec<_>, _>>()?;
            let w = darboux::wronskian_mn(&l, &sols, m, n).map_err(darboux_failure)?;
            Ok(operator_value(&w))
        }
        Verb::Check { l, m, strict } => {
            let (l, m) = (hyperbolic(&l)?, first_order(&m)?);
            let (e1, e2) = darboux::existence_conditions(&l, &m);
            let exists = e1.is_zero() && e2.is_zero();
            let out = json!({"exists": exists, "conditions": [e1.to_string(), e2.to_string()]});
            if strict && !exists {
                Err(Failure::Math(out))
            } else {
                Ok(out)
            }
        }
        Verb::Invariants { l, m, evolution } => {
            let (l, m) = (hyperbolic(&l)?, first_order(&m)?);
            if evolution {
                let inv = invariants::evolution_invariants(&l, &m).map_err(invariant_failure)?;
                Ok(to_value(&inv))
            } else {
                Ok(to_value(&invariants::gauge_invariants(&l, &m)))
            }
        }
        Verb::Evolve { l, m, alpha, beta } => {
            let (l, m) = (hyperbolic(&l)?, first_order(&m)?);
            let (alpha, beta) = (expr("alpha", &alpha)?, expr("beta", &beta)?);
            let (l1, m1) = invariants::gauged_evolution(&l, &m, &alpha, &beta);
            Ok(json!({
                "L": to_value(&l1),
                "M": to_value(&m1),
                "operators": [l1.to_lpdo().to_string(), m1.to_lpdo().to_string()],
            }))
        }
        Verb::Reconstruct { q, m, h, r, z, z1 } => {
            let targets = GaugeInvariants {
                q: expr("q", &q)?,
                m: expr("m", &m)?,
                h: expr("h", &h)?,
                r: expr("R", &r)?,
            };
            let (z, z1) = (expr("z", &z)?, expr("z1", &z1)?);
            let (l, m) = darboux::reconstruct_pair(&targets, &z, &z1).map_err(darboux_failure)?;
            Ok(json!({
                "L": to_value(&l),
                "M": to_value(&m),
                "operators": [l.to_lpdo().to_string(), m.to_lpdo().to_string()],
            }))
        }
        Verb::Verify { id, seed } => {
            let report = verify::run(&id, seed).map_err(|e| {
                Failure::Input(json!({"error": {
                    "kind": "unknown-suite",
                    "message": e.to_string(),
                    "known": verify::SUITES,
                }}))
            })?;
            let out = to_value(&report);
            if report.passed() {
                Ok(out)
            } else {
                Err(Failure::Math(out))
            }
        }
    }
}

fn emit(v: &Value, pretty: bool) {
    let s = if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    };
    println!("{}", s.expect("serializable"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            emit(
                &json!({"error": {"kind": "usage", "message": e.to_string().trim_end()}}),
                false,
            );
            return ExitCode::from(2);
        }
    };
    let pretty = cli.format.pretty;
    match run(cli.verb) {
        Ok(v) => {
            emit(&v, pretty);
            ExitCode::SUCCESS
        }
        Err(Failure::Math(v)) => {
            emit(&v, pretty);
            ExitCode::from(1)
        }
        Err(Failure::Input(v)) => {
            emit(&v, pretty);
            ExitCode::from(2)
        }
    }
}
