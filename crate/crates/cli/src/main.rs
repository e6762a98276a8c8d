//! `qep`: evaluate quantified theories, check QASP satisfiability and
//! extract equilibrium policies.
//!
//! Exit codes: 0 ok, 1 unsatisfiable, 2 parse or I/O error, 3 semantic input
//! error, 4 oracle mismatch, 5 the two QASP semantics disagree.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qep_core::formula::{parse_theory_with, ParseOptions, QuantifiedTheory};
use qep_core::oracle::{brute_equilibrium_policies_from, DEFAULT_MAX_ORACLE};
use qep_core::policy::{enumerate_policies_capped, render_dot, to_json, Arity, Policy, DEFAULT_MAX_ENUMERATION};
use qep_core::qasp::{accepted_policies_with, compare_semantics_with, sat_qasp_with, QaspLimits, SemanticsKind};
use qep_core::qem::{equilibrium_policies, QemOptions};
use qep_core::semantics::{
    equilibrium_models_capped, eval_qg3, eval_theory, EvalMode, Interp3, TruthValue, DEFAULT_MAX_DOMAIN,
};
use qep_core::Error;

#[derive(Parser, Debug)]
#[command(name = "qep", version, about = "Quantified equilibrium logic toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Accept matrix atoms that the binder does not quantify.
    #[arg(long, global = true)]
    allow_free: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the theory classically, in G3 and in quantified G3.
    Eval {
        #[command(flatten)]
        input: Input,
        /// Interpretation, e.g. "x=1/2,z=0".
        #[arg(long, default_value = "")]
        at: String,
    },
    /// List the equilibrium models of the matrix.
    Models {
        #[command(flatten)]
        input: Input,
    },
    /// Decide QASP satisfiability.
    Sat {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Semantics::Fandinno)]
        semantics: Semantics,
    },
    /// Compute equilibrium policies by quantifier elimination.
    Policies {
        #[command(flatten)]
        input: Input,
        /// Values for free atoms (with --allow-free).
        #[arg(long, default_value = "")]
        at: String,
        /// List the policies accepted by a QASP semantics instead.
        #[arg(long)]
        game: bool,
        #[arg(long, value_enum, default_value_t = Semantics::Fandinno)]
        semantics: Semantics,
        /// Cross-check against the brute-force oracle.
        #[arg(long, conflicts_with = "game")]
        oracle: bool,
        /// Keep only minimal non-crisp models during elimination.
        #[arg(long)]
        prune_hc: bool,
        /// Print one line per elimination step on stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Compute equilibrium policies by exhaustive search.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "")]
        at: String,
    },
    /// Compare the policies accepted by the two QASP semantics.
    Compare {
        #[command(flatten)]
        input: Input,
    },
    /// List every policy conforming to the binder.
    Enumerate {
        #[command(flatten)]
        input: Input,
        /// Branch universals on 0, 1/2 and 1.
        #[arg(long)]
        ternary: bool,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Theory file; standard input when absent or `-`.
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Semantics {
    Fandinno,
    Stephan,
}

impl From<Semantics> for SemanticsKind {
    fn from(s: Semantics) -> SemanticsKind {
        match s {
            Semantics::Fandinno => SemanticsKind::Fandinno,
            Semantics::Stephan => SemanticsKind::Stephan,
        }
    }
}

enum Failure {
    Parse(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Input(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Input(e.to_string())
    }
}

struct Caps {
    domain: usize,
    enumeration: usize,
    oracle: usize,
}

impl Caps {
    fn from_env() -> Result<Caps, Failure> {
        match std::env::var("QEP_MAX_VARS") {
            Ok(v) => {
                let n: usize = v
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Parse(format!("QEP_MAX_VARS: `{v}` is not a number")))?;
                Ok(Caps {
                    domain: n,
                    enumeration: n,
                    oracle: n,
                })
            }
            Err(_) => Ok(Caps {
                domain: DEFAULT_MAX_DOMAIN,
                enumeration: DEFAULT_MAX_ENUMERATION,
                oracle: DEFAULT_MAX_ORACLE,
            }),
        }
    }

    fn qasp(&self) -> QaspLimits {
        QaspLimits {
            max_binder: self.enumeration,
            max_domain: self.domain,
        }
    }
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Output {
        Output { text, code: 0 }
    }
}

fn read_input(input: &Input) -> Result<String, Failure> {
    match &input.file {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| Failure::Parse(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Parse(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn load(input: &Input, allow_free: bool, caps: &Caps) -> Result<QuantifiedTheory, Failure> {
    let text = read_input(input)?;
    let theory = parse_theory_with(&text, ParseOptions { allow_free }).map_err(|e| Failure::Parse(e.to_string()))?;
    let n = theory.atoms().len();
    if n > caps.domain {
        return Err(Error::CapExceeded {
            what: "theory",
            size: n,
            cap: caps.domain,
        }
        .into());
    }
    Ok(theory)
}

fn parse_at(text: &str) -> Result<Interp3, Failure> {
    text.parse().map_err(|e: Error| Failure::Parse(e.to_string()))
}

// The atoms in `m` must be free in `theory`.
fn conditioning(theory: &QuantifiedTheory, at: &str) -> Result<Interp3, Failure> {
    let m = parse_at(at)?;
    if let Some(a) = m.domain().into_iter().find(|a| theory.binder.binds(a)) {
        return Err(Failure::Input(format!("`{a}` is bound by the binder and cannot be given a value")));
    }
    Ok(m)
}

fn interp_json(m: &Interp3) -> Value {
    Value::String(m.to_string())
}

fn render_set(policies: &BTreeSet<Policy>, format: Format) -> String {
    match format {
        Format::Text => policies.iter().map(|p| format!("{p}\n")).collect(),
        Format::Json => pretty(&Value::Array(policies.iter().map(to_json).collect())),
        Format::Dot => policies
            .iter()
            .enumerate()
            .map(|(i, p)| render_dot(p, &format!("policy_{}", i + 1)))
            .collect(),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn eval(theory: &QuantifiedTheory, at: &str, format: Format) -> Result<Output, Failure> {
    let m = parse_at(at)?;
    let matrix_atoms = theory.matrix_atoms();
    let mut rows: Vec<(&str, TruthValue)> = Vec::new();
    if m.is_total_over(&matrix_atoms) {
        if matrix_atoms.iter().all(|a| m.get(a).is_some_and(TruthValue::is_crisp)) {
            rows.push(("classical", eval_theory(&m, &theory.matrix, EvalMode::Classical)?));
        }
        rows.push(("g3", eval_theory(&m, &theory.matrix, EvalMode::G3)?));
    }
    if !theory.binder.is_empty() {
        let bound = theory.binder.atoms();
        let outside = m.iter().filter(|(a, _)| !bound.contains(a)).map(|(a, v)| (a.clone(), v)).collect();
        rows.push(("qg3", eval_qg3(&outside, &theory.binder, &theory.matrix)?));
    }
    if rows.is_empty() {
        let missing = matrix_atoms.into_iter().find(|a| m.get(a).is_none()).expect("some atom is undefined");
        return Err(Error::UndefinedAtom(missing).into());
    }
    let text = match format {
        Format::Json => pretty(&Value::Object(
            rows.iter().map(|(k, v)| (k.to_string(), json!(v.as_str()))).collect(),
        )),
        _ => rows.iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
    };
    Ok(Output::ok(text))
}

fn models(theory: &QuantifiedTheory, format: Format, caps: &Caps) -> Result<Output, Failure> {
    let models = equilibrium_models_capped(&theory.matrix, &theory.atoms(), caps.domain)?;
    let code = if models.is_empty() { 1 } else { 0 };
    let text = match format {
        Format::Json => pretty(&Value::Array(models.iter().map(interp_json).collect())),
        _ if models.is_empty() => "UNSAT (no equilibrium model)\n".to_string(),
        _ => models.iter().map(|m| format!("{{{m}}}\n")).collect(),
    };
    Ok(Output { text, code })
}

fn sat(theory: &QuantifiedTheory, semantics: Semantics, format: Format, caps: &Caps) -> Result<Output, Failure> {
    let kind = SemanticsKind::from(semantics);
    let sat = sat_qasp_with(theory, kind, caps.qasp())?;
    let text = match format {
        Format::Json => pretty(&json!({ "semantics": kind.to_string(), "sat": sat })),
        _ => format!("{}\n", if sat { "SAT" } else { "UNSAT" }),
    };
    Ok(Output {
        text,
        code: if sat { 0 } else { 1 },
    })
}

struct PolicyRun {
    at: String,
    game: bool,
    semantics: Semantics,
    oracle: bool,
    prune_hc: bool,
    trace: bool,
}

fn policies(theory: &QuantifiedTheory, run: &PolicyRun, format: Format, caps: &Caps) -> Result<Output, Failure> {
    if run.game {
        let set = accepted_policies_with(theory, run.semantics.into(), caps.qasp())?;
        return Ok(policy_output(&set, None, format, "UNSAT (no accepted policy)"));
    }
    let fixed = conditioning(theory, &run.at)?;
    let options = QemOptions {
        prune_hc: run.prune_hc,
        trace: run.trace,
        max_domain: caps.domain,
        ..QemOptions::default()
    };
    let out = equilibrium_policies(theory, &fixed, options)?;
    for line in &out.trace {
        eprintln!("{line}");
    }
    if run.oracle {
        let want = brute_equilibrium_policies_from(&theory.binder, &theory.matrix, &fixed, caps.oracle)?.policies;
        if want != out.policies {
            let show = |s: &BTreeSet<Policy>| s.iter().map(Policy::to_string).collect::<Vec<_>>().join(" ; ");
            eprintln!("oracle mismatch");
            eprintln!("  qem:    {}", show(&out.policies));
            eprintln!("  oracle: {}", show(&want));
            return Ok(Output {
                text: render_set(&out.policies, format),
                code: 4,
            });
        }
    }
    Ok(policy_output(&out.policies, Some(&out.noncrisp), format, "UNSAT (no equilibrium policy)"))
}

fn policy_output(set: &BTreeSet<Policy>, noncrisp: Option<&BTreeSet<Interp3>>, format: Format, unsat: &str) -> Output {
    let code = if set.is_empty() { 1 } else { 0 };
    let text = match format {
        Format::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("policies".into(), Value::Array(set.iter().map(to_json).collect()));
            if let Some(hc) = noncrisp {
                doc.insert("noncrisp".into(), Value::Array(hc.iter().map(interp_json).collect()));
            }
            pretty(&Value::Object(doc))
        }
        _ if set.is_empty() => format!("{unsat}\n"),
        _ => render_set(set, format),
    };
    Output { text, code }
}

fn oracle(theory: &QuantifiedTheory, at: &str, format: Format, caps: &Caps) -> Result<Output, Failure> {
    let fixed = conditioning(theory, at)?;
    if let Some(a) = theory.free_atoms().into_iter().find(|a| fixed.get(a).is_none()) {
        return Err(Error::FreeVariable(a).into());
    }
    let r = brute_equilibrium_policies_from(&theory.binder, &theory.matrix, &fixed, caps.oracle)?;
    let code = if r.policies.is_empty() { 1 } else { 0 };
    let text = match format {
        Format::Json => {
            let witness: Vec<Value> = r
                .witness
                .iter()
                .map(|(p, ms)| {
                    json!({
                        "policy": to_json(p),
                        "models": ms.iter().map(interp_json).collect::<Vec<_>>(),
                    })
                })
                .collect();
            pretty(&json!({
                "policies": r.policies.iter().map(to_json).collect::<Vec<_>>(),
                "witness": witness,
            }))
        }
        _ if r.policies.is_empty() => "UNSAT (no equilibrium policy)\n".to_string(),
        Format::Dot => render_set(&r.policies, format),
        Format::Text => r
            .witness
            .iter()
            .map(|(p, ms)| {
                let reached: Vec<String> = ms.iter().map(|m| format!("{{{m}}}")).collect();
                format!("{p}\n  reaches {}\n", reached.join(" "))
            })
            .collect(),
    };
    Ok(Output { text, code })
}

fn compare(theory: &QuantifiedTheory, caps: &Caps) -> Result<Output, Failure> {
    let report = compare_semantics_with(theory, caps.qasp())?;
    Ok(Output {
        text: pretty(&report.to_json()),
        code: if report.identical() { 0 } else { 5 },
    })
}

fn enumerate(theory: &QuantifiedTheory, ternary: bool, format: Format, caps: &Caps) -> Result<Output, Failure> {
    let arity = if ternary { Arity::Ternary } else { Arity::Binary };
    let all: BTreeSet<Policy> = enumerate_policies_capped(&theory.binder, arity, caps.enumeration)?.collect();
    Ok(Output::ok(render_set(&all, format)))
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let caps = Caps::from_env()?;
    let format = cli.format;
    // eval and models do not quantify anything, so unbound atoms are fine there
    match cli.command {
        Command::Eval { input, at } => eval(&load(&input, true, &caps)?, &at, format),
        Command::Models { input } => models(&load(&input, true, &caps)?, format, &caps),
        Command::Sat { input, semantics } => sat(&load(&input, cli.allow_free, &caps)?, semantics, format, &caps),
        Command::Policies {
            input,
            at,
            game,
            semantics,
            oracle,
            prune_hc,
            trace,
        } => {
            let theory = load(&input, cli.allow_free, &caps)?;
            let run = PolicyRun {
                at,
                game,
                semantics,
                oracle,
                prune_hc,
                trace,
            };
            policies(&theory, &run, format, &caps)
        }
        Command::Oracle { input, at } => oracle(&load(&input, cli.allow_free, &caps)?, &at, format, &caps),
        Command::Compare { input } => compare(&load(&input, cli.allow_free, &caps)?, &caps),
        Command::Enumerate { input, ternary } => enumerate(&load(&input, cli.allow_free, &caps)?, ternary, format, &caps),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => {
            let (Failure::Parse(msg) | Failure::Input(msg)) = &f;
            eprintln!("qep: {msg}");
            ExitCode::from(f.code())
        }
    }
}
