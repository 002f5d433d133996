//! The `gconv` command line.

use std::ffi::OsString;
use std::io::Write;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::groupoid::Registry;
use crate::model::ModelSpec;
use crate::parse::{default_registry, parse_expr, Value};
use crate::phi::{run_scenario, SCENARIOS};
use crate::report::Report;
use crate::suites::{is_known, run_suite, Target, SUITES};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Text,
    Json,
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "gconv", version, about = "Convolution bialgebras of Lie groupoids and their transversal distributions")]
pub struct Cli {
    /// JSON model file; defaults to the built-in models.
    #[arg(long, global = true)]
    pub model: Option<std::path::PathBuf>,
    #[arg(long, global = true, default_value = "0xC0FFEE", value_parser = parse_seed)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    pub output: Output,
    /// Worker threads for running suites.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a property suite, or every suite.
    Check {
        #[arg(long)]
        suite: Option<String>,
    },
    /// Evaluate an expression such as `phi(<t^2 | D2>)`.
    Eval { expr: String },
    /// Run a worked scenario: cartier-gabriel, etale-iso or kernel-example.
    Demo { name: String },
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    command: &'static str,
    seed: u64,
    pass: bool,
    suites: &'a [Report],
}

/// Outcome of a run: exit code plus what goes to stdout and stderr.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn load_target(cli: &Cli) -> Result<Target> {
    let Some(path) = &cli.model else { return Ok(Target::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Model(format!("{}: {e}", path.display())))?;
    Ok(Target {
        spec: Some(ModelSpec::from_json(&text)?),
    })
}

fn eval_registry(target: &Target) -> Result<Arc<Registry>> {
    match &target.spec {
        Some(spec) => spec
            .registry()?
            .ok_or_else(|| Error::Model("eval needs a groupoid model".into())),
        None => default_registry(),
    }
}

fn json_line(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run_check(cli: &Cli, suite: &Option<String>, target: &Target) -> Result<Outcome> {
    let names: Vec<&str> = match suite {
        Some(s) if is_known(s) => vec![s.as_str()],
        Some(s) => {
            return Err(Error::Model(format!(
                "unknown suite `{s}`; known: {}",
                SUITES.iter().chain(SCENARIOS.iter()).copied().collect::<Vec<_>>().join(", ")
            )))
        }
        None => target.applicable_suites(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build()
        .map_err(|e| Error::Model(e.to_string()))?;
    let reports: Vec<Result<Report>> = pool.install(|| names.par_iter().map(|n| run_suite(n, target, cli.seed)).collect());
    let reports: Vec<Report> = reports.into_iter().collect::<Result<_>>()?;
    let pass = reports.iter().all(Report::pass);
    let stdout = match cli.output {
        Output::Json => json_line(&CheckOutput {
            command: "check",
            seed: cli.seed,
            pass,
            suites: &reports,
        }),
        Output::Text => {
            let mut s = String::new();
            for r in &reports {
                s.push_str(&r.to_string());
                s.push('\n');
            }
            let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
            let failed: usize = reports.iter().map(|r| r.checks.iter().filter(|c| !c.pass).count()).sum();
            s.push_str(&format!("{} suites, {checks} checks, {failed} failed\n", reports.len()));
            s
        }
    };
    Ok(Outcome {
        code: if pass { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    })
}

fn run_eval(cli: &Cli, expr: &str, target: &Target) -> Result<Outcome> {
    let reg = eval_registry(target)?;
    let value = parse_expr(expr, &reg)?;
    let stdout = match cli.output {
        Output::Text => format!("{value}\n"),
        Output::Json => {
            let body = match &value {
                Value::Kernel(k) => json!({ "expr": expr, "kind": value.kind(), "value": k }),
                v => json!({ "expr": expr, "kind": v.kind(), "value": v.to_string() }),
            };
            json_line(&body)
        }
    };
    Ok(Outcome {
        code: 0,
        stdout,
        stderr: String::new(),
    })
}

fn run_demo(cli: &Cli, name: &str) -> Result<Outcome> {
    if !SCENARIOS.contains(&name) {
        return Err(Error::Model(format!("unknown scenario `{name}`; known: {}", SCENARIOS.join(", "))));
    }
    let rep = run_scenario(name, cli.seed)?;
    let stdout = match cli.output {
        Output::Text => rep.to_string(),
        Output::Json => json_line(&rep),
    };
    Ok(Outcome {
        code: if rep.pass { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    })
}

fn input_error(output: Output, e: &Error) -> Outcome {
    let stdout = match output {
        Output::Json => json_line(&json!({ "error": e.to_string() })),
        Output::Text => String::new(),
    };
    Outcome {
        code: 2,
        stdout,
        stderr: format!("error: {e}\n"),
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = load_target(&cli).and_then(|target| match &cli.command {
        Command::Check { suite } => run_check(&cli, suite, &target),
        Command::Eval { expr } => run_eval(&cli, expr, &target),
        Command::Demo { name } => run_demo(&cli, name),
    });
    result.unwrap_or_else(|e| input_error(cli.output, &e))
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let out = run(std::env::args_os());
    print!("{}", out.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", out.stderr);
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_in_hex_or_decimal() {
        assert_eq!(parse_seed("0xC0FFEE"), Ok(DEFAULT_SEED));
        assert_eq!(parse_seed("12"), Ok(12));
        assert!(parse_seed("x").is_err());
    }

    #[test]
    fn eval_prints_canonical_forms() {
        let out = run(["gconv", "eval", "phi(<t^2 | D2>)"]);
        assert_eq!((out.code, out.stdout.as_str()), (0, "[[D2, 4*t^2]]\n"));
        let out = run(["gconv", "eval", "conv_mul(<1|T1>,<1|D2>)"]);
        assert_eq!(out.stdout, "<1 | T1·D2>\n");
        assert_eq!(run(["gconv", "eval", "conv_mul(<1|E1>,<1|E2>)"]).stdout, "<1 | E1·E2>\n");
        assert_eq!(run(["gconv", "eval", "phi(<t^2 | E1>)"]).stdout, "[[E1, (t^2 - 2*t + 1)]]\n");
        let out = run(["gconv", "eval", "kernel_test(<1 + t | E00> - <1 + t | E01> - <1 + t | E10> + <1 + t | E11>)"]);
        assert_eq!(out.stdout, "in kernel\n");
    }

    #[test]
    fn input_errors_exit_with_two() {
        let out = run(["gconv", "eval", "phi(<1 | nope>)"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("parse error at 9"), "{}", out.stderr);
        assert_eq!(run(["gconv", "frobnicate"]).code, 2);
        assert_eq!(run(["gconv", "check", "--suite", "nope"]).code, 2);
        assert_eq!(run(["gconv", "demo", "nope"]).code, 2);
        assert_eq!(run(["gconv", "--model", "/nonexistent.json", "check"]).code, 2);
    }

    #[test]
    fn json_is_deterministic() {
        let args = ["gconv", "check", "--suite", "hopf-etale", "--output", "json", "--jobs", "2"];
        let a = run(args);
        let b = run(args);
        assert_eq!(a.code, 0);
        assert_eq!(a.stdout, b.stdout);
        let v: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
        assert_eq!(v["pass"], true);
    }
}
