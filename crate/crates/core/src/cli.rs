//! The `ratact` command line. `run` returns the exit code and both output streams so
//! that tests can drive it without spawning a process.

use crate::actions::{
    action_to_json, build_action, extend_action, join_greedy, parse_action, variable_indices, verify_action,
    ModuleAlgebraAction,
};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::field::{parse_polynomial, parse_rational, Field, FieldRef, DEFAULT_HEIGHT};
use crate::groupscheme::{
    descriptor_to_json, invariants, ker_f_diagram, necessary_condition, parse_descriptor, socle, young_join,
    GroupFamily, GroupSchemeDescriptor, YoungDiagram,
};
use crate::solver::{reduction_field, solve_system, DiffSystem};
use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};
use std::fmt::Write as _;

pub const DEFAULT_BUDGET_P: u64 = 7;
pub const DEFAULT_BUDGET_VARS: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "ratact", version, about = "Build and verify rational actions of infinitesimal group schemes")]
pub struct Cli {
    /// Emit structured JSON instead of the human-readable summary.
    #[arg(long, global = true)]
    pub machine: bool,
    /// Largest p-power exponent of operator orders (operators stay below p^height).
    #[arg(long, global = true, default_value_t = DEFAULT_HEIGHT)]
    pub budget_height: u32,
    /// Largest accepted prime.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET_P)]
    pub budget_p: u64,
    /// Largest accepted number of variables.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET_VARS)]
    pub budget_vars: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariants of a group scheme and the dimensions it can act in.
    Info {
        /// Group spec file, or inline JSON.
        #[arg(long)]
        group: String,
    },
    /// Build a generically free action on the listed variables.
    Build {
        #[arg(long)]
        group: String,
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
    },
    /// Extend an action to a larger group with the same Frobenius kernel part.
    Extend {
        #[arg(long)]
        action: String,
        #[arg(long)]
        group: String,
    },
    /// Check relations, commutation and product compatibility of an action file.
    Verify {
        #[arg(long)]
        action: String,
    },
    /// Solve a commuting system D_i(x) = a_i.
    Solve {
        #[arg(long)]
        system: String,
    },
    /// Joint action of commuting height-one actions on the same field.
    Join {
        #[arg(long, value_delimiter = ',', required = true)]
        actions: Vec<String>,
    },
    /// The socle of a commutative group scheme.
    Socle {
        #[arg(long)]
        group: String,
    },
    /// Row-wise maximum of Young diagrams, each given as comma-separated rows.
    YoungJoin {
        #[arg(required = true)]
        diagrams: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    machine: bool,
    height: u32,
    max_p: u64,
    max_vars: usize,
    warnings: Vec<String>,
}

/// A finished command: exit code, human text and machine value.
struct Reply {
    code: i32,
    human: String,
    machine: Value,
}

impl Reply {
    fn ok(human: String, machine: Value) -> Self {
        Reply { code: 0, human, machine }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
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
    let mut ctx = Ctx {
        machine: cli.machine,
        height: cli.budget_height,
        max_p: cli.budget_p,
        max_vars: cli.budget_vars,
        warnings: Vec::new(),
    };
    if cli.budget_height > DEFAULT_HEIGHT {
        ctx.warnings.push(format!(
            "warning: height budget {} is above the default {DEFAULT_HEIGHT}; linear algebra grows like p^(height·vars)",
            cli.budget_height
        ));
    }
    if cli.budget_p > DEFAULT_BUDGET_P {
        ctx.warnings.push(format!(
            "warning: prime budget {} is above the default {DEFAULT_BUDGET_P}",
            cli.budget_p
        ));
    }
    if cli.budget_vars > DEFAULT_BUDGET_VARS {
        ctx.warnings.push(format!(
            "warning: variable budget {} is above the default {DEFAULT_BUDGET_VARS}",
            cli.budget_vars
        ));
    }
    let result = match &cli.command {
        Command::Info { group } => info(&ctx, group),
        Command::Build { group, vars } => build(&ctx, group, vars),
        Command::Extend { action, group } => extend(&ctx, action, group),
        Command::Verify { action } => verify(&ctx, action),
        Command::Solve { system } => solve(&ctx, system),
        Command::Join { actions } => join(&ctx, actions),
        Command::Socle { group } => socle_cmd(&ctx, group),
        Command::YoungJoin { diagrams } => young(diagrams),
    };
    let mut stderr = String::new();
    for w in ctx.warnings.drain(..) {
        stderr.push_str(&w);
        stderr.push('\n');
    }
    match result {
        Ok(reply) => {
            let stdout = if ctx.machine {
                format!("{}\n", serde_json::to_string_pretty(&reply.machine).expect("serializable"))
            } else {
                reply.human
            };
            Outcome { code: reply.code, stdout, stderr }
        }
        Err(e) => {
            let code = if e.is_input_error() { 2 } else { 1 };
            if ctx.machine {
                let v = json!({"status": "error", "kind": error_kind(&e), "message": e.to_string()});
                Outcome {
                    code,
                    stdout: format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable")),
                    stderr,
                }
            } else {
                let _ = writeln!(stderr, "error: {e}");
                Outcome { code, stdout: String::new(), stderr }
            }
        }
    }
}

fn error_kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("Error")
        .to_string()
}

fn read_source(arg: &str) -> Result<String> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).map_err(|e| Error::Invalid(format!("cannot read {arg}: {e}")))
}

fn load_group(ctx: &Ctx, arg: &str) -> Result<GroupSchemeDescriptor> {
    let g = parse_descriptor(&read_source(arg)?)?;
    check_p(ctx, g.p)?;
    Ok(g)
}

fn check_p(ctx: &Ctx, p: u64) -> Result<()> {
    if p > ctx.max_p {
        return Err(Error::Invalid(format!("p = {p} exceeds the prime budget {}", ctx.max_p)));
    }
    Ok(())
}

fn check_vars(ctx: &Ctx, n: usize) -> Result<()> {
    if n > ctx.max_vars {
        return Err(Error::Invalid(format!("{n} variables exceed the variable budget {}", ctx.max_vars)));
    }
    Ok(())
}

fn load_action(ctx: &Ctx, arg: &str) -> Result<ModuleAlgebraAction> {
    let a = parse_action(&read_source(arg)?, ctx.height)?;
    check_p(ctx, a.p())?;
    check_vars(ctx, a.field.nvars())?;
    Ok(a)
}

/// A readable name for the common families.
pub fn describe(desc: &GroupSchemeDescriptor) -> String {
    match &desc.family {
        GroupFamily::HeightOne { diagram, mu } => {
            let mut parts = Vec::new();
            let ones = diagram.rows().iter().filter(|&&n| n == 1).count();
            for &n in diagram.rows().iter().filter(|&&n| n > 1) {
                parts.push(format!("W_{n}^1"));
            }
            match ones {
                0 => {}
                1 => parts.push("α_p".into()),
                k => parts.push(format!("α_p^{k}")),
            }
            match mu {
                0 => {}
                1 => parts.push("μ_p".into()),
                k => parts.push(format!("μ_p^{k}")),
            }
            if parts.is_empty() {
                "trivial".into()
            } else {
                parts.join(" × ")
            }
        }
        GroupFamily::KerFMinusV(n) => format!("ker(F − V) on W_{n}"),
        GroupFamily::KerF2MinusV => "ker(F² − V) on W_3".into(),
        GroupFamily::Explicit { dual, .. } => format!("explicit group with {} dual generators", dual.len()),
    }
}

fn info(ctx: &Ctx, group: &str) -> Result<Reply> {
    let g = load_group(ctx, group)?;
    let inv = invariants(&g)?;
    let soc = if g.is_commutative() { Some(socle(&g)?) } else { None };
    let kf = if g.is_commutative() { Some(ker_f_diagram(&g)?) } else { None };
    let lie = inv.lie_dim as usize;
    let verdicts: Vec<(usize, bool)> = match &kf {
        Some((d, mu)) => (1..=lie).map(|n| (n, necessary_condition(d, *mu, n))).collect(),
        None => Vec::new(),
    };
    let v_index = match inv.verschiebung_index {
        Some(k) => k.to_string(),
        None => "none".into(),
    };
    let mut human = String::new();
    let _ = writeln!(human, "group: {}", describe(&g));
    let _ = writeln!(human, "p: {}", g.p);
    let _ = writeln!(human, "order: p^{}", inv.order_exponent);
    let _ = writeln!(human, "commutative: {}", if g.is_commutative() { "yes" } else { "no" });
    let _ = writeln!(human, "lie_dim: {lie}");
    match &soc {
        Some(s) => {
            let _ = writeln!(human, "socle: {}", describe(s));
        }
        None => {
            let _ = writeln!(human, "socle: not computed (not commutative)");
        }
    }
    let _ = writeln!(human, "frobenius_height: {}", inv.frobenius_height);
    let _ = writeln!(human, "verschiebung_index: {v_index}");
    if let Some((d, mu)) = &kf {
        let _ = writeln!(human, "ker F diagram: {d}, mu: {mu}");
    }
    let _ = writeln!(human, "min dimension of a generically free action: {lie}");
    for (n, ok) in &verdicts {
        let _ = writeln!(
            human,
            "  dimension {n}: necessary condition for a faithful action {}",
            if *ok { "holds" } else { "fails" }
        );
    }
    let machine = json!({
        "status": "ok",
        "group": descriptor_to_json(&g),
        "name": describe(&g),
        "order_exponent": inv.order_exponent,
        "commutative": g.is_commutative(),
        "lie_dim": lie,
        "socle": soc.as_ref().map(descriptor_to_json),
        "socle_name": soc.as_ref().map(describe),
        "frobenius_height": inv.frobenius_height,
        "verschiebung_index": inv.verschiebung_index,
        "ker_f_diagram": kf.as_ref().map(|(d, _)| d.rows().to_vec()),
        "mu": kf.as_ref().map(|(_, m)| *m),
        "min_action_dimension": lie,
        "necessary_condition": verdicts.iter().map(|(n, ok)| json!({"dimension": n, "holds": ok})).collect::<Vec<_>>(),
    });
    Ok(Reply::ok(human, machine))
}

fn action_reply(a: &ModuleAlgebraAction) -> Reply {
    let file = action_to_json(a);
    let human = format!("{}\n", serde_json::to_string_pretty(&file).expect("serializable"));
    Reply::ok(human, json!({"status": "ok", "action": file}))
}

fn build(ctx: &Ctx, group: &str, vars: &[String]) -> Result<Reply> {
    let g = load_group(ctx, group)?;
    check_vars(ctx, vars.len())?;
    let field = Field::with_height(g.p, vars.to_vec(), ctx.height)?;
    let names: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    let idx = variable_indices(&field, &names)?;
    let a = build_action(&field, &g, &idx)?;
    Ok(action_reply(&a))
}

fn extend(ctx: &Ctx, action: &str, group: &str) -> Result<Reply> {
    let a = load_action(ctx, action)?;
    let g = load_group(ctx, group)?;
    let out = extend_action(&a, &g)?;
    Ok(action_reply(&out))
}

fn verify(ctx: &Ctx, action: &str) -> Result<Reply> {
    let a = load_action(ctx, action)?;
    let report = verify_action(&a);
    let code = if report.passed() { 0 } else { 1 };
    let mut machine = serde_json::to_value(&report).expect("serializable");
    machine["status"] = json!(if report.passed() { "pass" } else { "fail" });
    Ok(Reply {
        code,
        human: report.summary(),
        machine,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquation {
    operator: String,
    rhs: String,
    order_exponent: u32,
    #[serde(default = "zero_text")]
    reduction: String,
}

fn zero_text() -> String {
    "0".into()
}

/// {"p", "variables", "level"?, "equations": [{operator, rhs, order_exponent, reduction}]}
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    p: u64,
    variables: Vec<String>,
    level: Option<u32>,
    equations: Vec<RawEquation>,
}

fn parse_system(ctx: &Ctx, text: &str) -> Result<(FieldRef, DiffSystem, u32)> {
    let raw: RawSystem = serde_json::from_str(text)?;
    check_p(ctx, raw.p)?;
    check_vars(ctx, raw.variables.len())?;
    if raw.equations.is_empty() {
        return Err(Error::Invalid("a system needs at least one equation".into()));
    }
    let field = Field::with_height(raw.p, raw.variables, ctx.height)?;
    let ring = reduction_field(raw.p, raw.equations.len());
    let mut ops = Vec::new();
    let mut rhs = Vec::new();
    let mut exps = Vec::new();
    let mut reds = Vec::new();
    for e in &raw.equations {
        ops.push(DiffOp::parse(&field, &e.operator)?);
        rhs.push(parse_rational(&field, &e.rhs)?);
        exps.push(e.order_exponent);
        reds.push(parse_polynomial(&ring, &e.reduction)?);
    }
    let level = match raw.level {
        Some(r) => r,
        None => ops.iter().map(|d| d.level()).max().unwrap_or(1),
    };
    Ok((field, DiffSystem::new(ops, rhs, exps, reds)?, level))
}

fn solve(ctx: &Ctx, system: &str) -> Result<Reply> {
    let (_, sys, level) = parse_system(ctx, &read_source(system)?)?;
    match solve_system(&sys, level) {
        Ok(x) => {
            let checks: Vec<(usize, bool)> = sys
                .operators
                .iter()
                .zip(&sys.rhs)
                .enumerate()
                .map(|(i, (d, a))| (i + 1, d.apply(&x) == *a))
                .collect();
            let mut human = format!("status: solved\nsolution: {x}\n");
            for (i, ok) in &checks {
                let _ = writeln!(human, "  equation {i}: {}", if *ok { "ok" } else { "FAIL" });
            }
            let all = checks.iter().all(|(_, ok)| *ok);
            let machine = json!({
                "status": "solved",
                "solution": x.to_string(),
                "checks": checks.iter().map(|(i, ok)| json!({"equation": i, "passed": ok})).collect::<Vec<_>>(),
            });
            Ok(Reply {
                code: if all { 0 } else { 1 },
                human,
                machine,
            })
        }
        Err(e @ (Error::Incompatible | Error::NoSolution)) => {
            let status = if e == Error::Incompatible { "incompatible" } else { "no_solution" };
            Ok(Reply {
                code: 1,
                human: format!("status: {status}\n"),
                machine: json!({"status": status, "solution": null, "checks": []}),
            })
        }
        Err(e) => Err(e),
    }
}

fn join(ctx: &Ctx, files: &[String]) -> Result<Reply> {
    let actions: Vec<ModuleAlgebraAction> = files.iter().map(|f| load_action(ctx, f)).collect::<Result<_>>()?;
    let a = join_greedy(&actions)?;
    Ok(action_reply(&a))
}

fn socle_cmd(ctx: &Ctx, group: &str) -> Result<Reply> {
    let g = load_group(ctx, group)?;
    let s = socle(&g)?;
    let file = descriptor_to_json(&s);
    Ok(Reply::ok(
        format!("socle: {}\n{}\n", describe(&s), serde_json::to_string_pretty(&file).expect("serializable")),
        json!({"status": "ok", "socle": file, "name": describe(&s)}),
    ))
}

fn parse_diagram(s: &str) -> Result<YoungDiagram> {
    let rows = s
        .split(',')
        .map(|r| {
            r.trim()
                .parse::<u32>()
                .map_err(|_| Error::Invalid(format!("bad row {r:?} in diagram {s:?}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    YoungDiagram::new(rows)
}

fn young(diagrams: &[String]) -> Result<Reply> {
    let ds: Vec<YoungDiagram> = diagrams.iter().map(|d| parse_diagram(d)).collect::<Result<_>>()?;
    let j = young_join(&ds);
    Ok(Reply::ok(format!("{j}\n"), json!({"status": "ok", "diagram": j.rows().to_vec()})))
}
