//! Command-line front end: argument parsing, file ingestion and report output.
//!
//! Reports are JSON; `reproduce` prints one line per check unless `--json`
//! is given. Exit codes are 0 on success, 1 on usage, parse, I/O or budget
//! errors, and 2 when a verification fails.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use profit_share::analysis::{classify_state, prices, state_count, PriceOptions, DEFAULT_STATE_BUDGET};
use profit_share::claims::Claim;
use profit_share::dynamics::{convergence_bounds, run, DynamicsConfig};
use profit_share::format::{
    bound_json, equilibrium_report_json, parse_game_file, rat, state_json, step_json,
    validation_report_json, write_trace, DynamicsSection, ParseOptions, ParsedGame, SelectorName, TraceFormat,
};
use profit_share::graphgames::GraphGames;
use profit_share::rational::{self, RatStr, Rational};
use profit_share::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;

/// Mismatch descriptions kept per graph-check list.
const GRAPH_CHECK_WITNESSES: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "profit-share", version, about = "Profit-sharing games: dynamics, equilibria and prices of anarchy")]
struct Cli {
    /// JSON output for `reproduce`; other reports are always JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Indent JSON reports.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SelectorArg {
    Basic,
    Roundrobin,
    Random,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every valuation of a game file for monotonicity and submodularity.
    Validate { spec: PathBuf },
    /// Run best-response dynamics and emit the trace.
    Dynamics {
        spec: PathBuf,
        #[arg(long, value_parser = parse_rational)]
        alpha: Option<Rational>,
        #[arg(long, value_enum)]
        selector: Option<SelectorArg>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_steps: Option<usize>,
        /// Write the trace here (.jsonl or .csv) instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        skip_validate: bool,
    },
    /// List every α-Nash equilibrium.
    Equilibria {
        spec: PathBuf,
        #[arg(long, value_parser = parse_rational, default_value = "0")]
        alpha: Rational,
        /// Also mark strong equilibria (n ≤ 8).
        #[arg(long)]
        strong: bool,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        budget: u128,
        #[arg(long)]
        skip_validate: bool,
    },
    /// Optimum, worst and best equilibria, price of anarchy and stability.
    Prices {
        spec: PathBuf,
        #[arg(long, value_parser = parse_rational, default_value = "0")]
        alpha: Rational,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        budget: u128,
        #[arg(long)]
        skip_validate: bool,
    },
    /// Step counts after which the dynamics guarantee a share of the optimum.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_rational)]
        beta: Rational,
        #[arg(long, value_parser = parse_rational, default_value = "0")]
        alpha: Rational,
        #[arg(long, value_parser = parse_rational)]
        epsilon: Rational,
        #[arg(long, value_parser = parse_rational, default_value = "1")]
        opt: Rational,
    },
    /// Compare closed-form graph payoffs with generic payoffs on every state.
    GraphCheck {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        budget: u128,
    },
    /// Re-run the built-in verification checks.
    Reproduce {
        /// A check name, or `all`.
        #[arg(long, default_value = "all", value_parser = parse_case)]
        case: String,
    },
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

fn parse_case(s: &str) -> Result<String, String> {
    if s == "all" || Claim::from_name(s).is_some() {
        return Ok(s.to_string());
    }
    let names: Vec<&str> = Claim::ALL.iter().map(|c| c.name()).collect();
    Err(format!("unknown case; expected all or one of {}", names.join(", ")))
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub command: Vec<String>,
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
    /// Files written, e.g. the trace.
    pub outputs: Vec<PathBuf>,
    pub duration: Duration,
}

struct Output {
    stdout: String,
    outputs: Vec<PathBuf>,
    exit_code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output {
            stdout,
            outputs: Vec::new(),
            exit_code: EXIT_OK,
        }
    }

    fn verified(stdout: String, passed: bool) -> Self {
        Output {
            exit_code: if passed { EXIT_OK } else { EXIT_VERIFICATION },
            ..Output::ok(stdout)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidValuation { .. } | Error::NoEquilibriumFound => EXIT_VERIFICATION,
        _ => EXIT_USAGE,
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn run_command<I, T>(argv: I) -> RunReport
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let start = Instant::now();
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let command = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let finish = |exit_code, stdout, stderr, outputs| RunReport {
        command,
        exit_code,
        stdout,
        stderr,
        outputs,
        duration: start.elapsed(),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => return finish(EXIT_OK, e.render().to_string(), String::new(), Vec::new()),
        Err(e) => return finish(EXIT_USAGE, String::new(), e.render().to_string(), Vec::new()),
    };
    match execute(&cli) {
        Ok(out) => finish(out.exit_code, out.stdout, String::new(), out.outputs),
        Err(e) => finish(exit_code(&e), String::new(), format!("error: {e}\n"), Vec::new()),
    }
}

fn render(cli: &Cli, value: &Value) -> String {
    let mut s = if cli.pretty {
        serde_json::to_string_pretty(value).expect("serializable")
    } else {
        value.to_string()
    };
    s.push('\n');
    s
}

fn load(spec: &Path, skip_validate: bool) -> profit_share::Result<ParsedGame> {
    parse_game_file(spec, ParseOptions { skip_validate })
}

fn execute(cli: &Cli) -> profit_share::Result<Output> {
    match &cli.command {
        Command::Validate { spec } => validate(cli, spec),
        Command::Dynamics {
            spec,
            alpha,
            selector,
            seed,
            max_steps,
            out,
            skip_validate,
        } => {
            let parsed = load(spec, *skip_validate)?;
            let mut section = parsed.file.dynamics.clone().unwrap_or_default();
            if let Some(a) = alpha {
                section.alpha = Some(RatStr(a.clone()));
            }
            if let Some(s) = selector {
                section.selector = Some(match s {
                    SelectorArg::Basic => SelectorName::Basic,
                    SelectorArg::Roundrobin => SelectorName::Roundrobin,
                    SelectorArg::Random => SelectorName::Random,
                });
            }
            section.seed = seed.or(section.seed);
            section.max_steps = max_steps.or(section.max_steps);
            let config = section.resolve()?;
            dynamics(spec, &parsed, &config, out.as_deref())
        }
        Command::Equilibria {
            spec,
            alpha,
            strong,
            budget,
            skip_validate,
        } => {
            let parsed = load(spec, *skip_validate)?;
            let options = PriceOptions {
                alpha: alpha.clone(),
                budget: *budget,
                strong: *strong,
            };
            let report = prices(&parsed.game, &options)?;
            Ok(Output::ok(render(cli, &equilibrium_report_json(&report, true))))
        }
        Command::Prices {
            spec,
            alpha,
            budget,
            skip_validate,
        } => {
            let parsed = load(spec, *skip_validate)?;
            let options = PriceOptions {
                alpha: alpha.clone(),
                budget: *budget,
                strong: false,
            };
            let report = prices(&parsed.game, &options)?;
            Ok(Output::ok(render(cli, &equilibrium_report_json(&report, false))))
        }
        Command::Bounds {
            n,
            beta,
            alpha,
            epsilon,
            opt,
        } => {
            let b = convergence_bounds(*n, beta, alpha, epsilon, opt)?;
            let value = json!({
                "n": n,
                "beta": rat(beta),
                "alpha": rat(alpha),
                "epsilon": rat(epsilon),
                "opt": rat(opt),
                "nash": bound_json(&b.nash),
                "alpha_nash": bound_json(&b.alpha_nash),
            });
            Ok(Output::ok(render(cli, &value)))
        }
        Command::GraphCheck { spec, budget } => graph_check(cli, spec, *budget),
        Command::Reproduce { case } => reproduce(cli, case),
    }
}

fn validate(cli: &Cli, spec: &Path) -> profit_share::Result<Output> {
    let parsed = load(spec, true)?;
    let mut valid = true;
    let mut reports = Vec::new();
    for (j, v) in parsed.game.valuations().iter().enumerate() {
        let report = v.validate()?;
        valid &= report.is_valid();
        reports.push(validation_report_json(j, &report));
    }
    let value = json!({
        "n": parsed.game.players(),
        "m": parsed.game.parties(),
        "scheme": parsed.game.scheme().name(),
        "states": state_count(&parsed.game).to_string(),
        "valid": valid,
        "valuations": reports,
    });
    Ok(Output::verified(render(cli, &value), valid))
}

fn dynamics(
    spec: &Path,
    parsed: &ParsedGame,
    config: &DynamicsConfig,
    out: Option<&Path>,
) -> profit_share::Result<Output> {
    let format = match out {
        Some(path) => {
            let format = TraceFormat::from_path(path)
                .ok_or_else(|| Error::InvalidArgument(format!("{}: trace files end in .jsonl or .csv", path.display())))?;
            if same_file(path, spec) {
                return Err(Error::InvalidArgument("refusing to overwrite the game file".into()));
            }
            Some(format)
        }
        None => None,
    };
    let game = &parsed.game;
    let start = parsed.initial_state.clone().unwrap_or_else(|| game.initial_state());
    let trace = run(game, &start, config)?;
    let classified = classify_state(game, &trace.final_state, &config.alpha)?;
    let final_value = game.total_profit(&trace.final_state)?;
    let potential = game.potential(&trace.final_state)?;

    let mut stdout = String::new();
    let mut outputs = Vec::new();
    match (out, format) {
        (Some(path), Some(format)) => {
            write_trace(&trace, format, path)?;
            outputs.push(path.to_path_buf());
        }
        _ => {
            for (k, s) in trace.steps.iter().enumerate() {
                stdout.push_str(&step_json(k, s).to_string());
                stdout.push('\n');
            }
        }
    }
    let section = DynamicsSection::from_config(config);
    let mut summary = Map::new();
    summary.insert("summary".into(), json!(true));
    summary.insert("dynamics".into(), serde_json::to_value(&section).expect("serializable"));
    summary.insert("steps".into(), json!(trace.len()));
    summary.insert("converged".into(), json!(trace.converged));
    summary.insert("truncated".into(), json!(trace.truncated));
    summary.insert("nash_equilibrium".into(), json!(classified.is_nash));
    summary.insert("alpha_nash_equilibrium".into(), json!(classified.is_alpha_nash));
    summary.insert("initial_state".into(), state_json(&trace.initial_state));
    summary.insert("final_state".into(), state_json(&trace.final_state));
    summary.insert("initial_total_profit".into(), rat(&trace.initial_total_profit));
    summary.insert("total_profit".into(), rat(&final_value));
    summary.insert("potential".into(), rat(&potential));
    if let Some(path) = out {
        summary.insert("trace".into(), json!(path.display().to_string()));
    }
    if !game.is_verified() {
        summary.insert("warning".into(), json!("valuation-unverified"));
    }
    stdout.push_str(&Value::Object(summary).to_string());
    stdout.push('\n');
    // A converged run that is not an α-equilibrium breaks the dynamics' contract.
    let passed = !trace.converged || classified.is_alpha_nash;
    Ok(Output {
        outputs,
        ..Output::verified(stdout, passed)
    })
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

fn graph_check(cli: &Cli, spec: &Path, budget: u128) -> profit_share::Result<Output> {
    let parsed = load(spec, false)?;
    let game = &parsed.game;
    let graph = game.valuations()[0]
        .graph()
        .filter(|g| game.valuations().iter().all(|v| v.graph() == Some(*g)))
        .cloned()
        .ok_or_else(|| Error::InvalidArgument("graph-check needs every party to share one coverage graph".into()))?;
    let audit = GraphGames::new(graph, game.parties())?.audit(budget, GRAPH_CHECK_WITNESSES)?;
    let value = json!({
        "n": game.players(),
        "m": game.parties(),
        "states": audit.states,
        "consistent": audit.consistent(),
        "closed_form_checks": audit.closed_form_checks,
        "closed_form_mismatches": audit.closed_form_mismatches,
        "fair_value_cut_checks": audit.fair_value_cut_checks,
        "fair_value_cut_mismatches": audit.fair_value_cut_mismatches,
        "cut_identity_checks": audit.cut_identity_checks,
        "cut_identity_failures": audit.cut_identity_failures,
        "fair_value_closed_form_checks": audit.fair_value_closed_form_checks,
        "fair_value_closed_form_mismatches": audit.fair_value_closed_form_mismatches,
    });
    Ok(Output::verified(render(cli, &value), audit.consistent()))
}

fn reproduce(cli: &Cli, case: &str) -> profit_share::Result<Output> {
    let claims: Vec<Claim> = match Claim::from_name(case) {
        Some(c) => vec![c],
        None => Claim::ALL.to_vec(),
    };
    let mut passed = true;
    let mut lines = String::new();
    let mut entries = Vec::new();
    for claim in claims {
        let outcome = claim.check()?;
        passed &= outcome.passed;
        lines.push_str(&outcome.line());
        lines.push('\n');
        for f in &outcome.failures {
            lines.push_str(&format!("    {f}\n"));
        }
        let metrics: Map<String, Value> = outcome.metrics.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        entries.push(json!({
            "number": claim.number(),
            "case": claim.name(),
            "title": claim.title(),
            "passed": outcome.passed,
            "checks": outcome.checks,
            "metrics": metrics,
            "failures": outcome.failures,
        }));
    }
    let stdout = if cli.json || cli.pretty {
        render(cli, &json!({ "passed": passed, "cases": entries }))
    } else {
        lines
    };
    Ok(Output::verified(stdout, passed))
}
