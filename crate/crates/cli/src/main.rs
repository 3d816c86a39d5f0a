//! `fixcheck`: runs fixpoint checks on model files and transition systems.
//!
//! Exit codes: 0 confirmed, 1 refuted, 2 inconclusive, 3 on any error.

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use fixcheck_core::engine::{self, CheckMode, IterateOptions, Verdict};
use fixcheck_core::lifting::{self, COUPLING_CAP};
use fixcheck_core::mv::MvAlgebra;
use fixcheck_core::report;
use fixcheck_core::scalar::parse_scalar;
use fixcheck_core::systems::{parse_lmc, parse_mc, parse_nts};
use fixcheck_core::transport::VertexLimits;
use fixcheck_core::{Rational, RationalDiagram, RationalModel, RationalValuation};

const ERROR_EXIT: u8 = 3;

#[derive(Parser)]
#[command(name = "fixcheck", version, about = "Least and greatest fixpoint checks over MV-chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a candidate against a diagram of a model file.
    Check(ModelArgs),
    /// Evaluate a diagram on a candidate.
    Eval(ModelArgs),
    /// Greatest fixpoint of the approximation at a candidate.
    GfpApprox(ModelArgs),
    /// Descend from a pre-fixpoint towards the least fixpoint.
    Iterate(ModelArgs),
    /// Termination probability function of a Markov chain (`.mc`).
    Termination(SystemArgs),
    /// Behavioural metric function of a `.lmc` or `.nts` system.
    Metric(SystemArgs),
}

#[derive(Args)]
struct Common {
    /// Candidate valuation; `top` and `bottom` are always available.
    #[arg(long)]
    candidate: String,
    #[arg(long, value_parser = parse_mode, default_value = "least")]
    mode: CheckMode,
    /// Write the JSON report here; `-` for standard output.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    max_rounds: usize,
    /// Descent tolerance for `iterate`, as `p/q`.
    #[arg(long)]
    epsilon: Option<String>,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    diagram: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SystemArgs {
    #[arg(long)]
    system: PathBuf,
    /// What to do with the derived diagram.
    #[arg(long, value_enum, default_value_t = Run::Check)]
    run: Run,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Run {
    Check,
    Eval,
    GfpApprox,
    Iterate,
}

fn parse_mode(s: &str) -> Result<CheckMode, String> {
    s.parse()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// The report and the exit verdict.
fn run(d: &RationalDiagram, a: &RationalValuation, alg: &MvAlgebra<Rational>, what: Run, c: &Common) -> Result<(Value, Verdict)> {
    let a = a.reorder_to(d.input()).map_err(|e| anyhow!("candidate does not fit the diagram: {e}"))?;
    match what {
        Run::Check => {
            let r = engine::check(d, &a, c.mode, alg)?;
            Ok((report::check_report(&r), r.verdict()))
        }
        Run::Eval => {
            let fa = d.step(&a, alg)?;
            let v = report::eval_report(&a, &fa);
            let verdict = if fa == a { Verdict::Confirmed } else { Verdict::Refuted };
            Ok((v, verdict))
        }
        Run::GfpApprox => {
            let is_fix = d.step(&a, alg)? == a;
            let g = engine::gfp_approx(d, &a, alg)?;
            let v = report::gfp_report::<Rational>(is_fix, &g);
            let verdict = match (is_fix, g.gfp.is_empty()) {
                (false, _) => Verdict::Inconclusive,
                (true, true) => Verdict::Confirmed,
                (true, false) => Verdict::Refuted,
            };
            Ok((v, verdict))
        }
        Run::Iterate => {
            let mut opts = IterateOptions::new(alg);
            opts.max_rounds = c.max_rounds;
            if let Some(e) = &c.epsilon {
                opts.epsilon = parse_scalar(e).ok_or_else(|| anyhow!("--epsilon: `{e}` is not a rational"))?;
            }
            let o = engine::iterate_to_least_from_above(d, &a, &opts, alg)?;
            let verdict = if o.confirmed { Verdict::Confirmed } else { Verdict::Inconclusive };
            Ok((report::iterate_report(&o), verdict))
        }
    }
}

fn model_command(what: Run, args: &ModelArgs) -> Result<(Value, Verdict)> {
    let file = args.file.display().to_string();
    let model: RationalModel = fixcheck_core::dsl::parse_model(&read(&args.file)?).map_err(|e| e.in_file(&file))?;
    let alg = model.algebra().clone();
    let d = model.diagram(&args.diagram).ok_or_else(|| anyhow!("no diagram `{}` in {file}", args.diagram))?;
    let name = &args.common.candidate;
    let a = match (model.valuation(name), name.as_str()) {
        (Some(v), _) => v.clone(),
        (None, "top") => RationalValuation::constant(d.input(), alg.top()),
        (None, "bottom") => RationalValuation::zero(d.input()),
        _ => bail!("no valuation `{name}` in {file}"),
    };
    run(d, &a, &alg, what, &args.common)
}

fn termination_command(args: &SystemArgs) -> Result<(Value, Verdict)> {
    let file = args.system.display().to_string();
    let alg = MvAlgebra::<Rational>::unit_interval();
    let f = parse_mc(&read(&args.system)?, &alg).map_err(|e| e.in_file(&file))?;
    let d = lifting::build_termination_diagram(&f.system)?;
    let a = f.candidate(&args.common.candidate, f.system.states(), &alg);
    let a = a.ok_or_else(|| anyhow!("no candidate `{}` in {file}", args.common.candidate))?;
    run(&d, &a, &alg, args.run, &args.common)
}

fn metric_command(args: &SystemArgs) -> Result<(Value, Verdict)> {
    let file = args.system.display().to_string();
    let alg = MvAlgebra::<Rational>::unit_interval();
    let text = read(&args.system)?;
    let missing = || anyhow!("no candidate `{}` in {file}", args.common.candidate);
    let (d, a) = match args.system.extension().and_then(|e| e.to_str()) {
        Some("lmc") => {
            let f = parse_lmc(&text, &alg).map_err(|e| e.in_file(&file))?;
            let d = lifting::build_behavioural_diagram(&f.system, VertexLimits::default())?;
            let a = f.candidate(&args.common.candidate, &f.system.pairs(), &alg).ok_or_else(missing)?;
            (d, a)
        }
        Some("nts") => {
            let f = parse_nts(&text, &alg).map_err(|e| e.in_file(&file))?;
            let d = lifting::build_powerset_diagram(&f.system, COUPLING_CAP)?;
            let a = f.candidate(&args.common.candidate, &f.system.pairs(), &alg).ok_or_else(missing)?;
            (d, a)
        }
        _ => bail!("{file}: expected a `.lmc` or `.nts` system"),
    };
    run(&d, &a, &alg, args.run, &args.common)
}

fn color_enabled() -> bool {
    match std::env::var("FIXCHECK_COLOR").as_deref() {
        Ok("1") => true,
        Ok("0") => false,
        _ => std::io::stdout().is_terminal(),
    }
}

fn summary(v: &Value, verdict: Verdict) -> String {
    let paint = |code: &str, s: &str| if color_enabled() { format!("\x1b[{code}m{s}\x1b[0m") } else { s.to_string() };
    let word = match verdict {
        Verdict::Confirmed => paint("32", verdict.as_str()),
        Verdict::Refuted => paint("31", verdict.as_str()),
        Verdict::Inconclusive => paint("33", verdict.as_str()),
    };
    let witness: Vec<&str> = v["witness"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
    let mut out = format!("{}: {word}\nfixpoint: {}\nwitness: {{{}}}\n", v["mode"].as_str().unwrap_or(""), v["is_fixpoint"], witness.join(", "));
    if let Some(delta) = v["suggested_delta"].as_str() {
        out.push_str(&format!("suggested delta: {delta}\n"));
    }
    out
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ERROR_EXIT } else { 0 });
        }
    };
    let (json, outcome) = match &cli.command {
        Command::Check(a) => (&a.common.json, model_command(Run::Check, a)),
        Command::Eval(a) => (&a.common.json, model_command(Run::Eval, a)),
        Command::GfpApprox(a) => (&a.common.json, model_command(Run::GfpApprox, a)),
        Command::Iterate(a) => (&a.common.json, model_command(Run::Iterate, a)),
        Command::Termination(a) => (&a.common.json, termination_command(a)),
        Command::Metric(a) => (&a.common.json, metric_command(a)),
    };
    let (value, verdict) = match outcome {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(ERROR_EXIT);
        }
    };
    let text = report::render(&value);
    match json.as_deref() {
        Some(p) if p == Path::new("-") => print!("{text}"),
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(ERROR_EXIT);
            }
            print!("{}", summary(&value, verdict));
        }
        None => print!("{}", summary(&value, verdict)),
    }
    ExitCode::from(verdict.exit_code() as u8)
}
