//! `dcbpv`: type-check, run, trace, translate and model-check programs.

use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use dcbpv::equality::{eliminate_complex_values, normalize_explained};
use dcbpv::laws::{check_law_file, check_theory};
use dcbpv::machine::{self, compact, Outcome, Scheduler, TerminalKind};
use dcbpv::model::{Verdict, DEFAULT_CAP};
use dcbpv::source::parse_src_program;
use dcbpv::surface::{self, print_comp, print_ctype, print_program, ProgramFile};
use dcbpv::syntax::{Comp, CType, EffectSignature};
use dcbpv::translate::{translate_program, Strategy, TranslateError};
use dcbpv::typecheck::{check_program, CheckOptions, Variant};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_FUEL: u8 = 2;
const EXIT_HALT: u8 = 3;
const EXIT_USAGE: u8 = 4;

#[derive(Parser)]
#[command(name = "dcbpv", version, about = "Dependently typed call-by-push-value toolchain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check the main computation of a program.
    Check {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Print the normal form of `main` and the rewrites that produced it.
        #[arg(long)]
        explain: bool,
    },
    /// Run a program on the abstract machine.
    Run {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exec: Exec,
    },
    /// Run a program and print every transition.
    Trace {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        exec: Exec,
    },
    /// Translate a source program into a kernel program.
    Translate {
        file: PathBuf,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        #[command(flatten)]
        common: Common,
    },
    /// Check laws in the finite-set model.
    ModelCheck {
        /// A file of `law` declarations.
        #[arg(required_unless_present = "theory", conflicts_with = "theory")]
        file: Option<PathBuf>,
        /// Sweep the built-in equational theory instead of reading a file.
        #[arg(long)]
        theory: bool,
        /// Largest base type size for `--theory`.
        #[arg(long, default_value_t = 4)]
        max_base: usize,
        /// Largest number of errors for `--theory`.
        #[arg(long, default_value_t = 2)]
        max_errors: usize,
        /// Largest number of environments enumerated per law.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Defaults to the file's `--! variant` pragma, then `minus`.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Disable the effect coercion in dCBPV+.
    #[arg(long)]
    no_shrink: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Exec {
    /// first | fixed:<i,j,..> | seeded:<n> | interactive | all
    #[arg(long, default_value = "first", value_parser = parse_scheduler)]
    scheduler: Scheduler,
    #[arg(long, default_value_t = 10_000)]
    fuel: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Minus,
    Plus,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Cbv,
    Cbn,
}

fn parse_scheduler(s: &str) -> Result<Scheduler, String> {
    Scheduler::parse(s).ok_or_else(|| format!("unknown scheduler `{s}`"))
}

/// Collected output of one command.
struct Report {
    code: u8,
    text: Vec<String>,
    json: Json,
}

impl Report {
    fn fail(command: &str, kind: &str, message: String) -> Report {
        Report {
            code: EXIT_ERROR,
            text: vec![paint(&format!("error: {message}"), RED)],
            json: json!({ "command": command, "ok": false, "error": { "kind": kind, "message": message } }),
        }
    }
}

const GREEN: &str = "32";
const RED: &str = "31";
const YELLOW: &str = "33";

fn color_enabled() -> bool {
    match std::env::var("DCBPV_COLOR") {
        Ok(v) if v == "0" => false,
        Ok(v) if v == "1" => true,
        _ => std::io::stdout().is_terminal(),
    }
}

fn paint(s: &str, code: &str) -> String {
    if color_enabled() {
        format!("\x1b[{code}m{s}\x1b[0m")
    } else {
        s.to_string()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let (report, json) = match cli.command {
        Command::Check { file, common, explain } => (cmd_check(&file, &common, explain), common.json),
        Command::Run { file, common, exec } => (cmd_run(&file, &common, &exec), common.json),
        Command::Trace { file, common, exec } => (cmd_trace(&file, &common, &exec), common.json),
        Command::Translate { file, strategy, common } => (cmd_translate(&file, strategy, &common), common.json),
        Command::ModelCheck { file, theory, max_base, max_errors, cap, common } => {
            let r = if theory {
                cmd_theory(max_base, max_errors, cap)
            } else {
                cmd_model_check(file.as_deref().expect("clap requires a file"), &common, cap)
            };
            (r, common.json)
        }
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report.json).expect("JSON output serializes"));
    } else {
        for line in &report.text {
            println!("{line}");
        }
    }
    ExitCode::from(report.code)
}

fn read(path: &Path, command: &str) -> Result<String, Report> {
    std::fs::read_to_string(path)
        .map_err(|e| Report::fail(command, "Io", format!("cannot read {}: {e}", path.display())))
}

fn variant_of(common: &Common, file: Option<&ProgramFile>) -> Variant {
    match common.variant {
        Some(VariantArg::Minus) => Variant::Minus,
        Some(VariantArg::Plus) => Variant::Plus,
        None => file
            .and_then(|f| f.pragma("variant"))
            .and_then(Variant::from_name)
            .unwrap_or(Variant::Minus),
    }
}

fn options(common: &Common, variant: Variant, sig: &EffectSignature) -> CheckOptions {
    let mut opts = CheckOptions::new(variant, sig);
    if common.no_shrink {
        opts.allow_shrink = false;
    }
    opts
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Minus => "minus",
        Variant::Plus => "plus",
    }
}

/// A parsed and type-checked program with a main computation.
struct Checked {
    file: ProgramFile,
    ty: CType,
    main: Comp,
    variant: Variant,
}

fn load_checked(path: &Path, common: &Common, command: &str) -> Result<Checked, Report> {
    let text = read(path, command)?;
    let file = surface::parse(&text).map_err(|e| {
        let mut r = Report::fail(command, "ParseError", e.to_string());
        r.json["error"] = json!({ "kind": "ParseError", "message": e.message, "span": e.span });
        r
    })?;
    let Some(main) = file.main.clone() else {
        return Err(Report::fail(command, "NoMain", format!("{} has no `main`", path.display())));
    };
    let variant = variant_of(common, Some(&file));
    let opts = options(common, variant, &file.signature);
    check_program(&main.body, &main.ty, &opts, &file.signature).map_err(|e| {
        let mut r = Report::fail(command, e.kind.name(), e.render());
        r.json["error"] = serde_json::to_value(&e).expect("type errors serialize");
        r
    })?;
    Ok(Checked { file, ty: main.ty, main: main.body, variant })
}

fn cmd_check(path: &Path, common: &Common, explain: bool) -> Report {
    let c = match load_checked(path, common, "check") {
        Ok(c) => c,
        Err(r) => return r,
    };
    let ty = print_ctype(&c.ty, 0);
    let mut text = vec![format!("{}: {ty}", paint("OK", GREEN))];
    let mut json = json!({ "command": "check", "ok": true, "type": ty, "variant": variant_name(c.variant) });
    if explain {
        let opts = options(common, c.variant, &c.file.signature).conv;
        match normalize_explained(&c.main, &opts) {
            Ok((nf, log)) => {
                text.push(format!("normal form: {}", print_comp(&nf, 0)));
                text.extend(log.iter().map(|s| {
                    let at = if s.path.is_empty() { "the root" } else { s.path.as_str() };
                    format!("  {} at {at}", s.rule)
                }));
                json["normal_form"] = json!(print_comp(&nf, 0));
                json["rewrites"] = serde_json::to_value(&log).expect("rewrite log serializes");
            }
            Err(e) => text.push(format!("normal form unavailable: {e}")),
        }
    }
    Report { code: EXIT_OK, text, json }
}

fn outcome_json(o: &Outcome, sig: &EffectSignature) -> Json {
    match o {
        Outcome::Terminal { kind, printed, state, steps } => json!({
            "kind": kind.label(),
            "value": kind.detail().map(|d| compact(&d)),
            "printed": sig.render_monoid(printed),
            "state": state,
            "steps": steps,
        }),
        Outcome::FuelExhausted { last, steps } => json!({
            "kind": "FuelExhausted",
            "value": Json::Null,
            "printed": sig.render_monoid(&last.printed),
            "state": last.state,
            "steps": steps,
        }),
    }
}

fn outcome_code(o: &Outcome) -> u8 {
    match o {
        Outcome::Terminal { kind: TerminalKind::ErrorHalt(_), .. } => EXIT_HALT,
        Outcome::Terminal { .. } => EXIT_OK,
        Outcome::FuelExhausted { .. } => EXIT_FUEL,
    }
}

fn outcome_line(o: &Outcome, sig: &EffectSignature) -> String {
    let line = o.render(sig);
    match outcome_code(o) {
        EXIT_OK => line,
        _ => paint(&line, YELLOW),
    }
}

fn stuck_warning(outcomes: &[Outcome]) -> Option<String> {
    outcomes
        .iter()
        .any(|o| matches!(o, Outcome::Terminal { kind: TerminalKind::StuckOnVar, .. }))
        .then(|| paint("warning: the machine stopped on a free variable", YELLOW))
}

fn machine_failure(command: &str, e: machine::MachineError) -> Report {
    Report::fail(command, "MachineError", e.to_string())
}

fn cmd_run(path: &Path, common: &Common, exec: &Exec) -> Report {
    let c = match load_checked(path, common, "run") {
        Ok(c) => c,
        Err(r) => return r,
    };
    let sig = &c.file.signature;
    let m = eliminate_complex_values(&c.main);
    let outcomes = if exec.scheduler == Scheduler::All {
        machine::run_all(&m, sig, exec.fuel)
    } else {
        machine::run(&m, sig, &exec.scheduler, exec.fuel).map(|o| vec![o])
    };
    let outcomes = match outcomes {
        Ok(o) => o,
        Err(e) => return machine_failure("run", e),
    };
    // With several outcomes the most severe exit code wins.
    let code = outcomes
        .iter()
        .map(outcome_code)
        .max_by_key(|&c| match c {
            EXIT_FUEL => 2,
            EXIT_HALT => 1,
            _ => 0,
        })
        .unwrap_or(EXIT_OK);
    let mut text: Vec<String> = outcomes.iter().map(|o| outcome_line(o, sig)).collect();
    text.extend(stuck_warning(&outcomes));
    let list: Vec<Json> = outcomes.iter().map(|o| outcome_json(o, sig)).collect();
    let json = json!({ "command": "run", "ok": true, "outcomes": list });
    Report { code, text, json }
}

fn cmd_trace(path: &Path, common: &Common, exec: &Exec) -> Report {
    let c = match load_checked(path, common, "trace") {
        Ok(c) => c,
        Err(r) => return r,
    };
    let sig = &c.file.signature;
    let m = eliminate_complex_values(&c.main);
    let (log, outcome) = match machine::trace(&m, sig, &exec.scheduler, exec.fuel) {
        Ok(t) => t,
        Err(e) => return machine_failure("trace", e),
    };
    let mut text = Vec::with_capacity(log.len() + 2);
    let mut steps = Vec::with_capacity(log.len());
    if let Ok(start) = machine::inject(&m, sig) {
        text.push(format!("0: START {}", start.render(sig)));
    }
    for (i, s) in log.iter().enumerate() {
        text.push(format!("{}: {} {}", i + 1, s.rule.name(), s.config.render(sig)));
        steps.push(json!({
            "n": i + 1,
            "rule": s.rule.name(),
            "comp": print_comp(&s.config.comp, 0),
            "stack": machine::render_stack(&s.config.stack),
            "printed": sig.render_monoid(&s.config.printed),
            "state": s.config.state,
        }));
    }
    text.push(outcome_line(&outcome, sig));
    text.extend(stuck_warning(std::slice::from_ref(&outcome)));
    let json = json!({
        "command": "trace",
        "ok": true,
        "steps": steps,
        "outcome": outcome_json(&outcome, sig),
    });
    Report { code: outcome_code(&outcome), text, json }
}

fn cmd_translate(path: &Path, strategy: StrategyArg, common: &Common) -> Report {
    let text = match read(path, "translate") {
        Ok(t) => t,
        Err(r) => return r,
    };
    let strategy = match strategy {
        StrategyArg::Cbv => Strategy::Cbv,
        StrategyArg::Cbn => Strategy::Cbn,
    };
    let variant = variant_of(common, None);
    let src = match parse_src_program(&text) {
        Ok(p) => p,
        Err(e) => return Report::fail("translate", "ParseError", e.to_string()),
    };
    let out = match translate_program(&src, strategy, variant) {
        Ok(t) => t,
        Err(e) => {
            let kind = match e {
                TranslateError::CbvNeedsPlus => "CbvNeedsPlus",
                TranslateError::DependentElimNeedsPlus => "DependentElimNeedsPlus",
                _ => "TranslateError",
            };
            let mut r = Report::fail("translate", kind, e.to_string());
            r.text = vec![paint(&format!("error: {kind}: {e}"), RED)];
            return r;
        }
    };
    let opts = options(common, variant, &out.signature);
    if let Err(e) = check_program(&out.main, &out.ty, &opts, &out.signature) {
        let mut r = Report::fail("translate", e.kind.name(), format!("the translation does not type-check: {}", e.render()));
        r.json["error"] = serde_json::to_value(&e).expect("type errors serialize");
        return r;
    }
    let program = format!("--! variant {}\n{}", variant_name(variant), print_program(&out.signature, &out.ty, &out.main));
    let json = json!({
        "command": "translate",
        "ok": true,
        "strategy": match strategy { Strategy::Cbv => "cbv", Strategy::Cbn => "cbn" },
        "variant": variant_name(variant),
        "type": print_ctype(&out.ty, 0),
        "program": program,
    });
    Report { code: EXIT_OK, text: vec![program.trim_end().to_string()], json }
}

fn verdict_cell(v: &Verdict) -> String {
    match v {
        Verdict::Equal { .. } => paint("Equal", GREEN),
        Verdict::Counterexample { .. } => paint(&v.to_string(), RED),
        Verdict::CapExceeded { .. } => paint(&v.to_string(), YELLOW),
    }
}

fn instantiations(v: &Verdict) -> usize {
    match v {
        Verdict::Equal { environments } => *environments,
        _ => 0,
    }
}

fn table_code<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> u8 {
    if verdicts.into_iter().all(Verdict::is_equal) {
        EXIT_OK
    } else {
        EXIT_ERROR
    }
}

fn cmd_model_check(path: &Path, common: &Common, cap: usize) -> Report {
    let text = match read(path, "model-check") {
        Ok(t) => t,
        Err(r) => return r,
    };
    let variant = common.variant.map_or(Variant::Plus, |v| match v {
        VariantArg::Minus => Variant::Minus,
        VariantArg::Plus => Variant::Plus,
    });
    let reports = match check_law_file(&text, variant, cap) {
        Ok(r) => r,
        Err(e) => return Report::fail("model-check", "LawError", e.to_string()),
    };
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0).max("equation".len());
    let mut lines = vec![format!("{:width$}  {:>14}  verdict", "equation", "instantiations")];
    let mut rows = Vec::new();
    for r in &reports {
        lines.push(format!("{:width$}  {:>14}  {}", r.name, instantiations(&r.verdict), verdict_cell(&r.verdict)));
        rows.push(json!({
            "equation": r.name,
            "instantiations": instantiations(&r.verdict),
            "verdict": r.verdict.to_string(),
            "equal": r.verdict.is_equal(),
        }));
    }
    let code = table_code(reports.iter().map(|r| &r.verdict));
    Report { code, text: lines, json: json!({ "command": "model-check", "ok": true, "rows": rows }) }
}

fn cmd_theory(max_base: usize, max_errors: usize, cap: usize) -> Report {
    let rows = match check_theory(max_base, max_errors, cap) {
        Ok(r) => r,
        Err(e) => return Report::fail("model-check", "LawError", e.to_string()),
    };
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max("equation".len());
    let mut lines = vec![format!("{:width$}  base  errors  {:>14}  verdict", "equation", "instantiations")];
    let mut out = Vec::new();
    for r in &rows {
        lines.push(format!(
            "{:width$}  {:>4}  {:>6}  {:>14}  {}",
            r.name,
            r.base_size,
            r.errors,
            instantiations(&r.verdict),
            verdict_cell(&r.verdict)
        ));
        out.push(json!({
            "equation": r.name,
            "base_size": r.base_size,
            "errors": r.errors,
            "instantiations": instantiations(&r.verdict),
            "verdict": r.verdict.to_string(),
            "equal": r.verdict.is_equal(),
        }));
    }
    let code = table_code(rows.iter().map(|r| &r.verdict));
    Report { code, text: lines, json: json!({ "command": "model-check", "ok": true, "rows": out }) }
}
