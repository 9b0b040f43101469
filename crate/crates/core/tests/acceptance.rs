//! The acceptance suite: each criterion prints one PASS/FAIL line and the
//! test fails if any criterion fails.

mod common;

use std::collections::{HashSet, VecDeque};
use std::time::{Duration, Instant};
use std::process::ExitCode;

use common::{programs, sources, Program};
use dcbpv::equality::{convertible, eliminate_complex_values, ConvOptions};
use dcbpv::laws::{check_theory, THEORY_SIZE};
use dcbpv::machine::{self, inject, matching_rows, step, terminal_kind, Configuration, Outcome, StepResult};
use dcbpv::model::{
    check_exception_kleisli_laws, refute_dependent_kleisli_writer, Model, RefutationError, Verdict, DEFAULT_CAP,
};
use dcbpv::syntax::{Comp, Effect, EffectSignature, FiniteMonoid, Monoid, MonoidElem};
use dcbpv::translate::{translate_program, Strategy, TranslateError};
use dcbpv::typecheck::{check_program, CheckOptions, Checker, Variant};

const FUEL: usize = 10_000;
const MAX_CONFIGS: usize = 5_000;

type Criterion = Result<String, String>;

/// Every configuration reachable from a program, over all choices.
fn reachable(m: &Comp, sig: &EffectSignature) -> Result<Vec<Configuration>, String> {
    let start = inject(m, sig).map_err(|e| e.to_string())?;
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(cfg) = queue.pop_front() {
        out.push(cfg.clone());
        if out.len() > MAX_CONFIGS || terminal_kind(&cfg).is_some() {
            continue;
        }
        let nexts = match step(&cfg, sig).map_err(|e| e.to_string())? {
            StepResult::Stepped(_, n) => vec![n],
            StepResult::NeedsChoice(ns) => ns,
            StepResult::Terminal(_) => Vec::new(),
        };
        for n in nexts {
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    Ok(out)
}

fn runnable(p: &Program) -> Comp {
    eliminate_complex_values(&p.main)
}

fn determinism(progs: &[Program]) -> Criterion {
    let mut configs = 0;
    for p in progs {
        for cfg in reachable(&runnable(p), &p.file.signature)? {
            configs += 1;
            let rows = matching_rows(&cfg);
            let ok = if terminal_kind(&cfg).is_some() { rows.is_empty() } else { rows.len() == 1 };
            if !ok {
                return Err(format!("{}: {} rows match at {}", p.name, rows.len(), cfg.render(&p.file.signature)));
            }
        }
    }
    Ok(format!("{} programs, {configs} configurations", progs.len()))
}

fn normalization(progs: &[Program]) -> Criterion {
    let mut n = 0;
    for p in progs.iter().filter(|p| p.terminating()) {
        n += 1;
        let outs = machine::run_all(&runnable(p), &p.file.signature, FUEL).map_err(|e| format!("{}: {e}", p.name))?;
        if let Some(o) = outs.iter().find(|o| matches!(o, Outcome::FuelExhausted { .. })) {
            return Err(format!("{}: {}", p.name, o.render(&p.file.signature)));
        }
    }
    Ok(format!("{n} programs without divergence or recursion terminate within {FUEL} steps"))
}

fn check_all_configs(p: &Program, opts: CheckOptions) -> Result<usize, String> {
    let sig = &p.file.signature;
    let mut checker = Checker::new(sig, opts);
    let configs = reachable(&runnable(p), sig)?;
    for cfg in &configs {
        checker
            .check_config(&cfg.comp, &cfg.stack, &p.ty)
            .map_err(|e| format!("{} at {}: {}", p.name, cfg.render(sig), e.render()))?;
    }
    Ok(configs.len())
}

fn subject_reduction(progs: &[Program]) -> Criterion {
    let (mut minus, mut plus) = (0, 0);
    for p in progs {
        match p.variant {
            Variant::Minus => {
                check_all_configs(p, CheckOptions::minus())?;
                minus += 1;
            }
            Variant::Plus => {
                check_all_configs(p, CheckOptions::plus())?;
                plus += 1;
            }
        }
    }
    let counter: Vec<&Program> = progs.iter().filter(|p| p.has_flag("shrink-counterexample")).collect();
    if counter.is_empty() {
        return Err("no program is marked as the shrink counterexample".into());
    }
    for p in &counter {
        let no_shrink = CheckOptions { allow_shrink: false, ..CheckOptions::plus() };
        check_program(&p.main, &p.ty, &no_shrink, &p.file.signature)
            .map_err(|e| format!("{} should check before running: {}", p.name, e.render()))?;
        if check_all_configs(p, no_shrink).is_ok() {
            return Err(format!("{} re-checks without shrinking", p.name));
        }
    }
    Ok(format!("{minus} minus and {plus} plus programs re-check after every step; {} fail without shrinking", counter.len()))
}

fn equational_soundness() -> Criterion {
    let t = Instant::now();
    let rows = check_theory(4, 2, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    if rows.len() != THEORY_SIZE * 4 * 3 {
        return Err(format!("{} rows", rows.len()));
    }
    if let Some(r) = rows.iter().find(|r| !r.verdict.is_equal()) {
        return Err(format!("{} at base size {} with {} errors: {}", r.name, r.base_size, r.errors, r.verdict));
    }
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    let envs: usize = rows
        .iter()
        .map(|r| match r.verdict {
            Verdict::Equal { environments } => environments,
            _ => 0,
        })
        .sum();
    Ok(format!("{THEORY_SIZE} equations x 12 instantiations, {envs} environments, {elapsed:.2?}"))
}

/// The finite model able to interpret a program, if any.
fn model_for(sig: &EffectSignature, m: &Comp) -> Option<Model> {
    let used = m.effects_used();
    let mut errs: Vec<&str> = sig.errors().iter().map(String::as_str).collect();
    if used.iter().all(|e| *e == Effect::Error) {
        errs.sort();
        return Some(Model::exception(&errs));
    }
    if used.iter().all(|e| *e == Effect::Print) {
        if let Monoid::FiniteTable(t) = &sig.monoid {
            return Some(Model::writer(t.clone()));
        }
    }
    None
}

fn complex_value_elimination(progs: &[Program]) -> Criterion {
    let mut items: Vec<(String, EffectSignature, Comp)> =
        progs.iter().map(|p| (p.name.clone(), p.file.signature.clone(), p.main.clone())).collect();
    for s in sources() {
        if let Ok(t) = translate_program(&s.program, Strategy::Cbv, Variant::Plus) {
            items.push((format!("{} (cbv)", s.name), t.signature, t.main));
        }
    }
    let (mut by_model, mut by_machine, mut by_conv) = (0, 0, 0);
    for (name, sig, m) in &items {
        let mt = eliminate_complex_values(m);
        if !mt.is_complex_free() {
            return Err(format!("{name}: output still has complex values"));
        }
        match model_for(sig, m) {
            Some(model) => {
                let v = model
                    .check_equation(&dcbpv::syntax::Context::empty(), m, &mt)
                    .map_err(|e| format!("{name}: {e}"))?;
                if !v.is_equal() {
                    return Err(format!("{name}: {v}"));
                }
                by_model += 1;
            }
            None if m.is_complex_free() => {
                // Effects outside the finite models: every outcome of the
                // machine must agree.
                let outcomes = |c: &Comp| -> Result<Vec<String>, String> {
                    let mut v: Vec<String> = machine::run_all(c, sig, 200)
                        .map_err(|e| format!("{name}: {e}"))?
                        .iter()
                        .map(|o| o.render(sig).split(" | ").take(3).collect::<Vec<_>>().join(" | "))
                        .collect();
                    v.sort();
                    Ok(v)
                };
                if outcomes(m)? != outcomes(&mt)? {
                    return Err(format!("{name}: outcomes differ"));
                }
                by_machine += 1;
            }
            None => {
                // The machine cannot run the input, so fall back to
                // judgemental equality.
                if !convertible(m, &mt, &ConvOptions::default()).map_err(|e| format!("{name}: {e}"))? {
                    return Err(format!("{name}: not convertible to its elimination"));
                }
                by_conv += 1;
            }
        }
    }
    Ok(format!(
        "{} computations: {by_model} equal in a finite model, {by_machine} by machine outcomes, {by_conv} by conversion",
        items.len()
    ))
}

fn translation_gates() -> Criterion {
    let srcs = sources();
    let (mut cbv_minus, mut cbv_plus, mut cbn_weak, mut cbn_dep) = (0, 0, 0, 0);
    let checks = |t: &dcbpv::translate::Translated, v: Variant| {
        check_program(&t.main, &t.ty, &CheckOptions::new(v, &t.signature), &t.signature).map_err(|e| e.render())
    };
    for s in &srcs {
        let declared_dependent = match s.pragma("elim") {
            Some("dependent") => true,
            Some("weak") => false,
            other => return Err(format!("{}: bad elim pragma {other:?}", s.name)),
        };
        if s.program.main.has_dependent_elim() != declared_dependent {
            return Err(format!("{}: elimination kind disagrees with the pragma", s.name));
        }
        match translate_program(&s.program, Strategy::Cbv, Variant::Minus) {
            Err(TranslateError::CbvNeedsPlus) => cbv_minus += 1,
            other => return Err(format!("{}: CBV into minus gave {other:?}", s.name)),
        }
        let t = translate_program(&s.program, Strategy::Cbv, Variant::Plus).map_err(|e| format!("{}: {e}", s.name))?;
        checks(&t, Variant::Plus).map_err(|e| format!("{} CBV plus: {e}", s.name))?;
        cbv_plus += 1;
        match translate_program(&s.program, Strategy::Cbn, Variant::Minus) {
            Ok(t) if !declared_dependent => {
                checks(&t, Variant::Minus).map_err(|e| format!("{} CBN minus: {e}", s.name))?;
                cbn_weak += 1;
            }
            Err(TranslateError::DependentElimNeedsPlus) if declared_dependent => {
                let t = translate_program(&s.program, Strategy::Cbn, Variant::Plus)
                    .map_err(|e| format!("{}: {e}", s.name))?;
                checks(&t, Variant::Plus).map_err(|e| format!("{} CBN plus: {e}", s.name))?;
                cbn_dep += 1;
            }
            other => return Err(format!("{}: CBN into minus gave {:?}", s.name, other.map(|_| ()))),
        }
    }
    if cbv_minus < 3 || cbv_plus < 3 || cbn_weak < 3 || cbn_dep < 3 {
        return Err(format!("too few programs per gate: {cbv_minus}/{cbv_plus}/{cbn_weak}/{cbn_dep}"));
    }
    Ok(format!(
        "CBV into minus rejected {cbv_minus}x, CBV into plus checks {cbv_plus}x, CBN into minus checks {cbn_weak} weak and rejects {cbn_dep} dependent"
    ))
}

fn kleisli_results() -> Criterion {
    let t = Instant::now();
    let report = check_exception_kleisli_laws(4, 2);
    if let Some(f) = report.failures.first() {
        return Err(f.clone());
    }
    let r = refute_dependent_kleisli_writer(&FiniteMonoid::cyclic(2), 1)
        .map_err(|e| format!("Z/2 over one point: {e}"))?;
    if r.search_space != 0 {
        return Err(format!("Z/2 search space is {}", r.search_space));
    }
    match refute_dependent_kleisli_writer(&FiniteMonoid::trivial(), 1) {
        Err(RefutationError::ExtensionFound { .. }) => {}
        Ok(_) => return Err("trivial monoid refuted".into()),
    }
    let elapsed = t.elapsed();
    if elapsed > Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{} law cases, Z/2 refuted, trivial monoid extends, {elapsed:.2?}", report.cases))
}

fn observable_divergence() -> Criterion {
    let s = sources()
        .into_iter()
        .find(|s| s.pragma("cbv-printed").is_some())
        .ok_or("no program declares its printed output")?;
    let mut seen = Vec::new();
    for (strategy, key, len) in [(Strategy::Cbv, "cbv-printed", 1), (Strategy::Cbn, "cbn-printed", 2)] {
        let want = s.pragma(key).ok_or(format!("missing {key}"))?.to_string();
        let t = translate_program(&s.program, strategy, Variant::Plus).map_err(|e| e.to_string())?;
        let m = eliminate_complex_values(&t.main);
        let out = machine::run(&m, &t.signature, &machine::Scheduler::First, FUEL).map_err(|e| e.to_string())?;
        let Outcome::Terminal { printed: MonoidElem::Text(got), .. } = &out else {
            return Err(format!("{strategy:?}: {}", out.render(&t.signature)));
        };
        if *got != want || got.chars().count() != len {
            return Err(format!("{strategy:?} printed {got:?}, expected {want:?}"));
        }
        seen.push(got.clone());
    }
    Ok(format!("{}: CBV prints {:?}, CBN prints {:?}", s.name, seen[0], seen[1]))
}

fn main() -> ExitCode {
    let progs = programs();
    let corpus_ok = progs.len() >= 40;
    let results: Vec<(&str, Criterion)> = vec![
        ("determinism and terminality", {
            let t = Instant::now();
            let r = if corpus_ok { determinism(&progs) } else { Err(format!("only {} programs", progs.len())) };
            match r {
                Ok(s) if t.elapsed() < Duration::from_secs(5) => Ok(format!("{s}, {:.2?}", t.elapsed())),
                Ok(_) => Err(format!("took {:?}", t.elapsed())),
                e => e,
            }
        }),
        ("strong normalization", normalization(&progs)),
        ("subject reduction", subject_reduction(&progs)),
        ("equational soundness", equational_soundness()),
        ("complex-value elimination", complex_value_elimination(&progs)),
        ("translation gates", translation_gates()),
        ("dependent Kleisli extensions", kleisli_results()),
        ("CBV/CBN observable difference", observable_divergence()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
