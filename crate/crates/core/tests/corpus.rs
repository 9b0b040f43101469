mod common;

use std::collections::HashSet;

use common::{corpus_dir, programs, sources};
use dcbpv::equality::eliminate_complex_values;
use dcbpv::laws::check_law_file;
use dcbpv::machine::{self, Outcome, Scheduler};
use dcbpv::model::DEFAULT_CAP;
use dcbpv::surface::{parse, print_program};
use dcbpv::syntax::{Effect, MonoidElem};
use dcbpv::translate::{translate_program, Strategy};
use dcbpv::typecheck::{check_program, Variant};

#[test]
fn corpus_is_large_enough() {
    assert!(programs().len() >= 40);
    assert!(sources().len() >= 9);
}

#[test]
fn every_program_checks_in_its_variant() {
    for p in programs() {
        check_program(&p.main, &p.ty, &p.opts(), &p.file.signature)
            .unwrap_or_else(|e| panic!("{}: {}", p.name, e.render()));
    }
}

#[test]
fn print_then_parse_is_identity() {
    for p in programs() {
        let text = print_program(&p.file.signature, &p.ty, &p.main);
        let back = parse(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", p.name));
        let main = back.main.unwrap();
        assert_eq!(main.ty, p.ty, "{}", p.name);
        assert_eq!(main.body, p.main, "{}", p.name);
        assert_eq!(back.signature, p.file.signature, "{}", p.name);
    }
}

#[test]
fn translations_print_and_reparse() {
    for s in sources() {
        for (strategy, variant) in [(Strategy::Cbv, Variant::Plus), (Strategy::Cbn, Variant::Plus)] {
            let t = translate_program(&s.program, strategy, variant).unwrap();
            let text = print_program(&t.signature, &t.ty, &t.main);
            let back = parse(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", s.name));
            assert_eq!(back.main.unwrap().body, t.main, "{}", s.name);
        }
    }
}

#[test]
fn choice_free_programs_ignore_the_scheduler() {
    for p in programs().iter().filter(|p| !p.main.effects_used().contains(&Effect::Choose)) {
        let m = eliminate_complex_values(&p.main);
        let sig = &p.file.signature;
        let first = machine::run(&m, sig, &Scheduler::First, 1_000).unwrap();
        let seeded = machine::run(&m, sig, &Scheduler::Seeded(99), 1_000).unwrap();
        assert_eq!(first, seeded, "{}", p.name);
        if p.terminating() {
            let all = machine::run_all(&m, sig, 1_000).unwrap();
            assert_eq!(all.len(), 1, "{}", p.name);
        }
    }
}

#[test]
fn every_scripted_run_is_among_all_outcomes() {
    for p in programs().iter().filter(|p| p.main.effects_used().contains(&Effect::Choose)) {
        let m = eliminate_complex_values(&p.main);
        let sig = &p.file.signature;
        let all = machine::run_all(&m, sig, 1_000).unwrap();
        assert!(!all.is_empty(), "{}", p.name);
        let keys: HashSet<String> = all.iter().map(|o| strip_steps(&o.render(sig))).collect();
        for script in [vec![1, 1, 1], vec![2, 2, 2], vec![1, 2, 1], vec![2, 1, 2]] {
            let Ok(o) = machine::run(&m, sig, &Scheduler::Fixed(script.clone()), 1_000) else { continue };
            assert!(keys.contains(&strip_steps(&o.render(sig))), "{} {script:?}", p.name);
        }
    }
}

fn strip_steps(line: &str) -> String {
    line.rsplit_once(" | ").map_or(line, |(head, _)| head).to_string()
}

#[test]
fn printing_only_grows() {
    for p in programs() {
        let m = eliminate_complex_values(&p.main);
        let sig = &p.file.signature;
        let (log, _) = machine::trace(&m, sig, &Scheduler::First, 500).unwrap();
        let mut prev = String::new();
        for step in &log {
            if let MonoidElem::Text(s) = &step.config.printed {
                assert!(s.starts_with(&prev), "{}: {prev:?} then {s:?}", p.name);
                prev = s.clone();
            }
        }
    }
}

#[test]
fn fuel_bounds_divergent_programs() {
    for p in programs().iter().filter(|p| !p.terminating() && p.name != "mu_exit") {
        let m = eliminate_complex_values(&p.main);
        let out = machine::run(&m, &p.file.signature, &Scheduler::First, 250).unwrap();
        assert!(matches!(out, Outcome::FuelExhausted { steps: 250, .. }), "{}", p.name);
    }
}

#[test]
fn error_laws_hold() {
    let text = std::fs::read_to_string(corpus_dir().join("laws/errors.dcbpv")).unwrap();
    let reports = check_law_file(&text, Variant::Plus, DEFAULT_CAP).unwrap();
    assert_eq!(reports.len(), 6);
    for r in reports {
        assert!(r.verdict.is_equal(), "{}: {}", r.name, r.verdict);
    }
}
