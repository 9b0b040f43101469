mod common;

use proptest::prelude::*;

use common::gen::{closed_comp, closed_returner, open_comp, ERRORS};
use dcbpv::equality::{convertible, eliminate_complex_values, normalize, ConvOptions};
use dcbpv::machine::{self, matching_rows, terminal_kind, Outcome, Scheduler, StepResult, TerminalKind};
use dcbpv::model::{sem_eq, Elem, Model};
use dcbpv::surface::{parse_comp_in, print_comp};
use dcbpv::syntax::{Comp, Context, Effect, EffectSignature, Monoid, Term, VType, Value};
use dcbpv::typecheck::{check_comp, check_program, CheckOptions, Checker, Variant};

fn sig() -> EffectSignature {
    EffectSignature::new(
        Monoid::FreeText,
        vec!["s0".into()],
        0,
        ERRORS.iter().map(|e| e.to_string()).collect(),
        [Effect::Error],
    )
    .unwrap()
}

fn model() -> Model {
    Model::exception(&ERRORS)
}

fn bytes() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(any::<u8>(), 0..160)
}

fn opts(variant: Variant) -> CheckOptions {
    CheckOptions::new(variant, &sig())
}

fn model_eq(lhs: &Comp, rhs: &Comp) -> bool {
    model().check_equation(&Context::empty(), lhs, rhs).unwrap().is_equal()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_terms_check(b in bytes()) {
        let s = sig();
        let (ty, m) = closed_comp(&b, true);
        prop_assert!(check_program(&m, &ty, &opts(Variant::Minus), &s).is_ok(), "{}", print_comp(&m, 0));
        prop_assert!(check_program(&m, &ty, &opts(Variant::Plus), &s).is_ok());
    }

    #[test]
    fn open_terms_check(b in bytes()) {
        let s = sig();
        let (ctx, ty, m) = open_comp(&b);
        let ctx = Context::from_values(ctx);
        prop_assert!(check_comp(&ctx, &m, &ty, &opts(Variant::Minus), &s).is_ok(), "{}", print_comp(&m, ctx.len()));
    }

    #[test]
    fn print_parse_round_trip(b in bytes()) {
        let (_, m) = closed_comp(&b, true);
        let text = print_comp(&m, 0);
        let back = parse_comp_in(&text, &[], Some(&sig())).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back, m);
    }

    #[test]
    fn weaken_then_subst_is_identity(b in bytes(), k in 0usize..3) {
        let (_, _, m) = open_comp(&b);
        let v = Value::Var(k);
        prop_assert_eq!(m.weaken(1).subst(&v), m.clone());
        prop_assert_eq!(m.weaken(3).shift(0, -3).unwrap(), m);
    }

    #[test]
    fn substitution_commutes_with_weakening(b in bytes(), c in bytes()) {
        // (M[V/0])↑ = (M↑ above 0)[V↑/0]
        let (ctx, _, m) = open_comp(&b);
        let (_, v) = closed_comp(&c, false);
        let v = Value::thunk(v);
        let _ = ctx;
        let lhs = m.subst(&v).weaken(1);
        let rhs = m.weaken_above(1, 1).subst(&v.weaken(1));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn normalization_is_idempotent_and_sound(b in bytes()) {
        let conv = ConvOptions::default();
        let (_, m) = closed_comp(&b, true);
        let nf = normalize(&m, &conv).unwrap();
        prop_assert_eq!(normalize(&nf, &conv).unwrap(), nf.clone());
        prop_assert!(convertible(&m, &nf, &conv).unwrap());
        prop_assert!(model_eq(&m, &nf), "{} vs {}", print_comp(&m, 0), print_comp(&nf, 0));
    }

    #[test]
    fn complex_value_elimination(b in bytes()) {
        let (ty, m) = closed_comp(&b, true);
        let e = eliminate_complex_values(&m);
        prop_assert!(e.is_complex_free(), "{}", print_comp(&e, 0));
        prop_assert!(check_program(&e, &ty, &opts(Variant::Minus), &sig()).is_ok(), "{}", print_comp(&e, 0));
        prop_assert!(model_eq(&m, &e));
    }

    #[test]
    fn machine_agrees_with_model(b in bytes()) {
        let s = sig();
        let (_, m) = closed_returner(&b, true);
        let out = machine::run(&eliminate_complex_values(&m), &s, &Scheduler::First, 10_000).unwrap();
        let meaning = model().comp(&[], &m).unwrap();
        let Outcome::Terminal { kind, .. } = out else {
            return Err(TestCaseError::fail("pure programs terminate"));
        };
        match kind {
            TerminalKind::Returned(v) => {
                let v = model().value(&[], &v).unwrap();
                prop_assert!(sem_eq(&meaning, &Elem::Ret(Box::new(v))));
            }
            TerminalKind::ErrorHalt(e) => {
                prop_assert!(sem_eq(&meaning, &Elem::Err(e.clone())), "{meaning} vs error {e}");
            }
            other => return Err(TestCaseError::fail(format!("unexpected terminal {other:?}"))),
        }
    }

    #[test]
    fn machine_steps_preserve_types(b in bytes()) {
        let s = sig();
        let (ty, m) = closed_comp(&b, true);
        let mut cfg = machine::inject(&eliminate_complex_values(&m), &s).unwrap();
        let mut checker = Checker::new(&s, opts(Variant::Minus));
        for _ in 0..2_000 {
            checker.check_config(&cfg.comp, &cfg.stack, &ty)
                .map_err(|e| TestCaseError::fail(format!("{}: {}", cfg.render(&s), e.render())))?;
            let rows = matching_rows(&cfg);
            if terminal_kind(&cfg).is_some() {
                prop_assert!(rows.is_empty());
                return Ok(());
            }
            prop_assert_eq!(rows.len(), 1);
            match machine::step(&cfg, &s).unwrap() {
                StepResult::Stepped(_, next) => cfg = next,
                other => return Err(TestCaseError::fail(format!("unexpected {other:?}"))),
            }
        }
        prop_assert!(false, "no terminal configuration within 2000 steps");
    }

    #[test]
    fn thunk_force_laws_hold_in_the_model(b in bytes()) {
        let (_, m) = closed_comp(&b, true);
        let forced = Comp::Force(Value::thunk(m.clone()));
        prop_assert!(model_eq(&forced, &m));
        let seq = Comp::seq(m.clone(), Comp::Return(Value::Var(0)));
        if matches!(m, Comp::Return(_)) {
            prop_assert!(model_eq(&seq, &m));
        }
    }

    #[test]
    fn all_scheduler_outcomes_are_deterministic_without_choice(b in bytes()) {
        let s = sig();
        let (_, m) = closed_returner(&b, true);
        let outs = machine::run_all(&eliminate_complex_values(&m), &s, 10_000).unwrap();
        prop_assert_eq!(outs.len(), 1);
    }

    #[test]
    fn value_weakening_preserves_typing(b in bytes(), extra in 0usize..3) {
        let s = sig();
        let (ctx, ty, m) = open_comp(&b);
        let mut bigger: Vec<VType> = vec![VType::Unit; extra];
        bigger.extend(ctx.iter().cloned());
        let bigger = Context::from_values(bigger);
        let _ = &ctx;
        // The extra variables sit outermost, so indices are unchanged.
        prop_assert!(check_comp(&bigger, &m, &ty, &opts(Variant::Minus), &s).is_ok());
    }
}
