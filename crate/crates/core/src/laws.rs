//! Checking equations between terms: both sides are type-checked at the
//! stated type and then compared in a finite model.
//!
//! [`theory_source`] generates the equational theory of the calculus as law
//! declarations over a base type of a given size and a given number of
//! errors; [`check_theory`] sweeps it.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Model, ModelError, Verdict};
use crate::surface::{self, LawDef, LawSides, ParseError};
use crate::syntax::{Context, EffectSignature};
use crate::typecheck::{self, CheckOptions, TypeError, Variant};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LawError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("law `{law}`, {side}: {error}")]
    Type { law: String, side: &'static str, error: TypeError },
    #[error("law `{law}`: {error}")]
    Model { law: String, error: ModelError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawReport {
    pub name: String,
    pub verdict: Verdict,
}

impl LawReport {
    pub fn instantiations(&self) -> usize {
        match self.verdict {
            Verdict::Equal { environments } => environments,
            _ => 0,
        }
    }
}

/// Type-checks both sides of a law and compares them in `model`.
pub fn check_law(law: &LawDef, sig: &EffectSignature, variant: Variant, model: &Model) -> Result<LawReport, LawError> {
    let opts = CheckOptions::new(variant, sig);
    let ctx = Context::from_values(law.context.iter().map(|(_, a)| a.clone()).collect());
    let type_err = |side, error| LawError::Type { law: law.name.clone(), side, error };
    typecheck::wf_context(&ctx, &opts, sig).map_err(|e| type_err("context", e))?;
    let verdict = match &law.sides {
        LawSides::Comp { ty, lhs, rhs } => {
            typecheck::wf_ctype(&ctx, ty, &opts, sig).map_err(|e| type_err("type", e))?;
            typecheck::check_comp(&ctx, lhs, ty, &opts, sig).map_err(|e| type_err("left side", e))?;
            typecheck::check_comp(&ctx, rhs, ty, &opts, sig).map_err(|e| type_err("right side", e))?;
            model.check_equation(&ctx, lhs, rhs)
        }
        LawSides::Value { ty, lhs, rhs } => {
            typecheck::wf_vtype(&ctx, ty, &opts, sig).map_err(|e| type_err("type", e))?;
            typecheck::check_value(&ctx, lhs, ty, &opts, sig).map_err(|e| type_err("left side", e))?;
            typecheck::check_value(&ctx, rhs, ty, &opts, sig).map_err(|e| type_err("right side", e))?;
            model.check_value_equation(&ctx, lhs, rhs)
        }
    };
    let verdict = verdict.map_err(|error| LawError::Model { law: law.name.clone(), error })?;
    Ok(LawReport { name: law.name.clone(), verdict })
}

/// Parses a file of laws and checks each one in the exception model built
/// from the file's error set.
pub fn check_law_file(text: &str, variant: Variant, cap: usize) -> Result<Vec<LawReport>, LawError> {
    let prog = surface::parse(text)?;
    let errors: Vec<&str> = prog.signature.errors().iter().map(String::as_str).collect();
    let model = Model::exception(&errors).with_cap(cap);
    prog.laws.iter().map(|l| check_law(l, &prog.signature, variant, &model)).collect()
}

/// The equations, one law each. `A` is the base type and `B2` a two-point
/// type.
const THEORY: &str = r#"
law to_beta (v : A, f : U Pi y : A. F A) : F A =
  return v to x. x ' force f == v ' force f;
law to_eta (m : U F A) : F A =
  force m == force m to x. return x;
law force_thunk (v : A, f : U Pi y : A. F A) : F A =
  force thunk (v ' force f) == v ' force f;
law thunk_eta (u : U F A) : U F A =
  u == thunk force u;
law sum_beta (v : A, f : U Pi y : A. F A) : F A =
  pm ((1, v) : Sum(A, B2)) as { (1, x). x ' force f | (2, y). v ' force f }
  == v ' force f;
law sum_eta (v : Sum(A, B2), f : U Pi z : Sum(A, B2). F Unit) : F Unit =
  v ' force f == pm v as { (1, x). (1, x) ' force f | (2, y). (2, y) ' force f };
law unit_beta (m : U F A) : F A =
  pm () as (). force m == force m;
law unit_eta (u : Unit, f : U Pi z : Unit. F A) : F A =
  u ' force f == pm u as (). () ' force f;
law pair_beta (v : A, w : B2, f : U Pi x : A. Pi y : B2. F Unit) : F Unit =
  pm ((v, w) : Sigma x : A. B2) as (x, y). y ' x ' force f == w ' v ' force f;
law pair_eta (p : Sigma x : A. B2, f : U Pi z : (Sigma x : A. B2). F Unit) : F Unit =
  p ' force f == pm p as (x, y). (x, y) ' force f;
law id_beta (v : A, f : U Pi x : A. F A) : F A =
  pm refl v as refl x. x ' force f == v ' force f;
law id_eta (a : A, b : A, p : Id(A, a, b), f : U Pi x : A. Pi y : A. Pi q : Id(A, x, y). F Unit) : F Unit =
  p ' b ' a ' force f == pm p as refl w. (refl w) ' w ' w ' force f;
law prod_beta (m : U F A, n : U F Unit) : F Unit =
  2 ' lam { force m | force n } == force n;
law prod_eta (m : U Prod(F A, F Unit)) : Prod(F A, F Unit) =
  force m == lam { 1 ' force m | 2 ' force m };
law fun_beta (v : A, f : U Pi x : A. F A) : F A =
  v ' lam x : A. x ' force f == v ' force f;
law fun_eta (f : U Pi x : A. F A) : Pi x : A. F A =
  force f == lam x : A. x ' force f;
law let_beta (v : A, f : U Pi x : A. F A) : F A =
  let x = v in x ' force f == v ' force f;
law to_assoc (m : U F A, g : U Pi x : A. F B2, h : U Pi y : B2. F Unit) : F Unit =
  (force m to x. x ' force g) to y. y ' force h
  == force m to x. (x ' force g to y. y ' force h);
law to_lam_prod (m : U F A, g : U Pi x : A. F Unit, h : U Pi x : A. F Unit) : Prod(F Unit, F Unit) =
  force m to x. lam { x ' force g | x ' force h }
  == lam { force m to x. x ' force g | force m to x. x ' force h };
law to_lam_pi (m : U F A, g : U Pi x : A. Pi y : B2. F Unit) : Pi y : B2. F Unit =
  force m to x. lam y : B2. y ' x ' force g
  == lam y : B2. (force m to x. y ' x ' force g);
"#;

/// Number of equations in [`THEORY`].
pub const THEORY_SIZE: usize = 20;

/// The equational theory as a law file over a base type with `k` points
/// and `errors` distinct errors.
pub fn theory_source(k: usize, errors: usize) -> String {
    let mut s = String::new();
    let errs: Vec<String> = (1..=errors).map(|i| format!("e{i}")).collect();
    let _ = writeln!(s, "effects {{ errors {{ {} }}; enable error }}", errs.join(", "));
    let _ = writeln!(s, "type A = Sum({});", vec!["Unit"; k].join(", "));
    let _ = writeln!(s, "type B2 = Sum(Unit, Unit);");
    s.push_str(THEORY);
    s
}

/// One row of a theory sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryRow {
    pub name: String,
    pub base_size: usize,
    pub errors: usize,
    pub verdict: Verdict,
}

/// Checks every equation for base sizes `1..=max_k` and error counts
/// `0..=max_e`.
pub fn check_theory(max_k: usize, max_e: usize, cap: usize) -> Result<Vec<TheoryRow>, LawError> {
    let mut rows = Vec::new();
    for k in 1..=max_k {
        for e in 0..=max_e {
            for r in check_law_file(&theory_source(k, e), Variant::Plus, cap)? {
                rows.push(TheoryRow { name: r.name, base_size: k, errors: e, verdict: r.verdict });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theory_small() {
        let rows = check_theory(2, 1, crate::model::DEFAULT_CAP).unwrap();
        assert_eq!(rows.len(), THEORY_SIZE * 2 * 2);
        for r in &rows {
            assert!(r.verdict.is_equal(), "{} at k={} e={}: {}", r.name, r.base_size, r.errors, r.verdict);
        }
    }

    #[test]
    fn detects_inequality() {
        let src = "effects { errors { e }; enable error }\n\
                   law bad () : F Unit = (error e : F Unit) to x. return () == return ();";
        let r = check_law_file(src, Variant::Plus, 1000).unwrap();
        assert!(matches!(r[0].verdict, Verdict::Counterexample { .. }));
    }

    #[test]
    fn rejects_ill_typed_sides() {
        let src = "law bad (x : Unit) : F Unit = return x == return (1, x);";
        assert!(matches!(check_law_file(src, Variant::Plus, 1000), Err(LawError::Type { .. })));
    }
}
