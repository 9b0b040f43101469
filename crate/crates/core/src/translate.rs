//! Call-by-value and call-by-name translations of the source language into
//! the kernel.
//!
//! Both translations run against an environment that says, for every source
//! variable, which kernel computation an occurrence becomes: `return v` for a
//! variable bound to a value, `force v` for one bound to a thunk. Under the
//! usual CBV reading term variables are values while the variables of a type
//! are thunks `z : U F A`, so `A^v[tr x/z]` is the type translated with the
//! variables read as values. The same mechanism instantiates motives.
//!
//! Sequencing motives are computed from a light type synthesis on source
//! terms; nothing is type-checked here, the kernel checker judges the output.

use serde::Serialize;
use thiserror::Error;

use crate::source::{SrcElim, SrcProgram, SrcTerm, SrcType};
use crate::surface::{ascribe, ParseError};
use crate::syntax::*;
use crate::typecheck::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Strategy {
    Cbv,
    Cbn,
}

impl Strategy {
    pub fn from_name(s: &str) -> Option<Strategy> {
        match s {
            "cbv" => Some(Strategy::Cbv),
            "cbn" => Some(Strategy::Cbn),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind")]
pub enum TranslateError {
    #[error("the call-by-value translation needs dependent sequencing; use the plus variant")]
    CbvNeedsPlus,
    #[error("a dependent eliminator needs dependent sequencing under call-by-name; use the plus variant")]
    DependentElimNeedsPlus,
    #[error("parse error: {0}")]
    Parse(#[serde(skip)] ParseError),
}

impl From<ParseError> for TranslateError {
    fn from(e: ParseError) -> Self {
        TranslateError::Parse(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Occ {
    /// An occurrence is `return v`.
    Ret(Value),
    /// An occurrence is `force v`.
    Force(Value),
}

#[derive(Debug, Clone)]
struct Entry {
    occ: Occ,
    /// Kernel binder depth at which `occ` is valid.
    depth: usize,
    /// Source type, valid in the source context before this entry.
    ty: Option<SrcType>,
}

#[derive(Debug, Clone, Default)]
struct Env {
    entries: Vec<Entry>,
    depth: usize,
}

impl Env {
    /// A context of `n` free variables, all read the same way.
    fn free(n: usize, thunks: bool) -> Env {
        let mut env = Env::default();
        for _ in 0..n {
            env = if thunks { env.thunk(None) } else { env.val(None) };
        }
        env
    }

    /// A kernel binder with no source counterpart.
    fn bind(&self) -> Env {
        Env { entries: self.entries.clone(), depth: self.depth + 1 }
    }

    /// A source variable read through `occ`, without a new kernel binder.
    fn push(&self, occ: Occ, ty: Option<SrcType>) -> Env {
        let mut e = self.clone();
        e.entries.push(Entry { occ, depth: self.depth, ty });
        e
    }

    fn val(&self, ty: Option<SrcType>) -> Env {
        self.bind().push(Occ::Ret(Value::Var(0)), ty)
    }

    fn thunk(&self, ty: Option<SrcType>) -> Env {
        self.bind().push(Occ::Force(Value::Var(0)), ty)
    }

    fn lookup(&self, i: usize) -> Comp {
        let e = &self.entries[self.entries.len() - 1 - i];
        let lift = |v: &Value| v.weaken(self.depth - e.depth);
        match &e.occ {
            Occ::Ret(v) => Comp::Return(lift(v)),
            Occ::Force(v) => Comp::Force(lift(v)),
        }
    }

    fn type_of(&self, i: usize) -> Option<SrcType> {
        let e = self.entries.get(self.entries.len().checked_sub(1 + i)?)?;
        e.ty.as_ref().map(|t| t.shift(0, i + 1))
    }
}

// ---------------------------------------------------------------------------
// Type synthesis on source terms
// ---------------------------------------------------------------------------

fn synth(env: &Env, m: &SrcTerm) -> Option<SrcType> {
    match m {
        SrcTerm::Var(i) => env.type_of(*i),
        SrcTerm::Let(m, n) => {
            let a = synth(env, m);
            synth(&env.push(Occ::Ret(Value::Unit), a), n).map(|b| b.subst(m))
        }
        SrcTerm::Inj(..) | SrcTerm::Diverge | SrcTerm::Error(_) => None,
        SrcTerm::Tuple(ms) => ms.iter().map(|m| synth(env, m)).collect::<Option<_>>().map(SrcType::Prod),
        SrcTerm::Proj(i, n) => match synth(env, n)? {
            SrcType::Prod(mut ts) if *i < ts.len() => Some(ts.swap_remove(*i)),
            _ => None,
        },
        SrcTerm::Lam(a, body) => {
            let b = synth(&env.push(Occ::Ret(Value::Unit), Some((**a).clone())), body)?;
            Some(SrcType::Pi(a.clone(), Box::new(b)))
        }
        SrcTerm::App(arg, f) => match synth(env, f)? {
            SrcType::Pi(_, b) => Some(b.subst(arg)),
            _ => None,
        },
        SrcTerm::Unit => Some(SrcType::Unit),
        SrcTerm::Pair(m, n) => {
            let a = synth(env, m)?;
            let b = synth(env, n)?;
            Some(SrcType::Sigma(Box::new(a), Box::new(b.shift(0, 1))))
        }
        SrcTerm::Refl(m) => {
            let a = synth(env, m)?;
            Some(SrcType::Id(Box::new(a), m.clone(), m.clone()))
        }
        SrcTerm::Elim(e) => synth_elim(env, e),
        SrcTerm::Mu(a, _) | SrcTerm::Ascribe(_, a) => Some((**a).clone()),
        SrcTerm::Print(_, m) | SrcTerm::Write(_, m) => synth(env, m),
        SrcTerm::Choose(ms) => ms.iter().find_map(|m| synth(env, m)),
        SrcTerm::Read(arms) => arms.iter().find_map(|(_, m)| synth(env, m)),
    }
}

fn scrutinee_type(env: &Env, e: &SrcElim) -> Option<SrcType> {
    e.annotation.clone().or_else(|| synth(env, &e.scrutinee))
}

/// Types of the pattern's binders, outermost first.
fn arm_binder_types(env: &Env, e: &SrcElim, arm: usize) -> Vec<Option<SrcType>> {
    let st = scrutinee_type(env, e);
    match (&e.pattern, st) {
        (Pattern::Unit(_), _) => vec![],
        (Pattern::Sum(_), Some(SrcType::Sum(ts))) => vec![ts.get(arm).cloned()],
        (Pattern::Sum(_), _) => vec![None],
        (Pattern::Pair(_), Some(SrcType::Sigma(a, b))) => vec![Some(*a), Some(*b)],
        (Pattern::Pair(_), _) => vec![None, None],
        (Pattern::Id(_), Some(SrcType::Id(a, ..))) => vec![Some(*a)],
        (Pattern::Id(_), _) => vec![None],
    }
}

fn id_endpoints(env: &Env, e: &SrcElim) -> Option<(SrcType, SrcTerm, SrcTerm)> {
    match scrutinee_type(env, e)? {
        SrcType::Id(a, l, r) => Some((*a, *l, *r)),
        _ => None,
    }
}

fn synth_elim(env: &Env, e: &SrcElim) -> Option<SrcType> {
    if let Some(c) = &e.motive {
        return match &e.pattern {
            Pattern::Id(_) => {
                let (_, l, r) = id_endpoints(env, e)?;
                Some(c.subst_many(&[e.scrutinee.clone(), r, l]))
            }
            _ => Some(c.subst(&e.scrutinee)),
        };
    }
    let arms: Vec<&SrcTerm> = match &e.pattern {
        Pattern::Unit(n) | Pattern::Pair(n) | Pattern::Id(n) => vec![n],
        Pattern::Sum(ns) => ns.iter().collect(),
    };
    arms.iter().enumerate().find_map(|(i, n)| {
        let tys = arm_binder_types(env, e, i);
        let k = tys.len();
        let mut inner = env.clone();
        for t in tys {
            inner = inner.push(Occ::Ret(Value::Unit), t);
        }
        synth(&inner, n)?.strengthen(k)
    })
}

// ---------------------------------------------------------------------------
// Call-by-value
// ---------------------------------------------------------------------------

fn shifted(t: &Option<SrcType>, by: usize) -> Option<SrcType> {
    t.as_ref().map(|t| t.shift(0, by))
}

fn tr(v: Value) -> Value {
    Value::tr(v)
}

fn seq(head: Comp, body: Comp, motive: Option<CType>) -> Comp {
    Comp::SeqTo { head: Box::new(head), body: Box::new(body), motive: motive.map(|r| Box::new(Motive::new(r))) }
}

fn pm(scrutinee: Value, motive: Option<CType>, pattern: Pattern<Comp>) -> Comp {
    Comp::Match(Box::new(Match { scrutinee, motive: motive.map(Motive::new), pattern }))
}

fn ty_v(env: &Env, a: &SrcType) -> VType {
    match a {
        SrcType::Unit => VType::Unit,
        SrcType::Sum(ts) => VType::Sum(ts.iter().map(|t| ty_v(env, t)).collect()),
        SrcType::Prod(ts) => VType::u(CType::Prod(ts.iter().map(|t| CType::f(ty_v(env, t))).collect())),
        SrcType::Pi(a, b) => {
            let dom = ty_v(env, a);
            let cod = CType::f(ty_v(&env.val(Some((**a).clone())), b));
            VType::u(CType::pi(dom, cod))
        }
        SrcType::Sigma(a, b) => VType::sigma(ty_v(env, a), ty_v(&env.val(Some((**a).clone())), b)),
        SrcType::Id(a, l, r) => VType::id(
            VType::u(CType::f(ty_v(env, a))),
            Value::thunk(tm_v(env, l)),
            Value::thunk(tm_v(env, r)),
        ),
    }
}

/// Motive of a CBV sequencing whose result has source type `c`, where the
/// source variable at index 0 of `c` is the sequenced term.
fn cbv_seq_motive(env: &Env, c: &SrcType, ty: Option<SrcType>) -> Option<CType> {
    c.mentions(0).then(|| CType::f(ty_v(&env.thunk(ty), c)))
}

fn tm_v(env: &Env, m: &SrcTerm) -> Comp {
    match m {
        SrcTerm::Var(i) => env.lookup(*i),
        SrcTerm::Let(m1, n) => {
            let a = synth(env, m1);
            let motive = synth(&env.push(Occ::Ret(Value::Unit), a.clone()), n)
                .and_then(|b| cbv_seq_motive(env, &b, a.clone()));
            seq(tm_v(env, m1), tm_v(&env.val(a), n), motive)
        }
        SrcTerm::Inj(i, m1) => seq(tm_v(env, m1), Comp::Return(Value::inj(*i, Value::Var(0))), None),
        SrcTerm::Tuple(ms) => {
            Comp::Return(Value::thunk(Comp::LambdaProd(ms.iter().map(|m| tm_v(env, m)).collect())))
        }
        SrcTerm::Proj(i, n) => seq(tm_v(env, n), Comp::proj(*i, Comp::Force(Value::Var(0))), None),
        SrcTerm::Lam(a, body) => Comp::Return(Value::thunk(Comp::lam(
            ty_v(env, a),
            tm_v(&env.val(Some((**a).clone())), body),
        ))),
        SrcTerm::App(arg, f) => {
            let motive = match synth(env, f) {
                Some(SrcType::Pi(a, b)) => cbv_seq_motive(env, &b, Some(*a)),
                _ => None,
            };
            let inner = seq(
                tm_v(&env.bind(), f),
                Comp::apply(Value::Var(1), Comp::Force(Value::Var(0))),
                None,
            );
            seq(tm_v(env, arg), inner, motive)
        }
        SrcTerm::Unit => Comp::Return(Value::Unit),
        SrcTerm::Pair(m1, n) => {
            let inner = seq(tm_v(&env.bind(), n), Comp::Return(Value::pair(Value::Var(1), Value::Var(0))), None);
            seq(tm_v(env, m1), inner, None)
        }
        SrcTerm::Refl(m1) => {
            let motive = synth(env, m1).map(|a| {
                let a = ty_v(env, &a).weaken(1);
                CType::f(VType::id(VType::u(CType::f(a)), Value::Var(0), Value::Var(0)))
            });
            seq(tm_v(env, m1), Comp::Return(Value::refl(tr(Value::Var(0)))), motive)
        }
        SrcTerm::Elim(e) => elim_v(env, e),
        SrcTerm::Mu(a, body) => {
            let z = env.bind();
            let inner = seq(Comp::Force(Value::Var(0)), tm_v(&z.val(Some((**a).clone())), body), None);
            Comp::Mu(Box::new(inner))
        }
        SrcTerm::Ascribe(m1, a) => ascribe(tm_v(env, m1), CType::f(ty_v(env, a))),
        SrcTerm::Diverge => Comp::Diverge,
        SrcTerm::Error(e) => Comp::Error(e.clone()),
        SrcTerm::Print(t, m1) => Comp::Print(t.clone(), Box::new(tm_v(env, m1))),
        SrcTerm::Choose(ms) => Comp::Choose(ms.iter().map(|m| tm_v(env, m)).collect()),
        SrcTerm::Write(s, m1) => Comp::Write(s.clone(), Box::new(tm_v(env, m1))),
        SrcTerm::Read(arms) => Comp::Read(
            arms.iter().map(|(s, m)| ReadArm { state: s.clone(), body: tm_v(env, m) }).collect(),
        ),
    }
}

/// Extends `env` with the pattern binders of arm `arm`, read as values
/// behind one fresh kernel binder for the scrutinee.
fn arm_env_values(env: &Env, e: &SrcElim, arm: usize) -> Env {
    let mut inner = env.bind();
    for t in arm_binder_types(env, e, arm) {
        inner = inner.val(t);
    }
    inner
}

fn elim_v(env: &Env, e: &SrcElim) -> Comp {
    let st = scrutinee_type(env, e);
    let z = env.bind();
    let head = tm_v(env, &e.scrutinee);
    match &e.pattern {
        Pattern::Id(n) => {
            let a = match &st {
                Some(SrcType::Id(a, ..)) => Some((**a).clone()),
                _ => None,
            };
            // pm z as refl y. (force y to x. N)
            let inner_env = z.bind();
            let body_env = inner_env.val(a.clone());
            let (pm_motive, inner_motive, outer_motive) = match &e.motive {
                Some(c) => {
                    let pm_env = z.thunk(a.clone()).thunk(shifted(&a, 1)).val(None);
                    let w_env = inner_env
                        .bind()
                        .push(Occ::Force(Value::Var(0)), a.clone())
                        .push(Occ::Force(Value::Var(0)), shifted(&a, 1))
                        .push(Occ::Ret(Value::refl(Value::Var(0))), None);
                    let outer = id_endpoints(env, e).map(|(_, l, r)| {
                        let w = env.bind();
                        let l = Value::thunk(tm_v(env, &l)).weaken(1);
                        let r = Value::thunk(tm_v(env, &r)).weaken(1);
                        let w_env = w
                            .push(Occ::Force(l), a.clone())
                            .push(Occ::Force(r), shifted(&a, 1))
                            .push(Occ::Force(Value::Var(0)), shifted(&st, 2));
                        CType::f(ty_v(&w_env, c))
                    });
                    (Some(CType::f(ty_v(&pm_env, c))), Some(CType::f(ty_v(&w_env, c))), outer)
                }
                None => (None, None, None),
            };
            let branch = seq(Comp::Force(Value::Var(0)), tm_v(&body_env, n), inner_motive);
            seq(head, pm(Value::Var(0), pm_motive, Pattern::Id(branch)), outer_motive)
        }
        _ => {
            let pattern = match &e.pattern {
                Pattern::Unit(n) => Pattern::Unit(tm_v(&arm_env_values(env, e, 0), n)),
                Pattern::Sum(ns) => Pattern::Sum(
                    ns.iter().enumerate().map(|(i, n)| tm_v(&arm_env_values(env, e, i), n)).collect(),
                ),
                Pattern::Pair(n) => Pattern::Pair(tm_v(&arm_env_values(env, e, 0), n)),
                Pattern::Id(_) => unreachable!(),
            };
            let (pm_motive, outer) = match &e.motive {
                Some(c) => (
                    Some(CType::f(ty_v(&z.val(st.clone()), c))),
                    cbv_seq_motive(env, c, st.clone()),
                ),
                None => (None, None),
            };
            seq(head, pm(Value::Var(0), pm_motive, pattern), outer)
        }
    }
}

// ---------------------------------------------------------------------------
// Call-by-name
// ---------------------------------------------------------------------------

fn ty_n(env: &Env, b: &SrcType) -> CType {
    let u = |env: &Env, t: &SrcType| VType::u(ty_n(env, t));
    match b {
        SrcType::Unit => CType::f(VType::Unit),
        SrcType::Sum(ts) => CType::f(VType::Sum(ts.iter().map(|t| u(env, t)).collect())),
        SrcType::Prod(ts) => CType::Prod(ts.iter().map(|t| ty_n(env, t)).collect()),
        SrcType::Pi(a, b2) => CType::pi(u(env, a), ty_n(&env.thunk(Some((**a).clone())), b2)),
        SrcType::Sigma(a, b2) => {
            CType::f(VType::sigma(u(env, a), u(&env.thunk(Some((**a).clone())), b2)))
        }
        SrcType::Id(a, l, r) => CType::f(VType::id(
            u(env, a),
            Value::thunk(tm_n(env, l)),
            Value::thunk(tm_n(env, r)),
        )),
    }
}

fn cbn_seq_motive(env: &Env, c: &SrcType, ty: Option<SrcType>) -> Option<CType> {
    c.mentions(0).then(|| ty_n(&env.thunk(ty), c))
}

fn tm_n(env: &Env, m: &SrcTerm) -> Comp {
    let th = |env: &Env, m: &SrcTerm| Value::thunk(tm_n(env, m));
    match m {
        SrcTerm::Var(i) => env.lookup(*i),
        SrcTerm::Let(m1, n) => Comp::let_in(th(env, m1), tm_n(&env.thunk(synth(env, m1)), n)),
        SrcTerm::Inj(i, m1) => Comp::Return(Value::inj(*i, th(env, m1))),
        SrcTerm::Tuple(ms) => Comp::LambdaProd(ms.iter().map(|m| tm_n(env, m)).collect()),
        SrcTerm::Proj(i, n) => Comp::proj(*i, tm_n(env, n)),
        SrcTerm::Lam(a, body) => Comp::lam(VType::u(ty_n(env, a)), tm_n(&env.thunk(Some((**a).clone())), body)),
        SrcTerm::App(arg, f) => Comp::apply(th(env, arg), tm_n(env, f)),
        SrcTerm::Unit => Comp::Return(Value::Unit),
        SrcTerm::Pair(m1, n) => Comp::Return(Value::pair(th(env, m1), th(env, n))),
        SrcTerm::Refl(m1) => Comp::Return(Value::refl(th(env, m1))),
        SrcTerm::Elim(e) => elim_n(env, e),
        SrcTerm::Mu(a, body) => Comp::Mu(Box::new(tm_n(&env.thunk(Some((**a).clone())), body))),
        SrcTerm::Ascribe(m1, a) => ascribe(tm_n(env, m1), ty_n(env, a)),
        SrcTerm::Diverge => Comp::Diverge,
        SrcTerm::Error(e) => Comp::Error(e.clone()),
        SrcTerm::Print(t, m1) => Comp::Print(t.clone(), Box::new(tm_n(env, m1))),
        SrcTerm::Choose(ms) => Comp::Choose(ms.iter().map(|m| tm_n(env, m)).collect()),
        SrcTerm::Write(s, m1) => Comp::Write(s.clone(), Box::new(tm_n(env, m1))),
        SrcTerm::Read(arms) => Comp::Read(
            arms.iter().map(|(s, m)| ReadArm { state: s.clone(), body: tm_n(env, m) }).collect(),
        ),
    }
}

fn arm_env_thunks(env: &Env, e: &SrcElim, arm: usize) -> Env {
    let mut inner = env.bind();
    for t in arm_binder_types(env, e, arm) {
        inner = inner.thunk(t);
    }
    inner
}

fn elim_n(env: &Env, e: &SrcElim) -> Comp {
    let st = scrutinee_type(env, e);
    let z = env.bind();
    let head = tm_n(env, &e.scrutinee);
    let pattern = match &e.pattern {
        Pattern::Unit(n) => Pattern::Unit(tm_n(&arm_env_thunks(env, e, 0), n)),
        Pattern::Sum(ns) => {
            Pattern::Sum(ns.iter().enumerate().map(|(i, n)| tm_n(&arm_env_thunks(env, e, i), n)).collect())
        }
        Pattern::Pair(n) => Pattern::Pair(tm_n(&arm_env_thunks(env, e, 0), n)),
        Pattern::Id(n) => Pattern::Id(tm_n(&arm_env_thunks(env, e, 0), n)),
    };
    let (pm_motive, outer) = match (&e.motive, &e.pattern) {
        (None, _) => (None, None),
        (Some(c), Pattern::Id(_)) => {
            let a = match &st {
                Some(SrcType::Id(a, ..)) => Some((**a).clone()),
                _ => None,
            };
            let pm_env = z.thunk(a.clone()).thunk(shifted(&a, 1)).val(None);
            let outer = id_endpoints(env, e).map(|(_, l, r)| {
                let l = Value::thunk(tm_n(env, &l)).weaken(1);
                let r = Value::thunk(tm_n(env, &r)).weaken(1);
                let w_env = env
                    .bind()
                    .push(Occ::Force(l), a.clone())
                    .push(Occ::Force(r), shifted(&a, 1))
                    .push(Occ::Force(Value::Var(0)), shifted(&st, 2));
                ty_n(&w_env, c)
            });
            (Some(ty_n(&pm_env, c)), outer)
        }
        (Some(c), _) => (Some(ty_n(&z.val(st.clone()), c)), cbn_seq_motive(env, c, st.clone())),
    };
    seq(head, pm(Value::Var(0), pm_motive, pattern), outer)
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// `A^v` for a type whose free variables are thunks `z : U F A`.
pub fn cbv_translate_type(a: &SrcType) -> VType {
    ty_v(&Env::free(max_free_type(a), true), a)
}

/// `A^v[tr x/z]`: the translated type with its free variables read as values.
pub fn cbv_translate_type_at_values(a: &SrcType) -> VType {
    ty_v(&Env::free(max_free_type(a), false), a)
}

pub fn cbv_translate_term(m: &SrcTerm) -> Comp {
    tm_v(&Env::free(max_free(m), false), m)
}

pub fn cbn_translate_type(b: &SrcType) -> CType {
    ty_n(&Env::free(max_free_type(b), true), b)
}

pub fn cbn_translate_term(m: &SrcTerm) -> Comp {
    tm_n(&Env::free(max_free(m), true), m)
}

fn max_free(m: &SrcTerm) -> usize {
    m.free_vars().last().map_or(0, |i| i + 1)
}

fn max_free_type(a: &SrcType) -> usize {
    let mut n = 0;
    a.visit(&mut |t| n = n.max(max_free(t)));
    n
}

/// Output of a translation: a kernel program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translated {
    pub signature: EffectSignature,
    pub ty: CType,
    pub main: Comp,
}

pub fn translate_program(
    p: &SrcProgram,
    strategy: Strategy,
    variant: Variant,
) -> Result<Translated, TranslateError> {
    match (strategy, variant) {
        (Strategy::Cbv, Variant::Minus) => Err(TranslateError::CbvNeedsPlus),
        (Strategy::Cbn, Variant::Minus) if p.main.has_dependent_elim() => {
            Err(TranslateError::DependentElimNeedsPlus)
        }
        (Strategy::Cbv, Variant::Plus) => Ok(Translated {
            signature: p.signature.clone(),
            ty: CType::f(ty_v(&Env::default(), &p.ty)),
            main: tm_v(&Env::default(), &p.main),
        }),
        (Strategy::Cbn, _) => Ok(Translated {
            signature: p.signature.clone(),
            ty: ty_n(&Env::default(), &p.ty),
            main: tm_n(&Env::default(), &p.main),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{parse_src_program, parse_src_term};
    use crate::surface::{parse_comp, parse_comp_in};

    fn v(src: &str) -> Comp {
        cbv_translate_term(&parse_src_term(src).unwrap())
    }

    fn n(src: &str) -> Comp {
        cbn_translate_term(&parse_src_term(src).unwrap())
    }

    #[test]
    fn cbv_rows() {
        assert_eq!(cbv_translate_term(&SrcTerm::Var(0)), Comp::Return(Value::Var(0)));
        assert_eq!(
            v("lam x : Unit. x"),
            parse_comp("return thunk (lam x : Unit. return x)").unwrap()
        );
        let m = cbv_translate_term(&SrcTerm::Refl(Box::new(SrcTerm::Var(0))));
        let Comp::SeqTo { head, body, .. } = m else { panic!() };
        assert_eq!(*head, Comp::Return(Value::Var(0)));
        assert_eq!(*body, Comp::Return(Value::refl(Value::tr(Value::Var(0)))));
    }

    #[test]
    fn cbn_rows() {
        assert_eq!(cbn_translate_term(&SrcTerm::Var(0)), Comp::Force(Value::Var(0)));
        let names = vec!["m".to_string(), "k".to_string()];
        let pair = SrcTerm::Pair(Box::new(SrcTerm::Var(1)), Box::new(SrcTerm::Var(0)));
        assert_eq!(
            cbn_translate_term(&pair),
            parse_comp_in("return (thunk force m, thunk force k)", &names, None).unwrap()
        );
        let app = SrcTerm::App(Box::new(SrcTerm::Var(1)), Box::new(SrcTerm::Var(0)));
        assert_eq!(
            cbn_translate_term(&app),
            parse_comp_in("(thunk force m) ' force k", &names, None).unwrap()
        );
        assert_eq!(n("()"), Comp::Return(Value::Unit));
    }

    #[test]
    fn gates() {
        let weak = parse_src_program("main : Unit = pm () as (). ();").unwrap();
        let dep = parse_src_program("main : Unit = pm () as[u. Unit] (). ();").unwrap();
        assert_eq!(translate_program(&weak, Strategy::Cbv, Variant::Minus), Err(TranslateError::CbvNeedsPlus));
        assert!(translate_program(&weak, Strategy::Cbv, Variant::Plus).is_ok());
        assert!(translate_program(&weak, Strategy::Cbn, Variant::Minus).is_ok());
        assert_eq!(
            translate_program(&dep, Strategy::Cbn, Variant::Minus),
            Err(TranslateError::DependentElimNeedsPlus)
        );
        assert!(translate_program(&dep, Strategy::Cbn, Variant::Plus).is_ok());
    }

    #[test]
    fn types() {
        let t = crate::source::parse_src_type("Pi x : Unit. Unit").unwrap();
        assert_eq!(cbv_translate_type(&t), VType::u(CType::pi(VType::Unit, CType::f(VType::Unit))));
        assert_eq!(
            cbn_translate_type(&t),
            CType::pi(VType::u(CType::f(VType::Unit)), CType::f(VType::Unit))
        );
    }
}

