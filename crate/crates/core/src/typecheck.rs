//! Bidirectional type checker for dCBPV- and dCBPV+, with effect rules,
//! stack typing and configuration typing.
//!
//! Introduction forms check; variables, `force`, projections, application and
//! annotated eliminators infer. A few further forms infer when their parts
//! do (`return`, thunks, non-dependent pairs, `refl`, λ with its annotated
//! domain, and the effect operations with at least one inferable branch).
//! A match on a constructor whose type cannot be inferred, such as
//! `pm (1, V) as { .. }`, is typed through its β-reduct, and so are
//! `i ' lam { .. }`, `V ' lam x : A. N` and `force thunk M` in checking mode, and `let x = V in N` by `N[V/x]` when
//! `V` does not infer.
//!
//! In dCBPV+ with shrinking enabled, a failed check of a computation against
//! an expected type falls back to comparing the inferred type with
//! [`shrink_check`](crate::equality::shrink_check): the expected type may
//! unfold effects in its thunks until it matches.

use serde::Serialize;
use thiserror::Error;

use crate::equality::{convertible, match_redex, normalize, shrink_check, shrink_reachable, ConvOptions, Convertible, EqualityError};
use crate::surface::{print_ctype, print_vtype};
use crate::syntax::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Minus,
    Plus,
}

impl Variant {
    pub fn from_name(s: &str) -> Option<Variant> {
        match s {
            "minus" => Some(Variant::Minus),
            "plus" => Some(Variant::Plus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub variant: Variant,
    /// Only consulted in dCBPV+.
    pub allow_shrink: bool,
    pub conv: ConvOptions,
}

impl CheckOptions {
    /// Shrinking is on by default whenever some effect is enabled.
    pub fn new(variant: Variant, sig: &EffectSignature) -> Self {
        CheckOptions { variant, allow_shrink: !sig.enabled.is_empty(), conv: ConvOptions::default() }
    }

    pub fn minus() -> Self {
        CheckOptions { variant: Variant::Minus, allow_shrink: false, conv: ConvOptions::default() }
    }

    pub fn plus() -> Self {
        CheckOptions { variant: Variant::Plus, allow_shrink: true, conv: ConvOptions::default() }
    }

    fn shrinking(&self) -> bool {
        self.variant == Variant::Plus && self.allow_shrink
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum TypeErrorKind {
    UnboundVariable { index: usize },
    Mismatch { expected: String, found: String },
    NotAFunction { found: String },
    NotASum { found: String },
    MotiveRequired,
    DependentSeqInMinus,
    EffectDisabled { effect: String },
    ArityMismatch { expected: usize, found: usize },
    ShrinkFailed { expected: String, found: String },
    FuelExhausted,
}

impl TypeErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            TypeErrorKind::UnboundVariable { .. } => "UnboundVariable",
            TypeErrorKind::Mismatch { .. } => "Mismatch",
            TypeErrorKind::NotAFunction { .. } => "NotAFunction",
            TypeErrorKind::NotASum { .. } => "NotASum",
            TypeErrorKind::MotiveRequired => "MotiveRequired",
            TypeErrorKind::DependentSeqInMinus => "DependentSeqInMinus",
            TypeErrorKind::EffectDisabled { .. } => "EffectDisabled",
            TypeErrorKind::ArityMismatch { .. } => "ArityMismatch",
            TypeErrorKind::ShrinkFailed { .. } => "ShrinkFailed",
            TypeErrorKind::FuelExhausted => "FuelExhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{}", self.render())]
pub struct TypeError {
    #[serde(flatten)]
    pub kind: TypeErrorKind,
    /// Locator of the offending subterm, outermost first.
    pub path: Vec<String>,
    pub message: String,
}

impl TypeError {
    pub fn path_string(&self) -> String {
        if self.path.is_empty() {
            "<root>".into()
        } else {
            self.path.join(".")
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} at {}: {}", self.kind.name(), self.path_string(), self.message);
        match &self.kind {
            TypeErrorKind::Mismatch { expected, found }
            | TypeErrorKind::ShrinkFailed { expected, found } => {
                out.push_str(&format!("\n  expected: {expected}\n  found:    {found}"));
            }
            _ => {}
        }
        out
    }
}

type TResult<T> = Result<T, TypeError>;

/// The type checker proper; holds the signature, options and the current
/// subterm path.
pub struct Checker<'a> {
    pub sig: &'a EffectSignature,
    pub opts: CheckOptions,
    path: Vec<String>,
}

/// Instantiates a sequencing motive `B` (over `z`) at `tr x` for a fresh `x`.
pub fn seq_motive_at_return(b: &CType) -> CType {
    b.weaken_above(1, 1).subst_many(&[Value::tr(Value::Var(0))])
}

/// Instantiates a pattern motive for the arm bound at position `arm`.
pub fn motive_for_arm<T: Term>(b: &T, pattern_kind: &Pattern<()>, arm: usize) -> T {
    match pattern_kind {
        Pattern::Unit(()) => b.subst(&Value::Unit),
        Pattern::Sum(_) => b.weaken_above(1, 1).subst_many(&[Value::inj(arm, Value::Var(0))]),
        Pattern::Pair(()) => {
            b.weaken_above(1, 2).subst_many(&[Value::pair(Value::Var(1), Value::Var(0))])
        }
        Pattern::Id(()) => b
            .weaken_above(3, 1)
            .subst_many(&[Value::refl(Value::Var(0)), Value::Var(0), Value::Var(0)]),
    }
}

fn pattern_shape<R>(p: &Pattern<R>) -> Pattern<()> {
    p.try_map::<(), ()>(|_, _| Ok(())).expect("infallible")
}

fn show_v(a: &VType, ctx: &Context) -> String {
    print_vtype(a, ctx.len())
}

fn show_c(b: &CType, ctx: &Context) -> String {
    print_ctype(b, ctx.len())
}

/// What a scrutinee must look like for each pattern.
enum ScrutineeType {
    Unit,
    Sum(Vec<VType>),
    Sigma(VType, VType),
    Id(VType, Value, Value),
}

impl<'a> Checker<'a> {
    pub fn new(sig: &'a EffectSignature, opts: CheckOptions) -> Self {
        Checker { sig, opts, path: Vec::new() }
    }

    fn err(&self, kind: TypeErrorKind, message: impl Into<String>) -> TypeError {
        TypeError { kind, path: self.path.clone(), message: message.into() }
    }

    fn at<T>(&mut self, seg: impl Into<String>, f: impl FnOnce(&mut Self) -> TResult<T>) -> TResult<T> {
        self.path.push(seg.into());
        let r = f(self);
        self.path.pop();
        r
    }

    fn eq_err(&self, e: EqualityError) -> TypeError {
        self.err(TypeErrorKind::FuelExhausted, e.to_string())
    }

    fn conv<T: Convertible>(&self, a: &T, b: &T) -> TResult<bool> {
        convertible(a, b, &self.opts.conv).map_err(|e| self.eq_err(e))
    }

    fn mismatch_c(&self, ctx: &Context, expected: &CType, found: &CType) -> TypeError {
        self.err(
            TypeErrorKind::Mismatch { expected: show_c(expected, ctx), found: show_c(found, ctx) },
            "computation types are not equal",
        )
    }

    fn mismatch_v(&self, ctx: &Context, expected: &VType, found: &VType) -> TypeError {
        self.err(
            TypeErrorKind::Mismatch { expected: show_v(expected, ctx), found: show_v(found, ctx) },
            "value types are not equal",
        )
    }

    fn shape_err(&self, expected: &str, found: String) -> TypeError {
        self.err(
            TypeErrorKind::Mismatch { expected: expected.to_string(), found },
            format!("expected a type of the form {expected}"),
        )
    }

    fn need_effect(&self, e: Effect) -> TResult<()> {
        if self.sig.is_enabled(e) {
            Ok(())
        } else {
            Err(self.err(
                TypeErrorKind::EffectDisabled { effect: e.name().to_string() },
                format!("effect `{}` is not enabled", e.name()),
            ))
        }
    }

    /// Compares an inferred computation type with the expected one.
    fn subsume(&self, ctx: &Context, found: &CType, expected: &CType) -> TResult<()> {
        if self.conv(found, expected)? {
            return Ok(());
        }
        if self.opts.shrinking() {
            if shrink_check(found, expected, &self.opts.conv) {
                return Ok(());
            }
            return Err(self.err(
                TypeErrorKind::ShrinkFailed { expected: show_c(expected, ctx), found: show_c(found, ctx) },
                "the expected type does not shrink to the found type",
            ));
        }
        Err(self.mismatch_c(ctx, expected, found))
    }

    // --- contexts and types -------------------------------------------------

    pub fn wf_context(&mut self, ctx: &Context) -> TResult<()> {
        let mut prefix = Context::empty();
        for (i, a) in ctx.values.iter().enumerate() {
            self.at(format!("ctx{i}"), |c| c.wf_vtype(&prefix, a))?;
            prefix = prefix.extend(a.clone());
        }
        if let Some(b) = &ctx.comp_slot {
            self.at("slot", |c| c.wf_ctype(&prefix, b))?;
        }
        Ok(())
    }

    pub fn wf_vtype(&mut self, ctx: &Context, a: &VType) -> TResult<()> {
        match a {
            VType::U(b) => self.wf_ctype(ctx, b),
            VType::Unit => Ok(()),
            VType::Sum(arms) => {
                for (i, t) in arms.iter().enumerate() {
                    self.at(format!("sum{}", i + 1), |c| c.wf_vtype(ctx, t))?;
                }
                Ok(())
            }
            VType::Sigma(x, y) => {
                self.at("fst", |c| c.wf_vtype(ctx, x))?;
                let ext = ctx.extend((**x).clone());
                self.at("snd", |c| c.wf_vtype(&ext, y))
            }
            VType::Id(carrier, l, r) => {
                self.at("carrier", |c| c.wf_vtype(ctx, carrier))?;
                self.at("lhs", |c| c.check_value(ctx, l, carrier))?;
                self.at("rhs", |c| c.check_value(ctx, r, carrier))
            }
        }
    }

    pub fn wf_ctype(&mut self, ctx: &Context, b: &CType) -> TResult<()> {
        match b {
            CType::F(a) => self.wf_vtype(ctx, a),
            CType::Prod(arms) => {
                for (i, t) in arms.iter().enumerate() {
                    self.at(format!("prod{}", i + 1), |c| c.wf_ctype(ctx, t))?;
                }
                Ok(())
            }
            CType::Pi(a, c2) => {
                self.at("dom", |c| c.wf_vtype(ctx, a))?;
                let ext = ctx.extend((**a).clone());
                self.at("cod", |c| c.wf_ctype(&ext, c2))
            }
        }
    }

    // --- values -------------------------------------------------------------

    pub fn infer_value(&mut self, ctx: &Context, v: &Value) -> TResult<VType> {
        match v {
            Value::Var(i) => ctx.lookup(*i).ok_or_else(|| {
                self.err(
                    TypeErrorKind::UnboundVariable { index: *i },
                    format!("variable #{i} is not bound in a context of length {}", ctx.len()),
                )
            }),
            Value::Unit => Ok(VType::Unit),
            Value::Thunk(m) => {
                let b = self.at("thunk", |c| c.infer_comp(ctx, m))?;
                Ok(VType::u(b))
            }
            Value::Pair(a, b) => {
                let ta = self.at("fst", |c| c.infer_value(ctx, a))?;
                let tb = self.at("snd", |c| c.infer_value(ctx, b))?;
                Ok(VType::sigma(ta, tb.weaken(1)))
            }
            Value::Refl(w) => {
                let a = self.infer_value(ctx, w)?;
                Ok(VType::id(a, (**w).clone(), (**w).clone()))
            }
            Value::Inj(..) => Err(self.err(
                TypeErrorKind::MotiveRequired,
                "the type of an injection cannot be inferred; check it against a sum type",
            )),
            Value::Let(w, r) => {
                let a = self.at("let", |c| c.infer_value(ctx, w))?;
                let ext = ctx.extend(a);
                let t = self.at("in", |c| c.infer_value(&ext, r))?;
                Ok(t.subst(w))
            }
            Value::Match(mm) => self.infer_match_value(ctx, mm),
        }
    }

    pub fn check_value(&mut self, ctx: &Context, v: &Value, a: &VType) -> TResult<()> {
        match (v, a) {
            (Value::Thunk(m), VType::U(b)) => self.at("thunk", |c| c.check_comp_core(ctx, m, b)),
            (Value::Unit, VType::Unit) => Ok(()),
            (Value::Inj(i, w), VType::Sum(arms)) => {
                if *i >= arms.len() {
                    return Err(self.err(
                        TypeErrorKind::ArityMismatch { expected: arms.len(), found: i + 1 },
                        format!("injection ({}, _) into a sum with {} arms", i + 1, arms.len()),
                    ));
                }
                self.at(format!("inj{}", i + 1), |c| c.check_value(ctx, w, &arms[*i]))
            }
            (Value::Inj(..), other) => Err(self.err(
                TypeErrorKind::NotASum { found: show_v(other, ctx) },
                "an injection must have a sum type",
            )),
            (Value::Pair(x, y), VType::Sigma(ta, tb)) => {
                self.at("fst", |c| c.check_value(ctx, x, ta))?;
                let tb = tb.subst(x);
                self.at("snd", |c| c.check_value(ctx, y, &tb))
            }
            (Value::Refl(w), VType::Id(carrier, l, r)) => {
                self.check_value(ctx, w, carrier)?;
                if self.conv(&**w, &**l)? && self.conv(&**w, &**r)? {
                    Ok(())
                } else {
                    Err(self.mismatch_v(ctx, a, &VType::id((**carrier).clone(), (**w).clone(), (**w).clone())))
                }
            }
            (Value::Let(w, r), _) => {
                let ta = self.at("let", |c| c.infer_value(ctx, w))?;
                let ext = ctx.extend(ta);
                let first = self.at("in", |c| c.check_value(&ext, r, &a.weaken(1)));
                match first {
                    Ok(()) => Ok(()),
                    Err(e) => match self.at("in", |c| c.infer_value(&ext, r)) {
                        Ok(t) if self.conv(&t.subst(w), a)? => Ok(()),
                        _ => Err(e),
                    },
                }
            }
            (Value::Match(mm), _) => {
                if mm.motive.is_some() {
                    let t = self.infer_match_value(ctx, mm)?;
                    if self.conv(&t, a)? {
                        return Ok(());
                    }
                    return Err(self.mismatch_v(ctx, a, &t));
                }
                self.check_match(ctx, &mm.scrutinee, &mm.pattern, a, |c, cx, r, t| c.check_value(cx, r, t))
            }
            _ => {
                let found = self.infer_value(ctx, v)?;
                if self.conv(&found, a)? {
                    Ok(())
                } else {
                    Err(self.mismatch_v(ctx, a, &found))
                }
            }
        }
    }

    // --- eliminators ----------------------------------------------------------

    fn scrutinee_type<R>(&mut self, ctx: &Context, s: &Value, p: &Pattern<R>) -> TResult<ScrutineeType> {
        if let Pattern::Unit(_) = p {
            self.at("scrutinee", |c| c.check_value(ctx, s, &VType::Unit))?;
            return Ok(ScrutineeType::Unit);
        }
        let t = self.at("scrutinee", |c| c.infer_value(ctx, s))?;
        match (p, t) {
            (Pattern::Sum(arms), VType::Sum(ts)) => {
                if arms.len() != ts.len() {
                    return Err(self.err(
                        TypeErrorKind::ArityMismatch { expected: ts.len(), found: arms.len() },
                        "number of match arms differs from the number of sum components",
                    ));
                }
                Ok(ScrutineeType::Sum(ts))
            }
            (Pattern::Sum(_), other) => Err(self.err(
                TypeErrorKind::NotASum { found: show_v(&other, ctx) },
                "matching on a value that is not of sum type",
            )),
            (Pattern::Pair(_), VType::Sigma(a, b)) => Ok(ScrutineeType::Sigma(*a, *b)),
            (Pattern::Pair(_), other) => Err(self.shape_err("Sigma x : A. B", show_v(&other, ctx))),
            (Pattern::Id(_), VType::Id(a, l, r)) => Ok(ScrutineeType::Id(*a, *l, *r)),
            (Pattern::Id(_), other) => Err(self.shape_err("Id(A, V, W)", show_v(&other, ctx))),
            (Pattern::Unit(_), _) => unreachable!(),
        }
    }

    /// Context for the k-th arm and the number of variables it binds.
    fn arm_context(st: &ScrutineeType, ctx: &Context, arm: usize) -> (Context, usize) {
        match st {
            ScrutineeType::Unit => (ctx.clone(), 0),
            ScrutineeType::Sum(ts) => (ctx.extend(ts[arm].clone()), 1),
            ScrutineeType::Sigma(a, b) => (ctx.extend(a.clone()).extend(b.clone()), 2),
            ScrutineeType::Id(a, _, _) => (ctx.extend(a.clone()), 1),
        }
    }

    /// Context in which a motive lives.
    fn motive_context(st: &ScrutineeType, ctx: &Context, scrut_ty: impl Fn() -> VType) -> Context {
        match st {
            ScrutineeType::Id(a, _, _) => {
                let a1 = a.clone();
                let a2 = a.weaken(1);
                let p = VType::id(a.weaken(2), Value::Var(1), Value::Var(0));
                ctx.extend(a1).extend(a2).extend(p)
            }
            _ => ctx.extend(scrut_ty()),
        }
    }

    fn scrutinee_vtype(st: &ScrutineeType) -> VType {
        match st {
            ScrutineeType::Unit => VType::Unit,
            ScrutineeType::Sum(ts) => VType::Sum(ts.clone()),
            ScrutineeType::Sigma(a, b) => VType::Sigma(Box::new(a.clone()), Box::new(b.clone())),
            ScrutineeType::Id(a, l, r) => VType::id(a.clone(), l.clone(), r.clone()),
        }
    }

    fn no_ext<T>(&self, m: &Motive<T>) -> TResult<()> {
        if m.ext.is_empty() {
            Ok(())
        } else {
            Err(self.err(
                TypeErrorKind::ArityMismatch { expected: 0, found: m.ext.len() },
                "motives with a context extension are not supported by the checker",
            ))
        }
    }

    /// Dependent elimination with a motive; returns the instantiated type.
    fn dependent_match<R: Term, T: Term>(
        &mut self,
        ctx: &Context,
        s: &Value,
        motive: &Motive<T>,
        pattern: &Pattern<R>,
        wf: impl Fn(&mut Self, &Context, &T) -> TResult<()>,
        check: impl Fn(&mut Self, &Context, &R, &T) -> TResult<()>,
    ) -> TResult<T> {
        self.no_ext(motive)?;
        let st = match self.scrutinee_type(ctx, s, pattern) {
            Ok(st) => st,
            Err(e) => {
                let Some(r) = match_redex(s, pattern) else { return Err(e) };
                let t = match (pattern, s) {
                    (Pattern::Id(_), Value::Refl(v)) => {
                        motive.result.subst_many(&[s.clone(), (**v).clone(), (**v).clone()])
                    }
                    _ => motive.result.subst(s),
                };
                self.at("redex", |c| check(c, ctx, &r, &t))?;
                return Ok(t);
            }
        };
        let mctx = Self::motive_context(&st, ctx, || Self::scrutinee_vtype(&st));
        self.at("motive", |c| wf(c, &mctx, &motive.result))?;
        let shape = pattern_shape(pattern);
        for (k, (r, _)) in pattern.arms().into_iter().enumerate() {
            let (actx, _) = Self::arm_context(&st, ctx, k);
            let want = motive_for_arm(&motive.result, &shape, k);
            self.at(format!("arm{}", k + 1), |c| check(c, &actx, r, &want))?;
        }
        Ok(match &st {
            ScrutineeType::Id(_, l, r) => {
                motive.result.subst_many(&[s.clone(), r.clone(), l.clone()])
            }
            _ => motive.result.subst(s),
        })
    }

    /// Weak elimination in checking mode.
    fn check_match<R: Term, T: Term>(
        &mut self,
        ctx: &Context,
        s: &Value,
        pattern: &Pattern<R>,
        want: &T,
        check: impl Fn(&mut Self, &Context, &R, &T) -> TResult<()>,
    ) -> TResult<()> {
        let st = match self.scrutinee_type(ctx, s, pattern) {
            Ok(st) => st,
            Err(e) => {
                let Some(r) = match_redex(s, pattern) else { return Err(e) };
                return self.at("redex", |c| check(c, ctx, &r, want));
            }
        };
        for (k, (r, binds)) in pattern.arms().into_iter().enumerate() {
            let (actx, _) = Self::arm_context(&st, ctx, k);
            let w = want.weaken(binds);
            self.at(format!("arm{}", k + 1), |c| check(c, &actx, r, &w))?;
        }
        Ok(())
    }

    /// Weak elimination in inference mode: all arms must infer the same type,
    /// which may not mention the bound variables.
    fn infer_weak_match<R: Term, T: Convertible>(
        &mut self,
        ctx: &Context,
        s: &Value,
        pattern: &Pattern<R>,
        infer: impl Fn(&mut Self, &Context, &R) -> TResult<T>,
        check: impl Fn(&mut Self, &Context, &R, &T) -> TResult<()>,
    ) -> TResult<T> {
        let st = match self.scrutinee_type(ctx, s, pattern) {
            Ok(st) => st,
            Err(e) => {
                let Some(r) = match_redex(s, pattern) else { return Err(e) };
                return self.at("redex", |c| infer(c, ctx, &r));
            }
        };
        let arms = pattern.arms();
        let mut result: Option<T> = None;
        let mut first_err = None;
        for (k, (r, binds)) in arms.iter().enumerate() {
            let (actx, _) = Self::arm_context(&st, ctx, k);
            match self.at(format!("arm{}", k + 1), |c| infer(c, &actx, r)) {
                Ok(t) => match t.strengthen(*binds) {
                    Some(t) => {
                        result = Some(t);
                        break;
                    }
                    None => {
                        return Err(self.err(
                            TypeErrorKind::MotiveRequired,
                            "the arm's type depends on the matched variables; add a motive",
                        ))
                    }
                },
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        let Some(t) = result else {
            return Err(first_err.unwrap_or_else(|| {
                self.err(TypeErrorKind::MotiveRequired, "cannot infer the type of an empty match")
            }));
        };
        for (k, (r, binds)) in arms.iter().enumerate() {
            let (actx, _) = Self::arm_context(&st, ctx, k);
            let w = t.weaken(*binds);
            self.at(format!("arm{}", k + 1), |c| check(c, &actx, r, &w))?;
        }
        Ok(t)
    }

    fn infer_match_value(&mut self, ctx: &Context, mm: &Match<Value, VType>) -> TResult<VType> {
        match &mm.motive {
            Some(m) => self.dependent_match(
                ctx,
                &mm.scrutinee,
                m,
                &mm.pattern,
                |c, cx, t| c.wf_vtype(cx, t),
                |c, cx, r, t| c.check_value(cx, r, t),
            ),
            None => self.infer_weak_match(
                ctx,
                &mm.scrutinee,
                &mm.pattern,
                |c, cx, r| c.infer_value(cx, r),
                |c, cx, r, t| c.check_value(cx, r, t),
            ),
        }
    }

    fn infer_match_comp(&mut self, ctx: &Context, mm: &Match<Comp, CType>) -> TResult<CType> {
        match &mm.motive {
            Some(m) => self.dependent_match(
                ctx,
                &mm.scrutinee,
                m,
                &mm.pattern,
                |c, cx, t| c.wf_ctype(cx, t),
                |c, cx, r, t| c.check_comp_core(cx, r, t),
            ),
            None => self.infer_weak_match(
                ctx,
                &mm.scrutinee,
                &mm.pattern,
                |c, cx, r| c.infer_comp(cx, r),
                |c, cx, r, t| c.check_comp_core(cx, r, t),
            ),
        }
    }

    // --- computations -------------------------------------------------------

    fn head_value_type(&mut self, ctx: &Context, head: &Comp) -> TResult<VType> {
        match self.at("head", |c| c.infer_comp(ctx, head))? {
            CType::F(a) => Ok(*a),
            other => Err(self.at("head", |c| Err(c.shape_err("F A", show_c(&other, ctx))))?),
        }
    }

    /// A type for a value that does not infer, read off its constructors: an
    /// injection gets a sum with `Unit` in the other positions. Only used
    /// where nothing depends on the value's type.
    fn shape_type(&mut self, ctx: &Context, v: &Value) -> TResult<VType> {
        match v {
            Value::Inj(i, w) => {
                let mut arms = vec![VType::Unit; i + 1];
                arms[*i] = self.shape_type(ctx, w)?;
                Ok(VType::Sum(arms))
            }
            Value::Pair(a, b) => {
                let ta = self.shape_type(ctx, a)?;
                let tb = self.shape_type(ctx, b)?;
                Ok(VType::Sigma(Box::new(ta), Box::new(tb.weaken(1))))
            }
            Value::Refl(w) => {
                let t = self.shape_type(ctx, w)?;
                Ok(VType::Id(Box::new(t), w.clone(), w.clone()))
            }
            Value::Thunk(m) => match self.infer_comp(ctx, m) {
                Ok(b) => Ok(VType::u(b)),
                Err(e) => self.comp_shape(ctx, m).map(VType::u).map_err(|_| e),
            },
            _ => self.infer_value(ctx, v),
        }
    }

    fn comp_shape(&mut self, ctx: &Context, m: &Comp) -> TResult<CType> {
        match m {
            Comp::Return(v) => Ok(CType::f(self.shape_type(ctx, v)?)),
            Comp::Error(_) | Comp::Diverge => Ok(CType::f(VType::Unit)),
            Comp::LambdaProd(ms) => {
                let bs = ms.iter().map(|m| self.comp_shape(ctx, m)).collect::<TResult<_>>()?;
                Ok(CType::Prod(bs))
            }
            Comp::LambdaPi(a, n) => {
                let b = self.comp_shape(&ctx.extend((**a).clone()), n)?;
                Ok(CType::Pi(a.clone(), Box::new(b)))
            }
            Comp::SeqTo { head, body, motive: None } => {
                let a = match &**head {
                    Comp::Return(v) => self.shape_type(ctx, v)?,
                    _ => self.head_value_type(ctx, head)?,
                };
                self.bound_shape(ctx, a, body)
            }
            Comp::Let(v, body) => {
                let a = self.shape_type(ctx, v)?;
                self.bound_shape(ctx, a, body)
            }
            Comp::Force(Value::Thunk(n)) => self.comp_shape(ctx, n),
            Comp::Match(mm) if mm.motive.is_none() => match match_redex(&mm.scrutinee, &mm.pattern) {
                Some(r) => self.comp_shape(ctx, &r),
                None => self.infer_comp(ctx, m),
            },
            Comp::Proj(i, n) => match &**n {
                Comp::LambdaProd(ms) if *i < ms.len() => self.comp_shape(ctx, &ms[*i]),
                _ => self.infer_comp(ctx, m),
            },
            Comp::Apply(v, f) => match &**f {
                Comp::LambdaPi(a, n) => {
                    self.check_value(ctx, v, a)?;
                    self.comp_shape(ctx, &n.subst(v))
                }
                _ => self.infer_comp(ctx, m),
            },
            _ => self.infer_comp(ctx, m),
        }
    }

    fn bound_shape(&mut self, ctx: &Context, a: VType, body: &Comp) -> TResult<CType> {
        let b = self.comp_shape(&ctx.extend(a), body)?;
        b.strengthen(1).ok_or_else(|| {
            self.err(TypeErrorKind::MotiveRequired, "the type depends on the bound variable")
        })
    }

    /// Result type of a head whose bound variable is unused.
    fn unused_head_type(&mut self, ctx: &Context, head: &Comp) -> TResult<VType> {
        let a = match head {
            Comp::Return(v) => self.at("head", |c| c.shape_type(ctx, v))?,
            Comp::Error(_) | Comp::Diverge => VType::Unit,
            _ => return self.head_value_type(ctx, head),
        };
        self.at("head", |c| c.check_comp_core(ctx, head, &CType::f(a.clone())))?;
        Ok(a)
    }

    /// Sequencing with a motive; returns `B[thunk head/z]`.
    fn infer_dependent_seq(
        &mut self,
        ctx: &Context,
        head: &Comp,
        body: &Comp,
        motive: &Motive<CType>,
    ) -> TResult<CType> {
        self.no_ext(motive)?;
        let a = self.head_value_type(ctx, head)?;
        let zctx = ctx.extend(VType::u(CType::f(a.clone())));
        self.at("motive", |c| c.wf_ctype(&zctx, &motive.result))?;
        if self.opts.variant == Variant::Minus && motive.result.mentions(0) {
            return Err(self.err(
                TypeErrorKind::DependentSeqInMinus,
                "the sequencing motive depends on the sequenced computation, which dCBPV- forbids",
            ));
        }
        let want = seq_motive_at_return(&motive.result);
        let xctx = ctx.extend(a);
        self.at("body", |c| c.check_comp_core(&xctx, body, &want))?;
        Ok(motive.result.subst(&Value::thunk(head.clone())))
    }

    /// `body` under a binder for `v` (a value or a computation that is
    /// convertible to `return v`): checks at the weakened type, or infers and
    /// substitutes.
    fn check_bound_body(
        &mut self,
        ctx: &Context,
        xctx: &Context,
        body: &Comp,
        bound: Option<&Value>,
        want: &CType,
        seg: &str,
    ) -> TResult<()> {
        let first = self.at(seg, |c| c.check_comp_core(xctx, body, &want.weaken(1)));
        let Err(e) = first else { return Ok(()) };
        let Some(v) = bound else { return Err(e) };
        if let Ok(t) = self.at(seg, |c| c.infer_comp(xctx, body)) {
            if self.conv(&t.subst(v), want)? {
                return Ok(());
            }
        }
        // `return V to x. N` and `let x = V in N` are both `N[V/x]`.
        match self.at(seg, |c| c.check_comp_core(ctx, &body.subst(v), want)) {
            Ok(()) => Ok(()),
            Err(_) => Err(e),
        }
    }

    fn effect_arms(&mut self, ctx: &Context, ms: &[&Comp], labels: &[String]) -> TResult<CType> {
        let mut first_err = None;
        let mut found = None;
        for (m, l) in ms.iter().zip(labels) {
            match self.at(l.clone(), |c| c.infer_comp(ctx, m)) {
                Ok(t) => {
                    found = Some(t);
                    break;
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        let Some(t) = found else {
            return Err(first_err.unwrap_or_else(|| {
                self.err(TypeErrorKind::MotiveRequired, "cannot infer the type of an empty choice")
            }));
        };
        for (m, l) in ms.iter().zip(labels) {
            self.at(l.clone(), |c| c.check_comp_core(ctx, m, &t))?;
        }
        Ok(t)
    }

    fn check_effect_names(&self, m: &Comp) -> TResult<()> {
        match m {
            Comp::Print(tok, _) => {
                self.need_effect(Effect::Print)?;
                if self.sig.monoid_element(tok).is_none() {
                    return Err(self.err(
                        TypeErrorKind::Mismatch { expected: "monoid element".into(), found: tok.clone() },
                        format!("`{tok}` is not an element of the printing monoid"),
                    ));
                }
            }
            Comp::Write(s, _) => {
                self.need_effect(Effect::State)?;
                if !self.sig.has_state(s) {
                    return Err(self.err(
                        TypeErrorKind::Mismatch { expected: "state".into(), found: s.clone() },
                        format!("unknown state `{s}`"),
                    ));
                }
            }
            Comp::Read(arms) => {
                self.need_effect(Effect::State)?;
                let got: Vec<&str> = arms.iter().map(|a| a.state.as_str()).collect();
                let want: Vec<&str> = self.sig.states().iter().map(String::as_str).collect();
                if got != want {
                    return Err(self.err(
                        TypeErrorKind::ArityMismatch { expected: want.len(), found: got.len() },
                        format!("read must have one arm per state, in order: {}", want.join(", ")),
                    ));
                }
            }
            Comp::Error(e) => {
                self.need_effect(Effect::Error)?;
                if !self.sig.has_error(e) {
                    return Err(self.err(
                        TypeErrorKind::Mismatch { expected: "error name".into(), found: e.clone() },
                        format!("unknown error `{e}`"),
                    ));
                }
            }
            Comp::Choose(ms) => {
                self.need_effect(Effect::Choose)?;
                if ms.is_empty() {
                    return Err(self.err(
                        TypeErrorKind::ArityMismatch { expected: 1, found: 0 },
                        "choose needs at least one branch",
                    ));
                }
            }
            Comp::Diverge => self.need_effect(Effect::Diverge)?,
            Comp::Mu(_) => self.need_effect(Effect::Rec)?,
            _ => {}
        }
        Ok(())
    }

    pub fn infer_comp(&mut self, ctx: &Context, m: &Comp) -> TResult<CType> {
        self.check_effect_names(m)?;
        match m {
            Comp::Return(v) => Ok(CType::f(self.at("return", |c| c.infer_value(ctx, v))?)),
            Comp::Force(v) => match self.at("force", |c| c.infer_value(ctx, v))? {
                VType::U(b) => Ok(*b),
                other => Err(self.at("force", |c| Err(c.shape_err("U B", show_v(&other, ctx))))?),
            },
            Comp::SeqTo { head, body, motive: Some(mo) } => self.infer_dependent_seq(ctx, head, body, mo),
            Comp::SeqTo { head, body, motive: None } => {
                let a = self.head_value_type(ctx, head)?;
                let xctx = ctx.extend(a);
                let t = self.at("body", |c| c.infer_comp(&xctx, body))?;
                if let Some(t) = t.strengthen(1) {
                    return Ok(t);
                }
                let nf = normalize(&**head, &self.opts.conv).map_err(|e| self.eq_err(e))?;
                match nf {
                    Comp::Return(v) => Ok(t.subst(&v)),
                    _ => Err(self.err(
                        TypeErrorKind::MotiveRequired,
                        "the continuation's type depends on the bound variable; add a motive",
                    )),
                }
            }
            Comp::LambdaProd(ms) => Ok(CType::Prod(
                ms.iter()
                    .enumerate()
                    .map(|(i, m)| self.at(format!("lam{}", i + 1), |c| c.infer_comp(ctx, m)))
                    .collect::<TResult<_>>()?,
            )),
            Comp::Proj(i, inner) => match self.at("proj", |c| c.infer_comp(ctx, inner))? {
                CType::Prod(mut bs) => {
                    if *i >= bs.len() {
                        return Err(self.err(
                            TypeErrorKind::ArityMismatch { expected: bs.len(), found: i + 1 },
                            format!("projection {} out of a product with {} components", i + 1, bs.len()),
                        ));
                    }
                    Ok(bs.swap_remove(*i))
                }
                other => Err(self.shape_err("Prod(..)", show_c(&other, ctx))),
            },
            Comp::LambdaPi(a, body) => {
                self.at("dom", |c| c.wf_vtype(ctx, a))?;
                let xctx = ctx.extend((**a).clone());
                let b = self.at("lam", |c| c.infer_comp(&xctx, body))?;
                Ok(CType::pi((**a).clone(), b))
            }
            Comp::Apply(v, f) => match self.at("fun", |c| c.infer_comp(ctx, f))? {
                CType::Pi(a, b) => {
                    self.at("arg", |c| c.check_value(ctx, v, &a))?;
                    Ok(b.subst(v))
                }
                other => Err(self.err(
                    TypeErrorKind::NotAFunction { found: show_c(&other, ctx) },
                    "applying a computation that is not of Pi type",
                )),
            },
            Comp::Let(v, body) => {
                let a = self.at("let", |c| c.infer_value(ctx, v))?;
                let xctx = ctx.extend(a);
                let t = self.at("in", |c| c.infer_comp(&xctx, body))?;
                Ok(t.subst(v))
            }
            Comp::Match(mm) => self.infer_match_comp(ctx, mm),
            Comp::Print(_, body) | Comp::Write(_, body) => self.at("then", |c| c.infer_comp(ctx, body)),
            Comp::Choose(ms) => {
                let refs: Vec<&Comp> = ms.iter().collect();
                let labels: Vec<String> = (1..=ms.len()).map(|i| format!("choice{i}")).collect();
                self.effect_arms(ctx, &refs, &labels)
            }
            Comp::Read(arms) => {
                let refs: Vec<&Comp> = arms.iter().map(|a| &a.body).collect();
                let labels: Vec<String> = arms.iter().map(|a| a.state.clone()).collect();
                self.effect_arms(ctx, &refs, &labels)
            }
            Comp::Diverge | Comp::Error(_) | Comp::Mu(_) => Err(self.err(
                TypeErrorKind::MotiveRequired,
                "the type of this computation cannot be inferred; check it against a type",
            )),
        }
    }

    /// Checking without the outermost shrink coercion.
    fn check_comp_core(&mut self, ctx: &Context, m: &Comp, b: &CType) -> TResult<()> {
        self.check_effect_names(m)?;
        match (m, b) {
            (Comp::Return(v), CType::F(a)) => self.at("return", |c| c.check_value(ctx, v, a)),
            (Comp::LambdaProd(ms), CType::Prod(bs)) => {
                if ms.len() != bs.len() {
                    return Err(self.err(
                        TypeErrorKind::ArityMismatch { expected: bs.len(), found: ms.len() },
                        "λ over a product has the wrong number of components",
                    ));
                }
                for (i, (m, t)) in ms.iter().zip(bs).enumerate() {
                    self.at(format!("lam{}", i + 1), |c| c.check_comp_core(ctx, m, t))?;
                }
                Ok(())
            }
            (Comp::LambdaPi(a, body), CType::Pi(a2, b2)) => {
                self.at("dom", |c| c.wf_vtype(ctx, a))?;
                if !self.conv(&**a, &**a2)? {
                    return Err(self.at("dom", |c| Err(c.mismatch_v(ctx, a2, a)))?);
                }
                let xctx = ctx.extend((**a2).clone());
                self.at("lam", |c| c.check_comp_core(&xctx, body, b2))
            }
            (Comp::SeqTo { head, body, motive: None }, _) => {
                if matches!(**body, Comp::Return(Value::Var(0))) && matches!(b, CType::F(_)) {
                    // `M to x. return x` is `M`.
                    if self.at("head", |c| c.check_comp_core(ctx, head, b)).is_ok() {
                        return Ok(());
                    }
                }
                let a = match self.head_value_type(ctx, head) {
                    Err(e) if matches!(e.kind, TypeErrorKind::MotiveRequired) && !body.mentions(0) => {
                        self.unused_head_type(ctx, head).map_err(|_| e)?
                    }
                    Err(e) if matches!(e.kind, TypeErrorKind::MotiveRequired) => match &**head {
                        // to-β: the value is checked where it is used
                        Comp::Return(v) => {
                            return self.at("body", |c| c.check_comp_core(ctx, &body.subst(v), b)).map_err(|_| e);
                        }
                        _ => return Err(e),
                    },
                    r => r?,
                };
                let xctx = ctx.extend(a);
                let nf = normalize(&**head, &self.opts.conv).map_err(|e| self.eq_err(e))?;
                let bound = match &nf {
                    Comp::Return(v) => Some(v),
                    _ => None,
                };
                self.check_bound_body(ctx, &xctx, body, bound, b, "body")
            }
            (Comp::Let(v, body), _) => {
                let a = match self.at("let", |c| c.infer_value(ctx, v)) {
                    Ok(a) => a,
                    Err(e) if matches!(e.kind, TypeErrorKind::MotiveRequired) && body.mentions(0) => {
                        // let-β: the value is checked where it is used
                        return self.at("in", |c| c.check_comp_core(ctx, &body.subst(v), b)).map_err(|_| e);
                    }
                    Err(e) if matches!(e.kind, TypeErrorKind::MotiveRequired) => {
                        let a = self.at("let", |c| c.shape_type(ctx, v)).map_err(|_| e.clone())?;
                        self.at("let", |c| c.check_value(ctx, v, &a)).map_err(|_| e)?;
                        a
                    }
                    Err(e) => return Err(e),
                };
                let xctx = ctx.extend(a);
                self.check_bound_body(ctx, &xctx, body, Some(v), b, "in")
            }
            (Comp::Match(mm), _) if mm.motive.is_none() => {
                self.check_match(ctx, &mm.scrutinee, &mm.pattern, b, |c, cx, r, t| c.check_comp_core(cx, r, t))
            }
            (Comp::Diverge, _) | (Comp::Error(_), _) => Ok(()),
            (Comp::Mu(body), _) => {
                let zctx = ctx.extend(VType::u(b.clone()));
                self.at("mu", |c| c.check_comp_core(&zctx, body, &b.weaken(1)))
            }
            (Comp::Print(_, body), _) | (Comp::Write(_, body), _) => {
                self.at("then", |c| c.check_comp_core(ctx, body, b))
            }
            (Comp::Choose(ms), _) => {
                for (i, m) in ms.iter().enumerate() {
                    self.at(format!("choice{}", i + 1), |c| c.check_comp_core(ctx, m, b))?;
                }
                Ok(())
            }
            (Comp::Read(arms), _) => {
                for a in arms {
                    self.at(a.state.clone(), |c| c.check_comp_core(ctx, &a.body, b))?;
                }
                Ok(())
            }
            _ => {
                let found = match self.infer_comp(ctx, m) {
                    Ok(t) => t,
                    Err(e) if matches!(e.kind, TypeErrorKind::MotiveRequired) => {
                        return self.check_head_redex(ctx, m, b).unwrap_or(Err(e));
                    }
                    Err(e) => return Err(e),
                };
                if self.conv(&found, b)? {
                    Ok(())
                } else {
                    Err(self.mismatch_c(ctx, b, &found))
                }
            }
        }
    }

    /// Checks the reduct of `i ' lam { .. }`, `V ' lam x : A. N` or
    /// `force thunk M` when the redex itself does not infer. Projections and
    /// applications of `M to x. N` are commuted into `N`.
    fn check_head_redex(&mut self, ctx: &Context, m: &Comp, b: &CType) -> Option<TResult<()>> {
        match m {
            Comp::Proj(i, inner) => match &**inner {
                Comp::LambdaProd(ms) if *i < ms.len() => {
                    Some(self.at("proj", |c| c.check_comp_core(ctx, &ms[*i], b)))
                }
                // i ' (M to x. N) is M to x. i ' N
                Comp::SeqTo { head, body, motive: None } => {
                    let m = Comp::SeqTo {
                        head: head.clone(),
                        body: Box::new(Comp::Proj(*i, body.clone())),
                        motive: None,
                    };
                    Some(self.at("proj", |c| c.check_comp_core(ctx, &m, b)))
                }
                _ => None,
            },
            Comp::Apply(v, f) => match &**f {
                Comp::LambdaPi(a, n) => Some((|| {
                    self.at("dom", |c| c.wf_vtype(ctx, a))?;
                    self.at("arg", |c| c.check_value(ctx, v, a))?;
                    self.at("fun", |c| c.check_comp_core(ctx, &n.subst(v), b))
                })()),
                // V ' (M to x. N) is M to x. V ' N
                Comp::SeqTo { head, body, motive: None } => {
                    let m = Comp::SeqTo {
                        head: head.clone(),
                        body: Box::new(Comp::Apply(Box::new(v.weaken(1)), body.clone())),
                        motive: None,
                    };
                    Some(self.at("fun", |c| c.check_comp_core(ctx, &m, b)))
                }
                _ => None,
            },
            Comp::Force(Value::Thunk(n)) => Some(self.at("force", |c| c.check_comp_core(ctx, n, b))),
            _ => None,
        }
    }

    /// Checks `m` against `b`; in dCBPV+ with shrinking, a mismatch is
    /// retried once at this position with the effect coercion.
    pub fn check_comp(&mut self, ctx: &Context, m: &Comp, b: &CType) -> TResult<()> {
        match self.check_comp_core(ctx, m, b) {
            Ok(()) => Ok(()),
            Err(e) if self.opts.shrinking() && matches!(e.kind, TypeErrorKind::Mismatch { .. }) => {
                match self.infer_comp(ctx, m) {
                    Ok(found) => {
                        if shrink_check(&found, b, &self.opts.conv) {
                            Ok(())
                        } else {
                            Err(self.err(
                                TypeErrorKind::ShrinkFailed {
                                    expected: show_c(b, ctx),
                                    found: show_c(&found, ctx),
                                },
                                format!("no effect coercion applies ({})", e.message),
                            ))
                        }
                    }
                    // Nothing to compare against: try the shrunk types instead.
                    Err(_) => {
                        let shrunk = shrink_reachable(b, &self.opts.conv);
                        for t in shrunk.iter().skip(1) {
                            if self.check_comp_core(ctx, m, t).is_ok() {
                                return Ok(());
                            }
                        }
                        Err(e)
                    }
                }
            }
            Err(e) => Err(e),
        }
    }

    // --- stacks and configurations -------------------------------------------

    /// `Γ; hole ⊢ K : out`, reading frames from the top of the stack.
    pub fn check_stack(&mut self, ctx: &Context, hole: &CType, k: &Stack, out: &CType) -> TResult<()> {
        let frames: Vec<&Frame> = k.iter_top_down().collect();
        let mut cur = hole.clone();
        for (n, fr) in frames.iter().enumerate() {
            // What the frame should produce: the final type, or the type of
            // the head the next frame was pushed with.
            let expected = match frames.get(n + 1) {
                None => Some(out.clone()),
                Some(Frame::Seq { head: Some(h), .. }) => self.infer_comp(ctx, h).ok(),
                Some(_) => None,
            };
            cur = self.at(format!("frame{n}"), |c| c.frame_type(ctx, &cur, fr, expected.as_ref()))?;
        }
        self.at("nil", |c| c.subsume(ctx, &cur, out))
    }

    fn frame_type(&mut self, ctx: &Context, cur: &CType, fr: &Frame, expected: Option<&CType>) -> TResult<CType> {
        match fr {
            Frame::Seq { body, motive, head } => {
                let CType::F(a) = cur else {
                    return Err(self.shape_err("F A", show_c(cur, ctx)));
                };
                let xctx = ctx.extend((**a).clone());
                match motive {
                    Some(mo) => {
                        self.no_ext(mo)?;
                        let zctx = ctx.extend(VType::u(cur.clone()));
                        self.at("motive", |c| c.wf_ctype(&zctx, &mo.result))?;
                        if self.opts.variant == Variant::Minus && mo.result.mentions(0) {
                            return Err(self.err(
                                TypeErrorKind::DependentSeqInMinus,
                                "the frame's motive depends on the sequenced computation",
                            ));
                        }
                        let want = seq_motive_at_return(&mo.result);
                        self.at("body", |c| c.check_comp_core(&xctx, body, &want))?;
                        match head {
                            Some(h) => Ok(mo.result.subst(&Value::thunk(h.clone()))),
                            None => mo.result.strengthen(1).ok_or_else(|| {
                                self.err(
                                    TypeErrorKind::MotiveRequired,
                                    "a dependent frame must remember its head computation",
                                )
                            }),
                        }
                    }
                    None => {
                        if let Some(out) = expected {
                            if self.at("body", |c| c.check_comp(&xctx, body, &out.weaken(1))).is_ok() {
                                return Ok(out.clone());
                            }
                        }
                        let t = self.at("body", |c| c.infer_comp(&xctx, body))?;
                        t.strengthen(1).ok_or_else(|| {
                            self.err(
                                TypeErrorKind::MotiveRequired,
                                "the frame's type depends on the bound variable",
                            )
                        })
                    }
                }
            }
            Frame::Proj(i) => match cur {
                CType::Prod(bs) if *i < bs.len() => Ok(bs[*i].clone()),
                CType::Prod(bs) => Err(self.err(
                    TypeErrorKind::ArityMismatch { expected: bs.len(), found: i + 1 },
                    "projection frame out of range",
                )),
                other => Err(self.shape_err("Prod(..)", show_c(other, ctx))),
            },
            Frame::Arg(v) => match cur {
                CType::Pi(a, b) => {
                    self.at("arg", |c| c.check_value(ctx, v, a))?;
                    Ok(b.subst(v))
                }
                other => Err(self.err(
                    TypeErrorKind::NotAFunction { found: show_c(other, ctx) },
                    "argument frame under a computation that is not of Pi type",
                )),
            },
        }
    }

    /// A configuration `M, K` has type `C` if `M : B` and `Γ; B ⊢ K : C` for
    /// the inferred `B`. When `M` does not infer or the stack does not fit,
    /// the plugged computation is checked at `C` instead.
    pub fn check_config(&mut self, comp: &Comp, stack: &Stack, c: &CType) -> TResult<()> {
        let ctx = Context::empty();
        let direct = match self.at("comp", |ch| ch.infer_comp(&ctx, comp)) {
            Ok(b) => self.at("stack", |ch| ch.check_stack(&ctx, &b, stack, c)),
            // The nearest head a sequencing frame was pushed with that has an
            // inferable type types the computation plugged into the frames
            // above it.
            Err(e) => {
                let found = stack.frames.iter().enumerate().rev().find_map(|(i, f)| match f {
                    Frame::Seq { head: Some(h), .. } => self.infer_comp(&ctx, h).ok().map(|b| (i, b)),
                    _ => None,
                });
                match found {
                    Some((i, b)) => {
                        let above = Stack { frames: stack.frames[i + 1..].to_vec() };
                        let below = Stack { frames: stack.frames[..=i].to_vec() };
                        self.at("comp", |ch| ch.check_comp(&ctx, &plug(comp, &above), &b))
                            .and_then(|()| self.at("stack", |ch| ch.check_stack(&ctx, &b, &below, c)))
                    }
                    None => Err(e),
                }
            }
        };
        let Err(e) = direct else { return Ok(()) };
        let plugged = plug(comp, stack);
        match self.at("plugged", |ch| ch.check_comp(&ctx, &plugged, c)) {
            Ok(()) => Ok(()),
            Err(e2) => {
                // Prefer the more informative error of the two.
                if matches!(e.kind, TypeErrorKind::MotiveRequired) {
                    Err(e2)
                } else {
                    Err(e)
                }
            }
        }
    }
}

/// Rebuilds a single computation from a configuration's term and stack.
pub fn plug(comp: &Comp, stack: &Stack) -> Comp {
    let mut m = comp.clone();
    for fr in stack.iter_top_down() {
        m = match fr {
            Frame::Seq { body, motive, .. } => Comp::SeqTo {
                head: Box::new(m),
                body: Box::new(body.clone()),
                motive: motive.clone().map(Box::new),
            },
            Frame::Proj(i) => Comp::Proj(*i, Box::new(m)),
            Frame::Arg(v) => Comp::Apply(Box::new(v.clone()), Box::new(m)),
        };
    }
    m
}

// --- free-function entry points ------------------------------------------

pub fn wf_context(ctx: &Context, opts: &CheckOptions, sig: &EffectSignature) -> TResult<()> {
    Checker::new(sig, *opts).wf_context(ctx)
}

pub fn wf_vtype(ctx: &Context, a: &VType, opts: &CheckOptions, sig: &EffectSignature) -> TResult<()> {
    Checker::new(sig, *opts).wf_vtype(ctx, a)
}

pub fn wf_ctype(ctx: &Context, b: &CType, opts: &CheckOptions, sig: &EffectSignature) -> TResult<()> {
    Checker::new(sig, *opts).wf_ctype(ctx, b)
}

pub fn check_value(
    ctx: &Context,
    v: &Value,
    a: &VType,
    opts: &CheckOptions,
    sig: &EffectSignature,
) -> TResult<()> {
    Checker::new(sig, *opts).check_value(ctx, v, a)
}

pub fn infer_value(ctx: &Context, v: &Value, opts: &CheckOptions, sig: &EffectSignature) -> TResult<VType> {
    Checker::new(sig, *opts).infer_value(ctx, v)
}

pub fn check_comp(
    ctx: &Context,
    m: &Comp,
    b: &CType,
    opts: &CheckOptions,
    sig: &EffectSignature,
) -> TResult<()> {
    Checker::new(sig, *opts).check_comp(ctx, m, b)
}

pub fn infer_comp(ctx: &Context, m: &Comp, opts: &CheckOptions, sig: &EffectSignature) -> TResult<CType> {
    Checker::new(sig, *opts).infer_comp(ctx, m)
}

pub fn check_stack(
    ctx: &Context,
    hole: &CType,
    k: &Stack,
    out: &CType,
    opts: &CheckOptions,
    sig: &EffectSignature,
) -> TResult<()> {
    Checker::new(sig, *opts).check_stack(ctx, hole, k, out)
}

/// Checks a closed program: its type is well formed and the body checks.
pub fn check_program(
    m: &Comp,
    c: &CType,
    opts: &CheckOptions,
    sig: &EffectSignature,
) -> TResult<()> {
    let mut ch = Checker::new(sig, *opts);
    let ctx = Context::empty();
    ch.at("type", |k| k.wf_ctype(&ctx, c))?;
    ch.check_comp(&ctx, m, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_comp, parse_ctype, parse_vtype};

    fn sig_all() -> EffectSignature {
        EffectSignature::all(&["s0", "s1"], &["e"])
    }

    fn check(src: &str, ty: &str, opts: CheckOptions, sig: &EffectSignature) -> TResult<()> {
        let m = parse_comp(src).unwrap();
        let c = parse_ctype(ty).unwrap();
        check_program(&m, &c, &opts, sig)
    }

    #[test]
    fn contexts() {
        let sig = EffectSignature::pure();
        let o = CheckOptions::minus();
        assert!(wf_context(&Context::empty(), &o, &sig).is_ok());
        let ctx = Context::from_values(vec![
            VType::Unit,
            VType::id(VType::Unit, Value::Var(0), Value::Var(0)),
        ]);
        assert!(wf_context(&ctx, &o, &sig).is_ok());
        let bad = Context {
            values: vec![VType::Unit],
            comp_slot: Some(CType::f(VType::id(VType::Unit, Value::Var(5), Value::Unit))),
        };
        let e = wf_context(&bad, &o, &sig).unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::UnboundVariable { .. }));
    }

    #[test]
    fn types() {
        let sig = EffectSignature::pure();
        let o = CheckOptions::minus();
        let ctx = Context::empty();
        assert!(wf_vtype(&ctx, &parse_vtype("U F Unit").unwrap(), &o, &sig).is_ok());
        assert!(wf_vtype(&ctx, &parse_vtype("Sigma x : Unit. Id(Unit, x, ())").unwrap(), &o, &sig).is_ok());
        let e = wf_vtype(&ctx, &parse_vtype("Id(Unit, (), (1, ()))").unwrap(), &o, &sig).unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::NotASum { .. } | TypeErrorKind::Mismatch { .. }));
    }

    #[test]
    fn values() {
        let sig = EffectSignature::pure();
        let o = CheckOptions::minus();
        let ctx = Context::from_values(vec![VType::u(CType::f(VType::Unit))]);
        assert_eq!(infer_value(&ctx, &Value::Var(0), &o, &sig).unwrap(), VType::u(CType::f(VType::Unit)));
        let refl = Value::refl(Value::Unit);
        assert!(check_value(&Context::empty(), &refl, &VType::id(VType::Unit, Value::Unit, Value::Unit), &o, &sig).is_ok());
        let e = check_value(
            &Context::empty(),
            &Value::thunk(Comp::Error("e".into())),
            &VType::u(CType::f(VType::Unit)),
            &o,
            &sig,
        )
        .unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::EffectDisabled { .. }));
    }

    #[test]
    fn return_then_refl_uses_return_rule() {
        let sig = EffectSignature::pure();
        assert!(check("return () to x. return refl x", "F Id(Unit, (), ())", CheckOptions::minus(), &sig).is_ok());
    }

    #[test]
    fn dependent_sequencing_only_in_plus() {
        let sig = EffectSignature::pure();
        let src = "lam f : U F Unit. force f to[z. F Id(U F Unit, z, z)] y. return refl (thunk return y)";
        let ty = "Pi f : U F Unit. F Id(U F Unit, f, f)";
        // z := thunk force f, which is η-equal to f
        assert!(check(src, ty, CheckOptions::plus(), &sig).is_ok());
        let e = check(src, ty, CheckOptions::minus(), &sig).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::DependentSeqInMinus);
    }

    #[test]
    fn effects_in_products() {
        let sig = EffectSignature::pure().with_effects([Effect::Diverge]);
        assert!(check("lam { return () | diverge }", "Prod(F Unit, F Unit)", CheckOptions::minus(), &sig).is_ok());
        let e = check("lam { return () | diverge }", "Prod(F Unit, F Unit)", CheckOptions::minus(), &EffectSignature::pure())
            .unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::EffectDisabled { .. }));
    }

    #[test]
    fn stacks() {
        let sig = EffectSignature::pure();
        let o = CheckOptions::minus();
        let ctx = Context::empty();
        let fu = CType::f(VType::Unit);
        assert!(check_stack(&ctx, &fu, &Stack::nil(), &fu, &o, &sig).is_ok());
        let mut k = Stack::nil();
        k.push(Frame::Seq { body: Comp::Return(Value::Unit), motive: None, head: None });
        let fb = CType::f(VType::bool());
        assert!(check_stack(&ctx, &fb, &k, &fu, &o, &sig).is_ok());
        let pi = CType::pi(VType::Unit, CType::f(VType::id(VType::Unit, Value::Var(0), Value::Var(0))));
        let mut k = Stack::nil();
        k.push(Frame::Arg(Value::Unit));
        let out = CType::f(VType::id(VType::Unit, Value::Unit, Value::Unit));
        assert!(check_stack(&ctx, &pi, &k, &out, &o, &sig).is_ok());
    }

    #[test]
    fn shrink_rule() {
        let sig = sig_all();
        let ty = "F Id(U F Unit, thunk choose { return () | print \"a\" return () }, thunk choose { return () | print \"a\" return () })";
        let src = "return refl (thunk return ())";
        assert!(check(src, ty, CheckOptions::plus(), &sig).is_ok());
        let no = CheckOptions { allow_shrink: false, ..CheckOptions::plus() };
        let e = check(src, ty, no, &sig).unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::Mismatch { .. }));
        let bad = "return refl (thunk print \"b\" return ())";
        let e = check(bad, ty, CheckOptions::plus(), &sig).unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::ShrinkFailed { .. }));
    }

    #[test]
    fn errors_carry_paths_and_serialize() {
        let sig = EffectSignature::pure();
        let e = check("return () to x. return (3, x)", "F Bool", CheckOptions::minus(), &sig).unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::ArityMismatch { .. }));
        assert_eq!(e.path, vec!["body", "return"]);
        let json = serde_json::to_value(&e).unwrap();
        assert_eq!(json["kind"], "ArityMismatch");
        assert!(json["path"].is_array());
    }
}
