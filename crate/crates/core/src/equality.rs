//! Judgemental equality: directed normalization of the βη-theory, conversion
//! checking, complex-value elimination and the effect-coercion ("shrinking")
//! check used by the dCBPV+ checker.
//!
//! The rewrite system orients the β-laws left to right, sequencing
//! associativity to the right, and pulls λ out of `to`. η for thunks, finite
//! products and Π is applied during comparison, driven by the intro side.
//! μ is never unfolded here.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConvOptions {
    pub eta_id: bool,
    pub eta_fun_prod_thunk: bool,
    pub shrink_fuel: usize,
    pub norm_fuel: usize,
}

impl Default for ConvOptions {
    fn default() -> Self {
        ConvOptions { eta_id: false, eta_fun_prod_thunk: true, shrink_fuel: 64, norm_fuel: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EqualityError {
    #[error("normalization fuel exhausted after {0} rewrite steps")]
    FuelExhausted(usize),
}

/// One rewrite step, for `--explain` output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RewriteStep {
    pub rule: &'static str,
    pub path: String,
}

pub struct Normalizer {
    fuel: usize,
    used: usize,
    path: Vec<String>,
    log: Option<Vec<RewriteStep>>,
}

type NResult<T> = Result<T, EqualityError>;

impl Normalizer {
    pub fn new(opts: &ConvOptions) -> Self {
        Normalizer { fuel: opts.norm_fuel.max(1), used: 0, path: Vec::new(), log: None }
    }

    pub fn with_log(opts: &ConvOptions) -> Self {
        let mut n = Normalizer::new(opts);
        n.log = Some(Vec::new());
        n
    }

    pub fn take_log(&mut self) -> Vec<RewriteStep> {
        self.log.take().unwrap_or_default()
    }

    pub fn steps_used(&self) -> usize {
        self.used
    }

    fn tick(&mut self, rule: &'static str) -> NResult<()> {
        if self.used >= self.fuel {
            return Err(EqualityError::FuelExhausted(self.used));
        }
        self.used += 1;
        if let Some(log) = &mut self.log {
            log.push(RewriteStep { rule, path: self.path.join(".") });
        }
        Ok(())
    }

    fn at<T>(&mut self, seg: impl Into<String>, f: impl FnOnce(&mut Self) -> NResult<T>) -> NResult<T> {
        if self.log.is_some() {
            self.path.push(seg.into());
            let r = f(self);
            self.path.pop();
            r
        } else {
            f(self)
        }
    }

    pub fn vtype(&mut self, a: &VType) -> NResult<VType> {
        Ok(match a {
            VType::U(b) => VType::U(Box::new(self.at("U", |n| n.ctype(b))?)),
            VType::Unit => VType::Unit,
            VType::Sum(arms) => VType::Sum(
                arms.iter()
                    .enumerate()
                    .map(|(i, t)| self.at(format!("sum{}", i + 1), |n| n.vtype(t)))
                    .collect::<NResult<_>>()?,
            ),
            VType::Sigma(a, b) => VType::Sigma(
                Box::new(self.at("fst", |n| n.vtype(a))?),
                Box::new(self.at("snd", |n| n.vtype(b))?),
            ),
            VType::Id(a, l, r) => VType::Id(
                Box::new(self.at("carrier", |n| n.vtype(a))?),
                Box::new(self.at("lhs", |n| n.value(l))?),
                Box::new(self.at("rhs", |n| n.value(r))?),
            ),
        })
    }

    pub fn ctype(&mut self, b: &CType) -> NResult<CType> {
        Ok(match b {
            CType::F(a) => CType::F(Box::new(self.at("F", |n| n.vtype(a))?)),
            CType::Prod(arms) => CType::Prod(
                arms.iter()
                    .enumerate()
                    .map(|(i, t)| self.at(format!("prod{}", i + 1), |n| n.ctype(t)))
                    .collect::<NResult<_>>()?,
            ),
            CType::Pi(a, b) => CType::Pi(
                Box::new(self.at("dom", |n| n.vtype(a))?),
                Box::new(self.at("cod", |n| n.ctype(b))?),
            ),
        })
    }

    fn motive<T: Term>(
        &mut self,
        m: &Motive<T>,
        f: impl Fn(&mut Self, &T) -> NResult<T>,
    ) -> NResult<Motive<T>> {
        let ext = m.ext.iter().map(|a| self.vtype(a)).collect::<NResult<_>>()?;
        let result = self.at("motive", |n| f(n, &m.result))?;
        Ok(Motive { ext, result })
    }

    pub fn value(&mut self, v: &Value) -> NResult<Value> {
        match v {
            Value::Var(_) | Value::Unit => Ok(v.clone()),
            Value::Thunk(m) => Ok(Value::Thunk(Box::new(self.at("thunk", |n| n.comp(m))?))),
            Value::Inj(i, w) => Ok(Value::Inj(*i, Box::new(self.value(w)?))),
            Value::Pair(a, b) => Ok(Value::Pair(
                Box::new(self.at("fst", |n| n.value(a))?),
                Box::new(self.at("snd", |n| n.value(b))?),
            )),
            Value::Refl(w) => Ok(Value::Refl(Box::new(self.value(w)?))),
            Value::Let(w, r) => {
                self.tick("let")?;
                let r = r.subst(w);
                self.value(&r)
            }
            Value::Match(mm) => {
                let scrutinee = self.at("scrutinee", |n| n.value(&mm.scrutinee))?;
                if let Some(r) = match_redex(&scrutinee, &mm.pattern) {
                    self.tick(match_rule(&mm.pattern))?;
                    return self.value(&r);
                }
                let motive = match &mm.motive {
                    Some(m) => Some(self.motive(m, |n, t| n.vtype(t))?),
                    None => None,
                };
                let pattern = self.pattern(&mm.pattern, |n, r| n.value(r))?;
                Ok(Value::Match(Box::new(Match { scrutinee, motive, pattern })))
            }
        }
    }

    fn pattern<R>(
        &mut self,
        p: &Pattern<R>,
        f: impl Fn(&mut Self, &R) -> NResult<R>,
    ) -> NResult<Pattern<R>> {
        let mut i = 0;
        p.try_map(|r, _| {
            i += 1;
            self.at(format!("arm{i}"), |n| f(n, r))
        })
    }

    pub fn comp(&mut self, m: &Comp) -> NResult<Comp> {
        match m {
            Comp::Return(v) => Ok(Comp::Return(self.at("return", |n| n.value(v))?)),
            Comp::SeqTo { head, body, motive } => {
                let h = self.at("head", |n| n.comp(head))?;
                if let Comp::Return(v) = &h {
                    self.tick("to-beta")?;
                    let b = body.subst(v);
                    return self.comp(&b);
                }
                let b = self.at("body", |n| n.comp(body))?;
                let motive = match motive {
                    Some(mo) => Some(Box::new(self.motive(mo, |n, t| n.ctype(t))?)),
                    None => None,
                };
                self.seq(h, b, motive)
            }
            Comp::Force(v) => {
                let v = self.at("force", |n| n.value(v))?;
                if let Value::Thunk(inner) = v {
                    self.tick("force-thunk")?;
                    return Ok(*inner);
                }
                Ok(Comp::Force(v))
            }
            Comp::LambdaProd(ms) => Ok(Comp::LambdaProd(
                ms.iter()
                    .enumerate()
                    .map(|(i, m)| self.at(format!("lam{}", i + 1), |n| n.comp(m)))
                    .collect::<NResult<_>>()?,
            )),
            Comp::Proj(i, inner) => {
                let inner = self.at("proj", |n| n.comp(inner))?;
                if let Comp::LambdaProd(mut ms) = inner {
                    self.tick("proj-beta")?;
                    return Ok(ms.swap_remove(*i));
                }
                Ok(Comp::Proj(*i, Box::new(inner)))
            }
            Comp::LambdaPi(a, body) => Ok(Comp::LambdaPi(
                Box::new(self.at("dom", |n| n.vtype(a))?),
                Box::new(self.at("lam", |n| n.comp(body))?),
            )),
            Comp::Apply(v, f) => {
                let v = self.at("arg", |n| n.value(v))?;
                let f = self.at("fun", |n| n.comp(f))?;
                if let Comp::LambdaPi(_, body) = &f {
                    self.tick("app-beta")?;
                    let b = body.subst(&v);
                    return self.comp(&b);
                }
                Ok(Comp::Apply(Box::new(v), Box::new(f)))
            }
            Comp::Let(v, body) => {
                self.tick("let")?;
                let b = body.subst(v);
                self.comp(&b)
            }
            Comp::Match(mm) => {
                let scrutinee = self.at("scrutinee", |n| n.value(&mm.scrutinee))?;
                if let Some(r) = match_redex(&scrutinee, &mm.pattern) {
                    self.tick(match_rule(&mm.pattern))?;
                    return self.comp(&r);
                }
                let motive = match &mm.motive {
                    Some(m) => Some(self.motive(m, |n, t| n.ctype(t))?),
                    None => None,
                };
                let pattern = self.pattern(&mm.pattern, |n, r| n.comp(r))?;
                Ok(Comp::Match(Box::new(Match { scrutinee, motive, pattern })))
            }
            Comp::Diverge | Comp::Error(_) => Ok(m.clone()),
            Comp::Mu(body) => Ok(Comp::Mu(Box::new(self.at("mu", |n| n.comp(body))?))),
            Comp::Print(t, body) => Ok(Comp::Print(t.clone(), Box::new(self.comp(body)?))),
            Comp::Write(s, body) => Ok(Comp::Write(s.clone(), Box::new(self.comp(body)?))),
            Comp::Choose(ms) => Ok(Comp::Choose(
                ms.iter()
                    .enumerate()
                    .map(|(i, m)| self.at(format!("choice{}", i + 1), |n| n.comp(m)))
                    .collect::<NResult<_>>()?,
            )),
            Comp::Read(arms) => Ok(Comp::Read(
                arms.iter()
                    .map(|a| {
                        Ok(ReadArm {
                            state: a.state.clone(),
                            body: self.at(a.state.clone(), |n| n.comp(&a.body))?,
                        })
                    })
                    .collect::<NResult<_>>()?,
            )),
        }
    }

    /// Rebuilds `head to x. body` from normal parts, firing the sequencing
    /// rules at the root.
    fn seq(&mut self, head: Comp, body: Comp, motive: Option<Box<Motive<CType>>>) -> NResult<Comp> {
        match (head, body) {
            (Comp::Return(v), body) => {
                self.tick("to-beta")?;
                let b = body.subst(&v);
                self.comp(&b)
            }
            (Comp::SeqTo { head: h2, body: b2, .. }, body) => {
                self.tick("to-assoc")?;
                let inner = self.seq(*b2, body.weaken_above(1, 1), None)?;
                self.seq(*h2, inner, None)
            }
            (head, Comp::LambdaProd(ns)) => {
                self.tick("to-lam-prod")?;
                let arms = ns
                    .into_iter()
                    .map(|n| self.seq(head.clone(), n, None))
                    .collect::<NResult<_>>()?;
                Ok(Comp::LambdaProd(arms))
            }
            (head, Comp::LambdaPi(dom, n)) => match dom.strengthen(1) {
                Some(dom) => {
                    self.tick("to-lam-pi")?;
                    let swapped = n.rename(swap01);
                    let inner = self.seq(head.weaken(1), swapped, None)?;
                    Ok(Comp::LambdaPi(Box::new(dom), Box::new(inner)))
                }
                None => Ok(Comp::SeqTo {
                    head: Box::new(head),
                    body: Box::new(Comp::LambdaPi(dom, n)),
                    motive,
                }),
            },
            (head, body) => Ok(Comp::SeqTo { head: Box::new(head), body: Box::new(body), motive }),
        }
    }
}

fn swap01(j: usize) -> usize {
    match j {
        0 => 1,
        1 => 0,
        j => j,
    }
}

fn match_rule<R>(p: &Pattern<R>) -> &'static str {
    match p {
        Pattern::Unit(_) => "pm-unit-beta",
        Pattern::Sum(_) => "pm-sum-beta",
        Pattern::Pair(_) => "pm-pair-beta",
        Pattern::Id(_) => "pm-id-beta",
    }
}

/// The contractum of a pattern match whose scrutinee is an introduction form.
pub fn match_redex<R: Term>(scrutinee: &Value, pattern: &Pattern<R>) -> Option<R> {
    match (scrutinee, pattern) {
        (Value::Unit, Pattern::Unit(r)) => Some(r.clone()),
        (Value::Inj(i, v), Pattern::Sum(arms)) if *i < arms.len() => Some(arms[*i].subst(v)),
        (Value::Pair(a, b), Pattern::Pair(r)) => Some(r.subst_many(&[(**b).clone(), (**a).clone()])),
        (Value::Refl(v), Pattern::Id(r)) => Some(r.subst(v)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Conversion
// ---------------------------------------------------------------------------

/// Syntactic classes that can be normalized and compared.
pub trait Convertible: Term + PartialEq {
    fn normalize_with(&self, n: &mut Normalizer) -> NResult<Self>;
    fn conv_nf(&self, other: &Self, opts: &ConvOptions) -> bool;
}

impl Convertible for Value {
    fn normalize_with(&self, n: &mut Normalizer) -> NResult<Self> {
        n.value(self)
    }
    fn conv_nf(&self, other: &Self, opts: &ConvOptions) -> bool {
        conv_value(self, other, opts)
    }
}

impl Convertible for Comp {
    fn normalize_with(&self, n: &mut Normalizer) -> NResult<Self> {
        n.comp(self)
    }
    fn conv_nf(&self, other: &Self, opts: &ConvOptions) -> bool {
        conv_comp(self, other, opts)
    }
}

impl Convertible for VType {
    fn normalize_with(&self, n: &mut Normalizer) -> NResult<Self> {
        n.vtype(self)
    }
    fn conv_nf(&self, other: &Self, opts: &ConvOptions) -> bool {
        conv_vtype(self, other, opts)
    }
}

impl Convertible for CType {
    fn normalize_with(&self, n: &mut Normalizer) -> NResult<Self> {
        n.ctype(self)
    }
    fn conv_nf(&self, other: &Self, opts: &ConvOptions) -> bool {
        conv_ctype(self, other, opts)
    }
}

pub fn normalize<T: Convertible>(t: &T, opts: &ConvOptions) -> NResult<T> {
    t.normalize_with(&mut Normalizer::new(opts))
}

/// Normalizes and returns the rewrite log.
pub fn normalize_explained<T: Convertible>(
    t: &T,
    opts: &ConvOptions,
) -> NResult<(T, Vec<RewriteStep>)> {
    let mut n = Normalizer::with_log(opts);
    let out = t.normalize_with(&mut n)?;
    Ok((out, n.take_log()))
}

pub fn convertible<T: Convertible>(a: &T, b: &T, opts: &ConvOptions) -> NResult<bool> {
    if a == b {
        return Ok(true);
    }
    let mut n = Normalizer::new(opts);
    let a = a.normalize_with(&mut n)?;
    let b = b.normalize_with(&mut n)?;
    Ok(a.conv_nf(&b, opts))
}

fn conv_vtype(a: &VType, b: &VType, o: &ConvOptions) -> bool {
    match (a, b) {
        (VType::U(x), VType::U(y)) => conv_ctype(x, y, o),
        (VType::Unit, VType::Unit) => true,
        (VType::Sum(xs), VType::Sum(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| conv_vtype(x, y, o))
        }
        (VType::Sigma(a1, b1), VType::Sigma(a2, b2)) => conv_vtype(a1, a2, o) && conv_vtype(b1, b2, o),
        (VType::Id(a1, l1, r1), VType::Id(a2, l2, r2)) => {
            if !conv_vtype(a1, a2, o) {
                return false;
            }
            // Identity proofs are unique under Id-η.
            if o.eta_id && matches!(**a1, VType::Id(..)) {
                return true;
            }
            conv_value(l1, l2, o) && conv_value(r1, r2, o)
        }
        _ => false,
    }
}

fn conv_ctype(a: &CType, b: &CType, o: &ConvOptions) -> bool {
    match (a, b) {
        (CType::F(x), CType::F(y)) => conv_vtype(x, y, o),
        (CType::Prod(xs), CType::Prod(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| conv_ctype(x, y, o))
        }
        (CType::Pi(a1, b1), CType::Pi(a2, b2)) => conv_vtype(a1, a2, o) && conv_ctype(b1, b2, o),
        _ => false,
    }
}

fn conv_value(a: &Value, b: &Value, o: &ConvOptions) -> bool {
    match (a, b) {
        (Value::Var(i), Value::Var(j)) => i == j,
        (Value::Unit, Value::Unit) => true,
        (Value::Thunk(m), Value::Thunk(n)) => conv_comp(m, n, o),
        (Value::Thunk(m), w) | (w, Value::Thunk(m)) if o.eta_fun_prod_thunk => {
            conv_comp(m, &Comp::Force(w.clone()), o)
        }
        (Value::Inj(i, x), Value::Inj(j, y)) => i == j && conv_value(x, y, o),
        (Value::Pair(a1, b1), Value::Pair(a2, b2)) => conv_value(a1, a2, o) && conv_value(b1, b2, o),
        (Value::Refl(x), Value::Refl(y)) => conv_value(x, y, o),
        (Value::Let(v1, r1), Value::Let(v2, r2)) => conv_value(v1, v2, o) && conv_value(r1, r2, o),
        (Value::Match(m1), Value::Match(m2)) => {
            conv_value(&m1.scrutinee, &m2.scrutinee, o)
                && conv_pattern(&m1.pattern, &m2.pattern, |x, y| conv_value(x, y, o))
        }
        _ => false,
    }
}

fn conv_pattern<R>(p: &Pattern<R>, q: &Pattern<R>, f: impl Fn(&R, &R) -> bool) -> bool {
    match (p, q) {
        (Pattern::Unit(a), Pattern::Unit(b))
        | (Pattern::Pair(a), Pattern::Pair(b))
        | (Pattern::Id(a), Pattern::Id(b)) => f(a, b),
        (Pattern::Sum(xs), Pattern::Sum(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| f(x, y))
        }
        _ => false,
    }
}

/// Compares normal forms, ignoring motives and λ domain annotations, with
/// intro-driven η for finite products and Π.
fn conv_comp(a: &Comp, b: &Comp, o: &ConvOptions) -> bool {
    match (a, b) {
        (Comp::Return(x), Comp::Return(y)) => conv_value(x, y, o),
        (Comp::SeqTo { head: h1, body: b1, .. }, Comp::SeqTo { head: h2, body: b2, .. }) => {
            conv_comp(h1, h2, o) && conv_comp(b1, b2, o)
        }
        (Comp::Force(x), Comp::Force(y)) => conv_value(x, y, o),
        (Comp::LambdaProd(xs), Comp::LambdaProd(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| conv_comp(x, y, o))
        }
        (Comp::LambdaProd(xs), other) | (other, Comp::LambdaProd(xs)) if o.eta_fun_prod_thunk => xs
            .iter()
            .enumerate()
            .all(|(i, x)| conv_comp(x, &Comp::Proj(i, Box::new(other.clone())), o)),
        (Comp::Proj(i, x), Comp::Proj(j, y)) => i == j && conv_comp(x, y, o),
        (Comp::LambdaPi(_, x), Comp::LambdaPi(_, y)) => conv_comp(x, y, o),
        (Comp::LambdaPi(_, x), other) | (other, Comp::LambdaPi(_, x)) if o.eta_fun_prod_thunk => {
            conv_comp(x, &Comp::apply(Value::Var(0), other.weaken(1)), o)
        }
        (Comp::Apply(v1, m1), Comp::Apply(v2, m2)) => conv_value(v1, v2, o) && conv_comp(m1, m2, o),
        (Comp::Let(v1, m1), Comp::Let(v2, m2)) => conv_value(v1, v2, o) && conv_comp(m1, m2, o),
        (Comp::Match(m1), Comp::Match(m2)) => {
            conv_value(&m1.scrutinee, &m2.scrutinee, o)
                && conv_pattern(&m1.pattern, &m2.pattern, |x, y| conv_comp(x, y, o))
        }
        (Comp::Diverge, Comp::Diverge) => true,
        (Comp::Mu(x), Comp::Mu(y)) => conv_comp(x, y, o),
        (Comp::Print(s, x), Comp::Print(t, y)) | (Comp::Write(s, x), Comp::Write(t, y)) => {
            s == t && conv_comp(x, y, o)
        }
        (Comp::Choose(xs), Comp::Choose(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| conv_comp(x, y, o))
        }
        (Comp::Error(e), Comp::Error(f)) => e == f,
        (Comp::Read(xs), Comp::Read(ys)) => {
            xs.len() == ys.len()
                && xs.iter().zip(ys).all(|(x, y)| x.state == y.state && conv_comp(&x.body, &y.body, o))
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Complex-value elimination
// ---------------------------------------------------------------------------

type Kont<'a> = dyn Fn(Value, usize) -> Comp + 'a;

/// Rewrites a computation so every value in computation position is simple.
/// Types and motives are left as they are.
pub fn eliminate_complex_values(m: &Comp) -> Comp {
    match m {
        Comp::Return(v) => hoist(v, &|s, _| Comp::Return(s)),
        Comp::Force(v) => hoist(v, &|s, _| Comp::Force(s)),
        Comp::SeqTo { head, body, motive } => Comp::SeqTo {
            head: Box::new(eliminate_complex_values(head)),
            body: Box::new(eliminate_complex_values(body)),
            motive: motive.clone(),
        },
        Comp::LambdaProd(ms) => Comp::LambdaProd(ms.iter().map(eliminate_complex_values).collect()),
        Comp::Proj(i, inner) => Comp::Proj(*i, Box::new(eliminate_complex_values(inner))),
        Comp::LambdaPi(a, body) => Comp::LambdaPi(a.clone(), Box::new(eliminate_complex_values(body))),
        Comp::Apply(v, f) => {
            let f = eliminate_complex_values(f);
            hoist(v, &|s, n| Comp::Apply(Box::new(s), Box::new(f.weaken(n))))
        }
        Comp::Let(v, body) => {
            let body = eliminate_complex_values(body);
            hoist(v, &|s, n| Comp::Let(Box::new(s), Box::new(body.weaken_above(1, n))))
        }
        Comp::Match(mm) => {
            let pattern = mm
                .pattern
                .try_map::<_, ()>(|r, _| Ok(eliminate_complex_values(r)))
                .expect("infallible");
            let motive = mm.motive.clone();
            let arity = mm.pattern.motive_arity();
            hoist(&mm.scrutinee, &|s, n| {
                Comp::Match(Box::new(Match {
                    scrutinee: s,
                    motive: motive.as_ref().map(|mo| weaken_motive(mo, arity, n)),
                    pattern: pattern
                        .try_map::<_, ()>(|r, k| Ok(r.weaken_above(k, n)))
                        .expect("infallible"),
                }))
            })
        }
        Comp::Diverge | Comp::Error(_) => m.clone(),
        Comp::Mu(body) => Comp::Mu(Box::new(eliminate_complex_values(body))),
        Comp::Print(t, body) => Comp::Print(t.clone(), Box::new(eliminate_complex_values(body))),
        Comp::Write(s, body) => Comp::Write(s.clone(), Box::new(eliminate_complex_values(body))),
        Comp::Choose(ms) => Comp::Choose(ms.iter().map(eliminate_complex_values).collect()),
        Comp::Read(arms) => Comp::Read(
            arms.iter()
                .map(|a| ReadArm { state: a.state.clone(), body: eliminate_complex_values(&a.body) })
                .collect(),
        ),
    }
}

fn is_ascription(mm: &Match<Value, VType>) -> bool {
    mm.scrutinee == Value::Unit
        && matches!(mm.pattern, Pattern::Unit(_))
        && mm.motive.as_ref().is_some_and(|m| m.ext.is_empty())
}

fn weaken_motive<T: Term>(m: &Motive<T>, arity: usize, n: usize) -> Motive<T> {
    if n == 0 {
        return m.clone();
    }
    m.map_vars(arity, 0, &mut |j, d| Ok(Value::Var(j + n + d)))
        .expect("weakening is total")
}

/// CPS traversal of a value: `k` receives a simple value valid under `n`
/// extra binders introduced by hoisted eliminations.
fn hoist(v: &Value, k: &Kont<'_>) -> Comp {
    match v {
        Value::Var(_) | Value::Unit => k(v.clone(), 0),
        Value::Thunk(m) => k(Value::Thunk(Box::new(eliminate_complex_values(m))), 0),
        Value::Inj(i, w) => hoist(w, &|s, n| k(Value::Inj(*i, Box::new(s)), n)),
        Value::Refl(w) => hoist(w, &|s, n| k(Value::Refl(Box::new(s)), n)),
        Value::Pair(a, b) => hoist(a, &|sa, n| {
            hoist(&b.weaken(n), &|sb, n2| k(Value::pair(sa.weaken(n2), sb), n + n2))
        }),
        Value::Let(w, r) => hoist(w, &|sw, n| {
            let r = r.weaken_above(1, n);
            Comp::seq(Comp::Return(sw), hoist(&r, &|sr, n2| k(sr, n + 1 + n2)))
        }),
        // `(W : A)` becomes `(return W : F A) to x. ..`, keeping the type.
        Value::Match(mm) if is_ascription(mm) => {
            let mo = mm.motive.as_ref().expect("ascriptions carry a motive");
            let Pattern::Unit(w) = &mm.pattern else { unreachable!() };
            hoist(w, &|sw, n| {
                let a = weaken_motive(mo, 1, n).result;
                let head = Comp::Match(Box::new(Match {
                    scrutinee: Value::Unit,
                    motive: Some(Motive::new(CType::F(Box::new(a)))),
                    pattern: Pattern::Unit(Comp::Return(sw)),
                }));
                Comp::seq(head, k(Value::Var(0), n + 1))
            })
        }
        Value::Match(mm) => hoist(&mm.scrutinee, &|s, n| {
            let pattern = mm
                .pattern
                .try_map::<_, ()>(|r, kb| {
                    let r = r.weaken_above(kb, n);
                    Ok(hoist(&r, &|sr, n2| k(sr, n + kb + n2)))
                })
                .expect("infallible");
            Comp::Match(Box::new(Match { scrutinee: s, motive: None, pattern }))
        }),
    }
}

// ---------------------------------------------------------------------------
// Effect coercion
// ---------------------------------------------------------------------------

const SHRINK_NODE_CAP: usize = 4096;

/// Can `wanted` be rewritten into `candidate` by effect transitions applied
/// to thunked computations inside the type, up to conversion?
pub fn shrink_check(candidate: &CType, wanted: &CType, opts: &ConvOptions) -> bool {
    let Ok(cand) = normalize(candidate, opts) else { return false };
    let mut hit = false;
    shrink_search(wanted, opts, |t| {
        hit = cand.conv_nf(t, opts);
        hit
    });
    hit
}

/// Every type `wanted` rewrites to by effect transitions, nearest first,
/// normalized. `wanted` itself comes first.
pub fn shrink_reachable(wanted: &CType, opts: &ConvOptions) -> Vec<CType> {
    let mut out = Vec::new();
    shrink_search(wanted, opts, |t| {
        out.push(t.clone());
        false
    });
    out
}

/// Breadth-first search over effect transitions; stops when `visit` returns
/// true.
fn shrink_search(wanted: &CType, opts: &ConvOptions, mut visit: impl FnMut(&CType) -> bool) {
    let Ok(start) = normalize(wanted, opts) else { return };
    let mut seen: HashSet<CType> = HashSet::new();
    seen.insert(start.clone());
    let mut frontier = vec![start];
    for depth in 0..=opts.shrink_fuel {
        if frontier.iter().any(&mut visit) {
            return;
        }
        if depth == opts.shrink_fuel {
            return;
        }
        let mut next = Vec::new();
        for t in &frontier {
            for s in succ_ctype(t) {
                let Ok(s) = normalize(&s, opts) else { continue };
                if seen.insert(s.clone()) {
                    next.push(s);
                }
            }
        }
        if next.is_empty() || seen.len() > SHRINK_NODE_CAP {
            return;
        }
        frontier = next;
    }
}

/// One effect transition of a computation, at its evaluation position,
/// ignoring the printing and state hardware.
pub fn effect_successors(m: &Comp) -> Vec<Comp> {
    match m {
        Comp::Print(_, body) | Comp::Write(_, body) => vec![(**body).clone()],
        Comp::Choose(ms) => ms.clone(),
        Comp::Read(arms) => arms.iter().map(|a| a.body.clone()).collect(),
        Comp::Mu(body) => vec![body.subst(&Value::Thunk(Box::new(m.clone())))],
        Comp::SeqTo { head, body, motive } => effect_successors(head)
            .into_iter()
            .map(|h| Comp::SeqTo { head: Box::new(h), body: body.clone(), motive: motive.clone() })
            .collect(),
        Comp::Proj(i, inner) => effect_successors(inner)
            .into_iter()
            .map(|h| Comp::Proj(*i, Box::new(h)))
            .collect(),
        Comp::Apply(v, inner) => effect_successors(inner)
            .into_iter()
            .map(|h| Comp::Apply(v.clone(), Box::new(h)))
            .collect(),
        _ => Vec::new(),
    }
}

fn succ_ctype(b: &CType) -> Vec<CType> {
    match b {
        CType::F(a) => succ_vtype(a).into_iter().map(CType::f).collect(),
        CType::Prod(arms) => splice(arms, succ_ctype).into_iter().map(CType::Prod).collect(),
        CType::Pi(a, c) => {
            let mut out: Vec<CType> =
                succ_vtype(a).into_iter().map(|a2| CType::Pi(Box::new(a2), c.clone())).collect();
            out.extend(succ_ctype(c).into_iter().map(|c2| CType::Pi(a.clone(), Box::new(c2))));
            out
        }
    }
}

fn succ_vtype(a: &VType) -> Vec<VType> {
    match a {
        VType::U(b) => succ_ctype(b).into_iter().map(VType::u).collect(),
        VType::Unit => Vec::new(),
        VType::Sum(arms) => splice(arms, succ_vtype).into_iter().map(VType::Sum).collect(),
        VType::Sigma(x, y) => {
            let mut out: Vec<VType> =
                succ_vtype(x).into_iter().map(|x2| VType::Sigma(Box::new(x2), y.clone())).collect();
            out.extend(succ_vtype(y).into_iter().map(|y2| VType::Sigma(x.clone(), Box::new(y2))));
            out
        }
        VType::Id(c, l, r) => {
            let mut out: Vec<VType> = succ_vtype(c)
                .into_iter()
                .map(|c2| VType::Id(Box::new(c2), l.clone(), r.clone()))
                .collect();
            out.extend(
                succ_value(l).into_iter().map(|l2| VType::Id(c.clone(), Box::new(l2), r.clone())),
            );
            out.extend(
                succ_value(r).into_iter().map(|r2| VType::Id(c.clone(), l.clone(), Box::new(r2))),
            );
            out
        }
    }
}

fn succ_value(v: &Value) -> Vec<Value> {
    match v {
        Value::Thunk(m) => effect_successors(m).into_iter().map(Value::thunk).collect(),
        Value::Inj(i, w) => succ_value(w).into_iter().map(|w2| Value::inj(*i, w2)).collect(),
        Value::Refl(w) => succ_value(w).into_iter().map(Value::refl).collect(),
        Value::Pair(a, b) => {
            let mut out: Vec<Value> =
                succ_value(a).into_iter().map(|a2| Value::pair(a2, (**b).clone())).collect();
            out.extend(succ_value(b).into_iter().map(|b2| Value::pair((**a).clone(), b2)));
            out
        }
        _ => Vec::new(),
    }
}

fn splice<T: Clone>(items: &[T], f: impl Fn(&T) -> Vec<T>) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for (i, it) in items.iter().enumerate() {
        for replacement in f(it) {
            let mut v = items.to_vec();
            v[i] = replacement;
            out.push(v);
        }
    }
    out
}
