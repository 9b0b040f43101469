//! Finite-set denotational model.
//!
//! Value types denote finite sets and computation types denote algebras for
//! a monad on sets, both indexed by environments. Two monads are supported:
//! exceptions `X + E` (which also has dependent Kleisli extensions) and a
//! writer `M × X` over a finite monoid (non-dependent sequencing only).
//! Equations are checked by enumerating every environment of a context.
//!
//! Elements are untyped trees. `U B` is interpreted by the carrier of `B`
//! itself, so a thunk denotes the element its computation denotes. An error
//! point `Err(e)` stands for the designated point of `e` in any exception
//! algebra; [`sem_eq`] unfolds it through products and functions.

use std::fmt;

use thiserror::Error;

use crate::syntax::{CType, Comp, Context, FiniteMonoid, Match, Pattern, VType, Value};

pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("recursion and divergence have no finite model")]
    InfiniteModel,
    #[error("effect `{0}` is not interpreted by this model")]
    UnsupportedEffect(String),
    #[error("the writer model has no dependent Kleisli extensions")]
    NoDependentKleisli,
    #[error("more than {0} elements or environments")]
    CapExceeded(usize),
    #[error("ill-typed term: {0}")]
    IllTyped(String),
    #[error("algebra law fails: {0}")]
    AlgebraLaw(String),
}

pub type MResult<T> = Result<T, ModelError>;

/// The monad the model is built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FinMonadSpec {
    Exception(Vec<String>),
    Writer(FiniteMonoid),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Elem {
    Unit,
    Inj(usize, Box<Elem>),
    Pair(Box<Elem>, Box<Elem>),
    /// The sole inhabitant of an identity fiber, carrying its endpoint.
    Refl(Box<Elem>),
    /// `inl a` in `A + E`.
    Ret(Box<Elem>),
    /// The point of error `e` in any exception algebra.
    Err(String),
    /// `(m, a)` in `M × A`; `m` indexes the monoid.
    Out(usize, Box<Elem>),
    /// Element of a finite product of algebras.
    Tuple(Vec<Elem>),
    /// Graph of a function on a finite domain.
    Fun(Vec<(Elem, Elem)>),
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Unit => write!(f, "()"),
            Elem::Inj(i, a) => write!(f, "({}, {a})", i + 1),
            Elem::Pair(a, b) => write!(f, "({a}, {b})"),
            Elem::Refl(a) => write!(f, "refl {a}"),
            Elem::Ret(a) => write!(f, "ret {a}"),
            Elem::Err(e) => write!(f, "err {e}"),
            Elem::Out(m, a) => write!(f, "<m{m}, {a}>"),
            Elem::Tuple(xs) => {
                write!(f, "{{")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "}}")
            }
            Elem::Fun(g) => {
                write!(f, "[")?;
                for (i, (a, b)) in g.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a} ↦ {b}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Semantic equality of elements.
pub fn sem_eq(x: &Elem, y: &Elem) -> bool {
    use Elem::*;
    match (x, y) {
        (Err(e), Err(e2)) => e == e2,
        (Err(_), Tuple(ys)) => ys.iter().all(|y| sem_eq(x, y)),
        (Tuple(_), Err(_)) => sem_eq(y, x),
        (Err(_), Fun(g)) => g.iter().all(|(_, b)| sem_eq(x, b)),
        (Fun(_), Err(_)) => sem_eq(y, x),
        (Unit, Unit) => true,
        (Inj(i, a), Inj(j, b)) => i == j && sem_eq(a, b),
        (Pair(a, b), Pair(c, d)) => sem_eq(a, c) && sem_eq(b, d),
        (Refl(a), Refl(b)) | (Ret(a), Ret(b)) => sem_eq(a, b),
        (Out(m, a), Out(n, b)) => m == n && sem_eq(a, b),
        (Tuple(xs), Tuple(ys)) => xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| sem_eq(a, b)),
        (Fun(f), Fun(g)) => {
            f.len() == g.len()
                && f.iter().all(|(a, b)| g.iter().any(|(c, d)| sem_eq(a, c) && sem_eq(b, d)))
        }
        _ => false,
    }
}

fn contains(xs: &[Elem], x: &Elem) -> bool {
    xs.iter().any(|y| sem_eq(x, y))
}

/// Index set of a base type, `Sum(Unit, .., Unit)` with `k` summands.
pub fn base_type(k: usize) -> VType {
    VType::Sum(vec![VType::Unit; k])
}

/// The interpretation, parameterised by the monad.
#[derive(Debug, Clone)]
pub struct Model {
    pub monad: FinMonadSpec,
    pub cap: usize,
}

impl Model {
    pub fn exception(errors: &[&str]) -> Self {
        Model {
            monad: FinMonadSpec::Exception(errors.iter().map(|e| e.to_string()).collect()),
            cap: DEFAULT_CAP,
        }
    }

    pub fn writer(m: FiniteMonoid) -> Self {
        Model { monad: FinMonadSpec::Writer(m), cap: DEFAULT_CAP }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    fn lookup<'e>(&self, env: &'e [Elem], i: usize) -> MResult<&'e Elem> {
        env.len()
            .checked_sub(i + 1)
            .map(|k| &env[k])
            .ok_or_else(|| ModelError::IllTyped(format!("unbound variable {i}")))
    }

    fn check_size(&self, n: usize) -> MResult<()> {
        if n > self.cap {
            Err(ModelError::CapExceeded(self.cap))
        } else {
            Ok(())
        }
    }

    /// Elements of a value type in an environment.
    pub fn elements(&self, env: &[Elem], a: &VType) -> MResult<Vec<Elem>> {
        match a {
            VType::Unit => Ok(vec![Elem::Unit]),
            VType::U(b) => self.carrier(env, b),
            VType::Sum(arms) => {
                let mut out = Vec::new();
                for (i, arm) in arms.iter().enumerate() {
                    for x in self.elements(env, arm)? {
                        out.push(Elem::Inj(i, Box::new(x)));
                    }
                    self.check_size(out.len())?;
                }
                Ok(out)
            }
            VType::Sigma(a, b) => {
                let mut out = Vec::new();
                for x in self.elements(env, a)? {
                    let mut env2 = env.to_vec();
                    env2.push(x.clone());
                    for y in self.elements(&env2, b)? {
                        out.push(Elem::Pair(Box::new(x.clone()), Box::new(y)));
                    }
                    self.check_size(out.len())?;
                }
                Ok(out)
            }
            VType::Id(_, l, r) => {
                let l = self.value(env, l)?;
                let r = self.value(env, r)?;
                Ok(if sem_eq(&l, &r) { vec![Elem::Refl(Box::new(l))] } else { Vec::new() })
            }
        }
    }

    /// Carrier of the algebra denoted by a computation type.
    pub fn carrier(&self, env: &[Elem], b: &CType) -> MResult<Vec<Elem>> {
        match b {
            CType::F(a) => {
                let xs = self.elements(env, a)?;
                match &self.monad {
                    FinMonadSpec::Exception(errs) => {
                        self.check_size(xs.len() + errs.len())?;
                        let mut out: Vec<Elem> = xs.into_iter().map(|x| Elem::Ret(Box::new(x))).collect();
                        out.extend(errs.iter().map(|e| Elem::Err(e.clone())));
                        Ok(out)
                    }
                    FinMonadSpec::Writer(m) => {
                        self.check_size(xs.len().saturating_mul(m.len()))?;
                        let mut out = Vec::new();
                        for k in 0..m.len() {
                            for x in &xs {
                                out.push(Elem::Out(k, Box::new(x.clone())));
                            }
                        }
                        Ok(out)
                    }
                }
            }
            CType::Prod(arms) => {
                let fibers = arms.iter().map(|c| self.carrier(env, c)).collect::<MResult<Vec<_>>>()?;
                let n = fibers.iter().try_fold(1usize, |n, f| n.checked_mul(f.len()));
                self.check_size(n.unwrap_or(usize::MAX))?;
                Ok(product(&fibers).into_iter().map(Elem::Tuple).collect())
            }
            CType::Pi(a, c) => {
                let dom = self.elements(env, a)?;
                let mut fibers = Vec::with_capacity(dom.len());
                for x in &dom {
                    let mut env2 = env.to_vec();
                    env2.push(x.clone());
                    fibers.push(self.carrier(&env2, c)?);
                }
                let n = fibers.iter().try_fold(1usize, |n, f| n.checked_mul(f.len()));
                self.check_size(n.unwrap_or(usize::MAX))?;
                Ok(product(&fibers)
                    .into_iter()
                    .map(|outs| Elem::Fun(dom.iter().cloned().zip(outs).collect()))
                    .collect())
            }
        }
    }

    /// Denotation of a value in an environment.
    pub fn value(&self, env: &[Elem], v: &Value) -> MResult<Elem> {
        match v {
            Value::Var(i) => self.lookup(env, *i).cloned(),
            Value::Thunk(m) => self.comp(env, m),
            Value::Unit => Ok(Elem::Unit),
            Value::Inj(i, v) => Ok(Elem::Inj(*i, Box::new(self.value(env, v)?))),
            Value::Pair(a, b) => Ok(Elem::Pair(Box::new(self.value(env, a)?), Box::new(self.value(env, b)?))),
            Value::Refl(a) => Ok(Elem::Refl(Box::new(self.value(env, a)?))),
            Value::Let(v, body) => {
                let x = self.value(env, v)?;
                self.value(&pushed(env, [x]), body)
            }
            Value::Match(mt) => self.eliminate(env, mt, |env, r| self.value(env, r)),
        }
    }

    fn eliminate<R, T>(
        &self,
        env: &[Elem],
        mt: &Match<R, T>,
        arm: impl Fn(&[Elem], &R) -> MResult<Elem>,
    ) -> MResult<Elem> {
        let s = self.value(env, &mt.scrutinee)?;
        match (&mt.pattern, &s) {
            (Pattern::Unit(r), Elem::Unit) => arm(env, r),
            (Pattern::Sum(arms), Elem::Inj(i, x)) if *i < arms.len() => {
                arm(&pushed(env, [(**x).clone()]), &arms[*i])
            }
            (Pattern::Pair(r), Elem::Pair(a, b)) => arm(&pushed(env, [(**a).clone(), (**b).clone()]), r),
            (Pattern::Id(r), Elem::Refl(a)) => arm(&pushed(env, [(**a).clone()]), r),
            _ => Err(ModelError::IllTyped(format!("cannot match {s}"))),
        }
    }

    /// Denotation of a computation in an environment.
    pub fn comp(&self, env: &[Elem], m: &Comp) -> MResult<Elem> {
        match m {
            Comp::Return(v) => {
                let x = self.value(env, v)?;
                Ok(match &self.monad {
                    FinMonadSpec::Exception(_) => Elem::Ret(Box::new(x)),
                    FinMonadSpec::Writer(mon) => Elem::Out(mon.unit(), Box::new(x)),
                })
            }
            Comp::SeqTo { head, body, motive } => {
                if motive.is_some() && matches!(self.monad, FinMonadSpec::Writer(_)) {
                    return Err(ModelError::NoDependentKleisli);
                }
                match self.comp(env, head)? {
                    Elem::Ret(a) => self.comp(&pushed(env, [*a]), body),
                    Elem::Err(e) => Ok(Elem::Err(e)),
                    Elem::Out(k, a) => {
                        let y = self.comp(&pushed(env, [*a]), body)?;
                        self.act(k, y)
                    }
                    other => Err(ModelError::IllTyped(format!("sequencing {other}"))),
                }
            }
            Comp::Force(v) => self.value(env, v),
            Comp::LambdaProd(arms) => {
                Ok(Elem::Tuple(arms.iter().map(|c| self.comp(env, c)).collect::<MResult<_>>()?))
            }
            Comp::Proj(i, m) => match self.comp(env, m)? {
                Elem::Tuple(mut xs) if *i < xs.len() => Ok(xs.swap_remove(*i)),
                Elem::Err(e) => Ok(Elem::Err(e)),
                other => Err(ModelError::IllTyped(format!("projecting {other}"))),
            },
            Comp::LambdaPi(a, body) => {
                let dom = self.elements(env, a)?;
                let mut graph = Vec::with_capacity(dom.len());
                for x in dom {
                    let y = self.comp(&pushed(env, [x.clone()]), body)?;
                    graph.push((x, y));
                }
                Ok(Elem::Fun(graph))
            }
            Comp::Apply(v, m) => {
                let x = self.value(env, v)?;
                match self.comp(env, m)? {
                    Elem::Fun(g) => g
                        .into_iter()
                        .find(|(a, _)| sem_eq(a, &x))
                        .map(|(_, b)| b)
                        .ok_or_else(|| ModelError::IllTyped(format!("{x} outside the domain"))),
                    Elem::Err(e) => Ok(Elem::Err(e)),
                    other => Err(ModelError::IllTyped(format!("applying {other}"))),
                }
            }
            Comp::Let(v, body) => {
                let x = self.value(env, v)?;
                self.comp(&pushed(env, [x]), body)
            }
            Comp::Match(mt) => self.eliminate(env, mt, |env, r| self.comp(env, r)),
            Comp::Error(e) => match &self.monad {
                FinMonadSpec::Exception(errs) if errs.contains(e) => Ok(Elem::Err(e.clone())),
                _ => Err(ModelError::UnsupportedEffect(format!("error {e}"))),
            },
            Comp::Print(tok, m) => match &self.monad {
                FinMonadSpec::Writer(mon) => {
                    let k = mon
                        .index_of(tok)
                        .ok_or_else(|| ModelError::UnsupportedEffect(format!("print {tok:?}")))?;
                    let y = self.comp(env, m)?;
                    self.act(k, y)
                }
                _ => Err(ModelError::UnsupportedEffect("print".into())),
            },
            Comp::Diverge | Comp::Mu(_) => Err(ModelError::InfiniteModel),
            Comp::Choose(_) => Err(ModelError::UnsupportedEffect("choose".into())),
            Comp::Write(..) | Comp::Read(_) => Err(ModelError::UnsupportedEffect("state".into())),
        }
    }

    /// Writer action `m · x`, componentwise on products and pointwise on
    /// functions.
    fn act(&self, k: usize, x: Elem) -> MResult<Elem> {
        let FinMonadSpec::Writer(mon) = &self.monad else {
            return Err(ModelError::IllTyped("action outside the writer model".into()));
        };
        Ok(match x {
            Elem::Out(n, a) => Elem::Out(mon.mul(k, n), a),
            Elem::Tuple(xs) => Elem::Tuple(xs.into_iter().map(|x| self.act(k, x)).collect::<MResult<_>>()?),
            Elem::Fun(g) => {
                Elem::Fun(g.into_iter().map(|(a, b)| Ok((a, self.act(k, b)?))).collect::<MResult<_>>()?)
            }
            other => return Err(ModelError::IllTyped(format!("acting on {other}"))),
        })
    }

    /// Calls `visit` on every environment of `ctx` in lexicographic order
    /// until it returns `false`. Returns the number of environments visited.
    pub fn for_each_env(
        &self,
        ctx: &Context,
        mut visit: impl FnMut(&[Elem]) -> MResult<bool>,
    ) -> MResult<usize> {
        let mut count = 0;
        let mut env = Vec::with_capacity(ctx.len());
        self.envs_from(&ctx.values, &mut env, &mut count, &mut visit)?;
        Ok(count)
    }

    fn envs_from(
        &self,
        tys: &[VType],
        env: &mut Vec<Elem>,
        count: &mut usize,
        visit: &mut dyn FnMut(&[Elem]) -> MResult<bool>,
    ) -> MResult<bool> {
        let Some(a) = tys.get(env.len()) else {
            *count += 1;
            self.check_size(*count)?;
            return visit(env);
        };
        for x in self.elements(env, a)? {
            env.push(x);
            let go_on = self.envs_from(tys, env, count, visit)?;
            env.pop();
            if !go_on {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every environment of a context.
    pub fn environments(&self, ctx: &Context) -> MResult<Vec<Vec<Elem>>> {
        let mut out = Vec::new();
        self.for_each_env(ctx, |env| {
            out.push(env.to_vec());
            Ok(true)
        })?;
        Ok(out)
    }

    /// Compares two computations in every environment of `ctx`.
    pub fn check_equation(&self, ctx: &Context, lhs: &Comp, rhs: &Comp) -> MResult<Verdict> {
        self.check_with(ctx, |env| Ok((self.comp(env, lhs)?, self.comp(env, rhs)?)))
    }

    /// Compares two values in every environment of `ctx`.
    pub fn check_value_equation(&self, ctx: &Context, lhs: &Value, rhs: &Value) -> MResult<Verdict> {
        self.check_with(ctx, |env| Ok((self.value(env, lhs)?, self.value(env, rhs)?)))
    }

    fn check_with(&self, ctx: &Context, eval: impl Fn(&[Elem]) -> MResult<(Elem, Elem)>) -> MResult<Verdict> {
        let mut found = None;
        let visited = self.for_each_env(ctx, |env| {
            let (l, r) = eval(env)?;
            if sem_eq(&l, &r) {
                Ok(true)
            } else {
                found = Some(Verdict::Counterexample { env: env.to_vec(), lhs: l, rhs: r });
                Ok(false)
            }
        });
        match visited {
            Ok(environments) => Ok(found.unwrap_or(Verdict::Equal { environments })),
            Err(ModelError::CapExceeded(cap)) => Ok(Verdict::CapExceeded { cap }),
            Err(e) => Err(e),
        }
    }

    /// The algebra a computation type denotes, fiber by fiber.
    pub fn interp_ctype(&self, ctx: &Context, b: &CType) -> MResult<SemCType> {
        let mut fibers = Vec::new();
        self.for_each_env(ctx, |env| {
            let carrier = self.carrier(env, b)?;
            let alg = Algebra { carrier };
            self.check_algebra(&alg)?;
            fibers.push((env.to_vec(), alg));
            Ok(true)
        })?;
        Ok(SemCType { fibers })
    }

    /// The set a value type denotes, fiber by fiber.
    pub fn interp_vtype(&self, ctx: &Context, a: &VType) -> MResult<SemVType> {
        let mut fibers = Vec::new();
        self.for_each_env(ctx, |env| {
            fibers.push((env.to_vec(), self.elements(env, a)?));
            Ok(true)
        })?;
        Ok(SemVType { fibers })
    }

    /// Algebra structure `T X → X` applied to an element of `T X`.
    pub fn structure(&self, t: &Elem) -> MResult<Elem> {
        match (&self.monad, t) {
            (FinMonadSpec::Exception(_), Elem::Ret(x)) => Ok((**x).clone()),
            (FinMonadSpec::Exception(_), Elem::Err(e)) => Ok(Elem::Err(e.clone())),
            (FinMonadSpec::Writer(_), Elem::Out(k, x)) => self.act(*k, (**x).clone()),
            _ => Err(ModelError::IllTyped(format!("{t} is not in T X"))),
        }
    }

    /// Checks the unit and multiplication laws of an algebra by
    /// enumerating `T X` and `T T X`.
    pub fn check_algebra(&self, alg: &Algebra) -> MResult<()> {
        let xs = &alg.carrier;
        let lift = |x: &Elem| match &self.monad {
            FinMonadSpec::Exception(_) => Elem::Ret(Box::new(x.clone())),
            FinMonadSpec::Writer(m) => Elem::Out(m.unit(), Box::new(x.clone())),
        };
        for x in xs {
            if !sem_eq(&self.structure(&lift(x))?, x) {
                return Err(ModelError::AlgebraLaw(format!("unit law at {x}")));
            }
        }
        match &self.monad {
            FinMonadSpec::Exception(errs) => {
                for e in errs {
                    if !contains(xs, &Elem::Err(e.clone())) && !xs.is_empty() {
                        return Err(ModelError::AlgebraLaw(format!("point of {e} outside the carrier")));
                    }
                }
            }
            FinMonadSpec::Writer(m) => {
                for x in xs {
                    for a in 0..m.len() {
                        let ax = self.act(a, x.clone())?;
                        if !contains(xs, &ax) {
                            return Err(ModelError::AlgebraLaw(format!("m{a} · {x} outside the carrier")));
                        }
                        for b in 0..m.len() {
                            let lhs = self.act(a, self.act(b, x.clone())?)?;
                            let rhs = self.act(m.mul(a, b), x.clone())?;
                            if !sem_eq(&lhs, &rhs) {
                                return Err(ModelError::AlgebraLaw(format!("multiplication law at {x}")));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn pushed<const N: usize>(env: &[Elem], xs: [Elem; N]) -> Vec<Elem> {
    let mut v = Vec::with_capacity(env.len() + N);
    v.extend_from_slice(env);
    v.extend(xs);
    v
}

/// Cartesian product of a list of sets.
fn product(sets: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::with_capacity(sets.len())];
    for s in sets {
        let mut next = Vec::with_capacity(out.len() * s.len());
        for prefix in &out {
            for x in s {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Equal { environments: usize },
    Counterexample { env: Vec<Elem>, lhs: Elem, rhs: Elem },
    CapExceeded { cap: usize },
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equal { environments } => write!(f, "Equal ({environments} environments)"),
            Verdict::Counterexample { env, lhs, rhs } => {
                write!(f, "Counterexample at [")?;
                for (i, x) in env.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]: {lhs} ≠ {rhs}")
            }
            Verdict::CapExceeded { cap } => write!(f, "CapExceeded (more than {cap})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemVType {
    pub fibers: Vec<(Vec<Elem>, Vec<Elem>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Algebra {
    pub carrier: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemCType {
    pub fibers: Vec<(Vec<Elem>, Algebra)>,
}

// ---------------------------------------------------------------------------
// Dependent Kleisli extensions
// ---------------------------------------------------------------------------

/// Extends `f ∈ Π a∈A. B(a) + E` to `A + E`: `f*(a) = f(a)`, `f*(e) = e`.
pub fn dep_kleisli_exception(f: &[(Elem, Elem)], errors: &[String]) -> Vec<(Elem, Elem)> {
    let mut out: Vec<(Elem, Elem)> = f.iter().map(|(a, b)| (Elem::Ret(Box::new(a.clone())), b.clone())).collect();
    out.extend(errors.iter().map(|e| (Elem::Err(e.clone()), Elem::Err(e.clone()))));
    out
}

fn apply_graph<'g>(g: &'g [(Elem, Elem)], x: &Elem) -> &'g Elem {
    &g.iter().find(|(a, _)| sem_eq(a, x)).expect("argument in the domain").1
}

/// Non-dependent Kleisli extension computed as `μ ∘ T f`.
fn kleisli_via_multiplication(f: &[(Elem, Elem)], t: &Elem) -> Elem {
    let tf = match t {
        Elem::Ret(a) => Elem::Ret(Box::new(apply_graph(f, a).clone())),
        Elem::Err(e) => Elem::Err(e.clone()),
        _ => unreachable!("not in A + E"),
    };
    match tf {
        Elem::Ret(inner) => *inner,
        e => e,
    }
}

fn exception_set(xs: &[Elem], errors: &[String]) -> Vec<Elem> {
    let mut out: Vec<Elem> = xs.iter().map(|x| Elem::Ret(Box::new(x.clone()))).collect();
    out.extend(errors.iter().map(|e| Elem::Err(e.clone())));
    out
}

fn all_functions(dom: &[Elem], fibers: &[Vec<Elem>]) -> Vec<Vec<(Elem, Elem)>> {
    product(fibers).into_iter().map(|outs| dom.iter().cloned().zip(outs).collect()).collect()
}

/// Outcome of the exhaustive law check for exception extensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KleisliLawReport {
    pub cases: usize,
    pub failures: Vec<String>,
}

/// Checks the laws of [`dep_kleisli_exception`] for every `|A| ≤ max_a` and
/// `|E| ≤ max_e`: `f*` is a dependent function over `A + E`, `f* ∘ η = f`,
/// `η* = id`, `(g* ∘ f)* = g* ∘ f*`, and agreement with `μ ∘ T f` when the
/// family is constant.
pub fn check_exception_kleisli_laws(max_a: usize, max_e: usize) -> KleisliLawReport {
    let mut cases = 0;
    let mut failures = Vec::new();
    let names: Vec<String> = (1..=max_e).map(|i| format!("e{i}")).collect();
    for na in 0..=max_a {
        let a: Vec<Elem> = (0..na).map(|i| Elem::Inj(i, Box::new(Elem::Unit))).collect();
        for ne in 0..=max_e {
            let errs = &names[..ne];
            let ta = exception_set(&a, errs);
            // Families B over A with fiber sizes in {0, 1, 2}.
            for shape in index_tuples(na, 3) {
                let fiber = |i: usize| -> Vec<Elem> {
                    (0..shape[i]).map(|j| Elem::Inj(j, Box::new(Elem::Unit))).collect()
                };
                let fibers: Vec<Vec<Elem>> = (0..na).map(|i| exception_set(&fiber(i), errs)).collect();
                for f in all_functions(&a, &fibers) {
                    cases += 1;
                    let fs = dep_kleisli_exception(&f, errs);
                    for (t, y) in &fs {
                        let ok = match t {
                            Elem::Ret(x) => {
                                let i = a.iter().position(|z| sem_eq(z, x)).expect("in A");
                                contains(&fibers[i], y)
                            }
                            Elem::Err(e) => sem_eq(y, &Elem::Err(e.clone())),
                            _ => false,
                        };
                        if !ok {
                            failures.push(format!("f*({t}) = {y} leaves the fiber"));
                        }
                    }
                    for (x, y) in &f {
                        if !sem_eq(apply_graph(&fs, &Elem::Ret(Box::new(x.clone()))), y) {
                            failures.push(format!("f*(η {x}) ≠ f({x})"));
                        }
                    }
                    if fs.len() != ta.len() {
                        failures.push(format!("f* has {} points, A + E has {}", fs.len(), ta.len()));
                    }
                }
            }
            let eta: Vec<(Elem, Elem)> = a.iter().map(|x| (x.clone(), Elem::Ret(Box::new(x.clone())))).collect();
            let eta_star = dep_kleisli_exception(&eta, errs);
            cases += 1;
            for t in &ta {
                if !sem_eq(apply_graph(&eta_star, t), t) {
                    failures.push(format!("η*({t}) ≠ {t}"));
                }
            }
            // Associativity and agreement with μ ∘ T f, for B = {0, 1} and C = {0}.
            let b: Vec<Elem> = (0..2).map(|i| Elem::Inj(i, Box::new(Elem::Unit))).collect();
            let c = vec![Elem::Unit];
            let tb = exception_set(&b, errs);
            let tc = exception_set(&c, errs);
            let fs_ab = all_functions(&a, &vec![tb.clone(); na]);
            let gs_bc = all_functions(&b, &vec![tc.clone(); b.len()]);
            for f in &fs_ab {
                let f_star = dep_kleisli_exception(f, errs);
                for t in &ta {
                    cases += 1;
                    if !sem_eq(apply_graph(&f_star, t), &kleisli_via_multiplication(f, t)) {
                        failures.push(format!("f*({t}) disagrees with μ ∘ T f"));
                    }
                }
                for g in &gs_bc {
                    let g_star = dep_kleisli_exception(g, errs);
                    let gf: Vec<(Elem, Elem)> =
                        f.iter().map(|(x, y)| (x.clone(), apply_graph(&g_star, y).clone())).collect();
                    let gf_star = dep_kleisli_exception(&gf, errs);
                    for t in &ta {
                        cases += 1;
                        let lhs = apply_graph(&gf_star, t);
                        let rhs = apply_graph(&g_star, apply_graph(&f_star, t));
                        if !sem_eq(lhs, rhs) {
                            failures.push(format!("(g* ∘ f)*({t}) ≠ g*(f*({t}))"));
                        }
                    }
                }
            }
        }
    }
    KleisliLawReport { cases, failures }
}

/// All tuples of length `n` over `0..k`.
fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..k).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// The predicate `B(1, a) = {*}`, `B(m, a) = ∅` otherwise, on `M × A`, and
/// the size of the space of candidate extensions of `* ∈ Π a. B(1, a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    /// `((m, a), |B(m, a)|)` for every point of `M × A`.
    pub predicate: Vec<((usize, usize), usize)>,
    pub search_space: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefutationError {
    #[error("a dependent Kleisli extension exists ({candidates} candidates searched)")]
    ExtensionFound { candidates: u128 },
}

/// Searches every `g ∈ Π t∈M×A. M × B(t)` for an extension of the constant
/// function `*` along the writer unit, i.e. `g(1, a) = (1, *)`.
pub fn refute_dependent_kleisli_writer(m: &FiniteMonoid, a_size: usize) -> Result<Refutation, RefutationError> {
    let points: Vec<(usize, usize)> = (0..m.len()).flat_map(|k| (0..a_size).map(move |a| (k, a))).collect();
    let predicate: Vec<((usize, usize), usize)> =
        points.iter().map(|&(k, a)| ((k, a), usize::from(k == m.unit()))).collect();
    // Each fiber M × B(t) lists pairs (written monoid element, witness index).
    let fibers: Vec<Vec<(usize, usize)>> = predicate
        .iter()
        .map(|&(_, b)| (0..m.len()).flat_map(|w| (0..b).map(move |s| (w, s))).collect())
        .collect();
    let search_space = fibers.iter().fold(1u128, |n, f| n.saturating_mul(f.len() as u128));
    let mut choice = vec![0usize; fibers.len()];
    let mut candidates = 0u128;
    if fibers.iter().all(|f| !f.is_empty()) {
        loop {
            candidates += 1;
            let extends = points.iter().zip(&choice).zip(&fibers).all(|((&(k, _), &c), f)| {
                k != m.unit() || f[c] == (m.unit(), 0)
            });
            if extends {
                return Err(RefutationError::ExtensionFound { candidates });
            }
            // Odometer increment.
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(Refutation { predicate, search_space });
                }
                choice[i] += 1;
                if choice[i] < fibers[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
    Ok(Refutation { predicate, search_space })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_comp_in, parse_ctype, parse_vtype};

    fn exc(errors: &[&str]) -> Model {
        Model::exception(errors)
    }

    #[test]
    fn f_unit_with_one_error() {
        let m = exc(&["e"]);
        let xs = m.carrier(&[], &parse_ctype("F Unit").unwrap()).unwrap();
        assert_eq!(xs, vec![Elem::Ret(Box::new(Elem::Unit)), Elem::Err("e".into())]);
    }

    #[test]
    fn identity_fibers() {
        let m = exc(&[]);
        assert_eq!(m.elements(&[], &parse_vtype("Id(Unit, (), ())").unwrap()).unwrap().len(), 1);
        assert!(m.elements(&[], &parse_vtype("Id(Sum(Unit, Unit), (1, ()), (2, ()))").unwrap()).unwrap().is_empty());
    }

    #[test]
    fn pi_over_bool() {
        let m = exc(&["e"]);
        let b = parse_ctype("Pi x : Sum(Unit, Unit). F Unit").unwrap();
        let fs = m.carrier(&[], &b).unwrap();
        // Oracle: a function on a 2-point domain into a 2-point set is a
        // pair of independent choices.
        let mut expected = 0;
        for _ in 0..2 {
            for _ in 0..2 {
                expected += 1;
            }
        }
        assert_eq!(fs.len(), expected);
        m.check_algebra(&Algebra { carrier: fs }).unwrap();
    }

    #[test]
    fn error_propagates() {
        let m = exc(&["e"]);
        let sig = crate::syntax::EffectSignature::all(&["s0"], &["e"]);
        let lhs = parse_comp_in("(error e) to x. return x", &[], Some(&sig)).unwrap();
        assert_eq!(m.comp(&[], &lhs).unwrap(), Elem::Err("e".into()));
        let lhs = parse_comp_in("(error e) to x. return ()", &[], Some(&sig)).unwrap();
        let rhs = parse_comp_in("return ()", &[], Some(&sig)).unwrap();
        let v = m.check_equation(&Context::empty(), &lhs, &rhs).unwrap();
        assert!(matches!(v, Verdict::Counterexample { .. }), "{v}");
    }

    #[test]
    fn sequencing_beta_and_force_thunk() {
        let m = exc(&["e1", "e2"]);
        let a = base_type(3);
        let ctx = Context::from_values(vec![a.clone(), parse_vtype("U Pi y : Sum(Unit, Unit, Unit). F Sum(Unit, Unit, Unit)").unwrap()]);
        let names = ["v".to_string(), "f".to_string()];
        let lhs = parse_comp_in("return v to x. x ' force f", &names, None).unwrap();
        let rhs = parse_comp_in("v ' force f", &names, None).unwrap();
        let v = m.check_equation(&ctx, &lhs, &rhs).unwrap();
        // 3 values times 5^3 functions.
        assert_eq!(v, Verdict::Equal { environments: 3 * 125 });
        let lhs = parse_comp_in("force thunk (v ' force f)", &names, None).unwrap();
        assert!(m.check_equation(&ctx, &lhs, &rhs).unwrap().is_equal());
    }

    #[test]
    fn unsupported_constructs() {
        let m = exc(&["e"]);
        assert_eq!(m.comp(&[], &Comp::Diverge), Err(ModelError::InfiniteModel));
        assert!(matches!(m.comp(&[], &Comp::Choose(vec![])), Err(ModelError::UnsupportedEffect(_))));
    }

    #[test]
    fn cap() {
        let m = exc(&["e"]).with_cap(10);
        let ctx = Context::from_values(vec![parse_vtype("U Pi x : Sum(Unit, Unit, Unit, Unit). F Unit").unwrap()]);
        let r = m.check_equation(&ctx, &Comp::ret(Value::Unit), &Comp::ret(Value::Unit)).unwrap();
        assert_eq!(r, Verdict::CapExceeded { cap: 10 });
    }

    #[test]
    fn writer_model() {
        let mon = FiniteMonoid::cyclic(2);
        let tok = mon.elements()[1].clone();
        let m = Model::writer(mon);
        let b = CType::Prod(vec![parse_ctype("F Unit").unwrap(), parse_ctype("Pi x : Sum(Unit, Unit). F Unit").unwrap()]);
        let xs = m.carrier(&[], &b).unwrap();
        assert_eq!(xs.len(), 2 * 4);
        m.check_algebra(&Algebra { carrier: xs }).unwrap();
        let twice = Comp::print(&tok, Comp::print(&tok, Comp::ret(Value::Unit)));
        assert_eq!(m.comp(&[], &twice).unwrap(), Elem::Out(0, Box::new(Elem::Unit)));
    }

    #[test]
    fn dependent_kleisli_examples() {
        let f = vec![(Elem::Unit, Elem::Ret(Box::new(Elem::Unit)))];
        let fs = dep_kleisli_exception(&f, &["e".into()]);
        assert_eq!(
            fs,
            vec![
                (Elem::Ret(Box::new(Elem::Unit)), Elem::Ret(Box::new(Elem::Unit))),
                (Elem::Err("e".into()), Elem::Err("e".into())),
            ]
        );
        assert_eq!(dep_kleisli_exception(&f, &[]).len(), 1);
        let report = check_exception_kleisli_laws(2, 1);
        assert!(report.failures.is_empty(), "{:?}", report.failures);
    }

    #[test]
    fn writer_refutation() {
        let r = refute_dependent_kleisli_writer(&FiniteMonoid::cyclic(2), 1).unwrap();
        assert_eq!(r.search_space, 0);
        assert_eq!(r.predicate, vec![((0, 0), 1), ((1, 0), 0)]);
        assert!(matches!(
            refute_dependent_kleisli_writer(&FiniteMonoid::trivial(), 1),
            Err(RefutationError::ExtensionFound { .. })
        ));
        assert!(matches!(
            refute_dependent_kleisli_writer(&FiniteMonoid::cyclic(2), 0),
            Err(RefutationError::ExtensionFound { .. })
        ));
    }
}
