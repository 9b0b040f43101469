//! Kernel abstract syntax: value and computation types, values, computations,
//! stacks and contexts, all in de Bruijn form.
//!
//! Binding conventions (number of variables bound by each sub-position):
//!
//! | node                     | binds                                  |
//! |--------------------------|----------------------------------------|
//! | `VType::Sigma(a, b)`     | `b`: 1                                 |
//! | `CType::Pi(a, b)`        | `b`: 1                                 |
//! | `Let(v, r)`              | `r`: 1                                 |
//! | `Pattern::Unit(r)`       | `r`: 0                                 |
//! | `Pattern::Sum(arms)`     | each arm: 1                            |
//! | `Pattern::Pair(r)`       | `r`: 2 (first component is index 1)    |
//! | `Pattern::Id(r)`         | `r`: 1                                 |
//! | `Motive` (Id eliminator) | 3: `x` (2), `x'` (1), `p` (0)          |
//! | `Motive` (others)        | 1: the scrutinee `z`                   |
//! | `SeqTo { body, .. }`     | `body`: 1                              |
//! | `LambdaPi(a, m)`         | `m`: 1                                 |
//! | `Mu(m)`                  | `m`: 1 (a thunk variable)              |
//! | `Frame::Seq { body, .. }`| `body`: 1                              |

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("de Bruijn index {index} would become negative after shifting by {delta}")]
    IndexUnderflow { index: usize, delta: isize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("initial state index {0} is out of range")]
    BadInitialState(usize),
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("duplicate error name `{0}`")]
    DuplicateError(String),
    #[error("state set must be nonempty")]
    NoStates,
    #[error("monoid table: {0}")]
    BadMonoid(String),
}

/// The effects a program may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Effect {
    Diverge,
    Rec,
    Print,
    Choose,
    Error,
    State,
}

impl Effect {
    pub const ALL: [Effect; 6] = [
        Effect::Diverge,
        Effect::Rec,
        Effect::Print,
        Effect::Choose,
        Effect::Error,
        Effect::State,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Effect::Diverge => "diverge",
            Effect::Rec => "rec",
            Effect::Print => "print",
            Effect::Choose => "choose",
            Effect::Error => "error",
            Effect::State => "state",
        }
    }

    pub fn from_name(s: &str) -> Option<Effect> {
        Effect::ALL.into_iter().find(|e| e.name() == s)
    }
}

/// A finite monoid given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMonoid {
    elements: Vec<String>,
    unit: usize,
    table: Vec<Vec<usize>>,
}

impl FiniteMonoid {
    /// Builds a monoid, checking associativity and unit laws by enumeration.
    pub fn new(
        elements: Vec<String>,
        unit: usize,
        table: Vec<Vec<usize>>,
    ) -> Result<Self, SignatureError> {
        let n = elements.len();
        if n == 0 {
            return Err(SignatureError::BadMonoid("no elements".into()));
        }
        if unit >= n {
            return Err(SignatureError::BadMonoid("unit out of range".into()));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(SignatureError::BadMonoid(format!("table must be {n}x{n}")));
        }
        if table.iter().flatten().any(|&c| c >= n) {
            return Err(SignatureError::BadMonoid("entry out of range".into()));
        }
        let mut seen = BTreeSet::new();
        for e in &elements {
            if !seen.insert(e) {
                return Err(SignatureError::BadMonoid(format!("duplicate element `{e}`")));
            }
        }
        let m = FiniteMonoid { elements, unit, table };
        for a in 0..n {
            if m.mul(unit, a) != a || m.mul(a, unit) != a {
                return Err(SignatureError::BadMonoid(format!(
                    "`{}` is not a unit for `{}`",
                    m.elements[unit], m.elements[a]
                )));
            }
            for b in 0..n {
                for c in 0..n {
                    if m.mul(m.mul(a, b), c) != m.mul(a, m.mul(b, c)) {
                        return Err(SignatureError::BadMonoid(format!(
                            "not associative at ({}, {}, {})",
                            m.elements[a], m.elements[b], m.elements[c]
                        )));
                    }
                }
            }
        }
        Ok(m)
    }

    /// The cyclic group Z/n with elements named "0".."n-1".
    pub fn cyclic(n: usize) -> Self {
        let elements = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteMonoid::new(elements, 0, table).expect("cyclic group is a monoid")
    }

    pub fn trivial() -> Self {
        FiniteMonoid::cyclic(1)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Monoid {
    /// Strings under concatenation.
    FreeText,
    FiniteTable(FiniteMonoid),
}

/// An element of the printing monoid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonoidElem {
    Text(String),
    Index(usize),
}

/// The effect "hardware" available to programs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectSignature {
    pub monoid: Monoid,
    states: Vec<String>,
    initial: usize,
    errors: Vec<String>,
    pub enabled: BTreeSet<Effect>,
}

impl Default for EffectSignature {
    fn default() -> Self {
        EffectSignature::pure()
    }
}

impl EffectSignature {
    pub fn new(
        monoid: Monoid,
        states: Vec<String>,
        initial: usize,
        errors: Vec<String>,
        enabled: impl IntoIterator<Item = Effect>,
    ) -> Result<Self, SignatureError> {
        if states.is_empty() {
            return Err(SignatureError::NoStates);
        }
        if initial >= states.len() {
            return Err(SignatureError::BadInitialState(initial));
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(SignatureError::DuplicateState(s.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for e in &errors {
            if !seen.insert(e.as_str()) {
                return Err(SignatureError::DuplicateError(e.clone()));
            }
        }
        Ok(EffectSignature {
            monoid,
            states,
            initial,
            errors,
            enabled: enabled.into_iter().collect(),
        })
    }

    /// No effects, a single state `s0`, no errors, free text monoid.
    pub fn pure() -> Self {
        EffectSignature::new(Monoid::FreeText, vec!["s0".into()], 0, vec![], [])
            .expect("pure signature is valid")
    }

    /// Every effect enabled.
    pub fn all(states: &[&str], errors: &[&str]) -> Self {
        EffectSignature::new(
            Monoid::FreeText,
            states.iter().map(|s| s.to_string()).collect(),
            0,
            errors.iter().map(|s| s.to_string()).collect(),
            Effect::ALL,
        )
        .expect("valid signature")
    }

    pub fn with_effects(mut self, effects: impl IntoIterator<Item = Effect>) -> Self {
        self.enabled.extend(effects);
        self
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial_state(&self) -> &str {
        &self.states[self.initial]
    }

    pub fn initial_index(&self) -> usize {
        self.initial
    }

    pub fn errors(&self) -> &[String] {
        &self.errors
    }

    pub fn is_enabled(&self, e: Effect) -> bool {
        self.enabled.contains(&e)
    }

    pub fn has_state(&self, s: &str) -> bool {
        self.states.iter().any(|t| t == s)
    }

    pub fn has_error(&self, e: &str) -> bool {
        self.errors.iter().any(|t| t == e)
    }

    pub fn monoid_unit(&self) -> MonoidElem {
        match &self.monoid {
            Monoid::FreeText => MonoidElem::Text(String::new()),
            Monoid::FiniteTable(m) => MonoidElem::Index(m.unit()),
        }
    }

    /// Interprets a `print` token as a monoid element.
    pub fn monoid_element(&self, token: &str) -> Option<MonoidElem> {
        match &self.monoid {
            Monoid::FreeText => Some(MonoidElem::Text(token.to_string())),
            Monoid::FiniteTable(m) => m.index_of(token).map(MonoidElem::Index),
        }
    }

    pub fn monoid_mul(&self, a: &MonoidElem, b: &MonoidElem) -> MonoidElem {
        match (&self.monoid, a, b) {
            (Monoid::FiniteTable(m), MonoidElem::Index(x), MonoidElem::Index(y)) => {
                MonoidElem::Index(m.mul(*x, *y))
            }
            (_, MonoidElem::Text(x), MonoidElem::Text(y)) => MonoidElem::Text(format!("{x}{y}")),
            _ => panic!("monoid elements of mixed kinds"),
        }
    }

    pub fn render_monoid(&self, m: &MonoidElem) -> String {
        match (&self.monoid, m) {
            (_, MonoidElem::Text(s)) if s.is_empty() => "ε".to_string(),
            (_, MonoidElem::Text(s)) => s.clone(),
            (Monoid::FiniteTable(t), MonoidElem::Index(i)) => t.elements()[*i].clone(),
            (_, MonoidElem::Index(i)) => i.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VType {
    U(Box<CType>),
    Unit,
    Sum(Vec<VType>),
    Sigma(Box<VType>, Box<VType>),
    Id(Box<VType>, Box<Value>, Box<Value>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CType {
    F(Box<VType>),
    Prod(Vec<CType>),
    Pi(Box<VType>, Box<CType>),
}

/// Result-type annotation on a dependent eliminator.
///
/// `ext` is the telescope Γ' following the eliminated variable(s); `result`
/// lives under the eliminator's motive binders followed by `ext`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Motive<T> {
    pub ext: Vec<VType>,
    pub result: T,
}

impl<T> Motive<T> {
    pub fn new(result: T) -> Self {
        Motive { ext: Vec::new(), result }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern<R> {
    Unit(R),
    Sum(Vec<R>),
    Pair(R),
    Id(R),
}

impl<R> Pattern<R> {
    pub fn motive_arity(&self) -> usize {
        match self {
            Pattern::Id(_) => 3,
            _ => 1,
        }
    }

    pub fn arms(&self) -> Vec<(&R, usize)> {
        match self {
            Pattern::Unit(r) => vec![(r, 0)],
            Pattern::Sum(rs) => rs.iter().map(|r| (r, 1)).collect(),
            Pattern::Pair(r) => vec![(r, 2)],
            Pattern::Id(r) => vec![(r, 1)],
        }
    }

    pub fn try_map<S, E>(&self, mut f: impl FnMut(&R, usize) -> Result<S, E>) -> Result<Pattern<S>, E> {
        Ok(match self {
            Pattern::Unit(r) => Pattern::Unit(f(r, 0)?),
            Pattern::Sum(rs) => Pattern::Sum(rs.iter().map(|r| f(r, 1)).collect::<Result<_, _>>()?),
            Pattern::Pair(r) => Pattern::Pair(f(r, 2)?),
            Pattern::Id(r) => Pattern::Id(f(r, 1)?),
        })
    }
}

/// A pattern match, shared by the value and computation levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Match<R, T> {
    pub scrutinee: Value,
    pub motive: Option<Motive<T>>,
    pub pattern: Pattern<R>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Var(usize),
    Thunk(Box<Comp>),
    Unit,
    /// Sum injection; the tag is 0-based.
    Inj(usize, Box<Value>),
    Pair(Box<Value>, Box<Value>),
    Refl(Box<Value>),
    Let(Box<Value>, Box<Value>),
    Match(Box<Match<Value, VType>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReadArm {
    pub state: String,
    pub body: Comp,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Comp {
    Return(Value),
    SeqTo {
        head: Box<Comp>,
        body: Box<Comp>,
        motive: Option<Box<Motive<CType>>>,
    },
    Force(Value),
    LambdaProd(Vec<Comp>),
    /// Projection; the tag is 0-based.
    Proj(usize, Box<Comp>),
    LambdaPi(Box<VType>, Box<Comp>),
    Apply(Box<Value>, Box<Comp>),
    Let(Box<Value>, Box<Comp>),
    Match(Box<Match<Comp, CType>>),
    Diverge,
    Mu(Box<Comp>),
    Print(String, Box<Comp>),
    Choose(Vec<Comp>),
    Error(String),
    Write(String, Box<Comp>),
    Read(Vec<ReadArm>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Frame {
    /// `[·] to x. body`. Frames pushed by the machine keep the original head,
    /// which types the hole and, under a motive, the frame itself.
    Seq {
        body: Comp,
        motive: Option<Motive<CType>>,
        head: Option<Comp>,
    },
    Proj(usize),
    Arg(Value),
}

/// A simple stack; the top frame is the last element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Stack {
    pub frames: Vec<Frame>,
}

impl Stack {
    pub fn nil() -> Self {
        Stack::default()
    }

    pub fn is_nil(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn push(&mut self, f: Frame) {
        self.frames.push(f);
    }

    pub fn pop(&mut self) -> Option<Frame> {
        self.frames.pop()
    }

    pub fn top(&self) -> Option<&Frame> {
        self.frames.last()
    }

    /// Frames from the top of the stack downwards.
    pub fn iter_top_down(&self) -> impl Iterator<Item = &Frame> {
        self.frames.iter().rev()
    }
}

/// A value telescope plus an optional computation-type slot.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Context {
    pub values: Vec<VType>,
    pub comp_slot: Option<CType>,
}

impl Context {
    pub fn empty() -> Self {
        Context::default()
    }

    pub fn from_values(values: Vec<VType>) -> Self {
        Context { values, comp_slot: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn extend(&self, a: VType) -> Context {
        let mut c = self.clone();
        c.comp_slot = None;
        c.values.push(a);
        c
    }

    /// Type of variable `index`, weakened into the full context.
    pub fn lookup(&self, index: usize) -> Option<VType> {
        let n = self.values.len();
        if index >= n {
            return None;
        }
        Some(self.values[n - 1 - index].weaken(index + 1))
    }
}

// ---------------------------------------------------------------------------
// Variable traversal
// ---------------------------------------------------------------------------

/// Callback receiving `(free_index, depth)` for each free variable; it
/// returns the replacement value, valid under `depth` extra binders.
pub type VarMap<'a> = dyn FnMut(usize, usize) -> Result<Value, SyntaxError> + 'a;

/// Anything containing de Bruijn indices.
pub trait Term: Sized + Clone {
    fn map_vars(&self, depth: usize, f: &mut VarMap<'_>) -> Result<Self, SyntaxError>;

    /// Moves free indices `>= cutoff` by `delta`.
    fn shift(&self, cutoff: usize, delta: isize) -> Result<Self, SyntaxError> {
        self.map_vars(0, &mut |j, d| {
            if j < cutoff {
                Ok(Value::Var(j + d))
            } else {
                let moved = j as isize + delta;
                if moved < 0 {
                    Err(SyntaxError::IndexUnderflow { index: j, delta })
                } else {
                    Ok(Value::Var(moved as usize + d))
                }
            }
        })
    }

    /// Weakening by `n` fresh outer variables. Never fails.
    fn weaken(&self, n: usize) -> Self {
        self.weaken_above(0, n)
    }

    fn weaken_above(&self, cutoff: usize, n: usize) -> Self {
        if n == 0 {
            return self.clone();
        }
        self.shift(cutoff, n as isize).expect("positive shift cannot underflow")
    }

    /// Substitutes `v` for index 0, lowering the other free indices.
    fn subst(&self, v: &Value) -> Self {
        self.subst_many(std::slice::from_ref(v))
    }

    /// Substitutes `vals[i]` for index `i` (all values live in the outer
    /// context) and lowers the remaining indices by `vals.len()`.
    fn subst_many(&self, vals: &[Value]) -> Self {
        let n = vals.len();
        self.map_vars(0, &mut |j, d| {
            if j < n {
                Ok(vals[j].weaken(d))
            } else {
                Ok(Value::Var(j - n + d))
            }
        })
        .expect("substitution is total")
    }

    /// Renames free variables through `f`, an index permutation/renaming.
    fn rename(&self, f: impl Fn(usize) -> usize) -> Self {
        self.map_vars(0, &mut |j, d| Ok(Value::Var(f(j) + d)))
            .expect("renaming is total")
    }

    /// Free variable indices occurring in the term.
    fn free_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let _ = self.map_vars(0, &mut |j, d| {
            out.insert(j);
            Ok(Value::Var(j + d))
        });
        out
    }

    fn mentions(&self, index: usize) -> bool {
        self.free_vars().contains(&index)
    }

    /// Whether all free indices are below `n`.
    fn is_scoped_in(&self, n: usize) -> bool {
        self.free_vars().iter().all(|&j| j < n)
    }

    /// Removes the `n` innermost variables, if none of them occur.
    fn strengthen(&self, n: usize) -> Option<Self> {
        if self.free_vars().iter().any(|&j| j < n) {
            return None;
        }
        self.shift(0, -(n as isize)).ok()
    }
}

fn map_vec<T: Term>(v: &[T], depth: usize, f: &mut VarMap<'_>) -> Result<Vec<T>, SyntaxError> {
    v.iter().map(|t| t.map_vars(depth, f)).collect()
}

fn map_box<T: Term>(b: &T, depth: usize, f: &mut VarMap<'_>) -> Result<Box<T>, SyntaxError> {
    Ok(Box::new(b.map_vars(depth, f)?))
}

impl Term for VType {
    fn map_vars(&self, d: usize, f: &mut VarMap<'_>) -> Result<Self, SyntaxError> {
        Ok(match self {
            VType::U(b) => VType::U(map_box(&**b, d, f)?),
            VType::Unit => VType::Unit,
            VType::Sum(arms) => VType::Sum(map_vec(arms, d, f)?),
            VType::Sigma(a, b) => VType::Sigma(map_box(&**a, d, f)?, map_box(&**b, d + 1, f)?),
            VType::Id(a, l, r) => VType::Id(
                map_box(&**a, d, f)?,
                map_box(&**l, d, f)?,
                map_box(&**r, d, f)?,
            ),
        })
    }
}

impl Term for CType {
    fn map_vars(&self, d: usize, f: &mut VarMap<'_>) -> Result<Self, SyntaxError> {
        Ok(match self {
            CType::F(a) => CType::F(map_box(&**a, d, f)?),
            CType::Prod(arms) => CType::Prod(map_vec(arms, d, f)?),
            CType::Pi(a, b) => CType::Pi(map_box(&**a, d, f)?, map_box(&**b, d + 1, f)?),
        })
    }
}

impl<T: Term> Motive<T> {
    /// Traverses a motive whose eliminator binds `arity` variables.
    pub fn map_vars(&self, arity: usize, d: usize, f: &mut VarMap<'_>) -> Result<Self, SyntaxError> {
        let ext = self
            .ext
            .iter()
            .enumerate()
            .map(|(i, a)| a.map_vars(d + arity + i, f))
            .collect::<Result<_, _>>()?;
        let result = self.result.map_vars(d + arity + self.ext.len(), f)?;
        Ok(Motive { ext, result })
    }
}

impl<R: Term, T: Term> Match<R, T> {
    fn map_vars(&self, d: usize, f: &mut VarMap<'_>) -> Result<Self, SyntaxError> {
        let scrutinee = self.scrutinee.map_vars(d, f)?;
        let arity = self.pattern.motive_arity();
        let motive = match &self.motive {
            Some(m) => Some(m.map_vars(arity, d, f)?),
            None => None,
        };
        let pattern = self.pattern.try_map(|r, k| r.map_vars(d + k, f))?;
        Ok(Match { scrutinee, motive, pattern })
    }
}

impl Term for Value {
    fn map_vars(&self, d: usize, f: &mut VarMap<'_>) -> Result<Self, SyntaxError> {
        Ok(match self {
            Value::Var(i) => {
                if *i < d {
                    Value::Var(*i)
                } else {
                    f(*i - d, d)?
                }
            }
            Value::Thunk(m) => Value::Thunk(map_box(&**m, d, f)?),
            Value::Unit => Value::Unit,
            Value::Inj(i, v) => Value::Inj(*i, map_box(&**v, d, f)?),
            Value::Pair(a, b) => Value::Pair(map_box(&**a, d, f)?, map_box(&**b, d, f)?),
            Value::Refl(v) => Value::Refl(map_box(&**v, d, f)?),
            Value::Let(v, r) => Value::Let(map_box(&**v, d, f)?, map_box(&**r, d + 1, f)?),
            Value::Match(m) => Value::Match(Box::new(m.map_vars(d, f)?)),
        })
    }
}

impl Term for Comp {
    fn map_vars(&self, d: usize, f: &mut VarMap<'_>) -> Result<Self, SyntaxError> {
        Ok(match self {
            Comp::Return(v) => Comp::Return(v.map_vars(d, f)?),
            Comp::SeqTo { head, body, motive } => Comp::SeqTo {
                head: map_box(&**head, d, f)?,
                body: map_box(&**body, d + 1, f)?,
                motive: match motive {
                    Some(m) => Some(Box::new(m.map_vars(1, d, f)?)),
                    None => None,
                },
            },
            Comp::Force(v) => Comp::Force(v.map_vars(d, f)?),
            Comp::LambdaProd(ms) => Comp::LambdaProd(map_vec(ms, d, f)?),
            Comp::Proj(i, m) => Comp::Proj(*i, map_box(&**m, d, f)?),
            Comp::LambdaPi(a, m) => Comp::LambdaPi(map_box(&**a, d, f)?, map_box(&**m, d + 1, f)?),
            Comp::Apply(v, m) => Comp::Apply(map_box(&**v, d, f)?, map_box(&**m, d, f)?),
            Comp::Let(v, m) => Comp::Let(map_box(&**v, d, f)?, map_box(&**m, d + 1, f)?),
            Comp::Match(m) => Comp::Match(Box::new(m.map_vars(d, f)?)),
            Comp::Diverge => Comp::Diverge,
            Comp::Mu(m) => Comp::Mu(map_box(&**m, d + 1, f)?),
            Comp::Print(t, m) => Comp::Print(t.clone(), map_box(&**m, d, f)?),
            Comp::Choose(ms) => Comp::Choose(map_vec(ms, d, f)?),
            Comp::Error(e) => Comp::Error(e.clone()),
            Comp::Write(s, m) => Comp::Write(s.clone(), map_box(&**m, d, f)?),
            Comp::Read(arms) => Comp::Read(
                arms.iter()
                    .map(|a| {
                        Ok(ReadArm { state: a.state.clone(), body: a.body.map_vars(d, f)? })
                    })
                    .collect::<Result<_, SyntaxError>>()?,
            ),
        })
    }
}

impl Term for Frame {
    fn map_vars(&self, d: usize, f: &mut VarMap<'_>) -> Result<Self, SyntaxError> {
        Ok(match self {
            Frame::Seq { body, motive, head } => Frame::Seq {
                body: body.map_vars(d + 1, f)?,
                motive: match motive {
                    Some(m) => Some(m.map_vars(1, d, f)?),
                    None => None,
                },
                head: match head {
                    Some(h) => Some(h.map_vars(d, f)?),
                    None => None,
                },
            },
            Frame::Proj(i) => Frame::Proj(*i),
            Frame::Arg(v) => Frame::Arg(v.map_vars(d, f)?),
        })
    }
}

impl Term for Stack {
    fn map_vars(&self, d: usize, f: &mut VarMap<'_>) -> Result<Self, SyntaxError> {
        Ok(Stack { frames: map_vec(&self.frames, d, f)? })
    }
}

/// Structural equality; de Bruijn representation makes this α-equivalence.
pub fn alpha_eq<T: PartialEq>(a: &T, b: &T) -> bool {
    a == b
}

// ---------------------------------------------------------------------------
// Complex values
// ---------------------------------------------------------------------------

impl Value {
    /// True iff no `let` or pattern match occurs in the value structure.
    /// Thunked computations are not value structure.
    pub fn is_simple(&self) -> bool {
        match self {
            Value::Var(_) | Value::Unit | Value::Thunk(_) => true,
            Value::Inj(_, v) | Value::Refl(v) => v.is_simple(),
            Value::Pair(a, b) => a.is_simple() && b.is_simple(),
            Value::Let(..) | Value::Match(_) => false,
        }
    }

    /// Simple, and every thunked computation inside is complex-value-free.
    pub fn is_deeply_simple(&self) -> bool {
        match self {
            Value::Var(_) | Value::Unit => true,
            Value::Thunk(m) => m.is_complex_free(),
            Value::Inj(_, v) | Value::Refl(v) => v.is_deeply_simple(),
            Value::Pair(a, b) => a.is_deeply_simple() && b.is_deeply_simple(),
            Value::Let(..) | Value::Match(_) => false,
        }
    }

    pub fn thunk(m: Comp) -> Value {
        Value::Thunk(Box::new(m))
    }

    /// `thunk (return v)`.
    pub fn tr(v: Value) -> Value {
        Value::Thunk(Box::new(Comp::Return(v)))
    }

    pub fn inj(i: usize, v: Value) -> Value {
        Value::Inj(i, Box::new(v))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn refl(v: Value) -> Value {
        Value::Refl(Box::new(v))
    }
}

impl Comp {
    /// True iff every value in computation position (outside types and
    /// motives) is simple, recursively through thunks.
    pub fn is_complex_free(&self) -> bool {
        match self {
            Comp::Return(v) | Comp::Force(v) => v.is_deeply_simple(),
            Comp::SeqTo { head, body, .. } => head.is_complex_free() && body.is_complex_free(),
            Comp::LambdaProd(ms) | Comp::Choose(ms) => ms.iter().all(Comp::is_complex_free),
            Comp::Proj(_, m) | Comp::LambdaPi(_, m) | Comp::Mu(m) => m.is_complex_free(),
            Comp::Print(_, m) | Comp::Write(_, m) => m.is_complex_free(),
            Comp::Apply(v, m) | Comp::Let(v, m) => v.is_deeply_simple() && m.is_complex_free(),
            Comp::Match(m) => {
                m.scrutinee.is_deeply_simple()
                    && m.pattern.arms().into_iter().all(|(r, _)| r.is_complex_free())
            }
            Comp::Diverge | Comp::Error(_) => true,
            Comp::Read(arms) => arms.iter().all(|a| a.body.is_complex_free()),
        }
    }

    pub fn ret(v: Value) -> Comp {
        Comp::Return(v)
    }

    pub fn seq(head: Comp, body: Comp) -> Comp {
        Comp::SeqTo { head: Box::new(head), body: Box::new(body), motive: None }
    }

    pub fn seq_dep(head: Comp, body: Comp, motive: CType) -> Comp {
        Comp::SeqTo {
            head: Box::new(head),
            body: Box::new(body),
            motive: Some(Box::new(Motive::new(motive))),
        }
    }

    pub fn lam(dom: VType, body: Comp) -> Comp {
        Comp::LambdaPi(Box::new(dom), Box::new(body))
    }

    pub fn apply(v: Value, m: Comp) -> Comp {
        Comp::Apply(Box::new(v), Box::new(m))
    }

    pub fn proj(i: usize, m: Comp) -> Comp {
        Comp::Proj(i, Box::new(m))
    }

    pub fn print(tok: &str, m: Comp) -> Comp {
        Comp::Print(tok.to_string(), Box::new(m))
    }

    pub fn let_in(v: Value, m: Comp) -> Comp {
        Comp::Let(Box::new(v), Box::new(m))
    }

    pub fn matching(scrutinee: Value, pattern: Pattern<Comp>) -> Comp {
        Comp::Match(Box::new(Match { scrutinee, motive: None, pattern }))
    }

    /// Effects used syntactically anywhere in the computation (including
    /// thunks, excluding types).
    pub fn effects_used(&self) -> BTreeSet<Effect> {
        let mut out = BTreeSet::new();
        collect_effects_comp(self, &mut out);
        out
    }
}

fn collect_effects_value(v: &Value, out: &mut BTreeSet<Effect>) {
    match v {
        Value::Var(_) | Value::Unit => {}
        Value::Thunk(m) => collect_effects_comp(m, out),
        Value::Inj(_, v) | Value::Refl(v) => collect_effects_value(v, out),
        Value::Pair(a, b) | Value::Let(a, b) => {
            collect_effects_value(a, out);
            collect_effects_value(b, out);
        }
        Value::Match(m) => {
            collect_effects_value(&m.scrutinee, out);
            for (r, _) in m.pattern.arms() {
                collect_effects_value(r, out);
            }
        }
    }
}

fn collect_effects_comp(m: &Comp, out: &mut BTreeSet<Effect>) {
    match m {
        Comp::Return(v) | Comp::Force(v) => collect_effects_value(v, out),
        Comp::SeqTo { head, body, .. } => {
            collect_effects_comp(head, out);
            collect_effects_comp(body, out);
        }
        Comp::LambdaProd(ms) => ms.iter().for_each(|m| collect_effects_comp(m, out)),
        Comp::Choose(ms) => {
            out.insert(Effect::Choose);
            ms.iter().for_each(|m| collect_effects_comp(m, out));
        }
        Comp::Proj(_, m) | Comp::LambdaPi(_, m) => collect_effects_comp(m, out),
        Comp::Apply(v, m) | Comp::Let(v, m) => {
            collect_effects_value(v, out);
            collect_effects_comp(m, out);
        }
        Comp::Match(mm) => {
            collect_effects_value(&mm.scrutinee, out);
            for (r, _) in mm.pattern.arms() {
                collect_effects_comp(r, out);
            }
        }
        Comp::Diverge => {
            out.insert(Effect::Diverge);
        }
        Comp::Mu(m) => {
            out.insert(Effect::Rec);
            collect_effects_comp(m, out);
        }
        Comp::Print(_, m) => {
            out.insert(Effect::Print);
            collect_effects_comp(m, out);
        }
        Comp::Error(_) => {
            out.insert(Effect::Error);
        }
        Comp::Write(_, m) => {
            out.insert(Effect::State);
            collect_effects_comp(m, out);
        }
        Comp::Read(arms) => {
            out.insert(Effect::State);
            arms.iter().for_each(|a| collect_effects_comp(&a.body, out));
        }
    }
}

impl VType {
    pub fn sum(arms: Vec<VType>) -> VType {
        VType::Sum(arms)
    }

    pub fn bool() -> VType {
        VType::Sum(vec![VType::Unit, VType::Unit])
    }

    pub fn u(b: CType) -> VType {
        VType::U(Box::new(b))
    }

    pub fn id(a: VType, l: Value, r: Value) -> VType {
        VType::Id(Box::new(a), Box::new(l), Box::new(r))
    }

    pub fn sigma(a: VType, b: VType) -> VType {
        VType::Sigma(Box::new(a), Box::new(b))
    }
}

impl CType {
    pub fn f(a: VType) -> CType {
        CType::F(Box::new(a))
    }

    pub fn pi(a: VType, b: CType) -> CType {
        CType::Pi(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for VType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_vtype(self, 0))
    }
}

impl fmt::Display for CType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_ctype(self, 0))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_value(self, 0))
    }
}

impl fmt::Display for Comp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_comp(self, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_examples() {
        assert_eq!(Value::Var(0).shift(0, 1).unwrap(), Value::Var(1));
        let lam = Comp::lam(VType::Unit, Comp::Force(Value::Var(0)));
        assert_eq!(lam.shift(0, 1).unwrap(), lam);
        assert_eq!(Value::Var(2).shift(3, 5).unwrap(), Value::Var(2));
    }

    #[test]
    fn shift_underflow() {
        assert!(matches!(
            Value::Var(0).shift(0, -1),
            Err(SyntaxError::IndexUnderflow { .. })
        ));
    }

    #[test]
    fn subst_examples() {
        assert_eq!(
            Comp::Return(Value::Var(0)).subst(&Value::Unit),
            Comp::Return(Value::Unit)
        );
        let t = Value::tr(Value::Unit);
        assert_eq!(Comp::Force(Value::Var(0)).subst(&t), Comp::Force(t.clone()));
        let id = VType::id(VType::Unit, Value::Var(0), Value::Var(0));
        let v = Value::Var(3);
        assert_eq!(id.subst(&v), VType::id(VType::Unit, Value::Var(3), Value::Var(3)));
    }

    #[test]
    fn subst_under_binder_shifts_value() {
        // λy. return (x, y) with x := var 5  ↦ λy. return (var 6, y)
        let body = Comp::lam(
            VType::Unit,
            Comp::Return(Value::pair(Value::Var(1), Value::Var(0))),
        );
        let out = body.subst(&Value::Var(5));
        assert_eq!(
            out,
            Comp::lam(VType::Unit, Comp::Return(Value::pair(Value::Var(6), Value::Var(0))))
        );
    }

    #[test]
    fn is_simple_examples() {
        let v = Value::pair(Value::Inj(0, Box::new(Value::Unit)), Value::tr(Value::Unit));
        assert!(v.is_simple());
        let let_v = Value::Let(Box::new(Value::Unit), Box::new(Value::Var(0)));
        assert!(!let_v.is_simple());
        let pm = Comp::Match(Box::new(Match {
            scrutinee: Value::Var(0),
            motive: None,
            pattern: Pattern::Pair(Comp::Return(Value::Var(1))),
        }));
        assert!(Value::thunk(pm).is_simple());
    }

    #[test]
    fn lookup_weakens() {
        let ctx = Context::from_values(vec![
            VType::Unit,
            VType::id(VType::Unit, Value::Var(0), Value::Var(0)),
        ]);
        assert_eq!(ctx.lookup(0).unwrap(), VType::id(VType::Unit, Value::Var(1), Value::Var(1)));
        assert_eq!(ctx.lookup(1).unwrap(), VType::Unit);
        assert!(ctx.lookup(2).is_none());
    }

    #[test]
    fn strengthen() {
        let t = CType::f(VType::id(VType::Unit, Value::Var(1), Value::Var(2)));
        assert_eq!(
            t.strengthen(1).unwrap(),
            CType::f(VType::id(VType::Unit, Value::Var(0), Value::Var(1)))
        );
        assert!(t.strengthen(2).is_none());
    }

    #[test]
    fn finite_monoid_rejects_non_associative() {
        // x*y = y-x mod 3 style table, not associative and no unit
        let table = vec![vec![0, 2, 1], vec![1, 0, 2], vec![2, 1, 0]];
        assert!(FiniteMonoid::new(vec!["a".into(), "b".into(), "c".into()], 0, table).is_err());
        assert_eq!(FiniteMonoid::cyclic(2).mul(1, 1), 0);
    }

    #[test]
    fn signature_validation() {
        assert!(EffectSignature::new(Monoid::FreeText, vec![], 0, vec![], []).is_err());
        assert!(EffectSignature::new(
            Monoid::FreeText,
            vec!["a".into(), "a".into()],
            0,
            vec![],
            []
        )
        .is_err());
        assert!(EffectSignature::new(Monoid::FreeText, vec!["a".into()], 1, vec![], []).is_err());
        assert!(EffectSignature::new(
            Monoid::FreeText,
            vec!["a".into()],
            0,
            vec!["e".into(), "e".into()],
            []
        )
        .is_err());
    }
}
