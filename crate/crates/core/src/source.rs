//! A small dependently typed source language with effects, the input to the
//! CBV and CBN translations.
//!
//! ```text
//! type ::= Unit | Bool | Sum(type, ..) | Prod(type, ..) | Pi x : type. type
//!        | Sigma x : type. type | Id(type, term, term) | (type)
//! term ::= let x = term in term | lam x : type. term | lam { term | .. }
//!        | mu x : type. term | pm term (: type)? as pattern | refl term
//!        | i ' term | atom ' term | print "m" term | write s term
//!        | read { s. term | .. } | choose { term | .. } | error e | diverge
//!        | atom
//! atom ::= x | () | (i, term) | (term, term) | (term : type) | (term)
//! ```
//!
//! `M ' N` applies the function `N` to the argument `M`. Patterns and
//! motives use the kernel forms. A dependent identity eliminator needs the
//! scrutinee's type, either synthesized or given as `pm M : Id(A, L, R) as ..`.

use crate::surface::{lex, signature_block, Cursor, ParseError, SourceSpan, Tok};
use crate::syntax::{EffectSignature, Pattern};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SrcType {
    Unit,
    Sum(Vec<SrcType>),
    Prod(Vec<SrcType>),
    Pi(Box<SrcType>, Box<SrcType>),
    Sigma(Box<SrcType>, Box<SrcType>),
    Id(Box<SrcType>, Box<SrcTerm>, Box<SrcTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SrcElim {
    pub scrutinee: SrcTerm,
    /// Optional type of the scrutinee.
    pub annotation: Option<SrcType>,
    /// Result type under the pattern's motive binders; `None` is a weak
    /// elimination.
    pub motive: Option<SrcType>,
    pub pattern: Pattern<SrcTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SrcTerm {
    Var(usize),
    Let(Box<SrcTerm>, Box<SrcTerm>),
    /// 0-based tag.
    Inj(usize, Box<SrcTerm>),
    Tuple(Vec<SrcTerm>),
    Proj(usize, Box<SrcTerm>),
    Lam(Box<SrcType>, Box<SrcTerm>),
    /// `App(arg, fun)`.
    App(Box<SrcTerm>, Box<SrcTerm>),
    Unit,
    Pair(Box<SrcTerm>, Box<SrcTerm>),
    Refl(Box<SrcTerm>),
    Elim(Box<SrcElim>),
    Mu(Box<SrcType>, Box<SrcTerm>),
    Ascribe(Box<SrcTerm>, Box<SrcType>),
    Diverge,
    Error(String),
    Print(String, Box<SrcTerm>),
    Choose(Vec<SrcTerm>),
    Write(String, Box<SrcTerm>),
    Read(Vec<(String, SrcTerm)>),
}

pub fn pattern_binders<R>(p: &Pattern<R>) -> usize {
    match p {
        Pattern::Unit(_) => 0,
        Pattern::Sum(_) | Pattern::Id(_) => 1,
        Pattern::Pair(_) => 2,
    }
}

type SrcVarMap<'a> = dyn FnMut(usize, usize) -> SrcTerm + 'a;

impl SrcType {
    fn map_vars(&self, d: usize, f: &mut SrcVarMap<'_>) -> SrcType {
        match self {
            SrcType::Unit => SrcType::Unit,
            SrcType::Sum(ts) => SrcType::Sum(ts.iter().map(|t| t.map_vars(d, f)).collect()),
            SrcType::Prod(ts) => SrcType::Prod(ts.iter().map(|t| t.map_vars(d, f)).collect()),
            SrcType::Pi(a, b) => SrcType::Pi(Box::new(a.map_vars(d, f)), Box::new(b.map_vars(d + 1, f))),
            SrcType::Sigma(a, b) => {
                SrcType::Sigma(Box::new(a.map_vars(d, f)), Box::new(b.map_vars(d + 1, f)))
            }
            SrcType::Id(a, l, r) => SrcType::Id(
                Box::new(a.map_vars(d, f)),
                Box::new(l.map_vars(d, f)),
                Box::new(r.map_vars(d, f)),
            ),
        }
    }

    pub fn shift(&self, cutoff: usize, delta: usize) -> SrcType {
        self.map_vars(0, &mut |j, d| if j >= d + cutoff { SrcTerm::Var(j + delta) } else { SrcTerm::Var(j) })
    }

    /// Replaces the innermost `vs.len()` variables, `vs[0]` for index 0.
    pub fn subst_many(&self, vs: &[SrcTerm]) -> SrcType {
        let n = vs.len();
        self.map_vars(0, &mut |j, d| subst_var(j, d, n, vs))
    }

    pub fn subst(&self, v: &SrcTerm) -> SrcType {
        self.subst_many(std::slice::from_ref(v))
    }

    /// Whether free variable `i` occurs.
    pub fn mentions(&self, i: usize) -> bool {
        let mut hit = false;
        self.map_vars(0, &mut |j, d| {
            if j == i + d {
                hit = true;
            }
            SrcTerm::Var(j)
        });
        hit
    }

    /// Removes the innermost `n` binders, if they are unused.
    pub fn strengthen(&self, n: usize) -> Option<SrcType> {
        if (0..n).any(|i| self.mentions(i)) {
            return None;
        }
        Some(self.map_vars(0, &mut |j, d| if j >= d + n { SrcTerm::Var(j - n) } else { SrcTerm::Var(j) }))
    }
}

fn subst_var(j: usize, d: usize, n: usize, vs: &[SrcTerm]) -> SrcTerm {
    if j < d {
        SrcTerm::Var(j)
    } else if j - d < n {
        vs[j - d].shift(0, d)
    } else {
        SrcTerm::Var(j - n)
    }
}

impl SrcTerm {
    fn map_vars(&self, d: usize, f: &mut SrcVarMap<'_>) -> SrcTerm {
        let bx = |t: &SrcTerm, d: usize, f: &mut SrcVarMap<'_>| Box::new(t.map_vars(d, f));
        match self {
            SrcTerm::Var(j) => f(*j, d),
            SrcTerm::Let(m, n) => SrcTerm::Let(bx(m, d, f), bx(n, d + 1, f)),
            SrcTerm::Inj(i, m) => SrcTerm::Inj(*i, bx(m, d, f)),
            SrcTerm::Tuple(ms) => SrcTerm::Tuple(ms.iter().map(|m| m.map_vars(d, f)).collect()),
            SrcTerm::Proj(i, m) => SrcTerm::Proj(*i, bx(m, d, f)),
            SrcTerm::Lam(a, m) => SrcTerm::Lam(Box::new(a.map_vars(d, f)), bx(m, d + 1, f)),
            SrcTerm::App(m, n) => SrcTerm::App(bx(m, d, f), bx(n, d, f)),
            SrcTerm::Unit => SrcTerm::Unit,
            SrcTerm::Pair(m, n) => SrcTerm::Pair(bx(m, d, f), bx(n, d, f)),
            SrcTerm::Refl(m) => SrcTerm::Refl(bx(m, d, f)),
            SrcTerm::Elim(e) => {
                let arity = if matches!(e.pattern, Pattern::Id(_)) { 3 } else { 1 };
                let k = pattern_binders(&e.pattern);
                let pattern = match &e.pattern {
                    Pattern::Unit(n) => Pattern::Unit(n.map_vars(d, f)),
                    Pattern::Sum(ns) => Pattern::Sum(ns.iter().map(|n| n.map_vars(d + k, f)).collect()),
                    Pattern::Pair(n) => Pattern::Pair(n.map_vars(d + k, f)),
                    Pattern::Id(n) => Pattern::Id(n.map_vars(d + k, f)),
                };
                SrcTerm::Elim(Box::new(SrcElim {
                    scrutinee: e.scrutinee.map_vars(d, f),
                    annotation: e.annotation.as_ref().map(|a| a.map_vars(d, f)),
                    motive: e.motive.as_ref().map(|c| c.map_vars(d + arity, f)),
                    pattern,
                }))
            }
            SrcTerm::Mu(a, m) => SrcTerm::Mu(Box::new(a.map_vars(d, f)), bx(m, d + 1, f)),
            SrcTerm::Ascribe(m, a) => SrcTerm::Ascribe(bx(m, d, f), Box::new(a.map_vars(d, f))),
            SrcTerm::Diverge => SrcTerm::Diverge,
            SrcTerm::Error(e) => SrcTerm::Error(e.clone()),
            SrcTerm::Print(t, m) => SrcTerm::Print(t.clone(), bx(m, d, f)),
            SrcTerm::Choose(ms) => SrcTerm::Choose(ms.iter().map(|m| m.map_vars(d, f)).collect()),
            SrcTerm::Write(s, m) => SrcTerm::Write(s.clone(), bx(m, d, f)),
            SrcTerm::Read(arms) => {
                SrcTerm::Read(arms.iter().map(|(s, m)| (s.clone(), m.map_vars(d, f))).collect())
            }
        }
    }

    pub fn shift(&self, cutoff: usize, delta: usize) -> SrcTerm {
        self.map_vars(0, &mut |j, d| if j >= d + cutoff { SrcTerm::Var(j + delta) } else { SrcTerm::Var(j) })
    }

    pub fn subst_many(&self, vs: &[SrcTerm]) -> SrcTerm {
        let n = vs.len();
        self.map_vars(0, &mut |j, d| subst_var(j, d, n, vs))
    }

    pub fn subst(&self, v: &SrcTerm) -> SrcTerm {
        self.subst_many(std::slice::from_ref(v))
    }

    pub fn free_vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.map_vars(0, &mut |j, d| {
            if j >= d && !out.contains(&(j - d)) {
                out.push(j - d);
            }
            SrcTerm::Var(j)
        });
        out.sort_unstable();
        out
    }

    /// Whether some eliminator carries a motive.
    pub fn has_dependent_elim(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| {
            if let SrcTerm::Elim(e) = t {
                found |= e.motive.is_some();
            }
        });
        found
    }

    /// Pre-order walk over every subterm, including terms inside types.
    pub fn visit(&self, f: &mut dyn FnMut(&SrcTerm)) {
        f(self);
        match self {
            SrcTerm::Var(_) | SrcTerm::Unit | SrcTerm::Diverge | SrcTerm::Error(_) => {}
            SrcTerm::Let(m, n) | SrcTerm::App(m, n) | SrcTerm::Pair(m, n) => {
                m.visit(f);
                n.visit(f);
            }
            SrcTerm::Inj(_, m)
            | SrcTerm::Proj(_, m)
            | SrcTerm::Refl(m)
            | SrcTerm::Print(_, m)
            | SrcTerm::Write(_, m) => m.visit(f),
            SrcTerm::Lam(a, m) | SrcTerm::Mu(a, m) | SrcTerm::Ascribe(m, a) => {
                a.visit(f);
                m.visit(f);
            }
            SrcTerm::Tuple(ms) | SrcTerm::Choose(ms) => ms.iter().for_each(|m| m.visit(f)),
            SrcTerm::Read(arms) => arms.iter().for_each(|(_, m)| m.visit(f)),
            SrcTerm::Elim(e) => {
                e.scrutinee.visit(f);
                if let Some(a) = &e.annotation {
                    a.visit(f);
                }
                if let Some(c) = &e.motive {
                    c.visit(f);
                }
                match &e.pattern {
                    Pattern::Unit(n) | Pattern::Pair(n) | Pattern::Id(n) => n.visit(f),
                    Pattern::Sum(ns) => ns.iter().for_each(|n| n.visit(f)),
                }
            }
        }
    }
}

impl SrcType {
    pub fn visit(&self, f: &mut dyn FnMut(&SrcTerm)) {
        match self {
            SrcType::Unit => {}
            SrcType::Sum(ts) | SrcType::Prod(ts) => ts.iter().for_each(|t| t.visit(f)),
            SrcType::Pi(a, b) | SrcType::Sigma(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            SrcType::Id(a, l, r) => {
                a.visit(f);
                l.visit(f);
                r.visit(f);
            }
        }
    }
}

/// A source program: an effect signature, a declared type and a closed term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrcProgram {
    pub signature: EffectSignature,
    pub ty: SrcType,
    pub main: SrcTerm,
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

const SRC_KEYWORDS: &[&str] = &[
    "Unit", "Bool", "Sum", "Prod", "Pi", "Sigma", "Id", "let", "in", "lam", "mu", "pm", "as", "refl",
    "print", "write", "read", "choose", "error", "diverge", "effects", "main",
];

type PResult<T> = Result<T, ParseError>;

struct SrcParser {
    c: Cursor,
    names: Vec<String>,
}

/// Parses a `.dtt` program: an optional `effects { .. }` block followed by
/// `main : type = term;`.
pub fn parse_src_program(text: &str) -> PResult<SrcProgram> {
    let (toks, _) = lex(text)?;
    let mut c = Cursor::new(toks);
    let mut signature = EffectSignature::pure();
    if c.eat_kw("effects") {
        let (sig, rest) = signature_block(c)?;
        signature = sig;
        c = rest;
    }
    let mut p = SrcParser { c, names: Vec::new() };
    p.c.expect_kw("main")?;
    p.c.expect_sym(":")?;
    let ty = p.ty()?;
    p.c.expect_sym("=")?;
    let main = p.term()?;
    p.c.expect_sym(";")?;
    if !p.c.at_eof() {
        return p.c.error(format!("expected end of input, found {}", p.c.peek()));
    }
    Ok(SrcProgram { signature, ty, main })
}

pub fn parse_src_term(text: &str) -> PResult<SrcTerm> {
    let (toks, _) = lex(text)?;
    let mut p = SrcParser { c: Cursor::new(toks), names: Vec::new() };
    let t = p.term()?;
    if !p.c.at_eof() {
        return p.c.error(format!("expected end of input, found {}", p.c.peek()));
    }
    Ok(t)
}

pub fn parse_src_type(text: &str) -> PResult<SrcType> {
    let (toks, _) = lex(text)?;
    let mut p = SrcParser { c: Cursor::new(toks), names: Vec::new() };
    let t = p.ty()?;
    if !p.c.at_eof() {
        return p.c.error(format!("expected end of input, found {}", p.c.peek()));
    }
    Ok(t)
}

impl SrcParser {
    fn binder(&mut self) -> PResult<String> {
        let span = self.c.span();
        let x = self.c.ident()?;
        if SRC_KEYWORDS.contains(&x.as_str()) {
            return Err(ParseError { message: format!("`{x}` is a keyword"), span });
        }
        Ok(x)
    }

    fn under<T>(&mut self, xs: &[String], f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.names.extend(xs.iter().cloned());
        let r = f(self);
        self.names.truncate(self.names.len() - xs.len());
        r
    }

    fn list<T>(&mut self, close: &str, sep: &str, mut f: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.c.eat_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(f(self)?);
            if !self.c.eat_sym(sep) {
                break;
            }
        }
        self.c.expect_sym(close)?;
        Ok(out)
    }

    fn ty(&mut self) -> PResult<SrcType> {
        let span = self.c.span();
        match self.c.bump() {
            Tok::Ident(s) => match s.as_str() {
                "Unit" => Ok(SrcType::Unit),
                "Bool" => Ok(SrcType::Sum(vec![SrcType::Unit, SrcType::Unit])),
                "Sum" | "Prod" => {
                    self.c.expect_sym("(")?;
                    let ts = self.list(")", ",", |p| p.ty())?;
                    Ok(if s == "Sum" { SrcType::Sum(ts) } else { SrcType::Prod(ts) })
                }
                "Pi" | "Sigma" => {
                    let x = self.binder()?;
                    self.c.expect_sym(":")?;
                    let a = self.ty()?;
                    self.c.expect_sym(".")?;
                    let b = self.under(&[x], |p| p.ty())?;
                    Ok(if s == "Pi" {
                        SrcType::Pi(Box::new(a), Box::new(b))
                    } else {
                        SrcType::Sigma(Box::new(a), Box::new(b))
                    })
                }
                "Id" => {
                    self.c.expect_sym("(")?;
                    let a = self.ty()?;
                    self.c.expect_sym(",")?;
                    let l = self.term()?;
                    self.c.expect_sym(",")?;
                    let r = self.term()?;
                    self.c.expect_sym(")")?;
                    Ok(SrcType::Id(Box::new(a), Box::new(l), Box::new(r)))
                }
                _ => Err(ParseError { message: format!("unknown type `{s}`"), span }),
            },
            Tok::Sym("(") => {
                let t = self.ty()?;
                self.c.expect_sym(")")?;
                Ok(t)
            }
            other => Err(ParseError { message: format!("expected a type, found {other}"), span }),
        }
    }

    fn term(&mut self) -> PResult<SrcTerm> {
        let span = self.c.span();
        let kw = match self.c.peek() {
            Tok::Ident(s) if SRC_KEYWORDS.contains(&s.as_str()) => Some(s.clone()),
            _ => None,
        };
        let Some(kw) = kw else {
            if let (Tok::Int(i), Tok::Sym("'")) = (self.c.peek().clone(), self.c.peek_at(1).clone()) {
                self.c.bump();
                self.c.bump();
                if i == 0 {
                    return Err(ParseError { message: "projection indices start at 1".into(), span });
                }
                return Ok(SrcTerm::Proj(i - 1, Box::new(self.term()?)));
            }
            let a = self.atom()?;
            if self.c.eat_sym("'") {
                return Ok(SrcTerm::App(Box::new(a), Box::new(self.term()?)));
            }
            return Ok(a);
        };
        self.c.bump();
        let bx = Box::new;
        match kw.as_str() {
            "let" => {
                let x = self.binder()?;
                self.c.expect_sym("=")?;
                let m = self.term()?;
                self.c.expect_kw("in")?;
                let n = self.under(&[x], |p| p.term())?;
                Ok(SrcTerm::Let(bx(m), bx(n)))
            }
            "lam" => {
                if self.c.eat_sym("{") {
                    return Ok(SrcTerm::Tuple(self.list("}", "|", |p| p.term())?));
                }
                let x = self.binder()?;
                self.c.expect_sym(":")?;
                let a = self.ty()?;
                self.c.expect_sym(".")?;
                let m = self.under(&[x], |p| p.term())?;
                Ok(SrcTerm::Lam(Box::new(a), Box::new(m)))
            }
            "mu" => {
                let x = self.binder()?;
                self.c.expect_sym(":")?;
                let a = self.ty()?;
                self.c.expect_sym(".")?;
                let m = self.under(&[x], |p| p.term())?;
                Ok(SrcTerm::Mu(Box::new(a), Box::new(m)))
            }
            "refl" => Ok(SrcTerm::Refl(bx(self.term()?))),
            "pm" => self.elim(),
            "print" => {
                let tspan = self.c.span();
                let tok = match self.c.bump() {
                    Tok::Str(s) | Tok::Ident(s) => s,
                    Tok::Int(n) => n.to_string(),
                    other => {
                        return Err(ParseError {
                            message: format!("expected a monoid element after `print`, found {other}"),
                            span: tspan,
                        })
                    }
                };
                Ok(SrcTerm::Print(tok, bx(self.term()?)))
            }
            "write" => {
                let s = self.c.ident()?;
                Ok(SrcTerm::Write(s, bx(self.term()?)))
            }
            "read" => {
                self.c.expect_sym("{")?;
                let arms = self.list("}", "|", |p| {
                    let s = p.c.ident()?;
                    p.c.expect_sym(".")?;
                    Ok((s, p.term()?))
                })?;
                Ok(SrcTerm::Read(arms))
            }
            "choose" => {
                self.c.expect_sym("{")?;
                Ok(SrcTerm::Choose(self.list("}", "|", |p| p.term())?))
            }
            "error" => Ok(SrcTerm::Error(self.c.ident()?)),
            "diverge" => Ok(SrcTerm::Diverge),
            other => Err(ParseError { message: format!("unexpected keyword `{other}`"), span }),
        }
    }

    fn elim(&mut self) -> PResult<SrcTerm> {
        let scrutinee = self.term()?;
        let annotation = if self.c.eat_sym(":") { Some(self.ty()?) } else { None };
        self.c.expect_kw("as")?;
        let mspan = self.c.span();
        let motive = if self.c.eat_sym("[") {
            let mut xs = Vec::new();
            while !self.c.is_sym(".") {
                xs.push(self.binder()?);
            }
            self.c.expect_sym(".")?;
            let c = self.under(&xs, |p| p.ty())?;
            self.c.expect_sym("]")?;
            Some((xs.len(), c))
        } else {
            None
        };
        let pattern = if self.c.eat_sym("{") {
            let mut k = 0;
            Pattern::Sum(self.list("}", "|", |p| {
                let span = p.c.span();
                k += 1;
                p.c.expect_sym("(")?;
                let i = p.c.int()?;
                if i != k {
                    return Err(ParseError { message: format!("expected arm ({k}, _), found ({i}, _)"), span });
                }
                p.c.expect_sym(",")?;
                let x = p.binder()?;
                p.c.expect_sym(")")?;
                p.c.expect_sym(".")?;
                p.under(&[x], |p| p.term())
            })?)
        } else if self.c.eat_kw("refl") {
            let x = self.binder()?;
            self.c.expect_sym(".")?;
            Pattern::Id(self.under(&[x], |p| p.term())?)
        } else {
            self.c.expect_sym("(")?;
            if self.c.eat_sym(")") {
                self.c.expect_sym(".")?;
                Pattern::Unit(self.term()?)
            } else {
                let x = self.binder()?;
                self.c.expect_sym(",")?;
                let y = self.binder()?;
                self.c.expect_sym(")")?;
                self.c.expect_sym(".")?;
                Pattern::Pair(self.under(&[x, y], |p| p.term())?)
            }
        };
        let motive = match motive {
            Some((k, c)) => {
                let want = if matches!(pattern, Pattern::Id(_)) { 3 } else { 1 };
                if k != want {
                    return Err(ParseError {
                        message: format!("motive binds {k} variable(s), this eliminator needs {want}"),
                        span: mspan,
                    });
                }
                Some(c)
            }
            None => None,
        };
        Ok(SrcTerm::Elim(Box::new(SrcElim { scrutinee, annotation, motive, pattern })))
    }

    fn atom(&mut self) -> PResult<SrcTerm> {
        let span: SourceSpan = self.c.span();
        match self.c.bump() {
            Tok::Ident(x) if !SRC_KEYWORDS.contains(&x.as_str()) => {
                match self.names.iter().rposition(|n| *n == x) {
                    Some(pos) => Ok(SrcTerm::Var(self.names.len() - 1 - pos)),
                    None => Err(ParseError { message: format!("unbound variable `{x}`"), span }),
                }
            }
            Tok::Sym("(") => {
                if self.c.eat_sym(")") {
                    return Ok(SrcTerm::Unit);
                }
                if let (Tok::Int(i), Tok::Sym(",")) = (self.c.peek().clone(), self.c.peek_at(1).clone()) {
                    self.c.bump();
                    self.c.bump();
                    if i == 0 {
                        return Err(ParseError { message: "injection tags start at 1".into(), span });
                    }
                    let m = self.term()?;
                    self.c.expect_sym(")")?;
                    return Ok(SrcTerm::Inj(i - 1, Box::new(m)));
                }
                let m = self.term()?;
                if self.c.eat_sym(",") {
                    let n = self.term()?;
                    self.c.expect_sym(")")?;
                    return Ok(SrcTerm::Pair(Box::new(m), Box::new(n)));
                }
                if self.c.eat_sym(":") {
                    let a = self.ty()?;
                    self.c.expect_sym(")")?;
                    return Ok(SrcTerm::Ascribe(Box::new(m), Box::new(a)));
                }
                self.c.expect_sym(")")?;
                Ok(m)
            }
            other => Err(ParseError { message: format!("expected a term, found {other}"), span }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terms() {
        let t = parse_src_term("let f = lam x : Unit. x in () ' f").unwrap();
        assert_eq!(
            t,
            SrcTerm::Let(
                Box::new(SrcTerm::Lam(Box::new(SrcType::Unit), Box::new(SrcTerm::Var(0)))),
                Box::new(SrcTerm::App(Box::new(SrcTerm::Unit), Box::new(SrcTerm::Var(0)))),
            )
        );
        let t = parse_src_term("pm ((1, ()) : Bool) as[b. Unit] { (1, x). x | (2, y). () }").unwrap();
        assert!(t.has_dependent_elim());
        assert!(parse_src_term("pm () as (). ()").is_ok());
        assert!(!parse_src_term("pm () as (). ()").unwrap().has_dependent_elim());
        assert!(parse_src_term("x").is_err());
        assert!(parse_src_term("pm refl () as[a b p. Unit] refl x. x").is_ok());
        assert!(parse_src_term("pm refl () as[a. Unit] refl x. x").is_err());
    }

    #[test]
    fn parses_program() {
        let p = parse_src_program("effects { enable print } main : Unit = print \"a\" ();").unwrap();
        assert_eq!(p.ty, SrcType::Unit);
        assert!(matches!(p.main, SrcTerm::Print(..)));
    }

    #[test]
    fn substitution() {
        // (λy. x)[() / x] under one binder keeps y.
        let t = SrcTerm::Lam(Box::new(SrcType::Unit), Box::new(SrcTerm::Var(1)));
        assert_eq!(
            t.subst(&SrcTerm::Unit),
            SrcTerm::Lam(Box::new(SrcType::Unit), Box::new(SrcTerm::Unit))
        );
        let ty = SrcType::Id(Box::new(SrcType::Unit), Box::new(SrcTerm::Var(0)), Box::new(SrcTerm::Var(1)));
        assert!(ty.mentions(0) && ty.mentions(1) && !ty.mentions(2));
        assert_eq!(ty.strengthen(1), None);
        assert_eq!(SrcTerm::Var(3).shift(1, 2), SrcTerm::Var(5));
        assert_eq!(SrcTerm::Var(0).shift(1, 2), SrcTerm::Var(0));
    }
}
