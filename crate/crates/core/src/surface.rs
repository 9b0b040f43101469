//! Concrete syntax for kernel terms and program files: lexer, parser and
//! pretty-printer.
//!
//! ```text
//! vtype ::= U ctype | Unit | Sum(vtype, ..) | Sigma x : vtype. vtype
//!         | Id(vtype, value, value) | Name | (vtype)
//! ctype ::= F vtype | Prod(ctype, ..) | Pi x : vtype. ctype | (ctype)
//! value ::= x | () | (i, value) | (value, value) | (value : vtype) | thunk comp
//!         | refl value
//!         | let x = value in value | pm value as pattern
//! comp  ::= prefix | prefix to motive? x. comp
//! prefix ::= return value | force value | lam x : vtype. comp | lam { comp | .. }
//!         | i ' prefix | atom ' prefix | let x = value in comp | pm value as pattern
//!         | diverge | mu x. comp | print "m" comp | write s comp | error e
//!         | choose { comp | .. } | read { s. comp | .. } | (comp) | (comp : ctype)
//! pattern ::= motive? { (1, x). R | (2, y). R .. } | motive? (). R
//!           | motive? (x, y). R | motive? refl x. R
//! motive ::= [z. T] | [x y p. T] | [z ; y : A, .. . T]
//! ```
//!
//! `(M : C)` abbreviates `pm () as[z. C] (). M` and `(V : A)` abbreviates
//! `pm () as[z. A] (). V`.
//!
//! Sum and product indices are 1-based. Names are resolved to de Bruijn
//! indices while parsing; the innermost binding wins.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("parse error at {span}: {message}")]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

pub type PResult<T> = Result<T, ParseError>;

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(usize),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

const SYMBOLS: &[&str] = &[
    "==", "->", "(", ")", "{", "}", "[", "]", ",", ".", ":", "|", "=", ";", "'", "*", "\\",
];

/// Splits input into tokens; `--!` lines are returned separately as pragmas.
pub(crate) fn lex(src: &str) -> PResult<(Vec<Token>, Vec<String>)> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut pragmas = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;
    let span_at = |start: usize, end: usize, line: usize, line_start: usize| SourceSpan {
        start,
        end,
        line,
        col: src[line_start..start].chars().count() + 1,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("--") {
            let end = src[i..].find('\n').map(|k| i + k).unwrap_or(src.len());
            if let Some(p) = src[i..end].strip_prefix("--!") {
                pragmas.push(p.trim().to_string());
            }
            i = end;
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                span: span_at(start, i, line, line_start),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let span = span_at(start, i, line, line_start);
            let n = src[start..i]
                .parse()
                .map_err(|_| ParseError { message: "integer too large".into(), span })?;
            toks.push(Token { tok: Tok::Int(n), span });
            continue;
        }
        if c == b'"' {
            i += 1;
            let mut s = String::new();
            loop {
                let Some(ch) = src[i..].chars().next() else {
                    return Err(ParseError {
                        message: "unterminated string literal".into(),
                        span: span_at(start, i, line, line_start),
                    });
                };
                i += ch.len_utf8();
                match ch {
                    '"' => break,
                    '\\' => {
                        let Some(esc) = src[i..].chars().next() else { continue };
                        i += esc.len_utf8();
                        s.push(match esc {
                            'n' => '\n',
                            't' => '\t',
                            other => other,
                        });
                    }
                    '\n' => {
                        return Err(ParseError {
                            message: "newline in string literal".into(),
                            span: span_at(start, i, line, line_start),
                        })
                    }
                    other => s.push(other),
                }
            }
            toks.push(Token { tok: Tok::Str(s), span: span_at(start, i, line, line_start) });
            continue;
        }
        if let Some(sym) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            i += sym.len();
            toks.push(Token { tok: Tok::Sym(sym), span: span_at(start, i, line, line_start) });
            continue;
        }
        let ch = src[i..].chars().next().unwrap_or('?');
        return Err(ParseError {
            message: format!("unexpected character {ch:?}"),
            span: span_at(start, start + ch.len_utf8(), line, line_start),
        });
    }
    toks.push(Token { tok: Tok::Eof, span: span_at(src.len(), src.len(), line, line_start) });
    Ok((toks, pragmas))
}

/// Token cursor shared by the kernel and source-language parsers.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    pub fn mark(&self) -> usize {
        self.pos
    }

    pub fn reset(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError { message: message.into(), span: self.span() })
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    pub fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_kw(&mut self, s: &str) -> bool {
        if self.is_kw(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", self.peek()))
        }
    }

    pub fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.eat_kw(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", self.peek()))
        }
    }

    pub fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    pub fn int(&mut self) -> PResult<usize> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            other => self.error(format!("expected integer, found {other}")),
        }
    }

    /// An identifier or integer used as a name (monoid elements).
    pub fn name_like(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            Tok::Int(n) => {
                self.bump();
                Ok(n.to_string())
            }
            other => self.error(format!("expected a name, found {other}")),
        }
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }
}

pub const KEYWORDS: &[&str] = &[
    "U", "Unit", "Sum", "Sigma", "Id", "F", "Prod", "Pi", "thunk", "refl", "let", "in", "pm", "as",
    "return", "force", "to", "lam", "diverge", "mu", "choose", "error", "read", "print", "write",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

// ---------------------------------------------------------------------------
// Program files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDef {
    pub name: String,
    pub ty: VType,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValDef {
    pub name: String,
    pub ty: VType,
    pub value: Value,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainDef {
    pub ty: CType,
    pub body: Comp,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LawSides {
    Comp { ty: CType, lhs: Comp, rhs: Comp },
    Value { ty: VType, lhs: Value, rhs: Value },
}

/// An equation between two terms in a named context, for model checking.
#[derive(Debug, Clone, PartialEq)]
pub struct LawDef {
    pub name: String,
    pub context: Vec<(String, VType)>,
    pub sides: LawSides,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProgramFile {
    pub signature: EffectSignature,
    pub types: Vec<TypeDef>,
    pub vals: Vec<ValDef>,
    pub main: Option<MainDef>,
    pub laws: Vec<LawDef>,
    /// Text of `--!` comment lines, e.g. `variant plus`.
    pub pragmas: Vec<String>,
}

impl ProgramFile {
    /// Value of a `--! key value` pragma.
    pub fn pragma(&self, key: &str) -> Option<&str> {
        self.pragmas.iter().find_map(|p| {
            let mut it = p.splitn(2, char::is_whitespace);
            (it.next() == Some(key)).then(|| it.next().unwrap_or("").trim())
        })
    }

    pub fn context(&self) -> Context {
        Context::empty()
    }
}

/// Parses a whole program file.
pub fn parse(text: &str) -> PResult<ProgramFile> {
    let (toks, pragmas) = lex(text)?;
    let mut p = Parser::new(Cursor::new(toks));
    let mut prog = ProgramFile {
        signature: EffectSignature::pure(),
        types: Vec::new(),
        vals: Vec::new(),
        main: None,
        laws: Vec::new(),
        pragmas,
    };
    let mut names = HashSet::new();
    let mut seen_effects = false;
    while !p.c.at_eof() {
        let span = p.c.span();
        if p.c.eat_kw("effects") {
            if seen_effects {
                return Err(ParseError { message: "duplicate effects block".into(), span });
            }
            seen_effects = true;
            prog.signature = p.signature()?;
            p.sig = Some(prog.signature.clone());
            continue;
        }
        if p.c.eat_kw("type") {
            let name = p.c.ident()?;
            p.fresh_def(&mut names, &name, span)?;
            p.c.expect_sym("=")?;
            let ty = p.vtype()?;
            p.c.expect_sym(";")?;
            p.aliases.insert(name.clone(), ty.clone());
            prog.types.push(TypeDef { name, ty, span });
            continue;
        }
        if p.c.eat_kw("val") {
            let name = p.c.ident()?;
            if is_keyword(&name) {
                return Err(ParseError { message: format!("`{name}` is a keyword"), span });
            }
            p.fresh_def(&mut names, &name, span)?;
            p.c.expect_sym(":")?;
            let ty = p.vtype()?;
            p.c.expect_sym("=")?;
            let value = p.value()?;
            p.c.expect_sym(";")?;
            p.globals.insert(name.clone(), value.clone());
            prog.vals.push(ValDef { name, ty, value, span });
            continue;
        }
        if p.c.eat_kw("main") {
            if prog.main.is_some() {
                return Err(ParseError { message: "duplicate main".into(), span });
            }
            p.c.expect_sym(":")?;
            let ty = p.ctype()?;
            p.c.expect_sym("=")?;
            let body = p.comp()?;
            p.c.expect_sym(";")?;
            prog.main = Some(MainDef { ty, body, span });
            continue;
        }
        if p.c.eat_kw("law") {
            let name = p.c.ident()?;
            p.fresh_def(&mut names, &name, span)?;
            let law = p.law(name, span)?;
            prog.laws.push(law);
            continue;
        }
        return p.c.error(format!(
            "expected `effects`, `type`, `val`, `main` or `law`, found {}",
            p.c.peek()
        ));
    }
    Ok(prog)
}

/// Parses the body of an `effects { .. }` block; the cursor sits after the
/// keyword. Hands the cursor back.
pub(crate) fn signature_block(c: Cursor) -> PResult<(EffectSignature, Cursor)> {
    let mut p = Parser::new(c);
    let sig = p.signature()?;
    Ok((sig, p.c))
}

/// Parses a standalone computation with no free variables.
pub fn parse_comp(text: &str) -> PResult<Comp> {
    parse_comp_in(text, &[], None)
}

/// Parses a computation in a context of named variables (outermost first),
/// optionally validating effect operations against a signature.
pub fn parse_comp_in(text: &str, names: &[String], sig: Option<&EffectSignature>) -> PResult<Comp> {
    standalone(text, names, sig, |p| p.comp())
}

pub fn parse_value(text: &str) -> PResult<Value> {
    standalone(text, &[], None, |p| p.value())
}

pub fn parse_value_in(text: &str, names: &[String]) -> PResult<Value> {
    standalone(text, names, None, |p| p.value())
}

pub fn parse_vtype(text: &str) -> PResult<VType> {
    standalone(text, &[], None, |p| p.vtype())
}

pub fn parse_vtype_in(text: &str, names: &[String]) -> PResult<VType> {
    standalone(text, names, None, |p| p.vtype())
}

pub fn parse_ctype(text: &str) -> PResult<CType> {
    standalone(text, &[], None, |p| p.ctype())
}

pub fn parse_ctype_in(text: &str, names: &[String]) -> PResult<CType> {
    standalone(text, names, None, |p| p.ctype())
}

fn standalone<T>(
    text: &str,
    names: &[String],
    sig: Option<&EffectSignature>,
    f: impl FnOnce(&mut Parser) -> PResult<T>,
) -> PResult<T> {
    let (toks, _) = lex(text)?;
    let mut p = Parser::new(Cursor::new(toks));
    p.names = names.to_vec();
    p.sig = sig.cloned();
    let out = f(&mut p)?;
    if !p.c.at_eof() {
        return p.c.error(format!("unexpected {} after term", p.c.peek()));
    }
    Ok(out)
}

struct Parser {
    c: Cursor,
    names: Vec<String>,
    aliases: HashMap<String, VType>,
    globals: HashMap<String, Value>,
    sig: Option<EffectSignature>,
}

impl Parser {
    fn new(c: Cursor) -> Self {
        let mut aliases = HashMap::new();
        aliases.insert("Bool".to_string(), VType::bool());
        Parser { c, names: Vec::new(), aliases, globals: HashMap::new(), sig: None }
    }

    fn fresh_def(&self, names: &mut HashSet<String>, name: &str, span: SourceSpan) -> PResult<()> {
        if !names.insert(name.to_string()) {
            return Err(ParseError { message: format!("duplicate definition `{name}`"), span });
        }
        Ok(())
    }

    fn binder(&mut self) -> PResult<String> {
        let span = self.c.span();
        let x = self.c.ident()?;
        if is_keyword(&x) {
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

    fn lookup(&self, x: &str) -> Option<Value> {
        if x != "_" {
            if let Some(pos) = self.names.iter().rposition(|n| n == x) {
                return Some(Value::Var(self.names.len() - 1 - pos));
            }
        }
        self.globals.get(x).cloned()
    }

    // --- signatures -------------------------------------------------------

    fn signature(&mut self) -> PResult<EffectSignature> {
        self.c.expect_sym("{")?;
        let mut monoid = Monoid::FreeText;
        let mut states: Vec<String> = vec!["s0".into()];
        let mut initial = 0;
        let mut errors = Vec::new();
        let mut enabled = Vec::new();
        while !self.c.is_sym("}") {
            let span = self.c.span();
            let field = self.c.ident()?;
            match field.as_str() {
                "monoid" => monoid = self.monoid()?,
                "states" => {
                    self.c.expect_sym("{")?;
                    states.clear();
                    let mut init = None;
                    loop {
                        states.push(self.c.ident()?);
                        if self.c.eat_sym("*") {
                            init = Some(states.len() - 1);
                        }
                        if !self.c.eat_sym(",") {
                            break;
                        }
                    }
                    self.c.expect_sym("}")?;
                    initial = init.unwrap_or(0);
                }
                "errors" => {
                    self.c.expect_sym("{")?;
                    errors.clear();
                    if !self.c.is_sym("}") {
                        loop {
                            errors.push(self.c.ident()?);
                            if !self.c.eat_sym(",") {
                                break;
                            }
                        }
                    }
                    self.c.expect_sym("}")?;
                }
                "enable" => loop {
                    let span = self.c.span();
                    let e = self.c.ident()?;
                    match Effect::from_name(&e) {
                        Some(e) => enabled.push(e),
                        None => {
                            return Err(ParseError { message: format!("unknown effect `{e}`"), span })
                        }
                    }
                    if !self.c.eat_sym(",") {
                        break;
                    }
                },
                other => {
                    return Err(ParseError {
                        message: format!("unknown effects field `{other}`"),
                        span,
                    })
                }
            }
            if !self.c.eat_sym(";") {
                break;
            }
        }
        self.c.expect_sym("}")?;
        let span = self.c.span();
        EffectSignature::new(monoid, states, initial, errors, enabled)
            .map_err(|e| ParseError { message: e.to_string(), span })
    }

    /// `free` or `{e0*, e1, ..} [row; row; ..]` with rows of element names.
    fn monoid(&mut self) -> PResult<Monoid> {
        if self.c.eat_kw("free") {
            return Ok(Monoid::FreeText);
        }
        let span = self.c.span();
        self.c.expect_sym("{")?;
        let mut elems = Vec::new();
        let mut unit = None;
        loop {
            elems.push(self.c.name_like()?);
            if self.c.eat_sym("*") {
                unit = Some(elems.len() - 1);
            }
            if !self.c.eat_sym(",") {
                break;
            }
        }
        self.c.expect_sym("}")?;
        self.c.expect_sym("[")?;
        let mut table = Vec::new();
        let mut row = Vec::new();
        loop {
            if self.c.eat_sym("]") {
                table.push(std::mem::take(&mut row));
                break;
            }
            if self.c.eat_sym(";") {
                table.push(std::mem::take(&mut row));
                continue;
            }
            let sp = self.c.span();
            let name = self.c.name_like()?;
            match elems.iter().position(|e| *e == name) {
                Some(k) => row.push(k),
                None => {
                    return Err(ParseError {
                        message: format!("unknown monoid element `{name}`"),
                        span: sp,
                    })
                }
            }
        }
        let unit = match unit {
            Some(u) => u,
            None => return Err(ParseError { message: "monoid unit must be marked with `*`".into(), span }),
        };
        FiniteMonoid::new(elems, unit, table)
            .map(Monoid::FiniteTable)
            .map_err(|e| ParseError { message: e.to_string(), span })
    }

    // --- laws -------------------------------------------------------------

    fn law(&mut self, name: String, span: SourceSpan) -> PResult<LawDef> {
        self.c.expect_sym("(")?;
        let mut context: Vec<(String, VType)> = Vec::new();
        if !self.c.is_sym(")") {
            loop {
                let x = self.binder()?;
                self.c.expect_sym(":")?;
                let names: Vec<String> = context.iter().map(|(n, _)| n.clone()).collect();
                let ty = self.under(&names, |p| p.vtype())?;
                context.push((x, ty));
                if !self.c.eat_sym(",") {
                    break;
                }
            }
        }
        self.c.expect_sym(")")?;
        self.c.expect_sym(":")?;
        let names: Vec<String> = context.iter().map(|(n, _)| n.clone()).collect();
        let sides = self.under(&names, |p| {
            if p.starts_ctype() {
                let ty = p.ctype()?;
                p.c.expect_sym("=")?;
                let lhs = p.comp()?;
                p.c.expect_sym("==")?;
                let rhs = p.comp()?;
                Ok(LawSides::Comp { ty, lhs, rhs })
            } else {
                let ty = p.vtype()?;
                p.c.expect_sym("=")?;
                let lhs = p.value()?;
                p.c.expect_sym("==")?;
                let rhs = p.value()?;
                Ok(LawSides::Value { ty, lhs, rhs })
            }
        })?;
        self.c.expect_sym(";")?;
        Ok(LawDef { name, context, sides, span })
    }

    fn starts_ctype(&self) -> bool {
        let mut k = 0;
        while matches!(self.c.peek_at(k), Tok::Sym("(")) {
            k += 1;
        }
        matches!(self.c.peek_at(k), Tok::Ident(s) if s == "F" || s == "Prod" || s == "Pi")
    }

    // --- types ------------------------------------------------------------

    fn vtype(&mut self) -> PResult<VType> {
        let span = self.c.span();
        match self.c.peek().clone() {
            Tok::Ident(s) => match s.as_str() {
                "U" => {
                    self.c.bump();
                    Ok(VType::u(self.ctype()?))
                }
                "Unit" => {
                    self.c.bump();
                    Ok(VType::Unit)
                }
                "Sum" => {
                    self.c.bump();
                    Ok(VType::Sum(self.paren_list(|p| p.vtype())?))
                }
                "Sigma" => {
                    self.c.bump();
                    let x = self.binder()?;
                    self.c.expect_sym(":")?;
                    let a = self.vtype()?;
                    self.c.expect_sym(".")?;
                    let b = self.under(&[x], |p| p.vtype())?;
                    Ok(VType::sigma(a, b))
                }
                "Id" => {
                    self.c.bump();
                    self.c.expect_sym("(")?;
                    let a = self.vtype()?;
                    self.c.expect_sym(",")?;
                    let l = self.value()?;
                    self.c.expect_sym(",")?;
                    let r = self.value()?;
                    self.c.expect_sym(")")?;
                    Ok(VType::id(a, l, r))
                }
                _ => match self.aliases.get(&s) {
                    Some(t) => {
                        let t = t.clone();
                        self.c.bump();
                        // Aliases are closed.
                        Ok(t)
                    }
                    None => Err(ParseError { message: format!("unknown value type `{s}`"), span }),
                },
            },
            Tok::Sym("(") => {
                self.c.bump();
                let t = self.vtype()?;
                self.c.expect_sym(")")?;
                Ok(t)
            }
            other => self.c.error(format!("expected a value type, found {other}")),
        }
    }

    fn ctype(&mut self) -> PResult<CType> {
        match self.c.peek().clone() {
            Tok::Ident(s) if s == "F" => {
                self.c.bump();
                Ok(CType::f(self.vtype()?))
            }
            Tok::Ident(s) if s == "Prod" => {
                self.c.bump();
                Ok(CType::Prod(self.paren_list(|p| p.ctype())?))
            }
            Tok::Ident(s) if s == "Pi" => {
                self.c.bump();
                let x = self.binder()?;
                self.c.expect_sym(":")?;
                let a = self.vtype()?;
                self.c.expect_sym(".")?;
                let b = self.under(&[x], |p| p.ctype())?;
                Ok(CType::pi(a, b))
            }
            Tok::Sym("(") => {
                self.c.bump();
                let t = self.ctype()?;
                self.c.expect_sym(")")?;
                Ok(t)
            }
            other => self.c.error(format!("expected a computation type, found {other}")),
        }
    }

    fn paren_list<T>(&mut self, mut f: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.c.expect_sym("(")?;
        let mut out = Vec::new();
        if self.c.eat_sym(")") {
            return Ok(out);
        }
        loop {
            out.push(f(self)?);
            if !self.c.eat_sym(",") {
                break;
            }
        }
        self.c.expect_sym(")")?;
        Ok(out)
    }

    // --- values -----------------------------------------------------------

    fn value(&mut self) -> PResult<Value> {
        if self.c.eat_kw("thunk") {
            return Ok(Value::thunk(self.comp()?));
        }
        if self.c.eat_kw("refl") {
            return Ok(Value::refl(self.value()?));
        }
        if self.c.eat_kw("let") {
            let x = self.binder()?;
            self.c.expect_sym("=")?;
            let v = self.value()?;
            self.c.expect_kw("in")?;
            let r = self.under(&[x], |p| p.value())?;
            return Ok(Value::Let(Box::new(v), Box::new(r)));
        }
        if self.c.eat_kw("pm") {
            let scrutinee = self.value()?;
            self.c.expect_kw("as")?;
            let (motive, pattern) = self.pattern(|p| p.vtype(), |p| p.value())?;
            return Ok(Value::Match(Box::new(Match { scrutinee, motive, pattern })));
        }
        self.value_atom()
    }

    fn value_atom(&mut self) -> PResult<Value> {
        let span = self.c.span();
        match self.c.peek().clone() {
            Tok::Ident(x) if !is_keyword(&x) => {
                self.c.bump();
                self.lookup(&x)
                    .ok_or(ParseError { message: format!("unbound variable `{x}`"), span })
            }
            Tok::Sym("(") => {
                self.c.bump();
                if self.c.eat_sym(")") {
                    return Ok(Value::Unit);
                }
                if let (Tok::Int(i), Tok::Sym(",")) = (self.c.peek().clone(), self.c.peek_at(1).clone()) {
                    self.c.bump();
                    self.c.bump();
                    if i == 0 {
                        return Err(ParseError { message: "injection tags start at 1".into(), span });
                    }
                    let v = self.value()?;
                    self.c.expect_sym(")")?;
                    return Ok(Value::inj(i - 1, v));
                }
                let a = self.value()?;
                if self.c.eat_sym(",") {
                    let b = self.value()?;
                    self.c.expect_sym(")")?;
                    return Ok(Value::pair(a, b));
                }
                if self.c.eat_sym(":") {
                    let ty = self.vtype()?;
                    self.c.expect_sym(")")?;
                    return Ok(ascribe_value(a, ty));
                }
                self.c.expect_sym(")")?;
                Ok(a)
            }
            other => self.c.error(format!("expected a value, found {other}")),
        }
    }

    // --- patterns and motives ----------------------------------------------

    /// `[binders (; y : A, ..)? . T]`; returns the binder names too.
    fn motive<T>(
        &mut self,
        ty: &impl Fn(&mut Self) -> PResult<T>,
    ) -> PResult<(Vec<String>, Motive<T>)> {
        self.c.expect_sym("[")?;
        let mut binders = Vec::new();
        while let Tok::Ident(x) = self.c.peek().clone() {
            if is_keyword(&x) {
                break;
            }
            self.c.bump();
            binders.push(x);
        }
        let mut ext = Vec::new();
        let mut ext_names = Vec::new();
        if self.c.eat_sym(";") {
            loop {
                let y = self.binder()?;
                self.c.expect_sym(":")?;
                let scope: Vec<String> = binders.iter().chain(&ext_names).cloned().collect();
                let a = self.under(&scope, |p| p.vtype())?;
                ext.push(a);
                ext_names.push(y);
                if !self.c.eat_sym(",") {
                    break;
                }
            }
        }
        self.c.expect_sym(".")?;
        let scope: Vec<String> = binders.iter().chain(&ext_names).cloned().collect();
        let result = self.under(&scope, |p| ty(p))?;
        self.c.expect_sym("]")?;
        Ok((binders, Motive { ext, result }))
    }

    fn pattern<T, R>(
        &mut self,
        ty: impl Fn(&mut Self) -> PResult<T>,
        body: impl Fn(&mut Self) -> PResult<R>,
    ) -> PResult<(Option<Motive<T>>, Pattern<R>)> {
        let mspan = self.c.span();
        let motive = if self.c.is_sym("[") { Some(self.motive(&ty)?) } else { None };
        let pattern = if self.c.eat_sym("{") {
            let mut arms = Vec::new();
            if !self.c.is_sym("}") {
                loop {
                    let span = self.c.span();
                    self.c.expect_sym("(")?;
                    let i = self.c.int()?;
                    if i != arms.len() + 1 {
                        return Err(ParseError {
                            message: format!("expected arm ({}, _), found ({i}, _)", arms.len() + 1),
                            span,
                        });
                    }
                    self.c.expect_sym(",")?;
                    let x = self.binder()?;
                    self.c.expect_sym(")")?;
                    self.c.expect_sym(".")?;
                    arms.push(self.under(&[x], |p| body(p))?);
                    if !self.c.eat_sym("|") {
                        break;
                    }
                }
            }
            self.c.expect_sym("}")?;
            Pattern::Sum(arms)
        } else if self.c.eat_kw("refl") {
            let x = self.binder()?;
            self.c.expect_sym(".")?;
            Pattern::Id(self.under(&[x], |p| body(p))?)
        } else {
            self.c.expect_sym("(")?;
            if self.c.eat_sym(")") {
                self.c.expect_sym(".")?;
                Pattern::Unit(body(self)?)
            } else {
                let x = self.binder()?;
                self.c.expect_sym(",")?;
                let y = self.binder()?;
                self.c.expect_sym(")")?;
                self.c.expect_sym(".")?;
                Pattern::Pair(self.under(&[x, y], |p| body(p))?)
            }
        };
        let motive = match motive {
            Some((binders, m)) => {
                if binders.len() != pattern.motive_arity() {
                    return Err(ParseError {
                        message: format!(
                            "motive binds {} variable(s), this eliminator needs {}",
                            binders.len(),
                            pattern.motive_arity()
                        ),
                        span: mspan,
                    });
                }
                Some(m)
            }
            None => None,
        };
        Ok((motive, pattern))
    }

    // --- computations -----------------------------------------------------

    fn comp(&mut self) -> PResult<Comp> {
        let head = self.prefix()?;
        if self.c.eat_kw("to") {
            let mspan = self.c.span();
            let motive = if self.c.is_sym("[") {
                let (binders, m) = self.motive(&|p: &mut Self| p.ctype())?;
                if binders.len() != 1 {
                    return Err(ParseError {
                        message: "a sequencing motive binds exactly one variable".into(),
                        span: mspan,
                    });
                }
                Some(Box::new(m))
            } else {
                None
            };
            let x = self.binder()?;
            self.c.expect_sym(".")?;
            let body = self.under(&[x], |p| p.comp())?;
            return Ok(Comp::SeqTo { head: Box::new(head), body: Box::new(body), motive });
        }
        Ok(head)
    }

    fn prefix(&mut self) -> PResult<Comp> {
        let span = self.c.span();
        match self.c.peek().clone() {
            Tok::Int(i) if matches!(self.c.peek_at(1), Tok::Sym("'")) => {
                self.c.bump();
                self.c.bump();
                if i == 0 {
                    return Err(ParseError { message: "projection indices start at 1".into(), span });
                }
                Ok(Comp::proj(i - 1, self.prefix()?))
            }
            Tok::Ident(kw) if is_keyword(&kw) => {
                self.c.bump();
                self.keyword_comp(&kw, span)
            }
            Tok::Ident(_) | Tok::Sym("(") => {
                let mark = self.c.mark();
                if let Ok(v) = self.value_atom() {
                    if self.c.eat_sym("'") {
                        return Ok(Comp::apply(v, self.prefix()?));
                    }
                }
                self.c.reset(mark);
                if self.c.eat_sym("(") {
                    let m = self.comp()?;
                    if self.c.eat_sym(":") {
                        let ty = self.ctype()?;
                        self.c.expect_sym(")")?;
                        return Ok(ascribe(m, ty));
                    }
                    self.c.expect_sym(")")?;
                    return Ok(m);
                }
                self.c.error(format!("expected a computation, found {}", self.c.peek()))
            }
            other => self.c.error(format!("expected a computation, found {other}")),
        }
    }

    fn check_state(&self, s: &str, span: SourceSpan) -> PResult<()> {
        if let Some(sig) = &self.sig {
            if !sig.is_enabled(Effect::State) {
                return Err(ParseError { message: "state effect is not enabled".into(), span });
            }
            if !sig.has_state(s) {
                return Err(ParseError { message: format!("unknown state `{s}`"), span });
            }
        }
        Ok(())
    }

    fn keyword_comp(&mut self, kw: &str, span: SourceSpan) -> PResult<Comp> {
        match kw {
            "return" => Ok(Comp::Return(self.value()?)),
            "force" => Ok(Comp::Force(self.value()?)),
            "lam" => {
                if self.c.eat_sym("{") {
                    let ms = self.bar_list(|p| p.comp())?;
                    return Ok(Comp::LambdaProd(ms));
                }
                let x = self.binder()?;
                self.c.expect_sym(":")?;
                let a = self.vtype()?;
                self.c.expect_sym(".")?;
                let body = self.under(&[x], |p| p.comp())?;
                Ok(Comp::lam(a, body))
            }
            "let" => {
                let x = self.binder()?;
                self.c.expect_sym("=")?;
                let v = self.value()?;
                self.c.expect_kw("in")?;
                let body = self.under(&[x], |p| p.comp())?;
                Ok(Comp::let_in(v, body))
            }
            "pm" => {
                let scrutinee = self.value()?;
                self.c.expect_kw("as")?;
                let (motive, pattern) = self.pattern(|p| p.ctype(), |p| p.comp())?;
                Ok(Comp::Match(Box::new(Match { scrutinee, motive, pattern })))
            }
            "diverge" => Ok(Comp::Diverge),
            "mu" => {
                let x = self.binder()?;
                self.c.expect_sym(".")?;
                let body = self.under(&[x], |p| p.comp())?;
                Ok(Comp::Mu(Box::new(body)))
            }
            "print" => {
                let tspan = self.c.span();
                let tok = match self.c.bump() {
                    Tok::Str(s) => s,
                    Tok::Int(n) => n.to_string(),
                    Tok::Ident(s) => s,
                    other => {
                        return Err(ParseError {
                            message: format!("expected a monoid element after `print`, found {other}"),
                            span: tspan,
                        })
                    }
                };
                if let Some(sig) = &self.sig {
                    if sig.monoid_element(&tok).is_none() {
                        return Err(ParseError {
                            message: format!("`{tok}` is not an element of the printing monoid"),
                            span: tspan,
                        });
                    }
                }
                Ok(Comp::Print(tok, Box::new(self.comp()?)))
            }
            "write" => {
                let sspan = self.c.span();
                let s = self.c.ident()?;
                self.check_state(&s, sspan)?;
                Ok(Comp::Write(s, Box::new(self.comp()?)))
            }
            "read" => {
                if let Some(sig) = &self.sig {
                    if !sig.is_enabled(Effect::State) {
                        return Err(ParseError { message: "state effect is not enabled".into(), span });
                    }
                }
                self.c.expect_sym("{")?;
                let mut arms = Vec::new();
                loop {
                    let sspan = self.c.span();
                    let s = self.c.ident()?;
                    self.check_state(&s, sspan)?;
                    self.c.expect_sym(".")?;
                    let body = self.comp()?;
                    arms.push(ReadArm { state: s, body });
                    if !self.c.eat_sym("|") {
                        break;
                    }
                }
                self.c.expect_sym("}")?;
                if let Some(sig) = &self.sig {
                    let got: Vec<&str> = arms.iter().map(|a| a.state.as_str()).collect();
                    let want: Vec<&str> = sig.states().iter().map(String::as_str).collect();
                    if got != want {
                        return Err(ParseError {
                            message: format!("read must list every state in order: {}", want.join(", ")),
                            span,
                        });
                    }
                }
                Ok(Comp::Read(arms))
            }
            "choose" => {
                self.c.expect_sym("{")?;
                let ms = self.bar_list(|p| p.comp())?;
                Ok(Comp::Choose(ms))
            }
            "error" => {
                let e = self.c.ident()?;
                Ok(Comp::Error(e))
            }
            other => Err(ParseError { message: format!("unexpected keyword `{other}`"), span }),
        }
    }

    /// `a | b | .. }` after an opening brace.
    fn bar_list<T>(&mut self, mut f: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.c.eat_sym("}") {
            return Ok(out);
        }
        loop {
            out.push(f(self)?);
            if !self.c.eat_sym("|") {
                break;
            }
        }
        self.c.expect_sym("}")?;
        Ok(out)
    }
}

/// `(V : A)` is sugar for `pm () as[z. A] (). V`, which infers `A`.
pub fn ascribe_value(v: Value, ty: VType) -> Value {
    Value::Match(Box::new(Match {
        scrutinee: Value::Unit,
        motive: Some(Motive::new(ty.weaken(1))),
        pattern: Pattern::Unit(v),
    }))
}

/// `(M : C)` is sugar for `pm () as[z. C] (). M`, which infers `C`.
pub fn ascribe(m: Comp, ty: CType) -> Comp {
    Comp::Match(Box::new(Match {
        scrutinee: Value::Unit,
        motive: Some(Motive::new(ty.weaken(1))),
        pattern: Pattern::Unit(m),
    }))
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

/// Pretty-printer; binders are named `x<level>` so printed terms re-parse
/// to the same de Bruijn term.
pub struct Printer {
    names: Vec<String>,
}

impl Printer {
    pub fn new(names: Vec<String>) -> Self {
        Printer { names }
    }

    pub fn at_depth(depth: usize) -> Self {
        Printer { names: (0..depth).map(|i| format!("x{i}")).collect() }
    }

    fn fresh(&self, k: usize) -> Vec<String> {
        let taken: HashSet<&str> = self.names.iter().map(String::as_str).collect();
        let mut out = Vec::new();
        let mut level = self.names.len();
        while out.len() < k {
            let cand = format!("x{level}");
            if !taken.contains(cand.as_str()) {
                out.push(cand);
            }
            level += 1;
        }
        out
    }

    fn with<T>(&mut self, xs: &[String], f: impl FnOnce(&mut Self) -> T) -> T {
        self.names.extend(xs.iter().cloned());
        let r = f(self);
        self.names.truncate(self.names.len() - xs.len());
        r
    }

    fn var(&self, i: usize) -> String {
        if i < self.names.len() {
            self.names[self.names.len() - 1 - i].clone()
        } else {
            format!("?{}", i - self.names.len())
        }
    }

    pub fn vtype(&mut self, a: &VType) -> String {
        match a {
            VType::U(b) => format!("U {}", self.ctype(b)),
            VType::Unit => "Unit".into(),
            VType::Sum(arms) => {
                let parts: Vec<String> = arms.iter().map(|t| self.vtype(t)).collect();
                format!("Sum({})", parts.join(", "))
            }
            VType::Sigma(x, y) => {
                let xs = self.fresh(1);
                let ax = self.vtype(x);
                let by = self.with(&xs, |p| p.vtype(y));
                format!("Sigma {} : {}. {}", xs[0], ax, by)
            }
            VType::Id(c, l, r) => {
                format!("Id({}, {}, {})", self.vtype(c), self.value(l), self.value(r))
            }
        }
    }

    pub fn ctype(&mut self, b: &CType) -> String {
        match b {
            CType::F(a) => format!("F {}", self.vtype(a)),
            CType::Prod(arms) => {
                let parts: Vec<String> = arms.iter().map(|t| self.ctype(t)).collect();
                format!("Prod({})", parts.join(", "))
            }
            CType::Pi(a, c) => {
                let xs = self.fresh(1);
                let da = self.vtype(a);
                let cc = self.with(&xs, |p| p.ctype(c));
                format!("Pi {} : {}. {}", xs[0], da, cc)
            }
        }
    }

    fn value_atom(&mut self, v: &Value) -> String {
        if value_is_atom(v) {
            self.value(v)
        } else {
            format!("({})", self.value(v))
        }
    }

    pub fn value(&mut self, v: &Value) -> String {
        match v {
            Value::Var(i) => self.var(*i),
            Value::Unit => "()".into(),
            Value::Thunk(m) => format!("thunk {}", self.comp(m)),
            Value::Inj(i, w) => format!("({}, {})", i + 1, self.value(w)),
            Value::Pair(a, b) => format!("({}, {})", self.value(a), self.value(b)),
            Value::Refl(w) => format!("refl {}", self.value(w)),
            Value::Let(w, r) => {
                let xs = self.fresh(1);
                let wv = self.value(w);
                let rv = self.with(&xs, |p| p.value(r));
                format!("let {} = {} in {}", xs[0], wv, rv)
            }
            Value::Match(mm) => {
                let s = self.value(&mm.scrutinee);
                let pat = self.pattern(&mm.motive, &mm.pattern, |p, t| p.vtype(t), |p, r| p.value(r));
                format!("pm {s} as{pat}")
            }
        }
    }

    fn motive<T>(&mut self, m: &Motive<T>, arity: usize, ty: &impl Fn(&mut Self, &T) -> String) -> String {
        let binders = self.fresh(arity);
        self.with(&binders, |p| {
            let mut ext_parts = Vec::new();
            let mut ext_names = Vec::new();
            for a in &m.ext {
                let y = p.fresh(1);
                let at = p.vtype(a);
                ext_parts.push(format!("{} : {}", y[0], at));
                p.names.push(y[0].clone());
                ext_names.push(y[0].clone());
            }
            let res = ty(p, &m.result);
            p.names.truncate(p.names.len() - ext_names.len());
            if ext_parts.is_empty() {
                format!("[{}. {}]", binders.join(" "), res)
            } else {
                format!("[{} ; {}. {}]", binders.join(" "), ext_parts.join(", "), res)
            }
        })
    }

    fn pattern<T, R>(
        &mut self,
        motive: &Option<Motive<T>>,
        pattern: &Pattern<R>,
        ty: impl Fn(&mut Self, &T) -> String,
        body: impl Fn(&mut Self, &R) -> String,
    ) -> String {
        let mot = match motive {
            Some(m) => self.motive(m, pattern.motive_arity(), &ty),
            None => String::new(),
        };
        let rest = match pattern {
            Pattern::Unit(r) => format!(" (). {}", body(self, r)),
            Pattern::Sum(arms) => {
                let parts: Vec<String> = arms
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let xs = self.fresh(1);
                        let b = self.with(&xs, |p| body(p, r));
                        format!("({}, {}). {}", i + 1, xs[0], b)
                    })
                    .collect();
                if parts.is_empty() {
                    " {}".into()
                } else {
                    format!(" {{ {} }}", parts.join(" | "))
                }
            }
            Pattern::Pair(r) => {
                let xs = self.fresh(2);
                let b = self.with(&xs, |p| body(p, r));
                format!(" ({}, {}). {}", xs[0], xs[1], b)
            }
            Pattern::Id(r) => {
                let xs = self.fresh(1);
                let b = self.with(&xs, |p| body(p, r));
                format!(" refl {}. {}", xs[0], b)
            }
        };
        format!("{mot}{rest}")
    }

    /// A computation in a position that must not extend to the right.
    fn comp_closed(&mut self, m: &Comp) -> String {
        if comp_is_closed(m) {
            self.comp(m)
        } else {
            format!("({})", self.comp(m))
        }
    }

    /// A computation in prefix position (argument of `'`).
    fn comp_prefix(&mut self, m: &Comp) -> String {
        if matches!(m, Comp::SeqTo { .. }) {
            format!("({})", self.comp(m))
        } else {
            self.comp(m)
        }
    }

    pub fn comp(&mut self, m: &Comp) -> String {
        match m {
            Comp::Return(v) => format!("return {}", self.value(v)),
            Comp::SeqTo { head, body, motive } => {
                let h = self.comp_closed(head);
                let mot = match motive {
                    Some(mo) => self.motive(mo, 1, &|p: &mut Self, t: &CType| p.ctype(t)),
                    None => String::new(),
                };
                let xs = self.fresh(1);
                let b = self.with(&xs, |p| p.comp(body));
                format!("{h} to{mot} {}. {b}", xs[0])
            }
            Comp::Force(v) => format!("force {}", self.value(v)),
            Comp::LambdaProd(ms) => {
                let parts: Vec<String> = ms.iter().map(|m| self.comp(m)).collect();
                if parts.is_empty() {
                    "lam {}".into()
                } else {
                    format!("lam {{ {} }}", parts.join(" | "))
                }
            }
            Comp::Proj(i, inner) => format!("{} ' {}", i + 1, self.comp_prefix(inner)),
            Comp::LambdaPi(a, body) => {
                let xs = self.fresh(1);
                let da = self.vtype(a);
                let b = self.with(&xs, |p| p.comp(body));
                format!("lam {} : {}. {}", xs[0], da, b)
            }
            Comp::Apply(v, f) => format!("{} ' {}", self.value_atom(v), self.comp_prefix(f)),
            Comp::Let(v, body) => {
                let xs = self.fresh(1);
                let vv = self.value(v);
                let b = self.with(&xs, |p| p.comp(body));
                format!("let {} = {} in {}", xs[0], vv, b)
            }
            Comp::Match(mm) => {
                let s = self.value(&mm.scrutinee);
                let pat = self.pattern(&mm.motive, &mm.pattern, |p, t| p.ctype(t), |p, r| p.comp(r));
                format!("pm {s} as{pat}")
            }
            Comp::Diverge => "diverge".into(),
            Comp::Mu(body) => {
                let xs = self.fresh(1);
                let b = self.with(&xs, |p| p.comp(body));
                format!("mu {}. {}", xs[0], b)
            }
            Comp::Print(t, body) => format!("print {} {}", quote(t), self.comp(body)),
            Comp::Write(s, body) => format!("write {} {}", s, self.comp(body)),
            Comp::Choose(ms) => {
                let parts: Vec<String> = ms.iter().map(|m| self.comp(m)).collect();
                if parts.is_empty() {
                    "choose {}".into()
                } else {
                    format!("choose {{ {} }}", parts.join(" | "))
                }
            }
            Comp::Error(e) => format!("error {e}"),
            Comp::Read(arms) => {
                let parts: Vec<String> =
                    arms.iter().map(|a| format!("{}. {}", a.state, self.comp(&a.body))).collect();
                format!("read {{ {} }}", parts.join(" | "))
            }
        }
    }

    pub fn frame(&mut self, fr: &Frame) -> String {
        match fr {
            Frame::Seq { body, motive, .. } => {
                let mot = match motive {
                    Some(mo) => self.motive(mo, 1, &|p: &mut Self, t: &CType| p.ctype(t)),
                    None => String::new(),
                };
                let xs = self.fresh(1);
                let b = self.with(&xs, |p| p.comp(body));
                format!("[] to{mot} {}. {b}", xs[0])
            }
            Frame::Proj(i) => format!("{} ' []", i + 1),
            Frame::Arg(v) => format!("{} ' []", self.value_atom(v)),
        }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn value_is_atom(v: &Value) -> bool {
    matches!(v, Value::Var(_) | Value::Unit | Value::Inj(..) | Value::Pair(..))
}

fn value_is_closed(v: &Value) -> bool {
    match v {
        Value::Var(_) | Value::Unit | Value::Inj(..) | Value::Pair(..) => true,
        Value::Refl(w) => value_is_closed(w),
        Value::Thunk(_) | Value::Let(..) | Value::Match(_) => false,
    }
}

fn comp_is_closed(m: &Comp) -> bool {
    match m {
        Comp::Return(v) | Comp::Force(v) => value_is_closed(v),
        Comp::Diverge | Comp::Error(_) | Comp::Choose(_) | Comp::Read(_) | Comp::LambdaProd(_) => true,
        Comp::Apply(_, m) | Comp::Proj(_, m) => comp_is_closed(m),
        _ => false,
    }
}

pub fn print_vtype(a: &VType, depth: usize) -> String {
    Printer::at_depth(depth).vtype(a)
}

pub fn print_ctype(b: &CType, depth: usize) -> String {
    Printer::at_depth(depth).ctype(b)
}

pub fn print_value(v: &Value, depth: usize) -> String {
    Printer::at_depth(depth).value(v)
}

pub fn print_comp(m: &Comp, depth: usize) -> String {
    Printer::at_depth(depth).comp(m)
}

pub fn print_frame(f: &Frame, depth: usize) -> String {
    Printer::at_depth(depth).frame(f)
}

/// `effects { .. }` header for a signature.
pub fn print_signature(sig: &EffectSignature) -> String {
    let monoid = match &sig.monoid {
        Monoid::FreeText => "free".to_string(),
        Monoid::FiniteTable(m) => {
            let elems: Vec<String> = m
                .elements()
                .iter()
                .enumerate()
                .map(|(i, e)| if i == m.unit() { format!("{e}*") } else { e.clone() })
                .collect();
            let rows: Vec<String> = m
                .table()
                .iter()
                .map(|r| r.iter().map(|&k| m.elements()[k].clone()).collect::<Vec<_>>().join(" "))
                .collect();
            format!("{{{}}} [{}]", elems.join(", "), rows.join("; "))
        }
    };
    let states: Vec<String> = sig
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| if i == sig.initial_index() { format!("{s}*") } else { s.clone() })
        .collect();
    let mut fields = vec![
        format!("monoid {monoid}"),
        format!("states {{{}}}", states.join(", ")),
        format!("errors {{{}}}", sig.errors().join(", ")),
    ];
    if !sig.enabled.is_empty() {
        let names: Vec<&str> = sig.enabled.iter().map(|e| e.name()).collect();
        fields.push(format!("enable {}", names.join(", ")));
    }
    format!("effects {{ {} }}", fields.join("; "))
}

/// Prints a program file containing a signature and a main computation.
pub fn print_program(sig: &EffectSignature, ty: &CType, main: &Comp) -> String {
    format!(
        "{}\n\nmain : {} =\n  {};\n",
        print_signature(sig),
        print_ctype(ty, 0),
        print_comp(main, 0)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        assert_eq!(parse_comp("return ()").unwrap(), Comp::Return(Value::Unit));
        assert_eq!(
            parse_comp("force (thunk (return ()))").unwrap(),
            Comp::Force(Value::tr(Value::Unit))
        );
        assert_eq!(
            parse_comp("return () to x. return x").unwrap(),
            Comp::seq(Comp::Return(Value::Unit), Comp::Return(Value::Var(0)))
        );
    }

    #[test]
    fn print_examples() {
        assert_eq!(Comp::Return(Value::Unit).to_string(), "return ()");
        assert_eq!(Comp::Force(Value::tr(Value::Unit)).to_string(), "force thunk return ()");
        assert_eq!(Value::inj(1, Value::Unit).to_string(), "(2, ())");
    }

    #[test]
    fn shadowing_innermost_wins() {
        let m = parse_comp("lam x : Unit. lam x : Bool. return x").unwrap();
        assert_eq!(
            m,
            Comp::lam(VType::Unit, Comp::lam(VType::bool(), Comp::Return(Value::Var(0))))
        );
    }

    #[test]
    fn application_and_projection() {
        let m = parse_comp("lam f : U Pi y : Unit. F Unit. () ' force f").unwrap();
        let expected = Comp::lam(
            VType::u(CType::pi(VType::Unit, CType::f(VType::Unit))),
            Comp::apply(Value::Unit, Comp::Force(Value::Var(0))),
        );
        assert_eq!(m, expected);
        let m = parse_comp("2 ' lam { return () | return (1, ()) }").unwrap();
        assert!(matches!(m, Comp::Proj(1, _)));
    }

    #[test]
    fn motives_and_patterns() {
        let src = "lam b : Bool. pm b as[z. F Id(Bool, z, z)] { (1, x). return refl (1, x) | (2, y). return refl (2, y) }";
        let m = parse_comp(src).unwrap();
        let again = parse_comp(&m.to_string()).unwrap();
        assert_eq!(m, again);
        let src = "lam p : Id(Unit, (), ()). pm p as[x y q. F Id(Unit, x, y)] refl w. return refl w";
        let m = parse_comp(src).unwrap();
        assert_eq!(parse_comp(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn errors_have_spans() {
        let e = parse_comp("return\n  y").unwrap_err();
        assert_eq!(e.span.line, 2);
        assert_eq!(e.span.col, 3);
        assert!(e.message.contains("unbound"));
    }

    #[test]
    fn program_file() {
        let src = r#"
--! variant plus
effects { monoid free; states {s0*, s1}; errors {e}; enable print, state, error }
type B2 = Sum(Unit, Unit);
val t : B2 = (2, ());
main : F B2 = write s1 (read { s0. return (1, ()) | s1. return t });
"#;
        let p = parse(src).unwrap();
        assert_eq!(p.pragma("variant"), Some("plus"));
        assert_eq!(p.signature.states().len(), 2);
        assert!(p.signature.is_enabled(Effect::State));
        let main = p.main.unwrap();
        assert_eq!(main.ty, CType::f(VType::bool()));
        assert!(matches!(main.body, Comp::Write(..)));
    }

    #[test]
    fn read_without_state_is_parse_error() {
        let src = "effects { enable print }\nmain : F Unit = read { s0. return () };";
        assert!(parse(src).is_err());
    }

    #[test]
    fn finite_monoid_header() {
        let src = "effects { monoid {0*, 1} [0 1; 1 0]; enable print }\nmain : F Unit = print 1 return ();";
        let p = parse(src).unwrap();
        let printed = print_signature(&p.signature);
        let again = parse(&format!("{printed}\nmain : F Unit = return ();")).unwrap();
        assert_eq!(again.signature, p.signature);
    }

    #[test]
    fn laws_parse() {
        let src = "law beta (x : Unit) : F Unit = return x to y. return y == return x;";
        let p = parse(src).unwrap();
        assert_eq!(p.laws.len(), 1);
        assert!(matches!(p.laws[0].sides, LawSides::Comp { .. }));
    }

    #[test]
    fn closedness_parenthesization() {
        let m = Comp::seq(
            Comp::Return(Value::tr(Value::Unit)),
            Comp::Force(Value::Var(0)),
        );
        assert_eq!(parse_comp(&m.to_string()).unwrap(), m);
        let m = Comp::apply(
            Value::tr(Value::Unit),
            Comp::seq(Comp::Return(Value::Unit), Comp::Return(Value::Var(0))),
        );
        assert_eq!(parse_comp(&m.to_string()).unwrap(), m);
    }
}
