//! Well-typed closed terms built from a sequence of choices, so proptest can
//! shrink the choice bytes. Exhausted choices read as 0, which always picks
//! the smallest option.

use dcbpv::surface::{ascribe, ascribe_value};
use dcbpv::syntax::{CType, Comp, Match, Pattern, VType, Value};

pub const ERRORS: [&str; 2] = ["e1", "e2"];

pub struct Gen<'a> {
    bytes: &'a [u8],
    pos: usize,
    /// Whether `error` may be generated.
    pub errors: bool,
}

fn bool_ty() -> VType {
    VType::Sum(vec![VType::Unit, VType::Unit])
}

impl<'a> Gen<'a> {
    pub fn new(bytes: &'a [u8], errors: bool) -> Self {
        Gen { bytes, pos: 0, errors }
    }

    fn pick(&mut self, n: usize) -> usize {
        let b = self.bytes.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b as usize % n
    }

    /// A closed value type. All generated types are closed, so weakening
    /// leaves them unchanged.
    pub fn vtype(&mut self, depth: usize) -> VType {
        let n = if depth == 0 { 3 } else { 6 };
        match self.pick(n) {
            0 => VType::Unit,
            1 => bool_ty(),
            2 => VType::Sum(vec![VType::Unit; 3]),
            3 => VType::Sigma(Box::new(self.vtype(depth - 1)), Box::new(self.vtype(depth - 1))),
            4 => VType::Sum(vec![self.vtype(depth - 1), self.vtype(depth - 1)]),
            _ => VType::U(Box::new(self.ctype(depth - 1))),
        }
    }

    pub fn ctype(&mut self, depth: usize) -> CType {
        let n = if depth == 0 { 1 } else { 3 };
        match self.pick(n) {
            0 => CType::F(Box::new(self.vtype(depth))),
            1 => CType::Prod(vec![self.ctype(depth - 1), self.ctype(depth - 1)]),
            _ => CType::Pi(Box::new(self.vtype(depth - 1)), Box::new(self.ctype(depth - 1))),
        }
    }

    /// Variables of type `ty`, innermost first.
    fn vars_of(ctx: &[VType], ty: &VType) -> Vec<usize> {
        ctx.iter().rev().enumerate().filter(|(_, a)| *a == ty).map(|(i, _)| i).collect()
    }

    /// Innermost variable whose type is a sum, unit or pair.
    fn matchable(&mut self, ctx: &[VType]) -> Option<(usize, VType)> {
        let cands: Vec<(usize, VType)> = ctx
            .iter()
            .rev()
            .enumerate()
            .filter(|(_, a)| matches!(a, VType::Sum(_) | VType::Unit | VType::Sigma(..)))
            .map(|(i, a)| (i, a.clone()))
            .collect();
        if cands.is_empty() {
            return None;
        }
        let k = self.pick(cands.len());
        Some(cands[k].clone())
    }

    fn extend(ctx: &[VType], a: &VType) -> Vec<VType> {
        let mut c = ctx.to_vec();
        c.push(a.clone());
        c
    }

    /// Arms of a weak match on a variable of type `scrut`, each built by `arm`
    /// in the extended context.
    fn pattern<R>(
        &mut self,
        ctx: &[VType],
        scrut: &VType,
        mut arm: impl FnMut(&mut Self, &[VType]) -> R,
    ) -> Pattern<R> {
        match scrut {
            VType::Unit => Pattern::Unit(arm(self, ctx)),
            VType::Sum(arms) => {
                Pattern::Sum(arms.iter().map(|a| arm(self, &Self::extend(ctx, a))).collect())
            }
            VType::Sigma(a, b) => {
                let c = Self::extend(&Self::extend(ctx, a), b);
                Pattern::Pair(arm(self, &c))
            }
            _ => unreachable!("only sums, unit and pairs are matched"),
        }
    }

    pub fn value(&mut self, ctx: &[VType], ty: &VType, depth: usize) -> Value {
        let vars = Self::vars_of(ctx, ty);
        let n = if depth == 0 { 2 } else { 5 };
        match self.pick(n) {
            1 if !vars.is_empty() => {
                let k = self.pick(vars.len());
                Value::Var(vars[k])
            }
            2 if depth > 0 => {
                // let x = (V : A) in W
                let a = self.vtype(1);
                let v = self.value(ctx, &a, depth - 1);
                let w = self.value(&Self::extend(ctx, &a), ty, depth - 1);
                Value::Let(Box::new(ascribe_value(v, a)), Box::new(w))
            }
            3 if depth > 0 => match self.matchable(ctx) {
                Some((i, scrut)) => {
                    let pattern = self.pattern(ctx, &scrut, |g, c| g.value(c, ty, depth - 1));
                    Value::Match(Box::new(Match { scrutinee: Value::Var(i), motive: None, pattern }))
                }
                None => self.intro(ctx, ty, depth),
            },
            4 if depth > 0 => ascribe_value(self.intro(ctx, ty, depth - 1), ty.clone()),
            _ => self.intro(ctx, ty, depth),
        }
    }

    fn intro(&mut self, ctx: &[VType], ty: &VType, depth: usize) -> Value {
        let d = depth.saturating_sub(1);
        match ty {
            VType::Unit => Value::Unit,
            VType::Sum(arms) => {
                let i = self.pick(arms.len());
                Value::inj(i, self.value(ctx, &arms[i], d))
            }
            VType::Sigma(a, b) => Value::pair(self.value(ctx, a, d), self.value(ctx, b, d)),
            VType::U(b) => Value::thunk(self.comp(ctx, b, d)),
            VType::Id(_, v, _) => Value::refl((**v).clone()),
        }
    }

    pub fn comp(&mut self, ctx: &[VType], ty: &CType, depth: usize) -> Comp {
        let d = depth.saturating_sub(1);
        let thunk_vars = Self::vars_of(ctx, &VType::U(Box::new(ty.clone())));
        let n = if depth == 0 { 2 } else { 10 };
        match self.pick(n) {
            1 if !thunk_vars.is_empty() => {
                let k = self.pick(thunk_vars.len());
                Comp::Force(Value::Var(thunk_vars[k]))
            }
            1 if self.errors => Comp::Error(ERRORS[self.pick(2)].to_string()),
            2 => {
                // (M : F A) to x. N
                let a = self.vtype(1);
                let fa = CType::F(Box::new(a.clone()));
                let head = ascribe(self.comp(ctx, &fa, d), fa);
                let body = self.comp(&Self::extend(ctx, &a), ty, d);
                Comp::seq(head, body)
            }
            3 => {
                // force (thunk M : U B)
                let u = VType::U(Box::new(ty.clone()));
                Comp::Force(ascribe_value(Value::thunk(self.comp(ctx, ty, d)), u))
            }
            4 => {
                // V ' (lam x : A. M : Pi x : A. B)
                let a = self.vtype(1);
                let pi = CType::Pi(Box::new(a.clone()), Box::new(ty.clone()));
                let body = self.comp(&Self::extend(ctx, &a), ty, d);
                let f = ascribe(Comp::lam(a.clone(), body), pi);
                Comp::apply(self.value(ctx, &a, d), f)
            }
            5 => {
                // i ' (lam { .. } : Prod(..))
                let other = self.ctype(0);
                let i = self.pick(2);
                let mut arms = vec![other.clone(), other];
                arms[i] = ty.clone();
                let ms: Vec<Comp> = arms.iter().map(|b| self.comp(ctx, b, d)).collect();
                Comp::proj(i, ascribe(Comp::LambdaProd(ms), CType::Prod(arms)))
            }
            6 => {
                let a = self.vtype(1);
                let v = ascribe_value(self.value(ctx, &a, d), a.clone());
                Comp::Let(Box::new(v), Box::new(self.comp(&Self::extend(ctx, &a), ty, d)))
            }
            7 => match self.matchable(ctx) {
                Some((i, scrut)) => {
                    let pattern = self.pattern(ctx, &scrut, |g, c| g.comp(c, ty, d));
                    Comp::Match(Box::new(Match { scrutinee: Value::Var(i), motive: None, pattern }))
                }
                None => self.intro_comp(ctx, ty, depth),
            },
            _ => self.intro_comp(ctx, ty, depth),
        }
    }

    fn intro_comp(&mut self, ctx: &[VType], ty: &CType, depth: usize) -> Comp {
        let d = depth.saturating_sub(1);
        match ty {
            CType::F(a) => Comp::Return(self.value(ctx, a, d)),
            CType::Prod(bs) => Comp::LambdaProd(bs.iter().map(|b| self.comp(ctx, b, d)).collect()),
            CType::Pi(a, b) => Comp::lam((**a).clone(), self.comp(&Self::extend(ctx, a), b, d)),
        }
    }
}

/// A closed computation of a returner type, from `bytes`.
pub fn closed_returner(bytes: &[u8], errors: bool) -> (CType, Comp) {
    let mut g = Gen::new(bytes, errors);
    let a = g.vtype(2);
    let ty = CType::F(Box::new(a));
    let m = g.comp(&[], &ty, 4);
    (ty, m)
}

/// A closed computation of any computation type.
pub fn closed_comp(bytes: &[u8], errors: bool) -> (CType, Comp) {
    let mut g = Gen::new(bytes, errors);
    let ty = g.ctype(2);
    let m = g.comp(&[], &ty, 4);
    (ty, m)
}

/// A computation in a context of `n` generated variables.
pub fn open_comp(bytes: &[u8]) -> (Vec<VType>, CType, Comp) {
    let mut g = Gen::new(bytes, true);
    let n = g.pick(3);
    let ctx: Vec<VType> = (0..n).map(|_| g.vtype(1)).collect();
    let ty = g.ctype(1);
    let m = g.comp(&ctx, &ty, 3);
    (ctx, ty, m)
}
