//! CK-machine over complex-value-free computations, with printing and state
//! hardware and pluggable schedulers for erratic choice.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{BufRead, Write};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::surface::{print_comp, print_frame, print_value};
use crate::syntax::*;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub comp: Comp,
    pub stack: Stack,
    pub printed: MonoidElem,
    pub state: String,
}

impl Configuration {
    pub fn render(&self, sig: &EffectSignature) -> String {
        format!(
            "⟨{}, {}, {}, {}⟩",
            print_comp(&self.comp, 0),
            render_stack(&self.stack),
            sig.render_monoid(&self.printed),
            self.state
        )
    }
}

pub fn render_stack(k: &Stack) -> String {
    let mut parts: Vec<String> = k.iter_top_down().map(|f| print_frame(f, 0)).collect();
    parts.push("nil".into());
    parts.join(" :: ")
}

/// Transition rows of the machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    Let,
    ToPush,
    ReturnPop,
    ForceThunk,
    PmSum,
    PmUnit,
    PmPair,
    PmId,
    ProjPush,
    ProdPop,
    AppPush,
    LamPop,
    Diverge,
    Mu,
    Choose,
    Print,
    Write,
    Read,
}

impl Rule {
    pub const ALL: [Rule; 18] = [
        Rule::Let,
        Rule::ToPush,
        Rule::ReturnPop,
        Rule::ForceThunk,
        Rule::PmSum,
        Rule::PmUnit,
        Rule::PmPair,
        Rule::PmId,
        Rule::ProjPush,
        Rule::ProdPop,
        Rule::AppPush,
        Rule::LamPop,
        Rule::Diverge,
        Rule::Mu,
        Rule::Choose,
        Rule::Print,
        Rule::Write,
        Rule::Read,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Let => "LET",
            Rule::ToPush => "TO-PUSH",
            Rule::ReturnPop => "RETURN-POP",
            Rule::ForceThunk => "FORCE-THUNK",
            Rule::PmSum => "PM-SUM",
            Rule::PmUnit => "PM-UNIT",
            Rule::PmPair => "PM-PAIR",
            Rule::PmId => "PM-ID",
            Rule::ProjPush => "PROJ-PUSH",
            Rule::ProdPop => "PROD-POP",
            Rule::AppPush => "APP-PUSH",
            Rule::LamPop => "LAM-POP",
            Rule::Diverge => "DIVERGE",
            Rule::Mu => "MU",
            Rule::Choose => "CHOOSE",
            Rule::Print => "PRINT",
            Rule::Write => "WRITE",
            Rule::Read => "READ",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TerminalKind {
    Returned(Value),
    ProdLambda,
    PiLambda,
    StuckOnVar,
    ErrorHalt(String),
}

impl TerminalKind {
    pub fn label(&self) -> &'static str {
        match self {
            TerminalKind::Returned(_) => "Returned",
            TerminalKind::ProdLambda => "ProdLambda",
            TerminalKind::PiLambda => "PiLambda",
            TerminalKind::StuckOnVar => "StuckOnVar",
            TerminalKind::ErrorHalt(_) => "ErrorHalt",
        }
    }

    pub fn detail(&self) -> Option<String> {
        match self {
            TerminalKind::Returned(v) => Some(print_value(v, 0)),
            TerminalKind::ErrorHalt(e) => Some(e.clone()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Stepped(Rule, Configuration),
    Terminal(TerminalKind),
    NeedsChoice(Vec<Configuration>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("the computation contains a complex value in computation position")]
    ComplexValuePresent,
    #[error("no transition applies to a non-terminal configuration: {0}")]
    IllTyped(String),
    #[error("the choice script has {len} entries but choice point {needed} was reached")]
    ScriptExhausted { len: usize, needed: usize },
    #[error("choice {index} is out of range for {branches} branches")]
    BadChoice { index: usize, branches: usize },
    #[error("interactive input failed: {0}")]
    Input(String),
    #[error("exploration visited more than {0} configurations")]
    ExplorationLimit(usize),
}

/// The start configuration `M, nil, ε, s0`.
pub fn inject(m: &Comp, sig: &EffectSignature) -> Result<Configuration, MachineError> {
    if !m.is_complex_free() {
        return Err(MachineError::ComplexValuePresent);
    }
    Ok(Configuration {
        comp: m.clone(),
        stack: Stack::nil(),
        printed: sig.monoid_unit(),
        state: sig.initial_state().to_string(),
    })
}

fn ill(cfg: &Configuration, why: &str) -> MachineError {
    MachineError::IllTyped(format!("{why}: {}", print_comp(&cfg.comp, 0)))
}

/// Terminal configurations, decided independently of the transition rows.
pub fn terminal_kind(cfg: &Configuration) -> Option<TerminalKind> {
    let nil = cfg.stack.is_nil();
    match &cfg.comp {
        Comp::Return(v) if nil => Some(TerminalKind::Returned(v.clone())),
        Comp::LambdaProd(_) if nil => Some(TerminalKind::ProdLambda),
        Comp::LambdaPi(..) if nil => Some(TerminalKind::PiLambda),
        Comp::Force(Value::Var(_)) => Some(TerminalKind::StuckOnVar),
        Comp::Match(mm) if matches!(mm.scrutinee, Value::Var(_)) => Some(TerminalKind::StuckOnVar),
        Comp::Error(e) => Some(TerminalKind::ErrorHalt(e.clone())),
        _ => None,
    }
}

/// Every transition row whose left-hand side matches, tested one row at a
/// time.
pub fn matching_rows(cfg: &Configuration) -> Vec<Rule> {
    let top = cfg.stack.top();
    Rule::ALL
        .into_iter()
        .filter(|r| match r {
            Rule::Let => matches!(cfg.comp, Comp::Let(..)),
            Rule::ToPush => matches!(cfg.comp, Comp::SeqTo { .. }),
            Rule::ReturnPop => {
                matches!(cfg.comp, Comp::Return(_)) && matches!(top, Some(Frame::Seq { .. }))
            }
            Rule::ForceThunk => matches!(cfg.comp, Comp::Force(Value::Thunk(_))),
            Rule::PmSum => matches!(&cfg.comp, Comp::Match(mm)
                if matches!(mm.pattern, Pattern::Sum(_)) && matches!(mm.scrutinee, Value::Inj(..))),
            Rule::PmUnit => matches!(&cfg.comp, Comp::Match(mm)
                if matches!(mm.pattern, Pattern::Unit(_)) && matches!(mm.scrutinee, Value::Unit)),
            Rule::PmPair => matches!(&cfg.comp, Comp::Match(mm)
                if matches!(mm.pattern, Pattern::Pair(_)) && matches!(mm.scrutinee, Value::Pair(..))),
            Rule::PmId => matches!(&cfg.comp, Comp::Match(mm)
                if matches!(mm.pattern, Pattern::Id(_)) && matches!(mm.scrutinee, Value::Refl(_))),
            Rule::ProjPush => matches!(cfg.comp, Comp::Proj(..)),
            Rule::ProdPop => {
                matches!(cfg.comp, Comp::LambdaProd(_)) && matches!(top, Some(Frame::Proj(_)))
            }
            Rule::AppPush => matches!(cfg.comp, Comp::Apply(..)),
            Rule::LamPop => matches!(cfg.comp, Comp::LambdaPi(..)) && matches!(top, Some(Frame::Arg(_))),
            Rule::Diverge => matches!(cfg.comp, Comp::Diverge),
            Rule::Mu => matches!(cfg.comp, Comp::Mu(_)),
            Rule::Choose => matches!(cfg.comp, Comp::Choose(_)),
            Rule::Print => matches!(cfg.comp, Comp::Print(..)),
            Rule::Write => matches!(cfg.comp, Comp::Write(..)),
            Rule::Read => matches!(cfg.comp, Comp::Read(_)),
        })
        .collect()
}

fn with_comp(cfg: &Configuration, comp: Comp) -> Configuration {
    Configuration { comp, ..cfg.clone() }
}

/// One transition.
pub fn step(cfg: &Configuration, sig: &EffectSignature) -> Result<StepResult, MachineError> {
    if let Some(t) = terminal_kind(cfg) {
        return Ok(StepResult::Terminal(t));
    }
    let stepped = |rule, c| Ok(StepResult::Stepped(rule, c));
    match &cfg.comp {
        Comp::Let(v, body) => stepped(Rule::Let, with_comp(cfg, body.subst(v))),
        Comp::SeqTo { head, body, motive } => {
            let mut next = with_comp(cfg, (**head).clone());
            next.stack.push(Frame::Seq {
                body: (**body).clone(),
                motive: motive.as_deref().cloned(),
                head: Some((**head).clone()),
            });
            stepped(Rule::ToPush, next)
        }
        Comp::Return(v) => match cfg.stack.top() {
            Some(Frame::Seq { body, .. }) => {
                let mut next = with_comp(cfg, body.subst(v));
                next.stack.pop();
                stepped(Rule::ReturnPop, next)
            }
            _ => Err(ill(cfg, "return under a non-sequencing frame")),
        },
        Comp::Force(Value::Thunk(m)) => stepped(Rule::ForceThunk, with_comp(cfg, (**m).clone())),
        Comp::Force(_) => Err(ill(cfg, "force of a non-thunk")),
        Comp::Match(mm) => {
            let rule = match &mm.pattern {
                Pattern::Sum(_) => Rule::PmSum,
                Pattern::Unit(_) => Rule::PmUnit,
                Pattern::Pair(_) => Rule::PmPair,
                Pattern::Id(_) => Rule::PmId,
            };
            match crate::equality::match_redex(&mm.scrutinee, &mm.pattern) {
                Some(r) => stepped(rule, with_comp(cfg, r)),
                None => Err(ill(cfg, "pattern match on a value of the wrong shape")),
            }
        }
        Comp::Proj(i, m) => {
            let mut next = with_comp(cfg, (**m).clone());
            next.stack.push(Frame::Proj(*i));
            stepped(Rule::ProjPush, next)
        }
        Comp::LambdaProd(ms) => match cfg.stack.top() {
            Some(Frame::Proj(i)) if *i < ms.len() => {
                let mut next = with_comp(cfg, ms[*i].clone());
                next.stack.pop();
                stepped(Rule::ProdPop, next)
            }
            _ => Err(ill(cfg, "λ over a product without a matching projection")),
        },
        Comp::Apply(v, m) => {
            let mut next = with_comp(cfg, (**m).clone());
            next.stack.push(Frame::Arg((**v).clone()));
            stepped(Rule::AppPush, next)
        }
        Comp::LambdaPi(_, body) => match cfg.stack.top() {
            Some(Frame::Arg(v)) => {
                let mut next = with_comp(cfg, body.subst(v));
                next.stack.pop();
                stepped(Rule::LamPop, next)
            }
            _ => Err(ill(cfg, "λ without an argument")),
        },
        Comp::Diverge => stepped(Rule::Diverge, cfg.clone()),
        Comp::Mu(body) => {
            let unfolded = body.subst(&Value::thunk(cfg.comp.clone()));
            stepped(Rule::Mu, with_comp(cfg, unfolded))
        }
        Comp::Choose(ms) => {
            if ms.is_empty() {
                return Err(ill(cfg, "choose with no branches"));
            }
            Ok(StepResult::NeedsChoice(ms.iter().map(|m| with_comp(cfg, m.clone())).collect()))
        }
        Comp::Print(tok, m) => {
            let el = sig
                .monoid_element(tok)
                .ok_or_else(|| ill(cfg, "print of an element outside the monoid"))?;
            let mut next = with_comp(cfg, (**m).clone());
            next.printed = sig.monoid_mul(&cfg.printed, &el);
            stepped(Rule::Print, next)
        }
        Comp::Write(s, m) => {
            let mut next = with_comp(cfg, (**m).clone());
            next.state = s.clone();
            stepped(Rule::Write, next)
        }
        Comp::Read(arms) => match arms.iter().find(|a| a.state == cfg.state) {
            Some(a) => stepped(Rule::Read, with_comp(cfg, a.body.clone())),
            None => Err(ill(cfg, "read with no arm for the current state")),
        },
        Comp::Error(_) => unreachable!("error configurations are terminal"),
    }
}

// ---------------------------------------------------------------------------
// Schedulers and runs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scheduler {
    First,
    /// 1-based branch indices, consumed in order.
    Fixed(Vec<usize>),
    Seeded(u64),
    Interactive,
    All,
}

impl Scheduler {
    /// `first`, `fixed:1,2`, `seeded:7`, `interactive` or `all`.
    pub fn parse(s: &str) -> Option<Scheduler> {
        match s {
            "first" => Some(Scheduler::First),
            "interactive" => Some(Scheduler::Interactive),
            "all" => Some(Scheduler::All),
            _ => {
                if let Some(rest) = s.strip_prefix("fixed:") {
                    let idx: Result<Vec<usize>, _> =
                        rest.split(',').filter(|p| !p.is_empty()).map(|p| p.trim().parse()).collect();
                    return idx.ok().map(Scheduler::Fixed);
                }
                s.strip_prefix("seeded:").and_then(|n| n.parse().ok()).map(Scheduler::Seeded)
            }
        }
    }
}

/// Resolves choice points; returns a 0-based branch index.
pub trait Chooser {
    fn choose(&mut self, point: usize, branches: usize) -> Result<usize, MachineError>;
}

pub struct FirstChooser;

impl Chooser for FirstChooser {
    fn choose(&mut self, _: usize, _: usize) -> Result<usize, MachineError> {
        Ok(0)
    }
}

pub struct ScriptChooser {
    script: Vec<usize>,
}

impl ScriptChooser {
    pub fn new(script: Vec<usize>) -> Self {
        ScriptChooser { script }
    }
}

impl Chooser for ScriptChooser {
    fn choose(&mut self, point: usize, branches: usize) -> Result<usize, MachineError> {
        let Some(&k) = self.script.get(point - 1) else {
            return Err(MachineError::ScriptExhausted { len: self.script.len(), needed: point });
        };
        if k == 0 || k > branches {
            return Err(MachineError::BadChoice { index: k, branches });
        }
        Ok(k - 1)
    }
}

pub struct SeededChooser {
    rng: StdRng,
}

impl SeededChooser {
    pub fn new(seed: u64) -> Self {
        SeededChooser { rng: StdRng::seed_from_u64(seed) }
    }
}

impl Chooser for SeededChooser {
    fn choose(&mut self, _: usize, branches: usize) -> Result<usize, MachineError> {
        Ok(self.rng.gen_range(0..branches))
    }
}

/// Asks on `output` with "choice k of n? " and reads a 1-based answer.
pub struct InteractiveChooser<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> InteractiveChooser<R, W> {
    pub fn new(input: R, output: W) -> Self {
        InteractiveChooser { input, output }
    }
}

impl<R: BufRead, W: Write> Chooser for InteractiveChooser<R, W> {
    fn choose(&mut self, point: usize, branches: usize) -> Result<usize, MachineError> {
        loop {
            write!(self.output, "choice {point} of {branches}? ")
                .and_then(|_| self.output.flush())
                .map_err(|e| MachineError::Input(e.to_string()))?;
            let mut line = String::new();
            let n = self.input.read_line(&mut line).map_err(|e| MachineError::Input(e.to_string()))?;
            if n == 0 {
                return Err(MachineError::Input("end of input".into()));
            }
            match line.trim().parse::<usize>() {
                Ok(k) if (1..=branches).contains(&k) => return Ok(k - 1),
                _ => {
                    let _ = writeln!(self.output, "expected a number between 1 and {branches}");
                }
            }
        }
    }
}

/// Result of running a program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Outcome {
    Terminal {
        kind: TerminalKind,
        printed: MonoidElem,
        state: String,
        steps: usize,
    },
    FuelExhausted {
        last: Configuration,
        steps: usize,
    },
}

impl Outcome {
    pub fn steps(&self) -> usize {
        match self {
            Outcome::Terminal { steps, .. } | Outcome::FuelExhausted { steps, .. } => *steps,
        }
    }

    /// One-line rendering, e.g. `Returned (2, ()) | printed ε | state s1 | 4 steps`.
    pub fn render(&self, sig: &EffectSignature) -> String {
        match self {
            Outcome::Terminal { kind, printed, state, steps } => {
                let head = match kind.detail() {
                    Some(d) => format!("{} {}", kind.label(), compact(&d)),
                    None => kind.label().to_string(),
                };
                format!(
                    "{head} | printed {} | state {state} | {steps} steps",
                    sig.render_monoid(printed)
                )
            }
            Outcome::FuelExhausted { last, steps } => format!(
                "FuelExhausted | printed {} | state {} | {steps} steps",
                sig.render_monoid(&last.printed),
                last.state
            ),
        }
    }

    /// Key used to deduplicate outcomes: everything but the step count.
    fn key(&self) -> Outcome {
        match self {
            Outcome::Terminal { kind, printed, state, .. } => Outcome::Terminal {
                kind: kind.clone(),
                printed: printed.clone(),
                state: state.clone(),
                steps: 0,
            },
            Outcome::FuelExhausted { last, .. } => Outcome::FuelExhausted { last: last.clone(), steps: 0 },
        }
    }
}

/// Values printed without spaces after commas: `(2,())`.
pub fn compact(s: &str) -> String {
    let mut out = String::new();
    let mut in_str = false;
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '"' {
            in_str = !in_str;
        }
        out.push(c);
        if c == ',' && !in_str && chars.peek() == Some(&' ') {
            chars.next();
        }
    }
    out
}

/// One entry of a trace: the rule applied and the resulting configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub config: Configuration,
}

/// Runs from a configuration, calling `on_step` after every transition.
pub fn run_from(
    mut cfg: Configuration,
    sig: &EffectSignature,
    chooser: &mut dyn Chooser,
    fuel: usize,
    on_step: &mut dyn FnMut(usize, Rule, &Configuration),
) -> Result<Outcome, MachineError> {
    let mut steps = 0;
    let mut points = 0;
    loop {
        if let Some(kind) = terminal_kind(&cfg) {
            return Ok(Outcome::Terminal { kind, printed: cfg.printed, state: cfg.state, steps });
        }
        if steps >= fuel {
            return Ok(Outcome::FuelExhausted { last: cfg, steps });
        }
        let (rule, next) = match step(&cfg, sig)? {
            StepResult::Stepped(rule, next) => (rule, next),
            StepResult::NeedsChoice(mut branches) => {
                points += 1;
                let k = chooser.choose(points, branches.len())?;
                if k >= branches.len() {
                    return Err(MachineError::BadChoice { index: k + 1, branches: branches.len() });
                }
                (Rule::Choose, branches.swap_remove(k))
            }
            StepResult::Terminal(_) => unreachable!("terminal configurations are handled above"),
        };
        steps += 1;
        on_step(steps, rule, &next);
        cfg = next;
    }
}

fn chooser_for(sched: &Scheduler) -> Box<dyn Chooser> {
    match sched {
        Scheduler::First | Scheduler::All => Box::new(FirstChooser),
        Scheduler::Fixed(s) => Box::new(ScriptChooser::new(s.clone())),
        Scheduler::Seeded(n) => Box::new(SeededChooser::new(*n)),
        Scheduler::Interactive => Box::new(InteractiveChooser::new(
            std::io::BufReader::new(std::io::stdin()),
            std::io::stderr(),
        )),
    }
}

/// Runs a program with a scheduler. `Scheduler::All` behaves as `First`
/// here; use [`run_all`] for exhaustive exploration.
pub fn run(m: &Comp, sig: &EffectSignature, sched: &Scheduler, fuel: usize) -> Result<Outcome, MachineError> {
    let cfg = inject(m, sig)?;
    run_from(cfg, sig, chooser_for(sched).as_mut(), fuel, &mut |_, _, _| {})
}

pub fn run_with(
    m: &Comp,
    sig: &EffectSignature,
    chooser: &mut dyn Chooser,
    fuel: usize,
) -> Result<Outcome, MachineError> {
    let cfg = inject(m, sig)?;
    run_from(cfg, sig, chooser, fuel, &mut |_, _, _| {})
}

/// Full step log plus the outcome.
pub fn trace(
    m: &Comp,
    sig: &EffectSignature,
    sched: &Scheduler,
    fuel: usize,
) -> Result<(Vec<TraceStep>, Outcome), MachineError> {
    trace_with(m, sig, chooser_for(sched).as_mut(), fuel)
}

pub fn trace_with(
    m: &Comp,
    sig: &EffectSignature,
    chooser: &mut dyn Chooser,
    fuel: usize,
) -> Result<(Vec<TraceStep>, Outcome), MachineError> {
    let cfg = inject(m, sig)?;
    let mut log = Vec::new();
    let out = run_from(cfg, sig, chooser, fuel, &mut |_, rule, c| {
        log.push(TraceStep { rule, config: c.clone() })
    })?;
    Ok((log, out))
}

pub const EXPLORATION_LIMIT: usize = 200_000;

/// Breadth-first exploration of every choice; outcomes are deduplicated on
/// (terminal, printed, state) and reported in discovery order. A cycle among
/// the reachable configurations is reported as one `FuelExhausted` outcome.
pub fn run_all(m: &Comp, sig: &EffectSignature, fuel: usize) -> Result<Vec<Outcome>, MachineError> {
    let start = inject(m, sig)?;
    let mut nodes = vec![start.clone()];
    let mut ids: HashMap<Configuration, usize> = HashMap::from([(start, 0)]);
    let mut edges: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    let mut keys = HashSet::new();
    let mut out = Vec::new();
    let mut record = |o: Outcome, out: &mut Vec<Outcome>| {
        if keys.insert(o.key()) {
            out.push(o);
        }
    };
    while let Some((id, steps)) = queue.pop_front() {
        let cfg = nodes[id].clone();
        if let Some(kind) = terminal_kind(&cfg) {
            record(Outcome::Terminal { kind, printed: cfg.printed, state: cfg.state, steps }, &mut out);
            continue;
        }
        if steps >= fuel {
            record(Outcome::FuelExhausted { last: cfg, steps }, &mut out);
            continue;
        }
        let nexts = match step(&cfg, sig)? {
            StepResult::Stepped(_, next) => vec![next],
            StepResult::NeedsChoice(branches) => branches,
            StepResult::Terminal(_) => unreachable!(),
        };
        for n in nexts {
            let next_id = match ids.get(&n) {
                Some(&j) => j,
                None => {
                    if nodes.len() >= EXPLORATION_LIMIT {
                        return Err(MachineError::ExplorationLimit(EXPLORATION_LIMIT));
                    }
                    let j = nodes.len();
                    ids.insert(n.clone(), j);
                    nodes.push(n);
                    edges.push(Vec::new());
                    queue.push_back((j, steps + 1));
                    j
                }
            };
            edges[id].push(next_id);
        }
    }
    if let Some(j) = find_cycle(&edges) {
        record(Outcome::FuelExhausted { last: nodes[j].clone(), steps: fuel }, &mut out);
    }
    Ok(out)
}

/// A node on some cycle of a directed graph, by iterative depth-first search.
fn find_cycle(edges: &[Vec<usize>]) -> Option<usize> {
    // 0 = unvisited, 1 = on the current path, 2 = finished.
    let mut color = vec![0u8; edges.len()];
    for root in 0..edges.len() {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some(top) = stack.last_mut() {
            let v = top.0;
            if let Some(&w) = edges[v].get(top.1) {
                top.1 += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return Some(w),
                    _ => {}
                }
            } else {
                color[v] = 2;
                stack.pop();
            }
        }
    }
    None
}
