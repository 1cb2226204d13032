//! Lambda-automata over finite models, their acceptance games, disjunctive
//! automata and the simulation pipeline.

mod fixpoint;
mod game;
mod sim;
mod synth;
mod words;

pub use fixpoint::fixpoint_points;
pub use game::{
    acceptance_game, accepting_points, accepts, dividing_strategy, minimal_markings,
    preimage_cover, strongly_accepts, AcceptanceGame, Acceptor, Marking, PreimageCover,
};
pub use sim::{presimulate, relation_of_var, relation_var, simulate, PresimAutomaton};
pub use synth::{synthesize_model, Synthesis};
pub use words::{bad_trace_nba, determinize_nbt, BadTraceNba, StreamParityAutomaton};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::bases::Dj;
use crate::error::{invalid, resource, Error, Result};
use crate::functors::{full, Caps, Elem, Functor};
use crate::logic::OneStep;
use crate::var::Var;

/// Largest proposition alphabet (colours are bitmasks over it).
pub const MAX_PROPS: usize = 12;

/// A Lambda-automaton `(A, Theta, Omega, a_I)`. States are `0..n`; the
/// transition formulas use the state variables `Var::Index(b)`, and colours
/// are bitmasks over `props`.
#[derive(Clone, PartialEq, Eq)]
pub struct Automaton {
    pub functor: Functor,
    pub props: Vec<Arc<str>>,
    pub names: Vec<String>,
    /// `delta[a][c]`.
    pub delta: Vec<Vec<OneStep>>,
    pub priority: Vec<u32>,
    pub initial: usize,
    /// Basis representation of every transition, when the automaton is
    /// disjunctive by construction.
    pub basis: Option<Vec<Vec<Dj>>>,
}

pub(crate) fn state(b: usize) -> Var {
    Var::Index(b)
}

impl Automaton {
    /// An automaton with all transitions `false` and priority 0.
    pub fn new(functor: Functor, props: &[&str], n: usize) -> Result<Automaton> {
        let mut ps: Vec<Arc<str>> = props.iter().map(|p| Arc::from(*p)).collect();
        ps.sort();
        ps.dedup();
        if ps.len() > MAX_PROPS {
            return Err(resource(format!(
                "{} propositions (at most {MAX_PROPS})",
                ps.len()
            )));
        }
        if n == 0 {
            return Err(invalid("an automaton needs at least one state"));
        }
        let colors = 1usize << ps.len();
        Ok(Automaton {
            functor,
            props: ps,
            names: (0..n).map(|a| format!("q{a}")).collect(),
            delta: vec![vec![OneStep::Bot; colors]; n],
            priority: vec![0; n],
            initial: 0,
            basis: None,
        })
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    pub fn colors(&self) -> usize {
        1 << self.props.len()
    }

    pub fn is_disjunctive(&self) -> bool {
        self.basis.is_some()
    }

    /// Set `Theta(a, c)` for every colour `c`.
    pub fn set_all(&mut self, a: usize, alpha: OneStep) {
        for c in 0..self.colors() {
            self.delta[a][c] = alpha.clone();
        }
        self.basis = None;
    }

    /// Set the transitions of `a` as a function of the colour.
    pub fn set_by_color(&mut self, a: usize, mut f: impl FnMut(&dyn Fn(&str) -> bool) -> OneStep) {
        for c in 0..self.colors() {
            let props = self.props.clone();
            let holds = move |p: &str| {
                props
                    .iter()
                    .position(|q| &**q == p)
                    .is_some_and(|i| c >> i & 1 == 1)
            };
            self.delta[a][c] = f(&holds);
        }
        self.basis = None;
    }

    pub fn prop_index(&self, p: &str) -> Option<usize> {
        self.props.iter().position(|q| &**q == p)
    }

    /// Check the well-formedness invariants.
    pub fn check(&self) -> Result<()> {
        let n = self.len();
        if n == 0 || self.initial >= n || self.priority.len() != n || self.names.len() != n {
            return Err(invalid("automaton state tables disagree in size"));
        }
        for (a, row) in self.delta.iter().enumerate() {
            if row.len() != self.colors() {
                return Err(invalid(format!(
                    "state {a} lacks transitions for some colour"
                )));
            }
            for alpha in row {
                if !alpha.is_positive() {
                    return Err(Error::NotPositive(alpha.to_string()));
                }
                self.functor.check_formula(alpha)?;
                if let Some(v) = alpha
                    .vars()
                    .into_iter()
                    .find(|v| v.as_index().is_none_or(|b| b >= n))
                {
                    return Err(invalid(format!(
                        "transition of state {a} mentions `{v}`, which is not a state"
                    )));
                }
            }
        }
        if let Some(dj) = &self.basis {
            if dj.len() != n || dj.iter().any(|r| r.len() != self.colors()) {
                return Err(invalid("basis table disagrees in size"));
            }
        }
        Ok(())
    }

    /// The colour of `props` in this automaton's alphabet; letters outside
    /// the alphabet are ignored.
    pub fn color_of(&self, holds: impl Fn(&str) -> bool) -> usize {
        self.props
            .iter()
            .enumerate()
            .filter(|(_, p)| holds(p))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Restrict to the states reachable from the initial state.
    pub fn trim(&self) -> Automaton {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            let a = order[i];
            i += 1;
            for alpha in &self.delta[a] {
                for v in alpha.vars() {
                    let b = v.as_index().expect("state variable");
                    if !seen[b] {
                        seen[b] = true;
                        order.push(b);
                    }
                }
            }
        }
        if order.len() == n && order.iter().enumerate().all(|(i, &a)| i == a) {
            return self.clone();
        }
        let mut new_of = vec![usize::MAX; n];
        for (i, &a) in order.iter().enumerate() {
            new_of[a] = i;
        }
        let mut ren = |v: &Var| state(new_of[v.as_index().expect("state variable")]);
        Automaton {
            functor: self.functor.clone(),
            props: self.props.clone(),
            names: order.iter().map(|&a| self.names[a].clone()).collect(),
            delta: order
                .iter()
                .map(|&a| self.delta[a].iter().map(|x| x.rename(&mut ren)).collect())
                .collect(),
            priority: order.iter().map(|&a| self.priority[a]).collect(),
            initial: 0,
            basis: self.basis.as_ref().map(|dj| {
                order
                    .iter()
                    .map(|&a| dj[a].iter().map(|d| d.rename(&mut ren)).collect())
                    .collect()
            }),
        }
    }
}

impl fmt::Debug for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "automaton over {} props {:?} initial {}",
            self.functor, self.props, self.initial
        )?;
        for a in 0..self.len() {
            writeln!(
                f,
                "  {} ({}) {:?}",
                self.names[a], self.priority[a], self.delta[a]
            )?;
        }
        Ok(())
    }
}

/// A pointed `T`-model with a valuation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TModel {
    pub functor: Functor,
    pub coalg: Vec<Elem>,
    /// Proposition letter to the mask of points where it holds.
    pub valuation: BTreeMap<Arc<str>, u64>,
    pub point: usize,
}

impl TModel {
    pub fn new(functor: Functor, coalg: Vec<Elem>, point: usize) -> TModel {
        TModel {
            functor,
            coalg,
            valuation: BTreeMap::new(),
            point,
        }
    }

    pub fn with_prop(mut self, p: &str, points: &[usize]) -> TModel {
        let m = points.iter().fold(0u64, |acc, &s| acc | 1 << s);
        *self.valuation.entry(Arc::from(p)).or_insert(0) |= m;
        self
    }

    pub fn len(&self) -> usize {
        self.coalg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coalg.is_empty()
    }

    pub fn holds(&self, p: &str, s: usize) -> bool {
        self.valuation.get(p).is_some_and(|m| m >> s & 1 == 1)
    }

    pub fn check(&self) -> Result<()> {
        let n = self.len();
        if n == 0 || n > crate::functors::MAX_CARRIER || self.point >= n {
            return Err(invalid(format!(
                "model with {n} points and designated point {}",
                self.point
            )));
        }
        for e in &self.coalg {
            self.functor.validate(e, n)?;
        }
        if let Some((p, _)) = self.valuation.iter().find(|(_, m)| **m & !full(n) != 0) {
            return Err(invalid(format!(
                "valuation of `{p}` mentions points outside the carrier"
            )));
        }
        Ok(())
    }

    /// The same model pointed at `s`.
    pub fn at(&self, s: usize) -> TModel {
        TModel {
            point: s,
            ..self.clone()
        }
    }

    /// Points reachable from the designated point.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![self.point];
        seen[self.point] = true;
        while let Some(s) = stack.pop() {
            for t in crate::functors::bits(self.functor.support(&self.coalg[s])) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }
}

impl fmt::Display for TModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.functor)?;
        for (s, e) in self.coalg.iter().enumerate() {
            let mark = if s == self.point { "*" } else { "" };
            let props: Vec<&str> = self
                .valuation
                .iter()
                .filter(|(_, m)| *m >> s & 1 == 1)
                .map(|(p, _)| &**p)
                .collect();
            write!(f, " {mark}{s}{{{}}}->{e}", props.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for TModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// All unpointed models (point 0) with carrier sizes `1..=max_size` over
/// the given letters, for functors with finite enumeration.
pub fn enumerate_models(
    f: &Functor,
    props: &[Arc<str>],
    max_size: usize,
    caps: &Caps,
) -> Result<Vec<TModel>> {
    let mut out = Vec::new();
    for n in 1..=max_size {
        let elems = f.enumerate(n, caps)?;
        let coalgs = elems.len().checked_pow(n as u32).unwrap_or(usize::MAX);
        let vals = 1usize
            .checked_shl((n * props.len()) as u32)
            .unwrap_or(usize::MAX);
        if coalgs.saturating_mul(vals).saturating_add(out.len()) > caps.max_elements {
            return Err(resource(format!(
                "{coalgs} coalgebras x {vals} valuations on {n} points exceed the cap of {} models",
                caps.max_elements
            )));
        }
        let mut idx = vec![0usize; n];
        loop {
            let coalg: Vec<Elem> = idx.iter().map(|&i| elems[i].clone()).collect();
            for v in 0..vals as u64 {
                let valuation = props
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (p.clone(), (v >> (i * n)) & full(n)))
                    .collect();
                out.push(TModel {
                    functor: f.clone(),
                    coalg: coalg.clone(),
                    valuation,
                    point: 0,
                });
            }
            let mut i = 0;
            while i < n {
                idx[i] += 1;
                if idx[i] == elems.len() {
                    idx[i] = 0;
                    i += 1;
                } else {
                    break;
                }
            }
            if i == n {
                break;
            }
        }
    }
    Ok(out)
}

/// The Boolean dual automaton: every transition dualised, priorities raised
/// by one.
pub fn complement(aut: &Automaton) -> Result<Automaton> {
    let delta = aut
        .delta
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| aut.functor.dual(x).map(|d| d.canonical()))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Automaton {
        delta,
        priority: aut.priority.iter().map(|p| p + 1).collect(),
        basis: None,
        ..aut.clone()
    })
}

/// An automaton accepting the pointed models accepted by both: a fresh
/// initial state conjoining the two initial transitions.
pub fn conjunction(a: &Automaton, b: &Automaton) -> Result<Automaton> {
    if a.functor != b.functor {
        return Err(invalid(format!(
            "cannot conjoin automata over {} and {}",
            a.functor, b.functor
        )));
    }
    let mut props: Vec<Arc<str>> = a.props.iter().chain(&b.props).cloned().collect();
    props.sort();
    props.dedup();
    if props.len() > MAX_PROPS {
        return Err(resource(format!(
            "{} propositions (at most {MAX_PROPS})",
            props.len()
        )));
    }
    let na = a.len();
    let colors = 1usize << props.len();
    let project = |aut: &Automaton, c: usize| {
        aut.color_of(|p| {
            props
                .iter()
                .position(|q| &**q == p)
                .is_some_and(|i| c >> i & 1 == 1)
        })
    };
    let mut delta = Vec::with_capacity(na + b.len() + 1);
    let shift = |x: &OneStep| x.rename(&mut |v| state(v.as_index().expect("state variable") + na));
    for row in &a.delta {
        delta.push(
            (0..colors)
                .map(|c| row[project(a, c)].clone())
                .collect::<Vec<_>>(),
        );
    }
    for row in &b.delta {
        delta.push((0..colors).map(|c| shift(&row[project(b, c)])).collect());
    }
    delta.push(
        (0..colors)
            .map(|c| {
                OneStep::and([
                    a.delta[a.initial][project(a, c)].clone(),
                    shift(&b.delta[b.initial][project(b, c)]),
                ])
            })
            .collect(),
    );
    let mut names: Vec<String> = a.names.iter().map(|s| format!("l.{s}")).collect();
    names.extend(b.names.iter().map(|s| format!("r.{s}")));
    names.push("init".into());
    let mut priority = a.priority.clone();
    priority.extend(&b.priority);
    priority.push(0);
    Ok(Automaton {
        functor: a.functor.clone(),
        props,
        names,
        delta,
        priority,
        initial: na + b.len(),
        basis: None,
    })
}

/// How `equivalent` decides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivMode {
    /// Compare acceptance on every pointed model with at most this many points.
    Enumerate(usize),
    /// Emptiness of both differences via simulation and model synthesis.
    Emptiness,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Equivalent {
        bounded: bool,
    },
    /// A pointed model accepted by exactly one of the automata; the flag
    /// tells whether the first automaton accepts it.
    Counterexample(TModel, bool),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }
}

/// Acceptance equivalence of two automata over the same functor.
pub fn equivalent(a: &Automaton, b: &Automaton, mode: &EquivMode, caps: &Caps) -> Result<Verdict> {
    if a.functor != b.functor {
        return Err(invalid(format!(
            "cannot compare automata over {} and {}",
            a.functor, b.functor
        )));
    }
    match mode {
        EquivMode::Enumerate(bound) => {
            if let Some((m, first)) = first_difference(a, b, *bound, caps)? {
                return Ok(Verdict::Counterexample(m, first));
            }
            Ok(Verdict::Equivalent { bounded: true })
        }
        EquivMode::Emptiness => {
            if a.functor != Functor::Powerset {
                return Err(Error::UnsupportedFunctor {
                    functor: a.functor.to_string(),
                    operation: "emptiness-based equivalence".into(),
                });
            }
            let basis = crate::bases::Basis::Powerset;
            for (x, y, first) in [(a, b, true), (b, a, false)] {
                let diff = simulate(&conjunction(x, &complement(y)?)?, &basis, caps)?;
                if let Synthesis::Model(m) = synthesize_model(&diff, caps)? {
                    return Ok(Verdict::Counterexample(m, first));
                }
            }
            Ok(Verdict::Equivalent { bounded: false })
        }
    }
}

/// Whether `a` accepts every pointed model (within the bound) that `b` does
/// not reject, i.e. `a` implies `b`; returns a model accepted by `a` only.
pub fn implies(a: &Automaton, b: &Automaton, bound: usize, caps: &Caps) -> Result<Option<TModel>> {
    let mut props: Vec<Arc<str>> = a.props.iter().chain(&b.props).cloned().collect();
    props.sort();
    props.dedup();
    for m in enumerate_models(&a.functor, &props, bound, caps)? {
        let pa = accepting_points(a, &m)?;
        let pb = accepting_points(b, &m)?;
        if let Some(s) = (0..m.len()).find(|&s| pa[s] && !pb[s]) {
            return Ok(Some(m.at(s)));
        }
    }
    Ok(None)
}

fn first_difference(
    a: &Automaton,
    b: &Automaton,
    bound: usize,
    caps: &Caps,
) -> Result<Option<(TModel, bool)>> {
    let mut props: Vec<Arc<str>> = a.props.iter().chain(&b.props).cloned().collect();
    props.sort();
    props.dedup();
    for m in enumerate_models(&a.functor, &props, bound, caps)? {
        let pa = accepting_points(a, &m)?;
        let pb = accepting_points(b, &m)?;
        if let Some(s) = (0..m.len()).find(|&s| pa[s] != pb[s]) {
            return Ok(Some((m.at(s), pa[s])));
        }
    }
    Ok(None)
}
