//! Fixpoint formulas to Lambda-automata.
//!
//! After negation normal form and renaming bound variables apart, unguarded
//! occurrences are removed by unfolding; the states are then pairs of a
//! modal argument and the largest priority of the variables unfolded on the
//! way to it.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::automata::{Automaton, MAX_PROPS};
use crate::error::{invalid, resource, Error, Result};
use crate::functors::Functor;
use crate::logic::{Bool, Mu, OneStep};
use crate::var::Var;

const MAX_GUARDED_SIZE: usize = 1 << 16;
const MAX_STATES: usize = 1 << 12;

#[derive(Clone, Debug)]
pub struct CompiledAutomaton {
    pub automaton: Automaton,
    /// The guarded formula the automaton was built from.
    pub formula: Mu,
    /// For each state, its subformula and priority.
    pub annotation: Vec<(Mu, u32)>,
    /// Whether the guarding pass had to rewrite the input.
    pub rewritten: bool,
}

/// The free letters of a formula, which must all be names.
pub fn letters(phi: &Mu) -> Result<Vec<Arc<str>>> {
    phi.free_vars()
        .into_iter()
        .map(|v| match v {
            Var::Name(s) => Ok(s),
            other => Err(invalid(format!("free variable `{other}` is not a letter"))),
        })
        .collect()
}

fn fresh(base: &Var, used: &mut BTreeSet<String>) -> Var {
    let base = base.to_string();
    let mut name = base.clone();
    let mut k = 0;
    while used.contains(&name) {
        k += 1;
        name = format!("{base}_{k}");
    }
    used.insert(name.clone());
    Var::name(&name)
}

/// Give every binder its own variable, distinct from the free letters.
pub fn rename_apart(phi: &Mu) -> Mu {
    fn go(m: &Mu, used: &mut BTreeSet<String>, env: &mut Vec<(Var, Var)>) -> Mu {
        match m {
            Mu::Prop(v) => match env.iter().rev().find(|(a, _)| a == v) {
                Some((_, b)) => Mu::Prop(b.clone()),
                None => m.clone(),
            },
            Mu::Top | Mu::Bot => m.clone(),
            Mu::Not(x) => Mu::not(go(x, used, env)),
            Mu::And(xs) => Mu::And(xs.iter().map(|x| go(x, used, env)).collect()),
            Mu::Or(xs) => Mu::Or(xs.iter().map(|x| go(x, used, env)).collect()),
            Mu::Modal(l, xs) => Mu::Modal(l.clone(), xs.iter().map(|x| go(x, used, env)).collect()),
            Mu::Mu(v, b) | Mu::Nu(v, b) => {
                let w = fresh(v, used);
                env.push((v.clone(), w.clone()));
                let body = Box::new(go(b, used, env));
                env.pop();
                if matches!(m, Mu::Mu(..)) {
                    Mu::Mu(w, body)
                } else {
                    Mu::Nu(w, body)
                }
            }
        }
    }
    let mut used: BTreeSet<String> = phi.free_vars().iter().map(Var::to_string).collect();
    go(phi, &mut used, &mut Vec::new())
}

/// Whether `x` occurs free in `m` outside every modality.
fn unguarded(m: &Mu, x: &Var) -> bool {
    match m {
        Mu::Prop(v) => v == x,
        Mu::Top | Mu::Bot | Mu::Modal(..) => false,
        Mu::Not(y) => unguarded(y, x),
        Mu::And(xs) | Mu::Or(xs) => xs.iter().any(|y| unguarded(y, x)),
        Mu::Mu(v, b) | Mu::Nu(v, b) => v != x && unguarded(b, x),
    }
}

/// Unfold the binders through which `x` occurs unguarded, so that those
/// occurrences end up in the boolean structure at the top.
fn expose(m: &Mu, x: &Var) -> Mu {
    match m {
        Mu::And(xs) => Mu::And(xs.iter().map(|y| expose(y, x)).collect()),
        Mu::Or(xs) => Mu::Or(xs.iter().map(|y| expose(y, x)).collect()),
        Mu::Mu(v, b) | Mu::Nu(v, b) if unguarded(m, x) => expose(&b.subst(v, m), x),
        _ => m.clone(),
    }
}

fn cut(m: &Mu, x: &Var, val: &Mu) -> Mu {
    match m {
        Mu::Prop(v) if v == x => val.clone(),
        Mu::And(xs) => Mu::And(xs.iter().map(|y| cut(y, x, val)).collect()),
        Mu::Or(xs) => Mu::Or(xs.iter().map(|y| cut(y, x, val)).collect()),
        _ => m.clone(),
    }
}

/// Make every bound variable guarded: top-level occurrences of `x` in the
/// body of `mu x` are false, those in the body of `nu x` true. Expects
/// negation normal form with distinct binders.
pub fn guard(phi: &Mu) -> Result<(Mu, bool)> {
    fn go(m: &Mu, rewritten: &mut bool) -> Result<Mu> {
        Ok(match m {
            Mu::Prop(_) | Mu::Top | Mu::Bot => m.clone(),
            Mu::Not(x) => Mu::not(go(x, rewritten)?),
            Mu::And(xs) => Mu::And(xs.iter().map(|x| go(x, rewritten)).collect::<Result<_>>()?),
            Mu::Or(xs) => Mu::Or(xs.iter().map(|x| go(x, rewritten)).collect::<Result<_>>()?),
            Mu::Modal(l, xs) => Mu::Modal(
                l.clone(),
                xs.iter().map(|x| go(x, rewritten)).collect::<Result<_>>()?,
            ),
            Mu::Mu(v, b) | Mu::Nu(v, b) => {
                let least = matches!(m, Mu::Mu(..));
                let mut body = go(b, rewritten)?;
                if unguarded(&body, v) {
                    *rewritten = true;
                    let exposed = expose(&body, v);
                    if exposed.size() > MAX_GUARDED_SIZE {
                        return Err(Error::Unguarded(format!(
                            "unfolding the binder of `{v}` exceeds {MAX_GUARDED_SIZE} nodes"
                        )));
                    }
                    body = cut(&exposed, v, if least { &Mu::Bot } else { &Mu::Top });
                }
                if least {
                    Mu::Mu(v.clone(), Box::new(body))
                } else {
                    Mu::Nu(v.clone(), Box::new(body))
                }
            }
        })
    }
    let mut rewritten = false;
    let out = go(phi, &mut rewritten)?;
    Ok((out, rewritten))
}

/// Binder priorities: even for `nu`, odd for `mu`, and at least the priority
/// of every binder nested inside.
fn priorities(m: &Mu, out: &mut HashMap<Var, (u32, Mu)>) -> u32 {
    match m {
        Mu::Prop(_) | Mu::Top | Mu::Bot => 0,
        Mu::Not(x) => priorities(x, out),
        Mu::And(xs) | Mu::Or(xs) | Mu::Modal(_, xs) => {
            xs.iter().map(|x| priorities(x, out)).max().unwrap_or(0)
        }
        Mu::Mu(v, b) | Mu::Nu(v, b) => {
            let inner = priorities(b, out);
            let parity = u32::from(matches!(m, Mu::Mu(..)));
            let p = if inner % 2 == parity {
                inner
            } else {
                inner + 1
            };
            out.insert(v.clone(), (p, (**b).clone()));
            p
        }
    }
}

struct Builder<'a> {
    props: &'a [Arc<str>],
    binders: HashMap<Var, (u32, Mu)>,
    states: Vec<(Mu, u32)>,
    index: HashMap<(Mu, u32), usize>,
}

impl Builder<'_> {
    fn intern(&mut self, m: &Mu, p: u32) -> Result<usize> {
        if let Some(&i) = self.index.get(&(m.clone(), p)) {
            return Ok(i);
        }
        if self.states.len() >= MAX_STATES {
            return Err(resource(format!(
                "compiled automaton exceeds {MAX_STATES} states"
            )));
        }
        self.states.push((m.clone(), p));
        self.index.insert((m.clone(), p), self.states.len() - 1);
        Ok(self.states.len() - 1)
    }

    fn letter(&self, v: &Var, c: usize) -> Result<bool> {
        let i = self
            .props
            .iter()
            .position(|q| matches!(v, Var::Name(s) if s == q))
            .ok_or_else(|| invalid(format!("`{v}` is neither bound nor a letter")))?;
        Ok(c >> i & 1 == 1)
    }

    fn unfold(&mut self, m: &Mu, c: usize, p: u32) -> Result<OneStep> {
        Ok(match m {
            Mu::Top => OneStep::Top,
            Mu::Bot => OneStep::Bot,
            Mu::Prop(v) => match self.binders.get(v).cloned() {
                Some((q, body)) => self.unfold(&body, c, p.max(q))?,
                None => {
                    if self.letter(v, c)? {
                        OneStep::Top
                    } else {
                        OneStep::Bot
                    }
                }
            },
            Mu::Not(x) => match &**x {
                Mu::Prop(v) if !self.binders.contains_key(v) => {
                    if self.letter(v, c)? {
                        OneStep::Bot
                    } else {
                        OneStep::Top
                    }
                }
                _ => return Err(invalid(format!("`{m}` is not in negation normal form"))),
            },
            Mu::And(xs) => OneStep::and(
                xs.iter()
                    .map(|x| self.unfold(x, c, p))
                    .collect::<Result<Vec<_>>>()?,
            ),
            Mu::Or(xs) => OneStep::or(
                xs.iter()
                    .map(|x| self.unfold(x, c, p))
                    .collect::<Result<Vec<_>>>()?,
            ),
            Mu::Mu(_, b) | Mu::Nu(_, b) => self.unfold(b, c, p)?,
            Mu::Modal(l, xs) => {
                let args = xs
                    .iter()
                    .map(|x| Ok(Bool::Var(Var::Index(self.intern(x, p)?))))
                    .collect::<Result<_>>()?;
                OneStep::Modal(l.clone(), args)
            }
        })
    }
}

/// Compile a formula into an equivalent automaton whose alphabet is the set
/// of free letters of the formula.
pub fn compile(phi: &Mu, functor: &Functor) -> Result<CompiledAutomaton> {
    phi.check(functor)?;
    let props = letters(phi)?;
    if props.len() > MAX_PROPS {
        return Err(resource(format!(
            "{} letters (at most {MAX_PROPS})",
            props.len()
        )));
    }
    let nnf = rename_apart(&phi.nnf(functor)?);
    let (guarded, rewritten) = guard(&nnf)?;
    let formula = rename_apart(&guarded);
    let mut binders = HashMap::new();
    priorities(&formula, &mut binders);
    let mut b = Builder {
        props: &props,
        binders,
        states: Vec::new(),
        index: HashMap::new(),
    };
    b.intern(&formula, 0)?;
    let colors = 1usize << props.len();
    let mut delta = Vec::new();
    let mut i = 0;
    while i < b.states.len() {
        let m = b.states[i].0.clone();
        let row = (0..colors)
            .map(|c| b.unfold(&m, c, 0))
            .collect::<Result<Vec<_>>>()?;
        delta.push(row);
        i += 1;
    }
    let n = b.states.len();
    let automaton = Automaton {
        functor: functor.clone(),
        props: props.clone(),
        names: (0..n).map(|a| format!("q{a}")).collect(),
        delta,
        priority: b.states.iter().map(|s| s.1).collect(),
        initial: 0,
        basis: None,
    };
    automaton.check()?;
    Ok(CompiledAutomaton {
        automaton,
        formula,
        annotation: b.states,
        rewritten,
    })
}
