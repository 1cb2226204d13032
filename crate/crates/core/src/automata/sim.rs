//! Pre-simulation over binary relations of states and the synchronised
//! product with the deterministic "no bad trace" automaton.

use std::collections::HashMap;

use crate::bases::{Basis, Dj};
use crate::error::{invalid, resource, Result};
use crate::functors::{bits, Caps};
use crate::logic::equiv::{one_step_equivalent, Equivalence};
use crate::logic::{Bool, OneStep};
use crate::var::Var;

use super::words::{bad_trace_nba, determinize_nbt, MAX_TRACE_STATES};
use super::{state, Automaton};

/// The variable standing for the relation `r` (bit `a * n + b` for `(a, b)`).
pub fn relation_var(r: u64, n: usize) -> Var {
    Var::set(bits(r).map(|i| Var::pair(state(i / n), state(i % n))))
}

/// Inverse of [`relation_var`].
pub fn relation_of_var(v: &Var, n: usize) -> Option<u64> {
    let mut r = 0;
    for p in v.as_set()? {
        let (a, b) = p.as_pair()?;
        let (a, b) = (a.as_index()?, b.as_index()?);
        if a >= n || b >= n {
            return None;
        }
        r |= 1 << (a * n + b);
    }
    Some(r)
}

/// `pre(A)`: states are the relations reachable from `{(a_I, a_I)}`.
#[derive(Clone, Debug)]
pub struct PresimAutomaton {
    pub source: Automaton,
    pub basis: Basis,
    pub relations: Vec<u64>,
    /// `delta[i][c]`, a basis formula over relation variables.
    pub delta: Vec<Vec<Dj>>,
}

impl PresimAutomaton {
    pub fn index_of(&self, r: u64) -> Option<usize> {
        self.relations.iter().position(|&x| x == r)
    }

    /// `/\ { Theta(a, c)[b |-> (a, b)] : a in Ran R }` for the relation
    /// with index `i`.
    pub fn tagged_conjunction(&self, i: usize, c: usize) -> OneStep {
        tagged(&self.source, self.relations[i], c)
    }

    /// Check `delta[i][c][/\] == tagged_conjunction(i, c)` on the one-step
    /// model oracle.
    pub fn verify_entry(&self, i: usize, c: usize, caps: &Caps) -> Result<Equivalence> {
        // relation variables become conjunctions of their pairs; the pairs
        // themselves are atomic here
        let lhs = self.delta[i][c].to_formula().subst(&mut |v| {
            v.as_set()
                .map(|q| Bool::conj_of(q.iter()))
                .ok_or_else(|| invalid(format!("`{v}` is not a relation")))
        })?;
        one_step_equivalent(
            &self.source.functor,
            &lhs,
            &self.tagged_conjunction(i, c),
            caps,
        )
    }
}

fn range(r: u64, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |&b| (0..n).any(|a| r >> (a * n + b) & 1 == 1))
}

fn tagged(aut: &Automaton, r: u64, c: usize) -> OneStep {
    let n = aut.len();
    OneStep::and(
        range(r, n).map(|a| aut.delta[a][c].rename(&mut |v| Var::pair(state(a), v.clone()))),
    )
}

const MAX_RELATIONS: usize = 1 << 12;

pub fn presimulate(aut: &Automaton, basis: &Basis, _caps: &Caps) -> Result<PresimAutomaton> {
    aut.check()?;
    if basis.functor() != aut.functor {
        return Err(invalid(format!(
            "basis for {} used with an automaton over {}",
            basis.functor(),
            aut.functor
        )));
    }
    let n = aut.len();
    if n > MAX_TRACE_STATES {
        return Err(resource(format!(
            "simulation of {n} states (at most {MAX_TRACE_STATES})"
        )));
    }
    let init = 1u64 << (aut.initial * n + aut.initial);
    let mut relations = vec![init];
    let mut index: HashMap<u64, usize> = HashMap::from([(init, 0)]);
    let mut delta = Vec::new();
    let mut i = 0;
    while i < relations.len() {
        let r = relations[i];
        let mut row = Vec::with_capacity(aut.colors());
        for c in 0..aut.colors() {
            let d = basis.normal_form(&tagged(aut, r, c))?;
            for v in d.vars() {
                let q = relation_of_var(&v, n)
                    .ok_or_else(|| invalid(format!("normal form produced `{v}`")))?;
                if !index.contains_key(&q) {
                    if relations.len() >= MAX_RELATIONS {
                        return Err(resource(format!(
                            "more than {MAX_RELATIONS} reachable relations"
                        )));
                    }
                    index.insert(q, relations.len());
                    relations.push(q);
                }
            }
            row.push(d);
        }
        delta.push(row);
        i += 1;
    }
    Ok(PresimAutomaton {
        source: aut.clone(),
        basis: basis.clone(),
        relations,
        delta,
    })
}

const MAX_PRODUCT: usize = 1 << 14;

/// The disjunctive automaton `sim(A)` on the reachable part of
/// `pre(A) x Z`, where `Z` determinises the no-bad-trace condition.
pub fn simulate(aut: &Automaton, basis: &Basis, caps: &Caps) -> Result<Automaton> {
    let pre = presimulate(aut, basis, caps)?;
    let n = aut.len();
    let mut dpa = determinize_nbt(&bad_trace_nba(&aut.priority));
    let rel_index: HashMap<u64, usize> = pre
        .relations
        .iter()
        .enumerate()
        .map(|(i, &r)| (r, i))
        .collect();
    let mut pairs: Vec<(usize, usize)> = vec![(0, dpa.initial())];
    let mut index: HashMap<(usize, usize), usize> = HashMap::from([((0, dpa.initial()), 0)]);
    let mut delta = Vec::new();
    let mut dj_rows = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (ri, z) = pairs[i];
        let z2 = dpa.step(z, pre.relations[ri])?;
        let mut row = Vec::with_capacity(aut.colors());
        let mut dj_row = Vec::with_capacity(aut.colors());
        for c in 0..aut.colors() {
            let mut err = None;
            let d = pre.delta[ri][c].rename(&mut |v| {
                let q = relation_of_var(v, n)
                    .and_then(|q| rel_index.get(&q).copied())
                    .expect("presim variable");
                let key = (q, z2);
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        if pairs.len() >= MAX_PRODUCT {
                            err =
                                Some(resource(format!("simulation exceeds {MAX_PRODUCT} states")));
                        }
                        pairs.push(key);
                        index.insert(key, pairs.len() - 1);
                        pairs.len() - 1
                    }
                };
                state(id)
            });
            if let Some(e) = err {
                return Err(e);
            }
            row.push(d.to_formula());
            dj_row.push(d);
        }
        delta.push(row);
        dj_rows.push(dj_row);
        i += 1;
    }
    let names = pairs.iter().map(|&(r, z)| format!("R{r}z{z}")).collect();
    let priority = pairs.iter().map(|&(_, z)| dpa.priority(z)).collect();
    let out = Automaton {
        functor: aut.functor.clone(),
        props: aut.props.clone(),
        names,
        delta,
        priority,
        initial: 0,
        basis: Some(dj_rows),
    };
    out.check()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{accepting_points, enumerate_models};
    use crate::functors::Functor;
    use crate::logic::Lifting;

    fn dia(b: usize) -> OneStep {
        OneStep::Modal(Lifting::Diamond, vec![Bool::Var(state(b))])
    }

    #[test]
    fn relation_vars_round_trip() {
        for r in [0u64, 1, 0b1011, 0b1111] {
            assert_eq!(relation_of_var(&relation_var(r, 2), 2), Some(r));
        }
    }

    #[test]
    fn empty_relation_is_true() {
        let mut aut = Automaton::new(Functor::Powerset, &[], 1).unwrap();
        aut.set_all(0, dia(0));
        assert_eq!(tagged(&aut, 0, 0), OneStep::Top);
    }

    #[test]
    fn simulation_of_box_and_diamond() {
        // q0: []q0 & <>q1, q1: true
        let mut aut = Automaton::new(Functor::Powerset, &["p"], 2).unwrap();
        aut.set_by_color(0, |holds| {
            if holds("p") {
                OneStep::and([
                    OneStep::Modal(Lifting::Box, vec![Bool::Var(state(0))]),
                    dia(1),
                ])
            } else {
                OneStep::Bot
            }
        });
        aut.set_all(1, OneStep::Top);
        aut.priority = vec![0, 0];
        let caps = Caps::default();
        let pre = presimulate(&aut, &Basis::Powerset, &caps).unwrap();
        for i in 0..pre.relations.len() {
            for c in 0..2 {
                let v = pre.verify_entry(i, c, &caps).unwrap();
                assert!(
                    v.holds(),
                    "{} vs {}: {:?}",
                    pre.delta[i][c],
                    pre.tagged_conjunction(i, c),
                    v
                );
            }
        }
        let sim = simulate(&aut, &Basis::Powerset, &caps).unwrap();
        for m in enumerate_models(&Functor::Powerset, &aut.props, 2, &caps).unwrap() {
            assert_eq!(
                accepting_points(&aut, &m).unwrap(),
                accepting_points(&sim, &m).unwrap(),
                "{m}"
            );
        }
    }
}
