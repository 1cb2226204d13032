//! Model synthesis for disjunctive automata on carriers contained in the
//! state set.

use std::collections::HashMap;
use std::sync::Arc;

use crate::bases::{Dj, DjTerm};
use crate::error::{invalid, resource, Result};
use crate::functors::{bits, full, normalize_comp, Caps, Elem, Functor};
use crate::games::{solve, ParityGame, Player};
use crate::logic::semantics::eval_masks;
use crate::var::Var;

use super::{accepts, Automaton, TModel};

#[derive(Clone, Debug)]
pub enum Synthesis {
    Model(TModel),
    /// No model exists; `bounded` when the witnesses were cut by caps.
    Empty {
        bounded: bool,
    },
}

const MAX_WITNESSES: usize = 1 << 12;

/// Some element of `T` over the single point `top`.
fn filler(f: &Functor, top: usize) -> Result<Elem> {
    let e = f
        .enumerate(1, &Caps::default())?
        .into_iter()
        .next()
        .ok_or_else(|| invalid(format!("{f} has no elements")))?;
    let map = vec![top];
    Ok(f.map(&map, &e))
}

fn index(v: &Var) -> Result<usize> {
    v.as_index()
        .ok_or_else(|| invalid(format!("`{v}` is not a state")))
}

/// Canonical elements over `0..top` (with the unmarked point `top`) that
/// satisfy `d` under the marking `b |-> {b}` with the least support.
fn witnesses(f: &Functor, d: &Dj, top: usize) -> Result<Vec<Elem>> {
    let mut out = Vec::new();
    for t in &d.0 {
        out.extend(term_witnesses(f, t, top)?);
        if out.len() > MAX_WITNESSES {
            return Err(resource(format!(
                "more than {MAX_WITNESSES} witnesses for one transition"
            )));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn term_witnesses(f: &Functor, t: &DjTerm, top: usize) -> Result<Vec<Elem>> {
    Ok(match (f, t) {
        (_, DjTerm::Top) => vec![filler(f, top)?],
        (Functor::Powerset, DjTerm::Nabla(b)) => {
            vec![Elem::Set(
                b.iter()
                    .map(index)
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0, |acc, i| acc | 1 << i),
            )]
        }
        (Functor::Bag, DjTerm::Graded(a, _)) => {
            let mut counts: HashMap<usize, u64> = HashMap::new();
            for v in a {
                *counts.entry(index(v)?).or_default() += 1;
            }
            vec![Elem::bag(counts)]
        }
        (Functor::Identity, DjTerm::Next(v)) => vec![Elem::Point(index(v)?)],
        (Functor::Labeled(_), DjTerm::LabelNext(l, v)) => vec![Elem::Labeled(l.clone(), index(v)?)],
        (Functor::Sum(a, b), DjTerm::Inj(i, d)) => {
            let g = if *i == 1 { a } else { b };
            witnesses(g, d, top)?
                .into_iter()
                .map(|e| Elem::inj(*i, e))
                .collect()
        }
        (Functor::Product(a, b), DjTerm::Pair(d1, d2)) => {
            let xs = witnesses(a, d1, top)?;
            let ys = witnesses(b, d2, top)?;
            if xs.len() * ys.len() > MAX_WITNESSES {
                return Err(resource(format!(
                    "more than {MAX_WITNESSES} witnesses for one transition"
                )));
            }
            xs.iter()
                .flat_map(|x| ys.iter().map(move |y| Elem::pair(x.clone(), y.clone())))
                .collect()
        }
        (Functor::Compose(f1, f2), DjTerm::Comp(outer, letters)) => {
            let k = letters.len();
            let mut out = Vec::new();
            for o in witnesses(f1, outer, k)? {
                // one inner witness per letter used, the filler for the extra letter
                let mut tables: Vec<Vec<Elem>> = vec![vec![]];
                for j in 0..=k {
                    let choices = if j == k || f1.support(&o) >> j & 1 == 0 {
                        vec![filler(f2, top)?]
                    } else {
                        witnesses(f2, &letters[j], top)?
                    };
                    let mut next = Vec::new();
                    for tb in &tables {
                        for c in &choices {
                            let mut tb = tb.clone();
                            tb.push(c.clone());
                            next.push(tb);
                        }
                    }
                    if next.len() > MAX_WITNESSES {
                        return Err(resource(format!(
                            "more than {MAX_WITNESSES} witnesses for one transition"
                        )));
                    }
                    tables = next;
                }
                for tb in tables {
                    out.push(normalize_comp(f1, tb, &o));
                }
            }
            out
        }
        _ => return Err(invalid(format!("basis term {t} does not belong to {f}"))),
    })
}

/// Search for a pointed model accepted by a disjunctive automaton, on a
/// carrier contained in its state set: Exists picks a colour and a witness
/// of the transition at each state, Forall picks a state in its support.
pub fn synthesize_model(aut: &Automaton, _caps: &Caps) -> Result<Synthesis> {
    aut.check()?;
    let Some(basis) = &aut.basis else {
        return Err(invalid("model synthesis needs a disjunctive automaton"));
    };
    let f = &aut.functor;
    let n = aut.len();
    if n >= 64 {
        return Err(resource(format!("synthesis over {n} states (at most 63)")));
    }
    let mut game = ParityGame::new();
    for a in 0..n {
        game.add_position(Player::Exists, aut.priority[a]);
    }
    let mut supports: HashMap<u64, usize> = HashMap::new();
    // for each state, the (colour, witness) behind every move
    let mut chosen: Vec<HashMap<usize, (usize, Elem)>> = vec![HashMap::new(); n];
    let val = |v: &Var| v.as_index().map_or(0, |b| 1u64 << b);
    for a in 0..n {
        for c in 0..aut.colors() {
            for w in witnesses(f, &basis[a][c], n)? {
                if !eval_masks(f, &aut.delta[a][c], &w, n + 1, full(n + 1), &val)? {
                    return Err(invalid(format!(
                        "witness {w} fails the transition of state {a}"
                    )));
                }
                let supp = f.support(&w) & full(n);
                let pos = *supports
                    .entry(supp)
                    .or_insert_with(|| game.add_position(Player::Forall, 0));
                game.add_move(a, pos);
                chosen[a].entry(pos).or_insert((c, w));
            }
        }
    }
    for (&supp, &pos) in &supports {
        for b in bits(supp) {
            game.add_move(pos, b);
        }
    }
    let sol = solve(&game);
    let bounded = contains_bag(f);
    if sol.winner[aut.initial] != Player::Exists {
        return Ok(Synthesis::Empty { bounded });
    }
    // carrier: states reached under the winning strategy
    let mut order = vec![aut.initial];
    let mut new_of = vec![usize::MAX; n + 1];
    new_of[aut.initial] = 0;
    let mut i = 0;
    while i < order.len() {
        let a = order[i];
        i += 1;
        let pos = sol.strategy[a].expect("winning Exists position has a move");
        for b in bits(f.support(&chosen[a][&pos].1) & full(n)) {
            if new_of[b] == usize::MAX {
                new_of[b] = order.len();
                order.push(b);
            }
        }
    }
    let mut coalg = Vec::with_capacity(order.len());
    let mut valuation: std::collections::BTreeMap<Arc<str>, u64> =
        aut.props.iter().map(|p| (p.clone(), 0)).collect();
    for (s, &a) in order.iter().enumerate() {
        let pos = sol.strategy[a].expect("winning move");
        let (c, w) = &chosen[a][&pos];
        let map: Vec<usize> = (0..=n)
            .map(|b| {
                if b == n || new_of[b] == usize::MAX {
                    s
                } else {
                    new_of[b]
                }
            })
            .collect();
        coalg.push(f.map(&map, w));
        for (j, p) in aut.props.iter().enumerate() {
            if c >> j & 1 == 1 {
                *valuation.get_mut(p).expect("letter") |= 1 << s;
            }
        }
    }
    let model = TModel {
        functor: f.clone(),
        coalg,
        valuation,
        point: 0,
    };
    if !accepts(aut, &model)? {
        return Err(invalid(format!(
            "synthesised model {model} is not accepted"
        )));
    }
    Ok(Synthesis::Model(model))
}

fn contains_bag(f: &Functor) -> bool {
    match f {
        Functor::Bag => true,
        Functor::Sum(a, b) | Functor::Product(a, b) | Functor::Compose(a, b) => {
            contains_bag(a) || contains_bag(b)
        }
        _ => false,
    }
}
