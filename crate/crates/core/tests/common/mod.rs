//! Brute-force oracles and random generators shared by the integration
//! tests and the acceptance harness.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use coalmu::automata::{Automaton, TModel};
use coalmu::bases::{Dj, DjTerm};
use coalmu::functors::{Elem, Functor};
use coalmu::games::{ParityGame, Player};
use coalmu::logic::{Bool, Lifting, Mu, OneStep};
use coalmu::Var;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn arcs(letters: &[&str]) -> Vec<Arc<str>> {
    letters.iter().map(|p| Arc::from(*p)).collect()
}

// ------------------------------------------------------------------ games

/// Positions from which the opponent of `player` wins once `player` is
/// fixed to the positional `strategy`: the opponent wins iff some path
/// reaches a dead end owned by `player` or a cycle whose largest priority
/// favours the opponent.
pub fn opponent_wins(g: &ParityGame, player: Player, strategy: &[Option<usize>]) -> Vec<bool> {
    let n = g.len();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            if g.owner[v] == player {
                strategy[v]
                    .filter(|w| g.moves[v].contains(w))
                    .map(|w| vec![w])
                    .unwrap_or_else(|| {
                        // an unfixed position of `player` keeps its first move
                        g.moves[v].first().map(|&w| vec![w]).unwrap_or_default()
                    })
            } else {
                g.moves[v].clone()
            }
        })
        .collect();
    let bad = player.opponent();
    let mut target = vec![false; n];
    for v in 0..n {
        if g.owner[v] == player && succ[v].is_empty() {
            target[v] = true;
            continue;
        }
        let p = g.priority[v];
        if Player::of_priority(p) != bad {
            continue;
        }
        // v on a cycle inside the positions of priority <= p
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = succ[v]
            .iter()
            .copied()
            .filter(|&w| g.priority[w] <= p)
            .collect();
        while let Some(w) = stack.pop() {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            stack.extend(succ[w].iter().copied().filter(|&x| g.priority[x] <= p));
        }
        target[v] = seen[v];
    }
    // backward reachability of the targets
    let mut win = target;
    loop {
        let mut changed = false;
        for v in 0..n {
            if !win[v] && succ[v].iter().any(|&w| win[w]) {
                win[v] = true;
                changed = true;
            }
        }
        if !changed {
            return win;
        }
    }
}

/// Winner of every position by enumerating the positional strategies of
/// `Exists` (positional determinacy makes this exact).
pub fn game_oracle(g: &ParityGame) -> Vec<Player> {
    let n = g.len();
    let choices: Vec<Vec<Option<usize>>> = (0..n)
        .map(|v| {
            if g.owner[v] == Player::Exists && !g.moves[v].is_empty() {
                g.moves[v].iter().map(|&w| Some(w)).collect()
            } else {
                vec![None]
            }
        })
        .collect();
    let mut exists_wins = vec![false; n];
    let mut idx = vec![0usize; n];
    loop {
        let strategy: Vec<Option<usize>> = (0..n).map(|v| choices[v][idx[v]]).collect();
        let lose = opponent_wins(g, Player::Exists, &strategy);
        for v in 0..n {
            exists_wins[v] |= !lose[v];
        }
        let mut i = 0;
        while i < n {
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    exists_wins
        .into_iter()
        .map(|w| if w { Player::Exists } else { Player::Forall })
        .collect()
}

pub fn random_game(rng: &mut impl Rng, n: usize, max_priority: u32) -> ParityGame {
    let mut g = ParityGame::new();
    for _ in 0..n {
        let owner = if rng.gen_bool(0.5) {
            Player::Exists
        } else {
            Player::Forall
        };
        g.add_position(owner, rng.gen_range(0..=max_priority));
    }
    for v in 0..n {
        // occasional dead ends
        let k = if rng.gen_bool(0.1) {
            0
        } else {
            rng.gen_range(1..=3)
        };
        for _ in 0..k {
            g.add_move(v, rng.gen_range(0..n));
        }
    }
    g
}

// ----------------------------------------------------------- stream traces

/// Whether the lasso `u v^omega` of relation letters over `priority.len()`
/// states has no trace whose largest recurring priority is odd, read off
/// the finite trace graph of the lasso.
pub fn lasso_has_no_bad_trace(priority: &[u32], u: &[u64], v: &[u64]) -> bool {
    let n = priority.len();
    let word: Vec<u64> = u.iter().chain(v).copied().collect();
    let len = word.len();
    let node = |i: usize, a: usize| i * n + a;
    let next = |i: usize| if i + 1 == len { u.len() } else { i + 1 };
    let total = len * n;
    let mut succ = vec![Vec::new(); total];
    for (i, &r) in word.iter().enumerate() {
        for a in 0..n {
            for b in 0..n {
                if r >> (a * n + b) & 1 == 1 {
                    succ[node(i, a)].push(node(next(i), b));
                }
            }
        }
    }
    let prio = |x: usize| priority[x % n];
    let mut reach = vec![false; total];
    let mut stack: Vec<usize> = (0..n).map(|a| node(0, a)).collect();
    while let Some(x) = stack.pop() {
        if !reach[x] {
            reach[x] = true;
            stack.extend(&succ[x]);
        }
    }
    for x in (0..total).filter(|&x| reach[x] && prio(x) % 2 == 1) {
        let p = prio(x);
        let mut seen = vec![false; total];
        let mut stack: Vec<usize> = succ[x].iter().copied().filter(|&y| prio(y) <= p).collect();
        while let Some(y) = stack.pop() {
            if !seen[y] {
                seen[y] = true;
                stack.extend(succ[y].iter().copied().filter(|&z| prio(z) <= p));
            }
        }
        if seen[x] {
            return false;
        }
    }
    true
}

/// All words over `letters` letters of length `lo..=hi`.
pub fn words(letters: u64, lo: usize, hi: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u64>> = vec![Vec::new()];
    for len in 0..=hi {
        if len >= lo {
            out.extend(layer.iter().cloned());
        }
        layer = layer
            .iter()
            .flat_map(|w| (0..letters).map(move |r| [w.as_slice(), &[r]].concat()))
            .collect();
    }
    out
}

// ------------------------------------------------------------ graded bags

/// `beta(a, B)` on the Kripkean cover of a bag model: pairwise distinct
/// copies witness the `a_i`, and every other copy satisfies a member of `B`.
pub fn graded_cover_predicate(
    a: &[Var],
    b: &BTreeSet<Var>,
    mult: &[u64],
    marking: &[BTreeSet<Var>],
) -> bool {
    let copies: Vec<&BTreeSet<Var>> = mult
        .iter()
        .enumerate()
        .flat_map(|(s, &k)| (0..k).map(move |_| &marking[s]))
        .collect();
    fn go(
        i: usize,
        a: &[Var],
        b: &BTreeSet<Var>,
        copies: &[&BTreeSet<Var>],
        used: &mut Vec<bool>,
    ) -> bool {
        if i == a.len() {
            return copies
                .iter()
                .zip(used.iter())
                .all(|(m, &u)| u || m.iter().any(|v| b.contains(v)));
        }
        for j in 0..copies.len() {
            if !used[j] && copies[j].contains(&a[i]) {
                used[j] = true;
                if go(i + 1, a, b, copies, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    go(0, a, b, &copies, &mut vec![false; copies.len()])
}

// --------------------------------------------------------------- formulas

fn letter(rng: &mut impl Rng, letters: &[&str]) -> Mu {
    Mu::prop(letters[rng.gen_range(0..letters.len())])
}

/// A closed formula with negations only on letters and closed subformulas.
pub fn random_mu(rng: &mut impl Rng, f: &Functor, letters: &[&str], depth: u32) -> Mu {
    gen_mu(rng, f, letters, depth, &mut Vec::new(), &mut 0)
}

fn random_lifting(rng: &mut impl Rng, f: &Functor) -> Lifting {
    match f {
        Functor::Bag => {
            let k = rng.gen_range(1..=2);
            if rng.gen_bool(0.5) {
                Lifting::AtLeast(k)
            } else {
                Lifting::Fewer(k)
            }
        }
        _ => {
            if rng.gen_bool(0.5) {
                Lifting::Diamond
            } else {
                Lifting::Box
            }
        }
    }
}

fn gen_mu(
    rng: &mut impl Rng,
    f: &Functor,
    letters: &[&str],
    depth: u32,
    bound: &mut Vec<String>,
    fresh: &mut usize,
) -> Mu {
    let pick = if depth == 0 {
        rng.gen_range(0..4)
    } else {
        rng.gen_range(0..11)
    };
    match pick {
        0 => letter(rng, letters),
        1 if depth > 0 && bound.is_empty() && rng.gen_bool(0.3) => {
            Mu::not(gen_mu(rng, f, letters, depth - 1, &mut Vec::new(), fresh))
        }
        1 => Mu::not(letter(rng, letters)),
        2 | 3 if !bound.is_empty() => Mu::Prop(Var::name(&bound[rng.gen_range(0..bound.len())])),
        2 => letter(rng, letters),
        3 => {
            if rng.gen_bool(0.5) {
                Mu::Top
            } else {
                Mu::Bot
            }
        }
        4 | 5 => Mu::And(vec![
            gen_mu(rng, f, letters, depth - 1, bound, fresh),
            gen_mu(rng, f, letters, depth - 1, bound, fresh),
        ]),
        6 | 7 => Mu::Or(vec![
            gen_mu(rng, f, letters, depth - 1, bound, fresh),
            gen_mu(rng, f, letters, depth - 1, bound, fresh),
        ]),
        8 | 9 => {
            let l = random_lifting(rng, f);
            Mu::modal(l, vec![gen_mu(rng, f, letters, depth - 1, bound, fresh)])
        }
        _ => {
            *fresh += 1;
            let x = format!("x{fresh}");
            bound.push(x.clone());
            let body = gen_mu(rng, f, letters, depth - 1, bound, fresh);
            bound.pop();
            if rng.gen_bool(0.5) {
                Mu::mu(&x, body)
            } else {
                Mu::nu(&x, body)
            }
        }
    }
}

/// A random model over powerset or bags with every letter in the valuation.
pub fn random_model(
    rng: &mut impl Rng,
    f: &Functor,
    n: usize,
    letters: &[&str],
    max_mult: u64,
) -> TModel {
    let coalg = (0..n)
        .map(|_| match f {
            Functor::Bag => Elem::bag(
                (0..n)
                    .map(|t| (t, rng.gen_range(0..=max_mult)))
                    .filter(|&(_, k)| k > 0),
            ),
            _ => Elem::set((0..n).filter(|_| rng.gen_bool(0.4))),
        })
        .collect();
    let mut m = TModel::new(f.clone(), coalg, rng.gen_range(0..n));
    for p in letters {
        let pts: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        m = m.with_prop(p, &pts);
    }
    m
}

// -------------------------------------------------------------- automata

pub fn random_bool(rng: &mut impl Rng, n: usize, depth: u32) -> Bool {
    let state = |rng: &mut dyn rand::RngCore| Bool::Var(Var::Index(rng.gen_range(0..n)));
    if depth == 0 {
        return state(rng);
    }
    match rng.gen_range(0..6) {
        0 => Bool::and([
            random_bool(rng, n, depth - 1),
            random_bool(rng, n, depth - 1),
        ]),
        1 => Bool::or([
            random_bool(rng, n, depth - 1),
            random_bool(rng, n, depth - 1),
        ]),
        _ => state(rng),
    }
}

/// A positive one-step formula over the states `#0..#n`.
pub fn random_transition(rng: &mut impl Rng, n: usize, depth: u32) -> OneStep {
    let pick = if depth == 0 {
        rng.gen_range(2..6)
    } else {
        rng.gen_range(0..8)
    };
    match pick {
        0 => OneStep::and([
            random_transition(rng, n, depth - 1),
            random_transition(rng, n, depth - 1),
        ]),
        1 => OneStep::or([
            random_transition(rng, n, depth - 1),
            random_transition(rng, n, depth - 1),
        ]),
        2 | 3 => OneStep::Modal(Lifting::Diamond, vec![random_bool(rng, n, 1)]),
        4 => OneStep::Modal(Lifting::Box, vec![random_bool(rng, n, 1)]),
        5 => {
            if rng.gen_bool(0.5) {
                OneStep::Top
            } else {
                OneStep::Bot
            }
        }
        _ => OneStep::Modal(Lifting::Diamond, vec![random_bool(rng, n, 1)]),
    }
}

pub fn random_automaton(rng: &mut impl Rng, n: usize, letters: &[&str]) -> Automaton {
    let mut a = Automaton::new(Functor::Powerset, letters, n).expect("automaton");
    for s in 0..n {
        a.priority[s] = rng.gen_range(0..4);
        for c in 0..a.colors() {
            a.delta[s][c] = random_transition(rng, n, 1);
        }
    }
    a.check().expect("well formed");
    a
}

fn permute_mask(mask: u64, perm: &[usize]) -> u64 {
    perm.iter()
        .enumerate()
        .filter(|&(i, _)| mask >> i & 1 == 1)
        .fold(0, |acc, (_, &j)| acc | 1 << j)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..n {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

/// One Kripke model per isomorphism class, so that comparing all points of
/// the representatives compares all points of all models.
pub fn kripke_up_to_iso(models: Vec<TModel>) -> Vec<TModel> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for m in models {
        let n = m.coalg.len();
        let key = |perm: &[usize]| {
            let mut succ = vec![0u64; n];
            for (s, e) in m.coalg.iter().enumerate() {
                let Elem::Set(x) = e else {
                    panic!("Kripke models only")
                };
                succ[perm[s]] = permute_mask(*x, perm);
            }
            let val: Vec<u64> = m
                .valuation
                .values()
                .map(|&v| permute_mask(v, perm))
                .collect();
            (succ, val)
        };
        let canon = permutations(n)
            .iter()
            .map(|p| key(p))
            .min()
            .expect("a permutation");
        if seen.insert(canon) {
            out.push(m);
        }
    }
    out
}

/// A disjunctive powerset automaton: every transition is a disjunction of
/// `nabla` over sets of states (possibly empty, i.e. false).
pub fn random_disjunctive_automaton(rng: &mut impl Rng, n: usize, letters: &[&str]) -> Automaton {
    let mut a = Automaton::new(Functor::Powerset, letters, n).expect("automaton");
    let mut rows = Vec::new();
    for s in 0..n {
        a.priority[s] = rng.gen_range(0..4);
        let row: Vec<Dj> = (0..a.colors())
            .map(|_| {
                let k = rng.gen_range(0..=2);
                Dj((0..k)
                    .map(|_| {
                        let mask = rng.gen_range(0..1u32 << n);
                        DjTerm::Nabla(
                            (0..n)
                                .filter(|b| mask >> b & 1 == 1)
                                .map(Var::Index)
                                .collect(),
                        )
                    })
                    .collect())
            })
            .collect();
        a.delta[s] = row.iter().map(Dj::to_formula).collect();
        rows.push(row);
    }
    a.basis = Some(rows);
    a.check().expect("well formed");
    a
}
