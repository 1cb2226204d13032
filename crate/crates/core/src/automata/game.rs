//! The acceptance game of an automaton on a model, strong acceptance and the
//! pre-image construction for disjunctive automata.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::bases::{mass, CoverBranch, CoverSearch};
use crate::error::{invalid, resource, Error, Result};
use crate::functors::{bits, full, Caps, Elem, Functor};
use crate::games::{check_strategy, solve, ParityGame, Player, Solution};
use crate::logic::{Bool, OneStep, OneStepModel};
use crate::var::Var;

use super::{Automaton, TModel};

/// A marking `S -> P(Var)`, listing only points with a nonempty set.
pub type Marking = BTreeMap<usize, BTreeSet<Var>>;

const MAX_MARKINGS: usize = 1 << 14;
const MAX_TUPLES: u64 = 1 << 20;

fn below(m1: &Marking, m2: &Marking) -> bool {
    m1.iter()
        .all(|(t, s)| m2.get(t).is_some_and(|x| s.is_subset(x)))
}

fn minimize(mut ms: Vec<Marking>) -> Vec<Marking> {
    ms.sort_by_key(|m| (m.values().map(BTreeSet::len).sum::<usize>(), m.clone()));
    ms.dedup();
    let mut out: Vec<Marking> = Vec::new();
    for m in ms {
        if !out.iter().any(|k| below(k, &m)) {
            out.push(m);
        }
    }
    out
}

fn union(m1: &Marking, m2: &Marking) -> Marking {
    let mut out = m1.clone();
    for (t, s) in m2 {
        out.entry(*t).or_default().extend(s.iter().cloned());
    }
    out
}

fn too_many(n: usize) -> Result<()> {
    if n > MAX_MARKINGS {
        return Err(resource(format!(
            "more than {MAX_MARKINGS} minimal markings for one transition"
        )));
    }
    Ok(())
}

/// The markings of the carrier (size `n`) that are minimal, under pointwise
/// inclusion, among those making the positive formula `alpha` true at `e`.
/// Only points in the support of `e` are ever marked.
pub fn minimal_markings(f: &Functor, alpha: &OneStep, e: &Elem, n: usize) -> Result<Vec<Marking>> {
    let support: Vec<usize> = bits(f.support(e)).collect();
    markings_rec(f, alpha, e, n, &support)
}

fn markings_rec(
    f: &Functor,
    alpha: &OneStep,
    e: &Elem,
    n: usize,
    support: &[usize],
) -> Result<Vec<Marking>> {
    Ok(match alpha {
        OneStep::Top => vec![Marking::new()],
        OneStep::Bot => vec![],
        OneStep::Or(xs) => {
            let mut acc = Vec::new();
            for x in xs {
                acc.extend(markings_rec(f, x, e, n, support)?);
                too_many(acc.len())?;
            }
            minimize(acc)
        }
        OneStep::And(xs) => {
            let mut acc = vec![Marking::new()];
            for x in xs {
                let ms = markings_rec(f, x, e, n, support)?;
                too_many(acc.len().saturating_mul(ms.len()))?;
                let mut next = Vec::with_capacity(acc.len() * ms.len());
                for a in &acc {
                    for m in &ms {
                        next.push(union(a, m));
                    }
                }
                acc = minimize(next);
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        OneStep::Modal(l, args) => {
            let k = support.len();
            let width = k * args.len();
            if width >= 64 || 1u64 << width > MAX_TUPLES {
                return Err(resource(format!(
                    "{} argument sets over a support of {k} points",
                    args.len()
                )));
            }
            // tuple = args.len() blocks of k bits; block i is the extension of argument i
            let expand = |tuple: u64, i: usize| -> u64 {
                let block = tuple >> (i * k) & full(k);
                bits(block).fold(0, |acc, j| acc | 1 << support[j])
            };
            let sat = |tuple: u64| -> Result<bool> {
                let masks: Vec<u64> = (0..args.len()).map(|i| expand(tuple, i)).collect();
                f.eval_lifting(l, &masks, e, n)
            };
            let mut out = Vec::new();
            for tuple in 0..1u64 << width {
                if !sat(tuple)? {
                    continue;
                }
                let mut minimal = true;
                for j in bits(tuple) {
                    if sat(tuple & !(1 << j))? {
                        minimal = false;
                        break;
                    }
                }
                if !minimal {
                    continue;
                }
                let mut acc = vec![Marking::new()];
                for (j, &t) in support.iter().enumerate() {
                    let needed: Vec<Bool> = (0..args.len())
                        .filter(|i| tuple >> (i * k + j) & 1 == 1)
                        .map(|i| args[i].clone())
                        .collect();
                    if needed.is_empty() {
                        continue;
                    }
                    let terms = Bool::and(needed).minimal_terms()?;
                    let mut next = Vec::new();
                    for a in &acc {
                        for term in &terms {
                            let mut m = a.clone();
                            if !term.is_empty() {
                                m.insert(t, term.clone());
                            }
                            next.push(m);
                        }
                    }
                    too_many(next.len())?;
                    acc = next;
                }
                out.extend(acc);
                too_many(out.len())?;
            }
            minimize(out)
        }
        OneStep::Not(_) => return Err(Error::NotPositive(alpha.to_string())),
    })
}

/// The acceptance game: positions `(a, s)` owned by Exists come first (at
/// index `a * |S| + s`), followed by the marking positions owned by Forall.
#[derive(Clone, Debug)]
pub struct AcceptanceGame {
    pub game: ParityGame,
    pub states: usize,
    pub points: usize,
    /// Marking of the Forall position `states * points + i`.
    pub markings: Vec<Marking>,
}

impl AcceptanceGame {
    pub fn position(&self, a: usize, s: usize) -> usize {
        a * self.points + s
    }

    pub fn marking_at(&self, pos: usize) -> Option<&Marking> {
        pos.checked_sub(self.states * self.points)
            .and_then(|i| self.markings.get(i))
    }
}

fn check_pair(aut: &Automaton, model: &TModel) -> Result<()> {
    if aut.functor != model.functor {
        return Err(invalid(format!(
            "automaton over {} run on a model over {}",
            aut.functor, model.functor
        )));
    }
    model.check()
}

/// Build the acceptance game. Exists' moves are the minimal markings (as
/// state variables) satisfying `Theta(a, colour(s))` at `sigma(s)`.
pub fn acceptance_game(aut: &Automaton, model: &TModel) -> Result<AcceptanceGame> {
    check_pair(aut, model)?;
    let (na, ns) = (aut.len(), model.len());
    let colors: Vec<usize> = (0..ns)
        .map(|s| aut.color_of(|p| model.holds(p, s)))
        .collect();
    let mut game = ParityGame::new();
    for a in 0..na {
        for _ in 0..ns {
            game.add_position(Player::Exists, aut.priority[a]);
        }
    }
    let mut markings: Vec<Marking> = Vec::new();
    let mut marking_pos: HashMap<Marking, usize> = HashMap::new();
    let mut cache: HashMap<(usize, usize, &Elem), Vec<usize>> = HashMap::new();
    for a in 0..na {
        for s in 0..ns {
            let e = &model.coalg[s];
            let key = (a, colors[s], e);
            if !cache.contains_key(&key) {
                let ms = minimal_markings(&aut.functor, &aut.delta[a][colors[s]], e, ns)?;
                let mut ids = Vec::with_capacity(ms.len());
                for m in ms {
                    let id = *marking_pos.entry(m.clone()).or_insert_with(|| {
                        markings.push(m);
                        game.add_position(Player::Forall, 0)
                    });
                    ids.push(id);
                }
                cache.insert(key, ids);
            }
            let from = a * ns + s;
            for &id in &cache[&key] {
                game.add_move(from, id);
            }
        }
    }
    let base = na * ns;
    for (i, m) in markings.iter().enumerate() {
        for (&t, vs) in m {
            for v in vs {
                let b = v
                    .as_index()
                    .filter(|&b| b < na)
                    .ok_or_else(|| invalid(format!("`{v}` is not a state")))?;
                game.add_move(base + i, b * ns + t);
            }
        }
    }
    Ok(AcceptanceGame {
        game,
        states: na,
        points: ns,
        markings,
    })
}

#[derive(Clone, Copy, Debug)]
enum Target {
    Local(usize),
    State(usize, usize),
}

/// The game positions for one transition at one successor element; position
/// 0 is the root.
#[derive(Debug, Default)]
struct Fragment {
    owner: Vec<Player>,
    moves: Vec<Vec<Target>>,
}

impl Fragment {
    fn add(&mut self, owner: Player) -> usize {
        self.owner.push(owner);
        self.moves.push(Vec::new());
        self.owner.len() - 1
    }

    /// Exists picks a disjunct or a minimal marking of a modal atom, Forall
    /// picks a conjunct or a marked pair.
    fn unfold(
        &mut self,
        f: &Functor,
        alpha: &OneStep,
        e: &Elem,
        ns: usize,
        support: &[usize],
    ) -> Result<usize> {
        Ok(match alpha {
            OneStep::Top => self.add(Player::Forall),
            OneStep::Bot => self.add(Player::Exists),
            OneStep::And(xs) | OneStep::Or(xs) => {
                let owner = if matches!(alpha, OneStep::And(_)) {
                    Player::Forall
                } else {
                    Player::Exists
                };
                let id = self.add(owner);
                for x in xs {
                    let child = self.unfold(f, x, e, ns, support)?;
                    self.moves[id].push(Target::Local(child));
                }
                id
            }
            OneStep::Modal(..) => {
                let id = self.add(Player::Exists);
                for m in markings_rec(f, alpha, e, ns, support)? {
                    let mp = self.add(Player::Forall);
                    self.moves[id].push(Target::Local(mp));
                    for (&t, vs) in &m {
                        for v in vs {
                            let b = v
                                .as_index()
                                .ok_or_else(|| invalid(format!("`{v}` is not a state")))?;
                            self.moves[mp].push(Target::State(b, t));
                        }
                    }
                }
                id
            }
            OneStep::Not(_) => return Err(Error::NotPositive(alpha.to_string())),
        })
    }
}

/// Evaluates one automaton on many models. The game unfolds each transition
/// along its boolean structure, so only modal atoms become minimal markings,
/// and the unfoldings are shared between models with the same carrier size.
/// The winner is the same as in [`acceptance_game`].
#[derive(Debug)]
pub struct Acceptor<'a> {
    aut: &'a Automaton,
    fragments: HashMap<(usize, usize, Elem, usize), Fragment>,
}

impl<'a> Acceptor<'a> {
    pub fn new(aut: &'a Automaton) -> Self {
        Acceptor {
            aut,
            fragments: HashMap::new(),
        }
    }

    /// For every point `s`, whether Exists wins `(a_I, s)`.
    pub fn accepting_points(&mut self, model: &TModel) -> Result<Vec<bool>> {
        let aut = self.aut;
        check_pair(aut, model)?;
        let (na, ns) = (aut.len(), model.len());
        let mut game = ParityGame::new();
        for a in 0..na {
            for _ in 0..ns {
                game.add_position(Player::Exists, aut.priority[a]);
            }
        }
        for s in 0..ns {
            let color = aut.color_of(|p| model.holds(p, s));
            let e = &model.coalg[s];
            for a in 0..na {
                let key = (a, color, e.clone(), ns);
                if !self.fragments.contains_key(&key) {
                    let support: Vec<usize> = bits(aut.functor.support(e)).collect();
                    let mut frag = Fragment::default();
                    frag.unfold(&aut.functor, &aut.delta[a][color], e, ns, &support)?;
                    self.fragments.insert(key.clone(), frag);
                }
                let frag = &self.fragments[&key];
                let base = game.len();
                for &owner in &frag.owner {
                    game.add_position(owner, 0);
                }
                game.add_move(a * ns + s, base);
                for (i, targets) in frag.moves.iter().enumerate() {
                    for &t in targets {
                        let to = match t {
                            Target::Local(j) => base + j,
                            Target::State(b, t) if b < na => b * ns + t,
                            Target::State(b, _) => {
                                return Err(invalid(format!("`#{b}` is not a state")))
                            }
                        };
                        game.add_move(base + i, to);
                    }
                }
            }
        }
        let sol = solve(&game);
        Ok((0..ns)
            .map(|s| sol.winner[aut.initial * ns + s] == Player::Exists)
            .collect())
    }
}

/// For every point `s`, whether Exists wins `(a_I, s)`.
pub fn accepting_points(aut: &Automaton, model: &TModel) -> Result<Vec<bool>> {
    Acceptor::new(aut).accepting_points(model)
}

pub fn accepts(aut: &Automaton, model: &TModel) -> Result<bool> {
    Ok(accepting_points(aut, model)?[model.point])
}

const SEARCH_BUDGET: usize = 1 << 20;

struct Dividing<'a> {
    g: &'a AcceptanceGame,
    win: Vec<bool>,
    assign: Vec<Option<usize>>,
    choice: Vec<Option<usize>>,
    order: Vec<usize>,
    budget: usize,
}

impl Dividing<'_> {
    fn go(&mut self) -> Result<bool> {
        if self.budget == 0 {
            return Err(resource(format!(
                "dividing strategy search exceeded {SEARCH_BUDGET} steps"
            )));
        }
        self.budget -= 1;
        let Some(&t) = self.order.iter().find(|&&t| self.choice[t].is_none()) else {
            return Ok(self.wins());
        };
        let a = self.assign[t].expect("ordered points are assigned");
        let pos = self.g.position(a, t);
        for &mp in &self.g.game.moves[pos] {
            if !self.win[mp] {
                continue;
            }
            let m = self.g.marking_at(mp).expect("marking position");
            let single: Option<Vec<(usize, usize)>> = m
                .iter()
                .map(|(&u, vs)| {
                    if vs.len() == 1 {
                        vs.iter().next().and_then(Var::as_index).map(|b| (u, b))
                    } else {
                        None
                    }
                })
                .collect();
            let Some(single) = single else { continue };
            if single
                .iter()
                .any(|&(u, b)| self.assign[u].is_some_and(|x| x != b))
            {
                continue;
            }
            let mut added = Vec::new();
            for &(u, b) in &single {
                if self.assign[u].is_none() {
                    self.assign[u] = Some(b);
                    self.order.push(u);
                    added.push(u);
                }
            }
            self.choice[t] = Some(mp);
            if self.go()? {
                return Ok(true);
            }
            self.choice[t] = None;
            for u in &added {
                self.assign[*u] = None;
            }
            self.order.truncate(self.order.len() - added.len());
        }
        Ok(false)
    }

    fn strategy(&self) -> (Vec<Option<usize>>, Vec<bool>) {
        let n = self.g.game.len();
        let mut strategy = vec![None; n];
        let mut region = vec![false; n];
        for &t in &self.order {
            let pos = self.g.position(self.assign[t].expect("assigned"), t);
            region[pos] = true;
            if let Some(mp) = self.choice[t] {
                strategy[pos] = Some(mp);
                region[mp] = true;
            }
        }
        (strategy, region)
    }

    fn wins(&self) -> bool {
        let (strategy, region) = self.strategy();
        check_strategy(&self.g.game, Player::Exists, &strategy, &region).is_ok()
    }
}

/// A positional winning strategy for Exists from `(a_I, point)` under which
/// every point is reached with at most one state, as the state assigned to
/// each reached point; `None` if there is none.
pub fn dividing_strategy(aut: &Automaton, model: &TModel) -> Result<Option<Vec<Option<usize>>>> {
    let g = acceptance_game(aut, model)?;
    let sol = solve(&g.game);
    if sol.winner[g.position(aut.initial, model.point)] != Player::Exists {
        return Ok(None);
    }
    let ns = model.len();
    let mut d = Dividing {
        g: &g,
        win: sol.region(Player::Exists),
        assign: vec![None; ns],
        choice: vec![None; ns],
        order: vec![model.point],
        budget: SEARCH_BUDGET,
    };
    d.assign[model.point] = Some(aut.initial);
    Ok(if d.go()? {
        Some(d.assign.clone())
    } else {
        None
    })
}

/// Acceptance by a dividing winning strategy (searched among positional ones).
pub fn strongly_accepts(aut: &Automaton, model: &TModel) -> Result<bool> {
    Ok(dividing_strategy(aut, model)?.is_some())
}

/// A pre-image of a model along a winning strategy: nodes `0..` with
/// `depth[x] = Some(d)` form the unravelled tree prefix (node 0 is the root),
/// the others are folded copies keyed by (state, point).
#[derive(Clone, Debug)]
pub struct PreimageCover {
    pub model: TModel,
    /// Coalgebra morphism onto the original model.
    pub hom: Vec<usize>,
    /// The automaton state assigned to each node, if any.
    pub states: Vec<Option<usize>>,
    /// Which kind of cover was used at each node carrying a state.
    pub branches: Vec<Option<CoverBranch>>,
    pub depth: Vec<Option<usize>>,
}

impl PreimageCover {
    /// Number of nodes in the unravelled prefix.
    pub fn prefix_len(&self) -> usize {
        self.depth.iter().filter(|d| d.is_some()).count()
    }
}

struct LocalCover {
    elem: Elem,
    map: Vec<usize>,
    states: Vec<Option<usize>>,
    branch: CoverBranch,
}

/// Unravel `model` along a positional winning strategy of the acceptance
/// game, replacing every step by a dividing cover of the strategy's marking.
/// The tree prefix has the given depth; below it, nodes are folded by
/// (state, point), which keeps the result finite.
pub fn preimage_cover(
    aut: &Automaton,
    model: &TModel,
    depth: usize,
    caps: &Caps,
) -> Result<PreimageCover> {
    let g = acceptance_game(aut, model)?;
    let sol: Solution = solve(&g.game);
    if sol.winner[g.position(aut.initial, model.point)] != Player::Exists {
        return Err(invalid("the automaton does not accept the model"));
    }
    let f = &aut.functor;
    let ns = model.len();
    let colors: Vec<usize> = (0..ns)
        .map(|s| aut.color_of(|p| model.holds(p, s)))
        .collect();
    let mut covers: HashMap<(usize, usize), LocalCover> = HashMap::new();

    let mut point = vec![model.point];
    let mut states = vec![Some(aut.initial)];
    let mut depths = vec![Some(0usize)];
    let mut folded: HashMap<(Option<usize>, usize), usize> = HashMap::new();
    let mut coalg: Vec<Elem> = Vec::new();
    let mut branches = Vec::new();
    let mut x = 0;
    while x < point.len() {
        let s = point[x];
        let (children, elem_src, map_src, branch): (
            Vec<(Option<usize>, usize)>,
            Elem,
            Vec<usize>,
            Option<CoverBranch>,
        ) = match states[x] {
            Some(a) => {
                if let std::collections::hash_map::Entry::Vacant(v) = covers.entry((a, s)) {
                    let lc = local_cover(aut, &g, &sol, model, &colors, a, s, caps).map_err(
                        |e| match e {
                            Error::NoCover(msg) => Error::NoCover(format!("node {x}: {msg}")),
                            e => e,
                        },
                    )?;
                    v.insert(lc);
                }
                let lc = &covers[&(a, s)];
                let kids = lc
                    .map
                    .iter()
                    .zip(&lc.states)
                    .map(|(&t, &b)| (b, t))
                    .collect();
                (
                    kids,
                    lc.elem.clone(),
                    (0..lc.map.len()).collect(),
                    Some(lc.branch),
                )
            }
            None => {
                let e = &model.coalg[s];
                let supp: Vec<usize> = bits(f.support(e)).collect();
                let mut idx = vec![0; ns];
                for (i, &t) in supp.iter().enumerate() {
                    idx[t] = i;
                }
                (
                    supp.iter().map(|&t| (None, t)).collect(),
                    e.clone(),
                    idx,
                    None,
                )
            }
        };
        let mut ids = Vec::with_capacity(children.len());
        for (b, t) in children {
            let id = match depths[x] {
                Some(d) if d < depth => {
                    point.push(t);
                    states.push(b);
                    depths.push(Some(d + 1));
                    point.len() - 1
                }
                _ => *folded.entry((b, t)).or_insert_with(|| {
                    point.push(t);
                    states.push(b);
                    depths.push(None);
                    point.len() - 1
                }),
            };
            ids.push(id);
        }
        if point.len() > crate::functors::MAX_CARRIER {
            return Err(resource(format!(
                "pre-image exceeds {} nodes; lower the depth",
                crate::functors::MAX_CARRIER
            )));
        }
        let target: Vec<usize> = map_src
            .iter()
            .map(|&i| ids.get(i).copied().unwrap_or(0))
            .collect();
        coalg.push(f.map(&target, &elem_src));
        branches.push(branch);
        x += 1;
    }
    let valuation = model
        .valuation
        .iter()
        .map(|(p, m)| {
            (
                p.clone(),
                point
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| m >> s & 1 == 1)
                    .fold(0u64, |acc, (x, _)| acc | 1 << x),
            )
        })
        .collect();
    Ok(PreimageCover {
        model: TModel {
            functor: f.clone(),
            coalg,
            valuation,
            point: 0,
        },
        hom: point,
        states,
        branches,
        depth: depths,
    })
}

#[allow(clippy::too_many_arguments)]
fn local_cover(
    aut: &Automaton,
    g: &AcceptanceGame,
    sol: &Solution,
    model: &TModel,
    colors: &[usize],
    a: usize,
    s: usize,
    caps: &Caps,
) -> Result<LocalCover> {
    let f = &aut.functor;
    let ns = model.len();
    let mp = sol.strategy[g.position(a, s)]
        .ok_or_else(|| invalid(format!("no winning move at state {a}, point {s}")))?;
    let marking = g.marking_at(mp).expect("marking position");
    let mut marks = vec![BTreeSet::new(); ns];
    for (&t, vs) in marking {
        marks[t] = vs.clone();
    }
    let alpha = &aut.delta[a][colors[s]];
    let e = &model.coalg[s];
    let one = OneStepModel::new(ns, e.clone(), marks);
    let cover = CoverSearch::new(f, alpha, caps, mass(e))?
        .search(&one)?
        .ok_or_else(|| Error::NoCover(format!("state {a} at point {s} for {alpha}")))?;
    // keep only the cover points the element actually uses
    let used: Vec<usize> = bits(f.support(&cover.elem)).collect();
    let mut compact = vec![0; cover.size];
    for (i, &u) in used.iter().enumerate() {
        compact[u] = i;
    }
    Ok(LocalCover {
        elem: f.map(&compact, &cover.elem),
        map: used.iter().map(|&u| cover.map[u]).collect(),
        states: used
            .iter()
            .map(|&u| cover.marking[u].iter().next().and_then(Var::as_index))
            .collect(),
        branch: cover.branch,
    })
}
