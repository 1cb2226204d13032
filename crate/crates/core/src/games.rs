//! Parity games (max-parity: the highest priority seen infinitely often
//! decides, even for [`Player::Exists`]) and Zielonka's recursive solver.
//!
//! A player with no move at a position they own loses the play.

use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Exists,
    Forall,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Exists => Player::Forall,
            Player::Forall => Player::Exists,
        }
    }

    /// The player favoured by a priority.
    pub fn of_priority(p: u32) -> Player {
        if p % 2 == 0 {
            Player::Exists
        } else {
            Player::Forall
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub moves: Vec<Vec<usize>>,
}

impl ParityGame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_position(&mut self, owner: Player, priority: u32) -> usize {
        self.owner.push(owner);
        self.priority.push(priority);
        self.moves.push(Vec::new());
        self.owner.len() - 1
    }

    pub fn add_move(&mut self, from: usize, to: usize) {
        if !self.moves[from].contains(&to) {
            self.moves[from].push(to);
        }
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    /// Debug dump: one line per position `id owner priority succ,succ`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for v in 0..self.len() {
            let owner = match self.owner[v] {
                Player::Exists => "E",
                Player::Forall => "A",
            };
            let succ: Vec<String> = self.moves[v].iter().map(|w| w.to_string()).collect();
            let _ = writeln!(s, "{v} {owner} {} {}", self.priority[v], succ.join(","));
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub winner: Vec<Player>,
    /// For each position, the move chosen by its owner when the owner wins it.
    pub strategy: Vec<Option<usize>>,
}

impl Solution {
    pub fn region(&self, p: Player) -> Vec<bool> {
        self.winner.iter().map(|&w| w == p).collect()
    }
}

struct Arena {
    owner: Vec<Player>,
    priority: Vec<u32>,
    moves: Vec<Vec<usize>>,
    preds: Vec<Vec<usize>>,
}

/// Solve a parity game. Dead ends are first redirected to a sink won by the
/// opponent of their owner, so the recursion only sees total games.
pub fn solve(g: &ParityGame) -> Solution {
    let n = g.len();
    let mut owner = g.owner.clone();
    let mut priority = g.priority.clone();
    let mut moves = g.moves.clone();
    // sink n: won by Exists (priority 0); sink n+1: won by Forall (priority 1)
    owner.extend([Player::Exists, Player::Exists]);
    priority.extend([0, 1]);
    moves.push(vec![n]);
    moves.push(vec![n + 1]);
    for v in 0..n {
        if moves[v].is_empty() {
            moves[v].push(match owner[v] {
                Player::Exists => n + 1,
                Player::Forall => n,
            });
        }
    }
    let mut preds = vec![Vec::new(); n + 2];
    for (v, ws) in moves.iter().enumerate() {
        for &w in ws {
            preds[w].push(v);
        }
    }
    let arena = Arena {
        owner,
        priority,
        moves,
        preds,
    };
    let mut strategy = vec![None; n + 2];
    let alive = vec![true; n + 2];
    let (win_e, _) = zielonka(&arena, &alive, &mut strategy);
    let winner: Vec<Player> = (0..n)
        .map(|v| {
            if win_e[v] {
                Player::Exists
            } else {
                Player::Forall
            }
        })
        .collect();
    let strategy = (0..n)
        .map(|v| {
            if winner[v] == g.owner[v] {
                strategy[v].filter(|&w| w < n)
            } else {
                None
            }
        })
        .collect();
    Solution { winner, strategy }
}

/// Attractor of `target` for `p` inside `alive`; records attracting moves.
fn attractor(
    a: &Arena,
    alive: &[bool],
    target: &[bool],
    p: Player,
    strategy: &mut [Option<usize>],
) -> Vec<bool> {
    let n = a.owner.len();
    let mut attr = target.to_vec();
    let mut count: Vec<usize> = (0..n)
        .map(|v| a.moves[v].iter().filter(|&&w| alive[w]).count())
        .collect();
    let mut queue: Vec<usize> = (0..n).filter(|&v| attr[v]).collect();
    while let Some(w) = queue.pop() {
        for &v in &a.preds[w] {
            if !alive[v] || attr[v] {
                continue;
            }
            if a.owner[v] == p {
                attr[v] = true;
                strategy[v] = Some(w);
                queue.push(v);
            } else {
                count[v] -= 1;
                if count[v] == 0 {
                    attr[v] = true;
                    queue.push(v);
                }
            }
        }
    }
    attr
}

/// Returns the winning regions (Exists, Forall) of the subgame on `alive`.
fn zielonka(a: &Arena, alive: &[bool], strategy: &mut [Option<usize>]) -> (Vec<bool>, Vec<bool>) {
    let n = a.owner.len();
    let Some(d) = (0..n).filter(|&v| alive[v]).map(|v| a.priority[v]).max() else {
        return (vec![false; n], vec![false; n]);
    };
    let p = Player::of_priority(d);
    let top: Vec<bool> = (0..n).map(|v| alive[v] && a.priority[v] == d).collect();
    let attr = attractor(a, alive, &top, p, strategy);
    let rest: Vec<bool> = (0..n).map(|v| alive[v] && !attr[v]).collect();
    let (w1e, w1a) = zielonka(a, &rest, strategy);
    let w1_opp = if p == Player::Exists { &w1a } else { &w1e };
    if !w1_opp.iter().any(|&b| b) {
        for v in 0..n {
            if top[v] && a.owner[v] == p {
                strategy[v] = a.moves[v].iter().copied().find(|&w| alive[w]);
            }
        }
        let all = alive.to_vec();
        let none = vec![false; n];
        return if p == Player::Exists {
            (all, none)
        } else {
            (none, all)
        };
    }
    let b = attractor(a, alive, w1_opp, p.opponent(), strategy);
    let rest2: Vec<bool> = (0..n).map(|v| alive[v] && !b[v]).collect();
    let (w2e, w2a) = zielonka(a, &rest2, strategy);
    if p == Player::Exists {
        let wa = (0..n).map(|v| w2a[v] || b[v]).collect();
        (w2e, wa)
    } else {
        let we = (0..n).map(|v| w2e[v] || b[v]).collect();
        (we, w2a)
    }
}

/// Check that `strategy` wins every play from `region` for `player`: the
/// region must be closed under opponent moves and strategy moves, the player
/// never gets stuck, and no reachable cycle has a maximum priority favouring
/// the opponent.
pub fn check_strategy(
    g: &ParityGame,
    player: Player,
    strategy: &[Option<usize>],
    region: &[bool],
) -> Result<(), String> {
    let n = g.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| region[v]) {
        if g.owner[v] == player {
            let Some(w) = strategy[v] else {
                return Err(format!("no move chosen at position {v}"));
            };
            if !g.moves[v].contains(&w) {
                return Err(format!("illegal move {v} -> {w}"));
            }
            if !region[w] {
                return Err(format!("strategy leaves the region at {v} -> {w}"));
            }
            succ[v].push(w);
        } else {
            for &w in &g.moves[v] {
                if !region[w] {
                    return Err(format!("opponent escapes the region at {v} -> {w}"));
                }
                succ[v].push(w);
            }
        }
    }
    let bad: Vec<u32> = {
        let mut ps: Vec<u32> = (0..n)
            .filter(|&v| region[v])
            .map(|v| g.priority[v])
            .collect();
        ps.sort_unstable();
        ps.dedup();
        ps.into_iter()
            .filter(|&q| Player::of_priority(q) != player)
            .collect()
    };
    for q in bad {
        let keep: Vec<bool> = (0..n).map(|v| region[v] && g.priority[v] <= q).collect();
        let comp = scc(&succ, &keep);
        for v in (0..n).filter(|&v| keep[v] && g.priority[v] == q) {
            let cyclic = succ[v].contains(&v) || comp.iter().filter(|&&c| c == comp[v]).count() > 1;
            if cyclic {
                return Err(format!(
                    "losing cycle through position {v} with priority {q}"
                ));
            }
        }
    }
    Ok(())
}

pub fn verify_strategy(
    g: &ParityGame,
    player: Player,
    strategy: &[Option<usize>],
    region: &[bool],
) -> bool {
    check_strategy(g, player, strategy, region).is_ok()
}

/// Tarjan's strongly connected components on the induced subgraph `keep`;
/// returns a component id per position (`usize::MAX` outside `keep`).
pub(crate) fn scc(succ: &[Vec<usize>], keep: &[bool]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if !keep[root] || index[root] != usize::MAX {
            continue;
        }
        // iterative DFS: (node, next edge index)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if !keep[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_loop_even() {
        let mut g = ParityGame::new();
        let v = g.add_position(Player::Exists, 0);
        g.add_move(v, v);
        let s = solve(&g);
        assert_eq!(s.winner, vec![Player::Exists]);
        assert!(verify_strategy(&g, Player::Exists, &s.strategy, &[true]));
    }

    #[test]
    fn stuck_player_loses() {
        let mut g = ParityGame::new();
        g.add_position(Player::Exists, 0);
        g.add_position(Player::Forall, 1);
        let s = solve(&g);
        assert_eq!(s.winner, vec![Player::Forall, Player::Exists]);
    }

    #[test]
    fn strategy_into_own_dead_end_fails() {
        let mut g = ParityGame::new();
        let a = g.add_position(Player::Exists, 0);
        let b = g.add_position(Player::Exists, 0);
        g.add_move(a, b);
        let err = check_strategy(&g, Player::Exists, &[Some(b), None], &[true, true]).unwrap_err();
        assert!(err.contains("no move"));
    }

    #[test]
    fn odd_cycle_is_rejected() {
        let mut g = ParityGame::new();
        let a = g.add_position(Player::Forall, 1);
        let b = g.add_position(Player::Forall, 0);
        g.add_move(a, b);
        g.add_move(b, a);
        assert!(!verify_strategy(
            &g,
            Player::Exists,
            &[None, None],
            &[true, true]
        ));
        let s = solve(&g);
        assert_eq!(s.winner, vec![Player::Forall; 2]);
        assert!(verify_strategy(
            &g,
            Player::Forall,
            &s.strategy,
            &s.region(Player::Forall)
        ));
    }

    #[test]
    fn dump_lines() {
        let mut g = ParityGame::new();
        let a = g.add_position(Player::Exists, 2);
        g.add_move(a, a);
        assert_eq!(g.dump(), "0 E 2 0\n");
    }
}
