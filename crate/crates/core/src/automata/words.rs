//! Stream automata for the "no bad trace" condition.
//!
//! Letters are binary relations over the states `0..n` of an automaton,
//! encoded as bitmasks with bit `a * n + b` for the pair `(a, b)`.
//! [`bad_trace_nba`] guesses a trace whose maximal recurring priority is
//! odd; [`determinize_nbt`] turns it into a deterministic parity automaton for
//! the complement, via a Buechi automaton and Safra trees with Piterman's
//! compact naming.

use std::collections::HashMap;

use crate::error::{resource, Result};
use crate::functors::{bits, full};

/// Largest automaton whose relations fit a letter bitmask.
pub const MAX_TRACE_STATES: usize = 8;

/// The nondeterministic parity automaton of bad traces: states `A`, all
/// initial, `a -R-> b` iff `R a b`, priorities `Omega`, accepting when the
/// largest recurring priority is odd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadTraceNba {
    pub priority: Vec<u32>,
}

pub fn bad_trace_nba(priority: &[u32]) -> BadTraceNba {
    assert!(
        priority.len() <= MAX_TRACE_STATES,
        "relations over {} states do not fit a letter",
        priority.len()
    );
    BadTraceNba {
        priority: priority.to_vec(),
    }
}

impl BadTraceNba {
    pub fn len(&self) -> usize {
        self.priority.len()
    }

    pub fn is_empty(&self) -> bool {
        self.priority.is_empty()
    }

    /// Successors of `a` on the letter `r`.
    pub fn successors(&self, a: usize, r: u64) -> u64 {
        let n = self.len();
        r >> (a * n) & full(n)
    }
}

/// Buechi states `(a, None)` (waiting) and `(a, Some(k))` (committed to the
/// odd priority `k` being the largest seen from now on).
struct Buechi {
    states: Vec<(usize, Option<u32>)>,
    accepting: u64,
    initial: u64,
}

impl Buechi {
    fn new(nba: &BadTraceNba) -> Buechi {
        let mut odd: Vec<u32> = nba
            .priority
            .iter()
            .copied()
            .filter(|p| p % 2 == 1)
            .collect();
        odd.sort_unstable();
        odd.dedup();
        let mut states = Vec::new();
        for a in 0..nba.len() {
            states.push((a, None));
            for &k in &odd {
                if nba.priority[a] <= k {
                    states.push((a, Some(k)));
                }
            }
        }
        let accepting = states
            .iter()
            .enumerate()
            .filter(|(_, (a, k))| *k == Some(nba.priority[*a]))
            .fold(0, |acc, (i, _)| acc | 1 << i);
        let initial = full(states.len());
        Buechi {
            states,
            accepting,
            initial,
        }
    }

    fn index(&self, q: (usize, Option<u32>)) -> Option<usize> {
        self.states.iter().position(|&x| x == q)
    }

    fn post(&self, nba: &BadTraceNba, set: u64, r: u64) -> u64 {
        let mut out = 0;
        for i in bits(set) {
            let (a, k) = self.states[i];
            for b in bits(nba.successors(a, r)) {
                match k {
                    // wait, or commit to any k the target allows
                    None => {
                        for (j, &(c, _)) in self.states.iter().enumerate() {
                            if c == b {
                                out |= 1 << j;
                            }
                        }
                    }
                    Some(k) => {
                        if let Some(j) = self.index((b, Some(k))) {
                            out |= 1 << j;
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Node {
    name: u32,
    label: u64,
    children: Vec<Node>,
}

impl Node {
    fn grow(&self, post: &dyn Fn(u64) -> u64, acc: u64) -> Node {
        let mut children: Vec<Node> = self.children.iter().map(|c| c.grow(post, acc)).collect();
        if self.label & acc != 0 {
            children.push(Node {
                name: 0,
                label: post(self.label & acc),
                children: vec![],
            });
        }
        Node {
            name: self.name,
            label: post(self.label),
            children,
        }
    }

    fn restrict(&mut self, mask: u64) {
        self.label &= mask;
        for c in &mut self.children {
            c.restrict(mask);
        }
    }

    fn horizontal(&mut self) {
        let mut seen = 0;
        for c in &mut self.children {
            c.restrict(!seen);
            seen |= c.label;
        }
        for c in &mut self.children {
            c.horizontal();
        }
    }

    fn names(&self, out: &mut Vec<u32>) {
        if self.name != 0 {
            out.push(self.name);
        }
        for c in &self.children {
            c.names(out);
        }
    }

    fn prune(&mut self, removed: &mut Vec<u32>) {
        let mut kept = Vec::new();
        for mut c in std::mem::take(&mut self.children) {
            if c.label == 0 {
                c.names(removed);
            } else {
                c.prune(removed);
                kept.push(c);
            }
        }
        self.children = kept;
    }

    fn vertical(&mut self, removed: &mut Vec<u32>, green: &mut Vec<u32>) {
        let union = self.children.iter().fold(0, |acc, c| acc | c.label);
        if !self.children.is_empty() && union == self.label {
            green.push(self.name);
            for c in std::mem::take(&mut self.children) {
                c.names(removed);
            }
        } else {
            for c in &mut self.children {
                c.vertical(removed, green);
            }
        }
    }

    fn rename(&mut self, old: &[u32], fresh: &mut u32) {
        if self.name == 0 {
            *fresh += 1;
            self.name = *fresh;
        } else {
            self.name = old
                .iter()
                .position(|&x| x == self.name)
                .expect("surviving name") as u32
                + 1;
        }
        for c in &mut self.children {
            c.rename(old, fresh);
        }
    }
}

/// One Safra step; returns the new tree and the min-parity priority of the
/// step (even: good event at that name; odd: a node was removed).
fn safra_step(
    tree: &Option<Node>,
    post: &dyn Fn(u64) -> u64,
    acc: u64,
    m: u32,
) -> (Option<Node>, u32) {
    let Some(t) = tree else {
        return (None, 2 * m + 1);
    };
    let mut t = t.grow(post, acc);
    t.horizontal();
    let mut removed = Vec::new();
    let mut green = Vec::new();
    let mut root = if t.label == 0 {
        t.names(&mut removed);
        None
    } else {
        t.prune(&mut removed);
        t.vertical(&mut removed, &mut green);
        Some(t)
    };
    let f = removed.iter().copied().min();
    let e = green.iter().copied().filter(|&x| x != 0).min();
    let p = match (e, f) {
        (Some(e), Some(f)) if e < f => 2 * e,
        (Some(e), None) => 2 * e,
        (_, Some(f)) => 2 * f - 1,
        (None, None) => 2 * m + 1,
    };
    if let Some(r) = &mut root {
        let mut old = Vec::new();
        r.names(&mut old);
        old.sort_unstable();
        let mut fresh = old.len() as u32;
        r.rename(&old, &mut fresh);
    }
    (root, p)
}

/// A deterministic parity automaton (max-parity, even accepts) over
/// relation letters, recognising the streams without a bad trace. States
/// are explored lazily; state 0 is initial.
pub struct StreamParityAutomaton {
    nba: BadTraceNba,
    buechi: Buechi,
    states: Vec<(Option<Node>, u32)>,
    index: HashMap<(Option<Node>, u32), usize>,
    delta: HashMap<(usize, u64), usize>,
    pub max_states: usize,
}

pub fn determinize_nbt(nba: &BadTraceNba) -> StreamParityAutomaton {
    let buechi = Buechi::new(nba);
    assert!(buechi.states.len() <= 64, "Buechi automaton too large");
    let m = buechi.states.len() as u32;
    let root = (buechi.initial != 0).then(|| Node {
        name: 1,
        label: buechi.initial,
        children: vec![],
    });
    let init = (root, 2 * m + 1);
    StreamParityAutomaton {
        nba: nba.clone(),
        buechi,
        states: vec![init.clone()],
        index: HashMap::from([(init, 0)]),
        delta: HashMap::new(),
        max_states: 1 << 16,
    }
}

impl StreamParityAutomaton {
    pub fn initial(&self) -> usize {
        0
    }

    /// Number of states explored so far.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn m(&self) -> u32 {
        self.buechi.states.len() as u32
    }

    pub fn priority(&self, z: usize) -> u32 {
        2 * self.m() + 3 - self.states[z].1
    }

    pub fn step(&mut self, z: usize, r: u64) -> Result<usize> {
        if let Some(&w) = self.delta.get(&(z, r)) {
            return Ok(w);
        }
        let (nba, b) = (&self.nba, &self.buechi);
        let post = |set: u64| b.post(nba, set, r);
        let (tree, p) = safra_step(&self.states[z].0, &post, b.accepting, self.m());
        let key = (tree, p);
        let w = match self.index.get(&key) {
            Some(&w) => w,
            None => {
                if self.states.len() >= self.max_states {
                    return Err(resource(format!(
                        "determinised automaton exceeds {} states",
                        self.max_states
                    )));
                }
                self.states.push(key.clone());
                self.index.insert(key, self.states.len() - 1);
                self.states.len() - 1
            }
        };
        self.delta.insert((z, r), w);
        Ok(w)
    }

    /// Verdict on the stream `u v v v ...` (`v` nonempty).
    pub fn accepts_lasso(&mut self, u: &[u64], v: &[u64]) -> Result<bool> {
        assert!(!v.is_empty(), "the loop of a lasso must be nonempty");
        let mut z = self.initial();
        for &r in u {
            z = self.step(z, r)?;
        }
        let mut starts: HashMap<usize, usize> = HashMap::new();
        let mut maxima: Vec<u32> = Vec::new();
        loop {
            if let Some(&i) = starts.get(&z) {
                let top = maxima[i..].iter().copied().max().expect("nonempty cycle");
                return Ok(top % 2 == 0);
            }
            starts.insert(z, maxima.len());
            let mut top = 0;
            for &r in v {
                z = self.step(z, r)?;
                top = top.max(self.priority(z));
            }
            maxima.push(top);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_single_state_accepts_everything() {
        let mut d = determinize_nbt(&bad_trace_nba(&[0]));
        assert!(d.accepts_lasso(&[], &[1]).unwrap());
        assert!(d.accepts_lasso(&[0], &[1, 0]).unwrap());
    }

    #[test]
    fn odd_loop_is_rejected() {
        let mut d = determinize_nbt(&bad_trace_nba(&[1]));
        assert!(!d.accepts_lasso(&[], &[1]).unwrap());
        // the empty relation kills every trace
        assert!(d.accepts_lasso(&[1], &[0]).unwrap());
        assert!(d.accepts_lasso(&[], &[1, 0]).unwrap());
    }

    #[test]
    fn even_recurrence_dominates() {
        // states 0 (priority 1) and 1 (priority 2); the relation keeps 0 -> 1 -> 0
        let n = 2;
        let pair = |a: usize, b: usize| 1u64 << (a * n + b);
        let mut d = determinize_nbt(&bad_trace_nba(&[1, 2]));
        assert!(d.accepts_lasso(&[], &[pair(0, 1) | pair(1, 0)]).unwrap());
        assert!(!d
            .accepts_lasso(&[], &[pair(0, 1) | pair(1, 0) | pair(0, 0)])
            .unwrap());
    }
}
