//! Acceptance through the vectorial fixpoint of the transition map, states of
//! priority `i` forming block `i` (greatest fixpoint for even `i`, least for
//! odd `i`, higher blocks outermost).

use crate::error::{invalid, Result};
use crate::functors::full;
use crate::logic::semantics::eval_masks;
use crate::var::Var;

use super::{Automaton, TModel};

const UP: u8 = 1;
const DOWN: u8 = 2;

struct Solver<'a> {
    aut: &'a Automaton,
    model: &'a TModel,
    colors: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    value: Vec<u64>,
}

impl Solver<'_> {
    fn step(&self, b: usize) -> Result<u64> {
        let (ns, all) = (self.model.len(), full(self.model.len()));
        let val = |v: &Var| {
            v.as_index()
                .and_then(|c| self.value.get(c).copied())
                .unwrap_or(0)
        };
        let mut mask = 0;
        for s in 0..ns {
            let alpha = &self.aut.delta[b][self.colors[s]];
            if eval_masks(
                &self.aut.functor,
                alpha,
                &self.model.coalg[s],
                ns,
                all,
                &val,
            )? {
                mask |= 1 << s;
            }
        }
        Ok(mask)
    }

    /// Solve block `i` and everything below it. `moved` holds the directions
    /// in which enclosing blocks changed since block `i` was last solved; a
    /// greatest fixpoint restarts only after an upward change, a least one
    /// only after a downward change.
    fn level(&mut self, i: usize, moved: u8) -> Result<()> {
        let block = self.blocks[i].clone();
        let (restart_on, own) = if i % 2 == 0 { (UP, DOWN) } else { (DOWN, UP) };
        let mut below = moved;
        if moved & restart_on != 0 {
            let start = if i % 2 == 0 {
                full(self.model.len())
            } else {
                0
            };
            for &b in &block {
                self.value[b] = start;
            }
            below |= restart_on;
        }
        loop {
            if i > 0 {
                self.level(i - 1, below)?;
            }
            let mut changed = false;
            for &b in &block {
                let next = self.step(b)?;
                changed |= next != self.value[b];
                self.value[b] = next;
            }
            if !changed {
                return Ok(());
            }
            below = own;
        }
    }
}

/// For every point `s`, whether the automaton accepts `(model, s)`, computed
/// without building the acceptance game. Agrees with [`super::accepting_points`].
pub fn fixpoint_points(aut: &Automaton, model: &TModel) -> Result<Vec<bool>> {
    if aut.functor != model.functor {
        return Err(invalid(format!(
            "automaton over {} run on a model over {}",
            aut.functor, model.functor
        )));
    }
    model.check()?;
    for row in &aut.delta {
        for alpha in row {
            if let Some(v) = alpha
                .vars()
                .into_iter()
                .find(|v| v.as_index().is_none_or(|b| b >= aut.len()))
            {
                return Err(invalid(format!("`{v}` is not a state")));
            }
        }
    }
    let ns = model.len();
    let top = aut.priority.iter().copied().max().unwrap_or(0) as usize;
    let mut blocks = vec![Vec::new(); top + 1];
    for (b, &p) in aut.priority.iter().enumerate() {
        blocks[p as usize].push(b);
    }
    let colors = (0..ns)
        .map(|s| aut.color_of(|p| model.holds(p, s)))
        .collect();
    let mut solver = Solver {
        aut,
        model,
        colors,
        blocks,
        value: vec![0; aut.len()],
    };
    solver.level(top, UP | DOWN)?;
    let m = solver.value[aut.initial];
    Ok((0..ns).map(|s| m >> s & 1 == 1).collect())
}
