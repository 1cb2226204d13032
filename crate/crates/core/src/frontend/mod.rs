//! Parser, formula compiler, fixpoint evaluator and file formats.

mod compile;
mod eval;
mod io;
mod parser;

pub use compile::{compile, guard, letters, rename_apart, CompiledAutomaton};
pub use eval::eval_fixpoint;
pub use io::{parse_automaton, render_automaton, NamedModel};
pub use parser::{parse_bool, parse_formula, parse_one_step};
