//! Coalgebraic modal fixpoint logic over finite set functors.
//!
//! The crate is organised bottom-up: [`logic`] holds the one-step syntax and
//! semantics, [`functors`] the concrete functors and their predicate liftings,
//! [`bases`] the disjunctive bases, [`games`] the parity game solver,
//! [`automata`] the Lambda-automata and the simulation pipeline,
//! [`transforms`] the Lyndon / interpolation transforms and [`frontend`] the
//! parser, compiler, fixpoint evaluator, file formats and CLI driver.

pub mod automata;
pub mod bases;
pub mod error;
pub mod frontend;
pub mod functors;
pub mod games;
pub mod logic;
pub mod transforms;
pub mod var;

pub use error::{Error, Result};
pub use var::Var;
