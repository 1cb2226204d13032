//! One-step syntax and semantics.

mod formula;
mod mu;
pub(crate) mod semantics;
mod subst;
mod types;

pub mod equiv;

pub use formula::{Bool, Composed, Lifting, OneStep};
pub use mu::Mu;
pub use semantics::{eval_one_step, eval_zero_step, one_step_morphism_check, OneStepModel};
pub use subst::Substitution;
pub use types::{PropType, TypeFlavor};
