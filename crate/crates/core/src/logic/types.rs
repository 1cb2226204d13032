use std::collections::BTreeSet;

use crate::logic::Bool;
use crate::var::Var;

/// How a propositional type treats the variables outside its base set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeFlavor {
    Exact,
    /// Like `Exact`, but the negative literal of this variable is dropped.
    PositiveIn(Var),
}

/// A propositional `A`-type: a subset `B` of `A` read as a valuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PropType {
    pub universe: BTreeSet<Var>,
    pub base: BTreeSet<Var>,
    pub flavor: TypeFlavor,
}

impl PropType {
    pub fn exact(universe: BTreeSet<Var>, base: BTreeSet<Var>) -> Self {
        PropType {
            universe,
            base,
            flavor: TypeFlavor::Exact,
        }
    }

    pub fn positive_in(universe: BTreeSet<Var>, base: BTreeSet<Var>, a: Var) -> Self {
        PropType {
            universe,
            base,
            flavor: TypeFlavor::PositiveIn(a),
        }
    }

    pub fn render(&self) -> Bool {
        let pos = self.base.iter().map(|v| Bool::Var(v.clone()));
        let neg = self
            .universe
            .iter()
            .filter(|v| !self.base.contains(*v))
            .filter(|v| !matches!(&self.flavor, TypeFlavor::PositiveIn(a) if a == *v))
            .map(|v| Bool::not(Bool::Var(v.clone())));
        Bool::and(pos.chain(neg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_and_positive_rendering() {
        let a = Var::name("a");
        let b = Var::name("b");
        let u: BTreeSet<Var> = [a.clone(), b.clone()].into();
        let t = PropType::exact(u.clone(), [b.clone()].into());
        assert_eq!(t.render().to_string(), "b & ~a");
        let t = PropType::positive_in(u, [b].into(), a);
        assert_eq!(t.render().to_string(), "b");
    }
}
