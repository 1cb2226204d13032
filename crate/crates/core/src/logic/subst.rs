use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::logic::{Bool, OneStep};
use crate::var::Var;

/// A finite substitution `B -> Bool(A)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    pub map: BTreeMap<Var, Bool>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: Var, b: Bool) {
        self.map.insert(v, b);
    }

    pub fn get(&self, v: &Var) -> Result<Bool> {
        self.map
            .get(v)
            .cloned()
            .ok_or_else(|| Error::UnmappedVar(v.clone()))
    }

    pub fn apply(&self, phi: &OneStep) -> Result<OneStep> {
        phi.subst(&mut |v| self.get(v))
    }

    pub fn apply_bool(&self, pi: &Bool) -> Result<Bool> {
        pi.subst(&mut |v| self.get(v))
    }

    pub fn identity<'a>(vars: impl IntoIterator<Item = &'a Var>) -> Self {
        Self {
            map: vars
                .into_iter()
                .map(|v| (v.clone(), Bool::Var(v.clone())))
                .collect(),
        }
    }

    /// `B |-> /\B` on the given set variables.
    pub fn conj<'a>(sets: impl IntoIterator<Item = &'a Var>) -> Result<Self> {
        let mut s = Self::new();
        for v in sets {
            let items = v.as_set().ok_or_else(|| Error::UnmappedVar(v.clone()))?;
            s.insert(v.clone(), Bool::conj_of(items));
        }
        Ok(s)
    }

    /// `B |-> \/B` on the given set variables.
    pub fn disj<'a>(sets: impl IntoIterator<Item = &'a Var>) -> Result<Self> {
        let mut s = Self::new();
        for v in sets {
            let items = v.as_set().ok_or_else(|| Error::UnmappedVar(v.clone()))?;
            s.insert(v.clone(), Bool::disj_of(items));
        }
        Ok(s)
    }

    /// `(a,b) |-> a /\ b` on pairs, identity on the other variables.
    pub fn theta<'a>(vars: impl IntoIterator<Item = &'a Var>) -> Self {
        let mut s = Self::new();
        for v in vars {
            let b = match v.as_pair() {
                Some((a, b)) => Bool::and([Bool::Var(a.clone()), Bool::Var(b.clone())]),
                None => Bool::Var(v.clone()),
            };
            s.insert(v.clone(), b);
        }
        s
    }

    /// The tagging `b |-> (a,b)`.
    pub fn tagging<'a>(a: &Var, vars: impl IntoIterator<Item = &'a Var>) -> Self {
        Self {
            map: vars
                .into_iter()
                .map(|b| (b.clone(), Bool::Var(Var::pair(a.clone(), b.clone()))))
                .collect(),
        }
    }

    /// Singleton encoding `a |-> {a}`.
    pub fn singletons<'a>(vars: impl IntoIterator<Item = &'a Var>) -> Self {
        Self {
            map: vars
                .into_iter()
                .map(|a| (a.clone(), Bool::Var(Var::set([a.clone()]))))
                .collect(),
        }
    }

    pub fn domain(&self) -> BTreeSet<Var> {
        self.map.keys().cloned().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Lifting;

    #[test]
    fn unmapped_variable_is_named() {
        let s = Substitution::new();
        let phi = OneStep::Modal(Lifting::Diamond, vec![Bool::name("zz")]);
        let err = s.apply(&phi).unwrap_err();
        assert!(err.to_string().contains("zz"));
    }

    #[test]
    fn identity_is_neutral() {
        let phi = OneStep::And(vec![
            OneStep::Modal(Lifting::Diamond, vec![Bool::name("a")]),
            OneStep::Modal(
                Lifting::Box,
                vec![Bool::Or(vec![Bool::name("a"), Bool::name("b")])],
            ),
        ]);
        let s = Substitution::identity(&phi.vars());
        assert_eq!(s.apply(&phi).unwrap(), phi);
    }

    #[test]
    fn conj_unfolds_nabla_argument() {
        let ab = Var::set([Var::name("a"), Var::name("b")]);
        let phi = OneStep::And(vec![
            OneStep::Modal(Lifting::Diamond, vec![Bool::Var(ab.clone())]),
            OneStep::Modal(Lifting::Box, vec![Bool::Var(ab.clone())]),
        ]);
        let s = Substitution::conj([&ab]).unwrap();
        assert_eq!(s.apply(&phi).unwrap().to_string(), "<>(a & b) & [](a & b)");
    }
}
