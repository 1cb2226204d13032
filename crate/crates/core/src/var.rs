//! Variables of one-step formulas.
//!
//! Besides plain names, the constructions need structured variables: subsets
//! of a variable set (elements of `P(A)`), pairs (elements of `A x B`) and
//! anonymous indices (automaton states, argument positions).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Name(Arc<str>),
    Index(usize),
    Set(Arc<BTreeSet<Var>>),
    Pair(Arc<(Var, Var)>),
    /// The extra point of `A + {T}` used by divisibility.
    Top,
}

impl Var {
    pub fn name(s: &str) -> Var {
        Var::Name(Arc::from(s))
    }

    pub fn set<I: IntoIterator<Item = Var>>(items: I) -> Var {
        Var::Set(Arc::new(items.into_iter().collect()))
    }

    pub fn pair(a: Var, b: Var) -> Var {
        Var::Pair(Arc::new((a, b)))
    }

    pub fn as_index(&self) -> Option<usize> {
        match self {
            Var::Index(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Var>> {
        match self {
            Var::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Var, &Var)> {
        match self {
            Var::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Name(s) => write!(f, "{s}"),
            Var::Index(i) => write!(f, "#{i}"),
            Var::Set(s) => {
                write!(f, "{{")?;
                for (i, v) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "}}")
            }
            Var::Pair(p) => write!(f, "({},{})", p.0, p.1),
            Var::Top => write!(f, "T"),
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// All subsets of `vars`, in order of the bitmask enumeration.
pub fn powerset(vars: &[Var]) -> Vec<BTreeSet<Var>> {
    assert!(vars.len() < 20, "powerset of {} variables", vars.len());
    (0u32..(1 << vars.len()))
        .map(|m| {
            vars.iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_structured() {
        let a = Var::name("a");
        let b = Var::name("b");
        assert_eq!(Var::set([b.clone(), a.clone()]).to_string(), "{a,b}");
        assert_eq!(Var::pair(a, Var::Index(2)).to_string(), "(a,#2)");
        assert_eq!(Var::set([]).to_string(), "{}");
    }

    #[test]
    fn powerset_size() {
        let vs = vec![Var::name("a"), Var::name("b"), Var::name("c")];
        assert_eq!(powerset(&vs).len(), 8);
    }
}
