use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

/// An element of `T S` for a finite carrier `S = {0, .., n-1}` (`n <= 64`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Point(usize),
    /// Powerset element as a bitmask over the carrier.
    Set(u64),
    /// Bag: sorted, strictly positive multiplicities.
    Bag(Vec<(usize, BigUint)>),
    Labeled(Arc<str>, usize),
    /// Monotone neighbourhood: sorted antichain of minimal sets.
    Mono(Vec<u64>),
    Inj(u8, Box<Elem>),
    Pair(Box<Elem>, Box<Elem>),
    /// Composite: `outer` ranges over indices into `table` (elements of `T2 S`).
    Comp(Vec<Elem>, Box<Elem>),
}

pub(crate) fn bits(m: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| m >> i & 1 == 1)
}

pub(crate) fn full(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Reduce a family of sets to its sorted antichain of minimal members.
pub fn minimal_antichain(mut sets: Vec<u64>) -> Vec<u64> {
    sets.sort_by_key(|s| (s.count_ones(), *s));
    sets.dedup();
    let mut out: Vec<u64> = Vec::new();
    for s in sets {
        if !out.iter().any(|m| m & s == *m) {
            out.push(s);
        }
    }
    out.sort();
    out
}

impl Elem {
    pub fn bag<I: IntoIterator<Item = (usize, u64)>>(items: I) -> Elem {
        Elem::bag_big(items.into_iter().map(|(s, k)| (s, BigUint::from(k))))
    }

    pub fn bag_big<I: IntoIterator<Item = (usize, BigUint)>>(items: I) -> Elem {
        let mut m: std::collections::BTreeMap<usize, BigUint> = Default::default();
        for (s, k) in items {
            *m.entry(s).or_default() += k;
        }
        Elem::Bag(m.into_iter().filter(|(_, k)| !k.is_zero()).collect())
    }

    pub fn set<I: IntoIterator<Item = usize>>(items: I) -> Elem {
        Elem::Set(items.into_iter().fold(0, |m, s| m | 1 << s))
    }

    pub fn mono<I: IntoIterator<Item = u64>>(sets: I) -> Elem {
        Elem::Mono(minimal_antichain(sets.into_iter().collect()))
    }

    pub fn inj(i: u8, e: Elem) -> Elem {
        Elem::Inj(i, Box::new(e))
    }

    pub fn pair(a: Elem, b: Elem) -> Elem {
        Elem::Pair(Box::new(a), Box::new(b))
    }

    /// Multiplicity of a point in a bag (zero for other shapes).
    pub fn multiplicity(&self, s: usize) -> BigUint {
        match self {
            Elem::Bag(v) => v
                .iter()
                .find(|(t, _)| *t == s)
                .map(|(_, k)| k.clone())
                .unwrap_or_default(),
            _ => BigUint::zero(),
        }
    }
}

fn fmt_mask(f: &mut fmt::Formatter<'_>, m: u64) -> fmt::Result {
    write!(f, "{{")?;
    for (i, b) in bits(m).enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{b}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Point(s) => write!(f, "{s}"),
            Elem::Set(m) => fmt_mask(f, *m),
            Elem::Bag(v) => {
                write!(f, "[")?;
                for (i, (s, k)) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}:{k}")?;
                }
                write!(f, "]")
            }
            Elem::Labeled(l, s) => write!(f, "({l},{s})"),
            Elem::Mono(ms) => {
                write!(f, "up{{")?;
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    fmt_mask(f, *m)?;
                }
                write!(f, "}}")
            }
            Elem::Inj(i, e) => write!(f, "in{i}({e})"),
            Elem::Pair(a, b) => write!(f, "<{a}, {b}>"),
            Elem::Comp(t, o) => {
                write!(f, "comp[")?;
                for (i, e) in t.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "]({o})")
            }
        }
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
