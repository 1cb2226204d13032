//! Concrete finitary set functors with their predicate liftings.

mod barr;
mod elem;
mod enumerate;

pub use barr::{barr_lift, barr_witness};
pub use elem::{minimal_antichain, Elem};
pub use enumerate::Caps;

pub(crate) use elem::{bits, full};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{invalid, Error, Result};
use crate::logic::{Bool, Composed, Lifting, OneStep};
use crate::var::Var;

/// Hard limit on carrier sizes (elements use 64-bit point masks).
pub const MAX_CARRIER: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Functor {
    Identity,
    Powerset,
    Bag,
    Labeled(Arc<[Arc<str>]>),
    Mono,
    Sum(Arc<Functor>, Arc<Functor>),
    Product(Arc<Functor>, Arc<Functor>),
    Compose(Arc<Functor>, Arc<Functor>),
}

impl Functor {
    pub fn labeled<I: IntoIterator<Item = S>, S: AsRef<str>>(labels: I) -> Functor {
        let mut ls: Vec<Arc<str>> = labels.into_iter().map(|s| Arc::from(s.as_ref())).collect();
        ls.sort();
        ls.dedup();
        Functor::Labeled(ls.into())
    }

    pub fn sum(a: Functor, b: Functor) -> Functor {
        Functor::Sum(Arc::new(a), Arc::new(b))
    }

    pub fn product(a: Functor, b: Functor) -> Functor {
        Functor::Product(Arc::new(a), Arc::new(b))
    }

    pub fn compose(a: Functor, b: Functor) -> Functor {
        Functor::Compose(Arc::new(a), Arc::new(b))
    }

    /// Declared weak-pullback preservation.
    pub fn preserves_weak_pullbacks(&self) -> bool {
        match self {
            Functor::Identity | Functor::Powerset | Functor::Bag | Functor::Labeled(_) => true,
            Functor::Mono => false,
            Functor::Sum(a, b) | Functor::Product(a, b) | Functor::Compose(a, b) => {
                a.preserves_weak_pullbacks() && b.preserves_weak_pullbacks()
            }
        }
    }

    fn component(&self, i: u8) -> Result<&Functor> {
        match (self, i) {
            (Functor::Sum(a, _) | Functor::Product(a, _), 1) => Ok(a),
            (Functor::Sum(_, b) | Functor::Product(_, b), 2) => Ok(b),
            _ => Err(invalid(format!("functor {self} has no component {i}"))),
        }
    }

    fn unknown(&self, l: &Lifting) -> Error {
        Error::UnknownLifting {
            lifting: l.to_string(),
            functor: self.to_string(),
        }
    }

    /// Check that a lifting belongs to the signature of this functor.
    pub fn check_lifting(&self, l: &Lifting) -> Result<()> {
        use Lifting as L;
        let ok = match (self, l) {
            (_, L::Top | L::Bot) => true,
            (Functor::Powerset | Functor::Mono, L::Diamond | L::Box) => true,
            (Functor::Bag, L::AtLeast(_) | L::Fewer(_)) => true,
            (Functor::Identity, L::Next) => true,
            (Functor::Labeled(_), L::Next) => true,
            (Functor::Labeled(ls), L::Label(x) | L::NotLabel(x)) => {
                if !ls.contains(x) {
                    return Err(invalid(format!(
                        "label `{x}` is not declared by functor {self}"
                    )));
                }
                true
            }
            (Functor::Sum(..) | Functor::Product(..), L::Tag(i, inner)) => {
                return self.component(*i)?.check_lifting(inner);
            }
            (Functor::Compose(f1, f2), L::Comp(c)) => {
                f1.check_lifting(&c.outer)?;
                if c.outer.arity() != c.inner.len() {
                    return Err(Error::Arity {
                        lifting: c.outer.to_string(),
                        expected: c.outer.arity(),
                        got: c.inner.len(),
                    });
                }
                for a in &c.inner {
                    f2.check_formula(a)?;
                    if a.vars()
                        .iter()
                        .any(|v| v.as_index().map_or(true, |i| i >= c.arity))
                    {
                        return Err(invalid(format!(
                            "inner formula {a} uses a non-positional variable"
                        )));
                    }
                }
                true
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(self.unknown(l))
        }
    }

    /// Check every modal atom of a one-step formula.
    pub fn check_formula(&self, a: &OneStep) -> Result<()> {
        let mut ls = Vec::new();
        collect_atoms(a, &mut ls);
        for (l, n) in ls {
            self.check_lifting(&l)?;
            if l.arity() != n {
                return Err(Error::Arity {
                    lifting: l.to_string(),
                    expected: l.arity(),
                    got: n,
                });
            }
        }
        Ok(())
    }

    // ------------------------------------------------------------ map action

    /// `T f` applied to `e`, where `f[s]` is the image of point `s`.
    pub fn map(&self, f: &[usize], e: &Elem) -> Elem {
        match (self, e) {
            (_, Elem::Point(s)) => Elem::Point(f[*s]),
            (_, Elem::Set(m)) => Elem::Set(bits(*m).fold(0, |acc, s| acc | 1 << f[s])),
            (_, Elem::Bag(v)) => Elem::bag_big(v.iter().map(|(s, k)| (f[*s], k.clone()))),
            (_, Elem::Labeled(l, s)) => Elem::Labeled(l.clone(), f[*s]),
            (_, Elem::Mono(ms)) => Elem::mono(
                ms.iter()
                    .map(|m| bits(*m).fold(0, |acc, s| acc | 1 << f[s])),
            ),
            (Functor::Sum(a, b), Elem::Inj(i, x)) => {
                let g = if *i == 1 { a } else { b };
                Elem::inj(*i, g.map(f, x))
            }
            (Functor::Product(a, b), Elem::Pair(x, y)) => Elem::pair(a.map(f, x), b.map(f, y)),
            (Functor::Compose(f1, f2), Elem::Comp(t, o)) => {
                let table: Vec<Elem> = t.iter().map(|x| f2.map(f, x)).collect();
                normalize_comp(f1, table, o)
            }
            _ => panic!("element {e} does not belong to functor {self}"),
        }
    }

    /// Points the element depends on.
    pub fn support(&self, e: &Elem) -> u64 {
        match (self, e) {
            (_, Elem::Point(s)) | (_, Elem::Labeled(_, s)) => 1 << s,
            (_, Elem::Set(m)) => *m,
            (_, Elem::Bag(v)) => v.iter().fold(0, |acc, (s, _)| acc | 1 << s),
            (_, Elem::Mono(ms)) => ms.iter().fold(0, |acc, m| acc | m),
            (Functor::Sum(a, b), Elem::Inj(i, x)) => {
                if *i == 1 {
                    a.support(x)
                } else {
                    b.support(x)
                }
            }
            (Functor::Product(a, b), Elem::Pair(x, y)) => a.support(x) | b.support(y),
            (Functor::Compose(_, f2), Elem::Comp(t, _)) => {
                t.iter().fold(0, |acc, x| acc | f2.support(x))
            }
            _ => panic!("element {e} does not belong to functor {self}"),
        }
    }

    /// Verify that `e` is a well-formed element over a carrier of size `n`.
    pub fn validate(&self, e: &Elem, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::IllFormed(msg));
        let lim = full(n);
        match (self, e) {
            (Functor::Identity, Elem::Point(s)) if *s < n => Ok(()),
            (Functor::Powerset, Elem::Set(m)) if m & !lim == 0 => Ok(()),
            (Functor::Bag, Elem::Bag(v)) => {
                let sorted = v.windows(2).all(|w| w[0].0 < w[1].0);
                if sorted && v.iter().all(|(s, k)| *s < n && *k > BigUint::from(0u8)) {
                    Ok(())
                } else {
                    bad(format!("bag {e} is not normalised over {n} points"))
                }
            }
            (Functor::Labeled(ls), Elem::Labeled(l, s)) if *s < n => {
                if ls.contains(l) {
                    Ok(())
                } else {
                    bad(format!("undeclared label `{l}`"))
                }
            }
            (Functor::Mono, Elem::Mono(ms)) => {
                if ms.iter().all(|m| m & !lim == 0) && minimal_antichain(ms.clone()) == *ms {
                    Ok(())
                } else {
                    bad(format!("{e} is not an antichain over {n} points"))
                }
            }
            (Functor::Sum(a, b), Elem::Inj(i, x)) => match i {
                1 => a.validate(x, n),
                2 => b.validate(x, n),
                _ => bad(format!("tag {i} out of range")),
            },
            (Functor::Product(a, b), Elem::Pair(x, y)) => {
                a.validate(x, n)?;
                b.validate(y, n)
            }
            (Functor::Compose(f1, f2), Elem::Comp(t, o)) => {
                for x in t {
                    f2.validate(x, n)?;
                }
                f1.validate(o, t.len())?;
                if normalize_comp(f1, t.clone(), o) != *e {
                    return bad(format!("composite {e} is not normalised"));
                }
                Ok(())
            }
            _ => bad(format!("{e} is not an element of {self} over {n} points")),
        }
    }

    // ------------------------------------------------------------ liftings

    /// Evaluate `lambda_S(args)` at `e`, for a carrier of size `n`.
    pub fn eval_lifting(&self, l: &Lifting, args: &[u64], e: &Elem, n: usize) -> Result<bool> {
        if args.len() != l.arity() {
            return Err(Error::Arity {
                lifting: l.to_string(),
                expected: l.arity(),
                got: args.len(),
            });
        }
        use Lifting as L;
        Ok(match (self, l, e) {
            (_, L::Top, _) => true,
            (_, L::Bot, _) => false,
            (Functor::Powerset, L::Diamond, Elem::Set(m)) => m & args[0] != 0,
            (Functor::Powerset, L::Box, Elem::Set(m)) => m & !args[0] == 0,
            (Functor::Mono, L::Box, Elem::Mono(ms)) => ms.iter().any(|m| m & !args[0] == 0),
            (Functor::Mono, L::Diamond, Elem::Mono(ms)) => ms.iter().all(|m| m & args[0] != 0),
            (Functor::Bag, L::AtLeast(k), Elem::Bag(v)) => {
                let tot: BigUint = v
                    .iter()
                    .filter(|(s, _)| args[0] >> s & 1 == 1)
                    .map(|(_, x)| x)
                    .sum();
                tot >= BigUint::from(*k)
            }
            (Functor::Bag, L::Fewer(k), Elem::Bag(v)) => {
                let tot: BigUint = v
                    .iter()
                    .filter(|(s, _)| args[0] >> s & 1 == 0)
                    .map(|(_, x)| x)
                    .sum();
                tot < BigUint::from(*k)
            }
            (Functor::Identity, L::Next, Elem::Point(s)) => args[0] >> s & 1 == 1,
            (Functor::Labeled(_), L::Next, Elem::Labeled(_, s)) => args[0] >> s & 1 == 1,
            (Functor::Labeled(_), L::Label(x), Elem::Labeled(y, _)) => x == y,
            (Functor::Labeled(_), L::NotLabel(x), Elem::Labeled(y, _)) => x != y,
            (Functor::Sum(..), L::Tag(i, inner), Elem::Inj(j, x)) => {
                i == j && self.component(*i)?.eval_lifting(inner, args, x, n)?
            }
            (Functor::Product(..), L::Tag(i, inner), Elem::Pair(x, y)) => {
                let el = if *i == 1 { x } else { y };
                self.component(*i)?.eval_lifting(inner, args, el, n)?
            }
            (Functor::Compose(f1, f2), L::Comp(c), Elem::Comp(t, o)) => {
                let all = full(n);
                let val = |v: &Var| v.as_index().and_then(|i| args.get(i).copied()).unwrap_or(0);
                let mut inner_sets = vec![0u64; c.inner.len()];
                for (j, te) in t.iter().enumerate() {
                    for (k, a) in c.inner.iter().enumerate() {
                        if crate::logic::semantics::eval_masks(f2, a, te, n, all, &val)? {
                            inner_sets[k] |= 1 << j;
                        }
                    }
                }
                f1.eval_lifting(&c.outer, &inner_sets, o, t.len())?
            }
            _ => {
                self.check_lifting(l)?;
                return Err(Error::IllFormed(format!("{e} is not an element of {self}")));
            }
        })
    }

    /// A formula `d` over the argument list with `d(args) == not lambda(not args)`.
    pub fn dual_formula(&self, l: &Lifting, args: Vec<Bool>) -> Result<OneStep> {
        use Lifting as L;
        let simple = |d: Lifting| Ok(OneStep::Modal(d, args.clone()));
        match (self, l) {
            (_, L::Top) => simple(L::Bot),
            (_, L::Bot) => simple(L::Top),
            (Functor::Powerset | Functor::Mono, L::Diamond) => simple(L::Box),
            (Functor::Powerset | Functor::Mono, L::Box) => simple(L::Diamond),
            (Functor::Bag, L::AtLeast(k)) => simple(L::Fewer(*k)),
            (Functor::Bag, L::Fewer(k)) => simple(L::AtLeast(*k)),
            (Functor::Identity | Functor::Labeled(_), L::Next) => simple(L::Next),
            (Functor::Labeled(_), L::Label(x)) => simple(L::NotLabel(x.clone())),
            (Functor::Labeled(_), L::NotLabel(x)) => simple(L::Label(x.clone())),
            (Functor::Sum(..), L::Tag(i, inner)) => {
                let d = self.component(*i)?.dual_formula(inner, args)?;
                let other = if *i == 1 { 2 } else { 1 };
                Ok(OneStep::or([
                    wrap_tag(*i, &d, true),
                    OneStep::Modal(Lifting::tag(other, L::Top), vec![]),
                ]))
            }
            (Functor::Product(..), L::Tag(i, inner)) => {
                let d = self.component(*i)?.dual_formula(inner, args)?;
                Ok(wrap_tag(*i, &d, false))
            }
            (Functor::Compose(f1, f2), L::Comp(c)) => {
                let slots: Vec<Bool> = (0..c.inner.len())
                    .map(|k| Bool::Var(Var::Index(k)))
                    .collect();
                let d = f1.dual_formula(&c.outer, slots)?;
                let inner_duals: Vec<OneStep> =
                    c.inner.iter().map(|a| f2.dual(a)).collect::<Result<_>>()?;
                d.map_modal(&mut |mu, betas| {
                    let inner = betas
                        .iter()
                        .map(|b| {
                            b.subst_one_step(&mut |y| {
                                y.as_index()
                                    .and_then(|k| inner_duals.get(k).cloned())
                                    .ok_or_else(|| Error::UnmappedVar(y.clone()))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(OneStep::Modal(
                        Lifting::Comp(Arc::new(Composed {
                            outer: mu.clone(),
                            inner,
                            arity: c.arity,
                        })),
                        args.clone(),
                    ))
                })
            }
            _ => Err(self.unknown(l)),
        }
    }

    /// Negation normal form: negation only inside modal arguments.
    pub fn nnf(&self, a: &OneStep) -> Result<OneStep> {
        self.nnf_pol(a, false)
    }

    fn nnf_pol(&self, a: &OneStep, neg: bool) -> Result<OneStep> {
        Ok(match (a, neg) {
            (OneStep::Top, false) | (OneStep::Bot, true) => OneStep::Top,
            (OneStep::Top, true) | (OneStep::Bot, false) => OneStep::Bot,
            (OneStep::Modal(l, args), false) => {
                OneStep::Modal(l.clone(), args.iter().map(Bool::nnf).collect())
            }
            (OneStep::Modal(l, args), true) => {
                let negated = args.iter().map(|x| Bool::not(x.clone()).nnf()).collect();
                self.dual_formula(l, negated)?
            }
            (OneStep::And(xs), false) | (OneStep::Or(xs), true) => OneStep::and(
                xs.iter()
                    .map(|x| self.nnf_pol(x, neg))
                    .collect::<Result<Vec<_>>>()?,
            ),
            (OneStep::Or(xs), false) | (OneStep::And(xs), true) => OneStep::or(
                xs.iter()
                    .map(|x| self.nnf_pol(x, neg))
                    .collect::<Result<Vec<_>>>()?,
            ),
            (OneStep::Not(x), _) => self.nnf_pol(x, !neg)?,
        })
    }

    /// Boolean dual `not a(not x)`, positive whenever `a` is.
    pub fn dual(&self, a: &OneStep) -> Result<OneStep> {
        let flipped = a.subst(&mut |v| Ok(Bool::not(Bool::Var(v.clone()))))?;
        self.nnf(&OneStep::not(flipped))
    }
}

/// Put a component formula under tag `i`; for sums the constant `true`
/// becomes the tag test.
fn wrap_tag(i: u8, d: &OneStep, sum: bool) -> OneStep {
    match d {
        OneStep::Top if sum => OneStep::Modal(Lifting::tag(i, Lifting::Top), vec![]),
        OneStep::Top => OneStep::Top,
        OneStep::Bot => OneStep::Bot,
        OneStep::Modal(l, args) => OneStep::Modal(Lifting::tag(i, l.clone()), args.clone()),
        OneStep::And(xs) => OneStep::and(xs.iter().map(|x| wrap_tag(i, x, sum))),
        OneStep::Or(xs) => OneStep::or(xs.iter().map(|x| wrap_tag(i, x, sum))),
        OneStep::Not(x) => OneStep::not(wrap_tag(i, x, sum)),
    }
}

fn collect_atoms(a: &OneStep, out: &mut Vec<(Lifting, usize)>) {
    match a {
        OneStep::Top | OneStep::Bot => {}
        OneStep::Modal(l, args) => out.push((l.clone(), args.len())),
        OneStep::And(xs) | OneStep::Or(xs) => xs.iter().for_each(|x| collect_atoms(x, out)),
        OneStep::Not(x) => collect_atoms(x, out),
    }
}

/// Restrict a composite's table to the referenced entries, sorted and merged.
pub(crate) fn normalize_comp(f1: &Functor, table: Vec<Elem>, outer: &Elem) -> Elem {
    let used = f1.support(outer);
    let mut entries: Vec<Elem> = bits(used).map(|j| table[j].clone()).collect();
    entries.sort();
    entries.dedup();
    let idx: Vec<usize> = table
        .iter()
        .map(|x| entries.binary_search(x).unwrap_or(0))
        .collect();
    let outer = f1.map(&idx, outer);
    Elem::Comp(entries, Box::new(outer))
}

impl fmt::Display for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functor::Identity => write!(f, "identity"),
            Functor::Powerset => write!(f, "powerset"),
            Functor::Bag => write!(f, "bag"),
            Functor::Labeled(ls) => {
                write!(f, "labeled:")?;
                for (i, l) in ls.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{l}")?;
                }
                Ok(())
            }
            Functor::Mono => write!(f, "mono"),
            Functor::Sum(a, b) => write!(f, "sum({a},{b})"),
            Functor::Product(a, b) => write!(f, "prod({a},{b})"),
            Functor::Compose(a, b) => write!(f, "comp({a},{b})"),
        }
    }
}

impl fmt::Debug for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Functor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Functor> {
        let s = s.trim();
        let (f, rest) = parse_functor(s)?;
        if !rest.trim().is_empty() {
            return Err(invalid(format!("trailing input in functor spec: `{rest}`")));
        }
        Ok(f)
    }
}

fn parse_functor(s: &str) -> Result<(Functor, &str)> {
    let s = s.trim_start();
    for (kw, f) in [
        ("powerset", Functor::Powerset),
        ("bag", Functor::Bag),
        ("identity", Functor::Identity),
        ("mono", Functor::Mono),
    ] {
        if let Some(rest) = s.strip_prefix(kw) {
            return Ok((f, rest));
        }
    }
    if let Some(mut rest) = s.strip_prefix("labeled:") {
        let mut labels = Vec::new();
        loop {
            let end = rest
                .find(|c: char| !(c.is_alphanumeric() || c == '_'))
                .unwrap_or(rest.len());
            if end == 0 {
                break;
            }
            labels.push(rest[..end].to_string());
            rest = &rest[end..];
            match rest.strip_prefix(',') {
                Some(r) if !is_functor_keyword(r.trim_start()) => rest = r,
                _ => break,
            }
        }
        if labels.is_empty() {
            return Err(invalid("labeled functor needs at least one label"));
        }
        return Ok((Functor::labeled(labels), rest));
    }
    for (kw, ctor) in [
        ("sum(", Functor::sum as fn(Functor, Functor) -> Functor),
        ("prod(", Functor::product),
        ("comp(", Functor::compose),
    ] {
        if let Some(rest) = s.strip_prefix(kw) {
            let (a, rest) = parse_functor(rest)?;
            let rest = rest
                .trim_start()
                .strip_prefix(',')
                .ok_or_else(|| invalid("expected `,` in functor spec"))?;
            let (b, rest) = parse_functor(rest)?;
            let rest = rest
                .trim_start()
                .strip_prefix(')')
                .ok_or_else(|| invalid("expected `)` in functor spec"))?;
            return Ok((ctor(a, b), rest));
        }
    }
    Err(invalid(format!("unknown functor spec `{s}`")))
}

fn is_functor_keyword(s: &str) -> bool {
    [
        "powerset", "bag", "identity", "mono", "labeled:", "sum(", "prod(", "comp(",
    ]
    .iter()
    .any(|k| s.starts_with(k))
}
