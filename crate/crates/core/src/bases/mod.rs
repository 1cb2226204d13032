//! Disjunctive formulas and disjunctive bases.
//!
//! A basis formula [`Dj`] is a finite disjunction of basis terms. Normal forms
//! live over set variables `Var::Set(B)` standing for `/\B`; binary laws
//! produce pair variables `Var::Pair(a, b)` standing for `a /\ b`.

mod bag;
mod combinators;
mod cover;
mod powerset;
mod simple;

pub use bag::{hall_translate, CaseDescription};
pub use cover::{
    divisible, find_dividing_cover, is_disjunctive, yoneda_representation, CoverBranch,
    Disjunctivity, DividingCover, YonedaRep,
};
pub(crate) use cover::{mass, CoverSearch};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functors::Functor;
use crate::logic::{Bool, Lifting, OneStep};
use crate::var::Var;

/// A disjunction of basis terms; the empty disjunction is `false`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dj(pub Vec<DjTerm>);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DjTerm {
    Top,
    /// Powerset cover modality.
    Nabla(BTreeSet<Var>),
    /// Graded cover `<a_1, .., a_n; B>` (tuple kept sorted).
    Graded(Vec<Var>, BTreeSet<Var>),
    Next(Var),
    /// `!l & X a`.
    LabelNext(Arc<str>, Var),
    /// Component formula of a sum, under its injection tag.
    Inj(u8, Dj),
    /// `d1 /\ d2` for the two projections of a product.
    Pair(Dj, Dj),
    /// Outer formula over letters `Var::Index(k)`, letter `k` standing for
    /// the inner basis formula `letters[k]`.
    Comp(Dj, Vec<Dj>),
}

impl Dj {
    pub fn top() -> Dj {
        Dj(vec![DjTerm::Top])
    }

    pub fn bot() -> Dj {
        Dj(vec![])
    }

    pub fn is_bot(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.0.iter().any(|t| matches!(t, DjTerm::Top))
    }

    /// Normalised disjunction: drops unsatisfiable terms, absorbs into `Top`,
    /// sorts and deduplicates.
    pub fn or(items: impl IntoIterator<Item = DjTerm>) -> Dj {
        let mut out = Vec::new();
        for t in items {
            match t {
                DjTerm::Top => return Dj::top(),
                DjTerm::Inj(_, ref d) if d.is_bot() => {}
                DjTerm::Pair(ref a, ref b) if a.is_bot() || b.is_bot() => {}
                DjTerm::Pair(ref a, ref b) if a.is_top() && b.is_top() => return Dj::top(),
                DjTerm::Comp(ref o, _) if o.is_bot() => {}
                DjTerm::Comp(ref o, _) if o.is_top() => return Dj::top(),
                t => out.push(t),
            }
        }
        out.sort();
        out.dedup();
        Dj(out)
    }

    pub fn term(t: DjTerm) -> Dj {
        Dj::or([t])
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for t in &self.0 {
            match t {
                DjTerm::Top => {}
                DjTerm::Nabla(vs) => out.extend(vs.iter().cloned()),
                DjTerm::Graded(a, b) => {
                    out.extend(a.iter().cloned());
                    out.extend(b.iter().cloned());
                }
                DjTerm::Next(v) | DjTerm::LabelNext(_, v) => {
                    out.insert(v.clone());
                }
                DjTerm::Inj(_, d) => d.collect_vars(out),
                DjTerm::Pair(a, b) => {
                    a.collect_vars(out);
                    b.collect_vars(out);
                }
                DjTerm::Comp(_, letters) => letters.iter().for_each(|l| l.collect_vars(out)),
            }
        }
    }

    /// Rename variables (letters of composite terms are internal and kept).
    pub fn rename(&self, f: &mut dyn FnMut(&Var) -> Var) -> Dj {
        Dj::or(self.0.iter().map(|t| match t {
            DjTerm::Top => DjTerm::Top,
            DjTerm::Nabla(vs) => DjTerm::Nabla(vs.iter().map(&mut *f).collect()),
            DjTerm::Graded(a, b) => {
                let mut a: Vec<Var> = a.iter().map(&mut *f).collect();
                a.sort();
                DjTerm::Graded(a, b.iter().map(&mut *f).collect())
            }
            DjTerm::Next(v) => DjTerm::Next(f(v)),
            DjTerm::LabelNext(l, v) => DjTerm::LabelNext(l.clone(), f(v)),
            DjTerm::Inj(i, d) => DjTerm::Inj(*i, d.rename(f)),
            DjTerm::Pair(a, b) => DjTerm::Pair(a.rename(f), b.rename(f)),
            DjTerm::Comp(o, letters) => {
                DjTerm::Comp(o.clone(), letters.iter().map(|l| l.rename(f)).collect())
            }
        }))
    }

    /// The one-step formula denoted by this basis formula.
    pub fn to_formula(&self) -> OneStep {
        OneStep::or(self.0.iter().map(DjTerm::to_formula))
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }
}

impl DjTerm {
    pub fn to_formula(&self) -> OneStep {
        match self {
            DjTerm::Top => OneStep::Top,
            DjTerm::Nabla(vs) => nabla(vs.iter().map(|v| Bool::Var(v.clone())).collect()),
            DjTerm::Graded(a, b) => hall_translate(a, b),
            DjTerm::Next(v) => OneStep::Modal(Lifting::Next, vec![Bool::Var(v.clone())]),
            DjTerm::LabelNext(l, v) => OneStep::and([
                OneStep::Modal(Lifting::Label(l.clone()), vec![]),
                OneStep::Modal(Lifting::Next, vec![Bool::Var(v.clone())]),
            ]),
            DjTerm::Inj(i, d) => wrap(*i, &d.to_formula(), true),
            DjTerm::Pair(a, b) => OneStep::and([
                wrap(1, &a.to_formula(), false),
                wrap(2, &b.to_formula(), false),
            ]),
            DjTerm::Comp(outer, letters) => combinators::compose_formula(outer, letters),
        }
    }
}

/// `nabla {phi_1, .., phi_n} = <>phi_1 & .. & <>phi_n & [](phi_1 | .. | phi_n)`.
pub fn nabla(args: Vec<Bool>) -> OneStep {
    let mut parts: Vec<OneStep> = args
        .iter()
        .map(|a| OneStep::Modal(Lifting::Diamond, vec![a.clone()]))
        .collect();
    parts.push(OneStep::Modal(Lifting::Box, vec![Bool::or(args)]));
    OneStep::and(parts)
}

fn wrap(i: u8, d: &OneStep, sum: bool) -> OneStep {
    match d {
        OneStep::Top if sum => OneStep::Modal(Lifting::tag(i, Lifting::Top), vec![]),
        OneStep::Top => OneStep::Top,
        OneStep::Bot => OneStep::Bot,
        OneStep::Modal(l, args) => OneStep::Modal(Lifting::tag(i, l.clone()), args.clone()),
        OneStep::And(xs) => OneStep::and(xs.iter().map(|x| wrap(i, x, sum))),
        OneStep::Or(xs) => OneStep::or(xs.iter().map(|x| wrap(i, x, sum))),
        OneStep::Not(x) => OneStep::not(wrap(i, x, sum)),
    }
}

fn fmt_set(vs: &BTreeSet<Var>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{{")?;
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, "}}")
}

impl fmt::Display for DjTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DjTerm::Top => write!(f, "true"),
            DjTerm::Nabla(vs) => {
                write!(f, "nabla")?;
                fmt_set(vs, f)
            }
            DjTerm::Graded(a, b) => {
                write!(f, "<<")?;
                for (i, v) in a.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "; ")?;
                fmt_set(b, f)?;
                write!(f, ">>")
            }
            DjTerm::Next(v) => write!(f, "X {v}"),
            DjTerm::LabelNext(l, v) => write!(f, "!{l} & X {v}"),
            DjTerm::Inj(i, d) => write!(f, "@{i}({d})"),
            DjTerm::Pair(a, b) => write!(f, "({a}) * ({b})"),
            DjTerm::Comp(o, letters) => {
                write!(f, "[{o}]")?;
                for (k, l) in letters.iter().enumerate() {
                    write!(f, " #{k}:={l}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Dj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "false");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Dj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A disjunctive basis for one of the supported signatures.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Powerset,
    Bag,
    Identity,
    Labeled(Arc<[Arc<str>]>),
    Sum(Arc<Basis>, Arc<Basis>),
    Product(Arc<Basis>, Arc<Basis>),
    Compose(Arc<Basis>, Arc<Basis>),
}

impl Basis {
    pub fn powerset_basis() -> Basis {
        Basis::Powerset
    }

    pub fn bag_basis() -> Basis {
        Basis::Bag
    }

    pub fn basis_sum(a: Basis, b: Basis) -> Basis {
        Basis::Sum(Arc::new(a), Arc::new(b))
    }

    pub fn basis_product(a: Basis, b: Basis) -> Basis {
        Basis::Product(Arc::new(a), Arc::new(b))
    }

    pub fn basis_compose(a: Basis, b: Basis) -> Basis {
        Basis::Compose(Arc::new(a), Arc::new(b))
    }

    /// The standard basis of a functor; monotone neighbourhoods have none.
    pub fn for_functor(f: &Functor) -> Result<Basis> {
        Ok(match f {
            Functor::Identity => Basis::Identity,
            Functor::Powerset => Basis::Powerset,
            Functor::Bag => Basis::Bag,
            Functor::Labeled(ls) => Basis::Labeled(ls.clone()),
            Functor::Mono => {
                return Err(Error::UnsupportedFunctor {
                    functor: f.to_string(),
                    operation: "disjunctive basis".into(),
                })
            }
            Functor::Sum(a, b) => Basis::basis_sum(Basis::for_functor(a)?, Basis::for_functor(b)?),
            Functor::Product(a, b) => {
                Basis::basis_product(Basis::for_functor(a)?, Basis::for_functor(b)?)
            }
            Functor::Compose(a, b) => {
                Basis::basis_compose(Basis::for_functor(a)?, Basis::for_functor(b)?)
            }
        })
    }

    pub fn functor(&self) -> Functor {
        match self {
            Basis::Powerset => Functor::Powerset,
            Basis::Bag => Functor::Bag,
            Basis::Identity => Functor::Identity,
            Basis::Labeled(ls) => Functor::Labeled(ls.clone()),
            Basis::Sum(a, b) => Functor::sum(a.functor(), b.functor()),
            Basis::Product(a, b) => Functor::product(a.functor(), b.functor()),
            Basis::Compose(a, b) => Functor::compose(a.functor(), b.functor()),
        }
    }

    /// Whether `d` is built from this basis's terms.
    pub fn contains(&self, d: &Dj) -> bool {
        d.0.iter().all(|t| match (self, t) {
            (_, DjTerm::Top) => true,
            (Basis::Powerset, DjTerm::Nabla(_)) => true,
            (Basis::Bag, DjTerm::Graded(..)) => true,
            (Basis::Identity, DjTerm::Next(_)) => true,
            (Basis::Labeled(ls), DjTerm::LabelNext(l, _)) => ls.contains(l),
            (Basis::Sum(a, b), DjTerm::Inj(i, d)) => match i {
                1 => a.contains(d),
                2 => b.contains(d),
                _ => false,
            },
            (Basis::Product(a, b), DjTerm::Pair(x, y)) => a.contains(x) && b.contains(y),
            (Basis::Compose(a, b), DjTerm::Comp(o, letters)) => {
                a.contains(o)
                    && letters.iter().all(|l| b.contains(l))
                    && o.vars()
                        .iter()
                        .all(|v| v.as_index().is_some_and(|k| k < letters.len()))
            }
            _ => false,
        })
    }

    /// `delta` over `P(A)` with `lambda(args) == delta[/\_A]`, where `A` is
    /// the set of variables of the (positive) arguments.
    pub fn distribute(&self, l: &Lifting, args: &[Bool]) -> Result<Dj> {
        match l {
            Lifting::Top => return Ok(Dj::top()),
            Lifting::Bot => return Ok(Dj::bot()),
            _ => {}
        }
        if args.len() != l.arity() {
            return Err(Error::Arity {
                lifting: l.to_string(),
                expected: l.arity(),
                got: args.len(),
            });
        }
        match self {
            Basis::Powerset => powerset::distribute(l, args),
            Basis::Bag => bag::distribute(l, args),
            Basis::Identity | Basis::Labeled(_) => simple::distribute(self, l, args),
            Basis::Sum(..) | Basis::Product(..) | Basis::Compose(..) => {
                combinators::distribute(self, l, args)
            }
        }
    }

    /// `gamma` over pairs and single variables with
    /// `d1 /\ d2 == gamma[(a, b) |-> a /\ b]`.
    pub fn binary(&self, d1: &Dj, d2: &Dj) -> Result<Dj> {
        let mut out = Vec::new();
        for s in &d1.0 {
            for t in &d2.0 {
                let g = match (s, t) {
                    (DjTerm::Top, t) => Dj::term(t.clone()),
                    (s, DjTerm::Top) => Dj::term(s.clone()),
                    _ => match self {
                        Basis::Powerset => powerset::binary(s, t)?,
                        Basis::Bag => bag::binary(s, t)?,
                        Basis::Identity | Basis::Labeled(_) => simple::binary(s, t)?,
                        _ => combinators::binary(self, s, t)?,
                    },
                };
                out.extend(g.0);
                if out.len() > 1 << 16 {
                    return Err(crate::error::resource(
                        "binary distributive law exceeds 65536 disjuncts",
                    ));
                }
            }
        }
        Ok(Dj::or(out))
    }

    /// `delta` over `P(A)` with `alpha == delta[/\_A]` for positive `alpha`.
    pub fn normal_form(&self, alpha: &OneStep) -> Result<Dj> {
        if *self == Basis::Powerset {
            return powerset::normal_form(alpha);
        }
        let mut out = Vec::new();
        for conj in alpha.modal_dnf()? {
            let mut acc = Dj::top();
            for (l, args) in &conj {
                let d = self.distribute(l, args)?;
                acc = union_pairs(&self.binary(&acc, &d)?);
                if acc.is_bot() {
                    break;
                }
            }
            out.extend(acc.0);
        }
        Ok(Dj::or(out))
    }

    /// Normal form of a conjunction of basis formulas over `P(A)`.
    pub fn conjoin(&self, ds: &[Dj]) -> Result<Dj> {
        let mut acc = Dj::top();
        for d in ds {
            acc = union_pairs(&self.binary(&acc, d)?);
            if acc.is_bot() {
                break;
            }
        }
        Ok(acc)
    }
}

/// Rename `(B, B')` to `B u B'` (set variables), leaving other variables.
pub(crate) fn union_pairs(d: &Dj) -> Dj {
    d.rename(&mut |v| union_var(v))
}

fn union_var(v: &Var) -> Var {
    match v.as_pair() {
        Some((a, b)) => {
            let (a, b) = (union_var(a), union_var(b));
            match (a.as_set(), b.as_set()) {
                (Some(x), Some(y)) => Var::set(x.union(y).cloned()),
                _ => Var::pair(a, b),
            }
        }
        None => v.clone(),
    }
}

/// The set variable `B` (standing for `/\B`).
pub(crate) fn set_var(b: &BTreeSet<Var>) -> Var {
    Var::set(b.iter().cloned())
}

/// Minimal terms of a positive argument, as set variables.
pub(crate) fn min_vars(pi: &Bool) -> Result<Vec<Var>> {
    Ok(pi.minimal_terms()?.iter().map(set_var).collect())
}

/// The substitution `/\_A`: each set variable becomes the conjunction of its
/// members; other variables stay.
pub fn conj_subst(a: &OneStep) -> Result<OneStep> {
    a.subst(&mut |v| Ok(conj_var(v)))
}

fn conj_var(v: &Var) -> Bool {
    match (v.as_set(), v.as_pair()) {
        (Some(s), _) => Bool::and(s.iter().map(conj_var)),
        (_, Some((a, b))) => Bool::and([conj_var(a), conj_var(b)]),
        _ => Bool::Var(v.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functors::Caps;
    use crate::logic::equiv::one_step_equivalent;

    fn dia(b: Bool) -> OneStep {
        OneStep::Modal(Lifting::Diamond, vec![b])
    }

    #[test]
    fn or_normalises() {
        let d = Dj::or([
            DjTerm::Next(Var::name("a")),
            DjTerm::Inj(1, Dj::bot()),
            DjTerm::Next(Var::name("a")),
        ]);
        assert_eq!(d.size(), 1);
        assert!(Dj::or([DjTerm::Next(Var::name("a")), DjTerm::Top]).is_top());
    }

    #[test]
    fn generic_normal_form_identity() {
        let a = Bool::name("a");
        let b = Bool::name("b");
        let alpha = OneStep::and([
            OneStep::Modal(Lifting::Next, vec![a.clone()]),
            OneStep::Modal(Lifting::Next, vec![Bool::or([a, b])]),
        ]);
        let d = Basis::Identity.normal_form(&alpha).unwrap();
        let back = conj_subst(&d.to_formula()).unwrap();
        assert!(
            one_step_equivalent(&Functor::Identity, &alpha, &back, &Caps::default())
                .unwrap()
                .holds()
        );
    }

    #[test]
    fn conj_subst_expands_sets_and_pairs() {
        let v = Var::pair(Var::set([Var::name("a"), Var::name("b")]), Var::name("c"));
        let f = conj_subst(&dia(Bool::Var(v))).unwrap();
        assert_eq!(f.to_string(), "<>(a & b & c)");
    }
}
