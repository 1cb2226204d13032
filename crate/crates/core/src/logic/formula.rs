use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::var::Var;

/// Boolean formulas over variables (`Bool(A)`; `Latt(A)` when negation free).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bool {
    Var(Var),
    Top,
    Bot,
    And(Vec<Bool>),
    Or(Vec<Bool>),
    Not(Box<Bool>),
}

/// Predicate liftings. The meaning of [`Lifting::Tag`] depends on the functor:
/// a tagged injection for sums, a projection for products.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lifting {
    Diamond,
    Box,
    /// Bag lifting: total multiplicity inside the argument is at least `k`.
    AtLeast(u32),
    /// Bag lifting: total multiplicity outside the argument is below `k`.
    Fewer(u32),
    Next,
    Label(Arc<str>),
    NotLabel(Arc<str>),
    /// Nullary liftings holding everywhere / nowhere; used under tags.
    Top,
    Bot,
    Tag(u8, Arc<Lifting>),
    Comp(Arc<Composed>),
}

/// A composed lifting `outer<inner_1, ..., inner_m>` of arity `arity`; the
/// inner formulas range over the argument positions `Var::Index(0..arity)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composed {
    pub outer: Lifting,
    pub inner: Vec<OneStep>,
    pub arity: usize,
}

/// One-step formulas `ML1(A)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OneStep {
    Top,
    Bot,
    Modal(Lifting, Vec<Bool>),
    And(Vec<OneStep>),
    Or(Vec<OneStep>),
    Not(Box<OneStep>),
}

impl Lifting {
    pub fn arity(&self) -> usize {
        match self {
            Lifting::Diamond
            | Lifting::Box
            | Lifting::AtLeast(_)
            | Lifting::Fewer(_)
            | Lifting::Next => 1,
            Lifting::Label(_) | Lifting::NotLabel(_) | Lifting::Top | Lifting::Bot => 0,
            Lifting::Tag(_, l) => l.arity(),
            Lifting::Comp(c) => c.arity,
        }
    }

    pub fn tag(i: u8, l: Lifting) -> Lifting {
        Lifting::Tag(i, Arc::new(l))
    }

    /// Largest bag grade occurring in the lifting (0 if none).
    pub fn max_grade(&self) -> u32 {
        match self {
            Lifting::AtLeast(k) | Lifting::Fewer(k) => *k,
            Lifting::Tag(_, l) => l.max_grade(),
            Lifting::Comp(c) => c
                .inner
                .iter()
                .map(OneStep::max_grade)
                .fold(c.outer.max_grade(), u32::max),
            _ => 0,
        }
    }
}

impl fmt::Display for Lifting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lifting::Diamond => write!(f, "<>"),
            Lifting::Box => write!(f, "[]"),
            Lifting::AtLeast(k) => write!(f, "<{k}>"),
            Lifting::Fewer(k) => write!(f, "[{k}]"),
            Lifting::Next => write!(f, "X"),
            Lifting::Label(l) => write!(f, "!{l}"),
            Lifting::NotLabel(l) => write!(f, "!~{l}"),
            Lifting::Top => write!(f, "true"),
            Lifting::Bot => write!(f, "false"),
            Lifting::Tag(i, l) => write!(f, "@{i} {l}"),
            Lifting::Comp(c) => {
                write!(f, "{}<", c.outer)?;
                for (i, a) in c.inner.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ">")
            }
        }
    }
}

impl fmt::Debug for Lifting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---------------------------------------------------------------- Bool

impl Bool {
    pub fn var(v: Var) -> Bool {
        Bool::Var(v)
    }

    pub fn name(s: &str) -> Bool {
        Bool::Var(Var::name(s))
    }

    pub fn not(b: Bool) -> Bool {
        match b {
            Bool::Top => Bool::Bot,
            Bool::Bot => Bool::Top,
            Bool::Not(inner) => *inner,
            other => Bool::Not(Box::new(other)),
        }
    }

    /// Conjunction with constant folding and flattening.
    pub fn and(items: impl IntoIterator<Item = Bool>) -> Bool {
        let mut out = Vec::new();
        for it in items {
            match it {
                Bool::Top => {}
                Bool::Bot => return Bool::Bot,
                Bool::And(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        match out.len() {
            0 => Bool::Top,
            1 => out.pop().unwrap(),
            _ => Bool::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = Bool>) -> Bool {
        let mut out = Vec::new();
        for it in items {
            match it {
                Bool::Bot => {}
                Bool::Top => return Bool::Top,
                Bool::Or(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        match out.len() {
            0 => Bool::Bot,
            1 => out.pop().unwrap(),
            _ => Bool::Or(out),
        }
    }

    pub fn conj_of<'a>(vars: impl IntoIterator<Item = &'a Var>) -> Bool {
        Bool::and(vars.into_iter().map(|v| Bool::Var(v.clone())))
    }

    pub fn disj_of<'a>(vars: impl IntoIterator<Item = &'a Var>) -> Bool {
        Bool::or(vars.into_iter().map(|v| Bool::Var(v.clone())))
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Bool::Var(v) => {
                out.insert(v.clone());
            }
            Bool::Top | Bool::Bot => {}
            Bool::And(xs) | Bool::Or(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            Bool::Not(x) => x.collect_vars(out),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn eval(&self, truth: &dyn Fn(&Var) -> bool) -> bool {
        match self {
            Bool::Var(v) => truth(v),
            Bool::Top => true,
            Bool::Bot => false,
            Bool::And(xs) => xs.iter().all(|x| x.eval(truth)),
            Bool::Or(xs) => xs.iter().any(|x| x.eval(truth)),
            Bool::Not(x) => !x.eval(truth),
        }
    }

    /// Bitmask evaluation: `val(v)` gives the set of points where `v` holds.
    pub fn eval_mask(&self, all: u64, val: &dyn Fn(&Var) -> u64) -> u64 {
        match self {
            Bool::Var(v) => val(v) & all,
            Bool::Top => all,
            Bool::Bot => 0,
            Bool::And(xs) => xs.iter().fold(all, |acc, x| acc & x.eval_mask(all, val)),
            Bool::Or(xs) => xs.iter().fold(0, |acc, x| acc | x.eval_mask(all, val)),
            Bool::Not(x) => all & !x.eval_mask(all, val),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Bool::Var(_) | Bool::Top | Bool::Bot => true,
            Bool::And(xs) | Bool::Or(xs) => xs.iter().all(Bool::is_positive),
            Bool::Not(_) => false,
        }
    }

    /// Is the formula monotone-syntactically positive in `v`?
    pub fn is_positive_in(&self, v: &Var) -> bool {
        self.nnf().positive_in_nnf(v)
    }

    fn positive_in_nnf(&self, v: &Var) -> bool {
        match self {
            Bool::Var(_) | Bool::Top | Bool::Bot => true,
            Bool::And(xs) | Bool::Or(xs) => xs.iter().all(|x| x.positive_in_nnf(v)),
            Bool::Not(x) => !matches!(&**x, Bool::Var(w) if w == v),
        }
    }

    /// Negation normal form: negations only in front of variables.
    pub fn nnf(&self) -> Bool {
        self.nnf_pol(false)
    }

    fn nnf_pol(&self, neg: bool) -> Bool {
        match (self, neg) {
            (Bool::Var(v), false) => Bool::Var(v.clone()),
            (Bool::Var(v), true) => Bool::Not(Box::new(Bool::Var(v.clone()))),
            (Bool::Top, false) | (Bool::Bot, true) => Bool::Top,
            (Bool::Top, true) | (Bool::Bot, false) => Bool::Bot,
            (Bool::And(xs), false) | (Bool::Or(xs), true) => {
                Bool::and(xs.iter().map(|x| x.nnf_pol(neg)))
            }
            (Bool::Or(xs), false) | (Bool::And(xs), true) => {
                Bool::or(xs.iter().map(|x| x.nnf_pol(neg)))
            }
            (Bool::Not(x), _) => x.nnf_pol(!neg),
        }
    }

    /// Replace every variable by a formula.
    pub fn subst(&self, f: &mut dyn FnMut(&Var) -> Result<Bool>) -> Result<Bool> {
        Ok(match self {
            Bool::Var(v) => f(v)?,
            Bool::Top => Bool::Top,
            Bool::Bot => Bool::Bot,
            Bool::And(xs) => Bool::And(xs.iter().map(|x| x.subst(f)).collect::<Result<_>>()?),
            Bool::Or(xs) => Bool::Or(xs.iter().map(|x| x.subst(f)).collect::<Result<_>>()?),
            Bool::Not(x) => Bool::Not(Box::new(x.subst(f)?)),
        })
    }

    pub fn rename(&self, f: &mut dyn FnMut(&Var) -> Var) -> Bool {
        self.subst(&mut |v| Ok(Bool::Var(f(v))))
            .expect("renaming is total")
    }

    /// Replace variables by one-step formulas, producing a one-step formula.
    pub fn subst_one_step(&self, f: &mut dyn FnMut(&Var) -> Result<OneStep>) -> Result<OneStep> {
        Ok(match self {
            Bool::Var(v) => f(v)?,
            Bool::Top => OneStep::Top,
            Bool::Bot => OneStep::Bot,
            Bool::And(xs) => OneStep::And(
                xs.iter()
                    .map(|x| x.subst_one_step(f))
                    .collect::<Result<_>>()?,
            ),
            Bool::Or(xs) => OneStep::Or(
                xs.iter()
                    .map(|x| x.subst_one_step(f))
                    .collect::<Result<_>>()?,
            ),
            Bool::Not(x) => OneStep::Not(Box::new(x.subst_one_step(f)?)),
        })
    }

    /// Flattened, deduplicated, sorted form with constants folded.
    pub fn canonical(&self) -> Bool {
        match self {
            Bool::Var(_) | Bool::Top | Bool::Bot => self.clone(),
            Bool::Not(x) => Bool::not(x.canonical()),
            Bool::And(xs) => {
                let mut items = Vec::new();
                for x in xs {
                    match x.canonical() {
                        Bool::Top => {}
                        Bool::Bot => return Bool::Bot,
                        Bool::And(ys) => items.extend(ys),
                        y => items.push(y),
                    }
                }
                items.sort();
                items.dedup();
                match items.len() {
                    0 => Bool::Top,
                    1 => items.pop().unwrap(),
                    _ => Bool::And(items),
                }
            }
            Bool::Or(xs) => {
                let mut items = Vec::new();
                for x in xs {
                    match x.canonical() {
                        Bool::Bot => {}
                        Bool::Top => return Bool::Top,
                        Bool::Or(ys) => items.extend(ys),
                        y => items.push(y),
                    }
                }
                items.sort();
                items.dedup();
                match items.len() {
                    0 => Bool::Bot,
                    1 => items.pop().unwrap(),
                    _ => Bool::Or(items),
                }
            }
        }
    }

    /// Minimal sets `B` of variables with `/\B |= self`, for positive formulas.
    pub fn minimal_terms(&self) -> Result<Vec<BTreeSet<Var>>> {
        match self {
            Bool::Var(v) => Ok(vec![BTreeSet::from([v.clone()])]),
            Bool::Top => Ok(vec![BTreeSet::new()]),
            Bool::Bot => Ok(vec![]),
            Bool::Or(xs) => {
                let mut acc = Vec::new();
                for x in xs {
                    acc.extend(x.minimal_terms()?);
                }
                Ok(minimize_sets(acc))
            }
            Bool::And(xs) => {
                let mut acc = vec![BTreeSet::new()];
                for x in xs {
                    let ts = x.minimal_terms()?;
                    let mut next = Vec::with_capacity(acc.len() * ts.len());
                    for a in &acc {
                        for t in &ts {
                            next.push(a.union(t).cloned().collect());
                        }
                    }
                    acc = minimize_sets(next);
                }
                Ok(acc)
            }
            Bool::Not(_) => Err(Error::NotPositive(self.to_string())),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Bool::Var(_) | Bool::Top | Bool::Bot => 1,
            Bool::And(xs) | Bool::Or(xs) => 1 + xs.iter().map(Bool::size).sum::<usize>(),
            Bool::Not(x) => 1 + x.size(),
        }
    }

    fn is_atomic(&self) -> bool {
        match self {
            Bool::Var(_) | Bool::Top | Bool::Bot | Bool::Not(_) => true,
            Bool::And(xs) | Bool::Or(xs) => xs.len() <= 1,
        }
    }

    pub(crate) fn render(&self, out: &mut String, var: &dyn Fn(&Var, &mut String)) {
        match self {
            Bool::Var(v) => var(v, out),
            Bool::Top => out.push_str("true"),
            Bool::Bot => out.push_str("false"),
            Bool::Not(x) => {
                out.push('~');
                x.render_atomic(out, var);
            }
            Bool::And(xs) if xs.is_empty() => out.push_str("true"),
            Bool::Or(xs) if xs.is_empty() => out.push_str("false"),
            Bool::And(xs) => render_list(xs, " & ", out, |x, o| x.render_operand(o, var, true)),
            Bool::Or(xs) => render_list(xs, " | ", out, |x, o| x.render_operand(o, var, false)),
        }
    }

    fn render_operand(&self, out: &mut String, var: &dyn Fn(&Var, &mut String), in_and: bool) {
        let needs = match self {
            Bool::Or(xs) => xs.len() > 1,
            Bool::And(xs) => in_and && xs.len() > 1,
            _ => false,
        };
        if needs {
            out.push('(');
            self.render(out, var);
            out.push(')');
        } else {
            self.render(out, var);
        }
    }

    pub(crate) fn render_atomic(&self, out: &mut String, var: &dyn Fn(&Var, &mut String)) {
        if self.is_atomic() {
            self.render(out, var);
        } else {
            out.push('(');
            self.render(out, var);
            out.push(')');
        }
    }
}

fn render_list<T>(xs: &[T], sep: &str, out: &mut String, mut item: impl FnMut(&T, &mut String)) {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        item(x, out);
    }
}

pub(crate) fn plain_var(v: &Var, out: &mut String) {
    let _ = write!(out, "{v}");
}

impl fmt::Display for Bool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(&mut s, &plain_var);
        f.write_str(&s)
    }
}

impl fmt::Debug for Bool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Keep only the inclusion-minimal sets, deduplicated and sorted.
pub fn minimize_sets(mut sets: Vec<BTreeSet<Var>>) -> Vec<BTreeSet<Var>> {
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut out: Vec<BTreeSet<Var>> = Vec::new();
    for s in sets {
        if !out.iter().any(|m| m.is_subset(&s)) {
            out.push(s);
        }
    }
    out.sort();
    out
}

// ---------------------------------------------------------------- OneStep

impl OneStep {
    pub fn modal(l: Lifting, args: Vec<Bool>) -> OneStep {
        OneStep::Modal(l, args)
    }

    pub fn not(a: OneStep) -> OneStep {
        match a {
            OneStep::Top => OneStep::Bot,
            OneStep::Bot => OneStep::Top,
            OneStep::Not(x) => *x,
            x => OneStep::Not(Box::new(x)),
        }
    }

    pub fn and(items: impl IntoIterator<Item = OneStep>) -> OneStep {
        let mut out = Vec::new();
        for it in items {
            match it {
                OneStep::Top => {}
                OneStep::Bot => return OneStep::Bot,
                OneStep::And(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        match out.len() {
            0 => OneStep::Top,
            1 => out.pop().unwrap(),
            _ => OneStep::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = OneStep>) -> OneStep {
        let mut out = Vec::new();
        for it in items {
            match it {
                OneStep::Bot => {}
                OneStep::Top => return OneStep::Top,
                OneStep::Or(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        match out.len() {
            0 => OneStep::Bot,
            1 => out.pop().unwrap(),
            _ => OneStep::Or(out),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            OneStep::Top | OneStep::Bot => {}
            OneStep::Modal(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            OneStep::And(xs) | OneStep::Or(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            OneStep::Not(x) => x.collect_vars(out),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Positive at both levels (the fragment `ML1+`).
    pub fn is_positive(&self) -> bool {
        match self {
            OneStep::Top | OneStep::Bot => true,
            OneStep::Modal(_, args) => args.iter().all(Bool::is_positive),
            OneStep::And(xs) | OneStep::Or(xs) => xs.iter().all(OneStep::is_positive),
            OneStep::Not(_) => false,
        }
    }

    /// No negation at the modal level (arguments may still contain negation).
    pub fn is_modal_positive(&self) -> bool {
        match self {
            OneStep::Top | OneStep::Bot | OneStep::Modal(..) => true,
            OneStep::And(xs) | OneStep::Or(xs) => xs.iter().all(OneStep::is_modal_positive),
            OneStep::Not(_) => false,
        }
    }

    pub fn subst(&self, f: &mut dyn FnMut(&Var) -> Result<Bool>) -> Result<OneStep> {
        Ok(match self {
            OneStep::Top => OneStep::Top,
            OneStep::Bot => OneStep::Bot,
            OneStep::Modal(l, args) => OneStep::Modal(
                l.clone(),
                args.iter().map(|a| a.subst(f)).collect::<Result<_>>()?,
            ),
            OneStep::And(xs) => OneStep::And(xs.iter().map(|x| x.subst(f)).collect::<Result<_>>()?),
            OneStep::Or(xs) => OneStep::Or(xs.iter().map(|x| x.subst(f)).collect::<Result<_>>()?),
            OneStep::Not(x) => OneStep::Not(Box::new(x.subst(f)?)),
        })
    }

    pub fn rename(&self, f: &mut dyn FnMut(&Var) -> Var) -> OneStep {
        self.subst(&mut |v| Ok(Bool::Var(f(v))))
            .expect("renaming is total")
    }

    /// Rebuild the formula, transforming each modal atom.
    pub fn map_modal(
        &self,
        f: &mut dyn FnMut(&Lifting, &[Bool]) -> Result<OneStep>,
    ) -> Result<OneStep> {
        Ok(match self {
            OneStep::Top => OneStep::Top,
            OneStep::Bot => OneStep::Bot,
            OneStep::Modal(l, args) => f(l, args)?,
            OneStep::And(xs) => OneStep::and(
                xs.iter()
                    .map(|x| x.map_modal(f))
                    .collect::<Result<Vec<_>>>()?,
            ),
            OneStep::Or(xs) => OneStep::or(
                xs.iter()
                    .map(|x| x.map_modal(f))
                    .collect::<Result<Vec<_>>>()?,
            ),
            OneStep::Not(x) => OneStep::not(x.map_modal(f)?),
        })
    }

    pub fn max_grade(&self) -> u32 {
        match self {
            OneStep::Top | OneStep::Bot => 0,
            OneStep::Modal(l, _) => l.max_grade(),
            OneStep::And(xs) | OneStep::Or(xs) => {
                xs.iter().map(OneStep::max_grade).max().unwrap_or(0)
            }
            OneStep::Not(x) => x.max_grade(),
        }
    }

    pub fn liftings(&self, out: &mut Vec<Lifting>) {
        match self {
            OneStep::Top | OneStep::Bot => {}
            OneStep::Modal(l, _) => out.push(l.clone()),
            OneStep::And(xs) | OneStep::Or(xs) => xs.iter().for_each(|x| x.liftings(out)),
            OneStep::Not(x) => x.liftings(out),
        }
    }

    pub fn canonical(&self) -> OneStep {
        match self {
            OneStep::Top | OneStep::Bot => self.clone(),
            OneStep::Modal(l, args) => {
                OneStep::Modal(l.clone(), args.iter().map(Bool::canonical).collect())
            }
            OneStep::Not(x) => OneStep::not(x.canonical()),
            OneStep::And(xs) => {
                let mut items = Vec::new();
                for x in xs {
                    match x.canonical() {
                        OneStep::Top => {}
                        OneStep::Bot => return OneStep::Bot,
                        OneStep::And(ys) => items.extend(ys),
                        y => items.push(y),
                    }
                }
                items.sort();
                items.dedup();
                match items.len() {
                    0 => OneStep::Top,
                    1 => items.pop().unwrap(),
                    _ => OneStep::And(items),
                }
            }
            OneStep::Or(xs) => {
                let mut items = Vec::new();
                for x in xs {
                    match x.canonical() {
                        OneStep::Bot => {}
                        OneStep::Top => return OneStep::Top,
                        OneStep::Or(ys) => items.extend(ys),
                        y => items.push(y),
                    }
                }
                items.sort();
                items.dedup();
                match items.len() {
                    0 => OneStep::Bot,
                    1 => items.pop().unwrap(),
                    _ => OneStep::Or(items),
                }
            }
        }
    }

    /// Disjunctive normal form over modal atoms (for modal-positive input):
    /// a list of conjunctions, each a list of `(lifting, args)` atoms.
    pub fn modal_dnf(&self) -> Result<Vec<Vec<(Lifting, Vec<Bool>)>>> {
        match self {
            OneStep::Top => Ok(vec![vec![]]),
            OneStep::Bot => Ok(vec![]),
            OneStep::Modal(l, args) => Ok(vec![vec![(l.clone(), args.clone())]]),
            OneStep::Or(xs) => {
                let mut out = Vec::new();
                for x in xs {
                    out.extend(x.modal_dnf()?);
                }
                Ok(out)
            }
            OneStep::And(xs) => {
                let mut acc: Vec<Vec<(Lifting, Vec<Bool>)>> = vec![vec![]];
                for x in xs {
                    let d = x.modal_dnf()?;
                    let mut next = Vec::with_capacity(acc.len() * d.len());
                    for a in &acc {
                        for c in &d {
                            let mut m = a.clone();
                            m.extend(c.iter().cloned());
                            m.sort();
                            m.dedup();
                            next.push(m);
                        }
                    }
                    next.sort();
                    next.dedup();
                    if next.len() > 1 << 16 {
                        return Err(crate::error::resource(
                            "modal DNF exceeds 65536 conjunctions",
                        ));
                    }
                    acc = next;
                }
                Ok(acc)
            }
            OneStep::Not(_) => Err(Error::NotPositive(self.to_string())),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            OneStep::Top | OneStep::Bot => 1,
            OneStep::Modal(_, args) => 1 + args.iter().map(Bool::size).sum::<usize>(),
            OneStep::And(xs) | OneStep::Or(xs) => 1 + xs.iter().map(OneStep::size).sum::<usize>(),
            OneStep::Not(x) => 1 + x.size(),
        }
    }

    fn is_atomic(&self) -> bool {
        match self {
            OneStep::Top | OneStep::Bot | OneStep::Modal(..) | OneStep::Not(_) => true,
            OneStep::And(xs) | OneStep::Or(xs) => xs.len() <= 1,
        }
    }

    /// Render with a custom variable printer.
    pub fn render_with(&self, out: &mut String, var: &dyn Fn(&Var, &mut String)) {
        match self {
            OneStep::Top => out.push_str("true"),
            OneStep::Bot => out.push_str("false"),
            OneStep::Modal(l, args) => render_modal(l, args, out, var),
            OneStep::Not(x) => {
                out.push('~');
                x.render_atomic(out, var);
            }
            OneStep::And(xs) if xs.is_empty() => out.push_str("true"),
            OneStep::Or(xs) if xs.is_empty() => out.push_str("false"),
            OneStep::And(xs) => render_list(xs, " & ", out, |x, o| x.render_operand(o, var, true)),
            OneStep::Or(xs) => render_list(xs, " | ", out, |x, o| x.render_operand(o, var, false)),
        }
    }

    fn render_operand(&self, out: &mut String, var: &dyn Fn(&Var, &mut String), in_and: bool) {
        let needs = match self {
            OneStep::Or(xs) => xs.len() > 1,
            OneStep::And(xs) => in_and && xs.len() > 1,
            _ => false,
        };
        if needs {
            out.push('(');
            self.render_with(out, var);
            out.push(')');
        } else {
            self.render_with(out, var);
        }
    }

    fn render_atomic(&self, out: &mut String, var: &dyn Fn(&Var, &mut String)) {
        if self.is_atomic() {
            self.render_with(out, var);
        } else {
            out.push('(');
            self.render_with(out, var);
            out.push(')');
        }
    }
}

/// Prefix of a modality in the surface syntax (without its arguments).
fn render_prefix(l: &Lifting, out: &mut String) {
    match l {
        Lifting::Diamond => out.push_str("<>"),
        Lifting::Box => out.push_str("[]"),
        Lifting::AtLeast(k) => {
            let _ = write!(out, "<{k}>");
        }
        Lifting::Fewer(k) => {
            let _ = write!(out, "[{k}]");
        }
        Lifting::Next => out.push_str("X "),
        Lifting::Label(s) => {
            let _ = write!(out, "!{s}");
        }
        Lifting::NotLabel(s) => {
            let _ = write!(out, "!~{s}");
        }
        Lifting::Top => out.push_str("true"),
        Lifting::Bot => out.push_str("false"),
        Lifting::Tag(i, inner) => {
            let _ = write!(out, "@{i} ");
            render_prefix(inner, out);
        }
        Lifting::Comp(c) => render_prefix(&c.outer, out),
    }
}

fn innermost(l: &Lifting) -> &Lifting {
    match l {
        Lifting::Tag(_, inner) => innermost(inner),
        other => other,
    }
}

/// Composed liftings are printed in nested form: the outer modality applied
/// to the inner formulas with the arguments plugged in.
pub(crate) fn render_modal(
    l: &Lifting,
    args: &[Bool],
    out: &mut String,
    var: &dyn Fn(&Var, &mut String),
) {
    render_modal_generic(l, args.len(), out, &|i, o| args[i].render_atomic(o, var));
}

/// Like [`render_modal`], with argument `i` printed (atomically) by `arg`.
pub(crate) fn render_modal_generic(
    l: &Lifting,
    n: usize,
    out: &mut String,
    arg: &dyn Fn(usize, &mut String),
) {
    render_prefix(l, out);
    match innermost(l) {
        Lifting::Comp(c) => {
            for inner in &c.inner {
                out.push('(');
                let plug = |v: &Var, o: &mut String| match v.as_index().filter(|&i| i < n) {
                    Some(i) => arg(i, o),
                    None => plain_var(v, o),
                };
                inner.render_with(out, &plug);
                out.push(')');
            }
        }
        _ => {
            for i in 0..n {
                arg(i, out);
            }
        }
    }
}

impl fmt::Display for OneStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render_with(&mut s, &plain_var);
        f.write_str(&s)
    }
}

impl fmt::Debug for OneStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Bool {
        Bool::name(s)
    }

    #[test]
    fn minimal_terms_of_cnf() {
        let f = Bool::And(vec![
            Bool::Or(vec![v("a"), v("b")]),
            Bool::Or(vec![v("a"), v("c")]),
        ]);
        let ts = f.minimal_terms().unwrap();
        let a = Var::name("a");
        let b = Var::name("b");
        let c = Var::name("c");
        assert_eq!(ts, vec![BTreeSet::from([a]), BTreeSet::from([b, c])]);
    }

    #[test]
    fn canonical_sorts_and_dedups() {
        let f = OneStep::And(vec![
            OneStep::Modal(Lifting::Diamond, vec![v("b")]),
            OneStep::And(vec![
                OneStep::Modal(Lifting::Diamond, vec![v("a")]),
                OneStep::Top,
            ]),
            OneStep::Modal(Lifting::Diamond, vec![v("b")]),
        ]);
        assert_eq!(f.canonical().to_string(), "<>a & <>b");
    }

    #[test]
    fn render_precedence() {
        let f = OneStep::Or(vec![
            OneStep::And(vec![
                OneStep::Modal(Lifting::Box, vec![Bool::Or(vec![v("a"), v("b")])]),
                OneStep::Modal(Lifting::AtLeast(2), vec![v("c")]),
            ]),
            OneStep::Not(Box::new(OneStep::Modal(Lifting::Next, vec![v("a")]))),
        ]);
        assert_eq!(f.to_string(), "[](a | b) & <2>c | ~X a");
    }

    #[test]
    fn nnf_pushes_negation() {
        let f = Bool::Not(Box::new(Bool::And(vec![
            v("a"),
            Bool::Not(Box::new(v("b"))),
        ])));
        assert_eq!(f.nnf().to_string(), "~a | b");
    }

    #[test]
    fn modal_dnf_distributes() {
        let d = |x: &str| OneStep::Modal(Lifting::Diamond, vec![v(x)]);
        let f = OneStep::And(vec![OneStep::Or(vec![d("a"), d("b")]), d("c")]);
        assert_eq!(f.modal_dnf().unwrap().len(), 2);
    }
}
