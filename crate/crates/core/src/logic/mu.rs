use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::functors::Functor;
use crate::logic::formula::{plain_var, render_modal_generic};
use crate::logic::{Bool, Lifting, OneStep};
use crate::var::Var;

/// Formulas of the coalgebraic mu-calculus.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mu {
    Prop(Var),
    Top,
    Bot,
    Not(Box<Mu>),
    And(Vec<Mu>),
    Or(Vec<Mu>),
    Modal(Lifting, Vec<Mu>),
    Mu(Var, Box<Mu>),
    Nu(Var, Box<Mu>),
}

impl Mu {
    pub fn prop(s: &str) -> Mu {
        Mu::Prop(Var::name(s))
    }

    pub fn not(m: Mu) -> Mu {
        Mu::Not(Box::new(m))
    }

    pub fn modal(l: Lifting, args: Vec<Mu>) -> Mu {
        Mu::Modal(l, args)
    }

    pub fn mu(x: &str, body: Mu) -> Mu {
        Mu::Mu(Var::name(x), Box::new(body))
    }

    pub fn nu(x: &str, body: Mu) -> Mu {
        Mu::Nu(Var::name(x), Box::new(body))
    }

    /// Free variables (letters and unbound fixpoint variables).
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Mu::Prop(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Mu::Top | Mu::Bot => {}
            Mu::Not(x) => x.collect_free(bound, out),
            Mu::And(xs) | Mu::Or(xs) | Mu::Modal(_, xs) => {
                xs.iter().for_each(|x| x.collect_free(bound, out))
            }
            Mu::Mu(v, b) | Mu::Nu(v, b) => {
                bound.push(v.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every lifting occurring in the formula.
    pub fn liftings(&self, out: &mut Vec<Lifting>) {
        match self {
            Mu::Prop(_) | Mu::Top | Mu::Bot => {}
            Mu::Not(x) | Mu::Mu(_, x) | Mu::Nu(_, x) => x.liftings(out),
            Mu::And(xs) | Mu::Or(xs) => xs.iter().for_each(|x| x.liftings(out)),
            Mu::Modal(l, xs) => {
                out.push(l.clone());
                xs.iter().for_each(|x| x.liftings(out));
            }
        }
    }

    pub fn check(&self, f: &Functor) -> Result<()> {
        let mut ls = Vec::new();
        self.liftings(&mut ls);
        for l in &ls {
            f.check_lifting(l)?;
        }
        self.check_modal_arity()?;
        self.check_positive(&mut Vec::new())
    }

    fn check_modal_arity(&self) -> Result<()> {
        match self {
            Mu::Modal(l, xs) => {
                if l.arity() != xs.len() {
                    return Err(Error::Arity {
                        lifting: l.to_string(),
                        expected: l.arity(),
                        got: xs.len(),
                    });
                }
                xs.iter().try_for_each(Mu::check_modal_arity)
            }
            Mu::Prop(_) | Mu::Top | Mu::Bot => Ok(()),
            Mu::Not(x) | Mu::Mu(_, x) | Mu::Nu(_, x) => x.check_modal_arity(),
            Mu::And(xs) | Mu::Or(xs) => xs.iter().try_for_each(Mu::check_modal_arity),
        }
    }

    /// Bound variables must occur under an even number of negations.
    fn check_positive(&self, neg: &mut Vec<(Var, bool)>) -> Result<()> {
        self.positive_rec(neg, false)
    }

    fn positive_rec(&self, bound: &mut Vec<(Var, bool)>, negated: bool) -> Result<()> {
        match self {
            Mu::Prop(v) => match bound.iter().rev().find(|(b, _)| b == v) {
                Some((_, parity)) if *parity != negated => Err(Error::NotPositive(format!(
                    "bound variable {v} occurs negatively"
                ))),
                _ => Ok(()),
            },
            Mu::Top | Mu::Bot => Ok(()),
            Mu::Not(x) => x.positive_rec(bound, !negated),
            Mu::And(xs) | Mu::Or(xs) | Mu::Modal(_, xs) => {
                xs.iter().try_for_each(|x| x.positive_rec(bound, negated))
            }
            Mu::Mu(v, b) | Mu::Nu(v, b) => {
                bound.push((v.clone(), negated));
                let r = b.positive_rec(bound, negated);
                bound.pop();
                r
            }
        }
    }

    /// Negation normal form; negations end up on free letters only.
    pub fn nnf(&self, f: &Functor) -> Result<Mu> {
        self.nnf_rec(f, false, &mut Vec::new())
    }

    fn nnf_rec(&self, f: &Functor, neg: bool, bound: &mut Vec<Var>) -> Result<Mu> {
        Ok(match self {
            Mu::Prop(v) => {
                if neg && !bound.contains(v) {
                    Mu::not(self.clone())
                } else {
                    // a negated bound variable is renamed back positively by
                    // the binder dualization below
                    self.clone()
                }
            }
            Mu::Top => {
                if neg {
                    Mu::Bot
                } else {
                    Mu::Top
                }
            }
            Mu::Bot => {
                if neg {
                    Mu::Top
                } else {
                    Mu::Bot
                }
            }
            Mu::Not(x) => x.nnf_rec(f, !neg, bound)?,
            Mu::And(xs) => {
                let ys = xs
                    .iter()
                    .map(|x| x.nnf_rec(f, neg, bound))
                    .collect::<Result<Vec<_>>>()?;
                if neg {
                    Mu::Or(ys)
                } else {
                    Mu::And(ys)
                }
            }
            Mu::Or(xs) => {
                let ys = xs
                    .iter()
                    .map(|x| x.nnf_rec(f, neg, bound))
                    .collect::<Result<Vec<_>>>()?;
                if neg {
                    Mu::And(ys)
                } else {
                    Mu::Or(ys)
                }
            }
            Mu::Modal(l, xs) => {
                if !neg {
                    Mu::Modal(
                        l.clone(),
                        xs.iter()
                            .map(|x| x.nnf_rec(f, false, bound))
                            .collect::<Result<_>>()?,
                    )
                } else {
                    let args: Vec<Bool> = (0..xs.len()).map(|i| Bool::Var(Var::Index(i))).collect();
                    let dual = f.dual_formula(l, args)?;
                    let negated = xs
                        .iter()
                        .map(|x| x.nnf_rec(f, true, bound))
                        .collect::<Result<Vec<_>>>()?;
                    Mu::from_one_step(&dual, &|v| {
                        v.as_index()
                            .and_then(|i| negated.get(i))
                            .cloned()
                            .ok_or(Error::UnmappedVar(v.clone()))
                    })?
                }
            }
            Mu::Mu(v, b) | Mu::Nu(v, b) => {
                bound.push(v.clone());
                let body = b.nnf_rec(f, neg, bound)?;
                bound.pop();
                let least = matches!(self, Mu::Mu(..)) != neg;
                if least {
                    Mu::Mu(v.clone(), Box::new(body))
                } else {
                    Mu::Nu(v.clone(), Box::new(body))
                }
            }
        })
    }

    /// Plug formulas into the variables of a one-step formula whose modal
    /// arguments are single variables or boolean combinations of them.
    pub fn from_one_step(a: &OneStep, arg: &dyn Fn(&Var) -> Result<Mu>) -> Result<Mu> {
        Ok(match a {
            OneStep::Top => Mu::Top,
            OneStep::Bot => Mu::Bot,
            OneStep::And(xs) => Mu::And(
                xs.iter()
                    .map(|x| Mu::from_one_step(x, arg))
                    .collect::<Result<_>>()?,
            ),
            OneStep::Or(xs) => Mu::Or(
                xs.iter()
                    .map(|x| Mu::from_one_step(x, arg))
                    .collect::<Result<_>>()?,
            ),
            OneStep::Not(x) => Mu::not(Mu::from_one_step(x, arg)?),
            OneStep::Modal(l, bs) => Mu::Modal(
                l.clone(),
                bs.iter()
                    .map(|b| Mu::from_bool(b, arg))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    pub fn from_bool(b: &Bool, arg: &dyn Fn(&Var) -> Result<Mu>) -> Result<Mu> {
        Ok(match b {
            Bool::Var(v) => arg(v)?,
            Bool::Top => Mu::Top,
            Bool::Bot => Mu::Bot,
            Bool::And(xs) => Mu::And(
                xs.iter()
                    .map(|x| Mu::from_bool(x, arg))
                    .collect::<Result<_>>()?,
            ),
            Bool::Or(xs) => Mu::Or(
                xs.iter()
                    .map(|x| Mu::from_bool(x, arg))
                    .collect::<Result<_>>()?,
            ),
            Bool::Not(x) => Mu::not(Mu::from_bool(x, arg)?),
        })
    }

    /// Capture-free substitution of `m` for the free variable `x`.
    pub fn subst(&self, x: &Var, m: &Mu) -> Mu {
        match self {
            Mu::Prop(v) if v == x => m.clone(),
            Mu::Prop(_) | Mu::Top | Mu::Bot => self.clone(),
            Mu::Not(y) => Mu::not(y.subst(x, m)),
            Mu::And(xs) => Mu::And(xs.iter().map(|y| y.subst(x, m)).collect()),
            Mu::Or(xs) => Mu::Or(xs.iter().map(|y| y.subst(x, m)).collect()),
            Mu::Modal(l, xs) => Mu::Modal(l.clone(), xs.iter().map(|y| y.subst(x, m)).collect()),
            Mu::Mu(v, _) | Mu::Nu(v, _) if v == x => self.clone(),
            Mu::Mu(v, b) | Mu::Nu(v, b) => {
                let body = b.subst(x, m);
                if matches!(self, Mu::Mu(..)) {
                    Mu::Mu(v.clone(), Box::new(body))
                } else {
                    Mu::Nu(v.clone(), Box::new(body))
                }
            }
        }
    }

    /// Flatten nested conjunctions/disjunctions and collapse trivial lists.
    pub fn canonical(&self) -> Mu {
        match self {
            Mu::Prop(_) | Mu::Top | Mu::Bot => self.clone(),
            Mu::Not(x) => Mu::not(x.canonical()),
            Mu::And(xs) | Mu::Or(xs) => {
                let is_and = matches!(self, Mu::And(_));
                let mut items = Vec::new();
                for x in xs {
                    match x.canonical() {
                        Mu::And(ys) if is_and => items.extend(ys),
                        Mu::Or(ys) if !is_and => items.extend(ys),
                        y => items.push(y),
                    }
                }
                match items.len() {
                    0 => {
                        if is_and {
                            Mu::Top
                        } else {
                            Mu::Bot
                        }
                    }
                    1 => items.pop().unwrap(),
                    _ => {
                        if is_and {
                            Mu::And(items)
                        } else {
                            Mu::Or(items)
                        }
                    }
                }
            }
            Mu::Modal(l, xs) => Mu::Modal(l.clone(), xs.iter().map(Mu::canonical).collect()),
            Mu::Mu(v, b) => Mu::Mu(v.clone(), Box::new(b.canonical())),
            Mu::Nu(v, b) => Mu::Nu(v.clone(), Box::new(b.canonical())),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Mu::Prop(_) | Mu::Top | Mu::Bot => 1,
            Mu::Not(x) | Mu::Mu(_, x) | Mu::Nu(_, x) => 1 + x.size(),
            Mu::And(xs) | Mu::Or(xs) | Mu::Modal(_, xs) => {
                1 + xs.iter().map(Mu::size).sum::<usize>()
            }
        }
    }

    /// Number of nested fixpoint alternations (0 for fixpoint free formulas).
    pub fn alternation_depth(&self) -> usize {
        fn go(m: &Mu, last: Option<bool>) -> usize {
            match m {
                Mu::Prop(_) | Mu::Top | Mu::Bot => 0,
                Mu::Not(x) => go(x, last),
                Mu::And(xs) | Mu::Or(xs) | Mu::Modal(_, xs) => {
                    xs.iter().map(|x| go(x, last)).max().unwrap_or(0)
                }
                Mu::Mu(_, b) | Mu::Nu(_, b) => {
                    let least = matches!(m, Mu::Mu(..));
                    let step = usize::from(last != Some(least));
                    step + go(b, Some(least))
                }
            }
        }
        go(self, None)
    }

    fn level(&self) -> u8 {
        match self {
            Mu::Mu(..) | Mu::Nu(..) => 0,
            Mu::Or(xs) if xs.len() > 1 => 1,
            Mu::And(xs) if xs.len() > 1 => 2,
            Mu::Or(xs) | Mu::And(xs) if xs.len() == 1 => 0,
            _ => 3,
        }
    }

    pub(crate) fn render(&self, out: &mut String) {
        match self {
            Mu::Prop(v) => plain_var(v, out),
            Mu::Top => out.push_str("true"),
            Mu::Bot => out.push_str("false"),
            Mu::And(xs) if xs.is_empty() => out.push_str("true"),
            Mu::Or(xs) if xs.is_empty() => out.push_str("false"),
            Mu::And(xs) | Mu::Or(xs) if xs.len() == 1 => xs[0].render(out),
            Mu::Not(x) => {
                out.push('~');
                x.render_at(3, out);
            }
            Mu::And(xs) => render_sep(xs, " & ", 3, out),
            Mu::Or(xs) => render_sep(xs, " | ", 2, out),
            Mu::Modal(l, xs) => {
                render_modal_generic(l, xs.len(), out, &|i, o| xs[i].render_at(3, o))
            }
            Mu::Mu(v, b) | Mu::Nu(v, b) => {
                out.push_str(if matches!(self, Mu::Mu(..)) {
                    "mu "
                } else {
                    "nu "
                });
                plain_var(v, out);
                out.push_str(". ");
                b.render(out);
            }
        }
    }

    fn render_at(&self, min: u8, out: &mut String) {
        if self.level() < min {
            out.push('(');
            self.render(out);
            out.push(')');
        } else {
            self.render(out);
        }
    }
}

fn render_sep(xs: &[Mu], sep: &str, min: u8, out: &mut String) {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        x.render_at(min, out);
    }
}

impl fmt::Display for Mu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(&mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for Mu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dia(m: Mu) -> Mu {
        Mu::Modal(Lifting::Diamond, vec![m])
    }

    #[test]
    fn render_precedence() {
        let f = Mu::mu("x", Mu::Or(vec![Mu::prop("p"), dia(Mu::prop("x"))]));
        assert_eq!(f.to_string(), "mu x. p | <>x");
        let g = Mu::And(vec![
            Mu::Or(vec![Mu::prop("p"), Mu::prop("q")]),
            dia(Mu::And(vec![Mu::prop("p"), Mu::prop("q")])),
        ]);
        assert_eq!(g.to_string(), "(p | q) & <>(p & q)");
        let h = Mu::Or(vec![Mu::mu("x", Mu::prop("x")), Mu::prop("q")]);
        assert_eq!(h.to_string(), "(mu x. x) | q");
    }

    #[test]
    fn nnf_dualizes() {
        let f = Mu::not(Mu::mu("x", Mu::Or(vec![Mu::prop("p"), dia(Mu::prop("x"))])));
        let n = f.nnf(&Functor::Powerset).unwrap();
        assert_eq!(n.to_string(), "nu x. ~p & []x");
    }

    #[test]
    fn positivity() {
        let bad = Mu::mu("x", Mu::not(Mu::prop("x")));
        assert!(bad.check(&Functor::Powerset).is_err());
        let ok = Mu::mu("x", Mu::not(Mu::not(Mu::prop("x"))));
        assert!(ok.check(&Functor::Powerset).is_ok());
    }

    #[test]
    fn free_and_alternation() {
        let f = Mu::nu(
            "y",
            Mu::mu(
                "x",
                Mu::Or(vec![
                    Mu::And(vec![Mu::prop("p"), dia(Mu::prop("y"))]),
                    dia(Mu::prop("x")),
                ]),
            ),
        );
        assert_eq!(f.free_vars().len(), 1);
        assert_eq!(f.alternation_depth(), 2);
        assert_eq!(Mu::prop("p").alternation_depth(), 0);
    }
}
