//! Bases for sums, products and compositions of signatures.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bases::{Basis, Dj, DjTerm};
use crate::error::{resource, Error, Result};
use crate::logic::{Bool, Composed, Lifting, OneStep};
use crate::var::Var;

/// Cap on the number of letters of a composite basis formula.
const MAX_LETTERS: usize = 64;

pub(super) fn distribute(basis: &Basis, l: &Lifting, args: &[Bool]) -> Result<Dj> {
    let unknown = || Error::UnknownLifting {
        lifting: l.to_string(),
        functor: basis.functor().to_string(),
    };
    match (basis, l) {
        (Basis::Sum(a, b), Lifting::Tag(i, inner)) => {
            let d = if *i == 1 {
                a.distribute(inner, args)?
            } else {
                b.distribute(inner, args)?
            };
            Ok(Dj::term(DjTerm::Inj(*i, d)))
        }
        (Basis::Product(a, b), Lifting::Tag(i, inner)) => Ok(Dj::term(if *i == 1 {
            DjTerm::Pair(a.distribute(inner, args)?, Dj::top())
        } else {
            DjTerm::Pair(Dj::top(), b.distribute(inner, args)?)
        })),
        (Basis::Compose(d1, d2), Lifting::Comp(c)) => distribute_composed(d1, d2, c, args),
        _ => Err(unknown()),
    }
}

/// `lambda<g_1..g_m>(args)`: normalise each `g_j(args)` in the inner basis,
/// use the resulting inner terms as letters for the outer law, and turn every
/// conjunction of letters back into an inner basis formula.
fn distribute_composed(d1: &Basis, d2: &Basis, c: &Composed, args: &[Bool]) -> Result<Dj> {
    let mut letters: Vec<DjTerm> = Vec::new();
    let mut outer_args = Vec::new();
    for g in &c.inner {
        let plugged = g.subst(&mut |v| {
            v.as_index()
                .and_then(|i| args.get(i).cloned())
                .ok_or_else(|| Error::UnmappedVar(v.clone()))
        })?;
        let nf = d2.normal_form(&plugged)?;
        let mut disj = Vec::new();
        for t in nf.0 {
            let k = match letters.iter().position(|x| *x == t) {
                Some(k) => k,
                None => {
                    letters.push(t);
                    letters.len() - 1
                }
            };
            disj.push(Bool::Var(Var::Index(k)));
        }
        outer_args.push(Bool::or(disj));
    }
    if letters.len() > MAX_LETTERS {
        return Err(resource(format!(
            "composite alphabet of {} letters",
            letters.len()
        )));
    }
    let outer = d1.distribute(&c.outer, &outer_args)?;
    let letter_dj: Vec<Dj> = letters.into_iter().map(Dj::term).collect();
    relabel(&outer, &mut |set| {
        let parts: Vec<Dj> = set
            .iter()
            .map(|v| letter_dj[v.as_index().expect("letter index")].clone())
            .collect();
        d2.conjoin(&parts)
    })
}

/// Replace every set-of-letters variable of `outer` by a fresh letter index
/// whose inner formula is computed by `conj`; yields one composite term.
fn relabel(
    outer: &Dj,
    conj: &mut dyn FnMut(&std::collections::BTreeSet<Var>) -> Result<Dj>,
) -> Result<Dj> {
    let mut table: BTreeMap<Var, usize> = BTreeMap::new();
    let mut letters = Vec::new();
    for v in outer.vars() {
        let set = v
            .as_set()
            .ok_or_else(|| Error::Invalid(format!("expected a letter set, got {v}")))?;
        table.insert(v.clone(), letters.len());
        letters.push(conj(set)?);
    }
    let o = outer.rename(&mut |v| Var::Index(table[v]));
    Ok(Dj::term(DjTerm::Comp(o, letters)))
}

pub(super) fn binary(basis: &Basis, s: &DjTerm, t: &DjTerm) -> Result<Dj> {
    match (basis, s, t) {
        (Basis::Sum(a, b), DjTerm::Inj(i, x), DjTerm::Inj(j, y)) => {
            if i != j {
                return Ok(Dj::bot());
            }
            let d = if *i == 1 {
                a.binary(x, y)?
            } else {
                b.binary(x, y)?
            };
            Ok(Dj::term(DjTerm::Inj(*i, d)))
        }
        (Basis::Product(a, b), DjTerm::Pair(x1, x2), DjTerm::Pair(y1, y2)) => {
            Ok(Dj::term(DjTerm::Pair(a.binary(x1, y1)?, b.binary(x2, y2)?)))
        }
        (Basis::Compose(d1, d2), DjTerm::Comp(o1, l1), DjTerm::Comp(o2, l2)) => {
            let shift = l1.len();
            let o2 = o2.rename(&mut |v| Var::Index(v.as_index().expect("letter index") + shift));
            let g = d1.binary(o1, &o2)?;
            let letter = |k: usize| {
                if k < shift {
                    l1[k].clone()
                } else {
                    l2[k - shift].clone()
                }
            };
            let mut table: BTreeMap<Var, usize> = BTreeMap::new();
            let mut letters = Vec::new();
            for v in g.vars() {
                let d = match (v.as_index(), v.as_pair()) {
                    (Some(k), _) => letter(k),
                    (_, Some((x, y))) => {
                        let (Some(i), Some(j)) = (x.as_index(), y.as_index()) else {
                            return Err(Error::Invalid(format!("unexpected letter {v}")));
                        };
                        d2.binary(&letter(i), &letter(j))?
                    }
                    _ => return Err(Error::Invalid(format!("unexpected letter {v}"))),
                };
                table.insert(v.clone(), letters.len());
                letters.push(d);
            }
            let o = g.rename(&mut |v| Var::Index(table[v]));
            Ok(Dj::term(DjTerm::Comp(o, letters)))
        }
        _ => Err(Error::Invalid(format!(
            "terms {s} and {t} do not belong to basis {}",
            basis.functor()
        ))),
    }
}

/// The one-step formula of a composite term: each outer modal atom becomes a
/// composed lifting whose inner formulas are the letters' formulas over the
/// argument positions.
pub(super) fn compose_formula(outer: &Dj, letters: &[Dj]) -> OneStep {
    let mut positions: Vec<Var> = letters.iter().flat_map(|l| l.vars()).collect();
    positions.sort();
    positions.dedup();
    let pos: BTreeMap<Var, usize> = positions
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    let inner: Vec<OneStep> = letters
        .iter()
        .map(|l| l.rename(&mut |v| Var::Index(pos[v])).to_formula())
        .collect();
    let args: Vec<Bool> = positions.iter().map(|v| Bool::Var(v.clone())).collect();
    outer
        .to_formula()
        .map_modal(&mut |l, betas| {
            if betas.is_empty() {
                return Ok(match l {
                    Lifting::Top => OneStep::Top,
                    Lifting::Bot => OneStep::Bot,
                    _ => OneStep::Modal(
                        Lifting::Comp(Arc::new(Composed {
                            outer: l.clone(),
                            inner: vec![],
                            arity: 0,
                        })),
                        vec![],
                    ),
                });
            }
            let inner_formulas = betas
                .iter()
                .map(|b| {
                    b.subst_one_step(&mut |y| {
                        y.as_index()
                            .and_then(|k| inner.get(k).cloned())
                            .ok_or_else(|| Error::UnmappedVar(y.clone()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(OneStep::Modal(
                Lifting::Comp(Arc::new(Composed {
                    outer: l.clone(),
                    inner: inner_formulas,
                    arity: positions.len(),
                })),
                args.clone(),
            ))
        })
        .expect("letters cover every outer variable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::conj_subst;
    use crate::functors::{Caps, Functor};
    use crate::logic::equiv::one_step_equivalent;

    fn check(f: &Functor, lhs: &OneStep, d: &Dj) {
        let rhs = conj_subst(&d.to_formula()).unwrap();
        let r = one_step_equivalent(f, lhs, &rhs, &Caps::default().with_carrier(2)).unwrap();
        assert!(r.holds(), "{lhs} vs {d} ({rhs}): {r:?}");
    }

    #[test]
    fn sum_laws() {
        let f = Functor::sum(Functor::Powerset, Functor::Powerset);
        let b = Basis::for_functor(&f).unwrap();
        let a = Bool::name("a");
        let l = Lifting::tag(1, Lifting::Diamond);
        check(
            &f,
            &OneStep::Modal(l.clone(), vec![a.clone()]),
            &b.distribute(&l, &[a.clone()]).unwrap(),
        );
        let x = b.distribute(&l, &[a.clone()]).unwrap();
        let y = b
            .distribute(&Lifting::tag(2, Lifting::Diamond), &[Bool::name("b")])
            .unwrap();
        assert!(b.binary(&x, &y).unwrap().is_bot());
    }

    #[test]
    fn product_laws() {
        let f = Functor::product(Functor::Powerset, Functor::Identity);
        let b = Basis::for_functor(&f).unwrap();
        let alpha = OneStep::and([
            OneStep::Modal(Lifting::tag(1, Lifting::Diamond), vec![Bool::name("a")]),
            OneStep::Modal(Lifting::tag(2, Lifting::Next), vec![Bool::name("b")]),
        ]);
        check(&f, &alpha, &b.normal_form(&alpha).unwrap());
    }

    #[test]
    fn compose_laws() {
        let f = Functor::compose(Functor::Powerset, Functor::Identity);
        let b = Basis::for_functor(&f).unwrap();
        let inner = OneStep::Modal(Lifting::Next, vec![Bool::Var(Var::Index(0))]);
        let l = Lifting::Comp(Arc::new(Composed {
            outer: Lifting::Diamond,
            inner: vec![inner],
            arity: 1,
        }));
        let alpha = OneStep::Modal(l.clone(), vec![Bool::name("a")]);
        let d = b.normal_form(&alpha).unwrap();
        assert!(b.contains(&d));
        check(&f, &alpha, &d);
        let box_l = Lifting::Comp(Arc::new(Composed {
            outer: Lifting::Box,
            inner: vec![OneStep::Modal(
                Lifting::Next,
                vec![Bool::Var(Var::Index(0))],
            )],
            arity: 1,
        }));
        let beta = OneStep::and([alpha.clone(), OneStep::Modal(box_l, vec![Bool::name("b")])]);
        check(&f, &beta, &b.normal_form(&beta).unwrap());
    }
}
