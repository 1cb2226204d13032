//! Bases for the identity functor and for labelled successors.

use std::collections::BTreeSet;

use crate::bases::{min_vars, set_var, Basis, Dj, DjTerm};
use crate::error::{Error, Result};
use crate::logic::{Bool, Lifting};
use crate::var::Var;

pub(super) fn distribute(basis: &Basis, l: &Lifting, args: &[Bool]) -> Result<Dj> {
    let unknown = || Error::UnknownLifting {
        lifting: l.to_string(),
        functor: basis.functor().to_string(),
    };
    match basis {
        Basis::Identity => match l {
            Lifting::Next => Ok(Dj::or(min_vars(&args[0])?.into_iter().map(DjTerm::Next))),
            _ => Err(unknown()),
        },
        Basis::Labeled(labels) => {
            let top = set_var(&BTreeSet::new());
            match l {
                Lifting::Next => {
                    let terms = min_vars(&args[0])?;
                    Ok(Dj::or(labels.iter().flat_map(|x| {
                        terms
                            .iter()
                            .map(|v| DjTerm::LabelNext(x.clone(), v.clone()))
                    })))
                }
                Lifting::Label(x) => Ok(Dj::term(DjTerm::LabelNext(x.clone(), top))),
                Lifting::NotLabel(x) => Ok(Dj::or(
                    labels
                        .iter()
                        .filter(|y| *y != x)
                        .map(|y| DjTerm::LabelNext(y.clone(), top.clone())),
                )),
                _ => Err(unknown()),
            }
        }
        _ => Err(unknown()),
    }
}

pub(super) fn binary(s: &DjTerm, t: &DjTerm) -> Result<Dj> {
    let pair = |a: &Var, b: &Var| Var::pair(a.clone(), b.clone());
    match (s, t) {
        (DjTerm::Next(a), DjTerm::Next(b)) => Ok(Dj::term(DjTerm::Next(pair(a, b)))),
        (DjTerm::LabelNext(x, a), DjTerm::LabelNext(y, b)) => Ok(if x == y {
            Dj::term(DjTerm::LabelNext(x.clone(), pair(a, b)))
        } else {
            Dj::bot()
        }),
        _ => Err(Error::Invalid(format!(
            "not identity/labelled basis terms: {s}, {t}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::conj_subst;
    use crate::functors::{Caps, Functor};
    use crate::logic::equiv::one_step_equivalent;
    use crate::logic::OneStep;

    #[test]
    fn labelled_laws() {
        let f = Functor::labeled(["l", "r"]);
        let b = Basis::for_functor(&f).unwrap();
        let a = Bool::name("a");
        for (l, args) in [
            (Lifting::Next, vec![a.clone()]),
            (Lifting::Label("l".into()), vec![]),
            (Lifting::NotLabel("l".into()), vec![]),
        ] {
            let d = b.distribute(&l, &args).unwrap();
            let lhs = OneStep::Modal(l, args);
            let rhs = conj_subst(&d.to_formula()).unwrap();
            assert!(
                one_step_equivalent(&f, &lhs, &rhs, &Caps::default())
                    .unwrap()
                    .holds(),
                "{lhs} / {d}"
            );
        }
        let x = DjTerm::LabelNext("l".into(), Var::name("a"));
        let y = DjTerm::LabelNext("r".into(), Var::name("b"));
        assert!(binary(&x, &y).unwrap().is_bot());
    }
}
