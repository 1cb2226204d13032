//! The cover modality basis for the powerset functor.

use std::collections::BTreeSet;

use crate::bases::{min_vars, set_var, Dj, DjTerm};
use crate::error::{resource, Error, Result};
use crate::logic::{Bool, Lifting, OneStep};
use crate::var::Var;

const MAX_SUBSETS: usize = 16;

fn empty_set() -> Var {
    set_var(&BTreeSet::new())
}

pub(super) fn distribute(l: &Lifting, args: &[Bool]) -> Result<Dj> {
    match l {
        Lifting::Diamond => {
            let terms = min_vars(&args[0])?;
            Ok(Dj::or(
                terms
                    .into_iter()
                    .map(|b| DjTerm::Nabla(BTreeSet::from([b, empty_set()]))),
            ))
        }
        Lifting::Box => {
            let terms = min_vars(&args[0])?;
            if terms.len() > MAX_SUBSETS {
                return Err(resource(format!(
                    "box argument with {} minimal terms",
                    terms.len()
                )));
            }
            Ok(Dj::or((0u32..1 << terms.len()).map(|mask| {
                DjTerm::Nabla(
                    terms
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, b)| b.clone())
                        .collect(),
                )
            })))
        }
        _ => Err(Error::UnknownLifting {
            lifting: l.to_string(),
            functor: "powerset".into(),
        }),
    }
}

/// `nabla G /\ nabla G'` is the disjunction of `nabla Z` over the relations
/// `Z` between `G` and `G'` with full domain and range.
pub(super) fn binary(s: &DjTerm, t: &DjTerm) -> Result<Dj> {
    let (DjTerm::Nabla(g), DjTerm::Nabla(h)) = (s, t) else {
        return Err(Error::Invalid(format!(
            "not powerset basis terms: {s}, {t}"
        )));
    };
    let g: Vec<&Var> = g.iter().collect();
    let h: Vec<&Var> = h.iter().collect();
    if g.is_empty() || h.is_empty() {
        // nabla {} is []false; it only meets another empty cover
        return Ok(if g.is_empty() && h.is_empty() {
            Dj::term(DjTerm::Nabla(BTreeSet::new()))
        } else {
            Dj::bot()
        });
    }
    let pairs: Vec<(usize, usize)> = (0..g.len())
        .flat_map(|i| (0..h.len()).map(move |j| (i, j)))
        .collect();
    if pairs.len() > 20 {
        return Err(resource(format!(
            "cover relation with {} pairs",
            pairs.len()
        )));
    }
    let mut out = Vec::new();
    for mask in 1u32..1 << pairs.len() {
        let (mut dom, mut ran) = (0u64, 0u64);
        let mut z = BTreeSet::new();
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                dom |= 1 << i;
                ran |= 1 << j;
                z.insert(Var::pair(g[i].clone(), h[j].clone()));
            }
        }
        if dom.count_ones() as usize == g.len() && ran.count_ones() as usize == h.len() {
            out.push(DjTerm::Nabla(z));
        }
    }
    Ok(Dj::or(out))
}

/// `/\<>pi_i /\ []rho == nabla({pi_i & rho} + {rho})` (at least one diamond),
/// and `[]rho == nabla{rho} | nabla{}`; arguments are then expanded into the
/// nonempty sets of their minimal terms.
pub(super) fn normal_form(alpha: &OneStep) -> Result<Dj> {
    let mut out = Vec::new();
    'conj: for conj in alpha.modal_dnf()? {
        let mut dias = Vec::new();
        let mut boxes = Vec::new();
        for (l, args) in conj {
            match l {
                Lifting::Diamond => dias.push(args[0].clone()),
                Lifting::Box => boxes.push(args[0].clone()),
                Lifting::Top => {}
                Lifting::Bot => continue 'conj,
                other => {
                    return Err(Error::UnknownLifting {
                        lifting: other.to_string(),
                        functor: "powerset".into(),
                    })
                }
            }
        }
        if dias.is_empty() && boxes.is_empty() {
            return Ok(Dj::top());
        }
        let rho = Bool::and(boxes);
        if dias.is_empty() {
            out.extend(expand_nabla(&[rho])?);
            out.push(DjTerm::Nabla(BTreeSet::new()));
        } else {
            let mut args: Vec<Bool> = dias
                .into_iter()
                .map(|p| Bool::and([p, rho.clone()]))
                .collect();
            args.push(rho);
            out.extend(expand_nabla(&args)?);
        }
    }
    Ok(Dj::or(out))
}

/// `nabla {phi_1 .. phi_n}` as a disjunction of covers over set variables:
/// one disjunct per choice of a nonempty set of minimal terms for each phi.
pub(crate) fn expand_nabla(args: &[Bool]) -> Result<Vec<DjTerm>> {
    let mut acc: Vec<BTreeSet<Var>> = vec![BTreeSet::new()];
    for phi in args {
        let terms = min_vars(phi)?;
        if terms.is_empty() {
            return Ok(vec![]);
        }
        if terms.len() > MAX_SUBSETS {
            return Err(resource(format!(
                "cover argument with {} minimal terms",
                terms.len()
            )));
        }
        let mut next = Vec::new();
        for a in &acc {
            for mask in 1u32..1 << terms.len() {
                let mut s = a.clone();
                s.extend(
                    terms
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, b)| b.clone()),
                );
                next.push(s);
            }
        }
        next.sort();
        next.dedup();
        if next.len() > 1 << 16 {
            return Err(resource("cover expansion exceeds 65536 disjuncts"));
        }
        acc = next;
    }
    Ok(acc.into_iter().map(DjTerm::Nabla).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::{conj_subst, Basis};
    use crate::functors::{Caps, Functor};
    use crate::logic::equiv::one_step_equivalent;

    fn check(alpha: &OneStep, d: &Dj) {
        let back = conj_subst(&d.to_formula()).unwrap();
        let r = one_step_equivalent(&Functor::Powerset, alpha, &back, &Caps::default()).unwrap();
        assert!(r.holds(), "{alpha} vs {d}: {r:?}");
    }

    fn dia(b: Bool) -> OneStep {
        OneStep::Modal(Lifting::Diamond, vec![b])
    }

    fn bx(b: Bool) -> OneStep {
        OneStep::Modal(Lifting::Box, vec![b])
    }

    #[test]
    fn distribute_laws() {
        let a = Bool::name("a");
        check(
            &dia(a.clone()),
            &distribute(&Lifting::Diamond, &[a.clone()]).unwrap(),
        );
        check(
            &bx(a.clone()),
            &distribute(&Lifting::Box, &[a.clone()]).unwrap(),
        );
        let d = distribute(&Lifting::Box, &[Bool::Bot]).unwrap();
        assert_eq!(d, Dj::term(DjTerm::Nabla(BTreeSet::new())));
        check(&bx(Bool::Bot), &d);
    }

    #[test]
    fn binary_pairing_law() {
        let s = DjTerm::Nabla(BTreeSet::from([Var::name("a")]));
        let t = DjTerm::Nabla(BTreeSet::from([Var::name("b")]));
        let g = binary(&s, &t).unwrap();
        assert_eq!(g.to_string(), "nabla{(a,b)}");
        let lhs = OneStep::and([s.to_formula(), t.to_formula()]);
        check(&lhs, &g);
    }

    #[test]
    fn normal_forms() {
        let (a, b) = (Bool::name("a"), Bool::name("b"));
        for alpha in [
            OneStep::and([dia(a.clone()), dia(b.clone())]),
            OneStep::and([bx(a.clone()), dia(b.clone())]),
            OneStep::or([
                bx(Bool::or([a.clone(), b.clone()])),
                dia(Bool::and([a.clone(), b.clone()])),
            ]),
            OneStep::Top,
            OneStep::Bot,
        ] {
            let d = Basis::Powerset.normal_form(&alpha).unwrap();
            check(&alpha, &d);
        }
        assert!(Basis::Powerset.normal_form(&OneStep::Top).unwrap().is_top());
    }
}
