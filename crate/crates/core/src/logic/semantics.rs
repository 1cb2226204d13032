use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::functors::{full, Elem, Functor};
use crate::logic::{Bool, OneStep};
use crate::var::Var;

/// A one-step model `(S, sigma, m)` over the carrier `{0, .., size-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OneStepModel {
    pub size: usize,
    pub elem: Elem,
    pub marking: Vec<BTreeSet<Var>>,
}

impl OneStepModel {
    pub fn new(size: usize, elem: Elem, marking: Vec<BTreeSet<Var>>) -> Self {
        assert_eq!(marking.len(), size, "marking must be total");
        OneStepModel {
            size,
            elem,
            marking,
        }
    }

    /// Points whose marking contains `v`.
    pub fn extension(&self, v: &Var) -> u64 {
        self.marking
            .iter()
            .enumerate()
            .filter(|(_, m)| m.contains(v))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }
}

impl fmt::Display for OneStepModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma={} m=[", self.elem)?;
        for (i, m) in self.marking.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}:{{")?;
            for (j, v) in m.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for OneStepModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The 0-step extension of `pi` under the marking, as a point mask.
pub fn eval_zero_step(pi: &Bool, marking: &[BTreeSet<Var>]) -> u64 {
    let all = full(marking.len());
    pi.eval_mask(all, &|v| {
        marking
            .iter()
            .enumerate()
            .filter(|(_, m)| m.contains(v))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    })
}

/// Evaluate a one-step formula at `e` given variable extensions as masks.
pub(crate) fn eval_masks(
    f: &Functor,
    a: &OneStep,
    e: &Elem,
    n: usize,
    all: u64,
    val: &dyn Fn(&Var) -> u64,
) -> Result<bool> {
    Ok(match a {
        OneStep::Top => true,
        OneStep::Bot => false,
        OneStep::Modal(l, args) => {
            let masks: Vec<u64> = args.iter().map(|p| p.eval_mask(all, val)).collect();
            f.eval_lifting(l, &masks, e, n)?
        }
        OneStep::And(xs) => {
            for x in xs {
                if !eval_masks(f, x, e, n, all, val)? {
                    return Ok(false);
                }
            }
            true
        }
        OneStep::Or(xs) => {
            for x in xs {
                if eval_masks(f, x, e, n, all, val)? {
                    return Ok(true);
                }
            }
            false
        }
        OneStep::Not(x) => !eval_masks(f, x, e, n, all, val)?,
    })
}

/// `sigma |= alpha` in the one-step model.
pub fn eval_one_step(f: &Functor, a: &OneStep, m: &OneStepModel) -> Result<bool> {
    if m.size > crate::functors::MAX_CARRIER {
        return Err(crate::error::resource(format!(
            "carrier of {} points",
            m.size
        )));
    }
    let all = full(m.size);
    eval_masks(f, a, &m.elem, m.size, all, &|v| m.extension(v))
}

/// `f : M' -> M` is a morphism of one-step models: `T f(sigma') = sigma`
/// and `m' = m . f`. Returns `(frame part, marking part)`.
pub fn one_step_morphism_check(
    func: &Functor,
    f: &[usize],
    source: &OneStepModel,
    target: &OneStepModel,
) -> Result<(bool, bool)> {
    if f.len() != source.size || f.iter().any(|&t| t >= target.size) {
        return Err(Error::Invalid(
            "map is not total between the carriers".into(),
        ));
    }
    let frame = func.map(f, &source.elem) == target.elem;
    let marks = (0..source.size).all(|s| source.marking[s] == target.marking[f[s]]);
    Ok((frame, marks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Lifting;

    fn set(vs: &[&str]) -> BTreeSet<Var> {
        vs.iter().map(|s| Var::name(s)).collect()
    }

    #[test]
    fn zero_step_examples() {
        let m = vec![set(&["a"]), set(&[])];
        assert_eq!(eval_zero_step(&Bool::name("a"), &m), 0b01);
        assert_eq!(eval_zero_step(&Bool::Top, &m), 0b11);
        let pi = Bool::Or(vec![
            Bool::And(vec![Bool::name("a"), Bool::Not(Box::new(Bool::name("b")))]),
            Bool::name("b"),
        ]);
        let m = vec![set(&["a"]), set(&["b"])];
        assert_eq!(eval_zero_step(&pi, &m), 0b11);
    }

    #[test]
    fn one_step_examples() {
        let m = OneStepModel::new(1, Elem::set([0]), vec![set(&["a"])]);
        let a = OneStep::Modal(Lifting::Diamond, vec![Bool::name("a")]);
        assert!(eval_one_step(&Functor::Powerset, &a, &m).unwrap());
        let m = OneStepModel::new(1, Elem::bag([(0, 2)]), vec![set(&["a"])]);
        let a = OneStep::Modal(Lifting::AtLeast(2), vec![Bool::name("a")]);
        assert!(eval_one_step(&Functor::Bag, &a, &m).unwrap());
    }

    #[test]
    fn morphism_split_cover() {
        // S' = {(u,a),(u,b),(v,b),(v,c)} -> S = {u,v}
        let src = OneStepModel::new(
            4,
            Elem::set([0, 1, 2, 3]),
            vec![set(&["a"]), set(&["b"]), set(&["b"]), set(&["c"])],
        );
        let tgt = OneStepModel::new(
            2,
            Elem::set([0, 1]),
            vec![set(&["a", "b"]), set(&["b", "c"])],
        );
        let (frame, marks) =
            one_step_morphism_check(&Functor::Powerset, &[0, 0, 1, 1], &src, &tgt).unwrap();
        assert!(frame && !marks);
    }

    #[test]
    fn morphism_collapse() {
        let src = OneStepModel::new(2, Elem::set([0, 1]), vec![set(&[]), set(&[])]);
        let tgt = OneStepModel::new(1, Elem::set([0]), vec![set(&[])]);
        assert_eq!(
            one_step_morphism_check(&Functor::Powerset, &[0, 0], &src, &tgt).unwrap(),
            (true, true)
        );
        let id = OneStepModel::new(1, Elem::set([0]), vec![set(&["a"])]);
        assert_eq!(
            one_step_morphism_check(&Functor::Powerset, &[0], &id, &id).unwrap(),
            (true, true)
        );
    }
}
