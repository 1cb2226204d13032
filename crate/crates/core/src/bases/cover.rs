//! Dividing covers, the disjunctivity check and Yoneda divisibility.
//!
//! A dividing cover of `(S, sigma, m)` for `alpha` exists iff some `G` in
//! `T(O)`, for options `O = {top} + vars(alpha)`, satisfies `alpha` under the
//! marking `o |-> {o}` and is related to `sigma` by the Barr lifting of
//! `R = {(s, o) : o = top or o in m(s)}`. The witness in `T R`, with carrier
//! `R` and the first projection as cover map, is then the cover.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::functors::{barr_witness, full, Caps, Elem, Functor};
use crate::logic::equiv::{caps_for, carrier_models, image_models};
use crate::logic::semantics::eval_masks;
use crate::logic::{eval_one_step, one_step_morphism_check, OneStep, OneStepModel};
use crate::var::{powerset, Var};

/// Whether every cover point carries exactly one variable, or some carry none.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverBranch {
    Singleton,
    AtMostOne,
}

#[derive(Clone, Debug)]
pub struct DividingCover {
    pub size: usize,
    pub elem: Elem,
    pub marking: Vec<BTreeSet<Var>>,
    /// Cover map into the covered carrier.
    pub map: Vec<usize>,
    pub branch: CoverBranch,
}

impl DividingCover {
    pub fn model(&self) -> OneStepModel {
        OneStepModel::new(self.size, self.elem.clone(), self.marking.clone())
    }

    /// Re-check the three cover conditions and satisfaction of `alpha`.
    pub fn verify(&self, f: &Functor, alpha: &OneStep, m: &OneStepModel) -> Result<bool> {
        let cover = self.model();
        let (frame, _) = one_step_morphism_check(f, &self.map, &cover, m)?;
        let shrinks = (0..self.size).all(|s| self.marking[s].is_subset(&m.marking[self.map[s]]));
        let divided = self.marking.iter().all(|x| x.len() <= 1);
        Ok(frame && shrinks && divided && eval_one_step(f, alpha, &cover)?)
    }
}

/// Largest total bag multiplicity occurring anywhere in an element.
pub(crate) fn mass(e: &Elem) -> u32 {
    match e {
        Elem::Bag(v) => v
            .iter()
            .map(|(_, k)| k.to_u32().unwrap_or(u32::MAX))
            .fold(0u32, u32::saturating_add),
        Elem::Inj(_, x) => mass(x),
        Elem::Pair(x, y) => mass(x).max(mass(y)),
        Elem::Comp(t, o) => t.iter().map(mass).fold(mass(o), u32::max),
        _ => 0,
    }
}

/// Precomputed option elements satisfying `alpha`, reusable across models.
pub(crate) struct CoverSearch {
    functor: Functor,
    vars: Vec<Var>,
    /// Elements of `T(O)` satisfying `alpha`; option 0 is `top`.
    sat: Vec<Elem>,
}

impl CoverSearch {
    pub(crate) fn new(f: &Functor, alpha: &OneStep, caps: &Caps, mass: u32) -> Result<Self> {
        let vars: Vec<Var> = alpha.vars().into_iter().collect();
        let o = vars.len() + 1;
        let mut caps = caps_for(&[alpha], caps);
        caps.bag_mult = caps.bag_mult.max(mass);
        let all = full(o);
        let val = |v: &Var| {
            vars.iter()
                .position(|x| x == v)
                .map_or(0, |i| 1u64 << (i + 1))
        };
        let mut sat = Vec::new();
        for g in f.enumerate(o, &caps)? {
            if eval_masks(f, alpha, &g, o, all, &val)? {
                sat.push(g);
            }
        }
        Ok(CoverSearch {
            functor: f.clone(),
            vars,
            sat,
        })
    }

    pub(crate) fn search(&self, m: &OneStepModel) -> Result<Option<DividingCover>> {
        for strict in [true, false] {
            let mut rel = Vec::new();
            for s in 0..m.size {
                if !strict {
                    rel.push((s, 0));
                }
                for (i, v) in self.vars.iter().enumerate() {
                    if m.marking[s].contains(v) {
                        rel.push((s, i + 1));
                    }
                }
            }
            for g in &self.sat {
                if let Some(rho) =
                    barr_witness(&self.functor, &rel, &m.elem, m.size, g, self.vars.len() + 1)?
                {
                    let marking = rel
                        .iter()
                        .map(|&(_, o)| {
                            if o == 0 {
                                BTreeSet::new()
                            } else {
                                BTreeSet::from([self.vars[o - 1].clone()])
                            }
                        })
                        .collect();
                    return Ok(Some(DividingCover {
                        size: rel.len(),
                        elem: rho,
                        marking,
                        map: rel.iter().map(|p| p.0).collect(),
                        branch: if strict {
                            CoverBranch::Singleton
                        } else {
                            CoverBranch::AtMostOne
                        },
                    }));
                }
            }
        }
        Ok(None)
    }
}

/// A dividing cover of `m` for `alpha`, preferring covers where every point
/// carries exactly one variable.
pub fn find_dividing_cover(
    f: &Functor,
    alpha: &OneStep,
    m: &OneStepModel,
    caps: &Caps,
) -> Result<Option<DividingCover>> {
    CoverSearch::new(f, alpha, caps, mass(&m.elem))?.search(m)
}

#[derive(Clone, Debug)]
pub enum Disjunctivity {
    Disjunctive { bounded: bool },
    Counterexample(OneStepModel),
    Inconclusive(OneStepModel, String),
}

impl Disjunctivity {
    pub fn holds(&self) -> bool {
        matches!(self, Disjunctivity::Disjunctive { .. })
    }
}

/// Search every enumerated model of `alpha` for a dividing cover. Image
/// models decide the question for weak-pullback-preserving functors; other
/// functors are additionally checked on all models up to `caps.carrier`
/// points and reported as bounded.
pub fn is_disjunctive(f: &Functor, alpha: &OneStep, caps: &Caps) -> Result<Disjunctivity> {
    if !alpha.is_positive() {
        return Err(Error::NotPositive(alpha.to_string()));
    }
    f.check_formula(alpha)?;
    let vars: Vec<Var> = alpha.vars().into_iter().collect();
    let caps = caps_for(&[alpha], caps);
    let wpp = f.preserves_weak_pullbacks();
    let mut models = Vec::new();
    let mut exact = wpp;
    match image_models(f, &vars, &caps) {
        Ok(ms) => models.extend(ms),
        Err(Error::Resource(_)) => exact = false,
        Err(e) => return Err(e),
    }
    if !exact || !wpp {
        models.extend(carrier_models(f, &vars, &caps)?);
    }
    let top_mass = models.iter().map(|m| mass(&m.elem)).max().unwrap_or(0);
    let search = CoverSearch::new(f, alpha, &caps, top_mass)?;
    for m in models {
        if !eval_one_step(f, alpha, &m)? {
            continue;
        }
        match search.search(&m) {
            Ok(Some(_)) => {}
            Ok(None) => return Ok(Disjunctivity::Counterexample(m)),
            Err(Error::Resource(msg)) => return Ok(Disjunctivity::Inconclusive(m, msg)),
            Err(e) => return Err(e),
        }
    }
    Ok(Disjunctivity::Disjunctive { bounded: !exact })
}

/// `y(alpha)`: the elements `G` of `T(P(A))` with `(P(A), G, id) |= alpha`.
#[derive(Clone, Debug)]
pub struct YonedaRep {
    pub vars: Vec<Var>,
    pub points: Vec<BTreeSet<Var>>,
    pub members: Vec<Elem>,
    alpha: OneStep,
}

pub fn yoneda_representation(f: &Functor, alpha: &OneStep, caps: &Caps) -> Result<YonedaRep> {
    let vars: Vec<Var> = alpha.vars().into_iter().collect();
    let caps = caps_for(&[alpha], caps);
    let mut members = Vec::new();
    for m in image_models(f, &vars, &caps)? {
        if eval_one_step(f, alpha, &m)? {
            members.push(m.elem);
        }
    }
    Ok(YonedaRep {
        points: powerset(&vars),
        vars,
        members,
        alpha: alpha.clone(),
    })
}

/// Divisibility: every `G` in the representation has some `b` in `T(A+top)`
/// with `(b, G)` in the Barr lifting of membership (top related to every
/// set) and `T eta (b)` again in the representation, `eta` sending a
/// variable to its singleton and top to the empty set.
pub fn divisible(f: &Functor, rep: &YonedaRep, caps: &Caps) -> Result<bool> {
    let n = rep.vars.len() + 1;
    let np = rep.points.len();
    let index_of = |s: &BTreeSet<Var>| {
        rep.points
            .iter()
            .position(|p| p == s)
            .expect("every subset is a point")
    };
    let eta: Vec<usize> = (0..n)
        .map(|o| {
            if o == 0 {
                index_of(&BTreeSet::new())
            } else {
                index_of(&BTreeSet::from([rep.vars[o - 1].clone()]))
            }
        })
        .collect();
    let eps: Vec<(usize, usize)> = (0..n)
        .flat_map(|o| (0..np).map(move |b| (o, b)))
        .filter(|&(o, b)| o == 0 || rep.points[b].contains(&rep.vars[o - 1]))
        .collect();
    let mut caps = caps_for(&[&rep.alpha], caps);
    caps.bag_mult = caps
        .bag_mult
        .max(rep.members.iter().map(mass).max().unwrap_or(0));
    let betas = f.enumerate(n, &caps)?;
    let in_rep = |g: &Elem| {
        eval_one_step(
            f,
            &rep.alpha,
            &OneStepModel::new(np, g.clone(), rep.points.clone()),
        )
    };
    let mut good = Vec::new();
    for b in &betas {
        if in_rep(&f.map(&eta, b))? {
            good.push(b);
        }
    }
    'gamma: for g in &rep.members {
        for b in &good {
            if barr_witness(f, &eps, b, n, g, np)?.is_some() {
                continue 'gamma;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::nabla;
    use crate::logic::{Bool, Lifting};

    fn set(vs: &[&str]) -> BTreeSet<Var> {
        vs.iter().map(|s| Var::name(s)).collect()
    }

    fn dia(b: Bool) -> OneStep {
        OneStep::Modal(Lifting::Diamond, vec![b])
    }

    fn bx(b: Bool) -> OneStep {
        OneStep::Modal(Lifting::Box, vec![b])
    }

    #[test]
    fn split_cover_for_nabla() {
        let alpha = nabla(vec![Bool::name("a"), Bool::name("b"), Bool::name("c")]);
        let m = OneStepModel::new(
            2,
            Elem::set([0, 1]),
            vec![set(&["a", "b"]), set(&["b", "c"])],
        );
        let c = find_dividing_cover(&Functor::Powerset, &alpha, &m, &Caps::default())
            .unwrap()
            .unwrap();
        assert!(c.verify(&Functor::Powerset, &alpha, &m).unwrap());
        assert_eq!(c.branch, CoverBranch::Singleton);
        assert_eq!(c.size, 4);
    }

    #[test]
    fn shrink_marking() {
        let alpha = nabla(vec![Bool::name("a")]);
        let m = OneStepModel::new(1, Elem::set([0]), vec![set(&["a", "b"])]);
        let c = find_dividing_cover(&Functor::Powerset, &alpha, &m, &Caps::default())
            .unwrap()
            .unwrap();
        assert!(c.verify(&Functor::Powerset, &alpha, &m).unwrap());
    }

    #[test]
    fn box_and_diamond_not_disjunctive() {
        let alpha = OneStep::and([bx(Bool::name("a")), dia(Bool::name("b"))]);
        match is_disjunctive(&Functor::Powerset, &alpha, &Caps::default()).unwrap() {
            Disjunctivity::Counterexample(m) => {
                assert!(eval_one_step(&Functor::Powerset, &alpha, &m).unwrap())
            }
            other => panic!("{other:?}"),
        }
        let m = OneStepModel::new(1, Elem::set([0]), vec![set(&["a", "b"])]);
        assert!(
            find_dividing_cover(&Functor::Powerset, &alpha, &m, &Caps::default())
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn next_is_disjunctive() {
        let alpha = OneStep::Modal(Lifting::Next, vec![Bool::name("a")]);
        assert!(matches!(
            is_disjunctive(&Functor::Identity, &alpha, &Caps::default()).unwrap(),
            Disjunctivity::Disjunctive { bounded: false }
        ));
    }

    #[test]
    fn yoneda_small() {
        let caps = Caps::default();
        let nab = nabla(vec![Bool::name("a")]);
        let rep = yoneda_representation(&Functor::Powerset, &nab, &caps).unwrap();
        assert!(divisible(&Functor::Powerset, &rep, &caps).unwrap());
        let bad = OneStep::and([bx(Bool::name("a")), dia(Bool::name("b"))]);
        let rep = yoneda_representation(&Functor::Powerset, &bad, &caps).unwrap();
        assert!(!divisible(&Functor::Powerset, &rep, &caps).unwrap());
        let rep = yoneda_representation(&Functor::Powerset, &OneStep::Bot, &caps).unwrap();
        assert!(rep.members.is_empty());
        assert!(divisible(&Functor::Powerset, &rep, &caps).unwrap());
    }
}
