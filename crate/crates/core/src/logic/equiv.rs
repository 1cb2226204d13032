//! Exhaustive one-step model enumeration and the equivalence oracle.
//!
//! By naturality of liftings, `(S, sigma, m) |= a` iff
//! `(P(A), T m(sigma), id) |= a`, so enumerating `T(P(A))` with the identity
//! marking covers every model. Bag multiplicities above the largest grade are
//! indistinguishable, so capping them there keeps the enumeration exact.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::functors::{Caps, Functor};
use crate::logic::{eval_one_step, OneStep, OneStepModel};
use crate::var::{powerset, Var};

/// A family of one-step models, flagged when it is known to be complete.
#[derive(Clone, Debug)]
pub struct ModelFamily {
    pub models: Vec<OneStepModel>,
    pub exact: bool,
}

/// The models `(P(A), G, id)` for every `G` in `T(P(A))` within the caps.
pub fn image_models(f: &Functor, vars: &[Var], caps: &Caps) -> Result<Vec<OneStepModel>> {
    let points = powerset(vars);
    if points.len() > 16 {
        return Err(crate::error::resource(format!(
            "P(A) with {} variables",
            vars.len()
        )));
    }
    let elems = f.enumerate(points.len(), caps)?;
    Ok(elems
        .into_iter()
        .map(|e| OneStepModel::new(points.len(), e, points.clone()))
        .collect())
}

/// Models over carriers `0..=caps.carrier` with every marking, up to
/// permutations of points (markings listed in nondecreasing order).
pub fn carrier_models(f: &Functor, vars: &[Var], caps: &Caps) -> Result<Vec<OneStepModel>> {
    let labels = powerset(vars);
    let mut out = Vec::new();
    for n in 0..=caps.carrier {
        let elems = f.enumerate(n, caps)?;
        let mut idx = vec![0usize; n];
        loop {
            let marking: Vec<BTreeSet<Var>> = idx.iter().map(|&i| labels[i].clone()).collect();
            for e in &elems {
                out.push(OneStepModel::new(n, e.clone(), marking.clone()));
                if out.len() > caps.max_elements {
                    return Err(crate::error::resource(
                        "carrier model enumeration exceeds the element cap",
                    ));
                }
            }
            // next nondecreasing index vector
            let mut i = n;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if idx[i] + 1 < labels.len() {
                    idx[i] += 1;
                    for j in i + 1..n {
                        idx[j] = idx[i];
                    }
                    break;
                }
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if n == 0 || i == usize::MAX {
                break;
            }
        }
    }
    Ok(out)
}

/// Caps adjusted so that bag enumeration is exact for the given formulas.
pub fn caps_for(formulas: &[&OneStep], caps: &Caps) -> Caps {
    let k = formulas
        .iter()
        .map(|a| a.max_grade())
        .max()
        .unwrap_or(0)
        .max(1);
    let mut c = caps.clone();
    c.bag_mult = c.bag_mult.max(k);
    c
}

/// Every model needed to decide formulas over `vars`: the image models when
/// they can be enumerated (exact), otherwise bounded carrier models.
pub fn models_for(f: &Functor, vars: &[Var], caps: &Caps) -> Result<ModelFamily> {
    match image_models(f, vars, caps) {
        Ok(models) => Ok(ModelFamily {
            models,
            exact: true,
        }),
        Err(Error::Resource(_)) => Ok(ModelFamily {
            models: carrier_models(f, vars, caps)?,
            exact: false,
        }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug)]
pub enum Equivalence {
    Equivalent { bounded: bool },
    Counterexample(OneStepModel),
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }
}

/// Decide `a == b` (one-step equivalence) by enumeration.
pub fn one_step_equivalent(
    f: &Functor,
    a: &OneStep,
    b: &OneStep,
    caps: &Caps,
) -> Result<Equivalence> {
    f.check_formula(a)?;
    f.check_formula(b)?;
    let vars: Vec<Var> = a.vars().union(&b.vars()).cloned().collect();
    let caps = caps_for(&[a, b], caps);
    let fam = models_for(f, &vars, &caps)?;
    for m in &fam.models {
        if eval_one_step(f, a, m)? != eval_one_step(f, b, m)? {
            return Ok(Equivalence::Counterexample(m.clone()));
        }
    }
    Ok(Equivalence::Equivalent {
        bounded: !fam.exact,
    })
}

/// Decide `a |= b` by enumeration; returns a counterexample if any.
pub fn one_step_entails(
    f: &Functor,
    a: &OneStep,
    b: &OneStep,
    caps: &Caps,
) -> Result<Option<OneStepModel>> {
    let vars: Vec<Var> = a.vars().union(&b.vars()).cloned().collect();
    let caps = caps_for(&[a, b], caps);
    let fam = models_for(f, &vars, &caps)?;
    for m in &fam.models {
        if eval_one_step(f, a, m)? && !eval_one_step(f, b, m)? {
            return Ok(Some(m.clone()));
        }
    }
    Ok(None)
}
