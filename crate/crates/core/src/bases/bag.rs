//! The graded cover basis for the bag functor.

use std::collections::{BTreeMap, BTreeSet};

use crate::bases::{min_vars, set_var, Dj, DjTerm};
use crate::error::{resource, Error, Result};
use crate::logic::{Bool, Lifting, OneStep};
use crate::var::Var;

/// `<a_1, .., a_n; B>` as the conjunction over `J` of
/// `<|J|>(\/_J a_i) & [n+1-|J|](\/_J a_i | \/B)`; `<0>` conjuncts are dropped.
pub fn hall_translate(a: &[Var], b: &BTreeSet<Var>) -> OneStep {
    let n = a.len();
    let rest = Bool::or(b.iter().map(|v| Bool::Var(v.clone())));
    let mut parts = Vec::new();
    for mask in 0u32..1 << n {
        let j: Vec<&Var> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &a[i])
            .collect();
        let d = Bool::or(j.iter().map(|v| Bool::Var((*v).clone())));
        let mut chi = Vec::new();
        if !j.is_empty() {
            chi.push(OneStep::Modal(
                Lifting::AtLeast(j.len() as u32),
                vec![d.clone()],
            ));
        }
        chi.push(OneStep::Modal(
            Lifting::Fewer((n + 1 - j.len()) as u32),
            vec![Bool::or([d, rest.clone()])],
        ));
        parts.push(OneStep::and(chi));
    }
    OneStep::and(parts)
}

fn graded(mut a: Vec<Var>, b: BTreeSet<Var>) -> DjTerm {
    a.sort();
    DjTerm::Graded(a, b)
}

pub(super) fn distribute(l: &Lifting, args: &[Bool]) -> Result<Dj> {
    let terms = min_vars(&args[0])?;
    let empty = set_var(&BTreeSet::new());
    match l {
        Lifting::AtLeast(k) => {
            let k = *k as usize;
            if k == 0 {
                return Ok(Dj::top());
            }
            let mut out = Vec::new();
            multisets(terms.len(), k, &mut Vec::new(), &mut |idx| {
                out.push(graded(
                    idx.iter().map(|&i| terms[i].clone()).collect(),
                    BTreeSet::from([empty.clone()]),
                ));
            });
            if out.len() > 1 << 16 {
                return Err(resource("graded distribution exceeds 65536 disjuncts"));
            }
            Ok(Dj::or(out))
        }
        Lifting::Fewer(k) => {
            let rest: BTreeSet<Var> = terms.into_iter().collect();
            Ok(Dj::or(
                (0..*k as usize).map(|m| graded(vec![empty.clone(); m], rest.clone())),
            ))
        }
        _ => Err(Error::UnknownLifting {
            lifting: l.to_string(),
            functor: "bag".into(),
        }),
    }
}

/// Nondecreasing index sequences of length `k` over `0..m`.
fn multisets(m: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    let start = cur.last().copied().unwrap_or(0);
    for i in start..m {
        cur.push(i);
        multisets(m, k, cur, f);
        cur.pop();
    }
}

/// An overlap record for `<a_1..a_k; A'> /\ <b_1..b_l; B'>`: the matched
/// index pairs, and for unmatched indices the variable of the other side's
/// remainder set they fall into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseDescription {
    pub overlap: Vec<(usize, usize)>,
    pub c1: BTreeMap<usize, Var>,
    pub c2: BTreeMap<usize, Var>,
}

impl CaseDescription {
    /// Every overlap record for tuples of lengths `k`, `l` and remainders.
    pub fn enumerate(
        k: usize,
        l: usize,
        a_rest: &BTreeSet<Var>,
        b_rest: &BTreeSet<Var>,
    ) -> Vec<CaseDescription> {
        let mut overlaps = Vec::new();
        partial_bijections(0, k, l, &mut vec![false; l], &mut Vec::new(), &mut overlaps);
        let mut out = Vec::new();
        for o in overlaps {
            let left: Vec<usize> = (0..k).filter(|i| !o.iter().any(|p| p.0 == *i)).collect();
            let right: Vec<usize> = (0..l).filter(|j| !o.iter().any(|p| p.1 == *j)).collect();
            let c1s = assignments(&left, b_rest);
            let c2s = assignments(&right, a_rest);
            for c1 in &c1s {
                for c2 in &c2s {
                    out.push(CaseDescription {
                        overlap: o.clone(),
                        c1: c1.clone(),
                        c2: c2.clone(),
                    });
                }
            }
        }
        out
    }

    /// The graded cover `chi(O, c1, c2)` over pair variables.
    pub fn chi(
        &self,
        a: &[Var],
        a_rest: &BTreeSet<Var>,
        b: &[Var],
        b_rest: &BTreeSet<Var>,
    ) -> DjTerm {
        let mut tuple = Vec::new();
        for &(i, j) in &self.overlap {
            tuple.push(Var::pair(a[i].clone(), b[j].clone()));
        }
        for (&i, v) in &self.c1 {
            tuple.push(Var::pair(a[i].clone(), v.clone()));
        }
        for (&j, v) in &self.c2 {
            tuple.push(Var::pair(v.clone(), b[j].clone()));
        }
        let rest = a_rest
            .iter()
            .flat_map(|x| b_rest.iter().map(move |y| Var::pair(x.clone(), y.clone())))
            .collect();
        graded(tuple, rest)
    }
}

fn partial_bijections(
    i: usize,
    k: usize,
    l: usize,
    used: &mut Vec<bool>,
    cur: &mut Vec<(usize, usize)>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if i == k {
        out.push(cur.clone());
        return;
    }
    partial_bijections(i + 1, k, l, used, cur, out);
    for j in 0..l {
        if !used[j] {
            used[j] = true;
            cur.push((i, j));
            partial_bijections(i + 1, k, l, used, cur, out);
            cur.pop();
            used[j] = false;
        }
    }
}

fn assignments(idx: &[usize], vals: &BTreeSet<Var>) -> Vec<BTreeMap<usize, Var>> {
    let mut acc = vec![BTreeMap::new()];
    for &i in idx {
        let mut next = Vec::new();
        for m in &acc {
            for v in vals {
                let mut m2 = m.clone();
                m2.insert(i, v.clone());
                next.push(m2);
            }
        }
        acc = next;
    }
    acc
}

pub(super) fn binary(s: &DjTerm, t: &DjTerm) -> Result<Dj> {
    let (DjTerm::Graded(a, ar), DjTerm::Graded(b, br)) = (s, t) else {
        return Err(Error::Invalid(format!("not bag basis terms: {s}, {t}")));
    };
    let cases = CaseDescription::enumerate(a.len(), b.len(), ar, br);
    if cases.len() > 1 << 16 {
        return Err(resource("overlap records exceed 65536"));
    }
    Ok(Dj::or(cases.iter().map(|c| c.chi(a, ar, b, br))))
}
