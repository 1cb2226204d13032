//! Lyndon normalisation, monotonicity, the bisimulation quantifier and
//! uniform interpolants.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::automata::{
    accepting_points, enumerate_models, equivalent, simulate, Automaton, EquivMode, TModel, Verdict,
};
use crate::bases::{Basis, Dj};
use crate::error::{invalid, Result};
use crate::functors::{full, Caps, Functor};
use crate::logic::equiv::{one_step_entails, one_step_equivalent, Equivalence};
use crate::logic::{Bool, OneStep, OneStepModel};
use crate::var::Var;

// ---------------------------------------------------------------- one step

#[derive(Clone, Debug)]
pub enum OneStepLyndon {
    /// A formula positive in the variable; `bounded` when the equivalence
    /// check could only enumerate bounded models.
    Positive { formula: OneStep, bounded: bool },
    /// The input is true in `smaller` and false in `larger`, which only
    /// adds the variable at some points.
    NotMonotone {
        smaller: OneStepModel,
        larger: OneStepModel,
    },
}

/// Whether every occurrence of `v` in a one-step formula is positive.
pub fn positive_in(alpha: &OneStep, v: &Var) -> bool {
    fn go(a: &OneStep, v: &Var, neg: bool) -> bool {
        match a {
            OneStep::Top | OneStep::Bot => true,
            OneStep::Modal(_, args) => {
                let mention = args.iter().any(|b| b.vars().contains(v));
                if neg {
                    !mention
                } else {
                    args.iter().all(|b| b.is_positive_in(v))
                }
            }
            OneStep::And(xs) | OneStep::Or(xs) => xs.iter().all(|x| go(x, v, neg)),
            OneStep::Not(x) => go(x, v, !neg),
        }
    }
    go(alpha, v, false)
}

/// Oracle for monotonicity of `alpha` in `a`: a one-step model where
/// `alpha` holds but fails once `a` is added at the points marked `z`.
fn monotonicity_counterexample(
    f: &Functor,
    alpha: &OneStep,
    a: &Var,
    caps: &Caps,
) -> Result<Option<(OneStepModel, OneStepModel)>> {
    let vars = alpha.vars();
    let mut z = Var::name("z");
    let mut k = 0;
    while vars.contains(&z) || z == *a {
        k += 1;
        z = Var::name(&format!("z{k}"));
    }
    let enlarged = alpha.subst(&mut |v| {
        Ok(if v == a {
            Bool::or([Bool::Var(v.clone()), Bool::Var(z.clone())])
        } else {
            Bool::Var(v.clone())
        })
    })?;
    let Some(m) = one_step_entails(f, alpha, &enlarged, caps)? else {
        return Ok(None);
    };
    let smaller: Vec<BTreeSet<Var>> = m
        .marking
        .iter()
        .map(|s| s.iter().filter(|v| **v != z).cloned().collect())
        .collect();
    let larger: Vec<BTreeSet<Var>> = m
        .marking
        .iter()
        .map(|s| {
            let mut t: BTreeSet<Var> = s.iter().filter(|v| **v != z).cloned().collect();
            if s.contains(&z) {
                t.insert(a.clone());
            }
            t
        })
        .collect();
    Ok(Some((
        OneStepModel::new(m.size, m.elem.clone(), smaller),
        OneStepModel::new(m.size, m.elem, larger),
    )))
}

/// The propositional type of `mask` over `vars`; with `positive` set the
/// negative literal of that variable is left out.
fn type_formula(vars: &[Var], mask: usize, positive: Option<&Var>) -> Bool {
    Bool::and(vars.iter().enumerate().filter_map(|(i, v)| {
        if mask >> i & 1 == 1 {
            Some(Bool::Var(v.clone()))
        } else if Some(v) == positive {
            None
        } else {
            Some(Bool::not(Bool::Var(v.clone())))
        }
    }))
}

/// An equivalent formula positive in `a`, through the normal form
/// `delta[tau]` with `delta` a basis formula over the propositional types
/// `tau` of the variables, whose negative `a` literals are then dropped.
pub fn one_step_lyndon(
    f: &Functor,
    alpha: &OneStep,
    a: &Var,
    basis: &Basis,
    caps: &Caps,
) -> Result<OneStepLyndon> {
    f.check_formula(alpha)?;
    if let Some((smaller, larger)) = monotonicity_counterexample(f, alpha, a, caps)? {
        return Ok(OneStepLyndon::NotMonotone { smaller, larger });
    }
    let mut vars: Vec<Var> = alpha.vars().into_iter().collect();
    if !vars.contains(a) {
        vars.push(a.clone());
    }
    if vars.len() > 10 {
        return Err(crate::error::resource(format!(
            "{} variables in a one-step Lyndon transform",
            vars.len()
        )));
    }
    // each argument becomes the disjunction of the types entailing it
    let typed = f.nnf(alpha)?.map_modal(&mut |l, args| {
        let args = args
            .iter()
            .map(|b| {
                Bool::or((0..1usize << vars.len()).filter_map(|m| {
                    let truth = |v: &Var| {
                        vars.iter()
                            .position(|w| w == v)
                            .is_some_and(|i| m >> i & 1 == 1)
                    };
                    b.eval(&truth).then(|| Bool::Var(Var::Index(m)))
                }))
            })
            .collect();
        Ok(OneStep::Modal(l.clone(), args))
    })?;
    let delta: Dj = basis.normal_form(&typed)?;
    let out = delta.to_formula().subst(&mut |v| {
        let set = v
            .as_set()
            .ok_or_else(|| invalid(format!("normal form produced `{v}`")))?;
        let types: Vec<usize> = set
            .iter()
            .map(|t| {
                t.as_index()
                    .ok_or_else(|| invalid(format!("`{t}` is not a type")))
            })
            .collect::<Result<_>>()?;
        Ok(match types.as_slice() {
            [] => Bool::Top,
            [m] => type_formula(&vars, *m, Some(a)),
            _ => Bool::Bot,
        })
    })?;
    let bounded = match one_step_equivalent(f, alpha, &out, caps)? {
        Equivalence::Equivalent { bounded } => bounded,
        Equivalence::Counterexample(m) => {
            return Err(invalid(format!(
                "Lyndon transform of {alpha} differs from the input on {m}"
            )));
        }
    };
    Ok(OneStepLyndon::Positive {
        formula: out,
        bounded,
    })
}

// ---------------------------------------------------------------- automata

fn require_disjunctive(aut: &Automaton) -> Result<&Vec<Vec<Dj>>> {
    aut.basis
        .as_ref()
        .ok_or_else(|| invalid("the transform needs a disjunctive automaton"))
}

fn dj_or(a: &Dj, b: &Dj) -> Dj {
    Dj::or(a.0.iter().chain(&b.0).cloned())
}

/// `Theta(a, c) \/ Theta(a, c \ {p})` whenever `p` is in `c`.
pub fn lyndon_automaton(aut: &Automaton, p: &str) -> Result<Automaton> {
    let basis = require_disjunctive(aut)?;
    let Some(i) = aut.prop_index(p) else {
        return Ok(aut.clone());
    };
    let mut out = aut.clone();
    let mut rows = basis.clone();
    for a in 0..aut.len() {
        for c in 0..aut.colors() {
            if c >> i & 1 == 1 {
                rows[a][c] = dj_or(&basis[a][c], &basis[a][c & !(1 << i)]);
                out.delta[a][c] = rows[a][c].to_formula();
            }
        }
    }
    out.basis = Some(rows);
    out.check()?;
    Ok(out)
}

/// The bisimulation quantifier: `Theta(a, c) \/ Theta(a, c u {p})` over the
/// alphabet without `p`.
pub fn exists_p(aut: &Automaton, p: &str) -> Result<Automaton> {
    let basis = require_disjunctive(aut)?;
    let Some(i) = aut.prop_index(p) else {
        return Ok(aut.clone());
    };
    let low = (1usize << i) - 1;
    let widen = |c: usize| (c & low) | ((c & !low) << 1);
    let props: Vec<Arc<str>> = aut.props.iter().filter(|q| &***q != p).cloned().collect();
    let colors = 1usize << props.len();
    let mut rows = Vec::with_capacity(aut.len());
    for row in basis {
        rows.push(
            (0..colors)
                .map(|c| dj_or(&row[widen(c)], &row[widen(c) | 1 << i]))
                .collect::<Vec<_>>(),
        );
    }
    let out = Automaton {
        functor: aut.functor.clone(),
        props,
        names: aut.names.clone(),
        delta: rows
            .iter()
            .map(|r| r.iter().map(Dj::to_formula).collect())
            .collect(),
        priority: aut.priority.clone(),
        initial: aut.initial,
        basis: Some(rows),
    };
    out.check()?;
    Ok(out)
}

fn disjunctive(aut: &Automaton, caps: &Caps) -> Result<Automaton> {
    if aut.is_disjunctive() {
        return Ok(aut.clone());
    }
    simulate(aut, &Basis::for_functor(&aut.functor)?, caps)
}

#[derive(Clone, Debug)]
pub enum Monotonicity {
    Monotone {
        bounded: bool,
    },
    /// `larger` is rejected although it only adds `p` to a model; `smaller`
    /// is the accepted model when one was found.
    NotMonotone {
        smaller: Option<TModel>,
        larger: TModel,
    },
}

impl Monotonicity {
    pub fn holds(&self) -> bool {
        matches!(self, Monotonicity::Monotone { .. })
    }
}

/// Models that agree with `m` except that `p` holds at fewer points.
fn shrinkings(m: &TModel, p: &str) -> Vec<TModel> {
    let vp = m.valuation.get(p).copied().unwrap_or(0);
    let mut out = Vec::new();
    let mut sub = vp;
    loop {
        sub = sub.wrapping_sub(1) & vp;
        if sub == vp {
            break;
        }
        let mut s = m.clone();
        s.valuation.insert(Arc::from(p), sub);
        out.push(s);
    }
    out
}

/// Monotonicity in `p` via the criterion `A == A^M_p` on the disjunctive
/// form of the automaton.
pub fn is_monotone(
    aut: &Automaton,
    p: &str,
    mode: &EquivMode,
    caps: &Caps,
) -> Result<Monotonicity> {
    let d = disjunctive(aut, caps)?;
    let lifted = lyndon_automaton(&d, p)?;
    match equivalent(&d, &lifted, mode, caps)? {
        Verdict::Equivalent { bounded } => Ok(Monotonicity::Monotone { bounded }),
        Verdict::Counterexample(m, _) => {
            let smaller = shrinkings(&m, p).into_iter().find(|s| {
                accepting_points(&d, s)
                    .map(|acc| acc[s.point])
                    .unwrap_or(false)
            });
            Ok(Monotonicity::NotMonotone { smaller, larger: m })
        }
    }
}

/// Direct check: acceptance survives every enlargement of `V(p)` on all
/// models with at most `bound` points.
pub fn monotone_oracle(
    aut: &Automaton,
    p: &str,
    bound: usize,
    caps: &Caps,
) -> Result<Monotonicity> {
    let mut props = aut.props.clone();
    if !props.iter().any(|q| &**q == p) {
        props.push(Arc::from(p));
        props.sort();
    }
    let ip = props
        .iter()
        .position(|q| &**q == p)
        .expect("letter present");
    let models = enumerate_models(&aut.functor, &props, bound, caps)?;
    let mut start = 0;
    while start < models.len() {
        let n = models[start].len();
        let block = 1usize << (n * props.len());
        let acc = models[start..start + block]
            .iter()
            .map(|m| accepting_points(aut, m))
            .collect::<Result<Vec<_>>>()?;
        for (v, m) in models[start..start + block].iter().enumerate() {
            let vp = (v >> (ip * n)) & full(n) as usize;
            for extra in 1..=full(n) as usize {
                if extra & vp != 0 {
                    continue;
                }
                let w = v | extra << (ip * n);
                if let Some(s) = (0..n).find(|&s| acc[v][s] && !acc[w][s]) {
                    return Ok(Monotonicity::NotMonotone {
                        smaller: Some(m.at(s)),
                        larger: models[start + w].at(s),
                    });
                }
            }
        }
        start += block;
    }
    Ok(Monotonicity::Monotone { bounded: true })
}

/// Whether every transition depends only on the letters in `keep`.
pub fn depends_only_on(aut: &Automaton, keep: &[&str]) -> bool {
    let mask = aut
        .props
        .iter()
        .enumerate()
        .filter(|(_, q)| keep.contains(&&***q))
        .fold(0usize, |acc, (i, _)| acc | 1 << i);
    (0..aut.len()).all(|a| (0..aut.colors()).all(|c| aut.delta[a][c] == aut.delta[a][c & mask]))
}

#[derive(Clone, Debug)]
pub struct Interpolant {
    pub automaton: Automaton,
    /// Letters quantified away, in order.
    pub eliminated: Vec<Arc<str>>,
}

/// The uniform interpolant over `keep`: the disjunctive form of the input
/// with every other letter removed by [`exists_p`], in alphabet order.
pub fn uniform_interpolant(aut: &Automaton, keep: &[&str], caps: &Caps) -> Result<Interpolant> {
    if let Some(k) = keep.iter().find(|k| aut.prop_index(k).is_none()) {
        return Err(invalid(format!("`{k}` is not a letter of the input")));
    }
    let mut d = disjunctive(aut, caps)?;
    let eliminated: Vec<Arc<str>> = aut
        .props
        .iter()
        .filter(|p| !keep.contains(&&***p))
        .cloned()
        .collect();
    for p in &eliminated {
        d = exists_p(&d, p)?;
    }
    if !depends_only_on(&d, keep) {
        return Err(invalid("interpolant branches on an eliminated letter"));
    }
    Ok(Interpolant {
        automaton: d,
        eliminated,
    })
}

/// The automaton as a system of equations, one line per state: the
/// disjunction over colours of the colour type and its transition.
pub fn equations(aut: &Automaton) -> String {
    let mut out = String::new();
    let vars: Vec<Var> = aut.props.iter().map(|p| Var::Name(p.clone())).collect();
    for a in 0..aut.len() {
        let mut parts = Vec::new();
        for c in 0..aut.colors() {
            let alpha = &aut.delta[a][c];
            if *alpha == OneStep::Bot {
                continue;
            }
            let ty = type_formula(&vars, c, None);
            parts.push(match (ty == Bool::Top, alpha == &OneStep::Top) {
                (true, _) => format!("{alpha}"),
                (false, true) => format!("{ty}"),
                (false, false) => format!("({ty}) & ({alpha})"),
            });
        }
        let rhs = if parts.is_empty() {
            "false".to_string()
        } else {
            parts.join(" | ")
        };
        let _ = writeln!(out, "#{a} [{}] = {rhs}", aut.priority[a]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{compile, parse_formula, parse_one_step};

    fn lyndon(text: &str) -> OneStepLyndon {
        let f = Functor::Powerset;
        one_step_lyndon(
            &f,
            &parse_one_step(text, &f).unwrap(),
            &Var::name("a"),
            &Basis::Powerset,
            &Caps::default(),
        )
        .unwrap()
    }

    fn aut(text: &str) -> Automaton {
        let f = Functor::Powerset;
        compile(&parse_formula(text, &f).unwrap(), &f)
            .unwrap()
            .automaton
    }

    #[test]
    fn one_step_positive_outputs() {
        for t in ["<>a", "<>(a | ~a) & <>a", "[]~a | <>a", "<>(a & ~b) | []b"] {
            match lyndon(t) {
                OneStepLyndon::Positive { formula, bounded } => {
                    assert!(!bounded);
                    assert!(positive_in(&formula, &Var::name("a")), "{t}: {formula}");
                }
                other => panic!("{t}: {other:?}"),
            }
        }
        assert!(matches!(lyndon("[]~a"), OneStepLyndon::NotMonotone { .. }));
    }

    #[test]
    fn criterion_and_oracle() {
        let caps = Caps::default();
        for (t, mono) in [
            ("mu x. p | <>x", true),
            ("~p", false),
            ("[]p & <>~p", true),
            ("<>p & <>~p", false),
        ] {
            let a = aut(t);
            let c = is_monotone(&a, "p", &EquivMode::Enumerate(2), &caps).unwrap();
            let o = monotone_oracle(&a, "p", 2, &caps).unwrap();
            assert_eq!(c.holds(), mono, "{t}");
            assert_eq!(o.holds(), mono, "{t}");
        }
    }

    #[test]
    fn exists_removes_the_letter() {
        let caps = Caps::default();
        let d = simulate(&aut("p & q"), &Basis::Powerset, &caps).unwrap();
        let e = exists_p(&d, "p").unwrap();
        assert_eq!(e.props.len(), 1);
        let q = simulate(&aut("q"), &Basis::Powerset, &caps).unwrap();
        assert!(equivalent(&e, &q, &EquivMode::Enumerate(2), &caps)
            .unwrap()
            .holds());
        let i = uniform_interpolant(&aut("<>(p & q)"), &["q"], &caps).unwrap();
        assert!(depends_only_on(&i.automaton, &["q"]));
        assert!(!equations(&i.automaton).is_empty());
    }
}
