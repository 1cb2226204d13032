//! Direct evaluation of fixpoint formulas on finite models.

use crate::automata::TModel;
use crate::error::{invalid, Result};
use crate::functors::full;
use crate::logic::Mu;
use crate::var::Var;

/// The set of points satisfying `phi`, as a bitmask; fixpoints are computed
/// by iteration from the empty set (`mu`) or the full carrier (`nu`).
pub fn eval_fixpoint(phi: &Mu, model: &TModel) -> Result<u64> {
    phi.check(&model.functor)?;
    model.check()?;
    eval(phi, model, &mut Vec::new())
}

fn eval(m: &Mu, model: &TModel, env: &mut Vec<(Var, u64)>) -> Result<u64> {
    let n = model.len();
    Ok(match m {
        Mu::Prop(v) => match env.iter().rev().find(|(x, _)| x == v) {
            Some((_, ext)) => *ext,
            None => match v {
                Var::Name(p) => *model
                    .valuation
                    .get(p)
                    .ok_or_else(|| invalid(format!("letter `{p}` has no valuation entry")))?,
                _ => return Err(invalid(format!("free variable `{v}` is not a letter"))),
            },
        },
        Mu::Top => full(n),
        Mu::Bot => 0,
        Mu::Not(x) => full(n) & !eval(x, model, env)?,
        Mu::And(xs) => xs.iter().try_fold(full(n), |acc, x| {
            Ok::<_, crate::Error>(acc & eval(x, model, env)?)
        })?,
        Mu::Or(xs) => xs.iter().try_fold(0, |acc, x| {
            Ok::<_, crate::Error>(acc | eval(x, model, env)?)
        })?,
        Mu::Modal(l, xs) => {
            let args = xs
                .iter()
                .map(|x| eval(x, model, env))
                .collect::<Result<Vec<_>>>()?;
            let mut out = 0;
            for (s, e) in model.coalg.iter().enumerate() {
                if model.functor.eval_lifting(l, &args, e, n)? {
                    out |= 1 << s;
                }
            }
            out
        }
        Mu::Mu(v, b) | Mu::Nu(v, b) => {
            let mut x = if matches!(m, Mu::Mu(..)) { 0 } else { full(n) };
            loop {
                env.push((v.clone(), x));
                let y = eval(b, model, env);
                env.pop();
                let y = y?;
                if y == x {
                    break x;
                }
                x = y;
            }
        }
    })
}
