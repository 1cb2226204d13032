//! Barr relation lifting: `(x, y)` is in `T R` iff some `rho` in `T R`
//! projects onto both.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{resource, Error, Result};
use crate::functors::{minimal_antichain, normalize_comp, Elem, Functor};

/// Decide `(x, y)` in the Barr lifting of `rel` (pairs of points of the two
/// carriers of sizes `nx`, `ny`). Only weak-pullback-preserving functors.
pub fn barr_lift(
    f: &Functor,
    rel: &[(usize, usize)],
    x: &Elem,
    nx: usize,
    y: &Elem,
    ny: usize,
) -> Result<bool> {
    if !f.preserves_weak_pullbacks() {
        return Err(Error::UnsupportedFunctor {
            functor: f.to_string(),
            operation: "barr_lift".into(),
        });
    }
    Ok(barr_witness(f, rel, x, nx, y, ny)?.is_some())
}

/// A witness `rho` in `T rel` (over the carrier of relation indices) whose
/// projections are `x` and `y`, if one exists.
pub fn barr_witness(
    f: &Functor,
    rel: &[(usize, usize)],
    x: &Elem,
    nx: usize,
    y: &Elem,
    ny: usize,
) -> Result<Option<Elem>> {
    if rel.len() > super::MAX_CARRIER {
        return Err(resource(format!("relation with {} pairs", rel.len())));
    }
    let find = |s: usize, o: usize| rel.iter().position(|p| *p == (s, o));
    Ok(match (f, x, y) {
        (Functor::Identity, Elem::Point(s), Elem::Point(o)) => find(*s, *o).map(Elem::Point),
        (Functor::Labeled(_), Elem::Labeled(l, s), Elem::Labeled(k, o)) => {
            if l != k {
                None
            } else {
                find(*s, *o).map(|i| Elem::Labeled(l.clone(), i))
            }
        }
        (Functor::Powerset, Elem::Set(xs), Elem::Set(ys)) => {
            let mut rho = 0u64;
            let (mut p1, mut p2) = (0u64, 0u64);
            for (k, (s, o)) in rel.iter().enumerate() {
                if xs >> s & 1 == 1 && ys >> o & 1 == 1 {
                    rho |= 1 << k;
                    p1 |= 1 << s;
                    p2 |= 1 << o;
                }
            }
            (p1 == *xs && p2 == *ys).then_some(Elem::Set(rho))
        }
        (Functor::Bag, Elem::Bag(xs), Elem::Bag(ys)) => bag_flow(rel, xs, nx, ys, ny)?,
        (Functor::Mono, Elem::Mono(xs), Elem::Mono(ys)) => mono_witness(rel, xs, nx, ys, ny)?,
        (Functor::Sum(a, b), Elem::Inj(i, x1), Elem::Inj(j, y1)) => {
            if i != j {
                None
            } else {
                let g = if *i == 1 { a } else { b };
                barr_witness(g, rel, x1, nx, y1, ny)?.map(|w| Elem::inj(*i, w))
            }
        }
        (Functor::Product(a, b), Elem::Pair(x1, x2), Elem::Pair(y1, y2)) => {
            match (
                barr_witness(a, rel, x1, nx, y1, ny)?,
                barr_witness(b, rel, x2, nx, y2, ny)?,
            ) {
                (Some(w1), Some(w2)) => Some(Elem::pair(w1, w2)),
                _ => None,
            }
        }
        (Functor::Compose(f1, f2), Elem::Comp(tx, ox), Elem::Comp(ty, oy)) => {
            let mut rel2 = Vec::new();
            let mut wit = Vec::new();
            for (i, a) in tx.iter().enumerate() {
                for (j, b) in ty.iter().enumerate() {
                    if let Some(w) = barr_witness(f2, rel, a, nx, b, ny)? {
                        rel2.push((i, j));
                        wit.push(w);
                    }
                }
            }
            barr_witness(f1, &rel2, ox, tx.len(), oy, ty.len())?
                .map(|o| normalize_comp(f1, wit, &o))
        }
        _ => {
            return Err(Error::IllFormed(format!(
                "{x} / {y} are not elements of {f}"
            )));
        }
    })
}

fn to_u128(k: &BigUint) -> Result<u128> {
    k.to_u128()
        .ok_or_else(|| resource("bag multiplicity beyond 128 bits in flow search"))
}

/// Transportation problem: supplies `xs`, demands `ys`, edges `rel`.
fn bag_flow(
    rel: &[(usize, usize)],
    xs: &[(usize, BigUint)],
    nx: usize,
    ys: &[(usize, BigUint)],
    ny: usize,
) -> Result<Option<Elem>> {
    let sx: u128 = xs.iter().map(|(_, k)| to_u128(k)).sum::<Result<u128>>()?;
    let sy: u128 = ys.iter().map(|(_, k)| to_u128(k)).sum::<Result<u128>>()?;
    if sx != sy {
        return Ok(None);
    }
    let nodes = nx + ny + 2;
    let (src, snk) = (nx + ny, nx + ny + 1);
    let mut cap = vec![vec![0u128; nodes]; nodes];
    for (s, k) in xs {
        cap[src][*s] = to_u128(k)?;
    }
    for (o, k) in ys {
        cap[nx + o][snk] = to_u128(k)?;
    }
    for (s, o) in rel {
        cap[*s][nx + o] = sx;
    }
    let orig = cap.clone();
    let mut flow = 0u128;
    loop {
        let mut prev = vec![usize::MAX; nodes];
        prev[src] = src;
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            for v in 0..nodes {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    q.push_back(v);
                }
            }
        }
        if prev[snk] == usize::MAX {
            break;
        }
        let mut aug = u128::MAX;
        let mut v = snk;
        while v != src {
            aug = aug.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = snk;
        while v != src {
            cap[prev[v]][v] -= aug;
            cap[v][prev[v]] += aug;
            v = prev[v];
        }
        flow += aug;
    }
    if flow != sx {
        return Ok(None);
    }
    Ok(Some(Elem::bag_big(rel.iter().enumerate().map(
        |(k, (s, o))| {
            let used = orig[*s][nx + o] - cap[*s][nx + o].min(orig[*s][nx + o]);
            (k, BigUint::from(used))
        },
    ))))
}

/// Monotone neighbourhoods: the witness must contain every preimage of a
/// member and avoid every preimage of a non-member; the least candidate is
/// the upward closure of the required members.
fn mono_witness(
    rel: &[(usize, usize)],
    xs: &[u64],
    nx: usize,
    ys: &[u64],
    ny: usize,
) -> Result<Option<Elem>> {
    if nx > 16 || ny > 16 {
        return Err(resource(
            "monotone neighbourhood Barr lifting over more than 16 points",
        ));
    }
    let member = |fam: &[u64], z: u64| fam.iter().any(|m| m & !z == 0);
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for (side, fam, n) in [(0, xs, nx), (1, ys, ny)] {
        for z in 0..(1u64 << n) {
            let pre = rel.iter().enumerate().fold(0u64, |acc, (k, (s, o))| {
                let p = if side == 0 { *s } else { *o };
                if z >> p & 1 == 1 {
                    acc | 1 << k
                } else {
                    acc
                }
            });
            if member(fam, z) {
                ins.push(pre);
            } else {
                outs.push(pre);
            }
        }
    }
    let ins = minimal_antichain(ins);
    let ok = outs.iter().all(|o| !ins.iter().any(|i| i & !o == 0));
    Ok(ok.then_some(Elem::Mono(ins)))
}
