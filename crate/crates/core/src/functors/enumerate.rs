use crate::error::{resource, Result};
use crate::functors::{full, normalize_comp, Elem, Functor};

/// Explicit enumeration caps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest bag multiplicity enumerated per point.
    pub bag_mult: u32,
    /// Largest materialised `T2 S` for composite functors.
    pub compose_table: usize,
    /// Largest number of elements produced by one enumeration.
    pub max_elements: usize,
    /// Largest carrier used by bounded model enumerations.
    pub carrier: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            bag_mult: 2,
            compose_table: 16,
            max_elements: 1 << 20,
            carrier: 3,
        }
    }
}

impl Caps {
    pub fn with_bag(mut self, k: u32) -> Self {
        self.bag_mult = k;
        self
    }

    pub fn with_carrier(mut self, n: usize) -> Self {
        self.carrier = n;
        self
    }

    /// Read overrides from `COALMU_CAPS`, e.g. `bag=3,table=32,elements=100000,carrier=4`.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Ok(s) = std::env::var("COALMU_CAPS") {
            for part in s.split(',') {
                let Some((k, v)) = part.split_once('=') else {
                    continue;
                };
                let Ok(v) = v.trim().parse::<usize>() else {
                    continue;
                };
                match k.trim() {
                    "bag" => caps.bag_mult = v as u32,
                    "table" => caps.compose_table = v,
                    "elements" => caps.max_elements = v,
                    "carrier" => caps.carrier = v,
                    _ => {}
                }
            }
        }
        caps
    }
}

impl Functor {
    /// All elements of `T S` for `|S| = n` within the caps, without duplicates.
    pub fn enumerate(&self, n: usize, caps: &Caps) -> Result<Vec<Elem>> {
        let out = match self {
            Functor::Identity => (0..n).map(Elem::Point).collect(),
            Functor::Powerset => {
                if n > 20 {
                    return Err(resource(format!("powerset enumeration over {n} points")));
                }
                check(1usize << n, caps)?;
                (0..=full(n)).map(Elem::Set).collect()
            }
            Functor::Bag => {
                let per = caps.bag_mult as usize + 1;
                let total = per.checked_pow(n as u32).unwrap_or(usize::MAX);
                check(total, caps)?;
                let mut out = Vec::with_capacity(total);
                let mut digits = vec![0u64; n];
                loop {
                    out.push(Elem::bag(digits.iter().enumerate().map(|(s, k)| (s, *k))));
                    let mut i = 0;
                    loop {
                        if i == n {
                            return Ok(out);
                        }
                        digits[i] += 1;
                        if digits[i] as usize == per {
                            digits[i] = 0;
                            i += 1;
                        } else {
                            break;
                        }
                    }
                }
            }
            Functor::Labeled(ls) => ls
                .iter()
                .flat_map(|l| (0..n).map(move |s| Elem::Labeled(l.clone(), s)))
                .collect(),
            Functor::Mono => {
                if n > 5 {
                    return Err(resource(format!(
                        "monotone neighbourhood enumeration over {n} points"
                    )));
                }
                let mut out = Vec::new();
                antichains(n, 0, &mut Vec::new(), &mut out);
                check(out.len(), caps)?;
                out.into_iter().map(Elem::Mono).collect()
            }
            Functor::Sum(a, b) => {
                let mut out: Vec<Elem> = a
                    .enumerate(n, caps)?
                    .into_iter()
                    .map(|e| Elem::inj(1, e))
                    .collect();
                out.extend(b.enumerate(n, caps)?.into_iter().map(|e| Elem::inj(2, e)));
                out
            }
            Functor::Product(a, b) => {
                let xs = a.enumerate(n, caps)?;
                let ys = b.enumerate(n, caps)?;
                check(xs.len().saturating_mul(ys.len()), caps)?;
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for x in &xs {
                    for y in &ys {
                        out.push(Elem::pair(x.clone(), y.clone()));
                    }
                }
                out
            }
            Functor::Compose(f1, f2) => {
                let table = f2.enumerate(n, caps)?;
                if table.len() > caps.compose_table {
                    return Err(resource(format!(
                        "composite table has {} entries, cap is {}",
                        table.len(),
                        caps.compose_table
                    )));
                }
                let outers = f1.enumerate(table.len(), caps)?;
                let mut out: Vec<Elem> = outers
                    .iter()
                    .map(|o| normalize_comp(f1, table.clone(), o))
                    .collect();
                out.sort();
                out.dedup();
                out
            }
        };
        check(out.len(), caps)?;
        Ok(out)
    }
}

fn check(count: usize, caps: &Caps) -> Result<()> {
    if count > caps.max_elements {
        Err(resource(format!(
            "{count} elements exceed the cap of {}",
            caps.max_elements
        )))
    } else {
        Ok(())
    }
}

fn antichains(n: usize, from: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    let mut sorted = cur.clone();
    sorted.sort();
    out.push(sorted);
    for s in from..=full(n) {
        if cur.iter().all(|m| m & s != *m && m & s != s) {
            cur.push(s);
            antichains(n, s + 1, cur, out);
            cur.pop();
        }
    }
}
