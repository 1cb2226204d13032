//! Model files (JSON) and the automaton text format.
//!
//! A model file looks like
//!
//! ```json
//! {
//!   "coalgebra": [["s1"], []],
//!   "functor": "powerset",
//!   "point": "s0",
//!   "states": ["s0", "s1"],
//!   "valuation": { "p": ["s1"] }
//! }
//! ```
//!
//! with one `coalgebra` entry per state, in the order of `states`. Entries
//! per functor: powerset a list of states, bag an object from states to
//! multiplicities, identity a state, labeled `[label, state]`, mono a list
//! of minimal sets, sum `{"tag": i, "value": ..}`, product `[x, y]`, and a
//! composite `{"table": [..], "outer": ..}` whose outer element refers to
//! table entries by index.
//!
//! Automata are written line by line:
//!
//! ```text
//! functor powerset
//! props p
//! initial 0
//! state 0 1 q0
//! trans 0 {} <>#0
//! trans 0 {p} true
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use crate::automata::{Automaton, TModel, MAX_PROPS};
use crate::error::{invalid, Error, Result};
use crate::functors::{bits, Elem, Functor};

use super::parser::parse_one_step;

/// A model together with the names of its points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedModel {
    pub model: TModel,
    pub names: Vec<String>,
}

enum Points<'a> {
    Named(&'a [String], HashMap<&'a str, usize>),
    Indices(usize),
}

impl Points<'_> {
    fn key(&self, s: usize) -> String {
        match self {
            Points::Named(ns, _) => ns[s].clone(),
            Points::Indices(_) => s.to_string(),
        }
    }

    fn write(&self, s: usize) -> Value {
        match self {
            Points::Named(ns, _) => Value::String(ns[s].clone()),
            Points::Indices(_) => json!(s),
        }
    }

    fn read_key(&self, k: &str) -> Result<usize> {
        match self {
            Points::Named(_, idx) => idx
                .get(k)
                .copied()
                .ok_or_else(|| invalid(format!("undeclared state `{k}`"))),
            Points::Indices(n) => k
                .parse()
                .ok()
                .filter(|i| i < n)
                .ok_or_else(|| invalid(format!("bad table index `{k}`"))),
        }
    }

    fn read(&self, v: &Value) -> Result<usize> {
        match (self, v) {
            (Points::Named(..), Value::String(k)) => self.read_key(k),
            (Points::Indices(n), Value::Number(k)) => k
                .as_u64()
                .map(|i| i as usize)
                .filter(|i| i < n)
                .ok_or_else(|| invalid(format!("bad table index {k}"))),
            _ => Err(invalid(format!("expected a state, found {v}"))),
        }
    }
}

fn array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    v.as_array()
        .ok_or_else(|| invalid(format!("expected a list for {what}, found {v}")))
}

fn encode(f: &Functor, e: &Elem, pts: &Points) -> Result<Value> {
    Ok(match (f, e) {
        (Functor::Identity, Elem::Point(s)) => pts.write(*s),
        (Functor::Powerset, Elem::Set(m)) => Value::Array(bits(*m).map(|s| pts.write(s)).collect()),
        (Functor::Bag, Elem::Bag(v)) => {
            let mut obj = Map::new();
            for (s, k) in v {
                let k = match u64::try_from(k) {
                    Ok(k) => json!(k),
                    Err(_) => Value::String(k.to_string()),
                };
                obj.insert(pts.key(*s), k);
            }
            Value::Object(obj)
        }
        (Functor::Labeled(_), Elem::Labeled(l, s)) => json!([&**l, pts.write(*s)]),
        (Functor::Mono, Elem::Mono(ms)) => Value::Array(
            ms.iter()
                .map(|m| Value::Array(bits(*m).map(|s| pts.write(s)).collect()))
                .collect(),
        ),
        (Functor::Sum(a, b), Elem::Inj(i, x)) => {
            let g = if *i == 1 { a } else { b };
            json!({ "tag": i, "value": encode(g, x, pts)? })
        }
        (Functor::Product(a, b), Elem::Pair(x, y)) => {
            json!([encode(a, x, pts)?, encode(b, y, pts)?])
        }
        (Functor::Compose(f1, f2), Elem::Comp(t, o)) => {
            let table = t
                .iter()
                .map(|x| encode(f2, x, pts))
                .collect::<Result<Vec<_>>>()?;
            json!({ "outer": encode(f1, o, &Points::Indices(t.len()))?, "table": table })
        }
        _ => return Err(invalid(format!("{e} is not an element of {f}"))),
    })
}

fn decode(f: &Functor, v: &Value, pts: &Points) -> Result<Elem> {
    Ok(match f {
        Functor::Identity => Elem::Point(pts.read(v)?),
        Functor::Powerset => {
            let mut m = 0u64;
            for x in array(v, "a powerset element")? {
                m |= 1 << pts.read(x)?;
            }
            Elem::Set(m)
        }
        Functor::Bag => {
            let obj = v
                .as_object()
                .ok_or_else(|| invalid(format!("expected a multiplicity table, found {v}")))?;
            let mut items = Vec::new();
            for (k, x) in obj {
                let mult = match x {
                    Value::Number(n) => n.as_u64().map(BigUint::from),
                    Value::String(s) => s.parse::<BigUint>().ok(),
                    _ => None,
                }
                .ok_or_else(|| invalid(format!("bad multiplicity {x}")))?;
                items.push((pts.read_key(k)?, mult));
            }
            items.sort();
            Elem::Bag(items)
        }
        Functor::Labeled(_) => match array(v, "a labeled element")?.as_slice() {
            [Value::String(l), s] => Elem::Labeled(Arc::from(l.as_str()), pts.read(s)?),
            _ => return Err(invalid(format!("expected [label, state], found {v}"))),
        },
        Functor::Mono => {
            let mut sets = Vec::new();
            for s in array(v, "a neighbourhood")? {
                let mut m = 0u64;
                for x in array(s, "a neighbourhood set")? {
                    m |= 1 << pts.read(x)?;
                }
                sets.push(m);
            }
            Elem::Mono(sets)
        }
        Functor::Sum(a, b) => {
            let tag = v.get("tag").and_then(Value::as_u64);
            let val = v
                .get("value")
                .ok_or_else(|| invalid(format!("expected {{tag, value}}, found {v}")))?;
            match tag {
                Some(1) => Elem::inj(1, decode(a, val, pts)?),
                Some(2) => Elem::inj(2, decode(b, val, pts)?),
                _ => return Err(invalid(format!("bad tag in {v}"))),
            }
        }
        Functor::Product(a, b) => match array(v, "a pair")?.as_slice() {
            [x, y] => Elem::pair(decode(a, x, pts)?, decode(b, y, pts)?),
            _ => return Err(invalid(format!("expected a pair, found {v}"))),
        },
        Functor::Compose(f1, f2) => {
            let table = v
                .get("table")
                .ok_or_else(|| invalid(format!("composite without table: {v}")))?;
            let table = array(table, "a table")?
                .iter()
                .map(|x| decode(f2, x, pts))
                .collect::<Result<Vec<_>>>()?;
            let outer = v
                .get("outer")
                .ok_or_else(|| invalid(format!("composite without outer: {v}")))?;
            let outer = decode(f1, outer, &Points::Indices(table.len()))?;
            Elem::Comp(table, Box::new(outer))
        }
    })
}

impl NamedModel {
    /// Name the points `s0, s1, ..`.
    pub fn new(model: TModel) -> NamedModel {
        let names = (0..model.len()).map(|s| format!("s{s}")).collect();
        NamedModel { model, names }
    }

    pub fn to_json(&self) -> Result<String> {
        let m = &self.model;
        m.check()?;
        if self.names.len() != m.len() {
            return Err(invalid("one name per state is required"));
        }
        let pts = points(&self.names)?;
        let coalg = m
            .coalg
            .iter()
            .map(|e| encode(&m.functor, e, &pts))
            .collect::<Result<Vec<_>>>()?;
        let valuation: Map<String, Value> = m
            .valuation
            .iter()
            .map(|(p, mask)| {
                (
                    p.to_string(),
                    Value::Array(bits(*mask).map(|s| pts.write(s)).collect()),
                )
            })
            .collect();
        let doc = json!({
            "coalgebra": coalg,
            "functor": m.functor.to_string(),
            "point": self.names[m.point],
            "states": self.names,
            "valuation": valuation,
        });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<NamedModel> {
        let doc: Value = serde_json::from_str(text)?;
        let field = |k: &str| {
            doc.get(k)
                .ok_or_else(|| invalid(format!("model file lacks `{k}`")))
        };
        let functor: Functor = field("functor")?
            .as_str()
            .ok_or_else(|| invalid("`functor` must be a string"))?
            .parse()?;
        let names = array(field("states")?, "states")?
            .iter()
            .map(|s| {
                s.as_str()
                    .map(String::from)
                    .ok_or_else(|| invalid(format!("state names are strings, found {s}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let pts = points(&names)?;
        let coalg = array(field("coalgebra")?, "coalgebra")?;
        if coalg.len() != names.len() {
            return Err(invalid(format!(
                "{} coalgebra entries for {} states",
                coalg.len(),
                names.len()
            )));
        }
        let coalg = coalg
            .iter()
            .map(|v| decode(&functor, v, &pts))
            .collect::<Result<Vec<_>>>()?;
        let point = pts.read(field("point")?)?;
        let mut valuation = BTreeMap::new();
        let val = field("valuation")?
            .as_object()
            .ok_or_else(|| invalid("`valuation` must be an object"))?;
        for (p, xs) in val {
            let mut m = 0u64;
            for x in array(xs, "a valuation entry")? {
                m |= 1 << pts.read(x)?;
            }
            valuation.insert(Arc::from(p.as_str()), m);
        }
        let model = TModel {
            functor,
            coalg,
            valuation,
            point,
        };
        model.check()?;
        Ok(NamedModel { model, names })
    }
}

fn points(names: &[String]) -> Result<Points<'_>> {
    if names.is_empty() || names.len() > crate::functors::MAX_CARRIER {
        return Err(invalid(format!(
            "{} states (between 1 and {})",
            names.len(),
            crate::functors::MAX_CARRIER
        )));
    }
    let mut idx = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if idx.insert(n.as_str(), i).is_some() {
            return Err(invalid(format!("state `{n}` declared twice")));
        }
    }
    Ok(Points::Named(names, idx))
}

fn color_text(aut: &Automaton, c: usize) -> String {
    let ps: Vec<&str> = aut
        .props
        .iter()
        .enumerate()
        .filter(|(i, _)| c >> i & 1 == 1)
        .map(|(_, p)| &**p)
        .collect();
    format!("{{{}}}", ps.join(","))
}

pub fn render_automaton(aut: &Automaton) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "functor {}", aut.functor);
    let props: Vec<&str> = aut.props.iter().map(|p| &**p).collect();
    let _ = writeln!(
        out,
        "props{}{}",
        if props.is_empty() { "" } else { " " },
        props.join(" ")
    );
    let _ = writeln!(out, "initial {}", aut.initial);
    for a in 0..aut.len() {
        let _ = writeln!(out, "state {a} {} {}", aut.priority[a], aut.names[a]);
    }
    for a in 0..aut.len() {
        for c in 0..aut.colors() {
            let _ = writeln!(out, "trans {a} {} {}", color_text(aut, c), aut.delta[a][c]);
        }
    }
    out
}

fn line_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column: 1,
        message: message.into(),
    }
}

/// Read the text format; transition formulas are parsed over the declared
/// functor, the basis representation is not stored.
pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let mut functor: Option<Functor> = None;
    let mut props: Option<Vec<Arc<str>>> = None;
    let mut initial = None;
    let mut states: Vec<(u32, String)> = Vec::new();
    let mut trans: Vec<(usize, usize, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        let (kw, rest) = line.split_once(' ').unwrap_or((line, ""));
        match kw {
            "functor" => {
                functor = Some(
                    rest.parse()
                        .map_err(|e: Error| line_err(ln, e.to_string()))?,
                )
            }
            "props" => {
                let ps: Vec<Arc<str>> = rest.split_whitespace().map(Arc::from).collect();
                if ps.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(line_err(ln, "letters must be sorted and distinct"));
                }
                if ps.len() > MAX_PROPS {
                    return Err(line_err(
                        ln,
                        format!("{} letters (at most {MAX_PROPS})", ps.len()),
                    ));
                }
                props = Some(ps);
            }
            "initial" => {
                initial = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|_| line_err(ln, "bad initial state"))?,
                )
            }
            "state" => {
                let mut it = rest.splitn(3, ' ');
                let idx: usize = it
                    .next()
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| line_err(ln, "bad state index"))?;
                let pr: u32 = it
                    .next()
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| line_err(ln, "bad priority"))?;
                let name = it.next().unwrap_or("").to_string();
                if idx != states.len() || name.is_empty() {
                    return Err(line_err(
                        ln,
                        "states must be declared in order, with a name",
                    ));
                }
                states.push((pr, name));
            }
            "trans" => {
                let (a, rest) = rest
                    .split_once(' ')
                    .ok_or_else(|| line_err(ln, "bad transition"))?;
                let a: usize = a.parse().map_err(|_| line_err(ln, "bad state index"))?;
                let rest = rest.trim_start();
                let close = rest
                    .find('}')
                    .filter(|_| rest.starts_with('{'))
                    .ok_or_else(|| line_err(ln, "expected a colour `{..}`"))?;
                let ps = props
                    .as_ref()
                    .ok_or_else(|| line_err(ln, "`props` must precede transitions"))?;
                let mut c = 0;
                for p in rest[1..close]
                    .split(',')
                    .map(str::trim)
                    .filter(|p| !p.is_empty())
                {
                    let j = ps
                        .iter()
                        .position(|q| &**q == p)
                        .ok_or_else(|| line_err(ln, format!("unknown letter `{p}`")))?;
                    c |= 1 << j;
                }
                trans.push((a, c, rest[close + 1..].trim().to_string(), ln));
            }
            _ => return Err(line_err(ln, format!("unknown directive `{kw}`"))),
        }
    }
    let functor = functor.ok_or_else(|| invalid("automaton file lacks `functor`"))?;
    let props = props.ok_or_else(|| invalid("automaton file lacks `props`"))?;
    let initial = initial.ok_or_else(|| invalid("automaton file lacks `initial`"))?;
    let n = states.len();
    let colors = 1usize << props.len();
    let mut delta: Vec<Vec<Option<crate::logic::OneStep>>> = vec![vec![None; colors]; n];
    for (a, c, text, ln) in trans {
        if a >= n {
            return Err(line_err(ln, format!("undeclared state {a}")));
        }
        let alpha = parse_one_step(&text, &functor).map_err(|e| match e {
            Error::Parse {
                column, message, ..
            } => Error::Parse {
                line: ln,
                column,
                message,
            },
            other => other,
        })?;
        if delta[a][c].replace(alpha).is_some() {
            return Err(line_err(ln, "duplicate transition"));
        }
    }
    let delta = delta
        .into_iter()
        .enumerate()
        .map(|(a, row)| {
            row.into_iter()
                .enumerate()
                .map(|(c, x)| {
                    x.ok_or_else(|| {
                        invalid(format!("missing transition for state {a}, colour {c}"))
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<_>>>>()?;
    let aut = Automaton {
        functor,
        props,
        names: states.iter().map(|s| s.1.clone()).collect(),
        delta,
        priority: states.iter().map(|s| s.0).collect(),
        initial,
        basis: None,
    };
    aut.check()?;
    Ok(aut)
}
