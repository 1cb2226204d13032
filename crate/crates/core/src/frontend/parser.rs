//! Text syntax for fixpoint formulas and one-step formulas.
//!
//! Modal prefixes depend on the functor: `<>`/`[]` (powerset, mono),
//! `<k>`/`[k]` (bag), `X` (identity, labeled), `!l`/`!~l` (labeled),
//! `@i` followed by a component modality (sum, product), and for a
//! composite `F1 . F2` an `F1` prefix followed by one parenthesised `F2`
//! formula per argument of the `F1` modality.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functors::Functor;
use crate::logic::{Bool, Composed, Lifting, Mu, OneStep};
use crate::var::Var;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u32),
    Hash(usize),
    At(u8),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Tilde,
    Amp,
    Bar,
    Dot,
    Bang,
    Diamond,
    Boxx,
    AtLeast(u32),
    Fewer(u32),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let number = |i: &mut usize, col: &mut usize| -> Option<u64> {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        *col += *i - start;
        chars[start..*i].iter().collect::<String>().parse().ok()
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            let n = number(&mut i, &mut col).ok_or_else(|| err(l0, c0, "number too large"))?;
            Tok::Num(u32::try_from(n).map_err(|_| err(l0, c0, "number too large"))?)
        } else {
            let next = chars.get(i + 1).copied();
            let simple = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                ',' => Some(Tok::Comma),
                '~' => Some(Tok::Tilde),
                '&' => Some(Tok::Amp),
                '|' => Some(Tok::Bar),
                '.' => Some(Tok::Dot),
                '!' => Some(Tok::Bang),
                _ => None,
            };
            if let Some(t) = simple {
                i += 1;
                col += 1;
                t
            } else if (c == '<' && next == Some('>')) || (c == '[' && next == Some(']')) {
                i += 2;
                col += 2;
                if c == '<' {
                    Tok::Diamond
                } else {
                    Tok::Boxx
                }
            } else if c == '<' || c == '[' {
                let close = if c == '<' { '>' } else { ']' };
                i += 1;
                col += 1;
                if !next.is_some_and(|d| d.is_ascii_digit()) {
                    return Err(err(l0, c0, format!("expected `{c}{close}` or a grade")));
                }
                let k = number(&mut i, &mut col)
                    .and_then(|k| u32::try_from(k).ok())
                    .ok_or_else(|| err(l0, c0, "grade too large"))?;
                if chars.get(i) != Some(&close) {
                    return Err(err(line, col, format!("expected `{close}`")));
                }
                i += 1;
                col += 1;
                if c == '<' {
                    Tok::AtLeast(k)
                } else {
                    Tok::Fewer(k)
                }
            } else if c == '#' || c == '@' {
                i += 1;
                col += 1;
                let n = number(&mut i, &mut col)
                    .ok_or_else(|| err(l0, c0, format!("expected a number after `{c}`")))?;
                if c == '#' {
                    Tok::Hash(n as usize)
                } else {
                    Tok::At(u8::try_from(n).map_err(|_| err(l0, c0, "tag too large"))?)
                }
            } else {
                return Err(err(l0, c0, format!("unexpected character `{c}`")));
            }
        };
        out.push(Token {
            tok,
            line: l0,
            column: c0,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    functor: Functor,
}

/// Parses the argument of a modality.
type ArgFn<'a, A> = dyn FnMut(&mut Parser) -> Result<A> + 'a;

impl Parser {
    fn new(text: &str, functor: &Functor) -> Result<Parser> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            functor: functor.clone(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let t = &self.toks[self.pos];
        err(t.line, t.column, message)
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Eof => "end of input".into(),
            Tok::Ident(s) => format!("`{s}`"),
            t => format!("{t:?}"),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", self.describe())))
        }
    }

    fn finish(&self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.describe())))
        }
    }

    fn ident(&mut self) -> Result<String> {
        let at = self.pos;
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            _ => {
                self.pos = at;
                Err(self.error(format!("expected a name, found {}", self.describe())))
            }
        }
    }

    // ---------------------------------------------------------- fixpoint formulas

    fn formula(&mut self) -> Result<Mu> {
        if let Some(b) = self.binder()? {
            return Ok(b);
        }
        let mut items = vec![self.conj()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            items.push(self.conj()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Mu::Or(items)
        })
    }

    fn conj(&mut self) -> Result<Mu> {
        let mut items = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Mu::And(items)
        })
    }

    fn binder(&mut self) -> Result<Option<Mu>> {
        let least = match self.peek() {
            Tok::Ident(s) if s == "mu" => true,
            Tok::Ident(s) if s == "nu" => false,
            _ => return Ok(None),
        };
        self.bump();
        let x = self.ident()?;
        self.expect(Tok::Dot, "`.` after the bound variable")?;
        let body = self.formula()?;
        Ok(Some(if least {
            Mu::mu(&x, body)
        } else {
            Mu::nu(&x, body)
        }))
    }

    fn unary(&mut self) -> Result<Mu> {
        if *self.peek() == Tok::Tilde {
            self.bump();
            return Ok(Mu::not(self.unary()?));
        }
        if let Some(b) = self.binder()? {
            return Ok(b);
        }
        let f = self.functor.clone();
        if let Some((l, args)) = self.modal(&f, &mut |p: &mut Parser| p.unary())? {
            return Ok(Mu::Modal(l, args));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Mu> {
        let at = self.pos;
        match self.bump() {
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => Ok(Mu::Top),
            Tok::Ident(s) if s == "false" => Ok(Mu::Bot),
            Tok::Ident(s) => Ok(Mu::prop(&s)),
            Tok::Hash(i) => Ok(Mu::Prop(Var::Index(i))),
            _ => {
                self.pos = at;
                Err(self.error(format!("expected a formula, found {}", self.describe())))
            }
        }
    }

    // ---------------------------------------------------------- modalities

    /// A modality of `g` with its arguments, if the next token starts one.
    fn modal<A: Clone + PartialEq>(
        &mut self,
        g: &Functor,
        arg: &mut ArgFn<A>,
    ) -> Result<Option<(Lifting, Vec<A>)>> {
        let start = self.pos;
        let l = match (g, self.peek().clone()) {
            (Functor::Powerset | Functor::Mono, Tok::Diamond) => Lifting::Diamond,
            (Functor::Powerset | Functor::Mono, Tok::Boxx) => Lifting::Box,
            (Functor::Bag, Tok::AtLeast(k)) => Lifting::AtLeast(k),
            (Functor::Bag, Tok::Fewer(k)) => Lifting::Fewer(k),
            (Functor::Identity | Functor::Labeled(_), Tok::Ident(s)) if s == "X" => Lifting::Next,
            (Functor::Labeled(ls), Tok::Bang) => {
                self.bump();
                let neg = *self.peek() == Tok::Tilde;
                if neg {
                    self.bump();
                }
                let at = self.pos;
                let name = self.ident()?;
                if !ls.iter().any(|x| **x == *name) {
                    self.pos = at;
                    return Err(self.error(format!("label `{name}` is not declared by {g}")));
                }
                let name: Arc<str> = Arc::from(name);
                return Ok(Some((
                    if neg {
                        Lifting::NotLabel(name)
                    } else {
                        Lifting::Label(name)
                    },
                    vec![],
                )));
            }
            (Functor::Sum(a, b) | Functor::Product(a, b), Tok::At(i)) => {
                self.bump();
                let comp = match i {
                    1 => a.clone(),
                    2 => b.clone(),
                    _ => {
                        self.pos = start;
                        return Err(self.error(format!("{g} has no component {i}")));
                    }
                };
                if let Tok::Ident(s) = self.peek() {
                    if s == "true" || s == "false" {
                        let l = if s == "true" {
                            Lifting::Top
                        } else {
                            Lifting::Bot
                        };
                        self.bump();
                        return Ok(Some((Lifting::tag(i, l), vec![])));
                    }
                }
                return match self.modal(&comp, arg)? {
                    Some((l, args)) => Ok(Some((Lifting::tag(i, l), args))),
                    None => Err(self.error(format!("expected a modality of {comp} after `@{i}`"))),
                };
            }
            (Functor::Compose(f1, f2), _) => return self.composite(f1, f2, arg),
            _ => return Ok(None),
        };
        self.bump();
        let args = (0..l.arity())
            .map(|_| arg(self))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some((l, args)))
    }

    fn composite<A: Clone + PartialEq>(
        &mut self,
        f1: &Functor,
        f2: &Functor,
        arg: &mut ArgFn<A>,
    ) -> Result<Option<(Lifting, Vec<A>)>> {
        if matches!(f1, Functor::Compose(..)) {
            return Ok(None);
        }
        let mut positions: Vec<A> = Vec::new();
        let f2 = f2.clone();
        let outer = self.modal(f1, &mut |p: &mut Parser| {
            p.expect(Tok::LParen, "`(` opening an inner formula")?;
            let inner = p.one_step(&f2, &mut |p: &mut Parser| {
                let a = arg(p)?;
                let j = match positions.iter().position(|x| *x == a) {
                    Some(j) => j,
                    None => {
                        positions.push(a);
                        positions.len() - 1
                    }
                };
                Ok(Bool::Var(Var::Index(j)))
            })?;
            p.expect(Tok::RParen, "`)` closing an inner formula")?;
            Ok(inner)
        })?;
        Ok(outer.map(|(l, inner)| {
            let arity = positions.len();
            (
                Lifting::Comp(Arc::new(Composed {
                    outer: l,
                    inner,
                    arity,
                })),
                positions,
            )
        }))
    }

    // ---------------------------------------------------------- one-step formulas

    fn one_step(&mut self, g: &Functor, arg: &mut ArgFn<Bool>) -> Result<OneStep> {
        let mut items = vec![self.one_step_conj(g, arg)?];
        while *self.peek() == Tok::Bar {
            self.bump();
            items.push(self.one_step_conj(g, arg)?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            OneStep::Or(items)
        })
    }

    fn one_step_conj(&mut self, g: &Functor, arg: &mut ArgFn<Bool>) -> Result<OneStep> {
        let mut items = vec![self.one_step_unary(g, arg)?];
        while *self.peek() == Tok::Amp {
            self.bump();
            items.push(self.one_step_unary(g, arg)?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            OneStep::And(items)
        })
    }

    fn one_step_unary(&mut self, g: &Functor, arg: &mut ArgFn<Bool>) -> Result<OneStep> {
        if let Some((l, args)) = self.modal(g, arg)? {
            return Ok(OneStep::Modal(l, args));
        }
        let at = self.pos;
        match self.bump() {
            Tok::Tilde => Ok(OneStep::Not(Box::new(self.one_step_unary(g, arg)?))),
            Tok::LParen => {
                let a = self.one_step(g, arg)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(a)
            }
            Tok::Ident(s) if s == "true" => Ok(OneStep::Top),
            Tok::Ident(s) if s == "false" => Ok(OneStep::Bot),
            _ => {
                self.pos = at;
                Err(self.error(format!(
                    "expected a one-step formula over {g}, found {}",
                    self.describe()
                )))
            }
        }
    }

    // ---------------------------------------------------------- boolean formulas

    fn boolean(&mut self) -> Result<Bool> {
        let mut items = vec![self.bool_conj()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            items.push(self.bool_conj()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Bool::Or(items)
        })
    }

    fn bool_conj(&mut self) -> Result<Bool> {
        let mut items = vec![self.bool_unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            items.push(self.bool_unary()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Bool::And(items)
        })
    }

    fn bool_unary(&mut self) -> Result<Bool> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Bool::Not(Box::new(self.bool_unary()?)))
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Bool::Top)
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Bool::Bot)
            }
            Tok::LParen => {
                let save = self.pos;
                if let Ok(v) = self.var() {
                    if matches!(v, Var::Pair(_)) {
                        return Ok(Bool::Var(v));
                    }
                }
                self.pos = save;
                self.bump();
                let b = self.boolean()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(b)
            }
            _ => Ok(Bool::Var(self.var()?)),
        }
    }

    /// Variables: names, `#k`, sets `{v,..}` and pairs `(v,w)`.
    fn var(&mut self) -> Result<Var> {
        let at = self.pos;
        match self.bump() {
            Tok::Ident(s) => Ok(Var::name(&s)),
            Tok::Hash(i) => Ok(Var::Index(i)),
            Tok::LBrace => {
                let mut items = Vec::new();
                if *self.peek() != Tok::RBrace {
                    items.push(self.var()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        items.push(self.var()?);
                    }
                }
                self.expect(Tok::RBrace, "`}`")?;
                Ok(Var::set(items))
            }
            Tok::LParen => {
                let a = self.var()?;
                self.expect(Tok::Comma, "`,` in a pair")?;
                let b = self.var()?;
                self.expect(Tok::RParen, "`)` closing a pair")?;
                Ok(Var::pair(a, b))
            }
            _ => {
                self.pos = at;
                Err(self.error(format!("expected a variable, found {}", self.describe())))
            }
        }
    }
}

/// Parse a fixpoint formula over the modalities of `functor`.
pub fn parse_formula(text: &str, functor: &Functor) -> Result<Mu> {
    let mut p = Parser::new(text, functor)?;
    let m = p.formula()?;
    p.finish()?;
    Ok(m)
}

/// Parse a one-step formula; modal arguments are boolean formulas over
/// names, `#k`, sets and pairs.
pub fn parse_one_step(text: &str, functor: &Functor) -> Result<OneStep> {
    let mut p = Parser::new(text, functor)?;
    let f = functor.clone();
    let a = p.one_step(&f, &mut |p: &mut Parser| p.bool_unary())?;
    p.finish()?;
    Ok(a)
}

/// Parse a boolean formula.
pub fn parse_bool(text: &str) -> Result<Bool> {
    let mut p = Parser::new(text, &Functor::Identity)?;
    let b = p.boolean()?;
    p.finish()?;
    Ok(b)
}
