//! Preference file reader.
//!
//! Precedence, tightest first: `!`, the sugars `<` `<w` `<e`, `&&`, `||`,
//! then at preference level `!!`, `&`, `|`, and the right-associative `<|`.

use std::collections::HashMap;

use thiserror::Error;

use super::{sugar, Desire, GeneralPreference};
use crate::syntax::{Cursor, Pos, SyntaxError, Tok};
use crate::theory::{ActionId, ActionTheory, Atom, FluentFormula, Literal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefError {
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: unknown fluent `{name}`")]
    UnknownFluent { name: String, pos: Pos },
    #[error("{pos}: unknown action `{name}`")]
    UnknownAction { name: String, pos: Pos },
    #[error("{pos}: {message}")]
    Resolution { pos: Pos, message: String },
    #[error("maxim accepts at most {max} desires, got {count}")]
    TooManyDesires { count: usize, max: usize },
    #[error("{pos}: `{name}` is already declared")]
    Duplicate { name: String, pos: Pos },
    #[error("no `optimize` statement")]
    NoOptimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SugarOp {
    Strong,
    Weak,
    Enabled,
}

#[derive(Debug, Clone)]
enum Raw {
    Atom(Atom, Pos),
    NegAtom(Atom, Pos),
    True,
    False,
    Occ(Atom, Pos),
    Goal(Box<Raw>, Pos),
    Next(Box<Raw>, Pos),
    Always(Box<Raw>, Pos),
    Eventually(Box<Raw>, Pos),
    Until(Box<Raw>, Box<Raw>, Pos),
    Before(Box<Raw>, Box<Raw>, Pos),
    Not(Box<Raw>, Pos),
    And(Box<Raw>, Box<Raw>, Pos),
    Or(Box<Raw>, Box<Raw>, Pos),
    Sugar {
        op: SugarOp,
        operands: Vec<Raw>,
        over: Option<Vec<String>>,
        pos: Pos,
    },
    PNeg(Box<Raw>, Pos),
    PConj(Box<Raw>, Box<Raw>, Pos),
    PDisj(Box<Raw>, Box<Raw>, Pos),
    PChain(Vec<Raw>, Pos),
    Maxim(Vec<Raw>, Pos),
}

type PResult<T> = Result<T, PrefError>;

// ------------------------------------------------------------------
// syntax

fn pref_chain(cur: &mut Cursor) -> PResult<Raw> {
    let pos = cur.pos();
    let mut elems = vec![pref_or(cur)?];
    while cur.eat(&Tok::LtBar) {
        elems.push(pref_or(cur)?);
    }
    Ok(if elems.len() == 1 {
        elems.pop().unwrap()
    } else {
        Raw::PChain(elems, pos)
    })
}

fn pref_or(cur: &mut Cursor) -> PResult<Raw> {
    let mut left = pref_and(cur)?;
    loop {
        let pos = cur.pos();
        if !cur.eat(&Tok::Bar) {
            return Ok(left);
        }
        left = Raw::PDisj(Box::new(left), Box::new(pref_and(cur)?), pos);
    }
}

fn pref_and(cur: &mut Cursor) -> PResult<Raw> {
    let mut left = pref_not(cur)?;
    loop {
        let pos = cur.pos();
        if !cur.eat(&Tok::Amp) {
            return Ok(left);
        }
        left = Raw::PConj(Box::new(left), Box::new(pref_not(cur)?), pos);
    }
}

fn pref_not(cur: &mut Cursor) -> PResult<Raw> {
    let pos = cur.pos();
    if cur.eat(&Tok::BangBang) {
        return Ok(Raw::PNeg(Box::new(pref_not(cur)?), pos));
    }
    desire_or(cur)
}

fn desire_or(cur: &mut Cursor) -> PResult<Raw> {
    let mut left = desire_and(cur)?;
    loop {
        let pos = cur.pos();
        if !cur.eat(&Tok::BarBar) {
            return Ok(left);
        }
        left = Raw::Or(Box::new(left), Box::new(desire_and(cur)?), pos);
    }
}

fn desire_and(cur: &mut Cursor) -> PResult<Raw> {
    let mut left = desire_sugar(cur)?;
    loop {
        let pos = cur.pos();
        if !cur.eat(&Tok::AmpAmp) {
            return Ok(left);
        }
        left = Raw::And(Box::new(left), Box::new(desire_sugar(cur)?), pos);
    }
}

fn sugar_op(tok: &Tok) -> Option<SugarOp> {
    match tok {
        Tok::Lt => Some(SugarOp::Strong),
        Tok::LtW => Some(SugarOp::Weak),
        Tok::LtE => Some(SugarOp::Enabled),
        _ => None,
    }
}

fn desire_sugar(cur: &mut Cursor) -> PResult<Raw> {
    let first = desire_not(cur)?;
    let Some(op) = sugar_op(cur.peek()) else {
        return Ok(first);
    };
    let pos = cur.pos();
    let mut operands = vec![first];
    while let Some(next) = sugar_op(cur.peek()) {
        if next != op {
            return Err(SyntaxError::new(
                cur.pos(),
                "different sugar operators in one chain need parentheses",
            )
            .into());
        }
        cur.next();
        operands.push(desire_not(cur)?);
    }
    let mut over = None;
    if op == SugarOp::Enabled && cur.peek_ident() == Some("over") {
        cur.next();
        cur.expect(&Tok::LBrace)?;
        let mut consts = Vec::new();
        loop {
            consts.push(crate::syntax::constant(cur)?);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
        cur.expect(&Tok::RBrace)?;
        over = Some(consts);
    }
    Ok(Raw::Sugar {
        op,
        operands,
        over,
        pos,
    })
}

fn desire_not(cur: &mut Cursor) -> PResult<Raw> {
    let pos = cur.pos();
    if cur.eat(&Tok::Bang) {
        return Ok(Raw::Not(Box::new(desire_not(cur)?), pos));
    }
    if cur.peek_ident() == Some("not") {
        cur.next();
        return Ok(Raw::Not(Box::new(desire_not(cur)?), pos));
    }
    primary(cur)
}

fn args(cur: &mut Cursor) -> PResult<Vec<Raw>> {
    cur.expect(&Tok::LParen)?;
    let mut out = vec![pref_chain(cur)?];
    while cur.eat(&Tok::Comma) {
        out.push(pref_chain(cur)?);
    }
    cur.expect(&Tok::RParen)?;
    Ok(out)
}

fn arity(name: &str, pos: Pos, mut xs: Vec<Raw>, n: usize) -> PResult<Vec<Raw>> {
    if xs.len() != n {
        return Err(SyntaxError::new(
            pos,
            format!("`{name}` takes {n} argument(s), {} given", xs.len()),
        )
        .into());
    }
    xs.truncate(n);
    Ok(xs)
}

fn primary(cur: &mut Cursor) -> PResult<Raw> {
    let pos = cur.pos();
    if cur.eat(&Tok::LParen) {
        let inner = pref_chain(cur)?;
        cur.expect(&Tok::RParen)?;
        return Ok(inner);
    }
    if cur.eat(&Tok::Minus) {
        let (atom, p) = crate::syntax::ground_atom(cur)?;
        return Ok(Raw::NegAtom(atom, p));
    }
    let Some(word) = cur.peek_ident().map(str::to_string) else {
        return Err(cur.unexpected("a desire").into());
    };
    let call = matches!(cur.peek_at(1), Tok::LParen);
    match (word.as_str(), call) {
        ("true", false) => {
            cur.next();
            Ok(Raw::True)
        }
        ("false", false) => {
            cur.next();
            Ok(Raw::False)
        }
        ("occ", true) => {
            cur.next();
            cur.expect(&Tok::LParen)?;
            let (atom, p) = crate::syntax::ground_atom(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(Raw::Occ(atom, p))
        }
        ("goal" | "next" | "always" | "eventually", true) => {
            cur.next();
            let mut xs = arity(&word, pos, args(cur)?, 1)?;
            let x = Box::new(xs.pop().unwrap());
            Ok(match word.as_str() {
                "goal" => Raw::Goal(x, pos),
                "next" => Raw::Next(x, pos),
                "always" => Raw::Always(x, pos),
                _ => Raw::Eventually(x, pos),
            })
        }
        ("until" | "before", true) => {
            cur.next();
            let mut xs = arity(&word, pos, args(cur)?, 2)?;
            let b = Box::new(xs.pop().unwrap());
            let a = Box::new(xs.pop().unwrap());
            Ok(if word == "until" {
                Raw::Until(a, b, pos)
            } else {
                Raw::Before(a, b, pos)
            })
        }
        ("maxim", true) => {
            cur.next();
            Ok(Raw::Maxim(args(cur)?, pos))
        }
        _ => {
            let (atom, p) = crate::syntax::ground_atom(cur)?;
            Ok(Raw::Atom(atom, p))
        }
    }
}

// ------------------------------------------------------------------
// resolution

#[derive(Debug, Clone)]
enum Expr {
    Desire(Desire),
    Pref(GeneralPreference),
}

struct Resolver<'a> {
    theory: &'a ActionTheory,
    names: HashMap<String, Expr>,
}

enum Group {
    Actions(Vec<ActionId>),
    Schema(String),
}

fn resolution(pos: Pos, message: impl Into<String>) -> PrefError {
    PrefError::Resolution {
        pos,
        message: message.into(),
    }
}

impl Resolver<'_> {
    fn fluent(&self, atom: &Atom, pos: Pos) -> PResult<Literal> {
        match self.theory.fluent_id(atom) {
            Some(f) => Ok(Literal::pos(f)),
            None if self.theory.action_id(atom).is_some() => Err(resolution(
                pos,
                format!("`{atom}` is an action; write occ({atom}) to refer to its occurrence"),
            )),
            None => Err(PrefError::UnknownFluent {
                name: atom.to_string(),
                pos,
            }),
        }
    }

    fn action(&self, atom: &Atom, pos: Pos) -> PResult<ActionId> {
        self.theory
            .action_id(atom)
            .ok_or_else(|| PrefError::UnknownAction {
                name: atom.to_string(),
                pos,
            })
    }

    fn desire(&self, raw: &Raw) -> PResult<Desire> {
        match self.expr(raw)? {
            Expr::Desire(d) => Ok(d),
            Expr::Pref(_) => Err(resolution(
                raw_pos(raw),
                "a preference cannot be used as a desire",
            )),
        }
    }

    fn pref(&self, raw: &Raw) -> PResult<GeneralPreference> {
        Ok(match self.expr(raw)? {
            Expr::Desire(d) => d.into(),
            Expr::Pref(p) => p,
        })
    }

    fn formula(&self, raw: &Raw, what: &str) -> PResult<FluentFormula> {
        match self.desire(raw)?.normalize() {
            Desire::Formula(f) => Ok(f),
            _ => Err(resolution(
                raw_pos(raw),
                format!("{what} accepts only fluent formulas"),
            )),
        }
    }

    fn group(&self, raw: &Raw) -> PResult<Group> {
        match raw {
            Raw::Atom(atom, pos) | Raw::Occ(atom, pos) => {
                if let Some(a) = self.theory.action_id(atom) {
                    return Ok(Group::Actions(vec![a]));
                }
                let is_schema = atom.args.is_empty()
                    && self
                        .theory
                        .actions()
                        .iter()
                        .any(|a| a.name == atom.name && !a.args.is_empty());
                if is_schema {
                    Ok(Group::Schema(atom.name.clone()))
                } else {
                    Err(PrefError::UnknownAction {
                        name: atom.to_string(),
                        pos: *pos,
                    })
                }
            }
            Raw::Or(a, b, pos) => match (self.group(a)?, self.group(b)?) {
                (Group::Actions(mut x), Group::Actions(y)) => {
                    x.extend(y);
                    Ok(Group::Actions(x))
                }
                _ => Err(resolution(
                    *pos,
                    "action schemas cannot be combined with `||`",
                )),
            },
            other => Err(resolution(
                raw_pos(other),
                "`<e` expects actions or disjunctions of actions",
            )),
        }
    }

    fn expr(&self, raw: &Raw) -> PResult<Expr> {
        let d = |x: Desire| Ok(Expr::Desire(x));
        match raw {
            Raw::Atom(atom, pos) => {
                if atom.args.is_empty() {
                    if let Some(e) = self.names.get(&atom.name) {
                        return Ok(e.clone());
                    }
                }
                d(Desire::lit(self.fluent(atom, *pos)?))
            }
            Raw::NegAtom(atom, pos) => d(Desire::lit(self.fluent(atom, *pos)?.complement())),
            Raw::True => d(Desire::Formula(FluentFormula::True)),
            Raw::False => d(Desire::Formula(FluentFormula::False)),
            Raw::Occ(atom, pos) => d(Desire::Occ(self.action(atom, *pos)?)),
            Raw::Goal(x, _) => d(Desire::Goal(self.formula(x, "goal(...)")?)),
            Raw::Next(x, _) => d(Desire::next(self.desire(x)?)),
            Raw::Always(x, _) => d(Desire::always(self.desire(x)?)),
            Raw::Eventually(x, _) => d(Desire::eventually(self.desire(x)?)),
            Raw::Until(a, b, _) => d(Desire::until(self.desire(a)?, self.desire(b)?)),
            Raw::Before(a, b, _) => d(sugar::temporal_order_desire(
                self.formula(a, "before(...)")?,
                self.formula(b, "before(...)")?,
            )),
            Raw::Not(x, _) => d(Desire::not(self.desire(x)?)),
            Raw::And(a, b, _) => d(Desire::and(self.desire(a)?, self.desire(b)?)),
            Raw::Or(a, b, _) => d(Desire::or(self.desire(a)?, self.desire(b)?)),
            Raw::Sugar {
                op,
                operands,
                over,
                pos,
            } => match op {
                SugarOp::Strong | SugarOp::Weak => {
                    let ds = operands
                        .iter()
                        .map(|o| self.desire(o))
                        .collect::<PResult<Vec<_>>>()?;
                    let out = if *op == SugarOp::Strong {
                        sugar::strong_chain(ds)
                    } else {
                        sugar::weak_chain(ds)
                    };
                    d(out.expect("at least two operands"))
                }
                SugarOp::Enabled => {
                    let groups = operands
                        .iter()
                        .map(|o| self.group(o))
                        .collect::<PResult<Vec<_>>>()?;
                    match groups.as_slice() {
                        [Group::Schema(a), Group::Schema(b)] => {
                            d(
                                sugar::enabled_parametric(self.theory, a, b, over.as_deref())
                                    .map_err(|e| at(e, *pos))?,
                            )
                        }
                        gs if gs.iter().all(|g| matches!(g, Group::Actions(_))) => {
                            if over.is_some() {
                                return Err(resolution(
                                    *pos,
                                    "`over` applies only to action schemas",
                                ));
                            }
                            let mut parts = Vec::new();
                            for w in gs.windows(2) {
                                let (Group::Actions(x), Group::Actions(y)) = (&w[0], &w[1]) else {
                                    unreachable!()
                                };
                                parts.push(sugar::enabled_group(self.theory, x, y)?);
                            }
                            d(Desire::and_all(parts).expect("at least two operands"))
                        }
                        _ => Err(resolution(
                            *pos,
                            "action schemas with `<e` take exactly two schema names",
                        )),
                    }
                }
            },
            Raw::PNeg(x, _) => Ok(Expr::Pref(GeneralPreference::neg(self.pref(x)?))),
            Raw::PConj(a, b, _) => Ok(Expr::Pref(GeneralPreference::conj(
                self.pref(a)?,
                self.pref(b)?,
            ))),
            Raw::PDisj(a, b, _) => Ok(Expr::Pref(GeneralPreference::disj(
                self.pref(a)?,
                self.pref(b)?,
            ))),
            Raw::PChain(xs, _) => {
                let elems = xs
                    .iter()
                    .map(|x| self.pref(x))
                    .collect::<PResult<Vec<_>>>()?;
                Ok(Expr::Pref(GeneralPreference::chain(elems)))
            }
            Raw::Maxim(xs, _) => {
                let ds = xs
                    .iter()
                    .map(|x| self.desire(x))
                    .collect::<PResult<Vec<_>>>()?;
                Ok(Expr::Pref(sugar::maxim(&ds)?))
            }
        }
    }
}

fn at(e: PrefError, pos: Pos) -> PrefError {
    match e {
        PrefError::UnknownAction { name, .. } => PrefError::UnknownAction { name, pos },
        PrefError::Resolution { message, .. } => PrefError::Resolution { pos, message },
        other => other,
    }
}

fn raw_pos(raw: &Raw) -> Pos {
    match raw {
        Raw::Atom(_, p) | Raw::NegAtom(_, p) | Raw::Occ(_, p) => *p,
        Raw::Goal(_, p)
        | Raw::Next(_, p)
        | Raw::Always(_, p)
        | Raw::Eventually(_, p)
        | Raw::Until(_, _, p)
        | Raw::Before(_, _, p)
        | Raw::Not(_, p)
        | Raw::And(_, _, p)
        | Raw::Or(_, _, p)
        | Raw::PNeg(_, p)
        | Raw::PConj(_, _, p)
        | Raw::PDisj(_, _, p)
        | Raw::PChain(_, p)
        | Raw::Maxim(_, p) => *p,
        Raw::Sugar { pos, .. } => *pos,
        Raw::True | Raw::False => Pos::default(),
    }
}

/// A resolved preference file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefFile {
    pub desires: Vec<(String, Desire)>,
    pub prefs: Vec<(String, GeneralPreference)>,
    pub optimize: Option<(String, GeneralPreference)>,
}

impl PrefFile {
    /// The preference selected by `optimize`.
    pub fn root(&self) -> Result<&GeneralPreference, PrefError> {
        self.optimize
            .as_ref()
            .map(|(_, p)| p)
            .ok_or(PrefError::NoOptimize)
    }

    pub fn desire(&self, name: &str) -> Option<&Desire> {
        self.desires.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    /// A declared name as a preference (desires are lifted).
    pub fn preference(&self, name: &str) -> Option<GeneralPreference> {
        self.prefs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p.clone())
            .or_else(|| self.desire(name).map(|d| d.clone().into()))
    }
}

/// Reads `desire n = e.`, `pref n = e.` and `optimize n.` statements.
/// Names must be declared before use and are inlined.
pub fn parse_preference(theory: &ActionTheory, text: &str) -> Result<PrefFile, PrefError> {
    let mut cur = Cursor::new(text)?;
    let mut r = Resolver {
        theory,
        names: HashMap::new(),
    };
    let mut file = PrefFile {
        desires: Vec::new(),
        prefs: Vec::new(),
        optimize: None,
    };
    while !cur.at_eof() {
        let (kw, kpos) = cur.ident()?;
        match kw.as_str() {
            "desire" | "pref" => {
                let (name, npos) = cur.ident()?;
                if r.names.contains_key(&name) {
                    return Err(PrefError::Duplicate { name, pos: npos });
                }
                if theory.fluent_id(&Atom::constant(&name)).is_some()
                    || theory.action_id(&Atom::constant(&name)).is_some()
                {
                    return Err(resolution(
                        npos,
                        format!("`{name}` is already a fluent or action name"),
                    ));
                }
                cur.expect(&Tok::Eq)?;
                let raw = pref_chain(&mut cur)?;
                cur.expect(&Tok::Dot)?;
                if kw == "desire" {
                    let d = r.desire(&raw)?.normalize();
                    file.desires.push((name.clone(), d.clone()));
                    r.names.insert(name, Expr::Desire(d));
                } else {
                    let p = r.pref(&raw)?.normalize();
                    file.prefs.push((name.clone(), p.clone()));
                    r.names.insert(name, Expr::Pref(p));
                }
            }
            "optimize" => {
                let (name, npos) = cur.ident()?;
                cur.expect(&Tok::Dot)?;
                if file.optimize.is_some() {
                    return Err(resolution(kpos, "more than one `optimize` statement"));
                }
                let p = match r.names.get(&name) {
                    Some(Expr::Desire(d)) => d.clone().into(),
                    Some(Expr::Pref(p)) => p.clone(),
                    None => return Err(resolution(npos, format!("`{name}` is not declared"))),
                };
                file.optimize = Some((name, p));
            }
            other => {
                return Err(SyntaxError::new(
                    kpos,
                    format!("expected `desire`, `pref` or `optimize`, found `{other}`"),
                )
                .into())
            }
        }
    }
    Ok(file)
}

/// Parses a single preference expression (no declarations).
pub fn parse_pref_expr(theory: &ActionTheory, text: &str) -> Result<GeneralPreference, PrefError> {
    let mut cur = Cursor::new(text)?;
    let raw = pref_chain(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.unexpected("end of input").into());
    }
    let r = Resolver {
        theory,
        names: HashMap::new(),
    };
    Ok(r.pref(&raw)?.normalize())
}

/// Parses a single desire expression.
pub fn parse_desire(theory: &ActionTheory, text: &str) -> Result<Desire, PrefError> {
    let mut cur = Cursor::new(text)?;
    let raw = pref_chain(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.unexpected("end of input").into());
    }
    let r = Resolver {
        theory,
        names: HashMap::new(),
    };
    Ok(r.desire(&raw)?.normalize())
}
