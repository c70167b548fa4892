//! Reader and grounder for schematic domain files.
//!
//! ```text
//! sort location = {home, school}.
//! fluent at(location), has_money.
//! action walk(location, location).
//! walk(L1,L2) causes at(L2) if at(L1), L1 != L2.
//! caused -at(L2) if at(L1), L1 != L2.
//! walk(L1,L2) executable_if at(L1), L1 != L2.
//! initially at(home).
//! goal at(school).
//! ```

use std::collections::{BTreeMap, HashMap};

use super::{ActionTheory, Atom, FluentFormula, Literal, Result, TheoryError};
use crate::syntax::{Cursor, Pos, SyntaxError, Tok};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Const(String),
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaAtom {
    pub name: String,
    pub args: Vec<Term>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaLiteral {
    pub atom: SchemaAtom,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BodyItem {
    Lit(SchemaLiteral),
    Neq(Term, Term),
    Eq(Term, Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaLaw {
    Dynamic {
        action: SchemaAtom,
        effect: SchemaLiteral,
        body: Vec<BodyItem>,
    },
    Static {
        head: SchemaLiteral,
        body: Vec<BodyItem>,
    },
    Exec {
        action: SchemaAtom,
        body: Vec<BodyItem>,
    },
    Initially {
        lit: SchemaLiteral,
        body: Vec<BodyItem>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub sorts: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaFormula {
    True,
    False,
    Lit(SchemaLiteral),
    And(Vec<SchemaFormula>),
    Or(Vec<SchemaFormula>),
    Not(Box<SchemaFormula>),
}

/// A parsed, not yet instantiated, domain file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    pub sorts: Vec<(String, Vec<String>, Pos)>,
    pub fluents: Vec<Signature>,
    pub actions: Vec<Signature>,
    pub laws: Vec<SchemaLaw>,
    pub goal: Option<(SchemaFormula, Pos)>,
}

/// Parses and grounds a domain file.
pub fn load_domain(text: &str) -> Result<ActionTheory> {
    ground(&parse_domain(text)?)
}

pub fn parse_domain(text: &str) -> Result<Schema> {
    let mut cur = Cursor::new(text)?;
    let mut schema = Schema::default();
    while !cur.at_eof() {
        statement(&mut cur, &mut schema)?;
    }
    Ok(schema)
}

fn statement(cur: &mut Cursor, schema: &mut Schema) -> std::result::Result<(), SyntaxError> {
    let pos = cur.pos();
    match cur.peek_ident() {
        Some("sort") => {
            cur.next();
            let (name, _) = cur.ident()?;
            cur.expect(&Tok::Eq)?;
            cur.expect(&Tok::LBrace)?;
            let mut consts = Vec::new();
            if !cur.eat(&Tok::RBrace) {
                loop {
                    if let (Tok::Int(lo), Tok::DotDot) =
                        (cur.peek().clone(), cur.peek_at(1).clone())
                    {
                        cur.next();
                        cur.next();
                        let hi = match cur.next().tok {
                            Tok::Int(h) => h,
                            _ => {
                                return Err(SyntaxError::new(
                                    cur.pos(),
                                    "expected integer range bound",
                                ))
                            }
                        };
                        consts.extend((lo..=hi).map(|v| v.to_string()));
                    } else {
                        consts.push(crate::syntax::constant(cur)?);
                    }
                    if !cur.eat(&Tok::Comma) {
                        break;
                    }
                }
                cur.expect(&Tok::RBrace)?;
            }
            schema.sorts.push((name, consts, pos));
        }
        Some(kw @ ("fluent" | "action")) => {
            let is_fluent = kw == "fluent";
            cur.next();
            loop {
                let (name, p) = cur.ident()?;
                let mut sorts = Vec::new();
                if cur.eat(&Tok::LParen) {
                    loop {
                        sorts.push(cur.ident()?.0);
                        if !cur.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    cur.expect(&Tok::RParen)?;
                }
                let sig = Signature {
                    name,
                    sorts,
                    pos: p,
                };
                if is_fluent {
                    schema.fluents.push(sig);
                } else {
                    schema.actions.push(sig);
                }
                if !cur.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        Some("caused") => {
            cur.next();
            let head = literal(cur)?;
            let body = opt_body(cur)?;
            schema.laws.push(SchemaLaw::Static { head, body });
        }
        Some("initially") => {
            cur.next();
            let mut lits = vec![literal(cur)?];
            while cur.eat(&Tok::Comma) {
                lits.push(literal(cur)?);
            }
            let body = opt_body(cur)?;
            for lit in lits {
                schema.laws.push(SchemaLaw::Initially {
                    lit,
                    body: body.clone(),
                });
            }
        }
        Some("goal") => {
            cur.next();
            let f = formula(cur)?;
            if schema.goal.is_some() {
                return Err(SyntaxError::new(pos, "goal given twice"));
            }
            schema.goal = Some((f, pos));
        }
        Some(_) => {
            let action = atom(cur)?;
            match cur.peek_ident() {
                Some("causes") => {
                    cur.next();
                    let effect = literal(cur)?;
                    let body = opt_body(cur)?;
                    schema.laws.push(SchemaLaw::Dynamic {
                        action,
                        effect,
                        body,
                    });
                }
                Some("executable_if") => {
                    cur.next();
                    let body = body(cur)?;
                    schema.laws.push(SchemaLaw::Exec { action, body });
                }
                _ => return Err(cur.unexpected("`causes` or `executable_if`")),
            }
        }
        None => return Err(cur.unexpected("a statement")),
    }
    cur.expect(&Tok::Dot)?;
    Ok(())
}

fn term(cur: &mut Cursor) -> std::result::Result<Term, SyntaxError> {
    match cur.peek().clone() {
        Tok::Var(v) => {
            cur.next();
            Ok(Term::Var(v))
        }
        _ => Ok(Term::Const(crate::syntax::constant(cur)?)),
    }
}

fn atom(cur: &mut Cursor) -> std::result::Result<SchemaAtom, SyntaxError> {
    let (name, pos) = cur.ident()?;
    let mut args = Vec::new();
    if cur.eat(&Tok::LParen) {
        loop {
            args.push(term(cur)?);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
        cur.expect(&Tok::RParen)?;
    }
    Ok(SchemaAtom { name, args, pos })
}

fn literal(cur: &mut Cursor) -> std::result::Result<SchemaLiteral, SyntaxError> {
    let positive = !cur.eat(&Tok::Minus);
    Ok(SchemaLiteral {
        atom: atom(cur)?,
        positive,
    })
}

fn opt_body(cur: &mut Cursor) -> std::result::Result<Vec<BodyItem>, SyntaxError> {
    if cur.peek_ident() == Some("if") {
        cur.next();
        body(cur)
    } else {
        Ok(Vec::new())
    }
}

fn body(cur: &mut Cursor) -> std::result::Result<Vec<BodyItem>, SyntaxError> {
    if cur.peek_ident() == Some("true") && matches!(cur.peek_at(1), Tok::Dot) {
        cur.next();
        return Ok(Vec::new());
    }
    let mut items = Vec::new();
    loop {
        let is_constraint = matches!(cur.peek(), Tok::Var(_) | Tok::Int(_))
            || matches!(cur.peek_at(1), Tok::Eq | Tok::Neq);
        if is_constraint {
            let lhs = term(cur)?;
            let item = match cur.next().tok {
                Tok::Neq => BodyItem::Neq(lhs, term(cur)?),
                Tok::Eq => BodyItem::Eq(lhs, term(cur)?),
                _ => return Err(SyntaxError::new(cur.pos(), "expected `=` or `!=`")),
            };
            items.push(item);
        } else {
            items.push(BodyItem::Lit(literal(cur)?));
        }
        if !cur.eat(&Tok::Comma) {
            return Ok(items);
        }
    }
}

fn formula(cur: &mut Cursor) -> std::result::Result<SchemaFormula, SyntaxError> {
    let mut parts = vec![conjunction(cur)?];
    while cur.eat(&Tok::Bar) || cur.eat(&Tok::BarBar) {
        parts.push(conjunction(cur)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        SchemaFormula::Or(parts)
    })
}

fn conjunction(cur: &mut Cursor) -> std::result::Result<SchemaFormula, SyntaxError> {
    let mut parts = vec![unary(cur)?];
    while cur.eat(&Tok::Amp) || cur.eat(&Tok::AmpAmp) || cur.eat(&Tok::Comma) {
        parts.push(unary(cur)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        SchemaFormula::And(parts)
    })
}

fn unary(cur: &mut Cursor) -> std::result::Result<SchemaFormula, SyntaxError> {
    if cur.eat(&Tok::Bang) {
        return Ok(SchemaFormula::Not(Box::new(unary(cur)?)));
    }
    if cur.eat(&Tok::LParen) {
        let f = formula(cur)?;
        cur.expect(&Tok::RParen)?;
        return Ok(f);
    }
    match cur.peek_ident() {
        Some("not") => {
            cur.next();
            Ok(SchemaFormula::Not(Box::new(unary(cur)?)))
        }
        Some("true") => {
            cur.next();
            Ok(SchemaFormula::True)
        }
        Some("false") => {
            cur.next();
            Ok(SchemaFormula::False)
        }
        _ => Ok(SchemaFormula::Lit(literal(cur)?)),
    }
}

// ------------------------------------------------------------------
// grounding

struct Grounder<'a> {
    sorts: HashMap<&'a str, &'a [String]>,
    fluent_sigs: HashMap<&'a str, &'a Signature>,
    action_sigs: HashMap<&'a str, &'a Signature>,
}

type Binding = BTreeMap<String, String>;

impl<'a> Grounder<'a> {
    fn sort(&self, name: &str, pos: Pos) -> Result<&'a [String]> {
        match self.sorts.get(name) {
            Some(c) if !c.is_empty() => Ok(c),
            _ => Err(TheoryError::EmptySort {
                sort: name.to_string(),
                pos,
            }),
        }
    }

    /// Records the sort of every variable in `atom` into `vars`.
    fn type_atom(
        &self,
        atom: &SchemaAtom,
        is_action: bool,
        vars: &mut Vec<(String, String)>,
    ) -> Result<()> {
        let sig = if is_action {
            self.action_sigs.get(atom.name.as_str())
        } else {
            self.fluent_sigs.get(atom.name.as_str())
        };
        let Some(sig) = sig else {
            let shown = atom.name.clone();
            return Err(if is_action {
                TheoryError::UnknownAction(shown)
            } else {
                TheoryError::UnknownFluent(shown)
            });
        };
        if sig.sorts.len() != atom.args.len() {
            return Err(TheoryError::Schema {
                pos: atom.pos,
                message: format!(
                    "`{}` takes {} argument(s), {} given",
                    atom.name,
                    sig.sorts.len(),
                    atom.args.len()
                ),
            });
        }
        for (arg, sort) in atom.args.iter().zip(&sig.sorts) {
            let consts = self.sort(sort, sig.pos)?;
            match arg {
                Term::Var(v) => match vars.iter().find(|(n, _)| n == v) {
                    Some((_, s)) if s != sort => {
                        return Err(TheoryError::Schema {
                            pos: atom.pos,
                            message: format!("variable `{v}` used with sorts `{s}` and `{sort}`"),
                        })
                    }
                    Some(_) => {}
                    None => vars.push((v.clone(), sort.clone())),
                },
                Term::Const(c) => {
                    if !consts.contains(c) {
                        return Err(TheoryError::Schema {
                            pos: atom.pos,
                            message: format!("`{c}` is not a member of sort `{sort}`"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn instantiate(&self, atom: &SchemaAtom, b: &Binding) -> Atom {
        Atom {
            name: atom.name.clone(),
            args: atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => c.clone(),
                    Term::Var(v) => b[v].clone(),
                })
                .collect(),
        }
    }
}

fn term_value<'b>(t: &'b Term, b: &'b Binding) -> &'b str {
    match t {
        Term::Const(c) => c,
        Term::Var(v) => &b[v],
    }
}

fn check_constraint_vars(body: &[BodyItem], vars: &[(String, String)], pos: Pos) -> Result<()> {
    for item in body {
        if let BodyItem::Neq(x, y) | BodyItem::Eq(x, y) = item {
            for t in [x, y] {
                if let Term::Var(v) = t {
                    if !vars.iter().any(|(n, _)| n == v) {
                        return Err(TheoryError::UnboundVariable {
                            var: v.clone(),
                            pos,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

fn bindings(
    g: &Grounder,
    vars: &[(String, String)],
    body: &[BodyItem],
    pos: Pos,
) -> Result<Vec<Binding>> {
    let mut out = vec![Binding::new()];
    for (v, sort) in vars {
        let consts = g.sort(sort, pos)?;
        let mut next = Vec::with_capacity(out.len() * consts.len());
        for b in &out {
            for c in consts {
                let mut nb = b.clone();
                nb.insert(v.clone(), c.clone());
                next.push(nb);
            }
        }
        out = next;
    }
    out.retain(|b| {
        body.iter().all(|item| match item {
            BodyItem::Neq(x, y) => term_value(x, b) != term_value(y, b),
            BodyItem::Eq(x, y) => term_value(x, b) == term_value(y, b),
            BodyItem::Lit(_) => true,
        })
    });
    Ok(out)
}

fn cartesian(g: &Grounder, sig: &Signature) -> Result<Vec<Vec<String>>> {
    let mut out = vec![Vec::new()];
    for sort in &sig.sorts {
        let consts = g.sort(sort, sig.pos)?;
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<String>| {
                consts.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    p
                })
            })
            .collect();
    }
    Ok(out)
}

/// Instantiates every schema over its sorts. Ground atoms are numbered in
/// declaration order, arguments varying fastest on the right.
pub fn ground(schema: &Schema) -> Result<ActionTheory> {
    let mut g = Grounder {
        sorts: HashMap::new(),
        fluent_sigs: HashMap::new(),
        action_sigs: HashMap::new(),
    };
    for (name, consts, pos) in &schema.sorts {
        if g.sorts.insert(name, consts).is_some() {
            return Err(TheoryError::Schema {
                pos: *pos,
                message: format!("sort `{name}` declared twice"),
            });
        }
    }
    let mut theory = ActionTheory::new();
    for sig in &schema.fluents {
        if g.fluent_sigs.insert(&sig.name, sig).is_some() {
            return Err(TheoryError::Duplicate(sig.name.clone()));
        }
        for args in cartesian(&g, sig)? {
            theory.add_fluent(Atom {
                name: sig.name.clone(),
                args,
            })?;
        }
    }
    for sig in &schema.actions {
        if g.action_sigs.insert(&sig.name, sig).is_some()
            || g.fluent_sigs.contains_key(sig.name.as_str())
        {
            return Err(TheoryError::Duplicate(sig.name.clone()));
        }
        for args in cartesian(&g, sig)? {
            theory.add_action(Atom {
                name: sig.name.clone(),
                args,
            })?;
        }
    }
    let lit = |g: &Grounder, t: &ActionTheory, l: &SchemaLiteral, b: &Binding| -> Result<Literal> {
        let atom = g.instantiate(&l.atom, b);
        let f = t
            .fluent_id(&atom)
            .ok_or_else(|| TheoryError::UnknownFluent(atom.to_string()))?;
        Ok(Literal {
            fluent: f,
            positive: l.positive,
        })
    };
    let body_lits =
        |g: &Grounder, t: &ActionTheory, body: &[BodyItem], b: &Binding| -> Result<Vec<Literal>> {
            let mut out: Vec<Literal> = Vec::new();
            for item in body {
                if let BodyItem::Lit(l) = item {
                    let l = lit(g, t, l, b)?;
                    if !out.contains(&l) {
                        out.push(l);
                    }
                }
            }
            Ok(out)
        };
    for law in &schema.laws {
        let mut vars = Vec::new();
        let (body, pos) = match law {
            SchemaLaw::Dynamic {
                action,
                effect,
                body,
            } => {
                g.type_atom(action, true, &mut vars)?;
                g.type_atom(&effect.atom, false, &mut vars)?;
                (body, action.pos)
            }
            SchemaLaw::Static { head, body } => {
                g.type_atom(&head.atom, false, &mut vars)?;
                (body, head.atom.pos)
            }
            SchemaLaw::Exec { action, body } => {
                g.type_atom(action, true, &mut vars)?;
                (body, action.pos)
            }
            SchemaLaw::Initially { lit, body } => {
                g.type_atom(&lit.atom, false, &mut vars)?;
                (body, lit.atom.pos)
            }
        };
        for item in body {
            if let BodyItem::Lit(l) = item {
                g.type_atom(&l.atom, false, &mut vars)?;
            }
        }
        check_constraint_vars(body, &vars, pos)?;
        if matches!(law, SchemaLaw::Initially { .. })
            && body.iter().any(|i| matches!(i, BodyItem::Lit(_)))
        {
            return Err(TheoryError::Schema {
                pos,
                message: "`initially` accepts only (in)equality conditions".into(),
            });
        }
        for b in bindings(&g, &vars, body, pos)? {
            match law {
                SchemaLaw::Dynamic {
                    action,
                    effect,
                    body,
                } => {
                    let a = theory
                        .action_id(&g.instantiate(action, &b))
                        .expect("grounded action");
                    let e = lit(&g, &theory, effect, &b)?;
                    let pre = body_lits(&g, &theory, body, &b)?;
                    theory.add_dynamic(a, e, pre)?;
                }
                SchemaLaw::Static { head, body } => {
                    let h = lit(&g, &theory, head, &b)?;
                    let pre = body_lits(&g, &theory, body, &b)?;
                    theory.add_static(h, pre)?;
                }
                SchemaLaw::Exec { action, body } => {
                    let a = theory
                        .action_id(&g.instantiate(action, &b))
                        .expect("grounded action");
                    let pre = body_lits(&g, &theory, body, &b)?;
                    theory.add_exec(a, pre)?;
                }
                SchemaLaw::Initially { lit: l, .. } => {
                    let l = lit(&g, &theory, l, &b)?;
                    theory.add_initial(l)?;
                }
            }
        }
    }
    if let Some((f, pos)) = &schema.goal {
        let goal = ground_formula(&g, &theory, f, *pos)?;
        theory.set_goal(goal)?;
    }
    Ok(theory)
}

fn ground_formula(
    g: &Grounder,
    t: &ActionTheory,
    f: &SchemaFormula,
    pos: Pos,
) -> Result<FluentFormula> {
    Ok(match f {
        SchemaFormula::True => FluentFormula::True,
        SchemaFormula::False => FluentFormula::False,
        SchemaFormula::Lit(l) => {
            if let Some(Term::Var(v)) = l.atom.args.iter().find(|a| matches!(a, Term::Var(_))) {
                return Err(TheoryError::UnboundVariable {
                    var: v.clone(),
                    pos,
                });
            }
            let atom = g.instantiate(&l.atom, &Binding::new());
            let fl = t
                .fluent_id(&atom)
                .ok_or_else(|| TheoryError::UnknownFluent(atom.to_string()))?;
            FluentFormula::Lit(Literal {
                fluent: fl,
                positive: l.positive,
            })
        }
        SchemaFormula::And(xs) => FluentFormula::And(
            xs.iter()
                .map(|x| ground_formula(g, t, x, pos))
                .collect::<Result<_>>()?,
        ),
        SchemaFormula::Or(xs) => FluentFormula::Or(
            xs.iter()
                .map(|x| ground_formula(g, t, x, pos))
                .collect::<Result<_>>()?,
        ),
        SchemaFormula::Not(x) => FluentFormula::Not(Box::new(ground_formula(g, t, x, pos)?)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WALK: &str = "
        sort location = {home, school}.
        fluent at(location).
        action walk(location, location).
        walk(L1,L2) causes at(L2) if at(L1).
        walk(L1,L2) executable_if at(L1).
        initially at(home).
    ";

    #[test]
    fn cartesian_expansion() {
        let t = load_domain(WALK).unwrap();
        assert_eq!(t.actions().len(), 4);
        assert_eq!(t.dynamic_laws().len(), 4);
        let with_constraint = WALK.replace("if at(L1).", "if at(L1), L1 != L2.");
        let t = load_domain(&with_constraint).unwrap();
        assert_eq!(t.dynamic_laws().len(), 2);
    }

    #[test]
    fn no_variables_is_identity() {
        let t = load_domain(
            "fluent p, q. action a. a causes p if q. a executable_if true. initially q.",
        )
        .unwrap();
        assert_eq!(t.dynamic_laws().len(), 1);
        assert_eq!(t.exec_conditions()[0].body, vec![]);
        assert_eq!(t.initial(), &[t.literal("q").unwrap()]);
    }

    #[test]
    fn undeclared_sort() {
        let err = load_domain("fluent at(place).").unwrap_err();
        assert!(
            matches!(err, TheoryError::EmptySort { ref sort, .. } if sort == "place"),
            "{err}"
        );
        let err = load_domain("sort s = {}. fluent f(s).").unwrap_err();
        assert!(matches!(err, TheoryError::EmptySort { .. }));
    }

    #[test]
    fn unbound_variable_in_constraint() {
        let err = load_domain("sort s = {a, b}. fluent f(s). caused f(X) if X != Y.").unwrap_err();
        assert!(
            matches!(err, TheoryError::UnboundVariable { ref var, .. } if var == "Y"),
            "{err}"
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = load_domain("fluent p.\nfluent q(\n").unwrap_err();
        match err {
            TheoryError::Syntax(e) => assert_eq!(e.pos.line, 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn goal_and_ranges() {
        let t = load_domain("sort n = {0..3}. fluent c(n), p. goal c(2) & !p.").unwrap();
        assert_eq!(t.fluents().len(), 5);
        assert_eq!(t.formula_to_string(&t.goal()), "(c(2) & !p)");
    }
}
