use std::collections::{BTreeSet, HashSet};

use super::{AspError, AspProgram, GAtom, Maximize, Rule};
use crate::planner::Trajectory;
use crate::pp::{desire_to_string, preference_to_string, Desire, GeneralPreference};
use crate::theory::{ActionId, ActionTheory, FluentFormula, FluentId, Literal};

/// Guard on the number of ground weight rules emitted for one preference node.
pub const MAX_RULES_PER_NODE: usize = 65536;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    pub length: usize,
    pub post_goal_actions: bool,
}

impl EncodeOptions {
    pub fn new(length: usize) -> Self {
        EncodeOptions {
            length,
            post_goal_actions: true,
        }
    }
}

/// `f` or `neg(f)`.
pub fn literal_constant(theory: &ActionTheory, l: Literal) -> String {
    let f = theory.fluent(l.fluent);
    if l.positive {
        f.to_string()
    } else {
        format!("neg({f})")
    }
}

pub fn action_constant(theory: &ActionTheory, a: ActionId) -> String {
    theory.action(a).to_string()
}

fn atom(pred: &str, args: &[&str]) -> GAtom {
    GAtom::new(pred, args.iter().copied())
}

fn t_(t: usize) -> String {
    t.to_string()
}

#[derive(Debug, Clone)]
enum Node {
    Lit,
    Occ(String),
    Goal(String),
    And(String, String),
    Or(String, String),
    Neg(String),
    Next(String),
    Until(String, String),
    Always(String),
    Eventually(String),
}

struct Encoder<'a> {
    theory: &'a ActionTheory,
    desires: usize,
    prefs: usize,
    out: AspProgram,
    seen: HashSet<GAtom>,
    nodes: Vec<(String, Node)>,
    /// Children of until/always, the only desires `during` is needed for.
    during: Vec<String>,
}

impl<'a> Encoder<'a> {
    fn new(theory: &'a ActionTheory) -> Self {
        Encoder {
            theory,
            desires: 0,
            prefs: 0,
            out: AspProgram::default(),
            seen: HashSet::new(),
            nodes: Vec::new(),
            during: Vec::new(),
        }
    }

    fn fact(&mut self, a: GAtom) {
        if self.seen.insert(a.clone()) {
            self.out.facts.push(a);
        }
    }

    fn fresh_desire(&mut self, what: String) -> String {
        self.desires += 1;
        let n = format!("n_d{}", self.desires);
        self.out.name_table.push((n.clone(), what));
        self.fact(atom("desire", &[&n]));
        n
    }

    fn node(&mut self, n: &str, node: Node) {
        self.nodes.push((n.to_string(), node));
    }

    fn mark_during(&mut self, n: &str) {
        if !self.during.iter().any(|d| d == n) {
            self.during.push(n.to_string());
        }
    }

    fn literal(&mut self, l: Literal) -> String {
        let n = literal_constant(self.theory, l);
        let d = atom("desire", &[&n]);
        if !self.seen.contains(&d) {
            self.fact(d);
            self.fact(atom("literal", &[&n]));
            self.node(&n, Node::Lit);
        }
        n
    }

    fn formula(&mut self, f: &FluentFormula) -> Result<String, AspError> {
        let text = || desire_to_string(self.theory, &Desire::Formula(f.clone()));
        match f {
            FluentFormula::Lit(l) => Ok(self.literal(*l)),
            FluentFormula::True => {
                if self.theory.num_fluents() == 0 {
                    return Err(AspError::NoFluents);
                }
                let n = self.fresh_desire("true".into());
                let p = Literal::pos(FluentId(0));
                let (a, b) = (self.literal(p), self.literal(p.complement()));
                self.fact(atom("or", &[&n, &a, &b]));
                self.node(&n, Node::Or(a, b));
                Ok(n)
            }
            FluentFormula::False => {
                let n = self.fresh_desire("false".into());
                let c = self.formula(&FluentFormula::True)?;
                self.fact(atom("negation", &[&n, &c]));
                self.node(&n, Node::Neg(c));
                Ok(n)
            }
            FluentFormula::And(xs) | FluentFormula::Or(xs) => {
                let conj = matches!(f, FluentFormula::And(_));
                match xs.as_slice() {
                    [] => self.formula(if conj {
                        &FluentFormula::True
                    } else {
                        &FluentFormula::False
                    }),
                    [x] => self.formula(x),
                    [x, rest @ ..] => {
                        let n = self.fresh_desire(text());
                        let a = self.formula(x)?;
                        let rest = if conj {
                            FluentFormula::And(rest.to_vec())
                        } else {
                            FluentFormula::Or(rest.to_vec())
                        };
                        let b = self.formula(&rest)?;
                        let pred = if conj { "and" } else { "or" };
                        self.fact(atom(pred, &[&n, &a, &b]));
                        self.node(
                            &n,
                            if conj {
                                Node::And(a, b)
                            } else {
                                Node::Or(a, b)
                            },
                        );
                        Ok(n)
                    }
                }
            }
            FluentFormula::Not(x) => {
                let n = self.fresh_desire(text());
                let c = self.formula(x)?;
                self.fact(atom("negation", &[&n, &c]));
                self.node(&n, Node::Neg(c));
                Ok(n)
            }
        }
    }

    fn desire(&mut self, d: &Desire) -> Result<String, AspError> {
        if let Desire::Formula(f) = d {
            return self.formula(f);
        }
        let n = self.fresh_desire(desire_to_string(self.theory, d));
        match d {
            Desire::Formula(_) => unreachable!(),
            Desire::Occ(a) => {
                let a = action_constant(self.theory, *a);
                self.fact(atom("happen", &[&n, &a]));
                self.node(&n, Node::Occ(a));
            }
            Desire::Goal(f) => {
                let c = self.formula(f)?;
                self.fact(atom("goal", &[&n, &c]));
                self.node(&n, Node::Goal(c));
            }
            Desire::And(x, y) | Desire::Or(x, y) | Desire::Until(x, y) => {
                let a = self.desire(x)?;
                let b = self.desire(y)?;
                let (pred, node) = match d {
                    Desire::And(..) => ("and", Node::And(a.clone(), b.clone())),
                    Desire::Or(..) => ("or", Node::Or(a.clone(), b.clone())),
                    _ => {
                        self.mark_during(&a);
                        ("until", Node::Until(a.clone(), b.clone()))
                    }
                };
                self.fact(atom(pred, &[&n, &a, &b]));
                self.node(&n, node);
            }
            Desire::Not(x) | Desire::Next(x) | Desire::Always(x) | Desire::Eventually(x) => {
                let c = self.desire(x)?;
                let (pred, node) = match d {
                    Desire::Not(_) => ("negation", Node::Neg(c.clone())),
                    Desire::Next(_) => ("next", Node::Next(c.clone())),
                    Desire::Always(_) => {
                        self.mark_during(&c);
                        ("always", Node::Always(c.clone()))
                    }
                    _ => ("eventually", Node::Eventually(c.clone())),
                };
                self.fact(atom(pred, &[&n, &c]));
                self.node(&n, node);
            }
        }
        Ok(n)
    }

    /// Satisfaction rules instantiated over time points `0..=length`.
    fn sat_rules(&mut self, length: usize) {
        let len = t_(length);
        let mut rules = Vec::new();
        for (n, node) in &self.nodes {
            let desire = atom("desire", &[n]);
            let sat = |x: &str, t: usize| atom("satisfy", &[x, &t_(t)]);
            let during = |x: &str, t: usize, t1: usize| atom("during", &[x, &t_(t), &t_(t1)]);
            for t in 0..=length {
                let head = sat(n, t);
                let with = |mut pos: Vec<GAtom>, neg: Vec<GAtom>| {
                    pos.insert(0, desire.clone());
                    Rule::new(head.clone(), pos, neg)
                };
                match node {
                    Node::Lit => {
                        rules.push(with(
                            vec![atom("literal", &[n]), atom("holds", &[n, &t_(t)])],
                            vec![],
                        ));
                    }
                    Node::Occ(a) => {
                        if t < length {
                            rules.push(with(
                                vec![atom("happen", &[n, a]), atom("occ", &[a, &t_(t)])],
                                vec![],
                            ));
                        }
                    }
                    Node::Goal(c) => {
                        rules.push(with(
                            vec![atom("goal", &[n, c]), atom("satisfy", &[c, &len])],
                            vec![],
                        ));
                    }
                    Node::And(a, b) => {
                        rules.push(with(
                            vec![atom("and", &[n, a, b]), sat(a, t), sat(b, t)],
                            vec![],
                        ));
                    }
                    Node::Or(a, b) => {
                        rules.push(with(vec![atom("or", &[n, a, b]), sat(a, t)], vec![]));
                        rules.push(with(vec![atom("or", &[n, a, b]), sat(b, t)], vec![]));
                    }
                    Node::Neg(a) => {
                        rules.push(with(vec![atom("negation", &[n, a])], vec![sat(a, t)]));
                    }
                    Node::Until(a, b) => {
                        for t1 in t + 1..=length {
                            rules.push(with(
                                vec![atom("until", &[n, a, b]), during(a, t, t1 - 1), sat(b, t1)],
                                vec![],
                            ));
                        }
                        rules.push(with(vec![atom("until", &[n, a, b]), sat(b, t)], vec![]));
                    }
                    Node::Always(a) => {
                        rules.push(with(
                            vec![atom("always", &[n, a]), during(a, t, length)],
                            vec![],
                        ));
                    }
                    Node::Next(a) => {
                        // padded steps after the end of a shorter plan have no successor
                        if t < length {
                            rules.push(with(
                                vec![atom("next", &[n, a]), sat(a, t + 1)],
                                vec![atom("idle", &[&t_(t)])],
                            ));
                        }
                    }
                    Node::Eventually(a) => {
                        for t1 in t..=length {
                            rules.push(with(vec![atom("eventually", &[n, a]), sat(a, t1)], vec![]));
                        }
                    }
                }
            }
        }
        for f in &self.during {
            let desire = atom("desire", &[f]);
            for t in 0..=length {
                for t1 in t + 1..=length {
                    rules.push(Rule::new(
                        atom("during", &[f, &t_(t), &t_(t1)]),
                        vec![
                            desire.clone(),
                            atom("satisfy", &[f, &t_(t)]),
                            atom("during", &[f, &t_(t + 1), &t_(t1)]),
                        ],
                        vec![],
                    ));
                }
                rules.push(Rule::new(
                    atom("during", &[f, &t_(t), &t_(t)]),
                    vec![desire.clone(), atom("satisfy", &[f, &t_(t)])],
                    vec![],
                ));
            }
        }
        self.out.rules.extend(rules);
    }

    /// Weight rules for the right-folded preference. Returns the node name,
    /// its reachable weights and its bound.
    fn pref(&mut self, p: &GeneralPreference) -> Result<(String, BTreeSet<u64>, u64), AspError> {
        self.prefs += 1;
        let n = format!("n_p{}", self.prefs);
        self.out
            .name_table
            .push((n.clone(), preference_to_string(self.theory, p)));
        self.fact(atom("preference", &[&n]));
        let too_large = |size: usize| -> Result<(), AspError> {
            if size > MAX_RULES_PER_NODE {
                Err(AspError::TooLarge {
                    node: n.clone(),
                    max: MAX_RULES_PER_NODE,
                })
            } else {
                Ok(())
            }
        };
        let overflow = || AspError::ArithmeticOverflow { node: n.clone() };
        let w = |x: &str, v: u64| atom("w", &[x, &v.to_string()]);
        let mx = |x: &str, v: u64| atom("max", &[x, &v.to_string()]);
        match p {
            GeneralPreference::Atomic(a) => {
                let k = a.chain.len();
                if k >= 64 {
                    return Err(overflow());
                }
                too_large(1usize.checked_shl(k as u32).unwrap_or(usize::MAX))?;
                let mut names = Vec::new();
                for (r, d) in a.chain.iter().enumerate() {
                    let dn = self.desire(d)?;
                    self.fact(atom("patomic", &[&n, &(r + 1).to_string(), &dn]));
                    names.push(dn);
                }
                for dn in &names {
                    let s0 = atom("satisfy", &[dn, "0"]);
                    self.out
                        .rules
                        .push(Rule::new(w(dn, 1), vec![s0.clone()], vec![]));
                    self.out.rules.push(Rule::new(w(dn, 0), vec![], vec![s0]));
                    self.fact(mx(dn, 2));
                }
                let top = 1u64 << k;
                for mask in 0..top {
                    let body = names
                        .iter()
                        .enumerate()
                        .map(|(r, dn)| w(dn, (mask >> (k - 1 - r)) & 1))
                        .collect();
                    self.out.rules.push(Rule::new(w(&n, mask), body, vec![]));
                }
                self.fact(mx(&n, top));
                Ok((n, (0..top).collect(), top))
            }
            GeneralPreference::Conj(..)
            | GeneralPreference::Disj(..)
            | GeneralPreference::Chain(_) => {
                let (x, y) = match p {
                    GeneralPreference::Chain(xs) => match xs.as_slice() {
                        [x, y] => (x, y),
                        _ => unreachable!("chains are right-folded to two elements"),
                    },
                    GeneralPreference::Conj(x, y) | GeneralPreference::Disj(x, y) => (&**x, &**y),
                    _ => unreachable!(),
                };
                let (a, va, ma) = self.pref(x)?;
                let (b, vb, mb) = self.pref(y)?;
                too_large(va.len().saturating_mul(vb.len()))?;
                let chain = matches!(p, GeneralPreference::Chain(_));
                let pred = match p {
                    GeneralPreference::Conj(..) => "pand",
                    GeneralPreference::Disj(..) => "por",
                    _ => "pchain",
                };
                self.fact(atom(pred, &[&n, &a, &b]));
                let mut vals = BTreeSet::new();
                for &u in &va {
                    for &v in &vb {
                        let s = if chain {
                            mb.checked_mul(u).and_then(|s| s.checked_add(v))
                        } else {
                            u.checked_add(v)
                        };
                        let s = s.ok_or_else(overflow)?;
                        let mut body = vec![w(&a, u), w(&b, v)];
                        if chain {
                            body.push(mx(&b, mb));
                        }
                        self.out.rules.push(Rule::new(w(&n, s), body, vec![]));
                        vals.insert(s);
                    }
                }
                let m = if chain {
                    mb.checked_mul(ma).and_then(|s| s.checked_add(mb))
                } else {
                    ma.checked_add(mb)
                };
                let m = m.ok_or_else(overflow)?;
                self.out
                    .rules
                    .push(Rule::new(mx(&n, m), vec![mx(&a, ma), mx(&b, mb)], vec![]));
                Ok((n, vals, m))
            }
            GeneralPreference::Neg(x) => {
                let (a, va, ma) = self.pref(x)?;
                self.fact(atom("pneg", &[&n, &a]));
                let mut vals = BTreeSet::new();
                for &u in &va {
                    let s = ma - 1 - u;
                    self.out
                        .rules
                        .push(Rule::new(w(&n, s), vec![w(&a, u), mx(&a, ma)], vec![]));
                    vals.insert(s);
                }
                self.out
                    .rules
                    .push(Rule::new(mx(&n, ma), vec![mx(&a, ma)], vec![]));
                Ok((n, vals, ma))
            }
        }
    }
}

/// Facts `Π_φ` for one desire; returns the desire's constant name.
pub fn encode_desire(theory: &ActionTheory, d: &Desire) -> Result<(String, AspProgram), AspError> {
    let mut e = Encoder::new(theory);
    let n = e.desire(d)?;
    Ok((n, e.out))
}

/// Desire facts plus satisfaction rules over `0..=length`.
pub fn sat_program(
    theory: &ActionTheory,
    d: &Desire,
    length: usize,
) -> Result<(String, AspProgram), AspError> {
    let mut e = Encoder::new(theory);
    let n = e.desire(d)?;
    e.sat_rules(length);
    Ok((n, e.out))
}

/// `occ(a_i, i-1)` and `holds(l, i)` for every literal of every state.
pub fn trajectory_facts(theory: &ActionTheory, t: &Trajectory) -> Vec<GAtom> {
    let mut out = Vec::new();
    for (i, &a) in t.actions().iter().enumerate() {
        out.push(atom("occ", &[&action_constant(theory, a), &t_(i)]));
    }
    for (i, s) in t.states().iter().enumerate() {
        for l in s.literals() {
            out.push(atom("holds", &[&literal_constant(theory, l), &t_(i)]));
        }
    }
    out
}

/// Answer-set planning program: at most one action per step, shorter plans
/// padded with idle steps, goal checked at the last non-idle step.
pub fn encode_planning(theory: &ActionTheory, opts: EncodeOptions) -> Result<AspProgram, AspError> {
    let n = opts.length;
    let mut p = AspProgram::default();
    let lit = |l: Literal| literal_constant(theory, l);
    let holds = |l: Literal, t: usize| atom("holds", &[&lit(l), &t_(t)]);
    for l in theory.initial_state()?.literals() {
        p.facts.push(holds(l, 0));
    }
    for t in 0..=n {
        for law in theory.static_laws() {
            p.rules.push(Rule::new(
                holds(law.head, t),
                law.body.iter().map(|&b| holds(b, t)).collect(),
                vec![],
            ));
        }
    }
    for t in 0..n {
        for law in theory.dynamic_laws() {
            let mut body = vec![atom("occ", &[&action_constant(theory, law.action), &t_(t)])];
            body.extend(law.preconditions.iter().map(|&l| holds(l, t)));
            p.rules
                .push(Rule::new(holds(law.effect, t + 1), body, vec![]));
        }
        for f in theory.fluent_ids() {
            for l in [Literal::pos(f), Literal::neg(f)] {
                p.rules.push(Rule::new(
                    holds(l, t + 1),
                    vec![holds(l, t)],
                    vec![holds(l.complement(), t + 1)],
                ));
            }
        }
    }
    for t in 0..=n {
        for f in theory.fluent_ids() {
            p.rules.push(Rule::constraint(
                vec![holds(Literal::pos(f), t), holds(Literal::neg(f), t)],
                vec![],
            ));
        }
    }
    let actions: Vec<String> = theory
        .action_ids()
        .map(|a| action_constant(theory, a))
        .collect();
    for t in 0..n {
        for c in theory.exec_conditions() {
            p.rules.push(Rule::new(
                atom("exec", &[&actions[c.action.index()], &t_(t)]),
                c.body.iter().map(|&l| holds(l, t)).collect(),
                vec![],
            ));
        }
        for a in &actions {
            p.rules.push(Rule::choice(
                atom("occ", &[a, &t_(t)]),
                vec![atom("exec", &[a, &t_(t)])],
            ));
        }
        for (i, a) in actions.iter().enumerate() {
            for b in &actions[i + 1..] {
                p.rules.push(Rule::constraint(
                    vec![atom("occ", &[a, &t_(t)]), atom("occ", &[b, &t_(t)])],
                    vec![],
                ));
            }
        }
        p.rules.push(Rule::new(
            atom("idle", &[&t_(t)]),
            vec![],
            actions.iter().map(|a| atom("occ", &[a, &t_(t)])).collect(),
        ));
        if t + 1 < n {
            p.rules.push(Rule::constraint(
                vec![atom("idle", &[&t_(t)])],
                vec![atom("idle", &[&t_(t + 1)])],
            ));
        }
    }
    let end = |t: usize| atom("end", &[&t_(t)]);
    let idle = |t: usize| atom("idle", &[&t_(t)]);
    if n == 0 {
        p.rules.push(Rule::new(end(0), vec![], vec![]));
    } else {
        p.rules.push(Rule::new(end(0), vec![idle(0)], vec![]));
        for t in 1..n {
            p.rules
                .push(Rule::new(end(t), vec![idle(t)], vec![idle(t - 1)]));
        }
        p.rules.push(Rule::new(end(n), vec![], vec![idle(n - 1)]));
    }
    let goal = theory.goal().to_dnf();
    for t in 0..=n {
        for disjunct in &goal {
            p.rules.push(Rule::new(
                atom("goal_holds", &[&t_(t)]),
                disjunct.iter().map(|&l| holds(l, t)).collect(),
                vec![],
            ));
        }
        p.rules.push(Rule::constraint(
            vec![end(t)],
            vec![atom("goal_holds", &[&t_(t)])],
        ));
        if !opts.post_goal_actions && t < n {
            p.rules.push(Rule::constraint(
                vec![atom("goal_holds", &[&t_(t)])],
                vec![idle(t)],
            ));
        }
    }
    Ok(p)
}

/// Desire facts, satisfaction rules, weight rules and the maximize
/// statement for `pref` at horizon `length`, without the planning part.
/// A preference that is a single desire is optimized directly on
/// `satisfy(n,0)`. Returns the root node name.
pub fn pref_program(
    theory: &ActionTheory,
    pref: &GeneralPreference,
    length: usize,
) -> Result<(String, AspProgram), AspError> {
    let mut e = Encoder::new(theory);
    let (root, optimize) = match pref {
        GeneralPreference::Atomic(a) if a.chain.len() == 1 => {
            let n = e.desire(&a.chain[0])?;
            let s = atom("satisfy", &[&n, "0"]);
            let m = Maximize {
                terms: vec![(true, s.clone(), 1), (false, s, 0)],
            };
            (n, m)
        }
        _ => {
            let (n, vals, _) = e.pref(&pref.right_folded())?;
            let m = Maximize {
                terms: vals
                    .into_iter()
                    .map(|v| (true, atom("w", &[&n, &v.to_string()]), v))
                    .collect(),
            };
            (n, m)
        }
    };
    let weight_rules = std::mem::take(&mut e.out.rules);
    e.sat_rules(length);
    e.out.rules.extend(weight_rules);
    e.out.optimize = Some(optimize);
    Ok((root, e.out))
}

/// Planning program plus [`pref_program`].
pub fn encode_problem(
    theory: &ActionTheory,
    pref: &GeneralPreference,
    opts: EncodeOptions,
) -> Result<AspProgram, AspError> {
    let mut program = encode_planning(theory, opts)?;
    let (_, mut desires) = pref_program(theory, pref, opts.length)?;
    // desire facts first, then the planning program, then everything else
    desires.facts.extend(std::mem::take(&mut program.facts));
    desires
        .rules
        .splice(0..0, std::mem::take(&mut program.rules));
    Ok(desires)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pp::parse_desire;
    use crate::theory::domain::load_domain;

    fn theory() -> ActionTheory {
        load_domain("fluent p, q. action a. a causes p. a executable_if -p.").unwrap()
    }

    #[test]
    fn desire_fact_shapes() {
        let t = theory();
        let (n, prog) = encode_desire(&t, &parse_desire(&t, "occ(a)").unwrap()).unwrap();
        let facts: Vec<String> = prog.facts.iter().map(|f| f.to_string()).collect();
        assert_eq!(n, "n_d1");
        assert_eq!(facts, ["desire(n_d1)", "happen(n_d1,a)"]);
        let (n, prog) = encode_desire(&t, &parse_desire(&t, "-p").unwrap()).unwrap();
        assert_eq!(n, "neg(p)");
        assert_eq!(prog.facts[0].to_string(), "desire(neg(p))");
        let (_, prog) = encode_desire(&t, &parse_desire(&t, "goal(q)").unwrap()).unwrap();
        let facts: Vec<String> = prog.facts.iter().map(|f| f.to_string()).collect();
        assert_eq!(
            facts,
            ["desire(n_d1)", "desire(q)", "literal(q)", "goal(n_d1,q)"]
        );
    }

    #[test]
    fn preorder_names() {
        let t = theory();
        let d = parse_desire(&t, "always(next(p) && eventually(occ(a)))").unwrap();
        let (_, prog) = encode_desire(&t, &d).unwrap();
        let names: Vec<&str> = prog.name_table.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["n_d1", "n_d2", "n_d3", "n_d4", "n_d5"]);
        assert!(prog
            .facts
            .iter()
            .any(|f| f.to_string() == "always(n_d1,n_d2)"));
        assert!(prog
            .facts
            .iter()
            .any(|f| f.to_string() == "and(n_d2,n_d3,n_d4)"));
    }

    #[test]
    fn during_only_for_monitored_children() {
        let t = theory();
        let (_, prog) = sat_program(&t, &parse_desire(&t, "eventually(p)").unwrap(), 2).unwrap();
        assert!(!prog
            .rules
            .iter()
            .any(|r| r.to_string().starts_with("during")));
        let (_, prog) = sat_program(&t, &parse_desire(&t, "always(p)").unwrap(), 2).unwrap();
        let text: Vec<String> = prog.rules.iter().map(|r| r.to_string()).collect();
        assert!(text.contains(&"during(p,1,1) :- desire(p), satisfy(p,1).".to_string()));
        assert!(text.contains(
            &"satisfy(n_d1,0) :- desire(n_d1), always(n_d1,p), during(p,0,2).".to_string()
        ));
    }

    #[test]
    fn chain_rule_instances() {
        let t = theory();
        let pref = crate::pp::parse_pref_expr(&t, "!!p <| q").unwrap();
        let prog = encode_problem(&t, &pref, EncodeOptions::new(1)).unwrap();
        let text = prog.to_string();
        assert!(
            text.contains("max(n_p1,6) :- max(n_p2,2), max(n_p4,2)."),
            "{text}"
        );
        assert!(text.contains("w(n_p1,3) :- w(n_p2,1), w(n_p4,1), max(n_p4,2)."));
        assert!(text.contains("maximize [ w(n_p1,0) = 0"));
    }
}
