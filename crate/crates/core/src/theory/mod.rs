//! Action theories of the B family: fluents, actions, causal and
//! executability laws, states, and the transition function.
//!
//! Everything here is ground. Schematic domain files are read and
//! instantiated by [`domain`].

pub mod domain;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Pos, SyntaxError};

/// Largest number of droppable inertial literals tried exhaustively by [`ActionTheory::transition`].
pub const MAX_TRANSITION_CANDIDATES: usize = 22;

/// Largest fluent count accepted by the exhaustive audit.
pub const MAX_AUDIT_FLUENTS: usize = 20;

/// A ground atom: `name` or `name(c1,...,cn)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Atom {
    pub name: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(name: impl Into<String>, args: &[&str]) -> Self {
        Atom {
            name: name.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Atom {
            name: name.into(),
            args: Vec::new(),
        }
    }

    /// Parses `name` or `name(a,b)`.
    pub fn parse(text: &str) -> Result<Atom, SyntaxError> {
        let mut cur = crate::syntax::Cursor::new(text)?;
        let (atom, _) = crate::syntax::ground_atom(&mut cur)?;
        if !cur.at_eof() {
            return Err(cur.unexpected("end of input"));
        }
        Ok(atom)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FluentId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

impl FluentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A fluent or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub fluent: FluentId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(fluent: FluentId) -> Self {
        Literal {
            fluent,
            positive: true,
        }
    }

    pub fn neg(fluent: FluentId) -> Self {
        Literal {
            fluent,
            positive: false,
        }
    }

    pub fn complement(self) -> Self {
        Literal {
            fluent: self.fluent,
            positive: !self.positive,
        }
    }
}

/// Propositional formula over fluent literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FluentFormula {
    True,
    False,
    Lit(Literal),
    And(Vec<FluentFormula>),
    Or(Vec<FluentFormula>),
    Not(Box<FluentFormula>),
}

impl FluentFormula {
    pub fn lit(l: Literal) -> Self {
        FluentFormula::Lit(l)
    }

    /// Conjunction of the given literals; `True` when empty.
    pub fn conj(lits: &[Literal]) -> Self {
        match lits {
            [] => FluentFormula::True,
            [l] => FluentFormula::Lit(*l),
            _ => FluentFormula::And(lits.iter().map(|l| FluentFormula::Lit(*l)).collect()),
        }
    }

    /// Disjunction; `False` when empty.
    pub fn disj(mut parts: Vec<FluentFormula>) -> Self {
        match parts.len() {
            0 => FluentFormula::False,
            1 => parts.pop().unwrap(),
            _ => FluentFormula::Or(parts),
        }
    }

    pub fn holds(&self, s: &State) -> bool {
        match self {
            FluentFormula::True => true,
            FluentFormula::False => false,
            FluentFormula::Lit(l) => s.holds(*l),
            FluentFormula::And(xs) => xs.iter().all(|x| x.holds(s)),
            FluentFormula::Or(xs) => xs.iter().any(|x| x.holds(s)),
            FluentFormula::Not(x) => !x.holds(s),
        }
    }

    pub fn literals(&self) -> Vec<Literal> {
        fn go(f: &FluentFormula, out: &mut Vec<Literal>) {
            match f {
                FluentFormula::True | FluentFormula::False => {}
                FluentFormula::Lit(l) => out.push(*l),
                FluentFormula::And(xs) | FluentFormula::Or(xs) => {
                    xs.iter().for_each(|x| go(x, out))
                }
                FluentFormula::Not(x) => go(x, out),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Disjunctive normal form with contradictory disjuncts dropped.
    pub fn to_dnf(&self) -> Vec<Vec<Literal>> {
        fn go(f: &FluentFormula, negated: bool) -> Vec<Vec<Literal>> {
            match (f, negated) {
                (FluentFormula::True, false) | (FluentFormula::False, true) => vec![vec![]],
                (FluentFormula::True, true) | (FluentFormula::False, false) => vec![],
                (FluentFormula::Lit(l), n) => vec![vec![if n { l.complement() } else { *l }]],
                (FluentFormula::Not(x), n) => go(x, !n),
                (FluentFormula::And(xs), false) | (FluentFormula::Or(xs), true) => {
                    let mut acc: Vec<Vec<Literal>> = vec![vec![]];
                    for x in xs {
                        let part = go(x, negated);
                        let mut next = Vec::new();
                        for a in &acc {
                            for b in &part {
                                let mut c = a.clone();
                                for l in b {
                                    if !c.contains(l) {
                                        c.push(*l);
                                    }
                                }
                                if !c.iter().any(|l| c.contains(&l.complement())) {
                                    next.push(c);
                                }
                            }
                        }
                        acc = next;
                    }
                    acc
                }
                (FluentFormula::Or(xs), false) | (FluentFormula::And(xs), true) => {
                    xs.iter().flat_map(|x| go(x, negated)).collect()
                }
            }
        }
        let mut out: Vec<Vec<Literal>> = Vec::new();
        for mut c in go(self, false) {
            c.sort();
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DynamicLaw {
    pub action: ActionId,
    pub effect: Literal,
    pub preconditions: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StaticLaw {
    pub head: Literal,
    pub body: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExecCondition {
    pub action: ActionId,
    pub body: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("inconsistent: both {fluent} and -{fluent} are derived")]
    Inconsistent { fluent: Atom },
    #[error("unknown fluent `{0}`")]
    UnknownFluent(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("action `{action}` is not executable in the given state")]
    NotExecutable { action: Atom },
    #[error("not a state: {0}")]
    NotAState(String),
    #[error("action `{action}` has no successor state from {state}")]
    EmptyTransition { action: Atom, state: String },
    #[error("action `{action}`: {candidates} candidate inertia exceptions, more than the supported {max}")]
    TransitionTooComplex {
        action: Atom,
        candidates: usize,
        max: usize,
    },
    #[error("{pos}: variable `{var}` does not occur in a typed argument position")]
    UnboundVariable { var: String, pos: Pos },
    #[error("{pos}: sort `{sort}` is undeclared or empty")]
    EmptySort { sort: String, pos: Pos },
    #[error("{pos}: {message}")]
    Schema { pos: Pos, message: String },
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("exhaustive audit supports at most {max} fluents, theory has {fluents}")]
    AuditTooLarge { fluents: usize, max: usize },
}

pub type Result<T, E = TheoryError> = std::result::Result<T, E>;

/// A possibly partial, possibly inconsistent set of literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiteralSet {
    pos: FixedBitSet,
    neg: FixedBitSet,
}

impl LiteralSet {
    pub fn new(num_fluents: usize) -> Self {
        LiteralSet {
            pos: FixedBitSet::with_capacity(num_fluents),
            neg: FixedBitSet::with_capacity(num_fluents),
        }
    }

    pub fn from_literals(num_fluents: usize, lits: impl IntoIterator<Item = Literal>) -> Self {
        let mut s = LiteralSet::new(num_fluents);
        for l in lits {
            s.insert(l);
        }
        s
    }

    pub fn num_fluents(&self) -> usize {
        self.pos.len()
    }

    /// Returns true if the literal was not yet present.
    pub fn insert(&mut self, l: Literal) -> bool {
        let i = l.fluent.index();
        if i >= self.pos.len() {
            self.pos.grow(i + 1);
            self.neg.grow(i + 1);
        }
        let bits = if l.positive {
            &mut self.pos
        } else {
            &mut self.neg
        };
        !bits.put(i)
    }

    pub fn contains(&self, l: Literal) -> bool {
        let bits = if l.positive { &self.pos } else { &self.neg };
        bits.contains(l.fluent.index())
    }

    pub fn is_subset_of(&self, other: &LiteralSet) -> bool {
        self.pos.is_subset(&other.pos) && self.neg.is_subset(&other.neg)
    }

    /// First fluent present with both polarities.
    pub fn conflict(&self) -> Option<FluentId> {
        self.pos
            .intersection(&self.neg)
            .next()
            .map(|i| FluentId(i as u32))
    }

    pub fn is_complete(&self) -> bool {
        let mut u = self.pos.clone();
        u.union_with(&self.neg);
        u.count_ones(..) == u.len()
    }

    pub fn len(&self) -> usize {
        self.pos.count_ones(..) + self.neg.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Literals in (fluent, negative-before-positive) order.
    pub fn iter(&self) -> impl Iterator<Item = Literal> + '_ {
        (0..self.pos.len()).flat_map(move |i| {
            let f = FluentId(i as u32);
            let n = self.neg.contains(i).then_some(Literal::neg(f));
            let p = self.pos.contains(i).then_some(Literal::pos(f));
            n.into_iter().chain(p)
        })
    }

    pub fn to_state(&self) -> Option<State> {
        if self.conflict().is_some() || !self.is_complete() {
            return None;
        }
        Some(State {
            truth: self.pos.clone(),
        })
    }
}

/// Least superset of `set` closed under `laws`. On a contradiction the
/// offending fluent is returned.
pub fn close(mut set: LiteralSet, laws: &[StaticLaw]) -> std::result::Result<LiteralSet, FluentId> {
    if let Some(f) = set.conflict() {
        return Err(f);
    }
    loop {
        let mut changed = false;
        for law in laws {
            if !set.contains(law.head) && law.body.iter().all(|l| set.contains(*l)) {
                set.insert(law.head);
                if set.contains(law.head.complement()) {
                    return Err(law.head.fluent);
                }
                changed = true;
            }
        }
        if !changed {
            return Ok(set);
        }
    }
}

/// A complete, consistent truth assignment; closure under the static laws is
/// guaranteed for states produced by [`ActionTheory`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    truth: FixedBitSet,
}

impl State {
    /// Builds a state from the set of fluents that are true.
    pub fn from_true(num_fluents: usize, true_fluents: impl IntoIterator<Item = FluentId>) -> Self {
        let mut truth = FixedBitSet::with_capacity(num_fluents);
        for f in true_fluents {
            truth.insert(f.index());
        }
        State { truth }
    }

    pub fn num_fluents(&self) -> usize {
        self.truth.len()
    }

    pub fn value(&self, f: FluentId) -> bool {
        self.truth.contains(f.index())
    }

    pub fn holds(&self, l: Literal) -> bool {
        self.value(l.fluent) == l.positive
    }

    /// Every literal of the state, one per fluent, in fluent order.
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        (0..self.truth.len()).map(move |i| Literal {
            fluent: FluentId(i as u32),
            positive: self.truth.contains(i),
        })
    }

    pub fn to_literal_set(&self) -> LiteralSet {
        LiteralSet::from_literals(self.num_fluents(), self.literals())
    }
}

/// A ground action theory together with its goal.
#[derive(Debug, Clone, Default)]
pub struct ActionTheory {
    fluents: Vec<Atom>,
    fluent_index: HashMap<Atom, FluentId>,
    actions: Vec<Atom>,
    action_index: HashMap<Atom, ActionId>,
    dynamic: Vec<DynamicLaw>,
    statics: Vec<StaticLaw>,
    exec: Vec<ExecCondition>,
    initial: Vec<Literal>,
    goal: Option<FluentFormula>,
    dynamic_by_action: Vec<Vec<usize>>,
    exec_by_action: Vec<Vec<usize>>,
}

impl ActionTheory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_fluent(&mut self, atom: Atom) -> Result<FluentId> {
        if self.fluent_index.contains_key(&atom) || self.action_index.contains_key(&atom) {
            return Err(TheoryError::Duplicate(atom.to_string()));
        }
        let id = FluentId(self.fluents.len() as u32);
        self.fluent_index.insert(atom.clone(), id);
        self.fluents.push(atom);
        Ok(id)
    }

    pub fn add_action(&mut self, atom: Atom) -> Result<ActionId> {
        if self.fluent_index.contains_key(&atom) || self.action_index.contains_key(&atom) {
            return Err(TheoryError::Duplicate(atom.to_string()));
        }
        let id = ActionId(self.actions.len() as u32);
        self.action_index.insert(atom.clone(), id);
        self.actions.push(atom);
        self.dynamic_by_action.push(Vec::new());
        self.exec_by_action.push(Vec::new());
        Ok(id)
    }

    fn check_lits(&self, lits: &[Literal]) -> Result<()> {
        for l in lits {
            if l.fluent.index() >= self.fluents.len() {
                return Err(TheoryError::UnknownFluent(format!("#{}", l.fluent.0)));
            }
        }
        Ok(())
    }

    fn check_action(&self, a: ActionId) -> Result<()> {
        if a.index() >= self.actions.len() {
            return Err(TheoryError::UnknownAction(format!("#{}", a.0)));
        }
        Ok(())
    }

    /// Adds `a causes effect if preconditions`; exact duplicates are ignored.
    pub fn add_dynamic(
        &mut self,
        action: ActionId,
        effect: Literal,
        preconditions: Vec<Literal>,
    ) -> Result<()> {
        self.check_action(action)?;
        self.check_lits(&preconditions)?;
        self.check_lits(&[effect])?;
        let law = DynamicLaw {
            action,
            effect,
            preconditions,
        };
        if !self.dynamic_by_action[action.index()]
            .iter()
            .any(|&i| self.dynamic[i] == law)
        {
            self.dynamic_by_action[action.index()].push(self.dynamic.len());
            self.dynamic.push(law);
        }
        Ok(())
    }

    /// Adds `head if body`; exact duplicates are ignored.
    pub fn add_static(&mut self, head: Literal, body: Vec<Literal>) -> Result<()> {
        self.check_lits(&body)?;
        self.check_lits(&[head])?;
        let law = StaticLaw { head, body };
        if !self.statics.contains(&law) {
            self.statics.push(law);
        }
        Ok(())
    }

    /// Adds `a executable_if body`; exact duplicates are ignored.
    pub fn add_exec(&mut self, action: ActionId, body: Vec<Literal>) -> Result<()> {
        self.check_action(action)?;
        self.check_lits(&body)?;
        let cond = ExecCondition { action, body };
        if !self.exec_by_action[action.index()]
            .iter()
            .any(|&i| self.exec[i] == cond)
        {
            self.exec_by_action[action.index()].push(self.exec.len());
            self.exec.push(cond);
        }
        Ok(())
    }

    pub fn add_initial(&mut self, l: Literal) -> Result<()> {
        self.check_lits(&[l])?;
        if !self.initial.contains(&l) {
            self.initial.push(l);
        }
        Ok(())
    }

    pub fn set_goal(&mut self, goal: FluentFormula) -> Result<()> {
        self.check_lits(&goal.literals())?;
        self.goal = Some(goal);
        Ok(())
    }

    /// Mutable access to executability conditions, used by domain transformers.
    pub(crate) fn exec_conditions_mut(&mut self) -> &mut [ExecCondition] {
        &mut self.exec
    }

    pub fn fluents(&self) -> &[Atom] {
        &self.fluents
    }

    pub fn actions(&self) -> &[Atom] {
        &self.actions
    }

    pub fn num_fluents(&self) -> usize {
        self.fluents.len()
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn fluent_ids(&self) -> impl Iterator<Item = FluentId> {
        (0..self.fluents.len() as u32).map(FluentId)
    }

    pub fn fluent_id(&self, atom: &Atom) -> Option<FluentId> {
        self.fluent_index.get(atom).copied()
    }

    pub fn action_id(&self, atom: &Atom) -> Option<ActionId> {
        self.action_index.get(atom).copied()
    }

    pub fn fluent(&self, id: FluentId) -> &Atom {
        &self.fluents[id.index()]
    }

    pub fn action(&self, id: ActionId) -> &Atom {
        &self.actions[id.index()]
    }

    pub fn dynamic_laws(&self) -> &[DynamicLaw] {
        &self.dynamic
    }

    pub fn static_laws(&self) -> &[StaticLaw] {
        &self.statics
    }

    pub fn exec_conditions(&self) -> &[ExecCondition] {
        &self.exec
    }

    pub fn initial(&self) -> &[Literal] {
        &self.initial
    }

    /// The goal formula; `True` when none was given.
    pub fn goal(&self) -> FluentFormula {
        self.goal.clone().unwrap_or(FluentFormula::True)
    }

    pub fn laws_of(&self, a: ActionId) -> impl Iterator<Item = &DynamicLaw> {
        self.dynamic_by_action[a.index()]
            .iter()
            .map(|&i| &self.dynamic[i])
    }

    pub fn exec_of(&self, a: ActionId) -> impl Iterator<Item = &ExecCondition> {
        self.exec_by_action[a.index()]
            .iter()
            .map(|&i| &self.exec[i])
    }

    /// Resolves `at(home)` or `-at(home)`.
    pub fn literal(&self, text: &str) -> Result<Literal> {
        let (positive, rest) = match text.trim().strip_prefix('-') {
            Some(r) => (false, r),
            None => (true, text.trim()),
        };
        let atom = Atom::parse(rest)?;
        let f = self
            .fluent_id(&atom)
            .ok_or_else(|| TheoryError::UnknownFluent(atom.to_string()))?;
        Ok(Literal {
            fluent: f,
            positive,
        })
    }

    /// Resolves a ground action name such as `walk(home,school)`.
    pub fn action_named(&self, text: &str) -> Result<ActionId> {
        let atom = Atom::parse(text)?;
        self.action_id(&atom)
            .ok_or_else(|| TheoryError::UnknownAction(atom.to_string()))
    }

    pub fn literal_name(&self, l: Literal) -> String {
        if l.positive {
            self.fluent(l.fluent).to_string()
        } else {
            format!("-{}", self.fluent(l.fluent))
        }
    }

    pub fn state_to_string(&self, s: &State) -> String {
        let parts: Vec<String> = s.literals().map(|l| self.literal_name(l)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn formula_to_string(&self, f: &FluentFormula) -> String {
        match f {
            FluentFormula::True => "true".into(),
            FluentFormula::False => "false".into(),
            FluentFormula::Lit(l) => self.literal_name(*l),
            FluentFormula::And(xs) => {
                let parts: Vec<_> = xs.iter().map(|x| self.formula_to_string(x)).collect();
                format!("({})", parts.join(" & "))
            }
            FluentFormula::Or(xs) => {
                let parts: Vec<_> = xs.iter().map(|x| self.formula_to_string(x)).collect();
                format!("({})", parts.join(" | "))
            }
            FluentFormula::Not(x) => format!("!{}", self.formula_to_string(x)),
        }
    }

    /// Literals of `after` whose fluent changed with respect to `before`.
    pub fn diff(&self, before: &State, after: &State) -> Vec<Literal> {
        after.literals().filter(|l| !before.holds(*l)).collect()
    }

    fn inconsistent(&self, f: FluentId) -> TheoryError {
        TheoryError::Inconsistent {
            fluent: self.fluent(f).clone(),
        }
    }

    /// Least closure of `lits` under the static laws.
    pub fn static_closure(&self, lits: &LiteralSet) -> Result<LiteralSet> {
        close(lits.clone(), &self.statics).map_err(|f| self.inconsistent(f))
    }

    pub fn holds(&self, s: &State, formula: &FluentFormula) -> Result<bool> {
        for l in formula.literals() {
            if l.fluent.index() >= self.fluents.len() || l.fluent.index() >= s.num_fluents() {
                return Err(TheoryError::UnknownFluent(format!("#{}", l.fluent.0)));
            }
        }
        Ok(formula.holds(s))
    }

    pub fn executable(&self, a: ActionId, s: &State) -> Result<bool> {
        self.check_action(a)?;
        Ok(self.is_executable(a, s))
    }

    pub(crate) fn is_executable(&self, a: ActionId, s: &State) -> bool {
        self.exec_of(a).any(|c| c.body.iter().all(|l| s.holds(*l)))
    }

    /// Φ(a,s), in ascending state order.
    pub fn transition(&self, a: ActionId, s: &State) -> Result<Vec<State>> {
        self.check_action(a)?;
        if !self.is_executable(a, s) {
            return Err(TheoryError::NotExecutable {
                action: self.action(a).clone(),
            });
        }
        self.successors(a, s)
    }

    /// The fixpoint set without the executability check.
    pub fn successors(&self, a: ActionId, s: &State) -> Result<Vec<State>> {
        let n = self.fluents.len();
        let mut effects = LiteralSet::new(n);
        for law in self.laws_of(a) {
            if law.preconditions.iter().all(|l| s.holds(*l)) {
                effects.insert(law.effect);
            }
        }
        if effects.conflict().is_some() {
            return Ok(Vec::new());
        }
        // An inertial literal can only be lost if its complement is derivable.
        let droppable: Vec<Literal> = s
            .literals()
            .filter(|l| {
                let c = l.complement();
                effects.contains(c) || self.statics.iter().any(|law| law.head == c)
            })
            .collect();
        if droppable.len() > MAX_TRANSITION_CANDIDATES {
            return Err(TheoryError::TransitionTooComplex {
                action: self.action(a).clone(),
                candidates: droppable.len(),
                max: MAX_TRANSITION_CANDIDATES,
            });
        }
        let mut out = BTreeSet::new();
        for mask in 0u64..(1u64 << droppable.len()) {
            let dropped = |l: &Literal| {
                droppable
                    .iter()
                    .position(|d| d == l)
                    .is_some_and(|k| mask & (1 << k) != 0)
            };
            let mut base = effects.clone();
            for l in s.literals() {
                if !dropped(&l) {
                    base.insert(l);
                }
            }
            let Ok(closed) = close(base, &self.statics) else {
                continue;
            };
            if !closed.is_complete() {
                continue;
            }
            let fixpoint = droppable
                .iter()
                .enumerate()
                .all(|(k, l)| (mask & (1 << k) == 0) || !closed.contains(*l));
            if fixpoint {
                out.insert(closed.to_state().expect("closed complete consistent set"));
            }
        }
        Ok(out.into_iter().collect())
    }

    /// The initial state: the closure of I, completed with negative
    /// literals for unmentioned fluents, closed again.
    pub fn initial_state(&self) -> Result<State> {
        let n = self.fluents.len();
        let mut set = LiteralSet::new(n);
        for &l in &self.initial {
            set.insert(l);
        }
        if let Some(f) = set.conflict() {
            return Err(self.inconsistent(f));
        }
        let mut set = self.static_closure(&set)?;
        for f in self.fluent_ids() {
            if !set.contains(Literal::pos(f)) && !set.contains(Literal::neg(f)) {
                set.insert(Literal::neg(f));
            }
        }
        let set = self.static_closure(&set)?;
        set.to_state()
            .ok_or_else(|| TheoryError::NotAState("initial description is incomplete".into()))
    }

    /// True iff `s` satisfies every static law.
    pub fn is_closed(&self, s: &State) -> bool {
        self.statics
            .iter()
            .all(|law| !law.body.iter().all(|l| s.holds(*l)) || s.holds(law.head))
    }

    /// Every complete, consistent, closed state. Exponential.
    pub fn all_states(&self) -> Result<Vec<State>> {
        let n = self.fluents.len();
        if n > MAX_AUDIT_FLUENTS {
            return Err(TheoryError::AuditTooLarge {
                fluents: n,
                max: MAX_AUDIT_FLUENTS,
            });
        }
        let mut out = Vec::new();
        for bits in 0u64..(1u64 << n) {
            let s = State::from_true(
                n,
                (0..n)
                    .filter(|i| bits & (1 << i) != 0)
                    .map(|i| FluentId(i as u32)),
            );
            if self.is_closed(&s) {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// Checks that every executable action has a successor, over the
    /// states reachable within `max_length` steps, or over every state when
    /// `max_length` is `None`.
    pub fn audit(&self, max_length: Option<usize>) -> Result<AuditReport> {
        let s0 = self.initial_state()?;
        let mut report = AuditReport::default();
        let check = |s: &State, report: &mut AuditReport| -> Result<Vec<State>> {
            report.states_checked += 1;
            let mut next = Vec::new();
            for a in self.action_ids() {
                if !self.is_executable(a, s) {
                    continue;
                }
                let succ = self.successors(a, s)?;
                if succ.is_empty() {
                    report.problems.push(format!(
                        "{} has no successor from {}",
                        self.action(a),
                        self.state_to_string(s)
                    ));
                }
                report.max_branching = report.max_branching.max(succ.len());
                next.extend(succ);
            }
            Ok(next)
        };
        match max_length {
            None => {
                for s in self.all_states()? {
                    check(&s, &mut report)?;
                }
            }
            Some(h) => {
                let mut seen = BTreeSet::new();
                let mut queue = VecDeque::from([(s0.clone(), 0usize)]);
                seen.insert(s0);
                while let Some((s, d)) = queue.pop_front() {
                    let next = check(&s, &mut report)?;
                    if d < h {
                        for t in next {
                            if seen.insert(t.clone()) {
                                queue.push_back((t, d + 1));
                            }
                        }
                    }
                }
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub states_checked: usize,
    pub max_branching: usize,
    pub problems: Vec<String>,
}

impl AuditReport {
    pub fn is_ok(&self) -> bool {
        self.problems.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theory(fluents: &[&str], actions: &[&str]) -> ActionTheory {
        let mut t = ActionTheory::new();
        for f in fluents {
            t.add_fluent(Atom::parse(f).unwrap()).unwrap();
        }
        for a in actions {
            t.add_action(Atom::parse(a).unwrap()).unwrap();
        }
        t
    }

    #[test]
    fn closure_single_rule() {
        let mut t = theory(&["at(home)", "at(school)"], &[]);
        let h = t.literal("at(home)").unwrap();
        let ns = t.literal("-at(school)").unwrap();
        t.add_static(ns, vec![h]).unwrap();
        let out = t
            .static_closure(&LiteralSet::from_literals(2, [h]))
            .unwrap();
        assert_eq!(out.iter().collect::<Vec<_>>(), vec![h, ns]);
    }

    #[test]
    fn closure_identity_and_conflict() {
        let mut t = theory(&["p", "q"], &[]);
        let p = t.literal("p").unwrap();
        let out = t
            .static_closure(&LiteralSet::from_literals(2, [p]))
            .unwrap();
        assert_eq!(out.iter().collect::<Vec<_>>(), vec![p]);
        let q = t.literal("q").unwrap();
        t.add_static(q, vec![p]).unwrap();
        t.add_static(q.complement(), vec![p]).unwrap();
        let err = t
            .static_closure(&LiteralSet::from_literals(2, [p]))
            .unwrap_err();
        assert_eq!(
            err,
            TheoryError::Inconsistent {
                fluent: Atom::constant("q")
            }
        );
    }

    #[test]
    fn holds_examples() {
        let t = theory(&["at(home)", "at(school)"], &[]);
        let s = State::from_true(2, [FluentId(0)]);
        let home = FluentFormula::Lit(t.literal("at(home)").unwrap());
        let school = FluentFormula::Lit(t.literal("at(school)").unwrap());
        assert!(t.holds(&s, &home).unwrap());
        assert!(t
            .holds(&s, &FluentFormula::Not(Box::new(school.clone())))
            .unwrap());
        assert!(!t
            .holds(&s, &FluentFormula::And(vec![home, school]))
            .unwrap());
        let bogus = FluentFormula::Lit(Literal::pos(FluentId(7)));
        assert!(matches!(
            t.holds(&s, &bogus),
            Err(TheoryError::UnknownFluent(_))
        ));
    }

    #[test]
    fn executability_is_existential() {
        let mut t = theory(&["p", "q"], &["a", "b"]);
        let a = ActionId(0);
        t.add_exec(a, vec![t.literal("p").unwrap()]).unwrap();
        t.add_exec(a, vec![t.literal("q").unwrap()]).unwrap();
        let s = State::from_true(2, [FluentId(1)]);
        assert!(t.executable(a, &s).unwrap());
        assert!(
            !t.executable(ActionId(1), &s).unwrap(),
            "no condition means never executable"
        );
        assert!(matches!(
            t.executable(ActionId(9), &s),
            Err(TheoryError::UnknownAction(_))
        ));
    }

    #[test]
    fn inertia_only_transition() {
        let mut t = theory(&["p"], &["a"]);
        t.add_exec(ActionId(0), vec![]).unwrap();
        let s = State::from_true(1, [FluentId(0)]);
        assert_eq!(t.transition(ActionId(0), &s).unwrap(), vec![s]);
    }

    #[test]
    fn static_laws_contradicting_effects_give_no_successor() {
        // a causes q; -q if p; p is untouched by a.
        let mut t = theory(&["p", "q", "r"], &["a"]);
        let (p, q) = (t.literal("p").unwrap(), t.literal("q").unwrap());
        t.add_dynamic(ActionId(0), q, vec![]).unwrap();
        t.add_static(q.complement(), vec![p]).unwrap();
        t.add_static(p, vec![]).unwrap();
        t.add_exec(ActionId(0), vec![]).unwrap();
        let s0 = t.initial_state().unwrap();
        assert_eq!(t.transition(ActionId(0), &s0).unwrap(), vec![]);
    }

    #[test]
    fn initial_state_completion() {
        let mut t = theory(&["p", "q"], &[]);
        t.add_initial(t.literal("p").unwrap()).unwrap();
        let s = t.initial_state().unwrap();
        assert!(s.value(FluentId(0)) && !s.value(FluentId(1)));
        t.add_initial(t.literal("-p").unwrap()).unwrap();
        assert!(matches!(
            t.initial_state(),
            Err(TheoryError::Inconsistent { .. })
        ));
    }

    #[test]
    fn dnf() {
        let t = theory(&["p", "q", "r"], &[]);
        let (p, q, r) = (
            t.literal("p").unwrap(),
            t.literal("q").unwrap(),
            t.literal("r").unwrap(),
        );
        let f = FluentFormula::And(vec![
            FluentFormula::Or(vec![FluentFormula::Lit(p), FluentFormula::Lit(q)]),
            FluentFormula::Not(Box::new(FluentFormula::Lit(r))),
        ]);
        assert_eq!(
            f.to_dnf(),
            vec![vec![p, r.complement()], vec![q, r.complement()]]
        );
        let contradiction = FluentFormula::And(vec![
            FluentFormula::Lit(p),
            FluentFormula::Lit(p.complement()),
        ]);
        assert!(contradiction.to_dnf().is_empty());
        assert_eq!(FluentFormula::True.to_dnf(), vec![Vec::<Literal>::new()]);
    }
}
