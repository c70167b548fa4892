//! Ground answer-set programs in lparse syntax: the planning encoding,
//! desire facts, satisfaction rules and weight rules, plus a stratified
//! evaluator and an answer-set checker used to validate them.

mod encode;
mod eval;

use std::fmt;

use thiserror::Error;

pub use encode::{
    action_constant, encode_desire, encode_planning, encode_problem, literal_constant,
    pref_program, sat_program, trajectory_facts, EncodeOptions, MAX_RULES_PER_NODE,
};
pub use eval::{is_answer_set, reduct_model, stratified_eval};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AspError {
    #[error("weight rules for preference node {node} would exceed {max} ground instances")]
    TooLarge { node: String, max: usize },
    #[error("weight arithmetic overflows 64 bits at preference node {node}")]
    ArithmeticOverflow { node: String },
    #[error("true/false in a desire need at least one fluent")]
    NoFluents,
    #[error("program is not stratified by the satisfaction ranking: {rule}")]
    NotStratified { rule: String },
    #[error("constraint violated: {rule}")]
    ConstraintViolated { rule: String },
    #[error(transparent)]
    Theory(#[from] crate::theory::TheoryError),
}

/// Ground atom `pred(arg, ...)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl GAtom {
    pub fn new<S: ToString>(pred: &str, args: impl IntoIterator<Item = S>) -> Self {
        GAtom {
            pred: pred.to_string(),
            args: args.into_iter().map(|a| a.to_string()).collect(),
        }
    }
}

impl fmt::Display for GAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Head {
    Atom(GAtom),
    /// `{ h }`: h may or may not be chosen.
    Choice(GAtom),
    /// Integrity constraint.
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: Head,
    pub pos: Vec<GAtom>,
    pub neg: Vec<GAtom>,
}

impl Rule {
    pub fn new(head: GAtom, pos: Vec<GAtom>, neg: Vec<GAtom>) -> Self {
        Rule {
            head: Head::Atom(head),
            pos,
            neg,
        }
    }

    pub fn choice(head: GAtom, pos: Vec<GAtom>) -> Self {
        Rule {
            head: Head::Choice(head),
            pos,
            neg: Vec::new(),
        }
    }

    pub fn constraint(pos: Vec<GAtom>, neg: Vec<GAtom>) -> Self {
        Rule {
            head: Head::None,
            pos,
            neg,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.head {
            Head::Atom(h) => write!(f, "{h}")?,
            Head::Choice(h) => write!(f, "{{ {h} }}")?,
            Head::None => {}
        }
        let body: Vec<String> = self
            .pos
            .iter()
            .map(|a| a.to_string())
            .chain(self.neg.iter().map(|a| format!("not {a}")))
            .collect();
        if !body.is_empty() {
            if self.head != Head::None {
                f.write_str(" ")?;
            }
            write!(f, ":- {}", body.join(", "))?;
        }
        f.write_str(".")
    }
}

/// `maximize [ l1 = w1, ... ].`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Maximize {
    /// (positive?, atom, weight)
    pub terms: Vec<(bool, GAtom, u64)>,
}

impl fmt::Display for Maximize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|(pos, a, w)| {
                if *pos {
                    format!("{a} = {w}")
                } else {
                    format!("not {a} = {w}")
                }
            })
            .collect();
        write!(f, "maximize [ {} ].", terms.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AspProgram {
    /// Comment lines printed first (without the leading `%`).
    pub header: Vec<String>,
    pub facts: Vec<GAtom>,
    pub rules: Vec<Rule>,
    pub optimize: Option<Maximize>,
    /// Constant name of each desire or preference node and the node it names.
    pub name_table: Vec<(String, String)>,
}

impl AspProgram {
    pub fn extend(&mut self, other: AspProgram) {
        self.header.extend(other.header);
        self.facts.extend(other.facts);
        self.rules.extend(other.rules);
        self.name_table.extend(other.name_table);
        if other.optimize.is_some() {
            self.optimize = other.optimize;
        }
    }
}

impl fmt::Display for AspProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.header {
            writeln!(f, "% {line}")?;
        }
        if !self.name_table.is_empty() {
            writeln!(f, "%")?;
            for (name, what) in &self.name_table {
                writeln!(f, "% {name} = {what}")?;
            }
        }
        if !self.facts.is_empty() {
            writeln!(f)?;
            for a in &self.facts {
                writeln!(f, "{a}.")?;
            }
        }
        if !self.rules.is_empty() {
            writeln!(f)?;
            for r in &self.rules {
                writeln!(f, "{r}")?;
            }
        }
        if let Some(m) = &self.optimize {
            writeln!(f)?;
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}
