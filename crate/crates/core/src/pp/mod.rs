//! The preference language: basic desires, atomic preferences (◁-chains
//! of desires) and general preferences built with `&`, `|`, `!` and ◁.

mod parse;
mod print;
mod sugar;

pub use parse::{parse_desire, parse_pref_expr, parse_preference, PrefError, PrefFile};
pub use print::{desire_to_string, preference_to_string};
pub use sugar::{
    ch, enabled_desire, enabled_group, enabled_parametric, executable_formula, maxim, strong_chain,
    strong_desire, temporal_order_desire, weak_chain, weak_desire, MAX_MAXIM_DESIRES,
};

use crate::theory::{ActionId, FluentFormula, Literal};

/// A basic desire formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Desire {
    Formula(FluentFormula),
    Occ(ActionId),
    Goal(FluentFormula),
    And(Box<Desire>, Box<Desire>),
    Or(Box<Desire>, Box<Desire>),
    Not(Box<Desire>),
    Next(Box<Desire>),
    Until(Box<Desire>, Box<Desire>),
    Always(Box<Desire>),
    Eventually(Box<Desire>),
}

impl Desire {
    pub fn lit(l: Literal) -> Self {
        Desire::Formula(FluentFormula::Lit(l))
    }

    pub fn and(a: Desire, b: Desire) -> Self {
        Desire::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Desire, b: Desire) -> Self {
        Desire::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Desire) -> Self {
        Desire::Not(Box::new(a))
    }

    pub fn next(a: Desire) -> Self {
        Desire::Next(Box::new(a))
    }

    pub fn until(a: Desire, b: Desire) -> Self {
        Desire::Until(Box::new(a), Box::new(b))
    }

    pub fn always(a: Desire) -> Self {
        Desire::Always(Box::new(a))
    }

    pub fn eventually(a: Desire) -> Self {
        Desire::Eventually(Box::new(a))
    }

    /// Left-folded conjunction; `None` for an empty list.
    pub fn and_all(parts: impl IntoIterator<Item = Desire>) -> Option<Desire> {
        parts.into_iter().reduce(Desire::and)
    }

    pub fn or_all(parts: impl IntoIterator<Item = Desire>) -> Option<Desire> {
        parts.into_iter().reduce(Desire::or)
    }

    /// Number of nodes, counting a whole fluent formula as one.
    pub fn size(&self) -> usize {
        match self {
            Desire::Formula(_) | Desire::Occ(_) | Desire::Goal(_) => 1,
            Desire::And(a, b) | Desire::Or(a, b) | Desire::Until(a, b) => 1 + a.size() + b.size(),
            Desire::Not(a) | Desire::Next(a) | Desire::Always(a) | Desire::Eventually(a) => {
                1 + a.size()
            }
        }
    }

    /// True if the desire mentions a temporal connective.
    pub fn is_temporal(&self) -> bool {
        match self {
            Desire::Formula(_) | Desire::Occ(_) | Desire::Goal(_) => false,
            Desire::Next(_) | Desire::Until(..) | Desire::Always(_) | Desire::Eventually(_) => true,
            Desire::And(a, b) | Desire::Or(a, b) => a.is_temporal() || b.is_temporal(),
            Desire::Not(a) => a.is_temporal(),
        }
    }

    /// Canonical form: maximal propositional subtrees become a single
    /// `Formula`, with nested conjunctions and disjunctions flattened.
    pub fn normalize(&self) -> Desire {
        match self {
            Desire::Formula(f) => Desire::Formula(normalize_formula(f)),
            Desire::Goal(f) => Desire::Goal(normalize_formula(f)),
            Desire::Occ(a) => Desire::Occ(*a),
            Desire::And(a, b) => match (a.normalize(), b.normalize()) {
                (Desire::Formula(x), Desire::Formula(y)) => Desire::Formula(join(x, y, true)),
                (x, y) => Desire::and(x, y),
            },
            Desire::Or(a, b) => match (a.normalize(), b.normalize()) {
                (Desire::Formula(x), Desire::Formula(y)) => Desire::Formula(join(x, y, false)),
                (x, y) => Desire::or(x, y),
            },
            Desire::Not(a) => match a.normalize() {
                Desire::Formula(x) => Desire::Formula(FluentFormula::Not(Box::new(x))),
                x => Desire::not(x),
            },
            Desire::Next(a) => Desire::next(a.normalize()),
            Desire::Until(a, b) => Desire::until(a.normalize(), b.normalize()),
            Desire::Always(a) => Desire::always(a.normalize()),
            Desire::Eventually(a) => Desire::eventually(a.normalize()),
        }
    }
}

fn join(x: FluentFormula, y: FluentFormula, conj: bool) -> FluentFormula {
    let mut parts = Vec::new();
    for f in [x, y] {
        match (f, conj) {
            (FluentFormula::And(xs), true) | (FluentFormula::Or(xs), false) => parts.extend(xs),
            (f, _) => parts.push(f),
        }
    }
    if conj {
        FluentFormula::And(parts)
    } else {
        FluentFormula::Or(parts)
    }
}

fn normalize_formula(f: &FluentFormula) -> FluentFormula {
    match f {
        FluentFormula::And(xs) | FluentFormula::Or(xs) => {
            let conj = matches!(f, FluentFormula::And(_));
            let mut parts: Vec<FluentFormula> = xs.iter().map(normalize_formula).collect();
            match parts.len() {
                0 => {
                    if conj {
                        FluentFormula::True
                    } else {
                        FluentFormula::False
                    }
                }
                1 => parts.pop().unwrap(),
                _ => {
                    let first = parts.remove(0);
                    parts.into_iter().fold(first, |acc, p| join(acc, p, conj))
                }
            }
        }
        FluentFormula::Not(x) => FluentFormula::Not(Box::new(normalize_formula(x))),
        other => other.clone(),
    }
}

/// `φ1 ◁ φ2 ◁ … ◁ φn`, earlier desires more important.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomicPreference {
    pub chain: Vec<Desire>,
}

impl AtomicPreference {
    pub fn new(chain: Vec<Desire>) -> Self {
        assert!(
            !chain.is_empty(),
            "an atomic preference needs at least one desire"
        );
        AtomicPreference { chain }
    }

    pub fn single(d: Desire) -> Self {
        AtomicPreference { chain: vec![d] }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GeneralPreference {
    Atomic(AtomicPreference),
    Conj(Box<GeneralPreference>, Box<GeneralPreference>),
    Disj(Box<GeneralPreference>, Box<GeneralPreference>),
    Neg(Box<GeneralPreference>),
    Chain(Vec<GeneralPreference>),
}

impl From<Desire> for GeneralPreference {
    fn from(d: Desire) -> Self {
        GeneralPreference::Atomic(AtomicPreference::single(d))
    }
}

impl From<AtomicPreference> for GeneralPreference {
    fn from(p: AtomicPreference) -> Self {
        GeneralPreference::Atomic(p)
    }
}

impl GeneralPreference {
    pub fn conj(a: GeneralPreference, b: GeneralPreference) -> Self {
        GeneralPreference::Conj(Box::new(a), Box::new(b))
    }

    pub fn disj(a: GeneralPreference, b: GeneralPreference) -> Self {
        GeneralPreference::Disj(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: GeneralPreference) -> Self {
        GeneralPreference::Neg(Box::new(a))
    }

    /// ◁-chain; a single element is returned as is and a chain made only
    /// of single desires becomes an atomic preference.
    pub fn chain(mut elems: Vec<GeneralPreference>) -> Self {
        assert!(!elems.is_empty(), "empty chain");
        if elems.len() == 1 {
            return elems.pop().unwrap();
        }
        let singles: Option<Vec<Desire>> = elems
            .iter()
            .map(|e| match e {
                GeneralPreference::Atomic(p) if p.chain.len() == 1 => Some(p.chain[0].clone()),
                _ => None,
            })
            .collect();
        match singles {
            Some(ds) => GeneralPreference::Atomic(AtomicPreference::new(ds)),
            None => GeneralPreference::Chain(elems),
        }
    }

    /// Canonical form: desires normalized, chains rebuilt with [`GeneralPreference::chain`].
    pub fn normalize(&self) -> GeneralPreference {
        match self {
            GeneralPreference::Atomic(p) => GeneralPreference::Atomic(AtomicPreference::new(
                p.chain.iter().map(Desire::normalize).collect(),
            )),
            GeneralPreference::Conj(a, b) => GeneralPreference::conj(a.normalize(), b.normalize()),
            GeneralPreference::Disj(a, b) => GeneralPreference::disj(a.normalize(), b.normalize()),
            GeneralPreference::Neg(a) => GeneralPreference::neg(a.normalize()),
            GeneralPreference::Chain(xs) => {
                GeneralPreference::chain(xs.iter().map(GeneralPreference::normalize).collect())
            }
        }
    }

    /// Every desire of every atomic node, in preorder.
    pub fn desires(&self) -> Vec<&Desire> {
        let mut out = Vec::new();
        self.visit_desires(&mut |d| out.push(d));
        out
    }

    fn visit_desires<'a>(&'a self, f: &mut impl FnMut(&'a Desire)) {
        match self {
            GeneralPreference::Atomic(p) => p.chain.iter().for_each(f),
            GeneralPreference::Conj(a, b) | GeneralPreference::Disj(a, b) => {
                a.visit_desires(f);
                b.visit_desires(f);
            }
            GeneralPreference::Neg(a) => a.visit_desires(f),
            GeneralPreference::Chain(xs) => xs.iter().for_each(|x| x.visit_desires(f)),
        }
    }

    /// Depth counting every node, atomic leaves having depth 1.
    pub fn depth(&self) -> usize {
        match self {
            GeneralPreference::Atomic(_) => 1,
            GeneralPreference::Conj(a, b) | GeneralPreference::Disj(a, b) => {
                1 + a.depth().max(b.depth())
            }
            GeneralPreference::Neg(a) => 1 + a.depth(),
            GeneralPreference::Chain(xs) => 1 + xs.iter().map(|x| x.depth()).max().unwrap_or(0),
        }
    }

    /// Right-folds every chain into binary chains.
    pub fn right_folded(&self) -> GeneralPreference {
        match self {
            GeneralPreference::Atomic(p) => GeneralPreference::Atomic(p.clone()),
            GeneralPreference::Conj(a, b) => {
                GeneralPreference::conj(a.right_folded(), b.right_folded())
            }
            GeneralPreference::Disj(a, b) => {
                GeneralPreference::disj(a.right_folded(), b.right_folded())
            }
            GeneralPreference::Neg(a) => GeneralPreference::neg(a.right_folded()),
            GeneralPreference::Chain(xs) => {
                let mut it = xs.iter().rev().map(|x| x.right_folded());
                let last = it.next().expect("nonempty chain");
                it.fold(last, |acc, x| GeneralPreference::Chain(vec![x, acc]))
            }
        }
    }
}
