//! Ready-made preferences: shortest trajectory (by formula or by a
//! stop/noop transformation of the domain) and cheapest plan.

use std::collections::HashMap;

use thiserror::Error;

use crate::planner::{PlanError, PlanQuery, Trajectory};
use crate::pp::{enabled_group, AtomicPreference, Desire, PrefError};
use crate::syntax::{Cursor, SyntaxError, Tok};
use crate::theory::{ActionId, ActionTheory, Atom, FluentFormula, FluentId, Literal, TheoryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("name `{name}` is already used by the domain")]
    NameClash { name: String },
    #[error("no cost given for action `{action}`")]
    MissingCost { action: String },
    #[error("cost range {min}..{max} is empty")]
    InvalidRange { min: u64, max: u64 },
    #[error("plan cost exceeds the bound {max}: {plan}")]
    CostOverflow { max: u64, plan: String },
    #[error("cost file: {0}")]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Pref(#[from] PrefError),
}

fn next_n(d: Desire, n: usize) -> Desire {
    (0..n).fold(d, |acc, _| Desire::next(acc))
}

/// `σ^0 ◁ … ◁ σ^n` where `σ^i` says `phi` holds after exactly `i` steps
/// and at no earlier one.
pub fn shortest_formula(n: usize, phi: &FluentFormula) -> AtomicPreference {
    let p = Desire::Formula(phi.clone());
    let chain = (0..=n)
        .map(|i| {
            let earlier = (0..i).map(|j| Desire::not(next_n(p.clone(), j)));
            Desire::and_all(earlier.chain([next_n(p.clone(), i)])).expect("nonempty")
        })
        .collect();
    AtomicPreference::new(chain)
}

#[derive(Debug, Clone)]
pub struct ShortestAction {
    pub theory: ActionTheory,
    pub desire: Desire,
    pub stop: ActionId,
    pub noop: ActionId,
    pub ended: FluentId,
}

impl ShortestAction {
    /// Actions of `t` with the trailing stop/noop steps removed.
    pub fn strip_padding(&self, t: &Trajectory) -> Vec<ActionId> {
        let acts = t.actions();
        let keep = acts
            .iter()
            .rposition(|&a| a != self.stop && a != self.noop)
            .map_or(0, |i| i + 1);
        acts[..keep].to_vec()
    }
}

fn check_unused(theory: &ActionTheory, names: &[&str]) -> Result<(), PatternError> {
    for &name in names {
        let taken = theory
            .fluents()
            .iter()
            .chain(theory.actions())
            .any(|a| a.name == name);
        if taken {
            return Err(PatternError::NameClash {
                name: name.to_string(),
            });
        }
    }
    Ok(())
}

/// Adds `ended`, `stop` and `noop`: stop is executable where the goal
/// holds, noop once ended, and every original action only before the end.
/// The goal becomes `ended`. The desire is
/// `always((stop ∨ noop) <e (a1 ∨ … ∨ ak))` over the original actions.
pub fn shortest_action_transform(theory: &ActionTheory) -> Result<ShortestAction, PatternError> {
    check_unused(theory, &["stop", "noop", "ended"])?;
    let goal = theory.goal();
    let originals: Vec<ActionId> = theory.action_ids().collect();
    let mut t = theory.clone();
    let ended = t.add_fluent(Atom::constant("ended"))?;
    let not_ended = Literal::neg(ended);
    for c in t.exec_conditions_mut() {
        if !c.body.contains(&not_ended) {
            c.body.push(not_ended);
        }
    }
    let stop = t.add_action(Atom::constant("stop"))?;
    let noop = t.add_action(Atom::constant("noop"))?;
    t.add_dynamic(stop, Literal::pos(ended), vec![])?;
    t.add_dynamic(noop, Literal::pos(ended), vec![])?;
    for body in goal.to_dnf() {
        t.add_exec(stop, body)?;
    }
    t.add_exec(noop, vec![Literal::pos(ended)])?;
    t.add_initial(not_ended)?;
    t.set_goal(FluentFormula::Lit(Literal::pos(ended)))?;
    let desire = if originals.is_empty() {
        Desire::Formula(FluentFormula::True)
    } else {
        Desire::always(enabled_group(&t, &[stop, noop], &originals)?)
    };
    Ok(ShortestAction {
        theory: t,
        desire,
        stop,
        noop,
        ended,
    })
}

/// Per-action costs indexed by [`ActionId`].
pub type Costs = Vec<u64>;

/// Reads `cost(<action>, <n>).` lines. A bare schema name such as
/// `cost(walk, 2).` covers every instance without an exact entry.
pub fn parse_costs(theory: &ActionTheory, text: &str) -> Result<Costs, PatternError> {
    let mut cur = Cursor::new(text)?;
    let mut exact: HashMap<Atom, u64> = HashMap::new();
    let mut schema: HashMap<String, u64> = HashMap::new();
    while !cur.at_eof() {
        let pos = cur.pos();
        let (kw, _) = cur.ident()?;
        if kw != "cost" {
            return Err(SyntaxError::new(pos, format!("expected `cost`, found `{kw}`")).into());
        }
        cur.expect(&Tok::LParen)?;
        let (atom, apos) = crate::syntax::ground_atom(&mut cur)?;
        cur.expect(&Tok::Comma)?;
        let npos = cur.pos();
        let n = match cur.next().tok {
            Tok::Int(n) if n >= 0 => n as u64,
            _ => return Err(SyntaxError::new(npos, "expected a nonnegative cost").into()),
        };
        cur.expect(&Tok::RParen)?;
        cur.expect(&Tok::Dot)?;
        if theory.action_id(&atom).is_some() {
            exact.insert(atom, n);
        } else if atom.args.is_empty() && theory.actions().iter().any(|a| a.name == atom.name) {
            schema.insert(atom.name, n);
        } else {
            return Err(SyntaxError::new(apos, format!("unknown action `{atom}`")).into());
        }
    }
    theory
        .actions()
        .iter()
        .map(|a| {
            exact
                .get(a)
                .or_else(|| schema.get(&a.name))
                .copied()
                .ok_or_else(|| PatternError::MissingCost {
                    action: a.to_string(),
                })
        })
        .collect()
}

pub fn trajectory_cost(costs: &[u64], t: &Trajectory) -> u64 {
    t.actions().iter().map(|a| costs[a.index()]).sum()
}

#[derive(Debug, Clone)]
pub struct Cheapest {
    pub theory: ActionTheory,
    pub preference: AtomicPreference,
    /// `sCost(v)` for v = 0..=max.
    pub cost_fluents: Vec<FluentId>,
    pub overflow: FluentId,
    pub min: u64,
    pub max: u64,
}

impl Cheapest {
    /// Accumulated cost in the last state of `t`; `None` after an overflow.
    pub fn cost_of(&self, t: &Trajectory) -> Option<u64> {
        let s = t.last_state();
        self.cost_fluents
            .iter()
            .position(|&f| s.value(f))
            .map(|v| v as u64)
    }

    /// Fails with [`PatternError::CostOverflow`] if some trajectory of
    /// `query` (over the transformed theory) exceeds the bound.
    pub fn check_overflow(&self, query: &PlanQuery) -> Result<(), PatternError> {
        for t in query.enumerate() {
            let t = t?;
            if t.states().iter().any(|s| s.value(self.overflow)) {
                return Err(PatternError::CostOverflow {
                    max: self.max,
                    plan: t.action_names(&self.theory).join(", "),
                });
            }
        }
        Ok(())
    }
}

/// Adds the cost counter `sCost(0..=max)` with at most one value true,
/// `sCost(0)` initially, `a causes sCost(N+c(a)) if sCost(N)`, and an
/// overflow fluent set when a sum would pass `max`. The preference is
/// `goal(sCost(min)) ◁ … ◁ goal(sCost(max))`.
pub fn cheapest_transform(
    theory: &ActionTheory,
    costs: &[u64],
    min: u64,
    max: u64,
) -> Result<Cheapest, PatternError> {
    if min > max {
        return Err(PatternError::InvalidRange { min, max });
    }
    if let Some(a) = theory.actions().get(costs.len()) {
        return Err(PatternError::MissingCost {
            action: a.to_string(),
        });
    }
    check_unused(theory, &["sCost", "cost_overflow"])?;
    let mut t = theory.clone();
    let cost_fluents = (0..=max)
        .map(|v| t.add_fluent(Atom::new("sCost", &[&v.to_string()])))
        .collect::<Result<Vec<_>, _>>()?;
    let overflow = t.add_fluent(Atom::constant("cost_overflow"))?;
    for (v, &fv) in cost_fluents.iter().enumerate() {
        for (w, &fw) in cost_fluents.iter().enumerate() {
            if v != w {
                t.add_static(Literal::neg(fw), vec![Literal::pos(fv)])?;
            }
        }
        t.add_static(Literal::neg(fv), vec![Literal::pos(overflow)])?;
    }
    for a in theory.action_ids() {
        let c = costs[a.index()];
        for (v, &fv) in cost_fluents.iter().enumerate() {
            let effect = match (v as u64).checked_add(c).filter(|&s| s <= max) {
                Some(s) => Literal::pos(cost_fluents[s as usize]),
                None => Literal::pos(overflow),
            };
            t.add_dynamic(a, effect, vec![Literal::pos(fv)])?;
        }
    }
    t.add_initial(Literal::pos(cost_fluents[0]))?;
    t.add_initial(Literal::neg(overflow))?;
    let chain = (min..=max)
        .map(|v| Desire::Goal(FluentFormula::Lit(Literal::pos(cost_fluents[v as usize]))))
        .collect();
    Ok(Cheapest {
        theory: t,
        preference: AtomicPreference::new(chain),
        cost_fluents,
        overflow,
        min,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pp::GeneralPreference;
    use crate::solver::{solve, Mode};
    use crate::theory::domain::load_domain;

    const LINE: &str = "fluent at_a, at_b, at_c.
        action step_ab, step_bc, jump_ac.
        step_ab causes at_b. step_ab causes -at_a.
        step_bc causes at_c. step_bc causes -at_b.
        jump_ac causes at_c. jump_ac causes -at_a.
        step_ab executable_if at_a. step_bc executable_if at_b.
        jump_ac executable_if at_a.
        initially at_a. initially -at_b. initially -at_c.
        goal at_c.";

    #[test]
    fn shortest_formula_shape() {
        let phi = FluentFormula::True;
        assert_eq!(
            shortest_formula(0, &phi).chain,
            vec![Desire::Formula(phi.clone())]
        );
        let p = shortest_formula(2, &phi);
        assert_eq!(p.chain.len(), 3);
        let d = Desire::Formula(phi);
        let expected = Desire::and_all([
            Desire::not(d.clone()),
            Desire::not(Desire::next(d.clone())),
            Desire::next(Desire::next(d)),
        ]);
        assert_eq!(Some(p.chain[2].clone()), expected);
    }

    #[test]
    fn shortest_formula_prefers_jump() {
        let t = load_domain(LINE).unwrap();
        let pref: GeneralPreference = shortest_formula(2, &t.goal()).into();
        let sol = solve(&PlanQuery::new(&t, 2), &pref, Mode::Weight).unwrap();
        assert_eq!(sol.best.action_names(&t), ["jump_ac"]);
    }

    #[test]
    fn shortest_action_theory() {
        let t = load_domain(LINE).unwrap();
        let sa = shortest_action_transform(&t).unwrap();
        let not_ended = Literal::neg(sa.ended);
        for c in sa.theory.exec_conditions() {
            if c.action != sa.stop && c.action != sa.noop {
                assert!(c.body.contains(&not_ended));
            }
        }
        let stop_exec: Vec<_> = sa.theory.exec_of(sa.stop).map(|c| c.body.clone()).collect();
        assert_eq!(stop_exec, t.goal().to_dnf());
        assert!(sa.theory.audit(Some(4)).unwrap().is_ok());
        let pref: GeneralPreference = sa.desire.clone().into();
        let sol = solve(&PlanQuery::new(&sa.theory, 4), &pref, Mode::Weight).unwrap();
        assert_eq!(sol.weight.weight, 1);
        // the desire only forces stop at the first goal state, so the
        // one-step and two-step plans tie
        let plan = |names: &[&str]| {
            let acts: Vec<_> = names
                .iter()
                .map(|n| sa.theory.action_named(n).unwrap())
                .collect();
            crate::planner::replay(&sa.theory, &acts).unwrap()
        };
        let short = plan(&["jump_ac", "stop"]);
        let long = plan(&["step_ab", "step_bc", "stop"]);
        let late = plan(&["step_ab", "step_bc", "stop", "noop"]);
        assert!(crate::semantics::satisfies(&short, &sa.desire).unwrap());
        assert!(crate::semantics::satisfies(&late, &sa.desire).unwrap());
        assert_eq!(
            crate::semantics::compare_general(&short, &long, &pref).unwrap(),
            crate::semantics::Comparison::Indistinguishable
        );
        assert_eq!(sa.strip_padding(&late).len(), 2);
    }

    #[test]
    fn shortest_action_goal_already_true() {
        let t = load_domain(
            "fluent p. action a. a executable_if true. a causes -p. initially p. goal p.",
        )
        .unwrap();
        let sa = shortest_action_transform(&t).unwrap();
        let pref: GeneralPreference = sa.desire.clone().into();
        let sol = solve(&PlanQuery::new(&sa.theory, 3), &pref, Mode::Weight).unwrap();
        assert_eq!(sol.weight.weight, 1);
        assert_eq!(sol.best.actions()[0], sa.stop);
        assert!(sol.best.actions()[1..].iter().all(|&a| a == sa.noop));
    }

    #[test]
    fn name_clash() {
        let t = load_domain("fluent ended. action a. a executable_if true. goal ended.").unwrap();
        assert_eq!(
            shortest_action_transform(&t).unwrap_err(),
            PatternError::NameClash {
                name: "ended".into()
            }
        );
    }

    #[test]
    fn cost_file() {
        let t = load_domain(LINE).unwrap();
        let c = parse_costs(&t, "cost(step_ab, 1). cost(step_bc, 1). cost(jump_ac, 5).").unwrap();
        assert_eq!(c, [1, 1, 5]);
        assert!(matches!(
            parse_costs(&t, "cost(step_ab, 1)."),
            Err(PatternError::MissingCost { .. })
        ));
        assert!(matches!(
            parse_costs(&t, "cost(fly, 1)."),
            Err(PatternError::Syntax(_))
        ));
    }

    #[test]
    fn cheapest_prefers_two_steps() {
        let t = load_domain(LINE).unwrap();
        let ch = cheapest_transform(&t, &[1, 1, 5], 0, 10).unwrap();
        assert!(ch.theory.audit(Some(2)).unwrap().is_ok());
        let q = PlanQuery::new(&ch.theory, 2);
        ch.check_overflow(&q).unwrap();
        let sol = solve(&q, &ch.preference.clone().into(), Mode::Weight).unwrap();
        assert_eq!(sol.best.action_names(&ch.theory), ["step_ab", "step_bc"]);
        assert_eq!(ch.cost_of(&sol.best), Some(2));
    }

    #[test]
    fn cheapest_overflow() {
        let t = load_domain(LINE).unwrap();
        let ch = cheapest_transform(&t, &[1, 1, 5], 0, 3).unwrap();
        let q = PlanQuery::new(&ch.theory, 2);
        assert!(matches!(
            ch.check_overflow(&q),
            Err(PatternError::CostOverflow { max: 3, .. })
        ));
        let single = cheapest_transform(&t, &[1, 1, 5], 2, 2).unwrap();
        assert_eq!(single.preference.chain.len(), 1);
    }
}
