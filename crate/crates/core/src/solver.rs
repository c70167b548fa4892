//! Most preferred trajectory search over the bounded plan space.

use serde::Serialize;
use thiserror::Error;

use crate::planner::{PlanError, PlanQuery, Trajectory};
use crate::pp::GeneralPreference;
use crate::semantics::{compare_profiles, profile, Comparison, SemanticsError};
use crate::weights::{self, WeightError, WeightReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Maximal weight, first in enumeration order on ties.
    #[default]
    Weight,
    /// Every trajectory not strictly dominated by another one.
    Dominance,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no trajectory of length at most {max_length} achieves the goal")]
    NoPlan { max_length: usize },
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("weight winner #{winner} is dominated by trajectory #{by}")]
    SoundnessViolation { winner: usize, by: usize },
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub best: Trajectory,
    /// Position of `best` in the enumeration.
    pub best_index: usize,
    pub weight: WeightReport,
    /// Dominance mode only: the whole maximal set in enumeration order.
    pub maximal: Vec<Trajectory>,
    pub examined: usize,
}

fn no_plan(query: &PlanQuery) -> SolveError {
    SolveError::NoPlan {
        max_length: query.max_length,
    }
}

fn solve_weight(query: &PlanQuery, pref: &GeneralPreference) -> Result<Solution, SolveError> {
    let mut best: Option<(u64, usize, Trajectory)> = None;
    let mut examined = 0;
    for t in query.enumerate() {
        let t = t?;
        let w = weights::weight(&t, pref)?.weight;
        if best.as_ref().is_none_or(|(bw, _, _)| w > *bw) {
            best = Some((w, examined, t));
        }
        examined += 1;
    }
    let (_, best_index, best) = best.ok_or_else(|| no_plan(query))?;
    Ok(Solution {
        weight: weights::weight(&best, pref)?,
        best,
        best_index,
        maximal: Vec::new(),
        examined,
    })
}

fn solve_dominance(query: &PlanQuery, pref: &GeneralPreference) -> Result<Solution, SolveError> {
    let trajs = query.enumerate().collect::<Result<Vec<_>, _>>()?;
    let maximal = crate::semantics::dominance_maximal_indices(&trajs, pref)?;
    let &best_index = maximal.first().ok_or_else(|| no_plan(query))?;
    Ok(Solution {
        weight: weights::weight(&trajs[best_index], pref)?,
        best: trajs[best_index].clone(),
        best_index,
        maximal: maximal.iter().map(|&i| trajs[i].clone()).collect(),
        examined: trajs.len(),
    })
}

pub fn solve(
    query: &PlanQuery,
    pref: &GeneralPreference,
    mode: Mode,
) -> Result<Solution, SolveError> {
    weights::guard(pref)?;
    match mode {
        Mode::Weight => solve_weight(query, pref),
        Mode::Dominance => solve_dominance(query, pref),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub winner: usize,
    pub trajectories: usize,
    pub maximal: usize,
}

/// Fails with [`SolveError::SoundnessViolation`] unless the weight-mode
/// winner is dominance-maximal.
pub fn cross_check(query: &PlanQuery, pref: &GeneralPreference) -> Result<CrossCheck, SolveError> {
    let sol = solve(query, pref, Mode::Weight)?;
    let trajs = query.enumerate().collect::<Result<Vec<_>, _>>()?;
    let profiles = trajs
        .iter()
        .map(|t| profile(t, pref))
        .collect::<Result<Vec<_>, _>>()?;
    let winner = &profiles[sol.best_index];
    if let Some(by) = profiles
        .iter()
        .position(|p| compare_profiles(pref, p, winner) == Comparison::LeftPreferred)
    {
        return Err(SolveError::SoundnessViolation {
            winner: sol.best_index,
            by,
        });
    }
    let maximal = crate::semantics::dominance_maximal_indices(&trajs, pref)?.len();
    Ok(CrossCheck {
        winner: sol.best_index,
        trajectories: trajs.len(),
        maximal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pp::parse_pref_expr;
    use crate::theory::domain::load_domain;

    #[test]
    fn picks_first_maximal_weight() {
        let t = load_domain(
            "fluent p, q. action a, b.
             a causes p. b causes q.
             a executable_if true. b executable_if true.
             goal p | q.",
        )
        .unwrap();
        let q = PlanQuery::new(&t, 1);
        let pref = parse_pref_expr(&t, "eventually(q)").unwrap();
        let sol = solve(&q, &pref, Mode::Weight).unwrap();
        assert_eq!(sol.best.action_names(&t), ["b"]);
        let dom = solve(&q, &pref, Mode::Dominance).unwrap();
        assert_eq!(dom.best, sol.best);
        cross_check(&q, &pref).unwrap();
    }

    #[test]
    fn no_plan() {
        let t = load_domain("fluent p. action a. a executable_if -p. goal p.").unwrap();
        let pref = parse_pref_expr(&t, "true").unwrap();
        let err = solve(&PlanQuery::new(&t, 3), &pref, Mode::Weight).unwrap_err();
        assert_eq!(err, SolveError::NoPlan { max_length: 3 });
    }
}
