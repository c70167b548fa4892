//! Desire satisfaction on finite trajectories and the preferred /
//! indistinguishable relations for desires, atomic and general preferences.

use serde::Serialize;
use thiserror::Error;

use crate::planner::Trajectory;
use crate::pp::{AtomicPreference, Desire, GeneralPreference};
use crate::theory::FluentFormula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Comparison {
    LeftPreferred,
    RightPreferred,
    Indistinguishable,
    Incomparable,
}

impl Comparison {
    /// The outcome with the arguments swapped.
    pub fn flip(self) -> Comparison {
        match self {
            Comparison::LeftPreferred => Comparison::RightPreferred,
            Comparison::RightPreferred => Comparison::LeftPreferred,
            c => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("fluent #{fluent} is not defined for states with {num_fluents} fluents")]
    UnresolvedName { fluent: u32, num_fluents: usize },
}

fn check_formula(f: &FluentFormula, n: usize) -> Result<(), SemanticsError> {
    match f.literals().into_iter().find(|l| l.fluent.index() >= n) {
        Some(l) => Err(SemanticsError::UnresolvedName {
            fluent: l.fluent.0,
            num_fluents: n,
        }),
        None => Ok(()),
    }
}

fn check_desire(d: &Desire, n: usize) -> Result<(), SemanticsError> {
    match d {
        Desire::Formula(f) | Desire::Goal(f) => check_formula(f, n),
        Desire::Occ(_) => Ok(()),
        Desire::And(a, b) | Desire::Or(a, b) | Desire::Until(a, b) => {
            check_desire(a, n)?;
            check_desire(b, n)
        }
        Desire::Not(a) | Desire::Next(a) | Desire::Always(a) | Desire::Eventually(a) => {
            check_desire(a, n)
        }
    }
}

/// `table[i]` is true iff the suffix starting at state i satisfies `d`.
fn table(t: &Trajectory, d: &Desire) -> Vec<bool> {
    let n = t.len();
    let pointwise = |a: Vec<bool>, b: Vec<bool>, f: fn(bool, bool) -> bool| -> Vec<bool> {
        a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
    };
    match d {
        Desire::Formula(f) => t.states().iter().map(|s| f.holds(s)).collect(),
        Desire::Goal(f) => vec![f.holds(t.state(n)); n + 1],
        Desire::Occ(a) => (0..=n).map(|i| i < n && t.actions()[i] == *a).collect(),
        Desire::And(a, b) => pointwise(table(t, a), table(t, b), |x, y| x && y),
        Desire::Or(a, b) => pointwise(table(t, a), table(t, b), |x, y| x || y),
        Desire::Not(a) => table(t, a).into_iter().map(|x| !x).collect(),
        Desire::Next(a) => {
            let inner = table(t, a);
            (0..=n).map(|i| i < n && inner[i + 1]).collect()
        }
        Desire::Until(a, b) => {
            let (x, y) = (table(t, a), table(t, b));
            let mut out = vec![false; n + 1];
            out[n] = y[n];
            for i in (0..n).rev() {
                out[i] = y[i] || (x[i] && out[i + 1]);
            }
            out
        }
        Desire::Always(a) => {
            let mut out = table(t, a);
            for i in (0..n).rev() {
                out[i] = out[i] && out[i + 1];
            }
            out
        }
        Desire::Eventually(a) => {
            let mut out = table(t, a);
            for i in (0..n).rev() {
                out[i] = out[i] || out[i + 1];
            }
            out
        }
    }
}

/// Satisfaction of `d` by every suffix of `t`, index 0 being `t` itself.
pub fn satisfaction_by_suffix(t: &Trajectory, d: &Desire) -> Result<Vec<bool>, SemanticsError> {
    check_desire(d, t.state(0).num_fluents())?;
    Ok(table(t, d))
}

pub fn satisfies(t: &Trajectory, d: &Desire) -> Result<bool, SemanticsError> {
    Ok(satisfaction_by_suffix(t, d)?[0])
}

fn basic(a: bool, b: bool) -> Comparison {
    match (a, b) {
        (true, false) => Comparison::LeftPreferred,
        (false, true) => Comparison::RightPreferred,
        _ => Comparison::Indistinguishable,
    }
}

pub fn compare_basic(
    alpha: &Trajectory,
    beta: &Trajectory,
    d: &Desire,
) -> Result<Comparison, SemanticsError> {
    Ok(basic(satisfies(alpha, d)?, satisfies(beta, d)?))
}

/// Outcome of an atomic comparison with the 0-based chain index that decided it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AtomicComparison {
    pub outcome: Comparison,
    pub deciding_index: Option<usize>,
}

fn atomic_profiles(a: &[bool], b: &[bool]) -> AtomicComparison {
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        let c = basic(x, y);
        if c != Comparison::Indistinguishable {
            return AtomicComparison {
                outcome: c,
                deciding_index: Some(i),
            };
        }
    }
    AtomicComparison {
        outcome: Comparison::Indistinguishable,
        deciding_index: None,
    }
}

pub fn compare_atomic_detail(
    alpha: &Trajectory,
    beta: &Trajectory,
    p: &AtomicPreference,
) -> Result<AtomicComparison, SemanticsError> {
    let sat = |t| {
        p.chain
            .iter()
            .map(|d| satisfies(t, d))
            .collect::<Result<Vec<_>, _>>()
    };
    Ok(atomic_profiles(&sat(alpha)?, &sat(beta)?))
}

pub fn compare_atomic(
    alpha: &Trajectory,
    beta: &Trajectory,
    p: &AtomicPreference,
) -> Result<Comparison, SemanticsError> {
    Ok(compare_atomic_detail(alpha, beta, p)?.outcome)
}

/// Leaf satisfaction vector of a trajectory: one entry per desire of the
/// preference in [`GeneralPreference::desires`] order.
pub fn profile(t: &Trajectory, pref: &GeneralPreference) -> Result<Vec<bool>, SemanticsError> {
    pref.desires()
        .into_iter()
        .map(|d| satisfies(t, d))
        .collect()
}

fn combine(lt: bool, gt: bool, eq: bool) -> Comparison {
    match (lt, gt, eq) {
        (true, false, false) => Comparison::LeftPreferred,
        (false, true, false) => Comparison::RightPreferred,
        (false, false, true) => Comparison::Indistinguishable,
        (false, false, false) => Comparison::Incomparable,
        _ => unreachable!("relations are mutually exclusive"),
    }
}

fn rel(c: Comparison) -> (bool, bool, bool) {
    (
        c == Comparison::LeftPreferred,
        c == Comparison::RightPreferred,
        c == Comparison::Indistinguishable,
    )
}

fn compare_rec(p: &GeneralPreference, a: &[bool], b: &[bool], next: &mut usize) -> Comparison {
    match p {
        GeneralPreference::Atomic(ap) => {
            let k = ap.chain.len();
            let out = atomic_profiles(&a[*next..*next + k], &b[*next..*next + k]).outcome;
            *next += k;
            out
        }
        GeneralPreference::Conj(x, y) => {
            let (l1, g1, e1) = rel(compare_rec(x, a, b, next));
            let (l2, g2, e2) = rel(compare_rec(y, a, b, next));
            combine(l1 && l2, g1 && g2, e1 && e2)
        }
        GeneralPreference::Disj(x, y) => {
            let (l1, g1, e1) = rel(compare_rec(x, a, b, next));
            let (l2, g2, e2) = rel(compare_rec(y, a, b, next));
            combine(
                (l1 && e2) || (l2 && e1) || (l1 && l2),
                (g1 && e2) || (g2 && e1) || (g1 && g2),
                e1 && e2,
            )
        }
        GeneralPreference::Neg(x) => compare_rec(x, a, b, next).flip(),
        GeneralPreference::Chain(xs) => {
            // every component is visited so `next` stays aligned
            let mut out = None;
            for x in xs {
                let c = compare_rec(x, a, b, next);
                if out.is_none() && c != Comparison::Indistinguishable {
                    out = Some(c);
                }
            }
            out.unwrap_or(Comparison::Indistinguishable)
        }
    }
}

/// Compares two leaf profiles produced by [`profile`] for the same preference.
pub fn compare_profiles(pref: &GeneralPreference, a: &[bool], b: &[bool]) -> Comparison {
    let mut next = 0;
    let out = compare_rec(pref, a, b, &mut next);
    assert_eq!(next, a.len(), "profile does not match the preference");
    out
}

pub fn compare_general(
    alpha: &Trajectory,
    beta: &Trajectory,
    pref: &GeneralPreference,
) -> Result<Comparison, SemanticsError> {
    Ok(compare_profiles(
        pref,
        &profile(alpha, pref)?,
        &profile(beta, pref)?,
    ))
}

/// Indices of the trajectories not strictly dominated by another one.
pub fn dominance_maximal_indices(
    trajs: &[Trajectory],
    pref: &GeneralPreference,
) -> Result<Vec<usize>, SemanticsError> {
    let profiles = trajs
        .iter()
        .map(|t| profile(t, pref))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((0..trajs.len())
        .filter(|&i| {
            !profiles.iter().any(|other| {
                compare_profiles(pref, other, &profiles[i]) == Comparison::LeftPreferred
            })
        })
        .collect())
}

pub fn dominance_maximal(
    trajs: &[Trajectory],
    pref: &GeneralPreference,
) -> Result<Vec<Trajectory>, SemanticsError> {
    Ok(dominance_maximal_indices(trajs, pref)?
        .into_iter()
        .map(|i| trajs[i].clone())
        .collect())
}
