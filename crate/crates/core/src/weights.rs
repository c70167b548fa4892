//! Integer weights for preferences and the admissibility check.
//!
//! Every node carries a weight `w` and a bound `max` with `w < max`.
//! Chains are right-folded into binary chains before weighting.

use serde::Serialize;
use thiserror::Error;

use crate::planner::Trajectory;
use crate::pp::GeneralPreference;
use crate::semantics::{compare_profiles, profile, Comparison, SemanticsError};

/// Bounds above this are logged since they no longer fit an f64 exactly.
pub const PORTABLE_BOUND: u64 = 1 << 53;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("weight arithmetic overflows 64 bits at preference node {node}")]
    ArithmeticOverflow { node: String },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Atomic,
    Conj,
    Disj,
    Neg,
    Chain,
}

/// Weight tree of one trajectory. Node ids are `p1, p2, ...` in preorder
/// over the right-folded preference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightNode {
    pub id: String,
    pub kind: NodeKind,
    pub weight: u64,
    pub max_bound: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<WeightNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightReport {
    pub weight: u64,
    pub max_bound: u64,
    pub tree: WeightNode,
}

impl WeightReport {
    /// `(id, weight, max_bound)` for every node in preorder.
    pub fn nodes(&self) -> Vec<(&str, u64, u64)> {
        fn go<'a>(n: &'a WeightNode, out: &mut Vec<(&'a str, u64, u64)>) {
            out.push((&n.id, n.weight, n.max_bound));
            n.children.iter().for_each(|c| go(c, out));
        }
        let mut out = Vec::new();
        go(&self.tree, &mut out);
        out
    }
}

fn overflow(id: &str) -> WeightError {
    WeightError::ArithmeticOverflow {
        node: id.to_string(),
    }
}

/// Evaluates the right-folded `pref` against a leaf profile.
/// `leaf` is the index of the next unread profile entry.
fn eval(
    pref: &GeneralPreference,
    prof: Option<&[bool]>,
    leaf: &mut usize,
    counter: &mut usize,
) -> Result<WeightNode, WeightError> {
    *counter += 1;
    let id = format!("p{counter}");
    let node = match pref {
        GeneralPreference::Atomic(a) => {
            let k = a.chain.len();
            let max_bound = u32::try_from(k)
                .ok()
                .and_then(|k| 1u64.checked_shl(k))
                .filter(|_| k < 64);
            let max_bound = max_bound.ok_or_else(|| overflow(&id))?;
            let mut weight = 0u64;
            if let Some(p) = prof {
                for (r, &sat) in p[*leaf..*leaf + k].iter().enumerate() {
                    if sat {
                        weight += 1u64 << (k - 1 - r);
                    }
                }
            }
            *leaf += k;
            WeightNode {
                id,
                kind: NodeKind::Atomic,
                weight,
                max_bound,
                children: vec![],
            }
        }
        GeneralPreference::Conj(x, y) | GeneralPreference::Disj(x, y) => {
            let a = eval(x, prof, leaf, counter)?;
            let b = eval(y, prof, leaf, counter)?;
            let kind = if matches!(pref, GeneralPreference::Conj(..)) {
                NodeKind::Conj
            } else {
                NodeKind::Disj
            };
            WeightNode {
                kind,
                weight: a.weight + b.weight,
                max_bound: a
                    .max_bound
                    .checked_add(b.max_bound)
                    .ok_or_else(|| overflow(&id))?,
                id,
                children: vec![a, b],
            }
        }
        GeneralPreference::Neg(x) => {
            let a = eval(x, prof, leaf, counter)?;
            WeightNode {
                id,
                kind: NodeKind::Neg,
                weight: if prof.is_some() {
                    a.max_bound - 1 - a.weight
                } else {
                    0
                },
                max_bound: a.max_bound,
                children: vec![a],
            }
        }
        GeneralPreference::Chain(xs) => {
            let [x, y] = xs.as_slice() else {
                unreachable!("chains are right-folded to two elements")
            };
            let a = eval(x, prof, leaf, counter)?;
            let b = eval(y, prof, leaf, counter)?;
            let scaled = b.max_bound.checked_mul(a.weight);
            let weight = scaled
                .and_then(|s| s.checked_add(b.weight))
                .ok_or_else(|| overflow(&id))?;
            let max_bound = b
                .max_bound
                .checked_mul(a.max_bound)
                .and_then(|s| s.checked_add(b.max_bound))
                .ok_or_else(|| overflow(&id))?;
            WeightNode {
                id,
                kind: NodeKind::Chain,
                weight,
                max_bound,
                children: vec![a, b],
            }
        }
    };
    assert!(
        node.weight < node.max_bound,
        "headroom violated at {}",
        node.id
    );
    Ok(node)
}

fn report(pref: &GeneralPreference, prof: Option<&[bool]>) -> Result<WeightReport, WeightError> {
    let folded = pref.right_folded();
    let (mut leaf, mut counter) = (0, 0);
    let tree = eval(&folded, prof, &mut leaf, &mut counter)?;
    Ok(WeightReport {
        weight: tree.weight,
        max_bound: tree.max_bound,
        tree,
    })
}

/// Weight from a leaf profile of `pref` (see [`crate::semantics::profile`]).
pub fn weight_of_profile(
    pref: &GeneralPreference,
    prof: &[bool],
) -> Result<WeightReport, WeightError> {
    assert_eq!(
        prof.len(),
        pref.desires().len(),
        "profile does not match the preference"
    );
    report(pref, Some(prof))
}

pub fn weight(t: &Trajectory, pref: &GeneralPreference) -> Result<WeightReport, WeightError> {
    weight_of_profile(pref, &profile(t, pref)?)
}

pub fn max_weight(pref: &GeneralPreference) -> Result<u64, WeightError> {
    Ok(report(pref, None)?.max_bound)
}

/// [`max_weight`], warning when the bound exceeds [`PORTABLE_BOUND`].
pub fn guard(pref: &GeneralPreference) -> Result<u64, WeightError> {
    let m = max_weight(pref)?;
    if m > PORTABLE_BOUND {
        log::warn!("preference weights reach {m}, above 2^53");
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub left: usize,
    pub right: usize,
    pub comparison: Comparison,
    pub left_weight: u64,
    pub right_weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub pairs_checked: usize,
    pub violation: Option<Violation>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks over all ordered pairs that a strict preference means a strictly
/// larger weight and indistinguishability an equal one.
pub fn check_admissible(
    trajs: &[Trajectory],
    pref: &GeneralPreference,
) -> Result<AdmissibilityReport, WeightError> {
    let profiles = trajs
        .iter()
        .map(|t| profile(t, pref))
        .collect::<Result<Vec<_>, _>>()?;
    let weights = profiles
        .iter()
        .map(|p| Ok(weight_of_profile(pref, p)?.weight))
        .collect::<Result<Vec<_>, WeightError>>()?;
    let mut pairs_checked = 0;
    for i in 0..trajs.len() {
        for j in 0..trajs.len() {
            pairs_checked += 1;
            let c = compare_profiles(pref, &profiles[i], &profiles[j]);
            let ok = match c {
                Comparison::LeftPreferred => weights[i] > weights[j],
                Comparison::Indistinguishable => weights[i] == weights[j],
                _ => true,
            };
            if !ok {
                return Ok(AdmissibilityReport {
                    pairs_checked,
                    violation: Some(Violation {
                        left: i,
                        right: j,
                        comparison: c,
                        left_weight: weights[i],
                        right_weight: weights[j],
                    }),
                });
            }
        }
    }
    Ok(AdmissibilityReport {
        pairs_checked,
        violation: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pp::{AtomicPreference, Desire};
    use crate::theory::{FluentId, Literal};

    fn d(i: u32) -> Desire {
        Desire::lit(Literal::pos(FluentId(i)))
    }

    fn basic(i: u32) -> GeneralPreference {
        d(i).into()
    }

    #[test]
    fn basic_and_atomic() {
        let r = weight_of_profile(&basic(0), &[true]).unwrap();
        assert_eq!((r.weight, r.max_bound), (1, 2));
        let a: GeneralPreference = AtomicPreference::new(vec![d(0), d(1)]).into();
        let r = weight_of_profile(&a, &[true, false]).unwrap();
        assert_eq!((r.weight, r.max_bound), (2, 4));
    }

    #[test]
    fn max_bounds() {
        assert_eq!(
            max_weight(&GeneralPreference::conj(basic(0), basic(1))).unwrap(),
            4
        );
        assert_eq!(
            max_weight(&GeneralPreference::Chain(vec![
                GeneralPreference::neg(basic(0)),
                basic(1)
            ]))
            .unwrap(),
            6
        );
        let a3: GeneralPreference = AtomicPreference::new(vec![d(0), d(1), d(2)]).into();
        assert_eq!(max_weight(&GeneralPreference::neg(a3)).unwrap(), 8);
    }

    #[test]
    fn negation_keeps_headroom() {
        let r = weight_of_profile(&GeneralPreference::neg(basic(0)), &[false]).unwrap();
        assert_eq!((r.weight, r.max_bound), (1, 2));
        let r = weight_of_profile(&GeneralPreference::neg(basic(0)), &[true]).unwrap();
        assert_eq!(r.weight, 0);
    }

    #[test]
    fn long_chain_overflows() {
        let chain =
            GeneralPreference::Chain((0..70).map(|i| GeneralPreference::neg(basic(i))).collect());
        assert!(matches!(
            max_weight(&chain),
            Err(WeightError::ArithmeticOverflow { .. })
        ));
        let atomic: GeneralPreference = AtomicPreference::new((0..64).map(d).collect()).into();
        assert!(max_weight(&atomic).is_err());
    }

    #[test]
    fn node_ids_are_preorder() {
        let p = GeneralPreference::conj(GeneralPreference::neg(basic(0)), basic(1));
        let r = weight_of_profile(&p, &[false, true]).unwrap();
        let ids: Vec<&str> = r.nodes().iter().map(|n| n.0).collect();
        assert_eq!(ids, ["p1", "p2", "p3", "p4"]);
        assert_eq!(r.weight, 2);
    }
}
