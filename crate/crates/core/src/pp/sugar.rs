//! Derived desire and preference constructors.

use super::{AtomicPreference, Desire, GeneralPreference, PrefError};
use crate::theory::{ActionId, ActionTheory, Atom, FluentFormula};

/// Largest set accepted by [`maxim`] (it builds |S|! chains).
pub const MAX_MAXIM_DESIRES: usize = 6;

/// `φ1 < φ2`, i.e. `φ1 ∧ ¬φ2`.
pub fn strong_desire(a: Desire, b: Desire) -> Desire {
    Desire::and(a, Desire::not(b))
}

/// `φ1 <w φ2`, i.e. `φ1 ∨ ¬φ2`.
pub fn weak_desire(a: Desire, b: Desire) -> Desire {
    Desire::or(a, Desire::not(b))
}

fn adjacent(ds: Vec<Desire>, f: fn(Desire, Desire) -> Desire) -> Option<Desire> {
    let pairs: Vec<Desire> = ds
        .windows(2)
        .map(|w| f(w[0].clone(), w[1].clone()))
        .collect();
    Desire::and_all(pairs)
}

/// `φ1 < φ2 < … < φn` as the conjunction of adjacent strong desires.
pub fn strong_chain(ds: Vec<Desire>) -> Option<Desire> {
    adjacent(ds, strong_desire)
}

pub fn weak_chain(ds: Vec<Desire>) -> Option<Desire> {
    adjacent(ds, weak_desire)
}

/// Disjunction over the executability conditions of `a`; `False` if it has none.
pub fn executable_formula(theory: &ActionTheory, a: ActionId) -> FluentFormula {
    FluentFormula::disj(
        theory
            .exec_of(a)
            .map(|c| FluentFormula::conj(&c.body))
            .collect(),
    )
}

fn check(theory: &ActionTheory, a: ActionId) -> Result<(), PrefError> {
    if a.index() >= theory.actions().len() {
        return Err(PrefError::UnknownAction {
            name: format!("#{}", a.0),
            pos: Default::default(),
        });
    }
    Ok(())
}

/// `a1 <e a2`: when both are executable, `a1` occurs and `a2` does not.
pub fn enabled_desire(
    theory: &ActionTheory,
    a1: ActionId,
    a2: ActionId,
) -> Result<Desire, PrefError> {
    check(theory, a1)?;
    check(theory, a2)?;
    let antecedent = FluentFormula::And(vec![
        executable_formula(theory, a1),
        executable_formula(theory, a2),
    ]);
    Ok(Desire::or(
        Desire::not(Desire::Formula(antecedent)),
        strong_desire(Desire::Occ(a1), Desire::Occ(a2)),
    ))
}

/// `(a1 ∨ … ∨ an) <e (b1 ∨ … ∨ bm)` as the conjunction of all `ai <e bj`.
pub fn enabled_group(
    theory: &ActionTheory,
    left: &[ActionId],
    right: &[ActionId],
) -> Result<Desire, PrefError> {
    let mut parts = Vec::new();
    for &a in left {
        for &b in right {
            parts.push(enabled_desire(theory, a, b)?);
        }
    }
    Desire::and_all(parts).ok_or_else(|| PrefError::Resolution {
        pos: Default::default(),
        message: "`<e` needs at least one action on each side".into(),
    })
}

/// `s1 <e s2` for action schemas: the disjunction of `s1(x̄) <e s2(x̄)` over
/// argument tuples of pairwise distinct constants from `over` (every
/// constant occurring in either schema when `over` is `None`).
pub fn enabled_parametric(
    theory: &ActionTheory,
    schema1: &str,
    schema2: &str,
    over: Option<&[String]>,
) -> Result<Desire, PrefError> {
    let instances =
        |name: &str| -> Vec<&Atom> { theory.actions().iter().filter(|a| a.name == name).collect() };
    let (left, right) = (instances(schema1), instances(schema2));
    for (name, inst) in [(schema1, &left), (schema2, &right)] {
        if inst.is_empty() {
            return Err(PrefError::UnknownAction {
                name: name.to_string(),
                pos: Default::default(),
            });
        }
    }
    let mut parts = Vec::new();
    for a in &left {
        let distinct = a
            .args
            .iter()
            .enumerate()
            .all(|(i, x)| !a.args[..i].contains(x));
        let allowed = over.is_none_or(|s| a.args.iter().all(|x| s.contains(x)));
        if !distinct || !allowed {
            continue;
        }
        let partner = Atom {
            name: schema2.to_string(),
            args: a.args.clone(),
        };
        if let (Some(x), Some(y)) = (theory.action_id(a), theory.action_id(&partner)) {
            parts.push(enabled_desire(theory, x, y)?);
        }
    }
    Desire::or_all(parts).ok_or_else(|| PrefError::Resolution {
        pos: Default::default(),
        message: format!("`{schema1} <e {schema2}` has no common instance"),
    })
}

/// `ch(S, π)`: the chain whose j-th element conjoins the desires
/// `π(j), …, π(k)`.
pub fn ch(desires: &[Desire], perm: &[usize]) -> AtomicPreference {
    assert_eq!(desires.len(), perm.len(), "permutation size");
    let chain = (0..perm.len())
        .map(|j| Desire::and_all(perm[j..].iter().map(|&i| desires[i].clone())).expect("nonempty"))
        .collect();
    AtomicPreference::new(chain)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// `maxim(S)`: `|` over `ch(S, π)` for all permutations, in lexicographic order.
pub fn maxim(desires: &[Desire]) -> Result<GeneralPreference, PrefError> {
    if desires.is_empty() || desires.len() > MAX_MAXIM_DESIRES {
        return Err(PrefError::TooManyDesires {
            count: desires.len(),
            max: MAX_MAXIM_DESIRES,
        });
    }
    let mut chains = permutations(desires.len())
        .into_iter()
        .map(|p| GeneralPreference::Atomic(ch(desires, &p)));
    let first = chains.next().expect("at least one permutation");
    Ok(chains.fold(first, GeneralPreference::disj))
}

/// `c(φ ≤t φ')`: φ holds at some point no later than the first point
/// where φ' holds, and φ' holds at or after some φ-point.
pub fn temporal_order_desire(phi: FluentFormula, phi2: FluentFormula) -> Desire {
    let p = Desire::Formula(phi);
    let q = Desire::Formula(phi2);
    Desire::and(
        Desire::eventually(Desire::and(p.clone(), Desire::eventually(q.clone()))),
        Desire::until(Desire::not(q), p),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::domain::load_domain;

    #[test]
    fn strong_and_weak() {
        let (a, b) = (Desire::Occ(ActionId(0)), Desire::Occ(ActionId(1)));
        assert_eq!(
            strong_desire(a.clone(), b.clone()),
            Desire::and(a.clone(), Desire::not(b.clone()))
        );
        assert_eq!(
            weak_desire(a.clone(), a.clone()),
            Desire::or(a.clone(), Desire::not(a.clone()))
        );
        let c = Desire::Occ(ActionId(2));
        assert_eq!(
            strong_chain(vec![a.clone(), b.clone(), c.clone()]).unwrap(),
            Desire::and(strong_desire(a, b.clone()), strong_desire(b, c))
        );
    }

    #[test]
    fn enabled_shapes() {
        let t = load_domain(
            "fluent p, q. action a, b, c, d, e.
             a executable_if p. b executable_if q. c executable_if p. d executable_if true.",
        )
        .unwrap();
        let (a, b) = (ActionId(0), ActionId(1));
        let d = enabled_desire(&t, a, b).unwrap();
        let execs = FluentFormula::And(vec![
            FluentFormula::Lit(t.literal("p").unwrap()),
            FluentFormula::Lit(t.literal("q").unwrap()),
        ]);
        assert_eq!(
            d,
            Desire::or(
                Desire::not(Desire::Formula(execs)),
                Desire::and(Desire::Occ(a), Desire::not(Desire::Occ(b)))
            )
        );
        // no executability condition: antecedent is unsatisfiable
        let e = enabled_desire(&t, ActionId(4), a).unwrap();
        let Desire::Or(ante, _) = e else { panic!() };
        assert_eq!(
            *ante,
            Desire::not(Desire::Formula(FluentFormula::And(vec![
                FluentFormula::False,
                FluentFormula::Lit(t.literal("p").unwrap())
            ])))
        );
        let g =
            enabled_group(&t, &[ActionId(0), ActionId(1)], &[ActionId(2), ActionId(3)]).unwrap();
        fn count_conj(d: &Desire) -> usize {
            match d {
                Desire::And(x, y) => count_conj(x) + count_conj(y),
                _ => 1,
            }
        }
        assert_eq!(count_conj(&g), 4);
        assert!(!g.is_temporal());
    }

    #[test]
    fn parametric_over_distinct_pairs() {
        let t = load_domain(
            "sort loc = {home, school}. fluent at(loc).
             action drive(loc, loc), walk(loc, loc).
             drive(X, Y) executable_if at(X). walk(X, Y) executable_if at(X).",
        )
        .unwrap();
        let d = enabled_parametric(&t, "drive", "walk", Some(&["home".into(), "school".into()]))
            .unwrap();
        let e = |a: &str, b: &str| {
            enabled_desire(&t, t.action_named(a).unwrap(), t.action_named(b).unwrap()).unwrap()
        };
        assert_eq!(
            d,
            Desire::or(
                e("drive(home,school)", "walk(home,school)"),
                e("drive(school,home)", "walk(school,home)")
            )
        );
    }

    #[test]
    fn ch_and_maxim() {
        let p = |i| Desire::Occ(ActionId(i));
        let c = ch(&[p(0), p(1)], &[0, 1]);
        assert_eq!(c.chain, vec![Desire::and(p(0), p(1)), p(1)]);
        assert_eq!(
            maxim(&[p(0)]).unwrap(),
            GeneralPreference::Atomic(AtomicPreference::single(p(0)))
        );
        match maxim(&[p(0), p(1)]).unwrap() {
            GeneralPreference::Disj(a, b) => {
                assert_eq!(*a, GeneralPreference::Atomic(ch(&[p(0), p(1)], &[0, 1])));
                assert_eq!(*b, GeneralPreference::Atomic(ch(&[p(0), p(1)], &[1, 0])));
            }
            other => panic!("{other:?}"),
        }
        let seven: Vec<Desire> = (0..7).map(p).collect();
        assert!(matches!(
            maxim(&seven),
            Err(PrefError::TooManyDesires { count: 7, .. })
        ));
        assert_eq!(permutations(4).len(), 24);
    }
}
