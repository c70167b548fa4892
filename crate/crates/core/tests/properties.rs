//! Property tests: order theory of the comparison relations, weight
//! admissibility, print/parse round trips, closure and the transition
//! function against brute force.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;

use prefplan::planner::{PlanQuery, Trajectory};
use prefplan::pp::{parse_pref_expr, preference_to_string, GeneralPreference};
use prefplan::semantics::{compare_general, Comparison};
use prefplan::testkit::{
    random_preference, random_theory, random_trajectory, rng, DomainConfig, TestRng,
};
use prefplan::theory::{close, LiteralSet};
use prefplan::weights::{check_admissible, weight};
use prefplan::{ActionTheory, FluentId, Literal, State};

use Comparison::*;

fn setup(seed: u64) -> (TestRng, ActionTheory) {
    let mut r = rng(seed);
    let fluents = 3 + (seed % 3) as usize;
    let t = random_theory(
        &mut r,
        &DomainConfig {
            fluents,
            ..Default::default()
        },
    );
    (r, t)
}

fn cmp(a: &Trajectory, b: &Trajectory, p: &GeneralPreference) -> Comparison {
    compare_general(a, b, p).unwrap()
}

/// The laws every comparison relation must obey on one triple.
fn check_triple(ts: [&Trajectory; 3], p: &GeneralPreference) -> Result<(), TestCaseError> {
    for x in ts {
        prop_assert_eq!(cmp(x, x, p), Indistinguishable);
        for y in ts {
            let xy = cmp(x, y, p);
            prop_assert_eq!(xy, cmp(y, x, p).flip());
            for z in ts {
                let (yz, xz) = (cmp(y, z, p), cmp(x, z, p));
                match (xy, yz) {
                    (LeftPreferred, LeftPreferred)
                    | (LeftPreferred, Indistinguishable)
                    | (Indistinguishable, LeftPreferred) => prop_assert_eq!(xz, LeftPreferred),
                    (Indistinguishable, Indistinguishable) => {
                        prop_assert_eq!(xz, Indistinguishable)
                    }
                    _ => {}
                }
            }
        }
    }
    if let GeneralPreference::Atomic(_) = p {
        prop_assert_ne!(cmp(ts[0], ts[1], p), Incomparable);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn order_laws_hold(seed in any::<u64>(), depth in 1usize..=4) {
        let (mut r, t) = setup(seed);
        let p = random_preference(&mut r, &t, depth);
        let ts: Vec<Trajectory> = (0..3).map(|_| random_trajectory(&mut r, &t, 4)).collect();
        check_triple([&ts[0], &ts[1], &ts[2]], &p)?;
    }

    #[test]
    fn chain_is_associative(seed in any::<u64>()) {
        let (mut r, t) = setup(seed);
        let [x, y, z] = [0, 1, 2].map(|_| random_preference(&mut r, &t, 2));
        let right = GeneralPreference::Chain(vec![
            x.clone(),
            GeneralPreference::Chain(vec![y.clone(), z.clone()]),
        ]);
        let left = GeneralPreference::Chain(vec![GeneralPreference::Chain(vec![x, y]), z]);
        for _ in 0..4 {
            let a = random_trajectory(&mut r, &t, 4);
            let b = random_trajectory(&mut r, &t, 4);
            prop_assert_eq!(cmp(&a, &b, &left), cmp(&a, &b, &right));
        }
    }

    #[test]
    fn weights_are_admissible_with_headroom(seed in any::<u64>(), depth in 1usize..=4) {
        let (mut r, t) = setup(seed);
        let p = random_preference(&mut r, &t, depth);
        let trajs: Vec<Trajectory> = PlanQuery::new(&t, 3)
            .enumerate()
            .take(200)
            .collect::<Result<_, _>>()
            .unwrap();
        let report = check_admissible(&trajs, &p).unwrap();
        prop_assert!(report.is_admissible(), "{:?}", report.violation);
        for traj in &trajs {
            let w = weight(traj, &p).unwrap();
            for (id, v, max) in w.nodes() {
                prop_assert!(v < max, "node {} has weight {} of {}", id, v, max);
            }
        }
    }

    #[test]
    fn printed_preferences_parse_back(seed in any::<u64>(), depth in 1usize..=4) {
        let (mut r, t) = setup(seed);
        let p = random_preference(&mut r, &t, depth);
        let text = preference_to_string(&t, &p);
        let back = parse_pref_expr(&t, &text).unwrap();
        prop_assert_eq!(back, p.normalize(), "{}", text);
    }

    #[test]
    fn closure_is_least_closed_superset(seed in any::<u64>()) {
        let (mut r, t) = setup(seed);
        let n = t.num_fluents();
        let start = LiteralSet::from_literals(n, (0..2).map(|_| literal(&mut r, n)));
        let closed = close(start.clone(), t.static_laws());
        let supersets: Vec<LiteralSet> = all_literal_sets(n)
            .into_iter()
            .filter(|s| start.is_subset_of(s) && is_closed(s, &t))
            .collect();
        match closed {
            Ok(c) => {
                prop_assert!(start.is_subset_of(&c));
                prop_assert!(is_closed(&c, &t));
                prop_assert!(supersets.iter().all(|s| c.is_subset_of(s)));
                prop_assert_eq!(close(c.clone(), t.static_laws()), Ok(c));
            }
            Err(_) => prop_assert!(supersets.is_empty()),
        }
    }

    #[test]
    fn transition_matches_fixpoint_definition(seed in any::<u64>()) {
        let (_, t) = setup(seed);
        for s in all_states(t.num_fluents()).into_iter().filter(|s| is_closed(&s.to_literal_set(), &t)) {
            for a in t.action_ids() {
                let got: BTreeSet<State> = t.successors(a, &s).unwrap().into_iter().collect();
                prop_assert_eq!(got, brute_successors(&t, a, &s));
            }
        }
    }
}

fn literal(r: &mut TestRng, n: usize) -> Literal {
    let f = FluentId(r.gen_range(0..n) as u32);
    if r.gen_bool(0.5) {
        Literal::pos(f)
    } else {
        Literal::neg(f)
    }
}

fn is_closed(s: &LiteralSet, t: &ActionTheory) -> bool {
    s.conflict().is_none()
        && t.static_laws()
            .iter()
            .all(|law| !law.body.iter().all(|l| s.contains(*l)) || s.contains(law.head))
}

/// Every consistent literal set over `n` fluents.
fn all_literal_sets(n: usize) -> Vec<LiteralSet> {
    let mut out = vec![LiteralSet::new(n)];
    for f in 0..n as u32 {
        out = out
            .into_iter()
            .flat_map(|s| {
                let mut p = s.clone();
                p.insert(Literal::pos(FluentId(f)));
                let mut q = s.clone();
                q.insert(Literal::neg(FluentId(f)));
                [s, p, q]
            })
            .collect();
    }
    out
}

fn all_states(n: usize) -> Vec<State> {
    (0..1u32 << n)
        .map(|bits| {
            State::from_true(
                n,
                (0..n as u32).filter(|i| bits >> i & 1 == 1).map(FluentId),
            )
        })
        .collect()
}

/// Φ(a,s) straight from the definition: complete states s' equal to the
/// closure of the direct effects plus what s and s' share.
fn brute_successors(t: &ActionTheory, a: prefplan::ActionId, s: &State) -> BTreeSet<State> {
    let n = t.num_fluents();
    let effects: Vec<Literal> = t
        .laws_of(a)
        .filter(|law| law.preconditions.iter().all(|l| s.holds(*l)))
        .map(|law| law.effect)
        .collect();
    all_states(n)
        .into_iter()
        .filter(|s2| {
            let kept = s.literals().filter(|l| s2.holds(*l));
            let base = LiteralSet::from_literals(n, effects.iter().copied().chain(kept));
            match close(base, t.static_laws()) {
                Ok(c) => c == s2.to_literal_set(),
                Err(_) => false,
            }
        })
        .collect()
}
