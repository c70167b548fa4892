//! Seeded random domains, trajectories, desires and preferences for tests
//! and fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

use crate::planner::Trajectory;
use crate::pp::{AtomicPreference, Desire, GeneralPreference};
use crate::theory::{ActionId, ActionTheory, Atom, FluentFormula, FluentId, Literal};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct DomainConfig {
    pub fluents: usize,
    pub actions: usize,
    /// Chance of one static law.
    pub static_law: f64,
    /// Chance that the goal is a random literal instead of `true`.
    pub literal_goal: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            fluents: 4,
            actions: 3,
            static_law: 0.3,
            literal_goal: 0.5,
        }
    }
}

fn lit(rng: &mut TestRng, n: usize) -> Literal {
    let f = FluentId(rng.gen_range(0..n) as u32);
    if rng.gen_bool(0.5) {
        Literal::pos(f)
    } else {
        Literal::neg(f)
    }
}

fn try_theory(rng: &mut TestRng, cfg: &DomainConfig) -> Option<ActionTheory> {
    let n = cfg.fluents;
    let mut t = ActionTheory::new();
    for i in 0..n {
        t.add_fluent(Atom::constant(format!("f{i}"))).ok()?;
    }
    let mut fl: Vec<u32> = (0..n as u32).collect();
    for i in 0..cfg.actions {
        let a = t.add_action(Atom::constant(format!("a{i}"))).ok()?;
        fl.shuffle(rng);
        let k = rng.gen_range(1..=2.min(n));
        for &f in &fl[..k] {
            let e = if rng.gen_bool(0.5) {
                Literal::pos(FluentId(f))
            } else {
                Literal::neg(FluentId(f))
            };
            let pre = if rng.gen_bool(0.3) {
                let p = lit(rng, n);
                (p.fluent != e.fluent).then_some(p).into_iter().collect()
            } else {
                vec![]
            };
            t.add_dynamic(a, e, pre).ok()?;
        }
        let body = if rng.gen_bool(0.6) {
            vec![lit(rng, n)]
        } else {
            vec![]
        };
        t.add_exec(a, body).ok()?;
    }
    if n >= 2 && rng.gen_bool(cfg.static_law) {
        fl.shuffle(rng);
        let head = if rng.gen_bool(0.5) {
            Literal::pos(FluentId(fl[0]))
        } else {
            Literal::neg(FluentId(fl[0]))
        };
        let body = if rng.gen_bool(0.5) {
            Literal::pos(FluentId(fl[1]))
        } else {
            Literal::neg(FluentId(fl[1]))
        };
        t.add_static(head, vec![body]).ok()?;
    }
    for f in 0..n {
        if rng.gen_bool(0.8) {
            let f = FluentId(f as u32);
            t.add_initial(if rng.gen_bool(0.5) {
                Literal::pos(f)
            } else {
                Literal::neg(f)
            })
            .ok()?;
        }
    }
    let goal = if rng.gen_bool(cfg.literal_goal) {
        FluentFormula::Lit(lit(rng, n))
    } else {
        FluentFormula::True
    };
    t.set_goal(goal).ok()?;
    t.initial_state().ok()?;
    t.audit(None).ok()?.is_ok().then_some(t)
}

/// A consistent random theory: fluents `f0..`, actions `a0..`, every
/// executable action has a successor in every state.
pub fn random_theory(rng: &mut TestRng, cfg: &DomainConfig) -> ActionTheory {
    loop {
        if let Some(t) = try_theory(rng, cfg) {
            return t;
        }
    }
}

/// Random walk from the initial state of up to `max_len` steps, stopping
/// early where nothing is executable.
pub fn random_trajectory(rng: &mut TestRng, theory: &ActionTheory, max_len: usize) -> Trajectory {
    let mut states = vec![theory.initial_state().expect("consistent initial state")];
    let mut actions = Vec::new();
    let len = rng.gen_range(0..=max_len);
    for _ in 0..len {
        let s = states.last().unwrap();
        let mut options: Vec<(ActionId, crate::theory::State)> = Vec::new();
        for a in theory.action_ids() {
            if theory.executable(a, s).unwrap_or(false) {
                for s2 in theory.successors(a, s).unwrap_or_default() {
                    options.push((a, s2));
                }
            }
        }
        let Some((a, s2)) = options.choose(rng).cloned() else {
            break;
        };
        actions.push(a);
        states.push(s2);
    }
    Trajectory::new(states, actions)
}

fn formula(rng: &mut TestRng, n: usize) -> FluentFormula {
    match rng.gen_range(0..10) {
        0 => FluentFormula::True,
        1 => FluentFormula::False,
        2 => FluentFormula::And(vec![
            FluentFormula::Lit(lit(rng, n)),
            FluentFormula::Lit(lit(rng, n)),
        ]),
        3 => FluentFormula::Or(vec![
            FluentFormula::Lit(lit(rng, n)),
            FluentFormula::Lit(lit(rng, n)),
        ]),
        _ => FluentFormula::Lit(lit(rng, n)),
    }
}

/// Random desire over `theory` of nesting depth at most `depth`.
pub fn random_desire(rng: &mut TestRng, theory: &ActionTheory, depth: usize) -> Desire {
    let n = theory.num_fluents();
    let k = theory.actions().len();
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..6) {
            0 if k > 0 => Desire::Occ(ActionId(rng.gen_range(0..k) as u32)),
            1 => Desire::Goal(formula(rng, n)),
            _ => Desire::Formula(formula(rng, n)),
        };
    }
    let sub = |rng: &mut TestRng| random_desire(rng, theory, depth - 1);
    match rng.gen_range(0..7) {
        0 => Desire::and(sub(rng), sub(rng)),
        1 => Desire::or(sub(rng), sub(rng)),
        2 => Desire::not(sub(rng)),
        3 => Desire::next(sub(rng)),
        4 => Desire::until(sub(rng), sub(rng)),
        5 => Desire::always(sub(rng)),
        _ => Desire::eventually(sub(rng)),
    }
}

/// Random general preference of depth at most `depth` (atomic leaves count
/// as depth 1) with chains of up to three desires at the leaves.
pub fn random_preference(
    rng: &mut TestRng,
    theory: &ActionTheory,
    depth: usize,
) -> GeneralPreference {
    if depth <= 1 || rng.gen_bool(0.2) {
        let len = rng.gen_range(1..=3);
        let chain = (0..len).map(|_| random_desire(rng, theory, 2)).collect();
        return GeneralPreference::Atomic(AtomicPreference::new(chain));
    }
    let sub = |rng: &mut TestRng| random_preference(rng, theory, depth - 1);
    match rng.gen_range(0..4) {
        0 => GeneralPreference::conj(sub(rng), sub(rng)),
        1 => GeneralPreference::disj(sub(rng), sub(rng)),
        2 => GeneralPreference::neg(sub(rng)),
        _ => {
            let len = rng.gen_range(2..=3);
            GeneralPreference::Chain((0..len).map(|_| sub(rng)).collect())
        }
    }
}
