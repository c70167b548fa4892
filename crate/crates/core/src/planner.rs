//! Bounded trajectory enumeration and plan files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Cursor, SyntaxError, Tok};
use crate::theory::{ActionId, ActionTheory, Atom, FluentFormula, State, TheoryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("inconsistent theory: executing {action} in {state} has no result")]
    InconsistentTheory { action: Atom, state: String },
    #[error("suffix index {index} out of range for a trajectory with {len} action(s)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid plan at step {step}: {message}")]
    InvalidPlan { step: usize, message: String },
    #[error("plan file: {0}")]
    Syntax(#[from] SyntaxError),
}

/// `s0 a1 s1 ... an sn`. Suffixes share the underlying buffers.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Arc<[State]>,
    actions: Arc<[ActionId]>,
    start: usize,
}

impl PartialEq for Trajectory {
    fn eq(&self, other: &Self) -> bool {
        self.states() == other.states() && self.actions() == other.actions()
    }
}

impl Eq for Trajectory {}

impl Trajectory {
    pub fn new(states: Vec<State>, actions: Vec<ActionId>) -> Self {
        assert_eq!(
            states.len(),
            actions.len() + 1,
            "a trajectory has one more state than actions"
        );
        Trajectory {
            states: states.into(),
            actions: actions.into(),
            start: 0,
        }
    }

    /// Number of actions.
    pub fn len(&self) -> usize {
        self.actions.len() - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn states(&self) -> &[State] {
        &self.states[self.start..]
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions[self.start..]
    }

    pub fn state(&self, i: usize) -> &State {
        &self.states()[i]
    }

    pub fn last_state(&self) -> &State {
        self.states.last().expect("nonempty")
    }

    /// `α[i]`, the trajectory starting at the i-th state.
    pub fn suffix(&self, i: usize) -> Result<Trajectory, PlanError> {
        if i > self.len() {
            return Err(PlanError::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(Trajectory {
            states: Arc::clone(&self.states),
            actions: Arc::clone(&self.actions),
            start: self.start + i,
        })
    }

    /// Checks executability and membership in Φ for every step.
    pub fn validate(&self, theory: &ActionTheory) -> Result<(), PlanError> {
        for (i, &a) in self.actions().iter().enumerate() {
            let s = self.state(i);
            if !theory.executable(a, s)? {
                return Err(PlanError::InvalidPlan {
                    step: i,
                    message: format!("{} is not executable", theory.action(a)),
                });
            }
            if !theory.transition(a, s)?.contains(self.state(i + 1)) {
                return Err(PlanError::InvalidPlan {
                    step: i,
                    message: format!("state {} is not a result of {}", i + 1, theory.action(a)),
                });
            }
        }
        Ok(())
    }

    pub fn action_names(&self, theory: &ActionTheory) -> Vec<String> {
        self.actions()
            .iter()
            .map(|&a| theory.action(a).to_string())
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PlanQuery<'a> {
    pub theory: &'a ActionTheory,
    pub max_length: usize,
    /// When false, enumeration stops extending a trajectory once the goal holds.
    pub post_goal_actions: bool,
    /// Skip successors already on the current path.
    pub prune_visited: bool,
}

impl<'a> PlanQuery<'a> {
    pub fn new(theory: &'a ActionTheory, max_length: usize) -> Self {
        PlanQuery {
            theory,
            max_length,
            post_goal_actions: true,
            prune_visited: false,
        }
    }

    pub fn post_goal_actions(mut self, allowed: bool) -> Self {
        self.post_goal_actions = allowed;
        self
    }

    pub fn prune_visited(mut self, prune: bool) -> Self {
        self.prune_visited = prune;
        self
    }

    pub fn enumerate(&self) -> Enumerate<'a> {
        Enumerate::new(*self)
    }
}

type Successors = Arc<Vec<(ActionId, State)>>;

struct Frame {
    succ: Successors,
    next: usize,
}

/// Depth-first, pre-order stream of goal-achieving trajectories. Actions are
/// tried in declaration order and successor states in ascending order.
pub struct Enumerate<'a> {
    query: PlanQuery<'a>,
    goal: FluentFormula,
    cache: HashMap<State, Successors>,
    stack: Vec<Frame>,
    path_states: Vec<State>,
    path_actions: Vec<ActionId>,
    started: bool,
    done: bool,
}

impl<'a> Enumerate<'a> {
    fn new(query: PlanQuery<'a>) -> Self {
        Enumerate {
            goal: query.theory.goal(),
            query,
            cache: HashMap::new(),
            stack: Vec::new(),
            path_states: Vec::new(),
            path_actions: Vec::new(),
            started: false,
            done: false,
        }
    }

    fn successors(&mut self, s: &State) -> Result<Successors, PlanError> {
        if let Some(succ) = self.cache.get(s) {
            return Ok(Arc::clone(succ));
        }
        let theory = self.query.theory;
        let mut out = Vec::new();
        for a in theory.action_ids() {
            if !theory.is_executable(a, s) {
                continue;
            }
            let next = theory.successors(a, s)?;
            if next.is_empty() {
                return Err(PlanError::InconsistentTheory {
                    action: theory.action(a).clone(),
                    state: theory.state_to_string(s),
                });
            }
            out.extend(next.into_iter().map(|t| (a, t)));
        }
        let out = Arc::new(out);
        self.cache.insert(s.clone(), Arc::clone(&out));
        Ok(out)
    }

    /// Pushes a frame for the node at the end of the current path and
    /// returns it if it achieves the goal.
    fn visit(&mut self) -> Result<Option<Trajectory>, PlanError> {
        let s = self.path_states.last().expect("path").clone();
        let achieved = self.goal.holds(&s);
        let depth = self.path_actions.len();
        let expand = depth < self.query.max_length && (self.query.post_goal_actions || !achieved);
        let succ = if expand {
            self.successors(&s)?
        } else {
            Arc::new(Vec::new())
        };
        self.stack.push(Frame { succ, next: 0 });
        Ok(achieved.then(|| Trajectory::new(self.path_states.clone(), self.path_actions.clone())))
    }

    fn fail(&mut self, e: PlanError) -> Option<Result<Trajectory, PlanError>> {
        self.done = true;
        Some(Err(e))
    }
}

impl Iterator for Enumerate<'_> {
    type Item = Result<Trajectory, PlanError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            match self.query.theory.initial_state() {
                Ok(s0) => self.path_states.push(s0),
                Err(e) => return self.fail(e.into()),
            }
            match self.visit() {
                Ok(Some(t)) => return Some(Ok(t)),
                Ok(None) => {}
                Err(e) => return self.fail(e),
            }
        }
        loop {
            let Some(frame) = self.stack.last_mut() else {
                self.done = true;
                return None;
            };
            if frame.next == frame.succ.len() {
                self.stack.pop();
                self.path_states.pop();
                self.path_actions.pop();
                continue;
            }
            let (a, s) = frame.succ[frame.next].clone();
            frame.next += 1;
            if self.query.prune_visited && self.path_states.contains(&s) {
                continue;
            }
            self.path_actions.push(a);
            self.path_states.push(s);
            match self.visit() {
                Ok(Some(t)) => return Some(Ok(t)),
                Ok(None) => {}
                Err(e) => return self.fail(e),
            }
        }
    }
}

pub fn enumerate<'a>(query: &PlanQuery<'a>) -> Enumerate<'a> {
    query.enumerate()
}

pub fn count_trajectories(query: &PlanQuery) -> Result<usize, PlanError> {
    let mut n = 0;
    for t in query.enumerate() {
        t?;
        n += 1;
    }
    Ok(n)
}

pub fn collect_trajectories(query: &PlanQuery) -> Result<Vec<Trajectory>, PlanError> {
    query.enumerate().collect()
}

// ------------------------------------------------------------------
// plan files

/// Reads `occ(<action>, <t>).` lines; times must be 0, 1, 2, ... in order.
pub fn parse_plan(theory: &ActionTheory, text: &str) -> Result<Vec<ActionId>, PlanError> {
    let mut cur = Cursor::new(text)?;
    let mut out = Vec::new();
    while !cur.at_eof() {
        let pos = cur.pos();
        let (kw, _) = cur.ident()?;
        if kw != "occ" {
            return Err(SyntaxError::new(pos, format!("expected `occ`, found `{kw}`")).into());
        }
        cur.expect(&Tok::LParen)?;
        let (atom, apos) = crate::syntax::ground_atom(&mut cur)?;
        cur.expect(&Tok::Comma)?;
        let tpos = cur.pos();
        let t = match cur.next().tok {
            Tok::Int(t) => t,
            _ => return Err(SyntaxError::new(tpos, "expected a time point").into()),
        };
        cur.expect(&Tok::RParen)?;
        cur.expect(&Tok::Dot)?;
        if t != out.len() as i64 {
            return Err(
                SyntaxError::new(tpos, format!("expected time {}, found {t}", out.len())).into(),
            );
        }
        let a = theory
            .action_id(&atom)
            .ok_or_else(|| SyntaxError::new(apos, format!("unknown action `{atom}`")))?;
        out.push(a);
    }
    Ok(out)
}

/// Executes `actions` from the initial state. Nondeterministic steps are rejected.
pub fn replay(theory: &ActionTheory, actions: &[ActionId]) -> Result<Trajectory, PlanError> {
    let mut states = vec![theory.initial_state()?];
    for (i, &a) in actions.iter().enumerate() {
        let s = states.last().unwrap();
        if !theory.executable(a, s)? {
            return Err(PlanError::InvalidPlan {
                step: i,
                message: format!("{} is not executable", theory.action(a)),
            });
        }
        let mut next = theory.transition(a, s)?;
        match next.len() {
            1 => states.push(next.pop().unwrap()),
            0 => {
                return Err(PlanError::InvalidPlan {
                    step: i,
                    message: format!("{} has no result", theory.action(a)),
                })
            }
            k => {
                return Err(PlanError::InvalidPlan {
                    step: i,
                    message: format!("{} has {k} possible results", theory.action(a)),
                })
            }
        }
    }
    Ok(Trajectory::new(states, actions.to_vec()))
}

/// One `occ(a,t).` line per action, each followed by a comment with the
/// literals that changed.
pub fn format_plan(theory: &ActionTheory, t: &Trajectory) -> String {
    let mut out = String::new();
    for (i, &a) in t.actions().iter().enumerate() {
        let _ = writeln!(out, "occ({},{}).", theory.action(a), i);
        let diff: Vec<String> = theory
            .diff(t.state(i), t.state(i + 1))
            .into_iter()
            .map(|l| theory.literal_name(l))
            .collect();
        let _ = writeln!(
            out,
            "% {}: {}",
            i + 1,
            if diff.is_empty() {
                "no change".into()
            } else {
                diff.join(" ")
            }
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::domain::load_domain;

    const DOOR: &str = "
        fluent open, inside.
        action push, enter.
        push causes open.
        push executable_if -open.
        enter causes inside if open.
        enter executable_if open, -inside.
        goal inside.
    ";

    #[test]
    fn suffixes() {
        let t = load_domain(DOOR).unwrap();
        let traj = collect_trajectories(&PlanQuery::new(&t, 2))
            .unwrap()
            .remove(0);
        assert_eq!(traj.len(), 2);
        assert_eq!(traj.suffix(0).unwrap(), traj);
        let last = traj.suffix(2).unwrap();
        assert_eq!(last.len(), 0);
        assert_eq!(last.states(), &[traj.last_state().clone()]);
        assert_eq!(
            traj.suffix(3).unwrap_err(),
            PlanError::IndexOutOfRange { index: 3, len: 2 }
        );
    }

    #[test]
    fn goal_true_initially_without_post_goal_actions() {
        let t =
            load_domain("fluent p. action a. a executable_if true. initially p. goal p.").unwrap();
        let all = collect_trajectories(&PlanQuery::new(&t, 3).post_goal_actions(false)).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].is_empty());
        // with post-goal actions every length 0..=3 appears
        assert_eq!(count_trajectories(&PlanQuery::new(&t, 3)).unwrap(), 4);
    }

    #[test]
    fn horizon_zero_goal_false() {
        let t = load_domain(DOOR).unwrap();
        assert_eq!(count_trajectories(&PlanQuery::new(&t, 0)).unwrap(), 0);
    }

    #[test]
    fn plan_file_round_trip() {
        let t = load_domain(DOOR).unwrap();
        let traj = collect_trajectories(&PlanQuery::new(&t, 2))
            .unwrap()
            .remove(0);
        let text = format_plan(&t, &traj);
        assert!(text.starts_with("occ(push,0).\n% 1: open\n"), "{text}");
        let actions = parse_plan(&t, &text).unwrap();
        assert_eq!(replay(&t, &actions).unwrap(), traj);
    }

    #[test]
    fn replay_rejects_non_executable() {
        let t = load_domain(DOOR).unwrap();
        let acts = parse_plan(&t, "occ(enter, 0).").unwrap();
        assert!(matches!(
            replay(&t, &acts),
            Err(PlanError::InvalidPlan { step: 0, .. })
        ));
        assert!(parse_plan(&t, "occ(enter, 1).").is_err());
    }
}
