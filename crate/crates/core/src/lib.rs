//! Preference-aware planning.
//!
//! Action theories ([`theory`]) define states and transitions; the
//! [`planner`] enumerates bounded trajectories; preferences are written in a
//! three-tier temporal language ([`pp`]), evaluated by [`semantics`] and
//! [`weights`], and optimized by the [`solver`]. The [`asp`] module compiles
//! problems and preferences to ground answer-set programs.

pub mod asp;
pub mod patterns;
pub mod planner;
pub mod pp;
pub mod semantics;
pub mod solver;
pub mod syntax;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod theory;
pub mod weights;

pub use theory::{ActionId, ActionTheory, Atom, FluentFormula, FluentId, Literal, State};
