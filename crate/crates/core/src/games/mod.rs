//! Finite turn-based games: models, processes, strategy sets, axiom checks
//! and density-weighted payoffs.

mod axioms;
pub mod bundled;
mod format;
mod model;
mod payoff;
mod policy;
mod process;
mod strategy;

pub use axioms::{
    check_axioms, clash_min_strategy, common_processes, pinned_path_strategy, policy_family, stationary_family, Axiom,
    AxiomReport, AxiomResult, Closure, StrategyFamily, Witness,
};
pub use format::{parse_family, parse_model, write_model, ModelFile};
pub use model::{GameModel, Owner, StateSpec};
pub use payoff::{horizon_steps, payoff, segment_weights, step_weights, PayoffEnclosure, MAX_STEPS};
pub use policy::{joint_successor, sample_policies, stationary_policies, FeedbackPolicy, Policy};
pub use process::{grid_step, Process};
pub use strategy::{
    all_paths, concatenate_strategy, enumeration_guard, literal_concatenation, separate, StrategySet, ENUMERATION_CAP,
};
