//! Lower and upper game values: backward-induction enclosures, exhaustive
//! oracles, the hybrid payoff and saddle gaps.

mod brute;
mod dp;
mod gap;
mod hybrid;

pub use brute::{bruteforce_segment, lower_upper_bruteforce, BruteValues};
pub use dp::{backward_induction, dp_sweep, dp_value, dp_value_family, dp_value_steps, ValueTable};
pub use gap::{saddle_gap, GapMode, SaddleGapReport};
pub use hybrid::{bellman_split, hybrid_terminal, hybrid_value, HybridValue};
