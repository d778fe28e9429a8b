//! Uniform-limit experiments across density families, single-trajectory
//! Cesàro/Abel checks, and the schedules behind the descent arguments.

mod descent;
mod hardy;
mod limits;
mod schedules;

pub use descent::{
    chito_check, tochi_check, tochi_upper_check, verify_geometric_chain, verify_partition_chain, BoundReport,
    DescentReport, SegmentCheck, Side,
};
pub use hardy::{hardy_single_trajectory, EventuallyPeriodic, HardyReport};
pub use limits::{
    abel_check, check_hypotheses, coincide_tol, corollary_equivalence, limit_difference, tauber_check,
    uniform_limit_estimate, CoincidenceReport, CorollaryReport, Hypotheses, LimitEstimate, LimitReport, MatrixCell,
    Verdict, ESCAPE_T, FP_TOL, NOISE_TOL, REGULARITY_R,
};
pub use schedules::{
    build_geometric_schedule, build_partition_schedule, measured_regularity_bound, FlatnessCheck, GeometricSchedule,
    PartitionSchedule, K_CAP, M_FLOOR, M_HEADROOM,
};
