//! Two-sided discrete approximations of Pareto fronts in multiobjective
//! maximization problems.
//!
//! A *lower shell* is a feasible antichain: its image underestimates the
//! front from inside the feasible set. An *upper shell* bounds the front from
//! outside using infeasible points, and an *upper approximation* is the
//! analogous outer set validated against a given lower shell instead of the
//! (unknown) efficient set. This crate provides the vector-dominance
//! primitives, problem model, condition validators with witness reports,
//! samplers, relaxation-based derivation of outer candidate sets,
//! monotonicity-gated shift constructions, exhaustive grid oracles, and
//! objective-replacement invariance checks behind those notions.

pub mod archive;
pub mod bundled;
pub mod conditions;
pub mod dominance;
pub mod error;
pub mod expr;
pub mod invariance;
pub mod io;
pub mod monotone;
pub mod oracle;
pub mod problem;
pub mod relaxation;
pub mod sampler;
mod staircase;

pub use archive::{prune_to_antichain, InsertOutcome, ParetoArchive};
pub use bundled::{
    beam_deflection_replacement, beam_problem, knapsack_instance, knapsack_problem,
    paraboloids_problem, BeamParameters,
};
pub use conditions::{
    check_image_disjoint, check_lower_shell, check_outer_region, check_strict_outer,
    check_upper_approximation, check_upper_shell, condition_id, ConditionResult, ShellRole,
    ValidationReport, Witness, WitnessPoint,
};
pub use dominance::{compare, ideal, nadir, weakly_below, DominanceVerdict, ObjectiveVector};
pub use error::{Error, Result};
pub use expr::{parse_expr, EvalDefect, Expr};
pub use invariance::{
    check_invariance, dominance_agreement, geud_linear, geud_power, geud_timing,
    same_linear_order_probe, DominanceAgreement, DominanceMismatch, DoseVector, GeudTiming,
    ObjectivePair, OrderProbe, OrderViolation,
};
pub use io::{candidates_from_csv, candidates_to_csv, csv_header};
pub use monotone::{
    construct_upper_shell_budget, construct_upper_shell_budget_paired, probe_constraint,
    probe_objective, probe_strong_monotonicity, shift_candidates, shift_candidates_paired,
    MonotonicityVerdict, MonotonicityViolation, ShiftSchedule,
};
pub use oracle::{
    check_upper_shell_oracle, estimate_image_slope, grid_enumerate, no_upper_shell_certificate,
    GridOracle, NoUpperShellCertificate, GRID_LIMIT,
};
pub use problem::{
    parse_problem, serialize_problem, BoxRelaxation, CandidateSolution, Constraint, Feasibility,
    Interval, ProblemSpec, Region, RelaxationDescriptor, Sense,
};
pub use relaxation::{
    extract_theta, run_two_sided, ObjectiveBound, ThetaResult, TwoSidedMetrics, TwoSidedOutcome,
};
pub use sampler::{
    front_coverage_gap, sample_lower_shell, sample_lower_shell_with_pool, sample_run,
    SampleRun, SamplerConfig, SamplerMode,
};
