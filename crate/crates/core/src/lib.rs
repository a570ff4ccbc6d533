//! Numerical laboratory for piecewise selfmaps of 1-D interval domains:
//! contractive-type inequality checkers with violation witnesses, common
//! fixed-point scans, implicit one- and two-step iteration schemes, and
//! best-approximation batteries.
//!
//! Everything works over finite unions of intervals with exactly tracked
//! open/closed endpoints, maps defined branchwise (affine, constant, a few
//! exactly invertible monotone forms), and double-precision arithmetic.
//! All types are immutable after construction and all operations are pure
//! functions, so callers may parallelize freely.

pub mod approximation;
pub mod contractivity;
pub mod error;
pub mod grid;
pub mod interval;
pub mod iteration;
pub mod map;
pub mod psi;
pub mod rational;
pub mod report;
pub mod schema;

pub use approximation::{
    best_approx, check_invariance, check_strict_gap, verify_invariant_approximation,
    ApproxBattery, BestApproxResult, CompactSet, ConclusionOutcome, HypothesisOutcome,
    InvarianceTarget,
};
pub use contractivity::{
    check_family, check_inequality, check_weak_compatibility, evaluate_inequality_at,
    find_common_fixed_points, FixedPointScan, MapBundle,
};
pub use error::{CoreError, Result};
pub use grid::GridSpec;
pub use interval::{Domain, Interval};
pub use iteration::{
    coincidence_iterate, ishikawa_iterate, mann_iterate, monotonicity_diagnostics,
    picard_iterate, DiagnosticRule, DiagnosticsReport, IterationStatus, IterationTrace,
    RunConfig, SchemeKind, SolveStage, StepSchedule,
};
pub use map::{Branch, BranchKind, PiecewiseMap};
pub use psi::{PsiFamily, PsiFunction};
pub use rational::parse_real;
pub use report::{CheckKind, CheckReport, InequalityKind, Witness};
