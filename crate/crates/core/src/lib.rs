//! Search for `k` marked vertices on the complete graph of `N` vertices by
//! a continuous-time quantum walk with a cubic-quintic nonlinearity.
//!
//! The dynamics reduce to a two-dimensional subspace spanned by the marked
//! and unmarked uniform states. [`dynamics`] integrates that system,
//! [`fullspace`] integrates the `N`-dimensional one, and [`analytics`]
//! holds the closed-form runtime, stationary points and regime labels.

// `!(a <= b)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fullspace;
pub mod model;
pub mod ode;
pub mod quadrature;

pub use analytics::{
    analytic_time, classify, critical_h, peak_width, regime, runtime_peak, scaling_class,
    stationary_roots, summarize, AnalyticSummary, Classification, ScalingClass, StationaryRoots,
};
pub use dynamics::{
    integrate, time_to_probability_numeric, EventKind, EventRecord, IntegratorConfig, Sample,
    StopCondition, Trajectory,
};
pub use error::{Error, Result};
pub use fullspace::{compare_to_subspace, integrate_full, FullState, FullTrajectory};
pub use model::{ProblemInstance, RegimeKind, RegimeLabel, SubspaceState};
