//! Exact machinery for distance sets of universal metric spaces.
//!
//! The crate decides whether a candidate set of distances can carry a
//! universal or Urysohn-type metric space, and constructively exercises the
//! machinery behind that decision: amalgamation of finite metric spaces over
//! a distance set, incremental construction of finite approximations of the
//! countable universal space, joins of nearby spaces, rounding of distance
//! tables into dense subsets, and approximate-embedding tests against the
//! completion of the countable universal space.
//!
//! All arithmetic is exact rational; there is no floating-point mode.

pub mod amalgam;
pub mod approx;
pub mod fourvalues;
pub mod fraisse;
pub mod isometry;
pub mod rat;
pub mod sets;
pub mod space;

pub use amalgam::{
    amalgamate, amalgamate_point, enumerate_amalgams, feasible_interval, AmalgamError,
    AmalgamResult, SharedMap,
};
pub use approx::{
    approx_embedding, classify, gamma, h_join, round_distances, ApproxError, ClassVerdict,
    Classification, EmbeddingOutcome, GammaChain, JoinResult, RoundingPlan,
};
pub use fourvalues::{
    check, check_finite, check_intervals, falsify, leads_to, swap_interval, FourValuesWitness,
    Method, Outcome, Quadruple, Verdict,
};
pub use fraisse::{
    ages_equal, audit_space, build, random_space, AuditReport, BuildError, BuildOptions,
    BuildState,
};
pub use isometry::{embeds, find_isometry, IsometryError, PartialIsometry, DEFAULT_ISOMETRY_CAP};
pub use rat::{int, rat, Rat, XRat};
pub use sets::{DistanceSet, EmptyRange, Interval, SetError, SetTraits, WindowBounds};
pub use space::{
    is_metric_triple, span_space, typeset, FiniteMetricSpace, NotMetricType, SpaceError,
    TypeFunction, Violation,
};
