//! Fixed-point laboratory for finite families of total asymptotically
//! nonexpansive mappings.
//!
//! The crate is organised bottom-up:
//!
//! * [`spaces`]: points, Euclidean norm, convex domains, the convexity gauge.
//! * [`params`] and [`mappings`]: self-maps `T: K -> K`, their powers, and the
//!   parameter sequences `mu_n`, `l_n`, `a_n`, `phi` that place them in a class.
//! * [`iteration`]: the weighted multi-map scheme and its diagnostics.
//! * [`analysis`]: recursive envelopes, the convexity inequality, sampled
//!   class certifiers and the tripling counterexample.
//! * [`export`]: CSV/JSON renderings with round-trip float formatting.

pub mod analysis;
pub mod catalog;
pub mod error;
pub mod export;
pub mod iteration;
pub mod mappings;
pub mod params;
pub mod sampling;
pub mod spaces;

pub use error::{Error, Result};
pub use iteration::{
    check_fejer_bound, run, step, IterationConfig, IterationTrace, StepRecord, StopReason, WeightRule,
    WeightSchedule,
};
pub use mappings::{
    verify_total_asymptotic, FamilyMember, LogMagnitude, MapKind, MappingSpec, TotalAsymptoticReport,
};
pub use params::{linearized_bound, ParameterSequences, PhiKind, PhiSpec, SequenceRule};
pub use spaces::{convex_combine, domain_contains, norm, ConvexityFunction, Diameter, DomainSpec, Point};
