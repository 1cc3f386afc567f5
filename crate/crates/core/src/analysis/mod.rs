//! Lemma toolkit and empirical class certifiers.
//!
//! Sup-type estimators return lower bounds of the true supremum together with
//! a witness. They certify a violation exactly; a clean result only means
//! nothing was found at the sampled resolution.

mod counterexample;
mod estimators;
mod lemmas;

pub use counterexample::{counterexample_demo, CounterexampleRow, LOG_AGREEMENT_TOL};
pub use estimators::{
    estimate_eta, estimate_intermediate_defect, eta_over_sample, remark1_chain, remark2_chain, ChainReport,
    EtaEstimate, IntermediateDefect, NearlyLipschitzReport, DIVISION_GUARD,
};
pub use lemmas::{
    check_convexity_inequality, convexity_audit, sequence_bound, ConvexityAudit, EnvelopeEntry,
    RecursiveEnvelope, SequenceEnvelope, LIMIT_DIFF_TOL,
};
