//! Multiparty squashed entanglement upper bounds and the outer bound they induce.
//!
//! The squashed entanglement is an infimum over all extensions of the state. Only upper bounds
//! are computed here: any extension that is found gives a valid value, so the outer-bound
//! constraints derived from it are necessary conditions (possibly weaker than the true ones)
//! and a "not achievable" verdict is always sound.

mod bounds;
mod estimate;
mod extension;
mod outer;

pub use bounds::{binary_entropy, epsilon_prime, eta, f1, f1_epsilon_limit, F1Bound};
pub use estimate::{esq_upper_bound, perturbation_diagnostic, EsqBudget, EsqEstimate, PerturbationReport};
pub use extension::{
    conditional_info_with_extension, ChannelKind, Extender, ExtensionChannel, MAX_EXTENSION_DIM,
};
pub use outer::{
    classify_rate_point, estimate_outer_bound, outer_bound_constants, Classification, OuterConstants,
};
