//! Rate regions for multiparty quantum distributed compression.
//!
//! The crate is organised around five pieces:
//!
//! - [`qstate`]: dense multipartite density operators, partial traces, von Neumann
//!   entropies, multiparty information, fidelity and trace distance.
//! - [`region`]: the inner-bound polyhedron `{Q : Σ_{k∈K} Q_k ≥ C_K}` with its
//!   corner points, brute-force vertex enumeration, chain reconstruction and the
//!   greedy linear optimizer.
//! - [`esq`]: upper bounds on multiparty squashed entanglement via optimized
//!   extensions, the resulting outer-bound constants and rate-point classification.
//! - [`sim`]: Monte Carlo decoupling for random unitary encodings and the
//!   sequential multiparty rate schedule.
//! - [`cli`]: state description files, H-representation export, reports and the
//!   command-line driver.
//!
//! All entropies are in bits.

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod esq;
pub mod linalg;
pub mod qstate;
pub mod region;
pub mod sim;

pub use error::{Error, Result};
pub use esq::{
    ChannelKind, Classification, EsqBudget, EsqEstimate, ExtensionChannel, OuterConstants,
};
pub use qstate::{MixtureBranch, MultipartyState, SubsetMask};
pub use region::{
    ChainFamily, Membership, RatePoint, RegionConstants, SaturatedSystem, SenderPermutation,
    SubsetKey, VRegion, Verdict,
};
pub use sim::{DecouplingConfig, DecouplingCurve, ProtocolSchedule};
