//! Decoupling simulation for random unitary encodings and the multiparty rate schedule.

mod decoupling;
mod haar;
mod schedule;
mod typical;

pub use decoupling::{decoupling_curve, CurvePoint, DecouplingConfig, DecouplingCurve};
pub use haar::{haar_unitary, haar_unitary_with, MAX_HAAR_DIM};
pub use schedule::{multiparty_schedule, ProtocolSchedule};
pub use typical::{typical_projection, TypicalProjection};
