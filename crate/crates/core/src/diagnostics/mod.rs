//! Limit-theorem diagnostics.

pub mod compare;
pub mod energy;
pub mod llt;
pub mod vague;
pub mod volume;

pub use compare::{energy_distance, ks_one_sample, ks_two_sample, marginal_compare, EnergyResult, KsResult, MarginalReport};
pub use energy::{jump_form, limit_form, FormValue};
pub use llt::{llt, LltReport, LltRow};
pub use vague::{vague_convergence, VagueTable};
pub use volume::{ball_count_convergence, BallCountRow};
