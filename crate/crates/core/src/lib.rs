//! Executable security definitions for designated verifier signatures.
//!
//! The crate models a DVS scheme as five algorithms, plays the
//! sender-privacy, non-transferability and unforgeability games against
//! pluggable adversaries, and estimates adversary advantages by Monte Carlo
//! so that relations between definitions can be checked numerically.

pub mod adversaries;
pub mod dvs;
pub mod estimator;
pub mod experiment;
pub mod games;
pub mod group;
pub mod oracles;
pub mod reductions;
pub mod schemes;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("security parameter kappa = {0} is below the minimum of {min}", min = group::MIN_KAPPA)]
    KappaTooSmall(u32),
    #[error("security parameter kappa = {0} exceeds the standard profile limit of {max}", max = group::MAX_STANDARD_KAPPA)]
    KappaTooLarge(u32),
    #[error("unknown {kind} '{name}'")]
    UnknownIdentifier { kind: &'static str, name: String },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub use adversaries::{AdversaryId, ChallengeRequest, Forger, TwoPhaseAdversary, View};
pub use dvs::{Bottom, DvsScheme, KeyPair, Message, Params, Signature};
pub use estimator::{check_relation, estimate, wilson_ci, AdvantageEstimate, Direction, Verdict};
pub use games::{GameConfig, GameKind, GameOutcome, OracleChoice};
pub use group::{setup_group, GroupProfile};
pub use schemes::{make_scheme, SchemeId};
