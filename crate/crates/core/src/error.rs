use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("group too large: closure exceeds the cap of {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid element index {index} for a group of order {order}")]
    InvalidElement { index: usize, order: usize },

    #[error("subgroup belongs to a group of order {found}, expected {expected}")]
    ParentMismatch { expected: usize, found: usize },

    #[error("product may not be a subgroup: neither factor is normal")]
    ProductNotSubgroup,

    #[error("nonabelian subgroup")]
    NonabelianSubgroup,

    #[error("KG not Lie nilpotent: {0}")]
    NotLieNilpotent(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("oracle out of range: |G| = {order} exceeds the direct-oracle cap {cap}")]
    OracleOutOfRange { order: usize, cap: usize },

    #[error("unit group too large: 2^{log_size} units exceeds the cap {cap}")]
    UnitGroupTooLarge { log_size: usize, cap: u64 },

    #[error("mismatched algebra operands: {0}")]
    AlgebraMismatch(String),

    #[error("{0}")]
    Spec(String),
}

impl Error {
    /// True for failures caused by a configured size limit rather than by
    /// malformed input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::GroupTooLarge { .. } | Error::OracleOutOfRange { .. } | Error::UnitGroupTooLarge { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
