use thiserror::Error;

use crate::compat::Certificate;

/// Errors raised by the cohomology engine and its building blocks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("malformed cochain complex: d_out * d_in is nonzero")]
    CompositionNonzero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("ambient rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("generator {index} is not unimodular (det = {det})")]
    NotUnimodular { index: usize, det: String },

    #[error("group enumeration exceeded the bound of {bound} elements")]
    BoundExceeded { bound: usize },

    #[error("index {value} out of range 0..={max}")]
    OutOfRange { value: usize, max: usize },

    #[error("lattices are defined over different groups")]
    GroupMismatch,

    #[error("group is not cyclic")]
    NotCyclic,

    #[error("subgroups do not form an internal direct product")]
    NotDirectProduct,

    #[error("bar resolution size guard exceeded: {size} > {guard}")]
    SizeGuardExceeded { size: usize, guard: usize },

    #[error("lattice block does not match any catalog case")]
    NotInCatalog,

    #[error("the two q11 equations are inconsistent: {0}")]
    Inconsistent(String),

    #[error("chain map found but the order condition fails for every searched correction")]
    OrderConditionFailed(Box<Certificate>),

    #[error("map is not a group homomorphism")]
    NotHomomorphism,

    #[error("commuting hypothesis fails for the product of actions")]
    ActionsDoNotCommute,

    #[error("compatible action did not pass certification")]
    UncertifiedAction(Box<Certificate>),

    #[error("Sylow block hypothesis could not be verified in the given basis")]
    HypothesisUnverified,

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("element is not in the group")]
    NotInGroup,
}

pub type Result<T> = std::result::Result<T, Error>;
