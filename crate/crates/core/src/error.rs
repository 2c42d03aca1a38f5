use num_bigint::BigUint;
use thiserror::Error;

use crate::metric::Dist;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("points are positive integers; got 0")]
    ZeroPoint,

    #[error("evaluation exceeded the budget of {budget} primitive applications")]
    BudgetExceeded { budget: u64 },

    #[error("image of point {point} does not fit in u64")]
    Overflow { point: u64 },

    #[error("window upper bound must be at least 1")]
    EmptyWindow,

    #[error("point {point} lies outside the window [1, {window}]")]
    OutsideWindow { point: u64, window: u64 },

    #[error("window [1, {window}] is not invariant under the permutation")]
    NotInvariant { window: u64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("no {n}-th root exists for the given cycle type")]
    NoRoot { n: u64 },

    #[error("tower level {n} is outside the supported range 1..={max}")]
    TowerLevel { n: u32, max: u32 },

    #[error("invalid group description: {0}")]
    InvalidGroup(String),

    #[error("generators do not reach element {0}")]
    Disconnected(String),

    #[error("no interior point: every product leaves the materialized ball")]
    EmptyInterior,

    #[error("metric axiom violated: {0}")]
    MetricAxiom(String),

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("d(x, y) = {distance} is below the separation distance r3 = {r3}")]
    TooClose { distance: Dist, r3: BigUint },

    #[error("tree geodesic has length {length}, below the required {required}; the map is not a quasi-isometry with the stated constant")]
    GeodesicTooShort { length: u64, required: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
