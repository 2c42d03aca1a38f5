//! Bounded displacement permutations of the positive integers, finite metric
//! spaces, tree quasi-isometry certificates and the cycle-length bounds that
//! follow from them.

pub mod bounds;
pub mod cli;
pub mod cycles;
pub mod demo;
pub mod error;
pub mod metric;
pub mod perm;
pub mod tree;
pub mod zoo;

pub use error::{Error, Result};

/// Serde adapter writing a `BigUint` as a decimal string.
pub mod bigint_text {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}
