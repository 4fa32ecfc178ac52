//! Combinatorial Milnor fibrations of oriented matroids.

pub mod arrangement;
pub mod bitset;
pub mod error;
pub mod homology;
pub mod io;
pub mod milnor;
pub mod oriented_matroid;
pub mod poset;
pub mod salvetti;
pub mod sign;
pub mod subdivision;

pub use bitset::BitSet;
pub use error::{Error, Result};
pub use sign::{Sign, SignVector};
