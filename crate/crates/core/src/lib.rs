//! Sequential aggregate signatures and ordered multi-signatures over a
//! Type-3 pairing.
//!
//! * [`ds`] is the randomisable base scheme on vectors.
//! * [`sas`] turns it into a sequential aggregate signature with one pairing
//!   product check regardless of chain length.
//! * [`oms`] specialises that to ordered multi-signatures on one message, with
//!   constant-size aggregated keys.
//!
//! Everything runs on BLS12-381 through [`groups`].

pub mod ds;
pub mod groups;
pub mod oms;
pub mod registry;
pub mod sas;
pub mod signature;

#[cfg(feature = "games")]
pub mod game;
#[cfg(feature = "harness")]
pub mod harness;

pub use groups::codec::DecodeError;
pub use signature::AggSignature;
