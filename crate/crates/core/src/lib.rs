//! Secret key agreement over the BPSK-constrained Gaussian wiretap channel
//! using syndrome-based LDPC reconciliation.
//!
//! The crate covers the channel model, relaxed secret-key capacities, LDPC
//! construction and systematic encoding, sum-product decoding, Monte Carlo
//! evaluation of the protocol, density-evolution based degree-distribution
//! design, and ensemble bounds on leakage and error probability.

pub mod bounds;
pub mod bp;
pub mod capacity;
pub mod channel;
pub mod density;
pub mod error;
pub mod exec;
pub mod gf2;
pub mod ldpc;
pub mod protocol;
pub mod quad;
pub mod search;
pub mod stats;

pub use error::{
    BoundError, CapacityError, ChannelError, CodeError, DecodeError, DesignError, SimError,
};
