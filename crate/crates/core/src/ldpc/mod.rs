//! LDPC code construction: ensembles, 4-cycle removal, systematic form and
//! the key/syndrome maps used by the protocol.

pub mod alist;
pub mod bundle;
pub mod code;
pub mod cycles;
pub mod degree;
pub mod graph;
pub mod sample;

pub use alist::{from_alist, to_alist};
pub use bundle::CodeBundle;
pub use code::{
    build_concatenated_subcode, coset_leader, encode, extract_key, key_bits_unchecked, syndrome,
    triangularize, KeyMap, SecretSharingCode,
};
pub use cycles::{count_4cycle_edges, remove_4cycles};
pub use degree::DegreeDistribution;
pub use graph::TannerGraph;
pub use sample::{degree_counts, sample_irregular, sample_near_regular, sample_regular};
