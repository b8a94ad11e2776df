//! Active de-anonymisation attacks on social graphs, and the defences they
//! are measured against.
//!
//! The simulated game has three stages:
//!
//! 1. **attack construction** ([`attack`]): the adversary injects sybil
//!    accounts wired as a fixed-order path plus coin-flip edges, and connects
//!    each victim to a distinctive subset of sybils (its *fingerprint*).
//!    Fingerprints are drawn from a pool built to maximise the minimum
//!    pairwise symmetric-difference separation.
//! 2. **defence** ([`defender`]): the data owner relabels every vertex with a
//!    secret random isomorphism and optionally perturbs the graph by flipping
//!    random vertex pairs.
//! 3. **re-identification** ([`retrieval`], [`matching`]): the adversary
//!    locates the sybil vector in the released graph by a pruned
//!    breadth-first search minimising a dissimilarity score, then matches
//!    victims by comparing fingerprints, tolerating up to a threshold of
//!    noise in both phases.
//!
//! [`harness`] runs the full game over collections of random graphs and
//! reports success probabilities as CSV. All randomness is seeded and every
//! pipeline is deterministic given its inputs and seed.

pub mod attack;
pub mod defender;
pub mod error;
pub mod graph;
pub mod harness;
pub mod matching;
pub mod retrieval;

pub use error::{Error, Result};

/// Derive an independent stream seed from a master seed and a stream tag
/// (splitmix64 finaliser; avoids correlated ChaCha streams when one master
/// seed fans out into many stage RNGs).
pub(crate) fn sub_seed(master: u64, tag: u64) -> u64 {
    let mut z = master ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
