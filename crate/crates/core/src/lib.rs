//! Instanton analysis of LDPC codes.
//!
//! The crate finds the most probable noise configurations that make a
//! decoder fail ("instantons"), classifies their combinatorial support
//! (trapping sets, pseudo-codewords), turns instanton statistics into
//! error-floor FER predictions, and builds Tanner graphs that avoid the
//! harmful subgraphs.
//!
//! Decoders covered:
//!
//! - Gallager A/B, belief propagation and min-sum message passing
//!   ([`iter_decode`]);
//! - linear-programming decoding over the fundamental polytope
//!   ([`lp_decode`]), solved by an embedded simplex core.
//!
//! Channels are the BSC and the BPSK-modulated AWGN channel ([`channel`]).
//! Throughout, the all-zero codeword is assumed to be transmitted.

pub mod channel;
pub mod code_design;
pub mod code_model;
pub mod error;
pub mod fer;
pub mod instanton_search;
pub mod iter_decode;
pub mod lp_decode;

pub use channel::{ChannelModel, ChannelOutput, LlrVector};
pub use code_model::{BinaryVector, CirculantSpec, SubgraphClass, TannerGraph};
pub use iter_decode::{Algorithm, DecodeOutcome, DecodeTrace, IterConfig, TrappingSetReport};
pub use instanton_search::{Decoder, InstantonRecord};
pub use lp_decode::{LcLpInstance, LpResult, PseudoCodeword};
pub use code_design::{ConstructionConfig, ForbiddenPattern};
pub use error::{Error, Result};

/// Seeded generator used everywhere randomness is needed (ChaCha8).
pub type SeededRng = rand_chacha::ChaCha8Rng;

/// Creates the crate's generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
