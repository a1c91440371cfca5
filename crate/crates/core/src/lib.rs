//! Minwise hashing for Jaccard similarity.
//!
//! Covers standard MinHash, circulant MinHash with exact or 2-universal
//! randomness, one permutation hashing (raw, copy and re-randomized
//! densification) and circulant OPH, together with an exact variance engine
//! for the densified OPH estimators and brute-force oracles to check it.

pub mod error;
pub mod estimate;
pub mod minhash;
pub mod oph;
pub mod randomness;
pub mod sketch;
pub mod theory;
pub mod vectors;

pub use error::{Error, Result};
pub use estimate::{estimate_jaccard, run_trials, Moments, Scheme, TrialPair, TrialStats};
pub use minhash::{MinHashKind, MinHashScheme, MinHasher, PiSource, SigmaSource};
pub use oph::{BinLayout, OphHasher, OphScheme};
pub use randomness::{CirculantView, Permutation, TwoUniversalHash};
pub use sketch::{Sketch, SketchMeta, Slot};
pub use theory::{TheoryConfig, VarianceReport};
pub use vectors::{jaccard_exact, make_pair, BinaryVector, PairProfile};
