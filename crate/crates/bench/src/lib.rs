//! Shared fixtures for the benchmarks.

use coph_core::{make_pair, BinaryVector, MinHasher, OphHasher, Result, Scheme};

/// A seeded pair in dimension `dim` with `union` non-zeros and `J ≈ jaccard`.
pub fn fixture(dim: usize, union: usize, jaccard: f64, seed: u64) -> Result<(BinaryVector, BinaryVector)> {
    make_pair(dim, union, (jaccard * union as f64).round() as usize, seed)
}

/// A ready-to-use hasher for any scheme; MinHash variants take `hashes` outputs.
pub enum AnyHasher {
    MinHash(MinHasher),
    Oph(OphHasher),
}

impl AnyHasher {
    pub fn new(scheme: Scheme, dim: usize, bins: usize, hashes: usize, seed: u64) -> Result<Self> {
        Ok(match scheme {
            Scheme::Oph(s) => AnyHasher::Oph(OphHasher::from_seed(s, dim, bins, hashes, seed)?),
            mh => AnyHasher::MinHash(MinHasher::from_seed(
                mh.minhash(hashes).expect("minhash scheme"),
                dim,
                seed,
            )?),
        })
    }

    pub fn sketch(&self, v: &BinaryVector) -> Result<coph_core::Sketch> {
        match self {
            AnyHasher::MinHash(h) => h.sketch(v),
            AnyHasher::Oph(h) => h.sketch(v),
        }
    }
}
