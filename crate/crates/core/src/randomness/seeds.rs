use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator behind every random draw in the crate.
pub type StreamRng = ChaCha8Rng;

/// Named purposes for which independent streams are derived from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    /// Initial permutation / bin split.
    Sigma = 1,
    /// Circulant base permutation.
    Pi = 2,
    /// Independent per-slot permutations (standard MinHash, ReDen).
    SlotPermutation = 3,
    /// Densification donor candidates.
    Donor = 4,
    /// Uniform-random bin scan order.
    Scan = 5,
    /// Per-trial master seeds.
    Trial = 6,
    /// 2-universal hash parameters.
    Hash = 7,
    /// Synthetic pair placement.
    Pair = 8,
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of stream `index` of `role` under `seed`.
///
/// Distinct `(role, index)` pairs give statistically independent streams.
pub fn derive_seed(seed: u64, role: Role, index: u64) -> u64 {
    let h = splitmix64(seed ^ splitmix64(role as u64));
    splitmix64(h ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

pub fn stream_rng(seed: u64, role: Role, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, role, index))
}
