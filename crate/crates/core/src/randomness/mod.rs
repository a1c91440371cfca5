//! Seeded randomness: independent per-role streams, exact permutations with
//! circulant views, and the 2-universal hash family.

mod permutation;
mod seeds;
mod universal;

pub use permutation::{CirculantView, Permutation};
pub(crate) use seeds::splitmix64;
pub use seeds::{derive_seed, stream_rng, Role, StreamRng};
pub use universal::{floor_sum, is_prime, next_prime_above, TwoUniversalHash};
