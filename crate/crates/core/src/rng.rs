//! Reproducible random streams.
//!
//! Every random draw in the library comes from a ChaCha stream keyed by a
//! master seed, a purpose tag and a list of indices (realization, trial,
//! restart, ...). Streams for different purposes never overlap, so e.g. the
//! payload noise of a realization does not change when the channel model does.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a random stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Placement,
    Channel,
    Estimation,
    Payload,
    Solver,
    RandomBaseline,
    Bootstrap,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Placement => 0x706c_6163,
            Purpose::Channel => 0x6368_616e,
            Purpose::Estimation => 0x6573_7469,
            Purpose::Payload => 0x7061_796c,
            Purpose::Solver => 0x736f_6c76,
            Purpose::RandomBaseline => 0x7261_6e64,
            Purpose::Bootstrap => 0x626f_6f74,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed, a purpose and indices into a single 64-bit key.
pub fn derive_seed(master: u64, purpose: Purpose, indices: &[u64]) -> u64 {
    let mut state = master ^ purpose.tag().rotate_left(17);
    let mut key = splitmix64(&mut state);
    for &i in indices {
        state ^= i.wrapping_add(key);
        key = splitmix64(&mut state);
    }
    key
}

/// Returns the random stream for `(master, purpose, indices)`.
pub fn stream(master: u64, purpose: Purpose, indices: &[u64]) -> ChaCha8Rng {
    let mut state = derive_seed(master, purpose, indices);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
