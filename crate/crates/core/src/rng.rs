//! Seeded, addressable random streams.
//!
//! Every random draw in the crate comes from an [`RngStream`]. A stream is a
//! ChaCha8 keystream: the 256-bit key is expanded from the 64-bit run seed,
//! the 64-bit ChaCha nonce carries the stream id, and the block counter is
//! split into 2³² lanes of 2³⁶ words each. Any `(seed, stream_id, lane)`
//! triple can therefore be opened directly, in any order and on any thread,
//! without skipping through other streams.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LANE_SHIFT: u32 = 36;

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

/// Opens stream `stream_id` of the run seeded with `seed`, at lane 0.
pub fn rng_substream(seed: u64, stream_id: u64) -> RngStream {
    RngStream::new(seed, stream_id, 0)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64, lane: u32) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        if lane != 0 {
            inner.set_word_pos(u128::from(lane) << LANE_SHIFT);
        }
        Self { inner }
    }

    pub fn stream_id(&self) -> u64 {
        self.inner.get_stream()
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
