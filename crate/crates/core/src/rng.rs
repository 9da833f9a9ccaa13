//! Deterministic partitioning of one master seed into independent streams.
//!
//! Every parallel work item (a batch of IID draws, one Markov chain, one
//! replication) gets its own ChaCha8 stream addressed by a path of integer
//! tags below the master seed. Results therefore depend only on the seed and
//! the partition, never on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedStream {
    master: u64,
    key: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedStream {
    pub fn new(master: u64) -> Self {
        Self { master, key: master }
    }

    /// The master seed this stream tree was created from.
    pub fn master(&self) -> u64 {
        self.master
    }

    /// Sub-tree addressed by `tag`. Distinct tags give unrelated keys.
    pub fn child(&self, tag: u64) -> Self {
        Self {
            master: self.master,
            key: splitmix64(self.key ^ splitmix64(tag.wrapping_add(0x5851_F42D_4C95_7F2D))),
        }
    }

    /// Generator for leaf `index` of this node.
    pub fn rng(&self, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.key);
        rng.set_stream(index);
        rng
    }
}
