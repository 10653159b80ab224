//! Counter-based random substreams.
//!
//! Every stochastic quantity draws from `substream(seed, id)`, where `id`
//! identifies the replicate/coordinate pair. Results therefore do not depend on
//! how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn substream(seed: u64, id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
