//! Counter-based random number generation.
//!
//! Every draw is a pure function of `(seed, stream, counter)`, so trajectories
//! and trials can be generated concurrently in any order and still reproduce
//! bit-identically. The construction is frozen (golden tests pin its exact
//! output) and is documented here in full:
//!
//! * `mix(z)` is the splitmix64 finalizer:
//!   `z ^= z >> 30; z *= 0xbf58476d1ce4e5b9; z ^= z >> 27;
//!    z *= 0x94d049bb133111eb; z ^= z >> 31` (wrapping arithmetic).
//! * The stream key is
//!   `mix(mix(seed + 0x9e3779b97f4a7c15) ^ (stream * 0xbf58476d1ce4e5b9 + 0x94d049bb133111eb))`.
//! * The word at counter `c` is `mix(key + c * 0x9e3779b97f4a7c15)`, i.e. the
//!   splitmix64 output sequence for the key, addressed randomly.
//! * Uniforms take the top 53 bits, centered:
//!   `u = ((word >> 11) + 0.5) * 2^-53`, which lies strictly inside `(0, 1)`.
//! * Standard normals use the Box-Muller cosine branch: normal index `i`
//!   consumes uniform counters `2i` and `2i + 1` and returns
//!   `sqrt(-2 ln u1) * cos(2 pi u2)`. The sine partner is discarded so that
//!   the counter layout stays independent of evaluation order.

const GOLDEN: u64 = 0x9e3779b97f4a7c15;
const MIX_A: u64 = 0xbf58476d1ce4e5b9;
const MIX_B: u64 = 0x94d049bb133111eb;

#[inline]
fn mix(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(MIX_A);
    z ^= z >> 27;
    z = z.wrapping_mul(MIX_B);
    z ^ (z >> 31)
}

/// A keyed, stateless generator: draws are addressed by counter.
#[derive(Clone, Copy, Debug)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let k = mix(seed.wrapping_add(GOLDEN));
        let key = mix(k ^ stream.wrapping_mul(MIX_A).wrapping_add(MIX_B));
        CounterRng { key }
    }

    /// Raw word at `counter`.
    #[inline]
    pub fn u64_at(&self, counter: u64) -> u64 {
        mix(self.key.wrapping_add(counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw in the open interval (0, 1) at `counter`.
    #[inline]
    pub fn uniform_at(&self, counter: u64) -> f64 {
        ((self.u64_at(counter) >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// Standard normal draw at normal index `i` (consumes counters 2i, 2i+1).
    #[inline]
    pub fn normal_at(&self, i: u64) -> f64 {
        let u1 = self.uniform_at(2 * i);
        let u2 = self.uniform_at(2 * i + 1);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Stream carrying the latent process noise `e`.
pub const STREAM_PROCESS_NOISE: u64 = 0;
/// Stream carrying the measurement noise.
pub const STREAM_MEASUREMENT_NOISE: u64 = 1;
/// Stream from which per-trial seeds are derived.
pub const STREAM_TRIAL_SEEDS: u64 = 2;

/// Seed for trial `trial` of a multi-trial run keyed by `master_seed`.
///
/// Independent of execution order, so trials may run in parallel.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    CounterRng::new(master_seed, STREAM_TRIAL_SEEDS).u64_at(trial)
}
