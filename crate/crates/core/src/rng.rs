//! Portable seeded random number generation.
//!
//! Reproducibility of every sampler in this crate (Gibbs sweeps, t-SNE
//! initialisation, optimizer restarts, simulators) rests on a fixed,
//! fully-specified generator rather than whatever a toolkit ships: the
//! state is xoshiro256** seeded through SplitMix64, both public-domain
//! algorithms with stable cross-platform output. `split` derives
//! statistically independent child streams from a parent seed, so e.g.
//! every candidate model in a grid search gets its own deterministic
//! stream regardless of evaluation order.

/// xoshiro256** generator with SplitMix64 seeding.
#[derive(Clone, Debug)]
pub struct Rng {
    s: [u64; 4],
    cached_normal: Option<f64>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Rng {
            s,
            cached_normal: None,
        }
    }

    /// Derives an independent child stream. Children with distinct ids are
    /// decorrelated from each other and from the parent's own output.
    pub fn split(&self, stream: u64) -> Rng {
        // Mix the parent seed material with the stream id through SplitMix64.
        let mut sm = self.s[0] ^ stream.wrapping_mul(0xa076_1d64_78bd_642f);
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Rng {
            s,
            cached_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1]
            .wrapping_mul(5)
            .rotate_left(7)
            .wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n). Debiased by rejection on the top range.
    pub fn next_below(&mut self, n: usize) -> usize {
        assert!(n > 0, "next_below: empty range");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return (v % n) as usize;
            }
        }
    }

    /// Standard normal draw via Box-Muller (consumes two uniforms per pair).
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        // Guard against ln(0).
        let u1 = loop {
            let u = self.next_f64();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.next_f64();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        self.cached_normal = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i + 1);
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut a = Rng::from_seed(20);
        let mut b = Rng::from_seed(20);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn split_streams_differ_from_parent_and_each_other() {
        let parent = Rng::from_seed(7);
        let seq = |mut r: Rng| (0..8).map(|_| r.next_u64()).collect::<Vec<_>>();
        let p = seq(parent.clone());
        let c0 = seq(parent.split(0));
        let c1 = seq(parent.split(1));
        assert_ne!(p, c0);
        assert_ne!(c0, c1);
        // Splitting is a pure function of the parent seed and stream id.
        assert_eq!(seq(parent.split(1)), c1);
    }

    #[test]
    fn uniform_and_normal_moments_are_sane() {
        let mut rng = Rng::from_seed(99);
        let n = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z = rng.next_normal();
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.03, "normal mean drifted: {mean}");
        assert!((var - 1.0).abs() < 0.05, "normal variance drifted: {var}");
    }

    #[test]
    fn next_below_stays_in_range_and_covers() {
        let mut rng = Rng::from_seed(3);
        let mut seen = [false; 7];
        for _ in 0..500 {
            seen[rng.next_below(7)] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
