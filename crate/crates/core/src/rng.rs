//! Counter-based random streams.
//!
//! A [`StreamKey`] is derived from a seed and any number of indices (sample
//! number, site ordinal, ...). Draws are pure functions of `(key, counter)`,
//! so a site's neighbor choice does not depend on the order in which an
//! exploration touches it, and Monte Carlo results do not depend on how
//! samples are split across threads. The mixing function is the SplitMix64
//! finalizer.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        StreamKey(splitmix64(seed ^ 0x5157_1E5E_ED00_0001))
    }

    /// Independent child stream for `index`.
    #[inline]
    pub fn substream(self, index: u64) -> Self {
        StreamKey(splitmix64(self.0 ^ splitmix64(index ^ 0xA5A5_5A5A_C3C3_3C3C)))
    }

    #[inline]
    pub fn draw(self, counter: u64) -> u64 {
        splitmix64(self.0.wrapping_add(counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(self, counter: u64) -> f64 {
        (self.draw(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// A child seed for the `index`-th derived job (scan point, bisection step, ...).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    StreamKey::new(seed).substream(index).draw(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_pure_functions() {
        let key = StreamKey::new(7).substream(3);
        assert_eq!(key.draw(11), StreamKey::new(7).substream(3).draw(11));
        assert_ne!(key.draw(11), key.draw(12));
        assert_ne!(StreamKey::new(7).substream(4).draw(11), key.draw(11));
    }

    #[test]
    fn uniform_moments() {
        let key = StreamKey::new(1);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|i| key.uniform(i)).collect();
        assert!(xs.iter().all(|&x| (0.0..1.0).contains(&x)));
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005);
        assert!((var - 1.0 / 12.0).abs() < 0.002);
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
