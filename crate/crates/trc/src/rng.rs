//! Deterministic random streams. Reproducibility across platforms and runs
//! is contractual, so the generator is pinned to SplitMix64 with fixed
//! conversion rules rather than delegating to an external crate whose stream
//! could change between versions.

use crate::error::{Error, Result};
use crate::tensor::Mask;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform on (0, 1]: (top 53 bits + 1) / 2^53. Never returns 0, so it is
    /// safe inside a logarithm.
    pub fn next_f64(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) / 9007199254740992.0
    }

    /// Standard normal via Box-Muller, cosine branch only; consumes exactly
    /// two u64 per sample, no caching of the sine mate.
    pub fn next_normal(&mut self) -> f64 {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Random observation pattern with a fixed fraction of entries observed.
///
/// k = round(sr * numel) entries are chosen by a partial Fisher-Yates pass
/// over the linear (column-major) index space; the first k shuffled indices
/// are the observed set.
pub fn make_mask(dims: &[usize], sr: f64, seed: u64) -> Result<Mask> {
    if !(0.0..=1.0).contains(&sr) {
        return Err(Error::InvalidArgument(format!("sampling rate {sr} outside [0,1]")));
    }
    let total: usize = dims.iter().product();
    if total == 0 || dims.is_empty() {
        return Err(Error::InvalidArgument(format!("bad dims {dims:?}")));
    }
    let k = (sr * total as f64 + 0.5).floor() as usize;
    let k = k.min(total);
    let mut rng = SplitMix64::new(seed);
    let mut pool: Vec<usize> = (0..total).collect();
    for i in 0..k {
        let j = i + (rng.next_u64() % (total - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut flags = vec![false; total];
    for &lin in &pool[..k] {
        flags[lin] = true;
    }
    Mask::new(dims.to_vec(), flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_reproducible() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn uniform_in_half_open_interval() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!(u > 0.0 && u <= 1.0);
        }
    }

    #[test]
    fn mask_count_matches_rounded_fraction() {
        let m = make_mask(&[10, 10], 0.3, 1).unwrap();
        assert_eq!(m.count(), 30);
        let m = make_mask(&[3, 3], 0.5, 1).unwrap();
        assert_eq!(m.count(), 5); // round(4.5) -> floor(4.5+0.5) = 5
    }
}
