//! Deterministic synthetic test data: a smooth low-frequency RGB image, a
//! hyperspectral-style cube built from a small spectral mixing model, and
//! unit-norm tensors with exact tensor-ring structure.

use crate::error::Result;
use crate::tensor::Tensor;
use crate::tr::{random_chain, tr_reconstruct};
use std::f64::consts::TAU;

/// Smooth H×W×3 image: per channel a mixture of three low-frequency plane
/// waves with channel-dependent phases, affinely mapped to [0, 255].
pub fn sinusoid_image(h: usize, w: usize) -> Tensor {
    const FREQS: [(f64, f64); 3] = [(1.0, 1.0), (1.0, -1.0), (0.5, 1.5)];
    const PHASES: [f64; 3] = [0.7, 1.3, 2.1];
    Tensor::from_fn(vec![h, w, 3], |idx| {
        let u = idx[0] as f64 / h as f64;
        let v = idx[1] as f64 / w as f64;
        let c = (idx[2] + 1) as f64;
        let mix: f64 = FREQS
            .iter()
            .zip(PHASES)
            .map(|(&(fu, fv), ph)| (TAU * (fu * u + fv * v) + ph * c).sin())
            .sum();
        127.5 + 42.5 * mix
    })
}

/// Hyperspectral-style H×W×B cube: eleven endmembers with slowly varying
/// spectra (≤ 1.2 cycles across the band range, so adjacent bands stay close,
/// as in real spectrometer data) and smooth abundance fields — four broad and
/// six fine Gaussian bumps plus one sinusoidal field — normalized so the
/// global peak is exactly 1.
pub fn hsi_cube(h: usize, w: usize, bands: usize) -> Tensor {
    const CENTERS: [(f64, f64, f64); 10] = [
        (0.3, 0.3, 0.18),
        (0.7, 0.4, 0.22),
        (0.5, 0.8, 0.20),
        (0.2, 0.7, 0.16),
        (0.15, 0.2, 0.07),
        (0.55, 0.25, 0.06),
        (0.8, 0.65, 0.08),
        (0.35, 0.55, 0.05),
        (0.65, 0.85, 0.06),
        (0.85, 0.15, 0.05),
    ];
    const SPEC_FREQ: [f64; 11] = [0.4, 0.8, 1.2, 0.6, 1.0, 0.5, 0.9, 1.1, 0.7, 0.3, 0.45];
    let spectrum = |e: usize, b: usize| -> f64 {
        0.5 + 0.5 * (TAU * SPEC_FREQ[e] * b as f64 / bands as f64 + 0.9 * e as f64).sin()
    };
    let mut t = Tensor::from_fn(vec![h, w, bands], |idx| {
        let u = idx[0] as f64 / h as f64;
        let v = idx[1] as f64 / w as f64;
        let b = idx[2];
        let mut val = 0.0;
        for (e, &(cx, cy, sg)) in CENTERS.iter().enumerate() {
            let a = (-((u - cx) * (u - cx) + (v - cy) * (v - cy)) / (2.0 * sg * sg)).exp();
            val += a * spectrum(e, b);
        }
        let a10 = 0.5 + 0.5 * (TAU * u).sin() * (TAU * v).cos();
        val + a10 * spectrum(CENTERS.len(), b)
    });
    let peak = t.data().iter().copied().fold(0.0, f64::max);
    t.scale(1.0 / peak);
    t
}

/// ℱ(random_chain(dims, ranks, seed)) scaled to unit Frobenius norm.
pub fn unit_chain_tensor(dims: &[usize], ranks: &[usize], seed: u64) -> Result<Tensor> {
    let chain = random_chain(dims, ranks, seed)?;
    let mut t = tr_reconstruct(&chain)?;
    let norm = t.frobenius_norm();
    if norm > 0.0 {
        t.scale(1.0 / norm);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_range_covers_peak() {
        let t = sinusoid_image(64, 64);
        let lo = t.data().iter().copied().fold(f64::INFINITY, f64::min);
        let hi = t.data().iter().copied().fold(0.0, f64::max);
        assert!(lo >= 0.0 && hi <= 255.0);
        assert!(hi > 200.0, "peak {hi} too low for a peak-255 image");
    }

    #[test]
    fn cube_peak_is_one() {
        let t = hsi_cube(20, 20, 8);
        let hi = t.data().iter().copied().fold(0.0, f64::max);
        assert!((hi - 1.0).abs() < 1e-15);
        assert!(t.data().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn chain_tensor_unit_norm() {
        let t = unit_chain_tensor(&[8, 8, 8, 8], &[2, 2, 2, 2], 11).unwrap();
        assert!((t.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    // Frozen spot values so the generators stay pinned: solver calibrations
    // depend on these exact tensors, not just on their general shape.
    #[test]
    fn image_frozen_values() {
        let t = sinusoid_image(64, 64);
        assert!((t.get(&[0, 0, 0]) - 232.51687267040973).abs() < 1e-10);
        assert!((t.get(&[10, 20, 1]) - 171.77988930140387).abs() < 1e-10);
        assert!((t.get(&[63, 63, 2]) - 130.84796101971162).abs() < 1e-10);
        let sum: f64 = t.data().iter().sum();
        assert!((sum - 1566533.0597073375).abs() < 1e-4);
    }

    #[test]
    fn cube_frozen_values() {
        let t = hsi_cube(145, 145, 30);
        assert!((t.get(&[0, 0, 0]) - 0.1958219832160665).abs() < 1e-13);
        assert!((t.get(&[72, 100, 15]) - 0.17419557552177772).abs() < 1e-13);
        assert!((t.get(&[144, 10, 29]) - 0.049245886071000215).abs() < 1e-13);
        let sum: f64 = t.data().iter().sum();
        assert!((sum - 199397.78744008765).abs() < 1e-5);
    }
}
