//! Internal FFT plumbing over column-major complex buffers. Forward
//! transforms are unnormalized; inverse transforms divide by the axis length,
//! so inverse∘forward is the identity. All lane loops are serial: rustfft is
//! deterministic and these passes are far from the hot path.

use nalgebra::Complex;
use rustfft::FftPlanner;

type C = Complex<f64>;

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in 1..dims.len() {
        s[k] = s[k - 1] * dims[k - 1];
    }
    s
}

/// In-place DFT along one axis of a column-major buffer.
pub(crate) fn fft_axis(dims: &[usize], data: &mut [C], axis: usize, inverse: bool) {
    let len = dims[axis];
    if len == 1 {
        return;
    }
    let stride = strides(dims)[axis];
    let numel: usize = dims.iter().product();
    debug_assert_eq!(data.len(), numel);
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
    let mut lane = vec![C::new(0.0, 0.0); len];
    let mut scratch = vec![C::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let block = stride * len;
    let scale = 1.0 / len as f64;
    for post in 0..numel / block {
        for pre in 0..stride {
            let base = pre + post * block;
            for j in 0..len {
                lane[j] = data[base + j * stride];
            }
            fft.process_with_scratch(&mut lane, &mut scratch);
            if inverse {
                for j in 0..len {
                    data[base + j * stride] = lane[j] * scale;
                }
            } else {
                for j in 0..len {
                    data[base + j * stride] = lane[j];
                }
            }
        }
    }
}

/// Forward DFT over every axis.
pub(crate) fn fftn(dims: &[usize], data: &mut [C]) {
    for axis in 0..dims.len() {
        fft_axis(dims, data, axis, false);
    }
}

/// Inverse DFT over every axis (normalized).
pub(crate) fn ifftn(dims: &[usize], data: &mut [C]) {
    for axis in 0..dims.len() {
        fft_axis(dims, data, axis, true);
    }
}
