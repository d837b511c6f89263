//! Weighted anisotropic total variation with periodic boundaries: the
//! forward-difference stack D(x), its adjoint, and the Fourier-domain solve
//! of (β₁I + β₂D*D)z = j, which is exact because circular differences make
//! D*D a (block) circulant operator.

use crate::error::{Error, Result};
use crate::fft;
use crate::tensor::Tensor;
use nalgebra::Complex;

/// Per-mode weighted circular differences of one tensor. Zero-weight modes
/// carry no component at all.
#[derive(Debug, Clone)]
pub struct DiffStack {
    dims: Vec<usize>,
    weights: Vec<f64>,
    components: Vec<Option<Tensor>>,
}

impl DiffStack {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[Option<Tensor>] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Option<Tensor>] {
        &mut self.components
    }

    /// Stack with the same active modes, all components zero.
    pub fn zeros_like(&self) -> DiffStack {
        DiffStack {
            dims: self.dims.clone(),
            weights: self.weights.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.as_ref().map(|t| Tensor::zeros(t.dims().to_vec())))
                .collect(),
        }
    }

    /// Frobenius norm over all stored components.
    pub fn norm(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .map(|c| {
                let n = c.frobenius_norm();
                n * n
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Entrywise l1 over all stored components (the TV value of the source).
    pub fn l1(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .map(|c| c.data().iter().map(|v| v.abs()).sum::<f64>())
            .sum()
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in 1..dims.len() {
        s[k] = s[k - 1] * dims[k - 1];
    }
    s
}

/// out(i) = w·(x(i) − x(i+1 circular along d)).
fn forward_diff(x: &Tensor, d: usize, w: f64) -> Tensor {
    let dims = x.dims();
    let len = dims[d];
    let stride = strides(dims)[d];
    let block = stride * len;
    let src = x.data();
    let mut out = vec![0.0; src.len()];
    for post in 0..src.len() / block {
        for pre in 0..stride {
            let base = pre + post * block;
            for j in 0..len {
                let here = base + j * stride;
                let next = base + ((j + 1) % len) * stride;
                out[here] = w * (src[here] - src[next]);
            }
        }
    }
    Tensor::new(dims.to_vec(), out).expect("same dims")
}

/// out(i) = w·(c(i) − c(i−1 circular along d)): the transpose of forward_diff.
fn backward_diff_into(acc: &mut Tensor, c: &Tensor, d: usize, w: f64) {
    let dims = c.dims().to_vec();
    let len = dims[d];
    let stride = strides(&dims)[d];
    let block = stride * len;
    let src = c.data();
    let out = acc.data_mut();
    for post in 0..src.len() / block {
        for pre in 0..stride {
            let base = pre + post * block;
            for j in 0..len {
                let here = base + j * stride;
                let prev = base + ((j + len - 1) % len) * stride;
                out[here] += w * (src[here] - src[prev]);
            }
        }
    }
}

/// Weighted forward circular difference along every mode with w_d ≠ 0.
pub fn apply_d(x: &Tensor, w: &[f64]) -> Result<DiffStack> {
    if w.len() != x.order() {
        return Err(Error::DimMismatch(format!(
            "{} weights for order {}",
            w.len(),
            x.order()
        )));
    }
    if w.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidArgument(format!("negative weight in {w:?}")));
    }
    let components = w
        .iter()
        .enumerate()
        .map(|(d, &wd)| if wd == 0.0 { None } else { Some(forward_diff(x, d, wd)) })
        .collect();
    Ok(DiffStack { dims: x.dims().to_vec(), weights: w.to_vec(), components })
}

/// Adjoint of `apply_d` under the entrywise inner product: weighted backward
/// circular differences, summed over active modes.
pub fn apply_d_adjoint(y: &DiffStack) -> Result<Tensor> {
    let mut out = Tensor::zeros(y.dims.clone());
    for (d, comp) in y.components.iter().enumerate() {
        let Some(c) = comp else { continue };
        if c.dims() != y.dims.as_slice() {
            return Err(Error::DimMismatch(format!(
                "component {d} dims {:?} vs stack dims {:?}",
                c.dims(),
                y.dims
            )));
        }
        backward_diff_into(&mut out, c, d, y.weights[d]);
    }
    Ok(out)
}

/// Fourier eigenvalues of D*D over the given dims.
#[derive(Debug, Clone)]
pub struct DtDSpectrum {
    dims: Vec<usize>,
    eig: Tensor,
}

impl DtDSpectrum {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn eig(&self) -> &Tensor {
        &self.eig
    }
}

/// eig(k₁,…,k_N) = Σ_d w_d²·(2 − 2cos(2πk_d/I_d)); zero at zero frequency.
pub fn dtd_spectrum(dims: &[usize], w: &[f64]) -> Result<DtDSpectrum> {
    if w.len() != dims.len() {
        return Err(Error::DimMismatch(format!("{} weights for {} dims", w.len(), dims.len())));
    }
    let dims_v = dims.to_vec();
    let eig = Tensor::from_fn(dims_v.clone(), |idx| {
        idx.iter()
            .zip(w)
            .zip(dims)
            .map(|((&k, &wd), &i)| {
                wd * wd * (2.0 - 2.0 * (std::f64::consts::TAU * k as f64 / i as f64).cos())
            })
            .sum()
    });
    Ok(DtDSpectrum { dims: dims_v, eig })
}

/// Unique solution of (β₁I + β₂D*D) z = j via the diagonalizing N-D DFT.
pub fn solve_z(j: &Tensor, beta1: f64, beta2: f64, spectrum: &DtDSpectrum) -> Result<Tensor> {
    if beta1 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "beta1 = {beta1}: operator is singular at the zero frequency"
        )));
    }
    if beta2 < 0.0 {
        return Err(Error::InvalidArgument(format!("beta2 = {beta2} negative")));
    }
    if j.dims() != spectrum.dims.as_slice() {
        return Err(Error::DimMismatch(format!(
            "rhs dims {:?} vs spectrum dims {:?}",
            j.dims(),
            spectrum.dims
        )));
    }
    let dims = j.dims().to_vec();
    let mut buf: Vec<Complex<f64>> = j.data().iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft::fftn(&dims, &mut buf);
    for (c, &e) in buf.iter_mut().zip(spectrum.eig.data()) {
        *c /= beta1 + beta2 * e;
    }
    fft::ifftn(&dims, &mut buf);
    Tensor::new(dims, buf.iter().map(|c| c.re).collect())
}
