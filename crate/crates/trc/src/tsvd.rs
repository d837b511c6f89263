//! Tubal (t-SVD) algebra for 3-order tensors: DFT along mode 3, slicewise
//! SVD in the frequency domain, tubal nuclear norm, and its proximal map
//! (tubal singular value thresholding).
//!
//! Complex arithmetic stays inside this module; every public entry point
//! takes and returns real tensors except the DFT pair itself, whose complex
//! carrier type is defined here.

use crate::error::{Error, Result};
use crate::fft;
use crate::tensor::Tensor;
use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

type C = Complex<f64>;

/// Complex 3-order tensor, column-major like [`Tensor`].
#[derive(Debug, Clone)]
pub struct ComplexTensor {
    dims: Vec<usize>,
    data: Vec<C>,
}

impl ComplexTensor {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[C] {
        &self.data
    }

    fn frontal_slice(&self, k: usize) -> DMatrix<C> {
        let (i1, i2) = (self.dims[0], self.dims[1]);
        let s = i1 * i2;
        DMatrix::from_column_slice(i1, i2, &self.data[k * s..(k + 1) * s])
    }

    fn set_frontal_slice(&mut self, k: usize, m: &DMatrix<C>) {
        let s = self.dims[0] * self.dims[1];
        self.data[k * s..(k + 1) * s].copy_from_slice(m.as_slice());
    }
}

fn require_3(a: &Tensor) -> Result<()> {
    if a.order() != 3 {
        return Err(Error::DimMismatch(format!("want 3-order, got dims {:?}", a.dims())));
    }
    Ok(())
}

/// Unnormalized forward DFT along mode 3.
pub fn dft_mode3(a: &Tensor) -> Result<ComplexTensor> {
    require_3(a)?;
    let dims = a.dims().to_vec();
    let mut data: Vec<C> = a.data().iter().map(|&v| C::new(v, 0.0)).collect();
    fft::fft_axis(&dims, &mut data, 2, false);
    Ok(ComplexTensor { dims, data })
}

/// Inverse DFT along mode 3 (divides by I3), returning the real part.
pub fn idft_mode3(a: &ComplexTensor) -> Result<Tensor> {
    let mut data = a.data.clone();
    fft::fft_axis(&a.dims, &mut data, 2, true);
    Tensor::new(a.dims.clone(), data.iter().map(|c| c.re).collect())
}

/// Orthogonal factors and f-diagonal core of the tubal SVD, all real.
#[derive(Debug, Clone)]
pub struct TSvdTriple {
    pub u: Tensor,
    pub s: Tensor,
    pub v: Tensor,
}

struct SliceSvd {
    u: DMatrix<C>,
    sigma: Vec<f64>,
    v: DMatrix<C>,
}

/// Thin complex SVD with singular values sorted nonincreasing.
fn slice_svd(m: &DMatrix<C>) -> SliceSvd {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sigma: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = DMatrix::from_fn(u.nrows(), u.ncols(), |r, c| u[(r, order[c])]);
    let v = v_t.adjoint();
    let v_sorted = DMatrix::from_fn(v.nrows(), v.ncols(), |r, c| v[(r, order[c])]);
    SliceSvd { u: u_sorted, sigma, v: v_sorted }
}

/// Extend a matrix with orthonormal columns to a full square unitary by
/// appending an orthonormal basis of the complement (thin columns untouched,
/// so factor pairings survive).
fn complete_unitary(thin: &DMatrix<C>) -> DMatrix<C> {
    let (m, k) = (thin.nrows(), thin.ncols());
    if k == m {
        return thin.clone();
    }
    let mut aug = DMatrix::zeros(m, k + m);
    aug.view_mut((0, 0), (m, k)).copy_from(thin);
    for j in 0..m {
        aug[(j, k + j)] = C::new(1.0, 0.0);
    }
    let q = aug.qr().q();
    let mut full = DMatrix::zeros(m, m);
    full.view_mut((0, 0), (m, k)).copy_from(thin);
    full.view_mut((0, k), (m, m - k)).copy_from(&q.view((0, k), (m, m - k)));
    full
}

/// Tubal SVD: per-frequency-slice matrix SVD with conjugate-symmetric
/// completion, inverse-transformed back to real factors.
pub fn t_svd(a: &Tensor) -> Result<TSvdTriple> {
    require_3(a)?;
    if !a.is_finite() {
        return Err(Error::NonFinite("t_svd input".into()));
    }
    let (i1, i2, i3) = (a.dims()[0], a.dims()[1], a.dims()[2]);
    let af = dft_mode3(a)?;
    let mut uf = ComplexTensor { dims: vec![i1, i1, i3], data: vec![C::new(0.0, 0.0); i1 * i1 * i3] };
    let mut sf = ComplexTensor { dims: vec![i1, i2, i3], data: vec![C::new(0.0, 0.0); i1 * i2 * i3] };
    let mut vf = ComplexTensor { dims: vec![i2, i2, i3], data: vec![C::new(0.0, 0.0); i2 * i2 * i3] };
    let half = i3 / 2;
    let parts: Vec<SliceSvd> =
        (0..=half).into_par_iter().map(|k| slice_svd(&af.frontal_slice(k))).collect();
    for (k, p) in parts.iter().enumerate() {
        let us = complete_unitary(&p.u);
        let vs = complete_unitary(&p.v);
        let mut ss = DMatrix::zeros(i1, i2);
        for (i, &sv) in p.sigma.iter().enumerate() {
            ss[(i, i)] = C::new(sv, 0.0);
        }
        uf.set_frontal_slice(k, &us);
        sf.set_frontal_slice(k, &ss);
        vf.set_frontal_slice(k, &vs);
    }
    for k in half + 1..i3 {
        let m = i3 - k;
        for (dst, src) in [(&mut uf, m), (&mut sf, m), (&mut vf, m)] {
            let conj = dst.frontal_slice(src).map(|c| c.conj());
            dst.set_frontal_slice(k, &conj);
        }
    }
    Ok(TSvdTriple { u: idft_mode3(&uf)?, s: idft_mode3(&sf)?, v: idft_mode3(&vf)? })
}

/// Number of tubes of the f-diagonal core whose peak magnitude exceeds tol
/// (default 1e-8 times the largest tube magnitude).
pub fn tubal_rank(a: &Tensor, tol: Option<f64>) -> Result<usize> {
    require_3(a)?;
    let triple = t_svd(a)?;
    let (i1, i2, i3) = (a.dims()[0], a.dims()[1], a.dims()[2]);
    let r = i1.min(i2);
    let tube_max: Vec<f64> = (0..r)
        .map(|i| (0..i3).map(|k| triple.s.get(&[i, i, k]).abs()).fold(0.0, f64::max))
        .collect();
    let global = tube_max.iter().copied().fold(0.0, f64::max);
    let tol = tol.unwrap_or(1e-8 * global);
    Ok(tube_max.iter().filter(|&&m| m > tol).count())
}

/// Tubal nuclear norm: sum of singular values of every frequency slice,
/// with no normalization by I3.
pub fn tnn(a: &Tensor) -> Result<f64> {
    require_3(a)?;
    let i3 = a.dims()[2];
    let af = dft_mode3(a)?;
    let half = i3 / 2;
    let per: Vec<f64> = (0..=half)
        .into_par_iter()
        .map(|k| af.frontal_slice(k).singular_values().iter().sum::<f64>())
        .collect();
    let mut total = 0.0;
    for k in 0..i3 {
        total += per[k.min(i3 - k)];
    }
    Ok(total)
}

/// Scalar soft threshold sgn(x)·max(|x|−τ, 0); applied elementwise when a
/// tensor needs shrinking.
pub fn sth(x: f64, tau: f64) -> f64 {
    x.signum() * (x.abs() - tau).max(0.0)
}

/// Proximal map of the tubal nuclear norm: soft-threshold the singular
/// values of the frequency slices k = 0..⌊I3/2⌋, fill the rest by conjugate
/// symmetry, and transform back (imaginary residue vanishes by symmetry).
pub fn t_svt(l: &Tensor, tau: f64) -> Result<Tensor> {
    require_3(l)?;
    if tau < 0.0 {
        return Err(Error::InvalidArgument(format!("negative threshold {tau}")));
    }
    let i3 = l.dims()[2];
    let lf = dft_mode3(l)?;
    let half = i3 / 2;
    let shrunk: Vec<DMatrix<C>> = (0..=half)
        .into_par_iter()
        .map(|k| {
            let p = slice_svd(&lf.frontal_slice(k));
            let mut w = DMatrix::zeros(p.u.nrows(), p.v.nrows());
            for (i, &sv) in p.sigma.iter().enumerate() {
                let s2 = (sv - tau).max(0.0);
                if s2 > 0.0 {
                    let ui = p.u.column(i);
                    let vi = p.v.column(i);
                    for c in 0..w.ncols() {
                        let vc = vi[c].conj() * s2;
                        for r in 0..w.nrows() {
                            w[(r, c)] += ui[r] * vc;
                        }
                    }
                }
            }
            w
        })
        .collect();
    let mut wf = ComplexTensor { dims: lf.dims.clone(), data: vec![C::new(0.0, 0.0); lf.data.len()] };
    for (k, w) in shrunk.iter().enumerate() {
        wf.set_frontal_slice(k, w);
    }
    for k in half + 1..i3 {
        let conj = wf.frontal_slice(i3 - k).map(|c| c.conj());
        wf.set_frontal_slice(k, &conj);
    }
    idft_mode3(&wf)
}
