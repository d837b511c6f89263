//! Dense N-order tensor in column-major layout (first index varies fastest),
//! with the standard and circular mode unfoldings plus circular permutation.
//!
//! Every other module builds on this type. Modes are 0-based in code; the
//! docs' 1-based mode n corresponds to `n-1` here.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument(format!("bad dims {dims:?}")));
        }
        let n: usize = dims.iter().product();
        if data.len() != n {
            return Err(Error::DimMismatch(format!(
                "data length {} does not match dims {:?}",
                data.len(),
                dims
            )));
        }
        Ok(Tensor { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Tensor { dims, data: vec![0.0; n] }
    }

    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Tensor::zeros(dims);
        let mut idx = vec![0usize; t.order()];
        for i in 0..t.numel() {
            t.data[i] = f(&idx);
            t.advance(&mut idx);
        }
        t
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Column-major strides: stride of mode 0 is 1.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.dims.len()];
        for k in 1..self.dims.len() {
            s[k] = s[k - 1] * self.dims[k - 1];
        }
        s
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut lin = 0usize;
        let mut stride = 1usize;
        for (k, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.dims[k]);
            lin += i * stride;
            stride *= self.dims[k];
        }
        lin
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let lin = self.linear_index(idx);
        self.data[lin] = v;
    }

    /// Advance a multi-index in column-major enumeration order.
    fn advance(&self, idx: &mut [usize]) {
        for k in 0..idx.len() {
            idx[k] += 1;
            if idx[k] < self.dims[k] {
                return;
            }
            idx[k] = 0;
        }
    }

    /// Reinterpret the same buffer under new dims (column-major reshape).
    pub fn reshape(self, dims: Vec<usize>) -> Result<Self> {
        Tensor::new(dims, self.data)
    }

    /// General mode permutation: output mode k is input mode `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Tensor {
        debug_assert_eq!(perm.len(), self.dims.len());
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return self.clone();
        }
        let in_strides = self.strides();
        let out_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let map: Vec<usize> = perm.iter().map(|&p| in_strides[p]).collect();
        let mut out = vec![0.0; self.numel()];
        let mut idx = vec![0usize; out_dims.len()];
        let mut src = 0usize;
        for slot in out.iter_mut() {
            *slot = self.data[src];
            // increment the output multi-index, tracking the source offset
            for k in 0..idx.len() {
                idx[k] += 1;
                src += map[k];
                if idx[k] < out_dims[k] {
                    break;
                }
                src -= out_dims[k] * map[k];
                idx[k] = 0;
            }
        }
        Tensor { dims: out_dims, data: out }
    }

    /// Circular permutation starting at mode k: dims become
    /// [I_k, .., I_{N-1}, I_0, .., I_{k-1}].
    pub fn permute_circular(&self, k: usize) -> Result<Tensor> {
        let n = self.order();
        if k >= n {
            return Err(Error::InvalidArgument(format!("mode {k} out of range for order {n}")));
        }
        let perm: Vec<usize> = (0..n).map(|j| (k + j) % n).collect();
        Ok(self.permute(&perm))
    }

    /// Mode-n unfolding with remaining modes in their original order.
    pub fn unfold_standard(&self, n: usize) -> Result<DMatrix<f64>> {
        let order = self.standard_order(n)?;
        Ok(self.unfold_with_order(&order))
    }

    /// Mode-n unfolding with remaining modes in circular order n+1,..,n-1.
    pub fn unfold_circular(&self, n: usize) -> Result<DMatrix<f64>> {
        let order = self.circular_order(n)?;
        Ok(self.unfold_with_order(&order))
    }

    fn standard_order(&self, n: usize) -> Result<Vec<usize>> {
        if n >= self.order() {
            return Err(Error::InvalidArgument(format!(
                "mode {n} out of range for order {}",
                self.order()
            )));
        }
        let mut order = vec![n];
        order.extend((0..self.order()).filter(|&m| m != n));
        Ok(order)
    }

    fn circular_order(&self, n: usize) -> Result<Vec<usize>> {
        if n >= self.order() {
            return Err(Error::InvalidArgument(format!(
                "mode {n} out of range for order {}",
                self.order()
            )));
        }
        let nn = self.order();
        Ok((0..nn).map(|j| (n + j) % nn).collect())
    }

    fn unfold_with_order(&self, order: &[usize]) -> DMatrix<f64> {
        let p = self.permute(order);
        let rows = p.dims[0];
        let cols = p.numel() / rows;
        DMatrix::from_vec(rows, cols, p.data)
    }

    /// Inverse of `unfold_standard`.
    pub fn fold_standard(mat: &DMatrix<f64>, dims: &[usize], n: usize) -> Result<Tensor> {
        let probe = Tensor::zeros(dims.to_vec());
        let order = probe.standard_order(n)?;
        Self::fold_with_order(mat, dims, &order)
    }

    /// Inverse of `unfold_circular`.
    pub fn fold_circular(mat: &DMatrix<f64>, dims: &[usize], n: usize) -> Result<Tensor> {
        let probe = Tensor::zeros(dims.to_vec());
        let order = probe.circular_order(n)?;
        Self::fold_with_order(mat, dims, &order)
    }

    fn fold_with_order(mat: &DMatrix<f64>, dims: &[usize], order: &[usize]) -> Result<Tensor> {
        let perm_dims: Vec<usize> = order.iter().map(|&m| dims[m]).collect();
        let numel: usize = dims.iter().product();
        if mat.len() != numel || mat.nrows() != perm_dims[0] {
            return Err(Error::DimMismatch(format!(
                "matrix {}x{} does not fold into {:?}",
                mat.nrows(),
                mat.ncols(),
                dims
            )));
        }
        let permuted = Tensor { dims: perm_dims, data: mat.as_slice().to_vec() };
        // invert the permutation
        let mut inv = vec![0usize; order.len()];
        for (k, &m) in order.iter().enumerate() {
            inv[m] = k;
        }
        Ok(permuted.permute(&inv))
    }

    pub fn frobenius_norm(&self) -> f64 {
        inner_product_unchecked(self, self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    /// self += c * other (dims must agree).
    pub fn axpy(&mut self, c: f64, other: &Tensor) {
        debug_assert_eq!(self.dims, other.dims);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        debug_assert_eq!(self.dims, other.dims);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Tensor { dims: self.dims.clone(), data }
    }
}

pub fn inner_product(a: &Tensor, b: &Tensor) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::DimMismatch(format!("{:?} vs {:?}", a.dims(), b.dims())));
    }
    Ok(inner_product_unchecked(a, b))
}

fn inner_product_unchecked(a: &Tensor, b: &Tensor) -> f64 {
    // serial sum in linear order: frobenius_norm is contractually the sqrt of
    // this exact summation, and determinism across thread counts matters
    a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum()
}

/// Boolean observation pattern over a tensor's entries, same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    dims: Vec<usize>,
    flags: Vec<bool>,
    count: usize,
}

impl Mask {
    pub fn new(dims: Vec<usize>, flags: Vec<bool>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if flags.len() != n || dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::DimMismatch(format!(
                "flags length {} vs dims {:?}",
                flags.len(),
                dims
            )));
        }
        let count = flags.iter().filter(|&&f| f).count();
        Ok(Mask { dims, flags, count })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_observed(&self, lin: usize) -> bool {
        self.flags[lin]
    }

    /// Zero-fill: keep observed entries of t, zero elsewhere.
    pub fn zero_fill(&self, t: &Tensor) -> Result<Tensor> {
        if t.dims() != self.dims() {
            return Err(Error::DimMismatch(format!("{:?} vs {:?}", t.dims(), self.dims())));
        }
        let data = t
            .data()
            .iter()
            .zip(&self.flags)
            .map(|(&v, &f)| if f { v } else { 0.0 })
            .collect();
        Ok(Tensor { dims: self.dims.clone(), data })
    }
}
