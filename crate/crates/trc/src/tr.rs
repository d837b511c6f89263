//! Tensor-ring chains: a cyclic sequence of 3-order cores G_n of shape
//! (R_{n-1}, I_n, R_n) representing an N-order tensor entrywise as
//! X(i_1,..,i_N) = Trace( G_1(:,i_1,:) · .. · G_N(:,i_N,:) ).
//!
//! Bond ranks are indexed by the bond *after* each core: `ranks()[n]` is R_n,
//! and the chain closes circularly (R_0 = ranks()[N-1]).

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::tensor::Tensor;
use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct TRChain {
    cores: Vec<Tensor>,
}

impl TRChain {
    pub fn new(cores: Vec<Tensor>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::InvalidArgument("chain needs at least one core".into()));
        }
        for c in &cores {
            if c.order() != 3 {
                return Err(Error::DimMismatch(format!("core dims {:?}, want 3-order", c.dims())));
            }
        }
        let n = cores.len();
        for i in 0..n {
            let right = cores[i].dims()[2];
            let left_next = cores[(i + 1) % n].dims()[0];
            if right != left_next {
                return Err(Error::DimMismatch(format!(
                    "bond {} mismatch: {} vs {}",
                    i, right, left_next
                )));
            }
        }
        Ok(TRChain { cores })
    }

    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }

    pub fn cores(&self) -> &[Tensor] {
        &self.cores
    }

    pub fn cores_mut(&mut self) -> &mut [Tensor] {
        &mut self.cores
    }

    pub fn into_cores(self) -> Vec<Tensor> {
        self.cores
    }

    pub fn core(&self, n: usize) -> &Tensor {
        &self.cores[n]
    }

    /// Mode sizes I_1..I_N of the represented tensor.
    pub fn dims(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dims()[1]).collect()
    }

    /// Bond ranks; `ranks()[n]` is the bond between core n and core n+1.
    pub fn ranks(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dims()[2]).collect()
    }
}

/// The lateral slice G_n(:, i, :) as a matrix.
fn core_slice(core: &Tensor, i: usize) -> DMatrix<f64> {
    let (r0, r1) = (core.dims()[0], core.dims()[2]);
    DMatrix::from_fn(r0, r1, |a, b| core.get(&[a, i, b]))
}

/// Single entry by direct trace of the slice product. O(N R^3) per entry;
/// this is the reference against which the bulk path is tested.
pub fn tr_element(chain: &TRChain, idx: &[usize]) -> Result<f64> {
    if idx.len() != chain.len() {
        return Err(Error::DimMismatch(format!(
            "index length {} vs order {}",
            idx.len(),
            chain.len()
        )));
    }
    let mut p = core_slice(chain.core(0), idx[0]);
    for n in 1..chain.len() {
        p *= core_slice(chain.core(n), idx[n]);
    }
    Ok(p.trace())
}

/// Merge two adjacent cores: (p, a, t) x (t, b, q) -> (p, a*b, q), where the
/// merged middle index runs a fastest. One matrix product does the whole
/// contraction because both reshapes are free in column-major layout.
pub fn tensor_connect_product(g: &Tensor, h: &Tensor) -> Result<Tensor> {
    if g.order() != 3 || h.order() != 3 {
        return Err(Error::DimMismatch("connect product needs 3-order cores".into()));
    }
    let (p, a, t) = (g.dims()[0], g.dims()[1], g.dims()[2]);
    let (t2, b, q) = (h.dims()[0], h.dims()[1], h.dims()[2]);
    if t != t2 {
        return Err(Error::DimMismatch(format!("inner bond {t} vs {t2}")));
    }
    let gm = DMatrix::from_column_slice(p * a, t, g.data());
    let hm = DMatrix::from_column_slice(t, b * q, h.data());
    let prod = gm * hm;
    Tensor::new(vec![p, a * b, q], prod.as_slice().to_vec())
}

/// Matrix of the subchain skipping core n: rows run over all modes except n
/// (in circular order n+1,..,n-1, earliest fastest), columns over the rank
/// pair (R_n fastest, R_{n-1} slower). Satisfies
/// `unfold_circular(X, n) = core_unfold_2(G_n) * S^T`.
pub fn subchain_matrix(chain: &TRChain, n: usize) -> Result<DMatrix<f64>> {
    let nn = chain.len();
    if n >= nn {
        return Err(Error::InvalidArgument(format!("core {n} out of range for {nn}")));
    }
    if nn < 2 {
        return Err(Error::InvalidArgument("subchain of a single-core chain is empty".into()));
    }
    let mut h = chain.core((n + 1) % nn).clone();
    for step in 2..nn {
        h = tensor_connect_product(&h, chain.core((n + step) % nn))?;
    }
    let ht = h.permute(&[2, 1, 0]);
    ht.unfold_circular(1)
}

/// Mode-2 circular unfolding of a core: rows I_n, columns (R_n, R_{n-1})
/// with R_n fastest. This is the orientation `subchain_matrix` binds to.
pub fn core_unfold_2(core: &Tensor) -> Result<DMatrix<f64>> {
    core.unfold_circular(1)
}

/// Inverse of `core_unfold_2` for a core of the given shape.
pub fn core_fold_2(mat: &DMatrix<f64>, shape: &[usize; 3]) -> Result<Tensor> {
    Tensor::fold_circular(mat, shape, 1)
}

/// Dense tensor represented by the chain. Cost is linear in the number of
/// output entries: the trace contraction is fused into one matrix product
/// against the mode-1 subchain, never materializing the R_0 x prod(I) x R_0
/// intermediate.
pub fn tr_reconstruct(chain: &TRChain) -> Result<Tensor> {
    let dims = chain.dims();
    if chain.len() == 1 {
        let core = chain.core(0);
        let (r, i1) = (core.dims()[0], core.dims()[1]);
        let mut data = vec![0.0; i1];
        for (i, slot) in data.iter_mut().enumerate() {
            let mut tr = 0.0;
            for a in 0..r {
                tr += core.get(&[a, i, a]);
            }
            *slot = tr;
        }
        return Tensor::new(dims, data);
    }
    let s = subchain_matrix(chain, 0)?;
    let x1 = core_unfold_2(chain.core(0))? * s.transpose();
    Tensor::fold_circular(&x1, &dims, 0)
}

/// Rotate the chain left by k cores; represents the circular permutation of
/// the underlying tensor starting at mode k.
pub fn chain_shift(chain: &TRChain, k: usize) -> Result<TRChain> {
    let n = chain.len();
    if k >= n {
        return Err(Error::InvalidArgument(format!("shift {k} out of range for {n}")));
    }
    let mut cores = Vec::with_capacity(n);
    for j in 0..n {
        cores.push(chain.core((k + j) % n).clone());
    }
    TRChain::new(cores)
}

/// Chain with i.i.d. standard-normal core entries from a single seeded
/// stream: cores in order, each filled in column-major entry order.
pub fn random_chain(dims: &[usize], ranks: &[usize], seed: u64) -> Result<TRChain> {
    if dims.len() != ranks.len() {
        return Err(Error::DimMismatch(format!(
            "{} dims vs {} ranks",
            dims.len(),
            ranks.len()
        )));
    }
    if ranks.iter().any(|&r| r == 0) {
        return Err(Error::InvalidArgument("ranks must be positive".into()));
    }
    let n = dims.len();
    let mut rng = SplitMix64::new(seed);
    let mut cores = Vec::with_capacity(n);
    for i in 0..n {
        let r0 = ranks[(i + n - 1) % n];
        let r1 = ranks[i];
        let len = r0 * dims[i] * r1;
        let data: Vec<f64> = (0..len).map(|_| rng.next_normal()).collect();
        cores.push(Tensor::new(vec![r0, dims[i], r1], data)?);
    }
    TRChain::new(cores)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstruct_matches_elementwise_trace() {
        let chain = random_chain(&[2, 3, 4], &[2, 3, 2], 5).unwrap();
        let x = tr_reconstruct(&chain).unwrap();
        for idx in [[0, 0, 0], [1, 2, 3], [0, 1, 2]] {
            let e = tr_element(&chain, &idx).unwrap();
            assert!((x.get(&idx) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn subchain_binds_every_mode() {
        let chain = random_chain(&[2, 3, 4], &[2, 3, 2], 5).unwrap();
        let x = tr_reconstruct(&chain).unwrap();
        for n in 0..3 {
            let s = subchain_matrix(&chain, n).unwrap();
            let lhs = x.unfold_circular(n).unwrap();
            let rhs = core_unfold_2(chain.core(n)).unwrap() * s.transpose();
            assert!((lhs - rhs).abs().max() < 1e-12);
        }
    }

    #[test]
    fn single_core_chain_traces_slices() {
        let chain = random_chain(&[5], &[3], 2).unwrap();
        let x = tr_reconstruct(&chain).unwrap();
        for i in 0..5 {
            let e = tr_element(&chain, &[i]).unwrap();
            assert!((x.get(&[i]) - e).abs() < 1e-14);
        }
    }
}
