//! Layout contracts of the dense tensor type: unfoldings against index-map
//! oracles, fold/unfold round trips, circular permutation, and the norm /
//! inner-product algebra.

use trc::tensor::{inner_product, Tensor};

fn seq_tensor(dims: &[usize]) -> Tensor {
    let n: usize = dims.iter().product();
    Tensor::new(dims.to_vec(), (1..=n).map(|v| v as f64).collect()).unwrap()
}

fn pseudo_random(dims: &[usize], seed: u64) -> Tensor {
    let mut s = seed;
    Tensor::from_fn(dims.to_vec(), |_| {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    })
}

#[test]
fn standard_unfold_of_sequential_cube() {
    let a = seq_tensor(&[2, 2, 2]);
    let m = a.unfold_standard(0).unwrap();
    assert_eq!(m.nrows(), 2);
    assert_eq!(m.ncols(), 4);
    let want = [[1.0, 3.0, 5.0, 7.0], [2.0, 4.0, 6.0, 8.0]];
    for r in 0..2 {
        for c in 0..4 {
            assert_eq!(m[(r, c)], want[r][c]);
        }
    }
}

#[test]
fn standard_unfold_mode0_of_matrix_is_identity() {
    let a = pseudo_random(&[3, 5], 1);
    let m = a.unfold_standard(0).unwrap();
    for r in 0..3 {
        for c in 0..5 {
            assert_eq!(m[(r, c)], a.get(&[r, c]));
        }
    }
}

#[test]
fn circular_unfold_mode1_of_matrix_is_transpose() {
    let a = pseudo_random(&[3, 5], 2);
    let m = a.unfold_circular(1).unwrap();
    assert_eq!((m.nrows(), m.ncols()), (5, 3));
    for r in 0..5 {
        for c in 0..3 {
            assert_eq!(m[(r, c)], a.get(&[c, r]));
        }
    }
}

#[test]
fn circular_unfold_matches_index_enumeration() {
    // rows of mode n; columns enumerate the remaining modes in circular
    // order n+1, .., n-1 with the earliest varying fastest
    let a = seq_tensor(&[2, 2, 2]);
    let m = a.unfold_circular(1).unwrap();
    let want = [[1.0, 5.0, 2.0, 6.0], [3.0, 7.0, 4.0, 8.0]];
    for r in 0..2 {
        for c in 0..4 {
            assert_eq!(m[(r, c)], want[r][c]);
        }
    }
    // generic oracle on a non-square shape
    let a = pseudo_random(&[2, 3, 4], 3);
    let m = a.unfold_circular(1).unwrap();
    for i0 in 0..2 {
        for i1 in 0..3 {
            for i2 in 0..4 {
                let col = i2 + i0 * 4;
                assert_eq!(m[(i1, col)], a.get(&[i0, i1, i2]));
            }
        }
    }
}

#[test]
fn fold_inverts_unfold_for_all_modes() {
    let a = pseudo_random(&[3, 4, 5], 4);
    for n in 0..3 {
        let ms = a.unfold_standard(n).unwrap();
        let back = Tensor::fold_standard(&ms, a.dims(), n).unwrap();
        assert_eq!(a, back);
        let mc = a.unfold_circular(n).unwrap();
        let back = Tensor::fold_circular(&mc, a.dims(), n).unwrap();
        assert_eq!(a, back);
    }
}

#[test]
fn unfold_conventions_coincide_on_mode0() {
    let a = pseudo_random(&[3, 4, 5], 5);
    let s = a.unfold_standard(0).unwrap();
    let c = a.unfold_circular(0).unwrap();
    assert_eq!(s, c);
}

#[test]
fn unfold_rejects_out_of_range_mode() {
    let a = seq_tensor(&[2, 3]);
    assert!(a.unfold_standard(2).is_err());
    assert!(a.unfold_circular(5).is_err());
}

#[test]
fn circular_permutation_identity_and_cycle() {
    let a = pseudo_random(&[2, 3, 4], 6);
    assert_eq!(a.permute_circular(0).unwrap(), a);
    let mut b = a.clone();
    for _ in 0..3 {
        b = b.permute_circular(1).unwrap();
    }
    assert_eq!(a, b);
}

#[test]
fn circular_permutation_matches_reindexing_oracle() {
    let a = pseudo_random(&[2, 3, 4], 7);
    let b = a.permute_circular(1).unwrap();
    assert_eq!(b.dims(), &[3, 4, 2]);
    for i0 in 0..2 {
        for i1 in 0..3 {
            for i2 in 0..4 {
                assert_eq!(b.get(&[i1, i2, i0]), a.get(&[i0, i1, i2]));
            }
        }
    }
}

#[test]
fn circular_permutation_preserves_values_and_norm() {
    let a = pseudo_random(&[4, 3, 2], 8);
    let b = a.permute_circular(2).unwrap();
    let mut va: Vec<f64> = a.data().to_vec();
    let mut vb: Vec<f64> = b.data().to_vec();
    va.sort_by(f64::total_cmp);
    vb.sort_by(f64::total_cmp);
    assert_eq!(va, vb);
    assert_eq!(a.frobenius_norm(), b.frobenius_norm());
}

#[test]
fn frobenius_norm_examples() {
    assert_eq!(Tensor::zeros(vec![2, 3]).frobenius_norm(), 0.0);
    let ones = Tensor::from_fn(vec![2, 2, 2], |_| 1.0);
    assert!((ones.frobenius_norm() - 8f64.sqrt()).abs() < 1e-15);
    let a = pseudo_random(&[3, 4, 5], 9);
    let mut sq = 0.0;
    for i in 0..3 {
        for j in 0..4 {
            for k in 0..5 {
                let v = a.get(&[i, j, k]);
                sq += v * v;
            }
        }
    }
    assert!((a.frobenius_norm() - sq.sqrt()).abs() < 1e-12);
    // contract: the norm is exactly sqrt of the self inner product
    assert_eq!(a.frobenius_norm(), inner_product(&a, &a).unwrap().sqrt());
}

#[test]
fn inner_product_examples_and_bilinearity() {
    let ones = Tensor::from_fn(vec![2, 2], |_| 1.0);
    assert_eq!(inner_product(&ones, &ones).unwrap(), 4.0);
    let z = Tensor::zeros(vec![2, 2]);
    assert_eq!(inner_product(&ones, &z).unwrap(), 0.0);

    let a = pseudo_random(&[3, 4], 10);
    let b = pseudo_random(&[3, 4], 11);
    let c = pseudo_random(&[3, 4], 12);
    let mut naive = 0.0;
    for i in 0..3 {
        for j in 0..4 {
            naive += a.get(&[i, j]) * b.get(&[i, j]);
        }
    }
    let ab = inner_product(&a, &b).unwrap();
    assert!((ab - naive).abs() < 1e-12 * naive.abs().max(1.0));
    assert!((ab - inner_product(&b, &a).unwrap()).abs() < 1e-12);

    let (alpha, beta) = (0.37, -1.44);
    let mut lin = b.clone();
    lin.scale(alpha);
    lin.axpy(beta, &c);
    let lhs = inner_product(&a, &lin).unwrap();
    let rhs = alpha * ab + beta * inner_product(&a, &c).unwrap();
    assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));

    assert!(inner_product(&a, &pseudo_random(&[4, 3], 13)).is_err());
}

#[test]
fn constructor_validates_shape() {
    assert!(Tensor::new(vec![2, 3], vec![0.0; 5]).is_err());
    assert!(Tensor::new(vec![2, 0], vec![]).is_err());
    assert!(Tensor::new(vec![2, 3], vec![0.0; 6]).is_ok());
}
