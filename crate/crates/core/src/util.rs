//! Deterministic reductions shared across batch operations.
//!
//! Batch statistics are computed by mapping items in index order and reducing
//! with a pairwise tree sum, so the result does not depend on the number of
//! worker threads.

use crate::num::Real;

/// Pairwise (tree) summation. Deterministic for a fixed input order and more
/// accurate than a left fold on long inputs.
pub fn pairwise_sum<F: Real>(v: &[F]) -> F {
    if v.len() <= 16 {
        let mut acc = F::zero();
        for &x in v {
            acc += x;
        }
        return acc;
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Mean via pairwise summation. Panics on empty input.
pub fn pairwise_mean<F: Real>(v: &[F]) -> F {
    assert!(!v.is_empty(), "mean of empty slice");
    pairwise_sum(v) / F::from_usize(v.len()).unwrap()
}

/// Euclidean norm.
pub fn norm2<F: Real>(v: &[F]) -> F {
    v.iter().map(|&x| x * x).sum::<F>().sqrt()
}

/// Dot product.
#[inline]
pub fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = F::zero();
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}
