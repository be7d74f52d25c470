//! Deterministic reductions, row-parallel helpers and polynomial interpolation.
//!
//! All floating-point reductions in the crate go through [`pairwise_sum`] so
//! that the summation tree is fixed: results do not depend on the number of
//! worker threads or on whether the `parallel` feature is enabled.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Pairwise (cascade) summation with a fixed tree; blocks of 32 are summed
/// sequentially at the leaves.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sum `f(j)` over `j in 0..rows`, evaluating rows in parallel but reducing
/// along the same pairwise tree regardless of thread count.
pub fn sum_rows<F>(rows: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let per_row = map_rows(rows, f);
    pairwise_sum(&per_row)
}

/// Collect `f(j)` for `j in 0..rows` in order.
pub fn map_rows<T, F>(rows: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..rows).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..rows).map(f).collect()
    }
}

/// Apply `f(j, row)` to each row of a mutable row-major buffer.
pub fn for_each_row_mut<F>(buf: &mut [f64], row_len: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    debug_assert_eq!(buf.len() % row_len, 0);
    #[cfg(feature = "parallel")]
    {
        buf.par_chunks_mut(row_len).enumerate().for_each(|(j, row)| f(j, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        buf.chunks_mut(row_len).enumerate().for_each(|(j, row)| f(j, row));
    }
}

/// Maximum of `f(j)` over rows (NaN-poisoning: any NaN wins).
pub fn max_rows<F>(rows: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let per_row = map_rows(rows, f);
    per_row.into_iter().fold(f64::NEG_INFINITY, |a, b| if b.is_nan() { b } else { a.max(b) })
}

/// Cubic Lagrange basis on nodes {-1, 0, 1, 2} evaluated at s ∈ [0, 1].
#[inline]
pub fn cubic_weights(s: f64) -> [f64; 4] {
    let s2 = s * s;
    let s3 = s2 * s;
    [
        -(s3 - 3.0 * s2 + 2.0 * s) / 6.0,
        (s3 - 2.0 * s2 - s + 2.0) / 2.0,
        -(s3 - s2 - 2.0 * s) / 2.0,
        (s3 - s) / 6.0,
    ]
}

/// Cubic interpolation of uniformly spaced samples `v` at fractional index `x`
/// (in sample units). Stencil is clamped at the ends.
pub fn cubic_interp(v: &[f64], x: f64) -> f64 {
    let n = v.len();
    debug_assert!(n >= 4);
    let i0 = (x.floor() as isize).clamp(1, n as isize - 3) as usize;
    let s = x - i0 as f64;
    let w = cubic_weights(s);
    w[0] * v[i0 - 1] + w[1] * v[i0] + w[2] * v[i0 + 1] + w[3] * v[i0 + 2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_smooth_data() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.01).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }

    #[test]
    fn sum_rows_is_deterministic() {
        let a = sum_rows(513, |j| (j as f64).sqrt().sin());
        let b = sum_rows(513, |j| (j as f64).sqrt().sin());
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn cubic_reproduces_cubics_exactly() {
        let p = |x: f64| 0.3 * x * x * x - 1.2 * x * x + 0.5 * x + 2.0;
        let v: Vec<f64> = (0..10).map(|i| p(i as f64)).collect();
        for &x in &[1.25, 3.0, 4.7, 6.999] {
            assert!((cubic_interp(&v, x) - p(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_weights_partition_of_unity() {
        for &s in &[0.0, 0.3, 0.5, 0.99, 1.0] {
            let w = cubic_weights(s);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }
}
