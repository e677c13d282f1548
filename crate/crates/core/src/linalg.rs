//! Tiny dense linear algebra for the least-squares fitter. Row-major, n ≤ 8.

use alloc::vec;
use alloc::vec::Vec;

/// Solve `a·x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `1e-300` relative to the row scale.
pub(crate) fn solve(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i * n + col]
                .abs()
                .partial_cmp(&m[j * n + col].abs())
                .unwrap_or(core::cmp::Ordering::Equal)
        })?;
        let scale = (0..n).map(|j| m[pivot * n + j].abs()).fold(0.0, f64::max);
        if !(m[pivot * n + col].abs() > 1e-300 * scale.max(1e-300)) || !scale.is_finite() {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
            }
            x.swap(pivot, col);
        }
        let d = m[col * n + col];
        for i in col + 1..n {
            let f = m[i * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[i * n + j] -= f * m[col * n + j];
            }
            x[i] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in col + 1..n {
            acc -= m[col * n + j] * x[j];
        }
        x[col] = acc / m[col * n + col];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

pub(crate) fn inverse(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let col = solve(a, &e, n)?;
        for i in 0..n {
            inv[i * n + k] = col[i];
        }
    }
    Some(inv)
}

/// Jᵀ·J for a row-major `rows × cols` Jacobian.
pub(crate) fn normal_matrix(j: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols * cols];
    for r in 0..rows {
        let row = &j[r * cols..(r + 1) * cols];
        for a in 0..cols {
            for b in 0..cols {
                out[a * cols + b] += row[a] * row[b];
            }
        }
    }
    out
}

/// Jᵀ·v.
pub(crate) fn transpose_times(j: &[f64], v: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols];
    for r in 0..rows {
        for c in 0..cols {
            out[c] += j[r * cols + c] * v[r];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_with_pivoting() {
        let a = [0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let x = solve(&a, &[5.0, 3.0, 4.0], 3).unwrap();
        for (got, want) in x.iter().zip([1.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_is_none() {
        assert!(solve(&[1.0, 2.0, 2.0, 4.0], &[1.0, 2.0], 2).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let a = [4.0, 1.0, 1.0, 3.0];
        let inv = inverse(&a, 2).unwrap();
        let det = 11.0;
        let want = [3.0 / det, -1.0 / det, -1.0 / det, 4.0 / det];
        for (g, w) in inv.iter().zip(want) {
            assert!((g - w).abs() < 1e-14);
        }
    }
}
