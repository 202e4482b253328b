//! Dense symmetric eigendecomposition for the small Hessians (2N x 2N).

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues sorted ascending and the matching eigenvectors as
/// columns of a row-major `n x n` matrix.
pub fn sym_eigen(matrix: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let idx = |r: usize, c: usize| r * n + c;
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[idx(p, q)] * a[idx(p, q)];
            }
        }
        let scale: f64 = (0..n).map(|i| a[idx(i, i)].abs()).fold(0.0, f64::max);
        if off.sqrt() <= 1e-14 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[idx(p, p)];
                let aqq = a[idx(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[idx(k, p)];
                    let vkq = v[idx(k, q)];
                    v[idx(k, p)] = c * vkp - s * vkq;
                    v[idx(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut eig: Vec<(f64, usize)> = (0..n).map(|i| (a[idx(i, i)], i)).collect();
    eig.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let values: Vec<f64> = eig.iter().map(|(l, _)| *l).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_col, (_, old_col)) in eig.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + new_col] = v[idx(r, *old_col)];
        }
    }
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_2x2() {
        let (vals, _) = sym_eigen(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((vals[0] - 1.0).abs() < 1e-13);
        assert!((vals[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn residual_and_orthogonality() {
        // deterministic pseudo-random symmetric 6x6
        let n = 6;
        let mut m = vec![0.0; n * n];
        let mut x = 0.37;
        for i in 0..n {
            for j in i..n {
                x = (x * 997.0 + 0.123).fract();
                m[i * n + j] = x - 0.5;
                m[j * n + i] = x - 0.5;
            }
        }
        let (vals, vecs) = sym_eigen(&m, n);
        for c in 0..n {
            // residual |A v - lambda v|
            for r in 0..n {
                let mut av = 0.0;
                for k in 0..n {
                    av += m[r * n + k] * vecs[k * n + c];
                }
                assert!((av - vals[c] * vecs[r * n + c]).abs() < 1e-10);
            }
            for c2 in 0..n {
                let mut dot = 0.0;
                for r in 0..n {
                    dot += vecs[r * n + c] * vecs[r * n + c2];
                }
                let want = if c == c2 { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
        // sorted ascending
        for w in vals.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }
}
