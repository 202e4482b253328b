//! Radix-2 complex FFT for the periodic spectral grids.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// In-place iterative Cooley-Tukey transform. `len` must be a power of two.
/// Forward: `X_k = sum_j x_j e^{-2pi i jk/n}`; inverse includes the `1/n`.
pub fn fft_inplace(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    assert!(is_power_of_two(n), "fft length must be a power of two");
    if n <= 1 {
        return;
    }
    // bit reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * core::f64::consts::PI / len as f64;
        let wlen = Complex64::new(ang.cos(), ang.sin());
        let mut i = 0;
        while i < n {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = buf[i + k];
                let v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w *= wlen;
            }
            i += len;
        }
        len <<= 1;
    }
    if inverse {
        let inv = 1.0 / n as f64;
        for v in buf.iter_mut() {
            *v *= inv;
        }
    }
}

/// 2D transform of a row-major `n1 x n2` grid.
pub fn fft2_inplace(buf: &mut [Complex64], n1: usize, n2: usize, inverse: bool) {
    assert_eq!(buf.len(), n1 * n2);
    for row in buf.chunks_exact_mut(n2) {
        fft_inplace(row, inverse);
    }
    let mut col: Vec<Complex64> = Vec::with_capacity(n1);
    for j in 0..n2 {
        col.clear();
        col.extend((0..n1).map(|i| buf[i * n2 + j]));
        fft_inplace(&mut col, inverse);
        for (i, v) in col.iter().enumerate() {
            buf[i * n2 + j] = *v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_mode_forward() {
        let n = 16;
        let mut buf: Vec<Complex64> = (0..n)
            .map(|j| {
                let ph = 2.0 * core::f64::consts::PI * 3.0 * j as f64 / n as f64;
                Complex64::new(ph.cos(), ph.sin())
            })
            .collect();
        fft_inplace(&mut buf, false);
        for (k, v) in buf.iter().enumerate() {
            let want = if k == 3 { n as f64 } else { 0.0 };
            assert!((v.re - want).abs() < 1e-10 && v.im.abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn roundtrip_2d() {
        let (n1, n2) = (8, 16);
        let mut buf: Vec<Complex64> = (0..n1 * n2)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let orig = buf.clone();
        fft2_inplace(&mut buf, n1, n2, false);
        fft2_inplace(&mut buf, n1, n2, true);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm_sqr() < 1e-24);
        }
    }

    #[test]
    fn parseval() {
        let n = 64;
        let mut buf: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64).sin(), 0.0))
            .collect();
        let t: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
        fft_inplace(&mut buf, false);
        let f: f64 = buf.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
        assert!((t - f).abs() < 1e-10);
    }

    #[test]
    #[should_panic]
    fn rejects_non_power_of_two() {
        let mut buf = vec![Complex64::new(0.0, 0.0); 12];
        fft_inplace(&mut buf, false);
    }
}
