//! Scalar special functions and small numeric helpers.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E1(z) = int_z^inf e^{-t}/t dt` for `z > 0`.
///
/// Power series below 1, modified Lentz continued fraction above; relative
/// accuracy is a few ulp over the whole range.
pub fn exp_integral_e1(z: f64) -> f64 {
    assert!(z > 0.0, "E1 requires a positive argument");
    if z <= 1.0 {
        // E1(z) = -gamma - ln z + sum_{n>=1} (-1)^{n+1} z^n / (n n!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 1..=40 {
            term *= -z / n as f64;
            let inc = -term / n as f64;
            sum += inc;
            if inc.abs() < 1e-18 * (1.0 + sum.abs()) {
                break;
            }
        }
        -EULER_GAMMA - z.ln() + sum
    } else {
        // E1(z) = e^{-z} * 1/(z+1- 1/(z+3- 4/(z+5- 9/(...))))
        let tiny = 1e-300;
        let mut b = z + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for n in 1..200u32 {
            let a = -((n * n) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-z).exp() * h
    }
}

/// Least-squares line fit; returns `(slope, intercept)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Composite Simpson quadrature of `f` on `[a, b]` with `n` (even) panels.
pub fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Wrap `x` into `[0, 1)`.
pub fn fract_unit(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Wrap `x` into `[-1/2, 1/2)`.
pub fn wrap_half(x: f64) -> f64 {
    fract_unit(x + 0.5) - 0.5
}

/// Deduplicate a sorted slice with relative tolerance.
pub fn dedup_sorted(v: &mut Vec<f64>, rel_tol: f64) {
    v.dedup_by(|a, b| (*a - *b).abs() <= rel_tol * a.abs().max(b.abs()).max(1e-300));
}
