//! Periodic scalar fields with spectral interpolation.
//!
//! A field is sampled row-major on an `n1 x n2` grid at lattice coordinates
//! `(i/n1, j/n2)` and carries its trigonometric interpolant. Point evaluation
//! and gradients sum the pruned significant modes, so band-limited fields
//! evaluate in a handful of operations.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::fft::{fft2_inplace, is_power_of_two};
use crate::geometry::Lattice;
use crate::vec::Vec2;

#[derive(Debug, Clone)]
struct Mode {
    /// Chart wavevector `2 pi A^{-T} m`.
    k: Vec2,
    c: Complex64,
    /// Unpaired Nyquist modes are skipped when differentiating.
    nyquist: bool,
}

#[derive(Debug, Clone)]
pub struct SpectralField {
    lattice: Lattice,
    n1: usize,
    n2: usize,
    values: Vec<f64>,
    coeffs: Vec<Complex64>,
    modes: Vec<Mode>,
}

fn signed_freq(idx: usize, n: usize) -> i64 {
    if idx <= n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

impl SpectralField {
    pub fn from_samples(lattice: Lattice, n1: usize, n2: usize, values: Vec<f64>) -> Result<Self> {
        if !is_power_of_two(n1) || !is_power_of_two(n2) {
            return Err(invalid("spectral grid dimensions must be powers of two"));
        }
        if values.len() != n1 * n2 {
            return Err(invalid("sample count does not match grid dimensions"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("field samples must be finite"));
        }
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2_inplace(&mut buf, n1, n2, false);
        let norm = 1.0 / (n1 * n2) as f64;
        for c in buf.iter_mut() {
            *c *= norm;
        }
        Ok(Self::assemble(lattice, n1, n2, values, buf))
    }

    pub fn from_fn(
        lattice: Lattice,
        n1: usize,
        n2: usize,
        f: impl Fn(Vec2) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let s = Vec2::new(i as f64 / n1 as f64, j as f64 / n2 as f64);
                values.push(f(lattice.from_lattice(s)));
            }
        }
        Self::from_samples(lattice, n1, n2, values)
    }

    pub fn from_coeffs(
        lattice: Lattice,
        n1: usize,
        n2: usize,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        if !is_power_of_two(n1) || !is_power_of_two(n2) {
            return Err(invalid("spectral grid dimensions must be powers of two"));
        }
        if coeffs.len() != n1 * n2 {
            return Err(invalid("coefficient count does not match grid dimensions"));
        }
        let mut buf = coeffs.clone();
        // values = inverse transform of (n1 n2) * c
        for c in buf.iter_mut() {
            *c *= (n1 * n2) as f64;
        }
        fft2_inplace(&mut buf, n1, n2, true);
        let values = buf.iter().map(|c| c.re).collect();
        Ok(Self::assemble(lattice, n1, n2, values, coeffs))
    }

    pub fn constant(lattice: Lattice, n1: usize, n2: usize, value: f64) -> Result<Self> {
        Self::from_samples(lattice, n1, n2, vec![value; n1 * n2])
    }

    fn assemble(
        lattice: Lattice,
        n1: usize,
        n2: usize,
        values: Vec<f64>,
        coeffs: Vec<Complex64>,
    ) -> Self {
        let max_c = coeffs.iter().map(|c| c.norm_sqr()).fold(0.0f64, f64::max);
        let thresh = 1e-30 * max_c;
        let mut modes = Vec::new();
        for a in 0..n1 {
            for b in 0..n2 {
                let c = coeffs[a * n2 + b];
                if c.norm_sqr() <= thresh {
                    continue;
                }
                let m1 = signed_freq(a, n1);
                let m2 = signed_freq(b, n2);
                let (b1, b2) = lattice.dual_basis();
                let k = (b1 * m1 as f64 + b2 * m2 as f64) * (2.0 * core::f64::consts::PI);
                let nyquist = (2 * m1).unsigned_abs() as usize == n1
                    || (2 * m2).unsigned_abs() as usize == n2;
                modes.push(Mode { k, c, nyquist });
            }
        }
        SpectralField {
            lattice,
            n1,
            n2,
            values,
            coeffs,
            modes,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Mean with respect to the flat chart measure.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Integral `int f dx` over the fundamental domain.
    pub fn integral(&self) -> f64 {
        self.mean() * self.lattice.volume()
    }

    /// Trigonometric interpolation at a Cartesian chart position.
    pub fn eval(&self, x: Vec2) -> f64 {
        let mut sum = 0.0;
        for m in &self.modes {
            let ph = m.k.dot(x);
            // Re(c e^{i ph})
            sum += m.c.re * ph.cos() - m.c.im * ph.sin();
        }
        sum
    }

    /// Chart gradient of the interpolant.
    pub fn grad(&self, x: Vec2) -> Vec2 {
        let mut g = Vec2::ZERO;
        for m in &self.modes {
            if m.nyquist {
                continue;
            }
            let ph = m.k.dot(x);
            // Re(i c e^{i ph}) = -(c.im cos + c.re sin)
            let w = -(m.c.im * ph.cos() + m.c.re * ph.sin());
            g += m.k * w;
        }
        g
    }

    /// New field with samples transformed pointwise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_samples(
            self.lattice.clone(),
            self.n1,
            self.n2,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
