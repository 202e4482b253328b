//! The vorticity non-resonance condition and the algebraic variety it excludes.
//!
//! For a subset `I` of vortices the resonance sum is
//! `S(I) = sum_{i != j in I} G_i G_j = (sum_{I} G_i)^2 - sum_{I} G_i^2`;
//! the condition requires `S(I) != 0` for every `|I| >= 2`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::math::dedup_sorted;

/// Largest N for the exhaustive subset enumeration.
pub const MAX_SUBSET_N: usize = 24;

/// Default relative tolerance of the zero test, against `sum G_i^2`.
pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// A validated vector of nonzero vortex strengths.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaVector {
    gammas: Vec<f64>,
}

impl GammaVector {
    pub fn new(gammas: Vec<f64>) -> Result<GammaVector> {
        if gammas.len() < 2 {
            return Err(invalid("at least two vortex strengths are required"));
        }
        if gammas.iter().any(|g| !g.is_finite() || *g == 0.0) {
            return Err(invalid("vortex strengths must be finite and nonzero"));
        }
        Ok(GammaVector { gammas })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Outcome of the exhaustive subset check.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaConditionReport {
    pub pass: bool,
    /// Indices (0-based, ascending) of the subset minimizing `|S(I)|`.
    pub worst_subset: Vec<usize>,
    /// `S(I)` at the worst subset.
    pub worst_value: f64,
    /// Scale-invariant margin `min_I |S(I)| / sum G_i^2`.
    pub margin: f64,
}

impl GammaConditionReport {
    /// Worst subset as 1-based indices, for display.
    pub fn worst_subset_one_based(&self) -> Vec<usize> {
        self.worst_subset.iter().map(|i| i + 1).collect()
    }

    pub fn describe(&self) -> String {
        format!(
            "{} (worst subset {:?}, S = {:.6e}, margin = {:.6e})",
            if self.pass { "pass" } else { "fail" },
            self.worst_subset_one_based(),
            self.worst_value,
            self.margin
        )
    }
}

/// Check `S(I) != 0` for all subsets with the default tolerance.
pub fn gamma_condition(g: &GammaVector) -> Result<GammaConditionReport> {
    gamma_condition_with_tol(g, DEFAULT_REL_TOL)
}

/// Check the condition with an explicit relative tolerance.
pub fn gamma_condition_with_tol(g: &GammaVector, rel_tol: f64) -> Result<GammaConditionReport> {
    let n = g.len();
    if n > MAX_SUBSET_N {
        return Err(Error::Capacity(format!(
            "subset enumeration supports N <= {MAX_SUBSET_N}, got {n}"
        )));
    }
    let gam = g.as_slice();
    let total_sq: f64 = gam.iter().map(|x| x * x).sum();
    let mut worst_abs = f64::INFINITY;
    let mut worst_value = 0.0;
    let mut worst_mask = 0u32;
    for mask in 1u32..(1 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            sum += gam[i];
            sum_sq += gam[i] * gam[i];
            bits &= bits - 1;
        }
        let s = sum * sum - sum_sq;
        if s.abs() < worst_abs {
            worst_abs = s.abs();
            worst_value = s;
            worst_mask = mask;
        }
    }
    let worst_subset: Vec<usize> = (0..n).filter(|i| worst_mask >> i & 1 == 1).collect();
    Ok(GammaConditionReport {
        pass: worst_abs > rel_tol * total_sq,
        worst_subset,
        worst_value,
        margin: worst_abs / total_sq,
    })
}

/// Scale-invariant distance to the resonance variety:
/// `min_I |S(I)| / sum G_i^2`.
pub fn variety_distance(g: &GammaVector) -> Result<f64> {
    Ok(gamma_condition(g)?.margin)
}

/// Vorticity vector of the two-species mean-field problem and the resonant
/// parameter values.
#[derive(Debug, Clone)]
pub struct SinhPoissonGammas {
    pub gammas: GammaVector,
    /// Positive `tau` values at which some subset sum `S(I)` vanishes.
    pub resonant_taus: Vec<f64>,
}

/// Build `G_1 = .. = G_m = 1`, `G_{m+1} = .. = G_n = -1/tau`, and solve each
/// subset's `S(I) = 0` as a quadratic in `1/tau` to list the resonant values.
pub fn sinh_poisson_gammas(m: usize, n: usize, tau: f64) -> Result<SinhPoissonGammas> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid("tau must be positive and finite"));
    }
    if m > n {
        return Err(invalid("need 0 <= m <= n"));
    }
    if n < 2 {
        return Err(invalid("need at least two vortices"));
    }
    let mut gammas = Vec::with_capacity(n);
    gammas.extend(core::iter::repeat(1.0).take(m));
    gammas.extend(core::iter::repeat(-1.0 / tau).take(n - m));
    let gammas = GammaVector::new(gammas)?;

    // For a subset with `a` positive and `b` negative members and x = 1/tau:
    // S = (a - b x)^2 - (a + b x^2) = (b^2 - b) x^2 - 2ab x + (a^2 - a).
    let mut taus = Vec::new();
    for a in 0..=m {
        for b in 0..=(n - m) {
            if a + b < 2 {
                continue;
            }
            let (qa, qb, qc) = (
                (b * b) as f64 - b as f64,
                -2.0 * (a * b) as f64,
                (a * a) as f64 - a as f64,
            );
            if qa == 0.0 {
                if qb != 0.0 {
                    let x = -qc / qb;
                    if x > 0.0 {
                        taus.push(1.0 / x);
                    }
                }
                continue;
            }
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            for x in [(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)] {
                if x > 0.0 {
                    taus.push(1.0 / x);
                }
            }
        }
    }
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dedup_sorted(&mut taus, 1e-12);
    Ok(SinhPoissonGammas {
        gammas,
        resonant_taus: taus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn same_sign_passes() {
        let g = GammaVector::new(vec![1.0, 1.0, 1.0]).unwrap();
        let r = gamma_condition(&g).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn resonant_example_fails_with_full_subset() {
        // S({1,2,3}) = 2(G1 G2 + G1 G3 + G2 G3) = 2(-2 + 4 - 2) = 0
        let g = GammaVector::new(vec![-2.0, 1.0, -2.0]).unwrap();
        let r = gamma_condition(&g).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_subset, vec![0, 1, 2]);
        assert_eq!(r.worst_value, 0.0);
        assert_eq!(variety_distance(&g).unwrap(), 0.0);
    }

    #[test]
    fn dipole_passes() {
        let g = GammaVector::new(vec![1.0, -1.0]).unwrap();
        let r = gamma_condition(&g).unwrap();
        assert!(r.pass);
        assert_eq!(r.worst_value, -2.0);
    }

    #[test]
    fn margin_examples() {
        let g = GammaVector::new(vec![1.0, 1.0]).unwrap();
        assert!((variety_distance(&g).unwrap() - 1.0).abs() < 1e-15);
        // scale invariance
        let g2 = GammaVector::new(vec![17.0, 17.0]).unwrap();
        assert!((variety_distance(&g2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_vs_naive_double_sum() {
        let mut x = 0.4321;
        for n in 2..=8 {
            let mut gam = Vec::new();
            for _ in 0..n {
                x = (x * 991.0 + 0.173).fract();
                gam.push(x - 0.5 + if x > 0.5 { 0.6 } else { -0.6 });
            }
            let g = GammaVector::new(gam.clone()).unwrap();
            let r = gamma_condition(&g).unwrap();
            // naive double sum over the reported worst subset
            let idx = &r.worst_subset;
            let mut naive = 0.0;
            for &i in idx {
                for &j in idx {
                    if i != j {
                        naive += gam[i] * gam[j];
                    }
                }
            }
            assert!((naive - r.worst_value).abs() < 1e-12 * (1.0 + naive.abs()));
        }
    }

    #[test]
    fn nonzero_strengths_required() {
        assert!(GammaVector::new(vec![1.0, 0.0]).is_err());
        assert!(GammaVector::new(vec![1.0]).is_err());
    }

    #[test]
    fn capacity_limit() {
        let g = GammaVector::new(vec![1.0; 30]).unwrap();
        assert!(matches!(gamma_condition(&g), Err(Error::Capacity(_))));
    }

    #[test]
    fn sinh_poisson_examples() {
        // m=2, n=2: all positive, no resonance
        let sp = sinh_poisson_gammas(2, 2, 1.0).unwrap();
        assert_eq!(sp.gammas.as_slice(), &[1.0, 1.0]);
        assert!(sp.resonant_taus.is_empty());

        // m=1, n=2: S({1,2}) = -2/tau < 0 for all tau
        let sp = sinh_poisson_gammas(1, 2, 3.0).unwrap();
        assert!(sp.resonant_taus.is_empty());

        // m=2, n=3: I = {1,2,3} gives 2(1 - 2/tau) = 0 at tau = 2
        let sp = sinh_poisson_gammas(2, 3, 1.0).unwrap();
        assert_eq!(sp.resonant_taus.len(), 1);
        assert!((sp.resonant_taus[0] - 2.0).abs() < 1e-14);
        // substitute back: S vanishes at tau = 2
        let g = sinh_poisson_gammas(2, 3, 2.0).unwrap().gammas;
        let r = gamma_condition(&g).unwrap();
        assert!(!r.pass);
        assert!(r.worst_value.abs() < 1e-14);
    }

    #[test]
    fn sinh_poisson_rejects_bad_tau() {
        assert!(sinh_poisson_gammas(1, 2, 0.0).is_err());
        assert!(sinh_poisson_gammas(1, 2, -1.0).is_err());
    }
}
