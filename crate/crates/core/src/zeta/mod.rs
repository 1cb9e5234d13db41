//! Geometric zeta functions of self-similar ratio lists and their poles.

mod contour;
mod dims;
mod lattice;
mod poles;

pub use contour::{nonlattice_poles, winding_number, Rect};
pub use dims::{lower_similarity_dimension, screen_lower_bound, similarity_dimension};
pub use lattice::{detect_lattice, lattice_poles, polynomial_roots, LatticeStructure, DEFAULT_MAX_DEN};
pub use poles::{residue_contour, residue_simple, rescale, ComplexDimensionSet, Pole, Window};

use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Ratios closer than this (relative) are merged.
pub const RATIO_MERGE_TOL: f64 = 1e-12;

/// `|P(s)|` below this counts as a zero of the Dirichlet polynomial.
pub const ZERO_TOL: f64 = 1e-10;

/// Distinct scaling ratios with multiplicities, sorted by decreasing ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioMultiset {
    entries: Vec<(f64, u32)>,
}

impl RatioMultiset {
    pub fn new(entries: &[(f64, u32)]) -> Result<Self> {
        let mut v: Vec<(f64, u32)> = Vec::with_capacity(entries.len());
        for &(r, m) in entries {
            if !(r > 0.0 && r < 1.0) {
                return domain(format!("ratio {r} must lie in (0, 1)"));
            }
            if m == 0 {
                return domain("ratio multiplicity must be at least 1");
            }
            v.push((r, m));
        }
        v.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut merged: Vec<(f64, u32)> = Vec::with_capacity(v.len());
        for (r, m) in v {
            match merged.last_mut() {
                Some(last) if (last.0 - r).abs() <= RATIO_MERGE_TOL * last.0 => last.1 += m,
                _ => merged.push((r, m)),
            }
        }
        Ok(RatioMultiset { entries: merged })
    }

    pub fn from_ratios(ratios: &[f64]) -> Result<Self> {
        Self::new(&ratios.iter().map(|&r| (r, 1)).collect::<Vec<_>>())
    }

    pub fn empty() -> Self {
        RatioMultiset { entries: vec![] }
    }

    pub fn entries(&self) -> &[(f64, u32)] {
        &self.entries
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.1 as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Moran sum `sum m_k r_k^sigma`.
    pub fn moran(&self, sigma: f64) -> f64 {
        self.entries.iter().map(|&(r, m)| m as f64 * r.powf(sigma)).sum()
    }
}

/// `P(s) = 1 - sum m_k r_k^s`, so that the geometric zeta function is `1/P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletPoly {
    ratios: RatioMultiset,
    logs: Vec<f64>,
}

impl DirichletPoly {
    pub fn new(ratios: RatioMultiset) -> Self {
        let logs = ratios.entries.iter().map(|e| e.0.ln()).collect();
        DirichletPoly { ratios, logs }
    }

    pub fn ratios(&self) -> &RatioMultiset {
        &self.ratios
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (&(_, m), &l) in self.ratios.entries.iter().zip(&self.logs) {
            acc -= (s * l).exp() * m as f64;
        }
        acc
    }

    /// `P'(s) = sum m_k r_k^s log(1/r_k)`.
    pub fn deriv(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(_, m), &l) in self.ratios.entries.iter().zip(&self.logs) {
            acc -= (s * l).exp() * (m as f64 * l);
        }
        acc
    }

    pub fn eval_and_deriv(&self, s: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for (&(_, m), &l) in self.ratios.entries.iter().zip(&self.logs) {
            let e = (s * l).exp() * m as f64;
            p -= e;
            dp -= e * l;
        }
        (p, dp)
    }

    pub fn eval_real(&self, sigma: f64) -> f64 {
        1.0 - self.ratios.moran(sigma)
    }

    /// Newton iteration on `P`; returns the root when it converges.
    pub fn newton(&self, start: Complex64, max_iter: usize) -> Option<Complex64> {
        let mut z = start;
        for _ in 0..max_iter {
            let (p, dp) = self.eval_and_deriv(z);
            if dp.norm() == 0.0 || !z.re.is_finite() {
                return None;
            }
            let step = p / dp;
            z -= step;
            if step.norm() <= 1e-15 * z.norm().max(1.0) {
                break;
            }
        }
        let (p, _) = self.eval_and_deriv(z);
        (p.norm() < ZERO_TOL && z.re.is_finite() && z.im.is_finite()).then_some(z)
    }
}

/// `1/P(s)`; refuses points where `|P(s)|` is below `near_pole_tol`.
pub fn zeta_eval(poly: &DirichletPoly, s: Complex64, near_pole_tol: f64) -> Result<Complex64> {
    let p = poly.eval(s);
    if p.norm() < near_pole_tol {
        return Err(Error::PoleProximity { abs_p: p.norm() });
    }
    Ok(p.inv())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_merges_and_sorts() {
        let r = RatioMultiset::from_ratios(&[0.2, 0.5, 0.2, 0.5 * (1.0 + 1e-14)]).unwrap();
        assert_eq!(r.entries().len(), 2);
        assert!((r.entries()[0].0 - 0.5).abs() < 1e-13 && r.entries()[0].1 == 2);
        assert_eq!(r.entries()[1], (0.2, 2));
        assert!(RatioMultiset::new(&[(1.0, 1)]).is_err());
        assert!(RatioMultiset::new(&[(0.5, 0)]).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = DirichletPoly::new(RatioMultiset::new(&[(0.4, 2), (0.2, 4)]).unwrap());
        let s = Complex64::new(0.7, 3.1);
        let h = 1e-6;
        let fd = (p.eval(s + h) - p.eval(s - h)) / (2.0 * h);
        assert!((fd - p.deriv(s)).norm() < 1e-8);
    }

    #[test]
    fn zeta_eval_refuses_poles() {
        let p = DirichletPoly::new(RatioMultiset::new(&[(0.5, 2)]).unwrap());
        assert!(matches!(
            zeta_eval(&p, Complex64::new(1.0, 0.0), 1e-13),
            Err(Error::PoleProximity { .. })
        ));
        let z = zeta_eval(&p, Complex64::new(2.0, 0.0), 1e-13).unwrap();
        assert!((z.re - 2.0).abs() < 1e-14);
    }
}
