//! Pointwise explicit formulae: sums over complex dimensions approximating
//! the `k`-th antiderivative of a tube function or heat content.

use crate::error::{domain, Error, Result};
use crate::mellin::{factorized_zeta, MellinEvaluator};
use crate::sampled::{least_squares, SampledFunction};
use crate::zeta::{residue_contour, ComplexDimensionSet, DirichletPoly};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default imaginary cutoffs for the symmetric partial sums.
pub const DEFAULT_CUTOFFS: [f64; 5] = [10.0, 20.0, 40.0, 80.0, 160.0];

/// Trapezoid nodes on the residue circle.
pub const RESIDUE_NODES: usize = 256;

/// Allowed shortfall of the fitted residual slope below the expected order.
pub const SLOPE_SLACK: f64 = 0.15;

/// `(z)_k = z (z + 1) ... (z + k - 1)`.
pub fn pochhammer(z: Complex64, k: u32) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z + j as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaTerm {
    pub omega: Complex64,
    /// Residue of `s -> zeta_f(s / alpha; delta)` at `omega`.
    pub residue: Complex64,
    pub exponent: Complex64,
    pub coeff: Complex64,
}

impl FormulaTerm {
    pub fn new(omega: Complex64, residue: Complex64, beta: f64, alpha: f64, k: u32) -> Result<Self> {
        let z = (Complex64::new(beta, 0.0) - omega) / alpha;
        let poch = pochhammer(z + 1.0, k);
        if poch.norm() == 0.0 {
            return Err(Error::Precondition(format!("Pochhammer symbol vanishes at {omega}")));
        }
        Ok(FormulaTerm { omega, residue, exponent: z + k as f64, coeff: residue / poch })
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.coeff * (self.exponent * t.ln()).exp()
    }
}

/// Residue of `s -> zeta_f(s / alpha; delta)` at `omega` from a small circle
/// around the factorized right side.
pub fn zeta_residue(
    poly: &DirichletPoly,
    f: &MellinEvaluator,
    rem: &MellinEvaluator,
    omega: Complex64,
    delta: f64,
    alpha: f64,
    radius: f64,
) -> Result<Complex64> {
    let mut err = None;
    let r = residue_contour(
        |s| match factorized_zeta(poly, f, rem, s / alpha, delta, alpha) {
            Ok(z) => z.value,
            Err(e) => {
                err.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        omega,
        radius,
        RESIDUE_NODES,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// Residue circles: radius 0.1, or half the gap to the nearest other pole.
pub fn residue_radii(dims: &ComplexDimensionSet) -> Vec<f64> {
    let p = dims.poles();
    p.iter()
        .enumerate()
        .map(|(i, a)| {
            let gap = p
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| (a.omega - b.omega).norm())
                .fold(f64::INFINITY, f64::min);
            (0.5 * gap).min(0.1)
        })
        .collect()
}

/// One term per simple pole. Poles of higher order are skipped with a
/// warning.
pub fn build_terms(
    dims: &ComplexDimensionSet,
    residues: &[Complex64],
    beta: f64,
    alpha: f64,
    k: u32,
) -> Result<(Vec<FormulaTerm>, Vec<String>)> {
    if residues.len() != dims.poles().len() {
        return domain("one residue per pole is required");
    }
    let mut terms = Vec::new();
    let mut warnings = Vec::new();
    for (p, &res) in dims.poles().iter().zip(residues) {
        if p.multiplicity > 1 {
            warnings.push(format!("pole {} has multiplicity {}; left out of the sum", p.omega, p.multiplicity));
            continue;
        }
        terms.push(FormulaTerm::new(p.omega, res, beta, alpha, k)?);
    }
    Ok((terms, warnings))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSumSeries {
    pub cutoffs: Vec<f64>,
    pub ts: Vec<f64>,
    /// `sums[c][i]`: real part of the sum over `|Im omega| <= cutoffs[c]` at
    /// `ts[i]`.
    pub sums: Vec<Vec<f64>>,
    /// Largest change against the previous cutoff.
    pub leakage: Vec<f64>,
}

pub fn evaluate_sum(terms: &[FormulaTerm], ts: &[f64], cutoffs: &[f64]) -> Result<PartialSumSeries> {
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return domain("cutoffs must increase");
    }
    let mut sums: Vec<Vec<f64>> = Vec::with_capacity(cutoffs.len());
    let mut leakage = Vec::with_capacity(cutoffs.len());
    for (c, &cut) in cutoffs.iter().enumerate() {
        let row: Vec<f64> = ts
            .iter()
            .map(|&t| {
                terms
                    .iter()
                    .filter(|term| term.omega.im.abs() <= cut)
                    .map(|term| term.eval(t))
                    .sum::<Complex64>()
                    .re
            })
            .collect();
        let leak = if c == 0 {
            row.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        } else {
            row.iter().zip(&sums[c - 1]).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        leakage.push(leak);
        sums.push(row);
    }
    Ok(PartialSumSeries { cutoffs: cutoffs.to_vec(), ts: ts.to_vec(), sums, leakage })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExplicitReport {
    pub max_rel_dev: f64,
    pub residual: Vec<f64>,
    /// Log-log slope of `|residual|`; absent when the residual is at the
    /// floor.
    pub residual_slope: Option<f64>,
    pub at_floor: bool,
    pub pass: bool,
}

/// Compare a directly computed antiderivative with the partial sum at
/// cutoff index `c`. The residual should decay at least like
/// `t^expected_exponent`; below `floor` (relative) it counts as exact.
pub fn compare_explicit(
    direct: &SampledFunction,
    series: &PartialSumSeries,
    c: usize,
    expected_exponent: f64,
    floor: f64,
) -> Result<ExplicitReport> {
    let sums = series.sums.get(c).ok_or_else(|| Error::Domain("cutoff index out of range".into()))?;
    let mut residual = Vec::with_capacity(sums.len());
    let mut max_rel_dev: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (&t, &s) in series.ts.iter().zip(sums) {
        let d = direct.interp(t)?;
        residual.push(d - s);
        scale = scale.max(d.abs());
        max_rel_dev = max_rel_dev.max((d - s).abs() / d.abs());
    }
    let at_floor = residual.iter().all(|r| r.abs() <= floor * scale);
    let residual_slope = if at_floor {
        None
    } else {
        let (xs, ys): (Vec<f64>, Vec<f64>) = series
            .ts
            .iter()
            .zip(&residual)
            .filter(|(_, r)| r.abs() > 0.0)
            .map(|(t, r)| (t.ln(), r.abs().ln()))
            .unzip();
        Some(least_squares(&xs, &ys)?.0)
    };
    let pass = at_floor || residual_slope.is_some_and(|m| m >= expected_exponent - SLOPE_SLACK);
    Ok(ExplicitReport { max_rel_dev, residual, residual_slope, at_floor, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::{Pole, Window};

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(Complex64::new(3.0, 0.0), 0), Complex64::new(1.0, 0.0));
        assert_eq!(pochhammer(Complex64::new(3.0, 0.0), 3), Complex64::new(60.0, 0.0));
        let z = Complex64::new(0.5, 2.0);
        assert!((pochhammer(z, 2) - z * (z + 1.0)).norm() < 1e-15);
    }

    #[test]
    fn term_exponent_and_cutoffs() {
        let t = FormulaTerm::new(Complex64::new(0.5, 3.0), Complex64::new(1.0, 0.0), 1.0, 1.0, 2).unwrap();
        assert!((t.exponent - Complex64::new(2.5, -3.0)).norm() < 1e-15);
        let terms = [
            FormulaTerm::new(Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0), 1.0, 1.0, 2).unwrap(),
            t,
            FormulaTerm::new(Complex64::new(0.5, -3.0), Complex64::new(1.0, 0.0), 1.0, 1.0, 2).unwrap(),
        ];
        let s = evaluate_sum(&terms, &[0.1, 0.2], &[1.0, 5.0]).unwrap();
        assert!((s.sums[0][0] - terms[0].eval(0.1).re).abs() < 1e-15);
        let pair = terms[1].eval(0.1) + terms[2].eval(0.1);
        assert!((s.sums[1][0] - s.sums[0][0] - pair.re).abs() < 1e-15);
    }

    #[test]
    fn multiple_poles_are_skipped() {
        let set = ComplexDimensionSet::new(
            vec![
                Pole { omega: Complex64::new(0.5, 0.0), residue: Complex64::new(1.0, 0.0), multiplicity: 1 },
                Pole { omega: Complex64::new(0.2, 1.0), residue: Complex64::new(1.0, 0.0), multiplicity: 2 },
            ],
            Window { re_min: 0.0, re_max: 1.0, im_max: 2.0 },
            None,
            1.0,
        )
        .unwrap();
        let res = vec![Complex64::new(1.0, 0.0); 2];
        let (terms, warn) = build_terms(&set, &res, 1.0, 1.0, 2).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(warn.len(), 1);
    }

    #[test]
    fn floor_verdict_for_exact_sums() {
        let term = FormulaTerm::new(Complex64::new(0.0, 0.0), Complex64::new(-2.0, 0.0), 1.0, 1.0, 2).unwrap();
        let ts = crate::sampled::log_grid(1e-3, 1e-1, 10);
        let series = evaluate_sum(&[term], &ts, &[1.0]).unwrap();
        let direct = SampledFunction::from_fn(ts, |t| -t.powi(3) / 3.0).unwrap();
        let rep = compare_explicit(&direct, &series, 0, 3.0, 1e-9).unwrap();
        assert!(rep.at_floor && rep.pass && rep.max_rel_dev < 1e-12);
    }
}
