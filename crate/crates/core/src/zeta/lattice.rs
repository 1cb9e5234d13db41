use super::poles::{residue_contour, residue_simple, ComplexDimensionSet, Pole, Window};
use super::{similarity_dimension, DirichletPoly, RatioMultiset, ZERO_TOL};
use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest polynomial degree accepted when mapping a lattice case to roots.
pub const MAX_LATTICE_DEGREE: u64 = 4096;

/// Largest denominator tried when testing log-ratios for rationality.
pub const DEFAULT_MAX_DEN: u64 = 64;

const LATTICE_TOL: f64 = 1e-12;

/// Every ratio is `generator^k` for the listed integer exponents; entries
/// pair `(k, multiplicity)` in the multiset's order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeStructure {
    pub generator: f64,
    pub exponents: Vec<(u64, u32)>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// First continued-fraction convergent of `x` within tolerance, if its
/// denominator stays below `max_den`.
fn rational_approx(x: f64, max_den: u64) -> Option<(u64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a > 1e15 {
            return None;
        }
        let a = a as u64;
        let (p2, q2) = (a.checked_mul(p1)?.checked_add(p0)?, a.checked_mul(q1)?.checked_add(q0)?);
        if q2 > max_den {
            return None;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= LATTICE_TOL * x.abs().max(1.0) {
            return Some((p2, q2));
        }
        let frac = y - a as f64;
        if frac <= 0.0 {
            return None;
        }
        y = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

/// Decide whether all log-ratios are rationally related, with denominators
/// bounded by `max_den`.
pub fn detect_lattice(ratios: &RatioMultiset, max_den: u64) -> Option<LatticeStructure> {
    let e = ratios.entries();
    let base = e.first()?.0.ln();
    let mut fracs = Vec::with_capacity(e.len());
    for &(r, _) in e {
        fracs.push(rational_approx(r.ln() / base, max_den)?);
    }
    let q = fracs.iter().fold(1u64, |acc, &(_, q)| acc / gcd(acc, q) * q);
    let ks: Vec<u64> = fracs.iter().map(|&(p, qi)| p * (q / qi)).collect();
    let g = ks.iter().fold(0u64, |acc, &k| gcd(acc, k));
    Some(LatticeStructure {
        generator: (base * g as f64 / q as f64).exp(),
        exponents: ks.iter().zip(e).map(|(&k, &(_, m))| (k / g, m)).collect(),
    })
}

fn horner(coef: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coef.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of the real polynomial `sum coef[i] z^i` (Aberth-Ehrlich
/// iteration followed by Newton polishing).
pub fn polynomial_roots(coef: &[f64]) -> Result<Vec<Complex64>> {
    let deg = coef.iter().rposition(|&c| c != 0.0).unwrap_or(0);
    if deg == 0 {
        return Ok(vec![]);
    }
    let coef = &coef[..=deg];
    let lead = coef[deg];
    let c0 = coef[0];
    if c0 == 0.0 {
        return domain("polynomial has a root at zero");
    }
    let radius = (c0 / lead).abs().powf(1.0 / deg as f64);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / deg as f64 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = horner(coef, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if max_step < 1e-14 {
            converged = true;
            break;
        }
    }
    if !converged {
        let worst = z.iter().map(|&r| horner(coef, r).0.norm()).fold(0.0, f64::max);
        return Err(Error::Numeric { msg: "Aberth iteration did not converge".into(), residual: worst });
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(coef, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let nr = *r - p / dp;
            if horner(coef, nr).0.norm() <= p.norm() {
                *r = nr;
            } else {
                break;
            }
        }
    }
    Ok(z)
}

/// Poles of `1/P` for a lattice ratio list with `|Im| <= im_max`. Each root
/// `z` of `1 - sum m_j z^{k_j}` gives a vertical progression of poles with
/// exact spacing `2 pi / |log generator|`.
pub fn lattice_poles(poly: &DirichletPoly, lattice: &LatticeStructure, im_max: f64) -> Result<ComplexDimensionSet> {
    if !(im_max > 0.0 && im_max.is_finite()) {
        return domain("im_max must be positive and finite");
    }
    let deg = lattice.exponents.iter().map(|e| e.0).max().unwrap_or(0);
    if deg > MAX_LATTICE_DEGREE {
        return Err(Error::SizeLimit {
            what: "lattice polynomial degree",
            requested: deg as u128,
            cap: MAX_LATTICE_DEGREE as u128,
        });
    }
    let mut coef = vec![0.0; deg as usize + 1];
    coef[0] = 1.0;
    for &(k, m) in &lattice.exponents {
        coef[k as usize] -= m as f64;
    }
    let roots = polynomial_roots(&coef)?;

    // Group coincident roots into one with multiplicity.
    let mut groups: Vec<(Complex64, u32)> = Vec::new();
    for r in roots {
        match groups.iter_mut().find(|g| (g.0 - r).norm() < 1e-6 * r.norm()) {
            Some(g) => {
                g.0 = (g.0 * g.1 as f64 + r) / (g.1 + 1) as f64;
                g.1 += 1;
            }
            None => groups.push((r, 1)),
        }
    }

    let lg = lattice.generator.ln();
    let span = im_max * lg.abs();
    let mut poles = Vec::new();
    for (z, mult) in groups {
        let (lnr, arg) = (z.norm().ln(), z.arg());
        let m_lo = ((-span - arg) / (2.0 * PI)).ceil() as i64;
        let m_hi = ((span - arg) / (2.0 * PI)).floor() as i64;
        for m in m_lo..=m_hi {
            let omega = Complex64::new(lnr, arg + 2.0 * PI * m as f64) / lg;
            if omega.im.abs() > im_max {
                continue;
            }
            let omega = if omega.im.abs() < 1e-13 { Complex64::new(omega.re, 0.0) } else { omega };
            let pv = poly.eval(omega).norm();
            if pv > ZERO_TOL {
                return Err(Error::Numeric { msg: format!("lattice pole {omega} is inaccurate"), residual: pv });
            }
            let residue = if mult == 1 {
                residue_simple(poly, omega)?
            } else {
                residue_contour(|s| poly.eval(s).inv(), omega, 1e-4, 256)
            };
            poles.push(Pole { omega, residue, multiplicity: mult });
        }
    }
    let d = similarity_dimension(poly.ratios())?;
    let re_min = poles.iter().map(|p| p.omega.re).fold(d, f64::min);
    ComplexDimensionSet::new(
        poles,
        Window { re_min, re_max: d, im_max },
        Some(lattice.clone()),
        1.0,
    )
}
