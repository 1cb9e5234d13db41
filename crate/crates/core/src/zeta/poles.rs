use super::lattice::LatticeStructure;
use super::{DirichletPoly, ZERO_TOL};
use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole {
    pub omega: Complex64,
    pub residue: Complex64,
    pub multiplicity: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_max: f64,
}

/// Poles of `1/P(alpha s)`, sorted by imaginary then real part.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexDimensionSet {
    poles: Vec<Pole>,
    pub window: Window,
    pub lattice: Option<LatticeStructure>,
    /// The set describes the poles of `s -> 1/P(alpha s)`.
    pub alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct PoleWire {
    re: f64,
    im: f64,
    res_re: f64,
    res_im: f64,
    mult: u32,
}

#[derive(Serialize, Deserialize)]
struct SetWire {
    poles: Vec<PoleWire>,
    window: Window,
    lattice: Option<LatticeStructure>,
    alpha: f64,
}

impl ComplexDimensionSet {
    pub fn new(mut poles: Vec<Pole>, window: Window, lattice: Option<LatticeStructure>, alpha: f64) -> Result<Self> {
        if poles.iter().any(|p| p.multiplicity == 0) {
            return domain("pole multiplicity must be at least 1");
        }
        poles.sort_by(|a, b| a.omega.im.total_cmp(&b.omega.im).then(a.omega.re.total_cmp(&b.omega.re)));
        Ok(ComplexDimensionSet { poles, window, lattice, alpha })
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn to_json(&self) -> serde_json::Value {
        let wire = SetWire {
            poles: self
                .poles
                .iter()
                .map(|p| PoleWire {
                    re: p.omega.re,
                    im: p.omega.im,
                    res_re: p.residue.re,
                    res_im: p.residue.im,
                    mult: p.multiplicity,
                })
                .collect(),
            window: self.window,
            lattice: self.lattice.clone(),
            alpha: self.alpha,
        };
        serde_json::to_value(wire).expect("pole set serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let w: SetWire = serde_json::from_value(v.clone()).map_err(|e| Error::Domain(e.to_string()))?;
        let poles = w
            .poles
            .into_iter()
            .map(|p| Pole {
                omega: Complex64::new(p.re, p.im),
                residue: Complex64::new(p.res_re, p.res_im),
                multiplicity: p.mult,
            })
            .collect();
        Self::new(poles, w.window, w.lattice, w.alpha)
    }
}

/// `1/P'(omega)` at a simple zero of `P`.
pub fn residue_simple(poly: &DirichletPoly, omega: Complex64) -> Result<Complex64> {
    let (p, dp) = poly.eval_and_deriv(omega);
    if p.norm() >= ZERO_TOL {
        return Err(Error::Precondition(format!("|P({omega})| = {:e} is not a zero", p.norm())));
    }
    if dp.norm() <= 1e-10 {
        return Err(Error::MultiplePole { re: omega.re, im: omega.im, abs_dp: dp.norm() });
    }
    Ok(dp.inv())
}

/// `(1/2 pi i) \oint f` over the circle `|s - center| = radius`, by the
/// trapezoid rule.
pub fn residue_contour<F: FnMut(Complex64) -> Complex64>(mut f: F, center: Complex64, radius: f64, nodes: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let dz = Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.5) / nodes as f64);
        acc += f(center + dz) * dz;
    }
    acc / nodes as f64
}

/// Poles of `s -> zeta(alpha s)`: positions and residues divide by `alpha`.
pub fn rescale(set: &ComplexDimensionSet, alpha: f64) -> Result<ComplexDimensionSet> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain("rescaling factor must be positive");
    }
    let poles = set
        .poles
        .iter()
        .map(|p| Pole { omega: p.omega / alpha, residue: p.residue / alpha, multiplicity: p.multiplicity })
        .collect();
    let w = set.window;
    ComplexDimensionSet::new(
        poles,
        Window { re_min: w.re_min / alpha, re_max: w.re_max / alpha, im_max: w.im_max / alpha },
        set.lattice.clone(),
        set.alpha * alpha,
    )
}
