use super::poles::{residue_contour, residue_simple, ComplexDimensionSet, Pole, Window};
use super::{DirichletPoly, ZERO_TOL};
use crate::error::{domain, Error, Result};
use crate::quad::adaptive_gk;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest imaginary half-height accepted by the nonlattice search.
pub const IM_MAX_CAP: f64 = 1e4;

const EDGE_TOL: f64 = 1e-6;
const MAX_PANELS: usize = 50_000;
const MAX_DEPTH: usize = 200;
const SPLIT_OFFSETS: [f64; 6] = [0.0123, -0.0311, 0.0457, -0.0719, 0.1031, -0.1373];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re0 && z.re <= self.re1 && z.im >= self.im0 && z.im <= self.im1
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    fn diameter(&self) -> f64 {
        (self.re1 - self.re0).hypot(self.im1 - self.im0)
    }
}

fn edge_integral(poly: &DirichletPoly, a: Complex64, b: Complex64) -> Result<Complex64> {
    let d = b - a;
    let mut f = |u: f64| {
        let z = a + d * u;
        let (p, dp) = poly.eval_and_deriv(z);
        dp / p * d
    };
    adaptive_gk(&mut f, 0.0, 1.0, EDGE_TOL, MAX_PANELS)
        .map(|(v, _)| v)
        .ok_or_else(|| Error::Contour("edge integral did not converge (zero near the edge?)".into()))
}

/// Number of zeros of `P` inside `rect`, counted with multiplicity, from the
/// argument principle.
pub fn winding_number(poly: &DirichletPoly, rect: Rect) -> Result<u32> {
    let c = [
        Complex64::new(rect.re0, rect.im0),
        Complex64::new(rect.re1, rect.im0),
        Complex64::new(rect.re1, rect.im1),
        Complex64::new(rect.re0, rect.im1),
    ];
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        total += edge_integral(poly, c[k], c[(k + 1) % 4])?;
    }
    let n = total / Complex64::new(0.0, 2.0 * PI);
    let rounded = n.re.round();
    if (n.re - rounded).abs() > 0.25 || n.im.abs() > 0.25 || rounded < 0.0 {
        return Err(Error::Contour(format!("winding number {n} is not a nonnegative integer")));
    }
    Ok(rounded as u32)
}

fn split(r: Rect, frac: f64) -> (Rect, Rect) {
    if r.im1 - r.im0 >= r.re1 - r.re0 {
        let m = r.im0 + (r.im1 - r.im0) * frac;
        (Rect { im1: m, ..r }, Rect { im0: m, ..r })
    } else {
        let m = r.re0 + (r.re1 - r.re0) * frac;
        (Rect { re1: m, ..r }, Rect { re0: m, ..r })
    }
}

fn search(poly: &DirichletPoly, r: Rect, n: u32, depth: usize, out: &mut Vec<(Complex64, u32)>) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    if n == 1 || r.diameter() < 1e-7 {
        if let Some(z) = poly.newton(r.center(), 60) {
            let slack = 1e-9 * r.diameter();
            let grown = Rect { re0: r.re0 - slack, re1: r.re1 + slack, im0: r.im0 - slack, im1: r.im1 + slack };
            if grown.contains(z) {
                out.push((z, n));
                return Ok(());
            }
        }
        if r.diameter() < 1e-7 {
            return Err(Error::Contour(format!("Newton failed in a tiny rectangle near {}", r.center())));
        }
    }
    if depth > MAX_DEPTH {
        return Err(Error::Contour("subdivision depth exceeded".into()));
    }
    for off in SPLIT_OFFSETS {
        let (a, b) = split(r, 0.5 + off);
        let (Ok(na), Ok(nb)) = (winding_number(poly, a), winding_number(poly, b)) else {
            continue;
        };
        if na + nb != n {
            continue;
        }
        search(poly, a, na, depth + 1, out)?;
        search(poly, b, nb, depth + 1, out)?;
        return Ok(());
    }
    Err(Error::Contour(format!("could not split rectangle {r:?} consistently")))
}

/// Zeros of `P` with real part in `re_band` and `|Im| <= im_max`, located by
/// the argument principle and recursive subdivision, then Newton-refined.
pub fn nonlattice_poles(poly: &DirichletPoly, re_band: (f64, f64), im_max: f64) -> Result<ComplexDimensionSet> {
    let (lo, hi) = re_band;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return domain("real band must be a finite, nonempty interval");
    }
    if !(im_max > 0.0) {
        return domain("im_max must be positive");
    }
    if im_max > IM_MAX_CAP {
        return Err(Error::SizeLimit { what: "pole search height", requested: im_max as u128, cap: IM_MAX_CAP as u128 });
    }
    let corner = Complex64::new(lo, im_max);
    if !poly.eval(corner).is_finite() {
        return Err(Error::Range(format!("P overflows at Re s = {lo}; raise the lower end of the band")));
    }
    // Widen the outer box if a zero sits on or near its boundary; zeros
    // picked up by the wider box are dropped again below.
    let mut rect = None;
    for k in 0..7 {
        let eps = if k == 0 { 0.0 } else { 10f64.powi(k - 8) * (hi - lo).max(1.0) };
        let r = Rect { re0: lo - eps, re1: hi + eps, im0: -im_max - eps, im1: im_max + eps };
        if let Ok(n) = winding_number(poly, r) {
            rect = Some((r, n));
            break;
        }
    }
    let (rect, n) = rect.ok_or_else(|| Error::Contour("outer rectangle touches a zero".into()))?;
    let mut found = Vec::new();
    search(poly, rect, n, 0, &mut found)?;
    let mut poles = Vec::with_capacity(found.len());
    for (z, mult) in found {
        let z = if z.im.abs() < 1e-12 { Complex64::new(z.re, 0.0) } else { z };
        if z.re < lo || z.re > hi || z.im.abs() > im_max {
            continue;
        }
        let pv = poly.eval(z).norm();
        if pv >= ZERO_TOL {
            return Err(Error::Numeric { msg: format!("refined pole {z} is inaccurate"), residual: pv });
        }
        let residue = if mult == 1 {
            residue_simple(poly, z)?
        } else {
            residue_contour(|s| poly.eval(s).inv(), z, 1e-4, 256)
        };
        poles.push(Pole { omega: z, residue, multiplicity: mult });
    }
    ComplexDimensionSet::new(poles, Window { re_min: lo, re_max: hi, im_max }, None, 1.0)
}
