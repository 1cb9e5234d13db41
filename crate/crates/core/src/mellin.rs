//! Truncated Mellin transforms of sampled functions and the zeta functions
//! built from them.

use crate::error::{domain, Error, Result};
use crate::quad::gauss_legendre;
use crate::sampled::{leading_power, SampledFunction};
use crate::zeta::{DirichletPoly, RatioMultiset};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Above this `|Im s|` the local polynomials are integrated against `e^(s u)` in
/// closed form instead of by Gauss-Legendre.
pub const OSCILLATORY_IM: f64 = 20.0;

/// Required margin of `Re(s)` past the abscissa for integrals reaching 0.
pub const ABSCISSA_MARGIN: f64 = 1e-9;

/// Nodes in each local interpolating polynomial.
const STENCIL: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaSample {
    pub s: Complex64,
    pub value: Complex64,
    pub quad_error: f64,
}

/// A sampled `f` together with a power-law model `c t^p` below its first
/// sample.
#[derive(Clone, Debug)]
pub struct MellinEvaluator {
    f: SampledFunction,
    us: Vec<f64>,
    tail: Option<(f64, f64)>,
}

impl MellinEvaluator {
    pub fn new(f: SampledFunction) -> Result<Self> {
        let tail = leading_power(&f)?;
        let us = f.ts().iter().map(|t| t.ln()).collect();
        Ok(MellinEvaluator { f, us, tail })
    }

    pub fn function(&self) -> &SampledFunction {
        &self.f
    }

    /// Fitted `(p, c)` of the small-`t` model, if the data does not vanish.
    pub fn tail(&self) -> Option<(f64, f64)> {
        self.tail
    }

    /// `Re(s)` must exceed this for `M^delta[f](s)` to converge.
    pub fn abscissa(&self) -> f64 {
        self.tail.map_or(f64::NEG_INFINITY, |(p, _)| -p)
    }

    /// `int_a^b t^(s-1) f(t) dt`; `a > b` flips the sign.
    pub fn truncated(&self, s: Complex64, a: f64, b: f64) -> Result<ZetaSample> {
        if a > b {
            let z = self.truncated(s, b, a)?;
            return Ok(ZetaSample { value: -z.value, ..z });
        }
        if !(a >= 0.0) || !b.is_finite() {
            return domain("Mellin bounds must satisfy 0 <= a <= b < inf");
        }
        let (t0, t_end) = (self.f.t_min(), self.f.t_max());
        if b > t_end * (1.0 + 1e-12) {
            return Err(Error::Range(format!("upper bound {b} exceeds the last sample {t_end}")));
        }
        let b = b.min(t_end);
        let mut value = Complex64::new(0.0, 0.0);
        let mut quad_error = 0.0;
        if a < t0 {
            if let Some((p, c)) = self.tail {
                let e = s + p;
                if a == 0.0 && e.re <= ABSCISSA_MARGIN {
                    return Err(Error::Divergence { re_s: s.re, abscissa: -p });
                }
                let x = b.min(t0);
                let pw = |t: f64| if t == 0.0 { Complex64::new(0.0, 0.0) } else { (e * t.ln()).exp() };
                value += (pw(x) - pw(a)) * c / e;
            }
        }
        let (lo, hi) = (a.max(t0), b);
        if hi > lo {
            let (v, e) = self.sampled(s, lo, hi);
            value += v;
            quad_error += e;
        }
        Ok(ZetaSample { s, value, quad_error })
    }

    fn coarse_nodes(&self) -> Vec<usize> {
        let n = self.us.len();
        let mut idx: Vec<usize> = (0..n).step_by(2).collect();
        if *idx.last().unwrap() != n - 1 {
            idx.push(n - 1);
        }
        idx
    }

    /// Sampled part with a Richardson correction against the every-other-node
    /// grid (the local quintic is sixth order).
    fn sampled(&self, s: Complex64, lo: f64, hi: f64) -> (Complex64, f64) {
        let exact = s.im.abs() > OSCILLATORY_IM;
        let all: Vec<usize> = (0..self.us.len()).collect();
        let fine = self.local_poly(&all, s, lo.ln(), hi.ln(), exact);
        if all.len() < 2 * STENCIL {
            return (fine, 0.0);
        }
        let coarse = self.local_poly(&self.coarse_nodes(), s, lo.ln(), hi.ln(), exact);
        let corr = (fine - coarse) / 63.0;
        // The corrected value is not yet asymptotic on coarse grids, so the
        // correction alone can undershoot its error.
        (fine + corr, 4.0 * corr.norm())
    }

    /// `int e^(s u) q(u) du` with `q` the local polynomial through nearby nodes,
    /// by Gauss-Legendre or, for oscillatory `s`, in closed form.
    fn local_poly(&self, idx: &[usize], s: Complex64, ua: f64, ub: f64, exact: bool) -> Complex64 {
        let m = idx.len();
        let (us, fs) = (&self.us, self.f.vals());
        if m == 1 {
            return Complex64::new(0.0, 0.0);
        }
        let first = idx.partition_point(|&i| us[i] <= ua).saturating_sub(1);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in first..m - 1 {
            let (u0, u1) = (us[idx[k]], us[idx[k + 1]]);
            if u0 >= ub {
                break;
            }
            let (x0, x1) = (u0.max(ua), u1.min(ub));
            if x1 <= x0 {
                continue;
            }
            let start = if m < STENCIL { 0 } else { k.saturating_sub(STENCIL / 2 - 1).min(m - STENCIL) };
            let stencil: Vec<(f64, f64)> = (start..(start + STENCIL).min(m)).map(|j| (us[idx[j]] - x0, fs[idx[j]])).collect();
            if exact {
                acc += exp_poly_integral(&monomial(&stencil), s, x0, x1 - x0);
                continue;
            }
            let width = x1 - x0;
            let nodes = (6.0 + 1.5 * s.norm() * width).ceil() as usize;
            let (gx, gw) = gauss_legendre(nodes);
            let half = 0.5 * width;
            for (&x, &w) in gx.iter().zip(gw) {
                let v = half * (1.0 + x);
                acc += (s * (x0 + v)).exp() * (lagrange(&stencil, v) * w * half);
            }
        }
        acc
    }
}

/// Monomial coefficients of the interpolating polynomial (Newton form,
/// expanded).
fn monomial(st: &[(f64, f64)]) -> Vec<f64> {
    let n = st.len();
    let mut dd: Vec<f64> = st.iter().map(|p| p.1).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (st[i].0 - st[i - j].0);
        }
    }
    let mut coef = vec![0.0; n];
    for i in (0..n).rev() {
        // coef = coef * (v - v_i) + dd[i]
        let mut next = vec![0.0; n];
        for k in 0..n {
            if k + 1 < n {
                next[k + 1] += coef[k];
            }
            next[k] -= coef[k] * st[i].0;
        }
        next[0] += dd[i];
        coef = next;
    }
    coef
}

/// `int_0^w e^(s (x0 + v)) q(v) dv` for polynomial `q`, by repeated
/// integration by parts.
fn exp_poly_integral(q: &[f64], s: Complex64, x0: f64, w: f64) -> Complex64 {
    let anti = |v: f64| {
        let mut d: Vec<f64> = q.to_vec();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sp = s;
        let mut sign = 1.0;
        while !d.is_empty() {
            let val = d.iter().rev().fold(0.0, |acc, &c| acc * v + c);
            sum += sign * val / sp;
            d = d.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect();
            sp *= s;
            sign = -sign;
        }
        sum * (s * (x0 + v)).exp()
    };
    anti(w) - anti(0.0)
}

fn lagrange(st: &[(f64, f64)], u: f64) -> f64 {
    let mut acc = 0.0;
    for (i, &(ui, fi)) in st.iter().enumerate() {
        let mut l = 1.0;
        for (j, &(uj, _)) in st.iter().enumerate() {
            if i != j {
                l *= (u - uj) / (ui - uj);
            }
        }
        acc += fi * l;
    }
    acc
}

/// `M_a^b[f](s)`.
pub fn truncated_mellin(ev: &MellinEvaluator, s: Complex64, a: f64, b: f64) -> Result<ZetaSample> {
    ev.truncated(s, a, b)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MellinScalingReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_dev: f64,
    pub quad_error_rel: f64,
    pub pass: bool,
}

/// Compare `M^beta[f(lambda .)](s)` with
/// `lambda^-s (M^beta[f](s) + M_beta^(lambda beta)[f](s))`.
pub fn verify_mellin_scaling(f: &SampledFunction, lambda: f64, s: Complex64, beta: f64) -> Result<MellinScalingReport> {
    if !(lambda > 0.0) {
        return domain("scaling factor must be positive");
    }
    let g = SampledFunction::new(f.ts().iter().map(|t| t / lambda).collect(), f.vals().to_vec())?;
    let (ef, eg) = (MellinEvaluator::new(f.clone())?, MellinEvaluator::new(g)?);
    let lhs = eg.truncated(s, 0.0, beta)?;
    let a = ef.truncated(s, 0.0, beta)?;
    let b = ef.truncated(s, beta, lambda * beta)?;
    let scale = (-s * lambda.ln()).exp();
    let rhs = (a.value + b.value) * scale;
    let rel_dev = (lhs.value - rhs).norm() / lhs.value.norm();
    let quad_error_rel = (lhs.quad_error + scale.norm() * (a.quad_error + b.quad_error)) / lhs.value.norm();
    Ok(MellinScalingReport { lhs: lhs.value, rhs, rel_dev, quad_error_rel, pass: rel_dev <= (10.0 * quad_error_rel).max(1e-12) })
}

/// `zeta_X(s; delta) = M^delta[t^-2 V](s)` for a planar tube function.
pub fn tube_zeta(tube: &SampledFunction, s: Complex64, delta: f64) -> Result<ZetaSample> {
    let f = tube.map(|t, v| v / (t * t))?;
    MellinEvaluator::new(f)?.truncated(s, 0.0, delta)
}

/// `zeta_E(s; delta) = M^delta[t^-1 E](s)` for a heat content.
pub fn heat_zeta(content: &SampledFunction, s: Complex64, delta: f64) -> Result<ZetaSample> {
    let f = content.map(|t, v| v / t)?;
    MellinEvaluator::new(f)?.truncated(s, 0.0, delta)
}

/// `sum_k a_k lambda_k^(alpha s) M_delta^(delta / lambda_k^alpha)[f](s)`.
pub fn partial_xi(ratios: &RatioMultiset, f: &MellinEvaluator, s: Complex64, delta: f64, alpha: f64) -> Result<ZetaSample> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut quad_error = 0.0;
    for &(lam, m) in ratios.entries() {
        let la = lam.powf(alpha);
        let w = (s * la.ln()).exp() * m as f64;
        let z = f.truncated(s, delta, delta / la)?;
        value += w * z.value;
        quad_error += w.norm() * z.quad_error;
    }
    Ok(ZetaSample { s, value, quad_error })
}

/// Right side of the zeta factorization,
/// `zeta_L(alpha s) (xi(s; delta) + zeta_R(s; delta))`.
pub fn factorized_zeta(
    poly: &DirichletPoly,
    f: &MellinEvaluator,
    rem: &MellinEvaluator,
    s: Complex64,
    delta: f64,
    alpha: f64,
) -> Result<ZetaSample> {
    let xi = partial_xi(poly.ratios(), f, s, delta, alpha)?;
    let zr = rem.truncated(s, 0.0, delta)?;
    let zl = poly.eval(s * alpha).inv();
    Ok(ZetaSample { s, value: zl * (xi.value + zr.value), quad_error: zl.norm() * (xi.quad_error + zr.quad_error) })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IdentityRow {
    pub s: Complex64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_dev: f64,
    pub quad_error: f64,
}

/// Relative distance, in units of `|P|/|P'|`, below which `s` counts as too
/// close to a pole of `zeta_L(alpha s)`.
pub const POLE_MARGIN: f64 = 0.05;

/// Evaluate both sides of `zeta_f = zeta_L (xi + zeta_R)` at each `s`.
pub fn verify_zeta_identity(
    ratios: &RatioMultiset,
    f: &SampledFunction,
    rem: &SampledFunction,
    s_list: &[Complex64],
    delta: f64,
    alpha: f64,
) -> Result<Vec<IdentityRow>> {
    let poly = DirichletPoly::new(ratios.clone());
    let (ef, er) = (MellinEvaluator::new(f.clone())?, MellinEvaluator::new(rem.clone())?);
    let mut rows = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let (p, dp) = poly.eval_and_deriv(s * alpha);
        if !ratios.is_empty() && p.norm() < POLE_MARGIN * alpha * dp.norm() {
            return Err(Error::PoleProximity { abs_p: p.norm() });
        }
        let lhs = ef.truncated(s, 0.0, delta)?;
        let rhs = factorized_zeta(&poly, &ef, &er, s, delta, alpha)?;
        rows.push(IdentityRow {
            s,
            lhs: lhs.value,
            rhs: rhs.value,
            rel_dev: (lhs.value - rhs.value).norm() / lhs.value.norm(),
            quad_error: lhs.quad_error + rhs.quad_error,
        });
    }
    Ok(rows)
}

/// `int_t0^delta t^(sigma - 1 - d) budget dt`: how far a `budget` error in
/// `t^d f(t)` can move `M^delta[f](sigma + i tau)`.
pub fn budget_integral(budget: f64, sigma: f64, d: f64, t0: f64, delta: f64) -> f64 {
    let e = sigma - d;
    if e.abs() < 1e-12 {
        budget * (delta / t0).ln()
    } else {
        budget * (delta.powf(e) - t0.powf(e)) / e
    }
}

/// Largest sampled `t` where the tube function is at most `fraction` of
/// `area`.
pub fn default_delta(tube: &SampledFunction, area: f64, fraction: f64) -> Result<f64> {
    tube.ts()
        .iter()
        .zip(tube.vals())
        .filter(|(_, &v)| v <= fraction * area)
        .map(|(&t, _)| t)
        .next_back()
        .ok_or_else(|| Error::Range("tube function exceeds the area fraction everywhere".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampled::log_grid;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_transform() {
        let beta = 0.7;
        for k in [0.0, 1.0, 2.5] {
            let f = SampledFunction::from_fn(log_grid(1e-6, 1.0, 96), |t| t.powf(k)).unwrap();
            let ev = MellinEvaluator::new(f).unwrap();
            for s in [c(0.5, 0.0), c(1.3, 4.0), c(2.0, -30.0), c(0.8, 100.0)] {
                let z = ev.truncated(s, 0.0, beta).unwrap();
                let exact = (s + k).inv() * ((s + k) * beta.ln()).exp();
                assert!((z.value - exact).norm() < 1e-8 * exact.norm(), "k={k} s={s}: {} vs {exact}", z.value);
            }
        }
    }

    #[test]
    fn divergence_and_range_errors() {
        let f = SampledFunction::from_fn(log_grid(1e-6, 1.0, 20), |t| t.powf(-1.5)).unwrap();
        let ev = MellinEvaluator::new(f).unwrap();
        assert!((ev.abscissa() - 1.5).abs() < 1e-10);
        assert!(matches!(ev.truncated(c(1.0, 0.0), 0.0, 0.5), Err(Error::Divergence { .. })));
        assert!(matches!(ev.truncated(c(2.0, 0.0), 0.0, 2.0), Err(Error::Range(_))));
        assert!(ev.truncated(c(1.0, 0.0), 0.1, 0.5).is_ok());
    }

    #[test]
    fn segment_and_disc_tube_zetas() {
        let ts = log_grid(1e-6, 1.0, 48);
        let seg = SampledFunction::from_fn(ts.clone(), |t| 2.0 * t + std::f64::consts::PI * t * t).unwrap();
        let s = c(2.0, 1.0);
        let z = tube_zeta(&seg, s, 1.0).unwrap();
        let exact = 2.0 / (s - 1.0) + std::f64::consts::PI / s;
        assert!((z.value - exact).norm() < 1e-5 * exact.norm());
        let e = SampledFunction::from_fn(ts, |t| 3.0 * t.powf(0.6)).unwrap();
        let z = heat_zeta(&e, s, 0.5).unwrap();
        let exact = 3.0 * ((s - 0.4) * 0.5f64.ln()).exp() / (s - 0.4);
        assert!((z.value - exact).norm() < 1e-8 * exact.norm());
    }

    #[test]
    fn single_ratio_partial_xi() {
        // f = 1 on (0, delta/lambda]: xi = delta^s (1 - lambda^s)/s.
        let (delta, lam) = (0.2, 0.5);
        let f = SampledFunction::from_fn(log_grid(1e-4, delta / lam, 20), |_| 1.0).unwrap();
        let ev = MellinEvaluator::new(f).unwrap();
        let r = RatioMultiset::new(&[(lam, 1)]).unwrap();
        let s = c(1.5, 2.0);
        let xi = partial_xi(&r, &ev, s, delta, 1.0).unwrap();
        let ds = (s * delta.ln()).exp();
        let exact = ds * (1.0 - (s * lam.ln()).exp()) / s;
        assert!((xi.value - exact).norm() < 1e-12);
        let zero = SampledFunction::from_fn(log_grid(1e-4, delta / lam, 20), |_| 0.0).unwrap();
        let xi0 = partial_xi(&r, &MellinEvaluator::new(zero).unwrap(), s, delta, 1.0).unwrap();
        assert_eq!(xi0.value, c(0.0, 0.0));
    }

    #[test]
    fn empty_ratios_reduce_to_remainder() {
        let f = SampledFunction::from_fn(log_grid(1e-6, 1.0, 24), |t| t.sqrt()).unwrap();
        let rows = verify_zeta_identity(&RatioMultiset::empty(), &f, &f, &[c(1.0, 0.5)], 0.5, 1.0).unwrap();
        assert!(rows[0].rel_dev < 1e-14);
    }

    #[test]
    fn identity_refuses_points_near_poles() {
        let r = RatioMultiset::new(&[(1.0 / 3.0, 2)]).unwrap();
        let f = SampledFunction::from_fn(log_grid(1e-6, 1.0, 24), |t| t.powf(-0.5)).unwrap();
        let d = 2f64.ln() / 3f64.ln();
        assert!(matches!(
            verify_zeta_identity(&r, &f, &f, &[c(d + 1e-4, 0.0)], 0.3, 1.0),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn trivial_integrals() {
        let one = MellinEvaluator::new(SampledFunction::from_fn(log_grid(0.5, 4.0, 24), |_| 1.0).unwrap()).unwrap();
        assert!((one.truncated(c(1.0, 0.0), 1.0, 2.0).unwrap().value - 1.0).norm() < 1e-13);
        let lin = MellinEvaluator::new(SampledFunction::from_fn(log_grid(1e-4, 1.0, 24), |t| t).unwrap()).unwrap();
        assert!((lin.truncated(c(1.0, 0.0), 0.0, 1.0).unwrap().value - 0.5).norm() < 1e-9);
    }

    #[test]
    fn doubling_density_moves_less_than_error_estimate() {
        for s in [c(0.9, 0.0), c(1.5, 7.0), c(1.2, 45.0)] {
            let coarse = MellinEvaluator::new(SampledFunction::from_fn(log_grid(1e-5, 1.0, 24), |t| t.powf(0.3) * (1.0 + t)).unwrap()).unwrap();
            let fine = MellinEvaluator::new(SampledFunction::from_fn(log_grid(1e-5, 1.0, 48), |t| t.powf(0.3) * (1.0 + t)).unwrap()).unwrap();
            let (a, b) = (coarse.truncated(s, 0.0, 0.9).unwrap(), fine.truncated(s, 0.0, 0.9).unwrap());
            assert!((a.value - b.value).norm() <= a.quad_error.max(1e-14), "s={s}: {} vs {}", (a.value - b.value).norm(), a.quad_error);
        }
    }

    #[test]
    fn delta_shift_stays_bounded_near_a_pole() {
        // t^-2 V for V = t^(2-D) has a pole at D; the difference of two
        // truncations does not.
        let d = 1.3;
        let tube = SampledFunction::from_fn(log_grid(1e-6, 1.0, 48), |t| t.powf(2.0 - d)).unwrap();
        let s = c(d + 1e-6, 0.0);
        let z1 = tube_zeta(&tube, s, 0.2).unwrap().value;
        let z2 = tube_zeta(&tube, s, 0.6).unwrap().value;
        assert!(z1.norm() > 1e5);
        assert!((z2 - z1).norm() < 2.0);
    }

    #[test]
    fn vertical_strip_bound() {
        // |f| <= C t^-p gives |M^delta[f](c + i tau)| <= C delta^(c-p) / (c-p).
        let f = SampledFunction::from_fn(log_grid(1e-6, 1.0, 48), |t| t.powf(-0.7) * (2.0 + (9.0 * t).cos())).unwrap();
        let ev = MellinEvaluator::new(f).unwrap();
        let (cc, p, big_c, delta): (f64, f64, f64, f64) = (1.1, 0.7, 3.0, 0.5);
        let bound = big_c * delta.powf(cc - p) / (cc - p);
        for k in -50..=50 {
            let z = ev.truncated(c(cc, k as f64), 0.0, delta).unwrap();
            assert!(z.value.norm() <= bound);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, re in 0.3f64..2.0, im in -40.0f64..40.0) {
            let ts = log_grid(1e-4, 1.0, 24);
            let f = SampledFunction::from_fn(ts.clone(), |t| 1.0 + t).unwrap();
            let g = SampledFunction::from_fn(ts.clone(), |t| 2.0 + t * t).unwrap();
            let h = SampledFunction::from_fn(ts, |t| a * (1.0 + t) + b * (2.0 + t * t)).unwrap();
            let s = c(re, im);
            let m = |x: SampledFunction| MellinEvaluator::new(x).unwrap().truncated(s, 1e-3, 0.8).unwrap().value;
            let (mf, mg, mh) = (m(f), m(g), m(h));
            prop_assert!((mh - (mf * a + mg * b)).norm() < 1e-12 * (1.0 + mh.norm()));
        }

        #[test]
        fn scaling_identity(k in 0.0f64..2.0, lam in 0.2f64..0.9, re in 0.2f64..2.0, im in -40.0f64..40.0) {
            let f = SampledFunction::from_fn(log_grid(1e-6, 1.0, 48), |t| t.powf(k) * (1.0 + 0.3 * (5.0 * t).sin())).unwrap();
            let rep = verify_mellin_scaling(&f, lam, c(re - 0.0, im), 0.8).unwrap();
            prop_assert!(rep.rel_dev < 1e-6, "{rep:?}");
        }
    }
}
