use super::{DirichletPoly, RatioMultiset};
use crate::error::{domain, Error, Result};

/// Bracket and bisect an increasing function for its zero, then polish
/// with Newton (derivative supplied).
fn increasing_root(f: impl Fn(f64) -> (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut guard = 0;
    while f(lo).0 > 0.0 {
        lo = 2.0 * lo - 1.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::Numeric { msg: "no lower bracket".into(), residual: f(lo).0 });
        }
    }
    while f(hi).0 < 0.0 {
        hi = 2.0 * hi + 1.0;
        guard += 1;
        if guard > 120 {
            return Err(Error::Numeric { msg: "no upper bracket".into(), residual: f(hi).0 });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let (v, d) = f(x);
        if d == 0.0 {
            break;
        }
        let nx = x - v / d;
        if nx.is_finite() && (nx - x).abs() <= (hi - lo).max(1e-15 * x.abs()) * 4.0 {
            x = nx;
        }
    }
    Ok(x)
}

/// The unique real zero of `P`.
pub fn similarity_dimension(ratios: &RatioMultiset) -> Result<f64> {
    if ratios.is_empty() {
        return domain("similarity dimension of an empty ratio list");
    }
    let p = DirichletPoly::new(ratios.clone());
    let d = increasing_root(|s| (p.eval_real(s), p.deriv(s.into()).re))?;
    let res = p.eval_real(d).abs();
    if res > 1e-12 {
        return Err(Error::Numeric { msg: "similarity dimension did not converge".into(), residual: res });
    }
    Ok(d)
}

/// Root of `p(t) = (1/m_M) r_M^-t + sum_{k<M} (m_k/m_M)(r_k/r_M)^t = 1`, with
/// `r_M` the smallest ratio. Coincides with the similarity dimension for a
/// single distinct ratio.
pub fn lower_similarity_dimension(ratios: &RatioMultiset) -> Result<f64> {
    let e = ratios.entries();
    let Some(&(r_m, m_m)) = e.last() else {
        return domain("lower similarity dimension of an empty ratio list");
    };
    let m_m = m_m as f64;
    let lr = r_m.ln();
    let rest: Vec<(f64, f64)> = e[..e.len() - 1]
        .iter()
        .map(|&(r, m)| (m as f64 / m_m, (r / r_m).ln()))
        .collect();
    let g = |t: f64| {
        let head = (-t * lr).exp() / m_m;
        let mut v = head - 1.0;
        let mut d = -lr * head;
        for &(c, l) in &rest {
            let term = c * (t * l).exp();
            v += term;
            d += term * l;
        }
        (v, d)
    };
    let t = increasing_root(g)?;
    let res = g(t).0.abs();
    if res > 1e-12 {
        return Err(Error::Numeric { msg: "lower dimension did not converge".into(), residual: res });
    }
    Ok(t)
}

/// Lower bound `m_M r_M^sigma (1 - p(sigma))` for `|P(sigma + i tau)|`, valid
/// for every real `tau` when `sigma` lies left of the lower dimension.
pub fn screen_lower_bound(poly: &DirichletPoly, sigma: f64) -> Result<f64> {
    let ratios = poly.ratios();
    let d_low = lower_similarity_dimension(ratios)?;
    if sigma >= d_low {
        return domain(format!("screen at {sigma} must lie left of the lower dimension {d_low}"));
    }
    let e = ratios.entries();
    let (r_m, m_m) = e[e.len() - 1];
    let m_m = m_m as f64;
    let mut p = r_m.powf(-sigma) / m_m;
    for &(r, m) in &e[..e.len() - 1] {
        p += m as f64 / m_m * (r / r_m).powf(sigma);
    }
    let bound = m_m * r_m.powf(sigma) * (1.0 - p);
    if !bound.is_finite() {
        return Err(Error::Range(format!("screen bound overflows at {sigma}")));
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vonkoch::GkfParams;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn koch_dimension() {
        let r = RatioMultiset::new(&[(1.0 / 3.0, 4)]).unwrap();
        let d = similarity_dimension(&r).unwrap();
        assert!((d - 4f64.ln() / 3f64.ln()).abs() < 1e-13);
        let dl = lower_similarity_dimension(&r).unwrap();
        assert!((dl - d).abs() < 1e-13);
    }

    #[test]
    fn cantor_and_single_map() {
        let r = RatioMultiset::new(&[(1.0 / 3.0, 2)]).unwrap();
        assert!((similarity_dimension(&r).unwrap() - 2f64.ln() / 3f64.ln()).abs() < 1e-13);
        let r = RatioMultiset::new(&[(0.5, 1)]).unwrap();
        assert!(similarity_dimension(&r).unwrap().abs() < 1e-15);
    }

    #[test]
    fn gkf_lower_dimension_signs() {
        let r = 0.2;
        let dl = |n| lower_similarity_dimension(&GkfParams::new(n, r).unwrap().ratios().unwrap()).unwrap();
        assert!(dl(3) < 0.0);
        assert!(dl(4).abs() < 1e-12);
        assert!(dl(5) > 0.0);
    }

    #[test]
    fn screen_requires_left_of_lower_dimension() {
        let p = DirichletPoly::new(RatioMultiset::new(&[(0.4, 2), (0.2, 4)]).unwrap());
        let dl = lower_similarity_dimension(p.ratios()).unwrap();
        assert!(screen_lower_bound(&p, dl + 0.1).is_err());
        assert!(screen_lower_bound(&p, dl - 0.1).unwrap() > 0.0);
    }

    fn multiset() -> impl Strategy<Value = RatioMultiset> {
        prop::collection::vec((0.02f64..0.95, 1u32..6), 1..5)
            .prop_map(|v| RatioMultiset::new(&v).unwrap())
    }

    #[test]
    fn screen_bound_overflow_is_an_error() {
        let r = RatioMultiset::new(&[(0.6687, 1), (0.3973, 1), (0.38318397901807577, 3), (0.3830140073258923, 1)]).unwrap();
        let dl = lower_similarity_dimension(&r).unwrap();
        assert!(matches!(screen_lower_bound(&DirichletPoly::new(r), dl - 0.01), Err(Error::Range(_))), "dl = {dl}");
    }

    proptest! {
        #[test]
        fn dimension_is_the_real_zero(r in multiset()) {
            let p = DirichletPoly::new(r.clone());
            let d = similarity_dimension(&r).unwrap();
            prop_assert!(p.eval_real(d).abs() < 1e-12);
            prop_assert!(p.eval_real(d - 1e-6) < 0.0 && p.eval_real(d + 1e-6) > 0.0);
            // The Moran sum decreases, so P increases along the real line.
            let mut prev = f64::NEG_INFINITY;
            for k in 0..40 {
                let v = p.eval_real(d - 2.0 + 0.1 * k as f64);
                prop_assert!(v > prev);
                prev = v;
            }
        }

        #[test]
        fn lower_dimension_not_above_dimension(r in multiset()) {
            let d = similarity_dimension(&r).unwrap();
            let dl = lower_similarity_dimension(&r).unwrap();
            prop_assert!(dl <= d + 1e-12);
        }

        #[test]
        fn screen_bound_holds(r in multiset(), tau in -100.0f64..100.0, gap in 0.01f64..1.0) {
            let p = DirichletPoly::new(r.clone());
            let sigma = lower_similarity_dimension(&r).unwrap() - gap;
            // Nearly equal smallest ratios push sigma beyond double range.
            prop_assume!(sigma > -200.0);
            let b = screen_lower_bound(&p, sigma).unwrap();
            let v = p.eval(Complex64::new(sigma, tau)).norm();
            prop_assert!(v >= b * (1.0 - 1e-12) - 1e-12, "|P| = {v} < bound {b}");
        }
    }
}
