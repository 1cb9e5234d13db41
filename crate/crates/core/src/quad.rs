//! Quadrature rules shared by the contour and Mellin code.

use num_complex::Complex64;
use std::sync::OnceLock;

/// Largest Gauss-Legendre order kept in the table.
pub const GL_MAX: usize = 64;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (&'static [f64], &'static [f64]) {
    static TABLE: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let table = TABLE.get_or_init(|| (0..=GL_MAX).map(legendre_rule).collect());
    let (x, w) = &table[n.clamp(1, GL_MAX)];
    (x, w)
}

fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (vec![], vec![]);
    }
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = x;
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7K15 panel of a complex integrand over `[a, b]`; returns the Kronrod
/// value and `|K - G|`.
pub fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = hl * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * hl, ((k - g) * hl).norm())
}

/// Adaptive G7K15 with bisection; gives up (returning `None`) past
/// `max_panels`.
pub fn adaptive_gk<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Option<(Complex64, f64)> {
    let mut stack = vec![(a, b, abs_tol)];
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi, tol)) = stack.pop() {
        let (v, e) = gk15(f, lo, hi);
        if !v.re.is_finite() || !v.im.is_finite() {
            return None;
        }
        panels += 1;
        if e <= tol || (hi - lo) < 1e-13 * (1.0 + lo.abs()) {
            total += v;
            err += e;
        } else {
            if panels > max_panels {
                return None;
            }
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * tol));
            stack.push((lo, mid, 0.5 * tol));
        }
    }
    Some((total, err))
}
