//! Complex dimensions in a window, routed to the lattice or nonlattice
//! solver.

use super::dims::default_max_den;
use super::Output;
use crate::config::SystemSpec;
use crate::io::{num, Csv};
use crate::svg::Plot;
use crate::{config_err, Context, Result};
use fractal_dims::zeta::{
    detect_lattice, lattice_poles, lower_similarity_dimension, nonlattice_poles, rescale, similarity_dimension,
    ComplexDimensionSet, DirichletPoly, Window, ZERO_TOL,
};
use fractal_dims::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Margin around `[D_lower, D]` for the nonlattice search box.
const BAND_MARGIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    /// The vertical line `Re(s) = re`.
    pub re: f64,
    pub im_max: f64,
    pub points: usize,
}

fn default_im_max() -> f64 {
    60.0
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolesConfig {
    pub system: SystemSpec,
    #[serde(default = "default_im_max")]
    pub im_max: f64,
    /// Report the poles of `s -> 1/P(alpha s)`.
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "default_max_den")]
    pub max_den: u64,
    /// Keep only poles with real part in this band.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re_band: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
}

/// Poles of `1/P` with `|Im| <= im_max`, optionally restricted to `band`.
pub fn find_poles(poly: &DirichletPoly, im_max: f64, max_den: u64, band: Option<(f64, f64)>) -> Result<ComplexDimensionSet> {
    let ratios = poly.ratios();
    let d = similarity_dimension(ratios).ctx("zeta")?;
    let d_low = lower_similarity_dimension(ratios).ctx("zeta")?;
    let set = match detect_lattice(ratios, max_den) {
        Some(l) => lattice_poles(poly, &l, im_max).ctx("zeta")?,
        None => {
            let (mut lo, mut hi) = (d_low - BAND_MARGIN, d + BAND_MARGIN);
            if let Some(b) = band {
                lo = lo.max(b.0 - BAND_MARGIN);
                hi = hi.min(b.1 + BAND_MARGIN);
            }
            if lo >= hi {
                let window = Window { re_min: lo, re_max: hi, im_max };
                return ComplexDimensionSet::new(vec![], window, None, 1.0).ctx("zeta");
            }
            nonlattice_poles(poly, (lo, hi), im_max).ctx("zeta")?
        }
    };
    let Some((lo, hi)) = band else {
        return Ok(set);
    };
    let kept = set.poles().iter().copied().filter(|p| p.omega.re >= lo && p.omega.re <= hi).collect();
    let mut window = set.window;
    window.re_min = lo;
    window.re_max = hi;
    ComplexDimensionSet::new(kept, window, set.lattice.clone(), set.alpha).ctx("zeta")
}

pub fn run(cfg: &PolesConfig) -> Result<Output> {
    if !(cfg.alpha > 0.0 && cfg.alpha.is_finite()) {
        return config_err("alpha must be positive");
    }
    if let Some((lo, hi)) = cfg.re_band {
        if !(lo <= hi) {
            return config_err("re_band must be [low, high]");
        }
    }
    let ratios = cfg.system.ratios()?;
    let poly = DirichletPoly::new(ratios.clone());
    let d = similarity_dimension(&ratios).ctx("zeta")?;
    let d_low = lower_similarity_dimension(&ratios).ctx("zeta")?;
    let base = find_poles(&poly, cfg.im_max, cfg.max_den, cfg.re_band)?;
    let max_abs_p = base.poles().iter().map(|p| poly.eval(p.omega).norm()).fold(0.0, f64::max);
    let min_abs_dp = base.poles().iter().map(|p| poly.deriv(p.omega).norm()).fold(f64::INFINITY, f64::min);
    let set = if cfg.alpha == 1.0 { base } else { rescale(&base, cfg.alpha).ctx("zeta")? };

    let mut out = Output::default();
    let mut csv = Csv::new(&["re", "im", "res_re", "res_im", "multiplicity"]);
    for p in set.poles() {
        csv.row(vec![num(p.omega.re), num(p.omega.im), num(p.residue.re), num(p.residue.im), p.multiplicity.to_string()]);
    }
    out.file("poles.csv", csv.into_bytes());
    out.file("poles.json", serde_json::to_vec_pretty(&set.to_json())?);

    let a = cfg.alpha;
    let (x_lo, x_hi) = cfg.re_band.unwrap_or((d_low / a - 0.1, d / a + 0.1));
    let mut plot = Plot::new((x_lo.min(d_low / a - 0.1), x_hi.max(d / a + 0.1)), (-cfg.im_max / a, cfg.im_max / a), 480.0, 640.0);
    plot.vline(d / a, "#888");
    if d_low < d {
        plot.vline(d_low / a, "#bbb");
    }
    let pts: Vec<(f64, f64)> = set.poles().iter().map(|p| (p.omega.re, p.omega.im)).collect();
    plot.points(&pts, 2.5, "#c0392b");
    out.file("poles.svg", plot.finish("Re s", "Im s"));

    if let Some(scan) = cfg.scan {
        if scan.points < 2 || !(scan.im_max > 0.0) {
            return config_err("scan needs at least two points and im_max > 0");
        }
        let mut csv = Csv::new(&["re", "im", "val_re", "val_im", "err"]);
        for i in 0..scan.points {
            let im = -scan.im_max + 2.0 * scan.im_max * i as f64 / (scan.points - 1) as f64;
            let z = poly.eval(Complex64::new(scan.re, im) * a).inv();
            csv.nums(&[scan.re, im, z.re, z.im, 0.0]);
        }
        out.file("zeta_scan.csv", csv.into_bytes());
    }

    out.verdict("zeros", max_abs_p < ZERO_TOL);
    out.summary = json!({
        "count": set.poles().len(),
        "similarity_dimension": d,
        "lower_dimension": d_low,
        "lattice": set.lattice,
        "max_abs_p": max_abs_p,
        "min_abs_dp": if min_abs_dp.is_finite() { json!(min_abs_dp) } else { json!(null) },
    });
    Ok(out)
}
