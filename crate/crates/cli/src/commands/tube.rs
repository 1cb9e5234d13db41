//! Tube function of a von Koch sector: scaling functional equation, Minkowski
//! fit and the zeta factorization on measured data.

use super::Output;
use crate::config::{GkfSpec, LogRange};
use crate::io::{grid_dump, Csv};
use crate::{config_err, Context, Result};
use fractal_dims::field::{minkowski_fit, sector_field, tube_function, verify_gkf_sfe, DistanceField, MIN_T_OVER_H};
use fractal_dims::mellin::{budget_integral, default_delta, verify_zeta_identity};
use fractal_dims::sampled::{log_grid, SampledFunction};
use fractal_dims::zeta::{similarity_dimension, DirichletPoly, RatioMultiset};
use fractal_dims::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Distance cap: larger than any sector of a unit-side polygon.
pub const FULL_CAP: f64 = 4.0;

/// Default start of the zeta sampling, in grid spacings. Below this the
/// remainder is dominated by pixelation.
const ZETA_T_MIN_OVER_H: f64 = 15.0;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub t0: f64,
    pub t1: f64,
    pub per_decade: usize,
    /// Allowed distance of the fitted dimension from the similarity
    /// dimension.
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaSpec {
    /// Points `[re, im]`.
    pub s: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    /// Defaults to the largest sample with `V <= area_fraction * area`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub per_decade: usize,
    pub area_fraction: f64,
}

impl Default for ZetaSpec {
    fn default() -> Self {
        ZetaSpec { s: vec![(2.0, 0.0), (2.5, 0.0), (3.0, 0.0)], t_min: None, delta: None, per_decade: 24, area_fraction: 0.9 }
    }
}

fn default_sfe_times() -> LogRange {
    LogRange::new(0.01, 0.05, 14)
}

fn default_zeta() -> Option<ZetaSpec> {
    Some(ZetaSpec::default())
}

fn default_fit() -> FitSpec {
    FitSpec { t0: 1e-3, t1: 1e-1, per_decade: 20, tolerance: 0.05 }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeConfig {
    pub gkf: GkfSpec,
    pub level: u32,
    pub h: f64,
    #[serde(default = "default_sfe_times")]
    pub sfe_times: LogRange,
    #[serde(default = "default_fit")]
    pub fit: FitSpec,
    /// `null` skips the factorization check.
    #[serde(default = "default_zeta")]
    pub zeta: Option<ZetaSpec>,
    /// Also write the distance field as `distance.bin` + `distance.json`.
    #[serde(default)]
    pub dump_grid: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub s: Complex64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub quad_error: f64,
    pub budget: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub delta: f64,
    pub t_min: f64,
    pub rows: Vec<IdentityCheck>,
}

/// Samples of `f = t^-2 V` on `[t_min, cap]` and of the remainder
/// `t^-2 (V(t) - sum m lambda^2 V(t/lambda))` on `[t_min, delta]`.
#[derive(Clone, Debug)]
pub struct SectorSamples {
    pub tube: SampledFunction,
    pub f: SampledFunction,
    pub rem: SampledFunction,
    pub delta: f64,
    pub t_min: f64,
}

pub fn sector_samples(
    field: &DistanceField,
    ratios: &RatioMultiset,
    t_min: Option<f64>,
    per_decade: usize,
    delta: Option<f64>,
    area_fraction: f64,
) -> Result<SectorSamples> {
    let h = field.h();
    let t_min = t_min.unwrap_or(ZETA_T_MIN_OVER_H * h);
    if t_min < MIN_T_OVER_H * h {
        return config_err(format!("t_min = {t_min} is below {MIN_T_OVER_H} h"));
    }
    let grid = log_grid(t_min, field.d_cap, per_decade);
    let tube = tube_function(field, &grid).ctx("geometry-field")?;
    let delta = match delta {
        Some(d) => d,
        None => default_delta(&tube, field.region_area(), area_fraction).ctx("mellin")?,
    };
    let lam_min = ratios.entries().last().map_or(1.0, |e| e.0);
    if !(delta > t_min && delta / lam_min <= field.d_cap) {
        return config_err(format!("delta = {delta} must lie in ({t_min}, {})", field.d_cap * lam_min));
    }
    let v = |t: f64| field.tube_volume(t).ctx("geometry-field");
    let f = tube.map(|t, v| v / (t * t)).ctx("geometry-field")?;
    let mut rts: Vec<f64> = grid.iter().copied().filter(|&t| t < delta * (1.0 - 1e-12)).collect();
    rts.push(delta);
    let mut rvals = Vec::with_capacity(rts.len());
    for &t in &rts {
        let mut r = v(t)?;
        for &(lam, m) in ratios.entries() {
            r -= m as f64 * lam * lam * v(t / lam)?;
        }
        rvals.push(r / (t * t));
    }
    let rem = SampledFunction::new(rts, rvals).ctx("geometry-field")?;
    Ok(SectorSamples { tube, f, rem, delta, t_min })
}

/// The zeta factorization on sector data at each `s`, against the grid
/// budget carried through the Mellin integrals.
pub fn zeta_identity_check(field: &DistanceField, ratios: &RatioMultiset, spec: &ZetaSpec) -> Result<IdentityReport> {
    let SectorSamples { f, rem, delta, t_min, .. } =
        sector_samples(field, ratios, spec.t_min, spec.per_decade, spec.delta, spec.area_fraction)?;
    let s_list: Vec<Complex64> = spec.s.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
    let rows = verify_zeta_identity(ratios, &f, &rem, &s_list, delta, 1.0).ctx("mellin")?;
    let poly = DirichletPoly::new(ratios.clone());
    let rows = rows
        .into_iter()
        .map(|r| {
            let sigma = r.s.re;
            let zl = poly.eval(r.s).inv().norm();
            let budget = (1.0 + zl * (1.0 + ratios.moran(sigma))) * budget_integral(field.budget(), sigma, 2.0, t_min, delta);
            let abs_dev = (r.lhs - r.rhs).norm();
            IdentityCheck { s: r.s, lhs: r.lhs, rhs: r.rhs, abs_dev, rel_dev: r.rel_dev, quad_error: r.quad_error, budget, pass: abs_dev <= budget }
        })
        .collect();
    Ok(IdentityReport { delta, t_min, rows })
}

pub fn run(cfg: &TubeConfig) -> Result<Output> {
    let p = cfg.gkf.params()?;
    let ratios = p.ratios().ctx("vonkoch")?;
    let d = similarity_dimension(&ratios).ctx("zeta")?;
    let h = cfg.h;
    if !(h > 0.0) {
        return config_err("h must be positive");
    }
    if cfg.fit.t0 < MIN_T_OVER_H * h || cfg.fit.t1 <= cfg.fit.t0 {
        return config_err(format!("fit window must start at or above {MIN_T_OVER_H} h"));
    }
    let mut out = Output::default();

    let sfe = verify_gkf_sfe(p, cfg.level, &cfg.sfe_times.grid()?, h).ctx("geometry-field")?;
    let mut csv = Csv::new(&["t", "v", "v_ell", "v_r", "residual", "upper", "budget", "pass"]);
    for r in &sfe.rows {
        csv.nums(&[r.t, r.v, r.v_ell, r.v_r, r.residual, r.upper, r.budget, r.pass as u8 as f64]);
    }
    out.file("sfe.csv", csv.into_bytes());
    out.verdict("sfe_sector", sfe.pass);
    out.verdict("sfe_full", sfe.full_pass);
    let max_excess = sfe.rows.iter().map(|r| (r.residual - r.upper).max(0.0)).fold(0.0, f64::max);

    let field = sector_field(p, cfg.level, h, FULL_CAP).ctx("geometry-field")?;
    let tube = tube_function(&field, &log_grid(cfg.fit.t0, cfg.fit.t1, cfg.fit.per_decade)).ctx("geometry-field")?;
    out.file("tube.csv", tube.to_csv("v"));
    let (d_fit, c_fit) = minkowski_fit(&tube, (cfg.fit.t0, cfg.fit.t1)).ctx("geometry-field")?;
    out.verdict("minkowski", (d_fit - d).abs() <= cfg.fit.tolerance);

    let mut summary = json!({
        "similarity_dimension": d,
        "sfe": {
            "sector_constant": sfe.sector_constant,
            "full_constant": sfe.full_constant,
            "budget": sfe.rows.first().map(|r| r.budget),
            "max_excess_over_bound": max_excess,
        },
        "minkowski": { "dimension": d_fit, "prefactor": c_fit, "window": [cfg.fit.t0, cfg.fit.t1] },
        "grid": { "h": h, "cells_inside": field.inside_count(), "budget": field.budget() },
    });

    if let Some(spec) = &cfg.zeta {
        let rep = zeta_identity_check(&field, &ratios, spec)?;
        let mut csv = Csv::new(&["s_re", "s_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_dev", "rel_dev", "quad_error", "budget"]);
        for r in &rep.rows {
            csv.nums(&[r.s.re, r.s.im, r.lhs.re, r.lhs.im, r.rhs.re, r.rhs.im, r.abs_dev, r.rel_dev, r.quad_error, r.budget]);
        }
        out.file("zeta_identity.csv", csv.into_bytes());
        out.verdict("zeta_identity", rep.rows.iter().all(|r| r.pass));
        summary["zeta_identity"] = json!({ "delta": rep.delta, "t_min": rep.t_min, "rows": rep.rows });
    }
    if cfg.dump_grid {
        let (raw, side) = grid_dump(&field.grid);
        out.file("distance.bin", raw);
        out.file("distance.json", side);
    }
    out.summary = summary;
    Ok(out)
}
