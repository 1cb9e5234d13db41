//! Poles, residues from the factorization, formula terms and partial sums,
//! compared against a directly computed antiderivative.

use super::poles::find_poles;
use super::tube::{sector_samples, FULL_CAP};
use super::Output;
use crate::config::LogRange;
use crate::io::Csv;
use crate::{config_err, Context, Result};
use fractal_dims::explicit::{
    build_terms, compare_explicit, evaluate_sum, residue_radii, zeta_residue, ExplicitReport, FormulaTerm, PartialSumSeries,
    DEFAULT_CUTOFFS,
};
use fractal_dims::field::sector_field;
use fractal_dims::heat::{solve_heat_fdm, HeatProblem, TimeStepping, RESOLUTION_FACTOR};
use fractal_dims::mellin::{default_delta, MellinEvaluator};
use fractal_dims::sampled::{antiderivative, log_grid, SampledFunction};
use fractal_dims::vonkoch::{snowflake, GkfParams};
use fractal_dims::zeta::{ComplexDimensionSet, DirichletPoly, RatioMultiset};
use fractal_dims::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    /// The Cantor string: lengths `3^-n` with multiplicity `2^(n-1)`.
    CantorString,
    /// Lengths `ratio^n` with multiplicity `multiplicity^(n-1)`.
    String { ratio: f64, multiplicity: u32 },
    GkfTube { n: u32, r: f64, level: u32, h: f64 },
    GkfHeat { n: u32, r: f64, level: u32, h: f64 },
}

fn default_k() -> u32 {
    2
}

fn default_cutoffs() -> Vec<f64> {
    DEFAULT_CUTOFFS.to_vec()
}

fn default_times() -> LogRange {
    LogRange::new(1e-3, 1e-1, 10)
}

fn default_epsilon() -> f64 {
    0.05
}

fn default_per_decade() -> usize {
    48
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitConfig {
    pub source: Source,
    #[serde(default = "default_k")]
    pub k: u32,
    #[serde(default = "default_cutoffs")]
    pub cutoffs: Vec<f64>,
    /// Where the sums are evaluated; must stay below `delta`.
    #[serde(default = "default_times")]
    pub times: LogRange,
    /// Required for heat data; otherwise defaults to the largest sample with
    /// at most 90% of the area covered.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Slack in the expected remainder order `beta/alpha - epsilon + k`.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Sampling density of the data.
    #[serde(default = "default_per_decade")]
    pub per_decade: usize,
    #[serde(default = "super::dims::default_max_den")]
    pub max_den: u64,
}

/// Everything the formula needs from one data set.
#[derive(Clone, Debug)]
pub struct ChainData {
    pub ratios: RatioMultiset,
    /// `t^(-beta/alpha)` times the data, up to `delta / lambda_min^alpha`.
    pub f: SampledFunction,
    /// Remainder of the scaling equation on `[.., delta]`.
    pub rem: SampledFunction,
    /// The data itself (`V` or `E`), integrated `k` times for comparison.
    pub direct: SampledFunction,
    pub beta: f64,
    pub alpha: f64,
    pub delta: f64,
}

#[derive(Clone, Debug)]
pub struct ChainResult {
    pub dims: ComplexDimensionSet,
    pub terms: Vec<FormulaTerm>,
    /// Term from the leading small-`t` power of the remainder.
    pub remainder_term: Option<FormulaTerm>,
    /// Sums over the poles of the zeta function of the ratios only.
    pub series: PartialSumSeries,
    /// Last-cutoff sum plus the remainder term.
    pub full: Vec<f64>,
    pub full_max_rel_dev: f64,
    /// Direct against the pole-only sums.
    pub report: ExplicitReport,
    pub warnings: Vec<String>,
}

pub fn explicit_chain(data: &ChainData, k: u32, cutoffs: &[f64], ts: &[f64], epsilon: f64, max_den: u64) -> Result<ChainResult> {
    if ts.iter().any(|&t| t >= data.delta) {
        return config_err(format!("evaluation times must stay below delta = {}", data.delta));
    }
    let Some(&t_cut) = cutoffs.last() else {
        return config_err("at least one cutoff is required");
    };
    let poly = DirichletPoly::new(data.ratios.clone());
    let dims = find_poles(&poly, t_cut, max_den, None)?;
    let f = MellinEvaluator::new(data.f.clone()).ctx("mellin")?;
    let rem = MellinEvaluator::new(data.rem.clone()).ctx("mellin")?;
    let radii = residue_radii(&dims);
    let residues = dims
        .poles()
        .iter()
        .zip(&radii)
        .map(|(p, &r)| zeta_residue(&poly, &f, &rem, p.omega, data.delta, data.alpha, r))
        .collect::<fractal_dims::Result<Vec<_>>>()
        .ctx("explicit-formula")?;
    let (terms, warnings) = build_terms(&dims, &residues, data.beta, data.alpha, k).ctx("explicit-formula")?;
    let series = evaluate_sum(&terms, ts, cutoffs).ctx("explicit-formula")?;

    // A remainder behaving like c t^p contributes c delta^(s+p)/(s+p) to its
    // zeta function, so s -> zeta_f(s/alpha) gains a pole at -alpha p.
    let remainder_term = match rem.tail() {
        Some((p, c)) => {
            let omega = Complex64::new(-data.alpha * p, 0.0);
            let res = data.alpha * c * poly.eval(omega).inv();
            Some(FormulaTerm::new(omega, res, data.beta, data.alpha, k).ctx("explicit-formula")?)
        }
        None => None,
    };
    let last = series.sums.last().expect("one row per cutoff");
    let full: Vec<f64> = ts.iter().zip(last).map(|(&t, &s)| s + remainder_term.map_or(0.0, |r| r.eval(t).re)).collect();
    let mut full_max_rel_dev: f64 = 0.0;
    for (&t, &s) in ts.iter().zip(&full) {
        let d = data.direct.interp(t).ctx("sampled")?;
        full_max_rel_dev = full_max_rel_dev.max((d - s).abs() / d.abs());
    }
    let expected = data.beta / data.alpha - epsilon + k as f64;
    let report = compare_explicit(&data.direct, &series, cutoffs.len() - 1, expected, 1e-9).ctx("explicit-formula")?;
    Ok(ChainResult { dims, terms, remainder_term, series, full, full_max_rel_dev, report, warnings })
}

/// Tube function `sum_n m^(n-1) min(r^n, 2t)` of a self-similar string.
pub fn string_tube(ratio: f64, mult: u32, t: f64) -> f64 {
    let m = mult as f64;
    let (mut v, mut len, mut count) = (0.0, ratio, 1.0);
    while count * len > 1e-18 * (v + 1e-300) || v == 0.0 {
        v += count * len.min(2.0 * t);
        len *= ratio;
        count *= m;
        if len == 0.0 {
            break;
        }
    }
    v
}

fn string_data(ratio: f64, mult: u32, cfg: &ExplicitConfig) -> Result<ChainData> {
    if !(ratio > 0.0 && ratio < 1.0 && mult >= 1 && ratio * (mult as f64) < 1.0) {
        return config_err("a string needs 0 < ratio < 1 and multiplicity * ratio < 1");
    }
    let total = ratio / (1.0 - mult as f64 * ratio);
    let lo = cfg.times.t0 * 1e-3;
    let grid = log_grid(lo, total, cfg.per_decade);
    let v = SampledFunction::from_fn(grid.clone(), |t| string_tube(ratio, mult, t)).ctx("sampled")?;
    let delta = match cfg.delta {
        Some(d) => d,
        None => default_delta(&v, total, 0.9).ctx("mellin")?,
    };
    let f = v.map(|t, x| x / t).ctx("sampled")?;
    let mut rts: Vec<f64> = grid.iter().copied().filter(|&t| t < delta * (1.0 - 1e-12)).collect();
    rts.push(delta);
    let rem = SampledFunction::from_fn(rts, |t| (string_tube(ratio, mult, t) - mult as f64 * ratio * string_tube(ratio, mult, t / ratio)) / t)
        .ctx("sampled")?;
    let direct = antiderivative(&v, cfg.k).ctx("sampled")?;
    let ratios = RatioMultiset::new(&[(ratio, mult)]).ctx("zeta")?;
    Ok(ChainData { ratios, f, rem, direct, beta: 1.0, alpha: 1.0, delta })
}

fn tube_data(n: u32, r: f64, level: u32, h: f64, cfg: &ExplicitConfig) -> Result<ChainData> {
    let p = GkfParams::new(n, r).ctx("vonkoch")?;
    let ratios = p.ratios().ctx("vonkoch")?;
    let field = sector_field(p, level, h, FULL_CAP).ctx("geometry-field")?;
    let s = sector_samples(&field, &ratios, None, cfg.per_decade, cfg.delta, 0.9)?;
    let direct = antiderivative(&s.tube, cfg.k).ctx("sampled")?;
    Ok(ChainData { ratios, f: s.f, rem: s.rem, direct, beta: 2.0, alpha: 1.0, delta: s.delta })
}

fn heat_data(n: u32, r: f64, level: u32, h: f64, cfg: &ExplicitConfig) -> Result<ChainData> {
    let Some(delta) = cfg.delta else {
        return config_err("heat data needs an explicit delta");
    };
    let p = GkfParams::new(n, r).ctx("vonkoch")?;
    let ratios = p.ratios().ctx("vonkoch")?;
    let flake = snowflake(p, level).ctx("vonkoch")?;
    if !flake.admissible {
        return config_err(format!("r = {r} is not below the self-avoidance bound"));
    }
    let lo = cfg.times.t0.min(delta) * 0.5;
    if lo < RESOLUTION_FACTOR * h * h {
        return config_err(format!("times from {lo} are not resolved at h = {h}"));
    }
    let lam_min = ratios.entries().last().expect("nonempty").0;
    let top = delta / (lam_min * lam_min);
    let grid = log_grid(lo, top, cfg.per_decade);
    let problem = HeatProblem::new(flake.polygon).ctx("heat")?;
    let field = solve_heat_fdm(&problem, h, TimeStepping::default(), top, &grid, false).ctx("heat")?;
    let e = SampledFunction::new(field.times.clone(), field.contents.clone()).ctx("heat")?;
    let f = e.map(|t, x| x / t).ctx("sampled")?;
    let mut rts: Vec<f64> = grid.iter().copied().filter(|&t| t < delta * (1.0 - 1e-12)).collect();
    rts.push(delta);
    let mut rvals = Vec::with_capacity(rts.len());
    for &t in &rts {
        let mut x = e.interp(t).ctx("sampled")?;
        for &(lam, m) in ratios.entries() {
            x -= m as f64 * lam * lam * e.interp(t / (lam * lam)).ctx("sampled")?;
        }
        rvals.push(x / t);
    }
    let rem = SampledFunction::new(rts, rvals).ctx("heat")?;
    let direct = antiderivative(&e, cfg.k).ctx("sampled")?;
    Ok(ChainData { ratios, f, rem, direct, beta: 2.0, alpha: 2.0, delta })
}

pub fn run(cfg: &ExplicitConfig) -> Result<Output> {
    if cfg.k < 2 {
        return config_err("pointwise formulas need k >= 2");
    }
    let data = match cfg.source {
        Source::CantorString => string_data(1.0 / 3.0, 2, cfg)?,
        Source::String { ratio, multiplicity } => string_data(ratio, multiplicity, cfg)?,
        Source::GkfTube { n, r, level, h } => tube_data(n, r, level, h, cfg)?,
        Source::GkfHeat { n, r, level, h } => heat_data(n, r, level, h, cfg)?,
    };
    let ts = cfg.times.grid()?;
    let res = explicit_chain(&data, cfg.k, &cfg.cutoffs, &ts, cfg.epsilon, cfg.max_den)?;

    let mut out = Output::default();
    let mut header: Vec<String> = vec!["t".into(), "direct".into()];
    header.extend(cfg.cutoffs.iter().map(|c| format!("poles_T{c}")));
    header.extend(["remainder_term".into(), "full".into(), "residual".into()]);
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&header_refs);
    for (i, &t) in ts.iter().enumerate() {
        let mut row = vec![t, data.direct.interp(t).ctx("sampled")?];
        row.extend(res.series.sums.iter().map(|s| s[i]));
        row.push(res.remainder_term.map_or(0.0, |r| r.eval(t).re));
        row.push(res.full[i]);
        row.push(res.report.residual[i]);
        csv.nums(&row);
    }
    out.file("series.csv", csv.into_bytes());

    let mut csv = Csv::new(&["re", "im", "res_re", "res_im", "coeff_re", "coeff_im", "exp_re", "exp_im"]);
    for term in res.terms.iter().chain(res.remainder_term.iter()) {
        let res_v = term.residue;
        csv.nums(&[term.omega.re, term.omega.im, res_v.re, res_v.im, term.coeff.re, term.coeff.im, term.exponent.re, term.exponent.im]);
    }
    out.file("terms.csv", csv.into_bytes());

    out.verdict("residual_order", res.report.pass);
    out.summary = json!({
        "delta": data.delta,
        "beta": data.beta,
        "alpha": data.alpha,
        "poles": res.dims.poles().len(),
        "remainder_pole": res.remainder_term.map(|r| r.omega.re),
        "full_max_rel_dev": res.full_max_rel_dev,
        "poles_only_max_rel_dev": res.report.max_rel_dev,
        "residual_slope": res.report.residual_slope,
        "expected_residual_order": data.beta / data.alpha - cfg.epsilon + cfg.k as f64,
        "leakage": res.series.leakage,
        "warnings": res.warnings,
    });
    Ok(out)
}
