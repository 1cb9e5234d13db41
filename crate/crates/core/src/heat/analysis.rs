//! Checks on computed heat contents: the 2-scaling law, the decomposition
//! remainder of snowflakes and the small-time exponent.

use super::{check_resolution, solve_heat_fdm, HeatProblem, TimeStepping};
use crate::error::{domain, Error, Result};
use crate::sampled::SampledFunction;
use crate::vonkoch::{snowflake, GkfParams};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HeatScalingRow {
    pub t: f64,
    /// `E_{lambda Omega}(t)`.
    pub lhs: f64,
    /// `lambda^2 E_Omega(t / lambda^2)`.
    pub rhs: f64,
    pub rel_dev: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeatScalingReport {
    pub lambda: f64,
    pub h: f64,
    pub rows: Vec<HeatScalingRow>,
    pub max_rel_dev: f64,
    pub budget: f64,
    pub pass: bool,
}

/// Independent solves on `Omega` and `lambda Omega` with the same grid
/// spacing `h`.
pub fn verify_heat_scaling(
    problem: &HeatProblem,
    lambda: f64,
    t_list: &[f64],
    h: f64,
    stepping: TimeStepping,
    budget: f64,
) -> Result<HeatScalingReport> {
    if t_list.is_empty() {
        return domain("no times to compare");
    }
    let small = problem.scaled(lambda)?;
    for &t in t_list {
        check_resolution(t.min(t / (lambda * lambda)), h)?;
    }
    let big_times: Vec<f64> = t_list.iter().map(|t| t / (lambda * lambda)).collect();
    let t_max = t_list.iter().copied().fold(0.0, f64::max);
    let a = solve_heat_fdm(&small, h, stepping, t_max, t_list, false)?;
    let b = solve_heat_fdm(problem, h, stepping, t_max / (lambda * lambda), &big_times, false)?;
    let lookup = |f: &super::HeatField, t: f64| -> f64 {
        let i = f.times.iter().position(|&s| (s - t).abs() <= 1e-12 * t).expect("saved time");
        f.contents[i]
    };
    let rows: Vec<HeatScalingRow> = t_list
        .iter()
        .map(|&t| {
            let lhs = lookup(&a, t);
            let rhs = lambda * lambda * lookup(&b, t / (lambda * lambda));
            HeatScalingRow { t, lhs, rhs, rel_dev: (lhs - rhs).abs() / rhs.abs() }
        })
        .collect();
    let max_rel_dev = rows.iter().map(|r| r.rel_dev).fold(0.0, f64::max);
    Ok(HeatScalingReport { lambda, h, rows, max_rel_dev, budget, pass: max_rel_dev <= budget })
}

/// Allowed growth of `|R(t)| / t` over its median across the window.
pub const REMAINDER_GROWTH: f64 = 4.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RemainderReport {
    pub content: SampledFunction,
    pub remainder: SampledFunction,
    /// `|R_h - R_2h|` at each time.
    pub budget: Vec<f64>,
    /// Median of `|R(t)| / t`.
    pub c_fit: f64,
    /// Largest `(|R(t)| - budget) / t`.
    pub max_ratio: f64,
    pub bounded: bool,
    pub cg_iterations: usize,
}

fn remainder_at(params: GkfParams, problem: &HeatProblem, t_list: &[f64], h: f64, stepping: TimeStepping) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let ratios = params.ratios()?;
    let mut times: Vec<f64> = t_list.to_vec();
    for &(lam, _) in ratios.entries() {
        times.extend(t_list.iter().map(|t| t / (lam * lam)));
    }
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * *b);
    let t_end = *times.last().unwrap();
    let f = solve_heat_fdm(problem, h, stepping, t_end, &times, false)?;
    let e = |t: f64| -> f64 {
        let i = f.times.partition_point(|&s| s < t * (1.0 - 1e-12));
        f.contents[i]
    };
    let mut content = Vec::with_capacity(t_list.len());
    let mut rem = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let copies: f64 = ratios.entries().iter().map(|&(lam, m)| m as f64 * lam * lam * e(t / (lam * lam))).sum();
        content.push(e(t));
        rem.push(e(t) - copies);
    }
    Ok((content, rem, f.cg_iterations))
}

/// `R(t) = E(t) - sum_k m_k lambda_k^2 E(t / lambda_k^2)` for the snowflake,
/// with the copies' contents taken from the 2-scaling law. The budget comes
/// from repeating the computation on the doubled spacing.
pub fn decomposition_remainder(
    params: GkfParams,
    level: u32,
    t_list: &[f64],
    h: f64,
    stepping: TimeStepping,
) -> Result<RemainderReport> {
    if t_list.is_empty() || t_list.windows(2).any(|w| w[1] <= w[0]) {
        return domain("remainder times must be nonempty and increasing");
    }
    let flake = snowflake(params, level)?;
    if !flake.admissible {
        return domain(format!("r = {} is not below the self-avoidance bound", params.r));
    }
    check_resolution(t_list[0], 2.0 * h)?;
    let problem = HeatProblem::new(flake.polygon)?;
    let (content, rem, iters) = remainder_at(params, &problem, t_list, h, stepping)?;
    let (_, rem2, iters2) = remainder_at(params, &problem, t_list, 2.0 * h, stepping)?;
    let budget: Vec<f64> = rem.iter().zip(&rem2).map(|(a, b)| (a - b).abs()).collect();
    let mut ratios: Vec<f64> = rem.iter().zip(t_list).map(|(r, t)| r.abs() / t).collect();
    let max_ratio = rem
        .iter()
        .zip(&budget)
        .zip(t_list)
        .map(|((r, b), t)| (r.abs() - b).max(0.0) / t)
        .fold(0.0, f64::max);
    ratios.sort_by(f64::total_cmp);
    let c_fit = ratios[ratios.len() / 2];
    let bounded = max_ratio.is_finite() && max_ratio <= REMAINDER_GROWTH * c_fit;
    Ok(RemainderReport {
        content: SampledFunction::new(t_list.to_vec(), content)?.with_meta("h", h).with_meta("level", level),
        remainder: SampledFunction::new(t_list.to_vec(), rem)?.with_meta("h", h).with_meta("level", level),
        budget,
        c_fit,
        max_ratio,
        bounded,
        cg_iterations: iters + iters2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub p: f64,
    pub a: f64,
    pub b: f64,
    /// Root-mean-square relative misfit.
    pub rms_rel: f64,
}

/// Least squares in relative error for `E ~ a t^p + b t` at fixed `p`.
fn fit_at(ts: &[f64], es: &[f64], p: f64) -> Option<(f64, f64, f64)> {
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &e) in ts.iter().zip(es) {
        let (u, v) = (t.powf(p) / e, t / e);
        s11 += u * u;
        s12 += u * v;
        s22 += v * v;
        r1 += u;
        r2 += v;
    }
    let det = s11 * s22 - s12 * s12;
    if !(det.abs() > 1e-14 * s11 * s22) {
        return None;
    }
    let a = (r1 * s22 - r2 * s12) / det;
    let b = (s11 * r2 - s12 * r1) / det;
    let ss: f64 = ts.iter().zip(es).map(|(&t, &e)| ((a * t.powf(p) + b * t - e) / e).powi(2)).sum();
    Some((a, b, (ss / ts.len() as f64).sqrt()))
}

/// Exponent `p` of the two-term fit `E ~ a t^p + b t` over `window`,
/// profiled over `p` in `(0, 1)`.
pub fn heat_exponent_fit(content: &SampledFunction, window: (f64, f64)) -> Result<ExponentFit> {
    let (ts, es): (Vec<f64>, Vec<f64>) = content
        .ts()
        .iter()
        .zip(content.vals())
        .filter(|(&t, _)| t >= window.0 * (1.0 - 1e-12) && t <= window.1 * (1.0 + 1e-12))
        .map(|(&t, &e)| (t, e))
        .unzip();
    if ts.len() < 8 {
        return Err(Error::Fit(format!("{} samples in the window, need 8", ts.len())));
    }
    if es.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Fit("heat content must be positive in the window".into()));
    }
    let cost = |p: f64| fit_at(&ts, &es, p).map_or(f64::INFINITY, |f| f.2);
    let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    let (mut best, mut best_c) = (f64::NAN, f64::INFINITY);
    for &p in &grid {
        let c = cost(p);
        if c < best_c {
            best = p;
            best_c = c;
        }
    }
    if !best_c.is_finite() {
        return Err(Error::Fit("two-term fit is degenerate".into()));
    }
    let (mut lo, mut hi) = ((best - 0.01).max(1e-6), (best + 0.01).min(1.0 - 1e-6));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    while hi - lo > 1e-12 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = cost(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = cost(x2);
        }
    }
    let p = 0.5 * (lo + hi);
    let (a, b, rms_rel) = fit_at(&ts, &es, p).ok_or_else(|| Error::Fit("two-term fit is degenerate".into()))?;
    Ok(ExponentFit { p, a, b, rms_rel })
}
