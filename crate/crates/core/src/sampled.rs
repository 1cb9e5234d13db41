//! Real functions of `t > 0` sampled on a strictly increasing grid.

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    ts: Vec<f64>,
    vals: Vec<f64>,
    /// Free-form provenance (grid spacing, level, source ...).
    pub meta: BTreeMap<String, Value>,
}

impl SampledFunction {
    pub fn new(ts: Vec<f64>, vals: Vec<f64>) -> Result<Self> {
        if ts.len() != vals.len() {
            return domain("sample times and values differ in length");
        }
        if ts.is_empty() {
            return domain("sampled function needs at least one sample");
        }
        if ts[0] <= 0.0 || ts.windows(2).any(|w| w[1] <= w[0]) {
            return domain("sample times must be positive and strictly increasing");
        }
        if ts.iter().chain(&vals).any(|v| !v.is_finite()) {
            return domain("samples must be finite");
        }
        Ok(SampledFunction { ts, vals, meta: BTreeMap::new() })
    }

    pub fn with_meta(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.meta.insert(key.to_string(), v.into());
        self
    }

    pub fn from_fn(ts: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let vals = ts.iter().map(|&t| f(t)).collect();
        Self::new(ts, vals)
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    pub fn t_min(&self) -> f64 {
        self.ts[0]
    }

    pub fn t_max(&self) -> f64 {
        self.ts[self.ts.len() - 1]
    }

    /// Pointwise map `(t, f(t)) -> g`.
    pub fn map(&self, g: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let vals = self.ts.iter().zip(&self.vals).map(|(&t, &v)| g(t, v)).collect();
        let mut out = Self::new(self.ts.clone(), vals)?;
        out.meta = self.meta.clone();
        Ok(out)
    }

    /// Piecewise-linear interpolation inside the sampled range.
    pub fn interp(&self, t: f64) -> Result<f64> {
        let (lo, hi) = (self.t_min(), self.t_max());
        let tol = 1e-12 * hi;
        if !(t >= lo - tol && t <= hi + tol) {
            return Err(Error::Range(format!("t = {t} outside [{lo}, {hi}]")));
        }
        let i = self.ts.partition_point(|&x| x < t);
        if i == 0 {
            return Ok(self.vals[0]);
        }
        if i >= self.ts.len() {
            return Ok(self.vals[self.ts.len() - 1]);
        }
        let (t0, t1) = (self.ts[i - 1], self.ts[i]);
        let w = (t - t0) / (t1 - t0);
        Ok(self.vals[i - 1] * (1.0 - w) + self.vals[i] * w)
    }

    /// RFC-4180 CSV with header `t,<value_name>`.
    pub fn to_csv(&self, value_name: &str) -> String {
        let mut s = format!("t,{value_name}\r\n");
        for (t, v) in self.ts.iter().zip(&self.vals) {
            s.push_str(&format!("{t:e},{v:e}\r\n"));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut ts = Vec::new();
        let mut vals = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|x| x.trim().parse().ok()).ok_or_else(|| Error::Domain(format!("bad CSV row {}", i + 1)))
            };
            ts.push(parse(it.next())?);
            vals.push(parse(it.next())?);
        }
        Self::new(ts, vals)
    }
}

/// `n` points per decade from `t0` to `t1`, both included.
pub fn log_grid(t0: f64, t1: f64, per_decade: usize) -> Vec<f64> {
    let decades = (t1 / t0).log10();
    let n = ((decades * per_decade as f64).round() as usize).max(1);
    let (l0, l1) = (t0.ln(), t1.ln());
    (0..=n)
        .map(|i| if i == n { t1 } else { (l0 + (l1 - l0) * i as f64 / n as f64).exp() })
        .collect()
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Theil-Sen line: median pairwise slope, then median intercept.
pub fn theil_sen(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(Error::Fit("Theil-Sen needs two or more points".into()));
    }
    let mut slopes = Vec::with_capacity(xs.len() * (xs.len() - 1) / 2);
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if xs[j] != xs[i] {
                slopes.push((ys[j] - ys[i]) / (xs[j] - xs[i]));
            }
        }
    }
    if slopes.is_empty() {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let m = median(&mut slopes);
    let mut icpt: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - m * x).collect();
    Ok((m, median(&mut icpt)))
}

/// Ordinary least-squares line `(slope, intercept)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 || xs.len() != ys.len() {
        return Err(Error::Fit("least squares needs two or more points".into()));
    }
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let m = sxy / sxx;
    Ok((m, my - m * mx))
}

/// Leading power law `c t^p` near the small-`t` end, fitted over the first
/// decade of samples. `None` when the samples there vanish.
pub fn leading_power(f: &SampledFunction) -> Result<Option<(f64, f64)>> {
    let t0 = f.t_min();
    let mut k = f.ts.partition_point(|&t| t <= 10.0 * t0);
    k = k.max(4.min(f.len())).min(64);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..k {
        let v = f.vals[i].abs();
        if v > 0.0 {
            xs.push(f.ts[i].ln());
            ys.push(v.ln());
        }
    }
    if xs.is_empty() {
        return Ok(None);
    }
    if xs.len() < 2 {
        return Err(Error::Fit("too few nonzero samples for the leading power".into()));
    }
    let (p, _) = theil_sen(&xs, &ys)?;
    // Match the first sample exactly.
    Ok(Some((p, f.vals[0] / t0.powf(p))))
}

/// `k`-fold antiderivative from 0 by cumulative trapezoid, seeded below the
/// first sample by the fitted leading power law.
pub fn antiderivative(f: &SampledFunction, k: u32) -> Result<SampledFunction> {
    let mut g = f.clone();
    for _ in 0..k {
        let seed = match leading_power(&g)? {
            None => 0.0,
            Some((p, _)) if p <= -1.0 => {
                return Err(Error::Divergence { re_s: p + 1.0, abscissa: 0.0 });
            }
            Some((p, _)) => g.vals[0] * g.ts[0] / (p + 1.0),
        };
        let mut acc = seed;
        let mut out = Vec::with_capacity(g.len());
        out.push(acc);
        for i in 1..g.len() {
            acc += 0.5 * (g.ts[i] - g.ts[i - 1]) * (g.vals[i] + g.vals[i - 1]);
            out.push(acc);
        }
        let mut next = SampledFunction::new(g.ts.clone(), out)?;
        next.meta = g.meta.clone();
        g = next;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_interp() {
        let g = log_grid(1e-3, 1.0, 10);
        assert_eq!(g.len(), 31);
        assert_eq!(g[30], 1.0);
        let f = SampledFunction::from_fn(vec![1.0, 2.0, 4.0], |t| 2.0 * t).unwrap();
        assert_eq!(f.interp(3.0).unwrap(), 6.0);
        assert!(f.interp(5.0).is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SampledFunction::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(SampledFunction::new(vec![1.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = SampledFunction::from_fn(log_grid(1e-3, 1.0, 7), |t| t.sqrt()).unwrap();
        let back = SampledFunction::from_csv(&f.to_csv("v")).unwrap();
        assert_eq!(back.vals(), f.vals());
    }

    #[test]
    fn leading_power_of_monomial() {
        let f = SampledFunction::from_fn(log_grid(1e-6, 1.0, 20), |t| 3.0 * t.powf(0.37)).unwrap();
        let (p, c) = leading_power(&f).unwrap().unwrap();
        assert!((p - 0.37).abs() < 1e-12 && (c - 3.0).abs() < 1e-10);
    }

    #[test]
    fn antiderivative_of_power() {
        let f = SampledFunction::from_fn(log_grid(1e-6, 1.0, 200), |t| t.powf(-0.5)).unwrap();
        let g = antiderivative(&f, 2).unwrap();
        // Second antiderivative of t^-1/2 is (4/3) t^(3/2).
        for (t, v) in g.ts().iter().zip(g.vals()) {
            let exact = 4.0 / 3.0 * t.powf(1.5);
            assert!((v - exact).abs() < 1e-4 * exact, "t={t}: {v} vs {exact}");
        }
        assert_eq!(antiderivative(&f, 0).unwrap(), f);
    }
}
