//! Heat content of a polygon or snowflake with its scaling, remainder,
//! exponent and Monte Carlo checks.

use super::Output;
use crate::config::LogRange;
use crate::io::{grid_dump, Csv};
use crate::{config_err, Context, Result};
use fractal_dims::geometry::RegionPolygon;
use fractal_dims::heat::{
    decomposition_remainder, heat_content, heat_exponent_fit, mc_heat_content, solve_heat_fdm, verify_heat_scaling,
    HeatProblem, TimeStepping,
};
use fractal_dims::point::Point;
use fractal_dims::vonkoch::{snowflake, GkfParams};
use fractal_dims::zeta::similarity_dimension;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Monte Carlo agreement threshold in standard errors.
pub const MC_SIGMAS: f64 = 3.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Domain {
    Square { side: f64 },
    Gkf { n: u32, r: f64, level: u32 },
    Polygon { vertices: Vec<(f64, f64)> },
}

impl Domain {
    pub fn region(&self) -> Result<RegionPolygon> {
        match self {
            Domain::Square { side } => RegionPolygon::rectangle(0.0, 0.0, *side, *side).ctx("geometry"),
            Domain::Gkf { n, r, level } => {
                let flake = snowflake(GkfParams::new(*n, *r).ctx("vonkoch")?, *level).ctx("vonkoch")?;
                if !flake.admissible {
                    return config_err(format!("r = {r} is not below the self-avoidance bound"));
                }
                Ok(flake.polygon)
            }
            Domain::Polygon { vertices } => RegionPolygon::new(vertices.iter().map(|&(x, y)| Point::new(x, y)).collect()).ctx("geometry"),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Stepping {
    /// `dt = ratio * t`, never below `h^2 / 2`.
    Geometric { ratio: f64 },
    Fixed { dt: f64 },
}

impl From<Stepping> for TimeStepping {
    fn from(s: Stepping) -> Self {
        match s {
            Stepping::Geometric { ratio } => TimeStepping::Geometric { ratio },
            Stepping::Fixed { dt } => TimeStepping::Fixed { dt },
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSpec {
    pub lambda: f64,
    /// Allowed relative deviation.
    pub budget: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSpec {
    pub t0: f64,
    pub t1: f64,
    /// Allowed distance from `(2 - D)/2` on snowflakes.
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    pub paths: usize,
    pub seed: u64,
    pub times: Vec<f64>,
}

fn default_stepping() -> Stepping {
    Stepping::Geometric { ratio: fractal_dims::heat::DEFAULT_STEP_RATIO }
}

fn default_times() -> LogRange {
    LogRange::new(1e-4, 1e-2, 5)
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatConfig {
    pub domain: Domain,
    pub h: f64,
    #[serde(default = "one")]
    pub diffusivity: f64,
    #[serde(default = "default_stepping")]
    pub stepping: Stepping,
    #[serde(default = "default_times")]
    pub times: LogRange,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingSpec>,
    /// Decomposition remainder; snowflakes only.
    #[serde(default)]
    pub remainder: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<ExponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSpec>,
    /// Write the temperature at the last time as `heat_field.bin` + `.json`.
    #[serde(default)]
    pub dump_field: bool,
}

pub fn run(cfg: &HeatConfig) -> Result<Output> {
    let problem = HeatProblem::new(cfg.domain.region()?).ctx("heat")?.with_diffusivity(cfg.diffusivity).ctx("heat")?;
    let stepping: TimeStepping = cfg.stepping.into();
    let ts = cfg.times.grid()?;
    let mut saves = ts.clone();
    if let Some(mc) = &cfg.mc {
        saves.extend(&mc.times);
    }
    saves.sort_by(f64::total_cmp);
    saves.dedup();
    let t_end = *saves.last().expect("nonempty time grid");
    let field = solve_heat_fdm(&problem, cfg.h, stepping, t_end, &saves, cfg.dump_field).ctx("heat")?;
    let content = heat_content(&field).ctx("heat")?;
    let mut out = Output::default();
    out.file("heat.csv", content.to_csv("e"));
    let mut summary = json!({
        "area": field.area,
        "cells_inside": field.inside_count(),
        "steps": field.steps,
        "cg_iterations": field.cg_iterations,
        "max_cg_iterations": field.max_cg_iterations,
    });

    if let Some(spec) = cfg.exponent {
        let fit = heat_exponent_fit(&content, (spec.t0, spec.t1)).ctx("heat")?;
        summary["exponent"] = json!(fit);
        if let Domain::Gkf { n, r, .. } = cfg.domain {
            let d = similarity_dimension(&GkfParams::new(n, r).ctx("vonkoch")?.ratios().ctx("vonkoch")?).ctx("zeta")?;
            let expected = (2.0 - d) / 2.0;
            summary["exponent"]["expected"] = json!(expected);
            out.verdict("exponent", (fit.p - expected).abs() <= spec.tolerance);
        }
    }

    if let Some(spec) = cfg.scaling {
        let rep = verify_heat_scaling(&problem, spec.lambda, &ts, cfg.h, stepping, spec.budget).ctx("heat")?;
        let mut csv = Csv::new(&["t", "lhs", "rhs", "rel_dev"]);
        for r in &rep.rows {
            csv.nums(&[r.t, r.lhs, r.rhs, r.rel_dev]);
        }
        out.file("scaling.csv", csv.into_bytes());
        out.verdict("scaling", rep.pass);
        summary["scaling"] = json!({ "lambda": rep.lambda, "max_rel_dev": rep.max_rel_dev, "budget": rep.budget });
    }

    if cfg.remainder {
        let Domain::Gkf { n, r, level } = cfg.domain else {
            return config_err("the decomposition remainder needs a gkf domain");
        };
        let rep = decomposition_remainder(GkfParams::new(n, r).ctx("vonkoch")?, level, &ts, cfg.h, stepping).ctx("heat")?;
        let mut csv = Csv::new(&["t", "e", "remainder", "budget", "ratio"]);
        for (i, &t) in ts.iter().enumerate() {
            let rem = rep.remainder.vals()[i];
            csv.nums(&[t, rep.content.vals()[i], rem, rep.budget[i], rem.abs() / t]);
        }
        out.file("remainder.csv", csv.into_bytes());
        out.verdict("remainder_bounded", rep.bounded);
        summary["remainder"] = json!({ "c_fit": rep.c_fit, "max_ratio": rep.max_ratio });
    }

    if let Some(mc) = &cfg.mc {
        let mut csv = Csv::new(&["t", "mc", "sigma", "fdm", "z"]);
        let mut pass = true;
        for &t in &mc.times {
            let est = mc_heat_content(&problem, t, mc.paths, mc.seed).ctx("heat")?;
            let fdm = content.interp(t).ctx("heat")?;
            let z = (est.value - fdm) / est.sigma;
            pass &= (est.value - fdm).abs() <= MC_SIGMAS * est.sigma;
            csv.nums(&[t, est.value, est.sigma, fdm, z]);
        }
        out.file("mc.csv", csv.into_bytes());
        out.verdict("mc", pass);
    }

    if cfg.dump_field {
        if let Some(g) = field.grid(field.fields.len().saturating_sub(1)) {
            let (raw, side) = grid_dump(&g);
            out.file("heat_field.bin", raw);
            out.file("heat_field.json", side);
        }
    }
    out.summary = summary;
    Ok(out)
}
