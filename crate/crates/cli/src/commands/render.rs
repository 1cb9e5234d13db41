//! Prefractal curves and snowflake outlines as SVG and vertex lists.

use super::Output;
use crate::config::GkfSpec;
use crate::io::Csv;
use crate::svg::Plot;
use crate::{Context, Result};
use fractal_dims::geometry::bbox_of;
use fractal_dims::vonkoch::{prefractal, snowflake};
use fractal_dims::Point;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// One prefractal curve from `(0,0)` to `(1,0)`.
    Curve,
    #[default]
    Snowflake,
}

fn default_size() -> f64 {
    600.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderConfig {
    pub gkf: GkfSpec,
    pub level: u32,
    #[serde(default)]
    pub shape: Shape,
    #[serde(default = "default_size")]
    pub size: f64,
}

pub fn run(cfg: &RenderConfig) -> Result<Output> {
    let p = cfg.gkf.params()?;
    let mut out = Output::default();
    let (vertices, closed): (Vec<Point>, bool) = match cfg.shape {
        Shape::Curve => (prefractal(p, cfg.level).ctx("vonkoch")?.vertices().to_vec(), false),
        Shape::Snowflake => {
            let flake = snowflake(p, cfg.level).ctx("vonkoch")?;
            out.verdict("admissible", flake.admissible);
            out.summary = json!({ "warnings": flake.warnings });
            (flake.polygon.vertices().to_vec(), true)
        }
    };
    let (lo, hi) = bbox_of(&vertices);
    let mut plot = Plot::figure((lo.x, lo.y), (hi.x, hi.y), cfg.size);
    let pts: Vec<(f64, f64)> = vertices.iter().map(|v| (v.x, v.y)).collect();
    plot.polyline(&pts, closed, "black", if closed { "#dde6f0" } else { "none" });
    out.file("render.svg", plot.finish("", ""));
    let mut csv = Csv::new(&["x", "y"]);
    for v in &vertices {
        csv.nums(&[v.x, v.y]);
    }
    out.file("polyline.csv", csv.into_bytes());
    out.file("polyline.json", serde_json::to_vec(&json!({ "closed": closed, "vertices": pts }))?);
    let mut summary = json!({ "vertices": vertices.len(), "closed": closed });
    if let Some(w) = out.summary.get("warnings") {
        summary["warnings"] = w.clone();
    }
    out.summary = summary;
    Ok(out)
}
