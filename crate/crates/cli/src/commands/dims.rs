//! Similarity dimensions and the lattice verdict of a ratio list.

use super::Output;
use crate::config::SystemSpec;
use crate::io::{num, Csv};
use crate::{Context, Result};
use fractal_dims::vonkoch::self_avoidance_bound;
use fractal_dims::zeta::{detect_lattice, lower_similarity_dimension, similarity_dimension, DEFAULT_MAX_DEN};
use serde::{Deserialize, Serialize};
use serde_json::json;

pub fn default_max_den() -> u64 {
    DEFAULT_MAX_DEN
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsConfig {
    pub system: SystemSpec,
    /// Largest denominator accepted when testing log-ratios for rationality.
    #[serde(default = "default_max_den")]
    pub max_den: u64,
}

pub fn run(cfg: &DimsConfig) -> Result<Output> {
    let ratios = cfg.system.ratios()?;
    let d = similarity_dimension(&ratios).ctx("zeta")?;
    let d_low = lower_similarity_dimension(&ratios).ctx("zeta")?;
    let lattice = detect_lattice(&ratios, cfg.max_den);
    let mut csv = Csv::new(&["similarity_dimension", "lower_dimension", "distinct_ratios", "total_multiplicity", "lattice", "generator"]);
    csv.row(vec![
        num(d),
        num(d_low),
        ratios.entries().len().to_string(),
        ratios.total_multiplicity().to_string(),
        (lattice.is_some() as u8).to_string(),
        lattice.as_ref().map_or(String::new(), |l| num(l.generator)),
    ]);
    let mut out = Output::default();
    out.file("dims.csv", csv.into_bytes());
    let mut summary = json!({
        "similarity_dimension": d,
        "lower_dimension": d_low,
        "lattice": lattice,
    });
    if let Some(g) = cfg.system.gkf {
        let bound = self_avoidance_bound(g.n);
        summary["self_avoidance_bound"] = json!(bound);
        out.verdict("admissible", g.r < bound);
    }
    out.summary = summary;
    Ok(out)
}
