//! Brownian-path estimate of the heat content: `u(x, t)` is the probability
//! that a path started at `x` leaves the region by time `t`.

use super::HeatProblem;
use crate::error::{domain, Result};
use crate::geometry::SegmentTree;
use crate::point::Point;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Euler-Maruyama steps per path.
pub const MC_STEPS: usize = 100;

/// Paths per RNG stream; results do not depend on the thread count.
pub const MC_CHUNK: usize = 4096;

/// Starts farther than `sqrt(4 C t * FAR)` from the boundary are counted as
/// not exiting.
const FAR: f64 = 29.0;

/// Bridge crossings are ignored when both ends are this many `sqrt(C dt)`
/// from the boundary.
const BRIDGE_CUTOFF: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub t: f64,
    pub value: f64,
    /// One standard error.
    pub sigma: f64,
    pub paths: usize,
    pub seed: u64,
}

fn exits(problem: &HeatProblem, tree: &SegmentTree, start: Point, t: f64, rng: &mut ChaCha8Rng) -> bool {
    let c = problem.diffusivity;
    let dist = |p: Point| tree.nearest(p, f64::INFINITY).map_or(f64::INFINITY, |(d, _)| d);
    let mut d = dist(start);
    if d * d > 4.0 * c * t * FAR {
        return false;
    }
    let dt = t / MC_STEPS as f64;
    let step = (2.0 * c * dt).sqrt();
    let near = BRIDGE_CUTOFF * (c * dt).sqrt();
    let mut x = start;
    // `d` is exact when `exact`, otherwise a lower bound.
    let mut exact = true;
    for _ in 0..MC_STEPS {
        let dx = Point::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * step;
        let len = dx.norm();
        let xn = x + dx;
        if d - len >= near {
            x = xn;
            d -= len;
            exact = false;
            continue;
        }
        if !exact {
            d = dist(x);
        }
        if !(len < d || problem.region.contains(xn)) {
            return true;
        }
        let dn = dist(xn);
        let p_cross = (-d * dn / (c * dt)).exp();
        if rng.random::<f64>() < p_cross {
            return true;
        }
        x = xn;
        d = dn;
        exact = true;
    }
    false
}

/// Content estimate `area * (fraction of uniform starts that exit by t)`.
pub fn mc_heat_content(problem: &HeatProblem, t: f64, paths: usize, seed: u64) -> Result<McEstimate> {
    if !(t > 0.0 && t.is_finite()) {
        return domain("Monte Carlo time must be positive");
    }
    if paths == 0 {
        return domain("at least one path is required");
    }
    let region = &problem.region;
    let tree = SegmentTree::new(region.edges().collect())?;
    let (lo, hi) = region.bbox();
    let chunks = paths.div_ceil(MC_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = MC_CHUNK.min(paths - c * MC_CHUNK);
            let mut hits = 0;
            for _ in 0..count {
                let start = loop {
                    let p = Point::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
                    if region.contains(p) {
                        break p;
                    }
                };
                if exits(problem, &tree, start, t, &mut rng) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let area = region.area();
    let p = hits as f64 / paths as f64;
    Ok(McEstimate { t, value: area * p, sigma: area * (p * (1.0 - p) / paths as f64).sqrt(), paths, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RegionPolygon;

    #[test]
    fn deterministic_and_close_to_half_line_law() {
        let p = HeatProblem::new(RegionPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap()).unwrap();
        let t = 1e-3;
        let a = mc_heat_content(&p, t, 20_000, 7).unwrap();
        let b = mc_heat_content(&p, t, 20_000, 7).unwrap();
        assert_eq!(a, b);
        // Two crossed intervals: 2 E1 - E1^2 with E1 = 4 sqrt(t / pi).
        let e1 = 4.0 * (t / std::f64::consts::PI).sqrt();
        let approx = 2.0 * e1 - e1 * e1;
        assert!((a.value - approx).abs() < 4.0 * a.sigma, "{} vs {approx} (sigma {})", a.value, a.sigma);
    }
}
