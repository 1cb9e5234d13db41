//! Heat content of polygonal regions: zero initial temperature, boundary
//! held at 1.

mod analysis;
mod mc;
mod mg;

pub use analysis::{
    decomposition_remainder, heat_exponent_fit, verify_heat_scaling, ExponentFit, HeatScalingReport, HeatScalingRow,
    RemainderReport,
};
pub use mc::{mc_heat_content, McEstimate, MC_CHUNK, MC_STEPS};

use crate::error::{domain, Error, Result};
use crate::field::{inside_mask, Grid2};
use crate::geometry::RegionPolygon;
use crate::sampled::SampledFunction;
use mg::{Level, Multigrid};
use serde::{Deserialize, Serialize};

/// Cap on solver cells (each costs roughly a dozen `f64`s).
pub const HEAT_CELL_CAP: u128 = 30_000_000;

/// Relative residual at which conjugate gradients stop.
pub const CG_TOL: f64 = 1e-10;
pub const CG_MAX_ITER: usize = 500;

/// Boundary distance fractions are clamped below at this value.
pub const THETA_MIN: f64 = 1e-3;

/// Default `dt / t` for geometric stepping.
pub const DEFAULT_STEP_RATIO: f64 = 0.05;

/// Contents below `RESOLUTION_FACTOR * h^2` are not trusted.
pub const RESOLUTION_FACTOR: f64 = 25.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeatProblem {
    pub region: RegionPolygon,
    pub diffusivity: f64,
}

impl HeatProblem {
    pub fn new(region: RegionPolygon) -> Result<Self> {
        if !(region.area() > 0.0) {
            return domain("heat region needs positive area");
        }
        region.check_simple()?;
        Ok(HeatProblem { region, diffusivity: 1.0 })
    }

    pub fn with_diffusivity(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return domain("diffusivity must be positive");
        }
        self.diffusivity = c;
        Ok(self)
    }

    /// The same problem on `lambda * region` (scaled about the origin).
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return domain("scale factor must be positive");
        }
        Ok(HeatProblem { region: self.region.map(|p| p * lambda)?, diffusivity: self.diffusivity })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TimeStepping {
    Fixed { dt: f64 },
    /// `dt = max(h^2 / 2, ratio * t)` in diffusive time.
    Geometric { ratio: f64 },
}

impl TimeStepping {
    pub fn fixed_default(h: f64) -> Self {
        TimeStepping::Fixed { dt: 0.5 * h * h }
    }

    fn next_dt(&self, t: f64, h: f64) -> f64 {
        match *self {
            TimeStepping::Fixed { dt } => dt,
            TimeStepping::Geometric { ratio } => (ratio * t).max(0.5 * h * h),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TimeStepping::Fixed { dt } => dt > 0.0 && dt.is_finite(),
            TimeStepping::Geometric { ratio } => ratio > 0.0 && ratio.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            domain("time step must be positive")
        }
    }
}

impl Default for TimeStepping {
    fn default() -> Self {
        TimeStepping::Geometric { ratio: DEFAULT_STEP_RATIO }
    }
}

pub const CELL_OUTSIDE: u8 = 0;
pub const CELL_INTERIOR: u8 = 1;
/// Inside cell with at least one neighbour outside.
pub const CELL_BOUNDARY: u8 = 2;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeatField {
    pub x0: f64,
    pub y0: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub mask: Vec<u8>,
    pub area: f64,
    pub diffusivity: f64,
    pub times: Vec<f64>,
    pub contents: Vec<f64>,
    /// Temperatures per saved time, empty unless requested.
    pub fields: Vec<Vec<f64>>,
    pub steps: usize,
    pub cg_iterations: usize,
    pub max_cg_iterations: usize,
}

impl HeatField {
    /// Saved temperature `k` as a grid for dumping.
    pub fn grid(&self, k: usize) -> Option<Grid2> {
        self.fields.get(k).map(|v| Grid2 { x0: self.x0, y0: self.y0, h: self.h, nx: self.nx, ny: self.ny, values: v.clone() })
    }

    pub fn inside_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m != CELL_OUTSIDE).count()
    }
}

/// Fraction of `h` from `c` to the nearest crossing strictly beyond it in
/// direction `dir` (+1 or -1).
fn theta(crossings: &[f64], c: f64, dir: f64, h: f64) -> f64 {
    let d = if dir > 0.0 {
        crossings.iter().copied().filter(|&x| x > c).fold(f64::INFINITY, f64::min) - c
    } else {
        c - crossings.iter().copied().filter(|&x| x < c).fold(f64::NEG_INFINITY, f64::max)
    };
    (d / h).clamp(THETA_MIN, 1.0)
}

/// Fine operator: unit-spaced Laplacian with Dirichlet cuts placed at the
/// actual boundary crossing (diagonal `1/theta`, right side `1/theta`).
fn build_fine(region: &RegionPolygon, grid: &Grid2, inside: &[bool]) -> (Level, Vec<f64>, Vec<u8>) {
    let (nx, ny, h) = (grid.nx, grid.ny, grid.h);
    let mut lv = Level::new(nx, ny);
    let mut g = vec![0.0; nx * ny];
    let mut kind = vec![CELL_OUTSIDE; nx * ny];
    let mut col_cache: Vec<Option<Vec<f64>>> = vec![None; nx];
    for j in 1..ny - 1 {
        let cy = grid.y0 + (j as f64 + 0.5) * h;
        let mut row: Option<Vec<f64>> = None;
        for i in 1..nx - 1 {
            let k = j * nx + i;
            if !inside[k] {
                continue;
            }
            lv.active[k] = true;
            kind[k] = CELL_INTERIOR;
            let cx = grid.x0 + (i as f64 + 0.5) * h;
            let mut diag = 0.0;
            let mut cut = 0.0;
            for (nb, dir) in [(k + 1, 1.0), (k - 1, -1.0)] {
                if inside[nb] {
                    diag += 1.0;
                } else {
                    let xs = row.get_or_insert_with(|| region.row_crossings(cy));
                    let w = 1.0 / theta(xs, cx, dir, h);
                    diag += w;
                    cut += w;
                }
            }
            for (nb, dir) in [(k + nx, 1.0), (k - nx, -1.0)] {
                if inside[nb] {
                    diag += 1.0;
                } else {
                    let ys = col_cache[i].get_or_insert_with(|| region.column_crossings(cx));
                    let w = 1.0 / theta(ys, cy, dir, h);
                    diag += w;
                    cut += w;
                }
            }
            if inside[k + 1] {
                lv.cx[k] = 1.0;
            }
            if inside[k + nx] {
                lv.cy[k] = 1.0;
            }
            if cut > 0.0 {
                kind[k] = CELL_BOUNDARY;
            }
            lv.l[k] = diag;
            g[k] = cut;
        }
    }
    (lv, g, kind)
}

/// Implicit Euler on the cell-centred 5-point Laplacian, solved by
/// multigrid-preconditioned CG. Contents are recorded at `save_times`,
/// which the stepping lands on exactly.
pub fn solve_heat_fdm(
    problem: &HeatProblem,
    h: f64,
    stepping: TimeStepping,
    t_end: f64,
    save_times: &[f64],
    keep_fields: bool,
) -> Result<HeatField> {
    if !(h > 0.0 && h.is_finite()) {
        return domain("grid spacing must be positive");
    }
    stepping.validate()?;
    let mut saves: Vec<f64> = save_times.to_vec();
    saves.sort_by(f64::total_cmp);
    saves.dedup();
    if saves.first().is_some_and(|&t| !(t > 0.0)) || saves.last().is_some_and(|&t| t > t_end * (1.0 + 1e-12)) {
        return domain("save times must lie in (0, t_end]");
    }
    let region = &problem.region;
    let (lo, hi) = region.bbox();
    let cells = (((hi.x - lo.x) / h).ceil() as u128 + 2) * (((hi.y - lo.y) / h).ceil() as u128 + 2);
    if cells > HEAT_CELL_CAP {
        return Err(Error::SizeLimit { what: "heat solver cells", requested: cells, cap: HEAT_CELL_CAP });
    }
    let grid = Grid2::covering(region, h)?;
    let inside = inside_mask(&grid, region);
    let (fine, g, kind) = build_fine(region, &grid, &inside);
    let n_in = inside.iter().filter(|&&b| b).count();
    let area = region.area();
    // Slivers between the cell union and the region sit next to the
    // boundary, where u is close to 1.
    let sliver = area - n_in as f64 * h * h;
    let content = |u: &[f64]| h * h * u.iter().sum::<f64>() + sliver;

    let mut mg = Multigrid::new(fine);
    let n = grid.nx * grid.ny;
    let mut u = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut field = HeatField {
        x0: grid.x0,
        y0: grid.y0,
        h,
        nx: grid.nx,
        ny: grid.ny,
        mask: kind,
        area,
        diffusivity: problem.diffusivity,
        times: Vec::with_capacity(saves.len()),
        contents: Vec::with_capacity(saves.len()),
        fields: Vec::new(),
        steps: 0,
        cg_iterations: 0,
        max_cg_iterations: 0,
    };
    let mut t = 0.0;
    for &ts in &saves {
        while t < ts * (1.0 - 1e-13) {
            let mut dt = match stepping {
                TimeStepping::Fixed { dt } => dt,
                // Geometric steps live in diffusive time `C t`.
                _ => stepping.next_dt(problem.diffusivity * t, h) / problem.diffusivity,
            };
            let rest = ts - t;
            if rest <= 1.25 * dt {
                dt = rest;
            } else if rest < 2.0 * dt {
                dt = 0.5 * rest;
            }
            let kappa = problem.diffusivity * dt / (h * h);
            b.iter_mut().zip(&u).zip(&g).for_each(|((bi, ui), gi)| *bi = ui + kappa * gi);
            let st = mg.solve(kappa, &b, &mut u, CG_TOL, CG_MAX_ITER)?;
            field.steps += 1;
            field.cg_iterations += st.iterations;
            field.max_cg_iterations = field.max_cg_iterations.max(st.iterations);
            t = if dt == rest { ts } else { t + dt };
        }
        field.times.push(ts);
        field.contents.push(content(&u));
        if keep_fields {
            field.fields.push(u.clone());
        }
    }
    Ok(field)
}

/// `E(t)` at the saved times.
pub fn heat_content(field: &HeatField) -> Result<SampledFunction> {
    Ok(SampledFunction::new(field.times.clone(), field.contents.clone())?
        .with_meta("h", field.h)
        .with_meta("area", field.area)
        .with_meta("diffusivity", field.diffusivity)
        .with_meta("steps", field.steps))
}

pub(crate) fn check_resolution(t: f64, h: f64) -> Result<()> {
    let limit = RESOLUTION_FACTOR * h * h;
    if t < limit {
        return Err(Error::Resolution { t, limit });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RegionPolygon;
    use crate::point::Point;

    /// Heat content of the unit interval, by its sine series.
    fn interval_content(t: f64) -> f64 {
        let mut s = 0.0;
        let mut m = 1u32;
        loop {
            let mf = m as f64;
            let term = 8.0 / (mf * mf * std::f64::consts::PI.powi(2)) * (-(mf * std::f64::consts::PI).powi(2) * t).exp();
            s += term;
            if term < 1e-17 {
                break;
            }
            m += 2;
        }
        1.0 - s
    }

    #[test]
    fn square_content_against_product_series() {
        let p = HeatProblem::new(RegionPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap()).unwrap();
        let ts = [1e-3, 3e-3, 1e-2, 3e-2, 0.1, 1.0];
        let f = solve_heat_fdm(&p, 1.0 / 100.0, TimeStepping::default(), 1.0, &ts, true).unwrap();
        for (k, &t) in ts.iter().enumerate() {
            let e1 = interval_content(t);
            let exact = 1.0 - (1.0 - e1).powi(2);
            let rel = (f.contents[k] - exact).abs() / exact;
            assert!(rel < 0.02, "t={t}: {} vs {exact}", f.contents[k]);
        }
        // Maximum principle and monotonicity.
        for w in f.fields.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                assert!(*a >= -1e-9 && *b <= 1.0 + 1e-9 && b >= &(a - 1e-9));
            }
        }
        assert!(f.contents.windows(2).all(|w| w[1] >= w[0]));
        assert!(f.contents.iter().all(|&e| e <= p.region.area() + 1e-9));
        assert!((f.contents[5] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn fixed_steps_and_rotation_invariance() {
        let sq = RegionPolygon::rectangle(-0.5, -0.5, 0.5, 0.5).unwrap();
        let rot = sq.map(|q| q.rotate(0.3)).unwrap();
        let h = 1.0 / 128.0;
        let ts = [0.004, 0.01];
        let a = solve_heat_fdm(&HeatProblem::new(sq).unwrap(), h, TimeStepping::default(), 0.01, &ts, false).unwrap();
        let b = solve_heat_fdm(&HeatProblem::new(rot).unwrap(), h, TimeStepping::default(), 0.01, &ts, false).unwrap();
        for k in 0..2 {
            assert!((a.contents[k] - b.contents[k]).abs() < 0.02 * a.contents[k]);
        }
        let c = solve_heat_fdm(
            &HeatProblem::new(RegionPolygon::rectangle(-0.5, -0.5, 0.5, 0.5).unwrap()).unwrap(),
            h,
            TimeStepping::Fixed { dt: 1e-4 },
            0.01,
            &ts,
            false,
        )
        .unwrap();
        assert!((a.contents[1] - c.contents[1]).abs() < 0.01 * a.contents[1]);
    }

    #[test]
    fn diffusivity_rescales_time() {
        let sq = RegionPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let p = HeatProblem::new(sq).unwrap();
        let q = p.clone().with_diffusivity(2.0).unwrap();
        let a = solve_heat_fdm(&p, 0.02, TimeStepping::default(), 0.02, &[0.02], false).unwrap();
        let b = solve_heat_fdm(&q, 0.02, TimeStepping::default(), 0.01, &[0.01], false).unwrap();
        assert!((a.contents[0] - b.contents[0]).abs() < 1e-9 * a.contents[0]);
    }

    #[test]
    fn rejects_bad_input() {
        let sq = RegionPolygon::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let p = HeatProblem::new(sq).unwrap();
        assert!(solve_heat_fdm(&p, 0.1, TimeStepping::default(), 1.0, &[2.0], false).is_err());
        assert!(solve_heat_fdm(&p, 1e-5, TimeStepping::default(), 1.0, &[1.0], false).is_err());
        assert!(p.clone().with_diffusivity(0.0).is_err());
        assert!(check_resolution(1e-6, 1e-3).is_err());
        let bow = RegionPolygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)]);
        assert!(bow.map_or(true, |r| HeatProblem::new(r).is_err()));
    }
}
