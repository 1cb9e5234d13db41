//! Distance fields on uniform grids and the tube functions built from them.

use crate::error::{domain, Error, Result};
use crate::geometry::{PolylineCurve, RegionPolygon, SegmentTree};
use crate::ifs::Similitude2;
use crate::point::{point_segment_dist, Point};
use crate::sampled::{least_squares, SampledFunction};
use crate::vonkoch::{prefractal, sector_region, snowflake, GkfParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest number of grid cells a field may allocate.
pub const CELL_CAP: u128 = 400_000_000;

/// Smallest `t`, in grid spacings, the von Koch residual check accepts.
pub const MIN_T_OVER_H: f64 = 5.0;

/// Cell-centred uniform grid; `values[j * nx + i]` sits at
/// `(x0 + (i + 1/2) h, y0 + (j + 1/2) h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2 {
    pub x0: f64,
    pub y0: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl Grid2 {
    /// Grid covering `region`'s bounding box with one cell of padding.
    pub fn covering(region: &RegionPolygon, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return domain("grid spacing must be positive");
        }
        let (lo, hi) = region.bbox();
        let nx = ((hi.x - lo.x) / h).ceil() as u128 + 2;
        let ny = ((hi.y - lo.y) / h).ceil() as u128 + 2;
        if nx * ny > CELL_CAP {
            return Err(Error::SizeLimit { what: "grid cells", requested: nx * ny, cap: CELL_CAP });
        }
        let (nx, ny) = (nx as usize, ny as usize);
        Ok(Grid2 { x0: lo.x - h, y0: lo.y - h, h, nx, ny, values: vec![0.0; nx * ny] })
    }

    pub fn center(&self, i: usize, j: usize) -> Point {
        Point::new(self.x0 + (i as f64 + 0.5) * self.h, self.y0 + (j as f64 + 0.5) * self.h)
    }

    pub fn bbox(&self) -> [f64; 4] {
        [self.x0, self.y0, self.x0 + self.nx as f64 * self.h, self.y0 + self.ny as f64 * self.h]
    }

    /// Little-endian `f64`, row-major.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({ "nx": self.nx, "ny": self.ny, "bbox": self.bbox(), "h": self.h })
    }
}

/// Cells whose centre lies inside `region` (even-odd scanline fill).
pub fn inside_mask(grid: &Grid2, region: &RegionPolygon) -> Vec<bool> {
    let mut mask = vec![false; grid.nx * grid.ny];
    mask.par_chunks_mut(grid.nx).enumerate().for_each(|(j, row)| {
        let y = grid.y0 + (j as f64 + 0.5) * grid.h;
        let xs = region.row_crossings(y);
        for pair in xs.chunks_exact(2) {
            let first = ((pair[0] - grid.x0) / grid.h - 0.5).ceil().max(0.0) as usize;
            for (i, cell) in row.iter_mut().enumerate().skip(first) {
                let x = grid.x0 + (i as f64 + 0.5) * grid.h;
                if x >= pair[1] {
                    break;
                }
                if x > pair[0] {
                    *cell = true;
                }
            }
        }
    });
    mask
}

/// The set whose tube is measured.
#[derive(Clone, Debug)]
pub enum TubeTarget {
    Curve(PolylineCurve),
    /// A closed polygon together with its interior.
    Filled(RegionPolygon),
}

impl TubeTarget {
    fn segments(&self) -> Vec<(Point, Point)> {
        match self {
            TubeTarget::Curve(c) => c.segments(),
            TubeTarget::Filled(p) => p.edges().collect(),
        }
    }

    fn length(&self) -> f64 {
        match self {
            TubeTarget::Curve(c) => c.length(),
            TubeTarget::Filled(p) => p.perimeter(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DistanceField {
    pub grid: Grid2,
    pub inside: Vec<bool>,
    /// Distances at or beyond this are stored as the cap.
    pub d_cap: f64,
    sorted_inside: Vec<f64>,
    target_length: f64,
    region_perimeter: f64,
    region_area: f64,
}

/// Exact point-to-target distances at every cell centre, capped at `d_cap`.
pub fn distance_field_target(target: &TubeTarget, region: &RegionPolygon, h: f64, d_cap: f64) -> Result<DistanceField> {
    if !(d_cap > 0.0) {
        return domain("distance cap must be positive");
    }
    let mut grid = Grid2::covering(region, h)?;
    let inside = inside_mask(&grid, region);
    let tree = SegmentTree::new(target.segments())?;
    let filled = match target {
        TubeTarget::Filled(p) => Some(inside_mask(&grid, p)),
        TubeTarget::Curve(_) => None,
    };
    let (nx, gx0, gy0) = (grid.nx, grid.x0, grid.y0);
    grid.values.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let y = gy0 + (j as f64 + 0.5) * h;
        let mut prev: Option<usize> = None;
        for (i, v) in row.iter_mut().enumerate() {
            if filled.as_ref().is_some_and(|m| m[j * nx + i]) {
                *v = 0.0;
                continue;
            }
            let p = Point::new(gx0 + (i as f64 + 0.5) * h, y);
            // The previous cell's nearest segment gives a tight starting bound.
            let warm = prev.map_or(d_cap, |s| {
                let (a, b) = tree.segment(s);
                point_segment_dist(p, a, b).min(d_cap)
            });
            match tree.nearest(p, warm) {
                Some((d, s)) => {
                    *v = d;
                    prev = Some(s);
                }
                None => *v = warm,
            }
        }
    });
    let mut sorted_inside: Vec<f64> = grid.values.iter().zip(&inside).filter(|(_, &m)| m).map(|(&d, _)| d).collect();
    sorted_inside.par_sort_unstable_by(f64::total_cmp);
    Ok(DistanceField {
        grid,
        inside,
        d_cap,
        sorted_inside,
        target_length: target.length(),
        region_perimeter: region.perimeter(),
        region_area: region.area(),
    })
}

pub fn distance_field(curve: &PolylineCurve, region: &RegionPolygon, h: f64, d_cap: f64) -> Result<DistanceField> {
    distance_field_target(&TubeTarget::Curve(curve.clone()), region, h, d_cap)
}

impl DistanceField {
    pub fn h(&self) -> f64 {
        self.grid.h
    }

    pub fn inside_count(&self) -> usize {
        self.sorted_inside.len()
    }

    /// `h^2 #{inside cells with d < t}`.
    pub fn tube_volume(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return domain("tube radius must be positive");
        }
        if t > self.d_cap {
            return Err(Error::Range(format!("t = {t} exceeds the distance cap {}", self.d_cap)));
        }
        let k = self.sorted_inside.partition_point(|&d| d < t);
        Ok(self.grid.h * self.grid.h * k as f64)
    }

    /// Discretization allowance for a tube volume: every cell the tube
    /// boundary or the region boundary passes through may be miscounted.
    pub fn budget(&self) -> f64 {
        4.0 * self.grid.h * (2.0 * self.target_length + self.region_perimeter)
    }

    pub fn region_area(&self) -> f64 {
        self.region_area
    }

    /// Largest jump between neighbouring cells divided by their spacing;
    /// at most 1 for an exact distance field.
    pub fn lipschitz_ratio(&self) -> f64 {
        let (nx, ny, h) = (self.grid.nx, self.grid.ny, self.grid.h);
        let v = &self.grid.values;
        let mut worst: f64 = 0.0;
        for j in 0..ny {
            for i in 0..nx {
                let a = v[j * nx + i];
                if i + 1 < nx {
                    worst = worst.max((a - v[j * nx + i + 1]).abs() / h);
                }
                if j + 1 < ny {
                    worst = worst.max((a - v[(j + 1) * nx + i]).abs() / h);
                }
            }
        }
        worst
    }
}

pub fn tube_function(field: &DistanceField, ts: &[f64]) -> Result<SampledFunction> {
    let vals = ts.iter().map(|&t| field.tube_volume(t)).collect::<Result<Vec<_>>>()?;
    Ok(SampledFunction::new(ts.to_vec(), vals)?
        .with_meta("h", field.h())
        .with_meta("budget", field.budget()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingReport {
    pub max_rel_dev: f64,
    pub budget_rel: f64,
    pub pass: bool,
}

/// Compare `V_{phi X, phi Omega}(t)` with `lambda^2 V_{X,Omega}(t/lambda)`,
/// each side from its own grid at the same spacing `h`.
pub fn verify_tube_scaling(
    curve: &PolylineCurve,
    region: &RegionPolygon,
    phi: &Similitude2,
    ts: &[f64],
    h: f64,
) -> Result<ScalingReport> {
    let lam = phi.scale;
    let t_max = ts.iter().cloned().fold(0.0, f64::max);
    let cap = 1.01 * t_max / lam.min(1.0);
    let left = distance_field(&curve.map(|p| phi.apply(p)), &region.map(|p| phi.apply(p))?, h, cap)?;
    let right = distance_field(curve, region, h, cap)?;
    let (mut dev, mut bud) = (0.0f64, 0.0f64);
    for &t in ts {
        let a = left.tube_volume(t)?;
        let b = lam * lam * right.tube_volume(t / lam)?;
        if a <= 0.0 {
            return Err(Error::Resolution { t, limit: h });
        }
        dev = dev.max((a - b).abs() / a);
        bud = bud.max((left.budget() + lam * lam * right.budget()) / a);
    }
    Ok(ScalingReport { max_rel_dev: dev, budget_rel: bud, pass: dev <= bud })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SfeRow {
    pub t: f64,
    pub v: f64,
    pub v_ell: f64,
    pub v_r: f64,
    /// `V(t) - 2 l^2 V(t/l) - (n-1) r^2 V(t/r)`.
    pub residual: f64,
    pub upper: f64,
    pub budget: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SfeReport {
    pub params: GkfParams,
    pub level: u32,
    pub h: f64,
    /// Coefficient of `t^2` in the sector bound.
    pub sector_constant: f64,
    /// Coefficient of `t^2` in the whole-snowflake bound.
    pub full_constant: f64,
    pub rows: Vec<SfeRow>,
    /// Whole-snowflake residual (`n` sectors) against its bound.
    pub full_pass: bool,
    pub pass: bool,
}

/// Tube function of the sector-0 curve of a snowflake, relative to its sector.
pub fn sector_field(p: GkfParams, level: u32, h: f64, d_cap: f64) -> Result<DistanceField> {
    let region = snowflake(p, level)?;
    if !region.admissible {
        return Err(Error::Precondition(format!("r = {} is not below the self-avoidance bound", p.r)));
    }
    let sector = sector_region(&region, 0)?;
    distance_field(&region.curves[0], &sector, h, d_cap)
}

/// Width of the band around the limit curve containing the level-`level`
/// prefractal.
pub fn sandwich_width(p: GkfParams, level: u32) -> Result<f64> {
    let fine = prefractal(p, 6.min(level + 4))?;
    let height = fine.vertices().iter().map(|q| q.y.abs()).fold(0.0, f64::max);
    Ok(p.ell().max(p.r).powi(level as i32) * height)
}

/// Check the scaling functional equation of the sector tube function.
pub fn verify_gkf_sfe(p: GkfParams, level: u32, ts: &[f64], h: f64) -> Result<SfeReport> {
    for &t in ts {
        if t < MIN_T_OVER_H * h {
            return Err(Error::Resolution { t, limit: MIN_T_OVER_H * h });
        }
    }
    let (ell, r, n) = (p.ell(), p.r, p.n as f64);
    let t_max = ts.iter().cloned().fold(0.0, f64::max);
    let field = sector_field(p, level, h, 1.01 * t_max / ell.min(r))?;
    let weight = 1.0 + 2.0 * ell * ell + (n - 1.0) * r * r;
    let width = sandwich_width(p, level)?;
    let curve_len = (2.0 * ell + (n - 1.0) * r).powi(level as i32);
    let budget = weight * (field.budget() + 2.0 * width * curve_len);
    let c_sector = 2.0 / (p.theta() / 2.0).tan() + p.theta();
    let c_full = 2.0 * n / (std::f64::consts::PI / n).tan() + 2.0 * std::f64::consts::PI;
    let mut rows = Vec::with_capacity(ts.len());
    let mut full_pass = true;
    for &t in ts {
        let v = field.tube_volume(t)?;
        let v_ell = field.tube_volume(t / ell)?;
        let v_r = field.tube_volume(t / r)?;
        let residual = v - 2.0 * ell * ell * v_ell - (n - 1.0) * r * r * v_r;
        let upper = c_sector * t * t;
        let pass = residual >= -budget && residual <= upper + budget;
        full_pass &= n * residual >= -n * budget && n * residual <= c_full * t * t + n * budget;
        rows.push(SfeRow { t, v, v_ell, v_r, residual, upper, budget, pass });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(SfeReport { params: p, level, h, sector_constant: c_sector, full_constant: c_full, rows, full_pass, pass })
}

/// Fit `V(t) ~ c t^(2 - D)` over `window`; returns `(D, c)`.
pub fn minkowski_fit(samples: &SampledFunction, window: (f64, f64)) -> Result<(f64, f64)> {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&t, &v) in samples.ts().iter().zip(samples.vals()) {
        if t >= window.0 && t <= window.1 && v > 0.0 {
            xs.push(t.ln());
            ys.push(v.ln());
        }
    }
    if xs.len() < 8 {
        return Err(Error::Fit(format!("{} samples in the window, need 8", xs.len())));
    }
    let (slope, icpt) = least_squares(&xs, &ys)?;
    Ok((2.0 - slope, icpt.exp()))
}
