//! Generalized von Koch curves and snowflakes built on regular polygons.

use crate::error::{domain, Error, Result};
use crate::geometry::{clip_halfplane, PolylineCurve, RegionPolygon};
use crate::ifs::{SelfSimilarSystem, Similitude2};
use crate::point::Point;
use crate::zeta::RatioMultiset;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest vertex count a prefractal may have.
pub const SEGMENT_CAP: u128 = 20_000_000;

/// Curve built on a regular `n`-gon with side `r`; the two end pieces have
/// ratio `(1 - r)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GkfParams {
    pub n: u32,
    pub r: f64,
}

impl GkfParams {
    pub fn new(n: u32, r: f64) -> Result<Self> {
        if n < 3 {
            return domain(format!("polygon order {n} must be at least 3"));
        }
        if !(r > 0.0 && r < 1.0) {
            return domain(format!("side ratio {r} must lie in (0, 1)"));
        }
        Ok(GkfParams { n, r })
    }

    pub fn ell(&self) -> f64 {
        0.5 * (1.0 - self.r)
    }

    /// Exterior angle of the polygon.
    pub fn theta(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Interior angle of the polygon.
    pub fn alpha(&self) -> f64 {
        PI - self.theta()
    }

    pub fn ratios(&self) -> Result<RatioMultiset> {
        RatioMultiset::new(&[(self.ell(), 2), (self.r, self.n - 1)])
    }

    /// Number of pieces each segment is replaced by.
    pub fn pieces(&self) -> u32 {
        self.n + 1
    }
}

/// Maps in curve order: left end, the `n - 1` polygon sides, right end.
pub fn build_system(p: GkfParams) -> Result<SelfSimilarSystem> {
    let (ell, r) = (p.ell(), p.r);
    let mut maps = Vec::with_capacity(p.pieces() as usize);
    maps.push(Similitude2::new(ell, 0.0, false, Point::ORIGIN)?);
    let mut start = Point::new(ell, 0.0);
    for k in 0..p.n - 1 {
        let m = Similitude2::new(r, p.alpha() - k as f64 * p.theta(), false, start)?;
        start = m.apply(Point::new(1.0, 0.0));
        maps.push(m);
    }
    maps.push(Similitude2::new(ell, 0.0, false, Point::new(ell + r, 0.0))?);
    SelfSimilarSystem::new(maps)
}

/// Vertex count of the level-`level` prefractal curve on `[0, 1]`.
pub fn prefractal_vertex_count(p: GkfParams, level: u32) -> u128 {
    (p.pieces() as u128).checked_pow(level).map_or(u128::MAX, |k| k + 1)
}

fn check_size(p: GkfParams, level: u32, copies: u128) -> Result<()> {
    let need = prefractal_vertex_count(p, level).saturating_mul(copies);
    if need > SEGMENT_CAP {
        return Err(Error::SizeLimit { what: "prefractal vertices", requested: need, cap: SEGMENT_CAP });
    }
    Ok(())
}

/// Generator vertices: images of `(0,0)` under each map, then `(1,0)`.
fn generator(p: GkfParams) -> Result<Vec<Point>> {
    let sys = build_system(p)?;
    let mut v: Vec<Point> = sys.maps.iter().map(|m| m.apply(Point::ORIGIN)).collect();
    v.push(Point::new(1.0, 0.0));
    Ok(v)
}

/// Level-`level` prefractal from `(0,0)` to `(1,0)`, bumps on the `+y` side.
pub fn prefractal(p: GkfParams, level: u32) -> Result<PolylineCurve> {
    check_size(p, level, 1)?;
    let gen = generator(p)?;
    let mut v = vec![Point::ORIGIN, Point::new(1.0, 0.0)];
    for _ in 0..level {
        let mut next = Vec::with_capacity((v.len() - 1) * (gen.len() - 1) + 1);
        next.push(v[0]);
        for w in v.windows(2) {
            let (a, d) = (w[0], w[1] - w[0]);
            for g in &gen[1..] {
                next.push(a + d * g.x + d.perp() * g.y);
            }
        }
        v = next;
    }
    PolylineCurve::new(v)
}

/// `r` below which the snowflake boundary is known to be simple.
pub fn self_avoidance_bound(n: u32) -> f64 {
    let a = PI / n as f64;
    if n % 2 == 0 {
        a.sin().powi(2) / (a.cos().powi(2) + 1.0)
    } else {
        1.0 - a.cos()
    }
}

/// The hexagonal case has a second, smaller published threshold.
pub const HEXAGON_ALT_BOUND: f64 = 1.0 - 0.866_025_403_784_438_6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnowflakeRegion {
    pub params: GkfParams,
    pub level: u32,
    pub polygon: RegionPolygon,
    /// Vertices of the base `n`-gon, counterclockwise.
    pub ngon: Vec<Point>,
    /// One curve per polygon side, from `ngon[k]` to `ngon[k+1]`.
    pub curves: Vec<PolylineCurve>,
    /// `r` is below the self-avoidance bound.
    pub admissible: bool,
    pub warnings: Vec<String>,
}

/// Unit-side regular `n`-gon centred at the origin with a vertex on the
/// positive `x` axis.
pub fn unit_ngon(n: u32) -> Vec<Point> {
    let rad = 0.5 / (PI / n as f64).sin();
    (0..n)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            Point::new(rad * a.cos(), rad * a.sin())
        })
        .collect()
}

/// Snowflake with a level-`level` curve on every side of the unit `n`-gon,
/// bumps pointing outward.
pub fn snowflake(p: GkfParams, level: u32) -> Result<SnowflakeRegion> {
    check_size(p, level, p.n as u128)?;
    let bound = self_avoidance_bound(p.n);
    let admissible = p.r < bound;
    let mut warnings = Vec::new();
    if p.n == 6 && p.r >= HEXAGON_ALT_BOUND && p.r < bound {
        warnings.push(format!(
            "r = {} lies between the two published hexagon thresholds ({HEXAGON_ALT_BOUND:.6}, {bound:.6})",
            p.r
        ));
    }
    let base = prefractal(p, level)?;
    let ngon = unit_ngon(p.n);
    let mut curves = Vec::with_capacity(p.n as usize);
    let mut boundary = Vec::with_capacity(p.n as usize * (base.vertices().len() - 1));
    for k in 0..p.n as usize {
        let (a, b) = (ngon[k], ngon[(k + 1) % p.n as usize]);
        let d = b - a;
        // Left of the curve maps to the right of a -> b, which is outside.
        let c = base.map(|q| a + d * q.x - d.perp() * q.y);
        boundary.extend_from_slice(&c.vertices()[..c.vertices().len() - 1]);
        curves.push(c);
    }
    let polygon = RegionPolygon::new(boundary)?;
    if admissible {
        polygon.check_simple()?;
    }
    Ok(SnowflakeRegion { params: p, level, polygon, ngon, curves, admissible, warnings })
}

/// The part of the snowflake inside the wedge from its centre through
/// vertices `index` and `index + 1`.
pub fn sector_region(region: &SnowflakeRegion, index: usize) -> Result<RegionPolygon> {
    let n = region.ngon.len();
    if index >= n {
        return domain(format!("sector index {index} out of range for {n} sides"));
    }
    let c = Point::ORIGIN;
    let (a, b) = (region.ngon[index], region.ngon[(index + 1) % n]);
    let far = 4.0 * (1.0 + a.norm());
    let half = clip_halfplane(region.polygon.vertices(), c, c + a * far);
    let wedge = clip_halfplane(&half, c + b * far, c);
    RegionPolygon::new(wedge)
}

/// The sector as origin, side curve, origin; equals [`sector_region`] when
/// the curve stays inside its wedge.
pub fn sector_from_curve(region: &SnowflakeRegion, index: usize) -> Result<RegionPolygon> {
    let curve = region.curves.get(index).ok_or_else(|| Error::Domain("sector index out of range".into()))?;
    let mut v = vec![Point::ORIGIN];
    v.extend_from_slice(curve.vertices());
    RegionPolygon::new(v)
}
