//! Planar similitudes, iterated function systems and finite point clouds.

use crate::error::{domain, Error, Result};
use crate::point::Point;
use crate::zeta::RatioMultiset;
use serde::{Deserialize, Serialize};

/// Hard cap on the number of points an attractor approximation may hold.
pub const POINT_CAP: usize = 10_000_000;

/// Coordinates closer than this are treated as the same point.
pub const SNAP: f64 = 1e-12;

/// `x -> translation + scale * R(rotation) * F(x)` where `F` flips `y` when
/// `reflect` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Similitude2 {
    pub scale: f64,
    pub rotation: f64,
    pub reflect: bool,
    pub translation: Point,
}

impl Similitude2 {
    pub fn new(scale: f64, rotation: f64, reflect: bool, translation: Point) -> Result<Self> {
        if !(scale > 0.0 && scale < 1.0) {
            return domain(format!("similitude scale {scale} must lie in (0, 1)"));
        }
        if !rotation.is_finite() || !translation.is_finite() {
            return domain("similitude parameters must be finite");
        }
        Ok(Similitude2 {
            scale,
            rotation,
            reflect,
            translation,
        })
    }

    /// A similarity with no contraction requirement; used to place curves
    /// in the plane.
    pub fn placement(scale: f64, rotation: f64, reflect: bool, translation: Point) -> Self {
        Similitude2 {
            scale,
            rotation,
            reflect,
            translation,
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        let q = if self.reflect { Point::new(p.x, -p.y) } else { p };
        self.translation + q.rotate(self.rotation) * self.scale
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarSystem {
    pub maps: Vec<Similitude2>,
}

impl SelfSimilarSystem {
    pub fn new(maps: Vec<Similitude2>) -> Result<Self> {
        if maps.is_empty() {
            return domain("a self-similar system needs at least one map");
        }
        Ok(SelfSimilarSystem { maps })
    }

    pub fn ratios(&self) -> Result<RatioMultiset> {
        RatioMultiset::from_ratios(&self.maps.iter().map(|m| m.scale).collect::<Vec<_>>())
    }
}

/// A finite point set with duplicates (up to [`SNAP`]) removed, kept in
/// lexicographic order so equal sets compare equal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Point>,
}

fn snap_key(p: Point) -> (i64, i64) {
    ((p.x / SNAP).round() as i64, (p.y / SNAP).round() as i64)
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.len() > POINT_CAP {
            return Err(Error::SizeLimit {
                what: "point cloud",
                requested: points.len() as u128,
                cap: POINT_CAP as u128,
            });
        }
        if points.iter().any(|p| !p.is_finite()) {
            return domain("point cloud coordinates must be finite");
        }
        let mut keyed: Vec<((i64, i64), Point)> =
            points.into_iter().map(|p| (snap_key(p), p)).collect();
        keyed.sort_by_key(|a| a.0);
        keyed.dedup_by(|a, b| a.0 == b.0);
        Ok(PointCloud {
            points: keyed.into_iter().map(|(_, p)| p).collect(),
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One application of the Hutchinson operator.
pub fn hutchinson(system: &SelfSimilarSystem, cloud: &PointCloud) -> Result<PointCloud> {
    let n = system.maps.len() as u128 * cloud.len() as u128;
    if n > POINT_CAP as u128 {
        return Err(Error::SizeLimit {
            what: "Hutchinson image",
            requested: n,
            cap: POINT_CAP as u128,
        });
    }
    let pts = system
        .maps
        .iter()
        .flat_map(|m| cloud.points().iter().map(move |&p| m.apply(p)))
        .collect();
    PointCloud::new(pts)
}

/// `depth` Hutchinson iterations applied to `seed`.
pub fn attractor_points(system: &SelfSimilarSystem, depth: u32, seed: &PointCloud) -> Result<PointCloud> {
    let projected = (system.maps.len() as u128)
        .checked_pow(depth)
        .and_then(|k| k.checked_mul(seed.len() as u128))
        .unwrap_or(u128::MAX);
    if projected > POINT_CAP as u128 {
        return Err(Error::SizeLimit {
            what: "attractor approximation",
            requested: projected,
            cap: POINT_CAP as u128,
        });
    }
    let mut cloud = seed.clone();
    for _ in 0..depth {
        cloud = hutchinson(system, &cloud)?;
    }
    Ok(cloud)
}

fn directed_hausdorff(a: &[Point], b: &[Point]) -> f64 {
    let mut worst: f64 = 0.0;
    for &p in a {
        let mut best = f64::INFINITY;
        for &q in b {
            let d = (p.x - q.x).powi(2) + (p.y - q.y).powi(2);
            if d < best {
                best = d;
                if best <= worst {
                    // Cannot raise the running maximum any more.
                    break;
                }
            }
        }
        worst = worst.max(best);
    }
    worst.sqrt()
}

pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return domain("Hausdorff distance of an empty cloud");
    }
    Ok(directed_hausdorff(a.points(), b.points()).max(directed_hausdorff(b.points(), a.points())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cantor_system() -> SelfSimilarSystem {
        SelfSimilarSystem::new(vec![
            Similitude2::new(1.0 / 3.0, 0.0, false, Point::ORIGIN).unwrap(),
            Similitude2::new(1.0 / 3.0, 0.0, false, Point::new(2.0 / 3.0, 0.0)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_non_contractions() {
        assert!(Similitude2::new(1.0, 0.0, false, Point::ORIGIN).is_err());
        assert!(Similitude2::new(0.0, 0.0, false, Point::ORIGIN).is_err());
        assert!(SelfSimilarSystem::new(vec![]).is_err());
    }

    #[test]
    fn reflection_then_rotation() {
        let m = Similitude2::new(0.5, std::f64::consts::FRAC_PI_2, true, Point::new(1.0, 0.0)).unwrap();
        let p = m.apply(Point::new(0.0, 1.0));
        // (0,1) -> flip (0,-1) -> rotate (1,0) -> scale (0.5,0) -> shift (1.5,0)
        assert!((p.x - 1.5).abs() < 1e-15 && p.y.abs() < 1e-15);
    }

    #[test]
    fn cloud_dedups_within_snap() {
        let c = PointCloud::new(vec![
            Point::new(0.1, 0.2),
            Point::new(0.1 + 1e-15, 0.2),
            Point::new(0.3, 0.2),
        ])
        .unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn cantor_levels() {
        let seed = PointCloud::new(vec![Point::ORIGIN, Point::new(1.0, 0.0)]).unwrap();
        let c = attractor_points(&cantor_system(), 3, &seed).unwrap();
        assert_eq!(c.len(), 16);
        let r = cantor_system().ratios().unwrap();
        assert_eq!(r.entries().len(), 1);
        assert_eq!(r.entries()[0].1, 2);
    }

    #[test]
    fn size_cap_enforced() {
        let seed = PointCloud::new(vec![Point::ORIGIN]).unwrap();
        match attractor_points(&cantor_system(), 40, &seed) {
            Err(Error::SizeLimit { .. }) => {}
            other => panic!("expected size limit, got {other:?}"),
        }
    }

    #[test]
    fn hausdorff_of_shifted_cloud() {
        let a = PointCloud::new(vec![Point::ORIGIN, Point::new(1.0, 0.0)]).unwrap();
        let b = PointCloud::new(vec![Point::new(0.0, 0.5), Point::new(1.0, 0.5)]).unwrap();
        assert!((hausdorff_distance(&a, &b).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
    }
}
