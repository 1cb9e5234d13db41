//! Polylines, simple polygons and the geometric queries the rest of the
//! crate needs: clipping, self-intersection, scanline crossings and nearest
//! segment lookup.

use crate::error::{domain, Error, Result};
use crate::point::{point_segment_dist, Point};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Coordinates are snapped to multiples of this before exact predicates.
pub const PREDICATE_SNAP: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolylineCurve {
    vertices: Vec<Point>,
}

impl PolylineCurve {
    /// A single vertex is allowed and stands for a point.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.is_empty() {
            return domain("polyline needs at least one vertex");
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return domain("polyline vertices must be finite");
        }
        Ok(PolylineCurve { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn segments(&self) -> Vec<(Point, Point)> {
        if self.vertices.len() == 1 {
            return vec![(self.vertices[0], self.vertices[0])];
        }
        self.vertices.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> PolylineCurve {
        PolylineCurve { vertices: self.vertices.iter().map(|&p| f(p)).collect() }
    }
}

/// Simple polygon stored counterclockwise, without a repeated closing vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionPolygon {
    vertices: Vec<Point>,
}

pub fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>() * 0.5
}

impl RegionPolygon {
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return domain("polygon needs at least three vertices");
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return domain("polygon vertices must be finite");
        }
        let a = signed_area(&vertices);
        if a == 0.0 {
            return Err(Error::Geometry("polygon has zero area".into()));
        }
        if a < 0.0 {
            vertices.reverse();
        }
        Ok(RegionPolygon { vertices })
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![Point::new(x0, y0), Point::new(x1, y0), Point::new(x1, y1), Point::new(x0, y1)])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn centroid(&self) -> Point {
        let a = self.area();
        let (mut cx, mut cy) = (0.0, 0.0);
        for (p, q) in self.edges() {
            let c = p.cross(q);
            cx += (p.x + q.x) * c;
            cy += (p.y + q.y) * c;
        }
        Point::new(cx / (6.0 * a), cy / (6.0 * a))
    }

    /// `(min, max)` corners.
    pub fn bbox(&self) -> (Point, Point) {
        bbox_of(&self.vertices)
    }

    /// Even-odd point-in-polygon test.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Sorted `x` coordinates where the boundary crosses the line `y`.
    pub fn row_crossings(&self, y: f64) -> Vec<f64> {
        let mut xs = Vec::new();
        for (a, b) in self.edges() {
            if (a.y > y) != (b.y > y) {
                xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        xs.sort_by(f64::total_cmp);
        xs
    }

    /// Sorted `y` coordinates where the boundary crosses the line `x`.
    pub fn column_crossings(&self, x: f64) -> Vec<f64> {
        let mut ys = Vec::new();
        for (a, b) in self.edges() {
            if (a.x > x) != (b.x > x) {
                ys.push(a.y + (x - a.x) * (b.y - a.y) / (b.x - a.x));
            }
        }
        ys.sort_by(f64::total_cmp);
        ys
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Result<RegionPolygon> {
        RegionPolygon::new(self.vertices.iter().map(|&p| f(p)).collect())
    }

    /// Boundary as a closed polyline (first vertex repeated at the end).
    pub fn boundary(&self) -> PolylineCurve {
        let mut v = self.vertices.clone();
        v.push(v[0]);
        PolylineCurve { vertices: v }
    }

    pub fn check_simple(&self) -> Result<()> {
        match find_self_intersection(&self.vertices, true) {
            Some((i, j)) => Err(Error::Geometry(format!("boundary segments {i} and {j} intersect"))),
            None => Ok(()),
        }
    }
}

pub fn bbox_of(points: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

/// Sutherland-Hodgman clip keeping the closed half-plane left of the
/// directed line `a -> b`.
pub fn clip_halfplane(poly: &[Point], a: Point, b: Point) -> Vec<Point> {
    let d = b - a;
    let side = |p: Point| d.cross(p - a);
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let (sp, sq) = (side(p), side(q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push(p + (q - p) * t);
        }
    }
    out.dedup_by(|x, y| x.dist(*y) < 1e-15);
    if out.len() > 1 && out.first().unwrap().dist(*out.last().unwrap()) < 1e-15 {
        out.pop();
    }
    out
}

type IPoint = (i128, i128);

fn snap(p: Point) -> IPoint {
    ((p.x / PREDICATE_SNAP).round() as i128, (p.y / PREDICATE_SNAP).round() as i128)
}

fn orient(a: IPoint, b: IPoint, c: IPoint) -> i32 {
    let v = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    v.signum() as i32
}

fn on_segment(a: IPoint, b: IPoint, p: IPoint) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

/// Closed segments `[a, b]` and `[c, d]` share at least one point.
fn segments_meet(a: IPoint, b: IPoint, c: IPoint, d: IPoint) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment(a, b, c))
        || (o2 == 0 && on_segment(a, b, d))
        || (o3 == 0 && on_segment(c, d, a))
        || (o4 == 0 && on_segment(c, d, b))
}

/// Consecutive segments `a->b`, `b->c` meet only at `b` unless they fold back.
fn folds_back(a: IPoint, b: IPoint, c: IPoint) -> bool {
    orient(a, b, c) == 0 && (b.0 - a.0) * (c.0 - b.0) + (b.1 - a.1) * (c.1 - b.1) < 0
}

/// First pair of non-adjacent segments that touch or cross, using exact
/// integer predicates on snapped coordinates and a uniform bucket grid.
pub fn find_self_intersection(vertices: &[Point], closed: bool) -> Option<(usize, usize)> {
    let pts: Vec<IPoint> = vertices.iter().map(|&p| snap(p)).collect();
    let n = pts.len();
    let nseg = if closed { n } else { n.saturating_sub(1) };
    if nseg < 2 {
        return None;
    }
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    for i in 0..nseg {
        let j = i + 1;
        if j < nseg || closed {
            let (a, b) = seg(i);
            let c = pts[(j + 1) % n];
            if folds_back(a, b, c) {
                return Some((i, j % nseg));
            }
        }
    }
    let (lo, hi) = bbox_of(vertices);
    let total: f64 = (0..nseg).map(|i| vertices[i].dist(vertices[(i + 1) % n])).sum();
    let cell = (2.0 * total / nseg as f64).max((hi.x - lo.x).max(hi.y - lo.y) / 4096.0).max(1e-12);
    let key = |p: Point| (((p.x - lo.x) / cell) as i64, ((p.y - lo.y) / cell) as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for i in 0..nseg {
        let (p, q) = (vertices[i], vertices[(i + 1) % n]);
        let (k0, k1) = (key(Point::new(p.x.min(q.x), p.y.min(q.y))), key(Point::new(p.x.max(q.x), p.y.max(q.y))));
        for kx in k0.0..=k1.0 {
            for ky in k0.1..=k1.1 {
                buckets.entry((kx, ky)).or_default().push(i);
            }
        }
    }
    let adjacent = |i: usize, j: usize| {
        let d = i.abs_diff(j);
        d == 1 || (closed && d == nseg - 1)
    };
    let mut keys: Vec<_> = buckets.keys().copied().collect();
    keys.sort_unstable();
    for k in keys {
        let list = &buckets[&k];
        for (ai, &i) in list.iter().enumerate() {
            for &j in &list[ai + 1..] {
                if i == j || adjacent(i, j) {
                    continue;
                }
                let (a, b) = seg(i);
                let (c, d) = seg(j);
                if segments_meet(a, b, c, d) {
                    return Some((i.min(j), i.max(j)));
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
struct Node {
    lo: Point,
    hi: Point,
    /// Leaf: `start..start+count` into `order`. Inner: `count == 0`, children
    /// at `start` and `start + 1`.
    start: u32,
    count: u32,
}

/// Bounding-volume hierarchy over segments for nearest-distance queries.
#[derive(Clone, Debug)]
pub struct SegmentTree {
    segs: Vec<(Point, Point)>,
    order: Vec<u32>,
    nodes: Vec<Node>,
}

const LEAF: usize = 4;

impl SegmentTree {
    pub fn new(segs: Vec<(Point, Point)>) -> Result<Self> {
        if segs.is_empty() {
            return domain("segment tree needs at least one segment");
        }
        let mut order: Vec<u32> = (0..segs.len() as u32).collect();
        let mut nodes = vec![Node { lo: Point::ORIGIN, hi: Point::ORIGIN, start: 0, count: 0 }];
        let mut stack = vec![(0usize, 0usize, segs.len())];
        while let Some((node, a, b)) = stack.pop() {
            let (lo, hi) = bbox_of(&order[a..b].iter().flat_map(|&i| [segs[i as usize].0, segs[i as usize].1]).collect::<Vec<_>>());
            if b - a <= LEAF {
                nodes[node] = Node { lo, hi, start: a as u32, count: (b - a) as u32 };
                continue;
            }
            let mid_of = |i: u32| {
                let (p, q) = segs[i as usize];
                (p + q) * 0.5
            };
            let by_x = hi.x - lo.x >= hi.y - lo.y;
            let m = (a + b) / 2;
            order[a..b].select_nth_unstable_by(m - a, |&i, &j| {
                let (pi, pj) = (mid_of(i), mid_of(j));
                if by_x { pi.x.total_cmp(&pj.x) } else { pi.y.total_cmp(&pj.y) }
            });
            let child = nodes.len();
            nodes.push(Node { lo: Point::ORIGIN, hi: Point::ORIGIN, start: 0, count: 0 });
            nodes.push(Node { lo: Point::ORIGIN, hi: Point::ORIGIN, start: 0, count: 0 });
            nodes[node] = Node { lo, hi, start: child as u32, count: 0 };
            stack.push((child, a, m));
            stack.push((child + 1, m, b));
        }
        Ok(SegmentTree { segs, order, nodes })
    }

    pub fn segment(&self, i: usize) -> (Point, Point) {
        self.segs[i]
    }

    pub fn len(&self) -> usize {
        self.segs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    fn box_dist2(n: &Node, p: Point) -> f64 {
        let dx = (n.lo.x - p.x).max(p.x - n.hi.x).max(0.0);
        let dy = (n.lo.y - p.y).max(p.y - n.hi.y).max(0.0);
        dx * dx + dy * dy
    }

    /// Nearest segment strictly closer than `bound`, with its distance.
    pub fn nearest(&self, p: Point, bound: f64) -> Option<(f64, usize)> {
        let mut best = bound;
        let mut best2 = bound * bound;
        let mut arg = None;
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(ni) = stack.pop() {
            let n = &self.nodes[ni as usize];
            if Self::box_dist2(n, p) >= best2 {
                continue;
            }
            if n.count > 0 {
                for &si in &self.order[n.start as usize..(n.start + n.count) as usize] {
                    let (a, b) = self.segs[si as usize];
                    let d = point_segment_dist(p, a, b);
                    if d < best {
                        best = d;
                        best2 = d * d;
                        arg = Some(si as usize);
                    }
                }
            } else {
                let (l, r) = (n.start, n.start + 1);
                let (dl, dr) = (Self::box_dist2(&self.nodes[l as usize], p), Self::box_dist2(&self.nodes[r as usize], p));
                if dl < dr {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        arg.map(|i| (best, i))
    }
}
