//! 2D primitives and the boolean region algebra.
//!
//! Regions are finite unions of polygons with holes. Circular boundaries are
//! approximated with regular polygons; [`disk_region`] is inscribed in the
//! true disk and [`disk_region_circumscribed`] contains it, so callers can
//! pick the conservative side for each use (intersected disks inscribed,
//! subtracted disks circumscribed).

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use geo::{Area, BooleanOps, Coord, LineString, MultiPolygon, Polygon};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::floorplan::Layout;

/// Default tolerance for vertex dedup and closed-boundary membership (m).
pub const DEFAULT_EPS_LEN: f64 = 1e-9;
/// Default emptiness threshold for regions (m²).
pub const DEFAULT_EPS_AREA: f64 = 1e-9;
/// Default chord count for a full circle.
pub const DEFAULT_ARC_SEGMENTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    /// Counter-clockwise rotation by `angle` radians.
    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn normalized(self) -> Point {
        let n = self.norm();
        Point::new(self.x / n, self.y / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

// Points travel as `[x, y]` in every file format.
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[f64; 2]>::deserialize(d)?;
        Ok(Point::new(x, y))
    }
}

impl From<Point> for Coord<f64> {
    fn from(p: Point) -> Self {
        Coord { x: p.x, y: p.y }
    }
}

impl From<Coord<f64>> for Point {
    fn from(c: Coord<f64>) -> Self {
        Point::new(c.x, c.y)
    }
}

/// Twice the signed area of triangle `abc`; positive when counter-clockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Signed shoelace area of a closed ring (implicit closing edge).
pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += ring[i].cross(ring[(i + 1) % n]);
    }
    0.5 * s
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Closed segment intersection test with a distance tolerance.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point, eps: f64) -> bool {
    if segments_cross_properly(a, b, c, d, eps) {
        return true;
    }
    point_segment_distance(c, a, b) <= eps
        || point_segment_distance(d, a, b) <= eps
        || point_segment_distance(a, c, d) <= eps
        || point_segment_distance(b, c, d) <= eps
}

/// True when `ab` and `cd` cross at a single interior point of both, with
/// every endpoint farther than `eps` from the other segment's line.
pub fn segments_cross_properly(a: Point, b: Point, c: Point, d: Point, eps: f64) -> bool {
    let side = |p: Point, q: Point, r: Point| -> i8 {
        let len = (q - p).norm();
        if len == 0.0 {
            return 0;
        }
        let s = orient(p, q, r) / len;
        if s > eps {
            1
        } else if s < -eps {
            -1
        } else {
            0
        }
    };
    let d1 = side(a, b, c);
    let d2 = side(a, b, d);
    let d3 = side(c, d, a);
    let d4 = side(c, d, b);
    d1 * d2 < 0 && d3 * d4 < 0
}

/// Even-odd point-in-ring test (boundary behaviour unspecified).
pub fn point_in_ring(p: Point, ring: &[Point]) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn distance_to_ring(p: Point, ring: &[Point]) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| point_segment_distance(p, ring[i], ring[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Andrew's monotone chain; counter-clockwise, no collinear points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Keeps the part of a convex polygon on the left of the directed line `a -> b`.
pub fn clip_convex_left(poly: &[Point], a: Point, b: Point) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let sp = orient(a, b, p);
        let sq = orient(a, b, q);
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push(p.lerp(q, t));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<BBox> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut b = BBox {
            min: first,
            max: first,
        };
        for p in it {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        Some(b)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point {
        self.min.midpoint(self.max)
    }

    pub fn expanded(&self, m: f64) -> BBox {
        BBox {
            min: Point::new(self.min.x - m, self.min.y - m),
            max: Point::new(self.max.x + m, self.max.y + m),
        }
    }

    pub fn overlaps(&self, o: &BBox, eps: f64) -> bool {
        self.min.x <= o.max.x + eps
            && o.min.x <= self.max.x + eps
            && self.min.y <= o.max.y + eps
            && o.min.y <= self.max.y + eps
    }

    pub fn contains(&self, p: Point, eps: f64) -> bool {
        p.x >= self.min.x - eps
            && p.x <= self.max.x + eps
            && p.y >= self.min.y - eps
            && p.y <= self.max.y + eps
    }

    pub fn ring(&self) -> Vec<Point> {
        vec![
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point, radius: f64) -> Self {
        debug_assert!(radius > 0.0);
        Self { center, radius }
    }

    pub fn contains(&self, p: Point, eps: f64) -> bool {
        self.center.dist(p) <= self.radius + eps
    }
}

/// Where a region value came from; carried for debugging and rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    #[default]
    Derived,
    Layout,
    Disk,
    LosPoint,
    LosTriangle(usize),
    LosClique(usize),
    Forbidden,
    WellSpaced,
    WellSpacedPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Intersect,
    Subtract,
}

/// A planar area value: a set of non-overlapping polygons with holes.
#[derive(Debug, Clone)]
pub struct Region {
    shape: MultiPolygon<f64>,
    bbox: Option<BBox>,
    pub provenance: Provenance,
}

fn ring_to_linestring(ring: &[Point]) -> LineString<f64> {
    LineString::new(ring.iter().map(|&p| p.into()).collect())
}

fn linestring_points(ls: &LineString<f64>) -> Vec<Point> {
    let mut pts: Vec<Point> = ls.0.iter().map(|&c| c.into()).collect();
    if pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    pts
}

impl Default for Region {
    fn default() -> Self {
        Self {
            shape: MultiPolygon(Vec::new()),
            bbox: None,
            provenance: Provenance::Derived,
        }
    }
}

impl Region {
    pub fn empty() -> Self {
        Self::default()
    }

    /// A simple polygon region from one ring (either orientation).
    pub fn from_ring(ring: &[Point]) -> Self {
        if ring.len() < 3 {
            return Self::empty();
        }
        Self::from_multipolygon(MultiPolygon(vec![Polygon::new(
            ring_to_linestring(ring),
            vec![],
        )]))
    }

    /// Polygon with holes; ring orientation is irrelevant.
    pub fn from_rings_with_holes(outer: &[Point], holes: &[Vec<Point>]) -> Self {
        Self::from_multipolygon(MultiPolygon(vec![Polygon::new(
            ring_to_linestring(outer),
            holes.iter().map(|h| ring_to_linestring(h)).collect(),
        )]))
    }

    fn from_multipolygon(shape: MultiPolygon<f64>) -> Self {
        let bbox = BBox::of(
            shape
                .0
                .iter()
                .flat_map(|p| p.exterior().0.iter())
                .map(|c| Point::from(*c))
                .collect::<Vec<_>>()
                .iter(),
        );
        Self {
            shape,
            bbox,
            provenance: Provenance::Derived,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn area(&self) -> f64 {
        self.shape.unsigned_area()
    }

    pub fn is_empty(&self, eps_area: f64) -> bool {
        self.shape.0.is_empty() || self.area() < eps_area
    }

    pub fn bbox(&self) -> Option<BBox> {
        self.bbox
    }

    pub fn polygon_count(&self) -> usize {
        self.shape.0.len()
    }

    /// Rings as `(outer CCW, holes CW)` per polygon.
    pub fn polygons(&self) -> Vec<(Vec<Point>, Vec<Vec<Point>>)> {
        self.shape
            .0
            .iter()
            .map(|poly| {
                let mut outer = linestring_points(poly.exterior());
                if signed_area(&outer) < 0.0 {
                    outer.reverse();
                }
                let holes = poly
                    .interiors()
                    .iter()
                    .map(|h| {
                        let mut h = linestring_points(h);
                        if signed_area(&h) > 0.0 {
                            h.reverse();
                        }
                        h
                    })
                    .collect();
                (outer, holes)
            })
            .collect()
    }

    /// All rings flattened; fill rings CCW, hole rings CW.
    pub fn rings(&self) -> Vec<Vec<Point>> {
        self.polygons()
            .into_iter()
            .flat_map(|(o, hs)| std::iter::once(o).chain(hs))
            .collect()
    }

    pub fn vertices(&self) -> Vec<Point> {
        self.shape
            .0
            .iter()
            .flat_map(|poly| {
                std::iter::once(poly.exterior())
                    .chain(poly.interiors().iter())
                    .flat_map(linestring_points)
            })
            .collect()
    }

    /// Closed membership: inside, or within `eps` of the boundary.
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        match self.bbox {
            Some(b) if b.contains(p, eps) => {}
            _ => return false,
        }
        for poly in &self.shape.0 {
            let outer = linestring_points(poly.exterior());
            let near = |ring: &[Point]| distance_to_ring(p, ring) <= eps;
            if near(&outer) {
                return true;
            }
            if !point_in_ring(p, &outer) {
                continue;
            }
            let mut in_hole = false;
            for h in poly.interiors() {
                let h = linestring_points(h);
                if near(&h) {
                    return true;
                }
                if point_in_ring(p, &h) {
                    in_hole = true;
                    break;
                }
            }
            if !in_hole {
                return true;
            }
        }
        false
    }

    /// Area-weighted centroid, if non-empty.
    pub fn centroid(&self) -> Option<Point> {
        use geo::Centroid;
        self.shape.centroid().map(|p| Point::new(p.x(), p.y()))
    }

    pub fn boolean(&self, op: BoolOp, other: &Region) -> Region {
        region_boolean(op, self, other)
    }

    pub fn intersect(&self, other: &Region) -> Region {
        region_boolean(BoolOp::Intersect, self, other)
    }

    pub fn union(&self, other: &Region) -> Region {
        region_boolean(BoolOp::Union, self, other)
    }

    pub fn subtract(&self, other: &Region) -> Region {
        region_boolean(BoolOp::Subtract, self, other)
    }

    /// Union of many regions in one sweep.
    pub fn union_all<'a>(regions: impl IntoIterator<Item = &'a Region>) -> Region {
        let polys: Vec<&Polygon<f64>> =
            regions.into_iter().flat_map(|r| r.shape.0.iter()).collect();
        if polys.is_empty() {
            return Region::empty();
        }
        // unary_union infers the fill rule from the first ring's winding.
        let normalized: Vec<Polygon<f64>> = polys
            .into_iter()
            .map(|p| {
                let mut p = p.clone();
                use geo::orient::{Direction, Orient};
                p = p.orient(Direction::Default);
                p
            })
            .collect();
        Region::from_multipolygon(geo::unary_union(normalized.iter()))
    }
}

/// Set operation on two regions.
pub fn region_boolean(op: BoolOp, a: &Region, b: &Region) -> Region {
    let disjoint = match (a.bbox, b.bbox) {
        (Some(ba), Some(bb)) => !ba.overlaps(&bb, 0.0),
        _ => true,
    };
    if disjoint {
        return match op {
            BoolOp::Intersect => Region::empty(),
            BoolOp::Subtract => a.clone(),
            BoolOp::Union => {
                let mut polys = a.shape.0.clone();
                polys.extend(b.shape.0.iter().cloned());
                Region::from_multipolygon(MultiPolygon(polys))
            }
        };
    }
    let shape = match op {
        BoolOp::Union => a.shape.union(&b.shape),
        BoolOp::Intersect => a.shape.intersection(&b.shape),
        BoolOp::Subtract => a.shape.difference(&b.shape),
    };
    Region::from_multipolygon(shape)
}

pub fn point_in_region(p: Point, reg: &Region, eps_len: f64) -> bool {
    reg.contains(p, eps_len)
}

fn regular_polygon(center: Point, circumradius: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let a = TAU * i as f64 / n as f64;
            Point::new(
                center.x + circumradius * a.cos(),
                center.y + circumradius * a.sin(),
            )
        })
        .collect()
}

/// Inscribed regular `n`-gon: every vertex at distance exactly `r`.
pub fn disk_region(d: Disk, arc_segments: usize) -> Region {
    let n = arc_segments.max(3);
    Region::from_ring(&regular_polygon(d.center, d.radius, n)).with_provenance(Provenance::Disk)
}

/// Circumscribed regular `n`-gon: every edge tangent to the circle.
pub fn disk_region_circumscribed(d: Disk, arc_segments: usize) -> Region {
    let n = arc_segments.max(3);
    let r = d.radius / (std::f64::consts::PI / n as f64).cos();
    Region::from_ring(&regular_polygon(d.center, r, n)).with_provenance(Provenance::Disk)
}

/// Closed-form area of the inscribed `n`-gon of radius `r`.
pub fn inscribed_polygon_area(r: f64, n: usize) -> f64 {
    0.5 * n as f64 * r * r * (TAU / n as f64).sin()
}

/// Vertices of the circumscribed `n`-gon as a convex ring.
pub fn circumscribed_ring(d: Disk, arc_segments: usize) -> Vec<Point> {
    let n = arc_segments.max(3);
    let r = d.radius / (std::f64::consts::PI / n as f64).cos();
    regular_polygon(d.center, r, n)
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GeometryError {
    #[error("point {0} lies outside the layout")]
    OutsideLayout(Point),
}

/// True iff the closed segment `ab` stays inside the closed layout.
///
/// Touching an edge or passing through a vertex counts as clear.
pub fn segment_clear(layout: &Layout, a: Point, b: Point) -> Result<bool, GeometryError> {
    let eps = layout.eps_len();
    for p in [a, b] {
        if !layout.contains(p, eps) {
            return Err(GeometryError::OutsideLayout(p));
        }
    }
    Ok(segment_clear_unchecked(layout, a, b, eps))
}

pub(crate) fn segment_clear_unchecked(layout: &Layout, a: Point, b: Point, eps: f64) -> bool {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= eps * eps {
        return true;
    }
    let mut ts: Vec<f64> = vec![0.0, 1.0];
    for ring in layout.rings() {
        let n = ring.len();
        for i in 0..n {
            let c = ring[i];
            let d = ring[(i + 1) % n];
            if segments_cross_properly(a, b, c, d, eps) {
                return false;
            }
            if point_segment_distance(c, a, b) <= eps {
                ts.push(((c - a).dot(ab) / len2).clamp(0.0, 1.0));
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|x, y| (*x - *y).abs() * len2.sqrt() <= eps);
    // Between consecutive boundary contacts the segment is either wholly
    // inside or wholly outside.
    ts.windows(2).all(|w| {
        let m = a.lerp(b, 0.5 * (w[0] + w[1]));
        layout.contains(m, eps)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::Layout;

    fn square(x0: f64, y0: f64, s: f64) -> Region {
        Region::from_ring(&[
            Point::new(x0, y0),
            Point::new(x0 + s, y0),
            Point::new(x0 + s, y0 + s),
            Point::new(x0, y0 + s),
        ])
    }

    fn l_shape() -> Layout {
        Layout::new(
            "L",
            vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(2.0, 1.0),
                Point::new(1.0, 1.0),
                Point::new(1.0, 2.0),
                Point::new(0.0, 2.0),
            ],
            vec![],
        )
    }

    #[test]
    fn intersect_shifted_squares() {
        let a = square(0.0, 0.0, 1.0);
        let b = square(0.5, 0.0, 1.0);
        let c = region_boolean(BoolOp::Intersect, &a, &b);
        assert!((c.area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn subtract_self_is_empty() {
        let a = square(0.0, 0.0, 1.0);
        assert!(a.subtract(&a).is_empty(DEFAULT_EPS_AREA));
    }

    #[test]
    fn lens_area_matches_closed_form() {
        let n = 256;
        let a = disk_region(Disk::new(Point::new(0.0, 0.0), 1.0), n);
        let b = disk_region(Disk::new(Point::new(1.0, 0.0), 1.0), n);
        let lens = a.intersect(&b);
        let exact = 2.0 * std::f64::consts::PI / 3.0 - 3f64.sqrt() / 2.0;
        assert!((exact - 1.2284).abs() < 1e-4);
        // inscribed approximation: below the exact value, close to it
        assert!(lens.area() <= exact);
        assert!(exact - lens.area() < 2e-3, "{}", lens.area());
        assert!(point_in_region(
            Point::new(0.5, 0.5),
            &lens,
            DEFAULT_EPS_LEN
        ));
        assert!(!point_in_region(
            Point::new(-0.5, 0.0),
            &lens,
            DEFAULT_EPS_LEN
        ));
    }

    #[test]
    fn closed_membership() {
        let a = square(0.0, 0.0, 1.0);
        assert!(point_in_region(Point::new(0.5, 0.5), &a, DEFAULT_EPS_LEN));
        assert!(point_in_region(Point::new(1.0, 0.5), &a, DEFAULT_EPS_LEN));
        assert!(!point_in_region(
            Point::new(1.0 + 1e-6, 0.5),
            &a,
            DEFAULT_EPS_LEN
        ));
    }

    #[test]
    fn disk_areas() {
        let d = Disk::new(Point::new(3.0, -1.0), 1.0);
        let r64 = disk_region(d, 64);
        assert!((r64.area() - inscribed_polygon_area(1.0, 64)).abs() < 1e-12);
        assert!((r64.area() - 3.1365).abs() < 1e-4);
        assert!(r64.area() < std::f64::consts::PI);
        let r8 = disk_region(d, 8);
        assert!((r8.area() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        for v in r64.vertices() {
            assert!((v.dist(d.center) - 1.0).abs() < 1e-12);
        }
        let c = disk_region_circumscribed(d, 64);
        assert!(c.area() > std::f64::consts::PI);
    }

    #[test]
    fn segment_clear_cases() {
        let sq = Layout::new(
            "sq",
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
            vec![],
        );
        assert_eq!(
            segment_clear(&sq, Point::new(0.1, 0.1), Point::new(0.9, 0.9)),
            Ok(true)
        );
        let l = l_shape();
        assert_eq!(
            segment_clear(&l, Point::new(1.5, 0.5), Point::new(0.5, 1.9)),
            Ok(false)
        );
        assert_eq!(
            segment_clear(&l, Point::new(1.5, 0.5), Point::new(1.0, 1.0)),
            Ok(true)
        );
        // grazing the reflex corner is clear
        assert_eq!(
            segment_clear(&l, Point::new(1.5, 0.5), Point::new(0.5, 1.5)),
            Ok(true)
        );
        // both endpoints on the boundary, segment outside
        assert_eq!(
            segment_clear(&l, Point::new(1.5, 1.0), Point::new(1.0, 1.5)),
            Ok(false)
        );
        assert_eq!(
            segment_clear(&l, Point::new(1.5, 0.5), Point::new(1.5, 1.5)),
            Err(GeometryError::OutsideLayout(Point::new(1.5, 1.5)))
        );
    }

    #[test]
    fn segment_along_notch_mouth_is_blocked() {
        // top edge interrupted by a V-notch: the straight line across the
        // notch mouth only touches vertices but leaves the layout
        let lay = Layout::new(
            "notch",
            vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(2.0, 2.0),
                Point::new(1.5, 2.0),
                Point::new(1.0, 1.0),
                Point::new(0.5, 2.0),
                Point::new(0.0, 2.0),
            ],
            vec![],
        );
        assert_eq!(
            segment_clear(&lay, Point::new(0.0, 2.0), Point::new(2.0, 2.0)),
            Ok(false)
        );
        assert_eq!(
            segment_clear(&lay, Point::new(0.5, 2.0), Point::new(1.0, 1.0)),
            Ok(true)
        );
    }

    #[test]
    fn hull_and_convex_clip() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 0.5),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!(signed_area(&h) > 0.0);
        let half = clip_convex_left(&h, Point::new(0.5, 0.0), Point::new(0.5, 1.0));
        assert!((signed_area(&half) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn union_all_merges_overlaps() {
        let regs = [
            square(0.0, 0.0, 1.0),
            square(0.5, 0.0, 1.0),
            square(5.0, 5.0, 1.0),
        ];
        let u = Region::union_all(regs.iter());
        assert!((u.area() - 2.5).abs() < 1e-9);
    }
}
