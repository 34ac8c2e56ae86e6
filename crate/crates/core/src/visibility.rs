//! Line-of-sight areas of points, polygons and cliques.
//!
//! The visibility polygon of a point is the layout minus the union of the
//! shadows every layout edge casts away from the point, clipped to the
//! range disk when the range is finite.

use serde::Serialize;

use crate::floorplan::{Layout, Range};
use crate::geometry::{
    convex_hull, disk_region, orient, point_segment_distance, segment_clear_unchecked, Disk, Point,
    Provenance, Region,
};
use crate::par;
use crate::partition::Mesh;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "id")]
pub enum LosSource {
    Point(Point),
    Polygon(Vec<Point>),
    Triangle(usize),
    Clique(usize),
}

#[derive(Debug, Clone)]
pub struct LosArea {
    pub region: Region,
    pub source: LosSource,
    pub range: Range,
}

impl LosArea {
    pub fn is_empty(&self, eps_area: f64) -> bool {
        self.region.is_empty(eps_area)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VisibilityError {
    #[error("source point {0} lies outside the layout")]
    OutsideLayout(Point),
    #[error("clique LoS area needs at least one member area")]
    EmptyClique,
}

/// Reusable per-layout state for visibility queries.
#[derive(Debug, Clone)]
pub struct Visibility<'a> {
    layout: &'a Layout,
    layout_region: Region,
    diag: f64,
    arc_segments: usize,
}

impl<'a> Visibility<'a> {
    pub fn new(layout: &'a Layout, arc_segments: usize) -> Self {
        Self {
            layout,
            layout_region: Region::from_rings_with_holes(&layout.outer, &layout.holes)
                .with_provenance(Provenance::Layout),
            diag: layout.bbox().diagonal(),
            arc_segments,
        }
    }

    pub fn layout(&self) -> &Layout {
        self.layout
    }

    pub fn layout_region(&self) -> &Region {
        &self.layout_region
    }

    pub fn arc_segments(&self) -> usize {
        self.arc_segments
    }

    /// Region seen from `p` within range `r`.
    pub fn point_region(&self, p: Point, r: Range) -> Result<Region, VisibilityError> {
        let eps = self.layout.eps_len();
        if !self.layout.contains(p, eps) {
            return Err(VisibilityError::OutsideLayout(p));
        }
        let reach = match r {
            Range::Finite(r) => r.min(self.diag),
            Range::Unbounded => self.diag,
        };
        let mut shadows: Vec<Region> = Vec::new();
        for (c, d) in self.layout.edges() {
            let len = c.dist(d);
            if len <= eps || point_segment_distance(p, c, d) <= eps {
                continue;
            }
            if orient(p, c, d).abs() / len <= eps {
                continue;
            }
            if let Range::Finite(r) = r {
                if point_segment_distance(p, c, d) > r {
                    continue;
                }
            }
            // far enough that a 30-degree chord still clears both the range
            // and the edge, which keeps the ring simple
            let far = 1.2 * reach.max(p.dist(c)).max(p.dist(d)) + 1.0;
            shadows.push(Region::from_ring(&shadow_ring(p, c, d, far)));
        }
        let base = match r {
            Range::Finite(r) => self
                .layout_region
                .intersect(&disk_region(Disk::new(p, r), self.arc_segments)),
            Range::Unbounded => self.layout_region.clone(),
        };
        let visible = if shadows.is_empty() {
            base
        } else {
            base.subtract(&Region::union_all(shadows.iter()))
        };
        Ok(visible.with_provenance(Provenance::LosPoint))
    }

    pub fn point_area(&self, p: Point, r: Range) -> Result<LosArea, VisibilityError> {
        Ok(LosArea {
            region: self.point_region(p, r)?,
            source: LosSource::Point(p),
            range: r,
        })
    }

    /// Intersection of the vertex LoS areas, minus the cones an obstacle
    /// hides between the vertex sight lines.
    pub fn polygon_area(&self, vertices: &[Point], r: Range) -> Result<LosArea, VisibilityError> {
        let mut acc: Option<Region> = None;
        for &v in vertices {
            let reg = self.point_region(v, r)?;
            acc = Some(match acc {
                None => reg,
                Some(a) => a.intersect(&reg),
            });
        }
        Ok(LosArea {
            region: self.subtract_obstacle_cones(acc.unwrap_or_default(), vertices),
            source: LosSource::Polygon(vertices.to_vec()),
            range: r,
        })
    }

    /// Exact predicate: `q` sees every point of the convex free-space
    /// polygon within range.
    ///
    /// Clear sight lines to the vertices are not enough on their own: an
    /// obstacle can sit between two of them, so no obstacle vertex may lie
    /// strictly inside the hull of `q` and the polygon.
    pub fn sees_all(&self, q: Point, vertices: &[Point], r: Range) -> bool {
        let eps = self.layout.eps_len();
        if !self.layout.contains(q, eps) {
            return false;
        }
        let clear = vertices
            .iter()
            .all(|&v| r.admits(q.dist(v) - eps) && segment_clear_unchecked(self.layout, q, v, eps));
        if !clear || self.layout.holes.is_empty() {
            return clear;
        }
        let mut pts = vertices.to_vec();
        pts.push(q);
        let hull = convex_hull(&pts);
        if hull.len() < 3 {
            return true;
        }
        let strictly_inside = |h: Point| {
            (0..hull.len()).all(|i| {
                let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
                orient(a, b, h) > eps * a.dist(b)
            })
        };
        !self
            .layout
            .holes
            .iter()
            .flatten()
            .any(|&h| strictly_inside(h))
    }

    /// Removes from `region` the points `q` for which some obstacle vertex
    /// lies strictly inside the hull of `q` and the polygon. Such `q` see
    /// every polygon vertex but not the whole polygon.
    fn subtract_obstacle_cones(&self, region: Region, vertices: &[Point]) -> Region {
        let reach = 1.5 * self.diag + 1.0;
        let bbox = region.bbox();
        let cones: Vec<Region> = self
            .layout
            .holes
            .iter()
            .flatten()
            .filter_map(|&h| obstacle_cone(h, vertices, reach))
            .filter(|c| bbox.is_some_and(|b| c.bbox().is_some_and(|cb| cb.overlaps(&b, 0.0))))
            .collect();
        if cones.is_empty() {
            return region;
        }
        region.subtract(&Region::union_all(cones.iter()))
    }

    /// Exact predicate: `a` and `b` see each other within range.
    pub fn sees(&self, a: Point, b: Point, r: Range) -> bool {
        let eps = self.layout.eps_len();
        r.admits(a.dist(b) - eps) && segment_clear_unchecked(self.layout, a, b, eps)
    }
}

/// Points beyond `h` as seen from the convex polygon: the cone at `h`
/// spanned by the directions from the vertices to `h`, truncated at
/// distance `reach`. `None` when `h` is on or inside the polygon.
fn obstacle_cone(h: Point, vertices: &[Point], reach: f64) -> Option<Region> {
    let dirs: Vec<Point> = vertices
        .iter()
        .map(|&v| h - v)
        .filter(|d| d.norm() > 0.0)
        .map(Point::normalized)
        .collect();
    if dirs.len() != vertices.len() || dirs.is_empty() {
        return None;
    }
    // the widest pair of directions bounds the cone
    let mut best = (0, 0, -1.0);
    for i in 0..dirs.len() {
        for j in 0..dirs.len() {
            let angle = dirs[i].cross(dirs[j]).atan2(dirs[i].dot(dirs[j]));
            if angle > best.2 {
                best = (i, j, angle);
            }
        }
    }
    let (i, _, span) = best;
    // every direction must lie within the span, otherwise h is inside
    let inside = dirs.iter().all(|d| {
        let a = dirs[i].cross(*d).atan2(dirs[i].dot(*d));
        (-1e-12..=span + 1e-12).contains(&a)
    });
    if !inside || span <= 1e-12 || span >= std::f64::consts::PI {
        return None;
    }
    // sectors of at most 30 degrees keep every far chord beyond `reach`
    let steps = (span / (std::f64::consts::PI / 6.0)).ceil().max(1.0) as usize;
    let step = span / steps as f64;
    let far = reach / (step / 2.0).cos();
    let mut ring = vec![h];
    for k in 0..=steps {
        ring.push(h + dirs[i].rotate(step * k as f64) * far);
    }
    Some(Region::from_ring(&ring))
}

/// Shadow of edge `cd` as seen from `p`, truncated at distance `far`.
fn shadow_ring(p: Point, c: Point, d: Point, far: f64) -> Vec<Point> {
    let (c, d) = if orient(p, c, d) > 0.0 {
        (c, d)
    } else {
        (d, c)
    };
    // sweep counter-clockwise from the ray through c to the ray through d
    let ac = (c - p).y.atan2((c - p).x);
    let mut ad = (d - p).y.atan2((d - p).x);
    if ad < ac {
        ad += std::f64::consts::TAU;
    }
    let steps = ((ad - ac) / (std::f64::consts::PI / 6.0)).ceil().max(1.0) as usize;
    let mut ring = Vec::with_capacity(steps + 3);
    ring.push(c);
    for i in 0..=steps {
        let a = ac + (ad - ac) * i as f64 / steps as f64;
        ring.push(Point::new(p.x + far * a.cos(), p.y + far * a.sin()));
    }
    ring.push(d);
    ring
}

/// LoS area of a point.
pub fn los_area_point(
    layout: &Layout,
    p: Point,
    r: Range,
    arc_segments: usize,
) -> Result<LosArea, VisibilityError> {
    Visibility::new(layout, arc_segments).point_area(p, r)
}

/// LoS area of a polygon: the points seeing all of its vertices.
pub fn los_area_polygon(
    layout: &Layout,
    vertices: &[Point],
    r: Range,
    arc_segments: usize,
) -> Result<LosArea, VisibilityError> {
    Visibility::new(layout, arc_segments).polygon_area(vertices, r)
}

/// LoS area of a clique: intersection of its members' areas.
pub fn los_area_clique(areas: &[LosArea], clique_id: usize) -> Result<LosArea, VisibilityError> {
    let (first, rest) = areas.split_first().ok_or(VisibilityError::EmptyClique)?;
    let mut region = first.region.clone();
    for a in rest {
        region = region.intersect(&a.region);
    }
    Ok(LosArea {
        region: region.with_provenance(Provenance::LosClique(clique_id)),
        source: LosSource::Clique(clique_id),
        range: first.range,
    })
}

/// Per-triangle LoS areas of a mesh, indexed by triangle id.
///
/// Vertex areas are computed once per mesh vertex and shared by every
/// triangle using that vertex.
pub fn triangle_areas(
    vis: &Visibility<'_>,
    mesh: &Mesh,
    r: Range,
) -> Result<Vec<LosArea>, VisibilityError> {
    let mut used = vec![false; mesh.points.len()];
    for t in &mesh.tris {
        for &v in t {
            used[v] = true;
        }
    }
    let ids: Vec<usize> = (0..mesh.points.len()).filter(|&i| used[i]).collect();
    let computed: Vec<Result<Region, VisibilityError>> =
        par::map(&ids, |&i| vis.point_region(mesh.points[i], r));
    let mut vertex_regions: Vec<Option<Region>> = vec![None; mesh.points.len()];
    for (i, reg) in ids.into_iter().zip(computed) {
        vertex_regions[i] = Some(reg?);
    }
    let tri_ids: Vec<usize> = (0..mesh.tris.len()).collect();
    Ok(par::map(&tri_ids, |&t| {
        let [a, b, c] = mesh.tris[t];
        let reg = |i: usize| vertex_regions[i].as_ref().expect("vertex area computed");
        let region = reg(a).intersect(reg(b)).intersect(reg(c));
        let region =
            vis.subtract_obstacle_cones(region, &[mesh.points[a], mesh.points[b], mesh.points[c]]);
        LosArea {
            region: region.with_provenance(Provenance::LosTriangle(t)),
            source: LosSource::Triangle(t),
            range: r,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::parse_layout;
    use crate::geometry::{segment_clear, DEFAULT_EPS_AREA, DEFAULT_EPS_LEN};

    fn square() -> Layout {
        parse_layout(r#"{"outer":[[0,0],[1,0],[1,1],[0,1]]}"#).unwrap()
    }

    fn l_shape() -> Layout {
        parse_layout(r#"{"outer":[[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]]}"#).unwrap()
    }

    #[test]
    fn convex_layout_sees_everything() {
        let a = los_area_point(&square(), Point::new(0.3, 0.7), Range::Unbounded, 64).unwrap();
        assert!((a.region.area() - 1.0).abs() < 1e-9);
        let t = los_area_polygon(
            &square(),
            &[
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
            ],
            Range::Unbounded,
            64,
        )
        .unwrap();
        assert!((t.region.area() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn l_shape_reflex_shadow() {
        let l = l_shape();
        let p = Point::new(1.5, 0.5);
        let a = los_area_point(&l, p, Range::Unbounded, 64).unwrap();
        assert!(a.region.contains(Point::new(0.9, 1.05), DEFAULT_EPS_LEN));
        assert!(!a.region.contains(Point::new(0.5, 1.9), DEFAULT_EPS_LEN));
        assert!(a.region.contains(p, DEFAULT_EPS_LEN));
        // sample-grid oracle
        let mut disagree = 0;
        for i in 0..40 {
            for j in 0..40 {
                let q = Point::new(0.025 + 0.05 * i as f64, 0.025 + 0.05 * j as f64);
                if !l.contains(q, DEFAULT_EPS_LEN) {
                    continue;
                }
                let oracle = segment_clear(&l, p, q).unwrap();
                if oracle != a.region.contains(q, DEFAULT_EPS_LEN) {
                    disagree += 1;
                }
            }
        }
        assert_eq!(disagree, 0);
    }

    #[test]
    fn range_only_clip_in_square() {
        let p = Point::new(0.5, 0.5);
        let a = los_area_point(&square(), p, Range::Finite(0.2), 64).unwrap();
        let d = disk_region(Disk::new(p, 0.2), 64);
        assert!((a.region.area() - d.area()).abs() < 1e-9);
    }

    #[test]
    fn outside_source_is_an_error() {
        let e = los_area_point(&l_shape(), Point::new(1.5, 1.5), Range::Unbounded, 64).unwrap_err();
        assert_eq!(e, VisibilityError::OutsideLayout(Point::new(1.5, 1.5)));
    }

    #[test]
    fn boundary_sources_work() {
        let l = l_shape();
        // reflex corner sees the whole L
        let a = los_area_point(&l, Point::new(1.0, 1.0), Range::Unbounded, 64).unwrap();
        assert!((a.region.area() - 3.0).abs() < 1e-9);
        // far convex corner only sees part
        let b = los_area_point(&l, Point::new(2.0, 0.0), Range::Unbounded, 64).unwrap();
        assert!(b.region.area() < 3.0 - 0.1);
        assert!(b.region.contains(Point::new(0.5, 0.5), DEFAULT_EPS_LEN));
        assert!(!b.region.contains(Point::new(0.5, 1.9), DEFAULT_EPS_LEN));
    }

    #[test]
    fn triangle_near_corner_excludes_far_arm_shadow() {
        let l = l_shape();
        let tri = [
            Point::new(1.7, 0.1),
            Point::new(1.9, 0.1),
            Point::new(1.9, 0.3),
        ];
        let a = los_area_polygon(&l, &tri, Range::Unbounded, 64).unwrap();
        for q in [Point::new(0.3, 1.9), Point::new(0.6, 1.8)] {
            let oracle = tri.iter().all(|&v| segment_clear(&l, v, q).unwrap());
            assert!(!oracle);
            assert!(!a.region.contains(q, DEFAULT_EPS_LEN));
        }
        assert!(a.region.contains(Point::new(0.5, 0.5), DEFAULT_EPS_LEN));
    }

    #[test]
    fn pillar_between_vertex_sight_lines_hides_the_triangle() {
        let room = parse_layout(
            r#"{"outer":[[0,0],[10,0],[10,10],[0,10]],
                "holes":[[[4.3,4],[4.3,4.4],[4.7,4.4],[4.7,4]]]}"#,
        )
        .unwrap();
        let tri = [
            Point::new(2.0, 1.0),
            Point::new(7.0, 1.0),
            Point::new(2.0, 0.0),
        ];
        let q = Point::new(4.5, 8.0);
        let vis = Visibility::new(&room, 64);
        assert!(tri.iter().all(|&v| vis.sees(q, v, Range::Unbounded)));
        assert!(!vis.sees(q, Point::new(4.5, 1.0), Range::Unbounded));
        assert!(!vis.sees_all(q, &tri, Range::Unbounded));
        let a = vis.polygon_area(&tri, Range::Unbounded).unwrap();
        assert!(!a.region.contains(q, DEFAULT_EPS_LEN));
        let open = Point::new(9.0, 1.5);
        assert!(vis.sees_all(open, &tri, Range::Unbounded));
        assert!(a.region.contains(open, DEFAULT_EPS_LEN));
    }

    #[test]
    fn zero_range_polygon_is_empty() {
        let tri = [
            Point::new(0.1, 0.1),
            Point::new(0.9, 0.1),
            Point::new(0.1, 0.9),
        ];
        let a = los_area_polygon(&square(), &tri, Range::Finite(1e-6), 64).unwrap();
        assert!(a.is_empty(DEFAULT_EPS_AREA));
    }

    #[test]
    fn clique_area_identities() {
        let l = l_shape();
        let a = los_area_point(&l, Point::new(1.5, 0.5), Range::Unbounded, 64).unwrap();
        let single = los_area_clique(std::slice::from_ref(&a), 0).unwrap();
        assert!((single.region.area() - a.region.area()).abs() < 1e-12);
        let empty = LosArea {
            region: Region::empty(),
            source: LosSource::Clique(9),
            range: Range::Unbounded,
        };
        let both = los_area_clique(&[a, empty], 1).unwrap();
        assert!(both.is_empty(DEFAULT_EPS_AREA));
        assert_eq!(
            los_area_clique(&[], 2).unwrap_err(),
            VisibilityError::EmptyClique
        );
    }
}
