//! Triangulation of the layout and longest-side refinement.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::floorplan::{Layout, Range};
use crate::geometry::{orient, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triangle {
    pub id: usize,
    /// Counter-clockwise.
    pub vertices: [Point; 3],
}

impl Triangle {
    pub fn area(&self) -> f64 {
        let [a, b, c] = self.vertices;
        0.5 * orient(a, b, c)
    }

    pub fn centroid(&self) -> Point {
        let [a, b, c] = self.vertices;
        Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    }

    pub fn side_lengths(&self) -> [f64; 3] {
        let [a, b, c] = self.vertices;
        [a.dist(b), b.dist(c), c.dist(a)]
    }

    pub fn max_side(&self) -> f64 {
        self.side_lengths().into_iter().fold(0.0, f64::max)
    }

    /// Point from barycentric-ish unit square coordinates (uniform when
    /// `u, v` are uniform in `[0, 1)`).
    pub fn sample(&self, u: f64, v: f64) -> Point {
        let (u, v) = if u + v > 1.0 {
            (1.0 - u, 1.0 - v)
        } else {
            (u, v)
        };
        let [a, b, c] = self.vertices;
        a + (b - a) * u + (c - a) * v
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PartitionError {
    #[error("layout has zero area")]
    Degenerate,
    #[error("refinement bound R = {0} is below eps_len")]
    BoundTooSmall(f64),
    #[error("triangulation failed: {0}")]
    Triangulation(String),
}

/// Indexed triangle mesh; triangles share vertex indices along common sides.
#[derive(Debug, Clone, Default)]
pub struct Mesh {
    pub points: Vec<Point>,
    /// Counter-clockwise index triples.
    pub tris: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn triangle(&self, i: usize) -> Triangle {
        let [a, b, c] = self.tris[i];
        Triangle {
            id: i,
            vertices: [self.points[a], self.points[b], self.points[c]],
        }
    }

    pub fn triangles(&self) -> Vec<Triangle> {
        (0..self.tris.len()).map(|i| self.triangle(i)).collect()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.tris.len()).map(|i| self.triangle(i).area()).sum()
    }
}

/// Ear-clipping triangulation of the layout (holes bridged into the outer ring).
pub fn triangulate_mesh(layout: &Layout) -> Result<Mesh, PartitionError> {
    let eps_area = layout.eps_len() * layout.eps_len();
    if layout.area() <= eps_area {
        return Err(PartitionError::Degenerate);
    }
    let mut points: Vec<Point> = Vec::with_capacity(layout.vertex_count());
    let mut hole_starts = Vec::with_capacity(layout.holes.len());
    points.extend_from_slice(&layout.outer);
    for h in &layout.holes {
        hole_starts.push(points.len());
        points.extend_from_slice(h);
    }
    let flat: Vec<f64> = points.iter().flat_map(|p| [p.x, p.y]).collect();
    let idx = earcutr::earcut(&flat, &hole_starts, 2)
        .map_err(|e| PartitionError::Triangulation(format!("{e:?}")))?;
    let mut tris = Vec::with_capacity(idx.len() / 3);
    for t in idx.chunks_exact(3) {
        let (a, b, c) = (t[0], t[1], t[2]);
        let o = orient(points[a], points[b], points[c]);
        if o.abs() * 0.5 <= eps_area {
            continue;
        }
        tris.push(if o > 0.0 { [a, b, c] } else { [a, c, b] });
    }
    if tris.is_empty() {
        return Err(PartitionError::Degenerate);
    }
    Ok(Mesh { points, tris })
}

pub fn triangulate(layout: &Layout) -> Result<Vec<Triangle>, PartitionError> {
    Ok(triangulate_mesh(layout)?.triangles())
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

struct Refiner {
    mesh: Mesh,
    edges: HashMap<(usize, usize), Vec<usize>>,
}

impl Refiner {
    fn new(mesh: Mesh) -> Self {
        let mut r = Refiner {
            mesh,
            edges: HashMap::new(),
        };
        for t in 0..r.mesh.tris.len() {
            r.link(t);
        }
        r
    }

    fn link(&mut self, t: usize) {
        let v = self.mesh.tris[t];
        for k in 0..3 {
            self.edges
                .entry(edge_key(v[k], v[(k + 1) % 3]))
                .or_default()
                .push(t);
        }
    }

    fn unlink(&mut self, t: usize) {
        let v = self.mesh.tris[t];
        for k in 0..3 {
            if let Some(list) = self.edges.get_mut(&edge_key(v[k], v[(k + 1) % 3])) {
                list.retain(|&x| x != t);
            }
        }
    }

    /// Longest side as local edge index, ties to the lowest index.
    fn longest_side(&self, t: usize) -> (usize, f64) {
        let v = self.mesh.tris[t];
        let p = &self.mesh.points;
        let mut best = (0, p[v[0]].dist(p[v[1]]));
        for k in 1..3 {
            let len = p[v[k]].dist(p[v[(k + 1) % 3]]);
            if len > best.1 {
                best = (k, len);
            }
        }
        best
    }

    /// Splits `t` at midpoint index `m` of its side `(a, b)`; returns the new triangle.
    fn split(&mut self, t: usize, a: usize, b: usize, m: usize) -> usize {
        let v = self.mesh.tris[t];
        let k = (0..3)
            .find(|&k| edge_key(v[k], v[(k + 1) % 3]) == edge_key(a, b))
            .expect("side belongs to triangle");
        let (p, q, o) = (v[k], v[(k + 1) % 3], v[(k + 2) % 3]);
        self.unlink(t);
        self.mesh.tris[t] = [p, m, o];
        self.link(t);
        let n = self.mesh.tris.len();
        self.mesh.tris.push([m, q, o]);
        self.link(n);
        n
    }
}

/// Refines the base triangulation until no side exceeds `bound`.
///
/// Each over-long triangle is split from the midpoint of its longest side to
/// the opposite vertex; the neighbour across that side is split at the same
/// midpoint so the mesh stays conforming.
pub fn hyper_triangulate_mesh(layout: &Layout, bound: Range) -> Result<Mesh, PartitionError> {
    if let Range::Finite(r) = bound {
        if r.is_nan() || r <= layout.eps_len() {
            return Err(PartitionError::BoundTooSmall(r));
        }
    }
    let base = triangulate_mesh(layout)?;
    let Range::Finite(r) = bound else {
        return Ok(base);
    };
    let mut rf = Refiner::new(base);
    let mut queue: VecDeque<usize> = (0..rf.mesh.tris.len()).collect();
    while let Some(t) = queue.pop_front() {
        let (k, len) = rf.longest_side(t);
        if len <= r {
            continue;
        }
        let v = rf.mesh.tris[t];
        let (a, b) = (v[k], v[(k + 1) % 3]);
        let m = rf.mesh.points.len();
        let mid = rf.mesh.points[a].midpoint(rf.mesh.points[b]);
        rf.mesh.points.push(mid);
        let neighbours: Vec<usize> = rf.edges[&edge_key(a, b)]
            .iter()
            .copied()
            .filter(|&u| u != t)
            .collect();
        let nt = rf.split(t, a, b, m);
        queue.push_back(t);
        queue.push_back(nt);
        for u in neighbours {
            let nu = rf.split(u, a, b, m);
            queue.push_back(u);
            queue.push_back(nu);
        }
    }
    Ok(rf.mesh)
}

pub fn hyper_triangulate(layout: &Layout, bound: Range) -> Result<Vec<Triangle>, PartitionError> {
    Ok(hyper_triangulate_mesh(layout, bound)?.triangles())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::parse_layout;

    fn square(s: f64) -> Layout {
        parse_layout(&format!(r#"{{"outer":[[0,0],[{s},0],[{s},{s}],[0,{s}]]}}"#)).unwrap()
    }

    fn total(ts: &[Triangle]) -> f64 {
        ts.iter().map(Triangle::area).sum()
    }

    #[test]
    fn unit_square_two_triangles() {
        let ts = triangulate(&square(1.0)).unwrap();
        assert_eq!(ts.len(), 2);
        assert!((total(&ts) - 1.0).abs() < 1e-12);
        assert!(ts.iter().all(|t| t.area() > 0.0));
    }

    #[test]
    fn l_shape_area_sum() {
        let l = parse_layout(r#"{"outer":[[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]]}"#).unwrap();
        let ts = triangulate(&l).unwrap();
        assert_eq!(ts.len(), 4);
        assert!((total(&ts) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn square_with_hole_area_sum() {
        let l = parse_layout(
            r#"{"outer":[[0,0],[1,0],[1,1],[0,1]],"holes":[[[0.25,0.25],[0.75,0.25],[0.75,0.75],[0.25,0.75]]]}"#,
        )
        .unwrap();
        let ts = triangulate(&l).unwrap();
        assert!((total(&ts) - 0.75).abs() < 1e-9);
        for t in &ts {
            let c = t.centroid();
            assert!(!(c.x > 0.25 && c.x < 0.75 && c.y > 0.25 && c.y < 0.75));
        }
    }

    #[test]
    fn unbounded_refinement_is_base_triangulation() {
        let sq = square(1.0);
        assert_eq!(
            hyper_triangulate(&sq, Range::Unbounded).unwrap(),
            triangulate(&sq).unwrap()
        );
    }

    #[test]
    fn unit_square_diagonals_split() {
        let ts = hyper_triangulate(&square(1.0), Range::Finite(1.0)).unwrap();
        assert!(ts.len() > 2);
        assert!(ts.iter().all(|t| t.max_side() <= 1.0 + 1e-9));
        assert!((total(&ts) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn large_square_count_window() {
        let ts = hyper_triangulate(&square(22.0), Range::Finite(3.0)).unwrap();
        let k = (22.0f64 / 3.0).powi(2);
        assert!(
            ts.len() as f64 >= 2.0 * k && ts.len() as f64 <= 8.0 * k,
            "{}",
            ts.len()
        );
        assert!(ts.iter().all(|t| t.max_side() <= 3.0 + 1e-9));
        assert!((total(&ts) - 484.0).abs() < 484.0 * 1e-6);
    }

    #[test]
    fn refined_mesh_is_conforming() {
        let l = parse_layout(r#"{"outer":[[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]]}"#).unwrap();
        let mesh = hyper_triangulate_mesh(&l, Range::Finite(0.3)).unwrap();
        // every interior side is shared by exactly two triangles, and no
        // vertex sits in the middle of another triangle's side
        for (i, t) in mesh.tris.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (mesh.points[t[k]], mesh.points[t[(k + 1) % 3]]);
                for (j, p) in mesh.points.iter().enumerate() {
                    if t.contains(&j) {
                        continue;
                    }
                    let d = crate::geometry::point_segment_distance(*p, a, b);
                    assert!(d > 1e-9, "T-junction at vertex {j} on side of triangle {i}");
                }
            }
        }
    }

    #[test]
    fn tiny_bound_is_rejected() {
        assert_eq!(
            hyper_triangulate(&square(1.0), Range::Finite(1e-12)),
            Err(PartitionError::BoundTooSmall(1e-12))
        );
    }
}
