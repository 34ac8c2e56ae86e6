//! Primary, secondary and trinary LoS graphs over partition triangles.

use std::fmt;

use serde::Serialize;

use crate::evaluate::is_triplet;
use crate::floorplan::Range;
use crate::geometry::{Point, Region};
use crate::par;
use crate::partition::Triangle;
use crate::planner::{forbidden_region, CliqueCover};
use crate::visibility::{LosArea, Visibility};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Primary,
    Secondary,
    Trinary,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Primary => "primary",
            Tier::Secondary => "secondary",
            Tier::Trinary => "trinary",
        })
    }
}

/// Simple undirected graph on triangle ids `0..size`, some of which may be
/// absent. Adjacency is a dense bit matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LosGraph {
    pub tier: Tier,
    size: usize,
    words: usize,
    present: Vec<bool>,
    bits: Vec<u64>,
}

impl LosGraph {
    /// Edgeless graph containing every id in `0..size`.
    pub fn new(size: usize, tier: Tier) -> Self {
        let words = size.div_ceil(64);
        Self {
            tier,
            size,
            words,
            present: vec![true; size],
            bits: vec![0; words * size],
        }
    }

    pub fn from_edges(size: usize, tier: Tier, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(size, tier);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.size && self.present[v]
    }

    pub fn nodes(&self) -> Vec<usize> {
        (0..self.size).filter(|&v| self.present[v]).collect()
    }

    pub fn node_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.contains(a)
            && self.contains(b)
            && self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b, "self-loop on node {a}");
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
        self.bits[b * self.words + a / 64] |= 1 << (a % 64);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] &= !(1 << (b % 64));
        self.bits[b * self.words + a / 64] &= !(1 << (a % 64));
    }

    /// Removes a node and its incident edges.
    pub fn remove_node(&mut self, v: usize) {
        if !self.contains(v) {
            return;
        }
        for u in self.neighbors(v) {
            self.remove_edge(v, u);
        }
        self.present[v] = false;
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.size).filter(|&u| self.has_edge(v, u)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        if !self.contains(v) {
            return 0;
        }
        let row = &self.bits[v * self.words..(v + 1) * self.words];
        row.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in self.nodes() {
            for b in (a + 1)..self.size {
                if self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.nodes().iter().map(|&v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn is_clique(&self, nodes: &[usize]) -> bool {
        nodes.iter().all(|&v| self.contains(v))
            && nodes
                .iter()
                .enumerate()
                .all(|(i, &a)| nodes[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    /// JSON adjacency lists keyed by node id.
    pub fn to_json(&self) -> serde_json::Value {
        let adjacency: serde_json::Map<String, serde_json::Value> = self
            .nodes()
            .into_iter()
            .map(|v| (v.to_string(), serde_json::json!(self.neighbors(v))))
            .collect();
        serde_json::json!({
            "tier": self.tier,
            "nodes": self.nodes(),
            "adjacency": adjacency,
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("{triangles} triangles but {areas} LoS areas")]
    Mismatch { triangles: usize, areas: usize },
    #[error("primary cliques do not partition the graph nodes: {0}")]
    NotAPartition(String),
    #[error("trinary graph needs a non-empty deployment")]
    EmptyDeployment,
}

/// `(i, j)` adjacent iff their LoS areas overlap in at least `eps_area`.
pub fn build_primary_lg(
    triangles: &[Triangle],
    areas: &[LosArea],
    eps_area: f64,
) -> Result<LosGraph, GraphError> {
    if triangles.len() != areas.len() {
        return Err(GraphError::Mismatch {
            triangles: triangles.len(),
            areas: areas.len(),
        });
    }
    let m = areas.len();
    let ids: Vec<usize> = (0..m).collect();
    let rows: Vec<Vec<usize>> = par::map(&ids, |&i| {
        let Some(bi) = areas[i].region.bbox() else {
            return Vec::new();
        };
        ((i + 1)..m)
            .filter(|&j| {
                let Some(bj) = areas[j].region.bbox() else {
                    return false;
                };
                bi.overlaps(&bj, 0.0)
                    && !areas[i]
                        .region
                        .intersect(&areas[j].region)
                        .is_empty(eps_area)
            })
            .collect()
    });
    let mut g = LosGraph::new(m, Tier::Primary);
    for (i, row) in rows.into_iter().enumerate() {
        for j in row {
            g.add_edge(i, j);
        }
    }
    Ok(g)
}

/// Maps each graph node to its clique index; errors unless the cover
/// partitions exactly the graph's node set.
pub fn clique_index(g: &LosGraph, cover: &CliqueCover) -> Result<Vec<Option<usize>>, GraphError> {
    let mut owner: Vec<Option<usize>> = vec![None; g.size()];
    for (k, c) in cover.cliques.iter().enumerate() {
        for &v in c {
            if !g.contains(v) {
                return Err(GraphError::NotAPartition(format!(
                    "node {v} is not in the graph"
                )));
            }
            if let Some(prev) = owner[v] {
                return Err(GraphError::NotAPartition(format!(
                    "node {v} is in cliques {prev} and {k}"
                )));
            }
            owner[v] = Some(k);
        }
    }
    if let Some(v) = g.nodes().into_iter().find(|&v| owner[v].is_none()) {
        return Err(GraphError::NotAPartition(format!(
            "node {v} is in no clique"
        )));
    }
    Ok(owner)
}

/// Drops edges inside a primary clique whose shared LoS area lies entirely
/// in that clique's forbidden region.
pub fn edge_elimination(
    g1: &LosGraph,
    primary: &CliqueCover,
    areas: &[LosArea],
    ds: f64,
    arc_segments: usize,
    eps_area: f64,
) -> Result<LosGraph, GraphError> {
    let owner = clique_index(g1, primary)?;
    let forbidden: Vec<Region> = primary
        .areas
        .iter()
        .map(|a| forbidden_region(a, ds, arc_segments))
        .collect();
    let edges = g1.edges();
    let doomed: Vec<bool> = par::map(&edges, |&(i, j)| match (owner[i], owner[j]) {
        (Some(a), Some(b)) if a == b => areas[i]
            .region
            .intersect(&areas[j].region)
            .subtract(&forbidden[a])
            .is_empty(eps_area),
        _ => false,
    });
    let mut g2 = g1.clone();
    g2.tier = Tier::Secondary;
    for (&(i, j), gone) in edges.iter().zip(doomed) {
        if gone {
            g2.remove_edge(i, j);
        }
    }
    Ok(g2)
}

/// Indices of PRNs that see every vertex of `tri` within range.
pub fn visible_prns(vis: &Visibility<'_>, tri: &Triangle, prns: &[Point], r: Range) -> Vec<usize> {
    (0..prns.len())
        .filter(|&i| vis.sees_all(prns[i], &tri.vertices, r))
        .collect()
}

/// Whether some three of the given points form a triplet.
pub fn has_triplet(points: &[Point], ds: f64, thetas_deg: f64) -> bool {
    let n = points.len();
    for a in 0..n {
        for b in (a + 1)..n {
            if points[a].dist(points[b]) + 1e-9 < ds {
                continue;
            }
            for c in (b + 1)..n {
                if is_triplet(points[a], points[b], points[c], ds, thetas_deg) {
                    return true;
                }
            }
        }
    }
    false
}

/// Removes the nodes whose LoS area already holds a triplet of placed PRNs.
#[allow(clippy::too_many_arguments)]
pub fn build_trinary_lg(
    g2: &LosGraph,
    triangles: &[Triangle],
    vis: &Visibility<'_>,
    placed: &[Point],
    r: Range,
    ds: f64,
    thetas_deg: f64,
) -> Result<LosGraph, GraphError> {
    if placed.is_empty() {
        return Err(GraphError::EmptyDeployment);
    }
    let nodes = g2.nodes();
    let served: Vec<bool> = par::map(&nodes, |&v| {
        let seen: Vec<Point> = visible_prns(vis, &triangles[v], placed, r)
            .into_iter()
            .map(|i| placed[i])
            .collect();
        has_triplet(&seen, ds, thetas_deg)
    });
    let mut g3 = g2.clone();
    g3.tier = Tier::Trinary;
    for (&v, s) in nodes.iter().zip(served) {
        if s {
            g3.remove_node(v);
        }
    }
    Ok(g3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::parse_layout;
    use crate::geometry::DEFAULT_EPS_AREA;
    use crate::partition::hyper_triangulate_mesh;
    use crate::visibility::triangle_areas;

    #[test]
    fn graph_basics() {
        let mut g = LosGraph::from_edges(5, Tier::Primary, &[(0, 1), (1, 2), (0, 2), (3, 4)]);
        assert_eq!(g.edge_count(), 4);
        assert!(g.is_clique(&[0, 1, 2]));
        assert!(!g.is_clique(&[0, 1, 3]));
        assert_eq!(g.degree(1), 2);
        g.remove_node(1);
        assert_eq!(g.nodes(), vec![0, 2, 3, 4]);
        assert!(!g.has_edge(0, 1));
        assert_eq!(g.edge_count(), 2);
        let js = g.to_json();
        assert_eq!(js["adjacency"]["0"], serde_json::json!([2]));
    }

    #[test]
    fn convex_layout_gives_complete_graph() {
        let l = parse_layout(r#"{"outer":[[0,0],[4,0],[4,4],[0,4]]}"#).unwrap();
        let mesh = hyper_triangulate_mesh(&l, Range::Finite(2.0)).unwrap();
        let vis = Visibility::new(&l, 64);
        let areas = triangle_areas(&vis, &mesh, Range::Unbounded).unwrap();
        let tris = mesh.triangles();
        let g = build_primary_lg(&tris, &areas, DEFAULT_EPS_AREA).unwrap();
        let m = tris.len();
        assert_eq!(g.edge_count(), m * (m - 1) / 2);
        let g2 = build_primary_lg(&tris[..2], &areas, DEFAULT_EPS_AREA);
        assert!(matches!(g2, Err(GraphError::Mismatch { .. })));
    }

    #[test]
    fn walled_rooms_are_disconnected() {
        // two rooms separated by a full-height wall notch with a 0 m gap
        // cannot see each other; a thin slit keeps the layout simple
        let l = parse_layout(
            r#"{"outer":[[0,0],[2,0],[2,1.999],[2.1,1.999],[2.1,0],[4,0],[4,2],[0,2]]}"#,
        )
        .unwrap();
        let mesh = hyper_triangulate_mesh(&l, Range::Unbounded).unwrap();
        let vis = Visibility::new(&l, 64);
        let areas = triangle_areas(&vis, &mesh, Range::Finite(1.5)).unwrap();
        let tris = mesh.triangles();
        let g = build_primary_lg(&tris, &areas, DEFAULT_EPS_AREA).unwrap();
        for (a, b) in g.edges() {
            let (ca, cb) = (tris[a].centroid(), tris[b].centroid());
            assert!(
                !(ca.x < 2.0 && cb.x > 2.1 && ca.y < 1.5 && cb.y < 1.5),
                "{a}-{b}"
            );
        }
    }

    #[test]
    fn triplet_search() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
        ];
        assert!(!has_triplet(&pts, 0.5, 10.0));
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(0.0, 4.0),
        ];
        assert!(has_triplet(&pts, 4.0, 40.0));
    }
}
