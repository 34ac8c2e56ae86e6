//! Clique covers of the LoS graphs and PRN placement.
//!
//! Planning runs tier by tier. Each tier covers its LoS graph with cliques
//! whose members share a non-empty placement area, then puts one PRN in every
//! such area. The secondary tier only admits cliques whose shared area leaves
//! room outside the forbidden regions of the primary cliques they touch; the
//! trinary tier additionally keeps each PRN well spaced from a committed pair
//! of already placed PRNs.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::evaluate::is_triplet;
use crate::floorplan::{ConfigError, Layout, PlanConfig, Range};
use crate::geometry::{
    circumscribed_ring, clip_convex_left, convex_hull, disk_region_circumscribed, BBox, Disk,
    Point, Provenance, Region,
};
pub use crate::losgraph::Tier;
use crate::losgraph::{
    build_primary_lg, build_trinary_lg, edge_elimination, has_triplet, visible_prns, GraphError,
    LosGraph,
};
use crate::par;
use crate::partition::{hyper_triangulate_mesh, Mesh, PartitionError, Triangle};
use crate::visibility::{triangle_areas, LosArea, Visibility, VisibilityError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Visibility(#[from] VisibilityError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("LoS area of triangle {0} is empty; use a smaller hyper-triangulation bound ht_R")]
    EmptyLosArea(usize),
    #[error("no {tier} clique can hold triangle {triangle}")]
    Uncoverable { tier: Tier, triangle: usize },
    #[error("no valid {tier} PRN position in area {area}")]
    Placement { tier: Tier, area: usize },
    #[error("node {0} is not in the primary cover")]
    UnknownNode(usize),
    #[error("placed PRNs do not give triangle {triangle} {n}-LoS coverage")]
    GuaranteeUnmet { triangle: usize, n: u8 },
    #[error("placement needs one related point list per area ({areas} areas, {related} lists)")]
    RelatedMismatch { areas: usize, related: usize },
}

/// Cliques of one tier with their placement areas.
#[derive(Debug, Clone)]
pub struct CliqueCover {
    pub tier: Tier,
    pub cliques: Vec<Vec<usize>>,
    pub areas: Vec<Region>,
    /// Trinary tier only: for each clique member, the indices of the two
    /// placed PRNs it was admitted with. A trinary entry with no members
    /// is a helper PRN added to unblock a triangle.
    pub pairs: Vec<Vec<(usize, usize)>>,
}

impl CliqueCover {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    /// Clique index of every node id below `size`.
    pub fn owners(&self, size: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; size];
        for (k, c) in self.cliques.iter().enumerate() {
            for &v in c {
                if v < size {
                    owner[v] = Some(k);
                }
            }
        }
        owner
    }
}

/// Greedy clique cover driven by an admission rule.
///
/// Each round sorts the remaining nodes by ascending degree (ties by id) and
/// grows one clique: a node joins when it is adjacent to every member and
/// `admit(state, node)` yields the clique's new state. The first admitted
/// node gets `admit(None, node)`. Returns `Err(node)` when a round admits
/// nobody, naming the lowest-degree remaining node.
///
/// A bounded exhaustive search then looks for a smaller cover, which makes
/// the result exact on small graphs.
pub fn greedy_clique_cover<S: Clone>(
    g: &LosGraph,
    mut admit: impl FnMut(Option<&S>, usize) -> Option<S>,
) -> Result<Vec<(Vec<usize>, S)>, usize> {
    let g0 = g;
    let mut g = g.clone();
    let mut out = Vec::new();
    while !g.is_empty() {
        let mut order = g.nodes();
        order.sort_by_key(|&v| (g.degree(v), v));
        let mut members: Vec<usize> = Vec::new();
        let mut state: Option<S> = None;
        for &q in &order {
            if !members.iter().all(|&c| g.has_edge(c, q)) {
                continue;
            }
            if let Some(s) = admit(state.as_ref(), q) {
                members.push(q);
                state = Some(s);
            }
        }
        let Some(state) = state else {
            return Err(order[0]);
        };
        for &v in &members {
            g.remove_node(v);
        }
        out.push((members, state));
    }
    Ok(improve_cover(g0, out, &mut admit))
}

/// Admission calls the exhaustive improvement search may spend.
const EXACT_SEARCH_BUDGET: usize = 20_000;

/// Size of a greedy independent set, a lower bound on any clique cover.
fn independent_lower_bound(g: &LosGraph) -> usize {
    let mut g = g.clone();
    let mut count = 0;
    while let Some(v) = g.nodes().into_iter().min_by_key(|&v| (g.degree(v), v)) {
        for u in g.neighbors(v) {
            g.remove_node(u);
        }
        g.remove_node(v);
        count += 1;
    }
    count
}

struct ExactSearch<'a, S, F> {
    g: &'a LosGraph,
    order: Vec<usize>,
    admit: &'a mut F,
    budget: usize,
    floor: usize,
    best: Vec<(Vec<usize>, S)>,
}

impl<S: Clone, F: FnMut(Option<&S>, usize) -> Option<S>> ExactSearch<'_, S, F> {
    /// Assigns `order[i..]` to cliques, keeping any cover smaller than the best.
    fn run(&mut self, i: usize, cover: &mut Vec<(Vec<usize>, S)>) {
        if self.budget == 0 || self.best.len() <= self.floor || cover.len() >= self.best.len() {
            return;
        }
        let Some(&v) = self.order.get(i) else {
            self.best = cover.clone();
            return;
        };
        for k in 0..cover.len() {
            if !cover[k].0.iter().all(|&c| self.g.has_edge(c, v)) || self.budget == 0 {
                continue;
            }
            self.budget -= 1;
            if let Some(next) = (self.admit)(Some(&cover[k].1), v) {
                let prev = std::mem::replace(&mut cover[k].1, next);
                cover[k].0.push(v);
                self.run(i + 1, cover);
                cover[k].0.pop();
                cover[k].1 = prev;
            }
        }
        if cover.len() + 1 < self.best.len() && self.budget > 0 {
            self.budget -= 1;
            if let Some(s) = (self.admit)(None, v) {
                cover.push((vec![v], s));
                self.run(i + 1, cover);
                cover.pop();
            }
        }
    }
}

/// Replaces a greedy cover by a smaller one found by bounded exhaustive
/// search. Stops early once the independent-set bound is met.
fn improve_cover<S: Clone>(
    g: &LosGraph,
    greedy: Vec<(Vec<usize>, S)>,
    admit: &mut impl FnMut(Option<&S>, usize) -> Option<S>,
) -> Vec<(Vec<usize>, S)> {
    let floor = independent_lower_bound(g);
    if greedy.len() <= floor {
        return greedy;
    }
    let mut order = g.nodes();
    order.sort_by_key(|&v| (g.degree(v), v));
    let mut search = ExactSearch {
        g,
        order,
        admit,
        budget: EXACT_SEARCH_BUDGET,
        floor,
        best: greedy,
    };
    search.run(0, &mut Vec::new());
    search.best
}

/// Cover of the primary LoS graph; each clique's area is the intersection
/// of its members' LoS areas.
pub fn primary_mcc(
    g1: &LosGraph,
    areas: &[LosArea],
    eps_area: f64,
) -> Result<CliqueCover, PlanError> {
    let cover = greedy_clique_cover(g1, |acc: Option<&Region>, q| {
        let next = match acc {
            None => areas[q].region.clone(),
            Some(a) => a.intersect(&areas[q].region),
        };
        (!next.is_empty(eps_area)).then_some(next)
    })
    .map_err(|t| {
        if areas[t].is_empty(eps_area) {
            PlanError::EmptyLosArea(t)
        } else {
            PlanError::Uncoverable {
                tier: Tier::Primary,
                triangle: t,
            }
        }
    })?;
    Ok(finish_cover(Tier::Primary, cover))
}

fn finish_cover(tier: Tier, cover: Vec<(Vec<usize>, Region)>) -> CliqueCover {
    let n = cover.len();
    let (cliques, areas): (Vec<_>, Vec<_>) = cover
        .into_iter()
        .enumerate()
        .map(|(k, (c, a))| (c, a.with_provenance(Provenance::LosClique(k))))
        .unzip();
    CliqueCover {
        tier,
        cliques,
        areas,
        pairs: vec![Vec::new(); n],
    }
}

/// Points within `ds` of every given point, over-approximated by
/// intersecting circumscribed polygons of the disks around the hull
/// vertices. Empty when `ds` is zero or the points are too far apart.
pub fn forbidden_region_of_points(points: &[Point], ds: f64, arc_segments: usize) -> Region {
    if ds <= 0.0 || points.is_empty() {
        return Region::empty();
    }
    let hull = convex_hull(points);
    for (i, a) in hull.iter().enumerate() {
        if hull[i + 1..].iter().any(|b| a.dist(*b) > 2.0 * ds + 1e-9) {
            return Region::empty();
        }
    }
    let mut poly = circumscribed_ring(Disk::new(hull[0], ds), arc_segments);
    for &v in &hull[1..] {
        let ring = circumscribed_ring(Disk::new(v, ds), arc_segments);
        for k in 0..ring.len() {
            poly = clip_convex_left(&poly, ring[k], ring[(k + 1) % ring.len()]);
            if poly.len() < 3 {
                return Region::empty();
            }
        }
    }
    Region::from_ring(&poly).with_provenance(Provenance::Forbidden)
}

/// Forbidden region of an area: the points within `ds` of all of it.
pub fn forbidden_region(area: &Region, ds: f64, arc_segments: usize) -> Region {
    forbidden_region_of_points(&area.vertices(), ds, arc_segments)
}

/// Primary cliques touched by the nodes of `clique`, ascending and unique.
pub fn clique_mapping(primary: &CliqueCover, clique: &[usize]) -> Result<Vec<usize>, PlanError> {
    let size = clique.iter().copied().max().map_or(0, |m| m + 1);
    let owner = primary.owners(size);
    let set: Result<BTreeSet<usize>, PlanError> = clique
        .iter()
        .map(|&v| owner[v].ok_or(PlanError::UnknownNode(v)))
        .collect();
    Ok(set?.into_iter().collect())
}

/// The part of `los` outside the forbidden regions of the listed primary cliques.
pub fn well_spaced_area(los: &Region, mapped: &[usize], forbidden: &[Region]) -> Region {
    let mut w = los.clone();
    for &k in mapped {
        if forbidden[k].polygon_count() > 0 {
            w = w.subtract(&forbidden[k]);
        }
    }
    w.with_provenance(Provenance::WellSpaced)
}

/// Cover of the secondary LoS graph. A clique is admitted only while its
/// well-spaced area stays non-empty.
pub fn secondary_mcc(
    g2: &LosGraph,
    primary: &CliqueCover,
    areas: &[LosArea],
    forbidden: &[Region],
    eps_area: f64,
) -> Result<CliqueCover, PlanError> {
    let owner = primary.owners(g2.size());
    for v in g2.nodes() {
        if owner[v].is_none() {
            return Err(PlanError::UnknownNode(v));
        }
    }
    #[derive(Clone)]
    struct State {
        los: Region,
        mapped: BTreeSet<usize>,
        well: Region,
    }
    let cover = greedy_clique_cover(g2, |acc: Option<&State>, q| {
        let los = match acc {
            None => areas[q].region.clone(),
            Some(s) => s.los.intersect(&areas[q].region),
        };
        if los.is_empty(eps_area) {
            return None;
        }
        let mut mapped = acc.map(|s| s.mapped.clone()).unwrap_or_default();
        mapped.insert(owner[q].expect("checked above"));
        let mapped_list: Vec<usize> = mapped.iter().copied().collect();
        let well = well_spaced_area(&los, &mapped_list, forbidden);
        (!well.is_empty(eps_area)).then_some(State { los, mapped, well })
    })
    .map_err(|t| PlanError::Uncoverable {
        tier: Tier::Secondary,
        triangle: t,
    })?;
    Ok(finish_cover(
        Tier::Secondary,
        cover.into_iter().map(|(c, s)| (c, s.well)).collect(),
    ))
}

/// Closed disk through `a` and `b` centred at `c`, as an inscribed polygon
/// that has `a` and `b` among its vertices.
fn disk_through(c: Point, a: Point, b: Point, arc_segments: usize) -> Vec<Point> {
    use std::f64::consts::TAU;
    let rho = c.dist(a);
    let a0 = (a - c).y.atan2((a - c).x);
    let a1 = (b - c).y.atan2((b - c).x);
    let span = (a1 - a0).rem_euclid(TAU);
    let n = arc_segments.max(8);
    let n1 = ((n as f64 * span / TAU).round() as usize).clamp(1, n - 1);
    let n2 = n - n1;
    let mut ring = Vec::with_capacity(n);
    ring.push(a);
    for k in 1..n1 {
        let t = a0 + span * k as f64 / n1 as f64;
        ring.push(Point::new(c.x + rho * t.cos(), c.y + rho * t.sin()));
    }
    ring.push(b);
    for k in 1..n2 {
        let t = a1 + (TAU - span) * k as f64 / n2 as f64;
        ring.push(Point::new(c.x + rho * t.cos(), c.y + rho * t.sin()));
    }
    ring
}

/// Positions `q` inside `bounds` for which `(qi, qj, q)` is a triplet,
/// under-approximated by polygons.
///
/// The result is the union of the two disks on which the chord `qi qj`
/// subtends the angle `thetas`, minus the disks of radius `ds` around both
/// points and minus the two cones where the angle at `qi` or `qj` would fall
/// below `thetas`. The caller checks `|qi qj| >= ds`.
pub fn well_spaced_two_points(
    qi: Point,
    qj: Point,
    ds: f64,
    thetas_deg: f64,
    arc_segments: usize,
    bounds: BBox,
) -> Region {
    let l = qi.dist(qj);
    if l <= 1e-12 {
        return Region::empty();
    }
    let theta = thetas_deg.to_radians();
    let mut w = Region::from_ring(&bounds.ring());
    if theta > 1e-12 {
        let u = (qj - qi) * (1.0 / l);
        let normal = Point::new(-u.y, u.x);
        let mid = qi.midpoint(qj);
        let h = 0.5 * l / theta.tan();
        let lobes: Vec<Region> = [1.0, -1.0]
            .iter()
            .map(|&s| {
                Region::from_ring(&disk_through(mid + normal * (s * h), qi, qj, arc_segments))
            })
            .collect();
        w = w.intersect(&lobes[0].union(&lobes[1]));
        let corners = bounds.ring();
        for (apex, dir) in [(qi, u), (qj, -u)] {
            let reach = corners.iter().map(|c| apex.dist(*c)).fold(l, f64::max);
            let far = 2.0 * (reach + l + 1.0) / theta.cos();
            let cone = [
                apex,
                apex + dir.rotate(-theta) * far,
                apex + dir.rotate(theta) * far,
            ];
            w = w.subtract(&Region::from_ring(&cone));
        }
    }
    if ds > 0.0 {
        for p in [qi, qj] {
            w = w.subtract(&disk_region_circumscribed(Disk::new(p, ds), arc_segments));
        }
    }
    w.with_provenance(Provenance::WellSpacedPair)
}

/// Everything the trinary cover needs besides the graph.
pub struct TrinaryInput<'a> {
    pub triangles: &'a [Triangle],
    pub areas: &'a [LosArea],
    pub vis: &'a Visibility<'a>,
    pub placed: &'a [Point],
    pub range: Range,
    pub ds: f64,
    pub thetas_deg: f64,
    pub arc_segments: usize,
    pub eps_area: f64,
    pub bounds: BBox,
}

/// Result of one trinary clique cover pass.
#[derive(Debug, Clone)]
pub struct TrinaryCover {
    pub cover: CliqueCover,
    /// Nodes that no visible pair of placed PRNs can serve; left uncovered.
    pub stuck: Vec<usize>,
}

/// Cover of the trinary LoS graph. Every member commits to the first pair
/// of placed PRNs it sees (ordered by index) that leaves a non-empty
/// well-spaced area together with the clique so far. Nodes for which no
/// pair works even alone are reported as stuck instead of failing the pass.
pub fn trinary_mcc(g3: &LosGraph, input: &TrinaryInput<'_>) -> Result<TrinaryCover, PlanError> {
    let nodes = g3.nodes();
    let seen: Vec<Vec<usize>> = par::map(&nodes, |&v| {
        visible_prns(input.vis, &input.triangles[v], input.placed, input.range)
    });
    let seen: HashMap<usize, Vec<usize>> = nodes.iter().copied().zip(seen).collect();
    let mut pair_regions: HashMap<(usize, usize), Region> = HashMap::new();
    #[derive(Clone)]
    struct State {
        area: Region,
        pairs: Vec<(usize, usize)>,
    }
    let eps = input.vis.layout().eps_len();
    let mut admit = |acc: Option<&State>, q: usize| {
        let base = match acc {
            None => input.areas[q].region.clone(),
            Some(s) => s.area.intersect(&input.areas[q].region),
        };
        if base.is_empty(input.eps_area) {
            return None;
        }
        let vis_q = &seen[&q];
        for (a, &i) in vis_q.iter().enumerate() {
            for &j in &vis_q[a + 1..] {
                let (qi, qj) = (input.placed[i], input.placed[j]);
                if qi.dist(qj) + eps < input.ds {
                    continue;
                }
                let w = pair_regions.entry((i, j)).or_insert_with(|| {
                    well_spaced_two_points(
                        qi,
                        qj,
                        input.ds,
                        input.thetas_deg,
                        input.arc_segments,
                        input.bounds,
                    )
                });
                let area = base.intersect(w);
                if !area.is_empty(input.eps_area) {
                    let mut pairs = acc.map(|s| s.pairs.clone()).unwrap_or_default();
                    pairs.push((i, j));
                    return Some(State { area, pairs });
                }
            }
        }
        None
    };
    let mut sub = g3.clone();
    let mut stuck = Vec::new();
    for &q in &nodes {
        if admit(None, q).is_none() {
            stuck.push(q);
            sub.remove_node(q);
        }
    }
    let cover = greedy_clique_cover(&sub, admit).map_err(|t| PlanError::Uncoverable {
        tier: Tier::Trinary,
        triangle: t,
    })?;
    let n = cover.len();
    let mut out = CliqueCover {
        tier: Tier::Trinary,
        cliques: Vec::with_capacity(n),
        areas: Vec::with_capacity(n),
        pairs: Vec::with_capacity(n),
    };
    for (k, (c, s)) in cover.into_iter().enumerate() {
        out.cliques.push(c);
        out.areas
            .push(s.area.with_provenance(Provenance::LosClique(k)));
        out.pairs.push(s.pairs);
    }
    Ok(TrinaryCover { cover: out, stuck })
}

/// Extra PRN position for a triangle that no placed pair can serve: the
/// spot in its LoS area that, paired with one PRN it already sees, leaves
/// the largest well-spaced area inside that LoS area.
pub fn helper_position(q: usize, input: &TrinaryInput<'_>) -> Option<Point> {
    let eps = input.vis.layout().eps_len();
    let tri = &input.triangles[q];
    let los = &input.areas[q].region;
    let mut cands: Vec<Point> = candidates(los, eps)
        .into_iter()
        .filter(|&c| input.vis.sees_all(c, &tri.vertices, input.range))
        .collect();
    let stride = cands.len().div_ceil(96).max(1);
    cands = cands.into_iter().step_by(stride).collect();
    let seen = visible_prns(input.vis, tri, input.placed, input.range);
    let scored: Vec<(f64, Point)> = par::map(&cands, |&h| {
        let mut best = 0.0f64;
        for &i in &seen {
            let qi = input.placed[i];
            if qi.dist(h) + eps < input.ds {
                continue;
            }
            let w = well_spaced_two_points(
                qi,
                h,
                input.ds,
                input.thetas_deg,
                input.arc_segments,
                input.bounds,
            );
            best = best.max(los.intersect(&w).area());
        }
        (best, h)
    });
    scored
        .into_iter()
        .filter(|(a, _)| *a >= input.eps_area)
        .fold(None, |acc: Option<(f64, Point)>, (a, h)| match acc {
            Some((b, _)) if b >= a => acc,
            _ => Some((a, h)),
        })
        .map(|(_, h)| h)
}

/// Candidate positions in an area: its vertices plus the centres of a grid
/// over its bounding box that fall inside it.
fn candidates(area: &Region, eps_len: f64) -> Vec<Point> {
    let Some(bb) = area.bbox() else {
        return Vec::new();
    };
    let step = (bb.diagonal() / 64.0).max(eps_len);
    let nx = ((bb.width() / step).ceil() as usize).max(1);
    let ny = ((bb.height() / step).ceil() as usize).max(1);
    let mut out = area.vertices();
    if let Some(c) = area.centroid() {
        out.push(c);
    }
    for iy in 0..ny {
        for ix in 0..nx {
            let p = Point::new(
                bb.min.x + (ix as f64 + 0.5) * bb.width() / nx as f64,
                bb.min.y + (iy as f64 + 0.5) * bb.height() / ny as f64,
            );
            out.push(p);
        }
    }
    out.retain(|&p| area.contains(p, eps_len));
    out
}

/// Picks a PRN position in `area` that passes `valid`.
///
/// With no related points this is the candidate nearest the area centroid;
/// otherwise the candidate whose nearest related point is farthest.
pub fn place_in_area(
    area: &Region,
    related: &[Point],
    eps_len: f64,
    mut valid: impl FnMut(Point) -> bool,
) -> Option<Point> {
    let cands = candidates(area, eps_len);
    let mut keyed: Vec<(f64, usize)> = if related.is_empty() {
        let c = area.centroid()?;
        cands
            .iter()
            .enumerate()
            .map(|(i, p)| (p.dist(c), i))
            .collect()
    } else {
        cands
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let near = related
                    .iter()
                    .map(|r| p.dist(*r))
                    .fold(f64::INFINITY, f64::min);
                (-near, i)
            })
            .collect()
    };
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, i)| cands[i]).find(|&p| valid(p))
}

/// One PRN per area, each chosen relative to its own related points.
pub fn place_prns(
    areas: &[Region],
    related: &[Vec<Point>],
    eps_len: f64,
) -> Result<Vec<Point>, PlanError> {
    if areas.len() != related.len() {
        return Err(PlanError::RelatedMismatch {
            areas: areas.len(),
            related: related.len(),
        });
    }
    areas
        .iter()
        .zip(related)
        .enumerate()
        .map(|(k, (a, rel))| {
            place_in_area(a, rel, eps_len, |_| true).ok_or(PlanError::Placement {
                tier: Tier::Primary,
                area: k,
            })
        })
        .collect()
}

/// Points with pairwise disjoint LoS areas; their count bounds every
/// deployment from below.
#[derive(Debug, Clone, Default, Serialize)]
pub struct HiddenSet {
    pub points: Vec<Point>,
    pub triangles: Vec<usize>,
}

impl HiddenSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Greedy hidden set over triangle centroids, smallest LoS area first.
pub fn hidden_set_lower_bound(
    vis: &Visibility<'_>,
    triangles: &[Triangle],
    r: Range,
    eps_area: f64,
) -> Result<HiddenSet, PlanError> {
    let regions: Vec<Result<Region, VisibilityError>> =
        par::map(triangles, |t| vis.point_region(t.centroid(), r));
    let regions: Vec<Region> = regions.into_iter().collect::<Result<_, _>>()?;
    let mut order: Vec<(f64, usize)> = regions.iter().map(|g| g.area()).zip(0..).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut chosen: Vec<usize> = Vec::new();
    for (_, i) in order {
        if chosen
            .iter()
            .all(|&c| regions[c].intersect(&regions[i]).is_empty(eps_area))
        {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    Ok(HiddenSet {
        points: chosen.iter().map(|&i| triangles[i].centroid()).collect(),
        triangles: chosen,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prn {
    pub x: f64,
    pub y: f64,
    pub tier: Tier,
    /// Index of the clique area within its tier.
    pub area: usize,
}

impl Prn {
    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub g: usize,
    pub g2: usize,
    pub g3: usize,
    pub hidden_t: usize,
}

/// Checks of the deployment size against the hidden-set bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBound {
    /// `n * t <= g + g2 + g3` for the planned coverage level `n`.
    pub satisfied: bool,
    /// The deployment size equals the bound, so no smaller one exists.
    pub provably_optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub config: PlanConfig,
    pub prns: Vec<Prn>,
    pub counts: Counts,
    #[serde(default = "LowerBound::unknown")]
    pub lower_bound: LowerBound,
}

impl LowerBound {
    fn unknown() -> Self {
        Self {
            satisfied: true,
            provably_optimal: false,
        }
    }
}

impl Deployment {
    pub fn points(&self) -> Vec<Point> {
        self.prns.iter().map(Prn::point).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("deployment serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// A deployment together with the intermediate structures that produced it.
#[derive(Debug, Clone)]
pub struct PlanDetail {
    pub mesh: Mesh,
    pub areas: Vec<LosArea>,
    pub graphs: Vec<LosGraph>,
    pub covers: Vec<CliqueCover>,
    pub hidden: HiddenSet,
    pub deployment: Deployment,
}

/// Hyper-triangulation bound actually used: `ht_R` when given, otherwise
/// the range.
pub fn effective_ht_bound(config: &PlanConfig) -> Range {
    match (config.ht_r, config.range_r) {
        (Range::Unbounded, Range::Finite(r)) => Range::Finite(r),
        (h, _) => h,
    }
}

pub fn plan(layout: &Layout, config: &PlanConfig) -> Result<Deployment, PlanError> {
    Ok(plan_detailed(layout, config)?.deployment)
}

struct Placer<'a> {
    vis: &'a Visibility<'a>,
    tris: &'a [Triangle],
    r: Range,
}

impl Placer<'_> {
    fn sees_members(&self, p: Point, members: &[usize]) -> bool {
        members
            .iter()
            .all(|&q| self.vis.sees_all(p, &self.tris[q].vertices, self.r))
    }
}

/// Places secondary PRNs, moving primaries when that is the only way to
/// keep the spacing.
struct SecondaryPlacer<'a> {
    placer: &'a Placer<'a>,
    s1: &'a CliqueCover,
    ds: f64,
    eps: f64,
    primary: &'a mut Vec<Point>,
    /// Primaries a secondary relies on beyond its own mapping.
    pinned: Vec<bool>,
    secondary: Vec<Point>,
    mapped: Vec<Vec<usize>>,
}

impl SecondaryPlacer<'_> {
    /// Tries, in order: spacing from the mapped primaries as placed, spacing
    /// from any placed PRN that sees each member, and moving mapped primaries.
    fn place(&mut self, clique: &[usize], area: &Region, mapped: Vec<usize>) -> bool {
        let (ds, eps) = (self.ds, self.eps);
        let related: Vec<Point> = mapped.iter().map(|&u| self.primary[u]).collect();
        let strict = place_in_area(area, &related, eps, |p| {
            related.iter().all(|q| p.dist(*q) + eps >= ds) && self.placer.sees_members(p, clique)
        });
        let found = strict.map(|p| (p, Vec::new(), Vec::new())).or_else(|| {
            self.served(clique, area, &related)
                .map(|(p, used)| (p, used, Vec::new()))
        });
        let found = found.or_else(|| {
            let mut moves = Vec::new();
            let p = place_in_area(area, &related, eps, |p| {
                if !self.placer.sees_members(p, clique) {
                    return false;
                }
                match self.relocate(p, &mapped) {
                    Some(m) => {
                        moves = m;
                        true
                    }
                    None => false,
                }
            })?;
            Some((p, Vec::new(), moves))
        });
        let Some((p, used, moves)) = found else {
            return false;
        };
        for u in used {
            self.pinned[u] = true;
        }
        for (u, c) in moves {
            self.primary[u] = c;
        }
        self.secondary.push(p);
        self.mapped.push(mapped);
        true
    }

    /// A position where every member pairs with some placed PRN that sees it.
    fn served(
        &self,
        clique: &[usize],
        area: &Region,
        related: &[Point],
    ) -> Option<(Point, Vec<usize>)> {
        let placer = self.placer;
        let supporters: Vec<Vec<(Option<usize>, Point)>> = clique
            .iter()
            .map(|&t| {
                let sec = self.secondary.iter().map(|q| (None, *q));
                let pri = self.primary.iter().enumerate().map(|(i, q)| (Some(i), *q));
                sec.chain(pri)
                    .filter(|s| placer.sees_members(s.1, &[t]))
                    .collect()
            })
            .collect();
        let mut used = Vec::new();
        let p = place_in_area(area, related, self.eps, |p| {
            if !placer.sees_members(p, clique) {
                return false;
            }
            used.clear();
            supporters.iter().all(|sup| {
                match sup.iter().find(|s| s.1.dist(p) + self.eps >= self.ds) {
                    Some(&(u, _)) => {
                        used.extend(u);
                        true
                    }
                    None => false,
                }
            })
        })?;
        Some((p, used))
    }

    /// New positions for the mapped primaries too close to `p`.
    fn relocate(&self, p: Point, mapped: &[usize]) -> Option<Vec<(usize, Point)>> {
        let (ds, eps) = (self.ds, self.eps);
        let mut moves = Vec::new();
        for &u in mapped {
            if self.primary[u].dist(p) + eps >= ds {
                continue;
            }
            if self.pinned[u] {
                return None;
            }
            let others: Vec<Point> = self
                .secondary
                .iter()
                .zip(&self.mapped)
                .filter(|(_, m)| m.contains(&u))
                .map(|(q, _)| *q)
                .chain(std::iter::once(p))
                .collect();
            let c = place_in_area(&self.s1.areas[u], &others, eps, |c| {
                others.iter().all(|q| c.dist(*q) + eps >= ds)
                    && self.placer.sees_members(c, &self.s1.cliques[u])
            })?;
            moves.push((u, c));
        }
        Some(moves)
    }
}

pub fn plan_detailed(layout: &Layout, config: &PlanConfig) -> Result<PlanDetail, PlanError> {
    config.validate()?;
    let layout = layout.clone().with_eps_len(config.eps_len);
    let r = config.range_r;
    let (ds, thetas) = (config.msd_ds, config.msa_thetas);
    let (eps, eps_area, arc) = (config.eps_len, config.eps_area, config.arc_segments);

    let mesh = hyper_triangulate_mesh(&layout, effective_ht_bound(config))?;
    let tris = mesh.triangles();
    let vis = Visibility::new(&layout, arc);
    let areas = triangle_areas(&vis, &mesh, r)?;
    if let Some(t) = areas.iter().position(|a| a.is_empty(eps_area)) {
        return Err(PlanError::EmptyLosArea(t));
    }
    let placer = Placer {
        vis: &vis,
        tris: &tris,
        r,
    };

    let g1 = build_primary_lg(&tris, &areas, eps_area)?;
    let s1 = primary_mcc(&g1, &areas, eps_area)?;
    let mut primary: Vec<Point> = Vec::with_capacity(s1.len());
    for (k, (clique, area)) in s1.cliques.iter().zip(&s1.areas).enumerate() {
        let p = place_in_area(area, &[], eps, |p| placer.sees_members(p, clique));
        let p = p.ok_or(PlanError::Placement {
            tier: Tier::Primary,
            area: k,
        })?;
        primary.push(p);
    }
    let hidden = hidden_set_lower_bound(&vis, &tris, r, eps_area)?;
    let mut graphs = vec![g1];
    let mut covers = vec![s1];
    let mut secondary: Vec<Point> = Vec::new();
    let mut trinary: Vec<Point> = Vec::new();

    if config.coverage_n >= 2 {
        let s1 = &covers[0];
        let g2 = edge_elimination(&graphs[0], s1, &areas, ds, arc, eps_area)?;
        let forbidden: Vec<Region> = s1
            .areas
            .iter()
            .map(|a| forbidden_region(a, ds, arc))
            .collect();
        let s2 = secondary_mcc(&g2, s1, &areas, &forbidden, eps_area)?;
        let mut sp = SecondaryPlacer {
            placer: &placer,
            s1,
            ds,
            eps,
            primary: &mut primary,
            pinned: vec![false; s1.len()],
            secondary: Vec::new(),
            mapped: Vec::new(),
        };
        let mut placed_cover = CliqueCover {
            tier: Tier::Secondary,
            cliques: Vec::new(),
            areas: Vec::new(),
            pairs: Vec::new(),
        };
        let mut queue: VecDeque<(Vec<usize>, Region)> =
            s2.cliques.into_iter().zip(s2.areas).collect();
        while let Some((clique, area)) = queue.pop_front() {
            let mapped = clique_mapping(s1, &clique)?;
            if sp.place(&clique, &area, mapped) {
                placed_cover.cliques.push(clique);
                placed_cover.areas.push(area);
                placed_cover.pairs.push(Vec::new());
                continue;
            }
            if clique.len() == 1 {
                return Err(PlanError::Placement {
                    tier: Tier::Secondary,
                    area: placed_cover.len(),
                });
            }
            // Split a clique no single PRN can serve; halves keep non-empty
            // areas since their constraints are weaker.
            let (left, right) = clique.split_at(clique.len() / 2);
            for half in [right, left] {
                let los = half[1..]
                    .iter()
                    .fold(areas[half[0]].region.clone(), |acc, &t| {
                        acc.intersect(&areas[t].region)
                    });
                let spaced = well_spaced_area(&los, &clique_mapping(s1, half)?, &forbidden);
                queue.push_front((half.to_vec(), spaced));
            }
        }
        secondary = sp.secondary;
        for (k, a) in placed_cover.areas.iter_mut().enumerate() {
            *a = std::mem::take(a).with_provenance(Provenance::LosClique(k));
        }
        graphs.push(g2);
        covers.push(placed_cover);
    }

    if config.coverage_n >= 3 {
        // Rounds of trinary covers: each round serves every node some placed
        // pair can serve; a node no pair can serve gets a helper PRN first.
        let mut placed: Vec<Point> = primary.iter().chain(&secondary).copied().collect();
        let bounds = layout.bbox().expanded(1.0);
        let mut pending = graphs[1].clone();
        let mut merged = CliqueCover {
            tier: Tier::Trinary,
            cliques: Vec::new(),
            areas: Vec::new(),
            pairs: Vec::new(),
        };
        let mut first_graph: Option<LosGraph> = None;
        for round in 0.. {
            let g3 = build_trinary_lg(&pending, &tris, &vis, &placed, r, ds, thetas)?;
            if first_graph.is_none() {
                first_graph = Some(g3.clone());
            }
            if g3.is_empty() {
                break;
            }
            if round > tris.len() {
                return Err(PlanError::Uncoverable {
                    tier: Tier::Trinary,
                    triangle: g3.nodes()[0],
                });
            }
            let input = TrinaryInput {
                triangles: &tris,
                areas: &areas,
                vis: &vis,
                placed: &placed,
                range: r,
                ds,
                thetas_deg: thetas,
                arc_segments: arc,
                eps_area,
                bounds,
            };
            let pass = trinary_mcc(&g3, &input)?;
            let mut new_points = Vec::new();
            if pass.cover.is_empty() {
                let mut stuck = pass.stuck.clone();
                stuck.sort_by_key(|&v| (g3.degree(v), v));
                let q = stuck[0];
                let h = helper_position(q, &input).ok_or(PlanError::Uncoverable {
                    tier: Tier::Trinary,
                    triangle: q,
                })?;
                merged.cliques.push(Vec::new());
                merged.areas.push(areas[q].region.clone());
                merged.pairs.push(Vec::new());
                new_points.push(h);
            }
            for (k, clique) in pass.cover.cliques.iter().enumerate() {
                let pairs = &pass.cover.pairs[k];
                let mut related: Vec<Point> = pairs
                    .iter()
                    .flat_map(|&(i, j)| [placed[i], placed[j]])
                    .collect();
                related.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
                related.dedup();
                let p = place_in_area(&pass.cover.areas[k], &related, eps, |p| {
                    placer.sees_members(p, clique)
                        && pairs
                            .iter()
                            .all(|&(i, j)| is_triplet(placed[i], placed[j], p, ds, thetas))
                })
                .ok_or(PlanError::Placement {
                    tier: Tier::Trinary,
                    area: merged.len(),
                })?;
                merged.cliques.push(clique.clone());
                merged.areas.push(pass.cover.areas[k].clone());
                merged.pairs.push(pairs.clone());
                new_points.push(p);
            }
            trinary.extend_from_slice(&new_points);
            placed.extend(new_points);
            pending = g3;
        }
        let keep = redundant_trinary(&vis, &tris, placed.len() - trinary.len(), &placed, config);
        retain_flagged(&mut trinary, &keep);
        retain_flagged(&mut merged.cliques, &keep);
        retain_flagged(&mut merged.areas, &keep);
        retain_flagged(&mut merged.pairs, &keep);
        graphs.push(first_graph.expect("at least one round"));
        covers.push(merged);
    }

    let mut prns: Vec<Prn> = Vec::new();
    for (tier, pts) in [
        (Tier::Primary, &primary),
        (Tier::Secondary, &secondary),
        (Tier::Trinary, &trinary),
    ] {
        prns.extend(pts.iter().enumerate().map(|(k, p)| Prn {
            x: p.x,
            y: p.y,
            tier,
            area: k,
        }));
    }
    let points: Vec<Point> = prns.iter().map(Prn::point).collect();
    check_coverage(&vis, &tris, &points, config)?;

    let counts = Counts {
        g: primary.len(),
        g2: secondary.len(),
        g3: trinary.len(),
        hidden_t: hidden.len(),
    };
    let bound = config.coverage_n as usize * hidden.len();
    let total = prns.len();
    let deployment = Deployment {
        config: PlanConfig {
            ht_r: effective_ht_bound(config),
            ..config.clone()
        },
        prns,
        counts,
        lower_bound: LowerBound {
            satisfied: bound <= total,
            provably_optimal: bound == total,
        },
    };
    Ok(PlanDetail {
        mesh,
        areas,
        graphs,
        covers,
        hidden,
        deployment,
    })
}

/// Which trinary PRNs to keep: the newest are dropped first whenever every
/// triangle they see still has a well-spaced triplet without them. The
/// first `fixed` points are never dropped.
fn redundant_trinary(
    vis: &Visibility<'_>,
    tris: &[Triangle],
    fixed: usize,
    points: &[Point],
    config: &PlanConfig,
) -> Vec<bool> {
    let seen: Vec<Vec<usize>> = par::map(tris, |t| visible_prns(vis, t, points, config.range_r));
    let mut keep = vec![true; points.len()];
    for k in (fixed..points.len()).rev() {
        keep[k] = false;
        let still_served = seen.iter().filter(|l| l.contains(&k)).all(|l| {
            let pts: Vec<Point> = l.iter().filter(|&&i| keep[i]).map(|&i| points[i]).collect();
            has_triplet(&pts, config.msd_ds, config.msa_thetas)
        });
        keep[k] = !still_served;
    }
    keep.split_off(fixed)
}

fn retain_flagged<T>(items: &mut Vec<T>, keep: &[bool]) {
    let mut flags = keep.iter();
    items.retain(|_| *flags.next().expect("one flag per item"));
}

/// Confirms with exact predicates that every triangle is fully served.
fn check_coverage(
    vis: &Visibility<'_>,
    tris: &[Triangle],
    points: &[Point],
    config: &PlanConfig,
) -> Result<(), PlanError> {
    let n = config.coverage_n;
    let eps = config.eps_len;
    let ok: Vec<bool> = par::map(tris, |t| {
        let seen: Vec<Point> = visible_prns(vis, t, points, config.range_r)
            .into_iter()
            .map(|i| points[i])
            .collect();
        match n {
            1 => !seen.is_empty(),
            2 => seen.iter().enumerate().any(|(a, p)| {
                seen[a + 1..]
                    .iter()
                    .any(|q| p.dist(*q) + eps >= config.msd_ds)
            }),
            _ => has_triplet(&seen, config.msd_ds, config.msa_thetas),
        }
    });
    match ok.iter().position(|&b| !b) {
        Some(t) => Err(PlanError::GuaranteeUnmet { triangle: t, n }),
        None => Ok(()),
    }
}
