//! Floor-plan model: an outer boundary with obstacle holes, in meters.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{
    distance_to_ring, orient, point_in_ring, segments_intersect, signed_area, BBox, Point,
    DEFAULT_EPS_LEN,
};

/// Sentinel-aware length: a finite distance in meters, or unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Range {
    Finite(f64),
    #[default]
    Unbounded,
}

impl Range {
    pub fn finite(self) -> Option<f64> {
        match self {
            Range::Finite(v) => Some(v),
            Range::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Range::Unbounded)
    }

    /// `d <= self` with unbounded meaning always.
    pub fn admits(self, d: f64) -> bool {
        match self {
            Range::Finite(r) => d <= r,
            Range::Unbounded => true,
        }
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Range::Finite(v) => write!(f, "{v}"),
            Range::Unbounded => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "unbounded" | "none" => Ok(Range::Unbounded),
            other => {
                let v: f64 = other.parse().map_err(|_| format!("invalid length `{s}`"))?;
                if v.is_finite() && v > 0.0 {
                    Ok(Range::Finite(v))
                } else {
                    Err(format!("length must be positive, got `{s}`"))
                }
            }
        }
    }
}

// `null` (or a missing field) is the unbounded sentinel in JSON.
impl Serialize for Range {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.finite().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Range {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match Option::<f64>::deserialize(d)? {
            Some(v) => Range::Finite(v),
            None => Range::Unbounded,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub name: String,
    /// Counter-clockwise outer boundary.
    pub outer: Vec<Point>,
    /// Clockwise obstacle rings.
    pub holes: Vec<Vec<Point>>,
    eps_len: f64,
}

impl Layout {
    /// Builds a layout as given, without normalization or validation.
    pub fn new(name: impl Into<String>, outer: Vec<Point>, holes: Vec<Vec<Point>>) -> Self {
        Self {
            name: name.into(),
            outer,
            holes,
            eps_len: DEFAULT_EPS_LEN,
        }
    }

    pub fn eps_len(&self) -> f64 {
        self.eps_len
    }

    pub fn with_eps_len(mut self, eps: f64) -> Self {
        self.eps_len = eps;
        self
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Point]> {
        std::iter::once(self.outer.as_slice()).chain(self.holes.iter().map(Vec::as_slice))
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.rings().flat_map(|r| {
            let n = r.len();
            (0..n).map(move |i| (r[i], r[(i + 1) % n]))
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.rings().map(<[Point]>::len).sum()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.outer).abs()
            - self.holes.iter().map(|h| signed_area(h).abs()).sum::<f64>()
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(self.outer.iter()).unwrap_or(BBox {
            min: Point::default(),
            max: Point::default(),
        })
    }

    /// Closed membership (boundary within `eps` counts as inside).
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        let on_outer = distance_to_ring(p, &self.outer) <= eps;
        if !on_outer && !point_in_ring(p, &self.outer) {
            return false;
        }
        for h in &self.holes {
            if point_in_ring(p, h) && distance_to_ring(p, h) > eps {
                return false;
            }
        }
        true
    }

    /// Indices of reflex vertices of the outer ring.
    pub fn reflex_vertices(&self) -> Vec<usize> {
        let n = self.outer.len();
        (0..n)
            .filter(|&i| {
                let a = self.outer[(i + n - 1) % n];
                let b = self.outer[i];
                let c = self.outer[(i + 1) % n];
                orient(a, b, c) < 0.0
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&LayoutFile::from(self)).expect("layout serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct LayoutFile {
    #[serde(default)]
    name: String,
    outer: Vec<Point>,
    #[serde(default)]
    holes: Vec<Vec<Point>>,
}

impl From<&Layout> for LayoutFile {
    fn from(l: &Layout) -> Self {
        Self {
            name: l.name.clone(),
            outer: l.outer.clone(),
            holes: l.holes.clone(),
        }
    }
}

impl Serialize for Layout {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LayoutFile::from(self).serialize(s)
    }
}

/// Identifies a ring: the outer boundary or a hole by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingId {
    Outer,
    Hole(usize),
}

impl fmt::Display for RingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingId::Outer => f.write_str("outer"),
            RingId::Hole(i) => write!(f, "hole {i}"),
        }
    }
}

/// A violated layout invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    TooFewVertices {
        ring: RingId,
        count: usize,
    },
    NonFinite {
        ring: RingId,
        vertex: usize,
    },
    SelfIntersection {
        ring: RingId,
        first: (usize, usize),
        second: (usize, usize),
    },
    ZeroArea {
        ring: RingId,
    },
    WrongOrientation {
        ring: RingId,
    },
    HoleNotStrictlyInside {
        hole: usize,
        vertices: Vec<usize>,
    },
    HoleCrossesOuter {
        hole: usize,
        hole_edge: (usize, usize),
        outer_edge: (usize, usize),
    },
    HolesOverlap {
        first: usize,
        second: usize,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::TooFewVertices { ring, count } => {
                write!(f, "{ring}: ring has {count} vertices, need at least 3")
            }
            Diagnostic::NonFinite { ring, vertex } => {
                write!(f, "{ring}: vertex {vertex} is not finite")
            }
            Diagnostic::SelfIntersection {
                ring,
                first,
                second,
            } => write!(
                f,
                "{ring}: self-intersection at edge pair ({},{})x({},{})",
                first.0, first.1, second.0, second.1
            ),
            Diagnostic::ZeroArea { ring } => write!(f, "{ring}: ring encloses zero area"),
            Diagnostic::WrongOrientation { ring } => {
                write!(f, "{ring}: wrong orientation (outer must be CCW, holes CW)")
            }
            Diagnostic::HoleNotStrictlyInside { hole, vertices } => {
                write!(
                    f,
                    "hole {hole}: hole-not-strictly-inside at vertices {vertices:?}"
                )
            }
            Diagnostic::HoleCrossesOuter {
                hole,
                hole_edge,
                outer_edge,
            } => write!(
                f,
                "hole {hole}: hole-not-strictly-inside, edge ({},{}) meets outer edge ({},{})",
                hole_edge.0, hole_edge.1, outer_edge.0, outer_edge.1
            ),
            Diagnostic::HolesOverlap { first, second } => {
                write!(f, "holes {first} and {second} overlap or touch")
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LayoutError {
    #[error("malformed floor-plan JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{ring}: ring degenerates to {count} vertices after removing duplicates")]
    Degenerate { ring: RingId, count: usize },
    #[error("invalid layout: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

fn ring_edges(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).map(move |i| (i, (i + 1) % n))
}

fn self_intersections(ring: &[Point], id: RingId, eps: f64) -> Vec<Diagnostic> {
    let n = ring.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            let (c, d) = (ring[j], ring[(j + 1) % n]);
            let hit = if adjacent {
                // adjacent edges share one vertex; they intersect elsewhere
                // only when they fold back over each other
                let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                orient(shared, p, q).abs() <= eps * (p - shared).norm().max(1.0)
                    && (p - shared).dot(q - shared) > 0.0
            } else {
                segments_intersect(a, b, c, d, eps)
            };
            if hit {
                out.push(Diagnostic::SelfIntersection {
                    ring: id,
                    first: (i, (i + 1) % n),
                    second: (j, (j + 1) % n),
                });
            }
        }
    }
    out
}

/// Lists every violated invariant; empty iff the layout is valid.
pub fn validate_layout(layout: &Layout) -> Vec<Diagnostic> {
    let eps = layout.eps_len;
    let mut diags = Vec::new();
    let mut simple = vec![false; layout.holes.len() + 1];

    for (k, ring) in layout.rings().enumerate() {
        let id = if k == 0 {
            RingId::Outer
        } else {
            RingId::Hole(k - 1)
        };
        if ring.len() < 3 {
            diags.push(Diagnostic::TooFewVertices {
                ring: id,
                count: ring.len(),
            });
            continue;
        }
        if let Some(v) = ring.iter().position(|p| !p.is_finite()) {
            diags.push(Diagnostic::NonFinite {
                ring: id,
                vertex: v,
            });
            continue;
        }
        let crossings = self_intersections(ring, id, eps);
        if !crossings.is_empty() {
            diags.extend(crossings);
            continue;
        }
        let a = signed_area(ring);
        if a.abs() < eps {
            diags.push(Diagnostic::ZeroArea { ring: id });
            continue;
        }
        if (k == 0 && a < 0.0) || (k > 0 && a > 0.0) {
            diags.push(Diagnostic::WrongOrientation { ring: id });
        }
        simple[k] = true;
    }

    if !simple[0] {
        return diags;
    }
    let outer = &layout.outer;
    for (h, hole) in layout.holes.iter().enumerate() {
        if !simple[h + 1] {
            continue;
        }
        let outside: Vec<usize> = hole
            .iter()
            .enumerate()
            .filter(|(_, &p)| !point_in_ring(p, outer) || distance_to_ring(p, outer) <= eps)
            .map(|(i, _)| i)
            .collect();
        if !outside.is_empty() {
            diags.push(Diagnostic::HoleNotStrictlyInside {
                hole: h,
                vertices: outside,
            });
            continue;
        }
        'edges: for (hi, hj) in ring_edges(hole.len()) {
            for (oi, oj) in ring_edges(outer.len()) {
                if segments_intersect(hole[hi], hole[hj], outer[oi], outer[oj], eps) {
                    diags.push(Diagnostic::HoleCrossesOuter {
                        hole: h,
                        hole_edge: (hi, hj),
                        outer_edge: (oi, oj),
                    });
                    break 'edges;
                }
            }
        }
    }
    for a in 0..layout.holes.len() {
        for b in (a + 1)..layout.holes.len() {
            if !(simple[a + 1] && simple[b + 1]) {
                continue;
            }
            let (ha, hb) = (&layout.holes[a], &layout.holes[b]);
            let touching = ring_edges(ha.len()).any(|(i, j)| {
                ring_edges(hb.len())
                    .any(|(k, l)| segments_intersect(ha[i], ha[j], hb[k], hb[l], eps))
            });
            let nested = point_in_ring(ha[0], hb) || point_in_ring(hb[0], ha);
            if touching || nested {
                diags.push(Diagnostic::HolesOverlap {
                    first: a,
                    second: b,
                });
            }
        }
    }
    diags
}

fn dedup_ring(ring: Vec<Point>, id: RingId, eps: f64) -> Result<Vec<Point>, LayoutError> {
    let mut out: Vec<Point> = Vec::with_capacity(ring.len());
    for p in ring {
        if out.last().is_some_and(|q: &Point| q.dist(p) <= eps) {
            continue;
        }
        out.push(p);
    }
    while out.len() > 1 && out[0].dist(*out.last().unwrap()) <= eps {
        out.pop();
    }
    if out.len() < 3 {
        return Err(LayoutError::Degenerate {
            ring: id,
            count: out.len(),
        });
    }
    Ok(out)
}

/// Parses the floor-plan JSON, normalizes orientation and validates.
pub fn parse_layout(text: &str) -> Result<Layout, LayoutError> {
    parse_layout_with_eps(text, DEFAULT_EPS_LEN)
}

pub fn parse_layout_bytes(bytes: &[u8]) -> Result<Layout, LayoutError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        LayoutError::Json(serde::de::Error::custom(format!("input is not UTF-8: {e}")))
    })?;
    parse_layout(text)
}

pub fn parse_layout_with_eps(text: &str, eps_len: f64) -> Result<Layout, LayoutError> {
    let file: LayoutFile = serde_json::from_str(text)?;
    let mut outer = dedup_ring(file.outer, RingId::Outer, eps_len)?;
    if signed_area(&outer) < 0.0 {
        outer.reverse();
    }
    let mut holes = Vec::with_capacity(file.holes.len());
    for (i, h) in file.holes.into_iter().enumerate() {
        let mut h = dedup_ring(h, RingId::Hole(i), eps_len)?;
        if signed_area(&h) > 0.0 {
            h.reverse();
        }
        holes.push(h);
    }
    let layout = Layout::new(file.name, outer, holes).with_eps_len(eps_len);
    let diags = validate_layout(&layout);
    if diags.is_empty() {
        Ok(layout)
    } else {
        Err(LayoutError::Invalid(diags))
    }
}

/// Planner parameters. Angles are degrees at this boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanConfig {
    pub range_r: Range,
    pub msd_ds: f64,
    pub msa_thetas: f64,
    pub coverage_n: u8,
    #[serde(rename = "ht_R")]
    pub ht_r: Range,
    pub arc_segments: usize,
    pub eps_area: f64,
    pub eps_len: f64,
    pub seed: u64,
}

impl Default for PlanConfig {
    fn default() -> Self {
        Self {
            range_r: Range::Unbounded,
            msd_ds: 0.0,
            msa_thetas: 0.0,
            coverage_n: 1,
            ht_r: Range::Unbounded,
            arc_segments: crate::geometry::DEFAULT_ARC_SEGMENTS,
            eps_area: crate::geometry::DEFAULT_EPS_AREA,
            eps_len: DEFAULT_EPS_LEN,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("infeasible MSD: d_s = {ds} must lie in [0, 2r] = [0, {max}]")]
    InfeasibleMsd { ds: f64, max: f64 },
    #[error("MSA {0} deg outside [0, 60]")]
    InfeasibleMsa(f64),
    #[error("coverage n must be 1, 2 or 3, got {0}")]
    Coverage(u8),
    #[error("arc_segments must be at least 8, got {0}")]
    ArcSegments(usize),
    #[error("hyper-triangulation bound R = {0} is below eps_len")]
    HtBound(f64),
    #[error("tolerances must be positive and finite")]
    Tolerance,
}

impl PlanConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.msd_ds >= 0.0 && self.msd_ds.is_finite()) {
            return Err(ConfigError::InfeasibleMsd {
                ds: self.msd_ds,
                max: f64::INFINITY,
            });
        }
        if let Range::Finite(r) = self.range_r {
            if self.msd_ds > 2.0 * r {
                return Err(ConfigError::InfeasibleMsd {
                    ds: self.msd_ds,
                    max: 2.0 * r,
                });
            }
        }
        if !(0.0..=60.0).contains(&self.msa_thetas) {
            return Err(ConfigError::InfeasibleMsa(self.msa_thetas));
        }
        if !(1..=3).contains(&self.coverage_n) {
            return Err(ConfigError::Coverage(self.coverage_n));
        }
        if self.arc_segments < 8 {
            return Err(ConfigError::ArcSegments(self.arc_segments));
        }
        if let Range::Finite(r) = self.ht_r {
            if r <= self.eps_len {
                return Err(ConfigError::HtBound(r));
            }
        }
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.eps_area) || !ok(self.eps_len) {
            return Err(ConfigError::Tolerance);
        }
        Ok(())
    }

    /// MSA in radians.
    pub fn thetas_rad(&self) -> f64 {
        self.msa_thetas.to_radians()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    const L_JSON: &str = r#"{"name":"L","outer":[[0,0],[2,0],[2,1],[1,1],[1,2],[0,2]],"holes":[]}"#;

    #[test]
    fn parses_unit_square() {
        let l = parse_layout(r#"{"name":"sq","outer":[[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
        assert_eq!(l.outer.len(), 4);
        assert!(l.holes.is_empty());
        assert_eq!(l.outer[2], Point::new(1.0, 1.0));
    }

    #[test]
    fn l_shape_has_one_reflex_vertex() {
        let l = parse_layout(L_JSON).unwrap();
        assert_eq!(l.outer.len(), 6);
        let reflex = l.reflex_vertices();
        assert_eq!(reflex.len(), 1);
        assert_eq!(l.outer[reflex[0]], Point::new(1.0, 1.0));
        // independent check: cross product sign at each vertex
        let n = l.outer.len();
        let by_cross: Vec<usize> = (0..n)
            .filter(|&i| {
                let e1 = l.outer[i] - l.outer[(i + n - 1) % n];
                let e2 = l.outer[(i + 1) % n] - l.outer[i];
                e1.x * e2.y - e1.y * e2.x < 0.0
            })
            .collect();
        assert_eq!(by_cross, reflex);
    }

    #[test]
    fn reversed_ring_is_normalized() {
        let l = parse_layout(r#"{"name":"cw","outer":[[0,1],[1,1],[1,0],[0,0]]}"#).unwrap();
        assert!(signed_area(&l.outer) > 0.0);
        let h = parse_layout(
            r#"{"name":"h","outer":[[0,0],[4,0],[4,4],[0,4]],"holes":[[[1,1],[2,1],[2,2],[1,2]]]}"#,
        )
        .unwrap();
        assert!(signed_area(&h.holes[0]) < 0.0);
    }

    #[test]
    fn duplicate_vertices_collapse_or_reject() {
        let l = parse_layout(r#"{"outer":[[0,0],[1,0],[1,0],[1,1],[0,1],[0,0]]}"#).unwrap();
        assert_eq!(l.outer.len(), 4);
        let e = parse_layout(r#"{"outer":[[0,0],[1,0],[1,0],[0,0]]}"#).unwrap_err();
        assert!(matches!(
            e,
            LayoutError::Degenerate {
                ring: RingId::Outer,
                count: 2
            }
        ));
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(matches!(
            parse_layout("{\"outer\": [[0,0],"),
            Err(LayoutError::Json(_))
        ));
        assert!(matches!(
            parse_layout("{\"holes\": []}"),
            Err(LayoutError::Json(_))
        ));
    }

    #[test]
    fn valid_l_shape_has_no_diagnostics() {
        let l = parse_layout(L_JSON).unwrap();
        assert!(validate_layout(&l).is_empty());
    }

    #[test]
    fn bow_tie_reports_crossing_edges() {
        let l = Layout::new(
            "bow",
            pts(&[(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0)]),
            vec![],
        );
        let d = validate_layout(&l);
        assert_eq!(
            d,
            vec![Diagnostic::SelfIntersection {
                ring: RingId::Outer,
                first: (0, 1),
                second: (2, 3)
            }]
        );
        assert!(parse_layout(r#"{"outer":[[0,0],[2,2],[2,0],[0,2]]}"#).is_err());
    }

    #[test]
    fn hole_overlapping_outer_is_reported() {
        let l = Layout::new(
            "h",
            pts(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]),
            vec![pts(&[(1.5, 0.5), (1.5, 1.0), (2.5, 1.0), (2.5, 0.5)])],
        );
        let d = validate_layout(&l);
        assert!(
            matches!(&d[..], [Diagnostic::HoleNotStrictlyInside { hole: 0, vertices }] if vertices == &vec![2, 3])
        );
        assert!(d[0].to_string().contains("hole-not-strictly-inside"));
    }

    #[test]
    fn overlapping_holes_are_reported() {
        let l = Layout::new(
            "h",
            pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]),
            vec![
                pts(&[(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (2.0, 1.0)]),
                pts(&[(1.5, 1.5), (1.5, 3.0), (3.0, 3.0), (3.0, 1.5)]),
            ],
        );
        assert_eq!(
            validate_layout(&l),
            vec![Diagnostic::HolesOverlap {
                first: 0,
                second: 1
            }]
        );
    }

    #[test]
    fn wrong_orientation_is_reported_on_raw_layouts() {
        let l = Layout::new(
            "cw",
            pts(&[(0.0, 1.0), (1.0, 1.0), (1.0, 0.0), (0.0, 0.0)]),
            vec![],
        );
        assert_eq!(
            validate_layout(&l),
            vec![Diagnostic::WrongOrientation {
                ring: RingId::Outer
            }]
        );
    }

    #[test]
    fn config_feasibility() {
        let mut c = PlanConfig {
            range_r: Range::Finite(2.0),
            msd_ds: 4.0,
            ..Default::default()
        };
        assert!(c.validate().is_ok());
        c.msd_ds = 4.5;
        assert!(matches!(
            c.validate(),
            Err(ConfigError::InfeasibleMsd { .. })
        ));
        c.msd_ds = 1.0;
        c.msa_thetas = 61.0;
        assert_eq!(c.validate(), Err(ConfigError::InfeasibleMsa(61.0)));
        c.msa_thetas = 60.0;
        c.coverage_n = 4;
        assert_eq!(c.validate(), Err(ConfigError::Coverage(4)));
    }

    #[test]
    fn range_parsing() {
        assert_eq!("inf".parse::<Range>(), Ok(Range::Unbounded));
        assert_eq!("3".parse::<Range>(), Ok(Range::Finite(3.0)));
        assert!("-1".parse::<Range>().is_err());
        assert!(Range::Finite(2.0).admits(2.0));
        assert!(!Range::Finite(2.0).admits(2.1));
    }
}
