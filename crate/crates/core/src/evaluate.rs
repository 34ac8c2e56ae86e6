//! Triplet geometry, EVA bounds and Monte Carlo coverage verification.

use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::floorplan::{Layout, Range};
use crate::geometry::{orient, Point};
use crate::par;
use crate::visibility::Visibility;

/// Tolerance on angles, in degrees.
pub const EPS_ANGLE: f64 = 1e-9;

/// Inner angle at `b` of the path `a b c`, in degrees.
pub fn angle_at(a: Point, b: Point, c: Point) -> f64 {
    let (u, v) = (a - b, c - b);
    u.cross(v).abs().atan2(u.dot(v)).to_degrees()
}

/// Whether three points satisfy the separation and angle constraints.
pub fn is_triplet(qi: Point, qj: Point, qk: Point, ds: f64, thetas_deg: f64) -> bool {
    let eps = crate::geometry::DEFAULT_EPS_LEN;
    if qi.dist(qj) + eps < ds || qj.dist(qk) + eps < ds || qk.dist(qi) + eps < ds {
        return false;
    }
    if qi.dist(qj) <= eps || qj.dist(qk) <= eps || qk.dist(qi) <= eps {
        return thetas_deg <= EPS_ANGLE;
    }
    [
        angle_at(qk, qi, qj),
        angle_at(qi, qj, qk),
        angle_at(qj, qk, qi),
    ]
    .iter()
    .all(|&a| a + EPS_ANGLE >= thetas_deg)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("UE at {0} coincides with a PRN")]
    Coincident(Point),
    #[error("degenerate triplet")]
    Degenerate,
    #[error("UE at {0} is inside all three sidelong circles but outside the triangle")]
    Inconsistent(Point),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("layout has zero area")]
    EmptyLayout,
}

/// The three visibility angles `(ij, ik, jk)` at `ue`, in degrees.
pub fn visibility_angles(ue: Point, q: [Point; 3]) -> Result<[f64; 3], EvalError> {
    let eps = crate::geometry::DEFAULT_EPS_LEN;
    if q.iter().any(|p| p.dist(ue) <= eps) {
        return Err(EvalError::Coincident(ue));
    }
    Ok([
        angle_at(q[0], ue, q[1]),
        angle_at(q[0], ue, q[2]),
        angle_at(q[1], ue, q[2]),
    ])
}

/// The visibility angle closest to 90 degrees; ties go to the earlier of
/// `ij, ik, jk`.
pub fn eva(ue: Point, qi: Point, qj: Point, qk: Point) -> Result<f64, EvalError> {
    let angles = visibility_angles(ue, [qi, qj, qk])?;
    let mut best = angles[0];
    for &a in &angles[1..] {
        if (90.0 - a).abs() < (90.0 - best).abs() {
            best = a;
        }
    }
    Ok(best)
}

/// Bound on `|90 - EVA|` from the triplet constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaBound {
    pub degrees: f64,
    /// Set when the outside bound was requested with an unbounded range and
    /// only the trivial 90 degree limit applies.
    pub degenerate: bool,
}

pub fn theorem1_bound(ds: f64, thetas_deg: f64, r: Range, inside: bool) -> EvaBound {
    if inside {
        return EvaBound {
            degrees: 90.0 - thetas_deg,
            degenerate: false,
        };
    }
    match r {
        Range::Finite(r) => {
            let half = (thetas_deg / 2.0).to_radians().tan();
            EvaBound {
                degrees: 90.0 - 2.0 * (ds / (2.0 * r) * half).atan().to_degrees(),
                degenerate: false,
            }
        }
        Range::Unbounded => EvaBound {
            degrees: 90.0,
            degenerate: ds > 0.0,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionClass {
    #[serde(rename = "INSIDE")]
    Inside,
    I,
    II,
    III,
    IV,
    #[serde(rename = "NONE")]
    None,
}

impl fmt::Display for RegionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionClass::Inside => "INSIDE",
            RegionClass::I => "I",
            RegionClass::II => "II",
            RegionClass::III => "III",
            RegionClass::IV => "IV",
            RegionClass::None => "NONE",
        })
    }
}

fn in_closed_triangle(p: Point, q: [Point; 3], eps: f64) -> bool {
    let o = orient(q[0], q[1], q[2]).signum();
    (0..3).all(|k| {
        let (a, b) = (q[k], q[(k + 1) % 3]);
        o * orient(a, b, p) >= -eps * a.dist(b)
    })
}

fn circumcircle(q: [Point; 3]) -> Option<(Point, f64)> {
    let [a, b, c] = q;
    let d = 2.0 * orient(a, b, c);
    if d.abs() < 1e-15 {
        return None;
    }
    let (a2, b2, c2) = (a.dot(a), b.dot(b), c.dot(c));
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    let center = Point::new(ux, uy);
    Some((center, center.dist(a)))
}

/// Classifies `ue` against the triangle, its sidelong circles (sides as
/// diameters) and its circumscribed circle.
pub fn classify_exterior_region(ue: Point, q: [Point; 3]) -> Result<RegionClass, EvalError> {
    let eps = crate::geometry::DEFAULT_EPS_LEN;
    let (center, radius) = circumcircle(q).ok_or(EvalError::Degenerate)?;
    if in_closed_triangle(ue, q, eps) {
        return Ok(RegionClass::Inside);
    }
    // inside the circle on side ab iff the side subtends at least 90 degrees
    let sidelong = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .filter(|&&(a, b)| {
            let (m, h) = (q[a].midpoint(q[b]), 0.5 * q[a].dist(q[b]));
            ue.dist(m) <= h + eps
        })
        .count();
    match sidelong {
        0 => Ok(RegionClass::I),
        1 => Ok(RegionClass::II),
        2 if ue.dist(center) > radius + eps => Ok(RegionClass::III),
        2 => Ok(RegionClass::IV),
        _ => Err(EvalError::Inconsistent(ue)),
    }
}

/// Closed interval of EVA values possible in a region, in degrees.
pub fn region_eva_interval(region: RegionClass, ds: f64, thetas_deg: f64, r: Range) -> (f64, f64) {
    match region {
        RegionClass::Inside => (thetas_deg, 120.0),
        RegionClass::I => {
            let low = match r {
                Range::Finite(r) => {
                    2.0 * (ds / (2.0 * r) * (thetas_deg / 2.0).to_radians().tan())
                        .atan()
                        .to_degrees()
                }
                Range::Unbounded => 0.0,
            };
            (low, 90.0)
        }
        RegionClass::II => (60.0, 120.0),
        RegionClass::III => (90.0, 180.0 - 2.0 * thetas_deg),
        RegionClass::IV => (thetas_deg, 180.0 - thetas_deg),
        RegionClass::None => (0.0, 180.0),
    }
}

/// Which visible triplet defines a sample's EVA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvaPolicy {
    /// The triplet whose EVA is closest to 90 degrees.
    #[default]
    Best,
    /// The first triplet in PRN index order.
    First,
}

impl std::str::FromStr for EvaPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "best" => Ok(EvaPolicy::Best),
            "first" => Ok(EvaPolicy::First),
            _ => Err(format!("unknown EVA policy {s:?}; expected best or first")),
        }
    }
}

/// What a sampled UE needs from the deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Requirement {
    pub coverage_n: u8,
    pub range_r: Range,
    pub msd_ds: f64,
    pub msa_thetas: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaSample {
    pub ue: Point,
    pub covered: bool,
    pub served_triplet: Option<[usize; 3]>,
    pub theta_e: Option<f64>,
    pub inside_triangle: bool,
    pub region_class: RegionClass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaReport {
    pub samples: Vec<EvaSample>,
    pub coverage_fraction: f64,
    pub cdf: Vec<(f64, f64)>,
}

impl EvaReport {
    /// Fraction of all samples whose EVA is within `deg` of 90 degrees.
    pub fn fraction_within(&self, deg: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let hits = self
            .samples
            .iter()
            .filter(|s| s.theta_e.is_some_and(|t| (90.0 - t).abs() < deg))
            .count();
        hits as f64 / self.samples.len() as f64
    }

    pub fn write_samples_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "ue_x,ue_y,covered,theta_e_deg,region_class")?;
        for s in &self.samples {
            let theta = s.theta_e.map(|t| t.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{}",
                s.ue.x, s.ue.y, s.covered, theta, s.region_class
            )?;
        }
        Ok(())
    }

    pub fn write_cdf_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "deviation_deg,fraction")?;
        for (d, f) in &self.cdf {
            writeln!(w, "{d},{f}")?;
        }
        Ok(())
    }
}

/// Per-sample generator keyed on the seed and the sample index.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform point in the layout by rejection from its bounding box.
pub fn sample_point(layout: &Layout, seed: u64, index: u64) -> Point {
    let bb = layout.bbox();
    let mut rng = sample_rng(seed, index);
    loop {
        let p = Point::new(
            rng.gen_range(bb.min.x..=bb.max.x),
            rng.gen_range(bb.min.y..=bb.max.y),
        );
        if layout.contains(p, 0.0) {
            return p;
        }
    }
}

fn evaluate_sample(
    ue: Point,
    prns: &[Point],
    visible: &[usize],
    req: &Requirement,
    policy: EvaPolicy,
    eps: f64,
) -> EvaSample {
    let mut out = EvaSample {
        ue,
        covered: false,
        served_triplet: None,
        theta_e: None,
        inside_triangle: false,
        region_class: RegionClass::None,
    };
    match req.coverage_n {
        0 | 1 => out.covered = !visible.is_empty(),
        2 => {
            out.covered = visible.iter().enumerate().any(|(a, &i)| {
                visible[a + 1..]
                    .iter()
                    .any(|&j| prns[i].dist(prns[j]) + eps >= req.msd_ds)
            })
        }
        _ => {
            let mut best: Option<([usize; 3], f64)> = None;
            'search: for (a, &i) in visible.iter().enumerate() {
                for (b, &j) in visible.iter().enumerate().skip(a + 1) {
                    if prns[i].dist(prns[j]) + eps < req.msd_ds {
                        continue;
                    }
                    for &k in &visible[b + 1..] {
                        if !is_triplet(prns[i], prns[j], prns[k], req.msd_ds, req.msa_thetas) {
                            continue;
                        }
                        let Ok(theta) = eva(ue, prns[i], prns[j], prns[k]) else {
                            continue;
                        };
                        let better =
                            best.is_none_or(|(_, t)| (90.0 - theta).abs() < (90.0 - t).abs());
                        if better {
                            best = Some(([i, j, k], theta));
                        }
                        if policy == EvaPolicy::First {
                            break 'search;
                        }
                    }
                }
            }
            if let Some((t, theta)) = best {
                let q = [prns[t[0]], prns[t[1]], prns[t[2]]];
                out.covered = true;
                out.served_triplet = Some(t);
                out.theta_e = Some(theta);
                out.inside_triangle = in_closed_triangle(ue, q, eps);
                out.region_class = classify_exterior_region(ue, q).unwrap_or(RegionClass::None);
            } else {
                // covered by a triplet the UE coincides with is still covered
                out.covered = has_coincident_triplet(ue, prns, visible, req, eps);
            }
        }
    }
    out
}

fn has_coincident_triplet(
    ue: Point,
    prns: &[Point],
    visible: &[usize],
    req: &Requirement,
    eps: f64,
) -> bool {
    visible.iter().any(|&i| prns[i].dist(ue) <= eps)
        && crate::losgraph::has_triplet(
            &visible.iter().map(|&i| prns[i]).collect::<Vec<_>>(),
            req.msd_ds,
            req.msa_thetas,
        )
}

/// CDF of `|90 - EVA|` over samples that have an EVA, at whole degrees 0..=90.
pub fn eva_cdf(samples: &[EvaSample]) -> Vec<(f64, f64)> {
    let devs: Vec<f64> = samples
        .iter()
        .filter_map(|s| s.theta_e)
        .map(|t| (90.0 - t).abs())
        .collect();
    (0..=90)
        .map(|d| {
            let d = d as f64;
            let frac = if devs.is_empty() {
                0.0
            } else {
                devs.iter().filter(|&&v| v <= d).count() as f64 / devs.len() as f64
            };
            (d, frac)
        })
        .collect()
}

/// Samples the layout uniformly and checks each UE's coverage and EVA.
pub fn verify_coverage(
    layout: &Layout,
    prns: &[Point],
    req: &Requirement,
    n_samples: usize,
    seed: u64,
    policy: EvaPolicy,
    arc_segments: usize,
) -> Result<EvaReport, EvalError> {
    if n_samples < 1 {
        return Err(EvalError::NoSamples);
    }
    if layout.area() <= 0.0 {
        return Err(EvalError::EmptyLayout);
    }
    let vis = Visibility::new(layout, arc_segments);
    let eps = layout.eps_len();
    let idx: Vec<u64> = (0..n_samples as u64).collect();
    let samples: Vec<EvaSample> = par::map(&idx, |&i| {
        let ue = sample_point(layout, seed, i);
        let visible: Vec<usize> = (0..prns.len())
            .filter(|&k| vis.sees(ue, prns[k], req.range_r))
            .collect();
        evaluate_sample(ue, prns, &visible, req, policy, eps)
    });
    let covered = samples.iter().filter(|s| s.covered).count();
    let cdf = eva_cdf(&samples);
    Ok(EvaReport {
        coverage_fraction: covered as f64 / samples.len() as f64,
        samples,
        cdf,
    })
}
