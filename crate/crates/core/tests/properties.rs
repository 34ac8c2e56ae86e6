use proptest::prelude::*;

use losplan_core::corpus;
use losplan_core::geometry::{segment_clear, BBox, Point, Region};
use losplan_core::losgraph::{LosGraph, Tier};
use losplan_core::planner::{greedy_clique_cover, plan};
use losplan_core::visibility::Visibility;
use losplan_core::{parse_layout, Layout, PlanConfig, Range};

fn rect(x: f64, y: f64, w: f64, h: f64) -> Region {
    let bb = BBox::of(&[Point::new(x, y), Point::new(x + w, y + h)]).unwrap();
    Region::from_ring(&bb.ring())
}

fn rect_strategy() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.0..10.0, 0.0..10.0, 0.1..6.0, 0.1..6.0)
}

fn layout_strategy() -> impl Strategy<Value = Layout> {
    prop::sample::select(corpus::NAMES.to_vec()).prop_map(|n| corpus::layout(n).unwrap())
}

/// A free-space point of `layout` picked by two unit coordinates.
fn point_in(layout: &Layout, u: f64, v: f64) -> Option<Point> {
    let bb = layout.bbox();
    let p = Point::new(bb.min.x + u * bb.width(), bb.min.y + v * bb.height());
    layout.contains(p, 0.0).then_some(p)
}

fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..14).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .collect();
        let len = pairs.len();
        (
            Just(n),
            prop::collection::vec(any::<bool>(), len).prop_map(move |keep| {
                pairs
                    .iter()
                    .zip(keep)
                    .filter(|(_, k)| *k)
                    .map(|(e, _)| *e)
                    .collect()
            }),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn region_inclusion_exclusion(a in rect_strategy(), b in rect_strategy()) {
        let (ra, rb) = (rect(a.0, a.1, a.2, a.3), rect(b.0, b.1, b.2, b.3));
        let union = ra.union(&rb).area();
        let inter = ra.intersect(&rb).area();
        // booleans run on a snapped integer grid, so allow a relative slack
        let tol = 1e-8 * (ra.area() + rb.area());
        prop_assert!((union + inter - ra.area() - rb.area()).abs() < tol);
        let diff = ra.subtract(&rb).area();
        prop_assert!((diff + inter - ra.area()).abs() < tol);
        prop_assert!(inter <= ra.area().min(rb.area()) + tol);
    }

    #[test]
    fn sight_lines_are_symmetric(
        layout in layout_strategy(),
        c in prop::array::uniform4(0.0..1.0f64),
    ) {
        let (Some(a), Some(b)) = (point_in(&layout, c[0], c[1]), point_in(&layout, c[2], c[3])) else {
            return Ok(());
        };
        prop_assert_eq!(segment_clear(&layout, a, b).unwrap(), segment_clear(&layout, b, a).unwrap());
        let vis = Visibility::new(&layout, 64);
        let r = Range::Finite(5.0);
        prop_assert_eq!(vis.sees(a, b, r), vis.sees(b, a, r));
    }

    #[test]
    fn point_areas_agree_with_sight_lines(
        layout in layout_strategy(),
        c in prop::array::uniform4(0.0..1.0f64),
    ) {
        let (Some(a), Some(b)) = (point_in(&layout, c[0], c[1]), point_in(&layout, c[2], c[3])) else {
            return Ok(());
        };
        let vis = Visibility::new(&layout, 64);
        let area = vis.point_region(a, Range::Unbounded).unwrap();
        let eps = layout.eps_len();
        // only points well away from the area boundary have a definite answer
        let margin = area
            .rings()
            .iter()
            .map(|ring| losplan_core::geometry::distance_to_ring(b, ring))
            .fold(f64::INFINITY, f64::min);
        prop_assume!(margin > 1e-6);
        prop_assert_eq!(area.contains(b, eps), segment_clear(&layout, a, b).unwrap());
    }

    #[test]
    fn greedy_cover_partitions_into_cliques((n, edges) in graph_strategy()) {
        let g = LosGraph::from_edges(n, Tier::Primary, &edges);
        let cover = greedy_clique_cover(&g, |_: Option<&()>, _| Some(())).unwrap();
        let mut seen = vec![false; n];
        for (members, ()) in &cover {
            prop_assert!(!members.is_empty());
            prop_assert!(g.is_clique(members));
            for &v in members {
                prop_assert!(!seen[v]);
                seen[v] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn rectangle_rooms_need_one_prn(w in 2.0..30.0f64, h in 2.0..30.0f64) {
        let room = parse_layout(&format!(r#"{{"outer":[[0,0],[{w},0],[{w},{h}],[0,{h}]]}}"#)).unwrap();
        let d = plan(&room, &PlanConfig::default()).unwrap();
        prop_assert_eq!(d.prns.len(), 1);
        prop_assert!(d.lower_bound.provably_optimal);
        prop_assert_eq!(d.to_json(), plan(&room, &PlanConfig::default()).unwrap().to_json());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Every point of a triangle's LoS area sees the whole triangle, even
    /// with a pillar between the vertex sight lines.
    #[test]
    fn triangle_areas_see_the_whole_triangle(
        px in 3.0..6.0f64,
        py in 3.0..6.0f64,
        s in prop::array::uniform2(0.0..1.0f64),
    ) {
        let room = parse_layout(&format!(
            r#"{{"outer":[[0,0],[10,0],[10,10],[0,10]],
                "holes":[[[{px},{py}],[{px},{y1}],[{x1},{y1}],[{x1},{py}]]]}}"#,
            x1 = px + 0.5,
            y1 = py + 0.5,
        ))
        .unwrap();
        let tri = [Point::new(1.0, 1.0), Point::new(3.0, 1.0), Point::new(1.5, 2.5)];
        let vis = Visibility::new(&room, 64);
        let area = vis.polygon_area(&tri, Range::Unbounded).unwrap().region;
        let Some(bb) = area.bbox() else { return Ok(()) };
        let q = Point::new(bb.min.x + s[0] * bb.width(), bb.min.y + s[1] * bb.height());
        prop_assume!(area.contains(q, 0.0));
        prop_assert!(vis.sees_all(q, &tri, Range::Unbounded));
        for i in 0..=8 {
            for j in 0..=(8 - i) {
                let (u, v) = (i as f64 / 8.0, j as f64 / 8.0);
                let t = tri[0] + (tri[1] - tri[0]) * u + (tri[2] - tri[0]) * v;
                prop_assert!(segment_clear(&room, q, t).unwrap(), "{q} misses {t}");
            }
        }
    }
}
