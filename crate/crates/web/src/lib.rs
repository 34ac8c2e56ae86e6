//! Browser bindings: inspect a LoS area, plan a deployment, verify it.
//!
//! Every function takes and returns JSON strings so the page stays plain
//! JavaScript.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use losplan_core::evaluate::{verify_coverage, EvaPolicy, Requirement};
use losplan_core::geometry::{Point, DEFAULT_ARC_SEGMENTS};
use losplan_core::planner::plan_detailed;
use losplan_core::visibility::Visibility;
use losplan_core::{corpus, parse_layout, Deployment, Layout, PlanConfig, Range};

fn fail(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn layout(text: &str) -> Result<Layout, JsValue> {
    parse_layout(text).map_err(fail)
}

fn range(r: f64) -> Range {
    if r.is_finite() && r > 0.0 {
        Range::Finite(r)
    } else {
        Range::Unbounded
    }
}

fn rings(region: &losplan_core::Region) -> Value {
    json!(region.rings())
}

/// Names of the bundled layouts.
#[wasm_bindgen]
pub fn corpus_names() -> String {
    json!(corpus::NAMES).to_string()
}

/// Floor-plan JSON of a bundled layout.
#[wasm_bindgen]
pub fn corpus_layout(name: &str) -> Result<String, JsValue> {
    corpus::source(name)
        .map(str::to_owned)
        .ok_or_else(|| fail(format!("no bundled layout named {name:?}")))
}

/// Rings of the area seen from `(x, y)` within range `r`; a non-positive or
/// infinite `r` means unbounded.
#[wasm_bindgen]
pub fn los_area(layout_json: &str, x: f64, y: f64, r: f64) -> Result<String, JsValue> {
    let layout = layout(layout_json)?;
    let vis = Visibility::new(&layout, DEFAULT_ARC_SEGMENTS);
    let region = vis.point_region(Point::new(x, y), range(r)).map_err(fail)?;
    Ok(json!({ "area": region.area(), "rings": rings(&region) }).to_string())
}

/// Plans a deployment. `config_json` holds any `PlanConfig` fields; the
/// result carries the deployment and the placement area of every PRN.
#[wasm_bindgen]
pub fn plan(layout_json: &str, config_json: &str) -> Result<String, JsValue> {
    let layout = layout(layout_json)?;
    let mut merged = serde_json::to_value(PlanConfig::default()).map_err(fail)?;
    let given: Value = serde_json::from_str(config_json).map_err(fail)?;
    if let (Some(base), Some(over)) = (merged.as_object_mut(), given.as_object()) {
        base.extend(over.clone());
    }
    let config: PlanConfig = serde_json::from_value(merged).map_err(fail)?;
    let detail = plan_detailed(&layout, &config).map_err(fail)?;
    let areas: Vec<Value> = detail
        .covers
        .iter()
        .flat_map(|c| c.areas.iter().map(rings))
        .collect();
    let deployment: Value = serde_json::from_str(&detail.deployment.to_json()).map_err(fail)?;
    Ok(json!({ "deployment": deployment, "areas": areas }).to_string())
}

/// Samples UEs against a deployment and reports coverage, the EVA CDF and
/// every sample.
#[wasm_bindgen]
pub fn verify(
    layout_json: &str,
    deployment_json: &str,
    samples: usize,
    seed: u32,
) -> Result<String, JsValue> {
    let layout = layout(layout_json)?;
    let d = Deployment::from_json(deployment_json).map_err(fail)?;
    let req = Requirement {
        coverage_n: d.config.coverage_n,
        range_r: d.config.range_r,
        msd_ds: d.config.msd_ds,
        msa_thetas: d.config.msa_thetas,
    };
    let report = verify_coverage(
        &layout,
        &d.points(),
        &req,
        samples,
        u64::from(seed),
        EvaPolicy::Best,
        d.config.arc_segments,
    )
    .map_err(fail)?;
    let points: Vec<Value> = report
        .samples
        .iter()
        .map(|s| json!([s.ue.x, s.ue.y, s.covered]))
        .collect();
    Ok(json!({
        "coverage_fraction": report.coverage_fraction,
        "fraction_within_30_deg": report.fraction_within(30.0),
        "cdf": report.cdf,
        "samples": points,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> String {
        corpus_layout("square").unwrap()
    }

    #[test]
    fn bundled_layouts_are_listed() {
        let names: Vec<String> = serde_json::from_str(&corpus_names()).unwrap();
        assert!(names.iter().any(|n| n == "replica"));
    }

    #[test]
    fn los_area_of_a_convex_room_is_the_room() {
        let out: Value =
            serde_json::from_str(&los_area(&square(), 5.0, 5.0, 0.0).unwrap()).unwrap();
        assert!((out["area"].as_f64().unwrap() - 22.0 * 22.0).abs() < 1e-6);
    }

    #[test]
    fn plan_then_verify() {
        let layout = corpus_layout("l_shape").unwrap();
        let planned: Value =
            serde_json::from_str(&plan(&layout, r#"{"coverage_n": 2, "msd_ds": 1.0}"#).unwrap())
                .unwrap();
        let prns = planned["deployment"]["prns"].as_array().unwrap().len();
        assert_eq!(planned["areas"].as_array().unwrap().len(), prns);
        let report: Value = serde_json::from_str(
            &verify(&layout, &planned["deployment"].to_string(), 500, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(report["coverage_fraction"], 1.0);
        assert_eq!(report["samples"].as_array().unwrap().len(), 500);
    }
}
