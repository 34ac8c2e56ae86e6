use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use losplan_core::evaluate::{verify_coverage, EvaPolicy, Requirement};
use losplan_core::floorplan::LayoutError;
use losplan_core::geometry::{Point, DEFAULT_ARC_SEGMENTS};
use losplan_core::losgraph::build_primary_lg;
use losplan_core::partition::hyper_triangulate;
use losplan_core::planner::{effective_ht_bound, plan_detailed, Deployment};
use losplan_core::visibility::{triangle_areas, Visibility};
use losplan_core::{parse_layout, Layout, PlanConfig, Range};

mod render;

use render::{Layer, RenderSpec, Scene};

#[derive(Parser)]
#[command(
    name = "losplan",
    version,
    about = "Line-of-sight guaranteed PRN placement"
)]
struct Cli {
    /// Worker threads for parallel stages (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Chords per full circle when discretizing range disks.
    #[arg(long, global = true, env = "LOSPLAN_ARC_SEGMENTS", default_value_t = DEFAULT_ARC_SEGMENTS)]
    arc_segments: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hyper-triangulate a layout; writes triangles.json and partition.svg.
    Partition {
        layout: PathBuf,
        /// Longest allowed triangle side in meters, or `inf`.
        #[arg(long = "ht-R", alias = "ht-r", default_value = "inf")]
        ht_r: Range,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Plan a deployment; writes deployment.json and deployment.svg.
    Plan {
        layout: PathBuf,
        #[command(flatten)]
        params: PlanParams,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write the LoS graphs of every tier to graphs.json.
        #[arg(long)]
        dump_graph: bool,
    },
    /// Sample UEs and check coverage; writes samples.csv, cdf.csv and summary.json.
    /// Exits with 1 when some sample is not covered.
    Verify {
        layout: PathBuf,
        deployment: PathBuf,
        /// Coverage level to check; defaults to the deployment's.
        #[arg(long)]
        n: Option<u8>,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Which qualifying triplet serves a UE.
        #[arg(long, default_value = "best")]
        eva_policy: EvaPolicy,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Draw any combination of layers to an SVG file.
    Render {
        layout: PathBuf,
        #[arg(long)]
        deployment: Option<PathBuf>,
        /// samples.csv from `verify`.
        #[arg(long)]
        samples: Option<PathBuf>,
        /// Mesh bound for the triangles and graph layers; defaults to the
        /// deployment's.
        #[arg(long = "ht-R", alias = "ht-r")]
        ht_r: Option<Range>,
        /// Comma-separated: layout, triangles, graph, areas, prns, samples.
        #[arg(long, value_delimiter = ',', default_value = "layout,areas,prns")]
        layers: Vec<Layer>,
        #[arg(long, default_value_t = 800.0)]
        width: f64,
        #[arg(long, short)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct PlanParams {
    /// Coverage level: 1, 2 or 3 PRNs in LoS everywhere.
    #[arg(long, default_value_t = 1)]
    n: u8,
    /// Signal range in meters, or `inf`.
    #[arg(long, default_value = "inf")]
    r: Range,
    /// Minimum separation distance in meters.
    #[arg(long, default_value_t = 0.0)]
    ds: f64,
    /// Minimum separation angle in degrees.
    #[arg(long, default_value_t = 0.0)]
    thetas: f64,
    /// Longest triangle side; defaults to the range.
    #[arg(long = "ht-R", alias = "ht-r")]
    ht_r: Option<Range>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    /// Bad input or configuration: exit 2.
    Usage(String),
    /// Verification found uncovered samples: exit 1.
    Uncovered(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Partition { layout, ht_r, out } => partition(&layout, ht_r, &out),
        Command::Plan {
            layout,
            params,
            out,
            dump_graph,
        } => plan(&layout, &params, cli.arc_segments, &out, dump_graph),
        Command::Verify {
            layout,
            deployment,
            n,
            samples,
            seed,
            eva_policy,
            out,
        } => verify(
            &layout,
            &deployment,
            n,
            samples as usize,
            seed,
            eva_policy,
            cli.arc_segments,
            &out,
        ),
        Command::Render {
            layout,
            deployment,
            samples,
            ht_r,
            layers,
            width,
            out,
        } => render_cmd(
            &layout,
            deployment.as_deref(),
            samples.as_deref(),
            ht_r,
            layers,
            width,
            cli.arc_segments,
            &out,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Uncovered(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}

fn load_layout(path: &Path) -> Result<Layout, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    match parse_layout(&text) {
        Ok(l) => Ok(l),
        Err(LayoutError::Invalid(diags)) => {
            for d in &diags {
                eprintln!("{}: {d}", path.display());
            }
            Err(Failure::Usage(format!(
                "{}: invalid layout",
                path.display()
            )))
        }
        Err(e) => Err(Failure::Usage(format!("{}: {e}", path.display()))),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> CmdResult {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(())
}

fn partition(layout_path: &Path, ht_r: Range, out: &Path) -> CmdResult {
    let layout = load_layout(layout_path)?;
    let tris = hyper_triangulate(&layout, ht_r)?;
    let doc = json!({ "ht_R": ht_r, "triangles": tris });
    let svg = render::render(
        &Scene {
            layout: Some(&layout),
            triangles: &tris,
            ..Scene::default()
        },
        &RenderSpec {
            layers: [Layer::Layout, Layer::Triangles].into_iter().collect(),
            ..RenderSpec::default()
        },
    );
    write(out, "triangles.json", &serde_json::to_string_pretty(&doc)?)?;
    write(out, "partition.svg", &svg)?;
    println!("{} triangles", tris.len());
    Ok(())
}

fn plan(
    layout_path: &Path,
    p: &PlanParams,
    arc_segments: usize,
    out: &Path,
    dump_graph: bool,
) -> CmdResult {
    let layout = load_layout(layout_path)?;
    let config = PlanConfig {
        coverage_n: p.n,
        range_r: p.r,
        msd_ds: p.ds,
        msa_thetas: p.thetas,
        ht_r: p.ht_r.unwrap_or(Range::Unbounded),
        arc_segments,
        seed: p.seed,
        ..PlanConfig::default()
    };
    config.validate()?;
    let detail = plan_detailed(&layout, &config)?;
    let d = &detail.deployment;
    let areas: Vec<_> = detail
        .covers
        .iter()
        .flat_map(|c| c.areas.iter().cloned())
        .collect();
    let svg = render::render(
        &Scene {
            layout: Some(&layout),
            areas: &areas,
            prns: &d.prns,
            ..Scene::default()
        },
        &RenderSpec::default(),
    );
    write(out, "deployment.json", &d.to_json())?;
    write(out, "deployment.svg", &svg)?;
    if dump_graph {
        let graphs: Vec<_> = detail.graphs.iter().map(|g| g.to_json()).collect();
        write(out, "graphs.json", &serde_json::to_string_pretty(&graphs)?)?;
    }
    let c = d.counts;
    println!(
        "g={} g2={} g3={} hidden_t={} total={}",
        c.g,
        c.g2,
        c.g3,
        c.hidden_t,
        d.prns.len()
    );
    let bound = p.n as usize * c.hidden_t;
    println!(
        "lower bound: {}t = {bound} <= {} PRNs: {}{}",
        p.n,
        d.prns.len(),
        if d.lower_bound.satisfied {
            "ok"
        } else {
            "VIOLATED"
        },
        if d.lower_bound.provably_optimal {
            " (provably optimal)"
        } else {
            ""
        }
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn verify(
    layout_path: &Path,
    deployment_path: &Path,
    n: Option<u8>,
    samples: usize,
    seed: u64,
    policy: EvaPolicy,
    arc_segments: usize,
    out: &Path,
) -> CmdResult {
    let layout = load_layout(layout_path)?;
    let text = fs::read_to_string(deployment_path)
        .map_err(|e| format!("{}: {e}", deployment_path.display()))?;
    let d =
        Deployment::from_json(&text).map_err(|e| format!("{}: {e}", deployment_path.display()))?;
    let req = Requirement {
        coverage_n: n.unwrap_or(d.config.coverage_n),
        range_r: d.config.range_r,
        msd_ds: d.config.msd_ds,
        msa_thetas: d.config.msa_thetas,
    };
    if !(1..=3).contains(&req.coverage_n) {
        return Err(Failure::Usage(format!(
            "coverage n must be 1, 2 or 3, got {}",
            req.coverage_n
        )));
    }
    let report = verify_coverage(
        &layout,
        &d.points(),
        &req,
        samples,
        seed,
        policy,
        arc_segments,
    )?;
    let mut samples_csv = Vec::new();
    report.write_samples_csv(&mut samples_csv)?;
    let mut cdf_csv = Vec::new();
    report.write_cdf_csv(&mut cdf_csv)?;
    let covered = report.samples.iter().filter(|s| s.covered).count();
    let summary = json!({
        "coverage_n": req.coverage_n,
        "samples": samples,
        "seed": seed,
        "eva_policy": match policy { EvaPolicy::Best => "best", EvaPolicy::First => "first" },
        "prns": d.prns.len(),
        "covered": covered,
        "coverage_fraction": report.coverage_fraction,
        "fraction_within_30_deg": report.fraction_within(30.0),
    });
    write(out, "samples.csv", &String::from_utf8(samples_csv)?)?;
    write(out, "cdf.csv", &String::from_utf8(cdf_csv)?)?;
    write(
        out,
        "summary.json",
        &serde_json::to_string_pretty(&summary)?,
    )?;
    println!(
        "coverage {covered}/{samples} = {}",
        report.coverage_fraction
    );
    if covered < samples {
        return Err(Failure::Uncovered(format!(
            "verification failed: {} samples lack {}-LoS coverage",
            samples - covered,
            req.coverage_n
        )));
    }
    Ok(())
}

/// Reads `ue_x,ue_y,covered` from a samples CSV written by `verify`.
fn read_samples(path: &Path) -> Result<Vec<(Point, bool)>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let bad =
        |line: usize| Failure::Usage(format!("{}:{line}: malformed sample row", path.display()));
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let (Some(x), Some(y), Some(c)) = (cols.first(), cols.get(1), cols.get(2)) else {
            return Err(bad(i + 1));
        };
        let x: f64 = x.parse().map_err(|_| bad(i + 1))?;
        let y: f64 = y.parse().map_err(|_| bad(i + 1))?;
        let c: bool = c.parse().map_err(|_| bad(i + 1))?;
        out.push((Point::new(x, y), c));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn render_cmd(
    layout_path: &Path,
    deployment_path: Option<&Path>,
    samples_path: Option<&Path>,
    ht_r: Option<Range>,
    layers: Vec<Layer>,
    width: f64,
    arc_segments: usize,
    out: &Path,
) -> CmdResult {
    let layout = load_layout(layout_path)?;
    let deployment = match deployment_path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Some(Deployment::from_json(&text).map_err(|e| format!("{}: {e}", p.display()))?)
        }
        None => None,
    };
    let config = deployment
        .as_ref()
        .map(|d| d.config.clone())
        .unwrap_or_default();
    let range = config.range_r;
    let spec = RenderSpec {
        width_px: width,
        layers: layers.into_iter().collect(),
        ..RenderSpec::default()
    };
    let wants = |l: Layer| spec.layers.contains(&l);
    let vis = Visibility::new(&layout, arc_segments);

    let bound = ht_r.unwrap_or_else(|| effective_ht_bound(&config));
    let mesh = if wants(Layer::Triangles) || wants(Layer::Graph) {
        Some(losplan_core::partition::hyper_triangulate_mesh(
            &layout, bound,
        )?)
    } else {
        None
    };
    let triangles = mesh.as_ref().map(|m| m.triangles()).unwrap_or_default();
    let mut edges = Vec::new();
    if let (Some(mesh), true) = (&mesh, wants(Layer::Graph)) {
        let areas = triangle_areas(&vis, mesh, range)?;
        edges = build_primary_lg(&triangles, &areas, config.eps_area)?.edges();
    }
    let prns = deployment
        .as_ref()
        .map(|d| d.prns.clone())
        .unwrap_or_default();
    let areas = if wants(Layer::Areas) {
        prns.iter()
            .map(|p| vis.point_region(p.point(), range))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        Vec::new()
    };
    let samples = match samples_path {
        Some(p) => read_samples(p)?,
        None => Vec::new(),
    };
    let svg = render::render(
        &Scene {
            layout: Some(&layout),
            triangles: &triangles,
            graph: &edges,
            areas: &areas,
            prns: &prns,
            samples: &samples,
        },
        &spec,
    );
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(out, svg).map_err(|e| format!("{}: {e}", out.display()))?;
    Ok(())
}
