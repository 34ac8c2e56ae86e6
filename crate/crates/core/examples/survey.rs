use std::time::Instant;

use losplan_core::corpus;
use losplan_core::evaluate::{verify_coverage, EvaPolicy, Requirement};
use losplan_core::{plan, PlanConfig, Range};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let names: Vec<&str> = if args.len() > 1 {
        vec![args[1].as_str()]
    } else {
        corpus::NAMES.to_vec()
    };
    let settings: Vec<(u8, Range, f64, f64)> = vec![
        (1, Range::Unbounded, 0.0, 0.0),
        (1, Range::Finite(6.0), 0.0, 0.0),
        (1, Range::Finite(3.0), 0.0, 0.0),
        (2, Range::Unbounded, 1.0, 0.0),
        (2, Range::Finite(6.0), 2.0, 0.0),
        (2, Range::Finite(3.0), 1.0, 0.0),
        (3, Range::Unbounded, 1.0, 40.0),
        (3, Range::Finite(6.0), 2.0, 30.0),
        (3, Range::Finite(3.0), 0.5, 20.0),
    ];
    for name in names {
        let layout = corpus::layout(name).unwrap();
        for &(n, r, ds, th) in &settings {
            let cfg = PlanConfig {
                coverage_n: n,
                range_r: r,
                msd_ds: ds,
                msa_thetas: th,
                ht_r: if r.is_unbounded() {
                    Range::Finite(3.0)
                } else {
                    r
                },
                ..PlanConfig::default()
            };
            let t = Instant::now();
            match plan(&layout, &cfg) {
                Ok(d) => {
                    let dt = t.elapsed().as_secs_f64();
                    let req = Requirement {
                        coverage_n: n,
                        range_r: r,
                        msd_ds: ds,
                        msa_thetas: th,
                    };
                    let rep =
                        verify_coverage(&layout, &d.points(), &req, 10000, 1, EvaPolicy::Best, 64)
                            .unwrap();
                    println!(
                        "{name:18} n={n} r={r:4} ds={ds:3} th={th:2}: g={:3} g2={:3} g3={:3} t={:2} cov={:.4} plan={dt:.1}s total={:.1}s",
                        d.counts.g, d.counts.g2, d.counts.g3, d.counts.hidden_t, rep.coverage_fraction, t.elapsed().as_secs_f64()
                    );
                }
                Err(e) => println!(
                    "{name:18} n={n} r={r} ds={ds} th={th}: ERROR {e} ({:.1}s)",
                    t.elapsed().as_secs_f64()
                ),
            }
        }
    }
}
