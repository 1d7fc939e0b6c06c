//! The convergence harness: sample → peel/sort → observables → CSV rows.
//!
//! Replicas (one per `(n, seed)` pair) run in a fixed-size worker pool;
//! results are collected by job index so the emitted rows are in config order
//! and byte-identical no matter how many workers run.

use crate::config::{Engine, Experiment, Observable};
use pareto_peeling::peel::{convex_peel, peel, weak_l1_peel_full, HeightProfile};
use pareto_peeling::reference::ReferenceCase;
use pareto_peeling::sampling::sample_poisson;
use pareto_peeling::sorting::{depth_at, longest_chain, nds_depth};
use pareto_peeling::{norm::norm_preset, NormModel, PointCloud, Rect, Vec2};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

/// One emitted CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub n: f64,
    pub seed: u64,
    pub observable: String,
    pub value: f64,
    pub wall_ms: u128,
}

/// 33×33 lattice strictly inside the rectangle.
pub fn interior_lattice(rect: Rect, per_side: usize) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(per_side * per_side);
    for j in 1..=per_side {
        for i in 1..=per_side {
            let fx = i as f64 / (per_side + 1) as f64;
            let fy = j as f64 / (per_side + 1) as f64;
            out.push(Vec2::new(
                rect.xmin + rect.width() * fx,
                rect.ymin + rect.height() * fy,
            ));
        }
    }
    out
}

/// Height oracle shared by the observables, independent of the engine.
enum Heights<'a> {
    Peel {
        profile: HeightProfile,
        cloud: &'a PointCloud,
        model: &'a NormModel,
        layers: u32,
    },
    Sort {
        cloud: &'a PointCloud,
        depths: pareto_peeling::DepthResult,
    },
    Weak {
        rects: Vec<Rect>,
    },
}

impl Heights<'_> {
    fn at(&self, x: Vec2) -> f64 {
        match self {
            Heights::Peel {
                profile,
                cloud,
                model,
                ..
            } => {
                let mut scratch = Vec::new();
                profile.height_at(cloud, model, x, &mut scratch) as f64
            }
            Heights::Sort { cloud, depths } => depth_at(cloud, depths, x) as f64,
            Heights::Weak { rects } => pareto_peeling::peel::weak_height_at(rects, x) as f64,
        }
    }

    fn layer_count(&self) -> f64 {
        match self {
            Heights::Peel { layers, .. } => *layers as f64,
            Heights::Sort { depths, .. } => depths.max_depth() as f64,
            Heights::Weak { rects } => rects.len() as f64,
        }
    }
}

fn run_single(exp: &Experiment, n: f64, seed: u64) -> Result<Vec<(String, f64)>, String> {
    let cloud = sample_poisson(&exp.domain, &exp.intensity, n, seed).map_err(|e| e.to_string())?;
    if cloud.is_empty() {
        return Err("empty sample".to_string());
    }
    let scale_exp = match exp.config.engine {
        Engine::Weakpeel => 1.0,
        _ => 0.5,
    };
    let scale = n.powf(-scale_exp);

    let euclid: NormModel;
    let heights: Heights = match exp.config.engine {
        Engine::Peel => {
            let pr = peel(&cloud, &exp.model);
            let profile = HeightProfile::new(&pr);
            Heights::Peel {
                profile,
                cloud: &cloud,
                model: &exp.model,
                layers: pr.layers,
            }
        }
        Engine::Convexpeel => {
            euclid = norm_preset("euclidean").expect("euclidean preset");
            let pr = convex_peel(&cloud);
            let profile = HeightProfile::new(&pr);
            Heights::Peel {
                profile,
                cloud: &cloud,
                model: &euclid,
                layers: pr.layers,
            }
        }
        Engine::Sort => {
            let depths = nds_depth(&cloud);
            Heights::Sort {
                cloud: &cloud,
                depths,
            }
        }
        Engine::Weakpeel => {
            let (_, rects) = weak_l1_peel_full(&cloud);
            Heights::Weak { rects }
        }
    };

    let bbox = exp.domain.bounding_box();
    let center = bbox.center();
    let mut out = Vec::new();
    for obs in &exp.config.observables {
        let value = match obs {
            Observable::CenterHeight => scale * heights.at(center),
            Observable::SupErrorVsReference => {
                let case = exp.reference.expect("validated at load");
                sup_error(&heights, case, scale)
            }
            Observable::LayerCount => scale * heights.layer_count(),
            Observable::ChainLength => scale * longest_chain(&cloud) as f64,
            Observable::Anisotropy => anisotropy(&heights, bbox, scale),
        };
        out.push((obs.label().to_string(), value));
    }
    Ok(out)
}

fn sup_error(heights: &Heights, case: ReferenceCase, scale: f64) -> f64 {
    let lattice = interior_lattice(case.experiment_rect(), 33);
    let mut sup: f64 = 0.0;
    for x in lattice {
        let reference = case.eval(x).expect("lattice point inside the case domain");
        sup = sup.max((scale * heights.at(x) - reference).abs());
    }
    sup
}

/// Spread of scaled heights over eight compass points at half the
/// quarter-width radius: `max − min`. Isotropic limits give small values.
fn anisotropy(heights: &Heights, bbox: Rect, scale: f64) -> f64 {
    let center = bbox.center();
    let r = 0.25 * bbox.width().min(bbox.height());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..8 {
        let t = std::f64::consts::TAU * k as f64 / 8.0;
        let h = scale * heights.at(Vec2::new(center.x + r * t.cos(), center.y + r * t.sin()));
        lo = lo.min(h);
        hi = hi.max(h);
    }
    hi - lo
}

/// Runs every `(n, seed)` replica of the experiment on `threads` workers.
/// Returns rows in config order and whether any replica failed.
pub fn run_convergence(exp: &Experiment, threads: usize) -> (Vec<RunRow>, bool) {
    let jobs: Vec<(f64, u64)> = exp
        .config
        .n_values
        .iter()
        .flat_map(|&n| exp.config.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let threads = threads.max(1).min(jobs.len().max(1));
    let next_job = AtomicUsize::new(0);
    type JobSlot = Option<(Result<Vec<(String, f64)>, String>, u128)>;
    let results: Mutex<Vec<JobSlot>> = Mutex::new(vec![None; jobs.len()]);

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let idx = next_job.fetch_add(1, Ordering::Relaxed);
                if idx >= jobs.len() {
                    break;
                }
                let (n, seed) = jobs[idx];
                let t0 = Instant::now();
                let outcome = run_single(exp, n, seed);
                let wall = t0.elapsed().as_millis();
                results.lock().unwrap()[idx] = Some((outcome, wall));
            });
        }
    });

    let mut rows = Vec::new();
    let mut any_error = false;
    let results = results.into_inner().unwrap();
    for (idx, slot) in results.into_iter().enumerate() {
        let (n, seed) = jobs[idx];
        let (outcome, wall_ms) = slot.expect("worker filled every slot");
        match outcome {
            Ok(values) => {
                for (observable, value) in values {
                    rows.push(RunRow {
                        n,
                        seed,
                        observable,
                        value,
                        wall_ms,
                    });
                }
            }
            Err(msg) => {
                any_error = true;
                rows.push(RunRow {
                    n,
                    seed,
                    observable: format!("error[{msg}]"),
                    value: f64::NAN,
                    wall_ms,
                });
            }
        }
    }
    (rows, any_error)
}

/// CSV serialization of the run rows (`runs.csv` schema).
pub fn rows_to_csv(rows: &[RunRow]) -> String {
    let mut out = String::from("n,seed,observable,value,wall_time_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n, r.seed, r.observable, r.value, r.wall_ms
        ));
    }
    out
}

/// Strips the wall-time column (the only nondeterministic one).
pub fn strip_wall_time(csv: &str) -> String {
    csv.lines()
        .map(|line| match line.rsplit_once(',') {
            Some((head, _)) => head.to_string(),
            None => line.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}
