//! `pareto-peel`: sample Poisson clouds, peel or sort them, tabulate the
//! effective Hamiltonian, run convergence experiments, and render figures.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on run failures.

use clap::{Parser, Subcommand};
use pareto_peeling::peel::{convex_peel, peel, weak_l1_peel};
use pareto_peeling::sampling::sample_poisson;
use pareto_peeling::sorting::nds_depth;
use pareto_peeling::Vec2;
use pareto_peeling_cli::config::{load_config, Engine, Experiment};
use pareto_peeling_cli::render;
use pareto_peeling_cli::runner;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pareto-peel",
    version,
    about = "Pareto hull peeling experiments"
)]
struct Cli {
    /// Experiment configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed override for single-cloud subcommands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: config `out_dir`, else the current dir).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for `converge`.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one cloud and run Pareto hull peeling; writes points.csv.
    Peel {
        /// Intensity override (default: first entry of n_values).
        #[arg(long)]
        n: Option<f64>,
    },
    /// Sample one cloud and run nondominated sorting; writes depth.csv.
    Sort {
        #[arg(long)]
        n: Option<f64>,
    },
    /// Sample one cloud and run weakly-efficient ℓ¹ peeling; writes points.csv.
    Weakpeel {
        #[arg(long)]
        n: Option<f64>,
    },
    /// Tabulate the effective Hamiltonian over a unit-direction grid;
    /// writes hamiltonian.csv.
    Hamiltonian {
        /// Number of directions on the unit circle.
        #[arg(long, default_value_t = 360)]
        samples: usize,
    },
    /// Run the convergence experiment; writes runs.csv.
    Converge,
    /// Render a points.csv or grid csv to SVG.
    Render {
        /// points.csv input.
        #[arg(long, conflicts_with = "grid")]
        points: Option<PathBuf>,
        /// Grid csv input (x1,x2,value).
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
        /// Draw every k-th layer (points input).
        #[arg(long, default_value_t = 1)]
        stride: u32,
        /// Comma-separated contour levels (grid input).
        #[arg(long)]
        levels: Option<String>,
    },
}

fn fail_config(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn fail_run(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(3)
}

fn load_experiment(cli: &Cli) -> Result<Experiment, String> {
    let path = cli
        .config
        .as_ref()
        .ok_or("--config is required for this subcommand")?;
    let json = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    load_config(&json).map_err(|e| e.to_string())
}

fn resolve_out_dir(cli: &Cli, exp: Option<&Experiment>) -> PathBuf {
    if let Some(dir) = &cli.out_dir {
        return dir.clone();
    }
    if let Some(exp) = exp {
        if let Some(dir) = &exp.config.out_dir {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from(".")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

fn single_cloud(
    exp: &Experiment,
    cli: &Cli,
    n_override: Option<f64>,
) -> Result<(f64, u64, pareto_peeling::PointCloud), String> {
    let n = n_override.unwrap_or(exp.config.n_values[0]);
    let seed = cli.seed.unwrap_or(exp.config.seeds[0]);
    let cloud = sample_poisson(&exp.domain, &exp.intensity, n, seed).map_err(|e| e.to_string())?;
    Ok((n, seed, cloud))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Peel { n } => {
            let exp = match load_experiment(&cli) {
                Ok(e) => e,
                Err(e) => return fail_config(e),
            };
            let (n, seed, cloud) = match single_cloud(&exp, &cli, *n) {
                Ok(t) => t,
                Err(e) => return fail_run(e),
            };
            let pr = match exp.config.engine {
                Engine::Convexpeel => convex_peel(&cloud),
                Engine::Weakpeel => weak_l1_peel(&cloud),
                _ => peel(&cloud, &exp.model),
            };
            let dir = resolve_out_dir(&cli, Some(&exp));
            match write_file(&dir, "points.csv", &pr.to_csv(&cloud)) {
                Ok(path) => {
                    println!(
                        "peeled {} points (n = {n}, seed = {seed}) into {} layers -> {}",
                        cloud.len(),
                        pr.layers,
                        path.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail_run(e),
            }
        }
        Command::Sort { n } => {
            let exp = match load_experiment(&cli) {
                Ok(e) => e,
                Err(e) => return fail_config(e),
            };
            let (n, seed, cloud) = match single_cloud(&exp, &cli, *n) {
                Ok(t) => t,
                Err(e) => return fail_run(e),
            };
            let depths = nds_depth(&cloud);
            let dir = resolve_out_dir(&cli, Some(&exp));
            match write_file(&dir, "depth.csv", &depths.to_csv(&cloud)) {
                Ok(path) => {
                    println!(
                        "sorted {} points (n = {n}, seed = {seed}), max depth {} -> {}",
                        cloud.len(),
                        depths.max_depth(),
                        path.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail_run(e),
            }
        }
        Command::Weakpeel { n } => {
            let exp = match load_experiment(&cli) {
                Ok(e) => e,
                Err(e) => return fail_config(e),
            };
            let (n, seed, cloud) = match single_cloud(&exp, &cli, *n) {
                Ok(t) => t,
                Err(e) => return fail_run(e),
            };
            let pr = weak_l1_peel(&cloud);
            let dir = resolve_out_dir(&cli, Some(&exp));
            match write_file(&dir, "points.csv", &pr.to_csv(&cloud)) {
                Ok(path) => {
                    println!(
                        "weak-peeled {} points (n = {n}, seed = {seed}) into {} layers -> {}",
                        cloud.len(),
                        pr.layers,
                        path.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail_run(e),
            }
        }
        Command::Hamiltonian { samples } => {
            let exp = match load_experiment(&cli) {
                Ok(e) => e,
                Err(e) => return fail_config(e),
            };
            let mut csv = String::from("theta,xi1,xi2,value\n");
            for k in 0..*samples {
                let theta = std::f64::consts::TAU * k as f64 / *samples as f64;
                let xi = Vec2::new(theta.cos(), theta.sin());
                csv.push_str(&format!(
                    "{theta},{},{},{}\n",
                    xi.x,
                    xi.y,
                    exp.model.hamiltonian(xi)
                ));
            }
            let dir = resolve_out_dir(&cli, Some(&exp));
            match write_file(&dir, "hamiltonian.csv", &csv) {
                Ok(path) => {
                    println!(
                        "tabulated H over {samples} directions -> {}",
                        path.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail_run(e),
            }
        }
        Command::Converge => {
            let exp = match load_experiment(&cli) {
                Ok(e) => e,
                Err(e) => return fail_config(e),
            };
            let threads = cli.threads.unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|p| p.get())
                    .unwrap_or(1)
                    .min(8)
            });
            let (rows, any_error) = runner::run_convergence(&exp, threads);
            let dir = resolve_out_dir(&cli, Some(&exp));
            match write_file(&dir, "runs.csv", &runner::rows_to_csv(&rows)) {
                Ok(path) => {
                    println!(
                        "ran {} replicas over {} threads -> {}",
                        exp.config.n_values.len() * exp.config.seeds.len(),
                        threads,
                        path.display()
                    );
                    if any_error {
                        eprintln!("error: some replicas failed; see error rows in runs.csv");
                        ExitCode::from(3)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => fail_run(e),
            }
        }
        Command::Render {
            points,
            grid,
            out,
            stride,
            levels,
        } => {
            let svg = if let Some(points_path) = points {
                let csv = match std::fs::read_to_string(points_path) {
                    Ok(c) => c,
                    Err(e) => return fail_run(format!("{}: {e}", points_path.display())),
                };
                match render::parse_points_csv(&csv) {
                    Ok(rows) => render::peel_svg(&rows, *stride),
                    Err(e) => return fail_run(e),
                }
            } else if let Some(grid_path) = grid {
                let csv = match std::fs::read_to_string(grid_path) {
                    Ok(c) => c,
                    Err(e) => return fail_run(format!("{}: {e}", grid_path.display())),
                };
                let field = match render::parse_grid_csv(&csv) {
                    Ok(f) => f,
                    Err(e) => return fail_run(e),
                };
                let levels: Vec<f64> = match levels
                    .as_deref()
                    .unwrap_or("0.25,0.5,0.75,1.0,1.25")
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                {
                    Ok(l) => l,
                    Err(e) => return fail_config(format!("bad --levels: {e}")),
                };
                render::grid_svg(&field, &levels)
            } else {
                return fail_config("render needs --points or --grid");
            };
            match std::fs::write(out, svg) {
                Ok(()) => {
                    println!("wrote {}", out.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail_run(format!("{}: {e}", out.display())),
            }
        }
    }
}
