use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use dmlpg::assembly::{AssemblyConfig, Method};
use dmlpg::benchmarks::{
    beam_benchmark, beam_grid, boussinesq_benchmark, csv_number, manufactured_benchmark, plate_benchmark, profiles,
    recovery, run_level, Benchmark, ConvergenceTable, LevelRun, ProblemKind,
};
use dmlpg::elasticity::Material;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Solve,
    Study,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Study => "study",
            Command::Compare => "compare",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub out: PathBuf,
    pub threads: Option<usize>,
    /// Accepted for interface stability; runs are deterministic.
    pub seed: Option<u64>,
}

/// Discretization of `cfg.problem` at refinement `level`.
pub fn build_benchmark(cfg: &RunConfig, level: usize) -> Result<Benchmark> {
    let m = cfg.degree;
    let bench = match cfg.problem {
        ProblemKind::Beam => {
            let (nx, ny) = beam_grid(level);
            beam_benchmark(nx, ny, m, cfg.support_factor)?
        }
        ProblemKind::Plate => plate_benchmark(level, m, cfg.support_factor, cfg.far_factor, cfg.near_radius)?,
        ProblemKind::Boussinesq => {
            let target = cfg.boussinesq_nodes * (1usize << (3 * level));
            boussinesq_benchmark(target, m, cfg.support_factor)?
        }
        ProblemKind::Manufactured => {
            let material = Material::new(cfg.young, cfg.poisson, cfg.stress_mode())?;
            let n = (cfg.nodes_per_axis - 1) * (1 << level) + 1;
            return Ok(manufactured_benchmark(material, n, cfg.field_degree, m, cfg.support_factor)?);
        }
    };
    Ok(bench.with_material(cfg.young, cfg.poisson)?)
}

pub fn assembly_config(cfg: &RunConfig, method: Method) -> AssemblyConfig {
    let mut a = AssemblyConfig::new(method);
    a.degree = cfg.degree;
    a.epsilon = cfg.epsilon;
    a.shape = cfg.shape;
    a.size_factor = cfg.size_factor;
    a.box_points = if method.is_direct() { cfg.box_points } else { Some(cfg.mlpg_points) };
    a.circle_points = cfg.circle_points;
    a.row_scaling = cfg.row_scaling;
    a.use_cache = cfg.use_cache;
    a
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> dmlpg::Result<()>) -> Result<()> {
    let mut out = create(path)?;
    f(&mut out)?;
    out.flush().map_err(|e| CliError::io(path, e))
}

fn level_record(method: Method, level: usize, run: &LevelRun, orders: (f64, f64)) -> Value {
    let num = |v: f64| if v.is_finite() { json!(v) } else { Value::Null };
    json!({
        "method": method.name(),
        "level": level,
        "h": run.h,
        "N": run.n_nodes,
        "r_u": run.report.r_u,
        "r_eps": run.report.r_eps,
        "order_u": num(orders.0),
        "order_eps": num(orders.1),
        "t_assemble_s": run.report.assembly_seconds,
        "t_solve_s": run.report.solve_seconds,
        "shape_evals": run.report.shape_evaluations,
        "shape_evals_per_subdomain": run.stats.evaluations_per_subdomain(),
        "cache_hits": run.stats.cache_hits,
        "residual": run.solution.residual,
        "eval_mesh": run.report.mesh,
    })
}

fn config_record(cfg: &RunConfig) -> Value {
    json!({
        "problem": cfg.problem.name(),
        "method": cfg.method.name(),
        "compare_with": cfg.compare_with.name(),
        "degree": cfg.degree,
        "epsilon": cfg.epsilon,
        "levels": cfg.levels,
        "shape": cfg.shape_name(),
        "size_factor": cfg.size_factor,
        "support_factor": cfg.support_factor,
        "far_factor": cfg.far_factor,
        "near_radius": cfg.near_radius,
        "box_points": cfg.box_points,
        "circle_points": cfg.circle_points,
        "mlpg_points": cfg.mlpg_points,
        "young": cfg.young,
        "poisson": cfg.poisson,
        "dim": cfg.dim,
        "field_degree": cfg.field_degree,
        "nodes_per_axis": cfg.nodes_per_axis,
        "boussinesq_nodes": cfg.boussinesq_nodes,
        "row_scaling": cfg.row_scaling,
        "cache": cfg.use_cache,
        "timings": cfg.timings,
    })
}

/// Runs `levels` with one method, returning per-level runs, the table, and
/// the finest benchmark for post-processing.
fn run_levels(
    cfg: &RunConfig,
    method: Method,
    levels: &[usize],
) -> Result<(Vec<LevelRun>, ConvergenceTable, Benchmark)> {
    let acfg = assembly_config(cfg, method);
    let mut runs = Vec::with_capacity(levels.len());
    let mut last = None;
    for &level in levels {
        let bench = build_benchmark(cfg, level)?;
        runs.push(run_level(&bench, &acfg)?);
        last = Some(bench);
    }
    let table = ConvergenceTable::from_levels(runs.iter().map(|r| (r.h, r.n_nodes, r.report.clone())).collect());
    Ok((runs, table, last.expect("at least one level")))
}

fn write_profiles(
    cfg: &RunConfig,
    method: Method,
    bench: &Benchmark,
    run: &LevelRun,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    let acfg = assembly_config(cfg, method);
    let rec = recovery(bench, &run.solution, &acfg)?;
    let mut files = Vec::new();
    for p in profiles(bench, &rec)? {
        let path = out.join(format!("{}.csv", p.name));
        write_with(&path, |w| p.write_csv(w))?;
        files.push(path);
    }
    Ok(files)
}

/// Executes `command` and writes its artifacts into `opts.out`. Returns
/// the paths written, the summary file last.
pub fn execute(command: Command, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    let out = opts.out.as_path();
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let mut artifacts = Vec::new();
    let mut records = Vec::new();
    let mut extra = json!({});
    match command {
        Command::Solve => {
            let level = *cfg.levels.last().expect("validated non-empty");
            let (runs, table, bench) = run_levels(cfg, cfg.method, &[level])?;
            let path = out.join("solve.csv");
            write_with(&path, |w| table.write_csv(w, cfg.timings))?;
            artifacts.push(path);
            artifacts.extend(write_profiles(cfg, cfg.method, &bench, &runs[0], out)?);
            records.push(level_record(cfg.method, level, &runs[0], (f64::NAN, f64::NAN)));
        }
        Command::Study => {
            if cfg.levels.len() < 2 {
                return Err(CliError::invalid("levels", "a study needs at least 2 refinement levels"));
            }
            let (runs, table, bench) = run_levels(cfg, cfg.method, &cfg.levels)?;
            let path = out.join("convergence.csv");
            write_with(&path, |w| table.write_csv(w, cfg.timings))?;
            artifacts.push(path);
            artifacts.extend(write_profiles(cfg, cfg.method, &bench, runs.last().expect("non-empty"), out)?);
            for ((run, row), &level) in runs.iter().zip(&table.rows).zip(&cfg.levels) {
                records.push(level_record(cfg.method, level, run, (row.order_u, row.order_eps)));
            }
            let (ou, oe) = table.overall_order();
            extra = json!({ "overall_order_u": ou, "overall_order_eps": oe });
        }
        Command::Compare => {
            let methods = [cfg.method, cfg.compare_with];
            let mut tables = Vec::new();
            let mut all_runs = Vec::new();
            for method in methods {
                let (runs, table, _) = run_levels(cfg, method, &cfg.levels)?;
                for ((run, row), &level) in runs.iter().zip(&table.rows).zip(&cfg.levels) {
                    records.push(level_record(method, level, run, (row.order_u, row.order_eps)));
                }
                tables.push(table);
                all_runs.push(runs);
            }
            let path = out.join("compare.csv");
            write_with(&path, |w| {
                writeln!(w, "method,{}", ConvergenceTable::HEADER)?;
                for (method, table) in methods.iter().zip(&tables) {
                    let mut buf = Vec::new();
                    table.write_csv(&mut buf, cfg.timings)?;
                    for line in String::from_utf8_lossy(&buf).lines().skip(1) {
                        writeln!(w, "{},{line}", method.name())?;
                    }
                }
                Ok(())
            })?;
            artifacts.push(path);
            let ratios: Vec<Value> = all_runs[0]
                .iter()
                .zip(&all_runs[1])
                .map(|(a, b)| {
                    json!({
                        "N": a.n_nodes,
                        "assembly_time_ratio": b.report.assembly_seconds / a.report.assembly_seconds,
                        "shape_evals": [a.report.shape_evaluations, b.report.shape_evaluations],
                        "r_u_ratio": b.report.r_u / a.report.r_u,
                    })
                })
                .collect();
            let (o0, o1) = (tables[0].overall_order(), tables[1].overall_order());
            extra = json!({
                "ratios": ratios,
                "overall_order_u": [csv_number(o0.0), csv_number(o1.0)],
                "overall_order_eps": [csv_number(o0.1), csv_number(o1.1)],
            });
        }
    }
    let summary_path = out.join("summary.jsonl");
    let names: Vec<String> = artifacts.iter().map(|p| p.display().to_string()).collect();
    let summary = json!({
        "command": command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": dmlpg::VERSION,
        "threads": opts.threads.unwrap_or_else(rayon::current_num_threads),
        "seed": opts.seed,
        "config": config_record(cfg),
        "results": records,
        "derived": extra,
        "artifacts": names,
        "wall_seconds": start.elapsed().as_secs_f64(),
    });
    write_with(&summary_path, |w| {
        writeln!(w, "{summary}")?;
        Ok(())
    })?;
    artifacts.push(summary_path);
    Ok(artifacts)
}

/// Runs inside a dedicated pool when a thread count is given.
pub fn execute_with_threads(command: Command, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    match opts.threads {
        Some(0) => Err(CliError::invalid("--threads", "must be at least 1")),
        Some(n) => {
            let pool =
                rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| CliError::Threads(e.to_string()))?;
            pool.install(|| execute(command, cfg, opts))
        }
        None => execute(command, cfg, opts),
    }
}
