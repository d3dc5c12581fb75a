//! Acceptance suite. Runs every criterion in sequence, prints one line per
//! criterion and exits non-zero if any of them fails.

use std::process::ExitCode;
use std::time::Instant;

use dmlpg::approx::{
    basis_eval, gmls_derivative_row, mls_shape, mls_shape_with_derivatives, GaussianWeight, MlsContext, PolyBasis,
};
use dmlpg::assembly::{
    assemble, dmlpg1_beta, dmlpg1_lambda, dmlpg5_beta, dmlpg5_lambda, solve, AssemblyConfig, GlobalSystem, Method,
    RowContext,
};
use dmlpg::benchmarks::{
    beam_benchmark, beam_grid, boussinesq_benchmark, manufactured_benchmark, plate_benchmark, profiles, recovery,
    run_level, Benchmark, ConvergenceTable, LevelRun, ProblemKind, BOUSSINESQ_NODES,
};
use dmlpg::elasticity::{Material, StressMode};
use dmlpg::geometry::{build_subdomain, BoundaryTag, NeighborGrid, Point, ShapeKind};
use dmlpg::mlpg::{assemble_mlpg, mlpg_config};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

/// Collects named checks; the criterion passes when all of them hold.
#[derive(Default)]
struct Checks {
    notes: Vec<String>,
    failures: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn finish(self) -> Outcome {
        if self.failures.is_empty() {
            Ok(self.notes.join("; "))
        } else {
            Err(format!("{} | passed: {}", self.failures.join("; "), self.notes.join("; ")))
        }
    }
}

fn runtime(checks: &mut Checks, start: Instant, limit: f64) {
    let t = start.elapsed().as_secs_f64();
    checks.check(t < limit, format!("runtime {t:.1} s < {limit} s"));
}

// ---------------------------------------------------------------- 1

fn cloud(dim: usize, per_axis: usize, graded: bool, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1.0 / (per_axis - 1) as f64;
    let count = per_axis.pow(dim as u32);
    (0..count)
        .map(|mut idx| {
            let mut p = [0.0; 3];
            for c in p.iter_mut().take(dim) {
                let t = (idx % per_axis) as f64 * h;
                idx /= per_axis;
                *c = if graded { t.powf(1.6) + rng.gen_range(-0.1..0.1) * h * h } else { t };
            }
            p
        })
        .collect()
}

fn reproduction() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for dim in [2, 3] {
        for m in [2, 3] {
            for graded in [false, true] {
                let pts = cloud(dim, if dim == 2 { 17 } else { 9 }, graded, 11 + m as u64);
                let delta = if dim == 2 { 0.35 } else { 0.55 };
                let grid = NeighborGrid::new(&pts, dim, delta);
                let basis = PolyBasis::new(dim, m).unwrap();
                let ctx = MlsContext::new(&pts, &grid, basis.clone(), GaussianWeight::new(4.0));
                let mut rng = ChaCha8Rng::seed_from_u64(5);
                for _ in 0..4 {
                    let mut x = [0.0; 3];
                    for c in x.iter_mut().take(dim) {
                        *c = rng.gen_range(0.25..0.75);
                    }
                    let sys = ctx.moment_system(&x, delta).unwrap();
                    let values = mls_shape(&sys);
                    let full = mls_shape_with_derivatives(&ctx, &x, delta).unwrap();
                    let derivs: Vec<([u8; 3], Vec<f64>)> = basis
                        .exponents()
                        .iter()
                        .filter(|a| a.iter().sum::<u8>() >= 1)
                        .map(|&a| (a, gmls_derivative_row(&sys, &basis, a).unwrap()))
                        .collect();
                    let data: Vec<Vec<f64>> = sys.active().iter().map(|&j| basis.eval(&pts[j])).collect();
                    let at_x = basis.eval(&x);
                    for i in 0..basis.len() {
                        let apply = |row: &[f64]| -> f64 { row.iter().zip(&data).map(|(a, q)| a * q[i]).sum() };
                        let mut err = (apply(&values) - at_x[i]).abs() / at_x[i].abs().max(1.0);
                        for (alpha, row) in &derivs {
                            let exact = basis_eval(&basis, &x, &[0.0; 3], 1.0, *alpha).unwrap()[i];
                            err = err.max((apply(row) - exact).abs() / exact.abs().max(1.0));
                        }
                        for a in 0..dim {
                            let mut alpha = [0u8; 3];
                            alpha[a] = 1;
                            let exact = basis_eval(&basis, &x, &[0.0; 3], 1.0, alpha).unwrap()[i];
                            let g: Vec<f64> = full.gradients.iter().map(|g| g[a]).collect();
                            err = err.max((apply(&g) - exact).abs() / exact.abs().max(1.0));
                        }
                        worst = worst.max(err);
                    }
                    cases += 1;
                }
            }
        }
    }
    checks.check(
        worst < 1e-9,
        format!(
            "max relative residual {worst:.2e} < 1e-9 over {cases} points (m = 2, 3; d = 2, 3; uniform and graded)"
        ),
    );
    runtime(&mut checks, start, 10.0);
    checks.finish()
}

// ---------------------------------------------------------------- 2

fn nodal_error(bench: &Benchmark, values: &dmlpg::assembly::Solution) -> f64 {
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for k in 0..bench.nodes.len() {
        let u = bench.exact.displacement(bench.nodes.point(k));
        let v = values.node(k);
        for i in 0..bench.nodes.dim() {
            num = num.max((u[i] - v[i]).abs());
            den = den.max(u[i].abs());
        }
    }
    num / den
}

fn patch_tests() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let plane = Material::new(1.0, 0.25, StressMode::PlaneStress).unwrap();
    let solid = Material::new(1.0, 0.3, StressMode::Solid).unwrap();
    let mut worst = 0.0f64;
    let mut runs = 0;
    for (material, n, shapes) in
        [(plane, 9, vec![(ShapeKind::Box, 1.0), (ShapeKind::Ball, 0.7)]), (solid, 5, vec![(ShapeKind::Box, 1.0)])]
    {
        for field_degree in [1, 2] {
            let bench = manufactured_benchmark(material, n, field_degree, 2, 1.5).unwrap();
            for method in [Method::Dmlpg1, Method::Dmlpg5] {
                for &(shape, size) in &shapes {
                    let mut cfg = AssemblyConfig::new(method);
                    cfg.shape = shape;
                    cfg.size_factor = size;
                    cfg.circle_points = 20;
                    let sol =
                        solve(&assemble(&bench.nodes, &bench.geometry, bench.exact.as_ref(), &cfg).unwrap()).unwrap();
                    let err = nodal_error(&bench, &sol);
                    if err >= 1e-8 {
                        checks.check(
                            false,
                            format!("{method} {shape:?} d = {} degree {field_degree}: {err:.2e}", material.dim()),
                        );
                    }
                    worst = worst.max(err);
                    runs += 1;
                }
            }
        }
    }
    checks.note(format!("max nodal relative error {worst:.2e} < 1e-8 over {runs} runs (DMLPG1/5; squares, disks, cubes; linear and quadratic)"));
    runtime(&mut checks, start, 60.0);
    checks.finish()
}

// ---------------------------------------------------------------- 3

fn max_relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale == 0.0 {
        gap
    } else {
        gap / scale
    }
}

fn exact_quadrature() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let plane = Material::new(1.0, 0.25, StressMode::PlaneStress).unwrap();
    let solid = Material::new(1.0, 0.3, StressMode::Solid).unwrap();
    let (nx, ny) = beam_grid(0);
    let benches = [
        ("beam", beam_benchmark(nx, ny, 2, 2.0).unwrap()),
        ("square", manufactured_benchmark(plane, 7, 2, 2, 1.5).unwrap()),
        ("cube", manufactured_benchmark(solid, 5, 2, 2, 1.5).unwrap()),
    ];
    let (mut gap1, mut gap5, mut rows) = (0.0f64, 0.0f64, 0);
    for (_, bench) in &benches {
        let dim = bench.nodes.dim();
        let rc = RowContext::new(
            PolyBasis::new(dim, 2).unwrap(),
            bench.exact.as_ref(),
            &bench.geometry,
            GaussianWeight::new(4.0),
        );
        for k in 0..bench.nodes.len() {
            if bench.nodes.tag(k) == BoundaryTag::Dirichlet {
                continue;
            }
            let sub =
                build_subdomain(k, &bench.nodes, ShapeKind::Box, bench.nodes.spacing(k), &bench.geometry).unwrap();
            let delta = bench.nodes.support(k);
            gap1 = gap1.max(max_relative_gap(
                &dmlpg1_lambda(&sub, delta, &rc, 2).unwrap(),
                &dmlpg1_lambda(&sub, delta, &rc, 10).unwrap(),
            ));
            gap5 = gap5.max(max_relative_gap(
                &dmlpg5_lambda(&sub, delta, &rc, 1).unwrap(),
                &dmlpg5_lambda(&sub, delta, &rc, 10).unwrap(),
            ));
            if bench.kind == ProblemKind::Manufactured {
                // Polynomial data: the right-hand sides integrate exactly too.
                gap1 = gap1
                    .max(max_relative_gap(&dmlpg1_beta(&sub, &rc, 2).unwrap(), &dmlpg1_beta(&sub, &rc, 10).unwrap()));
                gap5 = gap5
                    .max(max_relative_gap(&dmlpg5_beta(&sub, &rc, 1).unwrap(), &dmlpg5_beta(&sub, &rc, 10).unwrap()));
            }
            rows += 1;
        }
    }
    checks.check(gap1 < 1e-12, format!("DMLPG1 2 vs 10 points: {gap1:.2e} < 1e-12"));
    checks.check(gap5 < 1e-12, format!("DMLPG5 1 vs 10 points: {gap5:.2e} < 1e-12"));
    checks.note(format!("{rows} square/cube rows (beam, unit square, unit cube)"));
    runtime(&mut checks, start, 60.0);
    checks.finish()
}

// ---------------------------------------------------------------- 4

fn beam_level(level: usize) -> Benchmark {
    let (nx, ny) = beam_grid(level);
    beam_benchmark(nx, ny, 2, 2.0).unwrap()
}

fn study(benches: &[Benchmark], cfg: &AssemblyConfig) -> (Vec<LevelRun>, ConvergenceTable) {
    let runs: Vec<LevelRun> = benches.iter().map(|b| run_level(b, cfg).unwrap()).collect();
    let table = ConvergenceTable::from_levels(runs.iter().map(|r| (r.h, r.n_nodes, r.report.clone())).collect());
    (runs, table)
}

fn shaped(method: Method, shape: ShapeKind) -> AssemblyConfig {
    let mut cfg = if method.is_direct() { AssemblyConfig::new(method) } else { mlpg_config(method) };
    cfg.shape = shape;
    if shape == ShapeKind::Ball {
        cfg.size_factor = 0.7;
        cfg.circle_points = 10;
    }
    cfg
}

fn errors(t: &ConvergenceTable) -> String {
    t.rows.iter().map(|r| format!("{:.2e}", r.report.r_u)).collect::<Vec<_>>().join("/")
}

fn beam_convergence(beams: &[Benchmark]) -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let (_, square) = study(beams, &shaped(Method::Dmlpg1, ShapeKind::Box));
    let (_, circle) = study(beams, &shaped(Method::Dmlpg1, ShapeKind::Ball));
    let (_, mlpg_circle) = study(beams, &shaped(Method::Mlpg1, ShapeKind::Ball));
    let (_, mlpg_square) = study(beams, &shaped(Method::Mlpg1, ShapeKind::Box));
    let r = &square.rows;
    let monotone = r.windows(2).all(|w| w[1].report.r_u < w[0].report.r_u && w[1].report.r_eps < w[0].report.r_eps);
    checks.check(monotone, format!("DMLPG1 squares r_u {} and r_eps decrease", errors(&square)));
    let (ou, oe) = square.overall_order();
    checks.check(ou >= 1.7, format!("u order {ou:.2} >= 1.7"));
    checks.check(oe >= 1.0, format!("eps order {oe:.2} >= 1.0"));
    let (od, _) = circle.overall_order();
    let (om, _) = mlpg_circle.overall_order();
    checks.check(
        (od - om).abs() <= 0.5,
        format!("circles with 10-point rules: DMLPG1 order {od:.2} vs MLPG1 {om:.2}, within 0.5"),
    );
    let better = square.rows.iter().zip(&circle.rows).all(|(s, c)| s.report.r_u <= c.report.r_u);
    checks.check(better, format!("squares r_u <= circles r_u {} at every level", errors(&circle)));
    let (oms, _) = mlpg_square.overall_order();
    checks.note(format!("info: squares DMLPG1 {ou:.2} vs MLPG1 {oms:.2} (MLPG1 r_u {})", errors(&mlpg_square)));
    runtime(&mut checks, start, 300.0);
    checks.finish()
}

// ---------------------------------------------------------------- 5

fn plate_concentration() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let cfg = AssemblyConfig::new(Method::Dmlpg1);
    let plates: Vec<Benchmark> = (0..3).map(|l| plate_benchmark(l, 2, 2.0, 2.5, 2.0).unwrap()).collect();
    let (runs, table) = study(&plates, &cfg);
    let finest = plates.last().unwrap();
    let rec = recovery(finest, &runs.last().unwrap().solution, &cfg).unwrap();
    let s11 = rec.stress(&[0.0, 1.0, 0.0]).unwrap()[0];
    checks.check(
        (s11 - 3.0).abs() <= 0.05 * 3.0,
        format!("sigma11(0, a) = {s11:.4} within 5% of 3 (N = {})", finest.nodes.len()),
    );
    let decreasing = table.rows.windows(2).all(|w| w[1].report.r_u < w[0].report.r_u);
    checks.check(decreasing, format!("r_u {} decreases", errors(&table)));
    runtime(&mut checks, start, 600.0);
    checks.finish()
}

// ---------------------------------------------------------------- 6 and 7

struct BoussinesqRuns {
    dmlpg1: GlobalSystem,
    mlpg1: GlobalSystem,
}

fn boussinesq(shared: &mut Option<BoussinesqRuns>) -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let bench = boussinesq_benchmark(BOUSSINESQ_NODES, 2, 1.5).unwrap();
    checks.note(format!("N = {}", bench.nodes.len()));
    let cfg = AssemblyConfig::new(Method::Dmlpg1);
    let run = run_level(&bench, &cfg).unwrap();
    let rec = recovery(&bench, &run.solution, &cfg).unwrap();
    let disp = profiles(&bench, &rec).unwrap().remove(0);
    let (eur, ew) = (disp.relative_error(0), disp.relative_error(1));
    checks.check(eur < 0.1, format!("surface u_r error {:.1}% < 10%", 100.0 * eur));
    checks.check(ew < 0.1, format!("surface w error {:.1}% < 10%", 100.0 * ew));
    let exact = bench.exact.as_ref();
    let dmlpg1 = assemble(&bench.nodes, &bench.geometry, exact, &cfg).unwrap();
    let dmlpg5 = assemble(&bench.nodes, &bench.geometry, exact, &AssemblyConfig::new(Method::Dmlpg5)).unwrap();
    let evals = dmlpg1.stats.shape_evaluations + dmlpg5.stats.shape_evaluations;
    checks.check(evals == 0, format!("DMLPG1/5 shape evaluations {evals}"));
    let mlpg5 = assemble_mlpg(&bench.nodes, &bench.geometry, exact, &mlpg_config(Method::Mlpg5)).unwrap();
    let per5 = mlpg5.stats.evaluations_per_subdomain();
    checks.check(per5 >= 100.0, format!("MLPG5 {per5:.0} per subdomain >= 100"));
    let mlpg1 = assemble_mlpg(&bench.nodes, &bench.geometry, exact, &mlpg_config(Method::Mlpg1)).unwrap();
    let per1 = mlpg1.stats.evaluations_per_subdomain();
    checks.check(per1 >= 1000.0, format!("MLPG1 {per1:.0} per subdomain >= 1000"));
    runtime(&mut checks, start, 600.0);
    *shared = Some(BoussinesqRuns { dmlpg1, mlpg1 });
    checks.finish()
}

fn fastest_assembly(bench: &Benchmark, cfg: &AssemblyConfig) -> f64 {
    (0..3)
        .map(|_| assemble(&bench.nodes, &bench.geometry, bench.exact.as_ref(), cfg).unwrap().stats.assembly_seconds)
        .fold(f64::INFINITY, f64::min)
}

fn cost_ratio(beams: &[Benchmark], shared: Option<BoussinesqRuns>) -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let finest = beams.last().unwrap();
    let direct = fastest_assembly(finest, &AssemblyConfig::new(Method::Dmlpg1));
    let classical = assemble_mlpg(&finest.nodes, &finest.geometry, finest.exact.as_ref(), &mlpg_config(Method::Mlpg1))
        .unwrap()
        .stats
        .assembly_seconds;
    let ratio = classical / direct;
    checks.check(ratio >= 5.0, format!("beam {}: MLPG1/DMLPG1 assembly time {ratio:.0}x >= 5x", finest.nodes.len()));
    match shared {
        Some(runs) => {
            let ratio = runs.mlpg1.stats.assembly_seconds / runs.dmlpg1.stats.assembly_seconds;
            checks.check(ratio >= 20.0, format!("Boussinesq: {ratio:.0}x >= 20x"));
        }
        None => checks.check(false, "Boussinesq runs unavailable"),
    }
    runtime(&mut checks, start, 300.0);
    checks.finish()
}

// ---------------------------------------------------------------- 8

fn cache_equivalence(beams: &[Benchmark]) -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    let bench = &beams[1];
    let (nx, ny) = beam_grid(1);
    // Uniform grid: every node off the boundary has the same unclipped box.
    let modal = (nx - 2) * (ny - 2);
    for method in [Method::Dmlpg1, Method::Dmlpg5] {
        let mut cfg = AssemblyConfig::new(method);
        let cached = assemble(&bench.nodes, &bench.geometry, bench.exact.as_ref(), &cfg).unwrap();
        cfg.use_cache = false;
        let plain = assemble(&bench.nodes, &bench.geometry, bench.exact.as_ref(), &cfg).unwrap();
        let same_pattern = cached.cols == plain.cols && cached.row_ptr == plain.row_ptr;
        let gap = cached.vals.iter().zip(&plain.vals).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        checks.check(same_pattern && gap <= 1e-14, format!("{method}: max |K_cached - K| = {gap:.1e}"));
        let hits = cached.stats.cache_hits;
        checks.check(hits == modal - 1, format!("{method}: {hits} hits = {modal} - 1"));
        checks.check(plain.stats.cache_hits == 0, format!("{method}: uncached run has no hits"));
    }
    runtime(&mut checks, start, 60.0);
    checks.finish()
}

fn main() -> ExitCode {
    let beams: Vec<Benchmark> = (0..3).map(beam_level).collect();
    let mut shared = None;
    let criteria: Vec<Criterion<'_>> = vec![
        ("polynomial reproduction", Box::new(reproduction)),
        ("patch tests", Box::new(patch_tests)),
        ("exact quadrature", Box::new(exact_quadrature)),
        ("beam convergence", Box::new(|| beam_convergence(&beams))),
        ("plate stress concentration", Box::new(plate_concentration)),
        ("Boussinesq profiles and counts", Box::new(|| boussinesq(&mut shared))),
    ];
    let mut failed = 0;
    let mut report = |n: usize, name: &str, outcome: Outcome| {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n} {tag} {name}: {detail}");
    };
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        report(i + 1, name, run());
    }
    report(7, "cost ratio", cost_ratio(&beams, shared.take()));
    report(8, "cache equivalence", cache_equivalence(&beams));
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria failed");
        ExitCode::FAILURE
    }
}
