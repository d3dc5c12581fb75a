use std::f64::consts::FRAC_PI_4;
use std::io::Write;

use super::exact::ExactSolution;
use super::metrics::{csv_number, relative_errors, ErrorReport, Profile};
use super::problems::{Benchmark, ProblemKind, BEAM_DEPTH, BEAM_LENGTH, PLATE_HALF_WIDTH, PLATE_HOLE};
use crate::assembly::{assemble, solve, AssemblyConfig, AssemblyStats, FieldRecovery, Solution};
use crate::elasticity::von_mises;
use crate::error::{Error, Result};
use crate::mlpg::assemble_mlpg;

/// Outcome of one discretization level.
#[derive(Clone, Debug)]
pub struct LevelRun {
    pub h: f64,
    pub n_nodes: usize,
    pub stats: AssemblyStats,
    pub solution: Solution,
    pub report: ErrorReport,
}

/// Assembles with the method named in `config`, solves, and measures errors
/// on the benchmark's evaluation mesh.
pub fn run_level(bench: &Benchmark, config: &AssemblyConfig) -> Result<LevelRun> {
    let system = if config.method.is_direct() {
        assemble(&bench.nodes, &bench.geometry, bench.exact.as_ref(), config)?
    } else {
        assemble_mlpg(&bench.nodes, &bench.geometry, bench.exact.as_ref(), config)?
    };
    let solution = solve(&system)?;
    let recovery = recovery(bench, &solution, config)?;
    let mut report = relative_errors(&recovery, bench.exact.as_ref(), &bench.eval)?;
    report.assembly_seconds = system.stats.assembly_seconds;
    report.solve_seconds = solution.solve_seconds;
    report.shape_evaluations = system.stats.shape_evaluations;
    Ok(LevelRun { h: bench.nodes.mesh_size(), n_nodes: bench.nodes.len(), stats: system.stats, solution, report })
}

pub fn recovery<'a>(
    bench: &'a Benchmark,
    solution: &'a Solution,
    config: &AssemblyConfig,
) -> Result<FieldRecovery<'a>> {
    FieldRecovery::new(&bench.nodes, solution, bench.material(), config.degree, config.epsilon)
}

/// Observed order `log(e0 / e1) / log(h0 / h1)`; NaN when the spacings agree.
pub fn estimated_order(h0: f64, e0: f64, h1: f64, e1: f64) -> f64 {
    if h0 == h1 {
        return f64::NAN;
    }
    (e0 / e1).ln() / (h0 / h1).ln()
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub h: f64,
    pub n_nodes: usize,
    pub report: ErrorReport,
    /// Order against the previous row; NaN on the first.
    pub order_u: f64,
    pub order_eps: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<StudyRow>,
}

impl ConvergenceTable {
    pub const HEADER: &'static str = "h,N,r_u,r_eps,t_assemble_s,t_solve_s,shape_evals,order_u,order_eps";

    pub fn from_levels(levels: Vec<(f64, usize, ErrorReport)>) -> Self {
        let mut rows: Vec<StudyRow> = Vec::with_capacity(levels.len());
        for (h, n_nodes, report) in levels {
            let (order_u, order_eps) = match rows.last() {
                Some(p) => (
                    estimated_order(p.h, p.report.r_u, h, report.r_u),
                    estimated_order(p.h, p.report.r_eps, h, report.r_eps),
                ),
                None => (f64::NAN, f64::NAN),
            };
            rows.push(StudyRow { h, n_nodes, report, order_u, order_eps });
        }
        Self { rows }
    }

    /// Order between the first and last rows.
    pub fn overall_order(&self) -> (f64, f64) {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) if self.rows.len() > 1 => (
                estimated_order(a.h, a.report.r_u, b.h, b.report.r_u),
                estimated_order(a.h, a.report.r_eps, b.h, b.report.r_eps),
            ),
            _ => (f64::NAN, f64::NAN),
        }
    }

    /// Writes the table; wall times are omitted when `timings` is false so
    /// that repeated runs produce identical bytes.
    pub fn write_csv<W: Write>(&self, mut out: W, timings: bool) -> Result<()> {
        writeln!(out, "{}", Self::HEADER)?;
        for r in &self.rows {
            let (ta, ts) =
                if timings { (r.report.assembly_seconds, r.report.solve_seconds) } else { (f64::NAN, f64::NAN) };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                csv_number(r.h),
                r.n_nodes,
                csv_number(r.report.r_u),
                csv_number(r.report.r_eps),
                csv_number(ta),
                csv_number(ts),
                r.report.shape_evaluations,
                csv_number(r.order_u),
                csv_number(r.order_eps),
            )?;
        }
        Ok(())
    }
}

/// Runs every level and tabulates errors with observed orders.
pub fn convergence_study(levels: &[Benchmark], config: &AssemblyConfig) -> Result<ConvergenceTable> {
    if levels.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a convergence study needs at least 2 levels, got {}",
            levels.len()
        )));
    }
    let mut out = Vec::with_capacity(levels.len());
    for bench in levels {
        let run = run_level(bench, config)?;
        out.push((run.h, run.n_nodes, run.report));
    }
    Ok(ConvergenceTable::from_levels(out))
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

fn header(coord: &str, fields: &[&str]) -> Vec<String> {
    let mut h = vec![coord.to_string()];
    for f in fields {
        h.push(format!("numerical_{f}"));
        h.push(format!("exact_{f}"));
    }
    h
}

/// Line profiles comparing recovered and exact fields for the benchmark.
pub fn profiles(bench: &Benchmark, recovery: &FieldRecovery<'_>) -> Result<Vec<Profile>> {
    let exact: &dyn ExactSolution = bench.exact.as_ref();
    match bench.kind {
        ProblemKind::Beam => {
            let x1 = 0.5 * BEAM_LENGTH;
            let mut rows = Vec::new();
            for x2 in linspace(0.0, BEAM_DEPTH, 21) {
                let x = [x1, x2, 0.0];
                let (s, se) = (recovery.stress(&x)?, exact.stress(&x));
                rows.push(vec![x2, s[0], se[0], s[2], se[2]]);
            }
            Ok(vec![Profile { name: "beam_stress_x1_4".into(), header: header("x2", &["s11", "s12"]), rows }])
        }
        ProblemKind::Plate => {
            let mut rows = Vec::new();
            for x2 in linspace(PLATE_HOLE, PLATE_HALF_WIDTH, 31) {
                let x = [0.0, x2, 0.0];
                rows.push(vec![x2, recovery.stress(&x)?[0], exact.stress(&x)[0]]);
            }
            Ok(vec![Profile { name: "plate_s11_x1_0".into(), header: header("x2", &["s11"]), rows }])
        }
        ProblemKind::Boussinesq => {
            let (c, s) = (FRAC_PI_4.cos(), FRAC_PI_4.sin());
            let (mut disp, mut vm) = (Vec::new(), Vec::new());
            for r in linspace(0.5, 5.0, 46) {
                let x = [r * c, r * s, 0.0];
                let (u, ue) = (recovery.displacement(&x)?, exact.displacement(&x));
                let radial = |u: [f64; 3]| u[0] * c + u[1] * s;
                disp.push(vec![r, radial(u), radial(ue), u[2], ue[2]]);
                vm.push(vec![r, von_mises(&recovery.stress(&x)?), von_mises(&exact.stress(&x))]);
            }
            Ok(vec![
                Profile {
                    name: "boussinesq_surface_displacement".into(),
                    header: header("r", &["u_r", "w"]),
                    rows: disp,
                },
                Profile { name: "boussinesq_surface_von_mises".into(), header: header("r", &["von_mises"]), rows: vm },
            ])
        }
        ProblemKind::Manufactured => {
            let mut rows = Vec::new();
            for t in linspace(0.0, 1.0, 21) {
                let x = [t, 0.5, if bench.nodes.dim() == 3 { 0.5 } else { 0.0 }];
                rows.push(vec![t, recovery.displacement(&x)?[0], exact.displacement(&x)[0]]);
            }
            Ok(vec![Profile { name: "manufactured_u1".into(), header: header("x1", &["u1"]), rows }])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Method;
    use crate::benchmarks::{beam_benchmark, manufactured_benchmark};

    #[test]
    fn identical_levels_give_undefined_order() {
        let r = ErrorReport { r_u: 0.1, r_eps: 0.2, ..Default::default() };
        let t = ConvergenceTable::from_levels(vec![(0.5, 10, r.clone()), (0.5, 10, r)]);
        assert!(t.rows[1].order_u.is_nan() && t.rows[1].order_eps.is_nan());
        let mut out = Vec::new();
        t.write_csv(&mut out, false).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(2).unwrap().ends_with(",nan,nan"));
    }

    #[test]
    fn orders_follow_log_ratios() {
        assert!((estimated_order(0.2, 4e-2, 0.1, 1e-2) - 2.0).abs() < 1e-12);
        let t = ConvergenceTable::from_levels(vec![
            (0.4, 1, ErrorReport { r_u: 1.6e-1, r_eps: 0.4, ..Default::default() }),
            (0.2, 2, ErrorReport { r_u: 4e-2, r_eps: 0.2, ..Default::default() }),
            (0.1, 3, ErrorReport { r_u: 1e-2, r_eps: 0.1, ..Default::default() }),
        ]);
        assert!((t.rows[2].order_u - 2.0).abs() < 1e-12);
        let (ou, oe) = t.overall_order();
        assert!((ou - 2.0).abs() < 1e-12 && (oe - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polynomial_study_stays_at_round_off() {
        let mat = crate::elasticity::Material::new(1.0, 0.25, crate::elasticity::StressMode::PlaneStress).unwrap();
        let levels: Vec<Benchmark> =
            [5, 9].iter().map(|&n| manufactured_benchmark(mat, n, 2, 2, 1.5).unwrap()).collect();
        let t = convergence_study(&levels, &AssemblyConfig::new(Method::Dmlpg5)).unwrap();
        for r in &t.rows {
            assert!(r.report.r_u < 1e-9 && r.report.r_eps < 1e-8, "{:?}", r.report);
        }
        assert!(convergence_study(&levels[..1], &AssemblyConfig::new(Method::Dmlpg5)).is_err());
    }

    #[test]
    fn beam_profile_has_numerical_and_exact_columns() {
        let bench = beam_benchmark(33, 5, 2, 2.0).unwrap();
        let cfg = AssemblyConfig::new(Method::Dmlpg1);
        let run = run_level(&bench, &cfg).unwrap();
        let rec = recovery(&bench, &run.solution, &cfg).unwrap();
        let p = profiles(&bench, &rec).unwrap();
        assert_eq!(p[0].header, ["x2", "numerical_s11", "exact_s11", "numerical_s12", "exact_s12"]);
        assert_eq!(p[0].rows.len(), 21);
        assert!(p[0].relative_error(0) < 0.1, "{}", p[0].relative_error(0));
    }
}
