//! Closed-form benchmark solutions, error metrics and convergence drivers.

mod exact;
mod metrics;
mod problems;
mod study;

pub use exact::{BeamSolution, BoussinesqSolution, ExactSolution, PlateSolution, PolynomialSolution};
pub use metrics::{csv_number, relative_errors, relative_norm, ErrorReport, NumericalField, Profile};
pub use problems::{
    beam_benchmark, beam_grid, boussinesq_benchmark, manufactured_benchmark, manufactured_field, plate_benchmark,
    Benchmark, EvaluationMesh, ProblemKind, BEAM_DEPTH, BEAM_LENGTH, BOUSSINESQ_INNER, BOUSSINESQ_NODES,
    BOUSSINESQ_RADIUS, PLATE_HALF_WIDTH, PLATE_HOLE,
};
pub use study::{
    convergence_study, estimated_order, profiles, recovery, run_level, ConvergenceTable, LevelRun, StudyRow,
};
