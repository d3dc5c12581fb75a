use std::io::Write;

use super::exact::ExactSolution;
use super::problems::EvaluationMesh;
use crate::assembly::FieldRecovery;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Any field approximation that can be compared with an exact solution.
pub trait NumericalField {
    fn displacement(&self, x: &Point) -> Result<[f64; 3]>;
    /// Voigt strain with engineering shears.
    fn strain(&self, x: &Point) -> Result<Vec<f64>>;
}

impl NumericalField for FieldRecovery<'_> {
    fn displacement(&self, x: &Point) -> Result<[f64; 3]> {
        FieldRecovery::displacement(self, x)
    }

    fn strain(&self, x: &Point) -> Result<Vec<f64>> {
        FieldRecovery::strain(self, x)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorReport {
    pub r_u: f64,
    pub r_eps: f64,
    pub mesh: String,
    pub n_points: usize,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub shape_evaluations: u64,
}

/// Discrete relative 2-norm errors of displacement and strain over `mesh`.
/// Timing and cost fields are left at zero for the caller to fill.
pub fn relative_errors(
    numerical: &dyn NumericalField,
    exact: &dyn ExactSolution,
    mesh: &EvaluationMesh,
) -> Result<ErrorReport> {
    let dim = exact.dim();
    let (mut du, mut nu, mut de, mut ne) = (0.0, 0.0, 0.0, 0.0);
    for x in &mesh.points {
        let at = |e: Error| {
            Error::InvalidArgument(format!("evaluation at ({:.6}, {:.6}, {:.6}) failed: {e}", x[0], x[1], x[2]))
        };
        let u = numerical.displacement(x).map_err(at)?;
        let ue = exact.displacement(x);
        for i in 0..dim {
            du += (u[i] - ue[i]).powi(2);
            nu += ue[i].powi(2);
        }
        let e = numerical.strain(x).map_err(at)?;
        for (a, b) in e.iter().zip(exact.strain(x)) {
            de += (a - b).powi(2);
            ne += b * b;
        }
    }
    if nu == 0.0 || ne == 0.0 {
        return Err(Error::InvalidArgument(format!("exact field vanishes on {}", mesh.description)));
    }
    Ok(ErrorReport {
        r_u: (du / nu).sqrt(),
        r_eps: (de / ne).sqrt(),
        mesh: mesh.description.clone(),
        n_points: mesh.points.len(),
        ..Default::default()
    })
}

/// Relative discrete 2-norm of `numerical - exact`.
pub fn relative_norm(numerical: &[f64], exact: &[f64]) -> f64 {
    let diff: f64 = numerical.iter().zip(exact).map(|(a, b)| (a - b).powi(2)).sum();
    let base: f64 = exact.iter().map(|b| b * b).sum();
    (diff / base).sqrt()
}

/// Formats a value for CSV output; undefined values are written as `nan`.
pub fn csv_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.10e}")
    }
}

/// Sampled numerical and exact values along a line.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub name: String,
    /// Coordinate column name followed by `numerical_*`/`exact_*` pairs.
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Profile {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| csv_number(*v)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Relative 2-norm error of the numerical column `pair` (0-based).
    pub fn relative_error(&self, pair: usize) -> f64 {
        let num: Vec<f64> = self.rows.iter().map(|r| r[1 + 2 * pair]).collect();
        let ex: Vec<f64> = self.rows.iter().map(|r| r[2 + 2 * pair]).collect();
        relative_norm(&num, &ex)
    }
}
