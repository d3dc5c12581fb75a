use std::time::Instant;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use super::GlobalSystem;
use crate::error::{Error, Result};

/// Relative residuals above this are reported as a failed solve.
pub const MAX_RESIDUAL: f64 = 1e-6;

/// Solutions amplifying the data by more than this are treated as coming
/// from a numerically singular matrix.
const MAX_AMPLIFICATION: f64 = 1e13;

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub dim: usize,
    /// Nodal displacements, component `i` of node `k` at `d k + i`.
    pub values: Vec<f64>,
    /// `|K u - R| / |R|` in the 2-norm.
    pub residual: f64,
    pub solve_seconds: f64,
}

impl Solution {
    pub fn n_nodes(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn node(&self, k: usize) -> [f64; 3] {
        let mut u = [0.0; 3];
        u[..self.dim].copy_from_slice(&self.values[self.dim * k..self.dim * (k + 1)]);
        u
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Sparse LU solve of `K u = R`.
pub fn solve(system: &GlobalSystem) -> Result<Solution> {
    let start = Instant::now();
    let n = system.n_rows();
    if n == 0 {
        return Err(Error::InvalidArgument("empty system".into()));
    }
    if system.vals.iter().chain(&system.rhs).any(|v| !v.is_finite()) {
        return Err(Error::Singular("system contains non-finite entries".into()));
    }
    let mut triplets = Vec::with_capacity(system.nnz());
    for r in 0..n {
        let (cols, vals) = system.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            triplets.push(Triplet { row: r, col: c, val: v });
        }
    }
    let k = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::InvalidArgument(format!("invalid sparse structure: {e:?}")))?;
    // The numeric factorization panics on an exactly zero pivot.
    let factored = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| k.sp_lu()))
        .map_err(|_| Error::Singular("numerically singular: exact zero pivot during factorization".into()))?;
    let lu = factored.map_err(|e| match e {
        LuError::SymbolicSingular { index } => {
            Error::Singular(format!("structurally singular, no pivot at elimination step {index} (row {index})"))
        }
        LuError::Generic(e) => Error::Singular(format!("factorization failed: {e:?}")),
    })?;
    let mut x = Mat::from_fn(n, 1, |i, _| system.rhs[i]);
    lu.solve_in_place(x.as_mut());
    let values: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Singular(format!("zero pivot: non-finite solution at dof {i} (node {})", i / system.dim)));
    }
    let r_norm = norm(&system.rhs);
    let ku = system.matvec(&values);
    let diff: Vec<f64> = ku.iter().zip(&system.rhs).map(|(a, b)| a - b).collect();
    let residual = if r_norm > 0.0 { norm(&diff) / r_norm } else { norm(&diff) };
    if r_norm > 0.0 {
        let k_inf = (0..n).map(|r| system.row(r).1.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        let amplification = k_inf * max_abs(&values) / max_abs(&system.rhs);
        if amplification > MAX_AMPLIFICATION {
            let i = values.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map_or(0, |p| p.0);
            return Err(Error::Singular(format!(
                "condition alert: solution amplifies the data by {amplification:.3e}, largest at dof {i} (node {})",
                i / system.dim
            )));
        }
    }
    if !(residual <= MAX_RESIDUAL) {
        return Err(Error::Singular(format!("relative residual {residual:.3e} after factorization")));
    }
    Ok(Solution { dim: system.dim, values, residual, solve_seconds: start.elapsed().as_secs_f64() })
}
