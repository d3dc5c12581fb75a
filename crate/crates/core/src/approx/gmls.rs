use nalgebra::{DMatrix, DVector};

use super::{scaled, GaussianWeight, PolyBasis};
use crate::error::{Error, Result};
use crate::geometry::{dist, NeighborGrid, Point};

/// Moment matrices whose diagonal-ratio estimate exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Point cloud plus the basis and weight used for every local fit.
#[derive(Clone, Debug)]
pub struct MlsContext<'a> {
    pub points: &'a [Point],
    pub grid: &'a NeighborGrid,
    pub basis: PolyBasis,
    pub weight: GaussianWeight,
}

impl<'a> MlsContext<'a> {
    pub fn new(points: &'a [Point], grid: &'a NeighborGrid, basis: PolyBasis, weight: GaussianWeight) -> Self {
        Self { points, grid, basis, weight }
    }

    /// Factorizes the weighted moment matrix at `x` with support `delta`.
    pub fn moment_system(&self, x: &Point, delta: f64) -> Result<MomentSystem> {
        let candidates = self.grid.query(x, delta);
        MomentSystem::new(x, delta, &candidates, self.points, &self.basis, &self.weight)
    }
}

/// Local weighted least-squares system `A = P^T W P` at a center `x`, in
/// the shifted basis `p((y - x) / delta)`. Every functional `lambda` is then
/// approximated by the row `lambda(p)^T A^{-1} P^T W`.
#[derive(Clone, Debug)]
pub struct MomentSystem {
    center: Point,
    delta: f64,
    active: Vec<usize>,
    weights: Vec<f64>,
    /// Row-major `n x Q` matrix of basis values at the active nodes.
    p: Vec<f64>,
    q: usize,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    condition: f64,
}

impl MomentSystem {
    /// Builds the system from candidate neighbor indices; nodes with zero
    /// weight are dropped.
    pub fn new(
        x: &Point,
        delta: f64,
        candidates: &[usize],
        points: &[Point],
        basis: &PolyBasis,
        weight: &GaussianWeight,
    ) -> Result<Self> {
        let q = basis.len();
        let mut active = Vec::with_capacity(candidates.len());
        let mut weights = Vec::with_capacity(candidates.len());
        for &j in candidates {
            let w = weight.value(dist(x, &points[j]) / delta);
            if w > 0.0 {
                active.push(j);
                weights.push(w);
            }
        }
        let n = active.len();
        let deficient = |condition: f64| Error::NodeDeficiency { point: *x, active: n, condition };
        if n < q {
            return Err(deficient(f64::INFINITY));
        }
        let mut p = vec![0.0; n * q];
        for (row, &j) in active.iter().enumerate() {
            basis.eval_into(&scaled(&points[j], x, delta), &mut p[row * q..(row + 1) * q]);
        }
        let mut a = DMatrix::<f64>::zeros(q, q);
        for row in 0..n {
            let pr = &p[row * q..(row + 1) * q];
            let w = weights[row];
            for c in 0..q {
                let wc = w * pr[c];
                for r in c..q {
                    a[(r, c)] += wc * pr[r];
                }
            }
        }
        for c in 0..q {
            for r in 0..c {
                a[(r, c)] = a[(c, r)];
            }
        }
        let chol = a.cholesky().ok_or_else(|| deficient(f64::INFINITY))?;
        let diag = chol.l_dirty().diagonal();
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
        let condition = (hi / lo).powi(2);
        if !(condition <= MAX_CONDITION) {
            return Err(deficient(condition));
        }
        Ok(Self { center: *x, delta, active, weights, p, q, chol, condition })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn basis_len(&self) -> usize {
        self.q
    }

    /// Basis values `p((x_j - x) / delta)` at active node `row`.
    pub fn basis_row(&self, row: usize) -> &[f64] {
        &self.p[row * self.q..(row + 1) * self.q]
    }

    /// `A^{-1} v`.
    pub fn solve_moment(&self, v: &[f64]) -> Vec<f64> {
        let mut b = DVector::from_column_slice(v);
        self.chol.solve_mut(&mut b);
        b.as_slice().to_vec()
    }

    /// Coefficients `a_j(lambda)` over the active nodes for a functional
    /// whose action on the shifted basis is `lambda_p`.
    pub fn apply(&self, lambda_p: &[f64]) -> Vec<f64> {
        let y = self.solve_moment(lambda_p);
        (0..self.active.len()).map(|row| self.weights[row] * dot(self.basis_row(row), &y)).collect()
    }

    /// The `Q x n` matrix `phi = A^{-1} P^T W`, column `j` belonging to
    /// active node `j`.
    pub fn phi(&self) -> DMatrix<f64> {
        let n = self.active.len();
        let mut rhs = DMatrix::<f64>::zeros(self.q, n);
        for row in 0..n {
            for c in 0..self.q {
                rhs[(c, row)] = self.weights[row] * self.p[row * self.q + c];
            }
        }
        self.chol.solve_mut(&mut rhs);
        rhs
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// MLS shape function values `a_j(x)` at the center of the system.
pub fn mls_shape(system: &MomentSystem) -> Vec<f64> {
    let mut e = vec![0.0; system.q];
    e[0] = 1.0;
    system.apply(&e)
}

/// Shape coefficients for a general functional given its action on the
/// shifted basis.
pub fn gmls_row(system: &MomentSystem, lambda_p: &[f64]) -> Result<Vec<f64>> {
    if lambda_p.len() != system.q {
        return Err(Error::InvalidArgument(format!(
            "functional has {} basis entries, expected {}",
            lambda_p.len(),
            system.q
        )));
    }
    Ok(system.apply(lambda_p))
}

/// GMLS derivative `D^alpha u(x)` at the center of the system. In the
/// shifted basis only the monomial `z^alpha` has a nonzero derivative at the
/// origin, equal to `alpha! / delta^|alpha|`.
pub fn gmls_derivative_row(system: &MomentSystem, basis: &PolyBasis, alpha: [u8; 3]) -> Result<Vec<f64>> {
    let order: i32 = alpha.iter().map(|&a| a as i32).sum();
    let idx = basis.index_of(alpha).ok_or_else(|| {
        Error::InvalidArgument(format!("derivative {alpha:?} exceeds basis degree {}", basis.degree()))
    })?;
    let factorial: f64 = alpha.iter().map(|&a| (1..=a as u32).product::<u32>() as f64).product();
    let mut lambda = vec![0.0; system.q];
    lambda[idx] = factorial / system.delta.powi(order);
    Ok(system.apply(&lambda))
}
