use nalgebra::DMatrix;

use crate::approx::{mls_shape, GaussianWeight, MomentSystem, PolyBasis};
use crate::benchmarks::ExactSolution;
use crate::elasticity::{sandwich, traction, VoigtMatrix};
use crate::error::Result;
use crate::geometry::{add, scale, DomainGeometry, PieceLocation, Point, Region, Subdomain};
use crate::quadrature::{rule_clipped, rule_piece};

/// Shared, read-only inputs of every row builder.
pub struct RowContext<'a> {
    pub basis: PolyBasis,
    pub data: &'a dyn ExactSolution,
    pub geometry: &'a DomainGeometry,
    pub voigt: VoigtMatrix,
    /// Profile of the disk/ball test function.
    pub weight: GaussianWeight,
}

impl<'a> RowContext<'a> {
    pub fn new(
        basis: PolyBasis,
        data: &'a dyn ExactSolution,
        geometry: &'a DomainGeometry,
        weight: GaussianWeight,
    ) -> Self {
        let voigt = data.material().voigt();
        Self { basis, data, geometry, voigt, weight }
    }

    fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Gradients of all shifted basis functions at local offset `y`.
    fn basis_gradients(&self, y: &Point, delta: f64, out: &mut [Vec<f64>; 3]) {
        self.basis.gradient_into(&scale(y, 1.0 / delta), out);
        for g in out.iter_mut().take(self.dim()) {
            g.iter_mut().for_each(|v| *v /= delta);
        }
    }

    fn prescribed(&self, location: PieceLocation) -> Option<[bool; 3]> {
        match location {
            PieceLocation::Interior => None,
            PieceLocation::Boundary(f) => Some(self.geometry.faces()[f].prescribed),
        }
    }
}

/// Test function of DMLPG1/MLPG1 on a subdomain, in local coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestFunction {
    /// `prod_a (1 - 4 y_a^2 / s^2)` on a box of side `s`.
    Bubble { side: f64 },
    /// The Gaussian weight profile with support equal to the radius.
    Gaussian { radius: f64, weight: GaussianWeight },
}

impl TestFunction {
    pub fn for_subdomain(sub: &Subdomain, weight: GaussianWeight) -> Self {
        match sub.region {
            Region::Rect { .. } => TestFunction::Bubble { side: sub.size },
            _ => TestFunction::Gaussian { radius: sub.size, weight },
        }
    }

    /// Value and gradient at local offset `y`.
    pub fn eval(&self, y: &Point, dim: usize) -> (f64, Point) {
        match *self {
            TestFunction::Bubble { side } => {
                let h2 = 0.25 * side * side;
                let f: Vec<f64> = (0..dim).map(|a| 1.0 - y[a] * y[a] / h2).collect();
                let mut grad = [0.0; 3];
                for a in 0..dim {
                    let mut g = -2.0 * y[a] / h2;
                    for b in (0..dim).filter(|&b| b != a) {
                        g *= f[b];
                    }
                    grad[a] = g;
                }
                (f.iter().product(), grad)
            }
            TestFunction::Gaussian { radius, weight } => {
                let r = crate::geometry::norm(y);
                let v = weight.value(r / radius);
                if r == 0.0 {
                    return (v, [0.0; 3]);
                }
                let f = weight.derivative(r / radius) / (radius * r);
                (v, [f * y[0], f * y[1], f * y[2]])
            }
        }
    }
}

/// A weak-form functional applied to the shifted basis: `lambda` is the
/// `d x dQ` matrix whose entry `(i, n d + j)` is row `i` of the functional
/// applied to `p_n e_j`; `beta` is its right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalRow {
    pub node: usize,
    pub dim: usize,
    pub q: usize,
    /// Row-major storage of the `d x dQ` matrix.
    pub lambda: Vec<f64>,
    pub beta: [f64; 3],
}

/// One global matrix row: sorted global columns with values and its
/// right-hand side.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlockRow {
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
    pub rhs: f64,
}

impl BlockRow {
    pub fn scale(&mut self, s: f64) {
        self.vals.iter_mut().for_each(|v| *v *= s);
        self.rhs *= s;
    }
}

impl FunctionalRow {
    pub fn new(node: usize, dim: usize, q: usize, lambda: Vec<f64>, beta: [f64; 3]) -> Self {
        debug_assert_eq!(lambda.len(), dim * dim * q);
        Self { node, dim, q, lambda, beta }
    }

    pub fn entry(&self, i: usize, n: usize, j: usize) -> f64 {
        self.lambda[i * self.dim * self.q + n * self.dim + j]
    }

    pub fn lambda_matrix(&self) -> DMatrix<f64> {
        let w = self.dim * self.q;
        DMatrix::from_fn(self.dim, w, |i, c| self.lambda[i * w + c])
    }

    /// `A_k = lambda_k(p) Phi`: the rows of the global matrix, with
    /// `A_kl[i][j] = sum_n lambda[i][n d + j] phi[n][l]`.
    pub fn scatter(&self, sys: &MomentSystem) -> Vec<BlockRow> {
        let d = self.dim;
        let phi = sys.phi();
        let active = sys.active();
        // Columns sorted by global DOF: active indices are sorted.
        let mut rows = Vec::with_capacity(d);
        for i in 0..d {
            let mut row = BlockRow {
                cols: Vec::with_capacity(d * active.len()),
                vals: Vec::with_capacity(d * active.len()),
                rhs: self.beta[i],
            };
            for (l, &node) in active.iter().enumerate() {
                for j in 0..d {
                    let mut v = 0.0;
                    for n in 0..self.q {
                        v += self.entry(i, n, j) * phi[(n, l)];
                    }
                    row.cols.push(d * node + j);
                    row.vals.push(v);
                }
            }
            rows.push(row);
        }
        rows
    }
}

/// `lambda_k(p)` for DMLPG1: `-int eps_v D P_n` over the subdomain plus the
/// traction of `p_n e_j` on boundary pieces whose component is prescribed.
pub fn dmlpg1_lambda(sub: &Subdomain, delta: f64, rc: &RowContext<'_>, points: usize) -> Result<Vec<f64>> {
    let dim = rc.dim();
    let q = rc.basis.len();
    let width = dim * q;
    let mut lambda = vec![0.0; dim * width];
    let test = TestFunction::for_subdomain(sub, rc.weight);
    let mut g = [vec![0.0; q], vec![0.0; q], vec![0.0; q]];

    let rule = rule_clipped(sub, dim, points)?;
    for (y, w) in rule.points.iter().zip(&rule.weights) {
        let (_, gv) = test.eval(y, dim);
        rc.basis_gradients(y, delta, &mut g);
        for n in 1..q {
            let gp = [g[0][n], g[1][n], g[2][n]];
            let blk = sandwich(&gv, &rc.voigt, &gp, dim);
            for i in 0..dim {
                for j in 0..dim {
                    lambda[i * width + n * dim + j] -= w * blk[i][j];
                }
            }
        }
    }
    for piece in &sub.pieces {
        let Some(mask) = rc.prescribed(piece.location) else { continue };
        if !mask[..dim].iter().any(|&m| m) {
            continue;
        }
        let rule = rule_piece(piece, dim, points)?;
        for ((y, w), nrm) in rule.points.iter().zip(&rule.weights).zip(&rule.normals) {
            let (v, _) = test.eval(y, dim);
            rc.basis_gradients(y, delta, &mut g);
            for n in 1..q {
                let gp = [g[0][n], g[1][n], g[2][n]];
                let blk = sandwich(nrm, &rc.voigt, &gp, dim);
                for i in (0..dim).filter(|&i| mask[i]) {
                    for j in 0..dim {
                        lambda[i * width + n * dim + j] += w * v * blk[i][j];
                    }
                }
            }
        }
    }
    Ok(lambda)
}

/// `beta_k` for DMLPG1: `-int b v - int t v` over pieces of the domain
/// boundary where the traction component is given.
pub fn dmlpg1_beta(sub: &Subdomain, rc: &RowContext<'_>, points: usize) -> Result<[f64; 3]> {
    let dim = rc.dim();
    let test = TestFunction::for_subdomain(sub, rc.weight);
    let mut beta = [0.0; 3];
    let rule = rule_clipped(sub, dim, points)?;
    for (y, w) in rule.points.iter().zip(&rule.weights) {
        let (v, _) = test.eval(y, dim);
        let b = rc.data.body_force(&add(&sub.center, y));
        for i in 0..dim {
            beta[i] -= w * v * b[i];
        }
    }
    traction_terms(sub, rc, points, &mut beta, |y| test.eval(y, dim).0)?;
    Ok(beta)
}

fn traction_terms(
    sub: &Subdomain,
    rc: &RowContext<'_>,
    points: usize,
    beta: &mut [f64; 3],
    v: impl Fn(&Point) -> f64,
) -> Result<()> {
    let dim = rc.dim();
    for piece in &sub.pieces {
        let Some(mask) = rc.prescribed(piece.location) else { continue };
        if mask[..dim].iter().all(|&m| m) {
            continue;
        }
        let rule = rule_piece(piece, dim, points)?;
        for ((y, w), nrm) in rule.points.iter().zip(&rule.weights).zip(&rule.normals) {
            let t = traction(&rc.data.stress(&add(&sub.center, y)), nrm, dim);
            let vy = v(y);
            for i in (0..dim).filter(|&i| !mask[i]) {
                beta[i] -= w * vy * t[i];
            }
        }
    }
    Ok(())
}

pub fn dmlpg1_row(sub: &Subdomain, delta: f64, rc: &RowContext<'_>, points: usize) -> Result<FunctionalRow> {
    let lambda = dmlpg1_lambda(sub, delta, rc, points)?;
    let beta = dmlpg1_beta(sub, rc, points)?;
    Ok(FunctionalRow::new(sub.node, rc.dim(), rc.basis.len(), lambda, beta))
}

/// `lambda_k(p)` for DMLPG5: the traction of `p_n e_j` integrated over the
/// interior pieces and over boundary pieces with the component prescribed.
pub fn dmlpg5_lambda(sub: &Subdomain, delta: f64, rc: &RowContext<'_>, points: usize) -> Result<Vec<f64>> {
    let dim = rc.dim();
    let q = rc.basis.len();
    let width = dim * q;
    let mut lambda = vec![0.0; dim * width];
    let mut g = [vec![0.0; q], vec![0.0; q], vec![0.0; q]];
    for piece in &sub.pieces {
        let mask = rc.prescribed(piece.location).unwrap_or([true; 3]);
        if !mask[..dim].iter().any(|&m| m) {
            continue;
        }
        let rule = rule_piece(piece, dim, points)?;
        for ((y, w), nrm) in rule.points.iter().zip(&rule.weights).zip(&rule.normals) {
            rc.basis_gradients(y, delta, &mut g);
            for n in 1..q {
                let gp = [g[0][n], g[1][n], g[2][n]];
                let blk = sandwich(nrm, &rc.voigt, &gp, dim);
                for i in (0..dim).filter(|&i| mask[i]) {
                    for j in 0..dim {
                        lambda[i * width + n * dim + j] += w * blk[i][j];
                    }
                }
            }
        }
    }
    Ok(lambda)
}

/// `beta_k` for DMLPG5: `-int b - int t` over traction pieces.
pub fn dmlpg5_beta(sub: &Subdomain, rc: &RowContext<'_>, points: usize) -> Result<[f64; 3]> {
    let dim = rc.dim();
    let mut beta = [0.0; 3];
    let rule = rule_clipped(sub, dim, points)?;
    for (y, w) in rule.points.iter().zip(&rule.weights) {
        let b = rc.data.body_force(&add(&sub.center, y));
        for i in 0..dim {
            beta[i] -= w * b[i];
        }
    }
    traction_terms(sub, rc, points, &mut beta, |_| 1.0)?;
    Ok(beta)
}

pub fn dmlpg5_row(sub: &Subdomain, delta: f64, rc: &RowContext<'_>, points: usize) -> Result<FunctionalRow> {
    let lambda = dmlpg5_lambda(sub, delta, rc, points)?;
    let beta = dmlpg5_beta(sub, rc, points)?;
    Ok(FunctionalRow::new(sub.node, rc.dim(), rc.basis.len(), lambda, beta))
}

/// MLS collocation of displacement component `i` at the center of `sys`.
pub fn collocation_row(sys: &MomentSystem, i: usize, dim: usize, value: f64) -> BlockRow {
    let a = mls_shape(sys);
    BlockRow { cols: sys.active().iter().map(|&node| dim * node + i).collect(), vals: a, rhs: value }
}

/// Replaces the rows of prescribed components by collocation rows.
pub fn mixed_bc_replace(
    mut rows: Vec<BlockRow>,
    prescribed: &[bool; 3],
    sys: &MomentSystem,
    u: &[f64; 3],
) -> Vec<BlockRow> {
    let dim = rows.len();
    for i in (0..dim).filter(|&i| prescribed[i]) {
        rows[i] = collocation_row(sys, i, dim, u[i]);
    }
    rows
}
