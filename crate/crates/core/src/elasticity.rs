//! Isotropic linear elasticity in Voigt notation.
//!
//! Strain and stress vectors are ordered `[11, 22, 12]` in 2D and
//! `[11, 22, 33, 23, 13, 12]` in 3D, with engineering shear strains.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StressMode {
    PlaneStress,
    PlaneStrain,
    Solid,
}

impl StressMode {
    pub fn dim(self) -> usize {
        match self {
            StressMode::Solid => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material {
    pub young: f64,
    pub poisson: f64,
    pub mode: StressMode,
}

/// Constitutive matrix stored in a fixed 6x6 array; only the leading
/// `len x len` block is used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoigtMatrix {
    pub len: usize,
    pub m: [[f64; 6]; 6],
}

pub fn voigt_len(dim: usize) -> usize {
    if dim == 2 {
        3
    } else {
        6
    }
}

impl Material {
    pub fn new(young: f64, poisson: f64, mode: StressMode) -> Result<Self> {
        if !(young > 0.0) || !young.is_finite() {
            return Err(Error::InvalidArgument(format!("Young's modulus must be positive, got {young}")));
        }
        if !(0.0..0.5).contains(&poisson) {
            return Err(Error::InvalidArgument(format!("Poisson ratio must lie in [0, 0.5), got {poisson}")));
        }
        Ok(Self { young, poisson, mode })
    }

    pub fn dim(&self) -> usize {
        self.mode.dim()
    }

    /// `(E_bar, nu_bar)` entering the 2D formulas; `(E, nu)` in 3D.
    pub fn effective(&self) -> (f64, f64) {
        let (e, nu) = (self.young, self.poisson);
        match self.mode {
            StressMode::PlaneStrain => (e / (1.0 - nu * nu), nu / (1.0 - nu)),
            _ => (e, nu),
        }
    }

    pub fn shear_modulus(&self) -> f64 {
        self.young / (2.0 * (1.0 + self.poisson))
    }

    pub fn voigt(&self) -> VoigtMatrix {
        let mut m = [[0.0; 6]; 6];
        match self.mode {
            StressMode::Solid => {
                let (e, nu) = (self.young, self.poisson);
                let c = e / ((1.0 - 2.0 * nu) * (1.0 + nu));
                for i in 0..3 {
                    for j in 0..3 {
                        m[i][j] = c * if i == j { 1.0 - nu } else { nu };
                    }
                    m[3 + i][3 + i] = e / (2.0 * (1.0 + nu));
                }
                VoigtMatrix { len: 6, m }
            }
            _ => {
                let (e, nu) = self.effective();
                let c = e / (1.0 - nu * nu);
                m[0][0] = c;
                m[1][1] = c;
                m[0][1] = c * nu;
                m[1][0] = c * nu;
                m[2][2] = c * (1.0 - nu) / 2.0;
                VoigtMatrix { len: 3, m }
            }
        }
    }
}

impl VoigtMatrix {
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.len).map(|i| (0..self.len).map(|j| self.m[i][j] * v[j]).sum()).collect()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len, self.len, |i, j| self.m[i][j])
    }
}

/// The stress-strain matrix `D`.
pub fn elastic_matrix(material: &Material) -> DMatrix<f64> {
    material.voigt().to_dmatrix()
}

/// The `d x len` operator with the layout of the normal matrix, filled with
/// the components of `a`. With `a = n` it maps stress to traction; with
/// `a = grad v` it is the test-function strain matrix; its transpose with
/// `a = grad p` is the polynomial strain matrix.
pub(crate) fn operator(a: &Point, dim: usize) -> [[f64; 6]; 3] {
    let mut n = [[0.0; 6]; 3];
    if dim == 2 {
        n[0][0] = a[0];
        n[0][2] = a[1];
        n[1][1] = a[1];
        n[1][2] = a[0];
    } else {
        n[0][0] = a[0];
        n[0][4] = a[2];
        n[0][5] = a[1];
        n[1][1] = a[1];
        n[1][3] = a[2];
        n[1][5] = a[0];
        n[2][2] = a[2];
        n[2][3] = a[1];
        n[2][4] = a[0];
    }
    n
}

/// `operator(a) D operator(b)^T`, a `d x d` block.
pub(crate) fn sandwich(a: &Point, d: &VoigtMatrix, b: &Point, dim: usize) -> [[f64; 3]; 3] {
    let na = operator(a, dim);
    let nb = operator(b, dim);
    let len = d.len;
    let mut out = [[0.0; 3]; 3];
    for i in 0..dim {
        // row_i = na[i] * D
        let mut row = [0.0; 6];
        for k in 0..len {
            if na[i][k] != 0.0 {
                for l in 0..len {
                    row[l] += na[i][k] * d.m[k][l];
                }
            }
        }
        for j in 0..dim {
            out[i][j] = (0..len).map(|l| row[l] * nb[j][l]).sum();
        }
    }
    out
}

fn to_dmatrix(rows: &[[f64; 6]; 3], dim: usize, transpose: bool) -> DMatrix<f64> {
    let len = voigt_len(dim);
    if transpose {
        DMatrix::from_fn(len, dim, |i, j| rows[j][i])
    } else {
        DMatrix::from_fn(dim, len, |i, j| rows[i][j])
    }
}

/// `P_n`: the strain of the vector field `p_n e_j` in column `j`, given the
/// gradient of the scalar basis function `p_n`.
pub fn strain_basis(grad_p: &Point, dim: usize) -> DMatrix<f64> {
    to_dmatrix(&operator(grad_p, dim), dim, true)
}

/// `eps_v` for equal test functions in every component.
pub fn test_strain(grad_v: &Point, dim: usize) -> DMatrix<f64> {
    to_dmatrix(&operator(grad_v, dim), dim, false)
}

/// `N` such that `N sigma` is the traction across a surface with unit
/// normal `n`.
pub fn normal_matrix(n: &Point, dim: usize) -> Result<DMatrix<f64>> {
    let len2: f64 = n[..dim].iter().map(|c| c * c).sum();
    if (len2.sqrt() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("normal {n:?} is not a unit vector")));
    }
    Ok(to_dmatrix(&operator(n, dim), dim, false))
}

/// Voigt strain from a displacement gradient `g[i][j] = d u_i / d x_j`.
pub fn strain_from_gradient(g: &[[f64; 3]; 3], dim: usize) -> Vec<f64> {
    if dim == 2 {
        vec![g[0][0], g[1][1], g[0][1] + g[1][0]]
    } else {
        vec![g[0][0], g[1][1], g[2][2], g[1][2] + g[2][1], g[0][2] + g[2][0], g[0][1] + g[1][0]]
    }
}

/// Traction `sigma n` from a Voigt stress.
pub fn traction(stress: &[f64], n: &Point, dim: usize) -> [f64; 3] {
    let op = operator(n, dim);
    let mut t = [0.0; 3];
    for i in 0..dim {
        t[i] = (0..stress.len()).map(|k| op[i][k] * stress[k]).sum();
    }
    t
}

/// Von Mises equivalent stress. A 2D stress is taken with `sigma_33 = 0`.
pub fn von_mises(stress: &[f64]) -> f64 {
    match stress.len() {
        3 => {
            let (a, b, s) = (stress[0], stress[1], stress[2]);
            (a * a - a * b + b * b + 3.0 * s * s).sqrt()
        }
        _ => {
            let (a, b, c) = (stress[0], stress[1], stress[2]);
            let (s23, s13, s12) = (stress[3], stress[4], stress[5]);
            (0.5 * ((a - b).powi(2) + (b - c).powi(2) + (c - a).powi(2)) + 3.0 * (s23 * s23 + s13 * s13 + s12 * s12))
                .sqrt()
        }
    }
}
