use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::approx::PolyBasis;
use crate::elasticity::{strain_from_gradient, voigt_len, Material, StressMode};
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Closed-form displacement and stress fields. They double as the source
/// of boundary data and body forces for the discrete problem.
pub trait ExactSolution: Send + Sync {
    fn material(&self) -> &Material;

    fn dim(&self) -> usize {
        self.material().dim()
    }

    fn displacement(&self, x: &Point) -> [f64; 3];

    /// Voigt stress.
    fn stress(&self, x: &Point) -> Vec<f64>;

    /// Voigt (engineering) strain, `D^{-1} sigma` unless overridden.
    fn strain(&self, x: &Point) -> Vec<f64> {
        let d = self.material().voigt().to_dmatrix();
        let s = self.stress(x);
        let n = s.len();
        let sol = d.lu().solve(&DMatrix::from_column_slice(n, 1, &s)).expect("constitutive matrix is invertible");
        sol.as_slice().to_vec()
    }

    /// Body force `b` with `div sigma + b = 0`.
    fn body_force(&self, _x: &Point) -> [f64; 3] {
        [0.0; 3]
    }
}

/// Cantilever of length `L` and depth `D`, clamped at `x1 = 0` and loaded
/// by a parabolic end shear of resultant `P`.
#[derive(Clone, Debug)]
pub struct BeamSolution {
    pub length: f64,
    pub depth: f64,
    pub load: f64,
    pub material: Material,
}

impl BeamSolution {
    pub fn standard() -> Self {
        Self {
            length: 8.0,
            depth: 1.0,
            load: 1.0,
            material: Material { young: 1.0, poisson: 0.25, mode: StressMode::PlaneStress },
        }
    }

    fn inertia(&self) -> f64 {
        self.depth.powi(3) / 12.0
    }
}

impl ExactSolution for BeamSolution {
    fn material(&self) -> &Material {
        &self.material
    }

    fn displacement(&self, x: &Point) -> [f64; 3] {
        let (e, nu) = self.material.effective();
        let (l, d, p) = (self.length, self.depth, self.load);
        let c = p / (6.0 * e * self.inertia());
        let (x1, x2) = (x[0], x[1]);
        let y = x2 - 0.5 * d;
        let u1 = -c * y * (3.0 * x1 * (2.0 * l - x1) + (2.0 + nu) * x2 * (x2 - d));
        let u2 = c * (x1 * x1 * (3.0 * l - x1) + 3.0 * nu * (l - x1) * y * y + (4.0 + 5.0 * nu) / 4.0 * d * d * x1);
        [u1, u2, 0.0]
    }

    fn stress(&self, x: &Point) -> Vec<f64> {
        let (l, d, p, i) = (self.length, self.depth, self.load, self.inertia());
        let s11 = -p / i * (l - x[0]) * (x[1] - 0.5 * d);
        let s12 = -p * x[1] / (2.0 * i) * (x[1] - d);
        vec![s11, 0.0, s12]
    }
}

/// Infinite plate with a hole of radius `a` under remote tension `sigma`
/// along `x1`.
#[derive(Clone, Debug)]
pub struct PlateSolution {
    pub radius: f64,
    pub sigma: f64,
    pub material: Material,
}

impl PlateSolution {
    pub fn standard() -> Self {
        Self {
            radius: 1.0,
            sigma: 1.0,
            material: Material { young: 1.0, poisson: 0.25, mode: StressMode::PlaneStress },
        }
    }
}

impl ExactSolution for PlateSolution {
    fn material(&self) -> &Material {
        &self.material
    }

    fn displacement(&self, x: &Point) -> [f64; 3] {
        let (e, nu) = self.material.effective();
        let a = self.radius;
        let r = x[0].hypot(x[1]);
        let t = x[1].atan2(x[0]);
        let c = (1.0 + nu) / e * self.sigma;
        let a2r = a * a / r;
        let a4r3 = a.powi(4) / r.powi(3);
        let u1 = c
            * (r * t.cos() / (1.0 + nu) + 2.0 / (1.0 + nu) * a2r * t.cos() + 0.5 * a2r * (3.0 * t).cos()
                - 0.5 * a4r3 * (3.0 * t).cos());
        let u2 = c
            * (-nu / (1.0 + nu) * r * t.sin() - (1.0 - nu) / (1.0 + nu) * a2r * t.sin() + 0.5 * a2r * (3.0 * t).sin()
                - 0.5 * a4r3 * (3.0 * t).sin());
        [u1, u2, 0.0]
    }

    fn stress(&self, x: &Point) -> Vec<f64> {
        let a = self.radius;
        let r = x[0].hypot(x[1]);
        let t = x[1].atan2(x[0]);
        let q2 = a * a / (r * r);
        let q4 = 1.5 * a.powi(4) / r.powi(4);
        let (c2, c4, s2, s4) = ((2.0 * t).cos(), (4.0 * t).cos(), (2.0 * t).sin(), (4.0 * t).sin());
        let s11 = self.sigma * (1.0 - q2 * (1.5 * c2 + c4) + q4 * c4);
        let s12 = self.sigma * (-q2 * (0.5 * s2 + s4) + q4 * s4);
        let s22 = self.sigma * (-q2 * (0.5 * c2 - c4) - q4 * c4);
        vec![s11, s22, s12]
    }
}

/// Point load `P` on the surface `x3 = 0` of a half-space `x3 >= 0`.
#[derive(Clone, Debug)]
pub struct BoussinesqSolution {
    pub load: f64,
    pub material: Material,
}

impl BoussinesqSolution {
    pub fn standard() -> Self {
        Self { load: 1.0, material: Material { young: 1000.0, poisson: 0.25, mode: StressMode::Solid } }
    }

    /// `(u_r, w)` at cylindrical radius `r` and depth `z`.
    pub fn radial_vertical(&self, r: f64, z: f64) -> (f64, f64) {
        let (e, nu, p) = (self.material.young, self.material.poisson, self.load);
        let rho = r.hypot(z);
        let c = (1.0 + nu) * p / (2.0 * e * PI * rho);
        let ur = c * (z * r / (rho * rho) - (1.0 - 2.0 * nu) * r / (rho + z));
        let w = c * (z * z / (rho * rho) + 2.0 * (1.0 - nu));
        (ur, w)
    }

    /// `(sigma_r, sigma_theta, sigma_zz, tau_rz)`.
    pub fn cylindrical_stress(&self, r: f64, z: f64) -> [f64; 4] {
        let (nu, p) = (self.material.poisson, self.load);
        let rho = r.hypot(z);
        let rho2 = rho * rho;
        let sr = p / (2.0 * PI * rho2) * (-3.0 * z * r * r / rho.powi(3) + (1.0 - 2.0 * nu) * rho / (rho + z));
        let st = (1.0 - 2.0 * nu) * p / (2.0 * PI * rho2) * (z / rho - rho / (rho + z));
        let sz = -3.0 * p * z.powi(3) / (2.0 * PI * rho.powi(5));
        let trz = -3.0 * p * r * z * z / (2.0 * PI * rho.powi(5));
        [sr, st, sz, trz]
    }
}

impl ExactSolution for BoussinesqSolution {
    fn material(&self) -> &Material {
        &self.material
    }

    fn displacement(&self, x: &Point) -> [f64; 3] {
        let r = x[0].hypot(x[1]);
        let (ur, w) = self.radial_vertical(r, x[2]);
        if r == 0.0 {
            return [0.0, 0.0, w];
        }
        [ur * x[0] / r, ur * x[1] / r, w]
    }

    fn stress(&self, x: &Point) -> Vec<f64> {
        let r = x[0].hypot(x[1]);
        let [sr, st, sz, trz] = self.cylindrical_stress(r, x[2]);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (x[0] / r, x[1] / r) };
        let sxx = sr * c * c + st * s * s;
        let syy = sr * s * s + st * c * c;
        let sxy = (sr - st) * s * c;
        vec![sxx, syy, sz, trz * s, trz * c, sxy]
    }
}

/// Polynomial displacement field `u_i = sum_n c[i][n] p_n(x)` in the
/// unshifted monomial basis, with the body force that balances it.
#[derive(Clone, Debug)]
pub struct PolynomialSolution {
    pub material: Material,
    basis: PolyBasis,
    coefficients: Vec<Vec<f64>>,
    body: [f64; 3],
}

fn voigt_index(i: usize, j: usize, dim: usize) -> usize {
    if i == j {
        return i;
    }
    match (dim, i.min(j), i.max(j)) {
        (2, _, _) => 2,
        (_, 1, 2) => 3,
        (_, 0, 2) => 4,
        _ => 5,
    }
}

impl PolynomialSolution {
    /// `coefficients[i]` lists the coefficients of component `i` over the
    /// graded-lex monomials of degree `<= degree`. Only degrees up to two
    /// are supported, so that the body force is constant.
    pub fn new(material: Material, degree: usize, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let dim = material.dim();
        if degree > 2 {
            return Err(Error::InvalidArgument("polynomial solutions are limited to degree 2".into()));
        }
        let basis = PolyBasis::new(dim, degree)?;
        if coefficients.len() != dim || coefficients.iter().any(|c| c.len() != basis.len()) {
            return Err(Error::InvalidArgument(format!(
                "expected {dim} coefficient vectors of length {}",
                basis.len()
            )));
        }
        let mut sol = Self { material, basis, coefficients, body: [0.0; 3] };
        sol.body = sol.divergence_free_residual();
        Ok(sol)
    }

    /// Quadratic field with zero body force: `u = (x^2 - y^2, -2xy)` plus a
    /// linear part, in 2D; a harmonic, divergence-free analogue in 3D.
    pub fn equilibrated_quadratic(material: Material, linear: &[f64]) -> Result<Self> {
        let dim = material.dim();
        let q = PolyBasis::new(dim, 2)?.len();
        let mut c = vec![vec![0.0; q]; dim];
        let lin = dim + 1;
        for i in 0..dim {
            for n in 0..lin {
                c[i][n] = linear.get(i * lin + n).copied().unwrap_or(0.0);
            }
        }
        if dim == 2 {
            // 1, x, y, x^2, xy, y^2
            c[0][3] = 1.0;
            c[0][5] = -1.0;
            c[1][4] = -2.0;
        } else {
            // 1, x, y, z, x^2, xy, xz, y^2, yz, z^2
            c[0][4] = 1.0;
            c[0][7] = -1.0;
            c[1][5] = -2.0;
            c[2][5] = 1.0;
        }
        Self::new(material, 2, c)
    }

    pub fn body(&self) -> [f64; 3] {
        self.body
    }

    fn gradient(&self, x: &Point) -> [[f64; 3]; 3] {
        let dim = self.material.dim();
        let mut g = [[0.0; 3]; 3];
        for j in 0..dim {
            let mut alpha = [0u8; 3];
            alpha[j] = 1;
            let d = self.basis.derivative(x, alpha).expect("first derivatives exist");
            for i in 0..dim {
                g[i][j] = self.coefficients[i].iter().zip(&d).map(|(c, v)| c * v).sum();
            }
        }
        g
    }

    fn divergence_free_residual(&self) -> [f64; 3] {
        let dim = self.material.dim();
        let d = self.material.voigt();
        let mut b = [0.0; 3];
        if self.basis.degree() < 2 {
            return b;
        }
        // d sigma / d x_k from the constant second derivatives.
        for k in 0..dim {
            let mut gk = [[0.0; 3]; 3];
            for j in 0..dim {
                let mut alpha = [0u8; 3];
                alpha[j] += 1;
                alpha[k] += 1;
                let dd = self.basis.derivative(&[0.0; 3], alpha).expect("second derivatives exist");
                for i in 0..dim {
                    gk[i][j] = self.coefficients[i].iter().zip(&dd).map(|(c, v)| c * v).sum();
                }
            }
            let ds = d.apply(&strain_from_gradient(&gk, dim));
            for i in 0..dim {
                b[i] -= ds[voigt_index(i, k, dim)];
            }
        }
        b
    }
}

impl ExactSolution for PolynomialSolution {
    fn material(&self) -> &Material {
        &self.material
    }

    fn displacement(&self, x: &Point) -> [f64; 3] {
        let v = self.basis.eval(x);
        let mut u = [0.0; 3];
        for (i, c) in self.coefficients.iter().enumerate() {
            u[i] = c.iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        u
    }

    fn stress(&self, x: &Point) -> Vec<f64> {
        self.material.voigt().apply(&self.strain(x))
    }

    fn strain(&self, x: &Point) -> Vec<f64> {
        let dim = self.material.dim();
        let s = strain_from_gradient(&self.gradient(x), dim);
        debug_assert_eq!(s.len(), voigt_len(dim));
        s
    }

    fn body_force(&self, _x: &Point) -> [f64; 3] {
        self.body
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fd_strain(sol: &dyn ExactSolution, x: &Point, h: f64) -> Vec<f64> {
        let dim = sol.dim();
        let mut g = [[0.0; 3]; 3];
        for j in 0..dim {
            let mut xp = *x;
            let mut xm = *x;
            xp[j] += h;
            xm[j] -= h;
            let (up, um) = (sol.displacement(&xp), sol.displacement(&xm));
            for i in 0..dim {
                g[i][j] = (up[i] - um[i]) / (2.0 * h);
            }
        }
        strain_from_gradient(&g, dim)
    }

    fn fd_divergence(sol: &dyn ExactSolution, x: &Point, h: f64) -> [f64; 3] {
        let dim = sol.dim();
        let mut div = [0.0; 3];
        for k in 0..dim {
            let mut xp = *x;
            let mut xm = *x;
            xp[k] += h;
            xm[k] -= h;
            let (sp, sm) = (sol.stress(&xp), sol.stress(&xm));
            for i in 0..dim {
                let v = voigt_index(i, k, dim);
                div[i] += (sp[v] - sm[v]) / (2.0 * h);
            }
        }
        div
    }

    fn rel(a: &[f64], b: &[f64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
        num / den
    }

    #[test]
    fn beam_reference_values() {
        let b = BeamSolution::standard();
        assert!((b.displacement(&[8.0, 0.5, 0.0])[1] - 2069.0).abs() < 1e-9);
        assert_eq!(b.stress(&[3.0, 0.3, 0.0])[1], 0.0);
        assert!((b.stress(&[2.0, 0.5, 0.0])[2] - 1.5).abs() < 1e-12);
        assert!((b.stress(&[4.0, 0.0, 0.0])[0] - 24.0).abs() < 1e-12);
        // The end shear integrates to the load.
        let (x, w) = crate::quadrature::gauss_legendre_1d(4).unwrap();
        let total: f64 = x.iter().zip(w).map(|(t, w)| 0.5 * w * b.stress(&[8.0, 0.5 + 0.5 * t, 0.0])[2]).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plate_reference_values() {
        let p = PlateSolution::standard();
        assert!((p.stress(&[0.0, 1.0, 0.0])[0] - 3.0).abs() < 1e-12);
        assert!(p.stress(&[1.0, 0.0, 0.0])[0].abs() < 1e-12);
        let far = p.stress(&[1e4, 1e4, 0.0]);
        assert!((far[0] - 1.0).abs() < 1e-7 && far[1].abs() < 1e-7 && far[2].abs() < 1e-7);
        // Symmetry planes.
        assert!(p.displacement(&[0.0, 2.0, 0.0])[0].abs() < 1e-15);
        assert!(p.displacement(&[2.0, 0.0, 0.0])[1].abs() < 1e-15);
        // Traction-free hole.
        for i in 0..10 {
            let t = i as f64 * 0.15;
            let n = [t.cos(), t.sin(), 0.0];
            let tr = crate::elasticity::traction(&p.stress(&n), &n, 2);
            assert!(tr[0].abs() < 1e-12 && tr[1].abs() < 1e-12);
        }
    }

    #[test]
    fn boussinesq_reference_values() {
        let s = BoussinesqSolution::standard();
        let u = s.displacement(&[1.0, 0.0, 0.0]);
        assert!((u[2] - 0.9375 / (1000.0 * PI)).abs() < 1e-15);
        assert!((u[2] - 2.98416e-4).abs() < 1e-9);
        let expected_ur = -1.25 * 0.5 / (2000.0 * PI);
        assert!((u[0] - expected_ur).abs() < 1e-15 && u[0] < 0.0);
        // 1 / rho decay along a ray.
        let a = s.displacement(&[0.3, 0.4, 0.5]);
        let b = s.displacement(&[0.6, 0.8, 1.0]);
        for i in 0..3 {
            assert!((a[i] - 2.0 * b[i]).abs() < 1e-15);
        }
        // Free surface away from the load.
        let st = s.stress(&[1.0, 2.0, 0.0]);
        let tr = crate::elasticity::traction(&st, &[0.0, 0.0, -1.0], 3);
        assert!(tr.iter().all(|t| t.abs() < 1e-15));
    }

    #[test]
    fn displacements_and_stresses_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let beam = BeamSolution::standard();
        let plate = PlateSolution::standard();
        let mut strain_plate = plate.clone();
        strain_plate.material.mode = StressMode::PlaneStrain;
        let bous = BoussinesqSolution::standard();
        for _ in 0..50 {
            let xb = [rng.gen_range(0.5..7.5), rng.gen_range(0.1..0.9), 0.0];
            let xp = [rng.gen_range(0.2..4.0), rng.gen_range(1.1..4.0), 0.0];
            let xs = [rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0)];
            for (sol, x) in [(&beam as &dyn ExactSolution, xb), (&plate, xp), (&strain_plate, xp), (&bous, xs)] {
                let fd = fd_strain(sol, &x, 1e-5);
                assert!(rel(&fd, &sol.strain(&x)) < 1e-4, "strain mismatch at {x:?}");
                let div = fd_divergence(sol, &x, 1e-5);
                let scale = sol.stress(&x).iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(div.iter().all(|d| d.abs() < 1e-4 * scale.max(1e-12) / 1e-2), "equilibrium at {x:?}");
            }
        }
    }

    #[test]
    fn polynomial_body_force_balances_stress() {
        let mat = Material::new(1.0, 0.25, StressMode::PlaneStress).unwrap();
        let c = vec![vec![0.1, 0.2, -0.3, 0.5, 0.7, -0.2], vec![-0.4, 0.3, 0.1, 0.6, -0.5, 0.9]];
        let sol = PolynomialSolution::new(mat, 2, c).unwrap();
        let x = [0.3, 0.7, 0.0];
        let div = fd_divergence(&sol, &x, 1e-4);
        let b = sol.body_force(&x);
        for i in 0..2 {
            assert!((div[i] + b[i]).abs() < 1e-8);
        }
        let eq = PolynomialSolution::equilibrated_quadratic(mat, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        assert!(eq.body().iter().all(|v| v.abs() < 1e-15));
        let m3 = Material::new(1.0, 0.3, StressMode::Solid).unwrap();
        let eq3 = PolynomialSolution::equilibrated_quadratic(m3, &[]).unwrap();
        assert!(eq3.body().iter().all(|v| v.abs() < 1e-14), "{:?}", eq3.body());
    }
}
