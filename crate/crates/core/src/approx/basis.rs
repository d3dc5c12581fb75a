use crate::error::{Error, Result};
use crate::geometry::Point;

/// Monomial basis of `P_m(R^d)` in graded lexicographic order, e.g. for
/// `d = 2, m = 2`: `1, x, y, x^2, xy, y^2`.
///
/// The basis is evaluated in shifted and scaled coordinates
/// `z = (x - center) / scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyBasis {
    dim: usize,
    degree: usize,
    exponents: Vec<[u8; 3]>,
}

impl PolyBasis {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidArgument(format!("dimension must be 2 or 3, got {dim}")));
        }
        if degree > 8 {
            return Err(Error::InvalidArgument(format!("basis degree {degree} is too large")));
        }
        let mut exponents = Vec::new();
        for t in 0..=degree as u8 {
            if dim == 2 {
                for j in 0..=t {
                    exponents.push([t - j, j, 0]);
                }
            } else {
                for a in (0..=t).rev() {
                    for b in (0..=t - a).rev() {
                        exponents.push([a, b, t - a - b]);
                    }
                }
            }
        }
        Ok(Self { dim, degree, exponents })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of basis functions, `Q = C(m + d, d)`.
    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[[u8; 3]] {
        &self.exponents
    }

    pub fn index_of(&self, alpha: [u8; 3]) -> Option<usize> {
        self.exponents.iter().position(|e| *e == alpha)
    }

    /// Values of all monomials at the scaled point `z`.
    pub fn eval_into(&self, z: &Point, out: &mut [f64]) {
        let mut pow = [[1.0; 9]; 3];
        for a in 0..self.dim {
            for k in 1..=self.degree {
                pow[a][k] = pow[a][k - 1] * z[a];
            }
        }
        for (o, e) in out.iter_mut().zip(&self.exponents) {
            *o = pow[0][e[0] as usize] * pow[1][e[1] as usize] * pow[2][e[2] as usize];
        }
    }

    pub fn eval(&self, z: &Point) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(z, &mut out);
        out
    }

    /// First derivatives with respect to `z`: `out[a][n] = d p_n / d z_a`.
    pub fn gradient_into(&self, z: &Point, out: &mut [Vec<f64>; 3]) {
        let mut pow = [[1.0; 10]; 3];
        for a in 0..self.dim {
            for k in 1..=self.degree {
                pow[a][k] = pow[a][k - 1] * z[a];
            }
        }
        for (n, e) in self.exponents.iter().enumerate() {
            for a in 0..self.dim {
                let ea = e[a] as usize;
                out[a][n] = if ea == 0 {
                    0.0
                } else {
                    let mut v = ea as f64 * pow[a][ea - 1];
                    for b in 0..self.dim {
                        if b != a {
                            v *= pow[b][e[b] as usize];
                        }
                    }
                    v
                };
            }
        }
    }

    /// `D^alpha` of every monomial at `z`, with respect to `z`.
    pub fn derivative(&self, z: &Point, alpha: [u8; 3]) -> Result<Vec<f64>> {
        let order: usize = alpha.iter().map(|&a| a as usize).sum();
        if order > self.degree {
            return Err(Error::InvalidArgument(format!(
                "derivative order {order} exceeds basis degree {}",
                self.degree
            )));
        }
        Ok(self
            .exponents
            .iter()
            .map(|e| {
                let mut v = 1.0;
                for a in 0..3 {
                    let (ea, k) = (e[a] as i32, alpha[a] as i32);
                    if k > ea {
                        return 0.0;
                    }
                    let falling: i32 = (0..k).map(|i| ea - i).product();
                    v *= falling as f64 * z[a].powi(ea - k);
                }
                v
            })
            .collect())
    }
}

/// `D^alpha p_n(x)` for the basis centered at `center` with scale `scale`,
/// differentiated with respect to the physical coordinate `x`.
pub fn basis_eval(basis: &PolyBasis, x: &Point, center: &Point, scale: f64, alpha: [u8; 3]) -> Result<Vec<f64>> {
    let z = scaled(x, center, scale);
    let order: i32 = alpha.iter().map(|&a| a as i32).sum();
    let mut v = basis.derivative(&z, alpha)?;
    let f = scale.powi(-order);
    v.iter_mut().for_each(|x| *x *= f);
    Ok(v)
}

#[inline]
pub fn scaled(x: &Point, center: &Point, scale: f64) -> Point {
    [(x[0] - center[0]) / scale, (x[1] - center[1]) / scale, (x[2] - center[2]) / scale]
}
