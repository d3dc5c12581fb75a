use super::gmls::dot;
use super::{MlsContext, MomentSystem};
use crate::error::Result;
use crate::geometry::Point;

/// MLS shape functions and their standard (full) first derivatives at a
/// point.
#[derive(Clone, Debug)]
pub struct ShapeFunctionEvaluation {
    pub point: Point,
    pub active: Vec<usize>,
    pub values: Vec<f64>,
    /// `gradients[j][i] = d a_j / d x_i`.
    pub gradients: Vec<[f64; 3]>,
}

/// Differentiates `a_j(x) = w_j(x) p_j^T A(x)^{-1} p(x)` through the weights
/// and the moment matrix, holding the support radius fixed.
pub fn mls_shape_with_derivatives(ctx: &MlsContext<'_>, x: &Point, delta: f64) -> Result<ShapeFunctionEvaluation> {
    let sys = ctx.moment_system(x, delta)?;
    Ok(standard_derivatives(ctx, &sys))
}

pub(crate) fn standard_derivatives(ctx: &MlsContext<'_>, sys: &MomentSystem) -> ShapeFunctionEvaluation {
    let dim = ctx.basis.dim();
    let q = sys.basis_len();
    let n = sys.active().len();
    let x = *sys.center();
    let delta = sys.delta();
    let mut e0 = vec![0.0; q];
    e0[0] = 1.0;
    let gamma = sys.solve_moment(&e0);
    let pg: Vec<f64> = (0..n).map(|r| dot(sys.basis_row(r), &gamma)).collect();
    let values: Vec<f64> = (0..n).map(|r| sys.weights()[r] * pg[r]).collect();

    // d w_j / d x_i
    let mut dw = vec![[0.0; 3]; n];
    for (r, &j) in sys.active().iter().enumerate() {
        let y = &ctx.points[j];
        let d = crate::geometry::dist(&x, y);
        if d > 0.0 {
            let f = ctx.weight.derivative(d / delta) / (delta * d);
            for i in 0..dim {
                dw[r][i] = f * (x[i] - y[i]);
            }
        }
    }
    let mut gradients = vec![[0.0; 3]; n];
    for i in 0..dim {
        // rhs = dp(0)/dx_i - dA_i gamma, with dA_i = sum_j dw_j p_j p_j^T
        let mut rhs = vec![0.0; q];
        rhs[1 + i] = 1.0 / delta;
        for r in 0..n {
            let c = dw[r][i] * pg[r];
            for (t, p) in rhs.iter_mut().zip(sys.basis_row(r)) {
                *t -= c * p;
            }
        }
        let dgamma = sys.solve_moment(&rhs);
        for r in 0..n {
            gradients[r][i] = dw[r][i] * pg[r] + sys.weights()[r] * dot(sys.basis_row(r), &dgamma);
        }
    }
    ShapeFunctionEvaluation { point: x, active: sys.active().to_vec(), values, gradients }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{GaussianWeight, PolyBasis};
    use crate::geometry::NeighborGrid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..300).map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), 0.0]).collect()
    }

    #[test]
    fn constant_and_quadratic_reproduction() {
        let pts = setup(11);
        let grid = NeighborGrid::new(&pts, 2, 0.3);
        let ctx = MlsContext::new(&pts, &grid, PolyBasis::new(2, 2).unwrap(), GaussianWeight::default());
        let x = [0.41, 0.57, 0.0];
        let ev = mls_shape_with_derivatives(&ctx, &x, 0.3).unwrap();
        let sum: f64 = ev.values.iter().sum();
        assert!((sum - 1.0).abs() < 1e-10);
        for i in 0..2 {
            let s: f64 = ev.gradients.iter().map(|g| g[i]).sum();
            assert!(s.abs() < 1e-8);
        }
        let f = |p: &Point| 1.0 + 2.0 * p[0] - p[1] + 3.0 * p[0] * p[0] - p[0] * p[1] + 0.5 * p[1] * p[1];
        let gx = 2.0 + 6.0 * x[0] - x[1];
        let gy = -1.0 - x[0] + x[1];
        let (mut ax, mut ay) = (0.0, 0.0);
        for (r, &j) in ev.active.iter().enumerate() {
            ax += ev.gradients[r][0] * f(&pts[j]);
            ay += ev.gradients[r][1] * f(&pts[j]);
        }
        assert!((ax - gx).abs() < 1e-8 && (ay - gy).abs() < 1e-8);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let pts = setup(5);
        let grid = NeighborGrid::new(&pts, 2, 0.3);
        let ctx = MlsContext::new(&pts, &grid, PolyBasis::new(2, 2).unwrap(), GaussianWeight::default());
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let x = [rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7), 0.0];
            let ev = mls_shape_with_derivatives(&ctx, &x, 0.3).unwrap();
            let h = 1e-6;
            for i in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                let vp = mls_shape_with_derivatives(&ctx, &xp, 0.3).unwrap();
                let vm = mls_shape_with_derivatives(&ctx, &xm, 0.3).unwrap();
                let scale = ev.gradients.iter().map(|g| g[i].abs()).fold(0.0, f64::max);
                for (r, &j) in ev.active.iter().enumerate() {
                    let find = |e: &ShapeFunctionEvaluation| {
                        e.active.iter().position(|&k| k == j).map_or(0.0, |p| e.values[p])
                    };
                    let fd = (find(&vp) - find(&vm)) / (2.0 * h);
                    assert!((fd - ev.gradients[r][i]).abs() < 1e-5 * scale, "{fd} vs {}", ev.gradients[r][i]);
                }
            }
        }
    }
}
