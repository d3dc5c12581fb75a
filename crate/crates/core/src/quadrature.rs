//! Gauss-Legendre rules and their mappings onto subdomain interiors and
//! boundary pieces. All rules are expressed in node-local coordinates.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPiece, PieceShape, Point, Region, Subdomain};

pub const MAX_GAUSS_POINTS: usize = 64;

/// Points per direction on disks and balls.
pub const DEFAULT_CIRCLE_POINTS: usize = 10;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    /// Weights with the Jacobian absorbed.
    pub weights: Vec<f64>,
    /// Outward unit normals, one per point, for boundary rules; empty for
    /// volume rules.
    pub normals: Vec<Point>,
    /// Total polynomial degree integrated exactly, if the region is affine.
    pub exactness: Option<usize>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    fn append(&mut self, other: QuadratureRule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
        self.normals.extend(other.normals);
        self.exactness = match (self.exactness, other.exactness) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
    }
}

type Rule1d = (Vec<f64>, Vec<f64>);

fn compute_gauss_legendre(n: usize) -> Rule1d {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton iteration on P_n from the usual asymptotic guess.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn table() -> &'static [Rule1d] {
    static TABLE: OnceLock<Vec<Rule1d>> = OnceLock::new();
    TABLE.get_or_init(|| (1..=MAX_GAUSS_POINTS).map(compute_gauss_legendre).collect())
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre_1d(n: usize) -> Result<(&'static [f64], &'static [f64])> {
    if !(1..=MAX_GAUSS_POINTS).contains(&n) {
        return Err(Error::InvalidArgument(format!("Gauss-Legendre order must be in 1..={MAX_GAUSS_POINTS}, got {n}")));
    }
    let (x, w) = &table()[n - 1];
    Ok((x, w))
}

/// Nodes and weights mapped to `[a, b]`.
fn mapped(n: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let (x, w) = gauss_legendre_1d(n)?;
    let (h, c) = (0.5 * (b - a), 0.5 * (a + b));
    Ok(x.iter().zip(w).map(|(&t, &wt)| (c + h * t, h * wt)).collect())
}

/// Splits `[a, b]` at the multiples of `pi / 2` strictly inside it.
fn split_quadrants(a: f64, b: f64) -> Vec<(f64, f64)> {
    let eps = 1e-14 * (1.0 + a.abs().max(b.abs()));
    let mut cuts = vec![a];
    let first = (a / FRAC_PI_2).floor() as i64 + 1;
    let mut k = first;
    while (k as f64) * FRAC_PI_2 < b - eps {
        let c = k as f64 * FRAC_PI_2;
        if c > a + eps {
            cuts.push(c);
        }
        k += 1;
    }
    cuts.push(b);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Tensor-product rule on the box `lo..hi` (first `dim` axes).
pub fn rule_rect(lo: &Point, hi: &Point, dim: usize, n: usize) -> Result<QuadratureRule> {
    let axes: Vec<Vec<(f64, f64)>> = (0..dim).map(|a| mapped(n, lo[a], hi[a])).collect::<Result<_>>()?;
    let mut rule = QuadratureRule { exactness: Some(2 * n - 1), ..Default::default() };
    let count: usize = axes.iter().map(Vec::len).product();
    rule.points.reserve(count);
    rule.weights.reserve(count);
    for idx in 0..count {
        let mut p = [0.0; 3];
        let mut w = 1.0;
        let mut rest = idx;
        for (a, axis) in axes.iter().enumerate() {
            let (x, wx) = axis[rest % axis.len()];
            rest /= axis.len();
            p[a] = x;
            w *= wx;
        }
        rule.points.push(p);
        rule.weights.push(w);
    }
    Ok(rule)
}

/// Product rule on a full disk (2D) or ball (3D) centered at `center`.
pub fn rule_disk_or_ball(
    center: &Point,
    radius: f64,
    dim: usize,
    n_radial: usize,
    n_angular: usize,
) -> Result<QuadratureRule> {
    let mut rule = if dim == 2 {
        sector_rule(radius, (0.0, 2.0 * PI), n_radial, n_angular)?
    } else {
        ball_rule(radius, (0.0, 2.0 * PI), (0.0, PI), n_radial, n_angular)?
    };
    for p in &mut rule.points {
        for a in 0..3 {
            p[a] += center[a];
        }
    }
    Ok(rule)
}

fn sector_rule(radius: f64, phi: (f64, f64), n_radial: usize, n_angular: usize) -> Result<QuadratureRule> {
    let mut rule = QuadratureRule::default();
    for (a, b) in split_quadrants(phi.0, phi.1) {
        for (t, wt) in mapped(n_angular, a, b)? {
            for (s, ws) in mapped(n_radial, 0.0, radius)? {
                rule.points.push([s * t.cos(), s * t.sin(), 0.0]);
                rule.weights.push(ws * wt * s);
            }
        }
    }
    Ok(rule)
}

fn ball_rule(
    radius: f64,
    phi: (f64, f64),
    theta: (f64, f64),
    n_radial: usize,
    n_angular: usize,
) -> Result<QuadratureRule> {
    let mut rule = QuadratureRule::default();
    let radial = mapped(n_radial, 0.0, radius)?;
    for (pa, pb) in split_quadrants(phi.0, phi.1) {
        let az = mapped(n_angular, pa, pb)?;
        for (ta, tb) in split_quadrants(theta.0, theta.1) {
            for &(th, wth) in &mapped(n_angular, ta, tb)? {
                let (st, ct) = th.sin_cos();
                for &(ph, wph) in &az {
                    let (sp, cp) = ph.sin_cos();
                    for &(s, ws) in &radial {
                        rule.points.push([s * st * cp, s * st * sp, s * ct]);
                        rule.weights.push(ws * wth * wph * s * s * st);
                    }
                }
            }
        }
    }
    Ok(rule)
}

/// Interior rule over a (possibly clipped) subdomain. Boxes use `n` points
/// per axis; disks and balls use `n` points per direction.
pub fn rule_clipped(sub: &Subdomain, dim: usize, n: usize) -> Result<QuadratureRule> {
    match &sub.region {
        Region::Rect { lo, hi } => rule_rect(lo, hi, dim, n),
        Region::Disk(disk) => {
            let mut rule = QuadratureRule::default();
            let r = disk.radius;
            for slice in disk.slices() {
                for (t, wt) in mapped(n, slice.phi0, slice.phi1)? {
                    let s0 = disk.s_min(t, slice.cut);
                    for (s, ws) in mapped(n, s0, r)? {
                        rule.points.push([s * t.cos(), s * t.sin(), 0.0]);
                        rule.weights.push(ws * wt * s);
                    }
                }
            }
            Ok(rule)
        }
        Region::Ball(ball) => ball_rule(ball.radius, ball.phi, ball.theta, n, n),
    }
}

/// Rule over a single boundary piece with outward normals attached.
pub fn rule_piece(piece: &BoundaryPiece, dim: usize, n: usize) -> Result<QuadratureRule> {
    let mut rule = QuadratureRule::default();
    match piece.shape {
        PieceShape::BoxFace { axis, coord, outward, lo, hi } => {
            let mut flo = lo;
            let mut fhi = hi;
            flo[axis] = coord;
            fhi[axis] = coord;
            // Integrate over the remaining axes only.
            let others: Vec<usize> = (0..dim).filter(|&a| a != axis).collect();
            let axes: Vec<Vec<(f64, f64)>> =
                others.iter().map(|&a| mapped(n, flo[a], fhi[a])).collect::<Result<_>>()?;
            let count: usize = axes.iter().map(Vec::len).product();
            let mut normal = [0.0; 3];
            normal[axis] = outward;
            for idx in 0..count {
                let mut p = flo;
                let mut w = 1.0;
                let mut rest = idx;
                for (k, ax) in axes.iter().enumerate() {
                    let (x, wx) = ax[rest % ax.len()];
                    rest /= ax.len();
                    p[others[k]] = x;
                    w *= wx;
                }
                rule.points.push(p);
                rule.weights.push(w);
                rule.normals.push(normal);
            }
            rule.exactness = Some(2 * n - 1);
        }
        PieceShape::Arc { radius, phi0, phi1 } => {
            for (a, b) in split_quadrants(phi0, phi1) {
                for (t, wt) in mapped(n, a, b)? {
                    let e = [t.cos(), t.sin(), 0.0];
                    rule.points.push([radius * e[0], radius * e[1], 0.0]);
                    rule.weights.push(radius * wt);
                    rule.normals.push(e);
                }
            }
        }
        PieceShape::Segment { phi, s0, s1, normal } => {
            let e = [phi.cos(), phi.sin(), 0.0];
            for (s, ws) in mapped(n, s0, s1)? {
                rule.points.push([s * e[0], s * e[1], 0.0]);
                rule.weights.push(ws);
                rule.normals.push(normal);
            }
            rule.exactness = Some(2 * n - 1);
        }
        PieceShape::HoleArc { center, radius, theta0, theta1 } => {
            // Split where the arc passes through the local origin, the peak
            // of the test function.
            let tk = (-center[1]).atan2(-center[0]);
            let pieces =
                if tk > theta0 && tk < theta1 { vec![(theta0, tk), (tk, theta1)] } else { vec![(theta0, theta1)] };
            for (a, b) in pieces {
                for (t, wt) in mapped(n, a, b)? {
                    let e = [t.cos(), t.sin(), 0.0];
                    rule.points.push([center[0] + radius * e[0], center[1] + radius * e[1], 0.0]);
                    rule.weights.push(radius * wt);
                    rule.normals.push([-e[0], -e[1], 0.0]);
                }
            }
        }
        PieceShape::SpherePatch { radius, phi, theta } => {
            for (pa, pb) in split_quadrants(phi.0, phi.1) {
                for (ph, wph) in mapped(n, pa, pb)? {
                    for (ta, tb) in split_quadrants(theta.0, theta.1) {
                        for (th, wth) in mapped(n, ta, tb)? {
                            let e = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                            rule.points.push([radius * e[0], radius * e[1], radius * e[2]]);
                            rule.weights.push(radius * radius * th.sin() * wph * wth);
                            rule.normals.push(e);
                        }
                    }
                }
            }
        }
        PieceShape::Meridian { phi, radius, theta, normal } => {
            for (ta, tb) in split_quadrants(theta.0, theta.1) {
                for (th, wth) in mapped(n, ta, tb)? {
                    let e = [th.sin() * phi.cos(), th.sin() * phi.sin(), th.cos()];
                    for (s, ws) in mapped(n, 0.0, radius)? {
                        rule.points.push([s * e[0], s * e[1], s * e[2]]);
                        rule.weights.push(s * ws * wth);
                        rule.normals.push(normal);
                    }
                }
            }
        }
        PieceShape::Equator { radius, phi, normal } => {
            for (pa, pb) in split_quadrants(phi.0, phi.1) {
                for (ph, wph) in mapped(n, pa, pb)? {
                    for (s, ws) in mapped(n, 0.0, radius)? {
                        rule.points.push([s * ph.cos(), s * ph.sin(), 0.0]);
                        rule.weights.push(s * ws * wph);
                        rule.normals.push(normal);
                    }
                }
            }
        }
    }
    Ok(rule)
}

/// Rule over the selected boundary pieces of a subdomain.
pub fn rule_boundary(
    sub: &Subdomain,
    dim: usize,
    n: usize,
    select: impl Fn(&BoundaryPiece) -> bool,
) -> Result<QuadratureRule> {
    let mut rule = QuadratureRule { exactness: Some(usize::MAX), ..Default::default() };
    for piece in sub.pieces.iter().filter(|p| select(p)) {
        rule.append(rule_piece(piece, dim, n)?);
    }
    if rule.exactness == Some(usize::MAX) {
        rule.exactness = None;
    }
    Ok(rule)
}

/// Gauss points per axis making DMLPG1 box integrals exact for basis degree
/// `m` and a test function of per-axis degree `n`.
pub fn dmlpg1_box_points(m: usize, n: usize) -> usize {
    ((m - 1) + n + 1).div_ceil(2)
}

/// Gauss points per axis making DMLPG5 box face integrals exact.
pub fn dmlpg5_box_points(m: usize) -> usize {
    m.div_ceil(2).max(1)
}
