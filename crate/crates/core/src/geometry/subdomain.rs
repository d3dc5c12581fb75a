//! Local integration regions `Omega_k` around test nodes.
//!
//! Regions are stored in coordinates relative to the node, so two nodes with
//! congruent neighborhoods produce bitwise-identical regions and signatures.
//!
//! Boxes are clipped against the planar faces of the domain and shrunk so
//! that they never reach a curved face. Disks and balls are shrunk until the
//! only faces they touch pass through the center; those faces cut the shape
//! into a sector. Nodes lying on the plate hole get a disk sector with the
//! hole removed exactly.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::{norm, DomainGeometry, DomainKind, FaceShape, NodeSet, Point};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    /// Square (2D) or cube (3D) of side `s_k`.
    Box,
    /// Disk (2D) or ball (3D) of radius `r_k`.
    Ball,
}

/// The circular hole removed from a disk sector: the disk of `radius`
/// around `center`, in node-local coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoleCut {
    pub center: Point,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiskRegion {
    pub radius: f64,
    /// Angular range `phi.0 <= phi <= phi.1`, possibly extending past `2 pi`.
    pub phi: (f64, f64),
    pub hole: Option<HoleCut>,
}

/// One angular slice of a disk sector. On slices with `cut` set, the radial
/// range starts at the hole boundary instead of the center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularSlice {
    pub phi0: f64,
    pub phi1: f64,
    pub cut: bool,
}

impl DiskRegion {
    /// Smallest admissible radius along direction `phi`.
    pub fn s_min(&self, phi: f64, cut: bool) -> f64 {
        match (&self.hole, cut) {
            (Some(h), true) => (2.0 * (h.center[0] * phi.cos() + h.center[1] * phi.sin())).max(0.0),
            _ => 0.0,
        }
    }

    /// Splits the angular range at quadrant boundaries and at the points
    /// where the hole starts or stops shadowing the radial rays. Slices fully
    /// shadowed by the hole are dropped.
    pub fn slices(&self) -> Vec<AngularSlice> {
        let (p0, p1) = self.phi;
        let mut cuts: Vec<f64> = Vec::new();
        for k in -8..=16 {
            cuts.push(k as f64 * FRAC_PI_2);
        }
        let hole = self.hole.map(|h| {
            let phi_c = h.center[1].atan2(h.center[0]);
            let beta = (self.radius / (2.0 * norm(&h.center))).min(1.0).acos();
            (phi_c, beta)
        });
        if let Some((phi_c, beta)) = hole {
            for j in -2..=2 {
                let base = phi_c + j as f64 * TAU;
                for off in [beta, FRAC_PI_2, 3.0 * FRAC_PI_2, TAU - beta] {
                    cuts.push(base + off);
                }
            }
        }
        let eps = 1e-14 * (1.0 + p1.abs());
        let mut pts: Vec<f64> = cuts.into_iter().filter(|&c| c > p0 + eps && c < p1 - eps).collect();
        pts.push(p0);
        pts.push(p1);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= eps);
        let mut out = Vec::new();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut cut = false;
            if let Some((phi_c, beta)) = hole {
                let psi = wrap_angle(0.5 * (a + b) - phi_c).abs();
                if psi <= beta {
                    continue;
                }
                cut = psi < FRAC_PI_2;
            }
            out.push(AngularSlice { phi0: a, phi1: b, cut });
        }
        out
    }

    pub fn area(&self) -> f64 {
        let r2 = self.radius * self.radius;
        self.slices()
            .iter()
            .map(|s| {
                let mut area = 0.5 * r2 * (s.phi1 - s.phi0);
                if let (true, Some(h)) = (s.cut, &self.hole) {
                    // s_min^2 = 4 |c|^2 cos^2(phi - phi_c)
                    let c = norm(&h.center);
                    let phi_c = h.center[1].atan2(h.center[0]);
                    let f = |psi: f64| 0.5 * psi + 0.25 * (2.0 * psi).sin();
                    area -= 2.0 * c * c * (f(s.phi1 - phi_c) - f(s.phi0 - phi_c));
                }
                area
            })
            .sum()
    }

    pub fn contains(&self, p: &Point) -> bool {
        let s = (p[0] * p[0] + p[1] * p[1]).sqrt();
        if s > self.radius {
            return false;
        }
        if let Some(h) = &self.hole {
            let (dx, dy) = (p[0] - h.center[0], p[1] - h.center[1]);
            if dx * dx + dy * dy < h.radius * h.radius {
                return false;
            }
        }
        s == 0.0 || angle_in(p[1].atan2(p[0]), self.phi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BallRegion {
    pub radius: f64,
    /// Azimuth range in the `x1 x2` plane.
    pub phi: (f64, f64),
    /// Polar range measured from `+x3`.
    pub theta: (f64, f64),
}

impl BallRegion {
    pub fn volume(&self) -> f64 {
        self.radius.powi(3) / 3.0 * (self.phi.1 - self.phi.0) * (self.theta.0.cos() - self.theta.1.cos())
    }

    pub fn contains(&self, p: &Point) -> bool {
        let s = norm(p);
        if s > self.radius {
            return false;
        }
        if s == 0.0 {
            return true;
        }
        let theta = (p[2] / s).clamp(-1.0, 1.0).acos();
        let eps = 1e-12;
        let azimuth_ok = p[0] == 0.0 && p[1] == 0.0 || angle_in(p[1].atan2(p[0]), self.phi);
        theta >= self.theta.0 - eps && theta <= self.theta.1 + eps && azimuth_ok
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// Axis-aligned box `lo <= x <= hi` (local coordinates).
    Rect {
        lo: Point,
        hi: Point,
    },
    Disk(DiskRegion),
    Ball(BallRegion),
}

impl Region {
    pub fn measure(&self, dim: usize) -> f64 {
        match self {
            Region::Rect { lo, hi } => (0..dim).map(|a| hi[a] - lo[a]).product(),
            Region::Disk(d) => d.area(),
            Region::Ball(b) => b.volume(),
        }
    }

    pub fn contains(&self, p: &Point, dim: usize) -> bool {
        match self {
            Region::Rect { lo, hi } => (0..dim).all(|a| p[a] >= lo[a] && p[a] <= hi[a]),
            Region::Disk(d) => d.contains(p),
            Region::Ball(b) => b.contains(p),
        }
    }
}

/// Geometry of one piece of `boundary(Omega_k)`, in node-local coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum PieceShape {
    /// Face `x[axis] == coord` of a box, spanning `lo..hi` in the other axes.
    BoxFace { axis: usize, coord: f64, outward: f64, lo: Point, hi: Point },
    /// Circular arc of the disk, `phi0 <= phi <= phi1`.
    Arc { radius: f64, phi0: f64, phi1: f64 },
    /// Radial segment along direction `phi`, `s0 <= s <= s1`.
    Segment { phi: f64, s0: f64, s1: f64, normal: Point },
    /// Arc of the hole circle, parametrized by the angle about its center.
    HoleArc { center: Point, radius: f64, theta0: f64, theta1: f64 },
    /// Part of the ball surface.
    SpherePatch { radius: f64, phi: (f64, f64), theta: (f64, f64) },
    /// Flat sector in the half-plane of azimuth `phi`.
    Meridian { phi: f64, radius: f64, theta: (f64, f64), normal: Point },
    /// Flat sector in the plane `x3 == 0`.
    Equator { radius: f64, phi: (f64, f64), normal: Point },
}

impl PieceShape {
    /// Length (2D) or area (3D).
    pub fn measure(&self, dim: usize) -> f64 {
        match *self {
            PieceShape::BoxFace { axis, lo, hi, .. } => {
                (0..dim).filter(|&a| a != axis).map(|a| hi[a] - lo[a]).product()
            }
            PieceShape::Arc { radius, phi0, phi1 } => radius * (phi1 - phi0),
            PieceShape::Segment { s0, s1, .. } => s1 - s0,
            PieceShape::HoleArc { radius, theta0, theta1, .. } => radius * (theta1 - theta0),
            PieceShape::SpherePatch { radius, phi, theta } => {
                radius * radius * (phi.1 - phi.0) * (theta.0.cos() - theta.1.cos())
            }
            PieceShape::Meridian { radius, theta, .. } => 0.5 * radius * radius * (theta.1 - theta.0),
            PieceShape::Equator { radius, phi, .. } => 0.5 * radius * radius * (phi.1 - phi.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PieceLocation {
    /// Inside the global domain.
    Interior,
    /// On the given face of the domain boundary.
    Boundary(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPiece {
    pub shape: PieceShape,
    pub location: PieceLocation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Subdomain {
    pub node: usize,
    pub center: Point,
    pub kind: ShapeKind,
    /// Unclipped side (box) or radius (disk/ball) after shrinking.
    pub size: f64,
    pub region: Region,
    pub pieces: Vec<BoundaryPiece>,
}

impl Subdomain {
    pub fn measure(&self, dim: usize) -> f64 {
        self.region.measure(dim)
    }

    /// True when no piece touches the domain boundary.
    pub fn is_unclipped(&self) -> bool {
        self.pieces.iter().all(|p| p.location == PieceLocation::Interior)
    }

    /// Exact description of the local geometry as a hashable key; equal
    /// keys mean congruent regions with identically classified pieces.
    pub fn signature(&self) -> Vec<u64> {
        let mut key = vec![self.kind as u64, self.size.to_bits()];
        let mut push = |v: &[f64]| key.extend(v.iter().map(|x| x.to_bits()));
        match &self.region {
            Region::Rect { lo, hi } => {
                push(lo);
                push(hi);
            }
            Region::Disk(d) => {
                push(&[d.radius, d.phi.0, d.phi.1]);
                if let Some(h) = &d.hole {
                    push(&h.center);
                    push(&[h.radius]);
                }
            }
            Region::Ball(b) => push(&[b.radius, b.phi.0, b.phi.1, b.theta.0, b.theta.1]),
        }
        for p in &self.pieces {
            key.push(match p.location {
                PieceLocation::Interior => u64::MAX,
                PieceLocation::Boundary(f) => f as u64,
            });
        }
        key
    }
}

/// Wraps an angle into `(-pi, pi]`.
fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(TAU);
    if w > PI {
        w -= TAU;
    }
    w
}

fn angle_in(a: f64, range: (f64, f64)) -> bool {
    let eps = 1e-12;
    let shifted = range.0 + (a - range.0).rem_euclid(TAU);
    shifted <= range.1 + eps || (a - range.0).rem_euclid(TAU) > TAU - eps
}

/// Quadrant bitmask (bit `q` for `q pi/2 <= phi <= (q+1) pi/2`) allowed by
/// the half-plane `sign * x[axis] >= 0`.
fn quadrants(axis: usize, sign: f64) -> u8 {
    match (axis, sign > 0.0) {
        (0, true) => 0b1001,
        (0, false) => 0b0110,
        (_, true) => 0b0011,
        (_, false) => 0b1100,
    }
}

fn quadrant_range(mask: u8) -> Option<(f64, f64)> {
    if mask == 0b1111 {
        return Some((0.0, TAU));
    }
    let start = (0..4).find(|&q| mask & (1 << q) != 0 && mask & (1 << ((q + 3) % 4)) == 0)?;
    let len = (0..4).take_while(|&i| mask & (1 << ((start + i) % 4)) != 0).count();
    Some((start as f64 * FRAC_PI_2, (start + len) as f64 * FRAC_PI_2))
}

/// Planar faces through `x` as `(face index, axis, sign)` where the domain
/// lies on `sign * (y[axis] - x[axis]) >= 0`.
fn planes_through(geometry: &DomainGeometry, x: &Point) -> Vec<(usize, usize, f64)> {
    geometry
        .faces_at(x)
        .into_iter()
        .filter_map(|f| match geometry.faces()[f].shape {
            FaceShape::Plane { axis, outward, .. } => Some((f, axis, -outward)),
            FaceShape::Sphere { .. } => None,
        })
        .collect()
}

fn curved_faces_through(geometry: &DomainGeometry, x: &Point) -> Vec<usize> {
    geometry
        .faces_at(x)
        .into_iter()
        .filter(|&f| matches!(geometry.faces()[f].shape, FaceShape::Sphere { .. }))
        .collect()
}

/// Distance from `x` to the nearest face not passing through `x`.
fn clearance(geometry: &DomainGeometry, x: &Point) -> f64 {
    let on = geometry.faces_at(x);
    geometry
        .faces()
        .iter()
        .enumerate()
        .filter(|(i, _)| !on.contains(i))
        .map(|(_, f)| f.distance(x))
        .fold(f64::INFINITY, f64::min)
}

/// Face index of the plane `axis` through `x` from a `planes_through` list.
fn plane_face(planes: &[(usize, usize, f64)], axis: usize) -> Option<usize> {
    planes.iter().find(|p| p.1 == axis).map(|p| p.0)
}

/// Builds the clipped subdomain of node `k`. `size` is the side of a box or
/// the radius of a disk/ball.
pub fn build_subdomain(
    k: usize,
    nodes: &NodeSet,
    shape: ShapeKind,
    size: f64,
    geometry: &DomainGeometry,
) -> Result<Subdomain> {
    if !(size > 0.0) || !size.is_finite() {
        return Err(Error::InvalidArgument(format!("subdomain size must be positive, got {size}")));
    }
    let x = *nodes.point(k);
    let dim = geometry.dim();
    let unsupported = |reason: &str| Error::UnsupportedClip { node: k, reason: reason.to_string() };
    if !geometry.contains(&x) {
        return Err(unsupported("node lies outside the domain"));
    }
    let curved = curved_faces_through(geometry, &x);
    let sub = if curved.is_empty() {
        match (shape, dim) {
            (ShapeKind::Box, _) => build_box(k, &x, size, geometry)?,
            (ShapeKind::Ball, 2) => build_disk(k, &x, size, geometry, None)?,
            (ShapeKind::Ball, _) => build_ball(k, &x, size, geometry)?,
        }
    } else {
        let face = &geometry.faces()[curved[0]];
        match (dim, face.shape) {
            (2, FaceShape::Sphere { radius, outward }) if outward < 0.0 && curved.len() == 1 => {
                let r = if shape == ShapeKind::Box { 0.5 * size } else { size };
                build_disk(k, &x, r, geometry, Some((curved[0], radius)))?
            }
            _ => return Err(unsupported("subdomain centered on a curved face that is not a circular hole")),
        }
    };
    Ok(sub)
}

fn build_box(k: usize, x: &Point, size: f64, geometry: &DomainGeometry) -> Result<Subdomain> {
    let dim = geometry.dim();
    let tol = geometry.tolerance();
    let (dom_lo, dom_hi) = match geometry.kind() {
        DomainKind::Box { lo, hi } => (lo, hi),
        DomainKind::PlateQuadrant { b, .. } => ([0.0; 3], [b, b, 0.0]),
        DomainKind::SphereOctant { b, .. } => ([0.0; 3], [b, b, b]),
    };
    // Largest half-side not reaching a curved face.
    let fits = |hs: f64| -> bool {
        let mut near = 0.0;
        let mut far = 0.0;
        for a in 0..dim {
            let l = (x[a] - hs).max(dom_lo[a]);
            let h = (x[a] + hs).min(dom_hi[a]);
            near += if l > 0.0 {
                l * l
            } else if h < 0.0 {
                h * h
            } else {
                0.0
            };
            far += l.abs().max(h.abs()).powi(2);
        }
        geometry.faces().iter().all(|f| match f.shape {
            FaceShape::Sphere { radius, outward } if outward < 0.0 => near.sqrt() >= radius - tol,
            FaceShape::Sphere { radius, .. } => far.sqrt() <= radius + tol,
            FaceShape::Plane { .. } => true,
        })
    };
    let mut hs = 0.5 * size;
    if !fits(hs) {
        let (mut lo, mut hi) = (0.0, hs);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hs = lo;
        if hs < 1e-3 * size {
            return Err(Error::UnsupportedClip {
                node: k,
                reason: "box collapses before clearing a curved face".into(),
            });
        }
    }
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    let mut pieces = Vec::with_capacity(2 * dim);
    let find_face = |axis: usize, outward: f64| {
        geometry
            .faces()
            .iter()
            .position(|f| matches!(f.shape, FaceShape::Plane { axis: a, outward: o, .. } if a == axis && o == outward))
    };
    let mut faces = Vec::new();
    for a in 0..dim {
        lo[a] = -hs;
        hi[a] = hs;
        let mut loc = [PieceLocation::Interior; 2];
        if x[a] - hs <= dom_lo[a] + tol {
            lo[a] = dom_lo[a] - x[a];
            let f = find_face(a, -1.0).ok_or_else(|| Error::UnsupportedClip {
                node: k,
                reason: format!("box reaches a domain bound without a face on axis {a}"),
            })?;
            loc[0] = PieceLocation::Boundary(f);
        }
        if x[a] + hs >= dom_hi[a] - tol {
            hi[a] = dom_hi[a] - x[a];
            let f = find_face(a, 1.0).ok_or_else(|| Error::UnsupportedClip {
                node: k,
                reason: format!("box reaches a domain bound without a face on axis {a}"),
            })?;
            loc[1] = PieceLocation::Boundary(f);
        }
        if hi[a] - lo[a] <= tol {
            return Err(Error::UnsupportedClip { node: k, reason: "degenerate clipped box".into() });
        }
        faces.push(loc);
    }
    for a in 0..dim {
        for (side, outward) in [(0usize, -1.0), (1, 1.0)] {
            let coord = if side == 0 { lo[a] } else { hi[a] };
            pieces.push(BoundaryPiece {
                shape: PieceShape::BoxFace { axis: a, coord, outward, lo, hi },
                location: faces[a][side],
            });
        }
    }
    Ok(Subdomain { node: k, center: *x, kind: ShapeKind::Box, size: 2.0 * hs, region: Region::Rect { lo, hi }, pieces })
}

fn build_disk(
    k: usize,
    x: &Point,
    radius: f64,
    geometry: &DomainGeometry,
    hole: Option<(usize, f64)>,
) -> Result<Subdomain> {
    let planes = planes_through(geometry, x);
    let mut mask = 0b1111u8;
    for &(_, axis, sign) in &planes {
        mask &= quadrants(axis, sign);
    }
    let phi = quadrant_range(mask).ok_or_else(|| Error::UnsupportedClip { node: k, reason: "empty sector".into() })?;
    let r = radius.min(clearance(geometry, x));
    if !(r > 1e-3 * radius) {
        return Err(Error::UnsupportedClip { node: k, reason: "disk collapses near a face".into() });
    }
    let mut pieces = Vec::new();
    let cut = hole.map(|(_, a)| HoleCut { center: [-x[0], -x[1], 0.0], radius: a });
    if let Some(h) = &cut {
        if r >= 2.0 * h.radius {
            return Err(Error::UnsupportedClip { node: k, reason: "disk swallows the hole".into() });
        }
    }
    let disk = DiskRegion { radius: r, phi, hole: cut };
    let slices = disk.slices();
    if slices.is_empty() {
        return Err(Error::UnsupportedClip { node: k, reason: "empty sector".into() });
    }
    for s in &slices {
        pieces.push(BoundaryPiece {
            shape: PieceShape::Arc { radius: r, phi0: s.phi0, phi1: s.phi1 },
            location: PieceLocation::Interior,
        });
    }
    let full = (phi.1 - phi.0 - TAU).abs() < 1e-12;
    if !full {
        for (edge, normal) in [(phi.0, [phi.0.sin(), -phi.0.cos(), 0.0]), (phi.1, [-phi.1.sin(), phi.1.cos(), 0.0])] {
            let first = slices.first().unwrap();
            let last = slices.last().unwrap();
            let slice = if edge == phi.0 { first } else { last };
            let touches = if edge == phi.0 { slice.phi0 == phi.0 } else { slice.phi1 == phi.1 };
            if !touches {
                continue;
            }
            let s0 = disk.s_min(edge, slice.cut);
            if r - s0 <= 1e-14 * r {
                continue;
            }
            let axis = if edge.cos().abs() < 0.5 { 0 } else { 1 };
            let face = plane_face(&planes, axis)
                .ok_or_else(|| Error::UnsupportedClip { node: k, reason: "sector edge without face".into() })?;
            pieces.push(BoundaryPiece {
                shape: PieceShape::Segment { phi: edge, s0, s1: r, normal },
                location: PieceLocation::Boundary(face),
            });
        }
    }
    if let (Some((face, a)), Some(h)) = (hole, &cut) {
        let theta_k = x[1].atan2(x[0]);
        let alpha = 2.0 * (r / (2.0 * a)).asin();
        let (t_lo, t_hi) = match geometry.kind() {
            DomainKind::PlateQuadrant { .. } => (0.0, FRAC_PI_2),
            _ => (-PI, PI),
        };
        let theta0 = (theta_k - alpha).max(t_lo);
        let theta1 = (theta_k + alpha).min(t_hi);
        if theta1 > theta0 {
            pieces.push(BoundaryPiece {
                shape: PieceShape::HoleArc { center: h.center, radius: a, theta0, theta1 },
                location: PieceLocation::Boundary(face),
            });
        }
    }
    Ok(Subdomain { node: k, center: *x, kind: ShapeKind::Ball, size: r, region: Region::Disk(disk), pieces })
}

fn build_ball(k: usize, x: &Point, radius: f64, geometry: &DomainGeometry) -> Result<Subdomain> {
    let planes = planes_through(geometry, x);
    let mut mask = 0b1111u8;
    let mut theta = (0.0, PI);
    for &(_, axis, sign) in &planes {
        if axis == 2 {
            theta = if sign > 0.0 { (0.0, FRAC_PI_2) } else { (FRAC_PI_2, PI) };
        } else {
            mask &= quadrants(axis, sign);
        }
    }
    let phi = quadrant_range(mask).ok_or_else(|| Error::UnsupportedClip { node: k, reason: "empty sector".into() })?;
    let r = radius.min(clearance(geometry, x));
    if !(r > 1e-3 * radius) {
        return Err(Error::UnsupportedClip { node: k, reason: "ball collapses near a face".into() });
    }
    let mut pieces = vec![BoundaryPiece {
        shape: PieceShape::SpherePatch { radius: r, phi, theta },
        location: PieceLocation::Interior,
    }];
    if (phi.1 - phi.0 - TAU).abs() > 1e-12 {
        for (edge, normal) in [(phi.0, [phi.0.sin(), -phi.0.cos(), 0.0]), (phi.1, [-phi.1.sin(), phi.1.cos(), 0.0])] {
            let axis = if edge.cos().abs() < 0.5 { 0 } else { 1 };
            let face = plane_face(&planes, axis)
                .ok_or_else(|| Error::UnsupportedClip { node: k, reason: "sector edge without face".into() })?;
            pieces.push(BoundaryPiece {
                shape: PieceShape::Meridian { phi: edge, radius: r, theta, normal },
                location: PieceLocation::Boundary(face),
            });
        }
    }
    if theta != (0.0, PI) {
        let normal = if theta.0 == 0.0 { [0.0, 0.0, -1.0] } else { [0.0, 0.0, 1.0] };
        let face = plane_face(&planes, 2).expect("theta restricted only by an x3 plane");
        pieces.push(BoundaryPiece {
            shape: PieceShape::Equator { radius: r, phi, normal },
            location: PieceLocation::Boundary(face),
        });
    }
    Ok(Subdomain {
        node: k,
        center: *x,
        kind: ShapeKind::Ball,
        size: r,
        region: Region::Ball(BallRegion { radius: r, phi, theta }),
        pieces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_beam_nodes, generate_box_nodes, BoussinesqLayout, PlateLayout};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn monte_carlo(sub: &Subdomain, geometry: &DomainGeometry, samples: usize, seed: u64) -> f64 {
        let dim = geometry.dim();
        let reach = match &sub.region {
            Region::Rect { lo, hi } => (0..dim).map(|a| lo[a].abs().max(hi[a].abs())).fold(0.0, f64::max),
            Region::Disk(d) => d.radius,
            Region::Ball(b) => b.radius,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        for _ in 0..samples {
            let mut local = [0.0; 3];
            for c in local.iter_mut().take(dim) {
                *c = rng.gen_range(-reach..reach);
            }
            let global = [sub.center[0] + local[0], sub.center[1] + local[1], sub.center[2] + local[2]];
            // Membership in the unclipped shape intersected with the domain.
            let in_shape = match sub.kind {
                ShapeKind::Box => (0..dim).all(|a| local[a].abs() <= 0.5 * sub.size),
                ShapeKind::Ball => norm(&local) <= sub.size,
            };
            if in_shape && geometry.contains(&global) {
                hits += 1;
            }
        }
        hits as f64 / samples as f64 * (2.0 * reach).powi(dim as i32)
    }

    #[test]
    fn interior_square_is_unclipped() {
        let nodes = generate_beam_nodes(33, 5, 8.0, 1.0).unwrap();
        let g = DomainGeometry::beam(8.0, 1.0);
        let k = (0..nodes.len()).find(|&i| nodes.point(i) == &[4.0, 0.5, 0.0]).unwrap();
        let sub = build_subdomain(k, &nodes, ShapeKind::Box, 0.25, &g).unwrap();
        assert!(sub.is_unclipped());
        assert_eq!(sub.pieces.len(), 4);
        assert_eq!(sub.region, Region::Rect { lo: [-0.125, -0.125, 0.0], hi: [0.125, 0.125, 0.0] });
        let disk = build_subdomain(k, &nodes, ShapeKind::Ball, 0.7 * 0.25, &g).unwrap();
        assert!(disk.is_unclipped());
        assert!((disk.measure(2) - PI * 0.175f64.powi(2)).abs() < 1e-14);
    }

    #[test]
    fn top_edge_square_is_half_height() {
        let nodes = generate_beam_nodes(33, 5, 8.0, 1.0).unwrap();
        let g = DomainGeometry::beam(8.0, 1.0);
        let k = (0..nodes.len()).find(|&i| nodes.point(i) == &[4.0, 1.0, 0.0]).unwrap();
        let sub = build_subdomain(k, &nodes, ShapeKind::Box, 0.25, &g).unwrap();
        assert!((sub.measure(2) - 0.25 * 0.125).abs() < 1e-15);
        let on_boundary: Vec<_> = sub.pieces.iter().filter(|p| p.location != PieceLocation::Interior).collect();
        assert_eq!(on_boundary.len(), 1);
        assert_eq!(on_boundary[0].location, PieceLocation::Boundary(3));
    }

    #[test]
    fn identical_neighborhoods_share_signatures() {
        let nodes = generate_beam_nodes(17, 5, 4.0, 1.0).unwrap();
        let g = DomainGeometry::beam(4.0, 1.0);
        let sigs: Vec<_> = (0..nodes.len())
            .map(|k| build_subdomain(k, &nodes, ShapeKind::Box, 0.25, &g).unwrap())
            .filter(|s| s.is_unclipped())
            .map(|s| s.signature())
            .collect();
        assert_eq!(sigs.len(), 15 * 3);
        assert!(sigs.iter().all(|s| s == &sigs[0]));
    }

    #[test]
    fn beam_measures_match_monte_carlo() {
        let nodes = generate_beam_nodes(9, 5, 2.0, 1.0).unwrap();
        let g = DomainGeometry::beam(2.0, 1.0);
        for shape in [ShapeKind::Box, ShapeKind::Ball] {
            for k in 0..nodes.len() {
                let sub = build_subdomain(k, &nodes, shape, 0.4, &g).unwrap();
                let mc = monte_carlo(&sub, &g, 200_000, k as u64);
                let exact = sub.measure(2);
                assert!((mc - exact).abs() < 0.01 * exact, "{shape:?} node {k}: {mc} vs {exact}");
            }
        }
    }

    #[test]
    fn plate_hole_sectors_match_monte_carlo() {
        let nodes = PlateLayout::standard(1.0, 4.0).generate().unwrap();
        let g = DomainGeometry::plate(1.0, 4.0);
        let mut on_hole = 0;
        for k in 0..nodes.len() {
            let p = nodes.point(k);
            let r = norm(p);
            let sub = build_subdomain(k, &nodes, ShapeKind::Box, 0.5, &g).unwrap();
            let needs_check = (r - 1.0).abs() < 1e-9 || p[0] < 1e-9 || p[1] < 1e-9 || r < 1.4;
            if !needs_check {
                continue;
            }
            if (r - 1.0).abs() < 1e-9 {
                on_hole += 1;
                assert!(matches!(&sub.region, Region::Disk(d) if d.hole.is_some()));
                assert!(sub.pieces.iter().any(|p| matches!(p.shape, PieceShape::HoleArc { .. })));
            }
            let mc = monte_carlo(&sub, &g, 200_000, k as u64);
            let exact = sub.measure(2);
            assert!((mc - exact).abs() < 0.01 * exact, "node {k} at {p:?}: {mc} vs {exact}");
        }
        assert_eq!(on_hole, 41);
    }

    #[test]
    fn hole_boundary_pieces_close_the_region() {
        // Divergence theorem: the outward normals integrate to zero.
        let nodes = PlateLayout::standard(1.0, 4.0).generate().unwrap();
        let g = DomainGeometry::plate(1.0, 4.0);
        for k in 0..nodes.len() {
            if (norm(nodes.point(k)) - 1.0).abs() > 1e-9 {
                continue;
            }
            let sub = build_subdomain(k, &nodes, ShapeKind::Ball, 0.3, &g).unwrap();
            let mut total = [0.0; 2];
            for piece in &sub.pieces {
                let n = 2000;
                match piece.shape {
                    PieceShape::Arc { radius, phi0, phi1 } => {
                        for i in 0..n {
                            let t = phi0 + (i as f64 + 0.5) / n as f64 * (phi1 - phi0);
                            let w = radius * (phi1 - phi0) / n as f64;
                            total[0] += w * t.cos();
                            total[1] += w * t.sin();
                        }
                    }
                    PieceShape::Segment { s0, s1, normal, .. } => {
                        total[0] += (s1 - s0) * normal[0];
                        total[1] += (s1 - s0) * normal[1];
                    }
                    PieceShape::HoleArc { radius, theta0, theta1, .. } => {
                        for i in 0..n {
                            let t = theta0 + (i as f64 + 0.5) / n as f64 * (theta1 - theta0);
                            let w = radius * (theta1 - theta0) / n as f64;
                            total[0] -= w * t.cos();
                            total[1] -= w * t.sin();
                        }
                    }
                    _ => unreachable!(),
                }
            }
            assert!(total[0].abs() < 1e-6 && total[1].abs() < 1e-6, "node {k}: {total:?}");
        }
    }

    #[test]
    fn cube_and_ball_clipping_in_three_dimensions() {
        let g = DomainGeometry::cuboid([0.0; 3], [1.0; 3], 3);
        let nodes = generate_box_nodes(&g, &[5, 5, 5]).unwrap();
        for shape in [ShapeKind::Box, ShapeKind::Ball] {
            for k in (0..nodes.len()).step_by(7) {
                let sub = build_subdomain(k, &nodes, shape, 0.5, &g).unwrap();
                let mc = monte_carlo(&sub, &g, 200_000, k as u64);
                let exact = sub.measure(3);
                assert!((mc - exact).abs() < 0.01 * exact, "{shape:?} node {k}: {mc} vs {exact}");
            }
        }
        let corner = (0..nodes.len()).find(|&i| nodes.point(i) == &[0.0; 3]).unwrap();
        let sub = build_subdomain(corner, &nodes, ShapeKind::Ball, 0.5, &g).unwrap();
        assert!((sub.measure(3) - PI * 0.125 / 6.0).abs() < 1e-14);
        assert_eq!(sub.pieces.len(), 4);
    }

    #[test]
    fn boussinesq_cubes_stay_inside_the_shell() {
        let nodes = BoussinesqLayout::for_target(10.0, 0.25, 400).generate().unwrap();
        let g = DomainGeometry::boussinesq(10.0, 0.25);
        for k in nodes.n_dirichlet()..nodes.len() {
            let size = 2.0 * nodes.spacing(k);
            let sub = build_subdomain(k, &nodes, ShapeKind::Box, size, &g).unwrap();
            let Region::Rect { lo, hi } = sub.region else { unreachable!() };
            for corner in 0..8 {
                let local = [
                    if corner & 1 == 0 { lo[0] } else { hi[0] },
                    if corner & 2 == 0 { lo[1] } else { hi[1] },
                    if corner & 4 == 0 { lo[2] } else { hi[2] },
                ];
                let y = [sub.center[0] + local[0], sub.center[1] + local[1], sub.center[2] + local[2]];
                assert!(norm(&y) <= 10.0 + 1e-9);
            }
            let near: Point = std::array::from_fn(|a| (sub.center[a] + lo[a]).max(0.0));
            assert!(norm(&near) >= 0.25 - 1e-9);
        }
    }

    #[test]
    fn quadrant_ranges() {
        assert_eq!(quadrant_range(0b1111), Some((0.0, TAU)));
        assert_eq!(quadrant_range(0b0011), Some((0.0, PI)));
        assert_eq!(quadrant_range(0b1001), Some((3.0 * FRAC_PI_2, 5.0 * FRAC_PI_2)));
        assert_eq!(quadrant_range(0b0001 & 0b0011), Some((0.0, FRAC_PI_2)));
        assert_eq!(quadrant_range(0), None);
    }
}
