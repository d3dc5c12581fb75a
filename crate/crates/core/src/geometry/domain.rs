use std::f64::consts::PI;

use super::{norm, BoundaryTag, Point};

/// Geometric description of one boundary face. Curved faces are spheres
/// (circles in 2D) centered at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FaceShape {
    /// `x[axis] == offset`, outward normal `outward * e_axis`.
    Plane { axis: usize, offset: f64, outward: f64 },
    /// `|x| == radius`, outward normal `outward * x / |x|`.
    Sphere { radius: f64, outward: f64 },
}

/// A boundary face plus the displacement components prescribed on it. The
/// complementary traction components are prescribed too (possibly zero).
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub name: &'static str,
    pub shape: FaceShape,
    pub prescribed: [bool; 3],
}

impl Face {
    pub fn outward_normal(&self, x: &Point) -> Point {
        match self.shape {
            FaceShape::Plane { axis, outward, .. } => {
                let mut n = [0.0; 3];
                n[axis] = outward;
                n
            }
            FaceShape::Sphere { outward, .. } => {
                let r = norm(x);
                [outward * x[0] / r, outward * x[1] / r, outward * x[2] / r]
            }
        }
    }

    pub fn distance(&self, x: &Point) -> f64 {
        match self.shape {
            FaceShape::Plane { axis, offset, .. } => (x[axis] - offset).abs(),
            FaceShape::Sphere { radius, .. } => (norm(x) - radius).abs(),
        }
    }

    pub fn is_traction_only(&self) -> bool {
        !self.prescribed.iter().any(|&p| p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainKind {
    /// Axis-aligned rectangle (2D) or cuboid (3D).
    Box { lo: Point, hi: Point },
    /// `{ |x| >= a, 0 <= x1 <= b, 0 <= x2 <= b }`.
    PlateQuadrant { a: f64, b: f64 },
    /// `{ r_inner <= |x| <= b, x1, x2, x3 >= 0 }`.
    SphereOctant { b: f64, r_inner: f64 },
}

#[derive(Clone, Debug)]
pub struct DomainGeometry {
    dim: usize,
    kind: DomainKind,
    faces: Vec<Face>,
    tol: f64,
}

const ALL: [bool; 3] = [true, true, true];
const NONE: [bool; 3] = [false, false, false];

impl DomainGeometry {
    /// Cantilever `[0, L] x [0, D]`, clamped (exact displacement) at `x1 = 0`,
    /// tractions on the remaining edges.
    pub fn beam(length: f64, depth: f64) -> Self {
        let mut g = Self::cuboid([0.0; 3], [length, depth, 0.0], 2);
        g.faces[0].prescribed = ALL;
        g.faces[0].name = "clamped";
        g
    }

    /// Axis-aligned box with all faces traction-only. Face order is
    /// `(axis 0, min), (axis 0, max), (axis 1, min), ...`.
    pub fn cuboid(lo: Point, hi: Point, dim: usize) -> Self {
        const NAMES: [&str; 6] = ["x1-min", "x1-max", "x2-min", "x2-max", "x3-min", "x3-max"];
        let mut faces = Vec::with_capacity(2 * dim);
        for axis in 0..dim {
            for (side, (offset, outward)) in [(lo[axis], -1.0), (hi[axis], 1.0)].into_iter().enumerate() {
                faces.push(Face {
                    name: NAMES[2 * axis + side],
                    shape: FaceShape::Plane { axis, offset, outward },
                    prescribed: NONE,
                });
            }
        }
        let size = (0..dim).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
        Self { dim, kind: DomainKind::Box { lo, hi }, faces, tol: 1e-10 * size }
    }

    /// Quarter plate with a circular hole: symmetry on `x1 = 0` (u1 fixed)
    /// and `x2 = 0` (u2 fixed), tractions on the hole and the outer edges.
    pub fn plate(a: f64, b: f64) -> Self {
        let faces = vec![
            Face { name: "hole", shape: FaceShape::Sphere { radius: a, outward: -1.0 }, prescribed: NONE },
            Face {
                name: "left",
                shape: FaceShape::Plane { axis: 0, offset: 0.0, outward: -1.0 },
                prescribed: [true, false, false],
            },
            Face {
                name: "bottom",
                shape: FaceShape::Plane { axis: 1, offset: 0.0, outward: -1.0 },
                prescribed: [false, true, false],
            },
            Face { name: "right", shape: FaceShape::Plane { axis: 0, offset: b, outward: 1.0 }, prescribed: NONE },
            Face { name: "top", shape: FaceShape::Plane { axis: 1, offset: b, outward: 1.0 }, prescribed: NONE },
        ];
        Self { dim: 2, kind: DomainKind::PlateQuadrant { a, b }, faces, tol: 1e-10 * b }
    }

    /// First octant of a spherical shell: exact displacements on both
    /// spheres, symmetry on `x1 = 0` and `x2 = 0`, free surface `x3 = 0`.
    pub fn boussinesq(b: f64, r_inner: f64) -> Self {
        let faces = vec![
            Face { name: "inner", shape: FaceShape::Sphere { radius: r_inner, outward: -1.0 }, prescribed: ALL },
            Face { name: "outer", shape: FaceShape::Sphere { radius: b, outward: 1.0 }, prescribed: ALL },
            Face {
                name: "yz-plane",
                shape: FaceShape::Plane { axis: 0, offset: 0.0, outward: -1.0 },
                prescribed: [true, false, false],
            },
            Face {
                name: "xz-plane",
                shape: FaceShape::Plane { axis: 1, offset: 0.0, outward: -1.0 },
                prescribed: [false, true, false],
            },
            Face { name: "surface", shape: FaceShape::Plane { axis: 2, offset: 0.0, outward: -1.0 }, prescribed: NONE },
        ];
        Self { dim: 3, kind: DomainKind::SphereOctant { b, r_inner }, faces, tol: 1e-10 * b }
    }

    pub fn with_face_prescribed(mut self, face: usize, prescribed: [bool; 3]) -> Self {
        self.faces[face].prescribed = prescribed;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Point membership in the closed domain (with a small tolerance).
    pub fn contains(&self, x: &Point) -> bool {
        let t = self.tol;
        match self.kind {
            DomainKind::Box { lo, hi } => (0..self.dim).all(|a| x[a] >= lo[a] - t && x[a] <= hi[a] + t),
            DomainKind::PlateQuadrant { a, b } => {
                x[0] >= -t && x[1] >= -t && x[0] <= b + t && x[1] <= b + t && norm(x) >= a - t
            }
            DomainKind::SphereOctant { b, r_inner } => {
                let r = norm(x);
                x.iter().all(|&c| c >= -t) && r >= r_inner - t && r <= b + t
            }
        }
    }

    /// Indices of the faces the point lies on.
    pub fn faces_at(&self, x: &Point) -> Vec<usize> {
        if !self.contains(x) {
            return Vec::new();
        }
        self.faces.iter().enumerate().filter(|(_, f)| f.distance(x) <= self.tol).map(|(i, _)| i).collect()
    }

    pub fn on_boundary(&self, x: &Point) -> bool {
        !self.faces_at(x).is_empty()
    }

    /// Union of the displacement masks of all faces through `x`.
    pub fn prescribed_mask(&self, x: &Point) -> [bool; 3] {
        let mut mask = NONE;
        for f in self.faces_at(x) {
            for c in 0..3 {
                mask[c] |= self.faces[f].prescribed[c];
            }
        }
        mask
    }

    /// Classifies a point as interior, Dirichlet (all components fixed),
    /// Neumann (tractions only) or mixed.
    pub fn classify(&self, x: &Point) -> BoundaryTag {
        if !self.on_boundary(x) {
            return BoundaryTag::Interior;
        }
        let mask = self.prescribed_mask(x);
        let fixed = mask[..self.dim].iter().filter(|&&m| m).count();
        if fixed == self.dim {
            BoundaryTag::Dirichlet
        } else if fixed == 0 {
            BoundaryTag::Neumann
        } else {
            BoundaryTag::Mixed(mask)
        }
    }

    /// Area (2D) or volume (3D).
    pub fn measure(&self) -> f64 {
        match self.kind {
            DomainKind::Box { lo, hi } => (0..self.dim).map(|a| hi[a] - lo[a]).product(),
            DomainKind::PlateQuadrant { a, b } => b * b - 0.25 * PI * a * a,
            DomainKind::SphereOctant { b, r_inner } => PI / 6.0 * (b.powi(3) - r_inner.powi(3)),
        }
    }

    pub fn extent(&self) -> f64 {
        match self.kind {
            DomainKind::Box { lo, hi } => (0..self.dim).map(|a| hi[a] - lo[a]).fold(0.0, f64::max),
            DomainKind::PlateQuadrant { b, .. } | DomainKind::SphereOctant { b, .. } => b,
        }
    }
}
