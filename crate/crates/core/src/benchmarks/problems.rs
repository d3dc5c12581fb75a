use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use super::exact::{BeamSolution, BoussinesqSolution, ExactSolution, PlateSolution, PolynomialSolution};
use crate::elasticity::Material;
use crate::error::{Error, Result};
use crate::geometry::{
    generate_beam_nodes, generate_box_nodes, norm, BoussinesqLayout, DomainGeometry, NodeSet, PlateLayout, Point,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Beam,
    Plate,
    Boussinesq,
    Manufactured,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Beam => "beam",
            ProblemKind::Plate => "plate",
            ProblemKind::Boussinesq => "boussinesq",
            ProblemKind::Manufactured => "manufactured",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beam" => Ok(ProblemKind::Beam),
            "plate" => Ok(ProblemKind::Plate),
            "boussinesq" => Ok(ProblemKind::Boussinesq),
            "manufactured" => Ok(ProblemKind::Manufactured),
            other => Err(Error::InvalidArgument(format!("unknown problem {other:?}"))),
        }
    }
}

/// Points at which errors are measured.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationMesh {
    pub description: String,
    pub points: Vec<Point>,
}

/// A discretized benchmark: geometry, nodes with supports, and the exact
/// solution providing boundary data and error references.
pub struct Benchmark {
    pub kind: ProblemKind,
    pub geometry: DomainGeometry,
    pub nodes: NodeSet,
    pub exact: Box<dyn ExactSolution>,
    pub eval: EvaluationMesh,
}

impl Benchmark {
    pub fn material(&self) -> &Material {
        self.exact.material()
    }

    /// Replaces Young's modulus and Poisson's ratio of a closed-form
    /// benchmark, keeping its stress mode. Manufactured problems take their
    /// material at construction.
    pub fn with_material(mut self, young: f64, poisson: f64) -> Result<Self> {
        let material = Material::new(young, poisson, self.material().mode)?;
        self.exact = match self.kind {
            ProblemKind::Beam => Box::new(BeamSolution { material, ..BeamSolution::standard() }),
            ProblemKind::Plate => Box::new(PlateSolution { material, ..PlateSolution::standard() }),
            ProblemKind::Boussinesq => Box::new(BoussinesqSolution { material, ..BoussinesqSolution::standard() }),
            ProblemKind::Manufactured => {
                return Err(Error::InvalidArgument("pass the material to manufactured_benchmark instead".into()))
            }
        };
        Ok(self)
    }
}

/// Beam parameters; `L = 8`, `D = 1`, `P = 1`, `E = 1`, `nu = 0.25`.
pub const BEAM_LENGTH: f64 = 8.0;
pub const BEAM_DEPTH: f64 = 1.0;
/// Plate parameters; quarter of a `2b x 2b` plate with a hole of radius `a`.
pub const PLATE_HOLE: f64 = 1.0;
pub const PLATE_HALF_WIDTH: f64 = 4.0;
/// Boussinesq shell: outer radius and inner radius `b / 40`.
pub const BOUSSINESQ_RADIUS: f64 = 10.0;
pub const BOUSSINESQ_INNER: f64 = 0.25;
pub const BOUSSINESQ_NODES: usize = 1386;

/// Beam grid at refinement `level`: `(32 * 2^level + 1) x (4 * 2^level + 1)`.
pub fn beam_grid(level: usize) -> (usize, usize) {
    (32 * (1 << level) + 1, 4 * (1 << level) + 1)
}

pub fn beam_benchmark(nx: usize, ny: usize, degree: usize, support_factor: f64) -> Result<Benchmark> {
    let exact = BeamSolution::standard();
    let mut nodes = generate_beam_nodes(nx, ny, exact.length, exact.depth)?;
    nodes.assign_support(degree, |_| support_factor);
    let (ex, ey) = (161, 21);
    let points = (0..ey)
        .flat_map(|j| {
            (0..ex).map(move |i| {
                [BEAM_LENGTH * (i as f64 + 0.5) / ex as f64, BEAM_DEPTH * (j as f64 + 0.5) / ey as f64, 0.0]
            })
        })
        .collect();
    Ok(Benchmark {
        kind: ProblemKind::Beam,
        geometry: DomainGeometry::beam(exact.length, exact.depth),
        nodes,
        exact: Box::new(exact),
        eval: EvaluationMesh { description: format!("beam {ex}x{ey} cell-centered grid"), points },
    })
}

/// Plate with `refinements` halvings of the base polar layout. Supports are
/// `near_factor * m * h` within `near_radius` of the origin and
/// `far_factor * m * h` beyond.
pub fn plate_benchmark(
    refinements: usize,
    degree: usize,
    near_factor: f64,
    far_factor: f64,
    near_radius: f64,
) -> Result<Benchmark> {
    let exact = PlateSolution::standard();
    let (a, b) = (PLATE_HOLE, PLATE_HALF_WIDTH);
    let mut nodes = PlateLayout::standard(a, b).refined(refinements).generate()?;
    nodes.assign_support(degree, |x| if norm(x) <= near_radius { near_factor } else { far_factor });
    let n = 80;
    let r_max = b - 0.05;
    let mut points = Vec::with_capacity(n * n);
    for j in 0..n {
        let t = FRAC_PI_2 * j as f64 / (n - 1) as f64;
        for i in 0..n {
            let r = a + (r_max - a) * i as f64 / (n - 1) as f64;
            points.push([r * t.cos(), r * t.sin(), 0.0]);
        }
    }
    Ok(Benchmark {
        kind: ProblemKind::Plate,
        geometry: DomainGeometry::plate(a, b),
        nodes,
        exact: Box::new(exact),
        eval: EvaluationMesh { description: format!("plate {n}x{n} polar grid, r in [{a}, {r_max}]"), points },
    })
}

/// Boussinesq shell with about `target` nodes and supports scaled with the
/// local layer spacing.
pub fn boussinesq_benchmark(target: usize, degree: usize, support_factor: f64) -> Result<Benchmark> {
    let exact = BoussinesqSolution::standard();
    let mut nodes = BoussinesqLayout::for_target(BOUSSINESQ_RADIUS, BOUSSINESQ_INNER, target).generate()?;
    nodes.assign_support(degree, |_| support_factor);
    let mut points = Vec::new();
    let n = 40;
    for j in 0..n {
        let phi = FRAC_PI_2 * j as f64 / (n - 1) as f64;
        for i in 0..n {
            let r = 0.3 + (9.0 - 0.3) * i as f64 / (n - 1) as f64;
            points.push([r * phi.cos(), r * phi.sin(), 0.0]);
        }
    }
    let shell = 10;
    for l in 0..shell {
        let rho = 0.5 + (9.0 - 0.5) * l as f64 / (shell - 1) as f64;
        for a in 0..shell {
            let theta = FRAC_PI_2 * (a as f64 + 0.5) / shell as f64;
            for c in 0..shell {
                let phi = FRAC_PI_2 * (c as f64 + 0.5) / shell as f64;
                points.push([rho * theta.sin() * phi.cos(), rho * theta.sin() * phi.sin(), rho * theta.cos()]);
            }
        }
    }
    Ok(Benchmark {
        kind: ProblemKind::Boussinesq,
        geometry: DomainGeometry::boussinesq(BOUSSINESQ_RADIUS, BOUSSINESQ_INNER),
        nodes,
        exact: Box::new(exact),
        eval: EvaluationMesh {
            description: format!("boussinesq {n}x{n} surface grid, r in [0.3, 9], plus {shell}^3 shell sample"),
            points,
        },
    })
}

/// Unit square or cube with `n` nodes per axis, clamped on `x1 = 0` and
/// loaded by exact tractions elsewhere, carrying a polynomial field of
/// degree `field_degree` (1 or 2) with its balancing body force. The
/// dimension follows the material's stress mode.
pub fn manufactured_benchmark(
    material: Material,
    n: usize,
    field_degree: usize,
    degree: usize,
    support_factor: f64,
) -> Result<Benchmark> {
    let dim = material.dim();
    let geometry = match dim {
        2 => DomainGeometry::cuboid([0.0; 3], [1.0, 1.0, 0.0], 2),
        _ => DomainGeometry::cuboid([0.0; 3], [1.0; 3], 3),
    };
    let geometry = geometry.with_face_prescribed(0, [true; 3]);
    let mut nodes = generate_box_nodes(&geometry, &vec![n; dim])?;
    nodes.assign_support(degree, |_| support_factor);
    let exact = manufactured_field(field_degree, material)?;
    let m: usize = 11;
    let total = m.pow(dim as u32);
    let points = (0..total)
        .map(|mut flat| {
            let mut p = [0.0; 3];
            for c in p.iter_mut().take(dim) {
                *c = ((flat % m) as f64 + 0.5) / m as f64;
                flat /= m;
            }
            p
        })
        .collect();
    Ok(Benchmark {
        kind: ProblemKind::Manufactured,
        geometry,
        nodes,
        exact: Box::new(exact),
        eval: EvaluationMesh {
            description: format!("unit {dim}D cell-centered grid with {m} points per axis"),
            points,
        },
    })
}

/// Fixed polynomial field with deterministic, nonzero coefficients.
pub fn manufactured_field(field_degree: usize, material: Material) -> Result<PolynomialSolution> {
    let dim = material.dim();
    let q = crate::approx::PolyBasis::new(dim, field_degree)?.len();
    let coefficients = (0..dim).map(|i| (0..q).map(|n| 0.1 * ((3 * i + 7 * n) % 11) as f64 - 0.45).collect()).collect();
    PolynomialSolution::new(material, field_degree, coefficients)
}
