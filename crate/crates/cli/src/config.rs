//! Run description read from TOML.
//!
//! Every section is optional except the top-level `problem` key. Unknown
//! keys are rejected.

use std::path::PathBuf;

use dmlpg::assembly::Method;
use dmlpg::benchmarks::{ProblemKind, BOUSSINESQ_NODES};
use dmlpg::elasticity::{Material, StressMode};
use dmlpg::geometry::ShapeKind;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: Option<String>,
    method: Option<String>,
    compare_with: Option<String>,
    degree: Option<usize>,
    epsilon: Option<f64>,
    levels: Option<Vec<usize>>,
    output: Option<PathBuf>,
    timings: Option<bool>,
    #[serde(default)]
    subdomain: RawSubdomain,
    #[serde(default)]
    support: RawSupport,
    #[serde(default)]
    quadrature: RawQuadrature,
    #[serde(default)]
    material: RawMaterial,
    #[serde(default)]
    manufactured: RawManufactured,
    #[serde(default)]
    boussinesq: RawBoussinesq,
    #[serde(default)]
    solver: RawSolver,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubdomain {
    shape: Option<String>,
    size_factor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSupport {
    factor: Option<f64>,
    far_factor: Option<f64>,
    near_radius: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    box_points: Option<usize>,
    circle_points: Option<usize>,
    mlpg_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    young: Option<f64>,
    poisson: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManufactured {
    dim: Option<usize>,
    field_degree: Option<usize>,
    nodes_per_axis: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBoussinesq {
    nodes: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    row_scaling: Option<bool>,
    cache: Option<bool>,
}

/// Validated run description with defaults filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub method: Method,
    /// Second method run by `compare`.
    pub compare_with: Method,
    pub degree: usize,
    pub epsilon: f64,
    /// Refinement levels; `solve` uses the last one.
    pub levels: Vec<usize>,
    pub shape: ShapeKind,
    pub size_factor: f64,
    /// `delta = factor * m * h`; on the plate this applies near the hole.
    pub support_factor: f64,
    pub far_factor: f64,
    pub near_radius: f64,
    pub box_points: Option<usize>,
    pub circle_points: usize,
    /// Points per axis on boxes for the classical methods.
    pub mlpg_points: usize,
    pub young: f64,
    pub poisson: f64,
    pub dim: usize,
    pub field_degree: usize,
    pub nodes_per_axis: usize,
    pub boussinesq_nodes: usize,
    pub row_scaling: bool,
    pub use_cache: bool,
    pub output: Option<PathBuf>,
    /// Write wall times into CSV files; off gives byte-identical reruns.
    pub timings: bool,
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::invalid(key, format!("must be a positive number, got {v}")))
    }
}

fn at_least(key: &str, v: usize, min: usize) -> Result<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(CliError::invalid(key, format!("must be at least {min}, got {v}")))
    }
}

fn method(key: &str, s: &str) -> Result<Method> {
    s.parse().map_err(|_| CliError::invalid(key, format!("must be one of dmlpg1, dmlpg5, mlpg1, mlpg5, got {s:?}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        Self::resolve(raw)
    }

    fn resolve(raw: RawConfig) -> Result<Self> {
        let name = raw.problem.as_deref().map(str::trim).unwrap_or("");
        if name.is_empty() {
            return Err(CliError::invalid("problem", "is required (beam, plate, boussinesq or manufactured)"));
        }
        let problem: ProblemKind = name.parse().map_err(|_| {
            CliError::invalid("problem", format!("must be beam, plate, boussinesq or manufactured, got {name:?}"))
        })?;
        let method_v = method("method", raw.method.as_deref().unwrap_or("dmlpg1"))?;
        let default_other = match method_v {
            Method::Dmlpg1 => Method::Mlpg1,
            Method::Dmlpg5 => Method::Mlpg5,
            Method::Mlpg1 => Method::Dmlpg1,
            Method::Mlpg5 => Method::Dmlpg5,
        };
        let compare_with = match &raw.compare_with {
            Some(s) => method("compare_with", s)?,
            None => default_other,
        };
        let degree = at_least("degree", raw.degree.unwrap_or(2), 1)?;
        if degree > 4 {
            return Err(CliError::invalid("degree", format!("must be at most 4, got {degree}")));
        }
        let epsilon = positive("epsilon", raw.epsilon.unwrap_or(4.0))?;
        let levels = raw.levels.unwrap_or_else(|| vec![0, 1, 2]);
        if levels.is_empty() {
            return Err(CliError::invalid("levels", "must list at least one refinement level"));
        }
        if let Some(&l) = levels.iter().find(|&&l| l > 6) {
            return Err(CliError::invalid("levels", format!("refinement level {l} exceeds the maximum of 6")));
        }

        let shape = match raw.subdomain.shape.as_deref().unwrap_or("box") {
            "box" | "square" | "cube" => ShapeKind::Box,
            "ball" | "disk" | "circle" => ShapeKind::Ball,
            other => return Err(CliError::invalid("subdomain.shape", format!("must be box or ball, got {other:?}"))),
        };
        let default_size = if shape == ShapeKind::Box { 1.0 } else { 0.7 };
        let size_factor = positive("subdomain.size_factor", raw.subdomain.size_factor.unwrap_or(default_size))?;

        let default_support = match problem {
            ProblemKind::Beam | ProblemKind::Plate => 2.0,
            ProblemKind::Boussinesq | ProblemKind::Manufactured => 1.5,
        };
        let support_factor = positive("support.factor", raw.support.factor.unwrap_or(default_support))?;
        let far_factor = positive("support.far_factor", raw.support.far_factor.unwrap_or(2.5))?;
        let near_radius = positive("support.near_radius", raw.support.near_radius.unwrap_or(2.0))?;

        let box_points = match raw.quadrature.box_points {
            Some(n) => Some(at_least("quadrature.box_points", n, 1)?),
            None => None,
        };
        let circle_points = at_least("quadrature.circle_points", raw.quadrature.circle_points.unwrap_or(10), 1)?;
        let mlpg_points = at_least("quadrature.mlpg_points", raw.quadrature.mlpg_points.unwrap_or(10), 1)?;

        let (default_young, mode) = match problem {
            ProblemKind::Boussinesq => (1000.0, StressMode::Solid),
            _ => (1.0, StressMode::PlaneStress),
        };
        let young = positive("material.young", raw.material.young.unwrap_or(default_young))?;
        let poisson = raw.material.poisson.unwrap_or(0.25);
        if !(poisson > 0.0 && poisson < 0.5) {
            return Err(CliError::invalid("material.poisson", format!("must lie in (0, 0.5), got {poisson}")));
        }
        Material::new(young, poisson, mode).map_err(|e| CliError::invalid("material", e.to_string()))?;

        let dim = raw.manufactured.dim.unwrap_or(2);
        if dim != 2 && dim != 3 {
            return Err(CliError::invalid("manufactured.dim", format!("must be 2 or 3, got {dim}")));
        }
        let field_degree = raw.manufactured.field_degree.unwrap_or(2);
        if !(1..=2).contains(&field_degree) {
            return Err(CliError::invalid("manufactured.field_degree", format!("must be 1 or 2, got {field_degree}")));
        }
        let nodes_per_axis = at_least("manufactured.nodes_per_axis", raw.manufactured.nodes_per_axis.unwrap_or(5), 3)?;
        let boussinesq_nodes = at_least("boussinesq.nodes", raw.boussinesq.nodes.unwrap_or(BOUSSINESQ_NODES), 50)?;

        Ok(Self {
            problem,
            method: method_v,
            compare_with,
            degree,
            epsilon,
            levels,
            shape,
            size_factor,
            support_factor,
            far_factor,
            near_radius,
            box_points,
            circle_points,
            mlpg_points,
            young,
            poisson,
            dim,
            field_degree,
            nodes_per_axis,
            boussinesq_nodes,
            row_scaling: raw.solver.row_scaling.unwrap_or(false),
            use_cache: raw.solver.cache.unwrap_or(true),
            output: raw.output,
            timings: raw.timings.unwrap_or(true),
        })
    }

    pub fn stress_mode(&self) -> StressMode {
        match (self.problem, self.dim) {
            (ProblemKind::Boussinesq, _) | (ProblemKind::Manufactured, 3) => StressMode::Solid,
            _ => StressMode::PlaneStress,
        }
    }

    pub fn shape_name(&self) -> &'static str {
        match self.shape {
            ShapeKind::Box => "box",
            ShapeKind::Ball => "ball",
        }
    }
}
