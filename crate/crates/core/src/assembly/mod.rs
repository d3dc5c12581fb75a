//! Global system assembly for DMLPG1/DMLPG5, essential boundary
//! conditions by MLS collocation, the sparse solve and field recovery.

mod recover;
mod rows;
mod solve;
mod system;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

pub use recover::{Field, FieldRecovery};
pub use rows::{
    collocation_row, dmlpg1_beta, dmlpg1_lambda, dmlpg1_row, dmlpg5_beta, dmlpg5_lambda, dmlpg5_row, mixed_bc_replace,
    BlockRow, FunctionalRow, RowContext, TestFunction,
};
pub use solve::{solve, Solution, MAX_RESIDUAL};
pub use system::{AssemblyStats, GlobalSystem, RowKind};

use crate::approx::{GaussianWeight, MlsContext, MomentSystem, PolyBasis};
use crate::benchmarks::ExactSolution;
use crate::error::{Error, Result};
use crate::geometry::{
    build_subdomain, BoundaryTag, DomainGeometry, NeighborGrid, NodeSet, Region, ShapeKind, Subdomain,
};
use crate::quadrature::{dmlpg1_box_points, dmlpg5_box_points, DEFAULT_CIRCLE_POINTS, MAX_GAUSS_POINTS};

/// Per-axis degree of the box bubble test function.
pub const BUBBLE_DEGREE: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Dmlpg1,
    Dmlpg5,
    Mlpg1,
    Mlpg5,
}

impl Method {
    pub fn is_direct(self) -> bool {
        matches!(self, Method::Dmlpg1 | Method::Dmlpg5)
    }

    /// True for the variants with a vanishing test function and a domain
    /// integral (1), false for the unit test function (5).
    pub fn is_variant1(self) -> bool {
        matches!(self, Method::Dmlpg1 | Method::Mlpg1)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Dmlpg1 => "dmlpg1",
            Method::Dmlpg5 => "dmlpg5",
            Method::Mlpg1 => "mlpg1",
            Method::Mlpg5 => "mlpg5",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dmlpg1" => Ok(Method::Dmlpg1),
            "dmlpg5" => Ok(Method::Dmlpg5),
            "mlpg1" => Ok(Method::Mlpg1),
            "mlpg5" => Ok(Method::Mlpg5),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssemblyConfig {
    pub method: Method,
    /// Polynomial degree `m` of the MLS/GMLS basis.
    pub degree: usize,
    /// Shape parameter of the Gaussian weight.
    pub epsilon: f64,
    pub shape: ShapeKind,
    /// Box side or disk/ball radius as a multiple of the local node spacing.
    pub size_factor: f64,
    /// Gauss points per axis on boxes; `None` uses the exact count for the
    /// direct methods and 10 for the classical ones.
    pub box_points: Option<usize>,
    /// Points per direction on disks and balls.
    pub circle_points: usize,
    /// Scale weak-form rows by `1 / measure(Omega_k)`.
    pub row_scaling: bool,
    /// Share `lambda_k(p)` between congruent interior subdomains.
    pub use_cache: bool,
}

impl AssemblyConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            degree: 2,
            epsilon: 4.0,
            shape: ShapeKind::Box,
            size_factor: 1.0,
            box_points: None,
            circle_points: DEFAULT_CIRCLE_POINTS,
            row_scaling: false,
            use_cache: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidArgument(what));
        if !(1..=4).contains(&self.degree) {
            return bad(format!("basis degree must lie in 1..=4, got {}", self.degree));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("weight shape parameter must be positive, got {}", self.epsilon));
        }
        if !(self.size_factor > 0.0 && self.size_factor.is_finite()) {
            return bad(format!("subdomain size factor must be positive, got {}", self.size_factor));
        }
        for (name, n) in [("box_points", self.box_points.unwrap_or(1)), ("circle_points", self.circle_points)] {
            if !(1..=MAX_GAUSS_POINTS).contains(&n) {
                return bad(format!("{name} must lie in 1..={MAX_GAUSS_POINTS}, got {n}"));
            }
        }
        Ok(())
    }

    pub fn box_points(&self) -> usize {
        self.box_points.unwrap_or(match self.method {
            Method::Dmlpg1 => dmlpg1_box_points(self.degree, BUBBLE_DEGREE),
            Method::Dmlpg5 => dmlpg5_box_points(self.degree),
            Method::Mlpg1 | Method::Mlpg5 => 10,
        })
    }

    /// Points per axis or direction for a given subdomain.
    pub fn points_for(&self, sub: &Subdomain) -> usize {
        match sub.region {
            Region::Rect { .. } => self.box_points(),
            _ => self.circle_points,
        }
    }
}

/// Everything a node's rows depend on, shared by the direct and the
/// classical assemblers.
pub(crate) struct Assembler<'a> {
    pub nodes: &'a NodeSet,
    pub geometry: &'a DomainGeometry,
    pub config: &'a AssemblyConfig,
    pub ctx: MlsContext<'a>,
    pub rc: RowContext<'a>,
}

/// Rows of one node before they are merged into the global matrix.
pub(crate) struct NodeRows {
    pub kind: RowKind,
    pub rows: Vec<BlockRow>,
    pub shape_evaluations: u64,
}

impl<'a> Assembler<'a> {
    pub fn new(
        nodes: &'a NodeSet,
        geometry: &'a DomainGeometry,
        grid: &'a NeighborGrid,
        data: &'a dyn ExactSolution,
        config: &'a AssemblyConfig,
    ) -> Result<Self> {
        config.validate()?;
        let dim = nodes.dim();
        if geometry.dim() != dim || data.dim() != dim {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: nodes {dim}, geometry {}, material {}",
                geometry.dim(),
                data.dim()
            )));
        }
        let basis = PolyBasis::new(dim, config.degree)?;
        let ctx = MlsContext::new(nodes.points(), grid, basis.clone(), GaussianWeight::new(config.epsilon));
        let rc = RowContext::new(basis, data, geometry, GaussianWeight::new(config.epsilon));
        Ok(Self { nodes, geometry, config, ctx, rc })
    }

    pub fn dim(&self) -> usize {
        self.nodes.dim()
    }

    pub fn moment_system(&self, k: usize) -> Result<MomentSystem> {
        self.ctx.moment_system(self.nodes.point(k), self.nodes.support(k))
    }

    /// Clipped subdomain of a node that carries weak-form rows.
    pub fn subdomain(&self, k: usize) -> Result<Option<Subdomain>> {
        if self.nodes.tag(k) == BoundaryTag::Dirichlet {
            return Ok(None);
        }
        let size = self.config.size_factor * self.nodes.spacing(k);
        build_subdomain(k, self.nodes, self.config.shape, size, self.geometry).map(Some)
    }

    /// Collocation rows for a node whose displacement is fully prescribed.
    pub fn dirichlet_rows(&self, k: usize) -> Result<NodeRows> {
        let sys = self.moment_system(k)?;
        let u = self.rc.data.displacement(self.nodes.point(k));
        let rows = (0..self.dim()).map(|i| collocation_row(&sys, i, self.dim(), u[i])).collect();
        Ok(NodeRows { kind: RowKind::Collocation, rows, shape_evaluations: 0 })
    }

    /// Applies row scaling and mixed replacement to weak-form rows.
    pub fn finish_weak(&self, k: usize, sys: &MomentSystem, sub: &Subdomain, mut rows: Vec<BlockRow>) -> NodeRows {
        if self.config.row_scaling {
            let s = 1.0 / sub.measure(self.dim());
            for r in &mut rows {
                r.scale(s);
            }
        }
        let mut kind = RowKind::WeakForm;
        if let BoundaryTag::Mixed(mask) = self.nodes.tag(k) {
            let u = self.rc.data.displacement(self.nodes.point(k));
            rows = mixed_bc_replace(rows, &mask, sys, &u);
            kind = RowKind::Mixed;
        }
        NodeRows { kind, rows, shape_evaluations: 0 }
    }

    pub fn build(&self, rows: Vec<NodeRows>, mut stats: AssemblyStats, start: Instant) -> GlobalSystem {
        stats.shape_evaluations = rows.iter().map(|r| r.shape_evaluations).sum();
        stats.integrated_subdomains = rows.iter().filter(|r| r.kind != RowKind::Collocation).count();
        let system = GlobalSystem::from_node_rows(self.dim(), rows, stats);
        let mut system = system;
        system.stats.assembly_seconds = start.elapsed().as_secs_f64();
        system
    }
}

/// Collects per-node results in node order, reporting the first failure.
pub(crate) fn collect_in_order<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().enumerate().map(|(k, r)| r.map_err(|e| e.at_node(k))).collect()
}

/// Groups cacheable subdomains by their signature and support radius.
/// Returns the representative node of each node's group (itself when not
/// cacheable) and fills the grouping statistics.
pub(crate) fn cache_groups(subs: &[Option<Subdomain>], supports: &[f64], stats: &mut AssemblyStats) -> Vec<usize> {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut rep: Vec<usize> = (0..subs.len()).collect();
    for (k, sub) in subs.iter().enumerate() {
        let Some(sub) = sub else { continue };
        if !sub.is_unclipped() {
            continue;
        }
        let mut key = sub.signature();
        key.push(supports[k].to_bits());
        let g = *index.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(k);
        rep[k] = groups[g][0];
    }
    stats.cacheable_nodes = groups.iter().map(Vec::len).sum();
    stats.signature_groups = groups.len();
    stats.modal_group_size = groups.iter().map(Vec::len).max().unwrap_or(0);
    stats.cache_hits = groups.iter().map(|g| g.len() - 1).sum();
    rep
}

/// Assembles `K u = R` for DMLPG1 or DMLPG5. Boundary data, body forces
/// and the material come from `data`.
pub fn assemble(
    nodes: &NodeSet,
    geometry: &DomainGeometry,
    data: &dyn ExactSolution,
    config: &AssemblyConfig,
) -> Result<GlobalSystem> {
    if !config.method.is_direct() {
        return Err(Error::InvalidArgument(format!("{} is a classical method; use the MLPG assembler", config.method)));
    }
    let start = Instant::now();
    let grid = NeighborGrid::new(nodes.points(), nodes.dim(), nodes.max_support());
    let asm = Assembler::new(nodes, geometry, &grid, data, config)?;
    let n = nodes.len();

    let subs = collect_in_order((0..n).into_par_iter().map(|k| asm.subdomain(k)).collect())?;
    let mut stats = AssemblyStats::default();
    let rep = cache_groups(&subs, nodes.supports(), &mut stats);
    if !config.use_cache {
        stats.cache_hits = 0;
    }
    let own = |k: usize| !config.use_cache || rep[k] == k;

    let lambda = |k: usize, sub: &Subdomain| -> Result<Vec<f64>> {
        let pts = config.points_for(sub);
        match config.method {
            Method::Dmlpg1 => dmlpg1_lambda(sub, nodes.support(k), &asm.rc, pts),
            _ => dmlpg5_lambda(sub, nodes.support(k), &asm.rc, pts),
        }
    };
    let lambdas: Vec<Option<Vec<f64>>> = collect_in_order(
        (0..n)
            .into_par_iter()
            .map(|k| match &subs[k] {
                Some(sub) if own(k) => lambda(k, sub).map(Some),
                _ => Ok(None),
            })
            .collect(),
    )?;

    let rows = collect_in_order(
        (0..n)
            .into_par_iter()
            .map(|k| {
                let Some(sub) = &subs[k] else {
                    return asm.dirichlet_rows(k);
                };
                let lam = if own(k) { &lambdas[k] } else { &lambdas[rep[k]] };
                let lam = lam.as_ref().expect("representative rows are computed first");
                let pts = config.points_for(sub);
                let beta = match config.method {
                    Method::Dmlpg1 => dmlpg1_beta(sub, &asm.rc, pts)?,
                    _ => dmlpg5_beta(sub, &asm.rc, pts)?,
                };
                let row = FunctionalRow::new(k, nodes.dim(), asm.rc.basis.len(), lam.clone(), beta);
                let sys = asm.moment_system(k)?;
                let block = row.scatter(&sys);
                Ok(asm.finish_weak(k, &sys, sub, block))
            })
            .collect(),
    )?;
    Ok(asm.build(rows, stats, start))
}
