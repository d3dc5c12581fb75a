//! Classical MLPG1 and MLPG5: the local weak forms integrated against the
//! MLS shape functions and their standard derivatives at every quadrature
//! point.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::approx::{standard_derivatives, ShapeFunctionEvaluation};
use crate::assembly::{
    cache_groups, collect_in_order, Assembler, AssemblyConfig, AssemblyStats, BlockRow, GlobalSystem, Method, NodeRows,
    TestFunction,
};
use crate::benchmarks::ExactSolution;
use crate::elasticity::{sandwich, traction};
use crate::error::{Error, Result};
use crate::geometry::{add, DomainGeometry, NeighborGrid, NodeSet, PieceLocation, Point, Subdomain};
use crate::quadrature::{rule_clipped, rule_piece};

/// Accumulates `d x d` blocks per global node.
struct BlockAccumulator {
    dim: usize,
    blocks: BTreeMap<usize, [[f64; 3]; 3]>,
    beta: [f64; 3],
}

impl BlockAccumulator {
    fn add(
        &mut self,
        ev: &ShapeFunctionEvaluation,
        a: &Point,
        mask: &[bool; 3],
        scale: f64,
        rc: &crate::assembly::RowContext<'_>,
    ) {
        for (r, &node) in ev.active.iter().enumerate() {
            let blk = sandwich(a, &rc.voigt, &ev.gradients[r], self.dim);
            let acc = self.blocks.entry(node).or_insert([[0.0; 3]; 3]);
            for i in (0..self.dim).filter(|&i| mask[i]) {
                for j in 0..self.dim {
                    acc[i][j] += scale * blk[i][j];
                }
            }
        }
    }

    fn rows(self) -> Vec<BlockRow> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                let mut row = BlockRow { rhs: self.beta[i], ..Default::default() };
                for (&node, blk) in &self.blocks {
                    for j in 0..d {
                        row.cols.push(d * node + j);
                        row.vals.push(blk[i][j]);
                    }
                }
                row
            })
            .collect()
    }
}

impl<'a> Assembler<'a> {
    fn shape_at(&self, x: &Point, delta: f64) -> Result<ShapeFunctionEvaluation> {
        let sys = self.ctx.moment_system(x, delta)?;
        Ok(standard_derivatives(&self.ctx, &sys))
    }

    /// Weak-form rows of node `k` integrated with MLS trial functions.
    fn mlpg_rows(&self, k: usize, sub: &Subdomain) -> Result<(Vec<BlockRow>, u64)> {
        let dim = self.dim();
        let rc = &self.rc;
        let delta = self.nodes.support(k);
        let points = self.config.points_for(sub);
        let variant1 = self.config.method.is_variant1();
        let test = TestFunction::for_subdomain(sub, rc.weight);
        let mut acc = BlockAccumulator { dim, blocks: BTreeMap::new(), beta: [0.0; 3] };
        let mut evaluations = 0u64;
        let all = [true; 3];

        let rule = rule_clipped(sub, dim, points)?;
        for (y, w) in rule.points.iter().zip(&rule.weights) {
            let x = add(&sub.center, y);
            let b = rc.data.body_force(&x);
            if variant1 {
                let (v, gv) = test.eval(y, dim);
                let ev = self.shape_at(&x, delta)?;
                evaluations += 1;
                acc.add(&ev, &gv, &all, -w, rc);
                for i in 0..dim {
                    acc.beta[i] -= w * v * b[i];
                }
            } else {
                for i in 0..dim {
                    acc.beta[i] -= w * b[i];
                }
            }
        }
        for piece in &sub.pieces {
            let mask = match piece.location {
                PieceLocation::Interior if variant1 => continue,
                PieceLocation::Interior => all,
                PieceLocation::Boundary(f) => self.geometry.faces()[f].prescribed,
            };
            let rule = rule_piece(piece, dim, points)?;
            for ((y, w), nrm) in rule.points.iter().zip(&rule.weights).zip(&rule.normals) {
                let x = add(&sub.center, y);
                let v = if variant1 { test.eval(y, dim).0 } else { 1.0 };
                if mask[..dim].iter().any(|&m| m) {
                    let ev = self.shape_at(&x, delta)?;
                    evaluations += 1;
                    acc.add(&ev, nrm, &mask, w * v, rc);
                }
                if !mask[..dim].iter().all(|&m| m) {
                    let t = traction(&rc.data.stress(&x), nrm, dim);
                    for i in (0..dim).filter(|&i| !mask[i]) {
                        acc.beta[i] -= w * v * t[i];
                    }
                }
            }
        }
        Ok((acc.rows(), evaluations))
    }
}

/// Assembles `K u = R` for MLPG1 or MLPG5 with the same boundary handling
/// as the direct methods. The number of shape-function evaluations inside
/// the integration loops is recorded in the statistics.
pub fn assemble_mlpg(
    nodes: &NodeSet,
    geometry: &DomainGeometry,
    data: &dyn ExactSolution,
    config: &AssemblyConfig,
) -> Result<GlobalSystem> {
    if config.method.is_direct() {
        return Err(Error::InvalidArgument(format!("{} is a direct method; use the DMLPG assembler", config.method)));
    }
    let start = Instant::now();
    let grid = NeighborGrid::new(nodes.points(), nodes.dim(), nodes.max_support());
    let asm = Assembler::new(nodes, geometry, &grid, data, config)?;
    let n = nodes.len();
    let subs = collect_in_order((0..n).into_par_iter().map(|k| asm.subdomain(k)).collect())?;
    let mut stats = AssemblyStats::default();
    cache_groups(&subs, nodes.supports(), &mut stats);
    stats.cache_hits = 0;
    let rows = collect_in_order(
        (0..n)
            .into_par_iter()
            .map(|k| {
                let Some(sub) = &subs[k] else {
                    return asm.dirichlet_rows(k);
                };
                let (rows, evaluations) = asm.mlpg_rows(k, sub)?;
                let sys = asm.moment_system(k)?;
                let mut out = asm.finish_weak(k, &sys, sub, rows);
                out.shape_evaluations = evaluations;
                Ok::<NodeRows, Error>(out)
            })
            .collect(),
    )?;
    Ok(asm.build(rows, stats, start))
}

/// Default classical configuration: 10-point rules on every shape.
pub fn mlpg_config(method: Method) -> AssemblyConfig {
    let mut cfg = AssemblyConfig::new(method);
    cfg.box_points = Some(10);
    cfg
}
