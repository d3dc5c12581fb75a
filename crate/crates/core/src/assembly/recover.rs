use super::Solution;
use crate::approx::{gmls_derivative_row, mls_shape, GaussianWeight, MlsContext, PolyBasis};
use crate::elasticity::{strain_from_gradient, von_mises, Material, VoigtMatrix};
use crate::error::{Error, Result};
use crate::geometry::{NeighborGrid, NodeSet, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Displacement,
    Strain,
    Stress,
    VonMises,
}

/// Post-processing of a nodal solution: displacements by MLS, strains by
/// GMLS derivatives, stresses by the constitutive law.
pub struct FieldRecovery<'a> {
    nodes: &'a NodeSet,
    solution: &'a Solution,
    grid: NeighborGrid,
    basis: PolyBasis,
    weight: GaussianWeight,
    voigt: VoigtMatrix,
}

impl<'a> FieldRecovery<'a> {
    pub fn new(
        nodes: &'a NodeSet,
        solution: &'a Solution,
        material: &Material,
        degree: usize,
        epsilon: f64,
    ) -> Result<Self> {
        if solution.values.len() != nodes.dim() * nodes.len() || solution.dim != nodes.dim() {
            return Err(Error::InvalidArgument("solution does not match the node set".into()));
        }
        Ok(Self {
            nodes,
            solution,
            grid: NeighborGrid::new(nodes.points(), nodes.dim(), nodes.max_support()),
            basis: PolyBasis::new(nodes.dim(), degree)?,
            weight: GaussianWeight::new(epsilon),
            voigt: material.voigt(),
        })
    }

    fn system(&self, x: &Point) -> Result<crate::approx::MomentSystem> {
        let k = self.grid.nearest(x).ok_or_else(|| Error::InvalidArgument("empty node set".into()))?;
        let ctx = MlsContext::new(self.nodes.points(), &self.grid, self.basis.clone(), self.weight);
        ctx.moment_system(x, self.nodes.support(k))
    }

    pub fn displacement(&self, x: &Point) -> Result<[f64; 3]> {
        let sys = self.system(x)?;
        let a = mls_shape(&sys);
        let mut u = [0.0; 3];
        for (aj, &j) in a.iter().zip(sys.active()) {
            let uj = self.solution.node(j);
            for i in 0..self.solution.dim {
                u[i] += aj * uj[i];
            }
        }
        Ok(u)
    }

    /// Voigt strain with engineering shears.
    pub fn strain(&self, x: &Point) -> Result<Vec<f64>> {
        let dim = self.solution.dim;
        let sys = self.system(x)?;
        let mut g = [[0.0; 3]; 3];
        for c in 0..dim {
            let mut alpha = [0u8; 3];
            alpha[c] = 1;
            let row = gmls_derivative_row(&sys, &self.basis, alpha)?;
            for (aj, &j) in row.iter().zip(sys.active()) {
                let uj = self.solution.node(j);
                for i in 0..dim {
                    g[i][c] += aj * uj[i];
                }
            }
        }
        Ok(strain_from_gradient(&g, dim))
    }

    pub fn stress(&self, x: &Point) -> Result<Vec<f64>> {
        Ok(self.voigt.apply(&self.strain(x)?))
    }

    pub fn evaluate(&self, x: &Point, field: Field) -> Result<Vec<f64>> {
        match field {
            Field::Displacement => Ok(self.displacement(x)?[..self.solution.dim].to_vec()),
            Field::Strain => self.strain(x),
            Field::Stress => self.stress(x),
            Field::VonMises => Ok(vec![von_mises(&self.stress(x)?)]),
        }
    }
}
