use std::io::Write;

use super::NodeRows;
use crate::error::Result;

/// How the `d` rows of a node were formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowKind {
    /// Essential boundary condition by MLS collocation.
    Collocation,
    /// Local weak form.
    WeakForm,
    /// Weak form with the prescribed components replaced by collocation.
    Mixed,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssemblyStats {
    /// Interior nodes whose subdomain is not clipped by the domain.
    pub cacheable_nodes: usize,
    /// Distinct signatures among the cacheable subdomains.
    pub signature_groups: usize,
    /// Size of the largest signature group.
    pub modal_group_size: usize,
    /// Functional rows reused instead of integrated.
    pub cache_hits: usize,
    /// MLS shape-function evaluations inside integration loops.
    pub shape_evaluations: u64,
    /// Nodes whose rows required a subdomain integration.
    pub integrated_subdomains: usize,
    pub assembly_seconds: f64,
}

impl AssemblyStats {
    pub fn evaluations_per_subdomain(&self) -> f64 {
        if self.integrated_subdomains == 0 {
            0.0
        } else {
            self.shape_evaluations as f64 / self.integrated_subdomains as f64
        }
    }
}

/// Sparse global system `K u = R` in compressed row form. DOF `d k + i` is
/// component `i` at node `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalSystem {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
    pub rhs: Vec<f64>,
    /// One entry per node.
    pub row_kinds: Vec<RowKind>,
    pub stats: AssemblyStats,
}

impl GlobalSystem {
    pub(crate) fn from_node_rows(dim: usize, nodes: Vec<NodeRows>, stats: AssemblyStats) -> Self {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut rhs = Vec::with_capacity(dim * nodes.len());
        let mut row_kinds = Vec::with_capacity(nodes.len());
        for node in nodes {
            row_kinds.push(node.kind);
            for row in node.rows {
                let start = cols.len();
                let mut entries: Vec<(usize, f64)> = row.cols.into_iter().zip(row.vals).collect();
                entries.sort_by_key(|e| e.0);
                for (c, v) in entries {
                    if cols.len() > start && *cols.last().unwrap() == c {
                        *vals.last_mut().unwrap() += v;
                    } else {
                        cols.push(c);
                        vals.push(v);
                    }
                }
                row_ptr.push(cols.len());
                rhs.push(row.rhs);
            }
        }
        Self { dim, row_ptr, cols, vals, rhs, row_kinds, stats }
    }

    pub fn n_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map_or(0.0, |i| vals[i])
    }

    pub fn max_row_nnz(&self) -> usize {
        (0..self.n_rows()).map(|r| self.row_ptr[r + 1] - self.row_ptr[r]).max().unwrap_or(0)
    }

    pub fn matvec(&self, u: &[f64]) -> Vec<f64> {
        (0..self.n_rows())
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, v)| v * u[c]).sum()
            })
            .collect()
    }

    /// Number of nodes with the given row kind.
    pub fn count(&self, kind: RowKind) -> usize {
        self.row_kinds.iter().filter(|&&k| k == kind).count()
    }

    /// Writes `K` as `row col value` lines followed by `R` as `row value`
    /// lines, separated by a `# rhs` marker. Indices are zero-based.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# K {} {} {}", self.n_rows(), self.n_rows(), self.nnz())?;
        for r in 0..self.n_rows() {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                writeln!(out, "{r} {c} {v:.17e}")?;
            }
        }
        writeln!(out, "# rhs {}", self.n_rows())?;
        for (r, v) in self.rhs.iter().enumerate() {
            writeln!(out, "{r} {v:.17e}")?;
        }
        Ok(())
    }
}
