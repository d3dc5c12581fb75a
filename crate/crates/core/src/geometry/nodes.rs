use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{dist, DomainGeometry, Point};
use crate::error::{Error, Result};

/// Boundary classification of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryTag {
    Interior,
    /// All displacement components prescribed (collocation rows only).
    Dirichlet,
    /// Tractions prescribed on every face through the node.
    Neumann,
    /// Some displacement components prescribed; the mask marks them.
    Mixed([bool; 3]),
}

impl BoundaryTag {
    pub fn prescribed(&self, dim: usize) -> [bool; 3] {
        match *self {
            BoundaryTag::Dirichlet => {
                let mut m = [false; 3];
                m[..dim].iter_mut().for_each(|c| *c = true);
                m
            }
            BoundaryTag::Mixed(mask) => mask,
            _ => [false; 3],
        }
    }

    /// Text code used by the node table format: `I`, `D`, `N`, or `M`
    /// followed by the 1-based prescribed components (`M1`, `M23`, ...).
    pub fn code(&self) -> String {
        match self {
            BoundaryTag::Interior => "I".into(),
            BoundaryTag::Dirichlet => "D".into(),
            BoundaryTag::Neumann => "N".into(),
            BoundaryTag::Mixed(mask) => {
                let mut s = String::from("M");
                for (c, &m) in mask.iter().enumerate() {
                    if m {
                        write!(s, "{}", c + 1).unwrap();
                    }
                }
                s
            }
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "I" => Some(BoundaryTag::Interior),
            "D" => Some(BoundaryTag::Dirichlet),
            "N" => Some(BoundaryTag::Neumann),
            _ => {
                let digits = code.strip_prefix('M')?;
                if digits.is_empty() {
                    return None;
                }
                let mut mask = [false; 3];
                for ch in digits.chars() {
                    let c = ch.to_digit(10)? as usize;
                    if !(1..=3).contains(&c) {
                        return None;
                    }
                    mask[c - 1] = true;
                }
                Some(BoundaryTag::Mixed(mask))
            }
        }
    }
}

/// Scattered meshless points with boundary tags, support radii and local
/// spacing. Dirichlet nodes always come first.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSet {
    dim: usize,
    points: Vec<Point>,
    tags: Vec<BoundaryTag>,
    support: Vec<f64>,
    spacing: Vec<f64>,
    mesh_size: f64,
}

impl NodeSet {
    /// Builds a node set and applies the stable Dirichlet-first reorder.
    pub fn new(
        dim: usize,
        points: Vec<Point>,
        tags: Vec<BoundaryTag>,
        support: Vec<f64>,
        spacing: Vec<f64>,
        mesh_size: f64,
    ) -> Result<Self> {
        let n = points.len();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidArgument(format!("dimension must be 2 or 3, got {dim}")));
        }
        if tags.len() != n || support.len() != n || spacing.len() != n {
            return Err(Error::InvalidArgument("node arrays have mismatched lengths".into()));
        }
        if !(mesh_size > 0.0) {
            return Err(Error::InvalidArgument("mesh size must be positive".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| tags[i] != BoundaryTag::Dirichlet);
        Ok(Self {
            dim,
            points: order.iter().map(|&i| points[i]).collect(),
            tags: order.iter().map(|&i| tags[i]).collect(),
            support: order.iter().map(|&i| support[i]).collect(),
            spacing: order.iter().map(|&i| spacing[i]).collect(),
            mesh_size,
        })
    }

    fn from_geometry(geometry: &DomainGeometry, points: Vec<Point>, spacing: Vec<f64>, mesh_size: f64) -> Result<Self> {
        let tags = points.iter().map(|p| geometry.classify(p)).collect();
        let support = spacing.iter().map(|h| DEFAULT_SUPPORT_FACTOR * 2.0 * h).collect();
        Self::new(geometry.dim(), points, tags, support, spacing, mesh_size)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn tags(&self) -> &[BoundaryTag] {
        &self.tags
    }

    pub fn tag(&self, i: usize) -> BoundaryTag {
        self.tags[i]
    }

    /// Support radius `delta` of the weight function centered at node `i`.
    pub fn support(&self, i: usize) -> f64 {
        self.support[i]
    }

    pub fn supports(&self) -> &[f64] {
        &self.support
    }

    pub fn max_support(&self) -> f64 {
        self.support.iter().copied().fold(0.0, f64::max)
    }

    /// Local node spacing around node `i`.
    pub fn spacing(&self, i: usize) -> f64 {
        self.spacing[i]
    }

    pub fn mesh_size(&self) -> f64 {
        self.mesh_size
    }

    /// Number of leading Dirichlet nodes.
    pub fn n_dirichlet(&self) -> usize {
        self.tags.iter().take_while(|t| **t == BoundaryTag::Dirichlet).count()
    }

    /// Sets `delta_i = c(x_i) * m * h_i` with `h_i` the local spacing.
    pub fn assign_support(&mut self, degree: usize, factor: impl Fn(&Point) -> f64) {
        for i in 0..self.len() {
            self.support[i] = factor(&self.points[i]) * degree as f64 * self.spacing[i];
        }
    }

    pub fn set_supports(&mut self, support: Vec<f64>) -> Result<()> {
        if support.len() != self.len() || support.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::InvalidArgument("support radii must be positive, one per node".into()));
        }
        self.support = support;
        Ok(())
    }

    /// Checks the node-set invariants against a domain.
    pub fn validate(&self, geometry: &DomainGeometry) -> Result<()> {
        let nb = self.n_dirichlet();
        for (i, p) in self.points.iter().enumerate() {
            if !geometry.contains(p) {
                return Err(Error::InvalidArgument(format!("node {i} lies outside the domain")));
            }
            let tag = self.tags[i];
            if matches!(tag, BoundaryTag::Dirichlet | BoundaryTag::Mixed(_)) && !geometry.on_boundary(p) {
                return Err(Error::InvalidArgument(format!(
                    "node {i} is tagged {} but is not on the boundary",
                    tag.code()
                )));
            }
            if tag == BoundaryTag::Dirichlet && i >= nb {
                return Err(Error::InvalidArgument(format!("Dirichlet node {i} is not ordered first")));
            }
            if !(self.support[i] > self.mesh_size) {
                return Err(Error::InvalidArgument(format!("node {i} support radius does not exceed the mesh size")));
            }
        }
        Ok(())
    }

    /// Writes the node table: a short `#` header, then one row per node with
    /// the coordinates, tag code, support radius and local spacing. Reals
    /// use 17 significant digits so the table reads back bit-exactly.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# dmlpg node table")?;
        writeln!(out, "# dim {}", self.dim)?;
        writeln!(out, "# mesh_size {:.16e}", self.mesh_size)?;
        let axes = ["x1", "x2", "x3"];
        writeln!(out, "# columns: {} tag delta spacing", axes[..self.dim].join(" "))?;
        for i in 0..self.len() {
            let mut line = String::new();
            for c in 0..self.dim {
                write!(line, "{:.16e} ", self.points[i][c]).unwrap();
            }
            write!(line, "{} {:.16e} {:.16e}", self.tags[i].code(), self.support[i], self.spacing[i]).unwrap();
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut dim = None;
        let mut mesh_size = None;
        let (mut points, mut tags, mut support, mut spacing) = (vec![], vec![], vec![], vec![]);
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(header) = trimmed.strip_prefix('#') {
                let mut it = header.split_whitespace();
                match (it.next(), it.next()) {
                    (Some("dim"), Some(v)) => {
                        dim = Some(v.parse::<usize>().map_err(|e| parse_err(lineno, e.to_string()))?)
                    }
                    (Some("mesh_size"), Some(v)) => {
                        mesh_size = Some(v.parse::<f64>().map_err(|e| parse_err(lineno, e.to_string()))?)
                    }
                    _ => {}
                }
                continue;
            }
            let d = dim.ok_or_else(|| parse_err(lineno, "missing '# dim' header".into()))?;
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != d + 3 {
                return Err(parse_err(lineno, format!("expected {} columns, found {}", d + 3, fields.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| parse_err(lineno, format!("{s:?}: {e}")));
            let mut p = [0.0; 3];
            for c in 0..d {
                p[c] = num(fields[c])?;
            }
            points.push(p);
            tags.push(
                BoundaryTag::from_code(fields[d])
                    .ok_or_else(|| parse_err(lineno, format!("unknown tag code {:?}", fields[d])))?,
            );
            support.push(num(fields[d + 1])?);
            spacing.push(num(fields[d + 2])?);
        }
        let dim = dim.ok_or_else(|| parse_err(0, "missing '# dim' header".into()))?;
        let mesh_size = mesh_size.ok_or_else(|| parse_err(0, "missing '# mesh_size' header".into()))?;
        Self::new(dim, points, tags, support, spacing, mesh_size)
    }
}

/// Support factor `c` in `delta = c * m * h` applied by the generators; the
/// benchmarks reassign supports from their own configuration.
pub const DEFAULT_SUPPORT_FACTOR: f64 = 2.0;

/// Uniform grid on an axis-aligned box domain with `counts[a]` points along
/// axis `a`. Tags come from the domain's face conditions.
pub fn generate_box_nodes(geometry: &DomainGeometry, counts: &[usize]) -> Result<NodeSet> {
    let dim = geometry.dim();
    let super::DomainKind::Box { lo, hi } = geometry.kind() else {
        return Err(Error::InvalidArgument("box node generator needs a box domain".into()));
    };
    if counts.len() != dim || counts.iter().any(|&c| c < 2) {
        return Err(Error::InvalidArgument(format!("need {dim} grid counts, each at least 2, got {counts:?}")));
    }
    let step: Vec<f64> = (0..dim).map(|a| (hi[a] - lo[a]) / (counts[a] - 1) as f64).collect();
    let h = step.iter().copied().fold(0.0, f64::max);
    let total: usize = counts.iter().product();
    let mut points = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut p = [0.0; 3];
        for a in 0..dim {
            let i = rem % counts[a];
            rem /= counts[a];
            p[a] = if i == counts[a] - 1 { hi[a] } else { lo[a] + i as f64 * step[a] };
        }
        points.push(p);
    }
    NodeSet::from_geometry(geometry, points, vec![h; total], h)
}

/// `nx * ny` uniform grid on the cantilever `[0, L] x [0, D]`.
pub fn generate_beam_nodes(nx: usize, ny: usize, length: f64, depth: f64) -> Result<NodeSet> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument(format!("beam grid needs at least 2x2 points, got {nx}x{ny}")));
    }
    if !(length > 0.0 && depth > 0.0) {
        return Err(Error::InvalidArgument("beam dimensions must be positive".into()));
    }
    generate_box_nodes(&DomainGeometry::beam(length, depth), &[nx, ny])
}

/// Parameters of the graded polar layout on the quarter plate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlateLayout {
    pub a: f64,
    pub b: f64,
    pub nr: usize,
    pub ntheta: usize,
    /// Ratio between consecutive radial gaps (1 = uniform).
    pub grading: f64,
    /// Number of times the radial and angular gaps are halved.
    pub refinements: usize,
}

impl PlateLayout {
    /// Base layout of 13 x 41 = 533 nodes; two halvings give 2025 nodes.
    pub fn standard(a: f64, b: f64) -> Self {
        Self { a, b, nr: 13, ntheta: 41, grading: 1.2, refinements: 0 }
    }

    pub fn refined(self, refinements: usize) -> Self {
        Self { refinements, ..self }
    }

    pub fn node_count(&self) -> usize {
        let f = 1usize << self.refinements;
        ((self.nr - 1) * f + 1) * ((self.ntheta - 1) * f + 1)
    }

    pub fn generate(&self) -> Result<NodeSet> {
        let (a, b) = (self.a, self.b);
        if !(a > 0.0 && a < b) {
            return Err(Error::InvalidArgument(format!("plate needs 0 < a < b, got a={a}, b={b}")));
        }
        if self.nr < 2 || self.ntheta < 2 {
            return Err(Error::InvalidArgument("plate grid needs nr, ntheta >= 2".into()));
        }
        if !(self.grading >= 1.0) {
            return Err(Error::InvalidArgument("plate grading must be >= 1".into()));
        }
        let geometry = DomainGeometry::plate(a, b);
        let t = refine_params(&graded_params(self.nr, self.grading), self.refinements);
        let theta = refine_params(&graded_params(self.ntheta, 1.0), self.refinements);
        let (nr, nt) = (t.len(), theta.len());
        let mut grid = vec![[0.0; 3]; nr * nt];
        for (j, &s) in theta.iter().enumerate() {
            let angle = s * FRAC_PI_2;
            let (inner, outer) = if j == 0 {
                ([a, 0.0, 0.0], [b, 0.0, 0.0])
            } else if j == nt - 1 {
                ([0.0, a, 0.0], [0.0, b, 0.0])
            } else {
                let (sn, cs) = angle.sin_cos();
                let outer = if cs >= sn { [b, b * sn / cs, 0.0] } else { [b * cs / sn, b, 0.0] };
                ([a * cs, a * sn, 0.0], outer)
            };
            for (i, &ti) in t.iter().enumerate() {
                grid[j * nr + i] = if i == 0 {
                    inner
                } else if i == nr - 1 {
                    outer
                } else {
                    [inner[0] + ti * (outer[0] - inner[0]), inner[1] + ti * (outer[1] - inner[1]), 0.0]
                };
            }
        }
        let spacing = structured_spacing(&grid, nr, nt);
        let h_r = dist(&grid[0], &grid[1]);
        let h_theta = dist(&grid[0], &grid[nr]);
        NodeSet::from_geometry(&geometry, grid, spacing, h_r.min(h_theta))
    }
}

/// Graded polar node cloud on the plate quadrant.
pub fn generate_plate_nodes(a: f64, b: f64, nr: usize, ntheta: usize, grading: f64) -> Result<NodeSet> {
    PlateLayout { a, b, nr, ntheta, grading, refinements: 0 }.generate()
}

/// Concentric spherical layers on the first octant of the shell
/// `r_inner <= rho <= b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoussinesqLayout {
    pub b: f64,
    pub r_inner: f64,
    pub layers: usize,
    /// Angular resolution (polar divisions) on the innermost layer.
    pub n_inner: usize,
    /// Angular resolution on the outermost layer (`<= n_inner`).
    pub n_outer: usize,
}

impl BoussinesqLayout {
    fn resolution(&self, layer: usize) -> usize {
        if self.layers < 2 {
            return self.n_inner;
        }
        let s = layer as f64 / (self.layers - 1) as f64;
        (self.n_inner as f64 + s * (self.n_outer as f64 - self.n_inner as f64)).round() as usize
    }

    fn radius(&self, layer: usize) -> f64 {
        if layer == 0 {
            self.r_inner
        } else if layer == self.layers - 1 {
            self.b
        } else {
            self.r_inner * (self.b / self.r_inner).powf(layer as f64 / (self.layers - 1) as f64)
        }
    }

    /// Rings `(theta divisions, azimuth counts)` on one layer.
    fn rings(n: usize) -> Vec<usize> {
        (1..=n)
            .map(|j| {
                let theta = j as f64 * FRAC_PI_2 / n as f64;
                ((n as f64 * theta.sin()).round() as usize).max(1)
            })
            .collect()
    }

    pub fn layer_count(&self, layer: usize) -> usize {
        1 + Self::rings(self.resolution(layer)).iter().map(|k| k + 1).sum::<usize>()
    }

    pub fn node_count(&self) -> usize {
        (0..self.layers).map(|l| self.layer_count(l)).sum()
    }

    /// Picks the layout whose node count is closest to `target`, preferring
    /// cells whose radial and angular gaps are balanced.
    pub fn for_target(b: f64, r_inner: f64, target: usize) -> Self {
        let mut best: Option<(f64, Self)> = None;
        for layers in 2..=60 {
            for n_inner in 1..=24usize {
                for coarsen in 0..=3usize {
                    let Some(n_outer) = n_inner.checked_sub(coarsen).filter(|&n| n >= 1) else {
                        continue;
                    };
                    let layout = Self { b, r_inner, layers, n_inner, n_outer };
                    let count = layout.node_count();
                    let miss = (count as f64 - target as f64).abs() / target as f64;
                    let radial = (b / r_inner).ln() / (layers - 1) as f64;
                    let angular = FRAC_PI_2 / (0.5 * (n_inner + n_outer) as f64);
                    let mut score = miss + 0.02 * (radial / angular).ln().abs();
                    if coarsen == 0 && target > 100 {
                        score += 0.005;
                    }
                    if best.as_ref().is_none_or(|(s, _)| score < *s) {
                        best = Some((score, layout));
                    }
                }
            }
        }
        best.expect("non-empty search").1
    }

    pub fn generate(&self) -> Result<NodeSet> {
        if !(self.r_inner > 0.0 && self.r_inner < self.b) {
            return Err(Error::InvalidArgument(format!(
                "Boussinesq shell needs 0 < r_inner < b, got r_inner={}, b={}",
                self.r_inner, self.b
            )));
        }
        if self.layers < 2 || self.n_inner == 0 || self.n_outer == 0 || self.n_outer > self.n_inner {
            return Err(Error::InvalidArgument("invalid Boussinesq layout".into()));
        }
        let geometry = DomainGeometry::boussinesq(self.b, self.r_inner);
        let mut points = Vec::new();
        let mut spacing = Vec::new();
        for layer in 0..self.layers {
            let rho = self.radius(layer);
            let n = self.resolution(layer);
            let below = if layer > 0 { rho - self.radius(layer - 1) } else { 0.0 };
            let above = if layer + 1 < self.layers { self.radius(layer + 1) - rho } else { 0.0 };
            let h = below.max(above).max(rho * FRAC_PI_2 / n as f64);
            points.push([0.0, 0.0, rho]);
            spacing.push(h);
            for (j, &k) in Self::rings(n).iter().enumerate() {
                let j = j + 1;
                let (st, ct) = if j == n { (1.0, 0.0) } else { (j as f64 * FRAC_PI_2 / n as f64).sin_cos() };
                for l in 0..=k {
                    let (sp, cp) = if l == 0 {
                        (0.0, 1.0)
                    } else if l == k {
                        (1.0, 0.0)
                    } else {
                        (l as f64 * FRAC_PI_2 / k as f64).sin_cos()
                    };
                    points.push([rho * st * cp, rho * st * sp, rho * ct]);
                    spacing.push(h);
                }
            }
        }
        let h_min = spacing.iter().copied().fold(f64::INFINITY, f64::min);
        NodeSet::from_geometry(&geometry, points, spacing, h_min)
    }
}

/// Layered node cloud for the Boussinesq shell with about `target` nodes.
pub fn generate_boussinesq_nodes(b: f64, r_inner: f64, target: usize) -> Result<NodeSet> {
    if !(r_inner > 0.0 && r_inner < b) {
        return Err(Error::InvalidArgument(format!(
            "Boussinesq shell needs 0 < r_inner < b, got r_inner={r_inner}, b={b}"
        )));
    }
    BoussinesqLayout::for_target(b, r_inner, target.max(1)).generate()
}

/// Parameters in `[0, 1]` whose gaps grow geometrically by `ratio`.
fn graded_params(n: usize, ratio: f64) -> Vec<f64> {
    let gaps: Vec<f64> = (0..n - 1).map(|i| ratio.powi(i as i32)).collect();
    let total: f64 = gaps.iter().sum();
    let mut t = Vec::with_capacity(n);
    let mut acc = 0.0;
    t.push(0.0);
    for g in &gaps[..n - 2] {
        acc += g;
        t.push(acc / total);
    }
    t.push(1.0);
    t
}

/// Inserts midpoints `times` times.
fn refine_params(t: &[f64], times: usize) -> Vec<f64> {
    let mut cur = t.to_vec();
    for _ in 0..times {
        let mut next = Vec::with_capacity(2 * cur.len() - 1);
        for w in cur.windows(2) {
            next.push(w[0]);
            next.push(0.5 * (w[0] + w[1]));
        }
        next.push(*cur.last().unwrap());
        cur = next;
    }
    cur
}

/// Largest distance from each node of an `nr x nt` structured grid to its
/// grid neighbors.
fn structured_spacing(grid: &[Point], nr: usize, nt: usize) -> Vec<f64> {
    let mut h = vec![0.0f64; grid.len()];
    for j in 0..nt {
        for i in 0..nr {
            let k = j * nr + i;
            let mut near = Vec::with_capacity(4);
            if i > 0 {
                near.push(dist(&grid[k], &grid[k - 1]));
            }
            if i + 1 < nr {
                near.push(dist(&grid[k], &grid[k + 1]));
            }
            if j > 0 {
                near.push(dist(&grid[k], &grid[k - nr]));
            }
            if j + 1 < nt {
                near.push(dist(&grid[k], &grid[k + nr]));
            }
            h[k] = near.iter().sum::<f64>() / near.len() as f64;
        }
    }
    h
}
