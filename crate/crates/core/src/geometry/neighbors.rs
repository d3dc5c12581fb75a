use super::{dist, Point};

/// Uniform background bin grid over a point cloud. The cell size is the
/// largest support radius, so a query with `delta <= cell` touches at most
/// `3^d` cells.
#[derive(Clone, Debug)]
pub struct NeighborGrid {
    dim: usize,
    origin: Point,
    cell: f64,
    shape: [usize; 3],
    /// Point indices sorted by cell; `starts[c]..starts[c + 1]` is cell `c`.
    sorted: Vec<usize>,
    starts: Vec<usize>,
    points: Vec<Point>,
}

impl NeighborGrid {
    pub fn new(points: &[Point], dim: usize, cell: f64) -> Self {
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for a in 0..dim {
            lo[a] = points.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
            hi[a] = points.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
        }
        if points.is_empty() {
            lo = [0.0; 3];
            hi = [0.0; 3];
        }
        let extent = (0..dim).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
        let cell = if cell > 0.0 { cell } else { extent.max(1.0) };
        let mut shape = [1usize; 3];
        for a in 0..dim {
            shape[a] = (((hi[a] - lo[a]) / cell).floor() as usize + 1).min(1 << 20);
        }
        let n_cells = shape[0] * shape[1] * shape[2];
        let mut grid = Self {
            dim,
            origin: lo,
            cell,
            shape,
            sorted: Vec::new(),
            starts: vec![0; n_cells + 1],
            points: points.to_vec(),
        };
        let cells: Vec<usize> = points.iter().map(|p| grid.cell_index(&grid.cell_of(p))).collect();
        for &c in &cells {
            grid.starts[c + 1] += 1;
        }
        for c in 0..n_cells {
            grid.starts[c + 1] += grid.starts[c];
        }
        let mut fill = grid.starts.clone();
        grid.sorted = vec![0; points.len()];
        for (i, &c) in cells.iter().enumerate() {
            grid.sorted[fill[c]] = i;
            fill[c] += 1;
        }
        grid
    }

    fn cell_of(&self, p: &Point) -> [isize; 3] {
        let mut c = [0isize; 3];
        for a in 0..self.dim {
            c[a] = ((p[a] - self.origin[a]) / self.cell).floor() as isize;
        }
        c
    }

    fn cell_index(&self, c: &[isize; 3]) -> usize {
        let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
        let i = clamp(c[0], self.shape[0]);
        let j = clamp(c[1], self.shape[1]);
        let k = clamp(c[2], self.shape[2]);
        (k * self.shape[1] + j) * self.shape[0] + i
    }

    /// Indices `j` with `|x - x_j| <= delta`, ascending.
    pub fn query(&self, x: &Point, delta: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.query_into(x, delta, &mut out);
        out
    }

    pub fn query_into(&self, x: &Point, delta: f64, out: &mut Vec<usize>) {
        out.clear();
        if self.points.is_empty() || !(delta >= 0.0) {
            return;
        }
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        for a in 0..3 {
            if a < self.dim {
                let l = ((x[a] - delta - self.origin[a]) / self.cell).floor();
                let h = ((x[a] + delta - self.origin[a]) / self.cell).floor();
                if h < 0.0 || l > (self.shape[a] - 1) as f64 {
                    return;
                }
                lo[a] = l.max(0.0) as usize;
                hi[a] = (h as usize).min(self.shape[a] - 1);
            }
        }
        for k in lo[2]..=hi[2] {
            for j in lo[1]..=hi[1] {
                let row = (k * self.shape[1] + j) * self.shape[0];
                let (s, e) = (self.starts[row + lo[0]], self.starts[row + hi[0] + 1]);
                for &p in &self.sorted[s..e] {
                    if dist(x, &self.points[p]) <= delta {
                        out.push(p);
                    }
                }
            }
        }
        out.sort_unstable();
    }

    /// Index of the closest point (smallest index on ties).
    pub fn nearest(&self, x: &Point) -> Option<usize> {
        if self.points.is_empty() {
            return None;
        }
        let mut radius = self.cell;
        loop {
            let found = self.query(x, radius);
            if let Some(best) = found
                .iter()
                .copied()
                .min_by(|&a, &b| dist(x, &self.points[a]).total_cmp(&dist(x, &self.points[b])).then(a.cmp(&b)))
            {
                return Some(best);
            }
            radius *= 2.0;
        }
    }
}

/// Reference O(N) scan.
pub fn neighbors_brute_force(x: &Point, points: &[Point], delta: f64) -> Vec<usize> {
    (0..points.len()).filter(|&j| dist(x, &points[j]) <= delta).collect()
}
