//! Shortest paths on a weighted grid as a distance oracle for chart metrics.
//!
//! Nodes are the points of a uniform grid over a rectangle; edges connect a
//! node to its axis, diagonal and knight-move neighbours, weighted by the
//! metric length of the straight chord evaluated at the chord midpoint.
//! The knight moves cut the worst-case directional overestimate of a plain
//! 8-connected grid (about 8%) to under 3%, which the straight-line
//! calibration tests require. Convergence in the grid spacing is first
//! order; [`richardson`] extrapolates a pair of runs.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::chart::{sym_eigenvalues, ChartMetric};
use crate::fm;

#[derive(Clone, Copy, Debug)]
pub struct GridBox {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl GridBox {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        assert!(min[0] < max[0] && min[1] < max[1]);
        GridBox { min, max }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }
}

#[derive(Debug, Clone)]
pub enum GridPathError {
    NotPositiveDefinite { at: [f64; 2] },
    OutsideBox { point: [f64; 2] },
    Invalid(String),
}

impl core::fmt::Display for GridPathError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GridPathError::NotPositiveDefinite { at } => {
                write!(f, "metric not positive definite at ({}, {})", at[0], at[1])
            }
            GridPathError::OutsideBox { point } => {
                write!(f, "point ({}, {}) outside the grid box", point[0], point[1])
            }
            GridPathError::Invalid(m) => write!(f, "{m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GridPathError {}

// axis + diagonal + knight moves
const MOVES: [(i32, i32); 16] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
    (1, 2),
    (1, -2),
    (-1, 2),
    (-1, -2),
    (2, 1),
    (2, -1),
    (-2, 1),
    (-2, -1),
];

struct Grid {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    origin: [f64; 2],
}

impl Grid {
    fn new(bx: &GridBox, resolution: usize) -> Self {
        let nx = resolution + 1;
        let ny = resolution + 1;
        Grid {
            nx,
            ny,
            hx: (bx.max[0] - bx.min[0]) / resolution as f64,
            hy: (bx.max[1] - bx.min[1]) / resolution as f64,
            origin: bx.min,
        }
    }

    fn point(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.origin[0] + ix as f64 * self.hx,
            self.origin[1] + iy as f64 * self.hy,
        ]
    }

    fn nearest(&self, p: [f64; 2]) -> usize {
        let ix = (((p[0] - self.origin[0]) / self.hx) + 0.5) as usize;
        let iy = (((p[1] - self.origin[1]) / self.hy) + 0.5) as usize;
        iy.min(self.ny - 1) * self.nx + ix.min(self.nx - 1)
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        // min-heap on distance, deterministic node tiebreak
        other
            .dist
            .total_cmp(&self.dist)
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn chord_weight(
    metric: &ChartMetric,
    a: [f64; 2],
    b: [f64; 2],
) -> Result<f64, GridPathError> {
    let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let g = metric.values(&mid);
    let eig = sym_eigenvalues(&g, 2);
    if eig.iter().any(|&e| e <= 0.0) {
        return Err(GridPathError::NotPositiveDefinite { at: mid });
    }
    let d = [b[0] - a[0], b[1] - a[1]];
    let q = g[0] * d[0] * d[0] + 2.0 * g[1] * d[0] * d[1] + g[3] * d[1] * d[1];
    Ok(fm::sqrt(q))
}

/// All grid distances from the node nearest to `origin`.
pub struct DistanceField {
    grid: Grid,
    dist: Vec<f64>,
}

impl DistanceField {
    pub fn distance_to(&self, p: [f64; 2]) -> f64 {
        self.dist[self.grid.nearest(p)]
    }
}

/// Single-source Dijkstra over the weighted grid.
pub fn grid_distance_field(
    metric: &ChartMetric,
    bx: &GridBox,
    resolution: usize,
    origin: [f64; 2],
) -> Result<DistanceField, GridPathError> {
    assert_eq!(metric.dim(), 2, "grid paths are two-dimensional");
    if !bx.contains(origin) {
        return Err(GridPathError::OutsideBox { point: origin });
    }
    let grid = Grid::new(bx, resolution);
    let n = grid.nx * grid.ny;
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let start = grid.nearest(origin);
    dist[start] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry { dist: 0.0, node: start });
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        let ix = (node % grid.nx) as i32;
        let iy = (node / grid.nx) as i32;
        let p = grid.point(ix as usize, iy as usize);
        for (dx, dy) in MOVES {
            let jx = ix + dx;
            let jy = iy + dy;
            if jx < 0 || jy < 0 || jx >= grid.nx as i32 || jy >= grid.ny as i32 {
                continue;
            }
            let neighbor = jy as usize * grid.nx + jx as usize;
            if done[neighbor] {
                continue;
            }
            let q = grid.point(jx as usize, jy as usize);
            let w = chord_weight(metric, p, q)?;
            let nd = d + w;
            if nd < dist[neighbor] {
                dist[neighbor] = nd;
                heap.push(HeapEntry { dist: nd, node: neighbor });
            }
        }
    }
    Ok(DistanceField { grid, dist })
}

/// Shortest grid-path length between the nodes nearest to `p` and `q`.
pub fn grid_shortest_path(
    metric: &ChartMetric,
    bx: &GridBox,
    resolution: usize,
    p: [f64; 2],
    q: [f64; 2],
) -> Result<f64, GridPathError> {
    if !bx.contains(p) {
        return Err(GridPathError::OutsideBox { point: p });
    }
    if !bx.contains(q) {
        return Err(GridPathError::OutsideBox { point: q });
    }
    let field = grid_distance_field(metric, bx, resolution, p)?;
    Ok(field.distance_to(q))
}

/// First-order Richardson extrapolation from runs at `resolution` and
/// `2 * resolution`: `2 d_fine - d_coarse`.
pub fn richardson(
    metric: &ChartMetric,
    bx: &GridBox,
    resolution: usize,
    p: [f64; 2],
    q: [f64; 2],
) -> Result<f64, GridPathError> {
    let coarse = grid_shortest_path(metric, bx, resolution, p, q)?;
    let fine = grid_shortest_path(metric, bx, 2 * resolution, p, q)?;
    Ok(2.0 * fine - coarse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Signature;
    use crate::jet::Jet;
    use alloc::sync::Arc;

    #[test]
    fn euclidean_three_four_five() {
        let m = ChartMetric::euclidean(2);
        let bx = GridBox::new([-0.5, -0.5], [3.5, 4.5]);
        let d = grid_shortest_path(&m, &bx, 200, [0.0, 0.0], [3.0, 4.0]).unwrap();
        assert!((d - 5.0).abs() / 5.0 < 0.02, "distance {d}");
        assert!(d >= 5.0 - 1e-9, "grid path cannot undercut the true distance");
    }

    #[test]
    fn constant_conformal_rescale() {
        // phi = 2 conformal factor phi^-2 halves lengths
        let m = ChartMetric::conformal(
            2,
            Arc::new(|_x: &[f64], order| Jet::constant(0.25, 2, order)),
        );
        let bx = GridBox::new([-0.2, -0.2], [1.2, 0.2]);
        let d = grid_shortest_path(&m, &bx, 160, [0.0, 0.0], [1.0, 0.0]).unwrap();
        assert!((d - 0.5).abs() / 0.5 < 0.02, "distance {d}");
    }

    #[test]
    fn refinement_does_not_increase() {
        let m = ChartMetric::euclidean(2);
        let bx = GridBox::new([-0.5, -0.5], [3.5, 4.5]);
        let coarse = grid_shortest_path(&m, &bx, 60, [0.0, 0.0], [3.0, 4.0]).unwrap();
        let fine = grid_shortest_path(&m, &bx, 120, [0.0, 0.0], [3.0, 4.0]).unwrap();
        assert!(fine <= coarse + 1e-9, "fine {fine} coarse {coarse}");
    }

    #[test]
    fn richardson_tightens() {
        let m = ChartMetric::euclidean(2);
        let bx = GridBox::new([-0.5, -0.5], [3.5, 4.5]);
        let plain = grid_shortest_path(&m, &bx, 100, [0.0, 0.0], [3.0, 4.0]).unwrap();
        let extra = richardson(&m, &bx, 100, [0.0, 0.0], [3.0, 4.0]).unwrap();
        assert!((extra - 5.0).abs() <= (plain - 5.0).abs() + 1e-9);
    }

    #[test]
    fn rejects_indefinite_metric() {
        let m = ChartMetric::new(
            2,
            Signature::Riemannian,
            Arc::new(|_x: &[f64], order| {
                vec![
                    Jet::constant(1.0, 2, order),
                    Jet::constant(0.0, 2, order),
                    Jet::constant(0.0, 2, order),
                    Jet::constant(-1.0, 2, order),
                ]
            }),
        );
        let bx = GridBox::new([0.0, 0.0], [1.0, 1.0]);
        assert!(grid_shortest_path(&m, &bx, 10, [0.1, 0.1], [0.9, 0.9]).is_err());
    }
}
