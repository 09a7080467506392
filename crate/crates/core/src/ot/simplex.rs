//! Exact linear transport via the transportation simplex.
//!
//! Start from the north-west corner basis, price with MODI potentials
//! (`uᵢ + vⱼ = cᵢⱼ` on basic cells), pivot around the cycle the entering
//! cell closes in the basis tree. Degenerate bases keep zero-flow basic
//! cells; after a run of degenerate pivots the rule switches to Bland's
//! smallest-index choice, which cannot cycle.

use thiserror::Error;

use super::{Histogram, TransportPlan};
use crate::numerics::Mat;

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum SimplexError {
    #[error("cost is {rows}x{cols} but marginals have lengths {ns} and {nt}")]
    Dimension {
        rows: usize,
        cols: usize,
        ns: usize,
        nt: usize,
    },
    #[error("transport simplex exceeded {pivots} pivots (degenerate cycling)")]
    Degeneracy { pivots: usize },
    #[error("non-finite cost entry at ({row}, {col})")]
    NonFiniteCost { row: usize, col: usize },
}

/// Optimal vertex plus the dual potentials certifying it.
#[derive(Debug, Clone)]
pub struct SimplexSolution {
    pub plan: TransportPlan,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub pivots: usize,
}

impl SimplexSolution {
    /// Smallest reduced cost `cᵢⱼ - uᵢ - vⱼ` over all cells.
    pub fn min_reduced_cost(&self, cost: &Mat) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..cost.rows() {
            for j in 0..cost.cols() {
                m = m.min(cost[(i, j)] - self.u[i] - self.v[j]);
            }
        }
        m
    }
}

/// Exact minimizer of `⟨γ, cost⟩` over the transport polytope.
pub fn transport_lmo(cost: &Mat, mu_s: &Histogram, mu_t: &Histogram) -> Result<TransportPlan, SimplexError> {
    transport_simplex(cost, mu_s.weights(), mu_t.weights()).map(|s| s.plan)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    i: usize,
    j: usize,
    flow: f64,
}

struct Basis {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
    // tree bookkeeping, node ids: rows 0..r, cols r..r+c
    adj: Vec<Vec<usize>>,
    parent_cell: Vec<usize>,
    parent_node: Vec<usize>,
    depth: Vec<usize>,
}

impl Basis {
    fn rebuild_tree(&mut self, cost: &Mat, u: &mut [f64], v: &mut [f64]) {
        let n = self.rows + self.cols;
        for a in self.adj.iter_mut() {
            a.clear();
        }
        for (idx, c) in self.cells.iter().enumerate() {
            self.adj[c.i].push(idx);
            self.adj[self.rows + c.j].push(idx);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        u[0] = 0.0;
        self.depth[0] = 0;
        self.parent_node[0] = usize::MAX;
        self.parent_cell[0] = usize::MAX;
        while let Some(node) = stack.pop() {
            for &idx in &self.adj[node] {
                let c = self.cells[idx];
                let other = if node < self.rows { self.rows + c.j } else { c.i };
                if seen[other] {
                    continue;
                }
                seen[other] = true;
                self.parent_node[other] = node;
                self.parent_cell[other] = idx;
                self.depth[other] = self.depth[node] + 1;
                if other < self.rows {
                    u[other] = cost[(c.i, c.j)] - v[c.j];
                } else {
                    v[c.j] = cost[(c.i, c.j)] - u[c.i];
                }
                stack.push(other);
            }
        }
        debug_assert!(seen.iter().all(|&s| s), "basis is not a spanning tree");
    }

    /// Cells on the tree path from column node `j` to row node `i`, in
    /// order starting next to `j`.
    fn path(&self, i: usize, j: usize) -> Vec<usize> {
        let mut a = self.rows + j;
        let mut b = i;
        let mut from_a = Vec::new();
        let mut from_b = Vec::new();
        while self.depth[a] > self.depth[b] {
            from_a.push(self.parent_cell[a]);
            a = self.parent_node[a];
        }
        while self.depth[b] > self.depth[a] {
            from_b.push(self.parent_cell[b]);
            b = self.parent_node[b];
        }
        while a != b {
            from_a.push(self.parent_cell[a]);
            a = self.parent_node[a];
            from_b.push(self.parent_cell[b]);
            b = self.parent_node[b];
        }
        from_b.reverse();
        from_a.extend(from_b);
        from_a
    }
}

/// Solves the transport LP for supplies `a` and demands `b` (equal totals).
pub fn transport_simplex(cost: &Mat, a: &[f64], b: &[f64]) -> Result<SimplexSolution, SimplexError> {
    let (r, c) = cost.shape();
    if a.len() != r || b.len() != c || r == 0 || c == 0 {
        return Err(SimplexError::Dimension {
            rows: r,
            cols: c,
            ns: a.len(),
            nt: b.len(),
        });
    }
    if let Some(pos) = cost.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(SimplexError::NonFiniteCost {
            row: pos / c,
            col: pos % c,
        });
    }

    let mut basis = Basis {
        rows: r,
        cols: c,
        cells: north_west_corner(a, b),
        adj: vec![Vec::new(); r + c],
        parent_cell: vec![usize::MAX; r + c],
        parent_node: vec![usize::MAX; r + c],
        depth: vec![0; r + c],
    };
    let mut u = vec![0.0; r];
    let mut v = vec![0.0; c];
    let scale = cost.max_abs().max(1.0);
    let enter_tol = -1e-12 * scale;
    let max_pivots = 50 * (r + c) * (r + c) + 1000;

    let mut is_basic = vec![false; r * c];
    for cell in &basis.cells {
        is_basic[cell.i * c + cell.j] = true;
    }

    let mut pivots = 0usize;
    let mut degenerate_run = 0usize;
    loop {
        basis.rebuild_tree(cost, &mut u, &mut v);
        let bland = degenerate_run >= DEGENERATE_RUN;

        let mut entering = None;
        let mut best = enter_tol;
        'scan: for i in 0..r {
            let row = cost.row(i);
            for j in 0..c {
                if is_basic[i * c + j] {
                    continue;
                }
                let d = row[j] - u[i] - v[j];
                if d < best {
                    entering = Some((i, j));
                    if bland {
                        break 'scan;
                    }
                    best = d;
                }
            }
        }
        let Some((ei, ej)) = entering else {
            break;
        };

        if pivots >= max_pivots {
            return Err(SimplexError::Degeneracy { pivots });
        }
        pivots += 1;

        // cycle signs alternate -, +, -, ... starting next to column ej
        let path = basis.path(ei, ej);
        let mut theta = f64::INFINITY;
        let mut leave = usize::MAX;
        for (pos, &idx) in path.iter().enumerate() {
            if pos % 2 == 1 {
                continue;
            }
            let cell = basis.cells[idx];
            let better = cell.flow < theta
                || (cell.flow == theta && bland && {
                    let cur = basis.cells[leave];
                    (cell.i, cell.j) < (cur.i, cur.j)
                });
            if better {
                theta = cell.flow;
                leave = idx;
            }
        }
        for (pos, &idx) in path.iter().enumerate() {
            let cell = &mut basis.cells[idx];
            if pos % 2 == 0 {
                cell.flow -= theta;
            } else {
                cell.flow += theta;
            }
        }
        degenerate_run = if theta > 0.0 { 0 } else { degenerate_run + 1 };

        let old = basis.cells[leave];
        is_basic[old.i * c + old.j] = false;
        is_basic[ei * c + ej] = true;
        basis.cells[leave] = Cell {
            i: ei,
            j: ej,
            flow: theta,
        };
    }

    let mut gamma = Mat::zeros(r, c);
    for cell in &basis.cells {
        // pivot arithmetic can leave round-off sized negatives
        let f = if cell.flow.abs() <= 1e-15 {
            0.0
        } else {
            cell.flow.max(0.0)
        };
        gamma[(cell.i, cell.j)] = f;
    }
    Ok(SimplexSolution {
        plan: TransportPlan::from_mat_unchecked(gamma),
        u,
        v,
        pivots,
    })
}

fn north_west_corner(a: &[f64], b: &[f64]) -> Vec<Cell> {
    let (r, c) = (a.len(), b.len());
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let mut cells = Vec::with_capacity(r + c - 1);
    let (mut i, mut j) = (0, 0);
    loop {
        let q = ra[i].min(rb[j]).max(0.0);
        cells.push(Cell { i, j, flow: q });
        ra[i] -= q;
        rb[j] -= q;
        if i == r - 1 && j == c - 1 {
            break;
        }
        if j == c - 1 || (i < r - 1 && ra[i] <= rb[j]) {
            i += 1;
        } else {
            j += 1;
        }
    }
    // whatever round-off is left lands on the last cell
    if let Some(last) = cells.last_mut() {
        last.flow += ra[r - 1].max(rb[c - 1]).max(0.0);
    }
    cells
}
