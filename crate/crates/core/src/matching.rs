//! Minimum-weight full matching on rectangular cost matrices.
//!
//! Shortest-augmenting-path Hungarian method (O(n²m)) with infinite entries
//! treated as missing edges. Among optimal matchings the one whose
//! assignment sequence of the smaller side is lexicographically smallest is
//! returned.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, fill: f64) -> Self {
        CostMatrix { rows, cols, data: vec![fill; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatchError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatchError::Ragged);
        }
        Ok(CostMatrix { rows: rows.len(), cols, data: rows.iter().flatten().copied().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }
}

/// Assignment of every element of the smaller side; `pairs` are
/// `(row, col)` sorted by row.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Rows,
    Columns,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatchError {
    /// No finite-cost full matching exists; `blocking` is a set of elements
    /// of the smaller side whose finite neighbours are too few.
    #[error("no finite-cost full matching; blocking {side:?} {blocking:?}")]
    Infeasible { side: Side, blocking: Vec<usize> },
    #[error("rows have different lengths")]
    Ragged,
    #[error("invalid weight at ({row}, {col})")]
    InvalidWeight { row: usize, col: usize },
}

pub fn min_weight_full_match(weights: &CostMatrix) -> Result<Matching, MatchError> {
    if weights.rows == 0 || weights.cols == 0 {
        return Ok(Matching { pairs: Vec::new(), cost: 0.0 });
    }
    for r in 0..weights.rows {
        for c in 0..weights.cols {
            let w = weights.get(r, c);
            if w.is_nan() || w == f64::NEG_INFINITY {
                return Err(MatchError::InvalidWeight { row: r, col: c });
            }
        }
    }
    let transposed = weights.rows > weights.cols;
    let (small, large) = if transposed {
        (weights.cols, weights.rows)
    } else {
        (weights.rows, weights.cols)
    };
    let cost = |i: usize, j: usize| -> f64 {
        if i >= small {
            0.0
        } else if transposed {
            weights.get(j, i)
        } else {
            weights.get(i, j)
        }
    };

    let assignment = solve_square(large, small, &cost).map_err(|blocking| MatchError::Infeasible {
        side: if transposed { Side::Columns } else { Side::Rows },
        blocking,
    })?;

    let mut pairs: Vec<(usize, usize)> = assignment[..small]
        .iter()
        .enumerate()
        .map(|(i, &j)| if transposed { (j, i) } else { (i, j) })
        .collect();
    pairs.sort_unstable();
    let total = pairs.iter().map(|&(r, c)| weights.get(r, c)).sum();
    Ok(Matching { pairs, cost: total })
}

/// Square `n × n` assignment where rows `>= real` are zero-cost padding.
/// Returns the column of every row, or the blocking real rows.
fn solve_square(n: usize, real: usize, cost: &dyn Fn(usize, usize) -> f64) -> Result<Vec<usize>, Vec<usize>> {
    const INF: f64 = f64::INFINITY;
    // 1-based potentials; index 0 is the virtual root column
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![INF; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        minv.fill(INF);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if j1 == 0 {
                let mut blocking: Vec<usize> = (0..=n)
                    .filter(|&j| used[j])
                    .map(|j| p[j] - 1)
                    .filter(|&r| r < real)
                    .collect();
                blocking.sort_unstable();
                blocking.dedup();
                return Err(blocking);
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of = vec![0usize; n];
    let mut row_of = vec![0usize; n];
    for j in 1..=n {
        col_of[p[j] - 1] = j - 1;
        row_of[j - 1] = p[j] - 1;
    }

    // Every optimal assignment uses only edges that are tight under the
    // final dual; search those for the lexicographically smallest one.
    let mut scale = 1.0f64;
    for i in 0..real {
        for j in 0..n {
            let c = cost(i, j);
            if c.is_finite() && abs(c) > scale {
                scale = abs(c);
            }
        }
    }
    let eps = 1e-9 * scale;
    let tight: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    let c = cost(i, j);
                    c.is_finite() && abs(c - u[i + 1] - v[j + 1]) <= eps
                })
                .collect()
        })
        .collect();

    let mut seen = vec![false; n];
    for i in 0..real {
        let current = col_of[i];
        for &j in &tight[i] {
            if j >= current {
                break;
            }
            let owner = row_of[j];
            if owner < i {
                continue;
            }
            seen.fill(false);
            seen[j] = true;
            let mut ctx = Rotate { tight: &tight, col_of: &mut col_of, row_of: &mut row_of, seen: &mut seen, fixed: i };
            if ctx.free_column(owner, current) {
                col_of[i] = j;
                row_of[j] = i;
                break;
            }
        }
    }
    Ok(col_of)
}

struct Rotate<'a> {
    tight: &'a [Vec<usize>],
    col_of: &'a mut Vec<usize>,
    row_of: &'a mut Vec<usize>,
    seen: &'a mut Vec<bool>,
    fixed: usize,
}

impl Rotate<'_> {
    /// Moves `row` off its column along an alternating path of tight edges
    /// through rows above `fixed`, ending at column `target`.
    fn free_column(&mut self, row: usize, target: usize) -> bool {
        for &j in &self.tight[row] {
            if j == self.col_of[row] {
                continue;
            }
            if j == target {
                self.col_of[row] = j;
                self.row_of[j] = row;
                return true;
            }
            if self.seen[j] {
                continue;
            }
            self.seen[j] = true;
            let next = self.row_of[j];
            if next <= self.fixed {
                continue;
            }
            if self.free_column(next, target) {
                self.col_of[row] = j;
                self.row_of[j] = row;
                return true;
            }
        }
        false
    }
}

#[inline]
fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}
