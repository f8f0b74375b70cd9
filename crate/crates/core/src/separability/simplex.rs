//! Dense tableau simplex for the separation LP.
//!
//! With rows `a_i = y_i (1, x_i)` (or `y_i x_i` without intercept) stacked
//! into `A`, the separation LP is
//!
//! ```text
//! maximize 1'A u   subject to   A u >= 0,   -1 <= u <= 1.
//! ```
//!
//! Its dual is `minimize ||A'(1 + lambda)||_1` over `lambda >= 0`, written in
//! standard form with `r+ - r- = A'(1 + lambda)`:
//!
//! ```text
//! minimize  sum_j (r+_j + r-_j)
//! subject to  A' lambda - r+ + r- = -A'1,   lambda, r+, r- >= 0.
//! ```
//!
//! This has one row per column of `A` rather than one per observation, an
//! obvious starting basis made of the `r` variables, and its simplex
//! multipliers `pi` give the primal optimum `u = -pi` directly.

use crate::error::{Error, Result};

const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone)]
pub(crate) struct LpSolution {
    /// Optimal value of both the primal and the dual.
    pub objective: f64,
    /// Primal optimum `u`, each entry in `[-1, 1]`.
    pub u: Vec<f64>,
    /// Dual optimum `lambda`, one entry per row of `A`.
    #[allow(dead_code)]
    pub lambda: Vec<f64>,
    pub pivots: usize,
}

/// Row-major `n x m` matrix of the constraint rows `a_i`.
pub(crate) struct SeparationLp<'a> {
    pub rows: &'a [f64],
    pub n: usize,
    pub m: usize,
}

impl SeparationLp<'_> {
    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::new(self).run()
    }
}

/// Tableau `B^-1 [A' | S]` with right-hand side, where `S` holds one column
/// per `r` pair in whichever orientation was last stored (`sign[j] = +1` for
/// `r-_j`, whose column is `e_j`; `-1` for `r+_j`, column `-e_j`).
struct Tableau {
    n: usize,
    m: usize,
    width: usize,
    /// `m` rows of `width = n + m + 1` entries; the last entry is the rhs.
    cells: Vec<f64>,
    /// Reduced costs of the `n + m` stored columns.
    reduced: Vec<f64>,
    sign: Vec<f64>,
    /// Variable id of the basic variable in each row: `< n` is `lambda_i`,
    /// `n + j` is the stored `r` column `j`.
    basis: Vec<usize>,
    objective: f64,
}

impl Tableau {
    fn new(lp: &SeparationLp<'_>) -> Self {
        let (n, m) = (lp.n, lp.m);
        let width = n + m + 1;
        let mut colsum = vec![0.0; m];
        for i in 0..n {
            let row = &lp.rows[i * m..(i + 1) * m];
            for (s, a) in colsum.iter_mut().zip(row) {
                *s += a;
            }
        }
        // b = -A'1; the starting basic variable of row j is r-_j when
        // b_j >= 0 and r+_j otherwise, so B = diag(sign) and rhs = |b|.
        let sign: Vec<f64> = colsum.iter().map(|&c| if c <= 0.0 { 1.0 } else { -1.0 }).collect();
        let mut cells = vec![0.0; m * width];
        for i in 0..n {
            for j in 0..m {
                cells[j * width + i] = sign[j] * lp.rows[i * m + j];
            }
        }
        for j in 0..m {
            cells[j * width + n + j] = 1.0;
            cells[j * width + n + m] = colsum[j].abs();
        }
        // Every starting basic variable costs 1, so d_i = -sum_j T[j][i] for
        // lambda_i and 0 for the stored r columns.
        let mut reduced = vec![0.0; n + m];
        for j in 0..m {
            let row = &cells[j * width..j * width + n];
            for (d, &t) in reduced[..n].iter_mut().zip(row) {
                *d -= t;
            }
        }
        Self {
            n,
            m,
            width,
            cells,
            reduced,
            sign,
            basis: (0..m).map(|j| n + j).collect(),
            objective: colsum.iter().map(|c| c.abs()).sum(),
        }
    }

    fn run(mut self) -> Result<LpSolution> {
        let limit = 50 * (self.n + self.m) + 1000;
        let mut pivots = 0;
        let mut degenerate = 0;
        loop {
            let bland = degenerate >= DEGENERATE_RUN;
            let Some((col, flip)) = self.entering(bland) else {
                break;
            };
            if pivots >= limit {
                return Err(Error::LpIterationLimit(pivots));
            }
            if flip {
                self.flip(col - self.n);
            }
            let row = self.leaving(col, bland).ok_or(Error::LpUnbounded)?;
            let step = self.rhs(row) / self.cells[row * self.width + col];
            if step.abs() <= 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(row, col);
            pivots += 1;
        }
        Ok(self.extract(pivots))
    }

    fn rhs(&self, row: usize) -> f64 {
        self.cells[row * self.width + self.width - 1]
    }

    /// Most negative reduced cost (Dantzig) or lowest index (Bland). The
    /// second field asks for the stored `r` column to be flipped to its twin.
    fn entering(&self, bland: bool) -> Option<(usize, bool)> {
        let mut best: Option<(usize, bool)> = None;
        let mut best_d = -OPT_TOL;
        for (k, &d) in self.reduced.iter().enumerate() {
            // Twin of a stored r column: cost 1, column negated.
            let twin = if k >= self.n { 2.0 - d } else { f64::INFINITY };
            for (cand, flip) in [(d, false), (twin, true)] {
                if cand < best_d {
                    best = Some((k, flip));
                    if bland {
                        return best;
                    }
                    best_d = cand;
                }
            }
        }
        best
    }

    fn leaving(&self, col: usize, bland: bool) -> Option<usize> {
        let w = self.width;
        let mut min_ratio = f64::INFINITY;
        for r in 0..self.m {
            let a = self.cells[r * w + col];
            if a > PIVOT_TOL {
                min_ratio = min_ratio.min(self.rhs(r).max(0.0) / a);
            }
        }
        if !min_ratio.is_finite() {
            return None;
        }
        let slack = 1e-12 * (1.0 + min_ratio);
        let mut chosen: Option<usize> = None;
        for r in 0..self.m {
            let a = self.cells[r * w + col];
            if a <= PIVOT_TOL || self.rhs(r).max(0.0) / a > min_ratio + slack {
                continue;
            }
            chosen = match chosen {
                None => Some(r),
                Some(c) if bland && self.basis[r] < self.basis[c] => Some(r),
                Some(c) if !bland && a > self.cells[c * w + col] => Some(r),
                keep => keep,
            };
        }
        chosen
    }

    fn flip(&mut self, j: usize) {
        let c = self.n + j;
        for r in 0..self.m {
            self.cells[r * self.width + c] = -self.cells[r * self.width + c];
        }
        self.reduced[c] = 2.0 - self.reduced[c];
        self.sign[j] = -self.sign[j];
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let inv = 1.0 / self.cells[row * w + col];
        let mut prow = self.cells[row * w..(row + 1) * w].to_vec();
        prow.iter_mut().for_each(|v| *v *= inv);
        prow[col] = 1.0;
        for r in 0..self.m {
            if r == row {
                continue;
            }
            let f = self.cells[r * w + col];
            if f == 0.0 {
                continue;
            }
            let target = &mut self.cells[r * w..(r + 1) * w];
            for (t, p) in target.iter_mut().zip(&prow) {
                *t -= f * p;
            }
            target[col] = 0.0;
        }
        let f = self.reduced[col];
        for (d, p) in self.reduced.iter_mut().zip(&prow) {
            *d -= f * p;
        }
        self.reduced[col] = 0.0;
        self.objective += f * prow[w - 1];
        self.cells[row * w..(row + 1) * w].copy_from_slice(&prow);
        self.basis[row] = col;
    }

    fn extract(&self, pivots: usize) -> LpSolution {
        let n = self.n;
        // pi_j = c_B' B^-1 e_j and the stored column's reduced cost is
        // 1 - sign_j pi_j; the primal optimum is u = -pi.
        let u: Vec<f64> = (0..self.m)
            .map(|j| (-(self.sign[j] * (1.0 - self.reduced[n + j]))).clamp(-1.0, 1.0))
            .collect();
        let mut lambda = vec![0.0; n];
        for (r, &var) in self.basis.iter().enumerate() {
            if var < n {
                lambda[var] = self.rhs(r).max(0.0);
            }
        }
        LpSolution {
            objective: self.objective.max(0.0),
            u,
            lambda,
            pivots,
        }
    }
}
