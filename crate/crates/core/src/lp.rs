//! Dense two-phase primal simplex with Bland's rule.
//!
//! Solves `minimize c·x subject to A x = b, x >= 0`. Rows are flipped so that
//! `b >= 0`; columns that already form a `+1` unit vector seed the initial
//! basis and artificial columns are added only for the remaining rows.

/// Zero tolerance for reduced costs, pivots and phase-one feasibility.
pub const LP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Primal solution (meaningful only when `Optimal`).
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

struct Tableau {
    /// `m` constraint rows, each `cols + 1` wide (last entry is the rhs).
    rows: Vec<Vec<f64>>,
    /// Reduced costs; the last entry is minus the objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
    iterations: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            let f = row[c];
            if i != r && f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    /// Sets the objective row to the reduced costs of `cost` under the
    /// current basis.
    fn price(&mut self, cost: &[f64]) {
        self.obj = cost.to_vec();
        self.obj.push(0.0);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for (o, v) in self.obj.iter_mut().zip(row) {
                    *o -= cb * v;
                }
            }
        }
    }

    /// Runs simplex iterations over the columns accepted by `allowed`.
    fn optimize(&mut self, allowed: impl Fn(usize) -> bool, limit: usize) -> LpStatus {
        let rhs = self.cols;
        loop {
            if self.iterations >= limit {
                return LpStatus::IterationLimit;
            }
            // Bland: lowest-index improving column.
            let Some(enter) = (0..self.cols).find(|&j| allowed(j) && self.obj[j] < -LP_TOLERANCE) else {
                return LpStatus::Optimal;
            };
            // Bland: minimum ratio, ties broken by the lowest basic index.
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[enter];
                if a > LP_TOLERANCE {
                    let ratio = row[rhs] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-12
                                || ((ratio - br).abs() <= 1e-12 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return LpStatus::Unbounded;
            };
            self.pivot(r, enter);
        }
    }
}

/// Minimizes `c·x` subject to `a x = b`, `x >= 0`.
pub fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpResult {
    let n = c.len();
    let m = a.len();
    assert_eq!(b.len(), m, "one rhs per constraint row");
    let limit = 50_000 + 200 * (n + m);

    let mut rows: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            assert_eq!(row.len(), n, "constraint width must equal the cost length");
            let mut r = row.clone();
            r.push(bi);
            if bi < 0.0 {
                r.iter_mut().for_each(|v| *v = -*v);
            }
            r
        })
        .collect();

    // Reuse existing +1 unit columns as the starting basis.
    let mut basis: Vec<Option<usize>> = vec![None; m];
    for j in 0..n {
        let mut hit = None;
        let mut unit = true;
        for (i, row) in rows.iter().enumerate() {
            let v = row[j];
            if v == 1.0 && hit.is_none() {
                hit = Some(i);
            } else if v != 0.0 {
                unit = false;
                break;
            }
        }
        if let (true, Some(i)) = (unit, hit) {
            if basis[i].is_none() {
                basis[i] = Some(j);
            }
        }
    }
    let missing: Vec<usize> = (0..m).filter(|&i| basis[i].is_none()).collect();
    let cols = n + missing.len();
    for row in rows.iter_mut() {
        let rhs = row.pop().expect("row carries its rhs");
        row.resize(cols, 0.0);
        row.push(rhs);
    }
    for (k, &i) in missing.iter().enumerate() {
        rows[i][n + k] = 1.0;
        basis[i] = Some(n + k);
    }
    let mut t = Tableau {
        rows,
        obj: Vec::new(),
        basis: basis.into_iter().map(|b| b.expect("every row has a basic column")).collect(),
        cols,
        iterations: 0,
    };

    if !missing.is_empty() {
        let phase_one: Vec<f64> = (0..cols).map(|j| if j >= n { 1.0 } else { 0.0 }).collect();
        t.price(&phase_one);
        let status = t.optimize(|_| true, limit);
        if status == LpStatus::IterationLimit {
            return finish(&t, n, c, status);
        }
        let infeasibility = t
            .rows
            .iter()
            .zip(&t.basis)
            .filter(|(_, &bv)| bv >= n)
            .map(|(row, _)| row[cols])
            .sum::<f64>();
        if infeasibility > LP_TOLERANCE {
            return finish(&t, n, c, LpStatus::Infeasible);
        }
        // Drive degenerate artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n {
                match (0..n).find(|&j| t.rows[i][j].abs() > LP_TOLERANCE) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = c.to_vec();
    cost.resize(cols, 0.0);
    t.price(&cost);
    let status = t.optimize(|j| j < n, limit);
    finish(&t, n, c, status)
}

fn finish(t: &Tableau, n: usize, c: &[f64], status: LpStatus) -> LpResult {
    let mut x = vec![0.0; n];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < n {
            x[b] = row[t.cols];
        }
    }
    let objective = x.iter().zip(c).map(|(a, b)| a * b).sum();
    LpResult { status, x, objective, iterations: t.iterations }
}
