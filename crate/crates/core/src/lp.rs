//! Small dense two-phase simplex.
//!
//! Solves `maximize cᵀx subject to A x = b, x ≥ 0` with Bland's pivoting rule.
//! Problems here have at most a few dozen rows and a few hundred columns, so
//! the full tableau is kept in memory.

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
    /// Pivot limit reached; signals degenerate or badly scaled input.
    Stalled,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for x in self.rows[r].iter_mut() {
            *x /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[col];
                if f != 0.0 {
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (x, y) in self.obj.iter_mut().zip(&pivot_row) {
                *x -= f * y;
            }
        }
        self.basis[r] = col;
    }

    /// Runs simplex iterations on columns `< allowed`. Objective row holds
    /// reduced costs of a maximization: a positive entry may enter.
    fn optimize(&mut self, allowed: usize) -> Result<(), LpOutcome> {
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..allowed).find(|&j| self.obj[j] > COST_EPS) else {
                return Ok(());
            };
            // Ratio test; degenerate ties go to the largest pivot element,
            // which keeps the tableau well conditioned.
            let mut best: Option<(usize, f64, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r).max(0.0) / a;
                    let better = match best {
                        None => true,
                        Some((_, bratio, ba)) => {
                            let tie = 1e-12 * bratio.abs().max(1.0);
                            ratio < bratio - tie || (ratio <= bratio + tie && a > ba)
                        }
                    };
                    if better {
                        best = Some((r, ratio, a));
                    }
                }
            }
            match best {
                None => return Err(LpOutcome::Unbounded),
                Some((r, _, _)) => self.pivot(r, col),
            }
        }
        Err(LpOutcome::Stalled)
    }
}

/// Maximizes `c·x` over `{x ≥ 0 : A x = b}`. `a` is row-major, one entry per
/// constraint.
pub fn maximize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    assert_eq!(b.len(), m, "rhs length");
    assert!(a.iter().all(|row| row.len() == n), "row length");

    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut t = vec![0.0; width + 1];
        for (j, &v) in row.iter().enumerate() {
            t[j] = sign * v;
        }
        t[n + i] = 1.0;
        t[width] = sign * b[i];
        rows.push(t);
    }
    // Phase one: maximize −Σ artificials; reduced costs are the column sums.
    let mut obj = vec![0.0; width + 1];
    for row in &rows {
        for j in 0..n {
            obj[j] += row[j];
        }
        obj[width] += row[width];
    }
    let mut tab = Tableau { rows, obj, basis: (n..n + m).collect(), width };
    if let Err(outcome) = tab.optimize(n) {
        if outcome == LpOutcome::Stalled {
            return outcome;
        }
    }
    let scale = b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let infeasibility: f64 = (0..m).filter(|&r| tab.basis[r] >= n).map(|r| tab.rhs(r).abs()).sum();
    if infeasibility > 1e-9 * scale {
        return LpOutcome::Infeasible;
    }
    // Drive remaining artificials out of the basis, dropping redundant rows.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= n {
            let col = (0..n).max_by(|&i, &j| tab.rows[r][i].abs().total_cmp(&tab.rows[r][j].abs()));
            match col.filter(|&j| tab.rows[r][j].abs() > 1e-9) {
                Some(col) => tab.pivot(r, col),
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    // Phase two.
    let mut obj = vec![0.0; width + 1];
    obj[..n].copy_from_slice(c);
    for (r, &bv) in tab.basis.iter().enumerate() {
        let f = obj[bv];
        if f != 0.0 {
            for (x, y) in obj.iter_mut().zip(&tab.rows[r]) {
                *x -= f * y;
            }
        }
    }
    tab.obj = obj;
    if let Err(outcome) = tab.optimize(n) {
        return outcome;
    }
    let mut x = vec![0.0; n];
    for (r, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.rhs(r).max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, value }
}
