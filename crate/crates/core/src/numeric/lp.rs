//! Dense two-phase simplex with Bland's rule, sized for the handful of
//! equality constraints and box-like inequalities of the density design.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq)]
pub enum LpError {
    Infeasible { phase_one_objective: f64 },
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// `min cost·x` subject to `eq_rows·x = eq_rhs`, `le_rows·x <= le_rhs`, `x >= 0`.
pub fn minimize(
    cost: &[f64],
    eq_rows: &[Vec<f64>],
    eq_rhs: &[f64],
    le_rows: &[Vec<f64>],
    le_rhs: &[f64],
) -> Result<LpSolution, LpError> {
    let n = cost.len();
    let n_le = le_rows.len();
    let m = eq_rows.len() + n_le;
    // Columns: original | slacks | artificials | rhs.
    let n_art = m;
    let width = n + n_le + n_art + 1;
    let rhs_col = width - 1;
    let mut t = vec![vec![0.0; width]; m];
    let mut basis = vec![0usize; m];

    for (r, (row, &b)) in eq_rows.iter().zip(eq_rhs).enumerate() {
        let scale = row.iter().fold(b.abs(), |acc, x| acc.max(x.abs())).max(f64::MIN_POSITIVE);
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        for (j, &a) in row.iter().enumerate() {
            t[r][j] = sign * a / scale;
        }
        t[r][rhs_col] = sign * b / scale;
        t[r][n + n_le + r] = 1.0;
        basis[r] = n + n_le + r;
    }
    for (k, (row, &b)) in le_rows.iter().zip(le_rhs).enumerate() {
        let r = eq_rows.len() + k;
        let scale = row.iter().fold(b.abs(), |acc, x| acc.max(x.abs())).max(f64::MIN_POSITIVE);
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        for (j, &a) in row.iter().enumerate() {
            t[r][j] = sign * a / scale;
        }
        t[r][n + k] = sign;
        t[r][rhs_col] = sign * b / scale;
        if sign > 0.0 {
            basis[r] = n + k;
        } else {
            t[r][n + n_le + r] = 1.0;
            basis[r] = n + n_le + r;
        }
    }

    let is_art = |j: usize| j >= n + n_le && j < n + n_le + n_art;
    let max_iter = 50 * (width + m) + 1000;

    // Phase one: minimise the sum of artificials in the basis.
    let mut phase1 = vec![0.0; width - 1];
    for r in 0..m {
        if is_art(basis[r]) {
            phase1[basis[r]] = 1.0;
        }
    }
    run_simplex(&mut t, &mut basis, &phase1, |j| j < width - 1, max_iter)?;
    let infeas: f64 = (0..m).filter(|&r| is_art(basis[r])).map(|r| t[r][rhs_col]).sum();
    if infeas > 1e-9 {
        return Err(LpError::Infeasible { phase_one_objective: infeas });
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    for r in 0..m {
        if is_art(basis[r]) {
            if let Some(j) = (0..n + n_le).find(|&j| t[r][j].abs() > 1e-9) {
                pivot(&mut t, &mut basis, r, j);
            }
        }
    }

    let mut phase2 = vec![0.0; width - 1];
    phase2[..n].copy_from_slice(cost);
    run_simplex(&mut t, &mut basis, &phase2, |j| !is_art(j) && j < width - 1, max_iter)?;

    let mut x = vec![0.0; n];
    for r in 0..m {
        if basis[r] < n {
            x[basis[r]] = t[r][rhs_col].max(0.0);
        }
    }
    let objective = x.iter().zip(cost).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, objective })
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[row].clone();
    for (r, line) in t.iter_mut().enumerate() {
        if r != row {
            let factor = line[col];
            if factor != 0.0 {
                for (v, pr) in line.iter_mut().zip(&pivot_row) {
                    *v -= factor * pr;
                }
            }
        }
    }
    basis[row] = col;
}

fn run_simplex(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    allowed: impl Fn(usize) -> bool,
    max_iter: usize,
) -> Result<(), LpError> {
    let m = t.len();
    let rhs_col = t.first().map_or(0, |r| r.len() - 1);
    for _ in 0..max_iter {
        // Reduced costs c_j - c_B B^-1 a_j, Bland's rule on the entering column.
        let mut entering = None;
        for j in 0..rhs_col {
            if !allowed(j) || basis.contains(&j) {
                continue;
            }
            let mut rc = cost[j];
            for r in 0..m {
                rc -= cost[basis[r]] * t[r][j];
            }
            if rc < -1e-11 {
                entering = Some(j);
                break;
            }
        }
        let Some(col) = entering else {
            return Ok(());
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            let a = t[r][col];
            if a > 1e-12 {
                let ratio = t[r][rhs_col] / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-14 || (ratio <= lratio + 1e-14 && basis[r] < basis[lr]) {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
        }
        let Some((row, _)) = leave else {
            return Err(LpError::Unbounded);
        };
        pivot(t, basis, row, col);
    }
    Err(LpError::IterationLimit)
}
