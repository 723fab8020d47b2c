//! Dense primal simplex for `max cᵀy  s.t.  A y ≤ b` with free `y` and a
//! feasible origin (`b ≥ 0`). Free variables are split as `y = y⁺ − y⁻`;
//! Bland's rule prevents cycling on degenerate vertices.

use crate::linalg::{Matrix, Vector};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { value: f64, point: Vector },
    Unbounded,
    IterationLimit,
}

pub(crate) fn maximize(c: &Vector, a: &Matrix, b: &Vector) -> LpOutcome {
    let m = a.nrows();
    let n = a.ncols();
    let cols = 2 * n + m;
    // tableau rows 0..m constraints, row m objective (reduced costs, negated)
    let width = cols + 1;
    let mut t = vec![0.0; (m + 1) * width];
    for i in 0..m {
        for j in 0..n {
            t[i * width + j] = a[(i, j)];
            t[i * width + n + j] = -a[(i, j)];
        }
        t[i * width + 2 * n + i] = 1.0;
        t[i * width + cols] = b[i].max(0.0);
    }
    for j in 0..n {
        t[m * width + j] = -c[j];
        t[m * width + n + j] = c[j];
    }
    let mut basis: Vec<usize> = (2 * n..2 * n + m).collect();
    let eps = 1e-12;
    for _ in 0..50 * (m + cols) {
        // entering: lowest index with negative reduced cost
        let Some(enter) = (0..cols).find(|&j| t[m * width + j] < -eps) else {
            let mut y = Vector::zeros(n);
            for (i, &bv) in basis.iter().enumerate() {
                let val = t[i * width + cols];
                if bv < n {
                    y[bv] += val;
                } else if bv < 2 * n {
                    y[bv - n] -= val;
                }
            }
            return LpOutcome::Optimal { value: c.dot(&y), point: y };
        };
        // leaving: min ratio, ties broken by lowest basis index
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = t[i * width + enter];
            if coef > eps {
                let ratio = t[i * width + cols] / coef;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - eps || (ratio <= lr + eps && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, _)) = leave else {
            return LpOutcome::Unbounded;
        };
        let pivot = t[row * width + enter];
        for j in 0..width {
            t[row * width + j] /= pivot;
        }
        for i in 0..=m {
            if i != row {
                let factor = t[i * width + enter];
                if factor != 0.0 {
                    for j in 0..width {
                        t[i * width + j] -= factor * t[row * width + j];
                    }
                }
            }
        }
        basis[row] = enter;
    }
    LpOutcome::IterationLimit
}
