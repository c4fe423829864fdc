//! A small dense two-phase simplex solver, used to decide which sign
//! chambers of an affine arrangement contain points.
//!
//! Problems are `maximize c·y subject to A y ≤ b, y ≥ 0`. Pivoting uses
//! Bland's rule, so the solver terminates on degenerate problems. It is meant
//! for the few-dozen-variable problems that chamber discovery produces.

use alloc::vec;
use alloc::vec::Vec;

const EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpOutcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
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

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            self.obj.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
        }
        self.basis[r] = c;
    }

    /// Runs primal simplex on the current objective row over columns
    /// `0..allowed`. Returns `false` if the objective is unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.obj[j] > EPS) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][c];
                if a > EPS {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - EPS || (ratio <= bratio + EPS && self.basis[r] < self.basis[br]) {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Solves `maximize c·y s.t. A y ≤ b, y ≥ 0`. `a` is a list of rows, each of
/// length `c.len()`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    let artificial: Vec<usize> = (0..m).filter(|&i| b[i] < 0.0).collect();
    let width = n + m + artificial.len();
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = n + m;
    for i in 0..m {
        let mut row = vec![0.0; width + 1];
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = flip * a[i][j];
        }
        row[n + i] = flip;
        row[width] = flip * b[i];
        if b[i] < 0.0 {
            row[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, obj: vec![0.0; width + 1], basis, width };

    if !artificial.is_empty() {
        // phase 1: maximize -Σ artificials
        for r in 0..m {
            if t.basis[r] >= n + m {
                for j in 0..=width {
                    t.obj[j] += t.rows[r][j];
                }
            }
        }
        for j in (n + m)..width {
            t.obj[j] = 0.0;
        }
        t.optimize(width);
        if t.obj[width] > 1e-9 {
            return LpOutcome::Infeasible;
        }
        for r in 0..m {
            if t.basis[r] >= n + m {
                if let Some(c) = (0..n + m).find(|&j| t.rows[r][j].abs() > EPS) {
                    t.pivot(r, c);
                }
            }
        }
    }

    // phase 2
    let cost = |j: usize| if j < n { c[j] } else { 0.0 };
    t.obj = vec![0.0; width + 1];
    t.obj[..n].copy_from_slice(&c[..n]);
    for r in 0..m {
        let cb = cost(t.basis[r]);
        if cb != 0.0 {
            for j in 0..=width {
                t.obj[j] -= cb * t.rows[r][j];
            }
        }
    }
    if !t.optimize(n + m) {
        return LpOutcome::Unbounded;
    }
    LpOutcome::Optimal(-t.obj[width])
}

/// One sign condition `a·x + b ≥ 0` (`nonneg`) or `a·x + b < 0`.
#[derive(Debug, Clone)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub nonneg: bool,
}

/// Axis-aligned box `lo ≤ x_i ≤ hi` applied to every coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

/// Decides whether the half-open chamber cut out by `constraints` in `R^dim`
/// (optionally intersected with `bounds`) contains a point.
///
/// Each constraint is rescaled to a unit normal, and non-strict conditions
/// are relaxed by `tol`, so chambers that are only realized on a
/// lower-dimensional set are reported as nonempty. Strict conditions need a
/// margin larger than `tol`.
pub fn chamber_nonempty(constraints: &[HalfSpace], dim: usize, bounds: Option<Bounds>, tol: f64) -> bool {
    // columns: u (dim), v (dim), s with x = u - v and margin t = s - 1
    let nvar = 2 * dim + 1;
    let s = 2 * dim;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut strict = false;
    for h in constraints {
        let norm = libm::sqrt(h.normal.iter().map(|w| w * w).sum::<f64>());
        if norm <= 1e-14 {
            // constant function: the sign is fixed by the offset
            let holds = if h.nonneg { h.offset >= -tol } else { h.offset < -tol };
            if !holds {
                return false;
            }
            continue;
        }
        let mut row = vec![0.0; nvar];
        if h.nonneg {
            // -(a·x) ≤ b + tol
            for j in 0..dim {
                row[j] = -h.normal[j] / norm;
                row[dim + j] = h.normal[j] / norm;
            }
            a.push(row);
            b.push(h.offset / norm + tol);
        } else {
            // a·x + b + t ≤ 0 with t = s - 1
            strict = true;
            for j in 0..dim {
                row[j] = h.normal[j] / norm;
                row[dim + j] = -h.normal[j] / norm;
            }
            row[s] = 1.0;
            a.push(row);
            b.push(1.0 - h.offset / norm);
        }
    }
    let mut cap = vec![0.0; nvar];
    cap[s] = 1.0;
    a.push(cap);
    b.push(2.0);
    if let Some(Bounds { lo, hi }) = bounds {
        for j in 0..dim {
            let mut up = vec![0.0; nvar];
            up[j] = 1.0;
            up[dim + j] = -1.0;
            a.push(up.clone());
            b.push(hi);
            up.iter_mut().for_each(|v| *v = -*v);
            a.push(up);
            b.push(-lo);
        }
    }
    let mut c = vec![0.0; nvar];
    c[s] = 1.0;
    match maximize(&c, &a, &b) {
        LpOutcome::Infeasible => false,
        LpOutcome::Optimal(v) => !strict || v - 1.0 > tol,
        LpOutcome::Unbounded => true,
    }
}
