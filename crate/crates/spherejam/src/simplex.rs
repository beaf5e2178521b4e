//! Small dense simplex solver for linear programs with bounded variables.
//!
//! Problems here are tiny (tens of variables), so we use a revised simplex
//! that refactorizes the basis with a dense LU at every pivot. Bland's rule
//! is used throughout for anti-cycling.

use nalgebra::{DMatrix, DVector};

const TOL: f64 = 1e-9;

/// `maximize c.y  subject to  A y >= b,  lo <= y <= hi`.
#[derive(Debug, Clone)]
pub struct Lp {
    pub objective: Vec<f64>,
    /// One inequality row per entry: `row . y >= rhs`.
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { objective: f64, point: Vec<f64> },
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Tableau {
    // Equality system: columns = structural vars + slacks + artificials.
    cols: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    n_rows: usize,
}

impl Tableau {
    fn values(&self) -> Vec<f64> {
        let m = self.n_rows;
        let nv = self.cols.len();
        let mut vals = vec![0.0; nv];
        let mut resid = DVector::from_column_slice(&self.rhs);
        for j in 0..nv {
            match self.state[j] {
                VarState::AtLower => vals[j] = self.lower[j],
                VarState::AtUpper => vals[j] = self.upper[j],
                VarState::Basic(_) => continue,
            }
            if vals[j] != 0.0 {
                for i in 0..m {
                    resid[i] -= self.cols[j][i] * vals[j];
                }
            }
        }
        if m > 0 {
            let basis_mat = self.basis_matrix();
            if let Some(xb) = basis_mat.lu().solve(&resid) {
                for (k, &j) in self.basis.iter().enumerate() {
                    vals[j] = xb[k];
                }
            }
        }
        vals
    }

    fn basis_matrix(&self) -> DMatrix<f64> {
        let m = self.n_rows;
        DMatrix::from_fn(m, m, |i, k| self.cols[self.basis[k]][i])
    }

    /// One simplex phase maximizing `obj`; mutates states in place.
    fn optimize(&mut self, obj: &[f64], max_pivots: usize) -> Result<(), String> {
        let m = self.n_rows;
        let nv = self.cols.len();
        for _ in 0..max_pivots {
            let duals = if m == 0 {
                DVector::zeros(0)
            } else {
                let basis_mat = self.basis_matrix();
                let cb = DVector::from_fn(m, |k, _| obj[self.basis[k]]);
                basis_mat
                    .transpose()
                    .lu()
                    .solve(&cb)
                    .ok_or_else(|| "singular basis".to_string())?
            };

            // Pricing with Bland's rule: smallest improving index.
            let mut entering = None;
            for j in 0..nv {
                let reduced = match self.state[j] {
                    VarState::Basic(_) => continue,
                    _ => {
                        let mut d = obj[j];
                        for i in 0..m {
                            d -= duals[i] * self.cols[j][i];
                        }
                        d
                    }
                };
                let improves = match self.state[j] {
                    VarState::AtLower => reduced > TOL,
                    VarState::AtUpper => reduced < -TOL,
                    VarState::Basic(_) => false,
                };
                if improves {
                    entering = Some((j, reduced));
                    break;
                }
            }
            let Some((e, reduced)) = entering else {
                return Ok(());
            };

            // Direction of change of the entering variable.
            let dir = if matches!(self.state[e], VarState::AtLower) {
                1.0
            } else {
                -1.0
            };
            let _ = reduced;
            let w = if m == 0 {
                DVector::zeros(0)
            } else {
                let col_e = DVector::from_column_slice(&self.cols[e]);
                self.basis_matrix()
                    .lu()
                    .solve(&col_e)
                    .ok_or_else(|| "singular basis".to_string())?
            };

            let vals = self.values();
            // Ratio test: basic variables move by -dir*w per unit of t.
            let mut t_max = self.upper[e] - self.lower[e];
            let mut leaving: Option<(usize, bool)> = None; // (basis slot, to_upper)
            for k in 0..m {
                let j = self.basis[k];
                let delta = -dir * w[k];
                let (t, to_upper) = if delta < -TOL {
                    ((vals[j] - self.lower[j]) / -delta, false)
                } else if delta > TOL {
                    ((self.upper[j] - vals[j]) / delta, true)
                } else {
                    continue;
                };
                let t = t.max(0.0);
                if t < t_max - TOL {
                    t_max = t;
                    leaving = Some((k, to_upper));
                } else if t < t_max + TOL {
                    // Tie: Bland's rule, smallest variable index leaves.
                    match leaving {
                        Some((s, _)) if self.basis[s] <= j => {}
                        _ => {
                            t_max = t.min(t_max);
                            leaving = Some((k, to_upper));
                        }
                    }
                }
            }
            if !t_max.is_finite() {
                return Err("unbounded".to_string());
            }
            match leaving {
                None => {
                    // Bound flip of the entering variable.
                    self.state[e] = if dir > 0.0 {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                }
                Some((k, to_upper)) => {
                    let out = self.basis[k];
                    self.state[out] = if to_upper {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    self.state[e] = VarState::Basic(k);
                    self.basis[k] = e;
                }
            }
        }
        Err("pivot limit exceeded".to_string())
    }
}

pub fn solve(lp: &Lp) -> Result<LpOutcome, String> {
    let m = lp.rows.len();
    let n = lp.objective.len();
    assert_eq!(lp.rhs.len(), m);
    assert_eq!(lp.lower.len(), n);
    assert_eq!(lp.upper.len(), n);

    // Equality form: row.y - s_i = rhs_i with s_i >= 0.
    let n_slack = m;
    let nv = n + n_slack + m; // structural + slack + artificial
    let mut cols = vec![vec![0.0; m]; nv];
    for (i, row) in lp.rows.iter().enumerate() {
        for j in 0..n {
            cols[j][i] = row[j];
        }
        cols[n + i][i] = -1.0;
    }
    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    lower.extend(std::iter::repeat(0.0).take(n_slack));
    upper.extend(std::iter::repeat(f64::INFINITY).take(n_slack));

    // Start: structural at lower bound, slacks at 0, artificials absorb residual.
    let mut state = vec![VarState::AtLower; nv];
    let mut resid = lp.rhs.clone();
    for j in 0..n {
        if lp.lower[j] != 0.0 {
            for i in 0..m {
                resid[i] -= cols[j][i] * lp.lower[j];
            }
        }
    }
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let a = n + n_slack + i;
        let sign = if resid[i] >= 0.0 { 1.0 } else { -1.0 };
        cols[a][i] = sign;
        lower.push(0.0);
        upper.push(f64::INFINITY);
        state[a] = VarState::Basic(i);
        basis.push(a);
    }

    let mut tab = Tableau {
        cols,
        rhs: lp.rhs.clone(),
        lower,
        upper,
        state,
        basis,
        n_rows: m,
    };

    // Phase 1: drive artificials to zero.
    let mut phase1 = vec![0.0; nv];
    for j in (n + n_slack)..nv {
        phase1[j] = -1.0;
    }
    tab.optimize(&phase1, 10_000).map_err(|e| format!("phase 1: {e}"))?;
    let vals = tab.values();
    let art_sum: f64 = vals[(n + n_slack)..nv].iter().sum();
    if art_sum > 1e-7 {
        return Ok(LpOutcome::Infeasible);
    }
    // Pin artificials at zero for phase 2.
    for j in (n + n_slack)..nv {
        tab.upper[j] = 0.0;
        tab.lower[j] = 0.0;
    }

    let mut phase2 = vec![0.0; nv];
    phase2[..n].copy_from_slice(&lp.objective);
    tab.optimize(&phase2, 10_000).map_err(|e| format!("phase 2: {e}"))?;

    let vals = tab.values();
    let point: Vec<f64> = vals[..n].to_vec();
    let objective = lp
        .objective
        .iter()
        .zip(&point)
        .map(|(c, y)| c * y)
        .sum();
    Ok(LpOutcome::Optimal { objective, point })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opt(lp: &Lp) -> (f64, Vec<f64>) {
        match solve(lp).unwrap() {
            LpOutcome::Optimal { objective, point } => (objective, point),
            LpOutcome::Infeasible => panic!("infeasible"),
        }
    }

    #[test]
    fn box_only() {
        let lp = Lp {
            objective: vec![1.0, -2.0],
            rows: vec![],
            rhs: vec![],
            lower: vec![-1.0, -1.0],
            upper: vec![1.0, 1.0],
        };
        let (v, p) = opt(&lp);
        assert!((v - 3.0).abs() < 1e-9);
        assert!((p[0] - 1.0).abs() < 1e-9 && (p[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_halfplane() {
        // max x subject to -x >= -0.5 i.e. x <= 0.5
        let lp = Lp {
            objective: vec![1.0],
            rows: vec![vec![-1.0]],
            rhs: vec![-0.5],
            lower: vec![-1.0],
            upper: vec![1.0],
        };
        let (v, _) = opt(&lp);
        assert!((v - 0.5).abs() < 1e-9);
    }

    #[test]
    fn cone_pinned_to_origin() {
        // x >= 0 and -x >= 0 force x = 0.
        let lp = Lp {
            objective: vec![1.0],
            rows: vec![vec![1.0], vec![-1.0]],
            rhs: vec![0.0, 0.0],
            lower: vec![-1.0],
            upper: vec![1.0],
        };
        let (v, _) = opt(&lp);
        assert!(v.abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        // x >= 2 within box [-1, 1]
        let lp = Lp {
            objective: vec![1.0],
            rows: vec![vec![1.0]],
            rhs: vec![2.0],
            lower: vec![-1.0],
            upper: vec![1.0],
        };
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn two_dim_polytope_corner() {
        // max x + y subject to x + y <= 1, x, y in [0, 5]
        let lp = Lp {
            objective: vec![1.0, 1.0],
            rows: vec![vec![-1.0, -1.0]],
            rhs: vec![-1.0],
            lower: vec![0.0, 0.0],
            upper: vec![5.0, 5.0],
        };
        let (v, _) = opt(&lp);
        assert!((v - 1.0).abs() < 1e-9);
    }
}
