//! Post-processing of local maxima: contact graph extraction, Gauss-Newton
//! refinement of the contact system, first-order rigidity via the motion
//! cone, and radius verification against reference minimal polynomials.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::container::{Configuration, ConstraintId, ConstraintSet};
use crate::error::{Error, Result};
use crate::simplex::{self, Lp, LpOutcome};

pub const DEFAULT_CONTACT_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct ContactGraph {
    pub pair_edges: Vec<(usize, usize)>,
    pub wall_incidences: Vec<(usize, usize)>,
    pub tolerance: f64,
}

impl ContactGraph {
    pub fn len(&self) -> usize {
        self.pair_edges.len() + self.wall_incidences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Spheres appearing in no contact at all.
    pub fn rattler_candidates(&self, n: usize) -> BTreeSet<usize> {
        let mut touched = vec![false; n];
        for &(i, j) in &self.pair_edges {
            touched[i] = true;
            touched[j] = true;
        }
        for &(i, _) in &self.wall_incidences {
            touched[i] = true;
        }
        (0..n).filter(|&i| !touched[i]).collect()
    }
}

/// All constraints whose value lies within `tol` of `r`.
pub fn contact_graph(cs: &ConstraintSet, x: &Configuration, r: f64, tol: f64) -> ContactGraph {
    let mut pair_edges = Vec::new();
    let mut wall_incidences = Vec::new();
    for &id in cs.ids() {
        let v = cs.evaluate(id, x);
        if (v - r).abs() <= tol {
            match id {
                ConstraintId::Pair(i, j) => pair_edges.push((i, j)),
                ConstraintId::WallContact(i, w) => wall_incidences.push((i, w)),
            }
        }
    }
    ContactGraph {
        pair_edges,
        wall_incidences,
        tolerance: tol,
    }
}

#[derive(Debug, Clone)]
pub struct Refined {
    pub configuration: Configuration,
    pub radius: f64,
    /// Max-norm of the contact-system residual at the returned point.
    pub residual: f64,
    pub rank_deficient: bool,
}

const REFINE_TOL: f64 = 1e-12;
const REFINE_MAX_ITER: usize = 100;

/// Gauss-Newton on the contact system: `|x_i - x_j|^2 - 4r^2 = 0` per pair
/// edge and `wall(x_i) - r = 0` per incidence. Spheres outside the graph are
/// frozen.
pub fn refine(cs: &ConstraintSet, x: &Configuration, graph: &ContactGraph) -> Result<Refined> {
    if graph.is_empty() {
        return Err(Error::EmptyContactGraph);
    }
    let n = cs.n();
    let d = cs.d();
    let mut involved = vec![false; n];
    for &(i, j) in &graph.pair_edges {
        involved[i] = true;
        involved[j] = true;
    }
    for &(i, _) in &graph.wall_incidences {
        involved[i] = true;
    }
    // Variable layout: coordinates of involved spheres, then r.
    let mut var_of_sphere = vec![usize::MAX; n];
    let mut nvars = 0;
    for i in 0..n {
        if involved[i] {
            var_of_sphere[i] = nvars;
            nvars += d;
        }
    }
    let r_var = nvars;
    nvars += 1;

    let mut work = x.clone();
    let mut r = crate::envelope::g_value(cs, x);
    let n_eq = graph.len();
    let mut rank_deficient = false;

    let residuals = |cfg: &Configuration, r: f64| -> Vec<f64> {
        let mut res = Vec::with_capacity(n_eq);
        for &(i, j) in &graph.pair_edges {
            let dist_sq: f64 = cfg
                .point(i)
                .iter()
                .zip(cfg.point(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            res.push(dist_sq - 4.0 * r * r);
        }
        for &(i, w) in &graph.wall_incidences {
            res.push(cs.container().walls()[w].distance(cfg.point(i)) - r);
        }
        res
    };

    for iteration in 0..=REFINE_MAX_ITER {
        let res = residuals(&work, r);
        let max_res = res.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if max_res <= REFINE_TOL {
            return Ok(Refined {
                configuration: work,
                radius: r,
                residual: max_res,
                rank_deficient,
            });
        }
        if iteration == REFINE_MAX_ITER {
            return Err(Error::NonConvergence {
                residual: max_res,
                iterations: REFINE_MAX_ITER,
            });
        }

        let mut jac = DMatrix::zeros(n_eq, nvars);
        let mut row = 0;
        for &(i, j) in &graph.pair_edges {
            for k in 0..d {
                let diff = work.point(i)[k] - work.point(j)[k];
                if involved[i] {
                    jac[(row, var_of_sphere[i] + k)] = 2.0 * diff;
                }
                if involved[j] {
                    jac[(row, var_of_sphere[j] + k)] = -2.0 * diff;
                }
            }
            jac[(row, r_var)] = -8.0 * r;
            row += 1;
        }
        for &(i, w) in &graph.wall_incidences {
            let wall = &cs.container().walls()[w];
            for k in 0..d {
                jac[(row, var_of_sphere[i] + k)] = wall.normal[k];
            }
            jac[(row, r_var)] = -1.0;
            row += 1;
        }

        let rhs = DVector::from_fn(n_eq, |i, _| -res[i]);
        let svd = jac
            .svd(true, true);
        let rank = svd.rank(1e-10);
        if rank < nvars.min(n_eq) {
            rank_deficient = true;
        }
        let delta = svd
            .solve(&rhs, 1e-10)
            .map_err(|e| Error::NumericalFailure(e.to_string()))?;
        for i in 0..n {
            if involved[i] {
                let base = var_of_sphere[i];
                for k in 0..d {
                    work.coords_mut()[i * d + k] += delta[base + k];
                }
            }
        }
        r += delta[r_var];
    }
    unreachable!()
}

#[derive(Debug, Clone)]
pub struct RigidityVerdict {
    pub fully_jammed: bool,
    pub rattlers: BTreeSet<usize>,
    /// A nonzero first-order motion compatible with all contacts, when one
    /// exists.
    pub witness: Option<Vec<f64>>,
}

const JAM_TOL: f64 = 1e-9;
const RATTLER_TOL: f64 = 1e-6;

/// First-order rigidity test: the cone of infinitesimal motions compatible
/// with every contact is probed by 2nd bounded linear programs, one per
/// signed coordinate. The packing is fully jammed iff the cone is `{0}`.
pub fn connelly_test(cs: &ConstraintSet, x: &Configuration, graph: &ContactGraph) -> Result<RigidityVerdict> {
    let n = cs.n();
    let d = cs.d();
    let dof = n * d;

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(graph.len());
    for &(i, j) in &graph.pair_edges {
        let mut row = vec![0.0; dof];
        for k in 0..d {
            let diff = x.point(i)[k] - x.point(j)[k];
            row[i * d + k] = diff;
            row[j * d + k] = -diff;
        }
        rows.push(row);
    }
    for &(i, w) in &graph.wall_incidences {
        let mut row = vec![0.0; dof];
        let wall = &cs.container().walls()[w];
        row[i * d..(i + 1) * d].copy_from_slice(&wall.normal);
        rows.push(row);
    }
    let rhs = vec![0.0; rows.len()];

    let mut fully_jammed = true;
    let mut rattlers = BTreeSet::new();
    let mut witness: Option<(f64, Vec<f64>)> = None;
    for coord in 0..dof {
        for sign in [1.0, -1.0] {
            let mut objective = vec![0.0; dof];
            objective[coord] = sign;
            let lp = Lp {
                objective,
                rows: rows.clone(),
                rhs: rhs.clone(),
                lower: vec![-1.0; dof],
                upper: vec![1.0; dof],
            };
            match simplex::solve(&lp).map_err(Error::LpFailure)? {
                LpOutcome::Optimal { objective, point } => {
                    if objective > JAM_TOL {
                        fully_jammed = false;
                    }
                    if objective > RATTLER_TOL {
                        rattlers.insert(coord / d);
                        let norm: f64 = point.iter().map(|v| v * v).sum::<f64>().sqrt();
                        if norm > RATTLER_TOL
                            && witness.as_ref().map_or(true, |(b, _)| objective > *b)
                        {
                            witness = Some((objective, point));
                        }
                    }
                }
                LpOutcome::Infeasible => {
                    // y = 0 is always feasible; this signals a solver bug.
                    return Err(Error::LpFailure("motion cone LP reported infeasible".into()));
                }
            }
        }
    }
    if fully_jammed {
        rattlers.clear();
        witness = None;
    }
    Ok(RigidityVerdict {
        fully_jammed,
        rattlers,
        witness: witness.map(|(_, w)| w),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePolynomial {
    pub label: String,
    pub n: usize,
    pub d: usize,
    /// Integer coefficients ascending by degree, stored as f64.
    pub coefficients: Vec<f64>,
}

impl ReferencePolynomial {
    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }
}

/// Parse the bundled polynomial table: one record per line,
/// `label n d c0 c1 ... ck`; `#` starts a comment.
pub fn parse_polynomials(text: &str) -> Result<Vec<ReferencePolynomial>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let label = tok
            .next()
            .ok_or_else(|| Error::MalformedInput("missing polynomial label".into()))?
            .to_string();
        let n: usize = tok
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::MalformedInput(format!("{label}: bad n")))?;
        let d: usize = tok
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::MalformedInput(format!("{label}: bad d")))?;
        let coefficients: Vec<f64> = tok
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::MalformedInput(format!("{label}: bad coefficient `{t}`")))
            })
            .collect::<Result<_>>()?;
        if coefficients.is_empty() || *coefficients.last().unwrap() == 0.0 {
            return Err(Error::MalformedInput(format!(
                "{label}: zero or missing leading coefficient"
            )));
        }
        out.push(ReferencePolynomial {
            label,
            n,
            d,
            coefficients,
        });
    }
    Ok(out)
}

/// The transcribed reference tables bundled with the crate.
pub fn builtin_polynomials() -> Vec<ReferencePolynomial> {
    parse_polynomials(include_str!("../data/tables1-6.txt")).expect("bundled table parses")
}

const ROOT_SCAN_POINTS: usize = 100_000;
const ROOT_INTERVAL: (f64, f64) = (-2.0, 2.0);

/// Real roots in `[-2, 2]` by sign scan and bisection polished to 1e-14.
pub fn real_roots(p: &ReferencePolynomial) -> Vec<f64> {
    let (lo, hi) = ROOT_INTERVAL;
    let step = (hi - lo) / ROOT_SCAN_POINTS as f64;
    let mut roots = Vec::new();
    let mut t_prev = lo;
    let mut f_prev = p.eval(lo);
    for k in 1..=ROOT_SCAN_POINTS {
        let t = lo + k as f64 * step;
        let f = p.eval(t);
        if f_prev == 0.0 {
            roots.push(t_prev);
        } else if f_prev * f < 0.0 {
            roots.push(bisect(p, t_prev, t));
        }
        t_prev = t;
        f_prev = f;
    }
    if f_prev == 0.0 {
        roots.push(t_prev);
    }
    roots
}

fn bisect(p: &ReferencePolynomial, mut a: f64, mut b: f64) -> f64 {
    let mut fa = p.eval(a);
    while b - a > 1e-14 {
        let m = 0.5 * (a + b);
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialMatch {
    pub matched: bool,
    pub nearest_root: f64,
    pub abs_gap: f64,
}

const MATCH_TOL: f64 = 1e-8;

/// Checks `r` against the real roots of `p`, guarding against sign-convention
/// drift by also accepting roots of `p(-t)`.
pub fn polynomial_check(r: f64, p: &ReferencePolynomial) -> Result<PolynomialMatch> {
    if r <= 0.0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let direct = real_roots(p);
    let mut candidates: Vec<f64> = direct.clone();
    candidates.extend(direct.iter().map(|t| -t));
    if candidates.is_empty() {
        return Err(Error::NoRealRoots);
    }
    let mut nearest = candidates[0];
    for &c in &candidates {
        if (c - r).abs() < (nearest - r).abs() {
            nearest = c;
        }
    }
    let abs_gap = (nearest - r).abs();
    Ok(PolynomialMatch {
        matched: abs_gap <= MATCH_TOL,
        nearest_root: nearest,
        abs_gap,
    })
}

/// Find the best-matching bundled polynomial for `(n, d, r)`, if any matches.
pub fn match_reference(r: f64, n: usize, d: usize, tables: &[ReferencePolynomial]) -> Option<(String, PolynomialMatch)> {
    let mut best: Option<(String, PolynomialMatch)> = None;
    for p in tables.iter().filter(|p| p.n == n && p.d == d) {
        if let Ok(m) = polynomial_check(r, p) {
            if m.matched && best.as_ref().map_or(true, |(_, b)| m.abs_gap < b.abs_gap) {
                best = Some((p.label.clone(), m));
            }
        }
    }
    best
}

/// Human-readable polynomial equations of the contact system, one per
/// contact, in variables `x<i>_<k>` and `r`.
pub fn emit_contact_system(cs: &ConstraintSet, x: &Configuration, graph: &ContactGraph) -> Result<String> {
    if graph.is_empty() {
        return Err(Error::EmptyContactGraph);
    }
    let d = cs.d();
    let _ = x;
    let mut out = String::new();
    for &(i, j) in &graph.pair_edges {
        let terms: Vec<String> = (0..d)
            .map(|k| format!("(x{}_{} - x{}_{})^2", i + 1, k + 1, j + 1, k + 1))
            .collect();
        out.push_str(&format!("{} - 4*r^2 = 0\n", terms.join(" + ")));
    }
    for &(i, w) in &graph.wall_incidences {
        let wall = &cs.container().walls()[w];
        let mut expr = String::new();
        for k in 0..d {
            let a = wall.normal[k];
            if a == 0.0 {
                continue;
            }
            let var = format!("x{}_{}", i + 1, k + 1);
            if expr.is_empty() {
                if a == 1.0 {
                    expr = var;
                } else if a == -1.0 {
                    expr = format!("-{var}");
                } else {
                    expr = format!("{a}*{var}");
                }
            } else if a == 1.0 {
                expr.push_str(&format!(" + {var}"));
            } else if a == -1.0 {
                expr.push_str(&format!(" - {var}"));
            } else if a > 0.0 {
                expr.push_str(&format!(" + {a}*{var}"));
            } else {
                expr.push_str(&format!(" - {}*{var}", -a));
            }
        }
        let c = -wall.offset;
        if c > 0.0 {
            expr.push_str(&format!(" + {c}"));
        } else if c < 0.0 {
            expr.push_str(&format!(" - {}", -c));
        }
        out.push_str(&format!("{expr} - r = 0\n"));
    }
    Ok(out)
}
