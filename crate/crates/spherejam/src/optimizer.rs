//! Local maximization of the maximal radius function: least-squares ascent
//! direction over the active gradients, bracketing line search, saddle
//! perturbation and adaptive active-set tolerance.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::container::{Configuration, ConstraintSet};
use crate::envelope::{self, ActiveJacobian, ActiveSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct OptimizerParams {
    /// Initial active-set tolerance.
    pub epsilon0: f64,
    /// Cap for the adaptive tolerance.
    pub epsilon_max: f64,
    /// Terminate when the least-squares residual reaches this fraction of
    /// the active row count.
    pub residual_threshold: f64,
    pub max_iterations: usize,
    pub bracket_width_tol: f64,
    /// Consecutive negligible steps before stopping.
    pub stall_limit: usize,
    pub perturb_sigma: f64,
    pub rng_seed: u64,
}

impl Default for OptimizerParams {
    fn default() -> Self {
        Self {
            epsilon0: 1e-7,
            epsilon_max: 1e-3,
            residual_threshold: 0.8,
            max_iterations: 200,
            bracket_width_tol: 1e-12,
            stall_limit: 3,
            perturb_sigma: 1e-3,
            rng_seed: 0,
        }
    }
}

impl OptimizerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon0 > 0.0 && self.epsilon0 <= self.epsilon_max) {
            return Err(Error::InvalidArgument("need 0 < epsilon0 <= epsilon_max".into()));
        }
        if !(self.residual_threshold > 0.0 && self.residual_threshold <= 1.0) {
            return Err(Error::InvalidArgument("residual_threshold must be in (0,1]".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if self.perturb_sigma <= 0.0 {
            return Err(Error::InvalidArgument("perturb_sigma must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    Step,
    Perturb,
    EpsilonIncrease,
    Terminate(TerminationReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    Residual,
    Stall,
    MaxIterations,
    PerturbExhausted,
}

impl TerminationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminationReason::Residual => "residual",
            TerminationReason::Stall => "stall",
            TerminationReason::MaxIterations => "max-iterations",
            TerminationReason::PerturbExhausted => "perturb-exhausted",
        }
    }
}

impl TraceEvent {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceEvent::Step => "step",
            TraceEvent::Perturb => "perturb",
            TraceEvent::EpsilonIncrease => "epsilon-increase",
            TraceEvent::Terminate(r) => r.as_str(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceRow {
    pub iter: usize,
    pub g_value: f64,
    pub active_count: usize,
    pub residual_sq: f64,
    pub step: f64,
    pub event: TraceEvent,
}

pub type IterationTrace = Vec<TraceRow>;

#[derive(Debug, Clone)]
pub struct LocalMaximumRecord {
    pub configuration: Configuration,
    pub radius: f64,
    pub active: ActiveSet,
    pub trace: IterationTrace,
    pub terminated_by: TerminationReason,
    pub refined: bool,
}

/// Minimum-norm solution of `argmin |J xi - 1|^2` together with the optimal
/// squared residual.
pub fn ascent_direction(jac: &ActiveJacobian) -> Result<(Vec<f64>, f64)> {
    let m = jac.rows.len();
    assert!(m > 0, "empty active set");
    let a = DMatrix::from_fn(m, jac.dof, |i, j| jac.rows[i][j]);
    let ones = DVector::from_element(m, 1.0);
    let svd = a
        .clone()
        .try_svd(true, true, 1e-14, 1000)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let xi = svd
        .solve(&ones, 1e-10)
        .map_err(|e| Error::NumericalFailure(e.to_string()))?;
    let resid = &a * &xi - ones;
    Ok((xi.iter().copied().collect(), resid.norm_squared()))
}

#[derive(Debug, Clone)]
pub enum LineSearchOutcome {
    /// A directional maximum was bracketed; `t2` is the accepted step.
    Step { t2: f64, bracket: (f64, f64, f64) },
    /// The function strictly decreases at machine-precision step length.
    SaddleDetected,
}

fn at(x: &Configuration, xi: &[f64], t: f64) -> Configuration {
    let coords: Vec<f64> = x
        .coords()
        .iter()
        .zip(xi)
        .map(|(c, v)| c + t * v)
        .collect();
    Configuration::new(x.n(), x.d(), coords).expect("finite step")
}

fn extent(x: &Configuration) -> f64 {
    let d = x.d();
    let mut sum = 0.0;
    for k in 0..d {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..x.n() {
            let c = x.point(i)[k];
            lo = lo.min(c);
            hi = hi.max(c);
        }
        sum += (hi - lo) * (hi - lo);
    }
    sum.sqrt()
}

/// Bracketing line search along a unit direction. Starts at machine
/// precision, expands by doubling, contracts by golden section.
pub fn line_search(
    cs: &ConstraintSet,
    x: &Configuration,
    xi: &[f64],
    params: &OptimizerParams,
) -> Result<LineSearchOutcome> {
    let g0 = envelope::g_value(cs, x);
    let t_machine = 2.0_f64.powi(-52);
    let g_machine = envelope::g_value(cs, &at(x, xi, t_machine));
    if g_machine < g0 {
        // A machine-length step can lose an ulp to rounding even along a
        // true ascent; confirm the decrease at a step that is still tiny
        // but large enough to rise above rounding noise.
        let g_confirm = envelope::g_value(cs, &at(x, xi, 2.0_f64.powi(-36)));
        if g_confirm < g0 {
            return Ok(LineSearchOutcome::SaddleDetected);
        }
    }

    let t_limit_extent = 10.0 * cs.container().diameter();
    let mut best = (t_machine, g_machine.max(g0));

    // Expansion by doubling until the function visibly drops. While the
    // increments per doubling are below one ulp the values wobble by
    // rounding, so only a decrease beyond a few ulps ends the expansion.
    let noise = |g: f64| 4.0 * f64::EPSILON * g.abs().max(1.0);
    let mut t_prev2 = 0.0;
    let mut t_prev = t_machine;
    let mut g_prev = g_machine;
    let mut t = 2.0 * t_machine;
    let (a, c) = loop {
        let xt = at(x, xi, t);
        let g = envelope::g_value(cs, &xt);
        if g >= best.1 {
            best = (t, g);
        }
        if g < g_prev - noise(g_prev) {
            break (t_prev2, t);
        }
        if extent(&xt) > t_limit_extent {
            return Err(Error::NoBracket);
        }
        t_prev2 = t_prev;
        t_prev = t;
        g_prev = g;
        t *= 2.0;
    };

    // Golden-section contraction of the bracket (a, c).
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut a = a;
    let mut c = c;
    let mut x1 = c - phi * (c - a);
    let mut x2 = a + phi * (c - a);
    let mut f1 = envelope::g_value(cs, &at(x, xi, x1));
    let mut f2 = envelope::g_value(cs, &at(x, xi, x2));
    while c - a > params.bracket_width_tol {
        if f1 > best.1 {
            best = (x1, f1);
        }
        if f2 > best.1 {
            best = (x2, f2);
        }
        if f1 > f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - phi * (c - a);
            f1 = envelope::g_value(cs, &at(x, xi, x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (c - a);
            f2 = envelope::g_value(cs, &at(x, xi, x2));
        }
    }
    let t2 = best.0;
    Ok(LineSearchOutcome::Step {
        t2,
        bracket: (a, t2.clamp(a, c), c),
    })
}

/// Adds independent zero-mean normal noise to every coordinate.
pub fn perturb(x: &Configuration, sigma: f64, rng: &mut ChaCha8Rng) -> Configuration {
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    let coords: Vec<f64> = x.coords().iter().map(|c| c + normal.sample(rng)).collect();
    Configuration::new(x.n(), x.d(), coords).expect("finite perturbation")
}

/// Runs one local maximization from `x0` and returns the best iterate found.
pub fn maximize(cs: &ConstraintSet, x0: &Configuration, params: &OptimizerParams) -> Result<LocalMaximumRecord> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut x = x0.clone();
    let mut epsilon = params.epsilon0;
    let mut trace: IterationTrace = Vec::new();
    let mut stall = 0usize;
    let mut perturb_failures = 0usize;
    let mut best: Option<(Configuration, f64)> = None;
    let mut reason = TerminationReason::MaxIterations;

    for iter in 0..params.max_iterations {
        let active = envelope::active_set(cs, &x, epsilon);
        let g = active.g_value;
        if best.as_ref().map_or(true, |(_, bg)| g > *bg) {
            best = Some((x.clone(), g));
        }

        let jac = match envelope::active_jacobian(cs, &x, &active) {
            Ok(j) => j,
            Err(Error::DegeneratePair { .. }) => {
                // Coincident centers: direction undefined, shake and retry.
                x = perturb(&x, params.perturb_sigma, &mut rng);
                perturb_failures += 1;
                trace.push(TraceRow {
                    iter,
                    g_value: envelope::g_value(cs, &x),
                    active_count: active.len(),
                    residual_sq: f64::NAN,
                    step: 0.0,
                    event: TraceEvent::Perturb,
                });
                if perturb_failures >= 5 {
                    reason = TerminationReason::PerturbExhausted;
                    break;
                }
                continue;
            }
            Err(e) => return Err(e),
        };

        let (xi, residual_sq) = match ascent_direction(&jac) {
            Ok(v) => v,
            Err(Error::NumericalFailure(_)) => {
                x = perturb(&x, params.perturb_sigma, &mut rng);
                perturb_failures += 1;
                trace.push(TraceRow {
                    iter,
                    g_value: envelope::g_value(cs, &x),
                    active_count: active.len(),
                    residual_sq: f64::NAN,
                    step: 0.0,
                    event: TraceEvent::Perturb,
                });
                if perturb_failures >= 5 {
                    reason = TerminationReason::PerturbExhausted;
                    break;
                }
                continue;
            }
            Err(e) => return Err(e),
        };

        if residual_sq >= params.residual_threshold * active.len() as f64 {
            trace.push(TraceRow {
                iter,
                g_value: g,
                active_count: active.len(),
                residual_sq,
                step: 0.0,
                event: TraceEvent::Terminate(TerminationReason::Residual),
            });
            reason = TerminationReason::Residual;
            break;
        }

        let xi_norm: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if xi_norm < 1e-14 {
            // Residual below threshold yet no direction: treat as a saddle.
            x = perturb(&x, params.perturb_sigma, &mut rng);
            perturb_failures += 1;
            trace.push(TraceRow {
                iter,
                g_value: envelope::g_value(cs, &x),
                active_count: active.len(),
                residual_sq,
                step: 0.0,
                event: TraceEvent::Perturb,
            });
            if perturb_failures >= 5 {
                reason = TerminationReason::PerturbExhausted;
                break;
            }
            continue;
        }
        let xi_unit: Vec<f64> = xi.iter().map(|v| v / xi_norm).collect();

        match line_search(cs, &x, &xi_unit, params) {
            Ok(LineSearchOutcome::Step { t2, .. }) => {
                perturb_failures = 0;
                let next = at(&x, &xi_unit, t2);
                let next_g = envelope::g_value(cs, &next);
                if next_g >= g {
                    x = next;
                }
                let new_active = envelope::active_set(cs, &x, epsilon);
                let lost = new_active.len() < active.len();
                trace.push(TraceRow {
                    iter,
                    g_value: envelope::g_value(cs, &x),
                    active_count: new_active.len(),
                    residual_sq,
                    step: t2,
                    event: TraceEvent::Step,
                });
                if lost && epsilon < params.epsilon_max {
                    epsilon = (epsilon * 10.0).min(params.epsilon_max);
                    trace.push(TraceRow {
                        iter,
                        g_value: envelope::g_value(cs, &x),
                        active_count: new_active.len(),
                        residual_sq,
                        step: 0.0,
                        event: TraceEvent::EpsilonIncrease,
                    });
                } else if !lost {
                    epsilon = params.epsilon0;
                }
                if t2 < params.bracket_width_tol {
                    stall += 1;
                    if stall >= params.stall_limit {
                        reason = TerminationReason::Stall;
                        break;
                    }
                } else {
                    stall = 0;
                }
            }
            Ok(LineSearchOutcome::SaddleDetected) | Err(Error::NoBracket) => {
                x = perturb(&x, params.perturb_sigma, &mut rng);
                perturb_failures += 1;
                trace.push(TraceRow {
                    iter,
                    g_value: envelope::g_value(cs, &x),
                    active_count: active.len(),
                    residual_sq,
                    step: 0.0,
                    event: TraceEvent::Perturb,
                });
                if perturb_failures >= 5 {
                    reason = TerminationReason::PerturbExhausted;
                    break;
                }
            }
            Err(e) => return Err(e),
        }
    }

    let (bx, bg) = best.expect("at least one iterate");
    // The best iterate may beat the final one; report the best.
    let final_active = envelope::active_set(cs, &bx, params.epsilon0);
    if let Some(last) = trace.last() {
        if !matches!(last.event, TraceEvent::Terminate(_)) {
            trace.push(TraceRow {
                iter: trace.len(),
                g_value: bg,
                active_count: final_active.len(),
                residual_sq: f64::NAN,
                step: 0.0,
                event: TraceEvent::Terminate(reason),
            });
        }
    }
    Ok(LocalMaximumRecord {
        configuration: bx,
        radius: bg,
        active: final_active,
        trace,
        terminated_by: reason,
        refined: false,
    })
}

/// Distance from the origin to the convex hull of the rows of `jac`,
/// computed with Wolfe's minimum-norm-point algorithm. At a maximum of the
/// envelope this distance vanishes (zero lies in the subdifferential).
pub fn hull_distance_to_origin(jac: &ActiveJacobian) -> f64 {
    let pts = &jac.rows;
    let m = pts.len();
    assert!(m > 0);
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(u, v)| u * v).sum() };

    // Start from the smallest-norm point.
    let mut start = 0;
    for i in 1..m {
        if dot(&pts[i], &pts[i]) < dot(&pts[start], &pts[start]) {
            start = i;
        }
    }
    let mut corral: Vec<usize> = vec![start];
    let mut weights: Vec<f64> = vec![1.0];
    let combo = |corral: &[usize], w: &[f64]| -> Vec<f64> {
        let mut p = vec![0.0; jac.dof];
        for (&i, &wi) in corral.iter().zip(w) {
            for (pk, &vk) in p.iter_mut().zip(&pts[i]) {
                *pk += wi * vk;
            }
        }
        p
    };

    for _ in 0..1000 {
        let p = combo(&corral, &weights);
        let pp = dot(&p, &p);
        // Most violating vertex.
        let mut j = 0;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let s = dot(&p, &pts[i]);
            if s < best {
                best = s;
                j = i;
            }
        }
        if pp - best <= 1e-14 * (1.0 + pp) || corral.contains(&j) {
            return pp.max(0.0).sqrt();
        }
        corral.push(j);
        weights.push(0.0);

        // Minor cycles: affine minimizer over the corral, trimmed back to
        // the simplex when a weight goes nonpositive.
        loop {
            let k = corral.len();
            let mut mat = DMatrix::zeros(k + 1, k + 1);
            for a in 0..k {
                for b in 0..k {
                    mat[(a, b)] = dot(&pts[corral[a]], &pts[corral[b]]);
                }
                mat[(a, k)] = 1.0;
                mat[(k, a)] = 1.0;
            }
            let mut rhs = DVector::zeros(k + 1);
            rhs[k] = 1.0;
            let alpha = match mat.lu().solve(&rhs) {
                Some(sol) => sol.rows(0, k).iter().copied().collect::<Vec<f64>>(),
                None => {
                    // Degenerate corral; drop the newest point and finish.
                    corral.pop();
                    weights.pop();
                    let p = combo(&corral, &weights);
                    return dot(&p, &p).max(0.0).sqrt();
                }
            };
            if alpha.iter().all(|&a| a > 1e-12) {
                weights = alpha;
                break;
            }
            let mut theta = 1.0_f64;
            for (wi, &ai) in weights.iter().zip(&alpha) {
                if ai <= 1e-12 && (wi - ai).abs() > 1e-300 {
                    theta = theta.min(wi / (wi - ai));
                }
            }
            for (wi, &ai) in weights.iter_mut().zip(&alpha) {
                *wi = (1.0 - theta) * *wi + theta * ai;
            }
            let keep: Vec<usize> = (0..corral.len()).filter(|&i| weights[i] > 1e-12).collect();
            if keep.len() == corral.len() {
                // Numerical stand-off; accept current weights.
                let total: f64 = weights.iter().sum();
                for w in &mut weights {
                    *w /= total;
                }
                break;
            }
            corral = keep.iter().map(|&i| corral[i]).collect();
            weights = keep.iter().map(|&i| weights[i]).collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
        }
    }
    let p = combo(&corral, &weights);
    dot(&p, &p).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{active_jacobian, active_set};

    fn config(n: usize, d: usize, coords: &[f64]) -> Configuration {
        Configuration::new(n, d, coords.to_vec()).unwrap()
    }

    #[test]
    fn ascent_single_row() {
        let jac = ActiveJacobian {
            rows: vec![vec![1.0, 0.0]],
            dof: 2,
        };
        let (xi, r) = ascent_direction(&jac).unwrap();
        assert!((xi[0] - 1.0).abs() < 1e-12 && xi[1].abs() < 1e-12);
        assert!(r < 1e-20);
    }

    #[test]
    fn ascent_opposing_rows() {
        let jac = ActiveJacobian {
            rows: vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
            dof: 2,
        };
        let (xi, r) = ascent_direction(&jac).unwrap();
        assert!(xi[0].abs() < 1e-12 && xi[1].abs() < 1e-12);
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn grid_residual_certifies_termination() {
        let cs = ConstraintSet::cube(4, 2).unwrap();
        let x = config(4, 2, &[0.25, 0.25, 0.25, 0.75, 0.75, 0.25, 0.75, 0.75]);
        let a = active_set(&cs, &x, 1e-9);
        assert_eq!(a.len(), 12);
        let jac = active_jacobian(&cs, &x, &a).unwrap();
        let (_, r) = ascent_direction(&jac).unwrap();
        assert!(r >= 0.8 * 12.0, "residual_sq = {r}");
    }

    #[test]
    fn line_search_affine_crossing() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let x = config(2, 2, &[0.3, 0.5, 0.7, 0.5]);
        let s = 1.0 / 2.0_f64.sqrt();
        let xi = vec![-s, 0.0, s, 0.0];
        let params = OptimizerParams::default();
        match line_search(&cs, &x, &xi, &params).unwrap() {
            LineSearchOutcome::Step { t2, bracket } => {
                let expected = 0.05 * 2.0_f64.sqrt();
                assert!((t2 - expected).abs() < 1e-9, "t2 = {t2}");
                let g = envelope::g_value(&cs, &at(&x, &xi, t2));
                assert!((g - 0.25).abs() < 1e-9);
                assert!(bracket.0 <= bracket.1 && bracket.1 <= bracket.2);
            }
            LineSearchOutcome::SaddleDetected => panic!("unexpected saddle"),
        }
    }

    #[test]
    fn line_search_saddle_at_maximum() {
        // Exact two-disk diagonal maximum.
        let r = (2.0 - 2.0_f64.sqrt()) / 2.0;
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let x = config(2, 2, &[r, r, 1.0 - r, 1.0 - r]);
        let params = OptimizerParams::default();
        // Any direction must fail to improve beyond bracket tolerance.
        let dirs = [
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0, 0.0],
            vec![0.5, 0.5, -0.5, -0.5],
        ];
        for d in dirs {
            let norm: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            let u: Vec<f64> = d.iter().map(|v| v / norm).collect();
            match line_search(&cs, &x, &u, &params).unwrap() {
                LineSearchOutcome::SaddleDetected => {}
                LineSearchOutcome::Step { t2, .. } => {
                    let g = envelope::g_value(&cs, &at(&x, &u, t2));
                    assert!(g <= envelope::g_value(&cs, &x) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn perturb_is_reproducible() {
        let x = config(2, 2, &[0.0, 0.0, 0.0, 0.0]);
        let mut rng1 = ChaCha8Rng::seed_from_u64(42);
        let mut rng2 = ChaCha8Rng::seed_from_u64(42);
        let a = perturb(&x, 1e-3, &mut rng1);
        let b = perturb(&x, 1e-3, &mut rng2);
        assert_eq!(a.coords(), b.coords());
        assert!(a.coords().iter().any(|&c| c != 0.0));
    }

    #[test]
    fn perturb_statistics() {
        let x = Configuration::new(2, 2, vec![0.0; 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sigma = 1e-3;
        let mut samples = Vec::with_capacity(100_000);
        for _ in 0..25_000 {
            let p = perturb(&x, sigma, &mut rng);
            samples.extend_from_slice(p.coords());
        }
        let mean: f64 = samples.iter().sum::<f64>() / samples.len() as f64;
        let var: f64 =
            samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / samples.len() as f64;
        let std = var.sqrt();
        assert!((std - sigma).abs() / sigma < 0.05, "std = {std}");
    }

    #[test]
    fn two_disk_maximize() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let x0 = config(2, 2, &[0.3, 0.4, 0.6, 0.7]);
        let rec = maximize(&cs, &x0, &OptimizerParams::default()).unwrap();
        let expected = (2.0 - 2.0_f64.sqrt()) / 2.0;
        assert!(
            (rec.radius - expected).abs() < 1e-8,
            "radius = {}, expected {expected}",
            rec.radius
        );
        assert!((rec.radius - envelope::g_value(&cs, &rec.configuration)).abs() < 1e-14);
    }

    #[test]
    fn maximize_is_deterministic() {
        let cs = ConstraintSet::cube(3, 2).unwrap();
        let x0 = config(3, 2, &[0.2, 0.3, 0.8, 0.4, 0.5, 0.9]);
        let params = OptimizerParams {
            rng_seed: 9,
            ..OptimizerParams::default()
        };
        let a = maximize(&cs, &x0, &params).unwrap();
        let b = maximize(&cs, &x0, &params).unwrap();
        assert_eq!(a.configuration.coords(), b.configuration.coords());
        assert_eq!(a.trace.len(), b.trace.len());
    }

    #[test]
    fn trace_steps_do_not_decrease() {
        let cs = ConstraintSet::cube(3, 2).unwrap();
        let x0 = config(3, 2, &[0.1, 0.2, 0.9, 0.3, 0.4, 0.8]);
        let rec = maximize(&cs, &x0, &OptimizerParams::default()).unwrap();
        let mut last_step_g: Option<f64> = None;
        for row in &rec.trace {
            match row.event {
                TraceEvent::Step => {
                    if let Some(prev) = last_step_g {
                        assert!(row.g_value >= prev - 1e-12);
                    }
                    last_step_g = Some(row.g_value);
                }
                TraceEvent::Perturb => last_step_g = None,
                _ => {}
            }
        }
    }

    #[test]
    fn hull_distance_simple_cases() {
        // Hull of (1,0) and (-1,0) contains the origin.
        let jac = ActiveJacobian {
            rows: vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
            dof: 2,
        };
        assert!(hull_distance_to_origin(&jac) < 1e-7);

        // Hull of (1,0) and (0,1): closest point (0.5, 0.5).
        let jac = ActiveJacobian {
            rows: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            dof: 2,
        };
        let d = hull_distance_to_origin(&jac);
        assert!((d - 0.5_f64.sqrt()).abs() < 1e-7, "d = {d}");
    }

    #[test]
    fn residual_certificate_at_two_disk_maximum() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let x0 = config(2, 2, &[0.3, 0.4, 0.6, 0.7]);
        let rec = maximize(&cs, &x0, &OptimizerParams::default()).unwrap();
        let a = active_set(&cs, &rec.configuration, 1e-6);
        let jac = active_jacobian(&cs, &rec.configuration, &a).unwrap();
        assert!(hull_distance_to_origin(&jac) < 1e-6);
    }
}
