//! The maximal radius function: lower envelope of the constraint family,
//! active sets, the active-gradient matrix and the generalized directional
//! derivative.

use crate::container::{Configuration, ConstraintId, ConstraintSet};
use crate::error::Result;

/// Constraints within `epsilon` of the envelope value at a point, in
/// canonical order.
#[derive(Debug, Clone)]
pub struct ActiveSet {
    pub indices: Vec<ConstraintId>,
    pub values: Vec<f64>,
    pub epsilon: f64,
    pub g_value: f64,
}

impl ActiveSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Row-major matrix of active gradients; row order matches the active set.
#[derive(Debug, Clone)]
pub struct ActiveJacobian {
    pub rows: Vec<Vec<f64>>,
    pub dof: usize,
}

/// The largest common radius the configuration admits: the minimum of all
/// constraint functions. May be negative outside the container.
pub fn g_value(cs: &ConstraintSet, x: &Configuration) -> f64 {
    let mut min = f64::INFINITY;
    for &id in cs.ids() {
        let v = cs.evaluate(id, x);
        if v < min {
            min = v;
        }
    }
    min
}

pub fn is_admissible(cs: &ConstraintSet, x: &Configuration, r: f64) -> bool {
    g_value(cs, x) >= r
}

pub fn active_set(cs: &ConstraintSet, x: &Configuration, epsilon: f64) -> ActiveSet {
    let values: Vec<f64> = cs.ids().iter().map(|&id| cs.evaluate(id, x)).collect();
    let g = values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let mut indices = Vec::new();
    let mut active_values = Vec::new();
    for (&id, &v) in cs.ids().iter().zip(&values) {
        if v <= g + epsilon {
            indices.push(id);
            active_values.push(v);
        }
    }
    ActiveSet {
        indices,
        values: active_values,
        epsilon,
        g_value: g,
    }
}

pub fn active_jacobian(cs: &ConstraintSet, x: &Configuration, active: &ActiveSet) -> Result<ActiveJacobian> {
    let mut rows = Vec::with_capacity(active.len());
    for &id in &active.indices {
        rows.push(cs.gradient(id, x)?);
    }
    Ok(ActiveJacobian {
        rows,
        dof: cs.dof(),
    })
}

/// `min over active l of grad f_l . v`.
pub fn directional_derivative(
    cs: &ConstraintSet,
    x: &Configuration,
    active: &ActiveSet,
    v: &[f64],
) -> Result<f64> {
    let mut min = f64::INFINITY;
    let mut g = vec![0.0; cs.dof()];
    for &id in &active.indices {
        cs.gradient_into(id, x, &mut g)?;
        let dot: f64 = g.iter().zip(v).map(|(a, b)| a * b).sum();
        if dot < min {
            min = dot;
        }
    }
    Ok(min)
}
