//! Enumerates the interpolation conditions a spec implies and checks them
//! against a reduced model.

use rayon::prelude::*;

use super::spec::{InterpolationSpec, PointTuple, Side};
use crate::error::Result;
use crate::linalg::{spectral_norm, C64};
use crate::system::StructuredBilinearSystem;
use crate::transfer::eval_transfer_partial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConditionKind {
    /// Enforced by span(V) alone.
    V,
    /// Enforced by span(W) alone.
    W,
    /// Combination of a V tuple prefix and a W tuple suffix.
    Mixed,
    /// Gradient condition from identical V and W tuples.
    Jacobian,
}

impl ConditionKind {
    pub fn label(self) -> &'static str {
        match self {
            ConditionKind::V => "V",
            ConditionKind::W => "W",
            ConditionKind::Mixed => "mixed",
            ConditionKind::Jacobian => "jacobian",
        }
    }
}

/// `∂^{orders} G_k(points) = ∂^{orders} Ĝ_k(points)` with `k = points.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub kind: ConditionKind,
    pub points: Vec<C64>,
    pub orders: Vec<usize>,
}

impl Condition {
    pub fn level(&self) -> usize {
        self.points.len()
    }

    pub fn is_derivative(&self) -> bool {
        self.orders.iter().any(|&o| o > 0)
    }

    fn same_target(&self, other: &Condition) -> bool {
        self.points == other.points && self.orders == other.orders
    }
}

fn v_conditions(t: &PointTuple, out: &mut Vec<Condition>) {
    for q in 0..t.len() {
        for j in 0..=t.orders[q] {
            let mut orders = t.orders[..q].to_vec();
            orders.push(j);
            out.push(Condition { kind: ConditionKind::V, points: t.points[..=q].to_vec(), orders });
        }
    }
}

fn w_conditions(t: &PointTuple, out: &mut Vec<Condition>) {
    let theta = t.len();
    for eta in 1..=theta {
        let start = theta - eta;
        for i in 0..=t.orders[start] {
            let mut orders = vec![i];
            orders.extend_from_slice(&t.orders[start + 1..]);
            out.push(Condition { kind: ConditionKind::W, points: t.points[start..].to_vec(), orders });
        }
    }
}

fn mixed_conditions(v: &PointTuple, w: &PointTuple, out: &mut Vec<Condition>) {
    let theta = w.len();
    for q in 0..v.len() {
        for eta in 1..=theta {
            let start = theta - eta;
            for j in 0..=v.orders[q] {
                for i in 0..=w.orders[start] {
                    let mut points = v.points[..=q].to_vec();
                    points.extend_from_slice(&w.points[start..]);
                    let mut orders = v.orders[..q].to_vec();
                    orders.push(j);
                    orders.push(i);
                    orders.extend_from_slice(&w.orders[start + 1..]);
                    out.push(Condition { kind: ConditionKind::Mixed, points, orders });
                }
            }
        }
    }
}

fn jacobian_conditions(t: &PointTuple, out: &mut Vec<Condition>) {
    for i in 0..t.len() {
        let mut orders = t.orders.clone();
        orders[i] += 1;
        out.push(Condition { kind: ConditionKind::Jacobian, points: t.points.clone(), orders });
    }
}

/// Conditions implied by `spec`, in order: V, W, mixed, Jacobian. Exact
/// duplicates (same points and multi-index) are listed once.
///
/// With `W = V` only the V-side conditions are guaranteed. Without
/// derivatives a two-sided spec with one tuple per side yields
/// `k + θ + kθ` conditions.
pub fn implied_conditions(spec: &InterpolationSpec) -> Vec<Condition> {
    let vs = spec.v_tuple_list();
    let ws = spec.w_tuple_list();
    let mut all = Vec::new();
    for t in &vs {
        v_conditions(t, &mut all);
    }
    for t in &ws {
        w_conditions(t, &mut all);
    }
    if spec.side == Side::TwoSided {
        for v in &vs {
            for w in &ws {
                mixed_conditions(v, w, &mut all);
            }
        }
        for v in &vs {
            if ws.iter().any(|w| w == v) {
                jacobian_conditions(v, &mut all);
            }
        }
    }
    let mut out: Vec<Condition> = Vec::with_capacity(all.len());
    for c in all {
        if !out.iter().any(|o| o.same_target(&c)) {
            out.push(c);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionCheck {
    pub condition: Condition,
    /// `‖∂G‖_2` of the full model.
    pub reference_norm: f64,
    /// `‖∂G − ∂Ĝ‖_2 / ‖∂G‖_2` (absolute error if the reference vanishes).
    pub rel_error: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Evaluates every condition on both models. Value conditions use `tol`,
/// derivative conditions (finite-difference oracle) use `deriv_tol`.
pub fn check_conditions(
    fom: &StructuredBilinearSystem,
    rom: &StructuredBilinearSystem,
    conditions: &[Condition],
    tol: f64,
    deriv_tol: f64,
) -> Result<Vec<ConditionCheck>> {
    conditions
        .par_iter()
        .map(|c| {
            let g = eval_transfer_partial(fom, &c.points, &c.orders)?;
            let gr = eval_transfer_partial(rom, &c.points, &c.orders)?;
            let reference_norm = spectral_norm(&g);
            let abs = spectral_norm(&(g - gr));
            let rel_error = if reference_norm > 0.0 { abs / reference_norm } else { abs };
            let tol = if c.is_derivative() { deriv_tol } else { tol };
            Ok(ConditionCheck {
                condition: c.clone(),
                reference_norm,
                rel_error,
                tol,
                passed: rel_error <= tol,
            })
        })
        .collect()
}
