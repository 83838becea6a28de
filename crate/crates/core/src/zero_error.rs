//! Zero-error communication bounds from exclusion measurements.
//!
//! A zero-error exclusion POVM for an orbit turns the orbit into a
//! one-shot communication resource: outcome `g` never occurs on input
//! `g`, so receiving `g` conclusively eliminates one message. The
//! confusability structure `Gamma[g][h] = (tr[M_g rho_h] > threshold)`
//! records which inputs can still trigger each outcome; its fractional
//! packing number `alpha* = max sum w_h` subject to
//! `sum_{h : Gamma[g][h]} w_h <= 1` for every outcome `g` lower-bounds
//! the zero-error transmissible information at `log2(alpha*)` bits.
//! Because the diagonal is empty, the uniform weights `1/(|G|-1)` are
//! always feasible, so the bound is never below `log2(|G|/(|G|-1))`.

use crate::exclusion::{ExclusionError, ExclusionInstance, Povm};
use crate::linalg::{inner, outer, CMatrix};
use thiserror::Error;

/// Default probability threshold above which an input counts as
/// triggering an outcome.
pub const CONFUSABILITY_THRESHOLD: f64 = 1e-10;
/// Required agreement between the packing LP value and its dual cover.
pub const DUALITY_GAP_TOL: f64 = 1e-9;
/// Slack accepted when checking the `log2(|G|/(|G|-1))` floor.
pub const BOUND_FLOOR_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const SIMPLEX_ITERATION_CAP: usize = 10_000;

#[derive(Debug, Error)]
pub enum ZeroErrorError {
    #[error("outcome {label} fires on its own input with probability {probability:.3e} (threshold {threshold:.3e}): the measurement is not zero-error")]
    DiagonalNotExcluded { label: String, probability: f64, threshold: f64 },
    #[error("confusability graphs need an explicit finite-group instance")]
    ExplicitOnly,
    #[error("graph has {got} vertices, POVM has {expected} outcomes")]
    SizeMismatch { got: usize, expected: usize },
    #[error("capacity bound needs a group of order >= 2, got {order}")]
    GroupTooSmall { order: usize },
    #[error("packing value {value:.12e} falls below the guaranteed floor {floor:.12e}")]
    BoundViolation { value: f64, floor: f64 },
    #[error("simplex failed: {detail}")]
    PackingNumerics { detail: String },
    #[error(transparent)]
    Exclusion(#[from] ExclusionError),
}

/// Which inputs can trigger which outcomes, at a recorded threshold.
/// `adjacency[g][h]` is row-indexed by outcome, column-indexed by input;
/// the diagonal is empty by construction.
#[derive(Debug, Clone)]
pub struct ConfusabilityGraph {
    pub labels: Vec<String>,
    pub adjacency: Vec<Vec<bool>>,
    pub threshold: f64,
}

impl ConfusabilityGraph {
    /// Validated constructor for externally supplied graphs: square, with
    /// an empty diagonal.
    pub fn new(labels: Vec<String>, adjacency: Vec<Vec<bool>>, threshold: f64) -> Result<Self, ZeroErrorError> {
        let n = labels.len();
        if adjacency.len() != n || adjacency.iter().any(|row| row.len() != n) {
            return Err(ZeroErrorError::SizeMismatch { got: adjacency.len(), expected: n });
        }
        for (g, row) in adjacency.iter().enumerate() {
            if row[g] {
                return Err(ZeroErrorError::DiagonalNotExcluded {
                    label: labels[g].clone(),
                    probability: 1.0,
                    threshold,
                });
            }
        }
        Ok(ConfusabilityGraph { labels, adjacency, threshold })
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    /// Deterministic CSV rendering: header row of input labels, then one
    /// row per outcome with 0/1 entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("outcome");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (g, row) in self.adjacency.iter().enumerate() {
            out.push_str(&self.labels[g]);
            for &bit in row {
                out.push_str(if bit { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the confusability structure of a zero-error POVM on an explicit
/// orbit. Fails with [`ZeroErrorError::DiagonalNotExcluded`] if any
/// outcome fires on its own input above the threshold.
pub fn build_graph(
    instance: &ExclusionInstance,
    povm: &Povm,
    threshold: f64,
) -> Result<ConfusabilityGraph, ZeroErrorError> {
    let group = instance.group().ok_or(ZeroErrorError::ExplicitOnly)?;
    let n = group.order();
    if povm.outcomes.len() != n {
        return Err(ZeroErrorError::SizeMismatch { got: povm.outcomes.len(), expected: n });
    }
    let states: Vec<_> = (0..n).map(|h| instance.orbit_state(h)).collect::<Result<_, _>>()?;
    let mut adjacency = vec![vec![false; n]; n];
    let mut labels = Vec::with_capacity(n);
    for (g, (label, effect)) in povm.outcomes.iter().enumerate() {
        labels.push(label.clone());
        for (h, state) in states.iter().enumerate() {
            let p = inner(state, &effect.mul(state)).re;
            if h == g {
                if p > threshold {
                    return Err(ZeroErrorError::DiagonalNotExcluded {
                        label: label.clone(),
                        probability: p,
                        threshold,
                    });
                }
            } else if p > threshold {
                adjacency[g][h] = true;
            }
        }
    }
    Ok(ConfusabilityGraph { labels, adjacency, threshold })
}

/// The uniform complement measurement `M_g = (I - |u_g><u_g|)/(|G| - 1)`.
///
/// Every outcome annihilates its own input and fires with equal weight on
/// every other, so the confusability structure is complete-minus-matching
/// and its packing number sits exactly at the generic floor
/// `|G|/(|G|-1)`. Completeness requires the orbit to resolve the
/// identity, which holds exactly for uniform-amplitude orbits (the orbit
/// is then an orthonormal basis). By contrast, the covariant rank-one
/// construction concentrates each outcome on a single input for such
/// orbits, giving the (larger) packing number `|G|`.
pub fn complement_povm(instance: &ExclusionInstance) -> Result<Povm, ZeroErrorError> {
    let group = instance.group().ok_or(ZeroErrorError::ExplicitOnly)?;
    let n = group.order();
    if n < 2 {
        return Err(ZeroErrorError::GroupTooSmall { order: n });
    }
    let dim = instance.dim();
    let scale = 1.0 / (n as f64 - 1.0);
    let mut outcomes = Vec::with_capacity(n);
    let mut sum = CMatrix::zeros(dim, dim);
    for g in 0..n {
        let u = instance.orbit_state(g)?;
        let effect = CMatrix::identity(dim).sub(&outer(&u, &u)).scaled(crate::linalg::c(scale, 0.0));
        sum = sum.add(&effect);
        outcomes.push((format!("g{g}"), effect));
    }
    let completeness_defect = sum.sub(&CMatrix::identity(dim)).frobenius_norm();
    if completeness_defect > crate::exclusion::COMPLETENESS_TOL {
        return Err(ZeroErrorError::Exclusion(ExclusionError::CompletenessDefect {
            defect: completeness_defect,
        }));
    }
    let mut min_effect_eigenvalue = f64::INFINITY;
    for (_, effect) in &outcomes {
        let eigs = crate::linalg::hermitian_eigenvalues(effect, 1e-9).map_err(ExclusionError::from)?;
        min_effect_eigenvalue = min_effect_eigenvalue.min(eigs[0]);
    }
    Ok(Povm { outcomes, completeness_defect, min_effect_eigenvalue })
}

/// Solution of the fractional packing LP.
#[derive(Debug, Clone)]
pub struct PackingSolution {
    /// `alpha*`: the LP optimum.
    pub value: f64,
    /// Optimal input weights, in label order.
    pub weights: Vec<f64>,
    /// Dual prices of the outcome constraints (a fractional cover).
    pub dual_prices: Vec<f64>,
    /// Inputs that trigger no outcome at the recorded threshold; their
    /// weight is capped at 1 to keep the LP bounded, and the cap is
    /// reported here because the uncapped LP would be unbounded.
    pub capped_inputs: Vec<String>,
    /// |primal - dual| from the final tableau.
    pub duality_gap: f64,
}

/// Maximizes `sum_h w_h` subject to `sum_{h: Gamma[g][h]} w_h <= 1` per
/// outcome and `w >= 0`, by dense simplex with Bland's rule. Inputs whose
/// adjacency column is empty are capped at weight 1 (see
/// [`PackingSolution::capped_inputs`]). The returned dual prices are
/// verified to be a feasible cover with duality gap below
/// [`DUALITY_GAP_TOL`].
pub fn fractional_packing(graph: &ConfusabilityGraph) -> Result<PackingSolution, ZeroErrorError> {
    let n = graph.order();
    if n == 0 {
        return Err(ZeroErrorError::GroupTooSmall { order: 0 });
    }
    let mut capped_inputs = Vec::new();
    let mut cap_rows: Vec<Vec<f64>> = Vec::new();
    for h in 0..n {
        if (0..n).all(|g| !graph.adjacency[g][h]) {
            capped_inputs.push(graph.labels[h].clone());
            let mut row = vec![0.0; n];
            row[h] = 1.0;
            cap_rows.push(row);
        }
    }
    let mut rows: Vec<Vec<f64>> = graph
        .adjacency
        .iter()
        .map(|row| row.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
        .collect();
    let outcome_rows = rows.len();
    rows.extend(cap_rows);
    let m = rows.len();

    // Tableau over n structural variables and m slacks; basis starts as
    // the slacks, which is feasible because every right-hand side is 1.
    let total = n + m;
    let mut tableau: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        let mut t = vec![0.0; total + 1];
        t[..n].copy_from_slice(row);
        t[n + i] = 1.0;
        t[total] = 1.0;
        tableau.push(t);
    }
    // Objective row holds z_j - c_j; structural variables have c_j = 1.
    let mut objective = vec![0.0f64; total + 1];
    for j in 0..n {
        objective[j] = -1.0;
    }
    let mut basis: Vec<usize> = (n..total).collect();

    let mut iterations = 0;
    loop {
        // Bland's rule: smallest-index column with negative reduced cost.
        let entering = (0..total).find(|&j| objective[j] < -PIVOT_TOL);
        let Some(entering) = entering else { break };
        let mut leaving: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let coeff = tableau[i][entering];
            if coeff > PIVOT_TOL {
                let ratio = tableau[i][total] / coeff;
                let better = ratio < best_ratio - 1e-15
                    || (ratio < best_ratio + 1e-15 && leaving.is_some_and(|l| basis[i] < basis[l]));
                if leaving.is_none() || better {
                    best_ratio = ratio;
                    leaving = Some(i);
                }
            }
        }
        let Some(leaving) = leaving else {
            return Err(ZeroErrorError::PackingNumerics {
                detail: format!("unbounded direction on column {entering}"),
            });
        };
        let pivot = tableau[leaving][entering];
        for v in tableau[leaving].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = tableau[leaving].clone();
        for (i, row) in tableau.iter_mut().enumerate() {
            if i != leaving && row[entering].abs() > 0.0 {
                let factor = row[entering];
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
            }
        }
        let factor = objective[entering];
        if factor.abs() > 0.0 {
            for (v, p) in objective.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
        }
        basis[leaving] = entering;
        iterations += 1;
        if iterations > SIMPLEX_ITERATION_CAP {
            return Err(ZeroErrorError::PackingNumerics { detail: "iteration cap exceeded".to_string() });
        }
    }

    let mut weights = vec![0.0f64; n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            weights[var] = tableau[i][total];
        }
    }
    let value = objective[total];
    // Dual prices are the reduced costs over the slack columns.
    let duals: Vec<f64> = (0..m).map(|i| objective[n + i]).collect();
    let dual_value: f64 = duals.iter().sum();
    let duality_gap = (value - dual_value).abs();
    // Honest certificate check: the duals must cover every input.
    for h in 0..n {
        let covered: f64 = (0..m).map(|i| duals[i] * rows[i][h]).sum();
        if covered < 1.0 - DUALITY_GAP_TOL {
            return Err(ZeroErrorError::PackingNumerics {
                detail: format!("dual prices fail to cover input {h}: {covered}"),
            });
        }
    }
    if duality_gap > DUALITY_GAP_TOL {
        return Err(ZeroErrorError::PackingNumerics { detail: format!("duality gap {duality_gap:.3e}") });
    }
    Ok(PackingSolution {
        value,
        weights,
        dual_prices: duals[..outcome_rows].to_vec(),
        capped_inputs,
        duality_gap,
    })
}

/// A zero-error transmissibility bound in bits.
#[derive(Debug, Clone)]
pub struct CapacityBound {
    /// `log2(alpha*)`.
    pub bits: f64,
    pub packing_value: f64,
    /// The guaranteed floor `log2(|G|/(|G|-1))` every zero-error
    /// measurement meets because the diagonal is excluded.
    pub floor_bits: f64,
    pub solution: PackingSolution,
}

/// Computes `log2` of the fractional packing number and checks it against
/// the guaranteed floor. Needs at least two vertices.
pub fn capacity_lower_bound(graph: &ConfusabilityGraph) -> Result<CapacityBound, ZeroErrorError> {
    let n = graph.order();
    if n < 2 {
        return Err(ZeroErrorError::GroupTooSmall { order: n });
    }
    let solution = fractional_packing(graph)?;
    let floor_value = n as f64 / (n as f64 - 1.0);
    let bits = solution.value.log2();
    let floor_bits = floor_value.log2();
    if bits < floor_bits - BOUND_FLOOR_TOL {
        return Err(ZeroErrorError::BoundViolation { value: solution.value, floor: floor_value });
    }
    Ok(CapacityBound { bits, packing_value: solution.value, floor_bits, solution })
}
