//! Qubit, term, depth and measurement estimates for one QAOA cost function.
//!
//! Two-qubit cost gates commute, so a proper edge coloring of the coupling
//! graph gives a schedule with one layer per color.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{edge_color_reduced, EdgeColoring, Graph};
use crate::qubo::{CostPolynomial, QuboProblem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResourceError {
    #[error("ε must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("p must be at least 1")]
    NoLayers,
}

pub fn qubit_count(g: &Graph) -> usize {
    (g.node_count() + g.edge_count()).saturating_sub(2)
}

/// Nonzero single-Z and ZZ terms of the Ising form, and their sum.
pub fn term_counts(poly: &CostPolynomial) -> (usize, usize, usize) {
    let (z, zz) = poly.to_ising().pauli_term_counts();
    (z, zz, z + zz)
}

/// Search steps spent trying to drop Misra–Gries to `Δ(G_H)` colors.
pub const COLOR_REDUCTION_BUDGET: usize = 200_000;

/// Per-layer two-qubit depth: colors used on the coupling graph.
pub fn depth_estimate(poly: &CostPolynomial) -> (usize, EdgeColoring, Graph) {
    let gh = poly.quadratic_graph();
    let coloring = edge_color_reduced(&gh, COLOR_REDUCTION_BUDGET);
    (coloring.num_colors, coloring, gh)
}

/// `ceil(L / ε²)`, an order-of-magnitude proxy with unit constant.
pub fn n_repetitions(terms: usize, epsilon: f64) -> Result<u64, ResourceError> {
    if !(epsilon > 0.0) {
        return Err(ResourceError::BadEpsilon(epsilon));
    }
    Ok((terms as f64 / (epsilon * epsilon)).ceil() as u64)
}

/// Returns `(p · D1 · n_rep, p · |V| · Δ³ / ε²)`.
pub fn time_proxy(p: usize, d1: usize, n_rep: u64, g: &Graph, epsilon: f64) -> Result<(f64, f64), ResourceError> {
    if p == 0 {
        return Err(ResourceError::NoLayers);
    }
    if !(epsilon > 0.0) {
        return Err(ResourceError::BadEpsilon(epsilon));
    }
    let concrete = p as f64 * d1 as f64 * n_rep as f64;
    let delta = g.max_degree() as f64;
    let asymptotic = p as f64 * g.node_count() as f64 * delta.powi(3) / (epsilon * epsilon);
    Ok((concrete, asymptotic))
}

fn pairs(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResourceReport {
    pub n_qubits: usize,
    pub terms_linear: usize,
    pub terms_quadratic: usize,
    pub terms_total: usize,
    pub max_degree: usize,
    pub max_degree_coupling_graph: usize,
    pub depth_per_layer: usize,
    pub p: usize,
    pub two_qubit_layers: usize,
    pub epsilon: f64,
    pub n_repetitions: u64,
    pub time_concrete: f64,
    pub time_asymptotic: f64,
    /// Quadratic terms from the source and destination constraints.
    pub endpoint_correction: usize,
    /// `½|V|(2 + Δ + Δ²) + c` as stated for the routing encoding.
    pub term_bound_stated: f64,
    /// `½|V|(2 + 2Δ + Δ²)`, which also counts the second vertex-edge
    /// incidence of every edge.
    pub term_bound_corrected: f64,
    pub term_bound_stated_ok: bool,
    pub term_bound_corrected_ok: bool,
    pub coloring_proper: bool,
    /// `D1 ≤ Δ(G_H) + 1`.
    pub vizing_bound_ok: bool,
    /// `D1 ≤ 2Δ(G)`.
    pub twice_degree_bound_ok: bool,
}

/// Full report for `poly`, a cost function built on `q`.
pub fn estimate(q: &QuboProblem, poly: &CostPolynomial, p: usize, epsilon: f64) -> Result<ResourceReport, ResourceError> {
    let g = &q.graph;
    let (lin, quad, total) = term_counts(poly);
    let (d1, coloring, gh) = depth_estimate(poly);
    let n_rep = n_repetitions(total, epsilon)?;
    let (time_concrete, time_asymptotic) = time_proxy(p, d1, n_rep, g, epsilon)?;
    let v = g.node_count() as f64;
    let delta = g.max_degree();
    let dd = delta as f64;
    let c = pairs(g.degree(q.vmap.source)) + pairs(g.degree(q.vmap.destination));
    let stated = 0.5 * v * (2.0 + dd + dd * dd) + c as f64;
    let corrected = 0.5 * v * (2.0 + 2.0 * dd + dd * dd);
    Ok(ResourceReport {
        n_qubits: poly.n,
        terms_linear: lin,
        terms_quadratic: quad,
        terms_total: total,
        max_degree: delta,
        max_degree_coupling_graph: gh.max_degree(),
        depth_per_layer: d1,
        p,
        two_qubit_layers: p * d1,
        epsilon,
        n_repetitions: n_rep,
        time_concrete,
        time_asymptotic,
        endpoint_correction: c,
        term_bound_stated: stated,
        term_bound_corrected: corrected,
        term_bound_stated_ok: total as f64 <= stated,
        term_bound_corrected_ok: total as f64 <= corrected,
        coloring_proper: coloring.is_proper(&gh),
        vizing_bound_ok: d1 <= gh.max_degree() + 1,
        twice_degree_bound_ok: d1 <= 2 * delta,
    })
}
