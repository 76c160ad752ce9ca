//! Binary encoding of the multi-objective shortest-path problem.
//!
//! Variables are the intermediate nodes (ascending id) followed by the edges
//! in canonical order; the source and destination are fixed to 1 and carry no
//! variable. Penalties are built from
//! `E_s = -1 + (1 - Σ x_sj)^2`, `E_d` likewise, and `E_i = (2x_i - Σ x_ij)^2`
//! for every intermediate node, so a simple s-d path scores exactly -2.

mod poly;

pub use poly::{Bitstring, CostPolynomial, Hamiltonian};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, Graph, NodeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuboError {
    #[error("source and destination must differ (both are {0})")]
    SameEndpoints(NodeId),
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
    #[error("edge {0} is not in the graph")]
    UnknownEdge(Edge),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight {index} is {value}; weights must lie in [0, 1]")]
    WeightRange { index: usize, value: f64 },
    #[error("weights sum to {0}, not 1")]
    WeightSum(f64),
    #[error("bitstring has {got} bits, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cannot parse bitstring {0:?}")]
    BadBitstring(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variable {
    Node(NodeId),
    Edge(Edge),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableMap {
    pub source: NodeId,
    pub destination: NodeId,
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
    node_index: HashMap<NodeId, usize>,
}

impl VariableMap {
    pub fn new(g: &Graph, source: NodeId, destination: NodeId) -> Result<Self, QuboError> {
        if source == destination {
            return Err(QuboError::SameEndpoints(source));
        }
        for u in [source, destination] {
            if !g.contains_node(u) {
                return Err(QuboError::UnknownNode(u));
            }
        }
        let nodes: Vec<NodeId> = g
            .nodes()
            .iter()
            .copied()
            .filter(|&u| u != source && u != destination)
            .collect();
        let node_index = nodes.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        Ok(VariableMap {
            source,
            destination,
            nodes,
            edges: g.edges().to_vec(),
            node_index,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn intermediate_nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_var(&self, u: NodeId) -> Option<usize> {
        self.node_index.get(&u).copied()
    }

    pub fn edge_var(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok().map(|r| self.nodes.len() + r)
    }

    pub fn variable(&self, i: usize) -> Variable {
        if i < self.nodes.len() {
            Variable::Node(self.nodes[i])
        } else {
            Variable::Edge(self.edges[i - self.nodes.len()])
        }
    }

    pub fn is_endpoint(&self, u: NodeId) -> bool {
        u == self.source || u == self.destination
    }
}

/// Per-node and per-edge weights of one linear objective, as supplied by the
/// caller. Missing entries count as zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjectiveWeights {
    pub label: String,
    pub nodes: BTreeMap<NodeId, f64>,
    pub edges: BTreeMap<Edge, f64>,
}

/// One encoded objective: `constant + Σ linear[i] x_i`. Weights on the
/// source and destination land in `constant`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveTerms {
    pub label: String,
    pub constant: f64,
    pub linear: Vec<f64>,
}

impl ObjectiveTerms {
    pub fn evaluate_index(&self, b: u64) -> f64 {
        self.linear
            .iter()
            .enumerate()
            .filter(|(i, _)| (b >> i) & 1 == 1)
            .fold(self.constant, |acc, (_, &a)| acc + a)
    }

    pub fn as_polynomial(&self) -> CostPolynomial {
        let mut p = CostPolynomial::zero(self.linear.len());
        p.constant = self.constant;
        p.linear.clone_from(&self.linear);
        p
    }

    fn max_abs_coefficient(&self) -> f64 {
        self.linear.iter().fold(0.0f64, |m, a| m.max(a.abs()))
    }
}

/// How objectives are rescaled before scalarization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveScaling {
    /// Use the coefficients as given.
    #[default]
    Raw,
    /// Divide each objective by its largest absolute variable coefficient,
    /// so every objective is O(1) next to the penalty.
    MaxAbs,
}

impl std::str::FromStr for ObjectiveScaling {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(ObjectiveScaling::Raw),
            "max-abs" => Ok(ObjectiveScaling::MaxAbs),
            _ => Err(format!("unknown scaling {s:?} (expected raw or max-abs)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuboProblem {
    pub graph: Graph,
    pub vmap: VariableMap,
    pub objectives: Vec<ObjectiveTerms>,
    pub penalty: CostPolynomial,
    pub penalty_weight: f64,
}

/// Convex combination weights, one per objective.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarizationWeights(Vec<f64>);

impl ScalarizationWeights {
    pub fn new(w: Vec<f64>) -> Result<Self, QuboError> {
        for (index, &value) in w.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(QuboError::WeightRange { index, value });
            }
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(QuboError::WeightSum(sum));
        }
        Ok(ScalarizationWeights(w))
    }

    /// Divides non-negative raw weights by their sum.
    pub fn normalized(raw: &[f64]) -> Result<Self, QuboError> {
        if let Some((index, &value)) = raw.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(QuboError::WeightRange { index, value });
        }
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(QuboError::WeightSum(sum));
        }
        let mut w: Vec<f64> = raw.iter().map(|v| v / sum).collect();
        // Push rounding error into the largest entry so the sum is exact enough.
        let resid = 1.0 - w.iter().sum::<f64>();
        if let Some(m) = w
            .iter_mut()
            .max_by(|a, b| a.partial_cmp(b).unwrap())
        {
            *m += resid;
        }
        Self::new(w)
    }

    pub fn uniform(l: usize) -> Self {
        Self::normalized(&vec![1.0; l]).expect("positive weights")
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Builds variables, objectives and penalties for routing from `source` to
/// `destination`.
pub fn encode_shortest_path(
    g: &Graph,
    source: NodeId,
    destination: NodeId,
    objectives: &[ObjectiveWeights],
) -> Result<QuboProblem, QuboError> {
    let vmap = VariableMap::new(g, source, destination)?;
    let n = vmap.len();

    let mut terms = Vec::with_capacity(objectives.len());
    for obj in objectives {
        let mut t = ObjectiveTerms {
            label: obj.label.clone(),
            constant: 0.0,
            linear: vec![0.0; n],
        };
        for (&u, &w) in &obj.nodes {
            if !g.contains_node(u) {
                return Err(QuboError::UnknownNode(u));
            }
            match vmap.node_var(u) {
                Some(i) => t.linear[i] += w,
                None => t.constant += w,
            }
        }
        for (&e, &w) in &obj.edges {
            let e = Edge::new(e.0, e.1);
            let i = vmap.edge_var(e).ok_or(QuboError::UnknownEdge(e))?;
            t.linear[i] += w;
        }
        terms.push(t);
    }

    let mut penalty = CostPolynomial::zero(n);
    let edge_vars = |u: NodeId| -> Vec<usize> {
        g.incident_edges(u)
            .iter()
            .map(|&r| vmap.edge_var(g.edges()[r]).unwrap())
            .collect()
    };
    for end in [source, destination] {
        let t: Vec<(usize, f64)> = edge_vars(end).into_iter().map(|i| (i, -1.0)).collect();
        penalty.add_square(1.0, &t);
        penalty.constant -= 1.0;
    }
    for &u in vmap.intermediate_nodes() {
        let mut t = vec![(vmap.node_var(u).unwrap(), 2.0)];
        t.extend(edge_vars(u).into_iter().map(|i| (i, -1.0)));
        penalty.add_square(0.0, &t);
    }
    penalty.prune();

    Ok(QuboProblem {
        graph: g.clone(),
        vmap,
        objectives: terms,
        penalty,
        penalty_weight: 1.0,
    })
}

/// Minimum penalty, attained by every simple s-d path.
pub const PENALTY_FLOOR: f64 = -2.0;

impl QuboProblem {
    pub fn n(&self) -> usize {
        self.vmap.len()
    }

    pub fn num_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub fn with_penalty_weight(mut self, w: f64) -> Self {
        self.penalty_weight = w;
        self
    }

    pub fn with_scaling(mut self, scaling: ObjectiveScaling) -> Self {
        if scaling == ObjectiveScaling::MaxAbs {
            for t in &mut self.objectives {
                let m = t.max_abs_coefficient();
                if m > 0.0 {
                    t.constant /= m;
                    t.linear.iter_mut().for_each(|a| *a /= m);
                }
            }
        }
        self
    }

    /// `Σ w_i E^C_i + w_P · penalty`.
    pub fn scalarize(&self, w: &ScalarizationWeights) -> Result<CostPolynomial, QuboError> {
        if w.len() != self.objectives.len() {
            return Err(QuboError::WeightCount {
                expected: self.objectives.len(),
                got: w.len(),
            });
        }
        let mut p = CostPolynomial::zero(self.n());
        p.add_scaled(&self.penalty, self.penalty_weight);
        for (t, &wi) in self.objectives.iter().zip(w.as_slice()) {
            p.constant += wi * t.constant;
            for (a, b) in p.linear.iter_mut().zip(&t.linear) {
                *a += wi * b;
            }
        }
        Ok(p)
    }

    pub fn objective_vector(&self, x: &Bitstring) -> Result<Vec<f64>, QuboError> {
        self.check_len(x)?;
        Ok(self.objective_vector_index(x.value))
    }

    pub fn objective_vector_index(&self, b: u64) -> Vec<f64> {
        self.objectives.iter().map(|t| t.evaluate_index(b)).collect()
    }

    pub fn penalty_value(&self, x: &Bitstring) -> Result<f64, QuboError> {
        self.penalty.evaluate(x)
    }

    /// True iff the penalty sits at its floor of -2.
    pub fn feasibility(&self, x: &Bitstring) -> Result<bool, QuboError> {
        Ok((self.penalty.evaluate(x)? - PENALTY_FLOOR).abs() < 1e-9)
    }

    fn check_len(&self, x: &Bitstring) -> Result<(), QuboError> {
        if x.len != self.n() {
            return Err(QuboError::LengthMismatch {
                expected: self.n(),
                got: x.len,
            });
        }
        Ok(())
    }
}
