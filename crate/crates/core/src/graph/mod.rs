//! Undirected simple graphs and the constructions used to reason about the
//! interaction structure of routing Hamiltonians.
//!
//! A [`Graph`] is immutable once built. Node ids are arbitrary non-negative
//! integers; edges are stored in canonical order (smaller endpoint first,
//! sorted lexicographically), and the position of an edge in that order is
//! its *rank*. Most derived structures (variable maps, colorings, middle
//! graphs) index edges by rank.

mod coloring;
mod derived;
mod paths;
mod topology;

pub use coloring::{edge_color, edge_color_reduced, EdgeColoring};
pub use derived::{endline_graph, line_graph, middle_graph, middle_graph_edge_node};
pub use paths::simple_paths;
pub use topology::{random_connected_graph, Topology};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

/// Unordered node pair, always stored with the smaller id first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(pub NodeId, pub NodeId);

impl Edge {
    pub fn new(a: NodeId, b: NodeId) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn touches(&self, u: NodeId) -> bool {
        self.0 == u || self.1 == u
    }

    /// The endpoint opposite to `u`, if `u` is an endpoint.
    pub fn other(&self, u: NodeId) -> Option<NodeId> {
        if self.0 == u {
            Some(self.1)
        } else if self.1 == u {
            Some(self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("edge {edge} references undeclared node {node}")]
    DanglingEndpoint { edge: Edge, node: NodeId },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
}

#[derive(Clone, Debug)]
pub struct Graph {
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
    position: HashMap<NodeId, usize>,
    // incident edge ranks per node position, ascending by neighbor id
    incident: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph, rejecting duplicate nodes or edges, self-loops and
    /// edges whose endpoints were not declared.
    pub fn new<N, E>(nodes: N, edges: E) -> Result<Self, GraphError>
    where
        N: IntoIterator<Item = NodeId>,
        E: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut node_set = BTreeSet::new();
        for u in nodes {
            if !node_set.insert(u) {
                return Err(GraphError::DuplicateNode(u));
            }
        }
        let mut edge_set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let e = Edge::new(a, b);
            for node in [e.0, e.1] {
                if !node_set.contains(&node) {
                    return Err(GraphError::DanglingEndpoint { edge: e, node });
                }
            }
            if !edge_set.insert(e) {
                return Err(GraphError::DuplicateEdge(e));
            }
        }
        Ok(Self::from_canonical(
            node_set.into_iter().collect(),
            edge_set.into_iter().collect(),
        ))
    }

    // Caller guarantees sorted, deduplicated, valid input.
    fn from_canonical(nodes: Vec<NodeId>, edges: Vec<Edge>) -> Self {
        let position: HashMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let mut incident = vec![Vec::new(); nodes.len()];
        for (rank, e) in edges.iter().enumerate() {
            incident[position[&e.0]].push(rank);
            incident[position[&e.1]].push(rank);
        }
        for (pos, list) in incident.iter_mut().enumerate() {
            let u = nodes[pos];
            list.sort_by_key(|&r| edges[r].other(u));
        }
        Graph {
            nodes,
            edges,
            position,
            incident,
        }
    }

    pub fn empty() -> Self {
        Self::from_canonical(Vec::new(), Vec::new())
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_node(&self, u: NodeId) -> bool {
        self.position.contains_key(&u)
    }

    pub fn max_node_id(&self) -> Option<NodeId> {
        self.nodes.last().copied()
    }

    /// Rank of an edge in canonical order.
    pub fn edge_rank(&self, a: NodeId, b: NodeId) -> Option<usize> {
        self.edges.binary_search(&Edge::new(a, b)).ok()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.edge_rank(a, b).is_some()
    }

    /// Ranks of the edges incident to `u`, ordered by neighbor id.
    pub fn incident_edges(&self, u: NodeId) -> &[usize] {
        match self.position.get(&u) {
            Some(&p) => &self.incident[p],
            None => &[],
        }
    }

    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.incident_edges(u)
            .iter()
            .map(move |&r| self.edges[r].other(u).expect("incident edge"))
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.incident_edges(u).len()
    }

    /// Maximum degree; zero for an edgeless (or empty) graph.
    pub fn max_degree(&self) -> usize {
        self.incident.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn degree_sum(&self) -> usize {
        self.incident.iter().map(Vec::len).sum()
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.nodes.first() else {
            return true;
        };
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![start];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in self.neighbors(u) {
                let p = self.position[&v];
                if !seen[p] {
                    seen[p] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.nodes.len()
    }

    /// Induced subgraph on all nodes except `removed`.
    pub fn without_nodes(&self, removed: &[NodeId]) -> Graph {
        let nodes: Vec<NodeId> = self
            .nodes
            .iter()
            .copied()
            .filter(|u| !removed.contains(u))
            .collect();
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .copied()
            .filter(|e| !removed.contains(&e.0) && !removed.contains(&e.1))
            .collect();
        Self::from_canonical(nodes, edges)
    }
}
