//! Deterministic graph families and a seeded random connected-graph sampler.

use std::collections::HashMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError, NodeId};

/// Graph families used for instance generation and scaling studies.
///
/// Every family labels nodes `0..N`; the conventional routing endpoints are
/// the lowest and highest ids (see [`Topology::endpoints`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Topology {
    Complete { nodes: usize },
    /// `rows × cols` grid, node `(i, j)` labelled `i * cols + j`.
    SquareLattice { rows: usize, cols: usize },
    /// Strip of triangles, `rows` triangles long and `cols` strips wide.
    /// Node labels follow the insertion order of the classic
    /// `triangular_lattice_graph(cols, rows)` construction, so
    /// `rows = 4, cols = 1` is the 6-node, 9-edge lattice
    /// `(0,1) (0,3) (1,2) (1,3) (1,4) (2,4) (2,5) (3,4) (4,5)`.
    TriangularLattice { rows: usize, cols: usize },
    /// Source `0` and destination `k + 1` joined by two disjoint arcs that
    /// split the `k` intermediate nodes as evenly as possible (the first arc
    /// gets the extra node).
    Cycle { intermediate: usize },
}

impl Topology {
    pub fn generate(&self) -> Result<Graph, GraphError> {
        match *self {
            Topology::Complete { nodes } => {
                positive(nodes, "complete graph needs at least 2 nodes", 2)?;
                let edges = (0..nodes).flat_map(|a| (a + 1..nodes).map(move |b| (a, b)));
                Graph::new(0..nodes, edges)
            }
            Topology::SquareLattice { rows, cols } => {
                positive(rows, "square lattice rows must be positive", 1)?;
                positive(cols, "square lattice cols must be positive", 1)?;
                let id = |i: usize, j: usize| i * cols + j;
                let mut edges = Vec::new();
                for i in 0..rows {
                    for j in 0..cols {
                        if i + 1 < rows {
                            edges.push((id(i, j), id(i + 1, j)));
                        }
                        if j + 1 < cols {
                            edges.push((id(i, j), id(i, j + 1)));
                        }
                    }
                }
                Graph::new(0..rows * cols, edges)
            }
            Topology::TriangularLattice { rows, cols } => {
                positive(rows, "triangular lattice rows must be positive", 1)?;
                positive(cols, "triangular lattice cols must be positive", 1)?;
                Ok(triangular(cols, rows))
            }
            Topology::Cycle { intermediate } => {
                positive(intermediate, "cycle needs at least 1 intermediate node", 1)?;
                let d = intermediate + 1;
                let split = intermediate.div_ceil(2);
                let mut order: Vec<NodeId> = (0..=split).collect();
                order.push(d);
                order.extend((split + 1..=intermediate).rev());
                let edges: Vec<(NodeId, NodeId)> = order
                    .iter()
                    .zip(order.iter().cycle().skip(1))
                    .map(|(&a, &b)| (a, b))
                    .collect();
                Graph::new(0..=d, edges)
            }
        }
    }

    /// Lowest and highest node id of the generated graph.
    pub fn endpoints(&self) -> Result<(NodeId, NodeId), GraphError> {
        let g = self.generate()?;
        Ok((g.nodes()[0], g.max_node_id().unwrap()))
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Topology::Complete { .. } => "complete",
            Topology::SquareLattice { .. } => "square",
            Topology::TriangularLattice { .. } => "triangular",
            Topology::Cycle { .. } => "cycle",
        }
    }

    pub fn size_label(&self) -> String {
        match *self {
            Topology::Complete { nodes } => nodes.to_string(),
            Topology::SquareLattice { rows, cols } | Topology::TriangularLattice { rows, cols } => {
                format!("{rows}x{cols}")
            }
            Topology::Cycle { intermediate } => intermediate.to_string(),
        }
    }
}

fn positive(value: usize, msg: &str, min: usize) -> Result<(), GraphError> {
    if value < min {
        Err(GraphError::InvalidTopology(msg.to_string()))
    } else {
        Ok(())
    }
}

// m rows and n columns of triangles; lattice coordinates (i, j) with i along a
// row and j the row index. Insertion order decides the integer labels.
fn triangular(m: usize, n: usize) -> Graph {
    let half = n.div_ceil(2);
    let mut raw: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for j in 0..=m {
        for i in 0..half {
            raw.push(((i, j), (i + 1, j)));
        }
    }
    for j in 0..m {
        for i in 0..=half {
            raw.push(((i, j), (i, j + 1)));
        }
    }
    for j in (1..m).step_by(2) {
        for i in 0..half {
            raw.push(((i, j), (i + 1, j + 1)));
        }
    }
    for j in (0..m).step_by(2) {
        for i in 0..half {
            raw.push(((i + 1, j), (i, j + 1)));
        }
    }
    // Odd column counts leave a dangling node at the end of every odd row.
    let dropped = |p: &(usize, usize)| n % 2 == 1 && p.0 == half && p.1 % 2 == 1;
    let mut label: HashMap<(usize, usize), NodeId> = HashMap::new();
    let mut order = Vec::new();
    for (a, b) in &raw {
        for p in [a, b] {
            if !dropped(p) && !label.contains_key(p) {
                label.insert(*p, order.len());
                order.push(*p);
            }
        }
    }
    let edges = raw
        .iter()
        .filter(|(a, b)| !dropped(a) && !dropped(b))
        .map(|(a, b)| (label[a], label[b]));
    Graph::new(0..order.len(), edges).expect("triangular lattice is simple")
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family_name(), self.size_label())
    }
}

impl FromStr for Topology {
    type Err = GraphError;

    /// Parses `complete:4`, `square:3x2`, `triangular:4x1` or `cycle:4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::InvalidTopology(format!("cannot parse topology {s:?}"));
        let (family, size) = s.split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let dims = |t: &str| -> Result<(usize, usize), GraphError> {
            let (r, c) = t.split_once('x').ok_or_else(bad)?;
            Ok((num(r)?, num(c)?))
        };
        let topo = match family.trim() {
            "complete" => Topology::Complete { nodes: num(size)? },
            "square" => {
                let (rows, cols) = dims(size)?;
                Topology::SquareLattice { rows, cols }
            }
            "triangular" => {
                let (rows, cols) = dims(size)?;
                Topology::TriangularLattice { rows, cols }
            }
            "cycle" => Topology::Cycle {
                intermediate: num(size)?,
            },
            _ => return Err(bad()),
        };
        topo.generate()?;
        Ok(topo)
    }
}

/// Seeded random connected graph: a uniformly shuffled spanning tree plus
/// each remaining node pair independently with probability 0.35, stopping
/// once `|V| + |E| - 2` would exceed `max_variables`. Node count is drawn
/// uniformly from `nodes`.
pub fn random_connected_graph(seed: u64, nodes: RangeInclusive<usize>, max_variables: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = (*nodes.start()).max(2);
    let hi = (*nodes.end()).max(lo);
    let mut count = rng.random_range(lo..=hi);
    // A spanning tree alone needs 2|V| - 3 variables.
    while count > 2 && 2 * count - 3 > max_variables {
        count -= 1;
    }
    let mut perm: Vec<NodeId> = (0..count).collect();
    perm.shuffle(&mut rng);
    let mut edges = Vec::new();
    for i in 1..count {
        let parent = perm[rng.random_range(0..i)];
        edges.push((perm[i].min(parent), perm[i].max(parent)));
    }
    let mut extra: Vec<(NodeId, NodeId)> = (0..count)
        .flat_map(|a| (a + 1..count).map(move |b| (a, b)))
        .filter(|e| !edges.contains(e))
        .collect();
    extra.shuffle(&mut rng);
    for e in extra {
        if count + edges.len() + 1 - 2 > max_variables {
            break;
        }
        if rng.random_bool(0.35) {
            edges.push(e);
        }
    }
    Graph::new(0..count, edges).expect("sampled graph is simple")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn edge_list(g: &Graph) -> Vec<(usize, usize)> {
        g.edges().iter().map(|&Edge(a, b)| (a, b)).collect()
    }

    #[test]
    fn complete_four_has_six_edges() {
        let g = Topology::Complete { nodes: 4 }.generate().unwrap();
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn square_lattice_matches_routing_instance() {
        let g = Topology::SquareLattice { rows: 3, cols: 2 }.generate().unwrap();
        assert_eq!(
            edge_list(&g),
            vec![(0, 1), (0, 2), (1, 3), (2, 3), (2, 4), (3, 5), (4, 5)]
        );
    }

    // Expected edge lists were produced by the reference networkx
    // `triangular_lattice_graph(m, n)` followed by integer relabelling.
    #[test]
    fn triangular_lattice_labels() {
        let cases: &[(usize, usize, usize, &[(usize, usize)])] = &[
            (2, 1, 4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]),
            (3, 1, 5, &[(0, 1), (0, 3), (1, 2), (1, 3), (1, 4), (2, 4), (3, 4)]),
            (
                4,
                1,
                6,
                &[(0, 1), (0, 3), (1, 2), (1, 3), (1, 4), (2, 4), (2, 5), (3, 4), (4, 5)],
            ),
            (
                2,
                2,
                6,
                &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (2, 5), (3, 5), (4, 5)],
            ),
            (
                3,
                2,
                8,
                &[
                    (0, 1), (0, 3), (1, 2), (1, 3), (1, 4), (2, 4), (3, 4), (3, 5),
                    (3, 6), (4, 6), (4, 7), (5, 6), (6, 7),
                ],
            ),
            (
                6,
                1,
                8,
                &[
                    (0, 1), (0, 4), (1, 2), (1, 4), (1, 5), (2, 3), (2, 5), (2, 6),
                    (3, 6), (3, 7), (4, 5), (5, 6), (6, 7),
                ],
            ),
            (
                4,
                2,
                9,
                &[
                    (0, 1), (0, 3), (1, 2), (1, 3), (1, 4), (2, 4), (2, 5), (3, 4),
                    (3, 6), (3, 7), (4, 5), (4, 7), (4, 8), (5, 8), (6, 7), (7, 8),
                ],
            ),
        ];
        for &(rows, cols, nodes, edges) in cases {
            let g = Topology::TriangularLattice { rows, cols }.generate().unwrap();
            assert_eq!(g.node_count(), nodes, "{rows}x{cols}");
            assert_eq!(edge_list(&g), edges.to_vec(), "{rows}x{cols}");
        }
    }

    #[test]
    fn cycle_splits_intermediates() {
        let g = Topology::Cycle { intermediate: 4 }.generate().unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(
            edge_list(&g),
            vec![(0, 1), (0, 3), (1, 2), (2, 5), (3, 4), (4, 5)]
        );
        assert!(g.nodes().iter().all(|&u| g.degree(u) == 2));
        let g = Topology::Cycle { intermediate: 1 }.generate().unwrap();
        assert_eq!(edge_list(&g), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn rejects_non_positive_sizes() {
        assert!(Topology::Complete { nodes: 1 }.generate().is_err());
        assert!(Topology::SquareLattice { rows: 0, cols: 2 }.generate().is_err());
        assert!(Topology::TriangularLattice { rows: 2, cols: 0 }.generate().is_err());
        assert!(Topology::Cycle { intermediate: 0 }.generate().is_err());
    }

    #[test]
    fn parses_topology_strings() {
        assert_eq!(
            "square:3x2".parse::<Topology>().unwrap(),
            Topology::SquareLattice { rows: 3, cols: 2 }
        );
        assert_eq!(
            "cycle:6".parse::<Topology>().unwrap(),
            Topology::Cycle { intermediate: 6 }
        );
        assert!("hexagonal:3".parse::<Topology>().is_err());
        assert!("complete:0".parse::<Topology>().is_err());
        let t = Topology::TriangularLattice { rows: 4, cols: 1 };
        assert_eq!(t.to_string().parse::<Topology>().unwrap(), t);
    }

    #[test]
    fn generated_families_satisfy_degree_sum() {
        let families = [
            Topology::Complete { nodes: 6 },
            Topology::SquareLattice { rows: 3, cols: 4 },
            Topology::TriangularLattice { rows: 5, cols: 3 },
            Topology::Cycle { intermediate: 7 },
        ];
        for t in families {
            let g = t.generate().unwrap();
            assert_eq!(g.degree_sum(), 2 * g.edge_count(), "{t}");
            assert!(g.is_connected(), "{t}");
        }
    }

    #[test]
    fn random_graphs_are_connected_and_bounded() {
        for seed in 0..200 {
            let g = random_connected_graph(seed, 2..=9, 16);
            assert!(g.is_connected());
            assert!(g.node_count() + g.edge_count() - 2 <= 16);
            assert_eq!(g, random_connected_graph(seed, 2..=9, 16));
        }
    }
}
