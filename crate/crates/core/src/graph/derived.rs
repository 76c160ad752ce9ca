use super::{Edge, Graph, NodeId};

/// Node id that [`middle_graph`] assigns to the edge of rank `rank`:
/// one past the largest original node id, offset by the rank.
pub fn middle_graph_edge_node(g: &Graph, rank: usize) -> NodeId {
    g.max_node_id().map_or(0, |m| m + 1) + rank
}

/// Middle graph on `V ∪ E`: every vertex is joined to its incident edges and
/// every pair of edges sharing a vertex is joined.
pub fn middle_graph(g: &Graph) -> Graph {
    let mut nodes: Vec<NodeId> = g.nodes().to_vec();
    nodes.extend((0..g.edge_count()).map(|r| middle_graph_edge_node(g, r)));
    let mut edges = Vec::new();
    for &u in g.nodes() {
        let incident = g.incident_edges(u);
        for (i, &a) in incident.iter().enumerate() {
            edges.push((u, middle_graph_edge_node(g, a)));
            for &b in &incident[i + 1..] {
                edges.push((middle_graph_edge_node(g, a), middle_graph_edge_node(g, b)));
            }
        }
    }
    Graph::new(nodes, edges).expect("middle graph is simple")
}

/// Line graph; node `r` stands for the edge of rank `r`.
pub fn line_graph(g: &Graph) -> Graph {
    let mut edges = Vec::new();
    for &u in g.nodes() {
        let incident = g.incident_edges(u);
        for (i, &a) in incident.iter().enumerate() {
            for &b in &incident[i + 1..] {
                edges.push((a, b));
            }
        }
    }
    Graph::new(0..g.edge_count(), edges).expect("line graph is simple")
}

/// Attaches a fresh pendant vertex to every node. The pendant of the node at
/// position `i` gets id `max_id + 1 + i`.
pub fn endline_graph(g: &Graph) -> Graph {
    let base = g.max_node_id().map_or(0, |m| m + 1);
    let nodes = g
        .nodes()
        .iter()
        .copied()
        .chain((0..g.node_count()).map(|i| base + i));
    let edges = g
        .edges()
        .iter()
        .map(|&Edge(a, b)| (a, b))
        .chain(g.nodes().iter().enumerate().map(|(i, &u)| (u, base + i)));
    Graph::new(nodes, edges).expect("endline graph is simple")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_connected_graph, Topology};
    use proptest::prelude::*;

    fn path3() -> Graph {
        Graph::new(0..3, [(0, 1), (1, 2)]).unwrap()
    }

    fn single_edge() -> Graph {
        Graph::new(0..2, [(0, 1)]).unwrap()
    }

    fn k4() -> Graph {
        Topology::Complete { nodes: 4 }.generate().unwrap()
    }

    // Brute-force adjacency test straight from the definition, independent of
    // the incidence lists used by `middle_graph`.
    fn middle_graph_by_definition(g: &Graph) -> Vec<(NodeId, NodeId)> {
        let n_ids: Vec<NodeId> = g.nodes().to_vec();
        let e_ids: Vec<NodeId> = (0..g.edge_count())
            .map(|r| middle_graph_edge_node(g, r))
            .collect();
        let mut out = Vec::new();
        for &u in &n_ids {
            for (r, e) in g.edges().iter().enumerate() {
                if e.touches(u) {
                    out.push((u.min(e_ids[r]), u.max(e_ids[r])));
                }
            }
        }
        for (i, a) in g.edges().iter().enumerate() {
            for (j, b) in g.edges().iter().enumerate().skip(i + 1) {
                if a.touches(b.0) || a.touches(b.1) {
                    out.push((e_ids[i], e_ids[j]));
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn middle_graph_single_edge() {
        let m = middle_graph(&single_edge());
        assert_eq!(m.node_count(), 3);
        // Two vertex-edge incidences; the degree-square sum formula gives 1.
        assert_eq!(m.edge_count(), 2);
        let half_square_sum = 1;
        assert_eq!(m.edge_count(), half_square_sum + single_edge().edge_count());
    }

    #[test]
    fn middle_graph_path() {
        let m = middle_graph(&path3());
        assert_eq!((m.node_count(), m.edge_count()), (5, 5));
    }

    #[test]
    fn middle_graph_complete_four() {
        let g = k4();
        let m = middle_graph(&g);
        assert_eq!(m.node_count(), 10);
        // ½·Σdeg² = 18 counts edge-edge adjacencies plus one incidence per
        // edge; the other incidence per edge adds |E| = 6.
        assert_eq!(m.edge_count(), 24);
        let got: Vec<_> = m.edges().iter().map(|e| (e.0, e.1)).collect();
        assert_eq!(got, middle_graph_by_definition(&g));
    }

    #[test]
    fn line_graph_examples() {
        let l = line_graph(&single_edge());
        assert_eq!((l.node_count(), l.edge_count()), (1, 0));
        let l = line_graph(&path3());
        assert_eq!((l.node_count(), l.edge_count()), (2, 1));
        let l = line_graph(&k4());
        assert_eq!(l.node_count(), 6);
        assert!(l.nodes().iter().all(|&u| l.degree(u) == 4));
    }

    #[test]
    fn endline_examples() {
        let g = Graph::new([0], []).unwrap();
        let p = endline_graph(&g);
        assert_eq!((p.node_count(), p.edge_count()), (2, 1));
        let p = endline_graph(&single_edge());
        assert_eq!((p.node_count(), p.edge_count()), (4, 3));
        let p = endline_graph(&k4());
        assert_eq!((p.node_count(), p.edge_count(), p.max_degree()), (8, 10, 4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn derived_graph_counts(seed in any::<u64>()) {
            let g = random_connected_graph(seed, 2..=9, 40);
            let delta = g.max_degree();
            prop_assert_eq!(g.degree_sum(), 2 * g.edge_count());

            let m = middle_graph(&g);
            prop_assert_eq!(m.node_count(), g.node_count() + g.edge_count());
            let half_sq: usize = g.nodes().iter().map(|&u| g.degree(u).pow(2)).sum::<usize>() / 2;
            prop_assert_eq!(m.edge_count(), half_sq + g.edge_count());
            let got: Vec<_> = m.edges().iter().map(|e| (e.0, e.1)).collect();
            prop_assert_eq!(got, middle_graph_by_definition(&g));

            let l = line_graph(&g);
            prop_assert!(l.max_degree() + 2 <= 2 * delta.max(1));

            prop_assert_eq!(endline_graph(&g).max_degree(), delta + 1);
        }

        // The middle graph is the line graph of the endline graph.
        #[test]
        fn middle_graph_matches_line_of_endline_counts(seed in any::<u64>()) {
            let g = random_connected_graph(seed, 2..=8, 40);
            let m = middle_graph(&g);
            let lp = line_graph(&endline_graph(&g));
            prop_assert_eq!(m.node_count(), lp.node_count());
            prop_assert_eq!(m.edge_count(), lp.edge_count());
            prop_assert_eq!(m.max_degree(), lp.max_degree());
        }
    }
}
