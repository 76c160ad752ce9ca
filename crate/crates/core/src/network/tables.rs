//! Reference instances with tabulated node and edge data.
//!
//! Coordinates are given to the metre while distances carry three decimals,
//! so the tabulated distances are used as-is rather than recomputed.

use std::collections::BTreeMap;

use super::{EdgeAttrs, NetworkParams, NodeAttrs, PhysicalNetwork};
use crate::graph::{Edge, Graph, Topology};
use crate::qubo::ObjectiveWeights;

// (x, y, noise dBm)
type NodeRow = (f64, f64, f64);
// (u, v, distance m, rate kbit/s)
type EdgeRow = (usize, usize, f64, f64);

const K4_NODES: [NodeRow; 4] = [
    (-181.0, 88.0, -93.665),
    (-82.0, 674.0, -94.609),
    (589.0, 84.0, -81.811),
    (645.0, 664.0, -85.622),
];

const K4_EDGES: [EdgeRow; 6] = [
    (0, 1, 594.757, 4250.0),
    (0, 2, 770.565, 2350.0),
    (0, 3, 1007.517, 1801.0),
    (1, 2, 893.738, 3850.0),
    (1, 3, 727.298, 1350.0),
    (2, 3, 582.504, 1900.0),
];

const SQUARE_NODES: [NodeRow; 6] = [
    (157.0, -93.0, -85.058),
    (73.0, 316.0, -92.388),
    (425.0, -102.0, -91.186),
    (408.0, 469.0, -93.737),
    (980.0, -57.0, -84.012),
    (999.0, 635.0, -91.733),
];

const SQUARE_EDGES: [EdgeRow; 7] = [
    (0, 1, 417.987, 300.0),
    (0, 2, 268.148, 3950.0),
    (1, 3, 368.637, 3600.0),
    (2, 3, 571.589, 2200.0),
    (2, 4, 556.17, 3250.0),
    (3, 5, 614.043, 650.0),
    (4, 5, 693.11, 3000.0),
];

fn build(nodes: &[NodeRow], edges: &[EdgeRow], params: NetworkParams) -> PhysicalNetwork {
    let graph = Graph::new(0..nodes.len(), edges.iter().map(|e| (e.0, e.1))).unwrap();
    let node_attrs = nodes
        .iter()
        .map(|&(x, y, noise)| NodeAttrs {
            position_m: (x, y),
            noise_dbm: noise,
            delay_ms: params.delay_ms,
        })
        .collect();
    // Rows are already in canonical order.
    let edge_attrs = edges
        .iter()
        .map(|&(_, _, d, r)| EdgeAttrs {
            distance_m: d,
            data_rate_kbps: r,
        })
        .collect();
    let d = nodes.len() - 1;
    PhysicalNetwork::new(graph, node_attrs, edge_attrs, params, 0, d).unwrap()
}

/// Fully connected 4-node network, routed 0 → 3.
pub fn complete_four() -> PhysicalNetwork {
    build(&K4_NODES, &K4_EDGES, NetworkParams::default())
}

/// 3 × 2 square lattice, routed 0 → 5.
pub fn square_lattice() -> PhysicalNetwork {
    let params = NetworkParams {
        area_m: (1000.0, 2000.0),
        ..NetworkParams::default()
    };
    build(&SQUARE_NODES, &SQUARE_EDGES, params)
}

/// Direct-weight triangular lattice instance: 6 nodes, 9 edges, four
/// objectives (two node-weighted, two edge-weighted), routed 0 → 5.
pub fn triangular_weights() -> (Graph, Vec<ObjectiveWeights>) {
    let graph = Topology::TriangularLattice { rows: 4, cols: 1 }
        .generate()
        .unwrap();
    let node_rows: [[f64; 4]; 6] = [
        [1.5, 0.0, 0.5, 0.0],
        [0.5, 0.0, 1.0, 0.0],
        [1.5, 0.0, 1.5, 0.0],
        [0.2, 0.0, 2.0, 0.0],
        [1.0, 0.0, 1.0, 0.0],
        [0.5, 0.0, 1.5, 0.0],
    ];
    let edge_rows: [(usize, usize, [f64; 4]); 9] = [
        (0, 1, [0.0, 0.5, 0.0, 2.5]),
        (0, 3, [0.0, 1.5, 0.0, 0.1]),
        (1, 2, [0.0, 1.6, 0.0, 0.5]),
        (1, 4, [0.0, 1.0, 0.0, 1.5]),
        (1, 3, [0.0, 3.0, 0.0, 0.5]),
        (2, 5, [0.0, 1.6, 0.0, 0.6]),
        (2, 4, [0.0, 2.0, 0.0, 0.5]),
        (3, 4, [0.0, 1.0, 0.0, 0.5]),
        (4, 5, [0.0, 0.6, 0.0, 1.6]),
    ];
    let objectives = (0..4)
        .map(|k| ObjectiveWeights {
            label: format!("obj_{}", k + 1),
            nodes: node_rows
                .iter()
                .enumerate()
                .filter(|(_, w)| w[k] != 0.0)
                .map(|(u, w)| (u, w[k]))
                .collect(),
            edges: edge_rows
                .iter()
                .filter(|(_, _, w)| w[k] != 0.0)
                .map(|&(u, v, w)| (Edge::new(u, v), w[k]))
                .collect::<BTreeMap<_, _>>(),
        })
        .collect();
    (graph, objectives)
}
