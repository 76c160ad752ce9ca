//! Radio relay networks and the four routing objectives built from them:
//! node delay, path loss, bit-error probability and a bottleneck data-rate
//! term.

pub mod tables;

use std::f64::consts::{LN_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{simple_paths, Edge, Graph, GraphError, NodeId, Topology};
use crate::qubo::{encode_shortest_path, ObjectiveScaling, ObjectiveWeights, QuboError, QuboProblem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no path from {from} to {to}")]
    NoPath { from: NodeId, to: NodeId },
    #[error("expected {expected} {what}, got {got}")]
    AttributeCount {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Qubo(#[from] QuboError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkParams {
    pub area_m: (f64, f64),
    pub delay_ms: f64,
    pub path_loss_exponent: f64,
    pub tx_power_w: f64,
    pub wavelength_m: f64,
    pub modulation_order: u32,
    pub noise_mean_dbm: f64,
    pub noise_std_dbm: f64,
    pub base_rate_kbps: f64,
    pub rate_step_kbps: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            area_m: (1000.0, 1000.0),
            delay_ms: 1.0,
            path_loss_exponent: 2.7,
            tx_power_w: 50.0,
            wavelength_m: 1.2,
            modulation_order: 4,
            noise_mean_dbm: -90.0,
            noise_std_dbm: 10.0,
            base_rate_kbps: 5000.0,
            rate_step_kbps: 50.0,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self) -> Result<(), NetworkError> {
        if !(2.0..=4.0).contains(&self.path_loss_exponent) {
            return Err(NetworkError::InvalidParams(format!(
                "path-loss exponent {} outside [2, 4]",
                self.path_loss_exponent
            )));
        }
        if self.modulation_order < 2 {
            return Err(NetworkError::InvalidParams(format!(
                "modulation order {} below 2",
                self.modulation_order
            )));
        }
        for (name, value) in [
            ("transmit power", self.tx_power_w),
            ("wavelength", self.wavelength_m),
            ("rate step", self.rate_step_kbps),
            ("area width", self.area_m.0),
            ("area height", self.area_m.1),
        ] {
            positive(name, value)?;
        }
        if self.noise_std_dbm < 0.0 || self.base_rate_kbps < 0.0 || self.delay_ms < 0.0 {
            return Err(NetworkError::InvalidParams(
                "noise std, base rate and delay must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), NetworkError> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(NetworkError::NonPositive { name, value })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeAttrs {
    pub position_m: (f64, f64),
    pub noise_dbm: f64,
    pub delay_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeAttrs {
    pub distance_m: f64,
    pub data_rate_kbps: f64,
}

/// Per-edge link budget quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudget {
    pub path_loss_ratio: f64,
    pub path_loss_db: f64,
    pub noise_dbm: f64,
    pub snr: f64,
    pub snr_db: f64,
    pub bit_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalNetwork {
    pub graph: Graph,
    /// Indexed by position in `graph.nodes()`.
    pub nodes: Vec<NodeAttrs>,
    /// Indexed by edge rank.
    pub edges: Vec<EdgeAttrs>,
    pub params: NetworkParams,
    pub source: NodeId,
    pub destination: NodeId,
}

impl PhysicalNetwork {
    pub fn new(
        graph: Graph,
        nodes: Vec<NodeAttrs>,
        edges: Vec<EdgeAttrs>,
        params: NetworkParams,
        source: NodeId,
        destination: NodeId,
    ) -> Result<Self, NetworkError> {
        params.validate()?;
        if nodes.len() != graph.node_count() {
            return Err(NetworkError::AttributeCount {
                what: "node records",
                expected: graph.node_count(),
                got: nodes.len(),
            });
        }
        if edges.len() != graph.edge_count() {
            return Err(NetworkError::AttributeCount {
                what: "edge records",
                expected: graph.edge_count(),
                got: edges.len(),
            });
        }
        for e in &edges {
            positive("distance", e.distance_m)?;
        }
        if source == destination {
            return Err(QuboError::SameEndpoints(source).into());
        }
        for u in [source, destination] {
            if !graph.contains_node(u) {
                return Err(QuboError::UnknownNode(u).into());
            }
        }
        Ok(PhysicalNetwork {
            graph,
            nodes,
            edges,
            params,
            source,
            destination,
        })
    }

    pub fn node(&self, u: NodeId) -> &NodeAttrs {
        let pos = self.graph.nodes().binary_search(&u).expect("node in graph");
        &self.nodes[pos]
    }

    pub fn edge(&self, e: Edge) -> &EdgeAttrs {
        &self.edges[self.graph.edge_rank(e.0, e.1).expect("edge in graph")]
    }

    pub fn link_budget(&self, rank: usize) -> LinkBudget {
        let e = self.graph.edges()[rank];
        let p = &self.params;
        let d = self.edges[rank].distance_m;
        let noise = symmetrized_noise_dbm(self.node(e.0).noise_dbm, self.node(e.1).noise_dbm);
        let snr = snr_ratio(p.tx_power_w, d, p, noise).expect("validated inputs");
        LinkBudget {
            path_loss_ratio: path_loss_ratio(d, p.wavelength_m, p.path_loss_exponent).unwrap(),
            path_loss_db: path_loss_db(d, p.wavelength_m, p.path_loss_exponent).unwrap(),
            noise_dbm: noise,
            snr,
            snr_db: 10.0 * snr.log10(),
            bit_error: bit_error(snr).unwrap(),
        }
    }

    /// The four objectives, in the order delay, path loss, bit error, rate.
    pub fn build_objectives(&self) -> Result<Vec<ObjectiveWeights>, NetworkError> {
        let beta = select_beta(self)?;
        let mut delay = ObjectiveWeights {
            label: "delay_ms".into(),
            ..Default::default()
        };
        for (&u, a) in self.graph.nodes().iter().zip(&self.nodes) {
            delay.nodes.insert(u, a.delay_ms);
        }
        let mut loss = ObjectiveWeights {
            label: "path_loss".into(),
            ..Default::default()
        };
        let mut ber = ObjectiveWeights {
            label: "bit_error".into(),
            ..Default::default()
        };
        let mut rate = ObjectiveWeights {
            label: "data_rate".into(),
            ..Default::default()
        };
        for (rank, &e) in self.graph.edges().iter().enumerate() {
            let lb = self.link_budget(rank);
            loss.edges.insert(e, lb.path_loss_ratio);
            ber.edges.insert(e, lb.bit_error);
            rate.edges.insert(e, (-beta * self.edges[rank].data_rate_kbps).exp());
        }
        Ok(vec![delay, loss, ber, rate])
    }

    pub fn encode(&self, scaling: ObjectiveScaling) -> Result<QuboProblem, NetworkError> {
        let objectives = self.build_objectives()?;
        let q = encode_shortest_path(&self.graph, self.source, self.destination, &objectives)?;
        Ok(q.with_scaling(scaling))
    }
}

/// Linear path loss `(4πd/λ)^α`.
pub fn path_loss_ratio(distance_m: f64, wavelength_m: f64, alpha: f64) -> Result<f64, NetworkError> {
    positive("distance", distance_m)?;
    positive("wavelength", wavelength_m)?;
    Ok((4.0 * PI * distance_m / wavelength_m).powf(alpha))
}

pub fn path_loss_db(distance_m: f64, wavelength_m: f64, alpha: f64) -> Result<f64, NetworkError> {
    positive("distance", distance_m)?;
    positive("wavelength", wavelength_m)?;
    Ok(10.0 * alpha * (4.0 * PI * distance_m / wavelength_m).log10())
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

pub fn watts_to_dbm(w: f64) -> f64 {
    mw_to_dbm(w * 1000.0)
}

/// Mean of two noise powers taken in milliwatts, returned in dBm.
pub fn symmetrized_noise_dbm(p_i: f64, p_j: f64) -> f64 {
    mw_to_dbm((dbm_to_mw(p_i) + dbm_to_mw(p_j)) / 2.0)
}

/// Received power over `log2(M)` times noise power, as a plain ratio.
pub fn snr_ratio(
    tx_power_w: f64,
    distance_m: f64,
    params: &NetworkParams,
    noise_dbm: f64,
) -> Result<f64, NetworkError> {
    positive("transmit power", tx_power_w)?;
    if params.modulation_order < 2 {
        return Err(NetworkError::InvalidParams("modulation order below 2".into()));
    }
    let loss = path_loss_ratio(distance_m, params.wavelength_m, params.path_loss_exponent)?;
    let received_mw = tx_power_w * 1000.0 / loss;
    let bits = f64::from(params.modulation_order).log2();
    Ok(received_mw / (bits * dbm_to_mw(noise_dbm)))
}

/// Bit-flip probability `½(1 - √(R/(R+1)))`.
pub fn bit_error(snr: f64) -> Result<f64, NetworkError> {
    if !(snr >= 0.0) {
        return Err(NetworkError::InvalidParams(format!("negative SNR {snr}")));
    }
    if snr.is_infinite() {
        return Ok(0.0);
    }
    Ok(0.5 * (1.0 - (snr / (snr + 1.0)).sqrt()))
}

/// Does `β` make every path's minimum-rate edge outweigh the rest of the
/// path in `Σ e^{-βΓ}`? Edges tied at the minimum count as the bottleneck.
pub fn beta_dominates(beta: f64, path_rates: &[Vec<f64>]) -> bool {
    path_rates.iter().all(|rates| {
        let min = rates.iter().cloned().fold(f64::INFINITY, f64::min);
        let rest: f64 = rates
            .iter()
            .filter(|&&r| r > min)
            .map(|&r| (-beta * (r - min)).exp())
            .sum();
        rest < 1.0
    })
}

fn path_rates(net: &PhysicalNetwork) -> Result<Vec<Vec<f64>>, NetworkError> {
    let paths = simple_paths(&net.graph, net.source, net.destination);
    if paths.is_empty() {
        return Err(NetworkError::NoPath {
            from: net.source,
            to: net.destination,
        });
    }
    Ok(paths
        .iter()
        .map(|p| p.windows(2).map(|w| net.edge(Edge::new(w[0], w[1])).data_rate_kbps).collect())
        .collect())
}

/// Smallest β (to bisection precision) satisfying [`beta_dominates`] over
/// all simple s-d paths, searched from `ln 2 / rate_step` upwards.
pub fn select_beta(net: &PhysicalNetwork) -> Result<f64, NetworkError> {
    let rates = path_rates(net)?;
    let start = LN_2 / net.params.rate_step_kbps;
    if beta_dominates(start, &rates) {
        return Ok(start);
    }
    let mut hi = start;
    while !beta_dominates(hi, &rates) {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if beta_dominates(mid, &rates) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Random network on `topology`: positions uniform in the area, node noise
/// normal in dBm, rates uniform on the step grid `0, step, ..., base`.
/// Routes from the lowest to the highest node id.
pub fn gen_instance(seed: u64, topology: Topology, params: &NetworkParams) -> Result<PhysicalNetwork, NetworkError> {
    params.validate()?;
    let graph = topology.generate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(params.noise_mean_dbm, params.noise_std_dbm)
        .map_err(|e| NetworkError::InvalidParams(e.to_string()))?;
    let nodes: Vec<NodeAttrs> = graph
        .nodes()
        .iter()
        .map(|_| NodeAttrs {
            position_m: (
                rng.random_range(0.0..params.area_m.0),
                rng.random_range(0.0..params.area_m.1),
            ),
            noise_dbm: noise.sample(&mut rng),
            delay_ms: params.delay_ms,
        })
        .collect();
    let steps = (params.base_rate_kbps / params.rate_step_kbps).floor() as u64;
    let edges = graph
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (&nodes[e.0], &nodes[e.1]);
            let dx = a.position_m.0 - b.position_m.0;
            let dy = a.position_m.1 - b.position_m.1;
            EdgeAttrs {
                distance_m: dx.hypot(dy).max(1e-6),
                data_rate_kbps: rng.random_range(0..=steps) as f64 * params.rate_step_kbps,
            }
        })
        .collect();
    let (s, d) = (graph.nodes()[0], graph.max_node_id().unwrap());
    PhysicalNetwork::new(graph, nodes, edges, params.clone(), s, d)
}
