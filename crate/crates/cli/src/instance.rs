//! JSON instance files: a physical network or explicit objective weights.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use paretoroute::graph::{Edge, Graph, NodeId};
use paretoroute::network::{EdgeAttrs, NetworkParams, NodeAttrs, PhysicalNetwork};
use paretoroute::qubo::{encode_shortest_path, ObjectiveScaling, ObjectiveWeights, QuboProblem};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceFile {
    Physical(PhysicalInstance),
    RawWeights(RawInstance),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalInstance {
    pub params: NetworkParams,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    pub source: NodeId,
    pub destination: NodeId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: NodeId,
    pub x_m: f64,
    pub y_m: f64,
    pub noise_dbm: f64,
    pub delay_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: NodeId,
    pub v: NodeId,
    /// Taken from the coordinates when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_m: Option<f64>,
    pub data_rate_kbps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<(NodeId, NodeId)>,
    pub source: NodeId,
    pub destination: NodeId,
    pub objectives: Vec<RawObjective>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawObjective {
    pub label: String,
    #[serde(default)]
    pub nodes: Vec<NodeWeight>,
    #[serde(default)]
    pub edges: Vec<EdgeWeight>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeWeight {
    pub id: NodeId,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeWeight {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: f64,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn default_scaling(&self) -> ObjectiveScaling {
        match self {
            InstanceFile::Physical(_) => ObjectiveScaling::MaxAbs,
            InstanceFile::RawWeights(_) => ObjectiveScaling::Raw,
        }
    }

    /// The routing problem; `scaling` defaults per instance kind.
    pub fn encode(&self, scaling: Option<ObjectiveScaling>) -> Result<QuboProblem, CliError> {
        let scaling = scaling.unwrap_or(self.default_scaling());
        match self {
            InstanceFile::Physical(p) => Ok(p.network()?.encode(scaling)?),
            InstanceFile::RawWeights(r) => Ok(r.encode()?.with_scaling(scaling)),
        }
    }

    pub fn from_network(net: &PhysicalNetwork) -> Self {
        let nodes = net
            .graph
            .nodes()
            .iter()
            .zip(&net.nodes)
            .map(|(&id, a)| NodeRecord {
                id,
                x_m: a.position_m.0,
                y_m: a.position_m.1,
                noise_dbm: a.noise_dbm,
                delay_ms: a.delay_ms,
            })
            .collect();
        let edges = net
            .graph
            .edges()
            .iter()
            .zip(&net.edges)
            .map(|(e, a)| EdgeRecord {
                u: e.0,
                v: e.1,
                distance_m: Some(a.distance_m),
                data_rate_kbps: a.data_rate_kbps,
            })
            .collect();
        InstanceFile::Physical(PhysicalInstance {
            params: net.params.clone(),
            nodes,
            edges,
            source: net.source,
            destination: net.destination,
        })
    }

    pub fn from_weights(g: &Graph, source: NodeId, destination: NodeId, objectives: &[ObjectiveWeights]) -> Self {
        InstanceFile::RawWeights(RawInstance {
            nodes: g.nodes().to_vec(),
            edges: g.edges().iter().map(|e| (e.0, e.1)).collect(),
            source,
            destination,
            objectives: objectives
                .iter()
                .map(|o| RawObjective {
                    label: o.label.clone(),
                    nodes: o.nodes.iter().map(|(&id, &weight)| NodeWeight { id, weight }).collect(),
                    edges: o
                        .edges
                        .iter()
                        .map(|(e, &weight)| EdgeWeight { u: e.0, v: e.1, weight })
                        .collect(),
                })
                .collect(),
        })
    }
}

impl PhysicalInstance {
    pub fn network(&self) -> Result<PhysicalNetwork, CliError> {
        let graph = Graph::new(self.nodes.iter().map(|n| n.id), self.edges.iter().map(|e| (e.u, e.v)))?;
        let by_id: BTreeMap<NodeId, &NodeRecord> = self.nodes.iter().map(|n| (n.id, n)).collect();
        let nodes = graph
            .nodes()
            .iter()
            .map(|u| {
                let n = by_id[u];
                NodeAttrs {
                    position_m: (n.x_m, n.y_m),
                    noise_dbm: n.noise_dbm,
                    delay_ms: n.delay_ms,
                }
            })
            .collect();
        let mut edges = vec![None; graph.edge_count()];
        for e in &self.edges {
            let rank = graph.edge_rank(e.u, e.v).expect("edge was added");
            let distance_m = e.distance_m.unwrap_or_else(|| {
                let (a, b) = (by_id[&e.u], by_id[&e.v]);
                (a.x_m - b.x_m).hypot(a.y_m - b.y_m)
            });
            edges[rank] = Some(EdgeAttrs {
                distance_m,
                data_rate_kbps: e.data_rate_kbps,
            });
        }
        let edges = edges.into_iter().map(|e| e.expect("every rank filled")).collect();
        Ok(PhysicalNetwork::new(
            graph,
            nodes,
            edges,
            self.params.clone(),
            self.source,
            self.destination,
        )?)
    }
}

impl RawInstance {
    pub fn graph(&self) -> Result<Graph, CliError> {
        Ok(Graph::new(self.nodes.iter().copied(), self.edges.iter().copied())?)
    }

    pub fn objectives(&self) -> Vec<ObjectiveWeights> {
        self.objectives
            .iter()
            .map(|o| ObjectiveWeights {
                label: o.label.clone(),
                nodes: o.nodes.iter().map(|n| (n.id, n.weight)).collect(),
                edges: o.edges.iter().map(|e| (Edge::new(e.u, e.v), e.weight)).collect(),
            })
            .collect()
    }

    pub fn encode(&self) -> Result<QuboProblem, CliError> {
        Ok(encode_shortest_path(
            &self.graph()?,
            self.source,
            self.destination,
            &self.objectives(),
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use paretoroute::network::tables;

    #[test]
    fn physical_round_trip() {
        let net = tables::complete_four();
        let file = InstanceFile::from_network(&net);
        let back = InstanceFile::parse(&file.to_json()).unwrap();
        assert_eq!(back, file);
        match back {
            InstanceFile::Physical(p) => assert_eq!(p.network().unwrap(), net),
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn raw_round_trip() {
        let (g, objs) = tables::triangular_weights();
        let file = InstanceFile::from_weights(&g, 0, 5, &objs);
        let back = InstanceFile::parse(&file.to_json()).unwrap();
        assert_eq!(back, file);
        let q = back.encode(None).unwrap();
        assert_eq!(q.n(), 13);
        assert_eq!(q.num_objectives(), 4);
    }

    #[test]
    fn distance_defaults_to_coordinates() {
        let text = r#"{"kind":"physical","params":{"area_m":[10,10],"delay_ms":1,"path_loss_exponent":2,
            "tx_power_w":1,"wavelength_m":1,"modulation_order":4,"noise_mean_dbm":-90,"noise_std_dbm":1,
            "base_rate_kbps":100,"rate_step_kbps":10},
            "nodes":[{"id":0,"x_m":0,"y_m":0,"noise_dbm":-90,"delay_ms":1},
                     {"id":1,"x_m":3,"y_m":4,"noise_dbm":-90,"delay_ms":1}],
            "edges":[{"u":1,"v":0,"data_rate_kbps":50}],"source":0,"destination":1}"#;
        let InstanceFile::Physical(p) = InstanceFile::parse(text).unwrap() else {
            panic!("wrong kind")
        };
        assert_eq!(p.network().unwrap().edges[0].distance_m, 5.0);
    }

    #[test]
    fn unknown_fields_rejected() {
        let (g, objs) = tables::triangular_weights();
        let json = InstanceFile::from_weights(&g, 0, 5, &objs).to_json();
        let extra = json.replacen("\"source\"", "\"colour\": 1, \"source\"", 1);
        assert!(InstanceFile::parse(&extra).is_err());
        let nested = json.replacen("\"weight\"", "\"scale\": 2, \"weight\"", 1);
        assert!(InstanceFile::parse(&nested).is_err());
        assert!(InstanceFile::parse(r#"{"kind":"other"}"#).is_err());
    }

    #[test]
    fn invalid_graphs_rejected() {
        let (g, objs) = tables::triangular_weights();
        let InstanceFile::RawWeights(mut r) = InstanceFile::from_weights(&g, 0, 5, &objs) else {
            unreachable!()
        };
        r.edges.push((0, 42));
        assert!(r.encode().is_err());
        r.edges.pop();
        r.destination = 0;
        assert!(r.encode().is_err());
    }
}
