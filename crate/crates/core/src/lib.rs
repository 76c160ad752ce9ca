pub mod experiment;
pub mod graph;
pub mod network;
pub mod pareto;
pub mod qaoa;
pub mod qubo;
pub mod resources;
