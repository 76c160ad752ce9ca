//! Seeded end-to-end runs: single solves, weight sweeps and the scaling
//! protocol over random two-objective instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId, Topology};
use crate::pareto::{self, brute_force_front, CandidateSet, Front, ParetoError, ParetoRecord};
use crate::qaoa::{self, EnergyTable, OptimizeConfig, QaoaError, QaoaParams, SampleSet};
use crate::qubo::{encode_shortest_path, Bitstring, ObjectiveWeights, QuboError, QuboProblem, ScalarizationWeights};

/// Above this many qubits per-state output is limited to observed states.
pub const FULL_OUTPUT_MAX_QUBITS: usize = 16;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error(transparent)]
    Qaoa(#[from] QaoaError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error("{0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    pub p: usize,
    /// Linear-ramp slope.
    pub delta: f64,
    /// Candidate-set size.
    pub k: usize,
    /// 0 selects exact probabilities; otherwise this many samples are drawn
    /// from the optimized state.
    pub shots: usize,
    pub seed: u64,
    pub optimizer: OptimizeConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            p: 1,
            delta: 0.7,
            k: 100,
            shots: 0,
            seed: 0,
            optimizer: OptimizeConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub weights: ScalarizationWeights,
    pub initial_params: QaoaParams,
    pub params: QaoaParams,
    /// Best exact expectation after each evaluation.
    pub history: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
    pub expectation: f64,
    pub ground_energy: f64,
    /// `None` when the ground energy is zero.
    pub approximation_ratio: Option<f64>,
    /// Exact mass on the Pareto-optimal states.
    pub success_probability: f64,
    /// Sampled frequency of the Pareto-optimal states, when shots > 0.
    pub sampled_success: Option<f64>,
    pub probabilities: Vec<f64>,
    pub samples: Option<SampleSet>,
    /// The `k` most probable states (or most frequent when sampling).
    pub candidates: Vec<(u64, f64)>,
}

impl SolveOutcome {
    /// Probability reported for state `b`: its sample frequency in shot
    /// mode, otherwise the exact value.
    pub fn reported_probability(&self, b: u64) -> f64 {
        match &self.samples {
            Some(s) => s.frequency(b),
            None => self.probabilities[b as usize],
        }
    }

    /// One record per basis state, or only observed states (samples, else
    /// candidates) above [`FULL_OUTPUT_MAX_QUBITS`]. The boolean is true when
    /// the rows are such a subset.
    pub fn records(&self, q: &QuboProblem, front: &Front) -> Result<(Vec<ParetoRecord>, bool), ExperimentError> {
        let n = q.n();
        let (states, partial): (Vec<u64>, bool) = if n <= FULL_OUTPUT_MAX_QUBITS {
            ((0..1u64 << n).collect(), false)
        } else if let Some(s) = &self.samples {
            (s.counts.keys().copied().collect(), true)
        } else {
            let mut v: Vec<u64> = self.candidates.iter().map(|c| c.0).collect();
            v.sort_unstable();
            (v, true)
        };
        let mut out = Vec::with_capacity(states.len());
        for b in states {
            let mut rec = ParetoRecord::evaluate(q, Bitstring::new(b, n), self.reported_probability(b))?;
            rec.pareto_optimal = front.contains_optimal(b);
            out.push(rec);
        }
        Ok((out, partial))
    }
}

/// Optimizes QAOA on `q` scalarized by `w` and scores the result against
/// the exact front.
pub fn solve(q: &QuboProblem, w: &ScalarizationWeights, cfg: &SolveConfig) -> Result<SolveOutcome, ExperimentError> {
    let front = brute_force_front(q)?;
    solve_with_front(q, &front, w, cfg)
}

pub fn solve_with_front(
    q: &QuboProblem,
    front: &Front,
    w: &ScalarizationWeights,
    cfg: &SolveConfig,
) -> Result<SolveOutcome, ExperimentError> {
    if cfg.k == 0 {
        return Err(ExperimentError::Config("k must be at least 1".into()));
    }
    let poly = q.scalarize(w)?;
    let table = EnergyTable::build(&poly)?;
    let init = qaoa::linear_ramp(cfg.p, cfg.delta)?;
    let opt = qaoa::optimize(&table, &init, &cfg.optimizer);
    let state = qaoa::run_circuit(&opt.params, &table);
    let optimal = front.optimal_states();
    let expectation = qaoa::expectation(&state, &table)?;
    let approximation_ratio = match qaoa::approximation_ratio(&state, &table) {
        Ok(r) => Some(r),
        Err(QaoaError::ZeroGroundEnergy) => None,
        Err(e) => return Err(e.into()),
    };
    let success_probability = qaoa::success_probability(&state, &optimal)?;
    let probabilities = state.probabilities();
    let (samples, sampled_success, candidates) = if cfg.shots > 0 {
        let s = qaoa::sample(&state, cfg.shots, cfg.seed)?;
        let hit = optimal.iter().map(|&b| s.frequency(b)).sum();
        let c = pareto::top_k_counts(&s.counts, s.shots, cfg.k);
        (Some(s), Some(hit), c)
    } else {
        (None, None, pareto::top_k(&probabilities, cfg.k))
    };
    Ok(SolveOutcome {
        weights: w.clone(),
        initial_params: init,
        params: opt.params,
        history: opt.history,
        evaluations: opt.evaluations,
        converged: opt.converged,
        expectation,
        ground_energy: table.min(),
        approximation_ratio,
        success_probability,
        sampled_success,
        probabilities,
        samples,
        candidates,
    })
}

pub struct SweepOutcome {
    pub runs: Vec<SolveOutcome>,
    pub candidates: CandidateSet,
}

/// Mixes a run index into a base seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.random()
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, ExperimentError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        b = b.num_threads(workers);
    }
    b.build().map_err(|e| ExperimentError::Pool(e.to_string()))
}

/// One solve per weight vector (run `i` seeded with `derive_seed(seed, i)`),
/// then the union of candidate sets with dominance checked inside it.
/// `workers = 0` lets the pool pick its size.
pub fn sweep_and_aggregate(
    q: &QuboProblem,
    weights: &[ScalarizationWeights],
    cfg: &SolveConfig,
    workers: usize,
) -> Result<SweepOutcome, ExperimentError> {
    let front = brute_force_front(q)?;
    let runs: Vec<SolveOutcome> = pool(workers)?.install(|| {
        weights
            .par_iter()
            .enumerate()
            .map(|(i, w)| {
                let c = SolveConfig {
                    seed: derive_seed(cfg.seed, i as u64),
                    ..cfg.clone()
                };
                solve_with_front(q, &front, w, &c)
            })
            .collect::<Result<_, _>>()
    })?;
    let lists: Vec<Vec<(u64, f64)>> = runs.iter().map(|r| r.candidates.clone()).collect();
    let candidates = pareto::aggregate(q, &lists)?;
    Ok(SweepOutcome { runs, candidates })
}

/// Two objectives with every node and edge weight uniform in `[-1, 1]`.
pub fn random_two_objective(g: &Graph, s: NodeId, d: NodeId, seed: u64) -> Result<QuboProblem, ExperimentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objectives: Vec<ObjectiveWeights> = (1..=2)
        .map(|k| ObjectiveWeights {
            label: format!("obj_{k}"),
            nodes: g.nodes().iter().map(|&u| (u, rng.random_range(-1.0..=1.0))).collect(),
            edges: g.edges().iter().map(|&e| (e, rng.random_range(-1.0..=1.0))).collect(),
        })
        .collect();
    Ok(encode_shortest_path(g, s, d, &objectives)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingConfig {
    pub topologies: Vec<Topology>,
    pub layers: Vec<usize>,
    pub instances: usize,
    pub seed: u64,
    pub delta: f64,
    pub optimizer: OptimizeConfig,
}

impl ScalingConfig {
    /// The smallest triangular, square and cycle sizes, 10 instances each,
    /// p = 1..6.
    pub fn smallest_sizes(seed: u64) -> Self {
        ScalingConfig {
            topologies: vec![
                Topology::TriangularLattice { rows: 2, cols: 1 },
                Topology::TriangularLattice { rows: 3, cols: 1 },
                Topology::SquareLattice { rows: 2, cols: 2 },
                Topology::SquareLattice { rows: 3, cols: 2 },
                Topology::Cycle { intermediate: 2 },
                Topology::Cycle { intermediate: 3 },
            ],
            layers: (1..=6).collect(),
            instances: 10,
            seed,
            delta: 0.7,
            optimizer: OptimizeConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub family: String,
    pub size: String,
    pub n_qubits: usize,
    pub p: usize,
    pub instances: usize,
    pub approximation_ratio_mean: f64,
    pub approximation_ratio_std: f64,
    pub success_probability_mean: f64,
    pub success_probability_std: f64,
}

/// Sample mean and standard deviation (`n - 1` denominator, 0 for one value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Instance `i` of topology `t` (position `ti` in the config) is seeded with
/// `derive_seed(seed, ti * 2^32 + i)` and reused for every p. Rows follow the
/// topology order, then p.
pub fn scaling(cfg: &ScalingConfig, workers: usize) -> Result<Vec<ScalingRow>, ExperimentError> {
    if cfg.instances == 0 || cfg.layers.is_empty() || cfg.topologies.is_empty() {
        return Err(ExperimentError::Config("scaling needs instances, layers and topologies".into()));
    }
    let mut problems = Vec::new();
    for (ti, t) in cfg.topologies.iter().enumerate() {
        let g = t.generate()?;
        let (s, d) = t.endpoints()?;
        let n = crate::resources::qubit_count(&g);
        if n > qaoa::DEFAULT_QUBIT_CAP {
            return Err(QaoaError::TooManyQubits {
                n,
                cap: qaoa::DEFAULT_QUBIT_CAP,
            }
            .into());
        }
        for i in 0..cfg.instances {
            let seed = derive_seed(cfg.seed, ((ti as u64) << 32) | i as u64);
            let q = random_two_objective(&g, s, d, seed)?;
            let front = brute_force_front(&q)?;
            problems.push((ti, q, front));
        }
    }
    let tasks: Vec<(usize, usize)> = (0..problems.len())
        .flat_map(|j| cfg.layers.iter().map(move |&p| (j, p)))
        .collect();
    let w = ScalarizationWeights::uniform(2);
    let metrics: Vec<(f64, f64)> = pool(workers)?.install(|| {
        tasks
            .par_iter()
            .map(|&(j, p)| {
                let (_, q, front) = &problems[j];
                let sc = SolveConfig {
                    p,
                    delta: cfg.delta,
                    k: 1,
                    shots: 0,
                    seed: 0,
                    optimizer: cfg.optimizer.clone(),
                };
                let out = solve_with_front(q, front, &w, &sc)?;
                let ratio = out.approximation_ratio.ok_or(QaoaError::ZeroGroundEnergy)?;
                Ok((ratio, out.success_probability))
            })
            .collect::<Result<_, ExperimentError>>()
    })?;

    let mut rows = Vec::new();
    for (ti, t) in cfg.topologies.iter().enumerate() {
        for (li, &p) in cfg.layers.iter().enumerate() {
            let picked: Vec<(f64, f64)> = tasks
                .iter()
                .zip(&metrics)
                .filter(|((j, tp), _)| problems[*j].0 == ti && *tp == p)
                .map(|(_, &m)| m)
                .collect();
            debug_assert_eq!(picked.len(), cfg.instances, "layer index {li}");
            let ratios: Vec<f64> = picked.iter().map(|m| m.0).collect();
            let succ: Vec<f64> = picked.iter().map(|m| m.1).collect();
            let (rm, rs) = mean_std(&ratios);
            let (sm, ss) = mean_std(&succ);
            rows.push(ScalingRow {
                family: t.family_name().to_string(),
                size: t.size_label(),
                n_qubits: problems.iter().find(|x| x.0 == ti).unwrap().1.n(),
                p,
                instances: cfg.instances,
                approximation_ratio_mean: rm,
                approximation_ratio_std: rs,
                success_probability_mean: sm,
                success_probability_std: ss,
            });
        }
    }
    Ok(rows)
}
