mod instance;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use paretoroute::experiment::{self, ExperimentError, ScalingConfig, SolveConfig};
use paretoroute::graph::{GraphError, Topology};
use paretoroute::network::{gen_instance, tables, NetworkError, NetworkParams};
use paretoroute::pareto::{bitstring_to_path, brute_force_front, dirichlet_weights, simplex_grid, ParetoError};
use paretoroute::qaoa::{OptimizeConfig, QaoaParams};
use paretoroute::qubo::{ObjectiveScaling, QuboError, QuboProblem, ScalarizationWeights, Variable};
use paretoroute::resources::{self, ResourceError};

use instance::InstanceFile;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("instance file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Parser)]
#[command(name = "paretoroute", version, about = "Multi-objective QAOA routing: encode, simulate, analyse")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance file: a random network on a topology, or a bundled reference instance.
    Generate(GenerateArgs),
    /// Print the variable map, objective terms and penalty polynomial.
    Encode(InstanceArgs),
    /// Resource estimate for the scalarized cost function.
    Estimate(EstimateArgs),
    /// Optimize QAOA for one weight vector; per-state CSV plus a JSON summary.
    Solve(SolveArgs),
    /// Solve over a weight grid and aggregate the candidate states.
    Sweep(SweepArgs),
    /// Exact Pareto front by path enumeration.
    Pareto(ParetoArgs),
    /// Mean and spread of both metrics over random two-objective instances.
    Scaling(ScalingArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    CompleteFour,
    SquareLattice,
    TriangularWeights,
}

#[derive(Args)]
struct GenerateArgs {
    /// Topology such as complete:4, square:3x2, triangular:4x1, cycle:4.
    #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
    topology: Option<Topology>,
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with network parameters; defaults otherwise.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Objective rescaling; max-abs for physical instances and raw otherwise.
    #[arg(long)]
    scaling: Option<ObjectiveScaling>,
    /// Multiplier on the constraint penalty.
    #[arg(long, default_value_t = 1.0)]
    penalty_weight: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Comma-separated scalarization weights; uniform by default.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// 0 reports exact probabilities.
    #[arg(long, default_value_t = 0)]
    shots: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    k: usize,
    /// Linear-ramp slope.
    #[arg(long, default_value_t = 0.7)]
    delta: f64,
    /// Optimizer evaluations per layer.
    #[arg(long, default_value_t = 500)]
    budget: usize,
}

impl RunArgs {
    fn solve_config(&self) -> Result<SolveConfig, CliError> {
        let seed = match (self.shots, self.seed) {
            (0, s) => s.unwrap_or(0),
            (_, Some(s)) => s,
            (_, None) => return Err(CliError::Usage("--seed is required when --shots > 0".into())),
        };
        Ok(SolveConfig {
            p: self.p,
            delta: self.delta,
            k: self.k,
            shots: self.shots,
            seed,
            optimizer: OptimizeConfig {
                evaluations_per_layer: self.budget,
                ..Default::default()
            },
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Comma-separated scalarization weights, summing to one.
    #[arg(long)]
    weights: String,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Simplex lattice with this many divisions per objective.
    #[arg(long, group = "weight_source")]
    grid: Option<usize>,
    /// This many seeded uniform samples from the simplex.
    #[arg(long, group = "weight_source")]
    dirichlet: Option<usize>,
    /// Explicit weight vectors separated by ';'.
    #[arg(long, group = "weight_source")]
    weights: Option<String>,
    #[command(flatten)]
    run: RunArgs,
    /// Worker threads; 0 picks automatically.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct ParetoArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Emit every feasible state, not only the front.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct ScalingArgs {
    /// Comma-separated topologies; the smallest triangular, square and cycle sizes by default.
    #[arg(long, value_delimiter = ',')]
    topologies: Vec<Topology>,
    /// Largest layer count; rows cover 1..=p.
    #[arg(long, default_value_t = 6)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    instances: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0.7)]
    delta: f64,
    #[arg(long, default_value_t = 500)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_weights(s: &str) -> Result<ScalarizationWeights, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad weight list {s:?}: {e}")))?;
    Ok(ScalarizationWeights::new(v)?)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json(path: Option<&Path>, v: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    write_text(path, &s)
}

fn load(args: &InstanceArgs) -> Result<(InstanceFile, QuboProblem), CliError> {
    if !(args.penalty_weight > 0.0 && args.penalty_weight.is_finite()) {
        return Err(CliError::Usage(format!(
            "--penalty-weight must be positive, got {}",
            args.penalty_weight
        )));
    }
    let file = InstanceFile::load(&args.instance)?;
    let q = file.encode(args.scaling)?.with_penalty_weight(args.penalty_weight);
    Ok((file, q))
}

fn params_json(p: &QaoaParams) -> Value {
    json!({ "gammas": p.gammas, "betas": p.betas })
}

fn cmd_generate(a: &GenerateArgs) -> Result<(), CliError> {
    let file = match (a.fixture, a.topology) {
        (Some(Fixture::CompleteFour), _) => InstanceFile::from_network(&tables::complete_four()),
        (Some(Fixture::SquareLattice), _) => InstanceFile::from_network(&tables::square_lattice()),
        (Some(Fixture::TriangularWeights), _) => {
            let (g, objs) = tables::triangular_weights();
            InstanceFile::from_weights(&g, g.nodes()[0], g.max_node_id().expect("non-empty"), &objs)
        }
        (None, Some(t)) => {
            let seed = a
                .seed
                .ok_or_else(|| CliError::Usage("--seed is required with --topology".into()))?;
            let params = match &a.params {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                    serde_json::from_str::<NetworkParams>(&text)?
                }
                None => NetworkParams::default(),
            };
            InstanceFile::from_network(&gen_instance(seed, t, &params)?)
        }
        (None, None) => unreachable!("clap requires one of --topology and --fixture"),
    };
    write_text(a.out.as_deref(), &file.to_json())
}

fn cmd_encode(a: &InstanceArgs) -> Result<(), CliError> {
    let (_, q) = load(a)?;
    let variables: Vec<String> = (0..q.n())
        .map(|i| match q.vmap.variable(i) {
            Variable::Node(u) => format!("node:{u}"),
            Variable::Edge(e) => format!("edge:{}-{}", e.0, e.1),
        })
        .collect();
    let objectives: Vec<Value> = q
        .objectives
        .iter()
        .map(|t| json!({ "label": t.label, "constant": t.constant, "linear": t.linear }))
        .collect();
    let quadratic: Vec<Value> = q
        .penalty
        .quadratic
        .iter()
        .map(|(&(i, j), &c)| json!([i, j, c]))
        .collect();
    let v = json!({
        "n": q.n(),
        "source": q.vmap.source,
        "destination": q.vmap.destination,
        "variables": variables,
        "objectives": objectives,
        "penalty_weight": q.penalty_weight,
        "penalty": {
            "constant": q.penalty.constant,
            "linear": q.penalty.linear,
            "quadratic": quadratic,
        },
    });
    write_json(a.out.as_deref(), &v)
}

fn cmd_estimate(a: &EstimateArgs) -> Result<(), CliError> {
    let (_, q) = load(&a.inst)?;
    let w = match &a.weights {
        Some(s) => parse_weights(s)?,
        None => ScalarizationWeights::uniform(q.num_objectives()),
    };
    let poly = q.scalarize(&w)?;
    let report = resources::estimate(&q, &poly, a.p, a.epsilon)?;
    write_json(a.inst.out.as_deref(), &serde_json::to_value(report)?)
}

fn cmd_solve(a: &SolveArgs) -> Result<(), CliError> {
    let (_, q) = load(&a.inst)?;
    let w = parse_weights(&a.weights)?;
    let cfg = a.run.solve_config()?;
    let front = brute_force_front(&q)?;
    let out = experiment::solve_with_front(&q, &front, &w, &cfg)?;
    let (records, partial) = out.records(&q, &front)?;
    if let Some(path) = &a.inst.out {
        output::write_states(Some(path), q.num_objectives(), &records)?;
    }
    let front_size = front.optimal().count();
    let rows = match (partial, cfg.shots) {
        (false, _) => "all",
        (true, 0) => "top_k",
        (true, _) => "sampled",
    };
    let v = json!({
        "n_qubits": q.n(),
        "weights": w.as_slice(),
        "penalty_weight": q.penalty_weight,
        "p": cfg.p,
        "delta": cfg.delta,
        "shots": cfg.shots,
        "seed": cfg.seed,
        "k": cfg.k,
        "evaluations": out.evaluations,
        "converged": out.converged,
        "initial_params": params_json(&out.initial_params),
        "params": params_json(&out.params),
        "initial_cost": out.history[0],
        "cost": out.expectation,
        "ground_energy": out.ground_energy,
        "approximation_ratio": out.approximation_ratio,
        "success_probability": out.success_probability,
        "sampled_success_probability": out.sampled_success,
        "pareto_front_size": front_size,
        "random_baseline": front_size as f64 / 2f64.powi(q.n() as i32),
        "csv_rows": rows,
        "csv_row_count": records.len(),
        "history": out.history,
    });
    write_json(None, &v)
}

fn sweep_weights(a: &SweepArgs, l: usize) -> Result<Vec<ScalarizationWeights>, CliError> {
    match (a.grid, a.dirichlet, &a.weights) {
        (Some(m), _, _) => Ok(simplex_grid(l, m)?),
        (_, Some(count), _) => {
            let seed = a
                .run
                .seed
                .ok_or_else(|| CliError::Usage("--seed is required with --dirichlet".into()))?;
            Ok(dirichlet_weights(l, count, seed)?)
        }
        (_, _, Some(list)) => list.split(';').map(parse_weights).collect(),
        _ => Err(CliError::Usage("one of --grid, --dirichlet or --weights is required".into())),
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let (_, q) = load(&a.inst)?;
    let weights = sweep_weights(a, q.num_objectives())?;
    let cfg = a.run.solve_config()?;
    let front = brute_force_front(&q)?;
    let sweep = experiment::sweep_and_aggregate(&q, &weights, &cfg, a.workers)?;
    let c = &sweep.candidates;
    let exact: Vec<bool> = c.records.iter().map(|r| front.contains_optimal(r.bitstring.value)).collect();
    if let Some(path) = &a.inst.out {
        output::write_candidates(Some(path), q.num_objectives(), &c.records, &exact, &c.origins)?;
    }
    let union_front: Vec<u64> = c.records.iter().filter(|r| r.pareto_optimal).map(|r| r.bitstring.value).collect();
    let runs: Vec<Value> = sweep
        .runs
        .iter()
        .map(|r| {
            json!({
                "weights": r.weights.as_slice(),
                "approximation_ratio": r.approximation_ratio,
                "success_probability": r.success_probability,
                "evaluations": r.evaluations,
            })
        })
        .collect();
    let v = json!({
        "n_qubits": q.n(),
        "weight_vectors": weights.len(),
        "p": cfg.p,
        "candidates": c.records.len(),
        "union_front_size": union_front.len(),
        "union_front_within_exact_front": union_front.iter().all(|&b| front.contains_optimal(b)),
        "exact_front_size": front.optimal().count(),
        "exact_front_recovered": front.optimal_states().iter().filter(|b| union_front.contains(b)).count(),
        "runs": runs,
    });
    write_json(None, &v)
}

fn cmd_pareto(a: &ParetoArgs) -> Result<(), CliError> {
    let (_, q) = load(&a.inst)?;
    let front = brute_force_front(&q)?;
    let rows: Vec<_> = front
        .feasible
        .iter()
        .filter(|r| a.all || r.pareto_optimal)
        .map(|r| {
            let path = bitstring_to_path(&q, &r.bitstring)?;
            let path = path.iter().map(|u| u.to_string()).collect::<Vec<_>>().join("-");
            Ok((r.clone(), path))
        })
        .collect::<Result<_, CliError>>()?;
    output::write_front(a.inst.out.as_deref(), q.num_objectives(), &rows)
}

fn cmd_scaling(a: &ScalingArgs) -> Result<(), CliError> {
    let mut cfg = ScalingConfig::smallest_sizes(a.seed);
    if !a.topologies.is_empty() {
        cfg.topologies = a.topologies.clone();
    }
    cfg.layers = (1..=a.p).collect();
    cfg.instances = a.instances;
    cfg.delta = a.delta;
    cfg.optimizer.evaluations_per_layer = a.budget;
    let rows = experiment::scaling(&cfg, a.workers)?;
    output::write_scaling(a.out.as_deref(), &rows)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Pareto(a) => cmd_pareto(a),
        Command::Scaling(a) => cmd_scaling(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn weight_parsing() {
        assert_eq!(parse_weights("0.25,0.25,0.25,0.25").unwrap().as_slice(), &[0.25; 4]);
        assert!(parse_weights("0.5,0.6").is_err());
        assert!(parse_weights("a,b").is_err());
    }

    #[test]
    fn seed_required_for_shots() {
        let run = RunArgs {
            p: 1,
            shots: 10,
            seed: None,
            k: 5,
            delta: 0.7,
            budget: 10,
        };
        assert!(run.solve_config().is_err());
        let run = RunArgs { shots: 0, ..run };
        assert_eq!(run.solve_config().unwrap().seed, 0);
    }
}
