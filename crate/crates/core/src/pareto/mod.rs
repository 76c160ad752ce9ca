//! Classical ground truth and candidate post-processing: path decoding,
//! dominance, exact fronts, projection coordinates and weight grids.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use thiserror::Error;

use crate::graph::{simple_paths, Edge, Graph, NodeId};
use crate::qubo::{Bitstring, QuboError, QuboProblem, ScalarizationWeights, VariableMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParetoError {
    #[error("bitstring {0} does not encode a simple source-destination path")]
    NotAPath(String),
    #[error("path {0:?} is not a simple source-destination path of the graph")]
    BadPath(Vec<NodeId>),
    #[error("objective vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no feasible states")]
    NoFeasibleStates,
    #[error("weight grid needs at least one objective and one division")]
    EmptyGrid,
    #[error(transparent)]
    Qubo(#[from] QuboError),
}

/// All simple paths from `s` to `d` in depth-first order.
pub fn enumerate_paths(g: &Graph, s: NodeId, d: NodeId) -> Vec<Vec<NodeId>> {
    simple_paths(g, s, d)
}

pub fn path_to_bitstring(path: &[NodeId], g: &Graph, vmap: &VariableMap) -> Result<Bitstring, ParetoError> {
    let bad = || ParetoError::BadPath(path.to_vec());
    if path.len() < 2 || path[0] != vmap.source || path[path.len() - 1] != vmap.destination {
        return Err(bad());
    }
    let distinct: BTreeSet<_> = path.iter().collect();
    if distinct.len() != path.len() {
        return Err(bad());
    }
    let mut value = 0u64;
    for &u in &path[1..path.len() - 1] {
        value |= 1 << vmap.node_var(u).ok_or_else(bad)?;
    }
    for w in path.windows(2) {
        if !g.has_edge(w[0], w[1]) {
            return Err(bad());
        }
        value |= 1 << vmap.edge_var(Edge::new(w[0], w[1])).ok_or_else(bad)?;
    }
    Ok(Bitstring::new(value, vmap.len()))
}

/// Inverse of [`path_to_bitstring`]: succeeds only if the set bits are
/// exactly the intermediate nodes and edges of one simple s-d path.
pub fn bitstring_to_path(q: &QuboProblem, x: &Bitstring) -> Result<Vec<NodeId>, ParetoError> {
    if x.len != q.n() {
        return Err(QuboError::LengthMismatch {
            expected: q.n(),
            got: x.len,
        }
        .into());
    }
    let not_path = || ParetoError::NotAPath(x.to_string());
    let vm = &q.vmap;
    let g = &q.graph;
    let selected = |u: NodeId| -> Vec<NodeId> {
        g.neighbors(u)
            .filter(|&v| x.bit(vm.edge_var(Edge::new(u, v)).unwrap()))
            .collect()
    };
    let mut path = vec![vm.source];
    let mut prev = None;
    let mut cur = vm.source;
    while cur != vm.destination {
        let out: Vec<NodeId> = selected(cur).into_iter().filter(|&v| Some(v) != prev).collect();
        let expected_degree = if cur == vm.source { 1 } else { 2 };
        if out.len() != 1 || selected(cur).len() != expected_degree {
            return Err(not_path());
        }
        let next = out[0];
        if path.contains(&next) {
            return Err(not_path());
        }
        if next != vm.destination && !x.bit(vm.node_var(next).unwrap()) {
            return Err(not_path());
        }
        path.push(next);
        prev = Some(cur);
        cur = next;
    }
    if selected(vm.destination).len() != 1 {
        return Err(not_path());
    }
    // No stray bits outside the walked path.
    if path_to_bitstring(&path, g, vm)? != *x {
        return Err(not_path());
    }
    Ok(path)
}

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool, ParetoError> {
    if a.len() != b.len() {
        return Err(ParetoError::LengthMismatch(a.len(), b.len()));
    }
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Greater) | None => return Ok(false),
            Some(Ordering::Less) => strict = true,
            Some(Ordering::Equal) => {}
        }
    }
    Ok(strict)
}

/// Flags the members of `points` that no other member dominates.
/// Identical points are never dominated by each other.
pub fn non_dominated(points: &[Vec<f64>]) -> Vec<bool> {
    points
        .iter()
        .map(|p| !points.iter().any(|o| dominates(o, p).unwrap_or(false)))
        .collect()
}

/// `r_i = w_P · penalty(x) + E^C_i(x)`, so `r · w` is the scalarized cost
/// whenever the weights sum to one.
pub fn projection(q: &QuboProblem, x: &Bitstring) -> Result<Vec<f64>, ParetoError> {
    let pen = q.penalty_weight * q.penalty_value(x)?;
    Ok(q.objective_vector(x)?.into_iter().map(|e| e + pen).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParetoRecord {
    pub bitstring: Bitstring,
    pub objectives: Vec<f64>,
    pub r: Vec<f64>,
    pub feasible: bool,
    pub pareto_optimal: bool,
    pub probability: f64,
}

impl ParetoRecord {
    /// Record with `feasible` decided by path decoding and
    /// `pareto_optimal` left unset.
    pub fn evaluate(q: &QuboProblem, x: Bitstring, probability: f64) -> Result<Self, ParetoError> {
        Ok(ParetoRecord {
            bitstring: x,
            objectives: q.objective_vector(&x)?,
            r: projection(q, &x)?,
            feasible: bitstring_to_path(q, &x).is_ok(),
            pareto_optimal: false,
            probability,
        })
    }
}

/// Every feasible state of a problem, with the exact front flagged.
#[derive(Clone, Debug, PartialEq)]
pub struct Front {
    pub feasible: Vec<ParetoRecord>,
}

impl Front {
    pub fn optimal(&self) -> impl Iterator<Item = &ParetoRecord> {
        self.feasible.iter().filter(|r| r.pareto_optimal)
    }

    pub fn optimal_states(&self) -> Vec<u64> {
        self.optimal().map(|r| r.bitstring.value).collect()
    }

    pub fn contains_optimal(&self, b: u64) -> bool {
        self.optimal().any(|r| r.bitstring.value == b)
    }
}

/// Enumerates feasible states through the path oracle and marks the ones no
/// other feasible state dominates. Records are ordered by state index.
pub fn brute_force_front(q: &QuboProblem) -> Result<Front, ParetoError> {
    let mut states: Vec<Bitstring> = enumerate_paths(&q.graph, q.vmap.source, q.vmap.destination)
        .iter()
        .map(|p| path_to_bitstring(p, &q.graph, &q.vmap))
        .collect::<Result<_, _>>()?;
    if states.is_empty() {
        return Err(ParetoError::NoFeasibleStates);
    }
    states.sort();
    let mut feasible: Vec<ParetoRecord> = states
        .into_iter()
        .map(|x| ParetoRecord::evaluate(q, x, 0.0))
        .collect::<Result<_, _>>()?;
    let points: Vec<Vec<f64>> = feasible.iter().map(|r| r.objectives.clone()).collect();
    for (rec, opt) in feasible.iter_mut().zip(non_dominated(&points)) {
        rec.pareto_optimal = opt;
    }
    Ok(Front { feasible })
}

/// The `k` most probable states, ties broken by ascending index.
pub fn top_k(probabilities: &[f64], k: usize) -> Vec<(u64, f64)> {
    let mut idx: Vec<u64> = (0..probabilities.len() as u64).collect();
    idx.sort_by(|&a, &b| {
        probabilities[b as usize]
            .partial_cmp(&probabilities[a as usize])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx.into_iter().map(|b| (b, probabilities[b as usize])).collect()
}

/// Same ordering rule over sampled counts.
pub fn top_k_counts(counts: &BTreeMap<u64, usize>, shots: usize, k: usize) -> Vec<(u64, f64)> {
    let mut v: Vec<(u64, usize)> = counts.iter().map(|(&b, &c)| (b, c)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v.truncate(k);
    v.into_iter().map(|(b, c)| (b, c as f64 / shots as f64)).collect()
}

/// Union of candidate states from several runs.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSet {
    /// Feasible candidates ordered by state index; `pareto_optimal` is
    /// relative to the union only. `probability` is the largest
    /// probability any run assigned.
    pub records: Vec<ParetoRecord>,
    /// For each record, the indices of the weight vectors that produced it.
    pub origins: Vec<Vec<usize>>,
}

/// Merges per-run candidate lists (run `i` came from weight vector `i`),
/// drops infeasible states and checks dominance within the union.
pub fn aggregate(q: &QuboProblem, runs: &[Vec<(u64, f64)>]) -> Result<CandidateSet, ParetoError> {
    let mut merged: BTreeMap<u64, (f64, Vec<usize>)> = BTreeMap::new();
    for (i, run) in runs.iter().enumerate() {
        for &(b, p) in run {
            let e = merged.entry(b).or_insert((0.0, Vec::new()));
            e.0 = e.0.max(p);
            if !e.1.contains(&i) {
                e.1.push(i);
            }
        }
    }
    let mut records = Vec::new();
    let mut origins = Vec::new();
    for (b, (p, from)) in merged {
        let rec = ParetoRecord::evaluate(q, Bitstring::new(b, q.n()), p)?;
        if rec.feasible {
            records.push(rec);
            origins.push(from);
        }
    }
    let points: Vec<Vec<f64>> = records.iter().map(|r| r.objectives.clone()).collect();
    for (rec, opt) in records.iter_mut().zip(non_dominated(&points)) {
        rec.pareto_optimal = opt;
    }
    Ok(CandidateSet { records, origins })
}

/// Every composition of `divisions` into `l` non-negative parts, divided by
/// `divisions`, in lexicographically descending order of the first weight.
pub fn simplex_grid(l: usize, divisions: usize) -> Result<Vec<ScalarizationWeights>, ParetoError> {
    if l == 0 || divisions == 0 {
        return Err(ParetoError::EmptyGrid);
    }
    fn compose(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            compose(left - k, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    compose(divisions, l, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|c| {
            let w: Vec<f64> = c.iter().map(|&k| k as f64).collect();
            ScalarizationWeights::normalized(&w).map_err(ParetoError::from)
        })
        .collect()
}

/// Uniform samples from the probability simplex, deterministic per seed.
pub fn dirichlet_weights(l: usize, count: usize, seed: u64) -> Result<Vec<ScalarizationWeights>, ParetoError> {
    if l == 0 {
        return Err(ParetoError::EmptyGrid);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let raw: Vec<f64> = (0..l).map(|_| Exp1.sample(&mut rng)).collect();
            ScalarizationWeights::normalized(&raw).map_err(ParetoError::from)
        })
        .collect()
}

/// Number of simple s-d paths over `2^n`, kept as an exact ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeasibleFraction {
    pub paths: u64,
    pub n: usize,
}

impl FeasibleFraction {
    pub fn value(&self) -> f64 {
        self.paths as f64 / 2f64.powi(self.n as i32)
    }
}

impl PartialOrd for FeasibleFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FeasibleFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        // a/2^m vs b/2^n  <=>  a·2^n vs b·2^m
        let lhs = u128::from(self.paths) << other.n;
        let rhs = u128::from(other.paths) << self.n;
        lhs.cmp(&rhs)
    }
}

pub fn feasible_fraction(g: &Graph, s: NodeId, d: NodeId) -> Result<FeasibleFraction, ParetoError> {
    let vmap = VariableMap::new(g, s, d)?;
    assert!(vmap.len() <= 64, "too many variables for an exact ratio");
    Ok(FeasibleFraction {
        paths: enumerate_paths(g, s, d).len() as u64,
        n: vmap.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_connected_graph, Topology};
    use crate::qubo::encode_shortest_path;
    use proptest::prelude::*;

    fn k4() -> QuboProblem {
        let g = Topology::Complete { nodes: 4 }.generate().unwrap();
        encode_shortest_path(&g, 0, 3, &[]).unwrap()
    }

    #[test]
    fn k4_encodings() {
        let q = k4();
        let b = path_to_bitstring(&[0, 3], &q.graph, &q.vmap).unwrap();
        assert_eq!(b.to_string(), "00001000");
        let b = path_to_bitstring(&[0, 1, 3], &q.graph, &q.vmap).unwrap();
        assert_eq!(b.to_string(), "10100010");
        assert_eq!(bitstring_to_path(&q, &b).unwrap(), vec![0, 1, 3]);
        assert!(path_to_bitstring(&[0, 1, 1, 3], &q.graph, &q.vmap).is_err());
        assert!(path_to_bitstring(&[1, 3], &q.graph, &q.vmap).is_err());
    }

    #[test]
    fn decoder_rejects_near_paths() {
        let q = k4();
        for s in ["00000000", "10001000", "00101000", "00100010", "01100010"] {
            assert!(bitstring_to_path(&q, &s.parse().unwrap()).is_err(), "{s}");
        }
    }

    #[test]
    fn dominance() {
        assert!(dominates(&[1.0, 1.0], &[2.0, 2.0]).unwrap());
        assert!(!dominates(&[1.0, 2.0], &[2.0, 1.0]).unwrap());
        assert!(!dominates(&[2.0, 1.0], &[1.0, 2.0]).unwrap());
        assert!(!dominates(&[1.0, 1.0], &[1.0, 1.0]).unwrap());
        assert!(dominates(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn duplicates_stay_on_the_front() {
        let pts = vec![vec![1.0, 2.0], vec![1.0, 2.0], vec![2.0, 3.0]];
        assert_eq!(non_dominated(&pts), vec![true, true, false]);
    }

    #[test]
    fn paths_of_small_graphs() {
        let g = Graph::new(0..2, [(0, 1)]).unwrap();
        assert_eq!(enumerate_paths(&g, 0, 1).len(), 1);
        let g = Topology::Complete { nodes: 4 }.generate().unwrap();
        assert_eq!(enumerate_paths(&g, 0, 3).len(), 5);
    }

    #[test]
    fn top_k_breaks_ties_by_index() {
        let p = [0.1, 0.3, 0.3, 0.05, 0.25];
        assert_eq!(top_k(&p, 3), vec![(1, 0.3), (2, 0.3), (4, 0.25)]);
        assert_eq!(top_k(&p, 10).len(), 5);
        let basis = [0.0, 0.0, 1.0, 0.0];
        assert_eq!(top_k(&basis, 1), vec![(2, 1.0)]);
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(simplex_grid(4, 10).unwrap().len(), 286);
        let g = simplex_grid(2, 1).unwrap();
        assert_eq!(g[0].as_slice(), &[1.0, 0.0]);
        assert_eq!(g[1].as_slice(), &[0.0, 1.0]);
        assert_eq!(simplex_grid(3, 4).unwrap(), simplex_grid(3, 4).unwrap());
        let d = dirichlet_weights(4, 20, 9).unwrap();
        assert_eq!(d, dirichlet_weights(4, 20, 9).unwrap());
        assert!(simplex_grid(0, 3).is_err());
    }

    #[test]
    fn feasible_fractions() {
        let g = Graph::new(0..2, [(0, 1)]).unwrap();
        let f = feasible_fraction(&g, 0, 1).unwrap();
        assert_eq!((f.paths, f.n, f.value()), (1, 1, 0.5));
        let g = Topology::Complete { nodes: 4 }.generate().unwrap();
        let f = feasible_fraction(&g, 0, 3).unwrap();
        assert_eq!((f.paths, f.n), (5, 8));
        let cycles: Vec<FeasibleFraction> = [4, 6, 8, 10]
            .iter()
            .map(|&k| {
                let t = Topology::Cycle { intermediate: k };
                let (s, d) = t.endpoints().unwrap();
                feasible_fraction(&t.generate().unwrap(), s, d).unwrap()
            })
            .collect();
        assert!(cycles.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn aggregate_filters_and_merges() {
        let q = k4();
        let direct = path_to_bitstring(&[0, 3], &q.graph, &q.vmap).unwrap().value;
        let runs = vec![vec![(direct, 0.4), (0, 0.3)], vec![(direct, 0.6)]];
        let c = aggregate(&q, &runs).unwrap();
        assert_eq!(c.records.len(), 1);
        assert_eq!(c.records[0].probability, 0.6);
        assert_eq!(c.origins[0], vec![0, 1]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn path_round_trip(seed in any::<u64>()) {
            let g = random_connected_graph(seed, 2..=8, 24);
            let d = g.max_node_id().unwrap();
            let q = encode_shortest_path(&g, 0, d, &[]).unwrap();
            for p in enumerate_paths(&g, 0, d) {
                let b = path_to_bitstring(&p, &g, &q.vmap).unwrap();
                prop_assert_eq!(bitstring_to_path(&q, &b).unwrap(), p);
                prop_assert!(q.feasibility(&b).unwrap());
            }
        }
    }
}
