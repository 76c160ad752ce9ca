//! Exact statevector QAOA for diagonal cost Hamiltonians.
//!
//! Each layer applies `e^{-iγ H_C}` as a per-basis-state phase and then
//! `e^{-iβ X}` on every qubit.

mod optimize;

pub use optimize::{nelder_mead, Minimum, NelderMeadConfig};

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::qubo::CostPolynomial;

pub const DEFAULT_QUBIT_CAP: usize = 24;

// Below this size rayon overhead outweighs the work.
const PARALLEL_MIN_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QaoaError {
    #[error("{n} qubits exceeds the simulator cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },
    #[error("state has {state} amplitudes but the table has {table} energies")]
    DimensionMismatch { state: usize, table: usize },
    #[error("ground energy is zero; approximation ratio undefined")]
    ZeroGroundEnergy,
    #[error("Pareto front is empty")]
    EmptyFront,
    #[error("shots must be at least 1")]
    NoShots,
    #[error("expected {expected} angles per schedule, got {got}")]
    ScheduleLength { expected: usize, got: usize },
    #[error("ramp needs p >= 1 and δ > 0")]
    BadRamp,
}

/// Cost of every basis state; entry `b` belongs to the state whose bit `i`
/// is variable `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyTable {
    pub n: usize,
    pub energies: Vec<f64>,
}

impl EnergyTable {
    pub fn build(poly: &CostPolynomial) -> Result<Self, QaoaError> {
        Self::build_capped(poly, DEFAULT_QUBIT_CAP)
    }

    pub fn build_capped(poly: &CostPolynomial, cap: usize) -> Result<Self, QaoaError> {
        if poly.n > cap {
            return Err(QaoaError::TooManyQubits { n: poly.n, cap });
        }
        let dim = 1u64 << poly.n;
        let energies = if poly.n >= PARALLEL_MIN_QUBITS {
            (0..dim).into_par_iter().map(|b| poly.evaluate_index(b)).collect()
        } else {
            (0..dim).map(|b| poly.evaluate_index(b)).collect()
        };
        Ok(EnergyTable { n: poly.n, energies })
    }

    pub fn from_energies(energies: Vec<f64>) -> Self {
        assert!(energies.len().is_power_of_two(), "length must be 2^n");
        EnergyTable {
            n: energies.len().trailing_zeros() as usize,
            energies,
        }
    }

    pub fn min(&self) -> f64 {
        self.energies.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.energies.iter().sum::<f64>() / self.energies.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self, QaoaError> {
        if gammas.len() != betas.len() {
            return Err(QaoaError::ScheduleLength {
                expected: gammas.len(),
                got: betas.len(),
            });
        }
        Ok(QaoaParams { gammas, betas })
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    /// Flat layout `[γ_1..γ_p, β_1..β_p]`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_slice(v: &[f64]) -> Self {
        assert!(v.len() % 2 == 0);
        let p = v.len() / 2;
        QaoaParams {
            gammas: v[..p].to_vec(),
            betas: v[p..].to_vec(),
        }
    }
}

/// `γ_i = δ(i - ½)/p`, `β_i = δ(1 - (i - ½)/p)` for `i = 1..p`.
pub fn linear_ramp(p: usize, delta: f64) -> Result<QaoaParams, QaoaError> {
    if p == 0 || !(delta > 0.0) {
        return Err(QaoaError::BadRamp);
    }
    let frac = |i: usize| (i as f64 + 0.5) / p as f64;
    Ok(QaoaParams {
        gammas: (0..p).map(|i| delta * frac(i)).collect(),
        betas: (0..p).map(|i| delta * (1.0 - frac(i))).collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    pub amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn uniform(n: usize) -> Self {
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Statevector {
            amplitudes: vec![a; dim],
        }
    }

    pub fn basis(n: usize, b: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[b] = Complex64::new(1.0, 0.0);
        Statevector { amplitudes }
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn apply_phase(&mut self, gamma: f64, energies: &[f64]) {
        let f = |(a, &e): (&mut Complex64, &f64)| *a *= Complex64::from_polar(1.0, -gamma * e);
        if self.n() >= PARALLEL_MIN_QUBITS {
            self.amplitudes.par_iter_mut().zip(energies.par_iter()).for_each(f);
        } else {
            self.amplitudes.iter_mut().zip(energies).for_each(f);
        }
    }

    fn apply_mixer(&mut self, beta: f64) {
        let (c, s) = (beta.cos(), beta.sin());
        let ms = Complex64::new(0.0, -s);
        let parallel = self.n() >= PARALLEL_MIN_QUBITS;
        for q in 0..self.n() {
            let stride = 1usize << q;
            let rotate = |chunk: &mut [Complex64]| {
                let (lo, hi) = chunk.split_at_mut(stride);
                for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a0, *a1);
                    *a0 = x * c + y * ms;
                    *a1 = x * ms + y * c;
                }
            };
            if parallel {
                self.amplitudes.par_chunks_mut(2 * stride).for_each(rotate);
            } else {
                self.amplitudes.chunks_mut(2 * stride).for_each(rotate);
            }
        }
    }
}

pub fn run_circuit(params: &QaoaParams, table: &EnergyTable) -> Statevector {
    let mut psi = Statevector::uniform(table.n);
    for (&g, &b) in params.gammas.iter().zip(&params.betas) {
        psi.apply_phase(g, &table.energies);
        psi.apply_mixer(b);
    }
    psi
}

pub fn expectation(state: &Statevector, table: &EnergyTable) -> Result<f64, QaoaError> {
    if state.amplitudes.len() != table.energies.len() {
        return Err(QaoaError::DimensionMismatch {
            state: state.amplitudes.len(),
            table: table.energies.len(),
        });
    }
    Ok(state
        .amplitudes
        .iter()
        .zip(&table.energies)
        .map(|(a, e)| a.norm_sqr() * e)
        .sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    pub shots: usize,
    /// Basis-state index to count.
    pub counts: BTreeMap<u64, usize>,
}

impl SampleSet {
    pub fn frequency(&self, b: u64) -> f64 {
        self.counts.get(&b).copied().unwrap_or(0) as f64 / self.shots as f64
    }
}

/// Draws `shots` measurement outcomes, deterministic for a given seed.
pub fn sample(state: &Statevector, shots: usize, seed: u64) -> Result<SampleSet, QaoaError> {
    if shots == 0 {
        return Err(QaoaError::NoShots);
    }
    let mut cdf = Vec::with_capacity(state.amplitudes.len());
    let mut acc = 0.0;
    for a in &state.amplitudes {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.random::<f64>() * acc;
        let mut b = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        // Never land on a zero-probability state through rounding.
        while state.amplitudes[b].norm_sqr() == 0.0 && b > 0 {
            b -= 1;
        }
        *counts.entry(b as u64).or_insert(0) += 1;
    }
    Ok(SampleSet { shots, counts })
}

pub fn approximation_ratio(state: &Statevector, table: &EnergyTable) -> Result<f64, QaoaError> {
    let e_min = table.min();
    if e_min == 0.0 {
        return Err(QaoaError::ZeroGroundEnergy);
    }
    Ok(expectation(state, table)? / e_min)
}

/// Probability mass on the given basis states.
pub fn success_probability(state: &Statevector, front: &[u64]) -> Result<f64, QaoaError> {
    if front.is_empty() {
        return Err(QaoaError::EmptyFront);
    }
    let mut seen = front.to_vec();
    seen.sort_unstable();
    seen.dedup();
    Ok(seen
        .iter()
        .map(|&b| state.amplitudes[b as usize].norm_sqr())
        .sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeConfig {
    /// Evaluation budget per layer; the total is `per_layer * p`.
    pub evaluations_per_layer: usize,
    pub nelder_mead: NelderMeadConfig,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            evaluations_per_layer: 500,
            nelder_mead: NelderMeadConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub params: QaoaParams,
    pub initial_cost: f64,
    pub cost: f64,
    /// Best expectation after each evaluation.
    pub history: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes the exact expectation over all `2p` angles from `init`.
pub fn optimize(table: &EnergyTable, init: &QaoaParams, config: &OptimizeConfig) -> OptimizeResult {
    let cost = |v: &[f64]| {
        let psi = run_circuit(&QaoaParams::from_slice(v), table);
        expectation(&psi, table).expect("matching dimensions")
    };
    let nm = NelderMeadConfig {
        max_evaluations: Some(config.evaluations_per_layer * init.p().max(1)),
        ..config.nelder_mead.clone()
    };
    let x0 = init.to_vec();
    let m = nelder_mead(cost, &x0, &nm);
    OptimizeResult {
        params: QaoaParams::from_slice(&m.x),
        initial_cost: m.history[0],
        cost: m.value,
        history: m.history,
        evaluations: m.evaluations,
        converged: m.converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::FRAC_PI_4;

    fn z_table() -> EnergyTable {
        EnergyTable::from_energies(vec![1.0, -1.0])
    }

    // Dense 2^n x 2^n oracle: builds the mixer as a Kronecker product of
    // single-qubit matrices and multiplies full matrices.
    fn dense_oracle(params: &QaoaParams, energies: &[f64]) -> Vec<Complex64> {
        let dim = energies.len();
        let n = dim.trailing_zeros() as usize;
        let zero = Complex64::new(0.0, 0.0);
        let mut psi = vec![Complex64::new((dim as f64).sqrt().recip(), 0.0); dim];
        let matvec = |m: &Vec<Vec<Complex64>>, v: &Vec<Complex64>| -> Vec<Complex64> {
            (0..dim).map(|r| (0..dim).map(|c| m[r][c] * v[c]).sum()).collect()
        };
        for (&g, &b) in params.gammas.iter().zip(&params.betas) {
            let mut phase = vec![vec![zero; dim]; dim];
            for k in 0..dim {
                phase[k][k] = Complex64::from_polar(1.0, -g * energies[k]);
            }
            let rx = [
                [Complex64::new(b.cos(), 0.0), Complex64::new(0.0, -b.sin())],
                [Complex64::new(0.0, -b.sin()), Complex64::new(b.cos(), 0.0)],
            ];
            let mut mixer = vec![vec![zero; dim]; dim];
            for (r, row) in mixer.iter_mut().enumerate() {
                for (c, cell) in row.iter_mut().enumerate() {
                    *cell = (0..n).fold(Complex64::new(1.0, 0.0), |acc, q| {
                        acc * rx[(r >> q) & 1][(c >> q) & 1]
                    });
                }
            }
            psi = matvec(&mixer, &matvec(&phase, &psi));
        }
        psi
    }

    #[test]
    fn zero_angles_leave_uniform_state() {
        let t = EnergyTable::from_energies(vec![0.0, 1.0, 3.0, -2.0]);
        let params = QaoaParams::new(vec![0.0; 3], vec![0.0; 3]).unwrap();
        let psi = run_circuit(&params, &t);
        assert_eq!(psi, Statevector::uniform(2));
        assert!((expectation(&psi, &t).unwrap() - t.mean()).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_closed_form() {
        // <Z> = sin 2γ sin 2β for energies (+1, -1).
        let t = z_table();
        let psi = run_circuit(&QaoaParams::new(vec![FRAC_PI_4], vec![FRAC_PI_4]).unwrap(), &t);
        assert!((expectation(&psi, &t).unwrap() - 1.0).abs() < 1e-12);
        for i in 0..12 {
            for j in 0..12 {
                let (g, b) = (i as f64 * 0.3 - 1.5, j as f64 * 0.3 - 1.5);
                let psi = run_circuit(&QaoaParams::new(vec![g], vec![b]).unwrap(), &t);
                let want = (2.0 * g).sin() * (2.0 * b).sin();
                assert!((expectation(&psi, &t).unwrap() - want).abs() < 1e-12);
                let oracle = dense_oracle(&QaoaParams::new(vec![g], vec![b]).unwrap(), &t.energies);
                let o: f64 = oracle[0].norm_sqr() - oracle[1].norm_sqr();
                assert!((o - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn optimizer_reaches_ground_state_of_z() {
        let t = z_table();
        let init = QaoaParams::new(vec![0.1], vec![0.1]).unwrap();
        let r = optimize(&t, &init, &OptimizeConfig::default());
        assert!((r.cost + 1.0).abs() < 1e-4, "{}", r.cost);
        assert!(r.cost <= r.initial_cost);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
        // Starting at an optimum cannot make things worse.
        let opt = QaoaParams::new(vec![FRAC_PI_4], vec![-FRAC_PI_4]).unwrap();
        let r = optimize(&t, &opt, &OptimizeConfig::default());
        assert!(r.cost <= -1.0 + 1e-12);
    }

    #[test]
    fn ramp_schedule() {
        let r = linear_ramp(1, 0.7).unwrap();
        assert!((r.gammas[0] - 0.35).abs() < 1e-15 && (r.betas[0] - 0.35).abs() < 1e-15);
        let r = linear_ramp(2, 0.7).unwrap();
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
        assert!(close(&r.gammas, &[0.175, 0.525]));
        assert!(close(&r.betas, &[0.525, 0.175]));
        for p in 1..10 {
            let r = linear_ramp(p, 0.7).unwrap();
            assert!(r.gammas.windows(2).all(|w| w[0] < w[1]));
            assert!(r.betas.windows(2).all(|w| w[0] > w[1]));
        }
        assert!(linear_ramp(0, 0.7).is_err());
        assert!(linear_ramp(2, 0.0).is_err());
    }

    #[test]
    fn metrics_on_simple_states() {
        let t = EnergyTable::from_energies(vec![0.0, -2.0]);
        let u = Statevector::uniform(1);
        assert!((approximation_ratio(&u, &t).unwrap() - 0.5).abs() < 1e-15);
        let g = Statevector::basis(1, 1);
        assert_eq!(approximation_ratio(&g, &t).unwrap(), 1.0);
        assert_eq!(success_probability(&g, &[1]).unwrap(), 1.0);
        assert!(success_probability(&g, &[]).is_err());
        let u3 = Statevector::uniform(3);
        assert!((success_probability(&u3, &[1, 5]).unwrap() - 0.25).abs() < 1e-15);
        let zero = EnergyTable::from_energies(vec![0.0, 1.0]);
        assert_eq!(approximation_ratio(&u, &zero), Err(QaoaError::ZeroGroundEnergy));
        let four = EnergyTable::from_energies(vec![0.0; 4]);
        assert!(expectation(&u, &four).is_err());
    }

    #[test]
    fn basis_state_expectation() {
        let t = EnergyTable::from_energies(vec![3.0, 1.0, 4.0, 1.5]);
        for b in 0..4 {
            assert_eq!(expectation(&Statevector::basis(2, b), &t).unwrap(), t.energies[b]);
        }
    }

    #[test]
    fn sampling() {
        let s = sample(&Statevector::basis(3, 5), 100, 1).unwrap();
        assert_eq!(s.counts.len(), 1);
        assert_eq!(s.counts[&5], 100);
        assert!(sample(&Statevector::basis(3, 5), 0, 1).is_err());

        let shots = 100_000;
        let s = sample(&Statevector::uniform(2), shots, 11).unwrap();
        assert_eq!(s.counts.values().sum::<usize>(), shots);
        let sd = (shots as f64 * 0.25 * 0.75).sqrt();
        for b in 0..4 {
            assert!((s.counts[&b] as f64 - 25_000.0).abs() < 4.0 * sd);
        }
        assert_eq!(s, sample(&Statevector::uniform(2), shots, 11).unwrap());
    }

    #[test]
    fn table_cap() {
        let p = CostPolynomial::zero(30);
        assert_eq!(
            EnergyTable::build(&p).unwrap_err(),
            QaoaError::TooManyQubits { n: 30, cap: 24 }
        );
    }

    proptest! {
        #[test]
        fn matches_dense_oracle(
            n in 1usize..=3,
            p in 1usize..=3,
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let energies: Vec<f64> = (0..1 << n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let angles: Vec<f64> = (0..2 * p).map(|_| rng.random_range(-3.2..3.2)).collect();
            let params = QaoaParams::from_slice(&angles);
            let t = EnergyTable::from_energies(energies);
            let psi = run_circuit(&params, &t);
            let want = dense_oracle(&params, &t.energies);
            for (a, b) in psi.amplitudes.iter().zip(&want) {
                prop_assert!((a - b).norm() < 1e-9);
            }
        }

        #[test]
        fn unitary(n in 1usize..=10, angles in prop::collection::vec(-4.0..4.0f64, 2..=12)) {
            let angles = &angles[..angles.len() / 2 * 2];
            let t = EnergyTable::from_energies((0..1u64 << n).map(|b| (b % 7) as f64 - 3.0).collect());
            let psi = run_circuit(&QaoaParams::from_slice(angles), &t);
            prop_assert!((psi.norm() - 1.0).abs() < 1e-9);
            let e = expectation(&psi, &t).unwrap();
            prop_assert!(e >= t.min() - 1e-9 && e <= t.max() + 1e-9);
        }

        // Integer energies make every γ 2π-periodic; β has period π.
        #[test]
        fn periodicity(g in -3.0..3.0f64, b in -3.0..3.0f64, k in 0usize..3) {
            let t = EnergyTable::from_energies(vec![0.0, 1.0, -2.0, 3.0, 1.0, -1.0, 2.0, 0.0]);
            let tau = std::f64::consts::TAU;
            let base = QaoaParams::new(vec![g, 0.3], vec![b, -0.2]).unwrap();
            let mut shifted = base.clone();
            shifted.gammas[k % 2] += tau;
            shifted.betas[(k + 1) % 2] += std::f64::consts::PI;
            let e0 = expectation(&run_circuit(&base, &t), &t).unwrap();
            let e1 = expectation(&run_circuit(&shifted, &t), &t).unwrap();
            prop_assert!((e0 - e1).abs() < 1e-9);
        }
    }
}
