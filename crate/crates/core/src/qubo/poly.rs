use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::QuboError;
use crate::graph::Graph;

/// Assignment of `len` binary variables packed into an integer; variable `i`
/// is bit `i`. Printed and parsed with variable 0 leftmost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    pub value: u64,
    pub len: usize,
}

impl Bitstring {
    pub fn new(value: u64, len: usize) -> Self {
        assert!(len <= 64, "at most 64 variables");
        debug_assert!(len == 64 || value >> len == 0);
        Bitstring { value, len }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let value = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        Bitstring::new(value, bits.len())
    }

    pub fn bit(&self, i: usize) -> bool {
        (self.value >> i) & 1 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.bit(i))
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = QuboError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > 64 {
            return Err(QuboError::BadBitstring(s.to_string()));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(QuboError::BadBitstring(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Bitstring::from_bits(&bits))
    }
}

/// Quadratic pseudo-boolean polynomial `c + Σ a_i x_i + Σ_{i<j} b_ij x_i x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CostPolynomial {
    pub n: usize,
    pub constant: f64,
    pub linear: Vec<f64>,
    /// Keys are `(i, j)` with `i < j`.
    pub quadratic: BTreeMap<(usize, usize), f64>,
}

impl CostPolynomial {
    pub fn zero(n: usize) -> Self {
        CostPolynomial {
            n,
            constant: 0.0,
            linear: vec![0.0; n],
            quadratic: BTreeMap::new(),
        }
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) {
        assert!(i != j, "x_i^2 = x_i belongs in the linear part");
        *self.quadratic.entry((i.min(j), i.max(j))).or_insert(0.0) += c;
    }

    /// Adds `(c + Σ a_k x_k)^2`, expanded with `x^2 = x`.
    pub fn add_square(&mut self, c: f64, terms: &[(usize, f64)]) {
        self.constant += c * c;
        for (k, &(i, a)) in terms.iter().enumerate() {
            self.linear[i] += 2.0 * c * a + a * a;
            for &(j, b) in &terms[k + 1..] {
                self.add_quadratic(i, j, 2.0 * a * b);
            }
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &CostPolynomial, factor: f64) {
        assert_eq!(self.n, other.n);
        self.constant += factor * other.constant;
        for (a, b) in self.linear.iter_mut().zip(&other.linear) {
            *a += factor * b;
        }
        for (&(i, j), &b) in &other.quadratic {
            *self.quadratic.entry((i, j)).or_insert(0.0) += factor * b;
        }
    }

    /// Drops quadratic entries that are exactly zero.
    pub fn prune(&mut self) {
        self.quadratic.retain(|_, c| *c != 0.0);
    }

    pub fn evaluate(&self, x: &Bitstring) -> Result<f64, QuboError> {
        if x.len != self.n {
            return Err(QuboError::LengthMismatch {
                expected: self.n,
                got: x.len,
            });
        }
        Ok(self.evaluate_index(x.value))
    }

    /// Evaluates on the basis state whose bit `i` is `x_i`.
    pub fn evaluate_index(&self, b: u64) -> f64 {
        let mut e = self.constant;
        for (i, &a) in self.linear.iter().enumerate() {
            if (b >> i) & 1 == 1 {
                e += a;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if (b >> i) & (b >> j) & 1 == 1 {
                e += c;
            }
        }
        e
    }

    pub fn nonzero_linear(&self) -> usize {
        self.linear.iter().filter(|&&a| a != 0.0).count()
    }

    pub fn nonzero_quadratic(&self) -> usize {
        self.quadratic.values().filter(|&&c| c != 0.0).count()
    }

    /// Interaction graph: one node per variable, one edge per nonzero coupling.
    pub fn quadratic_graph(&self) -> Graph {
        let edges = self
            .quadratic
            .iter()
            .filter(|(_, &c)| c != 0.0)
            .map(|(&(i, j), _)| (i, j));
        Graph::new(0..self.n, edges).expect("couplings form a simple graph")
    }

    /// Spin form under `x_i = (1 + s_i) / 2`.
    pub fn to_ising(&self) -> Hamiltonian {
        let mut h = Hamiltonian {
            n: self.n,
            constant: self.constant,
            fields: vec![0.0; self.n],
            couplings: BTreeMap::new(),
        };
        for (i, &a) in self.linear.iter().enumerate() {
            h.constant += 0.5 * a;
            h.fields[i] += 0.5 * a;
        }
        for (&(i, j), &c) in &self.quadratic {
            h.constant += 0.25 * c;
            h.fields[i] += 0.25 * c;
            h.fields[j] += 0.25 * c;
            *h.couplings.entry((i, j)).or_insert(0.0) += 0.25 * c;
        }
        h
    }
}

/// Diagonal Ising Hamiltonian `c + Σ h_i Z_i + Σ_{i<j} J_ij Z_i Z_j`, where
/// the spin of variable `i` is `s_i = 2 x_i - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    pub n: usize,
    pub constant: f64,
    pub fields: Vec<f64>,
    pub couplings: BTreeMap<(usize, usize), f64>,
}

impl Hamiltonian {
    pub fn evaluate_index(&self, b: u64) -> f64 {
        let spin = |i: usize| if (b >> i) & 1 == 1 { 1.0 } else { -1.0 };
        let mut e = self.constant;
        for (i, &h) in self.fields.iter().enumerate() {
            e += h * spin(i);
        }
        for (&(i, j), &c) in &self.couplings {
            e += c * spin(i) * spin(j);
        }
        e
    }

    pub fn evaluate(&self, x: &Bitstring) -> Result<f64, QuboError> {
        if x.len != self.n {
            return Err(QuboError::LengthMismatch {
                expected: self.n,
                got: x.len,
            });
        }
        Ok(self.evaluate_index(x.value))
    }

    /// Nonzero Pauli terms `(Z, ZZ)`, excluding the identity.
    pub fn pauli_term_counts(&self) -> (usize, usize) {
        (
            self.fields.iter().filter(|&&h| h != 0.0).count(),
            self.couplings.values().filter(|&&c| c != 0.0).count(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bitstring_prints_variable_zero_first() {
        let b = Bitstring::new(0b0001_0000, 8);
        assert_eq!(b.to_string(), "00001000");
        assert_eq!("00001000".parse::<Bitstring>().unwrap(), b);
        assert_eq!("10100010".parse::<Bitstring>().unwrap().value, 0b0100_0101);
        assert!("10x".parse::<Bitstring>().is_err());
    }

    #[test]
    fn single_variable_ising() {
        let mut p = CostPolynomial::zero(1);
        p.linear[0] = 1.0;
        let h = p.to_ising();
        assert_eq!(h.constant, 0.5);
        assert_eq!(h.fields, vec![0.5]);
    }

    #[test]
    fn product_ising() {
        let mut p = CostPolynomial::zero(2);
        p.add_quadratic(0, 1, 1.0);
        let h = p.to_ising();
        assert_eq!(h.constant, 0.25);
        assert_eq!(h.fields, vec![0.25, 0.25]);
        assert_eq!(h.couplings[&(0, 1)], 0.25);
    }

    #[test]
    fn square_expansion() {
        // (1 - x0 - x1)^2 = 1 - x0 - x1 + 2 x0 x1
        let mut p = CostPolynomial::zero(2);
        p.add_square(1.0, &[(0, -1.0), (1, -1.0)]);
        assert_eq!(p.constant, 1.0);
        assert_eq!(p.linear, vec![-1.0, -1.0]);
        assert_eq!(p.quadratic[&(0, 1)], 2.0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let p = CostPolynomial::zero(3);
        assert!(matches!(
            p.evaluate(&Bitstring::new(0, 2)),
            Err(QuboError::LengthMismatch { expected: 3, got: 2 })
        ));
    }

    fn arb_poly() -> impl Strategy<Value = CostPolynomial> {
        (1usize..=9)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    -5.0..5.0f64,
                    prop::collection::vec(-5.0..5.0f64, n),
                    prop::collection::vec((0..n, 0..n, -5.0..5.0f64), 0..20),
                )
            })
            .prop_map(|(n, c, lin, quad)| {
                let mut p = CostPolynomial::zero(n);
                p.constant = c;
                p.linear = lin;
                for (i, j, v) in quad {
                    if i != j {
                        p.add_quadratic(i, j, v);
                    }
                }
                p
            })
    }

    proptest! {
        #[test]
        fn ising_agrees_with_qubo(p in arb_poly()) {
            let h = p.to_ising();
            for b in 0..1u64 << p.n {
                let x = p.evaluate_index(b);
                prop_assert!((x - h.evaluate_index(b)).abs() <= 1e-12 * (1.0 + x.abs()) * 16.0);
            }
        }

        // Independent evaluator: expand term by term over the bit vector.
        #[test]
        fn evaluation_matches_term_sum(p in arb_poly(), raw in any::<u64>()) {
            let b = raw & ((1u64 << p.n) - 1);
            let bits: Vec<f64> = (0..p.n).map(|i| ((b >> i) & 1) as f64).collect();
            let mut want = p.constant;
            for i in 0..p.n {
                want += p.linear[i] * bits[i];
            }
            for (&(i, j), &c) in &p.quadratic {
                want += c * bits[i] * bits[j];
            }
            prop_assert!((p.evaluate(&Bitstring::new(b, p.n)).unwrap() - want).abs() < 1e-9);
        }
    }
}
