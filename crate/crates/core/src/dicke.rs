//! Dicke states, excitation-sector projectors and Schmidt coefficients.
//!
//! Basis convention: bit `b` of a computational-basis index is the state of
//! qubit `b`. The Hamming weight of an index is its excitation number.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binom, binom_f64, max_split_product, ratio, rational_from_u64, to_f64, Rational};
use crate::error::{invalid, out_of_domain, Error, Result};

/// Largest qubit count for which dense `2^n` vectors are built.
pub const MAX_DENSE_QUBITS: usize = 16;

/// The pair `(N, k)` identifying `|D^N_k⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DickeSpec {
    pub n: usize,
    pub k: usize,
}

impl DickeSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("need N >= 2 qubits, got {n}")));
        }
        if k > n {
            return Err(invalid(format!("need 0 <= k <= N, got N = {n}, k = {k}")));
        }
        Ok(Self { n, k })
    }

    /// Like [`DickeSpec::new`] but additionally requires `1 <= k <= N−1`.
    pub fn entangled(n: usize, k: usize) -> Result<Self> {
        let spec = Self::new(n, k)?;
        spec.require_entangled()?;
        Ok(spec)
    }

    pub(crate) fn require_entangled(&self) -> Result<()> {
        if self.k == 0 || self.k == self.n {
            return Err(out_of_domain(format!(
                "|D^{}_{}> is a product state",
                self.n, self.k
            )));
        }
        Ok(())
    }

    /// Relabelling `|0⟩ ↔ |1⟩` maps `|D^N_k⟩` to `|D^N_{N−k}⟩`.
    pub fn flipped(&self) -> Self {
        Self {
            n: self.n,
            k: self.n - self.k,
        }
    }

    /// `min(k, N−k)`.
    pub fn reduced_k(&self) -> usize {
        self.k.min(self.n - self.k)
    }

    pub fn is_half_filled(&self) -> bool {
        2 * self.k == self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }
}

impl std::fmt::Display for DickeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "D^{}_{}", self.n, self.k)
    }
}

/// Real state vector over the `2^n` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub n: usize,
    pub amplitudes: Vec<f64>,
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a * b)
            .sum()
    }
}

fn dense_guard(what: &'static str, n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity {
            what,
            limit: MAX_DENSE_QUBITS,
            got: n,
        });
    }
    Ok(())
}

pub(crate) fn weight(index: usize) -> usize {
    index.count_ones() as usize
}

pub fn dicke_vector(spec: DickeSpec) -> Result<StateVector> {
    dense_guard("dicke_vector", spec.n)?;
    let amp = 1.0 / binom_f64(spec.n as i64, spec.k as i64).sqrt();
    let amplitudes = (0..spec.dim())
        .map(|idx| if weight(idx) == spec.k { amp } else { 0.0 })
        .collect();
    Ok(StateVector {
        n: spec.n,
        amplitudes,
    })
}

/// Diagonal of `Π_i`: 1 on indices of Hamming weight `i`, 0 elsewhere.
pub fn sector_projector_diagonal(n: usize, i: usize) -> Result<Vec<f64>> {
    if i > n {
        return Err(invalid(format!("sector {i} out of range for {n} qubits")));
    }
    dense_guard("sector_projector_diagonal", n)?;
    Ok((0..1usize << n)
        .map(|idx| if weight(idx) == i { 1.0 } else { 0.0 })
        .collect())
}

/// Schmidt decomposition of `|D^N_k⟩` across a cut into `A` and `N−A` qubits.
///
/// The Schmidt vectors are the normalized Dicke states `|D^A_α⟩ ⊗ |D^{N−A}_{k−α}⟩`,
/// so only the coefficients are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    pub spec: DickeSpec,
    pub part_size: usize,
    /// `C(A, α)·C(N−A, k−α) / C(N, k)` for `α = 0..=k`.
    pub squares: Vec<Rational>,
    pub coefficients: Vec<f64>,
}

pub fn schmidt_coefficients(spec: DickeSpec, part_size: usize) -> Result<SchmidtDecomposition> {
    if part_size < 1 || part_size >= spec.n {
        return Err(invalid(format!(
            "part size must lie in 1..={}, got {part_size}",
            spec.n - 1
        )));
    }
    let (n, k, a) = (spec.n as i64, spec.k as i64, part_size as i64);
    let total = binom(n, k);
    let squares: Vec<Rational> = (0..=k)
        .map(|alpha| ratio(&(binom(a, alpha) * binom(n - a, k - alpha)), &total))
        .collect();
    let coefficients = squares.iter().map(|q| to_f64(q).sqrt()).collect();
    Ok(SchmidtDecomposition {
        spec,
        part_size,
        squares,
        coefficients,
    })
}

/// Largest squared Schmidt coefficient over every bipartition, by exhaustive
/// search. This is the maximal squared overlap of `|D^N_k⟩` with a biseparable
/// pure state.
pub fn max_schmidt_sq(spec: DickeSpec) -> Result<Rational> {
    spec.require_entangled()?;
    let best = max_split_product(spec.n, spec.k);
    Ok(ratio(&best.max_value, &binom(spec.n as i64, spec.k as i64)))
}

/// Closed form of [`max_schmidt_sq`]: `(N−k')/N` with `k' = min(k, N−k)`,
/// or `N/(2(N−1))` at half filling with `N >= 4`.
pub fn max_schmidt_sq_closed_form(spec: DickeSpec) -> Result<Rational> {
    spec.require_entangled()?;
    let n = spec.n as u64;
    if spec.is_half_filled() && n > 2 {
        Ok(rational_from_u64(n, 2 * (n - 1)))
    } else {
        let kr = spec.reduced_k() as u64;
        Ok(rational_from_u64(n - kr, n))
    }
}

/// `⟨D^N_k|Π_i|D^N_k⟩`, which is 1 for `i = k` and 0 otherwise.
pub fn sector_overlap(spec: DickeSpec, i: usize) -> Result<f64> {
    let psi = dicke_vector(spec)?;
    let diag = sector_projector_diagonal(spec.n, i)?;
    Ok(psi
        .amplitudes
        .iter()
        .zip(&diag)
        .map(|(a, d)| a * a * d)
        .sum())
}

impl SchmidtDecomposition {
    /// Exact normalization check of the squared coefficients.
    pub fn is_normalized(&self) -> bool {
        let total: Rational = self.squares.iter().fold(Rational::zero(), |acc, q| acc + q);
        total == rational_from_u64(1, 1)
    }
}
