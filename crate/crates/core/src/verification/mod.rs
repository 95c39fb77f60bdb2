//! Spectral certification of witnesses.
//!
//! A diagonal witness is fully PPT when its partial transpose over every
//! qubit subset is positive semidefinite. The witness operators here are
//! permutation invariant, so only the subset size matters; each size is
//! checked on the leading qubits plus one random subset as a spot check.

pub mod dense;
pub mod eigen;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{binom_f64, to_f64};
use crate::dicke::{weight, DickeSpec};
use crate::error::{invalid, Error, Result};
use crate::witness::{lambda_sq_unchecked, DiagonalWitness, Family};

pub use dense::{
    assemble_witness_matrix, gershgorin_lower_bound, min_eigenvalue, partial_transpose,
    DenseSymmetric, MAX_MATRIX_QUBITS,
};
pub use eigen::{symmetric_eigen, symmetric_eigenvalues, SymmetricEigen};

/// Default PSD tolerance for pass/fail decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest qubit count for the cross-sector singular-value extraction.
pub const MAX_BLOCK_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PptRow {
    /// Size of the transposed subset.
    pub m: usize,
    pub subset: u64,
    pub min_eigenvalue: f64,
    pub gershgorin_bound: f64,
    pub pass: bool,
    /// Random subset of the same size used as a permutation spot check.
    pub random_subset: u64,
    pub random_min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PptReport {
    pub spec: DickeSpec,
    pub family: Family,
    pub rows: Vec<PptRow>,
    pub tol: f64,
}

impl PptReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }

    /// Contiguous and random subsets of equal size agree within `tol`.
    pub fn permutation_invariant(&self) -> bool {
        self.rows
            .iter()
            .all(|r| (r.min_eigenvalue - r.random_min_eigenvalue).abs() <= self.tol)
    }
}

fn leading_mask(m: usize) -> u64 {
    (1u64 << m) - 1
}

fn random_mask(rng: &mut ChaCha8Rng, n: usize, m: usize) -> u64 {
    sample(rng, n, m).into_iter().fold(0u64, |acc, q| acc | (1 << q))
}

/// Check every partial transpose of `w` (one per subset size `1..=⌊N/2⌋`).
pub fn fully_ppt_check(w: &DiagonalWitness, tol: f64) -> Result<PptReport> {
    let matrix = assemble_witness_matrix(w)?;
    let n = w.spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9 ^ ((n as u64) << 16) ^ w.spec.k as u64);
    let plan: Vec<(usize, u64)> = (1..=n / 2).map(|m| (m, random_mask(&mut rng, n, m))).collect();

    let rows = plan
        .into_par_iter()
        .map(|(m, random_subset)| -> Result<PptRow> {
            let subset = leading_mask(m);
            let pt = partial_transpose(&matrix, subset)?;
            let min = min_eigenvalue(&pt);
            let gersh = gershgorin_lower_bound(&pt);
            let random_min = if random_subset == subset {
                min
            } else {
                min_eigenvalue(&partial_transpose(&matrix, random_subset)?)
            };
            Ok(PptRow {
                m,
                subset,
                min_eigenvalue: min,
                gershgorin_bound: gersh,
                pass: min >= -tol,
                random_subset,
                random_min_eigenvalue: random_min,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PptReport {
        spec: w.spec,
        family: w.family,
        rows,
        tol,
    })
}

/// Nonzero singular values of one cross-sector block, measured and predicted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSingularValues {
    pub spec: DickeSpec,
    pub delta: usize,
    pub x: usize,
    /// Descending.
    pub computed: Vec<f64>,
    /// `λ(x1, x2)` over `x1 + x2 = x` with `λ > 0`, descending.
    pub predicted: Vec<f64>,
}

impl BlockSingularValues {
    /// Same count and elementwise agreement within `tol`.
    pub fn matches(&self, tol: f64) -> bool {
        self.computed.len() == self.predicted.len()
            && self
                .computed
                .iter()
                .zip(&self.predicted)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// Entry `(r, c)` of the partial transpose of `|D^N_k⟩⟨D^N_k|` over `subset`.
fn projector_pt_entry(spec: DickeSpec, subset: usize, r: usize, c: usize) -> f64 {
    let r0 = (r & !subset) | (c & subset);
    let c0 = (c & !subset) | (r & subset);
    if weight(r0) == spec.k && weight(c0) == spec.k {
        1.0 / binom_f64(spec.n as i64, spec.k as i64)
    } else {
        0.0
    }
}

fn sector(n: usize, w: usize) -> Vec<usize> {
    (0..1usize << n).filter(|&i| weight(i) == w).collect()
}

/// Singular values of the block of `PT(|D^N_k⟩⟨D^N_k|)` over the first `x`
/// qubits whose rows have weight `k−δ` and columns weight `k+δ` (both in
/// increasing index order), alongside the closed-form prediction.
pub fn block_singular_values(spec: DickeSpec, delta: usize, x: usize) -> Result<BlockSingularValues> {
    if spec.n > MAX_BLOCK_QUBITS {
        return Err(Error::Capacity {
            what: "block_singular_values",
            limit: MAX_BLOCK_QUBITS,
            got: spec.n,
        });
    }
    spec.require_entangled()?;
    if 2 * spec.k > spec.n {
        return Err(crate::error::out_of_domain(format!(
            "k = {} exceeds N/2; use k = {}",
            spec.k,
            spec.n - spec.k
        )));
    }
    if delta < 1 || delta > spec.k {
        return Err(invalid(format!("delta must lie in 1..={}, got {delta}", spec.k)));
    }
    if x < 1 || x > spec.n / 2 {
        return Err(invalid(format!("x must lie in 1..={}, got {x}", spec.n / 2)));
    }

    let subset = (1usize << x) - 1;
    let rows = sector(spec.n, spec.k - delta);
    let cols = sector(spec.n, spec.k + delta);
    let a: Vec<f64> = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| projector_pt_entry(spec, subset, r, c)))
        .collect();
    let (nr, nc) = (rows.len(), cols.len());
    let mut gram = vec![0.0; nr * nr];
    for i in 0..nr {
        for j in 0..=i {
            let dot: f64 = (0..nc).map(|t| a[i * nc + t] * a[j * nc + t]).sum();
            gram[i * nr + j] = dot;
            gram[j * nr + i] = dot;
        }
    }
    let mut computed: Vec<f64> = symmetric_eigenvalues(&gram, nr)
        .into_iter()
        .filter(|&ev| ev > 1e-14)
        .map(f64::sqrt)
        .collect();
    computed.sort_by(|a, b| b.total_cmp(a));

    let mut predicted: Vec<f64> = (0..=x)
        .map(|x1| lambda_sq_unchecked(spec, delta, x1, x - x1))
        .filter(|q| *q > crate::combinatorics::Rational::from_integer(0.into()))
        .map(|q| to_f64(&q).sqrt())
        .collect();
    predicted.sort_by(|a, b| b.total_cmp(a));

    Ok(BlockSingularValues {
        spec,
        delta,
        x,
        computed,
        predicted,
    })
}

/// Largest entry of `PT(|D⟩⟨D|)` over the first `x` qubits outside the
/// sector pairs `(k−δ, k+δ)`, i.e. with `wt(r) + wt(c) != 2k`. Zero when the
/// block pairing exhausts the partial transpose.
pub fn cross_sector_residual(spec: DickeSpec, x: usize) -> Result<f64> {
    if spec.n > MAX_BLOCK_QUBITS {
        return Err(Error::Capacity {
            what: "cross_sector_residual",
            limit: MAX_BLOCK_QUBITS,
            got: spec.n,
        });
    }
    let subset = (1usize << x) - 1;
    let dim = spec.dim();
    let mut worst: f64 = 0.0;
    for r in 0..dim {
        for c in 0..dim {
            if weight(r) + weight(c) != 2 * spec.k {
                worst = worst.max(projector_pt_entry(spec, subset, r, c).abs());
            }
        }
    }
    Ok(worst)
}

/// Outcome of a Monte-Carlo search for biseparable states with negative
/// witness expectation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingOutcome {
    pub samples: usize,
    pub seed: u64,
    pub min_expectation: f64,
    /// Bipartition (qubits of the first factor) of the worst sample.
    pub worst_subset: u64,
}

fn gaussian_state(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    normalize(&mut v);
    v
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
}

/// State on `q` qubits supported on the vacuum and single excitations.
fn low_excitation_state(rng: &mut ChaCha8Rng, q: usize, equal: bool) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << q];
    if equal {
        let a0: f64 = rng.random_range(0.0..=1.0);
        let b = ((1.0 - a0 * a0) / q as f64).sqrt();
        v[0] = Complex64::new(a0, 0.0);
        for j in 0..q {
            v[1 << j] = Complex64::new(b, 0.0);
        }
    } else {
        v[0] = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        for j in 0..q {
            v[1 << j] = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        normalize(&mut v);
    }
    v
}

/// Scatter table: local index of a factor ↦ global index bits.
fn deposit_table(mask: usize, n: usize) -> Vec<usize> {
    let qubits: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
    (0..1usize << qubits.len())
        .map(|local| {
            qubits
                .iter()
                .enumerate()
                .filter(|(b, _)| local >> b & 1 == 1)
                .fold(0usize, |acc, (_, &q)| acc | (1 << q))
        })
        .collect()
}

/// Minimum of `⟨a⊗b|W|a⊗b⟩` over random pure product states across random
/// bipartitions. Samples cycle through Haar-like states on the full factor
/// spaces, random states on the vacuum-plus-single-excitation subspace, and
/// real states with equal single-excitation amplitudes. For `k > N/2` the
/// low-excitation families are taken relative to `|1…1⟩`.
pub fn biseparable_sampling_check(
    w: &DiagonalWitness,
    samples: usize,
    seed: u64,
) -> Result<SamplingOutcome> {
    let n = w.spec.n;
    if n > MAX_MATRIX_QUBITS {
        return Err(Error::Capacity {
            what: "biseparable_sampling_check",
            limit: MAX_MATRIX_QUBITS,
            got: n,
        });
    }
    let full = (1usize << n) - 1;
    let flip = if 2 * w.spec.k > n { full } else { 0 };
    let amp = 1.0 / binom_f64(n as i64, w.spec.k as i64).sqrt();
    let omega_by_weight: Vec<f64> = (0..=n).map(|i| w.omega(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best = f64::INFINITY;
    let mut worst_subset = 0u64;
    for s in 0..samples {
        let mask = rng.random_range(1..full);
        let rest = full & !mask;
        let (qa, qb) = (mask.count_ones() as usize, rest.count_ones() as usize);
        let (a, b) = match s % 3 {
            0 => (gaussian_state(&mut rng, 1 << qa), gaussian_state(&mut rng, 1 << qb)),
            1 => (
                low_excitation_state(&mut rng, qa, false),
                low_excitation_state(&mut rng, qb, false),
            ),
            _ => (
                low_excitation_state(&mut rng, qa, true),
                low_excitation_state(&mut rng, qb, true),
            ),
        };
        let da = deposit_table(mask, n);
        let db = deposit_table(rest, n);
        let mut diag = 0.0;
        let mut overlap = Complex64::new(0.0, 0.0);
        for (ia, za) in a.iter().enumerate() {
            if za.norm_sqr() == 0.0 {
                continue;
            }
            for (ib, zb) in b.iter().enumerate() {
                let z = za * zb;
                let idx = (da[ia] | db[ib]) ^ flip;
                let wt = weight(idx);
                diag += omega_by_weight[wt] * z.norm_sqr();
                if wt == w.spec.k {
                    overlap += z;
                }
            }
        }
        let value = diag - amp * amp * overlap.norm_sqr();
        if value < best {
            best = value;
            worst_subset = mask as u64;
        }
    }
    Ok(SamplingOutcome {
        samples,
        seed,
        min_expectation: best,
        worst_subset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness;

    fn spec(n: usize, k: usize) -> DickeSpec {
        DickeSpec::new(n, k).unwrap()
    }

    fn zero_control() -> DiagonalWitness {
        DiagonalWitness::from_levels(spec(2, 1), Family::Projective, 0, &[0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn projective_passes_small() {
        for n in 2..=8 {
            for k in 1..n {
                let w = witness::projective(spec(n, k)).unwrap();
                let rep = fully_ppt_check(&w, DEFAULT_TOL).unwrap();
                assert!(rep.passed(), "N={n} k={k}: {}", rep.min_eigenvalue());
                assert!(rep.permutation_invariant());
            }
        }
    }

    #[test]
    fn projective_three_qubit_single_site() {
        let m = assemble_witness_matrix(&witness::projective(spec(3, 1)).unwrap()).unwrap();
        for q in 0..3 {
            assert!(min_eigenvalue(&partial_transpose(&m, 1 << q).unwrap()) >= -1e-10);
        }
    }

    #[test]
    fn thm6_four_two_passes() {
        let rep = fully_ppt_check(&witness::thm6_witness(spec(4, 2)).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(rep.rows.len(), 2);
        for row in &rep.rows {
            assert!(row.min_eigenvalue >= -1e-10);
            assert!(row.gershgorin_bound <= row.min_eigenvalue + 1e-9);
        }
    }

    #[test]
    fn zero_control_fails() {
        let rep = fully_ppt_check(&zero_control(), DEFAULT_TOL).unwrap();
        assert!(!rep.passed());
        assert!((rep.rows[0].min_eigenvalue + 0.5).abs() < 1e-10);
    }

    #[test]
    fn singular_value_examples() {
        let b = block_singular_values(spec(4, 2), 1, 1).unwrap();
        assert_eq!(b.predicted.len(), 1);
        assert!((b.predicted[0] - 0.5).abs() < 1e-15);
        assert!(b.matches(1e-10));

        let b = block_singular_values(spec(4, 2), 2, 2).unwrap();
        assert_eq!(b.predicted.len(), 1);
        assert!((b.predicted[0] - 1.0 / 6.0).abs() < 1e-15);
        assert!(b.matches(1e-10));

        let b = block_singular_values(spec(6, 3), 1, 2).unwrap();
        let want = 48f64.sqrt() / 20.0;
        assert_eq!(b.predicted.len(), 2);
        assert!(b.predicted.iter().all(|v| (v - want).abs() < 1e-15));
        assert!(b.matches(1e-10), "{:?}", b);
    }

    #[test]
    fn singular_value_preconditions() {
        assert!(block_singular_values(spec(4, 2), 3, 1).is_err());
        assert!(block_singular_values(spec(4, 2), 1, 3).is_err());
        assert!(block_singular_values(spec(4, 3), 1, 1).is_err());
        assert!(matches!(
            block_singular_values(spec(11, 2), 1, 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn block_pairing_exhausts_partial_transpose() {
        for n in 2..=8 {
            for k in 1..n {
                for x in 1..=n / 2 {
                    assert!(cross_sector_residual(spec(n, k), x).unwrap() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn schur_block_threshold() {
        // The block [[ω₋·1, A], [Aᵀ, ω₊·1]] is PSD exactly when ω₋ω₊ >= σ_max(A)².
        let s = spec(6, 2);
        for delta in 1..=2 {
            for x in 1..=3 {
                let b = block_singular_values(s, delta, x).unwrap();
                let Some(&smax) = b.computed.first() else { continue };
                let rows = sector(6, 2 - delta);
                let cols = sector(6, 2 + delta);
                let subset = (1usize << x) - 1;
                let dim = rows.len() + cols.len();
                let build = |lo: f64, hi: f64| {
                    let mut e = vec![0.0; dim * dim];
                    for i in 0..rows.len() {
                        e[i * dim + i] = lo;
                    }
                    for j in 0..cols.len() {
                        let jj = rows.len() + j;
                        e[jj * dim + jj] = hi;
                    }
                    for (i, &r) in rows.iter().enumerate() {
                        for (j, &c) in cols.iter().enumerate() {
                            let v = projector_pt_entry(s, subset, r, c);
                            let jj = rows.len() + j;
                            e[i * dim + jj] = -v;
                            e[jj * dim + i] = -v;
                        }
                    }
                    symmetric_eigenvalues(&e, dim)[0]
                };
                let prod = smax * smax;
                assert!(build(smax * 2.0, prod / (smax * 2.0)) >= -1e-12);
                assert!(build(smax * 2.0, 0.9 * prod / (smax * 2.0)) < -1e-6);
            }
        }
    }

    #[test]
    fn sampling_finds_zero_control_violation() {
        let out = biseparable_sampling_check(&zero_control(), 20_000, 5).unwrap();
        assert!(out.min_expectation < -0.49, "{}", out.min_expectation);
        assert!(out.min_expectation >= -0.5 - 1e-12);
    }

    #[test]
    fn sampling_projective_is_nonnegative() {
        let w = witness::projective(spec(3, 1)).unwrap();
        let out = biseparable_sampling_check(&w, 30_000, 1).unwrap();
        assert!(out.min_expectation >= -1e-9);
    }

    #[test]
    fn sampling_is_reproducible() {
        let w = witness::cor8_witness(4).unwrap();
        let a = biseparable_sampling_check(&w, 3000, 42).unwrap();
        let b = biseparable_sampling_check(&w, 3000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn deposit_table_layout() {
        assert_eq!(deposit_table(0b101, 3), vec![0b000, 0b001, 0b100, 0b101]);
        assert_eq!(deposit_table(0b010, 3), vec![0b000, 0b010]);
    }
}
