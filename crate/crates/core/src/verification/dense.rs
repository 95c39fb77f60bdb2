use crate::dicke::weight;
use crate::error::{invalid, Error, Result};
use crate::verification::eigen::symmetric_eigenvalues;
use crate::witness::DiagonalWitness;

/// Largest qubit count for which witness matrices are assembled densely.
pub const MAX_MATRIX_QUBITS: usize = 12;

const SYMMETRY_TOL: f64 = 1e-12;

/// Real symmetric matrix of dimension `2^n`, row-major with full storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetric {
    dim: usize,
    entries: Vec<f64>,
}

impl DenseSymmetric {
    /// Validates shape and symmetry (`|a_ij − a_ji| <= 1e−12·max(1, |a_ij|)`).
    pub fn from_entries(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(invalid(format!(
                "{} entries do not form a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (entries[i * dim + j], entries[j * dim + i]);
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(1.0) {
                    return Err(invalid(format!(
                        "matrix not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Qubit count when the dimension is a power of two.
    pub fn qubits(&self) -> Option<usize> {
        self.dim
            .is_power_of_two()
            .then(|| self.dim.trailing_zeros() as usize)
    }

    /// Index sets of the connected components of the nonzero pattern. The
    /// spectrum is the union of the spectra of the principal submatrices on
    /// these sets.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.dim;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for i in 0..n {
            for j in 0..i {
                if self.entries[i * n + j] != 0.0 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    }

    fn submatrix(&self, idx: &[usize]) -> Vec<f64> {
        let m = idx.len();
        let mut out = vec![0.0; m * m];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[a * m + b] = self.get(i, j);
            }
        }
        out
    }

    /// Full spectrum, ascending, computed block by block.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .components()
            .iter()
            .flat_map(|idx| {
                if idx.len() == 1 {
                    vec![self.get(idx[0], idx[0])]
                } else {
                    symmetric_eigenvalues(&self.submatrix(idx), idx.len())
                }
            })
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }
}

/// Assemble `Σ_i ω_i Π_i − |D^N_k⟩⟨D^N_k|` densely.
pub fn assemble_witness_matrix(w: &DiagonalWitness) -> Result<DenseSymmetric> {
    let n = w.spec.n;
    if n > MAX_MATRIX_QUBITS {
        return Err(Error::Capacity {
            what: "assemble_witness_matrix",
            limit: MAX_MATRIX_QUBITS,
            got: n,
        });
    }
    let dim = 1usize << n;
    let mut m = DenseSymmetric::zeros(dim);
    for idx in 0..dim {
        m.entries[idx * dim + idx] = w.omega(weight(idx));
    }
    let amp_sq = 1.0 / crate::combinatorics::binom_f64(n as i64, w.spec.k as i64);
    let support: Vec<usize> = (0..dim).filter(|&i| weight(i) == w.spec.k).collect();
    for &r in &support {
        for &c in &support {
            m.entries[r * dim + c] -= amp_sq;
        }
    }
    Ok(m)
}

/// Partial transpose over the qubits flagged in `subset`: the entry at
/// `(r, c)` moves to the indices obtained by swapping the subset bits of `r`
/// and `c`.
pub fn partial_transpose(m: &DenseSymmetric, subset: u64) -> Result<DenseSymmetric> {
    let n = m
        .qubits()
        .ok_or_else(|| invalid(format!("dimension {} is not a power of two", m.dim)))?;
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    if subset == 0 {
        return Err(invalid("partial transpose over an empty subset"));
    }
    if subset & !full != 0 {
        return Err(invalid(format!(
            "subset {subset:#b} names qubits beyond the {n} present"
        )));
    }
    if subset == full {
        return Ok(m.clone());
    }
    let s = subset as usize;
    let dim = m.dim;
    let mut out = DenseSymmetric::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            let v = m.entries[r * dim + c];
            if v != 0.0 {
                let r2 = (r & !s) | (c & s);
                let c2 = (c & !s) | (r & s);
                out.entries[r2 * dim + c2] = v;
            }
        }
    }
    Ok(out)
}

/// Smallest eigenvalue.
pub fn min_eigenvalue(m: &DenseSymmetric) -> f64 {
    m.eigenvalues().first().copied().unwrap_or(f64::NAN)
}

/// `min_i (a_ii − Σ_{j≠i} |a_ij|)`, a lower bound on every eigenvalue.
pub fn gershgorin_lower_bound(m: &DenseSymmetric) -> f64 {
    let n = m.dim;
    (0..n)
        .map(|i| {
            let row = &m.entries[i * n..(i + 1) * n];
            let radius: f64 = row
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, x)| x.abs())
                .sum();
            row[i] - radius
        })
        .fold(f64::INFINITY, f64::min)
}
