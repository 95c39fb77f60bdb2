//! Dense real symmetric eigensolver: Householder reduction to tridiagonal
//! form followed by the implicit QL algorithm (EISPACK tred2/tql2 lineage).

/// Eigenvalues (ascending) and, when requested, the matching orthonormal
/// eigenvectors stored column-wise in a row-major `n×n` buffer.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<f64>>,
    n: usize,
}

impl SymmetricEigen {
    /// Column `j` of the eigenvector matrix.
    pub fn vector(&self, j: usize) -> Option<Vec<f64>> {
        let v = self.vectors.as_ref()?;
        Some((0..self.n).map(|i| v[i * self.n + j]).collect())
    }
}

/// Decompose the symmetric matrix held row-major in `a` (`n×n`). Only the
/// lower triangle is read.
pub fn symmetric_eigen(a: &[f64], n: usize, want_vectors: bool) -> SymmetricEigen {
    assert_eq!(a.len(), n * n, "buffer does not hold an {n}x{n} matrix");
    if n == 0 {
        return SymmetricEigen {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
            n,
        };
    }
    let mut v = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, n, &mut d, &mut e, want_vectors);
    ql_implicit(&mut d, &mut e, want_vectors.then_some(v.as_mut_slice()), n);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        let mut out = vec![0.0; n * n];
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                out[row * n + col] = v[row * n + src];
            }
        }
        out
    });
    SymmetricEigen { values, vectors, n }
}

pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    symmetric_eigen(a, n, false).values
}

fn tridiagonalize(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64], accumulate: bool) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = if f > 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for j in 0..n {
            d[j] = v[at(j, j)];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn ql_implicit(d: &mut [f64], e: &mut [f64], mut vectors: Option<&mut [f64]>, n: usize) {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iterations = 0;
            loop {
                iterations += 1;
                assert!(iterations < 64 * n.max(1), "QL iteration failed to converge");
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = vectors.as_deref_mut() {
                        for k in 0..n {
                            let h = v[k * n + i + 1];
                            v[k * n + i + 1] = s * v[k * n + i] + c * h;
                            v[k * n + i] = c * v[k * n + i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.random_range(-1.0..1.0);
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        a
    }

    /// Cyclic Jacobi rotations, used only as an independent oracle.
    fn jacobi_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
        let mut m = a.to_vec();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[i * n + j].powi(2))
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = m[p * n + q];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[k * n + p];
                        let mkq = m[k * n + q];
                        m[k * n + p] = c * mkp - s * mkq;
                        m[k * n + q] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[p * n + k];
                        let mqk = m[q * n + k];
                        m[p * n + k] = c * mpk - s * mqk;
                        m[q * n + k] = s * mpk + c * mqk;
                    }
                }
            }
        }
        let mut vals: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    fn spectral_norm_bound(a: &[f64], n: usize) -> f64 {
        (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    #[test]
    fn small_matrices() {
        assert_eq!(symmetric_eigenvalues(&[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0], 3), vec![1.0, 2.0, 3.0]);
        let v = symmetric_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
        assert_eq!(symmetric_eigenvalues(&[-4.0], 1), vec![-4.0]);
        assert!(symmetric_eigenvalues(&[], 0).is_empty());
    }

    #[test]
    fn agrees_with_jacobi_oracle() {
        for (n, seed) in [(5, 1), (17, 2), (40, 3), (64, 4)] {
            let a = random_symmetric(n, seed);
            let ql = symmetric_eigenvalues(&a, n);
            let jac = jacobi_eigenvalues(&a, n);
            for (x, y) in ql.iter().zip(&jac) {
                assert!((x - y).abs() < 1e-10, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn extremal_residuals_on_random_64() {
        for seed in 0..10 {
            let n = 64;
            let a = random_symmetric(n, 100 + seed);
            let eig = symmetric_eigen(&a, n, true);
            let norm = spectral_norm_bound(&a, n);
            for j in [0, n - 1] {
                let v = eig.vector(j).unwrap();
                let lam = eig.values[j];
                let res: f64 = (0..n)
                    .map(|i| {
                        let mv: f64 = (0..n).map(|k| a[i * n + k] * v[k]).sum();
                        (mv - lam * v[i]).powi(2)
                    })
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= 1e-9 * norm, "seed {seed} col {j}: residual {res}");
            }
        }
    }

    #[test]
    fn vectors_are_orthonormal() {
        let n = 30;
        let a = random_symmetric(n, 7);
        let eig = symmetric_eigen(&a, n, true);
        for i in 0..n {
            for j in 0..n {
                let vi = eig.vector(i).unwrap();
                let vj = eig.vector(j).unwrap();
                let dot: f64 = vi.iter().zip(&vj).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        // Rank-one perturbation of the identity: eigenvalues {1, 1, 1, 1 + 4}.
        let n = 4;
        let a: Vec<f64> = (0..n * n)
            .map(|idx| if idx / n == idx % n { 2.0 } else { 1.0 })
            .collect();
        let v = symmetric_eigenvalues(&a, n);
        for x in &v[..3] {
            assert!((x - 1.0).abs() < 1e-13);
        }
        assert!((v[3] - 5.0).abs() < 1e-13);
    }
}
