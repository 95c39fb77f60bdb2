//! Exact binomial coefficients and rationals, plus the brute-force oracles for
//! bipartite overlap bounds.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, out_of_domain, Result};

/// Exact rational in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Triangular cache of `C(n, r)` for `0 <= r <= n <= max_n`.
///
/// Built once with Pascal's rule (additions only), read-only afterwards.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    max_n: usize,
    rows: Vec<Vec<BigUint>>,
}

impl BinomialTable {
    pub fn new(max_n: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![BigUint::one()]);
        for n in 1..=max_n {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigUint::one());
            for r in 1..n {
                row.push(&prev[r - 1] + &prev[r]);
            }
            row.push(BigUint::one());
            rows.push(row);
        }
        Self { max_n, rows }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// `C(n, r)`, zero when `r < 0` or `r > n`.
    ///
    /// Panics if `n` is negative or exceeds `max_n`.
    pub fn get(&self, n: i64, r: i64) -> &BigUint {
        assert!(
            n >= 0 && (n as usize) <= self.max_n,
            "binomial table queried at n = {n}, max_n = {}",
            self.max_n
        );
        static ZERO: std::sync::OnceLock<BigUint> = std::sync::OnceLock::new();
        if r < 0 || r > n {
            return ZERO.get_or_init(BigUint::zero);
        }
        &self.rows[n as usize][r as usize]
    }
}

/// Exact `C(n, r)`; zero for `r < 0` or `r > n`.
pub fn binomial(n: i64, r: i64) -> Result<BigUint> {
    if n < 0 {
        return Err(invalid(format!("binomial needs n >= 0, got n = {n}")));
    }
    Ok(binom(n, r))
}

/// Unchecked variant for internal callers that have already validated `n`.
pub(crate) fn binom(n: i64, r: i64) -> BigUint {
    if n < 0 || r < 0 || r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r) as u64;
    let n = n as u64;
    let mut acc = BigUint::one();
    // Each partial product C(n-r+i, i) is an integer, so the division is exact.
    for i in 1..=r {
        acc *= n - r + i;
        acc /= i;
    }
    acc
}

pub(crate) fn binom_f64(n: i64, r: i64) -> f64 {
    binom(n, r).to_f64().unwrap_or(f64::INFINITY)
}

/// `a / b` as an exact rational.
pub fn ratio(num: &BigUint, den: &BigUint) -> Rational {
    Rational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub fn rational_from_u64(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact square root of a nonnegative rational when both numerator and
/// denominator are perfect squares.
pub fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    let rn = num.sqrt();
    let rd = den.sqrt();
    if &(&rn * &rn) == num && &(&rd * &rd) == den {
        Some(ratio(&rn, &rd))
    } else {
        None
    }
}

/// Result of an exhaustive search over bipartite splits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMax {
    pub max_value: BigUint,
    /// All `(A, α)` pairs attaining the maximum, in lexicographic order.
    pub argmax: Vec<(usize, usize)>,
}

/// Maximum of `C(A, α)·C(N−A, k−α)` over `1 <= A <= N−1` and `0 <= α <= k`.
///
/// No restriction on `k`; this is the raw oracle behind both the overlap bound
/// and [`lemma10_max`].
pub fn max_split_product(n: usize, k: usize) -> SplitMax {
    let table = BinomialTable::new(n);
    let (n, k) = (n as i64, k as i64);
    let mut best = BigUint::zero();
    let mut argmax = Vec::new();
    for a in 1..n {
        for alpha in 0..=k {
            let v = table.get(a, alpha) * table.get(n - a, k - alpha);
            match v.cmp(&best) {
                std::cmp::Ordering::Greater => {
                    best = v;
                    argmax.clear();
                    argmax.push((a as usize, alpha as usize));
                }
                std::cmp::Ordering::Equal if !best.is_zero() => {
                    argmax.push((a as usize, alpha as usize));
                }
                _ => {}
            }
        }
    }
    SplitMax {
        max_value: best,
        argmax,
    }
}

/// Exhaustive maximum of `C(A, α)·C(N−A, k−α)` in the regime `k < N/2`, where
/// it equals `C(N−1, k)` and is attained at `(A, α) = (1, 0)`.
pub fn lemma10_max(n: usize, k: usize) -> Result<SplitMax> {
    if n < 2 {
        return Err(invalid(format!("need N >= 2, got N = {n}")));
    }
    if k < 1 || 2 * k >= n {
        return Err(out_of_domain(format!(
            "split bound needs 1 <= k < N/2, got N = {n}, k = {k}"
        )));
    }
    Ok(max_split_product(n, k))
}

/// `Σ_α C(x1, α)·C(x2, x2+δ−α)` by explicit summation.
pub fn vandermonde_sum(x1: usize, x2: usize, delta: usize) -> BigUint {
    let (x1, x2, delta) = (x1 as i64, x2 as i64, delta as i64);
    (0..=x1)
        .map(|alpha| binom(x1, alpha) * binom(x2, x2 + delta - alpha))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2).unwrap(), big(6));
        assert_eq!(binomial(10, 0).unwrap(), big(1));
        assert_eq!(binomial(6, 7).unwrap(), big(0));
        assert_eq!(binomial(6, -1).unwrap(), big(0));
        assert!(binomial(-1, 0).is_err());
    }

    #[test]
    fn binomial_large_value() {
        let expected: BigUint = "98913082887808032681188722800".parse().unwrap();
        assert_eq!(binomial(100, 49).unwrap(), expected);
    }

    #[test]
    fn table_pascal_and_symmetry() {
        let t = BinomialTable::new(40);
        for n in 0..=40i64 {
            for r in 0..=n {
                assert_eq!(t.get(n, r), t.get(n, n - r));
                assert_eq!(t.get(n, r), &binom(n, r));
                if r >= 1 && r < n {
                    assert_eq!(t.get(n, r), &(t.get(n - 1, r - 1) + t.get(n - 1, r)));
                }
            }
            assert!(t.get(n, -1).is_zero());
            assert!(t.get(n, n + 1).is_zero());
        }
    }

    #[test]
    fn lemma10_examples() {
        let m = lemma10_max(5, 2).unwrap();
        assert_eq!(m.max_value, big(6));
        assert!(m.argmax.contains(&(1, 0)));

        assert_eq!(lemma10_max(4, 1).unwrap().max_value, big(3));
        assert_eq!(lemma10_max(20, 9).unwrap().max_value, big(92378));
        assert_eq!(binomial(19, 9).unwrap(), big(92378));
    }

    #[test]
    fn lemma10_rejects_half_filling() {
        assert!(matches!(
            lemma10_max(4, 2),
            Err(crate::Error::OutOfDomain(_))
        ));
        assert!(lemma10_max(1, 0).is_err());
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde_sum(2, 1, 1), big(3));
        assert_eq!(vandermonde_sum(3, 0, 0), big(1));
        assert_eq!(vandermonde_sum(5, 5, 2), big(120));
    }

    #[test]
    fn vandermonde_identity_grid() {
        for x1 in 0..=12 {
            for x2 in 0..=12 {
                for d in 0..=6 {
                    assert_eq!(
                        vandermonde_sum(x1, x2, d),
                        binom((x1 + x2) as i64, (x2 + d) as i64),
                        "x1={x1} x2={x2} d={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn exact_sqrt_detects_squares() {
        assert_eq!(
            exact_sqrt(&rational_from_u64(4, 9)),
            Some(rational_from_u64(2, 3))
        );
        assert_eq!(exact_sqrt(&rational_from_u64(2, 9)), None);
        assert_eq!(exact_sqrt(&Rational::zero()), Some(Rational::zero()));
    }
}
