//! Closed-form diagonal witnesses `Σ_i ω_i Π_i − |D^N_k⟩⟨D^N_k|`.
//!
//! Every family is built for `k <= N/2`; requests with `k > N/2` are served by
//! building the witness for `N−k` and reindexing `ω_i ↦ ω_{N−i}`, which is the
//! `|0⟩ ↔ |1⟩` relabelling.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binom, binom_f64, exact_sqrt, ratio, rational_from_u64, to_f64, Rational};
use crate::dicke::{max_schmidt_sq, DickeSpec};
use crate::error::{invalid, out_of_domain, Error, Result};

/// Witness family tag. The string forms are the external identifiers used in
/// CLI flags and output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `α𝟙 − |D⟩⟨D|` with `α` the maximal biseparable overlap.
    #[serde(rename = "projective")]
    Projective,
    /// The projective witness restricted to sectors `0..=2k`.
    #[serde(rename = "refined")]
    Refined,
    /// Half-filling witness with `ω_i = min{C(N,i)/C(N,N/2), N/(2(N−1))}`.
    #[serde(rename = "prop5")]
    HalfFilling,
    /// Trace-optimal fully PPT witness from the cross-sector singular values.
    #[serde(rename = "thm6")]
    FullyPpt,
    /// Closed form of [`Family::FullyPpt`] for W states.
    #[serde(rename = "cor8")]
    WState,
    /// W-state witness shifted until its biseparable minimum is exactly zero.
    #[serde(rename = "prop9")]
    OverlapShift,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Projective,
        Family::Refined,
        Family::HalfFilling,
        Family::FullyPpt,
        Family::WState,
        Family::OverlapShift,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Family::Projective => "projective",
            Family::Refined => "refined",
            Family::HalfFilling => "prop5",
            Family::FullyPpt => "thm6",
            Family::WState => "cor8",
            Family::OverlapShift => "prop9",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| invalid(format!("unknown witness family '{s}'")))
    }
}

/// Diagonal witness coefficients over excitation levels.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalWitness {
    pub spec: DickeSpec,
    pub family: Family,
    /// `ω_i` for `i = 0..=N`; zero outside [`DiagonalWitness::support`].
    pub omegas: Vec<f64>,
    /// Inclusive range of levels carried by the ansatz.
    pub support: (usize, usize),
    /// `ω_i²` when it is exactly rational.
    pub exact_squares: Vec<Option<Rational>>,
}

impl DiagonalWitness {
    /// Witness from explicit coefficients on levels `lo..=lo+omegas.len()−1`.
    pub fn from_levels(spec: DickeSpec, family: Family, lo: usize, omegas: &[f64]) -> Result<Self> {
        if omegas.is_empty() || lo + omegas.len() > spec.n + 1 {
            return Err(invalid(format!(
                "levels {lo}..{} do not fit N = {}",
                lo + omegas.len(),
                spec.n
            )));
        }
        if let Some((i, w)) = omegas.iter().enumerate().find(|(_, w)| w.is_nan() || **w < 0.0) {
            return Err(invalid(format!("omega_{} = {w} must be nonnegative", lo + i)));
        }
        let mut full = vec![0.0; spec.n + 1];
        full[lo..lo + omegas.len()].copy_from_slice(omegas);
        Ok(Self {
            spec,
            family,
            omegas: full,
            support: (lo, lo + omegas.len() - 1),
            exact_squares: vec![None; spec.n + 1],
        })
    }

    fn from_exact(spec: DickeSpec, family: Family, squares: Vec<Rational>) -> Self {
        let hi = squares.len() - 1;
        let mut omegas = vec![0.0; spec.n + 1];
        let mut exact_squares = vec![None; spec.n + 1];
        for (i, sq) in squares.into_iter().enumerate() {
            omegas[i] = to_f64(&sq).sqrt();
            exact_squares[i] = Some(sq);
        }
        Self {
            spec,
            family,
            omegas,
            support: (0, hi),
            exact_squares,
        }
    }

    pub fn omega(&self, i: usize) -> f64 {
        self.omegas.get(i).copied().unwrap_or(0.0)
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<usize> {
        self.support.0..=self.support.1
    }

    pub fn in_support(&self, i: usize) -> bool {
        self.levels().contains(&i)
    }

    /// `ω_i` as an exact rational when its square is a rational perfect square
    /// (zero outside the support).
    pub fn exact_omega(&self, i: usize) -> Option<Rational> {
        if !self.in_support(i) {
            return Some(Rational::zero());
        }
        self.exact_squares[i].as_ref().and_then(exact_sqrt)
    }

    /// Reindex `ω_i ↦ ω_{N−i}`, turning a witness for `|D^N_k⟩` into one for
    /// `|D^N_{N−k}⟩`.
    pub fn bit_flipped(&self) -> Self {
        let n = self.spec.n;
        Self {
            spec: self.spec.flipped(),
            family: self.family,
            omegas: self.omegas.iter().rev().copied().collect(),
            support: (n - self.support.1, n - self.support.0),
            exact_squares: self.exact_squares.iter().rev().cloned().collect(),
        }
    }

    /// `Tr(W) = Σ_i ω_i C(N, i) − 1`.
    pub fn trace(&self) -> f64 {
        let n = self.spec.n as i64;
        self.levels()
            .map(|i| self.omegas[i] * binom_f64(n, i as i64))
            .sum::<f64>()
            - 1.0
    }
}

fn require_low_half(spec: DickeSpec) -> Result<()> {
    spec.require_entangled()?;
    if 2 * spec.k > spec.n {
        return Err(out_of_domain(format!(
            "k = {} exceeds N/2 = {}/2; bit-flip to k = {} first",
            spec.k,
            spec.n,
            spec.n - spec.k
        )));
    }
    Ok(())
}

/// Build with `k <= N/2`, flipping in and out when needed.
fn via_low_half(spec: DickeSpec, build: impl FnOnce(DickeSpec) -> Result<DiagonalWitness>) -> Result<DiagonalWitness> {
    spec.require_entangled()?;
    if 2 * spec.k > spec.n {
        Ok(build(spec.flipped())?.bit_flipped())
    } else {
        build(spec)
    }
}

/// `μ(N,k)`: `(N−k)/N` for `k < N/2`, `N/(2(N−1))` for `k = N/2`.
/// The two-qubit case `N = 2, k = 1` has no split with two qubits on one
/// side, so it stays at `1/2`.
pub fn mu(n: usize, k: usize) -> Result<Rational> {
    let spec = DickeSpec::new(n, k)?;
    require_low_half(spec)?;
    let n = n as u64;
    if spec.is_half_filled() && n > 2 {
        Ok(rational_from_u64(n, 2 * (n - 1)))
    } else {
        Ok(rational_from_u64(n - k as u64, n))
    }
}

fn uniform(spec: DickeSpec, family: Family, value: &Rational, hi: usize) -> DiagonalWitness {
    let squares = vec![value * value; hi + 1];
    DiagonalWitness::from_exact(spec, family, squares)
}

pub fn projective(spec: DickeSpec) -> Result<DiagonalWitness> {
    let alpha = max_schmidt_sq(spec)?;
    Ok(uniform(spec, Family::Projective, &alpha, spec.n))
}

pub fn refined_projective(spec: DickeSpec) -> Result<DiagonalWitness> {
    via_low_half(spec, |s| {
        let alpha = mu(s.n, s.k)?;
        Ok(uniform(s, Family::Refined, &alpha, 2 * s.k))
    })
}

pub fn prop5_witness(n: usize) -> Result<DiagonalWitness> {
    if n % 2 == 1 || n < 4 {
        return Err(invalid(format!(
            "half-filling witness needs even N >= 4, got N = {n}"
        )));
    }
    let spec = DickeSpec::entangled(n, n / 2)?;
    let cap = mu(n, n / 2)?;
    let centre = binom(n as i64, (n / 2) as i64);
    let squares = (0..=n)
        .map(|i| {
            let q = ratio(&binom(n as i64, i as i64), &centre);
            let w = if q < cap { q } else { cap.clone() };
            &w * &w
        })
        .collect();
    Ok(DiagonalWitness::from_exact(spec, Family::HalfFilling, squares))
}

fn check_delta(spec: DickeSpec, delta: usize) -> Result<()> {
    require_low_half(spec)?;
    if delta < 1 || delta > spec.k {
        return Err(invalid(format!(
            "sector offset must lie in 1..={}, got {delta}",
            spec.k
        )));
    }
    Ok(())
}

/// Squared singular value `λ²(x1, x2)` of the cross-sector block pairing
/// excitation levels `k−δ` and `k+δ`, where `x1`/`x2` count transposed qubits
/// on which the row state has a 0/1.
pub fn lambda_sq(spec: DickeSpec, delta: usize, x1: usize, x2: usize) -> Result<Rational> {
    check_delta(spec, delta)?;
    Ok(lambda_sq_unchecked(spec, delta, x1, x2))
}

pub(crate) fn lambda_sq_unchecked(spec: DickeSpec, delta: usize, x1: usize, x2: usize) -> Rational {
    let (n, k, d, x1, x2) = (
        spec.n as i64,
        spec.k as i64,
        delta as i64,
        x1 as i64,
        x2 as i64,
    );
    let rest = n - x1 - x2;
    let x = x1 + x2;
    let num = binom(rest, k - x2) * binom(x, x2) * binom(rest, k - d - x2) * binom(x, x2 + d);
    let den = binom(n, k);
    ratio(&num, &(&den * &den))
}

/// Largest cross-sector singular value for offset `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMax {
    pub spec: DickeSpec,
    pub delta: usize,
    pub lambda_sq: Rational,
    pub lambda: f64,
    pub argmax: Vec<(usize, usize)>,
}

/// Exhaustive sweep of `λ²(x1, x2)` over `x1 >= δ`, `x2 <= k−δ`,
/// `x1 + x2 <= ⌊N/2⌋`.
pub fn lambda_max(spec: DickeSpec, delta: usize) -> Result<LambdaMax> {
    check_delta(spec, delta)?;
    let half = spec.n / 2;
    let mut best = Rational::zero();
    let mut argmax = Vec::new();
    for x1 in delta..=half {
        for x2 in 0..=(spec.k - delta).min(half - x1) {
            let v = lambda_sq_unchecked(spec, delta, x1, x2);
            if v > best {
                best = v;
                argmax.clear();
                argmax.push((x1, x2));
            } else if v == best && !best.is_zero() {
                argmax.push((x1, x2));
            }
        }
    }
    if argmax.is_empty() {
        return Err(Error::Internal(format!(
            "empty singular-value domain for {spec}, delta = {delta}"
        )));
    }
    Ok(LambdaMax {
        spec,
        delta,
        lambda: to_f64(&best).sqrt(),
        lambda_sq: best,
        argmax,
    })
}

/// The fully PPT witness whose coefficient pairs saturate
/// `ω_{k−δ}·ω_{k+δ} = λ_max(δ)²` at minimal trace.
pub fn thm6_witness(spec: DickeSpec) -> Result<DiagonalWitness> {
    via_low_half(spec, |s| {
        let (n, k) = (s.n as i64, s.k as i64);
        let centre = mu(s.n, s.k)?;
        let mut squares = vec![Rational::zero(); 2 * s.k + 1];
        squares[s.k] = &centre * &centre;
        for delta in 1..=s.k {
            let lm = lambda_max(s, delta)?;
            let below = binom(n, k - delta as i64);
            let above = binom(n, k + delta as i64);
            squares[s.k - delta] = ratio(&above, &below) * &lm.lambda_sq;
            squares[s.k + delta] = ratio(&below, &above) * &lm.lambda_sq;
        }
        Ok(DiagonalWitness::from_exact(s, Family::FullyPpt, squares))
    })
}

/// Closed-form W-state witness on levels 0, 1, 2.
pub fn cor8_witness(n: usize) -> Result<DiagonalWitness> {
    if n < 3 {
        return Err(invalid(format!("W-state witness needs N >= 3, got N = {n}")));
    }
    let spec = DickeSpec::entangled(n, 1)?;
    let m = n as u64;
    let (w0_sq, w2_sq) = if n.is_multiple_of(2) {
        (rational_from_u64(m * (m - 1), 8), rational_from_u64(1, 2 * m * (m - 1)))
    } else {
        (
            rational_from_u64((m - 1) * (m - 1) * (m + 1), 8 * m),
            rational_from_u64(m + 1, 2 * m * m * m),
        )
    };
    let w1 = rational_from_u64(m - 1, m);
    let mut w = DiagonalWitness::from_exact(spec, Family::WState, vec![w0_sq, &w1 * &w1, w2_sq]);
    // Keep the exactly rational middle coefficient free of sqrt rounding.
    w.omegas[1] = (n - 1) as f64 / n as f64;
    Ok(w)
}
