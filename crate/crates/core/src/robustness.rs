//! White-noise tolerance of the witness families.
//!
//! For `ρ(p) = p·𝟙/2^N + (1−p)|D⟩⟨D|` and a diagonal witness,
//! `Tr(Wρ) = p·Tr(W)/2^N + (1−p)(ω_k − 1)`, which changes sign at
//! `p_crit = (1−ω_k) / ((1−ω_k) + Tr(W)/2^N)`. States with `p < p_crit` are
//! detected.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{binom, rational_from_u64, to_f64, Rational};
use crate::dicke::DickeSpec;
use crate::error::{invalid, Error, Result};
use crate::upsilon::prop9_witness;
use crate::witness::{
    cor8_witness, mu, prop5_witness, projective, refined_projective, thm6_witness,
    DiagonalWitness, Family,
};

/// A noise threshold, exact when every coefficient is rational.
#[derive(Debug, Clone, PartialEq)]
pub struct PCrit {
    pub value: f64,
    pub exact: Option<Rational>,
}

impl PCrit {
    fn exact(q: Rational) -> Self {
        Self {
            value: to_f64(&q),
            exact: Some(q),
        }
    }
}

fn two_pow(n: usize) -> Rational {
    Rational::from_integer(BigInt::one() << n)
}

pub fn p_crit_generic(w: &DiagonalWitness) -> Result<PCrit> {
    let n = w.spec.n;
    let k = w.spec.k;
    let omega_k = w.omega(k);
    if omega_k.is_nan() || omega_k >= 1.0 {
        return Err(Error::NoDetection { omega_k });
    }
    let exact: Option<Vec<Rational>> = w.levels().map(|i| w.exact_omega(i)).collect();
    if let Some(exact) = exact {
        let mut trace = -Rational::one();
        for (i, q) in w.levels().zip(&exact) {
            trace += q * Rational::from_integer(binom(n as i64, i as i64).into());
        }
        let gap = Rational::one() - &exact[k - w.support.0];
        if gap <= Rational::zero() {
            return Err(Error::NoDetection { omega_k });
        }
        return Ok(PCrit::exact(&gap / (&gap + trace / two_pow(n))));
    }
    let gap = 1.0 - omega_k;
    let value = gap / (gap + w.trace() / 2f64.powi(n as i32));
    Ok(PCrit { value, exact: None })
}

fn check_low_half(n: usize, k: usize) -> Result<()> {
    DickeSpec::entangled(n, k)?;
    if 2 * k > n {
        return Err(crate::error::out_of_domain(format!(
            "need 1 <= k <= N/2, got N = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// Closed form for the projective witness truncated to `0..=2k` excitations,
/// `1 / (1 + 2^{−N}[(α/(1−α))·Σ_{i≤2k} C(N,i) − 1/(1−α)])` with `α = μ(N,k)`.
/// For `k < N/2` the bracket is `((N−k)/k)·Σ C(N,i) − N/k`.
pub fn p_crit_refined_closed_form(n: usize, k: usize) -> Result<Rational> {
    check_low_half(n, k)?;
    let alpha = mu(n, k)?;
    let gap = Rational::one() - &alpha;
    if gap.is_zero() {
        return Err(Error::NoDetection { omega_k: 1.0 });
    }
    let sector_sum: Rational = (0..=2 * k)
        .map(|i| Rational::from_integer(binom(n as i64, i as i64).into()))
        .fold(Rational::zero(), |a, b| a + b);
    let bracket = &alpha / &gap * sector_sum - Rational::one() / &gap;
    Ok(Rational::one() / (Rational::one() + bracket / two_pow(n)))
}

/// `1 / (1 + 2^{−N}[2Nω₀ + N(N−2)])` for the closed-form W-state witness.
pub fn p_crit_cor8_closed_form(n: usize) -> Result<f64> {
    let w0 = cor8_witness(n)?.omega(0);
    let nf = n as f64;
    Ok(1.0 / (1.0 + (2.0 * nf * w0 + nf * (nf - 2.0)) / 2f64.powi(n as i32)))
}

/// Noise tolerance of the reference Dicke-state criterion,
/// `1 / (1 + 2^{−N}(2N−2k−1)·C(N,k))`.
pub fn p_crit_huber(n: usize, k: usize) -> Result<Rational> {
    check_low_half(n, k)?;
    let c = Rational::from_integer(binom(n as i64, k as i64).into());
    let factor = rational_from_u64((2 * n - 2 * k - 1) as u64, 1);
    Ok(Rational::one() / (Rational::one() + factor * c / two_pow(n)))
}

/// Anything with a noise threshold: a witness family or the external
/// reference criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Criterion {
    Witness(Family),
    Huber,
}

impl Criterion {
    pub fn tag(&self) -> &'static str {
        match self {
            Criterion::Witness(f) => f.tag(),
            Criterion::Huber => "huber",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl Serialize for Criterion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "huber" {
            return Ok(Criterion::Huber);
        }
        s.parse::<Family>()
            .map(Criterion::Witness)
            .map_err(|_| invalid(format!("unknown criterion '{s}'")))
    }
}

/// Build the witness of `family` for `(N, k)`. Families defined only for
/// W states or half filling reject other `k`.
pub fn build_witness(family: Family, n: usize, k: usize) -> Result<DiagonalWitness> {
    let spec = DickeSpec::entangled(n, k)?;
    match family {
        Family::Projective => projective(spec),
        Family::Refined => refined_projective(spec),
        Family::FullyPpt => thm6_witness(spec),
        Family::HalfFilling => {
            if !spec.is_half_filled() {
                return Err(invalid(format!("{family} needs k = N/2, got N = {n}, k = {k}")));
            }
            prop5_witness(n)
        }
        Family::WState | Family::OverlapShift => {
            if k != 1 {
                return Err(invalid(format!("{family} is defined for k = 1 only, got k = {k}")));
            }
            if family == Family::WState {
                cor8_witness(n)
            } else {
                prop9_witness(n)
            }
        }
    }
}

/// One row of a robustness table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessRecord {
    pub n: usize,
    pub k: usize,
    pub family: Criterion,
    pub p_crit: f64,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub exact: Option<Rational>,
}

pub(crate) fn serialize_opt_rational<S: serde::Serializer>(
    q: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&format!("{}/{}", q.numer(), q.denom())),
        None => s.serialize_none(),
    }
}

/// `p_crit` for `criterion` at `(N, k)`. For `k > N/2` the reference
/// criterion is evaluated at `N−k`.
pub fn p_crit(criterion: Criterion, n: usize, k: usize) -> Result<RobustnessRecord> {
    let (value, exact) = match criterion {
        Criterion::Huber => {
            let spec = DickeSpec::entangled(n, k)?;
            let q = p_crit_huber(n, spec.reduced_k())?;
            (to_f64(&q), Some(q))
        }
        Criterion::Witness(family) => {
            let pc = p_crit_generic(&build_witness(family, n, k)?)?;
            (pc.value, pc.exact)
        }
    };
    Ok(RobustnessRecord {
        n,
        k,
        family: criterion,
        p_crit: value,
        exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Half filling: projective, half-filling and fully PPT witnesses.
    Fig2,
    /// Refined projective minus the reference criterion.
    Fig3a,
    /// Fully PPT witness relative to the reference criterion.
    Fig3b,
    /// W states: closed-form, shifted and reference criteria.
    Fig4,
}

impl Figure {
    pub fn first_n(&self) -> usize {
        match self {
            Figure::Fig2 | Figure::Fig3a | Figure::Fig3b => 4,
            Figure::Fig4 => 3,
        }
    }

    pub fn default_n_max(&self) -> usize {
        match self {
            Figure::Fig2 => 14,
            Figure::Fig3a | Figure::Fig3b => 16,
            Figure::Fig4 => 10,
        }
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" | "fig2" => Ok(Figure::Fig2),
            "3a" | "fig3a" => Ok(Figure::Fig3a),
            "3b" | "fig3b" => Ok(Figure::Fig3b),
            "4" | "fig4" => Ok(Figure::Fig4),
            _ => Err(invalid(format!("unknown figure '{s}' (expected 2, 3a, 3b or 4)"))),
        }
    }
}

/// Per-`N` thresholds for several criteria at a fixed `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub k: usize,
    pub records: Vec<RobustnessRecord>,
}

/// A difference between two thresholds at `(N, k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceRow {
    pub n: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FigureData {
    Comparison(Vec<ComparisonRow>),
    Difference(Vec<DifferenceRow>),
}

pub const MAX_FIGURE_N: usize = 24;

fn compare(n: usize, k: usize, criteria: &[Criterion]) -> Result<ComparisonRow> {
    let records = criteria
        .iter()
        .map(|&c| p_crit(c, n, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonRow { n, k, records })
}

/// Difference cells cover `k = 1..N−1`; both criteria are symmetric under `k ↦ N−k`.
fn difference_cells(n_max: usize) -> Vec<(usize, usize)> {
    (4..=n_max)
        .flat_map(|n| (1..n).map(move |k| (n, k)))
        .collect()
}

pub fn figure_data(figure: Figure, n_max: usize) -> Result<FigureData> {
    if n_max > MAX_FIGURE_N {
        return Err(invalid(format!(
            "figure data is limited to N <= {MAX_FIGURE_N}, got {n_max}"
        )));
    }
    if n_max < figure.first_n() {
        return Err(invalid(format!(
            "n_max must be at least {}, got {n_max}",
            figure.first_n()
        )));
    }
    use Criterion::{Huber, Witness};
    match figure {
        Figure::Fig2 => {
            let crit = [
                Witness(Family::Projective),
                Witness(Family::HalfFilling),
                Witness(Family::FullyPpt),
            ];
            let rows = (4..=n_max)
                .step_by(2)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|n| compare(n, n / 2, &crit))
                .collect::<Result<Vec<_>>>()?;
            Ok(FigureData::Comparison(rows))
        }
        Figure::Fig4 => {
            let crit = [Witness(Family::WState), Witness(Family::OverlapShift), Huber];
            let rows = (3..=n_max)
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|n| compare(n, 1, &crit))
                .collect::<Result<Vec<_>>>()?;
            Ok(FigureData::Comparison(rows))
        }
        Figure::Fig3a | Figure::Fig3b => {
            let rows = difference_cells(n_max)
                .into_par_iter()
                .map(|(n, k)| -> Result<DifferenceRow> {
                    let huber = p_crit(Huber, n, k)?.p_crit;
                    let value = if figure == Figure::Fig3a {
                        p_crit(Witness(Family::Refined), n, k)?.p_crit - huber
                    } else {
                        (p_crit(Witness(Family::FullyPpt), n, k)?.p_crit - huber) / (1.0 - huber)
                    };
                    Ok(DifferenceRow { n, k, value })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FigureData::Difference(rows))
        }
    }
}

impl FigureData {
    /// Flatten comparison tables into records (difference tables yield none).
    pub fn records(&self) -> Vec<RobustnessRecord> {
        match self {
            FigureData::Comparison(rows) => rows.iter().flat_map(|r| r.records.clone()).collect(),
            FigureData::Difference(_) => Vec::new(),
        }
    }
}
