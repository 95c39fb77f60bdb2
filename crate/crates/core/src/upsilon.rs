//! Maximal value of `|⟨W_N|a⊗b⟩|² − ⟨a⊗b|Σ ω_i Π_i|a⊗b⟩` over pure product
//! states, for W-state witnesses on levels 0, 1, 2.
//!
//! Each factor is taken as `a0|0…0⟩ + b Σ_j |…1_j…⟩` on `K` qubits and
//! `c0|0…0⟩ + d Σ_j |…1_j…⟩` on `L = N−K` qubits, with nonnegative real
//! amplitudes and `a0² + K b² = c0² + L d² = 1`. A witness is valid iff the
//! maximum is `<= 0`, and shifting every `ω_i` by `ε` lowers the maximum by
//! exactly `ε` because the three level weights sum to one.

use rayon::prelude::*;
use serde::Serialize;

use crate::dicke::DickeSpec;
use crate::error::{invalid, Error, Result};
use crate::witness::{cor8_witness, DiagonalWitness, Family};

pub const DEFAULT_GRID_POINTS: usize = 1001;
pub const DEFAULT_REFINE_TOL: f64 = 1e-10;
/// Acceptance window for `|Υ|` after a shift.
pub const SHIFT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpsilonArgmax {
    pub k: usize,
    pub a0: f64,
    pub c0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpsilonResult {
    pub n: usize,
    pub omegas: [f64; 3],
    pub value: f64,
    pub argmax: UpsilonArgmax,
    pub grid_step: f64,
    pub refine_tol: f64,
}

impl UpsilonResult {
    pub fn b(&self) -> f64 {
        ((1.0 - self.argmax.a0.powi(2)) / self.argmax.k as f64).sqrt()
    }

    pub fn d(&self) -> f64 {
        ((1.0 - self.argmax.c0.powi(2)) / (self.n - self.argmax.k) as f64).sqrt()
    }
}

/// Search settings: `grid_points` per axis on `[0, 1]`, then compass search
/// until the step drops below `refine_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub grid_points: usize,
    pub refine_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            refine_tol: DEFAULT_REFINE_TOL,
        }
    }
}

/// The objective at one feasible point.
pub fn upsilon_objective(n: usize, omegas: [f64; 3], k: usize, a0: f64, c0: f64) -> f64 {
    let l = n - k;
    let (a2, c2) = (a0 * a0, c0 * c0);
    let (ka, lc) = (k as f64 * (1.0 - a2), l as f64 * (1.0 - c2));
    // (K b c0 + L d a0)² expanded so that boundary points evaluate exactly.
    let overlap = ka * c2 + lc * a2 + 2.0 * a0 * c0 * (ka * lc).max(0.0).sqrt();
    let [w0, w1, w2] = omegas;
    overlap / n as f64 - w0 * a2 * c2 - w1 * (a2 + c2 - 2.0 * a2 * c2) - w2 * (1.0 - a2) * (1.0 - c2)
}

fn validate(n: usize, omegas: [f64; 3]) -> Result<()> {
    if n < 3 {
        return Err(invalid(format!("need N >= 3, got N = {n}")));
    }
    if let Some(w) = omegas.iter().find(|w| w.is_nan() || **w < 0.0) {
        return Err(invalid(format!("coefficients must be nonnegative, got {w}")));
    }
    Ok(())
}

fn refine(n: usize, omegas: [f64; 3], k: usize, start: (f64, f64, f64), step: f64, tol: f64) -> (f64, f64, f64) {
    let (mut a, mut c, mut best) = start;
    let mut h = step;
    while h >= tol {
        let mut moved = false;
        for (da, dc) in [(-h, 0.0), (h, 0.0), (0.0, -h), (0.0, h)] {
            let (na, nc) = ((a + da).clamp(0.0, 1.0), (c + dc).clamp(0.0, 1.0));
            let v = upsilon_objective(n, omegas, k, na, nc);
            if v > best {
                (a, c, best) = (na, nc, v);
                moved = true;
                break;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    (a, c, best)
}

pub fn upsilon(n: usize, omegas: [f64; 3]) -> Result<UpsilonResult> {
    upsilon_with(n, omegas, SearchConfig::default())
}

/// Global maximum over `K = 1..=⌊N/2⌋` (the objective is symmetric under
/// `K ↔ L`, `a0 ↔ c0`) and `(a0, c0) ∈ [0,1]²`. Ties go to the smallest `K`,
/// then `a0`, then `c0`.
pub fn upsilon_with(n: usize, omegas: [f64; 3], cfg: SearchConfig) -> Result<UpsilonResult> {
    validate(n, omegas)?;
    if cfg.grid_points < 2 || cfg.refine_tol.is_nan() || cfg.refine_tol <= 0.0 {
        return Err(invalid("search needs at least two grid points and a positive tolerance"));
    }
    let step = 1.0 / (cfg.grid_points - 1) as f64;
    let grid = |i: usize| if i + 1 == cfg.grid_points { 1.0 } else { i as f64 * step };

    let per_k: Vec<(usize, f64, f64, f64)> = (1..=n / 2)
        .into_par_iter()
        .map(|k| {
            let (mut ba, mut bc, mut bv) = (0.0, 0.0, f64::NEG_INFINITY);
            for i in 0..cfg.grid_points {
                let a = grid(i);
                for j in 0..cfg.grid_points {
                    let c = grid(j);
                    let v = upsilon_objective(n, omegas, k, a, c);
                    if v > bv {
                        (ba, bc, bv) = (a, c, v);
                    }
                }
            }
            let (a, c, v) = refine(n, omegas, k, (ba, bc, bv), step, cfg.refine_tol);
            (k, a, c, v)
        })
        .collect();

    let mut best: Option<(usize, f64, f64, f64)> = None;
    for cand in per_k {
        if best.is_none_or(|b| cand.3 > b.3) {
            best = Some(cand);
        }
    }
    let (k, a0, c0, value) = best.ok_or_else(|| Error::Internal("no part sizes searched".into()))?;
    Ok(UpsilonResult {
        n,
        omegas,
        value,
        argmax: UpsilonArgmax { k, a0, c0 },
        grid_step: step,
        refine_tol: cfg.refine_tol,
    })
}

/// Shift every coefficient by `Υ(ω)` so that the shifted witness has
/// `Υ = 0` within [`SHIFT_TOL`].
pub fn shift_to_witness(n: usize, omegas: [f64; 3]) -> Result<DiagonalWitness> {
    shift_to_witness_with(n, omegas, SearchConfig::default())
}

pub fn shift_to_witness_with(n: usize, omegas: [f64; 3], cfg: SearchConfig) -> Result<DiagonalWitness> {
    let first = upsilon_with(n, omegas, cfg)?;
    let shift = first.value;
    let mut shifted = omegas;
    for (i, w) in shifted.iter_mut().enumerate() {
        *w += shift;
        if *w < -SHIFT_TOL {
            return Err(Error::InfeasibleShift { index: i, shift });
        }
        *w = w.max(0.0);
    }
    let check = upsilon_with(n, shifted, cfg)?;
    if check.value.abs() > SHIFT_TOL {
        return Err(Error::Internal(format!(
            "shifted coefficients leave upsilon = {:e}",
            check.value
        )));
    }
    DiagonalWitness::from_levels(DickeSpec::entangled(n, 1)?, Family::OverlapShift, 0, &shifted)
}

/// Shifted W-state witness started from the closed-form fully PPT witness.
pub fn prop9_witness(n: usize) -> Result<DiagonalWitness> {
    let start = cor8_witness(n)?;
    shift_to_witness(n, [start.omega(0), start.omega(1), start.omega(2)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robustness::p_crit_generic;
    use crate::verification::{fully_ppt_check, DEFAULT_TOL};

    fn coarse() -> SearchConfig {
        SearchConfig {
            grid_points: 201,
            refine_tol: 1e-10,
        }
    }

    #[test]
    fn objective_examples() {
        for n in 3..8 {
            for k in 1..n {
                assert_eq!(upsilon_objective(n, [0.0; 3], k, 1.0, 1.0), 0.0);
            }
        }
        // Overlap of |0⟩ ⊗ |W_{N−1}⟩ with |W_N⟩ is (N−1)/N.
        assert!((upsilon_objective(3, [0.0; 3], 1, 1.0, 0.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn objective_shift_identity_pointwise() {
        let w = [0.3, 0.7, 0.2];
        let eps = 0.125;
        for &(k, a, c) in &[(1, 0.2, 0.9), (2, 0.5, 0.5), (3, 1.0, 0.0), (2, 0.0, 0.3)] {
            let base = upsilon_objective(7, w, k, a, c);
            let shifted = upsilon_objective(7, [w[0] + eps, w[1] + eps, w[2] + eps], k, a, c);
            assert!((base - eps - shifted).abs() < 1e-15);
        }
    }

    #[test]
    fn objective_k_l_symmetry() {
        let w = [0.4, 0.6, 0.1];
        for (a, c) in [(0.1, 0.7), (0.9, 0.3)] {
            let x = upsilon_objective(9, w, 2, a, c);
            let y = upsilon_objective(9, w, 7, c, a);
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_coefficients_give_squared_overlap() {
        for n in 3..=10 {
            let r = upsilon(n, [0.0; 3]).unwrap();
            assert!((r.value - (n - 1) as f64 / n as f64).abs() < 1e-6, "N={n}");
        }
        let r = upsilon(3, [0.0; 3]).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn projective_coefficients_are_tight() {
        let r = upsilon(3, [2.0 / 3.0; 3]).unwrap();
        assert!(r.value.abs() < 1e-9);
    }

    #[test]
    fn w_state_closed_form_is_nonpositive() {
        for n in 3..=10 {
            let w = cor8_witness(n).unwrap();
            let r = upsilon(n, [w.omega(0), w.omega(1), w.omega(2)]).unwrap();
            assert!(r.value <= 1e-12, "N={n}: {}", r.value);
        }
    }

    #[test]
    fn argmax_reproduces_value() {
        let r = upsilon(5, [0.2, 0.5, 0.9]).unwrap();
        let UpsilonArgmax { k, a0, c0 } = r.argmax;
        assert!((1..=4).contains(&k));
        assert!((0.0..=1.0).contains(&a0) && (0.0..=1.0).contains(&c0));
        assert!((upsilon_objective(5, r.omegas, k, a0, c0) - r.value).abs() <= r.refine_tol);
        assert!((r.b().powi(2) * k as f64 + a0 * a0 - 1.0).abs() < 1e-12);
        assert!((r.d().powi(2) * (5 - k) as f64 + c0 * c0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unrestricted_part_sizes_agree() {
        let w = [0.5, 0.55, 0.05];
        for n in [5usize, 6, 7] {
            let restricted = upsilon_with(n, w, coarse()).unwrap().value;
            let mut all = f64::NEG_INFINITY;
            for k in 1..n {
                for i in 0..=200 {
                    for j in 0..=200 {
                        let v = upsilon_objective(n, w, k, i as f64 / 200.0, j as f64 / 200.0);
                        all = all.max(v);
                    }
                }
            }
            assert!(restricted >= all - 1e-10, "N={n}");
        }
    }

    #[test]
    fn shift_from_zero_recovers_projective() {
        let w = shift_to_witness(3, [0.0; 3]).unwrap();
        for i in 0..3 {
            assert!((w.omega(i) - 2.0 / 3.0).abs() < 1e-9);
        }
        assert_eq!(w.family, Family::OverlapShift);
    }

    #[test]
    fn shift_is_identity_when_already_tight() {
        let w = shift_to_witness(3, [2.0 / 3.0; 3]).unwrap();
        for i in 0..3 {
            assert!((w.omega(i) - 2.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn lopsided_start_stays_nonnegative() {
        // Υ ≥ −min ω, so the shift can at most zero the smallest coefficient.
        let w = shift_to_witness_with(4, [5.0, 5.0, 0.1], coarse()).unwrap();
        assert!(w.levels().all(|i| w.omega(i) >= 0.0));
        assert!(w.omega(2) < 1e-9);
    }

    #[test]
    fn prop9_from_closed_form_start() {
        for n in 3..=6 {
            let start = cor8_witness(n).unwrap();
            let w = prop9_witness(n).unwrap();
            let r = upsilon(n, [w.omega(0), w.omega(1), w.omega(2)]).unwrap();
            assert!(r.value.abs() <= SHIFT_TOL);
            // The closed-form start already touches Υ = 0 at |0⟩⊗|W_{N−1}⟩,
            // so the shift is zero up to rounding.
            for i in 0..3 {
                assert!((w.omega(i) - start.omega(i)).abs() < 1e-12);
            }
            assert!(p_crit_generic(&w).unwrap().value >= p_crit_generic(&start).unwrap().value - 1e-12);
        }
    }

    #[test]
    fn shifted_non_ppt_start_beats_closed_form_but_is_not_fully_ppt() {
        // Scaling down the outer coefficients and shifting back to Υ = 0 gives
        // a valid witness with better noise tolerance, at the price of the
        // fully PPT property.
        let n = 4;
        let c = cor8_witness(n).unwrap();
        let start = [0.6 * c.omega(0), c.omega(1), 0.6 * c.omega(2)];
        let w = shift_to_witness(n, start).unwrap();
        let better = p_crit_generic(&w).unwrap().value;
        let base = p_crit_generic(&c).unwrap().value;
        assert!(better > base + 1e-4, "{better} vs {base}");
        assert!(!fully_ppt_check(&w, DEFAULT_TOL).unwrap().passed());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(upsilon(2, [0.0; 3]).is_err());
        assert!(upsilon(4, [0.0, -1.0, 0.0]).is_err());
    }
}
