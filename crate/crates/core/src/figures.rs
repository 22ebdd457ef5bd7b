//! Data behind the two Pöschl–Teller figures, in units where `ħ²/2m = 1`.
//!
//! Closed forms are used for the tables; the quadrature counterparts on the
//! sampled `λ = μ` ground state are exposed for cross-checks.

use serde::Serialize;

use crate::bounds::{linear_bound, lq_value, pt_bound_tanh_n, pt_tanh_test_function};
use crate::error::{Error, Result};
use crate::numerics::{Grid, SymMatrix};
use crate::qpotential::mvqp;
use crate::specfun::{pt_position_variance, MAX_PT_ORDER};
use crate::states::{poschl_teller_state, PolarState, PT_BOX};

/// Mass and ħ giving `ħ²/2m = 1`.
pub const FIGURE_MASS: f64 = 0.5;
pub const FIGURE_HBAR: f64 = 1.0;

/// Largest μ accepted by the figure-2 sweep.
pub const MAX_FIGURE2_MU: i64 = 200;

/// `⟨Q⟩ = μ²/(2μ+1) · ħ²/2m` for the `λ = μ` ground state.
pub fn pt_mvqp(mu: i64, mass: f64, hbar: f64) -> f64 {
    let m = mu as f64;
    m * m / (2.0 * m + 1.0) * hbar * hbar / (2.0 * mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Figure1Row {
    pub mu: i64,
    pub n: i64,
    pub bound: f64,
    pub mvqp: f64,
}

/// `L_Q(tanhⁿ q)` for every `(μ, n)` pair, μ-major.
pub fn figure1(mus: &[i64], ns: &[i64]) -> Result<Vec<Figure1Row>> {
    let mut rows = Vec::with_capacity(mus.len() * ns.len());
    for &mu in mus {
        check_mu(mu, MAX_PT_ORDER)?;
        let q = pt_mvqp(mu, FIGURE_MASS, FIGURE_HBAR);
        for &n in ns {
            let bound = pt_bound_tanh_n(mu, n, FIGURE_MASS, FIGURE_HBAR)?;
            rows.push(Figure1Row { mu, n, bound, mvqp: q });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Figure2Row {
    pub mu: i64,
    pub mvqp: f64,
    pub variance: f64,
    pub linear_bound: f64,
    pub difference: f64,
}

/// `⟨Q⟩ − L_Q(ζq + ζ₀)` with `L_Q = (ħ²/8m)/Δq²`.
pub fn figure2(mus: &[i64]) -> Result<Vec<Figure2Row>> {
    mus.iter()
        .map(|&mu| {
            check_mu(mu, MAX_FIGURE2_MU)?;
            let q = pt_mvqp(mu, FIGURE_MASS, FIGURE_HBAR);
            let variance = pt_position_variance(mu)?;
            let linear_bound = FIGURE_HBAR * FIGURE_HBAR / (8.0 * FIGURE_MASS * variance);
            Ok(Figure2Row { mu, mvqp: q, variance, linear_bound, difference: q - linear_bound })
        })
        .collect()
}

fn check_mu(mu: i64, max: i64) -> Result<()> {
    if (1..=max).contains(&mu) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("mu must lie in 1..={max}, got {mu}")))
    }
}

/// Sampled `λ = μ` ground state on `±PT_BOX`.
pub fn figure_state(mu: i64, points: usize) -> Result<PolarState> {
    let grid = Grid::line(-PT_BOX, PT_BOX, points)?;
    poschl_teller_state(mu, mu, &grid, FIGURE_HBAR)
}

fn figure_kinetic() -> SymMatrix {
    SymMatrix::scalar(1.0 / FIGURE_MASS)
}

/// Quadrature value of `L_Q(tanhⁿ q)`; 0 for even `n` where the test
/// function has no covariance with the Ω-weighted gradient.
pub fn figure1_quadrature(mu: i64, n: i64, points: usize) -> Result<f64> {
    let s = figure_state(mu, points)?;
    let n = i32::try_from(n).map_err(|_| Error::OutOfRange(format!("n = {n}")))?;
    lq_value(&s, &figure_kinetic(), &pt_tanh_test_function(s.grid(), n))
}

/// Quadrature values of `(⟨Q⟩, L_Q(ζq + ζ₀))`.
pub fn figure2_quadrature(mu: i64, points: usize) -> Result<(f64, f64)> {
    let s = figure_state(mu, points)?;
    let m = figure_kinetic();
    Ok((mvqp(&s, &m)?, linear_bound(&s, &m)?.bound))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_is_mvqp() {
        for r in figure1(&[1, 2, 5, 20], &[1]).unwrap() {
            assert!((r.bound / r.mvqp - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_ordering_even_zero() {
        let rows = figure1(&(1..=20).collect::<Vec<_>>(), &[1, 2, 3, 5, 7]).unwrap();
        for chunk in rows.chunks(5) {
            assert_eq!(chunk[1].bound, 0.0);
            assert!(chunk[0].bound > chunk[2].bound && chunk[2].bound > chunk[3].bound && chunk[3].bound > chunk[4].bound);
        }
    }

    #[test]
    fn figure2_shape() {
        let rows = figure2(&(1..=40).collect::<Vec<_>>()).unwrap();
        assert!((rows[0].difference - (1.0 / 3.0 - 3.0 / std::f64::consts::PI.powi(2))).abs() < 1e-10);
        for w in rows.windows(2) {
            assert!(w[1].difference > 0.0 && w[1].difference < w[0].difference, "mu={}", w[1].mu);
        }
        assert!(matches!(figure2(&[0]), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn quadrature_agrees() {
        for mu in [1, 4] {
            let (q, l) = figure2_quadrature(mu, 2049).unwrap();
            let r = figure2(&[mu]).unwrap()[0];
            assert!((q / r.mvqp - 1.0).abs() < 1e-5);
            assert!((l / r.linear_bound - 1.0).abs() < 1e-5);
            assert!((figure1_quadrature(mu, 3, 2049).unwrap() / pt_bound_tanh_n(mu, 3, 0.5, 1.0).unwrap() - 1.0).abs() < 1e-5);
        }
    }
}
