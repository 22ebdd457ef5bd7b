//! Lower bounds on the mean quantum potential.
//!
//! For any test function `T₀` with nonzero variance under Ω²,
//! `⟨Q⟩ ≥ L_Q(T₀) = (ħ²/8)⟨∂T₀⟩·M⟨∂T₀⟩ / Cov(T₀, T₀)`.
//! The best bound over all `T₀` is `(ħ²/8)λ∧(**Q**)`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{position_cov as gaussian_position_cov, GaussianPureState};
use crate::numerics::{gen_eig_spd, gen_eig_spd_vectors, sym_eig, Grid, ScalarField, SymMatrix};
use crate::qpotential::{check_kinetic, mvqp, q_eigenvalues};
use crate::specfun::{double_factorial, hermite_functions, ln_double_factorial, ln_gamma, MAX_DOUBLE_FACTORIAL};
use crate::states::{mean_gradient, weighted_cov, PolarState, TestFunction};

/// Relative variance floor below which a test function counts as constant.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// Largest fraction of Ω² mass allowed in masked cells for log-derivative
/// constructions.
pub const MAX_MASKED_MASS: f64 = 0.05;

/// One evaluation of `L_Q(T₀)` against the state's ⟨Q⟩.
#[derive(Debug, Clone, Serialize)]
pub struct BoundEvaluation {
    pub value: f64,
    pub t0_label: String,
    pub mvqp: f64,
    pub slack: f64,
}

/// `L_Q(T₀)` alone.
pub fn lq_value(s: &PolarState, m: &SymMatrix, t0: &TestFunction) -> Result<f64> {
    check_kinetic(s, m)?;
    let cov = checked_variance(s, t0)?;
    let g = mean_gradient(s, t0)?;
    Ok(0.125 * s.hbar() * s.hbar() * quad_form(m, &g) / cov)
}

fn checked_variance(s: &PolarState, t0: &TestFunction) -> Result<f64> {
    let cov = weighted_cov(s, t0, t0)?;
    let w = t0.weighted(s)?;
    let second = s.integral(&w, &w);
    if !(cov > DEGENERACY_TOL * (1.0 + second)) {
        return Err(Error::DegenerateTestFunction);
    }
    Ok(cov)
}

fn quad_form(m: &SymMatrix, v: &[f64]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += v[i] * m.get(i, j) * v[j];
        }
    }
    acc
}

/// `L_Q(T₀)` with the slack `⟨Q⟩ − L_Q`.
pub fn bound_functional(s: &PolarState, m: &SymMatrix, t0: &TestFunction) -> Result<BoundEvaluation> {
    let value = lq_value(s, m, t0)?;
    let q = mvqp(s, m)?;
    Ok(BoundEvaluation {
        value,
        t0_label: t0.label().to_string(),
        mvqp: q,
        slack: q - value,
    })
}

/// `T_i = √λ_i Σ_k O_ik ∂_k ln Ω²` with `M = OᵀΛO`, in amplitude-weighted form.
pub fn auxiliary_ti(s: &PolarState, m: &SymMatrix) -> Result<Vec<TestFunction>> {
    check_kinetic(s, m)?;
    let masked = s.masked_mass();
    if masked > MAX_MASKED_MASS {
        return Err(Error::NodeDominatedState(masked));
    }
    let e = sym_eig(m)?;
    let d = s.d_omega();
    let n = s.dim();
    (0..n)
        .map(|i| {
            let scale = e.values[i].sqrt();
            let w: Vec<f64> = (0..s.grid().len())
                .map(|p| 2.0 * scale * (0..n).map(|k| e.vectors[(k, i)] * d[k][p]).sum::<f64>())
                .collect();
            Ok(TestFunction::amplitude_weighted(
                ScalarField::new(s.grid().clone(), w)?,
                format!("T_{}", i + 1),
            ))
        })
        .collect()
}

/// Result of the eigenvalue bound with a note on its status.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Bound {
    pub value: f64,
    pub label: String,
}

/// `(ħ²/8)λ∧(**Q**)`.
///
/// In one dimension the bound is attained. For more dimensions the maximizer
/// is only known to exist for Gaussian amplitudes, so the value is labelled
/// "extremal candidate".
pub fn theorem2_bound(s: &PolarState, m: &SymMatrix) -> Result<Theorem2Bound> {
    let ev = q_eigenvalues(s, m)?;
    let top = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let label = if s.dim() == 1 { "saturated (1-DF)" } else { "extremal candidate" };
    Ok(Theorem2Bound {
        value: 0.125 * s.hbar() * s.hbar() * top,
        label: label.to_string(),
    })
}

/// Range of `L_Q(ζ·q + ζ₀)` over ζ, `(ħ²/8)(λ∨, λ∧)` of the pencil `Mζ = λVζ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearBound {
    pub lower: f64,
    pub upper: f64,
    pub bound: f64,
}

fn linear_from_cov(v: &SymMatrix, m: &SymMatrix, hbar: f64) -> Result<LinearBound> {
    let ev = gen_eig_spd(m, v)?;
    let k = 0.125 * hbar * hbar;
    let lower = k * ev[0];
    let upper = k * ev[ev.len() - 1];
    Ok(LinearBound { lower, upper, bound: upper })
}

/// Linear bound from the grid position covariance.
pub fn linear_bound(s: &PolarState, m: &SymMatrix) -> Result<LinearBound> {
    check_kinetic(s, m)?;
    linear_from_cov(&s.position_cov(), m, s.hbar())
}

/// Linear bound from the exact covariance of a Gaussian state.
pub fn linear_bound_gaussian(g: &GaussianPureState, m: &SymMatrix) -> Result<LinearBound> {
    if m.order() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: m.order() });
    }
    linear_from_cov(&gaussian_position_cov(g), m, g.hbar())
}

/// `ζ∧·q`, the linear test function attaining the upper linear bound.
pub fn linear_extremizer(s: &PolarState, m: &SymMatrix) -> Result<TestFunction> {
    check_kinetic(s, m)?;
    let e = gen_eig_spd_vectors(m, &s.position_cov())?;
    let n = s.dim();
    let zeta: Vec<f64> = (0..n).map(|k| e.vectors[(k, n - 1)]).collect();
    Ok(linear_test_function(s.grid(), &zeta))
}

/// `ζ·q`.
pub fn linear_test_function(grid: &Grid, zeta: &[f64]) -> TestFunction {
    let z = zeta.to_vec();
    TestFunction::from_fn(grid, "zeta.q", move |q| z.iter().zip(q).map(|(a, b)| a * b).sum())
}

/// Ω²-weighted L² norm of `T − [⟨T⟩ − (ħ²/8)(∂lnΩ²·M⟨∂T⟩)/L_Q(T)]`,
/// relative to the standard deviation of `T`.
pub fn extremal_residual(s: &PolarState, m: &SymMatrix, t: &TestFunction) -> Result<f64> {
    let (r, _) = extremal_map(s, m, t)?;
    let cov = checked_variance(s, t)?;
    Ok((s.integral(&r, &r)).sqrt() / cov.sqrt())
}

/// Returns `Ω·(T − RHS)` and `Ω·RHS`.
fn extremal_map(s: &PolarState, m: &SymMatrix, t: &TestFunction) -> Result<(Vec<f64>, Vec<f64>)> {
    let lq = lq_value(s, m, t)?;
    if !(lq > 0.0) {
        return Err(Error::DegenerateTestFunction);
    }
    let w = t.weighted(s)?;
    let om = s.omega().values();
    let mean = s.integral(&w, om);
    let g = mean_gradient(s, t)?;
    let n = s.dim();
    let mg: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m.get(i, j) * g[j]).sum()).collect();
    let d = s.d_omega();
    let k = 0.125 * s.hbar() * s.hbar() / lq;
    let rhs: Vec<f64> = (0..om.len())
        .map(|p| {
            let proj: f64 = (0..n).map(|i| 2.0 * d[i][p] * mg[i]).sum();
            om[p] * mean - k * proj
        })
        .collect();
    let r = w.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    Ok((r, rhs))
}

/// Harmonic oscillator extremizer `α + β[x − H_{n+1}(x)/H_n(x)]` with
/// `x = q/(√2Δq₀)`, built in amplitude-weighted form so the poles at the
/// nodes of `H_n` stay finite.
pub fn ho_extremal_test_function(s: &PolarState, n: u32, dq0: f64, alpha: f64, beta: f64) -> Result<TestFunction> {
    if s.dim() != 1 {
        return Err(Error::WrongDimension(s.dim()));
    }
    let pref = (2.0 * dq0 * dq0).powf(-0.25);
    let ratio = (2.0 * (n as f64 + 1.0)).sqrt();
    let h = s.hbar();
    let nodes = s.grid().axis(0).nodes();
    let mut w = Vec::with_capacity(nodes.len());
    for (i, q) in nodes.iter().enumerate() {
        let x = q / (2f64.sqrt() * dq0);
        let phi = hermite_functions(n as i64 + 1, x)?;
        let om = s.omega().values()[i];
        let sign = (s.phase().values()[i] / h).cos().signum();
        w.push(alpha * om + beta * (x * om - pref * sign * ratio * phi[n as usize + 1]));
    }
    Ok(TestFunction::amplitude_weighted(
        ScalarField::new(s.grid().clone(), w)?,
        format!("ho_extremal(n={n})"),
    ))
}

/// Outcome of the damped fixed-point iteration on the extremal equation.
#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub test_function: TestFunction,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Damped iteration `T ← (1−d)T + d·RHS(T)` on the extremal equation.
/// Experimental: convergence is not guaranteed.
pub fn extremal_fixed_point(
    s: &PolarState,
    m: &SymMatrix,
    start: &TestFunction,
    damping: f64,
    max_iter: usize,
    tol: f64,
) -> Result<FixedPoint> {
    let mut t = start.clone();
    let mut residual = extremal_residual(s, m, &t)?;
    let mut iterations = 0;
    while residual > tol && iterations < max_iter {
        let (_, rhs) = extremal_map(s, m, &t)?;
        let w = t.weighted(s)?;
        let next: Vec<f64> = w.iter().zip(&rhs).map(|(a, b)| (1.0 - damping) * a + damping * b).collect();
        t = TestFunction::amplitude_weighted(ScalarField::new(s.grid().clone(), next)?, "fixed_point");
        residual = extremal_residual(s, m, &t)?;
        iterations += 1;
    }
    Ok(FixedPoint {
        test_function: t,
        residual,
        iterations,
        converged: residual <= tol,
    })
}

/// `C_k = (k!!)²/(2k−1)!!` for odd `k`, 0 for even `k`, `1 ≤ k ≤ 99`.
pub fn powerlaw_coefficients(k: i64) -> Result<f64> {
    if !(1..=99).contains(&k) {
        return Err(Error::OutOfRange(format!("power-law order {k} outside 1..=99")));
    }
    if k % 2 == 0 {
        return Ok(0.0);
    }
    if 2 * k - 1 <= MAX_DOUBLE_FACTORIAL {
        let a = double_factorial(k)?;
        return Ok(a * a / double_factorial(2 * k - 1)?);
    }
    Ok((2.0 * ln_double_factorial(k)? - ln_double_factorial(2 * k - 1)?).exp())
}

/// `(q − η)^k` along one axis.
pub fn powerlaw_test_function(grid: &Grid, axis: usize, eta: f64, k: i32) -> TestFunction {
    TestFunction::from_fn(grid, format!("(q{}-eta)^{k}", axis + 1), move |q| (q[axis] - eta).powi(k))
}

/// Closed form of `L_Q(tanhⁿ q)` for the Pöschl–Teller state `λ = μ`.
pub fn pt_bound_tanh_n(mu: i64, n: i64, mass: f64, hbar: f64) -> Result<f64> {
    if mu < 1 || n < 1 {
        return Err(Error::OutOfRange(format!("need mu >= 1 and n >= 1, got mu={mu}, n={n}")));
    }
    if !(mass > 0.0) {
        return Err(Error::DomainError(format!("mass must be positive, got {mass}")));
    }
    if n % 2 == 0 {
        return Ok(0.0);
    }
    let (m, nn) = (mu as f64, n as f64);
    let ln = ln_gamma(m + 0.5)? + ln_gamma(nn + m + 0.5)? + 2.0 * ln_gamma(0.5 * nn + 1.0)?
        - 0.5 * std::f64::consts::PI.ln()
        - ln_gamma(nn + 0.5)?
        - 2.0 * ln_gamma(0.5 * nn + m + 1.0)?;
    Ok(m * m * hbar * hbar / (2.0 * mass) * ln.exp())
}

/// `tanhⁿ q`.
pub fn pt_tanh_test_function(grid: &Grid, n: i32) -> TestFunction {
    TestFunction::from_fn(grid, format!("tanh^{n}(q)"), move |q| q[0].tanh().powi(n))
}

/// Random smooth test function: a polynomial of degree 1..=6 in
/// `u_k = (q_k − c_k)/w_k` with coefficients uniform in [−1, 1], times
/// `exp(−Σu_k⁴)`.
pub fn random_test_function<R: Rng + ?Sized>(grid: &Grid, center: &[f64], width: &[f64], rng: &mut R) -> Result<TestFunction> {
    let n = grid.dim();
    if center.len() != n || width.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: center.len().min(width.len()) });
    }
    if width.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::DomainError("test-function widths must be positive".into()));
    }
    let degree: u32 = rng.random_range(1..=6);
    let mut terms: Vec<([u32; 3], f64)> = Vec::new();
    for a in 0..=degree {
        for b in 0..=if n > 1 { degree - a } else { 0 } {
            for c in 0..=if n > 2 { degree - a - b } else { 0 } {
                terms.push(([a, b, c], rng.random_range(-1.0..=1.0)));
            }
        }
    }
    let (c0, w0) = (center.to_vec(), width.to_vec());
    let f = ScalarField::from_fn(grid, |q| {
        let u: Vec<f64> = (0..n).map(|k| (q[k] - c0[k]) / w0[k]).collect();
        let poly: f64 = terms
            .iter()
            .map(|(e, coef)| coef * (0..n).map(|k| u[k].powi(e[k] as i32)).product::<f64>())
            .sum();
        poly * (-u.iter().map(|x| x.powi(4)).sum::<f64>()).exp()
    });
    Ok(TestFunction::sampled(f, format!("random(deg={degree})")))
}
