//! Mixed states as convex decompositions `ρ = Σω_k|ψ_k⟩⟨ψ_k|`.
//!
//! Any dimension is handled through the per-component pure states. One
//! dimensional mixtures can also be assembled into a density grid
//! `ρ(q_i, q_j)` on which the diagonal-after-derivative quantities are
//! evaluated directly.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::QuadraticHamiltonian;
use crate::numerics::{derivative_at, derivative_1d, gen_eig_spd, max_abs, product_eigenvalues, Grid, ScalarField, SymMatrix};
use crate::qpotential::{check_kinetic, mvqp, vnc};
use crate::states::{
    gaussian_polar, ho_box, ho_eigenstate, poschl_teller_state, PolarState, NODE_MASK, NORM_TOL,
};

/// Tolerance on `Σω_k = 1`.
pub const WEIGHT_TOL: f64 = 1e-10;

/// Largest truncated thermal weight accepted.
pub const THERMAL_TAIL: f64 = 1e-8;

/// Largest fraction of the diagonal mass allowed in masked cells.
pub const MAX_MASKED_MASS: f64 = 0.05;

/// Convex mixture of pure states sharing one grid.
#[derive(Debug, Clone)]
pub struct MixedState {
    weights: Vec<f64>,
    components: Vec<PolarState>,
    hbar: f64,
}

impl MixedState {
    pub fn new(weights: Vec<f64>, components: Vec<PolarState>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(Error::InvalidMixture(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidMixture("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        let grid = components[0].grid();
        let hbar = components[0].hbar();
        for c in &components {
            if c.grid() != grid {
                return Err(Error::GridMismatch);
            }
            if c.hbar() != hbar {
                return Err(Error::InvalidMixture("components disagree on hbar".into()));
            }
            if (c.norm() - 1.0).abs() > NORM_TOL {
                return Err(Error::NotNormalized(c.norm()));
            }
        }
        Ok(MixedState { weights, components, hbar })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[PolarState] {
        &self.components
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    /// `Ω̄(q,q) = Σω_kΩ_k²`, each component normalized on the grid.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid().len()];
        for (w, c) in self.weights.iter().zip(&self.components) {
            let k = w / c.norm();
            for (o, om) in out.iter_mut().zip(c.omega().values()) {
                *o += k * om * om;
            }
        }
        out
    }

    /// Position covariance of the mixture.
    pub fn position_cov(&self) -> SymMatrix {
        let n = self.dim();
        let mut second = DMatrix::<f64>::zeros(n, n);
        let mut mean = vec![0.0; n];
        for (w, c) in self.weights.iter().zip(&self.components) {
            let m = c.mean_position();
            let v = c.position_cov();
            for i in 0..n {
                mean[i] += w * m[i];
                for j in 0..n {
                    second[(i, j)] += w * (v.get(i, j) + m[i] * m[j]);
                }
            }
        }
        SymMatrix::symmetrize(&DMatrix::from_fn(n, n, |i, j| second[(i, j)] - mean[i] * mean[j]))
    }
}

/// `ρ(q_i, q_j)` for a one-dimensional mixture.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    grid: Grid,
    rho: DMatrix<Complex64>,
    hbar: f64,
}

impl DensityGrid {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rho.nrows()).map(|i| self.rho[(i, i)].re).collect()
    }

    /// Quadrature of the diagonal.
    pub fn trace(&self) -> f64 {
        crate::numerics::dot_weights(&self.grid, &self.diagonal())
    }

    /// Largest `|ρ − ρ†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).iter().fold(0.0, |m: f64, z| m.max(z.norm()))
    }

    /// `∂_qρ(q, q_j)` and `∂²_qρ(q, q_j)` at `q = q_j`, differenced down
    /// column `j` with `q_j` held fixed.
    fn column_derivatives(&self, j: usize) -> Result<(Complex64, Complex64)> {
        let h = self.grid.axis(0).spacing();
        let re: Vec<f64> = self.rho.column(j).iter().map(|z| z.re).collect();
        let im: Vec<f64> = self.rho.column(j).iter().map(|z| z.im).collect();
        let d1 = Complex64::new(derivative_at(&re, h, j, 1)?, derivative_at(&im, h, j, 1)?);
        let d2 = Complex64::new(derivative_at(&re, h, j, 2)?, derivative_at(&im, h, j, 2)?);
        Ok((d1, d2))
    }

    fn mask(&self) -> Vec<bool> {
        let diag = self.diagonal();
        let cut = NODE_MASK * NODE_MASK * diag.iter().fold(0.0, |m: f64, v| m.max(*v));
        diag.iter().map(|&d| d < cut).collect()
    }

    fn masked_mass(&self, mask: &[bool]) -> f64 {
        let v: Vec<f64> = self.diagonal().iter().zip(mask).map(|(d, &m)| if m { *d } else { 0.0 }).collect();
        crate::numerics::dot_weights(&self.grid, &v) / self.trace()
    }
}

/// `ρ = Σω_kψ_k(q)ψ_k*(q′)` on the shared grid.
pub fn assemble_density(ms: &MixedState) -> Result<DensityGrid> {
    if ms.dim() != 1 {
        return Err(Error::DimensionUnsupported(ms.dim()));
    }
    let n = ms.grid().len();
    let mut rho = DMatrix::<Complex64>::zeros(n, n);
    for (w, c) in ms.weights.iter().zip(&ms.components) {
        if *w == 0.0 {
            continue;
        }
        let k = w / c.norm();
        let (re, im) = c.psi();
        let psi: Vec<Complex64> = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        for j in 0..n {
            let cj = psi[j].conj() * k;
            for i in 0..n {
                rho[(i, j)] += psi[i] * cj;
            }
        }
    }
    let d = DensityGrid { grid: ms.grid().clone(), rho, hbar: ms.hbar };
    let defect = d.hermiticity_defect();
    if defect > 1e-10 * max_abs(&d.rho.map(|z| z.norm())).max(1e-300) {
        return Err(Error::NotSymmetric(defect));
    }
    let tr = d.trace();
    if (tr - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(tr));
    }
    Ok(d)
}

/// `∂Ω̄|_{q′=q}` from the off-diagonal structure and `½∂[Ω̄(q,q)]` from the
/// diagonal alone; the two agree for any density matrix.
#[derive(Debug, Clone)]
pub struct DiagonalDerivatives {
    pub column: Vec<f64>,
    pub half_diagonal: Vec<f64>,
}

impl DiagonalDerivatives {
    /// Largest difference relative to the largest value.
    pub fn residual(&self) -> f64 {
        let scale = self.half_diagonal.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        self.column
            .iter()
            .zip(&self.half_diagonal)
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
            / scale
    }
}

pub fn diagonal_derivative_identity(d: &DensityGrid) -> Result<DiagonalDerivatives> {
    let n = d.rho.nrows();
    let mask = d.mask();
    let mut column = Vec::with_capacity(n);
    for j in 0..n {
        if mask[j] {
            column.push(0.0);
            continue;
        }
        let (d1, _) = d.column_derivatives(j)?;
        let r = d.rho[(j, j)];
        column.push((r.conj() * d1).re / r.norm());
    }
    let h = d.grid.axis(0).spacing();
    let half_diagonal = derivative_1d(&d.diagonal(), h, 1)?.into_iter().map(|v| 0.5 * v).collect();
    Ok(DiagonalDerivatives { column, half_diagonal })
}

/// `Ṽnc = −ħ²∫[∂²_q|ρ(q,q′)|]_{q′=q} dq` from the density grid.
///
/// The second derivative of `|ρ|` is expanded through the smooth `ρ`:
/// `∂²|ρ| = [Re(ρ*∂²ρ) + |∂ρ|²]/|ρ| − Re(ρ*∂ρ)²/|ρ|³`.
pub fn density_vnc(d: &DensityGrid) -> Result<f64> {
    let n = d.rho.nrows();
    let mask = d.mask();
    let masked = d.masked_mass(&mask);
    if masked > MAX_MASKED_MASS {
        return Err(Error::MaskDominated(masked));
    }
    let mut vals = vec![0.0; n];
    for j in 0..n {
        if mask[j] {
            continue;
        }
        let (d1, d2) = d.column_derivatives(j)?;
        let r = d.rho[(j, j)];
        let a = r.norm();
        let re1 = (r.conj() * d1).re;
        vals[j] = ((r.conj() * d2).re + d1.norm_sqr()) / a - re1 * re1 / (a * a * a);
    }
    let h2 = d.hbar * d.hbar;
    Ok(-h2 * crate::numerics::dot_weights(&d.grid, &vals) / d.trace())
}

/// `⟨Q̄⟩_ρ = (M/2)Ṽnc` with the density-grid Ṽnc.
pub fn mixed_mvqp(d: &DensityGrid, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::DomainError(format!("kinetic coefficient must be positive, got {m}")));
    }
    Ok(0.5 * m * density_vnc(d)?)
}

/// Per-cell `∂S̄|_{q′=q} = Σω_kΩ_k²∂S_k / Ω̄(q,q)`, 0 in masked cells.
pub fn mixed_phase_gradient(ms: &MixedState) -> Vec<Vec<f64>> {
    let n = ms.dim();
    let len = ms.grid().len();
    let diag = ms.diagonal();
    let cut = NODE_MASK * NODE_MASK * diag.iter().fold(0.0, |m: f64, v| m.max(*v));
    let mut out = vec![vec![0.0; len]; n];
    for (w, c) in ms.weights.iter().zip(&ms.components) {
        if c.is_real_valued() {
            continue;
        }
        let k = w / c.norm();
        for (axis, f) in c.flux().iter().enumerate() {
            for p in 0..len {
                out[axis][p] += k * f[p];
            }
        }
    }
    for axis in out.iter_mut() {
        for (v, d) in axis.iter_mut().zip(&diag) {
            *v = if *d < cut { 0.0 } else { *v / d };
        }
    }
    out
}

/// Classical covariance of a mixture, the covariance of `∂S̄` under `Ω̄(q,q)`.
pub fn mixed_vc(ms: &MixedState) -> SymMatrix {
    let n = ms.dim();
    let bar = mixed_phase_gradient(ms);
    let diag = ms.diagonal();
    let grid = ms.grid();
    let w = |f: &dyn Fn(usize) -> f64| {
        let v: Vec<f64> = (0..grid.len()).map(|p| diag[p] * f(p)).collect();
        crate::numerics::dot_weights(grid, &v)
    };
    let mean: Vec<f64> = (0..n).map(|i| w(&|p| bar[i][p])).collect();
    SymMatrix::symmetrize(&DMatrix::from_fn(n, n, |i, j| w(&|p| bar[i][p] * bar[j][p]) - mean[i] * mean[j]))
}

/// `δṼnc = Σω_k∫Ω_k²(∂S_k − ∂S̄)(∂S_k − ∂S̄)ᵀ`, assembled cell by cell so
/// it is positive semidefinite by construction. Exactly zero when every
/// component is real-valued.
pub fn delta_vnc(ms: &MixedState) -> SymMatrix {
    let n = ms.dim();
    if ms.components.iter().all(|c| c.is_real_valued()) {
        return SymMatrix::symmetrize(&DMatrix::zeros(n, n));
    }
    let bar = mixed_phase_gradient(ms);
    let grid = ms.grid();
    let len = grid.len();
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for (w, c) in ms.weights.iter().zip(&ms.components) {
        if *w == 0.0 {
            continue;
        }
        let k = w / c.norm();
        let g: Vec<Vec<f64>> = if c.is_real_valued() {
            vec![vec![0.0; len]; n]
        } else {
            c.phase_gradient().into_iter().map(|f| f.into_values()).collect()
        };
        let mask = c.node_mask();
        let om = c.omega().values();
        for i in 0..n {
            for j in i..n {
                let cell: Vec<f64> = (0..len)
                    .map(|p| {
                        let (gi, gj) = if mask[p] { (0.0, 0.0) } else { (g[i][p], g[j][p]) };
                        om[p] * om[p] * (gi - bar[i][p]) * (gj - bar[j][p])
                    })
                    .collect();
                let v = k * crate::numerics::dot_weights(grid, &cell);
                acc[(i, j)] += v;
                if i != j {
                    acc[(j, i)] += v;
                }
            }
        }
    }
    SymMatrix::symmetrize(&acc)
}

/// `Ṽnc = Σω_kṼnc^{(k)} + δṼnc`.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexDecomposition {
    pub sum_k: SymMatrix,
    pub delta: SymMatrix,
    pub total: SymMatrix,
}

pub fn vnc_convex_decomposition(ms: &MixedState, m: &SymMatrix) -> Result<ConvexDecomposition> {
    let n = ms.dim();
    let mut sum = DMatrix::<f64>::zeros(n, n);
    for (w, c) in ms.weights.iter().zip(&ms.components) {
        check_kinetic(c, m)?;
        sum += vnc(c).as_matrix() * *w;
    }
    let delta = delta_vnc(ms);
    let total = SymMatrix::symmetrize(&(&sum + delta.as_matrix()));
    Ok(ConvexDecomposition { sum_k: SymMatrix::symmetrize(&sum), delta, total })
}

/// Mixed-state bound chain `⟨Q̄⟩_ρ ≥ Σω_k⟨Q_k⟩ ≥ (ħ²/8)Σω_kλ∧((V^{(k)})⁻¹M)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Theorem3Check {
    pub mixed_mvqp: f64,
    pub convex_mvqp: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Relative tolerance of the mixed-state inequality chains.
pub const CHAIN_TOL: f64 = 1e-6;

/// `(ħ²/8)Σω_kλ∧((V^{(k)})⁻¹M)`.
pub fn theorem3_bound(ms: &MixedState, m: &SymMatrix) -> Result<f64> {
    let mut bound = 0.0;
    for (w, c) in ms.weights.iter().zip(&ms.components) {
        check_kinetic(c, m)?;
        let ev = gen_eig_spd(m, &c.position_cov())?;
        bound += w * ev[ev.len() - 1];
    }
    Ok(0.125 * ms.hbar * ms.hbar * bound)
}

pub fn theorem3_check(ms: &MixedState, m: &SymMatrix) -> Result<Theorem3Check> {
    let bound = theorem3_bound(ms, m)?;
    let mut convex = 0.0;
    for (w, c) in ms.weights.iter().zip(&ms.components) {
        convex += w * mvqp(c, m)?;
    }
    let dec = vnc_convex_decomposition(ms, m)?;
    let mixed = 0.5 * (dec.total.as_matrix() * m.as_matrix()).trace();
    let pass = mixed >= convex * (1.0 - CHAIN_TOL) && convex >= bound * (1.0 - CHAIN_TOL);
    Ok(Theorem3Check { mixed_mvqp: mixed, convex_mvqp: convex, bound, pass })
}

/// `Tr[ṼncM] ≥ Σω_kλ∧(Ṽnc^{(k)}M) ≥ λ∧(Σω_kṼnc^{(k)}M)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MixedMinCorrelation {
    pub trace: f64,
    pub weighted_lambda: f64,
    pub lambda_of_sum: f64,
    pub pass: bool,
}

pub fn mixed_min_correlation(ms: &MixedState, m: &SymMatrix) -> Result<MixedMinCorrelation> {
    let dec = vnc_convex_decomposition(ms, m)?;
    let trace = (dec.total.as_matrix() * m.as_matrix()).trace();
    let mut weighted_lambda = 0.0;
    for (w, c) in ms.weights.iter().zip(&ms.components) {
        let ev = product_eigenvalues(&vnc(c), m)?;
        weighted_lambda += w * ev[ev.len() - 1];
    }
    let ev = product_eigenvalues(&dec.sum_k, m)?;
    let lambda_of_sum = ev[ev.len() - 1];
    let tol = CHAIN_TOL * trace.abs();
    let pass = trace - weighted_lambda >= -tol && weighted_lambda - lambda_of_sum >= -tol;
    Ok(MixedMinCorrelation { trace, weighted_lambda, lambda_of_sum, pass })
}

/// `ω_k = (1 − e^{−x})e^{−xk}` with `x = βħν`, renormalized over `k < K`.
pub fn thermal_weights(beta_hnu: f64, k: usize) -> Result<Vec<f64>> {
    if !(beta_hnu > 0.0 && beta_hnu.is_finite()) {
        return Err(Error::DomainError(format!("beta*hbar*nu must be positive, got {beta_hnu}")));
    }
    if k == 0 {
        return Err(Error::InvalidMixture("need at least one thermal component".into()));
    }
    let tail = (-beta_hnu * k as f64).exp();
    if tail >= THERMAL_TAIL {
        return Err(Error::TruncationInsufficient(tail));
    }
    let raw: Vec<f64> = (0..k).map(|i| (-beta_hnu * i as f64).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Smallest truncation with discarded weight below [`THERMAL_TAIL`].
pub fn thermal_truncation(beta_hnu: f64) -> usize {
    ((-THERMAL_TAIL.ln()) / beta_hnu).floor() as usize + 1
}

/// Grid half-width that holds every component of a `K`-term thermal state.
pub fn thermal_box(k: usize, dq0: f64) -> f64 {
    ho_box(k.saturating_sub(1) as u32, dq0)
}

/// Truncated thermal state of the harmonic oscillator with ground-state
/// width `dq0`. With `k = None` the truncation is chosen adaptively.
pub fn thermal_state(hbar: f64, beta_hnu: f64, dq0: f64, k: Option<usize>, grid: &Grid) -> Result<MixedState> {
    let k = match k {
        Some(k) => k,
        None => thermal_truncation(beta_hnu),
    };
    let weights = thermal_weights(beta_hnu, k)?;
    let components = (0..k as u32).map(|n| ho_eigenstate(n, dq0, grid, hbar)).collect::<Result<Vec<_>>>()?;
    MixedState::new(weights, components)
}

/// `Δq² = coth(βħν/2)Δq₀²` for the untruncated thermal state.
pub fn thermal_position_variance(beta_hnu: f64, dq0: f64) -> f64 {
    dq0 * dq0 / (0.5 * beta_hnu).tanh()
}

/// `⟨Q̄⟩_ρ = (ħ²M/8Δq₀²)coth(βħν/2)`; `M = ν` in frequency-scaled units.
pub fn thermal_mvqp(beta_hnu: f64, kinetic: f64, dq0: f64, hbar: f64) -> f64 {
    hbar * hbar * kinetic / (8.0 * dq0 * dq0) / (0.5 * beta_hnu).tanh()
}

/// Probability current `Ω²(M∂S + Cᵀq + ξ_p)` of a pure state.
pub fn probability_current(s: &PolarState, h: &QuadraticHamiltonian) -> Result<Vec<ScalarField>> {
    let n = s.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: h.dim() });
    }
    let flux = s.flux();
    let m = h.kinetic();
    let c = h.coupling();
    let xi = h.xi_p();
    let om = s.omega().values();
    let g = s.grid();
    (0..n)
        .map(|i| {
            let v = (0..g.len())
                .map(|p| {
                    let q = g.point(p);
                    let drift: f64 = (0..n).map(|k| c[(k, i)] * q[k]).sum::<f64>() + xi[i];
                    (0..n).map(|j| m.get(i, j) * flux[j][p]).sum::<f64>() + om[p] * om[p] * drift
                })
                .collect();
            ScalarField::new(g.clone(), v)
        })
        .collect()
}

/// Probability current of a mixture, `Σω_k j_k`.
pub fn mixed_probability_current(ms: &MixedState, h: &QuadraticHamiltonian) -> Result<Vec<ScalarField>> {
    let mut acc: Option<Vec<ScalarField>> = None;
    for (w, c) in ms.weights.iter().zip(&ms.components) {
        let j = probability_current(c, h)?;
        let k = w / c.norm();
        acc = Some(match acc {
            None => j.into_iter().map(|f| f.scale(k)).collect(),
            Some(prev) => prev
                .into_iter()
                .zip(j)
                .map(|(a, b)| a.zip_with(&b, |x, y| x + k * y))
                .collect::<Result<Vec<_>>>()?,
        });
    }
    Ok(acc.expect("mixture has components"))
}

/// One-dimensional Gaussian `exp(−(q−η)²/4V)` with phase `p₀q + ½χ(q−η)²`.
pub fn chirped_gaussian(variance: f64, mean: f64, momentum: f64, chirp: f64, grid: &Grid, hbar: f64) -> Result<PolarState> {
    let base = gaussian_polar(&SymMatrix::scalar(variance), &[mean], grid, hbar)?;
    if momentum == 0.0 && chirp == 0.0 {
        return Ok(base);
    }
    let phase = ScalarField::from_fn(grid, |q| momentum * q[0] + 0.5 * chirp * (q[0] - mean).powi(2));
    PolarState::new(base.omega().clone(), phase, hbar)
}

/// Mixture file: weights and component constructors on a shared 1-D grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec {
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    pub grid: GridSpec,
    pub components: Vec<WeightedComponent>,
}

fn default_hbar() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedComponent {
    pub weight: f64,
    pub state: ComponentSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComponentSpec {
    Ho {
        n: u32,
        #[serde(default = "one")]
        dq0: f64,
    },
    PoschlTeller {
        lambda: i64,
        mu: i64,
    },
    Gaussian {
        variance: f64,
        #[serde(default)]
        mean: f64,
        #[serde(default)]
        momentum: f64,
        #[serde(default)]
        chirp: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl MixtureSpec {
    pub fn build(&self) -> Result<MixedState> {
        let grid = Grid::line(self.grid.lower, self.grid.upper, self.grid.points)?;
        let mut weights = Vec::with_capacity(self.components.len());
        let mut states = Vec::with_capacity(self.components.len());
        for (i, c) in self.components.iter().enumerate() {
            let s = match &c.state {
                ComponentSpec::Ho { n, dq0 } => ho_eigenstate(*n, *dq0, &grid, self.hbar),
                ComponentSpec::PoschlTeller { lambda, mu } => poschl_teller_state(*lambda, *mu, &grid, self.hbar),
                ComponentSpec::Gaussian { variance, mean, momentum, chirp } => {
                    chirped_gaussian(*variance, *mean, *momentum, *chirp, &grid, self.hbar)
                }
            }
            .map_err(|e| Error::InvalidMixture(format!("components[{i}]: {e}")))?;
            weights.push(c.weight);
            states.push(s);
        }
        MixedState::new(weights, states)
    }
}

pub fn parse_mixture(text: &str) -> Result<MixedState> {
    let spec: MixtureSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    spec.build()
}

pub fn read_mixture(path: &Path) -> Result<MixedState> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_mixture(&text)
}

/// Random 1-D mixture of `k` chirped, boosted Gaussians on `grid`, which
/// must span at least ±16.
pub fn random_gaussian_mixture<R: Rng + ?Sized>(k: usize, grid: &Grid, hbar: f64, rng: &mut R) -> Result<MixedState> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    let states = (0..k)
        .map(|_| {
            let variance = rng.random_range(0.3..2.0);
            let mean = rng.random_range(-2.0..2.0);
            let momentum = rng.random_range(-1.5..1.5);
            let chirp = rng.random_range(-0.8..0.8);
            chirped_gaussian(variance, mean, momentum, chirp, grid, hbar)
        })
        .collect::<Result<Vec<_>>>()?;
    MixedState::new(weights, states)
}
