//! Position and momentum covariances, the classical/nonclassical split of
//! the momentum covariance, and the uncertainty relations built on them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{cross_cov, gaussian_vc, gaussian_vnc, momentum_cov, position_cov, GaussianPureState};
use crate::numerics::{
    hermitian_eigenvalues, max_abs, product_eigenvalues, serialize_matrix, spd_inverse, sym_eig, sym_sqrt, SymMatrix,
};
use crate::qpotential::{check_kinetic, mvqp, vnc};
use crate::states::PolarState;

/// Masked-mass fraction above which phase gradients are not trusted.
pub const MAX_MASKED_MASS: f64 = 0.05;

/// Second moments of a pure state.
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceReport {
    pub hbar: f64,
    pub v: SymMatrix,
    pub vt: SymMatrix,
    #[serde(serialize_with = "serialize_matrix")]
    pub vqp: DMatrix<f64>,
    pub vc: SymMatrix,
    pub vnc: SymMatrix,
    pub pc: Vec<f64>,
    /// `ħ²⟨∂ψ*∂ψᵀ⟩ − p_c p_cᵀ` from the wavefunction, when available.
    pub vt_direct: Option<SymMatrix>,
    /// `‖Ṽ_direct − (Ṽc + Ṽnc)‖ / ‖Ṽ_direct‖`.
    pub split_residual: Option<f64>,
}

impl CovarianceReport {
    pub fn dim(&self) -> usize {
        self.v.order()
    }
}

/// Covariance blocks from grid quadrature.
///
/// Real-valued states get `Ṽc = V_qp = 0` and `p_c = 0` exactly.
pub fn covariance_report(s: &PolarState, m: &SymMatrix) -> Result<CovarianceReport> {
    check_kinetic(s, m)?;
    let n = s.dim();
    let h = s.hbar();
    let v = s.position_cov();
    let vnc_m = vnc(s);
    let (re_d, im_d) = s.d_psi();
    let mut direct = DMatrix::from_fn(n, n, |i, j| {
        h * h * (s.integral(&re_d[i], &re_d[j]) + s.integral(&im_d[i], &im_d[j]))
    });

    if s.is_real_valued() {
        let vt = vnc_m.clone();
        let direct = SymMatrix::symmetrize(&direct);
        let residual = max_abs(&(direct.as_matrix() - vt.as_matrix())) / direct.max_abs();
        return Ok(CovarianceReport {
            hbar: h,
            v,
            vt,
            vqp: DMatrix::zeros(n, n),
            vc: SymMatrix::symmetrize(&DMatrix::zeros(n, n)),
            vnc: vnc_m,
            pc: vec![0.0; n],
            vt_direct: Some(direct),
            split_residual: Some(residual),
        });
    }

    let masked = s.masked_mass();
    if masked > MAX_MASKED_MASS {
        return Err(Error::NodeDominatedState(masked));
    }
    let ones = vec![1.0; s.grid().len()];
    let flux = s.flux();
    let pc: Vec<f64> = flux.iter().map(|f| s.integral(f, &ones)).collect();
    let grad: Vec<Vec<f64>> = s.phase_gradient().into_iter().map(|f| f.into_values()).collect();
    let vc = SymMatrix::symmetrize(&DMatrix::from_fn(n, n, |i, j| {
        let prod: Vec<f64> = grad[i].iter().zip(&grad[j]).map(|(a, b)| a * b).collect();
        s.expect(&prod) - pc[i] * pc[j]
    }));
    let mean = s.mean_position();
    let centered: Vec<Vec<f64>> = (0..n).map(|k| s.coordinate(k).iter().map(|q| q - mean[k]).collect()).collect();
    let vqp = DMatrix::from_fn(n, n, |i, j| s.integral(&centered[i], &flux[j]));
    for i in 0..n {
        for j in 0..n {
            direct[(i, j)] -= pc[i] * pc[j];
        }
    }
    let direct = SymMatrix::symmetrize(&direct);
    let vt = SymMatrix::symmetrize(&(vc.as_matrix() + vnc_m.as_matrix()));
    let residual = max_abs(&(direct.as_matrix() - vt.as_matrix())) / direct.max_abs();
    Ok(CovarianceReport {
        hbar: h,
        v,
        vt,
        vqp,
        vc,
        vnc: vnc_m,
        pc,
        vt_direct: Some(direct),
        split_residual: Some(residual),
    })
}

/// Covariance blocks of a Gaussian state in closed form.
pub fn gaussian_covariance_report(g: &GaussianPureState) -> Result<CovarianceReport> {
    Ok(CovarianceReport {
        hbar: g.hbar(),
        v: position_cov(g),
        vt: momentum_cov(g),
        vqp: cross_cov(g),
        vc: gaussian_vc(g)?,
        vnc: gaussian_vnc(g)?,
        pc: g.eta_p().to_vec(),
        vt_direct: None,
        split_residual: None,
    })
}

/// Schur-complement form of the Robertson–Schrödinger relation.
#[derive(Debug, Clone, Serialize)]
pub struct RsurCheck {
    #[serde(skip)]
    pub matrix: DMatrix<Complex64>,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

/// `Ṽ − (V_qp + iħ/2)† V⁻¹ (V_qp + iħ/2) ⪰ 0`.
pub fn rsur_check(r: &CovarianceReport, hbar: f64) -> Result<RsurCheck> {
    let n = r.dim();
    let vi = spd_inverse(&r.v)?.into_matrix();
    let a = DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(r.vqp[(i, j)], if i == j { 0.5 * hbar } else { 0.0 })
    });
    let vi_c = vi.map(|x| Complex64::new(x, 0.0));
    let vt_c = r.vt.as_matrix().map(|x| Complex64::new(x, 0.0));
    let mut matrix = vt_c - a.adjoint() * vi_c * &a;
    // Remove roundoff asymmetry before the Hermitian solve.
    matrix = (&matrix + matrix.adjoint()).map(|z| z * 0.5);
    let min_eigenvalue = hermitian_eigenvalues(&matrix)?[0];
    let pass = min_eigenvalue >= -1e-8 * r.vt.max_abs();
    Ok(RsurCheck { matrix, min_eigenvalue, pass })
}

/// One-dimensional chain of relations between ⟨Q⟩, the split variances and
/// the Robertson–Schrödinger relation.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem4Check {
    /// `Δp²Δq² − Cov(∂S,∂S)Δq² − ħ²/4`.
    pub momentum_excess: f64,
    /// `Cov(∂S,∂S)Δq² − Cov(q,p)²`.
    pub delta: f64,
    /// `⟨Q⟩Δq² − ħ²/(8m)`.
    pub mvqp_excess: f64,
    /// `Δq²Δp² − Cov(q,p)² − ħ²/4`.
    pub rsur: f64,
    /// `⟨Q⟩Δq² = ħ²/(8m)` within 1e-6 relative.
    pub mvqp_saturated: bool,
    pub pass: bool,
}

pub fn theorem4_check(r: &CovarianceReport, mvqp: f64, mass: f64, hbar: f64) -> Result<Theorem4Check> {
    if r.dim() != 1 {
        return Err(Error::WrongDimension(r.dim()));
    }
    if !(mass > 0.0) {
        return Err(Error::DomainError(format!("mass must be positive, got {mass}")));
    }
    let dq2 = r.v.get(0, 0);
    let dp2 = r.vt.get(0, 0);
    let vc = r.vc.get(0, 0);
    let cqp = r.vqp[(0, 0)];
    let h2 = hbar * hbar;
    let momentum_excess = dp2 * dq2 - vc * dq2 - 0.25 * h2;
    let delta = vc * dq2 - cqp * cqp;
    let floor = h2 / (8.0 * mass);
    let mvqp_excess = mvqp * dq2 - floor;
    let rsur = dq2 * dp2 - cqp * cqp - 0.25 * h2;
    let tol = 1e-8 * (0.25 * h2).max(dp2 * dq2);
    let mvqp_saturated = mvqp_excess.abs() <= 1e-6 * floor;
    let pass = momentum_excess >= -tol && delta >= -tol && mvqp_excess >= -1e-8 * floor;
    Ok(Theorem4Check { momentum_excess, delta, mvqp_excess, rsur, mvqp_saturated, pass })
}

/// `Tr[Ṽnc M] ≥ λ∧(Ṽnc M)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MinCorrelation {
    pub trace: f64,
    pub lambda_max: f64,
    pub pass: bool,
}

pub fn min_quantum_correlation(r: &CovarianceReport, m: &SymMatrix) -> Result<MinCorrelation> {
    if m.order() != r.dim() {
        return Err(Error::DimensionMismatch { expected: r.dim(), got: m.order() });
    }
    let trace = (r.vnc.as_matrix() * m.as_matrix()).trace();
    let ev = product_eigenvalues(&r.vnc, m)?;
    let lambda_max = ev[ev.len() - 1];
    let pass = trace - lambda_max >= -1e-8 * trace.abs();
    Ok(MinCorrelation { trace, lambda_max, pass })
}

/// `V·Ṽnc ⪰ (ħ²/4)I` for states without classical correlations.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NoClassicalCheck {
    /// Smallest eigenvalue of `V^{1/2} Ṽnc V^{1/2}`.
    pub min_eigenvalue: f64,
    /// `(ħ²/4)Tr(V⁻¹M)`.
    pub trace_lower: f64,
    /// `Tr[Ṽnc M]`.
    pub trace_nc: f64,
    pub pass: bool,
}

/// Relative tolerance of [`no_classical_corr_check`].
pub const NO_CLASSICAL_TOL: f64 = 1e-6;

pub fn no_classical_corr_check(r: &CovarianceReport, m: &SymMatrix, hbar: f64) -> Result<NoClassicalCheck> {
    if m.order() != r.dim() {
        return Err(Error::DimensionMismatch { expected: r.dim(), got: m.order() });
    }
    let ratio = r.vc.max_abs() / r.vt.max_abs();
    if ratio >= 1e-6 {
        return Err(Error::ClassicalCorrelationsPresent(ratio));
    }
    let root = sym_sqrt(&r.v)?.into_matrix();
    let prod = SymMatrix::symmetrize(&(&root * r.vnc.as_matrix() * &root));
    let min_eigenvalue = sym_eig(&prod)?.min();
    let floor = 0.25 * hbar * hbar;
    let vi = spd_inverse(&r.v)?.into_matrix();
    let trace_lower = floor * (vi * m.as_matrix()).trace();
    let trace_nc = (r.vnc.as_matrix() * m.as_matrix()).trace();
    let pass = min_eigenvalue >= floor * (1.0 - NO_CLASSICAL_TOL) && trace_lower <= trace_nc * (1.0 + NO_CLASSICAL_TOL);
    Ok(NoClassicalCheck { min_eigenvalue, trace_lower, trace_nc, pass })
}

/// `Δ = Ṽc − V_qpᵀ V⁻¹ V_qp`, positive semidefinite for Gaussian states.
pub fn classical_schur(r: &CovarianceReport) -> Result<SymMatrix> {
    let vi = spd_inverse(&r.v)?.into_matrix();
    Ok(SymMatrix::symmetrize(&(r.vc.as_matrix() - r.vqp.transpose() * vi * &r.vqp)))
}

/// Sum of per-coordinate linear bounds for independent degrees of freedom.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IndependentBound {
    /// `(ħ²/8)Σ 1/(m_iΔq_i²)`.
    pub bound: f64,
    /// `Σ⟨Q_i⟩`.
    pub mvqp_sum: f64,
    pub pass: bool,
}

pub fn independent_df_bound(states: &[PolarState], masses: &[f64]) -> Result<IndependentBound> {
    if states.len() != masses.len() {
        return Err(Error::DimensionMismatch { expected: states.len(), got: masses.len() });
    }
    let mut bound = 0.0;
    let mut mvqp_sum = 0.0;
    for (s, &m) in states.iter().zip(masses) {
        if s.dim() != 1 {
            return Err(Error::WrongDimension(s.dim()));
        }
        if !(m > 0.0) {
            return Err(Error::DomainError(format!("mass must be positive, got {m}")));
        }
        let h2 = s.hbar() * s.hbar();
        bound += h2 / (8.0 * m * s.position_cov().get(0, 0));
        mvqp_sum += mvqp(s, &SymMatrix::scalar(1.0 / m))?;
    }
    let pass = mvqp_sum >= bound * (1.0 - 1e-6);
    Ok(IndependentBound { bound, mvqp_sum, pass })
}
