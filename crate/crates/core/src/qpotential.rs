//! The quantum potential `Q = −(ħ²/2Ω) ∂·(M∂Ω)`, its mean value, the matrix
//! **Q** and the nonclassical momentum covariance Ṽnc of a grid state.
//!
//! Production formulas are the integrated-by-parts gradient forms
//! `⟨Q⟩ = (ħ²/2)∫∂Ω·M∂Ω` and `Ṽnc = ħ²∫∂Ω∂Ωᵀ`, which stay finite across nodes.
//! The pointwise potential and the `∫Ω²Q` form are kept as cross-checks.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{cholesky, max_abs, partial, product_eigenvalues, serialize_matrix, ScalarField, SymMatrix};
use crate::states::PolarState;

/// Pointwise field with masked (undefined) cells.
#[derive(Debug, Clone)]
pub struct MaskedField {
    /// Values; masked cells hold 0.
    pub values: ScalarField,
    pub mask: Vec<bool>,
}

impl MaskedField {
    pub fn get(&self, i: usize) -> Option<f64> {
        if self.mask[i] {
            None
        } else {
            Some(self.values.values()[i])
        }
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Checks that `m` is an SPD matrix of the state's dimension.
pub(crate) fn check_kinetic(s: &PolarState, m: &SymMatrix) -> Result<()> {
    if m.order() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            got: m.order(),
        });
    }
    cholesky(m)?;
    Ok(())
}

/// Pointwise quantum potential; cells with Ω below the node mask are flagged.
pub fn quantum_potential(s: &PolarState, m: &SymMatrix) -> Result<MaskedField> {
    check_kinetic(s, m)?;
    let g = s.grid();
    let n = g.dim();
    let (re, im) = s.psi();
    let (d_re, d_im) = s.d_psi();
    // L ψ = Σ_ij M_ij ∂_i∂_j ψ
    let mut lre = vec![0.0; g.len()];
    let mut lim = vec![0.0; g.len()];
    for i in 0..n {
        for j in 0..n {
            let mij = m.get(i, j);
            if mij == 0.0 {
                continue;
            }
            let (a, b) = if i == j {
                (partial(g, &re, i, 2)?, partial(g, &im, i, 2)?)
            } else {
                (partial(g, &d_re[j], i, 1)?, partial(g, &d_im[j], i, 1)?)
            };
            for k in 0..g.len() {
                lre[k] += mij * a[k];
                lim[k] += mij * b[k];
            }
        }
    }
    let mask = s.node_mask();
    let h = s.hbar();
    let omega = s.omega().values();
    let phase = s.phase().values();
    let flux = s.flux();
    let values = (0..g.len())
        .map(|k| {
            if mask[k] {
                return 0.0;
            }
            let w = omega[k];
            let (sin, cos) = (phase[k] / h).sin_cos();
            let radial = (cos * lre[k] + sin * lim[k]) / w;
            let mut kinetic = 0.0;
            for i in 0..n {
                for j in 0..n {
                    kinetic += flux[i][k] * m.get(i, j) * flux[j][k];
                }
            }
            kinetic /= w.powi(4);
            -0.5 * h * h * radial - 0.5 * kinetic
        })
        .collect();
    Ok(MaskedField {
        values: ScalarField::new(g.clone(), values)?,
        mask,
    })
}

/// Mean value of the quantum potential, `(ħ²/2)∫∂Ω·M∂Ω / ∫Ω²`.
pub fn mvqp(s: &PolarState, m: &SymMatrix) -> Result<f64> {
    check_kinetic(s, m)?;
    let h = s.hbar();
    let d = s.d_omega();
    let mut total = 0.0;
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            total += m.get(i, j) * s.integral(&d[i], &d[j]);
        }
    }
    Ok(0.5 * h * h * total)
}

/// `⟨Q⟩` as `∫Ω²Q` over unmasked cells; meaningful only for node-free states.
pub fn mvqp_laplacian_form(s: &PolarState, m: &SymMatrix) -> Result<f64> {
    let q = quantum_potential(s, m)?;
    let vals: Vec<f64> = (0..q.mask.len()).map(|i| q.get(i).unwrap_or(0.0)).collect();
    Ok(s.expect(&vals))
}

/// Ṽnc = ħ²∫∂Ω∂Ωᵀ / ∫Ω².
pub fn vnc(s: &PolarState) -> SymMatrix {
    let n = s.dim();
    let h = s.hbar();
    let d = s.d_omega();
    SymMatrix::symmetrize(&DMatrix::from_fn(n, n, |i, j| h * h * s.integral(&d[i], &d[j])))
}

/// Ω²-covariance of the auxiliary functions `g = ∂ ln Ω²`, using `Ωg = 2∂Ω`.
pub fn log_gradient_cov(s: &PolarState) -> SymMatrix {
    let n = s.dim();
    let d = s.d_omega();
    let om = s.omega().values();
    let mean: Vec<f64> = (0..n).map(|i| 2.0 * s.integral(om, &d[i])).collect();
    SymMatrix::symmetrize(&DMatrix::from_fn(n, n, |i, j| {
        4.0 * s.integral(&d[i], &d[j]) - mean[i] * mean[j]
    }))
}

/// Matrix **Q** = ⟨∂lnΩ² (∂lnΩ²)ᵀ⟩·M, stored unsymmetrized.
pub fn q_matrix(s: &PolarState, m: &SymMatrix) -> Result<DMatrix<f64>> {
    check_kinetic(s, m)?;
    Ok(log_gradient_cov(s).as_matrix() * m.as_matrix())
}

/// Eigenvalues of **Q**, ascending; real because **Q** is similar to a
/// symmetric matrix through the Cholesky factor of M.
pub fn q_eigenvalues(s: &PolarState, m: &SymMatrix) -> Result<Vec<f64>> {
    check_kinetic(s, m)?;
    product_eigenvalues(&log_gradient_cov(s), m)
}

/// Summary of the quantum potential of a state.
#[derive(Debug, Clone, Serialize)]
pub struct QpReport {
    #[serde(skip)]
    pub q_field: MaskedField,
    pub mvqp: f64,
    #[serde(serialize_with = "serialize_matrix")]
    pub q_matrix: DMatrix<f64>,
    pub vnc: SymMatrix,
    pub eigenvalues: Vec<f64>,
    pub masked_cells: usize,
    /// `|⟨Q⟩ − ½Tr[Ṽnc M]| / ⟨Q⟩`.
    pub trace_residual: f64,
    /// `max|(ħ²/4)**Q** − Ṽnc M| / max|Ṽnc M|`.
    pub matrix_residual: f64,
}

pub fn qp_report(s: &PolarState, m: &SymMatrix) -> Result<QpReport> {
    let q_field = quantum_potential(s, m)?;
    let mv = mvqp(s, m)?;
    let qm = q_matrix(s, m)?;
    let v = vnc(s);
    let vm = v.as_matrix() * m.as_matrix();
    let h2 = s.hbar() * s.hbar();
    let trace_residual = (mv - 0.5 * vm.trace()).abs() / mv.abs().max(f64::MIN_POSITIVE);
    let matrix_residual = max_abs(&(&qm * (h2 / 4.0) - &vm)) / max_abs(&vm).max(f64::MIN_POSITIVE);
    Ok(QpReport {
        masked_cells: q_field.masked_count(),
        q_field,
        mvqp: mv,
        eigenvalues: q_eigenvalues(s, m)?,
        q_matrix: qm,
        vnc: v,
        trace_residual,
        matrix_residual,
    })
}
