//! Exact Gaussian states through symplectic matrices.
//!
//! A pure Gaussian state is `(S, η_q, η_p, ħ)` with `S = [[a, b], [c, d]]`
//! symplectic. Its phase-space covariance is `(ħ/2)SSᵀ`, so
//! `V = (ħ/2)(aaᵀ+bbᵀ)`, `Ṽ = (ħ/2)(ccᵀ+ddᵀ)` and `V_qp = (ħ/2)(acᵀ+bdᵀ)`.
//! Quadratic Hamiltonians act by `S → S_t S` with `S_t = exp(J H t)`.
//!
//! The wavefunction is
//! `ψ ∝ exp[−(q−η_q)·Σ(q−η_q)/(2ħ) + (i/ħ)(η_p·q − ½η_q·η_p)] / √det(a+ib)`
//! with `Σ = [I − i(caᵀ+dbᵀ)](aaᵀ+bbᵀ)⁻¹`. Its phase is therefore
//! `S(q) = −½(q−η_q)·ImΣ(q−η_q) + η_p·q − ½η_q·η_p − (ħ/2)Arg det(a+ib)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{cholesky, expm, max_abs, spd_inverse, Grid, ScalarField, SymMatrix};
use crate::states::{gaussian_amplitude, PolarState};

/// Tolerance on the symplectic constraints, relative to `max(1, ‖S‖²)`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Standard symplectic form `J = [[0, I], [−I, 0]]`.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if j == i + n {
            1.0
        } else if i == j + n {
            -1.0
        } else {
            0.0
        }
    })
}

/// `H = ½x·[[L, C], [Cᵀ, M]]x + ξ_q·q + ξ_p·p + h₀` with `x = (q, p)`.
#[derive(Debug, Clone)]
pub struct QuadraticHamiltonian {
    m: SymMatrix,
    c: DMatrix<f64>,
    l: SymMatrix,
    xi_p: Vec<f64>,
    xi_q: Vec<f64>,
    h0: f64,
}

impl QuadraticHamiltonian {
    pub fn new(m: SymMatrix, c: DMatrix<f64>, l: SymMatrix, xi_p: Vec<f64>, xi_q: Vec<f64>, h0: f64) -> Result<Self> {
        let n = m.order();
        for got in [c.nrows(), c.ncols(), l.order(), xi_p.len(), xi_q.len()] {
            if got != n {
                return Err(Error::DimensionMismatch { expected: n, got });
            }
        }
        cholesky(&m)?;
        Ok(QuadraticHamiltonian { m, c, l, xi_p, xi_q, h0 })
    }

    /// `Σ ν_i(p_i² + q_i²)/2`.
    pub fn harmonic(nu: &[f64]) -> Result<Self> {
        let m = SymMatrix::from_diagonal(nu);
        let n = nu.len();
        QuadraticHamiltonian::new(m.clone(), DMatrix::zeros(n, n), m, vec![0.0; n], vec![0.0; n], 0.0)
    }

    /// `Σ ν_i(p_i² − q_i²)/2`.
    pub fn inverted(nu: &[f64]) -> Result<Self> {
        let m = SymMatrix::from_diagonal(nu);
        let n = nu.len();
        let l = m.scale(-1.0);
        QuadraticHamiltonian::new(m, DMatrix::zeros(n, n), l, vec![0.0; n], vec![0.0; n], 0.0)
    }

    pub fn dim(&self) -> usize {
        self.m.order()
    }

    pub fn kinetic(&self) -> &SymMatrix {
        &self.m
    }

    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn potential(&self) -> &SymMatrix {
        &self.l
    }

    pub fn xi_p(&self) -> &[f64] {
        &self.xi_p
    }

    pub fn xi_q(&self) -> &[f64] {
        &self.xi_q
    }

    pub fn constant(&self) -> f64 {
        self.h0
    }

    /// `[[L, C], [Cᵀ, M]]`.
    pub fn block_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => self.l.get(i, j),
            (true, false) => self.c[(i, j - n)],
            (false, true) => self.c[(j, i - n)],
            (false, false) => self.m.get(i - n, j - n),
        })
    }

    /// `J·H`.
    pub fn generator(&self) -> DMatrix<f64> {
        symplectic_form(self.dim()) * self.block_matrix()
    }
}

/// 2n×2n symplectic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    full: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// From blocks, checked against all symplectic constraints.
    pub fn from_blocks(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        for m in [a, b, c, d] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.nrows().max(m.ncols()) });
            }
        }
        let full = DMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - n)],
            (false, true) => c[(i - n, j)],
            (false, false) => d[(i - n, j - n)],
        });
        SymplecticMatrix::new(full)
    }

    /// From the full matrix, checked against all symplectic constraints.
    pub fn new(full: DMatrix<f64>) -> Result<Self> {
        if !full.is_square() || full.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: full.nrows() + full.nrows() % 2, got: full.ncols() });
        }
        let s = SymplecticMatrix { full };
        let r = s.residual();
        if r > SYMPLECTIC_TOL {
            return Err(Error::DomainError(format!("matrix is not symplectic (residual {r:e})")));
        }
        Ok(s)
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix { full: DMatrix::identity(2 * n, 2 * n) }
    }

    /// `a = diag(s)`, `d = diag(1/s)`, `b = c = 0`.
    pub fn squeeze(s: &[f64]) -> Result<Self> {
        if s.iter().any(|&x| x == 0.0 || !x.is_finite()) {
            return Err(Error::DomainError("squeeze factors must be finite and nonzero".into()));
        }
        let n = s.len();
        Ok(SymplecticMatrix {
            full: DMatrix::from_fn(2 * n, 2 * n, |i, j| {
                if i != j {
                    0.0
                } else if i < n {
                    s[i]
                } else {
                    1.0 / s[i - n]
                }
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.full.nrows() / 2
    }

    pub fn full(&self) -> &DMatrix<f64> {
        &self.full
    }

    fn block(&self, r: usize, c: usize) -> DMatrix<f64> {
        let n = self.dim();
        self.full.view((r * n, c * n), (n, n)).into_owned()
    }

    pub fn a(&self) -> DMatrix<f64> {
        self.block(0, 0)
    }

    pub fn b(&self) -> DMatrix<f64> {
        self.block(0, 1)
    }

    pub fn c(&self) -> DMatrix<f64> {
        self.block(1, 0)
    }

    pub fn d(&self) -> DMatrix<f64> {
        self.block(1, 1)
    }

    /// `self · other`.
    pub fn compose(&self, other: &SymplecticMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(SymplecticMatrix { full: &self.full * &other.full })
    }

    /// Largest violation of `SᵀJS = J` and of the six block constraints,
    /// relative to `max(1, ‖S‖²_max)`.
    pub fn residual(&self) -> f64 {
        let n = self.dim();
        let j = symplectic_form(n);
        let (a, b, c, d) = (self.a(), self.b(), self.c(), self.d());
        let id = DMatrix::<f64>::identity(n, n);
        let checks = [
            max_abs(&(self.full.transpose() * &j * &self.full - &j)),
            max_abs(&(&a * d.transpose() - &b * c.transpose() - &id)),
            max_abs(&(a.transpose() * &d - c.transpose() * &b - &id)),
            max_abs(&(a.transpose() * &c - c.transpose() * &a)),
            max_abs(&(&a * b.transpose() - &b * a.transpose())),
            max_abs(&(&c * d.transpose() - &d * c.transpose())),
            max_abs(&(b.transpose() * &d - d.transpose() * &b)),
        ];
        let scale = max_abs(&self.full).powi(2).max(1.0);
        checks.iter().fold(0.0, |m: f64, v| m.max(*v)) / scale
    }

    /// One Newton step towards the symplectic group, `S ← S(I + ½JE)` with
    /// `E = SᵀJS − J`.
    fn reproject(&self) -> Self {
        let n = self.dim();
        let j = symplectic_form(n);
        let e = self.full.transpose() * &j * &self.full - &j;
        let x = &j * e * 0.5;
        SymplecticMatrix { full: &self.full * (DMatrix::identity(2 * n, 2 * n) + x) }
    }
}

/// `S_t = exp(J H t)`, re-projected onto the group when drift exceeds 1e-10.
pub fn symplectic_propagator(h: &QuadraticHamiltonian, t: f64) -> Result<SymplecticMatrix> {
    let full = expm(&(h.generator() * t))?;
    let mut s = SymplecticMatrix { full };
    if s.residual() > SYMPLECTIC_TOL {
        s = s.reproject();
    }
    let r = s.residual();
    if r > SYMPLECTIC_TOL {
        return Err(Error::ExpDivergence(r));
    }
    Ok(s)
}

/// `Σ = [I − i(caᵀ+dbᵀ)](aaᵀ+bbᵀ)⁻¹`.
pub fn sigma_matrix(s: &SymplecticMatrix) -> Result<DMatrix<Complex64>> {
    let (a, b, c, d) = (s.a(), s.b(), s.c(), s.d());
    let gram = SymMatrix::symmetrize(&(&a * a.transpose() + &b * b.transpose()));
    let inv = spd_inverse(&gram).map_err(|_| Error::SingularBlock)?.into_matrix();
    let re = inv.clone();
    let im = -((&c * a.transpose() + &d * b.transpose()) * inv);
    Ok(DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)])))
}

/// Pure Gaussian state.
#[derive(Debug, Clone)]
pub struct GaussianPureState {
    s: SymplecticMatrix,
    eta_q: Vec<f64>,
    eta_p: Vec<f64>,
    hbar: f64,
    det_phase: f64,
}

impl GaussianPureState {
    pub fn new(s: SymplecticMatrix, eta_q: Vec<f64>, eta_p: Vec<f64>, hbar: f64) -> Result<Self> {
        let n = s.dim();
        for got in [eta_q.len(), eta_p.len()] {
            if got != n {
                return Err(Error::DimensionMismatch { expected: n, got });
            }
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::DomainError(format!("hbar must be positive, got {hbar}")));
        }
        let det_phase = det_a_ib(&s).arg();
        let g = GaussianPureState { s, eta_q, eta_p, hbar, det_phase };
        sigma_matrix(&g.s)?;
        Ok(g)
    }

    /// Minimum-uncertainty state with `S = I`.
    pub fn coherent(eta_q: Vec<f64>, eta_p: Vec<f64>, hbar: f64) -> Result<Self> {
        let n = eta_q.len();
        GaussianPureState::new(SymplecticMatrix::identity(n), eta_q, eta_p, hbar)
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    pub fn symplectic(&self) -> &SymplecticMatrix {
        &self.s
    }

    pub fn eta_q(&self) -> &[f64] {
        &self.eta_q
    }

    pub fn eta_p(&self) -> &[f64] {
        &self.eta_p
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `Arg det(a+ib)`, continued along the evolution path.
    pub fn det_phase(&self) -> f64 {
        self.det_phase
    }
}

fn det_a_ib(s: &SymplecticMatrix) -> Complex64 {
    let (a, b) = (s.a(), s.b());
    let m = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| Complex64::new(a[(i, j)], b[(i, j)]));
    m.determinant()
}

/// `V = (ħ/2)(aaᵀ+bbᵀ)`.
pub fn position_cov(g: &GaussianPureState) -> SymMatrix {
    let (a, b) = (g.s.a(), g.s.b());
    SymMatrix::symmetrize(&((&a * a.transpose() + &b * b.transpose()) * (0.5 * g.hbar)))
}

/// `Ṽ = (ħ/2)(ccᵀ+ddᵀ)`.
pub fn momentum_cov(g: &GaussianPureState) -> SymMatrix {
    let (c, d) = (g.s.c(), g.s.d());
    SymMatrix::symmetrize(&((&c * c.transpose() + &d * d.transpose()) * (0.5 * g.hbar)))
}

/// `V_qp = (ħ/2)(acᵀ+bdᵀ)`.
pub fn cross_cov(g: &GaussianPureState) -> DMatrix<f64> {
    let (a, b, c, d) = (g.s.a(), g.s.b(), g.s.c(), g.s.d());
    (&a * c.transpose() + &b * d.transpose()) * (0.5 * g.hbar)
}

/// `Ṽnc = (ħ²/4)V⁻¹`.
pub fn gaussian_vnc(g: &GaussianPureState) -> Result<SymMatrix> {
    Ok(spd_inverse(&position_cov(g))?.scale(0.25 * g.hbar * g.hbar))
}

/// `Ṽc = Ṽ − Ṽnc`.
pub fn gaussian_vc(g: &GaussianPureState) -> Result<SymMatrix> {
    let vnc = gaussian_vnc(g)?;
    Ok(SymMatrix::symmetrize(&(momentum_cov(g).as_matrix() - vnc.as_matrix())))
}

/// Evolution under a quadratic Hamiltonian for time `t`.
pub fn evolve(g: &GaussianPureState, h: &QuadraticHamiltonian, t: f64) -> Result<GaussianPureState> {
    let n = g.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: h.dim() });
    }
    if t == 0.0 {
        return Ok(g.clone());
    }
    let st = symplectic_propagator(h, t)?;
    let s_new = st.compose(&g.s)?;

    // Follow Arg det(a+ib) through intermediate times so it stays continuous.
    let gen_norm = max_abs(&h.generator()) * (2 * n) as f64;
    let steps = ((gen_norm * t.abs() * 8.0).ceil() as usize).clamp(8, 4096);
    let mut phase = g.det_phase;
    let mut prev = det_a_ib(&g.s).arg();
    for k in 1..=steps {
        let tk = t * k as f64 / steps as f64;
        let sk = if k == steps { s_new.clone() } else { symplectic_propagator(h, tk)?.compose(&g.s)? };
        let cur = det_a_ib(&sk).arg();
        let mut d = cur - prev;
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        phase += d;
        prev = cur;
    }

    let eta = DVector::from_iterator(2 * n, g.eta_q.iter().chain(&g.eta_p).copied());
    let mut moved = st.full() * eta;
    let xi = DVector::from_iterator(2 * n, h.xi_q().iter().chain(h.xi_p()).copied());
    if xi.iter().any(|&v| v != 0.0) {
        let jxi = symplectic_form(n) * xi;
        moved += propagated_integral(h, &jxi, t)?;
    }
    Ok(GaussianPureState {
        s: s_new,
        eta_q: moved.rows(0, n).iter().copied().collect(),
        eta_p: moved.rows(n, n).iter().copied().collect(),
        hbar: g.hbar,
        det_phase: phase,
    })
}

/// `∫₀ᵗ S_{t'} v dt'` by adaptive Simpson.
fn propagated_integral(h: &QuadraticHamiltonian, v: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
    let f = |x: f64| -> Result<DVector<f64>> { Ok(symplectic_propagator(h, x)?.full() * v) };
    let fa = f(0.0)?;
    let fm = f(0.5 * t)?;
    let fb = f(t)?;
    let whole = (&fa + &fm * 4.0 + &fb) * (t / 6.0);
    let scale = whole.amax().max(v.amax() * t.abs()).max(f64::MIN_POSITIVE);
    adaptive_simpson(&f, 0.0, t, fa, fm, fb, whole, 1e-13 * scale, 40)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &dyn Fn(f64) -> Result<DVector<f64>>,
    a: f64,
    b: f64,
    fa: DVector<f64>,
    fm: DVector<f64>,
    fb: DVector<f64>,
    whole: DVector<f64>,
    tol: f64,
    depth: u32,
) -> Result<DVector<f64>> {
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m))?;
    let frm = f(0.5 * (m + b))?;
    let left = (&fa + &flm * 4.0 + &fm) * ((m - a) / 6.0);
    let right = (&fm + &frm * 4.0 + &fb) * ((b - m) / 6.0);
    let both = &left + &right;
    let err = (&both - &whole).amax();
    if depth == 0 || err <= 15.0 * tol {
        return Ok(&both + (&both - &whole) / 15.0);
    }
    let l = adaptive_simpson(f, a, m, fa, flm, fm.clone(), left, 0.5 * tol, depth - 1)?;
    let r = adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

fn check_m(g: &GaussianPureState, m: &SymMatrix) -> Result<()> {
    if m.order() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: m.order() });
    }
    cholesky(m)?;
    Ok(())
}

/// Pointwise `Q(q) = (ħ²/4)Tr(V⁻¹M) − (ħ²/8)(q−η)·V⁻¹MV⁻¹(q−η)`.
pub fn gaussian_qp(g: &GaussianPureState, m: &SymMatrix, q: &[f64]) -> Result<f64> {
    check_m(g, m)?;
    if q.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: q.len() });
    }
    let vi = spd_inverse(&position_cov(g))?.into_matrix();
    let h2 = g.hbar * g.hbar;
    let x = DVector::from_iterator(q.len(), q.iter().zip(&g.eta_q).map(|(a, b)| a - b));
    let y = &vi * &x;
    let quad = (y.transpose() * m.as_matrix() * &y)[(0, 0)];
    Ok(0.25 * h2 * (&vi * m.as_matrix()).trace() - 0.125 * h2 * quad)
}

/// `⟨Q⟩ = (ħ²/8)Tr(V⁻¹M)`.
pub fn gaussian_mvqp(g: &GaussianPureState, m: &SymMatrix) -> Result<f64> {
    check_m(g, m)?;
    let vi = spd_inverse(&position_cov(g))?.into_matrix();
    Ok(0.125 * g.hbar * g.hbar * (vi * m.as_matrix()).trace())
}

/// Samples the state on a grid in polar form.
pub fn to_polar(g: &GaussianPureState, grid: &Grid) -> Result<PolarState> {
    let v = position_cov(g);
    let omega = gaussian_amplitude(&v, &g.eta_q, grid)?;
    let sigma = sigma_matrix(&g.s)?;
    let n = g.dim();
    let im = DMatrix::from_fn(n, n, |i, j| sigma[(i, j)].im);
    let im = (&im + im.transpose()) * 0.5;
    let eq = &g.eta_q;
    let ep = &g.eta_p;
    let constant = -0.5 * eq.iter().zip(ep).map(|(a, b)| a * b).sum::<f64>() - 0.5 * g.hbar * g.det_phase;
    let phase = ScalarField::from_fn(grid, |q| {
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += (q[i] - eq[i]) * im[(i, j)] * (q[j] - eq[j]);
            }
        }
        let lin: f64 = ep.iter().zip(q).map(|(p, x)| p * x).sum();
        -0.5 * quad + lin + constant
    });
    PolarState::new(omega, phase, g.hbar)
}

/// Grid recommended for [`to_polar`]: `η_i ± 8√V_ii` with `points` per axis.
pub fn recommended_grid(g: &GaussianPureState, points: usize) -> Result<Grid> {
    let v = position_cov(g);
    let axes = crate::states::gaussian_box(&v, &g.eta_q)
        .into_iter()
        .map(|(lo, hi)| crate::numerics::Axis::new(lo, hi, points))
        .collect::<Result<Vec<_>>>()?;
    Grid::new(axes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagator_at_zero_is_identity() {
        let h = QuadraticHamiltonian::harmonic(&[1.0, 2.0]).unwrap();
        let s = symplectic_propagator(&h, 0.0).unwrap();
        assert_eq!(s, SymplecticMatrix::identity(2));
    }

    #[test]
    fn harmonic_and_inverted_blocks() {
        let nu = [0.7, 1.9];
        let t = 0.83;
        let s = symplectic_propagator(&QuadraticHamiltonian::harmonic(&nu).unwrap(), t).unwrap();
        for i in 0..2 {
            let w = nu[i] * t;
            assert!((s.a()[(i, i)] - w.cos()).abs() < 1e-13);
            assert!((s.b()[(i, i)] - w.sin()).abs() < 1e-13);
            assert!((s.c()[(i, i)] + w.sin()).abs() < 1e-13);
            assert!((s.d()[(i, i)] - w.cos()).abs() < 1e-13);
        }
        let s = symplectic_propagator(&QuadraticHamiltonian::inverted(&[1.2]).unwrap(), t).unwrap();
        let w: f64 = 1.2 * t;
        assert!((s.a()[(0, 0)] - w.cosh()).abs() < 1e-13);
        assert!((s.b()[(0, 0)] - w.sinh()).abs() < 1e-13);
        assert!((s.c()[(0, 0)] - w.sinh()).abs() < 1e-13);
    }

    #[test]
    fn sigma_cases() {
        let id = sigma_matrix(&SymplecticMatrix::identity(2)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - Complex64::new(e, 0.0)).norm() < 1e-15);
            }
        }
        let sq = sigma_matrix(&SymplecticMatrix::squeeze(&[2.0, 0.5]).unwrap()).unwrap();
        assert!((sq[(0, 0)].re - 0.25).abs() < 1e-15 && (sq[(1, 1)].re - 4.0).abs() < 1e-14);
        assert!(sq.iter().all(|z| z.im == 0.0));
        let h = QuadraticHamiltonian::harmonic(&[1.0]).unwrap();
        let st = symplectic_propagator(&h, PI / 2.0).unwrap();
        let s = sigma_matrix(&st).unwrap();
        assert!((s[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn covariances() {
        let g = GaussianPureState::coherent(vec![0.0, 0.0], vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(position_cov(&g), SymMatrix::identity(2).scale(0.5));
        let sq = GaussianPureState::new(SymplecticMatrix::squeeze(&[2.0, 3.0]).unwrap(), vec![0.0; 2], vec![0.0; 2], 0.8).unwrap();
        let v = position_cov(&sq);
        assert!((v.get(0, 0) - 0.4 * 4.0).abs() < 1e-15 && (v.get(1, 1) - 0.4 * 9.0).abs() < 1e-15);
    }

    #[test]
    fn evolved_squeeze_closed_form() {
        let nu = [0.9, 1.4];
        let a = [2.0, 0.7];
        let hbar = 1.3;
        let t = 1.1;
        let g = GaussianPureState::new(SymplecticMatrix::squeeze(&a).unwrap(), vec![0.4, -0.2], vec![0.3, 0.5], hbar).unwrap();
        let gt = evolve(&g, &QuadraticHamiltonian::harmonic(&nu).unwrap(), t).unwrap();
        let v = position_cov(&gt);
        for i in 0..2 {
            let (s, c) = (nu[i] * t).sin_cos();
            let expect = 0.5 * hbar * (c * c * a[i] * a[i] + s * s / (a[i] * a[i]));
            assert!((v.get(i, i) - expect).abs() < 1e-12);
            let eq = c * g.eta_q()[i] + s * g.eta_p()[i];
            assert!((gt.eta_q()[i] - eq).abs() < 1e-12);
        }
    }

    #[test]
    fn inverted_oscillator_spreading() {
        let nu = 0.8;
        let h = QuadraticHamiltonian::inverted(&[nu]).unwrap();
        let g = GaussianPureState::coherent(vec![0.0], vec![0.0], 1.0).unwrap();
        for t in [0.0, 0.25, 0.5, 1.0] {
            let gt = evolve(&g, &h, t).unwrap();
            let v = position_cov(&gt).get(0, 0);
            assert!((v - 0.5 * (2.0 * nu * t).cosh()).abs() < 1e-12);
            let q = gaussian_mvqp(&gt, &SymMatrix::scalar(nu)).unwrap();
            assert!((q - nu / (4.0 * (2.0 * nu * t).cosh())).abs() < 1e-12);
        }
    }

    #[test]
    fn qp_peak_is_twice_mean() {
        let s = SymplecticMatrix::from_blocks(
            &DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.0, 1.0]),
            &DMatrix::zeros(2, 2),
            &DMatrix::zeros(2, 2),
            &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -0.3, 1.0]),
        )
        .unwrap();
        let g = GaussianPureState::new(s, vec![0.2, 0.1], vec![0.0, 0.0], 1.0).unwrap();
        let m = SymMatrix::from_rows(&[vec![2.0, 0.1], vec![0.1, 1.0]]).unwrap();
        let peak = gaussian_qp(&g, &m, &[0.2, 0.1]).unwrap();
        assert!((peak - 2.0 * gaussian_mvqp(&g, &m).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn linear_drive_shifts_means() {
        // H = p²/2 + F q: free fall, q(t) = q0 + p0 t − F t²/2.
        let f = 0.6;
        let h = QuadraticHamiltonian::new(
            SymMatrix::scalar(1.0),
            DMatrix::zeros(1, 1),
            SymMatrix::scalar(0.0),
            vec![0.0],
            vec![f],
            0.0,
        )
        .unwrap();
        let g = GaussianPureState::coherent(vec![0.5], vec![0.2], 1.0).unwrap();
        let t = 1.7;
        let gt = evolve(&g, &h, t).unwrap();
        assert!((gt.eta_q()[0] - (0.5 + 0.2 * t - 0.5 * f * t * t)).abs() < 1e-12);
        assert!((gt.eta_p()[0] - (0.2 - f * t)).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_symplectic() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(SymplecticMatrix::new(m).is_err());
    }

    #[test]
    fn polar_identity_matches_zero_phase_gaussian() {
        let g = GaussianPureState::coherent(vec![0.3], vec![0.7], 1.0).unwrap();
        let grid = recommended_grid(&g, 257).unwrap();
        let p = to_polar(&g, &grid).unwrap();
        let z = crate::states::gaussian_polar(&SymMatrix::scalar(0.5), &[0.3], &grid, 1.0).unwrap();
        for (a, b) in p.omega().values().iter().zip(z.omega().values()) {
            assert!((a - b).abs() < 1e-15);
        }
        for (q, s) in grid.axis(0).nodes().iter().zip(p.phase().values()) {
            assert!((s - (0.7 * q - 0.5 * 0.3 * 0.7)).abs() < 1e-14);
        }
    }
}
