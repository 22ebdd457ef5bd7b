//! Pure states in polar form ψ = Ω·exp(iS/ħ) sampled on a grid.
//!
//! Derivatives are never taken of Ω = |ψ| directly, because |ψ| has kinks at
//! the nodes of real eigenfunctions. Instead the smooth complex ψ is
//! differenced and the polar quantities are recovered as
//! `∂Ω = Re(e^{−iS/ħ}∂ψ)` and `Ω²∂S = ħ Im(ψ*∂ψ)`. Both are regular at nodes.
//!
//! Every statistic divides by `∫Ω²`, so a state scaled by a constant gives
//! the same answers.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numerics::{dot_weights, partial, spd_inverse, Axis, Grid, ScalarField, SymMatrix};
use crate::specfun::{assoc_legendre_tanh, hermite_functions, ln_gamma};

/// Cells with Ω below this fraction of max Ω are masked from statistics that
/// divide by Ω.
pub const NODE_MASK: f64 = 1e-8;

/// Below this fraction of max Ω the phase is set to zero.
pub const PHASE_FLOOR: f64 = 1e-10;

/// Normalization tolerance of constructed states.
pub const NORM_TOL: f64 = 1e-6;

/// Largest boundary amplitude, relative to max Ω, of an accepted state.
pub const BOUNDARY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
struct Derivatives {
    /// ∂_kΩ per axis.
    d_omega: Vec<Vec<f64>>,
    /// Ω²∂_kS per axis.
    flux: Vec<Vec<f64>>,
    /// Re and Im of ∂_kψ per axis.
    d_re: Vec<Vec<f64>>,
    d_im: Vec<Vec<f64>>,
}

/// Grid-sampled pure state.
#[derive(Debug, Clone)]
pub struct PolarState {
    omega: ScalarField,
    phase: ScalarField,
    hbar: f64,
    real_valued: bool,
    norm: f64,
    derivs: OnceLock<Derivatives>,
}

impl PolarState {
    /// State from amplitude and phase fields. Checks Ω ≥ 0, normalization to
    /// [`NORM_TOL`], and that the box captures the state.
    pub fn new(omega: ScalarField, phase: ScalarField, hbar: f64) -> Result<Self> {
        let s = PolarState::assemble(omega, phase, hbar, false)?;
        s.validate()?;
        Ok(s)
    }

    fn assemble(omega: ScalarField, phase: ScalarField, hbar: f64, real_valued: bool) -> Result<Self> {
        omega.check_grid(&phase)?;
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::DomainError(format!("hbar must be positive, got {hbar}")));
        }
        if let Some(i) = omega.values().iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NonFiniteField(i));
        }
        if let Some(i) = phase.values().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField(i));
        }
        let norm = dot_weights(omega.grid(), &omega.values().iter().map(|w| w * w).collect::<Vec<_>>());
        Ok(PolarState {
            omega,
            phase,
            hbar,
            real_valued,
            norm,
            derivs: OnceLock::new(),
        })
    }

    fn validate(&self) -> Result<()> {
        if (self.norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(self.norm));
        }
        let g = self.grid();
        let max = self.omega.max_abs();
        let edge = (0..g.len())
            .filter(|&i| g.on_boundary(i))
            .map(|i| self.omega.values()[i])
            .fold(0.0, f64::max);
        if edge > BOUNDARY_TOL * max {
            return Err(Error::BoxTooSmall(format!(
                "boundary amplitude {:.3e} of max",
                edge / max
            )));
        }
        Ok(())
    }

    /// State from a real, possibly sign-changing wavefunction. The phase is 0
    /// where ψ ≥ 0 and πħ where ψ < 0, and the phase gradient is exactly 0.
    pub fn from_real(psi: &ScalarField, hbar: f64) -> Result<Self> {
        let max = psi.max_abs();
        let omega = psi.map(f64::abs);
        let phase = psi.map(|v| if v < 0.0 && v.abs() >= PHASE_FLOOR * max { PI * hbar } else { 0.0 });
        let s = PolarState::assemble(omega, phase, hbar, true)?;
        s.validate()?;
        Ok(s)
    }

    /// Copy with Ω multiplied by `k`. No normalization check is made; every
    /// statistic is invariant under this scaling.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        PolarState::assemble(self.omega.scale(k), self.phase.clone(), self.hbar, self.real_valued)
    }

    pub fn omega(&self) -> &ScalarField {
        &self.omega
    }

    pub fn phase(&self) -> &ScalarField {
        &self.phase
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn grid(&self) -> &Grid {
        self.omega.grid()
    }

    pub fn dim(&self) -> usize {
        self.grid().dim()
    }

    /// `∫Ω²` over the box.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// True when ψ is real up to sign, so ∂S ≡ 0 by convention.
    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    /// Real and imaginary parts of ψ.
    pub fn psi(&self) -> (Vec<f64>, Vec<f64>) {
        let h = self.hbar;
        self.omega
            .values()
            .iter()
            .zip(self.phase.values())
            .map(|(w, s)| {
                let (sin, cos) = (s / h).sin_cos();
                (w * cos, w * sin)
            })
            .unzip()
    }

    fn derivs(&self) -> &Derivatives {
        self.derivs.get_or_init(|| {
            let g = self.grid();
            let (re, im) = self.psi();
            let h = self.hbar;
            let mut d = Derivatives {
                d_omega: Vec::new(),
                flux: Vec::new(),
                d_re: Vec::new(),
                d_im: Vec::new(),
            };
            for k in 0..g.dim() {
                // Grids carry at least 16 points per axis, so stencils always fit.
                let dr = partial(g, &re, k, 1).expect("grid admits stencil");
                let di = partial(g, &im, k, 1).expect("grid admits stencil");
                let mut dw = Vec::with_capacity(g.len());
                let mut fl = Vec::with_capacity(g.len());
                for i in 0..g.len() {
                    let (sin, cos) = (self.phase.values()[i] / h).sin_cos();
                    dw.push(cos * dr[i] + sin * di[i]);
                    fl.push(if self.real_valued { 0.0 } else { h * (re[i] * di[i] - im[i] * dr[i]) });
                }
                d.d_omega.push(dw);
                d.flux.push(fl);
                d.d_re.push(dr);
                d.d_im.push(di);
            }
            d
        })
    }

    /// ∂_kΩ for each axis, regular at nodes.
    pub fn amplitude_gradient(&self) -> Vec<ScalarField> {
        self.derivs()
            .d_omega
            .iter()
            .map(|v| ScalarField::new(self.grid().clone(), v.clone()).expect("grid sized"))
            .collect()
    }

    pub(crate) fn d_omega(&self) -> &[Vec<f64>] {
        &self.derivs().d_omega
    }

    /// `Ω²∂_kS = ħ Im(ψ*∂_kψ)` per axis (zero for real-valued states).
    pub(crate) fn flux(&self) -> &[Vec<f64>] {
        &self.derivs().flux
    }

    pub(crate) fn d_psi(&self) -> (&[Vec<f64>], &[Vec<f64>]) {
        let d = self.derivs();
        (&d.d_re, &d.d_im)
    }

    /// Cells with Ω below [`NODE_MASK`]·max Ω.
    pub fn node_mask(&self) -> Vec<bool> {
        let cut = NODE_MASK * self.omega.max_abs();
        self.omega.values().iter().map(|&w| w < cut).collect()
    }

    /// ∂_kS per axis; masked cells hold 0.
    pub fn phase_gradient(&self) -> Vec<ScalarField> {
        let mask = self.node_mask();
        self.flux()
            .iter()
            .map(|f| {
                let v = f
                    .iter()
                    .zip(self.omega.values())
                    .zip(&mask)
                    .map(|((fl, w), &m)| if m { 0.0 } else { fl / (w * w) })
                    .collect();
                ScalarField::new(self.grid().clone(), v).expect("grid sized")
            })
            .collect()
    }

    /// Fraction of the probability mass inside masked cells.
    pub fn masked_mass(&self) -> f64 {
        let mask = self.node_mask();
        let v: Vec<f64> = self
            .omega
            .values()
            .iter()
            .zip(&mask)
            .map(|(w, &m)| if m { w * w } else { 0.0 })
            .collect();
        dot_weights(self.grid(), &v) / self.norm
    }

    /// `∫Ω² f / ∫Ω²` for raw node values.
    pub(crate) fn expect(&self, f: &[f64]) -> f64 {
        let v: Vec<f64> = self.omega.values().iter().zip(f).map(|(w, x)| w * w * x).collect();
        dot_weights(self.grid(), &v) / self.norm
    }

    /// `∫ a·b / ∫Ω²` for raw node values.
    pub(crate) fn integral(&self, a: &[f64], b: &[f64]) -> f64 {
        let v: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        dot_weights(self.grid(), &v) / self.norm
    }

    /// Coordinate `k` at every node.
    pub(crate) fn coordinate(&self, k: usize) -> Vec<f64> {
        let g = self.grid();
        (0..g.len()).map(|i| g.point(i)[k]).collect()
    }

    /// ⟨q⟩.
    pub fn mean_position(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.expect(&self.coordinate(k))).collect()
    }

    /// Position covariance V = Cov(q, q).
    pub fn position_cov(&self) -> SymMatrix {
        let n = self.dim();
        let mean = self.mean_position();
        let centered: Vec<Vec<f64>> = (0..n)
            .map(|k| self.coordinate(k).iter().map(|q| q - mean[k]).collect())
            .collect();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let prod: Vec<f64> = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).collect();
            self.expect(&prod)
        });
        SymMatrix::symmetrize(&m)
    }
}

/// Sampled function used as a test function T₀ in L²(Ω²).
///
/// Functions that are singular at the nodes of Ω (such as ∂ ln Ω²) are
/// carried in amplitude-weighted form Ω·T, which stays bounded.
#[derive(Debug, Clone)]
pub struct TestFunction {
    repr: Repr,
    label: String,
}

#[derive(Debug, Clone)]
enum Repr {
    Sampled(ScalarField),
    Weighted(ScalarField),
}

impl TestFunction {
    pub fn sampled(values: ScalarField, label: impl Into<String>) -> Self {
        TestFunction {
            repr: Repr::Sampled(values),
            label: label.into(),
        }
    }

    pub fn from_fn(grid: &Grid, label: impl Into<String>, f: impl Fn(&[f64]) -> f64) -> Self {
        TestFunction::sampled(ScalarField::from_fn(grid, f), label)
    }

    /// Test function given through the product Ω·T.
    pub fn amplitude_weighted(weighted: ScalarField, label: impl Into<String>) -> Self {
        TestFunction {
            repr: Repr::Weighted(weighted),
            label: label.into(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn grid(&self) -> &Grid {
        match &self.repr {
            Repr::Sampled(f) | Repr::Weighted(f) => f.grid(),
        }
    }

    /// Sampled values when the function is stored directly.
    pub fn values(&self) -> Option<&ScalarField> {
        match &self.repr {
            Repr::Sampled(f) => Some(f),
            Repr::Weighted(_) => None,
        }
    }

    /// `αT + β`.
    pub fn affine(&self, alpha: f64, beta: f64, s: &PolarState) -> Result<Self> {
        let repr = match &self.repr {
            Repr::Sampled(f) => Repr::Sampled(f.map(|v| alpha * v + beta)),
            Repr::Weighted(w) => {
                Repr::Weighted(w.zip_with(s.omega(), |wt, om| alpha * wt + beta * om)?)
            }
        };
        Ok(TestFunction {
            repr,
            label: format!("{alpha}*({})+{beta}", self.label),
        })
    }

    fn check(&self, s: &PolarState) -> Result<()> {
        if self.grid() == s.grid() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Ω·T at every node.
    pub(crate) fn weighted(&self, s: &PolarState) -> Result<Vec<f64>> {
        self.check(s)?;
        let out: Vec<f64> = match &self.repr {
            Repr::Sampled(f) => f.values().iter().zip(s.omega().values()).map(|(t, w)| t * w).collect(),
            Repr::Weighted(w) => w.values().to_vec(),
        };
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteField(i));
        }
        Ok(out)
    }
}

/// ⟨f⟩ = ∫Ω²f.
pub fn weighted_mean(s: &PolarState, f: &TestFunction) -> Result<f64> {
    let wf = f.weighted(s)?;
    Ok(s.integral(&wf, s.omega().values()))
}

/// Cov(f, g) = ⟨fg⟩ − ⟨f⟩⟨g⟩.
pub fn weighted_cov(s: &PolarState, f: &TestFunction, g: &TestFunction) -> Result<f64> {
    let wf = f.weighted(s)?;
    let wg = if std::ptr::eq(f, g) { wf.clone() } else { g.weighted(s)? };
    // Centered two-pass form: exact under T → αT + β and independent of the grid norm.
    let om = s.omega().values();
    let norm = s.integral(om, om);
    let center = |w: &[f64]| {
        let mean = s.integral(w, om) / norm;
        w.iter().zip(om).map(|(w, o)| w - mean * o).collect::<Vec<f64>>()
    };
    let cf = center(&wf);
    let cg = if std::ptr::eq(f, g) { cf.clone() } else { center(&wg) };
    Ok(s.integral(&cf, &cg) / norm)
}

/// ⟨∂_k T⟩ for every axis. Weighted functions use integration by parts,
/// `⟨∂T⟩ = −2∫(ΩT)∂Ω`, valid because Ω vanishes at the box edge.
pub fn mean_gradient(s: &PolarState, f: &TestFunction) -> Result<Vec<f64>> {
    f.check(s)?;
    let g = s.grid();
    match &f.repr {
        Repr::Sampled(t) => (0..g.dim())
            .map(|k| {
                let d = partial(g, t.values(), k, 1)?;
                Ok(s.expect(&d))
            })
            .collect(),
        Repr::Weighted(w) => Ok(s
            .d_omega()
            .iter()
            .map(|dw| -2.0 * s.integral(w.values(), dw))
            .collect()),
    }
}

/// Recommended half-width of the box for HO eigenstate `n`.
pub fn ho_box(n: u32, dq0: f64) -> f64 {
    (8.0 + 2.0 * (n as f64).sqrt()) * dq0
}

/// Recommended half-width of the box for Pöschl–Teller states.
pub const PT_BOX: f64 = 25.0;

/// Recommended per-axis box `η_i ± 8√V_ii`.
pub fn gaussian_box(v: &SymMatrix, eta_q: &[f64]) -> Vec<(f64, f64)> {
    (0..v.order())
        .map(|i| {
            let w = 8.0 * v.get(i, i).sqrt();
            (eta_q[i] - w, eta_q[i] + w)
        })
        .collect()
}

fn require_dim(grid: &Grid, n: usize) -> Result<()> {
    if grid.dim() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: n,
            got: grid.dim(),
        })
    }
}

/// Harmonic oscillator eigenstate
/// `ψ_n = (2ⁿn!)^{−½}(2πΔq₀²)^{−¼} e^{−q²/4Δq₀²} H_n(q/(√2Δq₀))`.
pub fn ho_eigenstate(n: u32, dq0: f64, grid: &Grid, hbar: f64) -> Result<PolarState> {
    require_dim(grid, 1)?;
    if !(dq0 > 0.0) {
        return Err(Error::DomainError(format!("dq0 must be positive, got {dq0}")));
    }
    let need = ho_box(n, dq0);
    let have = grid.min_half_width(&[0.0]);
    if have < need * (1.0 - 1e-12) {
        return Err(Error::BoxTooSmall(format!("half-width {have} < {need}")));
    }
    let pref = (2.0 * dq0 * dq0).powf(-0.25);
    let psi = ScalarField::from_fn(grid, |q| {
        let x = q[0] / (2f64.sqrt() * dq0);
        pref * hermite_functions(n as i64, x).expect("non-negative degree")[n as usize]
    });
    PolarState::from_real(&psi, hbar)
}

/// Pöschl–Teller eigenstate `√(μ(λ−μ)!/(λ+μ)!) P_λ^μ(tanh q)`.
pub fn poschl_teller_state(lambda: i64, mu: i64, grid: &Grid, hbar: f64) -> Result<PolarState> {
    require_dim(grid, 1)?;
    if mu < 1 || lambda < mu {
        return Err(Error::InvalidOrder(format!("need 1 <= mu <= lambda, got lambda={lambda}, mu={mu}")));
    }
    let a = grid.axis(0);
    if a.lower > -PT_BOX || a.upper < PT_BOX {
        return Err(Error::BoxTooSmall(format!(
            "grid [{}, {}] must span [-{PT_BOX}, {PT_BOX}]",
            a.lower, a.upper
        )));
    }
    let ln_norm = 0.5 * ((mu as f64).ln() + ln_gamma((lambda - mu + 1) as f64)? - ln_gamma((lambda + mu + 1) as f64)?);
    let norm = ln_norm.exp();
    let mut vals = Vec::with_capacity(grid.len());
    for q in a.nodes() {
        vals.push(norm * assoc_legendre_tanh(lambda, mu, q)?);
    }
    let psi = ScalarField::new(grid.clone(), vals)?;
    let s = PolarState::from_real(&psi, hbar)?;
    if (s.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized(s.norm()));
    }
    Ok(s)
}

/// Zero-phase Gaussian `Ω = exp(−¼(q−η)·V⁻¹(q−η)) / ((2π)ⁿ det V)^{¼}`.
pub fn gaussian_polar(v: &SymMatrix, eta_q: &[f64], grid: &Grid, hbar: f64) -> Result<PolarState> {
    let omega = gaussian_amplitude(v, eta_q, grid)?;
    let phase = ScalarField::zeros(grid);
    let s = PolarState::assemble(omega, phase, hbar, true)?;
    s.validate()?;
    Ok(s)
}

/// Gaussian amplitude with box check, shared with the symplectic module.
pub(crate) fn gaussian_amplitude(v: &SymMatrix, eta_q: &[f64], grid: &Grid) -> Result<ScalarField> {
    let n = v.order();
    require_dim(grid, n)?;
    if eta_q.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: eta_q.len() });
    }
    let vi = spd_inverse(v)?;
    for (k, (lo, hi)) in gaussian_box(v, eta_q).into_iter().enumerate() {
        let a = grid.axis(k);
        let slack = 1e-9 * (hi - lo);
        if a.lower > lo + slack || a.upper < hi - slack {
            return Err(Error::BoxTooSmall(format!(
                "axis {k} spans [{}, {}], needs [{lo}, {hi}]",
                a.lower, a.upper
            )));
        }
    }
    let det = crate::numerics::cholesky(v)?.diagonal().iter().map(|d| d * d).product::<f64>();
    let pref = ((2.0 * PI).powi(n as i32) * det).powf(-0.25);
    let vi = vi.into_matrix();
    Ok(ScalarField::from_fn(grid, |q| {
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += (q[i] - eta_q[i]) * vi[(i, j)] * (q[j] - eta_q[j]);
            }
        }
        pref * (-0.25 * quad).exp()
    }))
}

/// Polar decomposition of ψ = re + i·im.
///
/// The phase is unwrapped line by line starting from the node of largest Ω:
/// first along axis 0 through that node, then along axis 1 through every node
/// reached so far, then along axis 2. Purely real input gives a phase of 0 or
/// πħ and is flagged real-valued.
pub fn polar_decompose(re: &ScalarField, im: &ScalarField, hbar: f64) -> Result<PolarState> {
    re.check_grid(im)?;
    if im.values().iter().all(|&v| v == 0.0) {
        let s = PolarState::from_real(re, hbar)?;
        return Ok(s);
    }
    let g = re.grid().clone();
    let omega = re.zip_with(im, f64::hypot)?;
    let max = omega.max_abs();
    let floor = PHASE_FLOOR * max;
    let raw: Vec<f64> = re
        .values()
        .iter()
        .zip(im.values())
        .zip(omega.values())
        .map(|((r, i), w)| if *w < floor { 0.0 } else { i.atan2(*r) })
        .collect();
    let start = omega
        .values()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut phase = raw.clone();
    let mut done = vec![false; g.len()];
    done[start] = true;
    let high = 0.5 * max;
    for axis in 0..g.dim() {
        let seeds: Vec<usize> = (0..g.len()).filter(|&i| done[i]).collect();
        let stride = g.stride(axis);
        let n = g.axis(axis).count;
        for seed in seeds {
            let i0 = (seed / stride) % n;
            let base = seed - i0 * stride;
            for dir in [1isize, -1] {
                let mut last = seed;
                let mut i = i0 as isize + dir;
                while i >= 0 && (i as usize) < n {
                    let cur = base + i as usize * stride;
                    if !done[cur] {
                        if omega.values()[cur] >= floor {
                            let mut d = raw[cur] - phase[last];
                            d -= 2.0 * PI * (d / (2.0 * PI)).round();
                            if d.abs() > 0.9 * PI
                                && omega.values()[cur] > high
                                && omega.values()[last] > high
                            {
                                return Err(Error::UnwrapFailure(cur));
                            }
                            phase[cur] = phase[last] + d;
                        }
                        done[cur] = true;
                    }
                    if omega.values()[cur] >= floor {
                        last = cur;
                    }
                    i += dir;
                }
            }
        }
    }
    let phase = ScalarField::new(g, phase.into_iter().map(|p| p * hbar).collect())?;
    let s = PolarState::assemble(omega, phase, hbar, false)?;
    s.validate()?;
    Ok(s)
}

/// Writes a state as CSV: a `# hbar=..; axes=lo:hi:n;...` line, then the
/// header `q1[,q2,q3],re_psi,im_psi`, then one row per node in storage order.
pub fn write_state_csv(s: &PolarState, path: &Path) -> Result<()> {
    let mut out = String::new();
    let axes: Vec<String> = s
        .grid()
        .axes()
        .iter()
        .map(|a| format!("{:e}:{:e}:{}", a.lower, a.upper, a.count))
        .collect();
    out.push_str(&format!("# hbar={:e}; axes={}\n", s.hbar(), axes.join(";")));
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let n = s.dim();
    let mut header: Vec<String> = (1..=n).map(|k| format!("q{k}")).collect();
    header.push("re_psi".into());
    header.push("im_psi".into());
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    let (re, im) = s.psi();
    for i in 0..s.grid().len() {
        let q = s.grid().point(i);
        let mut row: Vec<String> = q[..n].iter().map(|x| format!("{x:.17e}")).collect();
        row.push(format!("{:.17e}", re[i]));
        row.push(format!("{:.17e}", im[i]));
        w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    out.push_str(&String::from_utf8(body).map_err(|e| Error::Io(e.to_string()))?);
    std::fs::write(path, out).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads the CSV layout produced by [`write_state_csv`].
pub fn read_state_csv(path: &Path) -> Result<PolarState> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_state_csv(&text)
}

/// Parses the CSV state layout from a string.
pub fn parse_state_csv(text: &str) -> Result<PolarState> {
    let (meta, body) = text
        .split_once('\n')
        .ok_or_else(|| Error::Parse("missing metadata line".into()))?;
    let meta = meta
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("first line must start with '#'".into()))?;
    let mut hbar = None;
    let mut axes = Vec::new();
    for part in meta.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some(v) = part.strip_prefix("hbar=") {
            hbar = Some(parse_f64(v, "hbar")?);
        } else {
            let spec = part.strip_prefix("axes=").unwrap_or(part);
            let f: Vec<&str> = spec.split(':').collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("axis spec '{spec}' must be lo:hi:n")));
            }
            let count = f[2]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("axis count '{}'", f[2])))?;
            axes.push(Axis::new(parse_f64(f[0], "axis lower")?, parse_f64(f[1], "axis upper")?, count)?);
        }
    }
    let hbar = hbar.ok_or_else(|| Error::Parse("metadata lacks hbar".into()))?;
    let grid = Grid::new(axes)?;
    let n = grid.dim();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
    let header = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let mut expect: Vec<String> = (1..=n).map(|k| format!("q{k}")).collect();
    expect.push("re_psi".into());
    expect.push("im_psi".into());
    if header.iter().collect::<Vec<_>>() != expect.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(Error::Parse(format!("header must be '{}'", expect.join(","))));
    }
    let mut re = Vec::with_capacity(grid.len());
    let mut im = Vec::with_capacity(grid.len());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if row >= grid.len() {
            return Err(Error::Parse(format!("more than {} data rows", grid.len())));
        }
        let q = grid.point(row);
        for k in 0..n {
            let x = parse_f64(&rec[k], &expect[k])?;
            let h = grid.axis(k).spacing();
            if (x - q[k]).abs() > 1e-6 * h {
                return Err(Error::Parse(format!("row {} column {}: {x} is not grid node {}", row + 2, expect[k], q[k])));
            }
        }
        re.push(parse_f64(&rec[n], "re_psi")?);
        im.push(parse_f64(&rec[n + 1], "im_psi")?);
    }
    if re.len() != grid.len() {
        return Err(Error::Parse(format!("expected {} data rows, found {}", grid.len(), re.len())));
    }
    polar_decompose(&ScalarField::new(grid.clone(), re)?, &ScalarField::new(grid, im)?, hbar)
}

fn parse_f64(s: &str, field: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("{field}: cannot parse '{s}' as a number")))
}
