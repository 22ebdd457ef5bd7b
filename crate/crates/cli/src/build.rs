//! Turns command-line options into a sampled state plus what is known about
//! it analytically.

use std::path::Path;

use anyhow::{bail, ensure, Context};
use nalgebra::DMatrix;
use qpot_core::gaussian::{evolve, recommended_grid, to_polar, GaussianPureState, QuadraticHamiltonian, SymplecticMatrix};
use qpot_core::mixed::{read_mixture, thermal_box, thermal_state, thermal_truncation, MixedState};
use qpot_core::numerics::{Axis, Grid, SymMatrix};
use qpot_core::states::{
    gaussian_box, gaussian_polar, ho_box, ho_eigenstate, poschl_teller_state, read_state_csv, PolarState, PT_BOX,
};

use crate::config::Options;

#[derive(Debug, Clone)]
pub enum Family {
    Ho { n: u32, nu: f64 },
    PoschlTeller { lambda: i64, mu: i64 },
    Gaussian,
    /// Oscillator ground state squeezed by `a`, evolved for `t`.
    Squeezed { a: Vec<f64>, nu: Vec<f64>, t: f64, inverted: bool },
    Csv,
    Thermal { beta_hnu: f64, k: usize, nu: f64, dq0: f64 },
    Mixture,
}

pub enum Body {
    Pure { state: PolarState, gaussian: Option<GaussianPureState> },
    Mixed(MixedState),
}

pub struct Built {
    pub label: String,
    pub family: Family,
    pub body: Body,
    pub kinetic: SymMatrix,
    pub mass: f64,
    pub hbar: f64,
}

impl Built {
    pub fn dim(&self) -> usize {
        match &self.body {
            Body::Pure { state, .. } => state.dim(),
            Body::Mixed(m) => m.dim(),
        }
    }
}

fn per_dof(values: &[f64], n: usize, default: f64, flag: &str) -> anyhow::Result<Vec<f64>> {
    let out = match values.len() {
        0 => vec![default; n],
        1 => vec![values[0]; n],
        k if k == n => values.to_vec(),
        k => bail!("{flag} has {k} values for {n} degrees of freedom"),
    };
    ensure!(out.iter().all(|v| *v > 0.0 && v.is_finite()), "{flag} values must be positive");
    Ok(out)
}

fn symmetric_grid(half: f64, points: usize, dim: usize) -> anyhow::Result<Grid> {
    ensure!(half > 0.0 && half.is_finite(), "--grid-box must be positive");
    let axes = (0..dim).map(|_| Axis::new(-half, half, points)).collect::<qpot_core::Result<Vec<_>>>()?;
    Ok(Grid::new(axes)?)
}

fn default_points(dim: usize) -> usize {
    match dim {
        1 => 513,
        2 => 257,
        _ => 81,
    }
}

fn single_n(opts: &Options) -> anyhow::Result<u32> {
    match opts.n.as_slice() {
        [] => Ok(0),
        [n] if *n >= 0 => Ok(*n as u32),
        [n] => bail!("--n must be nonnegative, got {n}"),
        _ => bail!("--n takes a single value for this state"),
    }
}

pub fn build_state(opts: &Options, hbar: f64) -> anyhow::Result<Built> {
    let name = opts.state.clone().unwrap_or_else(|| "ho".to_string());
    let mass = opts.mass;
    ensure!(mass > 0.0 && mass.is_finite(), "--mass must be positive, got {mass}");
    let scalar_kinetic = |dim: usize| SymMatrix::from_diagonal(&vec![1.0 / mass; dim]);
    let built = |label: String, family, body, dim| Built { label, family, body, kinetic: scalar_kinetic(dim), mass, hbar };
    match name.as_str() {
        "ho" => {
            let n = single_n(opts)?;
            let nu = per_dof(&opts.nu, 1, 1.0, "--nu")?[0];
            let dq0 = (hbar / (2.0 * mass * nu)).sqrt();
            let grid = match opts.grid_box {
                Some(b) => symmetric_grid(b, opts.grid_points.unwrap_or(513), 1)?,
                None => Grid::line(-ho_box(n, dq0), ho_box(n, dq0), opts.grid_points.unwrap_or(513))?,
            };
            let state = ho_eigenstate(n, dq0, &grid, hbar)?;
            Ok(built(format!("ho n={n}"), Family::Ho { n, nu }, Body::Pure { state, gaussian: None }, 1))
        }
        "pt" | "poschl-teller" => {
            let mu = opts.single_mu()?;
            let lambda = opts.lambda.unwrap_or(mu);
            let half = opts.grid_box.unwrap_or(PT_BOX);
            let grid = symmetric_grid(half, opts.grid_points.unwrap_or(2049), 1)?;
            let state = poschl_teller_state(lambda, mu, &grid, hbar)?;
            Ok(built(
                format!("pt lambda={lambda} mu={mu}"),
                Family::PoschlTeller { lambda, mu },
                Body::Pure { state, gaussian: None },
                1,
            ))
        }
        "gaussian" => {
            let dim = opts.dim.unwrap_or(opts.vdiag.len().max(1));
            ensure!((1..=3).contains(&dim), "--dim must be 1, 2 or 3");
            let vdiag = per_dof(&opts.vdiag, dim, 1.0, "--vdiag")?;
            let v = SymMatrix::from_diagonal(&vdiag);
            let eta = vec![0.0; dim];
            let points = opts.grid_points.unwrap_or(default_points(dim));
            let grid = match opts.grid_box {
                Some(b) => symmetric_grid(b, points, dim)?,
                None => Grid::new(
                    gaussian_box(&v, &eta)
                        .into_iter()
                        .map(|(lo, hi)| Axis::new(lo, hi, points))
                        .collect::<qpot_core::Result<Vec<_>>>()?,
                )?,
            };
            let state = gaussian_polar(&v, &eta, &grid, hbar)?;
            let a: Vec<f64> = vdiag.iter().map(|v| (2.0 * v / hbar).sqrt()).collect();
            let g = GaussianPureState::new(SymplecticMatrix::squeeze(&a)?, eta.clone(), eta, hbar)?;
            Ok(built(format!("gaussian vdiag={vdiag:?}"), Family::Gaussian, Body::Pure { state, gaussian: Some(g) }, dim))
        }
        "coherent" | "squeezed" | "inverted" => {
            let dim = opts.dim.unwrap_or(opts.a.len().max(opts.nu.len()).max(1));
            let a = if name == "coherent" {
                ensure!(opts.a.is_empty(), "--a does not apply to coherent states");
                vec![1.0; dim]
            } else {
                per_dof(&opts.a, dim, 1.0, "--a")?
            };
            let nu = per_dof(&opts.nu, dim, 1.0, "--nu")?;
            let inverted = name == "inverted";
            let g0 = squeezed_ground_state(&a, &nu, mass, hbar)?;
            let h = oscillator(&nu, mass, inverted)?;
            let g = evolve(&g0, &h, opts.t)?;
            let points = opts.grid_points.unwrap_or(default_points(dim));
            let grid = match opts.grid_box {
                Some(b) => symmetric_grid(b, points, dim)?,
                None => recommended_grid(&g, points)?,
            };
            let state = to_polar(&g, &grid)?;
            Ok(built(
                format!("{name} t={}", opts.t),
                Family::Squeezed { a, nu, t: opts.t, inverted },
                Body::Pure { state, gaussian: Some(g) },
                dim,
            ))
        }
        "thermal" => {
            let beta_hnu = opts.beta_hnu.unwrap_or(1.0);
            ensure!(beta_hnu > 0.0 && beta_hnu.is_finite(), "--beta-hnu must be positive");
            let nu = per_dof(&opts.nu, 1, 1.0, "--nu")?[0];
            let dq0 = (hbar / (2.0 * mass * nu)).sqrt();
            let k = opts.k.unwrap_or_else(|| thermal_truncation(beta_hnu));
            let grid = match opts.grid_box {
                Some(b) => symmetric_grid(b, opts.grid_points.unwrap_or(1025), 1)?,
                None => Grid::line(-thermal_box(k, dq0), thermal_box(k, dq0), opts.grid_points.unwrap_or(1025))?,
            };
            let ms = thermal_state(hbar, beta_hnu, dq0, Some(k), &grid)?;
            Ok(built(
                format!("thermal beta_hnu={beta_hnu} K={k}"),
                Family::Thermal { beta_hnu, k, nu, dq0 },
                Body::Mixed(ms),
                1,
            ))
        }
        path if path.ends_with(".csv") => {
            let state = read_state_csv(Path::new(path)).with_context(|| format!("loading state {path}"))?;
            ensure!(
                opts.hbar.is_empty() || (state.hbar() - hbar).abs() <= 1e-12 * hbar,
                "--hbar {hbar} disagrees with the file's hbar {}",
                state.hbar()
            );
            let hbar = state.hbar();
            let dim = state.dim();
            Ok(Built {
                label: path.to_string(),
                family: Family::Csv,
                body: Body::Pure { state, gaussian: None },
                kinetic: scalar_kinetic(dim),
                mass,
                hbar,
            })
        }
        path if path.ends_with(".json") => {
            let ms = read_mixture(Path::new(path)).with_context(|| format!("loading mixture {path}"))?;
            let hbar = ms.hbar();
            Ok(Built {
                label: path.to_string(),
                family: Family::Mixture,
                body: Body::Mixed(ms),
                kinetic: scalar_kinetic(1),
                mass,
                hbar,
            })
        }
        other => bail!("unknown state {other:?}; expected ho, pt, gaussian, coherent, squeezed, inverted, thermal, or a .csv/.json path"),
    }
}

/// `H = Σ p_i²/2m ± mν_i²q_i²/2`.
pub fn oscillator(nu: &[f64], mass: f64, inverted: bool) -> anyhow::Result<QuadraticHamiltonian> {
    let n = nu.len();
    let sign = if inverted { -1.0 } else { 1.0 };
    let l: Vec<f64> = nu.iter().map(|v| sign * mass * v * v).collect();
    Ok(QuadraticHamiltonian::new(
        SymMatrix::from_diagonal(&vec![1.0 / mass; n]),
        DMatrix::zeros(n, n),
        SymMatrix::from_diagonal(&l),
        vec![0.0; n],
        vec![0.0; n],
        0.0,
    )?)
}

/// Oscillator ground state with position widths scaled by `a`.
pub fn squeezed_ground_state(a: &[f64], nu: &[f64], mass: f64, hbar: f64) -> anyhow::Result<GaussianPureState> {
    let s: Vec<f64> = a.iter().zip(nu).map(|(a, v)| a / (mass * v).sqrt()).collect();
    let n = a.len();
    Ok(GaussianPureState::new(SymplecticMatrix::squeeze(&s)?, vec![0.0; n], vec![0.0; n], hbar)?)
}
