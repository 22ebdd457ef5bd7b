//! Figure data and ħ sweeps.

use anyhow::{bail, ensure};
use qpot_core::bounds::{linear_bound, theorem2_bound};
use qpot_core::figures::{figure1, figure2, FIGURE_HBAR, FIGURE_MASS};
use qpot_core::mixed::{theorem3_bound, vnc_convex_decomposition};
use qpot_core::qpotential::mvqp;

use crate::build::{build_state, Body};
use crate::config::Options;
use crate::output::{Cell, Table};

/// Largest μ accepted by `figure2`.
pub const FIGURE2_MAX_MU: i64 = 60;

fn figure_meta() -> Vec<(String, String)> {
    vec![
        ("units".into(), "hbar^2/2m = 1".into()),
        ("hbar".into(), FIGURE_HBAR.to_string()),
        ("mass".into(), FIGURE_MASS.to_string()),
    ]
}

pub fn figure1_table(opts: &Options) -> anyhow::Result<Table> {
    let mus = opts.mu_list((1, 20))?;
    let ns = if opts.n.is_empty() { vec![1, 3, 5, 7] } else { opts.n.clone() };
    ensure!(ns.iter().all(|n| *n >= 1), "--n values must be at least 1");
    for n in ns.iter().filter(|n| *n % 2 == 0) {
        eprintln!("warning: the bound vanishes for even n; column n={n} is identically zero");
    }
    let rows = figure1(&mus, &ns)?;
    Ok(Table {
        meta: figure_meta(),
        columns: vec!["mu", "n", "bound", "mvqp"],
        rows: rows
            .iter()
            .map(|r| vec![Cell::Int(r.mu), Cell::Int(r.n), Cell::Float(r.bound), Cell::Float(r.mvqp)])
            .collect(),
    })
}

pub fn figure2_table(opts: &Options) -> anyhow::Result<Table> {
    let mus = opts.mu_list((1, 40))?;
    if let Some(bad) = mus.iter().find(|m| !(1..=FIGURE2_MAX_MU).contains(*m)) {
        bail!("mu = {bad} is outside 1..={FIGURE2_MAX_MU}");
    }
    let rows = figure2(&mus)?;
    Ok(Table {
        meta: figure_meta(),
        columns: vec!["mu", "mvqp", "position_variance", "linear_bound", "difference"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Int(r.mu),
                    Cell::Float(r.mvqp),
                    Cell::Float(r.variance),
                    Cell::Float(r.linear_bound),
                    Cell::Float(r.difference),
                ]
            })
            .collect(),
    })
}

pub fn sweep_table(opts: &Options) -> anyhow::Result<Table> {
    let hbars = if opts.hbar.is_empty() { vec![0.25, 0.5, 1.0, 2.0] } else { opts.hbar.clone() };
    ensure!(hbars.iter().all(|h| *h > 0.0 && h.is_finite()), "--hbar values must be positive");
    let mut rows = Vec::with_capacity(hbars.len());
    let mut label = String::new();
    let mut mixed = false;
    for &h in &hbars {
        let b = build_state(opts, h)?;
        label = b.label.clone();
        let m = &b.kinetic;
        match &b.body {
            Body::Pure { state: s, .. } => {
                let q = mvqp(s, m)?;
                let v = s.position_cov().trace();
                rows.push(vec![
                    Cell::Float(b.hbar),
                    Cell::Float(q),
                    Cell::Float(v),
                    Cell::Float(linear_bound(s, m)?.bound),
                    Cell::Float(theorem2_bound(s, m)?.value),
                ]);
            }
            Body::Mixed(ms) => {
                mixed = true;
                let dec = vnc_convex_decomposition(ms, m)?;
                let q = 0.5 * (dec.total.as_matrix() * m.as_matrix()).trace();
                rows.push(vec![
                    Cell::Float(b.hbar),
                    Cell::Float(q),
                    Cell::Float(ms.position_cov().trace()),
                    Cell::Float(theorem3_bound(ms, m)?),
                    Cell::Float(0.5 * (dec.sum_k.as_matrix() * m.as_matrix()).trace()),
                ]);
            }
        }
    }
    let columns = if mixed {
        vec!["hbar", "mvqp", "position_variance", "theorem3_bound", "convex_mvqp"]
    } else {
        vec!["hbar", "mvqp", "position_variance", "linear_bound", "theorem2_bound"]
    };
    Ok(Table {
        meta: vec![("state".into(), label), ("mass".into(), opts.mass.to_string())],
        columns,
        rows,
    })
}
