//! Finite differences on uniform grids.
//!
//! Derivatives use 9-point (8th-order) Fornberg stencils. Near the box edge the
//! stencil window is shifted inwards instead of shrunk, so the order is the
//! same everywhere. Axes with fewer than 9 but at least 5 points fall back to
//! 5-point stencils.

use super::grid::{Grid, ScalarField};
use crate::error::{Error, Result};

const WIDE: usize = 9;
const NARROW: usize = 5;

/// Fornberg's recursion: weights for derivatives `0..=m` at `z` on nodes `x`.
/// `out[k][j]` multiplies `f(x[j])` in the order-`k` derivative.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Stencil table for one axis: `rows[pos]` holds the weights used when the
/// evaluation node sits at offset `pos` inside the window.
struct Stencil {
    width: usize,
    rows: Vec<Vec<f64>>,
}

impl Stencil {
    fn new(count: usize, h: f64, order: usize, axis: usize) -> Result<Self> {
        let width = if count >= WIDE {
            WIDE
        } else if count >= NARROW {
            NARROW
        } else {
            return Err(Error::GridTooCoarse {
                axis,
                got: count,
                need: NARROW,
            });
        };
        let nodes: Vec<f64> = (0..width).map(|j| j as f64).collect();
        let scale = h.powi(order as i32);
        let rows = (0..width)
            .map(|pos| {
                fd_weights(pos as f64, &nodes, order)[order]
                    .iter()
                    .map(|w| w / scale)
                    .collect()
            })
            .collect();
        Ok(Stencil { width, rows })
    }

    fn window(&self, i: usize, n: usize) -> usize {
        i.saturating_sub(self.width / 2).min(n - self.width)
    }

    /// Derivative at node `i` of a strided line.
    #[inline]
    fn apply(&self, line: impl Fn(usize) -> f64, i: usize, n: usize) -> f64 {
        let s = self.window(i, n);
        self.rows[i - s]
            .iter()
            .enumerate()
            .map(|(j, w)| w * line(s + j))
            .sum()
    }
}

/// Derivative of order 1 or 2 of every node of a 1-D sample.
pub fn derivative_1d(values: &[f64], h: f64, order: usize) -> Result<Vec<f64>> {
    let n = values.len();
    let st = Stencil::new(n, h, order, 0)?;
    Ok((0..n).map(|i| st.apply(|j| values[j], i, n)).collect())
}

/// Derivative of order 1 or 2 of a 1-D sample at node `i` only.
pub fn derivative_at(values: &[f64], h: f64, i: usize, order: usize) -> Result<f64> {
    let n = values.len();
    let st = Stencil::new(n, h, order, 0)?;
    Ok(st.apply(|j| values[j], i, n))
}

/// Derivative of order `order` along `axis` of raw node values.
pub(crate) fn partial(grid: &Grid, values: &[f64], axis: usize, order: usize) -> Result<Vec<f64>> {
    let a = grid.axis(axis);
    let n = a.count;
    let st = Stencil::new(n, a.spacing(), order, axis)?;
    let stride = grid.stride(axis);
    let mut out = vec![0.0; values.len()];
    for flat in 0..values.len() {
        let i = (flat / stride) % n;
        let base = flat - i * stride;
        out[flat] = st.apply(|j| values[base + j * stride], i, n);
    }
    Ok(out)
}

/// First partial derivatives of `f`, one field per axis.
pub fn gradient(f: &ScalarField) -> Result<Vec<ScalarField>> {
    let g = f.grid();
    (0..g.dim())
        .map(|k| ScalarField::new(g.clone(), partial(g, f.values(), k, 1)?))
        .collect()
}

/// Second partial derivatives of `f`. Diagonal entries use the direct
/// second-derivative stencil, mixed entries are gradients of gradients
/// averaged over both orders.
pub fn hessian(f: &ScalarField) -> Result<Vec<Vec<ScalarField>>> {
    let g = f.grid();
    let n = g.dim();
    let grads: Vec<Vec<f64>> = (0..n)
        .map(|k| partial(g, f.values(), k, 1))
        .collect::<Result<_>>()?;
    let mut h: Vec<Vec<Option<ScalarField>>> = vec![vec![None; n]; n];
    for i in 0..n {
        h[i][i] = Some(ScalarField::new(g.clone(), partial(g, f.values(), i, 2)?)?);
        for j in i + 1..n {
            let dij = partial(g, &grads[j], i, 1)?;
            let dji = partial(g, &grads[i], j, 1)?;
            let sym: Vec<f64> = dij.iter().zip(&dji).map(|(a, b)| 0.5 * (a + b)).collect();
            let field = ScalarField::new(g.clone(), sym)?;
            h[j][i] = Some(field.clone());
            h[i][j] = Some(field);
        }
    }
    Ok(h
        .into_iter()
        .map(|row| row.into_iter().map(|c| c.expect("filled")).collect())
        .collect())
}
