use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest grid dimension accepted anywhere in the crate.
pub const MAX_DIM: usize = 3;

/// Smallest point count accepted per axis.
pub const MIN_POINTS: usize = 16;

/// One uniformly sampled axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lower: f64, upper: f64, count: usize) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || upper <= lower {
            return Err(Error::InvalidGrid(format!(
                "axis bounds [{lower}, {upper}] are not increasing"
            )));
        }
        if count < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "axis has {count} points, at least {MIN_POINTS} are required"
            )));
        }
        Ok(Axis { lower, upper, count })
    }

    /// Symmetric axis `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        Axis::new(-half_width, half_width, count)
    }

    pub fn spacing(&self) -> f64 {
        (self.upper - self.lower) / (self.count - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.upper
        } else {
            self.lower + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    /// Composite Simpson weights; with an odd number of intervals the last
    /// interval falls back to the trapezoid rule.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let n = self.count;
        let h = self.spacing();
        let mut w = vec![0.0; n];
        let simpson_end = if (n - 1) % 2 == 0 { n - 1 } else { n - 2 };
        for k in (0..simpson_end).step_by(2) {
            w[k] += h / 3.0;
            w[k + 1] += 4.0 * h / 3.0;
            w[k + 2] += h / 3.0;
        }
        if simpson_end < n - 1 {
            w[n - 2] += h / 2.0;
            w[n - 1] += h / 2.0;
        }
        w
    }
}

/// Uniform rectangular grid of dimension 1 to 3, stored row-major with the
/// last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension {} outside 1..={MAX_DIM}",
                axes.len()
            )));
        }
        for a in &axes {
            Axis::new(a.lower, a.upper, a.count)?;
        }
        Ok(Grid { axes })
    }

    pub fn line(lower: f64, upper: f64, count: usize) -> Result<Self> {
        Grid::new(vec![Axis::new(lower, upper, count)?])
    }

    /// Cube `[-half_width, half_width]^dim` with `count` points per axis.
    pub fn cube(dim: usize, half_width: f64, count: usize) -> Result<Self> {
        let axis = Axis::symmetric(half_width, count)?;
        Grid::new(vec![axis; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat-index stride of axis `k`.
    pub fn stride(&self, k: usize) -> usize {
        self.axes[k + 1..].iter().map(|a| a.count).product()
    }

    pub fn unflatten(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for k in (0..self.dim()).rev() {
            let c = self.axes[k].count;
            idx[k] = flat % c;
            flat /= c;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, a)| acc * a.count + i)
    }

    /// Coordinates of node `flat`.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unflatten(flat);
        let mut q = [0.0; MAX_DIM];
        for (k, a) in self.axes.iter().enumerate() {
            q[k] = a.node(idx[k]);
        }
        q
    }

    /// True when node `flat` lies on the outer face of the box.
    pub fn on_boundary(&self, flat: usize) -> bool {
        let idx = self.unflatten(flat);
        self.axes
            .iter()
            .enumerate()
            .any(|(k, a)| idx[k] == 0 || idx[k] + 1 == a.count)
    }

    /// Tensor-product quadrature weights, one per node.
    pub fn weights(&self) -> Vec<f64> {
        let per_axis: Vec<Vec<f64>> = self.axes.iter().map(Axis::quadrature_weights).collect();
        let mut w = vec![1.0; self.len()];
        for (flat, wi) in w.iter_mut().enumerate() {
            let idx = self.unflatten(flat);
            for (k, pa) in per_axis.iter().enumerate() {
                *wi *= pa[idx[k]];
            }
        }
        w
    }

    /// Half-width of the smallest box side, measured from `center`.
    pub fn min_half_width(&self, center: &[f64]) -> f64 {
        self.axes
            .iter()
            .zip(center)
            .map(|(a, &c)| (c - a.lower).min(a.upper - c))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Real function sampled on every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        ScalarField {
            values: vec![0.0; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        ScalarField {
            values: vec![c; grid.len()],
            grid: grid.clone(),
        }
    }

    /// Samples `f` at every node; `f` receives the first `dim` coordinates.
    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let d = grid.dim();
        let values = (0..grid.len())
            .map(|i| {
                let q = grid.point(i);
                f(&q[..d])
            })
            .collect();
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_grid(other)?;
        Ok(ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        self.map(|v| k * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn check_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Integral of `f` over the grid box by tensorized composite Simpson.
pub fn integrate(f: &ScalarField) -> Result<f64> {
    if let Some(i) = f.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteField(i));
    }
    Ok(dot_weights(&f.grid, &f.values))
}

/// Quadrature of raw node values; callers guarantee finiteness.
pub(crate) fn dot_weights(grid: &Grid, values: &[f64]) -> f64 {
    grid.weights().iter().zip(values).map(|(w, v)| w * v).sum()
}
