//! Small dense linear algebra: symmetric eigenproblems by cyclic Jacobi,
//! Cholesky, SPD pencils, Hermitian spectra through the real embedding, and a
//! Padé matrix exponential.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative asymmetry tolerated by [`SymMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Accepts `m` if it is square and symmetric to `1e-12` relative; the
    /// stored matrix is exactly symmetrized.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let scale = max_abs(&m);
        let asym = max_abs(&(&m - m.transpose()));
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(SymMatrix::symmetrize(&m))
    }

    /// `(m + mᵀ)/2` without any check.
    pub fn symmetrize(m: &DMatrix<f64>) -> Self {
        SymMatrix((m + m.transpose()) * 0.5)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n),
            });
        }
        SymMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        SymMatrix(DMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { 0.0 }))
    }

    pub fn scalar(x: f64) -> Self {
        SymMatrix::from_diagonal(&[x])
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn scale(&self, k: f64) -> Self {
        SymMatrix(&self.0 * k)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.0)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// Serializes a dense matrix as a list of rows.
pub fn serialize_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    matrix_rows(m).serialize(s)
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Eigen-decomposition with eigenvalues ascending and matching columns.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymEig {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }
}

/// Cyclic Jacobi eigensolver.
pub fn sym_eig(a: &SymMatrix) -> Result<SymEig> {
    let n = a.order();
    let mut m = a.0.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let norm = m.norm();
    let target = 1e-13 * norm;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= target || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEig { values, vectors })
}

/// Lower-triangular `G` with `A = G Gᵀ`.
pub fn cholesky(a: &SymMatrix) -> Result<DMatrix<f64>> {
    let n = a.order();
    let mut g = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a.0[(j, j)];
        for k in 0..j {
            d -= g[(j, k)] * g[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite(d));
        }
        let djj = d.sqrt();
        g[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = a.0[(i, j)];
            for k in 0..j {
                s -= g[(i, k)] * g[(j, k)];
            }
            g[(i, j)] = s / djj;
        }
    }
    Ok(g)
}

fn lower_inverse(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let mut inv = DMatrix::<f64>::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in c..i {
                s -= g[(i, k)] * inv[(k, c)];
            }
            inv[(i, c)] = s / g[(i, i)];
        }
    }
    inv
}

/// Eigenvalues of the pencil `A v = λ B v` with `B` SPD, ascending.
pub fn gen_eig_spd(a: &SymMatrix, b: &SymMatrix) -> Result<Vec<f64>> {
    Ok(gen_eig_spd_vectors(a, b)?.values)
}

/// As [`gen_eig_spd`] with `B`-orthonormal eigenvectors in the columns.
pub fn gen_eig_spd_vectors(a: &SymMatrix, b: &SymMatrix) -> Result<SymEig> {
    check_order(a, b.order())?;
    let g = cholesky(b)?;
    let gi = lower_inverse(&g);
    let c = SymMatrix::symmetrize(&(&gi * &a.0 * gi.transpose()));
    let e = sym_eig(&c)?;
    Ok(SymEig {
        values: e.values,
        vectors: gi.transpose() * e.vectors,
    })
}

/// Eigenvalues of the product `A·B` with `A` symmetric and `B` SPD. The
/// product is similar to `Gᵀ A G` where `B = G Gᵀ`, so the spectrum is real.
pub fn product_eigenvalues(a: &SymMatrix, b: &SymMatrix) -> Result<Vec<f64>> {
    check_order(a, b.order())?;
    let g = cholesky(b)?;
    let c = SymMatrix::symmetrize(&(g.transpose() * &a.0 * &g));
    Ok(sym_eig(&c)?.values)
}

/// Inverse of an SPD matrix through its Cholesky factor.
pub fn spd_inverse(a: &SymMatrix) -> Result<SymMatrix> {
    let gi = lower_inverse(&cholesky(a)?);
    Ok(SymMatrix::symmetrize(&(gi.transpose() * gi)))
}

/// Principal square root of a symmetric positive semidefinite matrix.
pub fn sym_sqrt(a: &SymMatrix) -> Result<SymMatrix> {
    let e = sym_eig(a)?;
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        e.values.len(),
        e.values.iter().map(|&l| l.max(0.0).sqrt()),
    ));
    Ok(SymMatrix::symmetrize(&(&e.vectors * d * e.vectors.transpose())))
}

/// Spectrum of a complex Hermitian matrix. The real embedding
/// `[[Re, -Im], [Im, Re]]` carries every eigenvalue twice; one copy of each
/// is returned, ascending.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let n = h.nrows();
    let emb = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let z = h[(i % n, j % n)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let scale = max_abs(&emb);
    let asym = max_abs(&(&emb - emb.transpose()));
    if asym > 1e-10 * scale.max(1e-300) {
        return Err(Error::NotSymmetric(asym));
    }
    let all = sym_eig(&SymMatrix::symmetrize(&emb))?.values;
    Ok(all.iter().step_by(2).copied().collect())
}

fn check_order(a: &SymMatrix, n: usize) -> Result<()> {
    if a.order() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: n,
            got: a.order(),
        })
    }
}

/// `exp(A)` by scaling and squaring with a diagonal Padé(6) approximant.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    const COEF: [f64; 7] = [
        1.0,
        1.0 / 2.0,
        5.0 / 44.0,
        1.0 / 66.0,
        1.0 / 792.0,
        1.0 / 15840.0,
        1.0 / 665280.0,
    ];
    let n = a.nrows();
    let norm = a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    if !norm.is_finite() || norm > 700.0 {
        return Err(Error::ExpDivergence(norm));
    }
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let x = a / 2f64.powi(squarings);
    let id = DMatrix::<f64>::identity(n, n);
    let mut num = id.clone();
    let mut den = id.clone();
    let mut pow = id;
    for (k, c) in COEF.iter().enumerate().skip(1) {
        pow = &pow * &x;
        num += &pow * *c;
        den += &pow * (if k % 2 == 0 { *c } else { -*c });
    }
    let mut r = den.lu().solve(&num).ok_or(Error::ExpDivergence(norm))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::ExpDivergence(norm));
    }
    Ok(r)
}
