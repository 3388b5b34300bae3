//! Dense linear-algebra primitives, deterministic random generation, and
//! test-matrix constructors.
//!
//! Conventions, fixed library-wide:
//! * scalars are `f64` (all tolerances in the crate assume double precision,
//!   unit roundoff [`UNIT_ROUNDOFF`]);
//! * matrices are dense and column-major ([`Matrix`] is `nalgebra::DMatrix<f64>`);
//! * the dense symmetric eigensolver and SVD delegate to nalgebra behind
//!   [`sym_eig`] / [`svd`]; everything downstream goes through these two
//!   functions.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense column-major matrix of `f64`.
pub type Matrix = DMatrix<f64>;
/// Dense column vector of `f64`.
pub type Vector = DVector<f64>;

/// Unit roundoff u of IEEE-754 binary64 (half the machine epsilon).
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Sort order of a [`Spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumOrder {
    Ascending,
    Descending,
}

/// An ordered list of real eigenvalues or singular values.
///
/// Construction validates finiteness and the declared order, so a `Spectrum`
/// in hand is always sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    order: SpectrumOrder,
}

impl Spectrum {
    pub fn new(values: Vec<f64>, order: SpectrumOrder) -> Result<Self> {
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: "spectrum",
                    row: i,
                    col: 0,
                });
            }
        }
        let sorted = match order {
            SpectrumOrder::Ascending => values.windows(2).all(|w| w[0] <= w[1]),
            SpectrumOrder::Descending => values.windows(2).all(|w| w[0] >= w[1]),
        };
        if !sorted {
            return Err(Error::invalid(format!("spectrum is not {order:?}")));
        }
        Ok(Spectrum { values, order })
    }

    pub fn ascending(values: Vec<f64>) -> Result<Self> {
        Self::new(values, SpectrumOrder::Ascending)
    }

    pub fn descending(values: Vec<f64>) -> Result<Self> {
        Self::new(values, SpectrumOrder::Descending)
    }

    /// Sorts `values` into the requested order first.
    pub fn from_unsorted(mut values: Vec<f64>, order: SpectrumOrder) -> Result<Self> {
        values.sort_by(|a, b| a.total_cmp(b));
        if order == SpectrumOrder::Descending {
            values.reverse();
        }
        Self::new(values, order)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn order(&self) -> SpectrumOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Distance from `x` to the closest value, `min_j |x - v_j|`.
    ///
    /// Returns `f64::INFINITY` for an empty spectrum.
    pub fn min_distance(&self, x: f64) -> f64 {
        self.values
            .iter()
            .map(|v| (x - v).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest magnitude, `max_j |v_j|` (0 for an empty spectrum).
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn as_diagonal(&self) -> Matrix {
        Matrix::from_diagonal(&Vector::from_row_slice(&self.values))
    }
}

/// Seeded, reproducible random generator.
///
/// The algorithm is fixed to ChaCha12 (`rand_chacha::ChaCha12Rng`), whose
/// output stream for a given 64-bit seed is specified independently of the
/// platform, so one seed yields one stream everywhere. Gaussian draws use
/// `rand_distr::StandardNormal`.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha12Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            seed,
            inner: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// One draw from N(0, 1).
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Matrix with i.i.d. N(0, 1) entries, filled column by column.
    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| self.standard_normal())
    }

    /// Vector with i.i.d. N(0, 1) entries.
    pub fn gaussian_vector(&mut self, len: usize) -> Vector {
        Vector::from_fn(len, |_, _| self.standard_normal())
    }

    /// Random unit vector (normalized Gaussian).
    pub fn unit_vector(&mut self, len: usize) -> Vector {
        let v = self.gaussian_vector(len);
        let n = v.norm();
        v / n
    }
}

/// Returns an error if any entry of `m` is NaN or infinite.
pub fn check_finite(context: &'static str, m: &Matrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite {
                    context,
                    row: i,
                    col: j,
                });
            }
        }
    }
    Ok(())
}

/// Spectral norm `||A||_2` (largest singular value; 0 for an empty matrix).
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// `||Q'Q - I||_2`, the orthonormality defect of the columns of `q`.
pub fn orthonormality_defect(q: &Matrix) -> f64 {
    let k = q.ncols();
    let mut g = q.transpose() * q;
    for i in 0..k {
        g[(i, i)] -= 1.0;
    }
    spectral_norm(&g)
}

pub(crate) fn require_orthonormal(context: &'static str, q: &Matrix, tol: f64) -> Result<()> {
    let deviation = orthonormality_defect(q);
    if deviation > tol {
        return Err(Error::NotOrthonormal {
            context,
            deviation,
            tol,
        });
    }
    Ok(())
}

/// Gershgorin bounds `(lo, hi)` enclosing the spectrum of a symmetric matrix.
pub fn gershgorin_bounds(a: &Matrix) -> (f64, f64) {
    let n = a.nrows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let d = a[(i, i)];
        let mut r = 0.0;
        for j in 0..n {
            if j != i {
                r += a[(i, j)].abs();
            }
        }
        lo = lo.min(d - r);
        hi = hi.max(d + r);
    }
    if n == 0 {
        (0.0, 0.0)
    } else {
        (lo, hi)
    }
}

/// Symmetric eigendecomposition `A V = V diag(lambda)` with `lambda` ascending.
///
/// The input is symmetrized as `(A + A') / 2` before solving, so it only needs
/// to be symmetric to roundoff-level tolerance. Errors on non-square or
/// non-finite input.
pub fn sym_eig(a: &Matrix) -> Result<(Spectrum, Matrix)> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    check_finite("sym_eig", a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((Spectrum::ascending(vec![])?, Matrix::zeros(0, 0)));
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::NoConvergence)?;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in idx.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((Spectrum::ascending(values)?, vectors))
}

/// Thin SVD `A = U diag(sigma) V'` with `sigma` nonnegative descending.
///
/// `U` is `m x p`, `V` is `n x p` with `p = min(m, n)`. Errors on non-finite
/// input.
pub fn svd(a: &Matrix) -> Result<(Matrix, Spectrum, Matrix)> {
    check_finite("svd", a)?;
    let p = a.nrows().min(a.ncols());
    if p == 0 {
        return Ok((
            Matrix::zeros(a.nrows(), 0),
            Spectrum::descending(vec![])?,
            Matrix::zeros(a.ncols(), 0),
        ));
    }
    let dec = a
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or(Error::NoConvergence)?;
    let u = dec.u.ok_or(Error::NoConvergence)?;
    let v_t = dec.v_t.ok_or(Error::NoConvergence)?;
    let sv = dec.singular_values;

    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    let values: Vec<f64> = idx.iter().map(|&i| sv[i]).collect();
    let mut u_sorted = Matrix::zeros(a.nrows(), p);
    let mut v_sorted = Matrix::zeros(a.ncols(), p);
    for (dst, &src) in idx.iter().enumerate() {
        u_sorted.set_column(dst, &u.column(src));
        v_sorted.set_column(dst, &v_t.row(src).transpose());
    }
    Ok((u_sorted, Spectrum::descending(values)?, v_sorted))
}

/// Eigenvalues only (no eigenvectors), ascending; cheaper than [`sym_eig`]
/// when the vectors are not needed.
pub fn sym_eigenvalues(a: &Matrix) -> Result<Spectrum> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    check_finite("sym_eigenvalues", a)?;
    if a.nrows() == 0 {
        return Spectrum::ascending(vec![]);
    }
    let sym = (a + a.transpose()) * 0.5;
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Spectrum::ascending(values)
}

/// Singular values only, descending.
pub fn singular_values(a: &Matrix) -> Result<Spectrum> {
    check_finite("singular_values", a)?;
    let mut v: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    Spectrum::descending(v)
}

/// Orthonormal basis of the column span of `a` via Householder QR.
///
/// Requires `ncols <= nrows` and full column rank; a rank-deficient input is
/// reported with the offending (0-based) column index. The rank tolerance is
/// `1e-12` relative to the largest column norm.
pub fn orth(a: &Matrix) -> Result<Matrix> {
    if a.ncols() > a.nrows() {
        return Err(Error::invalid(format!(
            "orth needs cols <= rows, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    check_finite("orth", a)?;
    if a.ncols() == 0 {
        return Ok(Matrix::zeros(a.nrows(), 0));
    }
    let max_col_norm = (0..a.ncols()).map(|j| a.column(j).norm()).fold(0.0, f64::max);
    let tol = 1e-12 * max_col_norm;
    let qr = a.clone().qr();
    let r = qr.r();
    for j in 0..a.ncols() {
        let pivot = r[(j, j)].abs();
        if pivot <= tol {
            return Err(Error::RankDeficient {
                col: j,
                pivot,
                tol,
            });
        }
    }
    Ok(qr.q())
}

/// Haar-distributed random orthogonal `n x n` matrix.
///
/// Standard construction: QR of an i.i.d. Gaussian matrix with the sign of
/// each diagonal entry of R folded into the corresponding column of Q.
pub fn haar_orthogonal(n: usize, rng: &mut SeededRng) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::invalid("haar_orthogonal needs n >= 1"));
    }
    let g = rng.gaussian_matrix(n, n);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let col = -q.column(j);
            q.set_column(j, &col);
        }
    }
    Ok(q)
}

/// First `cols` columns of a Haar-distributed `rows x rows` orthogonal matrix
/// (QR of a Gaussian `rows x cols` block, sign-corrected).
pub fn haar_columns(rows: usize, cols: usize, rng: &mut SeededRng) -> Result<Matrix> {
    if cols > rows || rows == 0 {
        return Err(Error::invalid(format!(
            "haar_columns needs rows >= cols >= 0, got {rows}x{cols}"
        )));
    }
    let g = rng.gaussian_matrix(rows, cols);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        if r[(j, j)] < 0.0 {
            let col = -q.column(j);
            q.set_column(j, &col);
        }
    }
    Ok(q)
}

/// Symmetric matrix with prescribed spectrum: `A = V diag(D) V'` for a Haar
/// random orthogonal `V`.
pub fn sym_with_spectrum(d: &Spectrum, rng: &mut SeededRng) -> Result<Matrix> {
    let n = d.len();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let v = haar_orthogonal(n, rng)?;
    let scaled = {
        let mut m = v.clone();
        for (j, lambda) in d.values().iter().enumerate() {
            let col = m.column(j) * *lambda;
            m.set_column(j, &col);
        }
        m
    };
    let a = &scaled * v.transpose();
    Ok((&a + a.transpose()) * 0.5)
}

/// Rectangular `m x n` matrix with geometrically spaced singular values from 1
/// down to `1/kappa` and Haar-distributed singular vectors (MATLAB
/// `gallery('randsvd', [m, n], kappa)`, mode 3).
pub fn geometric_randsvd(m: usize, n: usize, kappa: f64, rng: &mut SeededRng) -> Result<Matrix> {
    if n == 0 || m < n {
        return Err(Error::invalid(format!(
            "geometric_randsvd needs m >= n >= 1, got {m}x{n}"
        )));
    }
    if !kappa.is_finite() || kappa < 1.0 {
        return Err(Error::invalid(format!(
            "geometric_randsvd needs kappa >= 1, got {kappa}"
        )));
    }
    let sigma: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                1.0
            } else {
                kappa.powf(-(i as f64) / (n as f64 - 1.0))
            }
        })
        .collect();
    let u = haar_columns(m, n, rng)?;
    let v = haar_orthogonal(n, rng)?;
    let mut us = u;
    for (j, s) in sigma.iter().enumerate() {
        let col = us.column(j) * *s;
        us.set_column(j, &col);
    }
    Ok(us * v.transpose())
}
