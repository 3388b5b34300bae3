//! Assembly of the block perturbation structures induced by subspace
//! extraction.
//!
//! Each extraction rotates the original matrix into a block form whose
//! off-diagonal blocks carry all of the approximation error:
//!
//! * Rayleigh-Ritz on a symmetric `A` with trial basis `Q1` yields
//!   `[diag(theta)  E'; E  A2]`, orthogonally similar to `A`;
//! * Petrov-Galerkin on a rectangular `A` with bases `Q1`, `Q2` yields
//!   `[diag(theta)  E'; F  A2]` with the singular values of `A`;
//! * the one-sided randomized-SVD structure is the special case `E = 0`;
//! * a Lanczos factorization rotates into the same symmetric form with
//!   residual columns supported on a single coordinate.
//!
//! The structures expose exactly the information the bounds consume: the
//! approximate values, the residual blocks (whose column norms equal the
//! residual norms of the approximate pairs), and optionally the tail block or
//! its spectrum.

use crate::linalg::{
    check_finite, orth, require_orthonormal, singular_values, spectral_norm, svd, sym_eig,
    sym_eigenvalues, Matrix, SeededRng, Spectrum, SpectrumOrder, Vector,
};
use crate::{Error, Result};

/// Orthonormality tolerance required of trial bases.
const ORTHO_TOL: f64 = 1e-10;

/// Fixed seed for the random fill used by orthogonal completion. Completion is
/// therefore deterministic; any basis of the complement is equally valid since
/// only the complement subspace matters downstream.
const COMPLEMENT_FILL_SEED: u64 = 0xc03713d5;

/// Whether an extraction keeps the tail block (exact mode) or discards it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMode {
    /// Compute the complement basis and the tail block `A2`.
    Exact,
    /// Keep only the information available without the complement: the
    /// approximate values and the residual norms.
    Approximate,
}

/// Tail information attached to a perturbation structure.
#[derive(Debug, Clone)]
pub enum Tail {
    /// The tail block `A2` itself.
    Block(Matrix),
    /// The spectrum of the tail block (eigenvalues in the symmetric case,
    /// singular values in the rectangular case).
    Spectrum(Spectrum),
    /// Non-retained Ritz values standing in for the tail spectrum; an
    /// approximation, flagged as such.
    RitzStandIn(Spectrum),
}

impl Tail {
    pub fn is_approximate(&self) -> bool {
        matches!(self, Tail::RitzStandIn(_))
    }
}

/// The symmetric Rayleigh-Ritz perturbation structure `[diag(theta) E'; E A2]`.
///
/// `residual_block` holds the block `E` in complement coordinates when the
/// structure was assembled in exact mode, and the full-space residual vectors
/// `A x_i - theta_i x_i` otherwise; the two have identical column norms and
/// identical spectral norm, which is all the bounds use.
#[derive(Debug, Clone)]
pub struct SymmetricPerturbation {
    theta: Vec<f64>,
    residual_block: Matrix,
    tail: Option<Tail>,
    ritz_vectors: Option<Matrix>,
}

impl SymmetricPerturbation {
    pub fn new(
        theta: Vec<f64>,
        residual_block: Matrix,
        tail: Option<Tail>,
        ritz_vectors: Option<Matrix>,
    ) -> Result<Self> {
        if residual_block.ncols() != theta.len() {
            return Err(Error::invalid(format!(
                "residual block has {} columns for {} Ritz values",
                residual_block.ncols(),
                theta.len()
            )));
        }
        if !theta.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::invalid("Ritz values must be ascending"));
        }
        check_finite("symmetric perturbation residual block", &residual_block)?;
        Ok(SymmetricPerturbation {
            theta,
            residual_block,
            tail,
            ritz_vectors,
        })
    }

    pub fn k(&self) -> usize {
        self.theta.len()
    }

    /// Ritz values, ascending.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Residual norms `||E_i||_2` per Ritz pair.
    pub fn residual_norms(&self) -> Vec<f64> {
        (0..self.residual_block.ncols())
            .map(|j| self.residual_block.column(j).norm())
            .collect()
    }

    /// Spectral norm of the whole residual block `||E||_2`.
    pub fn residual_norm_full(&self) -> f64 {
        spectral_norm(&self.residual_block)
    }

    /// Spectral norm of the sub-block of columns `lo..hi` (half-open).
    pub fn residual_norm_columns(&self, lo: usize, hi: usize) -> f64 {
        spectral_norm(&self.residual_block.columns(lo, hi - lo).into_owned())
    }

    pub fn residual_block(&self) -> &Matrix {
        &self.residual_block
    }

    pub fn tail(&self) -> Option<&Tail> {
        self.tail.as_ref()
    }

    pub fn ritz_vectors(&self) -> Option<&Matrix> {
        self.ritz_vectors.as_ref()
    }

    /// Eigenvalues of the tail block, ascending, with an `approximate` flag.
    ///
    /// Errors when no tail information is attached.
    pub fn tail_spectrum(&self) -> Result<(Spectrum, bool)> {
        match &self.tail {
            Some(Tail::Block(a2)) => Ok((sym_eigenvalues(a2)?, false)),
            Some(Tail::Spectrum(s)) => Ok((s.clone(), false)),
            Some(Tail::RitzStandIn(s)) => Ok((s.clone(), true)),
            None => Err(Error::TailRequired),
        }
    }

    /// Rebuilds the full block matrix `[diag(theta) E'; E A2]`.
    ///
    /// Requires the tail block itself and a residual block stored in
    /// complement coordinates (exact mode).
    pub fn assemble(&self) -> Result<Matrix> {
        let a2 = match &self.tail {
            Some(Tail::Block(a2)) => a2,
            _ => return Err(Error::TailRequired),
        };
        let k = self.k();
        let t = a2.nrows();
        if self.residual_block.nrows() != t || a2.ncols() != t {
            return Err(Error::invalid(
                "assemble needs E in complement coordinates and a square tail block",
            ));
        }
        let n = k + t;
        let mut full = Matrix::zeros(n, n);
        for (i, v) in self.theta.iter().enumerate() {
            full[(i, i)] = *v;
        }
        full.view_mut((k, 0), (t, k)).copy_from(&self.residual_block);
        full.view_mut((0, k), (k, t))
            .copy_from(&self.residual_block.transpose());
        full.view_mut((k, k), (t, t)).copy_from(a2);
        Ok(full)
    }
}

/// The Petrov-Galerkin / randomized-SVD perturbation structure
/// `[diag(theta) E'; F A2]`.
///
/// Same storage convention as [`SymmetricPerturbation`]: in exact mode
/// `e_block` / `f_block` are in complement coordinates ((n-k) x k and
/// (m-k) x k); in approximate mode they hold the residual vectors
/// `A'u_i - theta_i v_i` (n x k) and `A v_i - theta_i u_i` (m x k).
#[derive(Debug, Clone)]
pub struct SvdPerturbation {
    theta: Vec<f64>,
    e_block: Matrix,
    f_block: Matrix,
    tail: Option<Tail>,
    left_vectors: Option<Matrix>,
    right_vectors: Option<Matrix>,
    square_input: bool,
}

impl SvdPerturbation {
    pub fn new(
        theta: Vec<f64>,
        e_block: Matrix,
        f_block: Matrix,
        tail: Option<Tail>,
        left_vectors: Option<Matrix>,
        right_vectors: Option<Matrix>,
        square_input: bool,
    ) -> Result<Self> {
        if e_block.ncols() != theta.len() || f_block.ncols() != theta.len() {
            return Err(Error::invalid(
                "residual blocks must have one column per approximate singular value",
            ));
        }
        if !theta.windows(2).all(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "approximate singular values must be descending",
            ));
        }
        check_finite("svd perturbation E block", &e_block)?;
        check_finite("svd perturbation F block", &f_block)?;
        Ok(SvdPerturbation {
            theta,
            e_block,
            f_block,
            tail,
            left_vectors,
            right_vectors,
            square_input,
        })
    }

    pub fn k(&self) -> usize {
        self.theta.len()
    }

    /// Approximate singular values, descending.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Right residual norms `||E_i||_2 = ||A'u_i - theta_i v_i||_2`.
    pub fn residual_norms_e(&self) -> Vec<f64> {
        (0..self.e_block.ncols())
            .map(|j| self.e_block.column(j).norm())
            .collect()
    }

    /// Left residual norms `||F_i||_2 = ||A v_i - theta_i u_i||_2`.
    pub fn residual_norms_f(&self) -> Vec<f64> {
        (0..self.f_block.ncols())
            .map(|j| self.f_block.column(j).norm())
            .collect()
    }

    pub fn norm_e(&self) -> f64 {
        spectral_norm(&self.e_block)
    }

    pub fn norm_f(&self) -> f64 {
        spectral_norm(&self.f_block)
    }

    pub fn e_block(&self) -> &Matrix {
        &self.e_block
    }

    pub fn f_block(&self) -> &Matrix {
        &self.f_block
    }

    pub fn tail(&self) -> Option<&Tail> {
        self.tail.as_ref()
    }

    pub fn left_vectors(&self) -> Option<&Matrix> {
        self.left_vectors.as_ref()
    }

    pub fn right_vectors(&self) -> Option<&Matrix> {
        self.right_vectors.as_ref()
    }

    /// Whether the original matrix was square. The singular-value bound's
    /// hypotheses assume m != n; a square input is handled by implicitly
    /// padding one zero row (which leaves singular values unchanged) and
    /// reports carry this flag.
    pub fn square_input(&self) -> bool {
        self.square_input
    }

    /// Singular values of the tail block, descending, with an `approximate`
    /// flag.
    pub fn tail_spectrum(&self) -> Result<(Spectrum, bool)> {
        match &self.tail {
            Some(Tail::Block(a2)) => Ok((singular_values(a2)?, false)),
            Some(Tail::Spectrum(s)) => Ok((s.clone(), false)),
            Some(Tail::RitzStandIn(s)) => Ok((s.clone(), true)),
            None => Err(Error::TailRequired),
        }
    }

    /// Rebuilds the full block matrix `[diag(theta) E'; F A2]` (exact mode
    /// only).
    pub fn assemble(&self) -> Result<Matrix> {
        let a2 = match &self.tail {
            Some(Tail::Block(a2)) => a2,
            _ => return Err(Error::TailRequired),
        };
        let k = self.k();
        let (tr, tc) = (a2.nrows(), a2.ncols());
        if self.f_block.nrows() != tr || self.e_block.nrows() != tc {
            return Err(Error::invalid(
                "assemble needs E, F in complement coordinates matching the tail block",
            ));
        }
        let (m, n) = (k + tr, k + tc);
        let mut full = Matrix::zeros(m, n);
        for (i, v) in self.theta.iter().enumerate() {
            full[(i, i)] = *v;
        }
        full.view_mut((0, k), (k, tc))
            .copy_from(&self.e_block.transpose());
        full.view_mut((k, 0), (tr, k)).copy_from(&self.f_block);
        full.view_mut((k, k), (tr, tc)).copy_from(a2);
        Ok(full)
    }
}

/// Output of the Lanczos process: `A Q1 = Q1 T_k + q_{k+1} t_{k+1,k} e_k'`.
///
/// The tridiagonal `T_k` is stored as its diagonal and off-diagonal, so it is
/// tridiagonal by construction. `coupling` is `t_{k+1,k} >= 0`; on breakdown
/// the factorization is shorter than requested, `coupling` is zero and
/// `next_vector` is absent.
#[derive(Debug, Clone)]
pub struct LanczosFactorization {
    basis: Matrix,
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
    coupling: f64,
    next_vector: Option<Vector>,
    breakdown: bool,
}

impl LanczosFactorization {
    /// Number of Lanczos steps actually taken (dimension of `T_k`).
    pub fn k(&self) -> usize {
        self.diagonal.len()
    }

    /// The orthonormal Krylov basis `Q1` (n x k).
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    /// `t_{k+1,k}`, the coupling scalar to the next Krylov direction.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn next_vector(&self) -> Option<&Vector> {
        self.next_vector.as_ref()
    }

    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    /// Dense `T_k`.
    pub fn tridiagonal(&self) -> Matrix {
        let k = self.k();
        let mut t = Matrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = self.diagonal[i];
        }
        for i in 0..k.saturating_sub(1) {
            t[(i, i + 1)] = self.off_diagonal[i];
            t[(i + 1, i)] = self.off_diagonal[i];
        }
        t
    }

    /// `||A Q1 - Q1 T_k - q_{k+1} t e_k'||_2`, the three-term recurrence
    /// residual.
    pub fn recurrence_residual(&self, a: &Matrix) -> f64 {
        let mut r = a * &self.basis - &self.basis * self.tridiagonal();
        if let Some(q_next) = &self.next_vector {
            let k = self.k();
            let col = r.column(k - 1) - q_next * self.coupling;
            r.set_column(k - 1, &col);
        }
        spectral_norm(&r)
    }
}

/// Deterministic orthonormal basis of the orthogonal complement of the column
/// span of `x` (columns assumed orthonormal). Returns an `n x (n - k)` matrix.
pub fn orthogonal_complement(x: &Matrix) -> Result<Matrix> {
    let (n, k) = (x.nrows(), x.ncols());
    if k > n {
        return Err(Error::invalid("complement of a wide basis"));
    }
    if k == n {
        return Ok(Matrix::zeros(n, 0));
    }
    let mut rng = SeededRng::new(COMPLEMENT_FILL_SEED);
    for _attempt in 0..4 {
        let mut m = Matrix::zeros(n, n);
        m.view_mut((0, 0), (n, k)).copy_from(x);
        m.view_mut((0, k), (n, n - k))
            .copy_from(&rng.gaussian_matrix(n, n - k));
        if let Ok(q) = orth(&m) {
            let complement = q.columns(k, n - k).into_owned();
            // The fill is random, so a defective draw is retried rather than
            // propagated.
            if (x.transpose() * &complement).norm() <= 1e-12 * (n as f64).sqrt() {
                return Ok(complement);
            }
        }
    }
    Err(Error::invalid(
        "orthogonal completion failed; is the input orthonormal?",
    ))
}

/// Rayleigh-Ritz extraction: eigendecompose `Q1' A Q1` and rotate `A` into the
/// perturbation structure `[diag(theta) E'; E A2]`.
///
/// In exact mode the complement basis is computed and the tail block `A2` is
/// attached; in approximate mode only the residual vectors are kept.
pub fn rayleigh_ritz(
    a: &Matrix,
    q1: &Matrix,
    tail_mode: TailMode,
) -> Result<SymmetricPerturbation> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    check_finite("rayleigh_ritz", a)?;
    if q1.nrows() != a.nrows() || q1.ncols() > q1.nrows() {
        return Err(Error::invalid(format!(
            "trial basis {}x{} incompatible with matrix of order {}",
            q1.nrows(),
            q1.ncols(),
            a.nrows()
        )));
    }
    require_orthonormal("rayleigh_ritz trial basis", q1, ORTHO_TOL)?;

    let a_q1 = a * q1;
    let projected = q1.transpose() * &a_q1;
    let (theta, y) = sym_eig(&projected)?;
    let ritz_vectors = q1 * &y;
    let theta: Vec<f64> = theta.values().to_vec();

    match tail_mode {
        TailMode::Exact => {
            let complement = orthogonal_complement(&ritz_vectors)?;
            let a_ritz = a * &ritz_vectors;
            let e = complement.transpose() * &a_ritz;
            let a_comp = a * &complement;
            let a2 = complement.transpose() * &a_comp;
            let a2 = (&a2 + a2.transpose()) * 0.5;
            SymmetricPerturbation::new(theta, e, Some(Tail::Block(a2)), Some(ritz_vectors))
        }
        TailMode::Approximate => {
            let mut residuals = a * &ritz_vectors;
            for (j, t) in theta.iter().enumerate() {
                let col = residuals.column(j) - ritz_vectors.column(j) * *t;
                residuals.set_column(j, &col);
            }
            SymmetricPerturbation::new(theta, residuals, None, Some(ritz_vectors))
        }
    }
}

/// Petrov-Galerkin extraction for singular values: SVD of `Q1' A Q2` and
/// rotation of `A` into `[diag(theta) E'; F A2]`.
///
/// `Q2` may have more columns than `Q1` (`k2 >= k`); the first `k2 - k` rows
/// of `E` are then zero by construction.
pub fn petrov_galerkin(
    a: &Matrix,
    q1: &Matrix,
    q2: &Matrix,
    tail_mode: TailMode,
) -> Result<SvdPerturbation> {
    check_finite("petrov_galerkin", a)?;
    let (m, n) = (a.nrows(), a.ncols());
    let k = q1.ncols();
    let k2 = q2.ncols();
    if q1.nrows() != m || q2.nrows() != n {
        return Err(Error::invalid("trial bases do not match the matrix shape"));
    }
    if k2 < k {
        return Err(Error::invalid(format!(
            "right basis must have at least as many columns as the left ({k2} < {k})"
        )));
    }
    require_orthonormal("petrov_galerkin left basis", q1, ORTHO_TOL)?;
    require_orthonormal("petrov_galerkin right basis", q2, ORTHO_TOL)?;

    let b = q1.transpose() * a * q2;
    let (x, theta, y1) = svd(&b)?;
    // Thin SVD of the k x k2 projection: x is k x k, y1 is k2 x k.
    let theta: Vec<f64> = theta.values().to_vec();
    let left = q1 * &x;
    let right = q2 * &y1;

    match tail_mode {
        TailMode::Exact => {
            let q1_perp = orthogonal_complement(q1)?;
            let q2_perp = orthogonal_complement(q2)?;
            let y2 = orthogonal_complement(&y1)?;
            let q2_y2 = q2 * &y2;

            // E in complement coordinates [Q2 Y2 | Q2_perp]: the Y2 part is
            // zero by construction of the SVD.
            let mut e = Matrix::zeros(n - k, k);
            let at_left = a.transpose() * &left;
            e.view_mut((k2 - k, 0), (n - k2, k))
                .copy_from(&(q2_perp.transpose() * &at_left));
            let f = q1_perp.transpose() * (a * &right);

            let mut a2 = Matrix::zeros(m - k, n - k);
            a2.view_mut((0, 0), (m - k, k2 - k))
                .copy_from(&(q1_perp.transpose() * (a * &q2_y2)));
            a2.view_mut((0, k2 - k), (m - k, n - k2))
                .copy_from(&(q1_perp.transpose() * (a * &q2_perp)));

            SvdPerturbation::new(
                theta,
                e,
                f,
                Some(Tail::Block(a2)),
                Some(left),
                Some(right),
                m == n,
            )
        }
        TailMode::Approximate => {
            let mut e = a.transpose() * &left;
            let mut f = a * &right;
            for (j, t) in theta.iter().enumerate() {
                let ce = e.column(j) - right.column(j) * *t;
                e.set_column(j, &ce);
                let cf = f.column(j) - left.column(j) * *t;
                f.set_column(j, &cf);
            }
            SvdPerturbation::new(theta, e, f, None, Some(left), Some(right), m == n)
        }
    }
}

/// Perturbation structure of the one-sided randomized-SVD approximation
/// `Q1 Q1' A`: the right basis is implicitly the full space, so the `E` block
/// is exactly zero.
pub fn hmt_structure(a: &Matrix, q1: &Matrix, tail_mode: TailMode) -> Result<SvdPerturbation> {
    check_finite("hmt_structure", a)?;
    let (m, n) = (a.nrows(), a.ncols());
    let k = q1.ncols();
    if q1.nrows() != m {
        return Err(Error::invalid("trial basis does not match the matrix shape"));
    }
    if k > n {
        return Err(Error::invalid(format!(
            "hmt_structure needs k <= n, got k = {k}, n = {n}"
        )));
    }
    require_orthonormal("hmt_structure trial basis", q1, ORTHO_TOL)?;

    let b = q1.transpose() * a;
    let (u0, theta, v0) = svd(&b)?;
    let theta: Vec<f64> = theta.values().to_vec();
    let left = q1 * &u0;
    let e = Matrix::zeros(n - k, k);

    match tail_mode {
        TailMode::Exact => {
            let q1_perp = orthogonal_complement(q1)?;
            let v0_perp = orthogonal_complement(&v0)?;
            let f = q1_perp.transpose() * (a * &v0);
            let a2 = q1_perp.transpose() * (a * &v0_perp);
            SvdPerturbation::new(
                theta,
                e,
                f,
                Some(Tail::Block(a2)),
                Some(left),
                Some(v0),
                m == n,
            )
        }
        TailMode::Approximate => {
            let mut f = a * &v0;
            for (j, t) in theta.iter().enumerate() {
                let cf = f.column(j) - left.column(j) * *t;
                f.set_column(j, &cf);
            }
            SvdPerturbation::new(theta, e, f, None, Some(left), Some(v0), m == n)
        }
    }
}

/// Lanczos with full reorthogonalization (two-pass classical Gram-Schmidt
/// against all previous basis vectors at every step).
///
/// Stops early on breakdown, i.e. when the next off-diagonal falls below
/// `1e-14` times the Frobenius norm of `A` (an upper surrogate for `||A||_2`),
/// returning the shorter factorization with the breakdown flag set.
pub fn lanczos(a: &Matrix, v0: &Vector, k: usize) -> Result<LanczosFactorization> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    check_finite("lanczos", a)?;
    let n = a.nrows();
    if v0.len() != n {
        return Err(Error::invalid("start vector length does not match A"));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "lanczos needs 1 <= k <= n, got k = {k}"
        )));
    }
    let v0_norm = v0.norm();
    if v0_norm == 0.0 {
        return Err(Error::invalid("zero start vector"));
    }

    let breakdown_tol = 1e-14 * a.norm();
    let mut basis = Matrix::zeros(n, k);
    basis.set_column(0, &(v0 / v0_norm));
    let mut diagonal = Vec::with_capacity(k);
    let mut off_diagonal = Vec::with_capacity(k.saturating_sub(1));

    let mut steps = 0;
    let mut coupling = 0.0;
    let mut next_vector = None;
    let mut breakdown = false;

    for j in 0..k {
        let qj = basis.column(j).into_owned();
        let mut w = a * &qj;
        let alpha = qj.dot(&w);
        diagonal.push(alpha);
        steps = j + 1;

        w -= &qj * alpha;
        if j > 0 {
            let prev = basis.column(j - 1).into_owned();
            w -= &prev * off_diagonal[j - 1];
        }
        // Full reorthogonalization, two passes.
        for _pass in 0..2 {
            let basis_used = basis.columns(0, j + 1);
            let coeffs = basis_used.transpose() * &w;
            w -= basis_used * coeffs;
        }

        let beta = w.norm();
        if beta <= breakdown_tol {
            breakdown = true;
            coupling = 0.0;
            next_vector = None;
            break;
        }
        let q_next = w / beta;
        if j + 1 < k {
            off_diagonal.push(beta);
            basis.set_column(j + 1, &q_next);
        } else {
            coupling = beta;
            next_vector = Some(q_next);
        }
    }

    let basis = if steps == k {
        basis
    } else {
        basis.columns(0, steps).into_owned()
    };
    Ok(LanczosFactorization {
        basis,
        diagonal,
        off_diagonal,
        coupling,
        next_vector,
        breakdown,
    })
}

/// Turns a Lanczos factorization into the symmetric perturbation structure,
/// retaining the `keep` smallest Ritz pairs in the leading block.
///
/// Eigendecomposing `T_k = U diag(lambda) U'` rotates the factorization so
/// that each retained Ritz pair couples to the rest of the space through the
/// single coordinate of `q_{k+1}`, with weight `t_{k+1,k} U(k, i)`; the
/// residual columns therefore have exactly one nonzero entry (in the first
/// tail coordinate).
///
/// Non-retained Ritz values join the tail spectrum. When the original matrix
/// is supplied, the tail is their union with the spectrum of the unexplored
/// complement of the Krylov basis (exact mode); otherwise the non-retained
/// Ritz values alone stand in, flagged approximate.
pub fn lanczos_to_perturbation(
    f: &LanczosFactorization,
    keep: usize,
    original: Option<&Matrix>,
) -> Result<SymmetricPerturbation> {
    let k = f.k();
    if keep == 0 || keep > k {
        return Err(Error::invalid(format!(
            "keep must satisfy 1 <= keep <= k = {k}, got {keep}"
        )));
    }
    let n = f.basis.nrows();
    let (ritz, u) = sym_eig(&f.tridiagonal())?;
    let ritz = ritz.values().to_vec();

    let retained = &ritz[..keep];
    let rest = &ritz[keep..];

    // Tail coordinates are ordered [q_{k+1}, non-retained Ritz directions,
    // unexplored complement]; only the first row is ever nonzero.
    let tail_rows = match original {
        Some(_) => n - keep,
        None => 1 + (k - keep),
    };
    let mut e = Matrix::zeros(tail_rows, keep);
    for i in 0..keep {
        e[(0, i)] = f.coupling * u[(k - 1, i)];
    }

    let ritz_vectors = &f.basis * u.columns(0, keep).into_owned();

    let tail = match original {
        Some(a) => {
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::invalid(
                    "original matrix does not match the factorization dimension",
                ));
            }
            let complement = orthogonal_complement(&f.basis)?;
            let block = complement.transpose() * (a * &complement);
            let comp_spec = sym_eigenvalues(&block)?;
            let mut values: Vec<f64> = rest.to_vec();
            values.extend_from_slice(comp_spec.values());
            Tail::Spectrum(Spectrum::from_unsorted(values, SpectrumOrder::Ascending)?)
        }
        None => Tail::RitzStandIn(Spectrum::from_unsorted(
            rest.to_vec(),
            SpectrumOrder::Ascending,
        )?),
    };

    SymmetricPerturbation::new(retained.to_vec(), e, Some(tail), Some(ritz_vectors))
}
