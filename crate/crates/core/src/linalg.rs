//! Dense complex matrix kernel sized for certificate checking at small
//! dimension (tens to a few hundred, not thousands).
//!
//! Matrices are row-major buffers of `Complex64`. Structural misuse
//! (mismatched shapes in products, sums, Kronecker factors) is a programmer
//! error and panics; the operations with mathematically meaningful failure
//! modes (`hermitian_eigen`, `partial_trace_left`) return errors instead.
//!
//! Vectorization is row-major throughout the crate: `vec(V)` stacks the rows
//! of `V`, so the entry `V[j][k]` lands at flat index `j * cols + k`.

use num_complex::Complex64;
use thiserror::Error;

/// Absolute entrywise tolerance under which a matrix counts as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Relative residual bound the eigensolver is expected to meet.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;
/// Sweep cap for the cyclic Jacobi iteration.
pub const JACOBI_SWEEP_CAP: usize = 100;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("Jacobi iteration hit the sweep cap {cap} with off-diagonal norm {off:.3e}")]
    NotConverged { cap: usize, off: f64 },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
}

/// Shorthand for the only scalar type used in this crate.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        CMatrix { rows, cols, data: vec![Complex64::default(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty(), "matrix dimensions must be positive");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        CMatrix { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// Column vector with the given entries.
    pub fn column(entries: &[Complex64]) -> Self {
        CMatrix { rows: entries.len(), cols: 1, data: entries.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scaled(&self, s: Complex64) -> CMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::default() {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[lhs_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == Complex64::default() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise deviation from `self = self^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square(), "hermiticity defect of non-square matrix");
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect() <= tol
    }

    /// `(self + self^dagger) / 2`, exactly Hermitian up to rounding.
    pub fn hermitized(&self) -> CMatrix {
        self.add(&self.adjoint()).scaled(c(0.5, 0.0))
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Inner product `u^dagger v` of two column vectors.
pub fn inner(u: &CMatrix, v: &CMatrix) -> Complex64 {
    assert!(u.cols == 1 && v.cols == 1 && u.rows == v.rows, "inner product needs equal-length columns");
    u.data.iter().zip(&v.data).map(|(a, b)| a.conj() * b).sum()
}

/// Outer product `u v^dagger` of two column vectors.
pub fn outer(u: &CMatrix, v: &CMatrix) -> CMatrix {
    assert!(u.cols == 1 && v.cols == 1, "outer product needs column vectors");
    let mut out = CMatrix::zeros(u.rows, v.rows);
    for i in 0..u.rows {
        for j in 0..v.rows {
            out[(i, j)] = u.data[i] * v.data[j].conj();
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascend;
/// `eigenvectors` holds the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

/// Cyclic complex Jacobi eigensolver.
///
/// `tol` bounds the accepted hermiticity defect of the input; the iteration
/// then runs on the explicitly Hermitized matrix. Rotations zero one
/// off-diagonal pair at a time; the sweep repeats until the off-diagonal
/// norm falls below `1e-14` relative to the input scale.
pub fn hermitian_eigen(a: &CMatrix, tol: f64) -> Result<EigenDecomposition, LinalgError> {
    jacobi(a, tol, true)
}

/// Eigenvalues only; skips accumulating the rotation product.
pub fn hermitian_eigenvalues(a: &CMatrix, tol: f64) -> Result<Vec<f64>, LinalgError> {
    Ok(jacobi(a, tol, false)?.eigenvalues)
}

fn jacobi(a: &CMatrix, tol: f64, want_vectors: bool) -> Result<EigenDecomposition, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows, cols: a.cols });
    }
    let defect = a.hermiticity_defect();
    if defect > tol {
        return Err(LinalgError::NotHermitian { defect, tol });
    }
    let n = a.rows;
    let mut m = a.hermitized();
    let mut v = if want_vectors { CMatrix::identity(n) } else { CMatrix::zeros(1, 1) };
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let target = 1e-14 * scale;

    let mut converged = false;
    let mut off = off_diagonal_norm(&m);
    for _sweep in 0..JACOBI_SWEEP_CAP {
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q, scale, want_vectors);
            }
        }
        off = off_diagonal_norm(&m);
    }
    if !converged && off > target {
        return Err(LinalgError::NotConverged { cap: JACOBI_SWEEP_CAP, off });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = if want_vectors {
        CMatrix::from_fn(n, n, |i, j| v[(i, order[j])])
    } else {
        CMatrix::zeros(1, 1)
    };
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let n = m.rows;
    let mut s = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                s += m[(p, q)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One two-sided rotation `M <- U^dagger M U` on the (p, q) plane chosen to
/// zero `M[p][q]`, with `U[p][p] = U[q][q] = cos`, `U[p][q] = -sin * phase`,
/// `U[q][p] = sin * conj(phase)` and `phase = M[p][q] / |M[p][q]|`.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, scale: f64, want_vectors: bool) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r <= 1e-300 * scale.max(1.0) {
        return;
    }
    let phase = apq / r;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // tan(2 theta) solves r * (c^2 - s^2) = (app - aqq) * s * c.
    let tau = (app - aqq) / (2.0 * r);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let cth = 1.0 / (1.0 + t * t).sqrt();
    let sth = t * cth;
    let sp = phase.scale(sth);

    let n = m.rows;
    // Column update: B = M U.
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp.scale(cth) + mkq * sp.conj();
        m[(k, q)] = mkq.scale(cth) - mkp * sp;
    }
    // Row update: U^dagger B.
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = mpk.scale(cth) + mqk * sp;
        m[(q, k)] = mqk.scale(cth) - mpk * sp.conj();
    }
    // The (p, q) pair is zero analytically; pin it and keep the diagonal real.
    m[(p, q)] = Complex64::default();
    m[(q, p)] = Complex64::default();
    m[(p, p)] = c(m[(p, p)].re, 0.0);
    m[(q, q)] = c(m[(q, q)].re, 0.0);

    if want_vectors {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp.scale(cth) + vkq * sp.conj();
            v[(k, q)] = vkq.scale(cth) - vkp * sp;
        }
    }

    let _ = (app, aqq);
}

/// Partial trace over the left factor of a `dim_left * dim_right` square
/// matrix: `out[i][j] = sum_k m[(k, i)][(k, j)]` with flat index
/// `(k, i) = k * dim_right + i`.
pub fn partial_trace_left(m: &CMatrix, dim_left: usize, dim_right: usize) -> Result<CMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    if dim_left == 0 || dim_right == 0 || m.rows != dim_left * dim_right {
        return Err(LinalgError::DimensionMismatch {
            context: format!("partial trace of {}x{} with factors {}x{}", m.rows, m.cols, dim_left, dim_right),
        });
    }
    let mut out = CMatrix::zeros(dim_right, dim_right);
    for i in 0..dim_right {
        for j in 0..dim_right {
            let mut s = Complex64::default();
            for k in 0..dim_left {
                s += m[(k * dim_right + i, k * dim_right + j)];
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

/// Row-major vectorization: `vec(V)[j * cols + k] = V[j][k]` as a column.
pub fn vectorize(v: &CMatrix) -> CMatrix {
    CMatrix { rows: v.rows * v.cols, cols: 1, data: v.data.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let raw = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        raw.hermitized()
    }

    /// det(H - x I) for real x via complex Gaussian elimination with partial
    /// pivoting. Real up to rounding for Hermitian H.
    fn char_poly(h: &CMatrix, x: f64) -> f64 {
        let n = h.rows();
        let mut m = h.clone();
        for i in 0..n {
            m[(i, i)] -= c(x, 0.0);
        }
        let mut det = c(1.0, 0.0);
        for col in 0..n {
            let pivot_row = (col..n).max_by(|&a, &b| m[(a, col)].norm().total_cmp(&m[(b, col)].norm())).unwrap();
            if m[(pivot_row, col)].norm() == 0.0 {
                return 0.0;
            }
            if pivot_row != col {
                for j in 0..n {
                    let tmp = m[(col, j)];
                    m[(col, j)] = m[(pivot_row, j)];
                    m[(pivot_row, j)] = tmp;
                }
                det = -det;
            }
            let pivot = m[(col, col)];
            det *= pivot;
            for row in col + 1..n {
                let factor = m[(row, col)] / pivot;
                for j in col..n {
                    let sub = factor * m[(col, j)];
                    m[(row, j)] -= sub;
                }
            }
        }
        det.re
    }

    /// Independent eigenvalue oracle: bracket sign changes of the
    /// characteristic polynomial inside the Gershgorin bound, then bisect.
    fn eigenvalues_by_bisection(h: &CMatrix) -> Vec<f64> {
        let n = h.rows();
        let mut bound = 0.0f64;
        for i in 0..n {
            let mut radius = 0.0;
            for j in 0..n {
                if i != j {
                    radius += h[(i, j)].norm();
                }
            }
            bound = bound.max(h[(i, i)].re.abs() + radius);
        }
        bound += 1.0;
        let samples = 4000;
        let mut roots = Vec::new();
        let mut prev_x = -bound;
        let mut prev_f = char_poly(h, prev_x);
        for k in 1..=samples {
            let x = -bound + 2.0 * bound * (k as f64) / (samples as f64);
            let f = char_poly(h, x);
            if prev_f == 0.0 {
                roots.push(prev_x);
            } else if f != 0.0 && prev_f.signum() != f.signum() {
                let (mut lo, mut hi, mut flo) = (prev_x, x, prev_f);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fmid = char_poly(h, mid);
                    if fmid == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if flo.signum() != fmid.signum() {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fmid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev_x = x;
            prev_f = f;
        }
        roots
    }

    #[test]
    fn pauli_x_eigensystem() {
        let x = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let eig = hermitian_eigen(&x, HERMITICITY_TOL).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
        let s = 1.0 / 2.0f64.sqrt();
        // Minus eigenvector proportional to (1, -1), plus to (1, 1).
        let v0 = (eig.eigenvectors[(0, 0)].norm() - s).abs();
        let v1 = (eig.eigenvectors[(1, 0)] + eig.eigenvectors[(0, 0)]).norm();
        assert!(v0 < 1e-10 && v1 < 1e-10);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.5, 0.0), c(0.0, 0.0)]]);
        match hermitian_eigen(&m, HERMITICITY_TOL) {
            Err(LinalgError::NotHermitian { .. }) => {}
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn eigenvalues_match_characteristic_polynomial_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x11ae);
        for _ in 0..10 {
            let h = random_hermitian(&mut rng, 4);
            let eig = hermitian_eigen(&h, HERMITICITY_TOL).unwrap();
            let mut oracle = eigenvalues_by_bisection(&h);
            oracle.sort_by(f64::total_cmp);
            assert_eq!(oracle.len(), 4, "oracle must bracket all four roots");
            for (a, b) in eig.eigenvalues.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-8, "eigenvalue {a} vs oracle root {b}");
            }
        }
    }

    #[test]
    fn eigen_reconstructs_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for &n in &[1usize, 2, 3, 5, 8, 12, 16] {
            let h = random_hermitian(&mut rng, n);
            let eig = hermitian_eigen(&h, HERMITICITY_TOL).unwrap();
            let v = &eig.eigenvectors;
            let lambda = CMatrix::diagonal(&eig.eigenvalues.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
            let rebuilt = v.mul(&lambda).mul(&v.adjoint());
            let rel = rebuilt.sub(&h).frobenius_norm() / h.frobenius_norm().max(1e-300);
            assert!(rel < EIGEN_RESIDUAL_TOL, "dim {n}: relative residual {rel}");
            let gram_defect = v.adjoint().mul(v).sub(&CMatrix::identity(n)).max_abs();
            assert!(gram_defect < 1e-10, "dim {n}: Gram defect {gram_defect}");
        }
    }

    #[test]
    fn partial_trace_of_identity_kron() {
        let b = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.25, -0.5), c(0.0, 0.0)],
            vec![c(0.25, 0.5), c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 0.0), c(0.0, -1.0), c(0.5, 0.0)],
        ]);
        let m = CMatrix::identity(2).kron(&b);
        let reduced = partial_trace_left(&m, 2, 3).unwrap();
        let expect = b.scaled(c(2.0, 0.0));
        assert!(reduced.sub(&expect).max_abs() < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_factorization() {
        let m = CMatrix::identity(6);
        assert!(partial_trace_left(&m, 4, 2).is_err());
        assert!(partial_trace_left(&CMatrix::zeros(2, 3), 1, 2).is_err());
    }

    #[test]
    fn vectorize_is_row_major() {
        // Identity on dim 2 stacks rows to (1, 0, 0, 1).
        let v = vectorize(&CMatrix::identity(2));
        let expect = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(v.data(), &expect);
        // Clock-and-shift generator on dim 3: rows of W stack in order.
        let w = crate::exclusion::heisenberg_weyl(3, 1, 1);
        let vw = vectorize(&w);
        assert_eq!(vw.rows(), 9);
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(vw.data()[3 * j + k], w[(j, k)]);
            }
        }
    }

    #[test]
    fn single_entry_vectorize() {
        let m = CMatrix::from_rows(&[vec![c(0.3, -0.7)]]);
        let v = vectorize(&m);
        assert_eq!(v.rows(), 1);
        assert_eq!(v.data()[0], c(0.3, -0.7));
    }

    fn arb_hermitian(max_dim: usize) -> impl Strategy<Value = CMatrix> {
        (1..=max_dim)
            .prop_flat_map(|n| {
                proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |vals| {
                    let raw = CMatrix::from_fn(n, n, |i, j| {
                        let (re, im) = vals[i * n + j];
                        c(re, im)
                    });
                    raw.hermitized()
                })
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// lambda_k(A + B) >= lambda_k(A) + lambda_min(B) for Hermitian A, B.
        #[test]
        fn weyl_inequality((a, b) in (2usize..=6).prop_flat_map(|n| (
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n),
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n),
        ).prop_map(move |(va, vb)| {
            let build = |vals: &Vec<(f64, f64)>| CMatrix::from_fn(n, n, |i, j| {
                let (re, im) = vals[i * n + j];
                c(re, im)
            }).hermitized();
            (build(&va), build(&vb))
        }))) {
            let n = a.rows();
            let la = hermitian_eigenvalues(&a, HERMITICITY_TOL).unwrap();
            let lb = hermitian_eigenvalues(&b, HERMITICITY_TOL).unwrap();
            let lab = hermitian_eigenvalues(&a.add(&b), HERMITICITY_TOL).unwrap();
            for k in 0..n {
                prop_assert!(lab[k] >= la[k] + lb[0] - 1e-9);
            }
        }

        #[test]
        fn partial_trace_preserves_trace(h in arb_hermitian(4), right in 1usize..=3) {
            let id = CMatrix::identity(right);
            let m = h.kron(&id);
            let reduced = partial_trace_left(&m, h.rows(), right).unwrap();
            let diff = (reduced.trace() - m.trace()).norm();
            prop_assert!(diff < 1e-10);
        }

        #[test]
        fn vectorize_linear(h in arb_hermitian(4), g in arb_hermitian(4), s in -2.0f64..2.0) {
            if h.rows() == g.rows() {
                let lhs = vectorize(&h.scaled(c(s, 0.0)).add(&g));
                let rhs = vectorize(&h).scaled(c(s, 0.0)).add(&vectorize(&g));
                prop_assert!(lhs.sub(&rhs).max_abs() < 1e-12);
            }
        }

        #[test]
        fn eigen_residual_random(h in arb_hermitian(6)) {
            let eig = hermitian_eigen(&h, HERMITICITY_TOL).unwrap();
            let n = h.rows();
            let scale = h.frobenius_norm().max(1e-300);
            for k in 0..n {
                let vk = CMatrix::from_fn(n, 1, |i, _| eig.eigenvectors[(i, k)]);
                let resid = h.mul(&vk).sub(&vk.scaled(c(eig.eigenvalues[k], 0.0))).frobenius_norm();
                prop_assert!(resid <= EIGEN_RESIDUAL_TOL * scale.max(1.0));
            }
        }
    }
}
