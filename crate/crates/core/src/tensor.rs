//! Dense complex linear algebra for the small Hilbert spaces used here
//! (up to 27 dimensions in practice, 1024 at most).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(
                "matrix must have at least one row and column".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_vec(r, c, data)
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        let values: Vec<_> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&values)
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        let mut m = Self::zeros(v.len(), w.len());
        for (i, vi) in v.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                m[(i, j)] = vi * wj.conj();
            }
        }
        m
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `|self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `⟨v|self|v⟩`.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        self.mul_vec(v).iter().zip(v).map(|(hv, vi)| vi.conj() * hv).sum()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product, rejecting results larger than the default maximum dimension.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with(a, b, &Tolerances::DEFAULT)
}

pub fn kron_with(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let rows = a.rows.saturating_mul(b.rows);
    let cols = a.cols.saturating_mul(b.cols);
    let largest = rows.max(cols);
    if largest > tol.max_dimension {
        return Err(Error::DimensionTooLarge {
            requested: largest,
            max: tol.max_dimension,
        });
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as matrix columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
    /// Number of Jacobi sweeps performed.
    pub sweeps: usize,
}

impl EigenDecomposition {
    /// `V diag(f(λ)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += v[(i, k)] * fl[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| Complex64::new(l, 0.0))
    }
}

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    hermitian_eig_with(h, &Tolerances::DEFAULT)
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary and then applies the real symmetric Jacobi rotation, so the
/// accumulated transform stays unitary. Pivots below the sweep threshold are
/// skipped.
pub fn hermitian_eig_with(h: &ComplexMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows, h.cols
        )));
    }
    if h.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let deviation = h.hermiticity_deviation();
    if deviation > tol.hermiticity {
        return Err(Error::NotHermitian { deviation });
    }

    let n = h.rows;
    // symmetrized working copy
    let mut a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = tol.jacobi_convergence * scale;

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let mut off = off_norm(&a);
    while off > target {
        if sweeps == tol.jacobi_max_sweeps {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        // threshold: skip pivots that cannot matter at the current off-diagonal level
        let threshold = if sweeps <= 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 || mag < threshold {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase = apq / mag;
                // G = diag(1, conj(phase)) · [[c, s], [-s, c]]
                let g_pp = Complex64::new(c, 0.0);
                let g_pq = Complex64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;
                apply_rotation(&mut a, &mut v, p, q, [g_pp, g_pq, g_qp, g_qq]);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
        off = off_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

/// `A ← G† A G` and `V ← V G` for a rotation `G` acting on indices `p, q`.
fn apply_rotation(
    a: &mut ComplexMatrix,
    v: &mut ComplexMatrix,
    p: usize,
    q: usize,
    [g_pp, g_pq, g_qp, g_qq]: [Complex64; 4],
) {
    let n = a.rows;
    for r in 0..n {
        let x = a[(r, p)];
        let y = a[(r, q)];
        a[(r, p)] = x * g_pp + y * g_qp;
        a[(r, q)] = x * g_pq + y * g_qq;
    }
    for c in 0..n {
        let x = a[(p, c)];
        let y = a[(q, c)];
        a[(p, c)] = g_pp.conj() * x + g_qp.conj() * y;
        a[(q, c)] = g_pq.conj() * x + g_qq.conj() * y;
    }
    for r in 0..n {
        let x = v[(r, p)];
        let y = v[(r, q)];
        v[(r, p)] = x * g_pp + y * g_qp;
        v[(r, q)] = x * g_pq + y * g_qq;
    }
}

/// Trace norm of a Hermitian matrix, `Σ |λ_i|`.
pub fn trace_norm_hermitian(h: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(h)?;
    Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// `exp(i h)` for Hermitian `h`.
pub fn unitary_from_generator(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(eig.reconstruct_with(|l| Complex64::from_polar(1.0, l)))
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    u.adjoint().matmul(u).max_abs_diff(&ComplexMatrix::identity(u.rows))
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    pub fn random_complex(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ComplexMatrix::from_vec(n, n, data).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check_eigen(h: &ComplexMatrix, eig: &EigenDecomposition) {
        let n = h.rows();
        let v = &eig.eigenvectors;
        let vtv = v.adjoint().matmul(v);
        assert!(vtv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let norm = h.frobenius_norm().max(1.0);
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            let col = v.column(k);
            let hv = h.mul_vec(&col);
            let res: f64 = hv
                .iter()
                .zip(&col)
                .map(|(a, b)| (a - b * l).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-9 * norm, "residual {res}");
        }
    }

    #[test]
    fn kron_identities() {
        let i6 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)).unwrap();
        assert_eq!(i6, ComplexMatrix::identity(6));

        let p0 = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::real_diagonal(&[0.0, 1.0]);
        let p01 = kron(&p0, &p1).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == 1 && j == 1 { ONE } else { ZERO };
                assert_eq!(p01[(i, j)], expected);
            }
        }
    }

    #[test]
    fn kron_trace_is_multiplicative() {
        let a = random_complex(3, 1);
        let b = random_complex(3, 2);
        let k = kron(&a, &b).unwrap();
        assert!((k.trace() - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn kron_entry_layout() {
        let a = random_complex(2, 3);
        let b = ComplexMatrix::from_vec(2, 3, (0..6).map(|x| c(x as f64, 1.0)).collect()).unwrap();
        let k = kron(&a, &b).unwrap();
        assert_eq!((k.rows(), k.cols()), (4, 6));
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..2 {
                    for s in 0..3 {
                        assert_eq!(k[(i * 2 + r, j * 3 + s)], a[(i, j)] * b[(r, s)]);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_rejects_oversized() {
        let a = ComplexMatrix::identity(40);
        let err = kron(&a, &a).unwrap_err();
        assert!(matches!(err, Error::DimensionTooLarge { requested: 1600, .. }));
    }

    #[test]
    fn kron_is_associative_on_integers() {
        let int_mat = |seed: i64| {
            ComplexMatrix::from_vec(
                2,
                2,
                (0..4)
                    .map(|k| c(((k * 7 + seed) % 5) as f64, ((k + seed) % 3) as f64))
                    .collect(),
            )
            .unwrap()
        };
        let (a, b, m) = (int_mat(1), int_mat(2), int_mat(3));
        let left = kron(&kron(&a, &b).unwrap(), &m).unwrap();
        let right = kron(&a, &kron(&b, &m).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn eig_diagonal() {
        let h = ComplexMatrix::real_diagonal(&[1.0, 2.0, 3.0]);
        let eig = hermitian_eig(&h).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(eig.eigenvectors, ComplexMatrix::identity(3));
    }

    #[test]
    fn eig_paulis() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let y = ComplexMatrix::from_vec(2, 2, vec![ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]).unwrap();
        for h in [x, y] {
            let eig = hermitian_eig(&h).unwrap();
            assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
            assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
            check_eigen(&h, &eig);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn eig_reports_sweep_exhaustion() {
        let h = random_hermitian(6, 9);
        let tol = Tolerances {
            jacobi_max_sweeps: 1,
            ..Tolerances::DEFAULT
        };
        assert!(matches!(
            hermitian_eig_with(&h, &tol),
            Err(Error::NoConvergence { sweeps: 1, .. })
        ));
    }

    #[test]
    fn eig_degenerate_spectrum() {
        // U diag(1,1,2,2) U† with a dense unitary
        let u = unitary_from_generator(&random_hermitian(4, 5)).unwrap();
        let d = ComplexMatrix::real_diagonal(&[1.0, 1.0, 2.0, 2.0]);
        let h = u.matmul(&d).matmul(&u.adjoint());
        let h = ComplexMatrix::from_vec(4, 4, h.as_slice().to_vec()).unwrap();
        let eig = hermitian_eig_with(
            &h,
            &Tolerances {
                hermiticity: 1e-9,
                ..Tolerances::DEFAULT
            },
        )
        .unwrap();
        for (l, e) in eig.eigenvalues.iter().zip([1.0, 1.0, 2.0, 2.0]) {
            assert!((l - e).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_norm_cases() {
        assert_eq!(trace_norm_hermitian(&ComplexMatrix::zeros(4, 4)).unwrap(), 0.0);
        // Bell |Φ+⟩ partially transposed is the swap operator / 2: spectrum {1/2,1/2,1/2,-1/2}
        let mut pt = ComplexMatrix::zeros(4, 4);
        pt[(0, 0)] = c(0.5, 0.0);
        pt[(3, 3)] = c(0.5, 0.0);
        pt[(1, 2)] = c(0.5, 0.0);
        pt[(2, 1)] = c(0.5, 0.0);
        assert!((trace_norm_hermitian(&pt).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn generator_exponential() {
        let u = unitary_from_generator(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(u, ComplexMatrix::identity(3));

        let h = ComplexMatrix::real_diagonal(&[PI, 0.0, 0.0]);
        let u = unitary_from_generator(&h).unwrap();
        let expected = ComplexMatrix::real_diagonal(&[-1.0, 1.0, 1.0]);
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn generator_inverse_pair() {
        let h = random_hermitian(5, 11);
        let u = unitary_from_generator(&h).unwrap();
        let u_inv = unitary_from_generator(&h.scale(c(-1.0, 0.0))).unwrap();
        assert!(unitarity_deviation(&u) < 1e-9);
        assert!(u.matmul(&u_inv).max_abs_diff(&ComplexMatrix::identity(5)) < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eig_reconstructs_random_hermitian(n in 1usize..=27, seed in any::<u64>()) {
            let h = random_hermitian(n, seed);
            let eig = hermitian_eig(&h).unwrap();
            check_eigen(&h, &eig);
            let rel = eig.reconstruct().max_abs_diff(&h) / h.frobenius_norm().max(1e-300);
            prop_assert!(rel < 1e-9, "relative reconstruction error {}", rel);
        }

        #[test]
        fn trace_norm_bounds_trace(n in 1usize..=12, seed in any::<u64>()) {
            let h = random_hermitian(n, seed);
            let tn = trace_norm_hermitian(&h).unwrap();
            prop_assert!(tn + 1e-12 >= h.trace().re.abs());
            // PSD case: h h† has trace norm equal to its trace
            let psd = h.matmul(&h.adjoint());
            let tn = trace_norm_hermitian(&psd).unwrap();
            prop_assert!((tn - psd.trace().re).abs() < 1e-10 * tn.max(1.0));
        }

        #[test]
        fn generator_is_unitary(n in 1usize..=9, seed in any::<u64>()) {
            let h = random_hermitian(n, seed).scale(c(3.0, 0.0));
            let u = unitary_from_generator(&h).unwrap();
            prop_assert!(unitarity_deviation(&u) < 1e-9);
        }
    }
}
