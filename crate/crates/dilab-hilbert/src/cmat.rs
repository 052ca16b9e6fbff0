//! Dense complex matrices, row-major, with the small-dimension algebra the
//! rest of the workspace needs: products, Kronecker products, partial
//! traces, and spectral predicates.

use crate::eig::eigh;
use crate::{cr, HilbertError, Result, TOL_SPECTRAL};
use num_complex::Complex64;

/// A dense complex matrix. Entries are stored row-major; the type is
/// value-semantic and all operations are pure.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for CMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for cidx in 0..self.cols.min(8) {
                let z = self[(r, cidx)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::default(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cr(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        CMat {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = CMat::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
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

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dagger(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |r, c| self[(r, c)].conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> CMat {
        self.scale(cr(s))
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = CMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::default() {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Complex64::default(); self.rows];
        for r in 0..self.rows {
            let mut acc = Complex64::default();
            for c in 0..self.cols {
                acc += self[(r, c)] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator (spectral) norm. For Hermitian input this is the largest
    /// |eigenvalue|; in general it is the largest singular value, computed
    /// through the Hermitian eigendecomposition of A^dagger A.
    pub fn op_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let gram = self.dagger().matmul(self);
        let e = eigh(&gram).expect("gram matrix is Hermitian by construction");
        e.eigenvalues
            .last()
            .map(|l| l.max(0.0).sqrt())
            .unwrap_or(0.0)
    }

    /// Hermitian part (A + A^dagger)/2.
    pub fn hermitize(&self) -> CMat {
        self.add(&self.dagger()).scale_re(0.5)
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self[(r1, c1)];
                if a == Complex64::default() {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out[(r1 * other.rows + r2, c1 * other.cols + c2)] = a * other[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    /// Hermitian-residual in operator norm, i.e. ||A - A^dagger||.
    pub fn hermitian_residual(&self) -> f64 {
        self.sub(&self.dagger()).op_norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_residual() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let res = self
            .dagger()
            .matmul(self)
            .sub(&CMat::identity(self.rows))
            .op_norm();
        res <= tol
    }

    /// Positive semidefinite within tolerance; requires Hermitian input.
    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        match eigh(&self.hermitize()) {
            Ok(e) => e.eigenvalues.first().map(|l| *l >= -tol).unwrap_or(true),
            Err(_) => false,
        }
    }

    /// Minimum eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let e = eigh(self)?;
        Ok(*e.eigenvalues.first().expect("nonempty spectrum"))
    }

    /// Maximum eigenvalue of a Hermitian matrix.
    pub fn max_eigenvalue(&self) -> Result<f64> {
        let e = eigh(self)?;
        Ok(*e.eigenvalues.last().expect("nonempty spectrum"))
    }

    /// Partial trace over the factors NOT listed in `keep`, for a square
    /// matrix on the tensor space with the given local dimensions. The kept
    /// factors stay in their original relative order.
    pub fn partial_trace(&self, local_dims: &[usize], keep: &[usize]) -> Result<CMat> {
        let total: usize = local_dims.iter().product();
        if !self.is_square() || self.rows != total {
            return Err(HilbertError::DimMismatch {
                expected: total,
                got: self.rows,
            });
        }
        let n = local_dims.len();
        if keep.iter().any(|&k| k >= n) {
            return Err(HilbertError::Invalid(format!(
                "keep index out of range for {n} factors"
            )));
        }
        let mut keep_sorted: Vec<usize> = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        let traced: Vec<usize> = (0..n).filter(|i| !keep_sorted.contains(i)).collect();
        let dim_keep: usize = keep_sorted.iter().map(|&i| local_dims[i]).product();
        let dim_traced: usize = traced.iter().map(|&i| local_dims[i]).product();

        // Strides of each factor in the full index.
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * local_dims[i + 1];
        }
        let unrank = |mut idx: usize, dims: &[usize]| -> Vec<usize> {
            let mut digits = vec![0usize; dims.len()];
            for i in (0..dims.len()).rev() {
                digits[i] = idx % dims[i];
                idx /= dims[i];
            }
            digits
        };
        let keep_dims: Vec<usize> = keep_sorted.iter().map(|&i| local_dims[i]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&i| local_dims[i]).collect();

        let mut out = CMat::zeros(dim_keep, dim_keep);
        for rk in 0..dim_keep {
            let rk_digits = unrank(rk, &keep_dims);
            for ck in 0..dim_keep {
                let ck_digits = unrank(ck, &keep_dims);
                let mut acc = Complex64::default();
                for t in 0..dim_traced.max(1) {
                    let t_digits = if traced_dims.is_empty() {
                        vec![]
                    } else {
                        unrank(t, &traced_dims)
                    };
                    let mut row = 0usize;
                    let mut col = 0usize;
                    for (pos, &f) in keep_sorted.iter().enumerate() {
                        row += rk_digits[pos] * strides[f];
                        col += ck_digits[pos] * strides[f];
                    }
                    for (pos, &f) in traced.iter().enumerate() {
                        row += t_digits[pos] * strides[f];
                        col += t_digits[pos] * strides[f];
                    }
                    acc += self[(row, col)];
                }
                out[(rk, ck)] = acc;
            }
        }
        Ok(out)
    }
}

/// Kronecker product of a non-empty list of matrices, in listed order.
pub fn tensor_product(ops: &[CMat]) -> Result<CMat> {
    let mut it = ops.iter();
    let first = it.next().ok_or(HilbertError::Invalid(
        "tensor_product of an empty list".into(),
    ))?;
    let mut acc = first.clone();
    for m in it {
        acc = acc.kron(m);
    }
    Ok(acc)
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Approximate equality in Frobenius norm, for tests and validators.
pub fn approx_eq(a: &CMat, b: &CMat, tol: f64) -> bool {
    a.rows() == b.rows() && a.cols() == b.cols() && a.sub(b).norm_fro() <= tol
}

impl CMat {
    /// Convenience: A is a valid +/-1 observable (Hermitian, A^2 = 1).
    pub fn involution_residual(&self) -> f64 {
        let h = self.hermitian_residual();
        let sq = self
            .matmul(self)
            .sub(&CMat::identity(self.rows))
            .op_norm();
        h.max(sq)
    }

    pub fn expect_observable(&self) -> Result<()> {
        let res = self.involution_residual();
        if res > 100.0 * TOL_SPECTRAL {
            return Err(HilbertError::NotInvolutory { residual: res });
        }
        Ok(())
    }
}
