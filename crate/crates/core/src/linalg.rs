//! Dense complex linear-algebra kernels.
//!
//! Matrices are `nalgebra::DMatrix` values, which store entries in
//! column-major order. Every transfer-function evaluation and basis
//! construction bottoms out in [`LuFactor`] and [`orthonormalize_columns`].

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
/// Dense complex matrix, column-major.
pub type CMat = DMatrix<C64>;
/// Dense real matrix, column-major.
pub type RMat = DMatrix<f64>;

/// Default relative rank tolerance for pivots and basis truncation.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// LU factorization with partial (row) pivoting, `P A = L U`.
///
/// `L` is unit lower triangular and shares storage with `U`. Row `i` of
/// `P A` is row `perm[i]` of `A`.
#[derive(Clone, Debug)]
pub struct LuFactor<T: ComplexField<RealField = f64> + Copy> {
    lu: DMatrix<T>,
    perm: Vec<usize>,
}

impl<T: ComplexField<RealField = f64> + Copy> LuFactor<T> {
    /// Factors `a`, failing with `SingularMatrix` when a pivot falls below
    /// `rank_tol` times the largest entry modulus of `a`.
    pub fn new(a: &DMatrix<T>, rank_tol: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                n,
                a.ncols()
            )));
        }
        let amax = a.iter().fold(0.0_f64, |acc, z| acc.max(z.modulus()));
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        if n > 0 && (amax == 0.0 || !amax.is_finite()) {
            return Err(Error::SingularMatrix { pivot: 0, ratio: 0.0 });
        }
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].modulus();
            for i in (k + 1)..n {
                let v = lu[(i, k)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= rank_tol * amax {
                return Err(Error::SingularMatrix {
                    pivot: k,
                    ratio: best / amax,
                });
            }
            if p != k {
                lu.swap_rows(k, p);
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let l = lu[(i, k)] / pivot;
                lu[(i, k)] = l;
            }
            for j in (k + 1)..n {
                let ukj = lu[(k, j)];
                if ukj == T::zero() {
                    continue;
                }
                for i in (k + 1)..n {
                    let l = lu[(i, k)];
                    if l != T::zero() {
                        lu[(i, j)] -= l * ukj;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    /// Solves `A X = rhs`.
    pub fn solve(&self, rhs: &DMatrix<T>) -> DMatrix<T> {
        let n = self.dim();
        assert_eq!(rhs.nrows(), n, "rhs row count must match the factored matrix");
        let mut x = DMatrix::<T>::zeros(n, rhs.ncols());
        for c in 0..rhs.ncols() {
            for i in 0..n {
                x[(i, c)] = rhs[(self.perm[i], c)];
            }
            // L y = P b
            for k in 0..n {
                let yk = x[(k, c)];
                if yk == T::zero() {
                    continue;
                }
                for i in (k + 1)..n {
                    let l = self.lu[(i, k)];
                    x[(i, c)] -= l * yk;
                }
            }
            // U x = y
            for k in (0..n).rev() {
                let xk = x[(k, c)] / self.lu[(k, k)];
                x[(k, c)] = xk;
                if xk == T::zero() {
                    continue;
                }
                for i in 0..k {
                    let u = self.lu[(i, k)];
                    x[(i, c)] -= u * xk;
                }
            }
        }
        x
    }

    /// Solves `A^H X = rhs` with the same factorization.
    pub fn solve_adjoint(&self, rhs: &DMatrix<T>) -> DMatrix<T> {
        let n = self.dim();
        assert_eq!(rhs.nrows(), n, "rhs row count must match the factored matrix");
        let mut x = DMatrix::<T>::zeros(n, rhs.ncols());
        let mut w = vec![T::zero(); n];
        for c in 0..rhs.ncols() {
            // U^H y = b (forward)
            for i in 0..n {
                let mut s = rhs[(i, c)];
                for k in 0..i {
                    s -= self.lu[(k, i)].conjugate() * w[k];
                }
                w[i] = s / self.lu[(i, i)].conjugate();
            }
            // L^H z = y (backward, unit diagonal)
            for i in (0..n).rev() {
                let mut s = w[i];
                for k in (i + 1)..n {
                    s -= self.lu[(k, i)].conjugate() * w[k];
                }
                w[i] = s;
            }
            for i in 0..n {
                x[(self.perm[i], c)] = w[i];
            }
        }
        x
    }
}

/// Solves `A X = RHS` with the default rank tolerance.
pub fn solve_dense(a: &CMat, rhs: &CMat) -> Result<CMat> {
    solve_dense_tol(a, rhs, DEFAULT_RANK_TOL)
}

pub fn solve_dense_tol(a: &CMat, rhs: &CMat, rank_tol: f64) -> Result<CMat> {
    if rhs.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "rhs has {} rows, matrix is {}x{}",
            rhs.nrows(),
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(LuFactor::new(a, rank_tol)?.solve(rhs))
}

/// Orthonormal basis of the column space of `m`.
///
/// Columns are processed in order with modified Gram-Schmidt and one
/// reorthogonalization pass. A column whose residual after projection onto
/// the accepted columns is at most `tol * ||m||_F` is dropped.
pub fn orthonormalize_columns(m: &CMat, tol: f64) -> Result<CMat> {
    let n = m.nrows();
    let scale = m.norm();
    if n == 0 || m.ncols() == 0 || scale == 0.0 || !scale.is_finite() {
        return Err(Error::EmptyBasis);
    }
    let mut accepted: Vec<Vec<C64>> = Vec::new();
    for col in m.column_iter() {
        let mut v: Vec<C64> = col.iter().copied().collect();
        for _pass in 0..2 {
            for q in &accepted {
                let h: C64 = q.iter().zip(&v).map(|(qi, vi)| qi.conj() * vi).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= h * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= tol * scale {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        accepted.push(v);
    }
    if accepted.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let r = accepted.len();
    Ok(CMat::from_fn(n, r, |i, j| accepted[j][i]))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.nrows() == 1 || m.ncols() == 1 {
        return m.norm();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |a, &b| a.max(b))
}

/// Promotes a real matrix to complex.
pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

/// True when every imaginary part is exactly zero.
pub fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

/// Concatenates matrices with equal row counts left to right.
pub fn hstack(blocks: &[CMat]) -> CMat {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut c0 = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, c0), (rows, b.ncols())).copy_from(b);
        c0 += b.ncols();
    }
    out
}

/// Stacks matrices with equal column counts top to bottom.
pub fn vstack(blocks: &[CMat]) -> CMat {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((r0, 0), (b.nrows(), cols)).copy_from(b);
        r0 += b.nrows();
    }
    out
}

pub fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
