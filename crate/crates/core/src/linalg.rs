//! Thin dense complex linear-algebra helpers shared by the physics modules.

use ndarray::{Array1, Array2, Axis, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::Result;

pub type Matrix = Array2<C64>;
pub type Vector = Array1<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> Matrix {
    Array2::eye(n)
}

pub fn dagger(m: &Matrix) -> Matrix {
    m.t().mapv(|z| z.conj())
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == ZERO {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        block.zip_mut_with(b, |o, &y| *o = x * y);
    }
    out
}

pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    a.dot(b) - b.dot(a)
}

/// `u m u^dagger`
pub fn conjugate(u: &Matrix, m: &Matrix) -> Matrix {
    u.dot(m).dot(&dagger(u))
}

/// Largest elementwise modulus.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `max |m - m^dagger|`
pub fn hermiticity_error(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Induced infinity norm (max absolute row sum).
pub fn inf_norm(m: &Matrix) -> f64 {
    m.axis_iter(Axis(0))
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn trace(m: &Matrix) -> C64 {
    m.diag().sum()
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascend; the columns
/// of the returned matrix are the eigenvectors.
pub fn hermitian_eigen(m: &Matrix) -> Result<(Array1<f64>, Matrix)> {
    // LAPACK only reads one triangle; symmetrize so round-off in the other
    // does not silently leak into the result.
    let sym = (m + &dagger(m)).mapv(|z| z * 0.5);
    // eigh on a row-major complex input decomposes the conjugate matrix;
    // hand it column-major storage.
    let mut col_major = Array2::zeros(sym.raw_dim().f());
    col_major.assign(&sym);
    let (vals, vecs) = col_major.eigh(UPLO::Lower)?;
    Ok((vals, vecs))
}

/// `exp(-i h t)` for Hermitian `h`, via its eigendecomposition.
pub fn unitary_exp(h: &Matrix, t: f64) -> Result<Matrix> {
    let (vals, vecs) = hermitian_eigen(h)?;
    let phases = vals.mapv(|e| C64::from_polar(1.0, -e * t));
    let scaled = &vecs * &phases.insert_axis(Axis(0));
    Ok(scaled.dot(&dagger(&vecs)))
}

/// `<u|v>`
pub fn inner(u: &Vector, v: &Vector) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &Vector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
