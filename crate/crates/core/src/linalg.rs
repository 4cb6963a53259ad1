//! Dense linear-algebra helpers: Haar matrices, eigenvalue wrappers and
//! count polynomials built from eigenvalues of projection-type matrices.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex normal with `E|z|^2 = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(s * normal(rng), s * normal(rng))
}

pub fn real_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| normal(rng))
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar unitary: QR of a complex Ginibre matrix with the phases of `diag R` removed.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = complex_gaussian_matrix(n, n, rng);
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Haar orthogonal matrix in O(n).
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let z = real_gaussian_matrix(n, n, rng);
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Eigenvalues of a real symmetric matrix. Entries below 1e-30 of the largest
/// are flushed to zero first (they move eigenvalues by less than that); the
/// solver otherwise produces NaN on matrices with near-subnormal tails.
pub fn sym_eigenvalues(mut m: DMatrix<f64>) -> Vec<f64> {
    let cut = 1e-30 * m.amax();
    m.apply(|v| {
        if v.abs() < cut {
            *v = 0.0
        }
    });
    SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
}

pub fn herm_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn complex_eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let schur = Schur::try_new(m, 1e-15, 10_000 * n.max(1))
        .ok_or_else(|| Error::Decomposition("complex Schur did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Eigenvalues of a real square matrix (complex in general).
pub fn real_matrix_eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    complex_eigenvalues(m.map(|x| Complex64::new(x, 0.0)))
}

/// Coefficients of `∏_l ((1-λ_l) + t λ_l)` in powers of `t`.
pub fn count_polynomial(lambdas: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &l in lambdas {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k] += ck * (1.0 - l);
            next[k + 1] += ck * l;
        }
        c = next;
    }
    c
}

/// `∏ (1 - z λ_l)`.
pub fn det_from_eigenvalues(lambdas: &[f64], z: Complex64) -> Complex64 {
    lambdas
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &l| acc * (Complex64::new(1.0, 0.0) - z * l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn haar_matrices_are_unitary() {
        let mut rng = seeded(3);
        let u = haar_unitary(5, &mut rng);
        let id = u.adjoint() * &u;
        for i in 0..5 {
            for j in 0..5 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - Complex64::new(e, 0.0)).norm() < 1e-12);
            }
        }
        let o = haar_orthogonal(4, &mut rng);
        let id = o.transpose() * &o;
        assert!((id - DMatrix::<f64>::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn unitary_eigenvalues_on_circle() {
        let mut rng = seeded(11);
        let u = haar_unitary(6, &mut rng);
        for z in complex_eigenvalues(u).unwrap() {
            assert!((z.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn count_polynomial_sums_to_one() {
        let c = count_polynomial(&[0.2, 0.9, 0.5]);
        assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((c[0] - 0.8 * 0.1 * 0.5).abs() < 1e-15);
        assert!((c[3] - 0.2 * 0.9 * 0.5).abs() < 1e-15);
    }
}
