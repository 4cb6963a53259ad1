use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::metropolis::{sample_metropolis, MCConfig};
use super::{orthogonal_group_class, DetSign, EnsembleSpec, Spectrum, WeightSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::{
    complex_eigenvalues, complex_gaussian_matrix, complex_normal, haar_orthogonal, haar_unitary,
    herm_eigenvalues, normal, real_gaussian_matrix, real_matrix_eigenvalues, sym_eigenvalues,
};

const C1: Complex64 = Complex64 { re: 1.0, im: 0.0 };

fn angles_of(eigs: &[Complex64]) -> Vec<f64> {
    eigs.iter().map(|z| z.arg()).collect()
}

/// Collapse a doubly degenerate set of angles to one representative per pair.
fn pair_up_angles(mut a: Vec<f64>) -> Vec<f64> {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let n = a.len();
    let gap = |i: usize, j: usize| {
        let d = (a[j] - a[i]).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    };
    let worst = |shift: usize| (0..n / 2).map(|p| gap((2 * p + shift) % n, (2 * p + 1 + shift) % n)).fold(0.0, f64::max);
    let shift = if worst(0) <= worst(1) { 0 } else { 1 };
    (0..n / 2)
        .map(|p| {
            let i = (2 * p + shift) % n;
            let j = (2 * p + 1 + shift) % n;
            let mean = Complex64::from_polar(1.0, a[i]) + Complex64::from_polar(1.0, a[j]);
            mean.arg()
        })
        .collect()
}

fn pair_up_real(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

/// Eigen-angles of COE (β=1), CUE (β=2) or CSE (β=4) matrices.
pub fn sample_circular<R: Rng + ?Sized>(beta: u32, n: usize, rng: &mut R) -> Result<Spectrum> {
    if n == 0 {
        return invalid("n must be positive");
    }
    match beta {
        2 => Spectrum::circular(angles_of(&complex_eigenvalues(haar_unitary(n, rng))?)),
        1 => {
            let u = haar_unitary(n, rng);
            let s = u.transpose() * &u;
            Spectrum::circular(angles_of(&complex_eigenvalues(s)?))
        }
        4 => {
            let u = haar_unitary(2 * n, rng);
            let mut j = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
            for k in 0..n {
                j[(2 * k, 2 * k + 1)] = C1;
                j[(2 * k + 1, 2 * k)] = -C1;
            }
            let dual = &j * u.transpose() * j.transpose();
            let s = dual * &u;
            let a = angles_of(&complex_eigenvalues(s)?);
            Spectrum::circular(pair_up_angles(a))
        }
        _ => invalid(format!("circular ensembles need beta in {{1,2,4}}, got {beta}")),
    }
}

/// Hermitian Gaussian matrix whose eigenvalue density is ∝ ∏ e^{-c x²} |Δ|^β.
fn gaussian_eigenvalues<R: Rng + ?Sized>(beta: u32, n: usize, c: f64, rng: &mut R) -> Result<Vec<f64>> {
    let sd_diag = (0.5 / c).sqrt();
    let sd_off = (0.25 / c).sqrt();
    match beta {
        1 => {
            let mut h = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                h[(i, i)] = sd_diag * normal(rng);
                for j in 0..i {
                    let v = sd_off * normal(rng);
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
            Ok(sym_eigenvalues(h))
        }
        2 => {
            let mut h = DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                h[(i, i)] = Complex64::new(sd_diag * normal(rng), 0.0);
                for j in 0..i {
                    let v = Complex64::new(sd_off * normal(rng), sd_off * normal(rng));
                    h[(i, j)] = v;
                    h[(j, i)] = v.conj();
                }
            }
            Ok(herm_eigenvalues(h))
        }
        4 => {
            let mut h = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
            for i in 0..n {
                let d = Complex64::new(sd_diag * normal(rng), 0.0);
                h[(2 * i, 2 * i)] = d;
                h[(2 * i + 1, 2 * i + 1)] = d;
                for j in 0..i {
                    let a = Complex64::new(sd_off * normal(rng), sd_off * normal(rng));
                    let b = Complex64::new(sd_off * normal(rng), sd_off * normal(rng));
                    let blk = [[a, b], [-b.conj(), a.conj()]];
                    for r in 0..2 {
                        for s in 0..2 {
                            h[(2 * i + r, 2 * j + s)] = blk[r][s];
                            h[(2 * j + s, 2 * i + r)] = blk[r][s].conj();
                        }
                    }
                }
            }
            Ok(pair_up_real(herm_eigenvalues(h)))
        }
        _ => invalid(format!("Gaussian matrix model needs beta in {{1,2,4}}, got {beta}")),
    }
}

/// Eigenvalues of `X^† X` for an `rows × cols` Gaussian `X` (real for β=1,
/// complex for β=2). Densities: ∏ x^{(rows-cols-1)/2} e^{-x/2} |Δ| (real),
/// ∏ x^{rows-cols} e^{-x} Δ² (complex).
pub fn wishart_eigenvalues<R: Rng + ?Sized>(beta: u32, rows: usize, cols: usize, rng: &mut R) -> Result<Vec<f64>> {
    if rows < cols {
        return invalid("Wishart needs rows >= cols");
    }
    match beta {
        1 => {
            let x = real_gaussian_matrix(rows, cols, rng);
            Ok(sym_eigenvalues(x.transpose() * x))
        }
        2 => {
            let x = complex_gaussian_matrix(rows, cols, rng);
            Ok(herm_eigenvalues(x.adjoint() * x))
        }
        _ => invalid("Wishart model needs beta in {1,2}"),
    }
}

/// Eigenvalues λ ∈ (0,1) of `(A+B)^{-1} A` with independent Wishart `A`
/// (`n1` rows) and `B` (`n2` rows): density λ^p (1-λ)^q |Δ|^β with
/// (p, q) = ((n1-N-1)/2, (n2-N-1)/2) for β=1 and (n1-N, n2-N) for β=2.
pub fn manova_eigenvalues<R: Rng + ?Sized>(beta: u32, n: usize, n1: usize, n2: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n1 < n || n2 < n {
        return invalid("MANOVA needs n1, n2 >= N");
    }
    match beta {
        1 => {
            let x = real_gaussian_matrix(n1, n, rng);
            let y = real_gaussian_matrix(n2, n, rng);
            let a = x.transpose() * x;
            let c = &a + y.transpose() * y;
            let l = c
                .cholesky()
                .ok_or_else(|| Error::Decomposition("Cholesky of A+B".into()))?
                .l();
            let li = l
                .try_inverse()
                .ok_or_else(|| Error::Decomposition("triangular inverse".into()))?;
            let m = &li * a * li.transpose();
            Ok(sym_eigenvalues(0.5 * (&m + m.transpose())))
        }
        2 => {
            let x = complex_gaussian_matrix(n1, n, rng);
            let y = complex_gaussian_matrix(n2, n, rng);
            let a = x.adjoint() * x;
            let c = &a + y.adjoint() * y;
            let l = c
                .cholesky()
                .ok_or_else(|| Error::Decomposition("Cholesky of A+B".into()))?
                .l();
            let li = l
                .try_inverse()
                .ok_or_else(|| Error::Decomposition("triangular inverse".into()))?;
            let m = &li * a * li.adjoint();
            Ok(herm_eigenvalues((&m + m.adjoint()).map(|z| z * 0.5)))
        }
        _ => invalid("MANOVA model needs beta in {1,2}"),
    }
}

/// Non-negative integer `k` with `x == k`, if any.
fn as_count(x: f64) -> Option<usize> {
    if x >= 0.0 && x.fract() == 0.0 && x < 1e6 {
        Some(x as usize)
    } else {
        None
    }
}

/// Eigenvalues with density ∏ w(x)|Δ|^β for the spec, via a matrix model when
/// one exists and the Metropolis sampler otherwise.
pub fn sample_hermitian<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<Spectrum> {
    spec.weight.validate()?;
    let n = spec.n_points;
    if n == 0 {
        return invalid("n_points must be positive");
    }
    let beta_int = if spec.beta == 1.0 {
        Some(1)
    } else if spec.beta == 2.0 {
        Some(2)
    } else if spec.beta == 4.0 {
        Some(4)
    } else {
        None
    };
    use WeightSpec::*;
    if let Some(b) = beta_int {
        match spec.weight {
            GaussianBeta1 => return Spectrum::real(gaussian_eigenvalues(b, n, 0.5, rng)?),
            GaussianBeta2 => return Spectrum::real(gaussian_eigenvalues(b, n, 1.0, rng)?),
            Circular => return sample_circular(b, n, rng),
            _ => {}
        }
    }
    match (beta_int, spec.weight) {
        (Some(1), LaguerreBeta1 { a }) if as_count(a).is_some() => {
            return Spectrum::real(wishart_eigenvalues(1, n + as_count(a).unwrap(), n, rng)?)
        }
        (Some(2), LaguerreBeta2 { a }) if as_count(a).is_some() => {
            return Spectrum::real(wishart_eigenvalues(2, n + as_count(a).unwrap(), n, rng)?)
        }
        (Some(1), JacobiBeta1 { a, b }) if as_count(a).is_some() && as_count(b).is_some() => {
            let l = manova_eigenvalues(1, n, n + as_count(a).unwrap(), n + as_count(b).unwrap(), rng)?;
            return Spectrum::real(l.into_iter().map(|x| 2.0 * x - 1.0).collect());
        }
        (Some(2), JacobiBeta2 { a, b }) if as_count(a).is_some() && as_count(b).is_some() => {
            let l = manova_eigenvalues(2, n, n + as_count(a).unwrap(), n + as_count(b).unwrap(), rng)?;
            return Spectrum::real(l.into_iter().map(|x| 2.0 * x - 1.0).collect());
        }
        (Some(2), JacobiUnit { a, b }) if as_count(a).is_some() && as_count(b).is_some() => {
            let l = manova_eigenvalues(2, n, n + as_count(a).unwrap(), n + as_count(b).unwrap(), rng)?;
            return Spectrum::real(l);
        }
        (Some(b), CauchyBeta1 { .. } | CauchyBeta2 { .. }) => {
            let c = spec.weight.cauchy_exponent().unwrap();
            let bf = b as f64;
            let plain = bf * (n as f64 - 1.0) / 2.0 + 1.0;
            if (c - plain).abs() < 1e-12 {
                let s = sample_circular(b, n, rng)?;
                return Spectrum::real(s.values().iter().map(|t| (0.5 * t).tan()).collect());
            }
            if (c - plain - 0.5 * bf).abs() < 1e-12 {
                return palm_cauchy(b, n, rng);
            }
        }
        _ => {}
    }
    let cfg = MCConfig::for_points(n, rng.random());
    let mut chain = sample_metropolis(spec.beta, spec.weight, n, cfg)?;
    chain.next().ok_or_else(|| Error::Decomposition("Metropolis chain produced no sample".into()))
}

/// Stereographic image of the circular ensemble of size n+1 seen from one of
/// its own points, which is rotated to θ = π and removed.
fn palm_cauchy<R: Rng + ?Sized>(beta: u32, n: usize, rng: &mut R) -> Result<Spectrum> {
    let s = sample_circular(beta, n + 1, rng)?;
    let k = rng.random_range(0..n + 1);
    let t0 = s.values()[k];
    let v = s
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, &t)| (0.5 * super::wrap_angle(t - t0 + PI)).tan())
        .collect();
    Spectrum::real(v)
}

/// Free eigen-angles in (0, π) of a Haar element of O^±(n).
pub fn sample_orthogonal_group<R: Rng + ?Sized>(n: usize, sign: DetSign, rng: &mut R) -> Result<Spectrum> {
    if n < 2 {
        return invalid("orthogonal group needs n >= 2");
    }
    let mut q = haar_orthogonal(n, rng);
    let det = q.determinant();
    let want = if sign == DetSign::Plus { 1.0 } else { -1.0 };
    if det * want < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    let (free, _, _) = orthogonal_group_class(n, sign);
    let eigs = real_matrix_eigenvalues(q)?;
    let mut angles: Vec<f64> = eigs.iter().filter(|z| z.im > 1e-9).map(|z| z.arg()).collect();
    if angles.len() != free {
        // near-degenerate ±1 pairs: keep the `free` largest imaginary parts
        let mut by_im: Vec<&Complex64> = eigs.iter().filter(|z| z.im > 0.0).collect();
        by_im.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
        angles = by_im.iter().take(free).map(|z| z.arg()).collect();
        if angles.len() != free {
            return Err(Error::Decomposition("orthogonal eigen-angle count".into()));
        }
    }
    Spectrum::circular(angles)
}

/// Positive eigenvalues of `iA`, `A` real antisymmetric `size × size` with
/// `A_ij ~ N(0, 1/2)`. For size 2m these follow ∏e^{-x²}Δ(x²)²; for size
/// 2m+1, ∏x²e^{-x²}Δ(x²)².
pub fn sample_antisymmetric_gaussian<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Result<Spectrum> {
    if size < 2 {
        return invalid("antisymmetric model needs size >= 2");
    }
    let sd = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = DMatrix::<Complex64>::zeros(size, size);
    for i in 0..size {
        for j in 0..i {
            let v = sd * normal(rng);
            h[(i, j)] = Complex64::new(0.0, v);
            h[(j, i)] = Complex64::new(0.0, -v);
        }
    }
    let mut e = herm_eigenvalues(h);
    e.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Spectrum::real(e.into_iter().take(size / 2).collect())
}

/// Bordered matrix of size 2N+1: the real 2N×2N form of a GUE_N matrix
/// (each entry a+ib replaced by [[a,-b],[b,a]]), a real border of variance `b`
/// and corner entry √(2b)·N(0,1). Returns the 2N+1 eigenvalues of the
/// bordered matrix and the N eigenvalues of the GUE block.
pub fn sample_bordered_gue<R: Rng + ?Sized>(n: usize, b: f64, rng: &mut R) -> Result<(Spectrum, Spectrum)> {
    if n == 0 || !(b > 0.0) {
        return invalid("bordered GUE needs n >= 1, b > 0");
    }
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(FRAC_1_SQRT_2 * normal(rng), 0.0);
        for j in 0..i {
            let v = Complex64::new(0.5 * normal(rng), 0.5 * normal(rng));
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    let y = herm_eigenvalues(h.clone());
    let m = 2 * n + 1;
    let mut big = DMatrix::<f64>::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            big[(2 * i, 2 * j)] = z.re;
            big[(2 * i, 2 * j + 1)] = -z.im;
            big[(2 * i + 1, 2 * j)] = z.im;
            big[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    let sb = b.sqrt();
    for i in 0..2 * n {
        let v = sb * normal(rng);
        big[(i, m - 1)] = v;
        big[(m - 1, i)] = v;
    }
    big[(m - 1, m - 1)] = (2.0 * b).sqrt() * normal(rng);
    // each doubled inner eigenvalue keeps one copy in M
    Ok((Spectrum::real(sym_eigenvalues(big))?, Spectrum::real(y)?))
}

/// Bordered GSE-type matrix: a 4N×4N real form of a GSE_N matrix with a real
/// border of variance `b` and corner √(2b)·N(0,1). The inner eigenvalues
/// survive with multiplicity three; each is returned once, giving 2N+1 values.
pub fn sample_bordered_gse<R: Rng + ?Sized>(n: usize, b: f64, rng: &mut R) -> Result<Spectrum> {
    if n == 0 || !(b > 0.0) {
        return invalid("bordered GSE needs n >= 1, b > 0");
    }
    // quaternion Hermitian as 2N×2N complex, then its 4N×4N real form
    let sd_diag = FRAC_1_SQRT_2;
    let sd_off = 0.5;
    let mut h = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        let d = Complex64::new(sd_diag * normal(rng), 0.0);
        h[(2 * i, 2 * i)] = d;
        h[(2 * i + 1, 2 * i + 1)] = d;
        for j in 0..i {
            let a = Complex64::new(sd_off * normal(rng), sd_off * normal(rng));
            let bq = Complex64::new(sd_off * normal(rng), sd_off * normal(rng));
            let blk = [[a, bq], [-bq.conj(), a.conj()]];
            for r in 0..2 {
                for s in 0..2 {
                    h[(2 * i + r, 2 * j + s)] = blk[r][s];
                    h[(2 * j + s, 2 * i + r)] = blk[r][s].conj();
                }
            }
        }
    }
    let k = 2 * n;
    let m = 2 * k + 1;
    let mut big = DMatrix::<f64>::zeros(m, m);
    for i in 0..k {
        for j in 0..k {
            let z = h[(i, j)];
            big[(2 * i, 2 * j)] = z.re;
            big[(2 * i, 2 * j + 1)] = -z.im;
            big[(2 * i + 1, 2 * j)] = z.im;
            big[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    let sb = b.sqrt();
    for i in 0..2 * k {
        let v = sb * normal(rng);
        big[(i, m - 1)] = v;
        big[(m - 1, i)] = v;
    }
    big[(m - 1, m - 1)] = (2.0 * b).sqrt() * normal(rng);
    let mut xs = sym_eigenvalues(big);
    xs.sort_by(|p, q| q.partial_cmp(p).unwrap());
    // the inner eigenvalues are 4-fold; the bordered ones are simple:
    // pattern x1, y1×3, x2, y2×3, … , x_{N+1}
    let mut out = Vec::with_capacity(2 * n + 1);
    for i in 0..=n {
        out.push(xs[4 * i]);
        if i < n {
            out.push((xs[4 * i + 1] + xs[4 * i + 2] + xs[4 * i + 3]) / 3.0);
        }
    }
    Spectrum::real(out)
}

/// `A = X^† X` (`X` complex `rows × cols`) and `B = A + b·v v^†` with `v` a
/// complex standard Gaussian vector.
pub fn sample_rank_one_wishart_pair<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    b: f64,
    rng: &mut R,
) -> Result<(Spectrum, Spectrum)> {
    if rows < cols || cols == 0 || !(b > 0.0) {
        return invalid("rank-one Wishart needs rows >= cols >= 1, b > 0");
    }
    let x = complex_gaussian_matrix(rows, cols, rng);
    let a = x.adjoint() * x;
    let v = DMatrix::from_fn(cols, 1, |_, _| complex_normal(rng));
    let bm = &a + (&v * v.adjoint()).map(|z| z * b);
    Ok((Spectrum::real(herm_eigenvalues(a))?, Spectrum::real(herm_eigenvalues(bm))?))
}

/// Complex Ginibre eigenvalues scaled by 1/√n (support → unit disk).
pub fn sample_ginibre_scaled<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<Complex64>> {
    if n == 0 {
        return invalid("n must be positive");
    }
    let g = complex_gaussian_matrix(n, n, rng);
    let s = 1.0 / (n as f64).sqrt();
    Ok(complex_eigenvalues(g)?.into_iter().map(|z| z * s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn cse_pairs_are_degenerate() {
        let mut rng = seeded(5);
        let u = haar_unitary(6, &mut rng);
        let mut j = DMatrix::<Complex64>::zeros(6, 6);
        for k in 0..3 {
            j[(2 * k, 2 * k + 1)] = C1;
            j[(2 * k + 1, 2 * k)] = -C1;
        }
        let s = &j * u.transpose() * j.transpose() * &u;
        let mut a = angles_of(&complex_eigenvalues(s).unwrap());
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let paired = pair_up_angles(a.clone());
        assert_eq!(paired.len(), 3);
        for p in paired {
            let close = a.iter().filter(|&&t| (Complex64::from_polar(1.0, t) - Complex64::from_polar(1.0, p)).norm() < 1e-8).count();
            assert_eq!(close, 2);
        }
    }

    #[test]
    fn samplers_shapes() {
        let mut rng = seeded(1);
        assert_eq!(sample_circular(4, 3, &mut rng).unwrap().len(), 3);
        assert_eq!(sample_hermitian(&EnsembleSpec::gse(3), &mut rng).unwrap().len(), 3);
        assert!(sample_orthogonal_group(2, DetSign::Minus, &mut rng).unwrap().is_empty());
        for n in 2..8 {
            for s in [DetSign::Plus, DetSign::Minus] {
                let sp = sample_orthogonal_group(n, s, &mut rng).unwrap();
                assert_eq!(sp.len(), orthogonal_group_class(n, s).0);
                assert!(sp.values().iter().all(|&t| t > 0.0 && t < PI));
            }
        }
        assert_eq!(sample_antisymmetric_gaussian(5, &mut rng).unwrap().len(), 2);
        assert_eq!(sample_ginibre_scaled(4, &mut rng).unwrap().len(), 4);
        assert!(sample_circular(3, 2, &mut rng).is_err());
    }

    #[test]
    fn interlacing_holds() {
        let mut rng = seeded(9);
        for _ in 0..200 {
            let (full, inner) = sample_bordered_gue(3, 0.7, &mut rng).unwrap();
            assert_eq!(full.len(), 7);
            for j in 1..=3 {
                assert!((full.label(2 * j) - inner.label(j)).abs() < 1e-10);
            }
            assert_eq!(sample_bordered_gse(2, 0.5, &mut rng).unwrap().len(), 5);
            let (a, b) = sample_rank_one_wishart_pair(4, 3, 2.0, &mut rng).unwrap();
            for j in 0..3 {
                assert!(b.values()[j] > a.values()[j]);
                if j + 1 < 3 {
                    assert!(a.values()[j] > b.values()[j + 1]);
                }
            }
        }
    }

    #[test]
    fn gue_one_point_variance() {
        let mut rng = seeded(2);
        let m = 20000;
        let mut s2 = 0.0;
        for _ in 0..m {
            let x = sample_hermitian(&EnsembleSpec::gue(1), &mut rng).unwrap().values()[0];
            s2 += x * x;
        }
        let v = s2 / m as f64;
        // e^{-x²}/√π has variance 1/2
        assert!((v - 0.5).abs() < 4.0 * 0.5 * (2.0f64 / m as f64).sqrt());
    }

    #[test]
    fn lue_one_point_is_exponential() {
        let mut rng = seeded(4);
        let m = 20000;
        let mean: f64 = (0..m)
            .map(|_| sample_hermitian(&EnsembleSpec::lue(1, 0.0), &mut rng).unwrap().values()[0])
            .sum::<f64>()
            / m as f64;
        assert!((mean - 1.0).abs() < 4.0 / (m as f64).sqrt());
    }
}
