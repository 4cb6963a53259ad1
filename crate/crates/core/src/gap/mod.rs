//! Gap-probability generating functions `𝓔(J; ξ) = Σ_k (1-ξ)^k E(k; J)` for
//! determinantal ensembles, the circular β=1, 4 formulas built on the
//! orthogonal groups, brute-force quadrature oracles and Monte Carlo counts.

mod bruteforce;
mod montecarlo;

pub use bruteforce::{bruteforce_counts, bruteforce_genfn, BruteForce};
pub use montecarlo::{mc_gap_counts, CountDistribution};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::ensembles::{orthogonal_group_class, DetSign, WeightSpec};
use crate::error::{invalid, Error, Result};
use crate::kernels::op_basis;
use crate::linalg::{count_polynomial, det_from_eigenvalues, sym_eigenvalues};

const RANGE_SLACK: f64 = 1e-8;
const CLIP: f64 = 1e-10;

/// Gap-probability generating function as the list `E(0;J), E(1;J), …`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenFnPoly {
    pub interval: (f64, f64),
    pub coefficients: Vec<f64>,
}

impl GenFnPoly {
    fn from_raw(interval: (f64, f64), raw: Vec<f64>) -> Result<GenFnPoly> {
        let mut c = raw;
        for v in c.iter_mut() {
            if *v < -CLIP {
                return Err(Error::NegativeProbability(*v));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(GenFnPoly { interval, coefficients: c })
    }

    /// `Σ_k c_k (1-ξ)^k`
    pub fn eval(&self, xi: Complex64) -> Complex64 {
        let t = Complex64::new(1.0, 0.0) - xi;
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    pub fn eval_real(&self, xi: f64) -> f64 {
        self.eval(Complex64::new(xi, 0.0)).re
    }

    pub fn total(&self) -> f64 {
        self.coefficients.iter().sum()
    }

    /// Probability of exactly k points (zero beyond the stored degree).
    pub fn prob(&self, k: usize) -> f64 {
        self.coefficients.get(k).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountStats {
    pub mean: f64,
    pub variance: f64,
    pub interval: (f64, f64),
}

pub fn counting_stats(g: &GenFnPoly) -> CountStats {
    let (mut m1, mut m2) = (0.0, 0.0);
    for (k, &c) in g.coefficients.iter().enumerate() {
        let kf = k as f64;
        m1 += kf * c;
        m2 += kf * kf * c;
    }
    CountStats { mean: m1, variance: (m2 - m1 * m1).max(0.0), interval: g.interval }
}

fn checked_eigenvalues(g: DMatrix<f64>) -> Result<Vec<f64>> {
    let mut l = sym_eigenvalues(g);
    for v in l.iter_mut() {
        if *v < -RANGE_SLACK || *v > 1.0 + RANGE_SLACK {
            return Err(Error::EigenvalueRange(*v));
        }
        *v = v.clamp(0.0, 1.0);
    }
    Ok(l)
}

/// Overlap matrix `[∫_J φ_j φ_k]` of the first n orthonormal functions.
pub fn overlap_matrix(weight: WeightSpec, n: usize, j: (f64, f64)) -> Result<DMatrix<f64>> {
    if n == 0 {
        return invalid("n must be positive");
    }
    let basis = op_basis(weight, n)?;
    basis.overlap(n, j.0, j.1)
}

/// `det[δ_jk - ξ ∫_J φ_j φ_k]_{j,k<n}` for a β=2 ensemble with classical weight.
pub fn genfn_ue(weight: WeightSpec, n: usize, j: (f64, f64), xi: Complex64) -> Result<Complex64> {
    let g = overlap_matrix(weight, n, j)?;
    Ok(det_from_eigenvalues(&checked_eigenvalues(g)?, xi))
}

pub fn genfn_poly(weight: WeightSpec, n: usize, j: (f64, f64)) -> Result<GenFnPoly> {
    let g = overlap_matrix(weight, n, j)?;
    GenFnPoly::from_raw(j, count_polynomial(&checked_eigenvalues(g)?))
}

/// Overlap matrix of `e^{ijθ}/√(2π)`, j < n, on an arc of length φ (real
/// after centring the arc at 0).
pub fn cue_overlap(n: usize, phi: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            phi / (2.0 * PI)
        } else {
            let d = j as f64 - k as f64;
            (0.5 * d * phi).sin() / (PI * d)
        }
    })
}

fn check_arc(phi: f64) -> Result<()> {
    if !(0.0..=2.0 * PI).contains(&phi) {
        return invalid(format!("arc length {phi} outside [0, 2π]"));
    }
    Ok(())
}

pub fn cue_genfn_poly(n: usize, phi: f64) -> Result<GenFnPoly> {
    check_arc(phi)?;
    if n == 0 {
        return invalid("n must be positive");
    }
    GenFnPoly::from_raw((0.0, phi), count_polynomial(&checked_eigenvalues(cue_overlap(n, phi))?))
}

/// CUE_N generating function on an arc of length φ.
pub fn genfn_cue(n: usize, phi: f64, xi: Complex64) -> Result<Complex64> {
    check_arc(phi)?;
    if n == 0 {
        return invalid("n must be positive");
    }
    Ok(det_from_eigenvalues(&checked_eigenvalues(cue_overlap(n, phi))?, xi))
}

fn group_interval(theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return invalid(format!("θ = {theta} outside [0, π]"));
    }
    Ok((0.5 * theta).sin().powi(2))
}

/// Counts of free eigen-angles of Haar O^±(n) in (0, θ). The free angles
/// are a Jacobi ensemble in `x = sin²(θ/2)`.
pub fn orthogonal_group_poly(n: usize, sign: DetSign, theta: f64) -> Result<GenFnPoly> {
    if n < 1 {
        return invalid("group size must be positive");
    }
    let x = group_interval(theta)?;
    let (m, a, b) = orthogonal_group_class(n, sign);
    if m == 0 {
        return Ok(GenFnPoly { interval: (0.0, theta), coefficients: vec![1.0] });
    }
    let mut g = genfn_poly(WeightSpec::JacobiUnit { a, b }, m, (0.0, x))?;
    g.interval = (0.0, theta);
    Ok(g)
}

pub fn genfn_orthogonal_group(n: usize, sign: DetSign, theta: f64, xi: Complex64) -> Result<Complex64> {
    if n < 1 {
        return invalid("group size must be positive");
    }
    let x = group_interval(theta)?;
    let (m, a, b) = orthogonal_group_class(n, sign);
    if m == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    genfn_ue(WeightSpec::JacobiUnit { a, b }, m, (0.0, x), xi)
}

/// Coefficients of `p(t²)` given those of `p(u)`.
fn in_squares(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * p.len().max(1) - 1];
    for (k, &c) in p.iter().enumerate() {
        out[2 * k] = c;
    }
    out
}

/// COE_N counts on an arc of length φ. With `t = 1-ξ` the orthogonal-group
/// functions are polynomials in `t²`, and the COE polynomial is
/// `[t A(t²) + B(t²)] / (1+t)`, the division being exact.
pub fn coe_genfn_poly(n: usize, phi: f64) -> Result<GenFnPoly> {
    check_arc(phi)?;
    if n == 0 {
        return invalid("n must be positive");
    }
    let (s_a, s_b) = if n % 2 == 0 { (DetSign::Plus, DetSign::Minus) } else { (DetSign::Minus, DetSign::Plus) };
    let a = in_squares(&orthogonal_group_poly(n + 1, s_a, 0.5 * phi)?.coefficients);
    let b = in_squares(&orthogonal_group_poly(n + 1, s_b, 0.5 * phi)?.coefficients);
    let len = (a.len() + 1).max(b.len());
    let mut num = vec![0.0; len];
    for (k, &c) in a.iter().enumerate() {
        num[k + 1] += c;
    }
    for (k, &c) in b.iter().enumerate() {
        num[k] += c;
    }
    // synthetic division by (1 + t): q_{k-1} = num_k - q_k, highest degree first
    let deg = num.len() - 1;
    let mut qq = vec![0.0; deg + 1];
    for k in (1..=deg).rev() {
        qq[k - 1] = num[k] - qq[k];
    }
    let remainder = num[0] - qq[0];
    if remainder.abs() > 1e-9 {
        return Err(Error::NonConvergence { what: "COE polynomial division".into(), last: remainder, previous: 0.0 });
    }
    qq.truncate(deg.max(1));
    GenFnPoly::from_raw((0.0, phi), qq)
}

pub fn genfn_coe(n: usize, phi: f64, xi: Complex64) -> Result<Complex64> {
    Ok(coe_genfn_poly(n, phi)?.eval(xi))
}

/// Direct evaluation of the COE formula at complex ξ (no polynomial form).
pub fn genfn_coe_direct(n: usize, phi: f64, xi: Complex64) -> Result<Complex64> {
    check_arc(phi)?;
    let one = Complex64::new(1.0, 0.0);
    let xh = 2.0 * xi - xi * xi;
    let (s_a, s_b) = if n % 2 == 0 { (DetSign::Plus, DetSign::Minus) } else { (DetSign::Minus, DetSign::Plus) };
    let a = genfn_orthogonal_group(n + 1, s_a, 0.5 * phi, xh)?;
    let b = genfn_orthogonal_group(n + 1, s_b, 0.5 * phi, xh)?;
    Ok(((one - xi) * a + b) / (2.0 * one - xi))
}

/// CSE_N counts in the symmetric arc (-θ, θ).
pub fn cse_genfn_poly(n: usize, theta: f64) -> Result<GenFnPoly> {
    if n == 0 {
        return invalid("n must be positive");
    }
    let p = orthogonal_group_poly(2 * n + 1, DetSign::Plus, theta)?;
    let m = orthogonal_group_poly(2 * n + 1, DetSign::Minus, theta)?;
    let len = p.coefficients.len().max(m.coefficients.len());
    let c = (0..len).map(|k| 0.5 * (p.prob(k) + m.prob(k))).collect();
    GenFnPoly::from_raw((-theta, theta), c)
}

pub fn genfn_cse(n: usize, theta: f64, xi: Complex64) -> Result<Complex64> {
    Ok(cse_genfn_poly(n, theta)?.eval(xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::cd_kernel;
    use crate::quadrature::adaptive;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn trivial_values() {
        let w = WeightSpec::GaussianBeta2;
        assert_eq!(genfn_ue(w, 3, (-1.0, 1.0), c(0.0)).unwrap(), c(1.0));
        assert!(genfn_ue(w, 3, (f64::NEG_INFINITY, f64::INFINITY), c(1.0)).unwrap().norm() < 1e-14);
        let g = genfn_poly(w, 4, (1.0, 1.0)).unwrap();
        assert_eq!(g.prob(0), 1.0);
        assert!(g.coefficients[1..].iter().all(|&v| v == 0.0));
        let cue = genfn_cue(1, 2.0, c(0.7)).unwrap();
        assert!((cue.re - (1.0 - 0.7 * 2.0 / (2.0 * PI))).abs() < 1e-15);
        assert_eq!(genfn_orthogonal_group(5, DetSign::Plus, 0.0, c(1.0)).unwrap(), c(1.0));
        assert!(genfn_orthogonal_group(5, DetSign::Plus, PI, c(1.0)).unwrap().norm() < 1e-13);
        assert_eq!(genfn_coe(3, 1.0, c(0.0)).unwrap(), c(1.0));
    }

    #[test]
    fn mean_count_is_density_integral() {
        for (w, j) in [
            (WeightSpec::GaussianBeta2, (-0.4, 1.3)),
            (WeightSpec::LaguerreBeta2 { a: 1.0 }, (0.5, 4.0)),
            (WeightSpec::JacobiBeta2 { a: 0.5, b: 0.0 }, (-1.0, 0.2)),
        ] {
            let g = genfn_poly(w, 5, j).unwrap();
            let k = cd_kernel(w, 5).unwrap();
            let lo = j.0.max(-0.999_999_999_999);
            let want = adaptive(|x| k.density(x), lo, j.1, 1e-13).unwrap();
            let st = counting_stats(&g);
            assert!((st.mean - want).abs() < 1e-9, "{w:?}: {} vs {want}", st.mean);
            assert!((g.total() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn deterministic_count_has_zero_variance() {
        let g = GenFnPoly { interval: (0.0, 1.0), coefficients: vec![0.0, 0.0, 1.0] };
        let s = counting_stats(&g);
        assert_eq!((s.mean, s.variance), (2.0, 0.0));
    }

    #[test]
    fn cue_factorises_over_orthogonal_groups() {
        for n in 2..=6 {
            for &phi in &[PI / 4.0, PI / 2.0, PI] {
                for &xi in &[0.25, 1.0] {
                    let lhs = genfn_cue(n, phi, c(xi)).unwrap();
                    let rhs = genfn_orthogonal_group(n + 1, DetSign::Plus, phi / 2.0, c(xi)).unwrap()
                        * genfn_orthogonal_group(n + 1, DetSign::Minus, phi / 2.0, c(xi)).unwrap();
                    assert!((lhs - rhs).norm() < 1e-15 + 1e-12 * lhs.norm(), "n={n} φ={phi} ξ={xi}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn mirrored_groups_swap_parameters() {
        // O^+(2N+1) in (0, θ) and O^-(2N+1) in (π-θ, π) are mirror images
        for &theta in &[0.4, 1.3, 2.2] {
            let xi = c(0.8);
            let lhs = genfn_orthogonal_group(7, DetSign::Plus, theta, xi).unwrap();
            let x0 = (0.5 * (PI - theta)).sin().powi(2);
            let rhs = genfn_ue(WeightSpec::JacobiUnit { a: -0.5, b: 0.5 }, 3, (x0, 1.0), xi).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn coe_polynomial_matches_direct_formula() {
        for n in 1..=7 {
            for &phi in &[0.3, 2.0, 5.5] {
                let p = coe_genfn_poly(n, phi).unwrap();
                assert!((p.total() - 1.0).abs() < 1e-12);
                assert!(p.coefficients.len() <= n + 1);
                for &xi in &[0.1, 0.6, 1.0, 1.7] {
                    let d = genfn_coe_direct(n, phi, c(xi)).unwrap();
                    assert!((p.eval(c(xi)) - d).norm() < 1e-12, "n={n} φ={phi} ξ={xi}");
                }
            }
        }
    }

    #[test]
    fn one_point_coe_is_uniform() {
        let p = coe_genfn_poly(1, 2.0).unwrap();
        assert!((p.prob(1) - 2.0 / (2.0 * PI)).abs() < 1e-13);
    }

    #[test]
    fn cue_variance_slope() {
        // Var N_J grows like (1/π²) log(Nφ) for CUE
        let phi = 1.0;
        let pts: Vec<(f64, f64)> = [8usize, 16, 32, 64]
            .iter()
            .map(|&n| {
                let s = counting_stats(&cue_genfn_poly(n, phi).unwrap());
                ((n as f64 * phi).ln(), s.variance)
            })
            .collect();
        let slope = regression_slope(&pts);
        let want = 1.0 / (PI * PI);
        assert!((slope - want).abs() < 0.1 * want, "{slope} vs {want}");
    }

    pub(crate) fn regression_slope(p: &[(f64, f64)]) -> f64 {
        let n = p.len() as f64;
        let mx = p.iter().map(|q| q.0).sum::<f64>() / n;
        let my = p.iter().map(|q| q.1).sum::<f64>() / n;
        let sxy: f64 = p.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
        let sxx: f64 = p.iter().map(|q| (q.0 - mx).powi(2)).sum();
        sxy / sxx
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn genfn_equals_polynomial(a in -2.0f64..1.0, len in 0.01f64..3.0, xi in 0.0f64..2.0, n in 1usize..6) {
            let w = WeightSpec::GaussianBeta2;
            let j = (a, a + len);
            let d = genfn_ue(w, n, j, c(xi)).unwrap();
            let p = genfn_poly(w, n, j).unwrap();
            prop_assert!((p.eval(c(xi)) - d).norm() < 1e-10);
            prop_assert!(p.coefficients.iter().all(|&v| v >= 0.0));
            prop_assert!((p.total() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn circular_polynomials_are_distributions(n in 1usize..8, phi in 0.0f64..6.28) {
            for p in [cue_genfn_poly(n, phi).unwrap(), coe_genfn_poly(n, phi).unwrap(), cse_genfn_poly(n, phi / 2.0).unwrap()] {
                prop_assert!((p.total() - 1.0).abs() < 1e-10);
                prop_assert!(p.coefficients.iter().all(|&v| v >= 0.0));
            }
        }
    }
}
