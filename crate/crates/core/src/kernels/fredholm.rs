use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use super::cd::cd_kernel;
use crate::ensembles::WeightSpec;
use crate::error::{invalid, Error, Result};
use crate::linalg::{det_from_eigenvalues, sym_eigenvalues};
use crate::quadrature::gauss_legendre;
use crate::special::bessel_j;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum KernelId {
    FiniteN { weight: WeightSpec, n: usize },
    /// `sinc(x-y)` with `sinc u = sin(πu)/(πu)`.
    Sine,
    /// `sinc(x-y) + sinc(x+y)`
    SinePlus,
    /// `sinc(x-y) - sinc(x+y)`
    SineMinus,
    Bessel { alpha: f64 },
    DiscreteBessel { s: f64 },
    DiscreteLaguerre { alpha: f64, s: f64 },
}

pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        let v = PI * u;
        1.0 - v * v / 6.0
    } else {
        (PI * u).sin() / (PI * u)
    }
}

/// Continuous Bessel kernel on (0, ∞) with parameter α.
pub fn bessel_kernel(alpha: f64, x: f64, y: f64) -> f64 {
    let (sx, sy) = (x.sqrt(), y.sqrt());
    if (x - y).abs() <= 1e-9 * (x + y) {
        let ja = bessel_j(alpha, sx);
        return 0.25 * (ja * ja - bessel_j(alpha + 1.0, sx) * bessel_j(alpha - 1.0, sx));
    }
    let (jx, jy) = (bessel_j(alpha, sx), bessel_j(alpha, sy));
    // z J'_α(z) = z J_{α-1}(z) - α J_α(z)
    let dx = sx * bessel_j(alpha - 1.0, sx) - alpha * jx;
    let dy = sy * bessel_j(alpha - 1.0, sy) - alpha * jy;
    (jx * dy - dx * jy) / (2.0 * (x - y))
}

/// Nyström discretisation `√w_i K(x_i, x_j) √w_j` on Gauss–Legendre nodes.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    pub kernel_id: KernelId,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub matrix: DMatrix<f64>,
}

impl KernelOperator {
    /// Half-infinite intervals (b = ∞) use `x = a + t/(1-t)`, t ∈ (0, 1).
    pub fn from_fn<F: Fn(f64, f64) -> f64>(kernel_id: KernelId, k: F, a: f64, b: f64, n_nodes: usize) -> Result<KernelOperator> {
        if !(b >= a) || a.is_nan() || !a.is_finite() {
            return invalid(format!("interval ({a}, {b})"));
        }
        let (nodes, weights): (Vec<f64>, Vec<f64>) = if b == a {
            (Vec::new(), Vec::new())
        } else if b.is_infinite() {
            let r = gauss_legendre(n_nodes).mapped(0.0, 1.0);
            r.nodes
                .iter()
                .zip(&r.weights)
                .map(|(&t, &w)| (a + t / (1.0 - t), w / ((1.0 - t) * (1.0 - t))))
                .unzip()
        } else {
            let r = gauss_legendre(n_nodes).mapped(a, b);
            (r.nodes, r.weights)
        };
        let n = nodes.len();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = weights[i].sqrt() * k(nodes[i], nodes[j]) * weights[j].sqrt();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(KernelOperator { kernel_id, nodes, weights, matrix: m })
    }

    pub fn build(kernel_id: KernelId, a: f64, b: f64, n_nodes: usize) -> Result<KernelOperator> {
        match kernel_id.clone() {
            KernelId::Sine => Self::from_fn(kernel_id, |x, y| sinc(x - y), a, b, n_nodes),
            KernelId::SinePlus => Self::from_fn(kernel_id, |x, y| sinc(x - y) + sinc(x + y), a, b, n_nodes),
            KernelId::SineMinus => Self::from_fn(kernel_id, |x, y| sinc(x - y) - sinc(x + y), a, b, n_nodes),
            KernelId::Bessel { alpha } => {
                if !(alpha > -1.0) || a < 0.0 {
                    return invalid("Bessel kernel needs α > -1 on (0, ∞)");
                }
                Self::from_fn(kernel_id, move |x, y| bessel_kernel(alpha, x, y), a, b, n_nodes)
            }
            KernelId::FiniteN { weight, n } => {
                let k = cd_kernel(weight, n)?;
                Self::from_fn(kernel_id, move |x, y| k.eval(x, y), a, b, n_nodes)
            }
            KernelId::DiscreteBessel { .. } | KernelId::DiscreteLaguerre { .. } => {
                invalid("discrete kernels have no Nyström form")
            }
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.nodes.is_empty() {
            return Vec::new();
        }
        sym_eigenvalues(self.matrix.clone())
    }

    pub fn det(&self, z: Complex64) -> Complex64 {
        det_from_eigenvalues(&self.eigenvalues(), z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FredholmValue {
    pub value: Complex64,
    /// Change between the last two refinements.
    pub achieved_tol: f64,
    pub size: usize,
}

pub const NYSTROM_CAP: usize = 512;

/// `det(I - z K_J)` with node doubling from `n_start` until successive values
/// agree to 1e-12 (relative to max(1, |value|)).
pub fn nystrom_fredholm_det(kernel_id: &KernelId, a: f64, b: f64, z: Complex64, n_start: usize) -> Result<FredholmValue> {
    if z == Complex64::new(0.0, 0.0) || a == b {
        return Ok(FredholmValue { value: Complex64::new(1.0, 0.0), achieved_tol: 0.0, size: 0 });
    }
    let mut n = n_start.max(4);
    let mut prev = KernelOperator::build(kernel_id.clone(), a, b, n)?.det(z);
    loop {
        let next_n = 2 * n;
        if next_n > NYSTROM_CAP {
            let last = KernelOperator::build(kernel_id.clone(), a, b, NYSTROM_CAP)?.det(z);
            return Err(Error::NonConvergence { what: "Nyström determinant".into(), last: last.re, previous: prev.re });
        }
        let cur = KernelOperator::build(kernel_id.clone(), a, b, next_n)?.det(z);
        let d = (cur - prev).norm();
        if d < 1e-12 * cur.norm().max(1.0) {
            return Ok(FredholmValue { value: cur, achieved_tol: d, size: next_n });
        }
        prev = cur;
        n = next_n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn trivial_cases() {
        let v = nystrom_fredholm_det(&KernelId::Sine, 0.0, 1.0, c(0.0), 16).unwrap();
        assert_eq!(v.value, c(1.0));
        let v = nystrom_fredholm_det(&KernelId::SinePlus, 0.0, 0.0, c(1.0), 16).unwrap();
        assert_eq!(v.value, c(1.0));
    }

    #[test]
    fn even_odd_split_of_symmetric_interval() {
        for &(s, xi) in &[(1.0, 1.0), (2.4, 0.6), (0.7, 0.3)] {
            let full = nystrom_fredholm_det(&KernelId::Sine, -s / 2.0, s / 2.0, c(xi), 16).unwrap().value;
            let p = nystrom_fredholm_det(&KernelId::SinePlus, 0.0, s / 2.0, c(xi), 16).unwrap().value;
            let m = nystrom_fredholm_det(&KernelId::SineMinus, 0.0, s / 2.0, c(xi), 16).unwrap().value;
            assert!((p * m - full).norm() < 1e-11, "s={s}: {} vs {}", (p * m).re, full.re);
        }
    }

    #[test]
    fn affine_reparametrisation() {
        // sinc kernel on (0, s) versus kernel s·sinc(s(u-v)) on (0, 1)
        let s = 1.7;
        let a = KernelOperator::build(KernelId::Sine, 0.0, s, 40).unwrap().det(c(0.8));
        let b = KernelOperator::from_fn(KernelId::Sine, |u, v| s * sinc(s * (u - v)), 0.0, 1.0, 40)
            .unwrap()
            .det(c(0.8));
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn projection_eigenvalues_in_unit_interval() {
        let op = KernelOperator::build(KernelId::FiniteN { weight: WeightSpec::GaussianBeta2, n: 5 }, -1.0, 2.0, 60).unwrap();
        for l in sym_eigenvalues(op.matrix.clone()) {
            assert!(l > -1e-8 && l < 1.0 + 1e-8, "{l}");
        }
        let op = KernelOperator::build(KernelId::Sine, 0.0, 3.0, 40).unwrap();
        for l in op.eigenvalues() {
            assert!(l > -1e-8 && l < 1.0 + 1e-8);
        }
        assert!((op.matrix.clone() - op.matrix.transpose()).abs().max() < 1e-12);
    }

    #[test]
    fn finite_n_determinant_is_polynomial_of_degree_n() {
        let n = 3;
        let op = KernelOperator::build(KernelId::FiniteN { weight: WeightSpec::GaussianBeta2, n }, -0.5, 1.5, 80).unwrap();
        let xs: Vec<f64> = (0..n + 2).map(|i| i as f64 * 0.4).collect();
        let mut d: Vec<f64> = xs.iter().map(|&x| op.det(c(x)).re).collect();
        // divided differences: order n+1 must vanish
        for order in 1..=n + 1 {
            for i in (order..d.len()).rev() {
                d[i] = (d[i] - d[i - 1]) / (xs[i] - xs[i - order]);
            }
        }
        assert!(d[n + 1].abs() < 1e-9, "{}", d[n + 1]);
        assert!(d[n].abs() > 1e-6);
    }

    #[test]
    fn half_infinite_map() {
        // Bessel kernel trace over (0, ∞) diverges, but over (x0, ∞) it is finite
        // and matches a long finite interval plus negligible tail for a rapidly
        // decaying kernel: use the α=0 Laguerre CD kernel instead.
        let id = KernelId::FiniteN { weight: WeightSpec::LaguerreBeta2 { a: 0.0 }, n: 2 };
        let a = nystrom_fredholm_det(&id, 1.0, f64::INFINITY, c(1.0), 32).unwrap().value;
        let b = nystrom_fredholm_det(&id, 1.0, 60.0, c(1.0), 32).unwrap().value;
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn bessel_kernel_diagonal_limit() {
        for &alpha in &[0.0, 1.0, 2.5] {
            let x = 1.3;
            let d = bessel_kernel(alpha, x, x);
            let o = bessel_kernel(alpha, x, x + 1e-5);
            assert!((d - o).abs() < 1e-5, "{alpha}: {d} vs {o}");
        }
    }
}
