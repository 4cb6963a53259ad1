use nalgebra::DMatrix;
use num_complex::Complex64;

use super::fredholm::FredholmValue;
use super::opbasis::op_basis;
use crate::ensembles::WeightSpec;
use crate::error::{invalid, Error, Result};
use crate::linalg::{det_from_eigenvalues, sym_eigenvalues};
use crate::special::{bessel_j_int_array, bessel_j_order_derivative};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiscreteKernel {
    /// Discrete Bessel kernel on the non-negative integers.
    Bessel { s: f64 },
    /// `∫_s^∞ ψ_{n1} ψ_{n2}` with Laguerre functions of parameter α.
    Laguerre { alpha: f64, s: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum IndexSet {
    Finite(Vec<usize>),
    /// `{start, start+1, …}`
    From(usize),
}

impl DiscreteKernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DiscreteKernel::Bessel { s } if !(s > 0.0) => invalid(format!("s = {s}")),
            DiscreteKernel::Laguerre { alpha, s } if !(s > 0.0 && alpha > -1.0) => {
                invalid(format!("(α, s) = ({alpha}, {s})"))
            }
            _ => Ok(()),
        }
    }

    /// Kernel restricted to the given indices.
    pub fn matrix(&self, idx: &[usize]) -> Result<DMatrix<f64>> {
        self.validate()?;
        let m = idx.len();
        let top = idx.iter().copied().max().unwrap_or(0);
        let mut out = DMatrix::<f64>::zeros(m, m);
        match *self {
            DiscreteKernel::Bessel { s } => {
                let j = bessel_j_int_array(top + 1, s);
                for (a, &n1) in idx.iter().enumerate() {
                    for (b, &n2) in idx.iter().enumerate() {
                        out[(a, b)] = if n1 == n2 {
                            let d0 = bessel_j_order_derivative(n1, s);
                            let d1 = bessel_j_order_derivative(n1 + 1, s);
                            0.5 * s * (j[n1 + 1] * d0 - j[n1] * d1)
                        } else {
                            s * (j[n1] * j[n2 + 1] - j[n1 + 1] * j[n2]) / (2.0 * (n1 as f64 - n2 as f64))
                        };
                    }
                }
            }
            DiscreteKernel::Laguerre { alpha, s } => {
                let basis = op_basis(WeightSpec::LaguerreBeta2 { a: alpha }, top + 1)?;
                let g = basis.overlap(top + 1, s, f64::INFINITY)?;
                // ψ_n = (-1)^n φ_n since L_n^{(α)} has leading sign (-1)^n
                for (a, &n1) in idx.iter().enumerate() {
                    for (b, &n2) in idx.iter().enumerate() {
                        let sign = if (n1 + n2) % 2 == 0 { 1.0 } else { -1.0 };
                        out[(a, b)] = sign * g[(n1, n2)];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn entry(&self, n1: usize, n2: usize) -> Result<f64> {
        if n1 == n2 {
            Ok(self.matrix(&[n1])?[(0, 0)])
        } else {
            Ok(self.matrix(&[n1, n2])?[(0, 1)])
        }
    }

    fn default_span(&self) -> usize {
        match *self {
            DiscreteKernel::Bessel { s } => (4.0 * s).ceil() as usize + 40,
            DiscreteKernel::Laguerre { s, .. } => (2.0 * s).ceil() as usize + 40,
        }
    }
}

fn det_of(m: DMatrix<f64>, xi: Complex64) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    det_from_eigenvalues(&sym_eigenvalues(m), xi)
}

/// `det[I - ξ K]` over an index set; semi-infinite sets are truncated and the
/// truncation doubled until the value changes by less than 1e-12.
pub fn discrete_fredholm_det(kernel: &DiscreteKernel, set: &IndexSet, xi: Complex64) -> Result<FredholmValue> {
    kernel.validate()?;
    match set {
        IndexSet::Finite(idx) => Ok(FredholmValue {
            value: det_of(kernel.matrix(idx)?, xi),
            achieved_tol: 0.0,
            size: idx.len(),
        }),
        IndexSet::From(start) => {
            let mut span = kernel.default_span();
            let idx: Vec<usize> = (*start..start + span).collect();
            let mut prev = det_of(kernel.matrix(&idx)?, xi);
            for _ in 0..6 {
                span *= 2;
                let idx: Vec<usize> = (*start..start + span).collect();
                let cur = det_of(kernel.matrix(&idx)?, xi);
                let d = (cur - prev).norm();
                if d < 1e-12 * cur.norm().max(1.0) {
                    return Ok(FredholmValue { value: cur, achieved_tol: d, size: span });
                }
                prev = cur;
            }
            Err(Error::NonConvergence { what: "discrete truncation".into(), last: prev.re, previous: f64::NAN })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_diagonal_matches_tail_sum() {
        let s = 1.7;
        let k = DiscreteKernel::Bessel { s };
        let j = bessel_j_int_array(80, s);
        for n in [0usize, 1, 3, 7] {
            let tail: f64 = (n + 1..80).map(|m| j[m] * j[m]).sum();
            assert!((k.entry(n, n).unwrap() - tail).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn laguerre_kernel_properties() {
        let k = DiscreteKernel::Laguerre { alpha: 0.5, s: 1.2 };
        let m = k.matrix(&[0, 1, 2, 3]).unwrap();
        for a in 0..4 {
            assert!(m[(a, a)] >= 0.0 && m[(a, a)] <= 1.0);
            for b in 0..4 {
                assert!((m[(a, b)] - m[(b, a)]).abs() < 1e-15);
            }
        }
        let k = DiscreteKernel::Laguerre { alpha: 0.0, s: 1e-12 };
        assert!((k.entry(2, 2).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn laguerre_sign_follows_classical_polynomials() {
        // ψ_0 ψ_1 for α=0: ψ_0 = e^{-x/2}, ψ_1 = (1-x) e^{-x/2}; ∫_s^∞ (1-x)e^{-x} = -s e^{-s}
        let s = 0.8;
        let k = DiscreteKernel::Laguerre { alpha: 0.0, s };
        assert!((k.entry(0, 1).unwrap() + s * (-s as f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn truncation_is_stable() {
        let k = DiscreteKernel::Bessel { s: 2.0 };
        let v = discrete_fredholm_det(&k, &IndexSet::From(2), Complex64::new(1.0, 0.0)).unwrap();
        assert!(v.achieved_tol < 1e-12);
        let empty = discrete_fredholm_det(&k, &IndexSet::Finite(vec![]), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(empty.value, Complex64::new(1.0, 0.0));
        let zero = discrete_fredholm_det(&k, &IndexSet::From(0), Complex64::new(0.0, 0.0)).unwrap();
        assert!((zero.value - 1.0).norm() < 1e-15);
    }
}
