use super::opbasis::{op_basis, OPBasis};
use crate::ensembles::WeightSpec;
use crate::error::{invalid, Result};

/// Christoffel–Darboux kernel `K_N(x, y) = Σ_{k<N} φ_k(x) φ_k(y)` of a β=2 weight.
#[derive(Debug, Clone)]
pub struct CdKernel {
    basis: OPBasis,
    n: usize,
}

pub fn cd_kernel(weight: WeightSpec, n: usize) -> Result<CdKernel> {
    if n == 0 {
        return invalid("kernel needs n ≥ 1");
    }
    Ok(CdKernel { basis: op_basis(weight, n)?, n })
}

impl CdKernel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &OPBasis {
        &self.basis
    }

    fn sqrt_weight(&self, x: f64) -> f64 {
        (0.5 * self.basis.weight.ln_evaluate(x)).exp()
    }

    /// Direct summation of the orthonormal functions.
    pub fn eval_sum(&self, x: f64, y: f64) -> f64 {
        let n = self.n;
        let mut px = vec![0.0; n];
        let mut py = vec![0.0; n];
        self.basis.orthonormal(x, n, &mut px);
        self.basis.orthonormal(y, n, &mut py);
        px.iter().zip(&py).map(|(a, b)| a * b).sum()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let n = self.n;
        if (x - y).abs() <= 1e-6 * (1.0 + x.abs() + y.abs()) {
            if x == y {
                return self.density(x);
            }
            return self.eval_sum(x, y);
        }
        let mut px = vec![0.0; n + 1];
        let mut py = vec![0.0; n + 1];
        self.basis.normalized_polys(x, n + 1, &mut px);
        self.basis.normalized_polys(y, n + 1, &mut py);
        let num = px[n] * py[n - 1] - px[n - 1] * py[n];
        self.sqrt_weight(x) * self.sqrt_weight(y) * self.basis.b[n].sqrt() * num / (x - y)
    }

    /// One-point density `ρ_1(x) = K_N(x, x)` from the derivative form.
    pub fn density(&self, x: f64) -> f64 {
        let n = self.n;
        let mut p = vec![0.0; n + 1];
        let mut dp = vec![0.0; n + 1];
        self.basis.normalized_polys_with_derivative(x, n + 1, &mut p, &mut dp);
        let w = self.basis.weight.evaluate(x);
        w * self.basis.b[n].sqrt() * (dp[n] * p[n - 1] - dp[n - 1] * p[n])
    }
}
