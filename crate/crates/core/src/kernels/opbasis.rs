use nalgebra::DMatrix;

use crate::ensembles::{Support, WeightSpec};
use crate::error::{invalid, Result};
use crate::quadrature::{gauss_jacobi_on, gauss_legendre, jacobi_recurrence, Rule};
use crate::special::ln_gamma;

/// Monic orthogonal polynomials of a classical weight,
/// `p_{k+1} = (x - a_k) p_k - b_k p_{k-1}`, with `h_k = ⟨p_k, p_k⟩`.
#[derive(Debug, Clone)]
pub struct OPBasis {
    pub weight: WeightSpec,
    /// `a_0 .. a_{d-1}`
    pub a: Vec<f64>,
    /// `b_1 .. b_d` stored at indices 1..=d; `b[0]` is unused (zero).
    pub b: Vec<f64>,
    /// `ln h_0 .. ln h_d`
    pub ln_norms: Vec<f64>,
    lo: f64,
    hi: f64,
}

/// Scale σ and exponent of a Laguerre-type weight `x^α e^{-x/σ}`.
fn laguerre_shape(w: &WeightSpec) -> Option<(f64, f64)> {
    match *w {
        WeightSpec::LaguerreBeta1 { a } => Some((2.0, 0.5 * (a - 1.0))),
        WeightSpec::LaguerreBeta2 { a } => Some((1.0, a)),
        _ => None,
    }
}

fn gaussian_c(w: &WeightSpec) -> Option<f64> {
    match w {
        WeightSpec::GaussianBeta1 => Some(0.5),
        WeightSpec::GaussianBeta2 => Some(1.0),
        _ => None,
    }
}

pub fn op_basis(weight: WeightSpec, max_degree: usize) -> Result<OPBasis> {
    weight.validate()?;
    let d = max_degree;
    let mut a = vec![0.0; d];
    let mut b = vec![0.0; d + 1];
    let ln_h0;
    let (lo, hi);
    if let Some(c) = gaussian_c(&weight) {
        for k in 1..=d {
            b[k] = k as f64 / (2.0 * c);
        }
        ln_h0 = 0.5 * (std::f64::consts::PI / c).ln();
        lo = f64::NEG_INFINITY;
        hi = f64::INFINITY;
    } else if let Some((s, al)) = laguerre_shape(&weight) {
        for k in 0..d {
            a[k] = s * (2.0 * k as f64 + al + 1.0);
        }
        for k in 1..=d {
            b[k] = s * s * k as f64 * (k as f64 + al);
        }
        ln_h0 = (al + 1.0) * s.ln() + ln_gamma(al + 1.0);
        lo = 0.0;
        hi = f64::INFINITY;
    } else {
        let (l, h) = match weight.support() {
            Support::Interval(l, h) if l.is_finite() && h.is_finite() => (l, h),
            _ => return invalid(format!("no classical recurrence for {weight:?}")),
        };
        let p = weight.parts();
        // t ∈ (-1, 1), weight (1-t)^right (1+t)^left
        let (at, bt) = jacobi_recurrence(d + 1, p.right, p.left);
        let half = 0.5 * (h - l);
        for k in 0..d {
            a[k] = l + half * (at[k] + 1.0);
        }
        for k in 1..=d {
            b[k] = half * half * bt[k];
        }
        ln_h0 = bt[0].ln() + (1.0 + p.left + p.right) * half.ln();
        lo = l;
        hi = h;
    }
    let mut ln_norms = vec![ln_h0; d + 1];
    for k in 1..=d {
        ln_norms[k] = ln_norms[k - 1] + b[k].ln();
    }
    Ok(OPBasis { weight, a, b, ln_norms, lo, hi })
}

impl OPBasis {
    pub fn max_degree(&self) -> usize {
        self.a.len()
    }

    /// Orthonormal polynomials `p_k / √h_k`, k = 0..count.
    pub fn normalized_polys(&self, x: f64, count: usize, out: &mut [f64]) {
        assert!(count <= self.max_degree() + 1);
        if count == 0 {
            return;
        }
        out[0] = (-0.5 * self.ln_norms[0]).exp();
        if count == 1 {
            return;
        }
        out[1] = (x - self.a[0]) * out[0] / self.b[1].sqrt();
        for k in 1..count - 1 {
            out[k + 1] = ((x - self.a[k]) * out[k] - self.b[k].sqrt() * out[k - 1]) / self.b[k + 1].sqrt();
        }
    }

    /// Values and x-derivatives of the orthonormal polynomials.
    pub fn normalized_polys_with_derivative(&self, x: f64, count: usize, p: &mut [f64], dp: &mut [f64]) {
        self.normalized_polys(x, count, p);
        if count == 0 {
            return;
        }
        dp[0] = 0.0;
        if count == 1 {
            return;
        }
        dp[1] = p[0] / self.b[1].sqrt();
        for k in 1..count - 1 {
            dp[k + 1] = (p[k] + (x - self.a[k]) * dp[k] - self.b[k].sqrt() * dp[k - 1]) / self.b[k + 1].sqrt();
        }
    }

    /// Orthonormal functions `φ_k(x) = √w(x) p_k(x)/√h_k`.
    pub fn orthonormal(&self, x: f64, count: usize, out: &mut [f64]) {
        self.normalized_polys(x, count, out);
        let f = (0.5 * self.weight.ln_evaluate(x)).exp();
        for v in out[..count].iter_mut() {
            *v *= f;
        }
    }

    fn truncation(&self, n: usize) -> (f64, f64) {
        let nf = n as f64;
        if let Some(c) = gaussian_c(&self.weight) {
            let x = (2.0 * nf / c).sqrt() + 9.0 / c.sqrt();
            (-x, x)
        } else if let Some((s, al)) = laguerre_shape(&self.weight) {
            (0.0, s * (4.0 * nf + 2.0 * al.abs() + 100.0))
        } else {
            (self.lo, self.hi)
        }
    }

    fn panel_width(&self) -> f64 {
        if let Some(c) = gaussian_c(&self.weight) {
            0.5 / c.sqrt()
        } else if let Some((s, _)) = laguerre_shape(&self.weight) {
            1.5 * s
        } else {
            f64::INFINITY
        }
    }

    /// Rule with the full weight folded into its weights, on [x0, x1] inside
    /// the (truncated) support. Endpoint powers are treated exactly when the
    /// rule touches the corresponding support endpoint.
    fn weighted_rule(&self, x0: f64, x1: f64, n: usize) -> Rule {
        let mut out = Rule { nodes: Vec::new(), weights: Vec::new() };
        if x1 <= x0 {
            return out;
        }
        let parts = self.weight.parts();
        let panels = ((x1 - x0) / self.panel_width()).ceil().max(1.0) as usize;
        let m = (n + 40).max(32);
        let h = (x1 - x0) / panels as f64;
        for p in 0..panels {
            let a = x0 + h * p as f64;
            let b = if p + 1 == panels { x1 } else { a + h };
            let left = p == 0 && a == self.lo && parts.left != 0.0;
            let right = p + 1 == panels && b == self.hi && parts.right != 0.0;
            let rule = if left || right {
                gauss_jacobi_on(m, a, b, if right { parts.right } else { 0.0 }, if left { parts.left } else { 0.0 })
            } else {
                gauss_legendre(m).mapped(a, b)
            };
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let mut lw = self.weight.ln_smooth(x);
                if parts.left != 0.0 && !left {
                    lw += parts.left * (x - self.lo).ln();
                }
                if parts.right != 0.0 && !right {
                    lw += parts.right * (self.hi - x).ln();
                }
                out.nodes.push(x);
                out.weights.push(w * lw.exp());
            }
        }
        out
    }

    fn gram(&self, rule: &Rule, n: usize) -> DMatrix<f64> {
        let mut g = DMatrix::<f64>::zeros(n, n);
        let mut p = vec![0.0; n];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            self.normalized_polys(x, n, &mut p);
            for j in 0..n {
                let wj = w * p[j];
                for k in 0..=j {
                    g[(j, k)] += wj * p[k];
                }
            }
        }
        for j in 0..n {
            for k in 0..j {
                g[(k, j)] = g[(j, k)];
            }
        }
        g
    }

    fn center(&self, n: usize) -> f64 {
        if gaussian_c(&self.weight).is_some() {
            0.0
        } else if let Some((s, al)) = laguerre_shape(&self.weight) {
            s * (n as f64 + al + 1.0)
        } else {
            0.5 * (self.lo + self.hi)
        }
    }

    /// Weighted rule over the whole (truncated) support, exact for products
    /// of the first `n` polynomials times smooth functions.
    pub fn support_rule(&self, n: usize) -> Rule {
        let (t0, t1) = self.truncation(n);
        let start = if self.lo.is_finite() { self.lo } else { t0 };
        let end = if self.hi.is_finite() { self.hi } else { t1 };
        self.weighted_rule(start, end, n)
    }

    /// `∫_{lo}^{x} φ_j φ_k`, j, k < n. Points beyond the centre use the
    /// complement so every quadrature touches at most one support endpoint.
    fn cumulative(&self, x: f64, n: usize) -> DMatrix<f64> {
        let (t0, t1) = self.truncation(n);
        if x <= self.lo {
            return DMatrix::zeros(n, n);
        }
        if x >= self.hi {
            return DMatrix::identity(n, n);
        }
        if x <= self.center(n) {
            let start = if self.lo.is_finite() { self.lo } else { t0 };
            if x <= start {
                return DMatrix::zeros(n, n);
            }
            self.gram(&self.weighted_rule(start, x, n), n)
        } else {
            let end = if self.hi.is_finite() { self.hi } else { t1 };
            if x >= end {
                return DMatrix::identity(n, n);
            }
            DMatrix::identity(n, n) - self.gram(&self.weighted_rule(x, end, n), n)
        }
    }

    /// Overlap matrix `[∫_J φ_j φ_k]_{j,k<n}` for `J = (x0, x1)`.
    pub fn overlap(&self, n: usize, x0: f64, x1: f64) -> Result<DMatrix<f64>> {
        if n > self.max_degree() + 1 {
            return invalid(format!("basis holds degree {} but {n} functions requested", self.max_degree()));
        }
        if x0.is_nan() || x1.is_nan() {
            return invalid("interval endpoint is NaN");
        }
        if x1 <= x0 {
            return Ok(DMatrix::zeros(n, n));
        }
        Ok(self.cumulative(x1, n) - self.cumulative(x0, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_orthonormal(w: WeightSpec) {
        let b = op_basis(w, 13).unwrap();
        let g = b.overlap(13, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert_eq!(g, DMatrix::identity(13, 13));
        // direct quadrature across the whole support without the complement trick
        let (t0, t1) = b.truncation(13);
        let lo = if b.lo.is_finite() { b.lo } else { t0 };
        let hi = if b.hi.is_finite() { b.hi } else { t1 };
        let g = b.gram(&b.weighted_rule(lo, hi, 13), 13);
        let err = (g - DMatrix::<f64>::identity(13, 13)).abs().max();
        assert!(err < 1e-10, "{w:?}: {err}");
    }

    #[test]
    fn orthonormal_under_quadrature() {
        check_orthonormal(WeightSpec::GaussianBeta2);
        check_orthonormal(WeightSpec::GaussianBeta1);
        check_orthonormal(WeightSpec::LaguerreBeta2 { a: 0.0 });
        check_orthonormal(WeightSpec::LaguerreBeta2 { a: 2.5 });
        check_orthonormal(WeightSpec::LaguerreBeta1 { a: 1.0 });
        check_orthonormal(WeightSpec::JacobiBeta2 { a: 0.0, b: 0.0 });
        check_orthonormal(WeightSpec::JacobiBeta2 { a: -0.5, b: 1.5 });
        check_orthonormal(WeightSpec::JacobiUnit { a: -0.5, b: 0.5 });
    }

    #[test]
    fn hermite_symmetric_and_laguerre_norm() {
        let b = op_basis(WeightSpec::GaussianBeta2, 8).unwrap();
        assert!(b.a.iter().all(|&a| a == 0.0));
        let l = op_basis(WeightSpec::LaguerreBeta2 { a: 0.0 }, 4).unwrap();
        assert!(l.ln_norms[0].abs() < 1e-15);
    }

    #[test]
    fn partial_overlap_splits_consistently() {
        let b = op_basis(WeightSpec::JacobiUnit { a: 0.5, b: -0.5 }, 6).unwrap();
        let left = b.overlap(6, 0.0, 0.3).unwrap();
        let mid = b.overlap(6, 0.3, 0.8).unwrap();
        let right = b.overlap(6, 0.8, 1.0).unwrap();
        let err = (left + mid + right - DMatrix::<f64>::identity(6, 6)).abs().max();
        assert!(err < 1e-13, "{err}");
        let g = op_basis(WeightSpec::GaussianBeta2, 5).unwrap();
        let s = g.overlap(5, -1.0, 0.5).unwrap() + g.overlap(5, 0.5, 2.0).unwrap();
        let t = g.overlap(5, -1.0, 2.0).unwrap();
        assert!((s - t).abs().max() < 1e-14);
    }

    #[test]
    fn overlap_matches_adaptive_integral() {
        let b = op_basis(WeightSpec::LaguerreBeta2 { a: 0.5 }, 4).unwrap();
        let g = b.overlap(4, 1.0, 3.0).unwrap();
        let f = |x: f64| {
            let mut v = [0.0; 4];
            b.orthonormal(x, 4, &mut v);
            v[1] * v[3]
        };
        let r = crate::quadrature::adaptive(f, 1.0, 3.0, 1e-14).unwrap();
        assert!((g[(1, 3)] - r).abs() < 1e-13);
    }
}
