//! Gauss rules and a small adaptive integrator.

use nalgebra::{DMatrix, SymmetricEigen};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Nodes and weights of a quadrature rule.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Affine image of a rule on [-1, 1] onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        Rule {
            nodes: self.nodes.iter().map(|t| c + h * t).collect(),
            weights: self.weights.iter().map(|w| h * w).collect(),
        }
    }

    pub fn extend(&mut self, other: Rule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }
}

fn legendre_cache() -> &'static Mutex<HashMap<usize, Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// n-point Gauss–Legendre rule on [-1, 1] (cached).
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    assert!(n >= 1);
    if let Some(r) = legendre_cache().lock().unwrap().get(&n) {
        return r.clone();
    }
    let r = Arc::new(compute_gauss_legendre(n));
    legendre_cache().lock().unwrap().insert(n, r.clone());
    r
}

fn compute_gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pd(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_pd(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Monic three-term recurrence of the Jacobi weight `(1-x)^α (1+x)^β` on [-1, 1]:
/// `p_{k+1} = (x - a_k) p_k - b_k p_{k-1}`. Returns `(a_0..a_{n-1}, b_0..b_{n-1})`
/// where `b_0 = ∫ w`.
pub fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let ab = alpha + beta;
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        a[k] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / (s * (s + 2.0))
        };
        b[k] = if k == 0 {
            (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
                - ln_gamma(ab + 2.0)
        } else if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
    }
    if n > 0 {
        b[0] = b[0].exp();
    }
    (a, b)
}

/// Golub–Welsch: Gauss rule from a monic recurrence with `b[0] = ∫ w`.
pub fn golub_welsch(a: &[f64], b: &[f64]) -> Rule {
    let n = a.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        j[(i, i)] = a[i];
        if i + 1 < n {
            let s = b[i + 1].sqrt();
            j[(i, i + 1)] = s;
            j[(i + 1, i)] = s;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], b[0] * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

type JacobiKey = (usize, u64, u64);

fn jacobi_cache() -> &'static Mutex<HashMap<JacobiKey, Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<JacobiKey, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// n-point Gauss–Jacobi rule for `(1-x)^α (1+x)^β` on [-1, 1] (cached).
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Arc<Rule> {
    if alpha == 0.0 && beta == 0.0 {
        return gauss_legendre(n);
    }
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(r) = jacobi_cache().lock().unwrap().get(&key) {
        return r.clone();
    }
    let (a, b) = jacobi_recurrence(n, alpha, beta);
    let r = Arc::new(golub_welsch(&a, &b));
    jacobi_cache().lock().unwrap().insert(key, r.clone());
    r
}

/// Rule for `∫_a^b (b-x)^α (x-a)^β f(x) dx`, weight factors included.
pub fn gauss_jacobi_on(n: usize, a: f64, b: f64, alpha: f64, beta: f64) -> Rule {
    let base = gauss_jacobi(n, alpha, beta);
    let h = 0.5 * (b - a);
    let scale = h.powf(alpha + beta + 1.0);
    Rule {
        nodes: base.nodes.iter().map(|t| a + h * (1.0 + t)).collect(),
        weights: base.weights.iter().map(|w| w * scale).collect(),
    }
}

/// Composite Gauss–Legendre rule with `panels` equal panels of `m` nodes.
pub fn composite_legendre(a: f64, b: f64, panels: usize, m: usize) -> Rule {
    let base = gauss_legendre(m);
    let mut out = Rule {
        nodes: Vec::with_capacity(panels * m),
        weights: Vec::with_capacity(panels * m),
    };
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + h * p as f64;
        out.extend(base.mapped(lo, lo + h));
    }
    out
}

/// Globally adaptive Gauss–Legendre integration on [a, b]: each panel compares
/// a 10- and 20-point estimate and the worst panel is bisected.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let lo_rule = gauss_legendre(10);
    let hi_rule = gauss_legendre(20);
    let est = |x0: f64, x1: f64| {
        let c = lo_rule.mapped(x0, x1).integrate(&f);
        let d = hi_rule.mapped(x0, x1).integrate(&f);
        (d, (d - c).abs())
    };
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = est(a, b);
    panels.push((a, b, v, e));
    for _ in 0..4000 {
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        let total: f64 = panels.iter().map(|p| p.2).sum();
        if total_err <= tol.max(1e-15 * total.abs()) {
            return Ok(total);
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (x0, x1, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (x0 + x1);
        let (v0, e0) = est(x0, mid);
        let (v1, e1) = est(mid, x1);
        panels.push((x0, mid, v0, e0));
        panels.push((mid, x1, v1, e1));
    }
    let total_err: f64 = panels.iter().map(|p| p.3).sum();
    let total: f64 = panels.iter().map(|p| p.2).sum();
    Err(Error::NonConvergence {
        what: "adaptive quadrature".into(),
        last: total,
        previous: total_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        for n in [1usize, 2, 5, 16, 64, 200] {
            let r = gauss_legendre(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 2;
            let v = r.integrate(|x| x.powi(deg as i32));
            assert!((v - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn jacobi_rule_moments() {
        // ∫_{-1}^{1} (1-x)^{1/2} (1+x)^{-1/2} dx = π
        let r = gauss_jacobi(12, 0.5, -0.5);
        let s: f64 = r.weights.iter().sum();
        assert!((s - std::f64::consts::PI).abs() < 1e-13);
        // ∫ (1-x)^{1/2}(1+x)^{-1/2} x dx = -π/2
        let m1 = r.integrate(|x| x);
        assert!((m1 + std::f64::consts::PI / 2.0).abs() < 1e-13);
        // α+β = -1 special case and a generic pair
        let r = gauss_jacobi(20, 1.3, 0.4);
        let exact = (2.7f64 * std::f64::consts::LN_2 + ln_gamma(2.3) + ln_gamma(1.4) - ln_gamma(3.7))
            .exp();
        assert!((r.weights.iter().sum::<f64>() - exact).abs() < 1e-13);
    }

    #[test]
    fn jacobi_on_interval() {
        // ∫_0^2 x^{1/2} dx = 2^{3/2}·2/3
        let r = gauss_jacobi_on(8, 0.0, 2.0, 0.0, 0.5);
        let v = r.integrate(|_| 1.0);
        assert!((v - 2f64.powf(1.5) * 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let v = adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-9 * exact);
    }
}
