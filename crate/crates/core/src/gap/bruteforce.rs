use serde::Serialize;
use std::f64::consts::PI;

use crate::ensembles::{wrap_angle, Support, WeightSpec};
use crate::error::{invalid, Result};
use crate::quadrature::{gauss_jacobi_on, gauss_legendre, Rule};

/// Gap probabilities from direct quadrature of the joint density, with the
/// largest change between two node counts as the error estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForce {
    pub coefficients: Vec<f64>,
    pub error: f64,
}

impl BruteForce {
    pub fn genfn(&self, xi: f64) -> f64 {
        let t = 1.0 - xi;
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }
}

struct Setup {
    beta: f64,
    n: usize,
    weight: WeightSpec,
    circle: bool,
    lo: f64,
    hi: f64,
    /// panel boundaries across the support, J endpoints included
    cuts: Vec<f64>,
    ja: f64,
    jb: f64,
    m: usize,
}

impl Setup {
    fn in_j(&self, x: f64) -> bool {
        if self.circle {
            let len = self.jb - self.ja;
            if len >= 2.0 * PI {
                return true;
            }
            let d = (x - self.ja).rem_euclid(2.0 * PI);
            d > 0.0 && d < len
        } else {
            x > self.ja && x < self.jb
        }
    }

    fn pair(&self, x: f64, y: f64) -> f64 {
        let d = if self.circle { (2.0 * (0.5 * (x - y)).sin()).abs() } else { (x - y).abs() };
        d.powf(self.beta)
    }

    /// Nodes for one variable on (lo, upper), weight included.
    fn rule(&self, upper: f64) -> Rule {
        let mut out = Rule { nodes: Vec::new(), weights: Vec::new() };
        let parts = self.weight.parts();
        let mut pts = vec![self.lo];
        pts.extend(self.cuts.iter().copied().filter(|&c| c > self.lo && c < upper));
        pts.push(upper);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let left = !self.circle && a == self.lo && parts.left != 0.0 && self.lo.is_finite();
            let right = !self.circle && b == self.hi && parts.right != 0.0;
            let r = if left || right {
                gauss_jacobi_on(self.m, a, b, if right { parts.right } else { 0.0 }, if left { parts.left } else { 0.0 })
            } else {
                gauss_legendre(self.m).mapped(a, b)
            };
            for (&x, &rw) in r.nodes.iter().zip(&r.weights) {
                let lw = if self.circle {
                    0.0
                } else {
                    let mut v = self.weight.ln_smooth(x);
                    if parts.left != 0.0 && !left {
                        v += parts.left * (x - self.lo).ln();
                    }
                    if parts.right != 0.0 && !right {
                        v += parts.right * (self.hi - x).ln();
                    }
                    v
                };
                out.nodes.push(x);
                out.weights.push(rw * lw.exp());
            }
        }
        out
    }

    fn recurse(&self, xs: &mut Vec<f64>, upper: f64, count: usize, acc: f64, res: &mut [f64]) {
        if xs.len() == self.n {
            res[count] += acc;
            return;
        }
        let r = self.rule(upper);
        for (&x, &w) in r.nodes.iter().zip(&r.weights) {
            let mut v = acc * w;
            for &y in xs.iter() {
                v *= self.pair(x, y);
            }
            if v == 0.0 {
                continue;
            }
            let c = count + self.in_j(x) as usize;
            xs.push(x);
            self.recurse(xs, x, c, v, res);
            xs.pop();
        }
    }

    fn run(&self) -> Vec<f64> {
        let mut res = vec![0.0; self.n + 1];
        let mut xs = Vec::with_capacity(self.n);
        self.recurse(&mut xs, self.hi, 0, 1.0, &mut res);
        let z: f64 = res.iter().sum();
        res.iter().map(|v| v / z).collect()
    }
}

fn build(beta: f64, weight: WeightSpec, n: usize, j: (f64, f64), m: usize) -> Result<Setup> {
    if !(1..=4).contains(&n) {
        return invalid(format!("brute force supports 1 ≤ n ≤ 4, got {n}"));
    }
    if !(beta > 0.0) {
        return invalid(format!("beta = {beta}"));
    }
    weight.validate()?;
    let nf = n as f64;
    let (circle, lo, hi, panels) = match (weight, weight.support()) {
        (_, Support::UnitCircle) => (true, -PI, PI, 8usize),
        (WeightSpec::GaussianBeta1 | WeightSpec::GaussianBeta2, _) => {
            let c = if weight == WeightSpec::GaussianBeta1 { 0.5 } else { 1.0 };
            let x = (2.0 * nf / c).sqrt() + 6.0 / c.sqrt();
            (false, -x, x, ((2.0 * x) / (2.0 / c.sqrt())).ceil() as usize)
        }
        (WeightSpec::LaguerreBeta1 { .. } | WeightSpec::LaguerreBeta2 { .. }, _) => {
            let s = if matches!(weight, WeightSpec::LaguerreBeta1 { .. }) { 2.0 } else { 1.0 };
            let a = weight.parts().left.abs();
            let x = s * (4.0 * nf + 2.0 * a + 40.0);
            (false, 0.0, x, (x / (4.0 * s)).ceil() as usize)
        }
        (WeightSpec::CauchyBeta1 { .. } | WeightSpec::CauchyBeta2 { .. }, _) => {
            return invalid("brute force does not handle Cauchy weights");
        }
        (_, Support::Interval(l, h)) => (false, l, h, 4usize),
    };
    let mut cuts: Vec<f64> = (1..panels).map(|k| lo + (hi - lo) * k as f64 / panels as f64).collect();
    let (ja, jb) = j;
    if jb < ja {
        return invalid("interval endpoints out of order");
    }
    for e in [ja, jb] {
        let e = if circle { wrap_angle(e) } else { e };
        if e > lo && e < hi {
            cuts.push(e);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(Setup { beta, n, weight, circle, lo, hi, cuts, ja, jb, m })
}

/// `E(k; J)`, k = 0..n, for the β-ensemble with the given weight (or the
/// circular ensemble when `weight` is `Circular`, J then an arc (a, b)).
pub fn bruteforce_counts(beta: f64, weight: WeightSpec, n: usize, j: (f64, f64)) -> Result<BruteForce> {
    let coarse = build(beta, weight, n, j, 14)?.run();
    let fine = build(beta, weight, n, j, 20)?.run();
    let error = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(BruteForce { coefficients: fine, error })
}

/// `⟨∏(1 - ξ 𝟙_{x_l ∈ J})⟩` by direct quadrature.
pub fn bruteforce_genfn(beta: f64, weight: WeightSpec, n: usize, j: (f64, f64), xi: f64) -> Result<f64> {
    Ok(bruteforce_counts(beta, weight, n, j)?.genfn(xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::{coe_genfn_poly, cse_genfn_poly, genfn_poly};

    #[test]
    fn one_point_circle() {
        for &phi in &[0.5, 2.0, 4.0] {
            let v = bruteforce_genfn(2.0, WeightSpec::Circular, 1, (0.0, phi), 0.6).unwrap();
            assert!((v - (1.0 - 0.6 * phi / (2.0 * PI))).abs() < 1e-13);
        }
        let v = bruteforce_genfn(1.0, WeightSpec::Circular, 3, (0.2, 1.2), 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn agrees_with_determinantal_route() {
        for (w, j) in [
            (WeightSpec::GaussianBeta2, (-0.5, 0.9)),
            (WeightSpec::LaguerreBeta2 { a: 0.0 }, (0.3, 2.5)),
            (WeightSpec::LaguerreBeta2 { a: 1.0 }, (1.0, 4.0)),
            (WeightSpec::JacobiBeta2 { a: 0.0, b: 0.0 }, (-0.2, 0.6)),
        ] {
            for n in 1..=3 {
                let b = bruteforce_counts(2.0, w, n, j).unwrap();
                let d = genfn_poly(w, n, j).unwrap();
                for k in 0..=n {
                    assert!((b.coefficients[k] - d.prob(k)).abs() < 1e-8, "{w:?} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn circular_beta_one_and_four() {
        for n in 2..=3 {
            let phi = PI / 2.0;
            let b = bruteforce_counts(1.0, WeightSpec::Circular, n, (0.0, phi)).unwrap();
            let p = coe_genfn_poly(n, phi).unwrap();
            for k in 0..=n {
                assert!((b.coefficients[k] - p.prob(k)).abs() < 1e-8, "COE n={n} k={k}");
            }
            let th = 1.1;
            let b = bruteforce_counts(4.0, WeightSpec::Circular, n, (-th, th)).unwrap();
            let p = cse_genfn_poly(n, th).unwrap();
            for k in 0..=n {
                assert!((b.coefficients[k] - p.prob(k)).abs() < 1e-8, "CSE n={n} k={k}");
            }
        }
    }
}
