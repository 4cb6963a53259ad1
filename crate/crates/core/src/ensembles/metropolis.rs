use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

use super::{wrap_angle, Spectrum, Support, WeightSpec};
use crate::error::{invalid, Result};
use crate::linalg::normal;
use crate::rng::{seeded, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCConfig {
    pub seed: u64,
    pub n_samples: usize,
    /// Proposals discarded before the first sample.
    pub burn_in: usize,
    /// Proposals between successive samples.
    pub thinning: usize,
    pub proposal_scale: f64,
}

impl MCConfig {
    pub fn for_points(n: usize, seed: u64) -> MCConfig {
        MCConfig {
            seed,
            n_samples: 1,
            burn_in: 10_000 * n,
            thinning: 10 * n,
            proposal_scale: 0.3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return invalid("n_samples must be positive");
        }
        if !(self.proposal_scale > 0.0) {
            return invalid("proposal_scale must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Chart {
    Line,
    Circle,
    /// x = tan(u/2), u ∈ (-π, π); used for heavy-tailed weights.
    HalfAngle,
}

/// Single-site random-walk Metropolis chain on ∏ w(x_l) |Δ(x)|^β.
pub struct MetropolisChain {
    beta: f64,
    weight: WeightSpec,
    chart: Chart,
    u: Vec<f64>,
    x: Vec<f64>,
    single: Vec<f64>,
    rng: SimRng,
    scale: f64,
    cfg: MCConfig,
    produced: usize,
    burned: bool,
    accepted: u64,
    proposed: u64,
    site: usize,
}

pub fn sample_metropolis(beta: f64, weight: WeightSpec, n: usize, cfg: MCConfig) -> Result<MetropolisChain> {
    if !(beta > 0.0) {
        return invalid(format!("beta = {beta}"));
    }
    if n == 0 {
        return invalid("n must be positive");
    }
    weight.validate()?;
    cfg.validate()?;
    let chart = match weight {
        WeightSpec::Circular => Chart::Circle,
        WeightSpec::CauchyBeta1 { .. } | WeightSpec::CauchyBeta2 { .. } => Chart::HalfAngle,
        _ => Chart::Line,
    };
    let nf = n as f64;
    let u: Vec<f64> = (0..n)
        .map(|k| {
            let t = (k as f64 + 0.5) / nf;
            match (chart, weight.support()) {
                (Chart::Line, Support::Interval(lo, hi)) if lo.is_finite() && hi.is_finite() => {
                    lo + (hi - lo) * t
                }
                (Chart::Line, Support::Interval(lo, _)) if lo.is_finite() => lo + 2.0 * (k as f64 + 0.5),
                (Chart::Line, _) => (k as f64 - 0.5 * (nf - 1.0)) * 0.8,
                _ => -PI + 2.0 * PI * t,
            }
        })
        .collect();
    let mut chain = MetropolisChain {
        beta,
        weight,
        chart,
        x: vec![0.0; n],
        single: vec![0.0; n],
        u,
        rng: seeded(cfg.seed),
        scale: cfg.proposal_scale,
        cfg,
        produced: 0,
        burned: false,
        accepted: 0,
        proposed: 0,
        site: 0,
    };
    for i in 0..n {
        chain.x[i] = chain.value(chain.u[i]);
        chain.single[i] = chain.ln_single(chain.u[i]);
    }
    Ok(chain)
}

impl MetropolisChain {
    fn value(&self, u: f64) -> f64 {
        match self.chart {
            Chart::Line => u,
            Chart::Circle => u,
            Chart::HalfAngle => (0.5 * u).tan(),
        }
    }

    fn ln_single(&self, u: f64) -> f64 {
        match self.chart {
            Chart::Line => self.weight.ln_evaluate(u),
            Chart::Circle => 0.0,
            Chart::HalfAngle => {
                let x = (0.5 * u).tan();
                self.weight.ln_evaluate(x) + (0.5 * (1.0 + x * x)).ln()
            }
        }
    }

    fn ln_pair(&self, a: f64, b: f64, xa: f64, xb: f64) -> f64 {
        match self.chart {
            Chart::Circle => (2.0 * (0.5 * (a - b)).sin()).abs().ln(),
            _ => (xa - xb).abs().ln(),
        }
    }

    fn step(&mut self) {
        let n = self.u.len();
        let i = self.site;
        self.site = (self.site + 1) % n;
        let mut up = self.u[i] + self.scale * normal(&mut self.rng);
        if self.chart != Chart::Line {
            up = wrap_angle(up);
        }
        let sp = self.ln_single(up);
        self.proposed += 1;
        if sp == f64::NEG_INFINITY || !sp.is_finite() {
            return;
        }
        let xp = self.value(up);
        let mut delta = sp - self.single[i];
        for j in 0..n {
            if j != i {
                delta += self.beta
                    * (self.ln_pair(up, self.u[j], xp, self.x[j])
                        - self.ln_pair(self.u[i], self.u[j], self.x[i], self.x[j]));
            }
        }
        if delta >= 0.0 || self.rng.random::<f64>().ln() < delta {
            self.u[i] = up;
            self.x[i] = xp;
            self.single[i] = sp;
            self.accepted += 1;
        }
    }

    fn burn(&mut self) {
        let n = self.u.len();
        let window = 50 * n;
        let mut done = 0;
        while done < self.cfg.burn_in {
            let (a0, p0) = (self.accepted, self.proposed);
            let steps = window.min(self.cfg.burn_in - done);
            for _ in 0..steps {
                self.step();
            }
            done += steps;
            let rate = (self.accepted - a0) as f64 / (self.proposed - p0).max(1) as f64;
            if rate > 0.5 {
                self.scale *= 1.25;
            } else if rate < 0.3 {
                self.scale /= 1.25;
            }
        }
        self.accepted = 0;
        self.proposed = 0;
        self.burned = true;
    }

    fn snapshot(&self) -> Result<Spectrum> {
        match self.chart {
            Chart::Circle => Spectrum::circular(self.u.clone()),
            _ => Spectrum::real(self.x.clone()),
        }
    }

    /// Acceptance rate since the end of burn-in.
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.proposed.max(1) as f64
    }

    pub fn tuning_warning(&self) -> Option<String> {
        let r = self.acceptance_rate();
        if self.proposed > 0 && !(0.05..=0.95).contains(&r) {
            Some(format!("Metropolis acceptance rate {r:.3} outside [0.05, 0.95]"))
        } else {
            None
        }
    }

    pub fn proposal_scale(&self) -> f64 {
        self.scale
    }
}

impl Iterator for MetropolisChain {
    type Item = Spectrum;

    fn next(&mut self) -> Option<Spectrum> {
        if self.produced >= self.cfg.n_samples {
            return None;
        }
        if !self.burned {
            self.burn();
        }
        loop {
            for _ in 0..self.cfg.thinning.max(1) {
                self.step();
            }
            if let Ok(s) = self.snapshot() {
                self.produced += 1;
                return Some(s);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_stream() {
        let mut cfg = MCConfig::for_points(3, 99);
        cfg.n_samples = 5;
        let a: Vec<Spectrum> = sample_metropolis(2.0, WeightSpec::GaussianBeta2, 3, cfg).unwrap().collect();
        let b: Vec<Spectrum> = sample_metropolis(2.0, WeightSpec::GaussianBeta2, 3, cfg).unwrap().collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn one_point_gaussian_variance() {
        let mut cfg = MCConfig::for_points(1, 7);
        cfg.n_samples = 40_000;
        cfg.thinning = 5;
        let chain = sample_metropolis(2.0, WeightSpec::GaussianBeta2, 1, cfg).unwrap();
        let xs: Vec<f64> = chain.map(|s| s.values()[0]).collect();
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        let var = xs.iter().map(|x| x * x).sum::<f64>() / m;
        // thinned chain is close to independent; allow for mild correlation
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 0.5).abs() < 0.02, "var {var}");
    }

    #[test]
    fn acceptance_in_range() {
        let mut cfg = MCConfig::for_points(4, 1);
        cfg.n_samples = 100;
        let mut chain = sample_metropolis(1.0, WeightSpec::JacobiBeta2 { a: 0.5, b: 0.0 }, 4, cfg).unwrap();
        for s in chain.by_ref() {
            assert!(s.values().iter().all(|&x| x > -1.0 && x < 1.0));
        }
        assert!(chain.tuning_warning().is_none());
    }
}
