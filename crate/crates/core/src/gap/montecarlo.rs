use serde::Serialize;

use crate::ensembles::Spectrum;
use crate::error::{invalid, Result};
use crate::rng::SimRng;

/// Empirical distribution of the number of points in an interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountDistribution {
    pub freqs: Vec<f64>,
    /// binomial standard errors `√(p(1-p)/n)`
    pub std_errs: Vec<f64>,
    pub n_samples: usize,
}

impl CountDistribution {
    pub fn from_counts(counts: &[usize]) -> Result<CountDistribution> {
        if counts.is_empty() {
            return invalid("no samples");
        }
        let top = *counts.iter().max().unwrap();
        let mut freqs = vec![0.0; top + 1];
        for &c in counts {
            freqs[c] += 1.0;
        }
        let n = counts.len() as f64;
        freqs.iter_mut().for_each(|f| *f /= n);
        let std_errs = freqs.iter().map(|p| (p * (1.0 - p) / n).sqrt()).collect();
        Ok(CountDistribution { freqs, std_errs, n_samples: counts.len() })
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.freqs.get(k).copied().unwrap_or(0.0)
    }

    /// Empirical generating function `Σ_k (1-ξ)^k p_k`.
    pub fn genfn(&self, xi: f64) -> f64 {
        let t = 1.0 - xi;
        self.freqs.iter().rev().fold(0.0, |acc, &p| acc * t + p)
    }
}

/// Count the points of `n_samples` draws lying in J (an arc for circular spectra).
pub fn mc_gap_counts<F>(mut sampler: F, j: (f64, f64), n_samples: usize, rng: &mut SimRng) -> Result<CountDistribution>
where
    F: FnMut(&mut SimRng) -> Result<Spectrum>,
{
    if n_samples == 0 {
        return invalid("n_samples must be positive");
    }
    let mut counts = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        counts.push(sampler(rng)?.count_in(j.0, j.1));
    }
    CountDistribution::from_counts(&counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::sample_circular;
    use crate::gap::cue_genfn_poly;
    use crate::rng::seeded;

    #[test]
    fn frequencies_sum_to_one() {
        let d = CountDistribution::from_counts(&[0, 2, 2, 1]).unwrap();
        assert_eq!(d.freqs, vec![0.25, 0.25, 0.5]);
        assert!((d.genfn(0.0) - 1.0).abs() < 1e-15);
        assert_eq!(d.prob(5), 0.0);
    }

    #[test]
    fn cue_counts_match_exact_distribution() {
        let mut rng = seeded(11);
        let phi = 2.0;
        let d = mc_gap_counts(|r| sample_circular(2, 3, r), (0.0, phi), 20_000, &mut rng).unwrap();
        let p = cue_genfn_poly(3, phi).unwrap();
        for k in 0..=3 {
            let se = d.std_errs[k.min(d.freqs.len() - 1)].max(1e-3);
            assert!((d.prob(k) - p.prob(k)).abs() < 5.0 * se, "k={k}");
        }
    }
}
