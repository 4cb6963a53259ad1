//! Continuous gap probabilities and CUE averages expressed through discrete
//! determinantal processes: the discrete Laguerre ensemble and the discrete
//! Bessel kernel.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::ensembles::sample_circular;
use crate::error::{invalid, Error, Result};
use crate::formfactor::McEstimate;
use crate::kernels::{discrete_fredholm_det, nystrom_fredholm_det, DiscreteKernel, IndexSet, KernelId};
use crate::rng::seeded;

/// `det[1 - ξ K^d(j, k)]_{j,k<N}` for the discrete Laguerre kernel; equals
/// the LUE_N generating function of (s, ∞).
pub fn dlue_genfn(n: usize, alpha: f64, s: f64, xi: Complex64) -> Result<Complex64> {
    let k = DiscreteKernel::Laguerre { alpha, s };
    Ok(discrete_fredholm_det(&k, &IndexSet::Finite((0..n).collect()), xi)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AverageMethod {
    /// tensor periodic trapezoid rule, N ≤ 4
    Quadrature,
    MonteCarlo { n_samples: usize, seed: u64 },
}

const TRAPEZOID_POINTS: usize = 32;

/// `⟨e^{s Σ cos θ_j}⟩` over CUE_N. The quadrature variant reports zero error.
pub fn cue_exp_cos_average(n: usize, s: f64, method: AverageMethod) -> Result<McEstimate> {
    if !(s >= 0.0) {
        return invalid(format!("s = {s}"));
    }
    if n == 0 {
        return Ok(McEstimate { value: 1.0, std_err: 0.0, n_samples: 0 });
    }
    match method {
        AverageMethod::Quadrature => {
            if n > 4 {
                return invalid("quadrature average limited to N ≤ 4");
            }
            Ok(McEstimate { value: trapezoid_average(n, s), std_err: 0.0, n_samples: 0 })
        }
        AverageMethod::MonteCarlo { n_samples, seed } => {
            if n_samples < 2 {
                return Err(Error::InsufficientSamples(format!("{n_samples}")));
            }
            let mut rng = seeded(seed);
            let mut vals = Vec::with_capacity(n_samples);
            for _ in 0..n_samples {
                let sp = sample_circular(2, n, &mut rng)?;
                vals.push((s * sp.values().iter().map(|t| t.cos()).sum::<f64>()).exp());
            }
            let m = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / m;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
            Ok(McEstimate { value: mean, std_err: (var / m).sqrt(), n_samples })
        }
    }
}

/// The integrand is a trigonometric polynomial times `e^{s cos θ}` in each
/// angle, so the equispaced rule converges geometrically; the normalisation
/// is taken from the same rule at s = 0.
fn trapezoid_average(n: usize, s: f64) -> f64 {
    let m = TRAPEZOID_POINTS;
    let angles: Vec<Complex64> = (0..m).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect();
    let weights: Vec<f64> = angles.iter().map(|z| (s * z.re).exp()).collect();
    let mut idx = vec![0usize; n];
    let (mut num, mut den) = (0.0, 0.0);
    loop {
        let mut vdm = 1.0;
        let mut w = 1.0;
        for a in 0..n {
            w *= weights[idx[a]];
            for b in 0..a {
                vdm *= (angles[idx[a]] - angles[idx[b]]).norm_sqr();
            }
        }
        num += vdm * w;
        den += vdm;
        // odometer
        let mut p = 0;
        loop {
            if p == n {
                return num / den;
            }
            idx[p] += 1;
            if idx[p] < m {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

/// `e^{s²/4} det(1 - ξ K^{dB})` over the indices `{N, N+1, …}`.
pub fn bo_rhs_discrete(n: usize, s: f64, xi: f64) -> Result<f64> {
    if !(s > 0.0) {
        return invalid(format!("s = {s}"));
    }
    let d = discrete_fredholm_det(&DiscreteKernel::Bessel { s }, &IndexSet::From(n), Complex64::new(xi, 0.0))?;
    Ok((0.25 * s * s).exp() * d.value.re)
}

/// `e^{s²/4} det(1 - ξ K^B_{(0, s²)})` with Bessel parameter α = N.
pub fn bo_rhs_continuous(n: usize, s: f64, xi: f64) -> Result<f64> {
    if !(s > 0.0) {
        return invalid(format!("s = {s}"));
    }
    let id = KernelId::Bessel { alpha: n as f64 };
    let d = nystrom_fredholm_det(&id, 0.0, s * s, Complex64::new(xi, 0.0), 16)?;
    Ok((0.25 * s * s).exp() * d.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::WeightSpec;
    use crate::gap::genfn_ue;
    use crate::special::bessel_i0;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn dlue_trivial_limits() {
        assert!((dlue_genfn(3, 0.5, 1.0, c(0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!(dlue_genfn(3, 0.5, 1e-12, c(1.0)).unwrap().norm() < 1e-9);
    }

    #[test]
    fn dlue_matches_laguerre_gap() {
        for n in 1..=6 {
            for &alpha in &[0.0, 0.5, 2.0] {
                for &s in &[0.5, 1.0, 3.0] {
                    for &xi in &[0.5, 1.0] {
                        let a = dlue_genfn(n, alpha, s, c(xi)).unwrap();
                        let b = genfn_ue(WeightSpec::LaguerreBeta2 { a: alpha }, n, (s, f64::INFINITY), c(xi)).unwrap();
                        assert!((a - b).norm() < 1e-10, "n={n} α={alpha} s={s} ξ={xi}");
                    }
                }
            }
        }
    }

    #[test]
    fn one_angle_average_is_i0() {
        for &s in &[0.0, 0.7, 2.0] {
            let v = cue_exp_cos_average(1, s, AverageMethod::Quadrature).unwrap().value;
            assert!((v - bessel_i0(s)).abs() < 1e-14);
        }
        assert_eq!(cue_exp_cos_average(3, 0.0, AverageMethod::Quadrature).unwrap().value, 1.0);
    }

    #[test]
    fn quadrature_and_monte_carlo_agree() {
        let q = cue_exp_cos_average(2, 1.0, AverageMethod::Quadrature).unwrap().value;
        let mc = cue_exp_cos_average(2, 1.0, AverageMethod::MonteCarlo { n_samples: 40_000, seed: 4 }).unwrap();
        assert!((q - mc.value).abs() < 4.0 * mc.std_err);
    }

    #[test]
    fn averages_match_bessel_determinants() {
        for n in 1..=4 {
            for &s in &[0.5, 1.0, 2.0] {
                let q = cue_exp_cos_average(n, s, AverageMethod::Quadrature).unwrap().value;
                assert!((q - bo_rhs_discrete(n, s, 1.0).unwrap()).abs() < 1e-6, "discrete n={n} s={s}");
                assert!((q - bo_rhs_continuous(n, s, 1.0).unwrap()).abs() < 1e-6, "continuous n={n} s={s}");
            }
        }
    }

    #[test]
    fn discrete_equals_continuous_bessel() {
        for n in 1..=3 {
            for &s in &[0.5, 1.0, 2.0] {
                for &xi in &[0.3, 1.0] {
                    let d = bo_rhs_discrete(n, s, xi).unwrap();
                    let k = bo_rhs_continuous(n, s, xi).unwrap();
                    assert!((d - k).abs() < 1e-8, "n={n} s={s} ξ={xi}");
                }
            }
        }
    }

    #[test]
    fn right_sides_decrease_in_xi() {
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for i in 0..=5 {
            let xi = 0.2 * i as f64;
            let cur = (bo_rhs_discrete(2, 1.5, xi).unwrap(), bo_rhs_continuous(2, 1.5, xi).unwrap());
            assert!(cur.0 < prev.0 && cur.1 < prev.1);
            prev = cur;
        }
        assert!((bo_rhs_discrete(2, 1.5, 0.0).unwrap() - (1.5f64 * 1.5 / 4.0).exp()).abs() < 1e-14);
    }
}
