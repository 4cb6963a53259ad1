//! Spectral form factors `S_N(k) = Var Σ e^{ik x_j}`: closed one-dimensional
//! evaluations for the Gaussian and Laguerre β=2 ensembles, a kernel-based
//! evaluation for any β=2 weight, Monte Carlo estimates, and the dissipative
//! form factor of the scaled complex Ginibre ensemble.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{sample_ginibre_scaled, EnsembleSpec, Spectrum, WeightSpec};
use crate::error::{invalid, Error, Result};
use crate::kernels::{cd_kernel, op_basis};
use crate::quadrature::adaptive;
use crate::rng::{seeded, substream, SimRng};

const TOL: f64 = 1e-12;

fn check(n: usize, k: f64) -> Result<()> {
    if n == 0 {
        return invalid("n must be positive");
    }
    if !(k >= 0.0) {
        return invalid(format!("k = {k}"));
    }
    Ok(())
}

/// GUE_N with weight e^{-x²}: `∫_0^k t ρ^{LUE_{N,0}}(t²/2) dt`.
pub fn sff_gue(n: usize, k: f64) -> Result<f64> {
    check(n, k)?;
    if k == 0.0 {
        return Ok(0.0);
    }
    let kern = cd_kernel(WeightSpec::LaguerreBeta2 { a: 0.0 }, n)?;
    adaptive(|t| t * kern.density(0.5 * t * t), 0.0, k, TOL)
}

/// LUE_N with weight x^α e^{-x}: `∫_{1/(1+k²)}^1 ρ^{JUE_{N,(α,0)}}(t) dt`.
pub fn sff_lue(n: usize, alpha: f64, k: f64) -> Result<f64> {
    check(n, k)?;
    if !(alpha > -1.0) {
        return invalid(format!("α = {alpha}"));
    }
    if k == 0.0 {
        return Ok(0.0);
    }
    let kern = cd_kernel(WeightSpec::JacobiUnit { a: alpha, b: 0.0 }, n)?;
    let lo = 1.0 / (1.0 + k * k);
    adaptive(|t| kern.density(t), lo, 1.0, TOL)
}

/// `S_N(k) = N - Σ_{j,l<N} |∫ e^{ikx} φ_j φ_l|²` for a β=2 ensemble, the
/// determinantal form of the two-point function with a separable kernel.
pub fn sff_bruteforce(spec: &EnsembleSpec, k: f64) -> Result<f64> {
    if spec.beta != 2.0 {
        return invalid("kernel evaluation needs β = 2");
    }
    if spec.weight == WeightSpec::Circular {
        return invalid("circular spectra are not handled here");
    }
    let n = spec.n_points;
    check(n, k)?;
    let basis = op_basis(spec.weight, n)?;
    let rule = basis.support_rule(n);
    let mut re = vec![0.0; n * n];
    let mut im = vec![0.0; n * n];
    let mut p = vec![0.0; n];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        basis.normalized_polys(x, n, &mut p);
        let (s, c) = (k * x).sin_cos();
        for j in 0..n {
            for l in 0..=j {
                let v = w * p[j] * p[l];
                re[j * n + l] += v * c;
                im[j * n + l] += v * s;
            }
        }
    }
    let mut sq = 0.0;
    for j in 0..n {
        for l in 0..=j {
            let m2 = re[j * n + l].powi(2) + im[j * n + l].powi(2);
            sq += if j == l { m2 } else { 2.0 * m2 };
        }
    }
    Ok(n as f64 - sq)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub n_samples: usize,
}

/// Variance estimate `mean|X|² - |mean X|²` with a delta-method error.
fn variance_estimate(xs: &[Complex64]) -> McEstimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<Complex64>() / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).norm_sqr()).collect();
    let value = dev.iter().sum::<f64>() / n;
    let var = dev.iter().map(|d| (d - value).powi(2)).sum::<f64>() / (n - 1.0);
    McEstimate { value, std_err: (var / n).sqrt(), n_samples: xs.len() }
}

/// Monte Carlo form factor of any real-spectrum sampler.
pub fn mc_sff<F>(mut sampler: F, k: f64, n_samples: usize, rng: &mut SimRng) -> Result<McEstimate>
where
    F: FnMut(&mut SimRng) -> Result<Spectrum>,
{
    if n_samples < 2 {
        return Err(Error::InsufficientSamples(format!("{n_samples}")));
    }
    let mut xs = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let s = sampler(rng)?;
        xs.push(s.values().iter().map(|&x| Complex64::from_polar(1.0, k * x)).sum());
    }
    Ok(variance_estimate(&xs))
}

/// Form factor of GUE*: the e^{-x²} GUE with eigenvalues multiplied by √(2/N).
pub fn sff_gue_scaled(n: usize, k: f64) -> Result<f64> {
    sff_gue(n, k * (2.0 / n as f64).sqrt())
}

/// Dissipative form factor of the complex Ginibre ensemble scaled to the unit
/// disk. Writing both form factors as `N - ∫∫ e^{...} K²`, the Ginibre kernel
/// integral equals the GUE* one times `e^{-|T|²/N}`:
/// `S^{Gin*}(|T|) = N - e^{-|T|²/N} (N - S^{GUE*}(|T|))`.
pub fn dsff_ginue(n: usize, t_abs: f64) -> Result<f64> {
    check(n, t_abs)?;
    let nf = n as f64;
    Ok(nf - (-t_abs * t_abs / nf).exp() * (nf - sff_gue_scaled(n, t_abs)?))
}

/// Monte Carlo estimate of `Var Σ_j e^{i(T̄ z_j + T z̄_j)}`; chunks run in
/// parallel, each with its own substream of `seed`.
pub fn mc_dsff_ginue(n: usize, t: Complex64, n_samples: usize, seed: u64) -> Result<McEstimate> {
    if n_samples < 2 {
        return Err(Error::InsufficientSamples(format!("{n_samples}")));
    }
    const CHUNK: usize = 1000;
    let chunks = n_samples.div_ceil(CHUNK);
    let parts: Result<Vec<Vec<Complex64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seeded(substream(seed, c as u64));
            let m = CHUNK.min(n_samples - c * CHUNK);
            (0..m)
                .map(|_| {
                    let z = sample_ginibre_scaled(n, &mut rng)?;
                    Ok(z.iter().map(|&z| (Complex64::i() * (t.conj() * z + t * z.conj())).exp()).sum())
                })
                .collect()
        })
        .collect();
    Ok(variance_estimate(&parts?.concat()))
}
