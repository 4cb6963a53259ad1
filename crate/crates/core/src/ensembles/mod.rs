//! Classical ensembles: weights, spectra, matrix-model samplers and a
//! Metropolis sampler for arbitrary β.

mod matrix;
mod metropolis;
mod spectrum;
mod weight;

pub use matrix::*;
pub use metropolis::{sample_metropolis, MCConfig, MetropolisChain};
pub use spectrum::{wrap_angle, LabelOrigin, Spectrum, SupportKind, TIE_TOLERANCE};
pub use weight::{Support, WeightParts, WeightSpec};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::special::ln_gamma;

/// Sign of the determinant of an orthogonal group element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DetSign {
    Plus,
    Minus,
}

impl DetSign {
    pub fn from_i32(s: i32) -> Result<DetSign> {
        match s {
            1 => Ok(DetSign::Plus),
            -1 => Ok(DetSign::Minus),
            _ => invalid(format!("determinant sign {s}")),
        }
    }
}

/// Free eigen-angles of O^±(n) in (0, π) and their density in `x = sin²(θ/2)`,
/// written as the exponents `(a, b)` of `x^a (1-x)^b` on (0, 1).
pub fn orthogonal_group_class(n: usize, sign: DetSign) -> (usize, f64, f64) {
    let m = n / 2;
    match (sign, n % 2) {
        (DetSign::Plus, 0) => (m, -0.5, -0.5),
        (DetSign::Plus, _) => (m, 0.5, -0.5),
        (DetSign::Minus, 1) => (m, -0.5, 0.5),
        (DetSign::Minus, _) => (m.saturating_sub(1), 0.5, 0.5),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleSpec {
    pub beta: f64,
    pub n_points: usize,
    pub weight: WeightSpec,
}

impl EnsembleSpec {
    pub fn new(beta: f64, n_points: usize, weight: WeightSpec) -> Result<EnsembleSpec> {
        if !(beta > 0.0) {
            return invalid(format!("beta = {beta}"));
        }
        if n_points == 0 {
            return invalid("n_points must be positive");
        }
        weight.validate()?;
        Ok(EnsembleSpec { beta, n_points, weight })
    }

    pub fn goe(n: usize) -> EnsembleSpec {
        EnsembleSpec { beta: 1.0, n_points: n, weight: WeightSpec::GaussianBeta1 }
    }

    pub fn gue(n: usize) -> EnsembleSpec {
        EnsembleSpec { beta: 2.0, n_points: n, weight: WeightSpec::GaussianBeta2 }
    }

    pub fn gse(n: usize) -> EnsembleSpec {
        EnsembleSpec { beta: 4.0, n_points: n, weight: WeightSpec::GaussianBeta2 }
    }

    pub fn lue(n: usize, alpha: f64) -> EnsembleSpec {
        EnsembleSpec { beta: 2.0, n_points: n, weight: WeightSpec::LaguerreBeta2 { a: alpha } }
    }

    pub fn jue(n: usize, a: f64, b: f64) -> EnsembleSpec {
        EnsembleSpec { beta: 2.0, n_points: n, weight: WeightSpec::JacobiBeta2 { a, b } }
    }

    pub fn cue(n: usize) -> EnsembleSpec {
        EnsembleSpec { beta: 2.0, n_points: n, weight: WeightSpec::Circular }
    }

    pub fn coe(n: usize) -> EnsembleSpec {
        EnsembleSpec { beta: 1.0, n_points: n, weight: WeightSpec::Circular }
    }

    pub fn cse(n: usize) -> EnsembleSpec {
        EnsembleSpec { beta: 4.0, n_points: n, weight: WeightSpec::Circular }
    }

    /// Free angles of Haar O^±(n) as a β=2 ensemble in `x = sin²(θ/2)`.
    pub fn orthogonal_group(n: usize, sign: DetSign) -> EnsembleSpec {
        let (m, a, b) = orthogonal_group_class(n, sign);
        EnsembleSpec { beta: 2.0, n_points: m, weight: WeightSpec::JacobiUnit { a, b } }
    }
}

/// `ln Z_{N,β}` for the circular ensembles, `Z = (2π)^N Γ(1+Nβ/2)/Γ(1+β/2)^N`.
pub fn ln_circular_normalization(n: usize, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return invalid(format!("beta = {beta}"));
    }
    if n == 0 {
        return invalid("n must be positive");
    }
    let nf = n as f64;
    Ok(nf * (2.0 * std::f64::consts::PI).ln() + ln_gamma(1.0 + 0.5 * nf * beta)
        - nf * ln_gamma(1.0 + 0.5 * beta))
}

pub fn circular_normalization(n: usize, beta: f64) -> Result<f64> {
    ln_circular_normalization(n, beta).map(f64::exp)
}
