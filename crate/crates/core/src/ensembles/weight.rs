use serde::Serialize;

use crate::error::{invalid, Result};

/// Classical weight families. The `Beta1`/`Beta2` members of each family are
/// paired so that superposing two β=1 ensembles with the first weight and
/// keeping even labels yields the β=2 ensemble with the second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WeightSpec {
    /// `e^{-x²/2}` on ℝ.
    GaussianBeta1,
    /// `e^{-x²}` on ℝ.
    GaussianBeta2,
    /// `x^{(a-1)/2} e^{-x/2}` on (0, ∞).
    LaguerreBeta1 { a: f64 },
    /// `x^a e^{-x}` on (0, ∞).
    LaguerreBeta2 { a: f64 },
    /// `(1+x)^{(a-1)/2} (1-x)^{(b-1)/2}` on (-1, 1).
    JacobiBeta1 { a: f64, b: f64 },
    /// `(1+x)^a (1-x)^b` on (-1, 1).
    JacobiBeta2 { a: f64, b: f64 },
    /// `(1+x²)^{-(n_ref+α+1)/2}` on ℝ.
    CauchyBeta1 { alpha: f64, n_ref: usize },
    /// `(1+x²)^{-(n_ref+α)}` on ℝ.
    CauchyBeta2 { alpha: f64, n_ref: usize },
    /// `x^a (1-x)^b` on (0, 1).
    JacobiUnit { a: f64, b: f64 },
    /// Uniform on the unit circle, angles in (-π, π].
    Circular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Interval(f64, f64),
    UnitCircle,
}

/// `w(x) = (x-lo)^{left} (hi-x)^{right} · smooth(x)` with the smooth factor
/// given through its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParts {
    pub left: f64,
    pub right: f64,
}

impl WeightSpec {
    pub fn validate(&self) -> Result<()> {
        use WeightSpec::*;
        match *self {
            LaguerreBeta1 { a } | LaguerreBeta2 { a } if !(a > -1.0) => {
                invalid(format!("Laguerre parameter {a} must exceed -1"))
            }
            JacobiBeta1 { a, b } | JacobiBeta2 { a, b } | JacobiUnit { a, b }
                if !(a > -1.0 && b > -1.0) =>
            {
                invalid(format!("Jacobi parameters ({a}, {b}) must exceed -1"))
            }
            CauchyBeta1 { alpha, n_ref } if !((n_ref as f64 + alpha + 1.0) > 1.0) => {
                invalid("Cauchy weight not integrable")
            }
            CauchyBeta2 { alpha, n_ref } if !((n_ref as f64 + alpha) > 0.5) => {
                invalid("Cauchy weight not integrable")
            }
            _ => Ok(()),
        }
    }

    pub fn support(&self) -> Support {
        use WeightSpec::*;
        match self {
            GaussianBeta1 | GaussianBeta2 | CauchyBeta1 { .. } | CauchyBeta2 { .. } => {
                Support::Interval(f64::NEG_INFINITY, f64::INFINITY)
            }
            LaguerreBeta1 { .. } | LaguerreBeta2 { .. } => Support::Interval(0.0, f64::INFINITY),
            JacobiBeta1 { .. } | JacobiBeta2 { .. } => Support::Interval(-1.0, 1.0),
            JacobiUnit { .. } => Support::Interval(0.0, 1.0),
            Circular => Support::UnitCircle,
        }
    }

    /// Endpoint power exponents (zero for infinite endpoints).
    pub fn parts(&self) -> WeightParts {
        use WeightSpec::*;
        let (left, right) = match *self {
            LaguerreBeta1 { a } => (0.5 * (a - 1.0), 0.0),
            LaguerreBeta2 { a } => (a, 0.0),
            JacobiBeta1 { a, b } => (0.5 * (a - 1.0), 0.5 * (b - 1.0)),
            JacobiBeta2 { a, b } | JacobiUnit { a, b } => (a, b),
            _ => (0.0, 0.0),
        };
        WeightParts { left, right }
    }

    /// Exponent `c` of a Cauchy weight `(1+x²)^{-c}`.
    pub fn cauchy_exponent(&self) -> Option<f64> {
        match *self {
            WeightSpec::CauchyBeta1 { alpha, n_ref } => Some(0.5 * (n_ref as f64 + alpha + 1.0)),
            WeightSpec::CauchyBeta2 { alpha, n_ref } => Some(n_ref as f64 + alpha),
            _ => None,
        }
    }

    /// log of the factor left after removing endpoint powers.
    pub fn ln_smooth(&self, x: f64) -> f64 {
        use WeightSpec::*;
        match *self {
            GaussianBeta1 => -0.5 * x * x,
            GaussianBeta2 => -x * x,
            LaguerreBeta1 { .. } => -0.5 * x,
            LaguerreBeta2 { .. } => -x,
            CauchyBeta1 { .. } | CauchyBeta2 { .. } => {
                -self.cauchy_exponent().unwrap() * (x * x).ln_1p()
            }
            _ => 0.0,
        }
    }

    pub fn ln_evaluate(&self, x: f64) -> f64 {
        match self.support() {
            Support::UnitCircle => {
                if x > -std::f64::consts::PI && x <= std::f64::consts::PI {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Support::Interval(lo, hi) => {
                if !(x > lo && x < hi) {
                    return f64::NEG_INFINITY;
                }
                let p = self.parts();
                let mut v = self.ln_smooth(x);
                if p.left != 0.0 {
                    v += p.left * (x - lo).ln();
                }
                if p.right != 0.0 {
                    v += p.right * (hi - x).ln();
                }
                v
            }
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.ln_evaluate(x).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_match_definitions() {
        let x = 0.3f64;
        assert!((WeightSpec::GaussianBeta1.evaluate(x) - (-x * x / 2.0).exp()).abs() < 1e-15);
        let w = WeightSpec::LaguerreBeta1 { a: 2.0 };
        assert!((w.evaluate(x) - x.powf(0.5) * (-x / 2.0).exp()).abs() < 1e-15);
        let w = WeightSpec::JacobiBeta1 { a: 2.0, b: 0.0 };
        assert!((w.evaluate(x) - (1.0 + x).powf(0.5) * (1.0 - x).powf(-0.5)).abs() < 1e-15);
        let w = WeightSpec::CauchyBeta2 { alpha: 1.0, n_ref: 3 };
        assert!((w.evaluate(x) - (1.0 + x * x).powi(-4)).abs() < 1e-15);
        assert_eq!(WeightSpec::LaguerreBeta2 { a: 0.0 }.evaluate(-1.0), 0.0);
    }

    #[test]
    fn parameter_ranges() {
        assert!(WeightSpec::LaguerreBeta2 { a: -1.0 }.validate().is_err());
        assert!(WeightSpec::JacobiBeta2 { a: 0.0, b: -1.5 }.validate().is_err());
        assert!(WeightSpec::JacobiUnit { a: -0.5, b: 0.5 }.validate().is_ok());
    }
}
