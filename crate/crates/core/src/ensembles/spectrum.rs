use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SupportKind {
    Real,
    Circle,
}

/// Which labels of a parent spectrum survived a decimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LabelOrigin {
    pub stride: usize,
    pub offset: usize,
    pub parent_len: usize,
}

/// Point configuration sorted strictly descending. Label `l` (1-based) is
/// `values[l-1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<f64>,
    kind: SupportKind,
    origin: Option<LabelOrigin>,
}

/// Reduce an angle into (-π, π].
pub fn wrap_angle(t: f64) -> f64 {
    let mut r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    if r <= -PI {
        r += 2.0 * PI;
    }
    r
}

impl Spectrum {
    fn build(mut values: Vec<f64>, kind: SupportKind) -> Result<Spectrum> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite spectrum value".into()));
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for w in values.windows(2) {
            if w[0] - w[1] < TIE_TOLERANCE {
                return Err(Error::Ties(TIE_TOLERANCE));
            }
        }
        Ok(Spectrum { values, kind, origin: None })
    }

    pub fn real(values: Vec<f64>) -> Result<Spectrum> {
        Spectrum::build(values, SupportKind::Real)
    }

    /// Angles, reduced into (-π, π].
    pub fn circular(angles: Vec<f64>) -> Result<Spectrum> {
        Spectrum::build(angles.into_iter().map(wrap_angle).collect(), SupportKind::Circle)
    }

    pub fn empty(kind: SupportKind) -> Spectrum {
        Spectrum { values: Vec::new(), kind, origin: None }
    }

    pub(crate) fn from_sorted(values: Vec<f64>, kind: SupportKind, origin: Option<LabelOrigin>) -> Spectrum {
        Spectrum { values, kind, origin }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kind(&self) -> SupportKind {
        self.kind
    }

    pub fn is_circular(&self) -> bool {
        self.kind == SupportKind::Circle
    }

    pub fn label_origin(&self) -> Option<LabelOrigin> {
        self.origin
    }

    /// Value carrying label `l` (1-based).
    pub fn label(&self, l: usize) -> f64 {
        self.values[l - 1]
    }

    /// Number of points in the open interval (a, b); for circular spectra
    /// (a, b) is the counter-clockwise arc from a to b.
    pub fn count_in(&self, a: f64, b: f64) -> usize {
        match self.kind {
            SupportKind::Real => self.values.iter().filter(|&&x| x > a && x < b).count(),
            SupportKind::Circle => {
                let len = b - a;
                if len >= 2.0 * PI {
                    return self.values.len();
                }
                self.values
                    .iter()
                    .filter(|&&t| {
                        let d = (t - a).rem_euclid(2.0 * PI);
                        d > 0.0 && d < len
                    })
                    .count()
            }
        }
    }

    /// Apply `f` to every value and rebuild (re-sorting).
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Result<Spectrum> {
        let v = self.values.iter().map(|&x| f(x)).collect();
        match self.kind {
            SupportKind::Real => Spectrum::real(v),
            SupportKind::Circle => Spectrum::circular(v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_descending_and_ties_rejected() {
        let s = Spectrum::real(vec![1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[3.0, 2.0, 1.0]);
        assert!(matches!(Spectrum::real(vec![1.0, 1.0 + 1e-14]), Err(Error::Ties(_))));
    }

    #[test]
    fn circular_wraps_into_range() {
        let s = Spectrum::circular(vec![3.0 * PI / 2.0, -PI]).unwrap();
        for &t in s.values() {
            assert!(t > -PI && t <= PI);
        }
        assert!((s.values()[0] - PI).abs() < 1e-15);
        assert!((s.values()[1] + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn arc_counts_wrap() {
        let s = Spectrum::circular(vec![3.0, -3.0, 0.5]).unwrap();
        assert_eq!(s.count_in(2.5, 2.5 + 1.0), 2);
        assert_eq!(s.count_in(0.0, 1.0), 1);
    }
}
