//! Superposition and label-based decimation of spectra.

use rand::Rng;
use std::f64::consts::PI;

use crate::ensembles::{wrap_angle, LabelOrigin, Spectrum, SupportKind, TIE_TOLERANCE};
use crate::error::{invalid, Error, Result};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decimation {
    Even,
    Odd,
    /// Even or odd with probability 1/2 each.
    Alt,
    /// Labels ≡ offset (mod r); offset 0 keeps multiples of r.
    EveryR { r: usize, offset: usize },
    /// `EveryR` with a uniformly drawn offset.
    AltR { r: usize },
}

pub fn superpose(s1: &Spectrum, s2: &Spectrum) -> Result<Spectrum> {
    if s1.kind() != s2.kind() && !s1.is_empty() && !s2.is_empty() {
        return Err(Error::MixedSupport);
    }
    let kind = if s1.is_empty() { s2.kind() } else { s1.kind() };
    let mut v: Vec<f64> = s1.values().iter().chain(s2.values()).copied().collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for w in v.windows(2) {
        if w[0] - w[1] < TIE_TOLERANCE {
            return Err(Error::Ties(TIE_TOLERANCE));
        }
    }
    Ok(Spectrum::from_sorted(v, kind, None))
}

/// Superpose any number of spectra.
pub fn superpose_all(parts: &[Spectrum]) -> Result<Spectrum> {
    let mut it = parts.iter();
    let first = match it.next() {
        Some(s) => s.clone(),
        None => return Ok(Spectrum::empty(SupportKind::Real)),
    };
    it.try_fold(first, |acc, s| superpose(&acc, s))
}

fn keep_labels(s: &Spectrum, r: usize, offset: usize) -> Spectrum {
    let v: Vec<f64> = s
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| (i + 1) % r == offset % r)
        .map(|(_, &x)| x)
        .collect();
    let origin = LabelOrigin { stride: r, offset: offset % r, parent_len: s.len() };
    Spectrum::from_sorted(v, s.kind(), Some(origin))
}

pub fn decimate(s: &Spectrum, mode: Decimation, rng: Option<&mut SimRng>) -> Result<Spectrum> {
    match mode {
        Decimation::Even => Ok(keep_labels(s, 2, 0)),
        Decimation::Odd => Ok(keep_labels(s, 2, 1)),
        Decimation::Alt => {
            let rng = rng.ok_or_else(|| Error::InvalidParameter("alt needs a generator".into()))?;
            let off = if rng.random::<bool>() { 0 } else { 1 };
            Ok(keep_labels(s, 2, off))
        }
        Decimation::EveryR { r, offset } => {
            if r == 0 || r > s.len().max(1) || offset >= r {
                return invalid(format!("every_r with r={r}, offset={offset} on {} points", s.len()));
            }
            Ok(keep_labels(s, r, offset))
        }
        Decimation::AltR { r } => {
            if r == 0 || r > s.len().max(1) {
                return invalid(format!("alt_r with r={r} on {} points", s.len()));
            }
            let rng = rng.ok_or_else(|| Error::InvalidParameter("alt_r needs a generator".into()))?;
            let off = rng.random_range(0..r);
            Ok(keep_labels(s, r, off))
        }
    }
}

pub fn even(s: &Spectrum) -> Spectrum {
    keep_labels(s, 2, 0)
}

pub fn odd(s: &Spectrum) -> Spectrum {
    keep_labels(s, 2, 1)
}

/// Absolute values of a real spectrum. A circular spectrum is folded onto
/// the half circle (0, π) by negating the angles in (-π, 0).
pub fn abs_values(s: &Spectrum) -> Result<Spectrum> {
    let mut v = Vec::with_capacity(s.len());
    for &x in s.values() {
        if x == 0.0 {
            return invalid("exact zero in abs_values");
        }
        if s.is_circular() && x == PI {
            return invalid("angle π in abs_values");
        }
        v.push(x.abs());
    }
    Spectrum::real(v)
}

pub fn power_angles(s: &Spectrum, p: i64) -> Result<Spectrum> {
    if p < 1 {
        return invalid(format!("power {p} must be at least 1"));
    }
    if !s.is_circular() {
        return invalid("power_angles needs a circular spectrum");
    }
    Spectrum::circular(s.values().iter().map(|&t| wrap_angle(p as f64 * t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    fn sp(v: &[f64]) -> Spectrum {
        Spectrum::real(v.to_vec()).unwrap()
    }

    #[test]
    fn basic_examples() {
        assert_eq!(superpose(&sp(&[3.0, 1.0]), &sp(&[2.0])).unwrap().values(), &[3.0, 2.0, 1.0]);
        let s = sp(&[5.0, 4.0, 3.0, 2.0, 1.0]);
        assert_eq!(even(&s).values(), &[4.0, 2.0]);
        assert_eq!(odd(&s).values(), &[5.0, 3.0, 1.0]);
        let nine = sp(&(1..=9).rev().map(|x| x as f64).collect::<Vec<_>>());
        let third = decimate(&nine, Decimation::EveryR { r: 3, offset: 0 }, None).unwrap();
        // values equal labels 3, 6, 9 from the top: 7, 4, 1
        assert_eq!(third.values(), &[7.0, 4.0, 1.0]);
        assert_eq!(abs_values(&sp(&[2.0, -3.0])).unwrap().values(), &[3.0, 2.0]);
        let c = Spectrum::circular(vec![2.0, -2.5]).unwrap();
        assert_eq!(abs_values(&c).unwrap().values(), &[2.5, 2.0]);
        let c = Spectrum::circular(vec![0.75 * PI]).unwrap();
        assert!((power_angles(&c, 2).unwrap().values()[0] + 0.5 * PI).abs() < 1e-15);
        assert!(matches!(
            superpose(&sp(&[1.0]), &Spectrum::circular(vec![0.5]).unwrap()),
            Err(Error::MixedSupport)
        ));
        assert!(decimate(&s, Decimation::EveryR { r: 6, offset: 0 }, None).is_err());
        assert!(power_angles(&c, 0).is_err());
    }

    #[test]
    fn alt_uses_generator() {
        let s = sp(&[4.0, 3.0, 2.0, 1.0]);
        let mut rng = seeded(3);
        let mut seen = [false; 2];
        for _ in 0..50 {
            let d = decimate(&s, Decimation::Alt, Some(&mut rng)).unwrap();
            seen[(d.values()[0] == 4.0) as usize] = true;
        }
        assert!(seen[0] && seen[1]);
        assert!(decimate(&s, Decimation::Alt, None).is_err());
    }

    fn labels_of(n: usize, r: usize, offset: usize) -> Vec<usize> {
        (1..=n).filter(|l| l % r == offset % r).collect()
    }

    #[test]
    fn every_r_composition() {
        // every_r(r1) applied to the output of every_r(r2) keeps labels r1*r2*k
        for (r1, r2) in [(2, 3), (3, 2), (2, 2)] {
            let n = 36;
            let s = sp(&(1..=n).rev().map(|x| x as f64).collect::<Vec<_>>());
            let inner = decimate(&s, Decimation::EveryR { r: r2, offset: 0 }, None).unwrap();
            let outer = decimate(&inner, Decimation::EveryR { r: r1, offset: 0 }, None).unwrap();
            let got: Vec<usize> = outer.values().iter().map(|&x| n + 1 - x as usize).collect();
            assert_eq!(got, labels_of(n, r1 * r2, 0));
        }
    }

    proptest! {
        #[test]
        fn even_odd_partition(mut v in prop::collection::vec(-100.0f64..100.0, 1..30)) {
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            v.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            let s = Spectrum::real(v.clone()).unwrap();
            let e = even(&s);
            let o = odd(&s);
            prop_assert_eq!(e.len(), v.len() / 2);
            prop_assert_eq!(o.len(), (v.len() + 1) / 2);
            let back = superpose(&e, &o).unwrap();
            prop_assert_eq!(back.values(), s.values());
        }

        #[test]
        fn superpose_cardinality(a in prop::collection::vec(0.0f64..1.0, 0..10),
                                 b in prop::collection::vec(2.0f64..3.0, 0..10)) {
            let mut a = a; a.sort_by(|x, y| y.partial_cmp(x).unwrap()); a.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
            let mut b = b; b.sort_by(|x, y| y.partial_cmp(x).unwrap()); b.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
            let s = superpose(&Spectrum::real(a.clone()).unwrap(), &Spectrum::real(b.clone()).unwrap()).unwrap();
            prop_assert_eq!(s.len(), a.len() + b.len());
            for w in s.values().windows(2) { prop_assert!(w[0] > w[1]); }
        }

        #[test]
        fn abs_preserves_magnitudes(v in prop::collection::vec(0.01f64..10.0, 1..15),
                                    signs in prop::collection::vec(any::<bool>(), 15)) {
            let mut v = v; v.sort_by(|a, b| b.partial_cmp(a).unwrap()); v.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            let signed: Vec<f64> = v.iter().zip(&signs).map(|(&x, &s)| if s { x } else { -x }).collect();
            let a = abs_values(&Spectrum::real(signed).unwrap()).unwrap();
            prop_assert_eq!(a.values(), &v[..]);
        }

        #[test]
        fn power_keeps_size(v in prop::collection::vec(-3.0f64..3.0, 1..10), p in 1i64..5) {
            let mut v = v; v.sort_by(|a, b| b.partial_cmp(a).unwrap()); v.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            let s = Spectrum::circular(v.clone()).unwrap();
            if let Ok(q) = power_angles(&s, p) {
                prop_assert_eq!(q.len(), v.len());
                for &t in q.values() { prop_assert!(t > -PI && t <= PI); }
            }
        }
    }
}
