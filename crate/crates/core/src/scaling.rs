//! Bulk-scaled quantities: sine-kernel determinants for the orthogonal groups,
//! bulk COE/CSE generating functions, finite-N convergence and the COE power
//! spectrum.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::ensembles::DetSign;
use crate::error::{invalid, Result};
use crate::gap::{genfn_coe, genfn_orthogonal_group};
use crate::kernels::{nystrom_fredholm_det, sinc, KernelId};
use crate::linalg::{det_from_eigenvalues, sym_eigenvalues};
use crate::quadrature::{composite_legendre, gauss_legendre};

fn cx(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The group with sign + has free-angle density vanishing at 0, hence the odd
/// kernel in the limit; sign - takes the even kernel.
fn bulk_kernel(sign: DetSign) -> KernelId {
    match sign {
        DetSign::Plus => KernelId::SineMinus,
        DetSign::Minus => KernelId::SinePlus,
    }
}

/// Bulk limit of the orthogonal-group generating function on (0, s).
pub fn sine_genfn(sign: DetSign, s: f64, z: Complex64) -> Result<Complex64> {
    if !(s >= 0.0) {
        return invalid(format!("s = {s}"));
    }
    Ok(nystrom_fredholm_det(&bulk_kernel(sign), 0.0, s, z, 16)?.value)
}

fn coe_combination(plus: Complex64, minus: Complex64, xi: Complex64) -> Complex64 {
    ((cx(1.0) - xi) * plus + minus) / (cx(2.0) - xi)
}

pub fn coe_bulk_genfn_complex(s: f64, xi: Complex64) -> Result<Complex64> {
    let z = xi * (cx(2.0) - xi);
    let p = sine_genfn(DetSign::Plus, s / 2.0, z)?;
    let m = sine_genfn(DetSign::Minus, s / 2.0, z)?;
    Ok(coe_combination(p, m, xi))
}

/// Bulk COE generating function for an interval of length s (unit density).
pub fn coe_bulk_genfn(s: f64, xi: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&xi) {
        return invalid(format!("ξ = {xi} outside [0, 2)"));
    }
    Ok(coe_bulk_genfn_complex(s, cx(xi))?.re)
}

/// Bulk CSE generating function for an interval of length s.
pub fn cse_bulk_genfn(s: f64, xi: f64) -> Result<f64> {
    let p = sine_genfn(DetSign::Plus, s / 2.0, cx(xi))?;
    let m = sine_genfn(DetSign::Minus, s / 2.0, cx(xi))?;
    Ok(0.5 * (p + m).re)
}

/// `|genfn_coe(N, 2πs/N, ξ) − bulk(s, ξ)|`
pub fn coe_bulk_error(n: usize, s: f64, xi: f64) -> Result<f64> {
    let finite = genfn_coe(n, 2.0 * PI * s / n as f64, cx(xi))?;
    Ok((finite.re - coe_bulk_genfn(s, xi)?).abs())
}

/// `|𝓔^{O±(2N+1)}((0, πs/N); ξ) − sine_genfn(±, s, ξ)|`
pub fn orthogonal_bulk_error(sign: DetSign, n: usize, s: f64, xi: f64) -> Result<f64> {
    let finite = genfn_orthogonal_group(2 * n + 1, sign, PI * s / n as f64, cx(xi))?;
    Ok((finite - sine_genfn(sign, s, cx(xi))?).norm())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    regression_slope(&lx, &ly)
}

pub fn regression_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

// ---- power spectrum ----------------------------------------------------

/// Nyström size for the sine kernels on (0, L).
fn sine_nodes(l: f64) -> usize {
    (2.1 * l).ceil() as usize + 30
}

/// Eigenvalues of the odd and even sine kernels on (0, L).
fn sine_pair_eigenvalues(l: f64) -> (Vec<f64>, Vec<f64>) {
    if l <= 0.0 {
        return (Vec::new(), Vec::new());
    }
    let r = gauss_legendre(sine_nodes(l)).mapped(0.0, l);
    let n = r.nodes.len();
    let mut odd = DMatrix::<f64>::zeros(n, n);
    let mut even = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let (x, y) = (r.nodes[i], r.nodes[j]);
            let w = (r.weights[i] * r.weights[j]).sqrt();
            let (d, s) = (sinc(x - y), sinc(x + y));
            odd[(i, j)] = w * (d - s);
            odd[(j, i)] = w * (d - s);
            even[(i, j)] = w * (d + s);
            even[(j, i)] = w * (d + s);
        }
    }
    (sym_eigenvalues(odd), sym_eigenvalues(even))
}

/// Bulk COE generating function at `ξ = 1 - t`, |t| = 1, from the sine
/// spectra on (0, s/2).
fn coe_bulk_on_circle(odd: &[f64], even: &[f64], t: Complex64) -> Complex64 {
    let one = cx(1.0);
    if (t + one).norm() < 1e-8 {
        // removable singularity at t = -1: derivative of t A(t²) + B(t²)
        let (ta, tb): (f64, f64) = (odd.iter().sum(), even.iter().sum());
        return cx(1.0 + 2.0 * ta - 2.0 * tb);
    }
    let z = one - t * t;
    let a = det_from_eigenvalues(odd, z);
    let b = det_from_eigenvalues(even, z);
    (t * a + b) / (one + t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSpectrumPoint {
    pub omega: f64,
    pub value: f64,
    /// spread of the last accelerated partial sums
    pub est_error: f64,
    /// upper end of the s-range actually integrated
    pub s_max: f64,
}

const PANEL: f64 = 2.0;
const PANEL_NODES: usize = 14;
const MIN_TERMS: usize = 8;
const MAX_TERMS: usize = 40;

/// Wynn's epsilon table on partial sums; returns the two most recent
/// even-column estimates.
fn wynn_epsilon(sums: &[f64]) -> (f64, f64) {
    let n = sums.len();
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = (sums[n - 1], sums[n.saturating_sub(2)]);
    let mut col = 0;
    while cur.len() > 1 {
        let next: Vec<f64> = (0..cur.len() - 1)
            .map(|i| {
                let d = cur[i + 1] - cur[i];
                let base = if col == 0 { 0.0 } else { prev[i + 1] };
                if d == 0.0 { f64::INFINITY } else { base + 1.0 / d }
            })
            .collect();
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 && cur.len() >= 2 && cur.iter().all(|v| v.is_finite()) {
            best = (cur[cur.len() - 1], cur[cur.len() - 2]);
        }
    }
    best
}

/// `Re ∫_a^b 𝓔^{COE∞}((0,s); 1-e^{iω}) ds` by composite Gauss–Legendre.
fn slab(omega: f64, a: f64, b: f64) -> f64 {
    let t = Complex64::from_polar(1.0, omega);
    let panels = ((b - a) / PANEL).ceil().max(1.0) as usize;
    let r = composite_legendre(a, b, panels, PANEL_NODES);
    r.nodes
        .iter()
        .zip(&r.weights)
        .map(|(&s, &w)| {
            let (odd, even) = sine_pair_eigenvalues(s / 2.0);
            w * coe_bulk_on_circle(&odd, &even, t).re
        })
        .sum()
}

/// Bulk COE power spectrum at ω ∈ (0, π]. The integrand behaves like a
/// slowly decaying multiple of `e^{iωs}`, so the s-integral is split at the
/// half periods `kπ/ω`, giving alternating partial sums that are accelerated
/// with the epsilon algorithm until two successive estimates agree.
pub fn power_spectrum_coe(omega: f64) -> Result<PowerSpectrumPoint> {
    if !(omega > 0.0 && omega <= PI) {
        return invalid(format!("ω = {omega} outside (0, π]"));
    }
    let h = PI / omega;
    let norm = 2.0 * (0.5 * omega).sin().powi(2);
    let mut sums = Vec::new();
    let mut acc = 0.0;
    let mut last = f64::NAN;
    for k in 0..MAX_TERMS {
        acc += slab(omega, k as f64 * h, (k + 1) as f64 * h);
        sums.push(acc / norm);
        if sums.len() >= MIN_TERMS {
            let (a, b) = wynn_epsilon(&sums);
            let err = (a - b).abs().max((a - last).abs());
            if err < 1e-4 * a.abs() {
                return Ok(PowerSpectrumPoint { omega, value: a, est_error: err, s_max: (k + 1) as f64 * h });
            }
            last = a;
        }
    }
    Err(crate::Error::NonConvergence { what: "power spectrum".into(), last, previous: acc / norm })
}

pub fn power_spectrum_coe_grid(omegas: &[f64]) -> Result<Vec<PowerSpectrumPoint>> {
    omegas.iter().map(|&w| power_spectrum_coe(w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(sine_genfn(DetSign::Plus, 0.0, cx(1.0)).unwrap(), cx(1.0));
        assert_eq!(sine_genfn(DetSign::Minus, 1.0, cx(0.0)).unwrap(), cx(1.0));
        assert!((coe_bulk_genfn(1.3, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((coe_bulk_genfn(0.0, 0.7).unwrap() - 1.0).abs() < 1e-14);
        assert!((cse_bulk_genfn(0.0, 0.7).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_is_full_sine_determinant() {
        for &(s, xi) in &[(1.0, 1.0), (3.0, 0.5)] {
            let p = sine_genfn(DetSign::Plus, s / 2.0, cx(xi)).unwrap();
            let m = sine_genfn(DetSign::Minus, s / 2.0, cx(xi)).unwrap();
            let full = nystrom_fredholm_det(&KernelId::Sine, -s / 2.0, s / 2.0, cx(xi), 16).unwrap().value;
            assert!((p * m - full).norm() < 1e-9);
        }
    }

    #[test]
    fn sine_genfn_decreases_in_s() {
        for sign in [DetSign::Plus, DetSign::Minus] {
            for &z in &[0.4, 1.0] {
                let mut prev = 1.0 + 1e-12;
                for k in 1..12 {
                    let v = sine_genfn(sign, 0.25 * k as f64, cx(z)).unwrap().re;
                    assert!(v < prev, "{sign:?} z={z} k={k}");
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn coe_bulk_is_a_probability_generating_value() {
        for &s in &[0.3, 1.0, 2.5] {
            for &xi in &[0.2, 0.7, 1.0] {
                let v = coe_bulk_genfn(s, xi).unwrap();
                assert!(v > 0.0 && v <= 1.0, "s={s} ξ={xi}: {v}");
            }
        }
    }

    #[test]
    fn finite_coe_converges_to_bulk() {
        let ns = [8usize, 16, 32, 64];
        let errs: Vec<f64> = ns.iter().map(|&n| coe_bulk_error(n, 1.0, 1.0).unwrap()).collect();
        assert!(errs[3] < 1e-3, "{errs:?}");
        let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        assert!(loglog_slope(&x, &errs) <= -0.7, "{errs:?}");
    }

    #[test]
    fn cse_bulk_matches_large_n() {
        let n = 48;
        let th = PI * 0.5 / n as f64;
        let finite = crate::gap::genfn_cse(n, th, cx(0.6)).unwrap().re;
        assert!((finite - cse_bulk_genfn(1.0, 0.6).unwrap()).abs() < 2e-3);
    }

    #[test]
    fn circle_evaluation_agrees_with_nystrom_route() {
        let s = 2.2;
        let (odd, even) = sine_pair_eigenvalues(s / 2.0);
        for &omega in &[0.5, 2.0] {
            let t = Complex64::from_polar(1.0, omega);
            let a = coe_bulk_on_circle(&odd, &even, t);
            let b = coe_bulk_genfn_complex(s, cx(1.0) - t).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
        // ω = π via the derivative form against a nearby point
        let near = coe_bulk_on_circle(&odd, &even, Complex64::from_polar(1.0, PI - 1e-5));
        let at = coe_bulk_on_circle(&odd, &even, cx(-1.0));
        assert!((near - at).norm() < 1e-4);
    }

    #[test]
    fn nystrom_size_is_sufficient() {
        for &l in &[5.0, 40.0] {
            let (o1, e1) = sine_pair_eigenvalues(l);
            let op = crate::kernels::KernelOperator::build(KernelId::SineMinus, 0.0, l, 2 * sine_nodes(l)).unwrap();
            let z = Complex64::new(0.3, 0.8);
            let fine = op.det(z);
            assert!((det_from_eigenvalues(&o1, z) - fine).norm() < 1e-10 * fine.norm().max(1e-3));
            assert!(e1.iter().all(|&v| v > -1e-10 && v < 1.0 + 1e-10));
        }
    }

    #[test]
    fn integrand_starts_at_one() {
        let t = Complex64::from_polar(1.0, 0.7);
        assert!((coe_bulk_on_circle(&[], &[], t) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn epsilon_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut acc = 0.0;
        let sums: Vec<f64> = (1..=14)
            .map(|k| {
                acc += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                acc
            })
            .collect();
        let (a, _) = wynn_epsilon(&sums);
        assert!((a - 2f64.ln()).abs() < 1e-9, "{a} {}", a - 2f64.ln());
    }

    #[test]
    fn power_spectrum_is_positive() {
        for &w in &[0.5, 1.0, 2.0, 3.0] {
            let p = power_spectrum_coe(w).unwrap();
            assert!(p.value > 0.0 && p.est_error < 1e-3 * p.value, "{p:?}");
        }
    }

    #[test]
    fn power_spectrum_small_omega() {
        let w = 0.2;
        let p = power_spectrum_coe(w).unwrap();
        let lead = 1.0 / (PI * w);
        assert!((p.value - lead).abs() < 0.1 * lead);
        // with the logarithmic correction the remainder is O(ω)
        assert!((p.value - lead - w.ln() / PI.powi(3)).abs() < 0.02 * lead);
    }
}
