//! Exact and oracle checks.

use num_complex::Complex64;
use rand::Rng;
use serde_json::json;
use std::f64::consts::PI;

use super::{Args, Outcome, Worst};
use crate::discrete::{bo_rhs_continuous, bo_rhs_discrete, cue_exp_cos_average, dlue_genfn, AverageMethod};
use crate::ensembles::{DetSign, EnsembleSpec, WeightSpec};
use crate::error::Result;
use crate::formfactor::{sff_bruteforce, sff_gue, sff_lue};
use crate::gap::{
    bruteforce_counts, coe_genfn_poly, counting_stats, cue_genfn_poly, genfn_coe_direct, genfn_cse, genfn_cue,
    genfn_orthogonal_group, genfn_poly, genfn_ue,
};
use crate::quadrature::gauss_jacobi_on;
use crate::rng::{seeded, SimRng};
use crate::scaling::{orthogonal_bulk_error, power_spectrum_coe_grid, regression_slope};
use crate::special::ln_gamma;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const ARCS: [f64; 3] = [PI / 4.0, PI / 2.0, PI];
const HALF_ARCS: [f64; 3] = [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0];
const XIS: [f64; 3] = [0.25, 0.5, 1.0];

/// `Σ_k (1-ξ)^k (E(2k) + E(2k ± 1))` from COE count probabilities.
fn parity_genfn(probs: &[f64], plus: bool, xi: f64) -> f64 {
    let e = |k: i64| if k < 0 { 0.0 } else { probs.get(k as usize).copied().unwrap_or(0.0) };
    let t = 1.0 - xi;
    let mut s = 0.0;
    for k in 0..=(probs.len() as i64) {
        let odd = if plus { 2 * k + 1 } else { 2 * k - 1 };
        s += t.powi(k as i32) * (e(2 * k) + e(odd));
    }
    s
}

fn group(n: usize, sign: DetSign, theta: f64, xi: f64) -> Result<f64> {
    Ok(genfn_orthogonal_group(n, sign, theta, c(xi))?.re)
}

// ---- CUE factorisation -------------------------------------------------

fn cue_product(a: &Args, shift: f64) -> Result<Outcome> {
    let ns = a.counts("n", &[2, 3, 4, 5, 6, 7, 8], 1, 40)?;
    a.note("phi", json!(ARCS));
    a.note("xi", json!(XIS));
    let mut w = Worst::new();
    for &n in &ns {
        for &phi in &ARCS {
            for &xi in &XIS {
                let lhs = genfn_cue(n, phi, c(xi))?.re;
                let rhs = group(n + 1, DetSign::Plus, phi / 2.0, xi + shift)? * group(n + 1, DetSign::Minus, phi / 2.0, xi + shift)?;
                w.add(lhs, rhs);
            }
        }
    }
    Ok(w.relative(1e-9))
}

pub(crate) fn cue_group_product(a: &Args) -> Result<Outcome> {
    let shift = a.real("perturb", 0.0, |_| true)?;
    cue_product(a, shift)
}

pub(crate) fn cue_group_product_shifted(a: &Args) -> Result<Outcome> {
    a.note("perturb", json!(0.1));
    cue_product(a, 0.1)
}

/// 𝓔^CUE = 𝓔⁻𝓔⁺ with the parity functions built from the COE count
/// distribution: from the orthogonal-group route for all N, and from direct
/// quadrature of the COE density for N ≤ 3.
pub(crate) fn cue_parity_product(a: &Args) -> Result<Outcome> {
    let ns = a.counts("n", &[2, 3, 4, 5, 6, 7, 8], 1, 40)?;
    a.note("phi", json!(ARCS));
    a.note("xi", json!(XIS));
    let mut exact = Worst::new();
    let mut oracle = Worst::new();
    for &n in &ns {
        for &phi in &ARCS {
            let p = coe_genfn_poly(n, phi)?.coefficients;
            let q = if n <= 3 { Some(bruteforce_counts(1.0, WeightSpec::Circular, n, (0.0, phi))?.coefficients) } else { None };
            for &xi in &XIS {
                let cue = genfn_cue(n, phi, c(xi))?.re;
                exact.add(parity_genfn(&p, false, xi) * parity_genfn(&p, true, xi), cue);
                if let Some(q) = &q {
                    oracle.add(parity_genfn(q, false, xi) * parity_genfn(q, true, xi), cue);
                }
            }
        }
    }
    a.note("oracle_rel_err", json!(oracle.rel));
    let pass = exact.rel < 1e-9 && oracle.rel < 1e-6;
    Ok(exact.outcome(pass))
}

// ---- COE and CSE formulas against quadrature ---------------------------

fn coe_against_quadrature(a: &Args, shift: f64) -> Result<Outcome> {
    let ns = a.counts("n", &[2, 3, 4], 1, 4)?;
    a.note("phi", json!(ARCS));
    a.note("xi", json!(XIS));
    let mut w = Worst::new();
    for &n in &ns {
        for &phi in &ARCS {
            let b = bruteforce_counts(1.0, WeightSpec::Circular, n, (0.0, phi))?;
            for &xi in &XIS {
                w.add(genfn_coe_direct(n, phi, c(xi + shift))?.re, b.genfn(xi));
            }
        }
    }
    Ok(w.relative(1e-5))
}

pub(crate) fn coe_formula(a: &Args) -> Result<Outcome> {
    let shift = a.real("perturb", 0.0, |_| true)?;
    coe_against_quadrature(a, shift)
}

pub(crate) fn coe_formula_shifted(a: &Args) -> Result<Outcome> {
    a.note("perturb", json!(0.1));
    coe_against_quadrature(a, 0.1)
}

/// COE parity functions on (-θ, θ) against O^∓(N+1) (or O^±(N+1) for the
/// companion), with the COE side by direct quadrature.
pub(crate) fn coe_parity_vs_group(a: &Args, companion: bool) -> Result<Outcome> {
    let ns = a.counts("n", &[1, 2, 3, 4], 1, 4)?;
    a.note("theta", json!(HALF_ARCS));
    a.note("xi", json!(XIS));
    let mut w = Worst::new();
    for &n in &ns {
        for &theta in &HALF_ARCS {
            let p = bruteforce_counts(1.0, WeightSpec::Circular, n, (-theta, theta))?.coefficients;
            for &xi in &XIS {
                // even n: E⁻ ↔ O⁻, E⁺ ↔ O⁺; odd n: E⁺ ↔ O⁻, E⁻ ↔ O⁺
                let plus = (n % 2 == 1) ^ companion;
                let sign = if companion { DetSign::Plus } else { DetSign::Minus };
                w.add(parity_genfn(&p, plus, xi), group(n + 1, sign, theta, xi)?);
            }
        }
    }
    Ok(w.relative(1e-7))
}

/// CSE generating function from O^±(2N+1) against direct quadrature, and
/// against the COE_{2N} parity average for 2N ≤ 4.
pub(crate) fn cse_formula(a: &Args) -> Result<Outcome> {
    let ns = a.counts("n", &[1, 2, 3], 1, 4)?;
    a.note("theta", json!(HALF_ARCS));
    a.note("xi", json!(XIS));
    let mut w = Worst::new();
    for &n in &ns {
        for &theta in &HALF_ARCS {
            let b = bruteforce_counts(4.0, WeightSpec::Circular, n, (-theta, theta))?;
            let coe = if 2 * n <= 4 {
                Some(bruteforce_counts(1.0, WeightSpec::Circular, 2 * n, (-theta, theta))?.coefficients)
            } else {
                None
            };
            for &xi in &XIS {
                let direct = b.genfn(xi);
                w.add(genfn_cse(n, theta, c(xi))?.re, direct);
                if let Some(p) = &coe {
                    w.add(0.5 * (parity_genfn(p, true, xi) + parity_genfn(p, false, xi)), direct);
                }
            }
        }
    }
    Ok(w.relative(1e-5))
}

// ---- Polynomial identities ---------------------------------------------

fn vandermonde(u: &[f64]) -> f64 {
    let mut p = 1.0;
    for j in 0..u.len() {
        for k in j + 1..u.len() {
            p *= u[j] - u[k];
        }
    }
    p
}

/// Ordered sample `x_1 > x_2 > …` of size m, uniform on (-1, 1).
fn ordered_points(m: usize, rng: &mut SimRng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
    x.sort_by(|p, q| q.partial_cmp(p).unwrap());
    x
}

/// Sum over N-subsets S of {1,…,2N+1} of Δ(x_S) Δ(x_{S^c}), each Δ taken
/// with its index set in decreasing order; and `2^N Δ(x_odd) Δ(x_even)`.
pub(crate) fn subset_sides(x: &[f64]) -> (f64, f64) {
    let m = x.len();
    let n = m / 2;
    // index i ↔ label i+1; decreasing labels ↔ reversed slice order
    let pick = |mask: u32, inside: bool| -> Vec<f64> {
        (0..m).rev().filter(|&i| ((mask >> i) & 1 == 1) == inside).map(|i| x[i]).collect()
    };
    let mut lhs = 0.0;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize == n {
            lhs += vandermonde(&pick(mask, true)) * vandermonde(&pick(mask, false));
        }
    }
    let odd_mask: u32 = (0..m).filter(|i| i % 2 == 0).map(|i| 1u32 << i).sum();
    let rhs = 2f64.powi(n as i32) * vandermonde(&pick(odd_mask, true)) * vandermonde(&pick(odd_mask, false));
    (lhs, rhs)
}

/// `Σ_ε |Δ(ε_1σ_1, …, ε_Nσ_N)|` and `2^N Δ(x²) y_1⋯y_m Δ(y²)` in absolute
/// value, with x_j, y_j the odd- and even-position values counted upward
/// from the smallest σ.
pub(crate) fn signed_sides(sigma: &[f64]) -> (f64, f64) {
    let n = sigma.len();
    let mut asc = sigma.to_vec();
    asc.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut lhs = 0.0;
    let mut u = vec![0.0; n];
    for mask in 0u32..(1 << n) {
        for (j, &s) in asc.iter().enumerate() {
            u[j] = if (mask >> j) & 1 == 1 { -s } else { s };
        }
        lhs += vandermonde(&u).abs();
    }
    let x2: Vec<f64> = asc.iter().step_by(2).map(|v| v * v).collect();
    let y: Vec<f64> = asc.iter().skip(1).step_by(2).copied().collect();
    let y2: Vec<f64> = y.iter().map(|v| v * v).collect();
    let rhs = 2f64.powi(n as i32) * vandermonde(&x2).abs() * y.iter().product::<f64>() * vandermonde(&y2).abs();
    (lhs, rhs)
}

fn pointwise(a: &Args, seed: u64, max: usize, sides: fn(&[f64]) -> (f64, f64), size: fn(usize) -> usize) -> Result<Outcome> {
    let ns = a.counts("n", &(1..=max).collect::<Vec<_>>(), 1, max)?;
    let draws = a.count("draws", 100, 1, 100_000)?;
    let mut rng = seeded(seed);
    let mut w = Worst::new();
    for &n in &ns {
        for _ in 0..draws {
            let x = ordered_points(size(n), &mut rng);
            let (l, r) = sides(&x);
            w.add(l, r);
        }
    }
    Ok(w.relative(1e-10))
}

pub(crate) fn subset_vandermonde(a: &Args, seed: u64) -> Result<Outcome> {
    pointwise(a, seed, 4, subset_sides, |n| 2 * n + 1)
}

pub(crate) fn signed_vandermonde(a: &Args, seed: u64) -> Result<Outcome> {
    fn positive(x: &[f64]) -> (f64, f64) {
        let s: Vec<f64> = x.iter().map(|v| 0.5 * (v + 1.0) + 1e-3).collect();
        signed_sides(&s)
    }
    pointwise(a, seed, 5, positive, |n| n)
}

// ---- Gap probability identities ----------------------------------------

/// Gaps of UE_N(w₂) in J = (-1, s) from those of OE_N(w₁) and OE_{N+1}(w₁),
/// Jacobi pair; OE sides by direct quadrature.
pub(crate) fn superposed_gaps(a: &Args) -> Result<Outcome> {
    let n = a.count("n", 3, 1, 3)?;
    let ja = a.real("a", 0.5, |v| v > -1.0)?;
    let jb = a.real("b", 1.5, |v| v > -1.0)?;
    let ends = [-0.3, 0.2, 0.6];
    a.note("interval_right_end", json!(ends));
    let w1 = WeightSpec::JacobiBeta1 { a: ja, b: jb };
    let w2 = WeightSpec::JacobiBeta2 { a: ja, b: jb };
    let mut w = Worst::new();
    for &s in &ends {
        let j = (-1.0, s);
        let e_n = bruteforce_counts(1.0, w1, n, j)?.coefficients;
        let e_n1 = bruteforce_counts(1.0, w1, n + 1, j)?.coefficients;
        let e = |v: &[f64], k: i64| if k < 0 { 0.0 } else { v.get(k as usize).copied().unwrap_or(0.0) };
        let ue = genfn_poly(w2, n, j)?;
        for k in 0..=n as i64 {
            let mut rhs = 0.0;
            for jj in 0..=(2 * k + 1) {
                rhs += e(&e_n, 2 * k + 1 - jj) * (e(&e_n1, jj) + e(&e_n1, jj - 1));
            }
            w.add(ue.prob(k as usize), rhs);
        }
    }
    Ok(w.absolute(1e-7))
}

/// `E_{N,1}(2k+μ-1) + E_{N,1}(2k+μ)` for GOE on (-s, s) against the m-point
/// Laguerre ensemble with parameter μ - 1/2 on (0, s²), N = 2m + μ.
pub(crate) fn folded_gaps(a: &Args) -> Result<Outcome> {
    let n = a.count("n", 4, 1, 4)?;
    let ss = [0.5, 1.0, 1.5];
    a.note("s", json!(ss));
    let (m, mu) = (n / 2, n % 2);
    let mut w = Worst::new();
    for &s in &ss {
        let e = bruteforce_counts(1.0, WeightSpec::GaussianBeta1, n, (-s, s))?.coefficients;
        let ev = |k: i64| if k < 0 { 0.0 } else { e.get(k as usize).copied().unwrap_or(0.0) };
        let rhs: Vec<f64> = if m == 0 {
            vec![1.0]
        } else {
            let g = genfn_poly(WeightSpec::LaguerreBeta2 { a: mu as f64 - 0.5 }, m, (0.0, s * s))?;
            (0..=m).map(|k| g.prob(k)).collect()
        };
        for (k, &r) in rhs.iter().enumerate() {
            let k = k as i64;
            w.add(ev(2 * k + mu as i64 - 1) + ev(2 * k + mu as i64), r);
        }
    }
    Ok(w.absolute(1e-7))
}

// ---- Interlaced integrals ----------------------------------------------

/// Left side of the interlaced-region integral by tensor Gauss–Jacobi: the
/// region is a product of the intervals (a_{j+1}, a_j).
pub(crate) fn dixon_anderson_lhs(s: &[f64], av: &[f64], nodes: usize) -> f64 {
    let n = av.len() - 1;
    let rules: Vec<_> = (0..n).map(|j| gauss_jacobi_on(nodes, av[j + 1], av[j], s[j] - 1.0, s[j + 1] - 1.0)).collect();
    let mut idx = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let lam: Vec<f64> = (0..n).map(|j| rules[j].nodes[idx[j]]).collect();
        let mut v: f64 = (0..n).map(|j| rules[j].weights[idx[j]]).product();
        v *= vandermonde(&lam);
        for (j, &l) in lam.iter().enumerate() {
            for (p, (&ap, &sp)) in av.iter().zip(s).enumerate() {
                if p != j && p != j + 1 {
                    v *= (l - ap).abs().powf(sp - 1.0);
                }
            }
        }
        total += v;
        let mut p = 0;
        loop {
            if p == n {
                return total;
            }
            idx[p] += 1;
            if idx[p] < nodes {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

pub(crate) fn dixon_anderson_rhs(s: &[f64], av: &[f64]) -> f64 {
    let sum: f64 = s.iter().sum();
    let mut ln = s.iter().map(|&v| ln_gamma(v)).sum::<f64>() - ln_gamma(sum);
    for j in 0..av.len() {
        for k in j + 1..av.len() {
            ln += (s[j] + s[k] - 1.0) * (av[j] - av[k]).abs().ln();
        }
    }
    ln.exp()
}

pub(crate) fn dixon_anderson(a: &Args, seed: u64) -> Result<Outcome> {
    let ns = a.counts("n", &[1, 2], 1, 3)?;
    let draws = a.count("draws", 5, 1, 1000)?;
    let mut rng = seeded(seed);
    let mut all = Worst::new();
    let mut pass = true;
    for &n in &ns {
        let mut w = Worst::new();
        for _ in 0..draws {
            let s: Vec<f64> = (0..=n).map(|_| rng.random_range(0.6..3.0)).collect();
            let mut av = vec![rng.random_range(-1.0..1.0)];
            for _ in 0..n {
                let last = *av.last().unwrap();
                av.push(last - rng.random_range(0.5..2.0));
            }
            w.add(dixon_anderson_lhs(&s, &av, 40), dixon_anderson_rhs(&s, &av));
        }
        pass &= w.rel < if n == 1 { 1e-10 } else { 1e-7 };
        all.merge(w);
    }
    Ok(all.outcome(pass))
}

/// Monte Carlo estimate of the generalised interlaced integral with r
/// variables between consecutive a's and pair exponent 2/(r+1).
fn interlaced_mc(r: usize, s: &[f64], av: &[f64], samples: usize, rng: &mut SimRng) -> (f64, f64) {
    let n = av.len();
    let g = 2.0 / (r as f64 + 1.0);
    let mut vol = 1.0;
    for j in 0..n - 1 {
        let len = av[j] - av[j + 1];
        vol *= len.powi(r as i32) / (1..=r).map(|k| k as f64).product::<f64>();
    }
    let (mut m1, mut m2) = (0.0, 0.0);
    let mut lam = Vec::with_capacity(r * (n - 1));
    for _ in 0..samples {
        lam.clear();
        for j in 0..n - 1 {
            let mut block: Vec<f64> = (0..r).map(|_| rng.random_range(av[j + 1]..av[j])).collect();
            block.sort_by(|p, q| q.partial_cmp(p).unwrap());
            lam.extend(block);
        }
        let mut v = 1.0;
        for j in 0..lam.len() {
            for k in j + 1..lam.len() {
                v *= (lam[j] - lam[k]).powf(g);
            }
            for (p, &ap) in av.iter().enumerate() {
                v *= (lam[j] - ap).abs().powf(s[p] - 1.0);
            }
        }
        m1 += v;
        m2 += v * v;
    }
    let k = samples as f64;
    let mean = m1 / k;
    let se = ((m2 / k - mean * mean).max(0.0) / (k - 1.0)).sqrt();
    (vol * mean, vol * se)
}

/// Ratio of the integral at two end-point configurations against the ratio
/// of `∏_{j<k} (a_j - a_k)^{r(s_j + s_k - 2/(r+1))}`.
pub(crate) fn generalised_interlaced(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 2, 2, 3)?;
    let r = a.count("r", 2, 1, 3)?;
    let samples = a.count("samples", 1_000_000, 1000, 100_000_000)?;
    let s: Vec<f64> = [1.5, 2.0, 1.25][..n].to_vec();
    let a1: Vec<f64> = [1.0, 0.0, -1.5][..n].to_vec();
    let a2: Vec<f64> = [2.5, 0.3, -0.4][..n].to_vec();
    a.note("s", json!(s));
    a.note("a_first", json!(a1));
    a.note("a_second", json!(a2));
    let mut rng = seeded(seed);
    let (i1, e1) = interlaced_mc(r, &s, &a1, samples, &mut rng);
    let (i2, e2) = interlaced_mc(r, &s, &a2, samples, &mut rng);
    let g = 2.0 / (r as f64 + 1.0);
    let mut ln_pred = 0.0;
    for j in 0..n {
        for k in j + 1..n {
            let e = r as f64 * (s[j] + s[k] - g);
            ln_pred += e * ((a2[j] - a2[k]) / (a1[j] - a1[k])).ln();
        }
    }
    let pred = ln_pred.exp();
    let ratio = i2 / i1;
    let se = ratio * ((e1 / i1).powi(2) + (e2 / i2).powi(2)).sqrt();
    let z = (ratio - pred) / se;
    a.note("ratio_std_err", json!(se));
    a.note("z", json!(z));
    let mut w = Worst::new();
    w.add(ratio, pred);
    Ok(w.outcome(z.abs() < 4.0))
}

// ---- Delegated checks ----------------------------------------------------

pub(crate) fn form_factors(a: &Args) -> Result<Outcome> {
    let nmax = a.count("n_max", 6, 1, 12)?;
    let ks: Vec<f64> = (1..=10).map(|i| 0.6 * i as f64).collect();
    a.note("k", json!(ks));
    a.note("alpha", json!([0.0, 1.0]));
    let mut w = Worst::new();
    for n in 1..=nmax {
        for &k in &ks {
            w.add(sff_gue(n, k)?, sff_bruteforce(&EnsembleSpec::gue(n), k)?);
            for alpha in [0.0, 1.0] {
                w.add(sff_lue(n, alpha, k)?, sff_bruteforce(&EnsembleSpec::lue(n, alpha), k)?);
            }
        }
    }
    Ok(w.absolute(1e-6))
}

pub(crate) fn discrete_laguerre(a: &Args) -> Result<Outcome> {
    let nmax = a.count("n_max", 6, 1, 12)?;
    let (alphas, ss, xis) = ([0.0, 0.5, 2.0], [0.5, 1.0, 3.0], [0.5, 1.0]);
    a.note("alpha", json!(alphas));
    a.note("s", json!(ss));
    a.note("xi", json!(xis));
    let mut w = Worst::new();
    for n in 1..=nmax {
        for &al in &alphas {
            for &s in &ss {
                for &xi in &xis {
                    let d = dlue_genfn(n, al, s, c(xi))?.re;
                    let g = genfn_ue(WeightSpec::LaguerreBeta2 { a: al }, n, (s, f64::INFINITY), c(xi))?.re;
                    w.add(d, g);
                }
            }
        }
    }
    Ok(w.absolute(1e-10))
}

pub(crate) fn cue_average(a: &Args, continuous: bool) -> Result<Outcome> {
    let nmax = a.count("n_max", 4, 1, 4)?;
    let ss = [0.5, 1.0, 2.0];
    a.note("s", json!(ss));
    let mut w = Worst::new();
    for n in 1..=nmax {
        for &s in &ss {
            let q = cue_exp_cos_average(n, s, AverageMethod::Quadrature)?.value;
            let r = if continuous { bo_rhs_continuous(n, s, 1.0)? } else { bo_rhs_discrete(n, s, 1.0)? };
            w.add(q, r);
        }
    }
    Ok(w.absolute(1e-6))
}

pub(crate) fn bessel_discrete_continuous(a: &Args) -> Result<Outcome> {
    let (ns, ss, xis) = ([1usize, 2, 3], [0.5, 1.0, 2.0], [0.3, 1.0]);
    a.note("n", json!(ns));
    a.note("s", json!(ss));
    a.note("xi", json!(xis));
    let mut w = Worst::new();
    for &n in &ns {
        for &s in &ss {
            for &xi in &xis {
                w.add(bo_rhs_discrete(n, s, xi)?, bo_rhs_continuous(n, s, xi)?);
            }
        }
    }
    Ok(w.absolute(1e-8))
}

/// Error of O^±(2N+1) at πs/N against the sine± determinant; must fall below
/// 1e-3 by the largest N.
pub(crate) fn bulk_convergence(a: &Args) -> Result<Outcome> {
    let s = a.real("s", 1.0, |v| v > 0.0 && v <= 4.0)?;
    let xi = a.real("xi", 1.0, |v| (0.0..=1.0).contains(&v))?;
    let ns = [8usize, 16, 32, 64];
    a.note("n", json!(ns));
    let mut errs = serde_json::Map::new();
    let mut last: f64 = 0.0;
    for sign in [DetSign::Plus, DetSign::Minus] {
        let e: Vec<f64> = ns.iter().map(|&n| orthogonal_bulk_error(sign, n, s, xi)).collect::<Result<_>>()?;
        last = last.max(*e.last().unwrap());
        errs.insert(format!("{sign:?}"), json!(e));
    }
    a.note("errors", serde_json::Value::Object(errs));
    Ok(Outcome { lhs: super::Side::Value(last), rhs: super::Side::Value(1e-3), abs_err: Some(last), rel_err: None, pass: last < 1e-3 })
}

/// Slope of Var 𝒩_(0,φ) against log(Nφ) for the COE; the CUE slope is
/// reported alongside.
pub(crate) fn coe_variance_growth(a: &Args) -> Result<Outcome> {
    let phi = a.real("phi", PI / 2.0, |v| v > 0.0 && v < 2.0 * PI)?;
    let ns = [8usize, 16, 32, 64];
    a.note("n", json!(ns));
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64 * phi).ln()).collect();
    let coe: Vec<f64> = ns.iter().map(|&n| Ok(counting_stats(&coe_genfn_poly(n, phi)?).variance)).collect::<Result<_>>()?;
    let cue: Vec<f64> = ns.iter().map(|&n| Ok(counting_stats(&cue_genfn_poly(n, phi)?).variance)).collect::<Result<_>>()?;
    let slope = regression_slope(&x, &coe);
    a.note("cue_slope", json!(regression_slope(&x, &cue)));
    let want = 2.0 / (PI * PI);
    let mut w = Worst::new();
    w.add(slope, want);
    Ok(w.relative(0.1))
}

/// Bulk COE power spectrum on a grid; the smallest ω must be within 10% of
/// 1/(πω).
pub(crate) fn power_spectrum(a: &Args) -> Result<Outcome> {
    let omegas = [0.2, 0.5, 1.0, 2.0, 3.0];
    let pts = power_spectrum_coe_grid(&omegas)?;
    a.note("points", json!(pts));
    let first = &pts[0];
    let mut w = Worst::new();
    w.add(first.value, 1.0 / (PI * first.omega));
    let ok = pts.iter().all(|p| p.value > 0.0);
    let o = w.relative(0.1);
    Ok(Outcome { pass: o.pass && ok, ..o })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_identity_small_case() {
        // three points: both sides are 2(x3 - x1)
        let (l, r) = subset_sides(&[0.9, 0.1, -0.4]);
        assert!((l - 2.0 * (-0.4 - 0.9)).abs() < 1e-15);
        assert!((l - r).abs() < 1e-15);
    }

    #[test]
    fn signed_identity_holds_for_all_sizes() {
        let mut rng = seeded(2);
        for n in 1..=6 {
            for _ in 0..20 {
                let s: Vec<f64> = ordered_points(n, &mut rng).iter().map(|v| v + 1.5).collect();
                let (l, r) = signed_sides(&s);
                assert!((l - r).abs() < 1e-11 * r, "n={n}: {l} vs {r}");
            }
        }
    }

    #[test]
    fn dixon_anderson_beta_case() {
        let s = [1.0, 1.0];
        let av = [1.0, 0.0];
        assert!((dixon_anderson_lhs(&s, &av, 10) - 1.0).abs() < 1e-14);
        assert!((dixon_anderson_rhs(&s, &av) - 1.0).abs() < 1e-14);
        let s = [0.7, 2.3, 1.4];
        let av = [0.5, -0.6, -2.0];
        let (l, r) = (dixon_anderson_lhs(&s, &av, 40), dixon_anderson_rhs(&s, &av));
        assert!((l - r).abs() < 1e-9 * r, "{l} vs {r}");
    }

    #[test]
    fn parity_functions_recombine() {
        // E⁺ + E⁻ at ξ = 0 counts everything twice
        let p = [0.2, 0.5, 0.3];
        assert!((parity_genfn(&p, true, 0.0) + parity_genfn(&p, false, 0.0) - 2.0).abs() < 1e-15);
        assert!((parity_genfn(&p, false, 1.0) - 0.2).abs() < 1e-15);
        assert!((parity_genfn(&p, true, 1.0) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn interlaced_integral_matches_closed_form_at_r1() {
        // r = 1 is the closed-form case; compare the MC value itself
        let s = [1.5, 2.0, 1.25];
        let av = [1.0, 0.0, -1.5];
        let mut rng = seeded(5);
        let (v, se) = interlaced_mc(1, &s, &av, 200_000, &mut rng);
        let exact = dixon_anderson_rhs(&s, &av);
        assert!((v - exact).abs() < 4.0 * se, "{v} ± {se} vs {exact}");
    }
}
