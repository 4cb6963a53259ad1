//! Statistical checks: two samples of spectra compared by the test battery.

use num_complex::Complex64;
use serde_json::json;

use super::stats::normal_two_sided;
use super::stats::z_against;
use super::{draw, draw_metropolis, Args, Family, Outcome, Worst, DEFAULT_ALPHA};
use super::{stat_compare, StatKind, StatTest, ALL_KINDS};
use crate::ensembles::{
    sample_antisymmetric_gaussian, sample_bordered_gse, sample_bordered_gue, sample_circular, sample_hermitian,
    sample_orthogonal_group, sample_rank_one_wishart_pair, wishart_eigenvalues, DetSign, EnsembleSpec, Spectrum,
    WeightSpec,
};
use crate::error::Result;
use crate::formfactor::{dsff_ginue, mc_dsff_ginue};
use crate::gap::genfn_ue;
use crate::pointops::{abs_values, decimate, even, odd, power_angles, superpose, Decimation};
use crate::rng::{derive_seed, SimRng};
use crate::special::chi_moment;

fn herm(beta: f64, n: usize, weight: WeightSpec) -> EnsembleSpec {
    EnsembleSpec { beta, n_points: n, weight }
}

/// Draw both sides (independent streams) and run the full battery.
fn compare<F, G>(seed: u64, count: usize, lhs: F, rhs: G) -> Result<Vec<StatTest>>
where
    F: Fn(&mut SimRng) -> Result<Spectrum> + Sync,
    G: Fn(&mut SimRng) -> Result<Spectrum> + Sync,
{
    let l = draw(count, derive_seed(seed, "lhs"), lhs)?;
    let r = draw(count, derive_seed(seed, "rhs"), rhs)?;
    stat_compare(&l, &r, &ALL_KINDS, "")
}

fn label(tests: Vec<StatTest>, prefix: &str) -> Vec<StatTest> {
    tests
        .into_iter()
        .map(|mut t| {
            t.target = format!("{prefix}: {}", t.target);
            t
        })
        .collect()
}

fn half_circle_as_real(s: Spectrum) -> Result<Spectrum> {
    Spectrum::real(s.into_values())
}

pub(crate) fn alt_coe_pair(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 4, 1, 20)?;
    let k = a.samples()?;
    let t = compare(
        seed,
        k,
        |r| {
            let s = superpose(&sample_circular(1, n, r)?, &sample_circular(1, n, r)?)?;
            decimate(&s, Decimation::Alt, Some(r))
        },
        |r| sample_circular(2, n, r),
    )?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

pub(crate) fn alt_coe(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 3, 1, 20)?;
    let k = a.samples()?;
    let t = compare(
        seed,
        k,
        |r| decimate(&sample_circular(1, 2 * n, r)?, Decimation::Alt, Some(r)),
        |r| sample_circular(4, n, r),
    )?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// odd(OE_N ∪ OE_N) with one-sided Jacobi weights vs UE_N.
pub(crate) fn odd_jacobi_pair(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 3, 1, 20)?;
    let k = a.samples()?;
    let w1 = WeightSpec::JacobiBeta1 { a: 2.0, b: 1.0 };
    let w2 = WeightSpec::JacobiBeta2 { a: 2.0, b: 0.0 };
    a.note("weights", json!([w1, w2]));
    let t = compare(
        seed,
        k,
        |r| Ok(odd(&superpose(&sample_hermitian(&herm(1.0, n, w1), r)?, &sample_hermitian(&herm(1.0, n, w1), r)?)?)),
        |r| sample_hermitian(&herm(2.0, n, w2), r),
    )?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// odd(OE_{N-1} ∪ OE_N) with the uniform weight on (-1, 1) vs UE_N.
pub(crate) fn odd_uniform_pair(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 3, 2, 20)?;
    let k = a.samples()?;
    let w1 = WeightSpec::JacobiBeta1 { a: 1.0, b: 1.0 };
    let w2 = WeightSpec::JacobiBeta2 { a: 0.0, b: 0.0 };
    a.note("weights", json!([w1, w2]));
    let t = compare(
        seed,
        k,
        |r| {
            Ok(odd(&superpose(&sample_hermitian(&herm(1.0, n - 1, w1), r)?, &sample_hermitian(&herm(1.0, n, w1), r)?)?))
        },
        |r| sample_hermitian(&herm(2.0, n, w2), r),
    )?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// Even (or odd) labels of |COE_N| against the free angles of O^∓(N+1)
/// (O^± for odd labels). The opposite parity is run too and its smallest
/// p-value recorded.
pub(crate) fn coe_folded(a: &Args, seed: u64, even_labels: bool) -> Result<Outcome> {
    let n = a.count("n", 4, 2, 20)?;
    let k = a.samples()?;
    let sign = if even_labels { DetSign::Minus } else { DetSign::Plus };
    let group = move |r: &mut SimRng| half_circle_as_real(sample_orthogonal_group(n + 1, sign, r)?);
    let pick = |e: bool| {
        move |r: &mut SimRng| {
            let f = abs_values(&sample_circular(1, n, r)?)?;
            Ok(if e { even(&f) } else { odd(&f) })
        }
    };
    let t = compare(seed, k, pick(even_labels), group)?;
    if n % 2 == 0 {
        // for even N the other parity has the same size
        let other = compare(derive_seed(seed, "other"), k, pick(!even_labels), group)?;
        let p = other.iter().map(|t| t.p_value).fold(1.0, f64::min);
        a.note("opposite_parity_min_p", json!(p));
    }
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

pub(crate) fn folded_cue(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 4, 1, 20)?;
    let k = a.samples()?;
    let t = compare(
        seed,
        k,
        |r| abs_values(&sample_circular(2, n, r)?),
        |r| {
            let p = sample_orthogonal_group(n + 1, DetSign::Plus, r)?;
            let m = sample_orthogonal_group(n + 1, DetSign::Minus, r)?;
            half_circle_as_real(superpose(&p, &m)?)
        },
    )?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

pub(crate) fn cue_powers(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 5, 2, 20)?;
    let p = a.count("p", 2, 2, 5)?;
    if p > n {
        return Err(crate::Error::InvalidParameter(format!("p = {p} exceeds n = {n}")));
    }
    let k = a.samples()?;
    let sizes: Vec<usize> = (0..p).map(|j| (n + p - 1 - j) / p).collect();
    a.note("sizes", json!(sizes));
    let t = compare(
        seed,
        k,
        |r| power_angles(&sample_circular(2, n, r)?, p as i64),
        |r| {
            let mut s = Spectrum::empty(crate::ensembles::SupportKind::Circle);
            for &m in &sizes {
                if m > 0 {
                    s = superpose(&s, &sample_circular(2, m, r)?)?;
                }
            }
            Ok(s)
        },
    )?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// Circular β=2/(r+1) with (r+1)N points, one label class mod r+1 at random,
/// vs circular β=2(r+1) with N points.
pub(crate) fn circular_duality(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 3, 1, 6)?;
    let rs = a.counts("r", &[1, 2], 1, 3)?;
    let k = a.samples()?;
    let mut all = Vec::new();
    for &r in &rs {
        let bl = 2.0 / (r as f64 + 1.0);
        let br = 2.0 * (r as f64 + 1.0);
        let m = (r + 1) * n;
        let s = derive_seed(seed, &format!("r{r}"));
        let lhs = circular_sample(bl, m, k, derive_seed(s, "lhs"))?;
        let rhs = circular_sample(br, n, k, derive_seed(s, "rhs"))?;
        let mut rng = crate::rng::seeded(derive_seed(s, "decimate"));
        let lhs: Vec<Spectrum> =
            lhs.iter().map(|x| decimate(x, Decimation::AltR { r: r + 1 }, Some(&mut rng))).collect::<Result<_>>()?;
        all.extend(label(stat_compare(&lhs, &rhs, &ALL_KINDS, "")?, &format!("r={r}")));
    }
    Ok(Outcome::from_tests(all, DEFAULT_ALPHA))
}

fn circular_sample(beta: f64, n: usize, count: usize, seed: u64) -> Result<Vec<Spectrum>> {
    if beta == 1.0 || beta == 2.0 || beta == 4.0 {
        draw(count, seed, |r| sample_circular(beta as u32, n, r))
    } else {
        draw_metropolis(beta, WeightSpec::Circular, n, count, seed)
    }
}

/// Every (r+1)-th point of Jacobi β=2/(r+1) with (r+1)N+r points vs Jacobi
/// β=2(r+1) with shifted exponents.
pub(crate) fn jacobi_duality(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 2, 1, 4)?;
    let rs = a.counts("r", &[1, 2], 1, 3)?;
    let ja = a.real("a", 0.5, |v| v > -1.0)?;
    let jb = a.real("b", 0.0, |v| v > -1.0)?;
    let k = a.samples()?;
    let mut all = Vec::new();
    for &r in &rs {
        let rf = r as f64;
        let s = derive_seed(seed, &format!("r{r}"));
        let m = (r + 1) * n + r;
        let wl = WeightSpec::JacobiBeta2 { a: ja, b: jb };
        let wr = WeightSpec::JacobiBeta2 { a: (rf + 1.0) * ja + 2.0 * rf, b: (rf + 1.0) * jb + 2.0 * rf };
        let lhs = draw_metropolis(2.0 / (rf + 1.0), wl, m, k, derive_seed(s, "lhs"))?;
        let rhs = draw_metropolis(2.0 * (rf + 1.0), wr, n, k, derive_seed(s, "rhs"))?;
        let lhs: Vec<Spectrum> =
            lhs.iter().map(|x| decimate(x, Decimation::EveryR { r: r + 1, offset: 0 }, None)).collect::<Result<_>>()?;
        all.extend(label(stat_compare(&lhs, &rhs, &ALL_KINDS, "")?, &format!("r={r}")));
    }
    Ok(Outcome::from_tests(all, DEFAULT_ALPHA))
}

/// Positive eigenvalues of `iA` for antisymmetric Gaussian `A` of sizes N and
/// N+1 together: the two chiral ensembles making up |GUE_N|.
fn chiral_pair(n: usize, r: &mut SimRng) -> Result<Spectrum> {
    superpose(&sample_antisymmetric_gaussian(n, r)?, &sample_antisymmetric_gaussian(n + 1, r)?)
}

/// |GUE_N| vs the chiral superposition, plus the exact factorisation of the
/// (-s, s) generating function into two Laguerre ones on (0, s²).
pub(crate) fn folded_gue(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 5, 1, 20)?;
    let k = a.samples()?;
    let t = compare(seed, k, |r| abs_values(&sample_hermitian(&EnsembleSpec::gue(n), r)?), |r| chiral_pair(n, r))?;
    let mut w = Worst::new();
    let (lo, hi) = (n.div_ceil(2), n / 2);
    for s in [0.3, 0.8, 1.5] {
        for xi in [0.5, 1.0] {
            let x = Complex64::new(xi, 0.0);
            let lhs = genfn_ue(WeightSpec::GaussianBeta2, n, (-s, s), x)?.re;
            let mut rhs = genfn_ue(WeightSpec::LaguerreBeta2 { a: -0.5 }, lo, (0.0, s * s), x)?.re;
            if hi > 0 {
                rhs *= genfn_ue(WeightSpec::LaguerreBeta2 { a: 0.5 }, hi, (0.0, s * s), x)?.re;
            }
            w.add(lhs, rhs);
        }
    }
    a.note("genfn_rel_err", json!(w.rel));
    let mut o = Outcome::from_tests(t, DEFAULT_ALPHA);
    o.abs_err = Some(w.abs);
    o.rel_err = Some(w.rel);
    o.pass &= w.rel < 1e-9;
    Ok(o)
}

/// |GUE_N| vs square roots of LUE_{⌈N/2⌉, -1/2} ∪ LUE_{⌊N/2⌋, 1/2}, the
/// Laguerre sides drawn by Metropolis.
pub(crate) fn folded_gue_laguerre(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 4, 2, 10)?;
    let k = a.samples()?;
    let l = draw(k, derive_seed(seed, "lhs"), |r| abs_values(&sample_hermitian(&EnsembleSpec::gue(n), r)?))?;
    let lo = draw_metropolis(2.0, WeightSpec::LaguerreBeta2 { a: -0.5 }, n.div_ceil(2), k, derive_seed(seed, "minus"))?;
    let hi = draw_metropolis(2.0, WeightSpec::LaguerreBeta2 { a: 0.5 }, n / 2, k, derive_seed(seed, "plus"))?;
    let rhs: Vec<Spectrum> = lo
        .iter()
        .zip(&hi)
        .map(|(p, q)| superpose(&p.map_values(f64::sqrt)?, &q.map_values(f64::sqrt)?))
        .collect::<Result<_>>()?;
    let t = stat_compare(&l, &rhs, &ALL_KINDS, "")?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// Moments of |det H| over GUE_N (weight e^{-x²}) against the chi product
/// 2^{-N/2} ∏_j χ_{2⌊j/2⌋+1}.
pub(crate) fn gue_determinant(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 4, 1, 20)?;
    let k = a.samples()?;
    let dets = draw(k, seed, |r| {
        let s = sample_hermitian(&EnsembleSpec::gue(n), r)?;
        Spectrum::real(vec![s.values().iter().product::<f64>().abs()])
    })?;
    let d: Vec<f64> = dets.iter().map(|s| s.values()[0]).collect();
    let d2: Vec<f64> = d.iter().map(|v| v * v).collect();
    let dof: Vec<f64> = (1..=n).map(|j| (2 * (j / 2) + 1) as f64).collect();
    let m1 = 2f64.powf(-(n as f64) / 2.0) * dof.iter().map(|&f| chi_moment(f, 1.0)).product::<f64>();
    let m2 = 2f64.powf(-(n as f64)) * dof.iter().map(|&f| chi_moment(f, 2.0)).product::<f64>();
    a.note("exact_moments", json!([m1, m2]));
    let t = vec![z_against(&d, m1, "E|det H|")?, z_against(&d2, m2, "E det² H")?];
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// even(OE_N ∪ OE_{N+1}) vs UE_N for one of the paired weight families.
pub(crate) fn even_superposed(a: &Args, seed: u64, family: Family) -> Result<Outcome> {
    let n = a.count("n", 3, 1, 20)?;
    let k = a.samples()?;
    let (w1, w2) = match family {
        Family::Gaussian => (WeightSpec::GaussianBeta1, WeightSpec::GaussianBeta2),
        Family::Laguerre => (WeightSpec::LaguerreBeta1 { a: 1.0 }, WeightSpec::LaguerreBeta2 { a: 1.0 }),
        Family::Jacobi => (WeightSpec::JacobiBeta1 { a: 1.0, b: 2.0 }, WeightSpec::JacobiBeta2 { a: 1.0, b: 2.0 }),
        Family::Cauchy => {
            (WeightSpec::CauchyBeta1 { alpha: 1.0, n_ref: n }, WeightSpec::CauchyBeta2 { alpha: 1.0, n_ref: n })
        }
    };
    a.note("weights", json!([w1, w2]));
    let t = compare(
        seed,
        k,
        |r| {
            Ok(even(&superpose(
                &sample_hermitian(&herm(1.0, n, w1), r)?,
                &sample_hermitian(&herm(1.0, n + 1, w1), r)?,
            )?))
        },
        |r| sample_hermitian(&herm(2.0, n, w2), r),
    )?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// even |GOE_N| vs the chiral ensemble from an antisymmetric matrix of size N.
pub(crate) fn even_folded_goe(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 5, 2, 20)?;
    let k = a.samples()?;
    let t = compare(
        seed,
        k,
        |r| Ok(even(&abs_values(&sample_hermitian(&EnsembleSpec::goe(n), r)?)?)),
        |r| sample_antisymmetric_gaussian(n, r),
    )?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// |GUE_N| vs even |GOE_N| ∪ even |GOE_{N+1}|.
pub(crate) fn folded_gue_from_goe(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 4, 1, 20)?;
    let k = a.samples()?;
    let t = compare(
        seed,
        k,
        |r| abs_values(&sample_hermitian(&EnsembleSpec::gue(n), r)?),
        |r| {
            let p = even(&abs_values(&sample_hermitian(&EnsembleSpec::goe(n), r)?)?);
            let q = even(&abs_values(&sample_hermitian(&EnsembleSpec::goe(n + 1), r)?)?);
            superpose(&p, &q)
        },
    )?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// even(OE_N ∪ OE_N) vs UE_N, Laguerre weights x^0 e^{-x/2} and e^{-x}.
pub(crate) fn even_laguerre_pair(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 3, 1, 20)?;
    let k = a.samples()?;
    let w1 = WeightSpec::LaguerreBeta1 { a: 1.0 };
    let w2 = WeightSpec::LaguerreBeta2 { a: 0.0 };
    a.note("weights", json!([w1, w2]));
    let t = compare(
        seed,
        k,
        |r| Ok(even(&superpose(&sample_hermitian(&herm(1.0, n, w1), r)?, &sample_hermitian(&herm(1.0, n, w1), r)?)?)),
        |r| sample_hermitian(&herm(2.0, n, w2), r),
    )?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// Rank-one update of complex Wishart: even labels of A ∪ B vs LUE, and at
/// α = 0 the whole of A ∪ B against two real Wisharts.
pub(crate) fn rank_one_wishart(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 3, 1, 20)?;
    let alpha = a.count("alpha", 1, 0, 10)?;
    let b = a.real("b", 2.0, |v| v > 0.0)?;
    let k = a.samples()?;
    let union = move |r: &mut SimRng| {
        let (x, y) = sample_rank_one_wishart_pair(n + alpha, n, b, r)?;
        superpose(&x, &y)
    };
    let mut t = label(
        compare(seed, k, move |r| Ok(even(&union(r)?)), |r| sample_hermitian(&EnsembleSpec::lue(n, alpha as f64), r))?,
        "even labels",
    );
    let s0 = derive_seed(seed, "alpha0");
    let zero = move |r: &mut SimRng| {
        let (x, y) = sample_rank_one_wishart_pair(n, n, 2.0, r)?;
        superpose(&x, &y)
    };
    let real_pair = |r: &mut SimRng| {
        let p = Spectrum::real(wishart_eigenvalues(1, n + 1, n, r)?)?;
        let q = Spectrum::real(wishart_eigenvalues(1, n + 1, n, r)?)?;
        superpose(&p, &q)
    };
    t.extend(label(compare(s0, k, zero, real_pair)?, "alpha=0 union"));
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// Even labels of GOE_{2N+1} and of the bordered GSE matrix vs GSE_N; the
/// full bordered spectrum vs GOE_{2N+1}.
pub(crate) fn even_goe_gse(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 2, 1, 10)?;
    let b = a.real("b", 0.5, |v| v > 0.0)?;
    let k = a.samples()?;
    let gse = move |r: &mut SimRng| sample_hermitian(&EnsembleSpec::gse(n), r);
    let goe = move |r: &mut SimRng| sample_hermitian(&EnsembleSpec::goe(2 * n + 1), r);
    let mut t = label(compare(derive_seed(seed, "goe"), k, move |r| Ok(even(&goe(r)?)), gse)?, "even GOE");
    t.extend(label(
        compare(derive_seed(seed, "bordered"), k, move |r| Ok(even(&sample_bordered_gse(n, b, r)?)), gse)?,
        "even bordered",
    ));
    t.extend(label(
        compare(derive_seed(seed, "full"), k, move |r| sample_bordered_gse(n, b, r), goe)?,
        "full bordered",
    ));
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// Bordered GUE: even labels vs GUE_N, and the full spectrum vs
/// GOE_N ∪ GOE_{N+1}.
pub(crate) fn bordered_gue(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 3, 1, 10)?;
    let b = a.real("b", 0.5, |v| v > 0.0)?;
    let k = a.samples()?;
    let mut t = label(
        compare(
            derive_seed(seed, "even"),
            k,
            move |r| Ok(even(&sample_bordered_gue(n, b, r)?.0)),
            move |r| sample_hermitian(&EnsembleSpec::gue(n), r),
        )?,
        "even labels",
    );
    t.extend(label(
        compare(
            derive_seed(seed, "full"),
            k,
            move |r| Ok(sample_bordered_gue(n, b, r)?.0),
            move |r| {
                superpose(
                    &sample_hermitian(&EnsembleSpec::goe(n), r)?,
                    &sample_hermitian(&EnsembleSpec::goe(n + 1), r)?,
                )
            },
        )?,
        "full spectrum",
    ));
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}

/// Monte Carlo dissipative form factor of the scaled Ginibre ensemble
/// against the closed form, one z-test per |T|.
pub(crate) fn ginibre_form_factor(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 8, 1, 40)?;
    let k = a.samples()?;
    let ts = [1.0, 2.0, 4.0];
    a.note("t", json!(ts));
    let mut tests = Vec::new();
    let mut w = Worst::new();
    for (i, &t) in ts.iter().enumerate() {
        // a complex T checks rotation invariance as well
        let tc = Complex64::from_polar(t, 0.3 * i as f64);
        let mc = mc_dsff_ginue(n, tc, k, crate::rng::substream(seed, i as u64))?;
        let exact = dsff_ginue(n, t)?;
        w.add(mc.value, exact);
        let z = (mc.value - exact) / mc.std_err;
        tests.push(StatTest {
            kind: StatKind::MomentZTest,
            target: format!("|T| = {t}"),
            statistic: z,
            n_a: k,
            n_b: 0,
            p_value: normal_two_sided(z),
        });
    }
    let mut o = Outcome::from_tests(tests, DEFAULT_ALPHA);
    o.rel_err = Some(w.rel);
    Ok(o)
}

/// Negative control: CUE_4 against GUE_4 mapped onto the circle.
pub(crate) fn cue_vs_mapped_gue(a: &Args, seed: u64) -> Result<Outcome> {
    let n = a.count("n", 4, 1, 20)?;
    let k = a.samples()?;
    let t = compare(
        seed,
        k,
        |r| sample_circular(2, n, r),
        |r| {
            let h = sample_hermitian(&EnsembleSpec::gue(n), r)?;
            Spectrum::circular(h.values().iter().map(|x| 2.0 * x.atan()).collect())
        },
    )?;
    Ok(Outcome::from_tests(t, DEFAULT_ALPHA))
}
