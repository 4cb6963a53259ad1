//! Two-sample goodness-of-fit battery for spectra: chi-square on interval
//! counts, Kolmogorov–Smirnov on extreme ordered values, z-tests on the first
//! two moments of the linear statistic Σx.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::ensembles::Spectrum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    TwoSampleCountsChi2,
    KsOnOrderedStatistic,
    MomentZTest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatTest {
    pub kind: StatKind,
    /// what was compared
    pub target: String,
    pub statistic: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub p_value: f64,
}

pub const DEFAULT_ALPHA: f64 = 0.001;

/// Bonferroni: every p-value at least α / (number of tests).
pub fn bonferroni_pass(tests: &[StatTest], alpha: f64) -> bool {
    let m = tests.len().max(1) as f64;
    tests.iter().all(|t| t.p_value >= alpha / m)
}

pub(crate) fn normal_two_sided(z: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).unwrap();
    (2.0 * (1.0 - n.cdf(z.abs()))).clamp(0.0, 1.0)
}

/// Chi-square test of homogeneity on two samples of non-negative counts.
/// Adjacent categories are merged until every expected cell is at least 5.
pub fn chi2_counts(a: &[usize], b: &[usize], target: &str) -> Result<StatTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientSamples("empty count sample".into()));
    }
    let top = a.iter().chain(b).copied().max().unwrap();
    let mut ha = vec![0.0; top + 1];
    let mut hb = vec![0.0; top + 1];
    a.iter().for_each(|&c| ha[c] += 1.0);
    b.iter().for_each(|&c| hb[c] += 1.0);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let tot = na + nb;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for k in 0..=top {
        ca += ha[k];
        cb += hb[k];
        let col = ca + cb;
        if col * na.min(nb) / tot >= 5.0 {
            bins.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => bins.push((ca, cb)),
        }
    }
    if bins.len() < 2 {
        return Err(Error::InsufficientSamples(format!("{target}: fewer than two bins after pooling")));
    }
    let mut stat = 0.0;
    for &(oa, ob) in &bins {
        let col = oa + ob;
        let ea = col * na / tot;
        let eb = col * nb / tot;
        stat += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
    }
    let df = (bins.len() - 1) as f64;
    let p = 1.0 - ChiSquared::new(df).unwrap().cdf(stat);
    Ok(StatTest {
        kind: StatKind::TwoSampleCountsChi2,
        target: target.to_string(),
        statistic: stat,
        n_a: a.len(),
        n_b: b.len(),
        p_value: p.clamp(0.0, 1.0),
    })
}

/// `Q(λ) = 2 Σ (-1)^{k-1} e^{-2k²λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test, asymptotic p-value with Stephens'
/// small-sample correction.
pub fn ks_two_sample(a: &[f64], b: &[f64], target: &str) -> Result<StatTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientSamples("empty KS sample".into()));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.partial_cmp(q).unwrap());
    y.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let sq = ne.sqrt();
    let p = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    Ok(StatTest { kind: StatKind::KsOnOrderedStatistic, target: target.to_string(), statistic: d, n_a: n, n_b: m, p_value: p })
}

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// z-test for equal means of two samples.
pub fn z_two_sample(a: &[f64], b: &[f64], target: &str) -> Result<StatTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientSamples("z-test needs two samples of size ≥ 2".into()));
    }
    let (ma, sa) = mean_and_se(a);
    let (mb, sb) = mean_and_se(b);
    let se = sa.hypot(sb);
    let z = if se > 0.0 { (ma - mb) / se } else if ma == mb { 0.0 } else { f64::INFINITY };
    Ok(StatTest { kind: StatKind::MomentZTest, target: target.to_string(), statistic: z, n_a: a.len(), n_b: b.len(), p_value: normal_two_sided(z) })
}

/// z-test of a sample mean against a known value.
pub fn z_against(a: &[f64], exact: f64, target: &str) -> Result<StatTest> {
    if a.len() < 2 {
        return Err(Error::InsufficientSamples("z-test needs at least two values".into()));
    }
    let (m, se) = mean_and_se(a);
    let z = (m - exact) / se;
    Ok(StatTest { kind: StatKind::MomentZTest, target: target.to_string(), statistic: z, n_a: a.len(), n_b: 0, p_value: normal_two_sided(z) })
}

/// Counting interval between the 30% and 80% quantiles of the pooled points.
fn pooled_interval(a: &[Spectrum], b: &[Spectrum]) -> (f64, f64) {
    let mut all: Vec<f64> = a.iter().chain(b).flat_map(|s| s.values().iter().copied()).collect();
    all.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let q = |t: f64| all[((all.len() - 1) as f64 * t).round() as usize];
    (q(0.3), q(0.8))
}

/// Run the requested test kinds on two samples of spectra.
pub fn stat_compare(a: &[Spectrum], b: &[Spectrum], kinds: &[StatKind], label: &str) -> Result<Vec<StatTest>> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientSamples(format!("{label}: need at least two spectra per side")));
    }
    if a.iter().chain(b).any(|s| s.is_empty()) {
        return Err(Error::InsufficientSamples(format!("{label}: empty spectrum")));
    }
    let pre = |t: &str| if label.is_empty() { t.to_string() } else { format!("{label}: {t}") };
    let mut out = Vec::new();
    for kind in kinds {
        match kind {
            StatKind::TwoSampleCountsChi2 => {
                let (lo, hi) = pooled_interval(a, b);
                let ca: Vec<usize> = a.iter().map(|s| s.count_in(lo, hi)).collect();
                let cb: Vec<usize> = b.iter().map(|s| s.count_in(lo, hi)).collect();
                out.push(chi2_counts(&ca, &cb, &pre(&format!("count in ({lo:.4}, {hi:.4})")))?);
            }
            StatKind::KsOnOrderedStatistic => {
                let top = |v: &[Spectrum]| v.iter().map(|s| s.values()[0]).collect::<Vec<_>>();
                out.push(ks_two_sample(&top(a), &top(b), &pre("largest value"))?);
                if a[0].len() > 1 || b[0].len() > 1 {
                    let bot = |v: &[Spectrum]| v.iter().map(|s| *s.values().last().unwrap()).collect::<Vec<_>>();
                    out.push(ks_two_sample(&bot(a), &bot(b), &pre("smallest value"))?);
                }
            }
            StatKind::MomentZTest => {
                let lin = |v: &[Spectrum], p: i32| v.iter().map(|s| s.values().iter().sum::<f64>().powi(p)).collect::<Vec<_>>();
                out.push(z_two_sample(&lin(a, 1), &lin(b, 1), &pre("mean of Σx"))?);
                out.push(z_two_sample(&lin(a, 2), &lin(b, 2), &pre("mean of (Σx)²"))?);
            }
        }
    }
    Ok(out)
}

pub const ALL_KINDS: [StatKind; 3] = [StatKind::TwoSampleCountsChi2, StatKind::KsOnOrderedStatistic, StatKind::MomentZTest];
