//! Identity registry. Every check runs through [`run_identity`], which
//! returns an [`IdentityReport`]; checks are exact (two closed evaluations),
//! oracle (an evaluation against direct quadrature or an independent route)
//! or statistical (two-sample tests on sampled spectra).

mod checks;
mod sampled;
pub mod stats;

pub use stats::{bonferroni_pass, stat_compare, StatKind, StatTest, ALL_KINDS, DEFAULT_ALPHA};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::ensembles::{sample_metropolis, MCConfig, Spectrum, WeightSpec};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded, substream, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Oracle,
    Statistical,
}

/// One side of a check: a number, or the battery of tests that was run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Side {
    Value(f64),
    Tests(Vec<StatTest>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity_id: String,
    pub method: Method,
    pub parameters: BTreeMap<String, Value>,
    pub lhs: Side,
    pub rhs: Side,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub pass: bool,
    pub seed: u64,
    /// wall-clock seconds
    pub runtime: Option<f64>,
}

/// Numeric parameters keyed by name; `samples` sets the Monte Carlo size.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy)]
pub struct IdentityInfo {
    pub id: &'static str,
    pub method: Method,
    pub summary: &'static str,
}

const fn info(id: &'static str, method: Method, summary: &'static str) -> IdentityInfo {
    IdentityInfo { id, method, summary }
}

use Method::{Exact, Oracle, Statistical};

static REGISTRY: [IdentityInfo; 44] = [
    info("I-2.0c", Statistical, "alt(COE_N ∪ COE_N) vs CUE_N"),
    info("I-2.0e", Exact, "CUE generating function = product of the two COE parity functions"),
    info("I-2.26a", Statistical, "odd(OE_N ∪ OE_N) vs UE_N, one-sided Jacobi weights"),
    info("I-2.26b", Statistical, "odd(OE_{N-1} ∪ OE_N) vs UE_N, uniform weight on (-1, 1)"),
    info("I-2.27", Statistical, "even |COE_N| vs O^-(N+1)"),
    info("I-2.27+", Statistical, "odd |COE_N| vs O^+(N+1)"),
    info("I-2.30", Oracle, "COE parity functions vs O^- generating functions"),
    info("I-2.30a", Oracle, "COE parity functions vs O^+ generating functions"),
    info("I-2.31", Oracle, "COE generating function from orthogonal groups vs direct quadrature"),
    info("I-2.31A", Oracle, "orthogonal-group generating functions converge to the sine± determinants"),
    info("I-2.31a", Exact, "CUE generating function = O^+(N+1) · O^-(N+1)"),
    info("I-2.31b", Statistical, "|CUE_N| vs O^+(N+1) ∪ O^-(N+1)"),
    info("I-2.31c", Statistical, "(CUE_N)^p vs superposed smaller CUEs"),
    info("I-3.111e", Statistical, "alt_{r+1} of circular β=2/(r+1) vs circular β=2(r+1)"),
    info("I-3.2d", Oracle, "bulk COE power spectrum and its small-ω asymptote"),
    info("I-3.u.2", Statistical, "every (r+1)-th Jacobi β=2/(r+1) point vs Jacobi β=2(r+1)"),
    info("I-5.0", Statistical, "|GUE_N| vs chiral superposition, plus the generating-function product"),
    info("I-5.0x", Statistical, "|GUE_N| vs square roots of two Laguerre ensembles (Metropolis)"),
    info("I-5.0y", Statistical, "|det H| moments over GUE_N vs chi products"),
    info("I-5.3-C", Statistical, "even(OE_N ∪ OE_{N+1}) vs UE_N, Cauchy weights"),
    info("I-5.3-G", Statistical, "even(OE_N ∪ OE_{N+1}) vs UE_N, Gaussian weights"),
    info("I-5.3-J", Statistical, "even(OE_N ∪ OE_{N+1}) vs UE_N, Jacobi weights"),
    info("I-5.3-L", Statistical, "even(OE_N ∪ OE_{N+1}) vs UE_N, Laguerre weights"),
    info("I-5.3a", Exact, "Vandermonde subset-sum identity at random points"),
    info("I-5.3a+", Exact, "signed Vandermonde sum identity at random points"),
    info("I-5.3a+1", Statistical, "even |GOE_N| vs chiral GUE"),
    info("I-5.3a+2", Statistical, "|GUE_N| vs even |GOE_N| ∪ even |GOE_{N+1}|"),
    info("I-5.3b", Oracle, "gap probabilities of UE_N from those of OE_N and OE_{N+1}"),
    info("I-5.3x", Statistical, "even(OE_N ∪ OE_N) vs UE_N, Laguerre weights"),
    info("I-5.3z", Oracle, "symmetric-interval GOE gaps vs Laguerre gaps"),
    info("I-5.5c", Exact, "growth rate of the COE counting variance"),
    info("I-7.4b", Statistical, "rank-one Wishart update: even labels vs LUE"),
    info("I-8.1", Statistical, "alt(COE_2N) vs CSE_N"),
    info("I-8.140a", Oracle, "CSE generating function from orthogonal groups vs direct quadrature"),
    info("I-D11", Oracle, "discrete vs continuous Bessel determinants"),
    info("I-D5", Oracle, "discrete Laguerre determinant vs LUE gap generating function"),
    info("I-D7", Oracle, "CUE exponential average vs discrete Bessel determinant"),
    info("I-D9", Oracle, "CUE exponential average vs continuous Bessel determinant"),
    info("I-DA", Oracle, "interlaced-region integral closed form"),
    info("I-L2-G", Statistical, "even(GOE_{2N+1}) vs GSE_N, plus the bordered realisation"),
    info("I-LR", Oracle, "generalised interlaced integral: dependence on the end points"),
    info("I-P2.3", Statistical, "bordered GUE: even labels vs GUE_N"),
    info("I-P4.1", Oracle, "GUE and LUE form factors vs kernel evaluation"),
    info("I-Sa1.5", Statistical, "Ginibre dissipative form factor vs Monte Carlo"),
];

/// Deliberately broken checks, one per method class; each must fail.
pub const NEGATIVE_CONTROLS: [&str; 3] = ["NC-exact", "NC-oracle", "NC-statistical"];

/// Registered identities sorted by id.
pub fn registry() -> &'static [IdentityInfo] {
    &REGISTRY
}

pub fn lookup(id: &str) -> Result<IdentityInfo> {
    if let Some(i) = REGISTRY.iter().find(|i| i.id == id) {
        return Ok(*i);
    }
    match id {
        "NC-exact" => Ok(info("NC-exact", Exact, "I-2.31a with ξ shifted by 0.1 on one side")),
        "NC-oracle" => Ok(info("NC-oracle", Oracle, "I-2.31 with ξ shifted by 0.1 on one side")),
        "NC-statistical" => Ok(info("NC-statistical", Statistical, "CUE_4 vs GUE_4 mapped by θ = 2 arctan x")),
        _ => Err(Error::UnknownIdentity(id.to_string())),
    }
}

/// Run one identity. The generator stream is derived from `(seed, id)`.
pub fn run_identity(id: &str, params: &Params, seed: u64) -> Result<IdentityReport> {
    let meta = lookup(id)?;
    let args = Args::new(params);
    let own = derive_seed(seed, id);
    let start = Instant::now();
    let out = dispatch(id, &args, own)?;
    let runtime = start.elapsed().as_secs_f64();
    let parameters = args.finish()?;
    Ok(IdentityReport {
        identity_id: id.to_string(),
        method: meta.method,
        parameters,
        lhs: out.lhs,
        rhs: out.rhs,
        abs_err: out.abs_err,
        rel_err: out.rel_err,
        pass: out.pass,
        seed,
        runtime: Some(runtime),
    })
}

fn dispatch(id: &str, a: &Args, seed: u64) -> Result<Outcome> {
    match id {
        "I-2.0c" => sampled::alt_coe_pair(a, seed),
        "I-2.0e" => checks::cue_parity_product(a),
        "I-2.26a" => sampled::odd_jacobi_pair(a, seed),
        "I-2.26b" => sampled::odd_uniform_pair(a, seed),
        "I-2.27" => sampled::coe_folded(a, seed, true),
        "I-2.27+" => sampled::coe_folded(a, seed, false),
        "I-2.30" => checks::coe_parity_vs_group(a, false),
        "I-2.30a" => checks::coe_parity_vs_group(a, true),
        "I-2.31" => checks::coe_formula(a),
        "I-2.31A" => checks::bulk_convergence(a),
        "I-2.31a" => checks::cue_group_product(a),
        "I-2.31b" => sampled::folded_cue(a, seed),
        "I-2.31c" => sampled::cue_powers(a, seed),
        "I-3.111e" => sampled::circular_duality(a, seed),
        "I-3.2d" => checks::power_spectrum(a),
        "I-3.u.2" => sampled::jacobi_duality(a, seed),
        "I-5.0" => sampled::folded_gue(a, seed),
        "I-5.0x" => sampled::folded_gue_laguerre(a, seed),
        "I-5.0y" => sampled::gue_determinant(a, seed),
        "I-5.3-C" => sampled::even_superposed(a, seed, Family::Cauchy),
        "I-5.3-G" => sampled::even_superposed(a, seed, Family::Gaussian),
        "I-5.3-J" => sampled::even_superposed(a, seed, Family::Jacobi),
        "I-5.3-L" => sampled::even_superposed(a, seed, Family::Laguerre),
        "I-5.3a" => checks::subset_vandermonde(a, seed),
        "I-5.3a+" => checks::signed_vandermonde(a, seed),
        "I-5.3a+1" => sampled::even_folded_goe(a, seed),
        "I-5.3a+2" => sampled::folded_gue_from_goe(a, seed),
        "I-5.3b" => checks::superposed_gaps(a),
        "I-5.3x" => sampled::even_laguerre_pair(a, seed),
        "I-5.3z" => checks::folded_gaps(a),
        "I-5.5c" => checks::coe_variance_growth(a),
        "I-7.4b" => sampled::rank_one_wishart(a, seed),
        "I-8.1" => sampled::alt_coe(a, seed),
        "I-8.140a" => checks::cse_formula(a),
        "I-D11" => checks::bessel_discrete_continuous(a),
        "I-D5" => checks::discrete_laguerre(a),
        "I-D7" => checks::cue_average(a, false),
        "I-D9" => checks::cue_average(a, true),
        "I-DA" => checks::dixon_anderson(a, seed),
        "I-L2-G" => sampled::even_goe_gse(a, seed),
        "I-LR" => checks::generalised_interlaced(a, seed),
        "I-P2.3" => sampled::bordered_gue(a, seed),
        "I-P4.1" => checks::form_factors(a),
        "I-Sa1.5" => sampled::ginibre_form_factor(a, seed),
        "NC-exact" => checks::cue_group_product_shifted(a),
        "NC-oracle" => checks::coe_formula_shifted(a),
        "NC-statistical" => sampled::cue_vs_mapped_gue(a, seed),
        _ => Err(Error::UnknownIdentity(id.to_string())),
    }
}

/// Run every registered identity (sorted by id) with the same parameters.
pub fn run_all(params: &Params, seed: u64) -> Result<Vec<IdentityReport>> {
    REGISTRY.iter().map(|i| run_identity(i.id, params, seed)).collect()
}

/// Run one negative control per method class.
pub fn run_negative_controls(params: &Params, seed: u64) -> Result<Vec<IdentityReport>> {
    NEGATIVE_CONTROLS.iter().map(|id| run_identity(id, params, seed)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Family {
    Gaussian,
    Laguerre,
    Jacobi,
    Cauchy,
}

pub(crate) struct Outcome {
    pub(crate) lhs: Side,
    pub(crate) rhs: Side,
    pub(crate) abs_err: Option<f64>,
    pub(crate) rel_err: Option<f64>,
    pub(crate) pass: bool,
}

impl Outcome {
    pub(crate) fn from_tests(tests: Vec<StatTest>, alpha: f64) -> Outcome {
        let pass = bonferroni_pass(&tests, alpha);
        let floor = alpha / tests.len().max(1) as f64;
        Outcome { lhs: Side::Tests(tests), rhs: Side::Value(floor), abs_err: None, rel_err: None, pass }
    }
}

/// Largest discrepancy seen over a grid of evaluations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Worst {
    pub(crate) lhs: f64,
    pub(crate) rhs: f64,
    pub(crate) abs: f64,
    pub(crate) rel: f64,
}

impl Worst {
    pub(crate) fn new() -> Worst {
        Worst { lhs: f64::NAN, rhs: f64::NAN, abs: 0.0, rel: 0.0 }
    }

    pub(crate) fn add(&mut self, lhs: f64, rhs: f64) {
        let abs = (lhs - rhs).abs();
        let rel = if rhs != 0.0 { abs / rhs.abs() } else if abs == 0.0 { 0.0 } else { f64::INFINITY };
        let worse = !(rel <= self.rel) || self.lhs.is_nan();
        if worse {
            self.lhs = lhs;
            self.rhs = rhs;
        }
        self.abs = self.abs.max(abs);
        self.rel = if rel.is_nan() { f64::INFINITY } else { self.rel.max(rel) };
    }

    pub(crate) fn merge(&mut self, o: Worst) {
        if o.rel > self.rel || self.lhs.is_nan() {
            self.lhs = o.lhs;
            self.rhs = o.rhs;
        }
        self.abs = self.abs.max(o.abs);
        self.rel = self.rel.max(o.rel);
    }

    pub(crate) fn relative(self, tol: f64) -> Outcome {
        self.outcome(self.rel < tol)
    }

    pub(crate) fn absolute(self, tol: f64) -> Outcome {
        self.outcome(self.abs < tol)
    }

    pub(crate) fn outcome(self, pass: bool) -> Outcome {
        Outcome {
            lhs: Side::Value(self.lhs),
            rhs: Side::Value(self.rhs),
            abs_err: Some(self.abs),
            rel_err: Some(self.rel),
            pass,
        }
    }
}

/// Parameter access with defaults; records what was used for the report and
/// rejects keys no check asked for.
pub(crate) struct Args<'a> {
    given: &'a Params,
    record: RefCell<BTreeMap<String, Value>>,
    read: RefCell<BTreeSet<String>>,
}

impl<'a> Args<'a> {
    fn new(given: &'a Params) -> Args<'a> {
        Args { given, record: RefCell::new(BTreeMap::new()), read: RefCell::new(BTreeSet::new()) }
    }

    fn raw(&self, key: &str) -> Option<f64> {
        self.read.borrow_mut().insert(key.to_string());
        self.given.get(key).copied()
    }

    pub(crate) fn real(&self, key: &str, default: f64, ok: impl Fn(f64) -> bool) -> Result<f64> {
        let v = self.raw(key).unwrap_or(default);
        if !v.is_finite() || !ok(v) {
            return Err(Error::InvalidParameter(format!("{key} = {v} outside its domain")));
        }
        self.note(key, json!(v));
        Ok(v)
    }

    pub(crate) fn count(&self, key: &str, default: usize, lo: usize, hi: usize) -> Result<usize> {
        let v = self.raw(key).unwrap_or(default as f64);
        if v.fract() != 0.0 || v < lo as f64 || v > hi as f64 {
            return Err(Error::InvalidParameter(format!("{key} = {v} must be an integer in [{lo}, {hi}]")));
        }
        self.note(key, json!(v as usize));
        Ok(v as usize)
    }

    /// A single value when given, otherwise the default list.
    pub(crate) fn counts(&self, key: &str, default: &[usize], lo: usize, hi: usize) -> Result<Vec<usize>> {
        match self.raw(key) {
            Some(_) => Ok(vec![self.count(key, 0, lo, hi)?]),
            None => {
                self.note(key, json!(default));
                Ok(default.to_vec())
            }
        }
    }

    pub(crate) fn samples(&self) -> Result<usize> {
        self.count("samples", 100_000, 100, 100_000_000)
    }

    pub(crate) fn note(&self, key: &str, v: Value) {
        self.record.borrow_mut().insert(key.to_string(), v);
    }

    fn finish(self) -> Result<BTreeMap<String, Value>> {
        let read = self.read.into_inner();
        if let Some(k) = self.given.keys().find(|k| !read.contains(*k)) {
            return Err(Error::InvalidParameter(format!("parameter `{k}` is not used by this identity")));
        }
        Ok(self.record.into_inner())
    }
}

const CHUNK: usize = 1000;

/// `count` independent draws, generated in parallel chunks with one
/// substream of `seed` per chunk.
pub(crate) fn draw<F>(count: usize, seed: u64, f: F) -> Result<Vec<Spectrum>>
where
    F: Fn(&mut SimRng) -> Result<Spectrum> + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let parts: Result<Vec<Vec<Spectrum>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seeded(substream(seed, c as u64));
            let m = CHUNK.min(count - c * CHUNK);
            (0..m).map(|_| f(&mut rng)).collect()
        })
        .collect();
    Ok(parts?.concat())
}

/// Sweeps between retained Metropolis states, and sweeps discarded first.
const THIN_SWEEPS: usize = 100;
const BURN_SWEEPS: usize = 5000;

/// `count` samples from many short independent Metropolis chains.
pub(crate) fn draw_metropolis(beta: f64, weight: WeightSpec, n: usize, count: usize, seed: u64) -> Result<Vec<Spectrum>> {
    let chains = count.div_ceil(CHUNK).max(1);
    let parts: Result<Vec<Vec<Spectrum>>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let per = count / chains + usize::from(c < count % chains);
            let mut cfg = MCConfig::for_points(n, substream(seed, c as u64));
            cfg.n_samples = per;
            cfg.burn_in = BURN_SWEEPS * n;
            cfg.thinning = THIN_SWEEPS * n;
            Ok(sample_metropolis(beta, weight, n, cfg)?.collect())
        })
        .collect();
    Ok(parts?.concat())
}
