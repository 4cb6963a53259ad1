use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rmt_core::ensembles::{sample_hermitian, sample_orthogonal_group, DetSign, EnsembleSpec, Spectrum, WeightSpec};
use rmt_core::formfactor::{sff_bruteforce, sff_gue, sff_lue};
use rmt_core::gap::{bruteforce_counts, coe_genfn_poly, cse_genfn_poly, cue_genfn_poly, genfn_poly, orthogonal_group_poly, GenFnPoly};
use rmt_core::identities::{lookup, registry, run_identity, IdentityReport, Method, Params, Side};
use rmt_core::rng::seeded;
use rmt_core::scaling::power_spectrum_coe_grid;
use rmt_core::Error;

#[derive(Parser)]
#[command(name = "rmt", version, about = "Random-matrix ensembles, gap probabilities and identity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one identity check, or `all` of them
    Verify {
        id: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte Carlo sample size (statistical checks only)
        #[arg(long)]
        samples: Option<usize>,
        /// Extra numeric parameter, `key=value`; repeatable
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        /// Write the reports as a JSON array to this file
        #[arg(long)]
        json: Option<PathBuf>,
        /// Keep wall-clock runtimes in the output (off by default so that
        /// output is reproducible)
        #[arg(long)]
        timings: bool,
    },
    /// Gap probabilities E(k; J) or the generating function on an interval
    Gap {
        #[arg(long, value_enum)]
        ensemble: GapEnsemble,
        #[arg(long)]
        n: usize,
        /// `a,b`; `pi` multiples are accepted, e.g. `0,pi` or `-pi/2,pi/2`
        #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
        interval: (f64, f64),
        #[arg(long, conflicts_with = "counts")]
        genfn: bool,
        #[arg(long)]
        counts: bool,
        /// ξ values for --genfn, comma separated
        #[arg(long, value_delimiter = ',', default_value = "1")]
        xi: Vec<f64>,
        /// Laguerre exponent, or the first Jacobi exponent
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        /// second Jacobi exponent
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta_exp: f64,
    },
    /// Spectral form factor on an equally spaced k-grid, with the kernel
    /// double-integral for comparison
    Sff {
        #[arg(long, value_enum)]
        ensemble: SffEnsemble,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        kmax: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Bulk COE power spectrum
    SpectrumPower {
        #[arg(long, value_delimiter = ',', required = true)]
        omega_grid: Vec<f64>,
    },
    /// Draw spectra; one CSV row per eigenvalue
    Sample {
        #[arg(long, value_enum)]
        ensemble: SampleEnsemble,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta_exp: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GapEnsemble {
    Gue,
    Goe,
    Gse,
    Lue,
    Jue,
    Cue,
    Coe,
    Cse,
    #[value(name = "o+")]
    OPlus,
    #[value(name = "o-")]
    OMinus,
}

#[derive(Clone, Copy, ValueEnum)]
enum SffEnsemble {
    Gue,
    Lue,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleEnsemble {
    Gue,
    Goe,
    Gse,
    Lue,
    Jue,
    Cue,
    Coe,
    Cse,
    #[value(name = "o+")]
    OPlus,
    #[value(name = "o-")]
    OMinus,
}

enum Failure {
    Usage(String),
    Run(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::InvalidParameter(_) | Error::UnknownIdentity(_) => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Run(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Failure {
        Failure::Run(e.to_string())
    }
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

/// A number, or `[c*]pi[/d]` with optional sign.
fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, t),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| format!("bad denominator in `{s}`"))?),
        None => (body, 1.0),
    };
    let mult = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(c) => c.trim_end_matches('*').parse::<f64>().map_err(|_| format!("bad multiple in `{s}`"))?,
        None => return Err(format!("`{s}` is not a number")),
    };
    Ok(sign * mult * PI / den)
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b, got `{s}`"))?;
    let (a, b) = (parse_real(a)?, parse_real(b)?);
    if !(a < b) {
        return Err(format!("interval needs a < b, got ({a}, {b})"));
    }
    Ok((a, b))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn stdout_csv() -> csv::Writer<std::io::Stdout> {
    csv::Writer::from_writer(std::io::stdout())
}

fn verify(
    id: &str,
    seed: u64,
    samples: Option<usize>,
    extra: &[(String, f64)],
    json: Option<PathBuf>,
    timings: bool,
) -> Result<(), Failure> {
    let ids: Vec<&str> = if id == "all" { registry().iter().map(|i| i.id).collect() } else { vec![lookup(id)?.id] };
    let mut reports: Vec<IdentityReport> = Vec::new();
    for &i in &ids {
        let mut p: Params = extra.iter().cloned().collect();
        if let Some(m) = samples {
            // with `all`, the sample size only goes to checks that draw samples
            if id != "all" || lookup(i)?.method == Method::Statistical {
                p.insert("samples".into(), m as f64);
            }
        }
        let mut r = run_identity(i, &p, seed)?;
        if !timings {
            r.runtime = None;
        }
        reports.push(r);
    }
    let mut w = stdout_csv();
    w.write_record(["identity_id", "method", "pass", "abs_err", "rel_err", "min_p_value", "seed", "runtime"])?;
    for r in &reports {
        let min_p = match &r.lhs {
            Side::Tests(t) => t.iter().map(|t| t.p_value).reduce(f64::min),
            Side::Value(_) => None,
        };
        let method = serde_json::to_value(r.method).map_err(|e| Failure::Run(e.to_string()))?;
        w.write_record([
            r.identity_id.clone(),
            method.as_str().unwrap_or_default().to_string(),
            r.pass.to_string(),
            opt(r.abs_err),
            opt(r.rel_err),
            opt(min_p),
            r.seed.to_string(),
            opt(r.runtime),
        ])?;
    }
    w.flush()?;
    if let Some(path) = json {
        let mut f = std::fs::File::create(&path)?;
        serde_json::to_writer_pretty(&mut f, &reports).map_err(|e| Failure::Run(e.to_string()))?;
        writeln!(f)?;
    }
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn gap_poly(ens: GapEnsemble, n: usize, (a, b): (f64, f64), alpha: f64, beta_exp: f64) -> Result<GenFnPoly, Failure> {
    use GapEnsemble::*;
    let width = b - a;
    let circle = |ok: bool| -> Result<(), Failure> {
        if ok {
            Ok(())
        } else {
            Err(Failure::Usage("circular interval must have length at most 2π".into()))
        }
    };
    let brute = |beta: f64, w: WeightSpec| -> Result<GenFnPoly, Failure> {
        let bf = bruteforce_counts(beta, w, n, (a, b))?;
        Ok(GenFnPoly { interval: (a, b), coefficients: bf.coefficients })
    };
    Ok(match ens {
        Gue => genfn_poly(WeightSpec::GaussianBeta2, n, (a, b))?,
        Lue => genfn_poly(WeightSpec::LaguerreBeta2 { a: alpha }, n, (a, b))?,
        Jue => genfn_poly(WeightSpec::JacobiBeta2 { a: alpha, b: beta_exp }, n, (a, b))?,
        Goe => brute(1.0, WeightSpec::GaussianBeta1)?,
        Gse => brute(4.0, WeightSpec::GaussianBeta2)?,
        Cue => {
            circle(width <= 2.0 * PI)?;
            cue_genfn_poly(n, width)?
        }
        Coe => {
            circle(width <= 2.0 * PI)?;
            coe_genfn_poly(n, width)?
        }
        Cse => {
            // rotation invariance: any arc of the same length
            circle(width <= 2.0 * PI)?;
            cse_genfn_poly(n, 0.5 * width)?
        }
        OPlus | OMinus => {
            if a != 0.0 || b > PI {
                return Err(Failure::Usage("orthogonal groups take an interval 0,θ with θ ≤ π".into()));
            }
            let sign = if matches!(ens, OPlus) { DetSign::Plus } else { DetSign::Minus };
            orthogonal_group_poly(n, sign, b)?
        }
    })
}

fn gap(
    ens: GapEnsemble,
    n: usize,
    interval: (f64, f64),
    genfn: bool,
    xi: &[f64],
    alpha: f64,
    beta_exp: f64,
) -> Result<(), Failure> {
    let g = gap_poly(ens, n, interval, alpha, beta_exp)?;
    let mut w = stdout_csv();
    if genfn {
        w.write_record(["xi", "genfn"])?;
        for &x in xi {
            w.write_record([num(x), num(g.eval_real(x))])?;
        }
    } else {
        w.write_record(["k", "probability"])?;
        for (k, &p) in g.coefficients.iter().enumerate() {
            w.write_record([k.to_string(), num(p)])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn sff(ens: SffEnsemble, n: usize, alpha: f64, kmax: f64, steps: usize) -> Result<(), Failure> {
    if !(kmax >= 0.0) || steps == 0 {
        return Err(Failure::Usage("need kmax ≥ 0 and steps ≥ 1".into()));
    }
    let spec = match ens {
        SffEnsemble::Gue => EnsembleSpec::gue(n),
        SffEnsemble::Lue => EnsembleSpec::lue(n, alpha),
    };
    let mut w = stdout_csv();
    w.write_record(["k", "S_exact", "S_oracle", "abs_err"])?;
    for i in 0..=steps {
        let k = kmax * i as f64 / steps as f64;
        let exact = match ens {
            SffEnsemble::Gue => sff_gue(n, k)?,
            SffEnsemble::Lue => sff_lue(n, alpha, k)?,
        };
        let oracle = sff_bruteforce(&spec, k)?;
        w.write_record([num(k), num(exact), num(oracle), num((exact - oracle).abs())])?;
    }
    w.flush()?;
    Ok(())
}

fn spectrum_power(omegas: &[f64]) -> Result<(), Failure> {
    let pts = power_spectrum_coe_grid(omegas)?;
    let mut w = stdout_csv();
    w.write_record(["omega", "S", "est_error"])?;
    for p in pts {
        w.write_record([num(p.omega), num(p.value), num(p.est_error)])?;
    }
    w.flush()?;
    Ok(())
}

fn sample(ens: SampleEnsemble, n: usize, count: usize, seed: u64, alpha: f64, beta_exp: f64) -> Result<(), Failure> {
    use SampleEnsemble::*;
    let spec = |beta: f64, weight: WeightSpec| EnsembleSpec::new(beta, n, weight);
    let spec = match ens {
        Gue => Some(EnsembleSpec::gue(n)),
        Goe => Some(EnsembleSpec::goe(n)),
        Gse => Some(EnsembleSpec::gse(n)),
        Lue => Some(spec(2.0, WeightSpec::LaguerreBeta2 { a: alpha })?),
        Jue => Some(spec(2.0, WeightSpec::JacobiBeta2 { a: alpha, b: beta_exp })?),
        Cue => Some(EnsembleSpec::cue(n)),
        Coe => Some(EnsembleSpec::coe(n)),
        Cse => Some(EnsembleSpec::cse(n)),
        OPlus | OMinus => None,
    };
    let mut rng = seeded(seed);
    let mut w = stdout_csv();
    w.write_record(["sample", "label", "value"])?;
    for s in 0..count {
        let sp: Spectrum = match (&spec, ens) {
            (Some(spec), _) => sample_hermitian(spec, &mut rng)?,
            (None, OPlus) => sample_orthogonal_group(n, DetSign::Plus, &mut rng)?,
            (None, _) => sample_orthogonal_group(n, DetSign::Minus, &mut rng)?,
        };
        for (l, v) in sp.values().iter().enumerate() {
            w.write_record([s.to_string(), (l + 1).to_string(), num(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { id, seed, samples, params, json, timings } => {
            let dup: BTreeMap<&str, usize> = params.iter().fold(BTreeMap::new(), |mut m, (k, _)| {
                *m.entry(k.as_str()).or_default() += 1;
                m
            });
            if let Some((k, _)) = dup.iter().find(|(_, &c)| c > 1) {
                return Err(Failure::Usage(format!("parameter `{k}` given twice")));
            }
            if id == "all" && !params.is_empty() {
                return Err(Failure::Usage("--param applies to a single identity, not `all`".into()));
            }
            if samples.is_some() && params.iter().any(|(k, _)| k == "samples") {
                return Err(Failure::Usage("use either --samples or --param samples=…".into()));
            }
            verify(&id, seed, samples, &params, json, timings)
        }
        Command::Gap { ensemble, n, interval, genfn, counts: _, xi, alpha, beta_exp } => {
            gap(ensemble, n, interval, genfn, &xi, alpha, beta_exp)
        }
        Command::Sff { ensemble, n, alpha, kmax, steps } => sff(ensemble, n, alpha, kmax, steps),
        Command::SpectrumPower { omega_grid } => spectrum_power(&omega_grid),
        Command::Sample { ensemble, n, count, seed, alpha, beta_exp } => sample(ensemble, n, count, seed, alpha, beta_exp),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
