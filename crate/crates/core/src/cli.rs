//! Command surface of the `bidisc` binary.
//!
//! Every command is a library function returning a [`CommandOutput`], so it
//! can be driven in-process. [`run`] adds argument parsing and file I/O.
//!
//! Output routing: an artifact (signing or factorization file) goes to
//! `--output` when given, else to stdout. The report goes to stdout when
//! there is no artifact on stdout, else to stderr. `--json` selects the full
//! JSON report over a one-line-per-field summary.
//!
//! Exit codes: 0 success with the bound met, 2 ran but the bound was not
//! met, 3 input error, 4 construction failure.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::census::{count_switchers, s2_via_trace};
use crate::cyclic::{factorize_high_disc, CyclicOptions};
use crate::dichotomy::{classify, route, Branch, ClassifyOptions, DichotomyParams, Outcome};
use crate::error::{Error, Result};
use crate::io::{parse_factorization, parse_signing, write_crown_cache, write_factorization, write_signing};
use crate::oracle::{
    best_factorization_bruteforce, crown_factorization_search, nearest_one_sided_bruteforce,
    switcher_count_bruteforce, OracleBudget,
};
use crate::rational::{self, parse_rational, ratio, Rational};
use crate::rng::{derive_seed, rng_from_seed};
use crate::signing::{disc_graph, disc_matching, signed_sum, validate_factorization, Orientation, SignMatrix};
use crate::switching::{factorize_many_switchers, CrownCache, CrownMode, CrownOptions, SwitcherOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExitStatus {
    Success = 0,
    BoundUnmet = 2,
    InputError = 3,
    ConstructionFailure = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::Construction { .. }
            | Error::Timeout { .. }
            | Error::TooFewSwitchers { .. }
            | Error::Inconsistent(_)
            | Error::InvalidStructure(_) => ExitStatus::ConstructionFailure,
            _ => ExitStatus::InputError,
        }
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            ExitStatus::Success
        } else {
            ExitStatus::BoundUnmet
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of the signing file, lowercase hex.
    pub input_digest: Option<String>,
    pub seed: Option<u64>,
    pub parameters: Value,
    pub results: Value,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug)]
pub struct CommandOutput {
    pub report: RunReport,
    /// File contents produced by the command, if any.
    pub artifact: Option<String>,
    pub exit: ExitStatus,
}

pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn report(command: &str, input: Option<&str>, seed: Option<u64>, parameters: Value, results: Value, start: Instant) -> RunReport {
    RunReport {
        command: command.to_string(),
        input_digest: input.map(digest),
        seed,
        parameters,
        results,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn f(r: &Rational) -> f64 {
    rational::to_f64(r)
}

// ---------------------------------------------------------------- gen

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    AllPlus,
    Random,
    OneSided,
    Perturbed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationArg {
    X,
    Y,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::X => Orientation::XSide,
            OrientationArg::Y => Orientation::YSide,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GenOptions {
    pub kind: GenKind,
    pub n: usize,
    pub orientation: Orientation,
    pub k: usize,
    pub density: f64,
    pub seed: u64,
}

/// A uniformly random balanced sign vector; for odd `n` the extra entry is `+1`.
pub fn random_balanced<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<i8> {
    let mut z: Vec<i8> = (0..n).map(|i| if i < n.div_ceil(2) { 1 } else { -1 }).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        z.swap(i, j);
    }
    z
}

/// Flips `k` distinct uniformly chosen entries.
pub fn perturb<R: Rng + ?Sized>(m: &mut SignMatrix, k: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    let n = m.n();
    if k > n * n {
        return Err(Error::InvalidArgument(format!("cannot flip {k} of {} entries", n * n)));
    }
    let mut cells: Vec<(usize, usize)> = sample(rng, n * n, k).iter().map(|c| (c / n, c % n)).collect();
    cells.sort_unstable();
    for &(i, j) in &cells {
        m.flip(i, j);
    }
    Ok(cells)
}

pub fn generate(opts: &GenOptions) -> Result<SignMatrix> {
    let n = opts.n;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    match opts.kind {
        GenKind::AllPlus => Ok(SignMatrix::all_plus(n)),
        GenKind::Random => {
            if !(0.0..=1.0).contains(&opts.density) {
                return Err(Error::InvalidArgument(format!("density must lie in [0, 1], got {}", opts.density)));
            }
            let mut rng = rng_from_seed(opts.seed);
            Ok(SignMatrix::from_fn(n, |_, _| rng.gen_bool(opts.density)))
        }
        GenKind::OneSided | GenKind::Perturbed => {
            let z = random_balanced(n, &mut rng_from_seed(derive_seed(opts.seed, 0)));
            let mut m = SignMatrix::one_sided(&z, opts.orientation)?;
            if opts.kind == GenKind::Perturbed {
                perturb(&mut m, opts.k, &mut rng_from_seed(derive_seed(opts.seed, 1)))?;
            }
            Ok(m)
        }
    }
}

pub fn cmd_gen(opts: &GenOptions) -> Result<CommandOutput> {
    let start = Instant::now();
    let m = generate(opts)?;
    let text = write_signing(&m);
    let results = json!({ "n": m.n(), "plus_count": m.plus_count(), "output_digest": digest(&text) });
    Ok(CommandOutput {
        report: report("gen", None, Some(opts.seed), to_value(opts), results, start),
        artifact: Some(text),
        exit: ExitStatus::Success,
    })
}

// ---------------------------------------------------------------- analyze

pub fn cmd_analyze(signing: &str, oracle: bool) -> Result<CommandOutput> {
    let start = Instant::now();
    let m = parse_signing(signing)?;
    let n = m.n();
    let census = count_switchers(&m);
    let s2_trace = s2_via_trace(&m)?;
    let mut results = json!({
        "n": n,
        "disc": f(&disc_graph(&m)),
        "s": census.s,
        "s1": census.s1,
        "s2": census.s2,
        "s2_trace": s2_trace,
        "s2_trace_agrees": s2_trace == census.s2,
        "density": census.density(),
    });
    let mut pass = s2_trace == census.s2;
    if oracle {
        let value = match switcher_count_bruteforce(&m, &OracleBudget::default()) {
            Ok(o) => {
                let agrees = o == census;
                pass &= agrees;
                json!({ "s": o.s, "s1": o.s1, "s2": o.s2, "agrees": agrees })
            }
            Err(e) => json!({ "skipped": e.to_string() }),
        };
        results["oracle"] = value;
    }
    Ok(CommandOutput {
        report: report("analyze", Some(signing), None, json!({ "oracle": oracle }), results, start),
        artifact: None,
        exit: if pass { ExitStatus::Success } else { ExitStatus::ConstructionFailure },
    })
}

// ---------------------------------------------------------------- factorize

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Auto,
    Cyclic,
    Switcher,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizeOptions {
    pub strategy: Strategy,
    pub seed: u64,
    pub max_tries: usize,
    /// Switcher density for the switcher strategy; defaults to the measured `s / n^4`.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "opt_rational")]
    pub eta: Option<Rational>,
    /// Closeness target used by auto routing.
    #[serde(serialize_with = "rational::as_f64::serialize")]
    pub epsilon: Rational,
    pub crown_mode: CrownMode,
    pub crown_timeout_ms: u64,
    pub relabel_tries: usize,
    #[serde(skip)]
    pub crown_cache: Option<PathBuf>,
}

fn opt_rational<S: serde::Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_f64(f(r)),
        None => s.serialize_none(),
    }
}

impl Default for FactorizeOptions {
    fn default() -> Self {
        FactorizeOptions {
            strategy: Strategy::Auto,
            seed: 0,
            max_tries: 100,
            eta: None,
            epsilon: ratio(1, 2),
            crown_mode: CrownMode::Auto,
            crown_timeout_ms: 30_000,
            relabel_tries: 50,
            crown_cache: None,
        }
    }
}

pub fn cmd_factorize(signing: &str, opts: &FactorizeOptions, oracle: bool) -> Result<CommandOutput> {
    let start = Instant::now();
    let m = parse_signing(signing)?;
    let n = m.n();
    let params = json!({ "options": to_value(opts), "oracle": oracle });
    let finish = |results: Value, artifact: Option<String>, exit: ExitStatus| CommandOutput {
        report: report("factorize", Some(signing), Some(opts.seed), params.clone(), results, start),
        artifact,
        exit,
    };

    let (strategy, auto) = match opts.strategy {
        Strategy::Auto => {
            let dp = DichotomyParams::new(opts.epsilon)?;
            let branch = route(&dp, disc_graph(&m), &count_switchers(&m));
            let chosen = match branch {
                Branch::HighDisc => Strategy::Cyclic,
                Branch::ManySwitchers => Strategy::Switcher,
                Branch::Close => {
                    let results = json!({
                        "strategy": "auto",
                        "branch": branch,
                        "refused": true,
                        "message": "signing has low discrepancy and few switchers; run `certify` for a closeness certificate",
                    });
                    return Ok(finish(results, None, ExitStatus::ConstructionFailure));
                }
            };
            (chosen, Some((dp, branch)))
        }
        s => (s, None),
    };

    let built = match strategy {
        Strategy::Cyclic => factorize_high_disc(
            &m,
            &CyclicOptions {
                max_tries: opts.max_tries,
                sampler_bound: None,
                seed: opts.seed,
            },
        )
        .map(|o| {
            let pass = o.report.all_within_bound;
            (o.factorization, to_value(&o.report), pass)
        }),
        _ => {
            let cache_dir;
            let cache = match &opts.crown_cache {
                Some(dir) => {
                    cache_dir = CrownCache::with_dir(dir);
                    &cache_dir
                }
                None => CrownCache::global(),
            };
            let sw = SwitcherOptions {
                eta: opts.eta.or(auto.map(|(dp, _)| dp.eta)),
                seed: opts.seed,
                relabel_tries: opts.relabel_tries,
                crown: CrownOptions {
                    mode: opts.crown_mode,
                    timeout: Duration::from_millis(opts.crown_timeout_ms),
                },
                ..SwitcherOptions::default()
            };
            factorize_many_switchers(&m, &sw, cache).map(|o| {
                let pass = o.report.all_meet_bound;
                (o.factorization, to_value(&o.report), pass)
            })
        }
    };
    let (factorization, strategy_report, mut pass) = match built {
        Ok(b) => b,
        Err(e) => {
            let exit = ExitStatus::of_error(&e);
            let results = json!({ "strategy": strategy, "error": e.to_string() });
            return Ok(finish(results, None, exit));
        }
    };

    let discs: Vec<f64> = factorization
        .matchings()
        .iter()
        .map(|pm| disc_matching(&m, pm).map(|d| f(&d)))
        .collect::<Result<_>>()?;
    let min_disc = factorization.min_disc(&m)?;
    let mut results = json!({
        "strategy": strategy,
        "n": n,
        "discs": discs,
        "min_disc": f(&min_disc),
        "report": strategy_report,
    });
    if let Some((dp, branch)) = auto {
        // Auto mode checks the dichotomy constant rather than the strategy's own bound.
        pass = min_disc >= dp.c;
        results["branch"] = to_value(&branch);
        results["c"] = json!(f(&dp.c));
    }
    results["bound_met"] = json!(pass);
    if oracle {
        results["oracle"] = match best_factorization_bruteforce(&m, &OracleBudget::default()) {
            Ok((_, best)) => json!({ "best_min_disc": f(&best), "consistent": best >= min_disc }),
            Err(e) => json!({ "skipped": e.to_string() }),
        };
    }
    Ok(finish(results, Some(write_factorization(&factorization)), ExitStatus::from_pass(pass)))
}

// ---------------------------------------------------------------- certify

pub fn cmd_certify(signing: &str, epsilon: Rational, seed: u64, oracle: bool) -> Result<CommandOutput> {
    let start = Instant::now();
    let m = parse_signing(signing)?;
    let cert = match classify(&m, epsilon, &ClassifyOptions { seed, ..Default::default() }, CrownCache::global()) {
        Ok(c) => c,
        Err(e) => {
            let exit = ExitStatus::of_error(&e);
            if exit == ExitStatus::InputError {
                return Err(e);
            }
            let results = json!({ "error": e.to_string() });
            return Ok(CommandOutput {
                report: report("certify", Some(signing), Some(seed), json!({ "epsilon": f(&epsilon) }), results, start),
                artifact: None,
                exit,
            });
        }
    };
    let mut results = json!({
        "branch": cert.branch,
        "routed_branch": cert.routed_branch,
        "success": cert.success,
        "epsilon": f(&cert.params.epsilon),
        "alpha": f(&cert.params.alpha),
        "eta": f(&cert.params.eta),
        "c": f(&cert.params.c),
        "details": {
            "disc_graph": f(&cert.disc_graph),
            "census": cert.census,
            "attempts": cert.attempts,
            "outcome": cert.outcome,
        },
    });
    if oracle {
        let alpha = f(&cert.params.alpha);
        results["oracle"] = match nearest_one_sided_bruteforce(&m, alpha, &OracleBudget::default()) {
            Ok(best) => {
                let mut o = json!({ "hamming": best.hamming, "orientation": best.orientation });
                if let Outcome::Certificate { certificate, .. } = &cert.outcome {
                    o["consistent"] = json!(best.hamming <= certificate.hamming);
                }
                o
            }
            Err(e) => json!({ "skipped": e.to_string() }),
        };
    }
    Ok(CommandOutput {
        report: report(
            "certify",
            Some(signing),
            Some(seed),
            json!({ "epsilon": f(&epsilon), "oracle": oracle }),
            results,
            start,
        ),
        artifact: None,
        exit: ExitStatus::from_pass(cert.success),
    })
}

// ---------------------------------------------------------------- verify

pub fn cmd_verify(signing: &str, factorization: &str, bound: Rational) -> Result<CommandOutput> {
    let start = Instant::now();
    let m = parse_signing(signing)?;
    let file = parse_factorization(factorization)?;
    if file.n != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: file.n,
        });
    }
    let params = json!({ "bound": f(&bound), "factorization_digest": digest(factorization) });
    let validation = validate_factorization(file.n, &file.rows);
    if !validation.is_valid() {
        let results = json!({ "valid": false, "validation": validation, "pass": false });
        return Ok(CommandOutput {
            report: report("verify", Some(signing), None, params, results, start),
            artifact: None,
            exit: ExitStatus::InputError,
        });
    }
    let mut per_matching = Vec::with_capacity(file.n);
    let mut min_disc: Option<Rational> = None;
    for (t, row) in file.rows.iter().enumerate() {
        let pm = crate::signing::PerfectMatching::new(row.clone())?;
        let sum = signed_sum(&m, &pm)?;
        let d = disc_matching(&m, &pm)?;
        min_disc = Some(min_disc.map_or(d, |x| x.min(d)));
        per_matching.push(json!({ "t": t, "signed_sum": sum, "disc": f(&d), "meets_bound": d >= bound }));
    }
    let min_disc = min_disc.expect("n >= 1");
    let pass = min_disc >= bound;
    let results = json!({
        "valid": true,
        "n": file.n,
        "per_matching": per_matching,
        "min_disc": f(&min_disc),
        "bound": f(&bound),
        "pass": pass,
    });
    Ok(CommandOutput {
        report: report("verify", Some(signing), None, params, results, start),
        artifact: None,
        exit: ExitStatus::from_pass(pass),
    })
}

// ---------------------------------------------------------------- oracle

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    BestFactorization,
    Switchers,
    Nearest,
    Crown,
}

/// `signing` is ignored for `crown`, which takes `n` instead.
pub fn cmd_oracle(kind: OracleKind, signing: Option<&str>, n: Option<usize>, alpha: f64) -> Result<CommandOutput> {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let need = || signing.ok_or_else(|| Error::InvalidArgument("this oracle needs --input".into())).and_then(parse_signing);
    let (results, artifact, input) = match kind {
        OracleKind::BestFactorization => {
            let m = need()?;
            let (fz, best) = best_factorization_bruteforce(&m, &budget)?;
            (json!({ "n": m.n(), "best_min_disc": f(&best), "rows": fz.rows() }), Some(write_factorization(&fz)), signing)
        }
        OracleKind::Switchers => {
            let m = need()?;
            (to_value(&switcher_count_bruteforce(&m, &budget)?), None, signing)
        }
        OracleKind::Nearest => {
            let m = need()?;
            (to_value(&nearest_one_sided_bruteforce(&m, alpha, &budget)?), None, signing)
        }
        OracleKind::Crown => {
            let n = n.ok_or_else(|| Error::InvalidArgument("crown oracle needs --n".into()))?;
            match crown_factorization_search(n, budget.timeout)? {
                Some(factors) => (
                    json!({ "n": n, "found": true, "factors": factors }),
                    Some(write_crown_cache(n, &factors)),
                    None,
                ),
                None => (json!({ "n": n, "found": false }), None, None),
            }
        }
    };
    Ok(CommandOutput {
        report: report("oracle", input, None, json!({ "kind": kind, "n": n, "alpha": alpha }), results, start),
        artifact,
        exit: ExitStatus::Success,
    })
}

// ---------------------------------------------------------------- argument parsing

#[derive(Debug, Parser)]
#[command(name = "bidisc", version, about = "Discrepancy of 1-factorizations of signed K_{n,n}")]
pub struct Cli {
    /// Signing file; `-` or absent reads stdin.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Where to write the produced file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Print the full JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Cross-check against the brute-force oracles when within budget.
    #[arg(long, global = true)]
    pub oracle: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a signing file.
    Gen(GenArgs),
    /// Discrepancy and switcher census.
    Analyze,
    /// Build a 1-factorization.
    Factorize(FactorizeArgs),
    /// Run the classifier and emit its certificate.
    Certify(CertifyArgs),
    /// Check a factorization file against a signing and a bound.
    Verify(VerifyArgs),
    /// Run a brute-force reference implementation.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "x")]
    pub orientation: OrientationArg,
    /// Number of flips for `perturbed`.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Probability of `+` for `random`.
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    #[arg(long, value_enum, default_value = "auto")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub max_tries: usize,
    /// Rational or decimal, e.g. `1/64` or `0.01`.
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long, default_value = "1/2")]
    pub epsilon: String,
    #[arg(long, default_value = "auto")]
    pub crown_mode: String,
    #[arg(long, default_value_t = 30_000)]
    pub crown_timeout_ms: u64,
    #[arg(long, default_value_t = 50)]
    pub relabel_tries: usize,
    /// Directory for persisted crown search results.
    #[arg(long)]
    pub crown_cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, default_value = "1/2")]
    pub epsilon: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub factorization: PathBuf,
    /// Rational or decimal; negative values are accepted.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub bound: String,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(value_enum)]
    pub kind: OracleKind,
    /// Order for the crown search.
    #[arg(long)]
    pub n: Option<usize>,
    /// Closeness parameter used to fill the `bound` field of `nearest`.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) if p != Path::new("-") => Ok(std::fs::read_to_string(p)?),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<CommandOutput> {
    let input = || read_input(cli.input.as_deref());
    match &cli.command {
        Command::Gen(a) => cmd_gen(&GenOptions {
            kind: a.kind,
            n: a.n,
            orientation: a.orientation.into(),
            k: a.k,
            density: a.density,
            seed: a.seed,
        }),
        Command::Analyze => cmd_analyze(&input()?, cli.oracle),
        Command::Factorize(a) => {
            let opts = FactorizeOptions {
                strategy: a.strategy,
                seed: a.seed,
                max_tries: a.max_tries,
                eta: a.eta.as_deref().map(parse_rational).transpose()?,
                epsilon: parse_rational(&a.epsilon)?,
                crown_mode: a.crown_mode.parse()?,
                crown_timeout_ms: a.crown_timeout_ms,
                relabel_tries: a.relabel_tries,
                crown_cache: a.crown_cache.clone(),
            };
            cmd_factorize(&input()?, &opts, cli.oracle)
        }
        Command::Certify(a) => cmd_certify(&input()?, parse_rational(&a.epsilon)?, a.seed, cli.oracle),
        Command::Verify(a) => {
            let fz = std::fs::read_to_string(&a.factorization)?;
            cmd_verify(&input()?, &fz, parse_rational(&a.bound)?)
        }
        Command::Oracle(a) => {
            let text = match a.kind {
                OracleKind::Crown => None,
                _ => Some(input()?),
            };
            cmd_oracle(a.kind, text.as_deref(), a.n, a.alpha)
        }
    }
}

fn summary(report: &RunReport) -> String {
    let mut out = format!("command: {}\n", report.command);
    if let Value::Object(map) = &report.results {
        for (k, v) in map {
            if !(v.is_object() || v.is_array()) {
                out.push_str(&format!("{k}: {v}\n"));
            }
        }
    }
    out
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::InputError.code() } else { 0 };
        }
    };
    let out = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitStatus::of_error(&e).code();
        }
    };
    let mut report_to_stdout = true;
    if let Some(artifact) = &out.artifact {
        match &cli.output {
            Some(path) => {
                if let Err(e) = std::fs::write(path, artifact) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitStatus::InputError.code();
                }
            }
            None => {
                print!("{artifact}");
                report_to_stdout = false;
            }
        }
    }
    let text = if cli.json {
        serde_json::to_string_pretty(&out.report).expect("report serializes") + "\n"
    } else {
        summary(&out.report)
    };
    if report_to_stdout {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    let _ = std::io::stdout().flush();
    out.exit.code()
}
