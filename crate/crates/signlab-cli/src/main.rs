//! Command-line front end for the signlab library. Every subcommand
//! prints its result to stdout in one of three formats (table, csv,
//! json); progress chatter goes to stderr so pipelines stay clean.
//!
//! Exit codes: 0 success, 1 domain/hypothesis/verification errors
//! (prefixed `error:` on stderr), 2 usage errors.

use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::json;

use signlab::algebraic::parse_rational;
use signlab::arith::{euler_phi, factorize, sigma_s, Factorization, SigmaMode};
use signlab::crt::hunt::witness_hunt;
use signlab::crt::{
    admissibility_check, build_crt_system, build_instance, literal_threshold, omega_bounded_scan,
    prime_strings, simultaneous_check, Admissibility, CrtConstruction, FormSystem,
    SCAN_CSV_HEADER,
};
use signlab::density::{
    beta, compare_partial_sums, local_factor, numeric, predicted_ratio, root_count_general,
    CSV_HEADER,
};
use signlab::scan::{
    min_odd_a, phi_dominance_scan, prime_in_ap, scan_signs, two_sided_witnesses, ProgressionPair,
};
use signlab::{Error, LinearForm, Result};

const THREADS_ENV: &str = "SIGMA_SIGNLAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

fn form_arg(text: &str) -> std::result::Result<LinearForm, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

fn rational_arg(text: &str) -> std::result::Result<BigRational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "signlab", version, about = "Divisor-sum sign-change toolkit")]
struct Cli {
    /// Output format for results on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Write the result to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Worker-thread cap; falls back to SIGMA_SIGNLAB_THREADS, then to
    /// machine parallelism. 1 forces fully serial execution.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<NonZeroUsize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Divisor sum σ_s(n); exact for integer s, double precision otherwise.
    Sigma {
        #[arg(long)]
        n: u64,
        #[arg(long, value_parser = rational_arg, default_value = "1", allow_hyphen_values = true)]
        s: BigRational,
    },
    /// Euler totient φ(n).
    Phi {
        #[arg(long)]
        n: u64,
    },
    /// Prime factorization of n.
    Factor {
        #[arg(long)]
        n: u64,
    },
    /// Sign tallies of σ_s(f(n)) − σ_s(g(n)) for n = 1..=limit.
    Scan {
        #[arg(long, value_parser = form_arg)]
        f: LinearForm,
        #[arg(long, value_parser = form_arg)]
        g: LinearForm,
        #[arg(long)]
        limit: u64,
        #[arg(long, value_parser = rational_arg, default_value = "1", allow_hyphen_values = true)]
        s: BigRational,
        /// Compare in double precision instead of exact arithmetic.
        #[arg(long)]
        real: bool,
    },
    /// First n ≤ limit with φ(qn+1) ≤ φ(qn), or PASS when none exists.
    Jarden {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        limit: u64,
    },
    /// First `count` primes ≡ m (mod q) at or beyond `start`.
    ApPrimes {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        start: u64,
    },
    /// Smallest odd slope a satisfying the σ_s slope-gap inequality.
    Thm1MinA {
        #[arg(long, value_parser = rational_arg)]
        s: BigRational,
    },
    /// Two-sided prime-driven witnesses for σ_s(an+2) − σ_s((a+1)n+1).
    Thm1Witnesses {
        #[arg(long, value_parser = rational_arg)]
        s: BigRational,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        limit: u64,
    },
    /// Root count N(d) = #{n mod d : d | f(n)}.
    Roots {
        #[arg(long, value_parser = form_arg)]
        form: LinearForm,
        #[arg(long)]
        d: u64,
    },
    /// Local Euler factor of the σ(f(n)) mean value at a prime p.
    LocalFactor {
        #[arg(long, value_parser = form_arg)]
        form: LinearForm,
        #[arg(long)]
        p: u64,
    },
    /// Euler-product coefficient β(f) with a certified numeric enclosure.
    Beta {
        #[arg(long, value_parser = form_arg)]
        form: LinearForm,
    },
    /// Exact limit of Σσ(f(n)) / Σσ(g(n)).
    Ratio {
        #[arg(long, value_parser = form_arg)]
        f: LinearForm,
        #[arg(long, value_parser = form_arg)]
        g: LinearForm,
    },
    /// Exact partial sums of σ over two progressions at checkpoints.
    PartialSums {
        #[arg(long, value_parser = form_arg)]
        f: LinearForm,
        #[arg(long, value_parser = form_arg)]
        g: LinearForm,
        #[arg(long, value_delimiter = ',', required = true)]
        checkpoints: Vec<u64>,
    },
    /// Derive the constants of a lower/upper form-system instance.
    Thm4Build {
        #[arg(long, value_delimiter = ',', value_parser = form_arg, required = true)]
        lower: Vec<LinearForm>,
        #[arg(long, value_delimiter = ',', value_parser = form_arg, required = true)]
        upper: Vec<LinearForm>,
    },
    /// Minimal consecutive prime strings with reciprocal sum above tau.
    Thm4Strings {
        #[arg(long)]
        start: u64,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, value_parser = rational_arg)]
        tau: BigRational,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Full pipeline: instance, admissible prefix, strings, CRT solve.
    Thm4Crt {
        #[arg(long, value_delimiter = ',', value_parser = form_arg, required = true)]
        lower: Vec<LinearForm>,
        #[arg(long, value_delimiter = ',', value_parser = form_arg, required = true)]
        upper: Vec<LinearForm>,
        #[arg(long, value_parser = rational_arg)]
        tau: BigRational,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Ω-bounded scan along n = mP + n0 for the pipeline's construction.
    Thm4Scan {
        #[arg(long, value_delimiter = ',', value_parser = form_arg, required = true)]
        lower: Vec<LinearForm>,
        #[arg(long, value_delimiter = ',', value_parser = form_arg, required = true)]
        upper: Vec<LinearForm>,
        #[arg(long, value_parser = rational_arg)]
        tau: BigRational,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long)]
        m_max: u64,
        /// Ω ceiling; defaults to the instance's own bound.
        #[arg(long)]
        bound: Option<u32>,
    },
    /// σ evidence at one n: does every upper form beat every lower form?
    Thm4Check {
        #[arg(long, value_delimiter = ',', value_parser = form_arg, required = true)]
        lower: Vec<LinearForm>,
        #[arg(long, value_delimiter = ',', value_parser = form_arg, required = true)]
        upper: Vec<LinearForm>,
        #[arg(long)]
        n: u64,
    },
    /// Abundancy-driven hunt for m with σ(2m+5) > σ(6m+17) and
    /// σ(5m+4) > σ(6m+7) simultaneously.
    Thm3Hunt {
        #[arg(long)]
        budget: u64,
        #[arg(long, value_parser = rational_arg)]
        slack: Option<BigRational>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(text) => match emit(&text, cli.output.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn init_threads(flag: Option<NonZeroUsize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n.get()),
        None => match std::env::var(THREADS_ENV) {
            Ok(text) => Some(text.parse::<NonZeroUsize>().map_err(|_| {
                Error::Domain(format!("{THREADS_ENV}={text:?} is not a positive integer"))
            })?
            .get()),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn emit(text: &str, output: Option<&std::path::Path>) -> Result<()> {
    let mut payload = text.to_owned();
    if !payload.ends_with('\n') {
        payload.push('\n');
    }
    match output {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

/// `num/den`, collapsing to `num` for integers.
fn rat_str(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn opt_str(v: Option<u64>) -> String {
    v.map(|n| n.to_string()).unwrap_or_default()
}

fn csv_quote(text: &str) -> String {
    format!("\"{}\"", text.replace('"', "\"\""))
}

fn json_text(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("json value renders")
}

fn json_of<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

/// ExactInteger for integer s, double precision otherwise.
fn sigma_mode(s: &BigRational) -> Result<SigmaMode> {
    if s.is_integer() {
        let i = s.numer().to_i64().ok_or_else(|| {
            Error::Overflow(format!("exponent {s} does not fit a 64-bit integer"))
        })?;
        Ok(SigmaMode::ExactInteger(i))
    } else {
        let x = s.to_f64().ok_or_else(|| {
            Error::Overflow(format!("exponent {s} does not convert to double precision"))
        })?;
        Ok(SigmaMode::Real(x))
    }
}

fn factor_product(f: &Factorization) -> String {
    if f.factors.is_empty() {
        return "1".into();
    }
    f.factors
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join(" * ")
}

fn forms_text(forms: &[LinearForm]) -> Vec<String> {
    forms.iter().map(ToString::to_string).collect()
}

/// Instance plus admissible prefix plus strings plus CRT solution; the
/// shared front half of the thm4-* pipeline subcommands.
fn crt_pipeline(
    lower: &[LinearForm],
    upper: &[LinearForm],
    tau: &BigRational,
    budget: u64,
) -> Result<(FormSystem, CrtConstruction)> {
    let instance = build_instance(lower.to_vec(), upper.to_vec())?;
    let prefix = match admissibility_check(&instance.lower, instance.p_start)? {
        Admissibility::Admissible(map) => map,
        Admissibility::Obstructed { p } => {
            return Err(Error::Hypothesis(format!(
                "lower forms cover every residue at p = {p}; system is inadmissible"
            )));
        }
    };
    let strings = prime_strings(instance.p_start, instance.k as u64, tau, budget)?;
    let primes: Vec<Vec<u64>> = strings.iter().map(|s| s.primes.clone()).collect();
    let built = build_crt_system(&instance, &primes, &prefix)?;
    Ok((instance, built))
}

fn run(cli: &Cli) -> Result<String> {
    let fmt = cli.format;
    match &cli.command {
        Command::Sigma { n, s } => {
            let value = sigma_s(&factorize(*n, None)?, sigma_mode(s)?)?;
            Ok(match fmt {
                Format::Table => value.to_string(),
                Format::Csv => format!("n,s,sigma\n{n},{},{value}", rat_str(s)),
                Format::Json => json_text(&json!({
                    "n": n,
                    "s": rat_str(s),
                    "sigma": value.to_string(),
                })),
            })
        }
        Command::Phi { n } => {
            let value = euler_phi(&factorize(*n, None)?);
            Ok(match fmt {
                Format::Table => value.to_string(),
                Format::Csv => format!("n,phi\n{n},{value}"),
                Format::Json => json_text(&json!({ "n": n, "phi": value })),
            })
        }
        Command::Factor { n } => {
            let f = factorize(*n, None)?;
            Ok(match fmt {
                Format::Table => format!("{} = {}", f.value, factor_product(&f)),
                Format::Csv => {
                    let mut lines = vec!["p,e".to_string()];
                    lines.extend(f.factors.iter().map(|&(p, e)| format!("{p},{e}")));
                    lines.join("\n")
                }
                Format::Json => json_text(&json!({
                    "n": f.value,
                    "factors": f.factors,
                })),
            })
        }
        Command::Scan {
            f,
            g,
            limit,
            s,
            real,
        } => {
            let mode = if *real {
                let x = s.to_f64().ok_or_else(|| {
                    Error::Overflow(format!("exponent {s} does not convert to double precision"))
                })?;
                SigmaMode::Real(x)
            } else {
                match sigma_mode(s)? {
                    SigmaMode::ExactInteger(i) => SigmaMode::ExactInteger(i),
                    SigmaMode::Real(_) => {
                        return Err(Error::Domain(format!(
                            "exact scans need an integer exponent; pass --real for s = {s}"
                        )));
                    }
                }
            };
            let pair = ProgressionPair {
                left: *f,
                right: *g,
                mode,
            };
            let report = scan_signs(&pair, *limit)?;
            Ok(match fmt {
                Format::Table => [
                    format!("n_max: {}", report.n_max),
                    format!("positive: {}", report.count_pos),
                    format!("negative: {}", report.count_neg),
                    format!("zero: {}", report.count_zero),
                    format!("sign_changes: {}", report.sign_changes),
                    format!("first_positive: {}", opt_str(report.first_pos)),
                    format!("first_negative: {}", opt_str(report.first_neg)),
                    format!("first_zero: {}", opt_str(report.first_zero)),
                    format!("near_ties: {}", report.near_ties),
                ]
                .join("\n"),
                Format::Csv => format!(
                    "n_max,count_pos,count_neg,count_zero,sign_changes,first_pos,first_neg,first_zero,near_ties\n{},{},{},{},{},{},{},{},{}",
                    report.n_max,
                    report.count_pos,
                    report.count_neg,
                    report.count_zero,
                    report.sign_changes,
                    opt_str(report.first_pos),
                    opt_str(report.first_neg),
                    opt_str(report.first_zero),
                    report.near_ties,
                ),
                Format::Json => json_of(&report),
            })
        }
        Command::Jarden { q, limit } => {
            eprintln!("progress: scanning totient dominance for q = {q} up to {limit}");
            let failure = phi_dominance_scan(*q, *limit)?;
            Ok(match fmt {
                Format::Table => match failure {
                    None => format!("PASS (no failure \u{2264} {limit})"),
                    Some(n) => format!("FAIL (first failure at n = {n})"),
                },
                Format::Csv => format!("q,limit,first_failure\n{q},{limit},{}", opt_str(failure)),
                Format::Json => json_text(&json!({
                    "q": q,
                    "limit": limit,
                    "first_failure": failure,
                })),
            })
        }
        Command::ApPrimes { q, m, count, start } => {
            let primes = prime_in_ap(*q, *m, *count, *start)?;
            Ok(match fmt {
                Format::Table => primes
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("\n"),
                Format::Csv => {
                    let mut lines = vec!["prime".to_string()];
                    lines.extend(primes.iter().map(ToString::to_string));
                    lines.join("\n")
                }
                Format::Json => json_text(&json!({
                    "q": q,
                    "m": m,
                    "start": start,
                    "primes": primes,
                })),
            })
        }
        Command::Thm1MinA { s } => {
            let a = min_odd_a(s)?;
            Ok(match fmt {
                Format::Table => a.to_string(),
                Format::Csv => format!("s,min_a\n{},{a}", rat_str(s)),
                Format::Json => json_text(&json!({ "s": rat_str(s), "min_a": a })),
            })
        }
        Command::Thm1Witnesses { s, a, limit } => {
            let report = two_sided_witnesses(s, *a, *limit)?;
            Ok(match fmt {
                Format::Table => {
                    let join = |v: &[u64]| {
                        v.iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>()
                            .join(" ")
                    };
                    [
                        format!("a: {}", report.a),
                        format!("n_max: {}", report.n_max),
                        format!("negatives: {}", join(&report.negatives)),
                        format!("positives: {}", join(&report.positives)),
                        format!("failures: {}", report.failures.len()),
                    ]
                    .join("\n")
                }
                Format::Csv => {
                    let mut lines = vec!["kind,n,detail".to_string()];
                    lines.extend(report.negatives.iter().map(|n| format!("negative,{n},")));
                    lines.extend(report.positives.iter().map(|n| format!("positive,{n},")));
                    lines.extend(
                        report
                            .failures
                            .iter()
                            .map(|f| format!("failure,{},{}", f.n, csv_quote(&f.detail))),
                    );
                    lines.join("\n")
                }
                Format::Json => json_of(&report),
            })
        }
        Command::Roots { form, d } => {
            let count = root_count_general(form, *d)?;
            Ok(match fmt {
                Format::Table => count.to_string(),
                Format::Csv => format!("form,d,count\n{form},{d},{count}"),
                Format::Json => json_text(&json!({
                    "form": form.to_string(),
                    "d": d,
                    "count": count,
                })),
            })
        }
        Command::LocalFactor { form, p } => {
            let value = local_factor(form, *p)?;
            Ok(match fmt {
                Format::Table => rat_str(&value),
                Format::Csv => format!("form,p,local_factor\n{form},{p},{}", rat_str(&value)),
                Format::Json => json_text(&json!({
                    "form": form.to_string(),
                    "p": p,
                    "local_factor": rat_str(&value),
                })),
            })
        }
        Command::Beta { form } => {
            let z = beta(form);
            let enc = numeric(&z);
            Ok(match fmt {
                Format::Table => format!("beta: {z}\nnumeric: [{}, {}]", enc.lo, enc.hi),
                Format::Csv => format!(
                    "form,coeff,lo,hi\n{form},{},{},{}",
                    rat_str(&z.coeff),
                    enc.lo,
                    enc.hi
                ),
                Format::Json => json_text(&json!({
                    "form": form.to_string(),
                    "coeff": rat_str(&z.coeff),
                    "lo": enc.lo,
                    "hi": enc.hi,
                })),
            })
        }
        Command::Ratio { f, g } => {
            let value = predicted_ratio(f, g)?;
            Ok(match fmt {
                Format::Table => rat_str(&value),
                Format::Csv => format!("f,g,ratio\n{f},{g},{}", rat_str(&value)),
                Format::Json => json_text(&json!({
                    "f": f.to_string(),
                    "g": g.to_string(),
                    "ratio": rat_str(&value),
                })),
            })
        }
        Command::PartialSums { f, g, checkpoints } => {
            let mut rows = Vec::with_capacity(checkpoints.len());
            for &k in checkpoints {
                eprintln!("progress: summing both progressions to K = {k}");
                rows.extend(compare_partial_sums(f, g, &[k])?);
            }
            Ok(match fmt {
                Format::Table | Format::Csv => {
                    let mut lines = vec![CSV_HEADER.to_string()];
                    lines.extend(rows.iter().map(|r| r.csv_row()));
                    lines.join("\n")
                }
                Format::Json => json_of(&rows),
            })
        }
        Command::Thm4Build { lower, upper } => {
            let inst = build_instance(lower.clone(), upper.clone())?;
            let threshold = literal_threshold(&inst);
            Ok(match fmt {
                Format::Table => [
                    format!("k: {}", inst.k),
                    format!("max_lower_slope: {}", inst.max_lower_slope),
                    format!("max_upper_slope: {}", inst.max_upper_slope),
                    format!("max_cross_det: {}", inst.max_cross_det),
                    format!("omega_bound: {}", inst.omega_bound),
                    format!("p_start: {}", inst.p_start),
                    format!("threshold: {threshold}"),
                ]
                .join("\n"),
                Format::Csv => format!(
                    "k,max_lower_slope,max_upper_slope,max_cross_det,omega_bound,p_start,threshold\n{},{},{},{},{},{},{}",
                    inst.k,
                    inst.max_lower_slope,
                    inst.max_upper_slope,
                    inst.max_cross_det,
                    inst.omega_bound,
                    inst.p_start,
                    threshold,
                ),
                Format::Json => json_text(&json!({
                    "lower": forms_text(&inst.lower),
                    "upper": forms_text(&inst.upper),
                    "k": inst.k,
                    "max_lower_slope": inst.max_lower_slope,
                    "max_upper_slope": inst.max_upper_slope,
                    "max_cross_det": inst.max_cross_det,
                    "omega_bound": inst.omega_bound,
                    "p_start": inst.p_start,
                    "threshold": threshold.to_string(),
                })),
            })
        }
        Command::Thm4Strings {
            start,
            k,
            tau,
            budget,
        } => {
            let strings = prime_strings(*start, *k, tau, *budget)?;
            Ok(match fmt {
                Format::Table => strings
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let primes = s
                            .primes
                            .iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>()
                            .join(" ");
                        format!(
                            "string {}: {primes}\n  reciprocal_sum: {}",
                            i + 1,
                            rat_str(&s.reciprocal_sum)
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n"),
                Format::Csv => {
                    let mut lines = vec!["index,primes,reciprocal_sum".to_string()];
                    lines.extend(strings.iter().enumerate().map(|(i, s)| {
                        let primes = s
                            .primes
                            .iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>()
                            .join(" ");
                        format!("{},{primes},{}", i + 1, rat_str(&s.reciprocal_sum))
                    }));
                    lines.join("\n")
                }
                Format::Json => {
                    let items: Vec<_> = strings
                        .iter()
                        .map(|s| {
                            json!({
                                "primes": s.primes,
                                "reciprocal_sum": rat_str(&s.reciprocal_sum),
                            })
                        })
                        .collect();
                    json_text(&json!({ "strings": items }))
                }
            })
        }
        Command::Thm4Crt {
            lower,
            upper,
            tau,
            budget,
        } => {
            let (_, built) = crt_pipeline(lower, upper, tau, *budget)?;
            Ok(match fmt {
                Format::Table => {
                    let mut lines = vec![
                        format!("P: {}", built.modulus),
                        format!("n0: {}", built.n0),
                        format!(
                            "prefix: {}",
                            built
                                .prefix
                                .iter()
                                .map(|e| format!("{}={}", e.p, e.residue))
                                .collect::<Vec<_>>()
                                .join(" ")
                        ),
                    ];
                    for (i, s) in built.strings.iter().enumerate() {
                        lines.push(format!(
                            "string {}: {}",
                            i + 1,
                            s.iter()
                                .map(ToString::to_string)
                                .collect::<Vec<_>>()
                                .join(" ")
                        ));
                    }
                    lines.push(format!("verified: {}", built.verified));
                    lines.join("\n")
                }
                Format::Csv => {
                    let prefix = built
                        .prefix
                        .iter()
                        .map(|e| format!("{}={}", e.p, e.residue))
                        .collect::<Vec<_>>()
                        .join(" ");
                    let strings = built
                        .strings
                        .iter()
                        .map(|s| {
                            s.iter()
                                .map(ToString::to_string)
                                .collect::<Vec<_>>()
                                .join(" ")
                        })
                        .collect::<Vec<_>>()
                        .join(";");
                    format!(
                        "P,n0,prefix,strings,verified\n{},{},{prefix},{strings},{}",
                        built.modulus, built.n0, built.verified
                    )
                }
                Format::Json => json_of(&built),
            })
        }
        Command::Thm4Scan {
            lower,
            upper,
            tau,
            budget,
            m_max,
            bound,
        } => {
            let (instance, built) = crt_pipeline(lower, upper, tau, *budget)?;
            let bound = bound.unwrap_or(instance.omega_bound);
            eprintln!("progress: scanning m = 1..={m_max} with bound {bound}");
            let report = omega_bounded_scan(&built, &instance, *m_max, bound)?;
            Ok(match fmt {
                Format::Table => {
                    let mut lines = vec![SCAN_CSV_HEADER.to_string()];
                    lines.extend(report.rows.iter().map(|r| r.csv_row()));
                    lines.push(format!(
                        "hits: {}",
                        report
                            .hits
                            .iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>()
                            .join(" ")
                    ));
                    lines.push(format!("density_reference: {}", report.density_reference));
                    lines.join("\n")
                }
                Format::Csv => {
                    let mut lines = vec![SCAN_CSV_HEADER.to_string()];
                    lines.extend(report.rows.iter().map(|r| r.csv_row()));
                    lines.join("\n")
                }
                Format::Json => json_of(&report),
            })
        }
        Command::Thm4Check { lower, upper, n } => {
            let instance = build_instance(lower.clone(), upper.clone())?;
            let evidence = simultaneous_check(&instance, *n)?;
            Ok(match fmt {
                Format::Table => {
                    let mut lines = vec![
                        format!("n: {}", evidence.n),
                        format!("holds: {}", evidence.holds),
                    ];
                    for fs in &evidence.lower {
                        lines.push(format!(
                            "lower {}: value {}, sigma {}",
                            fs.form, fs.value, fs.sigma
                        ));
                    }
                    for fs in &evidence.upper {
                        lines.push(format!(
                            "upper {}: value {}, sigma {}",
                            fs.form, fs.value, fs.sigma
                        ));
                    }
                    lines.join("\n")
                }
                Format::Csv => {
                    let mut lines = vec!["n,holds,role,form,value,sigma".to_string()];
                    for (role, list) in [("lower", &evidence.lower), ("upper", &evidence.upper)] {
                        lines.extend(list.iter().map(|fs| {
                            format!(
                                "{},{},{role},{},{},{}",
                                evidence.n, evidence.holds, fs.form, fs.value, fs.sigma
                            )
                        }));
                    }
                    lines.join("\n")
                }
                Format::Json => json_of(&evidence),
            })
        }
        Command::Thm3Hunt { budget, slack } => {
            eprintln!("progress: hunting with a budget of {budget} candidates");
            let report = witness_hunt(*budget, slack.clone())?;
            Ok(match fmt {
                Format::Table => {
                    let mut lines = vec![
                        format!("examined: {}", report.examined),
                        format!("budget_exhausted: {}", report.budget_exhausted),
                        format!("candidates: {}", report.candidates.len()),
                        format!("witnesses: {}", report.witnesses.len()),
                    ];
                    for w in &report.witnesses {
                        lines.push(format!(
                            "m = {}: sigma(2m+5) = {} > {} = sigma(6m+17), sigma(5m+4) = {} > {} = sigma(6m+7)",
                            w.m, w.sigma_2m5, w.sigma_6m17, w.sigma_5m4, w.sigma_6m7
                        ));
                    }
                    lines.join("\n")
                }
                Format::Csv => {
                    let hits: std::collections::BTreeSet<u64> =
                        report.witnesses.iter().map(|w| w.m).collect();
                    let mut lines = vec!["m,t,first_holds,second_holds,witness".to_string()];
                    lines.extend(report.candidates.iter().map(|c| {
                        format!(
                            "{},{},{},{},{}",
                            c.m,
                            c.t,
                            c.first_holds,
                            c.second_holds,
                            hits.contains(&c.m)
                        )
                    }));
                    lines.join("\n")
                }
                Format::Json => json_of(&report),
            })
        }
    }
}
