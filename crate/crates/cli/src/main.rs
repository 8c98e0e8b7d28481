use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use smoothsum::characters::DirichletCharacter;
use smoothsum::complete_sums::{brute_complete_sum, brute_interval_sum, direct_sum, SumInstance};
use smoothsum::congruence::{count_roots_with_denominator, Method};
use smoothsum::differencing::{vdc_certified, EMode, ShiftSystem};
use smoothsum::pipeline::{certified_incomplete_bound, l_value_partial, nonprincipal_char_sum_bound, weyl_reference, Exponent};
use smoothsum::postnikov::{bound_prime_power, postnikov_constant, postnikov_identity, tau_h};
use smoothsum::verify::{self, SuiteResult, VerifyConfig};
use smoothsum::{Error, RationalFunction};

const SCHEMA: u32 = 1;
const BUILD: &str = env!("SMOOTHSUM_BUILD");
/// Hard ceiling of the library's modulus arithmetic.
const LIBRARY_LIMIT: u64 = 10_000_000;

#[derive(Parser)]
#[command(name = "smoothsum", version = BUILD, about = "Exact values and certified bounds for character-exponential sums")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Slack for single root-of-unity identities.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance_identity: f64,
    /// Relative slack for sums.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tolerance_sum: f64,
    /// Largest accepted modulus.
    #[arg(long, global = true, default_value = "1e7", value_parser = parse_count)]
    limit_q: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Args, Clone)]
struct Instance {
    /// Character argument f, e.g. "(x^2+1)/(x-3)".
    #[arg(long, default_value = "x")]
    f: String,
    /// Additive phase g, e.g. "x^3/(x+2)".
    #[arg(long, default_value = "0")]
    g: String,
    /// Character: "q=1125;e=(3^2:4),(5^3:7)" or "q=1125;random-primitive;seed=S".
    #[arg(long)]
    chi: String,
    /// Interval (M, M+N]; defaults to a full period.
    #[arg(long, num_args = 2, value_names = ["M", "N"], allow_negative_numbers = true)]
    interval: Option<Vec<i64>>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a sum exactly.
    Eval {
        #[command(flatten)]
        inst: Instance,
        /// Evaluate every term from exact integers instead of tables.
        #[arg(long)]
        direct: bool,
    },
    /// Count roots of h modulo p^m.
    Roots {
        #[arg(long)]
        h: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum, default_value_t = RootMethod::Both)]
        method: RootMethod,
    },
    /// Postnikov constant, identity check and prime-power bound.
    Postnikov {
        #[arg(long)]
        chi: String,
        #[arg(long)]
        check_identity: bool,
        #[arg(long)]
        bound: bool,
        #[arg(long, default_value = "x")]
        f: String,
        #[arg(long, default_value = "0")]
        g: String,
    },
    /// Iterated differencing bound for an explicit split q = q_1 ... q_k Q.
    Vdc {
        /// Comma-separated "q1,...,qk,Q".
        #[arg(long)]
        q_split: String,
        #[command(flatten)]
        inst: Instance,
        /// Largest number of shift tuples averaged exhaustively.
        #[arg(long, default_value_t = 1_000_000)]
        tuple_limit: u64,
    },
    /// Certified bound on |sum|/N with the exact mean next to it.
    Bound {
        /// Modulus; must match the character.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value = "1/3", value_parser = parse_delta)]
        delta: Exponent,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[command(flatten)]
        inst: Instance,
        /// Also report the (uncertified) Weyl estimate for polynomial g.
        #[arg(long)]
        weyl: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Dominance scan over smooth moduli, one CSV row per instance.
    Scan {
        #[arg(long, value_enum, default_value_t = Family::Smooth)]
        family: Family,
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        qmax: u64,
        #[arg(long, default_value = "1/3", value_parser = parse_delta)]
        delta: Exponent,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Random characters per modulus.
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Use every n-th modulus.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Partial L-series sums and certified character-sum bounds.
    Lvalues {
        #[arg(long)]
        chi: String,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000", value_parser = parse_count)]
        cutoffs: Vec<u64>,
        #[arg(long, default_value = "1/3", value_parser = parse_delta)]
        delta: Exponent,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Run the property suites ("all" or a comma-separated list of ids).
    Verify {
        #[arg(default_value = "all")]
        which: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Check dominance on every n-th modulus of the end-to-end scan.
        #[arg(long, default_value_t = 1)]
        scan_stride: usize,
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        scan_qmax: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RootMethod {
    Brute,
    Lift,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Odd q in N(q^delta) with all prime factors at least 29.
    Smooth,
}

enum Failure {
    Usage(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(json!({ "error": format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or(""), "message": e.to_string() }).to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(json!({ "error": "Io", "message": e.to_string() }).to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(json!({ "error": "Usage", "message": msg.into() }).to_string())
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(format!("expected a non-negative integer, got '{s}'")),
    }
}

fn parse_delta(s: &str) -> Result<Exponent, String> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let (n, d): (u32, u32) = (n.trim().parse().map_err(|_| format!("bad numerator in '{s}'"))?, d.trim().parse().map_err(|_| format!("bad denominator in '{s}'"))?);
    if n == 0 || d == 0 || n > d {
        return Err(format!("delta must be a fraction in (0, 1], got '{s}'"));
    }
    Ok(Ratio::new(n, d))
}

fn ratfun(name: &str, s: &str) -> Result<RationalFunction, Failure> {
    RationalFunction::parse(s).map_err(|e| match e {
        Error::Syntax { pos, msg } => Failure::Usage(json!({ "error": "Syntax", "argument": name, "input": s, "position": pos, "message": msg }).to_string()),
        e => e.into(),
    })
}

fn character(spec: &str, limit: u64) -> Result<DirichletCharacter, Failure> {
    let chi = DirichletCharacter::from_spec(spec)?;
    if chi.modulus() > limit {
        return Err(Error::Overflow(format!("modulus {} exceeds limit {limit}", chi.modulus())).into());
    }
    Ok(chi)
}

fn instance(i: &Instance, limit: u64) -> Result<SumInstance, Failure> {
    let (f, g, chi) = (ratfun("f", &i.f)?, ratfun("g", &i.g)?, character(&i.chi, limit)?);
    let q = chi.modulus();
    let (start, len) = match i.interval.as_deref() {
        None => (0, q),
        Some(&[m, n]) if n >= 1 => (m, n as u64),
        _ => return Err(usage("--interval takes M N with N >= 1")),
    };
    Ok(SumInstance::new(f, g, chi, start, len))
}

fn c(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im, "abs": z.norm() })
}

fn report(command: &str, body: Value) -> Value {
    let mut out = json!({ "schema": SCHEMA, "build": BUILD, "command": command });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}

fn emit(v: &Value, path: Option<&PathBuf>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct CsvRow {
    q: u64,
    y: f64,
    case: String,
    k: usize,
    #[serde(rename = "Q")]
    big_q: u64,
    #[serde(rename = "N")]
    n: u64,
    abs_mean: f64,
    certified: f64,
    vacuous: bool,
    eta_nominal: f64,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let gl = &cli.global;
    if !(gl.tolerance_identity > 0.0 && gl.tolerance_sum > 0.0) {
        return Err(usage("tolerances must be positive"));
    }
    if gl.limit_q > LIBRARY_LIMIT {
        return Err(usage(format!("--limit-q may not exceed {LIBRARY_LIMIT}")));
    }
    if let Some(w) = gl.workers {
        rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global().map_err(|e| usage(e.to_string()))?;
    }
    let limit = gl.limit_q;
    match cli.cmd {
        Cmd::Eval { inst, direct } => {
            let si = instance(&inst, limit)?;
            let s = if direct { direct_sum(&si.f, &si.g, &si.chi, si.start, si.len) } else { brute_interval_sum(&si)? };
            emit(
                &report(
                    "eval",
                    json!({
                        "chi": si.chi.spec(), "f": si.f.to_string(), "g": si.g.to_string(),
                        "interval": [si.start, si.start + si.len as i64],
                        "sum_re": s.re, "sum_im": s.im, "abs": s.norm(), "n_terms": si.len,
                    }),
                ),
                None,
            )
        }
        Cmd::Roots { h, p, m, method } => {
            let hf = ratfun("h", &h)?;
            if p.checked_pow(m).is_none_or(|pm| pm > limit) {
                return Err(Error::Overflow(format!("{p}^{m} exceeds limit {limit}")).into());
            }
            let brute = matches!(method, RootMethod::Brute | RootMethod::Both).then(|| count_roots_with_denominator(&hf, p, m, Method::Brute)).transpose()?;
            let lift = matches!(method, RootMethod::Lift | RootMethod::Both).then(|| count_roots_with_denominator(&hf, p, m, Method::Lifting)).transpose()?;
            let main = lift.as_ref().or(brute.as_ref()).expect("one method runs");
            let agree = match (&brute, &lift) {
                (Some(a), Some(b)) => Some(a.count == b.count),
                _ => None,
            };
            emit(
                &report(
                    "roots",
                    json!({
                        "h": hf.to_string(), "p": p, "m": m,
                        "count": main.count, "bound": main.bound,
                        "method": match method { RootMethod::Brute => "brute", RootMethod::Lift => "lift", RootMethod::Both => "both" },
                        "agree": agree,
                    }),
                ),
                None,
            )?;
            if agree == Some(false) {
                return Err(Failure::Violation(format!("lifting and brute force disagree for h={h} p={p} m={m}")));
            }
            Ok(())
        }
        Cmd::Postnikov { chi, check_identity, bound, f, g } => {
            let chi = character(&chi, limit)?;
            let data = postnikov_constant(&chi)?;
            let mut body = json!({ "chi": chi.spec(), "C": data.c, "I": data.i_index, "J": data.j_index, "p": data.p, "m": data.m });
            let mut ok = true;
            if check_identity {
                let (p, m) = (data.p, data.m);
                let tol = gl.tolerance_identity;
                let ls: Vec<u32> = (1..m).filter(|&l| p.pow(l) > 2).collect();
                let bad: Vec<Value> = ls
                    .par_iter()
                    .flat_map_iter(|&l| (0..p.pow(m - l)).map(move |r| (l, r)))
                    .filter_map(|(l, r)| match postnikov_identity(&chi, &data, l, r) {
                        Ok((a, b)) if (a - b).norm() < tol => None,
                        _ => Some(json!({ "l": l, "r": r })),
                    })
                    .collect();
                let checked: u64 = ls.iter().map(|&l| p.pow(m - l)).sum();
                ok &= bad.is_empty();
                body["identity"] = json!({ "checked": checked, "violations": bad.len(), "first_violation": bad.first() });
            }
            if bound {
                let (f, g) = (ratfun("f", &f)?, ratfun("g", &g)?);
                let th = tau_h(&f, &g, &chi)?;
                let b = bound_prime_power(&f, &g, &chi)?;
                let brute = brute_complete_sum(&f, &g, &chi)?;
                let q = chi.modulus() as f64;
                let holds = brute.norm() / q <= b.value + gl.tolerance_sum;
                ok &= holds;
                body["f"] = json!(f.to_string());
                body["g"] = json!(g.to_string());
                body["tau"] = json!(th.tau);
                body["D"] = json!(th.d);
                body["bound"] = serde_json::to_value(&b).expect("serializable");
                body["brute"] = c(brute);
                body["brute_normalized"] = json!(brute.norm() / q);
            }
            body["ok"] = json!(ok);
            emit(&report("postnikov", body), None)?;
            if !ok {
                return Err(Failure::Violation("postnikov check failed; see report".into()));
            }
            Ok(())
        }
        Cmd::Vdc { q_split, inst, tuple_limit } => {
            let si = instance(&inst, limit)?;
            let parts: Vec<u64> = q_split.split(',').map(|s| parse_count(s.trim())).collect::<Result<_, _>>().map_err(usage)?;
            let Some((&big_q, qs)) = parts.split_last() else { return Err(usage("--q-split is empty")) };
            if parts.iter().product::<u64>() != si.q() {
                return Err(usage(format!("--q-split multiplies to {}, character modulus is {}", parts.iter().product::<u64>(), si.q())));
            }
            let sys = ShiftSystem::new(qs.to_vec(), big_q, si.len)?;
            let a = si.summand()?;
            let rep = vdc_certified(&a, &sys, si.start, EMode::Exhaustive { limit: tuple_limit })?;
            let holds = rep.mean_abs <= rep.bound.value + gl.tolerance_identity;
            emit(
                &report(
                    "vdc",
                    json!({
                        "q_split": parts, "ms": sys.ms, "mean_abs": rep.mean_abs, "certified": rep.bound.value,
                        "vacuous": rep.bound.vacuous, "E1": rep.e.e1, "E2": rep.e.e2, "tuples": rep.e.tuples,
                        "trace": rep.bound.trace, "ok": holds,
                    }),
                ),
                None,
            )?;
            if !holds {
                return Err(Failure::Violation(format!("mean {} exceeds certified {}", rep.mean_abs, rep.bound.value)));
            }
            Ok(())
        }
        Cmd::Bound { q, delta, epsilon, inst, weyl, json: out } => {
            let si = instance(&inst, limit)?;
            if q.is_some_and(|q| q != si.q()) {
                return Err(usage(format!("--q {} does not match the character modulus {}", q.unwrap(), si.q())));
            }
            let rep = certified_incomplete_bound(&si, delta, epsilon)?;
            let mean = brute_interval_sum(&si)?.norm() / si.len as f64;
            let holds = mean <= rep.bound.value + gl.tolerance_identity;
            let mut body = json!({
                "chi": si.chi.spec(), "f": si.f.to_string(), "g": si.g.to_string(),
                "delta": delta.to_string(), "epsilon": epsilon, "interval": [si.start, si.start + si.len as i64],
                "abs_mean": mean, "certified": rep.bound.value, "vacuous": rep.bound.vacuous,
                "split": rep.split, "eta_nominal": rep.eta_nominal, "trace": rep.bound.trace, "ok": holds,
            });
            if weyl && si.g.is_polynomial() && si.g.deg() >= 2 {
                body["weyl_reference"] = serde_json::to_value(weyl_reference(&si.g, si.q(), si.len, epsilon)?).expect("serializable");
            }
            emit(&report("bound", body), out.as_ref())?;
            if !holds {
                return Err(Failure::Violation(format!("mean {mean} exceeds certified {}", rep.bound.value)));
            }
            Ok(())
        }
        Cmd::Scan { family: Family::Smooth, qmax, delta, epsilon, trials, stride, seed, csv: path } => {
            if qmax > limit {
                return Err(usage(format!("--qmax {qmax} exceeds --limit-q {limit}")));
            }
            let moduli: Vec<u64> = verify::scan_moduli(qmax, delta).into_iter().step_by(stride.max(1)).collect();
            let jobs: Vec<(u64, u64)> = moduli.iter().enumerate().flat_map(|(i, &q)| (0..trials).map(move |t| (q, i as u64 * trials + t))).collect();
            let results: Vec<Result<Vec<verify::ScanRow>, Error>> =
                jobs.par_iter().map(|&(q, idx)| verify::scan_modulus(q, seed, idx, delta, epsilon).map(|r| r.0)).collect();
            let sink: Box<dyn Write> = match &path {
                Some(p) => Box::new(std::fs::File::create(p)?),
                None => Box::new(std::io::stdout()),
            };
            let mut w = csv::Writer::from_writer(sink);
            let mut worst: Option<verify::ScanRow> = None;
            let (mut rows, mut nonvacuous) = (0u64, 0u64);
            for r in results {
                for row in r? {
                    rows += 1;
                    nonvacuous += !row.vacuous as u64;
                    if row.abs_mean > row.certified + gl.tolerance_identity && worst.as_ref().is_none_or(|w| row.q < w.q) {
                        worst = Some(row.clone());
                    }
                    w.serialize(CsvRow {
                        q: row.q,
                        y: row.y,
                        case: row.case,
                        k: row.k,
                        big_q: row.big_q,
                        n: row.n,
                        abs_mean: row.abs_mean,
                        certified: row.certified,
                        vacuous: row.vacuous,
                        eta_nominal: row.eta_nominal,
                    })
                    .map_err(|e| usage(e.to_string()))?;
                }
            }
            w.flush()?;
            eprintln!("scan: {} moduli, {rows} instances, {nonvacuous} non-vacuous", moduli.len());
            if let Some(r) = worst {
                return Err(Failure::Violation(format!("smallest violation: q={} N={} g={}: {} > {}", r.q, r.n, r.g, r.abs_mean, r.certified)));
            }
            Ok(())
        }
        Cmd::Lvalues { chi, t, cutoffs, delta, epsilon } => {
            let chi = character(&chi, limit)?;
            let rep = l_value_partial(&chi, t, &cutoffs)?;
            let bounds: Vec<Value> = if chi.is_principal() {
                Vec::new()
            } else {
                cutoffs
                    .iter()
                    .map(|&x| {
                        let b = nonprincipal_char_sum_bound(&chi, 0, x, delta, epsilon)?;
                        let exact = direct_sum(&RationalFunction::x(), &RationalFunction::zero(), &chi, 0, x).norm() / x as f64;
                        Ok(json!({ "cutoff": x, "abs_mean": exact, "certified": b.value, "trace": b.trace }))
                    })
                    .collect::<Result<_, Error>>()?
            };
            emit(&report("lvalues", json!({ "chi": chi.spec(), "partial_sums": rep, "character_sum_bounds": bounds })), None)
        }
        Cmd::Verify { which, seed, scan_stride, scan_qmax, json: out } => {
            let ids: Vec<u32> = if which == "all" {
                (1..=10).collect()
            } else {
                which.split(',').map(|s| s.trim().parse::<u32>().ok().filter(|i| (1..=10).contains(i))).collect::<Option<_>>().ok_or_else(|| usage(format!("unknown suite list '{which}'")))?
            };
            if scan_qmax > limit {
                return Err(usage(format!("--scan-qmax {scan_qmax} exceeds --limit-q {limit}")));
            }
            let cfg = VerifyConfig { seed, tol_identity: gl.tolerance_identity, tol_sum: gl.tolerance_sum, scan_stride, scan_qmax };
            let suites: [fn(&VerifyConfig) -> SuiteResult; 10] = [
                verify::criterion_1,
                verify::criterion_2,
                verify::criterion_3,
                verify::criterion_4,
                verify::criterion_5,
                verify::criterion_6,
                verify::criterion_7,
                verify::criterion_8,
                verify::criterion_9,
                verify::criterion_10,
            ];
            let mut results = Vec::new();
            for id in ids {
                let r = suites[id as usize - 1](&cfg);
                eprintln!("{}", verify::summary_line(&r));
                results.push(r);
            }
            let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
            emit(&report("verify", json!({ "config": cfg, "suites": results, "failed": failed })), out.as_ref())?;
            if !failed.is_empty() {
                let first = results.iter().find(|r| !r.passed).and_then(|r| r.first_violation.clone()).unwrap_or_else(|| "threshold not met".into());
                return Err(Failure::Violation(format!("suites {failed:?} failed; {first}")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("{}", json!({ "error": "Violation", "message": msg }));
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
