use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use lhmf::arith::{pell_fundamental, Discriminant};
use lhmf::characters::GenusCharacter;
use lhmf::classical::{self, QSeries};
use lhmf::cycles::{cycle_integral_adaptive, via_fundamental_domain};
use lhmf::qforms::class_representatives;
use lhmf::series::*;
use lhmf::suites::{self, SuiteConfig};
use lhmf::{Complex64, Error, QForm, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "lhmf", version, about = "Hyperbolic Eisenstein series, cycle integrals and verification suites")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum QexpFn {
    E2,
    E4,
    E6,
    Delta,
    J,
    Jprime,
    Jm,
}

#[derive(Clone, Copy, ValueEnum)]
enum CycleFn {
    /// The constant function 1.
    One,
    J,
    E2star,
    /// j′(τ)/(j(·) − j(τ)) − E₂*(τ) at the point given by --tau.
    Kernel,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum EvalFn {
    Zagier,
    Parson,
    ParsonPeriod,
    Eis,
    EisTilde,
    EisHat,
    Eis2Fourier,
    EiskFourier,
    Lhmf,
    Petersson,
    Niebur,
    Phi,
    Quantum,
}

#[derive(Subcommand)]
enum Cmd {
    /// Class representatives of discriminant D.
    Classes {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// Genus character χ_d on a form.
    Char {
        #[arg(long)]
        disc: i64,
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, allow_hyphen_values = true)]
        form: QForm,
    },
    /// Exact q-expansion coefficients.
    Qexp {
        #[arg(long = "fn", value_enum)]
        func: QexpFn,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Cycle integral C_k(h, Q).
    Cycle {
        #[arg(long, default_value_t = 0)]
        weight: i32,
        #[arg(long, allow_hyphen_values = true)]
        form: QForm,
        #[arg(long = "fn", value_enum, default_value = "one")]
        func: CycleFn,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        tau: Option<Complex64>,
    },
    /// Evaluate one of the series at τ, or on a grid of τ as CSV.
    Eval {
        #[arg(long = "fn", value_enum)]
        func: EvalFn,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        tau: Option<Complex64>,
        /// Second point for petersson.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z2: Option<Complex64>,
        #[arg(long, default_value_t = 5)]
        disc: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value_t = 6)]
        weight: u32,
        #[arg(long, value_parser = parse_point_any, default_value = "0,0", allow_hyphen_values = true)]
        s: Complex64,
        /// Form for parson / single-class lhmf.
        #[arg(long, allow_hyphen_values = true)]
        form: Option<QForm>,
        /// Fourier index for niebur / phi.
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        m: i64,
        /// Rational x = p/q for quantum.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// R,rowmax,nmax,M,tol
        #[arg(long)]
        budget: Option<String>,
        /// u0,u1,nu,v0,v1,nv: CSV over a grid instead of a single τ.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Run a verification suite; exits non-zero if any check fails.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 5)]
        disc: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value_t = 6)]
        weight: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        budget: Option<String>,
        /// Include wall time in the report.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn parse_point_any(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected re,im but got '{s}'"));
    }
    let re = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let im = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok(Complex64::new(re, im))
}

fn parse_point(s: &str) -> std::result::Result<Complex64, String> {
    let z = parse_point_any(s)?;
    if z.im <= 0.0 {
        return Err(format!("τ must lie in the upper half-plane, got '{s}'"));
    }
    Ok(z)
}

/// Budget from `--budget`, else from the LHMF_BUDGET profile (fast | default | accurate).
fn budget_from(arg: Option<&str>) -> Result<EvalBudget> {
    let base = match std::env::var("LHMF_BUDGET").as_deref() {
        Ok("fast") => EvalBudget { r: 80.0, rowmax: 16.0, nodes: 32, tol: 1e-7, ..EvalBudget::default() },
        Ok("accurate") => EvalBudget { r: 800.0, rowmax: 60.0, tol: 1e-11, ..EvalBudget::default() },
        Ok("default") | Err(_) => EvalBudget::default(),
        Ok(other) => return Err(Error::Domain(format!("unknown LHMF_BUDGET profile '{other}'"))),
    };
    let Some(s) = arg else { return Ok(base) };
    let p: Vec<&str> = s.split(',').map(str::trim).collect();
    if p.len() != 5 {
        return Err(Error::Domain(format!("--budget expects R,rowmax,nmax,M,tol; got '{s}'")));
    }
    let bad = |what: &str| Error::Domain(format!("cannot parse {what} in --budget '{s}'"));
    Ok(EvalBudget {
        r: p[0].parse().map_err(|_| bad("R"))?,
        rowmax: p[1].parse().map_err(|_| bad("rowmax"))?,
        nmax: p[2].parse().map_err(|_| bad("nmax"))?,
        m: p[3].parse().map_err(|_| bad("M"))?,
        tol: p[4].parse().map_err(|_| bad("tol"))?,
        ..base
    })
}

fn parse_rational(s: &str) -> Result<num_rational::BigRational> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: i64 = p.trim().parse().map_err(|_| Error::Domain(format!("cannot parse rational '{s}'")))?;
    let q: i64 = q.trim().parse().map_err(|_| Error::Domain(format!("cannot parse rational '{s}'")))?;
    if q == 0 {
        return Err(Error::Domain("zero denominator".into()));
    }
    Ok(rational(p, q))
}

fn series_json(s: &QSeries) -> serde_json::Value {
    json!({
        "lead": s.lead,
        "coeffs": s.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

fn print_json(v: &serde_json::Value) {
    emit(&(serde_json::to_string_pretty(v).expect("serialisable") + "\n"));
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

struct EvalArgs {
    func: EvalFn,
    z2: Option<Complex64>,
    disc: i64,
    d: i64,
    weight: u32,
    s: Complex64,
    form: Option<QForm>,
    m: i64,
    budget: EvalBudget,
}

fn need<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Domain(format!("--{what} is required for this function")))
}

fn single(value: Complex64, budget: &EvalBudget) -> EvalResult {
    EvalResult { value, err_estimate: 0.0, terms: 0, budget_used: *budget }
}

fn eval_at(a: &EvalArgs, tau: Complex64) -> Result<EvalResult> {
    let b = &a.budget;
    match a.func {
        EvalFn::Zagier => zagier_f(a.weight / 2, a.disc, tau, b),
        EvalFn::Parson => parson_f(a.weight / 2, &need(a.form, "form")?, tau, b),
        EvalFn::ParsonPeriod => Ok(single(parson_period(a.weight / 2, &need(a.form, "form")?, tau)?, b)),
        EvalFn::Eis => eis_e(&EisParams::new(a.weight, a.disc, a.d, a.s)?, tau, b),
        EvalFn::EisTilde => Ok(single(eis_tilde(&EisParams::new(a.weight, a.disc, a.d, a.s)?, tau)?, b)),
        EvalFn::EisHat => eis_hat(&EisParams::new(a.weight, a.disc, a.d, a.s)?, tau, b, HatRoute::Direct),
        EvalFn::Eis2Fourier => eis2_fourier(a.disc, a.d, tau, b),
        EvalFn::EiskFourier => eisk_fourier(a.weight, a.disc, a.d, tau, b),
        EvalFn::Lhmf => {
            let scope = match a.form {
                Some(q) => LhmfScope::Class(q),
                None => LhmfScope::AllForms(a.disc),
            };
            lhmf_f(a.weight / 2, scope, tau, b)
        }
        EvalFn::Petersson => petersson_p(a.weight, tau, need(a.z2, "z2")?, b, PeterssonNorm::FullGroup, Presentation::Auto),
        EvalFn::Niebur => niebur_g(a.m, tau, a.weight as f64 / 2.0, b),
        EvalFn::Phi => maass_poincare_phi(2 - a.weight as i32, a.m, tau, b),
        EvalFn::Quantum => Err(Error::Domain("quantum takes --x, not --tau".into())),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Classes { disc } => {
            let reps = class_representatives(disc)?;
            let pell = pell_fundamental(Discriminant::indefinite(disc)?)?;
            print_json(&json!({
                "disc": disc,
                "class_number": reps.len(),
                "representatives": reps,
                "pell": {"t": pell.t.to_string(), "r": pell.r.to_string()},
            }));
        }
        Cmd::Char { disc, d, form } => {
            if form.disc() != disc {
                return Err(Error::Domain(format!("form {form} has discriminant {}, not {disc}", form.disc())));
            }
            let v = GenusCharacter::new(d, disc)?.eval_with_witness(&form)?;
            print_json(&serde_json::to_value(v).expect("serialisable"));
        }
        Cmd::Qexp { func, m, order } => {
            let s = match func {
                QexpFn::E2 => classical::eisenstein_qexp(2, order)?,
                QexpFn::E4 => classical::eisenstein_qexp(4, order)?,
                QexpFn::E6 => classical::eisenstein_qexp(6, order)?,
                QexpFn::Delta => classical::delta_qexp(order),
                QexpFn::J => classical::j_qexp(order),
                QexpFn::Jprime => classical::jprime_qexp(order),
                QexpFn::Jm => classical::faber_jm(m, order),
            };
            print_json(&series_json(&s));
        }
        Cmd::Cycle { weight, form, func, nodes, tau } => {
            let h: Box<dyn Fn(Complex64) -> Complex64> = match func {
                CycleFn::One => Box::new(|_| Complex64::new(1.0, 0.0)),
                CycleFn::J => Box::new(via_fundamental_domain(classical::j, 0)),
                CycleFn::E2star => Box::new(classical::e2star),
                CycleFn::Kernel => {
                    let t = need(tau, "tau")?;
                    let ct = classical::classical_at(t);
                    Box::new(move |w| ct.jprime / (classical::j(w) - ct.j) - ct.e2star)
                }
            };
            let r = cycle_integral_adaptive(h, weight, &form, nodes, 1e-9)?;
            print_json(&serde_json::to_value(r).expect("serialisable"));
        }
        Cmd::Eval { func, tau, z2, disc, d, weight, s, form, m, x, budget, grid } => {
            let budget = budget_from(budget.as_deref())?;
            if func == EvalFn::Quantum {
                let x = parse_rational(&need(x, "x")?)?;
                let v = quantum_limit(weight / 2 + 1, disc, &x)?;
                print_json(&json!({"x": x.to_string(), "kappa": weight / 2 + 1, "value": v.to_string()}));
                return Ok(true);
            }
            let args = EvalArgs { func, z2, disc, d, weight, s, form, m, budget };
            if let Some(g) = grid {
                let p: Vec<f64> = g
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Domain(format!("cannot parse --grid '{g}'")))?;
                if p.len() != 6 || p[2] < 1.0 || p[5] < 1.0 {
                    return Err(Error::Domain("--grid expects u0,u1,nu,v0,v1,nv".into()));
                }
                let step = |lo: f64, hi: f64, n: f64, i: usize| if n <= 1.0 { lo } else { lo + (hi - lo) * i as f64 / (n - 1.0) };
                let stdout = std::io::stdout();
                let mut out = stdout.lock();
                let _ = writeln!(out, "u,v,re,im,err_estimate,status");
                for iv in 0..p[5] as usize {
                    for iu in 0..p[2] as usize {
                        let t = Complex64::new(step(p[0], p[1], p[2], iu), step(p[3], p[4], p[5], iv));
                        let _ = match eval_at(&args, t) {
                            Ok(r) => writeln!(out, "{},{},{},{},{},ok", t.re, t.im, r.value.re, r.value.im, r.err_estimate),
                            Err(Error::OnNet(..)) => writeln!(out, "{},{},,,,on-net", t.re, t.im),
                            Err(e) => writeln!(out, "{},{},,,,\"{}\"", t.re, t.im, e),
                        };
                    }
                }
            } else {
                let r = eval_at(&args, need(tau, "tau")?)?;
                print_json(&serde_json::to_value(r).expect("serialisable"));
            }
        }
        Cmd::Verify { suite, disc, d, weight, seed, format, budget, timing, out } => {
            let cfg = SuiteConfig { seed, disc, d, weight, budget: budget_from(budget.as_deref())? };
            let start = Instant::now();
            let mut report = suites::run(&suite, &cfg)?;
            if timing {
                report.runtime_ms = Some(start.elapsed().as_millis() as u64);
            }
            let text = match format {
                Format::Json => report.to_json() + "\n",
                Format::Table => report.to_table(),
            };
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?,
                None => emit(&text),
            }
            return Ok(report.pass());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
