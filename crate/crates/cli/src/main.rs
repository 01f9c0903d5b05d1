use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use fourbessel::crosscheck::{
    evaluate, in_resonance_band, max_deviation, run_grid, summarize, GridSpec, Outcome, PointReport,
    ACCEPTANCE_GRID, ALL_METHODS,
};
use fourbessel::{selftest, Error, EvalRequest, EvalResult, Method, Parameters};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "fourbessel", version, about = "Integrals of x^mu times four Bessel functions J")]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one integral
    Eval(EvalArgs),
    /// Evaluate over a list of tau = b/a values and print CSV
    Sweep(SweepArgs),
    /// Run every point of a grid file with several methods and compare
    Crosscheck(CrossArgs),
    /// Quick built-in consistency checks
    Selftest,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Closed,
    Contour,
    Residue,
    Oracle,
    All,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Closed => vec![Method::ClosedForm],
            MethodArg::Contour => vec![Method::ContourQuad],
            MethodArg::Residue => vec![Method::ResidueSeries],
            MethodArg::Oracle => vec![Method::Oracle],
            MethodArg::All => ALL_METHODS.to_vec(),
        }
    }
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long, allow_hyphen_values = true)]
    delta: f64,
    #[arg(long, value_enum, default_value = "closed")]
    method: MethodArg,
    /// Relative tolerance of the hypergeometric series
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
}

impl ParamArgs {
    fn params(&self) -> Parameters {
        Parameters::new(self.mu, self.alpha, self.beta, self.gamma, self.delta)
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    p: ParamArgs,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    a: f64,
    /// Second scale; defaults to a * tau
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    p: ParamArgs,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Comma-separated values or start:stop:step
    #[arg(long)]
    tau: String,
}

#[derive(Args)]
struct CrossArgs {
    /// Grid file; the bundled acceptance grid when omitted
    grid: Option<PathBuf>,
    /// Write the CSV report here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Invalid(_) | Error::DomainError(_) | Error::NonFinite(_) | Error::UnsupportedOrder(_) => EXIT_INPUT,
        _ => EXIT_NUMERIC,
    }
}

fn json_result(req: &EvalRequest, r: &EvalResult) -> Value {
    let mut v = serde_json::to_value(req).expect("request serializes");
    let extra = serde_json::to_value(r).expect("result serializes");
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn cmd_eval(args: EvalArgs) -> ExitCode {
    let b = match (args.b, args.tau) {
        (Some(b), None) => b,
        (None, Some(t)) => args.a * t,
        (Some(_), Some(_)) => {
            eprintln!("error: give either --b or --tau, not both");
            return ExitCode::from(EXIT_INPUT);
        }
        (None, None) => {
            eprintln!("error: --b or --tau is required");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let req = EvalRequest { params: args.p.params(), a: args.a, b };
    let methods = args.p.method.methods();
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for m in &methods {
        match evaluate(*m, &req, args.p.rel_tol) {
            Ok(r) => results.push(r),
            Err(e) => {
                if matches!(e, Error::Invalid(_)) {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_INPUT);
                }
                failures.push((*m, e))
            }
        }
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if args.json {
        let body = if methods.len() == 1 {
            results.first().map(|r| json_result(&req, r))
        } else {
            Some(Value::Array(results.iter().map(|r| json_result(&req, r)).collect()))
        };
        if let Some(b) = body {
            let _ = writeln!(out, "{b}");
        }
    } else {
        for r in &results {
            let _ = writeln!(
                out,
                "value={} abs_err_est={} method={} branch={}",
                num(r.value),
                num(r.abs_err_est),
                r.method,
                r.branch
            );
        }
        if methods.len() > 1 && results.len() > 1 {
            let _ = writeln!(out, "max_deviation={}", num(max_deviation(&results)));
        }
    }
    for (m, e) in &failures {
        eprintln!("error: {m}: {e}");
    }
    match failures.first() {
        Some((_, e)) if results.is_empty() || methods.len() == 1 => ExitCode::from(exit_for(e)),
        Some(_) => ExitCode::from(EXIT_NUMERIC),
        None => ExitCode::SUCCESS,
    }
}

fn parse_taus(s: &str) -> Result<Vec<f64>, String> {
    let bad = |t: &str| format!("bad tau value '{t}'");
    let mut v = if let [a, b, c] = s.split(':').collect::<Vec<_>>().as_slice() {
        let (a, b, c): (f64, f64, f64) = (
            a.trim().parse().map_err(|_| bad(a))?,
            b.trim().parse().map_err(|_| bad(b))?,
            c.trim().parse().map_err(|_| bad(c))?,
        );
        if !(c > 0.0) || !(b >= a) {
            return Err("range needs start <= stop and step > 0".into());
        }
        let n = ((b - a) / c + 1e-9).floor() as usize;
        (0..=n).map(|i| a + i as f64 * c).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad(t)))
            .collect::<Result<Vec<_>, _>>()?
    };
    if v.is_empty() || v.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err("tau values must be positive and finite".into());
    }
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

pub const SWEEP_HEADER: [&str; 8] =
    ["tau", "value", "abs_err_est", "method", "branch", "terms_used", "slow_convergence", "error"];

fn cmd_sweep(args: SweepArgs) -> ExitCode {
    let taus = match parse_taus(&args.tau) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let params = args.p.params();
    let methods = args.p.method.methods();
    let all = methods.len() > 1;
    let rows: Vec<(f64, Vec<Result<EvalResult, Error>>)> = {
        use rayon::prelude::*;
        taus.par_iter()
            .map(|&tau| {
                if in_resonance_band(tau) {
                    return (tau, Vec::new());
                }
                let req = EvalRequest { params, a: args.a, b: args.a * tau };
                (tau, methods.iter().map(|m| evaluate(*m, &req, args.p.rel_tol)).collect())
            })
            .collect()
    };
    let mut w = csv::Writer::from_writer(io::stdout());
    let mut header: Vec<&str> = SWEEP_HEADER.to_vec();
    if all {
        header.push("max_deviation");
    }
    let _ = w.write_record(&header);
    let mut failed = 0;
    let mut total = 0;
    let mut worst_exit = EXIT_INPUT;
    for (tau, results) in &rows {
        if results.is_empty() {
            total += 1;
            failed += 1;
            let mut rec = vec![num(*tau), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), "resonance-band".into()];
            if all {
                rec.push(String::new());
            }
            let _ = w.write_record(&rec);
            continue;
        }
        let ok: Vec<EvalResult> = results.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
        let dev = if ok.len() > 1 { num(max_deviation(&ok)) } else { String::new() };
        for (m, r) in methods.iter().zip(results) {
            total += 1;
            let mut rec = match r {
                Ok(r) => vec![
                    num(*tau),
                    num(r.value),
                    num(r.abs_err_est),
                    r.method.to_string(),
                    r.branch.to_string(),
                    r.diagnostics.terms_used.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(";"),
                    r.diagnostics.slow_convergence.to_string(),
                    String::new(),
                ],
                Err(e) => {
                    failed += 1;
                    if exit_for(e) == EXIT_NUMERIC {
                        worst_exit = EXIT_NUMERIC;
                    }
                    vec![num(*tau), String::new(), String::new(), m.to_string(), String::new(), String::new(), String::new(), e.to_string()]
                }
            };
            if all {
                rec.push(dev.clone());
            }
            let _ = w.write_record(&rec);
        }
    }
    let _ = w.flush();
    if failed == total {
        ExitCode::from(worst_exit)
    } else {
        ExitCode::SUCCESS
    }
}

fn report_csv(reports: &[PointReport], out: impl Write) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "mu", "alpha", "beta", "gamma", "delta", "tau", "outcome", "closed", "contour", "residue", "oracle",
        "max_deviation", "note",
    ])?;
    for r in reports {
        let p = &r.params;
        let mut rec = vec![num(p.mu), num(p.alpha), num(p.beta), num(p.gamma_), num(p.delta), num(r.tau), r.outcome.to_string()];
        for m in ALL_METHODS {
            rec.push(r.results.iter().find(|x| x.method == m).map(|x| num(x.value)).unwrap_or_default());
        }
        rec.push(if r.results.len() > 1 { num(r.max_deviation) } else { String::new() });
        rec.push(r.note.clone());
        w.write_record(&rec)?;
    }
    w.flush()
}

fn cmd_crosscheck(args: CrossArgs) -> ExitCode {
    let text = match &args.grid {
        Some(path) => match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT);
            }
        },
        None => ACCEPTANCE_GRID.to_string(),
    };
    let grid = match GridSpec::parse(&text) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let reports = run_grid(&grid, args.rel_tol);
    let written = match &args.report {
        Some(path) => fs::File::create(path).and_then(|f| report_csv(&reports, f)),
        None => report_csv(&reports, io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    let s = summarize(&reports);
    eprintln!(
        "summary: {} points, {} pass, {} fail, {} skipped (degenerate), {} skipped (invalid)",
        reports.len(),
        s.pass,
        s.fail,
        s.skipped_degenerate,
        s.skipped_invalid
    );
    for r in reports.iter().filter(|r| r.outcome == Outcome::Fail) {
        eprintln!("FAIL {:?} tau={}: {}", r.params, r.tau, r.note);
    }
    if s.fail == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NUMERIC)
    }
}

fn cmd_selftest() -> ExitCode {
    let grid = GridSpec::parse(ACCEPTANCE_GRID).expect("bundled grid parses");
    let checks = selftest::run_all(&grid);
    let mut ok = true;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NUMERIC)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(EXIT_INPUT);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Crosscheck(a) => cmd_crosscheck(a),
        Command::Selftest => cmd_selftest(),
    }
}
