//! bsx — evaluate extremal entire approximants, tabulate their closed-form
//! L¹ errors, and run verification certificates.
//!
//! Exit codes: 0 success/pass, 1 failed certificate, 2 usage or domain
//! error, 3 constraint violation, 4 numeric non-convergence.

use bsx_core::approximants::{closed_form_error, ApproximantHandle};
use bsx_core::base::ApproxKind;
use bsx_core::error::Error as CoreError;
use bsx_core::subordination::{closed_form_error_nu, Measure, SubordinatedHandle};
use bsx_core::verification::{
    estimate_exponential_type, numeric_l1_error, verify_nodes, verify_one_sided,
    verify_sign_two_sided, Certificate, GridSpec, L1Mode, Spacing, DEFAULT_CERT_TOL,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;
use std::process::ExitCode;

mod emit;
mod runtime;

use emit::{fmt17, EvalRecord, Format};
use runtime::{EvalTarget, Problem};

#[derive(Parser)]
#[command(name = "bsx", version, about = "Extremal entire approximants of exponential type: evaluation, error tables, verification certificates", max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate target/approximant pairs over a grid, emitting one record
    /// per point.
    Eval(EvalArgs),
    /// Tabulate closed-form L¹ errors, optionally cross-checked by
    /// quadrature.
    Errors(ErrorsArgs),
    /// Run a verification certificate; exit 0 exactly when it passes.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// Best two-sided approximation K
    K,
    /// Extremal minorant L
    L,
    /// Extremal majorant M
    M,
    /// Subordinated two-sided 𝔎_ν
    Knu,
    /// Subordinated minorant 𝔏_ν
    Lnu,
    /// Subordinated majorant 𝔐_ν
    Mnu,
    /// Odd two-sided K̃
    Kodd,
    /// Odd minorant L̃
    Lodd,
    /// Odd majorant M̃
    Modd,
}

impl KindArg {
    fn approx_kind(self) -> ApproxKind {
        match self {
            KindArg::K | KindArg::Knu | KindArg::Kodd => ApproxKind::TwoSided,
            KindArg::L | KindArg::Lnu | KindArg::Lodd => ApproxKind::Minorant,
            KindArg::M | KindArg::Mnu | KindArg::Modd => ApproxKind::Majorant,
        }
    }
    fn is_measure(self) -> bool {
        matches!(self, KindArg::Knu | KindArg::Lnu | KindArg::Mnu)
    }
    fn is_odd(self) -> bool {
        matches!(self, KindArg::Kodd | KindArg::Lodd | KindArg::Modd)
    }
}

#[derive(Args)]
struct ProblemArgs {
    /// Decay rate λ > 0 of the base target
    #[arg(long)]
    lambda: Option<f64>,
    /// Shift c, or `auto` for the endpoint value e^(-lambda/delta)
    #[arg(long, default_value = "auto")]
    c: String,
    /// Measure descriptor: power:alpha=A | atoms:l1:w1[,l2:w2...] | table:FILE.csv
    #[arg(long)]
    measure: Option<String>,
    /// Type scale δ > 0
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Evaluation tolerance (default 1e-11, or the BSX_TOL environment variable)
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct EvalArgs {
    /// Which approximant to evaluate
    #[arg(long, value_enum, ignore_case = true)]
    kind: KindArg,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Grid: min:max:count[:uniform|log|chebyshev]
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
}

#[derive(Args)]
struct ErrorsArgs {
    /// Decay rates λ, comma-separated for a cartesian table
    #[arg(long)]
    lambda: Option<String>,
    /// Shift c, or `auto` for the endpoint value e^(-lambda/delta)
    #[arg(long, default_value = "auto")]
    c: String,
    /// Measure descriptor (instead of --lambda)
    #[arg(long)]
    measure: Option<String>,
    /// Type scales δ, comma-separated
    #[arg(long, default_value = "1")]
    delta: String,
    /// Restrict to one kind (default: all applicable kinds)
    #[arg(long, value_enum, ignore_case = true)]
    kind: Option<ErrorKindArg>,
    /// Evaluate every kind (the default when --kind is absent)
    #[arg(long, default_value_t = false)]
    all_kinds: bool,
    /// Add a numeric L¹ column computed by quadrature plus the relative
    /// mismatch against the closed form
    #[arg(long, default_value_t = false)]
    check: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ErrorKindArg {
    TwoSided,
    Minorant,
    Majorant,
}

impl ErrorKindArg {
    fn kind(self) -> ApproxKind {
        match self {
            ErrorKindArg::TwoSided => ApproxKind::TwoSided,
            ErrorKindArg::Minorant => ApproxKind::Minorant,
            ErrorKindArg::Majorant => ApproxKind::Majorant,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(subcommand)]
    claim: VerifyClaim,
}

#[derive(Subcommand)]
enum VerifyClaim {
    /// sin(πδx)(target − approx) ≥ 0 on a grid (two-sided optimality sign)
    Sign {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_CERT_TOL)]
        tol_cert: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// approx ≤ target everywhere (extremal minorant)
    Minorant {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_CERT_TOL)]
        tol_cert: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// approx ≥ target everywhere (extremal majorant)
    Majorant {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_CERT_TOL)]
        tol_cert: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Interpolation residuals at the integer nodes
    Nodes {
        /// K, L or M (with measure descriptors: the subordinated variants)
        #[arg(long, value_enum, ignore_case = true)]
        kind: KindArg,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Node range lo:hi
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        /// Also check first derivatives (one-sided kinds)
        #[arg(long, default_value_t = false)]
        derivatives: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Numeric L¹ error vs the closed form (relative tolerance 1e-6)
    L1 {
        #[arg(long, value_enum, ignore_case = true)]
        kind: KindArg,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 1e-6)]
        tol_rel: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Imaginary-axis growth slope vs the expected type kπδ
    Type {
        #[arg(long, value_enum, ignore_case = true)]
        kind: KindArg,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Expected type order k (1 for K, 2 for L/M)
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 20.0)]
        ymax: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Paper integral identities: ev1, ev2 (needs --lambda), poisson
    /// (needs --lambda)
    Identity {
        /// ev1 | ev2 | poisson
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol_abs: f64,
        #[arg(long)]
        out: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CoreError::ConstraintViolation(_) => ExitCode::from(3),
                CoreError::NonConvergence(_) | CoreError::Overflow(_) => ExitCode::from(4),
                CoreError::DomainError(_) => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> bsx_core::Result<ExitCode> {
    match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Errors(args) => cmd_errors(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn parse_grid(spec: &str) -> bsx_core::Result<GridSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err(CoreError::domain(format!(
            "grid `{spec}` must be min:max:count[:spacing]"
        )));
    }
    let x_min: f64 = parts[0]
        .parse()
        .map_err(|e| CoreError::domain(format!("bad grid min: {e}")))?;
    let x_max: f64 = parts[1]
        .parse()
        .map_err(|e| CoreError::domain(format!("bad grid max: {e}")))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|e| CoreError::domain(format!("bad grid count: {e}")))?;
    let spacing = match parts.get(3).copied().unwrap_or("uniform") {
        "uniform" => Spacing::Uniform,
        "log" => Spacing::Log,
        "chebyshev" => Spacing::Chebyshev,
        other => {
            return Err(CoreError::domain(format!(
                "unknown spacing `{other}` (uniform|log|chebyshev)"
            )))
        }
    };
    GridSpec::new(x_min, x_max, count, spacing)
}

fn parse_range(spec: &str) -> bsx_core::Result<(i64, i64)> {
    let (lo, hi) = spec
        .split_once(':')
        .ok_or_else(|| CoreError::domain(format!("range `{spec}` must be lo:hi")))?;
    let lo = lo
        .parse()
        .map_err(|e| CoreError::domain(format!("bad range: {e}")))?;
    let hi = hi
        .parse()
        .map_err(|e| CoreError::domain(format!("bad range: {e}")))?;
    Ok((lo, hi))
}

fn cmd_eval(args: EvalArgs) -> bsx_core::Result<ExitCode> {
    let grid = parse_grid(&args.grid)?;
    let problem = Problem::build(&args.problem, args.kind)?;
    let delta = problem.delta();
    let mut out = std::io::stdout().lock();
    emit::header(&mut out, args.format);
    for x in grid.points(delta) {
        let t = problem.target(x)?;
        let v = problem.approx(x)?;
        let margin = match args.kind.approx_kind() {
            ApproxKind::TwoSided => {
                bsx_core::special::sin_pi(Complex64::new(delta * x, 0.0)).re * (t - v)
            }
            ApproxKind::Minorant => t - v,
            ApproxKind::Majorant => v - t,
        };
        emit::record(&mut out, args.format, &EvalRecord { x, target: t, approx: v, margin });
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_list(spec: &str, what: &str) -> bsx_core::Result<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CoreError::domain(format!("bad {what} `{s}`: {e}")))
        })
        .collect()
}

fn cmd_errors(args: ErrorsArgs) -> bsx_core::Result<ExitCode> {
    let kinds: Vec<ApproxKind> = match (args.kind, args.all_kinds) {
        (Some(k), _) => vec![k.kind()],
        _ => vec![ApproxKind::TwoSided, ApproxKind::Minorant, ApproxKind::Majorant],
    };
    let deltas = parse_list(&args.delta, "delta")?;
    println!(
        "kind,problem,delta,c,closed_form{}",
        if args.check { ",numeric_l1,rel_mismatch" } else { "" }
    );
    if let Some(measure_spec) = &args.measure {
        for &delta in &deltas {
            for &kind in &kinds {
                println!("{}", errors_row_measure(measure_spec, kind, delta, args.check)?);
            }
        }
    } else {
        let spec = args
            .lambda
            .as_ref()
            .ok_or_else(|| CoreError::domain("errors needs --lambda or --measure"))?;
        for &lambda in &parse_list(spec, "lambda")? {
            for &delta in &deltas {
                for &kind in &kinds {
                    println!("{}", errors_row_base(lambda, &args.c, kind, delta, args.check)?);
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn errors_row_measure(
    measure_spec: &str,
    kind: ApproxKind,
    delta: f64,
    check: bool,
) -> bsx_core::Result<String> {
    let measure = Measure::parse(measure_spec)?;
    let closed = closed_form_error_nu(kind, &measure, delta)?;
    let mut row = format!(
        "{},{},{},endpoint,{}",
        kind.label(),
        measure_spec,
        fmt17(delta),
        fmt17(closed)
    );
    if check {
        let handle = SubordinatedHandle::new(Measure::parse(measure_spec)?, kind, delta)?;
        let num = numeric_l1(kind, &EvalTarget::Measure(handle), delta)?;
        let rel = (num - closed).abs() / closed.abs().max(1e-300);
        row.push_str(&format!(",{},{}", fmt17(num), fmt17(rel)));
    }
    Ok(row)
}

fn errors_row_base(
    lambda: f64,
    c_arg: &str,
    kind: ApproxKind,
    delta: f64,
    check: bool,
) -> bsx_core::Result<String> {
    let c = if c_arg == "auto" {
        bsx_core::BaseParams::c_auto(lambda, delta)
    } else {
        c_arg
            .parse::<f64>()
            .map_err(|e| CoreError::domain(format!("bad --c `{c_arg}`: {e}")))?
    };
    let params = bsx_core::BaseParams::new(lambda, c, delta)?;
    params.validate_for(kind)?;
    let closed = closed_form_error(kind, &params)?;
    let mut row = format!(
        "{},lambda={},{},{},{}",
        kind.label(),
        fmt17(params.lambda),
        fmt17(params.delta),
        fmt17(params.c),
        fmt17(closed)
    );
    if check {
        let handle = ApproximantHandle::new(kind, params)?;
        let num = numeric_l1(kind, &EvalTarget::Base(handle), params.delta)?;
        let rel = (num - closed).abs() / closed.abs().max(1e-300);
        row.push_str(&format!(",{},{}", fmt17(num), fmt17(rel)));
    }
    Ok(row)
}

fn numeric_l1(kind: ApproxKind, target: &EvalTarget, delta: f64) -> bsx_core::Result<f64> {
    let mode = match kind {
        ApproxKind::TwoSided => L1Mode::TwoSidedAbs,
        ApproxKind::Minorant => L1Mode::SignedMinorant,
        ApproxKind::Majorant => L1Mode::SignedMajorant,
    };
    let r = numeric_l1_error(
        &|x| target.target(x),
        &|x| target.approx(x),
        delta,
        mode,
        1e-7,
    )?;
    Ok(r.value)
}

fn finish_certificate(cert: Certificate, out: Option<String>) -> bsx_core::Result<ExitCode> {
    let body = cert.to_json();
    if let Some(path) = out {
        std::fs::write(&path, &body)
            .map_err(|e| CoreError::domain(format!("cannot write `{path}`: {e}")))?;
    }
    println!("{body}");
    Ok(if cert.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_verify(args: VerifyArgs) -> bsx_core::Result<ExitCode> {
    match args.claim {
        VerifyClaim::Sign { problem, grid, tol_cert, out } => {
            let grid = parse_grid(&grid)?;
            let p = Problem::build_for(&problem, ApproxKind::TwoSided)?;
            let cert = verify_sign_two_sided(
                &|x| p.target(x),
                &|x| p.approx(x),
                p.delta(),
                &grid,
                tol_cert,
                p.echo(),
            )?;
            finish_certificate(cert, out)
        }
        VerifyClaim::Minorant { problem, grid, tol_cert, out } => {
            let grid = parse_grid(&grid)?;
            let p = Problem::build_for(&problem, ApproxKind::Minorant)?;
            let cert = verify_one_sided(
                &|x| p.target(x),
                &|x| p.approx(x),
                false,
                Some(0.0),
                p.delta(),
                &grid,
                tol_cert,
                p.echo(),
            )?;
            finish_certificate(cert, out)
        }
        VerifyClaim::Majorant { problem, grid, tol_cert, out } => {
            let grid = parse_grid(&grid)?;
            let p = Problem::build_for(&problem, ApproxKind::Majorant)?;
            let upper = p.jump_upper()?;
            let cert = verify_one_sided(
                &|x| p.target(x),
                &|x| p.approx(x),
                true,
                upper,
                p.delta(),
                &grid,
                tol_cert,
                p.echo(),
            )?;
            finish_certificate(cert, out)
        }
        VerifyClaim::Nodes { kind, problem, range, derivatives, out } => {
            let (lo, hi) = parse_range(&range)?;
            let p = Problem::build(&problem, kind)?;
            if derivatives && kind.approx_kind() == ApproxKind::TwoSided {
                return Err(CoreError::domain(
                    "derivative node checks apply to the one-sided kinds only",
                ));
            }
            let cert = verify_nodes(
                &|x| p.target(x),
                &|x| p.target_prime(x),
                &|x| p.approx(x),
                p.delta(),
                (lo, hi),
                derivatives,
                1e-9,
                1e-7,
                p.echo(),
            )?;
            finish_certificate(cert, out)
        }
        VerifyClaim::L1 { kind, problem, tol_rel, out } => {
            let p = Problem::build(&problem, kind)?;
            let closed = p.closed_form_error()?;
            let num = numeric_l1(kind.approx_kind(), p.eval_target(), p.delta())?;
            let rel = (num - closed).abs() / closed.abs().max(1e-300);
            let mut echo = p.echo();
            if let serde_json::Value::Object(ref mut map) = echo {
                map.insert("closed_form".into(), json!(closed));
                map.insert("numeric_l1".into(), json!(num));
            }
            let cert = runtime::l1_certificate(echo, rel, tol_rel);
            finish_certificate(cert, out)
        }
        VerifyClaim::Type { kind, problem, k, ymax, out } => {
            if !(k == 1 || k == 2) {
                return Err(CoreError::domain("type order k must be 1 or 2"));
            }
            let p = Problem::build(&problem, kind)?;
            let cert = estimate_exponential_type(
                &|z| p.approx_complex(z),
                k,
                p.delta(),
                ymax,
                p.echo(),
            )?;
            finish_certificate(cert, out)
        }
        VerifyClaim::Identity { name, lambda, tol_abs, out } => {
            let cert = runtime::identity_certificate(&name, lambda, tol_abs)?;
            finish_certificate(cert, out)
        }
    }
}
