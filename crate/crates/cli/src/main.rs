//! `freecsk`: transforms, convolutions, CSK variance functions and limit
//! experiments from the command line, written as CSV.

mod grid;
mod table;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freecsk::conv::{boxplus, boxplus_power, boxtimes, boxtimes_power, bp_transform, uplus, uplus_power};
use freecsk::csk::{
    pseudo_variance, pseudo_variance_from_moments, psi_mean_inverse, variance, variance_from_moments,
    CskDescriptor, Side,
};
use freecsk::limits::{convergence_report, ConvKind, Quantity};
use freecsk::transforms::{
    cauchy_g, cauchy_g_real, k_transform, m_transform, psi_transform, r_transform, s_transform,
    sigma_transform, Accuracy,
};
use freecsk::verify::{run_suite, SUITES};
use freecsk::{parse_measure_spec, Measure, MomentSeq};
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use table::{num, Table};

#[derive(Parser)]
#[command(
    name = "freecsk",
    version,
    about = "Free and Boolean convolutions, CSK variance functions and their limit laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output file; standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate G, M, Psi, S, Sigma, R or K on a real grid
    Transform {
        /// Measure spec file (JSON)
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, ignore_case = true)]
        which: Which,
        /// `a:b:step` or a comma list
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[command(flatten)]
        out: Output,
    },
    /// Moments of a convolution or Bercovici-Pata image
    Convolve {
        #[arg(long, value_enum)]
        op: Op,
        /// Measure spec file; give two for a binary convolution, one with --power
        #[arg(long, num_args = 1, required = true)]
        spec: Vec<PathBuf>,
        /// Convolution power alpha, or t for `bt`
        #[arg(long)]
        power: Option<f64>,
        /// Number of moments
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[command(flatten)]
        out: Output,
    },
    /// theta, pseudo-variance and variance along a grid of means
    Csk {
        #[arg(long)]
        spec: PathBuf,
        /// Means, `a:b:step` or a comma list
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// plus, minus or two-sided
        #[arg(long, default_value = "two-sided")]
        side: Side,
        /// Moments used when the spec is a bare moment sequence
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Convergence of the scaled boxtimes-then-boxplus/uplus sequence
    Limit {
        #[arg(long)]
        spec: PathBuf,
        /// boxplus or uplus
        #[arg(long)]
        kind: ConvKind,
        #[arg(long, default_value = "1,2,4,8,16,32,64")]
        n_schedule: String,
        /// Series order of the moment pipeline
        #[arg(long, default_value_t = 40)]
        order: usize,
        /// Moments compared against the limit law
        #[arg(long, default_value_t = 6)]
        moments: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Run built-in identity checks
    Verify {
        #[arg(long, default_value = "all", value_parser = suite_names())]
        suite: String,
        #[command(flatten)]
        out: Output,
    },
}

fn suite_names() -> clap::builder::PossibleValuesParser {
    let mut names = vec!["all"];
    names.extend(SUITES);
    clap::builder::PossibleValuesParser::new(names)
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    #[value(name = "G")]
    G,
    #[value(name = "M")]
    M,
    #[value(name = "Psi")]
    Psi,
    #[value(name = "S")]
    S,
    #[value(name = "Sigma")]
    Sigma,
    #[value(name = "R")]
    R,
    #[value(name = "K")]
    K,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Boxplus,
    Uplus,
    Boxtimes,
    Bt,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<freecsk::Error> for Failure {
    fn from(e: freecsk::Error) -> Self {
        Failure::Numeric(e.to_string())
    }
}

type Outcome = Result<(String, bool), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, result) = match cli.command {
        Command::Transform { spec, which, grid, out } => (out, transform(&spec, which, &grid)),
        Command::Convolve { op, spec, power, order, out } => (out, convolve(op, &spec, power, order)),
        Command::Csk { spec, at, side, order, out } => (out, csk(&spec, &at, side, order)),
        Command::Limit { spec, kind, n_schedule, order, moments, out } => {
            (out, limit(&spec, kind, &n_schedule, order, moments))
        }
        Command::Verify { suite, out } => (out, verify(&suite)),
    };
    match result {
        Ok((text, ok)) => {
            if let Err(e) = emit(out.out.as_deref(), &text) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())
        }
    }
}

fn load(path: &Path) -> Result<Measure, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_measure_spec(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn transform(spec: &Path, which: Which, grid: &str) -> Outcome {
    let nu = load(spec)?;
    let xs = grid::parse_grid(grid).map_err(usage)?;
    let name = match which {
        Which::G => "G",
        Which::M => "M",
        Which::Psi => "Psi",
        Which::S => "S",
        Which::Sigma => "Sigma",
        Which::R => "R",
        Which::K => "K",
    };
    let mut t = Table::new("transform");
    t.setting("spec", spec.display());
    t.setting("which", name);
    t.setting("grid", grid);
    t.row(["x", "value", "error"]);
    let laurent_note = |a: Accuracy| match a {
        Accuracy::OutsideValidity => {
            "outside the validity radius of the truncated Laurent series".to_string()
        }
        _ => String::new(),
    };
    for x in xs {
        let z = Complex64::new(x, 0.0);
        let value = match which {
            Which::G => match nu {
                Measure::Moments(_) => cauchy_g(&nu, z).map(|p| (p.value.re, laurent_note(p.accuracy))),
                _ => cauchy_g_real(&nu, x).map(|v| (v, String::new())),
            },
            Which::M => m_transform(&nu, x).map(|v| (v, String::new())),
            Which::Psi => psi_transform(&nu, z).map(|v| (v.re, String::new())),
            Which::S => s_transform(&nu, x).map(|v| (v, String::new())),
            Which::Sigma => sigma_transform(&nu, x).map(|v| (v, String::new())),
            Which::R => r_transform(&nu, x).map(|v| (v, String::new())),
            Which::K => k_transform(&nu, z).map(|p| (p.value.re, laurent_note(p.accuracy))),
        };
        match value {
            Ok((v, note)) => t.row([num(x), num(v), note]),
            Err(e) => t.row([num(x), num(f64::NAN), e.to_string()]),
        }
    }
    Ok((t.into_string(), true))
}

fn moments_of(nu: &Measure, order: usize) -> Result<MomentSeq, Failure> {
    let k = match nu {
        Measure::Moments(m) => order.min(m.order()),
        _ => order,
    };
    Ok(nu.moments(k)?)
}

fn convolve(op: Op, specs: &[PathBuf], power: Option<f64>, order: usize) -> Outcome {
    if order == 0 {
        return Err(usage("--order must be at least 1"));
    }
    let measures = specs.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    let seqs = measures.iter().map(|m| moments_of(m, order)).collect::<Result<Vec<_>, _>>()?;
    let k = seqs.iter().map(MomentSeq::order).min().unwrap_or(0);
    let seqs: Vec<MomentSeq> = seqs.iter().map(|s| s.truncate(k)).collect();
    let (name, result) = match (op, seqs.as_slice(), power) {
        (Op::Bt, [nu], Some(t)) => ("bt", bp_transform(nu, t)?),
        (Op::Bt, _, _) => return Err(usage("bt takes one --spec and --power t")),
        (_, [mu, nu], None) => match op {
            Op::Boxplus => ("boxplus", boxplus(mu, nu)?),
            Op::Uplus => ("uplus", uplus(mu, nu)?),
            _ => ("boxtimes", boxtimes(mu, nu)?),
        },
        (_, [nu], Some(alpha)) => match op {
            Op::Boxplus => ("boxplus", boxplus_power(nu, alpha)?),
            Op::Uplus => ("uplus", uplus_power(nu, alpha)?),
            _ => ("boxtimes", boxtimes_power(nu, alpha)?),
        },
        _ => return Err(usage("give two --spec files, or one --spec with --power")),
    };
    let mut t = Table::new("convolve");
    t.setting("op", name);
    for s in specs {
        t.setting("spec", s.display());
    }
    if let Some(p) = power {
        t.setting(if matches!(op, Op::Bt) { "t" } else { "power" }, p);
    }
    t.setting("order", k);
    t.setting("positive", result.is_positive());
    t.setting("formal", result.is_formal());
    t.row(["n", "moment"]);
    for (n, m) in result.values().iter().enumerate() {
        t.row([(n + 1).to_string(), num(*m)]);
    }
    Ok((t.into_string(), true))
}

fn first_error<const N: usize>(values: [freecsk::Result<f64>; N]) -> ([f64; N], String) {
    let mut errors = Vec::new();
    let out = values.map(|v| match v {
        Ok(x) => x,
        Err(e) => {
            if !errors.contains(&e.to_string()) {
                errors.push(e.to_string());
            }
            f64::NAN
        }
    });
    (out, errors.join("; "))
}

fn csk(spec: &Path, at: &str, side: Side, order: usize) -> Outcome {
    let nu = load(spec)?;
    let ms = grid::parse_grid(at).map_err(usage)?;
    let mut t = Table::new("csk");
    t.setting("spec", spec.display());
    t.setting(
        "side",
        match side {
            Side::Plus => "plus",
            Side::Minus => "minus",
            Side::TwoSided => "two-sided",
        },
    );
    t.setting("at", at);
    if let Measure::Moments(_) = nu {
        let seq = moments_of(&nu, order)?;
        t.setting("order", seq.order());
        t.comment("mean_domain = unknown for a bare moment sequence; theta is not available");
        t.row(["m", "theta", "pseudo_variance", "variance", "error"]);
        for m in ms {
            let ([vv, v], err) =
                first_error([pseudo_variance_from_moments(&seq, m), variance_from_moments(&seq, m)]);
            t.row([num(m), num(f64::NAN), num(vv), num(v), err]);
        }
        return Ok((t.into_string(), true));
    }
    let desc = CskDescriptor::new(nu.clone(), side)?;
    let (lo, hi) = desc.mean_domain;
    t.setting("mean_domain", format!("({}, {})", num(lo), num(hi)));
    t.row(["m", "theta", "pseudo_variance", "variance", "error"]);
    for m in ms {
        if !desc.contains_mean(m) {
            let nan = num(f64::NAN);
            t.row([num(m), nan.clone(), nan.clone(), nan, "outside the domain of means".into()]);
            continue;
        }
        let ([theta, vv, v], err) =
            first_error([psi_mean_inverse(&nu, m), pseudo_variance(&nu, m), variance(&nu, m)]);
        t.row([num(m), num(theta), num(vv), num(v), err]);
    }
    Ok((t.into_string(), true))
}

fn limit(spec: &Path, kind: ConvKind, schedule: &str, order: usize, moments: usize) -> Outcome {
    let nu = load(spec)?;
    let ns = grid::parse_schedule(schedule).map_err(usage)?;
    if moments == 0 || order < moments.max(2) {
        return Err(usage("need 1 <= --moments <= --order and --order >= 2"));
    }
    let report = convergence_report(&nu, kind, &ns, moments, order)?;
    let mut t = Table::new("limit");
    t.setting("spec", spec.display());
    t.setting("kind", kind);
    t.setting("limit", format!("{}({})", report.limit, num(report.gamma)));
    t.setting("gamma", num(report.gamma));
    t.setting("n_schedule", schedule);
    t.setting("order", report.series_order);
    t.setting("moments", report.moments);
    t.row(["n", "quantity", "index", "value", "limit", "abs_error"]);
    for r in &report.rows {
        let (q, index) = match r.quantity {
            Quantity::Moment(j) => ("moment", j.to_string()),
            Quantity::Variance(m) => ("variance", num(m)),
        };
        t.row([r.n.to_string(), q.into(), index, num(r.value), num(r.limit), num(r.abs_error)]);
    }
    Ok((t.into_string(), true))
}

fn verify(suite: &str) -> Outcome {
    let checks = run_suite(suite).map_err(|e| usage(e.to_string()))?;
    let passed = checks.iter().filter(|c| c.passed).count();
    let mut t = Table::new("verify");
    t.setting("suite", suite);
    t.row(["suite", "check", "status", "detail"]);
    for c in &checks {
        t.row([c.suite, &c.name, if c.passed { "PASS" } else { "FAIL" }, &c.detail]);
    }
    t.comment(&format!("passed = {passed}/{}", checks.len()));
    Ok((t.into_string(), passed == checks.len()))
}
