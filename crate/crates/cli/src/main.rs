mod output;
mod verify;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use mzero_core::chiodo_class::{rewrite_kappa2, seven_point_correlator, ChernConvention, Kappa2Variant};
use mzero_core::fjrw_frobenius::{parse_labels, vanishing_check, Theory, Verdict};
use mzero_core::rational::{format_rational, int, parse_rational};
use mzero_core::wdvv_reconstruct::{
    build_potential, evaluate_theory, format_monomial, CorrelatorTable, SymbolicValue, MAX_POINTS,
};
use mzero_core::{parse_expression, Generator, Integrator, ModuliContext, Rational, TautPolynomial};
use serde_json::json;

use output::{poly_a_json, rational_json, Envelope, Payload};

#[derive(Parser)]
#[command(name = "mzero", version, about = "Exact genus-zero intersection numbers and D4 correlators")]
struct Cli {
    /// Print a JSON envelope instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for integration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Displayed,
    Appendix,
}

impl From<VariantArg> for Kappa2Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Displayed => Kappa2Variant::Displayed,
            VariantArg::Appendix => Kappa2Variant::Appendix,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Validated,
    AsWritten,
}

impl From<ConventionArg> for ChernConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Validated => ChernConvention::Validated,
            ConventionArg::AsWritten => ChernConvention::AsWritten,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a tautological expression over M_0,n.
    Intersect {
        #[arg(short = 'n')]
        n: u32,
        /// e.g. "psi1*psi2^2", "kappa1^2", "b{1,2}*psi3".
        expr: String,
    },
    /// The seven-point correlator <X2,...,X2> of (D4, <J>).
    SevenPoint {
        #[arg(long, value_enum, default_value = "displayed")]
        kappa2_variant: VariantArg,
        #[arg(long, value_enum, default_value = "validated")]
        convention: ConventionArg,
        /// Compute both kappa2 variants and report whether they agree.
        #[arg(long)]
        compare: bool,
    },
    /// A primary genus-zero correlator, symbolic in a = <X,X,X,X2>.
    Correlator {
        #[arg(long, default_value = "saito")]
        theory: String,
        /// Comma-separated insertions over 1, X, Y, X2.
        insertions: String,
        /// Seven-point value to use for d4-j instead of computing it.
        #[arg(long)]
        seven_point: Option<String>,
    },
    /// Coefficient table of the primary potential.
    Potential {
        /// Also substitute the value of a for this theory.
        #[arg(long)]
        theory: Option<String>,
        #[arg(long)]
        seven_point: Option<String>,
    },
    /// Run every check and report named failures.
    Verify,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().expect("thread pool set once");
    }
    let start = Instant::now();
    let result = match cli.command {
        Command::Intersect { n, expr } => intersect(n, &expr),
        Command::SevenPoint { kappa2_variant, convention, compare } => {
            Ok(seven_point(kappa2_variant.into(), convention.into(), compare))
        }
        Command::Correlator { theory, insertions, seven_point } => {
            correlator(&theory, &insertions, seven_point.as_deref())
        }
        Command::Potential { theory, seven_point } => potential(theory.as_deref(), seven_point.as_deref()),
        Command::Verify => {
            let (env, ok) = run_verify();
            env.emit(cli.json, start.elapsed().as_millis());
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match result {
        Ok(env) => {
            env.emit(cli.json, start.elapsed().as_millis());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn intersect(n: u32, expr: &str) -> Result<Envelope, Failure> {
    let ctx = ModuliContext::new(n).map_err(|e| fail(3, e.to_string()))?;
    let poly = parse_expression(ctx, expr).map_err(|e| fail(2, e.to_string()))?;
    let mut warnings = Vec::new();
    let poly = if poly.generators().contains(&Generator::Kappa(2)) {
        // κ_2 has degree 2 > dim on M̄_{0,3} and M̄_{0,4}
        let k2 = if n >= 5 { rewrite_kappa2(ctx).map_err(|e| fail(3, e.to_string()))? } else { TautPolynomial::zero(ctx) };
        warnings.push("kappa2 rewritten in boundary divisors".to_string());
        poly.substitute(Generator::Kappa(2), &k2).map_err(|e| fail(3, e.to_string()))?
    } else {
        poly
    };
    let report = Integrator::from_env().integrate_report(&poly).map_err(|e| fail(3, e.to_string()))?;
    if report.off_degree_terms > 0 {
        warnings.push(format!(
            "{} term(s) not of degree {} contribute 0",
            report.off_degree_terms,
            ctx.dim()
        ));
    }
    let mut env = Envelope::new(Payload::Rational(report.value));
    env.warnings = warnings;
    Ok(env)
}

fn seven_point(variant: Kappa2Variant, convention: ChernConvention, compare: bool) -> Envelope {
    let integ = Integrator::from_env();
    let run = |v| seven_point_correlator(&integ, v, convention).expect("seven-point class integrates");
    let value = run(variant);
    let mut env = Envelope::new(Payload::Rational(value.clone()));
    if compare {
        let displayed = if variant == Kappa2Variant::Displayed { value.clone() } else { run(Kappa2Variant::Displayed) };
        let appendix = if variant == Kappa2Variant::Appendix { value } else { run(Kappa2Variant::Appendix) };
        let equal = displayed == appendix;
        env.text_lines.push(format!("displayed: {}", format_rational(&displayed)));
        env.text_lines.push(format!("appendix: {}", format_rational(&appendix)));
        env.text_lines.push(format!("equal: {equal}"));
        if !equal {
            env.warnings.push("kappa2 variants disagree".into());
        }
        env.extra.push((
            "compare".into(),
            json!({ "displayed": rational_json(&displayed), "appendix": rational_json(&appendix), "equal": equal }),
        ));
    }
    env
}

fn parse_theory(s: &str) -> Result<Theory, Failure> {
    s.parse().map_err(|e: mzero_core::fjrw_frobenius::FjrwError| fail(2, e.to_string()))
}

fn seven_point_value(given: Option<&str>) -> Result<Rational, Failure> {
    match given {
        Some(s) => parse_rational(s).ok_or_else(|| fail(2, format!("not a rational: {s}"))),
        None => Ok(seven_point_correlator(&Integrator::from_env(), Kappa2Variant::Displayed, ChernConvention::Validated)
            .expect("seven-point class integrates")),
    }
}

fn correlator(theory: &str, insertions: &str, seven_point: Option<&str>) -> Result<Envelope, Failure> {
    let theory = parse_theory(theory)?;
    let labels = parse_labels(insertions).map_err(|e| fail(2, e.to_string()))?;
    if !(3..=MAX_POINTS).contains(&labels.len()) {
        return Err(fail(2, format!("need 3 to {MAX_POINTS} insertions, got {}", labels.len())));
    }
    let (value, reason) = match vanishing_check(theory, &labels) {
        Verdict::Vanishes(r) => (SymbolicValue::zero(), Some(r.to_string())),
        Verdict::Allowed => (CorrelatorTable::new().correlator(&labels).map_err(|e| fail(3, e.to_string()))?, None),
    };
    let sp = if theory == Theory::D4J && !value.is_zero() { seven_point_value(seven_point)? } else { int(0) };
    let report = evaluate_theory(theory, &sp).map_err(|e| fail(3, e.to_string()))?;
    let specialized = report.specialization.apply(&value);
    let mut env = Envelope::new(Payload::PolyA(value));
    env.text_lines.push(format!("specialized: {specialized}"));
    if let Some(r) = &reason {
        env.text_lines.push(format!("vanishes: {r}"));
    }
    env.extra.push(("specialized".into(), poly_a_json(&specialized)));
    env.extra.push(("reason".into(), json!(reason)));
    Ok(env)
}

fn potential(theory: Option<&str>, seven_point: Option<&str>) -> Result<Envelope, Failure> {
    let pot = build_potential(MAX_POINTS).map_err(|e| fail(3, e.to_string()))?;
    let report = match theory {
        Some(t) => {
            let t = parse_theory(t)?;
            let sp = if t == Theory::D4J { seven_point_value(seven_point)? } else { int(0) };
            Some(evaluate_theory(t, &sp).map_err(|e| fail(3, e.to_string()))?)
        }
        None => None,
    };
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for (m, v) in &pot {
        let name = format_monomial(m);
        let mut row = json!({ "monomial": name, "coefficient": poly_a_json(v) });
        let mut line = format!("{name}: {v}");
        if let Some(r) = &report {
            let s = r.specialization.apply(v);
            row["specialized"] = poly_a_json(&s);
            line.push_str(&format!("  -> {s}"));
        }
        rows.push(row);
        lines.push(line);
    }
    let mut env = Envelope::new(Payload::PolyA(pot[&[0, 0, 0, 7]].clone()));
    env.text_lines = lines;
    if let Some(r) = report {
        env.warnings = r.warnings;
    }
    env.extra.push(("terms".into(), json!(rows)));
    Ok(env)
}

fn run_verify() -> (Envelope, bool) {
    let report = verify::run(&Integrator::from_env());
    let failures: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let mut env = Envelope::new(Payload::Rational(report.seven_point.displayed.clone()));
    for c in &report.checks {
        env.text_lines.push(format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    if !failures.is_empty() {
        env.text_lines.push(format!("failed: {}", failures.join(", ")));
    }
    let checks: Vec<_> = report
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
        .collect();
    env.extra.push(("checks".into(), json!(checks)));
    env.extra.push(("failures".into(), json!(failures)));
    env.extra.push(("appendix".into(), rational_json(&report.seven_point.appendix)));
    (env, failures.is_empty())
}
