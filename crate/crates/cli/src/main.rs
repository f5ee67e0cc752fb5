//! `dt4`: command-line front end for the DT4 localization engine.

mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dt4_core::formulas::{
    ck_closed_form, f_inf0_residue, gluing_check, local_curve_exponent, local_curve_series,
    no_insertion_closed, w_from_f_inf0, w_infinity, LocalCurveData, SplittingDatum,
};
use dt4_core::partitions::{enumerate_plane, enumerate_solid, MAX_SIZE};
use dt4_core::qseries::{log_macmahon_minus, sigma2};
use dt4_core::verify::{run_suite_with, seeded_calibration, Injection, Suite, SuiteOptions};
use dt4_core::vertex::{Engine, NoInsertionConvention};
use dt4_core::{Error, Field, ParamContext, QSeries, Rat, RatFn};
use serde_json::{json, Value};

use output::{csv, Table};

#[derive(Parser)]
#[command(name = "dt4", version, about = "Equivariant DT4 series of C^4 and local curves by torus localization")]
struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true, env = "DT4_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate plane (dim 3) or solid (dim 4) partitions.
    Partitions(PartitionsArgs),
    /// C^4 series by localization and/or the closed MacMahon power.
    Zc4(Zc4Args),
    /// Closed-form series of a local curve, optionally with a gluing check.
    LocalCurve(LocalCurveArgs),
    /// The F_inf,0 residue series of the C^4 series.
    Residue(ResidueArgs),
    /// Run a verification battery; exit 0 iff it passes.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct PartitionsArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=4))]
    dim: u8,
    #[arg(long)]
    size: usize,
    #[arg(long, conflicts_with = "list")]
    count: bool,
    #[arg(long)]
    list: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ContextArgs {
    #[arg(long, value_parser = parse_rat, allow_hyphen_values = true)]
    s2: Rat,
    #[arg(long, value_parser = parse_rat, allow_hyphen_values = true)]
    s3: Rat,
    #[arg(long, value_parser = parse_rat, allow_hyphen_values = true)]
    m: Rat,
}

impl ContextArgs {
    fn context(&self) -> ParamContext {
        ParamContext::new(self.s2.clone(), self.s3.clone(), self.m.clone())
    }
}

#[derive(Args)]
#[group(multiple = false)]
struct Format {
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Localization,
    Closed,
    Both,
}

#[derive(Args)]
struct Zc4Args {
    #[arg(long)]
    nmax: usize,
    #[command(flatten)]
    ctx: ContextArgs,
    #[arg(long, value_enum, default_value = "both")]
    mode: Mode,
    /// Drop the tautological insertion (dual orientation).
    #[arg(long)]
    no_insertion: bool,
    /// Seed for the sign-calibration contexts.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    format: Format,
}

#[derive(Args)]
struct LocalCurveArgs {
    #[arg(long, allow_hyphen_values = true)]
    g: i64,
    #[arg(long, allow_hyphen_values = true)]
    l1: i64,
    #[arg(long, allow_hyphen_values = true)]
    l2: i64,
    #[arg(long, allow_hyphen_values = true)]
    l3: i64,
    #[arg(long, allow_hyphen_values = true)]
    l: i64,
    #[arg(long)]
    nmax: usize,
    #[command(flatten)]
    ctx: ContextArgs,
    /// Left side of a splitting as "g-,l1-,l2-,l3-,l-".
    #[arg(long, value_parser = parse_split, allow_hyphen_values = true)]
    split: Option<[i64; 5]>,
    #[command(flatten)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Closed,
    Localization,
}

#[derive(Args)]
struct ResidueArgs {
    #[arg(long)]
    nmax: usize,
    #[command(flatten)]
    ctx: ContextArgs,
    /// Series whose logarithm is taken.
    #[arg(long, value_enum, default_value = "closed")]
    source: Source,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    C4,
    Mnop,
    Relative,
    Rubber,
    LocalCurve,
    Symmetry,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::C4 => Suite::C4,
            SuiteArg::Mnop => Suite::Mnop,
            SuiteArg::Relative => Suite::Relative,
            SuiteArg::Rubber => Suite::Rubber,
            SuiteArg::LocalCurve => Suite::LocalCurve,
            SuiteArg::Symmetry => Suite::Symmetry,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InjectArg {
    None,
    Sign,
    Exponent,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[arg(long)]
    nmax: usize,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Deliberately corrupt signs or exponents (negative control).
    #[arg(long, value_enum, default_value = "none")]
    inject: InjectArg,
    /// Record per-check wall-clock time (output no longer reproducible).
    #[arg(long)]
    timings: bool,
    #[arg(long, conflicts_with = "junit")]
    json: bool,
    #[arg(long)]
    junit: bool,
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    s.parse::<Rat>().map_err(|e| e.to_string())
}

fn parse_split(s: &str) -> Result<[i64; 5], String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|v: Vec<i64>| format!("expected 5 integers, got {}", v.len()))
}

/// What went wrong, and how the process should exit.
enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidTopologicalData(_) | Error::SizeTooLarge(..) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Compute(other),
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DivisionByZero => "division_by_zero",
        Error::HigherOrderPole(_) => "higher_order_pole",
        Error::LogNonUnital => "log_non_unital",
        Error::ExpNonNilpotent => "exp_non_nilpotent",
        Error::OrderMismatch(..) => "order_mismatch",
        Error::SelfDualZeroWeight(_) => "self_dual_zero_weight",
        Error::NotSelfDual(_) => "not_self_dual",
        Error::ZeroWeight(_) => "zero_weight",
        Error::SignFamilyInsufficient => "sign_family_insufficient",
        Error::SignSurvivorsDisagree(_) => "sign_survivors_disagree",
        Error::InvalidTopologicalData(_) => "invalid_topological_data",
        Error::NonGenericContext(_) => "non_generic_context",
        Error::Parse(_) => "parse",
        Error::SizeTooLarge(..) => "size_too_large",
    }
}

/// Emitted text plus whether every check in it passed.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, passed: true }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn series_json<F: Field>(s: &QSeries<F>) -> Value {
    serde_json::to_value(s).expect("series serialize")
}

fn partitions(a: &PartitionsArgs) -> Result<Outcome, Failure> {
    if a.size > MAX_SIZE {
        return Err(Error::SizeTooLarge(a.size, MAX_SIZE).into());
    }
    let listed: Vec<Value> = if a.dim == 3 {
        enumerate_plane(a.size).iter().map(|p| json!(p.rows())).collect()
    } else {
        enumerate_solid(a.size).iter().map(|p| json!(p.heights())).collect()
    };
    let text = if a.json {
        let mut v = json!({ "dim": a.dim, "size": a.size, "count": listed.len() });
        if a.list {
            v["partitions"] = Value::Array(listed);
        }
        output::json(&v)
    } else if a.list {
        listed.iter().map(|p| format!("{p}\n")).collect()
    } else {
        format!("{}\n", listed.len())
    };
    Ok(Outcome::ok(text))
}

fn zc4(a: &Zc4Args) -> Result<Outcome, Failure> {
    let n = a.nmax;
    let ctx = a.ctx.context();
    let want_loc = a.mode != Mode::Closed;
    let want_closed = a.mode != Mode::Localization;

    let mut calibration = None;
    let mut localized = None;
    if want_loc {
        let engine = Engine::new(n)?;
        engine.check_context(&ctx)?;
        let cal = seeded_calibration(&engine, a.seed)?;
        localized = Some(if a.no_insertion {
            engine.z_c4_no_insertion(n, &ctx, &cal.rule, NoInsertionConvention::Dual)?
        } else {
            engine.z_c4_localized(n, &ctx, &cal.rule)?
        });
        calibration = Some((cal, engine));
    }
    let closed = if want_closed {
        Some(if a.no_insertion { no_insertion_closed(n, &ctx)? } else { ck_closed_form(n, &ctx)? })
    } else {
        None
    };

    let matches: Option<Vec<bool>> = match (&localized, &closed) {
        (Some(l), Some(c)) => Some(l.coeffs().iter().zip(c.coeffs()).map(|(x, y)| x == y).collect()),
        _ => None,
    };
    let mut checks = Vec::new();
    if let Some(m) = &matches {
        let first = m.iter().position(|ok| !ok);
        checks.push(("localized_vs_closed", first.is_none(), first.map(|k| format!("coefficient q^{k}"))));
    }
    if let (Some((cal, engine)), false) = (&calibration, a.no_insertion) {
        let z0 = engine.z_c4_localized(n, &ctx.with_m(Rat::zero()), &cal.rule)?;
        checks.push(("divisibility_by_m", z0 == QSeries::one(n), None));
    }
    let passed = checks.iter().all(|c| c.1);

    let text = if a.format.json {
        let mut v = json!({
            "command": "zc4",
            "n_max": n,
            "context": { "s2": ctx.s2.to_string(), "s3": ctx.s3.to_string(), "m": ctx.m.to_string() },
            "mode": match a.mode { Mode::Localization => "localization", Mode::Closed => "closed", Mode::Both => "both" },
            "no_insertion": a.no_insertion,
        });
        if let Some((cal, _)) = &calibration {
            v["sign_rule"] = json!(cal.rule.id());
            v["survivors"] = json!(cal.record.survivors);
            v["calibration_seed"] = json!(a.seed);
        }
        if let Some(l) = &localized {
            v["localized"] = series_json(l);
        }
        if let Some(c) = &closed {
            v["closed"] = series_json(c);
        }
        if let Some(m) = &matches {
            v["coefficients"] = m.iter().enumerate().map(|(k, ok)| json!({ "n": k, "match": ok })).collect();
            v["match"] = json!(m.iter().all(|ok| *ok));
        }
        v["checks"] = checks
            .iter()
            .map(|(name, ok, w)| {
                let mut c = json!({ "name": name, "verdict": verdict(*ok) });
                if let Some(w) = w {
                    c["witness"] = json!(w);
                }
                c
            })
            .collect();
        v["verdict"] = json!(verdict(passed));
        output::json(&v)
    } else if a.format.csv {
        let primary = localized.as_ref().or(closed.as_ref()).expect("some mode selected");
        csv(primary, matches.as_deref())
    } else {
        let mut out = format!("context: {ctx}\n");
        if let Some((cal, _)) = &calibration {
            out.push_str(&format!("sign rule: {} (survivors: {})\n", cal.rule.id(), cal.record.survivors.join(", ")));
        }
        let mut header = vec!["n"];
        if localized.is_some() {
            header.push("localized");
        }
        if closed.is_some() {
            header.push("closed");
        }
        if matches.is_some() {
            header.push("match");
        }
        let mut t = Table::new(&header);
        for k in 0..=n {
            let mut row = vec![k.to_string()];
            if let Some(l) = &localized {
                row.push(l.coeff(k).to_string());
            }
            if let Some(c) = &closed {
                row.push(c.coeff(k).to_string());
            }
            if let Some(m) = &matches {
                row.push(m[k].to_string());
            }
            t.row(row);
        }
        out.push_str(&t.render());
        for (name, ok, w) in &checks {
            out.push_str(&format!("{} {name}{}\n", verdict(*ok), w.as_ref().map(|w| format!(" ({w})")).unwrap_or_default()));
        }
        out
    };
    Ok(Outcome { text, passed })
}

fn data_json(d: &LocalCurveData) -> Value {
    json!({ "g": d.g, "l1": d.l1, "l2": d.l2, "l3": d.l3, "l": d.l, "r": d.r })
}

fn local_curve(a: &LocalCurveArgs) -> Result<Outcome, Failure> {
    let ctx = a.ctx.context();
    let whole = LocalCurveData::new(a.g, a.l1, a.l2, a.l3, a.l)?;
    let exponent = local_curve_exponent(&whole, &ctx)?;
    let series = local_curve_series(&whole, a.nmax, &ctx)?;
    let split = a.split.map(|left| SplittingDatum::from_left(&whole, left)).transpose()?;
    let gluing = split.as_ref().map(|s| gluing_check(&whole, s, &ctx, a.nmax)).transpose()?;
    let passed = gluing.as_ref().is_none_or(|g| g.holds());

    let text = if a.format.json {
        let mut v = json!({
            "command": "local-curve",
            "n_max": a.nmax,
            "context": { "s2": ctx.s2.to_string(), "s3": ctx.s3.to_string(), "m": ctx.m.to_string() },
            "data": data_json(&whole),
            "exponent": exponent,
            "series": series_json(&series),
        });
        if let (Some(s), Some(g)) = (&split, &gluing) {
            v["split"] = json!({
                "left": data_json(&s.left),
                "right": data_json(&s.right),
                "left_exponent": local_curve_exponent(&s.left, &ctx)?,
                "right_exponent": local_curve_exponent(&s.right, &ctx)?,
                "additive": g.additive,
                "multiplicative": g.multiplicative,
                "verdict": verdict(g.holds()),
            });
        }
        output::json(&v)
    } else if a.format.csv {
        csv(&series, None)
    } else {
        let mut out = format!(
            "data: (g; l1, l2, l3; l) = ({}; {}, {}, {}; {}), r = {}\ncontext: {ctx}\nexponent: {exponent}\n",
            whole.g, whole.l1, whole.l2, whole.l3, whole.l, whole.r
        );
        let mut t = Table::new(&["n", "coefficient"]);
        for (k, c) in series.coeffs().iter().enumerate() {
            t.row(vec![k.to_string(), c.to_string()]);
        }
        out.push_str(&t.render());
        if let (Some(s), Some(g)) = (&split, &gluing) {
            out.push_str(&format!(
                "split: left r = {}, right r = {}\n{} exponent additivity\n{} series product to q^{}\n",
                s.left.r,
                s.right.r,
                verdict(g.additive),
                verdict(g.multiplicative),
                a.nmax
            ));
        }
        out
    };
    Ok(Outcome { text, passed })
}

fn residue(a: &ResidueArgs) -> Result<Outcome, Failure> {
    let n = a.nmax;
    let ctx = a.ctx.context();
    let z: QSeries<RatFn> = match a.source {
        Source::Closed => ck_closed_form(n, &ctx)?,
        Source::Localization => {
            let engine = Engine::new(n)?;
            engine.check_context(&ctx)?;
            let cal = seeded_calibration(&engine, a.seed)?;
            engine.z_c4_localized(n, &ctx, &cal.rule)?
        }
    };
    let f = f_inf0_residue(&z)?;
    let expected = log_macmahon_minus(n).scale(&ctx.m);
    let matches: Vec<bool> = f.coeffs().iter().zip(expected.coeffs()).map(|(x, y)| x == y).collect();
    let sigma_ok = (1..=n).all(|k| f.coeff(k).abs() == (&ctx.m * &Rat::new(sigma2(k as u64) as i64, k as i64)).abs());
    let w_ok = w_from_f_inf0(&f)? == w_infinity(n, &ctx)?;
    let checks = [
        ("residue_vs_m_log_macmahon", matches.iter().all(|ok| *ok)),
        ("sigma2_magnitudes", sigma_ok),
        ("w_inf_from_residue", w_ok),
    ];
    let passed = checks.iter().all(|c| c.1);

    let text = if a.format.json {
        let v = json!({
            "command": "residue",
            "n_max": n,
            "context": { "s2": ctx.s2.to_string(), "s3": ctx.s3.to_string(), "m": ctx.m.to_string() },
            "source": match a.source { Source::Closed => "closed", Source::Localization => "localization" },
            "f_inf0": series_json(&f),
            "expected": series_json(&expected),
            "coefficients": matches.iter().enumerate().map(|(k, ok)| json!({ "n": k, "match": ok })).collect::<Vec<_>>(),
            "match": matches.iter().all(|ok| *ok),
            "checks": checks.iter().map(|(name, ok)| json!({ "name": name, "verdict": verdict(*ok) })).collect::<Vec<_>>(),
            "verdict": verdict(passed),
        });
        output::json(&v)
    } else if a.format.csv {
        csv(&f, Some(&matches))
    } else {
        let mut out = format!("context: {ctx}\n");
        let mut t = Table::new(&["n", "F_inf,0", "m log M(-q)", "match"]);
        for (k, ok) in matches.iter().enumerate() {
            t.row(vec![k.to_string(), f.coeff(k).to_string(), expected.coeff(k).to_string(), ok.to_string()]);
        }
        out.push_str(&t.render());
        for (name, ok) in checks {
            out.push_str(&format!("{} {name}\n", verdict(ok)));
        }
        out
    };
    Ok(Outcome { text, passed })
}

fn verify(a: &VerifyArgs) -> Result<Outcome, Failure> {
    let injection = match a.inject {
        InjectArg::None => Injection::None,
        InjectArg::Sign => Injection::Sign,
        InjectArg::Exponent => Injection::Exponent,
    };
    let opts = SuiteOptions { injection, timings: a.timings };
    let report = run_suite_with(a.suite.into(), a.nmax, a.trials, a.seed, &opts)?;
    let text = if a.json {
        output::json(&serde_json::to_value(&report).expect("report serializes"))
    } else if a.junit {
        report.to_junit()
    } else {
        let mut out = String::new();
        for c in &report.checks {
            let mut line = format!("{} {}", c.verdict, c.name);
            if let Some(w) = &c.witness {
                line.push_str(&format!("  witness: {w}"));
            }
            if let Some(ms) = c.millis {
                line.push_str(&format!("  [{ms} ms]"));
            }
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(&format!(
            "{}: suite {} n_max {} trials {} seed {} ({} checks, {} failed)\n",
            report.verdict,
            report.suite,
            report.n_max,
            report.trials,
            report.seed,
            report.checks.len(),
            report.failures().count()
        ));
        out
    };
    Ok(Outcome { text, passed: report.passed() })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads.filter(|t| *t > 0) {
        // a second initialization only happens in-process; ignore it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = match &cli.command {
        Command::Partitions(a) => partitions(a),
        Command::Zc4(a) => zc4(a),
        Command::LocalCurve(a) => local_curve(a),
        Command::Residue(a) => residue(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            let diag = json!({ "error": error_kind(&e), "message": e.to_string() });
            eprintln!("{}", serde_json::to_string(&diag).expect("diagnostic serializes"));
            ExitCode::from(3)
        }
    }
}
