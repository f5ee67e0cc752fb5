//! Acceptance batteries: sampled contexts, localization-vs-closed-form
//! comparisons, property checks, negative controls and report emission.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::{Evaluator, NumericContext, ParamContext};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::formulas::{
    ck_closed_form, ck_exponent, f_inf0_residue, gluing_check, local_curve_exponent, no_insertion_closed,
    no_insertion_exponent, rel_exponent,
    w_from_f_inf0, w_infinity, z_rel_twisted_product, z_rel_twisted_substitution,
    LocalCurveData, SplittingDatum,
};
use crate::partitions::{enumerate_plane, enumerate_solid};
use crate::qseries::{log_macmahon_minus, macmahon_power, sigma2, QSeries};
use crate::rat::Rat;
use crate::ratfn::RatFn;
use crate::vertex::{
    calibrate_sign_rule, z_c3_localized, Calibration, CalibrationRecord, Engine,
    NoInsertionConvention, SignFamily, SignRule,
};

const RESAMPLE_ATTEMPTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    C4,
    Mnop,
    Relative,
    Rubber,
    LocalCurve,
    Symmetry,
    All,
}

impl Suite {
    pub const NAMED: [Suite; 6] =
        [Suite::C4, Suite::Mnop, Suite::Relative, Suite::Rubber, Suite::LocalCurve, Suite::Symmetry];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::C4 => "c4",
            Suite::Mnop => "mnop",
            Suite::Relative => "relative",
            Suite::Rubber => "rubber",
            Suite::LocalCurve => "local-curve",
            Suite::Symmetry => "symmetry",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::NAMED
            .iter()
            .chain(&[Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Deliberate corruption of the inputs, for demonstrating that the suite
/// notices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Injection {
    #[default]
    None,
    /// Negate the sign of the first fixed point of size `min(3, n_max)`.
    Sign,
    /// Add one to every closed-form exponent.
    Exponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub contexts: Vec<String>,
    pub order: usize,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub injection: Injection,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationRecord>,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn to_junit(&self) -> String {
        let failures = self.failures().count();
        let mut s = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str(&format!(
            "<testsuite name=\"{}\" tests=\"{}\" failures=\"{}\">\n",
            xml_escape(self.suite.name()),
            self.checks.len(),
            failures
        ));
        for c in &self.checks {
            let time = c.millis.map(|ms| format!(" time=\"{:.3}\"", ms as f64 / 1000.0)).unwrap_or_default();
            s.push_str(&format!("  <testcase name=\"{}\"{time}", xml_escape(&c.name)));
            if c.verdict == Verdict::Pass {
                s.push_str("/>\n");
            } else {
                let msg = c.witness.as_deref().or(c.detail.as_deref()).unwrap_or("mismatch");
                s.push_str(&format!(">\n    <failure message=\"{}\"/>\n  </testcase>\n", xml_escape(msg)));
            }
        }
        s.push_str("</testsuite>\n");
        s
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    pub injection: Injection,
    /// Record wall-clock milliseconds per check (breaks byte-identity).
    pub timings: bool,
}

/// Runs a named battery deterministically from `seed`.
pub fn run_suite(suite: Suite, n_max: usize, trials: usize, seed: u64) -> Result<VerificationReport> {
    run_suite_with(suite, n_max, trials, seed, &SuiteOptions::default())
}

/// Sampled contexts, redrawn when a fixed-point weight vanishes.
pub fn sample_contexts<R: Rng>(engine: &Engine, rng: &mut R, count: usize) -> Vec<ParamContext> {
    (0..count)
        .map(|_| {
            let mut ctx = ParamContext::sample(rng, engine.n_max());
            for _ in 0..RESAMPLE_ATTEMPTS {
                if engine.check_context(&ctx).is_ok() {
                    break;
                }
                ctx = ParamContext::sample(rng, engine.n_max());
            }
            ctx
        })
        .collect()
}

/// `count` contexts drawn from `seed` as in [`sample_contexts`].
pub fn seeded_contexts(engine: &Engine, seed: u64, count: usize) -> Vec<ParamContext> {
    sample_contexts(engine, &mut ChaCha8Rng::seed_from_u64(seed), count)
}

/// Sign rule fitted on orders `<= 2` at three contexts drawn from `seed`,
/// validated up to the engine's order.
pub fn seeded_calibration(engine: &Engine, seed: u64) -> Result<Calibration> {
    let contexts = seeded_contexts(engine, seed, 3);
    calibrate_sign_rule(engine, SignFamily::KrFlip, 2.min(engine.n_max()), engine.n_max(), &contexts)
}

pub fn run_suite_with(
    suite: Suite,
    n_max: usize,
    trials: usize,
    seed: u64,
    opts: &SuiteOptions,
) -> Result<VerificationReport> {
    if n_max > crate::partitions::MAX_SIZE {
        return Err(Error::SizeTooLarge(n_max, crate::partitions::MAX_SIZE));
    }
    let mut runner = Runner::new(n_max, trials.max(1), seed, opts.clone())?;
    let suites: Vec<Suite> = if suite == Suite::All { Suite::NAMED.to_vec() } else { vec![suite] };
    for s in suites {
        match s {
            Suite::C4 => runner.c4(),
            Suite::Mnop => runner.mnop(),
            Suite::Relative => runner.relative(),
            Suite::Rubber => runner.rubber(),
            Suite::LocalCurve => runner.local_curve(),
            Suite::Symmetry => runner.symmetry(),
            Suite::All => unreachable!(),
        }
    }
    let verdict = Verdict::from_bool(runner.log.checks.iter().all(|c| c.verdict == Verdict::Pass));
    Ok(VerificationReport {
        suite,
        n_max,
        trials,
        seed,
        injection: opts.injection,
        verdict,
        calibration: runner.calibration,
        checks: runner.log.checks,
    })
}

struct Runner {
    n_max: usize,
    trials: usize,
    seed: u64,
    opts: SuiteOptions,
    engine: Engine,
    rule: Option<SignRule>,
    calibration: Option<CalibrationRecord>,
    log: CheckLog,
}

struct CheckLog {
    timings: bool,
    checks: Vec<CheckRecord>,
}

impl CheckLog {
    fn record(&mut self, name: &str, contexts: Vec<String>, order: usize, body: impl FnOnce() -> Result<Outcome>) {
        let start = Instant::now();
        let out = body().unwrap_or_else(|e| Outcome::fail(format!("error: {e}")));
        let millis = self.timings.then(|| start.elapsed().as_millis() as u64);
        self.checks.push(CheckRecord {
            name: name.to_string(),
            contexts,
            order,
            verdict: Verdict::from_bool(out.ok),
            witness: out.witness,
            detail: out.detail,
            millis,
        });
    }
}

/// Result of one check body: pass/fail plus an optional witness.
struct Outcome {
    ok: bool,
    witness: Option<String>,
    detail: Option<String>,
}

impl Outcome {
    fn pass() -> Self {
        Outcome { ok: true, witness: None, detail: None }
    }

    fn fail(witness: String) -> Self {
        Outcome { ok: false, witness: Some(witness), detail: None }
    }

    fn check(ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Outcome::pass()
        } else {
            Outcome::fail(witness())
        }
    }

    fn with_detail(mut self, d: String) -> Self {
        self.detail = Some(d);
        self
    }
}

impl Runner {
    fn new(n_max: usize, trials: usize, seed: u64, opts: SuiteOptions) -> Result<Self> {
        Ok(Runner {
            opts: opts.clone(),
            n_max,
            trials,
            seed,
            engine: Engine::new(n_max)?,
            rule: None,
            calibration: None,
            log: CheckLog { timings: opts.timings, checks: Vec::new() },
        })
    }

    /// A fresh generator per battery, so suites do not depend on each other.
    fn rng(&self, salt: &str) -> ChaCha8Rng {
        let h = salt.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
        ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }

    fn contexts(&self, salt: &str, count: usize) -> Vec<ParamContext> {
        sample_contexts(&self.engine, &mut self.rng(salt), count)
    }

    fn numeric_contexts(&self, salt: &str, count: usize) -> Vec<NumericContext> {
        let mut rng = self.rng(salt);
        (0..count)
            .map(|_| {
                let mut nc = NumericContext::sample(&mut rng, self.n_max);
                for _ in 0..RESAMPLE_ATTEMPTS {
                    if self.engine.check_context(&nc).is_ok() {
                        break;
                    }
                    nc = NumericContext::sample(&mut rng, self.n_max);
                }
                nc
            })
            .collect()
    }


    /// Perturbation of closed-form exponents under the active injection.
    fn shift(&self) -> i64 {
        i64::from(self.opts.injection == Injection::Exponent)
    }

    fn closed_power<F: Field>(&self, e: F, n: usize) -> QSeries<F> {
        macmahon_power(&e.plus(&F::from_int(self.shift())), n)
    }

    /// Calibrated rule, with the sign injection applied when requested.
    fn sign_rule(&mut self) -> Result<SignRule> {
        if self.rule.is_none() {
            let n_cal = 2.min(self.n_max);
            let contexts = self.contexts("calibration", self.trials.max(2));
            let cal = calibrate_sign_rule(&self.engine, SignFamily::KrFlip, n_cal, self.n_max, &contexts)?;
            self.calibration = Some(cal.record);
            self.rule = Some(cal.rule);
        }
        let rule = self.rule.clone().expect("calibrated above");
        Ok(match self.opts.injection {
            Injection::Sign => {
                let n = 3.min(self.n_max).max(1);
                match self.engine.fixed_points(n).first() {
                    Some(fp) => rule.with_flipped(fp.pi.clone()),
                    None => rule,
                }
            }
            _ => rule,
        })
    }

    fn c4(&mut self) {
        let n = self.n_max;
        let contexts = self.contexts("c4", self.trials.max(3));
        let names: Vec<String> = contexts.iter().map(ToString::to_string).collect();

        let rule = self.sign_rule();
        let survivors = self.calibration.as_ref().map(|c| c.survivors.join(", ")).unwrap_or_default();
        self.log.record("c4.sign_calibration", names.clone(), 2.min(n), || {
            rule.as_ref().map_err(Clone::clone)?;
            Ok(Outcome::pass().with_detail(format!("survivors: {survivors}")))
        });
        let Ok(rule) = rule else { return };

        let box4 = {
            let cal_contexts = self.contexts("calibration", self.trials.max(2));
            match calibrate_sign_rule(&self.engine, SignFamily::Box4, 2.min(n), n, &cal_contexts) {
                Ok(c) => format!("box4 family survivors: {}", c.record.survivors.join(", ")),
                Err(e) => format!("box4 family: {e}"),
            }
        };
        self.log.record("c4.box4_family_diagnostic", vec![], 2.min(n), || Ok(Outcome::pass().with_detail(box4)));

        for (i, ctx) in contexts.iter().enumerate() {
            let engine = &self.engine;
            let closed = ck_exponent(ctx).map(|e| self.closed_power(e, n));
            self.log.record(&format!("c4.localized_vs_closed[{i}]"), vec![ctx.to_string()], n, || {
                let z = engine.z_c4_localized(n, ctx, &rule)?;
                compare_with_witness(engine, ctx, &rule, &z, &closed?)
            });
        }

        let no_ins = n.min(3);
        for (i, ctx) in contexts.iter().enumerate() {
            let engine = &self.engine;
            let rule = &rule;
            let shift = self.shift();
            self.log.record(&format!("c4.no_insertion[{i}]"), vec![ctx.to_string()], no_ins, || {
                let z = engine.z_c4_no_insertion(no_ins, ctx, rule, NoInsertionConvention::Dual)?;
                let a = no_insertion_exponent(ctx)?.plus(&RatFn::from_int(shift));
                let expected = QSeries::monomial(no_ins, 1, a).exp()?;
                Ok(series_outcome(&z, &expected))
            });
            self.log.record(&format!("c4.no_insertion_leading_m[{i}]"), vec![ctx.to_string()], no_ins, || {
                let z = engine.z_c4_no_insertion(no_ins, ctx, rule, NoInsertionConvention::Same)?;
                // leading m^n part of M(-q)^E: exp(q * E/(-m))
                let a = ck_exponent(&ctx.with_m(Rat::one()))?.neg().plus(&RatFn::from_int(shift));
                Ok(series_outcome(&z, &QSeries::monomial(no_ins, 1, a).exp()?))
            });
            self.log.record(&format!("c4.divisibility_by_m[{i}]"), vec![ctx.to_string()], n, || {
                let z = engine.z_c4_localized(n, &ctx.with_m(Rat::zero()), rule)?;
                Ok(series_outcome(&z, &QSeries::one(n)))
            });
        }

        self.negative_controls(&contexts[0], &rule);
    }

    /// Perturbations that must be detected, recorded as passing checks when
    /// they are.
    fn negative_controls(&mut self, ctx: &ParamContext, rule: &SignRule) {
        let n = self.n_max;
        if self.opts.injection != Injection::None || n == 0 {
            return;
        }
        let engine = &self.engine;
        let k = 3.min(n);
        self.log.record("negative.sign_flip", vec![ctx.to_string()], n, || {
            let target = engine.fixed_points(k)[0].pi.clone();
            let bad = rule.with_flipped(target.clone());
            let z = engine.z_c4_localized(n, ctx, &bad)?;
            let out = compare_with_witness(engine, ctx, &bad, &z, &ck_closed_form(n, ctx)?)?;
            Ok(detected(out, &format!("flipped sign of {target}")))
        });
        self.log.record("negative.exponent_shift", vec![ctx.to_string()], n, || {
            let z = engine.z_c4_localized(n, ctx, rule)?;
            let bad = macmahon_power(&ck_exponent(ctx)?.plus(&RatFn::one()), n);
            let out = compare_with_witness(engine, ctx, rule, &z, &bad)?;
            Ok(detected(out, "exponent + 1"))
        });
        self.log.record("negative.no_insertion_convention", vec![ctx.to_string()], k, || {
            let z = engine.z_c4_no_insertion(k, ctx, rule, NoInsertionConvention::Same)?;
            let expected = no_insertion_closed(k, ctx)?;
            Ok(detected(series_outcome(&z, &expected), "same-orientation series vs corollary"))
        });
    }

    fn mnop(&mut self) {
        let n = self.n_max;
        let contexts = self.contexts("mnop", self.trials.max(3));
        let rule = match self.sign_rule() {
            Ok(r) => r,
            Err(e) => {
                self.log.record("mnop.sign_rule", vec![], n, || Err(e));
                return;
            }
        };
        for (i, ctx) in contexts.iter().enumerate() {
            let [s1, s2, s3, _] = ctx.s_values();
            let x = s1.plus(&s2).times(&s1.plus(&s3)).times(&s2.plus(&s3));
            let e = x.neg().checked_div(&s1.times(&s2).times(&s3)).expect("s1 s2 s3 is nonzero");
            let expected = self.closed_power(e, n);
            self.log.record(&format!("mnop.z_c3_vs_closed[{i}]"), vec![ctx.to_string()], n, || {
                Ok(series_outcome(&z_c3_localized(n, ctx)?, &expected))
            });
            let engine = &self.engine;
            self.log.record(&format!("mnop.divisor_restriction[{i}]"), vec![ctx.to_string()], n, || {
                let (restricted, stray) = engine.divisor_restriction(n, ctx, &rule)?;
                if let Some(pi) = stray.first() {
                    return Ok(Outcome::fail(format!("nonzero off-divisor contribution from {pi}")));
                }
                Ok(series_outcome(&restricted, &z_c3_localized(n, ctx)?))
            });
        }
    }

    fn closed_order(&self) -> usize {
        self.n_max.max(6)
    }

    fn relative(&mut self) {
        let n = self.closed_order();
        let contexts = self.contexts("relative", self.trials.max(3));
        for (i, ctx) in contexts.iter().enumerate() {
            let shift = self.shift();
            self.log.record(&format!("relative.product[{i}]"), vec![ctx.to_string()], n, || {
                let lhs = macmahon_power(&rel_exponent(ctx)?.plus(&RatFn::from_int(shift)), n);
                let rhs = ck_closed_form(n, ctx)?.mul(&w_infinity(n, ctx)?)?;
                Ok(series_outcome(&lhs, &rhs))
            });
            let tw = 4.max(self.n_max);
            self.log.record(&format!("relative.twisted[{i}]"), vec![ctx.to_string()], tw, || {
                for l in -2..=3 {
                    let a = z_rel_twisted_product(l + shift, tw, ctx)?;
                    let b = z_rel_twisted_substitution(l, tw, ctx)?;
                    if let Some(k) = a.first_mismatch(&b) {
                        return Ok(Outcome::fail(format!("l = {l}, coefficient q^{k}")));
                    }
                }
                Ok(Outcome::pass())
            });
        }
    }

    fn rubber(&mut self) {
        let n = self.closed_order();
        let contexts = self.contexts("rubber", self.trials.max(3));
        let log_m = log_macmahon_minus(n);
        self.log.record("rubber.sigma2_law", vec![], n, || {
            let bad = (1..=n).find(|&k| log_m.coeff(k).abs() != Rat::new(sigma2(k as u64) as i64, k as i64));
            Ok(Outcome::check(bad.is_none(), || format!("coefficient q^{}", bad.unwrap_or(0))))
        });
        for (i, ctx) in contexts.iter().enumerate() {
            let shift = self.shift();
            let z = ck_exponent(ctx).map(|e| self.closed_power(e, n));
            self.log.record(&format!("rubber.f_inf0_residue[{i}]"), vec![ctx.to_string()], n, || {
                let f = f_inf0_residue(&z.clone()?)?;
                Ok(series_outcome(&f, &log_m.scale(&ctx.m)))
            });
            self.log.record(&format!("rubber.f_relation[{i}]"), vec![ctx.to_string()], n, || {
                let f = f_inf0_residue(&ck_closed_form(n, ctx)?)?;
                Ok(series_outcome(&w_from_f_inf0(&f)?, &w_infinity(n, ctx)?))
            });
            self.log.record(&format!("rubber.rel_log_poles[{i}]"), vec![ctx.to_string()], n, || {
                let e = rel_exponent(ctx)?.plus(&RatFn::from_int(shift));
                let log = macmahon_power(&e, n).log()?;
                let allowed = [-ctx.s2.clone(), -(&ctx.s2 + &ctx.s3)];
                for k in 1..=n {
                    let c = log.coeff(k);
                    if c.pole_order_at_zero() != 0 {
                        return Ok(Outcome::fail(format!("q^{k}: pole at s1 = 0")));
                    }
                    let poles = c.pole_locations();
                    if !poles.complete || poles.nonrational_factor {
                        return Ok(Outcome::fail(format!("q^{k}: denominator {} not split", c.den())));
                    }
                    if let Some(p) = poles.roots.iter().find(|p| !allowed.contains(p)) {
                        return Ok(Outcome::fail(format!("q^{k}: pole at s1 = {p}")));
                    }
                }
                Ok(Outcome::pass())
            });
            self.log.record(&format!("rubber.ck_log_simple_pole[{i}]"), vec![ctx.to_string()], n, || {
                let log = z.clone()?.log()?;
                let bad = (1..=n).find(|&k| log.coeff(k).pole_order_at_zero() != 1);
                Ok(Outcome::check(bad.is_none(), || format!("q^{}: pole order {}", bad.unwrap_or(0), bad.map(|k| log.coeff(k).pole_order_at_zero()).unwrap_or(0))))
            });
        }
    }

    fn local_curve(&mut self) {
        let n = self.closed_order();
        let contexts = self.contexts("local-curve", self.trials.max(3));
        let mut rng = self.rng("splittings");
        let splits = random_splittings(&mut rng, 20.max(self.trials));
        let shift = self.shift();
        for (i, (whole, split)) in splits.iter().enumerate() {
            let ctx = &contexts[i % contexts.len()];
            self.log.record(
                &format!("local_curve.gluing[{i}]"),
                vec![ctx.to_string()],
                n,
                || {
                    let label = format!("{whole:?} = {:?} + {:?}", split.left, split.right);
                    if shift == 0 {
                        let out = gluing_check(whole, split, ctx, n)?;
                        return Ok(Outcome::check(out.holds(), || format!("{label}: {out:?}")).with_detail(label));
                    }
                    let e = local_curve_exponent(whole, ctx)?.plus(&RatFn::one());
                    let parts = local_curve_exponent(&split.left, ctx)?.plus(&local_curve_exponent(&split.right, ctx)?);
                    Ok(Outcome::check(e == parts, || format!("{label}: exponents differ")))
                },
            );
        }
        let base = [[0, -1, 0, 0, 0], [0, 0, -1, 0, 0], [0, 0, 0, -1, 0]];
        for (i, nc) in self.numeric_contexts("local-curve-base", self.trials.max(3)).iter().enumerate() {
            self.log.record(&format!("local_curve.base_permutations[{i}]"), vec![numeric_label(nc)], n, || {
                let mut exps = Vec::new();
                for (j, d) in base.iter().enumerate() {
                    let data = LocalCurveData::new(d[0], d[1], d[2], d[3], d[4])?;
                    // cyclic relabelling s2 -> s3 -> s4 -> s2, applied j times
                    let relabeled = cycle_234(nc, j);
                    exps.push(local_curve_exponent(&data, &relabeled)?);
                }
                let rel = rel_exponent(nc)?.plus(&Rat::int(shift));
                let ok = exps.iter().all(|e| *e == rel);
                let series: Vec<_> = exps.iter().map(|e| macmahon_power(e, n)).collect();
                let ok = ok && series.windows(2).all(|w| w[0] == w[1]);
                Ok(Outcome::check(ok, || format!("exponents {}", exps.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))))
            });
        }
    }

    fn symmetry(&mut self) {
        let n = self.n_max;
        let rule = match self.sign_rule() {
            Ok(r) => r,
            Err(e) => {
                self.log.record("symmetry.sign_rule", vec![], n, || Err(e));
                return;
            }
        };
        for (i, nc) in self.numeric_contexts("symmetry", self.trials).iter().enumerate() {
            let engine = &self.engine;
            let label = vec![numeric_label(nc)];
            let base = engine.z_c4_localized(n, nc, &rule);
            self.log.record(&format!("symmetry.s3[{i}]"), label.clone(), n, || {
                let base = base.clone()?;
                let (s1, s2, s3) = (nc.s1.clone(), nc.ctx.s2.clone(), nc.ctx.s3.clone());
                let perms = [
                    (s2.clone(), s1.clone(), s3.clone()),
                    (s3.clone(), s2.clone(), s1.clone()),
                    (s1.clone(), s3.clone(), s2.clone()),
                    (s2.clone(), s3.clone(), s1.clone()),
                    (s3.clone(), s1.clone(), s2.clone()),
                ];
                for (a, b, c) in perms {
                    let p = NumericContext::from_values(a, b, c, nc.ctx.m.clone());
                    let z = engine.z_c4_localized(n, &p, &rule)?;
                    if let Some(k) = z.first_mismatch(&base) {
                        return Ok(Outcome::fail(format!("permutation {}: coefficient q^{k}", numeric_label(&p))));
                    }
                }
                Ok(Outcome::pass())
            });
            self.log.record(&format!("symmetry.involution[{i}]"), label.clone(), n, || {
                let inv = NumericContext::new(nc.ctx.clone(), nc.s4());
                Ok(series_outcome(&engine.z_c4_localized(n, &inv, &rule)?, &base.clone()?))
            });
            self.log.record(&format!("symmetry.homogeneity[{i}]"), label.clone(), n, || {
                let lam = Rat::new(-7, 3);
                let scaled = NumericContext::from_values(&nc.s1 * &lam, &nc.ctx.s2 * &lam, &nc.ctx.s3 * &lam, &nc.ctx.m * &lam);
                Ok(series_outcome(&engine.z_c4_localized(n, &scaled, &rule)?, &base.clone()?))
            });
            self.log.record(&format!("symmetry.divisibility[{i}]"), label.clone(), n, || {
                let mut z = nc.clone();
                z.ctx.m = Rat::zero();
                Ok(series_outcome(&engine.z_c4_localized(n, &z, &rule)?, &QSeries::one(n)))
            });
        }
        let sizes = 6.max(n);
        self.log.record("symmetry.partition_counts", vec![], sizes, || {
            for k in 0..=sizes {
                let (p, s) = (enumerate_plane(k).len(), enumerate_solid(k).len());
                let (po, so) = (oracle_count(3, k), oracle_count(4, k));
                if p != po || s != so {
                    return Ok(Outcome::fail(format!("size {k}: plane {p} vs {po}, solid {s} vs {so}")));
                }
            }
            Ok(Outcome::pass())
        });
    }
}

/// `Fail` outcomes of a perturbed computation become passing checks (the
/// perturbation was detected), carrying the witness along.
fn detected(out: Outcome, what: &str) -> Outcome {
    if out.ok {
        Outcome::fail(format!("{what}: not detected"))
    } else {
        let witness = out.witness.unwrap_or_default();
        Outcome { ok: true, witness: None, detail: Some(format!("{what}: detected, witness {witness}")) }
    }
}

fn series_outcome<F: Field>(got: &QSeries<F>, expected: &QSeries<F>) -> Outcome {
    match got.first_mismatch(expected) {
        None if got.order() == expected.order() => Outcome::pass(),
        None => Outcome::fail(format!("orders {} vs {}", got.order(), expected.order())),
        Some(k) => mismatch_at(k, got, expected),
    }
}

/// On mismatch at `q^k`, names a fixed point whose sign change alone would
/// account for the difference, when one exists.
fn compare_with_witness<E: Evaluator>(
    engine: &Engine,
    ev: &E,
    rule: &SignRule,
    got: &QSeries<E::Value>,
    expected: &QSeries<E::Value>,
) -> Result<Outcome> {
    let Some(k) = got.first_mismatch(expected) else {
        return Ok(Outcome::pass());
    };
    let delta = got.coeff(k).minus(expected.coeff(k));
    let values = engine.contributions(k, ev, rule)?;
    let two = Rat::int(2);
    for (fp, v) in engine.fixed_points(k).iter().zip(&values) {
        if v.scale(&two) == delta {
            return Ok(Outcome::fail(format!("size {k} partition {}", fp.pi)));
        }
    }
    Ok(mismatch_at(k, got, expected))
}

fn mismatch_at<F: Field>(k: usize, got: &QSeries<F>, expected: &QSeries<F>) -> Outcome {
    Outcome::fail(format!("coefficient q^{k}"))
        .with_detail(format!("got {}, expected {}", got.coeff(k), expected.coeff(k)))
}

fn numeric_label(nc: &NumericContext) -> String {
    format!("s1={}, {}", nc.s1, nc.ctx)
}

/// The context seen after renaming `s2 -> s3 -> s4 -> s2` `times` times.
fn cycle_234(nc: &NumericContext, times: usize) -> NumericContext {
    let mut cur = nc.clone();
    for _ in 0..times {
        let s4 = cur.s4();
        cur = NumericContext::from_values(cur.s1.clone(), s4, cur.ctx.s2.clone(), cur.ctx.m.clone());
    }
    cur
}

/// Random whole data with `g <= 3` and a valid split, all degrees on
/// every side bounded by 4 in absolute value.
pub fn random_splittings<R: Rng>(rng: &mut R, count: usize) -> Vec<(LocalCurveData, SplittingDatum)> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = rng.gen_range(0..=3);
        let d: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-4..=4));
        let Ok(whole) = LocalCurveData::new(g, d[0], d[1], d[2], d[3]) else { continue };
        let left = [
            rng.gen_range(0..=g),
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
        ];
        let Ok(split) = SplittingDatum::from_left(&whole, left) else { continue };
        let r = &split.right;
        if [r.l1, r.l2, r.l3, r.l].iter().all(|d| d.abs() <= 4) {
            out.push((whole, split));
        }
    }
    out
}

/// Partition count by breadth-first box addition on sets of boxes, with no
/// shared code path with the layer-stacking enumerator.
pub fn oracle_count(dim: usize, n: usize) -> usize {
    let mut level: HashSet<Vec<Vec<u32>>> = HashSet::from([Vec::new()]);
    for _ in 0..n {
        let mut next = HashSet::new();
        for boxes in &level {
            let set: HashSet<&Vec<u32>> = boxes.iter().collect();
            let mut candidates: Vec<Vec<u32>> = vec![vec![0; dim]];
            for b in boxes {
                for a in 0..dim {
                    let mut c = b.clone();
                    c[a] += 1;
                    candidates.push(c);
                }
            }
            for c in candidates {
                if set.contains(&c) {
                    continue;
                }
                let supported = (0..dim).all(|a| {
                    c[a] == 0 || {
                        let mut p = c.clone();
                        p[a] -= 1;
                        set.contains(&p)
                    }
                });
                if supported {
                    let mut grown = boxes.clone();
                    grown.push(c);
                    grown.sort();
                    next.insert(grown);
                }
            }
        }
        level = next;
    }
    level.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_counts() {
        let plane: Vec<usize> = (0..=5).map(|n| oracle_count(3, n)).collect();
        assert_eq!(plane, [1, 1, 3, 6, 13, 24]);
        let solid: Vec<usize> = (0..=5).map(|n| oracle_count(4, n)).collect();
        assert_eq!(solid, [1, 1, 4, 10, 26, 59]);
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::NAMED.iter().chain(&[Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn splittings_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (whole, split) in random_splittings(&mut rng, 30) {
            assert!(split.is_splitting_of(&whole));
            assert!(whole.g <= 3 && split.left.r >= 0 && split.right.r >= 0);
        }
    }

    #[test]
    fn junit_escapes() {
        let r = VerificationReport {
            suite: Suite::C4,
            n_max: 1,
            trials: 1,
            seed: 0,
            injection: Injection::None,
            verdict: Verdict::Fail,
            calibration: None,
            checks: vec![CheckRecord {
                name: "a<b".into(),
                contexts: vec![],
                order: 1,
                verdict: Verdict::Fail,
                witness: Some("x \"y\"".into()),
                detail: None,
                millis: None,
            }],
        };
        let x = r.to_junit();
        assert!(x.contains("a&lt;b"));
        assert!(x.contains("x &quot;y&quot;"));
        assert!(x.contains("failures=\"1\""));
    }
}
