//! Localization sums over torus-fixed points of `Hilb^n(C^4)` and
//! `Hilb^n(C^3)`, and calibration of the per-point sign rule.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::character::{
    euler, half_discrepancy, insertion_weights, reference_half, square_root, tvir_4d, vertex_3d,
    Character,
};
use crate::context::{Evaluator, ParamContext};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::formulas::ck_closed_form;
use crate::partitions::{divisor_support, enumerate_plane, enumerate_solid, SolidPartition, MAX_SIZE};
use crate::qseries::QSeries;

/// Integer statistics of a solid partition entering a sign rule. Box
/// coordinates are one-based `(i, j, k, l)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `|pi|`
    Size,
    /// `#{boxes with l > 1}`
    Leg,
    /// `#{boxes with i = l}`
    DiagIl,
    /// `#{boxes with i < l}`
    BelowIl,
    /// `#{boxes (a, a, a, b) with a < b}`
    Kr,
    /// Parity of the weights on which the canonical square root and the
    /// reference half `Q - Pbar_123 Q Qbar` choose opposite duals.
    Flip,
}

impl Statistic {
    pub const ALL: [Statistic; 6] = [
        Statistic::Size,
        Statistic::Leg,
        Statistic::DiagIl,
        Statistic::BelowIl,
        Statistic::Kr,
        Statistic::Flip,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Statistic::Size => "size",
            Statistic::Leg => "leg",
            Statistic::DiagIl => "diag_il",
            Statistic::BelowIl => "below_il",
            Statistic::Kr => "kr",
            Statistic::Flip => "flip",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }

    /// Value for the box statistics; `Flip` needs the characters and is
    /// computed in [`FixedPoint::new`].
    fn count_boxes(&self, pi: &SolidPartition) -> i64 {
        let pred = |[i, j, k, l]: [u32; 4]| match self {
            Statistic::Size => true,
            Statistic::Leg => l >= 1,
            Statistic::DiagIl => i == l,
            Statistic::BelowIl => i < l,
            Statistic::Kr => i == j && j == k && i < l,
            Statistic::Flip => unreachable!(),
        };
        pi.boxes().filter(|b| pred(*b)).count() as i64
    }
}

/// Candidate families searched by calibration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignFamily {
    /// Parities of `size, leg, diag_il, below_il`, times a global sign.
    Box4,
    /// Parities of `size, diag_il, kr, flip`, times a global sign.
    KrFlip,
}

impl SignFamily {
    pub fn generators(&self) -> &'static [Statistic] {
        match self {
            SignFamily::Box4 => {
                &[Statistic::Size, Statistic::Leg, Statistic::DiagIl, Statistic::BelowIl]
            }
            SignFamily::KrFlip => {
                &[Statistic::Size, Statistic::DiagIl, Statistic::Kr, Statistic::Flip]
            }
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            SignFamily::Box4 => "box4",
            SignFamily::KrFlip => "kr_flip",
        }
    }

    /// Every candidate rule of the family, in a fixed order.
    pub fn candidates(&self) -> Vec<SignRule> {
        let gens = self.generators();
        let mut out = Vec::new();
        for epsilon in [1i8, -1] {
            for mask in 0u32..(1 << gens.len()) {
                let statistics =
                    gens.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, s)| *s).collect();
                out.push(SignRule { epsilon, statistics, flipped: Vec::new() });
            }
        }
        out
    }
}

/// `sign(pi) = epsilon * (-1)^{sum of statistics}`, optionally negated on an
/// explicit list of partitions (used only by negative controls).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignRule {
    pub epsilon: i8,
    pub statistics: Vec<Statistic>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flipped: Vec<SolidPartition>,
}

impl SignRule {
    /// `(-1)^{|pi| + kr(pi) + flip(pi)}` relative to the canonical square root.
    pub fn standard() -> Self {
        SignRule {
            epsilon: 1,
            statistics: vec![Statistic::Size, Statistic::Kr, Statistic::Flip],
            flipped: Vec::new(),
        }
    }

    pub fn id(&self) -> String {
        let sigma = if self.statistics.is_empty() {
            "0".to_string()
        } else {
            self.statistics.iter().map(Statistic::id).collect::<Vec<_>>().join("+")
        };
        let mut s = format!("eps={:+};sigma={sigma}", self.epsilon);
        if !self.flipped.is_empty() {
            s.push_str(&format!(";flipped={}", self.flipped.len()));
        }
        s
    }

    /// The same rule with the sign of `pi` negated.
    pub fn with_flipped(&self, pi: SolidPartition) -> Self {
        let mut r = self.clone();
        r.flipped.push(pi);
        r
    }

    pub fn sign(&self, fp: &FixedPoint) -> i64 {
        let parity: i64 = self.statistics.iter().map(|s| fp.stats[s.index()]).sum();
        let mut sign = if parity % 2 == 0 { 1 } else { -1 } * i64::from(self.epsilon);
        if self.flipped.contains(&fp.pi) {
            sign = -sign;
        }
        sign
    }
}

impl fmt::Display for SignRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Context-free data of one torus-fixed point of `Hilb^n(C^4)`.
#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub pi: SolidPartition,
    /// Canonical square root of `T^vir`.
    pub half: Character,
    /// `L^[n] (x) e^m` minus the canonical half.
    pub integrand: Character,
    stats: [i64; 6],
}

impl FixedPoint {
    pub fn new(pi: SolidPartition) -> Result<Self> {
        let t = tvir_4d(&pi)?;
        let half = square_root(&t)?;
        let flip = half_discrepancy(&half, &reference_half(&pi));
        let integrand = Character::from_weights(insertion_weights(&pi)).minus(&half);
        let mut stats = [0; 6];
        for s in Statistic::ALL {
            stats[s.index()] =
                if s == Statistic::Flip { flip } else { s.count_boxes(&pi) };
        }
        Ok(FixedPoint { pi, half, integrand, stats })
    }

    pub fn statistic(&self, s: Statistic) -> i64 {
        self.stats[s.index()]
    }

    pub fn size(&self) -> usize {
        self.pi.size()
    }
}

/// How the Euler class of the square root enters the series without
/// insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoInsertionConvention {
    /// Same orientation as the tautological series; equals the leading
    /// `m^n` part of its `q^n` coefficient.
    Same,
    /// Euler classes of dual weights, `e(t^w) = -w`: an extra `(-1)^n`.
    Dual,
}

/// Fixed points of `Hilb^n(C^4)` for `n <= n_max`, with characters cached.
pub struct Engine {
    n_max: usize,
    by_size: Vec<Vec<FixedPoint>>,
}

impl Engine {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max > MAX_SIZE {
            return Err(Error::SizeTooLarge(n_max, MAX_SIZE));
        }
        let by_size = (0..=n_max)
            .map(|n| enumerate_solid(n).into_par_iter().map(FixedPoint::new).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Engine { n_max, by_size })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn fixed_points(&self, n: usize) -> &[FixedPoint] {
        &self.by_size[n]
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            return Err(Error::SizeTooLarge(n, self.n_max));
        }
        Ok(())
    }

    /// Fails with `ZeroWeight` if some tangent weight of a fixed point
    /// vanishes at `ev`.
    pub fn check_context<E: Evaluator>(&self, ev: &E) -> Result<()> {
        for fp in self.by_size.iter().flatten() {
            for (w, _) in fp.half.terms() {
                if ev.vanishes(&w.linear_form(ev)) {
                    return Err(Error::ZeroWeight(format!("{w} at {}", fp.pi)));
                }
            }
        }
        Ok(())
    }

    /// Unsigned `e(L^[n] (x) e^m) / e(v)` for every fixed point of size `n`,
    /// in canonical order.
    pub fn unsigned_contributions<E: Evaluator>(&self, n: usize, ev: &E) -> Result<Vec<E::Value>> {
        self.check_order(n)?;
        self.by_size[n].par_iter().map(|fp| euler(&fp.integrand, ev)).collect()
    }

    pub fn contribution_4d<E: Evaluator>(
        &self,
        fp: &FixedPoint,
        ev: &E,
        rule: &SignRule,
    ) -> Result<E::Value> {
        Ok(euler(&fp.integrand, ev)?.scale(&crate::rat::Rat::int(rule.sign(fp))))
    }

    /// Signed contributions of every fixed point of size `n`.
    pub fn contributions<E: Evaluator>(
        &self,
        n: usize,
        ev: &E,
        rule: &SignRule,
    ) -> Result<Vec<E::Value>> {
        self.check_order(n)?;
        self.by_size[n].par_iter().map(|fp| self.contribution_4d(fp, ev, rule)).collect()
    }

    /// `1 + sum_n q^n sum_{|pi| = n} sign(pi) e(L^[n] (x) e^m)/e(v_pi)`.
    pub fn z_c4_localized<E: Evaluator>(
        &self,
        n_max: usize,
        ev: &E,
        rule: &SignRule,
    ) -> Result<QSeries<E::Value>> {
        self.check_order(n_max)?;
        let coeffs = (0..=n_max)
            .map(|n| Ok(sum(self.contributions(n, ev, rule)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(QSeries::new(n_max, coeffs))
    }

    /// `1 + sum_n q^n sum_{|pi| = n} sign(pi) / e(v_pi)`.
    pub fn z_c4_no_insertion<E: Evaluator>(
        &self,
        n_max: usize,
        ev: &E,
        rule: &SignRule,
        convention: NoInsertionConvention,
    ) -> Result<QSeries<E::Value>> {
        self.check_order(n_max)?;
        let coeffs = (0..=n_max)
            .map(|n| {
                let extra = match convention {
                    NoInsertionConvention::Dual if n % 2 == 1 => -1,
                    _ => 1,
                };
                let terms = self.by_size[n]
                    .par_iter()
                    .map(|fp| {
                        let sign = crate::rat::Rat::int(extra * rule.sign(fp));
                        Ok(euler(&fp.half.negate(), ev)?.scale(&sign))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(sum(terms))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QSeries::new(n_max, coeffs))
    }

    /// At `m = -s4`: the sum over divisor-supported partitions, and every
    /// other partition whose contribution is nonzero.
    pub fn divisor_restriction(
        &self,
        n_max: usize,
        ctx: &ParamContext,
        rule: &SignRule,
    ) -> Result<(QSeries<crate::ratfn::RatFn>, Vec<SolidPartition>)> {
        self.check_order(n_max)?;
        let special = ctx.at_m_minus_s4();
        let mut coeffs = Vec::with_capacity(n_max + 1);
        let mut stray = Vec::new();
        for n in 0..=n_max {
            let values = self.contributions(n, &special, rule)?;
            let mut acc = crate::ratfn::RatFn::zero();
            for (fp, v) in self.by_size[n].iter().zip(values) {
                if divisor_support(&fp.pi).is_some() {
                    acc = acc.plus(&v);
                } else if !v.is_zero() {
                    stray.push(fp.pi.clone());
                }
            }
            coeffs.push(acc);
        }
        Ok((QSeries::new(n_max, coeffs), stray))
    }
}

fn sum<F: Field>(values: Vec<F>) -> F {
    values.iter().fold(F::zero(), |acc, v| acc.plus(v))
}

/// `1 + sum_n q^n sum_{|lambda| = n} e(-V_lambda)`.
pub fn z_c3_localized<E: Evaluator>(n_max: usize, ev: &E) -> Result<QSeries<E::Value>> {
    if n_max > MAX_SIZE {
        return Err(Error::SizeTooLarge(n_max, MAX_SIZE));
    }
    let coeffs = (0..=n_max)
        .map(|n| {
            let terms = enumerate_plane(n)
                .into_par_iter()
                .map(|lam| euler(&vertex_3d(&lam)?.negate(), ev))
                .collect::<Result<Vec<_>>>()?;
            Ok(sum(terms))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QSeries::new(n_max, coeffs))
}

/// Contexts and orders used to fit a sign rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub family: SignFamily,
    pub n_cal: usize,
    pub n_val: usize,
    pub contexts: Vec<ParamContext>,
    pub survivors: Vec<String>,
}

/// Result of a calibration: the surviving candidates and the rule used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calibration {
    pub rule: SignRule,
    pub record: CalibrationRecord,
}

/// Candidates of `family` whose series matches the closed form for every
/// order `<= n_cal` at every context.
pub fn calibration_survivors(
    engine: &Engine,
    family: SignFamily,
    n_cal: usize,
    contexts: &[ParamContext],
) -> Result<Vec<SignRule>> {
    engine.check_order(n_cal)?;
    let mut survivors = family.candidates();
    for ctx in contexts {
        let closed = ck_closed_form(n_cal, ctx)?;
        for n in 0..=n_cal {
            let fps = engine.fixed_points(n);
            let values = engine.unsigned_contributions(n, ctx)?;
            survivors.retain(|rule| {
                let total = fps.iter().zip(&values).fold(crate::ratfn::RatFn::zero(), |acc, (fp, v)| {
                    if rule.sign(fp) > 0 {
                        acc.plus(v)
                    } else {
                        acc.minus(v)
                    }
                });
                &total == closed.coeff(n)
            });
        }
    }
    if survivors.is_empty() {
        return Err(Error::SignFamilyInsufficient);
    }
    Ok(survivors)
}

/// Fits the sign rule on orders `<= n_cal`, then requires all survivors to
/// assign identical signs to every fixed point of size `n_cal < n <= n_val`.
pub fn calibrate_sign_rule(
    engine: &Engine,
    family: SignFamily,
    n_cal: usize,
    n_val: usize,
    contexts: &[ParamContext],
) -> Result<Calibration> {
    engine.check_order(n_val)?;
    let survivors = calibration_survivors(engine, family, n_cal, contexts)?;
    let first = &survivors[0];
    for n in n_cal + 1..=n_val {
        for fp in engine.fixed_points(n) {
            if let Some(other) = survivors.iter().find(|r| r.sign(fp) != first.sign(fp)) {
                return Err(Error::SignSurvivorsDisagree(format!(
                    "{} and {} differ on {}",
                    first.id(),
                    other.id(),
                    fp.pi
                )));
            }
        }
    }
    let record = CalibrationRecord {
        family,
        n_cal,
        n_val,
        contexts: contexts.to_vec(),
        survivors: survivors.iter().map(SignRule::id).collect(),
    };
    Ok(Calibration { rule: first.clone(), record })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::euler;
    use crate::context::NumericContext;
    use crate::formulas::ck_exponent;
    use crate::qseries::macmahon_power;
    use crate::rat::Rat;
    use crate::ratfn::RatFn;

    fn contexts() -> Vec<ParamContext> {
        vec![
            ParamContext::new(Rat::new(13, 7), Rat::new(-5, 11), Rat::new(3, 2)),
            ParamContext::new(Rat::new(-29, 3), Rat::new(17, 19), Rat::new(-7, 5)),
            ParamContext::new(Rat::new(41, 13), Rat::new(23, 9), Rat::new(2, 3)),
        ]
    }

    #[test]
    fn single_box_contribution() {
        let engine = Engine::new(1).unwrap();
        let ctx = &contexts()[0];
        let fp = &engine.fixed_points(1)[0];
        let c = engine.contribution_4d(fp, ctx, &SignRule::standard()).unwrap();
        assert_eq!(c, ck_exponent(ctx).unwrap().neg());
    }

    #[test]
    fn standard_rule_matches_closed_form() {
        let engine = Engine::new(3).unwrap();
        for ctx in contexts() {
            let z = engine.z_c4_localized(3, &ctx, &SignRule::standard()).unwrap();
            assert_eq!(z, ck_closed_form(3, &ctx).unwrap());
        }
    }

    #[test]
    fn box4_family_is_not_identifiable() {
        let engine = Engine::new(4).unwrap();
        let r = calibrate_sign_rule(&engine, SignFamily::Box4, 2, 4, &contexts());
        assert!(
            matches!(r, Err(Error::SignSurvivorsDisagree(_)) | Err(Error::SignFamilyInsufficient)),
            "{r:?}"
        );
    }

    #[test]
    fn kr_flip_family_calibrates_to_standard() {
        let engine = Engine::new(4).unwrap();
        let cal = calibrate_sign_rule(&engine, SignFamily::KrFlip, 2, 4, &contexts()).unwrap();
        assert_eq!(cal.record.survivors.len(), 1);
        assert_eq!(cal.rule, SignRule::standard());
    }

    #[test]
    fn m_zero_gives_one() {
        let engine = Engine::new(3).unwrap();
        let ctx = contexts()[1].with_m(Rat::zero());
        assert_eq!(engine.z_c4_localized(3, &ctx, &SignRule::standard()).unwrap(), QSeries::one(3));
    }

    #[test]
    fn leg_partitions_vanish_at_m_minus_s4() {
        let engine = Engine::new(3).unwrap();
        let (_, stray) = engine.divisor_restriction(3, &contexts()[0], &SignRule::standard()).unwrap();
        assert!(stray.is_empty());
        let special = contexts()[0].at_m_minus_s4();
        let tall = SolidPartition::from_heights(vec![vec![vec![2]]]).unwrap();
        let fp = FixedPoint::new(tall).unwrap();
        assert!(euler(&fp.integrand, &special).unwrap().is_zero());
    }

    #[test]
    fn z_c3_matches_mnop() {
        let ctx = &contexts()[2];
        let z = z_c3_localized(3, ctx).unwrap();
        let [s1, s2, s3, _] = ctx.s_values();
        let x = s1.plus(&s2).times(&s1.plus(&s3)).times(&s2.plus(&s3));
        let e = x.neg().checked_div(&s1.times(&s2).times(&s3)).unwrap();
        assert_eq!(z, macmahon_power(&e, 3));
    }

    #[test]
    fn numeric_mode_agrees_with_symbolic() {
        let engine = Engine::new(2).unwrap();
        let ctx = contexts()[0].clone();
        let s1 = Rat::new(31, 37);
        let sym = engine.z_c4_localized(2, &ctx, &SignRule::standard()).unwrap();
        let num = engine.z_c4_localized(2, &NumericContext::new(ctx, s1.clone()), &SignRule::standard()).unwrap();
        assert_eq!(sym.try_map(|c: &RatFn| c.eval(&s1)).unwrap(), num);
    }

    #[test]
    fn rule_ids() {
        assert_eq!(SignRule::standard().id(), "eps=+1;sigma=size+kr+flip");
        assert_eq!(SignFamily::Box4.candidates().len(), 32);
        assert_eq!(SignFamily::Box4.candidates()[16].id(), "eps=-1;sigma=0");
    }
}
