//! Parameter contexts: exact values for `s2`, `s3`, `m`, with `s1` either
//! kept symbolic or bound to a rational.
//!
//! `s4` is never stored. It is the affine map `s1 -> -s1 - s2 - s3`. The
//! insertion weight `m` is allowed to be affine in `s1` as well
//! (`m = m0 + m1*s1`), which is what the specialization `m = -s4` and the
//! twist `m -> m + l*s1` need.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::rat::Rat;
use crate::ratfn::RatFn;

/// `s1_coeff * s1 + constant`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm {
    pub s1_coeff: Rat,
    pub constant: Rat,
}

impl LinearForm {
    pub fn new(s1_coeff: Rat, constant: Rat) -> Self {
        LinearForm { s1_coeff, constant }
    }

    pub fn eval(&self, s1: &Rat) -> Rat {
        &(&self.s1_coeff * s1) + &self.constant
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamContext {
    pub s2: Rat,
    pub s3: Rat,
    /// Constant part of `m`.
    pub m: Rat,
    /// Coefficient of `s1` in `m`; zero for an ordinary context.
    #[serde(default = "Rat::zero", skip_serializing_if = "Rat::is_zero")]
    pub m_s1: Rat,
    pub genericity_bound: u32,
}

pub fn default_bound(n_max: usize) -> u32 {
    4 * (n_max as u32 + 1)
}

impl ParamContext {
    pub fn new(s2: Rat, s3: Rat, m: Rat) -> Self {
        ParamContext { s2, s3, m, m_s1: Rat::zero(), genericity_bound: default_bound(8) }
    }

    pub fn with_bound(mut self, bound: u32) -> Self {
        self.genericity_bound = bound;
        self
    }

    /// The same `(s2, s3)` with `m` replaced by `m0 + m1*s1`.
    pub fn with_m_affine(&self, m0: Rat, m1: Rat) -> Self {
        ParamContext { m: m0, m_s1: m1, ..self.clone() }
    }

    pub fn with_m(&self, m: Rat) -> Self {
        self.with_m_affine(m, Rat::zero())
    }

    /// The specialization `m = -s4 = s1 + s2 + s3`.
    pub fn at_m_minus_s4(&self) -> Self {
        self.with_m_affine(&self.s2 + &self.s3, Rat::one())
    }

    /// `m -> m + l*s1`.
    pub fn twisted(&self, l: i64) -> Self {
        self.with_m_affine(self.m.clone(), &self.m_s1 + &Rat::int(l))
    }

    pub fn s1_form(&self) -> LinearForm {
        LinearForm::new(Rat::one(), Rat::zero())
    }

    pub fn s2_form(&self) -> LinearForm {
        LinearForm::new(Rat::zero(), self.s2.clone())
    }

    pub fn s3_form(&self) -> LinearForm {
        LinearForm::new(Rat::zero(), self.s3.clone())
    }

    pub fn s4_form(&self) -> LinearForm {
        LinearForm::new(-Rat::one(), -(&self.s2 + &self.s3))
    }

    pub fn m_form(&self) -> LinearForm {
        LinearForm::new(self.m_s1.clone(), self.m.clone())
    }

    /// Linear form of `c1 s1 + c2 s2 + c3 s3 + c4 s4 + cm m` after the CY
    /// substitution.
    pub fn reduce(&self, c: [i64; 4], cm: i64) -> LinearForm {
        let a = Rat::int(c[0] - c[3]) + &self.m_s1 * &Rat::int(cm);
        let b = &(&(&self.s2 * &Rat::int(c[1] - c[3])) + &(&self.s3 * &Rat::int(c[2] - c[3])))
            + &(&self.m * &Rat::int(cm));
        LinearForm::new(a, b)
    }

    /// Rejects contexts where a bounded integer combination `x*s2 + y*s3`
    /// vanishes. Those are exactly the weights that can lose their `s1`
    /// dependence and turn into spurious `0/0` in an Euler class.
    pub fn check_generic(&self) -> Result<()> {
        let bound = 2 * self.genericity_bound as i64;
        if self.s2.is_zero() {
            return Err(Error::NonGenericContext("1*s2 = 0".into()));
        }
        if self.s3.is_zero() {
            return Err(Error::NonGenericContext("1*s3 = 0".into()));
        }
        // x*s2 + y*s3 = 0 iff s2/s3 = -y/x; compare the reduced ratio.
        let ratio = &self.s2 / &self.s3;
        let (p, q) = (ratio.numer().clone(), ratio.denom().clone());
        let fits = |v: &num_bigint::BigInt| v.magnitude() <= &num_bigint::BigUint::from(bound as u64);
        if fits(&p) && fits(&q) {
            return Err(Error::NonGenericContext(format!("{q}*s2 + {}*s3 = 0", -p)));
        }
        Ok(())
    }

    /// Samples a context with numerators and denominators in `[1, 97]`,
    /// random signs, rejecting non-generic draws.
    pub fn sample<R: Rng>(rng: &mut R, n_max: usize) -> ParamContext {
        let bound = default_bound(n_max);
        loop {
            let ctx = ParamContext {
                s2: sample_rat(rng),
                s3: sample_rat(rng),
                m: sample_rat(rng),
                m_s1: Rat::zero(),
                genericity_bound: bound,
            };
            if ctx.check_generic().is_ok() {
                return ctx;
            }
        }
    }

    pub fn s_values(&self) -> [RatFn; 4] {
        [
            self.value(&self.s1_form()),
            self.value(&self.s2_form()),
            self.value(&self.s3_form()),
            self.value(&self.s4_form()),
        ]
    }
}

pub fn sample_rat<R: Rng>(rng: &mut R) -> Rat {
    let p = rng.gen_range(1..=97i64);
    let q = rng.gen_range(1..=97i64);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    Rat::new(sign * p, q)
}

impl fmt::Display for ParamContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s2={}, s3={}, m={}", self.s2, self.s3, self.m)?;
        if !self.m_s1.is_zero() {
            write!(f, "{:+}*s1", self.m_s1.to_string())?;
        }
        Ok(())
    }
}

/// A context with `s1` also bound to a rational (fully-numeric mode).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericContext {
    pub ctx: ParamContext,
    pub s1: Rat,
}

impl NumericContext {
    pub fn new(ctx: ParamContext, s1: Rat) -> Self {
        NumericContext { ctx, s1 }
    }

    /// `(s1, s2, s3)` as plain values.
    pub fn from_values(s1: Rat, s2: Rat, s3: Rat, m: Rat) -> Self {
        NumericContext { ctx: ParamContext::new(s2, s3, m), s1 }
    }

    pub fn s4(&self) -> Rat {
        -(&(&self.s1 + &self.ctx.s2) + &self.ctx.s3)
    }

    /// Like [`ParamContext::check_generic`], but every bounded combination
    /// `a*s1 + b*s2 + c*s3` must be nonzero.
    pub fn check_generic(&self) -> Result<()> {
        self.ctx.check_generic()?;
        let bound = 2 * self.ctx.genericity_bound as i64;
        if self.s1.is_zero() {
            return Err(Error::NonGenericContext("1*s1 = 0".into()));
        }
        for a in 1..=bound {
            for b in -bound..=bound {
                // c = -(a*s1 + b*s2)/s3 must not be a small integer
                let c = -(&(&(&Rat::int(a) * &self.s1) + &(&Rat::int(b) * &self.ctx.s2)) / &self.ctx.s3);
                if let Some(ci) = c.to_i64() {
                    if ci.abs() <= bound {
                        return Err(Error::NonGenericContext(format!(
                            "{a}*s1 + {b}*s2 + {ci}*s3 = 0"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng>(rng: &mut R, n_max: usize) -> NumericContext {
        loop {
            let ctx = ParamContext::sample(rng, n_max);
            let nc = NumericContext { ctx, s1: sample_rat(rng) };
            if nc.check_generic().is_ok() {
                return nc;
            }
        }
    }
}

/// Turns linear forms into field values; the one seam between the symbolic
/// and fully-numeric engines.
pub trait Evaluator: Sync {
    type Value: Field;

    fn context(&self) -> &ParamContext;

    fn value(&self, form: &LinearForm) -> Self::Value;

    fn vanishes(&self, form: &LinearForm) -> bool;

    /// `constant * prod form_i^{e_i}`; a vanishing form with negative
    /// exponent is a division by zero.
    fn product(&self, constant: Rat, factors: &[(LinearForm, i64)]) -> Result<Self::Value>;

    fn s(&self, i: usize) -> Self::Value {
        let ctx = self.context();
        let f = match i {
            1 => ctx.s1_form(),
            2 => ctx.s2_form(),
            3 => ctx.s3_form(),
            4 => ctx.s4_form(),
            _ => panic!("no equivariant parameter s{i}"),
        };
        self.value(&f)
    }

    fn m(&self) -> Self::Value {
        self.value(&self.context().m_form())
    }
}

impl Evaluator for ParamContext {
    type Value = RatFn;

    fn context(&self) -> &ParamContext {
        self
    }

    fn value(&self, form: &LinearForm) -> RatFn {
        RatFn::poly(crate::poly::UniPoly::linear(form.s1_coeff.clone(), form.constant.clone()))
    }

    fn vanishes(&self, form: &LinearForm) -> bool {
        form.s1_coeff.is_zero() && form.constant.is_zero()
    }

    fn product(&self, constant: Rat, factors: &[(LinearForm, i64)]) -> Result<RatFn> {
        RatFn::from_linear_factors(
            constant,
            factors.iter().map(|(f, e)| (&f.s1_coeff, &f.constant, *e)),
        )
    }
}

impl Evaluator for NumericContext {
    type Value = Rat;

    fn context(&self) -> &ParamContext {
        &self.ctx
    }

    fn value(&self, form: &LinearForm) -> Rat {
        form.eval(&self.s1)
    }

    fn vanishes(&self, form: &LinearForm) -> bool {
        form.eval(&self.s1).is_zero()
    }

    fn product(&self, constant: Rat, factors: &[(LinearForm, i64)]) -> Result<Rat> {
        let mut num = constant;
        let mut den = Rat::one();
        for (f, e) in factors {
            let v = f.eval(&self.s1);
            let p = v.pow(e.unsigned_abs() as i32)?;
            if *e > 0 {
                num = &num * &p;
            } else {
                den = &den * &p;
            }
        }
        num.checked_div(&den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reduction_substitutes_s4() {
        let ctx = ParamContext::new(Rat::int(2), Rat::int(3), Rat::int(5));
        // s4 -> -s1 - 5
        let f = ctx.reduce([0, 0, 0, 1], 0);
        assert_eq!(f, LinearForm::new(Rat::int(-1), Rat::int(-5)));
        // m + s1 + s2
        let g = ctx.reduce([1, 1, 0, 0], 1);
        assert_eq!(g, LinearForm::new(Rat::int(1), Rat::int(7)));
        // m = -s4 specialization makes m + s4 vanish identically
        let special = ctx.at_m_minus_s4();
        assert!(special.vanishes(&special.reduce([0, 0, 0, 1], 1)));
    }

    #[test]
    fn rejects_resonant_contexts() {
        let bad = ParamContext::new(Rat::int(2), Rat::int(3), Rat::one());
        assert!(bad.check_generic().is_err());
        let good = ParamContext::new(Rat::new(89, 7), Rat::new(3, 97), Rat::one()).with_bound(4);
        assert!(good.check_generic().is_ok());
    }

    #[test]
    fn sampling_is_deterministic_and_generic() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let x = ParamContext::sample(&mut a, 4);
            assert_eq!(x, ParamContext::sample(&mut b, 4));
            assert!(x.check_generic().is_ok());
        }
        let nc = NumericContext::sample(&mut a, 3);
        assert!(nc.check_generic().is_ok());
    }
}
