//! Closed-form MacMahon-power right-hand sides: `C^4`, the wall series
//! `W_inf`, the relative pair, twisted line bundles and local curves.

use serde::{Deserialize, Serialize};

use crate::context::{Evaluator, ParamContext};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::qseries::{macmahon_power, QSeries};
use crate::rat::Rat;
use crate::ratfn::RatFn;

fn inv_sum<E: Evaluator + ?Sized>(ev: &E, idx: &[usize]) -> Result<E::Value> {
    let mut acc = E::Value::zero();
    for &i in idx {
        acc = acc.plus(&E::Value::one().divide(&ev.s(i))?);
    }
    Ok(acc)
}

/// `E = -m e3(s)/(s1 s2 s3 s4) = -m (1/s1 + 1/s2 + 1/s3 + 1/s4)`.
pub fn ck_exponent<E: Evaluator + ?Sized>(ev: &E) -> Result<E::Value> {
    Ok(ev.m().times(&inv_sum(ev, &[1, 2, 3, 4])?).negate())
}

/// `M(-q)^E` with `E` the `C^4` exponent.
pub fn ck_closed_form<E: Evaluator + ?Sized>(n: usize, ev: &E) -> Result<QSeries<E::Value>> {
    Ok(macmahon_power(&ck_exponent(ev)?, n))
}

/// `-(s1+s2)(s1+s3)(s2+s3) / (s1 s2 s3 (s1+s2+s3))`.
pub fn no_insertion_exponent<E: Evaluator + ?Sized>(ev: &E) -> Result<E::Value> {
    let (s1, s2, s3) = (ev.s(1), ev.s(2), ev.s(3));
    let x = s1.plus(&s2).times(&s1.plus(&s3)).times(&s2.plus(&s3));
    let d = s1.times(&s2).times(&s3).times(&s1.plus(&s2).plus(&s3));
    Ok(x.divide(&d)?.negate())
}

/// `exp(a q)` with `a` the no-insertion exponent.
pub fn no_insertion_closed<E: Evaluator + ?Sized>(n: usize, ev: &E) -> Result<QSeries<E::Value>> {
    QSeries::monomial(n, 1, no_insertion_exponent(ev)?).exp()
}

/// `m / s1`.
pub fn w_infinity_exponent<E: Evaluator + ?Sized>(ev: &E) -> Result<E::Value> {
    ev.m().divide(&ev.s(1))
}

/// `W_inf = M(-q)^{m/s1}`.
pub fn w_infinity<E: Evaluator + ?Sized>(n: usize, ev: &E) -> Result<QSeries<E::Value>> {
    Ok(macmahon_power(&w_infinity_exponent(ev)?, n))
}

/// `-m (s2 s3 + s3 s4 + s2 s4)/(s2 s3 s4) = -m (1/s2 + 1/s3 + 1/s4)`.
pub fn rel_exponent<E: Evaluator + ?Sized>(ev: &E) -> Result<E::Value> {
    Ok(ev.m().times(&inv_sum(ev, &[2, 3, 4])?).negate())
}

/// The relative series `Z(X, D_inf)`.
pub fn z_rel_closed<E: Evaluator + ?Sized>(n: usize, ev: &E) -> Result<QSeries<E::Value>> {
    Ok(macmahon_power(&rel_exponent(ev)?, n))
}

/// Twisted relative series as `Z(X, D_inf) * M(-q)^l`.
pub fn z_rel_twisted_product<E: Evaluator + ?Sized>(
    l: i64,
    n: usize,
    ev: &E,
) -> Result<QSeries<E::Value>> {
    z_rel_closed(n, ev)?.mul(&macmahon_power(&E::Value::from_int(l), n))
}

/// Twisted relative series as `Z(C^4) * W_inf|_{m -> m + l s1}`.
pub fn z_rel_twisted_substitution(l: i64, n: usize, ctx: &ParamContext) -> Result<QSeries<RatFn>> {
    ck_closed_form(n, ctx)?.mul(&w_infinity(n, &ctx.twisted(l))?)
}

/// `F_inf,0 = -res_{s1=0} log Z`, coefficientwise.
pub fn f_inf0_residue(z: &QSeries<RatFn>) -> Result<QSeries<Rat>> {
    z.log()?.try_map(|c| Ok(-c.residue_at_zero()?))
}

/// `exp(F0 / s1)`, which should reproduce `W_inf` when `F0 = F_inf,0`.
pub fn w_from_f_inf0(f0: &QSeries<Rat>) -> Result<QSeries<RatFn>> {
    let inv_s1 = RatFn::one().checked_div(&RatFn::x())?;
    f0.lift::<RatFn>().scale(&inv_s1).exp()
}

/// Topological data `(g; l1, l2, l3; l)` of `Tot_C(L1 + L2 + L3)` with a
/// tautological line bundle of degree `l`; `r` fibers form the divisor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCurveData {
    pub g: i64,
    pub l1: i64,
    pub l2: i64,
    pub l3: i64,
    pub l: i64,
    pub r: i64,
}

impl LocalCurveData {
    pub fn new(g: i64, l1: i64, l2: i64, l3: i64, l: i64) -> Result<Self> {
        if g < 0 {
            return Err(Error::InvalidTopologicalData(format!("negative genus {g}")));
        }
        let r = l1 + l2 + l3 - (2 * g - 2);
        if r < 0 {
            return Err(Error::InvalidTopologicalData(format!(
                "(g; l1, l2, l3) = ({g}; {l1}, {l2}, {l3}) gives r = {r} < 0"
            )));
        }
        Ok(LocalCurveData { g, l1, l2, l3, l, r })
    }

    /// Coefficient `2 - 2g - r` of the `m` term.
    pub fn euler_char(&self) -> i64 {
        2 - 2 * self.g - self.r
    }
}

/// A splitting of the data across the two components of a degeneration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingDatum {
    pub left: LocalCurveData,
    pub right: LocalCurveData,
}

impl SplittingDatum {
    /// Splits `whole` with `left = (g-, l1-, l2-, l3-, l-)`; the right side
    /// takes the remainder.
    pub fn from_left(whole: &LocalCurveData, left: [i64; 5]) -> Result<Self> {
        let [g, l1, l2, l3, l] = left;
        let left = LocalCurveData::new(g, l1, l2, l3, l)?;
        let right = LocalCurveData::new(
            whole.g - g,
            whole.l1 - l1,
            whole.l2 - l2,
            whole.l3 - l3,
            whole.l - l,
        )?;
        Ok(SplittingDatum { left, right })
    }

    pub fn is_splitting_of(&self, whole: &LocalCurveData) -> bool {
        let (a, b) = (&self.left, &self.right);
        a.g + b.g == whole.g
            && a.l1 + b.l1 == whole.l1
            && a.l2 + b.l2 == whole.l2
            && a.l3 + b.l3 == whole.l3
            && a.l + b.l == whole.l
    }
}

/// `E = l - m (1/s2 + 1/s3 + 1/s4)(2 - 2g - r)`.
pub fn local_curve_exponent<E: Evaluator + ?Sized>(
    data: &LocalCurveData,
    ev: &E,
) -> Result<E::Value> {
    let m_term = ev.m().times(&inv_sum(ev, &[2, 3, 4])?).scale(&Rat::int(data.euler_char()));
    Ok(E::Value::from_int(data.l).minus(&m_term))
}

pub fn local_curve_series<E: Evaluator + ?Sized>(
    data: &LocalCurveData,
    n: usize,
    ev: &E,
) -> Result<QSeries<E::Value>> {
    Ok(macmahon_power(&local_curve_exponent(data, ev)?, n))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingOutcome {
    pub additive: bool,
    pub multiplicative: bool,
}

impl GluingOutcome {
    pub fn holds(&self) -> bool {
        self.additive && self.multiplicative
    }
}

/// Exponent additivity and series multiplicativity to order `n`.
pub fn gluing_check<E: Evaluator + ?Sized>(
    whole: &LocalCurveData,
    split: &SplittingDatum,
    ev: &E,
    n: usize,
) -> Result<GluingOutcome> {
    if !split.is_splitting_of(whole) {
        return Err(Error::InvalidTopologicalData(format!("{split:?} does not split {whole:?}")));
    }
    let e = local_curve_exponent(whole, ev)?;
    let el = local_curve_exponent(&split.left, ev)?;
    let er = local_curve_exponent(&split.right, ev)?;
    let additive = e == el.plus(&er);
    let multiplicative = crate::qseries::convolve_check(
        &macmahon_power(&e, n),
        &macmahon_power(&el, n),
        &macmahon_power(&er, n),
        n,
    )?;
    Ok(GluingOutcome { additive, multiplicative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::log_macmahon_minus;

    fn ctx() -> ParamContext {
        ParamContext::new(Rat::new(5, 3), Rat::new(-7, 2), Rat::new(3, 4))
    }

    #[test]
    fn ck_exponent_factorization() {
        let c = ctx();
        let [s1, s2, s3, s4] = c.s_values();
        let x = s1.plus(&s2).times(&s1.plus(&s3)).times(&s2.plus(&s3));
        let expected =
            c.m().times(&x).divide(&s1.times(&s2).times(&s3).times(&s4)).unwrap();
        assert_eq!(ck_exponent(&c).unwrap(), expected);
        assert!(ck_exponent(&c.with_m(Rat::zero())).unwrap().is_zero());
        // res_{s1=0} E = -m
        assert_eq!(ck_exponent(&c).unwrap().residue_at_zero().unwrap(), -c.m.clone());
        assert_eq!(ck_exponent(&c).unwrap().neg().residue_at_zero().unwrap(), c.m.clone());
    }

    #[test]
    fn first_coefficients() {
        let c = ctx();
        let z = ck_closed_form(2, &c).unwrap();
        assert_eq!(z.coeff(1), &ck_exponent(&c).unwrap().neg());
        let w = w_infinity(1, &c).unwrap();
        let expected = RatFn::constant(-c.m.clone()).checked_div(&RatFn::x()).unwrap();
        assert_eq!(w.coeff(1), &expected);
        assert_eq!(ck_closed_form(3, &c.with_m(Rat::zero())).unwrap(), QSeries::one(3));
    }

    #[test]
    fn relative_is_product() {
        let c = ctx();
        let lhs = z_rel_closed(4, &c).unwrap();
        let rhs = ck_closed_form(4, &c).unwrap().mul(&w_infinity(4, &c).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn residue_series() {
        let c = ctx();
        let f = f_inf0_residue(&ck_closed_form(4, &c).unwrap()).unwrap();
        assert_eq!(f, log_macmahon_minus(4).scale(&c.m));
        assert_eq!(f_inf0_residue(&QSeries::one(3)).unwrap(), QSeries::zero(3));
        assert_eq!(w_from_f_inf0(&f).unwrap(), w_infinity(4, &c).unwrap());
    }

    #[test]
    fn twisted_routes_agree() {
        let c = ctx();
        for l in -2..=3 {
            let a = z_rel_twisted_product(l, 3, &c).unwrap();
            let b = z_rel_twisted_substitution(l, 3, &c).unwrap();
            assert_eq!(a, b, "l = {l}");
        }
        assert_eq!(z_rel_twisted_product(0, 3, &c).unwrap(), z_rel_closed(3, &c).unwrap());
    }

    #[test]
    fn local_curve_examples() {
        let c = ctx();
        let d = LocalCurveData::new(0, -1, 0, 0, 0).unwrap();
        assert_eq!(d.r, 1);
        assert_eq!(local_curve_exponent(&d, &c).unwrap(), rel_exponent(&c).unwrap());
        let trivial = LocalCurveData::new(0, 0, 0, 0, 0).unwrap();
        assert_eq!(trivial.r, 2);
        assert!(local_curve_exponent(&trivial, &c).unwrap().is_zero());
        let e = LocalCurveData::new(1, 0, 0, 0, 5).unwrap();
        assert_eq!(local_curve_exponent(&e, &c).unwrap(), RatFn::constant(Rat::int(5)));
        assert!(LocalCurveData::new(0, -3, 0, 0, 0).is_err());
        assert!(LocalCurveData::new(-1, 0, 0, 0, 0).is_err());
    }

    #[test]
    fn gluing_example() {
        let c = ctx();
        let whole = LocalCurveData::new(0, -1, -1, 0, 0).unwrap();
        let split = SplittingDatum::from_left(&whole, [0, -1, 0, 0, 0]).unwrap();
        assert_eq!(split.right, LocalCurveData::new(0, 0, -1, 0, 0).unwrap());
        assert!(gluing_check(&whole, &split, &c, 4).unwrap().holds());
        let bad = SplittingDatum { left: whole, right: whole };
        assert!(gluing_check(&whole, &bad, &c, 2).is_err());
    }

    #[test]
    fn rel_exponent_regular_at_zero() {
        let e = rel_exponent(&ctx()).unwrap();
        assert_eq!(e.pole_order_at_zero(), 0);
        assert!(e.den().eval(&Rat::zero()) != Rat::zero());
    }
}
