//! Reduced rational functions in `s1` with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{RootSearch, UniPoly};
use crate::rat::Rat;

/// `num / den` with `gcd(num, den) = 1` and `den` monic. Zero is `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRatFn")]
pub struct RatFn {
    num: UniPoly,
    den: UniPoly,
}

#[derive(Deserialize)]
struct RawRatFn {
    num: UniPoly,
    den: UniPoly,
}

impl TryFrom<RawRatFn> for RatFn {
    type Error = Error;
    fn try_from(raw: RawRatFn) -> Result<Self> {
        RatFn::reduce(raw.num, raw.den)
    }
}

impl RatFn {
    /// Canonical reduced representative of `num / den`.
    pub fn reduce(num: UniPoly, den: UniPoly) -> Result<RatFn> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFn::zero());
        }
        let g = UniPoly::gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g)?, den.div_exact(&g)?)
        };
        Ok(RatFn::normalized(num, den))
    }

    /// Makes `den` monic; assumes the pair is already coprime.
    fn normalized(num: UniPoly, den: UniPoly) -> RatFn {
        let lc = den.leading();
        if lc.is_one() {
            return RatFn { num, den };
        }
        let inv = lc.recip().expect("nonzero denominator");
        RatFn { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn zero() -> RatFn {
        RatFn { num: UniPoly::zero(), den: UniPoly::one() }
    }

    pub fn one() -> RatFn {
        RatFn::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> RatFn {
        RatFn { num: UniPoly::constant(c), den: UniPoly::one() }
    }

    pub fn poly(p: UniPoly) -> RatFn {
        RatFn { num: p, den: UniPoly::one() }
    }

    /// The variable `s1`.
    pub fn x() -> RatFn {
        RatFn::poly(UniPoly::x())
    }

    /// `c * prod (a_i s1 + b_i)^{e_i}` built directly in reduced form.
    ///
    /// Factors are keyed by their root; identical roots are merged before
    /// anything is multiplied, so no gcd is needed.
    pub fn from_linear_factors<'a, I>(constant: Rat, factors: I) -> Result<RatFn>
    where
        I: IntoIterator<Item = (&'a Rat, &'a Rat, i64)>,
    {
        let mut c = constant;
        if c.is_zero() {
            return Ok(RatFn::zero());
        }
        // root -> exponent of (s1 - root)
        let mut roots: BTreeMap<Rat, i64> = BTreeMap::new();
        for (a, b, e) in factors {
            if e == 0 {
                continue;
            }
            if a.is_zero() {
                if b.is_zero() {
                    if e > 0 {
                        return Ok(RatFn::zero());
                    }
                    return Err(Error::DivisionByZero);
                }
                c = &c * &b.pow(e as i32)?;
                continue;
            }
            c = &c * &a.pow(e as i32)?;
            let root = -(b / a);
            *roots.entry(root).or_insert(0) += e;
        }
        let mut num = UniPoly::constant(c);
        let mut den = UniPoly::one();
        for (root, e) in roots {
            if e == 0 {
                continue;
            }
            let lin = UniPoly::linear(Rat::one(), -&root);
            if e > 0 {
                num = &num * &lin.pow(e as u32);
            } else {
                den = &den * &lin.pow((-e) as u32);
            }
        }
        Ok(RatFn { num, den })
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn add(&self, rhs: &RatFn) -> RatFn {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFn::reduce(&self.num + &rhs.num, self.den.clone()).expect("nonzero den");
        }
        let g = UniPoly::gcd(&self.den, &rhs.den);
        if g.is_constant() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            if num.is_zero() {
                return RatFn::zero();
            }
            return RatFn::normalized(num, &self.den * &rhs.den);
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        if num.is_zero() {
            return RatFn::zero();
        }
        let h = UniPoly::gcd(&num, &g);
        let (num, g) = if h.is_constant() {
            (num, g)
        } else {
            (num.div_exact(&h).unwrap(), g.div_exact(&h).unwrap())
        };
        RatFn::normalized(num, &(&g * &b1) * &d1)
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, rhs: &RatFn) -> RatFn {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &RatFn) -> RatFn {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero();
        }
        if self.den.is_constant() && rhs.den.is_constant() {
            return RatFn { num: &self.num * &rhs.num, den: UniPoly::one() };
        }
        let g1 = UniPoly::gcd(&self.num, &rhs.den);
        let g2 = UniPoly::gcd(&rhs.num, &self.den);
        let a = self.num.div_exact(&g1).unwrap();
        let d = rhs.den.div_exact(&g1).unwrap();
        let c = rhs.num.div_exact(&g2).unwrap();
        let b = self.den.div_exact(&g2).unwrap();
        RatFn::normalized(&a * &c, &b * &d)
    }

    pub fn recip(&self) -> Result<RatFn> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFn::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &RatFn) -> Result<RatFn> {
        Ok(self.mul(&rhs.recip()?))
    }

    pub fn scale(&self, c: &Rat) -> RatFn {
        if c.is_zero() {
            return RatFn::zero();
        }
        RatFn { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: i32) -> Result<RatFn> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RatFn { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// Value at `s1 = x`; errors when `x` is a pole.
    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(&self.num.eval(x) / &d)
    }

    /// Substitute `s1 -> a*s1 + b` (with `a != 0`).
    pub fn compose_linear(&self, a: &Rat, b: &Rat) -> Result<RatFn> {
        RatFn::reduce(self.num.compose_linear(a, b), self.den.compose_linear(a, b))
    }

    /// Order of the pole at `s1 = 0` (0 when regular).
    pub fn pole_order_at_zero(&self) -> usize {
        if self.is_zero() {
            0
        } else {
            self.den.valuation()
        }
    }

    /// Coefficient of `s1^{-1}` in the Laurent expansion at `s1 = 0`.
    ///
    /// Only simple poles are accepted: a double pole is an error rather than
    /// a silently truncated answer.
    pub fn residue_at_zero(&self) -> Result<Rat> {
        match self.pole_order_at_zero() {
            0 => Ok(Rat::zero()),
            1 => {
                let rest = self.den.shift_down(1);
                Ok(&self.num.coeff(0) / &rest.coeff(0))
            }
            k => Err(Error::HigherOrderPole(k)),
        }
    }

    /// Rational poles of the reduced function.
    pub fn pole_locations(&self) -> RootSearch {
        self.den.rational_roots()
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> UniPoly {
        UniPoly::from_ints(cs)
    }

    #[test]
    fn reduce_examples() {
        // (s1^2 + 2 s1) / s1 -> s1 + 2
        let r = RatFn::reduce(p(&[0, 2, 1]), p(&[0, 1])).unwrap();
        assert_eq!((r.num().clone(), r.den().clone()), (p(&[2, 1]), UniPoly::one()));
        let z = RatFn::reduce(UniPoly::zero(), p(&[1, 1])).unwrap();
        assert_eq!(z, RatFn::zero());
        assert_eq!(z.den(), &UniPoly::one());
        // (2 s1 + 2) / (4 s1 + 4) -> 1/2
        let h = RatFn::reduce(p(&[2, 2]), p(&[4, 4])).unwrap();
        assert_eq!(h, RatFn::constant(Rat::new(1, 2)));
        assert!(matches!(RatFn::reduce(p(&[1]), UniPoly::zero()), Err(Error::DivisionByZero)));
    }

    #[test]
    fn residue_examples() {
        // 1 / (s1 (s1 + 2)) -> 1/2
        let f = RatFn::reduce(UniPoly::one(), p(&[0, 2, 1])).unwrap();
        assert_eq!(f.residue_at_zero().unwrap(), Rat::new(1, 2));
        // (s1 + 5)/(s1 + 1) regular
        let g = RatFn::reduce(p(&[5, 1]), p(&[1, 1])).unwrap();
        assert_eq!(g.residue_at_zero().unwrap(), Rat::zero());
        let h = RatFn::reduce(UniPoly::one(), p(&[0, 0, 1])).unwrap();
        assert!(matches!(h.residue_at_zero(), Err(Error::HigherOrderPole(2))));
    }

    #[test]
    fn poles_examples() {
        let f = RatFn::reduce(UniPoly::one(), &p(&[2, 1]) * &p(&[5, 1])).unwrap();
        assert_eq!(f.pole_locations().roots, vec![Rat::int(-5), Rat::int(-2)]);
        assert!(RatFn::poly(p(&[1, 1])).pole_locations().roots.is_empty());
    }

    #[test]
    fn linear_factor_constructor_matches_reduce() {
        let (a1, b1) = (Rat::int(2), Rat::int(3));
        let (a2, b2) = (Rat::int(-4), Rat::int(-6));
        let (a3, b3) = (Rat::int(1), Rat::new(1, 2));
        let f = RatFn::from_linear_factors(
            Rat::int(5),
            [(&a1, &b1, 2), (&a2, &b2, -1), (&a3, &b3, -1)],
        )
        .unwrap();
        let num = UniPoly::linear(a1, b1).pow(2).scale(&Rat::int(5));
        let den = &UniPoly::linear(a2, b2) * &UniPoly::linear(a3, b3);
        assert_eq!(f, RatFn::reduce(num, den).unwrap());
    }

    #[test]
    fn json_shape() {
        let f = RatFn::reduce(p(&[1]), p(&[2, 1])).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"num":["1"],"den":["2","1"]}"#);
        let back: RatFn = serde_json::from_str(r#"{"num":["2","2"],"den":["4","4"]}"#).unwrap();
        assert_eq!(back, RatFn::constant(Rat::new(1, 2)));
    }
}
