//! The coefficient fields a series may live over.

use std::fmt::{Debug, Display};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::Result;
use crate::rat::Rat;
use crate::ratfn::RatFn;

/// Exact field operations shared by `Rat` (numeric mode) and `RatFn`
/// (`s1` kept symbolic).
pub trait Field:
    Clone + PartialEq + Debug + Display + Send + Sync + Serialize + DeserializeOwned + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rat(r: Rat) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;
    fn divide(&self, rhs: &Self) -> Result<Self>;
    fn scale(&self, c: &Rat) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_rat(Rat::int(v))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Field for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
    fn one() -> Self {
        Rat::one()
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negate(&self) -> Self {
        -self
    }
    fn divide(&self, rhs: &Self) -> Result<Self> {
        self.checked_div(rhs)
    }
    fn scale(&self, c: &Rat) -> Self {
        self * c
    }
}

impl Field for RatFn {
    fn zero() -> Self {
        RatFn::zero()
    }
    fn one() -> Self {
        RatFn::one()
    }
    fn from_rat(r: Rat) -> Self {
        RatFn::constant(r)
    }
    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn divide(&self, rhs: &Self) -> Result<Self> {
        self.checked_div(rhs)
    }
    fn scale(&self, c: &Rat) -> Self {
        RatFn::scale(self, c)
    }
}
