//! Dense univariate polynomials in `s1` over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Coefficients in ascending powers of `s1`; trailing zeros are always stripped,
/// so the zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "Vec<Rat>", from = "Vec<Rat>")]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl From<Vec<Rat>> for UniPoly {
    fn from(coeffs: Vec<Rat>) -> Self {
        UniPoly::new(coeffs)
    }
}

impl From<UniPoly> for Vec<Rat> {
    fn from(p: UniPoly) -> Self {
        p.coeffs
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        UniPoly::new(vec![c])
    }

    /// The variable `s1`.
    pub fn x() -> Self {
        UniPoly::new(vec![Rat::zero(), Rat::one()])
    }

    /// `a*s1 + b`.
    pub fn linear(a: Rat, b: Rat) -> Self {
        UniPoly::new(vec![b, a])
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        UniPoly::new(cs.iter().map(|&c| Rat::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(Rat::is_one)
    }

    pub fn scale(&self, c: &Rat) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let inv = self.leading().recip().expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| &(&acc * x) + c)
    }

    /// Number of times `s1` divides the polynomial (0 for the zero polynomial).
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divide by `s1^k`; the caller guarantees divisibility.
    pub fn shift_down(&self, k: usize) -> UniPoly {
        debug_assert!(k <= self.valuation() || self.is_zero());
        UniPoly::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn shift_up(&self, k: usize) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        UniPoly { coeffs }
    }

    pub fn pow(&self, e: u32) -> UniPoly {
        let mut acc = UniPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute `s1 -> a*s1 + b`.
    pub fn compose_linear(&self, a: &Rat, b: &Rat) -> UniPoly {
        let lin = UniPoly::linear(a.clone(), b.clone());
        self.coeffs
            .iter()
            .rev()
            .fold(UniPoly::zero(), |acc, c| &(&acc * &lin) + &UniPoly::constant(c.clone()))
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Rat::int(i as i64))
                .collect(),
        )
    }

    pub fn div_rem(&self, d: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = d.leading().recip()?;
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return Ok((UniPoly::zero(), UniPoly::zero()));
        };
        if nd < dd {
            return Ok((UniPoly::zero(), self.clone()));
        }
        let mut quot = vec![Rat::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let c = &rem[i + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] = &rem[i + j] - &(&c * dc);
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((UniPoly::new(quot), UniPoly::new(rem)))
    }

    /// Exact division; errors if `d` does not divide `self`.
    pub fn div_exact(&self, d: &UniPoly) -> Result<UniPoly> {
        let (q, r) = self.div_rem(d)?;
        debug_assert!(r.is_zero(), "inexact polynomial division");
        Ok(q)
    }

    /// Clear denominators and remove content: returns the primitive integer
    /// polynomial with positive leading coefficient, together with the
    /// rational factor `c` such that `self = c * primitive`.
    pub fn primitive_int(&self) -> (Vec<BigInt>, Rat) {
        if self.is_zero() {
            return (Vec::new(), Rat::zero());
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let mut content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().unwrap().is_negative() {
            content = -content;
        }
        let prim = ints.iter().map(|c| c / &content).collect();
        let factor = Rat::from_bigints(content, lcm).expect("nonzero lcm");
        (prim, factor)
    }

    fn from_int_coeffs(cs: &[BigInt]) -> UniPoly {
        UniPoly::new(cs.iter().cloned().map(Rat::from).collect())
    }

    /// Monic gcd over Q (zero only when both inputs are zero).
    ///
    /// Runs a primitive pseudo-remainder sequence over Z, which keeps
    /// coefficient growth in check compared to naive Euclid over Q.
    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return UniPoly::one();
        }
        let (mut f, _) = a.primitive_int();
        let (mut g, _) = b.primitive_int();
        if f.len() < g.len() {
            std::mem::swap(&mut f, &mut g);
        }
        while !g.is_empty() {
            let r = pseudo_rem(&f, &g);
            f = g;
            g = primitive(r);
        }
        UniPoly::from_int_coeffs(&f).monic()
    }

    /// Squarefree part (monic).
    pub fn squarefree(&self) -> UniPoly {
        if self.is_constant() {
            return UniPoly::one();
        }
        let g = UniPoly::gcd(self, &self.derivative());
        self.div_exact(&g).expect("gcd divides").monic()
    }

    /// All distinct rational roots, plus whether a factor without rational
    /// roots remains after deflation.
    ///
    /// Candidates follow the rational-root theorem: `p/q` with `p` dividing
    /// the trailing and `q` the leading coefficient of the primitive integer
    /// form, restricted to the Cauchy bound. Integers are factored by trial
    /// division; an unfactored cofactor above the trial bound is treated as
    /// prime and flagged through `complete`.
    pub fn rational_roots(&self) -> RootSearch {
        let mut out = RootSearch { roots: Vec::new(), nonrational_factor: false, complete: true };
        if self.is_constant() {
            return out;
        }
        let mut p = self.squarefree();
        if p.valuation() > 0 {
            out.roots.push(Rat::zero());
            p = p.shift_down(1);
        }
        while let Some(deg) = p.degree() {
            if deg == 0 {
                break;
            }
            if deg == 1 {
                out.roots.push(-(&p.coeff(0) / &p.coeff(1)));
                p = UniPoly::one();
                break;
            }
            let (ints, _) = p.primitive_int();
            let lead = ints.last().unwrap().abs();
            let trail = ints[0].abs();
            let (dl, cl) = divisors(&lead);
            let (dt, ct) = divisors(&trail);
            out.complete &= cl && ct;
            let bound = cauchy_bound(&ints);
            let mut found = None;
            'search: for q in &dl {
                for pn in &dt {
                    for sign in [1i32, -1] {
                        let num = if sign > 0 { pn.clone() } else { -pn.clone() };
                        if Rat::from_bigints(num.abs(), q.clone()).unwrap() > bound {
                            continue;
                        }
                        if int_root_test(&ints, &num, q) {
                            found = Some(Rat::from_bigints(num, q.clone()).unwrap());
                            break 'search;
                        }
                    }
                }
            }
            match found {
                Some(r) => {
                    let lin = UniPoly::linear(Rat::one(), -&r);
                    p = p.div_exact(&lin).expect("root divides");
                    out.roots.push(r);
                }
                None => break,
            }
        }
        out.nonrational_factor = p.degree().is_some_and(|d| d > 0);
        out.roots.sort();
        out
    }
}

/// Outcome of [`UniPoly::rational_roots`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSearch {
    pub roots: Vec<Rat>,
    pub nonrational_factor: bool,
    pub complete: bool,
}

fn primitive(mut cs: Vec<BigInt>) -> Vec<BigInt> {
    while cs.last().is_some_and(|c| c.is_zero()) {
        cs.pop();
    }
    if cs.is_empty() {
        return cs;
    }
    let content = cs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_one() {
        return cs;
    }
    cs.iter().map(|c| c / &content).collect()
}

/// Pseudo-remainder of `f` by `g` over Z: `lc(g)^k * f mod g`.
fn pseudo_rem(f: &[BigInt], g: &[BigInt]) -> Vec<BigInt> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    let lg = &g[dg];
    while r.len() >= g.len() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - g.len();
        for c in r.iter_mut() {
            *c *= lg;
        }
        for (j, gc) in g.iter().enumerate() {
            r[shift + j] -= &lr * gc;
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        r = primitive(r);
    }
    r
}

fn int_root_test(ints: &[BigInt], p: &BigInt, q: &BigInt) -> bool {
    // sum a_i p^i q^(n-i) == 0
    let n = ints.len() - 1;
    let mut acc = BigInt::zero();
    let mut qpow = BigInt::one();
    let mut terms = vec![BigInt::zero(); n + 1];
    for i in (0..=n).rev() {
        terms[i] = qpow.clone();
        qpow *= q;
    }
    let mut ppow = BigInt::one();
    for (i, a) in ints.iter().enumerate() {
        acc += a * &ppow * &terms[i];
        ppow *= p;
    }
    acc.is_zero()
}

fn cauchy_bound(ints: &[BigInt]) -> Rat {
    let lead = ints.last().unwrap().abs();
    let max = ints[..ints.len() - 1].iter().map(|c| c.abs()).max().unwrap_or_default();
    &Rat::one() + &Rat::from_bigints(max, lead).unwrap()
}

const TRIAL_BOUND: u64 = 1 << 20;

/// Positive divisors of `n` (n > 0), ascending. The flag is false when a
/// cofactor above the trial-division bound was assumed prime.
fn divisors(n: &BigInt) -> (Vec<BigInt>, bool) {
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.clone();
    let mut complete = true;
    let mut d: u64 = 2;
    while d < TRIAL_BOUND {
        let bd = BigInt::from(d);
        if &bd * &bd > m {
            break;
        }
        let mut e = 0;
        while (&m % &bd).is_zero() {
            m /= &bd;
            e += 1;
        }
        if e > 0 {
            factors.push((bd, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > BigInt::one() {
        if m.to_u64().is_none_or(|v| v >= TRIAL_BOUND * TRIAL_BOUND) {
            complete = false;
        }
        factors.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for dv in &divs {
            let mut pw = dv.clone();
            next.push(pw.clone());
            for _ in 0..e {
                pw *= &p;
                next.push(pw.clone());
            }
        }
        divs = next;
    }
    divs.sort();
    (divs, complete)
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UniPoly::new(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = if c.is_negative() { (true, c.abs()) } else { (false, c.clone()) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                if mag.is_integer() || i == 0 {
                    write!(f, "{mag}")?;
                } else {
                    write!(f, "({mag})")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "{}s1", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}s1^{i}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UniPoly {
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
    fn strips_trailing_zeros() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[]).degree(), None);
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = p(&[3, -2, 0, 5, 1]);
        let d = p(&[1, 0, 2]);
        let (q, r) = a.div_rem(&d).unwrap();
        assert_eq!(&(&q * &d) + &r, a);
        assert!(r.degree().unwrap() < 2);
        assert!(matches!(a.div_rem(&UniPoly::zero()), Err(Error::DivisionByZero)));
    }

    #[test]
    fn gcd_of_products() {
        // (x+1)(x-2) and (x+1)(x+3)
        let a = &p(&[1, 1]) * &p(&[-2, 1]);
        let b = &p(&[1, 1]) * &p(&[3, 1]);
        assert_eq!(UniPoly::gcd(&a, &b), p(&[1, 1]));
        assert_eq!(UniPoly::gcd(&a, &p(&[5])), UniPoly::one());
        assert_eq!(UniPoly::gcd(&UniPoly::zero(), &a.scale(&Rat::int(3))), a);
    }

    #[test]
    fn rational_roots_found() {
        // (2x - 3)(x + 5)^2 (x^2 + 1)
        let f = &(&p(&[-3, 2]) * &p(&[5, 1]).pow(2)) * &p(&[1, 0, 1]);
        let rs = f.rational_roots();
        assert_eq!(rs.roots, vec![Rat::int(-5), Rat::new(3, 2)]);
        assert!(rs.nonrational_factor);
        assert!(rs.complete);
        assert!(p(&[1, 1]).shift_up(2).rational_roots().roots.contains(&Rat::zero()));
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p(&[2, 0, -1]).to_string(), "-s1^2 + 2");
        assert_eq!(UniPoly::new(vec![Rat::new(1, 2), Rat::int(3)]).to_string(), "3*s1 + 1/2");
    }
}
