//! Truncated power series in `q` over an exact field.
//!
//! A series carries its truncation order `N`: coefficients of `q^0..q^N`
//! are known exactly and everything beyond is unknown. Binary operations
//! require equal orders.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::rat::Rat;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Field")]
pub struct QSeries<F: Field> {
    order: usize,
    coeffs: Vec<F>,
}

impl<F: Field> QSeries<F> {
    /// Pads with zeros or truncates to exactly `order + 1` coefficients.
    pub fn new(order: usize, mut coeffs: Vec<F>) -> Self {
        coeffs.resize(order + 1, F::zero());
        QSeries { order, coeffs }
    }

    pub fn zero(order: usize) -> Self {
        QSeries::new(order, Vec::new())
    }

    pub fn one(order: usize) -> Self {
        QSeries::new(order, vec![F::one()])
    }

    pub fn constant(order: usize, c: F) -> Self {
        QSeries::new(order, vec![c])
    }

    /// `c * q`.
    pub fn monomial(order: usize, power: usize, c: F) -> Self {
        let mut s = QSeries::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &F {
        &self.coeffs[n]
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order {
            return Err(Error::OrderMismatch(self.order, order));
        }
        Ok(QSeries::new(order, self.coeffs[..=order].to_vec()))
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let c = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.plus(b)).collect();
        Ok(QSeries { order: self.order, coeffs: c })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QSeries { order: self.order, coeffs: self.coeffs.iter().map(F::negate).collect() }
    }

    pub fn scale(&self, c: &F) -> Self {
        QSeries { order: self.order, coeffs: self.coeffs.iter().map(|a| a.times(c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order;
        let mut out = vec![F::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].plus(&a.times(b));
                }
            }
        }
        Ok(QSeries { order: n, coeffs: out })
    }

    /// Logarithm of a series with constant term 1, via
    /// `L_n = a_n - (1/n) sum_{k<n} k L_k a_{n-k}`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::LogNonUnital);
        }
        let n = self.order;
        let mut l = vec![F::zero(); n + 1];
        for i in 1..=n {
            let mut acc = F::zero();
            for (k, lk) in l.iter().enumerate().take(i).skip(1) {
                acc = acc.plus(&lk.times(&self.coeffs[i - k]).scale(&Rat::int(k as i64)));
            }
            l[i] = self.coeffs[i].minus(&acc.scale(&Rat::new(1, i as i64)));
        }
        Ok(QSeries { order: n, coeffs: l })
    }

    /// Exponential of a series with zero constant term, via
    /// `n g_n = sum_{k=1}^n k F_k g_{n-k}`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::ExpNonNilpotent);
        }
        let n = self.order;
        let mut g = vec![F::zero(); n + 1];
        g[0] = F::one();
        for i in 1..=n {
            let mut acc = F::zero();
            for k in 1..=i {
                if !self.coeffs[k].is_zero() {
                    acc = acc.plus(&self.coeffs[k].times(&g[i - k]).scale(&Rat::int(k as i64)));
                }
            }
            g[i] = acc.scale(&Rat::new(1, i as i64));
        }
        Ok(QSeries { order: n, coeffs: g })
    }

    /// `self^e = exp(e log self)` for a series with constant term 1.
    pub fn pow(&self, e: &F) -> Result<Self> {
        self.log()?.scale(e).exp()
    }

    /// Substitutes `q -> -q`.
    pub fn alternate(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| if i % 2 == 1 { a.negate() } else { a.clone() })
            .collect();
        QSeries { order: self.order, coeffs: c }
    }

    /// Applies `f` to every coefficient.
    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> QSeries<G> {
        QSeries { order: self.order, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn try_map<G: Field>(&self, f: impl Fn(&F) -> Result<G>) -> Result<QSeries<G>> {
        let coeffs = self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(QSeries { order: self.order, coeffs })
    }

    /// Index of the first coefficient where `self` and `other` differ.
    pub fn first_mismatch(&self, other: &Self) -> Option<usize> {
        (0..=self.order.min(other.order)).find(|&i| self.coeffs[i] != other.coeffs[i])
    }
}

impl QSeries<Rat> {
    pub fn lift<F: Field>(&self) -> QSeries<F> {
        self.map(|c| F::from_rat(c.clone()))
    }
}

impl<F: Field> fmt::Display for QSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*q")?,
                _ => write!(f, "({c})*q^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order + 1)
    }
}

impl<F: Field> fmt::Debug for QSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// MacMahon's function `M(q) = prod_{k>=1} (1 - q^k)^{-k}` to order `n`.
pub fn macmahon(n: usize) -> QSeries<Rat> {
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[0] = Rat::one();
    for k in 1..=n {
        // multiply by (1 - q^k)^{-1} exactly k times
        for _ in 0..k {
            for i in k..=n {
                let add = coeffs[i - k].clone();
                coeffs[i] = &coeffs[i] + &add;
            }
        }
    }
    QSeries::new(n, coeffs)
}

/// `log M(-q)`; its `q^n` coefficient is `(-1)^n sigma_2(n) / n`.
pub fn log_macmahon_minus(n: usize) -> QSeries<Rat> {
    macmahon(n).alternate().log().expect("M(-q) has constant term 1")
}

/// `M(-q)^E = exp(E log M(-q))` with `E` in the field.
pub fn macmahon_power<F: Field>(e: &F, n: usize) -> QSeries<F> {
    log_macmahon_minus(n).lift::<F>().scale(e).exp().expect("log has no constant term")
}

/// Checks `lhs == a * b` coefficientwise to order `n`.
pub fn convolve_check<F: Field>(lhs: &QSeries<F>, a: &QSeries<F>, b: &QSeries<F>, n: usize) -> Result<bool> {
    let lhs = lhs.truncate(n)?;
    let prod = a.truncate(n)?.mul(&b.truncate(n)?)?;
    Ok(lhs == prod)
}

/// `sigma_2(n) = sum of squares of divisors`.
pub fn sigma2(n: u64) -> u64 {
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| d * d).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::UniPoly;
    use crate::ratfn::RatFn;

    fn ints(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::int(x)).collect()
    }

    #[test]
    fn macmahon_coefficients() {
        assert_eq!(macmahon(6).coeffs(), &ints(&[1, 1, 3, 6, 13, 24, 48])[..]);
        assert_eq!(macmahon(3).alternate().coeffs(), &ints(&[1, -1, 3, -6])[..]);
    }

    #[test]
    fn log_macmahon_is_sigma2_over_n() {
        let l = macmahon(8).log().unwrap();
        for n in 1..=8u64 {
            assert_eq!(l.coeff(n as usize), &Rat::new(sigma2(n) as i64, n as i64));
        }
        let lm = log_macmahon_minus(4);
        let expected = [Rat::zero(), Rat::int(-1), Rat::new(5, 2), Rat::new(-10, 3), Rat::new(21, 4)];
        assert_eq!(lm.coeffs(), &expected[..]);
    }

    #[test]
    fn exp_log_roundtrip() {
        let s = QSeries::new(5, ints(&[1, 2, -3, 7, 0, 11]));
        assert_eq!(s.log().unwrap().exp().unwrap(), s);
        let t = QSeries::new(5, ints(&[0, 1, 1, -2, 5, 3]));
        assert_eq!(t.exp().unwrap().log().unwrap(), t);
    }

    #[test]
    fn errors() {
        let a = QSeries::<Rat>::one(3);
        let b = QSeries::<Rat>::one(4);
        assert!(matches!(a.mul(&b), Err(Error::OrderMismatch(3, 4))));
        assert!(matches!(QSeries::new(2, ints(&[2, 1])).log(), Err(Error::LogNonUnital)));
        assert!(matches!(QSeries::new(2, ints(&[1, 1])).exp(), Err(Error::ExpNonNilpotent)));
    }

    #[test]
    fn integer_macmahon_power_matches_product() {
        let m = macmahon(5).alternate();
        let p = macmahon_power(&Rat::int(3), 5);
        assert_eq!(p, m.mul(&m).unwrap().mul(&m).unwrap());
        let inv = macmahon_power(&Rat::int(-1), 5);
        assert_eq!(inv.mul(&m).unwrap(), QSeries::one(5));
    }

    #[test]
    fn symbolic_power() {
        let e = RatFn::x();
        let p = macmahon_power(&e, 2);
        // M(-q)^x = 1 - x q + (x^2/2 + 5x/2) q^2
        assert_eq!(p.coeff(1), &RatFn::poly(UniPoly::linear(Rat::int(-1), Rat::zero())));
        let c2 = RatFn::poly(UniPoly::new(vec![Rat::zero(), Rat::new(5, 2), Rat::new(1, 2)]));
        assert_eq!(p.coeff(2), &c2);
    }

    #[test]
    fn json_shape() {
        let s = QSeries::new(2, ints(&[1, -1, 3]));
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"order":2,"coeffs":["1","-1","3"]}"#);
        let back: QSeries<Rat> = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn convolve() {
        let a = QSeries::new(3, ints(&[1, 1]));
        let b = QSeries::new(3, ints(&[1, -1]));
        let c = QSeries::new(3, ints(&[1, 0, -1]));
        assert!(convolve_check(&c, &a, &b, 3).unwrap());
        assert!(!convolve_check(&a, &a, &b, 3).unwrap());
    }
}
