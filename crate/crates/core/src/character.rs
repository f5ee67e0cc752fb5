//! Torus characters: finite sums of weights with integer multiplicities.
//!
//! A weight is the multiplicative monomial `t1^c1 t2^c2 t3^c3 t4^c4 e^(cm m)`
//! with additive alias `c1 s1 + c2 s2 + c3 s3 + c4 s4 + cm m`. Weights are
//! stored modulo the CY relation `t1 t2 t3 t4 = 1`, which is a purely
//! integer operation, so characters stay independent of any parameter
//! context. The substitution `s4 = -s1 - s2 - s3` into actual values happens
//! only when an Euler class is evaluated.

use std::collections::BTreeMap;
use std::fmt;

use crate::context::{Evaluator, LinearForm};
use crate::error::{Error, Result};
use crate::partitions::{PlanePartition, SolidPartition};
use crate::rat::Rat;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    cm: i64,
    c: [i64; 4],
}

impl Weight {
    /// Canonical representative of the CY class: shift by a multiple of
    /// `(1,1,1,1)` so the lower median of the four exponents is zero. This
    /// keeps `t4` displayed as `s4` rather than `-s1-s2-s3`.
    pub fn new(c: [i64; 4], cm: i64) -> Self {
        let mut sorted = c;
        sorted.sort_unstable();
        let k = sorted[1];
        Weight { cm, c: [c[0] - k, c[1] - k, c[2] - k, c[3] - k] }
    }

    pub fn zero() -> Self {
        Weight::new([0; 4], 0)
    }

    /// `s_i` for `i` in 1..=4.
    pub fn s(i: usize) -> Self {
        let mut c = [0; 4];
        c[i - 1] = 1;
        Weight::new(c, 0)
    }

    pub fn m() -> Self {
        Weight::new([0; 4], 1)
    }

    pub fn coeffs(&self) -> [i64; 4] {
        self.c
    }

    pub fn m_coeff(&self) -> i64 {
        self.cm
    }

    pub fn is_zero(&self) -> bool {
        *self == Weight::zero()
    }

    /// Product of monomials (sum of additive forms).
    pub fn plus(&self, other: &Weight) -> Weight {
        let c = std::array::from_fn(|i| self.c[i] + other.c[i]);
        Weight::new(c, self.cm + other.cm)
    }

    /// Dual weight (inverse monomial).
    pub fn dual(&self) -> Weight {
        Weight::new(self.c.map(|x| -x), -self.cm)
    }

    /// Integer coordinates after eliminating `s4`: coefficients of
    /// `(s1, s2, s3, m)`.
    pub fn reduced(&self) -> [i64; 4] {
        [self.c[0] - self.c[3], self.c[1] - self.c[3], self.c[2] - self.c[3], self.cm]
    }

    /// Orientation used by the canonical square root: the first nonzero
    /// reduced coordinate in the order `s1, s2, s3, m` is positive.
    pub fn is_positive(&self) -> bool {
        self.reduced().iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
    }

    pub fn linear_form<E: Evaluator + ?Sized>(&self, ev: &E) -> LinearForm {
        ev.context().reduce(self.c, self.cm)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}*m + {}*s1 + {}*s2 + {}*s3 + {}*s4",
            self.cm, self.c[0], self.c[1], self.c[2], self.c[3]
        )
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Finite map weight -> nonzero multiplicity.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Character {
    terms: BTreeMap<Weight, i64>,
}

impl Character {
    pub fn zero() -> Self {
        Character::default()
    }

    pub fn from_weights<I: IntoIterator<Item = Weight>>(ws: I) -> Self {
        let mut ch = Character::zero();
        for w in ws {
            ch.add_term(w, 1);
        }
        ch
    }

    pub fn from_terms<I: IntoIterator<Item = (Weight, i64)>>(ts: I) -> Self {
        let mut ch = Character::zero();
        for (w, k) in ts {
            ch.add_term(w, k);
        }
        ch
    }

    pub fn add_term(&mut self, w: Weight, k: i64) {
        if k == 0 {
            return;
        }
        let e = self.terms.entry(w).or_insert(0);
        *e += k;
        if *e == 0 {
            self.terms.remove(&w);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Weight, &i64)> {
        self.terms.iter()
    }

    pub fn multiplicity(&self, w: &Weight) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn zero_multiplicity(&self) -> i64 {
        self.multiplicity(&Weight::zero())
    }

    pub fn rank(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, other: &Character) -> Character {
        let mut out = self.clone();
        for (w, k) in &other.terms {
            out.add_term(*w, *k);
        }
        out
    }

    pub fn minus(&self, other: &Character) -> Character {
        self.plus(&other.negate())
    }

    pub fn negate(&self) -> Character {
        Character { terms: self.terms.iter().map(|(w, k)| (*w, -k)).collect() }
    }

    pub fn times(&self, other: &Character) -> Character {
        let mut out = Character::zero();
        for (w1, k1) in &self.terms {
            for (w2, k2) in &other.terms {
                out.add_term(w1.plus(w2), k1 * k2);
            }
        }
        out
    }

    /// Multiply by a single monomial.
    pub fn shift(&self, w: &Weight) -> Character {
        Character::from_terms(self.terms.iter().map(|(v, k)| (v.plus(w), *k)))
    }

    /// Dual character: every weight inverted.
    pub fn bar(&self) -> Character {
        Character::from_terms(self.terms.iter().map(|(w, k)| (w.dual(), *k)))
    }

    pub fn is_self_dual(&self) -> bool {
        self.bar() == *self
    }

    /// One line per weight, `"c_m*m + c1*s1 + ... : mult"`, canonical order.
    pub fn dump(&self) -> String {
        self.terms.iter().map(|(w, k)| format!("{w} : {k}\n")).collect()
    }
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(w, k)| (w.to_string(), k))).finish()
    }
}

/// `(1 - t_i)` products over the listed directions.
fn one_minus_product(dirs: &[usize]) -> Character {
    dirs.iter().fold(Character::from_weights([Weight::zero()]), |acc, &i| {
        acc.times(&Character::from_terms([(Weight::zero(), 1), (Weight::s(i), -1)]))
    })
}

fn box_weight4(b: [u32; 4]) -> Weight {
    Weight::new(b.map(i64::from), 0)
}

/// `Q_pi = sum over boxes of t1^(i-1) t2^(j-1) t3^(k-1) t4^(l-1)`.
pub fn q_char(pi: &SolidPartition) -> Character {
    Character::from_weights(pi.boxes().map(box_weight4))
}

/// `Q_lambda` for a plane partition, in `t1, t2, t3`.
pub fn q_char_3d(lambda: &PlanePartition) -> Character {
    Character::from_weights(lambda.boxes().map(|[i, j, k]| box_weight4([i, j, k, 0])))
}

/// Weights `m + (i-1)s1 + (j-1)s2 + (k-1)s3 + (l-1)s4` of the tautological
/// fiber `H^0(O_Z) (x) e^m`, in box order.
pub fn insertion_weights(pi: &SolidPartition) -> Vec<Weight> {
    pi.boxes().map(|b| box_weight4(b).plus(&Weight::m())).collect()
}

/// Virtual tangent character `Q + Qbar - Q Qbar P` with
/// `P = (1-t1)(1-t2)(1-t3)(1-t4)`, under `t1 t2 t3 t4 = 1`.
///
/// Aborts with `SelfDualZeroWeight` when the zero weight survives; also
/// checks self-duality and rank `2n`.
pub fn tvir_4d(pi: &SolidPartition) -> Result<Character> {
    let q = q_char(pi);
    let qbar = q.bar();
    let t = q.plus(&qbar).minus(&q.times(&qbar).times(&one_minus_product(&[1, 2, 3, 4])));
    let z = t.zero_multiplicity();
    if z != 0 {
        return Err(Error::SelfDualZeroWeight(z));
    }
    if !t.is_self_dual() {
        return Err(Error::NotSelfDual(format!("T^vir of {pi}")));
    }
    debug_assert_eq!(t.rank(), 2 * pi.size() as i64);
    Ok(t)
}

/// Reference half of `T^vir`: `Q - Pbar_123 Q Qbar`, where
/// `Pbar_123 = (1-t1^-1)(1-t2^-1)(1-t3^-1)`. Its sum with its dual is
/// `T^vir` because `P_1234 = P_123 + Pbar_123` under the CY relation.
pub fn reference_half(pi: &SolidPartition) -> Character {
    let q = q_char(pi);
    let pbar = one_minus_product(&[1, 2, 3]).bar();
    q.minus(&pbar.times(&q).times(&q.bar()))
}

/// Three-fold vertex `V = Q - Qbar/(t1 t2 t3) + Q Qbar (1-t1)(1-t2)(1-t3)/(t1 t2 t3)`.
pub fn vertex_3d(lambda: &PlanePartition) -> Result<Character> {
    let q = q_char_3d(lambda);
    let qbar = q.bar();
    let inv123 = Weight::new([-1, -1, -1, 0], 0);
    let v = q
        .minus(&qbar.shift(&inv123))
        .plus(&q.times(&qbar).times(&one_minus_product(&[1, 2, 3])).shift(&inv123));
    let z = v.zero_multiplicity();
    if z != 0 {
        return Err(Error::SelfDualZeroWeight(z));
    }
    debug_assert_eq!(v.rank(), 0);
    Ok(v)
}

/// Canonical square root: from each dual pair keep the positively oriented
/// weight (see [`Weight::is_positive`]) with the pair's full multiplicity.
pub fn square_root(t: &Character) -> Result<Character> {
    let z = t.zero_multiplicity();
    if z != 0 {
        return Err(Error::NotSelfDual(format!("zero weight with multiplicity {z}")));
    }
    if !t.is_self_dual() {
        return Err(Error::NotSelfDual("character differs from its dual".into()));
    }
    Ok(Character::from_terms(t.terms().filter(|(w, _)| w.is_positive()).map(|(w, k)| (*w, *k))))
}

/// Parity of the number of weights (with multiplicity) on which the
/// canonical half `canonical` and another half `other` of the same
/// self-dual character pick opposite members of a dual pair. The Euler
/// classes then differ by `(-1)^parity`.
pub fn half_discrepancy(canonical: &Character, other: &Character) -> i64 {
    let flips: i64 = other.terms().filter(|(w, _)| !w.is_positive()).map(|(_, k)| *k).sum();
    debug_assert!(canonical.terms().all(|(w, _)| w.is_positive()));
    flips.rem_euclid(2)
}

/// Equivariant Euler class `prod_w w^{mult(w)}` with the CY substitution.
pub fn euler<E: Evaluator + ?Sized>(x: &Character, ev: &E) -> Result<E::Value> {
    let mut factors = Vec::with_capacity(x.len());
    let mut zero_numerator = false;
    for (w, &k) in x.terms() {
        let form = w.linear_form(ev);
        if ev.vanishes(&form) {
            if k < 0 {
                return Err(Error::ZeroWeight(w.to_string()));
            }
            zero_numerator = true;
        }
        factors.push((form, k));
    }
    if zero_numerator {
        return Ok(<E::Value as crate::field::Field>::zero());
    }
    ev.product(Rat::one(), &factors)
}

/// Euler class of a plain list of weights (each with multiplicity one).
pub fn euler_of_weights<E: Evaluator + ?Sized>(ws: &[Weight], ev: &E) -> Result<E::Value> {
    let mut factors = Vec::with_capacity(ws.len());
    for w in ws {
        let form = w.linear_form(ev);
        if ev.vanishes(&form) {
            return Ok(<E::Value as crate::field::Field>::zero());
        }
        factors.push((form, 1));
    }
    ev.product(Rat::one(), &factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::ParamContext;
    use crate::field::Field;
    use crate::partitions::{enumerate_plane, enumerate_solid};
    use crate::poly::UniPoly;
    use crate::ratfn::RatFn;

    fn solid(h: Vec<Vec<Vec<u32>>>) -> SolidPartition {
        SolidPartition::from_heights(h).unwrap()
    }

    #[test]
    fn cy_normalization() {
        // t1 t2 t3 = t4^{-1}
        assert_eq!(Weight::new([1, 1, 1, 0], 0), Weight::s(4).dual());
        assert_eq!(Weight::new([1, 1, 0, 0], 0), Weight::new([0, 0, -1, -1], 0));
        assert!(Weight::s(1).is_positive());
        assert!(!Weight::s(4).is_positive());
        assert!(Weight::s(4).dual().is_positive());
    }

    #[test]
    fn q_char_examples() {
        let single = solid(vec![vec![vec![1]]]);
        assert_eq!(q_char(&single), Character::from_weights([Weight::zero()]));
        let tall = solid(vec![vec![vec![2]]]);
        assert_eq!(q_char(&tall), Character::from_weights([Weight::zero(), Weight::s(4)]));
        let along_i = solid(vec![vec![vec![1]], vec![vec![1]]]);
        assert_eq!(q_char(&along_i), Character::from_weights([Weight::zero(), Weight::s(1)]));
        assert_eq!(q_char(&along_i).rank(), 2);
    }

    #[test]
    fn tvir_single_box() {
        let t = tvir_4d(&solid(vec![vec![vec![1]]])).unwrap();
        let mut expected = Character::zero();
        for i in 1..=4 {
            expected.add_term(Weight::s(i), 1);
            expected.add_term(Weight::s(i).dual(), 1);
        }
        for i in 1..=4 {
            for j in i + 1..=4 {
                expected.add_term(Weight::s(i).plus(&Weight::s(j)), -1);
            }
        }
        assert_eq!(t, expected);
        assert_eq!(t.rank(), 2);
    }

    #[test]
    fn tvir_is_self_dual_up_to_four() {
        for n in 0..=4 {
            for pi in enumerate_solid(n) {
                let t = tvir_4d(&pi).unwrap();
                assert!(t.is_self_dual());
                assert_eq!(t.rank(), 2 * n as i64);
                assert_eq!(t.zero_multiplicity(), 0);
                let v = reference_half(&pi);
                assert_eq!(v.plus(&v.bar()), t, "reference half of {pi}");
            }
        }
    }

    #[test]
    fn vertex_3d_single_box() {
        let lam = PlanePartition::from_rows(vec![vec![1]]).unwrap();
        let v = vertex_3d(&lam).unwrap();
        let mut expected = Character::zero();
        for i in 1..=3 {
            expected.add_term(Weight::s(i).dual(), 1);
            for j in i + 1..=3 {
                expected.add_term(Weight::s(i).plus(&Weight::s(j)).dual(), -1);
            }
        }
        assert_eq!(v, expected);
        for n in 0..=4 {
            for lam in enumerate_plane(n) {
                assert_eq!(vertex_3d(&lam).unwrap().rank(), 0);
            }
        }
    }

    #[test]
    fn vertex_3d_single_box_euler() {
        let ctx = ParamContext::new(Rat::new(7, 3), Rat::new(-11, 5), Rat::one());
        let lam = PlanePartition::from_rows(vec![vec![1]]).unwrap();
        let e = euler(&vertex_3d(&lam).unwrap().negate(), &ctx).unwrap();
        let [s1, s2, s3, _] = ctx.s_values();
        let expected = s1
            .plus(&s2)
            .times(&s1.plus(&s3))
            .times(&s2.plus(&s3))
            .divide(&s1.times(&s2).times(&s3))
            .unwrap();
        assert_eq!(e, expected);
    }

    #[test]
    fn square_root_examples() {
        let t = Character::from_weights([Weight::s(1), Weight::s(1).dual()]);
        let v = square_root(&t).unwrap();
        assert_eq!(v, Character::from_weights([Weight::s(1)]));
        assert!(square_root(&Character::from_weights([Weight::s(1)])).is_err());
        for n in 0..=4 {
            for pi in enumerate_solid(n) {
                let t = tvir_4d(&pi).unwrap();
                let v = square_root(&t).unwrap();
                assert_eq!(v.plus(&v.bar()), t);
                assert_eq!(v.rank(), n as i64);
            }
        }
    }

    #[test]
    fn square_root_single_box_euler_magnitude() {
        let ctx = ParamContext::new(Rat::new(7, 3), Rat::new(-11, 5), Rat::one());
        let t = tvir_4d(&solid(vec![vec![vec![1]]])).unwrap();
        let e = euler(&square_root(&t).unwrap(), &ctx).unwrap();
        let [s1, s2, s3, s4] = ctx.s_values();
        let mag = s1
            .times(&s2)
            .times(&s3)
            .times(&s4)
            .divide(&s1.plus(&s2).times(&s1.plus(&s3)).times(&s2.plus(&s3)))
            .unwrap();
        assert!(e == mag || e == mag.negate());
    }

    #[test]
    fn euler_examples() {
        let ctx = ParamContext::new(Rat::int(2), Rat::new(3, 7), Rat::int(5));
        let m = Character::from_weights([Weight::m()]);
        assert_eq!(euler(&m, &ctx).unwrap(), RatFn::constant(Rat::int(5)));
        let x = Character::from_terms([(Weight::s(1), 1), (Weight::s(2), -1)]);
        let expected = RatFn::poly(UniPoly::linear(Rat::new(1, 2), Rat::zero()));
        assert_eq!(euler(&x, &ctx).unwrap(), expected);
        let with_zero = Character::from_terms([(Weight::zero(), 1), (Weight::s(3), -2)]);
        assert!(euler(&with_zero, &ctx).unwrap().is_zero());
        let bad = Character::from_terms([(Weight::zero(), -1)]);
        assert!(matches!(euler(&bad, &ctx), Err(Error::ZeroWeight(_))));
    }

    #[test]
    fn dump_format() {
        let ch = Character::from_terms([(Weight::s(4), 1), (Weight::m(), -2)]);
        let d = ch.dump();
        assert!(d.contains("0*m + 0*s1 + 0*s2 + 0*s3 + 1*s4 : 1"));
        assert!(d.contains("1*m + 0*s1 + 0*s2 + 0*s3 + 0*s4 : -2"));
    }
}
