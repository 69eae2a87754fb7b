//! Elements of K = GF(q)((p)) as finite Laurent windows.
//!
//! A [`KNumber`] is an exact finite Laurent polynomial in the prime element;
//! there are no carries in positive characteristic, so addition is digitwise
//! and every operation here is exact.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finite_field::{FieldSpec, Scalar};

/// A valuation or digit count that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// The value capped at `max` (infinity becomes `max`).
    pub fn truncate(&self, max: i64) -> i64 {
        match *self {
            Valuation::Finite(v) => v.min(max),
            Valuation::Infinite => max,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An element `sum_l c_l p^l` of K with finitely many nonzero digits.
///
/// Digits are stored as digit indices into [`FieldSpec::digit_set`]. The
/// window is kept canonical: the lowest and highest stored digits are nonzero,
/// and zero is the empty window at `lo = 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct KNumber {
    lo: i64,
    digits: Vec<u32>,
    field: Arc<FieldSpec>,
}

impl KNumber {
    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        Self {
            lo: 0,
            digits: Vec::new(),
            field: field.clone(),
        }
    }

    pub fn one(field: &Arc<FieldSpec>) -> Self {
        Self::monomial(field, 1, 0)
    }

    /// The prime element, the single digit 1 at power 1.
    pub fn prime_element(field: &Arc<FieldSpec>) -> Self {
        Self::monomial(field, 1, 1)
    }

    /// The digit with index `digit` placed at `power`.
    pub fn monomial(field: &Arc<FieldSpec>, digit: u32, power: i64) -> Self {
        Self::from_digits(field, power, vec![digit])
    }

    /// Digits for powers `lo, lo+1, ...` given as digit indices.
    pub fn from_digits(field: &Arc<FieldSpec>, lo: i64, digits: Vec<u32>) -> Self {
        assert!(
            digits.iter().all(|&d| d < field.q()),
            "digit index outside GF({})",
            field.q()
        );
        let mut x = Self {
            lo,
            digits,
            field: field.clone(),
        };
        x.canonicalize();
        x
    }

    /// Digits given as field elements.
    pub fn from_scalars(field: &Arc<FieldSpec>, lo: i64, digits: &[Scalar]) -> Result<Self> {
        let idx = digits
            .iter()
            .map(|s| field.index_of(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_digits(field, lo, idx))
    }

    fn canonicalize(&mut self) {
        while self.digits.last() == Some(&0) {
            self.digits.pop();
        }
        let lead = self.digits.iter().take_while(|&&d| d == 0).count();
        if lead == self.digits.len() {
            self.digits.clear();
            self.lo = 0;
        } else if lead > 0 {
            self.digits.drain(..lead);
            self.lo += lead as i64;
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Lowest stored power (the valuation, unless zero).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// One past the highest stored power.
    pub fn hi(&self) -> i64 {
        self.lo + self.digits.len() as i64
    }

    /// Digit index at `power`.
    pub fn digit_idx(&self, power: i64) -> u32 {
        if power < self.lo || power >= self.hi() {
            0
        } else {
            self.digits[(power - self.lo) as usize]
        }
    }

    pub fn digit(&self, power: i64) -> Scalar {
        self.field.scalar(self.digit_idx(power))
    }

    fn same_field(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field,
            "KNumbers over different fields"
        );
    }

    /// Digitwise sum over the union window.
    pub fn add(&self, other: &Self) -> Self {
        self.same_field(other);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let digits = (lo..hi)
            .map(|e| self.field.add_idx(self.digit_idx(e), other.digit_idx(e)))
            .collect();
        Self::from_digits(&self.field, lo, digits)
    }

    pub fn neg(&self) -> Self {
        let digits = self.digits.iter().map(|&d| self.field.neg_idx(d)).collect();
        Self::from_digits(&self.field, self.lo, digits)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Cauchy product of the digit sequences.
    pub fn mul(&self, other: &Self) -> Self {
        self.same_field(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        let mut digits = vec![0u32; self.digits.len() + other.digits.len() - 1];
        for (i, &a) in self.digits.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.digits.iter().enumerate() {
                digits[i + j] = f.add_idx(digits[i + j], f.mul_idx(a, b));
            }
        }
        Self::from_digits(f, self.lo + other.lo, digits)
    }

    /// Multiplication by `p^j`.
    pub fn p_shift(&self, j: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            lo: self.lo + j,
            digits: self.digits.clone(),
            field: self.field.clone(),
        }
    }

    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            Valuation::Infinite
        } else {
            Valuation::Finite(self.lo)
        }
    }

    /// `|x| = q^{-v(x)}`, and `|0| = 0`.
    pub fn norm(&self) -> f64 {
        match self.valuation() {
            Valuation::Infinite => 0.0,
            Valuation::Finite(v) => (self.field.q() as f64).powi(-(v as i32)),
        }
    }

    /// Valuation and norm together.
    pub fn k_norm(&self) -> (Valuation, f64) {
        (self.valuation(), self.norm())
    }

    /// The `n` with `u(n) = self`, when `self` is a lattice point.
    ///
    /// Lattice points are exactly the elements whose nonzero digits all sit at
    /// negative powers.
    pub fn lattice_index(&self) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        if self.hi() > 0 {
            return None;
        }
        let q = self.field.q() as u64;
        let mut n: u64 = 0;
        for power in self.lo..0 {
            // digit at power -(t+1) is the base-q digit t of n
            let t = (-power - 1) as u32;
            let d = self.digit_idx(power) as u64;
            if d == 0 {
                continue;
            }
            let place = q.checked_pow(t)?;
            n = n.checked_add(d.checked_mul(place)?)?;
        }
        Some(n)
    }
}

impl fmt::Debug for KNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KNumber({self})")
    }
}

impl fmt::Display for KNumber {
    /// Terms from the lowest power up, e.g. `1p^-2 + 1p^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &d) in self.digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let s = self.field.scalar(d).to_string();
            let power = self.lo + i as i64;
            if s.contains('+') {
                write!(f, "({s})p^{power}")?;
            } else {
                write!(f, "{s}p^{power}")?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &KNumber {
    type Output = KNumber;
    fn add(self, rhs: &KNumber) -> KNumber {
        KNumber::add(self, rhs)
    }
}

impl std::ops::Sub for &KNumber {
    type Output = KNumber;
    fn sub(self, rhs: &KNumber) -> KNumber {
        KNumber::sub(self, rhs)
    }
}

impl std::ops::Mul for &KNumber {
    type Output = KNumber;
    fn mul(self, rhs: &KNumber) -> KNumber {
        KNumber::mul(self, rhs)
    }
}

/// The coset representative `u(n)`.
///
/// For `n = b0 + b1 q + ... + bs q^s` the digit `b_t` sits at power `-(t+1)`,
/// which is `u(b0) + u(b1) p^{-1} + ... + u(bs) p^{-s}` with
/// `u(b) = a_b p^{-1}` for `b < q`.
pub fn u_of_n(field: &Arc<FieldSpec>, n: u64) -> KNumber {
    if n == 0 {
        return KNumber::zero(field);
    }
    let q = field.q() as u64;
    let mut base_q = Vec::new();
    let mut rest = n;
    while rest > 0 {
        base_q.push((rest % q) as u32);
        rest /= q;
    }
    let s = base_q.len() as i64;
    // powers -s..-1 ascending: digit at -(t+1) is base_q[t]
    let digits = (0..s).map(|i| base_q[(s - 1 - i) as usize]).collect();
    KNumber::from_digits(field, -s, digits)
}

/// `u(n)` restricted to the window of `max_digits` negative powers.
pub fn u_of_n_within(field: &Arc<FieldSpec>, n: u64, max_digits: u32) -> Result<KNumber> {
    let q = field.q() as u64;
    match q.checked_pow(max_digits) {
        Some(limit) if n >= limit => Err(Error::Range(format!(
            "u({n}) needs more than {max_digits} digits over GF({q})"
        ))),
        _ => Ok(u_of_n(field, n)),
    }
}

/// Index of `u(a) + u(b)`: base-q digitwise addition in GF(q).
pub fn lattice_add(field: &FieldSpec, a: u64, b: u64) -> u64 {
    let q = field.q() as u64;
    let (mut a, mut b, mut out, mut place) = (a, b, 0u64, 1u64);
    while a > 0 || b > 0 {
        out += field.add_idx((a % q) as u32, (b % q) as u32) as u64 * place;
        a /= q;
        b /= q;
        place = place.saturating_mul(q);
    }
    out
}

/// Index of `u(a) - u(b)`.
pub fn lattice_sub(field: &FieldSpec, a: u64, b: u64) -> u64 {
    let q = field.q() as u64;
    let (mut a, mut b, mut out, mut place) = (a, b, 0u64, 1u64);
    while a > 0 || b > 0 {
        out += field.sub_idx((a % q) as u32, (b % q) as u32) as u64 * place;
        a /= q;
        b /= q;
        place = place.saturating_mul(q);
    }
    out
}

/// Number of trailing zero base-q digits of `k`; infinite for `k = 0`.
///
/// Equivalently the largest `j` with `p^j u(k)` still a lattice point.
pub fn kappa(q: u32, k: u64) -> Valuation {
    if k == 0 {
        return Valuation::Infinite;
    }
    let q = q as u64;
    let mut j = 0;
    let mut rest = k;
    while rest.is_multiple_of(q) {
        rest /= q;
        j += 1;
    }
    Valuation::Finite(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<FieldSpec> {
        Arc::new(FieldSpec::prime(2).unwrap())
    }

    #[test]
    fn addition_examples() {
        let f = f2();
        let x = KNumber::from_digits(&f, -1, vec![1, 1]);
        assert_eq!(&x + &KNumber::zero(&f), x);
        let pinv = KNumber::monomial(&f, 1, -1);
        assert!((&pinv + &pinv).is_zero());
        assert_eq!(&x + &pinv, KNumber::one(&f));
    }

    #[test]
    fn multiplication_examples() {
        let f = f2();
        let p = KNumber::prime_element(&f);
        assert_eq!(&p * &KNumber::monomial(&f, 1, -1), KNumber::one(&f));
        let one_p = KNumber::from_digits(&f, 0, vec![1, 1]);
        assert_eq!(&one_p * &one_p, KNumber::from_digits(&f, 0, vec![1, 0, 1]));
        assert!((&one_p * &KNumber::zero(&f)).is_zero());
    }

    #[test]
    fn norm_examples() {
        let f = f2();
        assert_eq!(KNumber::zero(&f).k_norm(), (Valuation::Infinite, 0.0));
        assert_eq!(KNumber::prime_element(&f).k_norm(), (Valuation::Finite(1), 0.5));
        let x = KNumber::from_digits(&f, -2, vec![1, 1]);
        assert_eq!(x.k_norm(), (Valuation::Finite(-2), 4.0));
        let f3 = Arc::new(FieldSpec::prime(3).unwrap());
        assert_eq!(KNumber::prime_element(&f3).norm(), 1.0 / 3.0);
    }

    #[test]
    fn shift_examples() {
        let f = f2();
        let one = KNumber::one(&f);
        assert_eq!(one.p_shift(3), KNumber::monomial(&f, 1, 3));
        let x = KNumber::from_digits(&f, -2, vec![1, 0, 1]);
        assert_eq!(x.p_shift(0), x);
        for q in [2, 3, 5] {
            let fq = Arc::new(FieldSpec::prime(q).unwrap());
            assert_eq!(u_of_n(&fq, 1).p_shift(1), KNumber::one(&fq));
        }
    }

    #[test]
    fn u_examples() {
        let f = f2();
        assert!(u_of_n(&f, 0).is_zero());
        assert_eq!(u_of_n(&f, 1), KNumber::monomial(&f, 1, -1));
        assert_eq!(u_of_n(&f, 3), KNumber::from_digits(&f, -2, vec![1, 1]));
        assert_eq!(u_of_n(&f, 6), KNumber::from_digits(&f, -3, vec![1, 1, 0]));
        assert!(u_of_n_within(&f, 8, 3).is_err());
        assert!(u_of_n_within(&f, 7, 3).is_ok());
    }

    #[test]
    fn u_over_gf4_uses_digit_order() {
        let f = Arc::new(FieldSpec::new(2, 2, Some(&[1, 1, 1])).unwrap());
        for n in 0..4u64 {
            let u = u_of_n(&f, n);
            assert_eq!(u.digit_idx(-1), n as u32);
        }
        // 6 = 2 + 1*4: digit a_2 = x at p^-1, a_1 = 1 at p^-2
        let u6 = u_of_n(&f, 6);
        assert_eq!(u6.digit(-1).to_string(), "x");
        assert_eq!(u6.digit(-2).to_string(), "1");
    }

    #[test]
    fn kappa_examples() {
        assert!(kappa(2, 0).is_infinite());
        assert_eq!(kappa(2, 6), Valuation::Finite(1));
        assert_eq!(kappa(2, 4), Valuation::Finite(2));
        assert_eq!(kappa(3, 9), Valuation::Finite(2));
        assert_eq!(kappa(3, 10), Valuation::Finite(0));
        assert_eq!(Valuation::Infinite.truncate(3), 3);
    }

    #[test]
    fn lattice_index_roundtrip() {
        for q in [2u32, 3, 5] {
            let f = Arc::new(FieldSpec::prime(q).unwrap());
            for n in 0..200u64 {
                assert_eq!(u_of_n(&f, n).lattice_index(), Some(n));
            }
            assert_eq!(KNumber::one(&f).lattice_index(), None);
        }
    }

    #[test]
    fn lattice_index_arithmetic() {
        for q in [2u32, 3] {
            let f = Arc::new(FieldSpec::prime(q).unwrap());
            for a in 0..40u64 {
                for b in 0..40u64 {
                    let sum = u_of_n(&f, a).add(&u_of_n(&f, b));
                    assert_eq!(sum.lattice_index(), Some(lattice_add(&f, a, b)));
                    let diff = u_of_n(&f, a).sub(&u_of_n(&f, b));
                    assert_eq!(diff.lattice_index(), Some(lattice_sub(&f, a, b)));
                }
            }
        }
    }

    #[test]
    fn display() {
        let f = f2();
        assert_eq!(u_of_n(&f, 3).to_string(), "1p^-2 + 1p^-1");
        assert_eq!(KNumber::zero(&f).to_string(), "0");
    }
}
