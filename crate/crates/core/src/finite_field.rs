//! Arithmetic in GF(q), q = p^c, the residue field of the local field and the
//! digit alphabet of its Laurent expansions.
//!
//! Elements are written in the monomial basis 1, x, ..., x^{c-1} of
//! Z/p[x]/(modulus). Every element also has a *digit index*
//! `a0 + a1 p + ... + a_{c-1} p^{c-1}`; the digit set is enumerated in that
//! order, so index 0 is zero and index 1 is one.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 4;
/// Largest supported field order; keeps the q x q tables small.
pub const MAX_ORDER: u32 = 256;

/// An element of GF(q) given by its coordinates over Z/p.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scalar {
    coeffs: [u16; MAX_DEGREE],
    degree: u8,
}

impl Scalar {
    /// Builds an element from its coordinates (constant term first).
    ///
    /// Coordinates are not reduced; membership in a given field is checked
    /// by [`FieldSpec::contains`] and by every arithmetic operation.
    pub fn from_coeffs(coeffs: &[u16]) -> Self {
        assert!(
            !coeffs.is_empty() && coeffs.len() <= MAX_DEGREE,
            "a scalar has between 1 and {MAX_DEGREE} coordinates"
        );
        let mut c = [0u16; MAX_DEGREE];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Self {
            coeffs: c,
            degree: coeffs.len() as u8,
        }
    }

    pub fn coeffs(&self) -> &[u16] {
        &self.coeffs[..self.degree as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs().iter().all(|&a| a == 0)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar{:?}", self.coeffs())
    }
}

impl fmt::Display for Scalar {
    /// Polynomial notation in the basis element `x`, e.g. `x+1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &a) in self.coeffs().iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            let t = match (i, a) {
                (0, a) => a.to_string(),
                (1, 1) => "x".to_string(),
                (1, a) => format!("{a}x"),
                (i, 1) => format!("x^{i}"),
                (i, a) => format!("{a}x^{i}"),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

/// The finite field GF(p^c) together with precomputed operation tables.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    c: u32,
    q: u32,
    modulus: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
    trace0: Vec<u32>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.c == other.c && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("c", &self.c)
            .field("modulus", &self.modulus)
            .finish()
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `num` modulo the monic polynomial `den` over Z/p.
/// Coefficients are stored constant term first.
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - dd;
            for (i, &d) in den[..dd].iter().enumerate() {
                let sub = (lead * d) % p;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
    }
    r
}

/// Exhaustive search for a monic factor of degree 1..=deg/2.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut rest = code;
            for _ in 0..d {
                cand.push(rest % p);
                rest /= p;
            }
            cand.push(1);
            if poly_rem(modulus, &cand, p).iter().all(|&a| a == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// GF(p^c) presented as Z/p[x]/(modulus).
    ///
    /// `modulus` lists the coefficients of a degree-c polynomial, constant
    /// term first; it is made monic and must be irreducible. It is ignored
    /// when c = 1.
    pub fn new(p: u32, c: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("field characteristic {p} is not prime")));
        }
        if c == 0 || c as usize > MAX_DEGREE {
            return Err(Error::Range(format!(
                "extension degree {c} outside 1..={MAX_DEGREE}"
            )));
        }
        let q = p
            .checked_pow(c)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| Error::Range(format!("field order {p}^{c} exceeds {MAX_ORDER}")))?;
        let modulus = if c == 1 {
            vec![0, 1]
        } else {
            let m = modulus.ok_or_else(|| {
                Error::Usage(format!("GF({p}^{c}) needs a degree-{c} modulus"))
            })?;
            if m.len() != c as usize + 1 {
                return Err(Error::Domain(format!(
                    "modulus has degree {}, expected {c}",
                    m.len() as i64 - 1
                )));
            }
            let lead = m[c as usize] % p;
            if lead == 0 {
                return Err(Error::Domain("modulus has zero leading coefficient".into()));
            }
            let lead_inv = (1..p).find(|&x| (x * lead) % p == 1).unwrap();
            let monic: Vec<u32> = m.iter().map(|&a| (a % p) * lead_inv % p).collect();
            if !is_irreducible(&monic, p) {
                return Err(Error::Domain(format!(
                    "modulus {monic:?} is reducible over GF({p})"
                )));
            }
            monic
        };
        let mut field = Self {
            p,
            c,
            q,
            modulus,
            mul: Vec::new(),
            inv: Vec::new(),
            trace0: Vec::new(),
        };
        field.build_tables();
        Ok(field)
    }

    /// GF(p^c) with the lexicographically first monic irreducible modulus.
    pub fn with_default_modulus(p: u32, c: u32) -> Result<Self> {
        if c <= 1 {
            return Self::new(p, 1, None);
        }
        if !is_prime(p) {
            return Err(Error::Domain(format!("field characteristic {p} is not prime")));
        }
        let count = p.checked_pow(c).unwrap_or(u32::MAX);
        for code in 0..count {
            let mut m = Vec::with_capacity(c as usize + 1);
            let mut rest = code;
            for _ in 0..c {
                m.push(rest % p);
                rest /= p;
            }
            m.push(1);
            if is_irreducible(&m, p) {
                return Self::new(p, c, Some(&m));
            }
        }
        Err(Error::Domain(format!("no irreducible polynomial of degree {c} over GF({p})")))
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut mul = vec![0u32; q * q];
        let mut trace0 = vec![0u32; q * q];
        for a in 0..q {
            for b in 0..q {
                let prod = self.poly_mul(a as u32, b as u32);
                mul[a * q + b] = prod;
                trace0[a * q + b] = prod % self.p;
            }
        }
        let mut inv = vec![0u32; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u32;
        }
        self.mul = mul;
        self.inv = inv;
        self.trace0 = trace0;
    }

    fn poly_mul(&self, a: u32, b: u32) -> u32 {
        let (p, c) = (self.p, self.c as usize);
        let ca = self.coords(a);
        let cb = self.coords(b);
        let mut prod = vec![0u32; 2 * c - 1];
        for i in 0..c {
            for j in 0..c {
                prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p;
            }
        }
        let r = if c == 1 {
            prod
        } else {
            poly_rem(&prod, &self.modulus, p)
        };
        r.iter().rev().fold(0, |acc, &a| acc * p + a)
    }

    fn coords(&self, idx: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.c as usize);
        let mut rest = idx;
        for _ in 0..self.c {
            out.push(rest % self.p);
            rest /= self.p;
        }
        out
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Monic modulus, constant term first (`[0, 1]` for prime fields).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The element with digit index `idx`.
    pub fn scalar(&self, idx: u32) -> Scalar {
        assert!(idx < self.q, "digit index {idx} outside GF({})", self.q);
        let c: Vec<u16> = self.coords(idx).into_iter().map(|a| a as u16).collect();
        Scalar::from_coeffs(&c)
    }

    pub fn zero(&self) -> Scalar {
        self.scalar(0)
    }

    pub fn one(&self) -> Scalar {
        self.scalar(1)
    }

    pub fn contains(&self, a: &Scalar) -> bool {
        a.degree as u32 == self.c && a.coeffs().iter().all(|&x| (x as u32) < self.p)
    }

    fn check(&self, a: &Scalar) -> Result<u32> {
        if self.contains(a) {
            Ok(self.index_of_unchecked(a))
        } else {
            Err(Error::Usage(format!(
                "{a:?} is not an element of GF({}^{})",
                self.p, self.c
            )))
        }
    }

    fn index_of_unchecked(&self, a: &Scalar) -> u32 {
        a.coeffs()
            .iter()
            .rev()
            .fold(0, |acc, &x| acc * self.p + x as u32)
    }

    /// Digit index `a0 + a1 p + ...` of an element.
    pub fn index_of(&self, a: &Scalar) -> Result<u32> {
        self.check(a)
    }

    /// The ordered digit set a_0, ..., a_{q-1}.
    pub fn digit_set(&self) -> Vec<Scalar> {
        (0..self.q).map(|i| self.scalar(i)).collect()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        let (x, y) = (self.check(a)?, self.check(b)?);
        Ok(self.scalar(self.add_idx(x, y)))
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        let (x, y) = (self.check(a)?, self.check(b)?);
        Ok(self.scalar(self.sub_idx(x, y)))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        let (x, y) = (self.check(a)?, self.check(b)?);
        Ok(self.scalar(self.mul_idx(x, y)))
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        let x = self.check(a)?;
        if x == 0 {
            return Err(Error::Domain("zero has no multiplicative inverse".into()));
        }
        Ok(self.scalar(self.inv[x as usize]))
    }

    // Index-level operations. Inputs must be valid digit indices (< q).

    /// Sum of two digit indices: base-p addition without carries.
    #[inline]
    pub fn add_idx(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        for _ in 0..self.c {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn neg_idx(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let (mut a, mut out, mut place) = (a, 0, 1);
        for _ in 0..self.c {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn sub_idx(&self, a: u32, b: u32) -> u32 {
        self.add_idx(a, self.neg_idx(b))
    }

    #[inline]
    pub fn mul_idx(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }

    /// Inverse by index; 0 maps to 0.
    #[inline]
    pub fn inv_idx(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    /// The constant-term coordinate (in Z/p) of the product a*b.
    ///
    /// This is the bilinear pairing through which the additive character sees
    /// products of digits.
    #[inline]
    pub fn pair_idx(&self, a: u32, b: u32) -> u32 {
        self.trace0[(a * self.q + b) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> FieldSpec {
        FieldSpec::new(2, 2, Some(&[1, 1, 1])).unwrap()
    }

    #[test]
    fn prime_field_sums() {
        let f2 = FieldSpec::prime(2).unwrap();
        assert_eq!(f2.add(&f2.one(), &f2.one()).unwrap(), f2.zero());
        let f3 = FieldSpec::prime(3).unwrap();
        let two = f3.scalar(2);
        assert_eq!(f3.add(&two, &two).unwrap(), f3.one());
        assert_eq!(f3.mul(&two, &two).unwrap(), f3.one());
        assert_eq!(f3.inv(&two).unwrap(), two);
    }

    #[test]
    fn gf4_arithmetic() {
        let f = gf4();
        let x = Scalar::from_coeffs(&[0, 1]);
        let x1 = Scalar::from_coeffs(&[1, 1]);
        assert_eq!(f.add(&x, &x1).unwrap(), f.one());
        assert_eq!(f.mul(&x, &x).unwrap(), x1);
        assert_eq!(f.inv(&x).unwrap(), x1);
        assert_eq!(f.inv(&f.one()).unwrap(), f.one());
        assert_eq!(x1.to_string(), "x+1");
    }

    #[test]
    fn digit_sets() {
        let f2 = FieldSpec::prime(2).unwrap();
        assert_eq!(f2.digit_set(), vec![f2.zero(), f2.one()]);
        let f3 = FieldSpec::prime(3).unwrap();
        let d: Vec<_> = f3.digit_set().iter().map(|s| s.coeffs()[0]).collect();
        assert_eq!(d, vec![0, 1, 2]);
        let f = gf4();
        let names: Vec<_> = f.digit_set().iter().map(|s| s.to_string()).collect();
        assert_eq!(names, vec!["0", "1", "x", "x+1"]);
        for (i, s) in f.digit_set().iter().enumerate() {
            assert_eq!(f.index_of(s).unwrap(), i as u32);
        }
    }

    #[test]
    fn zero_has_no_inverse() {
        let f = FieldSpec::prime(5).unwrap();
        assert!(matches!(f.inv(&f.zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let f3 = FieldSpec::prime(3).unwrap();
        let x = Scalar::from_coeffs(&[0, 1]);
        assert!(matches!(f3.add(&x, &f3.one()), Err(Error::Usage(_))));
        let big = Scalar::from_coeffs(&[4]);
        assert!(matches!(f3.mul(&big, &f3.one()), Err(Error::Usage(_))));
    }

    #[test]
    fn construction_checks() {
        assert!(FieldSpec::prime(4).is_err());
        assert!(FieldSpec::new(2, 2, Some(&[1, 0, 1])).is_err()); // (x+1)^2
        assert!(FieldSpec::new(2, 4, Some(&[1, 0, 1, 0, 1])).is_err()); // (x^2+x+1)^2
        assert!(FieldSpec::new(2, 2, None).is_err());
        assert!(FieldSpec::new(2, 5, None).is_err());
        assert!(FieldSpec::new(3, 2, Some(&[1, 0, 1])).is_ok()); // x^2+1 over GF(3)
        assert_eq!(FieldSpec::with_default_modulus(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
    }

    /// Field axioms over the full tables for every supported field with q <= 16.
    #[test]
    fn field_axioms_exhaustive() {
        let fields = vec![
            FieldSpec::prime(2).unwrap(),
            FieldSpec::prime(3).unwrap(),
            FieldSpec::prime(5).unwrap(),
            FieldSpec::prime(7).unwrap(),
            FieldSpec::prime(11).unwrap(),
            FieldSpec::prime(13).unwrap(),
            gf4(),
            FieldSpec::with_default_modulus(2, 3).unwrap(),
            FieldSpec::with_default_modulus(3, 2).unwrap(),
            FieldSpec::with_default_modulus(2, 4).unwrap(),
        ];
        for f in fields {
            let q = f.q();
            for a in 0..q {
                assert_eq!(f.add_idx(a, 0), a);
                assert_eq!(f.mul_idx(a, 1), a);
                assert_eq!(f.add_idx(a, f.neg_idx(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul_idx(a, f.inv_idx(a)), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add_idx(a, b), f.add_idx(b, a));
                    assert_eq!(f.mul_idx(a, b), f.mul_idx(b, a));
                    for c in 0..q {
                        assert_eq!(
                            f.mul_idx(a, f.mul_idx(b, c)),
                            f.mul_idx(f.mul_idx(a, b), c)
                        );
                        assert_eq!(
                            f.mul_idx(a, f.add_idx(b, c)),
                            f.add_idx(f.mul_idx(a, b), f.mul_idx(a, c))
                        );
                        assert_eq!(f.add_idx(a, f.add_idx(b, c)), f.add_idx(f.add_idx(a, b), c));
                    }
                }
            }
        }
    }
}
