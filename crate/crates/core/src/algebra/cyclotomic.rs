//! Exact arithmetic in cyclotomic fields Q(ζ_m).
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(m)-1}` and every
//! product is reduced modulo the m-th cyclotomic polynomial, so the
//! representation of a field element is unique.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};

pub fn euler_phi(m: u32) -> usize {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result as usize
}

pub fn gcd_u32(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u32(a: u32, b: u32) -> u32 {
    a / gcd_u32(a, b) * b
}

/// Integer coefficients (lowest degree first) of the m-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(m: u32) -> Vec<Integer> {
    assert!(m >= 1);
    // x^m - 1
    let mut rem: Vec<Integer> = vec![Integer::new(); m as usize + 1];
    rem[0] = Integer::from(-1);
    rem[m as usize] = Integer::from(1);
    for d in 1..m {
        if m % d == 0 {
            rem = exact_monic_div(&rem, &cyclotomic_polynomial(d));
        }
    }
    rem
}

fn exact_monic_div(num: &[Integer], den: &[Integer]) -> Vec<Integer> {
    let dn = den.len() - 1;
    let mut r = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![Integer::new(); qlen];
    for k in (0..qlen).rev() {
        let c = r[k + dn].clone();
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                r[k + j] -= Integer::from(&c * dj);
            }
        }
        q[k] = c;
    }
    debug_assert!(r.iter().all(|c| *c == 0));
    q
}

/// Shared data for Q(ζ_m): the modulus and the power-basis image of every ζ^k.
pub struct CycField {
    m: u32,
    phi: usize,
    modulus: Vec<Integer>,
    /// `powers[k]` holds the coordinates of ζ^k for 0 ≤ k < max(m, 2φ-1).
    powers: Vec<Vec<Integer>>,
}

impl CycField {
    fn new(m: u32) -> Self {
        let modulus = cyclotomic_polynomial(m);
        let phi = modulus.len() - 1;
        let count = (m as usize).max(2 * phi);
        let mut powers = Vec::with_capacity(count);
        let mut cur = vec![Integer::new(); phi];
        cur[0] = Integer::from(1);
        for _ in 0..count {
            powers.push(cur.clone());
            // multiply by ζ and reduce: ζ^φ = -(a_0 + … + a_{φ-1} ζ^{φ-1})
            let top = cur[phi - 1].clone();
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = Integer::new();
            if top != 0 {
                for (i, c) in cur.iter_mut().enumerate() {
                    *c -= Integer::from(&top * &modulus[i]);
                }
            }
        }
        CycField {
            m,
            phi,
            modulus,
            powers,
        }
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.phi
    }

    pub fn modulus(&self) -> &[Integer] {
        &self.modulus
    }

    /// Coordinates of ζ^k, any k ≥ 0.
    pub fn power(&self, k: usize) -> &[Integer] {
        if k < self.powers.len() {
            &self.powers[k]
        } else {
            &self.powers[k % self.m as usize]
        }
    }

    /// ζ_m = exp(2πi/m) at the requested precision.
    pub fn zeta(&self, prec: u32) -> Complex {
        let guard = prec + 16;
        let two_pi = Float::with_val(guard, Constant::Pi) * 2u32;
        let angle = two_pi / self.m;
        let (s, c) = angle.sin_cos(Float::new(guard));
        Complex::with_val(prec, (c, s))
    }
}

fn field_cache() -> &'static Mutex<HashMap<u32, Arc<CycField>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CycField>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Returns the (cached) field Q(ζ_m).
pub fn field(m: u32) -> Arc<CycField> {
    assert!(m >= 1, "cyclotomic order must be positive");
    let mut cache = field_cache().lock().expect("field cache poisoned");
    cache
        .entry(m)
        .or_insert_with(|| Arc::new(CycField::new(m)))
        .clone()
}

/// Exact element of Q(ζ_m).
#[derive(Clone)]
pub struct CycElement {
    field: Arc<CycField>,
    coeffs: Vec<Rational>,
}

impl CycElement {
    pub fn zero(m: u32) -> Self {
        let field = field(m);
        let coeffs = vec![Rational::new(); field.phi];
        CycElement { field, coeffs }
    }

    pub fn one(m: u32) -> Self {
        Self::from_rational(m, Rational::from(1))
    }

    pub fn from_rational(m: u32, r: Rational) -> Self {
        let mut e = Self::zero(m);
        e.coeffs[0] = r;
        e
    }

    pub fn from_int(m: u32, n: i64) -> Self {
        Self::from_rational(m, Rational::from(n))
    }

    pub fn from_ratio(m: u32, p: i64, q: i64) -> Self {
        Self::from_rational(m, Rational::from((p, q)))
    }

    /// ζ_m^k.
    pub fn zeta_pow(m: u32, k: i64) -> Self {
        let field = field(m);
        let k = k.rem_euclid(m as i64) as usize;
        let coeffs = field
            .power(k)
            .iter()
            .map(|c| Rational::from(c.clone()))
            .collect();
        CycElement { field, coeffs }
    }

    pub fn zeta(m: u32) -> Self {
        Self::zeta_pow(m, 1)
    }

    /// Builds an element from power-basis coordinates. Fails on a length mismatch.
    pub fn from_coeffs(m: u32, coeffs: Vec<Rational>) -> Result<Self> {
        let field = field(m);
        if coeffs.len() != field.phi {
            return Err(Error::Domain(format!(
                "Q(ζ_{m}) needs {} coordinates, got {}",
                field.phi,
                coeffs.len()
            )));
        }
        Ok(CycElement { field, coeffs })
    }

    pub(crate) fn from_parts(field: Arc<CycField>, coeffs: Vec<Rational>) -> Self {
        debug_assert_eq!(coeffs.len(), field.phi);
        CycElement { field, coeffs }
    }

    pub fn order(&self) -> u32 {
        self.field.m
    }

    pub fn field(&self) -> &Arc<CycField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|c| *c == 0)
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(|c| *c == 0) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Re-expresses the element inside Q(ζ_target); `order()` must divide `target`.
    pub fn promote(&self, target: u32) -> Self {
        if target == self.field.m {
            return self.clone();
        }
        assert!(
            target % self.field.m == 0,
            "cannot promote Q(ζ_{}) into Q(ζ_{target})",
            self.field.m
        );
        let big = field(target);
        let step = (target / self.field.m) as usize;
        let mut coeffs = vec![Rational::new(); big.phi];
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            for (acc, p) in coeffs.iter_mut().zip(big.power(i * step)) {
                if *p != 0 {
                    *acc += Rational::from(c * p);
                }
            }
        }
        CycElement { field: big, coeffs }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm modulo Φ_m.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(self.order(), r.clone().recip()));
        }
        let modulus: Vec<Rational> = self
            .field
            .modulus
            .iter()
            .map(|c| Rational::from(c.clone()))
            .collect();
        let s = qpoly::inverse_mod(&self.coeffs, &modulus);
        let mut coeffs = vec![Rational::new(); self.field.phi];
        for (dst, src) in coeffs.iter_mut().zip(s) {
            *dst = src;
        }
        Ok(CycElement {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| Rational::from(c * r)).collect(),
        }
    }

    /// Value under ζ_m ↦ exp(2πi/m), rounded to `prec` bits.
    pub fn embed(&self, prec: u32) -> Complex {
        let work = prec + 16;
        let zeta = self.field.zeta(work);
        let mut acc = Complex::new(work);
        for c in self.coeffs.iter().rev() {
            acc *= &zeta;
            acc += Float::with_val(work, c);
        }
        Complex::with_val(prec, acc)
    }

    /// Double-precision value, used by the Monte-Carlo and continuation kernels.
    pub fn embed_f64(&self) -> num_complex::Complex64 {
        let z = self.embed(64);
        num_complex::Complex64::new(z.real().to_f64(), z.imag().to_f64())
    }

    fn unify(a: &Self, b: &Self) -> (Self, Self) {
        let l = lcm_u32(a.order(), b.order());
        (a.promote(l), b.promote(l))
    }

    fn mul_same(&self, other: &Self) -> Self {
        let phi = self.field.phi;
        let mut prod = vec![Rational::new(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if *b != 0 {
                    prod[i + j] += Rational::from(a * b);
                }
            }
        }
        let mut coeffs: Vec<Rational> = prod.drain(..phi).collect();
        for (k, c) in prod.into_iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (dst, p) in coeffs.iter_mut().zip(self.field.power(phi + k)) {
                if *p != 0 {
                    *dst += Rational::from(&c * p);
                }
            }
        }
        CycElement {
            field: self.field.clone(),
            coeffs,
        }
    }
}

impl PartialEq for CycElement {
    fn eq(&self, other: &Self) -> bool {
        if self.order() == other.order() {
            self.coeffs == other.coeffs
        } else {
            let (a, b) = Self::unify(self, other);
            a.coeffs == b.coeffs
        }
    }
}

impl Eq for CycElement {}

impl<'a> Add<&'a CycElement> for &'a CycElement {
    type Output = CycElement;
    fn add(self, rhs: &'a CycElement) -> CycElement {
        if self.order() != rhs.order() {
            let (a, b) = CycElement::unify(self, rhs);
            return &a + &b;
        }
        CycElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| Rational::from(a + b))
                .collect(),
        }
    }
}

impl<'a> Sub<&'a CycElement> for &'a CycElement {
    type Output = CycElement;
    fn sub(self, rhs: &'a CycElement) -> CycElement {
        if self.order() != rhs.order() {
            let (a, b) = CycElement::unify(self, rhs);
            return &a - &b;
        }
        CycElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| Rational::from(a - b))
                .collect(),
        }
    }
}

impl<'a> Mul<&'a CycElement> for &'a CycElement {
    type Output = CycElement;
    fn mul(self, rhs: &'a CycElement) -> CycElement {
        if self.order() != rhs.order() {
            let (a, b) = CycElement::unify(self, rhs);
            return a.mul_same(&b);
        }
        self.mul_same(rhs)
    }
}

impl Neg for &CycElement {
    type Output = CycElement;
    fn neg(self) -> CycElement {
        CycElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}

impl fmt::Display for CycElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})ζ{}", self.order())?,
                _ => write!(f, "({c})ζ{}^{i}", self.order())?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycElement[m={}]({self})", self.order())
    }
}

/// Dense rational polynomials (lowest degree first), only what inversion needs.
mod qpoly {
    use rug::Rational;

    fn trim(p: &mut Vec<Rational>) {
        while p.last().is_some_and(|c| *c == 0) {
            p.pop();
        }
    }

    fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead = b[db].clone();
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![Rational::new(); r.len() - db];
        while r.len() >= b.len() {
            let k = r.len() - b.len();
            let c = Rational::from(r.last().unwrap() / &lead);
            for (j, bj) in b.iter().enumerate() {
                r[k + j] -= Rational::from(&c * bj);
            }
            q[k] = c;
            r.pop();
            trim(&mut r);
        }
        (q, r)
    }

    fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::new(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += Rational::from(x * y);
            }
        }
        out
    }

    fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = a.len().max(b.len());
        let mut out = vec![Rational::new(); n];
        for (i, x) in a.iter().enumerate() {
            out[i] += x;
        }
        for (i, y) in b.iter().enumerate() {
            out[i] -= y;
        }
        trim(&mut out);
        out
    }

    /// s with a·s ≡ 1 (mod m), assuming gcd(a, m) = 1.
    pub(super) fn inverse_mod(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        trim(&mut r1);
        let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) = (Vec::new(), vec![Rational::from(1)]);
        while r1.len() > 1 {
            let (q, r) = divrem(&r0, &r1);
            let s = sub(&s0, &mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r1 is a nonzero constant
        let c = r1[0].clone().recip();
        let (_, s) = divrem(&s1.iter().map(|x| Rational::from(x * &c)).collect::<Vec<_>>(), m);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials_small_orders() {
        let ints = |v: &[i64]| v.iter().map(|&x| Integer::from(x)).collect::<Vec<_>>();
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(3), ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        for m in 1..40 {
            assert_eq!(cyclotomic_polynomial(m).len() - 1, euler_phi(m));
        }
    }

    #[test]
    fn inverse_of_i_is_minus_i() {
        let i = CycElement::zeta(4);
        let inv = i.inv().unwrap();
        assert_eq!(inv, -&i);
        assert!((&i * &inv).is_one());
    }

    #[test]
    fn inverse_rational() {
        let e = CycElement::from_ratio(1, 3, 2);
        assert_eq!(e.inv().unwrap(), CycElement::from_ratio(1, 2, 3));
    }

    #[test]
    fn inverse_one_plus_zeta3() {
        let z = CycElement::zeta(3);
        let e = &CycElement::one(3) + &z;
        let inv = e.inv().unwrap();
        assert_eq!(inv, -&z);
        assert!((&e * &inv).is_one());
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert!(matches!(CycElement::zero(5).inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn zeta_has_order_m() {
        for m in [3u32, 5, 7, 8, 9, 12] {
            let z = CycElement::zeta(m);
            let mut acc = CycElement::one(m);
            for k in 1..=m {
                acc = &acc * &z;
                assert_eq!(acc.is_one(), k == m, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn promotion_respects_arithmetic() {
        let a = &CycElement::zeta(3) + &CycElement::from_ratio(3, 1, 2);
        let b = CycElement::zeta_pow(4, 3);
        let lhs = (&a * &b).promote(12);
        let rhs = &a.promote(12) * &b.promote(12);
        assert_eq!(lhs, rhs);
        // ζ_6^2 = ζ_3
        assert_eq!(CycElement::zeta_pow(6, 2), CycElement::zeta(3));
    }

    #[test]
    fn embeddings() {
        let i = CycElement::zeta(4).embed(128);
        assert!(i.real().clone().abs() < 1e-35);
        assert!((i.imag().clone() - 1u32).abs() < 1e-35);
        let third = CycElement::from_ratio(1, 1, 3).embed(200);
        let err = Float::with_val(200, third.real() - Float::with_val(200, 1) / 3u32).abs();
        assert!(err < Float::with_val(200, Float::u_exp(1, -196)));
        let z6 = CycElement::zeta(6).embed(256);
        let sqrt3_2 = Float::with_val(256, 3).sqrt() / 2u32;
        let err_re = Float::with_val(256, z6.real() - 0.5f64).abs();
        let err_im = Float::with_val(256, z6.imag() - &sqrt3_2).abs();
        let tol = Float::with_val(256, Float::u_exp(1, -252));
        assert!(err_re < tol && err_im < tol);
    }
}
