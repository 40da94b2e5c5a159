use std::fmt;
use std::sync::Arc;

use rug::{Complex, Rational};

use super::cyclotomic::{field, lcm_u32, CycElement, CycField};
use super::zpoly::ZPoly;
use crate::error::{Error, Result};

/// Dense univariate polynomial over Q(ζ_m), lowest degree first.
///
/// The leading coefficient is nonzero; the zero polynomial has no coefficients.
/// Equality compares values, so polynomials stored over different orders can
/// still be equal.
#[derive(Clone)]
pub struct Polynomial {
    m: u32,
    coeffs: Vec<CycElement>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(m: u32) -> Self {
        Polynomial {
            m,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: CycElement) -> Self {
        Self::from_coeffs(c.order(), vec![c])
    }

    pub fn one(m: u32) -> Self {
        Self::constant(CycElement::one(m))
    }

    /// The monomial c·z^k.
    pub fn monomial(c: CycElement, k: usize) -> Self {
        let m = c.order();
        let mut coeffs = vec![CycElement::zero(m); k];
        coeffs.push(c);
        Self::from_coeffs(m, coeffs)
    }

    /// The identity polynomial z.
    pub fn z(m: u32) -> Self {
        Self::monomial(CycElement::one(m), 1)
    }

    /// Builds a polynomial from coefficients; all must lie in Q(ζ_m) for a
    /// divisor of `m`, and are promoted to order `m`.
    pub fn from_coeffs(m: u32, coeffs: Vec<CycElement>) -> Self {
        let coeffs = coeffs
            .into_iter()
            .map(|c| if c.order() == m { c } else { c.promote(m) })
            .collect();
        let mut p = Polynomial { m, coeffs };
        p.trim();
        p
    }

    /// Rational-coefficient polynomial from integers.
    pub fn from_ints(m: u32, coeffs: &[i64]) -> Self {
        Self::from_coeffs(m, coeffs.iter().map(|&c| CycElement::from_int(m, c)).collect())
    }

    /// Rational-coefficient polynomial from (numerator, denominator) pairs.
    pub fn from_ratios(m: u32, coeffs: &[(i64, i64)]) -> Self {
        Self::from_coeffs(
            m,
            coeffs
                .iter()
                .map(|&(p, q)| CycElement::from_ratio(m, p, q))
                .collect(),
        )
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn field(&self) -> Arc<CycField> {
        field(self.m)
    }

    pub fn coeffs(&self) -> &[CycElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention deg 0 = -∞ collapsed to 0.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&CycElement> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> CycElement {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| CycElement::zero(self.m))
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn promote(&self, target: u32) -> Self {
        if target == self.m {
            return self.clone();
        }
        Polynomial {
            m: target,
            coeffs: self.coeffs.iter().map(|c| c.promote(target)).collect(),
        }
    }

    pub(crate) fn unify(a: &Self, b: &Self) -> (Self, Self) {
        let l = lcm_u32(a.m, b.m);
        (a.promote(l), b.promote(l))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.m != other.m {
            let (a, b) = Self::unify(self, other);
            return a.add(&b);
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::from_coeffs(self.m, coeffs)
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.m != other.m {
            let (a, b) = Self::unify(self, other);
            return a.mul(&b);
        }
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.m);
        }
        let (forms, den) = ZPoly::common_form(&[self, other]);
        let prod = forms[0].mul(&forms[1]);
        prod.to_polynomial(&den.square())
    }

    pub fn scale(&self, c: &CycElement) -> Self {
        if c.order() != self.m {
            let l = lcm_u32(c.order(), self.m);
            return self.promote(l).scale(&c.promote(l));
        }
        Self::from_coeffs(self.m, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        Self::from_coeffs(self.m, self.coeffs.iter().map(|x| x.scale(r)).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut result = Self::one(self.m);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&Rational::from(i as u64)))
            .collect();
        Self::from_coeffs(self.m, coeffs)
    }

    /// Divides by the leading coefficient. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(lead) if lead.is_one() => self.clone(),
            Some(lead) => self.scale(&lead.inv().expect("leading coefficient is nonzero")),
        }
    }

    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if self.m != divisor.m {
            let (a, b) = Self::unify(self, divisor);
            return a.divrem(&b);
        }
        let lead_inv = divisor.leading().ok_or(Error::DivisionByZero)?.inv()?;
        let db = divisor.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return Ok((Self::zero(self.m), self.clone()));
        }
        let mut q = vec![CycElement::zero(self.m); r.len() - db];
        for k in (0..q.len()).rev() {
            let top = &r[k + db];
            if top.is_zero() {
                continue;
            }
            let c = top * &lead_inv;
            for (j, dj) in divisor.coeffs.iter().enumerate() {
                if !dj.is_zero() {
                    r[k + j] = &r[k + j] - &(&c * dj);
                }
            }
            q[k] = c;
        }
        r.truncate(db);
        Ok((Self::from_coeffs(self.m, q), Self::from_coeffs(self.m, r)))
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        if self.m != other.m {
            let (a, b) = Self::unify(self, other);
            return a.gcd(&b);
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("divisor is nonzero");
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// z^D · p(1/z) for a formal degree D ≥ deg p.
    pub fn reverse(&self, formal_degree: usize) -> Self {
        let mut coeffs = vec![CycElement::zero(self.m); formal_degree + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[formal_degree - i] = c.clone();
        }
        Self::from_coeffs(self.m, coeffs)
    }

    /// Coefficients embedded into C at `prec` bits.
    pub fn embed(&self, prec: u32) -> Vec<Complex> {
        self.coeffs.iter().map(|c| c.embed(prec)).collect()
    }

    pub fn embed_f64(&self) -> Vec<num_complex::Complex64> {
        self.coeffs.iter().map(|c| c.embed_f64()).collect()
    }
}

/// Horner evaluation of embedded coefficients.
pub fn horner(coeffs: &[Complex], z: &Complex, prec: u32) -> Complex {
    let mut acc = Complex::new(prec);
    for c in coeffs.iter().rev() {
        acc *= z;
        acc += c;
    }
    acc
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "[{c}]z")?,
                _ => write!(f, "[{c}]z^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[m={}]({self})", self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_cancels_common_factor() {
        let a = Polynomial::from_ints(1, &[-1, 0, 1]);
        let b = Polynomial::from_ints(1, &[-1, 1]);
        assert_eq!(a.gcd(&b), b);
        let (q, r) = a.divrem(&b).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, Polynomial::from_ints(1, &[1, 1]));
    }

    #[test]
    fn large_products_agree_with_repeated_squaring() {
        let p = Polynomial::from_ratios(3, &[(1, 2), (-3, 1), (2, 5), (7, 3)]).add(
            &Polynomial::monomial(CycElement::zeta(3), 2),
        );
        let p8 = p.pow(8);
        let mut naive = Polynomial::one(3);
        for _ in 0..8 {
            naive = naive.mul(&p);
        }
        assert_eq!(p8, naive);
        assert_eq!(p8.degree(), Some(24));
    }

    #[test]
    fn derivative_and_reverse() {
        let p = Polynomial::from_ints(1, &[1, 0, 3]);
        assert_eq!(p.derivative(), Polynomial::from_ints(1, &[0, 6]));
        assert_eq!(p.reverse(3), Polynomial::from_ints(1, &[0, 3, 0, 1]));
    }
}
