//! Recovering exact cyclotomic coefficients from high-precision approximations.

use rug::{Complex, Float, Integer, Rational};

use crate::algebra::{euler_phi, CycElement};

/// Largest root-of-unity order tried when a value is not in the working field.
const MAX_UNIT_ORDER: u32 = 24;

/// Best rational approximation by continued fractions, accepted when it is
/// within `tol` of `x` and its denominator stays below `max_den`.
pub fn recognize_rational(x: &Float, max_den: &Integer, tol: &Float) -> Option<Rational> {
    let prec = x.prec();
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let mut y = x.clone();
    for _ in 0..200 {
        let a = y.clone().floor().to_integer()?;
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        if k1 > *max_den {
            return None;
        }
        let q = Rational::from((h1.clone(), k1.clone()));
        let err = Float::with_val(prec, x - &q).abs();
        if err <= *tol {
            return Some(q);
        }
        let frac = Float::with_val(prec, &y - &a);
        if frac.is_zero() {
            return None;
        }
        y = frac.recip();
    }
    None
}

/// Recognizes `z` as an element of Q(ζ_m), or as a rational multiple of a
/// root of unity of small order (the result then lives in a larger field).
pub fn recognize(z: &Complex, m: u32, prec: u32) -> Option<CycElement> {
    let half = (prec / 2) as i32;
    let scale = Float::with_val(prec, z.abs_ref()).max(&Float::with_val(prec, 1));
    let tol = Float::with_val(prec, Float::u_exp(1, -half)) * &scale;
    let max_den = Integer::from(1) << (prec / 4);
    let rat = |x: &Float| {
        if Float::with_val(prec, x.abs_ref()) <= tol {
            Some(Rational::new())
        } else {
            recognize_rational(x, &max_den, &tol)
        }
    };

    if Float::with_val(prec, z.abs_ref()) <= tol {
        return Some(CycElement::zero(m));
    }
    if z.imag().clone().abs() <= tol {
        return rat(z.real()).map(|r| CycElement::from_rational(m, r));
    }
    if euler_phi(m) == 2 {
        // z = a + bζ with a, b rational
        let zeta = CycElement::zeta(m).embed(prec);
        let b = Float::with_val(prec, z.imag() / zeta.imag());
        let a = Float::with_val(prec, z.real() - Float::with_val(prec, &b * zeta.real()));
        if let (Some(a), Some(b)) = (rat(&a), rat(&b)) {
            return Some(
                &CycElement::from_rational(m, a) + &CycElement::zeta(m).scale(&b),
            );
        }
    }
    // r·exp(2πik/N)
    let r = Float::with_val(prec, z.abs_ref());
    let turns = Float::with_val(prec, z.arg_ref()) / (Float::with_val(prec, rug::float::Constant::Pi) * 2u32);
    if let Some(r) = rat(&r) {
        for n in 1..=MAX_UNIT_ORDER {
            let t = Float::with_val(prec, &turns * n);
            let k = t.clone().round();
            if Float::with_val(prec, &t - &k).abs() <= tol {
                let k = k.to_integer()?.to_i64()?;
                return Some(CycElement::zeta_pow(n, k).scale(&r));
            }
        }
    }
    // Gaussian rationals
    if let (Some(a), Some(b)) = (rat(z.real()), rat(z.imag())) {
        return Some(&CycElement::from_rational(4, a) + &CycElement::zeta(4).scale(&b));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continued_fraction_recovers_rationals() {
        let prec = 256;
        let x = Float::with_val(prec, -355) / 113u32;
        let tol = Float::with_val(prec, 1e-60);
        let r = recognize_rational(&x, &Integer::from(1_000_000), &tol).unwrap();
        assert_eq!(r, Rational::from((-355, 113)));
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        assert!(recognize_rational(&pi, &Integer::from(1_000_000), &tol).is_none());
    }

    #[test]
    fn recognizes_field_elements() {
        let prec = 256;
        let e = &CycElement::from_ratio(3, 1, 2) + &CycElement::zeta(3).scale(&Rational::from((-2, 7)));
        assert_eq!(recognize(&e.embed(prec), 3, prec).unwrap(), e);
        let u = CycElement::zeta_pow(5, 2).scale(&Rational::from((3, 4)));
        assert_eq!(recognize(&u.embed(prec), 1, prec).unwrap(), u);
        let g = &CycElement::from_int(4, 1) + &CycElement::zeta(4).scale(&Rational::from(2));
        assert_eq!(recognize(&g.embed(prec), 1, prec).unwrap(), g);
    }
}
