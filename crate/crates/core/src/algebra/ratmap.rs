use std::fmt;

use rug::{Complex, Float};

use super::cyclotomic::{lcm_u32, CycElement};
use super::poly::{horner, Polynomial};
use super::sphere::SpherePoint;
use super::zpoly::ZPoly;
use crate::error::{Error, Result};

/// A rational map p/q over Q(ζ_m) in canonical form.
///
/// `num` and `den` are coprime, `den` is monic when it is not constant and
/// equals 1 otherwise. Two maps are equal as functions iff their
/// representations are equal, which is what every exact check relies on.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
}

impl RationalMap {
    /// Reduces and normalizes `num / den`.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (num, den) = Polynomial::unify(&num, &den);
        if num.is_zero() {
            return Ok(RationalMap {
                num,
                den: Polynomial::one(den.order()),
            });
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.divrem(&g)?.0, den.divrem(&g)?.0)
        };
        Ok(Self::from_coprime(num, den))
    }

    /// Normalizes the leading coefficient of a pair already known to be coprime.
    pub(crate) fn from_coprime(num: Polynomial, den: Polynomial) -> Self {
        let lead = den.leading().expect("nonzero denominator").clone();
        if den.is_constant() {
            let inv = lead.inv().expect("nonzero");
            let m = den.order();
            RationalMap {
                num: num.scale(&inv),
                den: Polynomial::one(m),
            }
        } else if lead.is_one() {
            RationalMap { num, den }
        } else {
            let inv = lead.inv().expect("nonzero");
            RationalMap {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn polynomial(p: Polynomial) -> Self {
        let m = p.order();
        RationalMap {
            num: p,
            den: Polynomial::one(m),
        }
    }

    pub fn identity(m: u32) -> Self {
        Self::polynomial(Polynomial::z(m))
    }

    pub fn constant(c: CycElement) -> Self {
        Self::polynomial(Polynomial::constant(c))
    }

    /// c·z^k
    pub fn monomial(c: CycElement, k: usize) -> Self {
        Self::polynomial(Polynomial::monomial(c, k))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn order(&self) -> u32 {
        self.num.order()
    }

    /// max(deg num, deg den); constants have degree 0.
    pub fn degree(&self) -> usize {
        self.num.degree_or_zero().max(self.den.degree_or_zero())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn promote(&self, target: u32) -> Self {
        RationalMap {
            num: self.num.promote(target),
            den: self.den.promote(target),
        }
    }

    fn unify(f: &Self, g: &Self) -> (Self, Self) {
        let l = lcm_u32(f.order(), g.order());
        (f.promote(l), g.promote(l))
    }

    /// f ∘ g.
    pub fn compose(&self, g: &RationalMap) -> Result<RationalMap> {
        if self.order() != g.order() {
            let (a, b) = Self::unify(self, g);
            return a.compose(&b);
        }
        let d = self.degree();
        if d == 0 {
            return Ok(self.clone());
        }
        let (pq, _) = ZPoly::common_form(&[&self.num, &self.den]);
        let (rs, _) = ZPoly::common_form(&[&g.num, &g.den]);
        let (r, s) = (&rs[0], &rs[1]);

        // t_i = r^i s^(d-i); P = Σ p_i t_i, Q = Σ q_i t_i (homogenized substitution)
        let mut rpow = vec![ZPoly::one(self.num.field())];
        let mut spow = vec![ZPoly::one(self.num.field())];
        for i in 1..=d {
            rpow.push(rpow[i - 1].mul(r));
            spow.push(spow[i - 1].mul(s));
        }
        let mut big_p = rpow[0].zero_like();
        let mut big_q = rpow[0].zero_like();
        for i in 0..=d {
            let pi = (i < pq[0].len()).then(|| pq[0].coefficient(i));
            let qi = (i < pq[1].len()).then(|| pq[1].coefficient(i));
            let nonzero = |c: Option<&[rug::Integer]>| c.is_some_and(|c| c.iter().any(|x| *x != 0));
            if !nonzero(pi) && !nonzero(qi) {
                continue;
            }
            let t = rpow[i].mul(&spow[d - i]);
            if let Some(c) = pi.filter(|c| c.iter().any(|x| *x != 0)) {
                big_p.add_scaled(&t, c);
            }
            if let Some(c) = qi.filter(|c| c.iter().any(|x| *x != 0)) {
                big_q.add_scaled(&t, c);
            }
        }
        let one = rug::Integer::from(1);
        let num = big_p.to_polynomial(&one);
        let den = big_q.to_polynomial(&one);
        if den.is_zero() {
            // g is a constant sitting on a pole of f
            return Err(Error::ZeroDenominator);
        }
        if g.degree() == 0 {
            return Self::new(num, den);
        }
        // homogeneous substitution of coprime forms stays coprime
        Ok(Self::from_coprime(num, den))
    }

    /// The k-fold composition f^{∘k}, k ≥ 1.
    pub fn iterate(&self, k: usize) -> Result<RationalMap> {
        if k == 0 {
            return Err(Error::Domain("iterate needs k >= 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Exact derivative by the quotient rule.
    pub fn derivative(&self) -> RationalMap {
        let top = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        let bottom = self.den.mul(&self.den);
        Self::new(top, bottom).expect("denominator is nonzero")
    }

    /// w ↦ 1/f(1/w), the map read in the chart at infinity.
    pub fn conjugate_at_infinity(&self) -> Result<RationalMap> {
        let d = self.degree();
        Self::new(self.den.reverse(d), self.num.reverse(d))
    }

    /// Evaluates the map on the Riemann sphere.
    pub fn eval(&self, p: &SpherePoint, prec: u32) -> Result<SpherePoint> {
        EmbeddedMap::new(self, prec).eval(p)
    }
}

/// A map with coefficients embedded at a fixed precision, for repeated evaluation.
pub struct EmbeddedMap {
    prec: u32,
    degree: usize,
    num: Vec<Complex>,
    den: Vec<Complex>,
    num_rev: Vec<Complex>,
    den_rev: Vec<Complex>,
    deg_num: Option<usize>,
    deg_den: usize,
}

impl EmbeddedMap {
    pub fn new(f: &RationalMap, prec: u32) -> Self {
        let work = prec + 32;
        let d = f.degree();
        EmbeddedMap {
            prec,
            degree: d,
            num: f.num.embed(work),
            den: f.den.embed(work),
            num_rev: f.num.reverse(d).embed(work),
            den_rev: f.den.reverse(d).embed(work),
            deg_num: f.num.degree(),
            deg_den: f.den.degree_or_zero(),
        }
    }

    pub fn eval(&self, p: &SpherePoint) -> Result<SpherePoint> {
        let work = self.prec + 32;
        let z = match p {
            SpherePoint::Infinity => {
                return Ok(match self.deg_num {
                    None => SpherePoint::Finite(Complex::new(self.prec)),
                    Some(dn) if dn > self.deg_den => SpherePoint::Infinity,
                    Some(dn) if dn < self.deg_den => SpherePoint::Finite(Complex::new(self.prec)),
                    Some(dn) => SpherePoint::Finite(Complex::with_val(
                        self.prec,
                        Complex::with_val(work, &self.num[dn] / &self.den[dn]),
                    )),
                })
            }
            SpherePoint::Finite(z) => Complex::with_val(work, z),
        };
        let small = Float::with_val(work, z.abs_ref()) <= 1u32;
        let (n, d, scale) = if small {
            let scale = abs_sum(&self.num, &z, work).max(&abs_sum(&self.den, &z, work));
            (
                horner(&self.num, &z, work),
                horner(&self.den, &z, work),
                scale,
            )
        } else {
            let w = Complex::with_val(work, z.recip_ref());
            let scale = abs_sum(&self.num_rev, &w, work).max(&abs_sum(&self.den_rev, &w, work));
            (
                horner(&self.num_rev, &w, work),
                horner(&self.den_rev, &w, work),
                scale,
            )
        };
        if d.is_zero() {
            if n.is_zero() {
                return Err(Error::PrecisionExhausted(
                    "numerator and denominator both vanish".into(),
                ));
            }
            return Ok(SpherePoint::Infinity);
        }
        let floor = scale * Float::with_val(work, Float::u_exp(1, -(self.prec as i32 - 8)));
        let an = Float::with_val(work, n.abs_ref());
        let ad = Float::with_val(work, d.abs_ref());
        if an < floor && ad < floor {
            log::warn!("evaluation near a common root of numerator and denominator; result is unreliable");
        }
        Ok(SpherePoint::Finite(Complex::with_val(self.prec, n / d)))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

fn abs_sum(coeffs: &[Complex], z: &Complex, prec: u32) -> Float {
    let r = Float::with_val(prec, z.abs_ref());
    let mut acc = Float::new(prec);
    for c in coeffs.iter().rev() {
        acc *= &r;
        acc += Float::with_val(prec, c.abs_ref());
    }
    acc
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMap[m={}]({self})", self.order())
    }
}

/// A degree-one rational map.
#[derive(Clone, PartialEq, Eq)]
pub struct MobiusMap(RationalMap);

impl MobiusMap {
    pub fn new(map: RationalMap) -> Result<Self> {
        if map.degree() != 1 {
            return Err(Error::Domain(format!(
                "a Möbius map has degree 1, got {}",
                map.degree()
            )));
        }
        Ok(MobiusMap(map))
    }

    /// (a z + b) / (c z + d)
    pub fn from_coefficients(
        a: CycElement,
        b: CycElement,
        c: CycElement,
        d: CycElement,
    ) -> Result<Self> {
        let m = [a.order(), b.order(), c.order(), d.order()]
            .into_iter()
            .fold(1, lcm_u32);
        let num = Polynomial::from_coeffs(m, vec![b, a]);
        let den = Polynomial::from_coeffs(m, vec![d, c]);
        Self::new(RationalMap::new(num, den)?)
    }

    pub fn identity(m: u32) -> Self {
        MobiusMap(RationalMap::identity(m))
    }

    /// The coefficients (a, b, c, d) of the normalized representation.
    pub fn coefficients(&self) -> [CycElement; 4] {
        let (n, d) = (&self.0.num, &self.0.den);
        [n.coeff(1), n.coeff(0), d.coeff(1), d.coeff(0)]
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.coefficients();
        Self::from_coefficients(d, -&b, -&c, a).expect("Möbius maps are invertible")
    }

    pub fn compose(&self, other: &MobiusMap) -> Self {
        MobiusMap(self.0.compose(&other.0).expect("Möbius composition"))
    }

    pub fn as_map(&self) -> &RationalMap {
        &self.0
    }

    pub fn into_map(self) -> RationalMap {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0 == RationalMap::identity(self.0.order())
    }
}

impl fmt::Debug for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Möbius({})", self.0)
    }
}

impl fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
