//! Integer-coefficient polynomials over Z[ζ_m], the working form for heavy
//! products. Large products go through Kronecker substitution so the cost is
//! a single GMP multiplication.

use std::sync::Arc;

use rug::integer::Order;
use rug::{Integer, Rational};

use super::cyclotomic::{CycElement, CycField};
use super::poly::Polynomial;

/// Products below this many coefficient multiplications use the schoolbook loop.
const KRONECKER_THRESHOLD: usize = 4096;

#[derive(Clone)]
pub(crate) struct ZPoly {
    field: Arc<CycField>,
    /// Coefficient of z^i occupies `data[i*phi..(i+1)*phi]`.
    data: Vec<Integer>,
}

impl ZPoly {
    fn phi(&self) -> usize {
        self.field.degree()
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.phi()
    }

    pub fn one(field: Arc<CycField>) -> Self {
        let mut data = vec![Integer::new(); field.degree()];
        data[0] = Integer::from(1);
        ZPoly { field, data }
    }

    /// Scales every polynomial by the lcm of all denominators so that all
    /// coefficients become integral. Returns the scaled forms and the lcm.
    pub fn common_form(polys: &[&Polynomial]) -> (Vec<ZPoly>, Integer) {
        let field = polys[0].field().clone();
        let mut den = Integer::from(1);
        for p in polys {
            for c in p.coeffs() {
                for r in c.coeffs() {
                    if *r.denom() != 1 {
                        den.lcm_mut(r.denom());
                    }
                }
            }
        }
        let forms = polys
            .iter()
            .map(|p| {
                let mut data = Vec::with_capacity(p.coeffs().len() * field.degree());
                for c in p.coeffs() {
                    for r in c.coeffs() {
                        let (num, d) = r.clone().into_numer_denom();
                        data.push(num * Integer::from(&den / &d));
                    }
                }
                ZPoly {
                    field: field.clone(),
                    data,
                }
            })
            .collect();
        (forms, den)
    }

    /// Divides by `den` and returns the rational polynomial.
    pub fn to_polynomial(&self, den: &Integer) -> Polynomial {
        let phi = self.phi();
        let coeffs = self
            .data
            .chunks(phi)
            .map(|chunk| {
                let rs = chunk
                    .iter()
                    .map(|c| Rational::from((c.clone(), den.clone())))
                    .collect();
                CycElement::from_parts(self.field.clone(), rs)
            })
            .collect();
        Polynomial::from_coeffs(self.field.order(), coeffs)
    }

    pub fn coefficient(&self, i: usize) -> &[Integer] {
        let phi = self.phi();
        &self.data[i * phi..(i + 1) * phi]
    }

    pub fn add_scaled(&mut self, other: &ZPoly, scalar: &[Integer]) {
        let prod = other.mul(&ZPoly {
            field: self.field.clone(),
            data: scalar.to_vec(),
        });
        if prod.data.len() > self.data.len() {
            self.data.resize(prod.data.len(), Integer::new());
        }
        for (a, b) in self.data.iter_mut().zip(prod.data) {
            *a += b;
        }
    }

    pub fn zero_like(&self) -> Self {
        ZPoly {
            field: self.field.clone(),
            data: vec![Integer::new(); self.phi()],
        }
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        let phi = self.phi();
        if self.len() == 0 || other.len() == 0 {
            return ZPoly {
                field: self.field.clone(),
                data: Vec::new(),
            };
        }
        if self.len() * other.len() * phi * phi <= KRONECKER_THRESHOLD {
            self.mul_schoolbook(other)
        } else {
            self.mul_kronecker(other)
        }
    }

    fn mul_schoolbook(&self, other: &ZPoly) -> ZPoly {
        let phi = self.phi();
        let (n1, n2) = (self.len(), other.len());
        let slots = 2 * phi - 1;
        let mut raw = vec![Integer::new(); (n1 + n2 - 1) * slots];
        for i in 0..n1 {
            let a = self.coefficient(i);
            for j in 0..n2 {
                let b = other.coefficient(j);
                for (s, x) in a.iter().enumerate() {
                    if *x == 0 {
                        continue;
                    }
                    for (t, y) in b.iter().enumerate() {
                        if *y != 0 {
                            raw[(i + j) * slots + s + t] += Integer::from(x * y);
                        }
                    }
                }
            }
        }
        self.reduce_slots(raw, n1 + n2 - 1)
    }

    fn mul_kronecker(&self, other: &ZPoly) -> ZPoly {
        let phi = self.phi();
        let (n1, n2) = (self.len(), other.len());
        let slots = 2 * phi - 1;
        let bits_a = self.data.iter().map(|c| c.significant_bits()).max().unwrap_or(0);
        let bits_b = other.data.iter().map(|c| c.significant_bits()).max().unwrap_or(0);
        let terms = (n1.min(n2) * phi) as u32;
        let growth = 32 - terms.leading_zeros();
        let need = bits_a + bits_b + growth + 2;
        let limbs = need.div_ceil(64) as usize;

        let pack = |p: &ZPoly| -> Integer {
            let total = p.len() * slots * limbs;
            let mut pos = vec![0u64; total];
            let mut neg = vec![0u64; total];
            for i in 0..p.len() {
                for (s, c) in p.coefficient(i).iter().enumerate() {
                    if *c == 0 {
                        continue;
                    }
                    let at = (i * slots + s) * limbs;
                    let digits = c.as_abs().to_digits::<u64>(Order::Lsf);
                    let dst = if *c > 0 { &mut pos } else { &mut neg };
                    dst[at..at + digits.len()].copy_from_slice(&digits);
                }
            }
            Integer::from_digits(&pos, Order::Lsf) - Integer::from_digits(&neg, Order::Lsf)
        };

        let mut product = pack(self) * pack(other);
        let negative = product < 0;
        if negative {
            product = -product;
        }
        let digits = product.to_digits::<u64>(Order::Lsf);
        let count = (n1 + n2 - 1) * slots;
        let mut raw = Vec::with_capacity(count);
        let half = Integer::from(1) << (64 * limbs as u32 - 1);
        let full = Integer::from(1) << (64 * limbs as u32);
        let mut carry = false;
        for t in 0..count {
            let lo = (t * limbs).min(digits.len());
            let hi = ((t + 1) * limbs).min(digits.len());
            let mut u = Integer::from_digits(&digits[lo..hi], Order::Lsf);
            if carry {
                u += 1;
            }
            if u >= half {
                u -= &full;
                carry = true;
            } else {
                carry = false;
            }
            if negative {
                u = -u;
            }
            raw.push(u);
        }
        self.reduce_slots(raw, n1 + n2 - 1)
    }

    /// Folds the ζ-exponents 0..2φ-1 of each coefficient back into the power basis.
    fn reduce_slots(&self, raw: Vec<Integer>, n: usize) -> ZPoly {
        let phi = self.phi();
        let slots = 2 * phi - 1;
        let mut data = Vec::with_capacity(n * phi);
        for i in 0..n {
            let chunk = &raw[i * slots..(i + 1) * slots];
            let mut coeff: Vec<Integer> = chunk[..phi].to_vec();
            for (k, c) in chunk[phi..].iter().enumerate() {
                if *c == 0 {
                    continue;
                }
                for (dst, p) in coeff.iter_mut().zip(self.field.power(phi + k)) {
                    if *p != 0 {
                        *dst += Integer::from(c * p);
                    }
                }
            }
            data.extend(coeff);
        }
        let mut out = ZPoly {
            field: self.field.clone(),
            data,
        };
        out.trim();
        out
    }

    fn trim(&mut self) {
        let phi = self.phi();
        while self.data.len() > phi && self.data[self.data.len() - phi..].iter().all(|c| *c == 0) {
            self.data.truncate(self.data.len() - phi);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::cyclotomic::field;

    fn random_zpoly(m: u32, n: usize, bits: u32, seed: u64) -> ZPoly {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = field(m);
        let phi = f.degree();
        let data = (0..n * phi)
            .map(|_| {
                let mut x = Integer::from(rng.gen::<u64>()) << (bits.saturating_sub(64));
                if rng.gen::<bool>() {
                    x = -x;
                }
                x
            })
            .collect();
        ZPoly { field: f, data }
    }

    #[test]
    fn kronecker_matches_schoolbook() {
        for (m, n1, n2, bits, seed) in [(1, 40, 70, 64, 1), (3, 33, 20, 200, 2), (5, 17, 25, 90, 3), (12, 9, 30, 300, 4)] {
            let a = random_zpoly(m, n1, bits, seed);
            let b = random_zpoly(m, n2, bits, seed + 100);
            let s = a.mul_schoolbook(&b);
            let k = a.mul_kronecker(&b);
            assert_eq!(s.data, k.data, "m={m}");
        }
    }
}
