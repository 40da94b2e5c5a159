use num_complex::Complex64;
use rug::{Complex, Float};
use serde_json::{json, Value};

/// A point of the Riemann sphere at high precision.
#[derive(Clone, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex),
    Infinity,
}

impl SpherePoint {
    pub fn finite(z: Complex) -> Self {
        SpherePoint::Finite(z)
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        SpherePoint::Finite(Complex::with_val(prec, (re, im)))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Complex> {
        match self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn to_f64(&self) -> Point64 {
        match self {
            SpherePoint::Finite(z) => {
                Point64::Finite(Complex64::new(z.real().to_f64(), z.imag().to_f64()))
            }
            SpherePoint::Infinity => Point64::Infinity,
        }
    }

    /// Chordal distance 2|z-w| / sqrt((1+|z|²)(1+|w|²)), with values in [0, 2].
    pub fn chordal(&self, other: &SpherePoint, prec: u32) -> Float {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => Float::new(prec),
            (SpherePoint::Finite(z), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
                let n = Float::with_val(prec, z.abs_ref());
                let den = (n.square() + 1u32).sqrt();
                Float::with_val(prec, 2u32) / den
            }
            (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
                let diff = Float::with_val(prec, Complex::with_val(prec, z - w).abs_ref());
                let a = Float::with_val(prec, z.abs_ref()).square() + 1u32;
                let b = Float::with_val(prec, w.abs_ref()).square() + 1u32;
                diff * 2u32 / (a * b).sqrt()
            }
        }
    }

    /// JSON rendering with a fixed number of significant decimal digits.
    pub fn to_json(&self, digits: usize) -> Value {
        match self {
            SpherePoint::Infinity => json!("infinity"),
            SpherePoint::Finite(z) => complex_json(z, digits),
        }
    }
}

pub fn complex_json(z: &Complex, digits: usize) -> Value {
    json!({
        "re": z.real().to_string_radix(10, Some(digits)),
        "im": z.imag().to_string_radix(10, Some(digits)),
    })
}

/// A double-precision point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point64 {
    Finite(Complex64),
    Infinity,
}

impl Point64 {
    /// Unit-sphere coordinates under inverse stereographic projection
    /// (∞ is the north pole).
    pub fn to_unit_sphere(self) -> [f64; 3] {
        match self {
            Point64::Infinity => [0.0, 0.0, 1.0],
            Point64::Finite(z) => {
                let n2 = z.norm_sqr();
                if !n2.is_finite() {
                    return [0.0, 0.0, 1.0];
                }
                let d = 1.0 + n2;
                [2.0 * z.re / d, 2.0 * z.im / d, (n2 - 1.0) / d]
            }
        }
    }

    pub fn chordal(self, other: Point64) -> f64 {
        let a = self.to_unit_sphere();
        let b = other.to_unit_sphere();
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    pub fn abs(self) -> f64 {
        match self {
            Point64::Infinity => f64::INFINITY,
            Point64::Finite(z) => z.norm(),
        }
    }
}
