//! Fixed points and multiplier spectra of iterates.

use rayon::prelude::*;
use rug::{Complex, Float};
use serde_json::{json, Value};

use crate::algebra::sphere::complex_json;
use crate::algebra::{EmbeddedMap, RationalMap, SpherePoint};
use crate::error::{Error, Result};
use crate::numeric::roots;

/// Default multiplier tolerance for spectrum comparison.
pub const DEFAULT_TOL: f64 = 1e-12;

/// 10^(-prec·k) as a Float, with `prec` in bits.
fn decimal_tol(prec: u32, k: f64) -> Float {
    let exp = -(prec as f64 * k);
    Float::with_val(prec, exp * std::f64::consts::LN_10).exp()
}

#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub point: SpherePoint,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct SpectrumEntry {
    pub point: SpherePoint,
    pub multiplier: Complex,
    pub multiplicity: usize,
}

/// Fixed points of f^{∘s} with multipliers and multiplicities.
#[derive(Clone, Debug)]
pub struct SpectrumRecord {
    pub s: usize,
    pub degree: usize,
    pub precision: u32,
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumRecord {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Multipliers repeated by multiplicity.
    pub fn multiplier_multiset(&self) -> Vec<Complex> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.multiplier.clone(), e.multiplicity))
            .collect()
    }

    pub fn to_json(&self, digits: usize) -> Value {
        json!({
            "s": self.s,
            "degree": self.degree,
            "total_multiplicity": self.total_multiplicity(),
            "entries": self.entries.iter().map(|e| json!({
                "point": e.point.to_json(digits),
                "multiplier": complex_json(&e.multiplier, digits),
                "multiplicity": e.multiplicity,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Merges roots closer than `tol` in the chordal metric; each cluster is
/// replaced by its mean.
fn cluster(roots: Vec<Complex>, tol: &Float, prec: u32) -> Vec<(Complex, usize)> {
    let mut groups: Vec<Vec<Complex>> = Vec::new();
    for r in roots {
        let p = SpherePoint::Finite(r.clone());
        match groups
            .iter_mut()
            .find(|g| SpherePoint::Finite(g[0].clone()).chordal(&p, prec) < *tol)
        {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let n = g.len();
            let mut sum = Complex::new(prec);
            for z in &g {
                sum += z;
            }
            (sum / n as u32, n)
        })
        .collect()
}

fn iterate_checked(f: &RationalMap, s: usize) -> Result<RationalMap> {
    if f.degree() < 2 {
        return Err(Error::Precondition(format!("degree {} < 2", f.degree())));
    }
    if s < 1 {
        return Err(Error::Domain("iterate order s must be >= 1".into()));
    }
    f.iterate(s)
}

fn fixed_points_of(g: &RationalMap, prec: u32) -> Result<Vec<FixedPoint>> {
    let big_d = g.degree();
    let p = g.num().sub(&g.den().mul(&crate::algebra::Polynomial::z(g.order())));
    let k = p.degree().ok_or_else(|| Error::Domain("identity map has no isolated fixed points".into()))?;
    let found = roots(&p.embed(2 * prec + 64), 2 * prec)?;
    let mut out: Vec<FixedPoint> = cluster(found, &decimal_tol(prec, 0.15), prec)
        .into_iter()
        .map(|(z, multiplicity)| FixedPoint {
            point: SpherePoint::Finite(Complex::with_val(prec, z)),
            multiplicity,
        })
        .collect();
    if k < big_d + 1 {
        out.push(FixedPoint {
            point: SpherePoint::Infinity,
            multiplicity: big_d + 1 - k,
        });
    }

    let eg = EmbeddedMap::new(g, prec);
    let bound = decimal_tol(prec, 0.2);
    for fp in &out {
        let image = eg.eval(&fp.point)?;
        let r = image.chordal(&fp.point, prec);
        if r >= bound {
            return Err(Error::PrecisionExhausted(format!(
                "fixed-point residual {} exceeds {}",
                r.to_f64(),
                bound.to_f64()
            )));
        }
    }
    Ok(out)
}

/// All d^s + 1 fixed points of f^{∘s} on the sphere, with multiplicities.
pub fn fixed_points(f: &RationalMap, s: usize, prec: u32) -> Result<Vec<FixedPoint>> {
    let g = iterate_checked(f, s)?;
    fixed_points_of(&g, prec)
}

/// Multiplier of g at ∞, read from w ↦ 1/g(1/w) at w = 0 exactly.
fn multiplier_at_infinity(g: &RationalMap, prec: u32) -> Result<Complex> {
    let h = g.conjugate_at_infinity()?;
    let (a, b) = (h.num(), h.den());
    // h = a/b with a(0) = 0: h'(0) = a'(0)/b(0)
    let b0 = b.coeff(0);
    if b0.is_zero() {
        return Err(Error::Domain("∞ is not a fixed point".into()));
    }
    Ok(a.coeff(1).div(&b0)?.embed(prec))
}

pub fn multiplier_spectrum(f: &RationalMap, s: usize, prec: u32) -> Result<SpectrumRecord> {
    let g = iterate_checked(f, s)?;
    let points = fixed_points_of(&g, prec)?;
    let work = prec + 64;
    let num = g.num().embed(work);
    let den = g.den().embed(work);
    let dnum = g.num().derivative().embed(work);
    let dden = g.den().derivative().embed(work);
    let mut entries = Vec::with_capacity(points.len());
    for fp in points {
        let multiplier = match &fp.point {
            SpherePoint::Infinity => multiplier_at_infinity(&g, prec)?,
            SpherePoint::Finite(z) => {
                let z = Complex::with_val(work, z);
                let h = |c: &[Complex]| crate::algebra::poly::horner(c, &z, work);
                let (p, q, dp, dq) = (h(&num), h(&den), h(&dnum), h(&dden));
                let top = Complex::with_val(work, &dp * &q) - Complex::with_val(work, &p * &dq);
                Complex::with_val(prec, top / q.square())
            }
        };
        entries.push(SpectrumEntry {
            point: fp.point,
            multiplier,
            multiplicity: fp.multiplicity,
        });
    }
    let record = SpectrumRecord {
        s,
        degree: f.degree(),
        precision: prec,
        entries,
    };
    let expected = f.degree().pow(s as u32) + 1;
    if record.total_multiplicity() != expected {
        return Err(Error::PrecisionExhausted(format!(
            "found {} fixed points of f^{s}, expected {expected}",
            record.total_multiplicity()
        )));
    }
    Ok(record)
}

/// Perfect matching between two equal-size multisets, edges joining values
/// within `tol`; found by augmenting paths.
pub fn multisets_match(a: &[Complex], b: &[Complex], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let adj: Vec<Vec<usize>> = a
        .iter()
        .map(|x| {
            (0..n)
                .filter(|&j| {
                    let prec = x.prec().0.max(b[j].prec().0);
                    Float::with_val(prec, Complex::with_val(prec, x - &b[j]).abs_ref()) <= tol
                })
                .collect()
        })
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    (0..n).all(|i| augment(i, &adj, &mut vec![false; n], &mut owner))
}

/// Multiplier multisets of f^{∘s} and g^{∘s} agree within `tol` for s ≤ smax.
pub fn isospectral(f: &RationalMap, g: &RationalMap, smax: usize, tol: f64, prec: u32) -> Result<bool> {
    if f.degree() != g.degree() {
        return Err(Error::DegreeMismatch(f.degree(), g.degree()));
    }
    if smax < 1 || !(tol > 0.0) {
        return Err(Error::Domain("need smax >= 1 and tol > 0".into()));
    }
    let per_s: Vec<Result<bool>> = (1..=smax)
        .into_par_iter()
        .map(|s| {
            let a = multiplier_spectrum(f, s, prec)?.multiplier_multiset();
            let b = multiplier_spectrum(g, s, prec)?.multiplier_multiset();
            Ok(multisets_match(&a, &b, tol))
        })
        .collect();
    for r in per_s {
        if !r? {
            return Ok(false);
        }
    }
    Ok(true)
}
