//! Möbius symmetries A∘η = A and Möbius relations X = η∘Y, X = Y∘η.
//!
//! Candidates come from fibers over random base values: a Möbius map is
//! fixed by three point correspondences, so mapping one point of each of
//! three fibers to every choice in the matching fiber gives d³ candidates.
//! Survivors of a numeric check on further fibers are recognized as exact
//! coefficients and certified by composition.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float, Rational};
use serde::Serialize;

use crate::algebra::{EmbeddedMap, MobiusMap, RationalMap, SpherePoint};
use crate::error::{Error, Result};
use crate::numeric::{recognize, roots};

const BASE_SEED: u64 = 0x5eed_f1be;
const FIBERS: usize = 5;
const MAX_DRAWS: usize = 64;

/// Which side η sits on relative to Y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// X = η∘Y
    Pre,
    /// X = Y∘η
    Post,
}

fn random_value(rng: &mut ChaCha8Rng, prec: u32) -> Complex {
    let mut part = || {
        let p: i64 = rng.gen_range(-60..=60);
        let q: i64 = rng.gen_range(1..=13);
        Float::with_val(prec, Rational::from((p, q)))
    };
    let re = part();
    let im = part();
    Complex::with_val(prec, (re, im))
}

fn embed(f: &RationalMap, prec: u32) -> (Vec<Complex>, Vec<Complex>) {
    (f.num().embed(prec + 32), f.den().embed(prec + 32))
}

fn separation_tol(prec: u32) -> Float {
    Float::with_val(prec, Float::u_exp(1, -((prec / 4) as i32)))
}

/// The d finite preimages of w, or `None` if w is too close to a critical
/// value or to A(∞).
fn fiber(pq: &(Vec<Complex>, Vec<Complex>), d: usize, w: &Complex, prec: u32) -> Result<Option<Vec<Complex>>> {
    let work = prec + 32;
    let (num, den) = pq;
    let poly: Vec<Complex> = (0..=d)
        .map(|i| {
            let mut c = Complex::new(work);
            if let Some(n) = num.get(i) {
                c += n;
            }
            if let Some(q) = den.get(i) {
                c -= Complex::with_val(work, q * w);
            }
            c
        })
        .collect();
    let scale = poly
        .iter()
        .map(|c| Float::with_val(work, c.abs_ref()))
        .fold(Float::new(work), |a, b| a.max(&b));
    if Float::with_val(work, poly[d].abs_ref()) < scale * separation_tol(prec) {
        return Ok(None);
    }
    let r = roots(&poly, prec)?;
    let tol = separation_tol(prec);
    for i in 0..r.len() {
        for j in 0..i {
            let gap = Float::with_val(prec, Complex::with_val(prec, &r[i] - &r[j]).abs_ref());
            if gap < tol {
                return Ok(None);
            }
        }
    }
    Ok(Some(r))
}

/// Fibers of each map over the same generic base values.
fn common_fibers(maps: &[&RationalMap], prec: u32) -> Result<Vec<Vec<Vec<Complex>>>> {
    let d = maps[0].degree();
    let embedded: Vec<_> = maps.iter().map(|f| embed(f, prec)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED);
    let mut out = vec![Vec::new(); maps.len()];
    for _ in 0..MAX_DRAWS {
        let w = random_value(&mut rng, prec + 32);
        let mut got = Vec::new();
        for e in &embedded {
            match fiber(e, d, &w, prec)? {
                Some(f) => got.push(f),
                None => break,
            }
        }
        if got.len() == maps.len() {
            for (o, f) in out.iter_mut().zip(got) {
                o.push(f);
            }
            if out[0].len() == FIBERS {
                return Ok(out);
            }
        }
    }
    Err(Error::DegenerateBase(format!(
        "no {FIBERS} generic base values found in {MAX_DRAWS} draws"
    )))
}

/// 2×2 matrix (a, b, c, d) of z ↦ (az+b)/(cz+d).
type M2 = [Complex; 4];

fn m2_mul(x: &M2, y: &M2, prec: u32) -> M2 {
    let e = |p: &Complex, q: &Complex, r: &Complex, s: &Complex| {
        Complex::with_val(prec, p * q) + Complex::with_val(prec, r * s)
    };
    [
        e(&x[0], &y[0], &x[1], &y[2]),
        e(&x[0], &y[1], &x[1], &y[3]),
        e(&x[2], &y[0], &x[3], &y[2]),
        e(&x[2], &y[1], &x[3], &y[3]),
    ]
}

/// The map sending z1, z2, z3 to 0, 1, ∞.
fn to_standard(z: [&Complex; 3], prec: u32) -> M2 {
    let d23 = Complex::with_val(prec, z[1] - z[2]);
    let d21 = Complex::with_val(prec, z[1] - z[0]);
    [
        d23.clone(),
        -Complex::with_val(prec, z[0] * &d23),
        d21.clone(),
        -Complex::with_val(prec, z[2] * &d21),
    ]
}

/// The Möbius map with zᵢ ↦ yᵢ.
fn through_points(z: [&Complex; 3], y: [&Complex; 3], prec: u32) -> M2 {
    let s = to_standard(z, prec);
    let t = to_standard(y, prec);
    let t_inv = [t[3].clone(), -t[1].clone(), -t[2].clone(), t[0].clone()];
    m2_mul(&t_inv, &s, prec)
}

fn to_c64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

fn apply64(m: &[Complex64; 4], z: Complex64) -> Option<Complex64> {
    let den = m[2] * z + m[3];
    (den.norm() > 1e-300).then(|| (m[0] * z + m[1]) / den)
}

fn apply(m: &M2, z: &Complex, prec: u32) -> Option<Complex> {
    let den = Complex::with_val(prec, &m[2] * z) + &m[3];
    if den.is_zero() {
        return None;
    }
    let num = Complex::with_val(prec, &m[0] * z) + &m[1];
    Some(Complex::with_val(prec, num / den))
}

/// Does η map every source fiber into the matching target fiber?
fn maps_fibers(m: &M2, src: &[Vec<Complex>], dst: &[Vec<Complex>], prec: u32) -> bool {
    let m64 = [to_c64(&m[0]), to_c64(&m[1]), to_c64(&m[2]), to_c64(&m[3])];
    let dst64: Vec<Vec<Complex64>> = dst.iter().map(|f| f.iter().map(to_c64).collect()).collect();
    for (s, t) in src.iter().zip(&dst64) {
        for z in s {
            let Some(y) = apply64(&m64, to_c64(z)) else { return false };
            if !t.iter().any(|p| (y - p).norm() <= 1e-7 * (1.0 + p.norm())) {
                return false;
            }
        }
    }
    let tol = Float::with_val(prec, Float::u_exp(1, -((prec / 3) as i32)));
    for (s, t) in src.iter().zip(dst) {
        for z in s {
            let Some(y) = apply(m, z, prec) else { return false };
            let close = t.iter().any(|p| {
                let gap = Float::with_val(prec, Complex::with_val(prec, &y - p).abs_ref());
                let scale = Float::with_val(prec, p.abs_ref()) + 1u32;
                gap <= Float::with_val(prec, &tol * &scale)
            });
            if !close {
                return false;
            }
        }
    }
    true
}

fn is_affine(m: &M2, prec: u32) -> bool {
    let tol = Float::with_val(prec, Float::u_exp(1, -((prec / 3) as i32)));
    let c = Float::with_val(prec, m[2].abs_ref());
    let d = Float::with_val(prec, m[3].abs_ref());
    c <= d * tol
}

/// Exact Möbius map with the given numeric matrix, if its coefficients are
/// recognizable.
fn recognize_mobius(m: &M2, order: u32, prec: u32) -> Option<MobiusMap> {
    let affine = is_affine(m, prec);
    let pivot = if affine { &m[3] } else { &m[2] };
    let norm: Vec<Complex> = m.iter().map(|x| Complex::with_val(prec, x / pivot)).collect();
    let mut exact = Vec::with_capacity(4);
    for (i, x) in norm.iter().enumerate() {
        if affine && i == 2 {
            exact.push(crate::algebra::CycElement::zero(order));
        } else {
            exact.push(recognize(x, order, prec)?);
        }
    }
    let [a, b, c, d]: [_; 4] = exact.try_into().ok()?;
    MobiusMap::from_coefficients(a, b, c, d).ok()
}

/// Candidate matrices sending src[t][0] ↦ dst[t][·] for the first three fibers.
fn candidates(src: &[Vec<Complex>], dst: &[Vec<Complex>], prec: u32) -> Vec<M2> {
    let d = dst[0].len();
    let mut out = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let m = through_points(
                    [&src[0][0], &src[1][0], &src[2][0]],
                    [&dst[0][i], &dst[1][j], &dst[2][k]],
                    prec,
                );
                let det = Complex::with_val(prec, &m[0] * &m[3]) - Complex::with_val(prec, &m[1] * &m[2]);
                if !det.is_zero() && maps_fibers(&m, src, dst, prec) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// All Möbius η with A∘η = A, each certified exactly.
pub fn find_symmetries(a: &RationalMap, prec: u32) -> Result<Vec<MobiusMap>> {
    if a.degree() < 2 {
        return Err(Error::Precondition("symmetry search needs degree >= 2".into()));
    }
    let fibers = common_fibers(&[a], prec)?.remove(0);
    let mut out: Vec<MobiusMap> = Vec::new();
    for m in candidates(&fibers, &fibers, prec) {
        let eta = recognize_mobius(&m, a.order(), prec).ok_or_else(|| {
            Error::Certification("a numeric symmetry has no recognizable exact coefficients".into())
        })?;
        if a.compose(eta.as_map())? != *a {
            return Err(Error::Certification(format!("numeric symmetry {eta} fails A∘η = A")));
        }
        if !out.contains(&eta) {
            out.push(eta);
        }
    }
    Ok(out)
}

/// A Möbius η with X = Y∘η (tried first) or X = η∘Y, certified exactly.
pub fn relate_by_mobius(x: &RationalMap, y: &RationalMap, prec: u32) -> Result<Option<(MobiusMap, Side)>> {
    if x == y {
        return Ok(Some((MobiusMap::identity(x.order()), Side::Post)));
    }
    if x.degree() != y.degree() || x.degree() < 1 {
        return Ok(None);
    }
    let order = crate::algebra::cyclotomic::lcm_u32(x.order(), y.order());

    // post side: η carries X-fibers onto Y-fibers
    let f = common_fibers(&[x, y], prec)?;
    let mut cands = candidates(&f[0], &f[1], prec);
    cands.sort_by_key(|m| !is_affine(m, prec));
    for m in &cands {
        if let Some(eta) = recognize_mobius(m, order, prec) {
            if y.compose(eta.as_map())? == *x {
                return Ok(Some((eta, Side::Post)));
            }
        }
    }

    // pre side: η(Y(p)) = X(p) at generic p
    let ex = EmbeddedMap::new(x, prec);
    let ey = EmbeddedMap::new(y, prec);
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED ^ 1);
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for _ in 0..MAX_DRAWS {
        let p = SpherePoint::Finite(random_value(&mut rng, prec));
        let (SpherePoint::Finite(yv), SpherePoint::Finite(xv)) = (ey.eval(&p)?, ex.eval(&p)?) else {
            continue;
        };
        let tol = separation_tol(prec);
        if src.iter().any(|s: &Vec<Complex>| {
            Float::with_val(prec, Complex::with_val(prec, &s[0] - &yv).abs_ref()) < tol
        }) {
            continue;
        }
        src.push(vec![yv]);
        dst.push(vec![xv]);
        if src.len() == FIBERS {
            break;
        }
    }
    if src.len() < FIBERS {
        return Err(Error::DegenerateBase("no generic sample points for the pre-side search".into()));
    }
    for m in candidates(&src, &dst, prec) {
        if let Some(eta) = recognize_mobius(&m, order, prec) {
            if eta.as_map().compose(y)? == *x {
                return Ok(Some((eta, Side::Pre)));
            }
        }
    }
    Ok(None)
}

/// Whether C(X₁,…,Xₙ) = C(z).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldGeneration {
    Yes,
    No,
    Undetermined,
}

/// Decides C(X₁,…,Xₙ) = C(z) in the cases a symmetry computation settles.
///
/// The index [C(z) : C(X₁,…,Xₙ)] divides every deg Xᵢ, so a gcd of 1 settles
/// it. A nontrivial Möbius η fixing every Xᵢ shows the field is proper. If
/// every Xᵢ is Galois (|Aut Xᵢ| = deg Xᵢ) the field is the fixed field of the
/// intersection of the groups.
pub fn generates_rational_field(xs: &[RationalMap], prec: u32) -> Result<FieldGeneration> {
    if xs.is_empty() {
        return Err(Error::Precondition("no maps given".into()));
    }
    if xs.iter().any(|x| x.degree() == 0) && xs.iter().all(|x| x.degree() == 0) {
        return Ok(FieldGeneration::No);
    }
    let g = xs
        .iter()
        .filter(|x| x.degree() > 0)
        .fold(0usize, |g, x| gcd(g, x.degree()));
    if g == 1 {
        return Ok(FieldGeneration::Yes);
    }
    let nonconst: Vec<&RationalMap> = xs.iter().filter(|x| x.degree() > 0).collect();
    let groups = nonconst
        .iter()
        .map(|x| find_symmetries(x, prec))
        .collect::<Result<Vec<_>>>()?;
    let common: Vec<&MobiusMap> = groups[0]
        .iter()
        .filter(|eta| groups[1..].iter().all(|g| g.contains(eta)))
        .collect();
    if common.iter().any(|eta| !eta.is_identity()) {
        return Ok(FieldGeneration::No);
    }
    if nonconst.iter().zip(&groups).all(|(x, g)| g.len() == x.degree()) {
        return Ok(FieldGeneration::Yes);
    }
    Ok(FieldGeneration::Undetermined)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
