//! Simultaneous polynomial root finding (Aberth–Ehrlich).
//!
//! The multiprecision solver starts from a double-precision solve when the
//! coefficients fit in f64 and falls back to Newton-polygon starting points
//! otherwise. A root is accepted once its residual reaches the rounding floor
//! of Horner evaluation, which also terminates iteration on multiple roots.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rug::{Assign, Complex, Float};

use crate::error::{Error, Result};

const MAX_ITER_F64: usize = 500;

/// Starting points from the upper convex hull of (i, log|a_i|).
fn newton_polygon_starts(log_abs: &[Option<f64>]) -> Vec<(f64, f64)> {
    let pts: Vec<(usize, f64)> = log_abs
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.map(|l| (i, l)))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut starts = Vec::new();
    for (seg, w) in hull.windows(2).enumerate() {
        let (i, j) = (w[0].0, w[1].0);
        let k = j - i;
        let log_r = (w[0].1 - w[1].1) / k as f64;
        let offset = 0.7 + 1.3 * seg as f64;
        for t in 0..k {
            starts.push((log_r, TAU * t as f64 / k as f64 + offset));
        }
    }
    starts
}

/// Newton ratio p/p' at z, read through the reversed polynomial when |z| > 1
/// so that large roots do not overflow.
fn newton_ratio_f64(c: &[Complex64], z: Complex64) -> (Complex64, f64, f64) {
    let n = c.len() - 1;
    if z.norm() <= 1.0 {
        let (mut p, mut dp, mut bound) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
        let r = z.norm();
        for a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
            bound = bound * r + a.norm();
        }
        (p / dp, p.norm(), bound)
    } else {
        let w = z.inv();
        let r = w.norm();
        let (mut p, mut dp, mut bound) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
        for a in c.iter() {
            dp = dp * w + p;
            p = p * w + a;
            bound = bound * r + a.norm();
        }
        // p(z) = z^n rev(w), p'/p = n w - w^2 rev'/rev
        let ratio = (w * n as f64 - w * w * dp / p).inv();
        (ratio, p.norm(), bound)
    }
}

/// All roots of a polynomial with double-precision coefficients (lowest
/// degree first). Leading zeros are trimmed and exact zero roots are
/// reported as 0.
pub fn roots_f64(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let top = coeffs
        .iter()
        .rposition(|c| *c != Complex64::new(0.0, 0.0))
        .ok_or_else(|| Error::Domain("zero polynomial has no roots".into()))?;
    let low = coeffs.iter().position(|c| *c != Complex64::new(0.0, 0.0)).unwrap();
    let c = &coeffs[low..=top];
    let mut out = vec![Complex64::new(0.0, 0.0); low];
    let n = c.len() - 1;
    if n == 0 {
        return Ok(out);
    }
    if n == 1 {
        out.push(-c[0] / c[1]);
        return Ok(out);
    }
    let logs: Vec<Option<f64>> = c
        .iter()
        .map(|a| (a.norm() > 0.0).then(|| a.norm().ln()))
        .collect();
    let mut z: Vec<Complex64> = newton_polygon_starts(&logs)
        .into_iter()
        .map(|(lr, th)| Complex64::from_polar(lr.exp(), th))
        .collect();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITER_F64 {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (ratio, res, bound) = newton_ratio_f64(c, z[k]);
            if res <= 8.0 * f64::EPSILON * bound {
                done[k] = true;
                continue;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let delta = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !delta.re.is_finite() || !delta.im.is_finite() {
                // coincident iterates; nudge apart
                let bump = Complex64::new(1e-8, 1e-8) * (1.0 + z[k].norm());
                z[k] += bump;
                all = false;
                continue;
            }
            z[k] -= delta;
            if delta.norm() <= 4.0 * f64::EPSILON * z[k].norm() {
                done[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            out.extend(z);
            return Ok(out);
        }
    }
    // accept if every residual is at the noise floor up to a modest factor
    for zk in &z {
        let (_, res, bound) = newton_ratio_f64(c, *zk);
        if !(res <= 1e4 * f64::EPSILON * bound) {
            return Err(Error::PrecisionExhausted(format!(
                "double-precision root finder did not converge (degree {n})"
            )));
        }
    }
    out.extend(z);
    Ok(out)
}

/// All roots of a polynomial with multiprecision coefficients (lowest degree
/// first), computed with `prec + 64` working bits and returned at that
/// precision.
pub fn roots(coeffs: &[Complex], prec: u32) -> Result<Vec<Complex>> {
    let work = prec + 64;
    let top = coeffs
        .iter()
        .rposition(|c| !c.is_zero())
        .ok_or_else(|| Error::Domain("zero polynomial has no roots".into()))?;
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let c: Vec<Complex> = coeffs[low..=top].iter().map(|a| Complex::with_val(work, a)).collect();
    let mut out: Vec<Complex> = (0..low).map(|_| Complex::new(work)).collect();
    let n = c.len() - 1;
    if n == 0 {
        return Ok(out);
    }
    if n == 1 {
        out.push(-Complex::with_val(work, &c[0] / &c[1]));
        return Ok(out);
    }

    let mut z = starting_points(&c, work);
    let abs_c: Vec<Float> = c.iter().map(|a| Float::with_val(work, a.abs_ref())).collect();
    let eps = Float::with_val(work, Float::u_exp(1, -(work as i32)));
    let mut done = vec![false; n];
    let max_iter = 200 + 4 * work as usize;
    let mut p = Complex::new(work);
    let mut dp = Complex::new(work);
    let mut s = Complex::new(work);
    let mut tmp = Complex::new(work);
    for _ in 0..max_iter {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let r = Float::with_val(work, z[k].abs_ref());
            p.assign(0u32);
            dp.assign(0u32);
            let mut bound = Float::new(work);
            for (a, aa) in c.iter().zip(&abs_c).rev() {
                dp *= &z[k];
                dp += &p;
                p *= &z[k];
                p += a;
                bound *= &r;
                bound += aa;
            }
            let res = Float::with_val(work, p.abs_ref());
            if res <= Float::with_val(work, &bound * &eps) * 4u32 * n as u32 {
                done[k] = true;
                continue;
            }
            if dp.is_zero() {
                z[k] += Complex::with_val(work, (Float::u_exp(1, -40), Float::u_exp(1, -40)));
                all = false;
                continue;
            }
            let ratio = Complex::with_val(work, &p / &dp);
            s.assign(0u32);
            for j in 0..n {
                if j != k {
                    tmp.assign(&z[k] - &z[j]);
                    if tmp.is_zero() {
                        continue;
                    }
                    tmp.recip_mut();
                    s += &tmp;
                }
            }
            // Δ = ratio / (1 - ratio·s)
            tmp.assign(&ratio * &s);
            let denom = Complex::with_val(work, 1u32 - &tmp);
            let delta = Complex::with_val(work, &ratio / &denom);
            z[k] -= &delta;
            let dn = Float::with_val(work, delta.abs_ref());
            let zn = Float::with_val(work, z[k].abs_ref());
            if dn <= zn * &eps * 16u32 {
                done[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            out.extend(z);
            return Ok(out);
        }
    }
    Err(Error::PrecisionExhausted(format!(
        "root finder did not reach the residual floor within {max_iter} rounds (degree {n}, {work} bits)"
    )))
}

fn starting_points(c: &[Complex], work: u32) -> Vec<Complex> {
    let n = c.len() - 1;
    // double-precision warm start, scaled so the coefficients fit
    let logs: Vec<Option<f64>> = c
        .iter()
        .map(|a| {
            if a.is_zero() {
                None
            } else {
                Some(Float::with_val(64, a.abs_ref()).ln().to_f64())
            }
        })
        .collect();
    let lmax = logs.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<Complex64> = c
        .iter()
        .zip(&logs)
        .map(|(a, l)| match l {
            None => Complex64::new(0.0, 0.0),
            Some(l) if l - lmax < -700.0 => Complex64::new(0.0, 0.0),
            Some(_) => {
                let b = Complex::with_val(64, a * Float::with_val(64, -lmax).exp());
                Complex64::new(b.real().to_f64(), b.imag().to_f64())
            }
        })
        .collect();
    if scaled.iter().all(|v| v.re.is_finite() && v.im.is_finite()) && scaled[n] != Complex64::new(0.0, 0.0) {
        if let Ok(r) = roots_f64(&scaled) {
            if r.len() == n && r.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                return separate(r)
                    .into_iter()
                    .map(|v| Complex::with_val(work, (v.re, v.im)))
                    .collect();
            }
        }
    }
    newton_polygon_starts(&logs)
        .into_iter()
        .map(|(lr, th)| {
            let r = Float::with_val(work, lr).exp();
            let t = Float::with_val(work, th);
            let (sn, cs) = t.sin_cos(Float::new(work));
            Complex::with_val(work, (Float::with_val(work, &r * &cs), Float::with_val(work, &r * &sn)))
        })
        .collect()
}

/// Perturbs exactly coincident double-precision starts, which would stall
/// the Aberth correction.
fn separate(mut r: Vec<Complex64>) -> Vec<Complex64> {
    for k in 1..r.len() {
        for j in 0..k {
            if r[k] == r[j] {
                let bump = Complex64::new(1e-10, 3e-10) * (1.0 + r[k].norm()) * (k as f64);
                r[k] += bump;
            }
        }
    }
    r
}
