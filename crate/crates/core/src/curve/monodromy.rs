use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;
use serde_json::{json, Value};

use super::perm::Perm;
use crate::algebra::{EmbeddedMap, Point64, RationalMap, SpherePoint};
use crate::error::{Error, Result};
use crate::numeric::{roots, roots_f64};

const MAX_BASE_ATTEMPTS: usize = 24;
const MIN_STEP: f64 = 1e-11;
const NEWTON_TOL: f64 = 1e-11;

/// Local monodromy of A around each branch point, seen from a base fiber.
#[derive(Clone, Debug)]
pub struct MonodromyData {
    pub base: Complex64,
    /// Branch values in loop order; ∞ comes last when it is one.
    pub branch_points: Vec<Point64>,
    pub permutations: Vec<Perm>,
    pub fiber: Vec<Complex64>,
    pub fiber_size: usize,
    /// Base points rejected before this one succeeded.
    pub reseeds: usize,
}

impl MonodromyData {
    /// σ_1 then σ_2 … then σ_r; the identity for a complete loop basis.
    pub fn product(&self) -> Perm {
        self.permutations
            .iter()
            .fold(Perm::identity(self.fiber_size), |acc, s| acc.then(s))
    }

    pub fn to_json(&self) -> Value {
        let c = |z: Complex64| json!({"re": z.re, "im": z.im});
        json!({
            "base": c(self.base),
            "fiber_size": self.fiber_size,
            "fiber": self.fiber.iter().map(|&z| c(z)).collect::<Vec<_>>(),
            "branch_points": self.branch_points.iter().map(|p| match p {
                Point64::Infinity => json!("infinity"),
                Point64::Finite(z) => c(*z),
            }).collect::<Vec<_>>(),
            "permutations": self.permutations,
            "reseeds": self.reseeds,
        })
    }
}

/// The pencil p(z) − w·q(z), read in the chart z or u = 1/z.
struct Pencil {
    p: Vec<Complex64>,
    q: Vec<Complex64>,
    pr: Vec<Complex64>,
    qr: Vec<Complex64>,
}

fn horner2(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let (mut v, mut dv) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for a in c.iter().rev() {
        dv = dv * z + v;
        v = v * z + a;
    }
    (v, dv)
}

impl Pencil {
    fn new(a: &RationalMap) -> Self {
        let d = a.degree();
        let pad = |mut v: Vec<Complex64>| {
            v.resize(d + 1, Complex64::new(0.0, 0.0));
            v
        };
        let p = pad(a.num().embed_f64());
        let q = pad(a.den().embed_f64());
        let pr = p.iter().rev().copied().collect();
        let qr = q.iter().rev().copied().collect();
        Pencil { p, q, pr, qr }
    }

    fn chart(&self, z: Complex64) -> (bool, Complex64) {
        if z.norm() <= 1.0 {
            (false, z)
        } else {
            (true, z.inv())
        }
    }

    /// (g, g', q) in the given chart.
    fn eval(&self, inverted: bool, x: Complex64, w: Complex64) -> (Complex64, Complex64, Complex64) {
        let (p, q) = if inverted { (&self.pr, &self.qr) } else { (&self.p, &self.q) };
        let (pv, dp) = horner2(p, x);
        let (qv, dq) = horner2(q, x);
        (pv - w * qv, dp - w * dq, qv)
    }

    /// One predictor-corrector step of a single root from w0 to w1, in the
    /// chart of the starting point. None when Newton fails to contract.
    fn step(&self, z: Complex64, w0: Complex64, w1: Complex64) -> Option<Complex64> {
        let (inv, mut x) = self.chart(z);
        let (_, dg, qv) = self.eval(inv, x, w0);
        x += (w1 - w0) * qv / dg;
        let mut last = f64::INFINITY;
        for _ in 0..8 {
            let (g, dg, _) = self.eval(inv, x, w1);
            let delta = g / dg;
            let size = delta.norm();
            if !size.is_finite() {
                return None;
            }
            if last.is_finite() && size > 0.1 * last && last > NEWTON_TOL {
                return None;
            }
            x -= delta;
            if size <= NEWTON_TOL * x.norm().max(1.0) {
                return Some(if inv { x.inv() } else { x });
            }
            last = size;
        }
        None
    }
}

#[derive(Clone, Copy, Debug)]
enum Segment {
    Line(Complex64, Complex64),
    Arc { center: Complex64, radius: f64, start: f64 },
}

impl Segment {
    fn at(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line(a, b) => a + (b - a) * t,
            Segment::Arc { center, radius, start } => center + Complex64::from_polar(radius, start + TAU * t),
        }
    }
}

fn chordal(a: Complex64, b: Complex64) -> f64 {
    Point64::Finite(a).chordal(Point64::Finite(b))
}

fn track(pencil: &Pencil, path: &[Segment], start: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut z = start.to_vec();
    let n = z.len();
    for seg in path {
        let (mut t, mut h) = (0.0f64, 0.02f64);
        while t < 1.0 {
            h = h.min(1.0 - t);
            let (w0, w1) = (seg.at(t), seg.at(t + h));
            let next: Option<Vec<Complex64>> = z.iter().map(|&zk| pencil.step(zk, w0, w1)).collect();
            let ok = next.as_ref().is_some_and(|next| {
                (0..n).all(|k| {
                    let sep = (0..n)
                        .filter(|&j| j != k)
                        .map(|j| chordal(z[j], z[k]))
                        .fold(f64::INFINITY, f64::min);
                    chordal(next[k], z[k]) < 0.3 * sep
                })
            });
            if ok {
                z = next.unwrap();
                t += h;
                h = (h * 1.5).min(0.1);
            } else {
                h *= 0.5;
                if h < MIN_STEP {
                    return Err(Error::PathCrossing(format!("step size underflow near w = {w0}")));
                }
            }
        }
    }
    Ok(z)
}

/// σ(i) = index of the fiber point where the path from fiber[i] ends.
fn match_fiber(fiber: &[Complex64], end: &[Complex64]) -> Result<Perm> {
    let mut images = Vec::with_capacity(fiber.len());
    for &e in end {
        let (j, dist) = fiber
            .iter()
            .enumerate()
            .map(|(j, &f)| (j, chordal(e, f)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if dist > 1e-7 {
            return Err(Error::PathCrossing(format!("loop ends {dist:e} away from the fiber")));
        }
        images.push(j as u32);
    }
    Perm::from_images(images).map_err(|_| Error::PathCrossing("two paths ended at the same point".into()))
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let t = ((p - a) * ab.conj()).re / ab.norm_sqr();
    (p - (a + ab * t.clamp(0.0, 1.0))).norm()
}

/// Finite punctures of the w-plane and whether ∞ is a branch value.
struct Punctures {
    branch: Vec<Complex64>,
    /// A(∞) when finite and unbranched; its loop must act trivially.
    regular: Option<Complex64>,
    infinity_branches: bool,
}

fn punctures(a: &RationalMap, prec: u32) -> Result<Punctures> {
    let d = a.degree();
    let (p, q) = (a.num(), a.den());
    let w = p.derivative().mul(q).sub(&p.mul(&q.derivative()));
    let deg_w = w.degree().ok_or_else(|| Error::Precondition("constant map".into()))?;
    let ea = EmbeddedMap::new(a, prec);
    let mut values: Vec<SpherePoint> = Vec::new();
    for c in roots(&w.embed(prec + 64), prec)? {
        values.push(ea.eval(&SpherePoint::Finite(c))?);
    }
    if 2 * d - 2 > deg_w {
        values.push(ea.eval(&SpherePoint::Infinity)?);
    }
    let tol = Float::with_val(prec, -(prec as f64) * 0.1 * std::f64::consts::LN_10).exp();
    let mut distinct: Vec<SpherePoint> = Vec::new();
    for v in values {
        if !distinct.iter().any(|u| u.chordal(&v, prec) < tol) {
            distinct.push(v);
        }
    }
    let at_inf = ea.eval(&SpherePoint::Infinity)?;
    let regular = if distinct.iter().any(|u| u.chordal(&at_inf, prec) < tol) {
        None
    } else {
        match at_inf.to_f64() {
            Point64::Finite(z) => Some(z),
            Point64::Infinity => None,
        }
    };
    let mut branch = Vec::new();
    let mut infinity_branches = false;
    for v in distinct {
        match v.to_f64() {
            Point64::Finite(z) => branch.push(z),
            Point64::Infinity => infinity_branches = true,
        }
    }
    Ok(Punctures {
        branch,
        regular,
        infinity_branches,
    })
}

struct Layout {
    base: Complex64,
    /// (puncture index, path) in counterclockwise order from `theta0`.
    loops: Vec<(usize, Vec<Segment>)>,
    big: Vec<Segment>,
}

fn layout(points: &[Complex64], rng: &mut ChaCha8Rng) -> Result<Layout> {
    let n = points.len() as f64;
    let center = points.iter().sum::<Complex64>() / n;
    let spread = points.iter().map(|p| (p - center).norm()).fold(1.0, f64::max);
    let base = center + Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * spread;

    let nearest = |i: usize| {
        points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, q)| (q - points[i]).norm())
            .fold((points[i] - base).norm(), f64::min)
    };
    let radius: Vec<f64> = (0..points.len()).map(|i| 0.25 * nearest(i)).collect();
    if points.iter().any(|p| (p - base).norm() < 0.02 * spread) {
        return Err(Error::DegenerateBase(format!("{base} is too close to a branch point")));
    }
    let clear = |a: Complex64, b: Complex64, skip: Option<usize>| {
        (0..points.len())
            .filter(|&j| Some(j) != skip)
            .all(|j| segment_distance(points[j], a, b) > radius[j])
    };

    let mut angles: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| ((p - base).arg().rem_euclid(TAU), i))
        .collect();
    angles.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut gap, mut theta0) = (0.0, 0.0);
    for k in 0..angles.len() {
        let here = angles[k].0;
        let next = if k + 1 < angles.len() { angles[k + 1].0 } else { angles[0].0 + TAU };
        if next - here > gap {
            gap = next - here;
            theta0 = here + 0.5 * gap;
        }
    }
    if angles.len() > 1 && gap < 1e-6 {
        return Err(Error::DegenerateBase("no free direction from the base point".into()));
    }
    if angles.len() == 1 {
        theta0 = angles[0].0 + PI;
    }

    let mut order: Vec<(f64, usize)> = angles
        .iter()
        .map(|&(a, i)| ((a - theta0).rem_euclid(TAU), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut loops = Vec::new();
    for &(_, i) in &order {
        let b = points[i];
        let dir = (base - b) / (base - b).norm();
        let s = b + dir * radius[i];
        if !clear(base, s, Some(i)) {
            return Err(Error::DegenerateBase(format!("path from {base} to {b} grazes another branch point")));
        }
        let arc = Segment::Arc {
            center: b,
            radius: radius[i],
            start: dir.arg(),
        };
        loops.push((i, vec![Segment::Line(base, s), arc, Segment::Line(s, base)]));
    }

    let reach = points.iter().map(|p| (p - base).norm()).fold(0.0, f64::max);
    let big_r = 1.5 * reach + 0.5 * spread;
    let out = base + Complex64::from_polar(big_r, theta0);
    if !clear(base, out, None) {
        return Err(Error::DegenerateBase("outer loop grazes a branch point".into()));
    }
    let big = vec![
        Segment::Line(base, out),
        Segment::Arc {
            center: base,
            radius: big_r,
            start: theta0,
        },
        Segment::Line(out, base),
    ];
    Ok(Layout { base, loops, big })
}

fn attempt(a: &RationalMap, pencil: &Pencil, pts: &Punctures, rng: &mut ChaCha8Rng) -> Result<MonodromyData> {
    let d = a.degree();
    let mut all = pts.branch.clone();
    all.extend(pts.regular);
    let lay = layout(&all, rng)?;

    let coeffs: Vec<Complex64> = pencil.p.iter().zip(&pencil.q).map(|(p, q)| p - lay.base * q).collect();
    let mut fiber = roots_f64(&coeffs)?;
    if fiber.len() != d {
        return Err(Error::DegenerateBase(format!("fiber over {} has {} points", lay.base, fiber.len())));
    }
    for z in fiber.iter_mut() {
        *z = pencil.step(*z, lay.base, lay.base).unwrap_or(*z);
    }

    let mut paths: Vec<&[Segment]> = lay.loops.iter().map(|(_, p)| p.as_slice()).collect();
    paths.push(&lay.big);
    let perms: Vec<Perm> = paths
        .par_iter()
        .map(|path| track(pencil, path, &fiber).and_then(|end| match_fiber(&fiber, &end)))
        .collect::<Result<_>>()?;
    let (big, local) = perms.split_last().unwrap();

    let product = local.iter().fold(Perm::identity(d), |acc, s| acc.then(s));
    if product != *big {
        return Err(Error::PathCrossing("loop product differs from the outer loop".into()));
    }

    let mut data = MonodromyData {
        base: lay.base,
        branch_points: Vec::new(),
        permutations: Vec::new(),
        fiber,
        fiber_size: d,
        reseeds: 0,
    };
    for ((i, _), sigma) in lay.loops.iter().zip(local) {
        if *i >= pts.branch.len() {
            if !sigma.is_identity() {
                return Err(Error::PathCrossing("nontrivial monodromy around a regular value".into()));
            }
            continue;
        }
        data.branch_points.push(Point64::Finite(all[*i]));
        data.permutations.push(sigma.clone());
    }
    let at_inf = big.inverse();
    if pts.infinity_branches {
        data.branch_points.push(Point64::Infinity);
        data.permutations.push(at_inf);
    } else if !at_inf.is_identity() {
        return Err(Error::PathCrossing("nontrivial monodromy at an unbranched ∞".into()));
    }
    Ok(data)
}

/// Monodromy of A around its critical values by homotopy continuation of
/// the fiber A(z) = w from a seeded generic base point.
pub fn monodromy(a: &RationalMap, prec: u32, seed: u64) -> Result<MonodromyData> {
    if a.degree() < 2 {
        return Err(Error::Precondition(format!("degree {} < 2", a.degree())));
    }
    let pts = punctures(a, prec)?;
    let pencil = Pencil::new(a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for reseeds in 0..MAX_BASE_ATTEMPTS {
        match attempt(a, &pencil, &pts, &mut rng) {
            Ok(mut data) => {
                if reseeds > 0 {
                    log::info!("monodromy base point accepted after {reseeds} reseeds");
                }
                data.reseeds = reseeds;
                return Ok(data);
            }
            Err(e @ (Error::DegenerateBase(_) | Error::PathCrossing(_))) => {
                log::debug!("rejecting base point: {e}");
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}
