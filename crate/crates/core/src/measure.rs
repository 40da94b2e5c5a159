//! Monte-Carlo approximation of the measure of maximal entropy by balanced
//! backward iteration.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Point64, RationalMap};
use crate::error::{Error, Result};
use crate::numeric::roots_f64;

pub const DEFAULT_BURN_IN: usize = 40;
pub const DEFAULT_GRID: (usize, usize) = (64, 128);

const RESIDUAL_TOL: f64 = 1e-6;
const MAX_FAILURE_RATE: f64 = 0.01;

/// Equal-area grid on the sphere: `bands` slices uniform in the height
/// coordinate (band 0 contains z = 0) times `sectors` slices in argument.
/// Sector 0 is centred on the positive real axis and points within 1e-9 of a
/// band's upper edge count in the band above, so measures carried by the
/// real line or the unit circle do not straddle cell boundaries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bands: usize,
    pub sectors: usize,
    /// Row-major by band.
    pub weights: Vec<f64>,
}

impl Histogram {
    pub fn cell(&self, p: Point64) -> usize {
        let [x, y, h] = p.to_unit_sphere();
        let band = (((h + 1.0) / 2.0 * self.bands as f64 + 1e-9) as usize).min(self.bands - 1);
        let sector = ((y.atan2(x).rem_euclid(TAU) / TAU * self.sectors as f64 + 0.5) as usize) % self.sectors;
        band * self.sectors + sector
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn band_weight(&self, band: usize) -> f64 {
        self.weights[band * self.sectors..(band + 1) * self.sectors].iter().sum()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub degree: usize,
    pub samples: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Chains restarted after a failed preimage solve.
    pub failures: usize,
    pub histogram: Histogram,
    #[serde(skip)]
    pub points: Vec<Point64>,
}

impl EmpiricalMeasure {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("measure serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedJson {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        })
    }
}

struct Preimages {
    p: Vec<Complex64>,
    q: Vec<Complex64>,
    degree: usize,
}

impl Preimages {
    fn new(f: &RationalMap) -> Self {
        let d = f.degree();
        let pad = |mut v: Vec<Complex64>| {
            v.resize(d + 1, Complex64::new(0.0, 0.0));
            v
        };
        Preimages {
            p: pad(f.num().embed_f64()),
            q: pad(f.den().embed_f64()),
            degree: d,
        }
    }

    fn eval(&self, z: Point64) -> Point64 {
        let h = |c: &[Complex64], z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
        match z {
            Point64::Infinity => {
                let (a, b) = (self.p[self.degree], self.q[self.degree]);
                if b == Complex64::new(0.0, 0.0) {
                    Point64::Infinity
                } else {
                    Point64::Finite(a / b)
                }
            }
            Point64::Finite(z) if z.norm() > 1.0 => {
                let w = z.inv();
                let rev = |c: &[Complex64]| c.iter().fold(Complex64::new(0.0, 0.0), |acc, a| acc * w + a);
                let (a, b) = (rev(&self.p), rev(&self.q));
                if b == Complex64::new(0.0, 0.0) {
                    Point64::Infinity
                } else {
                    Point64::Finite(a / b)
                }
            }
            Point64::Finite(z) => {
                let b = h(&self.q, z);
                if b == Complex64::new(0.0, 0.0) {
                    Point64::Infinity
                } else {
                    Point64::Finite(h(&self.p, z) / b)
                }
            }
        }
    }

    /// All d preimages of w, with ∞ repeated by its multiplicity.
    fn solve(&self, w: Point64) -> Result<Vec<Point64>> {
        let coeffs: Vec<Complex64> = match w {
            Point64::Infinity => self.q.clone(),
            Point64::Finite(w) => self.p.iter().zip(&self.q).map(|(a, b)| a - w * b).collect(),
        };
        let mut out: Vec<Point64> = roots_f64(&coeffs)?.into_iter().map(Point64::Finite).collect();
        out.resize(self.degree, Point64::Infinity);
        Ok(out)
    }

    fn step(&self, w: Point64, rng: &mut ChaCha8Rng) -> Option<Point64> {
        let pre = self.solve(w).ok()?;
        let z = pre[rng.gen_range(0..self.degree)];
        (self.eval(z).chordal(w) < RESIDUAL_TOL).then_some(z)
    }

    fn distinct_preimages(&self, w: Point64) -> usize {
        let pre = self.solve(w).unwrap_or_default();
        let mut reps: Vec<Point64> = Vec::new();
        for z in pre {
            if !reps.iter().any(|r| r.chordal(z) < 1e-6) {
                reps.push(z);
            }
        }
        reps.len()
    }
}

/// 2 + i, moved off the exceptional set if it lies on it. Exceptional
/// points are totally invariant, so their forward orbit returns within two
/// steps and each has a single preimage.
fn start_point(pre: &Preimages) -> Point64 {
    let mut z0 = Complex64::new(2.0, 1.0);
    for k in 0..8 {
        let p = Point64::Finite(z0);
        let mut orbit = vec![p];
        for _ in 0..10 {
            orbit.push(pre.eval(*orbit.last().unwrap()));
        }
        let returns = orbit[1..=2].iter().any(|q| q.chordal(p) < 1e-9);
        if !(returns && pre.distinct_preimages(p) == 1) {
            return p;
        }
        log::info!("start point {z0} is exceptional; moving it");
        z0 += Complex64::new(0.1, 0.07) * (k + 1) as f64;
    }
    Point64::Finite(z0)
}

/// Samples μ_f by running `n` independent backward chains of length
/// `burn_in`; chain k draws from stream k of a ChaCha generator seeded by `seed`.
pub fn sample_backward(
    f: &RationalMap,
    n: usize,
    burn_in: usize,
    seed: u64,
    grid: (usize, usize),
) -> Result<EmpiricalMeasure> {
    if f.degree() < 2 {
        return Err(Error::Precondition(format!("degree {} < 2", f.degree())));
    }
    if n == 0 || burn_in == 0 || grid.0 == 0 || grid.1 == 0 {
        return Err(Error::Domain("samples, burn-in and grid sizes must be positive".into()));
    }
    let pre = Preimages::new(f);
    let start = start_point(&pre);
    let max_failures = (MAX_FAILURE_RATE * n as f64).floor() as usize;
    let chains: Vec<(Point64, usize)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut failures = 0;
            'chain: loop {
                let mut z = start;
                for _ in 0..burn_in {
                    match pre.step(z, &mut rng) {
                        Some(next) => z = next,
                        None => {
                            failures += 1;
                            if failures > max_failures {
                                return (z, failures);
                            }
                            continue 'chain;
                        }
                    }
                }
                return (z, failures);
            }
        })
        .collect();

    let failures: usize = chains.iter().map(|c| c.1).sum();
    if failures > max_failures {
        return Err(Error::Sampling(format!(
            "{failures} failed preimage solves in {n} chains exceeds the 1% limit"
        )));
    }
    if failures > 0 {
        log::warn!("{failures} chains restarted after failed preimage solves");
    }
    let mut histogram = Histogram {
        bands: grid.0,
        sectors: grid.1,
        weights: vec![0.0; grid.0 * grid.1],
    };
    let mut counts = vec![0u64; grid.0 * grid.1];
    for (p, _) in &chains {
        counts[histogram.cell(*p)] += 1;
    }
    histogram.weights = counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(EmpiricalMeasure {
        degree: f.degree(),
        samples: n,
        burn_in,
        seed,
        failures,
        histogram,
        points: chains.into_iter().map(|c| c.0).collect(),
    })
}

/// L1 distance between the histograms, in [0, 2].
pub fn measure_distance(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<f64> {
    let (ha, hb) = (&a.histogram, &b.histogram);
    if (ha.bands, ha.sectors) != (hb.bands, hb.sectors) {
        return Err(Error::GridMismatch((ha.bands, ha.sectors), (hb.bands, hb.sectors)));
    }
    Ok(ha.weights.iter().zip(&hb.weights).map(|(x, y)| (x - y).abs()).sum())
}

/// Distance between two independent samplings of the same map.
pub fn noise_floor(f: &RationalMap, n: usize, burn_in: usize, seeds: (u64, u64), grid: (usize, usize)) -> Result<f64> {
    let a = sample_backward(f, n, burn_in, seeds.0, grid)?;
    let b = sample_backward(f, n, burn_in, seeds.1, grid)?;
    measure_distance(&a, &b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Png,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "png" => Ok(ExportFormat::Png),
            _ => Err(Error::Domain(format!("unknown format `{s}` (expected csv or png)"))),
        }
    }
}

/// csv: rows (band, sector, weight). png: grayscale, one pixel per cell,
/// band 0 on the top row, brightness linear in weight.
pub fn export_histogram(m: &EmpiricalMeasure, format: ExportFormat, path: &Path) -> Result<()> {
    let h = &m.histogram;
    match format {
        ExportFormat::Csv => {
            let file = std::fs::File::create(path)?;
            let mut w = csv::Writer::from_writer(file);
            w.write_record(["band", "sector", "weight"]).map_err(csv_err)?;
            for band in 0..h.bands {
                for sector in 0..h.sectors {
                    let weight = h.weights[band * h.sectors + sector];
                    w.write_record([band.to_string(), sector.to_string(), format!("{weight:e}")])
                        .map_err(csv_err)?;
                }
            }
            w.flush()?;
        }
        ExportFormat::Png => {
            let max = h.weights.iter().cloned().fold(0.0, f64::max);
            let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
            let img = image::GrayImage::from_fn(h.sectors as u32, h.bands as u32, |x, y| {
                let w = h.weights[y as usize * h.sectors + x as usize];
                image::Luma([(w * scale).round() as u8])
            });
            std::fs::File::create(path)?;
            img.save_with_format(path, image::ImageFormat::Png)
                .map_err(|e| Error::Image(e.to_string()))?;
        }
    }
    Ok(())
}

/// Reads a histogram written by the csv exporter.
pub fn read_histogram_csv(path: &Path, grid: (usize, usize)) -> Result<Histogram> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut weights = vec![0.0; grid.0 * grid.1];
    for rec in r.deserialize::<(usize, usize, f64)>() {
        let (band, sector, w) = rec.map_err(csv_err)?;
        if band >= grid.0 || sector >= grid.1 {
            return Err(Error::Domain(format!("cell ({band}, {sector}) outside the {}x{} grid", grid.0, grid.1)));
        }
        weights[band * grid.1 + sector] = w;
    }
    Ok(Histogram {
        bands: grid.0,
        sectors: grid.1,
        weights,
    })
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Domain(format!("csv: {other:?}")),
    }
}

/// Seed pairs whose distances are averaged into a noise floor.
pub const CALIBRATION_SEEDS: [(u64, u64); 3] = [(1, 2), (3, 4), (5, 6)];

/// Mean distance between independent samplings of `f` over [`CALIBRATION_SEEDS`].
pub fn calibrated_floor(f: &RationalMap, n: usize, burn_in: usize, grid: (usize, usize)) -> Result<f64> {
    let mut total = 0.0;
    for seeds in CALIBRATION_SEEDS {
        total += noise_floor(f, n, burn_in, seeds, grid)?;
    }
    Ok(total / CALIBRATION_SEEDS.len() as f64)
}

/// The maps whose noise floors are recorded by calibration: z², T₂, z² − 1.
pub fn reference_maps() -> Vec<(&'static str, RationalMap)> {
    let poly = |c: &[i64]| RationalMap::polynomial(crate::algebra::Polynomial::from_ints(1, c));
    vec![
        ("z^2", poly(&[0, 0, 1])),
        ("T_2", poly(&[-1, 0, 2])),
        ("z^2-1", poly(&[-1, 0, 1])),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub samples: usize,
    pub burn_in: usize,
    pub grid: (usize, usize),
    pub seed_pairs: Vec<(u64, u64)>,
    pub floors: std::collections::BTreeMap<String, f64>,
}

impl Calibration {
    pub fn floor(&self, name: &str) -> Option<f64> {
        self.floors.get(name).copied()
    }
}

pub fn calibrate(n: usize, burn_in: usize, grid: (usize, usize)) -> Result<Calibration> {
    let mut floors = std::collections::BTreeMap::new();
    for (name, f) in reference_maps() {
        floors.insert(name.to_string(), calibrated_floor(&f, n, burn_in, grid)?);
    }
    Ok(Calibration {
        samples: n,
        burn_in,
        grid,
        seed_pairs: CALIBRATION_SEEDS.to_vec(),
        floors,
    })
}
