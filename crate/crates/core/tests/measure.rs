use std::path::Path;

use mmekit::algebra::{CycElement, Point64, Polynomial, RationalMap};
use mmekit::families::ritt_pair;
use mmekit::funceq::build_from_decomposition;
use mmekit::measure::*;
use mmekit::Error;
use proptest::prelude::*;

const N: usize = 10_000;

fn poly_map(c: &[i64]) -> RationalMap {
    RationalMap::polynomial(Polynomial::from_ints(1, c))
}

fn sample(f: &RationalMap, seed: u64) -> EmpiricalMeasure {
    sample_backward(f, N, DEFAULT_BURN_IN, seed, DEFAULT_GRID).unwrap()
}

fn fraction(m: &EmpiricalMeasure, pred: impl Fn(Point64) -> bool) -> f64 {
    m.points.iter().filter(|&&p| pred(p)).count() as f64 / m.points.len() as f64
}

#[test]
fn power_map_measure_is_on_the_circle() {
    let near_circle = |p: Point64| (0.9..1.1).contains(&p.abs());
    assert!(fraction(&sample(&poly_map(&[0, 0, 1]), 0), near_circle) >= 0.99);
    // 1/z² has the same Julia set
    let inv = RationalMap::new(Polynomial::from_ints(1, &[1]), Polynomial::from_ints(1, &[0, 0, 1])).unwrap();
    assert!(fraction(&sample(&inv, 0), near_circle) >= 0.99);
}

#[test]
fn chebyshev_measure_is_on_the_segment() {
    let m = sample(&poly_map(&[-1, 0, 2]), 0);
    let on_segment = |p: Point64| matches!(p, Point64::Finite(z) if z.re.abs() <= 1.0 && z.im.abs() <= 1e-3);
    assert!(fraction(&m, on_segment) >= 0.99);
}

#[test]
fn arcsine_oracle_for_chebyshev() {
    // μ_{T₂} has density 1/(π√(1−x²)), so P(|x| < 1/2) = 2/π · asin(1/2) = 1/3
    let m = sample(&poly_map(&[-1, 0, 2]), 4);
    let inner = fraction(&m, |p| matches!(p, Point64::Finite(z) if z.re.abs() < 0.5));
    assert!((inner - 1.0 / 3.0).abs() < 0.02, "{inner}");
}

#[test]
fn distance_examples() {
    let z2 = sample(&poly_map(&[0, 0, 1]), 0);
    assert_eq!(measure_distance(&z2, &z2).unwrap(), 0.0);
    let other = sample(&poly_map(&[0, 0, 1]), 1);
    assert!(measure_distance(&z2, &other).unwrap() < 0.15);
    let basilica = sample(&poly_map(&[-1, 0, 1]), 0);
    assert!(measure_distance(&z2, &basilica).unwrap() > 0.8);

    let coarse = sample_backward(&poly_map(&[0, 0, 1]), 100, 10, 0, (8, 16)).unwrap();
    assert!(matches!(
        measure_distance(&z2, &coarse),
        Err(Error::GridMismatch((64, 128), (8, 16)))
    ));
}

#[test]
fn built_systems_share_their_measure() {
    let p = ritt_pair(2).unwrap();
    let fs = build_from_decomposition(&p.a, &[p.x.clone(), p.y.clone()]).unwrap();
    let floor = calibrated_floor(&fs[0], N, DEFAULT_BURN_IN, DEFAULT_GRID).unwrap();
    let d = measure_distance(&sample(&fs[0], 0), &sample(&fs[1], 0)).unwrap();
    assert!(d <= 1.5 * floor, "{d} vs floor {floor}");

    let a = RationalMap::monomial(CycElement::one(1), 2);
    let shift = RationalMap::new(Polynomial::from_ints(1, &[1, 2]), Polynomial::from_ints(1, &[3, 1])).unwrap();
    let xs = [shift.clone(), RationalMap::monomial(CycElement::from_int(1, -1), 1).compose(&shift).unwrap()];
    let fs = build_from_decomposition(&a, &xs).unwrap();
    let floor = calibrated_floor(&fs[0], N, DEFAULT_BURN_IN, DEFAULT_GRID).unwrap();
    let d = measure_distance(&sample(&fs[0], 0), &sample(&fs[1], 0)).unwrap();
    assert!(d <= 1.5 * floor, "{d} vs floor {floor}");
}

#[test]
fn deterministic_across_thread_counts() {
    let f = poly_map(&[-1, 0, 1]);
    let a = sample_backward(&f, 2000, 40, 9, DEFAULT_GRID).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| sample_backward(&f, 2000, 40, 9, DEFAULT_GRID).unwrap());
    assert_eq!(a.histogram, b.histogram);
    assert_eq!(a.points, b.points);
    assert_eq!(
        serde_json::to_string(&a.to_json()).unwrap(),
        serde_json::to_string(&b.to_json()).unwrap()
    );
}

#[test]
fn json_round_trip() {
    let m = sample_backward(&poly_map(&[0, 0, 1]), 500, 20, 3, (16, 32)).unwrap();
    let text = serde_json::to_string(&m.to_json()).unwrap();
    let back = EmpiricalMeasure::from_json_str(&text).unwrap();
    assert_eq!(back.histogram, m.histogram);
    assert_eq!(measure_distance(&m, &back).unwrap(), 0.0);
    assert!(matches!(EmpiricalMeasure::from_json_str("{\"degree\": 2,"), Err(Error::MalformedJson { .. })));
}

#[test]
fn csv_round_trip() {
    let m = sample_backward(&poly_map(&[-1, 0, 1]), 3000, 40, 0, DEFAULT_GRID).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    export_histogram(&m, ExportFormat::Csv, &path).unwrap();
    let back = read_histogram_csv(&path, DEFAULT_GRID).unwrap();
    for (a, b) in m.histogram.weights.iter().zip(&back.weights) {
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
    }
}

#[test]
fn png_polar_bands_are_dark() {
    let m = sample(&poly_map(&[0, 0, 1]), 0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.png");
    export_histogram(&m, ExportFormat::Png, &path).unwrap();
    let img = image::open(&path).unwrap().to_luma8();
    assert_eq!(img.dimensions(), (128, 64));
    let row = |y: u32| (0..128).map(|x| img.get_pixel(x, y)[0] as u64).sum::<u64>();
    let total: u64 = (0..64).map(row).sum();
    assert!(total > 0);
    assert!(((row(0) + row(63)) as f64) < 0.01 * total as f64);
}

#[test]
fn export_to_bad_path_is_an_io_error() {
    let m = sample_backward(&poly_map(&[0, 0, 1]), 10, 5, 0, (4, 4)).unwrap();
    for format in [ExportFormat::Csv, ExportFormat::Png] {
        assert!(matches!(export_histogram(&m, format, Path::new("")), Err(Error::Io(_))));
    }
}

#[test]
fn preconditions() {
    assert!(matches!(
        sample_backward(&poly_map(&[1, 1]), 10, 5, 0, DEFAULT_GRID),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        sample_backward(&poly_map(&[0, 0, 1]), 0, 5, 0, DEFAULT_GRID),
        Err(Error::Domain(_))
    ));
}

fn small_map() -> impl Strategy<Value = RationalMap> {
    (
        prop::collection::vec(-4i64..=4, 3..=4),
        prop::collection::vec(-4i64..=4, 1..=3),
    )
        .prop_filter_map("degree >= 2", |(n, d)| {
            let f = RationalMap::new(Polynomial::from_ints(1, &n), Polynomial::from_ints(1, &d)).ok()?;
            (f.degree() >= 2).then_some(f)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weights_sum_to_one(f in small_map(), n in 1usize..400, seed in 0u64..100, b in 1usize..20, l in 1usize..40) {
        let m = sample_backward(&f, n, 10, seed, (b, l)).unwrap();
        prop_assert!((m.histogram.total() - 1.0).abs() <= 1e-12);
        prop_assert!(m.histogram.weights.iter().all(|&w| w >= 0.0));
        prop_assert_eq!(m.points.len(), n);
    }
}
