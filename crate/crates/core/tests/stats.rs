use std::f64::consts::PI;
use std::sync::OnceLock;

use mesozeta::specialfn::EvaluationPrecision;
use mesozeta::stats::{
    archimedean_term, g_gamma_terms, linear_statistic, linear_statistic_smoothed, predicted_variance, sample_clt,
    smoothed_moment, window_scale, ExperimentConfig, MomentMode, MomentOptions, SmoothedStatistic,
};
use mesozeta::testfn::{check_pointwise_bound, BumpKernel, SmoothingWeight, TestFunction, WeightFunction};
use mesozeta::zeros::{count_n, find_zeros, TableSource, ZeroTable};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const HEIGHT: f64 = 1e4;

fn zeros() -> &'static ZeroTable {
    static TABLE: OnceLock<ZeroTable> = OnceLock::new();
    TABLE.get_or_init(|| find_zeros(0.0, 26_000.0, &EvaluationPrecision::default()).unwrap())
}

fn indicator() -> TestFunction {
    TestFunction::indicator(0.0, 1.0).unwrap()
}

#[test]
fn indicator_statistic_is_a_count_difference() {
    let table = zeros();
    let eta = indicator();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let cap = 0.5 * HEIGHT.ln();
    for _ in 0..1000 {
        let t = rng.gen_range(HEIGHT..2.0 * HEIGHT);
        let n = rng.gen_range(1.0..cap);
        let d = linear_statistic(table, &eta, n, HEIGHT, t).unwrap();
        let s = 2.0 * PI * n / HEIGHT.ln();
        let expect = count_n(table, t + s).unwrap() - count_n(table, t).unwrap();
        assert_eq!(d, expect as f64, "t = {t}, n = {n}");
    }
}

#[test]
fn low_window_holds_one_zero() {
    let table = zeros();
    let d = linear_statistic(table, &indicator(), 3.0, HEIGHT, 100.0).unwrap();
    assert_eq!(d, 1.0);
    let inside: Vec<f64> = table.ordinates().iter().copied().filter(|g| (100.0..102.05).contains(g)).collect();
    assert_eq!(inside.len(), 1);
    assert!((inside[0] - 101.3178).abs() < 1e-3);
}

#[test]
fn zero_free_gap_gives_zero() {
    let table = zeros();
    let o = table.ordinates();
    // A gap between consecutive zeros, with a window strictly inside it.
    let i = o.partition_point(|&g| g < 12_000.0);
    let (a, b) = (o[i], o[i + 1]);
    let n = 0.2 * (b - a) * HEIGHT.ln() / (2.0 * PI);
    let d = linear_statistic(table, &indicator(), n, HEIGHT, a + 0.1 * (b - a)).unwrap();
    assert_eq!(d, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statistic_is_linear(t in 10_500.0..19_500.0f64, n in 1.0..4.5f64) {
        let table = zeros();
        let a = TestFunction::indicator(-0.5, 0.7).unwrap();
        let b = TestFunction::triangle(0.0, 2.0).unwrap();
        let combined = a.combine(2.0, &b, -3.0);
        let lhs = linear_statistic(table, &combined, n, HEIGHT, t).unwrap();
        let da = linear_statistic(table, &a, n, HEIGHT, t).unwrap();
        let db = linear_statistic(table, &b, n, HEIGHT, t).unwrap();
        prop_assert!((lhs - (2.0 * da - 3.0 * db)).abs() < 1e-9);
    }

    #[test]
    fn translation_moves_the_height(t in 10_500.0..19_500.0f64, n in 1.0..4.5f64, c in -2.0..2.0f64) {
        let table = zeros();
        let eta = TestFunction::triangle(-1.0, 1.5).unwrap();
        let moved = eta.shifted(c);
        let s = window_scale(n, HEIGHT);
        let lhs = linear_statistic(table, &moved, n, HEIGHT, t).unwrap();
        let rhs = linear_statistic(table, &eta, n, HEIGHT, t + c * s).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }
}

#[test]
fn reports_repeat_and_ignore_worker_count() {
    let table = zeros();
    let config = ExperimentConfig::new(HEIGHT, 3.0, indicator(), 2000, 42);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_clt(table, &config).unwrap())
    };
    let one = run(1);
    let three = run(3);
    assert_eq!(one, three);
    assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&run(2)).unwrap());
    let other = sample_clt(table, &ExperimentConfig { master_seed: 43, ..config.clone() }).unwrap();
    assert_ne!(one.mean, other.mean);
}

#[test]
fn clt_mean_tracks_the_finite_height_expectation() {
    let table = zeros();
    let n = 3.0;
    let config = ExperimentConfig::new(HEIGHT, n, indicator(), 4000, 5);
    let report = sample_clt(table, &config).unwrap();
    assert_eq!(report.samples, 4000);
    assert!(report.variance >= 0.0);
    // E Δ = ∫ s·log(t/2π)/2π over t uniform in [T, 2T].
    let s = window_scale(n, HEIGHT);
    let expect = s / (2.0 * PI) * ((2.0 * HEIGHT / (2.0 * PI)).ln() * 2.0 - (HEIGHT / (2.0 * PI)).ln() - 1.0);
    let band = 5.0 * (report.variance / 4000.0).sqrt();
    assert!((report.mean - expect).abs() < band, "{} vs {expect}", report.mean);
    assert!(report.m3.abs() < 0.5);
    assert_eq!(report.predicted_mean, 3.0);
}

#[test]
fn smoothed_equals_unsmoothed_on_the_line() {
    let table = zeros();
    let eta = indicator();
    let k = BumpKernel::default();
    let a = linear_statistic_smoothed(table, &eta, k, 3.0, HEIGHT, 15_000.0, false).unwrap();
    let b = linear_statistic_smoothed(table, &eta, k, 3.0, HEIGHT, 15_000.0, true).unwrap();
    assert_eq!(a, b);
    let g = g_gamma_terms(table, &eta, k, 3.0, HEIGHT, 15_000.0).unwrap();
    assert_eq!(g.abs_sum, 0.0);
    assert!(!g.values.is_empty());
}

fn single_zero(at: f64, displacement: f64) -> ZeroTable {
    ZeroTable::new(vec![at], 0.0, 2.0 * at, TableSource::Synthetic)
        .unwrap()
        .with_off_axis(vec![displacement], HEIGHT)
        .unwrap()
}

#[test]
fn single_off_axis_zero_within_pointwise_bound() {
    let n = 4.0;
    let a = 1.0;
    let eta = indicator();
    let kernel = BumpKernel::default();
    let t = 10_000.0;
    let table = single_zero(t, a);
    let dd = linear_statistic_smoothed(&table, &eta, kernel, n, HEIGHT, t, true).unwrap();
    let d = linear_statistic_smoothed(&table, &eta, kernel, n, HEIGHT, t, false).unwrap();
    let eps = a / (2.0 * PI * n);
    let xs: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect();
    let c = check_pointwise_bound(&kernel, &eta, n, eps, &xs).unwrap();
    let rhs = c * (a / n) * (1.0 + a / (2.0 * PI)) * (a / 8.0).exp() / PI;
    assert!((dd - d).abs() <= rhs, "{} vs {rhs}", (dd - d).abs());
    assert!((dd - d).abs() > 0.0);
}

#[test]
fn gamma_terms_grow_with_displacement() {
    let eta = indicator();
    let kernel = BumpKernel::default();
    let n = 4.0;
    let t = 10_000.0;
    let mut last = 0.0;
    // ε = A/(2πn) over (0, 0.5].
    for a in [0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2, 6.4, 12.5] {
        assert!(a / (2.0 * PI * n) <= 0.5);
        let g = g_gamma_terms(&single_zero(t + 0.3, a), &eta, kernel, n, HEIGHT, t).unwrap();
        let v = g.abs_sum;
        assert!(v > last, "A = {a}: {v} ≤ {last}");
        last = v;
    }
}

#[test]
fn gamma_sum_below_envelope_sum() {
    let eta = indicator();
    let kernel = BumpKernel::default();
    let n = 4.0;
    let s = window_scale(n, HEIGHT);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let levels = [0.5, 1.0, 2.0];
    let ords: Vec<f64> = (1..12_000).map(|i| 1.7 * i as f64 + rng.gen_range(0.0..0.5)).collect();
    let disp: Vec<f64> =
        ords.iter().map(|_| if rng.gen_bool(0.1) { levels[rng.gen_range(0..3)] } else { 0.0 }).collect();
    let table = ZeroTable::new(ords, 0.0, 20_400.0, TableSource::Synthetic)
        .unwrap()
        .with_off_axis(disp.clone(), HEIGHT)
        .unwrap();
    let t = 10_000.0;
    let g = g_gamma_terms(&table, &eta, kernel, n, HEIGHT, t).unwrap();
    assert!(g.abs_sum.is_finite() && g.abs_sum > 0.0);
    let xs: Vec<f64> = (0..=400).map(|i| -20.0 + 0.1 * i as f64).collect();
    let constants: Vec<f64> =
        levels.iter().map(|a| check_pointwise_bound(&kernel, &eta, n, a / (2.0 * PI * n), &xs).unwrap()).collect();
    let mut envelope = 0.0;
    for (ord, value) in g.ordinates.iter().zip(&g.values) {
        let i = table.ordinates().partition_point(|&o| o < ord.abs());
        let a = disp[i];
        if a == 0.0 {
            assert_eq!(*value, 0.0);
            continue;
        }
        let level = levels.iter().position(|&l| l == a).unwrap();
        let eps = a / (2.0 * PI * n);
        let x = (ord - t) / s;
        let growth = (1.0 + eps * n) * (2.0 * PI * kernel.kappa() * eps * n).exp();
        envelope += 1.5 * constants[level] * eps / (1.0 + x * x) * growth;
    }
    assert!(g.abs_sum <= envelope, "{} vs {envelope}", g.abs_sum);
}

#[test]
fn smoothing_error_stays_bounded_as_n_grows() {
    let table = zeros();
    let eta = indicator();
    let grid: Vec<f64> = (0..400).map(|i| 12_000.0 + 15.0 * i as f64).collect();
    let mut per_unit = Vec::new();
    for n in [1.0, 2.0, 4.0] {
        let st = SmoothedStatistic::new(&eta, BumpKernel::default(), n, HEIGHT).unwrap();
        let mean: f64 = grid
            .iter()
            .map(|&t| {
                (st.evaluate(table, t, false).unwrap().value - linear_statistic(table, &eta, n, HEIGHT, t).unwrap())
                    .abs()
            })
            .sum::<f64>()
            / grid.len() as f64;
        assert!(mean < 8.0, "n = {n}: {mean}");
        per_unit.push(mean / n);
    }
    assert!(per_unit[0] > per_unit[1] && per_unit[1] > per_unit[2], "{per_unit:?}");
}

#[test]
fn archimedean_examples() {
    let k = BumpKernel::default();
    let t = 1.5e6;
    let a = archimedean_term(&indicator(), k, 5.0, 1e6, t).unwrap();
    let main = 5.0 * (t / (2.0 * PI)).ln() / 1e6f64.ln();
    assert!((a.value - main).abs() < 0.02 * main);
    // Zero mass: the main term vanishes.
    let odd = TestFunction::indicator(-1.0, 0.0).unwrap().combine(-1.0, &indicator(), 1.0);
    let b = archimedean_term(&odd, k, 5.0, 1e6, t).unwrap();
    assert!(b.value.abs() <= 1.0 * (t + 2.0).ln() / 1e6f64.ln(), "{}", b.value);
    // Linear in η.
    let c = archimedean_term(&indicator().scaled(3.0), k, 5.0, 1e6, t).unwrap();
    assert!((c.value - 3.0 * a.value).abs() < 1e-10 * a.value);
}

struct Doubled(SmoothingWeight);

impl WeightFunction for Doubled {
    fn value(&self, x: f64) -> f64 {
        2.0 * self.0.value(x)
    }

    fn bulk(&self) -> (f64, f64) {
        self.0.center_and_width()
    }
}

#[test]
fn smoothed_moment_is_linear_in_the_weight() {
    let table = zeros();
    let sigma = SmoothingWeight::Fejer { bandwidth: 8.0, center: 1.5 };
    let opts = MomentOptions { strata: 256, seed: 1 };
    let k = BumpKernel::default();
    let one = smoothed_moment(table, &sigma, &indicator(), k, 3.0, HEIGHT, 2, MomentMode::Delta, opts).unwrap();
    let two =
        smoothed_moment(table, &Doubled(sigma), &indicator(), k, 3.0, HEIGHT, 2, MomentMode::Delta, opts).unwrap();
    assert_eq!(two.value, 2.0 * one.value);
    assert!(one.captured_mass > 0.8 && one.captured_mass < 1.0);
}

#[test]
fn weighted_second_moment_matches_uniform_sampling() {
    let table = zeros();
    let n = 3.0;
    let eta = indicator();
    let config = ExperimentConfig::new(HEIGHT, n, eta.clone(), 8000, 9);
    let samples = mesozeta::stats::draw_samples(table, &config, false).unwrap();
    let centered: Vec<f64> = samples.iter().map(|s| (s.delta - n).powi(2)).collect();
    let empirical = centered.iter().sum::<f64>() / centered.len() as f64;
    let spread = centered.iter().map(|v| (v - empirical).powi(2)).sum::<f64>() / centered.len() as f64;
    let empirical_se = (spread / centered.len() as f64).sqrt();

    let sigma = SmoothingWeight::FejerComb { bandwidth: 64.0, lo: 1.0, hi: 2.0 };
    let opts = MomentOptions { strata: 8000, seed: 2 };
    let m = smoothed_moment(table, &sigma, &eta, BumpKernel::default(), n, HEIGHT, 2, MomentMode::Delta, opts).unwrap();
    let weighted = m.value / m.captured_mass;
    let se = m.standard_error / m.captured_mass;
    let band = 4.0 * (se * se + empirical_se * empirical_se).sqrt() + 0.02 * empirical;
    assert!((weighted - empirical).abs() < band, "{weighted} vs {empirical} (band {band})");
}

#[test]
fn centered_smoothed_moments_are_small_and_positive() {
    let table = zeros();
    let n = 3.0;
    let eta = indicator();
    let sigma = SmoothingWeight::Fejer { bandwidth: 8.0, center: 1.5 };
    let opts = MomentOptions { strata: 512, seed: 4 };
    let k = BumpKernel::default();
    let first = smoothed_moment(table, &sigma, &eta, k, n, HEIGHT, 1, MomentMode::DeltaPrimeCentered, opts).unwrap();
    let second = smoothed_moment(table, &sigma, &eta, k, n, HEIGHT, 2, MomentMode::DeltaPrimeCentered, opts).unwrap();
    let var = predicted_variance(&eta, n).unwrap();
    assert!(second.value > 0.0 && second.value < 2.0 * var);
    assert!(first.value.abs() < 0.15 * var.sqrt() + 4.0 * first.standard_error, "{first:?}");
}
