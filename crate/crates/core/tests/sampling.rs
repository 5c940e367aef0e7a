use core::f64::consts::{FRAC_PI_4, FRAC_PI_6};

use ttess_core::enumerate::{count_tessellations, DEFAULT_BUDGET};
use ttess_core::geometry::{
    build_event_table, choose_time_axis, line_stream_rng, sample_poisson_lines_with,
    sample_uniform_lines,
};
use ttess_core::gibbs::{estimate_partition, partition_sample, summarize, EnergyModel};
use ttess_core::ConvexPolygon;

/// Fraction of the angle mass on `[0, a)` for lines hitting the unit square:
/// the hitting width at angle `t` is `|cos t| + sin t`, integrating to 4
/// over `[0, pi)`. Valid for `a <= pi / 2`.
fn angle_fraction(a: f64) -> f64 {
    (a.sin() + 1.0 - a.cos()) / 4.0
}

#[test]
fn uniform_lines_angle_marginal() {
    let square = ConvexPolygon::unit_square();
    let n = 40_000;
    let lines = sample_uniform_lines(n, &square, &mut line_stream_rng(2024, 0));
    for a in [FRAC_PI_6, FRAC_PI_4] {
        let hits = lines.iter().filter(|l| l.alpha < a).count() as f64 / n as f64;
        let want = angle_fraction(a);
        let sigma = (want * (1.0 - want) / n as f64).sqrt();
        assert!((hits - want).abs() < 4.0 * sigma, "a={a}: {hits} vs {want}");
    }
    assert!((angle_fraction(FRAC_PI_4) - 0.25).abs() < 1e-15);
}

#[test]
fn poisson_count_mean_and_zero_mass() {
    let square = ConvexPolygon::unit_square();
    let n = 20_000;
    let counts: Vec<usize> = (0..n)
        .map(|i| sample_poisson_lines_with(2.0, &square, &mut line_stream_rng(5, i)).unwrap().len())
        .collect();
    let mean = counts.iter().sum::<usize>() as f64 / n as f64;
    assert!((mean - 2.0).abs() < 4.0 * (2.0 / n as f64).sqrt(), "mean {mean}");
    let p0 = counts.iter().filter(|&&c| c == 0).count() as f64 / n as f64;
    let want = (-2.0f64).exp();
    assert!((p0 - want).abs() < 4.0 * (want * (1.0 - want) / n as f64).sqrt(), "p0 {p0}");
}

#[test]
fn zero_energy_estimate_is_mean_count() {
    let square = ConvexPolygon::unit_square();
    let (tau, seed, n) = (1.5, 8, 300);
    let est = estimate_partition(&EnergyModel::zero(), tau, &square, n, 9, seed, DEFAULT_BUDGET)
        .unwrap();
    let mut total = 0u64;
    for i in 0..n as u64 {
        let lines = sample_poisson_lines_with(tau, &square, &mut line_stream_rng(seed, i)).unwrap();
        let w = choose_time_axis(&lines, &square, seed.wrapping_add(i)).unwrap();
        total += count_tessellations(&build_event_table(&lines, &w).unwrap(), DEFAULT_BUDGET).unwrap();
    }
    assert_eq!(est.skipped_oversize, 0);
    assert!((est.z_hat - total as f64 / n as f64).abs() < 1e-12);
}

#[test]
fn doubling_samples_halves_variance() {
    let square = ConvexPolygon::unit_square();
    let model = EnergyModel::zero();
    let small = estimate_partition(&model, 1.0, &square, 400, 9, 1, DEFAULT_BUDGET).unwrap();
    let large = estimate_partition(&model, 1.0, &square, 800, 9, 2, DEFAULT_BUDGET).unwrap();
    let ratio = (small.std_error / large.std_error).powi(2);
    assert!((1.0..=4.0).contains(&ratio), "variance ratio {ratio}");
}

#[test]
fn low_line_counts_match_closed_form() {
    let square = ConvexPolygon::unit_square();
    let (tau, n) = (2.0, 2000);
    let samples: Vec<_> = (0..n)
        .map(|i| partition_sample(&EnergyModel::zero(), tau, &square, 9, 41, i, DEFAULT_BUDGET).unwrap())
        .collect();
    let low: Vec<f64> =
        samples.iter().map(|s| if s.lines <= 1 { s.mass.unwrap() } else { 0.0 }).collect();
    let mean = low.iter().sum::<f64>() / n as f64;
    let var = low.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let want = (-tau).exp() * (1.0 + tau);
    assert!((mean - want).abs() < 3.0 * (var / n as f64).sqrt(), "{mean} vs {want}");
    let est = summarize(&samples, tau, 9, 41);
    assert!(est.z_hat >= mean);
}

#[test]
fn samples_are_schedule_independent() {
    let square = ConvexPolygon::unit_square();
    let model = EnergyModel::NLines(0.3);
    let forward: Vec<_> = (0..20)
        .map(|i| partition_sample(&model, 2.0, &square, 9, 6, i, DEFAULT_BUDGET).unwrap())
        .collect();
    let mut backward: Vec<_> = (0..20)
        .rev()
        .map(|i| partition_sample(&model, 2.0, &square, 9, 6, i, DEFAULT_BUDGET).unwrap())
        .collect();
    backward.reverse();
    assert_eq!(forward, backward);
}
