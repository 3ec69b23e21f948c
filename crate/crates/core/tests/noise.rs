use stochairy::noise::{self, GrowthMode, NoisePath, SamplingMethod};

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn brownian_second_moment_at_one() {
    let seeds = 100_000u64;
    let sum: f64 = (0..seeds)
        .map(|s| {
            let p = noise::sample_path(0.5, 0.01, 1.0, s).unwrap();
            p.values()[100].powi(2)
        })
        .sum();
    let m = sum / seeds as f64;
    let band = 3.0 * 2f64.sqrt() / (seeds as f64).sqrt();
    assert!((m - 1.0).abs() < band, "E[X(1)²] = {m}, band {band}");
}

#[test]
fn fractional_covariance_at_one_and_two() {
    let products: Vec<f64> = (0..100_000u64)
        .map(|s| {
            let p = noise::sample_path(0.75, 0.05, 2.0, s).unwrap();
            p.values()[20] * p.values()[40]
        })
        .collect();
    let (m, se) = mean_and_se(&products);
    let want = 0.5 * (2f64.powf(1.5) + 1.0 - 1.0);
    assert!((m - want).abs() < 3.0 * se, "E[X(2)X(1)] = {m} ± {se}, want {want}");
}

#[test]
fn levinson_route_has_the_same_covariance() {
    let products: Vec<f64> = (0..20_000u64)
        .map(|s| {
            let p = noise::sample_path_with(0.3, 0.1, 2.0, s, SamplingMethod::Levinson).unwrap();
            p.values()[10] * p.values()[20]
        })
        .collect();
    let (m, se) = mean_and_se(&products);
    let want = 0.5 * (2f64.powf(0.6) + 1.0 - 1.0);
    assert!((m - want).abs() < 4.0 * se, "{m} ± {se} vs {want}");
}

#[test]
fn brownian_increments_are_uncorrelated() {
    let products: Vec<f64> = (0..100_000u64)
        .map(|s| {
            let p = noise::sample_path(0.5, 0.1, 2.0, s).unwrap();
            let x = p.values();
            (x[10] - x[0]) * (x[20] - x[10])
        })
        .collect();
    let (m, se) = mean_and_se(&products);
    assert!(m.abs() < 3.0 * se, "{m} ± {se}");
}

#[test]
fn averaged_derivative_is_the_path_difference() {
    for seed in 0..5 {
        for &h in &[0.3, 0.5, 0.8] {
            let p = noise::sample_path(h, 0.01, 6.0, seed).unwrap();
            let avg = noise::averaged_path(&p).unwrap();
            let x = p.values();
            for (i, d) in avg.derivative.iter().enumerate() {
                assert_eq!(*d, x[i + 100] - x[i]);
            }
        }
    }
}

#[test]
fn averaged_linear_path_within_step_squared() {
    let p = NoisePath::from_fn(0.01, 5.0, |t| t).unwrap();
    let avg = noise::averaged_path(&p).unwrap();
    for (i, a) in avg.values.iter().enumerate() {
        assert!((a - (i as f64 * 0.01 + 0.5)).abs() < 1e-4);
    }
    assert!(avg.derivative.iter().all(|&d| (d - 1.0).abs() < 1e-12));
}

#[test]
fn growth_of_zero_path() {
    let p = NoisePath::zero(0.1, 5.0).unwrap();
    let avg = noise::averaged_path(&p).unwrap();
    for mode in [GrowthMode::Derivative, GrowthMode::Gap] {
        let d = noise::growth_diagnostic(&avg, mode).unwrap();
        assert!(d.block_suprema.iter().all(|b| b.1 == 0.0));
    }
}

#[test]
fn growth_needs_three_units() {
    let p = NoisePath::zero(0.1, 3.0).unwrap();
    let avg = noise::averaged_path(&p).unwrap();
    assert!(noise::growth_diagnostic(&avg, GrowthMode::Gap).is_err());
}

#[test]
fn running_maximum_settles_early() {
    let seeds = 100;
    let settled = (0..seeds)
        .filter(|&s| {
            let p = noise::sample_path(0.5, 1.0 / 16.0, 10_001.0, s).unwrap();
            let avg = noise::averaged_path(&p).unwrap();
            let d = noise::growth_diagnostic(&avg, GrowthMode::Derivative).unwrap();
            d.running_max_at(10_000) == d.running_max_at(1_000)
        })
        .count();
    assert!(settled * 10 >= seeds as usize * 9, "{settled}/{seeds}");
}
