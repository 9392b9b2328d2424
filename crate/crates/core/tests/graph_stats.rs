//! Statistical checks of the graph generators against their degree oracles.

use cyberepi::graph::{generate_ba, generate_er, is_connected, Family, GraphSpec};

#[test]
fn er_mean_degree_stays_near_target() {
    for seed in 0..100 {
        let g = generate_er(&GraphSpec::new(Family::ErdosRenyi, 1000, 10.0, seed)).unwrap();
        assert!(is_connected(&g));
        let k = g.mean_degree();
        assert!((9.5..=10.5).contains(&k), "seed {seed}: mean degree {k}");
    }
}

#[test]
fn er_ensemble_mean_matches_binomial_oracle() {
    // degree ~ Binomial(n-1, p); mean degree of one graph = 2 E / n with
    // E ~ Binomial(n(n-1)/2, p)
    let (n, k) = (200usize, 6.0);
    let p = k / (n - 1) as f64;
    let pairs = (n * (n - 1) / 2) as f64;
    let sd_one = 2.0 * (pairs * p * (1.0 - p)).sqrt() / n as f64;
    let samples = 200;
    let mean: f64 = (0..samples)
        .map(|s| generate_er(&GraphSpec::new(Family::ErdosRenyi, n, k, 1000 + s)).unwrap().mean_degree())
        .sum::<f64>()
        / samples as f64;
    let se = sd_one / (samples as f64).sqrt();
    // conditioning on connectivity shifts the mean by far less than se at k = 6
    assert!((mean - p * (n - 1) as f64).abs() < 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn ba_degree_distribution_is_heavy_tailed() {
    let mut heavy = 0;
    for seed in 0..100 {
        let g = generate_ba(&GraphSpec::new(Family::BarabasiAlbert, 5000, 6.0, seed)).unwrap();
        if g.max_degree() as f64 > 10.0 * g.mean_degree() {
            heavy += 1;
        }
    }
    assert!(heavy >= 95, "{heavy}/100 samples with a hub above 10x the mean degree");
}

#[test]
fn ba_mean_degree_just_below_target() {
    for seed in 0..20 {
        let g = generate_ba(&GraphSpec::new(Family::BarabasiAlbert, 1000, 10.0, seed)).unwrap();
        let k = g.mean_degree();
        assert!((9.0..=10.0).contains(&k), "{k}");
    }
}
