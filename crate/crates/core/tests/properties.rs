use proptest::prelude::*;

use rayleigh_queue::channel::{derive_load, ChannelParams, LoadSpec};
use rayleigh_queue::finite::{finite_stationary, overflow_probability};
use rayleigh_queue::infinite::{mean_vestige, phi_sequence, queue_pgf, stationary_pmf};
use rayleigh_queue::markov::{build_finite, build_infinite_truncated, build_poisson_arrivals};
use rayleigh_queue::special::{lambert_w0, lambert_wm1, regularized_gamma_lower, regularized_gamma_upper};

fn theta() -> impl Strategy<Value = f64> {
    0.02f64..0.95
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lambert_residuals(u in 1e-6f64..1.0, v in -20.0f64..20.0) {
        let x = -(-1.0f64).exp() * u;
        for w in [lambert_w0(x).unwrap(), lambert_wm1(x).unwrap()] {
            prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs());
        }
        let y = v.exp();
        let w = lambert_w0(y).unwrap();
        prop_assert!((w * w.exp() - y).abs() <= 1e-12 * y);
    }

    #[test]
    fn incomplete_gamma_complements(a in 0.1f64..50.0, x in 0.0f64..80.0) {
        let p = regularized_gamma_lower(a, x).unwrap();
        let q = regularized_gamma_upper(a, x).unwrap();
        prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q));
        prop_assert!((p + q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tails_decrease_and_law_is_a_pmf(t in theta()) {
        let phis = phi_sequence(t, 20, 1e-12).unwrap();
        prop_assert!(phis.windows(2).all(|w| w[1] < w[0]));
        prop_assert!((phis[1] - t).abs() < 1e-10);
        let d = stationary_pmf(t, 20, 1e-12).unwrap();
        prop_assert!(d.probabilities.iter().all(|&p| p >= 0.0));
        prop_assert!((d.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pgf_is_increasing_on_unit_interval(t in theta(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (pl, ph) = (queue_pgf(t, lo).unwrap(), queue_pgf(t, hi).unwrap());
        prop_assert!(pl <= ph + 1e-15);
        prop_assert!((1.0 - t - 1e-15..=1.0 + 1e-15).contains(&pl));
    }

    #[test]
    fn finite_law_balances(t in theta(), k in 1usize..40) {
        let d = finite_stationary(t, k).unwrap();
        let sum: f64 = d.probabilities.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-10);
        prop_assert!(d.probabilities.iter().all(|&p| p >= 0.0));
        let p = overflow_probability(t, k).unwrap();
        prop_assert!(((1.0 - p) * t - (1.0 - d.probabilities[0])).abs() < 1e-10);
    }

    #[test]
    fn overflow_monotone(t in 0.05f64..0.9, k in 0usize..30) {
        prop_assert!(overflow_probability(t, k + 1).unwrap() < overflow_probability(t, k).unwrap());
        prop_assert!(overflow_probability(t, k).unwrap() < overflow_probability(t + 0.05, k).unwrap());
    }

    #[test]
    fn vestige_below_half_block(t in 1e-4f64..0.999) {
        let v = mean_vestige(t).unwrap();
        prop_assert!(v > 0.0 && v < 0.5);
    }

    #[test]
    fn matrices_are_row_stochastic(t in theta(), n in 2usize..60, lambda in 0.1f64..3.0) {
        for m in [
            build_infinite_truncated(t, n).unwrap(),
            build_finite(t, n).unwrap(),
            build_poisson_arrivals(t, lambda, n).unwrap(),
        ] {
            for (i, s) in m.row_sums().into_iter().enumerate() {
                prop_assert!((s - 1.0).abs() < 1e-12);
                prop_assert!(m.row(i).iter().all(|&p| p >= 0.0));
            }
        }
    }

    #[test]
    fn load_depends_on_snr_ratio_only(scale in 0.1f64..10.0, t in theta()) {
        let base = ChannelParams::new(5e6, 1e-4, 0.1, 1e-17, 1000.0, 4.0, 1.0).unwrap();
        let mut scaled = base;
        scaled.tx_power *= scale;
        scaled.noise_density *= scale;
        let rate = t * 5e6 * base.mean_snr();
        let a = derive_load(&base, rate).unwrap();
        let b = derive_load(&scaled, rate).unwrap();
        prop_assert!((a.theta() - t).abs() < 1e-12 && (b.theta() - t).abs() < 1e-12);
        let direct = LoadSpec::from_theta_nu(t, a.nu()).unwrap();
        prop_assert!((direct.packet_size() - a.packet_size()).abs() < 1e-12 * a.packet_size());
    }
}
