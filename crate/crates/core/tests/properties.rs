//! Invariants checked on randomly drawn inputs.

use logdamp::modes::{remainder_terms, u_hat, u_hat_t, Damping, DataPair, InitialDataSpec};
use logdamp::norms::{fit_decay, DecaySeries, SpectralProfile};
use logdamp::special::{gamma_ratio, i_p, i_p_recurrence, j_p_scaled, middle_band};
use logdamp::symbols::{eval_symbols, log1p_sq};
use logdamp::util::{pairwise_sum, sinc};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn data(n: u32, a0: f64, w0: f64, a1: f64, w1: f64) -> DataPair {
    DataPair::new(
        InitialDataSpec::gaussian(a0, w0, n).unwrap(),
        InitialDataSpec::gaussian(a1, w1, n).unwrap(),
    )
    .unwrap()
}

fn radius() -> impl Strategy<Value = f64> {
    (-6.0f64..4.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn symbols_are_consistent(r in radius()) {
        let s = eval_symbols(r).unwrap();
        prop_assert!(((s.a * s.a + s.b * s.b) / (r * r) - 1.0).abs() < 1e-13);
        prop_assert!(s.b_minus_r <= 0.0);
        prop_assert!(s.inv_b_minus_inv_r >= 0.0);
        prop_assert!((0.0..0.17).contains(&s.g));
        prop_assert!(s.b > 0.0 && s.b <= r);
    }

    #[test]
    fn gamma_ratio_recurrence(t in 0.6f64..200.0) {
        let lhs = gamma_ratio(t + 1.0).unwrap();
        let rhs = gamma_ratio(t).unwrap() * (t - 0.5) / t;
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-12, "t={t}");
    }

    #[test]
    fn i_p_recurrence_matches_quadrature(t in 3.0f64..500.0, p in 2.0f64..4.5) {
        let stepped = i_p_recurrence(t, p, i_p(t, p - 2.0).unwrap()).unwrap();
        let direct = i_p(t, p).unwrap();
        prop_assert!((stepped / direct - 1.0).abs() < 1e-9, "t={t} p={p}");
    }

    #[test]
    fn i_p_decreases_in_t_and_p(t in 0.5f64..300.0, p in 0.0f64..6.0) {
        let v = i_p(t, p).unwrap();
        prop_assert!(v > 0.0);
        prop_assert!(i_p(t * 1.5, p).unwrap() < v);
        prop_assert!(i_p(t, p + 0.5).unwrap() < v);
    }

    #[test]
    fn middle_band_below_its_bound(eta in 0.01f64..0.99, t in 1.0f64..1e4, p in 0.0f64..5.0) {
        let v = middle_band(eta, p, t).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert!(v <= (-t * (eta * eta).ln_1p()).exp() * (1.0 + 1e-12));
    }

    #[test]
    fn j_p_scaled_sandwich(t in 5.0f64..1e4, p in 0.0f64..6.0) {
        prop_assume!(t > (p + 3.0) / 2.0 + 0.5);
        let v = j_p_scaled(t, p).unwrap();
        let c = 2f64.powf((p - 1.0) / 2.0) * (t - 1.0) / (t - (p + 1.0) / 2.0);
        let (lo, hi) = if p >= 1.0 { (1.0, c) } else { (c, 1.0) };
        prop_assert!(v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12), "t={t} p={p} v={v}");
    }

    #[test]
    fn time_derivative_matches_difference(
        t in 0.5f64..50.0,
        r in 0.01f64..5.0,
        n in 1u32..=3,
        a0 in -2.0f64..2.0,
        a1 in -2.0f64..2.0,
    ) {
        let d = data(n, a0, 0.7, a1, 1.3);
        let h = 1e-5;
        let fd = (u_hat(t + h, r, &d, Damping::Logarithmic).unwrap()
            - u_hat(t - h, r, &d, Damping::Logarithmic).unwrap())
            / (2.0 * h);
        let exact = u_hat_t(t, r, &d, Damping::Logarithmic).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "{fd} vs {exact}");
    }

    #[test]
    fn remainder_split_closes(
        t in (0.0f64..6.0).prop_map(|e| 10f64.powf(e)),
        r in radius(),
        n in 1u32..=3,
        a0 in -2.0f64..2.0,
        a1 in -2.0f64..2.0,
        w1 in 0.3f64..3.0,
    ) {
        let d = data(n, a0, 1.0, a1, w1);
        let m = remainder_terms(t, r, &d).unwrap();
        prop_assert!(m.relative_closure() < 1e-10, "t={t} r={r}: {}", m.relative_closure());
    }

    #[test]
    fn high_frequency_terms_within_envelopes(
        t in 1.0f64..1e4,
        r in 0.01f64..50.0,
        a1 in 0.1f64..3.0,
    ) {
        let d = data(2, 0.0, 1.0, a1, 1.0);
        let m = remainder_terms(t, r, &d).unwrap();
        let s = eval_symbols(r).unwrap();
        let p1 = d.p1().abs();
        let damp = (-s.a * t).exp();
        let slack = 1.0 + 1e-12;
        prop_assert!(m.k[4].abs() <= p1 * t * damp * s.b_minus_r.abs() / s.b * slack + 1e-300);
        let l2 = log1p_sq(r).powi(2);
        prop_assert!(m.k[3].abs() <= p1 * damp * l2 / (8.0 * r.powi(3)) * 2.0 * 2f64.sqrt() * slack + 1e-300);
        let v1 = d.u1.transform(r).abs();
        prop_assert!(m.u_hat.abs() <= damp * v1 / s.b * slack + 1e-300);
    }

    #[test]
    fn fitted_slope_of_perturbed_power_law(
        slope in -1.0f64..1.0,
        noise in prop::collection::vec(-0.01f64..0.01, 12),
    ) {
        let t: Vec<f64> = (0..12).map(|k| 10f64.powf(2.0 + 0.25 * k as f64)).collect();
        let v: Vec<f64> = t.iter().zip(&noise).map(|(t, e)| 3.0 * t.powf(slope) * (1.0 + e)).collect();
        let fit = fit_decay(&DecaySeries::new(t.clone(), v, "synthetic").unwrap(), (t[0], t[11])).unwrap();
        prop_assert!((fit.slope - slope).abs() < 0.05);
        prop_assert!(fit.max_log_residual < 0.03);
    }

    #[test]
    fn spectral_inequality_holds(seed in any::<u64>(), n in 1u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ratio = SpectralProfile::random(&mut rng, n).kato_rellich_ratio().unwrap();
        prop_assert!((0.0..=1.0).contains(&ratio));
    }

    #[test]
    fn pairwise_sum_matches_sorted_sum(xs in prop::collection::vec(-1e3f64..1e3, 0..400)) {
        let naive: f64 = xs.iter().sum();
        let scale: f64 = xs.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!((pairwise_sum(&xs) - naive).abs() <= 1e-12 * scale);
    }

    #[test]
    fn sinc_is_continuous_across_series_switch(z in -0.01f64..0.01) {
        let direct = if z == 0.0 { 1.0 } else { z.sin() / z };
        prop_assert!((sinc(z) - direct).abs() < 1e-15);
        prop_assert!(sinc(z).abs() <= 1.0);
    }
}

#[test]
fn i_p_exceeds_its_lower_witness() {
    for p in [1.0f64, 2.0, 3.0] {
        for t in [10.0f64, 100.0] {
            let witness = (-p / 8.0).exp() / 2f64.powf(p + 2.0) * (p / (2.0 * t - p)).powf((p + 1.0) / 2.0);
            assert!(i_p(t, p).unwrap() >= witness, "p={p} t={t}");
        }
    }
}
